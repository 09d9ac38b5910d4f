//! Energy distance between sample sets, the laboratory's quality metric.

use crate::{Error, Result};

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn mean_cross_distance(xs: &[Vec<f64>], ys: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for x in xs {
        for y in ys {
            total += euclidean(x, y);
        }
    }
    total / (xs.len() * ys.len()) as f64
}

/// Energy distance `2 E||X - Y|| - E||X - X'|| - E||Y - Y'||` over
/// empirical pairs (V-statistic, diagonal included), so identical sample
/// sets give exactly 0. Nonnegative up to Monte-Carlo noise.
pub fn energy_distance(xs: &[Vec<f64>], ys: &[Vec<f64>]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::Shape("energy distance needs nonempty sample sets".into()));
    }
    let dim = xs[0].len();
    if xs.iter().chain(ys.iter()).any(|p| p.len() != dim) {
        return Err(Error::Shape(
            "energy distance over points of unequal dimension".into(),
        ));
    }
    let xy = mean_cross_distance(xs, ys);
    let xx = mean_cross_distance(xs, xs);
    let yy = mean_cross_distance(ys, ys);
    Ok(2.0 * xy - xx - yy)
}
