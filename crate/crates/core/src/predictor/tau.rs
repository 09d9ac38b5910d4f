//! Kendall rank correlation between predicted scores and measured
//! qualities.

use crate::{Error, Result};

/// Kendall's tau-a: `(concordant - discordant) / (n(n-1)/2)`. Tied pairs
/// count as neither concordant nor discordant.
pub fn kendall_tau(scores: &[f64], truths: &[f64]) -> Result<f64> {
    if scores.len() != truths.len() {
        return Err(Error::Shape(format!(
            "length mismatch: {} scores vs {} truths",
            scores.len(),
            truths.len()
        )));
    }
    let n = scores.len();
    if n < 2 {
        return Err(Error::Domain(format!(
            "kendall tau needs at least 2 observations, got {n}"
        )));
    }
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let ds = scores[i] - scores[j];
            let dt = truths[i] - truths[j];
            let prod = ds * dt;
            if prod > 0.0 {
                concordant += 1;
            } else if prod < 0.0 {
                discordant += 1;
            }
        }
    }
    let total = (n * (n - 1) / 2) as f64;
    Ok((concordant - discordant) as f64 / total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_order_is_one() {
        let t = kendall_tau(&[0.1, 0.5, 0.9], &[10.0, 20.0, 30.0]).unwrap();
        assert_eq!(t, 1.0);
    }

    #[test]
    fn reversed_order_is_minus_one() {
        let t = kendall_tau(&[0.9, 0.5, 0.1], &[10.0, 20.0, 30.0]).unwrap();
        assert_eq!(t, -1.0);
    }

    #[test]
    fn one_swap_among_four() {
        // brute-force pair enumeration: 5 concordant, 1 discordant of 6
        let t = kendall_tau(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((t - 4.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn ties_count_as_neither() {
        let t = kendall_tau(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap();
        // pairs: (0,1) tied in scores, (0,2) and (1,2) concordant
        assert!((t - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn short_input_is_rejected() {
        assert!(matches!(kendall_tau(&[1.0], &[1.0]), Err(Error::Domain(_))));
        assert!(matches!(
            kendall_tau(&[1.0, 2.0], &[1.0]),
            Err(Error::Shape(_))
        ));
    }
}
