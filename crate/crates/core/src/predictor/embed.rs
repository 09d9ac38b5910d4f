//! Sinusoidal timestep encoding.

use crate::{Error, Result};

/// Standard transformer sinusoidal encoding: the first half of the lanes
/// are sines, the second half cosines, over frequencies geometrically
/// spaced with base 10000. Deterministic in `t`.
pub fn sinusoidal_embedding(t: f64, dim: usize) -> Result<Vec<f64>> {
    if dim == 0 || dim % 2 != 0 {
        return Err(Error::Config(format!(
            "sinusoidal embedding dim must be positive and even, got {dim}"
        )));
    }
    if t < 0.0 {
        return Err(Error::Domain(format!("timestep must be >= 0, got {t}")));
    }
    let half = dim / 2;
    let mut out = vec![0.0; dim];
    for i in 0..half {
        let exponent = if half > 1 {
            i as f64 / (half - 1) as f64
        } else {
            0.0
        };
        let freq = 10000f64.powf(-exponent);
        let angle = t * freq;
        out[i] = angle.sin();
        out[half + i] = angle.cos();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_gives_zero_sines_unit_cosines() {
        let e = sinusoidal_embedding(0.0, 8).unwrap();
        assert_eq!(&e[..4], &[0.0; 4]);
        assert_eq!(&e[4..], &[1.0; 4]);
    }

    #[test]
    fn lanes_are_bounded() {
        for &t in &[0.0, 0.37, 12.5, 999.0, 1e6] {
            let e = sinusoidal_embedding(t, 64).unwrap();
            assert!(e.iter().all(|v| (-1.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn distinct_timesteps_give_distinct_vectors() {
        let a = sinusoidal_embedding(0.123, 64).unwrap();
        let b = sinusoidal_embedding(0.456, 64).unwrap();
        let dist: f64 = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        assert!(dist > 0.0);
    }

    #[test]
    fn odd_dim_is_a_config_error() {
        assert!(matches!(
            sinusoidal_embedding(1.0, 7),
            Err(Error::Config(_))
        ));
    }
}
