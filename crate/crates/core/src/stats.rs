//! Standard normal helpers with degenerate-variance limits.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard deviations below this are treated as exactly zero.
pub const SIGMA_FLOOR: f64 = 1e-12;

pub fn norm_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

pub fn norm_pdf(z: f64) -> f64 {
    libm::exp(-0.5 * z * z) / libm::sqrt(2.0 * PI)
}

/// `P(Y >= t)` for `Y ~ N(mu, sigma^2)`; the zero-variance limit is the
/// indicator `mu >= t`.
pub fn prob_at_least(mu: f64, sigma: f64, t: f64) -> f64 {
    if sigma < SIGMA_FLOOR {
        if mu >= t {
            1.0
        } else {
            0.0
        }
    } else {
        norm_cdf((mu - t) / sigma)
    }
}

/// `P(Y < t)`, the complement of [`prob_at_least`].
pub fn prob_below(mu: f64, sigma: f64, t: f64) -> f64 {
    if sigma < SIGMA_FLOOR {
        if mu < t {
            1.0
        } else {
            0.0
        }
    } else {
        norm_cdf((t - mu) / sigma)
    }
}

/// `E[(t - Y)^+]` for `Y ~ N(mu, sigma^2)`.
pub fn expected_shortfall_below(mu: f64, sigma: f64, t: f64) -> f64 {
    if sigma < SIGMA_FLOOR {
        return (t - mu).max(0.0);
    }
    let z = (t - mu) / sigma;
    ((t - mu) * norm_cdf(z) + sigma * norm_pdf(z)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn cdf_matches_reference() {
        let n = Normal::new(0.0, 1.0).unwrap();
        for i in -80..=80 {
            let z = i as f64 / 10.0;
            assert!((norm_cdf(z) - n.cdf(z)).abs() < 1e-15 + 1e-9 * n.cdf(z), "z = {z}");
        }
    }

    #[test]
    fn degenerate_limits() {
        assert_eq!(prob_at_least(1.0, 0.0, 1.0), 1.0);
        assert_eq!(prob_below(1.0, 0.0, 1.0), 0.0);
        assert_eq!(expected_shortfall_below(0.5, 0.0, 2.0), 1.5);
    }
}
