//! Necessary-condition lower bound on symmetric GMAC distortion.

use crate::error::{check_nonneg, check_pos, check_rho, Result};

/// SNR at which the bound switches branch, `ρ/(1−ρ²)`.
pub fn nc_threshold(rho: f64) -> f64 {
    rho / (1.0 - rho * rho)
}

/// Low-SNR branch, identical to symmetric AF.
pub fn nc_low_branch(snr: f64, rho: f64, var: f64) -> f64 {
    var * (snr * (1.0 - rho * rho) + 1.0) / (2.0 * snr * (1.0 + rho) + 1.0)
}

/// High-SNR branch.
pub fn nc_high_branch(snr: f64, rho: f64, var: f64) -> f64 {
    var * ((1.0 - rho * rho) / (2.0 * snr * (1.0 + rho) + 1.0)).sqrt()
}

/// Smallest achievable common distortion `D1 = D2 = D` for the symmetric GMAC.
pub fn nc_distortion(snr: f64, rho: f64, var: f64) -> Result<f64> {
    check_nonneg("SNR", snr)?;
    check_rho(rho)?;
    check_pos("variance", var)?;
    Ok(if snr <= nc_threshold(rho) {
        nc_low_branch(snr, rho, var)
    } else {
        nc_high_branch(snr, rho, var)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::af::af_symmetric;

    #[test]
    fn continuous_at_threshold() {
        for k in 1..=9 {
            let rho = k as f64 / 10.0;
            let s = nc_threshold(rho);
            let lo = nc_low_branch(s, rho, 1.0);
            let hi = nc_high_branch(s, rho, 1.0);
            assert!((lo - hi).abs() < 1e-12, "{rho}");
            assert!((lo - (1.0 - rho)).abs() < 1e-12);
        }
    }

    #[test]
    fn high_snr_limit() {
        let s = 1e6;
        let d = nc_distortion(s, 0.75, 1.0).unwrap();
        let want = ((1.0 - 0.75) / (2.0 * s)).sqrt();
        assert!((d / want - 1.0).abs() < 0.01);
    }

    #[test]
    fn low_branch_is_af() {
        for rho in [0.2, 0.5, 0.9] {
            let t = nc_threshold(rho);
            for k in 0..=20 {
                let s = t * k as f64 / 20.0;
                assert_eq!(
                    nc_distortion(s, rho, 2.0).unwrap(),
                    af_symmetric(s, rho, 2.0).unwrap()
                );
            }
        }
    }

    #[test]
    fn zero_correlation_uses_high_branch() {
        assert_eq!(nc_threshold(0.0), 0.0);
        let d = nc_distortion(3.0, 0.0, 1.0).unwrap();
        assert!((d - (1.0 / 7.0_f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn nonincreasing_in_snr() {
        for rho in [0.0, 0.1, 0.5, 0.75, 0.95] {
            let mut prev = f64::INFINITY;
            for k in -40..=60 {
                let d = nc_distortion(10f64.powf(k as f64 / 10.0), rho, 1.0).unwrap();
                assert!(d <= prev);
                prev = d;
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(nc_distortion(-1.0, 0.5, 1.0).is_err());
        assert!(nc_distortion(1.0, 1.0, 1.0).is_err());
    }
}
