//! Orthogonal channels `Y_i = X_i + N_i`, where separation is optimal.

use crate::error::{check_nonneg, check_pos, check_rho, Result};
use crate::gauss::{JointGaussian, LinearModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthParams {
    pub p1: f64,
    pub p2: f64,
    pub var1: f64,
    pub var2: f64,
    pub rho: f64,
    pub noise_var1: f64,
    pub noise_var2: f64,
}

impl OrthParams {
    /// Unit variances and unit noise with `P_i = snr`.
    pub fn symmetric(snr: f64, rho: f64) -> Self {
        OrthParams {
            p1: snr,
            p2: snr,
            var1: 1.0,
            var2: 1.0,
            rho,
            noise_var1: 1.0,
            noise_var2: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_nonneg("P1", self.p1)?;
        check_nonneg("P2", self.p2)?;
        check_pos("var1", self.var1)?;
        check_pos("var2", self.var2)?;
        check_rho(self.rho)?;
        check_pos("noise variance 1", self.noise_var1)?;
        check_pos("noise variance 2", self.noise_var2)
    }

    /// Linear model over factors `U1, U2, N1, N2` with outputs `Y1`, `Y2`.
    pub fn linear_model(&self) -> Result<LinearModel> {
        self.validate()?;
        let mut cov = nalgebra::DMatrix::zeros(4, 4);
        cov.view_mut((0, 0), (2, 2))
            .copy_from(&crate::gauss::bivariate_cov(self.var1, self.var2, self.rho));
        cov[(2, 2)] = self.noise_var1;
        cov[(3, 3)] = self.noise_var2;
        let mut m = LinearModel::new(["U1", "U2", "N1", "N2"], cov)?;
        m.define("Y1", &[("U1", (self.p1 / self.var1).sqrt()), ("N1", 1.0)])?;
        m.define("Y2", &[("U2", (self.p2 / self.var2).sqrt()), ("N2", 1.0)])?;
        Ok(m)
    }

    pub fn joint(&self) -> Result<JointGaussian> {
        self.linear_model()?.joint(&["U1", "U2", "Y1", "Y2"])
    }
}

/// Uncoded transmission with MMSE estimation from both outputs.
pub fn orth_af_distortions(p: &OrthParams) -> Result<(f64, f64)> {
    p.validate()?;
    let k = 1.0 - p.rho * p.rho;
    let (n1, n2) = (p.noise_var1, p.noise_var2);
    let den = p.p1 * p.p2 * k + n2 * p.p1 + n1 * p.p2 + n1 * n2;
    Ok((
        p.var1 * n1 * (p.p2 * k + n2) / den,
        p.var2 * n2 * (p.p1 * k + n1) / den,
    ))
}

/// Symmetric separation-based distortion (unit variance), which is optimal here.
pub fn orth_sb_distortion(snr: f64, rho: f64) -> Result<f64> {
    check_nonneg("SNR", snr)?;
    check_rho(rho)?;
    let a = 1.0 + snr;
    Ok(((1.0 - rho * rho) / (a * a) + rho * rho / (a * a * a * a)).sqrt())
}

/// Symmetric uncoded distortion (unit variance).
pub fn orth_af_symmetric(snr: f64, rho: f64) -> Result<f64> {
    check_nonneg("SNR", snr)?;
    check_rho(rho)?;
    let k = 1.0 - rho * rho;
    Ok((snr * k + 1.0) / (1.0 + 2.0 * snr + snr * snr * k))
}

/// Bounds on the gap between uncoded and separation-based distortion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthGapBounds {
    /// Common lower bound `S(1−ρ²)/(1+S)²`.
    pub lower: f64,
    /// Upper bound on the uncoded distortion, `(1+S)/[1+S(1−ρ²)]²`.
    pub upper: f64,
    /// High-SNR gap bound `(ρ²/S)[1/(1−ρ²)² + 1/(1−ρ²) + 1]`; infinite at `S = 0`.
    pub high_snr: f64,
    /// Low-SNR gap bound `S(2+S)(1+S(1−ρ²))/(1+S)²`.
    pub low_snr: f64,
    /// Looser low-SNR form `S + S/(1+S)`.
    pub low_snr_simple: f64,
    /// Correlation chain, tightest to loosest; the last entry is `ρ²`.
    pub rho_chain: [f64; 4],
}

impl OrthGapBounds {
    /// Tightest of the gap bounds.
    pub fn best(&self) -> f64 {
        self.rho_chain
            .iter()
            .fold(self.high_snr.min(self.low_snr), |m, &x| m.min(x))
    }
}

pub fn orth_gap_bounds(snr: f64, rho: f64) -> Result<OrthGapBounds> {
    check_nonneg("SNR", snr)?;
    check_rho(rho)?;
    let s = snr;
    let rr = rho * rho;
    let k = 1.0 - rr;
    let a = 1.0 + s;
    let q = 1.0 + s * k;
    let den = 1.0 + 2.0 * s + s * s * k;
    Ok(OrthGapBounds {
        lower: s * k / (a * a),
        upper: a / (q * q),
        high_snr: if s == 0.0 {
            f64::INFINITY
        } else {
            rr / s * (1.0 / (k * k) + 1.0 / k + 1.0)
        },
        low_snr: s * (2.0 + s) * q / (a * a),
        low_snr_simple: s + s / a,
        rho_chain: [
            s * s * rr * q / (a * a * den),
            rr * q / den,
            rr / q,
            rr,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sb::sb_symmetric_distortion_from_rate;

    fn grid() -> Vec<(f64, f64)> {
        let mut g = Vec::new();
        for k in -30..=60 {
            for r in 0..=19 {
                g.push((10f64.powf(k as f64 / 10.0), r as f64 * 0.05));
            }
        }
        g
    }

    #[test]
    fn uncoded_matches_conditioning() {
        let p = OrthParams {
            p1: 3.0,
            p2: 0.7,
            var1: 2.0,
            var2: 0.5,
            rho: 0.6,
            noise_var1: 1.5,
            noise_var2: 0.25,
        };
        let (d1, d2) = orth_af_distortions(&p).unwrap();
        let j = p.joint().unwrap();
        let law = j.condition(&["Y1", "Y2"]).unwrap();
        assert!((law.variance("U1").unwrap() - d1).abs() < 1e-12);
        assert!((law.variance("U2").unwrap() - d2).abs() < 1e-12);
    }

    #[test]
    fn uncoded_limits() {
        let mut p = OrthParams::symmetric(0.0, 0.4);
        p.var1 = 3.0;
        assert_eq!(orth_af_distortions(&p).unwrap(), (3.0, 1.0));
        let (d1, d2) = orth_af_distortions(&OrthParams::symmetric(2.0, 0.0)).unwrap();
        assert!((d1 - 1.0 / 3.0).abs() < 1e-15 && (d2 - 1.0 / 3.0).abs() < 1e-15);
        let (d1, _) = orth_af_distortions(&OrthParams::symmetric(1e9, 0.9)).unwrap();
        assert!(d1 < 1e-8);
    }

    #[test]
    fn symmetric_forms_agree() {
        for (s, rho) in grid() {
            let af = orth_af_symmetric(s, rho).unwrap();
            let (d1, d2) = orth_af_distortions(&OrthParams::symmetric(s, rho)).unwrap();
            assert!((af - d1).abs() < 1e-12 && (af - d2).abs() < 1e-12);
            let sb = orth_sb_distortion(s, rho).unwrap();
            let via_rate = sb_symmetric_distortion_from_rate(0.5 * (1.0 + s).log2(), rho).unwrap();
            assert!((sb - via_rate).abs() < 1e-12);
        }
    }

    #[test]
    fn limits() {
        for s in [0.5, 3.0, 100.0] {
            assert!((orth_sb_distortion(s, 0.0).unwrap() - 1.0 / (1.0 + s)).abs() < 1e-15);
            assert!((orth_af_symmetric(s, 0.0).unwrap() - 1.0 / (1.0 + s)).abs() < 1e-15);
        }
        assert_eq!(orth_sb_distortion(0.0, 0.7).unwrap(), 1.0);
        assert_eq!(orth_af_symmetric(0.0, 0.7).unwrap(), 1.0);
        let s = 1e6;
        for rho in [0.3, 0.75] {
            let sb = orth_sb_distortion(s, rho).unwrap() * s;
            assert!((sb / (1.0 - rho * rho).sqrt() - 1.0).abs() < 0.02);
            assert!((orth_af_symmetric(s, rho).unwrap() * s - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn gap_chain_at_reference_point() {
        let (s, rho) = (10.0, 0.7);
        let b = orth_gap_bounds(s, rho).unwrap();
        let sb = orth_sb_distortion(s, rho).unwrap();
        let af = orth_af_symmetric(s, rho).unwrap();
        assert!(b.lower <= sb && sb <= af && af <= b.upper);
    }

    #[test]
    fn gap_bounds_hold_on_grid() {
        for (s, rho) in grid() {
            let b = orth_gap_bounds(s, rho).unwrap();
            let sb = orth_sb_distortion(s, rho).unwrap();
            let af = orth_af_symmetric(s, rho).unwrap();
            let gap = af - sb;
            assert!(gap >= -1e-15, "{s} {rho}");
            if rho == 0.0 {
                assert!(gap.abs() < 1e-15);
                assert_eq!(b.rho_chain[3], 0.0);
            }
            assert!(b.lower <= sb + 1e-15 && af <= b.upper + 1e-15);
            assert!(gap <= b.high_snr + 1e-15);
            assert!(gap <= b.low_snr + 1e-15);
            assert!(b.low_snr <= b.low_snr_simple * (1.0 + 1e-14));
            for (i, &c) in b.rho_chain.iter().enumerate() {
                assert!(gap <= c + 1e-15, "{s} {rho} term {i}");
            }
            for w in b.rho_chain.windows(2) {
                assert!(w[0] <= w[1] + 1e-15);
            }
        }
    }

    #[test]
    fn gap_vanishes_at_extremes() {
        for rho in [0.3, 0.9] {
            let lo = orth_af_symmetric(1e-4, rho).unwrap() - orth_sb_distortion(1e-4, rho).unwrap();
            let hi = orth_af_symmetric(1e6, rho).unwrap() - orth_sb_distortion(1e6, rho).unwrap();
            assert!(lo < 1e-3 && hi < 1e-5);
        }
    }
}
