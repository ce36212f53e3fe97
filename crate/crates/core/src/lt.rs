//! Quantize-then-correlate scheme: sources are vector quantized and the
//! Gaussian codewords, which keep part of the source correlation, are sent
//! uncoded so that the channel inputs combine coherently.

use crate::error::{check_nonneg, check_pos, check_rho, Error, Result};
use crate::gauss::JointGaussian;
use crate::model::{SchemeResult, SourceModel};
use crate::optim::{max_feasible, minimize_on_rate_boundary};
use crate::sb::{DistortionObjective, Equicorrelated};

/// Correlation between the two quantizer codewords.
pub fn lt_rho_tilde(r1: f64, r2: f64, rho: f64) -> Result<f64> {
    check_nonneg("R1", r1)?;
    check_nonneg("R2", r2)?;
    check_rho(rho)?;
    Ok(rho_tilde(r1, r2, rho))
}

fn rho_tilde(r1: f64, r2: f64, rho: f64) -> f64 {
    rho * ((1.0 - (-2.0 * r1).exp2()) * (1.0 - (-2.0 * r2).exp2())).sqrt()
}

/// Largest quantizer rates the channel supports for a given codeword correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtRateBounds {
    pub r1_max: f64,
    pub r2_max: f64,
    pub sum_max: f64,
}

impl LtRateBounds {
    /// Smallest slack among the three constraints.
    pub fn slack(&self, r1: f64, r2: f64) -> f64 {
        (self.r1_max - r1)
            .min(self.r2_max - r2)
            .min(self.sum_max - r1 - r2)
    }
}

/// Rate bounds at powers `a`, `b` and codeword correlation `rho_t`.
pub fn lt_rate_bounds(a: f64, b: f64, rho_t: f64, noise_var: f64) -> Result<LtRateBounds> {
    check_nonneg("a", a)?;
    check_nonneg("b", b)?;
    check_pos("noise variance", noise_var)?;
    if !(0.0..1.0).contains(&rho_t) {
        return Err(Error::invalid(format!("codeword correlation must lie in [0, 1), got {rho_t}")));
    }
    Ok(rate_bounds(a, b, rho_t, noise_var))
}

fn rate_bounds(a: f64, b: f64, rho_t: f64, noise_var: f64) -> LtRateBounds {
    let k = 1.0 - rho_t * rho_t;
    LtRateBounds {
        r1_max: 0.5 * (a / noise_var + 1.0 / k).log2(),
        r2_max: 0.5 * (b / noise_var + 1.0 / k).log2(),
        sum_max: 0.5 * ((noise_var + a + b + 2.0 * rho_t * (a * b).sqrt()) / (k * noise_var)).log2(),
    }
}

/// MMSE distortions of both sources given both codewords.
pub fn lt_distortions(r1: f64, r2: f64, rho: f64, var1: f64, var2: f64) -> Result<(f64, f64)> {
    check_nonneg("R1", r1)?;
    check_nonneg("R2", r2)?;
    check_rho(rho)?;
    check_pos("var1", var1)?;
    check_pos("var2", var2)?;
    Ok(distortions(r1, r2, rho, var1, var2))
}

fn distortions(r1: f64, r2: f64, rho: f64, var1: f64, var2: f64) -> (f64, f64) {
    let (x1, x2) = ((-2.0 * r1).exp2(), (-2.0 * r2).exp2());
    let rr = rho * rho;
    let k = 1.0 - rr * (1.0 - x1) * (1.0 - x2);
    (
        var1 * x1 * (1.0 - rr * (1.0 - x2)) / k,
        var2 * x2 * (1.0 - rr * (1.0 - x1)) / k,
    )
}

/// Joint law of `(U1, U2, W1, W2)` where `W_i` is the reconstruction of
/// `U_i` at rate `R_i`.
pub fn lt_joint(r1: f64, r2: f64, rho: f64, var1: f64, var2: f64) -> Result<JointGaussian> {
    check_nonneg("R1", r1)?;
    check_nonneg("R2", r2)?;
    check_rho(rho)?;
    check_pos("var1", var1)?;
    check_pos("var2", var2)?;
    let (g1, g2) = (1.0 - (-2.0 * r1).exp2(), 1.0 - (-2.0 * r2).exp2());
    let c = rho * (var1 * var2).sqrt();
    #[rustfmt::skip]
    let cov = [
        var1,      c,         var1 * g1,   c * g2,
        c,         var2,      c * g1,      var2 * g2,
        var1 * g1, c * g1,    var1 * g1,   c * g1 * g2,
        c * g2,    var2 * g2, c * g1 * g2, var2 * g2,
    ];
    JointGaussian::new(
        ["U1", "U2", "W1", "W2"],
        nalgebra::DMatrix::from_row_slice(4, 4, &cov),
    )
}

/// Which constraint fixes the symmetric rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtBinding {
    SumRate,
    Individual,
}

/// Symmetric optimum at unit variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtSolution {
    pub d: f64,
    pub rate: f64,
    pub rho_tilde: f64,
    /// `|ρ(1−2^{−2R}) − ρ̃|` at the returned point.
    pub residual: f64,
    pub individual_slack: f64,
    pub sum_slack: f64,
    pub binding: LtBinding,
    pub iterations: usize,
}

const FP_TOL: f64 = 1e-10;
const FP_BUDGET: usize = 200;

/// Minimum common distortion for the symmetric GMAC with `P/σ_N² = snr`.
///
/// The rate is the largest one meeting the sum constraint with equality at
/// its own codeword correlation.
pub fn lt_optimize_symmetric(snr: f64, rho: f64) -> Result<LtSolution> {
    check_nonneg("SNR", snr)?;
    check_rho(rho)?;
    let sum_rate = |rt: f64| 0.25 * ((1.0 + 2.0 * snr * (1.0 + rt)) / (1.0 - rt * rt)).log2();
    let ind_rate = |rt: f64| 0.5 * (snr + 1.0 / (1.0 - rt * rt)).log2();
    let rate = |rt: f64| sum_rate(rt).min(ind_rate(rt));
    let map = |rt: f64| rho * (1.0 - (-2.0 * rate(rt)).exp2());

    let mut rt = map(0.0);
    let mut iterations = 0;
    let mut residual = (map(rt) - rt).abs();
    while residual > FP_TOL && iterations < FP_BUDGET {
        rt = 0.5 * rt + 0.5 * map(rt);
        residual = (map(rt) - rt).abs();
        iterations += 1;
    }
    if residual > FP_TOL {
        // map(0) ≥ 0 and map(ρ) < ρ: bisect the sign change
        let (mut lo, mut hi) = (0.0, rho);
        while hi - lo > 1e-15 && iterations < 2 * FP_BUDGET {
            let mid = 0.5 * (lo + hi);
            if map(mid) - mid >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
        }
        rt = lo;
        residual = (map(rt) - rt).abs();
        if residual > FP_TOL {
            return Err(Error::NoConvergence {
                what: "symmetric codeword correlation",
                residual,
            });
        }
    }
    let r = rate(rt);
    let (d, _) = distortions(r, r, rho, 1.0, 1.0);
    let achieved = rho_tilde(r, r, rho);
    let b = rate_bounds(snr, snr, achieved, 1.0);
    Ok(LtSolution {
        d,
        rate: r,
        rho_tilde: achieved,
        residual,
        individual_slack: b.r1_max - r,
        sum_slack: b.sum_max - 2.0 * r,
        binding: if sum_rate(rt) <= ind_rate(rt) {
            LtBinding::SumRate
        } else {
            LtBinding::Individual
        },
        iterations,
    })
}

/// High-SNR approximation `σ²√((1−ρ)/2S)`.
pub fn lt_high_snr_approx(snr: f64, rho: f64, var: f64) -> f64 {
    var * ((1.0 - rho) / (2.0 * snr)).sqrt()
}

/// Low-SNR approximation in terms of the codeword correlation `rho_t`,
/// with `S̄ = S(1 + ρ̃)`.
pub fn lt_low_snr_approx(snr: f64, rho: f64, rho_t: f64, var: f64) -> f64 {
    let e = (-snr * (1.0 + rho_t)).exp();
    let k = 1.0 - rho_t * rho_t;
    var * e * (1.0 - rho * rho * (1.0 - (1.0 - rho_t * rho_t * e).sqrt())) / k.sqrt()
}

/// Smallest slack among the rate constraints at powers `a`, `b`.
pub fn lt_slack(r1: f64, r2: f64, rho: f64, a: f64, b: f64, noise_var: f64) -> f64 {
    rate_bounds(a, b, rho_tilde(r1, r2, rho), noise_var).slack(r1, r2)
}

/// Asymmetric operating point over the GMAC at full powers.
pub fn lt_gmac(
    source: &SourceModel,
    p1: f64,
    p2: f64,
    noise_var: f64,
    objective: DistortionObjective,
) -> Result<SchemeResult> {
    source.validate()?;
    check_nonneg("P1", p1)?;
    check_nonneg("P2", p2)?;
    check_pos("noise variance", noise_var)?;
    let rho = source.rho;
    let t_max = 0.5
        * ((noise_var + (p1.sqrt() + p2.sqrt()).powi(2)) / (noise_var * (1.0 - rho * rho))).log2()
        + 1.0;
    let best = minimize_on_rate_boundary(
        |r1, r2| {
            let (d1, d2) = distortions(r1, r2, rho, source.var1, source.var2);
            Ok(objective.eval(d1, d2))
        },
        |r1, r2| Ok(lt_slack(r1, r2, rho, p1, p2, noise_var)),
        t_max,
        1e-9,
    )?;
    let (d1, d2) = distortions(best.r1, best.r2, rho, source.var1, source.var2);
    Ok(SchemeResult {
        d1,
        d2,
        r1: best.r1,
        r2: best.r2,
        p1,
        p2,
        feasible: lt_slack(best.r1, best.r2, rho, p1, p2, noise_var) >= -1e-9,
    })
}

/// Per-user distortion with `N` equicorrelated unit-variance users.
///
/// Every user quantizes at the same rate and the codewords, with pairwise
/// correlation `ρ̃`, are sent uncoded. Only the total rate constraint
/// `I(U; W) ≤ ½·log2(1 + N·S·(1 + (N−1)ρ̃))` is imposed, which is the
/// binding one in the two-user symmetric case.
pub fn lt_multiuser(n_users: usize, snr: f64, rho: f64) -> Result<f64> {
    if n_users == 0 {
        return Err(Error::invalid("need at least one user"));
    }
    check_nonneg("SNR", snr)?;
    check_rho(rho)?;
    let n = n_users as f64;
    let eq = Equicorrelated::new(n_users, rho);
    let slack = |t: f64| {
        let p = t.exp2() - 1.0;
        let rt = eq.output_correlation(p, rho);
        Ok(0.5 * (1.0 + n * snr * (1.0 + (n - 1.0) * rt)).log2() - eq.sum_rate(p))
    };
    let t = max_feasible(slack, 200.0, 400, 1e-13)?;
    Ok(eq.distortion(t.exp2() - 1.0))
}
