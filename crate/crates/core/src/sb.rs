//! Separation-based transmission: distributed vector quantization with
//! Slepian–Wolf binning, followed by independent capacity-achieving channel codes.
//!
//! Symmetric results use unit source variance; scale distortions by `σ²`.

use crate::error::{check_nonneg, check_pos, check_rho, Error, Result};
use crate::model::{SchemeResult, SourceModel};
use crate::optim::{max_feasible, minimize_on_rate_boundary};

/// Quantizer rates in bits per source sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
}

impl RatePair {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        check_nonneg("R1", r1)?;
        check_nonneg("R2", r2)?;
        Ok(RatePair { r1, r2 })
    }
}

const REGION_SLACK: f64 = 1e-12;

/// `β(D1, D2)` of the two-terminal quadratic Gaussian sum-rate bound.
pub fn sb_beta(d1: f64, d2: f64, var1: f64, var2: f64, rho: f64) -> f64 {
    let k = 1.0 - rho * rho;
    1.0 + (1.0 + 4.0 * rho * rho * d1 * d2 / (var1 * var2 * k * k)).sqrt()
}

/// Whether `(R1, R2)` achieves `(D1, D2)` for the two-terminal source.
pub fn sb_region_contains(
    r: RatePair,
    d1: f64,
    d2: f64,
    var1: f64,
    var2: f64,
    rho: f64,
) -> Result<bool> {
    check_nonneg("R1", r.r1)?;
    check_nonneg("R2", r.r2)?;
    check_pos("var1", var1)?;
    check_pos("var2", var2)?;
    check_rho(rho)?;
    if !(d1 > 0.0 && d1 <= var1 && d2 > 0.0 && d2 <= var2) {
        return Err(Error::invalid("distortions must lie in (0, σ_i²]"));
    }
    let k = 1.0 - rho * rho;
    let rr = rho * rho;
    let b1 = 0.5 * (var1 * (k + rr * (-2.0 * r.r2).exp2()) / d1).log2();
    let b2 = 0.5 * (var2 * (k + rr * (-2.0 * r.r1).exp2()) / d2).log2();
    let bs = 0.5 * (var1 * var2 * k * sb_beta(d1, d2, var1, var2, rho) / (2.0 * d1 * d2)).log2();
    Ok(r.r1 >= b1 - REGION_SLACK && r.r2 >= b2 - REGION_SLACK && r.r1 + r.r2 >= bs - REGION_SLACK)
}

/// Per-user distortion when both unit-variance sources are coded at rate `R`.
pub fn sb_symmetric_distortion_from_rate(rate: f64, rho: f64) -> Result<f64> {
    check_nonneg("R", rate)?;
    check_rho(rho)?;
    let x = (-4.0 * rate).exp2();
    Ok((x * (1.0 - rho * rho) + rho * rho * x * x).sqrt())
}

/// Per-user rate supported by the symmetric GMAC with independent inputs:
/// half the sum capacity `½·log2(1 + 2S)`.
pub fn sb_gmac_rate(snr: f64) -> f64 {
    0.25 * (1.0 + 2.0 * snr).log2()
}

/// Symmetric per-user SB distortion over the GMAC (unit variance).
pub fn sb_gmac_distortion(snr: f64, rho: f64) -> Result<f64> {
    check_nonneg("SNR", snr)?;
    sb_symmetric_distortion_from_rate(sb_gmac_rate(snr), rho)
}

/// `√(σ⁴(1−ρ²)/S' + σ⁴ρ²/S'²)`, the high-SNR form written in terms of the
/// effective SNR `S' = 2^{4R}`.
pub fn sb_snr_bound(s_eff: f64, rho: f64, var: f64) -> f64 {
    let v2 = var * var;
    (v2 * (1.0 - rho * rho) / s_eff + v2 * rho * rho / (s_eff * s_eff)).sqrt()
}

/// Low-SNR lower bound `ρ²σ⁴2^{−4S} + σ²(1−ρ²)2^{−2S}`.
pub fn sb_low_snr_bound(snr: f64, rho: f64, var: f64) -> f64 {
    rho * rho * var * var * (-4.0 * snr).exp2() + var * (1.0 - rho * rho) * (-2.0 * snr).exp2()
}

/// Right-hand sides of the channel rate constraints
/// `R1 ≤ c1`, `R2 ≤ c2`, `R1 + R2 ≤ sum` (conditional rates for Berger–Tung).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRates {
    pub c1: f64,
    pub c2: f64,
    pub sum: f64,
}

impl ChannelRates {
    /// GMAC capacity region with independent Gaussian inputs.
    pub fn gmac_independent(p1: f64, p2: f64, noise_var: f64) -> Self {
        ChannelRates {
            c1: 0.5 * (1.0 + p1 / noise_var).log2(),
            c2: 0.5 * (1.0 + p2 / noise_var).log2(),
            sum: 0.5 * (1.0 + (p1 + p2) / noise_var).log2(),
        }
    }

    /// Two orthogonal point-to-point channels.
    pub fn orthogonal(p1: f64, p2: f64, noise_var1: f64, noise_var2: f64) -> Self {
        let c1 = 0.5 * (1.0 + p1 / noise_var1).log2();
        let c2 = 0.5 * (1.0 + p2 / noise_var2).log2();
        ChannelRates { c1, c2, sum: c1 + c2 }
    }
}

/// How two per-user distortions are combined into a scalar objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistortionObjective {
    Sum,
    Weighted(f64, f64),
    Max,
}

impl DistortionObjective {
    pub fn eval(self, d1: f64, d2: f64) -> f64 {
        match self {
            DistortionObjective::Sum => d1 + d2,
            DistortionObjective::Weighted(b1, b2) => b1 * d1 + b2 * d2,
            DistortionObjective::Max => d1.max(d2),
        }
    }
}

/// Berger–Tung Gaussian test channels `W_i = U_i/σ_i + Q_i` on a
/// correlated pair, parametrized by the per-link rates `r_i = I(U_i; W_i)`.
///
/// Everything is closed form in the observation precisions `p_i = 2^{2r_i} − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BergerTung {
    pub rho: f64,
}

impl BergerTung {
    fn precisions(r1: f64, r2: f64) -> (f64, f64) {
        ((2.0 * r1).exp2() - 1.0, (2.0 * r2).exp2() - 1.0)
    }

    /// `I(U1, U2; W1, W2)`.
    pub fn sum_rate(&self, r1: f64, r2: f64) -> f64 {
        let (p1, p2) = Self::precisions(r1, r2);
        0.5 * ((1.0 + p1) * (1.0 + p2) - self.rho * self.rho * p1 * p2).log2()
    }

    /// `(I(U1; W1 | W2), I(U2; W2 | W1))`.
    pub fn conditional_rates(&self, r1: f64, r2: f64) -> (f64, f64) {
        let s = self.sum_rate(r1, r2);
        (s - r2, s - r1)
    }

    /// Normalized MMSE `(var(U1|W)/σ1², var(U2|W)/σ2²)`.
    pub fn distortions(&self, r1: f64, r2: f64) -> (f64, f64) {
        let (p1, p2) = Self::precisions(r1, r2);
        let k = 1.0 - self.rho * self.rho;
        let m11 = 1.0 + p1 * k;
        let m22 = 1.0 + p2 * k;
        let det = m11 * m22 - self.rho * self.rho;
        (k * m22 / det, k * m11 / det)
    }

    /// Smallest slack among the three constraints.
    pub fn slack(&self, r1: f64, r2: f64, caps: &ChannelRates) -> f64 {
        let (i1, i2) = self.conditional_rates(r1, r2);
        (caps.c1 - i1).min(caps.c2 - i2).min(caps.sum - self.sum_rate(r1, r2))
    }
}

/// Best SB operating point for a source pair over a channel whose
/// independent-input capacity region is `caps`.
pub fn sb_optimize(
    source: &SourceModel,
    caps: ChannelRates,
    objective: DistortionObjective,
) -> Result<SchemeResult> {
    source.validate()?;
    let bt = BergerTung { rho: source.rho };
    let t_max = 2.0 * caps.sum.max(caps.c1 + caps.c2) + 1.0;
    let scaled = |r1: f64, r2: f64| {
        let (d1, d2) = bt.distortions(r1, r2);
        (source.var1 * d1, source.var2 * d2)
    };
    let best = minimize_on_rate_boundary(
        |r1, r2| {
            let (d1, d2) = scaled(r1, r2);
            Ok(objective.eval(d1, d2))
        },
        |r1, r2| Ok(bt.slack(r1, r2, &caps)),
        t_max,
        1e-9,
    )?;
    let (d1, d2) = scaled(best.r1, best.r2);
    Ok(SchemeResult {
        d1,
        d2,
        r1: best.r1,
        r2: best.r2,
        p1: f64::NAN,
        p2: f64::NAN,
        feasible: bt.slack(best.r1, best.r2, &caps) >= -1e-9,
    })
}

/// Asymmetric SB over the GMAC; minimizes `max(D1, D2)` unless told otherwise.
pub fn sb_gmac(
    source: &SourceModel,
    p1: f64,
    p2: f64,
    noise_var: f64,
    objective: DistortionObjective,
) -> Result<SchemeResult> {
    check_nonneg("P1", p1)?;
    check_nonneg("P2", p2)?;
    check_pos("noise variance", noise_var)?;
    let mut r = sb_optimize(source, ChannelRates::gmac_independent(p1, p2, noise_var), objective)?;
    r.p1 = p1;
    r.p2 = p2;
    Ok(r)
}

/// Per-user SB distortion with `N` equicorrelated unit-variance users.
///
/// Symmetric Berger–Tung quantizers at the per-user rate `log2(1 + N·S)/(2N)`
/// (independent-input sum capacity split evenly). For `N > 2` this is an
/// achievable approximation, not a characterization.
pub fn sb_multiuser(n_users: usize, snr: f64, rho: f64) -> Result<f64> {
    if n_users == 0 {
        return Err(Error::invalid("need at least one user"));
    }
    check_nonneg("SNR", snr)?;
    check_rho(rho)?;
    let n = n_users as f64;
    let budget = 0.5 * (1.0 + n * snr).log2();
    let eq = Equicorrelated::new(n_users, rho);
    let prec = eq.precision_for_sum_rate(budget)?;
    Ok(eq.distortion(prec))
}

/// Spectrum of an `N × N` equicorrelated unit-variance covariance.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Equicorrelated {
    n: f64,
    lam_top: f64,
    lam_rest: f64,
}

impl Equicorrelated {
    pub(crate) fn new(n_users: usize, rho: f64) -> Self {
        let n = n_users as f64;
        Equicorrelated {
            n,
            lam_top: 1.0 + (n - 1.0) * rho,
            lam_rest: 1.0 - rho,
        }
    }

    /// `I(U; W)` when every user observes `U_i + Q_i` with precision `p`.
    pub(crate) fn sum_rate(&self, p: f64) -> f64 {
        0.5 * ((1.0 + self.lam_top * p).log2() + (self.n - 1.0) * (1.0 + self.lam_rest * p).log2())
    }

    /// Per-user MMSE at precision `p`.
    pub(crate) fn distortion(&self, p: f64) -> f64 {
        (self.lam_top / (1.0 + self.lam_top * p)
            + (self.n - 1.0) * self.lam_rest / (1.0 + self.lam_rest * p))
            / self.n
    }

    /// Correlation between two quantizer outputs.
    pub(crate) fn output_correlation(&self, p: f64, rho: f64) -> f64 {
        // var(W) = 1 + 1/p
        if p == 0.0 {
            0.0
        } else {
            rho * p / (1.0 + p)
        }
    }

    pub(crate) fn precision_for_sum_rate(&self, budget: f64) -> Result<f64> {
        if budget <= 0.0 {
            return Ok(0.0);
        }
        // bisect in log-precision; sum_rate is increasing in p
        let t = max_feasible(
            |t| Ok(budget - self.sum_rate(t.exp2() - 1.0)),
            200.0,
            200,
            1e-13,
        )?;
        Ok(t.exp2() - 1.0)
    }
}
