//! Power allocation under per-user average power limits.
//!
//! All quantities use unit source variances and unit channel noise.

use crate::error::{check_nonneg, check_pos, check_rho, Error, Result};
use crate::lt::{lt_distortions, lt_gmac};
use crate::model::{Scheme, SourceModel};
use crate::optim::{golden_section, scan_then_golden};
use crate::sb::{sb_gmac, DistortionObjective};

fn check_weights(beta1: f64, beta2: f64) -> Result<()> {
    check_pos("β1", beta1)?;
    check_pos("β2", beta2)
}

/// `β1·D1 + β2·D2` for uncoded transmission at powers `a`, `b`.
pub fn af_weighted_objective(a: f64, b: f64, rho: f64, beta1: f64, beta2: f64) -> Result<f64> {
    check_nonneg("a", a)?;
    check_nonneg("b", b)?;
    check_rho(rho)?;
    check_weights(beta1, beta2)?;
    Ok(af_objective(a, b, rho, beta1, beta2))
}

fn af_objective(a: f64, b: f64, rho: f64, beta1: f64, beta2: f64) -> f64 {
    let k = 1.0 - rho * rho;
    (beta1 * (b * k + 1.0) + beta2 * (a * k + 1.0)) / (a + b + 2.0 * rho * (a * b).sqrt() + 1.0)
}

fn af_gradient(a: f64, b: f64, rho: f64, beta1: f64, beta2: f64) -> [f64; 2] {
    let k = 1.0 - rho * rho;
    let num = beta1 * (b * k + 1.0) + beta2 * (a * k + 1.0);
    let den = a + b + 2.0 * rho * (a * b).sqrt() + 1.0;
    let cross = |x: f64, y: f64| {
        if rho == 0.0 {
            0.0
        } else if x == 0.0 {
            if y == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            rho * (y / x).sqrt()
        }
    };
    let da = (beta2 * k * den - num * (1.0 + cross(a, b))) / (den * den);
    let db = (beta1 * k * den - num * (1.0 + cross(b, a))) / (den * den);
    [da, db]
}

/// Power `c` of the second user minimizing `D1 + D2` when the first uses `a`.
pub fn af_critical_power(a: f64, rho: f64) -> Result<f64> {
    check_pos("a", a)?;
    check_rho(rho)?;
    if rho == 0.0 {
        return Err(Error::DegenerateCorrelation);
    }
    let k = 1.0 - rho * rho;
    let q = 1.0 + rho * rho;
    let root = (q * q + 4.0 * a * rho * rho * k * (a * k + 2.0)).sqrt();
    Ok(((q + root) / (2.0 * a.sqrt() * rho * k)).powi(2))
}

/// Which power limits bind at the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActiveConstraints {
    pub a_upper: bool,
    pub b_upper: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSolution {
    pub a_star: f64,
    pub b_star: f64,
    pub d_min: f64,
    pub active: ActiveConstraints,
    /// Largest projected-gradient component at the optimum.
    pub kkt_residual: f64,
}

fn projected_residual(x: [f64; 2], g: [f64; 2], hi: [f64; 2]) -> f64 {
    (0..2)
        .map(|i| {
            let step = (x[i] - g[i]).clamp(0.0, hi[i]);
            (x[i] - step).abs()
        })
        .fold(0.0, f64::max)
}

/// Minimizes `β1·D1 + β2·D2` over `[0, P1] × [0, P2]`.
pub fn optimize_af_powers(p1: f64, p2: f64, rho: f64, beta1: f64, beta2: f64) -> Result<PowerSolution> {
    check_pos("P1", p1)?;
    check_pos("P2", p2)?;
    check_rho(rho)?;
    check_weights(beta1, beta2)?;
    let f = |a: f64, b: f64| af_objective(a, b, rho, beta1, beta2);
    let mut cands: Vec<[f64; 2]> = vec![[p1, p2], [0.0, p2], [p1, 0.0], [0.0, 0.0]];

    // boundary slices
    let equal = beta1 == beta2 && rho > 0.0;
    let slice = |fixed: f64, hi: f64, other_first: bool| -> f64 {
        if equal && fixed > 0.0 {
            return af_critical_power(fixed, rho).map_or(hi, |c| c.min(hi));
        }
        let g = |x: f64| if other_first { f(x, fixed) } else { f(fixed, x) };
        scan_then_golden(g, 0.0, hi, 64, 1e-12 * hi.max(1.0)).0
    };
    cands.push([p1, slice(p1, p2, false)]);
    cands.push([slice(p2, p1, true), p2]);
    cands.push([0.0, slice(0.0, p2, false)]);
    cands.push([slice(0.0, p1, true), 0.0]);

    // interior stationary points
    for &fa in &[0.25, 0.5, 0.75] {
        for &fb in &[0.25, 0.5, 0.75] {
            if let Some(x) = damped_newton(&f, [fa * p1, fb * p2], [p1, p2], rho, beta1, beta2) {
                cands.push(x);
            }
        }
    }

    let best = cands
        .into_iter()
        .min_by(|x, y| f(x[0], x[1]).total_cmp(&f(y[0], y[1])))
        .expect("candidate set is nonempty");
    let g = af_gradient(best[0], best[1], rho, beta1, beta2);
    let tol_at = |x: f64, hi: f64| x >= hi * (1.0 - 1e-12);
    Ok(PowerSolution {
        a_star: best[0],
        b_star: best[1],
        d_min: f(best[0], best[1]),
        active: ActiveConstraints {
            a_upper: tol_at(best[0], p1),
            b_upper: tol_at(best[1], p2),
        },
        kkt_residual: projected_residual(best, g, [p1, p2]),
    })
}

fn damped_newton(
    f: &impl Fn(f64, f64) -> f64,
    x0: [f64; 2],
    hi: [f64; 2],
    rho: f64,
    beta1: f64,
    beta2: f64,
) -> Option<[f64; 2]> {
    let grad = |x: [f64; 2]| af_gradient(x[0], x[1], rho, beta1, beta2);
    let clamp = |x: [f64; 2]| [x[0].clamp(1e-12, hi[0]), x[1].clamp(1e-12, hi[1])];
    let mut x = x0;
    let mut fx = f(x[0], x[1]);
    for _ in 0..100 {
        let g = grad(x);
        let h = [1e-6 * x[0].max(1e-3), 1e-6 * x[1].max(1e-3)];
        let mut hess = [[0.0; 2]; 2];
        for j in 0..2 {
            let mut up = x;
            let mut dn = x;
            up[j] += h[j];
            dn[j] -= h[j];
            let (gu, gd) = (grad(up), grad(dn));
            for i in 0..2 {
                hess[i][j] = (gu[i] - gd[i]) / (2.0 * h[j]);
            }
        }
        let sym = 0.5 * (hess[0][1] + hess[1][0]);
        let det = hess[0][0] * hess[1][1] - sym * sym;
        let dir = if hess[0][0] > 0.0 && det > 0.0 {
            [
                -(hess[1][1] * g[0] - sym * g[1]) / det,
                -(hess[0][0] * g[1] - sym * g[0]) / det,
            ]
        } else {
            [-g[0], -g[1]]
        };
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-12 {
            let y = clamp([x[0] + t * dir[0], x[1] + t * dir[1]]);
            let fy = f(y[0], y[1]);
            if fy < fx {
                let step = (y[0] - x[0]).abs().max((y[1] - x[1]).abs());
                x = y;
                fx = fy;
                moved = step > 1e-13 * hi[0].max(hi[1]);
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// `β1·D1 + β2·D2` for the quantize-then-correlate scheme at rates `R1`, `R2`.
pub fn lt_weighted_objective(
    r1: f64,
    r2: f64,
    rho: f64,
    var1: f64,
    var2: f64,
    beta1: f64,
    beta2: f64,
) -> Result<f64> {
    check_weights(beta1, beta2)?;
    let (d1, d2) = lt_distortions(r1, r2, rho, var1, var2)?;
    Ok(beta1 * d1 + beta2 * d2)
}

/// Best weighted distortion of the quantize-then-correlate scheme at powers `a`, `b`.
pub fn lt_optimize_weighted(a: f64, b: f64, rho: f64, beta1: f64, beta2: f64) -> Result<f64> {
    check_weights(beta1, beta2)?;
    let r = lt_gmac(
        &SourceModel::unit(rho),
        a,
        b,
        1.0,
        DistortionObjective::Weighted(beta1, beta2),
    )?;
    Ok(beta1 * r.d1 + beta2 * r.d2)
}

fn coded_sum_distortion(scheme: Scheme, a: f64, b: f64, rho: f64) -> Result<f64> {
    let src = SourceModel::unit(rho);
    let r = match scheme {
        Scheme::Sb => sb_gmac(&src, a, b, 1.0, DistortionObjective::Sum)?,
        Scheme::Lt => lt_gmac(&src, a, b, 1.0, DistortionObjective::Sum)?,
        other => {
            return Err(Error::UnsupportedScheme(format!(
                "full-power check is defined for sb and lt, not {other}"
            )))
        }
    };
    Ok(r.sum())
}

/// Checks that `D1 + D2` at full powers is no worse than on a 20 × 20 grid
/// of reduced powers. A falsification test, not a proof.
pub fn verify_full_power_optimal(scheme: Scheme, p1: f64, p2: f64, rho: f64) -> Result<bool> {
    if matches!(scheme, Scheme::Af | Scheme::Nc) {
        return Err(Error::UnsupportedScheme(format!(
            "full-power check is defined for sb and lt, not {scheme}"
        )));
    }
    check_pos("P1", p1)?;
    check_pos("P2", p2)?;
    check_rho(rho)?;
    let full = coded_sum_distortion(scheme, p1, p2, rho)?;
    for i in 1..=20 {
        for j in 1..=20 {
            let a = p1 * i as f64 / 21.0;
            let b = p2 * j as f64 / 21.0;
            if coded_sum_distortion(scheme, a, b, rho)? < full - 1e-9 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Minimizer of `D1 + D2` over the second user's power by numerical search,
/// independent of the closed form.
pub fn af_best_second_power(a: f64, rho: f64, b_max: f64) -> f64 {
    golden_section(|b| af_objective(a, b, rho, 1.0, 1.0), 0.0, b_max, 1e-10 * b_max.max(1.0)).0
}
