//! Small derivative-free searches used by the solvers.

use crate::error::Result;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimum of a unimodal function on `[lo, hi]`, returned as `(x, f(x))`.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        if x1 >= x2 {
            break;
        }
    }
    let (mut x, mut fx) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    for end in [lo, hi] {
        let fe = f(end);
        if fe < fx {
            x = end;
            fx = fe;
        }
    }
    (x, fx)
}

/// Coarse scan of `n + 1` equispaced points followed by golden-section
/// refinement in the bracket around the best sample.
pub fn scan_then_golden(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    n: usize,
    tol: f64,
) -> (f64, f64) {
    let n = n.max(2);
    let h = (hi - lo) / n as f64;
    let mut best = (lo, f(lo));
    let mut best_k = 0;
    for k in 1..=n {
        let x = if k == n { hi } else { lo + h * k as f64 };
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
            best_k = k;
        }
    }
    let a = lo + h * best_k.saturating_sub(1) as f64;
    let b = (lo + h * (best_k + 1) as f64).min(hi);
    let refined = golden_section(&mut f, a, b, tol);
    if refined.1 <= best.1 {
        refined
    } else {
        best
    }
}

/// Largest `t ∈ [0, t_max]` with `slack(t) ≥ 0`.
///
/// `slack(0)` must be nonnegative. The interval is scanned on `scan` cells;
/// the boundary is bisected inside the cell following the last feasible
/// sample, so feasible sets made of several intervals resolve to the
/// outermost one that the scan sees.
pub fn max_feasible(
    mut slack: impl FnMut(f64) -> Result<f64>,
    t_max: f64,
    scan: usize,
    tol: f64,
) -> Result<f64> {
    let scan = scan.max(1);
    let mut last_ok = 0.0;
    let mut first_bad = None;
    for k in (1..=scan).rev() {
        let t = t_max * k as f64 / scan as f64;
        if slack(t)? >= 0.0 {
            last_ok = t;
            break;
        }
        first_bad = Some(t);
    }
    let Some(mut hi) = first_bad else {
        return Ok(t_max);
    };
    let mut lo = last_ok;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if slack(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Point found by [`minimize_on_rate_boundary`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub r1: f64,
    pub r2: f64,
    pub value: f64,
}

/// Minimizes `objective(r1, r2)` over the outer boundary of a rate region.
///
/// The objective must be nonincreasing in both rates, so its minimum over
/// the region lies on the boundary. Rates are parametrized by a ray
/// `(t cos φ, t sin φ)`; for each direction the boundary radius comes from
/// [`max_feasible`] and the direction is optimized by scan plus golden section.
pub fn minimize_on_rate_boundary(
    mut objective: impl FnMut(f64, f64) -> Result<f64>,
    mut slack: impl FnMut(f64, f64) -> Result<f64>,
    t_max: f64,
    phi_tol: f64,
) -> Result<BoundaryPoint> {
    use std::f64::consts::FRAC_PI_2;

    let snap = |x: f64| if x < 1e-14 { 0.0 } else { x };
    let mut err = None;
    let mut best: Option<BoundaryPoint> = None;
    let mut eval = |phi: f64| -> f64 {
        let (c, s) = (phi.cos(), phi.sin());
        let r = max_feasible(|t| slack(snap(t * c), snap(t * s)), t_max, 16, 1e-10)
            .and_then(|t| {
                let (r1, r2) = (snap(t * c), snap(t * s));
                objective(r1, r2).map(|v| BoundaryPoint { r1, r2, value: v })
            });
        match r {
            Ok(p) => {
                if best.map_or(true, |b| p.value < b.value) {
                    best = Some(p);
                }
                p.value
            }
            Err(e) => {
                err.get_or_insert(e);
                f64::INFINITY
            }
        }
    };
    scan_then_golden(&mut eval, 0.0, FRAC_PI_2, 16, phi_tol);
    if let Some(e) = err {
        return Err(e);
    }
    Ok(best.expect("at least one direction evaluated"))
}

/// Outcome of [`nelder_mead`].
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Nelder–Mead with standard coefficients (1, 2, ½, ½).
///
/// Stops when the spread of simplex values falls below `tol` and the simplex
/// diameter below `sqrt(tol)`, or after `max_iter` iterations.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> Simplex {
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    let mut it = 0;
    while it < max_iter {
        it += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = vals[n] - vals[0];
        let diam = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.abs() <= tol && diam <= tol.sqrt() {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| pts[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[n])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let x = along(-0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = along(0.5);
                let v = f(&x);
                (x, v)
            };
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    let shrunk: Vec<f64> = pts[i]
                        .iter()
                        .zip(&pts[0])
                        .map(|(p, b)| b + 0.5 * (p - b))
                        .collect();
                    vals[i] = f(&shrunk);
                    pts[i] = shrunk;
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    Simplex {
        x: pts[best].clone(),
        value: vals[best],
        iterations: it,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, fx) = golden_section(|x| (x - 1.3).powi(2) + 2.0, -5.0, 5.0, 1e-10);
        assert!((x - 1.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-14);
    }

    #[test]
    fn golden_respects_endpoints() {
        let (x, _) = golden_section(|x| x, 0.0, 1.0, 1e-12);
        assert_eq!(x, 0.0);
    }

    #[test]
    fn max_feasible_bisects_threshold() {
        let t = max_feasible(|t| Ok(2.5 - t), 10.0, 16, 1e-13).unwrap();
        assert!((t - 2.5).abs() < 1e-12);
        assert_eq!(max_feasible(|_| Ok(1.0), 3.0, 4, 1e-9).unwrap(), 3.0);
    }

    #[test]
    fn rate_boundary_on_simplex() {
        // region r1 + r2 <= 1, objective 2^{-2r1} + 2^{-2r2}: optimum at (½, ½)
        let p = minimize_on_rate_boundary(
            |a, b| Ok((-2.0 * a).exp2() + (-2.0 * b).exp2()),
            |a, b| Ok(1.0 - a - b),
            4.0,
            1e-10,
        )
        .unwrap();
        assert!((p.r1 - 0.5).abs() < 1e-4 && (p.r2 - 0.5).abs() < 1e-4);
        assert!((p.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let s = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            0.5,
            1e-14,
            5000,
        );
        assert!((s.x[0] - 1.0).abs() < 1e-5 && (s.x[1] - 1.0).abs() < 1e-5);
    }
}
