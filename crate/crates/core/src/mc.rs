//! Monte Carlo simulation of uncoded pipelines.
//!
//! Samples are drawn in blocks of [`BLOCK`]. Block `k` uses
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `k`, so results do
//! not depend on thread count. Block statistics are merged pairwise in
//! block order.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::af::AfParams;
use crate::error::{Error, Result};
use crate::gauss::{JointGaussian, LinearModel};
use crate::model::ChannelSpec;
use crate::orthogonal::OrthParams;
use crate::side_info::{af_si_model, LinearCombo, SideInfoSpec};

pub const BLOCK: usize = 1 << 16;
pub const MIN_SAMPLES: usize = 1000;
pub const RNG_NAME: &str = "chacha8/seed_from_u64/stream=block";

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub d1_hat: f64,
    pub d2_hat: f64,
    pub stderr1: f64,
    pub stderr2: f64,
    pub n: usize,
    pub seed: u64,
    pub rng: &'static str,
}

/// Count, mean and sum of squared deviations (merged with Chan's update).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
        }
    }

    fn stderr(&self) -> f64 {
        (self.m2 / (self.n - 1.0)).sqrt() / self.n.sqrt()
    }
}

fn pairwise<T: Clone>(mut items: Vec<T>, merge: impl Fn(T, T) -> T) -> T {
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge(a, b)),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop().expect("at least one block")
}

fn check_samples(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::invalid(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    Ok(())
}

/// Runs `per_block(rng, count)` over all blocks in parallel and returns the
/// block results in block order.
fn run_blocks<T: Send>(n: usize, seed: u64, per_block: impl Fn(&mut ChaCha8Rng, usize) -> T + Sync) -> Vec<T> {
    let n_blocks = n.div_ceil(BLOCK);
    (0..n_blocks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let count = if k + 1 == n_blocks { n - k * BLOCK } else { BLOCK };
            per_block(&mut rng, count)
        })
        .collect()
}

fn draw(rng: &mut ChaCha8Rng, chol: &DMatrix<f64>, z: &mut DVector<f64>, out: &mut DVector<f64>) {
    for v in z.iter_mut() {
        *v = StandardNormal.sample(rng);
    }
    chol.mul_to(z, out);
}

/// Simulates a linear pipeline: factors are sampled, `U1`, `U2` and the
/// observations are formed, and the MMSE estimator computed from the model
/// is applied sample by sample.
pub fn simulate_linear(model: &LinearModel, observed: &[&str], n: usize, seed: u64) -> Result<SimResult> {
    check_samples(n)?;
    let mut names = vec!["U1", "U2"];
    names.extend_from_slice(observed);
    let joint = model.joint(&names)?;
    let law = joint.condition(observed)?;
    let g1 = law.gain_row("U1")?;
    let g2 = law.gain_row("U2")?;

    let factors = JointGaussian::new(model.names()[..model.n_factors()].to_vec(), model.factor_cov().clone())?;
    let chol = factors.cholesky_factor()?;
    let row = |name: &str| model.coefficients(name).map(|r| DVector::from_column_slice(r));
    let u = [row("U1")?, row("U2")?];
    let obs: Vec<DVector<f64>> = observed.iter().map(|o| row(o)).collect::<Result<_>>()?;
    let k = model.n_factors();

    let blocks = run_blocks(n, seed, |rng, count| {
        let mut z = DVector::zeros(k);
        let mut f = DVector::zeros(k);
        let mut y = vec![0.0; obs.len()];
        let mut m = [Moments::default(); 2];
        for _ in 0..count {
            draw(rng, &chol, &mut z, &mut f);
            for (yi, o) in y.iter_mut().zip(&obs) {
                *yi = o.dot(&f);
            }
            let est1: f64 = g1.iter().zip(&y).map(|(g, v)| g * v).sum();
            let est2: f64 = g2.iter().zip(&y).map(|(g, v)| g * v).sum();
            m[0].push((u[0].dot(&f) - est1).powi(2));
            m[1].push((u[1].dot(&f) - est2).powi(2));
        }
        m
    });
    let m = pairwise(blocks, |a, b| [a[0].merge(b[0]), a[1].merge(b[1])]);
    Ok(SimResult {
        d1_hat: m[0].mean,
        d2_hat: m[1].mean,
        stderr1: m[0].stderr(),
        stderr2: m[1].stderr(),
        n,
        seed,
        rng: RNG_NAME,
    })
}

pub fn simulate_af_gmac(p: &AfParams, n: usize, seed: u64) -> Result<SimResult> {
    simulate_linear(&p.linear_model()?, &["Y"], n, seed)
}

pub fn simulate_af_orthogonal(p: &OrthParams, n: usize, seed: u64) -> Result<SimResult> {
    simulate_linear(&p.linear_model()?, &["Y1", "Y2"], n, seed)
}

pub fn simulate_af_si(
    spec: &SideInfoSpec,
    combo: &LinearCombo,
    channel: &ChannelSpec,
    rho: f64,
    n: usize,
    seed: u64,
) -> Result<SimResult> {
    let (m, obs) = af_si_model(spec, combo, channel, rho)?;
    simulate_linear(&m, &obs, n, seed)
}

/// Sample covariance of a joint Gaussian with per-entry standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCovariance {
    pub cov: DMatrix<f64>,
    pub stderr: DMatrix<f64>,
}

/// Zero-mean sample covariance from `n` draws.
pub fn sample_covariance(joint: &JointGaussian, n: usize, seed: u64) -> Result<SampleCovariance> {
    check_samples(n)?;
    let d = joint.dim();
    let chol = joint.cholesky_factor()?;
    let blocks = run_blocks(n, seed, |rng, count| {
        let mut z = DVector::zeros(d);
        let mut x = DVector::zeros(d);
        let mut m = vec![Moments::default(); d * d];
        for _ in 0..count {
            draw(rng, &chol, &mut z, &mut x);
            for i in 0..d {
                for j in 0..=i {
                    m[i * d + j].push(x[i] * x[j]);
                }
            }
        }
        m
    });
    let m = pairwise(blocks, |a, b| a.iter().zip(&b).map(|(x, y)| x.merge(*y)).collect());
    let mut cov = DMatrix::zeros(d, d);
    let mut se = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let e = m[i * d + j];
            cov[(i, j)] = e.mean;
            cov[(j, i)] = e.mean;
            se[(i, j)] = e.stderr();
            se[(j, i)] = e.stderr();
        }
    }
    Ok(SampleCovariance { cov, stderr: se })
}

/// Least-squares regression of one coordinate on others (no intercept).
#[derive(Debug, Clone, PartialEq)]
pub struct Regression {
    pub coef: Vec<f64>,
    pub stderr: Vec<f64>,
}

pub fn sample_regression(
    joint: &JointGaussian,
    target: &str,
    regressors: &[&str],
    n: usize,
    seed: u64,
) -> Result<Regression> {
    check_samples(n)?;
    let d = joint.dim();
    let t = joint.index_of(target)?;
    let idx: Vec<usize> = regressors.iter().map(|r| joint.index_of(r)).collect::<Result<_>>()?;
    let p = idx.len();
    let chol = joint.cholesky_factor()?;
    // per block: XᵀX, Xᵀy, yᵀy
    let blocks = run_blocks(n, seed, |rng, count| {
        let mut z = DVector::zeros(d);
        let mut x = DVector::zeros(d);
        let mut xtx = DMatrix::<f64>::zeros(p, p);
        let mut xty = DVector::<f64>::zeros(p);
        let mut yty = 0.0;
        for _ in 0..count {
            draw(rng, &chol, &mut z, &mut x);
            let y = x[t];
            for a in 0..p {
                xty[a] += x[idx[a]] * y;
                for b in 0..p {
                    xtx[(a, b)] += x[idx[a]] * x[idx[b]];
                }
            }
            yty += y * y;
        }
        (xtx, xty, yty)
    });
    let (xtx, xty, yty) = pairwise(blocks, |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let inv = xtx
        .try_inverse()
        .ok_or_else(|| Error::SingularObservation("regressors are collinear".into()))?;
    let beta = &inv * &xty;
    let rss = yty - beta.dot(&xty);
    let sigma2 = rss / (n - p) as f64;
    Ok(Regression {
        coef: beta.iter().copied().collect(),
        stderr: (0..p).map(|i| (sigma2 * inv[(i, i)]).sqrt()).collect(),
    })
}
