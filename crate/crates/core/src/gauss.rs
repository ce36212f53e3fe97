//! Zero-mean jointly Gaussian vectors.
//!
//! Every decoder in this crate is a conditional expectation `E[U | observations]`,
//! and every rate constraint is a (conditional) mutual information between
//! blocks of a Gaussian vector. Both reduce to Schur complements and log
//! determinants of principal submatrices, which is all this module does.
//!
//! Two entry points exist:
//!
//! * [`JointGaussian::condition`] returns the full conditional law (mean map and
//!   covariance) and checks invertibility with an eigenvalue test.
//! * [`JointGaussian::conditional_variance`], [`JointGaussian::log2_det`] and the
//!   mutual-information helpers run a stack-allocated Cholesky factorization and
//!   are used in the inner loops of the quantizer searches.
//!
//! [`LinearModel`] builds joint laws from independent (or jointly specified)
//! factors and named linear combinations of them.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 16;

/// Eigenvalues above `-PSD_TOL * trace` are accepted as nonnegative.
pub const PSD_TOL: f64 = 1e-10;

/// Relative threshold below which an observed block is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// A zero-mean Gaussian vector with named coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct JointGaussian {
    labels: Vec<String>,
    cov: DMatrix<f64>,
}

impl JointGaussian {
    /// Validates labels and covariance (square, symmetric, PSD, at most [`MAX_DIM`]).
    pub fn new<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        cov: DMatrix<f64>,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::invalid(format!(
                "dimension must be in 1..={MAX_DIM}, got {n}"
            )));
        }
        if cov.nrows() != n || cov.ncols() != n {
            return Err(Error::invalid(format!(
                "{n} labels but covariance is {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::invalid(format!("duplicate label `{l}`")));
            }
        }
        if cov.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("covariance has non-finite entries"));
        }
        let scale = cov.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        for i in 0..n {
            for j in 0..i {
                if (cov[(i, j)] - cov[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::invalid(format!(
                        "covariance is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let cov = symmetrize(cov);
        let trace = cov.trace();
        let min_eig = SymmetricEigen::new(cov.clone()).eigenvalues.min();
        if min_eig < -PSD_TOL * trace.max(f64::MIN_POSITIVE) {
            return Err(Error::invalid(format!(
                "covariance is not positive semidefinite (min eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(JointGaussian { labels, cov })
    }

    /// Skips the eigenvalue check; used for covariances that are PSD by construction.
    pub(crate) fn from_trusted(labels: Vec<String>, cov: DMatrix<f64>) -> Self {
        debug_assert_eq!(labels.len(), cov.nrows());
        JointGaussian {
            labels,
            cov: symmetrize(cov),
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn indices(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let i = self.index_of(l)?;
            if !out.contains(&i) {
                out.push(i);
            }
        }
        Ok(out)
    }

    pub fn variance(&self, label: &str) -> Result<f64> {
        let i = self.index_of(label)?;
        Ok(self.cov[(i, i)])
    }

    pub fn covariance(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.cov[(self.index_of(a)?, self.index_of(b)?)])
    }

    pub fn correlation(&self, a: &str, b: &str) -> Result<f64> {
        let c = self.covariance(a, b)?;
        Ok(c / (self.variance(a)? * self.variance(b)?).sqrt())
    }

    fn sub(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.cov[(rows[i], cols[j])])
    }

    /// Marginal law of the listed coordinates, in the listed order.
    pub fn marginal(&self, labels: &[&str]) -> Result<JointGaussian> {
        let idx = self.indices(labels)?;
        Ok(JointGaussian::from_trusted(
            idx.iter().map(|&i| self.labels[i].clone()).collect(),
            self.sub(&idx, &idx),
        ))
    }

    /// Law of the remaining coordinates given the `observed` ones.
    pub fn condition(&self, observed: &[&str]) -> Result<ConditionalLaw> {
        let obs = self.indices(observed)?;
        let unobs: Vec<usize> = (0..self.dim()).filter(|i| !obs.contains(i)).collect();
        let unobserved: Vec<String> = unobs.iter().map(|&i| self.labels[i].clone()).collect();
        let observed: Vec<String> = obs.iter().map(|&i| self.labels[i].clone()).collect();
        let s_uu = self.sub(&unobs, &unobs);
        if obs.is_empty() {
            return Ok(ConditionalLaw {
                unobserved,
                observed,
                gain: DMatrix::zeros(unobs.len(), 0),
                cov: s_uu,
            });
        }
        let s_oo = self.sub(&obs, &obs);
        let s_ou = self.sub(&obs, &unobs);
        let trace = s_oo.trace();
        let min_eig = SymmetricEigen::new(s_oo.clone()).eigenvalues.min();
        if !(min_eig > SINGULAR_TOL * trace) {
            return Err(Error::SingularObservation(format!(
                "min eigenvalue {min_eig:.3e} of observed block {observed:?}"
            )));
        }
        let chol = match s_oo.clone().cholesky() {
            Some(c) => c,
            None => {
                let jitter = DMatrix::identity(obs.len(), obs.len()) * (1e-12 * trace);
                (s_oo + jitter).cholesky().ok_or_else(|| {
                    Error::SingularObservation(format!("cholesky failed for {observed:?}"))
                })?
            }
        };
        // Σ_oo X = Σ_ou  =>  gain = Xᵀ = Σ_uo Σ_oo⁻¹
        let x = chol.solve(&s_ou);
        let gain = x.transpose();
        let cov = symmetrize(s_uu - &gain * s_ou);
        Ok(ConditionalLaw {
            unobserved,
            observed,
            gain,
            cov,
        })
    }

    /// `var(target | observed)`. Zero if the target is a deterministic
    /// function of the observations.
    pub fn conditional_variance(&self, target: &str, observed: &[&str]) -> Result<f64> {
        let t = self.index_of(target)?;
        let mut idx = self.indices(observed)?;
        if idx.contains(&t) {
            return Ok(0.0);
        }
        idx.push(t);
        let f = Factor::compute(&self.cov, &idx)?;
        f.check_leading(idx.len() - 1, &self.labels, &idx)?;
        Ok(f.pivots[idx.len() - 1].max(0.0))
    }

    /// `log2 det Σ_S`; an empty set has determinant one.
    pub fn log2_det(&self, labels: &[&str]) -> Result<f64> {
        let idx = self.indices(labels)?;
        self.log2_det_idx(&idx)
    }

    fn log2_det_idx(&self, idx: &[usize]) -> Result<f64> {
        if idx.is_empty() {
            return Ok(0.0);
        }
        let f = Factor::compute(&self.cov, idx)?;
        f.check_leading(idx.len(), &self.labels, idx)?;
        Ok(f.pivots[..idx.len()].iter().map(|p| p.log2()).sum())
    }

    /// `I(A; B)` in bits.
    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        let ia = self.indices(a)?;
        let ib = self.indices(b)?;
        if ia.is_empty() || ib.is_empty() {
            return Err(Error::invalid("mutual information needs nonempty sets"));
        }
        if ia.iter().any(|i| ib.contains(i)) {
            return Err(Error::invalid("mutual information needs disjoint sets"));
        }
        self.cmi_idx(&ia, &ib, &[])
    }

    /// `I(A; B | C)` in bits. Members of `C` are dropped from `A` and `B`
    /// (they carry no information once conditioned on); if either side
    /// becomes empty the result is zero.
    pub fn conditional_mutual_information(
        &self,
        a: &[&str],
        b: &[&str],
        given: &[&str],
    ) -> Result<f64> {
        let ic = self.indices(given)?;
        let ia: Vec<usize> = self.indices(a)?.into_iter().filter(|i| !ic.contains(i)).collect();
        let ib: Vec<usize> = self.indices(b)?.into_iter().filter(|i| !ic.contains(i)).collect();
        if ia.iter().any(|i| ib.contains(i)) {
            return Err(Error::invalid("conditional mutual information needs disjoint sets"));
        }
        if ia.is_empty() || ib.is_empty() {
            return Ok(0.0);
        }
        self.cmi_idx(&ia, &ib, &ic)
    }

    fn cmi_idx(&self, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
        let join = |x: &[usize], y: &[usize]| -> Vec<usize> {
            let mut v = x.to_vec();
            v.extend_from_slice(y);
            v
        };
        let ac = join(a, c);
        let bc = join(b, c);
        let abc = join(&ac, b);
        let v = 0.5
            * (self.log2_det_idx(&ac)? + self.log2_det_idx(&bc)?
                - self.log2_det_idx(c)?
                - self.log2_det_idx(&abc)?);
        Ok(v.max(0.0))
    }

    /// Lower Cholesky factor `L` with `L Lᵀ = Σ`, used to draw samples.
    /// Falls back to a single `1e-12·trace` diagonal jitter for PSD-singular matrices.
    pub fn cholesky_factor(&self) -> Result<DMatrix<f64>> {
        if let Some(c) = self.cov.clone().cholesky() {
            return Ok(c.l());
        }
        let n = self.dim();
        let jitter = DMatrix::identity(n, n) * (1e-12 * self.cov.trace());
        (self.cov.clone() + jitter)
            .cholesky()
            .map(|c| c.l())
            .ok_or_else(|| Error::SingularObservation("cholesky of full covariance".into()))
    }
}

/// Result of [`JointGaussian::condition`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalLaw {
    pub unobserved: Vec<String>,
    pub observed: Vec<String>,
    /// `Σ_uo Σ_oo⁻¹`: conditional mean of the unobserved block is `gain · y_obs`.
    pub gain: DMatrix<f64>,
    /// `Σ_uu − Σ_uo Σ_oo⁻¹ Σ_ou`.
    pub cov: DMatrix<f64>,
}

impl ConditionalLaw {
    fn unobserved_index(&self, label: &str) -> Result<usize> {
        self.unobserved
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn mean(&self, observed_values: &[f64]) -> DVector<f64> {
        &self.gain * DVector::from_column_slice(observed_values)
    }

    pub fn variance(&self, label: &str) -> Result<f64> {
        let i = self.unobserved_index(label)?;
        Ok(self.cov[(i, i)])
    }

    /// Estimator coefficients for one unobserved coordinate, ordered like `observed`.
    pub fn gain_row(&self, label: &str) -> Result<Vec<f64>> {
        let i = self.unobserved_index(label)?;
        Ok(self.gain.row(i).iter().copied().collect())
    }

    /// The conditional law as a joint Gaussian over the unobserved coordinates.
    pub fn as_joint(&self) -> JointGaussian {
        JointGaussian::from_trusted(self.unobserved.clone(), self.cov.clone())
    }
}

fn symmetrize(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Cholesky pivots of a principal submatrix, computed on the stack.
///
/// `pivots[k]` is the conditional variance of coordinate `idx[k]` given
/// `idx[..k]`. Factorization stops at the first nonpositive pivot.
struct Factor {
    pivots: [f64; MAX_DIM],
    n_ok: usize,
    max_diag: f64,
}

impl Factor {
    fn compute(cov: &DMatrix<f64>, idx: &[usize]) -> Result<Factor> {
        let n = idx.len();
        if n > MAX_DIM {
            return Err(Error::invalid(format!("dimension {n} exceeds {MAX_DIM}")));
        }
        let mut l = [0.0_f64; MAX_DIM * MAX_DIM];
        let mut pivots = [0.0_f64; MAX_DIM];
        let max_diag = idx.iter().fold(0.0_f64, |m, &i| m.max(cov[(i, i)]));
        let mut n_ok = 0;
        for j in 0..n {
            let mut s = cov[(idx[j], idx[j])];
            for k in 0..j {
                s -= l[j * MAX_DIM + k] * l[j * MAX_DIM + k];
            }
            pivots[j] = s;
            if !(s > 0.0) {
                break;
            }
            n_ok = j + 1;
            let d = s.sqrt();
            l[j * MAX_DIM + j] = d;
            for i in (j + 1)..n {
                let mut t = cov[(idx[i], idx[j])];
                for k in 0..j {
                    t -= l[i * MAX_DIM + k] * l[j * MAX_DIM + k];
                }
                l[i * MAX_DIM + j] = t / d;
            }
        }
        Ok(Factor {
            pivots,
            n_ok,
            max_diag,
        })
    }

    /// Errors unless the first `m` pivots are all above the singularity threshold.
    fn check_leading(&self, m: usize, labels: &[String], idx: &[usize]) -> Result<()> {
        let tol = SINGULAR_TOL * self.max_diag.max(f64::MIN_POSITIVE);
        for k in 0..m {
            if k >= self.n_ok || self.pivots[k] <= tol {
                let names: Vec<&str> = idx[..m].iter().map(|&i| labels[i].as_str()).collect();
                return Err(Error::SingularObservation(format!(
                    "pivot {:.3e} at `{}` in {names:?}",
                    self.pivots[k], labels[idx[k]]
                )));
            }
        }
        Ok(())
    }
}

/// Named linear combinations of a base Gaussian factor vector.
///
/// Factors are declared up front together with their joint covariance;
/// every derived variable is a fixed linear combination of factors (and
/// may be defined in terms of previously defined variables).
#[derive(Debug, Clone)]
pub struct LinearModel {
    factor_cov: DMatrix<f64>,
    n_factors: usize,
    names: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl LinearModel {
    pub fn new<S: Into<String>>(
        factors: impl IntoIterator<Item = S>,
        factor_cov: DMatrix<f64>,
    ) -> Result<Self> {
        let base = JointGaussian::new(factors, factor_cov)?;
        let n = base.dim();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Ok(LinearModel {
            factor_cov: base.cov,
            n_factors: n,
            names: base.labels,
            rows,
        })
    }

    /// Factors with a diagonal covariance.
    pub fn independent(factors: &[(&str, f64)]) -> Result<Self> {
        let diag = DVector::from_iterator(factors.len(), factors.iter().map(|f| f.1));
        LinearModel::new(factors.iter().map(|f| f.0), DMatrix::from_diagonal(&diag))
    }

    pub fn n_factors(&self) -> usize {
        self.n_factors
    }

    pub fn factor_cov(&self) -> &DMatrix<f64> {
        &self.factor_cov
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    fn position(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    /// Defines `name = Σ coef · term`, where each term is a factor or an
    /// already defined variable.
    pub fn define(&mut self, name: &str, terms: &[(&str, f64)]) -> Result<&mut Self> {
        if self.names.iter().any(|n| n == name) {
            return Err(Error::invalid(format!("variable `{name}` already defined")));
        }
        let mut row = vec![0.0; self.n_factors];
        for (term, coef) in terms {
            if !coef.is_finite() {
                return Err(Error::invalid(format!("non-finite coefficient for `{term}`")));
            }
            let src = &self.rows[self.position(term)?];
            for (r, s) in row.iter_mut().zip(src) {
                *r += coef * s;
            }
        }
        self.names.push(name.to_string());
        self.rows.push(row);
        Ok(self)
    }

    /// Coefficients of `name` over the factors.
    pub fn coefficients(&self, name: &str) -> Result<&[f64]> {
        Ok(&self.rows[self.position(name)?])
    }

    pub fn variance(&self, name: &str) -> Result<f64> {
        let r = DVector::from_column_slice(self.coefficients(name)?);
        Ok((r.transpose() * &self.factor_cov * &r)[(0, 0)])
    }

    /// Joint law of the listed variables (PSD by construction).
    pub fn joint(&self, names: &[&str]) -> Result<JointGaussian> {
        if names.is_empty() || names.len() > MAX_DIM {
            return Err(Error::invalid(format!(
                "joint needs 1..={MAX_DIM} variables, got {}",
                names.len()
            )));
        }
        let mut a = DMatrix::zeros(names.len(), self.n_factors);
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::invalid(format!("duplicate variable `{name}`")));
            }
            let row = self.coefficients(name)?;
            for (j, v) in row.iter().enumerate() {
                a[(i, j)] = *v;
            }
        }
        let cov = &a * &self.factor_cov * a.transpose();
        Ok(JointGaussian::from_trusted(
            names.iter().map(|s| s.to_string()).collect(),
            cov,
        ))
    }
}

/// Covariance of two unit-variance coordinates with correlation `rho`, scaled by the given variances.
pub fn bivariate_cov(var1: f64, var2: f64, rho: f64) -> DMatrix<f64> {
    let c = rho * (var1 * var2).sqrt();
    DMatrix::from_row_slice(2, 2, &[var1, c, c, var2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bivariate(rho: f64) -> JointGaussian {
        JointGaussian::new(["x", "y"], bivariate_cov(1.0, 1.0, rho)).unwrap()
    }

    #[test]
    fn conditioning_on_nothing_returns_prior() {
        let g = JointGaussian::new(
            ["a", "b", "c"],
            DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 0.5]),
        )
        .unwrap();
        let law = g.condition(&[]).unwrap();
        assert_eq!(law.cov, *g.cov());
        assert_eq!(law.gain.ncols(), 0);
        assert_eq!(law.unobserved, g.labels());
    }

    #[test]
    fn bivariate_identity() {
        let g = bivariate(0.6);
        let law = g.condition(&["y"]).unwrap();
        assert!((law.gain_row("x").unwrap()[0] - 0.6).abs() < 1e-15);
        assert!((law.variance("x").unwrap() - 0.64).abs() < 1e-15);
        assert!((g.conditional_variance("x", &["y"]).unwrap() - 0.64).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_examples() {
        let indep = JointGaussian::new(
            ["a", "b"],
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0]),
        )
        .unwrap();
        assert_eq!(indep.mutual_information(&["a"], &["b"]).unwrap(), 0.0);

        let g = bivariate(0.5);
        let mi = g.mutual_information(&["x"], &["y"]).unwrap();
        assert!((mi - (-0.5 * 0.75_f64.log2())).abs() < 1e-15);
        assert!((mi - 0.2075).abs() < 1e-4);
    }

    #[test]
    fn scalar_awgn_mutual_information() {
        for (p, n) in [(1.0, 1.0), (10.0, 0.5), (0.01, 2.0), (1e4, 1.0)] {
            let mut m = LinearModel::independent(&[("x", p), ("n", n)]).unwrap();
            m.define("y", &[("x", 1.0), ("n", 1.0)]).unwrap();
            let g = m.joint(&["x", "y"]).unwrap();
            let mi = g.mutual_information(&["x"], &["y"]).unwrap();
            assert!((mi - 0.5 * (1.0 + p / n).log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn errors() {
        let g = bivariate(0.5);
        assert!(matches!(g.condition(&["z"]), Err(Error::UnknownLabel(_))));
        let mut m = LinearModel::independent(&[("x", 1.0)]).unwrap();
        m.define("x2", &[("x", 2.0)]).unwrap();
        let g = m.joint(&["x", "x2"]).unwrap();
        assert!(matches!(
            g.condition(&["x", "x2"]),
            Err(Error::SingularObservation(_))
        ));
        assert!(matches!(
            g.log2_det(&["x", "x2"]),
            Err(Error::SingularObservation(_))
        ));
        // deterministic target is fine
        assert_eq!(g.conditional_variance("x2", &["x"]).unwrap(), 0.0);
        assert!(JointGaussian::new(["a", "a"], DMatrix::identity(2, 2)).is_err());
        assert!(JointGaussian::new(
            ["a", "b"],
            DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])
        )
        .is_err());
        assert!(JointGaussian::new(
            ["a", "b"],
            DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.2, 1.0])
        )
        .is_err());
    }

    #[test]
    fn conditional_mi_drops_conditioned_members() {
        let mut m = LinearModel::independent(&[("u", 1.0), ("v", 1.0), ("q", 0.5)]).unwrap();
        m.define("w", &[("u", 1.0), ("q", 1.0)]).unwrap();
        m.define("z", &[("u", 1.0), ("v", 1.0)]).unwrap();
        let g = m.joint(&["u", "v", "z", "w"]).unwrap();
        let with = g
            .conditional_mutual_information(&["u", "z"], &["w"], &["z"])
            .unwrap();
        let without = g.conditional_mutual_information(&["u"], &["w"], &["z"]).unwrap();
        assert!((with - without).abs() < 1e-14);
        assert_eq!(
            g.conditional_mutual_information(&["z"], &["w"], &["z"]).unwrap(),
            0.0
        );
    }

    fn random_cov(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
        proptest::collection::vec(-1.0..1.0_f64, n * n).prop_map(move |v| {
            let a = DMatrix::from_vec(n, n, v);
            &a * a.transpose() + DMatrix::identity(n, n) * 0.05
        })
    }

    const L5: [&str; 5] = ["a", "b", "c", "d", "e"];

    proptest! {
        #[test]
        fn conditioning_twice_equals_union(cov in random_cov(5)) {
            let g = JointGaussian::new(L5, cov).unwrap();
            let once = g.condition(&["d", "e"]).unwrap();
            let step = g.condition(&["e"]).unwrap().as_joint().condition(&["d"]).unwrap();
            prop_assert_eq!(&once.unobserved, &step.unobserved);
            for (x, y) in once.cov.iter().zip(step.cov.iter()) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }

        #[test]
        fn mutual_information_is_symmetric(cov in random_cov(5)) {
            let g = JointGaussian::new(L5, cov).unwrap();
            let ab = g.mutual_information(&["a", "c"], &["b", "e"]).unwrap();
            let ba = g.mutual_information(&["b", "e"], &["a", "c"]).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!(ab >= 0.0);
        }

        #[test]
        fn conditioning_never_increases_variance(cov in random_cov(5)) {
            let g = JointGaussian::new(L5, cov).unwrap();
            let law = g.condition(&["b", "d"]).unwrap();
            for l in ["a", "c", "e"] {
                prop_assert!(law.variance(l).unwrap() <= g.variance(l).unwrap() + 1e-12);
                let fast = g.conditional_variance(l, &["b", "d"]).unwrap();
                prop_assert!((fast - law.variance(l).unwrap()).abs() < 1e-10);
            }
        }
    }
}
