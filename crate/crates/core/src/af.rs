//! Amplify-and-forward over the Gaussian MAC.
//!
//! Each encoder scales its source sample to full power,
//! `X_i = √P_i · U_i / σ_i`, and the receiver forms `E[U_i | Y]`.

use crate::error::{check_nonneg, check_pos, check_rho, Error, Result};
use crate::gauss::{bivariate_cov, JointGaussian, LinearModel, MAX_DIM};

/// Two-user asymmetric operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfParams {
    pub p1: f64,
    pub p2: f64,
    pub var1: f64,
    pub var2: f64,
    pub rho: f64,
    pub noise_var: f64,
}

impl AfParams {
    /// Unit source variances and unit noise, both users at power `snr`.
    pub fn symmetric(snr: f64, rho: f64) -> Self {
        AfParams {
            p1: snr,
            p2: snr,
            var1: 1.0,
            var2: 1.0,
            rho,
            noise_var: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_nonneg("P1", self.p1)?;
        check_nonneg("P2", self.p2)?;
        check_pos("var1", self.var1)?;
        check_pos("var2", self.var2)?;
        check_pos("noise variance", self.noise_var)?;
        check_rho(self.rho)
    }

    /// Factor model with `U1, U2, N` and the channel output `Y`.
    pub fn linear_model(&self) -> Result<LinearModel> {
        self.validate()?;
        let mut cov = nalgebra::DMatrix::zeros(3, 3);
        cov.view_mut((0, 0), (2, 2))
            .copy_from(&bivariate_cov(self.var1, self.var2, self.rho));
        cov[(2, 2)] = self.noise_var;
        let mut m = LinearModel::new(["U1", "U2", "N"], cov)?;
        m.define(
            "Y",
            &[
                ("U1", (self.p1 / self.var1).sqrt()),
                ("U2", (self.p2 / self.var2).sqrt()),
                ("N", 1.0),
            ],
        )?;
        Ok(m)
    }

    /// Joint law of `(U1, U2, Y)`.
    pub fn joint(&self) -> Result<JointGaussian> {
        self.linear_model()?.joint(&["U1", "U2", "Y"])
    }
}

/// MMSE distortions `(D1, D2)` of uncoded transmission.
pub fn af_distortions(p: &AfParams) -> Result<(f64, f64)> {
    p.validate()?;
    let AfParams {
        p1,
        p2,
        var1,
        var2,
        rho,
        noise_var,
    } = *p;
    let den = p1 + p2 + 2.0 * rho * (p1 * p2).sqrt() + noise_var;
    let one_minus = 1.0 - rho * rho;
    Ok((
        var1 * (p2 * one_minus + noise_var) / den,
        var2 * (p1 * one_minus + noise_var) / den,
    ))
}

/// Symmetric per-user distortion at SNR `S = P/σ_N²`.
pub fn af_symmetric(snr: f64, rho: f64, var: f64) -> Result<f64> {
    check_nonneg("SNR", snr)?;
    check_rho(rho)?;
    check_pos("variance", var)?;
    Ok(var * (snr * (1.0 - rho * rho) + 1.0) / (2.0 * snr * (1.0 + rho) + 1.0))
}

/// High-SNR floor `σ²(1−ρ)/2` of [`af_symmetric`].
pub fn af_symmetric_floor(rho: f64, var: f64) -> f64 {
    var * (1.0 - rho) / 2.0
}

/// `N` equicorrelated unit-variance sources, each at power `power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiUserParams {
    pub n_users: usize,
    pub power: f64,
    pub rho: f64,
    pub noise_var: f64,
}

impl MultiUserParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_users == 0 {
            return Err(Error::invalid("need at least one user"));
        }
        check_nonneg("P", self.power)?;
        check_pos("noise variance", self.noise_var)?;
        check_rho(self.rho)?;
        if self.n_users > 1 && self.rho <= -1.0 / (self.n_users as f64 - 1.0) {
            return Err(Error::invalid("correlation too negative for a valid covariance"));
        }
        Ok(())
    }

    /// Joint law of `(U1, …, UN, Y)` for small `N`.
    pub fn joint(&self) -> Result<JointGaussian> {
        self.validate()?;
        let n = self.n_users;
        if n + 2 > MAX_DIM {
            return Err(Error::invalid(format!("joint model supports at most {} users", MAX_DIM - 2)));
        }
        let mut cov = nalgebra::DMatrix::from_element(n + 1, n + 1, self.rho);
        for i in 0..n {
            cov[(i, i)] = 1.0;
            cov[(i, n)] = 0.0;
            cov[(n, i)] = 0.0;
        }
        cov[(n, n)] = self.noise_var;
        let mut names: Vec<String> = (1..=n).map(|i| format!("U{i}")).collect();
        names.push("N".into());
        let mut m = LinearModel::new(names.clone(), cov)?;
        let amp = self.power.sqrt();
        let mut terms: Vec<(&str, f64)> = names[..n].iter().map(|s| (s.as_str(), amp)).collect();
        terms.push(("N", 1.0));
        m.define("Y", &terms)?;
        let mut want: Vec<&str> = names[..n].iter().map(|s| s.as_str()).collect();
        want.push("Y");
        m.joint(&want)
    }
}

/// Per-user distortion with `N` users.
pub fn af_multiuser(p: &MultiUserParams) -> Result<f64> {
    p.validate()?;
    let n = p.n_users as f64;
    let g = 1.0 + (n - 1.0) * p.rho;
    Ok(1.0 - p.power * g * g / (n * p.power * g + p.noise_var))
}

/// Limits of [`af_multiuser`]: `N → ∞` gives `1−ρ`, `P → ∞` gives `(N−1)(1−ρ)/N`.
pub fn af_multiuser_limits(n_users: usize, rho: f64) -> (f64, f64) {
    let n = n_users as f64;
    (1.0 - rho, (n - 1.0) / n * (1.0 - rho))
}
