//! Parameter types shared across schemes.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_nonneg, check_pos, check_rho, Error, Result};

/// A jointly Gaussian source pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    pub var1: f64,
    pub var2: f64,
    pub rho: f64,
}

impl SourceModel {
    pub fn unit(rho: f64) -> Self {
        SourceModel {
            var1: 1.0,
            var2: 1.0,
            rho,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_pos("var1", self.var1)?;
        check_pos("var2", self.var2)?;
        check_rho(self.rho)
    }
}

/// Channel models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelSpec {
    /// `Y = X1 + X2 + N`.
    Gmac { p1: f64, p2: f64, noise_var: f64 },
    /// `N` users with common power `p`.
    SymmetricGmac { n_users: usize, p: f64, noise_var: f64 },
    /// `Y_i = X_i + N_i`, non-interfering.
    Orthogonal {
        p1: f64,
        p2: f64,
        noise_var1: f64,
        noise_var2: f64,
    },
}

impl ChannelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelSpec::Gmac { p1, p2, noise_var } => {
                check_nonneg("P1", p1)?;
                check_nonneg("P2", p2)?;
                check_pos("noise variance", noise_var)
            }
            ChannelSpec::SymmetricGmac {
                n_users,
                p,
                noise_var,
            } => {
                if n_users == 0 {
                    return Err(Error::invalid("need at least one user"));
                }
                check_nonneg("P", p)?;
                check_pos("noise variance", noise_var)
            }
            ChannelSpec::Orthogonal {
                p1,
                p2,
                noise_var1,
                noise_var2,
            } => {
                check_nonneg("P1", p1)?;
                check_nonneg("P2", p2)?;
                check_pos("noise variance 1", noise_var1)?;
                check_pos("noise variance 2", noise_var2)
            }
        }
    }

    /// Two-user symmetric channel with `P / σ_N² = snr` and unit noise.
    pub fn symmetric_gmac(snr: f64) -> Self {
        ChannelSpec::Gmac {
            p1: snr,
            p2: snr,
            noise_var: 1.0,
        }
    }

    pub fn symmetric_orthogonal(snr: f64) -> Self {
        ChannelSpec::Orthogonal {
            p1: snr,
            p2: snr,
            noise_var1: 1.0,
            noise_var2: 1.0,
        }
    }
}

/// Outcome of evaluating one scheme at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeResult {
    pub d1: f64,
    pub d2: f64,
    /// Quantizer rates in bits per sample; zero for uncoded transmission.
    pub r1: f64,
    pub r2: f64,
    pub p1: f64,
    pub p2: f64,
    /// All rate constraints hold (within solver tolerance).
    pub feasible: bool,
}

impl SchemeResult {
    pub fn sum(&self) -> f64 {
        self.d1 + self.d2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Af,
    Sb,
    Lt,
    Nc,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Af, Scheme::Sb, Scheme::Lt, Scheme::Nc];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Af => "af",
            Scheme::Sb => "sb",
            Scheme::Lt => "lt",
            Scheme::Nc => "nc",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "af" => Ok(Scheme::Af),
            "sb" => Ok(Scheme::Sb),
            "lt" => Ok(Scheme::Lt),
            "nc" => Ok(Scheme::Nc),
            other => Err(format!("unknown scheme `{other}` (expected af, sb, lt or nc)")),
        }
    }
}

/// Converts decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
