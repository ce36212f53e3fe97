//! Side information at the encoders and/or the decoder.
//!
//! Each encoder sees its source and a noisy look at the other source,
//! `Z1 = s1·U2 + V1`, `Z2 = s2·U1 + V2`, and transmits a function of the
//! unit-variance combination `L_i = a_i·U_i + b_i·Z_i`. The decoder may also
//! see `Z = (Z1, Z2)`.
//!
//! Coded schemes use Gaussian test channels `W_i = √(1−2^{−2r_i})·L_i + 2^{−r_i}·Q_i`
//! so that `I(L_i; W_i) = r_i` and every rate constraint is an exact
//! Gaussian mutual information.

use std::cell::{Cell, RefCell};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{check_nonneg, check_rho, Error, Result};
use crate::gauss::{JointGaussian, LinearModel};
use crate::model::{ChannelSpec, Scheme};
use crate::optim::{golden_section, minimize_on_rate_boundary, nelder_mead};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Availability {
    None,
    EncodersOnly,
    DecoderOnly,
    Both,
}

impl Availability {
    pub const ALL: [Availability; 4] = [
        Availability::None,
        Availability::EncodersOnly,
        Availability::DecoderOnly,
        Availability::Both,
    ];

    pub fn at_encoders(self) -> bool {
        matches!(self, Availability::EncodersOnly | Availability::Both)
    }

    pub fn at_decoder(self) -> bool {
        matches!(self, Availability::DecoderOnly | Availability::Both)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Availability::None => "none",
            Availability::EncodersOnly => "enc",
            Availability::DecoderOnly => "dec",
            Availability::Both => "both",
        }
    }
}

impl fmt::Display for Availability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Availability {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(Availability::None),
            "enc" | "encoders" | "encoders_only" => Ok(Availability::EncodersOnly),
            "dec" | "decoder" | "decoder_only" => Ok(Availability::DecoderOnly),
            "both" => Ok(Availability::Both),
            other => Err(format!("unknown side-information mode `{other}` (expected none, enc, dec or both)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideInfoSpec {
    pub s1: f64,
    pub s2: f64,
    pub availability: Availability,
}

impl SideInfoSpec {
    pub fn symmetric(s: f64, availability: Availability) -> Self {
        SideInfoSpec {
            s1: s,
            s2: s,
            availability,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_nonneg("s1", self.s1)?;
        check_nonneg("s2", self.s2)
    }

    fn decoder_labels(&self) -> &'static [&'static str] {
        if self.availability.at_decoder() {
            &["Z1", "Z2"]
        } else {
            &[]
        }
    }
}

/// Encoder coefficients `(a_i, b_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearCombo {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
}

impl LinearCombo {
    /// `L_i = U_i`.
    pub fn uncoded() -> Self {
        LinearCombo {
            a1: 1.0,
            b1: 0.0,
            a2: 1.0,
            b2: 0.0,
        }
    }

    /// Direction `(cos θ_i, sin θ_i)` per user, not yet normalized.
    pub fn from_angles(theta1: f64, theta2: f64) -> Self {
        LinearCombo {
            a1: theta1.cos(),
            b1: theta1.sin(),
            a2: theta2.cos(),
            b2: theta2.sin(),
        }
    }

    fn variances(&self, spec: &SideInfoSpec, rho: f64) -> (f64, f64) {
        let v1 = self.a1 * self.a1
            + 2.0 * self.a1 * self.b1 * spec.s1 * rho
            + self.b1 * self.b1 * (spec.s1 * spec.s1 + 1.0);
        let v2 = self.a2 * self.a2
            + 2.0 * self.a2 * self.b2 * spec.s2 * rho
            + self.b2 * self.b2 * (spec.s2 * spec.s2 + 1.0);
        (v1, v2)
    }

    /// Rescales each user so that `var(L_i) = 1`.
    pub fn normalized(&self, spec: &SideInfoSpec, rho: f64) -> Result<Self> {
        for v in [self.a1, self.b1, self.a2, self.b2] {
            if !v.is_finite() {
                return Err(Error::invalid("combination coefficients must be finite"));
            }
        }
        if !spec.availability.at_encoders() && (self.b1 != 0.0 || self.b2 != 0.0) {
            return Err(Error::invalid(
                "encoders have no side information, so b1 and b2 must be zero",
            ));
        }
        let (v1, v2) = self.variances(spec, rho);
        if !(v1 > 0.0 && v2 > 0.0) {
            return Err(Error::invalid("each (a_i, b_i) must be nonzero"));
        }
        let (k1, k2) = (v1.sqrt(), v2.sqrt());
        Ok(LinearCombo {
            a1: self.a1 / k1,
            b1: self.b1 / k1,
            a2: self.a2 / k2,
            b2: self.b2 / k2,
        })
    }
}

/// Factors `U1, U2, V1, V2, Q1, Q2` plus `Z1, Z2, L1, L2`; `N` terms are appended per channel.
fn base_model(spec: &SideInfoSpec, combo: &LinearCombo, rho: f64, noise: &[(&str, f64)]) -> Result<LinearModel> {
    spec.validate()?;
    check_rho(rho)?;
    let c = combo.normalized(spec, rho)?;
    let n = 6 + noise.len();
    let mut cov = DMatrix::identity(n, n);
    cov[(0, 1)] = rho;
    cov[(1, 0)] = rho;
    let mut names = vec!["U1", "U2", "V1", "V2", "Q1", "Q2"];
    for (k, (name, var)) in noise.iter().enumerate() {
        names.push(name);
        cov[(6 + k, 6 + k)] = *var;
    }
    let mut m = LinearModel::new(names, cov)?;
    m.define("Z1", &[("U2", spec.s1), ("V1", 1.0)])?;
    m.define("Z2", &[("U1", spec.s2), ("V2", 1.0)])?;
    m.define("L1", &[("U1", c.a1), ("Z1", c.b1)])?;
    m.define("L2", &[("U2", c.a2), ("Z2", c.b2)])?;
    Ok(m)
}

/// Joint law of `(U1, U2, Z1, Z2, L1, L2)` at unit source variances.
pub fn build_si_joint(spec: &SideInfoSpec, combo: &LinearCombo, rho: f64) -> Result<JointGaussian> {
    base_model(spec, combo, rho, &[])?.joint(&["U1", "U2", "Z1", "Z2", "L1", "L2"])
}

fn two_user(channel: &ChannelSpec) -> Result<()> {
    channel.validate()?;
    if let ChannelSpec::SymmetricGmac { .. } = channel {
        return Err(Error::invalid("side information is defined for two-user channels"));
    }
    Ok(())
}

/// Factor model of uncoded transmission of `L_i` at full power, with the
/// labels the decoder observes.
pub fn af_si_model(
    spec: &SideInfoSpec,
    combo: &LinearCombo,
    channel: &ChannelSpec,
    rho: f64,
) -> Result<(LinearModel, Vec<&'static str>)> {
    two_user(channel)?;
    let mut obs: Vec<&'static str> = spec.decoder_labels().to_vec();
    let m = match *channel {
        ChannelSpec::Gmac { p1, p2, noise_var } => {
            let mut m = base_model(spec, combo, rho, &[("N", noise_var)])?;
            m.define("Y", &[("L1", p1.sqrt()), ("L2", p2.sqrt()), ("N", 1.0)])?;
            obs.push("Y");
            m
        }
        ChannelSpec::Orthogonal {
            p1,
            p2,
            noise_var1,
            noise_var2,
        } => {
            let mut m = base_model(spec, combo, rho, &[("N1", noise_var1), ("N2", noise_var2)])?;
            m.define("Y1", &[("L1", p1.sqrt()), ("N1", 1.0)])?;
            m.define("Y2", &[("L2", p2.sqrt()), ("N2", 1.0)])?;
            obs.extend(["Y1", "Y2"]);
            m
        }
        ChannelSpec::SymmetricGmac { .. } => unreachable!(),
    };
    Ok((m, obs))
}

/// Uncoded transmission of `L_i` at full power.
pub fn af_si_distortion(
    spec: &SideInfoSpec,
    combo: &LinearCombo,
    channel: &ChannelSpec,
    rho: f64,
) -> Result<(f64, f64)> {
    let (m, obs) = af_si_model(spec, combo, channel, rho)?;
    let mut names = vec!["U1", "U2"];
    names.extend_from_slice(&obs);
    let j = m.joint(&names)?;
    Ok((
        j.conditional_variance("U1", &obs)?,
        j.conditional_variance("U2", &obs)?,
    ))
}

/// Operating point of a scheme with side information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiOutcome {
    pub combo: LinearCombo,
    pub d1: f64,
    pub d2: f64,
    /// Quantizer rates `I(L_i; W_i)`; zero for uncoded transmission.
    pub r1: f64,
    pub r2: f64,
}

impl SiOutcome {
    pub fn sum(&self) -> f64 {
        self.d1 + self.d2
    }
}

/// Joint angles searched for the encoder combinations. User 1 covers the
/// full circle; user 2 is fixed to `a2 ≥ 0`, since flipping both signs
/// leaves every distortion unchanged.
fn canonical(theta1: f64, theta2: f64) -> (f64, f64) {
    let wrap = |t: f64| (t + PI).rem_euclid(2.0 * PI) - PI;
    let (mut t1, mut t2) = (wrap(theta1), wrap(theta2));
    if t2.cos() < 0.0 {
        t1 = wrap(t1 + PI);
        t2 = wrap(t2 + PI);
    }
    (t1, t2)
}

/// Best combination for uncoded transmission, minimizing `D1 + D2`.
pub fn optimize_af_si(spec: &SideInfoSpec, channel: &ChannelSpec, rho: f64) -> Result<SiOutcome> {
    let eval = |c: &LinearCombo| af_si_distortion(spec, c, channel, rho);
    let base = LinearCombo::uncoded().normalized(spec, rho)?;
    let (d1, d2) = eval(&base)?;
    let mut best = SiOutcome {
        combo: base,
        d1,
        d2,
        r1: 0.0,
        r2: 0.0,
    };
    if !spec.availability.at_encoders() {
        return Ok(best);
    }
    let f = |t: &[f64]| {
        eval(&LinearCombo::from_angles(t[0], t[1])).map_or(f64::INFINITY, |(a, b)| a + b)
    };
    let (n1, n2) = (72, 36);
    let mut grid: Vec<(f64, [f64; 2])> = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            let t = [-PI + 2.0 * PI * i as f64 / n1 as f64, -FRAC_PI_2 + PI * j as f64 / n2 as f64];
            grid.push((f(&t), t));
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut starts: Vec<[f64; 2]> = grid.iter().take(4).map(|g| g.1).collect();
    starts.push([0.0, 0.0]);
    for s in starts {
        let r = nelder_mead(f, &s, 0.05, 1e-15, 2000);
        if r.value < best.sum() {
            let (t1, t2) = canonical(r.x[0], r.x[1]);
            let combo = LinearCombo::from_angles(t1, t2).normalized(spec, rho)?;
            let (d1, d2) = eval(&combo)?;
            if d1 + d2 < best.sum() {
                best = SiOutcome {
                    combo,
                    d1,
                    d2,
                    r1: 0.0,
                    r2: 0.0,
                };
            }
        }
    }
    Ok(best)
}

const RATE_CAP: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coded {
    Sb,
    Lt,
}

/// Rate evaluator for one combination and channel.
struct CodedModel<'a> {
    base: LinearModel,
    channel: &'a ChannelSpec,
    scheme: Coded,
    dec: &'static [&'static str],
}

struct CodedPoint {
    slack: f64,
    d1: f64,
    d2: f64,
}

impl<'a> CodedModel<'a> {
    fn new(
        scheme: Coded,
        spec: &SideInfoSpec,
        combo: &LinearCombo,
        channel: &'a ChannelSpec,
        rho: f64,
    ) -> Result<Self> {
        two_user(channel)?;
        if scheme == Coded::Lt && !matches!(channel, ChannelSpec::Gmac { .. }) {
            return Err(Error::UnsupportedScheme(
                "the correlated-codeword scheme is defined for the multiple-access channel only".into(),
            ));
        }
        let noise_var = match *channel {
            ChannelSpec::Gmac { noise_var, .. } => noise_var,
            _ => 1.0,
        };
        Ok(CodedModel {
            base: base_model(spec, combo, rho, &[("N", noise_var)])?,
            channel,
            scheme,
            dec: spec.decoder_labels(),
        })
    }

    /// Evaluates rates `(r1, r2)`; `z_in_rates` selects whether the decoder
    /// uses `Z` when recovering the codewords.
    fn eval(&self, r1: f64, r2: f64, z_in_rates: bool) -> Result<CodedPoint> {
        let (r1, r2) = (r1.min(RATE_CAP), r2.min(RATE_CAP));
        let mut m = self.base.clone();
        let w = |r: f64| ((1.0 - (-2.0 * r).exp2()).sqrt(), (-r).exp2());
        let (g1, e1) = w(r1);
        let (g2, e2) = w(r2);
        m.define("W1", &[("L1", g1), ("Q1", e1)])?;
        m.define("W2", &[("L2", g2), ("Q2", e2)])?;
        let mut names = vec!["U1", "U2", "Z1", "Z2", "W1", "W2"];
        let lt = match *self.channel {
            ChannelSpec::Gmac { p1, p2, noise_var } if self.scheme == Coded::Lt => {
                m.define("Y", &[("W1", p1.sqrt()), ("W2", p2.sqrt()), ("N", 1.0)])?;
                names.push("Y");
                Some(noise_var)
            }
            _ => None,
        };
        let j = m.joint(&names)?;
        let z: &'static [&'static str] = if z_in_rates { self.dec } else { &[] };
        let with = |extra: &[&'static str]| -> Vec<&'static str> {
            let mut v = extra.to_vec();
            v.extend_from_slice(z);
            v
        };
        // I(L1; W1 | W2, Z) = r1 + ½log2 var(W1 | W2, Z), since var(W1 | L1) = 2^{−2r1}
        let v1 = j.conditional_variance("W1", &with(&["W2"]))?;
        let v2 = j.conditional_variance("W2", &with(&["W1"]))?;
        let l1 = r1 + 0.5 * v1.log2();
        let l2 = r2 + 0.5 * v2.log2();
        let ls = r1 + r2 + 0.5 * (j.log2_det(&with(&["W1", "W2"]))? - j.log2_det(z)?);
        let ls = ls.max(0.0);
        let (c1, c2, cs) = match (*self.channel, lt) {
            (_, Some(nv)) => {
                let (p1, p2) = match *self.channel {
                    ChannelSpec::Gmac { p1, p2, .. } => (p1, p2),
                    _ => unreachable!(),
                };
                (
                    0.5 * (1.0 + p1 * v1 / nv).log2(),
                    0.5 * (1.0 + p2 * v2 / nv).log2(),
                    0.5 * (j.conditional_variance("Y", z)? / nv).log2(),
                )
            }
            (ChannelSpec::Gmac { p1, p2, noise_var }, None) => (
                0.5 * (1.0 + p1 / noise_var).log2(),
                0.5 * (1.0 + p2 / noise_var).log2(),
                0.5 * (1.0 + (p1 + p2) / noise_var).log2(),
            ),
            (
                ChannelSpec::Orthogonal {
                    p1,
                    p2,
                    noise_var1,
                    noise_var2,
                },
                None,
            ) => {
                let c1 = 0.5 * (1.0 + p1 / noise_var1).log2();
                let c2 = 0.5 * (1.0 + p2 / noise_var2).log2();
                (c1, c2, c1 + c2)
            }
            (ChannelSpec::SymmetricGmac { .. }, None) => unreachable!(),
        };
        let slack = (c1 - l1).min(c2 - l2).min(cs - ls);
        let mut obs = vec!["W1", "W2"];
        obs.extend_from_slice(self.dec);
        Ok(CodedPoint {
            slack,
            d1: j.conditional_variance("U1", &obs)?,
            d2: j.conditional_variance("U2", &obs)?,
        })
    }

    fn best(&self, combo: LinearCombo) -> Result<SiOutcome> {
        // a decoder holding Z may still decode the codewords without it
        let modes: &[bool] = if self.dec.is_empty() { &[false] } else { &[true, false] };
        let mut best: Option<SiOutcome> = None;
        for &z_in_rates in modes {
            let p = minimize_on_rate_boundary(
                |r1, r2| self.eval(r1, r2, z_in_rates).map(|p| p.d1 + p.d2),
                |r1, r2| self.eval(r1, r2, z_in_rates).map(|p| p.slack),
                RATE_CAP * std::f64::consts::SQRT_2,
                1e-6,
            )?;
            let pt = self.eval(p.r1, p.r2, z_in_rates)?;
            let out = SiOutcome {
                combo,
                d1: pt.d1,
                d2: pt.d2,
                r1: p.r1.min(RATE_CAP),
                r2: p.r2.min(RATE_CAP),
            };
            if best.map_or(true, |b| out.sum() < b.sum()) {
                best = Some(out);
            }
        }
        Ok(best.expect("at least one decoding mode"))
    }
}

fn coded_distortion(
    scheme: Coded,
    spec: &SideInfoSpec,
    combo: &LinearCombo,
    channel: &ChannelSpec,
    rho: f64,
) -> Result<SiOutcome> {
    let c = combo.normalized(spec, rho)?;
    CodedModel::new(scheme, spec, &c, channel, rho)?.best(c)
}

/// Separation-based scheme with side information at a fixed combination.
pub fn sb_si_distortion(
    spec: &SideInfoSpec,
    combo: &LinearCombo,
    channel: &ChannelSpec,
    rho: f64,
) -> Result<SiOutcome> {
    coded_distortion(Coded::Sb, spec, combo, channel, rho)
}

/// Correlated-codeword scheme with side information at a fixed combination
/// (multiple-access channel only).
pub fn lt_si_distortion(
    spec: &SideInfoSpec,
    combo: &LinearCombo,
    channel: &ChannelSpec,
    rho: f64,
) -> Result<SiOutcome> {
    coded_distortion(Coded::Lt, spec, combo, channel, rho)
}

/// Searches encoder combinations for a coded scheme. Symmetric setups
/// search a common angle; otherwise the common-angle optimum seeds a short
/// two-angle simplex search.
fn optimize_coded(scheme: Coded, spec: &SideInfoSpec, channel: &ChannelSpec, rho: f64) -> Result<SiOutcome> {
    let eval = |c: LinearCombo| coded_distortion(scheme, spec, &c, channel, rho);
    let first = eval(LinearCombo::uncoded())?;
    if !spec.availability.at_encoders() {
        return Ok(first);
    }
    let best = Cell::new(first);
    let err = RefCell::new(None);
    let f = |t1: f64, t2: f64| match eval(LinearCombo::from_angles(t1, t2)) {
        Ok(o) => {
            if o.sum() < best.get().sum() {
                best.set(o);
            }
            o.sum()
        }
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::INFINITY
        }
    };
    let n = 12;
    let h = PI / n as f64;
    let mut scan = (0.0, f64::INFINITY);
    for k in 0..n {
        let t = -FRAC_PI_2 + h * k as f64;
        let v = f(t, t);
        if v < scan.1 {
            scan = (t, v);
        }
    }
    golden_section(|t| f(t, t), scan.0 - h, scan.0 + h, 1e-4);
    let symmetric = spec.s1 == spec.s2
        && match *channel {
            ChannelSpec::Gmac { p1, p2, .. } => p1 == p2,
            ChannelSpec::Orthogonal {
                p1,
                p2,
                noise_var1,
                noise_var2,
            } => p1 == p2 && noise_var1 == noise_var2,
            ChannelSpec::SymmetricGmac { .. } => true,
        };
    if !symmetric {
        let c = best.get().combo;
        let (t1, t2) = (c.b1.atan2(c.a1), c.b2.atan2(c.a2));
        nelder_mead(|t| f(t[0], t[1]), &[t1, t2], 0.1, 1e-10, 60);
    }
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(best.get())
}

pub fn optimize_sb_si(spec: &SideInfoSpec, channel: &ChannelSpec, rho: f64) -> Result<SiOutcome> {
    optimize_coded(Coded::Sb, spec, channel, rho)
}

pub fn optimize_lt_si(spec: &SideInfoSpec, channel: &ChannelSpec, rho: f64) -> Result<SiOutcome> {
    optimize_coded(Coded::Lt, spec, channel, rho)
}

/// Best `D1 + D2` of a scheme under side information.
pub fn optimize_si(scheme: Scheme, spec: &SideInfoSpec, channel: &ChannelSpec, rho: f64) -> Result<SiOutcome> {
    match scheme {
        Scheme::Af => optimize_af_si(spec, channel, rho),
        Scheme::Sb => optimize_sb_si(spec, channel, rho),
        Scheme::Lt => optimize_lt_si(spec, channel, rho),
        Scheme::Nc => Err(Error::UnsupportedScheme(
            "no lower bound is available with side information".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiCompareRow {
    pub scheme: Scheme,
    pub availability: Availability,
    pub d_sum: f64,
}

/// Uncoded and separation-based `D1 + D2` over symmetric orthogonal
/// channels for every availability pattern.
pub fn orth_si_compare(s: f64, snr: f64, rho: f64) -> Result<Vec<SiCompareRow>> {
    let channel = ChannelSpec::symmetric_orthogonal(snr);
    let mut rows = Vec::new();
    for scheme in [Scheme::Af, Scheme::Sb] {
        for availability in Availability::ALL {
            let spec = SideInfoSpec::symmetric(s, availability);
            rows.push(SiCompareRow {
                scheme,
                availability,
                d_sum: optimize_si(scheme, &spec, &channel, rho)?.sum(),
            });
        }
    }
    Ok(rows)
}
