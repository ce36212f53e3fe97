//! Command-line front end: sweeps, the optimal power table, multi-user and
//! side-information curves, and Monte Carlo checks, all written as CSV.
//!
//! Every flag can also be given in a `key=value` file passed with
//! `--config`; flags win over the file. Keys are the flag names without the
//! leading dashes (`snr-db` and `snr_db` are both accepted). Lines starting
//! with `#` are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::af::{af_distortions, af_multiuser, af_symmetric, AfParams, MultiUserParams};
use crate::bounds::nc_distortion;
use crate::error::{Error, Result};
use crate::lt::{lt_multiuser, lt_optimize_symmetric};
use crate::mc::{simulate_af_gmac, simulate_af_orthogonal, MIN_SAMPLES};
use crate::model::{db_to_linear, ChannelSpec, Scheme};
use crate::orthogonal::{orth_af_distortions, orth_af_symmetric, orth_sb_distortion, OrthParams};
use crate::power::optimize_af_powers;
use crate::sb::{sb_gmac_distortion, sb_multiuser};
use crate::side_info::{optimize_si, Availability, SideInfoSpec};

#[derive(Debug, Parser)]
#[command(name = "jscc", version, about = "Distortion of correlated Gaussian sources over multiple-access and orthogonal channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Symmetric distortion versus SNR for each scheme and correlation.
    Sweep(Options),
    /// Optimal uncoded power allocation for P1 = 10 and ρ = 0.5.
    Table1(Options),
    /// Per-user distortion versus number of users.
    Multiuser(Options),
    /// Optimized D1 + D2 versus side-channel gain.
    Sideinfo(Options),
    /// Monte Carlo check of the uncoded closed forms.
    OracleCheck(Options),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// key=value file with defaults for any flag below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// gmac or orthogonal.
    #[arg(long)]
    pub channel: Option<String>,
    /// Comma-separated subset of af,sb,lt,nc.
    #[arg(long)]
    pub schemes: Option<String>,
    /// Comma-separated correlations in [0, 1).
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<String>,
    /// start:stop:step (inclusive) or a comma-separated list, in dB.
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    pub snr_db: Option<String>,
    /// Comma-separated user counts.
    #[arg(long = "n-users")]
    pub n_users: Option<String>,
    /// Comma-separated subset of none,enc,dec,both.
    #[arg(long)]
    pub si: Option<String>,
    /// Side-channel gains, as start:stop:step or a comma-separated list.
    #[arg(long = "si-gain", allow_hyphen_values = true)]
    pub si_gain: Option<String>,
    /// Add Monte Carlo columns to uncoded rows.
    #[arg(long)]
    pub mc: bool,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Gmac,
    Orthogonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Sweep,
    Table1,
    Multiuser,
    Sideinfo,
    OracleCheck,
}

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub channel: ChannelKind,
    pub schemes: Vec<Scheme>,
    pub rhos: Vec<f64>,
    pub snr_db: Vec<f64>,
    pub n_users: Vec<usize>,
    pub availability: Vec<Availability>,
    pub si_gains: Vec<f64>,
    pub mc: bool,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

const KEYS: [&str; 11] = [
    "channel", "schemes", "rho", "snr-db", "n-users", "si", "si-gain", "mc", "samples", "seed", "out",
];

fn parse_config_file(path: &Path) -> Result<HashMap<String, (String, usize)>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let Some((k, v)) = s.split_once('=') else {
            return Err(Error::config(Some(line), s, "expected key=value"));
        };
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::config(Some(line), &key, "unknown key"));
        }
        if map.insert(key.clone(), (v.trim().to_string(), line)).is_some() {
            return Err(Error::config(Some(line), &key, "duplicate key"));
        }
    }
    Ok(map)
}

struct Source<'a> {
    file: HashMap<String, (String, usize)>,
    opts: &'a Options,
}

impl Source<'_> {
    /// Flag value, else file value with its line, else `None`.
    fn get(&self, key: &str) -> Option<(String, Option<usize>)> {
        let flag = match key {
            "channel" => self.opts.channel.clone(),
            "schemes" => self.opts.schemes.clone(),
            "rho" => self.opts.rho.clone(),
            "snr-db" => self.opts.snr_db.clone(),
            "n-users" => self.opts.n_users.clone(),
            "si" => self.opts.si.clone(),
            "si-gain" => self.opts.si_gain.clone(),
            "mc" => self.opts.mc.then(|| "true".to_string()),
            "samples" => self.opts.samples.clone(),
            "seed" => self.opts.seed.clone(),
            "out" => self.opts.out.as_ref().map(|p| p.display().to_string()),
            _ => None,
        };
        flag.map(|v| (v, None))
            .or_else(|| self.file.get(key).map(|(v, l)| (v.clone(), Some(*l))))
    }

    fn parse<T>(&self, key: &str, default: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> Result<T> {
        let (v, line) = self.get(key).unwrap_or_else(|| (default.to_string(), None));
        f(&v).map_err(|m| Error::config(line, key, m))
    }
}

fn list<T>(s: &str, item: impl Fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    let v: Vec<T> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(item)
        .collect::<std::result::Result<_, _>>()?;
    if v.is_empty() {
        return Err("empty list".into());
    }
    Ok(v)
}

fn number(s: &str) -> std::result::Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a finite number")),
    }
}

fn rho_value(s: &str) -> std::result::Result<f64, String> {
    let r = number(s)?;
    if !(0.0..1.0).contains(&r) {
        return Err(format!("correlation {r} is outside [0, 1)"));
    }
    Ok(r)
}

fn gain_value(g: f64) -> std::result::Result<f64, String> {
    if g < 0.0 {
        return Err(format!("gain {g} is negative"));
    }
    Ok(g)
}

/// `start:stop:step` (inclusive, `step > 0`) or a comma-separated list.
pub fn parse_range(s: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [_] => list(s, number),
        [a, b, c] => {
            let (start, stop, step) = (number(a)?, number(b)?, number(c)?);
            if step <= 0.0 {
                return Err(format!("step must be > 0, got {step}"));
            }
            if stop < start {
                return Err(format!("empty range {start}:{stop}"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..n).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(format!("`{s}` is neither start:stop:step nor a list")),
    }
}

fn bool_value(s: &str) -> std::result::Result<bool, String> {
    match s.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(format!("`{other}` is not a boolean")),
    }
}

fn resolve(opts: &Options, kind: Kind) -> Result<SweepConfig> {
    let file = match &opts.config {
        Some(p) => parse_config_file(p)?,
        None => HashMap::new(),
    };
    let src = Source { file, opts };

    let channel = src.parse("channel", "gmac", |s| match s.trim() {
        "gmac" => Ok(ChannelKind::Gmac),
        "orthogonal" => Ok(ChannelKind::Orthogonal),
        other => Err(format!("unknown channel `{other}` (expected gmac or orthogonal)")),
    })?;
    let allowed: &[Scheme] = match (kind, channel) {
        (Kind::Multiuser, _) => &[Scheme::Af, Scheme::Sb, Scheme::Lt],
        (_, ChannelKind::Orthogonal) => &[Scheme::Af, Scheme::Sb],
        (Kind::Sideinfo, ChannelKind::Gmac) => &[Scheme::Af, Scheme::Sb, Scheme::Lt],
        _ => &Scheme::ALL,
    };
    let default_schemes = allowed.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(",");
    let schemes = src.parse("schemes", &default_schemes, |s| {
        let mut v: Vec<Scheme> = Vec::new();
        for t in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let sc: Scheme = t.parse()?;
            if !allowed.contains(&sc) {
                return Err(format!("scheme `{sc}` is not available for this command and channel"));
            }
            if !v.contains(&sc) {
                v.push(sc);
            }
        }
        if v.is_empty() {
            return Err("no schemes selected".into());
        }
        Ok(v)
    })?;

    let (rho_default, snr_default) = match kind {
        Kind::Sweep => ("0.1,0.75", "-20:40:1"),
        Kind::Multiuser => ("0.8", "-20:20:1"),
        Kind::Sideinfo => ("0.5", "0"),
        Kind::OracleCheck => ("0,0.5,0.9", "-10,0,10,30"),
        Kind::Table1 => ("0.5", "0"),
    };
    let rhos = src.parse("rho", rho_default, |s| list(s, rho_value))?;
    if kind == Kind::Multiuser && rhos.len() != 1 {
        let line = src.get("rho").and_then(|(_, l)| l);
        return Err(Error::config(line, "rho", "multiuser takes a single correlation"));
    }
    let snr_db = src.parse("snr-db", snr_default, parse_range)?;
    let n_users = src.parse("n-users", "1,2,3,4,5,6,7,8,9,10", |s| {
        list(s, |t| match t.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(format!("`{t}` is not a positive user count")),
        })
    })?;
    let availability = src.parse("si", "none,enc,dec,both", |s| list(s, |t| t.parse::<Availability>()))?;
    let si_gains = src.parse("si-gain", "0,0.25,0.5,1,2,4", |s| {
        parse_range(s)?.into_iter().map(gain_value).collect()
    })?;
    let mc = src.parse("mc", "false", bool_value)?;
    let default_samples = if kind == Kind::OracleCheck { "1000000" } else { "100000" };
    let samples = src.parse("samples", default_samples, |s| match s.trim().parse::<usize>() {
        Ok(n) if n >= MIN_SAMPLES => Ok(n),
        _ => Err(format!("`{s}` is not an integer >= {MIN_SAMPLES}")),
    })?;
    let seed = src.parse("seed", "1", |s| s.trim().parse::<u64>().map_err(|e| format!("`{s}`: {e}")))?;
    let out = src.get("out").map(|(v, _)| PathBuf::from(v));

    Ok(SweepConfig {
        channel,
        schemes,
        rhos,
        snr_db,
        n_users,
        availability,
        si_gains,
        mc,
        samples,
        seed,
        out,
    })
}

/// Six significant digits with trailing zeros removed; scientific notation
/// below `1e-4` and from `1e6` on.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if !(1e-4..1e6).contains(&a) {
        let s = format!("{x:.5e}");
        let (m, e) = s.split_once('e').expect("exponent");
        let m = if m.contains('.') { m.trim_end_matches('0').trim_end_matches('.') } else { m };
        return format!("{m}e{e}");
    }
    let decimals = (5 - a.log10().floor() as i32).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Symmetric unit-variance distortion of one scheme.
pub fn symmetric_distortion(channel: ChannelKind, scheme: Scheme, snr: f64, rho: f64) -> Result<f64> {
    match (channel, scheme) {
        (ChannelKind::Gmac, Scheme::Af) => af_symmetric(snr, rho, 1.0),
        (ChannelKind::Gmac, Scheme::Sb) => sb_gmac_distortion(snr, rho),
        (ChannelKind::Gmac, Scheme::Lt) => Ok(lt_optimize_symmetric(snr, rho)?.d),
        (ChannelKind::Gmac, Scheme::Nc) => nc_distortion(snr, rho, 1.0),
        (ChannelKind::Orthogonal, Scheme::Af) => orth_af_symmetric(snr, rho),
        (ChannelKind::Orthogonal, Scheme::Sb) => orth_sb_distortion(snr, rho),
        (ChannelKind::Orthogonal, s) => Err(Error::UnsupportedScheme(format!("{s} on orthogonal channels"))),
    }
}

fn seed_for(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

pub fn sweep_csv(cfg: &SweepConfig) -> Result<String> {
    let mut tasks = Vec::new();
    for &db in &cfg.snr_db {
        for &rho in &cfg.rhos {
            for &scheme in &cfg.schemes {
                tasks.push((db, rho, scheme));
            }
        }
    }
    let rows: Vec<String> = tasks
        .par_iter()
        .enumerate()
        .map(|(i, &(db, rho, scheme))| {
            let snr = db_to_linear(db);
            let d = symmetric_distortion(cfg.channel, scheme, snr, rho)?;
            let mut row = format!("{},{},{},{}", fmt_num(db), fmt_num(rho), scheme, fmt_num(d));
            if cfg.mc {
                if scheme == Scheme::Af {
                    let seed = seed_for(cfg.seed, i);
                    let r = match cfg.channel {
                        ChannelKind::Gmac => simulate_af_gmac(&AfParams::symmetric(snr, rho), cfg.samples, seed)?,
                        ChannelKind::Orthogonal => {
                            simulate_af_orthogonal(&OrthParams::symmetric(snr, rho), cfg.samples, seed)?
                        }
                    };
                    let _ = write!(row, ",{},{}", fmt_num(r.d1_hat), fmt_num(r.stderr1));
                } else {
                    row.push_str(",,");
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut out = String::from("snr_db,rho,scheme,D");
    if cfg.mc {
        out.push_str(",D_mc,stderr");
    }
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub p1: f64,
    pub p2: f64,
    pub a_star: f64,
    pub b_star: f64,
    pub d_min: f64,
}

pub const TABLE1_POWERS: [(f64, f64); 4] = [(10.0, 1.0), (10.0, 5.0), (10.0, 20.0), (10.0, 50.0)];
pub const TABLE1_RHO: f64 = 0.5;

/// Minimum of `D1 + D2` over the power box for each row of the table.
pub fn table1_rows() -> Result<Vec<Table1Row>> {
    TABLE1_POWERS
        .iter()
        .map(|&(p1, p2)| {
            let s = optimize_af_powers(p1, p2, TABLE1_RHO, 1.0, 1.0)?;
            Ok(Table1Row {
                p1,
                p2,
                a_star: s.a_star,
                b_star: s.b_star,
                d_min: s.d_min,
            })
        })
        .collect()
}

pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut out = String::from("P1,P2,a_star,b_star,D_min\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(r.p1),
            fmt_num(r.p2),
            fmt_num(r.a_star),
            fmt_num(r.b_star),
            fmt_num(r.d_min)
        );
    }
    out
}

pub fn table1_text(rows: &[Table1Row]) -> String {
    let mut out = format!("{:>6} {:>6} {:>8} {:>8} {:>8}\n", "P1", "P2", "a*", "b*", "D_min");
    for r in rows {
        let _ = writeln!(
            out,
            "{:>6.0} {:>6.0} {:>8.2} {:>8.2} {:>8.4}",
            r.p1, r.p2, r.a_star, r.b_star, r.d_min
        );
    }
    out
}

pub fn multiuser_csv(cfg: &SweepConfig) -> Result<String> {
    let rho = cfg.rhos[0];
    let mut tasks = Vec::new();
    for &db in &cfg.snr_db {
        for &n in &cfg.n_users {
            for &scheme in &cfg.schemes {
                tasks.push((db, n, scheme));
            }
        }
    }
    let rows: Vec<String> = tasks
        .par_iter()
        .map(|&(db, n, scheme)| {
            let snr = db_to_linear(db);
            let d = match scheme {
                Scheme::Af => af_multiuser(&MultiUserParams {
                    n_users: n,
                    power: snr,
                    rho,
                    noise_var: 1.0,
                })?,
                Scheme::Sb => sb_multiuser(n, snr, rho)?,
                Scheme::Lt => lt_multiuser(n, snr, rho)?,
                Scheme::Nc => return Err(Error::UnsupportedScheme("nc with more than two users".into())),
            };
            Ok(format!("{},{},{},{}", fmt_num(db), n, scheme, fmt_num(d)))
        })
        .collect::<Result<_>>()?;
    Ok(std::iter::once("snr_db,N,scheme,D".to_string())
        .chain(rows)
        .map(|r| r + "\n")
        .collect())
}

pub fn sideinfo_csv(cfg: &SweepConfig) -> Result<String> {
    let mut tasks = Vec::new();
    for &db in &cfg.snr_db {
        for &rho in &cfg.rhos {
            for &s in &cfg.si_gains {
                for &scheme in &cfg.schemes {
                    for &av in &cfg.availability {
                        tasks.push((db, rho, s, scheme, av));
                    }
                }
            }
        }
    }
    let rows: Vec<String> = tasks
        .par_iter()
        .map(|&(db, rho, s, scheme, av)| {
            let snr = db_to_linear(db);
            let channel = match cfg.channel {
                ChannelKind::Gmac => ChannelSpec::symmetric_gmac(snr),
                ChannelKind::Orthogonal => ChannelSpec::symmetric_orthogonal(snr),
            };
            let r = optimize_si(scheme, &SideInfoSpec::symmetric(s, av), &channel, rho)?;
            Ok(format!(
                "{},{},{},{},{},{}",
                fmt_num(db),
                fmt_num(rho),
                fmt_num(s),
                scheme,
                av,
                fmt_num(r.sum())
            ))
        })
        .collect::<Result<_>>()?;
    Ok(std::iter::once("snr_db,rho,s,scheme,availability,D_sum".to_string())
        .chain(rows)
        .map(|r| r + "\n")
        .collect())
}

/// Simulated against closed-form uncoded distortions on both channels; a
/// row passes when the difference is within three standard errors.
pub fn oracle_check_csv(cfg: &SweepConfig) -> Result<(String, bool)> {
    let mut tasks = Vec::new();
    for &db in &cfg.snr_db {
        for &rho in &cfg.rhos {
            for ch in [ChannelKind::Gmac, ChannelKind::Orthogonal] {
                tasks.push((db, rho, ch));
            }
        }
    }
    let rows: Vec<(String, bool)> = tasks
        .par_iter()
        .enumerate()
        .map(|(i, &(db, rho, ch))| {
            let snr = db_to_linear(db);
            let seed = seed_for(cfg.seed, i);
            let (name, (d1, d2), r) = match ch {
                ChannelKind::Gmac => {
                    let p = AfParams::symmetric(snr, rho);
                    ("gmac", af_distortions(&p)?, simulate_af_gmac(&p, cfg.samples, seed)?)
                }
                ChannelKind::Orthogonal => {
                    let p = OrthParams::symmetric(snr, rho);
                    ("orthogonal", orth_af_distortions(&p)?, simulate_af_orthogonal(&p, cfg.samples, seed)?)
                }
            };
            let mut text = String::new();
            let mut ok = true;
            for (user, d, dh, se) in [(1, d1, r.d1_hat, r.stderr1), (2, d2, r.d2_hat, r.stderr2)] {
                let z = (dh - d) / se;
                let pass = z.abs() <= 3.0;
                ok &= pass;
                let _ = writeln!(
                    text,
                    "{name},{},{},{user},{},{},{},{},{}",
                    fmt_num(db),
                    fmt_num(rho),
                    fmt_num(d),
                    fmt_num(dh),
                    fmt_num(se),
                    fmt_num(z),
                    if pass { "pass" } else { "fail" }
                );
            }
            Ok((text, ok))
        })
        .collect::<Result<_>>()?;
    let mut out = String::from("channel,snr_db,rho,user,D,D_mc,stderr,z,result\n");
    let mut all = true;
    for (t, ok) in rows {
        out.push_str(&t);
        all &= ok;
    }
    Ok((out, all))
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs one subcommand. Returns `false` when an oracle check failed.
pub fn run(command: &Command, stdout: &mut dyn Write) -> Result<bool> {
    match command {
        Command::Sweep(o) => {
            let cfg = resolve(o, Kind::Sweep)?;
            emit(&sweep_csv(&cfg)?, cfg.out.as_deref(), stdout)?;
        }
        Command::Table1(o) => {
            let cfg = resolve(o, Kind::Table1)?;
            let rows = table1_rows()?;
            stdout.write_all(table1_text(&rows).as_bytes())?;
            if let Some(p) = &cfg.out {
                std::fs::write(p, table1_csv(&rows))?;
            }
        }
        Command::Multiuser(o) => {
            let cfg = resolve(o, Kind::Multiuser)?;
            emit(&multiuser_csv(&cfg)?, cfg.out.as_deref(), stdout)?;
        }
        Command::Sideinfo(o) => {
            let cfg = resolve(o, Kind::Sideinfo)?;
            emit(&sideinfo_csv(&cfg)?, cfg.out.as_deref(), stdout)?;
        }
        Command::OracleCheck(o) => {
            let cfg = resolve(o, Kind::OracleCheck)?;
            let (text, ok) = oracle_check_csv(&cfg)?;
            emit(&text, cfg.out.as_deref(), stdout)?;
            return Ok(ok);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> Options {
        Options::default()
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-20.0), "-20");
        assert_eq!(fmt_num(0.75), "0.75");
        assert_eq!(fmt_num(0.676012345), "0.676012");
        assert_eq!(fmt_num(17.014712), "17.0147");
        assert_eq!(fmt_num(123456.7), "123457");
        assert_eq!(fmt_num(5e-5), "5e-5");
        assert_eq!(fmt_num(1.234567e-7), "1.23457e-7");
        assert_eq!(fmt_num(2.5e7), "2.5e7");
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-20:40:10").unwrap(), vec![-20.0, -10.0, 0.0, 10.0, 20.0, 30.0, 40.0]);
        assert_eq!(parse_range("0:1:0.25").unwrap().len(), 5);
        assert_eq!(parse_range("3,1").unwrap(), vec![3.0, 1.0]);
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("1:0:1").is_err());
        assert!(parse_range("1:2").is_err());
    }

    #[test]
    fn empty_scheme_set_is_config_error() {
        let o = Options {
            schemes: Some(",".into()),
            ..opts()
        };
        match resolve(&o, Kind::Sweep) {
            Err(Error::Config(c)) => assert_eq!(c.field, "schemes"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn orthogonal_rejects_lt() {
        let o = Options {
            channel: Some("orthogonal".into()),
            schemes: Some("af,lt".into()),
            ..opts()
        };
        assert!(matches!(resolve(&o, Kind::Sweep), Err(Error::Config(_))));
        let o = Options {
            channel: Some("orthogonal".into()),
            ..opts()
        };
        assert_eq!(resolve(&o, Kind::Sweep).unwrap().schemes, vec![Scheme::Af, Scheme::Sb]);
    }

    #[test]
    fn config_file_and_override() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# comment\nrho = 0.3\nsnr_db=0:10:5\nschemes=af\n").unwrap();
        let o = Options {
            config: Some(path.clone()),
            schemes: Some("sb,nc".into()),
            ..opts()
        };
        let c = resolve(&o, Kind::Sweep).unwrap();
        assert_eq!(c.rhos, vec![0.3]);
        assert_eq!(c.snr_db, vec![0.0, 5.0, 10.0]);
        assert_eq!(c.schemes, vec![Scheme::Sb, Scheme::Nc]);

        std::fs::write(&path, "rho=0.3\nrho=1.5\n").unwrap();
        match resolve(&Options { config: Some(path.clone()), ..opts() }, Kind::Sweep) {
            Err(Error::Config(c)) => assert_eq!((c.line, c.field.as_str()), (Some(2), "rho")),
            other => panic!("{other:?}"),
        }
        std::fs::write(&path, "\n\nspeed=3\n").unwrap();
        match resolve(&Options { config: Some(path.clone()), ..opts() }, Kind::Sweep) {
            Err(Error::Config(c)) => assert_eq!(c.line, Some(3)),
            other => panic!("{other:?}"),
        }
        std::fs::write(&path, "rho=1.5\n").unwrap();
        match resolve(&Options { config: Some(path), ..opts() }, Kind::Sweep) {
            Err(Error::Config(c)) => assert_eq!((c.line, c.field.as_str()), (Some(1), "rho")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweep_rows_in_grid_order() {
        let o = Options {
            rho: Some("0.1,0.75".into()),
            snr_db: Some("-20:40:30".into()),
            ..opts()
        };
        let cfg = resolve(&o, Kind::Sweep).unwrap();
        let csv = sweep_csv(&cfg).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "snr_db,rho,scheme,D");
        assert_eq!(lines.len(), 1 + 3 * 2 * 4);
        assert!(lines[1].starts_with("-20,0.1,af,"));
        assert!(lines[5].starts_with("-20,0.75,af,"));
        assert!(lines[24].starts_with("40,0.75,nc,"));
        for l in &lines[1..] {
            let d: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
            assert!(d > 0.0 && d <= 1.0);
        }
        assert_eq!(csv, sweep_csv(&cfg).unwrap());
    }

    #[test]
    fn multiuser_single_user_and_two_user_match() {
        let o = Options {
            snr_db: Some("-10,10".into()),
            n_users: Some("1,2".into()),
            schemes: Some("af".into()),
            ..opts()
        };
        let cfg = resolve(&o, Kind::Multiuser).unwrap();
        let csv = multiuser_csv(&cfg).unwrap();
        for line in csv.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            let snr = db_to_linear(f[0].parse().unwrap());
            let d: f64 = f[3].parse().unwrap();
            let want = if f[1] == "1" {
                1.0 / (1.0 + snr)
            } else {
                af_symmetric(snr, 0.8, 1.0).unwrap()
            };
            assert!((d - want).abs() <= 5e-6 * want, "{line}");
        }
        let o = Options {
            rho: Some("0.1,0.2".into()),
            ..opts()
        };
        assert!(matches!(resolve(&o, Kind::Multiuser), Err(Error::Config(_))));
    }

    #[test]
    fn table_is_deterministic() {
        let a = table1_csv(&table1_rows().unwrap());
        assert_eq!(a, table1_csv(&table1_rows().unwrap()));
        assert_eq!(a.lines().count(), 5);
    }

    #[test]
    fn mc_columns_only_on_uncoded_rows() {
        let o = Options {
            rho: Some("0.5".into()),
            snr_db: Some("0".into()),
            schemes: Some("af,sb".into()),
            mc: true,
            samples: Some("200000".into()),
            ..opts()
        };
        let cfg = resolve(&o, Kind::Sweep).unwrap();
        let csv = sweep_csv(&cfg).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "snr_db,rho,scheme,D,D_mc,stderr");
        let f: Vec<f64> = lines[1].split(',').skip(3).map(|x| x.parse().unwrap()).collect();
        assert!((f[0] - f[1]).abs() <= 3.0 * f[2]);
        assert!(lines[2].ends_with(",,"));
        assert_eq!(csv, sweep_csv(&cfg).unwrap());
    }
}
