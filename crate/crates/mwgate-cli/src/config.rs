//! Run configuration in flat `key = value` form.
//!
//! Physical quantities carry a unit suffix separated by whitespace
//! (`ic1 = 0.7 uA`); counts, ratios and paths carry none. Values are held in
//! one canonical unit per quantity and written back in that unit, so a
//! parsed file serializes to a form that parses to the same configuration.
//!
//! ```text
//! ic1 = 0.7 uA
//! cap = 26 fF
//! freq = 6.3 GHz
//! grid = 121x121
//! detuning = auto
//! ```

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use mwgate::constants::FLUX_QUANTUM;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: `{key}` needs a unit, one of {expected}")]
    MissingUnit { line: usize, key: String, expected: String },
    #[error("line {line}: `{unit}` is not a unit for `{key}`, use one of {expected}")]
    BadUnit { line: usize, key: String, unit: String, expected: String },
    #[error("line {line}: cannot read `{text}` as a value for `{key}`")]
    BadValue { line: usize, key: String, text: String },
    #[error("{0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, ConfigError>;

/// Unit symbols and their factors into the canonical unit, canonical first.
struct Quantity {
    units: &'static [(&'static str, f64)],
}

const CURRENT: Quantity = Quantity { units: &[("uA", 1.0), ("nA", 1e-3), ("mA", 1e3), ("A", 1e6)] };
const CAPACITANCE: Quantity = Quantity { units: &[("fF", 1.0), ("aF", 1e-3), ("pF", 1e3), ("nF", 1e6)] };
const RESISTANCE: Quantity = Quantity { units: &[("ohm", 1.0), ("kohm", 1e3)] };
const FREQUENCY: Quantity = Quantity { units: &[("GHz", 1.0), ("MHz", 1e-3), ("kHz", 1e-6), ("Hz", 1e-9)] };
const ANGLE: Quantity = Quantity { units: &[("rad", 1.0), ("deg", PI / 180.0)] };
const FLUX: Quantity = Quantity { units: &[("Phi0", 1.0), ("Wb", 1.0 / FLUX_QUANTUM)] };
const DETUNING: Quantity = Quantity { units: &[("Gamma", 1.0)] };

impl Quantity {
    fn canonical(&self) -> &'static str {
        self.units[0].0
    }

    fn listing(&self) -> String {
        self.units.iter().map(|(u, _)| *u).collect::<Vec<_>>().join(", ")
    }
}

/// Everything a subcommand needs besides its own flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Side SQUID critical current in μA.
    pub ic1: f64,
    /// Middle SQUID critical current in μA.
    pub ic2: f64,
    /// SQUID shunt capacitance in fF.
    pub cap: f64,
    /// Line impedance in Ω.
    pub z0: f64,
    /// Drive frequency in GHz.
    pub freq: f64,
    /// Electrical length between SQUIDs in radians.
    pub phi_line: f64,
    /// Side SQUID flux range in Φ0.
    pub flux1: (f64, f64),
    /// Middle SQUID flux range in Φ0.
    pub flux2: (f64, f64),
    /// Flux sweep points along `flux1` and `flux2`.
    pub grid: (usize, usize),
    pub gamma_ratio: f64,
    pub gamma_dt: f64,
    /// Carrier phase per time bin in radians.
    pub carrier_k0: f64,
    /// Detuning in units of Γ; `None` uses the full-transmission point.
    pub detuning: Option<f64>,
    /// Single-photon detuning sweep in units of Γ.
    pub delta: (f64, f64),
    pub delta_points: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            ic1: 0.7,
            ic2: 2.2,
            cap: 26.0,
            z0: 50.0,
            freq: 6.3,
            phi_line: 2.0,
            flux1: (0.0, 1.0),
            flux2: (0.0, 1.0),
            grid: (121, 121),
            gamma_ratio: 0.62,
            gamma_dt: 0.1,
            carrier_k0: PI / 4.0,
            detuning: None,
            delta: (-3.0, 3.0),
            delta_points: 601,
            seed: 1,
            out: PathBuf::from("results"),
        }
    }
}

fn parse_number(key: &str, text: &str, line: usize) -> Result<f64> {
    text.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| ConfigError::BadValue {
        line,
        key: key.into(),
        text: text.into(),
    })
}

fn parse_quantity(key: &str, value: &str, q: &Quantity, line: usize) -> Result<f64> {
    let mut parts = value.split_whitespace();
    let (number, unit) = (parts.next().unwrap_or(""), parts.next());
    let unit = unit.ok_or_else(|| ConfigError::MissingUnit { line, key: key.into(), expected: q.listing() })?;
    if parts.next().is_some() {
        return Err(ConfigError::BadValue { line, key: key.into(), text: value.into() });
    }
    let factor = q
        .units
        .iter()
        .find(|(u, _)| *u == unit)
        .map(|(_, f)| *f)
        .ok_or_else(|| ConfigError::BadUnit { line, key: key.into(), unit: unit.into(), expected: q.listing() })?;
    let v = parse_number(key, number, line)?;
    Ok(if factor == 1.0 { v } else { v * factor })
}

fn parse_plain<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| ConfigError::BadValue { line, key: key.into(), text: value.into() })
}

/// Parses `NxM` into two counts.
pub fn parse_grid(text: &str) -> Option<(usize, usize)> {
    let (a, b) = text.split_once(['x', 'X'])?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl RunConfig {
    /// Parses a configuration file. Keys left out keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            if seen.iter().any(|s| s == key) {
                return Err(ConfigError::Duplicate { line, key: key.into() });
            }
            seen.push(key.into());
            let q = |quantity: &Quantity| parse_quantity(key, value, quantity, line);
            match key {
                "ic1" => cfg.ic1 = q(&CURRENT)?,
                "ic2" => cfg.ic2 = q(&CURRENT)?,
                "cap" => cfg.cap = q(&CAPACITANCE)?,
                "z0" => cfg.z0 = q(&RESISTANCE)?,
                "freq" => cfg.freq = q(&FREQUENCY)?,
                "phi_line" => cfg.phi_line = q(&ANGLE)?,
                "flux1_min" => cfg.flux1.0 = q(&FLUX)?,
                "flux1_max" => cfg.flux1.1 = q(&FLUX)?,
                "flux2_min" => cfg.flux2.0 = q(&FLUX)?,
                "flux2_max" => cfg.flux2.1 = q(&FLUX)?,
                "grid" => {
                    cfg.grid = parse_grid(value).ok_or_else(|| ConfigError::BadValue {
                        line,
                        key: key.into(),
                        text: value.into(),
                    })?
                }
                "gamma_ratio" => cfg.gamma_ratio = parse_number(key, value, line)?,
                "gamma_dt" => cfg.gamma_dt = parse_number(key, value, line)?,
                "carrier_k0" => cfg.carrier_k0 = q(&ANGLE)?,
                "detuning" => cfg.detuning = if value == "auto" { None } else { Some(q(&DETUNING)?) },
                "delta_min" => cfg.delta.0 = q(&DETUNING)?,
                "delta_max" => cfg.delta.1 = q(&DETUNING)?,
                "delta_points" => cfg.delta_points = parse_plain(key, value, line)?,
                "seed" => cfg.seed = parse_plain(key, value, line)?,
                "out" => cfg.out = PathBuf::from(value),
                _ => return Err(ConfigError::UnknownKey { line, key: key.into() }),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks ranges that do not depend on a particular subcommand.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("ic1", self.ic1),
            ("ic2", self.ic2),
            ("cap", self.cap),
            ("z0", self.z0),
            ("freq", self.freq),
            ("gamma_ratio", self.gamma_ratio),
            ("gamma_dt", self.gamma_dt),
            ("carrier_k0", self.carrier_k0),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.phi_line.is_finite() {
            return Err(ConfigError::Invalid("phi_line must be finite".into()));
        }
        for (name, (lo, hi)) in [("flux1", self.flux1), ("flux2", self.flux2), ("delta", self.delta)] {
            if !(lo < hi) {
                return Err(ConfigError::Invalid(format!("{name}_min must be below {name}_max")));
            }
        }
        if self.grid.0 < 2 || self.grid.1 < 2 || self.delta_points < 2 {
            return Err(ConfigError::Invalid("sweeps need at least 2 points per axis".into()));
        }
        if self.gamma_ratio >= 2.0 {
            return Err(ConfigError::Invalid(format!("gamma_ratio must lie in (0, 2), got {}", self.gamma_ratio)));
        }
        if self.out.as_os_str().is_empty() {
            return Err(ConfigError::Invalid("out must name a directory".into()));
        }
        Ok(())
    }

    /// Writes every key in canonical units.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut put = |key: &str, v: f64, q: &Quantity| {
            let _ = writeln!(s, "{key} = {v} {}", q.canonical());
        };
        put("ic1", self.ic1, &CURRENT);
        put("ic2", self.ic2, &CURRENT);
        put("cap", self.cap, &CAPACITANCE);
        put("z0", self.z0, &RESISTANCE);
        put("freq", self.freq, &FREQUENCY);
        put("phi_line", self.phi_line, &ANGLE);
        put("flux1_min", self.flux1.0, &FLUX);
        put("flux1_max", self.flux1.1, &FLUX);
        put("flux2_min", self.flux2.0, &FLUX);
        put("flux2_max", self.flux2.1, &FLUX);
        put("carrier_k0", self.carrier_k0, &ANGLE);
        put("delta_min", self.delta.0, &DETUNING);
        put("delta_max", self.delta.1, &DETUNING);
        let _ = writeln!(s, "grid = {}x{}", self.grid.0, self.grid.1);
        let _ = writeln!(s, "gamma_ratio = {}", self.gamma_ratio);
        let _ = writeln!(s, "gamma_dt = {}", self.gamma_dt);
        match self.detuning {
            Some(d) => {
                let _ = writeln!(s, "detuning = {d} {}", DETUNING.canonical());
            }
            None => s.push_str("detuning = auto\n"),
        }
        let _ = writeln!(s, "delta_points = {}", self.delta_points);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "out = {}", self.out.display());
        s
    }

    /// Device in SI units.
    pub fn device(&self) -> mwgate::Result<mwgate::Device> {
        mwgate::Device::new(
            self.ic1 * 1e-6,
            self.ic2 * 1e-6,
            self.cap * 1e-15,
            self.z0,
            self.phi_line,
            2.0 * PI * self.freq * 1e9,
        )
    }
}
