//! Run configuration: config-file parsing, flag overlay and sweep axes.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use swapengine::finite_time::FiniteTimeParams;
use swapengine::{thermal, EngineParams64, FiniteTimeParams64};

use crate::CliError;

/// Every key accepted in a config file or as a `--key` flag (dashes for underscores).
pub const KEYS: &[(&str, &str)] = &[
    ("d", "qudit dimension"),
    ("omega_a", "level spacing of the hot qudit"),
    ("omega_b", "level spacing of the cold qudit"),
    ("omega_ratio", "sets omega_b = omega_ratio * omega_a"),
    ("beta_a", "hot-bath inverse temperature"),
    ("beta_b", "cold-bath inverse temperature"),
    ("t_a", "hot-bath temperature"),
    ("t_b", "cold-bath temperature"),
    ("x_a", "product beta_a * omega_a"),
    ("x_b", "product beta_b * omega_b"),
    ("n_a", "thermal occupation of the hot qudit"),
    ("n_b", "thermal occupation of the cold qudit"),
    ("theta", "swap angle in radians"),
    ("theta_pi", "swap angle in units of pi"),
    ("alpha", "relaxation rate of both qudits"),
    ("alpha_a", "relaxation rate of the hot qudit"),
    ("alpha_b", "relaxation rate of the cold qudit"),
    ("tau_q", "thermal stroke duration"),
    ("alpha_tau", "thermal stroke duration in units of 1/alpha_a"),
    ("tau_w", "swap stroke duration"),
    ("tb_over_ta", "temperature ratio T_b/T_a for max-work"),
    ("lambda", "work counting parameter for charfn"),
    ("mu", "heat counting parameter for charfn"),
    ("mode", "subcommand variant (tur-scan: grid|extremum|region; finite-time: power|snr|state)"),
    ("pin", "fixed beta_a*omega_a for the violation extremum search"),
    ("threshold", "z-score limit for mc-validate"),
    ("samples", "Monte Carlo sample count"),
    ("seed", "Monte Carlo seed"),
    ("sample_theta", "swap angle used only by the sampler"),
    ("sample_beta_a", "hot inverse temperature used only by the sampler"),
    ("sample_beta_b", "cold inverse temperature used only by the sampler"),
    ("format", "csv or json"),
    ("output", "output file (stdout when absent)"),
    ("axis", "sweep axis: name:min:max:points[:lin|log] or name=v1,v2,..."),
];

pub const SWEEPABLE: &[&str] = &[
    "d",
    "omega_a",
    "omega_b",
    "omega_ratio",
    "beta_a",
    "beta_b",
    "t_a",
    "t_b",
    "x_a",
    "x_b",
    "n_a",
    "n_b",
    "theta",
    "theta_pi",
    "alpha",
    "alpha_a",
    "alpha_b",
    "tau_q",
    "alpha_tau",
    "tau_w",
    "tb_over_ta",
    "lambda",
    "mu",
    "pin",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Spacing {
    Absolute(f64),
    Ratio(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Temperature {
    Beta(f64),
    T(f64),
    Product(f64),
    Occupation(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum StrokeTime {
    Absolute(f64),
    Scaled(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Parses a decimal, `inf`, or a fraction `p/q`.
pub fn parse_number(raw: &str) -> Result<f64, CliError> {
    let s = raw.trim();
    let bad = || CliError::input(format!("not a number: {raw:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q): (f64, f64) = (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?);
            if q == 0.0 {
                return Err(bad());
            }
            Ok(p / q)
        }
        None => s.parse().map_err(|_| bad()),
    }
}

fn parse_count(key: &str, raw: &str) -> Result<u64, CliError> {
    let v = parse_number(raw)?;
    if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
        return Err(CliError::input(format!("{key} must be a nonnegative integer, got {raw:?}")));
    }
    Ok(v as u64)
}

impl Axis {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let spec = spec.trim();
        if let Some((name, list)) = spec.split_once('=') {
            let name = check_axis_name(name.trim())?;
            let values = list.split(',').map(parse_number).collect::<Result<Vec<_>, _>>()?;
            if values.len() < 2 || values.iter().all(|v| *v == values[0]) {
                return Err(CliError::input(format!("axis {name} needs at least 2 distinct values")));
            }
            return Ok(Self { name, values });
        }
        let parts: Vec<&str> = spec.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(CliError::input(format!(
                "axis {spec:?} must be name:min:max:points[:lin|log] or name=v1,v2,..."
            )));
        }
        let name = check_axis_name(parts[0].trim())?;
        let (lo, hi) = (parse_number(parts[1])?, parse_number(parts[2])?);
        let points = parse_count("points", parts[3])? as usize;
        let log = match parts.get(4).map(|s| s.trim()) {
            None | Some("lin") => false,
            Some("log") => true,
            Some(other) => return Err(CliError::input(format!("axis spacing must be lin or log, got {other:?}"))),
        };
        if points < 2 {
            return Err(CliError::input(format!("axis {name} needs at least 2 points")));
        }
        if lo == hi || !lo.is_finite() || !hi.is_finite() {
            return Err(CliError::input(format!("axis {name} needs distinct finite ends")));
        }
        if log && (lo <= 0.0 || hi <= 0.0) {
            return Err(CliError::input(format!("log axis {name} needs positive ends")));
        }
        let values = (0..points)
            .map(|i| {
                let t = i as f64 / (points - 1) as f64;
                if log {
                    (lo.ln() + (hi.ln() - lo.ln()) * t).exp()
                } else {
                    lo + (hi - lo) * t
                }
            })
            .collect();
        Ok(Self { name, values })
    }
}

fn check_axis_name(name: &str) -> Result<String, CliError> {
    if SWEEPABLE.contains(&name) {
        Ok(name.to_string())
    } else {
        Err(CliError::input(format!(
            "unknown axis {name:?}; sweepable: {}",
            SWEEPABLE.join(", ")
        )))
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub command: Option<String>,
    d: usize,
    omega_a: f64,
    omega_b: Spacing,
    temp_a: Temperature,
    temp_b: Temperature,
    theta: f64,
    alpha_a: f64,
    alpha_b: f64,
    tau_q: StrokeTime,
    tau_w: f64,
    pub tb_over_ta: f64,
    pub lambda: f64,
    pub mu: f64,
    pub mode: Option<String>,
    pub pin: f64,
    pub threshold: f64,
    pub samples: u64,
    pub seed: u64,
    pub sample_overrides: BTreeMap<String, f64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub axes: Vec<Axis>,
    /// Effective `key = value` pairs, echoed into JSON output.
    record: BTreeMap<String, Vec<String>>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            command: None,
            d: 4,
            omega_a: 1.0,
            omega_b: Spacing::Absolute(0.6),
            temp_a: Temperature::Beta(0.5),
            temp_b: Temperature::Beta(1.0),
            theta: PI / 2.0,
            alpha_a: 1.0,
            alpha_b: 1.0,
            tau_q: StrokeTime::Absolute(1.0),
            tau_w: 0.0,
            tb_over_ta: 0.5,
            lambda: 0.0,
            mu: 0.0,
            mode: None,
            pin: swapengine::analysis::VIOLATION_PIN,
            threshold: 5.0,
            samples: 1_000_000,
            seed: 0,
            sample_overrides: BTreeMap::new(),
            format: None,
            output: None,
            axes: Vec::new(),
            record: BTreeMap::new(),
        }
    }
}

/// Keys that overwrite one another.
const FAMILIES: &[&[&str]] = &[
    &["omega_b", "omega_ratio"],
    &["beta_a", "t_a", "x_a", "n_a"],
    &["beta_b", "t_b", "x_b", "n_b"],
    &["theta", "theta_pi"],
    &["tau_q", "alpha_tau"],
];

impl Settings {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), CliError> {
        let num = || parse_number(raw);
        match key {
            "command" => self.command = Some(raw.trim().to_string()),
            "d" => {
                let d = parse_count(key, raw)?;
                self.d = usize::try_from(d).map_err(|_| CliError::input("d too large"))?;
            }
            "omega_a" => self.omega_a = num()?,
            "omega_b" => self.omega_b = Spacing::Absolute(num()?),
            "omega_ratio" => self.omega_b = Spacing::Ratio(num()?),
            "beta_a" => self.temp_a = Temperature::Beta(num()?),
            "beta_b" => self.temp_b = Temperature::Beta(num()?),
            "t_a" => self.temp_a = Temperature::T(num()?),
            "t_b" => self.temp_b = Temperature::T(num()?),
            "x_a" => self.temp_a = Temperature::Product(num()?),
            "x_b" => self.temp_b = Temperature::Product(num()?),
            "n_a" => self.temp_a = Temperature::Occupation(num()?),
            "n_b" => self.temp_b = Temperature::Occupation(num()?),
            "theta" => self.theta = num()?,
            "theta_pi" => self.theta = num()? * PI,
            "alpha" => {
                let a = num()?;
                self.alpha_a = a;
                self.alpha_b = a;
            }
            "alpha_a" => self.alpha_a = num()?,
            "alpha_b" => self.alpha_b = num()?,
            "tau_q" => self.tau_q = StrokeTime::Absolute(num()?),
            "alpha_tau" => self.tau_q = StrokeTime::Scaled(num()?),
            "tau_w" => self.tau_w = num()?,
            "tb_over_ta" => self.tb_over_ta = num()?,
            "lambda" => self.lambda = num()?,
            "mu" => self.mu = num()?,
            "mode" => self.mode = Some(raw.trim().to_string()),
            "pin" => self.pin = num()?,
            "threshold" => self.threshold = num()?,
            "samples" => self.samples = parse_count(key, raw)?,
            "seed" => self.seed = parse_count(key, raw)?,
            "sample_theta" | "sample_beta_a" | "sample_beta_b" => {
                self.sample_overrides.insert(key.to_string(), num()?);
            }
            "format" => {
                self.format = Some(match raw.trim() {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    other => return Err(CliError::input(format!("format must be csv or json, got {other:?}"))),
                })
            }
            "output" => self.output = Some(PathBuf::from(raw.trim())),
            "axis" => {
                let axis = Axis::parse(raw)?;
                if self.axes.iter().any(|a| a.name == axis.name) {
                    return Err(CliError::input(format!("axis {} given twice", axis.name)));
                }
                self.axes.push(axis);
                self.record.entry(key.to_string()).or_default().push(raw.trim().to_string());
                return Ok(());
            }
            other => return Err(CliError::input(format!("unknown key {other:?}"))),
        }
        match key {
            "alpha" => {
                self.record.remove("alpha_a");
                self.record.remove("alpha_b");
            }
            "alpha_a" | "alpha_b" => {
                if let Some(shared) = self.record.remove("alpha") {
                    let other = if key == "alpha_a" { "alpha_b" } else { "alpha_a" };
                    self.record.insert(other.to_string(), shared);
                }
            }
            _ => {}
        }
        for family in FAMILIES.iter().filter(|f| f.contains(&key)) {
            for k in family.iter() {
                self.record.remove(*k);
            }
        }
        self.record.insert(key.to_string(), vec![raw.trim().to_string()]);
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn load_file(&mut self, text: &str) -> Result<(), CliError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::input(format!("config line {}: expected key = value", i + 1)))?;
            let key = key.trim().replace('-', "_");
            self.set(&key, value.trim())
                .map_err(|e| CliError::input(format!("config line {}: {}", i + 1, e.message)))?;
        }
        Ok(())
    }

    pub fn record(&self) -> &BTreeMap<String, Vec<String>> {
        &self.record
    }

    /// One settings value per point of the axis product grid, first axis outermost.
    pub fn grid(&self) -> Result<Vec<(Vec<f64>, Settings)>, CliError> {
        let mut points = vec![(Vec::new(), self.clone())];
        for axis in &self.axes {
            let mut next = Vec::with_capacity(points.len() * axis.values.len());
            for (coords, s) in &points {
                for &v in &axis.values {
                    let mut s = s.clone();
                    s.set_value(&axis.name, v)?;
                    let mut c = coords.clone();
                    c.push(v);
                    next.push((c, s));
                }
            }
            points = next;
        }
        Ok(points)
    }

    fn set_value(&mut self, key: &str, v: f64) -> Result<(), CliError> {
        let raw = if v.is_infinite() { "inf".to_string() } else { format!("{v:?}") };
        if key == "d" && (v.fract() != 0.0 || v < 0.0) {
            return Err(CliError::input(format!("axis d needs integer values, got {v}")));
        }
        let raw = if key == "d" { format!("{}", v as u64) } else { raw };
        self.set(key, &raw)
    }

    fn omega_b(&self) -> f64 {
        match self.omega_b {
            Spacing::Absolute(w) => w,
            Spacing::Ratio(r) => r * self.omega_a,
        }
    }

    fn beta(&self, t: Temperature, omega: f64) -> Result<f64, CliError> {
        Ok(match t {
            Temperature::Beta(b) => b,
            Temperature::T(t) => 1.0 / t,
            Temperature::Product(x) => x / omega,
            Temperature::Occupation(n) => thermal::mean_occupation_inverse(n, self.d)? / omega,
        })
    }

    pub fn engine(&self) -> Result<EngineParams64, CliError> {
        let omega_b = self.omega_b();
        let beta_a = self.beta(self.temp_a, self.omega_a)?;
        let beta_b = self.beta(self.temp_b, omega_b)?;
        Ok(EngineParams64::new(self.d, self.omega_a, omega_b, beta_a, beta_b, self.theta)?)
    }

    /// Parameters handed to the sampler, with any `sample_*` overrides.
    pub fn sampler_engine(&self) -> Result<EngineParams64, CliError> {
        let mut p = self.engine()?;
        for (k, &v) in &self.sample_overrides {
            match k.as_str() {
                "sample_theta" => p.theta = v,
                "sample_beta_a" => p.beta_a = v,
                "sample_beta_b" => p.beta_b = v,
                _ => {}
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn finite_time(&self) -> Result<FiniteTimeParams64, CliError> {
        let tau_q = match self.tau_q {
            StrokeTime::Absolute(t) => t,
            StrokeTime::Scaled(s) => s / self.alpha_a,
        };
        Ok(FiniteTimeParams::new(self.engine()?, self.alpha_a, self.alpha_b, tau_q, self.tau_w)?)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_fractions() {
        assert_eq!(parse_number("0.25").unwrap(), 0.25);
        assert_eq!(parse_number(" 1/3 ").unwrap(), 1.0 / 3.0);
        assert!(parse_number("inf").unwrap().is_infinite());
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("abc").is_err());
    }

    #[test]
    fn axis_specs() {
        let a = Axis::parse("omega_ratio:0.1:1.5:141").unwrap();
        assert_eq!(a.values.len(), 141);
        assert!((a.values[40] - 0.5).abs() < 1e-15);
        let l = Axis::parse("x_b:0.01:10:4:log").unwrap();
        assert!((l.values[1] - 0.1).abs() < 1e-15);
        let v = Axis::parse("theta_pi=1/4,1/3,1/2").unwrap();
        assert_eq!(v.values, vec![0.25, 1.0 / 3.0, 0.5]);
        assert!(Axis::parse("x_b:1:1:2").is_err());
        assert!(Axis::parse("x_b:0:1:1").is_err());
        assert!(Axis::parse("x_b:0:1:3:log").is_err());
        assert!(Axis::parse("speed:0:1:3").is_err());
    }

    #[test]
    fn families_overwrite_and_file_parsing() {
        let mut s = Settings::default();
        s.load_file("# comment\nt_a = 2\nt_b = 1 # trailing\nomega-ratio = 0.5\n").unwrap();
        let p = s.engine().unwrap();
        assert_eq!((p.beta_a, p.beta_b, p.omega_b), (0.5, 1.0, 0.5));
        s.set("x_a", "0.3").unwrap();
        assert!((s.engine().unwrap().beta_a - 0.3).abs() < 1e-15);
        assert!(!s.record().contains_key("t_a"));
        assert!(s.load_file("nonsense").is_err());
        assert!(s.set("axis", "d=2,3").is_ok());
        assert!(s.set("axis", "d=4").is_err());
    }

    #[test]
    fn grid_product_order() {
        let mut s = Settings::default();
        s.set("axis", "d=2,3").unwrap();
        s.set("axis", "theta_pi=0.25,0.5").unwrap();
        let g = s.grid().unwrap();
        let coords: Vec<_> = g.iter().map(|(c, _)| c.clone()).collect();
        assert_eq!(coords, vec![vec![2.0, 0.25], vec![2.0, 0.5], vec![3.0, 0.25], vec![3.0, 0.5]]);
        assert_eq!(g[3].1.d(), 3);
    }
}
