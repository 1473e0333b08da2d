//! Subcommand implementations. Each returns a [`Report`]; grid points are
//! evaluated in parallel and collected in grid order.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde_json::{json, Value};

use swapengine::analysis::{self, tur_bound_check};
use swapengine::engine::{self, Regime};
use swapengine::finite_time;
use swapengine::spectral::{self, CountingPoint, PROBABILITY_FLOOR};
use swapengine::tpm;
use swapengine::EngineParams64;

use crate::settings::Settings;
use crate::table::{Cell, Report};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Moments,
    Sweep,
    Pdist,
    Charfn,
    McValidate,
    TurScan,
    MaxWork,
    FiniteTime,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Moments,
        Command::Sweep,
        Command::Pdist,
        Command::Charfn,
        Command::McValidate,
        Command::TurScan,
        Command::MaxWork,
        Command::FiniteTime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Moments => "moments",
            Command::Sweep => "sweep",
            Command::Pdist => "pdist",
            Command::Charfn => "charfn",
            Command::McValidate => "mc-validate",
            Command::TurScan => "tur-scan",
            Command::MaxWork => "max-work",
            Command::FiniteTime => "finite-time",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Command::Moments => "Means, variances, regime and uncertainty-relation terms at one point",
            Command::Sweep => "Moment table over one or two sweep axes",
            Command::Pdist => "Joint work/heat distribution with fluctuation-theorem log ratios",
            Command::Charfn => "Characteristic function on a (lambda, mu) grid",
            Command::McValidate => "Monte Carlo two-point-measurement run against the closed forms",
            Command::TurScan => "Uncertainty-relation ratio over (x_a, x_b), extremum search or region counts",
            Command::MaxWork => "Efficiency at maximum work against Curzon-Ahlborn",
            Command::FiniteTime => "Limit-cycle power, signal-to-noise ratio or state under partial thermalization",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn run(self, s: &Settings) -> Result<Report, CliError> {
        match self {
            Command::Moments => moments(s),
            Command::Sweep => sweep(s),
            Command::Pdist => pdist(s),
            Command::Charfn => charfn(s),
            Command::McValidate => mc_validate(s),
            Command::TurScan => tur_scan(s),
            Command::MaxWork => max_work(s),
            Command::FiniteTime => finite_time_cmd(s),
        }
    }
}

fn axis_names(s: &Settings) -> Vec<String> {
    s.axes.iter().map(|a| a.name.clone()).collect()
}

/// Evaluates `f` at every grid point, prefixing each produced row with the
/// axis coordinates.
fn over_grid<F>(s: &Settings, columns: &[&str], f: F) -> Result<Report, CliError>
where
    F: Fn(&Settings) -> Result<Vec<Vec<Cell>>, CliError> + Sync,
{
    // an axis that is also a result column is reported once, by the command
    let keep: Vec<bool> = axis_names(s).iter().map(|a| !columns.contains(&a.as_str())).collect();
    let shown = axis_names(s).into_iter().zip(&keep).filter(|(_, k)| **k).map(|(a, _)| a);
    let mut report = Report::new(shown.chain(columns.iter().map(|c| c.to_string())));
    let grid = s.grid()?;
    let blocks: Vec<Vec<Vec<Cell>>> = grid
        .par_iter()
        .map(|(coords, point)| {
            let rows = f(point)?;
            Ok(rows
                .into_iter()
                .map(|row| {
                    let axes = coords.iter().zip(&keep).filter(|(_, k)| **k).map(|(&c, _)| Cell::Float(c));
                    axes.chain(row).collect()
                })
                .collect())
        })
        .collect::<Result<_, CliError>>()?;
    report.rows = blocks.into_iter().flatten().collect();
    Ok(report)
}

const MOMENT_COLUMNS: &[&str] = &[
    "d",
    "omega_a",
    "omega_b",
    "beta_a",
    "beta_b",
    "theta",
    "regime",
    "mean_w",
    "mean_qh",
    "mean_qc",
    "var_w",
    "var_qh",
    "cov_w_qh",
    "entropy_production",
    "efficiency",
    "cop",
    "tur_lhs",
    "tur_rhs",
    "tur_ratio",
    "standard_violation",
];

fn moment_row(p: &EngineParams64) -> Vec<Cell> {
    let m = spectral::moment_set(p);
    let regime = engine::classify_regime(p);
    let eta = engine::otto_efficiency(p);
    let cop = engine::cop(p);
    let tur = tur_bound_check(p).ok();
    vec![
        p.d.into(),
        p.omega_a.into(),
        p.omega_b.into(),
        p.beta_a.into(),
        p.beta_b.into(),
        p.theta.into(),
        regime.as_str().into(),
        m.mean_w.into(),
        m.mean_qh.into(),
        m.mean_qc.into(),
        m.var_w.into(),
        m.var_qh.into(),
        m.cov_w_qh.into(),
        m.entropy_production.into(),
        eta.regime_ok.then_some(eta.value).into(),
        cop.regime_ok.then_some(cop.value).into(),
        tur.map(|t| t.lhs).into(),
        tur.map(|t| t.rhs).into(),
        tur.map(|t| t.ratio).into(),
        tur.map_or(Cell::Null, |t| t.standard_violation.into()),
    ]
}

fn moments(s: &Settings) -> Result<Report, CliError> {
    let mut r = over_grid(s, MOMENT_COLUMNS, |p| Ok(vec![moment_row(&p.engine()?)]))?;
    if let [row] = r.rows.as_slice() {
        let regime = r.column("regime").map(|i| row[i].to_json()).unwrap_or(Value::Null);
        r.summary.insert("regime".into(), regime);
    }
    Ok(r)
}

fn sweep(s: &Settings) -> Result<Report, CliError> {
    if s.axes.is_empty() || s.axes.len() > 2 {
        return Err(CliError::input(format!("sweep needs one or two axes, got {}", s.axes.len())));
    }
    let mut r = over_grid(s, MOMENT_COLUMNS, |p| Ok(vec![moment_row(&p.engine()?)]))?;
    let regime_col = r.column("regime").expect("regime column");
    let regimes: BTreeSet<String> = r
        .rows
        .iter()
        .filter_map(|row| match &row[regime_col] {
            Cell::Text(t) => Some(t.clone()),
            _ => None,
        })
        .collect();
    r.summary.insert("points".into(), json!(r.rows.len()));
    r.summary.insert("regimes".into(), json!(regimes));
    Ok(r)
}

fn pdist(s: &Settings) -> Result<Report, CliError> {
    let columns = ["n", "work", "heat_hot", "probability", "ft_log_ratio", "ft_expected"];
    let mut r = over_grid(s, &columns, |point| {
        let p = point.engine()?;
        let dist = spectral::joint_distribution(&p);
        let slope = p.x_b() - p.x_a();
        let mut rows = Vec::new();
        for (n, w, q, prob) in dist.iter() {
            if prob == 0.0 {
                continue;
            }
            let back = dist.prob(-n);
            let ratio = (prob > PROBABILITY_FLOOR && back > PROBABILITY_FLOOR).then(|| (prob / back).ln());
            rows.push(vec![n.into(), w.into(), q.into(), prob.into(), ratio.into(), (slope * n as f64).into()]);
        }
        rows.push(vec!["sum".into(), Cell::Null, Cell::Null, dist.total().into(), Cell::Null, Cell::Null]);
        Ok(rows)
    })?;
    let n_col = r.column("n").expect("n column");
    let p_col = r.column("probability").expect("probability column");
    let ft = r.column("ft_log_ratio").expect("ratio column");
    let expected = r.column("ft_expected").expect("expected column");
    let worst = r
        .rows
        .iter()
        .filter_map(|row| Some((row[ft].as_f64()? - row[expected].as_f64()?).abs()))
        .fold(0.0, f64::max);
    let max_norm_error = r
        .rows
        .iter()
        .filter(|row| row[n_col] == Cell::Text("sum".into()))
        .filter_map(|row| row[p_col].as_f64())
        .map(|t| (t - 1.0).abs())
        .fold(0.0, f64::max);
    r.summary.insert("max_ft_deviation".into(), json!(worst));
    r.summary.insert("max_normalization_error".into(), json!(max_norm_error));
    Ok(r)
}

fn charfn(s: &Settings) -> Result<Report, CliError> {
    let columns = ["lambda", "mu", "re", "im", "abs"];
    over_grid(s, &columns, |point| {
        let p = point.engine()?;
        let chi = spectral::characteristic_function(&p, CountingPoint::real(point.lambda, point.mu));
        Ok(vec![vec![
            point.lambda.into(),
            point.mu.into(),
            chi.re.into(),
            chi.im.into(),
            chi.norm().into(),
        ]])
    })
}

pub const MIN_MC_SAMPLES: u64 = 10_000;

fn mc_validate(s: &Settings) -> Result<Report, CliError> {
    if !s.axes.is_empty() {
        return Err(CliError::input("mc-validate does not take sweep axes"));
    }
    if s.samples < MIN_MC_SAMPLES {
        return Err(CliError::input(format!(
            "mc-validate needs at least {MIN_MC_SAMPLES} samples, got {}",
            s.samples
        )));
    }
    let exact_params = s.engine()?;
    let sample_params = s.sampler_engine()?;
    let stats = tpm::sample(&sample_params, s.samples, s.seed)?;
    let dist = spectral::joint_distribution(&exact_params);
    let moments = spectral::moment_set(&exact_params);
    let count = stats.sample_count as f64;

    let mut r = Report::new(["check", "exact", "estimate", "std_error", "z", "pass"]);
    let push = |name: String, exact: f64, est: tpm::Estimate, r: &mut Report| {
        let z = est.z_score(exact);
        let pass = z.abs() <= s.threshold;
        r.rows.push(vec![
            Cell::Text(name),
            exact.into(),
            est.mean.into(),
            est.std_error.into(),
            z.into(),
            pass.into(),
        ]);
        z.abs()
    };
    let mut max_z: f64 = 0.0;
    for n in dist.support() {
        let exact = dist.prob(n);
        let freq = stats.heat_frequency(n);
        if exact == 0.0 && freq == 0.0 {
            continue;
        }
        let est = tpm::Estimate {
            mean: freq,
            std_error: (exact * (1.0 - exact) / count).sqrt(),
        };
        max_z = max_z.max(push(format!("p(n={n})"), exact, est, &mut r));
    }
    let checks = [
        ("mean_w", moments.mean_w, stats.estimate(&stats.work)),
        ("mean_qh", moments.mean_qh, stats.estimate(&stats.heat_hot)),
        ("second_moment_w", moments.second_moment_w(), stats.estimate(&stats.work_sq)),
        (
            "second_moment_qh",
            moments.var_qh + moments.mean_qh * moments.mean_qh,
            stats.estimate(&stats.heat_hot_sq),
        ),
        ("jarzynski", 1.0, stats.estimate(&stats.exp_neg_entropy)),
    ];
    for (name, exact, est) in checks {
        max_z = max_z.max(push(name.to_string(), exact, est, &mut r));
    }
    let pass = max_z <= s.threshold;
    r.failed = !pass;
    r.summary.insert("pass".into(), json!(pass));
    r.summary.insert("max_abs_z".into(), json!(max_z));
    r.summary.insert("threshold".into(), json!(s.threshold));
    r.summary.insert("samples".into(), json!(stats.sample_count));
    r.summary.insert("seed".into(), json!(s.seed));
    Ok(r)
}

fn tur_scan(s: &Settings) -> Result<Report, CliError> {
    match s.mode.as_deref().unwrap_or("grid") {
        "grid" => tur_grid(s),
        "extremum" => {
            let columns = ["d", "theta", "pin", "x_b_opt", "ratio", "converged"];
            let mut r = over_grid(s, &columns, |point| {
                let v = analysis::strongest_violation(point.d(), point.theta(), point.pin)?;
                Ok(vec![vec![
                    point.d().into(),
                    point.theta().into(),
                    v.x_a.into(),
                    v.x_b.into(),
                    v.ratio.into(),
                    v.converged.into(),
                ]])
            })?;
            r.summary.insert("bracket".into(), json!(analysis::VIOLATION_BRACKET));
            Ok(r)
        }
        "region" => {
            let columns = ["d", "theta", "violation_count", "grid_points"];
            let mut r = over_grid(s, &columns, |point| {
                let count = analysis::violation_region_count(point.d(), point.theta());
                Ok(vec![vec![
                    point.d().into(),
                    point.theta().into(),
                    count.into(),
                    (analysis::REGION_GRID * analysis::REGION_GRID).into(),
                ]])
            })?;
            r.summary.insert("range".into(), json!(analysis::REGION_RANGE));
            Ok(r)
        }
        other => Err(CliError::input(format!("tur-scan mode must be grid, extremum or region, got {other:?}"))),
    }
}

fn tur_grid(s: &Settings) -> Result<Report, CliError> {
    let columns = [
        "d",
        "theta",
        "x_a",
        "x_b",
        "snr",
        "half_entropy",
        "ratio",
        "tur_lhs",
        "tur_rhs",
        "bound_holds",
        "standard_violation",
    ];
    let mut r = over_grid(s, &columns, |point| {
        let p = point.engine()?;
        let c = tur_bound_check(&p).ok();
        let sigma = engine::entropy_production(&p);
        Ok(vec![vec![
            p.d.into(),
            p.theta.into(),
            p.x_a().into(),
            p.x_b().into(),
            c.map(|c| 1.0 / c.lhs).into(),
            (0.5 * sigma).into(),
            c.map(|c| c.ratio).into(),
            c.map(|c| c.lhs).into(),
            c.map(|c| c.rhs).into(),
            c.map_or(Cell::Null, |c| c.bound_holds.into()),
            c.map_or(Cell::Null, |c| c.standard_violation.into()),
        ]])
    })?;
    let col = |name: &str| r.column(name).expect("known column");
    let (viol, holds, ratio) = (col("standard_violation"), col("bound_holds"), col("ratio"));
    let violations = r.rows.iter().filter(|row| row[viol] == Cell::Bool(true)).count();
    let failures = r.rows.iter().filter(|row| row[holds] == Cell::Bool(false)).count();
    let min_ratio = r.rows.iter().filter_map(|row| row[ratio].as_f64()).fold(f64::INFINITY, f64::min);
    r.summary.insert("points".into(), json!(r.rows.len()));
    r.summary.insert("violation_count".into(), json!(violations));
    r.summary.insert("bound_failures".into(), json!(failures));
    r.summary.insert("min_ratio".into(), json!(min_ratio.is_finite().then_some(min_ratio)));
    r.failed = failures > 0;
    Ok(r)
}

fn max_work(s: &Settings) -> Result<Report, CliError> {
    let columns = [
        "d",
        "theta",
        "tb_over_ta",
        "eta_m",
        "eta_ca",
        "eta_c",
        "x_b_opt",
        "max_work",
        "converged",
        "residual",
    ];
    let mut r = over_grid(s, &columns, |point| {
        let m = analysis::efficiency_at_max_work(point.d(), point.tb_over_ta, point.theta())?;
        Ok(vec![vec![
            m.d.into(),
            point.theta().into(),
            m.tb_over_ta.into(),
            m.eta_m.into(),
            m.eta_ca.into(),
            m.eta_c.into(),
            m.x_b_opt.into(),
            m.max_work.into(),
            m.converged.into(),
            m.residual.into(),
        ]])
    })?;
    let conv = r.column("converged").expect("converged column");
    let flagged = r.rows.iter().filter(|row| row[conv] == Cell::Bool(false)).count();
    r.summary.insert("unconverged".into(), json!(flagged));
    Ok(r)
}

fn finite_time_cmd(s: &Settings) -> Result<Report, CliError> {
    match s.mode.as_deref().unwrap_or("power") {
        "power" => ft_power(s),
        "snr" => ft_snr(s),
        "state" => ft_state(s),
        other => Err(CliError::input(format!("finite-time mode must be power, snr or state, got {other:?}"))),
    }
}

fn ft_power(s: &Settings) -> Result<Report, CliError> {
    let columns = [
        "alpha_a",
        "alpha_b",
        "tau_q",
        "tau_w",
        "n_a_star",
        "n_b_star",
        "scaled_power",
        "power",
        "degenerate",
    ];
    let mut r = over_grid(s, &columns, |point| {
        let f = point.finite_time()?;
        let (na, nb) = finite_time::steady_occupations(&f);
        Ok(vec![vec![
            f.alpha_a.into(),
            f.alpha_b.into(),
            f.tau_q.into(),
            f.tau_w.into(),
            na.into(),
            nb.into(),
            finite_time::scaled_power(&f).into(),
            finite_time::power(&f).into(),
            (f.tau_q == 0.0).into(),
        ]])
    })?;
    let mut seen = Vec::new();
    let mut optima = Vec::new();
    for (_, point) in s.grid()? {
        let f = point.finite_time()?;
        let key = (f.alpha_a.to_bits(), f.alpha_b.to_bits(), f.tau_w.to_bits());
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        let o = finite_time::optimal_power(&f)?;
        optima.push(json!({
            "alpha_a": f.alpha_a,
            "alpha_b": f.alpha_b,
            "tau_w": f.tau_w,
            "tau_q_opt": o.tau_q,
            "scaled_power_opt": o.scaled_power,
            "power_opt": o.power,
            "boundary": o.boundary,
            "converged": o.converged,
        }));
    }
    r.summary.insert("optima".into(), Value::Array(optima));
    Ok(r)
}

fn ft_snr(s: &Settings) -> Result<Report, CliError> {
    let columns = [
        "d",
        "n_a",
        "n_b",
        "tau_q",
        "snr",
        "snr_ideal",
        "beta_a_star",
        "beta_b_star",
        "capped",
    ];
    over_grid(s, &columns, |point| {
        let f = point.finite_time()?;
        let st = finite_time::steady_state(&f)?;
        let inv = finite_time::finite_time_inverse_snr(&f).ok();
        let ideal = spectral::moment_set(&f.base).inverse_snr();
        Ok(vec![vec![
            f.base.d.into(),
            f.base.n_a().into(),
            f.base.n_b().into(),
            f.tau_q.into(),
            inv.map(|v| 1.0 / v).into(),
            ideal.map(|v| 1.0 / v).into(),
            st.beta_a_star.into(),
            st.beta_b_star.into(),
            st.capped.into(),
        ]])
    })
}

fn ft_state(s: &Settings) -> Result<Report, CliError> {
    let columns = [
        "tau_q",
        "tau_w",
        "n_a",
        "n_b",
        "n_a_star",
        "n_b_star",
        "beta_a_star",
        "beta_b_star",
        "power",
        "mean_w",
        "var_w",
        "entropy_production",
        "internal_entropy_production",
        "efficiency",
        "degenerate",
        "capped",
    ];
    over_grid(s, &columns, |point| {
        let f = point.finite_time()?;
        let st = finite_time::steady_state(&f)?;
        let m = finite_time::steady_moments(&f)?;
        let internal = finite_time::internal_entropy_production(&f)?;
        let eta = (m.mean_qh != 0.0).then(|| -m.mean_w / m.mean_qh);
        let regime_ok = engine::classify_regime(&f.base) == Regime::HeatEngine;
        Ok(vec![vec![
            f.tau_q.into(),
            f.tau_w.into(),
            f.base.n_a().into(),
            f.base.n_b().into(),
            st.n_a_star.into(),
            st.n_b_star.into(),
            st.beta_a_star.into(),
            st.beta_b_star.into(),
            st.power.into(),
            m.mean_w.into(),
            m.var_w.into(),
            m.entropy_production.into(),
            internal.into(),
            eta.filter(|_| regime_ok).into(),
            st.degenerate.into(),
            st.capped.into(),
        ]])
    })
}
