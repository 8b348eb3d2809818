//! One function per experiment. Each returns an [`Outcome`]: scalar results,
//! named pass/fail checks and the files to write. Nothing here touches the
//! file system.

use serde::Serialize;
use serde_json::{json, Map, Value};

use sgdlab::concentration::{
    decomposition_check, freedman_event_estimates, recursive_tail_estimate, recursive_weighted_tail_estimate,
    write_decomposition_csv, write_tail_csv, ytail_check, ytail_weighted_check, DecompositionReport,
    MartingaleFamily, RecursiveProcessSpec, TailReport,
};
use sgdlab::constructions::{
    couple_runs, deterministic_suite, lip_suffix_lower_bound_from_floor, monotonicity_certificate, CertificateReport,
    Construction, IterateMatch, LipschitzInstance, RescaledOracle, StronglyConvexInstance,
};
use sgdlab::export::real;
use sgdlab::replicas::map_replicas;
use sgdlab::rng::{derive_seed, replica_stream};
use sgdlab::stochastic::{NoiseModel, QuadraticInstance, QuadraticOracle, SuffixNoiseSpec};
use sgdlab::{drive, sgd_run, sgd_run_with, Domain, LabError, Oracle, Record, StepSchedule, Vector};

use crate::config::{Experiment, ExperimentConfig, NoiseSpec};
use crate::quantile::{quantile_summary, QuantileError, QuantileSummary};

/// Absolute slack on Monte Carlo upper-bound checks.
pub const MC_SLACK: f64 = 0.005;
/// Iterate identity tolerance for the adversarial runs.
pub const ITERATE_TOL: f64 = 1e-9;
/// Coupled-run tolerance.
pub const COUPLING_TOL: f64 = 1e-10;
/// Rounding allowance on the decomposition slack.
pub const SLACK_TOL: f64 = 1e-9;
/// Random convex combinations per suffix length.
pub const RANDOM_COMBOS: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error(transparent)]
    Quantile(#[from] QuantileError),
}

pub type RunResult<T> = Result<T, RunError>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// A file to be written under the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub path: String,
    pub contents: String,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub experiment: Experiment,
    pub results: Map<String, Value>,
    pub checks: Vec<Check>,
    pub files: Vec<OutputFile>,
}

impl Outcome {
    fn new(experiment: Experiment) -> Self {
        Outcome {
            experiment,
            results: Map::new(),
            checks: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    fn result(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    fn file(&mut self, path: impl Into<String>, contents: String) {
        self.files.push(OutputFile {
            path: path.into(),
            contents,
        });
    }

    fn plot(&mut self, name: &str, points: impl IntoIterator<Item = (f64, f64)>) {
        let mut s = String::from("x,y\n");
        for (x, y) in points {
            s.push_str(&format!("{},{}\n", real(x), real(y)));
        }
        self.file(format!("plotdata/{name}.csv"), s);
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> RunResult<Outcome> {
    match cfg.experiment {
        Experiment::ScLower => lower_bound(cfg, &StronglyConvexInstance::new(cfg.horizon)?, Experiment::ScLower),
        Experiment::LipLower => lower_bound(cfg, &LipschitzInstance::new(cfg.horizon, cfg.c)?, Experiment::LipLower),
        Experiment::LipMonotone => lip_monotone(cfg),
        Experiment::SuffixLower => suffix_lower(cfg),
        Experiment::LbdeltaLast => lbdelta_last(cfg),
        Experiment::LbdeltaSuffix => lbdelta_suffix(cfg),
        Experiment::Coupling => coupling(cfg),
        Experiment::QuadraticQuantiles => quadratic_quantiles(cfg),
        Experiment::RecursiveTail => recursive_tail(cfg),
        Experiment::FreedmanTail => freedman_tail(cfg),
        Experiment::Decomposition => decomposition(cfg),
        Experiment::Ytail => ytail(cfg),
    }
}

/// Result of streaming an adversarial run against its closed form.
#[derive(Debug, Clone)]
pub struct LowerBoundRun {
    pub matched: IterateMatch,
    pub f_last: f64,
    pub bound: f64,
    /// `(t, f(x_t), ‖x_t‖, η_t)` for `t = 1..=T+1`.
    pub rows: Vec<(usize, f64, f64, f64)>,
}

/// Run SGD from the origin on `inst` with its own schedule, comparing every
/// iterate with the closed form on the fly.
pub fn stream_lower_bound<C: Construction>(inst: &C, seed: u64) -> RunResult<LowerBoundRun> {
    let horizon = inst.horizon();
    let schedule = inst.schedule();
    let x1 = Vector::zeros(horizon);
    let mut matched = IterateMatch {
        max_deviation: x1.dist_inf(&inst.predicted_iterate(1)?),
        worst_t: 1,
    };
    let mut rows = Vec::with_capacity(horizon + 1);
    let mut failure = None;
    let finish = drive(inst, &inst.domain(), &x1, &schedule, horizon, &mut replica_stream(seed, 0), |s| {
        rows.push((s.t, s.value, s.x.norm(), s.eta));
        match inst.predicted_iterate(s.t + 1) {
            Ok(z) => {
                let dev = s.next.dist_inf(&z);
                if dev > matched.max_deviation {
                    matched = IterateMatch {
                        max_deviation: dev,
                        worst_t: s.t + 1,
                    };
                }
            }
            Err(e) => failure = failure.take().or(Some(e)),
        }
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    rows.push((horizon + 1, finish.value, finish.x.norm(), schedule.value(horizon + 1)?));
    Ok(LowerBoundRun {
        matched,
        f_last: finish.value,
        bound: inst.final_lower_bound()?,
        rows,
    })
}

fn lower_bound<C: Construction>(cfg: &ExperimentConfig, inst: &C, which: Experiment) -> RunResult<Outcome> {
    let run = stream_lower_bound(inst, cfg.seed)?;
    let mut out = Outcome::new(which);
    out.result("T", cfg.horizon);
    if which == Experiment::LipLower {
        out.result("c", cfg.c);
    }
    out.result("f_last", run.f_last);
    out.result("f_at_T", run.rows[cfg.horizon - 1].1);
    out.result("lower_bound", run.bound);
    out.result("ratio", run.f_last / run.bound);
    out.result("max_deviation", run.matched.max_deviation);
    out.result("worst_t", run.matched.worst_t);
    out.check(
        "iterate_identity",
        run.matched.max_deviation <= ITERATE_TOL,
        format!(
            "max ‖x_t − z_t‖∞ = {:e} at t = {} (tolerance {ITERATE_TOL:e})",
            run.matched.max_deviation, run.matched.worst_t
        ),
    );
    out.check(
        "final_iterate_bound",
        run.f_last > run.bound,
        format!("f(x_T+1) = {} vs bound {}", run.f_last, run.bound),
    );
    let mut csv = String::from("t,fx,norm_x,step\n");
    for &(t, f, n, eta) in &run.rows {
        csv.push_str(&format!("{t},{},{},{}\n", real(f), real(n), real(eta)));
    }
    out.file("trace.csv", csv);
    out.plot("f_vs_t", run.rows.iter().map(|r| (r.0 as f64, r.1)));
    Ok(out)
}

fn lip_monotone(cfg: &ExperimentConfig) -> RunResult<Outcome> {
    let inst = LipschitzInstance::new(cfg.horizon, cfg.c)?;
    let trace = sgd_run_with(
        &inst,
        &inst.domain(),
        &Vector::zeros(cfg.horizon),
        &inst.schedule(),
        cfg.horizon,
        &mut replica_stream(cfg.seed, 0),
        Record::Iterates,
    )?;
    let checks = monotonicity_certificate(&trace, &inst)?;
    let failures: Vec<usize> = checks.iter().filter(|c| !c.passed()).map(|c| c.i).collect();
    let min_ratio = checks.iter().map(|c| c.gap / c.required).fold(f64::INFINITY, f64::min);
    let mut out = Outcome::new(Experiment::LipMonotone);
    out.result("T", cfg.horizon);
    out.result("c", cfg.c);
    out.result("steps_checked", checks.len());
    out.result("steps_failed", failures.len());
    out.result("min_gap_ratio", min_ratio);
    out.check(
        "monotone_increase",
        failures.is_empty(),
        if failures.is_empty() {
            format!("all {} steps pass; min gap/required = {min_ratio}", checks.len())
        } else {
            format!("{} steps fail, first at i = {}", failures.len(), failures[0])
        },
    );
    let mut csv = String::from("i,gap,required,pass\n");
    for c in &checks {
        csv.push_str(&format!("{},{},{},{}\n", c.i, real(c.gap), real(c.required), c.passed()));
    }
    out.file("monotone.csv", csv);
    out.plot("gap_vs_i", checks.iter().map(|c| (c.i as f64, c.gap)));
    out.plot("required_vs_i", checks.iter().map(|c| (c.i as f64, c.required)));
    Ok(out)
}

fn certificate_csv(report: &CertificateReport) -> String {
    let mut buf = Vec::new();
    report.write_csv(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

fn summarize_certificates(report: &CertificateReport) -> String {
    let total = report.rows.len();
    let failed: Vec<String> = report
        .failures()
        .map(|r| format!("{}[{}]", r.check, r.index))
        .collect();
    if failed.is_empty() {
        format!("{total} inequalities hold")
    } else {
        let mut names = failed.clone();
        names.dedup();
        format!("{} of {total} fail: {}", failed.len(), names.join(", "))
    }
}

fn min_by_k(report: &CertificateReport, prefix: &str, ks: &[usize]) -> Vec<(f64, f64)> {
    ks.iter()
        .map(|&k| {
            let m = report
                .rows
                .iter()
                .filter(|r| r.check.starts_with(prefix) && r.index == k)
                .map(|r| r.lhs)
                .fold(f64::INFINITY, f64::min);
            (k as f64, m)
        })
        .collect()
}

fn suffix_lower(cfg: &ExperimentConfig) -> RunResult<Outcome> {
    let ks = &cfg.k_list;
    let mut out = Outcome::new(Experiment::SuffixLower);
    out.result("T", cfg.horizon);
    out.result("c", cfg.c);
    out.result("k_list", ks.clone());
    out.result("random_combinations", RANDOM_COMBOS);

    let sc = StronglyConvexInstance::new(cfg.horizon)?;
    let (_, sc_report) = deterministic_suite(&sc, ks, RANDOM_COMBOS, &mut replica_stream(derive_seed(cfg.seed, 1), 0))?;
    let lip = LipschitzInstance::new(cfg.horizon, cfg.c)?;
    let (_, lip_report) =
        deterministic_suite(&lip, ks, RANDOM_COMBOS, &mut replica_stream(derive_seed(cfg.seed, 2), 0))?;

    // The same Lipschitz combinations against the bound the coordinate floor supports.
    let mut floor = CertificateReport::default();
    for row in lip_report.rows.iter().filter(|r| r.check.starts_with("suffix_")) {
        let bound = lip_suffix_lower_bound_from_floor(cfg.horizon, row.index, cfg.c)?;
        floor.exceeds(&format!("{}_floor", row.check), row.index, row.lhs, bound);
    }

    for (name, report) in [("sc", &sc_report), ("lip", &lip_report), ("lip_floor", &floor)] {
        out.check(format!("suffix_{name}"), report.passed(), summarize_certificates(report));
        out.result(&format!("{name}_failures"), report.failures().count());
    }
    let sc_min = min_by_k(&sc_report, "suffix_", ks);
    let lip_min = min_by_k(&lip_report, "suffix_", ks);
    out.result("sc_min_value", sc_min.iter().map(|p| p.1).collect::<Vec<_>>());
    out.result("lip_min_value", lip_min.iter().map(|p| p.1).collect::<Vec<_>>());
    out.file("certificates_sc.csv", certificate_csv(&sc_report));
    out.file("certificates_lip.csv", certificate_csv(&lip_report));
    out.file("certificates_lip_floor.csv", certificate_csv(&floor));
    out.plot("sc_min_vs_k", sc_min);
    out.plot("lip_min_vs_k", lip_min);
    let sc_bounds = ks
        .iter()
        .map(|&k| Ok((k as f64, sc.suffix_lower_bound(k)?)))
        .collect::<RunResult<Vec<_>>>()?;
    let lip_bounds = ks
        .iter()
        .map(|&k| Ok((k as f64, lip.suffix_lower_bound(k)?)))
        .collect::<RunResult<Vec<_>>>()?;
    out.plot("sc_bound_vs_k", sc_bounds);
    out.plot("lip_bound_vs_k", lip_bounds);
    Ok(out)
}

fn tail_csv(reports: &[TailReport]) -> String {
    let mut buf = Vec::new();
    write_tail_csv(reports, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

fn tail_json(reports: &[TailReport]) -> Value {
    Value::Array(
        reports
            .iter()
            .map(|r| {
                json!({
                    "delta": r.delta,
                    "threshold": r.threshold,
                    "hits": r.hits,
                    "trials": r.trials,
                    "empirical": r.empirical_prob,
                    "ci_low": r.ci_low,
                    "ci_high": r.ci_high,
                    "bound": r.bound,
                })
            })
            .collect(),
    )
}

/// Upper-bound checks: the upper confidence limit within `bound + MC_SLACK`,
/// and the interval not wholly above the bound.
fn upper_tail_checks(out: &mut Outcome, name: &str, reports: &[TailReport]) {
    let label = |r: &TailReport| match r.delta {
        Some(d) => format!("δ = {d}"),
        None => format!("x = {}", r.threshold),
    };
    let over: Vec<String> = reports
        .iter()
        .filter(|r| !r.within_bound(MC_SLACK))
        .map(|r| format!("{}: ci_high {} > {} + {MC_SLACK}", label(r), r.ci_high, r.bound))
        .collect();
    out.check(
        format!("{name}_within_bound"),
        over.is_empty(),
        if over.is_empty() {
            format!("{} settings within bound + {MC_SLACK}", reports.len())
        } else {
            over.join("; ")
        },
    );
    let above: Vec<String> = reports
        .iter()
        .filter(|r| !r.consistent())
        .map(|r| format!("{}: ci_low {} > {}", label(r), r.ci_low, r.bound))
        .collect();
    out.check(
        format!("{name}_consistent"),
        above.is_empty(),
        if above.is_empty() {
            "no interval lies above its bound".to_string()
        } else {
            above.join("; ")
        },
    );
}

fn tail_plots(out: &mut Outcome, name: &str, reports: &[TailReport]) {
    let x = |r: &TailReport| r.delta.unwrap_or(r.threshold);
    out.plot(&format!("{name}_empirical"), reports.iter().map(|r| (x(r), r.empirical_prob)));
    out.plot(&format!("{name}_bound"), reports.iter().map(|r| (x(r), r.bound)));
}

/// `exp(−9 ln(1/δ)/2)`.
pub fn reverse_chernoff_rate(delta: f64) -> f64 {
    (-4.5 * (1.0 / delta).ln()).exp()
}

/// Lower-bound checks: the rate must not lie above the upper confidence limit.
fn lower_tail_check(out: &mut Outcome, reports: &[TailReport]) {
    let under: Vec<String> = reports
        .iter()
        .filter(|r| r.ci_high < r.bound)
        .map(|r| format!("δ = {}: ci_high {} < rate {}", r.delta.unwrap_or(f64::NAN), r.ci_high, r.bound))
        .collect();
    out.check(
        "reverse_chernoff_rate",
        under.is_empty(),
        if under.is_empty() {
            format!("{} settings at or above the rate", reports.len())
        } else {
            under.join("; ")
        },
    );
}

fn rademacher_line() -> RunResult<QuadraticOracle> {
    Ok(QuadraticOracle::new(QuadraticInstance::interval(), NoiseModel::Rademacher1d)?)
}

/// `f(x_{T+1})` for each replica of SGD with `η_t = 1/t` on the
/// one-dimensional quadratic with Rademacher noise.
pub fn lbdelta_final_values(horizon: usize, trials: u64, seed: u64) -> RunResult<Vec<f64>> {
    let oracle = rademacher_line()?;
    let domain = oracle.instance().domain().clone();
    let x1 = Vector::zeros(1);
    map_replicas(seed, trials, |_, rng| {
        drive(&oracle, &domain, &x1, &StepSchedule::InverseT, horizon, rng, |_| {}).map(|f| f.value)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(Into::into)
}

/// Tail reports for `f(x_{T+1}) ≥ ln(1/δ)/(2T)` against the reverse Chernoff rate.
pub fn lbdelta_last_reports(horizon: usize, delta_grid: &[f64], trials: u64, seed: u64) -> RunResult<Vec<TailReport>> {
    let values = lbdelta_final_values(horizon, trials, seed)?;
    Ok(delta_grid
        .iter()
        .map(|&delta| {
            let threshold = (1.0 / delta).ln() / (2.0 * horizon as f64);
            let hits = values.iter().filter(|&&v| v >= threshold).count() as u64;
            TailReport::new(Some(delta), threshold, hits, trials, reverse_chernoff_rate(delta))
        })
        .collect())
}

fn lbdelta_last(cfg: &ExperimentConfig) -> RunResult<Outcome> {
    let reports = lbdelta_last_reports(cfg.horizon, &cfg.delta_grid, cfg.trials, cfg.seed)?;
    let mut out = Outcome::new(Experiment::LbdeltaLast);
    out.result("T", cfg.horizon);
    out.result("tails", tail_json(&reports));
    lower_tail_check(&mut out, &reports);
    out.file("tail.csv", tail_csv(&reports));
    tail_plots(&mut out, "tail", &reports);
    Ok(out)
}

/// `f` at the mean of `x_{T/2+1..T+1}` for each replica, under the suffix
/// noise pattern with Rademacher signs.
pub fn lbdelta_suffix_values(horizon: usize, trials: u64, seed: u64) -> RunResult<Vec<f64>> {
    let oracle = QuadraticOracle::new(QuadraticInstance::interval(), NoiseModel::suffix_pattern(horizon)?)?;
    let domain = oracle.instance().domain().clone();
    let x1 = Vector::zeros(1);
    let start = horizon / 2;
    map_replicas(seed, trials, |_, rng| {
        let mut sum = 0.0;
        drive(&oracle, &domain, &x1, &StepSchedule::InverseT, horizon, rng, |s| {
            if s.t >= start {
                sum += s.next[0];
            }
        })
        .map(|_| {
            let mean = sum / (horizon - start + 1) as f64;
            oracle.value(&Vector::scalar(mean))
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(Into::into)
}

/// `n ln(1/δ) / (32 (T/2+1)²)` with `n = T/4 + 1` noisy steps.
pub fn lbdelta_suffix_threshold(horizon: usize, delta: f64) -> f64 {
    let n = (horizon / 4 + 1) as f64;
    let m = (horizon / 2 + 1) as f64;
    n * (1.0 / delta).ln() / (32.0 * m * m)
}

fn lbdelta_suffix(cfg: &ExperimentConfig) -> RunResult<Outcome> {
    SuffixNoiseSpec::new(cfg.horizon)?;
    let values = lbdelta_suffix_values(cfg.horizon, cfg.trials, cfg.seed)?;
    let reports: Vec<TailReport> = cfg
        .delta_grid
        .iter()
        .map(|&delta| {
            let threshold = lbdelta_suffix_threshold(cfg.horizon, delta);
            let hits = values.iter().filter(|&&v| v >= threshold).count() as u64;
            TailReport::new(Some(delta), threshold, hits, cfg.trials, reverse_chernoff_rate(delta))
        })
        .collect();
    let mut out = Outcome::new(Experiment::LbdeltaSuffix);
    out.result("T", cfg.horizon);
    out.result("tails", tail_json(&reports));
    lower_tail_check(&mut out, &reports);
    out.file("tail.csv", tail_csv(&reports));
    tail_plots(&mut out, "tail", &reports);
    Ok(out)
}

/// The coupling instance: `f(x) = (α/4) f₀(2x)` on the ball of radius ½,
/// with `f₀` the strongly convex staircase. It is `α`-strongly convex and
/// `(α/2)(1 + max‖h_i‖)`-Lipschitz.
pub fn coupling_instance(horizon: usize, alpha: f64) -> RunResult<(RescaledOracle<StronglyConvexInstance>, Domain, f64)> {
    let base = StronglyConvexInstance::new(horizon)?;
    let lipschitz = 0.5 * alpha * (1.0 + base.max_row_norm_sq().sqrt());
    Ok((RescaledOracle::new(base, alpha / 4.0, 2.0)?, Domain::ball(horizon, 0.5)?, lipschitz))
}

fn coupling(cfg: &ExperimentConfig) -> RunResult<Outcome> {
    let (f, domain, needed) = coupling_instance(cfg.horizon, cfg.alpha)?;
    let runs = couple_runs(
        &f,
        cfg.alpha,
        cfg.lipschitz,
        &domain,
        &Vector::zeros(cfg.horizon),
        cfg.horizon,
        &replica_stream(cfg.seed, 0),
    )?;
    let mut out = Outcome::new(Experiment::Coupling);
    out.result("T", cfg.horizon);
    out.result("alpha", cfg.alpha);
    out.result("L", cfg.lipschitz);
    out.result("lipschitz_constant", needed);
    out.result("max_deviation", runs.max_deviation);
    out.result("f_last", runs.trace_f.f(cfg.horizon + 1));
    out.check(
        "lipschitz_constant",
        cfg.lipschitz >= needed,
        format!("instance is {needed}-Lipschitz, L = {}", cfg.lipschitz),
    );
    out.check(
        "coupled_iterates",
        runs.max_deviation <= COUPLING_TOL,
        format!("max ‖x̃_t − (α/L)x_t‖∞ = {:e} (tolerance {COUPLING_TOL:e})", runs.max_deviation),
    );
    let ratio = cfg.alpha / cfg.lipschitz;
    let mut csv = String::from("t,f,g,deviation\n");
    let mut devs = Vec::with_capacity(cfg.horizon + 1);
    for t in 1..=cfg.horizon + 1 {
        let dev = runs.trace_g.x(t).dist_inf(&runs.trace_f.x(t).scaled(ratio));
        devs.push((t as f64, dev));
        csv.push_str(&format!(
            "{t},{},{},{}\n",
            real(runs.trace_f.f(t)),
            real(runs.trace_g.f(t)),
            real(dev)
        ));
    }
    out.file("coupling.csv", csv);
    out.plot("deviation_vs_t", devs);
    Ok(out)
}

/// The quadratic oracle selected by the config's noise key.
pub fn quadratic_from(noise: NoiseSpec) -> RunResult<QuadraticOracle> {
    let (inst, model) = match noise {
        NoiseSpec::None => (QuadraticInstance::ball(1)?, NoiseModel::None),
        NoiseSpec::Rademacher1d => (QuadraticInstance::interval(), NoiseModel::Rademacher1d),
        NoiseSpec::UniformSphere(d) => (QuadraticInstance::ball(d)?, NoiseModel::uniform_sphere(d)?),
    };
    Ok(QuadraticOracle::new(inst, model)?)
}

/// Final-iterate and suffix-average errors of one sweep point.
#[derive(Debug, Clone)]
pub struct HorizonQuantiles {
    pub horizon: usize,
    pub last: QuantileSummary,
    pub suffix: QuantileSummary,
}

/// For each replica of SGD with `η_t = 1/t` from the origin, the errors
/// `f(x_{T+1})` and `f(mean of x_{⌊T/2⌋+1..T+1})` (the minimum value is 0).
pub fn quadratic_errors(oracle: &QuadraticOracle, horizon: usize, trials: u64, seed: u64) -> RunResult<Vec<(f64, f64)>> {
    let domain = oracle.instance().domain().clone();
    let dim = oracle.instance().dim();
    let x1 = Vector::zeros(dim);
    let start = horizon / 2;
    map_replicas(seed, trials, |_, rng| {
        let mut sum = Vector::zeros(dim);
        drive(oracle, &domain, &x1, &StepSchedule::InverseT, horizon, rng, |s| {
            if s.t >= start {
                sum.axpy(1.0, s.next);
            }
        })
        .map(|f| (f.value, oracle.value(&sum.scaled(1.0 / (horizon - start + 1) as f64))))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(Into::into)
}

pub fn quadratic_quantile_sweep(
    oracle: &QuadraticOracle,
    horizons: &[usize],
    delta_grid: &[f64],
    trials: u64,
    seed: u64,
) -> RunResult<Vec<HorizonQuantiles>> {
    let levels: Vec<f64> = delta_grid.iter().map(|d| 1.0 - d).collect();
    horizons
        .iter()
        .enumerate()
        .map(|(lane, &horizon)| {
            let errors = quadratic_errors(oracle, horizon, trials, derive_seed(seed, lane as u64))?;
            let last: Vec<f64> = errors.iter().map(|e| e.0).collect();
            let suffix: Vec<f64> = errors.iter().map(|e| e.1).collect();
            Ok(HorizonQuantiles {
                horizon,
                last: quantile_summary(&last, &levels)?.with_horizon(horizon),
                suffix: quantile_summary(&suffix, &levels)?.with_horizon(horizon),
            })
        })
        .collect()
}

/// Whether the last entry is at most twice the first.
pub fn bounded_growth(seq: &[f64]) -> bool {
    match (seq.first(), seq.last()) {
        (Some(&a), Some(&b)) => b <= 2.0 * a,
        _ => true,
    }
}

fn quadratic_quantiles(cfg: &ExperimentConfig) -> RunResult<Outcome> {
    let oracle = quadratic_from(cfg.noise)?;
    let sweep = quadratic_quantile_sweep(&oracle, &cfg.horizon_grid, &cfg.delta_grid, cfg.trials, cfg.seed)?;
    let mut out = Outcome::new(Experiment::QuadraticQuantiles);
    out.result("T_grid", cfg.horizon_grid.clone());
    out.result("noise", cfg.noise.to_string());
    let mut csv = String::from("T,level,output,error,error_T,error_T_over_lnT\n");
    let mut rows = Vec::new();
    for h in &sweep {
        for (kind, s) in [("final", &h.last), ("suffix", &h.suffix)] {
            let by_t = s.times_t().expect("tagged");
            let by_t_log = s.times_t_over_log_t().expect("tagged");
            for (j, level) in s.levels.iter().enumerate() {
                csv.push_str(&format!(
                    "{},{},{kind},{},{},{}\n",
                    h.horizon,
                    real(*level),
                    real(s.values[j]),
                    real(by_t[j]),
                    real(by_t_log[j])
                ));
            }
        }
        rows.push(json!({
            "T": h.horizon,
            "levels": h.last.levels,
            "final_error": h.last.values,
            "final_error_T_over_lnT": h.last.times_t_over_log_t(),
            "suffix_error": h.suffix.values,
            "suffix_error_T": h.suffix.times_t(),
        }));
    }
    out.result("quantiles", Value::Array(rows));
    for (j, delta) in cfg.delta_grid.iter().enumerate() {
        let final_seq: Vec<f64> = sweep.iter().map(|h| h.last.times_t_over_log_t().expect("tagged")[j]).collect();
        let suffix_seq: Vec<f64> = sweep.iter().map(|h| h.suffix.times_t().expect("tagged")[j]).collect();
        out.check(
            format!("final_growth_delta_{delta}"),
            bounded_growth(&final_seq),
            format!("quantile·T/ln T across T: {final_seq:?}"),
        );
        out.check(
            format!("suffix_growth_delta_{delta}"),
            bounded_growth(&suffix_seq),
            format!("quantile·T across T: {suffix_seq:?}"),
        );
        let xs = cfg.horizon_grid.iter().map(|&t| t as f64);
        out.plot(&format!("final_scaled_delta_{delta}"), xs.clone().zip(final_seq));
        out.plot(&format!("suffix_scaled_delta_{delta}"), xs.zip(suffix_seq));
    }
    out.file("quantiles.csv", csv);
    Ok(out)
}

fn recursive_tail(cfg: &ExperimentConfig) -> RunResult<Outcome> {
    let spec = RecursiveProcessSpec::sgd_toy(cfg.horizon)?;
    let reports = recursive_tail_estimate(&spec, &cfg.delta_grid, cfg.trials, cfg.seed)?;
    let sigma = vec![1.0; cfg.horizon];
    let weighted =
        recursive_weighted_tail_estimate(&spec, &sigma, &cfg.delta_grid, cfg.trials, derive_seed(cfg.seed, 1))?;
    let mut out = Outcome::new(Experiment::RecursiveTail);
    out.result("T", cfg.horizon);
    out.result("K", sgdlab::concentration::recursive_K(&spec));
    out.result("tails", tail_json(&reports));
    out.result("weighted_tails", tail_json(&weighted));
    upper_tail_checks(&mut out, "final", &reports);
    upper_tail_checks(&mut out, "weighted", &weighted);
    out.file("tail.csv", tail_csv(&reports));
    out.file("tail_weighted.csv", tail_csv(&weighted));
    tail_plots(&mut out, "tail", &reports);
    tail_plots(&mut out, "tail_weighted", &weighted);
    Ok(out)
}

/// The two martingale families at length `n`: constant `b_i = 1`, and
/// `b_{i+1}² = clamp(1 + d_i/2, 1/4, 4)`.
pub fn freedman_families(n: usize) -> RunResult<[(&'static str, MartingaleFamily); 2]> {
    Ok([
        ("fixed", MartingaleFamily::fixed(n, 1.0)?),
        ("chicken_and_egg", MartingaleFamily::chicken_and_egg(n, 1.0, 0.5, 0.25, 4.0)?),
    ])
}

/// Three `(x, β)` settings scaled with `n`.
pub fn freedman_settings(n: usize) -> [(f64, f64); 3] {
    let n = n as f64;
    let r = n.sqrt();
    [(2.0 * r, n), (3.0 * r, n), (1.5 * r, n / 2.0)]
}

fn freedman_tail(cfg: &ExperimentConfig) -> RunResult<Outcome> {
    let mut out = Outcome::new(Experiment::FreedmanTail);
    out.result("n", cfg.horizon);
    let settings = freedman_settings(cfg.horizon);
    out.result("settings", settings.iter().map(|&(x, b)| json!({"x": x, "beta": b})).collect::<Vec<_>>());
    for (lane, (name, family)) in freedman_families(cfg.horizon)?.into_iter().enumerate() {
        let reports = freedman_event_estimates(
            &family,
            &settings,
            &family.matching_alpha(),
            cfg.trials,
            derive_seed(cfg.seed, lane as u64),
        )?;
        out.result(name, tail_json(&reports));
        upper_tail_checks(&mut out, name, &reports);
        out.file(format!("tail_{name}.csv"), tail_csv(&reports));
        tail_plots(&mut out, name, &reports);
    }
    Ok(out)
}

/// Decomposition reports for `trials` noisy quadratic runs, with `η_t = 1/t`
/// (`strongly_convex`) or `η_t = 1/√t`.
pub fn decomposition_reports(
    oracle: &QuadraticOracle,
    horizon: usize,
    strongly_convex: bool,
    trials: u64,
    seed: u64,
) -> RunResult<Vec<DecompositionReport>> {
    let schedule = if strongly_convex {
        StepSchedule::InverseT
    } else {
        StepSchedule::InverseSqrtT
    };
    let domain = oracle.instance().domain().clone();
    let x1 = Vector::zeros(oracle.instance().dim());
    map_replicas(seed, trials, |_, rng| {
        let trace = sgd_run(oracle, &domain, &x1, &schedule, horizon, rng)?;
        decomposition_check(&trace, strongly_convex)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(Into::into)
}

fn decomposition(cfg: &ExperimentConfig) -> RunResult<Outcome> {
    let oracle = quadratic_from(cfg.noise)?;
    let mut out = Outcome::new(Experiment::Decomposition);
    out.result("T", cfg.horizon);
    out.result("noise", cfg.noise.to_string());
    for (lane, (name, sc)) in [("sc", true), ("lip", false)].into_iter().enumerate() {
        let reports = decomposition_reports(&oracle, cfg.horizon, sc, cfg.trials, derive_seed(cfg.seed, lane as u64))?;
        let (worst, min_slack) = reports
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.slack))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        let violations = reports.iter().filter(|r| r.slack < -SLACK_TOL).count();
        out.result(&format!("{name}_min_slack"), min_slack);
        out.result(&format!("{name}_violations"), violations);
        out.check(
            format!("{name}_slack"),
            violations == 0,
            format!("min slack {min_slack:e} at replica {worst}; {violations} below −{SLACK_TOL:e}"),
        );
        let mut buf = Vec::new();
        write_decomposition_csv(&reports, &mut buf).expect("writing to memory");
        out.file(format!("decomposition_{name}.csv"), String::from_utf8(buf).expect("ascii"));
        out.plot(
            &format!("{name}_slack_vs_replica"),
            reports.iter().enumerate().map(|(i, r)| (i as f64, r.slack)),
        );
    }
    Ok(out)
}

fn ytail(cfg: &ExperimentConfig) -> RunResult<Outcome> {
    let oracle = quadratic_from(cfg.noise)?;
    let t = cfg.horizon - 1;
    let reports = ytail_check(&oracle, cfg.horizon, t, &cfg.delta_grid, cfg.trials, cfg.seed)?;
    let sigma = vec![1.0; cfg.horizon - 1];
    let weighted = ytail_weighted_check(
        &oracle,
        cfg.horizon,
        &sigma,
        &cfg.delta_grid,
        cfg.trials,
        derive_seed(cfg.seed, 1),
    )?;
    let mut out = Outcome::new(Experiment::Ytail);
    out.result("T", cfg.horizon);
    out.result("t", t);
    out.result("noise", cfg.noise.to_string());
    out.result("tails", tail_json(&reports));
    out.result("weighted_tails", tail_json(&weighted));
    upper_tail_checks(&mut out, "ytail", &reports);
    upper_tail_checks(&mut out, "weighted", &weighted);
    out.file("tail.csv", tail_csv(&reports));
    out.file("tail_weighted.csv", tail_csv(&weighted));
    tail_plots(&mut out, "tail", &reports);
    tail_plots(&mut out, "tail_weighted", &weighted);
    Ok(out)
}
