//! Line-oriented `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// Environment variable consulted for the output directory when neither the
/// command line nor the config names one.
pub const OUT_DIR_ENV: &str = "SGDLAB_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ScLower,
    LipLower,
    LipMonotone,
    SuffixLower,
    LbdeltaLast,
    LbdeltaSuffix,
    Coupling,
    QuadraticQuantiles,
    RecursiveTail,
    FreedmanTail,
    Decomposition,
    Ytail,
}

impl Experiment {
    pub const ALL: [Experiment; 12] = [
        Experiment::ScLower,
        Experiment::LipLower,
        Experiment::LipMonotone,
        Experiment::SuffixLower,
        Experiment::LbdeltaLast,
        Experiment::LbdeltaSuffix,
        Experiment::Coupling,
        Experiment::QuadraticQuantiles,
        Experiment::RecursiveTail,
        Experiment::FreedmanTail,
        Experiment::Decomposition,
        Experiment::Ytail,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ScLower => "sc-lower",
            Experiment::LipLower => "lip-lower",
            Experiment::LipMonotone => "lip-monotone",
            Experiment::SuffixLower => "suffix-lower",
            Experiment::LbdeltaLast => "lbdelta-last",
            Experiment::LbdeltaSuffix => "lbdelta-suffix",
            Experiment::Coupling => "coupling",
            Experiment::QuadraticQuantiles => "quadratic-quantiles",
            Experiment::RecursiveTail => "recursive-tail",
            Experiment::FreedmanTail => "freedman-tail",
            Experiment::Decomposition => "decomposition",
            Experiment::Ytail => "ytail",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::ScLower => "final iterate on the strongly convex staircase vs ln T/(4T)",
            Experiment::LipLower => "final iterate on the Lipschitz staircase vs ln T/(32c√T)",
            Experiment::LipMonotone => "per-step increase of f along the Lipschitz staircase run",
            Experiment::SuffixLower => "convex combinations of the last k iterates on both staircases",
            Experiment::LbdeltaLast => "probability that f(x_{T+1}) ≥ ln(1/δ)/(2T) on the noisy quadratic",
            Experiment::LbdeltaSuffix => "probability of a large suffix average under the suffix noise pattern",
            Experiment::Coupling => "rescaling an (α, L) problem to a (1, 1) problem",
            Experiment::QuadraticQuantiles => "error quantiles of final iterate and suffix average across T",
            Experiment::RecursiveTail => "tail of the extremal recursive process vs eδ",
            Experiment::FreedmanTail => "generalized Freedman event on two martingale families",
            Experiment::Decomposition => "exact last-iterate decomposition slack on noisy runs",
            Experiment::Ytail => "tail of t‖x_{t+1}‖² on the noisy quadratic vs eδ",
        }
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Noise for the quadratic experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NoiseSpec {
    None,
    Rademacher1d,
    UniformSphere(usize),
}

impl FromStr for NoiseSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(NoiseSpec::None),
            "rademacher-1d" => Ok(NoiseSpec::Rademacher1d),
            other => {
                let dim = other
                    .strip_prefix("uniform-sphere:")
                    .ok_or_else(|| format!("unknown noise `{other}` (none, rademacher-1d, uniform-sphere:<dim>)"))?;
                match dim.trim().parse::<usize>() {
                    Ok(d) if d >= 1 => Ok(NoiseSpec::UniformSphere(d)),
                    _ => Err(format!("uniform-sphere dimension `{dim}` is not a positive integer")),
                }
            }
        }
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseSpec::None => f.write_str("none"),
            NoiseSpec::Rademacher1d => f.write_str("rademacher-1d"),
            NoiseSpec::UniformSphere(d) => write!(f, "uniform-sphere:{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "T_grid")]
    pub horizon_grid: Vec<usize>,
    pub c: f64,
    pub trials: u64,
    pub delta_grid: Vec<f64>,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub k_list: Vec<usize>,
    pub alpha: f64,
    #[serde(rename = "L")]
    pub lipschitz: f64,
    #[serde(serialize_with = "display")]
    pub noise: NoiseSpec,
}

fn display<S: serde::Serializer>(v: &NoiseSpec, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Every problem found in a config, in file order.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid config:\n  {}", .0.join("\n  "))]
pub struct ConfigError(pub Vec<String>);

const KEYS: [&str; 12] = [
    "experiment", "T", "T_grid", "c", "trials", "delta_grid", "seed", "out_dir", "k_list", "alpha", "L", "noise",
];

fn parse_list<T: FromStr>(value: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(|s| s.trim().parse::<T>().map_err(|e| format!("`{}`: {e}", s.trim())))
        .collect()
}

/// Parse and validate a config. Missing optional keys take their defaults:
/// `c = 1`, `trials = 1000`, `delta_grid = 0.2, 0.1, 0.05, 0.01`,
/// `seed = 0`, `alpha = 2`, `L = 3`, `noise = rademacher-1d`.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut errors = Vec::new();
    let mut raw: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            errors.push(format!("line {}: expected `key = value`", n + 1));
            continue;
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            errors.push(format!("line {}: unknown key `{key}`", n + 1));
        } else if raw.insert(key, (n + 1, value.trim())).is_some() {
            errors.push(format!("line {}: duplicate key `{key}`", n + 1));
        }
    }

    macro_rules! field {
        ($key:literal, $default:expr, $parse:expr) => {
            match raw.get($key) {
                None => $default,
                Some(&(line, v)) => match $parse(v) {
                    Ok(x) => Some(x),
                    Err(e) => {
                        errors.push(format!("line {line}: {}: {e}", $key));
                        None
                    }
                },
            }
        };
    }

    let experiment: Option<Experiment> = field!("experiment", None, str::parse::<Experiment>);
    if !raw.contains_key("experiment") {
        errors.push("missing required key `experiment`".into());
    }
    let horizon: Option<usize> = field!("T", None, |v: &str| v.parse::<usize>().map_err(|e| e.to_string()));
    let horizon_grid: Option<Vec<usize>> = field!("T_grid", None, parse_list::<usize>);
    let c: Option<f64> = field!("c", Some(1.0), |v: &str| v.parse::<f64>().map_err(|e| e.to_string()));
    let trials: Option<u64> = field!("trials", Some(1000), |v: &str| v.parse::<u64>().map_err(|e| e.to_string()));
    let delta_grid: Option<Vec<f64>> = field!("delta_grid", Some(vec![0.2, 0.1, 0.05, 0.01]), parse_list::<f64>);
    let seed: Option<u64> = field!("seed", Some(0), |v: &str| v.parse::<u64>().map_err(|e| e.to_string()));
    let out_dir: Option<PathBuf> = field!("out_dir", None, |v: &str| Ok::<_, String>(PathBuf::from(v)));
    let k_list: Option<Vec<usize>> = field!("k_list", None, parse_list::<usize>);
    let alpha: Option<f64> = field!("alpha", Some(2.0), |v: &str| v.parse::<f64>().map_err(|e| e.to_string()));
    let lipschitz: Option<f64> = field!("L", Some(3.0), |v: &str| v.parse::<f64>().map_err(|e| e.to_string()));
    let noise: Option<NoiseSpec> = field!("noise", Some(NoiseSpec::Rademacher1d), str::parse::<NoiseSpec>);

    if let Some(t) = horizon {
        if t < 2 {
            errors.push("T must be ≥ 2".into());
        }
    }
    if let Some(grid) = &horizon_grid {
        if grid.iter().any(|&t| t < 2) {
            errors.push("every T in T_grid must be ≥ 2".into());
        }
    }
    if let Some(c) = c {
        if !(c >= 1.0 && c.is_finite()) {
            errors.push(format!("c must be ≥ 1 (got {c})"));
        }
    }
    if trials == Some(0) {
        errors.push("trials must be positive".into());
    }
    if let Some(grid) = &delta_grid {
        if grid.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
            errors.push("every delta in delta_grid must lie in (0, 1)".into());
        }
    }
    for (name, v) in [("alpha", alpha), ("L", lipschitz)] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                errors.push(format!("{name} must be positive (got {v})"));
            }
        }
    }

    if let Some(e) = experiment {
        use Experiment::*;
        let needs_t = !matches!(e, QuadraticQuantiles);
        if needs_t && !raw.contains_key("T") {
            errors.push(format!("{e} requires `T`"));
        }
        if e == QuadraticQuantiles && !raw.contains_key("T_grid") && !raw.contains_key("T") {
            errors.push(format!("{e} requires `T_grid` (or `T`)"));
        }
        if e == SuffixLower {
            match (&k_list, horizon) {
                (None, _) if !raw.contains_key("k_list") => errors.push(format!("{e} requires `k_list`")),
                (Some(ks), Some(t)) if ks.iter().any(|&k| k == 0 || k > t) => {
                    errors.push(format!("every k in k_list must lie in [1, T] (T = {t})"))
                }
                _ => {}
            }
        }
        if e == LbdeltaSuffix {
            if let Some(t) = horizon {
                if t % 4 != 0 {
                    errors.push(format!("{e} requires T to be a multiple of 4 (got {t})"));
                }
            }
        }
    }

    if !errors.is_empty() {
        return Err(ConfigError(errors));
    }
    let horizon_value = horizon.unwrap_or(0);
    Ok(ExperimentConfig {
        experiment: experiment.expect("validated"),
        horizon: horizon_value,
        horizon_grid: horizon_grid.unwrap_or_else(|| if horizon_value > 0 { vec![horizon_value] } else { Vec::new() }),
        c: c.expect("defaulted"),
        trials: trials.expect("defaulted"),
        delta_grid: delta_grid.expect("defaulted"),
        seed: seed.expect("defaulted"),
        out_dir,
        k_list: k_list.unwrap_or_default(),
        alpha: alpha.expect("defaulted"),
        lipschitz: lipschitz.expect("defaulted"),
        noise: noise.expect("defaulted"),
    })
}
