use std::io::{self, Write};

use rand::Rng;

use super::Construction;
use crate::error::{LabError, Result};
use crate::sgd::{drive, sgd_run_with, Record, RunTrace};
use crate::vector::Vector;

/// One row of a `check,index,lhs,rhs,pass` report; `pass` means `lhs > rhs`
/// for bounds and `lhs ≤ rhs` for deviations, as stated by the check name.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateRow {
    pub check: String,
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CertificateReport {
    pub rows: Vec<CertificateRow>,
}

impl CertificateReport {
    /// Record `lhs > rhs` (strict).
    pub fn exceeds(&mut self, check: &str, index: usize, lhs: f64, rhs: f64) {
        self.push(check, index, lhs, rhs, lhs > rhs);
    }

    /// Record `lhs ≥ rhs`.
    pub fn at_least(&mut self, check: &str, index: usize, lhs: f64, rhs: f64) {
        self.push(check, index, lhs, rhs, lhs >= rhs);
    }

    /// Record `lhs ≤ rhs`.
    pub fn at_most(&mut self, check: &str, index: usize, lhs: f64, rhs: f64) {
        self.push(check, index, lhs, rhs, lhs <= rhs);
    }

    fn push(&mut self, check: &str, index: usize, lhs: f64, rhs: f64, pass: bool) {
        self.rows.push(CertificateRow {
            check: check.to_owned(),
            index,
            lhs,
            rhs,
            pass,
        });
    }

    pub fn extend(&mut self, other: CertificateReport) {
        self.rows.extend(other.rows);
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CertificateRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "check,index,lhs,rhs,pass")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.check,
                r.index,
                crate::export::real(r.lhs),
                crate::export::real(r.rhs),
                r.pass
            )?;
        }
        Ok(())
    }
}

/// Worst sup-norm gap between a trace and the closed-form iterates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateMatch {
    pub max_deviation: f64,
    pub worst_t: usize,
}

pub fn iterate_identity<C: Construction + ?Sized>(trace: &RunTrace, inst: &C) -> Result<IterateMatch> {
    if trace.horizon() != inst.horizon() || trace.dim() != inst.horizon() {
        return Err(LabError::Mismatch(format!(
            "trace has T = {}, dimension {}; instance has T = {}",
            trace.horizon(),
            trace.dim(),
            inst.horizon()
        )));
    }
    let mut best = IterateMatch {
        max_deviation: 0.0,
        worst_t: 1,
    };
    for t in 1..=trace.horizon() + 1 {
        let dev = trace.x(t).dist_inf(&inst.predicted_iterate(t)?);
        if dev > best.max_deviation {
            best = IterateMatch {
                max_deviation: dev,
                worst_t: t,
            };
        }
    }
    Ok(best)
}

/// Run SGD on `inst` from the origin without storing the trace, comparing
/// each iterate with the closed form as it is produced. Returns the match
/// and `f(x_{T+1})`.
pub fn stream_iterate_identity<C, R>(inst: &C, rng: &mut R) -> Result<(IterateMatch, f64)>
where
    C: Construction,
    R: Rng + ?Sized,
{
    let horizon = inst.horizon();
    let mut best = IterateMatch {
        max_deviation: 0.0,
        worst_t: 1,
    };
    let mut failure = None;
    let x1 = Vector::zeros(horizon);
    let finish = drive(inst, &inst.domain(), &x1, &inst.schedule(), horizon, rng, |step| {
        if failure.is_some() {
            return;
        }
        match inst.predicted_iterate(step.t + 1) {
            Ok(z) => {
                let dev = step.next.dist_inf(&z);
                if dev > best.max_deviation {
                    best = IterateMatch {
                        max_deviation: dev,
                        worst_t: step.t + 1,
                    };
                }
            }
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((best, finish.value))
}

/// `f(Σ λ_t x_t)` over the instance's suffix window for `k`; `weights` are
/// normalized to sum to one.
pub fn suffix_combination_value<C: Construction + ?Sized>(
    trace: &RunTrace,
    inst: &C,
    k: usize,
    weights: &[f64],
) -> Result<f64> {
    let window = inst.suffix_window(k)?;
    if weights.len() != k {
        return Err(LabError::Mismatch(format!("{} weights for k = {k}", weights.len())));
    }
    if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
        return Err(LabError::invalid("weights", "must be finite and non-negative"));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(LabError::invalid("weights", "must not all be zero"));
    }
    let point = Vector::combination(window.zip(weights).map(|(t, &w)| (w / total, trace.x(t))))
        .expect("k ≥ 1");
    Ok(inst.eval(&point).0)
}

/// Run SGD on `inst` from the origin and certify the iterate identity, the
/// final-iterate bound, and the suffix bounds for every `k` in `ks` (the
/// uniform combination plus `random_combos` random ones drawn from `rng`).
///
/// Returns the trace alongside the report.
pub fn deterministic_suite<C, R>(
    inst: &C,
    ks: &[usize],
    random_combos: usize,
    rng: &mut R,
) -> Result<(RunTrace, CertificateReport)>
where
    C: Construction,
    R: Rng + ?Sized,
{
    let horizon = inst.horizon();
    let trace = sgd_run_with(
        inst,
        &inst.domain(),
        &Vector::zeros(horizon),
        &inst.schedule(),
        horizon,
        rng,
        Record::Iterates,
    )?;
    let mut report = CertificateReport::default();
    let matched = iterate_identity(&trace, inst)?;
    report.at_most("iterate_identity", matched.worst_t, matched.max_deviation, 1e-9);
    report.exceeds("final_iterate_bound", horizon + 1, trace.f(horizon + 1), inst.final_lower_bound()?);
    for &k in ks {
        let bound = inst.suffix_lower_bound(k)?;
        let uniform = suffix_combination_value(&trace, inst, k, &vec![1.0; k])?;
        report.exceeds("suffix_uniform", k, uniform, bound);
        for _ in 0..random_combos {
            let weights: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
            let value = suffix_combination_value(&trace, inst, k, &weights)?;
            report.exceeds("suffix_random", k, value, bound);
        }
    }
    Ok((trace, report))
}
