//! The projected stochastic subgradient loop and its output strategies.
//!
//! All public indices are 1-based: iterates run `x_1..x_{T+1}`, oracle
//! responses `1..T`, pre-projection points `y_2..y_{T+1}`.

use rand::Rng;

use crate::domain::Domain;
use crate::error::{LabError, Result};
use crate::schedule::StepSchedule;
use crate::vector::Vector;

/// What an oracle hands back at a query point.
///
/// `ghat = g − zhat` where `g` is the subgradient the oracle intends. A
/// deterministic oracle leaves `zhat` as `None`, meaning exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResponse {
    pub ghat: Vector,
    pub zhat: Option<Vector>,
    /// Which hyperplane or branch produced the answer, when meaningful.
    pub meta: Option<usize>,
}

impl OracleResponse {
    pub fn exact(ghat: Vector, meta: Option<usize>) -> Self {
        OracleResponse {
            ghat,
            zhat: None,
            meta,
        }
    }

    pub fn noisy(ghat: Vector, zhat: Vector) -> Self {
        OracleResponse {
            ghat,
            zhat: Some(zhat),
            meta: None,
        }
    }

    /// The intended subgradient `g = ghat + zhat`.
    pub fn subgradient(&self) -> Vector {
        match &self.zhat {
            Some(z) => &self.ghat + z,
            None => self.ghat.clone(),
        }
    }

    /// `⟨zhat, v⟩`, zero for a deterministic response.
    pub fn noise_dot(&self, v: &Vector) -> f64 {
        self.zhat.as_ref().map_or(0.0, |z| z.dot(v))
    }

    fn is_finite(&self) -> bool {
        self.ghat.is_finite() && self.zhat.as_ref().is_none_or(Vector::is_finite)
    }
}

/// Function value and oracle response at one query point.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub value: f64,
    pub response: OracleResponse,
}

/// A (possibly stochastic) first-order oracle for a convex function.
pub trait Oracle {
    /// `f(x)` without consuming randomness.
    fn value(&self, x: &Vector) -> f64;

    /// `f(x)` together with a stochastic subgradient at step `t`.
    fn query<R: Rng + ?Sized>(&self, x: &Vector, t: usize, rng: &mut R) -> Query;
}

impl<O: Oracle + ?Sized> Oracle for &O {
    fn value(&self, x: &Vector) -> f64 {
        (**self).value(x)
    }

    fn query<R: Rng + ?Sized>(&self, x: &Vector, t: usize, rng: &mut R) -> Query {
        (**self).query(x, t, rng)
    }
}

/// How much of a run to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Record {
    /// Iterates, pre-projection points, responses and values.
    #[default]
    Full,
    /// Iterates and values only.
    Iterates,
}

/// One executed step, as seen by a [`drive`] visitor.
#[derive(Debug)]
pub struct Step<'a> {
    pub t: usize,
    pub x: &'a Vector,
    pub value: f64,
    pub eta: f64,
    pub response: &'a OracleResponse,
    pub y: &'a Vector,
    pub next: &'a Vector,
}

/// Final state of a [`drive`] call.
#[derive(Debug, Clone, PartialEq)]
pub struct Finish {
    /// `x_{T+1}`
    pub x: Vector,
    /// `f(x_{T+1})`
    pub value: f64,
}

/// Run `horizon` projected steps from `x1`, handing each step to `visit`
/// without storing anything.
pub fn drive<O, R, F>(
    oracle: &O,
    domain: &Domain,
    x1: &Vector,
    schedule: &StepSchedule,
    horizon: usize,
    rng: &mut R,
    mut visit: F,
) -> Result<Finish>
where
    O: Oracle + ?Sized,
    R: Rng + ?Sized,
    F: FnMut(&Step<'_>),
{
    if horizon == 0 {
        return Err(LabError::invalid("T", "horizon must be positive"));
    }
    x1.ensure_dim(domain.dim())?;
    if !domain.contains(x1) {
        return Err(LabError::Infeasible);
    }
    let mut x = x1.clone();
    for t in 1..=horizon {
        let Query { value, response } = oracle.query(&x, t, rng);
        if !value.is_finite() {
            return Err(LabError::NonFinite { step: t, what: "function value" });
        }
        response.ghat.ensure_dim(domain.dim())?;
        if !response.is_finite() {
            return Err(LabError::NonFinite { step: t, what: "oracle response" });
        }
        let eta = schedule.value(t)?;
        let mut y = x.clone();
        y.axpy(-eta, &response.ghat);
        if !y.is_finite() {
            return Err(LabError::NonFinite { step: t, what: "iterate" });
        }
        let next = domain.project(&y)?;
        visit(&Step {
            t,
            x: &x,
            value,
            eta,
            response: &response,
            y: &y,
            next: &next,
        });
        x = next;
    }
    let value = oracle.value(&x);
    if !value.is_finite() {
        return Err(LabError::NonFinite { step: horizon + 1, what: "function value" });
    }
    Ok(Finish { x, value })
}

/// Full record of one SGD execution.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    x: Vec<Vector>,
    y: Option<Vec<Vector>>,
    responses: Option<Vec<OracleResponse>>,
    fvals: Vec<f64>,
    schedule: StepSchedule,
    horizon: usize,
}

/// Execute SGD and keep everything.
pub fn sgd_run<O, R>(
    oracle: &O,
    domain: &Domain,
    x1: &Vector,
    schedule: &StepSchedule,
    horizon: usize,
    rng: &mut R,
) -> Result<RunTrace>
where
    O: Oracle + ?Sized,
    R: Rng + ?Sized,
{
    sgd_run_with(oracle, domain, x1, schedule, horizon, rng, Record::Full)
}

pub fn sgd_run_with<O, R>(
    oracle: &O,
    domain: &Domain,
    x1: &Vector,
    schedule: &StepSchedule,
    horizon: usize,
    rng: &mut R,
    record: Record,
) -> Result<RunTrace>
where
    O: Oracle + ?Sized,
    R: Rng + ?Sized,
{
    let full = record == Record::Full;
    let mut x = Vec::with_capacity(horizon + 1);
    let mut fvals = Vec::with_capacity(horizon + 1);
    let mut ys = Vec::with_capacity(if full { horizon } else { 0 });
    let mut responses = Vec::with_capacity(if full { horizon } else { 0 });
    x.push(x1.clone());
    let finish = drive(oracle, domain, x1, schedule, horizon, rng, |step| {
        fvals.push(step.value);
        x.push(step.next.clone());
        if full {
            ys.push(step.y.clone());
            responses.push(step.response.clone());
        }
    })?;
    fvals.push(finish.value);
    Ok(RunTrace {
        x,
        y: full.then_some(ys),
        responses: full.then_some(responses),
        fvals,
        schedule: *schedule,
        horizon,
    })
}

impl RunTrace {
    /// Assemble an iterates-only trace from externally produced points.
    pub fn from_iterates(x: Vec<Vector>, fvals: Vec<f64>, schedule: StepSchedule) -> Result<Self> {
        if x.len() < 2 {
            return Err(LabError::invalid("x", "need at least x_1 and x_2"));
        }
        if fvals.len() != x.len() {
            return Err(LabError::Mismatch(format!(
                "{} iterates but {} function values",
                x.len(),
                fvals.len()
            )));
        }
        let dim = x[0].dim();
        for v in &x {
            v.ensure_dim(dim)?;
        }
        Ok(RunTrace {
            horizon: x.len() - 1,
            x,
            y: None,
            responses: None,
            fvals,
            schedule,
        })
    }

    /// `T`, the number of oracle calls.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn dim(&self) -> usize {
        self.x[0].dim()
    }

    pub fn schedule(&self) -> &StepSchedule {
        &self.schedule
    }

    /// `x_t` for `t ∈ 1..=T+1`.
    pub fn x(&self, t: usize) -> &Vector {
        assert!((1..=self.horizon + 1).contains(&t), "iterate index {t} out of range");
        &self.x[t - 1]
    }

    /// `f(x_t)` for `t ∈ 1..=T+1`.
    pub fn f(&self, t: usize) -> f64 {
        assert!((1..=self.horizon + 1).contains(&t), "value index {t} out of range");
        self.fvals[t - 1]
    }

    /// `y_t` for `t ∈ 2..=T+1`, when recorded.
    pub fn y(&self, t: usize) -> Option<&Vector> {
        assert!((2..=self.horizon + 1).contains(&t), "pre-projection index {t} out of range");
        self.y.as_ref().map(|ys| &ys[t - 2])
    }

    /// The response to the query at `x_t`, `t ∈ 1..=T`, when recorded.
    pub fn response(&self, t: usize) -> Option<&OracleResponse> {
        assert!((1..=self.horizon).contains(&t), "response index {t} out of range");
        self.responses.as_ref().map(|rs| &rs[t - 1])
    }

    pub fn has_responses(&self) -> bool {
        self.responses.is_some()
    }

    pub fn iterates(&self) -> &[Vector] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.fvals
    }

    pub fn final_iterate(&self) -> &Vector {
        self.x(self.horizon + 1)
    }

    /// Mean of the last `k` iterates `x_{T−k+2..T+1}`, `1 ≤ k ≤ T+1`.
    pub fn suffix_average(&self, k: usize) -> Result<Vector> {
        let count = self.x.len();
        LabError::check_range("k", k, 1, count)?;
        Ok(Vector::mean(&self.x[count - k..]).expect("k ≥ 1"))
    }

    /// Mean of `x_1..x_{T+1}`.
    pub fn uniform_average(&self) -> Vector {
        Vector::mean(&self.x).expect("trace holds at least two iterates")
    }
}

/// Free-function form of [`RunTrace::suffix_average`].
pub fn suffix_average(trace: &RunTrace, k: usize) -> Result<Vector> {
    trace.suffix_average(k)
}

/// Free-function form of [`RunTrace::uniform_average`].
pub fn uniform_average(trace: &RunTrace) -> Vector {
    trace.uniform_average()
}
