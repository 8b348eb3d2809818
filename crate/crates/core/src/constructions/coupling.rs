//! Rescaling an `α`-strongly convex, `L`-Lipschitz problem to a 1/1 one.

use rand::Rng;

use crate::domain::Domain;
use crate::error::{LabError, Result};
use crate::schedule::StepSchedule;
use crate::sgd::{sgd_run, Oracle, OracleResponse, Query, RunTrace};
use crate::vector::Vector;

/// `x ↦ outer · f(inner · x)`, with responses scaled by `outer · inner`.
#[derive(Debug, Clone)]
pub struct RescaledOracle<O> {
    base: O,
    outer: f64,
    inner: f64,
}

impl<O: Oracle> RescaledOracle<O> {
    pub fn new(base: O, outer: f64, inner: f64) -> Result<Self> {
        for (name, v) in [("outer", outer), ("inner", inner)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LabError::invalid(name, format!("{v} is not a positive real")));
            }
        }
        Ok(RescaledOracle { base, outer, inner })
    }

    /// `g(x) = (α/L²) f((L/α) x)`, 1-strongly convex and 1-Lipschitz when
    /// `f` is `α`-strongly convex and `L`-Lipschitz.
    pub fn normalizing(base: O, alpha: f64, lipschitz: f64) -> Result<Self> {
        if !(alpha > 0.0 && lipschitz > 0.0) {
            return Err(LabError::invalid("alpha/L", "both must be positive"));
        }
        Self::new(base, alpha / (lipschitz * lipschitz), lipschitz / alpha)
    }

    pub fn base(&self) -> &O {
        &self.base
    }
}

impl<O: Oracle> Oracle for RescaledOracle<O> {
    fn value(&self, x: &Vector) -> f64 {
        self.outer * self.base.value(&x.scaled(self.inner))
    }

    fn query<R: Rng + ?Sized>(&self, x: &Vector, t: usize, rng: &mut R) -> Query {
        let q = self.base.query(&x.scaled(self.inner), t, rng);
        let s = self.outer * self.inner;
        Query {
            value: self.outer * q.value,
            response: OracleResponse {
                ghat: q.response.ghat.scaled(s),
                zhat: q.response.zhat.map(|z| z.scaled(s)),
                meta: q.response.meta,
            },
        }
    }
}

/// Paired runs on `f` and on its normalization `g`.
#[derive(Debug, Clone)]
pub struct CoupledRuns {
    /// SGD on `f` with `η_t = 1/(αt)` over the original domain.
    pub trace_f: RunTrace,
    /// SGD on `g` with `η_t = 1/t` over the domain scaled by `α/L`.
    pub trace_g: RunTrace,
    /// `max_t ‖x̃_t − (α/L) x_t‖_∞`.
    pub max_deviation: f64,
}

/// Run both processes on a replay of the same random stream and measure how
/// far the `g` iterates drift from the rescaled `f` iterates.
pub fn couple_runs<O, R>(
    f_oracle: &O,
    alpha: f64,
    lipschitz: f64,
    domain: &Domain,
    x1: &Vector,
    horizon: usize,
    rng: &R,
) -> Result<CoupledRuns>
where
    O: Oracle,
    R: Rng + Clone,
{
    x1.ensure_dim(domain.dim())?;
    let g_oracle = RescaledOracle::normalizing(f_oracle, alpha, lipschitz)?;
    let ratio = alpha / lipschitz;
    let trace_f = sgd_run(
        f_oracle,
        domain,
        x1,
        &StepSchedule::inverse_alpha_t(alpha)?,
        horizon,
        &mut rng.clone(),
    )?;
    let trace_g = sgd_run(
        &g_oracle,
        &domain.scaled(ratio)?,
        &x1.scaled(ratio),
        &StepSchedule::InverseT,
        horizon,
        &mut rng.clone(),
    )?;
    let max_deviation = trace_f
        .iterates()
        .iter()
        .zip(trace_g.iterates())
        .map(|(x, xt)| xt.dist_inf(&x.scaled(ratio)))
        .fold(0.0, f64::max);
    Ok(CoupledRuns {
        trace_f,
        trace_g,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::StronglyConvexInstance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_reduction() {
        let inst = StronglyConvexInstance::new(16).unwrap();
        let domain = Domain::unit_ball(16).unwrap();
        let runs = couple_runs(&inst, 1.0, 1.0, &domain, &Vector::zeros(16), 16, &ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(runs.max_deviation, 0.0);
        assert_eq!(runs.trace_f.iterates(), runs.trace_g.iterates());
    }

    #[test]
    fn scaled_adversarial_instance() {
        // f(x) = ½ f₀(2x) on the ball of radius ½ is 2-strongly convex and 3-Lipschitz.
        let inst = StronglyConvexInstance::new(64).unwrap();
        let f = RescaledOracle::new(&inst, 0.5, 2.0).unwrap();
        let domain = Domain::ball(64, 0.5).unwrap();
        let x1 = Vector::zeros(64);
        let runs = couple_runs(&f, 2.0, 3.0, &domain, &x1, 64, &ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert!(runs.max_deviation <= 1e-10, "{}", runs.max_deviation);
        assert_eq!(runs.trace_g.x(1), &x1.scaled(2.0 / 3.0));
        // The f-run is the adversarial run scaled by ½.
        let z = inst.predicted_iterate(65).unwrap();
        assert!(runs.trace_f.x(65).dist_inf(&z.scaled(0.5)) < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        let inst = StronglyConvexInstance::new(4).unwrap();
        assert!(RescaledOracle::normalizing(&inst, 0.0, 1.0).is_err());
        assert!(RescaledOracle::new(&inst, 1.0, -1.0).is_err());
        let domain = Domain::unit_ball(4).unwrap();
        assert!(couple_runs(&inst, 1.0, 1.0, &domain, &Vector::zeros(3), 4, &ChaCha8Rng::seed_from_u64(0)).is_err());
    }
}
