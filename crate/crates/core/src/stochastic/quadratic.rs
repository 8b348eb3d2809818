use rand::Rng;

use super::NoiseModel;
use crate::domain::Domain;
use crate::error::{LabError, Result};
use crate::sgd::{Oracle, OracleResponse, Query};
use crate::vector::Vector;

/// `f(x) = ½‖x‖²` on the unit ball, or on `[−1, 1]` in one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticInstance {
    domain: Domain,
}

impl QuadraticInstance {
    pub fn ball(dim: usize) -> Result<Self> {
        Ok(QuadraticInstance {
            domain: Domain::unit_ball(dim)?,
        })
    }

    pub fn interval() -> Self {
        QuadraticInstance {
            domain: Domain::cube(1, -1.0, 1.0).expect("valid interval"),
        }
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn value(&self, x: &Vector) -> f64 {
        0.5 * x.norm_sq()
    }
}

/// Returns `ĝ = x − ẑ` with `ẑ` drawn from the noise model.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticOracle {
    instance: QuadraticInstance,
    noise: NoiseModel,
}

impl QuadraticOracle {
    pub fn new(instance: QuadraticInstance, noise: NoiseModel) -> Result<Self> {
        if let Some(d) = noise.dim() {
            if d != instance.dim() {
                return Err(LabError::DimensionMismatch {
                    expected: instance.dim(),
                    got: d,
                });
            }
        }
        Ok(QuadraticOracle { instance, noise })
    }

    pub fn instance(&self) -> &QuadraticInstance {
        &self.instance
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn respond<R: Rng + ?Sized>(&self, x: &Vector, t: usize, rng: &mut R) -> OracleResponse {
        match self.noise.sample(t, rng) {
            None => OracleResponse::exact(x.clone(), None),
            Some(z) => OracleResponse::noisy(x - &z, z),
        }
    }
}

impl Oracle for QuadraticOracle {
    fn value(&self, x: &Vector) -> f64 {
        self.instance.value(x)
    }

    fn query<R: Rng + ?Sized>(&self, x: &Vector, t: usize, rng: &mut R) -> Query {
        Query {
            value: self.instance.value(x),
            response: self.respond(x, t, rng),
        }
    }
}

/// One oracle call at step `t`.
pub fn quadratic_oracle<R: Rng + ?Sized>(
    inst: &QuadraticInstance,
    x: &Vector,
    noise: &NoiseModel,
    t: usize,
    rng: &mut R,
) -> Result<OracleResponse> {
    x.ensure_dim(inst.dim())?;
    if !inst.domain().contains(x) {
        return Err(LabError::Infeasible);
    }
    let oracle = QuadraticOracle::new(inst.clone(), noise.clone())?;
    Ok(oracle.respond(x, t, rng))
}
