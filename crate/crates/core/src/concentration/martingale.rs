use rand::Rng;

use super::TailReport;
use crate::error::{LabError, Result};
use crate::replicas::map_replicas;

/// Differences `d_i` and variance proxies `v_{i−1}` with their prefix sums.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleTrace {
    d: Vec<f64>,
    v: Vec<f64>,
    s: Vec<f64>,
    big_v: Vec<f64>,
}

impl MartingaleTrace {
    /// `v[i−1]` is the proxy for `d[i−1]`, i.e. `v_{i−1}` in 1-based terms.
    pub fn new(d: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if d.len() != v.len() {
            return Err(LabError::Mismatch(format!("{} differences, {} proxies", d.len(), v.len())));
        }
        if v.iter().any(|&x| !(x >= 0.0)) {
            return Err(LabError::invalid("v", "variance proxies must be non-negative"));
        }
        let prefix = |xs: &[f64]| {
            xs.iter()
                .scan(0.0, |acc, &x| {
                    *acc += x;
                    Some(*acc)
                })
                .collect::<Vec<_>>()
        };
        let s = prefix(&d);
        let big_v = prefix(&v);
        Ok(MartingaleTrace { d, v, s, big_v })
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// `S_t`, `1 ≤ t ≤ n`.
    #[allow(non_snake_case)]
    pub fn S(&self, t: usize) -> f64 {
        self.s[t - 1]
    }

    /// `V_t`, `1 ≤ t ≤ n`.
    #[allow(non_snake_case)]
    pub fn V(&self, t: usize) -> f64 {
        self.big_v[t - 1]
    }
}

/// Generators of bounded martingale difference sequences `d_i = ŵ_i b_i`
/// with Rademacher `ŵ_i`, so `v_{i−1} = b_i²` satisfies the sub-Gaussian
/// moment condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MartingaleFamily {
    /// `b_i = scale` for every step.
    Fixed { n: usize, scale: f64 },
    /// `b_1² = base` and `b_{i+1}² = clamp(base + slope·d_i, lo, hi)`: the
    /// variance feeds on the martingale's own increments.
    ChickenAndEgg { n: usize, base: f64, slope: f64, lo: f64, hi: f64 },
}

impl MartingaleFamily {
    pub fn fixed(n: usize, scale: f64) -> Result<Self> {
        if n == 0 || !(scale > 0.0 && scale.is_finite()) {
            return Err(LabError::invalid("fixed family", "need n ≥ 1 and a positive scale"));
        }
        Ok(MartingaleFamily::Fixed { n, scale })
    }

    pub fn chicken_and_egg(n: usize, base: f64, slope: f64, lo: f64, hi: f64) -> Result<Self> {
        if n == 0 {
            return Err(LabError::invalid("n", "must be positive"));
        }
        if !(lo > 0.0 && lo <= base && base <= hi && hi.is_finite() && slope >= 0.0 && slope.is_finite()) {
            return Err(LabError::invalid(
                "chicken-and-egg family",
                "need 0 < lo ≤ base ≤ hi < ∞ and slope ≥ 0",
            ));
        }
        Ok(MartingaleFamily::ChickenAndEgg { n, base, slope, lo, hi })
    }

    pub fn len(&self) -> usize {
        match *self {
            MartingaleFamily::Fixed { n, .. } | MartingaleFamily::ChickenAndEgg { n, .. } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Weights `α_i` under which `V_t ≤ Σ_{i≤t} α_i d_i + β` is the natural
    /// variance constraint for this family.
    pub fn matching_alpha(&self) -> Vec<f64> {
        match *self {
            MartingaleFamily::Fixed { n, .. } => vec![0.0; n],
            MartingaleFamily::ChickenAndEgg { n, slope, .. } => vec![slope; n],
        }
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> MartingaleTrace {
        let n = self.len();
        let mut d = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        let mut b2 = match *self {
            MartingaleFamily::Fixed { scale, .. } => scale * scale,
            MartingaleFamily::ChickenAndEgg { base, .. } => base,
        };
        for _ in 0..n {
            let w = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let di = w * b2.sqrt();
            d.push(di);
            v.push(b2);
            if let MartingaleFamily::ChickenAndEgg { base, slope, lo, hi, .. } = *self {
                b2 = (base + slope * di).clamp(lo, hi);
            }
        }
        MartingaleTrace::new(d, v).expect("proxies are positive")
    }
}

/// `exp(−x/(4α + 8β/x))`.
pub fn freedman_bound(x: f64, alpha_max: f64, beta: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(LabError::invalid("x", format!("{x} is not positive")));
    }
    if !(beta > 0.0) {
        return Err(LabError::invalid("beta", format!("{beta} is not positive")));
    }
    if !(alpha_max >= 0.0) {
        return Err(LabError::invalid("alpha", format!("{alpha_max} is negative")));
    }
    Ok((-x / (4.0 * alpha_max + 8.0 * beta / x)).exp())
}

/// Whether some `t` has `S_t ≥ x` and `V_t ≤ Σ_{i≤t} α_i d_i + β`.
pub fn freedman_event(trace: &MartingaleTrace, x: f64, beta: f64, alpha: &[f64]) -> bool {
    assert_eq!(alpha.len(), trace.len(), "one weight per difference");
    let mut weighted = 0.0;
    (1..=trace.len()).any(|t| {
        weighted += alpha[t - 1] * trace.d()[t - 1];
        trace.S(t) >= x && trace.V(t) <= weighted + beta
    })
}

fn check_alpha(alpha: &[f64], n: usize) -> Result<f64> {
    if alpha.len() != n {
        return Err(LabError::Mismatch(format!("{} weights for {n} steps", alpha.len())));
    }
    if alpha.iter().any(|&a| !(a >= 0.0 && a.is_finite())) {
        return Err(LabError::invalid("alpha", "weights must be finite and non-negative"));
    }
    Ok(alpha.iter().copied().fold(0.0, f64::max))
}

/// Estimate the event probability for several `(x, β)` settings, reusing
/// each simulated trace for all of them.
pub fn freedman_event_estimates(
    family: &MartingaleFamily,
    settings: &[(f64, f64)],
    alpha: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<TailReport>> {
    if trials == 0 {
        return Err(LabError::invalid("trials", "must be positive"));
    }
    let alpha_max = check_alpha(alpha, family.len())?;
    let bounds = settings
        .iter()
        .map(|&(x, beta)| freedman_bound(x, alpha_max, beta))
        .collect::<Result<Vec<_>>>()?;
    let flags = map_replicas(seed, trials, |_, rng| {
        let trace = family.generate(rng);
        settings
            .iter()
            .map(|&(x, beta)| freedman_event(&trace, x, beta, alpha))
            .collect::<Vec<_>>()
    });
    Ok(settings
        .iter()
        .enumerate()
        .map(|(j, &(x, _))| {
            let hits = flags.iter().filter(|f| f[j]).count() as u64;
            TailReport::new(None, x, hits, trials, bounds[j])
        })
        .collect())
}

pub fn freedman_event_estimate(
    family: &MartingaleFamily,
    x: f64,
    beta: f64,
    alpha: &[f64],
    trials: u64,
    seed: u64,
) -> Result<TailReport> {
    Ok(freedman_event_estimates(family, &[(x, beta)], alpha, trials, seed)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bound_values() {
        assert!((freedman_bound(4.0, 0.5, 1.0).unwrap() - (-1f64).exp()).abs() < 1e-15);
        let x: f64 = 3.0;
        assert!((freedman_bound(x, 0.0, 2.0).unwrap() - (-x * x / 16.0).exp()).abs() < 1e-15);
        assert!(freedman_bound(0.0, 0.0, 1.0).is_err());
        assert!(freedman_bound(1.0, 0.0, 0.0).is_err());
        assert!(freedman_bound(1.0, -1.0, 1.0).is_err());
        let mut prev = 1.0;
        for i in 1..200 {
            let b = freedman_bound(i as f64 * 0.1, 0.3, 2.0).unwrap();
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn prefix_sums() {
        let m = MartingaleTrace::new(vec![1.0, -2.0, 0.5], vec![1.0, 4.0, 0.25]).unwrap();
        assert_eq!((m.S(1), m.S(2), m.S(3)), (1.0, -1.0, -0.5));
        assert_eq!((m.V(1), m.V(2), m.V(3)), (1.0, 5.0, 5.25));
        assert!(MartingaleTrace::new(vec![1.0], vec![-1.0]).is_err());
        assert!(MartingaleTrace::new(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn chicken_and_egg_variance_follows_increments() {
        let fam = MartingaleFamily::chicken_and_egg(32, 1.0, 0.5, 0.25, 2.25).unwrap();
        let m = fam.generate(&mut ChaCha8Rng::seed_from_u64(8));
        assert_eq!(m.v()[0], 1.0);
        for i in 1..32 {
            assert_eq!(m.v()[i], (1.0 + 0.5 * m.d()[i - 1]).clamp(0.25, 2.25));
            assert_eq!(m.d()[i].abs(), m.v()[i].sqrt());
        }
        assert!(MartingaleFamily::chicken_and_egg(4, 1.0, 0.5, 0.0, 2.0).is_err());
    }

    #[test]
    fn degenerate_event_is_a_running_maximum() {
        let fam = MartingaleFamily::fixed(16, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let m = fam.generate(&mut rng);
            let hit_max = (1..=16).any(|t| m.S(t) >= 1e-9);
            assert_eq!(freedman_event(&m, 1e-9, 1e9, &[0.0; 16]), hit_max);
        }
    }

    #[test]
    fn estimate_is_within_bound() {
        let fam = MartingaleFamily::fixed(64, 1.0).unwrap();
        let r = freedman_event_estimate(&fam, 16.0, 64.0, &fam.matching_alpha(), 20_000, 5).unwrap();
        assert!((r.bound - (-0.5f64).exp()).abs() < 1e-15);
        assert!(r.within_bound(0.005));
        assert!(freedman_event_estimate(&fam, 16.0, 64.0, &[0.0; 3], 10, 5).is_err());
    }
}
