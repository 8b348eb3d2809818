use std::io::BufRead;
use std::ops::RangeInclusive;

use crate::error::{LabError, Result};

/// `x_2..x_{T+1}` for noisy SGD on `½x²` from `x_1 = 0` with `η_t = 1/t`:
/// the running means of `ẑ`.
pub fn running_means(z: &[f64]) -> Vec<f64> {
    let mut sum = 0.0;
    z.iter()
        .enumerate()
        .map(|(i, &zi)| {
            sum += zi;
            sum / (i + 1) as f64
        })
        .collect()
}

/// [`running_means`] restricted to ±1 sign sequences.
pub fn lbdelta_closed_form(signs: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = signs.iter().find(|&&s| s != 1.0 && s != -1.0) {
        return Err(LabError::invalid("signs", format!("entry {bad} is not ±1")));
    }
    Ok(running_means(signs))
}

/// `A_t = Σ_{i=t}^{T} 1/i`.
#[allow(non_snake_case)]
pub fn suffix_A(horizon: usize, t: usize) -> Result<f64> {
    LabError::check_range("t", t, 1, horizon)?;
    Ok((t..=horizon).rev().map(|i| 1.0 / i as f64).sum())
}

/// Noise magnitudes for the suffix-average tightness example.
#[derive(Debug, Clone, PartialEq)]
pub struct SuffixNoiseSpec {
    horizon: usize,
    a: Vec<f64>,
}

impl SuffixNoiseSpec {
    /// Requires `T` to be a positive multiple of 4.
    pub fn new(horizon: usize) -> Result<Self> {
        if horizon == 0 || horizon % 4 != 0 {
            return Err(LabError::invalid("T", format!("{horizon} is not a positive multiple of 4")));
        }
        let mut a = vec![0.0; horizon];
        let mut acc = 0.0;
        for t in (1..=horizon).rev() {
            acc += 1.0 / t as f64;
            a[t - 1] = acc;
        }
        Ok(SuffixNoiseSpec { horizon, a })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `A_t`, `1 ≤ t ≤ T`.
    pub fn a(&self, t: usize) -> f64 {
        self.a[t - 1]
    }

    /// `T/2 ..= 3T/4`.
    pub fn support(&self) -> RangeInclusive<usize> {
        self.horizon / 2..=3 * self.horizon / 4
    }

    /// `1/(4A_t)` on the support, `None` elsewhere.
    pub fn magnitude(&self, t: usize) -> Option<f64> {
        self.support().contains(&t).then(|| 1.0 / (4.0 * self.a(t)))
    }

    /// Full `ẑ_1..ẑ_T` for signs in `{−1, 0, +1}` given on the support.
    pub fn noise(&self, signs: &[f64]) -> Result<Vec<f64>> {
        let support = self.support();
        if signs.len() != support.clone().count() {
            return Err(LabError::Mismatch(format!(
                "{} signs for a support of {}",
                signs.len(),
                support.count()
            )));
        }
        if let Some(bad) = signs.iter().find(|&&s| s != 1.0 && s != -1.0 && s != 0.0) {
            return Err(LabError::invalid("signs", format!("entry {bad} is not in {{-1, 0, 1}}")));
        }
        let mut z = vec![0.0; self.horizon];
        for (t, &s) in support.zip(signs) {
            z[t - 1] = s / (4.0 * self.a(t));
        }
        Ok(z)
    }
}

/// Both sides of the suffix-average identity: the mean of `x_{T/2+1..T+1}`
/// from the closed form, and `(1/(T/2+1)) Σ_{t=T/2}^{3T/4} A_t ẑ_t`.
pub fn suffix_average_identity(signs: &[f64], horizon: usize) -> Result<(f64, f64)> {
    let spec = SuffixNoiseSpec::new(horizon)?;
    let z = spec.noise(signs)?;
    let x = running_means(&z);
    let half = horizon / 2;
    let denom = (half + 1) as f64;
    // x[j] holds x_{j+2}; x_{T/2+1..T+1} are x[T/2−1..T−1].
    let lhs = x[half - 1..].iter().sum::<f64>() / denom;
    let rhs = spec.support().map(|t| spec.a(t) * z[t - 1]).sum::<f64>() / denom;
    Ok((lhs, rhs))
}

/// Read one ±1 per line; blank lines and `#` comments are skipped.
pub fn read_signs<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| LabError::Parse {
            line: n + 1,
            message: e.to_string(),
        })?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        match body {
            "1" | "+1" => out.push(1.0),
            "-1" => out.push(-1.0),
            other => {
                return Err(LabError::Parse {
                    line: n + 1,
                    message: format!("expected +1 or -1, got `{other}`"),
                })
            }
        }
    }
    Ok(out)
}
