use std::io::{self, Write};

use crate::export::real;

/// Two-sided 95% normal quantile.
pub const WILSON_Z95: f64 = 1.959_963_984_540_054;

/// 95% Wilson score interval for `hits` successes out of `trials`.
pub fn wilson_interval(hits: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0, "Wilson interval needs at least one trial");
    assert!(hits <= trials, "more hits than trials");
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = WILSON_Z95 * WILSON_Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

/// Empirical tail probability with its Wilson interval and the theoretical bound.
#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    /// Confidence parameter the threshold was derived from, if any.
    pub delta: Option<f64>,
    pub threshold: f64,
    pub hits: u64,
    pub trials: u64,
    pub empirical_prob: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bound: f64,
}

impl TailReport {
    pub fn new(delta: Option<f64>, threshold: f64, hits: u64, trials: u64, bound: f64) -> Self {
        let (ci_low, ci_high) = wilson_interval(hits, trials);
        TailReport {
            delta,
            threshold,
            hits,
            trials,
            empirical_prob: hits as f64 / trials as f64,
            ci_low,
            ci_high,
            bound,
        }
    }

    /// Upper confidence limit within `bound + slack`.
    pub fn within_bound(&self, slack: f64) -> bool {
        self.ci_high <= self.bound + slack
    }

    /// The interval does not lie wholly above the bound.
    pub fn consistent(&self) -> bool {
        self.ci_low <= self.bound
    }
}

/// `delta,threshold,empirical,ci_low,ci_high,bound,trials`.
pub fn write_tail_csv<W: Write>(reports: &[TailReport], mut out: W) -> io::Result<()> {
    writeln!(out, "delta,threshold,empirical,ci_low,ci_high,bound,trials")?;
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.delta.map(real).unwrap_or_default(),
            real(r.threshold),
            real(r.empirical_prob),
            real(r.ci_low),
            real(r.ci_high),
            real(r.bound),
            r.trials
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 10 of 100: centre (0.1 + z²/200)/(1 + z²/100).
        let (lo, hi) = wilson_interval(10, 100);
        assert!((lo - 0.055_229_137_060_675_1).abs() < 1e-9, "{lo}");
        assert!((hi - 0.174_365_661_504_913_45).abs() < 1e-9, "{hi}");
        let (lo, hi) = wilson_interval(0, 50);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.08);
        let (lo, hi) = wilson_interval(50, 50);
        assert_eq!(hi, 1.0);
        assert!(lo > 0.92);
    }

    #[test]
    fn report_orders_interval() {
        for hits in [0, 1, 7, 500, 999, 1000] {
            let r = TailReport::new(None, 1.0, hits, 1000, 0.5);
            assert!(r.ci_low <= r.empirical_prob && r.empirical_prob <= r.ci_high);
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_tail_csv(&[TailReport::new(Some(0.1), 2.0, 3, 10, 0.27), TailReport::new(None, 1.0, 0, 5, 1.0)], &mut buf)
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "delta,threshold,empirical,ci_low,ci_high,bound,trials");
        assert!(lines[1].starts_with("1.0000000000000001e-1,2.0000000000000000e0,"), "{}", lines[1]);
        assert!(lines[1].ends_with(",10"));
        assert!(lines[2].starts_with(",1.0"));
    }
}
