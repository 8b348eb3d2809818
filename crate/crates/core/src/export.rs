//! Plain-text trace export.

use std::io::{self, Write};

use crate::sgd::RunTrace;

/// Format a real with 17 significant digits.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write `t,fx,norm_x,step`, one row per iterate `x_1..x_{T+1}`; `step` is
/// the schedule's `η_t` at that index.
pub fn write_trace_csv<W: Write>(trace: &RunTrace, mut out: W) -> io::Result<()> {
    writeln!(out, "t,fx,norm_x,step")?;
    for t in 1..=trace.horizon() + 1 {
        let eta = trace.schedule().value(t).expect("t ≥ 1");
        writeln!(out, "{t},{},{},{}", real(trace.f(t)), real(trace.x(t).norm()), real(eta))?;
    }
    Ok(())
}

/// One line per iterate, coordinates separated by single spaces.
pub fn write_vector_dump<W: Write>(trace: &RunTrace, mut out: W) -> io::Result<()> {
    for x in trace.iterates() {
        let line: Vec<String> = x.iter().map(|&v| real(v)).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::StepSchedule;
    use crate::vector::Vector;

    fn tiny() -> RunTrace {
        let x = vec![Vector::from_slice(&[0.0, 0.0]), Vector::from_slice(&[0.6, -0.8])];
        RunTrace::from_iterates(x, vec![0.0, 0.5], StepSchedule::InverseT).unwrap()
    }

    #[test]
    fn reals_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, f64::MAX, 0.0] {
            assert_eq!(real(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn trace_csv() {
        let mut buf = Vec::new();
        write_trace_csv(&tiny(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<_> = text.lines().collect();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0], "t,fx,norm_x,step");
        let cols: Vec<f64> = rows[2].split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols, vec![2.0, 0.5, 1.0, 0.5]);
    }

    #[test]
    fn vector_dump() {
        let mut buf = Vec::new();
        write_vector_dump(&tiny(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let parsed: Vec<Vec<f64>> = text
            .lines()
            .map(|l| l.split(' ').map(|c| c.parse().unwrap()).collect())
            .collect();
        assert_eq!(parsed, vec![vec![0.0, 0.0], vec![0.6, -0.8]]);
    }
}
