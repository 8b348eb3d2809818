//! `key=value` instance descriptors (`family=sc|lip`, `T=…`, `c=…`).

use std::fmt;
use std::str::FromStr;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    StronglyConvex,
    Lipschitz,
}

impl FromStr for Family {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sc" => Ok(Family::StronglyConvex),
            "lip" => Ok(Family::Lipschitz),
            other => Err(LabError::invalid("family", format!("unknown family `{other}` (expected sc or lip)"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::StronglyConvex => "sc",
            Family::Lipschitz => "lip",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceDescriptor {
    pub family: Family,
    pub horizon: usize,
    /// Step constant; only meaningful for the Lipschitz family.
    pub c: f64,
}

impl InstanceDescriptor {
    pub fn parse(text: &str) -> Result<Self> {
        let (mut family, mut horizon, mut c) = (None, None, 1.0);
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| LabError::Parse { line: n + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=value, got `{line}`")))?;
            let value = value.trim();
            match key.trim() {
                "family" => family = Some(value.parse()?),
                "T" => horizon = Some(value.parse().map_err(|e| parse_err(format!("T: {e}")))?),
                "c" => c = value.parse().map_err(|e| parse_err(format!("c: {e}")))?,
                other => return Err(parse_err(format!("unknown key `{other}`"))),
            }
        }
        Ok(InstanceDescriptor {
            family: family.ok_or_else(|| LabError::invalid("family", "missing"))?,
            horizon: horizon.ok_or_else(|| LabError::invalid("T", "missing"))?,
            c,
        })
    }
}

impl fmt::Display for InstanceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "family={}", self.family)?;
        writeln!(f, "T={}", self.horizon)?;
        if self.family == Family::Lipschitz {
            writeln!(f, "c={}", self.c)?;
        }
        Ok(())
    }
}
