use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QsvError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

impl FromStr for Precision {
    type Err = QsvError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            _ => Err(QsvError::Config(format!("unknown precision `{s}` (double | extended)"))),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        })
    }
}

/// Ranges `|q|` and `arg q` (radians) are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QSpec {
    pub modulus: [f64; 2],
    #[serde(default = "full_circle")]
    pub phase: [f64; 2],
}

fn full_circle() -> [f64; 2] {
    [-std::f64::consts::PI, std::f64::consts::PI]
}

impl QSpec {
    pub fn range(lo: f64, hi: f64) -> Self {
        Self {
            modulus: [lo, hi],
            phase: full_circle(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.modulus;
        if !(lo > 0.0 && lo <= hi && hi < 1.0) {
            return Err(QsvError::Config(format!("|q| range [{lo}, {hi}] must lie in (0, 1)")));
        }
        if !(self.phase[0] <= self.phase[1] && self.phase.iter().all(|p| p.is_finite())) {
            return Err(QsvError::Config(format!("invalid phase range {:?}", self.phase)));
        }
        Ok(())
    }
}

/// `modulus` or `modulus,phase`, each either a number or `lo..hi`.
impl FromStr for QSpec {
    type Err = QsvError;

    fn from_str(s: &str) -> Result<Self> {
        let range = |t: &str| -> Result<[f64; 2]> {
            let num = |u: &str| {
                u.trim()
                    .parse::<f64>()
                    .map_err(|_| QsvError::Config(format!("cannot parse `{u}` in --q {s}")))
            };
            match t.split_once("..") {
                Some((a, b)) => Ok([num(a)?, num(b)?]),
                None => {
                    let v = num(t)?;
                    Ok([v, v])
                }
            }
        };
        let spec = match s.split_once(',') {
            Some((m, p)) => QSpec {
                modulus: range(m)?,
                phase: range(p)?,
            },
            None => QSpec {
                modulus: range(s)?,
                phase: full_circle(),
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// One suite run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: String,
    /// Defaults to the suite's own range.
    #[serde(default)]
    pub q: Option<QSpec>,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default = "default_draws")]
    pub draws: usize,
    #[serde(default)]
    pub seed: u64,
    /// Overrides the precision's verification tolerance.
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub series_tol: Option<f64>,
    /// Largest family index for the biorthogonality suites.
    #[serde(default)]
    pub max_index: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_draws() -> usize {
    10
}

impl SuiteConfig {
    pub fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            q: None,
            precision: Precision::Double,
            draws: default_draws(),
            seed: 0,
            tol: None,
            series_tol: None,
            max_index: None,
            out: None,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let c: Self = toml::from_str(s).map_err(|e| QsvError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.draws == 0 {
            return Err(QsvError::Config("draws must be at least 1".into()));
        }
        for (name, t) in [("tol", self.tol), ("series_tol", self.series_tol)] {
            if let Some(t) = t {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(QsvError::Config(format!("{name} must be positive, got {t}")));
                }
            }
        }
        if let Some(q) = &self.q {
            q.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_toml() {
        let c = SuiteConfig::from_toml_str(
            r#"
            suite = "gi"
            draws = 3
            seed = 99
            precision = "extended"
            [q]
            modulus = [0.25, 0.4]
            "#,
        )
        .unwrap();
        assert_eq!(c.suite, "gi");
        assert_eq!(c.precision, Precision::Extended);
        assert_eq!(c.q.unwrap().phase, full_circle());
        assert!(SuiteConfig::from_toml_str("suite = \"gi\"\ndraws = 0").is_err());
        assert!(SuiteConfig::from_toml_str("suite = \"gi\"\nbogus = 1").is_err());
        assert!(SuiteConfig::from_toml_str("suite = \"gi\"\ntol = -1.0").is_err());
    }

    #[test]
    fn parses_q_flag() {
        let q: QSpec = "0.3".parse().unwrap();
        assert_eq!(q.modulus, [0.3, 0.3]);
        let q: QSpec = "0.2..0.5,0.1".parse().unwrap();
        assert_eq!((q.modulus, q.phase), ([0.2, 0.5], [0.1, 0.1]));
        assert!("1.2".parse::<QSpec>().is_err());
        assert!("x".parse::<QSpec>().is_err());
    }
}
