//! Settings from a `key = value` file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use pwlmilp::Error;
use serde::Deserialize;

/// Every key is optional; unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub solver: Option<String>,
    pub time_limit: Option<f64>,
    /// Candidate budget for conflict and blocking enumeration.
    pub budget: Option<u128>,
    pub max_iter: Option<usize>,
    pub max_splits: Option<usize>,
    pub node_limit: Option<u64>,
    pub eps: Option<f64>,
    pub alpha_lb: Option<f64>,
    pub theta: Option<f64>,
}

impl CliConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let c: CliConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Values from `flags` win.
    pub fn merge(self, flags: CliConfig) -> Result<Self> {
        let c = CliConfig {
            seed: flags.seed.or(self.seed),
            out: flags.out.or(self.out),
            solver: flags.solver.or(self.solver),
            time_limit: flags.time_limit.or(self.time_limit),
            budget: flags.budget.or(self.budget),
            max_iter: flags.max_iter.or(self.max_iter),
            max_splits: flags.max_splits.or(self.max_splits),
            node_limit: flags.node_limit.or(self.node_limit),
            eps: flags.eps.or(self.eps),
            alpha_lb: flags.alpha_lb.or(self.alpha_lb),
            theta: flags.theta.or(self.theta),
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg).into());
        if let Some(t) = self.time_limit {
            if !(t > 0.0) {
                return bad(format!("time_limit must be positive, got {t}"));
            }
        }
        if self.budget == Some(0) || self.node_limit == Some(0) {
            return bad("budgets must be positive".into());
        }
        if let Some(e) = self.eps {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("eps must be positive, got {e}"));
            }
        }
        if let Some(a) = self.alpha_lb {
            if !(a > 0.0 && a < 20.0) {
                return bad(format!("alpha_lb must lie in (0, 20), got {a}"));
            }
        }
        if let Some(t) = self.theta {
            if !(t > 0.0 && t <= 0.5) {
                return bad(format!("theta must lie in (0, 0.5], got {t}"));
            }
        }
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    /// The configured command, else the environment's.
    pub fn solver_cmd(&self) -> Option<String> {
        self.solver.clone().or_else(pwlmilp::solver::solver_from_env)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win() {
        let file = CliConfig::parse("seed = 3\neps = 0.2\nsolver = \"cbc\"\n").unwrap();
        let flags = CliConfig { seed: Some(7), ..Default::default() };
        let c = file.merge(flags).unwrap();
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.eps, Some(0.2));
        assert_eq!(c.solver.as_deref(), Some("cbc"));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(CliConfig::parse("theta = 0.9\n").is_err());
        assert!(CliConfig::parse("colour = 1\n").is_err());
        assert!(CliConfig::parse("eps = -1\n").is_err());
    }
}
