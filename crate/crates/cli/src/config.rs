//! Run configuration files.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use widom_core::interval_sets::SetSpec;
use widom_core::measure::MeasureSpec;
use widom_core::{Error, Result};

/// Accepted value of the `schema` field.
pub const SCHEMA: &str = "widom-run/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    pub set: SetSpec,
    pub measure: MeasureSpec,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default = "Diagnostic::all")]
    pub diagnostics: Vec<Diagnostic>,
    /// Output directory; the `--out` flag takes precedence.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    /// Number of recurrence levels.
    pub n: usize,
    /// Defaults to `n / 2`.
    #[serde(default)]
    pub burn_in: Option<usize>,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    /// Gauss-Legendre order of the equilibrium solver; adaptive when absent.
    #[serde(default)]
    pub equilibrium_order: Option<usize>,
    /// Largest accepted orthonormality residual of the coefficients.
    #[serde(default = "default_tolerance")]
    pub orthonormality_tol: f64,
    /// Samples per band in density.csv.
    #[serde(default = "default_density_samples")]
    pub density_samples: usize,
}

fn default_t_max() -> usize {
    widom_core::asymptotics::DEFAULT_T_MAX
}

fn default_tolerance() -> f64 {
    1e-8
}

fn default_density_samples() -> usize {
    64
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            n: 100,
            burn_in: None,
            t_max: default_t_max(),
            equilibrium_order: None,
            orthonormality_tol: default_tolerance(),
            density_samples: default_density_samples(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Diagnostic {
    AlmostPeriod,
    Szego,
    NthRoot,
    Homogeneity,
    Sodin,
    Admissibility,
    MassStability,
}

impl Diagnostic {
    pub fn all() -> Vec<Self> {
        use Diagnostic::*;
        vec![AlmostPeriod, Szego, NthRoot, Homogeneity, Sodin, Admissibility, MassStability]
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::InvalidArgument(format!("schema {:?}, expected {SCHEMA:?}", self.schema)));
        }
        let s = &self.solver;
        if s.n < 4 {
            return Err(Error::InvalidArgument(format!("n = {} must be at least 4", s.n)));
        }
        if !(s.orthonormality_tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance {} must be positive", s.orthonormality_tol)));
        }
        if s.density_samples == 0 {
            return Err(Error::InvalidArgument("density_samples must be positive".into()));
        }
        if let Some(o) = s.equilibrium_order {
            if o < 16 {
                return Err(Error::InvalidArgument(format!("equilibrium order {o} below 16")));
            }
        }
        Ok(())
    }

    pub fn burn_in(&self) -> usize {
        self.solver.burn_in.unwrap_or(self.solver.n / 2)
    }

    pub fn wants(&self, d: Diagnostic) -> bool {
        self.diagnostics.contains(&d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_fields_and_schema() {
        let ok = r#"{"schema":"widom-run/1","set":{"bands":[[-2,2]]},"measure":{"weight":{"kind":"semicircle"}}}"#;
        let cfg = RunConfig::from_json(ok).unwrap();
        assert_eq!(cfg.solver.n, 100);
        assert_eq!(cfg.burn_in(), 50);
        assert_eq!(cfg.diagnostics.len(), 7);
        let extra = ok.replace("\"schema\"", "\"colour\":1,\"schema\"");
        assert!(RunConfig::from_json(&extra).is_err());
        let v2 = ok.replace("widom-run/1", "widom-run/2");
        assert!(RunConfig::from_json(&v2).is_err());
        let small = ok.replace("}}}", "}},\"solver\":{\"n\":3}}");
        assert!(RunConfig::from_json(&small).is_err());
    }
}
