use std::path::Path;

use projkit::equation::PotentialOperatorSpec;
use projkit::integral::DiscreteMeasureSpace;
use projkit::{ConvexSetSpec, Projector};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One scenario: a set, the grids to sweep and the budgets to spend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub dimension: usize,
    pub set: ConvexSetSpec<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub seed: u64,
    #[serde(default)]
    pub r_grid_rel: RelativeGrid,
    #[serde(default)]
    pub lambda_grid: Vec<f64>,
    #[serde(default)]
    pub measure_space: Option<MeasureSpaceConfig>,
    #[serde(default)]
    pub potential: Option<PotentialOperatorSpec<f64>>,
    #[serde(default)]
    pub budgets: Budgets,
    /// Levels of the potential `I` scanned by the threshold estimate.
    #[serde(default = "default_potential_levels")]
    pub potential_levels: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub fixed_point: f64,
    pub bisection: f64,
    pub optimizer: f64,
    pub report: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            fixed_point: 1e-13,
            bisection: 1e-14,
            optimizer: 1e-11,
            report: 1e-9,
        }
    }
}

/// Levels as fractions of `‖P(0)‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelativeGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Default for RelativeGrid {
    fn default() -> Self {
        Self {
            min: 0.05,
            max: 0.95,
            count: 19,
        }
    }
}

impl RelativeGrid {
    pub fn fractions(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.min],
            n => (0..n)
                .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub mu: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpaceConfig {
    pub atoms: Vec<Atom>,
    pub p: f64,
}

impl MeasureSpaceConfig {
    pub fn build(&self) -> Result<DiscreteMeasureSpace<f64>, CliError> {
        let mu = self.atoms.iter().map(|a| a.mu).collect();
        let eta = self.atoms.iter().map(|a| a.eta).collect();
        Ok(DiscreteMeasureSpace::new(mu, eta, self.p)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    pub n_starts: usize,
    pub max_iter: usize,
    pub n_samples: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            n_starts: 32,
            max_iter: 500,
            n_samples: 10_000,
        }
    }
}

fn default_potential_levels() -> Vec<f64> {
    (-3..=5).map(|k| 2f64.powi(k)).collect()
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.dimension == 0 {
            return Err(CliError::Config("dimension must be at least 1".into()));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("fixed_point", t.fixed_point),
            ("bisection", t.bisection),
            ("optimizer", t.optimizer),
            ("report", t.report),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("tolerances.{name} must be a positive number")));
            }
        }
        let g = &self.r_grid_rel;
        if g.count > 0 && !(g.min > 0.0 && g.min <= g.max && g.max < 1.0) {
            return Err(CliError::Config(
                "r_grid_rel needs 0 < min ≤ max < 1".into(),
            ));
        }
        if self.budgets.n_starts == 0 || self.budgets.n_samples == 0 {
            return Err(CliError::Config("budgets must be positive".into()));
        }
        self.set.validate(self.dimension)?;
        if let Some(q) = &self.potential {
            q.validate(self.dimension)?;
        }
        if let Some(m) = &self.measure_space {
            m.build()?;
        }
        Ok(())
    }

    pub fn projector(&self) -> Result<Projector<f64>, CliError> {
        Ok(Projector::new(self.set.clone(), self.dimension)?)
    }

    /// Absolute levels `r = frac·‖P(0)‖²`.
    pub fn r_grid(&self, proj: &Projector<f64>) -> Vec<f64> {
        let c = proj.p0_norm_sq();
        self.r_grid_rel.fractions().into_iter().map(|f| f * c).collect()
    }
}
