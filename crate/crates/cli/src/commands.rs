use projkit::equation::solve_projection_equation;
use projkit::fixed_point::{profile, ProfileKind};
use projkit::levelset::{GammaRow, LevelSets};
use projkit::{Error, Vector};
use serde_json::json;

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::format;
use crate::report::VerifyReport;
use crate::suites::{self, Suite, SOLVER_MAX_ITER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProfileChoice {
    G,
    H,
    Gamma,
}

/// `P(point)` as a JSON array.
pub fn cmd_project(cfg: &ScenarioConfig, point: &[f64]) -> Result<String, CliError> {
    if point.len() != cfg.dimension {
        return Err(CliError::Usage(format!(
            "point has {} coordinates, expected dimension {}",
            point.len(),
            cfg.dimension
        )));
    }
    let proj = cfg.projector()?;
    let px = proj.project(&Vector::new(point.to_vec()))?;
    Ok(format::json(&px.to_f64_vec()))
}

pub fn cmd_verify(cfg: &ScenarioConfig, suite: Suite) -> Result<VerifyReport, CliError> {
    suites::run_suite(cfg, suite)
}

/// CSV profile: `param,value` for `g`/`h` over `lambda_grid`, one
/// diagnostics row per level for `gamma` over `r_grid_rel`.
pub fn cmd_profile(cfg: &ScenarioConfig, kind: ProfileChoice) -> Result<String, CliError> {
    let proj = cfg.projector()?;
    match kind {
        ProfileChoice::G | ProfileChoice::H => {
            let meaning = if kind == ProfileChoice::G { ProfileKind::G } else { ProfileKind::H };
            let opts = suites::level_set_options(cfg).inversion.fixed_point;
            let prof = profile(&proj, meaning, &cfg.lambda_grid, &opts)?;
            let rows: Vec<[f64; 2]> = prof.grid.iter().zip(&prof.values).map(|(&p, &v)| [p, v]).collect();
            Ok(format::csv("param,value", rows.iter().map(|r| &r[..])))
        }
        ProfileChoice::Gamma => {
            let header = GammaRow::<f64>::CSV_HEADER;
            let grid = cfg.r_grid(&proj);
            if grid.is_empty() {
                return Ok(format::csv(header, std::iter::empty()));
            }
            let ls = LevelSets::new(&proj, suites::level_set_options(cfg));
            let rows: Vec<[f64; 10]> = ls.gamma_profile_report(&grid)?.iter().map(GammaRow::fields).collect();
            Ok(format::csv(header, rows.iter().map(|r| &r[..])))
        }
    }
}

/// Solves `P(x) + λQ(x) = 0`. Returns the JSON record and the exit code,
/// which is 1 when the solver gives up.
pub fn cmd_solve_eq(cfg: &ScenarioConfig, lambda: f64) -> Result<(String, i32), CliError> {
    let q = cfg
        .potential
        .as_ref()
        .ok_or_else(|| CliError::Config("solve-eq needs a potential section".into()))?;
    if !(lambda > 0.0) {
        return Err(CliError::Usage(format!("--lambda must be positive, got {lambda}")));
    }
    let proj = cfg.projector()?;
    match solve_projection_equation(&proj, q, lambda, cfg.tolerances.optimizer, SOLVER_MAX_ITER) {
        Ok(sol) => Ok((
            format::json(&json!({
                "x": sol.x.to_f64_vec(),
                "residual": sol.residual,
                "iterations": sol.iterations,
            })),
            0,
        )),
        Err(Error::NotConverged { residual, .. }) => Ok((
            format::json(&json!({
                "no_solution_found": true,
                "best_residual": residual,
            })),
            1,
        )),
        Err(e) => Err(e.into()),
    }
}
