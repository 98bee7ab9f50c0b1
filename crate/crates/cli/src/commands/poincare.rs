//! `poincare`: sections over a grid of energies and couplings, one CSV per
//! cell plus a summary with regularity scores and optional Lyapunov exponents.

use dicke_dyn::poincare::{
    chaotic_fraction, lyapunov_exponent, poincare_section, section_scores, Regularity, RegularityConfig, SectionConfig,
};
use dicke_dyn::{critical_coupling, ModelParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{to_value, Context};
use crate::error::{CliError, CliResult};
use crate::output::{json_bytes, FileEntry, FileKind, Format, Table, SCHEMA_VERSION};

pub const COLUMNS: [&str; 9] = ["traj_id", "t", "theta", "phi", "Sx", "Sy", "Sz", "p", "q"];
pub const SUMMARY_FILE: &str = "poincare_summary.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub traj_id: usize,
    pub points: usize,
    /// Largest `|H − E|` along the trajectory.
    pub energy_drift: f64,
    pub regularity: Regularity,
    pub lambda: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell: usize,
    pub energy: f64,
    pub g: f64,
    pub g_ratio: Option<f64>,
    pub status: CellStatus,
    pub file: Option<String>,
    pub error: Option<String>,
    pub chaotic_fraction: Option<f64>,
    pub mean_score: Option<f64>,
    pub trajectories: Vec<TrajectorySummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub model: ModelParams,
    pub regularity: RegularityConfig,
    pub cells: Vec<CellSummary>,
}

/// `(g, g/g_c)` for every configured coupling.
fn couplings(ctx: &Context, params: &ModelParams) -> CliResult<Vec<(f64, Option<f64>)>> {
    match &ctx.config.poincare.g_ratios {
        None => Ok(vec![(params.g, None)]),
        Some(ratios) => {
            let gc = critical_coupling(params);
            if !gc.is_finite() {
                return Err(CliError::Config("g_ratios need epsilon != 0".into()));
            }
            Ok(ratios.iter().map(|&r| (r * gc, Some(r))).collect())
        }
    }
}

pub fn run(ctx: &Context) -> CliResult<()> {
    let base = ctx.config.model.params()?;
    let cfg = &ctx.config.poincare;
    if cfg.energies.is_empty() {
        return Err(CliError::Config("[poincare] energies is empty".into()));
    }
    let regularity = cfg.regularity();
    let format = ctx.format_or(Format::Csv);
    let mut cells = Vec::new();
    let mut entries = Vec::new();
    let mut index = 0;
    for &energy in &cfg.energies {
        for (g, g_ratio) in couplings(ctx, &base)? {
            let params = base.with_coupling(g);
            let section_cfg = SectionConfig {
                energy,
                n_trajectories: cfg.n_trajectories,
                n_crossings: cfg.n_crossings,
                seed: cfg.seed,
                direction: cfg.direction,
                transient_skip: cfg.transient_skip,
                root: cfg.root,
                integrator: dicke_dyn::dynamics::IntegratorConfig {
                    t_end: cfg.t_end,
                    ..ctx.config.integrator.config()
                },
            };
            let mut cell = CellSummary {
                cell: index,
                energy,
                g,
                g_ratio,
                status: CellStatus::Failed,
                file: None,
                error: None,
                chaotic_fraction: None,
                mean_score: None,
                trajectories: Vec::new(),
            };
            index += 1;
            let sections = match poincare_section(&params, &section_cfg) {
                Ok(s) => s,
                Err(e @ (dicke_dyn::Error::InvalidConfig(_) | dicke_dyn::Error::InvalidParams(_))) => {
                    return Err(e.into())
                }
                Err(e) => {
                    eprintln!("cell {}: {e}", cell.cell);
                    cell.error = Some(e.to_string());
                    cells.push(cell);
                    continue;
                }
            };
            let scores = section_scores(&sections, &regularity);
            let lambdas: Vec<Option<f64>> = if cfg.lyapunov {
                sections
                    .par_iter()
                    .map(|s| {
                        lyapunov_exponent(&params, &s.initial, &ctx.config.lyapunov.config(s.traj_id as u64))
                            .ok()
                            .map(|r| r.lambda)
                    })
                    .collect()
            } else {
                vec![None; sections.len()]
            };

            let mut table = Table::new(&COLUMNS);
            for s in &sections {
                for pt in &s.points {
                    let st = pt.state;
                    table.push(vec![
                        pt.traj_id.into(),
                        pt.t.into(),
                        pt.theta.into(),
                        pt.phi.into(),
                        st.sx.into(),
                        st.sy.into(),
                        st.sz.into(),
                        st.p.into(),
                        st.q.into(),
                    ]);
                }
            }
            let name = ctx.out.table(&format!("poincare_cell{:02}", cell.cell), &table, format)?;
            let mut entry = FileEntry::new(name.clone(), FileKind::PoincareCell, params);
            entry.energy = Some(energy);
            entry.drifts = sections.iter().map(|s| s.energy_drift).collect();
            entries.push(entry);

            let scored: Vec<f64> = scores.iter().filter_map(Regularity::score).collect();
            cell.status = CellStatus::Ok;
            cell.file = Some(name);
            cell.chaotic_fraction = chaotic_fraction(&scores, &regularity);
            cell.mean_score = (!scored.is_empty()).then(|| scored.iter().sum::<f64>() / scored.len() as f64);
            cell.trajectories = sections
                .iter()
                .zip(&scores)
                .zip(&lambdas)
                .map(|((s, score), lambda)| TrajectorySummary {
                    traj_id: s.traj_id,
                    points: s.points.len(),
                    energy_drift: s.energy_drift,
                    regularity: *score,
                    lambda: *lambda,
                    error: s.error.as_ref().map(|e| e.to_string()),
                })
                .collect();
            cells.push(cell);
        }
    }

    let succeeded = cells.iter().any(|c| c.status == CellStatus::Ok);
    let summary = Summary { schema_version: SCHEMA_VERSION, model: base, regularity, cells };
    ctx.out.write(SUMMARY_FILE, &json_bytes(&summary)?)?;
    entries.push(FileEntry::new(SUMMARY_FILE.into(), FileKind::PoincareSummary, base));
    ctx.finish("poincare", base, serde_json::json!({ "config": to_value(cfg)? }), entries)?;
    if succeeded {
        Ok(())
    } else {
        Err(CliError::Failure("every Poincaré cell failed".into()))
    }
}
