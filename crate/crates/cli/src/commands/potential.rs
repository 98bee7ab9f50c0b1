//! `potential`: the cosine potential `U(γ)` with its extrema, and the
//! quartic potential in `x = Sy/S` for each configured `C`.

use std::f64::consts::TAU;

use dicke_dyn::analytic::{is_double_well, quartic_minimum, quartic_potential};
use dicke_dyn::equilibria::{effective_potential_u, fixed_points};

use super::{to_value, Context};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, FileEntry, FileKind, Format, Table};

pub const COLUMNS: [&str; 6] = ["series", "c_const", "x", "value", "kind", "stability"];

pub fn run(ctx: &Context) -> CliResult<()> {
    let params = ctx.config.model.params()?;
    let cfg = &ctx.config.potential;
    if cfg.gamma_points < 2 || cfg.x_points < 2 || cfg.x_max.is_nan() || cfg.x_max <= 0.0 {
        return Err(CliError::Config("potential needs gamma_points >= 2, x_points >= 2 and x_max > 0".into()));
    }
    let mut table = Table::new(&COLUMNS);

    for i in 0..cfg.gamma_points {
        let gamma = -TAU + 2.0 * TAU * i as f64 / (cfg.gamma_points - 1) as f64;
        table.push(vec![
            "cosine".into(),
            Cell::Empty,
            gamma.into(),
            effective_potential_u(&params, gamma).into(),
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    // every copy of each extremum inside [−2π, 2π]
    for fp in fixed_points(&params) {
        for n in -2..=2 {
            let gamma = fp.gamma + TAU * n as f64;
            if gamma.abs() <= TAU + 1e-12 {
                table.push(vec![
                    "cosine_extremum".into(),
                    Cell::Empty,
                    gamma.into(),
                    effective_potential_u(&params, gamma).into(),
                    fp.kind.as_str().into(),
                    fp.stability.as_str().into(),
                ]);
            }
        }
    }

    for &c in &cfg.c_values {
        for i in 0..cfg.x_points {
            let x = -cfg.x_max + 2.0 * cfg.x_max * i as f64 / (cfg.x_points - 1) as f64;
            table.push(vec![
                "quartic".into(),
                c.into(),
                x.into(),
                quartic_potential(&params, c, x).into(),
                Cell::Empty,
                Cell::Empty,
            ]);
        }
        let centre = if is_double_well(&params, c) { "maximum" } else { "minimum" };
        table.push(vec![
            "quartic_extremum".into(),
            c.into(),
            0.0.into(),
            quartic_potential(&params, c, 0.0).into(),
            "centre".into(),
            centre.into(),
        ]);
        if let Some(xm) = quartic_minimum(&params, c) {
            for x in [-xm, xm] {
                table.push(vec![
                    "quartic_extremum".into(),
                    c.into(),
                    x.into(),
                    quartic_potential(&params, c, x).into(),
                    "well".into(),
                    "minimum".into(),
                ]);
            }
        }
    }

    let name = ctx.out.table("potential", &table, ctx.format_or(Format::Csv))?;
    let settings = serde_json::json!({ "config": to_value(cfg)? });
    ctx.finish("potential", params, settings, vec![FileEntry::new(name, FileKind::Potential, params)])
}
