//! `bound-luminosity`: the closed-form orbit on the slow manifold, sampled
//! in time, with the reduced flow integrated alongside on request.

use dicke_dyn::analytic::{bl_canonical, bl_constants, bl_energies, bl_period, bl_state, BoundLuminosityParams};
use dicke_dyn::dynamics::{integrate_reduced, IntegratorConfig};
use dicke_dyn::{Error, ModelParams, Spin};

use super::{sample_times, to_value, Context};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, FileEntry, FileKind, Format, Table};

pub const COLUMNS: [&str; 9] = ["t", "t_over_T", "Sz", "Sy", "Sx", "p", "q", "E_dip", "E_Z"];
pub const NUMERIC_COLUMNS: [&str; 3] = ["Sz_numeric", "Sy_numeric", "Sx_numeric"];
/// Accepted gap between the analytic and the integrated columns.
pub const AGREEMENT: f64 = 1e-6;

fn reference_integrator(t_end: f64, sample_dt: f64) -> IntegratorConfig {
    IntegratorConfig { rel_tol: 1e-12, abs_tol: 1e-14, max_step: 0.1, renormalize_spin: false, t_end, sample_dt }
}

pub fn orbit(ctx: &Context, params: &ModelParams) -> CliResult<BoundLuminosityParams> {
    let cfg = &ctx.config.bound_luminosity;
    match (cfg.energy, cfg.spin0) {
        (Some(e), _) => Ok(bl_canonical(params, e)?),
        (None, Some(s)) => Ok(bl_constants(params, &Spin::new(s[0], s[1], s[2]))?),
        (None, None) => Err(CliError::Config("[bound_luminosity] needs `energy` or `spin0`".into())),
    }
}

pub fn run(ctx: &Context) -> CliResult<()> {
    let params = ctx.config.model.params()?;
    let cfg = &ctx.config.bound_luminosity;
    let blp = orbit(ctx, &params)?;
    let period = match bl_period(&params, &blp) {
        Ok(t) => Some(t),
        Err(Error::InfinitePeriod) => None,
        Err(e) => return Err(e.into()),
    };
    let t_end = match (cfg.t_end, period) {
        (Some(t), _) => t,
        (None, Some(p)) => cfg.periods * p,
        (None, None) => {
            return Err(CliError::Degenerate(
                "separatrix orbit has infinite period; set [bound_luminosity] t_end".into(),
            ))
        }
    };
    if !(t_end > 0.0 && t_end.is_finite()) || cfg.samples < 2 {
        return Err(CliError::Config(format!("need t_end > 0 and samples >= 2, got {t_end} and {}", cfg.samples)));
    }
    let dt = t_end / (cfg.samples - 1) as f64;

    let numeric = if cfg.numeric {
        let spin0 = bl_state(&params, &blp, 0.0)?.spin();
        let traj = integrate_reduced(&params, &spin0, &reference_integrator(t_end, dt))
            .map_err(|f| CliError::Failure(f.to_string()))?;
        Some(traj)
    } else {
        None
    };
    let times = numeric.as_ref().map_or_else(|| sample_times(t_end, dt), |tr| tr.times.clone());

    let mut columns = COLUMNS.to_vec();
    if numeric.is_some() {
        columns.extend(NUMERIC_COLUMNS);
    }
    let mut table = Table::new(&columns);
    for (i, &t) in times.iter().enumerate() {
        let s = bl_state(&params, &blp, t)?;
        let (e_dip, e_z) = bl_energies(&params, &blp, t)?;
        let mut row: Vec<Cell> = vec![
            t.into(),
            period.map(|p| t / p).into(),
            s.sz.into(),
            s.sy.into(),
            s.sx.into(),
            s.p.into(),
            s.q.into(),
            e_dip.into(),
            e_z.into(),
        ];
        if let Some(tr) = &numeric {
            let n = tr.states[i];
            row.extend([n.sz.into(), n.sy.into(), n.sx.into()]);
        }
        table.push(row);
    }

    let name = ctx.out.table("bound_luminosity", &table, ctx.format_or(Format::Csv))?;
    let mut entry = FileEntry::new(name, FileKind::BoundLuminosity, params);
    entry.energy = Some(blp.energy);
    entry.tolerance = Some(AGREEMENT);
    let settings = serde_json::json!({
        "orbit": to_value(&blp)?,
        "period": to_value(&period)?,
        "t_end": t_end,
        "config": to_value(cfg)?,
    });
    ctx.finish("bound-luminosity", params, settings, vec![entry])
}
