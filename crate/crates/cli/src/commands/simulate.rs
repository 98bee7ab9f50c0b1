//! `simulate`: one trajectory of the full or the reduced flow.

use dicke_dyn::dynamics::{integrate, integrate_reduced, Trajectory};
use dicke_dyn::poincare::sample_on_shell;
use dicke_dyn::{hamiltonian, reduced_energy, spin_norm, Error, PhaseState};

use super::{conservation_tolerance, to_value, Context};
use crate::error::{CliError, CliResult};
use crate::output::{FileEntry, FileKind, Format, Table};

pub const COLUMNS: [&str; 8] = ["t", "Sx", "Sy", "Sz", "p", "q", "H", "spin_norm"];

pub fn run(ctx: &Context) -> CliResult<()> {
    let params = ctx.config.model.params()?;
    let cfg = &ctx.config.simulate;
    let icfg = ctx.config.integrator.config();
    let state0 = match cfg.state0 {
        Some(a) => PhaseState::from_array(a),
        None => sample_on_shell(&params, cfg.energy, 1, cfg.seed)?[0],
    };

    let (rows, stats, error, kind) = if cfg.reduced {
        let (traj, error) = split(integrate_reduced(&params, &state0.spin(), &icfg).map_err(|f| (f.partial, f.error)));
        let rows = traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(&t, s)| {
                let full = s.with_oscillator(-params.g * s.sy, 0.0);
                (t, full, reduced_energy(&params, s))
            })
            .collect::<Vec<_>>();
        (rows, traj.stats, error, FileKind::ReducedTrajectory)
    } else {
        let (traj, error) = split(integrate(&params, &state0, &icfg).map_err(|f| (f.partial, f.error)));
        let rows = traj.times.iter().zip(&traj.states).map(|(&t, s)| (t, *s, hamiltonian(&params, s))).collect();
        (rows, traj.stats, error, FileKind::Trajectory)
    };

    let table = trajectory_table(&rows);
    let name = ctx.out.table("trajectory", &table, ctx.format_or(Format::Csv))?;
    let mut entry = FileEntry::new(name, kind, params);
    entry.tolerance = Some(conservation_tolerance(&icfg));
    let settings = serde_json::json!({
        "integrator": to_value(&icfg)?,
        "state0": to_value(&state0)?,
        "reduced": cfg.reduced,
        "stats": to_value(&stats)?,
        "error": error.as_ref().map(|e| e.to_string()),
    });
    ctx.finish("simulate", params, settings, vec![entry])?;
    match error {
        Some(e) => Err(CliError::Failure(format!("integration stopped early, partial trajectory written: {e}"))),
        None => Ok(()),
    }
}

fn split<S>(r: Result<Trajectory<S>, (Trajectory<S>, Error)>) -> (Trajectory<S>, Option<Error>) {
    match r {
        Ok(t) => (t, None),
        Err((t, e)) => (t, Some(e)),
    }
}

fn trajectory_table(rows: &[(f64, PhaseState, f64)]) -> Table {
    let mut table = Table::new(&COLUMNS);
    for (t, s, e) in rows {
        table.push(vec![
            (*t).into(),
            s.sx.into(),
            s.sy.into(),
            s.sz.into(),
            s.p.into(),
            s.q.into(),
            (*e).into(),
            spin_norm(s).into(),
        ]);
    }
    table
}
