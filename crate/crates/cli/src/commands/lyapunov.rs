//! `lyapunov`: largest Lyapunov exponent for one state or a shell sample.

use dicke_dyn::poincare::{lyapunov_exponent, sample_on_shell};
use dicke_dyn::{hamiltonian, PhaseState};
use rayon::prelude::*;

use super::{to_value, Context};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, FileEntry, FileKind, Format, Table};

pub const COLUMNS: [&str; 12] =
    ["sample", "Sx", "Sy", "Sz", "p", "q", "energy", "lambda", "energy_gap", "shell_warning", "error", "seed"];
pub const TRACE_COLUMNS: [&str; 3] = ["sample", "t", "lambda"];

pub fn run(ctx: &Context) -> CliResult<()> {
    let params = ctx.config.model.params()?;
    let cfg = &ctx.config.lyapunov;
    cfg.config(0).validate()?;
    let (states, energy) = match cfg.state0 {
        Some(a) => {
            let s = PhaseState::from_array(a);
            (vec![s], None)
        }
        None => {
            if cfg.n_samples == 0 {
                return Err(CliError::Config("[lyapunov] n_samples must be at least 1".into()));
            }
            (sample_on_shell(&params, cfg.energy, cfg.n_samples, cfg.seed)?, Some(cfg.energy))
        }
    };
    let results: Vec<_> =
        states.par_iter().enumerate().map(|(i, s)| lyapunov_exponent(&params, s, &cfg.config(i as u64))).collect();
    if results.iter().all(|r| r.is_err()) {
        let first = results.into_iter().find_map(|r| r.err()).expect("at least one sample");
        return Err(CliError::Failure(first.to_string()));
    }

    let mut table = Table::new(&COLUMNS);
    let mut trace = Table::new(&TRACE_COLUMNS);
    for (i, (s, r)) in states.iter().zip(&results).enumerate() {
        let mut row: Vec<Cell> = vec![
            i.into(),
            s.sx.into(),
            s.sy.into(),
            s.sz.into(),
            s.p.into(),
            s.q.into(),
            hamiltonian(&params, s).into(),
        ];
        match r {
            Ok(res) => {
                row.extend([
                    res.lambda.into(),
                    res.energy_gap.into(),
                    if res.shell_warning { "true" } else { "false" }.into(),
                    Cell::Empty,
                ]);
                for &(t, l) in &res.trace {
                    trace.push(vec![i.into(), t.into(), l.into()]);
                }
            }
            Err(e) => row.extend([Cell::Empty, Cell::Empty, Cell::Empty, e.to_string().as_str().into()]),
        }
        row.push(Cell::Int(cfg.config(i as u64).seed));
        table.push(row);
    }

    let format = ctx.format_or(Format::Csv);
    let mut entry = FileEntry::new(ctx.out.table("lyapunov", &table, format)?, FileKind::Lyapunov, params);
    entry.energy = energy;
    let trace_entry = FileEntry::new(ctx.out.table("lyapunov_trace", &trace, format)?, FileKind::LyapunovTrace, params);
    let settings = serde_json::json!({ "config": to_value(cfg)? });
    ctx.finish("lyapunov", params, settings, vec![entry, trace_entry])
}
