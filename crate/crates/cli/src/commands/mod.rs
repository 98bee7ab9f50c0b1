pub mod bound_luminosity;
pub mod fixed_points;
pub mod lyapunov;
pub mod poincare;
pub mod potential;
pub mod simulate;

use dicke_dyn::dynamics::IntegratorConfig;
use dicke_dyn::ModelParams;
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{FileEntry, Format, Manifest, OutDir, SCHEMA_VERSION};

pub struct Context {
    pub config: RunConfig,
    pub out: OutDir,
    pub format: Option<Format>,
}

impl Context {
    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// Writes the manifest and reports the emitted files on stdout.
    pub fn finish(&self, command: &str, model: ModelParams, settings: Value, files: Vec<FileEntry>) -> CliResult<()> {
        let manifest = Manifest { schema_version: SCHEMA_VERSION, command: command.into(), model, settings, files };
        self.out.manifest(&manifest)?;
        for f in &manifest.files {
            println!("{}", self.out.root.join(&f.path).display());
        }
        Ok(())
    }
}

pub fn to_value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Failure(e.to_string()))
}

/// Relative energy and spin-length drift accepted by `validate` for a
/// trajectory integrated with `config`.
pub fn conservation_tolerance(config: &IntegratorConfig) -> f64 {
    100.0 * config.rel_tol * (config.t_end / 1e3).max(1.0)
}

/// Sample times `0, dt, 2dt, …` below `t_end`, then `t_end` itself; the
/// same grid the integrator reports.
pub fn sample_times(t_end: f64, dt: f64) -> Vec<f64> {
    let n = (t_end / dt).floor() as usize;
    let mut times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).filter(|&t| t < t_end).collect();
    times.push(t_end);
    times
}

#[cfg(test)]
mod tests {
    use super::*;
    use dicke_dyn::dynamics::integrate_reduced;
    use dicke_dyn::Spin;

    #[test]
    fn grid_matches_integrator_samples() {
        let p = ModelParams::new(1.0, 1.0, 1.2, -0.5, 1.0).unwrap();
        for (t_end, dt) in [(10.0, 0.1), (7.3, 0.5), (3.0, 3.0 / 7.0), (1.0, 2.0)] {
            let cfg = IntegratorConfig { t_end, sample_dt: dt, ..Default::default() };
            let traj = integrate_reduced(&p, &Spin::new(0.6, 0.0, 0.8), &cfg).unwrap();
            assert_eq!(traj.times, sample_times(t_end, dt), "{t_end} {dt}");
        }
    }
}
