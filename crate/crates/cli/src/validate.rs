//! `validate`: re-reads emitted files through their manifests and
//! re-checks the physical invariants each kind of file must satisfy.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use dicke_dyn::analytic::{is_double_well, quartic_minimum, quartic_potential};
use dicke_dyn::equilibria::{effective_potential_u, fixed_points};
use dicke_dyn::poincare::{chaotic_fraction, spin_angles, Regularity};
use dicke_dyn::{eom_rhs, hamiltonian, reduced_energy, ModelParams, PhaseState, Spin};

use crate::commands::bound_luminosity::NUMERIC_COLUMNS;
use crate::commands::fixed_points::Document;
use crate::commands::poincare::{CellStatus, Summary};
use crate::error::{CliError, CliResult};
use crate::output::{FileEntry, FileKind, Manifest, ReadTable, SCHEMA_VERSION};

type Check = std::result::Result<(), String>;

struct Target {
    dir: PathBuf,
    manifest: Manifest,
    /// Restrict to one file of the manifest.
    only: Option<String>,
}

pub fn run(path: &Path) -> CliResult<()> {
    let targets = discover(path)?;
    let mut checked = 0;
    let mut failed = 0;
    for target in &targets {
        for entry in &target.manifest.files {
            if target.only.as_ref().is_some_and(|only| *only != entry.path) {
                continue;
            }
            checked += 1;
            match check(&target.dir, entry) {
                Ok(()) => println!("ok    {}", entry.path),
                Err(reason) => {
                    failed += 1;
                    println!("FAIL  {}: {reason}", entry.path);
                }
            }
        }
    }
    if checked == 0 {
        return Err(CliError::Validation(format!("no outputs found under {}", path.display())));
    }
    if failed > 0 {
        return Err(CliError::Validation(format!("{failed} of {checked} files failed")));
    }
    Ok(())
}

fn is_manifest(p: &Path) -> bool {
    p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(".manifest.json"))
}

fn manifests_in(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Config(format!("cannot list {}: {e}", dir.display())))?;
    let mut found: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| is_manifest(p)).collect();
    found.sort();
    Ok(found)
}

fn load(path: &Path) -> CliResult<Manifest> {
    let bytes = fs::read(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let m: Manifest = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Validation(format!("{}: not a manifest: {e}", path.display())))?;
    if m.schema_version != SCHEMA_VERSION {
        return Err(CliError::Validation(format!("{}: unsupported schema {}", path.display(), m.schema_version)));
    }
    Ok(m)
}

fn discover(path: &Path) -> CliResult<Vec<Target>> {
    if !path.exists() {
        return Err(CliError::Config(format!("{} does not exist", path.display())));
    }
    if path.is_dir() {
        return manifests_in(path)?
            .iter()
            .map(|m| Ok(Target { dir: path.to_path_buf(), manifest: load(m)?, only: None }))
            .collect();
    }
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new(".")).to_path_buf();
    if is_manifest(path) {
        return Ok(vec![Target { dir, manifest: load(path)?, only: None }]);
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
    let mut targets = Vec::new();
    for m in manifests_in(&dir)? {
        let manifest = load(&m)?;
        if manifest.files.iter().any(|f| f.path == name) {
            targets.push(Target { dir: dir.clone(), manifest, only: Some(name.clone()) });
        }
    }
    if targets.is_empty() {
        return Err(CliError::Validation(format!("no manifest in {} lists {name}", dir.display())));
    }
    Ok(targets)
}

fn check(dir: &Path, entry: &FileEntry) -> Check {
    let path = dir.join(&entry.path);
    if !path.is_file() {
        return Err("file is missing".into());
    }
    match entry.kind {
        FileKind::FixedPoints => check_fixed_points(&path, &entry.model),
        FileKind::BoundLuminosity => check_bound_luminosity(&read(&path)?, entry),
        FileKind::Trajectory => check_trajectory(&read(&path)?, entry, false),
        FileKind::ReducedTrajectory => check_trajectory(&read(&path)?, entry, true),
        FileKind::PoincareCell => check_poincare_cell(&read(&path)?, entry),
        FileKind::PoincareSummary => check_poincare_summary(&path, dir),
        FileKind::Potential => check_potential(&read(&path)?, &entry.model),
        FileKind::Lyapunov => check_lyapunov(&read(&path)?, entry),
        FileKind::LyapunovTrace => check_lyapunov_trace(&read(&path)?),
    }
}

fn read(path: &Path) -> std::result::Result<ReadTable, String> {
    ReadTable::read(path).map_err(|e| e.to_string())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn num(t: &ReadTable, row: usize, col: &str) -> std::result::Result<f64, String> {
    let c = t.index(col).map_err(|e| e.to_string())?;
    t.num(row, c).ok_or_else(|| format!("row {row}: {col} is not a number"))
}

fn state(t: &ReadTable, row: usize) -> std::result::Result<PhaseState, String> {
    Ok(PhaseState::new(
        num(t, row, "Sx")?,
        num(t, row, "Sy")?,
        num(t, row, "Sz")?,
        num(t, row, "p")?,
        num(t, row, "q")?,
    ))
}

fn text<'a>(t: &'a ReadTable, row: usize, col: &str) -> std::result::Result<&'a str, String> {
    let c = t.index(col).map_err(|e| e.to_string())?;
    Ok(t.text(row, c).unwrap_or(""))
}

fn check_fixed_points(path: &Path, model: &ModelParams) -> Check {
    let expected = fixed_points(model);
    let scale = 1.0f64.max(model.omega0 * model.spin_s).max((model.g * model.spin_s).powi(2));
    let found: Vec<(String, String, PhaseState)> = if path.extension().is_some_and(|e| e == "json") {
        let bytes = fs::read(path).map_err(|e| e.to_string())?;
        let doc: Document = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
        ensure(doc.model == *model, || "model differs from manifest".into())?;
        doc.fixed_points.iter().map(|p| (p.kind.as_str().into(), p.stability.as_str().into(), p.state)).collect()
    } else {
        let t = read(path)?;
        (0..t.rows.len())
            .map(|i| Ok((text(&t, i, "kind")?.to_string(), text(&t, i, "stability")?.to_string(), state(&t, i)?)))
            .collect::<std::result::Result<_, String>>()?
    };
    ensure(found.len() == expected.len(), || format!("{} fixed points, expected {}", found.len(), expected.len()))?;
    for ((kind, stability, s), fp) in found.iter().zip(&expected) {
        let residual = eom_rhs(model, s).max_abs();
        ensure(residual < 1e-12 * scale, || format!("{kind}: residual {residual:e}"))?;
        ensure(kind == fp.kind.as_str(), || format!("{kind}: expected {}", fp.kind.as_str()))?;
        ensure(stability == fp.stability.as_str(), || {
            format!("{kind}: {stability}, expected {}", fp.stability.as_str())
        })?;
    }
    Ok(())
}

fn check_bound_luminosity(t: &ReadTable, entry: &FileEntry) -> Check {
    let m = &entry.model;
    let energy = entry.energy.ok_or("manifest lacks the orbit energy")?;
    let agreement = entry.tolerance.unwrap_or(1e-6);
    let numeric = NUMERIC_COLUMNS.iter().all(|c| t.index(c).is_ok());
    ensure(!t.rows.is_empty(), || "no rows".into())?;
    let mut prev = f64::NEG_INFINITY;
    for i in 0..t.rows.len() {
        let tt = num(t, i, "t")?;
        ensure(tt > prev, || format!("row {i}: time not increasing"))?;
        prev = tt;
        let s = state(t, i)?;
        let spin = s.spin();
        ensure((spin.norm() - m.spin_s).abs() < 1e-9 * m.spin_s, || format!("row {i}: off the spin sphere"))?;
        let e = reduced_energy(m, &spin);
        ensure((e - energy).abs() < 1e-9 * energy.abs().max(1.0), || format!("row {i}: energy {e} != {energy}"))?;
        ensure((s.p + m.g * s.sy).abs() <= 1e-12 * s.p.abs().max(1.0) && s.q == 0.0, || {
            format!("row {i}: off the slow manifold")
        })?;
        let e_dip = num(t, i, "E_dip")?;
        let e_z = num(t, i, "E_Z")?;
        ensure((e_dip - s.p * s.sy).abs() <= 1e-12 * e_dip.abs().max(1.0), || format!("row {i}: E_dip"))?;
        ensure((e_z + m.omega0 * s.sz).abs() <= 1e-12 * e_z.abs().max(1.0), || format!("row {i}: E_Z"))?;
        if numeric {
            let gap = (num(t, i, "Sz_numeric")? - s.sz)
                .abs()
                .max((num(t, i, "Sy_numeric")? - s.sy).abs())
                .max((num(t, i, "Sx_numeric")? - s.sx).abs());
            ensure(gap < agreement, || format!("row {i}: analytic and numeric differ by {gap:e}"))?;
        }
    }
    Ok(())
}

fn check_trajectory(t: &ReadTable, entry: &FileEntry, reduced: bool) -> Check {
    let m = &entry.model;
    let tol = entry.tolerance.ok_or("manifest lacks a tolerance")?;
    ensure(!t.rows.is_empty(), || "no rows".into())?;
    let energy = |s: &PhaseState| if reduced { reduced_energy(m, &s.spin()) } else { hamiltonian(m, s) };
    let s0 = state(t, 0)?;
    let e0 = energy(&s0);
    let n0 = s0.spin().norm();
    let e_scale = e0.abs().max(1e-3 * m.omega0 * m.spin_s);
    let mut prev = f64::NEG_INFINITY;
    for i in 0..t.rows.len() {
        let tt = num(t, i, "t")?;
        ensure(tt > prev, || format!("row {i}: time not increasing"))?;
        prev = tt;
        let s = state(t, i)?;
        let e = energy(&s);
        let h = num(t, i, "H")?;
        ensure((h - e).abs() <= 1e-12 * e.abs().max(1.0), || format!("row {i}: H column {h} != {e}"))?;
        let n = s.spin().norm();
        ensure((num(t, i, "spin_norm")? - n).abs() <= 1e-12 * n.max(1.0), || format!("row {i}: spin_norm column"))?;
        ensure((e - e0).abs() / e_scale <= tol, || {
            format!("row {i}: energy drift {:e} > {tol:e}", (e - e0).abs() / e_scale)
        })?;
        ensure((n - n0).abs() / n0 <= tol, || format!("row {i}: spin drift {:e} > {tol:e}", (n - n0).abs() / n0))?;
        if reduced {
            ensure(s.p == -m.g * s.sy && s.q == 0.0, || format!("row {i}: off the slow manifold"))?;
        }
    }
    Ok(())
}

fn check_poincare_cell(t: &ReadTable, entry: &FileEntry) -> Check {
    let m = &entry.model;
    let energy = entry.energy.ok_or("manifest lacks the cell energy")?;
    let floor = 1e-12 * energy.abs().max(1.0);
    for i in 0..t.rows.len() {
        let id = num(t, i, "traj_id")? as usize;
        let drift = *entry.drifts.get(id).ok_or_else(|| format!("row {i}: unknown trajectory {id}"))?;
        let s = state(t, i)?;
        let qmax = 1e-10 * s.euclidean_norm().max(1.0);
        ensure(s.q.abs() < qmax, || format!("row {i}: q = {:e} off the section", s.q))?;
        let gap = (hamiltonian(m, &s) - energy).abs();
        ensure(gap <= 10.0 * drift.max(floor), || format!("row {i}: |H - E| = {gap:e} beyond 10x drift {drift:e}"))?;
        let (theta, phi) = spin_angles(&s, m.spin_s);
        ensure((num(t, i, "theta")? - theta).abs() < 1e-12, || format!("row {i}: theta"))?;
        ensure((num(t, i, "phi")? - phi).abs() < 1e-12, || format!("row {i}: phi"))?;
    }
    Ok(())
}

fn check_poincare_summary(path: &Path, dir: &Path) -> Check {
    let bytes = fs::read(path).map_err(|e| e.to_string())?;
    let summary: Summary = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
    for cell in &summary.cells {
        match cell.status {
            CellStatus::Failed => {
                ensure(cell.error.is_some(), || format!("cell {}: failed without a reason", cell.cell))?
            }
            CellStatus::Ok => {
                let file = cell.file.as_ref().ok_or_else(|| format!("cell {}: no file", cell.cell))?;
                ensure(dir.join(file).is_file(), || format!("cell {}: {file} missing", cell.cell))?;
                let scores: Vec<Regularity> = cell.trajectories.iter().map(|t| t.regularity).collect();
                ensure(chaotic_fraction(&scores, &summary.regularity) == cell.chaotic_fraction, || {
                    format!("cell {}: chaotic fraction does not match the scores", cell.cell)
                })?;
                for tr in &cell.trajectories {
                    if let Some(s) = tr.regularity.score() {
                        ensure((0.0..=1.0).contains(&s), || format!("cell {}: score {s} outside [0, 1]", cell.cell))?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_potential(t: &ReadTable, m: &ModelParams) -> Check {
    let expected: BTreeMap<&str, &str> =
        fixed_points(m).iter().map(|fp| (fp.kind.as_str(), fp.stability.as_str())).collect();
    let mut wells: BTreeMap<u64, usize> = BTreeMap::new();
    let mut quartic_c: Vec<f64> = Vec::new();
    for i in 0..t.rows.len() {
        let series = text(t, i, "series")?;
        let x = num(t, i, "x")?;
        let value = num(t, i, "value")?;
        let want = match series {
            "cosine" | "cosine_extremum" => effective_potential_u(m, x),
            "quartic" | "quartic_extremum" => {
                let c = num(t, i, "c_const")?;
                if !quartic_c.contains(&c) {
                    quartic_c.push(c);
                }
                quartic_potential(m, c, x)
            }
            other => return Err(format!("row {i}: unknown series {other:?}")),
        };
        ensure((value - want).abs() <= 1e-12 * want.abs().max(1.0), || format!("row {i}: value {value} != {want}"))?;
        if series == "cosine_extremum" {
            let kind = text(t, i, "kind")?;
            let stability = text(t, i, "stability")?;
            ensure(expected.get(kind) == Some(&stability), || format!("row {i}: {kind} labelled {stability}"))?;
        }
        if series == "quartic_extremum" && text(t, i, "kind")? == "well" {
            let c = num(t, i, "c_const")?;
            let xm = quartic_minimum(m, c).ok_or_else(|| format!("row {i}: well row for a single-well C = {c}"))?;
            ensure((x.abs() - xm).abs() <= 1e-12 * xm.max(1.0), || format!("row {i}: well at {x}, expected ±{xm}"))?;
            *wells.entry(c.to_bits()).or_default() += 1;
        }
    }
    for c in quartic_c {
        let n = wells.get(&c.to_bits()).copied().unwrap_or(0);
        let want = if is_double_well(m, c) { 2 } else { 0 };
        ensure(n == want, || format!("C = {c}: {n} well rows, expected {want}"))?;
    }
    Ok(())
}

fn check_lyapunov(t: &ReadTable, entry: &FileEntry) -> Check {
    let m = &entry.model;
    for i in 0..t.rows.len() {
        let s = state(t, i)?;
        let h = hamiltonian(m, &s);
        let recorded = num(t, i, "energy")?;
        ensure((recorded - h).abs() <= 1e-12 * h.abs().max(1.0), || format!("row {i}: energy column"))?;
        if let Some(e) = entry.energy {
            ensure((h - e).abs() <= 1e-10 * e.abs().max(1.0), || format!("row {i}: initial state off the shell"))?;
        }
        let spin = Spin::new(s.sx, s.sy, s.sz);
        ensure((spin.norm() - m.spin_s).abs() < 1e-9 * m.spin_s, || format!("row {i}: off the spin sphere"))?;
        let lambda = t.index("lambda").ok().and_then(|c| t.num(i, c));
        let error = text(t, i, "error")?;
        match lambda {
            Some(l) => {
                ensure(l.is_finite(), || format!("row {i}: lambda not finite"))?;
                ensure(matches!(text(t, i, "shell_warning")?, "true" | "false"), || format!("row {i}: shell_warning"))?;
            }
            None => ensure(!error.is_empty(), || format!("row {i}: no exponent and no error"))?,
        }
    }
    Ok(())
}

fn check_lyapunov_trace(t: &ReadTable) -> Check {
    let mut last: BTreeMap<u64, f64> = BTreeMap::new();
    for i in 0..t.rows.len() {
        let sample = num(t, i, "sample")? as u64;
        let time = num(t, i, "t")?;
        ensure(num(t, i, "lambda")?.is_finite(), || format!("row {i}: lambda not finite"))?;
        let prev = last.insert(sample, time).unwrap_or(0.0);
        ensure(time > prev, || format!("row {i}: trace time not increasing"))?;
    }
    Ok(())
}
