//! File outputs: coefficient dumps, solution samples, active-set scatter
//! data, per-step traces, and convergence tables. All writes are atomic
//! (write to a temp file, then rename).

use std::fmt::Write as _;
use std::path::Path;

use crate::alpert::AlpertBasis1d;
use crate::bench::{ConvergenceRow, RateMode};
use crate::element::ElementKey;
use crate::error::{Result, SolverError};
use crate::field::{BasisFamily, CoeffField};
use crate::interp::InterpBasis1d;
use crate::project::eval_field_at;
use crate::space::AdaptiveSpace;
use crate::time::StepRecord;

pub fn atomic_write(path: &Path, content: &str) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Coefficient dump: one row per (element, degree index, value), keys sorted.
pub fn write_field_csv(
    path: &Path,
    field: &CoeffField,
    space: &AdaptiveSpace,
    n_max: u8,
) -> Result<()> {
    let d = space.dim();
    let mut s = String::new();
    let deg = field.degs[0];
    writeln!(s, "# d={d} deg={deg} family={} n_max={n_max}", field.family.name()).unwrap();
    let mut header = String::from("");
    for m in 0..d {
        write!(header, "l{},", m + 1).unwrap();
    }
    for m in 0..d {
        write!(header, "j{},", m + 1).unwrap();
    }
    for m in 0..d {
        write!(header, "i{},", m + 1).unwrap();
    }
    header.push_str("value");
    writeln!(s, "{header}").unwrap();
    for row in field.rows(space) {
        for l in &row.levels {
            write!(s, "{l},").unwrap();
        }
        for j in &row.translations {
            write!(s, "{j},").unwrap();
        }
        for i in &row.degrees {
            write!(s, "{i},").unwrap();
        }
        writeln!(s, "{:.17e}", row.value).unwrap();
    }
    atomic_write(path, &s)
}

/// Reads a coefficient dump back; returns the reconstructed space and field.
pub fn read_field_csv(path: &Path) -> Result<(CoeffField, AdaptiveSpace)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let meta = lines
        .next()
        .ok_or_else(|| SolverError::InvalidConfig("empty field dump".into()))?;
    let mut d = 0usize;
    let mut deg = 0usize;
    let mut n_max = 0u8;
    let mut family = BasisFamily::Alpert;
    for tok in meta.trim_start_matches('#').split_whitespace() {
        let mut kv = tok.splitn(2, '=');
        let key = kv.next().unwrap_or("");
        let val = kv.next().unwrap_or("");
        match key {
            "d" => d = val.parse().map_err(|_| bad_dump("d"))?,
            "deg" => deg = val.parse().map_err(|_| bad_dump("deg"))?,
            "n_max" => n_max = val.parse().map_err(|_| bad_dump("n_max"))?,
            "family" => {
                family = match val {
                    "alpert" => BasisFamily::Alpert,
                    "interpolatory" => BasisFamily::Interpolatory,
                    "point-values" => BasisFamily::PointValues,
                    _ => return Err(bad_dump("family")),
                }
            }
            _ => {}
        }
    }
    lines.next(); // column header
    let mut rows: Vec<crate::field::CoeffRow> = Vec::new();
    let mut keys: Vec<ElementKey> = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 * d + 1 {
            return Err(bad_dump("row width"));
        }
        let levels: Vec<u8> = cols[..d]
            .iter()
            .map(|c| c.parse().map_err(|_| bad_dump("level")))
            .collect::<Result<_>>()?;
        let translations: Vec<u32> = cols[d..2 * d]
            .iter()
            .map(|c| c.parse().map_err(|_| bad_dump("translation")))
            .collect::<Result<_>>()?;
        let degrees: Vec<usize> = cols[2 * d..3 * d]
            .iter()
            .map(|c| c.parse().map_err(|_| bad_dump("degree")))
            .collect::<Result<_>>()?;
        let value: f64 = cols[3 * d].parse().map_err(|_| bad_dump("value"))?;
        keys.push(ElementKey::from_levels_translations(&levels, &translations));
        rows.push(crate::field::CoeffRow { levels, translations, degrees, value });
    }
    keys.sort_unstable();
    keys.dedup();
    let space = AdaptiveSpace::from_keys(d, n_max, keys)?;
    let field = CoeffField::from_rows(&space, family, deg, &rows)?;
    Ok((field, space))
}

fn bad_dump(what: &str) -> SolverError {
    SolverError::InvalidConfig(format!("malformed field dump ({what})"))
}

/// Active-set dump: per element the level vector, translation vector and
/// `L^2` indicator (feeds the active-element scatter plots).
pub fn write_active_csv(path: &Path, field: &CoeffField, space: &AdaptiveSpace) -> Result<()> {
    let d = space.dim();
    let mut s = String::new();
    let mut header = String::new();
    for m in 0..d {
        write!(header, "l{},", m + 1).unwrap();
    }
    for m in 0..d {
        write!(header, "j{},", m + 1).unwrap();
    }
    header.push_str("indicator");
    writeln!(s, "{header}").unwrap();
    for (slot, key) in space.keys().iter().enumerate() {
        for l in key.levels(d).0 {
            write!(s, "{l},").unwrap();
        }
        for j in key.translations(d) {
            write!(s, "{j},").unwrap();
        }
        let ind = field.block(slot).iter().map(|c| c * c).sum::<f64>().sqrt();
        writeln!(s, "{ind:.9e}").unwrap();
    }
    atomic_write(path, &s)
}

/// Uniform sample grid used by the solution dumps: `samples` points per axis
/// over the first `min(d, 2)` dimensions, remaining coordinates pinned at 0.
pub fn sample_grid(d: usize, samples: usize) -> Vec<Vec<f64>> {
    let vary = d.min(2);
    let mut points = Vec::new();
    let step = 1.0 / (samples - 1) as f64;
    if vary == 1 {
        for i in 0..samples {
            let mut x = vec![0.0; d];
            x[0] = i as f64 * step;
            points.push(x);
        }
    } else {
        for j in 0..samples {
            for i in 0..samples {
                let mut x = vec![0.0; d];
                x[0] = i as f64 * step;
                x[1] = j as f64 * step;
                points.push(x);
            }
        }
    }
    points
}

/// Solution dump: whitespace-separated `x1 .. xd value` rows on the uniform
/// sample grid; an optional extra column holds auxiliary point data (the
/// control sign field of the steering benchmark).
pub fn write_solution_dump(
    path: &Path,
    field: &CoeffField,
    space: &AdaptiveSpace,
    alpert: &AlpertBasis1d,
    interp: &InterpBasis1d,
    samples: usize,
    extra: Option<(&str, &dyn Fn(&[f64]) -> f64)>,
) -> Result<()> {
    let d = space.dim();
    let mut s = String::new();
    let mut header: Vec<String> = (0..d).map(|m| format!("x{}", m + 1)).collect();
    header.push("value".into());
    if let Some((name, _)) = extra {
        header.push(name.into());
    }
    writeln!(s, "# {}", header.join(" ")).unwrap();
    for x in sample_grid(d, samples) {
        let v = eval_field_at(field, space, alpert, interp, &x)?;
        if !v.is_finite() {
            return Err(SolverError::NonFiniteSample { point: x });
        }
        for c in &x {
            write!(s, "{c:.8} ").unwrap();
        }
        match extra {
            Some((_, f)) => writeln!(s, "{v:.12e} {:.12e}", f(&x)).unwrap(),
            None => writeln!(s, "{v:.12e}").unwrap(),
        }
    }
    atomic_write(path, &s)
}

/// Per-step trace: `t, dt, dof, alpha_sum[, l2_error]`.
pub fn write_trace_csv(path: &Path, trace: &[StepRecord]) -> Result<()> {
    let mut s = String::from("t,dt,dof,alpha_sum,l2_error\n");
    for r in trace {
        match r.error {
            Some(e) => writeln!(s, "{:.12e},{:.12e},{},{:.6e},{:.6e}", r.t, r.dt, r.dof, r.alpha_sum, e)
                .unwrap(),
            None => {
                writeln!(s, "{:.12e},{:.12e},{},{:.6e},", r.t, r.dt, r.dof, r.alpha_sum).unwrap()
            }
        }
    }
    atomic_write(path, &s)
}

/// Convergence table mirroring the benchmark report layout.
pub fn write_table_csv(path: &Path, rows: &[ConvergenceRow], mode: RateMode) -> Result<()> {
    let mut s = String::new();
    match mode {
        RateMode::ByLevel => {
            writeln!(s, "N,dof,l2_error,order").unwrap();
            for r in rows {
                let order = r.order.map(|o| format!("{o:.2}")).unwrap_or_default();
                writeln!(s, "{},{},{:.6e},{}", r.control as i64, r.dof, r.error, order).unwrap();
            }
        }
        RateMode::ByThreshold => {
            writeln!(s, "eps,dof,l2_error,r_eps,r_dof").unwrap();
            for r in rows {
                let re = r.r_eps.map(|o| format!("{o:.2}")).unwrap_or_default();
                let rd = r.r_dof.map(|o| format!("{o:.2}")).unwrap_or_default();
                writeln!(s, "{:.3e},{},{:.6e},{},{}", r.control, r.dof, r.error, re, rd).unwrap();
            }
        }
    }
    atomic_write(path, &s)
}

/// Diagnostic dump for numerical failures: per-element flux and gradient
/// magnitudes.
pub fn write_diagnostics_csv(
    path: &Path,
    diagnostics: &[crate::error::ElementDiagnostic],
) -> Result<()> {
    let mut s = String::from("levels,translations,max_abs_hamiltonian,max_abs_gradient\n");
    for d in diagnostics {
        writeln!(
            s,
            "{:?},{:?},{:.6e},{:.6e}",
            d.levels, d.translations, d.max_abs_hamiltonian, d.max_abs_gradient
        )
        .unwrap();
    }
    atomic_write(path, &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::project::project_l2;

    #[test]
    fn field_dump_round_trip() {
        let basis = AlpertBasis1d::new(2).unwrap();
        let space = AdaptiveSpace::sparse_grid(2, 2, 4);
        let f = |x: &[f64]| x[0] * x[0] - 0.3 * x[1];
        let phi = project_l2(&f, &space, &basis, 5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("phi.csv");
        write_field_csv(&path, &phi, &space, 4).unwrap();
        let (back, space2) = read_field_csv(&path).unwrap();
        assert_eq!(space2.len(), space.len());
        for (slot, key) in space2.keys().iter().enumerate() {
            let orig = space.slot(*key).unwrap();
            for (a, b) in back.block(slot).iter().zip(phi.block(orig)) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn solution_dump_has_expected_shape() {
        let basis = AlpertBasis1d::new(1).unwrap();
        let interp = InterpBasis1d::new(1).unwrap();
        let space = AdaptiveSpace::sparse_grid(2, 2, 3);
        let f = |x: &[f64]| x[0] + x[1];
        let phi = project_l2(&f, &space, &basis, 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sol.dat");
        write_solution_dump(&path, &phi, &space, &basis, &interp, 17, None).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 17 * 17);
        // linear data reproduced at a sample point
        let mid: Vec<&str> = rows[17 * 8 + 8].split_whitespace().collect();
        let v: f64 = mid[2].parse().unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        atomic_write(&path, "one").unwrap();
        atomic_write(&path, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
    }
}
