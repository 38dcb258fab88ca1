//! The subcommands, as functions from parsed arguments to output text.

use std::fmt::Write as _;
use std::path::Path;

use gzgw_core::{
    classify, gw_forward, gw_inverse, gz_lambda, gz_mu, hermitian_from_json, matrix_to_json, n2_closed_form,
    psi_extract, ConeClass, HermitianMatrix, PositiveDefiniteMatrix, RegularHermitian,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::report::Report;
use crate::suite::{n2_gamma_deviation, n2_grid_points};

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })
}

pub fn read_hermitian(path: &Path, tol: f64) -> CliResult<HermitianMatrix> {
    Ok(hermitian_from_json(&read(path)?, tol)?)
}

/// Writes `text` to `out`, or to stdout when `out` is `None`.
pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write { path: path.into(), source }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PatternOutput {
    pub n: usize,
    /// `"lambda"`, or `"mu"` for the logarithmic pattern.
    pub kind: &'static str,
    pub levels: Vec<Vec<f64>>,
    pub class: ConeClass,
    /// Smallest interlacing gap; `null` for `n = 1`.
    pub margin: Option<f64>,
}

/// Pattern of the matrix in `path`: `λ`, or `μ` with `log` (positive
/// definite input only), with its cone classification.
pub fn cmd_pattern(path: &Path, tol: f64, strictness: f64, log: bool) -> CliResult<PatternOutput> {
    let a = read_hermitian(path, tol)?;
    let (kind, p) = if log { ("mu", gz_mu(&PositiveDefiniteMatrix::new(a)?)?) } else { ("lambda", gz_lambda(&a)?) };
    let c = classify(&p, strictness);
    Ok(PatternOutput {
        n: p.size(),
        kind,
        levels: p.levels(),
        class: c.class,
        margin: c.margin.is_finite().then_some(c.margin),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapMode {
    Forward,
    Inverse,
    Twist,
}

/// `γ(A)`, `γ⁻¹(P)` or `ψ(A)` for the matrix in `path`, as matrix JSON.
pub fn cmd_map(path: &Path, mode: MapMode, tol: f64, strictness: f64, steps: usize) -> CliResult<String> {
    let a = read_hermitian(path, tol)?;
    let out = match mode {
        MapMode::Forward => gw_forward(&a, strictness)?.image.into_hermitian().into_inner(),
        MapMode::Inverse => gw_inverse(&PositiveDefiniteMatrix::new(a)?, strictness)?.into_inner(),
        MapMode::Twist => {
            let reg = RegularHermitian::new(a, strictness)?;
            psi_extract(&reg, steps, gzgw_core::gw::TWIST_TOL)?.psi.into_inner()
        }
    };
    Ok(matrix_to_json(&out))
}

/// Runs the verification suite. A report with failing checks is returned
/// as `Ok`; the caller decides the exit code.
pub fn cmd_verify(cfg: &RunConfig) -> CliResult<Report> {
    crate::suite::run_verify(cfg)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DemoRow {
    pub a: f64,
    pub b: f64,
    /// `[γ₁₁, γ₁₂, γ₂₂]` from the closed form.
    pub closed_form: [f64; 3],
    /// The same entries from the transported `γ`.
    pub transported: [f64; 3],
    pub max_deviation: f64,
}

/// Closed form against the transported `γ` on the `points × points` grid
/// of `[[a, b], [b, −a]]`, `(a, b) ∈ [−range, range]²`, skipping `b = 0`.
pub fn cmd_demo_n2(points: usize, range: f64) -> CliResult<Vec<DemoRow>> {
    if points < 2 {
        return Err(CliError::Config("the grid needs at least 2 points per axis".into()));
    }
    if !(range.is_finite() && range > 0.0) {
        return Err(CliError::Config(format!("range must be positive, got {range}")));
    }
    let scale = range / 2.0;
    n2_grid_points(points)
        .into_iter()
        .map(|(a, b)| {
            let (a, b) = (a * scale, b * scale);
            let cf = n2_closed_form(a, b)?.gamma;
            let g = gw_forward(&HermitianMatrix::from_real_symmetric(2, &[a, b, b, -a])?, 0.0)?.image;
            let g = g.matrix();
            Ok(DemoRow {
                a,
                b,
                closed_form: [cf[0][0], cf[0][1], cf[1][1]],
                transported: [g[(0, 0)].re, g[(0, 1)].re, g[(1, 1)].re],
                max_deviation: n2_gamma_deviation(a, b)?,
            })
        })
        .collect()
}

pub fn format_demo(rows: &[DemoRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>8} {:>8} | {:>12} {:>12} {:>12} | {:>12} {:>12} {:>12} | {:>10}",
        "a", "b", "cf g11", "cf g12", "cf g22", "gw g11", "gw g12", "gw g22", "max dev"
    );
    for r in rows {
        let [c0, c1, c2] = r.closed_form;
        let [t0, t1, t2] = r.transported;
        let _ = writeln!(
            s,
            "{:>8.4} {:>8.4} | {c0:>12.6} {c1:>12.6} {c2:>12.6} | {t0:>12.6} {t1:>12.6} {t2:>12.6} | {:>10.3e}",
            r.a, r.b, r.max_deviation
        );
    }
    let worst = rows.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
    let _ = write!(s, "max deviation over {} points: {worst:.3e}", rows.len());
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_row_at_the_exchange_matrix() {
        let rows = cmd_demo_n2(3, 2.0).unwrap();
        assert_eq!(rows.len(), 6);
        // the 3-point grid on [−2, 2]: a = 0, b = 2 is present; rescale to b = 1
        let rows = cmd_demo_n2(3, 1.0).unwrap();
        let r = rows.iter().find(|r| r.a == 0.0 && r.b == 1.0).unwrap();
        assert!((r.closed_form[1] - 1.042190).abs() < 1e-6);
        assert!((r.closed_form[2] - 2.086161).abs() < 1e-6);
        assert!(r.max_deviation <= 1e-10);
    }

    #[test]
    fn demo_sign_rule() {
        let rows = cmd_demo_n2(5, 2.0).unwrap();
        for r in &rows {
            let mirror = rows.iter().find(|m| m.a == r.a && m.b == -r.b).unwrap();
            assert_eq!(mirror.closed_form[1], -r.closed_form[1]);
            assert!((mirror.transported[1] + r.transported[1]).abs() <= 1e-12);
        }
    }

    #[test]
    fn demo_rejects_degenerate_grids() {
        assert!(cmd_demo_n2(1, 2.0).is_err());
        assert!(cmd_demo_n2(5, 0.0).is_err());
    }

    #[test]
    fn demo_table_has_a_row_per_point() {
        let rows = cmd_demo_n2(3, 2.0).unwrap();
        let table = format_demo(&rows);
        assert_eq!(table.lines().count(), rows.len() + 2);
    }
}
