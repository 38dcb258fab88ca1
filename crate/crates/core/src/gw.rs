//! The canonical Ginzburg-Weinstein map `γ: Herm(n) → Herm⁺(n)` on the
//! regular stratum, its inverse, and the twist `ψ` with `γ = exp∘Ad_ψ`.
//!
//! `γ` is transport between two trivializations of the same torus bundle:
//! a regular `A` is written as `t∙S(λ)` with `S` the canonical section and
//! `t` its torus coordinate, and `γ(A) = t∙S(exp λ)`. Since the section is
//! real and continuous, `γ` maps its component of the real stratum into
//! itself, intertwines `λ` with `μ`, and commutes with the torus action.

use crate::error::{Error, Result};
use crate::fiber::{chi_word, chi_word_matrix, recover_torus, section, torus_act, GZTorusElement, RegularHermitian};
use crate::linalg::{
    eig_hermitian, exp_hermitian, log_pd, ComplexMatrix, HermitianMatrix, PositiveDefiniteMatrix, UnitaryMatrix, C64,
};
use crate::pattern::{classify, exp_pattern, gz_lambda, ConeClass, GZPattern};

/// Default number of continuation steps for `ψ`.
pub const DEFAULT_STEPS: usize = 64;
/// Start of the geometric continuation grid.
pub const RAY_START: f64 = 1e-3;
/// Tolerance on the defining relation `exp(Ad_ψ A) = γ(A)`.
pub const TWIST_TOL: f64 = 1e-8;

const MAX_REFINE_DEPTH: usize = 12;

#[derive(Clone, Debug)]
pub struct GWResult {
    pub image: PositiveDefiniteMatrix,
    /// `λ(A)`, which equals `μ(γ(A))`.
    pub pattern: GZPattern,
    /// Torus coordinate shared by `A` and `γ(A)`; `None` on the diagonal
    /// boundary shortcut.
    pub torus: Option<GZTorusElement>,
}

#[derive(Clone, Debug)]
pub struct TwistResult {
    pub psi: UnitaryMatrix,
    /// `|det ψ − 1|` after normalization.
    pub det_defect: f64,
    pub continuation_steps: usize,
}

fn regular_parts(a: &HermitianMatrix, pattern: GZPattern, strictness_tol: f64) -> Result<RegularHermitian> {
    let c = classify(&pattern, strictness_tol);
    if c.class != ConeClass::Interior || c.margin < strictness_tol {
        return Err(Error::BoundaryStratum { margin: c.margin, required: strictness_tol });
    }
    RegularHermitian::new(a.clone(), strictness_tol.min(c.margin))
}

/// `γ(A)`. Diagonal input takes the shortcut `γ = exp`; any other input
/// must be regular with interlacing margin at least `strictness_tol`.
pub fn gw_forward(a: &HermitianMatrix, strictness_tol: f64) -> Result<GWResult> {
    let pattern = gz_lambda(a)?;
    if a.matrix().is_diagonal() {
        return Ok(GWResult { image: exp_hermitian(a)?, pattern, torus: None });
    }
    let reg = regular_parts(a, pattern.clone(), strictness_tol)?;
    let t = recover_torus(&reg)?;
    let target = section(&exp_pattern(&pattern), 0.0)?;
    let image = torus_act(&t, &target)?;
    Ok(GWResult { image: PositiveDefiniteMatrix::trusted(image.into_hermitian()), pattern, torus: Some(t) })
}

/// `γ⁻¹(P)`, the same transport run from the `μ` side.
pub fn gw_inverse(p: &PositiveDefiniteMatrix, strictness_tol: f64) -> Result<HermitianMatrix> {
    if p.matrix().is_diagonal() {
        return log_pd(p);
    }
    let lam = gz_lambda(p.hermitian())?;
    if let Some(bad) = lam.as_flat().iter().find(|&&x| x <= 0.0) {
        return Err(Error::Domain(format!("principal-minor eigenvalue {bad:e} is not positive")));
    }
    let m = lam.map(f64::ln);
    let c = classify(&m, strictness_tol);
    if c.class != ConeClass::Interior || c.margin < strictness_tol {
        return Err(Error::BoundaryStratum { margin: c.margin, required: strictness_tol });
    }
    let reg = RegularHermitian::new(p.hermitian().clone(), 0.0)?;
    let t = recover_torus(&reg)?;
    let source = section(&m, 0.0)?;
    Ok(torus_act(&t, &source)?.into_hermitian())
}

/// `χ̃(t, A)`: the χ-word computed on `γ(A)`.
pub fn chi_tilde_word(t: &GZTorusElement, a: &RegularHermitian) -> Result<UnitaryMatrix> {
    let g = gw_forward(a.matrix(), 0.0)?;
    chi_word_matrix(t, g.image.hermitian())
}

/// Geometric grid from `start` to 1 with `steps` points.
fn ray_grid(start: f64, steps: usize) -> Vec<f64> {
    let steps = steps.max(2);
    (0..steps)
        .map(|j| if j + 1 == steps { 1.0 } else { start * (1.0 / start).powf(j as f64 / (steps - 1) as f64) })
        .collect()
}

/// Phase-aligns the rows of `w` to `reference`; returns the smallest
/// overlap modulus seen.
fn align_rows(w: &ComplexMatrix, reference: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let n = w.dim();
    let mut out = w.clone();
    let mut worst = f64::INFINITY;
    for i in 0..n {
        let overlap: C64 = (0..n).map(|c| w[(i, c)] * reference[(i, c)].conj()).sum();
        let modulus = overlap.norm();
        worst = worst.min(modulus);
        if modulus == 0.0 {
            continue;
        }
        let phase = if overlap.im == 0.0 { C64::new(overlap.re.signum(), 0.0) } else { overlap / modulus };
        for c in 0..n {
            out[(i, c)] = w[(i, c)] * phase.conj();
        }
    }
    (out, worst)
}

fn gamma_frame(a: &HermitianMatrix, u: f64) -> Result<ComplexMatrix> {
    let g = gw_forward(&a.scale(u), 0.0)?;
    // same ordering as uA: γ(uA) has eigenvalues exp(u·λᵢ⁽ⁿ⁾)
    Ok(eig_hermitian(g.image.hermitian())?.frame.into_inner())
}

/// Twist along the ray `u ↦ uA` by frame continuation.
///
/// For every `u` the frames of `uA` (constant, `U`) and of `log γ(uA)`
/// (`W_u`) differ by `ψ(uA)` up to a diagonal phase. The phase is fixed by
/// tracking `W_u` continuously from `W_ε ≈ U`, so that `ψ(uA) → I` as
/// `u → 0`. Returns `W₁⁻¹·U` and the number of grid points used.
pub fn psi_ray(a: &HermitianMatrix, steps: usize) -> Result<(ComplexMatrix, usize)> {
    let n = a.dim();
    if n == 1 || a.matrix().is_diagonal() {
        return Ok((ComplexMatrix::identity(n), 0));
    }
    let u = eig_hermitian(a)?.frame.into_inner();
    let grid = ray_grid(RAY_START, steps);
    let mut reference = u.clone();
    let mut used = 0;
    let mut prev_u = grid[0];
    for &target in &grid {
        let (aligned, count) = advance(a, &reference, prev_u, target, 0)?;
        reference = aligned;
        used += count;
        prev_u = target;
    }
    Ok((reference.adjoint().matmul(&u), used))
}

/// Moves the aligned frame from `from` to `to`, bisecting (geometrically)
/// when consecutive frames overlap too little.
fn advance(
    a: &HermitianMatrix,
    reference: &ComplexMatrix,
    from: f64,
    to: f64,
    depth: usize,
) -> Result<(ComplexMatrix, usize)> {
    let w = gamma_frame(a, to)?;
    let (aligned, overlap) = align_rows(&w, reference);
    if overlap >= 0.5 {
        return Ok((aligned, 1));
    }
    if depth >= MAX_REFINE_DEPTH || from == to {
        return Err(Error::ContinuationFailure { u: to, overlap });
    }
    let mid = (from * to).sqrt();
    let (half, c1) = advance(a, reference, from, mid, depth + 1)?;
    let (full, c2) = advance(a, &half, mid, to, depth + 1)?;
    Ok((full, c1 + c2))
}

/// Rescales by the `n`-th root of `det ψ` closest to 1.
fn normalize_det(psi: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let n = psi.dim();
    let det = psi.det();
    let base = det.powf(1.0 / n as f64);
    let root = (0..n)
        .map(|k| base * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .min_by(|x, y| (x - 1.0).norm().total_cmp(&(y - 1.0).norm()))
        .unwrap();
    let root = if det.im == 0.0 && det.re > 0.0 { C64::new(det.re.powf(1.0 / n as f64), 0.0) } else { root };
    let out = psi.scale(root.inv());
    let defect = (out.det() - 1.0).norm();
    (out, defect)
}

/// The twist `ψ(A) ∈ SU(n)`.
///
/// On the real section point `S` over `λ(A)` the twist is unique and is
/// found by ray continuation. It is carried to `A = t∙S` by the
/// equivariance rule `ψ(t∙S) = χ̃(t,S)·ψ(S)·χ(t,S)⁻¹`.
pub fn psi_extract(a: &RegularHermitian, steps: usize, tol: f64) -> Result<TwistResult> {
    if steps < 8 {
        return Err(Error::Domain(format!("continuation needs at least 8 steps (got {steps})")));
    }
    let n = a.dim();
    let t = recover_torus(a)?;
    let s = section(a.pattern(), 0.0)?;
    let (psi_s, used) = psi_ray(s.matrix(), steps)?;
    let chi = chi_word(&t, &s)?;
    let chi_tilde = chi_tilde_word(&t, &s)?;
    let raw = chi_tilde.matrix().matmul(&psi_s).matmul(&chi.matrix().adjoint());
    let (psi, det_defect) = normalize_det(&raw);

    let lhs = exp_hermitian(&a.matrix().conjugate_by(&psi))?;
    let rhs = gw_forward(a.matrix(), 0.0)?.image;
    let residual = lhs.matrix().max_abs_diff(rhs.matrix());
    if residual > tol {
        return Err(Error::TwistResidual { residual, tol });
    }
    debug_assert_eq!(psi.dim(), n);
    Ok(TwistResult { psi: UnitaryMatrix::trusted(psi), det_defect, continuation_steps: used })
}

/// Closed form of `γ` for trace-free real symmetric `[[a, b], [b, −a]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct N2ClosedForm {
    pub gamma: [[f64; 2]; 2],
    /// The two branches of `cos 2θ(A)`, `ψ(A)` being rotation by `θ(A)`.
    pub cos_two_theta: (f64, f64),
}

pub fn n2_closed_form(a: f64, b: f64) -> Result<N2ClosedForm> {
    if a == 0.0 && b == 0.0 {
        return Err(Error::Domain("the closed form needs (a, b) ≠ (0, 0)".into()));
    }
    let r = a.hypot(b);
    let ea = a.exp();
    let radicand = (2.0 * ea * r.cosh() - ea * ea - 1.0).max(0.0);
    let sign = if b < 0.0 { -1.0 } else { 1.0 };
    let bt = sign * radicand.sqrt();
    let ct = 2.0 * r.cosh() - ea;
    let q = (ea - r.cosh()) / r.sinh();
    let root = (1.0 - q * q).max(0.0).sqrt();
    Ok(N2ClosedForm { gamma: [[ea, bt], [bt, ct]], cos_two_theta: (a / r + root, a / r - root) })
}
