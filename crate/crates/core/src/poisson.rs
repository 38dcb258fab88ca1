//! Numerical Poisson geometry on `Herm(n) ≅ u(n)*` and on `AN ≅ U(n)*`.
//!
//! Both sides use fixed real charts of dimension `n²`. Bivectors are dense
//! coefficient matrices `π^{ab}`; the sharp map is `(π^♯α)^a = π^{ab}α_b`.
//! Hamiltonian vector fields follow the moment map sign `ξ_M = −π^♯(dH)`.
//!
//! On `AN` the chart is log-diagonal followed by strict-upper `(Re, Im)`
//! pairs, and a point `X` stands for the positive matrix `X†X`. With that
//! identification the logarithmic GZ functions generate the torus action at
//! unit speed, and `γ` pushes the calibrated Kirillov bivector onto the dual
//! one.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fiber::{torus_act, GZTorusElement, RegularHermitian};
use crate::gw::gw_forward;
use crate::linalg::{cholesky_upper, ANMatrix, AntiHermitianMatrix, ComplexMatrix, HermitianMatrix, C64};
use crate::pattern::{classify, gz_lambda};

/// Default central-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Largest raw antisymmetry defect accepted from the dual construction.
pub const ANTISYMMETRY_TOL: f64 = 1e-8;
/// Sign of the Kirillov bracket, fixed by [`moment_flow_constant`].
pub const KIRILLOV_SIGN: f64 = -1.0;
/// Angular speed of the torus flow per unit of `λ`, fixed by
/// [`moment_flow_constant`].
pub const KIRILLOV_SPEED: f64 = 2.0;
/// Largest condition number of `1 + σπ` accepted by [`gauge_transform`].
pub const GAUGE_COND_LIMIT: f64 = 1e12;
/// Relative singular-value threshold for numerical ranks.
pub const RANK_TOL: f64 = 1e-8;

fn offset(k: usize) -> usize {
    k * (k - 1) / 2
}

/// `⟨A, ξ⟩ = 2 Im tr(Aξ)`.
pub fn pairing(a: &ComplexMatrix, xi: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut tr = C64::new(0.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            tr += a[(r, c)] * xi[(c, r)];
        }
    }
    2.0 * tr.im
}

/// Real coordinates on `Herm(n)`: diagonal entries, then the strict upper
/// triangle row-major as `(Re, Im)` pairs.
pub struct HermChart;

impl HermChart {
    pub fn dim(n: usize) -> usize {
        n * n
    }

    pub fn coords(a: &HermitianMatrix) -> Vec<f64> {
        let n = a.dim();
        let mut x = Vec::with_capacity(n * n);
        x.extend((0..n).map(|i| a[(i, i)].re));
        for r in 0..n {
            for c in r + 1..n {
                x.push(a[(r, c)].re);
                x.push(a[(r, c)].im);
            }
        }
        x
    }

    pub fn matrix(n: usize, x: &[f64]) -> Result<HermitianMatrix> {
        if x.len() != n * n {
            return Err(Error::Dimension { expected: n * n, found: x.len() });
        }
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(x[i], 0.0);
        }
        let mut p = n;
        for r in 0..n {
            for c in r + 1..n {
                let z = C64::new(x[p], x[p + 1]);
                m[(r, c)] = z;
                m[(c, r)] = z.conj();
                p += 2;
            }
        }
        m.check_finite()?;
        Ok(HermitianMatrix::hermitian_part(&m))
    }

    /// Basis `E_b` whose coordinates are the unit vectors.
    pub fn basis(n: usize) -> Vec<HermitianMatrix> {
        (0..n * n)
            .map(|b| {
                let mut x = vec![0.0; n * n];
                x[b] = 1.0;
                Self::matrix(n, &x).expect("unit coordinate vector")
            })
            .collect()
    }

    /// `ξ_a ∈ u(n)` with `⟨E_b, ξ_a⟩ = δ_ab`.
    pub fn dual_basis(n: usize) -> Vec<AntiHermitianMatrix> {
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            let mut m = ComplexMatrix::zeros(n);
            m[(i, i)] = C64::new(0.0, 0.5);
            out.push(AntiHermitianMatrix::trusted(m));
        }
        for r in 0..n {
            for c in r + 1..n {
                let mut m = ComplexMatrix::zeros(n);
                m[(r, c)] = C64::new(0.0, 0.25);
                m[(c, r)] = C64::new(0.0, 0.25);
                out.push(AntiHermitianMatrix::trusted(m));
                let mut m = ComplexMatrix::zeros(n);
                m[(r, c)] = C64::new(-0.25, 0.0);
                m[(c, r)] = C64::new(0.25, 0.0);
                out.push(AntiHermitianMatrix::trusted(m));
            }
        }
        out
    }
}

/// Coordinates on `AN`: `log X_ii`, then strict-upper `(Re, Im)` pairs.
pub struct AnChart;

impl AnChart {
    pub fn coords(x: &ANMatrix) -> Vec<f64> {
        let m = x.matrix();
        let n = m.dim();
        let mut z = Vec::with_capacity(n * n);
        z.extend((0..n).map(|i| m[(i, i)].re.ln()));
        for r in 0..n {
            for c in r + 1..n {
                z.push(m[(r, c)].re);
                z.push(m[(r, c)].im);
            }
        }
        z
    }

    pub fn matrix(n: usize, z: &[f64]) -> Result<ANMatrix> {
        if z.len() != n * n {
            return Err(Error::Dimension { expected: n * n, found: z.len() });
        }
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(z[i].exp(), 0.0);
        }
        let mut p = n;
        for r in 0..n {
            for c in r + 1..n {
                m[(r, c)] = C64::new(z[p], z[p + 1]);
                p += 2;
            }
        }
        ANMatrix::new(m)
    }

    /// Chart components of a tangent vector `Ẋ` (upper triangular, real
    /// diagonal) at `X`.
    pub fn tangent(x: &ANMatrix, dx: &ComplexMatrix) -> Vec<f64> {
        let m = x.matrix();
        let n = m.dim();
        let mut v = Vec::with_capacity(n * n);
        v.extend((0..n).map(|i| dx[(i, i)].re / m[(i, i)].re));
        for r in 0..n {
            for c in r + 1..n {
                v.push(dx[(r, c)].re);
                v.push(dx[(r, c)].im);
            }
        }
        v
    }

    /// Coordinate vector fields `∂_c X` as matrices.
    pub fn partials(x: &ANMatrix) -> Vec<ComplexMatrix> {
        let m = x.matrix();
        let n = m.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            let mut d = ComplexMatrix::zeros(n);
            d[(i, i)] = m[(i, i)];
            out.push(d);
        }
        for r in 0..n {
            for c in r + 1..n {
                let mut d = ComplexMatrix::zeros(n);
                d[(r, c)] = C64::new(1.0, 0.0);
                out.push(d);
                let mut d = ComplexMatrix::zeros(n);
                d[(r, c)] = C64::new(0.0, 1.0);
                out.push(d);
            }
        }
        out
    }
}

/// Antisymmetric coefficient matrix `π^{ab}` at a chart point.
#[derive(Clone, Debug, PartialEq)]
pub struct BivectorMatrix {
    coeffs: DMatrix<f64>,
    raw_defect: f64,
}

impl BivectorMatrix {
    /// Keeps the antisymmetric part and records `max |m + mᵀ|`.
    pub fn from_raw(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "bivector must be square");
        let sym = &m + m.transpose();
        let raw_defect = sym.amax();
        let coeffs = (&m - m.transpose()) * 0.5;
        Self { coeffs, raw_defect }
    }

    pub fn zeros(d: usize) -> Self {
        Self { coeffs: DMatrix::zeros(d, d), raw_defect: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    /// Antisymmetry defect of the matrix this was built from.
    pub fn raw_defect(&self) -> f64 {
        self.raw_defect
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.amax()
    }

    pub fn sharp(&self, covector: &DVector<f64>) -> DVector<f64> {
        &self.coeffs * covector
    }

    /// `{f, g} = df · π · dg`.
    pub fn bracket(&self, df: &DVector<f64>, dg: &DVector<f64>) -> f64 {
        df.dot(&(&self.coeffs * dg))
    }

    /// Numerical rank relative to the largest singular value.
    pub fn rank(&self, rel_tol: f64) -> usize {
        numerical_rank(&self.coeffs, rel_tol)
    }
}

pub(crate) fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// `M = an_part + k_part` with `k_part ∈ u(n)` and `an_part` upper
/// triangular with real diagonal.
#[derive(Clone, Debug)]
pub struct IwasawaSplit {
    pub an_part: ComplexMatrix,
    pub k_part: AntiHermitianMatrix,
}

pub fn iwasawa_split(m: &ComplexMatrix) -> IwasawaSplit {
    let n = m.dim();
    let mut k = ComplexMatrix::zeros(n);
    for r in 0..n {
        k[(r, r)] = C64::new(0.0, m[(r, r)].im);
        for c in 0..r {
            k[(r, c)] = m[(r, c)];
            k[(c, r)] = -m[(r, c)].conj();
        }
    }
    let an_part = m - &k;
    IwasawaSplit { an_part, k_part: AntiHermitianMatrix::trusted(k) }
}

/// `π^{ab}(A) = s·ω·⟨A, [ξ_a, ξ_b]⟩` with the calibrated sign `s` and speed `ω`.
pub fn kirillov_bivector(a: &HermitianMatrix) -> BivectorMatrix {
    scaled_kirillov(a, KIRILLOV_SIGN * KIRILLOV_SPEED)
}

fn scaled_kirillov(a: &HermitianMatrix, scale: f64) -> BivectorMatrix {
    let n = a.dim();
    let xi = HermChart::dual_basis(n);
    let d = n * n;
    let mut m = DMatrix::zeros(d, d);
    for p in 0..d {
        for q in p + 1..d {
            let x = xi[p].matrix();
            let y = xi[q].matrix();
            let bracket = &x.matmul(y) - &y.matmul(x);
            let v = scale * pairing(a.matrix(), &bracket);
            m[(p, q)] = v;
            m[(q, p)] = -v;
        }
    }
    BivectorMatrix::from_raw(m)
}

/// Infinitesimal dressing `Ẋ = X · an_part(X⁻¹ξX)` in chart components.
pub fn dressing_field(x: &ANMatrix, xi: &AntiHermitianMatrix) -> Vec<f64> {
    let xm = x.matrix();
    let inner = x.inverse().matrix().matmul(xi.matrix()).matmul(xm);
    let dx = xm.matmul(&iwasawa_split(&inner).an_part);
    AnChart::tangent(x, &dx)
}

/// Dual Poisson-Lie bivector on `AN`, determined by `A(ξ) = −π^♯⟨θ^R, ξ⟩`
/// for the dressing action, with `θ^R(v) = v·X⁻¹`.
pub fn dual_pl_bivector(x: &ANMatrix) -> Result<BivectorMatrix> {
    let n = x.dim();
    let d = n * n;
    if d <= 1 {
        return Ok(BivectorMatrix::zeros(d));
    }
    let xi = HermChart::dual_basis(n);
    let xinv = x.inverse();
    let partials = AnChart::partials(x);
    let mut v = DMatrix::zeros(d, d);
    let mut c = DMatrix::zeros(d, d);
    for (a, xa) in xi.iter().enumerate() {
        for (row, val) in dressing_field(x, xa).into_iter().enumerate() {
            v[(row, a)] = val;
        }
        for (row, dc) in partials.iter().enumerate() {
            c[(row, a)] = pairing(&dc.matmul(xinv.matrix()), xa.matrix());
        }
    }
    let cinv = c.try_inverse().ok_or_else(|| Error::NumericalFailure("θ^R pairing matrix is singular".into()))?;
    let pi = BivectorMatrix::from_raw(-(v * cinv));
    if pi.raw_defect() > ANTISYMMETRY_TOL {
        return Err(Error::Convention(pi.raw_defect()));
    }
    Ok(pi)
}

/// `π_σ = π(1 + σπ)⁻¹`.
pub fn gauge_transform(pi: &BivectorMatrix, sigma: &DMatrix<f64>) -> Result<BivectorMatrix> {
    let d = pi.dim();
    if sigma.nrows() != d || sigma.ncols() != d {
        return Err(Error::Dimension { expected: d, found: sigma.nrows() });
    }
    let scale = sigma.amax().max(1.0);
    let defect = (sigma + sigma.transpose()).amax();
    if defect > 1e-12 * scale {
        return Err(Error::Domain(format!("2-form is not antisymmetric (defect {defect:e})")));
    }
    let m = DMatrix::identity(d, d) + sigma * pi.coeffs();
    let sv = m.singular_values();
    let cond = if sv.min() > 0.0 { sv.max() / sv.min() } else { f64::INFINITY };
    if cond.is_nan() || cond >= GAUGE_COND_LIMIT {
        return Err(Error::GaugeDomain(cond));
    }
    let inv = m.try_inverse().ok_or(Error::GaugeDomain(f64::INFINITY))?;
    Ok(BivectorMatrix::from_raw(pi.coeffs() * inv))
}

/// Central-difference Jacobian of `f` at `x0`: rows index outputs.
pub fn central_jacobian(f: impl Fn(&[f64]) -> Result<Vec<f64>>, x0: &[f64], step: f64) -> Result<DMatrix<f64>> {
    let mut columns = Vec::with_capacity(x0.len());
    let mut x = x0.to_vec();
    for c in 0..x0.len() {
        x[c] = x0[c] + step;
        let plus = f(&x)?;
        x[c] = x0[c] - step;
        let minus = f(&x)?;
        x[c] = x0[c];
        columns.push(plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * step)).collect::<Vec<_>>());
    }
    let rows = columns.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows, x0.len(), |r, c| columns[c][r]))
}

/// `γ(A)` as a point of `AN`: the upper triangular `X` with `X†X = γ(A)`.
pub fn gamma_an(a: &HermitianMatrix) -> Result<ANMatrix> {
    let image = gw_forward(a, 0.0)?.image;
    cholesky_upper(image.matrix())
}

/// `γ(A)` in AN chart coordinates.
pub fn chart_gamma(a: &HermitianMatrix) -> Result<Vec<f64>> {
    Ok(AnChart::coords(&gamma_an(a)?))
}

fn require_margin(a: &RegularHermitian, fd_step: f64) -> Result<()> {
    let required = 10.0 * fd_step;
    if a.margin() < required {
        return Err(Error::BoundaryStratum { margin: a.margin(), required });
    }
    Ok(())
}

fn lambda_coords(n: usize, x: &[f64]) -> Result<Vec<f64>> {
    Ok(gz_lambda(&HermChart::matrix(n, x)?)?.as_flat().to_vec())
}

fn mu_coords(n: usize, z: &[f64]) -> Result<Vec<f64>> {
    let x = AnChart::matrix(n, z)?;
    let lam = gz_lambda(&x.gram())?;
    if let Some(bad) = lam.as_flat().iter().find(|&&v| v <= 0.0) {
        return Err(Error::Domain(format!("principal-minor eigenvalue {bad:e} is not positive")));
    }
    Ok(lam.as_flat().iter().map(|v| v.ln()).collect())
}

/// Normalized mismatch between `J·π_kir(A)·Jᵀ` and `π_dual(γ(A))`, `J` the
/// central-difference Jacobian of [`chart_gamma`].
pub fn pushforward_residual(a: &RegularHermitian, fd_step: f64) -> Result<f64> {
    let n = a.dim();
    if n == 1 {
        return Ok(0.0);
    }
    require_margin(a, fd_step)?;
    let x0 = HermChart::coords(a.matrix());
    let j = central_jacobian(|x| chart_gamma(&HermChart::matrix(n, x)?), &x0, fd_step)?;
    let pushed = &j * kirillov_bivector(a.matrix()).coeffs() * j.transpose();
    let dual = dual_pl_bivector(&gamma_an(a.matrix())?)?;
    let diff = (pushed - dual.coeffs()).amax();
    let scale = dual.max_abs();
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

fn max_pairwise_bracket(grads: &DMatrix<f64>, pi: &BivectorMatrix) -> f64 {
    let m = grads * pi.coeffs() * grads.transpose();
    m.amax()
}

/// Largest `|{λᵢ^{(k)}, λⱼ^{(l)}}|` under the Kirillov bivector.
pub fn gz_involution_residual(a: &RegularHermitian, fd_step: f64) -> Result<f64> {
    let n = a.dim();
    require_margin(a, fd_step)?;
    let x0 = HermChart::coords(a.matrix());
    let grads = central_jacobian(|x| lambda_coords(n, x), &x0, fd_step)?;
    Ok(max_pairwise_bracket(&grads, &kirillov_bivector(a.matrix())))
}

/// Largest `|{μᵢ^{(k)}, μⱼ^{(l)}}|` under the dual bivector at `γ(A)`.
pub fn gz_involution_residual_dual(a: &RegularHermitian, fd_step: f64) -> Result<f64> {
    let n = a.dim();
    require_margin(a, fd_step)?;
    let x = gamma_an(a.matrix())?;
    let z0 = AnChart::coords(&x);
    let grads = central_jacobian(|z| mu_coords(n, z), &z0, fd_step)?;
    Ok(max_pairwise_bracket(&grads, &dual_pl_bivector(&x)?))
}

/// The one-parameter subgroup `s ↦ e^{is}` in slot `i` of level `k`.
pub fn torus_generator(n: usize, k: usize, i: usize, s: f64) -> Result<GZTorusElement> {
    if k == 0 || k >= n || i >= k {
        return Err(Error::Domain(format!("no torus slot ({k}, {i}) for size {n}; levels run 1..n−1")));
    }
    let angles: Vec<Vec<f64>> =
        (1..n).map(|l| (0..l).map(|j| if l == k && j == i { s } else { 0.0 }).collect()).collect();
    GZTorusElement::from_angles(n, &angles)
}

struct FlowPair {
    hamiltonian: DVector<f64>,
    generator: DVector<f64>,
}

/// `−π^♯(dλᵢ^{(k)})` for the unit-scaled bracket, next to the
/// finite-difference torus generator, both in Herm chart components.
fn kirillov_flow(a: &RegularHermitian, k: usize, i: usize, fd_step: f64, scale: f64) -> Result<FlowPair> {
    let n = a.dim();
    require_margin(a, fd_step)?;
    let plus = torus_act(&torus_generator(n, k, i, fd_step)?, a)?;
    let minus = torus_act(&torus_generator(n, k, i, -fd_step)?, a)?;
    let generator = DVector::from_iterator(
        n * n,
        HermChart::coords(plus.matrix())
            .iter()
            .zip(HermChart::coords(minus.matrix()))
            .map(|(p, m)| (p - m) / (2.0 * fd_step)),
    );
    let x0 = HermChart::coords(a.matrix());
    let idx = offset(k) + i;
    let grad = central_jacobian(|x| Ok(vec![lambda_coords(n, x)?[idx]]), &x0, fd_step)?;
    let grad = DVector::from_iterator(n * n, grad.row(0).iter().copied());
    let hamiltonian = -scaled_kirillov(a.matrix(), scale).sharp(&grad);
    Ok(FlowPair { hamiltonian, generator })
}

fn relative_deviation(pair: &FlowPair) -> f64 {
    let scale = pair.generator.amax();
    let diff = (&pair.hamiltonian - &pair.generator).amax();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Least-squares constant `κ` with `torus generator ≈ −κ·π₁^♯(dλᵢ^{(k)})`,
/// where `π₁^{ab} = ⟨A, [ξ_a, ξ_b]⟩`. Its sign and modulus are the
/// Kirillov sign and angular speed.
pub fn moment_flow_constant(a: &RegularHermitian, k: usize, i: usize, fd_step: f64) -> Result<f64> {
    let pair = kirillov_flow(a, k, i, fd_step, 1.0)?;
    let denom = pair.hamiltonian.dot(&pair.hamiltonian);
    if denom == 0.0 {
        return Err(Error::NumericalFailure("vanishing Hamiltonian vector field".into()));
    }
    Ok(pair.hamiltonian.dot(&pair.generator) / denom)
}

/// Relative deviation between `−π_kir^♯(dλᵢ^{(k)})` and the generator of
/// the torus flow in slot `(k, i)`.
pub fn moment_flow_check(a: &RegularHermitian, k: usize, i: usize, fd_step: f64) -> Result<f64> {
    Ok(relative_deviation(&kirillov_flow(a, k, i, fd_step, KIRILLOV_SIGN * KIRILLOV_SPEED)?))
}

/// Dual counterpart of [`moment_flow_check`]: `−π_dual^♯(dμᵢ^{(k)})` at
/// `γ(A)` against the generator of the torus flow on `γ(A)`.
pub fn dual_moment_flow_check(a: &RegularHermitian, k: usize, i: usize, fd_step: f64) -> Result<f64> {
    let n = a.dim();
    require_margin(a, fd_step)?;
    let image = RegularHermitian::new(gw_forward(a.matrix(), 0.0)?.image.into_hermitian(), 0.0)?;
    let chart_after = |s: f64| -> Result<Vec<f64>> {
        let moved = torus_act(&torus_generator(n, k, i, s)?, &image)?;
        Ok(AnChart::coords(&cholesky_upper(moved.matrix().matrix())?))
    };
    let plus = chart_after(fd_step)?;
    let minus = chart_after(-fd_step)?;
    let generator = DVector::from_iterator(n * n, plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * fd_step)));
    let x = cholesky_upper(image.matrix().matrix())?;
    let z0 = AnChart::coords(&x);
    let idx = offset(k) + i;
    let grad = central_jacobian(|z| Ok(vec![mu_coords(n, z)?[idx]]), &z0, fd_step)?;
    let grad = DVector::from_iterator(n * n, grad.row(0).iter().copied());
    let hamiltonian = -dual_pl_bivector(&x)?.sharp(&grad);
    Ok(relative_deviation(&FlowPair { hamiltonian, generator }))
}

/// Largest rate of change of any GZ function along the torus generator in
/// slot `(k, i)`; zero when the flow preserves the λ-fibers.
pub fn generator_level_set_defect(a: &RegularHermitian, k: usize, i: usize, fd_step: f64) -> Result<f64> {
    let n = a.dim();
    let pair = kirillov_flow(a, k, i, fd_step, KIRILLOV_SIGN * KIRILLOV_SPEED)?;
    let x0 = HermChart::coords(a.matrix());
    let grads = central_jacobian(|x| lambda_coords(n, x), &x0, fd_step)?;
    Ok((grads * pair.generator).amax())
}

/// Interlacing margin of `a`, as used by the finite-difference guards.
pub fn margin(a: &HermitianMatrix) -> Result<f64> {
    Ok(classify(&gz_lambda(a)?, 0.0).margin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_regular;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn herm_chart_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = crate::sampling::random_hermitian(4, &mut rng, 2.0);
        let x = HermChart::coords(&a);
        assert_eq!(x.len(), 16);
        assert_eq!(HermChart::matrix(4, &x).unwrap(), a);
        assert!(HermChart::matrix(3, &x).is_err());
    }

    #[test]
    fn dual_basis_is_dual() {
        let n = 3;
        let e = HermChart::basis(n);
        let xi = HermChart::dual_basis(n);
        for (b, eb) in e.iter().enumerate() {
            for (a, xa) in xi.iter().enumerate() {
                let expected = if a == b { 1.0 } else { 0.0 };
                assert_eq!(pairing(eb.matrix(), xa.matrix()), expected);
            }
        }
    }

    #[test]
    fn an_chart_round_trip() {
        let z = [0.1, -0.3, 0.2, 0.5, -0.7];
        assert!(AnChart::matrix(2, &z).is_err());
        let z = [0.1, -0.3, 0.5, -0.7];
        let x = AnChart::matrix(2, &z).unwrap();
        let back = AnChart::coords(&x);
        for (u, v) in z.iter().zip(&back) {
            assert!((u - v).abs() < 1e-15);
        }
        assert_eq!(AnChart::coords(&ANMatrix::identity(3)), vec![0.0; 9]);
    }

    #[test]
    fn iwasawa_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = crate::sampling::random_hermitian(3, &mut rng, 1.0);
        let xi = AntiHermitianMatrix::from_hermitian(&h);
        let split = iwasawa_split(xi.matrix());
        assert_eq!(split.an_part.max_abs(), 0.0);
        assert_eq!(split.k_part.matrix(), xi.matrix());

        let mut up = ComplexMatrix::zeros(3);
        up[(0, 0)] = C64::new(2.0, 0.0);
        up[(0, 2)] = C64::new(1.0, -3.0);
        up[(1, 2)] = C64::new(0.5, 0.5);
        let split = iwasawa_split(&up);
        assert_eq!(split.an_part, up);
        assert_eq!(split.k_part.matrix().max_abs(), 0.0);
    }

    #[test]
    fn kirillov_vanishes_at_zero_and_is_linear() {
        assert_eq!(kirillov_bivector(&HermitianMatrix::zeros(3)).max_abs(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = crate::sampling::random_hermitian(3, &mut rng, 1.0);
        let pi = kirillov_bivector(&a);
        let pi2 = kirillov_bivector(&a.scale(2.0));
        assert!((pi.coeffs() * 2.0 - pi2.coeffs()).amax() < 1e-15);
        assert_eq!(pi.raw_defect(), 0.0);
    }

    #[test]
    fn dressing_vanishes_at_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let xi = AntiHermitianMatrix::from_hermitian(&crate::sampling::random_hermitian(3, &mut rng, 1.0));
        assert!(dressing_field(&ANMatrix::identity(3), &xi).iter().all(|v| v.abs() < 1e-15));
        let zero = AntiHermitianMatrix::from_hermitian(&HermitianMatrix::zeros(3));
        let x = AnChart::matrix(3, &[0.1, 0.2, -0.3, 0.4, 0.5, -0.6, 0.7, 0.8, 0.9]).unwrap();
        assert!(dressing_field(&x, &zero).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dual_bivector_small_cases() {
        assert_eq!(dual_pl_bivector(&ANMatrix::identity(1)).unwrap().dim(), 1);
        assert!(dual_pl_bivector(&ANMatrix::identity(3)).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn torus_slots_are_checked() {
        assert!(torus_generator(3, 3, 0, 0.1).is_err());
        assert!(torus_generator(3, 1, 1, 0.1).is_err());
        assert!(torus_generator(3, 2, 1, 0.1).is_ok());
    }

    #[test]
    fn calibration_constant_is_frozen() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_regular(3, &mut rng, 1.0, 0.05).unwrap();
        let kappa = moment_flow_constant(&a, 2, 1, FD_STEP).unwrap();
        assert!((kappa - KIRILLOV_SIGN * KIRILLOV_SPEED).abs() < 1e-6, "κ = {kappa}");
    }

    #[test]
    fn gauge_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = crate::sampling::random_hermitian(2, &mut rng, 1.0);
        let pi = kirillov_bivector(&a);
        let same = gauge_transform(&pi, &DMatrix::zeros(4, 4)).unwrap();
        assert_eq!(same.coeffs(), pi.coeffs());
        let sigma = DMatrix::from_fn(4, 4, |r, c| (c as f64) - (r as f64));
        let zero = gauge_transform(&BivectorMatrix::zeros(4), &sigma).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
        assert!(gauge_transform(&pi, &DMatrix::identity(4, 4)).is_err());
    }
}
