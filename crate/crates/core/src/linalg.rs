//! Dense complex linear algebra for small matrices.
//!
//! Everything the Gelfand-Zeitlin machinery needs sits on top of one
//! primitive: a cyclic Jacobi eigensolver for Hermitian matrices with a
//! fixed ordering (ascending) and a fixed phase convention for the frame.
//! The solver is deterministic and keeps real symmetric input real: complex
//! rotations degenerate to real plane rotations when the pivot is real.
//!
//! Frames follow the `U A U⁻¹ = diag(values)` convention, so the rows of a
//! frame are the (conjugated) eigenvectors.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default relative tolerance for the Hermitian check.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Default tolerance for the unitarity check.
pub const UNITARY_TOL: f64 = 1e-10;
/// Default cap on Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.n, self.n)?;
        for r in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|c| {
                    let z = self[(r, c)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(f(r, c));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from row-major data; fails on a non-square length or
    /// non-finite entries.
    pub fn from_row_major(n: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension { expected: n * n, found: data.len() });
        }
        let m = Self { n, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_real(n: usize, data: &[f64]) -> Result<Self> {
        Self::from_row_major(n, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn diagonal_complex(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn check_finite(&self) -> Result<()> {
        for (idx, z) in self.data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: idx / self.n, col: idx % self.n });
            }
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        out
    }

    /// `self · other · self⁻¹` for unitary `self`.
    pub fn conjugate_unitary(&self, other: &Self) -> Self {
        self.matmul(other).matmul(&self.adjoint())
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest absolute imaginary part over all entries.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// Exact test: every off-diagonal entry is zero.
    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|r| (0..self.n).all(|c| r == c || self[(r, c)] == ZERO))
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..self.n {
            for c in r..self.n {
                d = d.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        d
    }

    pub fn anti_hermitian_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..self.n {
            for c in r..self.n {
                d = d.max((self[(r, c)] + self[(c, r)].conj()).norm());
            }
        }
        d
    }

    pub fn unitary_defect(&self) -> f64 {
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.n))
    }

    /// Upper-left `k×k` corner.
    pub fn principal(&self, k: usize) -> Self {
        assert!(k <= self.n);
        Self::from_fn(k, |r, c| self[(r, c)])
    }

    /// Places `self` in the upper-left corner of an `n×n` matrix whose
    /// remaining diagonal is `fill` (zeros elsewhere).
    pub fn embed(&self, n: usize, fill: C64) -> Self {
        assert!(n >= self.n);
        let mut m = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] = if r < self.n && c < self.n {
                    self[(r, c)]
                } else if r == c {
                    fill
                } else {
                    ZERO
                };
            }
        }
        m
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n).max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm())).unwrap();
            let p = a[pivot * n + col];
            if p == ZERO {
                return ZERO;
            }
            if pivot != col {
                for c in 0..n {
                    a.swap(pivot * n + c, col * n + c);
                }
                det = -det;
            }
            det *= p;
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                if f == ZERO {
                    continue;
                }
                for c in col..n {
                    let v = a[col * n + c];
                    a[r * n + c] -= f * v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs();
        for col in 0..n {
            let pivot = (col..n).max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm())).unwrap();
            let p = a[(pivot, col)];
            if p.norm() <= f64::EPSILON * scale * n as f64 {
                return Err(Error::NumericalFailure("singular matrix in inverse".into()));
            }
            if pivot != col {
                for c in 0..n {
                    a.data.swap(pivot * n + c, col * n + c);
                    inv.data.swap(pivot * n + c, col * n + c);
                }
            }
            let pinv = ONE / p;
            for c in 0..n {
                a[(col, c)] *= pinv;
                inv[(col, c)] *= pinv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == ZERO {
                    continue;
                }
                for c in 0..n {
                    let (av, iv) = (a[(col, c)], inv[(col, c)]);
                    a[(r, c)] -= f * av;
                    inv[(r, c)] -= f * iv;
                }
            }
        }
        Ok(inv)
    }

    /// Real part of the Hermitian symmetrization `(M + M†)/2`.
    fn symmetrized(&self) -> Self {
        let mut m = Self::from_fn(self.n, |r, c| (self[(r, c)] + self[(c, r)].conj()) * 0.5);
        for i in 0..self.n {
            m[(i, i)].im = 0.0;
        }
        m
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.n + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.n + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        ComplexMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        ComplexMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

/// Hermitian matrix, a point of `u(n)* ≅ Herm(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Validates with the default relative tolerance.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tol(m, HERMITIAN_TOL)
    }

    /// Accepts `m` if `max|M − M†| ≤ tol·max(1, max|M|)`, then stores the
    /// exact Hermitian part.
    pub fn with_tol(m: ComplexMatrix, tol: f64) -> Result<Self> {
        m.check_finite()?;
        let defect = m.hermitian_defect();
        let bound = tol * m.max_abs().max(1.0);
        if defect > bound {
            return Err(Error::NotHermitian { defect, tol: bound });
        }
        Ok(Self(m.symmetrized()))
    }

    /// Projects an arbitrary matrix onto its Hermitian part.
    pub fn hermitian_part(m: &ComplexMatrix) -> Self {
        Self(m.symmetrized())
    }

    pub fn from_real_symmetric(n: usize, data: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real(n, data)?)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self(ComplexMatrix::diagonal(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn principal(&self, k: usize) -> Self {
        Self(self.0.principal(k))
    }

    pub fn conj(&self) -> Self {
        Self(self.0.conj())
    }

    /// `A + uI`.
    pub fn shift(&self, u: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.dim() {
            m[(i, i)] += C64::new(u, 0.0);
        }
        Self(m)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale_real(s))
    }

    /// `W A W⁻¹` for unitary `W`.
    pub fn conjugate_by(&self, w: &ComplexMatrix) -> Self {
        Self::hermitian_part(&w.conjugate_unitary(&self.0))
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

/// Positive definite Hermitian matrix, a point of `Herm⁺(n) ≅ U(n)*`.
#[derive(Clone, Debug, PartialEq)]
pub struct PositiveDefiniteMatrix(HermitianMatrix);

impl PositiveDefiniteMatrix {
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        let eig = eig_hermitian(&h)?;
        if eig.values[0] <= 0.0 {
            return Err(Error::Domain(format!(
                "matrix is not positive definite (smallest eigenvalue {:e})",
                eig.values[0]
            )));
        }
        Ok(Self(h))
    }

    /// Wraps a matrix known to be positive definite by construction.
    pub(crate) fn trusted(h: HermitianMatrix) -> Self {
        Self(h)
    }

    pub fn identity(n: usize) -> Self {
        Self(HermitianMatrix(ComplexMatrix::identity(n)))
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.0.matrix()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.0
    }
}

/// Unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tol(m, UNITARY_TOL)
    }

    pub fn with_tol(m: ComplexMatrix, tol: f64) -> Result<Self> {
        m.check_finite()?;
        let defect = m.unitary_defect();
        if defect > tol {
            return Err(Error::NotUnitary { defect, tol });
        }
        Ok(Self(m))
    }

    pub(crate) fn trusted(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// Anti-Hermitian matrix, an element of `u(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AntiHermitianMatrix(ComplexMatrix);

impl AntiHermitianMatrix {
    pub fn new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        m.check_finite()?;
        let defect = m.anti_hermitian_defect();
        if defect > tol {
            return Err(Error::NotAntiHermitian { defect, tol });
        }
        Ok(Self(m))
    }

    pub(crate) fn trusted(m: ComplexMatrix) -> Self {
        Self(m)
    }

    /// `i·H` for Hermitian `H`.
    pub fn from_hermitian(h: &HermitianMatrix) -> Self {
        Self(h.matrix().scale(C64::new(0.0, 1.0)))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Upper triangular matrix with strictly positive real diagonal: a point of
/// the dual group `AN`.
#[derive(Clone, Debug, PartialEq)]
pub struct ANMatrix(ComplexMatrix);

impl ANMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        m.check_finite()?;
        let n = m.dim();
        for r in 0..n {
            for c in 0..r {
                if m[(r, c)] != ZERO {
                    return Err(Error::Domain("AN matrix must be upper triangular".into()));
                }
            }
            if m[(r, r)].im != 0.0 || m[(r, r)].re <= 0.0 {
                return Err(Error::Domain("AN matrix needs a strictly positive real diagonal".into()));
            }
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Inverse by back substitution; stays in `AN`.
    pub fn inverse(&self) -> Self {
        let n = self.dim();
        let x = &self.0;
        let mut inv = ComplexMatrix::zeros(n);
        for c in 0..n {
            inv[(c, c)] = C64::new(1.0 / x[(c, c)].re, 0.0);
            for r in (0..c).rev() {
                let mut s = ZERO;
                for k in r + 1..=c {
                    s += x[(r, k)] * inv[(k, c)];
                }
                inv[(r, c)] = -s / x[(r, r)].re;
            }
        }
        Self(inv)
    }

    /// `X†X`.
    pub fn gram(&self) -> HermitianMatrix {
        HermitianMatrix::hermitian_part(&self.0.adjoint().matmul(&self.0))
    }
}

/// Eigendecomposition `frame · A · frame⁻¹ = diag(values)` with ascending
/// values.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub frame: UnitaryMatrix,
}

impl EigenDecomposition {
    /// `frame⁻¹ · diag(f(values)) · frame`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let u = self.frame.matrix();
        let n = u.dim();
        let fv: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        let m = ComplexMatrix::from_fn(n, |r, c| (0..n).map(|i| u[(i, r)].conj() * u[(i, c)] * fv[i]).sum());
        HermitianMatrix::hermitian_part(&m)
    }

    /// Eigenvector `i` (the conjugate of frame row `i`).
    pub fn vector(&self, i: usize) -> Vec<C64> {
        let u = self.frame.matrix();
        (0..u.dim()).map(|c| u[(i, c)].conj()).collect()
    }
}

pub fn eig_hermitian(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    eig_hermitian_with(a, MAX_SWEEPS)
}

/// Cyclic complex Jacobi.
pub fn eig_hermitian_with(a: &HermitianMatrix, max_sweeps: usize) -> Result<EigenDecomposition> {
    let n = a.dim();
    let mut m = a.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius();

    let mut converged = n <= 1 || scale == 0.0;
    let mut sweep = 0;
    while !converged {
        if sweep == max_sweeps {
            return Err(Error::NumericalFailure(format!(
                "Jacobi eigensolver did not converge after {max_sweeps} sweeps"
            )));
        }
        sweep += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                if r <= 1e-20 * scale {
                    m[(p, q)] = ZERO;
                    m[(q, p)] = ZERO;
                    continue;
                }
                rotate(&mut m, &mut v, p, q, apq, r);
            }
        }
        let off: f64 =
            (0..n).flat_map(|r| (r + 1..n).map(move |c| (r, c))).map(|(r, c)| m[(r, c)].norm_sqr()).sum::<f64>().sqrt();
        converged = off <= 1e-17 * scale;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();

    let mut frame = ComplexMatrix::zeros(n);
    for (row, &col) in order.iter().enumerate() {
        // largest-modulus entry of the eigenvector made real positive;
        // strict comparison keeps the lowest index on ties
        let mut best = 0;
        for k in 1..n {
            if v[(k, col)].norm() > v[(best, col)].norm() {
                best = k;
            }
        }
        let pivot = v[(best, col)];
        let phase = if pivot.im == 0.0 { C64::new(pivot.re.signum(), 0.0) } else { pivot / pivot.norm() };
        for k in 0..n {
            frame[(row, k)] = (v[(k, col)] * phase.conj()).conj();
        }
    }
    Ok(EigenDecomposition { values, frame: UnitaryMatrix(frame) })
}

/// One complex Jacobi rotation `m ← J† m J`, `v ← v J` annihilating `m[p,q]`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, apq: C64, r: f64) {
    let n = m.dim();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e = if apq.im == 0.0 { C64::new(apq.re.signum(), 0.0) } else { apq / r };
    // J_pp = c, J_pq = s·e, J_qp = −s·ē, J_qq = c
    let jpq = e * s;
    let jqp = -e.conj() * s;

    for row in 0..n {
        let (xp, xq) = (m[(row, p)], m[(row, q)]);
        m[(row, p)] = xp * c + xq * jqp;
        m[(row, q)] = xp * jpq + xq * c;
    }
    for col in 0..n {
        let (xp, xq) = (m[(p, col)], m[(q, col)]);
        m[(p, col)] = xp * c + xq * jqp.conj();
        m[(q, col)] = xp * jpq.conj() + xq * c;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;

    for row in 0..n {
        let (xp, xq) = (v[(row, p)], v[(row, q)]);
        v[(row, p)] = xp * c + xq * jqp;
        v[(row, q)] = xp * jpq + xq * c;
    }
}

pub fn exp_hermitian(a: &HermitianMatrix) -> Result<PositiveDefiniteMatrix> {
    if a.matrix().is_diagonal() {
        let d: Vec<f64> = (0..a.dim()).map(|i| a[(i, i)].re.exp()).collect();
        return Ok(PositiveDefiniteMatrix(HermitianMatrix::diagonal(&d)));
    }
    Ok(PositiveDefiniteMatrix(eig_hermitian(a)?.apply(f64::exp)))
}

pub fn log_pd(p: &PositiveDefiniteMatrix) -> Result<HermitianMatrix> {
    let eig = eig_hermitian(p.hermitian())?;
    if eig.values[0] <= 0.0 {
        return Err(Error::Domain(format!("logarithm needs positive eigenvalues (smallest {:e})", eig.values[0])));
    }
    if p.matrix().is_diagonal() {
        let d: Vec<f64> = (0..p.dim()).map(|i| p.matrix()[(i, i)].re.ln()).collect();
        return Ok(HermitianMatrix::diagonal(&d));
    }
    Ok(eig.apply(f64::ln))
}

/// Positive square root.
pub fn sqrt_pd(p: &HermitianMatrix) -> Result<PositiveDefiniteMatrix> {
    let eig = eig_hermitian(p)?;
    if eig.values[0] <= 0.0 {
        return Err(Error::Domain(format!("square root needs positive eigenvalues (smallest {:e})", eig.values[0])));
    }
    Ok(PositiveDefiniteMatrix(eig.apply(f64::sqrt)))
}

/// Upper triangular `X` with positive diagonal and `X†X = P²`.
pub fn cholesky_an(p: &PositiveDefiniteMatrix) -> Result<ANMatrix> {
    let q = HermitianMatrix::hermitian_part(&p.matrix().matmul(p.matrix()));
    cholesky_upper(q.matrix())
}

/// Upper triangular `X` with positive diagonal and `X†X = Q`.
pub fn cholesky_upper(q: &ComplexMatrix) -> Result<ANMatrix> {
    let n = q.dim();
    let mut x = ComplexMatrix::zeros(n);
    for j in 0..n {
        let mut d = q[(j, j)].re;
        for l in 0..j {
            d -= x[(l, j)].norm_sqr();
        }
        if d.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Domain(format!("Cholesky lost positivity at pivot {j} ({d:e})")));
        }
        let djj = d.sqrt();
        x[(j, j)] = C64::new(djj, 0.0);
        for k in j + 1..n {
            let mut s = q[(j, k)];
            for l in 0..j {
                s -= x[(l, j)].conj() * x[(l, k)];
            }
            x[(j, k)] = s / djj;
        }
    }
    Ok(ANMatrix(x))
}
