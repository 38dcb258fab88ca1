//! The Gelfand-Zeitlin torus bundle over the interior of the cone.
//!
//! Over interior patterns the map `λ` is a principal bundle for the torus
//! `T(n−1)×⋯×T(1)`. A point is rebuilt level by level: given the upper-left
//! block `A⁽ᵏ⁾` and its diagonalizer `U`, the next column `b` satisfies
//! `U·b = b̃` where `|b̃ᵢ|²` and the new corner entry are fixed by the
//! pattern and only the phases of `b̃ᵢ` are free. Those phases are the torus
//! coordinates.
//!
//! Level frames here use their own phase convention: the last entry of
//! every eigenvector of `A⁽ᵏ⁾` is real and positive. On the regular stratum
//! that entry never vanishes (otherwise `A⁽ᵏ⁻¹⁾` would share the
//! eigenvalue), so the convention is continuous there and the canonical
//! section built from it is a continuous real section.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, EigenDecomposition, HermitianMatrix, UnitaryMatrix, C64};
use crate::pattern::{classify, gz_lambda, ConeClass, GZPattern};

/// Above this size the fiber coefficients are accumulated as log-magnitudes.
const LOG_PRODUCT_THRESHOLD: usize = 6;

/// An element of `T(n−1)×⋯×T(1)`: for each level `k = 1..n−1`, `k` unit
/// complex numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct GZTorusElement {
    n: usize,
    values: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct TorusJson {
    n: usize,
    angles: Vec<Vec<f64>>,
}

fn offset(k: usize) -> usize {
    k * (k - 1) / 2
}

fn principal_angle(z: C64) -> f64 {
    let a = z.arg();
    if a <= -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

impl GZTorusElement {
    pub fn identity(n: usize) -> Self {
        let len = if n == 0 { 0 } else { offset(n) };
        Self { n, values: vec![C64::new(1.0, 0.0); len] }
    }

    /// Angles per level `k = 1..n−1`.
    pub fn from_angles(n: usize, angles: &[Vec<f64>]) -> Result<Self> {
        if angles.len() != n.saturating_sub(1) {
            return Err(Error::Dimension { expected: n.saturating_sub(1), found: angles.len() });
        }
        let mut values = Vec::new();
        for (idx, level) in angles.iter().enumerate() {
            if level.len() != idx + 1 {
                return Err(Error::Dimension { expected: idx + 1, found: level.len() });
            }
            if level.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parse("non-finite torus angle".into()));
            }
            values.extend(level.iter().map(|&th| C64::from_polar(1.0, th)));
        }
        Ok(Self { n, values })
    }

    /// Normalizes each entry to unit modulus.
    pub fn from_phases(n: usize, phases: Vec<Vec<C64>>) -> Result<Self> {
        if phases.len() != n.saturating_sub(1) {
            return Err(Error::Dimension { expected: n.saturating_sub(1), found: phases.len() });
        }
        let mut values = Vec::new();
        for (idx, level) in phases.into_iter().enumerate() {
            if level.len() != idx + 1 {
                return Err(Error::Dimension { expected: idx + 1, found: level.len() });
            }
            for z in level {
                if !z.norm().is_normal() {
                    return Err(Error::NumericalFailure("degenerate torus phase".into()));
                }
                values.push(z / z.norm());
            }
        }
        Ok(Self { n, values })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Level `k`, `1 ≤ k ≤ n−1`.
    pub fn level(&self, k: usize) -> &[C64] {
        assert!(k >= 1 && k < self.n, "torus level {k} out of range");
        &self.values[offset(k)..offset(k + 1)]
    }

    pub fn angles(&self) -> Vec<Vec<f64>> {
        (1..self.n).map(|k| self.level(k).iter().map(|&z| principal_angle(z)).collect()).collect()
    }

    pub fn as_flat(&self) -> &[C64] {
        &self.values
    }

    /// Pointwise product.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "torus size mismatch");
        Self { n: self.n, values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect() }
    }

    pub fn inverse(&self) -> Self {
        Self { n: self.n, values: self.values.iter().map(|z| z.conj()).collect() }
    }

    pub fn conj(&self) -> Self {
        self.inverse()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "torus size mismatch");
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let len = if n == 0 { 0 } else { offset(n) };
        let values = (0..len)
            .map(|_| C64::from_polar(1.0, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)))
            .collect();
        Self { n, values }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TorusJson { n: self.n, angles: self.angles() }).expect("torus serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: TorusJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_angles(raw.n, &raw.angles)
    }
}

/// A Hermitian matrix on the regular stratum, with its pattern cached.
#[derive(Clone, Debug)]
pub struct RegularHermitian {
    matrix: HermitianMatrix,
    pattern: GZPattern,
    margin: f64,
}

impl RegularHermitian {
    pub fn new(a: HermitianMatrix, strictness_tol: f64) -> Result<Self> {
        let pattern = gz_lambda(&a)?;
        let c = classify(&pattern, strictness_tol);
        if c.class != ConeClass::Interior || c.margin < strictness_tol {
            return Err(Error::BoundaryStratum { margin: c.margin, required: strictness_tol });
        }
        Ok(Self { matrix: a, pattern, margin: c.margin })
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn pattern(&self) -> &GZPattern {
        &self.pattern
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.matrix
    }
}

/// Diagonalizer of the `k`-th principal block with every eigenvector's last
/// entry real and positive.
pub fn level_frame(m: &ComplexMatrix, k: usize) -> Result<EigenDecomposition> {
    let block = HermitianMatrix::hermitian_part(&m.principal(k));
    let mut eig = eig_hermitian(&block)?;
    let mut u = eig.frame.matrix().clone();
    for r in 0..k {
        // frame rows are conjugated eigenvectors
        let last = u[(r, k - 1)];
        let norm = last.norm();
        if norm == 0.0 {
            continue;
        }
        let phase = if last.im == 0.0 { C64::new(last.re.signum(), 0.0) } else { last / norm };
        for c in 0..k {
            u[(r, c)] *= phase.conj();
        }
    }
    eig.frame = UnitaryMatrix::trusted(u);
    Ok(eig)
}

/// `∏ num / ∏ den`, optionally through log-magnitudes.
fn product_ratio(num: impl Iterator<Item = f64>, den: impl Iterator<Item = f64>, logarithmic: bool) -> f64 {
    if !logarithmic {
        return num.product::<f64>() / den.product::<f64>();
    }
    let mut log = 0.0;
    let mut negative = false;
    for x in num {
        if x == 0.0 {
            return 0.0;
        }
        log += x.abs().ln();
        negative ^= x < 0.0;
    }
    for x in den {
        log -= x.abs().ln();
        negative ^= x < 0.0;
    }
    if negative {
        -log.exp()
    } else {
        log.exp()
    }
}

/// Squared moduli `|b̃ᵢ|²` and corner entry `c` of the next column, from two
/// consecutive pattern levels.
pub fn fiber_coefficients(lower: &[f64], upper: &[f64], logarithmic: bool) -> Result<(Vec<f64>, f64)> {
    let k = lower.len();
    assert_eq!(upper.len(), k + 1, "levels must differ in length by one");
    let mut bsq = Vec::with_capacity(k);
    let mut corner = upper[k];
    for (i, &li) in lower.iter().enumerate() {
        let den = || lower.iter().enumerate().filter(|&(j, _)| j != i).map(move |(_, &lj)| lj - li);
        let value = -product_ratio(upper.iter().map(|&lr| lr - li), den(), logarithmic);
        if value < -1e-12 {
            return Err(Error::NumericalFailure(format!(
                "negative squared fiber coefficient {value:e} at level {k}; interlacing margin too small"
            )));
        }
        bsq.push(value.max(0.0));
        corner += product_ratio(upper[..k].iter().map(|&lr| lr - li), den(), logarithmic);
    }
    Ok((bsq, corner))
}

/// Builds the matrix with pattern `p` and torus coordinate `t`.
pub fn reconstruct(p: &GZPattern, t: &GZTorusElement, strictness_tol: f64) -> Result<RegularHermitian> {
    let n = p.size();
    if t.size() != n {
        return Err(Error::Dimension { expected: n, found: t.size() });
    }
    let c = classify(p, strictness_tol);
    if c.class != ConeClass::Interior || c.margin < strictness_tol {
        return Err(Error::Domain(format!(
            "reconstruction needs an interior pattern with margin ≥ {strictness_tol:e} (got {:?}, margin {:e})",
            c.class, c.margin
        )));
    }
    let logarithmic = n > LOG_PRODUCT_THRESHOLD;
    let mut a = ComplexMatrix::zeros(n);
    if n == 0 {
        return Ok(RegularHermitian { matrix: HermitianMatrix::zeros(0), pattern: p.clone(), margin: c.margin });
    }
    a[(0, 0)] = C64::new(p.get(1, 0), 0.0);
    for k in 1..n {
        let frame = level_frame(&a, k)?;
        let u = frame.frame.matrix();
        let (bsq, corner) = fiber_coefficients(p.level(k), p.level(k + 1), logarithmic)?;
        let bt: Vec<C64> = bsq.iter().zip(t.level(k)).map(|(&m, &z)| z * m.sqrt()).collect();
        for r in 0..k {
            let b: C64 = (0..k).map(|i| u[(i, r)].conj() * bt[i]).sum();
            a[(r, k)] = b;
            a[(k, r)] = b.conj();
        }
        a[(k, k)] = C64::new(corner, 0.0);
    }
    Ok(RegularHermitian { matrix: HermitianMatrix::hermitian_part(&a), pattern: p.clone(), margin: c.margin })
}

/// The canonical real point over `p`: all `b̃ᵢ` positive.
pub fn section(p: &GZPattern, strictness_tol: f64) -> Result<RegularHermitian> {
    reconstruct(p, &GZTorusElement::identity(p.size()), strictness_tol)
}

/// `Ad_{U⁻¹ t U}` on the first `k+1` levels' worth of structure: conjugation
/// by the level-`k` torus element in the frame `u`.
fn level_unitary(u: &ComplexMatrix, t: &[C64], n: usize) -> ComplexMatrix {
    let k = u.dim();
    let w = ComplexMatrix::from_fn(k, |r, c| (0..k).map(|i| u[(i, r)].conj() * t[i] * u[(i, c)]).sum());
    w.embed(n, C64::new(1.0, 0.0))
}

/// Torus coordinate of `a` relative to the canonical section.
///
/// The section is transported level by level onto `a`; at level `k` the
/// ratio `(U·b_A)ᵢ / (U·b_B)ᵢ` does not depend on the phases of `U`.
pub fn recover_torus(a: &RegularHermitian) -> Result<GZTorusElement> {
    let n = a.dim();
    let p = a.pattern();
    let logarithmic = n > LOG_PRODUCT_THRESHOLD;
    let mut b = section(p, 0.0)?.into_hermitian().into_inner();
    let am = a.matrix().matrix();
    let mut phases = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let frame = level_frame(&b, k)?;
        let u = frame.frame.matrix();
        let (bsq, _) = fiber_coefficients(p.level(k), p.level(k + 1), logarithmic)?;
        let mut level = Vec::with_capacity(k);
        for i in 0..k {
            let ua: C64 = (0..k).map(|r| u[(i, r)] * am[(r, k)]).sum();
            let ub: C64 = (0..k).map(|r| u[(i, r)] * b[(r, k)]).sum();
            let floor = 0.5 * bsq[i].sqrt();
            if ub.norm().is_nan() || ub.norm() < floor || ua.norm() < floor || ub.norm() == 0.0 {
                return Err(Error::NumericalFailure(format!(
                    "fiber coefficient at level {k}, index {i} fell below the margin floor {floor:e}"
                )));
            }
            let z = ua / ub;
            level.push(z / z.norm());
        }
        let w = level_unitary(u, &level, n);
        b = w.conjugate_unitary(&b);
        phases.push(level);
    }
    GZTorusElement::from_phases(n, phases)
}

/// `χ(t, A) = U₁⁻¹t₁U₁ ⋯ U_{n−1}⁻¹t_{n−1}U_{n−1}`.
pub fn chi_word(t: &GZTorusElement, a: &RegularHermitian) -> Result<UnitaryMatrix> {
    chi_word_matrix(t, a.matrix())
}

pub(crate) fn chi_word_matrix(t: &GZTorusElement, a: &HermitianMatrix) -> Result<UnitaryMatrix> {
    let n = a.dim();
    if t.size() != n {
        return Err(Error::Dimension { expected: n, found: t.size() });
    }
    let mut chi = ComplexMatrix::identity(n);
    for k in 1..n {
        if t.level(k).iter().all(|&z| z == C64::new(1.0, 0.0)) {
            continue;
        }
        let frame = level_frame(a.matrix(), k)?;
        chi = chi.matmul(&level_unitary(frame.frame.matrix(), t.level(k), n));
    }
    Ok(UnitaryMatrix::trusted(chi))
}

/// Gelfand-Zeitlin torus action `t∙A = Ad_{χ(t,A)} A`.
pub fn torus_act(t: &GZTorusElement, a: &RegularHermitian) -> Result<RegularHermitian> {
    if t.as_flat().iter().all(|&z| z == C64::new(1.0, 0.0)) {
        return Ok(a.clone());
    }
    let chi = chi_word(t, a)?;
    Ok(RegularHermitian {
        matrix: a.matrix().conjugate_by(chi.matrix()),
        pattern: a.pattern().clone(),
        margin: a.margin(),
    })
}

/// Applies the levels one at a time, lowest first, recomputing frames from
/// the current matrix after each step.
pub fn torus_act_sequential(t: &GZTorusElement, a: &RegularHermitian) -> Result<RegularHermitian> {
    let n = a.dim();
    let mut m = a.matrix().matrix().clone();
    for k in 1..n {
        let frame = level_frame(&m, k)?;
        m = level_unitary(frame.frame.matrix(), t.level(k), n).conjugate_unitary(&m);
    }
    Ok(RegularHermitian {
        matrix: HermitianMatrix::hermitian_part(&m),
        pattern: a.pattern().clone(),
        margin: a.margin(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{sample_interior, STRICTNESS_TOL};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pat(levels: &[&[f64]]) -> GZPattern {
        GZPattern::from_levels(levels.iter().map(|l| l.to_vec()).collect()).unwrap()
    }

    #[test]
    fn hand_evaluated_two_by_two() {
        let p = pat(&[&[0.0], &[-1.0, 1.0]]);
        let (bsq, c) = fiber_coefficients(p.level(1), p.level(2), false).unwrap();
        assert_eq!(bsq, vec![1.0]);
        assert_eq!(c, 0.0);
        let s = section(&p, STRICTNESS_TOL).unwrap();
        let expected = ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(s.matrix().matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn one_by_one_section() {
        let s = section(&pat(&[&[2.5]]), STRICTNESS_TOL).unwrap();
        assert_eq!(s.matrix()[(0, 0)].re, 2.5);
    }

    #[test]
    fn boundary_pattern_is_rejected() {
        let p = gz_lambda(&HermitianMatrix::diagonal(&[1.0, 2.0, 3.0])).unwrap();
        assert!(matches!(section(&p, STRICTNESS_TOL), Err(Error::Domain(_))));
    }

    #[test]
    fn corner_matches_trace_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=9 {
            let p = sample_interior(n, &mut rng, 2.0, 1e-2).unwrap();
            for k in 1..n {
                for log in [false, true] {
                    let (bsq, c) = fiber_coefficients(p.level(k), p.level(k + 1), log).unwrap();
                    let trace_gap: f64 = p.level(k + 1).iter().sum::<f64>() - p.level(k).iter().sum::<f64>();
                    assert!((c - trace_gap).abs() < 1e-10, "n={n} k={k}");
                    assert!(bsq.iter().all(|&x| x > 0.0));
                }
            }
        }
    }

    #[test]
    fn phase_recovery_for_rotated_exchange_matrix() {
        let phi = 0.7;
        let z = C64::from_polar(1.0, phi);
        let m = ComplexMatrix::from_row_major(2, vec![C64::new(0.0, 0.0), z, z.conj(), C64::new(0.0, 0.0)]).unwrap();
        let a = RegularHermitian::new(HermitianMatrix::new(m).unwrap(), STRICTNESS_TOL).unwrap();
        let t = recover_torus(&a).unwrap();
        assert!((t.level(1)[0] - z).norm() < 1e-14);
    }

    #[test]
    fn section_has_identity_coordinate_and_positive_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=6 {
            let p = sample_interior(n, &mut rng, 2.0, 1e-2).unwrap();
            let s = section(&p, STRICTNESS_TOL).unwrap();
            assert!(s.matrix().matrix().is_real());
            let t = recover_torus(&s).unwrap();
            assert!(t.max_abs_diff(&GZTorusElement::identity(n)) < 1e-10);
            for k in 1..n {
                let u = level_frame(s.matrix().matrix(), k).unwrap();
                for i in 0..k {
                    let bt: C64 = (0..k).map(|r| u.frame.matrix()[(i, r)] * s.matrix()[(r, k)]).sum();
                    assert!(bt.re > 0.0 && bt.im == 0.0);
                }
            }
        }
    }

    #[test]
    fn identity_torus_element_acts_trivially() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = sample_interior(4, &mut rng, 2.0, 1e-2).unwrap();
        let a = reconstruct(&p, &GZTorusElement::random(4, &mut rng), STRICTNESS_TOL).unwrap();
        let id = GZTorusElement::identity(4);
        assert_eq!(chi_word(&id, &a).unwrap().matrix(), &ComplexMatrix::identity(4));
        let b = torus_act(&id, &a).unwrap();
        assert!(b.matrix().matrix().max_abs_diff(a.matrix().matrix()) < 1e-15);
    }

    #[test]
    fn chi_is_diagonal_when_level_block_is_diagonal() {
        // A⁽²⁾ diagonal with the level-2 torus acting alone
        let m = ComplexMatrix::from_real(3, &[1.0, 0.0, 0.5, 0.0, 2.0, 0.7, 0.5, 0.7, 0.0]).unwrap();
        let h = HermitianMatrix::new(m).unwrap();
        let t = GZTorusElement::from_angles(3, &[vec![0.0], vec![0.4, -1.1]]).unwrap();
        let chi = chi_word_matrix(&t, &h).unwrap();
        let c = chi.matrix();
        for r in 0..3 {
            for col in 0..3 {
                if r != col {
                    assert!(c[(r, col)].norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn torus_json_round_trip() {
        let t = GZTorusElement::from_angles(3, &[vec![0.5], vec![-3.0, 3.0]]).unwrap();
        let back = GZTorusElement::from_json(&t.to_json()).unwrap();
        assert!(back.max_abs_diff(&t) < 1e-15);
        assert!(GZTorusElement::from_json(r#"{"n":3,"angles":[[0.0]]}"#).is_err());
        let pi = GZTorusElement::from_angles(2, &[vec![-std::f64::consts::PI]]).unwrap();
        assert_eq!(pi.angles()[0][0], std::f64::consts::PI);
    }
}
