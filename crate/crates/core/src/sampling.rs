//! Seeded generators for test and verification inputs.

use rand::Rng;

use crate::error::Result;
use crate::fiber::{reconstruct, GZTorusElement, RegularHermitian};
use crate::linalg::{ComplexMatrix, HermitianMatrix, C64};
use crate::pattern::sample_interior;

/// Hermitian matrix with entries uniform in `[−scale, scale]` (real and
/// imaginary parts drawn independently).
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R, scale: f64) -> HermitianMatrix {
    let mut m = ComplexMatrix::zeros(n);
    for r in 0..n {
        m[(r, r)] = C64::new(rng.gen_range(-scale..=scale), 0.0);
        for c in r + 1..n {
            let z = C64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale));
            m[(r, c)] = z;
            m[(c, r)] = z.conj();
        }
    }
    HermitianMatrix::hermitian_part(&m)
}

/// Real symmetric matrix with entries uniform in `[−scale, scale]`.
pub fn random_symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R, scale: f64) -> HermitianMatrix {
    let mut m = ComplexMatrix::zeros(n);
    for r in 0..n {
        for c in r..n {
            let x = C64::new(rng.gen_range(-scale..=scale), 0.0);
            m[(r, c)] = x;
            m[(c, r)] = x;
        }
    }
    HermitianMatrix::hermitian_part(&m)
}

/// Diagonal unitary with uniform phases.
pub fn random_diagonal_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let phases: Vec<C64> =
        (0..n).map(|_| C64::from_polar(1.0, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))).collect();
    ComplexMatrix::diagonal_complex(&phases)
}

/// Regular matrix with a pattern of margin at least `min_margin` and a
/// uniform torus coordinate.
pub fn random_regular<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    spread: f64,
    min_margin: f64,
) -> Result<RegularHermitian> {
    let p = sample_interior(n, rng, spread, min_margin)?;
    let t = GZTorusElement::random(n, rng);
    reconstruct(&p, &t, 0.0)
}

/// Real symmetric regular matrix: torus coordinate drawn from `{±1}`.
pub fn random_regular_real<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    spread: f64,
    min_margin: f64,
) -> Result<RegularHermitian> {
    let p = sample_interior(n, rng, spread, min_margin)?;
    let angles: Vec<Vec<f64>> =
        (1..n).map(|k| (0..k).map(|_| if rng.gen_bool(0.5) { 0.0 } else { std::f64::consts::PI }).collect()).collect();
    let mut t = GZTorusElement::from_angles(n, &angles)?;
    // exact ±1 so the reconstruction stays real
    t = GZTorusElement::from_phases(
        n,
        t.angles()
            .iter()
            .map(|l| l.iter().map(|&a| C64::new(if a == 0.0 { 1.0 } else { -1.0 }, 0.0)).collect())
            .collect(),
    )?;
    reconstruct(&p, &t, 0.0)
}
