//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use gzgw_core::{ComplexMatrix, HermitianMatrix, C64};

type Dense = Vec<Vec<C64>>;

fn dense(a: &ComplexMatrix) -> Dense {
    let n = a.dim();
    (0..n).map(|r| (0..n).map(|c| a[(r, c)]).collect()).collect()
}

fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    (0..n).map(|r| (0..n).map(|c| (0..n).map(|k| a[r][k] * b[k][c]).sum()).collect()).collect()
}

/// Characteristic polynomial coefficients `[c_0, …, c_n]` (monic) by
/// Faddeev-LeVerrier.
pub fn char_poly(a: &ComplexMatrix) -> Vec<f64> {
    let n = a.dim();
    let ad = dense(a);
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m: Dense = vec![vec![C64::new(0.0, 0.0); n]; n];
    for k in 1..=n {
        let mut next = mul(&ad, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs[n - k + 1];
        }
        let am = mul(&ad, &next);
        let tr: C64 = (0..n).map(|i| am[i][i]).sum();
        coeffs[n - k] = -tr.re / k as f64;
        m = next;
    }
    coeffs
}

fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn bisect(coeffs: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval(coeffs, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = eval(coeffs, mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Ascending eigenvalues of a Hermitian matrix from characteristic
/// polynomials alone: the roots of each leading block bracket the roots of
/// the next one (Cauchy interlacing), and each bracket is bisected.
pub fn eigenvalues_by_interlacing(a: &HermitianMatrix) -> Vec<f64> {
    let n = a.dim();
    let bound = a.matrix().frobenius() + 1.0;
    let mut roots = vec![a[(0, 0)].re];
    for k in 2..=n {
        let coeffs = char_poly(&a.matrix().principal(k));
        let mut edges = vec![-bound];
        edges.extend(&roots);
        edges.push(bound);
        roots = edges.windows(2).map(|w| bisect(&coeffs, w[0], w[1])).collect();
    }
    roots
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    let norm = a.frobenius();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a.scale_real(scale);
    let n = a.dim();
    let mut term = ComplexMatrix::identity(n);
    let mut sum = ComplexMatrix::identity(n);
    for k in 1..=24 {
        term = term.matmul(&x).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

/// Central-difference Jacobian of a map between real coordinate vectors.
pub fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x0: &[f64], h: f64) -> nalgebra::DMatrix<f64> {
    let d = x0.len();
    let mut cols = Vec::with_capacity(d);
    for c in 0..d {
        let mut xp = x0.to_vec();
        xp[c] += h;
        let mut xm = x0.to_vec();
        xm[c] -= h;
        let fp = f(&xp);
        let fm = f(&xm);
        cols.push(fp.iter().zip(&fm).map(|(p, m)| (p - m) / (2.0 * h)).collect::<Vec<_>>());
    }
    nalgebra::DMatrix::from_fn(cols[0].len(), d, |r, c| cols[c][r])
}
