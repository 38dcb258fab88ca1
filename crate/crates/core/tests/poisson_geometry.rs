mod common;

use gzgw_core::linalg::cholesky_upper;
use gzgw_core::poisson::{
    central_jacobian, dressing_field, dual_moment_flow_check, gamma_an, generator_level_set_defect,
    gz_involution_residual_dual, AnChart, FD_STEP, RANK_TOL,
};
use gzgw_core::sampling::{random_hermitian, random_regular};
use gzgw_core::{
    chart_gamma, dual_pl_bivector, gauge_transform, gw_forward, gz_involution_residual, iwasawa_split,
    kirillov_bivector, moment_flow_check, pushforward_residual, ANMatrix, AntiHermitianMatrix, BivectorMatrix,
    ComplexMatrix, HermChart, HermitianMatrix, C64,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_an(n: usize, rng: &mut ChaCha8Rng) -> ANMatrix {
    let z: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-0.7..0.7)).collect();
    AnChart::matrix(n, &z).unwrap()
}

fn random_u(n: usize, rng: &mut ChaCha8Rng) -> AntiHermitianMatrix {
    AntiHermitianMatrix::from_hermitian(&random_hermitian(n, rng, 1.0))
}

/// `AN` factor of `g = X·k` by Gram-Schmidt on the rows of `g`, last row
/// first.
fn an_factor(g: &ComplexMatrix) -> ANMatrix {
    let n = g.dim();
    let mut x = ComplexMatrix::zeros(n);
    let mut rows: Vec<Vec<C64>> = vec![Vec::new(); n];
    for i in (0..n).rev() {
        let mut v: Vec<C64> = (0..n).map(|c| g[(i, c)]).collect();
        for j in i + 1..n {
            let coef: C64 = (0..n).map(|c| v[c] * rows[j][c].conj()).sum();
            x[(i, j)] = coef;
            for c in 0..n {
                v[c] -= coef * rows[j][c];
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        x[(i, i)] = C64::new(norm, 0.0);
        rows[i] = v.iter().map(|z| z / norm).collect();
    }
    ANMatrix::new(x).unwrap()
}

#[test]
fn iwasawa_parts_recombine_and_lie_in_subspaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    for n in 1..=6 {
        let m = ComplexMatrix::from_fn(n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let split = iwasawa_split(&m);
        let sum = &split.an_part + split.k_part.matrix();
        assert!(sum.max_abs_diff(&m) <= 1e-14);
        assert!(split.k_part.matrix().anti_hermitian_defect() <= 1e-14);
        for r in 0..n {
            assert!(split.an_part[(r, r)].im.abs() <= 1e-14);
            for c in 0..r {
                assert!(split.an_part[(r, c)].norm() <= 1e-14);
            }
        }
    }
}

#[test]
fn kirillov_rank_is_orbit_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(402);
    for n in 2..=5 {
        let a = random_regular(n, &mut rng, 1.0, 0.05).unwrap();
        assert_eq!(kirillov_bivector(a.matrix()).rank(RANK_TOL), n * n - n);
    }
}

#[test]
fn kirillov_brackets_of_coordinates() {
    let mut rng = ChaCha8Rng::seed_from_u64(403);
    let n = 3;
    let a = random_hermitian(n, &mut rng, 1.0);
    let pi = kirillov_bivector(&a);
    let x0 = HermChart::coords(&a);
    let grads = central_jacobian(|x| Ok(x.to_vec()), &x0, FD_STEP).unwrap();
    for p in 0..n * n {
        for q in 0..n * n {
            let gp = DVector::from_iterator(n * n, grads.row(p).iter().copied());
            let gq = DVector::from_iterator(n * n, grads.row(q).iter().copied());
            assert!((pi.bracket(&gp, &gq) - pi.coeffs()[(p, q)]).abs() <= 1e-9);
        }
    }
}

#[test]
fn dressing_flow_matches_factorization_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for n in 2..=4 {
        let x = random_an(n, &mut rng);
        let xi = random_u(n, &mut rng);
        let field = dressing_field(&x, &xi);
        let moved = |s: f64| AnChart::coords(&an_factor(&common::expm(&xi.matrix().scale_real(s)).matmul(x.matrix())));
        let err = |s: f64| {
            let plus = moved(s);
            let minus = moved(-s);
            plus.iter().zip(&minus).zip(&field).map(|((p, m), f)| ((p - m) / (2.0 * s) - f).abs()).fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(1e-2), err(5e-3));
        assert!(coarse <= 20.0 * 1e-4, "n={n}: {coarse:e}");
        assert!(coarse / fine >= 3.5, "n={n}: not second order ({coarse:e} → {fine:e})");
        assert!(an_factor(x.matrix()).matrix().max_abs_diff(x.matrix()) <= 1e-13);
    }
}

#[test]
fn dual_bivector_is_antisymmetric_and_vanishes_at_unit() {
    let mut rng = ChaCha8Rng::seed_from_u64(405);
    for n in 1..=5 {
        let pi = dual_pl_bivector(&random_an(n, &mut rng)).unwrap();
        assert!(pi.raw_defect() <= 1e-8);
        let at_unit = dual_pl_bivector(&ANMatrix::identity(n)).unwrap();
        assert!(at_unit.max_abs() <= 1e-10);
    }
    assert_eq!(dual_pl_bivector(&ANMatrix::identity(1)).unwrap().max_abs(), 0.0);
}

#[test]
fn dual_bivector_rank_is_leaf_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(406);
    for n in 2..=4 {
        let a = random_regular(n, &mut rng, 1.0, 0.05).unwrap();
        let x = gamma_an(a.matrix()).unwrap();
        assert_eq!(dual_pl_bivector(&x).unwrap().rank(RANK_TOL), n * n - n);
    }
}

fn jacobiator(pi_at: impl Fn(&[f64]) -> DMatrix<f64>, z0: &[f64], h: f64) -> f64 {
    let d = z0.len();
    let pi = pi_at(z0);
    let derivs: Vec<DMatrix<f64>> = (0..d)
        .map(|l| {
            let mut zp = z0.to_vec();
            zp[l] += h;
            let mut zm = z0.to_vec();
            zm[l] -= h;
            (pi_at(&zp) - pi_at(&zm)) / (2.0 * h)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let mut s = 0.0;
                for l in 0..d {
                    s += pi[(a, l)] * derivs[l][(b, c)]
                        + pi[(b, l)] * derivs[l][(c, a)]
                        + pi[(c, l)] * derivs[l][(a, b)];
                }
                worst = worst.max(s.abs());
            }
        }
    }
    worst
}

#[test]
fn dual_bivector_satisfies_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(407);
    for n in [2, 3] {
        let z0 = AnChart::coords(&random_an(n, &mut rng));
        let pi_at = |z: &[f64]| dual_pl_bivector(&AnChart::matrix(n, z).unwrap()).unwrap().coeffs().clone();
        assert!(jacobiator(pi_at, &z0, 1e-5) <= 1e-4);
    }
}

#[test]
fn kirillov_satisfies_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(408);
    let a = random_hermitian(3, &mut rng, 1.0);
    let pi_at = |x: &[f64]| kirillov_bivector(&HermChart::matrix(3, x).unwrap()).coeffs().clone();
    assert!(jacobiator(pi_at, &HermChart::coords(&a), 1e-5) <= 1e-8);
}

#[test]
fn chart_gamma_examples() {
    assert!(chart_gamma(&HermitianMatrix::zeros(3)).unwrap().iter().all(|&v| v == 0.0));
    let d = [0.4, -1.0, 0.9];
    let z = chart_gamma(&HermitianMatrix::diagonal(&d)).unwrap();
    for i in 0..3 {
        assert!((z[i] - d[i] / 2.0).abs() <= 1e-15);
    }
    assert!(z[3..].iter().all(|&v| v == 0.0));

    let mut rng = ChaCha8Rng::seed_from_u64(409);
    for n in 2..=5 {
        let a = random_regular(n, &mut rng, 1.0, 0.05).unwrap();
        let x = AnChart::matrix(n, &chart_gamma(a.matrix()).unwrap()).unwrap();
        let g = gw_forward(a.matrix(), 0.0).unwrap().image;
        assert!(x.gram().matrix().max_abs_diff(g.matrix()) <= 1e-9 * g.matrix().max_abs());
        assert!(cholesky_upper(g.matrix()).unwrap().matrix().max_abs_diff(x.matrix()) <= 1e-12);
    }
}

#[test]
fn gamma_is_poisson() {
    let mut rng = ChaCha8Rng::seed_from_u64(410);
    let one = random_regular(1, &mut rng, 1.0, 0.05).unwrap();
    assert_eq!(pushforward_residual(&one, FD_STEP).unwrap(), 0.0);
    for n in [2, 3] {
        for _ in 0..5 {
            let a = random_regular(n, &mut rng, 1.0, 0.05).unwrap();
            assert!(pushforward_residual(&a, FD_STEP).unwrap() <= 1e-4);
            let coarse = pushforward_residual(&a, 1e-3).unwrap();
            let fine = pushforward_residual(&a, 5e-4).unwrap();
            assert!(coarse / fine >= 3.0, "ratio {}", coarse / fine);
        }
    }
}

#[test]
fn pushforward_requires_margin() {
    let mut rng = ChaCha8Rng::seed_from_u64(411);
    let a = random_regular(2, &mut rng, 1.0, 0.05).unwrap();
    assert!(pushforward_residual(&a, 0.1).is_err());
}

#[test]
fn gz_functions_are_in_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(412);
    for n in 2..=4 {
        for _ in 0..4 {
            let a = random_regular(n, &mut rng, 1.0, 0.05).unwrap();
            assert!(gz_involution_residual(&a, FD_STEP).unwrap() <= 1e-6);
            assert!(gz_involution_residual_dual(&a, FD_STEP).unwrap() <= 1e-6);
        }
    }
}

#[test]
fn gz_functions_generate_the_torus_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(413);
    for n in [2, 3] {
        for _ in 0..4 {
            let a = random_regular(n, &mut rng, 1.0, 0.05).unwrap();
            for k in 1..n {
                for i in 0..k {
                    assert!(moment_flow_check(&a, k, i, FD_STEP).unwrap() <= 1e-5);
                    assert!(dual_moment_flow_check(&a, k, i, FD_STEP).unwrap() <= 1e-5);
                    assert!(generator_level_set_defect(&a, k, i, FD_STEP).unwrap() <= 1e-6);
                }
            }
            assert!(moment_flow_check(&a, n, 0, FD_STEP).is_err());
        }
    }
}

#[test]
fn gauge_transform_preserves_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(414);
    for n in [2, 3] {
        let a = random_regular(n, &mut rng, 1.0, 0.05).unwrap();
        let pi = kirillov_bivector(a.matrix());
        let d = n * n;
        let raw = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-0.2..0.2));
        let sigma = &raw - raw.transpose();
        let out = gauge_transform(&pi, &sigma).unwrap();
        assert!((out.coeffs() + out.coeffs().transpose()).amax() <= 1e-10);
        assert_eq!(out.rank(RANK_TOL), pi.rank(RANK_TOL));
    }
    let bad = DMatrix::from_fn(4, 4, |r, c| (r + c) as f64);
    assert!(gauge_transform(&BivectorMatrix::zeros(4), &bad).is_err());
}
