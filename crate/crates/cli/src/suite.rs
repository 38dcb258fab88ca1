//! Residual computations behind `gzgw verify` and the acceptance tests.
//!
//! Every function returns the largest residual over its inputs, so a
//! check passes when the value is at most its tolerance.

use gzgw_core::poisson::{central_jacobian, dual_moment_flow_check, margin, pushforward_residual, HermChart};
use gzgw_core::sampling::{random_diagonal_unitary, random_hermitian, random_regular, random_regular_real};
use gzgw_core::{
    chi_tilde_word, chi_word, eig_hermitian, exp_hermitian, gw_forward, gw_inverse, gz_involution_residual,
    gz_involution_residual_dual, gz_mu, moment_flow_check, n2_closed_form, psi_extract, recover_torus, torus_act,
    ComplexMatrix, Error, GZTorusElement, HermitianMatrix, RegularHermitian, Result,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::report::{CheckRecord, Report};

/// Spread of the top level of sampled patterns.
pub const SAMPLE_SPREAD: f64 = 1.0;
/// Base step of the convergence-order check; the pushforward residual at
/// the default step is already at roundoff level.
pub const CONVERGENCE_BASE_STEP: f64 = 1e-3;
/// Step of the Jacobian used for the determinant check.
pub const JACOBIAN_STEP: f64 = 1e-6;
/// Sizes covered by the pushforward and moment-flow checks.
pub const POISSON_SIZES: [usize; 2] = [2, 3];
/// Largest size covered by the involution checks.
pub const INVOLUTION_MAX_SIZE: usize = 4;
/// Probe terms at or above this margin are not compared.
pub const PROBE_MARGIN: f64 = 1e-2;
const PROBE_TERMS: i32 = 15;
const TWIST_RELATION_TOL: f64 = 1e-8;

/// Independent random stream for size `n` and purpose `stream`.
pub fn rng_for(seed: u64, n: usize, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 8) | stream);
    rng
}

pub fn regular_samples(n: usize, count: usize, seed: u64, min_margin: f64) -> Result<Vec<RegularHermitian>> {
    let mut rng = rng_for(seed, n, 0);
    (0..count).map(|_| random_regular(n, &mut rng, SAMPLE_SPREAD, min_margin)).collect()
}

pub fn real_samples(n: usize, count: usize, seed: u64, min_margin: f64) -> Result<Vec<RegularHermitian>> {
    let mut rng = rng_for(seed, n, 1);
    (0..count).map(|_| random_regular_real(n, &mut rng, SAMPLE_SPREAD, min_margin)).collect()
}

fn gamma(a: &HermitianMatrix) -> Result<ComplexMatrix> {
    Ok(gw_forward(a, 0.0)?.image.into_hermitian().into_inner())
}

fn max_over<T>(items: &[T], mut f: impl FnMut(&T) -> Result<f64>) -> Result<f64> {
    items.iter().try_fold(0.0, |acc: f64, x| Ok(acc.max(f(x)?)))
}

fn relative(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

/// Eigen-decomposition residual `|A − U diag(λ) U†|`, relative to `|A|`.
pub fn eigen_residual(items: &[RegularHermitian]) -> Result<f64> {
    max_over(items, |a| {
        let e = eig_hermitian(a.matrix())?;
        let m = a.matrix().matrix();
        Ok(relative(e.apply(|x| x).matrix().max_abs_diff(m), m.max_abs()))
    })
}

/// `|μ(γ(A)) − λ(A)|`.
pub fn intertwining(items: &[RegularHermitian]) -> Result<f64> {
    max_over(items, |a| {
        let img = gw_forward(a.matrix(), 0.0)?.image;
        Ok(gz_mu(&img)?.max_abs_diff(a.pattern()))
    })
}

/// `|γ(t∙A) − t∙γ(A)|` for random torus elements.
pub fn torus_equivariance<R: Rng>(items: &[RegularHermitian], rng: &mut R) -> Result<f64> {
    max_over(items, |a| {
        let t = GZTorusElement::random(a.dim(), rng);
        let lhs = gamma(torus_act(&t, a)?.matrix())?;
        let img = RegularHermitian::new(HermitianMatrix::hermitian_part(&gamma(a.matrix())?), 0.0)?;
        Ok(lhs.max_abs_diff(torus_act(&t, &img)?.matrix().matrix()))
    })
}

/// `|γ(DAD⁻¹) − Dγ(A)D⁻¹|` for random diagonal unitaries `D`.
pub fn diagonal_conjugation<R: Rng>(items: &[RegularHermitian], rng: &mut R) -> Result<f64> {
    max_over(items, |a| {
        let d = random_diagonal_unitary(a.dim(), rng);
        let lhs = gamma(&a.matrix().conjugate_by(&d))?;
        Ok(lhs.max_abs_diff(&d.conjugate_unitary(&gamma(a.matrix())?)))
    })
}

/// `|γ(A + uI) − eᵘγ(A)|`, relative to `|eᵘγ(A)|`, for `u ∈ [−1, 1]`.
pub fn scaling<R: Rng>(items: &[RegularHermitian], rng: &mut R) -> Result<f64> {
    max_over(items, |a| {
        let u: f64 = rng.gen_range(-1.0..=1.0);
        let rhs = gamma(a.matrix())?.scale_real(u.exp());
        Ok(relative(gamma(&a.matrix().shift(u))?.max_abs_diff(&rhs), rhs.max_abs()))
    })
}

/// `|γ(Ā) − conj γ(A)|`.
pub fn conjugation(items: &[RegularHermitian]) -> Result<f64> {
    max_over(items, |a| Ok(gamma(&a.matrix().conj())?.max_abs_diff(&gamma(a.matrix())?.conj())))
}

/// `|γ(A)^{(k)} − γ(A^{(k)})|` over all principal blocks.
pub fn nesting(items: &[RegularHermitian]) -> Result<f64> {
    max_over(items, |a| {
        let g = gamma(a.matrix())?;
        (1..=a.dim())
            .try_fold(0.0, |acc: f64, k| Ok(acc.max(g.principal(k).max_abs_diff(&gamma(&a.matrix().principal(k))?))))
    })
}

/// Largest imaginary part of `γ(S)` for real symmetric `S`.
pub fn real_stratum(items: &[RegularHermitian]) -> Result<f64> {
    max_over(items, |s| Ok(gamma(s.matrix())?.max_imag()))
}

/// Largest change of the `±1` torus coordinate from `S` to `γ(S)`; a sign
/// flip shows up as 2.
pub fn real_torus(items: &[RegularHermitian]) -> Result<f64> {
    max_over(items, |s| {
        let img = RegularHermitian::new(HermitianMatrix::hermitian_part(&gamma(s.matrix())?), 0.0)?;
        Ok(recover_torus(s)?.max_abs_diff(&recover_torus(&img)?))
    })
}

/// `|γ⁻¹(γ(A)) − A|`.
pub fn forward_inverse(items: &[RegularHermitian]) -> Result<f64> {
    max_over(items, |a| {
        let img = gw_forward(a.matrix(), 0.0)?.image;
        Ok(gw_inverse(&img, 0.0)?.matrix().max_abs_diff(a.matrix().matrix()))
    })
}

/// `|γ(γ⁻¹(P)) − P|` relative to `|P|`, with `P = exp(A)` when its
/// `μ`-pattern is regular and `P = γ(A)` otherwise.
pub fn inverse_forward(items: &[RegularHermitian]) -> Result<f64> {
    max_over(items, |a| {
        let exp = exp_hermitian(a.matrix())?;
        let (p, h) = match gw_inverse(&exp, 1e-6) {
            Ok(h) => (exp, h),
            Err(Error::BoundaryStratum { .. }) => {
                let img = gw_forward(a.matrix(), 0.0)?.image;
                let h = gw_inverse(&img, 0.0)?;
                (img, h)
            }
            Err(e) => return Err(e),
        };
        let again = gamma(&h)?;
        Ok(relative(again.max_abs_diff(p.matrix()), p.matrix().max_abs()))
    })
}

/// `1/|det J|`, `J` the central-difference Jacobian of `γ` in Hermitian
/// coordinates.
pub fn jacobian_inverse_det(items: &[RegularHermitian], step: f64) -> Result<f64> {
    max_over(items, |a| {
        let n = a.dim();
        let x0 = HermChart::coords(a.matrix());
        let j = central_jacobian(
            |x| Ok(HermChart::coords(&HermitianMatrix::hermitian_part(&gamma(&HermChart::matrix(n, x)?)?))),
            &x0,
            step,
        )?;
        Ok(1.0 / j.determinant().abs())
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TwistStats {
    /// `|exp(Ad_ψ A) − γ(A)|`.
    pub relation: f64,
    /// `|ψψ† − I|`.
    pub unitarity: f64,
    pub det: f64,
    /// `|ψ(t∙A) − χ̃(t, A)·ψ(A)·χ(t, A)⁻¹|`.
    pub equivariance: f64,
}

pub fn twist<R: Rng>(items: &[RegularHermitian], steps: usize, rng: &mut R) -> Result<TwistStats> {
    let mut s = TwistStats::default();
    for a in items {
        let tw = psi_extract(a, steps, TWIST_RELATION_TOL)?;
        let psi = tw.psi.matrix();
        let lhs = exp_hermitian(&a.matrix().conjugate_by(psi))?;
        s.relation = s.relation.max(lhs.matrix().max_abs_diff(&gamma(a.matrix())?));
        s.unitarity = s.unitarity.max(psi.unitary_defect());
        s.det = s.det.max(tw.det_defect);

        let t = GZTorusElement::random(a.dim(), rng);
        let moved = psi_extract(&torus_act(&t, a)?, steps, TWIST_RELATION_TOL)?.psi;
        let chi = chi_word(&t, a)?;
        let chi_t = chi_tilde_word(&t, a)?;
        let rhs = chi_t.matrix().matmul(psi).matmul(&chi.matrix().adjoint());
        s.equivariance = s.equivariance.max(moved.matrix().max_abs_diff(&rhs));
    }
    Ok(s)
}

/// Largest imaginary part of `ψ(S)` for real symmetric `S`.
pub fn twist_real(items: &[RegularHermitian], steps: usize) -> Result<f64> {
    max_over(items, |s| Ok(psi_extract(s, steps, TWIST_RELATION_TOL)?.psi.matrix().max_imag()))
}

/// The trace-free 2×2 grid `(a, b) ∈ [−2, 2]²` with `points` values per
/// axis, skipping `b = 0`.
pub fn n2_grid_points(points: usize) -> Vec<(f64, f64)> {
    let h = 4.0 / (points - 1) as f64;
    let axis: Vec<f64> = (0..points).map(|i| -2.0 + h * i as f64).collect();
    axis.iter().flat_map(|&a| axis.iter().map(move |&b| (a, b))).filter(|&(_, b)| b.abs() > 1e-12).collect()
}

fn n2_matrix(a: f64, b: f64) -> Result<HermitianMatrix> {
    HermitianMatrix::from_real_symmetric(2, &[a, b, b, -a])
}

/// Largest entrywise deviation of the transported `γ` from the closed form.
pub fn n2_gamma_deviation(a: f64, b: f64) -> Result<f64> {
    let g = gamma(&n2_matrix(a, b)?)?;
    let cf = n2_closed_form(a, b)?.gamma;
    let mut dev: f64 = g.max_imag();
    for r in 0..2 {
        for c in 0..2 {
            dev = dev.max((g[(r, c)].re - cf[r][c]).abs());
        }
    }
    Ok(dev)
}

/// `cos 2θ` of the twist at `[[a, b], [b, −a]]`, `ψ` being rotation by `θ`.
pub fn n2_cos_two_theta(a: f64, b: f64, steps: usize) -> Result<f64> {
    let reg = RegularHermitian::new(n2_matrix(a, b)?, 0.0)?;
    let p = psi_extract(&reg, steps, TWIST_RELATION_TOL)?.psi;
    let p = p.matrix();
    Ok(p[(0, 0)].re * p[(0, 0)].re - p[(1, 0)].re * p[(1, 0)].re)
}

/// `cos 2θ` forced by `γ = exp∘Ad_ψ`: with `cos φ = a/r` the angle of `A`
/// and `cos φ′ = q` that of `log γ(A)`, it is `cos(φ′ − φ)`.
pub fn n2_cos_two_theta_from_gamma(a: f64, b: f64) -> f64 {
    let r = a.hypot(b);
    let q = (a.exp() - r.cosh()) / r.sinh();
    (a * q + b.abs() * (1.0 - q * q).max(0.0).sqrt()) / r
}

/// Distance from `cos 2θ` to the nearer of the two closed-form branches.
pub fn n2_branch_deviation(a: f64, b: f64, steps: usize) -> Result<f64> {
    let c = n2_cos_two_theta(a, b, steps)?;
    let (p, m) = n2_closed_form(a, b)?.cos_two_theta;
    Ok((c - p).abs().min((c - m).abs()))
}

pub fn pushforward(items: &[RegularHermitian], fd_step: f64) -> Result<f64> {
    max_over(items, |a| pushforward_residual(a, fd_step))
}

/// Largest ratio `residual(h/2) / residual(h)` at base step `h`.
pub fn pushforward_ratio(items: &[RegularHermitian], base: f64) -> Result<f64> {
    max_over(items, |a| Ok(pushforward_residual(a, base / 2.0)? / pushforward_residual(a, base)?))
}

pub fn involution_kirillov(items: &[RegularHermitian], fd_step: f64) -> Result<f64> {
    max_over(items, |a| gz_involution_residual(a, fd_step))
}

pub fn involution_dual(items: &[RegularHermitian], fd_step: f64) -> Result<f64> {
    max_over(items, |a| gz_involution_residual_dual(a, fd_step))
}

fn over_slots(a: &RegularHermitian, f: impl Fn(usize, usize) -> Result<f64>) -> Result<f64> {
    let n = a.dim();
    (1..n).flat_map(|k| (0..k).map(move |i| (k, i))).try_fold(0.0, |acc: f64, (k, i)| Ok(acc.max(f(k, i)?)))
}

/// Hamiltonian flow of every `λᵢ^{(k)}` against its torus generator.
pub fn moment_flow_kirillov(items: &[RegularHermitian], fd_step: f64) -> Result<f64> {
    max_over(items, |a| over_slots(a, |k, i| moment_flow_check(a, k, i, fd_step)))
}

/// Hamiltonian flow of every `μᵢ^{(k)}` against its torus generator.
pub fn moment_flow_dual(items: &[RegularHermitian], fd_step: f64) -> Result<f64> {
    max_over(items, |a| over_slots(a, |k, i| dual_moment_flow_check(a, k, i, fd_step)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbePoint {
    pub epsilon: f64,
    pub margin: f64,
    /// `|γ(A_j) − exp(A_j)|`.
    pub deviation: f64,
}

/// `A_j = D + ε_j H` with `ε_j = 2^{−j}`, `D` diagonal with distinct
/// entries and `H` a random Hermitian direction; the margin of `A_j`
/// shrinks like `ε_j²` toward the diagonal limit.
pub fn boundary_probe<R: Rng>(n: usize, rng: &mut R) -> Result<Vec<ProbePoint>> {
    let diag: Vec<f64> = (0..n).map(|i| 0.7 * i as f64 - 0.5 + rng.gen_range(-0.2..=0.2)).collect();
    let d = HermitianMatrix::diagonal(&diag);
    let h = random_hermitian(n, rng, 1.0);
    (0..PROBE_TERMS)
        .map(|j| {
            let epsilon = 0.5f64.powi(j);
            let a = HermitianMatrix::hermitian_part(&(d.matrix() + &h.matrix().scale_real(epsilon)));
            let deviation = gamma(&a)?.max_abs_diff(exp_hermitian(&a)?.matrix());
            Ok(ProbePoint { epsilon, margin: margin(&a)?, deviation })
        })
        .collect()
}

/// Largest increase of the deviation between consecutive probe points
/// that both lie below [`PROBE_MARGIN`]; zero for a monotone sequence.
pub fn probe_increase(points: &[ProbePoint]) -> f64 {
    points
        .windows(2)
        .filter(|w| w[0].margin < PROBE_MARGIN && w[1].margin < PROBE_MARGIN)
        .map(|w| (w[1].deviation - w[0].deviation).max(0.0))
        .fold(0.0, f64::max)
}

/// Sizes a run covers: 2 through `size`, or just 1.
pub fn sizes(size: usize) -> Vec<usize> {
    if size == 1 {
        vec![1]
    } else {
        (2..=size).collect()
    }
}

struct Recorder<'a> {
    cfg: &'a RunConfig,
    n: usize,
    samples: usize,
    out: Vec<CheckRecord>,
}

impl Recorder<'_> {
    fn push(&mut self, name: &str, tolerance: f64, fd_step: Option<f64>, value: Result<f64>) {
        let mut rec = match value {
            Ok(v) => CheckRecord::new(name, self.n, self.samples, self.cfg.seed, v, tolerance),
            Err(e) => CheckRecord::errored(name, self.n, self.samples, self.cfg.seed, tolerance, e.to_string()),
        };
        if let Some(step) = fd_step {
            rec = rec.with_fd_step(step);
        }
        self.out.push(rec);
    }

    fn push_pair(&mut self, names: [&str; 2], tolerance: f64, fd_step: Option<f64>, value: Result<(f64, f64)>) {
        match value {
            Ok((x, y)) => {
                self.push(names[0], tolerance, fd_step, Ok(x));
                self.push(names[1], tolerance, fd_step, Ok(y));
            }
            Err(e) => {
                let msg = e.to_string();
                self.push(names[0], tolerance, fd_step, Err(Error::NumericalFailure(msg.clone())));
                self.push(names[1], tolerance, fd_step, Err(Error::NumericalFailure(msg)));
            }
        }
    }
}

fn checks_for_size(cfg: &RunConfig, n: usize) -> Result<Vec<CheckRecord>> {
    let tol = &cfg.tolerances;
    let items = regular_samples(n, cfg.samples, cfg.seed, cfg.margin)?;
    let mut rec = Recorder { cfg, n, samples: cfg.samples, out: Vec::new() };
    let step = cfg.fd_step;

    rec.push("eigen_residual", tol.eigen_residual, None, eigen_residual(&items));
    rec.push("intertwining", tol.intertwining, None, intertwining(&items));
    rec.push(
        "torus_equivariance",
        tol.torus_equivariance,
        None,
        torus_equivariance(&items, &mut rng_for(cfg.seed, n, 2)),
    );
    rec.push(
        "diagonal_conjugation",
        tol.diagonal_conjugation,
        None,
        diagonal_conjugation(&items, &mut rng_for(cfg.seed, n, 3)),
    );
    rec.push("scaling", tol.scaling, None, scaling(&items, &mut rng_for(cfg.seed, n, 4)));
    rec.push("conjugation", tol.conjugation, None, conjugation(&items));
    rec.push("nesting", tol.nesting, None, nesting(&items));
    rec.push("forward_inverse", tol.round_trip, None, forward_inverse(&items));
    rec.push("inverse_forward", tol.round_trip, None, inverse_forward(&items));
    if n == 1 {
        return Ok(rec.out);
    }

    let real = real_samples(n, cfg.samples, cfg.seed, cfg.margin)?;
    rec.push("real_stratum", tol.real_stratum, None, real_stratum(&real));
    rec.push("real_torus", tol.real_torus, None, real_torus(&real));
    rec.push(
        "jacobian_inverse_det",
        tol.jacobian_inverse_det,
        Some(JACOBIAN_STEP),
        jacobian_inverse_det(&items, JACOBIAN_STEP),
    );

    match twist(&items, cfg.steps, &mut rng_for(cfg.seed, n, 5)) {
        Ok(s) => {
            rec.push("twist_relation", tol.twist_relation, None, Ok(s.relation));
            rec.push("twist_unitarity", tol.twist_unitarity, None, Ok(s.unitarity));
            rec.push("twist_det", tol.twist_det, None, Ok(s.det));
            rec.push("twist_equivariance", tol.twist_equivariance, None, Ok(s.equivariance));
        }
        Err(e) => {
            for (name, t) in [
                ("twist_relation", tol.twist_relation),
                ("twist_unitarity", tol.twist_unitarity),
                ("twist_det", tol.twist_det),
                ("twist_equivariance", tol.twist_equivariance),
            ] {
                rec.push(name, t, None, Err(Error::NumericalFailure(e.to_string())));
            }
        }
    }
    rec.push("twist_real", tol.twist_real, None, twist_real(&real, cfg.steps));

    if n == 2 {
        let grid = n2_grid_points(21);
        rec.samples = grid.len();
        rec.push("n2_closed_form", tol.n2_closed_form, None, max_over(&grid, |&(a, b)| n2_gamma_deviation(a, b)));
        rec.push(
            "n2_twist_angle",
            tol.n2_twist_angle,
            None,
            max_over(&grid, |&(a, b)| {
                Ok((n2_cos_two_theta(a, b, cfg.steps)? - n2_cos_two_theta_from_gamma(a, b)).abs())
            }),
        );
        rec.samples = cfg.samples;
    }

    if POISSON_SIZES.contains(&n) {
        rec.push("pushforward", tol.pushforward, Some(step), pushforward(&items, step));
        rec.push(
            "pushforward_convergence",
            tol.pushforward_convergence,
            Some(CONVERGENCE_BASE_STEP),
            pushforward_ratio(&items, CONVERGENCE_BASE_STEP),
        );
        rec.push("moment_flow_kirillov", tol.moment_flow, Some(step), moment_flow_kirillov(&items, step));
        rec.push("moment_flow_dual", tol.moment_flow, Some(step), moment_flow_dual(&items, step));
    }
    if n <= INVOLUTION_MAX_SIZE {
        rec.push_pair(
            ["involution_kirillov", "involution_dual"],
            tol.involution,
            Some(step),
            involution_kirillov(&items, step).and_then(|k| Ok((k, involution_dual(&items, step)?))),
        );
    }

    let mut rng = rng_for(cfg.seed, n, 6);
    let probe =
        (0..cfg.samples).try_fold(0.0, |acc: f64, _| Ok(acc.max(probe_increase(&boundary_probe(n, &mut rng)?))));
    rec.push("boundary_monotone", tol.boundary_monotone, None, probe);
    Ok(rec.out)
}

/// Runs every check at every configured size. Check failures are recorded
/// in the report; only invalid configuration or failed sampling is an
/// error.
pub fn run_verify(cfg: &RunConfig) -> crate::error::CliResult<Report> {
    cfg.validate()?;
    if cfg.samples == 0 {
        return Ok(Report::new(cfg.clone(), Vec::new()));
    }
    let mut checks = Vec::new();
    for n in sizes(cfg.size) {
        checks.extend(checks_for_size(cfg, n)?);
    }
    Ok(Report::new(cfg.clone(), checks))
}
