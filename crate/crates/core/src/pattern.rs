//! Gelfand-Zeitlin patterns.
//!
//! A pattern of size `n` holds, for every level `k = 1..=n`, the ascending
//! eigenvalues of the `k`-th principal submatrix. Storage is a flat
//! triangular array in level-major order.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, HermitianMatrix, PositiveDefiniteMatrix};

/// Default absolute tolerance on interlacing gaps.
pub const STRICTNESS_TOL: f64 = 1e-8;

const SAMPLE_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct GZPattern {
    n: usize,
    values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeClass {
    Interior,
    Boundary,
    Invalid,
}

/// Classification of a pattern against the interlacing cone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeClassification {
    pub class: ConeClass,
    /// Smallest signed interlacing gap; `+∞` when there are no inequalities.
    pub margin: f64,
}

#[derive(Serialize, Deserialize)]
struct PatternJson {
    n: usize,
    levels: Vec<Vec<f64>>,
}

fn offset(k: usize) -> usize {
    k * (k - 1) / 2
}

impl GZPattern {
    /// Builds a pattern from its levels; level `k` (1-based) must hold `k`
    /// finite values. Ordering is not enforced here: see [`classify`].
    pub fn from_levels(levels: Vec<Vec<f64>>) -> Result<Self> {
        let n = levels.len();
        let mut values = Vec::with_capacity(n * (n + 1) / 2);
        for (idx, level) in levels.into_iter().enumerate() {
            if level.len() != idx + 1 {
                return Err(Error::Dimension { expected: idx + 1, found: level.len() });
            }
            if level.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parse(format!("non-finite value in level {}", idx + 1)));
            }
            values.extend(level);
        }
        Ok(Self { n, values })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Level `k`, for `1 ≤ k ≤ n`.
    pub fn level(&self, k: usize) -> &[f64] {
        assert!(k >= 1 && k <= self.n, "level {k} out of range");
        &self.values[offset(k)..offset(k + 1)]
    }

    /// `λᵢ^{(k)}` with 1-based `k` and 0-based `i`.
    pub fn get(&self, k: usize, i: usize) -> f64 {
        self.level(k)[i]
    }

    pub fn levels(&self) -> Vec<Vec<f64>> {
        (1..=self.n).map(|k| self.level(k).to_vec()).collect()
    }

    /// Flat level-major view.
    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    /// The first `k` levels, i.e. the pattern of the `k`-th principal submatrix.
    pub fn truncate(&self, k: usize) -> Self {
        Self { n: k, values: self.values[..offset(k + 1)].to_vec() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { n: self.n, values: self.values.iter().map(|&x| f(x)).collect() }
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "pattern size mismatch");
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PatternJson { n: self.n, levels: self.levels() }).expect("pattern serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: PatternJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.levels.len() != raw.n {
            return Err(Error::Dimension { expected: raw.n, found: raw.levels.len() });
        }
        Self::from_levels(raw.levels)
    }
}

/// Eigenvalues of every principal submatrix.
pub fn gz_lambda(a: &HermitianMatrix) -> Result<GZPattern> {
    let n = a.dim();
    let mut levels = Vec::with_capacity(n);
    for k in 1..=n {
        levels.push(if k == 1 { vec![a[(0, 0)].re] } else { eig_hermitian(&a.principal(k))?.values });
    }
    GZPattern::from_levels(levels)
}

/// Logarithms of the eigenvalues of every principal submatrix.
pub fn gz_mu(p: &PositiveDefiniteMatrix) -> Result<GZPattern> {
    let lam = gz_lambda(p.hermitian())?;
    if let Some(bad) = lam.as_flat().iter().find(|&&x| x <= 0.0) {
        return Err(Error::Domain(format!("principal-minor eigenvalue {bad:e} is not positive")));
    }
    Ok(lam.map(f64::ln))
}

pub fn classify(p: &GZPattern, strictness_tol: f64) -> ConeClassification {
    let n = p.size();
    let ascending = (1..=n).all(|k| p.level(k).windows(2).all(|w| w[0] <= w[1] + strictness_tol));
    let mut margin = f64::INFINITY;
    for k in 1..n {
        let (lo, hi) = (p.level(k), p.level(k + 1));
        for i in 0..k {
            margin = margin.min(lo[i] - hi[i]).min(hi[i + 1] - lo[i]);
        }
    }
    let class = if !ascending || margin < -strictness_tol {
        ConeClass::Invalid
    } else if margin > strictness_tol {
        ConeClass::Interior
    } else {
        ConeClass::Boundary
    };
    ConeClassification { class, margin }
}

/// Entrywise exponential. Monotone, so interior patterns stay interior.
pub fn exp_pattern(p: &GZPattern) -> GZPattern {
    p.map(f64::exp)
}

/// Rejection sampler for interior patterns with gaps at least `min_margin`.
///
/// The top level is drawn uniformly from `[−spread, spread]`; each lower
/// level is drawn uniformly inside the interlacing intervals of the level
/// above.
pub fn sample_interior<R: Rng + ?Sized>(n: usize, rng: &mut R, spread: f64, min_margin: f64) -> Result<GZPattern> {
    if min_margin <= 0.0 {
        return Err(Error::Domain("min_margin must be positive".into()));
    }
    for _ in 0..SAMPLE_BUDGET {
        let mut top: Vec<f64> = (0..n).map(|_| rng.gen_range(-spread..=spread)).collect();
        top.sort_by(f64::total_cmp);
        let mut levels = vec![top];
        for k in (1..n).rev() {
            let above = levels.last().unwrap();
            let level: Vec<f64> = (0..k).map(|i| rng.gen_range(above[i]..=above[i + 1])).collect();
            levels.push(level);
        }
        levels.reverse();
        let p = GZPattern::from_levels(levels)?;
        if classify(&p, 0.0).margin >= min_margin {
            return Ok(p);
        }
    }
    Err(Error::SamplingFailure(SAMPLE_BUDGET))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pat(levels: &[&[f64]]) -> GZPattern {
        GZPattern::from_levels(levels.iter().map(|l| l.to_vec()).collect()).unwrap()
    }

    #[test]
    fn exchange_matrix_pattern() {
        let a = HermitianMatrix::from_real_symmetric(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let p = gz_lambda(&a).unwrap();
        assert_eq!(p.level(1), &[0.0]);
        assert!((p.get(2, 0) + 1.0).abs() < 1e-15 && (p.get(2, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix_is_boundary() {
        let p = gz_lambda(&HermitianMatrix::zeros(3)).unwrap();
        assert!(p.as_flat().iter().all(|&x| x == 0.0));
        assert_eq!(classify(&p, STRICTNESS_TOL).class, ConeClass::Boundary);
    }

    #[test]
    fn classification_examples() {
        let c = classify(&pat(&[&[0.0], &[-1.0, 1.0]]), STRICTNESS_TOL);
        assert_eq!(c.class, ConeClass::Interior);
        assert_eq!(c.margin, 1.0);

        let c = classify(&pat(&[&[1.0], &[1.0, 2.0]]), STRICTNESS_TOL);
        assert_eq!(c.class, ConeClass::Boundary);
        assert_eq!(c.margin, 0.0);

        let c = classify(&pat(&[&[5.0], &[-1.0, 1.0]]), STRICTNESS_TOL);
        assert_eq!(c.class, ConeClass::Invalid);

        let c = classify(&pat(&[&[0.0], &[1.0, -1.0]]), STRICTNESS_TOL);
        assert_eq!(c.class, ConeClass::Invalid);

        let c = classify(&pat(&[&[0.3]]), STRICTNESS_TOL);
        assert_eq!(c.class, ConeClass::Interior);
        assert_eq!(c.margin, f64::INFINITY);
    }

    #[test]
    fn mu_of_identity_and_diagonal() {
        let p = gz_mu(&PositiveDefiniteMatrix::identity(3)).unwrap();
        assert!(p.as_flat().iter().all(|&x| x == 0.0));
        let d = PositiveDefiniteMatrix::new(HermitianMatrix::diagonal(&[1f64.exp(), 2f64.exp()])).unwrap();
        let p = gz_mu(&d).unwrap();
        assert!(p.max_abs_diff(&pat(&[&[1.0], &[1.0, 2.0]])) < 1e-15);
    }

    #[test]
    fn exp_pattern_examples() {
        let p = exp_pattern(&pat(&[&[0.0], &[0.0, 0.0]]));
        assert_eq!(p, pat(&[&[1.0], &[1.0, 1.0]]));
        let p = exp_pattern(&pat(&[&[0.0], &[-1.0, 1.0]]));
        assert_eq!(p, pat(&[&[1.0], &[(-1f64).exp(), 1f64.exp()]]));
    }

    #[test]
    fn sampler_is_deterministic_and_interior() {
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            let a = sample_interior(n, &mut r1, 2.0, 1e-2).unwrap();
            let b = sample_interior(n, &mut r2, 2.0, 1e-2).unwrap();
            assert_eq!(a, b);
            let c = classify(&a, STRICTNESS_TOL);
            assert_eq!(c.class, ConeClass::Interior);
            assert!(c.margin >= 1e-2);
            let e = classify(&exp_pattern(&a), STRICTNESS_TOL);
            assert_eq!(e.class, ConeClass::Interior);
        }
        let single = sample_interior(1, &mut r1, 0.5, 1e-3).unwrap();
        assert!(single.get(1, 0).abs() <= 0.5);
    }

    #[test]
    fn sampler_budget_exhaustion() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(sample_interior(4, &mut rng, 1.0, 10.0), Err(Error::SamplingFailure(_))));
        assert!(sample_interior(2, &mut rng, 1.0, 0.0).is_err());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let p = pat(&[&[0.1], &[-1.0 / 3.0, 2.0f64.sqrt()]]);
        let s = p.to_json();
        assert_eq!(GZPattern::from_json(&s).unwrap(), p);
        assert!(GZPattern::from_json(r#"{"n":2,"levels":[[1.0],[1.0]]}"#).is_err());
        assert!(GZPattern::from_json("{").is_err());
    }
}
