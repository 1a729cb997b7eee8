//! Semilinear rank isometries `v ↦ σ(λv)·A` with `λ ∈ F_{q^m}^*`,
//! `A ∈ GL_n(q)` and `σ = x ↦ x^{[i]}`.
//!
//! Codes are row spaces acted on from the right. In a composition
//! `g.then(h)` the isometry `g` is applied first.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{CodeError, RankCode, ENUMERATION_BUDGET};
use crate::criteria::{detect_gabidulin, CriteriaError};
use crate::gf::{FieldOps, FieldSpec, Fq, Fqm, GfError};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsometryError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error("lambda must be non-zero")]
    ZeroLambda,
    #[error("matrix A is {rows}x{cols} but the code has length {n}")]
    DimensionMismatch { rows: usize, cols: usize, n: usize },
    #[error("matrix A is not invertible over F_q")]
    SingularA,
    #[error("orbit walk over {needed} isometries exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isometry {
    pub lambda: Fqm,
    pub a: Matrix<Fq>,
    /// Frobenius exponent `i`, `σ(x) = x^{q^i}`.
    pub sigma: u32,
}

impl Isometry {
    pub fn new(field: &FieldSpec, lambda: Fqm, a: Matrix<Fq>, sigma: u32) -> Result<Self, IsometryError> {
        field.elem(lambda.value())?;
        if lambda == Fqm::ZERO {
            return Err(IsometryError::ZeroLambda);
        }
        if a.rows() != a.cols() {
            return Err(IsometryError::DimensionMismatch { rows: a.rows(), cols: a.cols(), n: a.rows() });
        }
        for &c in a.entries() {
            field.base().elem(c.0)?;
        }
        if linalg::rank(field.base(), &a) != a.rows() {
            return Err(IsometryError::SingularA);
        }
        Ok(Self { lambda, a, sigma: sigma % field.m() })
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        Self { lambda: Fqm::ONE, a: Matrix::identity(field.base(), n), sigma: 0 }
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// `σ(λv)·A`.
    pub fn apply_vector(&self, field: &FieldSpec, v: &[Fqm]) -> Vec<Fqm> {
        let moved: Vec<Fqm> = v.iter().map(|&x| field.frobenius(field.mul(self.lambda, x), self.sigma)).collect();
        let n = self.n();
        (0..n)
            .map(|j| {
                moved.iter().enumerate().fold(Fqm::ZERO, |acc, (l, &x)| {
                    let c = self.a.get(l, j);
                    if c.0 == 0 {
                        acc
                    } else {
                        field.add(acc, field.scale(x, c))
                    }
                })
            })
            .collect()
    }

    /// Image of a code, generated by the images of its generator rows.
    pub fn apply(&self, code: &RankCode) -> Result<RankCode, IsometryError> {
        let f = code.field();
        if self.n() != code.n() {
            return Err(IsometryError::DimensionMismatch { rows: self.a.rows(), cols: self.a.cols(), n: code.n() });
        }
        if linalg::rank(f.base(), &self.a) != self.n() {
            return Err(IsometryError::SingularA);
        }
        let g = code.generator();
        let rows = (0..g.rows()).map(|r| self.apply_vector(f, g.row(r))).collect();
        Ok(RankCode::new(f.clone(), Matrix::from_rows(rows).expect("rectangular"))?)
    }

    /// The isometry "apply `self`, then `next`":
    /// `(λ, A, σ) then (λ', A', σ') = (λ·σ⁻¹(λ'), A·A', σ'σ)`.
    pub fn then(&self, next: &Isometry, field: &FieldSpec) -> Isometry {
        let m = field.m();
        let back = field.frobenius(next.lambda, (m - self.sigma % m) % m);
        Isometry {
            lambda: field.mul(self.lambda, back),
            a: linalg::mul(field.base(), &self.a, &next.a).expect("same length"),
            sigma: (self.sigma + next.sigma) % m,
        }
    }

    pub fn to_json(&self) -> IsometryJson {
        IsometryJson {
            lambda: self.lambda.value(),
            a: self.a.to_rows().into_iter().map(|r| r.into_iter().map(|c| c.0).collect()).collect(),
            sigma: self.sigma,
        }
    }

    pub fn from_json(field: &FieldSpec, j: &IsometryJson) -> Result<Self, IsometryError> {
        let rows: Vec<Vec<Fq>> = j.a.iter().map(|r| r.iter().map(|&c| Fq(c)).collect()).collect();
        let a = Matrix::from_rows(rows).map_err(|_| IsometryError::DimensionMismatch {
            rows: j.a.len(),
            cols: 0,
            n: j.a.len(),
        })?;
        Isometry::new(field, Fqm(j.lambda), a, j.sigma)
    }
}

/// JSON form `{"lambda": int, "A": [[…]], "sigma": int}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsometryJson {
    pub lambda: u32,
    #[serde(rename = "A")]
    pub a: Vec<Vec<u32>>,
    pub sigma: u32,
}

/// Uniform invertible `n×n` matrix over `F_q` by rejection sampling.
/// Returns the matrix and the number of draws it took.
pub fn sample_invertible<R: Rng>(rng: &mut R, field: &FieldSpec, n: usize) -> (Matrix<Fq>, u32) {
    let q = field.q();
    let mut draws = 0;
    loop {
        draws += 1;
        let data = (0..n * n).map(|_| Fq(rng.gen_range(0..q))).collect();
        let a = Matrix::new(n, n, data).expect("square");
        if linalg::rank(field.base(), &a) == n {
            return (a, draws);
        }
    }
}

pub fn random_isometry_with<R: Rng>(rng: &mut R, field: &FieldSpec, n: usize) -> Isometry {
    let lambda = Fqm(rng.gen_range(1..field.order()));
    let (a, _) = sample_invertible(rng, field, n);
    let sigma = rng.gen_range(0..field.m());
    Isometry { lambda, a, sigma }
}

/// Deterministic in `seed`.
pub fn random_isometry(field: &FieldSpec, n: usize, seed: u64) -> Isometry {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_isometry_with(&mut rng, field, n)
}

/// Counts of projective codewords by rank.
pub fn rank_distribution(code: &RankCode) -> Result<BTreeMap<usize, u64>, IsometryError> {
    let mut out = BTreeMap::new();
    code.scan_projective::<()>(|_, word| {
        *out.entry(linalg::rank_q(code.field(), word)).or_insert(0) += 1;
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Cheap invariants compared between two codes. Differences prove
/// inequivalence; agreement proves nothing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceScreen {
    pub same_parameters: bool,
    pub same_rank_distribution: bool,
    pub same_gabidulin_verdict: Option<bool>,
    pub possibly_equivalent: bool,
}

pub fn screen_equivalence(a: &RankCode, b: &RankCode) -> Result<EquivalenceScreen, IsometryError> {
    let same_parameters = a.field() == b.field() && a.n() == b.n() && a.k() == b.k();
    if !same_parameters {
        return Ok(EquivalenceScreen {
            same_parameters,
            same_rank_distribution: false,
            same_gabidulin_verdict: None,
            possibly_equivalent: false,
        });
    }
    let same_rank_distribution = rank_distribution(a)? == rank_distribution(b)?;
    let verdict = |c: &RankCode| detect_gabidulin(c, false).ok().map(|v| v.is_generalized_gabidulin);
    let same_gabidulin_verdict = match (verdict(a), verdict(b)) {
        (Some(x), Some(y)) => Some(x == y),
        _ => None,
    };
    Ok(EquivalenceScreen {
        same_parameters,
        same_rank_distribution,
        same_gabidulin_verdict,
        possibly_equivalent: same_rank_distribution && same_gabidulin_verdict != Some(false),
    })
}

/// Exhaustive search for an isometry mapping `a` onto `b`.
///
/// `λ` acts trivially on linear codes, so only `A ∈ GL_n(q)` and `σ` are
/// enumerated. Feasible for tiny parameters such as `q = 2, n = 4`.
pub fn find_isometry(a: &RankCode, b: &RankCode) -> Result<Option<Isometry>, IsometryError> {
    let f = a.field();
    if f != b.field() || a.n() != b.n() || a.k() != b.k() {
        return Ok(None);
    }
    let n = a.n();
    let q = f.q();
    let needed = u128::from(q).pow((n * n) as u32) * u128::from(f.m());
    if needed > u128::from(ENUMERATION_BUDGET) {
        return Err(IsometryError::BudgetExceeded { needed, budget: ENUMERATION_BUDGET });
    }
    let target = linalg::rref(f.as_ref(), b.generator()).0;
    for sigma in 0..f.m() {
        let moved = linalg::frobenius_matrix(f, a.generator(), sigma);
        for mut idx in 0..u128::from(q).pow((n * n) as u32) as u64 {
            let mut m = Matrix::filled(n, n, Fq(0));
            for p in (0..n * n).rev() {
                m.set(p / n, p % n, Fq((idx % u64::from(q)) as u32));
                idx /= u64::from(q);
            }
            if linalg::rank(f.base(), &m) != n {
                continue;
            }
            let img = linalg::mul(f.as_ref(), &moved, &linalg::embed_matrix(f, &m)).expect("shapes");
            if linalg::rref(f.as_ref(), &img).0 == target {
                return Ok(Some(Isometry { lambda: Fqm::ONE, a: m, sigma }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::MooreSpec;
    use std::sync::Arc;

    fn f34() -> Arc<FieldSpec> {
        Arc::new(FieldSpec::new(3, 4, &[2, 0, 0, 2, 1]).unwrap())
    }

    fn gab(f: &Arc<FieldSpec>, k: usize) -> RankCode {
        let g = (0..4).map(|i| f.alpha_pow(i)).collect();
        RankCode::gabidulin(f.clone(), &MooreSpec { g, k, s: 1 }).unwrap()
    }

    #[test]
    fn identity_and_scaling() {
        let f = f34();
        let c = gab(&f, 2);
        assert!(Isometry::identity(&f, 4).apply(&c).unwrap().same_code(&c));
        let scale = Isometry::new(&f, f.alpha(), Matrix::identity(f.base(), 4), 0).unwrap();
        let img = scale.apply(&c).unwrap();
        assert_eq!(img.min_rank_distance().unwrap(), c.min_rank_distance().unwrap());
    }

    #[test]
    fn validation() {
        let f = f34();
        let id = Matrix::identity(f.base(), 4);
        assert_eq!(Isometry::new(&f, Fqm::ZERO, id.clone(), 0).unwrap_err(), IsometryError::ZeroLambda);
        let sing = Matrix::filled(4, 4, Fq(1));
        assert_eq!(Isometry::new(&f, Fqm::ONE, sing, 0).unwrap_err(), IsometryError::SingularA);
        let small = Isometry::identity(&f, 3);
        assert!(matches!(small.apply(&gab(&f, 2)), Err(IsometryError::DimensionMismatch { .. })));
    }

    #[test]
    fn seeded_sampling_is_deterministic_and_invertible() {
        let f = f34();
        assert_eq!(random_isometry(&f, 4, 17), random_isometry(&f, 4, 17));
        for seed in 0..50 {
            let iso = random_isometry(&f, 4, seed);
            assert_eq!(linalg::rank(f.base(), &iso.a), 4);
            assert_ne!(iso.lambda, Fqm::ZERO);
        }
    }

    #[test]
    fn acceptance_rate_matches_gl_density() {
        let f = f34();
        // |GL_4(3)| / 3^16 = ∏_{i=1..4} (1 - 3^{-i})
        let expected: f64 = (1..=4).map(|i| 1.0 - 3f64.powi(-i)).product();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let samples = 10_000;
        let draws: u32 = (0..samples).map(|_| sample_invertible(&mut rng, &f, 4).1).sum();
        let rate = f64::from(samples) / f64::from(draws);
        assert!((rate - expected).abs() < 0.05, "rate {rate} vs {expected}");
    }

    #[test]
    fn composition_matches_sequential_application() {
        let f = f34();
        let c = gab(&f, 2);
        for seed in 0..20 {
            let g = random_isometry(&f, 4, seed);
            let h = random_isometry(&f, 4, seed + 1000);
            let seq = h.apply(&g.apply(&c).unwrap()).unwrap();
            let comp = g.then(&h, &f).apply(&c).unwrap();
            assert!(seq.same_code(&comp));
            let v: Vec<Fqm> = (0..4).map(|i| f.alpha_pow(i * 7 + 1)).collect();
            assert_eq!(h.apply_vector(&f, &g.apply_vector(&f, &v)), g.then(&h, &f).apply_vector(&f, &v));
        }
    }

    #[test]
    fn json_round_trip() {
        let f = f34();
        let iso = random_isometry(&f, 4, 3);
        let j = serde_json::to_value(iso.to_json()).unwrap();
        assert!(j.get("A").is_some());
        let back = Isometry::from_json(&f, &serde_json::from_value(j).unwrap()).unwrap();
        assert_eq!(back, iso);
    }

    #[test]
    fn screening_and_orbit_walk_q2() {
        let f = Arc::new(FieldSpec::with_default_modulus(2, 4).unwrap());
        let c = gab(&f, 2);
        let iso = random_isometry(&f, 4, 99);
        let img = iso.apply(&c).unwrap();
        let screen = screen_equivalence(&c, &img).unwrap();
        assert!(screen.possibly_equivalent);
        let found = find_isometry(&c, &img).unwrap().expect("orbit contains the image");
        assert!(found.apply(&c).unwrap().same_code(&img));

        let bad = RankCode::new(
            f.clone(),
            Matrix::from_rows(vec![vec![Fqm(1), Fqm(0), Fqm(1), Fqm(1)], vec![Fqm(0), Fqm(1), Fqm(2), Fqm(3)]])
                .unwrap(),
        )
        .unwrap();
        assert!(!screen_equivalence(&c, &bad).unwrap().possibly_equivalent);
        assert!(find_isometry(&c, &bad).unwrap().is_none());
    }
}
