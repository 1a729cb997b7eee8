//! Decision procedures for the MRD and generalized-Gabidulin properties.
//!
//! Three independent MRD checkers are provided:
//!
//! - [`is_mrd_distance`]: brute-force minimum rank distance against the
//!   Singleton bound.
//! - [`is_mrd_subspace`]: `rank(V·Gᵀ) = k` for every `k`-dimensional
//!   `V ⊆ F_q^n`, one RREF representative per subspace.
//! - [`is_mrd_minor`]: every maximal minor of `G·A` is non-zero for every
//!   upper unitriangular `A` over `F_q`.
//!
//! [`detect_gabidulin`] decides whether an MRD code is a generalized
//! Gabidulin code from `dim(C ∩ C^{[s]})`.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{CodeError, RankCode, ENUMERATION_BUDGET};
use crate::gf::{coprime_steps, FieldOps, FieldSpec, Fq, Fqm};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriteriaError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("enumeration of {needed} objects exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("the Gabidulin criterion only applies to MRD codes")]
    NotMrd,
    #[error("the Gabidulin criterion needs 1 <= k < n, got k = {k}, n = {n}")]
    DimensionOutOfRange { k: usize, n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MrdMethod {
    Distance,
    Subspace,
    Minor,
    /// Minor test over all of `GL_n(q)`; tiny fields only.
    FullGl,
}

/// Evidence that a code is not MRD.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MrdWitness {
    /// A non-zero codeword of rank at most `n - k`.
    Codeword { message: Vec<Fqm>, codeword: Vec<Fqm>, rank: usize },
    /// A full-rank `V ∈ F_q^{k×n}` with `rank(V·Gᵀ) < k`.
    Subspace { v: Matrix<Fq>, rank: usize },
    /// An `A ∈ GL_n(q)` and the column set of a vanishing minor of `G·A`.
    Minor { a: Matrix<Fq>, columns: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MrdVerdict {
    pub is_mrd: bool,
    pub method: MrdMethod,
    pub witness: Option<MrdWitness>,
    /// Objects enumerated before the verdict was reached.
    pub checked: u64,
    /// Full-sweep mode only: how many enumerated objects failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failures: Option<u64>,
}

impl MrdVerdict {
    fn pass(method: MrdMethod, checked: u64) -> Self {
        Self { is_mrd: true, method, witness: None, checked, failures: None }
    }

    fn fail(method: MrdMethod, witness: MrdWitness, checked: u64) -> Self {
        Self { is_mrd: false, method, witness: Some(witness), checked, failures: None }
    }

    /// Recomputes the failure the witness claims. `true` for a passing
    /// verdict without witness.
    pub fn replay(&self, code: &RankCode) -> bool {
        match (&self.witness, self.is_mrd) {
            (None, true) => true,
            (Some(w), false) => replay_witness(code, w),
            _ => false,
        }
    }
}

fn replay_witness(code: &RankCode, w: &MrdWitness) -> bool {
    let f = code.field().as_ref();
    let (k, n) = (code.k(), code.n());
    match w {
        MrdWitness::Codeword { message, codeword, rank } => {
            let Ok(c) = code.encode(message) else { return false };
            let r = linalg::rank_q(f, &c);
            &c == codeword && r == *rank && r <= n - k && c.iter().any(|&x| x != Fqm::ZERO)
        }
        MrdWitness::Subspace { v, rank } => {
            if v.rows() != k || v.cols() != n || linalg::rank(f.base(), v) != k {
                return false;
            }
            let r = linalg::rank(f, &subspace_image(f, v, code.generator()));
            r == *rank && r < k
        }
        MrdWitness::Minor { a, columns } => {
            if a.rows() != n || a.cols() != n || linalg::rank(f.base(), a) != n || columns.len() != k {
                return false;
            }
            let ga = linalg::mul(f, code.generator(), &linalg::embed_matrix(f, a)).expect("shapes agree");
            if columns.iter().any(|&c| c >= n) {
                return false;
            }
            linalg::det(f, &ga.select_columns(columns)).is_ok_and(|d| d == Fqm::ZERO)
        }
    }
}

/// Brute-force check: minimum rank distance equals `n - k + 1`.
pub fn is_mrd_distance(code: &RankCode) -> Result<MrdVerdict, CriteriaError> {
    let bound = code.n() - code.k();
    let mut checked = 0u64;
    let f = code.field();
    let found = code.scan_projective(|msg, word| {
        checked += 1;
        let r = linalg::rank_q_capped(f, word, bound + 1);
        if r <= bound {
            let message = msg.iter().map(|&v| Fqm(v)).collect();
            ControlFlow::Break(MrdWitness::Codeword { message, codeword: word.to_vec(), rank: r })
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(match found {
        Some(w) => MrdVerdict::fail(MrdMethod::Distance, w, checked),
        None => MrdVerdict::pass(MrdMethod::Distance, checked),
    })
}

/// Number of `k`-dimensional subspaces of `F_q^n`.
pub fn gaussian_binomial(n: u32, k: u32, q: u32) -> u128 {
    if k > n {
        return 0;
    }
    let q = u128::from(q);
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= q.pow(n - i) - 1;
        den *= q.pow(k - i) - 1;
    }
    num / den
}

/// Every `k×n` matrix over `F_q` in reduced row echelon form with `k`
/// pivots, ordered by pivot pattern then by free entries lexicographically.
pub fn rref_representatives(n: usize, k: usize, q: u32) -> impl Iterator<Item = Matrix<Fq>> {
    linalg::combinations(n, k).flat_map(move |pivots| {
        let mut free = Vec::new();
        for (r, &p) in pivots.iter().enumerate() {
            for c in p + 1..n {
                if !pivots.contains(&c) {
                    free.push((r, c));
                }
            }
        }
        let count = u64::from(q).pow(free.len() as u32);
        (0..count).map(move |mut idx| {
            let mut m = Matrix::filled(k, n, Fq(0));
            for (r, &p) in pivots.iter().enumerate() {
                m.set(r, p, Fq(1));
            }
            // first free entry most significant
            for &(r, c) in free.iter().rev() {
                m.set(r, c, Fq((idx % u64::from(q)) as u32));
                idx /= u64::from(q);
            }
            m
        })
    })
}

/// `V · Gᵀ` with `V` embedded into the extension.
fn subspace_image(f: &FieldSpec, v: &Matrix<Fq>, g: &Matrix<Fqm>) -> Matrix<Fqm> {
    let k = v.rows();
    let kg = g.rows();
    let mut out = Matrix::zeros(f, k, kg);
    for i in 0..k {
        for j in 0..kg {
            let mut acc = Fqm::ZERO;
            for l in 0..v.cols() {
                let c = v.get(i, l);
                if c.0 != 0 {
                    acc = f.add(acc, f.scale(g.get(j, l), c));
                }
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// `rank(V·Gᵀ) = k` for one representative of every `k`-subspace of `F_q^n`.
pub fn is_mrd_subspace(code: &RankCode) -> Result<MrdVerdict, CriteriaError> {
    let f = code.field().as_ref();
    let (n, k) = (code.n(), code.k());
    let needed = gaussian_binomial(n as u32, k as u32, f.q());
    check_budget(needed)?;
    let mut checked = 0u64;
    for v in rref_representatives(n, k, f.q()) {
        checked += 1;
        let img = subspace_image(f, &v, code.generator());
        let d = linalg::det(f, &img).expect("square");
        if d == Fqm::ZERO {
            let rank = linalg::rank(f, &img);
            return Ok(MrdVerdict::fail(MrdMethod::Subspace, MrdWitness::Subspace { v, rank }, checked));
        }
    }
    Ok(MrdVerdict::pass(MrdMethod::Subspace, checked))
}

/// Minimum rank distance without enumerating codewords.
///
/// A codeword `xG` has rank `≤ n - j` iff it is orthogonal to some
/// `j`-dimensional `V ⊆ F_q^n`, which happens for some non-zero `x` iff
/// `rank(V·Gᵀ) < k`. The distance is `n - j` for the largest such `j`.
/// Costs `Σ_{j=k}^{n-1} [n, j]_q` rank computations.
pub fn min_rank_distance_subspace(code: &RankCode) -> Result<usize, CriteriaError> {
    let f = code.field().as_ref();
    let (n, k) = (code.n(), code.k());
    let needed: u128 = (k..n).map(|j| gaussian_binomial(n as u32, j as u32, f.q())).sum();
    check_budget(needed)?;
    for j in (k..n).rev() {
        for v in rref_representatives(n, j, f.q()) {
            if linalg::rank(f, &subspace_image(f, &v, code.generator())) < k {
                return Ok(n - j);
            }
        }
    }
    Ok(n - k + 1)
}

fn check_budget(needed: u128) -> Result<(), CriteriaError> {
    if needed > u128::from(ENUMERATION_BUDGET) {
        Err(CriteriaError::BudgetExceeded { needed, budget: ENUMERATION_BUDGET })
    } else {
        Ok(())
    }
}

/// `|UT*_n(q)| = q^{n(n-1)/2}`.
pub fn unitriangular_count(n: usize, q: u32) -> u128 {
    u128::from(q).pow((n * n.saturating_sub(1) / 2) as u32)
}

/// The `index`-th upper unitriangular matrix: above-diagonal entries read
/// row-major as base-`q` digits, first entry most significant.
pub fn unitriangular(n: usize, q: u32, mut index: u64) -> Matrix<Fq> {
    let mut m = Matrix::filled(n, n, Fq(0));
    let positions: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    for i in 0..n {
        m.set(i, i, Fq(1));
    }
    for &(i, j) in positions.iter().rev() {
        m.set(i, j, Fq((index % u64::from(q)) as u32));
        index /= u64::from(q);
    }
    m
}

/// `G·A` for `A` over the base field.
fn times_base(f: &FieldSpec, g: &Matrix<Fqm>, a: &Matrix<Fq>, out: &mut Matrix<Fqm>) {
    let n = a.cols();
    for r in 0..g.rows() {
        let row = g.row(r);
        for j in 0..n {
            let mut acc = Fqm::ZERO;
            for (l, &x) in row.iter().enumerate() {
                let c = a.get(l, j);
                if c.0 != 0 && x != Fqm::ZERO {
                    acc = f.add(acc, if c.0 == 1 { x } else { f.scale(x, c) });
                }
            }
            out.set(r, j, acc);
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Sweep {
    /// Stop at the first failing matrix.
    #[default]
    FirstFailure,
    /// Visit every matrix and count failures; the witness is the first one.
    Full,
}

/// Minor criterion over `UT*_n(q)`, stopping at the first vanishing minor.
pub fn is_mrd_minor(code: &RankCode) -> Result<MrdVerdict, CriteriaError> {
    is_mrd_minor_with(code, Sweep::FirstFailure)
}

pub fn is_mrd_minor_with(code: &RankCode, sweep: Sweep) -> Result<MrdVerdict, CriteriaError> {
    let f = code.field().as_ref();
    let n = code.n();
    let q = f.q();
    let count = unitriangular_count(n, q);
    check_budget(count)?;
    let g = code.generator();
    let mut ga = Matrix::zeros(f, code.k(), n);
    let mut first: Option<MrdWitness> = None;
    let mut failures = 0u64;
    for idx in 0..count as u64 {
        let a = unitriangular(n, q, idx);
        times_base(f, g, &a, &mut ga);
        if let Some(columns) = linalg::first_vanishing_minor(f, &ga).map_err(CodeError::from)? {
            failures += 1;
            if first.is_none() {
                first = Some(MrdWitness::Minor { a, columns });
            }
            if sweep == Sweep::FirstFailure {
                return Ok(MrdVerdict::fail(MrdMethod::Minor, first.unwrap(), idx + 1));
            }
        }
    }
    let mut v = match first {
        Some(w) => MrdVerdict::fail(MrdMethod::Minor, w, count as u64),
        None => MrdVerdict::pass(MrdMethod::Minor, count as u64),
    };
    if sweep == Sweep::Full {
        v.failures = Some(failures);
    }
    Ok(v)
}

/// Minor criterion over all of `GL_n(q)`. Enumerates `q^{n²}` matrices, so
/// it is only usable on tiny parameters; it exists to cross-check the
/// reduction to unitriangular matrices.
pub fn is_mrd_full_gl(code: &RankCode) -> Result<MrdVerdict, CriteriaError> {
    let f = code.field().as_ref();
    let n = code.n();
    let q = f.q();
    let total = u128::from(q).pow((n * n) as u32);
    check_budget(total)?;
    let g = code.generator();
    let mut ga = Matrix::zeros(f, code.k(), n);
    let mut checked = 0u64;
    for mut idx in 0..total as u64 {
        let mut a = Matrix::filled(n, n, Fq(0));
        for p in (0..n * n).rev() {
            a.set(p / n, p % n, Fq((idx % u64::from(q)) as u32));
            idx /= u64::from(q);
        }
        if linalg::rank(f.base(), &a) != n {
            continue;
        }
        checked += 1;
        times_base(f, g, &a, &mut ga);
        if let Some(columns) = linalg::first_vanishing_minor(f, &ga).map_err(CodeError::from)? {
            return Ok(MrdVerdict::fail(MrdMethod::FullGl, MrdWitness::Minor { a, columns }, checked));
        }
    }
    Ok(MrdVerdict::pass(MrdMethod::FullGl, checked))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GabidulinVerdict {
    pub is_generalized_gabidulin: bool,
    /// Steps `s` with `dim(C ∩ C^{[s]}) = k - 1`.
    pub valid_steps: Vec<u32>,
    /// `s -> dim(C ∩ C^{[s]})` for every `1 ≤ s < m` coprime to `m`.
    pub dims: BTreeMap<u32, usize>,
}

/// `dim(C ∩ C^{[s]})` for every step coprime to `m`. No MRD requirement.
pub fn frobenius_intersection_dims(code: &RankCode) -> BTreeMap<u32, usize> {
    let f = code.field().as_ref();
    let g = code.generator();
    coprime_steps(f.m())
        .into_iter()
        .map(|s| {
            let gs = linalg::frobenius_matrix(f, g, s);
            let d = linalg::intersection_dim(f, g, &gs).expect("generators have full rank");
            (s, d)
        })
        .collect()
}

/// Decides whether an MRD code of dimension `k < n` is a generalized
/// Gabidulin code. With `assume_mrd = false` the minor criterion is run
/// first and non-MRD input is rejected.
pub fn detect_gabidulin(code: &RankCode, assume_mrd: bool) -> Result<GabidulinVerdict, CriteriaError> {
    let (k, n) = (code.k(), code.n());
    if k >= n {
        return Err(CriteriaError::DimensionOutOfRange { k, n });
    }
    if !assume_mrd && !is_mrd_minor(code)?.is_mrd {
        return Err(CriteriaError::NotMrd);
    }
    let dims = frobenius_intersection_dims(code);
    let valid_steps: Vec<u32> = dims.iter().filter(|&(_, &d)| d == k - 1).map(|(&s, _)| s).collect();
    Ok(GabidulinVerdict { is_generalized_gabidulin: !valid_steps.is_empty(), valid_steps, dims })
}

/// All three MRD verdicts, in the order distance, subspace, minor.
pub fn all_mrd_verdicts(code: &RankCode) -> Result<[MrdVerdict; 3], CriteriaError> {
    Ok([is_mrd_distance(code)?, is_mrd_subspace(code)?, is_mrd_minor(code)?])
}
