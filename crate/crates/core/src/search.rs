//! Search over systematic generators `[I_k | X]` with every entry of `X`
//! outside the base field.
//!
//! Candidates are indexed lexicographically: `X` is read row-major, the
//! first entry is the most significant digit, and digit `d` stands for the
//! element with canonical integer `q + d`. Shard `(i, T)` takes the indices
//! congruent to `i` modulo `T`.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{CodeError, CodeFile, RankCode};
use crate::criteria::{detect_gabidulin, is_mrd_minor, CriteriaError, GabidulinVerdict, MrdVerdict};
use crate::gf::{FieldDescription, FieldSpec, Fqm};
use crate::linalg::Matrix;

/// Per-shard cap on exhaustive enumeration.
pub const SHARD_BUDGET: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error("entry X[{row}][{col}] = {value} lies in the base field")]
    EntryInBaseField { row: usize, col: usize, value: u32 },
    #[error("block X is {rows}x{cols}, expected {k}x{expected_cols}")]
    BlockShape { rows: usize, cols: usize, k: usize, expected_cols: usize },
    #[error("need 1 <= k < n <= m, got k = {k}, n = {n}, m = {m}")]
    BadDimensions { n: usize, k: usize, m: u32 },
    #[error("shard {index}/{total} is invalid")]
    BadShard { index: u64, total: u64 },
    #[error("shard would scan {needed} candidates, above the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    NonMrd,
    MrdGabidulin,
    MrdNonGabidulin,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateVerdict {
    pub classification: Classification,
    pub mrd: MrdVerdict,
    /// Present only for MRD candidates.
    pub gabidulin: Option<GabidulinVerdict>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Random { seed: u64, samples: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shard {
    pub index: u64,
    pub total: u64,
}

impl Default for Shard {
    fn default() -> Self {
        Shard { index: 0, total: 1 }
    }
}

impl Shard {
    /// Parses `"i/T"`.
    pub fn parse(s: &str) -> Result<Shard, SearchError> {
        let bad = SearchError::BadShard { index: 0, total: 0 };
        let (i, t) = s.split_once('/').ok_or(bad.clone())?;
        let index = i.trim().parse().map_err(|_| bad.clone())?;
        let total = t.trim().parse().map_err(|_| bad)?;
        let shard = Shard { index, total };
        shard.validate()?;
        Ok(shard)
    }

    fn validate(self) -> Result<(), SearchError> {
        if self.total == 0 || self.index >= self.total {
            return Err(SearchError::BadShard { index: self.index, total: self.total });
        }
        Ok(())
    }

    /// Number of indices in `0..len` that belong to this shard.
    fn size(self, len: u128) -> u128 {
        let (i, t) = (u128::from(self.index), u128::from(self.total));
        if len <= i {
            0
        } else {
            (len - i).div_ceil(t)
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchSpace {
    pub field: Arc<FieldSpec>,
    pub n: usize,
    pub k: usize,
    pub mode: SearchMode,
    pub shard: Shard,
    pub max_exemplars: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
    /// Extra `X` blocks classified and reported separately from the counts.
    pub extra_candidates: Vec<Matrix<Fqm>>,
}

impl SearchSpace {
    pub fn exhaustive(field: Arc<FieldSpec>, n: usize, k: usize) -> Self {
        Self {
            field,
            n,
            k,
            mode: SearchMode::Exhaustive,
            shard: Shard::default(),
            max_exemplars: 16,
            jobs: None,
            extra_candidates: Vec::new(),
        }
    }

    pub fn random(field: Arc<FieldSpec>, n: usize, k: usize, seed: u64, samples: u64) -> Self {
        Self { mode: SearchMode::Random { seed, samples }, ..Self::exhaustive(field, n, k) }
    }

    fn cells(&self) -> usize {
        self.k * (self.n - self.k)
    }

    fn alphabet(&self) -> u32 {
        self.field.order() - self.field.q()
    }

    /// `(q^m - q)^{k(n-k)}`, saturating at `u128::MAX`.
    pub fn cell_count(&self) -> u128 {
        u128::from(self.alphabet()).checked_pow(self.cells() as u32).unwrap_or(u128::MAX)
    }

    /// The `X` block at lexicographic position `index`.
    pub fn candidate(&self, mut index: u128) -> Matrix<Fqm> {
        let (q, a) = (self.field.q(), u128::from(self.alphabet()));
        let cols = self.n - self.k;
        let mut x = Matrix::filled(self.k, cols, Fqm::ZERO);
        for p in (0..self.cells()).rev() {
            x.set(p / cols, p % cols, Fqm(q + (index % a) as u32));
            index /= a;
        }
        x
    }

    /// Sample number `j` of a random run; independent of sharding.
    pub fn random_candidate(&self, seed: u64, j: u64) -> Matrix<Fqm> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(j);
        let (q, order) = (self.field.q(), self.field.order());
        let cols = self.n - self.k;
        let data = (0..self.cells()).map(|_| Fqm(rng.gen_range(q..order))).collect();
        Matrix::new(self.k, cols, data).expect("shape")
    }

    fn validate(&self) -> Result<(), SearchError> {
        let m = self.field.m();
        if self.k == 0 || self.k >= self.n || self.n > m as usize {
            return Err(SearchError::BadDimensions { n: self.n, k: self.k, m });
        }
        self.shard.validate()
    }
}

/// `[I_k | X]`.
pub fn systematic_code(field: &Arc<FieldSpec>, n: usize, k: usize, x: &Matrix<Fqm>) -> Result<RankCode, SearchError> {
    if x.rows() != k || x.cols() + k != n {
        return Err(SearchError::BlockShape { rows: x.rows(), cols: x.cols(), k, expected_cols: n.saturating_sub(k) });
    }
    let g = Matrix::identity(field.as_ref(), k).hstack(x).map_err(CodeError::from)?;
    Ok(RankCode::new(field.clone(), g)?)
}

/// Minor criterion first, then the Frobenius-intersection test for MRD
/// candidates.
pub fn classify_candidate(
    field: &Arc<FieldSpec>,
    n: usize,
    k: usize,
    x: &Matrix<Fqm>,
) -> Result<CandidateVerdict, SearchError> {
    let m = field.m();
    if k == 0 || k >= n || n > m as usize {
        return Err(SearchError::BadDimensions { n, k, m });
    }
    for r in 0..x.rows() {
        for c in 0..x.cols() {
            let v = x.get(r, c);
            field.elem(v.value()).map_err(CodeError::from)?;
            if field.in_base_field(v) {
                return Err(SearchError::EntryInBaseField { row: r, col: c, value: v.value() });
            }
        }
    }
    let code = systematic_code(field, n, k, x)?;
    classify_code(&code)
}

fn classify_code(code: &RankCode) -> Result<CandidateVerdict, SearchError> {
    let mrd = is_mrd_minor(code)?;
    if !mrd.is_mrd {
        return Ok(CandidateVerdict { classification: Classification::NonMrd, mrd, gabidulin: None });
    }
    let gab = detect_gabidulin(code, true)?;
    let classification =
        if gab.is_generalized_gabidulin { Classification::MrdGabidulin } else { Classification::MrdNonGabidulin };
    Ok(CandidateVerdict { classification, mrd, gabidulin: Some(gab) })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub candidates_scanned: u64,
    pub non_mrd: u64,
    pub mrd_gabidulin: u64,
    pub mrd_non_gabidulin: u64,
}

impl Counts {
    fn record(&mut self, c: Classification) {
        self.candidates_scanned += 1;
        match c {
            Classification::NonMrd => self.non_mrd += 1,
            Classification::MrdGabidulin => self.mrd_gabidulin += 1,
            Classification::MrdNonGabidulin => self.mrd_non_gabidulin += 1,
        }
    }
}

impl std::ops::Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts {
            candidates_scanned: self.candidates_scanned + o.candidates_scanned,
            non_mrd: self.non_mrd + o.non_mrd,
            mrd_gabidulin: self.mrd_gabidulin + o.mrd_gabidulin,
            mrd_non_gabidulin: self.mrd_non_gabidulin + o.mrd_non_gabidulin,
        }
    }
}

/// An MRD non-Gabidulin code found by the search. `index` is the
/// lexicographic position (exhaustive) or the sample number (random).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exemplar {
    pub index: u64,
    pub code: CodeFile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncludedResult {
    pub x: Vec<Vec<u32>>,
    pub classification: Classification,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
    pub jobs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub field: FieldDescription,
    pub n: usize,
    pub k: usize,
    pub mode: SearchMode,
    pub shard: Shard,
    /// Size of the full candidate space, as a decimal string since it can
    /// exceed 64 bits.
    pub cell_count: String,
    pub counts: Counts,
    pub exemplars: Vec<Exemplar>,
    pub included: Vec<IncludedResult>,
    pub timing: Timing,
}

impl SearchReport {
    /// Combines shard reports of the same space: counts add up, exemplars
    /// are deduplicated by generator and kept in index order.
    pub fn merge(reports: &[SearchReport], max_exemplars: usize) -> Option<SearchReport> {
        let first = reports.first()?.clone();
        let mut out = SearchReport {
            shard: Shard::default(),
            counts: Counts::default(),
            exemplars: Vec::new(),
            timing: Timing { elapsed_ms: 0.0, jobs: first.timing.jobs },
            ..first
        };
        for r in reports {
            out.counts = out.counts + r.counts;
            out.exemplars.extend(r.exemplars.iter().cloned());
            out.timing.elapsed_ms = out.timing.elapsed_ms.max(r.timing.elapsed_ms);
        }
        out.exemplars = dedup_exemplars(out.exemplars, max_exemplars);
        Some(out)
    }
}

fn dedup_exemplars(mut ex: Vec<Exemplar>, max: usize) -> Vec<Exemplar> {
    ex.sort_by_key(|e| e.index);
    let mut seen = std::collections::HashSet::new();
    ex.retain(|e| seen.insert(e.code.generator.clone()));
    ex.truncate(max);
    ex
}

#[derive(Default)]
struct Partial {
    counts: Counts,
    exemplars: Vec<Exemplar>,
}

impl Partial {
    fn join(mut self, other: Partial, max: usize) -> Partial {
        self.counts = self.counts + other.counts;
        self.exemplars.extend(other.exemplars);
        self.exemplars = dedup_exemplars(self.exemplars, max);
        self
    }
}

pub fn run_search(space: &SearchSpace) -> Result<SearchReport, SearchError> {
    space.validate()?;
    let shard = space.shard;
    let cell_count = space.cell_count();
    let local = match space.mode {
        SearchMode::Exhaustive => {
            let needed = shard.size(cell_count);
            if needed > u128::from(SHARD_BUDGET) {
                return Err(SearchError::BudgetExceeded { needed, budget: SHARD_BUDGET });
            }
            needed as u64
        }
        SearchMode::Random { samples, .. } => shard.size(u128::from(samples)) as u64,
    };

    let start = Instant::now();
    let work = || -> Result<Partial, SearchError> {
        (0..local)
            .into_par_iter()
            .map(|j| {
                let index = shard.index + j * shard.total;
                let x = match space.mode {
                    SearchMode::Exhaustive => space.candidate(u128::from(index)),
                    SearchMode::Random { seed, .. } => space.random_candidate(seed, index),
                };
                let code = systematic_code(&space.field, space.n, space.k, &x)?;
                let v = classify_code(&code)?;
                let mut p = Partial::default();
                p.counts.record(v.classification);
                if v.classification == Classification::MrdNonGabidulin && space.max_exemplars > 0 {
                    p.exemplars.push(Exemplar { index, code: code.to_file() });
                }
                Ok(p)
            })
            .try_reduce(Partial::default, |a, b| Ok(a.join(b, space.max_exemplars)))
    };
    let (partial, jobs) = match space.jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(j).build().expect("thread pool");
            (pool.install(work)?, pool.current_num_threads())
        }
        None => (work()?, rayon::current_num_threads()),
    };

    let included = space
        .extra_candidates
        .iter()
        .map(|x| {
            let v = classify_candidate(&space.field, space.n, space.k, x)?;
            Ok(IncludedResult {
                x: x.to_rows().into_iter().map(|r| r.into_iter().map(Fqm::value).collect()).collect(),
                classification: v.classification,
            })
        })
        .collect::<Result<Vec<_>, SearchError>>()?;

    Ok(SearchReport {
        field: space.field.description(),
        n: space.n,
        k: space.k,
        mode: space.mode,
        shard,
        cell_count: cell_count.to_string(),
        counts: partial.counts,
        exemplars: partial.exemplars,
        included,
        timing: Timing { elapsed_ms: start.elapsed().as_secs_f64() * 1e3, jobs },
    })
}
