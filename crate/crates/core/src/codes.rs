//! `F_{q^m}`-linear rank-metric codes given by a generator matrix.

use std::ops::ControlFlow;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{gcd, FieldDescription, FieldOps, FieldSpec, Fqm, GfError};
use crate::linalg::{self, LinalgError, Matrix};

/// Upper bound on the number of objects any brute-force enumeration may visit.
pub const ENUMERATION_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("generator has {rows} rows but rank {rank}")]
    RankDeficientGenerator { rows: usize, rank: usize },
    #[error("code length {n} exceeds extension degree {m}")]
    LengthExceedsDegree { n: usize, m: u32 },
    #[error("generator must have at least one row and one column")]
    EmptyCode,
    #[error("evaluation points are not linearly independent over F_q")]
    DependentEvaluationPoints,
    #[error("Frobenius step s = {s} is not coprime to m = {m}")]
    BadStep { s: u32, m: u32 },
    #[error("leading {k}x{k} block of every generator is singular")]
    SingularLeadingBlock { k: usize },
    #[error("the dual of a full-length code is the zero code")]
    ZeroDimensionalDual,
    #[error("enumeration of {needed} objects exceeds the budget of {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("expected {expected} message coefficients, got {got}")]
    CoefficientLength { expected: usize, got: usize },
    #[error("code file: {0}")]
    Schema(String),
}

/// A `k`-dimensional linear code in `F_{q^m}^n` with `1 ≤ k ≤ n ≤ m`.
#[derive(Clone)]
pub struct RankCode {
    field: Arc<FieldSpec>,
    generator: Matrix<Fqm>,
    systematic: OnceLock<Option<Matrix<Fqm>>>,
    dual: OnceLock<Option<Matrix<Fqm>>>,
}

impl std::fmt::Debug for RankCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RankCode")
            .field("field", &self.field)
            .field("n", &self.n())
            .field("k", &self.k())
            .field("generator", &self.generator.to_rows())
            .finish()
    }
}

impl RankCode {
    pub fn new(field: Arc<FieldSpec>, generator: Matrix<Fqm>) -> Result<Self, CodeError> {
        if generator.rows() == 0 || generator.cols() == 0 {
            return Err(CodeError::EmptyCode);
        }
        for &e in generator.entries() {
            field.elem(e.value())?;
        }
        if generator.cols() > field.m() as usize {
            return Err(CodeError::LengthExceedsDegree { n: generator.cols(), m: field.m() });
        }
        let rank = linalg::rank(field.as_ref(), &generator);
        if rank != generator.rows() {
            return Err(CodeError::RankDeficientGenerator { rows: generator.rows(), rank });
        }
        Ok(Self { field, generator, systematic: OnceLock::new(), dual: OnceLock::new() })
    }

    /// Generalized Gabidulin code: row `i` is `g^{[i·s]}`.
    pub fn gabidulin(field: Arc<FieldSpec>, spec: &MooreSpec) -> Result<Self, CodeError> {
        let m = field.m();
        if gcd(spec.s, m) != 1 {
            return Err(CodeError::BadStep { s: spec.s, m });
        }
        for &x in &spec.g {
            field.elem(x.value())?;
        }
        if linalg::rank_q(&field, &spec.g) != spec.g.len() {
            return Err(CodeError::DependentEvaluationPoints);
        }
        let g = moore_matrix(&field, &spec.g, spec.k, spec.s);
        Self::new(field, g)
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.generator.cols()
    }

    pub fn k(&self) -> usize {
        self.generator.rows()
    }

    pub fn generator(&self) -> &Matrix<Fqm> {
        &self.generator
    }

    /// Singleton bound `n - k + 1`.
    pub fn singleton_bound(&self) -> usize {
        self.n() - self.k() + 1
    }

    /// `[I_k | X]` with the same row space, if the leading block is invertible.
    pub fn systematic_form(&self) -> Result<&Matrix<Fqm>, CodeError> {
        self.systematic
            .get_or_init(|| {
                let (r, pivots) = linalg::rref(self.field.as_ref(), &self.generator);
                (pivots.iter().copied().eq(0..self.k())).then_some(r)
            })
            .as_ref()
            .ok_or(CodeError::SingularLeadingBlock { k: self.k() })
    }

    /// The `X` block of the systematic form.
    pub fn systematic_block(&self) -> Result<Matrix<Fqm>, CodeError> {
        let s = self.systematic_form()?;
        let rows: Vec<usize> = (0..self.k()).collect();
        let cols: Vec<usize> = (self.k()..self.n()).collect();
        Ok(s.submatrix(&rows, &cols))
    }

    /// Parity-check matrix: a basis of the kernel of the generator.
    pub fn parity_check(&self) -> Result<&Matrix<Fqm>, CodeError> {
        self.dual
            .get_or_init(|| {
                let h = linalg::kernel(self.field.as_ref(), &self.generator);
                (h.rows() > 0).then_some(h)
            })
            .as_ref()
            .ok_or(CodeError::ZeroDimensionalDual)
    }

    pub fn dual(&self) -> Result<RankCode, CodeError> {
        let h = self.parity_check()?.clone();
        RankCode::new(self.field.clone(), h)
    }

    /// `C^{[s]}`, generated by the entrywise Frobenius of the generator.
    pub fn frobenius_code(&self, s: u32) -> RankCode {
        let g = linalg::frobenius_matrix(&self.field, &self.generator, s);
        // Frobenius is a field automorphism, so the rank is preserved.
        RankCode::new(self.field.clone(), g).expect("Frobenius preserves rank")
    }

    /// `coeffs · G`.
    pub fn encode(&self, coeffs: &[Fqm]) -> Result<Vec<Fqm>, CodeError> {
        if coeffs.len() != self.k() {
            return Err(CodeError::CoefficientLength { expected: self.k(), got: coeffs.len() });
        }
        Ok(self.encode_unchecked(coeffs))
    }

    fn encode_unchecked(&self, coeffs: &[Fqm]) -> Vec<Fqm> {
        let f = self.field.as_ref();
        let mut out = vec![Fqm::ZERO; self.n()];
        for (i, &c) in coeffs.iter().enumerate() {
            if c == Fqm::ZERO {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(self.generator.row(i)) {
                *o = f.add(*o, f.mul(c, g));
            }
        }
        out
    }

    /// `F_q`-rank of the codeword `coeffs · G`.
    pub fn codeword_rank(&self, coeffs: &[Fqm]) -> Result<usize, CodeError> {
        Ok(linalg::rank_q(&self.field, &self.encode(coeffs)?))
    }

    /// Number of projective codeword classes, `(q^{mk} - 1)/(q^m - 1)`.
    pub fn projective_size(&self) -> u64 {
        let qm = u64::from(self.field.order());
        (0..self.k() as u32).map(|i| qm.saturating_pow(i)).fold(0u64, u64::saturating_add)
    }

    /// One representative per projective class of message vectors: the first
    /// non-zero coefficient is 1.
    pub fn projective_messages(&self) -> Result<ProjectiveMessages, CodeError> {
        let needed = self.projective_size();
        if needed > ENUMERATION_BUDGET {
            return Err(CodeError::BudgetExceeded { needed, budget: ENUMERATION_BUDGET });
        }
        Ok(ProjectiveMessages::new(self.k(), self.field.order()))
    }

    /// Visits one codeword per projective class, in the order of
    /// [`projective_messages`](Self::projective_messages), passing the message
    /// (as canonical integers) and the codeword. Stops early when `visit`
    /// breaks.
    ///
    /// All multiples of the last generator row are tabulated once, so each
    /// codeword costs `n` additions.
    pub fn scan_projective<B>(
        &self,
        mut visit: impl FnMut(&[u32], &[Fqm]) -> ControlFlow<B>,
    ) -> Result<Option<B>, CodeError> {
        let needed = self.projective_size();
        if needed > ENUMERATION_BUDGET {
            return Err(CodeError::BudgetExceeded { needed, budget: ENUMERATION_BUDGET });
        }
        let f = self.field.as_ref();
        let (k, n, order) = (self.k(), self.n(), self.field.order());
        let last = self.generator.row(k - 1);
        let multiples: Vec<Fqm> = (0..order).flat_map(|v| last.iter().map(move |&g| f.mul(Fqm(v), g))).collect();
        let mut msg = vec![0u32; k];
        let mut partial = vec![Fqm::ZERO; n];
        let mut word = vec![Fqm::ZERO; n];
        for lead in 0..k {
            msg.iter_mut().for_each(|x| *x = 0);
            msg[lead] = 1;
            if lead == k - 1 {
                if let ControlFlow::Break(b) = visit(&msg, last) {
                    return Ok(Some(b));
                }
                continue;
            }
            loop {
                // partial = message without its last coordinate, times G
                partial.iter_mut().for_each(|x| *x = Fqm::ZERO);
                for (i, &c) in msg[..k - 1].iter().enumerate().skip(lead) {
                    if c != 0 {
                        for (p, &g) in partial.iter_mut().zip(self.generator.row(i)) {
                            *p = f.add(*p, f.mul(Fqm(c), g));
                        }
                    }
                }
                for v in 0..order {
                    msg[k - 1] = v;
                    let row = &multiples[v as usize * n..(v as usize + 1) * n];
                    for ((w, &p), &r) in word.iter_mut().zip(&partial).zip(row) {
                        *w = f.add(p, r);
                    }
                    if let ControlFlow::Break(b) = visit(&msg, &word) {
                        return Ok(Some(b));
                    }
                }
                // advance the middle coordinates, last of them fastest
                let mut i = k - 1;
                loop {
                    i -= 1;
                    if i == lead {
                        break;
                    }
                    msg[i] += 1;
                    if msg[i] < order {
                        break;
                    }
                    msg[i] = 0;
                }
                if i == lead {
                    break;
                }
            }
        }
        Ok(None)
    }

    /// Minimum rank distance with a minimizing message vector.
    pub fn min_rank_codeword(&self) -> Result<(usize, Vec<Fqm>), CodeError> {
        let mut best = (usize::MAX, Vec::new());
        self.scan_projective(|msg, word| {
            // only ranks below the current best matter
            let r = linalg::rank_q_capped(&self.field, word, best.0);
            if r < best.0 {
                best = (r, msg.iter().map(|&v| Fqm(v)).collect());
                if r == 1 {
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        })?;
        Ok(best)
    }

    pub fn min_rank_distance(&self) -> Result<usize, CodeError> {
        Ok(self.min_rank_codeword()?.0)
    }

    /// First projective message whose codeword has rank at most `bound`.
    pub fn find_codeword_of_rank_at_most(&self, bound: usize) -> Result<Option<(Vec<Fqm>, usize)>, CodeError> {
        self.scan_projective(|msg, word| {
            let r = linalg::rank_q_capped(&self.field, word, bound + 1);
            if r <= bound {
                ControlFlow::Break((msg.iter().map(|&v| Fqm(v)).collect(), r))
            } else {
                ControlFlow::Continue(())
            }
        })
    }

    /// Equality as subspaces.
    pub fn same_code(&self, other: &RankCode) -> bool {
        self.field == other.field && linalg::same_row_space(self.field.as_ref(), &self.generator, &other.generator)
    }

    pub fn to_file(&self) -> CodeFile {
        CodeFile {
            field: self.field.description(),
            n: self.n(),
            k: self.k(),
            generator: self.generator.to_rows().into_iter().map(|r| r.into_iter().map(Fqm::value).collect()).collect(),
        }
    }

    pub fn from_file(file: &CodeFile) -> Result<Self, CodeError> {
        let field = Arc::new(FieldSpec::from_description(&file.field)?);
        Self::from_file_in(field, file)
    }

    /// Like [`from_file`](Self::from_file) but reuses an already-built field,
    /// which must match the file's description.
    pub fn from_file_in(field: Arc<FieldSpec>, file: &CodeFile) -> Result<Self, CodeError> {
        if field.description() != file.field {
            return Err(CodeError::Schema("field does not match the supplied field".into()));
        }
        if file.generator.len() != file.k {
            return Err(CodeError::Schema(format!(
                "\"k\" is {} but \"generator\" has {} rows",
                file.k,
                file.generator.len()
            )));
        }
        if let Some(row) = file.generator.iter().position(|r| r.len() != file.n) {
            return Err(CodeError::Schema(format!(
                "\"generator\" row {row} has {} entries, \"n\" is {}",
                file.generator[row].len(),
                file.n
            )));
        }
        let mut rows = Vec::with_capacity(file.k);
        for r in &file.generator {
            let row = r
                .iter()
                .map(|&v| field.elem(v))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CodeError::Schema(format!("\"generator\": {e}")))?;
            rows.push(row);
        }
        Self::new(field, Matrix::from_rows(rows)?)
    }
}

/// Moore matrix with rows `g^{[0]}, g^{[s]}, …, g^{[(k-1)s]}`.
pub fn moore_matrix(field: &FieldSpec, g: &[Fqm], k: usize, s: u32) -> Matrix<Fqm> {
    let mut data = Vec::with_capacity(k * g.len());
    for i in 0..k {
        let e = ((i as u64 * u64::from(s)) % u64::from(field.m())) as u32;
        data.extend(g.iter().map(|&x| field.frobenius(x, e)));
    }
    Matrix::new(k, g.len(), data).expect("shape is consistent")
}

/// Parameters of a generalized Gabidulin code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MooreSpec {
    pub g: Vec<Fqm>,
    pub k: usize,
    pub s: u32,
}

/// Interchange format: `{"field": {…}, "n": 4, "k": 2, "generator": [[…], …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub field: FieldDescription,
    pub n: usize,
    pub k: usize,
    pub generator: Vec<Vec<u32>>,
}

/// Iterator behind [`RankCode::projective_messages`].
pub struct ProjectiveMessages {
    k: usize,
    order: u32,
    lead: usize,
    cur: Vec<u32>,
    done: bool,
}

impl ProjectiveMessages {
    fn new(k: usize, order: u32) -> Self {
        let mut cur = vec![0; k];
        cur[0] = 1;
        Self { k, order, lead: 0, cur, done: k == 0 }
    }
}

impl Iterator for ProjectiveMessages {
    type Item = Vec<Fqm>;

    fn next(&mut self) -> Option<Vec<Fqm>> {
        if self.done {
            return None;
        }
        let out = self.cur.iter().map(|&v| Fqm(v)).collect();
        // advance the free tail after the leading 1, last position fastest
        let mut i = self.k;
        loop {
            i -= 1;
            if i == self.lead {
                self.lead += 1;
                if self.lead == self.k {
                    self.done = true;
                } else {
                    self.cur = vec![0; self.k];
                    self.cur[self.lead] = 1;
                }
                break;
            }
            self.cur[i] += 1;
            if self.cur[i] < self.order {
                break;
            }
            self.cur[i] = 0;
        }
        Some(out)
    }
}
