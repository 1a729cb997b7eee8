//! Dense matrices over either level of the tower.
//!
//! A single elimination routine, parameterized by [`FieldOps`], provides rank,
//! RREF, determinants, kernels and maximal minors for `Matrix<Fq>` and
//! `Matrix<Fqm>` alike.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FieldOps, FieldSpec, Fq, Fqm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
    #[error("maximal minors need rows <= cols, got {rows}x{cols}")]
    RowsExceedCols { rows: usize, cols: usize },
    #[error("input matrix does not have full row rank")]
    RankDeficientInput,
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds from nested rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c));
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn map<U: Copy>(&self, f: impl FnMut(T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().copied().map(f).collect() }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                data.push(self.get(r, c));
            }
        }
        Self { rows: rows.len(), cols: cols.len(), data }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let all: Vec<usize> = (0..self.rows).collect();
        self.submatrix(&all, cols)
    }

    pub fn hstack(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch(format!("hstack of {} and {} rows", self.rows, other.rows)));
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(Self { rows: self.rows, cols: self.cols + other.cols, data })
    }

    pub fn vstack(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!("vstack of {} and {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self { rows: self.rows + other.rows, cols: self.cols, data })
    }
}

impl<T: Copy> Matrix<T> {
    pub fn zeros<F: FieldOps<Elem = T>>(f: &F, rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, f.zero())
    }

    pub fn identity<F: FieldOps<Elem = T>>(f: &F, n: usize) -> Self {
        let mut m = Self::zeros(f, n, n);
        for i in 0..n {
            m.set(i, i, f.one());
        }
        m
    }
}

/// Product `a · b`.
pub fn mul<F: FieldOps>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Result<Matrix<F::Elem>, LinalgError> {
    if a.cols != b.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "product of {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = Matrix::zeros(f, a.rows, b.cols);
    for i in 0..a.rows {
        for l in 0..a.cols {
            let x = a.get(i, l);
            if f.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let v = f.add(out.get(i, j), f.mul(x, b.get(l, j)));
                out.set(i, j, v);
            }
        }
    }
    Ok(out)
}

/// Reduced row echelon form and pivot columns.
pub fn rref<F: FieldOps>(f: &F, m: &Matrix<F::Elem>) -> (Matrix<F::Elem>, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !f.is_zero(a.get(i, c))) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, r * a.cols + j);
            }
        }
        let inv = f.inv(a.get(r, c)).expect("pivot is non-zero");
        for j in c..a.cols {
            let v = f.mul(a.get(r, j), inv);
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i == r {
                continue;
            }
            let factor = a.get(i, c);
            if f.is_zero(factor) {
                continue;
            }
            for j in c..a.cols {
                let v = f.sub(a.get(i, j), f.mul(factor, a.get(r, j)));
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Row rank over the matrix's own field.
pub fn rank<F: FieldOps>(f: &F, m: &Matrix<F::Elem>) -> usize {
    let mut a = m.clone();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !f.is_zero(a.get(i, c))) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, r * a.cols + j);
            }
        }
        let inv = f.inv(a.get(r, c)).expect("pivot is non-zero");
        for i in r + 1..a.rows {
            let x = a.get(i, c);
            if f.is_zero(x) {
                continue;
            }
            let factor = f.mul(x, inv);
            for j in c..a.cols {
                let v = f.sub(a.get(i, j), f.mul(factor, a.get(r, j)));
                a.set(i, j, v);
            }
        }
        r += 1;
    }
    r
}

/// Determinant by elimination, tracking the sign of row swaps.
pub fn det<F: FieldOps>(f: &F, m: &Matrix<F::Elem>) -> Result<F::Elem, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NonSquare { rows: m.rows, cols: m.cols });
    }
    Ok(det_unchecked(f, m.rows, m.data.clone()))
}

fn det_unchecked<F: FieldOps>(f: &F, n: usize, mut a: Vec<F::Elem>) -> F::Elem {
    match n {
        0 => return f.one(),
        1 => return a[0],
        2 => return f.sub(f.mul(a[0], a[3]), f.mul(a[1], a[2])),
        _ => {}
    }
    let mut acc = f.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !f.is_zero(a[i * n + c])) else {
            return f.zero();
        };
        if p != c {
            for j in 0..n {
                a.swap(p * n + j, c * n + j);
            }
            acc = f.neg(acc);
        }
        let pivot = a[c * n + c];
        acc = f.mul(acc, pivot);
        let inv = f.inv(pivot).expect("pivot is non-zero");
        for i in c + 1..n {
            let x = a[i * n + c];
            if f.is_zero(x) {
                continue;
            }
            let factor = f.mul(x, inv);
            for j in c..n {
                a[i * n + j] = f.sub(a[i * n + j], f.mul(factor, a[c * n + j]));
            }
        }
    }
    acc
}

/// Inverse of a square matrix, `None` if singular.
pub fn inverse<F: FieldOps>(f: &F, m: &Matrix<F::Elem>) -> Result<Option<Matrix<F::Elem>>, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NonSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let aug = m.hstack(&Matrix::identity(f, n))?;
    let (r, pivots) = rref(f, &aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Ok(None);
    }
    let right: Vec<usize> = (n..2 * n).collect();
    let all: Vec<usize> = (0..n).collect();
    Ok(Some(r.submatrix(&all, &right)))
}

/// Basis (as rows) of `{x : m · xᵀ = 0}`.
pub fn kernel<F: FieldOps>(f: &F, m: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    let (r, pivots) = rref(f, m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Matrix::zeros(f, free.len(), m.cols);
    for (row, &fc) in free.iter().enumerate() {
        out.set(row, fc, f.one());
        for (pr, &pc) in pivots.iter().enumerate() {
            out.set(row, pc, f.neg(r.get(pr, fc)));
        }
    }
    out
}

/// Iterator over `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                cur = Some(next);
                break;
            }
        }
        Some(out)
    })
}

/// Determinants of all `k×k` column selections of a `k×n` matrix, in
/// lexicographic order of the column sets.
pub fn maximal_minors<F: FieldOps>(f: &F, m: &Matrix<F::Elem>) -> Result<Vec<F::Elem>, LinalgError> {
    if m.rows > m.cols {
        return Err(LinalgError::RowsExceedCols { rows: m.rows, cols: m.cols });
    }
    Ok(combinations(m.cols, m.rows).map(|cols| det_unchecked(f, m.rows, m.select_columns(&cols).data)).collect())
}

/// Lexicographically first column set whose minor vanishes, if any.
pub fn first_vanishing_minor<F: FieldOps>(f: &F, m: &Matrix<F::Elem>) -> Result<Option<Vec<usize>>, LinalgError> {
    if m.rows > m.cols {
        return Err(LinalgError::RowsExceedCols { rows: m.rows, cols: m.cols });
    }
    Ok(combinations(m.cols, m.rows).find(|cols| f.is_zero(det_unchecked(f, m.rows, m.select_columns(cols).data))))
}

/// `k1 + k2 - rank([g1; g2])`: the dimension of the intersection of two row
/// spaces given by full-rank generators.
pub fn intersection_dim<F: FieldOps>(f: &F, g1: &Matrix<F::Elem>, g2: &Matrix<F::Elem>) -> Result<usize, LinalgError> {
    if rank(f, g1) != g1.rows || rank(f, g2) != g2.rows {
        return Err(LinalgError::RankDeficientInput);
    }
    let stacked = g1.vstack(g2)?;
    Ok(g1.rows + g2.rows - rank(f, &stacked))
}

/// `m × n` matrix over `F_q` whose column `j` is the coordinate vector of `v[j]`.
pub fn expand_to_base(field: &FieldSpec, v: &[Fqm]) -> Matrix<Fq> {
    let m = field.m() as usize;
    let n = v.len();
    let mut out = Matrix::filled(m, n, Fq(0));
    for (j, &x) in v.iter().enumerate() {
        for (i, c) in field.expand(x).into_iter().enumerate() {
            out.set(i, j, c);
        }
    }
    out
}

/// `F_q`-rank of a vector over `F_{q^m}`, i.e. the rank of
/// [`expand_to_base`]. Works on the entries directly with an echelon basis
/// indexed by leading coordinate, without building the matrix.
pub fn rank_q(field: &FieldSpec, v: &[Fqm]) -> usize {
    rank_q_capped(field, v, usize::MAX)
}

/// `min(rank_q(v), cap)`, stopping as soon as `cap` independent entries
/// have been seen.
pub fn rank_q_capped(field: &FieldSpec, v: &[Fqm], cap: usize) -> usize {
    let mut basis = [0u32; 32];
    let mut rank = 0;
    if field.q() == 2 {
        for &x in v {
            if rank >= cap {
                break;
            }
            let mut x = x.0;
            while x != 0 {
                let p = 31 - x.leading_zeros() as usize;
                if basis[p] == 0 {
                    basis[p] = x;
                    rank += 1;
                    break;
                }
                x ^= basis[p];
            }
        }
        return rank;
    }
    let base = field.base();
    for &x in v {
        if rank >= cap {
            break;
        }
        let mut x = x;
        while let Some((p, d)) = field.leading_coordinate(x) {
            if basis[p] == 0 {
                // normalize the leading coordinate to 1
                let inv = base.inv(d).expect("non-zero digit");
                basis[p] = field.scale(x, inv).0;
                rank += 1;
                break;
            }
            x = field.sub(x, field.scale(Fqm(basis[p]), d));
        }
    }
    rank
}

/// Entrywise Frobenius `M^{[s]}`.
pub fn frobenius_matrix(field: &FieldSpec, m: &Matrix<Fqm>, s: u32) -> Matrix<Fqm> {
    m.map(|x| field.frobenius(x, s))
}

/// Embeds a base field matrix into the extension.
pub fn embed_matrix(field: &FieldSpec, m: &Matrix<Fq>) -> Matrix<Fqm> {
    m.map(|c| field.embed(c))
}

/// Same row space test via canonical RREF.
pub fn same_row_space<F: FieldOps>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> bool {
    if a.cols != b.cols {
        return false;
    }
    let (ra, pa) = rref(f, a);
    let (rb, pb) = rref(f, b);
    pa == pb && (0..pa.len()).all(|i| ra.row(i) == rb.row(i))
}

/// Serialization tag for the two levels of the tower.
pub trait FieldLevel: Copy {
    const TAG: &'static str;
    fn raw(self) -> u32;
    fn from_raw(v: u32) -> Self;
}

impl FieldLevel for Fq {
    const TAG: &'static str = "base";
    fn raw(self) -> u32 {
        self.0
    }
    fn from_raw(v: u32) -> Self {
        Fq(v)
    }
}

impl FieldLevel for Fqm {
    const TAG: &'static str = "ext";
    fn raw(self) -> u32 {
        self.0
    }
    fn from_raw(v: u32) -> Self {
        Fqm(v)
    }
}

/// JSON form `{"field": "base"|"ext", "rows": r, "cols": c, "entries": [[…]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub field: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<u32>>,
}

impl<T: FieldLevel> Matrix<T> {
    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            field: T::TAG.to_string(),
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows).map(|r| self.row(r).iter().map(|x| x.raw()).collect()).collect(),
        }
    }

    /// Checks the level tag and shape; element ranges are the caller's concern.
    pub fn from_json(j: &MatrixJson) -> Result<Self, LinalgError> {
        if j.field != T::TAG {
            return Err(LinalgError::DimensionMismatch(format!("field level {:?}, expected {:?}", j.field, T::TAG)));
        }
        if j.entries.len() != j.rows || j.entries.iter().any(|r| r.len() != j.cols) {
            return Err(LinalgError::DimensionMismatch(format!("entries do not form a {}x{} matrix", j.rows, j.cols)));
        }
        Matrix::from_rows(j.entries.iter().map(|r| r.iter().map(|&v| T::from_raw(v)).collect()).collect()).map(
            |mut m| {
                m.rows = j.rows;
                m.cols = j.cols;
                m
            },
        )
    }
}

impl<T: FieldLevel> Serialize for Matrix<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de, T: FieldLevel> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let j = MatrixJson::deserialize(deserializer)?;
        Matrix::from_json(&j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f34() -> FieldSpec {
        FieldSpec::new(3, 4, &[2, 0, 0, 2, 1]).unwrap()
    }

    fn random_ext(rng: &mut ChaCha8Rng, f: &FieldSpec, r: usize, c: usize) -> Matrix<Fqm> {
        Matrix::new(r, c, (0..r * c).map(|_| Fqm(rng.gen_range(0..f.order()))).collect()).unwrap()
    }

    fn random_base(rng: &mut ChaCha8Rng, q: u32, r: usize, c: usize) -> Matrix<Fq> {
        Matrix::new(r, c, (0..r * c).map(|_| Fq(rng.gen_range(0..q))).collect()).unwrap()
    }

    /// Leibniz-formula determinant, independent of elimination.
    fn leibniz<F: FieldOps>(f: &F, m: &Matrix<F::Elem>) -> F::Elem {
        fn perms(n: usize) -> Vec<(Vec<usize>, bool)> {
            if n == 0 {
                return vec![(vec![], false)];
            }
            let mut out = Vec::new();
            for (p, odd) in perms(n - 1) {
                for pos in 0..n {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    let moved = n - 1 - pos;
                    out.push((q, odd ^ (moved % 2 == 1)));
                }
            }
            out
        }
        let n = m.rows();
        let mut acc = f.zero();
        for (p, odd) in perms(n) {
            let mut t = f.one();
            for (i, &j) in p.iter().enumerate() {
                t = f.mul(t, m.get(i, j));
            }
            acc = if odd { f.sub(acc, t) } else { f.add(acc, t) };
        }
        acc
    }

    #[test]
    fn rank_basics() {
        let f = f34();
        assert_eq!(rank(&f, &Matrix::zeros(&f, 3, 4)), 0);
        assert_eq!(rank(&f, &Matrix::identity(&f, 4)), 4);
        let a = f.alpha();
        let v = [Fqm::ONE, Fqm::ZERO, a, f.mul(a, a)];
        let e = expand_to_base(&f, &v);
        assert_eq!(e.rows(), 4);
        assert_eq!(rank(f.base(), &e), 3);
    }

    #[test]
    fn det_and_minors() {
        let f = f34();
        assert_eq!(det(&f, &Matrix::identity(&f, 3)).unwrap(), Fqm::ONE);
        assert!(matches!(det(&f, &Matrix::zeros(&f, 2, 3)), Err(LinalgError::NonSquare { .. })));
        let m = Matrix::identity(&f, 2).hstack(&Matrix::zeros(&f, 2, 2)).unwrap();
        assert_eq!(
            maximal_minors(&f, &m).unwrap(),
            vec![Fqm::ONE, Fqm::ZERO, Fqm::ZERO, Fqm::ZERO, Fqm::ZERO, Fqm::ZERO]
        );
        assert!(matches!(maximal_minors(&f, &m.transpose()), Err(LinalgError::RowsExceedCols { .. })));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sq = random_ext(&mut rng, &f, 3, 3);
        assert_eq!(maximal_minors(&f, &sq).unwrap(), vec![det(&f, &sq).unwrap()]);
    }

    #[test]
    fn det_matches_leibniz_oracle() {
        let f = f34();
        let base = PrimeField::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            for _ in 0..40 {
                let m = random_ext(&mut rng, &f, n, n);
                assert_eq!(det(&f, &m).unwrap(), leibniz(&f, &m));
                let b = random_base(&mut rng, 3, n, n);
                assert_eq!(det(&base, &b).unwrap(), leibniz(&base, &b));
            }
        }
    }

    #[test]
    fn combinations_lex() {
        let c: Vec<Vec<usize>> = combinations(4, 2).collect();
        assert_eq!(c, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(5, 5).count(), 1);
        assert_eq!(combinations(3, 0).count(), 1);
        assert_eq!(combinations(2, 3).count(), 0);
    }

    #[test]
    fn kernel_of_systematic_matrix() {
        let f = f34();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_ext(&mut rng, &f, 2, 3);
        let g = Matrix::identity(&f, 2).hstack(&x).unwrap();
        let h = kernel(&f, &g);
        assert_eq!(h.rows(), 3);
        let prod = mul(&f, &g, &h.transpose()).unwrap();
        assert!(prod.entries().iter().all(|&e| e == Fqm::ZERO));
        let neg_xt = x.transpose().map(|e| f.neg(e));
        let expected = neg_xt.hstack(&Matrix::identity(&f, 3)).unwrap();
        assert!(same_row_space(&f, &h, &expected));
    }

    #[test]
    fn rref_idempotent_and_rank_properties() {
        let f = f34();
        let base = *f.base();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let r = rng.gen_range(1..5);
            let c = rng.gen_range(1..6);
            let m = random_ext(&mut rng, &f, r, c);
            let (once, _) = rref(&f, &m);
            let (twice, _) = rref(&f, &once);
            assert_eq!(once, twice);
            assert_eq!(rank(&f, &m), rank(&f, &m.transpose()));
            let b = random_base(&mut rng, 3, r, c);
            assert_eq!(rank(&base, &b), rank(&base, &b.transpose()));
            let sq = random_ext(&mut rng, &f, r, r);
            assert_eq!(det(&f, &sq).unwrap() != Fqm::ZERO, rank(&f, &sq) == r);
            if let Some(inv) = inverse(&f, &sq).unwrap() {
                assert_eq!(mul(&f, &sq, &inv).unwrap(), Matrix::identity(&f, r));
                assert_eq!(rank(&f, &mul(&f, &sq, &m).unwrap()), rank(&f, &m));
            }
            let sqb = random_base(&mut rng, 3, r, r);
            if rank(&base, &sqb) == r {
                assert_eq!(rank(&base, &mul(&base, &sqb, &b).unwrap()), rank(&base, &b));
            }
        }
    }

    #[test]
    fn expand_to_base_properties() {
        let f = FieldSpec::new(3, 5, &[1, 1, 2, 0, 0, 1]).unwrap();
        assert_eq!(expand_to_base(&f, &[Fqm::ZERO; 3]), Matrix::filled(5, 3, Fq(0)));
        let powers: Vec<Fqm> = (0..4).map(|i| f.alpha_pow(i)).collect();
        let e = expand_to_base(&f, &powers);
        for j in 0..4 {
            for i in 0..5 {
                assert_eq!(e.get(i, j), Fq(u32::from(i == j)));
            }
        }
        assert_eq!(rank_q(&f, &powers), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let v: Vec<Fqm> = (0..4).map(|_| Fqm(rng.gen_range(0..f.order()))).collect();
            let lambda = Fqm(rng.gen_range(1..f.order()));
            let scaled: Vec<Fqm> = v.iter().map(|&x| f.mul(lambda, x)).collect();
            assert_eq!(rank_q(&f, &v), rank_q(&f, &scaled));
        }
    }

    #[test]
    fn rank_q_matches_elimination_on_expansion() {
        let fields = [
            FieldSpec::with_default_modulus(2, 6).unwrap(),
            FieldSpec::new(3, 4, &[2, 0, 0, 2, 1]).unwrap(),
            FieldSpec::with_default_modulus(5, 3).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for f in &fields {
            let mut seen = std::collections::BTreeSet::new();
            for _ in 0..400 {
                let n = rng.gen_range(1..=f.m() as usize + 1);
                // draw from a few elements so dependencies are frequent
                let pool: Vec<Fqm> = (0..3).map(|_| Fqm(rng.gen_range(0..f.order()))).collect();
                let v: Vec<Fqm> = (0..n)
                    .map(|_| {
                        let a = pool[rng.gen_range(0..3)];
                        let b = pool[rng.gen_range(0..3)];
                        f.add(a, f.scale(b, Fq(rng.gen_range(0..f.q()))))
                    })
                    .collect();
                let r = rank_q(f, &v);
                seen.insert(r);
                assert_eq!(r, rank(f.base(), &expand_to_base(f, &v)), "{v:?}");
            }
            assert!(seen.len() >= 3);
        }
    }

    #[test]
    fn intersection_dims() {
        let f = f34();
        let g = Matrix::from_rows(vec![
            vec![Fqm::ONE, Fqm::ZERO, Fqm::ZERO, Fqm::ZERO],
            vec![Fqm::ZERO, Fqm::ONE, Fqm::ZERO, Fqm::ZERO],
        ])
        .unwrap();
        let h = Matrix::from_rows(vec![
            vec![Fqm::ZERO, Fqm::ZERO, Fqm::ONE, Fqm::ZERO],
            vec![Fqm::ZERO, Fqm::ZERO, Fqm::ZERO, Fqm::ONE],
        ])
        .unwrap();
        assert_eq!(intersection_dim(&f, &g, &g).unwrap(), 2);
        assert_eq!(intersection_dim(&f, &g, &h).unwrap(), 0);
        let bad = g.vstack(&g).unwrap();
        assert_eq!(intersection_dim(&f, &bad, &h), Err(LinalgError::RankDeficientInput));
    }

    #[test]
    fn json_round_trip_and_level_check() {
        let f = f34();
        let m = Matrix::from_rows(vec![vec![Fqm(1), Fqm(5)], vec![Fqm(7), Fqm(80)]]).unwrap();
        let j = m.to_json();
        assert_eq!(j.field, "ext");
        assert_eq!(Matrix::<Fqm>::from_json(&j).unwrap(), m);
        assert!(Matrix::<Fq>::from_json(&j).is_err());
        let _ = f;
    }
}
