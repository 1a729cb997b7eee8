use serde::{Deserialize, Serialize};

use super::poly;
use super::{FieldOps, Fq, Fqm, GfError, PrimeField};

/// Largest supported `q^m`.
pub const MAX_FIELD_ORDER: u64 = 1 << 24;

const NO_LOG: u32 = u32::MAX;

/// JSON form of a field: `{"q": 3, "m": 5, "modulus": [1, 1, 2, 0, 0, 1]}`,
/// constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescription {
    pub q: u32,
    pub m: u32,
    pub modulus: Vec<u32>,
}

/// `F_{q^m}` with precomputed log, antilog and Zech tables.
///
/// Immutable after construction; share it behind an `Arc`.
pub struct FieldSpec {
    q: u32,
    m: u32,
    modulus: Vec<u32>,
    order: u32,
    base: PrimeField,
    /// `exp[i] = α^i`, doubled so that `exp[la + lb]` needs no reduction.
    exp: Vec<u32>,
    /// `log[a]` for `a != 0`.
    log: Vec<u32>,
    /// `zech[d] = log(1 + α^d)`, `NO_LOG` when `1 + α^d = 0`.
    zech: Vec<u32>,
    /// `q^s mod (q^m - 1)` for `s in 0..m`.
    frob_exp: Vec<u64>,
    log_neg_one: u32,
    /// `place[i] = q^i`, the weight of coordinate `i` in the canonical integer.
    place: Vec<u32>,
}

impl std::fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldSpec").field("q", &self.q).field("m", &self.m).field("modulus", &self.modulus).finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl FieldSpec {
    /// Builds `F_q[x]/(modulus)`, checking that the modulus is monic of degree
    /// `m`, irreducible, and primitive.
    pub fn new(q: u32, m: u32, modulus: &[u32]) -> Result<Self, GfError> {
        if !poly::is_prime(q) {
            return Err(GfError::NotPrime(q));
        }
        if m == 0 {
            return Err(GfError::ZeroDegree);
        }
        let order = u64::from(q)
            .checked_pow(m)
            .filter(|&o| o <= MAX_FIELD_ORDER)
            .ok_or(GfError::TableBudgetExceeded { q, m })?;
        if modulus.len() != m as usize + 1 {
            return Err(GfError::BadModulus(format!("expected {} coefficients, got {}", m + 1, modulus.len())));
        }
        if let Some(&c) = modulus.iter().find(|&&c| c >= q) {
            return Err(GfError::BadModulus(format!("coefficient {c} is not below q = {q}")));
        }
        if modulus[m as usize] != 1 {
            return Err(GfError::BadModulus("leading coefficient must be 1".into()));
        }
        if !poly::is_irreducible(modulus, q) {
            return Err(GfError::NotIrreducible { q });
        }
        if !poly::x_is_primitive(modulus, q, m) {
            return Err(GfError::NotPrimitive);
        }
        Ok(Self::build_tables(q, m, modulus.to_vec(), order as u32))
    }

    pub fn from_description(d: &FieldDescription) -> Result<Self, GfError> {
        Self::new(d.q, d.m, &d.modulus)
    }

    /// The field with the lexicographically smallest primitive modulus
    /// (comparing coefficients from the constant term upwards as base-`q`
    /// digits).
    pub fn with_default_modulus(q: u32, m: u32) -> Result<Self, GfError> {
        if !poly::is_prime(q) {
            return Err(GfError::NotPrime(q));
        }
        if m == 0 {
            return Err(GfError::ZeroDegree);
        }
        let order = u64::from(q)
            .checked_pow(m)
            .filter(|&o| o <= MAX_FIELD_ORDER)
            .ok_or(GfError::TableBudgetExceeded { q, m })?;
        for low in 1..order {
            let mut coeffs = digits(low, q, m as usize);
            coeffs.push(1);
            if poly::is_irreducible(&coeffs, q) && poly::x_is_primitive(&coeffs, q, m) {
                return Ok(Self::build_tables(q, m, coeffs, order as u32));
            }
        }
        Err(GfError::NotPrimitive)
    }

    fn build_tables(q: u32, m: u32, modulus: Vec<u32>, order: u32) -> Self {
        let n1 = (order - 1) as usize;
        let md = m as usize;
        let mut exp = vec![0u32; 2 * n1];
        let mut log = vec![NO_LOG; order as usize];
        let mut cur = vec![0u32; md];
        cur[0] = 1;
        for i in 0..n1 {
            let v = encode(&cur, q);
            exp[i] = v;
            exp[i + n1] = v;
            log[v as usize] = i as u32;
            // multiply by x and reduce by the monic modulus
            let top = cur[md - 1];
            for j in (1..md).rev() {
                cur[j] = cur[j - 1];
            }
            cur[0] = 0;
            for j in 0..md {
                let sub = (u64::from(top) * u64::from(modulus[j]) % u64::from(q)) as u32;
                cur[j] = (cur[j] + q - sub) % q;
            }
        }
        let mut zech = vec![NO_LOG; n1];
        for (d, z) in zech.iter_mut().enumerate() {
            let s = digit_add(1, exp[d], q, m);
            if s != 0 {
                *z = log[s as usize];
            }
        }
        let frob_exp = (0..m)
            .map(|s| {
                let mut e = 1u64;
                for _ in 0..s {
                    e = e * u64::from(q) % n1 as u64;
                }
                e
            })
            .collect();
        let log_neg_one = if q == 2 { 0 } else { (n1 / 2) as u32 };
        let place = (0..m).map(|i| q.pow(i)).collect();
        Self { q, m, modulus, order, base: PrimeField { q }, exp, log, zech, frob_exp, log_neg_one, place }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// `q^m`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }

    pub fn description(&self) -> FieldDescription {
        FieldDescription { q: self.q, m: self.m, modulus: self.modulus.clone() }
    }

    pub fn elem(&self, value: u32) -> Result<Fqm, GfError> {
        if value < self.order {
            Ok(Fqm(value))
        } else {
            Err(GfError::FieldMismatch { value, order: self.order })
        }
    }

    /// The primitive element `α`, a root of the modulus.
    pub fn alpha(&self) -> Fqm {
        Fqm(self.exp[1 % (self.order as usize - 1)])
    }

    /// `α^i` for any integer exponent.
    pub fn alpha_pow(&self, i: i64) -> Fqm {
        let n1 = i64::from(self.order - 1);
        Fqm(self.exp[i.rem_euclid(n1) as usize])
    }

    /// Image of a base field element under `F_q ↪ F_{q^m}`.
    #[inline]
    pub fn embed(&self, c: Fq) -> Fqm {
        Fqm(c.0)
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Fqm> {
        (0..self.order).map(Fqm)
    }

    /// Discrete logarithm to base `α`; `None` for zero.
    pub fn log(&self, a: Fqm) -> Option<u32> {
        (a.0 != 0).then(|| self.log[a.0 as usize])
    }

    pub fn antilog(&self, i: u32) -> Fqm {
        Fqm(self.exp[(i % (self.order - 1)) as usize])
    }

    pub fn try_inv(&self, a: Fqm) -> Result<Fqm, GfError> {
        self.inv(a).ok_or(GfError::DivisionByZero)
    }

    pub fn div(&self, a: Fqm, b: Fqm) -> Result<Fqm, GfError> {
        Ok(self.mul(a, self.try_inv(b)?))
    }

    pub fn pow(&self, a: Fqm, e: u64) -> Fqm {
        if a.0 == 0 {
            return if e == 0 { Fqm::ONE } else { Fqm::ZERO };
        }
        let n1 = u64::from(self.order - 1);
        let l = u64::from(self.log[a.0 as usize]) * (e % n1) % n1;
        Fqm(self.exp[l as usize])
    }

    /// `a^{q^s}`; `s` is reduced mod `m`, so `frobenius(a, m - s)` inverts
    /// `frobenius(a, s)`.
    #[inline]
    pub fn frobenius(&self, a: Fqm, s: u32) -> Fqm {
        if a.0 == 0 {
            return a;
        }
        let e = self.frob_exp[(s % self.m) as usize];
        let n1 = u64::from(self.order - 1);
        let l = u64::from(self.log[a.0 as usize]) * e % n1;
        Fqm(self.exp[l as usize])
    }

    /// `a` lies in the embedded copy of `F_q`.
    #[inline]
    pub fn in_base_field(&self, a: Fqm) -> bool {
        a.0 < self.q
    }

    /// Coordinates of `a` in the basis `(1, α, …, α^{m-1})`.
    pub fn expand(&self, a: Fqm) -> Vec<Fq> {
        digits(u64::from(a.0), self.q, self.m as usize).into_iter().map(Fq).collect()
    }

    /// Index and value of the highest non-zero coordinate of `a`, or `None`
    /// for zero.
    #[inline]
    pub fn leading_coordinate(&self, a: Fqm) -> Option<(usize, Fq)> {
        if a.0 == 0 {
            return None;
        }
        let p = self.place.partition_point(|&w| w <= a.0) - 1;
        Some((p, Fq(a.0 / self.place[p])))
    }

    /// Inverse of [`expand`](Self::expand).
    pub fn from_coeffs(&self, coeffs: &[Fq]) -> Result<Fqm, GfError> {
        if coeffs.len() != self.m as usize {
            return Err(GfError::BadModulus(format!("expected {} coordinates, got {}", self.m, coeffs.len())));
        }
        let mut v = 0u32;
        for &c in coeffs.iter().rev() {
            if c.0 >= self.q {
                return Err(GfError::FieldMismatch { value: c.0, order: self.q });
            }
            v = v * self.q + c.0;
        }
        Ok(Fqm(v))
    }

    /// Multiply by a base field scalar.
    #[inline]
    pub fn scale(&self, a: Fqm, c: Fq) -> Fqm {
        self.mul(a, Fqm(c.0))
    }
}

impl FieldOps for FieldSpec {
    type Elem = Fqm;

    #[inline]
    fn zero(&self) -> Fqm {
        Fqm::ZERO
    }

    #[inline]
    fn one(&self) -> Fqm {
        Fqm::ONE
    }

    #[inline]
    fn add(&self, a: Fqm, b: Fqm) -> Fqm {
        if self.q == 2 {
            return Fqm(a.0 ^ b.0);
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let n1 = self.order - 1;
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        // a + b = a (1 + α^{lb - la})
        let d = if lb >= la { lb - la } else { lb + n1 - la };
        let z = self.zech[d as usize];
        if z == NO_LOG {
            Fqm::ZERO
        } else {
            Fqm(self.exp[(la + z) as usize])
        }
    }

    #[inline]
    fn neg(&self, a: Fqm) -> Fqm {
        if a.0 == 0 || self.q == 2 {
            return a;
        }
        let l = self.log[a.0 as usize] + self.log_neg_one;
        Fqm(self.exp[l as usize])
    }

    #[inline]
    fn sub(&self, a: Fqm, b: Fqm) -> Fqm {
        self.add(a, self.neg(b))
    }

    #[inline]
    fn mul(&self, a: Fqm, b: Fqm) -> Fqm {
        if a.0 == 0 || b.0 == 0 {
            return Fqm::ZERO;
        }
        Fqm(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    fn inv(&self, a: Fqm) -> Option<Fqm> {
        if a.0 == 0 {
            return None;
        }
        let n1 = self.order - 1;
        let l = self.log[a.0 as usize];
        Some(Fqm(self.exp[((n1 - l) % n1) as usize]))
    }
}

fn digits(mut v: u64, q: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((v % u64::from(q)) as u32);
        v /= u64::from(q);
    }
    out
}

fn encode(coeffs: &[u32], q: u32) -> u32 {
    coeffs.iter().rev().fold(0u32, |acc, &c| acc * q + c)
}

fn digit_add(a: u32, b: u32, q: u32, m: u32) -> u32 {
    let da = digits(u64::from(a), q, m as usize);
    let db = digits(u64::from(b), q, m as usize);
    let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % q).collect();
    encode(&sum, q)
}
