//! Finite field arithmetic for the tower `F_q ⊂ F_{q^m}`.
//!
//! `F_q` is a prime field and `F_{q^m} = F_q[x]/(f)` for a primitive modulus
//! `f`. Elements of the extension are encoded as the integer `Σ c_i q^i`
//! where `(c_0, …, c_{m-1})` are the coordinates in the power basis
//! `(1, α, …, α^{m-1})`. Multiplication, inversion, Frobenius powers and
//! addition all go through log/antilog/Zech tables.

mod field;
pub(crate) mod poly;

use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use field::{FieldDescription, FieldSpec, MAX_FIELD_ORDER};

/// Element of the prime field `F_q`, stored as its residue in `0..q`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fq(pub u32);

/// Element of `F_{q^m}` in canonical integer encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fqm(pub u32);

impl Fqm {
    pub const ZERO: Fqm = Fqm(0);
    pub const ONE: Fqm = Fqm(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("q = {0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("modulus is reducible over F_{q}")]
    NotIrreducible { q: u32 },
    #[error("modulus is irreducible but x does not generate the multiplicative group")]
    NotPrimitive,
    #[error("field order {q}^{m} exceeds the table budget of 2^24 elements")]
    TableBudgetExceeded { q: u32, m: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("value {value} is not an element of a field of order {order}")]
    FieldMismatch { value: u32, order: u32 },
    #[error("characteristic 2 has no quadratic non-residues")]
    EvenCharacteristic,
    #[error("zero has no quadratic character")]
    ZeroInput,
}

/// Arithmetic shared by both levels of the tower, so that elimination and
/// friends are written once.
pub trait FieldOps {
    type Elem: Copy + Eq + Ord + Hash + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: Self::Elem) -> Option<Self::Elem>;

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }
}

/// The prime field `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    q: u32,
}

impl PrimeField {
    pub fn new(q: u32) -> Result<Self, GfError> {
        if !poly::is_prime(q) {
            return Err(GfError::NotPrime(q));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn elem(&self, v: u32) -> Result<Fq, GfError> {
        if v < self.q {
            Ok(Fq(v))
        } else {
            Err(GfError::FieldMismatch { value: v, order: self.q })
        }
    }

    /// All elements in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.q).map(Fq)
    }

    pub fn pow(&self, a: Fq, e: u32) -> Fq {
        Fq(poly::pow_mod(a.0, e, self.q))
    }
}

impl FieldOps for PrimeField {
    type Elem = Fq;

    #[inline]
    fn zero(&self) -> Fq {
        Fq(0)
    }
    #[inline]
    fn one(&self) -> Fq {
        Fq(1)
    }
    #[inline]
    fn add(&self, a: Fq, b: Fq) -> Fq {
        let s = a.0 + b.0;
        Fq(if s >= self.q { s - self.q } else { s })
    }
    #[inline]
    fn sub(&self, a: Fq, b: Fq) -> Fq {
        Fq(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.q - b.0 })
    }
    #[inline]
    fn neg(&self, a: Fq) -> Fq {
        Fq(if a.0 == 0 { 0 } else { self.q - a.0 })
    }
    #[inline]
    fn mul(&self, a: Fq, b: Fq) -> Fq {
        Fq((u64::from(a.0) * u64::from(b.0) % u64::from(self.q)) as u32)
    }
    fn inv(&self, a: Fq) -> Option<Fq> {
        (a.0 != 0).then(|| Fq(poly::inv_mod(a.0, self.q)))
    }
}

/// Quadratic character of `gamma` in the prime field `F_q`, by Euler's criterion.
pub fn is_quadratic_residue_base(gamma: Fq, q: u32) -> Result<bool, GfError> {
    if !poly::is_prime(q) {
        return Err(GfError::NotPrime(q));
    }
    if q == 2 {
        return Err(GfError::EvenCharacteristic);
    }
    if gamma.0.is_multiple_of(q) {
        return Err(GfError::ZeroInput);
    }
    Ok(poly::pow_mod(gamma.0 % q, (q - 1) / 2, q) == 1)
}

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Frobenius steps `1 ≤ s < m` with `gcd(s, m) = 1`.
pub fn coprime_steps(m: u32) -> Vec<u32> {
    (1..m).filter(|&s| gcd(s, m) == 1).collect()
}
