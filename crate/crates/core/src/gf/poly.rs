//! Dense polynomials over a prime field, used only to validate moduli.
//!
//! Coefficients are stored constant term first and kept reduced mod `q`.

pub(crate) type Poly = Vec<u32>;

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
    if p.is_empty() {
        p.push(0);
    }
    p
}

fn is_zero(p: &[u32]) -> bool {
    p.iter().all(|&c| c == 0)
}

fn degree(p: &[u32]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

pub(crate) fn inv_mod(a: u32, q: u32) -> u32 {
    pow_mod(a, q - 2, q)
}

pub(crate) fn pow_mod(base: u32, mut exp: u32, q: u32) -> u32 {
    let q64 = u64::from(q);
    let mut b = u64::from(base) % q64;
    let mut acc = 1u64 % q64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % q64;
        }
        b = b * b % q64;
        exp >>= 1;
    }
    acc as u32
}

/// Remainder of `a` divided by `f` (f non-zero).
pub(crate) fn rem(a: &[u32], f: &[u32], q: u32) -> Poly {
    let df = degree(f).expect("division by zero polynomial");
    let lead_inv = u64::from(inv_mod(f[df], q));
    let q64 = u64::from(q);
    let mut r: Vec<u32> = a.to_vec();
    while let Some(dr) = degree(&r) {
        if dr < df {
            break;
        }
        let c = u64::from(r[dr]) * lead_inv % q64;
        let shift = dr - df;
        for (i, &fc) in f.iter().enumerate().take(df + 1) {
            let sub = c * u64::from(fc) % q64;
            r[shift + i] = ((u64::from(r[shift + i]) + q64 - sub) % q64) as u32;
        }
    }
    trim(r)
}

pub(crate) fn mul_mod(a: &[u32], b: &[u32], f: &[u32], q: u32) -> Poly {
    let q64 = u64::from(q);
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + u64::from(x) * u64::from(y)) % q64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
    rem(&prod, f, q)
}

pub(crate) fn pow_poly_mod(base: &[u32], mut exp: u64, f: &[u32], q: u32) -> Poly {
    let mut acc = rem(&[1], f, q);
    let mut b = rem(base, f, q);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(&acc, &b, f, q);
        }
        b = mul_mod(&b, &b, f, q);
        exp >>= 1;
    }
    acc
}

fn sub(a: &[u32], b: &[u32], q: u32) -> Poly {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + q - y) % q
        })
        .collect();
    trim(out)
}

fn gcd(a: &[u32], b: &[u32], q: u32) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !is_zero(&b) {
        let r = rem(&a, &b, q);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or irreducibility test for a monic `f` of degree `m >= 1`.
pub(crate) fn is_irreducible(f: &[u32], q: u32) -> bool {
    let m = degree(f).unwrap_or(0);
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let x: Poly = vec![0, 1];
    let mut h = x.clone();
    for _ in 1..=m / 2 {
        h = pow_poly_mod(&h, u64::from(q), f, q);
        let g = gcd(f, &sub(&h, &x, q), q);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Distinct prime factors by trial division.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let n = u64::from(n);
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Whether the class of `x` generates the multiplicative group of `F_q[x]/(f)`.
/// Assumes `f` irreducible of degree `m`.
pub(crate) fn x_is_primitive(f: &[u32], q: u32, m: u32) -> bool {
    let order = u64::from(q).pow(m) - 1;
    let x: Poly = vec![0, 1];
    let one = rem(&[1], f, q);
    if pow_poly_mod(&x, order, f, q) != one {
        return false;
    }
    prime_factors(order).into_iter().all(|p| pow_poly_mod(&x, order / p, f, q) != one)
}
