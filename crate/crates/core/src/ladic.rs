//! ℓ-adic numbers at finite precision, the Iwasawa logarithm, local
//! embeddings, and logarithmic valuations.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::abelian::{AbelianField, GaloisElement};
use crate::arith;
use crate::cyclo::{CycloElement, FormalProduct};
use crate::error::{Error, Result};

/// Extra internal digits carried by series evaluations.
pub const DEFAULT_GUARD: u32 = 4;
/// Default working precision exponent.
pub const DEFAULT_PRECISION: u32 = 8;
/// Largest residue degree of an unramified local ring we are willing to build.
pub const MAX_LOCAL_DEGREE: u64 = 160;

/// An element of `Z_ℓ / ℓ^prec`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicValue {
    ell: u64,
    value: BigInt,
    prec: u32,
}

fn modulus(ell: u64, prec: u32) -> BigInt {
    arith::big_pow(ell, prec)
}

fn inv_mod_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

impl PadicValue {
    pub fn new(ell: u64, value: BigInt, prec: u32) -> Self {
        let value = value.mod_floor(&modulus(ell, prec));
        PadicValue { ell, value, prec }
    }

    pub fn from_i64(ell: u64, v: i64, prec: u32) -> Self {
        Self::new(ell, BigInt::from(v), prec)
    }

    pub fn zero(ell: u64, prec: u32) -> Self {
        Self::new(ell, BigInt::zero(), prec)
    }

    pub fn one(ell: u64, prec: u32) -> Self {
        Self::new(ell, BigInt::one(), prec)
    }

    /// `num/den` for `den` prime to `ℓ`.
    pub fn from_rational(ell: u64, num: &BigInt, den: &BigInt, prec: u32) -> Result<Self> {
        let m = modulus(ell, prec);
        let inv = inv_mod_big(den, &m).ok_or_else(|| {
            Error::InvalidInput(format!("denominator {den} is divisible by {ell}"))
        })?;
        Ok(Self::new(ell, num * inv, prec))
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Exact valuation, or `None` when the value is zero at this precision.
    pub fn valuation(&self) -> Option<u32> {
        if self.value.is_zero() {
            None
        } else {
            Some(arith::val_big(&self.value, self.ell))
        }
    }

    /// Lower bound on the valuation (the precision when zero).
    pub fn valuation_bound(&self) -> u32 {
        self.valuation().unwrap_or(self.prec)
    }

    pub fn with_precision(&self, prec: u32) -> Self {
        assert!(prec <= self.prec, "cannot raise precision");
        Self::new(self.ell, self.value.clone(), prec)
    }

    /// Symmetric representative in `(-ℓ^prec/2, ℓ^prec/2]`.
    pub fn symmetric(&self) -> BigInt {
        let m = modulus(self.ell, self.prec);
        let half = &m >> 1usize;
        if self.value > half {
            &self.value - m
        } else {
            self.value.clone()
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.ell, other.ell, "mixed primes in ℓ-adic arithmetic");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        Self::new(self.ell, &self.value + &other.value, self.prec.min(other.prec))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        Self::new(self.ell, &self.value - &other.value, self.prec.min(other.prec))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.ell, -&self.value, self.prec)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        Self::new(self.ell, &self.value * &other.value, self.prec.min(other.prec))
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        Self::new(self.ell, &self.value * n, self.prec)
    }

    /// Division; dividing by an element of valuation `k` needs the numerator
    /// to have valuation at least `k` and costs `k` digits of precision.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check(other);
        let k = other.valuation().ok_or_else(|| {
            Error::PrecisionCollapse(format!("division by zero at precision {}", other.prec))
        })?;
        let prec = self.prec.min(other.prec);
        if k >= prec {
            return Err(Error::PrecisionCollapse(format!(
                "divisor valuation {k} leaves no precision (prec {prec})"
            )));
        }
        if self.valuation_bound() < k {
            return Err(Error::InvalidInput(format!(
                "quotient is not ℓ-integral (valuations {} < {k})",
                self.valuation_bound()
            )));
        }
        let scale = arith::big_pow(self.ell, k);
        let out_prec = prec - k;
        let num = &self.value / &scale;
        let den = &other.value / &scale;
        let m = modulus(self.ell, out_prec);
        let inv = inv_mod_big(&den, &m).expect("unit part is invertible");
        Ok(Self::new(self.ell, num * inv, out_prec))
    }

    /// `(-1)^? · ℓ^{-v}`-free unit part and valuation: `x = ℓ^v · u`.
    pub fn split_unit(&self) -> Option<(u32, PadicValue)> {
        let v = self.valuation()?;
        let scale = arith::big_pow(self.ell, v);
        Some((v, Self::new(self.ell, &self.value / scale, self.prec - v)))
    }

    /// Golden-file representation `l=3 m=5 v=48`.
    pub fn to_record(&self) -> String {
        format!("l={} m={} v={}", self.ell, self.prec, self.value)
    }
}

impl fmt::Display for PadicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.value, self.ell, self.prec)
    }
}

impl fmt::Debug for PadicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_record())
    }
}

impl FromStr for PadicValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut ell = None;
        let mut prec = None;
        let mut value = None;
        for tok in s.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {tok:?}")))?;
            match k {
                "l" => ell = v.parse::<u64>().ok(),
                "m" => prec = v.parse::<u32>().ok(),
                "v" => value = v.parse::<BigInt>().ok(),
                _ => return Err(Error::Parse(format!("unknown key {k:?}"))),
            }
        }
        match (ell, prec, value) {
            (Some(l), Some(m), Some(v)) if arith::is_prime(l) => {
                if v.is_negative() || v >= modulus(l, m) {
                    return Err(Error::Parse(format!("value {v} outside [0, {l}^{m})")));
                }
                Ok(PadicValue::new(l, v, m))
            }
            _ => Err(Error::Parse(format!("malformed ℓ-adic record {s:?}"))),
        }
    }
}

/// `log(u)` for a unit `u` known modulo `ℓ^prec`, via `log(u^{ℓ-1})/(ℓ-1)`.
fn log_unit(ell: u64, u: &BigInt, prec: u32, guard: u32) -> BigInt {
    let work = prec + guard;
    let kmax = (work + 2) as u64 * 2 + 8;
    let extra = (1..=kmax).map(|k| arith::val(k, ell)).max().unwrap_or(0) + 1;
    let big_m = modulus(ell, work + extra);
    let y = u.modpow(&BigInt::from(ell - 1), &big_m);
    let z = (&y - 1u32).mod_floor(&big_m);
    let mut sum = BigInt::zero();
    let mut zk = BigInt::one();
    for k in 1..=kmax {
        zk = (&zk * &z).mod_floor(&big_m);
        let vk = arith::val(k, ell);
        // Terms with k - v(k) >= work vanish modulo ℓ^work.
        if k as i64 - vk as i64 >= work as i64 {
            continue;
        }
        let unit = k / ell.pow(vk);
        let num = &zk / arith::big_pow(ell, vk);
        let inv = inv_mod_big(&BigInt::from(unit), &big_m).expect("unit");
        let term = num * inv;
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let m = modulus(ell, prec);
    let inv = inv_mod_big(&BigInt::from(ell - 1), &m).expect("unit");
    (sum.mod_floor(&m) * inv).mod_floor(&m)
}

/// Iwasawa logarithm of an ℓ-adic number: `Log(ℓ) = 0` and `Log` kills roots
/// of unity. A value `ℓ^v u` known modulo `ℓ^P` yields `Log` modulo `ℓ^{P-v}`.
pub fn iwasawa_log(x: &PadicValue, m: u32) -> Result<PadicValue> {
    let ell = x.ell;
    if ell == 2 {
        return Err(Error::Unsupported("ℓ = 2".into()));
    }
    let (_, u) = x
        .split_unit()
        .ok_or_else(|| Error::InvalidInput("logarithm of zero".into()))?;
    let prec = m.min(u.prec);
    if prec == 0 {
        return Err(Error::PrecisionCollapse("no digits left after removing ℓ-part".into()));
    }
    Ok(PadicValue::new(ell, log_unit(ell, &u.value, prec, DEFAULT_GUARD), prec))
}

/// Iwasawa logarithm of a nonzero rational number at precision `m`.
pub fn iwasawa_log_rational(num: &BigInt, den: &BigInt, ell: u64, m: u32) -> Result<PadicValue> {
    if num.is_zero() || den.is_zero() {
        return Err(Error::InvalidInput("logarithm of zero".into()));
    }
    if ell == 2 {
        return Err(Error::Unsupported("ℓ = 2".into()));
    }
    let strip = |n: &BigInt| -> BigInt {
        let v = arith::val_big(n, ell);
        n / arith::big_pow(ell, v)
    };
    let (a, b) = (strip(num), strip(den));
    let modm = modulus(ell, m + DEFAULT_GUARD);
    let u = (a * inv_mod_big(&b, &modm).expect("unit")).mod_floor(&modm);
    Ok(PadicValue::new(ell, log_unit(ell, &u, m, DEFAULT_GUARD), m))
}

pub fn iwasawa_log_int(n: i64, ell: u64, m: u32) -> Result<PadicValue> {
    iwasawa_log_rational(&BigInt::from(n), &BigInt::one(), ell, m)
}

/// Teichmüller representative: the root of unity congruent to `x` mod `ℓ`.
pub fn teichmuller(x: &PadicValue) -> Result<PadicValue> {
    if (&x.value % BigInt::from(x.ell)).is_zero() {
        return Err(Error::InvalidInput(format!("{x} is not a unit")));
    }
    let m = modulus(x.ell, x.prec);
    let mut y = x.value.clone();
    let e = BigInt::from(x.ell);
    for _ in 0..x.prec {
        y = y.modpow(&e, &m);
    }
    Ok(PadicValue::new(x.ell, y, x.prec))
}

// Polynomials over F_p, constant term first, trimmed of leading zeros.

fn fp_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_rem(a: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dg = g.len() - 1;
    let lead_inv = arith::inv_mod(g[dg] as i128, p as i128).expect("nonzero lead") as u64;
    while r.len() > dg {
        let c = arith::mul_mod(*r.last().unwrap(), lead_inv, p);
        let shift = r.len() - 1 - dg;
        if c != 0 {
            for (j, &gj) in g.iter().enumerate() {
                r[shift + j] = (r[shift + j] + p - arith::mul_mod(c, gj, p)) % p;
            }
        }
        r.pop();
        r = fp_trim(r);
        if r.len() <= dg {
            break;
        }
    }
    fp_trim(r)
}

fn fp_mulmod(a: &[u64], b: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + arith::mul_mod(x, y, p)) % p;
        }
    }
    fp_rem(&prod, g, p)
}

fn fp_powmod_big(a: &[u64], e: &num_bigint::BigUint, g: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    for i in (0..e.bits()).rev() {
        acc = fp_mulmod(&acc, &acc, g, p);
        if e.bit(i) {
            acc = fp_mulmod(&acc, a, g, p);
        }
    }
    fp_rem(&acc, g, p)
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    fp_trim(out)
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (fp_trim(a.to_vec()), fp_trim(b.to_vec()));
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin's irreducibility test for a monic `g` over `F_p`.
fn fp_is_irreducible(g: &[u64], p: u64) -> bool {
    let d = g.len() - 1;
    let x = vec![0u64, 1];
    let frob = |k: usize| -> Vec<u64> {
        let e = num_bigint::BigUint::from(p).pow(k as u32);
        fp_powmod_big(&x, &e, g, p)
    };
    if fp_sub(&frob(d), &fp_rem(&x, g, p), p).len() > 0 {
        return false;
    }
    for (r, _) in arith::factor(d as u64) {
        let h = fp_sub(&frob(d / r as usize), &x, p);
        if fp_gcd(g, &h, p).len() != 1 {
            return false;
        }
    }
    true
}

/// Polynomial whose coefficient digits (constant first) are the base-`p`
/// digits of `n`, padded to length `len`.
fn fp_from_index(mut n: u128, p: u64, len: usize) -> Vec<u64> {
    let mut v = Vec::with_capacity(len);
    for _ in 0..len {
        v.push((n % p as u128) as u64);
        n /= p as u128;
    }
    v
}

/// Smallest monic irreducible of degree `d` mod `p`, ordered by the
/// coefficient tuple read from the top.
pub fn smallest_irreducible(p: u64, d: usize) -> Vec<u64> {
    let mut n: u128 = 0;
    loop {
        let mut g = fp_from_index(n, p, d);
        g.push(1);
        if fp_is_irreducible(&g, p) {
            return g;
        }
        n += 1;
    }
}

/// The unramified extension `Z_λ = Z_p[t]/(g)` modulo `p^prec`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnramifiedLocal {
    pub prime: u64,
    pub degree: usize,
    /// Monic modulus, constant term first, irreducible mod `p`.
    pub modulus: Vec<u64>,
    pub prec: u32,
    big_mod: BigInt,
}

pub type LocalElem = Vec<BigInt>;

impl UnramifiedLocal {
    pub fn new(prime: u64, degree: usize, prec: u32) -> Result<Self> {
        if degree as u64 > MAX_LOCAL_DEGREE {
            return Err(Error::CapExceeded(format!(
                "local residue degree {degree} at {prime} exceeds {MAX_LOCAL_DEGREE}"
            )));
        }
        let modulus = smallest_irreducible(prime, degree);
        Ok(UnramifiedLocal { prime, degree, modulus, prec, big_mod: modulus_big(prime, prec) })
    }

    pub fn one(&self) -> LocalElem {
        let mut v = vec![BigInt::zero(); self.degree];
        v[0] = BigInt::one();
        v
    }

    pub fn reduce(&self, mut v: Vec<BigInt>) -> LocalElem {
        let d = self.degree;
        for top in (d..v.len()).rev() {
            let c = std::mem::take(&mut v[top]);
            if c.is_zero() {
                continue;
            }
            for j in 0..d {
                if self.modulus[j] != 0 {
                    v[top - d + j] -= &c * self.modulus[j];
                }
            }
        }
        v.resize(d, BigInt::zero());
        v.iter().map(|c| c.mod_floor(&self.big_mod)).collect()
    }

    pub fn mul(&self, a: &LocalElem, b: &LocalElem) -> LocalElem {
        let mut prod = vec![BigInt::zero(); 2 * self.degree - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        self.reduce(prod)
    }

    pub fn pow(&self, a: &LocalElem, mut e: u64) -> LocalElem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn is_one(&self, a: &LocalElem) -> bool {
        a[0].is_one() && a[1..].iter().all(Zero::is_zero)
    }

    /// A primitive `n`-th root of unity, for `n | p^d - 1`: the Teichmüller
    /// lift of the first residue (in index order) of exact order `n`.
    pub fn root_of_unity(&self, n: u64) -> Result<LocalElem> {
        let p = self.prime;
        let q = num_bigint::BigUint::from(p).pow(self.degree as u32);
        let qm1 = &q - 1u32;
        if (&qm1 % n) != num_bigint::BigUint::zero() {
            return Err(Error::InvalidInput(format!("{n} does not divide {p}^{} - 1", self.degree)));
        }
        let cof = &qm1 / n;
        let primes: Vec<u64> = arith::factor(n).into_iter().map(|(r, _)| r).collect();
        let g = &self.modulus;
        // Constants have order dividing p - 1; skip them when that cannot suffice.
        let mut idx: u128 = if (p - 1) % n == 0 { 1 } else { p as u128 };
        let base = loop {
            let cand = fp_trim(fp_from_index(idx, p, self.degree));
            idx += 1;
            if cand.is_empty() {
                continue;
            }
            let h = fp_powmod_big(&cand, &cof, g, p);
            let ok = primes.iter().all(|&r| {
                let e = num_bigint::BigUint::from(n / r);
                fp_powmod_big(&h, &e, g, p) != vec![1u64]
            });
            if ok {
                break h;
            }
        };
        let mut w: LocalElem = (0..self.degree)
            .map(|i| BigInt::from(base.get(i).copied().unwrap_or(0)))
            .collect();
        // Newton on X^n - 1: w <- w - w (w^n - 1) / n.
        let inv_n = inv_mod_big(&BigInt::from(n), &self.big_mod).expect("n prime to p");
        let mut correct = 1u32;
        while correct < self.prec {
            let u = self.pow(&w, n);
            let mut t = u;
            t[0] -= 1;
            let corr = self.mul(&w, &t);
            w = w.iter().zip(&corr).map(|(a, c)| (a - c * &inv_n).mod_floor(&self.big_mod)).collect();
            correct *= 2;
        }
        if !self.is_one(&self.pow(&w, n)) {
            return Err(Error::TheoremViolation("root of unity lift failed".into()));
        }
        Ok(w)
    }
}

fn modulus_big(p: u64, prec: u32) -> BigInt {
    modulus(p, prec)
}

/// Image of an element under a local embedding: `num / den` with `num`
/// known modulo `p^prec` and `den` an exact integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalImage {
    pub num: PadicValue,
    pub den: BigInt,
}

impl LocalImage {
    /// Moves the prime-to-`p` part of the denominator into the numerator.
    fn normalized(num: PadicValue, den: BigInt) -> Self {
        let p = num.ell;
        let v = arith::val_big(&den, p);
        let pv = arith::big_pow(p, v);
        let unit = &den / &pv;
        let m = modulus(p, num.prec);
        let inv = inv_mod_big(&unit, &m).expect("prime-to-p part is a unit");
        LocalImage { num: num.mul_int(&inv), den: pv }
    }

    /// Exact valuation when the numerator is nonzero at precision.
    pub fn valuation(&self) -> Option<i64> {
        let v = self.num.valuation()? as i64;
        Some(v - arith::val_big(&self.den, self.num.ell) as i64)
    }
}

#[derive(Debug, Clone)]
enum EmbeddingKind {
    Rational,
    /// `√d ↦ root`.
    Quadratic { radicand: u64, root: BigInt, sqrt: CycloElement },
    /// `ζ_f ↦ powers[1]` inside an unramified local ring.
    Cyclotomic { ring: UnramifiedLocal, powers: Vec<LocalElem> },
}

/// A ring embedding `K → Q_p` for a field in which `p` splits completely.
#[derive(Debug, Clone)]
pub struct LocalEmbedding {
    pub field: AbelianField,
    pub prime: u64,
    pub prec: u32,
    kind: EmbeddingKind,
}

/// Square root of `d` in `Z_p` modulo `p^prec`, starting from the smallest
/// residue root (for `p = 2`, the root that is `1 mod 4`).
pub fn padic_sqrt(d: u64, p: u64, prec: u32) -> Result<BigInt> {
    let m = modulus(p, prec);
    let db = BigInt::from(d);
    if p == 2 {
        if d % 8 != 1 {
            return Err(Error::InvalidInput(format!("{d} is not a square in Z_2")));
        }
        let mut r = BigInt::one();
        for k in 3..=prec + 1 {
            let mk = modulus(2, k + 1);
            if !((&r * &r - &db).mod_floor(&mk)).is_zero() {
                r += modulus(2, k - 1);
            }
        }
        return Ok(r.mod_floor(&m));
    }
    let r0 = (0..p)
        .find(|&x| arith::mul_mod(x, x, p) == d % p)
        .filter(|_| d % p != 0)
        .ok_or_else(|| Error::InvalidInput(format!("{d} is not a unit square mod {p}")))?;
    let mut r = BigInt::from(r0);
    let mut correct = 1u32;
    while correct < prec {
        correct = (correct * 2).min(prec);
        let mk = modulus(p, correct);
        let inv = inv_mod_big(&(BigInt::from(2) * &r), &mk).expect("unit");
        r = (&r - (&r * &r - &db) * inv).mod_floor(&mk);
    }
    Ok(r.mod_floor(&m))
}

/// Real quadratic `√d` as an element of `Q(ζ_D)`, `D` the discriminant,
/// via the quadratic Gauss sum (which squares to `D`).
pub fn quadratic_sqrt(d: u64) -> CycloElement {
    let disc = if d % 4 == 1 { d } else { 4 * d };
    let mut cyc = vec![BigInt::zero(); disc as usize];
    for a in 1..disc {
        let k = arith::kronecker(disc as i64, a);
        if k != 0 {
            cyc[a as usize] += k;
        }
    }
    let g = CycloElement::from_cyclic(disc, cyc, BigInt::one());
    if disc == d {
        g
    } else {
        g.div_int(&BigInt::from(2))
    }
}

impl LocalEmbedding {
    fn build(field: &AbelianField, p: u64, prec: u32) -> Result<Self> {
        let kind = if field.is_rational() {
            EmbeddingKind::Rational
        } else if let Some(d) = field.quadratic_radicand() {
            EmbeddingKind::Quadratic { radicand: d, root: padic_sqrt(d, p, prec)?, sqrt: quadratic_sqrt(d) }
        } else {
            let f = field.conductor();
            let d = arith::mult_order(p % f, f);
            let ring = UnramifiedLocal::new(p, d as usize, prec)?;
            let w = ring.root_of_unity(f)?;
            let mut powers = Vec::with_capacity(f as usize);
            let mut acc = ring.one();
            for _ in 0..f {
                powers.push(acc.clone());
                acc = ring.mul(&acc, &w);
            }
            EmbeddingKind::Cyclotomic { ring, powers }
        };
        Ok(LocalEmbedding { field: field.clone(), prime: p, prec, kind })
    }

    /// Image of `y ∈ K` (given in any `Q(ζ_g)` with `f_K | g`).
    pub fn apply(&self, y: &CycloElement) -> Result<LocalImage> {
        let p = self.prime;
        match &self.kind {
            EmbeddingKind::Rational => {
                let (n, d) = y
                    .descend(1)
                    .map_err(|_| Error::InvalidInput("element is not rational".into()))?
                    .as_rational()
                    .expect("conductor 1");
                Ok(LocalImage::normalized(PadicValue::new(p, n, self.prec), d))
            }
            EmbeddingKind::Quadratic { radicand, root, sqrt } => {
                // y = a + b√d with a = Tr(y)/φ, b = Tr(y√d)/(φ d).
                let g = arith::lcm(y.conductor(), sqrt.conductor());
                let phi = BigInt::from(arith::euler_phi(g));
                let (t0n, t0d) = y.absolute_trace();
                let (t1n, t1d) = (y * sqrt).absolute_trace();
                let d = BigInt::from(*radicand);
                let reduce = |n: BigInt, e: BigInt| {
                    let g = n.gcd(&e);
                    if g.is_zero() { (n, BigInt::one()) } else { (n / &g, e / &g) }
                };
                let (an, ad) = reduce(t0n, t0d * &phi);
                let (bn, bd) = reduce(t1n, t1d * &phi * &d);
                let num = &an * &bd + &bn * &ad * root;
                let den = ad * bd;
                Ok(LocalImage::normalized(PadicValue::new(p, num, self.prec), den))
            }
            EmbeddingKind::Cyclotomic { ring, powers } => {
                let f = self.field.conductor();
                let z = y.descend(f)?;
                let mut acc = vec![BigInt::zero(); ring.degree];
                for (i, c) in z.numerator().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for (a, w) in acc.iter_mut().zip(&powers[i]) {
                        *a += c * w;
                    }
                }
                let acc = ring.reduce(acc);
                if acc[1..].iter().any(|c| !c.is_zero()) {
                    return Err(Error::InvalidInput(format!(
                        "image does not lie in Z_{p}: element is not in {}",
                        self.field
                    )));
                }
                Ok(LocalImage::normalized(
                    PadicValue::new(p, acc[0].clone(), self.prec),
                    z.denominator().clone(),
                ))
            }
        }
    }
}

type EmbeddingKey = (AbelianField, u64, u32);

fn embedding_cache() -> &'static Mutex<HashMap<EmbeddingKey, Arc<LocalEmbedding>>> {
    static CACHE: OnceLock<Mutex<HashMap<EmbeddingKey, Arc<LocalEmbedding>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached_embedding(field: &AbelianField, p: u64, prec: u32) -> Result<Arc<LocalEmbedding>> {
    let key = (field.clone(), p, prec);
    if let Some(e) = embedding_cache().lock().unwrap().get(&key) {
        return Ok(e.clone());
    }
    let e = Arc::new(LocalEmbedding::build(field, p, prec)?);
    embedding_cache().lock().unwrap().insert(key, e.clone());
    Ok(e)
}

/// An embedding of `K` into `Q_ℓ` modulo `ℓ^m`, for `ℓ` totally split in `K`.
pub fn hensel_embed(field: &AbelianField, ell: u64, m: u32) -> Result<Arc<LocalEmbedding>> {
    if field.conductor() % ell == 0 && !field.is_rational() {
        return Err(Error::Ramified(format!("{ell} ramifies in {field}")));
    }
    if !field.is_rational() && field.decomposition_data(ell).subgroup.len() != 1 {
        return Err(Error::InvalidInput(format!("{ell} is not totally split in {field}")));
    }
    cached_embedding(field, ell, m)
}

/// A finite place of an abelian field: the conjugate `τ(𝔭_0)` of the place
/// `𝔭_0` singled out by the canonical embedding of the decomposition field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Place {
    pub prime: u64,
    pub index: usize,
    pub rep: GaloisElement,
    pub ramification: usize,
    pub residue_degree: usize,
}

impl Place {
    pub fn label(&self) -> String {
        format!("{}.{}", self.prime, self.index)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Places above `p`, ordered by the smallest Galois index in each coset of
/// the decomposition group.
pub fn places_above(field: &AbelianField, p: u64) -> Vec<Place> {
    let dec = field.decomposition_data(p);
    let mut seen = vec![false; field.degree()];
    let mut out = Vec::new();
    for tau in field.galois_group() {
        if seen[tau.index] {
            continue;
        }
        for &d in &dec.subgroup {
            seen[field.mul(tau, d).index] = true;
        }
        out.push(Place {
            prime: p,
            index: out.len(),
            rep: tau,
            ramification: dec.ramification_index,
            residue_degree: dec.residue_degree,
        });
    }
    out
}

/// `σ(τ𝔭_0) = (στ)𝔭_0`, identified among the places above the same prime.
pub fn conjugate_place(field: &AbelianField, place: &Place, sigma: GaloisElement) -> Place {
    let target = field.mul(sigma, place.rep);
    let dec = field.decomposition_data(place.prime);
    places_above(field, place.prime)
        .into_iter()
        .find(|pl| dec.subgroup.iter().any(|&d| field.mul(pl.rep, d) == target))
        .expect("conjugate place exists")
}

/// `N_{F_𝔭/Q_p}(x)` modulo `p^prec`.
pub fn local_norm(field: &AbelianField, x: &CycloElement, place: &Place, prec: u32) -> Result<LocalImage> {
    let dec = field.decomposition_data(place.prime);
    let tau_inv = field.inv(place.rep);
    let mut y = CycloElement::one(x.conductor());
    for &d in &dec.subgroup {
        y = &y * &x.act(field.mul(d, tau_inv), field);
        y.check_size()?;
    }
    cached_embedding(&dec.fixed_field, place.prime, prec)?.apply(&y)
}

/// Local norm at a precision high enough to see its exact valuation.
fn local_norm_exact(field: &AbelianField, x: &CycloElement, place: &Place, want: u32) -> Result<(LocalImage, i64)> {
    let mut prec = want + 8;
    for _ in 0..12 {
        let img = local_norm(field, x, place, prec)?;
        if let Some(v) = img.valuation() {
            let vn = img.num.valuation().unwrap();
            if prec - vn >= want {
                return Ok((img, v));
            }
            prec = vn + want + 2;
            continue;
        }
        prec *= 2;
    }
    Err(Error::PrecisionCollapse(format!("local norm at {place} vanishes to high precision")))
}

/// Ordinary normalized valuation `ν_𝔭(x)`.
pub fn valuation(field: &AbelianField, x: &CycloElement, place: &Place) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::InvalidInput("valuation of zero".into()));
    }
    let (_, v) = local_norm_exact(field, x, place, 1)?;
    let f = place.residue_degree as i64;
    if v % f != 0 {
        return Err(Error::TheoremViolation(format!(
            "local norm valuation {v} at {place} is not a multiple of the residue degree {f}"
        )));
    }
    Ok(v / f)
}

/// Exponent `n` with `Log(N(F_λ^×)) = ℓ^{n+1} Z_ℓ`: the degree over `Q_ℓ`
/// of the intersection of `F_λ` with the cyclotomic `Z_ℓ`-extension.
pub fn cyclotomic_local_exponent(field: &AbelianField, ell: u64) -> u32 {
    let f = field.conductor();
    let a = arith::val(f, ell);
    if a <= 1 {
        return 0;
    }
    let la = ell.pow(a);
    let rest = f / la;
    // Decomposition group of ℓ in Q(ζ_f): residues whose prime-to-ℓ part is a power of ℓ.
    let frob_powers: Vec<u64> = if rest == 1 {
        vec![0]
    } else {
        let mut v = Vec::new();
        let mut x = 1 % rest;
        loop {
            v.push(x);
            x = arith::mul_mod(x, ell, rest);
            if x == 1 % rest {
                break;
            }
        }
        v
    };
    let mut n = a - 1;
    for &h in field.fixing_subgroup() {
        if rest > 1 && !frob_powers.contains(&(h % rest)) {
            continue;
        }
        let t = arith::pow_mod(h % la, ell - 1, la);
        let v = if t == 1 { a } else { arith::val((t + la - 1) % la, ell) };
        n = n.min(v.saturating_sub(1));
    }
    n
}

/// Exponent `j` with `Log(N(O_λ^×)) = ℓ^{j+1} Z_ℓ` for `λ | ℓ`.
pub fn unit_norm_exponent(field: &AbelianField, ell: u64) -> u32 {
    let f = field.conductor();
    let a = arith::val(f, ell);
    if a <= 1 {
        return 0;
    }
    let la = ell.pow(a);
    let rest = f / la;
    let mut j = a - 1;
    for &h in field.fixing_subgroup() {
        if h % rest != 1 % rest {
            continue;
        }
        let t = arith::pow_mod(h % la, ell - 1, la);
        let v = if t == 1 { a } else { arith::val((t + la - 1) % la, ell) };
        j = j.min(v.saturating_sub(1));
    }
    j
}

/// `deg 𝔭` at precision `m`: `f_𝔭 Log(p)` away from `ℓ`, and at `λ | ℓ` the
/// canonical generator `ℓ^n Log(1+ℓ)` of the Log-image of local norms
/// (defined up to a unit of `Z_ℓ`).
pub fn place_degree(field: &AbelianField, place: &Place, ell: u64, m: u32) -> Result<PadicValue> {
    if place.prime == ell {
        let n = cyclotomic_local_exponent(field, ell);
        let base = iwasawa_log_int(1 + ell as i64, ell, m)?;
        return Ok(base.mul_int(&arith::big_pow(ell, n)));
    }
    let lg = iwasawa_log_int(place.prime as i64, ell, m)?;
    let deg = lg.mul_int(&BigInt::from(place.residue_degree));
    if deg.is_zero() {
        return Err(Error::PrecisionCollapse(format!("deg {place} vanishes modulo {ell}^{m}")));
    }
    Ok(deg)
}

/// `ν̃_λ(x) = -Log(N_{F_λ/Q_ℓ}(x)) / deg λ` for `λ | ℓ`; the ordinary
/// valuation elsewhere (as an ℓ-adic number).
pub fn log_valuation(field: &AbelianField, x: &CycloElement, place: &Place, ell: u64, m: u32) -> Result<PadicValue> {
    if x.is_zero() {
        return Err(Error::InvalidInput("logarithmic valuation of zero".into()));
    }
    if place.prime != ell {
        return Ok(PadicValue::from_i64(ell, valuation(field, x, place)?, m));
    }
    let deg = place_degree(field, place, ell, m + 4)?;
    let lost = deg.valuation().expect("degree is nonzero");
    let want = m + lost;
    let (img, _) = local_norm_exact(field, x, place, want)?;
    let lnum = iwasawa_log(&img.num, want)?;
    let lden = iwasawa_log_rational(&img.den, &BigInt::one(), ell, want)?;
    let lg = lnum.sub(&lden);
    let q = lg.neg().div(&deg.with_precision(want.min(deg.precision())))?;
    if q.precision() < m {
        return Err(Error::PrecisionCollapse(format!(
            "ν̃ at {place} known only to {} digits",
            q.precision()
        )));
    }
    Ok(q.with_precision(m))
}

/// Logarithmic divisor: integer coefficients away from `ℓ`, ℓ-adic ones at
/// the places above `ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogDivisor {
    pub ell: u64,
    pub prec: u32,
    pub finite: Vec<(Place, i64)>,
    pub at_ell: Vec<(Place, PadicValue)>,
}

impl LogDivisor {
    pub fn zero(ell: u64, prec: u32) -> Self {
        LogDivisor { ell, prec, finite: Vec::new(), at_ell: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.at_ell.iter().all(|(_, c)| c.is_zero())
    }

    pub fn degree(&self, field: &AbelianField) -> Result<PadicValue> {
        let mut acc = PadicValue::zero(self.ell, self.prec);
        for (pl, c) in &self.finite {
            let d = place_degree(field, pl, self.ell, self.prec)?;
            acc = acc.add(&d.mul_int(&BigInt::from(*c)));
        }
        for (pl, c) in &self.at_ell {
            acc = acc.add(&c.mul(&place_degree(field, pl, self.ell, self.prec)?));
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, 1)
    }

    /// `self + k·other`.
    pub fn add_scaled(&self, other: &Self, k: i64) -> Self {
        let mut out = self.clone();
        out.prec = self.prec.min(other.prec);
        for (pl, c) in &other.finite {
            match out.finite.iter_mut().find(|(q, _)| q == pl) {
                Some((_, d)) => *d += k * c,
                None => out.finite.push((pl.clone(), k * c)),
            }
        }
        let kb = BigInt::from(k);
        for (pl, c) in &other.at_ell {
            match out.at_ell.iter_mut().find(|(q, _)| q == pl) {
                Some((_, d)) => *d = d.add(&c.mul_int(&kb)),
                None => out.at_ell.push((pl.clone(), c.mul_int(&kb))),
            }
        }
        out.finite.retain(|(_, c)| *c != 0);
        out.finite.sort();
        out.at_ell.sort_by(|a, b| a.0.cmp(&b.0));
        for (_, c) in out.at_ell.iter_mut() {
            *c = c.with_precision(out.prec.min(c.precision()));
        }
        out
    }

    pub fn coefficient(&self, place: &Place) -> PadicValue {
        if let Some((_, c)) = self.finite.iter().find(|(q, _)| q == place) {
            return PadicValue::from_i64(self.ell, *c, self.prec);
        }
        if let Some((_, c)) = self.at_ell.iter().find(|(q, _)| q == place) {
            return c.clone();
        }
        PadicValue::zero(self.ell, self.prec)
    }
}

/// Default trial-division bound for factoring norms beyond 64 bits.
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

/// Rational primes dividing the absolute norm of `x`.
pub fn norm_support(field: &AbelianField, x: &CycloElement, bound: u64) -> Result<Vec<u64>> {
    let n = x.relative_norm(field, &AbelianField::rationals())?;
    let (num, den) = n
        .descend(1)
        .ok()
        .and_then(|r| r.as_rational())
        .ok_or_else(|| Error::InvalidInput(format!("element is not in {field}")))?;
    if num.is_zero() {
        return Err(Error::InvalidInput("log divisor of zero".into()));
    }
    let mut primes: Vec<u64> = arith::factor_big(&num, bound)?.into_iter().map(|(p, _)| p).collect();
    primes.extend(arith::factor_big(&den, bound)?.into_iter().map(|(p, _)| p));
    primes.sort_unstable();
    primes.dedup();
    Ok(primes)
}

/// `d̃iv(x)` when the support of `x` away from `ℓ` is known to lie above `primes`.
pub fn log_divisor_on(field: &AbelianField, x: &CycloElement, ell: u64, m: u32, primes: &[u64]) -> Result<LogDivisor> {
    let mut out = LogDivisor::zero(ell, m);
    for &p in primes {
        if p == ell {
            continue;
        }
        for pl in places_above(field, p) {
            let v = valuation(field, x, &pl)?;
            if v != 0 {
                out.finite.push((pl, v));
            }
        }
    }
    for pl in places_above(field, ell) {
        let v = log_valuation(field, x, &pl, ell, m)?;
        out.at_ell.push((pl, v));
    }
    Ok(out)
}

/// `d̃iv(x)` for a nonzero element of `F`.
pub fn log_divisor(field: &AbelianField, x: &CycloElement, ell: u64, m: u32) -> Result<LogDivisor> {
    let mut out = LogDivisor::zero(ell, m);
    for p in norm_support(field, x, DEFAULT_FACTOR_BOUND)? {
        if p == ell {
            continue;
        }
        for pl in places_above(field, p) {
            let v = valuation(field, x, &pl)?;
            if v != 0 {
                out.finite.push((pl, v));
            }
        }
    }
    for pl in places_above(field, ell) {
        let v = log_valuation(field, x, &pl, ell, m)?;
        out.at_ell.push((pl, v));
    }
    Ok(out)
}

/// `d̃iv` of a formal product, by linearity.
pub fn log_divisor_product(field: &AbelianField, x: &FormalProduct, ell: u64, m: u32) -> Result<LogDivisor> {
    let mut out = LogDivisor::zero(ell, m);
    for (b, e) in &x.simplified().terms {
        out = out.add_scaled(&log_divisor(field, b, ell, m)?, *e);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: the log series summed with exact rationals.
    fn log_series_oracle(x: i64, ell: u64, m: u32) -> BigInt {
        let z = BigInt::from(x - 1);
        let big_m = modulus(ell, m);
        let (mut num, mut den) = (BigInt::zero(), BigInt::one());
        for k in 1..(4 * m as i64 + 10) {
            let t = num_traits::pow(z.clone(), k as usize);
            let sign = if k % 2 == 1 { 1 } else { -1 };
            num = num * k + sign * t * &den;
            den *= k;
            let g = num.gcd(&den);
            num /= &g;
            den /= &g;
        }
        (num * inv_mod_big(&den, &big_m).unwrap()).mod_floor(&big_m)
    }

    fn el(f: u64, v: &[i64]) -> CycloElement {
        CycloElement::from_i64s(f, v, 1).unwrap()
    }

    fn sqrt2() -> CycloElement {
        el(8, &[0, 1, 0, -1])
    }

    #[test]
    fn iwasawa_log_examples() {
        assert!(iwasawa_log_int(3, 3, 5).unwrap().is_zero());
        assert!(iwasawa_log_int(-1, 3, 5).unwrap().is_zero());
        let l4 = iwasawa_log_int(4, 3, 5).unwrap();
        assert_eq!(l4.to_record(), "l=3 m=5 v=48");
        assert_eq!(l4.value(), &log_series_oracle(4, 3, 5));
        assert_eq!(iwasawa_log_int(7, 3, 6).unwrap().value(), &log_series_oracle(7, 3, 6));
        assert_eq!(iwasawa_log_int(11, 5, 4).unwrap().value(), &log_series_oracle(11, 5, 4));
        // Log(2) = Log(4)/2 and Log(12) = Log(4).
        let l2 = iwasawa_log_int(2, 3, 5).unwrap();
        assert_eq!(l2.add(&l2), l4);
        assert_eq!(iwasawa_log_int(12, 3, 5).unwrap(), l4);
        assert!(iwasawa_log_int(0, 3, 5).is_err());
    }

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller(&PadicValue::from_i64(3, 1, 4)).unwrap(), PadicValue::from_i64(3, 1, 4));
        assert_eq!(teichmuller(&PadicValue::from_i64(3, 2, 4)).unwrap(), PadicValue::from_i64(3, -1, 4));
        let w = teichmuller(&PadicValue::from_i64(3, 5, 3)).unwrap();
        assert_eq!(w.value(), &BigInt::from(26));
        // Fixed-point oracle: w^3 = w.
        assert_eq!(w.mul(&w).mul(&w), w);
        let w7 = teichmuller(&PadicValue::from_i64(7, 3, 5)).unwrap();
        let mut p = PadicValue::one(7, 5);
        for _ in 0..6 {
            p = p.mul(&w7);
        }
        assert_eq!(p, PadicValue::one(7, 5));
        assert!(teichmuller(&PadicValue::from_i64(3, 6, 4)).is_err());
    }

    #[test]
    fn padic_arithmetic_and_record() {
        let a = PadicValue::from_i64(3, 18, 5);
        let b = PadicValue::from_i64(3, 9, 5);
        let q = a.div(&b).unwrap();
        assert_eq!(q, PadicValue::from_i64(3, 2, 3));
        assert_eq!(b.div(&a).unwrap(), PadicValue::from_i64(3, 2, 3).div(&PadicValue::from_i64(3, 4, 3)).unwrap());
        assert!(PadicValue::from_i64(3, 3, 5).div(&b).is_err());
        let r: PadicValue = "l=3 m=5 v=48".parse().unwrap();
        assert_eq!(r.to_record(), "l=3 m=5 v=48");
        assert!("l=3 m=2 v=48".parse::<PadicValue>().is_err());
    }

    #[test]
    fn hensel_embedding_examples() {
        let q13 = AbelianField::quadratic(13).unwrap();
        let e = hensel_embed(&q13, 3, 2).unwrap();
        let img = e.apply(&quadratic_sqrt(13)).unwrap();
        assert_eq!(img.den, BigInt::one());
        assert_eq!(img.num.value(), &BigInt::from(7));
        let q2 = AbelianField::quadratic(2).unwrap();
        let img = hensel_embed(&q2, 7, 2).unwrap().apply(&sqrt2()).unwrap();
        assert_eq!((img.num.value(), &img.den), (&BigInt::from(10), &BigInt::one()));
        let q = AbelianField::rationals();
        let img = hensel_embed(&q, 5, 3).unwrap().apply(&CycloElement::from_int(1, 7)).unwrap();
        assert_eq!(img.num.value(), &BigInt::from(7));
        assert!(hensel_embed(&q2, 3, 2).is_err());
        assert!(hensel_embed(&q13, 13, 2).is_err());
    }

    #[test]
    fn cyclotomic_embedding_is_a_ring_homomorphism() {
        // Cubic field of conductor 7; 13 ≡ -1 mod 7 splits completely.
        let k = AbelianField::from_subgroup(7, &[6]).unwrap();
        let e = hensel_embed(&k, 13, 6).unwrap();
        let t = el(7, &[0, 1, 0, 0, 0, 0]);
        let theta = &t + &t.galois(6);
        let theta2 = &theta * &theta;
        let a = e.apply(&theta).unwrap().num;
        let b = e.apply(&theta2).unwrap().num;
        assert_eq!(a.mul(&a), b);
        // θ = 2cos(2π/7) satisfies x^3 + x^2 - 2x - 1 = 0.
        let one = PadicValue::one(13, 6);
        let lhs = a.mul(&b).add(&b).sub(&a.add(&a)).sub(&one);
        assert!(lhs.is_zero());
    }

    #[test]
    fn place_degree_examples() {
        let q5 = AbelianField::quadratic(5).unwrap();
        let pl = places_above(&q5, 2);
        assert_eq!(pl.len(), 1);
        assert_eq!(place_degree(&q5, &pl[0], 3, 5).unwrap().value(), &BigInt::from(48));
        let q13 = AbelianField::quadratic(13).unwrap();
        let pl = places_above(&q13, 13);
        assert_eq!(place_degree(&q13, &pl[0], 3, 6).unwrap(), iwasawa_log_int(13, 3, 6).unwrap());
        let q = AbelianField::rationals();
        let pl = places_above(&q, 3);
        let d = place_degree(&q, &pl[0], 3, 6).unwrap();
        assert_eq!(d, iwasawa_log_int(4, 3, 6).unwrap());
        assert_eq!(d.valuation(), Some(1));
        let f9 = AbelianField::from_subgroup(9, &[8]).unwrap();
        assert_eq!(cyclotomic_local_exponent(&f9, 3), 1);
        assert_eq!(cyclotomic_local_exponent(&q13, 3), 0);
    }

    #[test]
    fn log_valuation_examples() {
        let q2 = AbelianField::quadratic(2).unwrap();
        let x = &CycloElement::from_int(8, 2) - &sqrt2();
        let above2 = places_above(&q2, 2);
        assert_eq!(log_valuation(&q2, &x, &above2[0], 3, 6).unwrap(), PadicValue::one(3, 6));
        let y = &CycloElement::from_int(8, 3) - &sqrt2().scale(&BigInt::from(2));
        let above3 = places_above(&q2, 3);
        assert!(log_valuation(&q2, &y, &above3[0], 3, 6).unwrap().is_zero());
        let f9 = AbelianField::from_subgroup(9, &[8]).unwrap();
        let eta = crate::cyclo::eta(&f9).unwrap();
        let lam = places_above(&f9, 3);
        assert!(log_valuation(&f9, &eta, &lam[0], 3, 6).unwrap().is_zero());
        // ν̃(2) = -1/2 is a unit at the totally ramified place.
        let two = CycloElement::from_int(9, 2);
        assert_eq!(log_valuation(&f9, &two, &lam[0], 3, 6).unwrap().valuation(), Some(0));
    }

    #[test]
    fn log_divisor_product_formula() {
        let q5 = AbelianField::quadratic(5).unwrap();
        assert!(log_divisor(&q5, &CycloElement::one(5), 3, 6).unwrap().is_empty());
        let q2 = AbelianField::quadratic(2).unwrap();
        let x = &CycloElement::from_int(8, 2) - &sqrt2();
        let d = log_divisor(&q2, &x, 3, 6).unwrap();
        assert_eq!(d.finite.len(), 1);
        assert_eq!(d.finite[0].1, 1);
        assert!(d.degree(&q2).unwrap().is_zero());
        let q13 = AbelianField::quadratic(13).unwrap();
        let s = quadratic_sqrt(13);
        let pi = (&CycloElement::one(13) + &s).div_int(&BigInt::from(2));
        let d = log_divisor(&q13, &pi, 3, 6).unwrap();
        assert!(d.finite.is_empty());
        assert_eq!(d.at_ell.len(), 2);
        assert!(d.degree(&q13).unwrap().is_zero());
        assert!(d.at_ell.iter().any(|(_, c)| !c.is_zero()));
    }

    #[test]
    fn log_valuation_is_galois_equivariant() {
        let k = AbelianField::from_subgroup(7, &[6]).unwrap();
        let x = &el(7, &[5, 1, 0, 0, 0, 0]) + &el(7, &[0, 0, 0, 0, 0, 1]);
        let x = x.relative_norm(&AbelianField::from_subgroup_reduced(7, &[1]), &k).unwrap();
        for p in [13u64, 2, 7] {
            let places = places_above(&k, p);
            for sigma in k.galois_group() {
                let xs = x.act(sigma, &k);
                for pl in &places {
                    // σ(τ𝔭_0) is the place whose representative lies in the coset of στ.
                    let target = k.mul(sigma, pl.rep);
                    let image = places
                        .iter()
                        .find(|q| {
                            let dec = k.decomposition_data(p);
                            dec.subgroup.iter().any(|&d| k.mul(q.rep, d) == target)
                        })
                        .unwrap();
                    assert_eq!(
                        log_valuation(&k, &xs, image, 13, 5).unwrap(),
                        log_valuation(&k, &x, pl, 13, 5).unwrap()
                    );
                }
            }
        }
    }
}
