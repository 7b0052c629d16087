//! Exact arithmetic in `Q(ζ_f)` and the circular elements `η_K`.
//!
//! Elements are integer vectors on the power basis `1, ζ, …, ζ^{φ(f)-1}`
//! (reduced modulo `Φ_f`) over a single positive denominator. Galois action
//! and products with `1 - ζ^a` are done on the cyclic representation modulo
//! `x^f - 1` and reduced afterwards.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::abelian::{AbelianField, GaloisElement};
use crate::arith;
use crate::error::{Error, Result};

/// Coefficient growth guard: abort once any coefficient passes this many bits
/// (about a million decimal digits).
pub const MAX_COEFF_BITS: u64 = 3_321_929;

fn phi_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached coefficients of `Φ_f`, constant term first.
pub fn cyclotomic(f: u64) -> Arc<Vec<i64>> {
    if let Some(p) = phi_cache().lock().unwrap().get(&f) {
        return p.clone();
    }
    let p = Arc::new(arith::cyclotomic_poly(f));
    phi_cache().lock().unwrap().insert(f, p.clone());
    p
}

/// Trace of `ζ_f^k` from `Q(ζ_f)` to `Q` (Ramanujan sum `c_f(k)`).
pub fn trace_zeta_power(f: u64, k: i64) -> i64 {
    arith::factor(f)
        .into_iter()
        .map(|(p, a)| arith::ramanujan_prime_power(p, a, k))
        .product()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloElement {
    conductor: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycloElement {
    fn dim(f: u64) -> usize {
        cyclotomic(f).len() - 1
    }

    pub fn zero(f: u64) -> Self {
        CycloElement { conductor: f, num: vec![BigInt::zero(); Self::dim(f)], den: BigInt::one() }
    }

    pub fn from_int(f: u64, n: i64) -> Self {
        let mut x = Self::zero(f);
        x.num[0] = BigInt::from(n);
        x
    }

    pub fn one(f: u64) -> Self {
        Self::from_int(f, 1)
    }

    /// `ζ_f^k`.
    pub fn zeta_power(f: u64, k: i64) -> Self {
        let mut cyc = vec![BigInt::zero(); f as usize];
        cyc[k.rem_euclid(f as i64) as usize] = BigInt::one();
        Self::from_cyclic(f, cyc, BigInt::one())
    }

    /// Builds from coordinates on the power basis (length at most `φ(f)`).
    pub fn new(f: u64, num: Vec<BigInt>, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let n = Self::dim(f);
        if num.len() > n {
            return Err(Error::InvalidInput(format!(
                "{} coordinates given, Q(ζ_{f}) has dimension {n}",
                num.len()
            )));
        }
        let mut v = num;
        v.resize(n, BigInt::zero());
        let mut x = CycloElement { conductor: f, num: v, den };
        x.normalize();
        Ok(x)
    }

    pub fn from_i64s(f: u64, num: &[i64], den: i64) -> Result<Self> {
        Self::new(f, num.iter().map(|&c| BigInt::from(c)).collect(), BigInt::from(den))
    }

    /// Reduces a vector indexed by exponents mod `f` (i.e. modulo `x^f - 1`).
    pub fn from_cyclic(f: u64, cyc: Vec<BigInt>, den: BigInt) -> Self {
        let num = reduce_mod_phi(f, cyc);
        let mut x = CycloElement { conductor: f, num, den };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -self.den.clone();
            for c in self.num.iter_mut() {
                *c = -c.clone();
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() && !g.is_zero() {
            for c in self.num.iter_mut() {
                *c /= &g;
            }
            self.den /= &g;
        }
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
        }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn numerator(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// `Some(q)` when the element is the rational number `q = num/den`.
    pub fn as_rational(&self) -> Option<(BigInt, BigInt)> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some((self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn max_bits(&self) -> u64 {
        self.num.iter().map(|c| c.bits()).max().unwrap_or(0).max(self.den.bits())
    }

    /// Fails loudly once coefficients pass the size guard.
    pub fn check_size(&self) -> Result<()> {
        if self.max_bits() > MAX_COEFF_BITS {
            return Err(Error::CapExceeded(format!(
                "coefficient size {} bits exceeds guard",
                self.max_bits()
            )));
        }
        Ok(())
    }

    fn to_cyclic(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.conductor as usize];
        for (i, c) in self.num.iter().enumerate() {
            v[i % self.conductor as usize] += c;
        }
        v
    }

    /// Same element viewed in `Q(ζ_g)` for a multiple `g` of the conductor.
    pub fn lift(&self, g: u64) -> Self {
        assert!(g % self.conductor == 0, "lift target must be a multiple of the conductor");
        if g == self.conductor {
            return self.clone();
        }
        let step = (g / self.conductor) as usize;
        let mut cyc = vec![BigInt::zero(); g as usize];
        for (i, c) in self.num.iter().enumerate() {
            cyc[(i * step) % g as usize] += c;
        }
        Self::from_cyclic(g, cyc, self.den.clone())
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.conductor == b.conductor {
            return (a.clone(), b.clone());
        }
        let g = arith::lcm(a.conductor, b.conductor);
        (a.lift(g), b.lift(g))
    }

    /// `ζ ↦ ζ^a` for `a` prime to the conductor.
    pub fn galois(&self, a: u64) -> Self {
        let f = self.conductor;
        if f == 1 {
            return self.clone();
        }
        assert!(arith::gcd(a % f, f) == 1, "{a} is not a unit mod {f}");
        let mut cyc = vec![BigInt::zero(); f as usize];
        for (i, c) in self.num.iter().enumerate() {
            cyc[arith::mul_mod(i as u64, a, f) as usize] += c;
        }
        Self::from_cyclic(f, cyc, self.den.clone())
    }

    /// Action of a Galois element of some field whose conductor divides... or
    /// is divided by ours; the residue is lifted prime to our conductor.
    pub fn act(&self, sigma: GaloisElement, field: &AbelianField) -> Self {
        let a = lift_residue(sigma.residue, field.conductor(), self.conductor);
        self.galois(a)
    }

    /// Multiplies by `1 - ζ^k`.
    pub fn mul_one_minus_zeta(&self, k: u64) -> Self {
        let f = self.conductor as usize;
        let cyc = self.to_cyclic();
        let k = k as usize % f;
        let mut out = cyc.clone();
        for i in 0..f {
            out[(i + k) % f] -= &cyc[i];
        }
        Self::from_cyclic(self.conductor, out, self.den.clone())
    }

    pub fn scale(&self, n: &BigInt) -> Self {
        let mut x = self.clone();
        for c in x.num.iter_mut() {
            *c *= n;
        }
        x.normalize();
        x
    }

    pub fn div_int(&self, n: &BigInt) -> Self {
        let mut x = self.clone();
        x.den *= n;
        x.normalize();
        x
    }

    /// Trace from `Q(ζ_f)` to `Q`, as a reduced fraction.
    pub fn absolute_trace(&self) -> (BigInt, BigInt) {
        let f = self.conductor;
        let mut t = BigInt::zero();
        for (i, c) in self.num.iter().enumerate() {
            let tr = trace_zeta_power(f, i as i64);
            if tr != 0 {
                t += c * tr;
            }
        }
        reduce_fraction(t, self.den.clone())
    }

    /// Rewrites an element lying in `Q(ζ_{f/p^a})` with conductor tag
    /// `f/p^a`, stripping the prime `p` completely.
    pub fn descend_prime(&self, p: u64) -> Self {
        let f = self.conductor;
        let mut pa = 1u64;
        let mut a = 0u32;
        while f % (pa * p) == 0 {
            pa *= p;
            a += 1;
        }
        if a == 0 {
            return self.clone();
        }
        let rest = f / pa;
        // ζ_f = ζ_{p^a}^A ζ_rest^B with A·rest + B·p^a = 1.
        let (_, big_a, big_b) = arith::egcd(rest as i128, pa as i128);
        let mut cyc = vec![BigInt::zero(); rest as usize];
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let u = (big_a * k as i128).rem_euclid(pa as i128) as i64;
            let tr = arith::ramanujan_prime_power(p, a, u);
            if tr == 0 {
                continue;
            }
            let v = (big_b * k as i128).rem_euclid(rest as i128) as usize;
            cyc[v % rest as usize] += c * tr;
        }
        let scale = BigInt::from(pa - pa / p);
        Self::from_cyclic(rest, cyc, &self.den * scale)
    }

    /// Relative trace from `Q(ζ_f)` to `Q(ζ_{f/p^k})` divided by `p^k`,
    /// for `p^{k+1} | f`: keeps only exponents divisible by `p^k`.
    fn strip_prime_power(&self, p: u64, k: u32) -> Self {
        let step = p.pow(k);
        let g = self.conductor / step;
        let mut cyc = vec![BigInt::zero(); g as usize];
        for (e, c) in self.to_cyclic().into_iter().enumerate() {
            if e as u64 % step == 0 && !c.is_zero() {
                cyc[(e as u64 / step) as usize] += c;
            }
        }
        Self::from_cyclic(g, cyc, self.den.clone())
    }

    /// Rewrites an element of `Q(ζ_g)`, `g | f`, with conductor tag `g`,
    /// checking that it really lies there.
    pub fn descend(&self, g: u64) -> Result<Self> {
        let f = self.conductor;
        if g == 0 || f % g != 0 {
            return Err(Error::InvalidInput(format!("{g} does not divide conductor {f}")));
        }
        let mut x = self.clone();
        for (p, a) in arith::factor(f) {
            let b = arith::val(g, p);
            if b == 0 {
                x = x.descend_prime(p);
            } else if b < a {
                x = x.strip_prime_power(p, a - b);
            }
        }
        debug_assert_eq!(x.conductor, g);
        if x.lift(f) != *self {
            return Err(Error::InvalidInput(format!("element does not lie in Q(ζ_{g})")));
        }
        Ok(x)
    }

    /// Product of the conjugates over `Gal(K/L)`, for `x ∈ K` and `L ⊆ K`.
    pub fn relative_norm(&self, from: &AbelianField, to: &AbelianField) -> Result<Self> {
        if !to.is_subfield_of(from) {
            return Err(Error::InvalidInput(format!("{to} is not a subfield of {from}")));
        }
        let mut acc = CycloElement::one(self.conductor);
        for s in from.relative_group(to) {
            acc = &acc * &self.act(s, from);
            acc.check_size()?;
        }
        Ok(acc)
    }

    /// Inverse of a nonzero element of the subfield `field`.
    pub fn inverse_in(&self, field: &AbelianField) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidInput("inverse of zero".into()));
        }
        let mut co = CycloElement::one(self.conductor);
        for s in field.galois_group() {
            if s == field.identity() {
                continue;
            }
            co = &co * &self.act(s, field);
            co.check_size()?;
        }
        let norm = &co * self;
        let (n, d) = norm
            .as_rational()
            .ok_or_else(|| Error::InvalidInput(format!("element is not in {field}")))?;
        Ok(co.scale(&d).div_int(&n))
    }

    /// Whether the element is fixed by (the lifts of) a subgroup `H ≤ (Z/f_K)^×`.
    pub fn is_fixed_by(&self, field: &AbelianField) -> bool {
        let fk = field.conductor().max(1);
        field.fixing_subgroup().iter().all(|&h| {
            let a = lift_residue(h, fk, self.conductor);
            self.galois(a) == *self
        }) && (self.conductor % fk == 0 || fk % self.conductor == 0)
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = CycloElement::one(self.conductor);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Golden-file representation `f=5; num=[2,-1,0,-1]; den=1`.
    pub fn to_record(&self) -> String {
        let coords: Vec<String> = self.num.iter().map(|c| c.to_string()).collect();
        format!("f={}; num=[{}]; den={}", self.conductor, coords.join(","), self.den)
    }
}

/// Smallest `a' ≡ a (mod m)` prime to `target`, for `m | target` or `target | m`.
pub fn lift_residue(a: u64, m: u64, target: u64) -> u64 {
    if target == 1 {
        return 0;
    }
    if m % target == 0 {
        return a % target;
    }
    let m = m.max(1);
    let mut cand = a % m;
    while arith::gcd(cand, target) != 1 {
        cand += m;
    }
    cand % target
}

fn reduce_fraction(n: BigInt, d: BigInt) -> (BigInt, BigInt) {
    let g = n.gcd(&d);
    let (mut n, mut d) = if g.is_zero() { (n, d) } else { (n / &g, d / &g) };
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    (n, d)
}

/// Remainder of a polynomial by the monic `Φ_f`.
fn reduce_mod_phi(f: u64, mut v: Vec<BigInt>) -> Vec<BigInt> {
    let phi = cyclotomic(f);
    let n = phi.len() - 1;
    if v.len() <= n {
        v.resize(n, BigInt::zero());
        return v;
    }
    for top in (n..v.len()).rev() {
        if v[top].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut v[top]);
        for (j, &pj) in phi.iter().enumerate().take(n) {
            if pj != 0 {
                v[top - n + j] -= &c * pj;
            }
        }
    }
    v.truncate(n);
    v
}

impl<'a> Add for &'a CycloElement {
    type Output = CycloElement;
    fn add(self, rhs: Self) -> CycloElement {
        let (a, b) = CycloElement::common(self, rhs);
        let num = a.num.iter().zip(&b.num).map(|(x, y)| x * &b.den + y * &a.den).collect();
        let mut out = CycloElement { conductor: a.conductor, num, den: &a.den * &b.den };
        out.normalize();
        out
    }
}

impl<'a> Sub for &'a CycloElement {
    type Output = CycloElement;
    fn sub(self, rhs: Self) -> CycloElement {
        self + &(-rhs)
    }
}

impl<'a> Neg for &'a CycloElement {
    type Output = CycloElement;
    fn neg(self) -> CycloElement {
        let mut x = self.clone();
        for c in x.num.iter_mut() {
            *c = -c.clone();
        }
        x
    }
}

impl<'a> Mul for &'a CycloElement {
    type Output = CycloElement;
    fn mul(self, rhs: Self) -> CycloElement {
        let (a, b) = CycloElement::common(self, rhs);
        let n = a.num.len();
        let mut prod = vec![BigInt::zero(); 2 * n.max(1) - 1];
        for (i, x) in a.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let num = reduce_mod_phi(a.conductor, prod);
        let mut out = CycloElement { conductor: a.conductor, num, den: &a.den * &b.den };
        out.normalize();
        out
    }
}

/// `c_0 + c_1 z + …` with zero terms dropped.
pub fn format_terms(coeffs: &[BigInt]) -> String {
    let mut terms = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let mono = match i {
            0 => String::new(),
            1 => "z".to_string(),
            _ => format!("z^{i}"),
        };
        let body = if i == 0 {
            mag.to_string()
        } else if mag.is_one() {
            mono
        } else {
            format!("{mag}*{mono}")
        };
        if terms.is_empty() {
            if c.is_negative() {
                terms.push('-');
            }
        } else {
            terms.push_str(if c.is_negative() { " - " } else { " + " });
        }
        terms.push_str(&body);
    }
    if terms.is_empty() {
        terms.push('0');
    }
    terms
}

impl fmt::Display for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = format_terms(&self.num);
        if self.den.is_one() {
            write!(f, "{terms} (f={})", self.conductor)
        } else {
            write!(f, "({terms})/{} (f={})", self.den, self.conductor)
        }
    }
}

impl fmt::Debug for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for CycloElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut f = None;
        let mut num = None;
        let mut den = BigInt::one();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in {part:?}")))?;
            let v = v.trim();
            match k.trim() {
                "f" => f = Some(v.parse::<u64>().map_err(|_| Error::Parse(format!("bad f {v}")))?),
                "num" => {
                    let inner = v
                        .strip_prefix('[')
                        .and_then(|x| x.strip_suffix(']'))
                        .ok_or_else(|| Error::Parse(format!("bad num {v}")))?;
                    let coords: std::result::Result<Vec<BigInt>, _> = inner
                        .split(',')
                        .map(str::trim)
                        .filter(|x| !x.is_empty())
                        .map(|x| x.parse::<BigInt>())
                        .collect();
                    num = Some(coords.map_err(|_| Error::Parse(format!("bad num {v}")))?);
                }
                "den" => den = v.parse().map_err(|_| Error::Parse(format!("bad den {v}")))?,
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        let f = f.ok_or_else(|| Error::Parse("missing f".into()))?;
        let num = num.ok_or_else(|| Error::Parse("missing num".into()))?;
        CycloElement::new(f, num, den)
    }
}

/// `η_K = N_{Q(ζ_{f_K})/K}(1 - ζ_{f_K})`, in `Q(ζ_{f_K})`.
pub fn eta(field: &AbelianField) -> Result<CycloElement> {
    let f = field.conductor();
    if f <= 1 {
        return Err(Error::InvalidInput("η is undefined for Q (conductor 1)".into()));
    }
    let mut acc = CycloElement::one(f);
    for &a in field.fixing_subgroup() {
        acc = acc.mul_one_minus_zeta(a);
    }
    acc.check_size()?;
    Ok(acc)
}

/// `η_K` as the product `Π_{h ∈ H} (1 - ζ^h)` in `Z[x]/(x^f - 1)`, before
/// reduction by the cyclotomic polynomial.
pub fn eta_cyclic(field: &AbelianField) -> Result<Vec<BigInt>> {
    let f = field.conductor() as usize;
    if f <= 1 {
        return Err(Error::InvalidInput("η is undefined for Q (conductor 1)".into()));
    }
    let mut acc = vec![BigInt::zero(); f];
    acc[0] = BigInt::one();
    for &h in field.fixing_subgroup() {
        let mut next = acc.clone();
        for (i, c) in acc.iter().enumerate() {
            next[(i + h as usize) % f] -= c;
        }
        acc = next;
    }
    Ok(acc)
}

/// Gaussian period `Σ_{h ∈ H} ζ_f^{a h}`, an integer of `F`.
pub fn period(field: &AbelianField, a: u64) -> CycloElement {
    let f = field.conductor().max(1);
    let mut acc = CycloElement::zero(f);
    for &h in field.fixing_subgroup() {
        acc = &acc + &CycloElement::zeta_power(f, ((a % f) * (h % f) % f) as i64);
    }
    acc
}

/// Exponent of a formal product: an integer, or a residue mod `ℓ^m`.
pub type Exponent = i64;

/// Unevaluated product `Π base_i^{e_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalProduct {
    pub terms: Vec<(CycloElement, Exponent)>,
}

impl FormalProduct {
    pub fn one() -> Self {
        FormalProduct { terms: Vec::new() }
    }

    pub fn single(x: CycloElement) -> Self {
        FormalProduct { terms: vec![(x, 1)] }
    }

    /// Drops zero exponents and merges equal bases.
    pub fn simplified(&self) -> Self {
        let mut out: Vec<(CycloElement, Exponent)> = Vec::new();
        for (b, e) in &self.terms {
            match out.iter_mut().find(|(c, _)| c == b) {
                Some((_, f)) => *f += e,
                None => out.push((b.clone(), *e)),
            }
        }
        out.retain(|(_, e)| *e != 0);
        FormalProduct { terms: out }
    }

    pub fn is_trivial(&self) -> bool {
        self.simplified().terms.is_empty()
    }

    /// Exact value, inverting inside `field` for negative exponents.
    pub fn evaluate(&self, field: &AbelianField) -> Result<CycloElement> {
        let simple = self.simplified();
        let f = simple
            .terms
            .iter()
            .map(|(b, _)| b.conductor())
            .fold(field.conductor().max(1), arith::lcm);
        let mut acc = CycloElement::one(f);
        for (b, e) in &simple.terms {
            let base = if *e < 0 { b.inverse_in(field)? } else { b.clone() };
            acc = &acc * &base.pow(e.unsigned_abs());
            acc.check_size()?;
        }
        Ok(acc)
    }
}

/// `η̃_F = η_F^{1 - σ^{-1}}`, `σ` the Frobenius of `ℓ`.
pub fn eta_twisted(field: &AbelianField, ell: u64) -> Result<FormalProduct> {
    let sigma = field.artin_symbol(ell).map_err(|_| {
        Error::Ramified(format!("{ell} divides the conductor; use eta directly"))
    })?;
    let e = eta(field)?;
    let conj = e.act(field.inv(sigma), field);
    Ok(FormalProduct { terms: vec![(e, 1), (conj, -1)] }.simplified())
}
