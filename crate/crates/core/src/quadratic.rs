//! Real quadratic fields: elements `(a + b√d)/c`, fundamental units by
//! continued fractions, narrow class numbers from reduced indefinite forms,
//! and fast local data at the places of `Q(√d)`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::abelian::AbelianField;
use crate::arith;
use crate::cyclo::CycloElement;
use crate::error::{Error, Result};
use crate::ladic::{self, LogDivisor, PadicValue, Place};

/// `(a + b√d)/c` with `c > 0` and `gcd(a, b, c) = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadElem {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl QuadElem {
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Self {
        assert!(!c.is_zero(), "zero denominator");
        let mut x = QuadElem { a, b, c };
        x.normalize();
        x
    }

    pub fn from_ints(a: i64, b: i64, c: i64) -> Self {
        Self::new(a.into(), b.into(), c.into())
    }

    pub fn int(n: i64) -> Self {
        Self::from_ints(n, 0, 1)
    }

    fn normalize(&mut self) {
        if self.c.is_negative() {
            self.a = -&self.a;
            self.b = -&self.b;
            self.c = -&self.c;
        }
        let g = self.a.gcd(&self.b).gcd(&self.c);
        if !g.is_zero() && !g.is_one() {
            self.a /= &g;
            self.b /= &g;
            self.c /= &g;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadElem { a: self.a.clone(), b: -&self.b, c: self.c.clone() }
    }

    pub fn mul(&self, o: &Self, d: u64) -> Self {
        let d = BigInt::from(d);
        Self::new(
            &self.a * &o.a + &d * &self.b * &o.b,
            &self.a * &o.b + &self.b * &o.a,
            &self.c * &o.c,
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.a * &o.c + &o.a * &self.c, &self.b * &o.c + &o.b * &self.c, &self.c * &o.c)
    }

    /// Norm as a reduced fraction `(num, den)`, `den > 0`.
    pub fn norm(&self, d: u64) -> (BigInt, BigInt) {
        let num = &self.a * &self.a - BigInt::from(d) * &self.b * &self.b;
        let den = &self.c * &self.c;
        let g = num.gcd(&den);
        (num / &g, den / &g)
    }

    pub fn inverse(&self, d: u64) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidInput("inverse of zero".into()));
        }
        let (n, m) = self.norm(d);
        // x^{-1} = x' / N(x).
        let cj = self.conj();
        Ok(Self::new(cj.a * &m, cj.b * &m, cj.c * n))
    }

    pub fn pow(&self, e: i64, d: u64) -> Result<Self> {
        let base = if e < 0 { self.inverse(d)? } else { self.clone() };
        let mut acc = QuadElem::int(1);
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b, d);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b, d);
            }
        }
        Ok(acc)
    }

    /// Whether the element lies in the ring of integers of `Q(√d)`.
    pub fn is_integral(&self, d: u64) -> bool {
        if self.c.is_one() {
            return true;
        }
        if self.c == BigInt::from(2) && d % 4 == 1 {
            return self.a.is_odd() && self.b.is_odd();
        }
        false
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.b.is_negative() { "-" } else { "+" };
        if self.c.is_one() {
            write!(f, "{} {} {}·√d", self.a, sign, self.b.abs())
        } else {
            write!(f, "({} {} {}·√d)/{}", self.a, sign, self.b.abs(), self.c)
        }
    }
}

impl fmt::Debug for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Local data at one rational prime of a real quadratic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// A real quadratic field `Q(√d)`, `d > 1` squarefree.
#[derive(Debug, Clone)]
pub struct QuadField {
    pub d: u64,
    pub disc: u64,
    pub field: AbelianField,
    sqrt: CycloElement,
}

impl QuadField {
    pub fn new(d: u64) -> Result<Self> {
        let field = AbelianField::quadratic(d)?;
        let disc = field.conductor();
        Ok(QuadField { d, disc, field, sqrt: ladic::quadratic_sqrt(d) })
    }

    /// Recognizes a degree-2 abelian field.
    pub fn from_field(field: &AbelianField) -> Option<Self> {
        field.quadratic_radicand().and_then(|d| Self::new(d).ok())
    }

    pub fn sqrt_cyclo(&self) -> &CycloElement {
        &self.sqrt
    }

    pub fn to_cyclo(&self, x: &QuadElem) -> CycloElement {
        let s = self.sqrt.scale(&x.b);
        let a = CycloElement::one(self.disc).scale(&x.a);
        (&a + &s).div_int(&x.c)
    }

    /// Coordinates of an element of `Q(√d)` given inside some `Q(ζ_g)`.
    pub fn from_cyclo(&self, y: &CycloElement) -> Result<QuadElem> {
        let g = arith::lcm(y.conductor(), self.disc);
        let phi = BigInt::from(arith::euler_phi(g));
        let (t0n, t0d) = y.absolute_trace();
        let (t1n, t1d) = (y * &self.sqrt).absolute_trace();
        let d = BigInt::from(self.d);
        // y = A + B√d with A = T0/φ and B = T1/(φ d).
        let ad = &t0d * &phi;
        let bd = &t1d * &phi * &d;
        let x = QuadElem::new(&t0n * &bd, &t1n * &ad, &ad * &bd);
        if self.to_cyclo(&x).lift(g) != y.lift(g) {
            return Err(Error::InvalidInput(format!("element is not in Q(√{})", self.d)));
        }
        Ok(x)
    }

    pub fn splitting(&self, p: u64) -> Splitting {
        match arith::kronecker(self.disc as i64, p) {
            1 => Splitting::Split,
            -1 => Splitting::Inert,
            _ => Splitting::Ramified,
        }
    }

    /// Places above `p`, identical to the generic ordering.
    pub fn places(&self, p: u64) -> Vec<Place> {
        ladic::places_above(&self.field, p)
    }

    fn omega(&self) -> (i64, i64, i64) {
        if self.d % 4 == 1 {
            (1, 1, 2)
        } else {
            (0, 1, 1)
        }
    }

    /// `a + b ω` for the standard integral basis `1, ω`.
    pub fn integral(&self, a: i64, b: i64) -> QuadElem {
        let (oa, ob, oc) = self.omega();
        QuadElem::from_ints(a * oc + b * oa, b * ob, oc)
    }

    /// Fundamental unit `> 1`, from the continued fraction of `ω`.
    pub fn fundamental_unit(&self) -> QuadElem {
        let d = self.d;
        let (p0, q0) = if d % 4 == 1 { (1i64, 2i64) } else { (0, 1) };
        let sd = arith::isqrt(d as u128) as i64;
        let (mut p, mut q) = (BigInt::from(p0), BigInt::from(q0));
        let bd = BigInt::from(d);
        let (mut a_prev, mut a_cur) = (BigInt::zero(), BigInt::one());
        let (mut b_prev, mut b_cur) = (BigInt::one(), BigInt::zero());
        loop {
            let a_i = (&p + sd).div_floor(&q);
            let a_next = &a_i * &a_cur + &a_prev;
            let b_next = &a_i * &b_cur + &b_prev;
            a_prev = std::mem::replace(&mut a_cur, a_next);
            b_prev = std::mem::replace(&mut b_cur, b_next);
            p = &a_i * &q - &p;
            q = (&bd - &p * &p) / &q;
            if q == BigInt::from(q0) {
                // G = q0 A - p0 B; ε = (G + B√d)/q0.
                let g = BigInt::from(q0) * &a_cur - BigInt::from(p0) * &b_cur;
                let e = QuadElem::new(g, b_cur.clone(), BigInt::from(q0));
                return if e.b.is_negative() { e.conj() } else { e };
            }
        }
    }

    /// Narrow class number: number of cycles of reduced forms of discriminant `D`.
    pub fn narrow_class_number(&self) -> u64 {
        let forms = reduced_forms(self.disc as i64);
        let mut seen: BTreeSet<(i64, i64, i64)> = BTreeSet::new();
        let mut cycles = 0;
        for &f in &forms {
            if seen.contains(&f) {
                continue;
            }
            cycles += 1;
            let mut g = f;
            loop {
                seen.insert(g);
                g = rho(g, self.disc as i64);
                if g == f {
                    break;
                }
            }
        }
        cycles
    }

    /// Wide class number.
    pub fn class_number(&self) -> u64 {
        let h = self.narrow_class_number();
        let (n, _) = self.fundamental_unit().norm(self.d);
        if n.is_one() {
            h / 2
        } else {
            h
        }
    }

    /// `√d` in `Z_p` modulo `p^prec` for a split prime (canonical root).
    pub fn root(&self, p: u64, prec: u32) -> Result<BigInt> {
        ladic::padic_sqrt(self.d, p, prec)
    }

    /// Image `num/c` of `x` under the embedding of place `index` at a split prime.
    fn split_image(&self, x: &QuadElem, p: u64, index: usize, prec: u32) -> Result<BigInt> {
        let r = self.root(p, prec)?;
        let r = if index == 0 { r } else { -r };
        let m = arith::big_pow(p, prec);
        Ok((&x.a + &x.b * r).mod_floor(&m))
    }

    /// Ordinary valuation at a place.
    pub fn valuation(&self, x: &QuadElem, place: &Place) -> Result<i64> {
        if x.is_zero() {
            return Err(Error::InvalidInput("valuation of zero".into()));
        }
        let p = place.prime;
        let (n, den) = x.norm(self.d);
        let vn = arith::val_big(&n, p) as i64 - arith::val_big(&den, p) as i64;
        match self.splitting(p) {
            Splitting::Inert => Ok(vn / 2),
            Splitting::Ramified => Ok(vn),
            Splitting::Split => {
                // Numerator α = a + b√d is integral up to the factor 2.
                let vc = arith::val_big(&x.c, p) as i64;
                let (an, _) = QuadElem::new(x.a.clone(), x.b.clone(), BigInt::one()).norm(self.d);
                let cap = arith::val_big(&an, p) + 1;
                let img = self.split_image(x, p, place.index, cap + 1)?;
                let v = if img.is_zero() { cap as i64 } else { arith::val_big(&img, p) as i64 };
                Ok(v - vc)
            }
        }
    }

    /// `N_{F_λ/Q_ℓ}(x)` as a rational number or a local image.
    fn local_norm(&self, x: &QuadElem, place: &Place, prec: u32) -> Result<(PadicValue, BigInt)> {
        let p = place.prime;
        match self.splitting(p) {
            Splitting::Split => {
                let img = self.split_image(x, p, place.index, prec)?;
                Ok((PadicValue::new(p, img, prec), x.c.clone()))
            }
            _ => {
                let (n, d) = x.norm(self.d);
                Ok((PadicValue::new(p, n, prec), d))
            }
        }
    }

    /// `ν̃_𝔭(x)` at precision `m`.
    pub fn log_valuation(&self, x: &QuadElem, place: &Place, ell: u64, m: u32) -> Result<PadicValue> {
        if place.prime != ell {
            return Ok(PadicValue::from_i64(ell, self.valuation(x, place)?, m));
        }
        let deg = ladic::place_degree(&self.field, place, ell, m + 4)?;
        let lost = deg.valuation().expect("nonzero degree");
        let want = m + lost;
        let (n0, _) = QuadElem::new(x.a.clone(), x.b.clone(), BigInt::one()).norm(self.d);
        let extra = arith::val_big(&n0, ell) + 2;
        let (num, den) = self.local_norm(x, place, want + extra)?;
        let lnum = ladic::iwasawa_log(&num, want)?;
        let lden = ladic::iwasawa_log_rational(&den, &BigInt::one(), ell, want)?;
        let q = lnum.sub(&lden).neg().div(&deg.with_precision(want.min(deg.precision())))?;
        if q.precision() < m {
            return Err(Error::PrecisionCollapse(format!("ν̃ at {place} lost precision")));
        }
        Ok(q.with_precision(m))
    }

    /// Primes dividing the norm of `x`.
    pub fn norm_support(&self, x: &QuadElem) -> Result<Vec<u64>> {
        let (n, d) = x.norm(self.d);
        if n.is_zero() {
            return Err(Error::InvalidInput("zero element".into()));
        }
        let mut ps: Vec<u64> = arith::factor_big(&n, ladic::DEFAULT_FACTOR_BOUND)?
            .into_iter()
            .chain(arith::factor_big(&d, ladic::DEFAULT_FACTOR_BOUND)?)
            .map(|(p, _)| p)
            .collect();
        ps.sort_unstable();
        ps.dedup();
        Ok(ps)
    }

    /// `d̃iv(x)`.
    pub fn log_divisor(&self, x: &QuadElem, ell: u64, m: u32) -> Result<LogDivisor> {
        let mut out = LogDivisor::zero(ell, m);
        for p in self.norm_support(x)? {
            if p == ell {
                continue;
            }
            for pl in self.places(p) {
                let v = self.valuation(x, &pl)?;
                if v != 0 {
                    out.finite.push((pl, v));
                }
            }
        }
        for pl in self.places(ell) {
            let v = self.log_valuation(x, &pl, ell, m)?;
            out.at_ell.push((pl, v));
        }
        Ok(out)
    }

    /// Minkowski bound `√D / 2`, rounded up.
    pub fn minkowski_bound(&self) -> u64 {
        (arith::isqrt(self.disc as u128) as u64 + 2) / 2
    }

    /// `b` with `𝔭 = (p, (b + √D)/2)`, `b² ≡ D (mod 4p)`, `0 ≤ b < 2p`.
    pub fn ideal_b(&self, place: &Place) -> Result<i64> {
        let p = place.prime as i64;
        let disc = self.disc as i64;
        let parity = disc.rem_euclid(2);
        let b = match self.splitting(place.prime) {
            Splitting::Inert => {
                return Err(Error::InvalidInput(format!("{p} is inert: the place is principal")))
            }
            Splitting::Ramified if p == 2 => {
                (0..4).find(|&b| (b * b - disc).rem_euclid(8) == 0).expect("ramified at 2")
            }
            Splitting::Ramified => {
                if parity == 0 {
                    0
                } else {
                    p
                }
            }
            Splitting::Split => {
                // ι((b + √D)/2) ≡ 0, i.e. b ≡ -ι(√D) modulo p (modulo 4 when p = 2).
                let r = self.root(place.prime, 3)?;
                let r_d = if self.disc == self.d { r } else { 2 * r };
                let r_d = if place.index == 0 { r_d } else { -r_d };
                if p == 2 {
                    (0..8)
                        .find(|&b| {
                            (b * b - disc).rem_euclid(8) == 0 && (BigInt::from(b) + &r_d).mod_floor(&BigInt::from(4)).is_zero()
                        })
                        .expect("split prime gives a root")
                } else {
                    let b = (-r_d).mod_floor(&BigInt::from(p)).to_i64().expect("small");
                    if b.rem_euclid(2) == parity {
                        b
                    } else {
                        b + p
                    }
                }
            }
        };
        debug_assert_eq!((b * b - disc).rem_euclid(4 * p), 0);
        Ok(b)
    }

    /// `(b + √D)/2` as an element.
    pub fn half_root(&self, b: i64) -> QuadElem {
        if self.disc == self.d {
            QuadElem::from_ints(b, 1, 2)
        } else {
            QuadElem::from_ints(b, 2, 2)
        }
    }

    /// Generators `p, (b + √D)/2` of a non-inert place.
    pub fn ideal_generators(&self, place: &Place) -> Result<(QuadElem, QuadElem)> {
        let b = self.ideal_b(place)?;
        Ok((QuadElem::int(place.prime as i64), self.half_root(b)))
    }

    /// An element `y` of the place with `N(y) = p·a'`, `|a'| < √D`, found by
    /// reducing the form `(p, b, (b² - D)/4p)`.
    pub fn small_element(&self, place: &Place) -> Result<(QuadElem, i128)> {
        let disc = self.disc as i128;
        let p = place.prime as i128;
        let b0 = self.ideal_b(place)? as i128;
        let (mut a, mut b, mut c) = (p, b0, (b0 * b0 - disc) / (4 * p));
        let s = arith::isqrt(disc as u128) as i128;
        // Columns of the accumulated substitution.
        let (mut m00, mut m01, mut m10, mut m11) = (1i128, 0i128, 0i128, 1i128);
        let mut steps = 0;
        while a * a > disc {
            let m = 2 * c.abs();
            let mut bp = (-b).rem_euclid(m);
            if c.abs() > s {
                if bp > c.abs() {
                    bp -= m;
                }
            } else {
                while bp <= s - m {
                    bp += m;
                }
                while bp > s {
                    bp -= m;
                }
            }
            let t = (bp + b) / (2 * c);
            // M ← M · [[0, -1], [1, t]].
            let (n00, n01) = (m01, -m00 + t * m01);
            let (n10, n11) = (m11, -m10 + t * m11);
            (m00, m01, m10, m11) = (n00, n01, n10, n11);
            let ap = (bp * bp - disc) / (4 * c);
            (a, b, c) = (c, bp, ap);
            steps += 1;
            if steps > 10_000 {
                return Err(Error::InvalidInput("form reduction did not terminate".into()));
            }
        }
        let (u, v) = (m00, m10);
        let g = self.half_root(b0 as i64);
        let y = QuadElem::int(0).add(&QuadElem::new(
            BigInt::from(u * p) * &g.c + BigInt::from(v) * &g.a,
            BigInt::from(v) * &g.b,
            g.c.clone(),
        ));
        Ok((y, a))
    }
}

/// Reduced indefinite forms `(a, b, c)` of discriminant `D`.
pub fn reduced_forms(disc: i64) -> Vec<(i64, i64, i64)> {
    let s = arith::isqrt(disc as u128) as i64;
    let mut out = Vec::new();
    for b in 1..=s {
        if (b - disc).rem_euclid(2) != 0 {
            continue;
        }
        let ac = (b * b - disc) / 4;
        if (b * b - disc) % 4 != 0 {
            continue;
        }
        let n = -ac;
        for a in 1..=n {
            if n % a != 0 {
                continue;
            }
            let c = n / a;
            for (aa, cc) in [(a, -c), (-a, c)] {
                // s - b < 2|a| < s + b, using √D ∉ Z.
                let two_a = 2 * aa.abs();
                let lower_ok = (two_a as i128 + b as i128).pow(2) > disc as i128;
                let upper_ok = two_a <= s + b;
                let b_ok = b <= s;
                if lower_ok && upper_ok && b_ok {
                    out.push((aa, b, cc));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// The reduction operator on reduced forms: `(a, b, c) ↦ (c, b', a')`.
pub fn rho(f: (i64, i64, i64), disc: i64) -> (i64, i64, i64) {
    let (_, b, c) = f;
    let s = arith::isqrt(disc as u128) as i64;
    let m = 2 * c.abs();
    // b' ≡ -b (mod 2c), √D - 2|c| < b' < √D.
    let mut bp = (-b).rem_euclid(m);
    while bp <= s - m {
        bp += m;
    }
    while bp > s {
        bp -= m;
    }
    let ap = (bp * bp - disc) / (4 * c);
    (c, bp, ap)
}

impl QuadElem {
    pub fn to_i64s(&self) -> Option<(i64, i64, i64)> {
        Some((self.a.to_i64()?, self.b.to_i64()?, self.c.to_i64()?))
    }
}
