//! Ideal class groups, their degree-zero subgroups, and logarithmic class
//! groups, presented by relation matrices reduced modulo `ℓ^m`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::abelian::AbelianField;
use crate::arith;
use crate::error::{Error, Result};
use crate::ladic::{self, LogDivisor, PadicValue, Place};
use crate::quadratic::{QuadElem, QuadField, Splitting};
use crate::snf::Snf;

/// A finite abelian ℓ-group `⊕ Z/ℓ^{e_i}`, known modulo `ℓ^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteLModule {
    pub ell: u64,
    pub prec: u32,
    /// Sorted exponents `e_i ≥ 1`; `e_i = prec` marks a factor not resolved at this precision.
    pub exponents: Vec<u32>,
    /// Description of the generator of each factor.
    pub generators: Vec<String>,
}

impl FiniteLModule {
    pub fn trivial(ell: u64, prec: u32) -> Self {
        FiniteLModule { ell, prec, exponents: Vec::new(), generators: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn invariants(&self) -> Vec<BigInt> {
        self.exponents.iter().map(|&e| arith::big_pow(self.ell, e)).collect()
    }

    /// `log_ℓ` of the order.
    pub fn order_exponent(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn order(&self) -> BigInt {
        arith::big_pow(self.ell, self.order_exponent())
    }

    /// Number of factors equal to `ℓ^prec`.
    pub fn saturated(&self) -> usize {
        self.exponents.iter().filter(|&&e| e >= self.prec).count()
    }

    fn from_snf(snf: &Snf, labels: &[String]) -> Self {
        let mut pairs: Vec<(u32, String)> = snf
            .exponents
            .iter()
            .enumerate()
            .filter(|&(_, &e)| e > 0)
            .map(|(j, &e)| (e, describe_column(snf, j, labels)))
            .collect();
        pairs.sort();
        FiniteLModule {
            ell: snf.ell,
            prec: snf.prec,
            exponents: pairs.iter().map(|p| p.0).collect(),
            generators: pairs.into_iter().map(|p| p.1).collect(),
        }
    }
}

/// Names factor `j` by an original generator with a unit coordinate there.
fn describe_column(snf: &Snf, j: usize, labels: &[String]) -> String {
    let q = arith::big_pow(snf.ell, snf.exponents[j]);
    for (i, row) in snf.right.iter().enumerate() {
        let c = row[j].mod_floor(&q);
        if !c.is_zero() && arith::val_big(&c, snf.ell) == 0 {
            return format!("[{}]", labels.get(i).cloned().unwrap_or_else(|| format!("e{i}")));
        }
    }
    format!("g{j}")
}

impl fmt::Display for FiniteLModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "trivial (precision {})", self.prec);
        }
        let parts: Vec<String> = self.invariants().iter().map(|q| format!("Z/{q}")).collect();
        write!(f, "{} (precision {})", parts.join(" x "), self.prec)
    }
}

/// Elementary divisors of an integer matrix over `Z/ℓ^m`.
pub fn snf_mod(matrix: &[Vec<BigInt>], cols: usize, ell: u64, m: u32) -> FiniteLModule {
    let snf = Snf::compute(matrix, cols, ell, m);
    let labels: Vec<String> = (0..cols).map(|i| format!("e{i}")).collect();
    FiniteLModule::from_snf(&snf, &labels)
}

/// Places above `p` with ramification index and residue degree.
pub fn factor_prime(field: &AbelianField, p: u64) -> Result<Vec<(Place, usize, usize)>> {
    if !arith::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    Ok(ladic::places_above(field, p)
        .into_iter()
        .map(|pl| {
            let (e, f) = (pl.ramification, pl.residue_degree);
            (pl, e, f)
        })
        .collect())
}

/// An integral ideal of a real quadratic field in Hermite normal form on
/// the basis `1, ω`: `Z·a + Z·(b + c ω)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IdealHNF {
    pub d: u64,
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

/// `x + y ω` coordinates of an integral element.
fn omega_coords(x: &QuadElem, d: u64) -> Option<(BigInt, BigInt)> {
    if d % 4 == 1 {
        let two = BigInt::from(2);
        let (a, b) = if x.c.is_one() { (&x.a * &two, &x.b * &two) } else if x.c == two { (x.a.clone(), x.b.clone()) } else { return None };
        let xa = &a - &b;
        if xa.is_odd() {
            return None;
        }
        Some((xa / 2, b))
    } else if x.c.is_one() {
        Some((x.a.clone(), x.b.clone()))
    } else {
        None
    }
}

impl IdealHNF {
    fn omega_sq(d: u64) -> (BigInt, BigInt) {
        // ω² = s + t ω.
        if d % 4 == 1 {
            (BigInt::from((d - 1) / 4), BigInt::one())
        } else {
            (BigInt::from(d), BigInt::zero())
        }
    }

    fn from_vectors(d: u64, mut vs: Vec<(BigInt, BigInt)>) -> Result<Self> {
        let mut pivot: Option<(BigInt, BigInt)> = None;
        loop {
            vs.retain(|(x, y)| !(x.is_zero() && y.is_zero()));
            let k = vs.iter().enumerate().filter(|(_, v)| !v.1.is_zero()).min_by_key(|(_, v)| v.1.abs()).map(|(i, _)| i);
            let Some(k) = k else { break };
            let p = vs.swap_remove(k);
            let mut again = false;
            for v in vs.iter_mut() {
                if !v.1.is_zero() {
                    let q = v.1.div_floor(&p.1);
                    v.0 -= &q * &p.0;
                    v.1 -= &q * &p.1;
                    again |= !v.1.is_zero();
                }
            }
            if again {
                vs.push(p);
            } else {
                pivot = Some(p);
                break;
            }
        }
        let (mut b, mut c) = pivot.ok_or_else(|| Error::InvalidInput("ideal of rank < 2".into()))?;
        let a = vs.iter().fold(BigInt::zero(), |g, v| g.gcd(&v.0));
        if a.is_zero() {
            return Err(Error::InvalidInput("ideal of rank < 2".into()));
        }
        if c.is_negative() {
            b = -b;
            c = -c;
        }
        Ok(IdealHNF { d, b: b.mod_floor(&a), a, c })
    }

    /// The ideal generated by the given integral elements.
    pub fn generated_by(d: u64, gens: &[QuadElem]) -> Result<Self> {
        let (s, t) = Self::omega_sq(d);
        let mut vs = Vec::new();
        for g in gens {
            let (x, y) = omega_coords(g, d).ok_or_else(|| Error::InvalidInput(format!("{g} is not integral")))?;
            // g·ω = x ω + y ω² = y s + (x + y t) ω.
            vs.push((&y * &s, &x + &y * &t));
            vs.push((x, y));
        }
        Self::from_vectors(d, vs)
    }

    pub fn of_place(q: &QuadField, place: &Place) -> Result<Self> {
        if q.splitting(place.prime) == Splitting::Inert {
            return Self::generated_by(q.d, &[QuadElem::int(place.prime as i64)]);
        }
        let (p, g) = q.ideal_generators(place)?;
        Self::generated_by(q.d, &[p, g])
    }

    pub fn norm(&self) -> BigInt {
        &self.a * &self.c
    }

    fn basis(&self) -> [(BigInt, BigInt); 2] {
        [(self.a.clone(), BigInt::zero()), (self.b.clone(), self.c.clone())]
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let (s, t) = Self::omega_sq(self.d);
        let mut vs = Vec::new();
        for (x1, y1) in self.basis() {
            for (x2, y2) in o.basis() {
                // (x1 + y1ω)(x2 + y2ω) = x1x2 + y1y2 s + (x1y2 + x2y1 + y1y2 t) ω.
                vs.push((&x1 * &x2 + &y1 * &y2 * &s, &x1 * &y2 + &x2 * &y1 + &y1 * &y2 * &t));
            }
        }
        Self::from_vectors(self.d, vs)
    }

    pub fn contains(&self, x: &QuadElem) -> bool {
        let Some((u, v)) = omega_coords(x, self.d) else { return false };
        if !(&v % &self.c).is_zero() {
            return false;
        }
        let k = &v / &self.c;
        ((u - k * &self.b) % &self.a).is_zero()
    }
}

/// Bounds for the principal-element search `a + b ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Effort {
    pub max_b: i64,
    pub max_a: i64,
    /// Extra factor-base primes beyond the default bound.
    pub extra_primes: usize,
}

impl Default for Effort {
    fn default() -> Self {
        Effort { max_b: 80, max_a: 600, extra_primes: 0 }
    }
}

/// Relation data for a real quadratic field: factor base `S ∪ T` and
/// principal elements supported on it, certified against the class number.
#[derive(Debug, Clone)]
pub struct QuadRelations {
    pub q: QuadField,
    pub ell: u64,
    /// Places above `ℓ` first, then split or ramified places of small primes.
    pub columns: Vec<Place>,
    pub s_count: usize,
    pub relations: Vec<(QuadElem, Vec<i64>)>,
    pub unit: QuadElem,
    pub class_number: u64,
}

fn norm_i128(q: &QuadField, a: i64, b: i64) -> i128 {
    let (a, b, d) = (a as i128, b as i128, q.d as i128);
    if q.d % 4 == 1 {
        a * a + a * b - (d - 1) / 4 * b * b
    } else {
        a * a - d * b * b
    }
}

impl QuadRelations {
    pub fn labels(&self) -> Vec<String> {
        self.columns.iter().map(|p| p.label()).collect()
    }

    pub fn column_of(&self, place: &Place) -> Option<usize> {
        self.columns.iter().position(|c| c.prime == place.prime && c.index == place.index)
    }

    fn fb_primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.columns.iter().map(|c| c.prime).collect();
        ps.dedup();
        ps
    }

    /// Ordinary valuation vector on the columns, if `x` is supported there.
    pub fn vector(&self, x: &QuadElem) -> Result<Option<Vec<i64>>> {
        let mut v = vec![0i64; self.columns.len()];
        for p in self.q.norm_support(x)? {
            for pl in self.q.places(p) {
                let e = self.q.valuation(x, &pl)?;
                if e == 0 {
                    continue;
                }
                match self.column_of(&pl) {
                    Some(j) => v[j] = e,
                    None => return Ok(None),
                }
            }
        }
        Ok(Some(v))
    }

    /// Ordinary valuation vectors of the relations.
    pub fn matrix(&self) -> Vec<Vec<BigInt>> {
        self.relations.iter().map(|(_, v)| v.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn certified(&self) -> bool {
        let v = arith::val(self.class_number, self.ell);
        let k = v + 2;
        let snf = Snf::compute(&self.matrix(), self.columns.len(), self.ell, k);
        let ex = snf.invariant_exponents();
        ex.iter().all(|&e| e < k) && ex.iter().sum::<u32>() == v
    }

    pub fn collect(q: &QuadField, ell: u64, effort: Effort) -> Result<Self> {
        if ell == 2 || !arith::is_prime(ell) {
            return Err(Error::InvalidInput(format!("ℓ = {ell} must be an odd prime")));
        }
        let bound = arith::isqrt(q.disc as u128) as u64 + 1;
        let mut primes: Vec<u64> = (2..=bound).filter(|&p| arith::is_prime(p)).collect();
        let mut next = bound + 1;
        let mut extra = 0;
        while extra < effort.extra_primes {
            if arith::is_prime(next) && q.splitting(next) != Splitting::Inert {
                primes.push(next);
                extra += 1;
            }
            next += 1;
        }
        let mut columns = q.places(ell);
        let s_count = columns.len();
        for &p in &primes {
            if p != ell && q.splitting(p) != Splitting::Inert {
                columns.extend(q.places(p));
            }
        }
        let mut rel = QuadRelations {
            q: q.clone(),
            ell,
            columns,
            s_count,
            relations: Vec::new(),
            unit: q.fundamental_unit(),
            class_number: q.class_number(),
        };
        let mut fb = rel.fb_primes();
        fb.sort_unstable();
        for &p in &fb {
            let x = QuadElem::int(p as i64);
            let v = rel.vector(&x)?.expect("rational primes are supported on their places");
            rel.relations.push((x, v));
        }
        if rel.certified() {
            return Ok(rel);
        }
        // ι_0(ω) mod p (mod 2 from a root mod 8 when p = 2) and column indices.
        let info: Vec<(u64, Splitting, i64, Vec<usize>)> = fb
            .iter()
            .map(|&p| {
                let sp = q.splitting(p);
                let w = if sp == Splitting::Split {
                    let r = q.root(p, 3).expect("split prime has a root");
                    let pb = BigInt::from(p);
                    let w = match (q.d % 4 == 1, p == 2) {
                        (false, _) => r,
                        (true, true) => (BigInt::one() + r) / 2,
                        (true, false) => (BigInt::one() + r) * BigInt::from((p + 1) / 2),
                    };
                    w.mod_floor(&pb).to_i64().expect("small")
                } else {
                    0
                };
                let cols: Vec<usize> = rel.q.places(p).iter().filter_map(|pl| rel.column_of(pl)).collect();
                (p, sp, w, cols)
            })
            .collect();
        let width = rel.columns.len();
        let mut next_check = width + 1;
        for b in 1..=effort.max_b {
            for a in -effort.max_a..=effort.max_a {
                if a.gcd(&b) != 1 {
                    continue;
                }
                let n0 = norm_i128(q, a, b).unsigned_abs();
                if n0 == 0 {
                    continue;
                }
                let mut n = n0;
                let mut v = vec![0i64; width];
                let mut ok = true;
                for (p, sp, w, cols) in &info {
                    let p128 = *p as u128;
                    let mut k = 0i64;
                    while n % p128 == 0 {
                        n /= p128;
                        k += 1;
                    }
                    if k == 0 {
                        continue;
                    }
                    match sp {
                        Splitting::Inert if cols.is_empty() => ok = false,
                        Splitting::Inert => v[cols[0]] = k / 2,
                        Splitting::Ramified => v[cols[0]] = k,
                        Splitting::Split => {
                            let at0 = (a as i128 + b as i128 * *w as i128).rem_euclid(*p as i128) == 0;
                            v[cols[if at0 { 0 } else { 1 }]] = k;
                        }
                    }
                }
                if !ok || n != 1 {
                    continue;
                }
                rel.relations.push((q.integral(a, b), v));
                if rel.relations.len() >= next_check {
                    if rel.certified() {
                        return Ok(rel);
                    }
                    next_check = rel.relations.len() + rel.relations.len() / 4 + 1;
                }
            }
        }
        if rel.certified() {
            return Ok(rel);
        }
        Err(Error::RankDefect(format!(
            "relation lattice for Q(√{}) not certified after {} relations",
            q.d,
            rel.relations.len()
        )))
    }

    /// `ℓ`-part of `Cl_F` modulo `ℓ^m`.
    pub fn class_group(&self, m: u32) -> FiniteLModule {
        let snf = Snf::compute(&self.matrix(), self.columns.len(), self.ell, m);
        FiniteLModule::from_snf(&snf, &self.labels())
    }

    /// Degree map `Cl → Z_ℓ/ℓ^J` on the columns: `f Log p` away from `ℓ`, `0` at `λ | ℓ`.
    fn degree_map(&self, j: u32) -> Result<Vec<BigInt>> {
        let big_j = j + 1;
        let q = arith::big_pow(self.ell, big_j);
        self.columns
            .iter()
            .map(|c| {
                if c.prime == self.ell {
                    return Ok(BigInt::zero());
                }
                let lg = ladic::iwasawa_log_int(c.prime as i64, self.ell, big_j)?;
                Ok((lg.value() * BigInt::from(c.residue_degree)).mod_floor(&q))
            })
            .collect()
    }

    /// Column vectors generating `Cl⁰` inside `Cl`: `e_i - c_i e_k` and
    /// `ℓ^{J-w} e_k` for the column `k` of least degree valuation `w`.
    pub fn degree_zero_generators(&self) -> Result<Vec<Vec<BigInt>>> {
        let j = ladic::unit_norm_exponent(&self.q.field, self.ell);
        let big_j = j + 1;
        let psi = self.degree_map(j)?;
        let n = self.columns.len();
        let unit = |i: usize| -> Vec<BigInt> { (0..n).map(|t| BigInt::from((t == i) as u8)).collect() };
        let Some((k, w)) = psi
            .iter()
            .enumerate()
            .map(|(i, x)| (i, crate::snf::val_mod(x, self.ell, big_j)))
            .filter(|&(_, w)| w < big_j)
            .min_by_key(|&(_, w)| w)
        else {
            return Ok((0..n).map(unit).collect());
        };
        let step = arith::big_pow(self.ell, big_j - w);
        let pw = arith::big_pow(self.ell, w);
        let uinv = (&psi[k] / &pw).extended_gcd(&step).x.mod_floor(&step);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = unit(i);
            if i == k {
                v[k] = step.clone();
            } else {
                v[k] = -((&psi[i] / &pw) * &uinv).mod_floor(&step);
            }
            out.push(v);
        }
        Ok(out)
    }

    /// `Cl⁰`: kernel of the degree map, modulo `ℓ^m`.
    pub fn degree_zero_class_group(&self, m: u32) -> Result<FiniteLModule> {
        let j = ladic::unit_norm_exponent(&self.q.field, self.ell);
        let psi = self.degree_map(j)?;
        let rows: Vec<Vec<BigInt>> = self.matrix();
        let labels = self.labels();
        let (rows, labels) = kernel_presentation(&rows, &psi, self.ell, j + 1, &labels)?;
        let snf = Snf::compute(&rows, labels.len(), self.ell, m);
        Ok(FiniteLModule::from_snf(&snf, &labels))
    }
}

/// Presentation of `L_ψ / R` where `L_ψ = {x : ψ(x) ≡ 0 mod ℓ^J}` and `R`
/// is spanned by exact integer rows in the kernel of `ψ`.
fn kernel_presentation(
    rows: &[Vec<BigInt>],
    psi: &[BigInt],
    ell: u64,
    big_j: u32,
    labels: &[String],
) -> Result<(Vec<Vec<BigInt>>, Vec<String>)> {
    let q = arith::big_pow(ell, big_j);
    for r in rows {
        let s: BigInt = r.iter().zip(psi).map(|(a, b)| a * b).sum();
        if !s.mod_floor(&q).is_zero() {
            return Err(Error::TheoremViolation("principal ideal with nonzero degree class".into()));
        }
    }
    let Some((k, w)) = psi
        .iter()
        .enumerate()
        .map(|(i, x)| (i, crate::snf::val_mod(x, ell, big_j)))
        .filter(|&(_, w)| w < big_j)
        .min_by_key(|&(_, w)| w)
    else {
        return Ok((rows.to_vec(), labels.to_vec()));
    };
    // Basis b_i = e_i - c_i e_k (i ≠ k), b_k = ℓ^{J-w} e_k.
    let step = arith::big_pow(ell, big_j - w);
    let unit = &psi[k] / arith::big_pow(ell, w);
    let uinv = unit.extended_gcd(&step).x.mod_floor(&step);
    let c: Vec<BigInt> = psi
        .iter()
        .map(|x| ((x / arith::big_pow(ell, w)) * &uinv).mod_floor(&step))
        .collect();
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        let t: BigInt = &r[k] + r.iter().enumerate().filter(|&(i, _)| i != k).map(|(i, x)| x * &c[i]).sum::<BigInt>();
        let (tq, rem) = t.div_mod_floor(&step);
        debug_assert!(rem.is_zero());
        let mut nr = r.clone();
        nr[k] = tq;
        out.push(nr);
    }
    let mut new_labels = labels.to_vec();
    new_labels[k] = format!("{}^{}", labels[k], step);
    Ok((out, new_labels))
}

/// Ordinary class groups: `Cl_F` and `Cl⁰_F`, ℓ-parts modulo `ℓ^m`.
#[derive(Debug, Clone)]
pub struct ClassGroups {
    pub cl: FiniteLModule,
    pub cl0: FiniteLModule,
    /// Class number when computed.
    pub class_number: Option<u64>,
}

/// Whole class group is trivial by the Minkowski bound: every prime below
/// it has a single place of full residue degree.
pub fn trivial_by_minkowski(field: &AbelianField) -> Result<bool> {
    let n = field.degree() as u64;
    if n == 1 {
        return Ok(true);
    }
    // M² = (n!/n^n)² |disc|, compared exactly.
    let disc = discriminant(field);
    let mut fact = BigInt::one();
    for k in 1..=n {
        fact *= k;
    }
    let nn = BigInt::from(n).pow(n as u32);
    let num = &fact * &fact * &disc;
    let den = &nn * &nn;
    let mut p = 2u64;
    while BigInt::from(p * p) * &den <= num {
        if arith::is_prime(p) {
            let pls = ladic::places_above(field, p);
            if pls.len() != 1 || pls[0].residue_degree as u64 != n {
                return Ok(false);
            }
        }
        p += 1;
        if p > 1_000_000 {
            return Err(Error::CapExceeded("Minkowski bound beyond 10^6".into()));
        }
    }
    Ok(true)
}

/// `|disc F| = Π f_χ` over the characters of `F`.
pub fn discriminant(field: &AbelianField) -> BigInt {
    let f = field.conductor();
    let divisors: Vec<u64> = (1..=f).filter(|g| f % g == 0).collect();
    // N(g) = #{χ : f_χ | g} = [F ∩ Q(ζ_g) : Q].
    let count_dividing = |g: u64| -> i64 {
        let mut image: Vec<u64> = field.fixing_subgroup().iter().map(|h| h % g).collect();
        image.sort_unstable();
        image.dedup();
        (arith::euler_phi(g) / image.len() as u64) as i64
    };
    let n: BTreeMap<u64, i64> = divisors.iter().map(|&g| (g, count_dividing(g))).collect();
    let mut disc = BigInt::one();
    for &g in &divisors {
        let exact: i64 = divisors
            .iter()
            .filter(|&&e| g % e == 0)
            .map(|&e| mobius(g / e) * n[&e])
            .sum();
        disc *= BigInt::from(g).pow(exact as u32);
    }
    disc
}

fn mobius(n: u64) -> i64 {
    let fs = arith::factor(n);
    if fs.iter().any(|&(_, e)| e > 1) {
        0
    } else if fs.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// ℓ-parts of `Cl_F` and `Cl⁰_F` modulo `ℓ^m`.
pub fn class_group(field: &AbelianField, ell: u64, m: u32) -> Result<ClassGroups> {
    if let Some(q) = QuadField::from_field(field) {
        let rel = QuadRelations::collect(&q, ell, Effort::default())?;
        return Ok(ClassGroups {
            cl: rel.class_group(m),
            cl0: rel.degree_zero_class_group(m)?,
            class_number: Some(rel.class_number),
        });
    }
    if trivial_by_minkowski(field)? {
        return Ok(ClassGroups {
            cl: FiniteLModule::trivial(ell, m),
            cl0: FiniteLModule::trivial(ell, m),
            class_number: Some(1),
        });
    }
    Err(Error::Unsupported(format!(
        "class group of {field}: degree {} beyond the quadratic and Minkowski-trivial cases",
        field.degree()
    )))
}

/// Options for the logarithmic class group presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogClassOptions {
    pub effort: Effort,
    /// Unit rescaling of `deg λ` for every `λ | ℓ`.
    pub degree_scale: i64,
}

impl Default for LogClassOptions {
    fn default() -> Self {
        LogClassOptions { effort: Effort::default(), degree_scale: 1 }
    }
}

#[derive(Debug, Clone)]
enum Reducer {
    Quadratic(Box<QuadRelations>),
    /// One column `λ`, `C̃l` trivial: classes are read off the degree.
    DegreeOnly,
}

/// Presentation of `C̃l*_F` on the columns `S ∪ T` modulo `ℓ^m`, with the
/// degree-zero part `C̃l_F`.
#[derive(Debug, Clone)]
pub struct LogClassGroup {
    pub field: AbelianField,
    pub ell: u64,
    pub prec: u32,
    pub columns: Vec<Place>,
    pub degrees: Vec<PadicValue>,
    pub rows: Vec<Vec<BigInt>>,
    pub row_labels: Vec<String>,
    /// Column of smallest degree valuation, dropped for the degree-zero basis.
    pub pivot: usize,
    pub degree_scale: i64,
    pub cl: FiniteLModule,
    pub cl_star: FiniteLModule,
    snf_zero: Snf,
    snf_star: Snf,
    reducer: Reducer,
}

/// A class in `C̃l*_F / ℓ^m` as a vector on the presentation columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogClass {
    pub vector: Vec<BigInt>,
}

impl LogClassGroup {
    pub fn modulus(&self) -> BigInt {
        arith::big_pow(self.ell, self.prec)
    }

    pub fn labels(&self) -> Vec<String> {
        self.columns.iter().map(|p| p.label()).collect()
    }

    fn column_of(&self, place: &Place) -> Option<usize> {
        self.columns.iter().position(|c| c.prime == place.prime && c.index == place.index)
    }

    fn build(
        field: &AbelianField,
        ell: u64,
        m: u32,
        columns: Vec<Place>,
        divisors: Vec<(String, LogDivisor)>,
        degree_scale: i64,
        reducer: Reducer,
    ) -> Result<Self> {
        let q = arith::big_pow(ell, m);
        let scale = BigInt::from(degree_scale);
        if arith::val_big(&scale, ell) != 0 {
            return Err(Error::InvalidInput(format!("degree scale {degree_scale} is not an ℓ-adic unit")));
        }
        let scale_inv = scale.extended_gcd(&q).x.mod_floor(&q);
        let mut degrees = Vec::new();
        for c in &columns {
            let d = ladic::place_degree(field, c, ell, m + 8)?;
            degrees.push(if c.prime == ell { d.mul_int(&scale) } else { d });
        }
        let mut rows = Vec::new();
        let mut row_labels = Vec::new();
        for (label, dv) in divisors {
            let mut row = vec![BigInt::zero(); columns.len()];
            for (pl, c) in &dv.finite {
                let j = columns
                    .iter()
                    .position(|x| x.prime == pl.prime && x.index == pl.index)
                    .ok_or_else(|| Error::InvalidInput(format!("relation {label} leaves the factor base at {pl}")))?;
                row[j] = BigInt::from(*c).mod_floor(&q);
            }
            for (pl, c) in &dv.at_ell {
                let j = columns.iter().position(|x| x == pl).expect("places above ℓ are columns");
                row[j] = (c.value() * &scale_inv).mod_floor(&q);
            }
            rows.push(row);
            row_labels.push(label);
        }
        let pivot = (0..columns.len())
            .min_by_key(|&j| degrees[j].valuation().unwrap_or(u32::MAX))
            .ok_or_else(|| Error::InvalidInput("empty presentation".into()))?;
        // Product formula on every row.
        let check = m.saturating_sub(4).max(1);
        for (row, label) in rows.iter().zip(&row_labels) {
            let mut deg = PadicValue::zero(ell, m + 8);
            for (x, d) in row.iter().zip(&degrees) {
                deg = deg.add(&d.mul_int(x));
            }
            if !deg.with_precision(check).is_zero() {
                return Err(Error::TheoremViolation(format!("d̃iv({label}) has nonzero degree")));
            }
        }
        let cols = columns.len();
        let star = Snf::compute(&rows, cols, ell, m);
        let zero_rows: Vec<Vec<BigInt>> =
            rows.iter().map(|r| r.iter().enumerate().filter(|&(j, _)| j != pivot).map(|(_, x)| x.clone()).collect()).collect();
        let labels: Vec<String> = columns.iter().map(|p| p.label()).collect();
        let zero_labels: Vec<String> = labels.iter().enumerate().filter(|&(j, _)| j != pivot).map(|(_, l)| l.clone()).collect();
        let zero_labels = zero_labels
            .into_iter()
            .map(|l| format!("{l} - (deg {l}/deg {})·{}", labels[pivot], labels[pivot]))
            .collect::<Vec<_>>();
        let zero = Snf::compute(&zero_rows, cols - 1, ell, m);
        Ok(LogClassGroup {
            field: field.clone(),
            ell,
            prec: m,
            cl: FiniteLModule::from_snf(&zero, &zero_labels),
            cl_star: FiniteLModule::from_snf(&star, &labels),
            columns,
            degrees,
            rows,
            row_labels,
            pivot,
            degree_scale,
            snf_zero: zero,
            snf_star: star,
            reducer,
        })
    }

    /// `C̃l_F` as displayed by the command line.
    pub fn to_string_short(&self) -> String {
        self.cl.to_string()
    }

    /// Class of a vector on the columns.
    pub fn class_of_vector(&self, v: Vec<BigInt>) -> LogClass {
        let q = self.modulus();
        LogClass { vector: v.into_iter().map(|x| x.mod_floor(&q)).collect() }
    }

    /// Coordinates in `C̃l*_F / ℓ^m`.
    pub fn star_coordinates(&self, c: &LogClass) -> Vec<BigInt> {
        self.snf_star.coordinates(&c.vector)
    }

    /// Degree of a class, in units of the column degrees.
    pub fn degree(&self, c: &LogClass) -> PadicValue {
        let mut acc = PadicValue::zero(self.ell, self.prec + 8);
        for (x, d) in c.vector.iter().zip(&self.degrees) {
            acc = acc.add(&d.mul_int(x));
        }
        acc
    }

    /// Coordinates in `C̃l_F` of a degree-zero class.
    pub fn degree_zero_coordinates(&self, c: &LogClass) -> Vec<BigInt> {
        let v: Vec<BigInt> = c.vector.iter().enumerate().filter(|&(j, _)| j != self.pivot).map(|(_, x)| x.clone()).collect();
        self.snf_zero.coordinates(&v)
    }

    pub fn is_identity(&self, c: &LogClass) -> bool {
        self.star_coordinates(c).iter().all(|x| x.is_zero())
    }

    /// Whether two classes agree in `C̃l*_F / ℓ^m`.
    pub fn same_class(&self, a: &LogClass, b: &LogClass) -> bool {
        let q = self.modulus();
        let diff: Vec<BigInt> = a.vector.iter().zip(&b.vector).map(|(x, y)| (x - y).mod_floor(&q)).collect();
        self.is_identity(&LogClass { vector: diff })
    }

    pub fn add(&self, a: &LogClass, b: &LogClass) -> LogClass {
        self.class_of_vector(a.vector.iter().zip(&b.vector).map(|(x, y)| x + y).collect())
    }

    pub fn scale(&self, a: &LogClass, k: &BigInt) -> LogClass {
        self.class_of_vector(a.vector.iter().map(|x| x * k).collect())
    }

    /// Galois conjugate `σ(c)`, via the action on places.
    pub fn act(&self, sigma: crate::abelian::GaloisElement, c: &LogClass) -> Result<LogClass> {
        let mut out = vec![BigInt::zero(); self.columns.len()];
        for (j, x) in c.vector.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let target = ladic::conjugate_place(&self.field, &self.columns[j], sigma);
            let k = self
                .column_of(&target)
                .ok_or_else(|| Error::InvalidInput(format!("columns not Galois-stable at {target}")))?;
            out[k] += x;
        }
        Ok(self.class_of_vector(out))
    }

    /// Generators of `C̃l_F` as classes, with their order exponents.
    pub fn generator_classes(&self) -> Vec<(LogClass, u32)> {
        let n = self.columns.len();
        let mut out = Vec::new();
        // Diagonal basis vector j pulled back: row j of V^{-1}.
        let inv = invert_mod(&self.snf_zero.right, self.ell, self.prec);
        for (j, &e) in self.snf_zero.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let mut v = vec![BigInt::zero(); n];
            let mut k = 0;
            for (i, slot) in v.iter_mut().enumerate() {
                if i == self.pivot {
                    continue;
                }
                *slot = inv[j][k].clone();
                k += 1;
            }
            // Fill the pivot coordinate so the divisor has degree zero.
            let mut deg = PadicValue::zero(self.ell, self.prec + 8);
            for (x, d) in v.iter().zip(&self.degrees) {
                deg = deg.add(&d.mul_int(x));
            }
            let c = deg.neg().div(&self.degrees[self.pivot]).expect("pivot degree has minimal valuation");
            v[self.pivot] = c.with_precision(self.prec.min(c.precision())).value().clone();
            out.push((self.class_of_vector(v), e));
        }
        out
    }
}

/// Inverse of a square matrix over `Z/ℓ^m` (rows of the result).
pub(crate) fn invert_mod(a: &[Vec<BigInt>], ell: u64, m: u32) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let q = arith::big_pow(ell, m);
    let mut aug: Vec<Vec<BigInt>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<BigInt> = r.iter().map(|x| x.mod_floor(&q)).collect();
            row.extend((0..n).map(|j| BigInt::from((i == j) as u8)));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| arith::val_big(&aug[r][c], ell) == 0 && !aug[r][c].is_zero()).expect("invertible");
        aug.swap(c, p);
        let inv = aug[c][c].extended_gcd(&q).x.mod_floor(&q);
        for x in aug[c].iter_mut() {
            *x = (&*x * &inv).mod_floor(&q);
        }
        let pr = aug[c].clone();
        for r in 0..n {
            if r != c && !aug[r][c].is_zero() {
                let f = aug[r][c].clone();
                for (x, y) in aug[r].iter_mut().zip(&pr) {
                    *x = (&*x - &f * y).mod_floor(&q);
                }
            }
        }
    }
    aug.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// `C̃l_F` and the presentation of `C̃l*_F` modulo `ℓ^m`.
pub fn log_class_group(field: &AbelianField, ell: u64, m: u32, opts: LogClassOptions) -> Result<LogClassGroup> {
    if ell == 2 || !arith::is_prime(ell) {
        return Err(Error::InvalidInput(format!("ℓ = {ell} must be an odd prime")));
    }
    if let Some(q) = QuadField::from_field(field) {
        let rel = QuadRelations::collect(&q, ell, opts.effort)?;
        let mut divisors = Vec::new();
        divisors.push((format!("ε = {}", rel.unit), q.log_divisor(&rel.unit, ell, m)?));
        for (x, _) in &rel.relations {
            divisors.push((x.to_string(), q.log_divisor(x, ell, m)?));
        }
        let columns = rel.columns.clone();
        return LogClassGroup::build(field, ell, m, columns, divisors, opts.degree_scale, Reducer::Quadratic(Box::new(rel)));
    }
    let s = ladic::places_above(field, ell);
    if s.len() == 1 && trivial_by_minkowski(field)? {
        return LogClassGroup::build(field, ell, m, s, Vec::new(), opts.degree_scale, Reducer::DegreeOnly);
    }
    Err(Error::Unsupported(format!(
        "log class group of {field}: needs S-unit generators beyond the quadratic and single-place cases"
    )))
}

/// An auxiliary prime with a place in a prescribed class.
#[derive(Debug, Clone)]
pub struct AuxiliaryPrime {
    pub prime: u64,
    pub place: Place,
    pub candidates: u64,
}

impl LogClassGroup {
    fn scale_inv(&self) -> BigInt {
        let q = self.modulus();
        BigInt::from(self.degree_scale).extended_gcd(&q).x.mod_floor(&q)
    }

    /// `d̃iv(x)` for a quadratic element, in this presentation's normalization.
    pub fn quadratic_divisor(&self, x: &QuadElem) -> Result<LogDivisor> {
        match &self.reducer {
            Reducer::Quadratic(rel) => rel.q.log_divisor(x, self.ell, self.prec),
            Reducer::DegreeOnly => Err(Error::InvalidInput("not a quadratic presentation".into())),
        }
    }

    /// Relation data behind a quadratic presentation; its rows are `ε`
    /// followed by the relation elements, in order.
    pub fn quadratic_relations(&self) -> Option<&QuadRelations> {
        match &self.reducer {
            Reducer::Quadratic(rel) => Some(rel),
            Reducer::DegreeOnly => None,
        }
    }

    /// Vector of one place on the columns.
    pub fn place_vector(&self, pl: &Place) -> Result<Vec<BigInt>> {
        let n = self.columns.len();
        let q = self.modulus();
        if let Some(j) = self.column_of(pl) {
            let mut v = vec![BigInt::zero(); n];
            v[j] = BigInt::one();
            return Ok(v);
        }
        match &self.reducer {
            Reducer::DegreeOnly => {
                let mut dv = LogDivisor::zero(self.ell, self.prec);
                dv.finite.push((pl.clone(), 1));
                self.divisor_vector(&dv)
            }
            Reducer::Quadratic(rel) => {
                let qf = &rel.q;
                let mut out = vec![BigInt::zero(); n];
                let dv = if qf.splitting(pl.prime) == Splitting::Inert {
                    qf.log_divisor(&QuadElem::int(pl.prime as i64), self.ell, self.prec)?
                } else {
                    let (y, _) = qf.small_element(pl)?;
                    qf.log_divisor(&y, self.ell, self.prec)?
                };
                // pl ≡ -(d̃iv(y) - pl).
                for (p2, c) in &dv.finite {
                    if p2 == pl {
                        continue;
                    }
                    if p2.prime >= pl.prime && self.column_of(p2).is_none() {
                        return Err(Error::InvalidInput(format!("reduction of {pl} does not descend")));
                    }
                    let w = self.place_vector(p2)?;
                    for (o, x) in out.iter_mut().zip(w) {
                        *o -= x * c;
                    }
                }
                let si = self.scale_inv();
                for (p2, c) in &dv.at_ell {
                    let j = self.column_of(p2).expect("places above ℓ are columns");
                    out[j] -= c.value() * &si;
                }
                Ok(out.into_iter().map(|x| x.mod_floor(&q)).collect())
            }
        }
    }

    fn divisor_vector(&self, d: &LogDivisor) -> Result<Vec<BigInt>> {
        let q = self.modulus();
        let n = self.columns.len();
        let si = self.scale_inv();
        if let Reducer::DegreeOnly = self.reducer {
            // Class = deg(d)/deg(λ) on the single column.
            let mut deg = PadicValue::zero(self.ell, self.prec + 8);
            for (pl, c) in &d.finite {
                let dp = ladic::place_degree(&self.field, pl, self.ell, self.prec + 8)?;
                deg = deg.add(&dp.mul_int(&BigInt::from(*c)));
            }
            for (_, c) in &d.at_ell {
                let base = &self.degrees[0];
                deg = deg.add(&c.mul(base).mul_int(&si));
            }
            let c = deg.div(&self.degrees[0])?;
            if c.precision() < self.prec {
                return Err(Error::PrecisionCollapse("degree quotient lost precision".into()));
            }
            return Ok(vec![c.with_precision(self.prec).value().clone()]);
        }
        let mut out = vec![BigInt::zero(); n];
        for (pl, c) in &d.finite {
            let w = self.place_vector(pl)?;
            for (o, x) in out.iter_mut().zip(w) {
                *o += x * c;
            }
        }
        for (pl, c) in &d.at_ell {
            let j = self
                .column_of(pl)
                .ok_or_else(|| Error::InvalidInput(format!("{pl} is not above ℓ")))?;
            out[j] += c.value() * &si;
        }
        Ok(out.into_iter().map(|x| x.mod_floor(&q)).collect())
    }

    /// Class of a logarithmic divisor in `C̃l*_F / ℓ^m`.
    pub fn class_of_divisor(&self, d: &LogDivisor) -> Result<LogClass> {
        Ok(self.class_of_vector(self.divisor_vector(d)?))
    }

    pub fn class_of_place(&self, pl: &Place) -> Result<LogClass> {
        Ok(self.class_of_vector(self.place_vector(pl)?))
    }

    /// Smallest prime `p ≡ 1 mod ℓ^m`, completely split, with a place in
    /// the class `target`; at most `budget` candidates `1 + kℓ^m` are tried.
    pub fn find_auxiliary_prime(&self, target: &LogClass, budget: u64) -> Result<AuxiliaryPrime> {
        let step = self.ell.pow(self.prec);
        let n = self.field.degree();
        let mut candidates = 0u64;
        let mut p = 1u64;
        while candidates < budget {
            p += step;
            candidates += 1;
            if !arith::is_prime(p) {
                continue;
            }
            let places = ladic::places_above(&self.field, p);
            if places.len() != n {
                continue;
            }
            for pl in places {
                let c = self.class_of_place(&pl)?;
                if self.same_class(&c, target) {
                    return Ok(AuxiliaryPrime { prime: p, place: pl, candidates });
                }
            }
        }
        Err(Error::BudgetExhausted(format!("no auxiliary prime among {budget} candidates")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::CycloElement;

    fn quad(d: u64) -> AbelianField {
        AbelianField::quadratic(d).unwrap()
    }

    #[test]
    fn sieved_relations_match_direct_valuations() {
        for d in [229u64, 79, 17, 33, 41, 97, 10, 7] {
            let q = QuadField::new(d).unwrap();
            let rel = QuadRelations::collect(&q, 3, Effort { extra_primes: 2, ..Effort::default() }).unwrap();
            for (x, v) in &rel.relations {
                assert_eq!(rel.vector(x).unwrap().as_ref(), Some(v), "d = {d}, x = {x}");
            }
        }
    }

    #[test]
    fn factor_prime_examples() {
        let f = quad(5);
        let sp = factor_prime(&f, 11).unwrap();
        assert_eq!(sp.len(), 2);
        assert!(sp.iter().all(|&(_, e, f)| e == 1 && f == 1));
        let r = factor_prime(&f, 5).unwrap();
        assert_eq!((r.len(), r[0].1, r[0].2), (1, 2, 1));
        let i = factor_prime(&quad(2), 3).unwrap();
        assert_eq!((i.len(), i[0].1, i[0].2), (1, 1, 2));
        let z9 = AbelianField::from_subgroup(9, &[8]).unwrap();
        for p in [2u64, 3, 17, 19] {
            let s: usize = factor_prime(&z9, p).unwrap().iter().map(|&(_, e, f)| e * f).sum();
            assert_eq!(s, 3);
        }
        assert!(factor_prime(&f, 12).is_err());
    }

    #[test]
    fn snf_examples() {
        let m = |rows: &[&[i64]]| -> Vec<Vec<BigInt>> {
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
        };
        assert!(snf_mod(&m(&[&[1, 0], &[0, 1]]), 2, 3, 4).is_trivial());
        assert_eq!(snf_mod(&m(&[&[3, 1], &[0, 3]]), 2, 3, 4).invariants(), vec![BigInt::from(9)]);
        let free = snf_mod(&m(&[&[0, 0]]), 2, 3, 4);
        assert_eq!(free.invariants(), vec![BigInt::from(81), BigInt::from(81)]);
        assert_eq!(free.saturated(), 2);
    }

    #[test]
    fn ideal_arithmetic() {
        let q = QuadField::new(79).unwrap();
        let ideals: Vec<IdealHNF> = [3u64, 5, 7, 79, 2]
            .iter()
            .flat_map(|&p| q.places(p))
            .map(|pl| IdealHNF::of_place(&q, &pl).unwrap())
            .collect();
        for a in &ideals {
            for b in &ideals {
                assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
                assert_eq!(a.mul(b).unwrap().norm(), a.norm() * b.norm());
                for c in ideals.iter().take(3) {
                    assert_eq!(a.mul(b).unwrap().mul(c).unwrap(), a.mul(&b.mul(c).unwrap()).unwrap());
                }
            }
        }
        let p3 = q.places(3);
        let prod = IdealHNF::of_place(&q, &p3[0]).unwrap().mul(&IdealHNF::of_place(&q, &p3[1]).unwrap()).unwrap();
        assert_eq!(prod, IdealHNF::generated_by(79, &[QuadElem::int(3)]).unwrap());
        let (_, g) = q.ideal_generators(&p3[0]).unwrap();
        assert!(IdealHNF::of_place(&q, &p3[0]).unwrap().contains(&g));
        assert!(!IdealHNF::of_place(&q, &p3[1]).unwrap().contains(&g));
    }

    #[test]
    fn class_group_examples() {
        assert!(class_group(&quad(5), 3, 8).unwrap().cl.is_trivial());
        assert!(class_group(&quad(2), 3, 8).unwrap().cl.is_trivial());
        let c = class_group(&quad(79), 3, 8).unwrap();
        assert_eq!(c.cl.invariants(), vec![BigInt::from(3)]);
        assert_eq!(c.class_number, Some(3));
        assert!(c.cl0.order() <= c.cl.order());
        let z9 = AbelianField::from_subgroup(9, &[8]).unwrap();
        assert!(class_group(&z9, 3, 8).unwrap().cl.is_trivial());
    }

    #[test]
    fn discriminants_from_conductors() {
        assert_eq!(discriminant(&quad(5)), BigInt::from(5));
        assert_eq!(discriminant(&quad(3)), BigInt::from(12));
        assert_eq!(discriminant(&AbelianField::from_subgroup(9, &[8]).unwrap()), BigInt::from(81));
        assert_eq!(discriminant(&AbelianField::from_subgroup(7, &[6]).unwrap()), BigInt::from(49));
        // Q(√2, √5): characters of conductors 1, 8, 5, 40.
        let b = AbelianField::from_subgroup(40, &[9, 31]).unwrap();
        assert_eq!(discriminant(&b), BigInt::from(8 * 5 * 40));
    }

    #[test]
    fn degree_kernel_presentation() {
        // Z/9 generated by e0, ψ(e0) = 3 mod 9: kernel has order 3.
        let rows = vec![vec![BigInt::from(9)]];
        let psi = vec![BigInt::from(3)];
        let (r, l) = kernel_presentation(&rows, &psi, 3, 2, &["e0".to_string()]).unwrap();
        let snf = Snf::compute(&r, l.len(), 3, 6);
        assert_eq!(snf.invariant_exponents(), vec![1]);
        // Z/3 x Z/3 with ψ = (3, 3) mod 9: kernel Z/3 x Z/... of order 3.
        let rows = vec![vec![BigInt::from(3), BigInt::zero()], vec![BigInt::zero(), BigInt::from(3)]];
        let psi = vec![BigInt::from(3), BigInt::from(3)];
        let (r, l) = kernel_presentation(&rows, &psi, 3, 2, &["a".into(), "b".into()]).unwrap();
        let snf = Snf::compute(&r, l.len(), 3, 6);
        assert_eq!(snf.invariant_exponents().iter().sum::<u32>(), 1);
    }

    #[test]
    fn forced_trivial_log_class_groups() {
        let g = log_class_group(&quad(5), 3, 8, LogClassOptions::default()).unwrap();
        assert!(g.cl.is_trivial());
        assert_eq!(g.to_string_short(), "trivial (precision 8)");
        let z9 = AbelianField::from_subgroup(9, &[8]).unwrap();
        let g = log_class_group(&z9, 3, 8, LogClassOptions::default()).unwrap();
        assert!(g.cl.is_trivial());
        assert_eq!(g.columns.len(), 1);
    }

    /// Oracle: two columns above 3 with rows from ε and π = (1 + √13)/2,
    /// built through the generic cyclotomic route at precision m + 4.
    fn q13_oracle(m: u32) -> Vec<u32> {
        let f = quad(13);
        let qf = QuadField::new(13).unwrap();
        let places = ladic::places_above(&f, 3);
        let elems = [QuadElem::from_ints(3, 1, 2), QuadElem::from_ints(1, 1, 2)];
        let hi = m + 4;
        let rows: Vec<Vec<BigInt>> = elems
            .iter()
            .map(|x| {
                let y: CycloElement = qf.to_cyclo(x);
                places.iter().map(|pl| ladic::log_valuation(&f, &y, pl, 3, hi).unwrap().value().clone()).collect()
            })
            .collect();
        let degs: Vec<u32> = places.iter().map(|pl| ladic::place_degree(&f, pl, 3, hi).unwrap().valuation().unwrap()).collect();
        let k = if degs[0] <= degs[1] { 0 } else { 1 };
        let dropped: Vec<Vec<BigInt>> = rows.iter().map(|r| vec![r[1 - k].clone()]).collect();
        let mut e = Snf::compute(&dropped, 1, 3, hi).invariant_exponents();
        e.retain(|&x| x < m);
        e
    }

    #[test]
    fn q13_matches_two_column_oracle() {
        let m = 8;
        let g = log_class_group(&quad(13), 3, m, LogClassOptions::default()).unwrap();
        assert_eq!(g.columns.len(), 2);
        assert_eq!(g.cl.exponents, q13_oracle(m));
    }

    #[test]
    fn invariants_stable_under_changes() {
        for d in [13u64, 79, 229, 10, 37] {
            let base = log_class_group(&quad(d), 3, 8, LogClassOptions::default()).unwrap();
            let enlarged = log_class_group(
                &quad(d),
                3,
                8,
                LogClassOptions { effort: Effort { extra_primes: 3, ..Effort::default() }, degree_scale: 1 },
            )
            .unwrap();
            let rescaled = log_class_group(&quad(d), 3, 8, LogClassOptions { degree_scale: 7, ..Default::default() }).unwrap();
            let finer = log_class_group(&quad(d), 3, 10, LogClassOptions::default()).unwrap();
            assert_eq!(base.cl.exponents, enlarged.cl.exponents, "d = {d}");
            assert_eq!(base.cl.exponents, rescaled.cl.exponents, "d = {d}");
            let stable: Vec<u32> = finer.cl.exponents.iter().copied().filter(|&e| e < 8).collect();
            assert_eq!(base.cl.exponents.iter().copied().filter(|&e| e < 8).collect::<Vec<_>>(), stable, "d = {d}");
        }
    }

    #[test]
    fn class_of_divisor_basics() {
        let f = quad(13);
        let g = log_class_group(&f, 3, 8, LogClassOptions::default()).unwrap();
        let zero = g.class_of_divisor(&LogDivisor::zero(3, 8)).unwrap();
        assert!(g.is_identity(&zero));
        let qf = QuadField::new(13).unwrap();
        for (a, b) in [(1i64, 1i64), (5, 2), (-7, 3), (11, 1)] {
            let x = qf.integral(a, b);
            let c = g.class_of_divisor(&g.quadratic_divisor(&x).unwrap()).unwrap();
            assert!(g.is_identity(&c), "{x}");
        }
        // λ₁ - (deg λ₁/deg λ₂) λ₂ is of degree zero and decomposes on the generators.
        let (l1, l2) = (g.columns[0].clone(), g.columns[1].clone());
        let ratio = g.degrees[0].div(&g.degrees[1]).unwrap();
        let mut dv = LogDivisor::zero(3, 8);
        dv.at_ell.push((l1, PadicValue::one(3, 8)));
        dv.at_ell.push((l2, ratio.neg().with_precision(8)));
        let c = g.class_of_divisor(&dv).unwrap();
        assert!(g.degree(&c).with_precision(6).is_zero());
        let coords = g.degree_zero_coordinates(&c);
        let mut acc = g.class_of_vector(vec![BigInt::zero(); 2]);
        let gens = g.generator_classes();
        let nonzero: Vec<&BigInt> = coords.iter().filter(|x| !x.is_zero()).collect();
        assert!(nonzero.len() <= gens.len());
        let mut k = 0;
        for (j, &e) in g.snf_zero.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            acc = g.add(&acc, &g.scale(&gens[k].0, &coords[j]));
            k += 1;
        }
        assert!(g.same_class(&acc, &c));
    }

    #[test]
    fn class_of_divisor_is_additive() {
        let f = quad(79);
        let g = log_class_group(&f, 3, 6, LogClassOptions::default()).unwrap();
        let places: Vec<Place> = [101u64, 103, 199, 7, 11, 13].iter().flat_map(|&p| ladic::places_above(&f, p)).collect();
        for a in &places {
            for b in places.iter().take(4) {
                let mut da = LogDivisor::zero(3, 6);
                da.finite.push((a.clone(), 1));
                let mut db = LogDivisor::zero(3, 6);
                db.finite.push((b.clone(), 2));
                let sum = g.class_of_divisor(&da.add(&db)).unwrap();
                let parts = g.add(&g.class_of_divisor(&da).unwrap(), &g.class_of_divisor(&db).unwrap());
                assert!(g.same_class(&sum, &parts));
            }
        }
    }

    #[test]
    fn galois_action_on_classes() {
        let f = quad(79);
        let g = log_class_group(&f, 3, 6, LogClassOptions::default()).unwrap();
        let sigma = f.galois_group()[1];
        for p in [101u64, 7, 11] {
            let pls = ladic::places_above(&f, p);
            if pls.len() < 2 {
                continue;
            }
            let c = g.class_of_place(&pls[0]).unwrap();
            let s = g.act(sigma, &c).unwrap();
            assert!(g.same_class(&s, &g.class_of_place(&pls[1]).unwrap()), "p = {p}");
        }
    }

    #[test]
    fn auxiliary_prime_for_identity() {
        let f = quad(5);
        let g = log_class_group(&f, 3, 2, LogClassOptions::default()).unwrap();
        let id = g.class_of_vector(vec![BigInt::zero(); g.columns.len()]);
        let aux = g.find_auxiliary_prime(&id, 1_000_000).unwrap();
        // Oracle: direct sieve, p ≡ 1 mod 9 split in Q(√5), with Log p/deg λ ≡ 0 mod 9.
        let expected = (1..)
            .map(|k| 1 + 9 * k)
            .find(|&p: &u64| arith::is_prime(p) && (p % 5 == 1 || p % 5 == 4) && (p - 1) % 27 == 0)
            .unwrap();
        assert_eq!(aux.prime, expected);
        assert_eq!(aux.prime % 9, 1);
    }
}
