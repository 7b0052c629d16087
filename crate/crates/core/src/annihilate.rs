//! Group rings over `Z/ℓ^m` and `Z_λ/ℓ^m`, Galois morphisms
//! `ρ(ε) = Σ_σ c(ε^σ) σ^{-1}` built from functionals, the maps `ϑ`, and the
//! annihilation checks against ordinary and logarithmic class groups.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::{AbelianField, GaloisElement};
use crate::arith;
use crate::classgrp::{self, LogClassGroup, LogClassOptions, QuadRelations};
use crate::cyclo::CycloElement;
use crate::error::{Error, Result};
use crate::ladic::{self, LocalElem, Place, UnramifiedLocal};
use crate::quadratic::{QuadElem, QuadField, Splitting};
use crate::snf::Snf;
use crate::units::{self, CircularBasis};

/// `Σ_σ a_σ σ` with coefficients in `Z/ℓ^prec` (rank 1) or in a local ring
/// `Z_λ/ℓ^prec` written in its power basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    pub ell: u64,
    pub prec: u32,
    /// Coefficient of the `i`-th element of `G_F`.
    pub coeffs: Vec<LocalElem>,
}

impl GroupAlgebraElement {
    pub fn zero(order: usize, rank: usize, ell: u64, prec: u32) -> Self {
        GroupAlgebraElement { ell, prec, coeffs: vec![vec![BigInt::zero(); rank]; order] }
    }

    pub fn from_scalars(coeffs: Vec<BigInt>, ell: u64, prec: u32) -> Self {
        let q = arith::big_pow(ell, prec);
        GroupAlgebraElement { ell, prec, coeffs: coeffs.into_iter().map(|c| vec![c.mod_floor(&q)]).collect() }
    }

    pub fn identity(field: &AbelianField, ell: u64, prec: u32) -> Self {
        let mut x = Self::zero(field.degree(), 1, ell, prec);
        x.coeffs[field.identity().index][0] = BigInt::one();
        x
    }

    /// `N = Σ_σ σ`.
    pub fn norm_element(field: &AbelianField, ell: u64, prec: u32) -> Self {
        Self::from_scalars(vec![BigInt::one(); field.degree()], ell, prec)
    }

    pub fn rank(&self) -> usize {
        self.coeffs.first().map_or(1, Vec::len)
    }

    pub fn modulus(&self) -> BigInt {
        arith::big_pow(self.ell, self.prec)
    }

    pub fn coefficient(&self, sigma: GaloisElement) -> &LocalElem {
        &self.coeffs[sigma.index]
    }

    fn reduced(mut self) -> Self {
        let q = self.modulus();
        for c in self.coeffs.iter_mut() {
            for x in c.iter_mut() {
                *x = x.mod_floor(&q);
            }
        }
        self
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.ell, self.prec, self.rank()), (o.ell, o.prec, o.rank()));
        let coeffs = self
            .coeffs
            .iter()
            .zip(&o.coeffs)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        GroupAlgebraElement { coeffs, ..self.clone() }.reduced()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.iter().map(|x| x * k).collect()).collect();
        GroupAlgebraElement { coeffs, ..self.clone() }.reduced()
    }

    /// Convolution product. Two elements of rank above 1 need their ring.
    pub fn mul(&self, field: &AbelianField, o: &Self, ring: Option<&UnramifiedLocal>) -> Result<Self> {
        let (r1, r2) = (self.rank(), o.rank());
        let rank = r1.max(r2);
        if r1 > 1 && r2 > 1 && ring.is_none() {
            return Err(Error::InvalidInput("product of two local group-ring elements needs the ring".into()));
        }
        let prec = self.prec.min(o.prec);
        let mut out = Self::zero(field.degree(), rank, self.ell, prec);
        let group = field.galois_group();
        for s in &group {
            let a = &self.coeffs[s.index];
            if a.iter().all(Zero::is_zero) {
                continue;
            }
            for t in &group {
                let b = &o.coeffs[t.index];
                let prod: LocalElem = match (r1, r2) {
                    (1, _) => b.iter().map(|y| &a[0] * y).collect(),
                    (_, 1) => a.iter().map(|x| x * &b[0]).collect(),
                    _ => ring.expect("checked above").mul(a, b),
                };
                let st = field.mul(*s, *t).index;
                for (acc, p) in out.coeffs[st].iter_mut().zip(prod) {
                    *acc += p;
                }
            }
        }
        Ok(out.reduced())
    }

    /// `τ · x`: the coefficient of `σ` moves to `τσ`.
    pub fn act(&self, field: &AbelianField, tau: GaloisElement) -> Self {
        let mut out = self.clone();
        for s in field.galois_group() {
            out.coeffs[field.mul(tau, s).index] = self.coeffs[s.index].clone();
        }
        out
    }

    pub fn augmentation(&self) -> LocalElem {
        let q = self.modulus();
        let mut acc = vec![BigInt::zero(); self.rank()];
        for c in &self.coeffs {
            for (a, x) in acc.iter_mut().zip(c) {
                *a += x;
            }
        }
        acc.into_iter().map(|x| x.mod_floor(&q)).collect()
    }

    /// The scalar element formed by the `i`-th power-basis coordinate.
    pub fn coordinate(&self, i: usize) -> Self {
        GroupAlgebraElement { coeffs: self.coeffs.iter().map(|c| vec![c[i].clone()]).collect(), ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.iter().all(Zero::is_zero))
    }

    /// Least `ℓ`-adic valuation of a coefficient (`prec` for zero).
    pub fn valuation(&self) -> u32 {
        self.coeffs
            .iter()
            .flatten()
            .map(|x| crate::snf::val_mod(x, self.ell, self.prec))
            .min()
            .unwrap_or(self.prec)
    }

    /// `ℓ^{-k} x`, when every coefficient is divisible by `ℓ^k`.
    pub fn divide_by_ell(&self, k: u32) -> Result<Self> {
        if self.valuation() < k {
            return Err(Error::InvalidInput(format!("coefficients are not divisible by {}^{k}", self.ell)));
        }
        if k >= self.prec {
            return Err(Error::PrecisionCollapse("division exhausts the precision".into()));
        }
        let pk = arith::big_pow(self.ell, k);
        let coeffs = self.coeffs.iter().map(|c| c.iter().map(|x| x / &pk).collect()).collect();
        Ok(GroupAlgebraElement { ell: self.ell, prec: self.prec - k, coeffs }.reduced())
    }

    pub fn with_precision(&self, m: u32) -> Self {
        assert!(m <= self.prec, "cannot raise precision");
        GroupAlgebraElement { prec: m, ..self.clone() }.reduced()
    }

    pub fn display(&self, field: &AbelianField) -> String {
        let q = self.modulus();
        let half = &q / 2u32;
        let sym = |x: &BigInt| if x > &half { x - &q } else { x.clone() };
        let mut terms = Vec::new();
        for s in field.galois_group() {
            let c = &self.coeffs[s.index];
            if c.iter().all(Zero::is_zero) {
                continue;
            }
            let coef = if c.len() == 1 {
                sym(&c[0]).to_string()
            } else {
                format!("({})", c.iter().map(sym).map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
            };
            terms.push(if s == field.identity() { coef } else { format!("{coef}·σ_{}", s.residue) });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// A finite `ℓ`-group with a `G_F`-action, presented on column vectors.
pub trait ClassModule: Sync {
    fn ell(&self) -> u64;
    fn prec(&self) -> u32;
    fn field(&self) -> &AbelianField;
    /// Column vectors whose classes generate the module.
    fn generators(&self) -> Vec<Vec<BigInt>>;
    fn act(&self, sigma: GaloisElement, v: &[BigInt]) -> Result<Vec<BigInt>>;
    fn is_zero(&self, v: &[BigInt]) -> bool;

    /// `a · [v]` for a scalar group-ring element.
    fn apply(&self, a: &GroupAlgebraElement, v: &[BigInt]) -> Result<Vec<BigInt>> {
        let q = arith::big_pow(self.ell(), self.prec());
        let mut out = vec![BigInt::zero(); v.len()];
        for s in self.field().galois_group() {
            let c = &a.coefficient(s)[0];
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(self.act(s, v)?) {
                *o += c * x;
            }
        }
        Ok(out.into_iter().map(|x| x.mod_floor(&q)).collect())
    }
}

impl ClassModule for LogClassGroup {
    fn ell(&self) -> u64 {
        self.ell
    }

    fn prec(&self) -> u32 {
        self.prec
    }

    fn field(&self) -> &AbelianField {
        &self.field
    }

    fn generators(&self) -> Vec<Vec<BigInt>> {
        self.generator_classes().into_iter().map(|(c, _)| c.vector).collect()
    }

    fn act(&self, sigma: GaloisElement, v: &[BigInt]) -> Result<Vec<BigInt>> {
        Ok(LogClassGroup::act(self, sigma, &self.class_of_vector(v.to_vec()))?.vector)
    }

    fn is_zero(&self, v: &[BigInt]) -> bool {
        self.is_identity(&self.class_of_vector(v.to_vec()))
    }
}

/// `Cl⁰_F` of a real quadratic field inside `Cl_F = Z^S / relations`.
#[derive(Debug, Clone)]
pub struct OrdinaryClassModule {
    pub field: AbelianField,
    pub ell: u64,
    pub prec: u32,
    pub columns: Vec<Place>,
    generators: Vec<Vec<BigInt>>,
    snf: Snf,
}

impl OrdinaryClassModule {
    pub fn new(rel: &QuadRelations, m: u32) -> Result<Self> {
        let snf = Snf::compute(&rel.matrix(), rel.columns.len(), rel.ell, m);
        let q = arith::big_pow(rel.ell, m);
        let generators = rel
            .degree_zero_generators()?
            .into_iter()
            .map(|v| v.into_iter().map(|x| x.mod_floor(&q)).collect())
            .collect();
        Ok(OrdinaryClassModule {
            field: rel.q.field.clone(),
            ell: rel.ell,
            prec: m,
            columns: rel.columns.clone(),
            generators,
            snf,
        })
    }
}

impl ClassModule for OrdinaryClassModule {
    fn ell(&self) -> u64 {
        self.ell
    }

    fn prec(&self) -> u32 {
        self.prec
    }

    fn field(&self) -> &AbelianField {
        &self.field
    }

    fn generators(&self) -> Vec<Vec<BigInt>> {
        self.generators.clone()
    }

    fn act(&self, sigma: GaloisElement, v: &[BigInt]) -> Result<Vec<BigInt>> {
        let mut out = vec![BigInt::zero(); v.len()];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let t = ladic::conjugate_place(&self.field, &self.columns[j], sigma);
            let k = self
                .columns
                .iter()
                .position(|c| c.prime == t.prime && c.index == t.index)
                .ok_or_else(|| Error::InvalidInput(format!("columns not Galois-stable at {t}")))?;
            out[k] += x;
        }
        Ok(out)
    }

    fn is_zero(&self, v: &[BigInt]) -> bool {
        self.snf.coordinates(v).iter().all(Zero::is_zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnihilationFailure {
    pub element: String,
    pub generator: usize,
    /// Power-basis coordinate of a local element.
    pub coordinate: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnnihilationVerdict {
    pub elements: usize,
    pub generators: usize,
    pub pairs: usize,
    pub failures: Vec<AnnihilationFailure>,
}

impl AnnihilationVerdict {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `a · [c] = 0` for every element and generator class; a local
/// element annihilates `Z_λ ⊗ M` exactly when each coordinate does.
pub fn annihilation_check(
    elements: &[(String, GroupAlgebraElement)],
    module: &dyn ClassModule,
) -> Result<AnnihilationVerdict> {
    let gens = module.generators();
    let m = module.prec();
    let mut tasks = Vec::new();
    for (e, (_, a)) in elements.iter().enumerate() {
        if a.prec < m {
            return Err(Error::PrecisionCollapse(format!("element precision {} below module precision {m}", a.prec)));
        }
        for g in 0..gens.len() {
            for i in 0..a.rank() {
                tasks.push((e, g, i));
            }
        }
    }
    let results: Vec<Result<Option<AnnihilationFailure>>> = tasks
        .par_iter()
        .map(|&(e, g, i)| {
            let (label, a) = &elements[e];
            let scalar = a.coordinate(i).with_precision(m);
            let image = module.apply(&scalar, &gens[g])?;
            Ok((!module.is_zero(&image)).then(|| AnnihilationFailure { element: label.clone(), generator: g, coordinate: i }))
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        if let Some(f) = r? {
            failures.push(f);
        }
    }
    Ok(AnnihilationVerdict { elements: elements.len(), generators: gens.len(), pairs: tasks.len(), failures })
}

#[derive(Debug, Clone)]
enum LambdaImage {
    /// `√d ↦ sqrt`.
    Quadratic { q: QuadField, sqrt: LocalElem },
    /// `ζ_f ↦ powers[1]`.
    Cyclotomic { conductor: u64, powers: Vec<LocalElem> },
}

/// An embedding of `F` into an unramified ring `Z_λ/ℓ^W` above `ℓ ∤ f`,
/// with the logarithm `Log_λ` (so `Log_λ ℓ = 0`) and the trace form.
///
/// For quadratic fields the ring is `Z_λ` itself; otherwise it is
/// `Z_ℓ[ζ_f]`, which is free over `Z_λ`.
#[derive(Debug, Clone)]
pub struct LambdaAdic {
    pub field: AbelianField,
    pub ell: u64,
    /// Precision of logarithms and traces.
    pub prec: u32,
    pub ring: UnramifiedLocal,
    image: LambdaImage,
}

const GUARD_DIGITS: u32 = 10;

fn ring_inverse(ring: &UnramifiedLocal, x: &LocalElem) -> LocalElem {
    let q = ring.prime.pow(ring.degree as u32);
    let mut y = ring.pow(x, q - 2);
    let mut correct = 1;
    while correct < ring.prec {
        let mut t: LocalElem = ring.mul(x, &y).into_iter().map(|c| -c).collect();
        t[0] += 2;
        y = ring.mul(&y, &ring.reduce(t));
        correct *= 2;
    }
    y
}

fn ring_sqrt(ring: &UnramifiedLocal, d: u64) -> Result<LocalElem> {
    let p = ring.prime;
    let residues = (p as u128).pow(ring.degree as u32);
    let target = BigInt::from(d) % BigInt::from(p);
    let mut start = None;
    for idx in 1..residues {
        let cand: LocalElem = (0..ring.degree).map(|i| BigInt::from((idx / (p as u128).pow(i as u32)) % p as u128)).collect();
        let sq = ring.mul(&cand, &cand);
        let ok = sq[0].mod_floor(&BigInt::from(p)) == target
            && sq[1..].iter().all(|c| c.mod_floor(&BigInt::from(p)).is_zero());
        if ok {
            start = Some(cand);
            break;
        }
    }
    let mut s = start.ok_or_else(|| Error::InvalidInput(format!("{d} has no square root above {p}")))?;
    let inv2 = (arith::big_pow(p, ring.prec) + 1u32) / 2u32;
    let mut correct = 1;
    while correct < ring.prec {
        // s <- (s + d/s) / 2.
        let mut t = ring_inverse(ring, &s);
        t = t.into_iter().map(|c| c * d).collect();
        s = ring.reduce(s.iter().zip(&t).map(|(a, b)| (a + b) * &inv2).collect());
        correct *= 2;
    }
    Ok(s)
}

impl LambdaAdic {
    pub fn new(field: &AbelianField, ell: u64, m: u32) -> Result<Self> {
        Self::with_guard(field, ell, m, GUARD_DIGITS)
    }

    /// Same maps, with `guard` extra working digits for elements of high
    /// valuation at `λ`.
    pub fn with_guard(field: &AbelianField, ell: u64, m: u32, guard: u32) -> Result<Self> {
        if ell == 2 || !arith::is_prime(ell) {
            return Err(Error::InvalidInput(format!("ℓ = {ell} must be an odd prime")));
        }
        let f = field.conductor();
        if f % ell == 0 {
            return Err(Error::Ramified(format!("{ell} in {field}: the λ-adic maps need λ unramified")));
        }
        let work = m + guard;
        if let Some(q) = QuadField::from_field(field) {
            let degree = if q.splitting(ell) == Splitting::Split { 1 } else { 2 };
            let ring = UnramifiedLocal::new(ell, degree, work)?;
            let sqrt = if degree == 1 { vec![ladic::padic_sqrt(q.d, ell, work)?] } else { ring_sqrt(&ring, q.d)? };
            return Ok(LambdaAdic { field: field.clone(), ell, prec: m, ring, image: LambdaImage::Quadratic { q, sqrt } });
        }
        let degree = arith::mult_order(ell % f.max(2), f.max(2)) as usize;
        let ring = UnramifiedLocal::new(ell, degree.max(1), work)?;
        let w = if f <= 2 { ring.one() } else { ring.root_of_unity(f)? };
        let mut powers = vec![ring.one()];
        for i in 1..f as usize {
            let next = ring.mul(&powers[i - 1], &w);
            powers.push(next);
        }
        Ok(LambdaAdic { field: field.clone(), ell, prec: m, ring, image: LambdaImage::Cyclotomic { conductor: f, powers } })
    }

    /// Residue degree of the ring over `Z_ℓ`.
    pub fn degree(&self) -> usize {
        self.ring.degree
    }

    pub fn modulus(&self) -> BigInt {
        arith::big_pow(self.ell, self.prec)
    }

    pub fn embed_quad(&self, x: &QuadElem) -> Result<(LocalElem, BigInt)> {
        let LambdaImage::Quadratic { sqrt, .. } = &self.image else {
            return Err(Error::InvalidInput("not a quadratic field".into()));
        };
        let mut v: LocalElem = sqrt.iter().map(|s| s * &x.b).collect();
        v[0] += &x.a;
        Ok((self.ring.reduce(v), x.c.clone()))
    }

    /// Image `num / den` of an element of `F`.
    pub fn embed(&self, y: &CycloElement) -> Result<(LocalElem, BigInt)> {
        match &self.image {
            LambdaImage::Quadratic { q, .. } => self.embed_quad(&q.from_cyclo(y)?),
            LambdaImage::Cyclotomic { conductor, powers } => {
                let z = y.descend(*conductor)?.lift(*conductor);
                let mut acc = vec![BigInt::zero(); self.ring.degree];
                for (i, c) in z.numerator().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for (a, w) in acc.iter_mut().zip(&powers[i % *conductor as usize]) {
                        *a += c * w;
                    }
                }
                Ok((self.ring.reduce(acc), z.denominator().clone()))
            }
        }
    }

    /// `ℓ`-adic valuation of an embedded numerator (`None` for zero).
    fn valuation(&self, x: &LocalElem) -> Option<u32> {
        x.iter().filter(|c| !c.is_zero()).map(|c| arith::val_big(c, self.ell)).min()
    }

    /// `log u` for a unit, as `log(u^{q-1}) / (q-1)`.
    fn log_unit(&self, u: &LocalElem) -> LocalElem {
        let ring = &self.ring;
        let ell = self.ell;
        let mut acc = ring.one();
        let mut y = u.clone();
        for _ in 0..ring.degree {
            acc = ring.mul(&acc, &ring.pow(&y, ell - 1));
            y = ring.pow(&y, ell);
        }
        let mut z = acc;
        z[0] -= 1;
        let z = ring.reduce(z);
        let out_mod = self.modulus();
        let mut sum = vec![BigInt::zero(); ring.degree];
        let mut zn = ring.one();
        let mut n: u64 = 1;
        loop {
            let e = arith::val(n, ell);
            if n - u64::from(e) > u64::from(self.prec) + 1 {
                break;
            }
            zn = ring.mul(&zn, &z);
            let pe = arith::big_pow(ell, e);
            let unit = BigInt::from(n) / &pe;
            let inv = unit.extended_gcd(&out_mod).x;
            let sign = if n % 2 == 1 { BigInt::one() } else { -BigInt::one() };
            for (s, c) in sum.iter_mut().zip(&zn) {
                *s += (c / &pe) * &inv * &sign;
            }
            n += 1;
        }
        let qm1: BigInt = arith::big_pow(ell, ring.degree as u32) - 1;
        let inv = qm1.extended_gcd(&out_mod).x;
        sum.into_iter().map(|s| (s * &inv).mod_floor(&out_mod)).collect()
    }

    /// `Log_λ(num / den)`, extended to non-units by `Log_λ ℓ = 0`.
    pub fn log(&self, num: &LocalElem, den: &BigInt) -> Result<LocalElem> {
        let v = self
            .valuation(num)
            .ok_or_else(|| Error::InvalidInput("logarithm of zero at λ".into()))?;
        if v + self.prec + 2 > self.ring.prec {
            return Err(Error::PrecisionCollapse(format!("valuation {v} at λ exhausts the guard digits")));
        }
        let pv = arith::big_pow(self.ell, v);
        let u: LocalElem = num.iter().map(|c| c / &pv).collect();
        let mut out = self.log_unit(&u);
        let ld = ladic::iwasawa_log_rational(den, &BigInt::one(), self.ell, self.prec)?;
        out[0] = (&out[0] - ld.value()).mod_floor(&self.modulus());
        Ok(out)
    }

    fn wider(&self, num: &LocalElem) -> Result<Option<Self>> {
        let v = self.valuation(num).unwrap_or(self.ring.prec);
        if v + self.prec + 2 <= self.ring.prec {
            return Ok(None);
        }
        let guard = self.ring.prec - self.prec;
        if guard > 8 * (self.prec + GUARD_DIGITS) {
            return Err(Error::PrecisionCollapse("element vanishes at λ to working precision".into()));
        }
        Ok(Some(Self::with_guard(&self.field, self.ell, self.prec, 2 * guard)?))
    }

    pub fn log_of(&self, y: &CycloElement) -> Result<LocalElem> {
        let (n, d) = self.embed(y)?;
        match self.wider(&n)? {
            Some(w) => w.log_of(y),
            None => self.log(&n, &d),
        }
    }

    pub fn log_of_quad(&self, x: &QuadElem) -> Result<LocalElem> {
        let (n, d) = self.embed_quad(x)?;
        match self.wider(&n)? {
            Some(w) => w.log_of_quad(x),
            None => self.log(&n, &d),
        }
    }

    /// Whether `y` is a unit at `λ`.
    pub fn is_unit(&self, y: &CycloElement) -> Result<bool> {
        let (n, d) = self.embed(y)?;
        Ok(self.valuation(&n) == Some(0) && arith::val_big(&d, self.ell) == 0)
    }

    /// `Tr(x)` down to `Z_ℓ`, as the trace of multiplication by `x`.
    pub fn trace(&self, x: &LocalElem) -> BigInt {
        let d = self.ring.degree;
        let mut t = BigInt::zero();
        for j in 0..d {
            let mut basis = vec![BigInt::zero(); d];
            basis[j] = BigInt::one();
            t += &self.ring.mul(x, &basis)[j];
        }
        t.mod_floor(&self.modulus())
    }

    fn power_basis(&self, k: usize) -> LocalElem {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = BigInt::one();
        self.ring.reduce(v)
    }

    /// `v_i^*` with `Tr(v_i^* t^j) = δ_ij`, from the inverse trace matrix.
    pub fn dual_basis(&self) -> Vec<LocalElem> {
        let d = self.ring.degree;
        let gram: Vec<Vec<BigInt>> =
            (0..d).map(|i| (0..d).map(|j| self.trace(&self.power_basis(i + j))).collect()).collect();
        classgrp::invert_mod(&gram, self.ell, self.prec)
    }

    /// `(Tr(v_i^* x))_i`.
    pub fn trace_coordinates(&self, dual: &[LocalElem], x: &LocalElem) -> Vec<BigInt> {
        dual.iter().map(|v| self.trace(&self.ring.mul(v, x))).collect()
    }
}

/// `ϑ(ε) = Σ_σ Log_λ(ε^σ) σ^{-1}` for a unit above `ℓ`.
pub fn theta(la: &LambdaAdic, eps: &CycloElement) -> Result<GroupAlgebraElement> {
    let field = &la.field;
    let mut out = GroupAlgebraElement::zero(field.degree(), la.degree(), la.ell, la.prec);
    for s in field.galois_group() {
        let conj = eps.act(s, field);
        if !la.is_unit(&conj)? {
            return Err(Error::InvalidInput(format!("ε is not a unit above {}", la.ell)));
        }
        out.coeffs[field.inv(s).index] = la.log_of(&conj)?;
    }
    Ok(out)
}

/// Valuation verdict for `ℓ^{-k} αϑ` on a generator family.
#[derive(Debug, Clone, Serialize)]
pub struct IntegralityVerdict {
    pub integral: bool,
    /// Least coefficient valuation before division.
    pub valuation: u32,
    pub shift: u32,
    pub witness: Option<String>,
}

/// `ϑ^Sol_F = ℓ^{-1} ϑ(η_F)` at precision `m - 1`, with its integrality.
pub fn solomon_element(field: &AbelianField, ell: u64, m: u32) -> Result<(Option<GroupAlgebraElement>, IntegralityVerdict)> {
    if field.conductor() % ell == 0 {
        return Err(Error::Ramified(format!("{ell} divides the conductor of {field}; use theta(η_F) directly")));
    }
    let la = LambdaAdic::new(field, ell, m)?;
    let th = theta(&la, &crate::cyclo::eta(field)?)?;
    let v = th.valuation();
    let integral = v >= 1;
    let verdict = IntegralityVerdict {
        integral,
        valuation: v,
        shift: 1,
        witness: (!integral).then(|| format!("ϑ(η_F) = {}", th.display(field))),
    };
    Ok((integral.then(|| th.divide_by_ell(1)).transpose()?, verdict))
}

/// A Galois morphism `ρ(ε) = Σ_σ c(ε^σ) σ^{-1}`, with the functional `c`
/// stored through its values on the circular generators:
/// `c(η^α) = ℓ^{-shift} Σ_j α_j values_j`.
#[derive(Debug, Clone)]
pub struct GaloisMorphism {
    pub label: String,
    pub ell: u64,
    pub prec: u32,
    pub shift: u32,
    /// Known modulo `ℓ^{prec + shift}`.
    pub values: Vec<BigInt>,
}

impl GaloisMorphism {
    /// `c(η^α)`; fails when the value is not integral.
    pub fn functional(&self, alpha: &[BigInt]) -> Result<BigInt> {
        let big = arith::big_pow(self.ell, self.prec + self.shift);
        let s: BigInt = alpha.iter().zip(&self.values).map(|(a, v)| a * v).sum::<BigInt>().mod_floor(&big);
        let pk = arith::big_pow(self.ell, self.shift);
        let (qt, r) = s.div_mod_floor(&pk);
        if !r.is_zero() {
            return Err(Error::InvalidInput(format!("{} is not integral on this element", self.label)));
        }
        Ok(qt)
    }

    pub fn image(&self, basis: &CircularBasis, alpha: &[BigInt]) -> Result<GroupAlgebraElement> {
        let field = &basis.field;
        let mut c = vec![BigInt::zero(); field.degree()];
        for s in field.galois_group() {
            c[field.inv(s).index] = self.functional(&basis.act(s, alpha))?;
        }
        Ok(GroupAlgebraElement::from_scalars(c, self.ell, self.prec))
    }

    fn combine(parts: &[(&GaloisMorphism, BigInt)], label: String) -> GaloisMorphism {
        let first = parts[0].0;
        let q = arith::big_pow(first.ell, first.prec);
        let mut values = vec![BigInt::zero(); first.values.len()];
        for (g, r) in parts {
            assert_eq!(g.shift, 0);
            for (v, x) in values.iter_mut().zip(&g.values) {
                *v += x * r;
            }
        }
        GaloisMorphism {
            label,
            ell: first.ell,
            prec: first.prec,
            shift: 0,
            values: values.into_iter().map(|v| v.mod_floor(&q)).collect(),
        }
    }
}

/// `Log_λ` of every circular generator.
pub fn circular_logs(la: &LambdaAdic, basis: &CircularBasis) -> Result<Vec<LocalElem>> {
    basis.generators.par_iter().map(|g| la.log_of(&g.value)).collect()
}

/// `ϑ(η^α)` from the table of generator logarithms.
pub fn theta_of_exponents(la: &LambdaAdic, basis: &CircularBasis, logs: &[LocalElem], alpha: &[BigInt]) -> GroupAlgebraElement {
    let field = &basis.field;
    let mut out = GroupAlgebraElement::zero(field.degree(), la.degree(), la.ell, la.prec);
    for s in field.galois_group() {
        let moved = basis.act(s, alpha);
        let slot = &mut out.coeffs[field.inv(s).index];
        for (a, lg) in moved.iter().zip(logs) {
            if a.is_zero() {
                continue;
            }
            for (o, x) in slot.iter_mut().zip(lg) {
                *o += a * x;
            }
        }
    }
    out.reduced()
}

/// An admissible-candidate `α = ℓ^{-shift} a` with `a ∈ Z[G_F]`.
#[derive(Debug, Clone)]
pub struct Multiplier {
    pub label: String,
    pub a: GroupAlgebraElement,
    pub shift: u32,
}

/// `ε ↦ Σ_σ Tr(v_i^* L_α(ε^σ)) σ^{-1}` where `L_α(ε)` is the coefficient of
/// `1` in `αϑ(ε)`.
pub fn rho_from_dual_basis(
    la: &LambdaAdic,
    basis: &CircularBasis,
    logs: &[LocalElem],
    alpha: &Multiplier,
    i: usize,
) -> Result<GaloisMorphism> {
    let field = &basis.field;
    if alpha.shift + 1 > la.prec {
        return Err(Error::PrecisionCollapse("multiplier shift exceeds the precision".into()));
    }
    let dual = la.dual_basis();
    let q = la.modulus();
    let values = (0..basis.len())
        .map(|j| {
            // L_α(g_j) = Σ_τ a_τ Log(g_j^τ).
            let mut l = vec![BigInt::zero(); la.degree()];
            for t in field.galois_group() {
                let c = &alpha.a.coefficient(t)[0];
                if c.is_zero() {
                    continue;
                }
                let k = basis.act_index(t, j);
                for (o, x) in l.iter_mut().zip(&logs[k]) {
                    *o += c * x;
                }
            }
            let l = la.ring.reduce(l);
            la.trace(&la.ring.mul(&dual[i], &l)).mod_floor(&q)
        })
        .collect();
    Ok(GaloisMorphism {
        label: format!("ϑ[{}; v*_{i}]", alpha.label),
        ell: la.ell,
        prec: la.prec - alpha.shift,
        shift: alpha.shift,
        values,
    })
}

/// Discrete logarithm of `x` in the `ℓ`-part of `F_p^×`, modulo `ℓ^m`.
pub fn ell_index(x: u64, p: u64, ell: u64, m: u32) -> Result<u64> {
    let lm = ell.pow(m);
    if x % p == 0 || (p - 1) % lm != 0 {
        return Err(Error::InvalidInput(format!("no index of {x} modulo {ell}^{m} at {p}")));
    }
    let g = arith::primitive_root(p);
    let t = (p - 1) / lm;
    let h = arith::pow_mod(x, t, p);
    let gamma = arith::pow_mod(g, t, p);
    let gamma_inv = arith::pow_mod(gamma, lm - 1, p);
    let top = arith::pow_mod(gamma, ell.pow(m - 1), p);
    let mut k = 0u64;
    for i in 0..m {
        let rest = arith::mul_mod(h, arith::pow_mod(gamma_inv, k, p), p);
        let y = arith::pow_mod(rest, ell.pow(m - 1 - i), p);
        let digit = (0..ell)
            .find(|&d| arith::pow_mod(top, d, p) == y)
            .ok_or_else(|| Error::TheoremViolation("index digit not found".into()))?;
        k += digit * ell.pow(i);
    }
    Ok(k)
}

fn split_primes(field: &AbelianField, ell: u64, m: u32, count: usize) -> Vec<u64> {
    let step = ell.pow(m);
    let mut out = Vec::new();
    let mut p = 1u64;
    while out.len() < count {
        p += step;
        if arith::is_prime(p) && field.conductor() % p != 0 && ladic::places_above(field, p).len() == field.degree() {
            out.push(p);
        }
    }
    out
}

/// `ε ↦ ind_𝔭(ε) mod ℓ^m` at the place of `p` fixed by its embedding.
pub fn index_morphism(basis: &CircularBasis, p: u64, ell: u64, m: u32) -> Result<GaloisMorphism> {
    let emb = ladic::hensel_embed(&basis.field, p, 1)?;
    let pb = BigInt::from(p);
    let values = basis
        .generators
        .iter()
        .map(|g| {
            let im = emb.apply(&g.value)?;
            if im.den != BigInt::one() || im.num.is_zero() {
                return Err(Error::InvalidInput(format!("generator is not a unit at {p}")));
            }
            let x = u64::try_from(im.num.value().mod_floor(&pb)).expect("reduced below p");
            Ok(BigInt::from(ell_index(x, p, ell, m)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GaloisMorphism { label: format!("ind[{p}]"), ell, prec: m, shift: 0, values })
}

/// Choices for the battery of morphisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BatteryOptions {
    /// Split primes `p ≡ 1 mod ℓ^m` giving index functionals.
    pub index_primes: usize,
    /// Random combinations of the basic functionals.
    pub combinations: usize,
    pub seed: u64,
    /// Candidates tried per class when looking for auxiliary primes.
    pub aux_budget: u64,
}

impl Default for BatteryOptions {
    fn default() -> Self {
        BatteryOptions { index_primes: 3, combinations: 4, seed: 0x5eed, aux_budget: 200 }
    }
}

/// Coordinate functionals of `Log_λ` (for `ℓ ∤ f`), index functionals at
/// split primes (the given ones first) and seeded random combinations.
pub fn morphism_battery(
    basis: &CircularBasis,
    ell: u64,
    m: u32,
    opts: BatteryOptions,
    extra_primes: &[u64],
) -> Result<Vec<GaloisMorphism>> {
    let field = &basis.field;
    let mut out = Vec::new();
    if field.conductor() % ell != 0 {
        let la = LambdaAdic::new(field, ell, m)?;
        let logs = circular_logs(&la, basis)?;
        let one = Multiplier { label: "1".into(), a: GroupAlgebraElement::identity(field, ell, m), shift: 0 };
        for i in 0..la.degree() {
            out.push(rho_from_dual_basis(&la, basis, &logs, &one, i)?);
        }
    }
    let mut primes: Vec<u64> = extra_primes.to_vec();
    for p in split_primes(field, ell, m, opts.index_primes) {
        if !primes.contains(&p) {
            primes.push(p);
        }
    }
    let indexed: Vec<Result<GaloisMorphism>> = primes.par_iter().map(|&p| index_morphism(basis, p, ell, m)).collect();
    for g in indexed {
        out.push(g?);
    }
    if !out.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let q = ell.pow(m);
        let base = out.clone();
        for k in 0..opts.combinations {
            let parts: Vec<(&GaloisMorphism, BigInt)> = base.iter().map(|g| (g, BigInt::from(rng.gen_range(0..q)))).collect();
            out.push(GaloisMorphism::combine(&parts, format!("mix[{}#{k}]", opts.seed)));
        }
    }
    Ok(out)
}

/// Outcome of one check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skip,
    /// A failure that persisted at higher precision.
    Violation,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
            Status::Violation => "THEOREM VIOLATION (check implementation)",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub field: String,
    pub ell: u64,
    pub m: u32,
    pub check: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CheckRecord {
    fn new(field: &AbelianField, ell: u64, m: u32, check: &str) -> Self {
        CheckRecord {
            field: field.label(),
            ell,
            m,
            check: check.into(),
            status: Status::Skip,
            detail: String::new(),
            witness: None,
            seed: None,
        }
    }
}

fn witness_of(v: &AnnihilationVerdict) -> Option<String> {
    v.failures.first().map(|f| format!("{} on generator {} (coordinate {})", f.element, f.generator, f.coordinate))
}

/// Runs a check at `m`, re-running at `m + 4` on failure.
fn triaged(mut run: impl FnMut(u32) -> Result<CheckRecord>, m: u32) -> Result<CheckRecord> {
    let first = run(m)?;
    if first.status != Status::Fail {
        return Ok(first);
    }
    let second = run(m + 4)?;
    Ok(match second.status {
        Status::Fail => CheckRecord { status: Status::Violation, ..second },
        _ => second,
    })
}

fn images(
    basis: &CircularBasis,
    morphisms: &[GaloisMorphism],
    kernel: &[Vec<BigInt>],
) -> Result<Vec<(String, GroupAlgebraElement)>> {
    let mut out = Vec::new();
    for rho in morphisms {
        for (k, alpha) in kernel.iter().enumerate() {
            out.push((format!("{}(ε°_{k})", rho.label), rho.image(basis, alpha)?));
        }
    }
    Ok(out)
}

/// `ρ(Ẽ°_F)` annihilates `C̃l_F` for every morphism of the battery.
pub fn tpc_check(field: &AbelianField, ell: u64, m: u32, opts: BatteryOptions) -> Result<CheckRecord> {
    let basis = CircularBasis::new(field)?;
    triaged(
        |m| {
            let mut rec = CheckRecord::new(field, ell, m, "tpc");
            rec.seed = Some(opts.seed);
            let lcg = match classgrp::log_class_group(field, ell, m, LogClassOptions::default()) {
                Err(Error::Unsupported(why)) => {
                    rec.detail = why;
                    return Ok(rec);
                }
                other => other?,
            };
            if lcg.cl.is_trivial() {
                rec.status = Status::Pass;
                rec.detail = format!("trivial module: C̃l = {}", lcg.cl);
                return Ok(rec);
            }
            let kernel = units::circular_kernel(&basis, ell, m, false)?;
            let mut aux = Vec::new();
            for (c, _) in lcg.generator_classes() {
                if let Ok(a) = lcg.find_auxiliary_prime(&c, opts.aux_budget) {
                    aux.push(a.prime);
                }
            }
            let morphisms = morphism_battery(&basis, ell, m, opts, &aux)?;
            let elements = images(&basis, &morphisms, &kernel)?;
            let v = annihilation_check(&elements, &lcg)?;
            rec.detail = format!(
                "C̃l = {}; {} morphisms × {} generators of Ẽ° against {} classes",
                lcg.cl,
                morphisms.len(),
                kernel.len(),
                v.generators
            );
            rec.status = if v.pass() { Status::Pass } else { Status::Fail };
            rec.witness = witness_of(&v);
            Ok(rec)
        },
        m,
    )
}

/// `ρ(E°_F)` annihilates `Cl⁰_F` (real quadratic fields).
pub fn cp_check(field: &AbelianField, ell: u64, m: u32, opts: BatteryOptions) -> Result<CheckRecord> {
    let Some(q) = QuadField::from_field(field) else {
        let mut rec = CheckRecord::new(field, ell, m, "cp");
        rec.detail = "ordinary class groups are computed for quadratic fields only".into();
        return Ok(rec);
    };
    let basis = CircularBasis::new(field)?;
    let rel = QuadRelations::collect(&q, ell, Default::default())?;
    triaged(
        |m| {
            let mut rec = CheckRecord::new(field, ell, m, "cp");
            rec.seed = Some(opts.seed);
            let module = OrdinaryClassModule::new(&rel, m)?;
            let kernel = units::circular_kernel(&basis, ell, m, true)?;
            let morphisms = morphism_battery(&basis, ell, m, opts, &[])?;
            let elements = images(&basis, &morphisms, &kernel)?;
            let v = annihilation_check(&elements, &module)?;
            rec.detail = format!(
                "Cl⁰ = {}; {} morphisms × {} generators of E°",
                rel.degree_zero_class_group(m)?,
                morphisms.len(),
                kernel.len()
            );
            rec.status = if v.pass() { Status::Pass } else { Status::Fail };
            rec.witness = witness_of(&v);
            Ok(rec)
        },
        m,
    )
}

/// `ϑ` of the logarithmic units found among the relation elements of a
/// quadratic presentation: the free kernel of `d̃iv` on `ε` and the relations.
fn relation_log_unit_thetas(la: &LambdaAdic, rel: &QuadRelations, prec: u32) -> Result<Vec<GroupAlgebraElement>> {
    let field = &la.field;
    let q = &rel.q;
    let mut elems = vec![rel.unit.clone()];
    elems.extend(rel.relations.iter().map(|(x, _)| x.clone()));
    let cols = rel.columns.len();
    let mut search = prec + 4;
    let kernel = loop {
        let rows = elems
            .par_iter()
            .map(|x| {
                let dv = q.log_divisor(x, rel.ell, search)?;
                let mut row = vec![BigInt::zero(); cols];
                for (pl, c) in &dv.finite {
                    let j = rel.column_of(pl).ok_or_else(|| Error::InvalidInput(format!("{x} leaves the factor base")))?;
                    row[j] = BigInt::from(*c);
                }
                for (pl, c) in &dv.at_ell {
                    let j = rel.column_of(pl).expect("places above ℓ are columns");
                    row[j] = c.value().clone();
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        match units::saturated_kernel(&rows, cols, rel.ell, search, prec) {
            Err(Error::PrecisionCollapse(_)) if search < 4 * prec => search += prec,
            other => break other?,
        }
    };
    let group = field.galois_group();
    let logs: Vec<Vec<LocalElem>> = elems
        .par_iter()
        .map(|x| {
            group
                .iter()
                .map(|&s| la.log_of_quad(&if s == field.identity() { x.clone() } else { x.conj() }))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(kernel
        .iter()
        .map(|beta| {
            let mut t = GroupAlgebraElement::zero(field.degree(), la.degree(), la.ell, la.prec);
            for (b, lg) in beta.iter().zip(&logs) {
                if b.is_zero() {
                    continue;
                }
                for (s, l) in group.iter().zip(lg) {
                    for (o, x) in t.coeffs[field.inv(*s).index].iter_mut().zip(l) {
                        *o += b * x;
                    }
                }
            }
            t.reduced()
        })
        .collect())
}

/// Admissibility of one multiplier and, when admissible, annihilation of
/// `Z_λ ⊗ C̃l_F` by `αϑ(Ẽ°_F)` through the dual-basis morphisms.
#[derive(Debug, Clone, Serialize)]
pub struct SolomonCase {
    pub alpha: String,
    pub integrality: IntegralityVerdict,
    /// `αϑ(ε) = Σ_i ϑ_{v_i^*}(ε) v_i` on the generators of `Ẽ°_F`.
    pub decomposition: bool,
    pub annihilation: Option<bool>,
    pub witness: Option<String>,
}

fn multipliers(field: &AbelianField, ell: u64, prec: u32, seed: u64) -> Vec<Multiplier> {
    let n = field.degree();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![
        Multiplier { label: "1".into(), a: GroupAlgebraElement::identity(field, ell, prec), shift: 0 },
        Multiplier { label: "1/ℓ".into(), a: GroupAlgebraElement::identity(field, ell, prec), shift: 1 },
        Multiplier { label: "1/ℓ²".into(), a: GroupAlgebraElement::identity(field, ell, prec), shift: 2 },
        Multiplier { label: "N/ℓ".into(), a: GroupAlgebraElement::norm_element(field, ell, prec), shift: 1 },
    ];
    for k in 0..2 {
        let c: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(-4i64..=4))).collect();
        for shift in [0, 1] {
            out.push(Multiplier {
                label: format!("rand[{seed}#{k}]/ℓ^{shift}"),
                a: GroupAlgebraElement::from_scalars(c.clone(), ell, prec),
                shift,
            });
        }
    }
    out
}

/// `ℓ^{-k} a ϑ(ε)` as a local group-ring element, when integral.
fn scaled_theta(field: &AbelianField, alpha: &Multiplier, th: &GroupAlgebraElement) -> Result<GroupAlgebraElement> {
    let a = alpha.a.with_precision(th.prec);
    a.mul(field, th, None)
}

/// Théorème-11 style check for `ℓ ∤ f` over the multipliers `1`, `1/ℓ`,
/// `N/ℓ` and seeded random ones.
pub fn solomon_check(field: &AbelianField, ell: u64, m: u32, seed: u64) -> Result<(CheckRecord, Vec<SolomonCase>)> {
    let mut rec = CheckRecord::new(field, ell, m, "solomon");
    rec.seed = Some(seed);
    if field.conductor() % ell == 0 {
        rec.detail = "λ ramified: excluded from the λ-adic maps".into();
        return Ok((rec, Vec::new()));
    }
    let work = m + 2;
    let la = LambdaAdic::new(field, ell, work)?;
    let basis = CircularBasis::new(field)?;
    let logs = circular_logs(&la, &basis)?;
    let lcg = match classgrp::log_class_group(field, ell, m, LogClassOptions::default()) {
        Err(Error::Unsupported(why)) => {
            rec.detail = why;
            return Ok((rec, Vec::new()));
        }
        other => other?,
    };
    let circ = units::circular_kernel(&basis, ell, work, false)?;
    let mut thetas: Vec<(String, GroupAlgebraElement)> = circ
        .iter()
        .enumerate()
        .map(|(k, a)| (format!("ε°_{k}"), theta_of_exponents(&la, &basis, &logs, a)))
        .collect();
    if let Some(rel) = lcg.quadratic_relations() {
        for (k, t) in relation_log_unit_thetas(&la, rel, work)?.into_iter().enumerate() {
            thetas.push((format!("ẽ_{k}"), t));
        }
    }
    let mut cases = Vec::new();
    for alpha in multipliers(field, ell, work, seed) {
        let mut integral = true;
        let mut valuation = work;
        let mut witness = None;
        for (label, th) in &thetas {
            let v = scaled_theta(field, &alpha, th)?.valuation();
            valuation = valuation.min(v);
            if v < alpha.shift && integral {
                integral = false;
                witness = Some(label.clone());
            }
        }
        let integrality = IntegralityVerdict { integral, valuation, shift: alpha.shift, witness };
        let mut case =
            SolomonCase { alpha: alpha.label.clone(), integrality, decomposition: true, annihilation: None, witness: None };
        if integral {
            let rhos: Vec<GaloisMorphism> =
                (0..la.degree()).map(|i| rho_from_dual_basis(&la, &basis, &logs, &alpha, i)).collect::<Result<_>>()?;
            let mut elements = Vec::new();
            for (k, a) in circ.iter().enumerate() {
                let whole = scaled_theta(field, &alpha, &thetas[k].1)?.divide_by_ell(alpha.shift)?;
                let parts: Vec<GroupAlgebraElement> = rhos.iter().map(|r| r.image(&basis, a)).collect::<Result<_>>()?;
                // Σ_i ϑ_{v_i^*}(ε) v_i with v_i = t^i.
                for s in field.galois_group() {
                    let c = whole.coefficient(s);
                    for (i, p) in parts.iter().enumerate() {
                        if p.coefficient(s)[0] != c[i] {
                            case.decomposition = false;
                        }
                    }
                }
                for (r, p) in rhos.iter().zip(parts) {
                    elements.push((format!("{}(ε°_{k})", r.label), p));
                }
            }
            let v = annihilation_check(&elements, &lcg)?;
            case.annihilation = Some(v.pass());
            case.witness = witness_of(&v);
        }
        cases.push(case);
    }
    let admissible = cases.iter().filter(|c| c.integrality.integral).count();
    let ok = cases.iter().all(|c| c.decomposition && c.annihilation != Some(false));
    rec.status = if ok { Status::Pass } else { Status::Fail };
    rec.detail = format!(
        "C̃l = {}; Z_λ of degree {}; {admissible}/{} multipliers admissible on {} generators of Ẽ",
        lcg.cl,
        la.degree(),
        cases.len(),
        thetas.len()
    );
    rec.witness = cases.iter().find_map(|c| c.witness.clone());
    if rec.status == Status::Fail {
        rec.status = Status::Violation;
    }
    Ok((rec, cases))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::eta;
    use proptest::prelude::*;
    use rand::Rng;

    fn quad(d: u64) -> AbelianField {
        AbelianField::quadratic(d).unwrap()
    }

    fn sextic() -> AbelianField {
        AbelianField::from_subgroup(21, &[20]).unwrap()
    }

    fn scalar(field: &AbelianField, c: &[i64], ell: u64, prec: u32) -> GroupAlgebraElement {
        GroupAlgebraElement::from_scalars(c.iter().take(field.degree()).map(|&x| BigInt::from(x)).collect(), ell, prec)
    }

    #[test]
    fn group_ring_basics() {
        let f = sextic();
        let one = GroupAlgebraElement::identity(&f, 3, 5);
        let x = scalar(&f, &[1, 2, 0, -1, 4, 7], 3, 5);
        assert_eq!(one.mul(&f, &x, None).unwrap(), x);
        let n = GroupAlgebraElement::norm_element(&f, 3, 5);
        for tau in f.galois_group() {
            assert_eq!(n.act(&f, tau), n);
            let e_tau = one.act(&f, tau);
            assert_eq!(e_tau.mul(&f, &x, None).unwrap(), x.act(&f, tau));
        }
        assert!(GroupAlgebraElement::zero(6, 1, 3, 5).is_zero());
        assert_eq!(x.scale(&BigInt::from(243)), GroupAlgebraElement::zero(6, 1, 3, 5));
        assert_eq!(x.augmentation(), vec![BigInt::from(13)]);
    }

    proptest! {
        #[test]
        fn convolution_is_a_ring_product(a in proptest::collection::vec(-50i64..50, 6),
                                         b in proptest::collection::vec(-50i64..50, 6),
                                         c in proptest::collection::vec(-50i64..50, 6)) {
            let f = sextic();
            let (x, y, z) = (scalar(&f, &a, 5, 4), scalar(&f, &b, 5, 4), scalar(&f, &c, 5, 4));
            let xy = x.mul(&f, &y, None).unwrap();
            prop_assert_eq!(&xy, &y.mul(&f, &x, None).unwrap());
            prop_assert_eq!(xy.mul(&f, &z, None).unwrap(), x.mul(&f, &y.mul(&f, &z, None).unwrap(), None).unwrap());
            prop_assert_eq!(x.mul(&f, &y.add(&z), None).unwrap(), xy.add(&x.mul(&f, &z, None).unwrap()));
            let q = BigInt::from(625);
            let aug = (&x.augmentation()[0] * &y.augmentation()[0]).mod_floor(&q);
            prop_assert_eq!(xy.augmentation()[0].clone(), aug);
        }

        #[test]
        fn log_is_a_homomorphism(a in -30i64..30, b in -30i64..30, c in -30i64..30, e in -30i64..30) {
            for d in [2u64, 13] {
                let la = LambdaAdic::new(&quad(d), 3, 8).unwrap();
                let x = QuadElem::from_ints(a, b, 1);
                let y = QuadElem::from_ints(c, e, 1);
                prop_assume!(!x.is_zero() && !y.is_zero());
                let lx = la.log_of_quad(&x).unwrap();
                let ly = la.log_of_quad(&y).unwrap();
                let lxy = la.log_of_quad(&x.mul(&y, d)).unwrap();
                let q = la.modulus();
                let sum: Vec<BigInt> = lx.iter().zip(&ly).map(|(u, v)| (u + v).mod_floor(&q)).collect();
                prop_assert_eq!(lxy, sum);
            }
        }
    }

    #[test]
    fn log_vanishes_on_ell_and_torsion() {
        let la = LambdaAdic::new(&quad(2), 3, 8).unwrap();
        for x in [QuadElem::int(3), QuadElem::int(-1), QuadElem::int(-9)] {
            assert!(la.log_of_quad(&x).unwrap().iter().all(Zero::is_zero));
        }
    }

    /// Oracle: the Frobenius of `Z_3[t]/(t² + 1)` is `t ↦ -t`, and it induces
    /// the nontrivial automorphism of `Q(√2)` at the inert prime 3.
    #[test]
    fn theta_on_sqrt2() {
        let f = quad(2);
        let la = LambdaAdic::new(&f, 3, 8).unwrap();
        assert_eq!(la.ring.modulus, vec![1, 0, 1]);
        let q = QuadField::new(2).unwrap();
        let eps = q.to_cyclo(&QuadElem::from_ints(3, -2, 1));
        let th = theta(&la, &eps).unwrap();
        let sigma = f.galois_group().into_iter().find(|s| *s != f.identity()).unwrap();
        let l1 = th.coefficient(f.identity()).clone();
        let ls = th.coefficient(sigma).clone();
        let m = la.modulus();
        assert!(l1.iter().zip(&ls).all(|(a, b)| (a + b).mod_floor(&m).is_zero()));
        let frob: Vec<BigInt> = vec![l1[0].clone(), (-&l1[1]).mod_floor(&m)];
        assert_eq!(ls, frob);
        assert!(l1[0].is_zero());
        assert!(!l1[1].is_zero());
        assert!(theta(&la, &CycloElement::one(8)).unwrap().is_zero());
    }

    /// Oracle: scalar Iwasawa logarithms of the embedded conjugates.
    #[test]
    fn theta_on_sqrt13_is_scalar() {
        let f = quad(13);
        let la = LambdaAdic::new(&f, 3, 8).unwrap();
        assert_eq!(la.degree(), 1);
        let q = QuadField::new(13).unwrap();
        let x = QuadElem::new(BigInt::from(3), BigInt::one(), BigInt::from(2));
        let eps = q.to_cyclo(&x.mul(&x, 13));
        let th = theta(&la, &eps).unwrap();
        let emb = ladic::hensel_embed(&f, 3, 8).unwrap();
        for s in f.galois_group() {
            let im = emb.apply(&eps.act(s, &f)).unwrap();
            let direct = ladic::iwasawa_log(&im.num, 8).unwrap();
            let den = ladic::iwasawa_log_rational(&im.den, &BigInt::one(), 3, 8).unwrap();
            let expect = (direct.value() - den.value()).mod_floor(&la.modulus());
            assert_eq!(th.coefficient(f.inv(s))[0], expect);
        }
    }

    #[test]
    fn theta_rejects_non_units() {
        let f = quad(13);
        let la = LambdaAdic::new(&f, 3, 8).unwrap();
        let q = QuadField::new(13).unwrap();
        let pi = q.to_cyclo(&QuadElem::new(BigInt::from(1), BigInt::one(), BigInt::from(2)));
        assert!(matches!(theta(&la, &pi), Err(Error::InvalidInput(_))));
        assert!(matches!(LambdaAdic::new(&quad(3), 3, 8), Err(Error::Ramified(_))));
    }

    /// Oracle: the inverse of the 2×2 trace matrix by the adjugate formula.
    #[test]
    fn dual_basis_of_inert_ring() {
        for d in [2u64, 5, 254] {
            let la = LambdaAdic::new(&quad(d), 3, 6).unwrap();
            assert_eq!(la.degree(), 2);
            let m = la.modulus();
            let t: Vec<Vec<BigInt>> = (0..2).map(|i| (0..2).map(|j| la.trace(&la.power_basis(i + j))).collect()).collect();
            let det = (&t[0][0] * &t[1][1] - &t[0][1] * &t[1][0]).mod_floor(&m);
            let di = det.extended_gcd(&m).x;
            let adj = [[t[1][1].clone(), -&t[0][1]], [-&t[1][0], t[0][0].clone()]];
            let dual = la.dual_basis();
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(dual[i][j], (&adj[i][j] * &di).mod_floor(&m));
                }
            }
            let x = vec![BigInt::from(17), BigInt::from(-40)];
            let x = la.ring.reduce(x);
            let back: Vec<BigInt> = la.trace_coordinates(&dual, &x).into_iter().map(|c| c.mod_floor(&m)).collect();
            assert_eq!(back, x.iter().map(|c| c.mod_floor(&m)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn solomon_elements() {
        let (el, v) = solomon_element(&quad(2), 3, 8).unwrap();
        let el = el.unwrap();
        assert_eq!(el.prec, 7);
        assert_eq!(el.rank(), 2);
        assert!(v.integral);
        let la = LambdaAdic::new(&quad(2), 3, 8).unwrap();
        let f = quad(2);
        let e = eta(&f).unwrap();
        let lowest = f
            .galois_group()
            .into_iter()
            .flat_map(|s| la.log_of(&e.act(s, &f)).unwrap())
            .map(|c| crate::snf::val_mod(&c, 3, 8))
            .min()
            .unwrap();
        assert_eq!(v.valuation, lowest);
        let (el, _) = solomon_element(&quad(13), 3, 8).unwrap();
        assert_eq!(el.unwrap().rank(), 1);
        assert!(matches!(solomon_element(&quad(3), 3, 8), Err(Error::Ramified(_))));
    }

    #[test]
    fn dual_basis_morphisms_decompose_theta() {
        for d in [13u64, 2] {
            let f = quad(d);
            let la = LambdaAdic::new(&f, 3, 8).unwrap();
            let basis = CircularBasis::new(&f).unwrap();
            let logs = circular_logs(&la, &basis).unwrap();
            let one = Multiplier { label: "1".into(), a: GroupAlgebraElement::identity(&f, 3, 8), shift: 0 };
            let alpha = vec![BigInt::from(2), BigInt::from(-1)];
            let th = theta_of_exponents(&la, &basis, &logs, &alpha);
            for i in 0..la.degree() {
                let rho = rho_from_dual_basis(&la, &basis, &logs, &one, i).unwrap();
                assert_eq!(rho.image(&basis, &alpha).unwrap(), th.coordinate(i));
            }
        }
    }

    #[test]
    fn theta_is_equivariant_on_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fields = [quad(2), quad(13), quad(257), AbelianField::from_subgroup(7, &[6]).unwrap()];
        let mut cases = 0;
        while cases < 20 {
            let f = &fields[cases % fields.len()];
            let basis = CircularBasis::new(f).unwrap();
            let la = LambdaAdic::new(f, 5, 6).unwrap();
            let logs = circular_logs(&la, &basis).unwrap();
            let alpha: Vec<BigInt> = (0..basis.len()).map(|_| BigInt::from(rng.gen_range(-3i64..=3))).collect();
            let group = f.galois_group();
            let tau = group[rng.gen_range(0..group.len())];
            let direct = theta_of_exponents(&la, &basis, &logs, &basis.act(tau, &alpha));
            assert_eq!(direct, theta_of_exponents(&la, &basis, &logs, &alpha).act(f, tau));
            let small: Vec<i64> = alpha.iter().map(|a| i64::try_from(a).unwrap()).collect();
            let eps = basis.evaluate(&small).unwrap();
            if la.is_unit(&eps).unwrap() {
                assert_eq!(theta(&la, &eps.act(tau, f)).unwrap(), direct);
            }
            cases += 1;
        }
    }

    #[test]
    fn morphisms_are_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fields = [quad(2), quad(257), sextic(), AbelianField::from_subgroup(9, &[8]).unwrap()];
        let mut cases = 0;
        for f in &fields {
            let basis = CircularBasis::new(f).unwrap();
            let battery = morphism_battery(&basis, 3, 4, BatteryOptions { index_primes: 1, combinations: 1, seed: 3, ..Default::default() }, &[]).unwrap();
            for _ in 0..5 {
                let rho = &battery[rng.gen_range(0..battery.len())];
                let alpha: Vec<BigInt> = (0..basis.len()).map(|_| BigInt::from(rng.gen_range(0..81))).collect();
                let group = f.galois_group();
                let tau = group[rng.gen_range(0..group.len())];
                let lhs = rho.image(&basis, &basis.act(tau, &alpha)).unwrap();
                assert_eq!(lhs, rho.image(&basis, &alpha).unwrap().act(f, tau), "{} on {f}", rho.label);
                cases += 1;
            }
        }
        assert_eq!(cases, 20);
    }

    /// Oracle: exhaustive search in the cyclic group generated by a
    /// primitive root.
    #[test]
    fn index_matches_brute_force() {
        let (p, ell, m) = (163u64, 3u64, 4u32);
        let g = arith::primitive_root(p);
        for x in [2u64, 5, 81, 162] {
            let k = (0..p - 1).find(|&k| arith::pow_mod(g, k, p) == x).unwrap();
            assert_eq!(ell_index(x, p, ell, m).unwrap(), k % 81);
        }
        assert!(ell_index(2, 7, 3, 2).is_err());
    }

    #[test]
    fn trivial_annihilators() {
        let f = quad(257);
        let lcg = classgrp::log_class_group(&f, 3, 8, LogClassOptions::default()).unwrap();
        assert_eq!(lcg.cl.to_string(), "Z/3 (precision 8)");
        let zero = GroupAlgebraElement::zero(2, 1, 3, 8);
        let ellm = GroupAlgebraElement::identity(&f, 3, 8).scale(&BigInt::from(6561));
        let v = annihilation_check(&[("0".into(), zero), ("ℓ^m".into(), ellm)], &lcg).unwrap();
        assert!(v.pass());
        assert_eq!(v.pairs, 2);
        let one = GroupAlgebraElement::identity(&f, 3, 8);
        let v = annihilation_check(&[("1".into(), one)], &lcg).unwrap();
        assert!(!v.pass());
        // σ acts as -1 here, so 1 + σ kills and 1 - σ does not.
        let plus = GroupAlgebraElement::norm_element(&f, 3, 8);
        let minus = GroupAlgebraElement::from_scalars(
            f.galois_group().iter().map(|s| BigInt::from(if *s == f.identity() { 1 } else { -1 })).collect(),
            3,
            8,
        );
        assert!(annihilation_check(&[("1+σ".into(), plus)], &lcg).unwrap().pass());
        assert!(!annihilation_check(&[("1-σ".into(), minus)], &lcg).unwrap().pass());
    }

    #[test]
    fn ordinary_module_of_sqrt79() {
        let q = QuadField::new(79).unwrap();
        let rel = QuadRelations::collect(&q, 3, Default::default()).unwrap();
        let module = OrdinaryClassModule::new(&rel, 6).unwrap();
        let live = module.generators().iter().filter(|g| !module.is_zero(g)).count();
        assert!(live > 0);
        let one = GroupAlgebraElement::identity(&q.field, 3, 6);
        assert!(!annihilation_check(&[("1".into(), one.clone())], &module).unwrap().pass());
        assert!(annihilation_check(&[("3".into(), one.scale(&BigInt::from(3)))], &module).unwrap().pass());
    }

    #[test]
    fn theorem_checks_on_nontrivial_fields() {
        let opts = BatteryOptions { index_primes: 2, combinations: 2, seed: 1, ..Default::default() };
        let r = tpc_check(&quad(257), 3, 8, opts).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
        assert!(r.detail.starts_with("C̃l = Z/3"));
        let r = cp_check(&quad(79), 3, 6, opts).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
        let (r, cases) = solomon_check(&quad(257), 3, 8, 2).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
        assert!(cases.iter().all(|c| c.decomposition));
        assert!(cases.iter().any(|c| c.annihilation == Some(true) && c.integrality.shift == 1));
        let (r, _) = solomon_check(&quad(3), 3, 8, 2).unwrap();
        assert_eq!(r.status, Status::Skip);
    }
}
