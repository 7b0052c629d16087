//! Logarithmic units, circular generators and the logarithmic circular units
//! `Ẽ°_F = Ẽ_F ∩ R°_F`, computed at finite ℓ-adic precision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::{AbelianField, GaloisElement};
use crate::arith;
use crate::cyclo::{eta, eta_twisted, CycloElement, FormalProduct};
use crate::error::{Error, Result};
use crate::ladic::{self, LogDivisor, Place};
use crate::snf::Snf;

/// Outcome of a log-unit test. `holds` is only a statement modulo `ℓ^prec`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogUnitVerdict {
    pub ell: u64,
    pub prec: u32,
    pub holds: bool,
    /// First place with a nonzero coefficient, and that coefficient.
    pub witness: Option<(String, String)>,
}

impl LogUnitVerdict {
    fn from_divisor(d: &LogDivisor) -> Self {
        let modulus = arith::big_pow(d.ell, d.prec);
        let witness = d
            .finite
            .iter()
            .find(|(_, c)| !BigInt::from(*c).mod_floor(&modulus).is_zero())
            .map(|(pl, c)| (pl.label(), c.to_string()))
            .or_else(|| {
                d.at_ell
                    .iter()
                    .find(|(_, c)| !c.is_zero())
                    .map(|(pl, c)| (pl.label(), c.symmetric().to_string()))
            });
        LogUnitVerdict { ell: d.ell, prec: d.prec, holds: witness.is_none(), witness }
    }
}

impl std::fmt::Display for LogUnitVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.witness {
            None => write!(f, "true at precision {}", self.prec),
            Some((pl, v)) => write!(f, "false: nu~ at {pl} is {v} (precision {})", self.prec),
        }
    }
}

pub fn is_log_unit(field: &AbelianField, x: &CycloElement, ell: u64, m: u32) -> Result<LogUnitVerdict> {
    Ok(LogUnitVerdict::from_divisor(&ladic::log_divisor(field, x, ell, m)?))
}

pub fn is_log_unit_product(field: &AbelianField, x: &FormalProduct, ell: u64, m: u32) -> Result<LogUnitVerdict> {
    Ok(LogUnitVerdict::from_divisor(&ladic::log_divisor_product(field, x, ell, m)?))
}

/// `η_F` when `ℓ | f`, `η̃_F` otherwise: the element predicted to be a
/// logarithmic unit.
pub fn predicted_log_unit(field: &AbelianField, ell: u64) -> Result<FormalProduct> {
    if field.conductor() % ell == 0 {
        Ok(FormalProduct::single(eta(field)?))
    } else {
        eta_twisted(field, ell)
    }
}

/// `η_K^σ` for one subfield `K` and one element of `G_K`, lifted to the
/// conductor of `F`.
#[derive(Debug, Clone)]
pub struct CircularGenerator {
    pub subfield: usize,
    /// A lift of the element of `G_K` to `G_F`.
    pub sigma: GaloisElement,
    pub value: CycloElement,
}

/// The images of the `η_K` (one per subfield, with all their conjugates)
/// generating `R°_F` modulo torsion. `-1` is dropped: it is trivial after
/// tensoring with `Z_ℓ` for odd `ℓ`.
#[derive(Debug, Clone)]
pub struct CircularBasis {
    pub field: AbelianField,
    pub subfields: Vec<AbelianField>,
    pub generators: Vec<CircularGenerator>,
}

impl CircularBasis {
    pub fn new(field: &AbelianField) -> Result<Self> {
        let subfields = field.subfield_lattice();
        let f = field.conductor();
        let mut generators = Vec::new();
        for (k, sub) in subfields.iter().enumerate() {
            let base = eta(sub)?.lift(f);
            let mut seen = vec![false; sub.degree()];
            for sigma in field.galois_group() {
                let r = field.restrict(sigma, sub);
                if std::mem::replace(&mut seen[r.index], true) {
                    continue;
                }
                generators.push(CircularGenerator { subfield: k, sigma, value: base.act(sigma, field) });
            }
        }
        Ok(CircularBasis { field: field.clone(), subfields, generators })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn label(&self, i: usize) -> String {
        let g = &self.generators[i];
        format!("eta[{}]^{}", self.subfields[g.subfield].label(), g.sigma.residue)
    }

    /// Index of the generator `τ·g_i`.
    pub fn act_index(&self, tau: GaloisElement, i: usize) -> usize {
        let g = &self.generators[i];
        let sub = &self.subfields[g.subfield];
        let target = self.field.restrict(self.field.mul(tau, g.sigma), sub);
        self.generators
            .iter()
            .position(|h| h.subfield == g.subfield && self.field.restrict(h.sigma, sub) == target)
            .expect("generators are closed under conjugation")
    }

    /// `τ` acting on an exponent vector.
    pub fn act(&self, tau: GaloisElement, alpha: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); alpha.len()];
        for (i, a) in alpha.iter().enumerate() {
            out[self.act_index(tau, i)] += a;
        }
        out
    }

    /// `Π g_i^{α_i}`, exactly; the exponents are taken as given integers.
    pub fn evaluate(&self, alpha: &[i64]) -> Result<CycloElement> {
        let terms = self
            .generators
            .iter()
            .zip(alpha)
            .filter(|(_, &a)| a != 0)
            .map(|(g, &a)| (g.value.clone(), a))
            .collect();
        FormalProduct { terms }.evaluate(&self.field)
    }
}

/// `α ↦ d̃iv(η^α)` on the circular generators, together with the ordinary
/// valuations at every place above the primes dividing `f` or equal to `ℓ`.
#[derive(Debug, Clone)]
pub struct ValuationMatrix {
    pub ell: u64,
    pub prec: u32,
    /// Places above `p | f`, `p ≠ ℓ`, then the places above `ℓ`.
    pub columns: Vec<Place>,
    /// `ν̃` entries modulo `ℓ^prec`, one row per generator.
    pub rows: Vec<Vec<BigInt>>,
    /// Ordinary valuations at the places of `columns` (the ℓ-places included).
    pub ordinary: Vec<Vec<i64>>,
}

impl ValuationMatrix {
    /// Rows for `η_K^σ` come from the row of `η_K` through
    /// `ν̃_{τλ}(η^σ) = ν̃_{σ^{-1}τλ}(η)`.
    pub fn build(basis: &CircularBasis, ell: u64, m: u32) -> Result<Self> {
        let field = &basis.field;
        let mut columns = Vec::new();
        for (p, _) in arith::factor(field.conductor()) {
            if p != ell {
                columns.extend(ladic::places_above(field, p));
            }
        }
        columns.extend(ladic::places_above(field, ell));
        let base: Vec<Result<(Vec<BigInt>, Vec<i64>)>> = (0..basis.subfields.len())
            .into_par_iter()
            .map(|k| {
                let g = basis.generators.iter().find(|g| g.subfield == k).expect("one generator per subfield");
                let x = g.value.act(field.inv(g.sigma), field);
                let mut log_row = Vec::with_capacity(columns.len());
                let mut ord_row = Vec::with_capacity(columns.len());
                for pl in &columns {
                    let v = ladic::valuation(field, &x, pl)?;
                    ord_row.push(v);
                    if pl.prime == ell {
                        log_row.push(ladic::log_valuation(field, &x, pl, ell, m)?.value().clone());
                    } else {
                        log_row.push(BigInt::from(v));
                    }
                }
                Ok((log_row, ord_row))
            })
            .collect();
        let base: Vec<(Vec<BigInt>, Vec<i64>)> = base.into_iter().collect::<Result<_>>()?;
        let mut rows = Vec::with_capacity(basis.len());
        let mut ordinary = Vec::with_capacity(basis.len());
        for g in &basis.generators {
            let back = field.inv(g.sigma);
            let perm: Vec<usize> = columns
                .iter()
                .map(|pl| {
                    let moved = ladic::conjugate_place(field, pl, back);
                    columns.iter().position(|q| *q == moved).expect("columns are Galois stable")
                })
                .collect();
            let (lr, or) = &base[g.subfield];
            rows.push(perm.iter().map(|&j| lr[j].clone()).collect());
            ordinary.push(perm.iter().map(|&j| or[j]).collect());
        }
        Ok(ValuationMatrix { ell, prec: m, columns, rows, ordinary })
    }

    pub fn with_precision(&self, m: u32) -> Self {
        assert!(m <= self.prec);
        let q = arith::big_pow(self.ell, m);
        let rows = self.rows.iter().map(|r| r.iter().map(|x| x.mod_floor(&q)).collect()).collect();
        ValuationMatrix { prec: m, rows, ..self.clone() }
    }

    pub fn snf(&self) -> Snf {
        Snf::compute(&self.rows, self.columns.len(), self.ell, self.prec)
    }

    /// `d̃iv(η^α)` as a row vector modulo `ℓ^prec`.
    pub fn apply(&self, alpha: &[BigInt]) -> Vec<BigInt> {
        crate::snf::row_times(alpha, &self.rows, self.columns.len(), &arith::big_pow(self.ell, self.prec))
    }
}

/// Generators modulo `ℓ^m` of the `Z_ℓ`-kernel `{x : x·M = 0}` of a matrix
/// known modulo `ℓ^prec`: the free rows of the Smith row transform. They
/// are exact modulo `ℓ^m` once `prec ≥ m + e`, `e` the largest finite
/// invariant exponent.
pub fn saturated_kernel(rows: &[Vec<BigInt>], cols: usize, ell: u64, prec: u32, m: u32) -> Result<Vec<Vec<BigInt>>> {
    let snf = Snf::compute(rows, cols, ell, prec);
    let diag = rows.len().min(cols);
    let e_max = snf.exponents[..diag].iter().copied().filter(|&e| e < prec).max().unwrap_or(0);
    if prec < m + e_max {
        return Err(Error::PrecisionCollapse(format!(
            "kernel needs precision {} (largest invariant ℓ^{e_max})",
            m + e_max
        )));
    }
    let q = arith::big_pow(ell, m);
    Ok((0..rows.len())
        .filter(|&i| i >= diag || snf.exponents[i] == prec)
        .map(|i| snf.left[i].iter().map(|x| x.mod_floor(&q)).collect())
        .collect())
}

/// Exponent vectors generating `Ẽ°_F` modulo `ℓ^m` (`ordinary = false`) or
/// the circular units `E°_F` (`ordinary = true`), with the precision raised
/// until the kernel is certified.
pub fn circular_kernel(basis: &CircularBasis, ell: u64, m: u32, ordinary: bool) -> Result<Vec<Vec<BigInt>>> {
    let mut prec = m + 4;
    loop {
        let rows = if ordinary {
            let vm = ValuationMatrix::build(basis, ell, 1)?;
            crate::snf::from_i64(&vm.ordinary)
        } else {
            ValuationMatrix::build(basis, ell, prec)?.rows
        };
        let cols = rows.first().map_or(0, Vec::len);
        match saturated_kernel(&rows, cols, ell, prec, m) {
            Err(Error::PrecisionCollapse(_)) if prec < 4 * m + 16 => prec += m,
            other => return other,
        }
    }
}

/// Rank over `Q` of an integer matrix (fraction-free elimination).
pub fn rational_rank(matrix: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = matrix.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(rank, p);
        let pivot = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let k = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x = &*x * &pivot[c] - &k * y;
            }
            let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if !g.is_zero() {
                for x in row.iter_mut() {
                    *x = &*x / &g;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Presentation of `Ẽ°_F` modulo `ℓ^prec` as a kernel in exponent space.
#[derive(Debug, Clone, Serialize)]
pub struct CircularLogUnits {
    pub field: String,
    pub ell: u64,
    pub prec: u32,
    pub generators: usize,
    /// `Z`-rank of `R°_F`: `[F:Q] - 1` plus the rank of its ordinary valuations.
    pub circular_rank: usize,
    /// Rank of `d̃iv(R°_F)` seen at `prec` and at `prec + 2`.
    pub image_rank: usize,
    pub image_rank_next: usize,
    /// Free rank of `Ẽ°_F`: `circular_rank - image_rank`.
    pub rank: usize,
    pub stable: bool,
    /// Order exponents of the kernel generators in exponent space, sorted.
    pub kernel_invariants: Vec<u32>,
    #[serde(skip)]
    pub kernel: Vec<(Vec<BigInt>, u32)>,
}

pub fn circular_log_units(field: &AbelianField, ell: u64, m: u32) -> Result<CircularLogUnits> {
    let basis = CircularBasis::new(field)?;
    let vm = ValuationMatrix::build(&basis, ell, m + 2)?;
    circular_log_units_from(&basis, &vm, m)
}

pub fn circular_log_units_from(basis: &CircularBasis, vm: &ValuationMatrix, m: u32) -> Result<CircularLogUnits> {
    if vm.prec < m + 2 {
        return Err(Error::InvalidInput(format!("valuation matrix needs precision {}", m + 2)));
    }
    let ell = vm.ell;
    let at = vm.with_precision(m).snf();
    let next = vm.with_precision(m + 2).snf();
    let image_rank = at.rank();
    let image_rank_next = next.rank();
    let circular_rank = basis.field.degree() - 1 + rational_rank(&vm.ordinary);
    let rank = circular_rank.checked_sub(image_rank).ok_or_else(|| {
        Error::PrecisionCollapse(format!("image rank {image_rank} exceeds circular rank {circular_rank}"))
    })?;
    let kernel = at.left_kernel();
    let mut kernel_invariants: Vec<u32> = kernel.iter().map(|(_, e)| *e).collect();
    kernel_invariants.sort_unstable();
    Ok(CircularLogUnits {
        field: basis.field.label(),
        ell,
        prec: m,
        generators: basis.len(),
        circular_rank,
        image_rank,
        image_rank_next,
        rank,
        stable: image_rank == image_rank_next,
        kernel_invariants,
        kernel,
    })
}

/// Which description of the character of `Ẽ°_F` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RankCase {
    /// `ℓ` has several places: `F° ≠ Q`.
    Split,
    /// Several places, and a subfield of `ℓ`-power conductor puts `ℓ`
    /// itself (a logarithmic unit of nontrivial norm to `F°`) into `R°_F`.
    SplitWithEllLevel,
    /// One place above `ℓ`, ramified, with a subfield of `ℓ`-power conductor.
    OnePlaceRamified,
    /// One place above `ℓ`, ramified, but no subfield of `ℓ`-power conductor:
    /// no circular element has a nonzero valuation at `ℓ`.
    OnePlaceRamifiedNoEllLevel,
    /// One place above `ℓ`, unramified.
    OnePlaceUnramified,
}

impl std::fmt::Display for RankCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RankCase::Split => "(i)",
            RankCase::SplitWithEllLevel => "(i')",
            RankCase::OnePlaceRamified => "(ii,a)",
            RankCase::OnePlaceRamifiedNoEllLevel => "(ii,a')",
            RankCase::OnePlaceUnramified => "(ii,b)",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    pub field: String,
    pub ell: u64,
    pub prec: u32,
    pub case: RankCase,
    pub expected: usize,
    pub computed: usize,
    pub stable: bool,
    pub pass: bool,
}

/// Subfields `K ≠ Q` of `F` whose conductor is a power of `ℓ`.
pub fn ell_power_subfields(field: &AbelianField, ell: u64) -> Vec<AbelianField> {
    field
        .subfield_lattice()
        .into_iter()
        .filter(|k| k.conductor() > 1 && arith::factor(k.conductor()).iter().all(|&(p, _)| p == ell))
        .collect()
}

/// Case and the predicted degree of the character: `[G:D](|D|-1)`, `|G|`
/// or `|G|-1`, plus one for the trivial character carried by `ℓ` whenever `F`
/// has a subfield of `ℓ`-power conductor (then `ℓ = N_{K/Q}(η_K) ∈ R°_F`).
pub fn expected_rank(field: &AbelianField, ell: u64) -> (RankCase, usize) {
    let dec = field.decomposition_data(ell);
    let n = field.degree();
    let level = !ell_power_subfields(field, ell).is_empty();
    match (dec.places_above > 1, dec.ramification_index > 1, level) {
        (true, _, false) => (RankCase::Split, dec.places_above * (dec.subgroup.len() - 1)),
        (true, _, true) => (RankCase::SplitWithEllLevel, dec.places_above * (dec.subgroup.len() - 1) + 1),
        (false, true, true) => (RankCase::OnePlaceRamified, n),
        (false, true, false) => (RankCase::OnePlaceRamifiedNoEllLevel, n - 1),
        (false, false, _) => (RankCase::OnePlaceUnramified, n - 1),
    }
}

pub fn car_rank_check(field: &AbelianField, ell: u64, m: u32) -> Result<RankReport> {
    let units = circular_log_units(field, ell, m)?;
    Ok(rank_report(field, &units))
}

pub fn rank_report(field: &AbelianField, units: &CircularLogUnits) -> RankReport {
    let (case, expected) = expected_rank(field, units.ell);
    RankReport {
        field: field.label(),
        ell: units.ell,
        prec: units.prec,
        case,
        expected,
        computed: units.rank,
        stable: units.stable,
        pass: units.stable && units.rank == expected,
    }
}

/// `Q_n`: the degree-`ℓ^n` subfield of `Q(ζ_{ℓ^{n+1}})`.
pub fn cyclotomic_layer(ell: u64, n: u32) -> AbelianField {
    if n == 0 {
        return AbelianField::rationals();
    }
    let q = ell.pow(n + 1);
    let h: Vec<u64> = arith::units_mod(q).into_iter().filter(|&a| arith::pow_mod(a, ell - 1, q) == 1).collect();
    AbelianField::from_subgroup_reduced(q, &h)
}

/// The compositum `F·K` inside `Q(ζ_{lcm(f_F, f_K)})`.
pub fn compositum(a: &AbelianField, b: &AbelianField) -> AbelianField {
    let f = arith::lcm(a.conductor().max(1), b.conductor().max(1));
    let inside = |k: &AbelianField, x: u64| k.is_rational() || k.fixing_subgroup().binary_search(&(x % k.conductor())).is_ok();
    let h: Vec<u64> = arith::units_mod(f).into_iter().filter(|&x| inside(a, x) && inside(b, x)).collect();
    AbelianField::from_subgroup_reduced(f, &h)
}

/// Largest `n` with `Q_n ⊆ F`.
pub fn cyclotomic_depth(field: &AbelianField, ell: u64) -> u32 {
    let mut n = 0;
    while field.conductor() % ell.pow(n + 2) == 0 && cyclotomic_layer(ell, n + 1).is_subfield_of(field) {
        n += 1;
    }
    n
}

/// `F_1 = F·Q_{k+1}` for `Q_k = F ∩ Q_∞`, within the default caps.
pub fn first_layer(field: &AbelianField, ell: u64) -> Result<AbelianField> {
    let k = cyclotomic_depth(field, ell);
    let limits = crate::abelian::Limits::default();
    let f1 = arith::lcm(field.conductor(), ell.pow(k + 2));
    if f1 > limits.max_conductor {
        return Err(Error::CapExceeded(format!("conductor {f1} of the first layer exceeds cap {}", limits.max_conductor)));
    }
    let out = compositum(field, &cyclotomic_layer(ell, k + 1));
    if out.degree() > limits.max_degree {
        return Err(Error::CapExceeded(format!("first layer has degree {}", out.degree())));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScolieReport {
    pub field: String,
    pub ell: u64,
    pub layer: String,
    /// `η_F` when `ℓ | f`, `η̃_F` otherwise.
    pub target: &'static str,
    pub pass: bool,
}

/// Exact check of `N_{F_1/F}(η_{F_1}) = η_F` (`ℓ | f`) or `= η̃_F` (`ℓ ∤ f`).
pub fn scolie_check(field: &AbelianField, ell: u64) -> Result<ScolieReport> {
    let layer = first_layer(field, ell)?;
    let norm = eta(&layer)?.relative_norm(&layer, field)?;
    let (target, rhs) = if field.conductor() % ell == 0 {
        ("eta", eta(field)?)
    } else {
        ("eta~", eta_twisted(field, ell)?.evaluate(field)?)
    };
    Ok(ScolieReport {
        field: field.label(),
        ell,
        layer: layer.label(),
        target,
        pass: (&norm - &rhs).is_zero(),
    })
}

/// Exact check of `N_{K/L}(η_K) = η_L^{Π_p (1 - σ_p^{-1})}`, the product over
/// the primes dividing `f_K` but not `f_L`. Both sides are compared after
/// clearing the negative part of the exponent.
pub fn norm_identity_check(k: &AbelianField, l: &AbelianField) -> Result<bool> {
    if l.conductor() <= 1 {
        return Err(Error::InvalidInput("the smaller field must have conductor above 1".into()));
    }
    let lhs = eta(k)?.relative_norm(k, l)?;
    let base = eta(l)?;
    let frob: Vec<GaloisElement> = arith::factor(k.conductor())
        .into_iter()
        .map(|(p, _)| p)
        .filter(|&p| l.conductor() % p != 0)
        .map(|p| l.artin_symbol(p).map(|s| l.inv(s)))
        .collect::<Result<_>>()?;
    let mut even = CycloElement::one(l.conductor());
    let mut odd = lhs;
    for mask in 0u32..(1 << frob.len()) {
        let sigma = frob
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold(l.identity(), |acc, (_, &s)| l.mul(acc, s));
        let term = base.act(sigma, l);
        if mask.count_ones() % 2 == 0 {
            even = &even * &term;
        } else {
            odd = &odd * &term;
        }
        even.check_size()?;
        odd.check_size()?;
    }
    Ok((&even - &odd).is_zero())
}

/// Pairs `(K, L)` of the subfield lattice with `L ⊊ K` or `L = K`, `f_L > 1`.
pub fn lattice_pairs(field: &AbelianField) -> Vec<(AbelianField, AbelianField)> {
    let lattice = field.subfield_lattice();
    let mut out = Vec::new();
    for k in &lattice {
        for l in &lattice {
            if l.conductor() > 1 && l.is_subfield_of(k) {
                out.push((k.clone(), l.clone()));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct NormKernelReport {
    pub checked: usize,
    /// Kernel vectors whose symmetric lifts were too large to evaluate.
    pub skipped: usize,
    pub failures: usize,
}

/// In the split case, `N_{F/F°}(η^α) = ±1` for the computed kernel vectors
/// whose symmetric lifts are at most `bound`.
pub fn norm_kernel_check(basis: &CircularBasis, units: &CircularLogUnits, bound: i64) -> Result<NormKernelReport> {
    let field = &basis.field;
    if expected_rank(field, units.ell).0 != RankCase::Split {
        return Err(Error::InvalidInput(format!("{field} is not in the split case without ℓ-power subfields")));
    }
    let dec = field.decomposition_data(units.ell);
    let mut report = NormKernelReport { checked: 0, skipped: 0, failures: 0 };
    let q = arith::big_pow(units.ell, units.prec);
    let half = &q / 2;
    for (alpha, _) in &units.kernel {
        let lifted: Vec<BigInt> = alpha.iter().map(|a| if a > &half { a - &q } else { a.clone() }).collect();
        if lifted.iter().all(Zero::is_zero) {
            continue;
        }
        if lifted.iter().any(|a| a.abs() > BigInt::from(bound)) {
            report.skipped += 1;
            continue;
        }
        let small: Vec<i64> = lifted.iter().map(|a| i64::try_from(a).expect("bounded")).collect();
        let x = basis.evaluate(&small)?;
        let n = x.relative_norm(field, &dec.fixed_field)?;
        report.checked += 1;
        let one = CycloElement::one(n.conductor());
        if !((&n - &one).is_zero() || (&n + &one).is_zero()) {
            report.failures += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::QuadField;
    use proptest::prelude::*;

    fn quad(d: u64) -> AbelianField {
        AbelianField::quadratic(d).unwrap()
    }

    fn zeta9_plus() -> AbelianField {
        AbelianField::from_subgroup(9, &[8]).unwrap()
    }

    #[test]
    fn log_unit_examples() {
        let f = quad(2);
        let q = QuadField::from_field(&f).unwrap();
        let v = is_log_unit(&f, &q.to_cyclo(&q.integral(2, -1)), 3, 8).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness, Some(("2.0".to_string(), "1".to_string())));
        let v = is_log_unit(&f, &q.to_cyclo(&q.integral(3, -2)), 3, 8).unwrap();
        assert!(v.holds, "{v}");
        let g = zeta9_plus();
        assert!(is_log_unit(&g, &eta(&g).unwrap(), 3, 8).unwrap().holds);
    }

    #[test]
    fn predicted_elements_are_log_units() {
        for f in 5..=45u64 {
            for field in AbelianField::real_fields_of_conductor(f, 6) {
                for ell in [3u64, 5] {
                    let x = predicted_log_unit(&field, ell).unwrap();
                    let v = is_log_unit_product(&field, &x, ell, 8).unwrap();
                    assert!(v.holds, "{field}, ell = {ell}: {v}");
                }
            }
        }
    }

    #[test]
    fn generators_follow_the_lattice() {
        let f = AbelianField::from_subgroup(21, &[20]).unwrap();
        let b = CircularBasis::new(&f).unwrap();
        let lattice = f.subfield_lattice();
        assert_eq!(b.subfields, lattice);
        assert_eq!(b.len(), lattice.iter().map(AbelianField::degree).sum::<usize>());
        for tau in f.galois_group() {
            for i in 0..b.len() {
                let j = b.act_index(tau, i);
                assert!((&b.generators[i].value.act(tau, &f) - &b.generators[j].value).is_zero());
            }
        }
    }

    /// Oracle: each row recomputed from the exact product, without the
    /// conjugation shortcut.
    #[test]
    fn matrix_rows_match_direct_divisors() {
        for field in [quad(13), quad(2), zeta9_plus(), AbelianField::from_subgroup(21, &[20]).unwrap()] {
            let b = CircularBasis::new(&field).unwrap();
            let vm = ValuationMatrix::build(&b, 3, 8).unwrap();
            let primes: Vec<u64> = arith::factor(field.conductor()).into_iter().map(|(p, _)| p).collect();
            for (i, g) in b.generators.iter().enumerate() {
                let d = ladic::log_divisor_on(&field, &g.value, 3, 8, &primes).unwrap();
                for (j, pl) in vm.columns.iter().enumerate() {
                    let c = d.coefficient(pl);
                    assert_eq!(c.value(), &vm.rows[i][j], "{field} {} at {pl}", b.label(i));
                }
            }
        }
    }

    #[test]
    fn quadratic_eta_valuations_agree() {
        let f = quad(13);
        let q = QuadField::from_field(&f).unwrap();
        let b = CircularBasis::new(&f).unwrap();
        let vm = ValuationMatrix::build(&b, 3, 8).unwrap();
        let x = q.from_cyclo(&eta(&f).unwrap()).unwrap();
        let d = q.log_divisor(&x, 3, 8).unwrap();
        for (j, pl) in vm.columns.iter().enumerate() {
            assert_eq!(d.coefficient(pl).value(), &vm.rows[0][j], "{pl}");
        }
        assert!(vm.rows[0][1..].iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn circular_log_unit_ranks() {
        let u = circular_log_units(&quad(13), 3, 8).unwrap();
        assert_eq!((u.rank, u.stable), (0, true));
        let u = circular_log_units(&quad(2), 3, 8).unwrap();
        assert_eq!((u.rank, u.stable), (1, true));
        let u = circular_log_units(&zeta9_plus(), 3, 8).unwrap();
        assert_eq!((u.rank, u.stable), (3, true));
    }

    #[test]
    fn twisted_exponent_spans_the_kernel_for_sqrt2() {
        let b = CircularBasis::new(&quad(2)).unwrap();
        let vm = ValuationMatrix::build(&b, 3, 8).unwrap();
        let twist = [BigInt::from(1), BigInt::from(-1)];
        assert!(vm.apply(&twist).iter().all(Zero::is_zero));
        assert!(!vm.apply(&[BigInt::from(1), BigInt::zero()]).iter().all(Zero::is_zero));
    }

    #[test]
    fn rank_cases() {
        for (field, case, expected) in [
            (quad(13), RankCase::Split, 0),
            (zeta9_plus(), RankCase::OnePlaceRamified, 3),
            (quad(2), RankCase::OnePlaceUnramified, 1),
        ] {
            let r = car_rank_check(&field, 3, 8).unwrap();
            assert_eq!((r.case, r.expected), (case, expected));
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn rank_sweep_small_conductors() {
        let r = car_rank_check(&quad(3), 3, 8).unwrap();
        assert_eq!((r.case, r.expected, r.pass), (RankCase::OnePlaceRamifiedNoEllLevel, 1, true));
        for f in 5..=60u64 {
            for field in AbelianField::real_fields_of_conductor(f, 4) {
                for ell in [3u64, 5] {
                    let r = car_rank_check(&field, ell, 6).unwrap();
                    assert!(r.pass, "{r:?}");
                }
            }
        }
    }

    /// Oracle: the exponent vector of `N_{K/Q}(η_K) = ℓ` is killed by the
    /// matrix, and its norm to `F°` is a nontrivial power of `ℓ`.
    #[test]
    fn ell_is_an_extra_circular_log_unit() {
        let field = AbelianField::from_subgroup(65, &[14, 21]).unwrap();
        let r = car_rank_check(&field, 5, 8).unwrap();
        assert_eq!(r.case, RankCase::SplitWithEllLevel);
        assert!(r.pass, "{r:?}");
        let b = CircularBasis::new(&field).unwrap();
        let vm = ValuationMatrix::build(&b, 5, 8).unwrap();
        let k = b.subfields.iter().position(|k| k.conductor() == 5).unwrap();
        let alpha: Vec<i64> = b.generators.iter().map(|g| (g.subfield == k) as i64).collect();
        let big: Vec<BigInt> = alpha.iter().map(|&a| BigInt::from(a)).collect();
        assert!(vm.apply(&big).iter().all(Zero::is_zero));
        let x = b.evaluate(&alpha).unwrap();
        assert_eq!(x.as_rational(), Some((BigInt::from(5), BigInt::from(1))));
        let fixed = &field.decomposition_data(5).fixed_field;
        let n = x.relative_norm(&field, fixed).unwrap();
        let deg = BigInt::from(5u32).pow((field.degree() / fixed.degree()) as u32);
        assert_eq!(n.as_rational(), Some((deg, BigInt::from(1))));
    }

    #[test]
    fn kernel_is_galois_stable() {
        for field in [quad(2), zeta9_plus(), AbelianField::from_subgroup(21, &[20]).unwrap()] {
            let b = CircularBasis::new(&field).unwrap();
            let vm = ValuationMatrix::build(&b, 3, 10).unwrap();
            let u = circular_log_units_from(&b, &vm, 8).unwrap();
            let at = vm.with_precision(8);
            for tau in field.galois_group() {
                for (alpha, _) in &u.kernel {
                    assert!(at.apply(&b.act(tau, alpha)).iter().all(Zero::is_zero));
                }
            }
        }
    }

    #[test]
    fn scolie_examples() {
        let r = scolie_check(&zeta9_plus(), 3).unwrap();
        assert_eq!((r.layer.as_str(), r.target, r.pass), (first_layer(&zeta9_plus(), 3).unwrap().label().as_str(), "eta", true));
        assert_eq!(first_layer(&zeta9_plus(), 3).unwrap().conductor(), 27);
        let r = scolie_check(&quad(2), 3).unwrap();
        assert_eq!(first_layer(&quad(2), 3).unwrap().conductor(), 72);
        assert!(r.pass && r.target == "eta~");
        assert!(scolie_check(&quad(13), 3).unwrap().pass);
        assert!(eta_twisted(&quad(13), 3).unwrap().is_trivial());
    }

    /// Oracle: the conjugate product written out by hand.
    #[test]
    fn first_layer_norm_by_hand() {
        let layer = first_layer(&quad(2), 3).unwrap();
        let e = eta(&layer).unwrap();
        let mut by_hand = CycloElement::one(72);
        for s in layer.galois_group() {
            if quad(2).fixing_subgroup().contains(&(s.residue % 8)) {
                by_hand = &by_hand * &e.galois(s.residue);
            }
        }
        let q = QuadField::new(2).unwrap();
        let unit = q.to_cyclo(&q.integral(3, -2));
        assert!((&by_hand - &unit).is_zero());
    }

    #[test]
    fn norm_identities() {
        let big = AbelianField::from_subgroup(13, &[12]).unwrap();
        assert!(norm_identity_check(&big, &quad(13)).unwrap());
        let f65 = AbelianField::from_subgroup(65, &[64, 14]).unwrap();
        assert!(quad(13).is_subfield_of(&f65));
        assert!(norm_identity_check(&f65, &quad(13)).unwrap());
        for f in [21u64, 24, 35, 39, 40] {
            for field in AbelianField::real_fields_of_conductor(f, 8) {
                for (k, l) in lattice_pairs(&field) {
                    assert!(norm_identity_check(&k, &l).unwrap(), "{k} -> {l}");
                }
            }
        }
    }

    #[test]
    fn norm_kernel_in_split_case() {
        for (field, ell, evaluated) in [(quad(7), 3, true), (AbelianField::from_subgroup(16, &[15]).unwrap(), 7, false)] {
            let b = CircularBasis::new(&field).unwrap();
            let u = circular_log_units(&field, ell, 6).unwrap();
            let r = norm_kernel_check(&b, &u, 3).unwrap();
            assert_eq!(r.failures, 0, "{field}");
            assert_eq!(r.checked > 0, evaluated, "{field} {r:?}");
            assert!(r.checked + r.skipped > 0, "{field}");
        }
        let field = AbelianField::from_subgroup(21, &[20]).unwrap();
        let u = circular_log_units(&field, 3, 6).unwrap();
        assert!(norm_kernel_check(&CircularBasis::new(&field).unwrap(), &u, 3).is_err());
    }

    #[test]
    fn compositum_and_layers() {
        let q1 = cyclotomic_layer(3, 1);
        assert_eq!(q1, zeta9_plus());
        assert_eq!(cyclotomic_depth(&zeta9_plus(), 3), 1);
        assert_eq!(cyclotomic_depth(&quad(2), 3), 0);
        let c = compositum(&quad(2), &quad(5));
        assert_eq!((c.conductor(), c.degree()), (40, 4));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn divisor_is_linear_in_exponents(a in -2i64..3, b in -2i64..3, c in -2i64..3) {
            let field = AbelianField::from_subgroup(21, &[20]).unwrap();
            let basis = CircularBasis::new(&field).unwrap();
            let vm = ValuationMatrix::build(&basis, 3, 6).unwrap();
            let mut alpha = vec![0i64; basis.len()];
            alpha[0] = a;
            alpha[basis.len() - 1] = b;
            alpha[1] = c;
            let x = basis.evaluate(&alpha).unwrap();
            let d = ladic::log_divisor_on(&field, &x, 3, 6, &[3, 7]).unwrap();
            let big: Vec<BigInt> = alpha.iter().map(|&t| BigInt::from(t)).collect();
            let row = vm.apply(&big);
            for (j, pl) in vm.columns.iter().enumerate() {
                let c = d.coefficient(pl);
                prop_assert_eq!(c.value(), &row[j]);
            }
        }
    }
}
