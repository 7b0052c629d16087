//! Real abelian fields as subgroups of `(Z/fZ)^×`.
//!
//! A field `F` of conductor `f` is the fixed field inside `Q(ζ_f)` of a
//! subgroup `H`; its Galois group is `(Z/fZ)^× / H`. Subfields are overgroups
//! of `H`. Everything here is modular arithmetic over small integers.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};
use std::fmt;
use std::str::FromStr;

use crate::arith::{self, gcd};
use crate::error::{Error, Result};

/// Desk-scale guardrails applied at construction time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_degree: usize,
    pub max_conductor: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_degree: 12, max_conductor: 2000 }
    }
}

#[derive(Clone)]
pub struct AbelianField {
    conductor: u64,
    /// All residues of the fixing subgroup `H`, sorted.
    subgroup: Vec<u64>,
    /// Smallest residue in each coset of `H`, sorted; index = group element id.
    reps: Vec<u64>,
    /// Coset id of every residue mod f (`usize::MAX` for non-units).
    coset_of: Vec<usize>,
}

impl PartialEq for AbelianField {
    fn eq(&self, other: &Self) -> bool {
        self.conductor == other.conductor && self.subgroup == other.subgroup
    }
}
impl Eq for AbelianField {}

impl std::hash::Hash for AbelianField {
    fn hash<S: std::hash::Hasher>(&self, state: &mut S) {
        self.conductor.hash(state);
        self.subgroup.hash(state);
    }
}

impl fmt::Debug for AbelianField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbelianField({})", self.label())
    }
}

impl fmt::Display for AbelianField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// An element of `G_F`, stored as the coset id inside its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaloisElement {
    pub(crate) index: usize,
    /// Smallest positive residue mod f representing the coset.
    pub residue: u64,
}

#[derive(Debug, Clone)]
pub struct DecompositionData {
    pub prime: u64,
    /// Elements of `D_p ≤ G_F`.
    pub subgroup: Vec<GaloisElement>,
    pub fixed_field: AbelianField,
    pub places_above: usize,
    pub ramification_index: usize,
    pub residue_degree: usize,
}

/// Closure of a set of units under multiplication mod f.
pub fn subgroup_closure(f: u64, gens: &[u64]) -> Vec<u64> {
    let one = 1 % f;
    let mut set: BTreeSet<u64> = BTreeSet::new();
    set.insert(one);
    let mut frontier = vec![one];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = arith::mul_mod(x, g % f, f);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set.into_iter().collect()
}

/// `{a ∈ (Z/fZ)^× : a ≡ 1 mod d}`, the kernel of reduction to `d | f`.
fn reduction_kernel(f: u64, d: u64) -> Vec<u64> {
    arith::units_mod(f).into_iter().filter(|&a| a % d == 1 % d).collect()
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    out.sort_unstable();
    out
}

impl AbelianField {
    /// Builds the field fixed by the subgroup generated by `gens`, rejecting
    /// non-minimal conductors and complex fields.
    pub fn from_subgroup(f: u64, gens: &[u64]) -> Result<Self> {
        Self::from_subgroup_with(f, gens, Limits::default())
    }

    pub fn from_subgroup_with(f: u64, gens: &[u64], limits: Limits) -> Result<Self> {
        if f <= 1 {
            return Err(Error::InvalidInput(format!("conductor must exceed 1, got {f}")));
        }
        if f > limits.max_conductor {
            return Err(Error::CapExceeded(format!(
                "conductor {f} exceeds cap {}",
                limits.max_conductor
            )));
        }
        for &g in gens {
            if gcd(g % f, f) != 1 {
                return Err(Error::InvalidInput(format!("{g} is not a unit mod {f}")));
            }
        }
        let h = subgroup_closure(f, gens);
        if h.binary_search(&(f - 1)).is_err() {
            return Err(Error::NotReal);
        }
        let true_f = Self::true_conductor(f, &h);
        if true_f != f {
            return Err(Error::NonMinimalConductor { given: f, true_conductor: true_f });
        }
        let field = Self::build(f, h);
        if field.degree() > limits.max_degree {
            return Err(Error::CapExceeded(format!(
                "degree {} exceeds cap {}",
                field.degree(),
                limits.max_degree
            )));
        }
        Ok(field)
    }

    /// The field attached to `H ≤ (Z/fZ)^×`, reduced to its true conductor.
    pub fn from_subgroup_reduced(f: u64, h: &[u64]) -> Self {
        let h = subgroup_closure(f, h);
        let true_f = Self::true_conductor(f, &h);
        let reduced: BTreeSet<u64> = h.iter().map(|&a| a % true_f).collect();
        let reduced: Vec<u64> = if true_f == 1 { vec![0] } else { reduced.into_iter().collect() };
        Self::build(true_f, reduced)
    }

    pub fn rationals() -> Self {
        Self::build(1, vec![0])
    }

    /// `Q(√d)` for squarefree `d > 1`; conductor `d` or `4d` by `d mod 4`.
    pub fn quadratic(d: u64) -> Result<Self> {
        if d < 2 || !arith::is_squarefree(d) {
            return Err(Error::InvalidInput(format!("d = {d} must be squarefree and > 1")));
        }
        let disc = if d % 4 == 1 { d } else { 4 * d };
        let h: Vec<u64> = arith::units_mod(disc)
            .into_iter()
            .filter(|&a| arith::kronecker(disc as i64, a) == 1)
            .collect();
        Ok(Self::build(disc, h))
    }

    fn true_conductor(f: u64, h: &[u64]) -> u64 {
        for d in divisors(f) {
            if reduction_kernel(f, d).iter().all(|a| h.binary_search(a).is_ok()) {
                return d;
            }
        }
        f
    }

    fn build(f: u64, subgroup: Vec<u64>) -> Self {
        let units = arith::units_mod(f);
        let mut coset_of = vec![usize::MAX; f as usize];
        let mut reps = Vec::new();
        for &a in &units {
            if coset_of[a as usize] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(a);
            for &h in &subgroup {
                coset_of[arith::mul_mod(a, h, f.max(1)) as usize] = id;
            }
        }
        AbelianField { conductor: f, subgroup, reps, coset_of }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn degree(&self) -> usize {
        self.reps.len()
    }

    pub fn fixing_subgroup(&self) -> &[u64] {
        &self.subgroup
    }

    pub fn is_rational(&self) -> bool {
        self.conductor == 1
    }

    /// Minimal generator list of `H`, greedy in increasing residue order.
    pub fn subgroup_generators(&self) -> Vec<u64> {
        let f = self.conductor;
        let mut gens = Vec::new();
        let mut current = subgroup_closure(f, &[]);
        for &a in &self.subgroup {
            if current.binary_search(&a).is_err() {
                gens.push(a);
                current = subgroup_closure(f, &gens);
            }
        }
        gens
    }

    pub fn label(&self) -> String {
        if self.is_rational() {
            return "Q".into();
        }
        let gens: Vec<String> = self.subgroup_generators().iter().map(|g| g.to_string()).collect();
        format!("f={};H={}", self.conductor, gens.join(","))
    }

    /// `Some(d)` when this is the real quadratic field `Q(√d)`.
    pub fn quadratic_radicand(&self) -> Option<u64> {
        if self.degree() != 2 {
            return None;
        }
        let f = self.conductor;
        let d = if f % 4 == 0 { f / 4 } else { f };
        match Self::quadratic(d) {
            Ok(k) if &k == self => Some(d),
            _ => None,
        }
    }

    // --- Galois group ---

    pub fn galois_group(&self) -> Vec<GaloisElement> {
        self.reps
            .iter()
            .enumerate()
            .map(|(index, &residue)| GaloisElement { index, residue })
            .collect()
    }

    pub fn identity(&self) -> GaloisElement {
        self.element(1)
    }

    /// The class of a unit residue (any integer prime to f).
    pub fn element(&self, a: u64) -> GaloisElement {
        let f = self.conductor;
        let r = a % f;
        let index = if f == 1 { 0 } else { self.coset_of[r as usize] };
        assert!(index != usize::MAX, "{a} is not a unit mod {f}");
        GaloisElement { index, residue: self.reps[index] }
    }

    pub fn element_by_index(&self, index: usize) -> GaloisElement {
        GaloisElement { index, residue: self.reps[index] }
    }

    pub fn mul(&self, a: GaloisElement, b: GaloisElement) -> GaloisElement {
        self.element(arith::mul_mod(a.residue, b.residue, self.conductor.max(1)))
    }

    pub fn inv(&self, a: GaloisElement) -> GaloisElement {
        if self.is_rational() {
            return a;
        }
        let r = arith::inv_mod(a.residue as i128, self.conductor as i128).expect("unit");
        self.element(r as u64)
    }

    pub fn order(&self, a: GaloisElement) -> usize {
        let mut x = a;
        let mut k = 1;
        while x.index != self.identity().index {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Frobenius class of an unramified prime.
    pub fn artin_symbol(&self, p: u64) -> Result<GaloisElement> {
        if self.is_rational() {
            return Ok(self.identity());
        }
        if self.conductor % p == 0 {
            return Err(Error::Ramified(format!("{p} divides the conductor {}", self.conductor)));
        }
        Ok(self.element(p))
    }

    /// Decomposition and inertia data of the prime `p` (any prime).
    pub fn decomposition_data(&self, p: u64) -> Arc<DecompositionData> {
        type Cache = Mutex<HashMap<(u64, Vec<u64>, u64), Arc<DecompositionData>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (self.conductor, self.subgroup.clone(), p);
        if let Some(d) = cache.lock().unwrap().get(&key) {
            return d.clone();
        }
        let d = Arc::new(self.compute_decomposition(p));
        cache.lock().unwrap().insert(key, d.clone());
        d
    }

    fn compute_decomposition(&self, p: u64) -> DecompositionData {
        let f = self.conductor;
        let mut pa = 1;
        while f % (pa * p) == 0 {
            pa *= p;
        }
        let rest = f / pa;
        let mut gens: Vec<u64> = self.subgroup.clone();
        let mut inertia_gens: Vec<u64> = self.subgroup.clone();
        if f > 1 {
            // Inertia: units that are 1 modulo the prime-to-p part.
            let kernel = reduction_kernel(f, rest);
            gens.extend(&kernel);
            inertia_gens.extend(&kernel);
            // Frobenius: p on the prime-to-p part, 1 on the p-part (by CRT).
            let frob = crt(p % rest.max(1), rest, 1 % pa, pa);
            gens.push(frob);
        }
        let decomp = if f > 1 { subgroup_closure(f, &gens) } else { vec![0] };
        let inertia = if f > 1 { subgroup_closure(f, &inertia_gens) } else { vec![0] };
        let mut subgroup: Vec<GaloisElement> =
            decomp.iter().map(|&a| self.element(a)).collect::<BTreeSet<_>>().into_iter().collect();
        subgroup.sort();
        let e = inertia.len() / self.subgroup.len();
        let d = subgroup.len();
        DecompositionData {
            prime: p,
            fixed_field: Self::from_subgroup_reduced(f.max(1), &decomp),
            places_above: self.degree() / d,
            ramification_index: e,
            residue_degree: d / e,
            subgroup,
        }
    }

    /// All subfields `Q ⊊ K ⊆ F`, sorted by (degree, conductor, subgroup).
    pub fn subfield_lattice(&self) -> Vec<AbelianField> {
        if self.is_rational() {
            return Vec::new();
        }
        let f = self.conductor;
        let overgroups = overgroups(f, &self.subgroup, &self.reps);
        let full = self.reps.len() * self.subgroup.len();
        let mut out: Vec<AbelianField> = overgroups
            .into_iter()
            .filter(|h| h.len() < full)
            .map(|h| Self::from_subgroup_reduced(f, &h))
            .collect();
        out.sort_by(|a, b| {
            (a.degree(), a.conductor, &a.subgroup).cmp(&(b.degree(), b.conductor, &b.subgroup))
        });
        out.dedup();
        out
    }

    /// True when `self ⊆ other` (as subfields of a common cyclotomic field).
    pub fn is_subfield_of(&self, other: &AbelianField) -> bool {
        if self.is_rational() {
            return true;
        }
        if other.conductor % self.conductor != 0 {
            return false;
        }
        // self ⊆ other iff H_other maps into H_self under reduction.
        other
            .subgroup
            .iter()
            .all(|&a| self.subgroup.binary_search(&(a % self.conductor)).is_ok())
    }

    /// Restriction `G_F → G_K` for a subfield `K ⊆ F`.
    pub fn restrict(&self, sigma: GaloisElement, sub: &AbelianField) -> GaloisElement {
        sub.element(sigma.residue % sub.conductor.max(1))
    }

    /// `Gal(F/K)` as elements of `G_F`.
    pub fn relative_group(&self, sub: &AbelianField) -> Vec<GaloisElement> {
        self.galois_group()
            .into_iter()
            .filter(|s| sub.is_rational() || self.restrict(*s, sub).index == sub.identity().index)
            .collect()
    }

    /// All real abelian fields of conductor exactly `f` and degree `≤ max_degree`.
    pub fn real_fields_of_conductor(f: u64, max_degree: usize) -> Vec<AbelianField> {
        if f <= 2 {
            return Vec::new();
        }
        let base = subgroup_closure(f, &[f - 1]);
        let units = arith::units_mod(f);
        let phi = units.len();
        let mut out = Vec::new();
        for h in overgroups(f, &base, &units) {
            let deg = phi / h.len();
            if deg < 2 || deg > max_degree {
                continue;
            }
            if Self::true_conductor(f, &h) == f {
                out.push(Self::build(f, h));
            }
        }
        out.sort_by(|a, b| (a.degree(), &a.subgroup).cmp(&(b.degree(), &b.subgroup)));
        out
    }
}

fn crt(a: u64, m: u64, b: u64, n: u64) -> u64 {
    // x ≡ a mod m, x ≡ b mod n, gcd(m, n) = 1.
    let mn = m * n;
    if mn == 1 {
        return 0;
    }
    let (_, u, _) = arith::egcd(m as i128, n as i128);
    let diff = (b as i128 - a as i128).rem_euclid(n as i128);
    let k = (diff * u).rem_euclid(n as i128);
    ((a as i128 + m as i128 * k).rem_euclid(mn as i128)) as u64
}

/// Every subgroup of `(Z/fZ)^×` containing `base`, found by repeated joins
/// with single elements.
fn overgroups(f: u64, base: &[u64], candidates: &[u64]) -> Vec<Vec<u64>> {
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let start = subgroup_closure(f, base);
    seen.insert(start.clone());
    let mut queue = vec![start];
    while let Some(h) = queue.pop() {
        for &g in candidates {
            if h.binary_search(&g).is_ok() {
                continue;
            }
            let mut gens = h.clone();
            gens.push(g);
            let bigger = subgroup_closure(f, &gens);
            if seen.insert(bigger.clone()) {
                queue.push(bigger);
            }
        }
    }
    seen.into_iter().collect()
}

/// Field specification as accepted on the command line and in config files:
/// `f=40;H=39,11` or the shorthand `d=5` for `Q(√5)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldSpec {
    Subgroup { conductor: u64, gens: Vec<u64> },
    Quadratic(u64),
}

impl FieldSpec {
    pub fn build(&self, limits: Limits) -> Result<AbelianField> {
        match self {
            FieldSpec::Subgroup { conductor, gens } => {
                AbelianField::from_subgroup_with(*conductor, gens, limits)
            }
            FieldSpec::Quadratic(d) => {
                let k = AbelianField::quadratic(*d)?;
                if k.conductor() > limits.max_conductor {
                    return Err(Error::CapExceeded(format!(
                        "conductor {} exceeds cap {}",
                        k.conductor(),
                        limits.max_conductor
                    )));
                }
                Ok(k)
            }
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut conductor = None;
        let mut gens = None;
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in {part:?}")))?;
            let value = value.trim();
            match key.trim() {
                "d" => {
                    let d = value.parse().map_err(|_| Error::Parse(format!("bad d: {value}")))?;
                    return Ok(FieldSpec::Quadratic(d));
                }
                "f" => {
                    conductor =
                        Some(value.parse().map_err(|_| Error::Parse(format!("bad f: {value}")))?)
                }
                "H" => {
                    let list: std::result::Result<Vec<u64>, _> =
                        value.split(',').map(|x| x.trim().parse()).collect();
                    gens = Some(list.map_err(|_| Error::Parse(format!("bad H: {value}")))?);
                }
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        match (conductor, gens) {
            (Some(conductor), Some(gens)) => Ok(FieldSpec::Subgroup { conductor, gens }),
            _ => Err(Error::Parse(format!("field spec {s:?} needs f and H, or d"))),
        }
    }
}
