//! Smith normal form over `Z/ℓ^m`, with the row and column transforms
//! needed for coordinates and kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith;

/// `D = U · M · V` over `Z/ℓ^m`, `D` diagonal with entries `ℓ^{e_i}`.
#[derive(Debug, Clone)]
pub struct Snf {
    pub ell: u64,
    pub prec: u32,
    pub rows: usize,
    pub cols: usize,
    /// Exponent of the `i`-th diagonal entry (`prec` for zero), one per column.
    pub exponents: Vec<u32>,
    /// Row transform `U` (`rows × rows`).
    pub left: Vec<Vec<BigInt>>,
    /// Column transform `V` (`cols × cols`).
    pub right: Vec<Vec<BigInt>>,
}

fn inv_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "not a unit");
    e.x.mod_floor(m)
}

/// Valuation of an entry of `Z/ℓ^m` (`m` for zero).
pub fn val_mod(x: &BigInt, ell: u64, m: u32) -> u32 {
    if x.is_zero() {
        m
    } else {
        arith::val_big(x, ell).min(m)
    }
}

impl Snf {
    pub fn compute(matrix: &[Vec<BigInt>], cols: usize, ell: u64, prec: u32) -> Snf {
        let q = arith::big_pow(ell, prec);
        let rows = matrix.len();
        let mut a: Vec<Vec<BigInt>> = matrix
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged matrix");
                r.iter().map(|x| x.mod_floor(&q)).collect()
            })
            .collect();
        let ident = |n: usize| -> Vec<Vec<BigInt>> {
            (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as u8)).collect()).collect()
        };
        let mut u = ident(rows);
        let mut v = ident(cols);
        let mut exponents = vec![prec; cols];
        for t in 0..rows.min(cols) {
            let mut best: Option<(u32, usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, x) in row.iter().enumerate().skip(t) {
                    let e = val_mod(x, ell, prec);
                    if e < prec && best.is_none_or(|(b, _, _)| e < b) {
                        best = Some((e, i, j));
                    }
                }
            }
            let Some((e, i, j)) = best else { break };
            a.swap(t, i);
            u.swap(t, i);
            for row in a.iter_mut() {
                row.swap(t, j);
            }
            for row in v.iter_mut() {
                row.swap(t, j);
            }
            let pe = arith::big_pow(ell, e);
            let unit = &a[t][t] / &pe;
            let ui = inv_mod(&unit, &q);
            for x in a[t].iter_mut() {
                *x = (&*x * &ui).mod_floor(&q);
            }
            for x in u[t].iter_mut() {
                *x = (&*x * &ui).mod_floor(&q);
            }
            let pivot_row = a[t].clone();
            let pivot_u = u[t].clone();
            for i in 0..rows {
                if i == t || a[i][t].is_zero() {
                    continue;
                }
                let c = &a[i][t] / &pe;
                for (x, p) in a[i].iter_mut().zip(&pivot_row) {
                    *x = (&*x - &c * p).mod_floor(&q);
                }
                for (x, p) in u[i].iter_mut().zip(&pivot_u) {
                    *x = (&*x - &c * p).mod_floor(&q);
                }
            }
            for j in 0..cols {
                if j == t || a[t][j].is_zero() {
                    continue;
                }
                let c = &a[t][j] / &pe;
                for row in a.iter_mut() {
                    let p = row[t].clone();
                    row[j] = (&row[j] - &c * p).mod_floor(&q);
                }
                for row in v.iter_mut() {
                    let p = row[t].clone();
                    row[j] = (&row[j] - &c * p).mod_floor(&q);
                }
            }
            exponents[t] = e;
        }
        Snf { ell, prec, rows, cols, exponents, left: u, right: v }
    }

    pub fn modulus(&self) -> BigInt {
        arith::big_pow(self.ell, self.prec)
    }

    /// Coordinates `x · V` of a vector of `Z^cols` in the diagonal basis,
    /// each reduced modulo its invariant.
    pub fn coordinates(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.cols);
        (0..self.cols)
            .map(|j| {
                let s: BigInt = x.iter().zip(&self.right).map(|(xi, row)| xi * &row[j]).sum();
                s.mod_floor(&arith::big_pow(self.ell, self.exponents[j]))
            })
            .collect()
    }

    /// Exponents `e_i > 0`, sorted: the invariants of the cokernel.
    pub fn invariant_exponents(&self) -> Vec<u32> {
        let mut e: Vec<u32> = self.exponents.iter().copied().filter(|&e| e > 0).collect();
        e.sort_unstable();
        e
    }

    /// Number of diagonal entries that are units or nonzero mod `ℓ^prec`.
    pub fn rank(&self) -> usize {
        self.exponents.iter().filter(|&&e| e < self.prec).count()
    }

    /// Generators of `{x : x · M = 0}` in `(Z/ℓ^m)^rows`, each paired with
    /// its order exponent.
    pub fn left_kernel(&self) -> Vec<(Vec<BigInt>, u32)> {
        let q = self.modulus();
        let mut out = Vec::new();
        let diag = self.rows.min(self.cols);
        for i in 0..self.rows {
            let e = if i < diag { self.exponents[i] } else { 0 };
            if i < diag && e == 0 {
                continue;
            }
            // z_i ∈ ann(ℓ^e) = ℓ^{m-e} Z/ℓ^m; zero rows of D are free.
            let scale = if i < diag { arith::big_pow(self.ell, self.prec - e) } else { BigInt::one() };
            let order = if i < diag { e } else { self.prec };
            let gen: Vec<BigInt> = self.left[i].iter().map(|x| (x * &scale).mod_floor(&q)).collect();
            out.push((gen, order));
        }
        out
    }
}

/// Reduces an integer matrix entrywise into `Z/ℓ^m`.
pub fn from_i64(matrix: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    matrix.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// `x · M` over `Z/q`.
pub fn row_times(x: &[BigInt], m: &[Vec<BigInt>], cols: usize, q: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); cols];
    for (xi, row) in x.iter().zip(m) {
        if xi.is_zero() {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o += xi * r;
        }
    }
    out.into_iter().map(|v| v.mod_floor(q)).collect()
}
