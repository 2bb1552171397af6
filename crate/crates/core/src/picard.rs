//! Rational divisor classes on iterated universal curves over `M_{1,n-k}`.
//!
//! All arithmetic is exact. Rationals print as `p/q` (or `p` when integral).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::classify::{excluded_loci, excluded_loci_count, minimal_k, DLocus};
use crate::covers::{is_totally_ramified, split_coefficients, RamificationData};
use crate::error::{Error, Result};

pub type QMatrix = Vec<Vec<BigRational>>;

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rational_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_qmatrix(m: &[Vec<i64>]) -> QMatrix {
    m.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
}

pub fn identity(n: usize) -> QMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { q(1) } else { q(0) }).collect())
        .collect()
}

pub fn mat_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(q(0), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

/// Gaussian elimination; returns the determinant and, if nonzero, the
/// inverse.
fn eliminate(m: &QMatrix) -> (BigRational, Option<QMatrix>) {
    let n = m.len();
    let mut a = m.clone();
    let mut inv = identity(n);
    let mut det = q(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return (q(0), None);
        };
        if p != c {
            a.swap(p, c);
            inv.swap(p, c);
            det = -det;
        }
        let pivot = a[c][c].clone();
        det *= &pivot;
        for v in a[c].iter_mut().chain(inv[c].iter_mut()) {
            *v /= &pivot;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for t in 0..n {
                let (ac, ic) = (a[c][t].clone(), inv[c][t].clone());
                a[r][t] -= &f * ac;
                inv[r][t] -= &f * ic;
            }
        }
    }
    (det, Some(inv))
}

pub fn determinant(m: &QMatrix) -> BigRational {
    eliminate(m).0
}

pub fn inverse(m: &QMatrix) -> Option<QMatrix> {
    eliminate(m).1
}

/// Labels `(j, i)` of the divisors `B_{j,i}` on the `k`-fold universal
/// curve over `M_{1,n-k}`, with `B_{n-k+j,i} = B_{n-k+i,j}` listed once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryBasis {
    pub n: usize,
    pub k: usize,
    pub labels: Vec<(usize, usize)>,
}

impl BoundaryBasis {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label_strings(&self) -> Vec<String> {
        self.labels.iter().map(|(j, i)| format!("B_{{{j},{i}}}")).collect()
    }
}

pub fn boundary_basis(n: usize, k: usize) -> Result<BoundaryBasis> {
    if k >= n {
        return Err(Error::InvalidRange { n, k });
    }
    let base = n - k;
    let mut labels = Vec::new();
    for i in 1..=k {
        labels.extend((1..=base).map(|j| (j, i)));
        // sections y'_m with m < i; the pair with m > i is the same divisor
        labels.extend((1..i).map(|m| (base + m, i)));
    }
    debug_assert_eq!(labels.len(), excluded_loci_count(n, k));
    Ok(BoundaryBasis { n, k, labels })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorClass {
    pub basis: BoundaryBasis,
    pub coeffs: Vec<BigRational>,
}

/// `[D_{b,a}] = a * sum_j b_j [B_{j,n}]` with `a = sum_j b_j`, for the
/// locus `a y = sum_j b_j x_j` on the universal curve over `M_{1,n-1}`.
pub fn class_of_torsion_locus(b: &[i64]) -> Result<DivisorClass> {
    let basis = boundary_basis(b.len() + 1, 1)?;
    let a: i64 = b.iter().sum();
    let coeffs = b.iter().map(|&bj| q(a * bj)).collect();
    Ok(DivisorClass { basis, coeffs })
}

/// Rows express `[D_{j,n}]` over `[B_{1,n}], ..., [B_{n-1,n}]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lincomb {
    pub matrix: QMatrix,
    pub o_rk: u64,
    /// last row of `b` along the reordered points; its last entry is 1
    pub b_row: Vec<i64>,
    pub point_order: Vec<usize>,
}

pub fn lincomb_matrix(data: &RamificationData) -> Result<Lincomb> {
    if !is_totally_ramified(data) {
        return Err(Error::NotTotallyRamified);
    }
    let n = data.n();
    let (k, _) = minimal_k(data);
    if k == n {
        return Err(Error::EmptyModuli(n));
    }
    if k == 0 {
        return Err(Error::InvalidRange { n, k });
    }
    let bc = split_coefficients(data)?;
    let o = bc.r_orders[k - 1] as i64;
    let b_row = bc.b_row_reordered(k - 1);
    let total: i64 = b_row.iter().sum();
    let matrix = (0..n - 1)
        .map(|j| {
            let mut row: Vec<i64> = b_row[..n - 1].to_vec();
            row[j] += 1;
            row[0] += o - total;
            row.into_iter().map(|v| q(o * v)).collect()
        })
        .collect();
    Ok(Lincomb {
        matrix,
        o_rk: o as u64,
        b_row,
        point_order: bc.point_order,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invertibility {
    pub is_invertible: bool,
    pub determinant: BigRational,
    /// row sums after dividing each row by `o_rk`
    pub normalized_row_sums: Vec<BigRational>,
    pub row_sums_match: bool,
}

pub fn invertibility_check(m: &QMatrix, o_rk: u64) -> Invertibility {
    let determinant = determinant(m);
    let o = q(o_rk as i64);
    let normalized_row_sums: Vec<BigRational> = m
        .iter()
        .map(|row| row.iter().fold(q(0), |acc, v| acc + v) / &o)
        .collect();
    let row_sums_match = normalized_row_sums.iter().all(|s| *s == o);
    Invertibility {
        is_invertible: !determinant.is_zero(),
        determinant,
        normalized_row_sums,
        row_sums_match,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCount {
    pub loci: usize,
    pub components: u64,
    pub relations: u64,
    #[serde(skip)]
    pub detail: Vec<DLocus>,
}

/// `r` = total components of the excluded loci minus their number.
pub fn relation_count(data: &RamificationData, max_states: u64) -> Result<RelationCount> {
    if !is_totally_ramified(data) {
        return Err(Error::NotTotallyRamified);
    }
    let detail = excluded_loci(data, max_states)?;
    let components: u64 = detail.iter().map(|d| d.components.authoritative()).sum();
    let loci = detail.len();
    Ok(RelationCount {
        loci,
        components,
        relations: components - loci as u64,
        detail,
    })
}

/// Rank of a space open in a compactification with `n_boundary` boundary
/// divisors, after `extra` independent relations.
pub fn picard_rank_from_counts(n_boundary: u64, _m: u64, extra: u64) -> Result<u64> {
    n_boundary
        .checked_sub(extra)
        .ok_or(Error::NegativeRank {
            boundary: n_boundary,
            extra,
        })
}

/// `phi(p^beta)` for `p^beta = gcd(a_1, ..., a_{n-1}, p^alpha)`; the last
/// entry of `a` is the normalized generator and is ignored.
pub fn pgroup_relation_dimension(a: &[i64], p: u64, alpha: u32) -> u64 {
    let beta = pgroup_defect(a, p, alpha);
    if beta == 0 {
        0
    } else {
        p.pow(beta) - p.pow(beta - 1)
    }
}

/// `beta` with `p^beta = gcd(a_1, ..., a_{n-1}, p^alpha)`.
pub fn pgroup_defect(a: &[i64], p: u64, alpha: u32) -> u32 {
    let head = &a[..a.len().saturating_sub(1)];
    let g = head
        .iter()
        .fold(p.pow(alpha), |acc, &x| num_integer::gcd(acc, x.unsigned_abs()));
    let mut beta = 0;
    let mut g = g;
    while g % p == 0 && g > 1 {
        g /= p;
        beta += 1;
    }
    beta
}

/// Inverse of the lincomb matrix: row `j` writes `[B_{j,n}]` over the
/// `[D_{i,n}]`.
pub fn boundary_in_terms_of_loci(l: &Lincomb) -> Option<QMatrix> {
    inverse(&l.matrix)
}

pub fn is_identity(m: &QMatrix) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, v)| if i == j { v.is_one() } else { v.is_zero() })
    })
}

pub fn max_abs(m: &QMatrix) -> BigRational {
    m.iter().flatten().fold(q(0), |acc, v| if v.abs() > acc { v.abs() } else { acc })
}
