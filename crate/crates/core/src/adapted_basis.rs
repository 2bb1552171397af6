//! Bases of a finite abelian group adapted to a minimal generating subset.
//!
//! Given a minimal generating sequence `h_1..h_k` of `R`, we look for a
//! reordering and a direct-sum basis `r_1..r_k` such that for every
//! position `c`:
//!
//! 1. `h_c = r_c + (terms in r_1..r_{c-1})` modulo `<r_{c+1}, ..., r_k>`,
//!    i.e. the diagonal coefficient `b[c][c]` is exactly 1;
//! 2. `h_1..h_{c-1}` surject onto `R / <r_c, ..., r_k>`.
//!
//! The construction fills positions from the top. At each step it takes a
//! remaining generator, keeps the prime-primary parts of its image in the
//! current quotient that have maximal order there, and lifts that element
//! back to `R` without increasing its order (the generator's own component
//! when that already works, else the coordinatewise-smallest such lift). For p-groups and cyclic groups
//! only steps that keep the whole image are allowed, which makes the
//! coefficient matrix unit triangular.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{prime_factors, quotient, subgroup_generated, FinAbGroup, GroupElement};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdaptedBasis {
    pub group: FinAbGroup,
    /// `reordering[c]` is the original index of the generator placed at
    /// position `c`.
    pub reordering: Vec<usize>,
    pub basis: Vec<GroupElement>,
    pub basis_orders: Vec<u64>,
    /// `b_matrix[i][c]` is the coefficient of `r_i` in the generator at
    /// position `c`, reduced into `[0, ord(r_i))`.
    pub b_matrix: Vec<Vec<i64>>,
}

impl AdaptedBasis {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `x` over the basis, each in `[0, ord(r_i))`.
    pub fn coordinates(&self, x: &GroupElement) -> Option<Vec<i64>> {
        BasisCoordinates::new(&self.group, &self.basis).get(x)
    }

    /// Unit diagonal and zeros above it: each generator involves only its
    /// own basis element and later ones. Read with generators as rows this
    /// is the upper-triangular shape.
    pub fn is_unit_triangular(&self) -> bool {
        let k = self.rank();
        (0..k).all(|c| self.b_matrix[c][c] == 1 && (0..c).all(|i| self.b_matrix[i][c] == 0))
    }
}

/// Lookup table from elements to basis coordinates.
pub(crate) struct BasisCoordinates<'a> {
    group: &'a FinAbGroup,
    table: HashMap<u64, Vec<i64>>,
}

impl<'a> BasisCoordinates<'a> {
    pub(crate) fn new(group: &'a FinAbGroup, basis: &[GroupElement]) -> Self {
        let orders: Vec<u64> = basis.iter().map(|r| group.element_order(r)).collect();
        let mut table = HashMap::new();
        let mut coeffs = vec![0i64; basis.len()];
        loop {
            let x = group.combine(&coeffs, basis);
            table.entry(group.index_of(&x)).or_insert_with(|| coeffs.clone());
            // odometer increment
            let mut i = 0;
            loop {
                if i == coeffs.len() {
                    return Self { group, table };
                }
                coeffs[i] += 1;
                if coeffs[i] as u64 == orders[i] {
                    coeffs[i] = 0;
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }

    pub(crate) fn get(&self, x: &GroupElement) -> Option<Vec<i64>> {
        self.table.get(&self.group.index_of(x)).cloned()
    }
}

fn generates(r: &FinAbGroup, elems: &[GroupElement]) -> bool {
    subgroup_generated(r, elems)
        .map(|s| s.group.order() == r.order())
        .unwrap_or(false)
}

/// Errors when `gens` fail to generate `r` or when some generator is redundant.
pub fn check_minimal_generating(r: &FinAbGroup, gens: &[GroupElement]) -> Result<()> {
    for h in gens {
        if !r.contains(h) {
            return Err(Error::DimensionMismatch {
                expected: r.num_factors(),
                got: h.coords().len(),
            });
        }
    }
    if !generates(r, gens) {
        return Err(Error::NotGenerating);
    }
    for skip in 0..gens.len() {
        let rest: Vec<_> = gens
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, h)| h.clone())
            .collect();
        if generates(r, &rest) {
            return Err(Error::NotMinimal(skip));
        }
    }
    Ok(())
}

fn p_part(n: u64, p: u64) -> u64 {
    let mut out = 1;
    let mut n = n;
    while n % p == 0 {
        n /= p;
        out *= p;
    }
    out
}

/// Integer `e` acting as the projection onto the primes in `primes` on any
/// group whose exponent divides `exponent`.
fn idempotent(exponent: u64, primes: &[u64]) -> i64 {
    let a: u64 = primes.iter().map(|&p| p_part(exponent, p)).product();
    let b = exponent / a;
    if b == 1 {
        return 1;
    }
    if a == 1 {
        return 0;
    }
    // e = b * (b^-1 mod a)
    let inv = (1..a).find(|&t| (b % a) * t % a == 1).expect("coprime parts");
    ((b * inv) % exponent) as i64
}

struct Search<'a> {
    r: &'a FinAbGroup,
    gens: &'a [GroupElement],
    triangular_only: bool,
    exponent: u64,
}

struct Step {
    gen: usize,
    element: GroupElement,
}

impl Search<'_> {
    fn run(&self, chosen: &mut Vec<Step>, remaining: &mut Vec<usize>) -> bool {
        let accumulated: Vec<GroupElement> = chosen.iter().map(|s| s.element.clone()).collect();
        let q = quotient(self.r, &accumulated).expect("elements of R");
        if q.group.is_trivial() {
            return remaining.is_empty();
        }
        if remaining.is_empty() {
            return false;
        }
        let q_exp = q.group.exponent();
        let q_primes = prime_factors(q_exp);
        for pos in 0..remaining.len() {
            let j = remaining[pos];
            let image = q.projection.apply(&self.gens[j]);
            let ord = q.group.element_order(&image);
            let support: Vec<u64> = prime_factors(ord);
            let maximal: Vec<u64> = q_primes
                .iter()
                .copied()
                .filter(|&p| p_part(ord, p) == p_part(q_exp, p))
                .collect();
            if maximal.is_empty() {
                continue;
            }
            let candidates: Vec<Vec<u64>> = if self.triangular_only {
                if support.iter().all(|p| maximal.contains(p)) {
                    vec![support.clone()]
                } else {
                    Vec::new()
                }
            } else {
                prime_subsets(&maximal)
            };
            for primes in candidates {
                let e = idempotent(self.exponent, &primes);
                let base = self.r.scale(e, &self.gens[j]);
                let target_order = q.group.element_order(&q.projection.apply(&base));
                let lift = if self.r.element_order(&base) == target_order {
                    base
                } else {
                    match smallest_lift(self.r, &base, &accumulated, target_order) {
                        Some(x) => x,
                        None => continue,
                    }
                };
                remaining.remove(pos);
                // the generators left over must still reach the new quotient
                let mut span: Vec<GroupElement> = accumulated.clone();
                span.push(lift.clone());
                span.extend(remaining.iter().map(|&i| self.gens[i].clone()));
                if generates(self.r, &span) {
                    chosen.push(Step {
                        gen: j,
                        element: lift,
                    });
                    if self.run(chosen, remaining) {
                        return true;
                    }
                    chosen.pop();
                }
                remaining.insert(pos, j);
            }
        }
        false
    }
}

/// Nonempty subsets, the full set first, then by decreasing size.
fn prime_subsets(primes: &[u64]) -> Vec<Vec<u64>> {
    let n = primes.len();
    let mut out: Vec<Vec<u64>> = (1u32..(1 << n))
        .map(|mask| {
            (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| primes[i])
                .collect()
        })
        .collect();
    out.sort_by(|a: &Vec<u64>, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    out
}

/// Coordinatewise-smallest element of `base + <acc>` whose order is `order`.
fn smallest_lift(
    r: &FinAbGroup,
    base: &GroupElement,
    acc: &[GroupElement],
    order: u64,
) -> Option<GroupElement> {
    let orders: Vec<u64> = acc.iter().map(|a| r.element_order(a)).collect();
    let mut coeffs = vec![0i64; acc.len()];
    let mut best: Option<GroupElement> = None;
    loop {
        let x = r.add(base, &r.combine(&coeffs, acc));
        if r.element_order(&x) == order && best.as_ref().is_none_or(|b| x < *b) {
            best = Some(x);
        }
        let mut i = 0;
        loop {
            if i == coeffs.len() {
                return best;
            }
            coeffs[i] += 1;
            if coeffs[i] as u64 == orders[i] {
                coeffs[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
}

/// Builds a basis adapted to the minimal generating sequence `gens` of `r`.
pub fn adapted_basis(r: &FinAbGroup, gens: &[GroupElement]) -> Result<AdaptedBasis> {
    check_minimal_generating(r, gens)?;
    let k = gens.len();
    let structured = r.is_p_group() || r.is_cyclic();
    let modes: &[bool] = if structured { &[true, false] } else { &[false] };
    for &triangular_only in modes {
        let search = Search {
            r,
            gens,
            triangular_only,
            exponent: r.exponent(),
        };
        let mut chosen = Vec::new();
        let mut remaining: Vec<usize> = (0..k).collect();
        if search.run(&mut chosen, &mut remaining) {
            // first choice sits at the top position
            chosen.reverse();
            let reordering: Vec<usize> = chosen.iter().map(|s| s.gen).collect();
            let basis: Vec<GroupElement> = chosen.into_iter().map(|s| s.element).collect();
            return Ok(finish(r, gens, reordering, basis));
        }
    }
    Err(Error::NoAdaptedBasis)
}

fn finish(
    r: &FinAbGroup,
    gens: &[GroupElement],
    reordering: Vec<usize>,
    basis: Vec<GroupElement>,
) -> AdaptedBasis {
    let k = basis.len();
    let basis_orders: Vec<u64> = basis.iter().map(|x| r.element_order(x)).collect();
    let coords = BasisCoordinates::new(r, &basis);
    let mut b_matrix = vec![vec![0i64; k]; k];
    for (c, &j) in reordering.iter().enumerate() {
        let v = coords.get(&gens[j]).expect("basis spans R");
        for i in 0..k {
            b_matrix[i][c] = v[i];
        }
    }
    AdaptedBasis {
        group: r.clone(),
        reordering,
        basis,
        basis_orders,
        b_matrix,
    }
}

/// Checks the basis, the reconstruction of every reordered generator, and
/// both quotient conditions at every position.
pub fn validate_adapted(ab: &AdaptedBasis, gens: &[GroupElement]) -> bool {
    let r = &ab.group;
    let k = gens.len();
    if ab.basis.len() != k || ab.reordering.len() != k || ab.b_matrix.len() != k {
        return false;
    }
    let mut seen = vec![false; k];
    for &j in &ab.reordering {
        if j >= k || seen[j] {
            return false;
        }
        seen[j] = true;
    }
    if ab.basis.iter().any(|x| !r.contains(x)) {
        return false;
    }
    let orders: Vec<u64> = ab.basis.iter().map(|x| r.element_order(x)).collect();
    if orders.iter().any(|&o| o < 2) && !r.is_trivial() {
        return false;
    }
    if orders.iter().product::<u64>() != r.order() || !generates(r, &ab.basis) {
        return false;
    }
    for (c, &j) in ab.reordering.iter().enumerate() {
        let mut col = Vec::with_capacity(k);
        for i in 0..k {
            let b = ab.b_matrix[i].get(c).copied().unwrap_or(-1);
            if b < 0 || b as u64 >= orders[i] {
                return false;
            }
            col.push(b);
        }
        if r.combine(&col, &ab.basis) != gens[j] {
            return false;
        }
        // condition (1): coefficient of r_c is exactly 1
        if ab.b_matrix[c][c] != 1 {
            return false;
        }
        // condition (2): earlier generators together with r_c..r_k span R
        let mut span: Vec<GroupElement> = ab.reordering[..c].iter().map(|&t| gens[t].clone()).collect();
        span.extend(ab.basis[c..].iter().cloned());
        if !generates(r, &span) {
            return false;
        }
    }
    true
}

/// Rows `i` whose coefficient sum is nonzero modulo `ord(r_i)`.
pub fn nonvanishing_failures(ab: &AdaptedBasis) -> Vec<usize> {
    ab.b_matrix
        .iter()
        .zip(&ab.basis_orders)
        .enumerate()
        .filter(|(_, (row, &o))| row.iter().sum::<i64>().rem_euclid(o as i64) != 0)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(o: &[u64]) -> FinAbGroup {
        FinAbGroup::new(o.to_vec()).unwrap()
    }

    fn els(g: &FinAbGroup, v: &[&[i64]]) -> Vec<GroupElement> {
        v.iter().map(|c| g.element(c).unwrap()).collect()
    }

    #[test]
    fn klein_four() {
        let g = grp(&[2, 2]);
        let gens = els(&g, &[&[1, 0], &[1, 1]]);
        let ab = adapted_basis(&g, &gens).unwrap();
        assert!(validate_adapted(&ab, &gens));
        assert_eq!(ab.b_matrix, vec![vec![1, 0], vec![0, 1]]);
        assert!(ab.is_unit_triangular());
        assert_eq!(nonvanishing_failures(&ab), vec![0, 1]);
    }

    #[test]
    fn z6_two_generators() {
        let g = grp(&[6]);
        let gens = els(&g, &[&[2], &[3]]);
        let ab = adapted_basis(&g, &gens).unwrap();
        assert!(validate_adapted(&ab, &gens));
        let mut orders = ab.basis_orders.clone();
        orders.sort();
        assert_eq!(orders, vec![2, 3]);
        assert_eq!(ab.b_matrix, vec![vec![1, 0], vec![0, 1]]);
        let mut basis: Vec<i64> = ab.basis.iter().map(|x| x.coords()[0]).collect();
        basis.sort();
        assert_eq!(basis, vec![2, 3]);
        assert_eq!(nonvanishing_failures(&ab), vec![0, 1]);
    }

    #[test]
    fn single_generator() {
        let g = grp(&[9]);
        let gens = els(&g, &[&[1]]);
        let ab = adapted_basis(&g, &gens).unwrap();
        assert_eq!(ab.basis, gens);
        assert_eq!(ab.b_matrix, vec![vec![1]]);
        let z2 = grp(&[2]);
        let ab = adapted_basis(&z2, &els(&z2, &[&[1]])).unwrap();
        assert_eq!(nonvanishing_failures(&ab), vec![0]);
    }

    #[test]
    fn trivial_group() {
        let t = FinAbGroup::trivial();
        let ab = adapted_basis(&t, &[]).unwrap();
        assert!(validate_adapted(&ab, &[]));
        assert!(ab.basis.is_empty());
        assert!(nonvanishing_failures(&ab).is_empty());
    }

    #[test]
    fn cyclic_needs_careful_ordering() {
        // Z/60 with (2,1,1) and (1,1,0) in Z/4 x Z/3 x Z/5 coordinates
        let g = grp(&[60]);
        let gens = els(&g, &[&[46], &[25]]);
        let ab = adapted_basis(&g, &gens).unwrap();
        assert!(validate_adapted(&ab, &gens));
        assert!(ab.is_unit_triangular());
    }

    #[test]
    fn rejects_bad_input() {
        let g = grp(&[2, 2]);
        assert_eq!(adapted_basis(&g, &els(&g, &[&[1, 0]])), Err(Error::NotGenerating));
        assert_eq!(
            adapted_basis(&g, &els(&g, &[&[1, 0], &[0, 1], &[1, 1]])),
            Err(Error::NotMinimal(0))
        );
    }

    #[test]
    fn validator_rejects_wrong_reconstruction() {
        let g = grp(&[2, 2]);
        let gens = els(&g, &[&[1, 1], &[0, 1]]);
        let ab = AdaptedBasis {
            group: g.clone(),
            reordering: vec![0, 1],
            basis: els(&g, &[&[1, 0], &[0, 1]]),
            basis_orders: vec![2, 2],
            b_matrix: vec![vec![1, 0], vec![0, 1]],
        };
        assert!(!validate_adapted(&ab, &gens));
    }

    #[test]
    fn idempotents() {
        // exponent 12: projection to 3-part is 4 (4 = 1 mod 3, 0 mod 4)
        assert_eq!(idempotent(12, &[3]), 4);
        assert_eq!(idempotent(12, &[2]), 9);
        assert_eq!(idempotent(12, &[2, 3]), 1);
        assert_eq!(idempotent(12, &[]), 0);
    }
}
