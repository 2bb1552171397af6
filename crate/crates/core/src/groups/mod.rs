//! Finite abelian groups presented as products of cyclic factors.
//!
//! Groups keep the factor orders they were built with; [`canonical_form`]
//! produces the invariant-factor presentation when two groups have to be
//! compared. Characters never exist as functions: under the fixed
//! coordinatewise identification of a group with its dual, a character is
//! just another coordinate vector, and evaluating it only ever produces an
//! exponent residue.

mod parse;
pub mod smith;

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use smith::{smith_normal_form, IntMatrix};

pub use parse::{parse_element, parse_element_list};

/// Hard cap for routines that walk every element of a group.
pub const ENUMERATION_LIMIT: u64 = 1 << 20;

/// `Z/d_1 x ... x Z/d_l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FinAbGroup {
    orders: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    coords: Vec<i64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[i64] {
        &self.coords
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl FinAbGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if orders.contains(&0) {
            return Err(Error::ZeroOrder);
        }
        let orders = if orders.iter().all(|&d| d == 1) {
            Vec::new()
        } else {
            orders
        };
        Ok(Self { orders })
    }

    pub fn cyclic(n: u64) -> Self {
        Self::new(vec![n]).expect("cyclic order must be positive")
    }

    pub fn trivial() -> Self {
        Self { orders: Vec::new() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse::parse_group(text)
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn num_factors(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |acc, &d| acc.lcm(&d))
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.orders.len()],
        }
    }

    /// Builds an element, reducing every coordinate into `[0, d_i)`.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.orders.len() {
            // the trivial group also accepts all-zero vectors of any length
            if self.orders.is_empty() && coords.iter().all(|&c| c == 0) {
                return Ok(self.zero());
            }
            return Err(Error::DimensionMismatch {
                expected: self.orders.len(),
                got: coords.len(),
            });
        }
        Ok(self.reduce(coords.to_vec()))
    }

    fn reduce(&self, mut coords: Vec<i64>) -> GroupElement {
        for (c, &d) in coords.iter_mut().zip(&self.orders) {
            *c = c.rem_euclid(d as i64);
        }
        GroupElement { coords }
    }

    /// The `i`-th standard generator.
    pub fn generator(&self, i: usize) -> GroupElement {
        let mut coords = vec![0; self.orders.len()];
        coords[i] = 1;
        self.reduce(coords)
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.orders.len()).map(|i| self.generator(i)).collect()
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.reduce(a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.reduce(a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        self.reduce(a.coords.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, k: i64, a: &GroupElement) -> GroupElement {
        self.reduce(
            a.coords
                .iter()
                .zip(&self.orders)
                .map(|(&x, &d)| ((i128::from(k) * i128::from(x)).rem_euclid(d as i128)) as i64)
                .collect(),
        )
    }

    /// `sum_i coeffs[i] * elems[i]`.
    pub fn combine(&self, coeffs: &[i64], elems: &[GroupElement]) -> GroupElement {
        elems
            .iter()
            .zip(coeffs)
            .fold(self.zero(), |acc, (e, &c)| self.add(&acc, &self.scale(c, e)))
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.coords.len() == self.orders.len()
            && x.coords.iter().zip(&self.orders).all(|(&c, &d)| 0 <= c && (c as u64) < d)
    }

    /// Least `m >= 1` with `m * x = 0`.
    pub fn element_order(&self, x: &GroupElement) -> u64 {
        x.coords
            .iter()
            .zip(&self.orders)
            .fold(1u64, |acc, (&c, &d)| acc.lcm(&(d / (c as u64).gcd(&d))))
    }

    /// Mixed-radix index of an element, first factor most significant.
    pub fn index_of(&self, x: &GroupElement) -> u64 {
        x.coords
            .iter()
            .zip(&self.orders)
            .fold(0u64, |acc, (&c, &d)| acc * d + c as u64)
    }

    pub fn element_at(&self, mut idx: u64) -> GroupElement {
        let mut coords = vec![0i64; self.orders.len()];
        for (c, &d) in coords.iter_mut().zip(&self.orders).rev() {
            *c = (idx % d) as i64;
            idx /= d;
        }
        GroupElement { coords }
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(move |i| self.element_at(i))
    }

    fn check_enumerable(&self) -> Result<()> {
        if self.order() > ENUMERATION_LIMIT {
            return Err(Error::GroupTooLarge(self.order()));
        }
        Ok(())
    }

    /// True when every factor order is at least 2 and the orders form a
    /// divisibility chain.
    pub fn is_canonical(&self) -> bool {
        self.orders.iter().all(|&d| d >= 2) && self.orders.windows(2).all(|w| w[1] % w[0] == 0)
    }

    /// Minimal number of generators: the length of the invariant-factor form.
    pub fn min_generator_count(&self) -> usize {
        canonical_form(self).group.num_factors()
    }

    /// Primes dividing the order, ascending.
    pub fn primes(&self) -> Vec<u64> {
        prime_factors(self.exponent())
    }

    pub fn is_p_group(&self) -> bool {
        self.primes().len() <= 1
    }

    pub fn is_cyclic(&self) -> bool {
        self.min_generator_count() <= 1
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return write!(f, "trivial");
        }
        for (i, d) in self.orders.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "Z/{d}")?;
        }
        Ok(())
    }
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    prime_factors(n)
        .into_iter()
        .fold(n, |acc, p| acc / p * (p - 1))
}

pub fn divisor_count(n: u64) -> u64 {
    (1..=n).filter(|d| n % d == 0).count() as u64
}

/// A homomorphism given by the images of the source generators.
///
/// `matrix[i][j]` is coordinate `i` of the image of source generator `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Homomorphism {
    source: FinAbGroup,
    target: FinAbGroup,
    matrix: Vec<Vec<i64>>,
}

impl Homomorphism {
    pub fn new(source: FinAbGroup, target: FinAbGroup, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let h = Self::from_columns_unchecked(source, target, matrix)?;
        for j in 0..h.source.num_factors() {
            let col = h.image_of_generator(j);
            let d = h.source.orders[j] as i64;
            if h.target.scale(d, &col) != h.target.zero() {
                return Err(Error::IllDefinedHomomorphism);
            }
        }
        Ok(h)
    }

    fn from_columns_unchecked(
        source: FinAbGroup,
        target: FinAbGroup,
        matrix: Vec<Vec<i64>>,
    ) -> Result<Self> {
        if matrix.len() != target.num_factors()
            || matrix.iter().any(|r| r.len() != source.num_factors())
        {
            return Err(Error::DimensionMismatch {
                expected: target.num_factors(),
                got: matrix.len(),
            });
        }
        let mut matrix = matrix;
        for (row, &d) in matrix.iter_mut().zip(&target.orders) {
            for v in row.iter_mut() {
                *v = v.rem_euclid(d as i64);
            }
        }
        Ok(Self {
            source,
            target,
            matrix,
        })
    }

    /// Homomorphism from a list of generator images (one per source factor).
    pub fn from_images(
        source: FinAbGroup,
        target: FinAbGroup,
        images: &[GroupElement],
    ) -> Result<Self> {
        let rows = target.num_factors();
        let matrix = (0..rows)
            .map(|i| images.iter().map(|e| e.coords[i]).collect())
            .collect();
        Self::new(source, target, matrix)
    }

    pub fn source(&self) -> &FinAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FinAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn image_of_generator(&self, j: usize) -> GroupElement {
        GroupElement {
            coords: self.matrix.iter().map(|row| row[j]).collect(),
        }
    }

    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        let coords = self
            .matrix
            .iter()
            .zip(&self.target.orders)
            .map(|(row, &d)| {
                let s: i128 = row
                    .iter()
                    .zip(&x.coords)
                    .map(|(&a, &b)| i128::from(a) * i128::from(b))
                    .sum();
                s.rem_euclid(d as i128) as i64
            })
            .collect();
        GroupElement { coords }
    }

    pub fn compose(&self, first: &Homomorphism) -> Homomorphism {
        let images: Vec<_> = (0..first.source.num_factors())
            .map(|j| self.apply(&first.image_of_generator(j)))
            .collect();
        Homomorphism::from_images(first.source.clone(), self.target.clone(), &images)
            .expect("composition of homomorphisms is well defined")
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|&v| v == 0)
    }

    /// Some preimage of `y`, by exhaustive search over the source.
    pub fn preimage(&self, y: &GroupElement) -> Option<GroupElement> {
        self.source.elements().find(|x| &self.apply(x) == y)
    }
}

/// Invariant-factor form of a group with the maps both ways.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub group: FinAbGroup,
    /// original coordinates -> canonical coordinates
    pub to_canonical: Homomorphism,
    /// canonical coordinates -> original coordinates
    pub from_canonical: Homomorphism,
}

fn diag_matrix(orders: &[u64]) -> IntMatrix {
    let l = orders.len();
    (0..l)
        .map(|i| (0..l).map(|j| if i == j { orders[i] as i128 } else { 0 }).collect())
        .collect()
}

fn reduce_mod(v: i128, d: i128) -> i64 {
    v.rem_euclid(d) as i64
}

pub fn canonical_form(g: &FinAbGroup) -> CanonicalForm {
    let q = quotient_by_matrix(g, &[]);
    let from_rows: Vec<Vec<i64>> = (0..g.num_factors())
        .map(|i| {
            q.lift_columns
                .iter()
                .map(|col| reduce_mod(col[i], g.orders[i] as i128))
                .collect()
        })
        .collect();
    let from_canonical = Homomorphism::new(q.group.clone(), g.clone(), from_rows)
        .expect("inverse change of basis is well defined");
    CanonicalForm {
        group: q.group,
        to_canonical: q.projection,
        from_canonical,
    }
}

/// `G/H` with its projection and a coordinate lift back to `G`.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub group: FinAbGroup,
    pub projection: Homomorphism,
    lift_columns: Vec<Vec<i128>>,
}

impl Quotient {
    /// A preimage of `y` under the projection.
    pub fn lift(&self, y: &GroupElement) -> GroupElement {
        let source = self.projection.source();
        let mut coords = vec![0i128; source.num_factors()];
        for (col, &c) in self.lift_columns.iter().zip(&y.coords) {
            for (acc, &v) in coords.iter_mut().zip(col) {
                *acc += v * i128::from(c);
            }
        }
        let coords: Vec<i64> = coords
            .iter()
            .zip(source.orders())
            .map(|(&v, &d)| reduce_mod(v, d as i128))
            .collect();
        GroupElement { coords }
    }
}

fn quotient_by_matrix(g: &FinAbGroup, gens: &[GroupElement]) -> Quotient {
    let l = g.num_factors();
    let mut m = diag_matrix(&g.orders);
    for (i, row) in m.iter_mut().enumerate() {
        row.extend(gens.iter().map(|h| i128::from(h.coords[i])));
    }
    let snf = smith_normal_form(&m, l + gens.len());
    let keep: Vec<usize> = (0..l).filter(|&i| snf.diag[i] > 1).collect();
    let orders: Vec<u64> = keep.iter().map(|&i| snf.diag[i] as u64).collect();
    let group = FinAbGroup::new(orders).expect("smith diagonal is positive");
    let proj_rows: Vec<Vec<i64>> = keep
        .iter()
        .map(|&i| {
            snf.p[i]
                .iter()
                .map(|&v| reduce_mod(v, snf.diag[i]))
                .collect()
        })
        .collect();
    let projection = Homomorphism::new(g.clone(), group.clone(), proj_rows)
        .expect("projection onto the smith quotient is well defined");
    let lift_columns = keep
        .iter()
        .map(|&i| (0..l).map(|r| snf.p_inv[r][i]).collect())
        .collect();
    Quotient {
        group,
        projection,
        lift_columns,
    }
}

/// `G / <gens>` in canonical form.
pub fn quotient(g: &FinAbGroup, gens: &[GroupElement]) -> Result<Quotient> {
    for h in gens {
        if !g.contains(h) {
            return Err(Error::DimensionMismatch {
                expected: g.num_factors(),
                got: h.coords.len(),
            });
        }
    }
    Ok(quotient_by_matrix(g, gens))
}

/// Isomorphism type of a subgroup together with its inclusion.
#[derive(Debug, Clone)]
pub struct Subgroup {
    pub group: FinAbGroup,
    pub inclusion: Homomorphism,
}

impl Subgroup {
    /// Images of the canonical generators inside the ambient group.
    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.group.num_factors())
            .map(|j| self.inclusion.image_of_generator(j))
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.group.num_factors()
    }
}

/// `<gens>` as an abstract group in canonical form plus its inclusion.
pub fn subgroup_generated(g: &FinAbGroup, gens: &[GroupElement]) -> Result<Subgroup> {
    for h in gens {
        if !g.contains(h) {
            return Err(Error::DimensionMismatch {
                expected: g.num_factors(),
                got: h.coords.len(),
            });
        }
    }
    let l = g.num_factors();
    let m = gens.len();
    // kernel of [A | D] : Z^(m+l) -> Z^l, projected to the first m coordinates
    let mut mat: IntMatrix = (0..l)
        .map(|i| gens.iter().map(|h| i128::from(h.coords[i])).collect())
        .collect();
    for (i, row) in mat.iter_mut().enumerate() {
        row.extend((0..l).map(|j| if i == j { g.orders[i] as i128 } else { 0 }));
    }
    let kernel: Vec<Vec<i128>> = if l == 0 {
        (0..m).map(|j| (0..m).map(|i| i128::from(i == j)).collect()).collect()
    } else {
        let snf = smith_normal_form(&mat, m + l);
        // [A|D] has rank l because D is nonsingular
        (l..m + l)
            .map(|c| (0..m).map(|r| snf.q[r][c]).collect())
            .collect()
    };
    // relation matrix: m x (#kernel vectors), columns are kernel vectors
    let rel: IntMatrix = (0..m)
        .map(|r| kernel.iter().map(|col| col[r]).collect())
        .collect();
    let snf = smith_normal_form(&rel, kernel.len());
    let keep: Vec<usize> = (0..m).filter(|&i| snf.diag.get(i).copied().unwrap_or(0) != 1).collect();
    let orders: Vec<u64> = keep
        .iter()
        .map(|&i| {
            let d = snf.diag[i];
            assert!(d > 0, "subgroup of a finite group is finite");
            d as u64
        })
        .collect();
    let group = FinAbGroup::new(orders).expect("positive orders");
    let images: Vec<GroupElement> = keep
        .iter()
        .map(|&i| {
            let coeffs: Vec<i128> = (0..m).map(|r| snf.p_inv[r][i]).collect();
            combine_wide(g, &coeffs, gens)
        })
        .collect();
    let inclusion = Homomorphism::from_images(group.clone(), g.clone(), &images)?;
    Ok(Subgroup { group, inclusion })
}

fn combine_wide(
    g: &FinAbGroup,
    coeffs: &[i128],
    gens: &[GroupElement],
) -> GroupElement {
    let coords = (0..g.num_factors())
        .map(|i| {
            let d = g.orders[i] as i128;
            let s: i128 = gens
                .iter()
                .zip(coeffs)
                .map(|(h, &c)| (c.rem_euclid(d) * i128::from(h.coords[i])).rem_euclid(d))
                .sum();
            s.rem_euclid(d) as i64
        })
        .collect();
    GroupElement { coords }
}

/// One subgroup in a census: generators (as many as its rank) and the
/// invariant factors of its isomorphism type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubgroupEntry {
    pub generators: Vec<GroupElement>,
    pub iso_type: FinAbGroup,
}

impl SubgroupEntry {
    pub fn rank(&self) -> usize {
        self.iso_type.num_factors()
    }
}

type Bits = Vec<u64>;

fn bits_new(n: u64) -> Bits {
    vec![0; n.div_ceil(64) as usize]
}

fn bit_set(b: &mut Bits, i: u64) {
    b[(i / 64) as usize] |= 1 << (i % 64);
}

fn bit_get(b: &Bits, i: u64) -> bool {
    b[(i / 64) as usize] >> (i % 64) & 1 == 1
}

fn bits_subset(a: &Bits, b: &Bits) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Every subgroup whose minimal generator count is at most `max_rank`
/// (`None` means no bound), each listed once as a point set.
///
/// Subgroups are found as iterated joins of cyclic subgroups, with each
/// subgroup stored as a bitset over element indices.
pub fn subgroups_up_to_rank(g: &FinAbGroup, max_rank: Option<usize>) -> Result<Vec<SubgroupEntry>> {
    g.check_enumerable()?;
    let n = g.order();
    let elements: Vec<GroupElement> = g.elements().collect();

    let cyclic_of = |x: &GroupElement| -> Bits {
        let mut b = bits_new(n);
        let mut cur = g.zero();
        loop {
            bit_set(&mut b, g.index_of(&cur));
            cur = g.add(&cur, x);
            if cur == g.zero() {
                break;
            }
        }
        b
    };

    // distinct cyclic subgroups with a generator each
    let mut cyclic: Vec<(Bits, GroupElement)> = Vec::new();
    let mut seen_cyclic: HashSet<Bits> = HashSet::new();
    for x in &elements {
        let b = cyclic_of(x);
        if seen_cyclic.insert(b.clone()) {
            cyclic.push((b, x.clone()));
        }
    }

    let join = |a: &Bits, c: &Bits| -> Bits {
        let members_a: Vec<u64> = (0..n).filter(|&i| bit_get(a, i)).collect();
        let members_c: Vec<u64> = (0..n).filter(|&i| bit_get(c, i)).collect();
        let mut out = bits_new(n);
        for &i in &members_a {
            for &j in &members_c {
                let s = g.add(&elements[i as usize], &elements[j as usize]);
                bit_set(&mut out, g.index_of(&s));
            }
        }
        out
    };

    let mut trivial = bits_new(n);
    bit_set(&mut trivial, 0);
    let mut found: HashMap<Bits, Vec<GroupElement>> = HashMap::new();
    found.insert(trivial.clone(), Vec::new());
    let mut frontier = vec![trivial];
    while let Some(s) = frontier.pop() {
        let gens = found[&s].clone();
        for (c, x) in &cyclic {
            if bits_subset(c, &s) {
                continue;
            }
            let j = join(&s, c);
            if !found.contains_key(&j) {
                let mut ng = gens.clone();
                ng.push(x.clone());
                found.insert(j.clone(), ng);
                frontier.push(j);
            }
        }
    }

    let mut out: Vec<(SubgroupEntry, Bits)> = Vec::new();
    for (bits, gens) in found {
        let sub = subgroup_generated(g, &gens)?;
        if max_rank.is_some_and(|r| sub.rank() > r) {
            continue;
        }
        out.push((
            SubgroupEntry {
                generators: sub.generators(),
                iso_type: sub.group,
            },
            bits,
        ));
    }
    out.sort_by(|(a, ab), (b, bb)| {
        (a.rank(), a.iso_type.orders(), ab).cmp(&(b.rank(), b.iso_type.orders(), bb))
    });
    Ok(out.into_iter().map(|(e, _)| e).collect())
}

/// Exponent residue `a` with `chi|<h> = psi^a`, where `psi` is the character
/// of `<h>` sending `h` to the primitive root of order `ord(h)`.
///
/// With the coordinatewise duality, `chi` evaluated at `x` is the root of
/// unity of order `L` (the group exponent) raised to
/// `sum_i chi_i * x_i * L / d_i`.
pub fn character_exponent_a(g: &FinAbGroup, chi: &GroupElement, h: &GroupElement) -> u64 {
    let l = g.exponent() as i128;
    let phase: i128 = chi
        .coords
        .iter()
        .zip(&h.coords)
        .zip(&g.orders)
        .map(|((&c, &x), &d)| i128::from(c) * i128::from(x) * (l / d as i128))
        .sum::<i128>()
        .rem_euclid(l);
    let m = g.element_order(h) as i128;
    let step = l / m;
    debug_assert_eq!(phase % step, 0, "character value must lie in mu_ord(h)");
    ((phase / step) % m) as u64
}
