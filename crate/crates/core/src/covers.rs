//! Discrete invariants of a ramification datum `(G; h_1, ..., h_n)`.

use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::adapted_basis::{adapted_basis, AdaptedBasis, BasisCoordinates};
use crate::error::{Error, Result};
use crate::groups::{
    character_exponent_a, parse_element_list, quotient, subgroup_generated, FinAbGroup,
    GroupElement, Quotient, Subgroup,
};

/// A finite abelian group with ordered ramification elements, one per
/// marked point. `h_j = 0` marks an unramified point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RamificationData {
    group: FinAbGroup,
    points: Vec<GroupElement>,
    base_genus: u64,
}

impl RamificationData {
    pub fn new(group: FinAbGroup, points: Vec<GroupElement>, base_genus: u64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::NoMarkedPoints);
        }
        for h in &points {
            if !group.contains(h) {
                return Err(Error::DimensionMismatch {
                    expected: group.num_factors(),
                    got: h.coords().len(),
                });
            }
        }
        Ok(Self {
            group,
            points,
            base_genus,
        })
    }

    /// Genus-one data from literals, e.g. `("Z/2", "1;1;1;1")`.
    pub fn parse(group: &str, ram: &str) -> Result<Self> {
        let g = FinAbGroup::parse(group)?;
        let pts = parse_element_list(&g, ram)?;
        Self::new(g, pts, 1)
    }

    pub fn with_base_genus(mut self, genus: u64) -> Self {
        self.base_genus = genus;
        self
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn points(&self) -> &[GroupElement] {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn base_genus(&self) -> u64 {
        self.base_genus
    }

    /// The same datum with one more marked point carrying `h`.
    pub fn push_point(&self, h: GroupElement) -> Result<Self> {
        let mut pts = self.points.clone();
        pts.push(h);
        Self::new(self.group.clone(), pts, self.base_genus)
    }

    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            group: self.group.clone(),
            points: order.iter().map(|&i| self.points[i].clone()).collect(),
            base_genus: self.base_genus,
        }
    }

    /// `ram` literal that parses back to the same points.
    pub fn ram_literal(&self) -> String {
        self.points
            .iter()
            .map(|h| h.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }

    /// `h_1 + ... + h_n = 0`, which every abelian cover satisfies.
    pub fn is_balanced(&self) -> bool {
        let total = self.points.iter().fold(self.group.zero(), |acc, h| self.group.add(&acc, h));
        total == self.group.zero()
    }

    pub(crate) fn require_genus_one(&self) -> Result<()> {
        if self.base_genus != 1 {
            return Err(Error::BaseGenus(self.base_genus));
        }
        Ok(())
    }
}

impl fmt::Display for RamificationData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}; {}", self.group, self.ram_literal())
    }
}

/// `0 -> R -> G -> E -> 0` for the ramification subgroup `R`.
#[derive(Debug, Clone)]
pub struct RamificationSplit {
    pub ramification: Subgroup,
    pub etale: Quotient,
}

pub fn ramification_split(data: &RamificationData) -> RamificationSplit {
    let g = &data.group;
    let ramification = subgroup_generated(g, &data.points).expect("points lie in G");
    let etale = quotient(g, &data.points).expect("points lie in G");
    RamificationSplit {
        ramification,
        etale,
    }
}

pub fn is_totally_ramified(data: &RamificationData) -> bool {
    ramification_split(data).etale.group.is_trivial()
}

/// Right-hand side of Riemann-Hurwitz, i.e. `2g - 2` as an exact rational.
pub fn rh_euler_characteristic(data: &RamificationData) -> Ratio<i128> {
    let order = i128::from(data.group.order() as i64);
    let base = Ratio::from_integer(order * (2 * data.base_genus as i128 - 2));
    data.points.iter().fold(base, |acc, h| {
        let o = data.group.element_order(h) as i128;
        acc + Ratio::from_integer(order) * (Ratio::from_integer(1) - Ratio::new(1, o))
    })
}

/// Genus of the covering curve. Unbalanced data admit no cover.
pub fn rh_genus(data: &RamificationData) -> Result<u64> {
    if !data.is_balanced() {
        return Err(Error::Unbalanced);
    }
    let chi = rh_euler_characteristic(data);
    assert!(chi.is_integer(), "Riemann-Hurwitz right-hand side is integral");
    let two_g_minus_two = chi.to_integer();
    assert!(
        two_g_minus_two >= -2 && two_g_minus_two % 2 == 0,
        "Riemann-Hurwitz right-hand side is even and at least -2"
    );
    Ok(((two_g_minus_two + 2) / 2) as u64)
}

/// `floor((a_chi1 + a_chi2) / ord(h))`, which is 0 or 1.
pub fn epsilon_coefficient(
    g: &FinAbGroup,
    chi1: &GroupElement,
    chi2: &GroupElement,
    h: &GroupElement,
) -> u8 {
    let a1 = character_exponent_a(g, chi1, h);
    let a2 = character_exponent_a(g, chi2, h);
    u8::from(a1 + a2 >= g.element_order(h))
}

fn check_direct_basis(g: &FinAbGroup, basis: &[GroupElement]) -> Result<Vec<u64>> {
    if basis.iter().any(|x| !g.contains(x)) {
        return Err(Error::InvalidBasis);
    }
    let orders: Vec<u64> = basis.iter().map(|x| g.element_order(x)).collect();
    let spans = subgroup_generated(g, basis)?.group.order() == g.order();
    if orders.iter().product::<u64>() != g.order() || !spans {
        return Err(Error::InvalidBasis);
    }
    Ok(orders)
}

/// `lambda[i][j] = d_i * a^j_{g_i^dual} / ord(h_j)` for a direct-sum basis
/// `g_1..g_l` of `G` with `d_i = ord(g_i)`.
///
/// The datum is first transported to `Z/d_1 x ... x Z/d_l` through the
/// basis, where the dual basis characters are the coordinate vectors.
pub fn lambda_matrix(data: &RamificationData, basis: &[GroupElement]) -> Result<Vec<Vec<i64>>> {
    let g = &data.group;
    let orders = check_direct_basis(g, basis)?;
    let model = FinAbGroup::new(orders.clone())?;
    let coords = BasisCoordinates::new(g, basis);
    let mut lambda = vec![vec![0i64; data.n()]; basis.len()];
    for (j, h) in data.points.iter().enumerate() {
        let hv = model.element(&coords.get(h).ok_or(Error::InvalidBasis)?)?;
        let oh = model.element_order(&hv);
        for (i, &d) in orders.iter().enumerate() {
            let chi = model.generator(i);
            let a = character_exponent_a(&model, &chi, &hv);
            lambda[i][j] = (d * a / oh) as i64;
        }
    }
    Ok(lambda)
}

/// Smallest subset (lexicographically first among the smallest) of the
/// ramification elements generating `R`. Indices are ascending.
pub fn minimal_generating_subset(data: &RamificationData) -> Vec<usize> {
    let g = &data.group;
    let target = subgroup_generated(g, &data.points)
        .expect("points lie in G")
        .group
        .order();
    let n = data.n();
    (0..=n)
        .find_map(|size| first_combination(n, size, &mut Vec::new(), 0, &mut |idx| {
            let elems: Vec<GroupElement> = idx.iter().map(|&i| data.points[i].clone()).collect();
            subgroup_generated(g, &elems).expect("points lie in G").group.order() == target
        }))
        .expect("the full set of points generates R")
}

/// First `size`-subset of `start..n` (lexicographic) accepted by `ok`.
fn first_combination(
    n: usize,
    size: usize,
    prefix: &mut Vec<usize>,
    start: usize,
    ok: &mut dyn FnMut(&[usize]) -> bool,
) -> Option<Vec<usize>> {
    if prefix.len() == size {
        return ok(prefix).then(|| prefix.clone());
    }
    for i in start..n {
        prefix.push(i);
        let found = first_combination(n, size, prefix, i + 1, ok);
        prefix.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Discrete coefficient data of the split building equations.
#[derive(Debug, Clone, Serialize)]
pub struct BuildingCoefficients {
    /// `l x n`, coordinates of the `h_j` over the standard generators of `G`.
    pub lambda: Vec<Vec<i64>>,
    /// `k x n`, coefficients of every `h_j` over the adapted basis of `R`.
    pub b: Vec<Vec<i64>>,
    /// `k x l`, the characters `ord(r_i) * g'_i` over the dual basis of `E`.
    pub c: Vec<Vec<i64>>,
    /// adapted basis `r_1..r_k`, as elements of `G`
    pub basis_r: Vec<GroupElement>,
    pub r_orders: Vec<u64>,
    /// canonical generators `e_1..e_l` of `E`
    pub basis_e: Vec<GroupElement>,
    pub etale_group: FinAbGroup,
    /// lifts `g'_i` of the dual basis of `R` to characters of `G`
    pub character_lifts: Vec<GroupElement>,
    /// original indices of the minimal generating subset, in adapted order
    /// (the last one pairs with `r_k`)
    pub subset: Vec<usize>,
    /// marked points reordered: points outside the subset in their
    /// original order, then the subset in adapted order
    pub point_order: Vec<usize>,
}

impl BuildingCoefficients {
    pub fn k(&self) -> usize {
        self.basis_r.len()
    }

    /// Row `i` of `b` read along `point_order`.
    pub fn b_row_reordered(&self, i: usize) -> Vec<i64> {
        self.point_order.iter().map(|&j| self.b[i][j]).collect()
    }
}

/// Phase of character `chi` at `x` as a residue modulo the exponent `L`.
fn phase(g: &FinAbGroup, chi: &GroupElement, x: &GroupElement) -> i128 {
    let l = g.exponent() as i128;
    chi.coords()
        .iter()
        .zip(x.coords())
        .zip(g.orders())
        .map(|((&c, &v), &d)| i128::from(c) * i128::from(v) * (l / d as i128))
        .sum::<i128>()
        .rem_euclid(l)
}

pub fn split_coefficients(data: &RamificationData) -> Result<BuildingCoefficients> {
    split_coefficients_with_subset(data, &minimal_generating_subset(data))
}

/// As [`split_coefficients`], with the generating subset of the `h_j`
/// fixed by the caller. The subset must generate `R` minimally.
pub fn split_coefficients_with_subset(
    data: &RamificationData,
    minimal: &[usize],
) -> Result<BuildingCoefficients> {
    let g = &data.group;
    let split = ramification_split(data);
    let lambda = lambda_matrix(data, &g.generators())?;

    // move the points into R's own coordinates
    let inclusion = &split.ramification.inclusion;
    let r_group = &split.ramification.group;
    let back: HashMap<u64, GroupElement> = r_group
        .elements()
        .map(|x| (g.index_of(&inclusion.apply(&x)), x))
        .collect();
    let in_r: Vec<GroupElement> = data.points.iter().map(|h| back[&g.index_of(h)].clone()).collect();

    let gens: Vec<GroupElement> = minimal.iter().map(|&i| in_r[i].clone()).collect();
    let ab: AdaptedBasis = adapted_basis(r_group, &gens)?;
    let subset: Vec<usize> = ab.reordering.iter().map(|&c| minimal[c]).collect();
    let k = ab.rank();

    let coords = BasisCoordinates::new(r_group, &ab.basis);
    let mut b = vec![vec![0i64; data.n()]; k];
    for (j, h) in in_r.iter().enumerate() {
        let v = coords.get(h).expect("adapted basis spans R");
        for i in 0..k {
            b[i][j] = v[i];
        }
    }
    let basis_r: Vec<GroupElement> = ab.basis.iter().map(|x| inclusion.apply(x)).collect();
    let r_orders = ab.basis_orders.clone();

    // characters of G restricting to the dual basis of R
    let l = g.exponent() as i128;
    let character_lifts: Vec<GroupElement> = (0..k)
        .map(|i| {
            g.elements()
                .find(|chi| {
                    basis_r.iter().enumerate().all(|(m, r)| {
                        let want = if m == i { l / r_orders[i] as i128 } else { 0 };
                        phase(g, chi, r) == want
                    })
                })
                .expect("restriction of characters to R is surjective")
        })
        .collect();

    let etale_group = split.etale.group.clone();
    let basis_e = etale_group.generators();
    let e_lifts: Vec<GroupElement> = basis_e.iter().map(|e| split.etale.lift(e)).collect();
    let c: Vec<Vec<i64>> = (0..k)
        .map(|i| {
            let psi = g.scale(r_orders[i] as i64, &character_lifts[i]);
            e_lifts
                .iter()
                .zip(etale_group.orders())
                .map(|(lift, &oe)| {
                    let ph = phase(g, &psi, lift);
                    let scaled = ph * oe as i128;
                    assert_eq!(scaled % l, 0, "ord(r_i) g'_i is a character of E");
                    (scaled / l) as i64
                })
                .collect()
        })
        .collect();

    let in_subset: Vec<bool> = (0..data.n()).map(|j| subset.contains(&j)).collect();
    let mut point_order: Vec<usize> = (0..data.n()).filter(|&j| !in_subset[j]).collect();
    point_order.extend(subset.iter().copied());

    Ok(BuildingCoefficients {
        lambda,
        b,
        c,
        basis_r,
        r_orders,
        basis_e,
        etale_group,
        character_lifts,
        subset,
        point_order,
    })
}
