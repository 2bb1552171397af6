//! Irreducible components of genus-one moduli of abelian covers, and the
//! torsion loci removed from the gerbe models.

use serde::Serialize;

use crate::covers::{
    minimal_generating_subset, ramification_split, split_coefficients,
    split_coefficients_with_subset, RamificationData,
};
use crate::error::{Error, Result};
use crate::groups::{
    divisor_count, euler_phi, quotient, subgroups_up_to_rank, FinAbGroup, GroupElement,
};
use crate::oracle::torsion_locus_orbit_count;

/// Isomorphism type of a torsion subgroup `K` of an elliptic curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KType {
    Trivial,
    Cyclic { n: u64 },
    Bicyclic { m: u64, n: u64 },
}

impl KType {
    fn from_orders(orders: &[u64]) -> Self {
        match *orders {
            [] => KType::Trivial,
            [n] => KType::Cyclic { n },
            [m, n] => KType::Bicyclic { m, n },
            _ => unreachable!("rank is at most two"),
        }
    }

    pub fn modular_curve(&self) -> String {
        match self {
            KType::Trivial => "Y1(1)".into(),
            KType::Cyclic { n } => format!("Y1({n})"),
            KType::Bicyclic { m, n } => format!("Y1({m},{n})"),
        }
    }

    fn weil_indices(&self) -> Vec<Option<u64>> {
        match *self {
            KType::Bicyclic { m, .. } => (1..m.max(2))
                .filter(|&i| num_integer::gcd(i, m) == 1)
                .map(Some)
                .collect(),
            _ => vec![None],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentDescriptor {
    pub k_type: KType,
    pub weil_index: Option<u64>,
    pub k: usize,
    pub excluded_loci_count: usize,
    pub base_label: String,
    pub gerbe_band: FinAbGroup,
    /// generators of `K` inside `E`
    pub subgroup_generators: Vec<GroupElement>,
}

/// Size and lexicographically first member among the smallest subsets of
/// the `h_j` generating `R`. Indices are 0-based.
pub fn minimal_k(data: &RamificationData) -> (usize, Vec<usize>) {
    let idx = minimal_generating_subset(data);
    (idx.len(), idx)
}

pub fn excluded_loci_count(n: usize, k: usize) -> usize {
    k * n - k * (k + 1) / 2
}

fn base_label(k_type: &KType, k: usize, n: usize) -> String {
    match k_type {
        KType::Trivial => format!("C^{k}_(1,{})", n - k),
        other => format!("{}^{k}_({})", other.modular_curve(), n - k),
    }
}

pub fn classify_components(data: &RamificationData) -> Result<Vec<ComponentDescriptor>> {
    data.require_genus_one()?;
    let n = data.n();
    let (k, _) = minimal_k(data);
    if k == n {
        return Ok(Vec::new());
    }
    let e = ramification_split(data).etale.group;
    let mut out = Vec::new();
    for entry in subgroups_up_to_rank(&e, Some(2))? {
        let k_type = KType::from_orders(entry.iso_type.orders());
        let band = quotient(&e, &entry.generators)?.group;
        for weil_index in k_type.weil_indices() {
            out.push(ComponentDescriptor {
                k_type,
                weil_index,
                k,
                excluded_loci_count: excluded_loci_count(n, k),
                base_label: base_label(&k_type, k, n),
                gerbe_band: band.clone(),
                subgroup_generators: entry.generators.clone(),
            });
        }
    }
    out.sort_by(|a, b| {
        (a.k_type, a.weil_index, &a.subgroup_generators).cmp(&(
            b.k_type,
            b.weil_index,
            &b.subgroup_generators,
        ))
    });
    Ok(out)
}

pub fn component_count(data: &RamificationData) -> Result<usize> {
    classify_components(data).map(|c| c.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub label: String,
    pub weil_index: Option<u64>,
    pub multiplicity: u64,
}

/// Modular-curve labels of the components for étale covers with group `E`,
/// with how many subgroups of each type occur.
pub fn etale_decomposition(e: &FinAbGroup) -> Result<Vec<CatalogEntry>> {
    let mut types: Vec<KType> = subgroups_up_to_rank(e, Some(2))?
        .iter()
        .map(|s| KType::from_orders(s.iso_type.orders()))
        .collect();
    types.sort();
    let mut out: Vec<CatalogEntry> = Vec::new();
    let mut i = 0;
    while i < types.len() {
        let t = types[i];
        let mult = types[i..].iter().take_while(|&&u| u == t).count();
        for weil_index in t.weil_indices() {
            out.push(CatalogEntry {
                label: t.modular_curve(),
                weil_index,
                multiplicity: mult as u64,
            });
        }
        i += mult;
    }
    Ok(out)
}

/// Component counts of the torsion locus `sum a_i x_i = 0`: both textual
/// readings, plus the orbit count once computed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsionLocusCount {
    pub gcd: u64,
    pub divisor_count_reading: u64,
    pub totient_reading: u64,
    pub oracle_count: Option<u64>,
}

impl TorsionLocusCount {
    /// The orbit count if present, else the divisor reading.
    pub fn authoritative(&self) -> u64 {
        self.oracle_count.unwrap_or(self.divisor_count_reading)
    }

    pub fn matching_readings(&self) -> Vec<&'static str> {
        let Some(o) = self.oracle_count else {
            return Vec::new();
        };
        let mut v = Vec::new();
        if o == self.divisor_count_reading {
            v.push("divisor_count");
        }
        if o == self.totient_reading {
            v.push("totient");
        }
        v
    }
}

pub fn torsion_locus_component_count(a: &[i64]) -> Result<TorsionLocusCount> {
    if a.len() < 2 {
        return Err(Error::InvalidVector("need at least two entries".into()));
    }
    if a.iter().all(|&x| x == 0) {
        return Err(Error::DegenerateVector);
    }
    if a.iter().sum::<i64>() != 0 {
        return Err(Error::InvalidVector("entries must sum to zero".into()));
    }
    let d = a.iter().fold(0u64, |acc, &x| num_integer::gcd(acc, x.unsigned_abs()));
    Ok(TorsionLocusCount {
        gcd: d,
        divisor_count_reading: divisor_count(d),
        totient_reading: euler_phi(d),
        oracle_count: None,
    })
}

/// As [`torsion_locus_component_count`] with the orbit count filled in.
pub fn torsion_locus_component_count_checked(
    a: &[i64],
    max_states: u64,
) -> Result<TorsionLocusCount> {
    let mut c = torsion_locus_component_count(a)?;
    c.oracle_count = Some(torsion_locus_orbit_count(a, max_states)?.orbit_count);
    Ok(c)
}

/// One codimension-one locus `D_{j,n}` removed at some step of the
/// reduction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DLocus {
    /// `k` at the reduction step producing this locus
    pub step: usize,
    /// 1-based index of the point `x_j` it compares against
    pub j: usize,
    /// original indices of the points `x_1..x_{n-1}` at this step
    pub points: Vec<usize>,
    /// coefficients on `x_1..x_{n-1}` followed by the section `y`
    pub coefficients: Vec<i64>,
    /// coefficients on the étale torsion sections
    pub etale_coefficients: Vec<i64>,
    pub components: TorsionLocusCount,
}

/// All `(n-1) + ... + (n-k)` loci, computed by peeling off one adapted
/// basis element at a time.
pub fn excluded_loci(data: &RamificationData, max_states: u64) -> Result<Vec<DLocus>> {
    data.require_genus_one()?;
    let (k, subset) = minimal_k(data);
    if k == data.n() {
        return Err(Error::EmptyModuli(k));
    }
    let mut out = Vec::new();
    let labels: Vec<usize> = (0..data.n()).collect();
    peel(data.clone(), subset, labels, max_states, &mut out)?;
    Ok(out)
}

fn peel(
    data: RamificationData,
    subset: Vec<usize>,
    labels: Vec<usize>,
    max_states: u64,
    out: &mut Vec<DLocus>,
) -> Result<()> {
    if subset.is_empty() {
        return Ok(());
    }
    let bc = match split_coefficients_with_subset(&data, &subset) {
        Ok(bc) => bc,
        // the reduced subset can stop being irredundant; fall back to a fresh one
        Err(Error::NotMinimal(_)) => split_coefficients(&data)?,
        Err(e) => return Err(e),
    };
    let k = bc.k();
    if k == 0 {
        return Ok(());
    }
    let n = data.n();
    let o = bc.r_orders[k - 1] as i64;
    let brow = bc.b_row_reordered(k - 1);
    debug_assert_eq!(brow[n - 1], 1);
    let total: i64 = brow.iter().sum();
    let order = &bc.point_order;
    let step_labels: Vec<usize> = order[..n - 1].iter().map(|&t| labels[t]).collect();
    for j in 1..n {
        let mut coeffs: Vec<i64> = brow[..n - 1].iter().map(|&b| -b).collect();
        coeffs[0] -= o - total;
        coeffs[j - 1] -= 1;
        coeffs.push(o);
        let etale: Vec<i64> = bc.c[k - 1].iter().map(|&c| -c).collect();
        let components = torsion_locus_component_count_checked(&coeffs, max_states)?;
        out.push(DLocus {
            step: k,
            j,
            points: step_labels.clone(),
            coefficients: coeffs,
            etale_coefficients: etale,
            components,
        });
    }

    // pass to G / <r_k> with h~_j = h_j - b_kj h_n
    let g = data.group();
    let q = quotient(g, std::slice::from_ref(&bc.basis_r[k - 1]))?;
    let last = &data.points()[order[n - 1]];
    let reduced: Vec<GroupElement> = (0..n - 1)
        .map(|t| {
            let h = &data.points()[order[t]];
            q.projection.apply(&g.sub(h, &g.scale(brow[t], last)))
        })
        .collect();
    let reduced_data = RamificationData::new(q.group.clone(), reduced, data.base_genus())?;
    let first_subset = n - k;
    let next_subset: Vec<usize> = (first_subset..n - 1).collect();
    peel(reduced_data, next_subset, step_labels, max_states, out)
}
