//! Admissible double covers of genus-one curves branched at `n = 2g - 2`
//! points: boundary strata and Picard numbers.

use serde::Serialize;

use crate::covers::RamificationData;
use crate::error::{Error, Result};
use crate::groups::FinAbGroup;

/// Largest genus for which `2^n` fits the closed forms.
pub const MAX_GENUS: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum StratumKind {
    #[serde(rename = "Delta0_branch")]
    Delta0Branch,
    #[serde(rename = "Delta0_etale")]
    Delta0Etale,
    #[serde(rename = "Theta_star")]
    ThetaStar,
    #[serde(rename = "Theta_full")]
    ThetaFull,
    #[serde(rename = "Theta_even")]
    ThetaEven,
    #[serde(rename = "Xi_odd")]
    XiOdd,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BoundaryStratum {
    pub kind: StratumKind,
    /// 1-based marked points on the rational tail
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus_split: Option<(u64, u64)>,
}

impl BoundaryStratum {
    fn plain(kind: StratumKind) -> Self {
        Self {
            kind,
            subset: None,
            genus_split: None,
        }
    }

    /// `|I|` recomputed from `g_1`.
    pub fn subset_size_from_split(&self) -> Option<usize> {
        let (g1, _) = self.genus_split?;
        match self.kind {
            StratumKind::ThetaEven => Some(2 * g1 as usize + 2),
            StratumKind::XiOdd => Some(2 * g1 as usize + 1),
            _ => None,
        }
    }
}

fn check_genus(g: u64) -> Result<usize> {
    if g < 2 {
        return Err(Error::InvalidGenus(g));
    }
    if g > MAX_GENUS {
        return Err(Error::GenusTooLarge(g));
    }
    Ok(2 * g as usize - 2)
}

/// `(Z/2; 1, ..., 1)` with `2g - 2` points.
pub fn bielliptic_data(g: u64) -> Result<RamificationData> {
    let n = check_genus(g)?;
    let z2 = FinAbGroup::cyclic(2);
    let one = z2.element(&[1])?;
    RamificationData::new(z2, vec![one; n], 1)
}

/// Nonempty subsets of `{1..n}` in lexicographic order.
struct LexSubsets {
    n: usize,
    cur: Vec<usize>,
    started: bool,
}

impl Iterator for LexSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if !self.started {
            self.started = true;
            if self.n == 0 {
                return None;
            }
            self.cur = vec![1];
            return Some(self.cur.clone());
        }
        let last = *self.cur.last()?;
        if last < self.n {
            self.cur.push(last + 1);
        } else {
            self.cur.pop();
            *self.cur.last_mut()? += 1;
        }
        Some(self.cur.clone())
    }
}

/// Strata in sorted order, produced lazily.
pub struct StrataIter {
    g: u64,
    n: usize,
    fixed: std::vec::IntoIter<BoundaryStratum>,
    even: LexSubsets,
    odd: LexSubsets,
}

impl StrataIter {
    fn tail(&self, kind: StratumKind, set: Vec<usize>) -> Option<BoundaryStratum> {
        let size = set.len();
        if size < 2 || size >= self.n {
            return None;
        }
        let split = match kind {
            StratumKind::ThetaEven if size % 2 == 0 => {
                let g1 = (size as u64 - 2) / 2;
                (g1, self.g - 1 - g1)
            }
            StratumKind::XiOdd if size % 2 == 1 => {
                let g1 = (size as u64 - 1) / 2;
                (g1, self.g - g1)
            }
            _ => return None,
        };
        Some(BoundaryStratum {
            kind,
            subset: Some(set),
            genus_split: Some(split),
        })
    }
}

impl Iterator for StrataIter {
    type Item = BoundaryStratum;

    fn next(&mut self) -> Option<BoundaryStratum> {
        if let Some(s) = self.fixed.next() {
            return Some(s);
        }
        while let Some(set) = self.even.next() {
            if let Some(s) = self.tail(StratumKind::ThetaEven, set) {
                return Some(s);
            }
        }
        while let Some(set) = self.odd.next() {
            if let Some(s) = self.tail(StratumKind::XiOdd, set) {
                return Some(s);
            }
        }
        None
    }
}

pub fn boundary_strata_iter(g: u64) -> Result<StrataIter> {
    let n = check_genus(g)?;
    let fixed = [
        StratumKind::Delta0Branch,
        StratumKind::Delta0Etale,
        StratumKind::ThetaStar,
        StratumKind::ThetaFull,
    ]
    .into_iter()
    .map(BoundaryStratum::plain)
    .collect::<Vec<_>>()
    .into_iter();
    let subsets = || LexSubsets {
        n,
        cur: Vec::new(),
        started: false,
    };
    Ok(StrataIter {
        g,
        n,
        fixed,
        even: subsets(),
        odd: subsets(),
    })
}

pub fn boundary_strata(g: u64) -> Result<Vec<BoundaryStratum>> {
    Ok(boundary_strata_iter(g)?.collect())
}

/// `2^n - n + 2`.
pub fn stratum_count(g: u64) -> Result<u64> {
    let n = check_genus(g)? as u64;
    Ok((1u64 << n) - n + 2)
}

fn delta(g: u64) -> u64 {
    u64::from(g == 2)
}

/// Picard number of the compactified ordered moduli: `2^n + 2 - n - delta_{2,g}`.
pub fn picard_number_ordered(g: u64) -> Result<u64> {
    Ok(stratum_count(g)? - delta(g))
}

/// Picard number after forgetting the order of the points: `2g - delta_{2,g}`.
pub fn picard_number_unordered(g: u64) -> Result<u64> {
    check_genus(g)?;
    Ok(2 * g - delta(g))
}

/// Symmetric-group invariant boundary divisors: `(n, 2g)` downstairs and upstairs.
pub fn invariant_boundary_counts(g: u64) -> Result<(u64, u64)> {
    let n = check_genus(g)? as u64;
    Ok((n, 2 * g))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitClass {
    pub kind: StratumKind,
    pub subset_size: Option<usize>,
    pub strata: u64,
}

/// Strata grouped into orbits of the point permutations, keyed by kind and `|I|`.
pub fn stratum_orbits(g: u64) -> Result<Vec<OrbitClass>> {
    let n = check_genus(g)?;
    let binom = |k: usize| -> u64 {
        (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
    };
    let mut out: Vec<OrbitClass> = [
        (StratumKind::Delta0Branch, None),
        (StratumKind::Delta0Etale, None),
        (StratumKind::ThetaStar, None),
        (StratumKind::ThetaFull, Some(n)),
    ]
    .into_iter()
    .map(|(kind, subset_size)| OrbitClass {
        kind,
        subset_size,
        strata: 1,
    })
    .collect();
    for (kind, first) in [(StratumKind::ThetaEven, 2), (StratumKind::XiOdd, 3)] {
        for size in (first..n).step_by(2) {
            out.push(OrbitClass {
                kind,
                subset_size: Some(size),
                strata: binom(size),
            });
        }
    }
    Ok(out)
}
