//! Brute-force cross-checks. Nothing here reuses the structural shortcuts
//! of the other modules: orbits are found on explicit state tables, and
//! subgroups by closing element sets.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::adapted_basis::{adapted_basis, nonvanishing_failures, validate_adapted};
use crate::covers::RamificationData;
use crate::error::{Error, Result};
use crate::groups::{FinAbGroup, GroupElement};

pub const DEFAULT_MAX_STATES: u64 = 1_000_000;

/// `S = [[0,-1],[1,0]]`.
pub const S: [[i64; 2]; 2] = [[0, -1], [1, 0]];
/// `T = [[1,1],[0,1]]`.
pub const T: [[i64; 2]; 2] = [[1, 1], [0, 1]];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// per-factor shift `(u_i, v_i) += shift[i]`
    Translation { shift: Vec<(i64, i64)> },
    /// the same matrix on every factor's pair
    Linear { matrix: [[i64; 2]; 2] },
}

/// A permutation group on `prod_i (Z/d_i)^2`, given by generators.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitProblem {
    pub factors: Vec<u64>,
    pub generators: Vec<Generator>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub state_space_size: u64,
    pub generator_count: usize,
    pub orbit_count: u64,
}

impl OrbitProblem {
    pub fn new(factors: Vec<u64>, generators: Vec<Generator>) -> Result<Self> {
        for gen in &generators {
            match gen {
                Generator::Translation { shift } if shift.len() != factors.len() => {
                    return Err(Error::DimensionMismatch {
                        expected: factors.len(),
                        got: shift.len(),
                    })
                }
                Generator::Linear { matrix: m } => {
                    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                    if factors.iter().any(|&d| (det - 1).rem_euclid(d as i64) != 0) {
                        return Err(Error::InvalidVector(format!(
                            "linear generator has determinant {det}, not 1 modulo every factor"
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(Self {
            factors,
            generators,
        })
    }

    pub fn state_space_size(&self) -> u128 {
        self.factors.iter().map(|&d| u128::from(d) * u128::from(d)).product()
    }

    fn check_bound(&self, bound: u64) -> Result<u64> {
        let size = self.state_space_size();
        if size > u128::from(bound) {
            return Err(Error::StateSpaceTooLarge { size, bound });
        }
        Ok(size as u64)
    }

    fn decode(&self, mut idx: u64, out: &mut [(i64, i64)]) {
        for (slot, &d) in out.iter_mut().zip(&self.factors).rev() {
            let v = (idx % d) as i64;
            idx /= d;
            let u = (idx % d) as i64;
            idx /= d;
            *slot = (u, v);
        }
    }

    fn encode(&self, state: &[(i64, i64)]) -> u64 {
        state.iter().zip(&self.factors).fold(0u64, |acc, (&(u, v), &d)| {
            let di = d as i64;
            (acc * d + u.rem_euclid(di) as u64) * d + v.rem_euclid(di) as u64
        })
    }

    fn apply(gen: &Generator, state: &mut [(i64, i64)]) {
        match gen {
            Generator::Translation { shift } => {
                for (s, &(a, b)) in state.iter_mut().zip(shift) {
                    s.0 += a;
                    s.1 += b;
                }
            }
            Generator::Linear { matrix: m } => {
                for s in state.iter_mut() {
                    *s = (m[0][0] * s.0 + m[0][1] * s.1, m[1][0] * s.0 + m[1][1] * s.1);
                }
            }
        }
    }

    /// Image of state index `idx` under generator `g`.
    pub fn image(&self, g: usize, idx: u64) -> u64 {
        let mut st = vec![(0, 0); self.factors.len()];
        self.decode(idx, &mut st);
        Self::apply(&self.generators[g], &mut st);
        self.encode(&st)
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        true
    }
}

pub fn orbit_count(p: &OrbitProblem, max_states: u64) -> Result<OrbitReport> {
    let size = p.check_bound(max_states)?;
    let mut uf = UnionFind::new(size as usize);
    let mut orbits = size;
    for g in 0..p.generators.len() {
        for idx in 0..size {
            if uf.union(idx as u32, p.image(g, idx) as u32) {
                orbits -= 1;
            }
        }
    }
    Ok(OrbitReport {
        state_space_size: size,
        generator_count: p.generators.len(),
        orbit_count: orbits,
    })
}

fn translation_pair(lambda: &[i64]) -> [Generator; 2] {
    [
        Generator::Translation {
            shift: lambda.iter().map(|&l| (l, 0)).collect(),
        },
        Generator::Translation {
            shift: lambda.iter().map(|&l| (0, l)).collect(),
        },
    ]
}

fn push_unique(gens: &mut Vec<Generator>, seen: &mut HashSet<Generator>, g: Generator) {
    if let Generator::Translation { shift } = &g {
        if shift.iter().all(|&(a, b)| a == 0 && b == 0) {
            return;
        }
    }
    if seen.insert(g.clone()) {
        gens.push(g);
    }
}

/// State space `prod_i (Z/d_i)^2` over the given factors of `G`; each
/// marked point contributes translations by `lambda_ij * xi` for both loop
/// classes, and `S`, `T` act diagonally.
pub fn build_monodromy_problem(data: &RamificationData, max_states: u64) -> Result<OrbitProblem> {
    data.require_genus_one()?;
    let g = data.group();
    let factors = g.orders().to_vec();
    let probe = OrbitProblem {
        factors: factors.clone(),
        generators: Vec::new(),
    };
    probe.check_bound(max_states)?;
    let mut gens = Vec::new();
    let mut seen = HashSet::new();
    for h in data.points() {
        // coordinates over the standard generators are the lambda column
        let column: Vec<i64> = h.coords().to_vec();
        for t in translation_pair(&column) {
            push_unique(&mut gens, &mut seen, t);
        }
    }
    for m in [S, T] {
        push_unique(&mut gens, &mut seen, Generator::Linear { matrix: m });
    }
    OrbitProblem::new(factors, gens)
}

/// Components of `sum a_i x_i = 0`, solving for the last variable: orbits
/// on `(Z/|a_n|)^2` under translations by `a_i * xi` and diagonal `S`, `T`.
pub fn torsion_locus_orbit_count(a: &[i64], max_states: u64) -> Result<OrbitReport> {
    torsion_locus_problem(a).and_then(|p| orbit_count(&p, max_states))
}

pub fn torsion_locus_problem(a: &[i64]) -> Result<OrbitProblem> {
    if a.len() < 2 {
        return Err(Error::InvalidVector("need at least two entries".into()));
    }
    if a.iter().all(|&x| x == 0) {
        return Err(Error::DegenerateVector);
    }
    if a.iter().sum::<i64>() != 0 {
        return Err(Error::InvalidVector("entries must sum to zero".into()));
    }
    let (last, rest) = a.split_last().expect("nonempty");
    if *last == 0 {
        return Err(Error::InvalidVector("last entry must be nonzero".into()));
    }
    let d = last.unsigned_abs();
    let mut gens = Vec::new();
    let mut seen = HashSet::new();
    for &ai in rest {
        for t in translation_pair(&[ai]) {
            push_unique(&mut gens, &mut seen, t);
        }
    }
    for m in [S, T] {
        push_unique(&mut gens, &mut seen, Generator::Linear { matrix: m });
    }
    OrbitProblem::new(vec![d], gens)
}

/// Number of subgroups of `G`, by closing every element set reachable by
/// adding one element at a time to an already found subgroup.
pub fn subgroup_census(g: &FinAbGroup) -> Result<u64> {
    const LIMIT: u64 = 10_000;
    if g.order() > LIMIT {
        return Err(Error::GroupTooLarge(g.order()));
    }
    let elems: Vec<GroupElement> = g.elements().collect();
    let close = |start: &BTreeSet<u64>| -> BTreeSet<u64> {
        let mut set = start.clone();
        set.insert(0);
        let mut frontier: Vec<u64> = set.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            let members: Vec<u64> = set.iter().copied().collect();
            for y in members {
                let z = g.index_of(&g.add(&elems[x as usize], &elems[y as usize]));
                if set.insert(z) {
                    frontier.push(z);
                }
            }
        }
        set
    };
    let mut found: HashSet<BTreeSet<u64>> = HashSet::new();
    let mut queue = vec![close(&BTreeSet::new())];
    found.insert(queue[0].clone());
    while let Some(h) = queue.pop() {
        for x in 0..g.order() {
            if h.contains(&x) {
                continue;
            }
            let mut bigger = h.clone();
            bigger.insert(x);
            let c = close(&bigger);
            if found.insert(c.clone()) {
                queue.push(c);
            }
        }
    }
    Ok(found.len() as u64)
}

/// Every abelian group of order `n`, as invariant factor chains.
pub fn abelian_groups_of_order(n: u64) -> Vec<FinAbGroup> {
    fn chains(rest: u64, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 1 {
            out.push(acc.clone());
            return;
        }
        // built from the largest factor down; each factor divides the previous one
        for d in (2..=rest).filter(|d| rest % d == 0) {
            if acc.last().is_some_and(|&prev| prev % d != 0) {
                continue;
            }
            acc.push(d);
            chains(rest / d, acc, out);
            acc.pop();
        }
    }
    if n == 1 {
        return vec![FinAbGroup::trivial()];
    }
    let mut out = Vec::new();
    chains(n, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|mut c| {
            c.reverse();
            FinAbGroup::new(c).expect("positive factors")
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct BasisCheckReport {
    pub max_order: u64,
    pub groups_checked: u64,
    pub sequences_checked: u64,
    pub triangular_checked: u64,
    /// failures of conditions (1), (2), validation, or the failing-index claim
    pub counterexamples: Vec<String>,
    /// p-group or cyclic cases where the search returned a non-triangular
    /// basis although brute force finds a triangular one
    pub triangular_search_misses: Vec<String>,
    /// p-group or cyclic cases where brute force proves no triangular
    /// basis exists under any reordering
    pub triangular_impossible: Vec<String>,
}

fn span_indices(g: &FinAbGroup, elems: &[GroupElement]) -> Vec<u64> {
    let mut seen = vec![false; g.order() as usize];
    seen[0] = true;
    let mut members = vec![0u64];
    let mut i = 0;
    while i < members.len() {
        let x = g.element_at(members[i]);
        for e in elems {
            let y = g.index_of(&g.add(&x, e));
            if !seen[y as usize] {
                seen[y as usize] = true;
                members.push(y);
            }
        }
        i += 1;
    }
    members
}

/// Whether some ordering of `gens` admits a direct-sum basis `r_1..r_k`
/// of `g` with `h_c = r_c` modulo `<r_{c+1}, ..., r_k>` for every `c`.
pub fn triangular_basis_exists(g: &FinAbGroup, gens: &[GroupElement]) -> bool {
    fn descend(g: &FinAbGroup, order: &[&GroupElement], chosen: &mut Vec<GroupElement>) -> bool {
        let span = span_indices(g, chosen);
        let Some((h, rest)) = order.split_last() else {
            return span.len() as u64 == g.order();
        };
        for &s in &span {
            let r = g.add(h, &g.element_at(s));
            chosen.push(r.clone());
            let direct = span_indices(g, chosen).len() as u64 == span.len() as u64 * g.element_order(&r);
            if direct && descend(g, rest, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    fn permute(
        g: &FinAbGroup,
        pool: &mut Vec<&GroupElement>,
        fixed: usize,
    ) -> bool {
        if fixed == pool.len() {
            return descend(g, pool, &mut Vec::new());
        }
        for i in fixed..pool.len() {
            pool.swap(fixed, i);
            if permute(g, pool, fixed + 1) {
                return true;
            }
            pool.swap(fixed, i);
        }
        false
    }
    let mut pool: Vec<&GroupElement> = gens.iter().collect();
    permute(g, &mut pool, 0)
}

/// Minimal generating sequences of `g` up to reordering: sets of elements,
/// none redundant, generating `g`. Sizes range over the minimal generator
/// count up to the number of prime-power cyclic factors.
pub fn minimal_generating_sets(g: &FinAbGroup) -> Vec<Vec<GroupElement>> {
    let elems: Vec<GroupElement> = g.elements().filter(|x| x.coords().iter().any(|&c| c != 0)).collect();
    let n = g.order();
    let span = |set: &[usize]| -> u64 {
        let mut seen = vec![false; n as usize];
        seen[0] = true;
        let mut members = vec![0u64];
        let mut i = 0;
        while i < members.len() {
            let x = g.element_at(members[i]);
            for &s in set {
                let y = g.index_of(&g.add(&x, &elems[s]));
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    members.push(y);
                }
            }
            i += 1;
        }
        members.len() as u64
    };
    let max_size: usize = g
        .orders()
        .iter()
        .map(|&d| crate::groups::prime_factors(d).len())
        .sum();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        start: usize,
        total: usize,
        max_size: usize,
        n: u64,
        cur: &mut Vec<usize>,
        span: &dyn Fn(&[usize]) -> u64,
        out: &mut Vec<Vec<usize>>,
    ) {
        let s = span(cur);
        if s == n {
            // minimal: removing any element loses generation
            let minimal = (0..cur.len()).all(|i| {
                let mut rest = cur.clone();
                rest.remove(i);
                span(&rest) < n
            });
            if minimal {
                out.push(cur.clone());
            }
            return;
        }
        if cur.len() == max_size {
            return;
        }
        for i in start..total {
            cur.push(i);
            // only extend if the new element is not already in the span
            if span(cur) > s {
                rec(i + 1, total, max_size, n, cur, span, out);
            }
            cur.pop();
        }
    }
    let mut found: Vec<Vec<usize>> = Vec::new();
    if n == 1 {
        return vec![Vec::new()];
    }
    rec(0, elems.len(), max_size, n, &mut cur, &span, &mut found);
    for set in found {
        out.push(set.into_iter().map(|i| elems[i].clone()).collect());
    }
    out
}

/// Runs the adapted basis search on every minimal generating set of every
/// abelian group of order at most `max_order`.
pub fn exhaustive_adapted_basis_check(max_order: u64) -> BasisCheckReport {
    let mut report = BasisCheckReport {
        max_order,
        ..Default::default()
    };
    for n in 2..=max_order {
        for g in abelian_groups_of_order(n) {
            report.groups_checked += 1;
            let triangular_case = g.is_p_group() || g.is_cyclic();
            for gens in minimal_generating_sets(&g) {
                report.sequences_checked += 1;
                let label = || {
                    let list: Vec<String> = gens.iter().map(|x| x.to_string()).collect();
                    format!("{g}: {}", list.join(";"))
                };
                let ab = match adapted_basis(&g, &gens) {
                    Ok(ab) => ab,
                    Err(e) => {
                        report.counterexamples.push(format!("{}: {e}", label()));
                        continue;
                    }
                };
                if !validate_adapted(&ab, &gens) {
                    report.counterexamples.push(format!("{}: validation failed", label()));
                }
                if triangular_case {
                    report.triangular_checked += 1;
                    if !ab.is_unit_triangular() {
                        if triangular_basis_exists(&g, &gens) {
                            report.triangular_search_misses.push(label());
                        } else {
                            report.triangular_impossible.push(label());
                        }
                    }
                }
                if nonvanishing_failures(&ab).is_empty() {
                    report.counterexamples.push(format!("{}: no failing index", label()));
                }
            }
        }
    }
    report
}
