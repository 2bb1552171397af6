#![allow(dead_code)]

use abcov_core::oracle::abelian_groups_of_order;
use abcov_core::{FinAbGroup, GroupElement, RamificationData};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x0ab_c0de;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data(g: &str, ram: &str) -> RamificationData {
    RamificationData::parse(g, ram).unwrap()
}

/// Every abelian group of order in `lo..=hi`.
pub fn groups_between(lo: u64, hi: u64) -> Vec<FinAbGroup> {
    (lo..=hi).flat_map(abelian_groups_of_order).collect()
}

pub fn random_element(r: &mut ChaCha8Rng, g: &FinAbGroup) -> GroupElement {
    g.element_at(r.gen_range(0..g.order()))
}

/// `n - 1` random elements closed off by minus their sum.
pub fn balanced_points(r: &mut ChaCha8Rng, g: &FinAbGroup, n: usize) -> Vec<GroupElement> {
    let mut pts: Vec<GroupElement> = (1..n).map(|_| random_element(r, g)).collect();
    let total = pts.iter().fold(g.zero(), |acc, h| g.add(&acc, h));
    pts.push(g.neg(&total));
    pts
}

/// A random balanced datum with `|G| <= max_order` and `1 <= n <= max_n`.
pub fn random_datum(r: &mut ChaCha8Rng, max_order: u64, max_n: usize) -> RamificationData {
    let groups = groups_between(1, max_order);
    let g = groups.choose(r).unwrap().clone();
    let n = r.gen_range(1..=max_n);
    let pts = balanced_points(r, &g, n);
    RamificationData::new(g, pts, 1).unwrap()
}

/// A random balanced, totally ramified datum with `|G| >= 2` and `n` in
/// `min_n..=max_n`. Balance forces `k < n`.
pub fn random_totally_ramified(
    r: &mut ChaCha8Rng,
    max_order: u64,
    min_n: usize,
    max_n: usize,
) -> RamificationData {
    let groups = groups_between(2, max_order);
    loop {
        let g = groups.choose(r).unwrap().clone();
        let n = r.gen_range(min_n..=max_n);
        let pts = balanced_points(r, &g, n);
        let d = RamificationData::new(g, pts, 1).unwrap();
        let k = abcov_core::classify::minimal_k(&d).0;
        if abcov_core::covers::is_totally_ramified(&d) && k < n {
            return d;
        }
    }
}
