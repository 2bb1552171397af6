//! Fixed inputs shared by the benchmarks.

use abcov_core::RamificationData;

/// Representative data, from étale to heavily ramified.
pub fn fixtures() -> Vec<(&'static str, RamificationData)> {
    [
        ("etale Z/3xZ/3", "Z/3 x Z/3", "(0,0)"),
        ("bielliptic g=4", "Z/2", "1;1;1;1;1;1"),
        ("Z/4 mixed", "Z/4", "1;1;2"),
        ("Z/2xZ/4 mixed", "Z/2 x Z/4", "(0,2);(1,2);(1,0)"),
        ("Z/6 three points", "Z/6", "1;2;3"),
    ]
    .into_iter()
    .map(|(label, g, ram)| (label, RamificationData::parse(g, ram).expect("fixture parses")))
    .collect()
}
