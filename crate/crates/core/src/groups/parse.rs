//! Literal syntax: groups as `Z/2 x Z/4`, elements as `(1,3)`, element
//! lists separated by `;`. Case and whitespace are ignored. A bare integer
//! is accepted as an element of a one-factor group.

use super::{FinAbGroup, GroupElement};
use crate::error::{Error, Result};

pub(super) fn parse_group(text: &str) -> Result<FinAbGroup> {
    let squashed: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_ascii_lowercase();
    if matches!(squashed.as_str(), "" | "trivial" | "0" | "1" | "z/1") {
        return Ok(FinAbGroup::trivial());
    }
    let mut orders = Vec::new();
    for factor in squashed.split(['x', '*', '×']) {
        let digits = factor
            .strip_prefix("z/")
            .or_else(|| factor.strip_prefix("z_"))
            .unwrap_or(factor);
        let d: u64 = digits
            .parse()
            .map_err(|_| Error::ParseGroup(text.to_string()))?;
        if d == 0 {
            return Err(Error::ParseGroup(text.to_string()));
        }
        orders.push(d);
    }
    FinAbGroup::new(orders)
}

pub fn parse_element(group: &FinAbGroup, text: &str) -> Result<GroupElement> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::ParseElement(text.to_string());
    let inner = match (t.strip_prefix('('), t.strip_suffix(')')) {
        (Some(_), Some(_)) => &t[1..t.len() - 1],
        (None, None) => t.as_str(),
        _ => return Err(bad()),
    };
    let coords: Vec<i64> = if inner.is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|s| s.parse::<i64>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    group.element(&coords)
}

pub fn parse_element_list(group: &FinAbGroup, text: &str) -> Result<Vec<GroupElement>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|s| parse_element(group, s))
        .collect()
}
