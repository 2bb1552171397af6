use std::io::Write;
use std::time::Instant;

use abcov_core::adapted_basis::{adapted_basis, nonvanishing_failures, validate_adapted};
use abcov_core::bielliptic::{
    bielliptic_data, boundary_strata, boundary_strata_iter, invariant_boundary_counts,
    picard_number_ordered, picard_number_unordered, stratum_count, stratum_orbits,
};
use abcov_core::classify::{
    classify_components, etale_decomposition, excluded_loci_count, minimal_k,
    torsion_locus_component_count_checked,
};
use abcov_core::covers::{
    is_totally_ramified, ramification_split, rh_euler_characteristic, rh_genus, split_coefficients,
};
use abcov_core::groups::{canonical_form, parse_element_list, subgroups_up_to_rank};
use abcov_core::oracle::{
    build_monodromy_problem, exhaustive_adapted_basis_check, orbit_count, subgroup_census,
    torsion_locus_problem,
};
use abcov_core::picard::{
    boundary_basis, boundary_in_terms_of_loci, invertibility_check, lincomb_matrix,
    picard_rank_from_counts, rational_string, relation_count, QMatrix,
};
use abcov_core::{Error, FinAbGroup, RamificationData};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::report::{self, domain_failure, success, to_json_line};
use crate::{Command, GlobalOpts, OracleMode, Outcome, EXIT_IO, EXIT_OK};

/// Literal-level failures count as usage errors; everything else is a
/// domain error.
fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::ParseGroup(_) | Error::ParseElement(_) | Error::DimensionMismatch { .. } | Error::ZeroOrder
    )
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("library types serialize to JSON")
}

fn rat(x: &BigRational) -> Value {
    Value::String(rational_string(x))
}

fn rat_matrix(m: &QMatrix) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(rat).collect())).collect())
}

fn echo(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn parse_group(text: &str) -> Result<FinAbGroup, String> {
    FinAbGroup::parse(text).map_err(|e| e.to_string())
}

fn parse_data(group: &str, ram: &str) -> Result<RamificationData, String> {
    RamificationData::parse(group, ram).map_err(|e| e.to_string())
}

fn finish(command: &str, echo: Map<String, Value>, payload: Result<Value, Error>) -> Outcome {
    match payload {
        Ok(p) => Outcome::Done {
            report: success(command, echo, p),
            ok: true,
        },
        Err(e) if is_usage(&e) => Outcome::Usage(e.to_string()),
        Err(e) => Outcome::Done {
            report: domain_failure(command, echo, &e),
            ok: false,
        },
    }
}

pub(crate) fn evaluate(cmd: &Command, global: &GlobalOpts) -> Outcome {
    match eval_inner(cmd, global) {
        Ok(outcome) => outcome,
        Err(msg) => Outcome::Usage(msg),
    }
}

fn data_echo(d: &RamificationData) -> Vec<(&'static str, Value)> {
    vec![
        ("group", Value::String(d.group().to_string())),
        ("ram", Value::String(d.ram_literal())),
    ]
}

fn eval_inner(cmd: &Command, global: &GlobalOpts) -> Result<Outcome, String> {
    let max_states = global.max_states;
    Ok(match cmd {
        Command::Group { group } => {
            let g = parse_group(group)?;
            let e = echo(&[("group", Value::String(g.to_string()))]);
            finish("group", e, Ok(group_payload(&g)))
        }
        Command::Basis { group, gens } => {
            let g = parse_group(group)?;
            let gens = parse_element_list(&g, gens).map_err(|e| e.to_string())?;
            let literal: Vec<String> = gens.iter().map(ToString::to_string).collect();
            let e = echo(&[
                ("group", Value::String(g.to_string())),
                ("gens", Value::String(literal.join(";"))),
            ]);
            finish("basis", e, basis_payload(&g, &gens))
        }
        Command::Covers { group, ram } => {
            let d = parse_data(group, ram)?;
            finish("covers", echo(&data_echo(&d)), covers_payload(&d))
        }
        Command::Classify { group, ram, oracle } => {
            let d = parse_data(group, ram)?;
            let mut pairs = data_echo(&d);
            pairs.push(("oracle", Value::Bool(*oracle)));
            if *oracle {
                pairs.push(("max_states", json!(max_states)));
            }
            let oracle_bound = oracle.then_some(max_states);
            finish("classify", echo(&pairs), classify_payload(&d, oracle_bound))
        }
        Command::Picard { group, ram } => {
            let d = parse_data(group, ram)?;
            let mut pairs = data_echo(&d);
            pairs.push(("max_states", json!(max_states)));
            finish("picard", echo(&pairs), picard_payload(&d, max_states))
        }
        Command::Bielliptic {
            genus,
            strata,
            picard,
            ..
        } => {
            let picard = *picard || !*strata;
            let e = echo(&[
                ("genus", json!(genus)),
                ("strata", Value::Bool(*strata)),
                ("picard", Value::Bool(picard)),
                ("max_states", json!(max_states)),
            ]);
            finish("bielliptic", e, bielliptic_payload(*genus, *strata, picard, max_states))
        }
        Command::Oracle {
            mode,
            group,
            ram,
            vector,
            max_order,
        } => oracle(*mode, group, ram, vector, *max_order, global)?,
        Command::Batch { .. } => return Err("batch is handled by the batch runner".into()),
    })
}

fn group_payload(g: &FinAbGroup) -> Value {
    let c = canonical_form(g);
    json!({
        "group": to_value(g),
        "canonical": to_value(&c.group),
        "order": g.order(),
        "exponent": g.exponent(),
        "cyclic": g.is_cyclic(),
        "p_group": g.is_p_group(),
        "primes": g.primes(),
        "min_generators": g.min_generator_count(),
    })
}

fn basis_payload(g: &FinAbGroup, gens: &[abcov_core::GroupElement]) -> Result<Value, Error> {
    let ab = adapted_basis(g, gens)?;
    Ok(json!({
        "group": to_value(g),
        "generators": to_value(&gens),
        "reordering": ab.reordering,
        "basis": to_value(&ab.basis),
        "basis_orders": ab.basis_orders,
        "b_matrix": ab.b_matrix,
        "nonvanishing_failures": nonvanishing_failures(&ab),
        "valid": validate_adapted(&ab, gens),
        "unit_triangular": ab.is_unit_triangular(),
    }))
}

fn covers_payload(d: &RamificationData) -> Result<Value, Error> {
    let genus = rh_genus(d)?;
    let split = ramification_split(d);
    let coefficients = split_coefficients(d)?;
    Ok(json!({
        "group": to_value(d.group()),
        "points": to_value(&d.points()),
        "n": d.n(),
        "ramification_group": to_value(&split.ramification.group),
        "etale_group": to_value(&split.etale.group),
        "totally_ramified": is_totally_ramified(d),
        "genus": genus,
        "euler_characteristic": rational_string(&ratio_to_big(rh_euler_characteristic(d))),
        "minimal_subset": minimal_k(d).1,
        "coefficients": to_value(&coefficients),
    }))
}

fn ratio_to_big(r: num_rational::Ratio<i128>) -> BigRational {
    BigRational::new((*r.numer()).into(), (*r.denom()).into())
}

fn classify_payload(d: &RamificationData, oracle_bound: Option<u64>) -> Result<Value, Error> {
    let components = classify_components(d)?;
    let (k, subset) = minimal_k(d);
    let e = ramification_split(d).etale.group;
    let mut payload = json!({
        "k": k,
        "n": d.n(),
        "minimal_subset": subset,
        "excluded_loci_count": excluded_loci_count(d.n(), k),
        "component_count": components.len(),
        "components": to_value(&components),
        "etale_group": to_value(&e),
        "etale_catalog": to_value(&etale_decomposition(&e)?),
    });
    if let Some(bound) = oracle_bound {
        let problem = build_monodromy_problem(d, bound)?;
        let report = orbit_count(&problem, bound)?;
        payload["oracle"] = json!({
            "orbit_count": report.orbit_count,
            "state_space_size": report.state_space_size,
            "generator_count": report.generator_count,
            "agrees": report.orbit_count == components.len() as u64,
        });
    }
    Ok(payload)
}

fn picard_payload(d: &RamificationData, max_states: u64) -> Result<Value, Error> {
    let l = lincomb_matrix(d)?;
    let n = d.n();
    let (k, _) = minimal_k(d);
    let inv = invertibility_check(&l.matrix, l.o_rk);
    let rc = relation_count(d, max_states)?;
    let rank = picard_rank_from_counts(rc.components, 0, rc.relations)?;
    let rows: Vec<String> = (1..n).map(|j| format!("D_{{{j},{n}}}")).collect();
    let cols: Vec<String> = (1..n).map(|j| format!("B_{{{j},{n}}}")).collect();
    Ok(json!({
        "n": n,
        "k": k,
        "boundary_basis": boundary_basis(n, k)?.label_strings(),
        "lincomb_rows": rows,
        "lincomb_columns": cols,
        "lincomb": rat_matrix(&l.matrix),
        "o_rk": l.o_rk,
        "b_row": l.b_row,
        "point_order": l.point_order,
        "determinant": rat(&inv.determinant),
        "invertible": inv.is_invertible,
        "normalized_row_sums": inv.normalized_row_sums.iter().map(rat).collect::<Vec<_>>(),
        "row_sums_match": inv.row_sums_match,
        "boundary_in_loci": boundary_in_terms_of_loci(&l).as_ref().map_or(Value::Null, rat_matrix),
        "loci": to_value(&rc.detail),
        "relations": to_value(&rc),
        "picard_rank": {
            "locus_components": rc.components,
            "relations": rc.relations,
            "rank_spanned_by_components": rank,
        },
    }))
}

fn bielliptic_payload(g: u64, strata: bool, picard: bool, max_states: u64) -> Result<Value, Error> {
    let n = 2 * g.max(1) - 2;
    let mut payload = json!({ "genus": g, "n": n });
    if picard {
        let (down, up) = invariant_boundary_counts(g)?;
        let relations = relation_count(&bielliptic_data(g)?, max_states)?;
        payload["picard"] = json!({
            "ordered": picard_number_ordered(g)?,
            "unordered": picard_number_unordered(g)?,
            "stratum_count": stratum_count(g)?,
            "invariant_boundary": { "downstairs": down, "upstairs": up },
            "relations": relations.relations,
            "orbits": to_value(&stratum_orbits(g)?),
        });
    }
    if strata {
        payload["strata"] = to_value(&boundary_strata(g)?);
    }
    Ok(payload)
}

/// One stratum per line, in sorted order, without a surrounding report.
pub(crate) fn stream_strata(g: u64, text: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let iter = match boundary_strata_iter(g) {
        Ok(it) => it,
        Err(e) => {
            let e_map = echo(&[("genus", json!(g)), ("strata", Value::Bool(true))]);
            let r = domain_failure("bielliptic", e_map, &e);
            let _ = writeln!(out, "{}", to_json_line(&r));
            let _ = writeln!(err, "error: {e}");
            return crate::EXIT_DOMAIN;
        }
    };
    for s in iter {
        let v = report::canonical(to_value(&s));
        let line = if text {
            report::render_text(&v).replace('\n', "  ")
        } else {
            to_json_line(&v)
        };
        if writeln!(out, "{line}").is_err() {
            return EXIT_IO;
        }
    }
    EXIT_OK
}

fn parse_vector(text: &str) -> Result<Vec<i64>, String> {
    text.split(';')
        .map(|s| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| format!("invalid torsion vector entry {s:?}"))
        })
        .collect()
}

fn required<'a>(value: &'a Option<String>, flag: &str, mode: OracleMode) -> Result<&'a str, String> {
    value
        .as_deref()
        .ok_or_else(|| format!("--mode {} requires --{flag}", mode.name()))
}

fn oracle(
    mode: OracleMode,
    group: &Option<String>,
    ram: &Option<String>,
    vector: &Option<String>,
    max_order: Option<u64>,
    global: &GlobalOpts,
) -> Result<Outcome, String> {
    let max_states = global.max_states;
    let start = Instant::now();
    let mut pairs: Vec<(&str, Value)> = vec![("mode", Value::String(mode.name().into()))];
    let payload: Result<Value, Error> = match mode {
        OracleMode::Monodromy => {
            let d = parse_data(required(group, "group", mode)?, required(ram, "ram", mode)?)?;
            pairs.extend(data_echo(&d));
            pairs.push(("max_states", json!(max_states)));
            build_monodromy_problem(&d, max_states)
                .and_then(|p| orbit_count(&p, max_states))
                .map(|r| {
                    let classifier = classify_components(&d).ok().map(|c| c.len());
                    json!({
                        "state_space_size": r.state_space_size,
                        "generator_count": r.generator_count,
                        "orbit_count": r.orbit_count,
                        "classifier_count": classifier,
                    })
                })
        }
        OracleMode::TorsionLocus => {
            let a = parse_vector(required(vector, "vector", mode)?)?;
            let literal: Vec<String> = a.iter().map(ToString::to_string).collect();
            pairs.push(("vector", Value::String(literal.join(";"))));
            pairs.push(("max_states", json!(max_states)));
            torsion_locus_problem(&a).and_then(|p| {
                let c = torsion_locus_component_count_checked(&a, max_states)?;
                let state_space_size = u64::try_from(p.state_space_size()).unwrap_or(u64::MAX);
                Ok(json!({
                    "state_space_size": state_space_size,
                    "generator_count": p.generators.len(),
                    "orbit_count": c.authoritative(),
                    "gcd": c.gcd,
                    "divisor_count_reading": c.divisor_count_reading,
                    "totient_reading": c.totient_reading,
                    "matching_readings": c.matching_readings(),
                }))
            })
        }
        OracleMode::Basis => {
            let m = max_order.ok_or_else(|| "--mode basis requires --max-order".to_string())?;
            pairs.push(("max_order", json!(m)));
            Ok(to_value(&exhaustive_adapted_basis_check(m)))
        }
        OracleMode::Subgroups => {
            let g = parse_group(required(group, "group", mode)?)?;
            pairs.push(("group", Value::String(g.to_string())));
            subgroups_payload(&g)
        }
    };
    let payload = payload.map(|mut p| {
        p["mode"] = Value::String(mode.name().into());
        if global.timing {
            p["wall_time_us"] = json!(start.elapsed().as_micros() as u64);
        }
        p
    });
    Ok(finish("oracle", echo(&pairs), payload))
}

fn subgroups_payload(g: &FinAbGroup) -> Result<Value, Error> {
    let census = subgroup_census(g)?;
    let listed = subgroups_up_to_rank(g, None)?;
    let mut types: Vec<FinAbGroup> = listed.iter().map(|s| s.iso_type.clone()).collect();
    types.sort();
    let mut by_type: Vec<Value> = Vec::new();
    let mut i = 0;
    while i < types.len() {
        let count = types[i..].iter().take_while(|t| **t == types[i]).count();
        by_type.push(json!({ "group": to_value(&types[i]), "count": count }));
        i += count;
    }
    Ok(json!({
        "state_space_size": g.order(),
        "census": census,
        "enumerated": listed.len(),
        "by_type": by_type,
    }))
}
