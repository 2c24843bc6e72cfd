//! Batch verification suites with structured, deterministic reports.
//!
//! Every check is a function from [`Bounds`] and a seed to a [`Case`]. The
//! suites group those checks by module, and [`run_verify`] runs a suite and
//! times it. The numbered acceptance checks are exposed individually through
//! [`criterion`] so that test harnesses can print one line per check.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::binodal::{nonrepresentable_witness, tuple_universe, verify_table, Binodal};
use crate::error::{Error, Result};
use crate::interchange::{
    check_intersection_closure, check_l_monotone, check_operad_compatibility, check_terminal_objects, coarse_cells,
    grothendieck_poset, l_images, simplex_trees,
};
use crate::kcomplex::{self, Simplex};
use crate::monoidal_words::{leq, leq_oracle, word_poset, Word};
use crate::operad_core::{ass, com, random_small_operad, SetOperad};
use crate::t_construction::{
    check_axial_round_trip_exhaustive, check_cancellation, check_mlf_maximality, check_pair_reduction, Trees,
    WordOperad, CHECK_LABEL_ARITY,
};
use crate::tensor_calculus::{bounded_tensor_classes, tensor_binary_carrier, MAX_NODE_BOUND};
use crate::topology::{betti_numbers, contractibility_certificate, Certificate};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 2024;

/// Number of numbered acceptance checks.
pub const CRITERIA: usize = 12;

/// Suite names accepted by [`run_verify`].
pub const SUITES: [&str; 9] =
    ["laws", "words", "kcomplex", "tensor", "tconstruction", "binodal", "interchange", "homology", "all"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The computation ran into a bound before it could decide.
    Unstable,
}

#[derive(Debug, Clone, Serialize)]
pub struct Case {
    pub id: String,
    pub status: Status,
    pub witness: Value,
}

impl Case {
    fn new(id: &str, ok: bool, witness: Value) -> Case {
        Case { id: id.to_string(), status: if ok { Status::Pass } else { Status::Fail }, witness }
    }

    fn from_error(id: &str, e: Error) -> Case {
        let status = match e {
            Error::Bound { .. } | Error::Capacity(_) | Error::Overflow => Status::Unstable,
            _ => Status::Fail,
        };
        Case { id: id.to_string(), status, witness: json!({ "error": e.to_string() }) }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub bounds: Bounds,
    pub cases: Vec<Case>,
    pub wall_ms: u128,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.cases.iter().all(Case::passed)
    }
}

/// Size limits for the verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// Random operad pairs in the word-problem corpus.
    pub corpus: usize,
    /// Node bound for the tensor-product closure.
    pub tensor_nodes: usize,
    /// Largest `m` for the word-poset comparison with `k = 2`.
    pub word_m: usize,
    /// Node bounds of the tuple universe: ternary trees, binary trees,
    /// unary trees next to a binary image, and unary triples in total.
    pub table: [usize; 4],
    /// Node bound for the binary axial round trip.
    pub axial_nodes: usize,
    /// Node bound for the ternary axial round trip.
    pub ternary_axial_nodes: usize,
    /// Node bound for the mlf and cancellation checks.
    pub law_nodes: usize,
    /// Largest `m` for the Grothendieck posets with `k = l = 1`.
    pub interchange_m: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            corpus: 5,
            tensor_nodes: 6,
            word_m: 4,
            table: [4, 4, 2, 4],
            axial_nodes: 7,
            ternary_axial_nodes: 5,
            law_nodes: 6,
            interchange_m: 3,
        }
    }
}

impl Bounds {
    /// Rejects bounds above the given tree-node ceiling or the library limits.
    pub fn check(&self, node_ceiling: usize) -> Result<()> {
        let limit = |what: &'static str, value: usize, max: usize| {
            if value > max {
                Err(Error::Bound { what, value, max })
            } else {
                Ok(())
            }
        };
        limit("tensor nodes", self.tensor_nodes, MAX_NODE_BOUND.min(node_ceiling))?;
        limit("word generators", self.word_m, kcomplex::MAX_GENERATORS)?;
        limit("interchange generators", self.interchange_m, 3)?;
        for (what, v) in [
            ("axial nodes", self.axial_nodes),
            ("ternary axial nodes", self.ternary_axial_nodes),
            ("law nodes", self.law_nodes),
        ] {
            limit(what, v, node_ceiling)?;
        }
        for v in self.table {
            limit("table nodes", v, node_ceiling)?;
        }
        Ok(())
    }
}

/// Distinct pairs of random small operads, in draw order.
pub fn corpus(seed: u64, size: usize) -> Vec<(SetOperad, SetOperad)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < size {
        let a = random_small_operad(&mut rng, 3);
        let b = random_small_operad(&mut rng, 3);
        let key = (
            serde_json::to_string(&a.to_json()).unwrap_or_default(),
            serde_json::to_string(&b.to_json()).unwrap_or_default(),
        );
        if seen.insert(key) {
            out.push((a, b));
        }
    }
    out
}

fn run(id: &str, f: impl FnOnce() -> Result<(bool, Value)>) -> Case {
    match f() {
        Ok((ok, w)) => Case::new(id, ok, w),
        Err(e) => Case::from_error(id, e),
    }
}

fn word(s: &str) -> Result<Word> {
    Word::parse(s, true)
}

fn simplex(ws: &[&str]) -> Result<Simplex> {
    Ok(Simplex::new(ws.iter().map(|s| word(s)).collect::<Result<Vec<_>>>()?))
}

fn unary_word_problem(bounds: &Bounds, seed: u64) -> Case {
    run("unary-word-problem", || {
        let mut rows = Vec::new();
        let mut ok = true;
        for (a, b) in corpus(seed, bounds.corpus) {
            let classes = bounded_tensor_classes(&a, &b, 1, bounds.tensor_nodes)?;
            let expected = a.size(1) * b.size(1);
            ok &= classes.stable_count() == expected;
            rows.push(json!({ "a": a.name(), "b": b.name(), "stable": classes.stable_count(), "expected": expected }));
        }
        Ok((ok, Value::Array(rows)))
    })
}

fn binary_word_problem(bounds: &Bounds, seed: u64) -> Case {
    run("binary-word-problem", || {
        let mut rows = Vec::new();
        let mut ok = true;
        for (a, b) in corpus(seed, bounds.corpus) {
            let classes = bounded_tensor_classes(&a, &b, 2, bounds.tensor_nodes)?;
            let expected = tensor_binary_carrier(&a, &b)?.size;
            ok &= classes.count() == expected;
            rows.push(json!({
                "a": a.name(), "b": b.name(), "classes": classes.count(),
                "stable": classes.stable_count(), "expected": expected,
            }));
        }
        Ok((ok, Value::Array(rows)))
    })
}

fn eckmann_hilton(bounds: &Bounds) -> Case {
    run("eckmann-hilton-collapse", || {
        let pairs = [("ass", ass(3), "ass", ass(3)), ("ass", ass(3), "com", com(3)), ("com", com(3), "com", com(3))];
        let mut rows = Vec::new();
        let mut ok = true;
        for (na, a, nb, b) in &pairs {
            for n in 0..=3 {
                let c = bounded_tensor_classes(a, b, n, bounds.tensor_nodes)?;
                ok &= c.count() == 1 && c.stable_count() == 1;
                rows.push(json!({ "pair": format!("{na}⊗{nb}"), "arity": n, "classes": c.count() }));
            }
        }
        Ok((ok, Value::Array(rows)))
    })
}

fn intersection_tables(bounds: &Bounds) -> Case {
    run("intersection-tables", || {
        let op = WordOperad { k: 2 };
        let tr = Trees::new(&op);
        let [t, b, u, total] = bounds.table;
        let tuples = tuple_universe(&tr, t, b, u, total)?;
        let rows = verify_table(&tr, &tuples)?;
        let ok = rows.len() == 12 && rows.iter().all(|r| r.passed);
        let union_witness =
            nonrepresentable_witness(&tr, &tuples).map(|w| w.values().map(|t| tr.render(t)).collect::<Vec<_>>());
        Ok((ok, json!({ "tuples": tuples.len(), "rows": rows, "outside_union_of_contained_shapes": union_witness })))
    })
}

fn poset_criterion(bounds: &Bounds) -> Case {
    run("poset-criterion", || {
        let mut cases: Vec<(u8, usize)> = (1..=bounds.word_m).map(|m| (2, m)).collect();
        cases.push((3, 3));
        let mut rows = Vec::new();
        let mut ok = true;
        for (k, m) in cases {
            let (words, reach) = leq_oracle(k, m)?;
            let mut mismatch = None;
            for (i, x) in words.iter().enumerate() {
                for (j, y) in words.iter().enumerate() {
                    if leq(x, y)? != reach[i][j] && mismatch.is_none() {
                        mismatch = Some(format!("{x} ≤ {y}"));
                    }
                }
            }
            ok &= mismatch.is_none();
            rows.push(json!({ "k": k, "m": m, "words": words.len(), "mismatch": mismatch }));
        }
        Ok((ok, Value::Array(rows)))
    })
}

fn k_complex() -> Case {
    run("k-complex", || {
        let f = kcomplex::f_vector(3)?;
        let orbits = kcomplex::top_simplex_orbits(3)?.len();
        let (_, poset) = kcomplex::subdivision_poset(3)?;
        let ok = f == [8, 22, 24, 9] && orbits == 2 && poset.len() == 63;
        Ok((ok, json!({ "f_vector": f, "top_orbits": orbits, "subdivision_poset": poset.len() })))
    })
}

/// Vertices of the first maximal simplex of the 3-input complex and the
/// pair of binodal trees expected for each of its faces.
const FIRST_SIMPLEX: [&str; 4] = ["o1(1,2,3)", "o1(o2(1,2),3)", "o2(o1(2,3),1)", "o2(1,2,3)"];
const FIRST_SIMPLEX_TABLE: [(&[usize], &str, &str); 15] = [
    (&[0], "b(1,2,3)", "w(1,2,3)"),
    (&[1], "b(w(1,2),3)", "w(b(1,2),3)"),
    (&[2], "w(b(2,3),1)", "b(w(2,3),1)"),
    (&[3], "w(1,2,3)", "b(1,2,3)"),
    (&[0, 1], "b(b(1,2),3)", "w(b(1,2),3)"),
    (&[0, 2], "b(1,2,3)", "b(w(2,3),1)"),
    (&[0, 3], "b(1,2,3)", "b(1,2,3)"),
    (&[1, 2], "b(w(1,2),3)", "b(w(2,3),1)"),
    (&[1, 3], "b(w(1,2),3)", "b(1,2,3)"),
    (&[2, 3], "w(b(2,3),1)", "b(b(2,3),1)"),
    (&[0, 1, 2], "b(b(1,2),3)", "b(w(2,3),1)"),
    (&[0, 1, 3], "b(b(1,2),3)", "b(1,2,3)"),
    (&[0, 2, 3], "b(1,2,3)", "b(b(2,3),1)"),
    (&[1, 2, 3], "b(w(1,2),3)", "b(b(2,3),1)"),
    (&[0, 1, 2, 3], "b(b(1,2),3)", "b(b(2,3),1)"),
];
const SECOND_SIMPLEX: [&str; 4] = ["o1(1,2,3)", "o1(o2(1,2),3)", "o2(o1(1,2),3)", "o2(1,2,3)"];

fn simplex_tree_tables() -> Case {
    run("simplex-trees", || {
        let mut bad = Vec::new();
        for (idx, s, t) in FIRST_SIMPLEX_TABLE {
            let sigma = simplex(&idx.iter().map(|&i| FIRST_SIMPLEX[i]).collect::<Vec<_>>())?;
            let p = simplex_trees(&sigma)?;
            if (p.s.clone(), p.t.clone()) != (Binodal::parse(s)?, Binodal::parse(t)?) {
                bad.push(format!("{sigma}: {} {}", p.s, p.t));
            }
        }
        let second = simplex(&SECOND_SIMPLEX)?;
        let (x, y) = (word(SECOND_SIMPLEX[1])?, word(SECOND_SIMPLEX[2])?);
        let expected = Binodal::parse("b(b(1,2),3)")?;
        let mut second_faces = 0;
        for face in second.faces() {
            if face.vertices().contains(&x) && face.vertices().contains(&y) {
                second_faces += 1;
                let p = simplex_trees(&face)?;
                if p.s != expected || p.t != expected {
                    bad.push(format!("{face}: {} {}", p.s, p.t));
                }
            }
        }
        Ok((
            bad.is_empty(),
            json!({ "first_simplex_rows": FIRST_SIMPLEX_TABLE.len(), "second_simplex_faces": second_faces, "mismatches": bad }),
        ))
    })
}

fn sphere_shadow() -> Case {
    run("sphere-shadow", || {
        let b11 = betti_numbers(&grothendieck_poset(1, 1, 2)?.poset)?;
        let b12 = betti_numbers(&grothendieck_poset(1, 2, 2)?.poset)?;
        Ok((b11 == [1, 1] && b12 == [1, 0, 1], json!({ "I(1,1)(2)": b11, "I(1,2)(2)": b12 })))
    })
}

fn equivalence_chain() -> Case {
    run("equivalence-chain", || {
        let g = grothendieck_poset(1, 1, 3)?;
        let bg = betti_numbers(&g.poset)?;
        let bw = betti_numbers(&word_poset(2, 3, false)?.1)?;
        Ok((bg == bw && bg == [1, 3, 2], json!({ "objects": g.objects.len(), "I(1,1)(3)": bg, "M_2(3)": bw })))
    })
}

fn certificate_name(c: &Certificate) -> String {
    match c {
        Certificate::TerminalObject(_) => "terminal".into(),
        Certificate::InitialObject(_) => "initial".into(),
        Certificate::HomologyPoint => "homology-point".into(),
        Certificate::Inconclusive(b) => format!("betti {b:?}"),
    }
}

/// Terminal-object checks for the fibers `L/γ`, with the strongest
/// contractibility certificate available for each fiber that fails.
fn terminal_report(k: u8, l: u8, m: usize) -> Result<(bool, Value)> {
    let g = grothendieck_poset(k, l, m)?;
    let images = l_images(&g)?;
    let checks = check_terminal_objects(&g, &images)?;
    let cells = coarse_cells(&g, &images)?;
    let mut failures = Vec::new();
    for (check, (_, cell)) in checks.iter().zip(&cells) {
        if !check.terminal {
            let cert = contractibility_certificate(&g.poset.subposet(cell))?;
            failures.push(json!({ "gamma": check.gamma, "size": check.size, "candidate": check.candidate, "certificate": certificate_name(&cert) }));
        }
    }
    let ok = failures.is_empty();
    Ok((ok, json!({ "k": k, "l": l, "m": m, "fibers": checks.len(), "without_terminal": failures })))
}

fn quillen_hypothesis() -> Case {
    run("terminal-objects", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for (k, l, m) in [(1, 1, 2), (1, 1, 3), (1, 2, 2)] {
            let (pass, w) = terminal_report(k, l, m)?;
            ok &= pass;
            rows.push(w);
        }
        Ok((ok, Value::Array(rows)))
    })
}

fn tconstruction_laws(bounds: &Bounds) -> Case {
    run("t-construction-laws", || {
        let op = WordOperad { k: 2 };
        let tr = Trees::new(&op);
        let unary = check_axial_round_trip_exhaustive(&tr, 1, bounds.axial_nodes, CHECK_LABEL_ARITY)?;
        let binary = check_axial_round_trip_exhaustive(&tr, 2, bounds.axial_nodes, CHECK_LABEL_ARITY)?;
        let ternary = check_axial_round_trip_exhaustive(&tr, 3, bounds.ternary_axial_nodes, CHECK_LABEL_ARITY)?;
        let mlf = check_mlf_maximality(&tr, bounds.law_nodes, bounds.law_nodes.saturating_sub(2))?;
        let pairs3 = check_pair_reduction(&tr, 3, bounds.law_nodes)?;
        let pairs4 = check_pair_reduction(&tr, 4, bounds.law_nodes)?;
        let cancel = check_cancellation(&tr, bounds.law_nodes, CHECK_LABEL_ARITY)?;
        Ok((
            true,
            json!({
                "axial_round_trip": { "unary": unary, "binary": binary, "ternary": ternary },
                "mlf_pairs": mlf, "pair_reduction": [pairs3, pairs4], "cancellation": cancel,
            }),
        ))
    })
}

fn coarse_cell_checks(bounds: &Bounds) -> Case {
    run("coarse-cells", || {
        let mut ok = true;
        let mut rows = Vec::new();
        let mut images_by_arity = vec![Vec::new()];
        for m in 1..=bounds.interchange_m {
            let g = grothendieck_poset(1, 1, m)?;
            let images = l_images(&g)?;
            let monotone = check_l_monotone(&g, &images).is_ok();
            let cells = coarse_cells(&g, &images)?;
            let closure = check_intersection_closure(&cells);
            let (terminal, report) = terminal_report(1, 1, m)?;
            ok &= monotone && closure.is_ok() && terminal;
            rows.push(json!({ "m": m, "monotone": monotone, "closure": closure.is_ok(), "terminal": report }));
            images_by_arity.push(images);
        }
        let compat = check_operad_compatibility(2, &images_by_arity, bounds.interchange_m);
        ok &= compat.is_ok();
        Ok((ok, json!({ "cells": rows, "compatibility": compat.map_err(|e| e.to_string()) })))
    })
}

fn operad_laws(bounds: &Bounds, seed: u64) -> Case {
    run("operad-laws", || {
        let mut names = Vec::new();
        for op in [ass(4), com(4)] {
            op.check_laws(4)?;
            names.push(op.name().to_string());
        }
        for (a, b) in corpus(seed, bounds.corpus) {
            a.check_laws(3)?;
            b.check_laws(3)?;
            names.push(format!("{} {}", a.name(), b.name()));
        }
        Ok((true, json!({ "checked": names })))
    })
}

/// Runs the numbered acceptance check `n` in `1..=12`.
pub fn criterion(n: usize, bounds: &Bounds, seed: u64) -> Result<Case> {
    Ok(match n {
        1 => unary_word_problem(bounds, seed),
        2 => binary_word_problem(bounds, seed),
        3 => eckmann_hilton(bounds),
        4 => intersection_tables(bounds),
        5 => poset_criterion(bounds),
        6 => k_complex(),
        7 => simplex_tree_tables(),
        8 => sphere_shadow(),
        9 => equivalence_chain(),
        10 => quillen_hypothesis(),
        11 => tconstruction_laws(bounds),
        12 => coarse_cell_checks(bounds),
        _ => return Err(Error::Bound { what: "criterion", value: n, max: CRITERIA }),
    })
}

fn suite_criteria(suite: &str) -> Option<Vec<usize>> {
    Some(match suite {
        "laws" => Vec::new(),
        "words" => vec![5],
        "kcomplex" => vec![6, 7],
        "tensor" => vec![1, 2, 3],
        "tconstruction" => vec![11],
        "binodal" => vec![4],
        "interchange" => vec![10, 12],
        "homology" => vec![8, 9],
        "all" => (1..=CRITERIA).collect(),
        _ => return None,
    })
}

/// Runs a suite at the given bounds.
pub fn run_verify(suite: &str, bounds: &Bounds, seed: u64) -> Result<VerificationReport> {
    let ids = suite_criteria(suite).ok_or_else(|| Error::Invalid(format!("unknown suite {suite}")))?;
    let start = Instant::now();
    let mut cases = Vec::new();
    if suite == "laws" || suite == "all" {
        cases.push(operad_laws(bounds, seed));
    }
    for n in ids {
        cases.push(criterion(n, bounds, seed)?);
    }
    Ok(VerificationReport {
        suite: suite.to_string(),
        seed,
        bounds: *bounds,
        cases,
        wall_ms: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_verify("nope", &Bounds::default(), DEFAULT_SEED).is_err());
        assert!(criterion(13, &Bounds::default(), DEFAULT_SEED).is_err());
    }

    #[test]
    fn oversized_bounds_are_rejected() {
        let b = Bounds { tensor_nodes: MAX_NODE_BOUND + 1, ..Bounds::default() };
        assert!(matches!(b.check(usize::MAX), Err(Error::Bound { .. })));
        assert!(Bounds::default().check(7).is_ok());
        assert!(Bounds::default().check(6).is_err());
    }

    #[test]
    fn corpus_is_deterministic_and_distinct() {
        let a = corpus(DEFAULT_SEED, 5);
        let b = corpus(DEFAULT_SEED, 5);
        let key = |v: &[(SetOperad, SetOperad)]| {
            v.iter()
                .map(|(x, y)| {
                    (serde_json::to_string(&x.to_json()).unwrap(), serde_json::to_string(&y.to_json()).unwrap())
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(key(&a), key(&b));
        assert_eq!(key(&a).into_iter().collect::<BTreeSet<_>>().len(), 5);
    }

    #[test]
    fn small_suites_pass() {
        for suite in ["kcomplex", "homology"] {
            let r = run_verify(suite, &Bounds::default(), DEFAULT_SEED).unwrap();
            assert!(r.all_passed(), "{}", serde_json::to_string(&r.cases).unwrap());
        }
    }

    #[test]
    fn report_serializes_statuses_in_lowercase() {
        let c = Case::new("x", false, Value::Null);
        assert_eq!(serde_json::to_value(&c).unwrap()["status"], "fail");
    }
}
