//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use ellsurf::brauer::height_flag;
use ellsurf::families::FamilyKind;
use ellsurf::golden::{known_mordell_weil, table, verify_table, RowStatus, TableReport, TABLE_IDS};
use ellsurf::lattice::{artin_invariant, shioda_tate, trivial_lattice};
use ellsurf::parallel::Execution;
use ellsurf::sections::{order_of, torsion_search};
use ellsurf::tate::{analyze, AnalyzeOptions, HeightFlag};
use ellsurf::weierstrass::WeierstrassModel;
use num_rational::{BigRational, Rational64};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn passing_table(id: &str) -> Result<TableReport, String> {
    let report = verify_table(id, Execution::best()).map_err(err)?;
    if !report.pass {
        let bad: Vec<String> = report
            .rows
            .iter()
            .filter(|r| r.status == RowStatus::Fail)
            .map(|r| format!("{}: {}", r.label, r.diffs.join("; ")))
            .collect();
        return Err(format!("{id}: {}", bad.join(" | ")));
    }
    Ok(report)
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let spent = start.elapsed();
    if spent > limit {
        return Err(format!("{what} took {spent:?}, limit {limit:?}"));
    }
    Ok(())
}

fn igusa_tables() -> Outcome {
    let start = Instant::now();
    let report = passing_table("igusa")?;
    within(start, Duration::from_secs(10), "Igusa verification")?;
    if report.checked != 18 {
        return Err(format!("{} equations checked, expected 18", report.checked));
    }
    let found: BTreeSet<&str> = report.rows.iter().flat_map(|r| r.found_fibers.iter().map(String::as_str)).collect();
    for needed in ["I*_{1,1}", "IV*_1"] {
        if !found.contains(needed) {
            return Err(format!("no fiber rendered as {needed}"));
        }
    }
    Ok(format!("18 equations across 7 towers in {:?}", start.elapsed()))
}

fn euler_bookkeeping() -> Outcome {
    let mut rows = 0;
    let mut k3 = 0;
    for id in TABLE_IDS {
        for (i, row) in table(id).map_err(err)?.rows.iter().enumerate() {
            let Some(model) = row.representative.build().map_err(err)? else { continue };
            let report = analyze(&model, &AnalyzeOptions::default()).map_err(|e| format!("{id} row {i}: {e}"))?;
            let euler: i64 = report.fibers.iter().map(|f| f.v_delta_min as i64 * f.degree() as i64).sum();
            if euler != 12 * report.chi as i64 || report.c2 != euler {
                return Err(format!("{id} row {i}: sum {euler}, chi {}", report.chi));
            }
            for f in &report.fibers {
                f.check_ogg().map_err(|e| format!("{id} row {i}: {e}"))?;
            }
            if report.chi == 2 {
                k3 += 1;
            }
            rows += 1;
        }
    }
    Ok(format!("{rows} rows ({k3} K3 with c2 = 24)"))
}

fn char7() -> Outcome {
    let start = Instant::now();
    let m = WeierstrassModel::from_strs(7, ["0", "0", "0", "t", "t^12"]).map_err(err)?;
    let opts = AnalyzeOptions { torsion: Some(7), assume_rho: Some(22), ..AnalyzeOptions::default() };
    let report = analyze(&m, &opts).map_err(err)?;
    let fibers = report.geometric_fiber_multiset();
    if fibers != ["III", "I_7", "I_7", "I_7"] {
        return Err(format!("fibers {fibers:?}"));
    }
    let (free, tors) = known_mordell_weil(7, &fibers).ok_or("no Mordell-Weil data")?;
    let det_ns = shioda_tate(&trivial_lattice(&report.fibers).det(), &free, tors);
    if det_ns != BigRational::from_integer(49.into()) || artin_invariant(&det_ns, 7).map_err(err)? != 1 {
        return Err(format!("|det NS| = {det_ns}"));
    }
    if report.sigma0 != Some(1) {
        return Err(format!("report sigma0 {:?}", report.sigma0));
    }
    let twin = WeierstrassModel::from_strs(7, ["0", "0", "0", "t", "5*t^12"]).map_err(err)?;
    let found = torsion_search(&twin, 7, 2 * twin.chi() as usize).map_err(err)?;
    let pt = found.first().ok_or("no 7-torsion section found")?;
    if order_of(&twin, pt, 7) != Some(7) {
        return Err(format!("section {pt} is not of exact order 7"));
    }
    if !torsion_search(&m, 7, 2 * m.chi() as usize).map_err(err)?.is_empty() {
        return Err("the t^12 model unexpectedly has a rational 7-torsion section".into());
    }
    within(start, Duration::from_secs(30), "characteristic 7 check")?;
    Ok(format!("|det NS| = 49, sigma0 = 1, section {pt}"))
}

fn char5() -> Outcome {
    let report = passing_table("char5")?;
    let t = table("char5").map_err(err)?;
    let mut sigmas = Vec::new();
    for (row, got) in t.rows.iter().zip(&report.rows) {
        let model = row.representative.build().map_err(err)?.ok_or("unrealizable row")?;
        let minimal = analyze(&model, &AnalyzeOptions::default()).map_err(err)?.model;
        let criterion = height_flag(&minimal).map_err(err)?;
        if row.sigma0.is_some() {
            if got.supersingular != Some(true) {
                return Err(format!("{} not supersingular", got.label));
            }
            sigmas.push(got.sigma0.unwrap_or(0));
        } else if criterion != HeightFlag::One || got.supersingular != Some(false) {
            return Err(format!("{}: criterion {criterion}, supersingular {:?}", got.label, got.supersingular));
        }
    }
    if sigmas != [2, 1] {
        return Err(format!("sigma0 of the IV rows: {sigmas:?}"));
    }
    Ok("5 classes; IV rows sigma0 = 2, 1; 2xII rows h = 1".into())
}

fn char3() -> Outcome {
    let report = passing_table("char3")?;
    let sigmas: BTreeSet<u32> = report.rows.iter().filter_map(|r| r.sigma0).collect();
    if sigmas != (1..=6).collect() {
        return Err(format!("sigma0 values {sigmas:?}"));
    }
    let mut sections = 0;
    for (seed, kind) in [(11, FamilyKind::P3Deg6), (12, FamilyKind::P3Deg5), (13, FamilyKind::P3Deg4)] {
        sections += common::p3_section_orders(seed, kind, 20)?;
    }
    Ok(format!("{} rows, sigma0 1..6; {sections} sections of exact order 3", report.checked))
}

fn char2() -> Outcome {
    let chain = passing_table("char2")?;
    let order4 = passing_table("order4")?;
    passing_table("order8")?;
    let start = Instant::now();
    let m = WeierstrassModel::from_strs(2, ["t^2", "0", "0", "1", "t^4"]).map_err(err)?;
    let found = torsion_search(&m, 8, 8).map_err(err)?;
    let pt = found.iter().find(|pt| order_of(&m, pt, 8) == Some(8)).ok_or("no section of exact order 8")?;
    within(start, Duration::from_secs(60), "order-8 search")?;
    Ok(format!(
        "chain and twists {} rows; order 4: {} rows ({} unrealizable over GF(2)); order-8 section {pt} in {:?}",
        chain.checked,
        order4.checked,
        order4.unrealizable,
        start.elapsed()
    ))
}

fn property_suites() -> Outcome {
    let mut changes = 0;
    for (i, p) in [2, 3, 5, 7].into_iter().enumerate() {
        changes += common::tate_invariance(100 + i as u64, p, 100)?;
    }
    let triples = common::group_law_triples(200, 50)?;
    for p in [2, 3, 5, 7, 11, 13] {
        common::ss_j_matches_oracle(p)?;
    }
    let cases = common::fixed_locus_enumeration()?;
    let mut k3_rows = 0;
    for id in TABLE_IDS {
        for row in verify_table(id, Execution::best()).map_err(err)?.rows {
            if row.c2 == Some(24) {
                match row.fixed_fibers {
                    Some(1..=2) => k3_rows += 1,
                    other => return Err(format!("{id} {}: fixed fibers {other:?}", row.label)),
                }
            }
        }
    }
    let (lhs, rhs, detail) = common::semistable_char2_identity()?;
    if lhs != rhs || lhs != Rational64::from_integer(6) {
        return Err(format!("height identity {lhs} vs {rhs} on {detail}"));
    }
    Ok(format!(
        "{changes} coordinate changes, {triples} triples, ss j for p <= 13, {cases} fixed-locus inputs, \
         {k3_rows} K3 rows with 1-2 fixed fibers, identity 6 = 6"
    ))
}

fn dichotomy() -> Outcome {
    let members = common::dichotomy_members(2024, 200);
    let mut ordinary = 0;
    for m in &members {
        common::dichotomy_holds(m)?;
        let report = analyze(&m.model, &AnalyzeOptions { torsion: Some(m.torsion), ..AnalyzeOptions::default() })
            .map_err(err)?;
        if report.pot_supersingular_count() == 2 {
            ordinary += 1;
        }
    }
    Ok(format!(
        "{} members: {ordinary} ordinary, {} supersingular, no exceptions",
        members.len(),
        members.len() - ordinary
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("igusa towers", igusa_tables),
        ("Euler bookkeeping", euler_bookkeeping),
        ("characteristic 7", char7),
        ("characteristic 5", char5),
        ("characteristic 3 sweep", char3),
        ("characteristic 2 structure", char2),
        ("property suites", property_suites),
        ("ordinary/supersingular dichotomy", dichotomy),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{:?}]", i + 1, start.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} [{:?}]", i + 1, start.elapsed());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
