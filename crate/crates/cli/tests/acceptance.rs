//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines are always printed; exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use enriques_cli::dsl::resolve;
use enriques_cli::report::ReportResult;
use enriques_cli::{run, EXIT_OK};
use enriques_core::constructions::{quarter_table_class, ten_frame_bases, two_d};
use enriques_core::decompose::{isotropic_decompose, ten_frame, verify_decomposition, verify_frame};
use enriques_core::invariants::{generic_gonality, min_pairing_isotropic, QUARTER_TABLE};
use enriques_core::verify::{effective_classes_in_box, Check, SweepReport};
use enriques_core::EnriquesLattice;

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lat() -> &'static EnriquesLattice {
    EnriquesLattice::standard()
}

fn sweep() -> Result<(SweepReport, Duration), String> {
    let t = Instant::now();
    let out = run(["enriques", "--format", "json", "verify", "--radius", "2", "--checks", "all"]);
    let took = t.elapsed();
    let doc = out.document.ok_or("no report")?;
    match doc.result {
        ReportResult::Verify(r) => {
            ensure(out.code == EXIT_OK, || format!("exit code {}", out.code))?;
            Ok((r, took))
        }
        other => Err(format!("unexpected result {other:?}")),
    }
}

fn ac1(r: &SweepReport, took: Duration) -> Verdict {
    for check in Check::ALL {
        let c = r.counter(check).ok_or(format!("{check} not run"))?;
        ensure(c.failed == 0, || format!("{check}: {} failures", c.failed))?;
        ensure(c.tested > 0, || format!("{check}: nothing tested"))?;
    }
    ensure(r.counterexamples.is_empty(), || "counterexamples listed".into())?;
    ensure(r.classes_tested >= 1000, || format!("{} classes", r.classes_tested))?;
    ensure(took < Duration::from_secs(600), || format!("{took:?}"))?;
    Ok(format!("{} classes, 7 checks, 0 counterexamples, {:.1} s", r.classes_tested, took.as_secs_f64()))
}

fn ac2() -> Verdict {
    for (l2, phi) in QUARTER_TABLE {
        let l = quarter_table_class(lat(), l2, phi).map_err(|e| e.to_string())?;
        let r = generic_gonality(lat(), &l).map_err(|e| e.to_string())?;
        ensure((r.l_squared, r.phi.value) == (l2, phi), || {
            format!("fixture has ({}, {})", r.l_squared, r.phi.value)
        })?;
        ensure(r.gengon == l2 / 4 + 2 && r.gengon == 2 * phi - 1, || {
            format!("({l2},{phi}): gengon {}", r.gengon)
        })?;
    }
    Ok("6 table classes, gengon = L²/4 + 2 = 2φ - 1".into())
}

fn ac3() -> Verdict {
    for (a, b) in [(3i64, 3i64), (3, 4), (3, 5), (4, 6)] {
        let l = resolve(lat(), &format!("let E1,E2 = isotropic(E1.E2=1); {a}*E1 + {b}*E2"))
            .map_err(|e| e.to_string())?;
        let r = generic_gonality(lat(), &l).map_err(|e| e.to_string())?;
        ensure(r.gengon == 2 * a, || format!("({a},{b}): gengon {}", r.gengon))?;
        let lower = if b == a { 2 * a - 2 } else { 2 * a - 1 };
        ensure((r.mingon.lower, r.mingon.upper) == (lower, 2 * a), || {
            format!("({a},{b}): mingon [{}, {}]", r.mingon.lower, r.mingon.upper)
        })?;
    }
    Ok("4 pairs, gengon 2a, mingon intervals match".into())
}

fn ac4() -> Verdict {
    for a in [5i64, 6] {
        let l = resolve(lat(), &format!("let E1,E2 = isotropic(E1.E2=2); {a}*(E1 + E2)"))
            .map_err(|e| e.to_string())?;
        let r = generic_gonality(lat(), &l).map_err(|e| e.to_string())?;
        let got = (r.phi.value, r.mu.value, r.mu.is_exact(), r.gengon, r.mingon.lower, r.mingon.upper);
        let want = (2 * a, 4 * a - 2, true, 4 * a - 2, 4 * a - 4, 4 * a - 2);
        ensure(got == want, || format!("a = {a}: {got:?}, expected {want:?}"))?;
    }
    Ok("a = 5, 6: φ = 2a, μ = gengon = 4a - 2, mingon [4a - 4, 4a - 2]".into())
}

fn ac5() -> Verdict {
    let l = two_d(lat()).map_err(|e| e.to_string())?;
    let r = generic_gonality(lat(), &l).map_err(|e| e.to_string())?;
    ensure(r.phi.value == 6 && r.mu.is_exact() && r.mu.value == 12, || {
        format!("φ = {}, μ = {}", r.phi.value, r.mu.value)
    })?;
    Ok("μ(2D) = 12 = 2φ".into())
}

fn ac6() -> Verdict {
    let t = Instant::now();
    let out = run(["enriques", "--format", "json", "oracle-check", "--radius", "2"]);
    let took = t.elapsed();
    let doc = out.document.ok_or("no report")?;
    let ReportResult::OracleCheck(r) = doc.result else {
        return Err(format!("unexpected result, exit {}: {}", out.code, out.stderr));
    };
    ensure(r.anchors.len() >= 50, || format!("{} anchors", r.anchors.len()))?;
    ensure(r.queries == 16 * r.anchors.len() as u64, || format!("{} queries", r.queries))?;
    ensure(r.discrepancies.is_empty(), || format!("{} discrepancies", r.discrepancies.len()))?;
    ensure(out.code == EXIT_OK, || format!("exit code {}", out.code))?;
    ensure(took < Duration::from_secs(300), || format!("{took:?}"))?;
    Ok(format!(
        "{} anchors, {} queries ({} infeasible), {} solutions, 0 discrepancies, {:.1} s",
        r.anchors.len(),
        r.queries,
        r.infeasible,
        r.solutions_compared,
        took.as_secs_f64()
    ))
}

fn ac7() -> Verdict {
    let mut pool = effective_classes_in_box(lat(), 2, None);
    pool.shuffle(&mut ChaCha8Rng::seed_from_u64(7));
    for l in pool.iter().take(200) {
        let d = isotropic_decompose(lat(), l).map_err(|e| e.to_string())?;
        verify_decomposition(lat(), l, &d).map_err(|e| e.to_string())?;
        ensure(d.classes.len() <= 10, || format!("{l}: {} classes", d.classes.len()))?;
    }
    let ds = ten_frame_bases(lat(), 5).map_err(|e| e.to_string())?;
    for d in &ds {
        ensure(min_pairing_isotropic(lat(), d).map_err(|e| e.to_string())?.value == 3, || {
            format!("φ({d}) ≠ 3")
        })?;
        let f = ten_frame(lat(), d).map_err(|e| e.to_string())?;
        verify_frame(lat(), &f).map_err(|e| e.to_string())?;
    }
    Ok(format!("200 decompositions verified, {} ten-frames verified", ds.len()))
}

fn ac8(r: &SweepReport) -> Verdict {
    let c = r.counter(Check::Coherence).ok_or("coherence not run")?;
    ensure(c.failed == 0, || format!("{} mismatches", c.failed))?;
    let extremal: u64 = r
        .type_tags
        .iter()
        .filter(|(k, _)| k.as_str() != "general")
        .map(|(_, v)| v)
        .sum();
    let kinds = ["mu1", "mu2", "mu3", "2D"];
    for k in kinds {
        ensure(r.type_tags.keys().any(|t| t.starts_with(k)), || format!("no {k} class tested"))?;
    }
    Ok(format!("{extremal} extremal classes, tags match types, 0 mismatches"))
}

fn ac9() -> Verdict {
    let text = include_str!("fixtures/decompositions.txt");
    let mut n = 0;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let parts: Vec<&str> = line.splitn(3, '|').map(str::trim).collect();
        let [name, nums, expr] = parts[..] else {
            return Err(format!("malformed line {line:?}"));
        };
        let want: Vec<i64> = nums.split_whitespace().map(|x| x.parse().unwrap()).collect();
        let l = resolve(lat(), expr).map_err(|e| format!("{name}: {e}"))?;
        let phi = min_pairing_isotropic(lat(), &l).map_err(|e| format!("{name}: {e}"))?.value;
        let got = vec![lat().norm(&l), phi];
        ensure(got == want, || format!("{name}: (L², φ) = {got:?}, expected {want:?}"))?;
        n += 1;
    }
    ensure(n >= 21, || format!("only {n} fixtures"))?;
    Ok(format!("{n} expressions resolved, (L², φ) all match"))
}

fn main() {
    let mut failed = 0;
    let mut report = |name: &str, v: Verdict| match v {
        Ok(m) => println!("{name} PASS  {m}"),
        Err(m) => {
            failed += 1;
            println!("{name} FAIL  {m}");
        }
    };
    let swept = sweep();
    match &swept {
        Ok((r, took)) => report("AC1", ac1(r, *took)),
        Err(e) => report("AC1", Err(e.clone())),
    }
    report("AC2", ac2());
    report("AC3", ac3());
    report("AC4", ac4());
    report("AC5", ac5());
    report("AC6", ac6());
    report("AC7", ac7());
    match &swept {
        Ok((r, _)) => report("AC8", ac8(r)),
        Err(e) => report("AC8", Err(e.clone())),
    }
    report("AC9", ac9());
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
