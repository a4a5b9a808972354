//! End-to-end acceptance run: one verdict line per criterion.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use bispectral::exact::{Factor, Gq, RatFun, Var};
use bispectral::kdv::{
    schrodinger, schrodinger_eigenvalue, synth_wavefunction, verify_kdv_example, KdvError, PotentialForm,
};
use bispectral::matpoly::{ConstMat, MatPoly};
use bispectral::operators::{check_triple, Convention};
use bispectral::presentations::{
    check_relations, find_generators, surjectivity_check, GeneratorAssignment, PresentationSpec, SearchOptions,
};
use bispectral::prolate::{run_prolate, ProlateConfig};
use bispectral::solver::{closure_check_default, stabilize_default, SliceMode};
use bispectral::theorems::{validate_theorem, ExampleId, Gamma, EX2_RELAXED_ENTRY};

const EXAMPLES: [ExampleId; 3] = [ExampleId::Ex1, ExampleId::Ex2, ExampleId::Ex3];

enum Verdict {
    Pass,
    Fail,
    /// Fails in exactly the documented way; does not fail the run.
    KnownFail(&'static str),
}

type Run = fn() -> (Verdict, Vec<String>);

struct Line {
    number: usize,
    title: &'static str,
    verdict: Verdict,
    detail: Vec<String>,
    seconds: f64,
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn triples() -> (Verdict, Vec<String>) {
    let mut ok = true;
    let mut detail = Vec::new();
    for id in EXAMPLES {
        let p = id.problem();
        let start = Instant::now();
        let v = check_triple(
            p.left_op.as_ref().expect("left operator"),
            &p.psi,
            p.right_op.as_ref().expect("right operator"),
            p.f.as_ref().expect("f"),
            p.theta.as_ref().expect("theta"),
        )
        .expect("well-formed triple");
        let secs = start.elapsed().as_secs_f64();
        ok &= v.holds() && v.left.residual.is_zero() && v.right.residual.is_zero() && secs < 5.0;
        detail.push(format!("{id}: left {} right {} ({secs:.2}s)", v.left.holds, v.right.holds));
    }
    (verdict(ok), detail)
}

fn theorem(id: ExampleId, d: usize, expected: &[usize], budget: f64) -> (Verdict, Vec<String>) {
    let r = validate_theorem(id, d).expect("theorem validation runs");
    let mut detail = vec![
        format!("solver dims {:?}", r.solver_dims),
        format!("literal description dims {:?}, equal {}", r.literal.gamma_dims, r.literal.equal),
    ];
    let literal_ok = r.literal.equal && r.solver_dims == expected && r.literal.gamma_dims == expected;
    let ok = if id == ExampleId::Ex2 && !literal_ok {
        // Fallback reading: only acceptable if the literal comparison first
        // breaks at degree 4 and the relaxed description matches everywhere.
        let relaxed = r.relaxed.as_ref().expect("relaxed comparison for ex2");
        detail.push(format!("literal first mismatch at degree {}", r.literal.first_mismatch.map_or("none".into(), |k| k.to_string())));
        detail.push(format!("relaxed description dims {:?}, equal {}", relaxed.gamma_dims, relaxed.equal));
        r.literal.gamma_dims == expected && r.literal.first_mismatch == Some(4) && relaxed.equal
    } else {
        literal_ok
    };
    detail.push(format!("{:.1}s", r.seconds));
    (verdict(ok && r.seconds < budget), detail)
}

/// Relations vanish exactly, generators lie in the description, and the
/// generated truncated algebra fills the description at `degree`.
fn accept_assignment(spec: &PresentationSpec, gamma: &Gamma, a: &GeneratorAssignment, degree: usize) -> (bool, String) {
    let relations = check_relations(spec, a).expect("relations evaluate");
    let zero = relations.iter().filter(|r| r.zero).count();
    let members = a.values.values().all(|p| gamma.membership(p).expect("membership").holds);
    let surj = surjectivity_check(gamma, a, degree);
    let ok = zero == relations.len() && members && surj.equal;
    (ok, format!("{zero}/{} relations zero, members {members}, surjective at degree {degree}: {}", relations.len(), surj.equal))
}

fn presentations() -> (Verdict, Vec<String>) {
    let mut ok = true;
    let mut detail = Vec::new();
    let opts = SearchOptions::default();

    for (id, relaxed) in [(ExampleId::Ex1, false), (ExampleId::Ex2, false), (ExampleId::Ex2, true)] {
        let spec = PresentationSpec::catalog(id);
        let gamma = if relaxed { id.gamma().relaxed(EX2_RELAXED_ENTRY) } else { id.gamma() };
        let degree = gamma.threshold + 2;
        let label = if relaxed { format!("{id} (relaxed description)") } else { id.to_string() };
        let survivors = match find_generators(&spec, &gamma, &opts) {
            Ok(r) => r.survivors,
            Err(e) => {
                detail.push(format!("{label}: {e}"));
                Vec::new()
            }
        };
        let mut accepted = 0;
        for doc in &survivors {
            let a = GeneratorAssignment::from_doc(doc).expect("survivor parses");
            let (good, _) = accept_assignment(&spec, &gamma, &a, degree);
            accepted += usize::from(good);
        }
        detail.push(format!("{label}: {} survivors, {accepted} re-verified at degree {degree}", survivors.len()));
        // ex2 needs survivors under at least one reading; ex1 always
        if id == ExampleId::Ex1 || relaxed {
            ok &= accepted >= 1 && accepted == survivors.len();
        }
    }

    // hand-picked candidate: a0 = E12, a1 = xI + x²E21
    let spec = PresentationSpec::catalog(ExampleId::Ex1);
    let gamma = ExampleId::Ex1.gamma();
    let a1 = MatPoly::new(Var::X, 2, vec![ConstMat::zeros(2), ConstMat::identity(2), ConstMat::unit(2, 1, 0)]);
    let candidate = GeneratorAssignment::new(Var::X, 2)
        .with("a0", MatPoly::monomial(Var::X, ConstMat::unit(2, 0, 1), 0))
        .with("a1", a1);
    let (_, text) = accept_assignment(&spec, &gamma, &candidate, gamma.threshold + 2);
    detail.push(format!("ex1 candidate (E12, xI + x^2 E21): {text}"));

    let spec = PresentationSpec::catalog(ExampleId::Ex3);
    let gamma = ExampleId::Ex3.gamma();
    match find_generators(&spec, &gamma, &opts) {
        Ok(r) if !r.survivors.is_empty() => {
            let mut accepted = 0;
            for doc in &r.survivors {
                let a = GeneratorAssignment::from_doc(doc).expect("survivor parses");
                accepted += usize::from(accept_assignment(&spec, &gamma, &a, gamma.threshold + 2).0);
            }
            ok &= accepted >= 1;
            detail.push(format!("ex3: {accepted} survivors re-verified"));
        }
        Ok(r) => {
            let best = r.partial.first();
            ok &= best.is_some_and(|p| {
                let a = GeneratorAssignment::from_doc(&p.assignment).expect("partial parses");
                let distinguished = p.relations[..spec.distinguished].iter().all(|x| x.zero);
                distinguished && surjectivity_check(&gamma, &a, gamma.threshold + 2).equal
            });
            detail.push(format!(
                "ex3: no surjective assignment satisfies all {} relations; residual report of {} partial assignments, best satisfies {}/{}",
                spec.relations.len(),
                r.partial.len(),
                best.map_or(0, |p| p.satisfied),
                spec.relations.len()
            ));
            if let Some(p) = best {
                let open: Vec<&str> = p.relations.iter().filter(|x| !x.zero).map(|x| x.relation.as_str()).collect();
                detail.push(format!("ex3 best partial: nonzero residuals for {open:?}"));
            }
        }
        Err(e) => {
            ok = false;
            detail.push(format!("ex3: {e}"));
        }
    }
    (verdict(ok), detail)
}

fn tail_check(label: &str, v: &RatFun, k_max: usize, expected_order: Option<usize>, detail: &mut Vec<String>) -> Result<bool, KdvError> {
    let l = schrodinger(v)?;
    let mut ok = true;
    for c in [Convention::One, Convention::I] {
        let tail = synth_wavefunction(&l, c, 8)?;
        let eigen = bispectral::operators::check_left_eigen(&l, &tail.to_wave(), &schrodinger_eigenvalue(c)).expect("eigen check").holds;
        let order_ok = tail.order() <= k_max && expected_order.is_none_or(|k| tail.order() == k);
        ok &= eigen && order_ok;
        detail.push(format!("{label}, s = {}: K = {}, eigen relation {eigen}", c.label(), tail.order()));
    }
    Ok(ok)
}

fn kdv() -> (Verdict, Vec<String>) {
    let mut detail = Vec::new();
    let t3 = Gq::one();
    let x = Factor::linear(Var::X, Gq::zero());
    let free = tail_check("V = 0", &RatFun::zero(), 0, Some(0), &mut detail).unwrap_or(false);
    let rational = tail_check("V = 2/x^2", &RatFun::inv_factor(&x, 2).scale(&Gq::from_int(2)), 1, Some(1), &mut detail).unwrap_or(false);

    let (displayed, _) = PotentialForm::Displayed.potential(&t3);
    let displayed_outcome = tail_check("displayed L2 potential at t3 = 1", &displayed, 4, None, &mut detail);
    let displayed_ok = match &displayed_outcome {
        Ok(ok) => *ok,
        Err(e) => {
            detail.push(format!("displayed L2 potential {displayed}: {e}"));
            false
        }
    };
    let displayed_residue = matches!(&displayed_outcome, Err(KdvError::NonRational(f)) if f.contains("x^3"));

    let (tau, _) = PotentialForm::Tau.potential(&t3);
    let tau_ok = tail_check("tau-form L2 potential at t3 = 1", &tau, 4, None, &mut detail).unwrap_or(false);

    let report = verify_kdv_example(&t3, PotentialForm::Tau).expect("tau-form report");
    let expected_gamma = (-&Gq::from_int(4)).to_string();
    let mut pair_ok = !report.verifying_conventions().is_empty();
    for c in &report.conventions {
        pair_ok &= c.gamma.as_deref() == Some(expected_gamma.as_str()) && c.eigen_holds == Some(true);
        detail.push(format!(
            "tau form, s = {}: gamma {:?} (unique {:?}), pair (B2, x^4 - 4 t3 x) verifies {:?}",
            c.convention.label(),
            c.gamma,
            c.gamma_unique,
            c.pair_holds
        ));
    }
    let labels: Vec<&str> = report.verifying_conventions().iter().map(|c| c.label()).collect();
    detail.push(format!("pair verifies under s in {labels:?}"));

    let rest = free && rational && tau_ok && pair_ok;
    let v = if rest && displayed_ok {
        Verdict::Pass
    } else if rest && displayed_residue {
        Verdict::KnownFail("displayed potential has a nonzero residue in its first tail step; tau form passes")
    } else {
        Verdict::Fail
    };
    (v, detail)
}

fn prolate() -> (Verdict, Vec<String>) {
    let cfg = ProlateConfig::reference();
    let start = Instant::now();
    let r = run_prolate(&cfg).expect("prolate run");
    let secs = start.elapsed().as_secs_f64();
    let ok = r.commutator_residual <= 1e-8
        && r.max_cross_residual_leading <= 1e-6
        && r.shannon_count.abs_diff(5) <= 1
        && secs < 30.0;
    let detail = vec![
        format!("commutator residual {:.2e}", r.commutator_residual),
        format!("max cross residual over leading {} modes {:.2e}", cfg.n_modes / 2, r.max_cross_residual_leading),
        format!("Shannon number {:.3}, count {}", r.shannon, r.shannon_count),
        format!("quadrature doubling change {:.2e}", r.quadrature_change),
        format!("{secs:.2}s"),
    ];
    (verdict(ok), detail)
}

fn properties() -> (Verdict, Vec<String>) {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, cases, outcome) in common::property_suite() {
        ok &= outcome.is_ok();
        detail.push(format!("{name} ({cases} cases): {}", outcome.err().unwrap_or_else(|| "ok".into())));
    }

    let p = ExampleId::Ex1.problem();
    let run = || {
        let (slice, _) = stabilize_default(&p.psi, ExampleId::Ex1.side(), 3, SliceMode::Truncations, &p.basis).expect("solve");
        serde_json::to_string(&slice.serialize()).expect("serialize")
    };
    let same = run() == run();
    ok &= same;
    detail.push(format!("slice serialization byte-identical across reruns: {same}"));

    for id in EXAMPLES {
        let p = id.problem();
        let v = closure_check_default(&p.psi, id.side(), 2, &p.basis).expect("closure check");
        ok &= v.holds;
        detail.push(format!("{id} closure at d = 2: {} ({} products)", v.holds, v.checked_products));
    }
    (verdict(ok), detail)
}

fn main() -> ExitCode {
    let criteria: Vec<(usize, &'static str, Run)> = vec![
        (1, "exact triple verification", triples),
        (2, "ex1 algebra equals its description, degrees 0-5", || theorem(ExampleId::Ex1, 5, &[2, 4, 7, 10, 14, 18], 60.0)),
        (3, "ex2 algebra equals its description, degrees 0-5", || theorem(ExampleId::Ex2, 5, &[5, 10, 15, 23, 30, 38], 600.0)),
        (4, "ex3 algebra (f side) equals its description, degrees 0-3", || theorem(ExampleId::Ex3, 3, &[2, 3, 5, 9], 60.0)),
        (5, "presentations by generators and relations", presentations),
        (6, "KdV tail wave functions and the L2 pair", kdv),
        (7, "prolate commutation and spectrum", prolate),
        (8, "property suites and algebra closure", properties),
    ];
    let mut lines = Vec::new();
    for (number, title, f) in criteria {
        let start = Instant::now();
        let (verdict, detail) = f();
        lines.push(Line { number, title, verdict, detail, seconds: start.elapsed().as_secs_f64() });
    }

    let mut unexpected = 0;
    for l in &lines {
        let (tag, note) = match l.verdict {
            Verdict::Pass => ("PASS", String::new()),
            Verdict::Fail => {
                unexpected += 1;
                ("FAIL", String::new())
            }
            Verdict::KnownFail(why) => ("FAIL", format!(" [documented: {why}]")),
        };
        println!("criterion {}: {tag} {} ({:.1}s){note}", l.number, l.title, l.seconds);
        for d in &l.detail {
            println!("    {d}");
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria failed unexpectedly");
        ExitCode::FAILURE
    }
}
