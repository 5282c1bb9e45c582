//! One line per acceptance criterion. Exits non-zero if any check fails.

mod common;

use boxlab::bell::{chsh, chsh_functional, correlator_functional, cglmp, max_chsh_variant, unique_ns_maximizer};
use boxlab::incompat::{binary_entropy, entropy_bound_check, incompatibility, output_entropy, ObservablePair};
use boxlab::isotropic::{depolarize, isotropic_parameter, make_isotropic, signed_isotropic_parameter};
use boxlab::locality::{eve_extension, is_deterministic, is_local, product_given_eve, secrecy_content};
use boxlab::lp::verify_certificate;
use boxlab::polytope::{nonsignaling_vertices_2222, DeterministicStrategy};
use boxlab::shareability::{
    clone_feasibility, infinite_shareability_extension, is_m_shareable, isotropic_clone_ceiling,
    local_model_from_extension, monogamy_tradeoff, polygamy_example, shrinking_factor, unique_violator_decoupling,
    validate_extension, ExtensionProblem, ExtensionWitness, SharedParty,
};
use boxlab::{rat, CorrelationBox, Error, LocalityVerdict, Rational, Scenario, SecrecyVerdict};
use num_traits::{One, Zero};
use std::process::ExitCode;
use std::time::Instant;

const CAP: u128 = 10_000;

type Check = Result<String, String>;
type Named<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fail<E: std::fmt::Debug>(e: E) -> String {
    format!("error: {e:?}")
}

fn pr_battery() -> Check {
    let pr = make_isotropic(Rational::one()).map_err(fail)?;
    ensure!(pr.is_nonsignaling(), "PR box reported signaling");
    match is_local(&pr).map_err(fail)? {
        LocalityVerdict::Nonlocal(cert) => {
            ensure!(cert.verify(&pr, CAP).map_err(fail)?, "certificate does not verify");
            ensure!(cert.violation > Rational::zero(), "certificate violation {} not positive", cert.violation);
        }
        LocalityVerdict::Local(_) => return Err("PR box reported local".into()),
    }
    let value = chsh(&pr).map_err(fail)?;
    ensure!(value == Rational::one(), "chsh = {value}");
    ensure!(!is_deterministic(&pr), "PR box reported deterministic");
    Ok("nonsignaling, certified nonlocal, chsh = 1, not deterministic".into())
}

fn isotropic_line() -> Check {
    for c in [rat(0, 1), rat(1, 4), rat(1, 2), rat(7, 10), rat(1, 1)] {
        let b = make_isotropic(c.clone()).map_err(fail)?;
        let value = chsh(&b).map_err(fail)?;
        ensure!(value == &c * rat(2, 1) - Rational::one(), "C = {c}: chsh = {value}");
        let local = is_local(&b).map_err(fail)?.is_local();
        ensure!(local == (c <= rat(1, 2)), "C = {c}: is_local = {local}");
    }
    Ok("chsh = 2C - 1 and local iff C <= 1/2 on 5 points".into())
}

fn depolarization() -> Check {
    let mut r = common::rng(3);
    let mut boxes = nonsignaling_vertices_2222();
    boxes.extend((0..200).map(|_| common::random_ns_box(&mut r)));
    let mut negative = 0;
    for b in &boxes {
        let d = depolarize(b).map_err(fail)?;
        let (before, after) = (chsh(b).map_err(fail)?, chsh(&d).map_err(fail)?);
        ensure!(before == after, "chsh changed from {before} to {after}");
        let c = signed_isotropic_parameter(&d).ok_or("output is not of isotropic form")?;
        ensure!((c >= Rational::zero()) == (before >= -Rational::one()), "sign of C = {c} disagrees with chsh {before}");
        ensure!(isotropic_parameter(&d).is_some() == (c >= Rational::zero()), "isotropic_parameter inconsistent");
        if c < Rational::zero() {
            negative += 1;
        }
    }
    Ok(format!(
        "{} boxes: chsh preserved, isotropic form; {negative} with chsh < -1 map to negative C",
        boxes.len()
    ))
}

fn shareability_threshold() -> Check {
    for c in [rat(0, 1), rat(1, 4), rat(1, 2), rat(51, 100), rat(3, 4), rat(1, 1)] {
        let b = make_isotropic(c.clone()).map_err(fail)?;
        let feasible = clone_feasibility(&b, 2).map_err(fail)?;
        ensure!(feasible.is_feasible() == (c <= rat(1, 2)), "C = {c}: 2-shareable = {}", feasible.is_feasible());
        if let ExtensionWitness::Extension(ext) = &feasible {
            validate_extension(ext, &b, SharedParty::B, 2).map_err(fail)?;
        }
    }
    let ceiling = isotropic_clone_ceiling().map_err(fail)?;
    ensure!(ceiling == rat(1, 2), "ceiling = {ceiling}");
    let factor = shrinking_factor(&rat(3, 4)).map_err(fail)?;
    ensure!(factor == rat(2, 3), "shrinking factor = {factor}");
    Ok("2-shareable iff C <= 1/2, ceiling = 1/2, factor(3/4) = 2/3".into())
}

fn shareability_round_trip() -> Check {
    let mut r = common::rng(5);
    let s = Scenario::chsh();
    let mut boxes = Vec::new();
    for _ in 0..100 {
        let model = common::random_local_model(&mut r, &s);
        let b = model.reconstruct(&s).map_err(fail)?;
        for shared in [SharedParty::A, SharedParty::B] {
            let ext = infinite_shareability_extension(&model, &s, shared, 3).map_err(fail)?;
            validate_extension(&ext, &b, shared, 3).map_err(fail)?;
        }
        boxes.push(b);
    }
    boxes.extend((0..40).map(|_| common::random_sparse_ns_box(&mut r)));
    let mut feasible = 0;
    for b in &boxes {
        let problem = ExtensionProblem::new(b.clone(), SharedParty::B, 2).map_err(fail)?;
        if let ExtensionWitness::Extension(ext) = is_m_shareable(&problem).map_err(fail)? {
            feasible += 1;
            let (restricted, model) = local_model_from_extension(&ext, b, SharedParty::B, &[0, 1]).map_err(fail)?;
            ensure!(model.reconstruct(restricted.scenario()).map_err(fail)? == restricted, "model does not reconstruct");
            ensure!(restricted == *b, "restriction to both inputs changed the box");
            let value = chsh(&restricted).map_err(fail)?;
            ensure!(value <= Rational::zero(), "shareable box has chsh {value}");
        }
    }
    Ok(format!(
        "100 models 3-extend (both parties); {feasible}/{} boxes 2-extend and all reconstruct with chsh <= 0",
        boxes.len()
    ))
}

fn monogamy() -> Check {
    let mut values = Vec::new();
    for beta in [rat(1, 10), rat(1, 4), rat(1, 2), rat(3, 4), rat(1, 1)] {
        let v = monogamy_tradeoff(&beta).map_err(fail)?;
        ensure!(v <= Rational::zero(), "beta = {beta}: tradeoff {v}");
        values.push(v);
    }
    let top = monogamy_tradeoff(&-Rational::one()).map_err(fail)?;
    ensure!(top == Rational::one(), "tradeoff(-1) = {top}");
    let (max, min) = unique_violator_decoupling(&chsh_functional(), &correlator_functional(0, 0)).map_err(fail)?;
    ensure!(max.is_zero() && min.is_zero(), "decoupling gave ({max}, {min})");
    let listed: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    Ok(format!("tradeoff = [{}] at beta = 1/10..1, tradeoff(-1) = 1, decoupling (0, 0)", listed.join(", ")))
}

fn polygamy() -> Check {
    let b = polygamy_example();
    ensure!(b.is_nonsignaling(), "example is signaling");
    for pair in [[0, 1], [0, 2]] {
        let m = b.marginal_of(&pair).map_err(fail)?;
        match is_local(&m).map_err(fail)? {
            LocalityVerdict::Nonlocal(cert) => {
                ensure!(cert.verify(&m, CAP).map_err(fail)?, "certificate for {pair:?} does not verify")
            }
            LocalityVerdict::Local(_) => return Err(format!("marginal {pair:?} is local")),
        }
    }
    Ok("AB and AC marginals certified nonlocal".into())
}

fn secrecy() -> Check {
    let mut r = common::rng(8);
    let (mut local, mut nonlocal) = (0, 0);
    for i in 0..200 {
        let b = if i % 2 == 0 { common::random_ns_box(&mut r) } else { common::random_sparse_ns_box(&mut r) };
        let verdict = is_local(&b).map_err(fail)?;
        let secret = secrecy_content(&b).map_err(fail)?;
        ensure!(secret.contains_secrecy() != verdict.is_local(), "box {i}: secrecy and locality disagree");
        match secret {
            SecrecyVerdict::NoSecrecy(model) => {
                local += 1;
                let ext = eve_extension(&b, &model).map_err(fail)?;
                ensure!(ext.is_nonsignaling(), "box {i}: Eve's extension signals");
                ensure!(product_given_eve(&ext).map_err(fail)?, "box {i}: extension not product given e");
                ensure!(ext.marginal_of(&[0, 1]).map_err(fail)? == b, "box {i}: extension marginal differs");
            }
            SecrecyVerdict::Secrecy(cert) => {
                nonlocal += 1;
                ensure!(cert.verify(&b, CAP).map_err(fail)?, "box {i}: certificate does not verify");
            }
        }
    }
    Ok(format!("200 boxes ({local} local, {nonlocal} nonlocal) agree; all extensions NS and product given e"))
}

fn incompat_boxes() -> Vec<CorrelationBox> {
    let mut r = common::rng(13);
    let mut boxes = nonsignaling_vertices_2222();
    for i in 0..500 {
        boxes.push(if i % 2 == 0 { common::random_ns_box(&mut r) } else { common::random_sparse_ns_box(&mut r) });
    }
    boxes
}

fn incompatibility_identity(boxes: &[CorrelationBox]) -> Check {
    let pair = ObservablePair::bob();
    let mut literal_mismatch = 0;
    for (i, b) in boxes.iter().enumerate() {
        let result = incompatibility(b, &pair).map_err(fail)?;
        ensure!(result.verify(), "box {i}: decomposition does not verify");
        let expected = max_chsh_variant(b).map_err(fail)?.max(Rational::zero());
        ensure!(result.eta == expected, "box {i}: inc = {} but expected {expected}", result.eta);
        if result.eta != chsh(b).map_err(fail)?.max(Rational::zero()) {
            literal_mismatch += 1;
        }
    }
    Ok(format!(
        "{} boxes: inc = max(0, chsh of the best relabeling); {literal_mismatch} differ from the standard-form chsh",
        boxes.len()
    ))
}

fn entropy_bounds(boxes: &[CorrelationBox]) -> Check {
    let pair = ObservablePair::bob();
    for (i, b) in boxes.iter().enumerate() {
        let report = entropy_bound_check(b, &pair).map_err(fail)?;
        ensure!(report.holds(), "box {i}: H = ({}, {}) below bound {}", report.h0, report.h1, report.bound);
    }
    let det = CorrelationBox::deterministic(Scenario::chsh(), &[vec![0, 0], vec![0, 0]]).map_err(fail)?;
    let pr = make_isotropic(Rational::one()).map_err(fail)?;
    for eta in [rat(1, 5), rat(1, 2), rat(3, 4), rat(1, 1)] {
        let b = CorrelationBox::mix(&[(&pr, eta.clone()), (&det, Rational::one() - &eta)]).map_err(fail)?;
        let inc = incompatibility(&b, &pair).map_err(fail)?.eta;
        ensure!(inc == eta, "tight box: inc = {inc}, expected {eta}");
        let bound = binary_entropy(boxlab::rational::to_f64(&inc) / 2.0);
        for y in 0..2 {
            let h = output_entropy(&b, 1, y).map_err(fail)?;
            ensure!((h - bound).abs() <= 1e-12, "tight box eta = {eta}, y = {y}: H = {h}, h(inc/2) = {bound}");
        }
    }
    Ok(format!("bounds hold on {} boxes; equality on 4 tight boxes", boxes.len()))
}

fn determinism_implies_locality() -> Check {
    let s = Scenario::chsh();
    let (mut ns, mut signaling) = (0, 0);
    for code in 0..256usize {
        // outputs (a, b) chosen independently for each of the four input pairs
        let table: Vec<Rational> = s
            .entries()
            .map(|(x, a)| {
                let block = x[0] * 2 + x[1];
                let pick = (code >> (2 * block)) & 3;
                if a[0] * 2 + a[1] == pick {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        let b = CorrelationBox::new(s.clone(), table).map_err(fail)?;
        ensure!(is_deterministic(&b), "table {code} not deterministic");
        match is_local(&b) {
            Ok(LocalityVerdict::Local(model)) => {
                ensure!(b.is_nonsignaling() && model.reproduces(&b), "table {code}: bad local model");
                ns += 1;
            }
            Ok(LocalityVerdict::Nonlocal(_)) => return Err(format!("table {code} reported nonlocal")),
            Err(Error::SignalingBox(_)) => {
                ensure!(!b.is_nonsignaling(), "table {code}: rejected but nonsignaling");
                signaling += 1;
            }
            Err(e) => return Err(fail(e)),
        }
    }
    ensure!(ns as u128 == DeterministicStrategy::count(&s), "{ns} nonsignaling tables");
    Ok(format!("{ns} nonsignaling tables certified local, {signaling} rejected as signaling"))
}

fn cglmp_uniqueness() -> Check {
    let mut found = Vec::new();
    for d in 2..=4 {
        let result = unique_ns_maximizer(&cglmp(d).map_err(fail)?).map_err(fail)?;
        ensure!(result.unique, "cglmp({d}) maximizer not unique");
        ensure!(result.value == Rational::one(), "cglmp({d}) NS max = {}", result.value);
        found.push(d.to_string());
    }
    Ok(format!("unique maximizer with value 1 for d = {}", found.join(", ")))
}

fn lp_soundness() -> Check {
    let mut r = common::rng(21);
    let mut counts = [0usize; 3];
    for i in 0..1000 {
        let lp = common::random_lp(&mut r);
        let outcome = lp.solve().map_err(fail)?;
        ensure!(verify_certificate(&lp, &outcome), "LP {i}: certificate does not verify");
        let oracle = common::brute_force(&lp);
        ensure!(outcome.status() == oracle.status, "LP {i}: solver {:?}, oracle {:?}", outcome.status(), oracle.status);
        ensure!(outcome.value() == oracle.value.as_ref(), "LP {i}: value {:?} vs oracle {:?}", outcome.value(), oracle.value);
        counts[outcome.status() as usize] += 1;
    }
    Ok(format!(
        "1000 LPs agree with vertex enumeration ({} optimal, {} infeasible, {} unbounded), all certificates verify",
        counts[0], counts[1], counts[2]
    ))
}

fn main() -> ExitCode {
    let boxes = incompat_boxes();
    let checks: Vec<Named> = vec![
        ("PR-box battery", Box::new(pr_battery)),
        ("isotropic line", Box::new(isotropic_line)),
        ("depolarization invariance", Box::new(depolarization)),
        ("shareability threshold and cloning ceiling", Box::new(shareability_threshold)),
        ("local models and shareability round trip", Box::new(shareability_round_trip)),
        ("monogamy", Box::new(monogamy)),
        ("polygamy example", Box::new(polygamy)),
        ("secrecy equivalence", Box::new(secrecy)),
        ("incompatibility identity", Box::new(|| incompatibility_identity(&boxes))),
        ("entropy bounds", Box::new(|| entropy_bounds(&boxes))),
        ("determinism implies locality", Box::new(determinism_implies_locality)),
        ("CGLMP uniqueness", Box::new(cglmp_uniqueness)),
        ("LP engine soundness", Box::new(lp_soundness)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", checks.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
