//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! All comparisons are exact rational equality; the tolerance is zero.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;

use vcsp_backdoor::backdoor::{branching_node_bound, minimal_backdoors};
use vcsp_backdoor::function::increment;
use vcsp_backdoor::generators::{self, rng};
use vcsp_backdoor::transform::{finitize, pipeline_solve, vcsp_to_csp, InfinityEncoding, NoReason, PipelineOutcome};
use vcsp_backdoor::{
    brute_force_solve, detect_backdoor_branching, detect_backdoor_exhaustive, instance_in_language, is_backdoor,
    solve_min_closed, solve_submodular_boolean, solve_with_backdoor, Cost, CostFunction, Instance, Language,
    LanguageFamily, PartialAssignment, Target,
};

use rand::Rng;

/// Exact equality; costs are rationals.
const COST_TOLERANCE: u32 = 0;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: &[String], detail: String) -> Outcome {
    let shown: Vec<&String> = failures.iter().take(3).collect();
    Outcome {
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            detail
        } else {
            format!("{detail}; {} failures, first: {shown:?}", failures.len())
        },
    }
}

/// Independent minimum: enumerate every assignment and evaluate.
fn enumerate_minimum(p: &Instance) -> Cost {
    let vars = p.variables().to_vec();
    let mut values = vec![0; vars.len()];
    let mut best = Cost::Infinite;
    loop {
        let a: PartialAssignment = vars.iter().copied().zip(values.iter().copied()).collect();
        let c = p.evaluate(&a).unwrap();
        if c < best {
            best = c;
        }
        if !increment(&mut values, p.domain_size()) {
            return best;
        }
    }
}

/// Independent backdoor check straight from the definition.
fn naive_is_backdoor(p: &Instance, x: &[usize], fam: &LanguageFamily, target: Target) -> bool {
    let in_some = |q: &Instance| fam.languages().iter().any(|l| instance_in_language(q, l).unwrap());
    let mut values = vec![0; x.len()];
    loop {
        let tau: PartialAssignment = x.iter().copied().zip(values.iter().copied()).collect();
        let reduced = p.apply_assignment(&tau).unwrap();
        let ok = match target {
            Target::Union => in_some(&reduced),
            Target::Scattered => reduced
                .connected_components()
                .components
                .iter()
                .all(|c| in_some(&reduced.subinstance(c))),
        };
        if !ok {
            return false;
        }
        if !increment(&mut values, p.domain_size()) {
            return true;
        }
    }
}

fn subsets_up_to(vars: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::<usize>::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l| vars.iter().position(|&v| v == l).unwrap() + 1);
            for &v in &vars[start..] {
                let mut t = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Minimal backdoors of size at most `k`, by the definition.
fn naive_minimal(p: &Instance, k: usize, fam: &LanguageFamily, target: Target) -> Vec<Vec<usize>> {
    let sets = subsets_up_to(p.variables(), k.min(p.num_variables()));
    let status: HashMap<Vec<usize>, bool> = sets
        .par_iter()
        .map(|s| (s.clone(), naive_is_backdoor(p, s, fam, target)))
        .collect();
    let mut minimal: Vec<Vec<usize>> = sets
        .into_iter()
        .filter(|s| {
            status[s]
                && (0..(1u64 << s.len()) - 1).all(|mask| {
                    let sub: Vec<usize> = (0..s.len()).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
                    !status[&sub]
                })
        })
        .collect();
    minimal.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    minimal
}

fn criterion_1() -> Outcome {
    let per_class = 500u64;
    let failures: Vec<String> = (0..2 * per_class)
        .into_par_iter()
        .filter_map(|i| {
            let mut r = rng(i);
            let n = r.gen_range(1..=10);
            let m = r.gen_range(0..=15);
            let (p, solved) = if i < per_class {
                let p = generators::random_horn(i, n, m, 2).unwrap();
                let s = solve_min_closed(&p).unwrap();
                (p, s)
            } else {
                let p = generators::random_submodular_instance(i, n, m).unwrap();
                let s = solve_submodular_boolean(&p).unwrap();
                (p, s)
            };
            let oracle = brute_force_solve(&p).unwrap().cost;
            let independent = enumerate_minimum(&p);
            let consistent = p.evaluate(&solved.assignment).unwrap() == solved.cost;
            (solved.cost != oracle || oracle != independent || !consistent)
                .then(|| format!("instance {i}: solver {} oracle {oracle} enumeration {independent}", solved.cost))
        })
        .collect();
    outcome(
        &failures,
        format!("{per_class} min-closed + {per_class} submodular instances, tolerance {COST_TOLERANCE}"),
    )
}

fn criterion_2() -> Outcome {
    let fam = LanguageFamily::horn_and_submodular(2);
    let failures: Vec<String> = (0..200u64)
        .into_par_iter()
        .filter_map(|i| {
            let mut r = rng(10_000 + i);
            let k = (i % 4) as usize;
            let n = r.gen_range(k + 1..=10);
            let m = r.gen_range(1..=8);
            let (p, x) = generators::planted_backdoor(i, n, m, k).unwrap();
            let s = solve_with_backdoor(&p, &x, &fam, Target::Union).unwrap();
            let oracle = brute_force_solve(&p).unwrap().cost;
            let independent = enumerate_minimum(&p);
            let expected_count = 1u64 << x.len();
            (s.solution.cost != oracle || oracle != independent || s.assignments_enumerated != expected_count)
                .then(|| format!("instance {i}: {} vs {oracle}, count {}", s.solution.cost, s.assignments_enumerated))
        })
        .collect();
    outcome(&failures, "200 planted instances, |X| <= 3".into())
}

fn criterion_3() -> Outcome {
    let fam = LanguageFamily::horn_and_submodular(2);
    let results: Vec<Result<bool, String>> = (0..300u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(20_000 + i);
            let n = r.gen_range(2..=8);
            let m = r.gen_range(1..=6);
            let k = (i % 3) as usize;
            let p = generators::random_mixed(i, n, m, 3).unwrap();
            let (branching, stats) = detect_backdoor_branching(&p, k, &fam).unwrap();
            let (exhaustive, _) = detect_backdoor_exhaustive(&p, k, &fam, Target::Union).unwrap();
            let bound = branching_node_bound(fam.len(), fam.max_arity(), k);
            if branching.is_some() != exhaustive.is_some() {
                return Err(format!("instance {i}: branching {branching:?} exhaustive {exhaustive:?}"));
            }
            for set in branching.iter().chain(&exhaustive) {
                if set.len() > k || !naive_is_backdoor(&p, set, &fam, Target::Union) {
                    return Err(format!("instance {i}: {set:?} is not a backdoor of size <= {k}"));
                }
            }
            if u128::from(stats.nodes_visited) > bound || stats.nodes_visited == 0 {
                return Err(format!("instance {i}: {} nodes, bound {bound}", stats.nodes_visited));
            }
            Ok(branching.is_some())
        })
        .collect();
    let yes = results.iter().filter(|r| matches!(r, Ok(true))).count();
    let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    outcome(&failures, format!("300 instances ({yes} with a backdoor, {} without)", 300 - yes))
}

/// Corpus shared by the finitization and crisp-encoding checks.
fn transform_corpus() -> Vec<(u64, Instance, usize)> {
    (0..100u64)
        .map(|i| {
            let mut r = rng(30_000 + i);
            let n = r.gen_range(3..=6);
            let m = r.gen_range(1..=5);
            let k = 1 + (i % 2) as usize;
            let max_arity = if i % 5 == 0 { 2 + k } else { 3 };
            (i, generators::random_mixed(40_000 + i, n, m, max_arity).unwrap(), k)
        })
        .collect()
}

fn criterion_4(corpus: &[(u64, Instance, usize)]) -> Outcome {
    let fam = LanguageFamily::horn_and_submodular(2);
    let mut compared = 0usize;
    let mut nonempty = 0usize;
    let mut failures = Vec::new();
    for (i, p, k) in corpus {
        let Some(f) = finitize(p, &fam, *k).unwrap() else {
            failures.push(format!("instance {i}: unexpected arity gate"));
            continue;
        };
        let original = naive_minimal(p, *k, &fam, Target::Scattered);
        let finite = naive_minimal(&f.instance, *k, &f.family, Target::Scattered);
        let library = minimal_backdoors(&f.instance, *k, &f.family, Target::Scattered).unwrap();
        compared += subsets_up_to(p.variables(), *k).len();
        nonempty += usize::from(!original.is_empty());
        if original != finite || finite != library {
            failures.push(format!("instance {i}: P {original:?} P' {finite:?} library {library:?}"));
        }
        let size = f.family.languages().iter().map(|l| l.functions().unwrap().len()).max().unwrap();
        if size as u128 > f.language_size_bound() {
            failures.push(format!("instance {i}: language of size {size} above bound"));
        }
    }
    outcome(
        &failures,
        format!("{} instances, {compared} candidate sets, {nonempty} with a minimal backdoor", corpus.len()),
    )
}

fn criterion_5(corpus: &[(u64, Instance, usize)]) -> Outcome {
    let fam = LanguageFamily::horn_and_submodular(2);
    let results: Vec<Vec<String>> = corpus
        .par_iter()
        .map(|(i, p, k)| {
            let mut failures = Vec::new();
            let f = finitize(p, &fam, *k).unwrap().expect("corpus passes the arity gate");
            let valued = naive_minimal(&f.instance, *k, &f.family, Target::Scattered);
            for encoding in [InfinityEncoding::Marker, InfinityEncoding::Epsilon] {
                let csp = vcsp_to_csp(&f.instance, &f.family, *k, encoding).unwrap();
                let crisp = minimal_backdoors(&csp.instance, *k, &csp.family, Target::Scattered).unwrap();
                if valued != crisp {
                    failures.push(format!("instance {i} {encoding:?}: P' {valued:?} P'' {crisp:?}"));
                }
                if let Some(bad) = crisp.iter().find(|s| s.iter().any(|&x| csp.is_fresh(x))) {
                    failures.push(format!("instance {i} {encoding:?}: fresh variable in {bad:?}"));
                }
                if !csp.instance.constraints().iter().all(|c| c.function().is_crisp()) {
                    failures.push(format!("instance {i} {encoding:?}: non-crisp constraint"));
                }
            }
            failures
        })
        .collect();
    let failures: Vec<String> = results.into_iter().flatten().collect();
    outcome(&failures, format!("{} instances, both infinity encodings", corpus.len()))
}

fn criterion_6() -> Outcome {
    let fam = LanguageFamily::horn_and_submodular(2);
    let horn = LanguageFamily::new(vec![Language::min_closed_crisp(2, 2)]).unwrap();
    let sub = LanguageFamily::new(vec![Language::submodular_boolean(2)]).unwrap();
    let failures: Vec<String> = (0..24u64)
        .into_par_iter()
        .filter_map(|i| {
            let (n1, n2) = (2 + (i % 3) as usize, 2 + (i / 3 % 3) as usize);
            let p = generators::cut_vertex(i, n1, n2).unwrap();
            if !is_backdoor(&p, &[0], &fam, Target::Scattered).unwrap() {
                return Some(format!("instance {i}: x is not a scattered backdoor"));
            }
            for single in [&horn, &sub] {
                let (found, _) = detect_backdoor_exhaustive(&p, 1, single, Target::Union).unwrap();
                if found.is_some() {
                    return Some(format!("instance {i}: size-1 backdoor {found:?} into a single class"));
                }
            }
            let oracle = brute_force_solve(&p).unwrap().cost;
            match pipeline_solve(&p, &fam, 1).unwrap() {
                PipelineOutcome::Solved { backdoor, solution, .. } => (backdoor != vec![0] || solution.cost != oracle)
                    .then(|| format!("instance {i}: backdoor {backdoor:?} cost {} vs {oracle}", solution.cost)),
                other => Some(format!("instance {i}: pipeline returned {other:?}")),
            }
        })
        .collect();
    outcome(&failures, "24 cut-vertex instances, sides of 2 to 4 variables".into())
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    let mut r = rng(50_000);
    let languages = [
        (Language::min_closed_crisp(2, 3), 2usize),
        (Language::min_closed_crisp(3, 3), 3),
        (Language::submodular_boolean(2), 2),
    ];
    for (lang, d) in &languages {
        for j in 0..1000 {
            let arity = r.gen_range(1..=lang.arity_bound());
            let f = match lang.name() {
                "submodular" => generators::random_submodular(&mut r, arity),
                _ => generators::random_min_closed(&mut r, arity, *d),
            };
            let fixed: Vec<Option<usize>> = (0..arity).map(|_| r.gen_bool(0.5).then(|| r.gen_range(0..*d))).collect();
            let g = f.restrict(&fixed).unwrap();
            if !lang.contains(&f).unwrap() || !lang.contains(&g).unwrap() {
                failures.push(format!("{} member {j}: restriction by {fixed:?} left the language", lang.name()));
            }
        }
    }
    for j in 0..100u64 {
        let mut r = rng(60_000 + j);
        let d = r.gen_range(2..=3);
        let fs: Vec<CostFunction> = (0..r.gen_range(1..=4))
            .map(|_| {
                let arity = r.gen_range(0..=3);
                generators::random_function(&mut r, arity, d)
            })
            .collect();
        let lang = Language::finite("random", d, fs.clone()).unwrap();
        let once = lang.closure_under_partial_assignments().unwrap();
        let twice = once.closure_under_partial_assignments().unwrap();
        let members = once.functions().unwrap();
        let contains_input = fs.iter().all(|f| members.contains(f));
        let closed = members
            .iter()
            .all(|f| f.restrictions().all(|(_, _, g)| members.contains(&g)));
        if once != twice || !contains_input || !closed {
            failures.push(format!("finite language {j}: closure not an idempotent closed superset"));
        }
    }
    outcome(&failures, "3000 built-in members, 100 finite languages".into())
}

fn criterion_8() -> Outcome {
    let fam = LanguageFamily::horn_and_submodular(2);
    let q = fam.max_arity();
    let mut failures = Vec::new();
    for i in 0..60u64 {
        let mut r = rng(70_000 + i);
        let k = (i % 3) as usize;
        let extra = r.gen_range(0..=1);
        let arity = q + k + 1 + extra;
        let n = arity + r.gen_range(0..=2);
        let mut p = generators::random_scattered(i, n, 4).unwrap();
        let scope: Vec<usize> = (0..arity).collect();
        p.add(scope, generators::random_function(&mut r, arity, 2)).unwrap();
        if finitize(&p, &fam, k).unwrap().is_some() {
            failures.push(format!("instance {i}: finitize accepted arity {arity} with k = {k}"));
        }
        match pipeline_solve(&p, &fam, k).unwrap() {
            PipelineOutcome::No {
                reason: NoReason::ArityGate,
                ..
            } => {}
            other => failures.push(format!("instance {i}: pipeline returned {other:?}")),
        }
        // one below the gate passes it
        let mut below = generators::random_scattered(i, q + k, 2).unwrap();
        below.add((0..q + k).collect(), generators::random_function(&mut r, q + k, 2)).unwrap();
        if finitize(&below, &fam, k).unwrap().is_none() {
            failures.push(format!("instance {i}: arity {} rejected with k = {k}", q + k));
        }
    }
    outcome(&failures, "60 instances with arity q + k + 1 or more".into())
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let corpus = transform_corpus();
    let criteria: Vec<Criterion<'_>> = vec![
        ("1 solver equivalence with brute force", Box::new(criterion_1)),
        ("2 backdoor evaluation equals brute force", Box::new(criterion_2)),
        ("3 branching detection vs exhaustive", Box::new(criterion_3)),
        ("4 finitization preserves minimal backdoors", Box::new(|| criterion_4(&corpus))),
        ("5 crisp encoding preserves minimal backdoors", Box::new(|| criterion_5(&corpus))),
        ("6 cut-vertex example", Box::new(criterion_6)),
        ("7 closure under partial assignments", Box::new(criterion_7)),
        ("8 arity gate", Box::new(criterion_8)),
    ];
    let mut all = true;
    for (name, run) in &criteria {
        let start = Instant::now();
        let o = run();
        all &= o.passed;
        println!(
            "acceptance {} criterion {name}: {} ({:.1}s)",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
