//! Seeded random instance generators.
//!
//! All generators are deterministic in their seed and check the structural
//! properties they promise before returning.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::backdoor::Target;
use crate::cost::Cost;
use crate::error::Error;
use crate::function::{increment, table_len, CostFunction};
use crate::instance::{Instance, PartialAssignment};
use crate::language::{instance_in_language, is_min_closed_crisp, is_submodular_boolean, Language, LanguageFamily};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small exact costs, including a half and infinity.
fn random_cost<R: Rng>(rng: &mut R, infinite_weight: f64) -> Cost {
    if rng.gen_bool(infinite_weight) {
        return Cost::Infinite;
    }
    match rng.gen_range(0..5) {
        0 => Cost::zero(),
        1 => Cost::ratio(1, 2).unwrap(),
        n => Cost::integer(n as u64 - 1),
    }
}

/// Arbitrary table with entries from a small cost set.
pub fn random_function<R: Rng>(rng: &mut R, arity: usize, domain_size: usize) -> CostFunction {
    let len = table_len(domain_size, arity).expect("small table");
    let table = (0..len).map(|_| random_cost(rng, 0.2)).collect();
    CostFunction::new(arity, domain_size, table).expect("valid table")
}

/// Random crisp relation closed under coordinatewise minimum.
pub fn random_min_closed<R: Rng>(rng: &mut R, arity: usize, domain_size: usize) -> CostFunction {
    let len = table_len(domain_size, arity).expect("small table");
    let mut allowed: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.5)).collect();
    let shape = CostFunction::crisp(arity, domain_size, |_| true).expect("valid arity");
    loop {
        let mut changed = false;
        for a in 0..len {
            for b in 0..len {
                if allowed[a] && allowed[b] {
                    let (ta, tb) = (shape.tuple_of(a), shape.tuple_of(b));
                    let meet: Vec<usize> = ta.iter().zip(&tb).map(|(x, y)| *x.min(y)).collect();
                    let m = shape.row_index(&meet);
                    if !allowed[m] {
                        allowed[m] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let f = CostFunction::new(
        arity,
        domain_size,
        allowed.into_iter().map(|ok| if ok { Cost::zero() } else { Cost::Infinite }).collect(),
    )
    .expect("valid table");
    debug_assert!(is_min_closed_crisp(&f));
    f
}

/// Random Boolean submodular function of arity at most 2, by rejection.
pub fn random_submodular<R: Rng>(rng: &mut R, arity: usize) -> CostFunction {
    assert!(arity <= 2, "submodular generator supports arity at most 2");
    loop {
        let f = CostFunction::new(arity, 2, (0..1 << arity).map(|_| random_cost(rng, 0.1)).collect())
            .expect("valid table");
        if is_submodular_boolean(&f) {
            return f;
        }
    }
}

/// Distinct scope of the given size.
fn random_scope<R: Rng>(rng: &mut R, variables: &[usize], size: usize) -> Vec<usize> {
    let mut scope: Vec<usize> = variables.choose_multiple(rng, size).copied().collect();
    scope.shuffle(rng);
    scope
}

/// Crisp min-closed instance over `d` with constraints of arity 1 or 2.
pub fn random_horn(seed: u64, n: usize, m: usize, domain_size: usize) -> Result<Instance, Error> {
    check_sizes(n, domain_size)?;
    let mut rng = rng(seed);
    let vars: Vec<usize> = (0..n).collect();
    let mut p = Instance::empty(n, domain_size);
    for _ in 0..m {
        let arity = rng.gen_range(1..=2.min(n));
        let scope = random_scope(&mut rng, &vars, arity);
        p.add(scope, random_min_closed(&mut rng, arity, domain_size))?;
    }
    Ok(p)
}

/// Boolean submodular instance with constraints of arity 1 or 2.
pub fn random_submodular_instance(seed: u64, n: usize, m: usize) -> Result<Instance, Error> {
    check_sizes(n, 2)?;
    let mut rng = rng(seed);
    let vars: Vec<usize> = (0..n).collect();
    let mut p = Instance::empty(n, 2);
    for _ in 0..m {
        let arity = rng.gen_range(1..=2.min(n));
        let scope = random_scope(&mut rng, &vars, arity);
        p.add(scope, random_submodular(&mut rng, arity))?;
    }
    Ok(p)
}

/// Boolean instance whose variables are split into blocks, each block
/// populated by either Horn or submodular constraints.
pub fn random_scattered(seed: u64, n: usize, m: usize) -> Result<Instance, Error> {
    check_sizes(n, 2)?;
    let mut rng = rng(seed);
    let mut vars: Vec<usize> = (0..n).collect();
    vars.shuffle(&mut rng);
    let blocks = rng.gen_range(1..=n.div_ceil(2));
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); blocks];
    for (i, x) in vars.into_iter().enumerate() {
        parts[i % blocks].push(x);
    }
    let horn: Vec<bool> = (0..blocks).map(|_| rng.gen_bool(0.5)).collect();
    let mut p = Instance::empty(n, 2);
    for _ in 0..m {
        let b = rng.gen_range(0..blocks);
        let arity = rng.gen_range(1..=2.min(parts[b].len()));
        let scope = random_scope(&mut rng, &parts[b], arity);
        let f = if horn[b] {
            random_min_closed(&mut rng, arity, 2)
        } else {
            random_submodular(&mut rng, arity)
        };
        p.add(scope, f)?;
    }
    let scattered = crate::backdoor::is_backdoor(&p, &[], &LanguageFamily::horn_and_submodular(2), Target::Scattered)?;
    check(scattered, "random_scattered produced a component outside both languages")?;
    Ok(p)
}

/// Boolean instance mixing Horn, submodular and unconstrained tables of
/// arity up to `max_arity`. Used as a varied corpus for detection.
pub fn random_mixed(seed: u64, n: usize, m: usize, max_arity: usize) -> Result<Instance, Error> {
    check_sizes(n, 2)?;
    let mut rng = rng(seed);
    let vars: Vec<usize> = (0..n).collect();
    let mut p = Instance::empty(n, 2);
    for _ in 0..m {
        let arity = rng.gen_range(1..=max_arity.min(n));
        let scope = random_scope(&mut rng, &vars, arity);
        let f = match rng.gen_range(0..10) {
            0..=3 if arity <= 2 => random_submodular(&mut rng, arity),
            0..=6 => random_min_closed(&mut rng, arity, 2),
            _ => random_function(&mut rng, arity, 2),
        };
        p.add(scope, f)?;
    }
    Ok(p)
}

/// Instance with a planted union backdoor of size `k` over
/// `{min_closed, submodular}`.
///
/// Every constraint contains the whole planted set plus at most two other
/// variables. For each assignment to the planted set a language is picked at
/// random and each constraint's residual table is drawn from it, so the
/// planted set is a backdoor by construction.
pub fn planted_backdoor(seed: u64, n: usize, m: usize, k: usize) -> Result<(Instance, Vec<usize>), Error> {
    check_sizes(n, 2)?;
    if k > n || n - k < 1 {
        return Err(Error::Generator(format!(
            "planted backdoor of size {k} needs more than {k} variables, got {n}"
        )));
    }
    let mut rng = rng(seed);
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(&mut rng);
    let mut planted: Vec<usize> = all[..k].to_vec();
    planted.sort_unstable();
    let rest: Vec<usize> = all[k..].to_vec();
    let selector: Vec<bool> = (0..1usize << k).map(|_| rng.gen_bool(0.5)).collect();

    let mut p = Instance::empty(n, 2);
    for _ in 0..m {
        let extra = rng.gen_range(1..=2.min(rest.len()));
        let residual_scope = random_scope(&mut rng, &rest, extra);
        let residual: Vec<CostFunction> = selector
            .iter()
            .map(|&horn| {
                if horn {
                    random_min_closed(&mut rng, extra, 2)
                } else {
                    random_submodular(&mut rng, extra)
                }
            })
            .collect();
        let arity = k + extra;
        let table: Vec<Cost> = (0..1usize << arity)
            .map(|row| {
                let tau = row >> extra;
                residual[tau].entry(row & ((1 << extra) - 1)).clone()
            })
            .collect();
        let mut scope = planted.clone();
        scope.extend(residual_scope);
        p.add(scope, CostFunction::new(arity, 2, table)?)?;
    }
    check(
        crate::backdoor::is_backdoor(&p, &planted, &LanguageFamily::horn_and_submodular(2), Target::Union)?,
        "planted set is not a backdoor",
    )?;
    Ok((p, planted))
}

/// Cut-vertex instance: variable 0 joins two chains `V1` and `V2` through
/// ternary constraints `(x, u, v)`.
///
/// On `V1`, `x = 0` leaves crisp Horn relations and `x = 1` leaves
/// submodular functions; `V2` has the roles swapped. The first constraint on
/// each side uses NAND and the cut function `(0, 1, 1, 0)`, so no single
/// language ever covers both sides and `{x}` is only a scattered backdoor.
pub fn cut_vertex(seed: u64, n1: usize, n2: usize) -> Result<Instance, Error> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::Generator(format!(
            "cut_vertex needs at least two variables per side, got {n1} and {n2}"
        )));
    }
    let mut rng = rng(seed);
    let nand = CostFunction::relation(2, 2, &[vec![0, 0], vec![0, 1], vec![1, 0]])?;
    let cut = CostFunction::new(2, 2, vec![Cost::zero(), Cost::integer(1), Cost::integer(1), Cost::zero()])?;
    let side1: Vec<usize> = (1..=n1).collect();
    let side2: Vec<usize> = (n1 + 1..=n1 + n2).collect();
    let mut p = Instance::empty(1 + n1 + n2, 2);
    for (side, horn_at) in [(&side1, 0usize), (&side2, 1usize)] {
        for (j, pair) in side.windows(2).enumerate() {
            let (horn, sub) = if j == 0 {
                (nand.clone(), cut.clone())
            } else {
                (random_min_closed(&mut rng, 2, 2), random_submodular(&mut rng, 2))
            };
            let halves = if horn_at == 0 { [horn, sub] } else { [sub, horn] };
            let table: Vec<Cost> = (0..8).map(|row| halves[row >> 2].entry(row & 3).clone()).collect();
            p.add(vec![0, pair[0], pair[1]], CostFunction::new(3, 2, table)?)?;
        }
    }
    verify_cut_vertex(&p, &side1, &side2)?;
    Ok(p)
}

fn verify_cut_vertex(p: &Instance, side1: &[usize], side2: &[usize]) -> Result<(), Error> {
    let horn = Language::min_closed_crisp(2, 2);
    let sub = Language::submodular_boolean(2);
    for value in 0..2 {
        let tau: PartialAssignment = [(0, value)].into_iter().collect();
        let reduced = p.apply_assignment(&tau)?;
        let dec = reduced.connected_components();
        for comp in &dec.components {
            let in1 = comp.variables.iter().any(|x| side1.contains(x));
            let in2 = comp.variables.iter().any(|x| side2.contains(x));
            check(!(in1 && in2), "x does not disconnect the two sides")?;
        }
        for (side, horn_value) in [(side1, 0), (side2, 1)] {
            let vars: Vec<usize> = side.to_vec();
            let part = Instance::with_variables(
                vars.clone(),
                2,
                reduced
                    .constraints()
                    .iter()
                    .filter(|c| c.scope().iter().all(|x| vars.contains(x)))
                    .cloned()
                    .collect(),
            )?;
            let (want, other) = if value == horn_value { (&horn, &sub) } else { (&sub, &horn) };
            check(instance_in_language(&part, want)?, "side outside its assigned language")?;
            check(!instance_in_language(&part, other)?, "side also inside the other language")?;
        }
    }
    Ok(())
}

fn check(ok: bool, message: &str) -> Result<(), Error> {
    if ok {
        Ok(())
    } else {
        Err(Error::Generator(message.to_string()))
    }
}

fn check_sizes(n: usize, domain_size: usize) -> Result<(), Error> {
    if n == 0 {
        return Err(Error::Generator("at least one variable is required".into()));
    }
    if domain_size == 0 {
        return Err(Error::EmptyDomain);
    }
    Ok(())
}

/// Every tuple of a table in row order; small helper for oracles.
pub fn all_tuples(arity: usize, domain_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut t = vec![0; arity];
    loop {
        out.push(t.clone());
        if !increment(&mut t, domain_size) {
            return out;
        }
    }
}
