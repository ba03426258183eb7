use proptest::prelude::*;

use vcsp_backdoor::backdoor::{detect_backdoor_branching, detect_backdoor_exhaustive_with, is_backdoor};
use vcsp_backdoor::{
    brute_force_solve, detect_backdoor_exhaustive, generators, solve_with_backdoor, Budget, Exec, LanguageFamily,
    Target,
};

fn family() -> LanguageFamily {
    LanguageFamily::horn_and_submodular(2)
}

fn target(scattered: bool) -> Target {
    if scattered {
        Target::Scattered
    } else {
        Target::Union
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn supersets_of_backdoors_are_backdoors(seed in any::<u64>(), scattered in any::<bool>()) {
        let p = generators::random_mixed(seed, 6, 6, 2).unwrap();
        let fam = family();
        let t = target(scattered);
        if let (Some(x), _) = detect_backdoor_exhaustive(&p, 3, &fam, t).unwrap() {
            for y in p.variables().iter().copied().filter(|y| !x.contains(y)) {
                let mut bigger = x.clone();
                bigger.push(y);
                prop_assert!(is_backdoor(&p, &bigger, &fam, t).unwrap());
            }
        }
    }

    #[test]
    fn union_backdoors_are_scattered_backdoors(seed in any::<u64>()) {
        let p = generators::random_mixed(seed, 6, 7, 3).unwrap();
        let fam = family();
        let (union, _) = detect_backdoor_exhaustive(&p, 3, &fam, Target::Union).unwrap();
        let (scattered, _) = detect_backdoor_exhaustive(&p, 3, &fam, Target::Scattered).unwrap();
        if let Some(x) = union {
            prop_assert!(is_backdoor(&p, &x, &fam, Target::Scattered).unwrap());
            prop_assert!(scattered.unwrap().len() <= x.len());
        }
    }

    #[test]
    fn exhaustive_finds_a_minimum(seed in any::<u64>(), scattered in any::<bool>()) {
        let p = generators::random_mixed(seed, 6, 6, 3).unwrap();
        let fam = family();
        let t = target(scattered);
        if let (Some(x), _) = detect_backdoor_exhaustive(&p, 4, &fam, t).unwrap() {
            prop_assert!(is_backdoor(&p, &x, &fam, t).unwrap());
            if !x.is_empty() {
                prop_assert_eq!(detect_backdoor_exhaustive(&p, x.len() - 1, &fam, t).unwrap().0, None);
            }
        }
    }

    #[test]
    fn branching_agrees_with_exhaustive(seed in any::<u64>(), k in 0usize..3) {
        let p = generators::random_mixed(seed, 6, 6, 3).unwrap();
        let fam = family();
        let (b, _) = detect_backdoor_branching(&p, k, &fam).unwrap();
        let (e, _) = detect_backdoor_exhaustive(&p, k, &fam, Target::Union).unwrap();
        prop_assert_eq!(b.is_some(), e.is_some());
        if let Some(x) = b {
            prop_assert!(x.len() <= k);
            prop_assert!(is_backdoor(&p, &x, &fam, Target::Union).unwrap());
        }
    }

    #[test]
    fn exhaustive_is_deterministic_across_modes(seed in any::<u64>()) {
        let p = generators::random_mixed(seed, 7, 8, 3).unwrap();
        let fam = family();
        let run = |exec| detect_backdoor_exhaustive_with(&p, 3, &fam, Target::Scattered, Budget::default(), exec).unwrap();
        let (seq, seq_stats) = run(Exec::Sequential);
        let (par, par_stats) = run(Exec::Parallel);
        prop_assert_eq!(seq, par);
        prop_assert_eq!(seq_stats.nodes_visited, par_stats.nodes_visited);
        prop_assert!(seq_stats.assignments_checked <= par_stats.assignments_checked);
    }

    #[test]
    fn solving_through_a_backdoor_is_optimal(seed in any::<u64>(), scattered in any::<bool>()) {
        let p = generators::random_mixed(seed, 6, 7, 2).unwrap();
        let fam = family();
        let t = target(scattered);
        if let (Some(x), _) = detect_backdoor_exhaustive(&p, 3, &fam, t).unwrap() {
            let solved = solve_with_backdoor(&p, &x, &fam, t).unwrap();
            prop_assert_eq!(&solved.solution.cost, &brute_force_solve(&p).unwrap().cost);
            prop_assert_eq!(p.evaluate(&solved.solution.assignment).unwrap(), solved.solution.cost);
            prop_assert_eq!(solved.assignments_enumerated, 2u64.pow(x.len() as u32));
        }
    }
}
