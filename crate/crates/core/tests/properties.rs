use std::collections::BTreeSet;

use proptest::prelude::*;
use qfa_succinct::automata::{Matrix, Mcqfa};
use qfa_succinct::exact::{cross_check_float, exact_run, OutcomeKind, RotationMachine};
use qfa_succinct::oracle::{
    cycle_solvable, min_dfa_search, residue_sets_disjoint, valuation_solvable, MinimalStates,
};
use qfa_succinct::{
    check_unitary, dfa_solves_exactly, run_mcqfa, run_unary_dfa, PromiseSpec, UnaryDfa,
};

/// Every ρ-shaped DFA with at most `max_states` states.
fn all_dfas(max_states: usize) -> Vec<UnaryDfa> {
    let mut out = Vec::new();
    for size in 1..=max_states {
        for tail in 0..size {
            for mask in 0u32..1 << size {
                let acc: BTreeSet<usize> = (0..size).filter(|b| mask & (1 << b) != 0).collect();
                out.push(UnaryDfa::new(tail, size - tail, acc).unwrap());
            }
        }
    }
    out
}

/// Walks the explicit transition table one letter at a time.
fn stepwise_accepts(dfa: &UnaryDfa, m: u64) -> bool {
    let last = dfa.num_states() - 1;
    let mut state = 0;
    for _ in 0..m {
        state = if state == last {
            dfa.tail_len()
        } else {
            state + 1
        };
    }
    dfa.accepting().contains(&state)
}

#[test]
fn closed_form_dfa_run_matches_stepping() {
    for dfa in all_dfas(8) {
        for m in 0..=100 {
            assert_eq!(
                run_unary_dfa(&dfa, m),
                stepwise_accepts(&dfa, m),
                "{dfa} m={m}"
            );
        }
    }
}

#[test]
fn classify_is_periodic() {
    for n in 1..=64 {
        let spec = PromiseSpec::new(n).unwrap();
        for m in 0..=1000 {
            assert_eq!(spec.classify(m), spec.classify(m + 2 * n));
        }
    }
}

#[test]
fn decision_bound_is_sound() {
    let dfas = all_dfas(8);
    for n in 1..=12 {
        let spec = PromiseSpec::new(n).unwrap();
        for dfa in &dfas {
            let long = 4 * dfa.decision_bound(spec);
            let extended = (0..long).all(|m| match spec.classify(m) {
                qfa_succinct::Classification::Yes => stepwise_accepts(dfa, m),
                qfa_succinct::Classification::No => !stepwise_accepts(dfa, m),
                qfa_succinct::Classification::OutsidePromise => true,
            });
            assert_eq!(dfa_solves_exactly(dfa, spec), extended, "{dfa} n={n}");
        }
    }
}

#[test]
fn search_counts_match_direct_enumeration() {
    let dfas = all_dfas(8);
    for n in [1, 2, 3, 4, 6] {
        let spec = PromiseSpec::new(n).unwrap();
        let report = min_dfa_search(n, 8, Some(2)).unwrap();
        for (&size, stats) in &report.per_size {
            let direct = dfas
                .iter()
                .filter(|d| d.num_states() == size && dfa_solves_exactly(d, spec))
                .count() as u64;
            assert_eq!(stats.solving, direct, "n={n} size={size}");
        }
    }
}

#[test]
fn gcd_route_matches_residue_route() {
    for t in 1..=64 {
        for n in 1..=64 {
            let v = cycle_solvable(t, n);
            assert_eq!(v.solvable, residue_sets_disjoint(t, n), "t={t} n={n}");
            assert_eq!(v.solvable, valuation_solvable(t, n), "t={t} n={n}");
        }
    }
}

#[test]
fn tail_never_helps() {
    for n in 1..=12 {
        let report = min_dfa_search(n, 16, None).unwrap();
        let w = report.witness.expect("found within 16");
        assert!(dfa_solves_exactly(&w, PromiseSpec::new(n).unwrap()));
        assert_eq!(w.tail_len(), 0, "n={n}: minimal witness uses a tail");
        let MinimalStates::Found(size) = report.minimal_states else {
            unreachable!()
        };
        for smaller in 1..size {
            assert_eq!(report.per_size[&smaller].solving, 0);
        }
    }
}

#[test]
fn powers_of_two_need_2n_states() {
    for k in 0..=3 {
        let n = 1u64 << k;
        let report = min_dfa_search(n, 16, None).unwrap();
        assert_eq!(report.minimal_states, MinimalStates::Found(2 * n as usize));
    }
}

#[test]
fn exact_outcome_depends_only_on_residue() {
    for d in 1..=64u64 {
        let machine = RotationMachine::new(d).unwrap();
        for m in 0..=10 * 2 * d {
            assert_eq!(
                exact_run(machine, m).kind,
                exact_run(machine, m % (2 * d)).kind
            );
        }
    }
}

#[test]
fn exact_outcome_matches_promise_for_family() {
    for k in 0..=10 {
        let n = 1u64 << k;
        let machine = RotationMachine::new(2 * n).unwrap();
        for m in 0..=16 * n {
            let kind = exact_run(machine, m).kind;
            assert_eq!(kind == OutcomeKind::ExactlyAccept, m % (2 * n) == 0);
            assert_eq!(kind == OutcomeKind::ExactlyReject, m % (2 * n) == n);
        }
    }
}

fn orthogonal(dim: usize, angles: &[f64], flip: bool) -> Matrix {
    // product of Givens rotations, optionally times a reflection
    let mut rows: Vec<Vec<f64>> = Matrix::identity(dim).rows();
    let mut idx = 0;
    for i in 0..dim {
        for j in i + 1..dim {
            let (s, c) = angles[idx % angles.len()].sin_cos();
            idx += 1;
            for row in rows.iter_mut() {
                let (a, b) = (row[i], row[j]);
                row[i] = c * a - s * b;
                row[j] = s * a + c * b;
            }
        }
    }
    if flip {
        for row in rows.iter_mut() {
            row[0] = -row[0];
        }
    }
    Matrix::from_rows(&rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitary_evolution_preserves_norm(
        dim in 1usize..4,
        angles in prop::collection::vec(-3.2f64..3.2, 3),
        flips in prop::array::uniform3(any::<bool>()),
        start in 0usize..4,
        m in 0u64..=10_000,
    ) {
        let l = orthogonal(dim, &angles, flips[0]);
        let a = orthogonal(dim, &angles[1..], flips[1]);
        let r = orthogonal(dim, &angles[2..], flips[2]);
        prop_assume!(check_unitary(&a, 1e-9));
        let q = Mcqfa::new(l, a, r, start % dim, BTreeSet::from([0])).unwrap();
        let res = run_mcqfa(&q, m);
        prop_assert!((res.norm() - 1.0).abs() <= 1e-6);
        prop_assert!((res.accept_probability + res.reject_probability() - 1.0).abs() <= 1e-9);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&res.accept_probability));
    }

    #[test]
    fn float_and_exact_agree(d in 1u64..=64, m in 0u64..=1000) {
        prop_assert!(cross_check_float(RotationMachine::new(d).unwrap(), m, 1e-9));
    }
}
