//! The concrete machines for the promise family `A^N`, `N = 2^k(2l+1)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::automata::{Mcqfa, PromiseSpec, UnaryDfa};
use crate::exact::RotationMachine;
use crate::oracle::{analytic_min_states, min_dfa_search, MinimalStates, BRUTE_FORCE_CUTOFF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FamilyParams {
    pub k: u32,
    pub l: u64,
}

impl FamilyParams {
    pub fn new(k: u32, l: u64) -> Self {
        FamilyParams { k, l }
    }

    /// `N = 2^k (2l + 1)`. Panics on overflow.
    pub fn period_n(&self) -> u64 {
        self.checked_period_n().expect("N overflows u64")
    }

    pub fn checked_period_n(&self) -> Option<u64> {
        1u64.checked_shl(self.k)
            .filter(|p| p.trailing_zeros() == self.k)
            .and_then(|p| p.checked_mul(self.l.checked_mul(2)?.checked_add(1)?))
            .filter(|n| n.checked_mul(4).is_some())
    }

    pub fn promise(&self) -> PromiseSpec {
        PromiseSpec::new(self.period_n()).expect("N >= 1")
    }

    pub fn rotation(&self) -> RotationMachine {
        RotationMachine::new(2 * self.period_n()).expect("2N >= 2")
    }
}

/// Two-state machine rotating by `π/2N` per letter, plus its exact twin.
pub fn build_mcqfa(params: FamilyParams) -> (Mcqfa, RotationMachine) {
    let rotation = params.rotation();
    (rotation.to_mcqfa(), rotation)
}

/// Pure cycle of `2^{k+1}` states accepting only state 0.
///
/// The state after `a^m` is `m mod 2^{k+1}`. Every Yes length is a multiple
/// of `2N` and so lands on 0; every No length is `≡ 2^k` and never does.
pub fn build_min_dfa(params: FamilyParams) -> UnaryDfa {
    let t = 2usize << params.k;
    UnaryDfa::cycle(t, BTreeSet::from([0])).expect("cycle length positive")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    BruteForce,
    Analytic,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::BruteForce => "brute-force",
            Provenance::Analytic => "analytic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub k: u32,
    #[serde(rename = "N")]
    pub n: u64,
    pub qfa_states: usize,
    pub dfa_states: u64,
    pub provenance: Provenance,
}

/// One row per `k` in `1..=k_max` for `N = 2^k`. Rows whose minimal DFA
/// fits under the brute-force cutoff come from an exhaustive search; the
/// rest use the closed form.
pub fn family_table(k_max: u32) -> Vec<TableRow> {
    (1..=k_max)
        .map(|k| {
            let n = 1u64 << k;
            let analytic = analytic_min_states(n);
            let (dfa_states, provenance) = if analytic <= BRUTE_FORCE_CUTOFF as u64 {
                let report = min_dfa_search(n, BRUTE_FORCE_CUTOFF, None)
                    .expect("cutoff is within the search limit");
                match report.minimal_states {
                    MinimalStates::Found(s) => (s as u64, Provenance::BruteForce),
                    MinimalStates::NotFoundWithin(_) => (analytic, Provenance::Analytic),
                }
            } else {
                (analytic, Provenance::Analytic)
            };
            TableRow {
                k,
                n,
                qfa_states: 2,
                dfa_states,
                provenance,
            }
        })
        .collect()
}
