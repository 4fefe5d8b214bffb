//! Independent checks of the classical lower bound.
//!
//! Two routes reach the minimal DFA size for `A^N`:
//!
//! * [`cycle_solvable`] decides whether a cycle of length `t` can separate the
//!   Yes residues `{i·2N mod t}` from the No residues `{N + i·2N mod t}`. With
//!   `d = gcd(2N, t)` the Yes residues are exactly the multiples of `d`, so
//!   the cycle works iff `d ∤ N`, i.e. iff `2^{v₂(N)+1}` divides `t`.
//! * [`min_dfa_search`] enumerates every unary DFA (up to isomorphism of the
//!   reachable part) by size and stops at the first size with a solver.
//!
//! [`oracle_vs_analytic`] requires the two to agree.

use std::collections::BTreeMap;
use std::time::Instant;

use num_integer::Integer;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::automata::{dfa_solves_exactly, Classification, PromiseSpec, UnaryDfa};

/// Largest machine size the exhaustive search accepts.
pub const MAX_SEARCH_STATES: usize = 20;

/// Table rows are brute-forced only when the expected minimum is at most this.
pub const BRUTE_FORCE_CUTOFF: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("promise period must be positive")]
    ZeroPeriod,
    #[error("max_states {0} exceeds the exhaustive search limit of {MAX_SEARCH_STATES}")]
    BoundTooLarge(usize),
    #[error("failed to build worker pool: {0}")]
    ThreadPool(String),
    #[error("search witness {0} fails the direct exactness check")]
    WitnessRejected(UnaryDfa),
    #[error("n={n}: no solving DFA within {max_states} states")]
    NotFound { n: u64, max_states: usize },
    #[error("n={n}: search found {found} states, closed form says {expected}")]
    Mismatch { n: u64, found: usize, expected: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleVerdict {
    pub t: u64,
    pub n: u64,
    pub d: u64,
    pub solvable: bool,
}

impl CycleVerdict {
    /// `t / d`: the number of distinct Yes residues on the cycle.
    pub fn coset_size(&self) -> u64 {
        self.t / self.d
    }
}

/// Gcd route: with `d = gcd(2n, t)`, solvable iff `n mod d ≠ 0`.
pub fn cycle_solvable(t: u64, n: u64) -> CycleVerdict {
    assert!(t >= 1 && n >= 1, "cycle length and period must be positive");
    let d = (2 * n).gcd(&t);
    CycleVerdict {
        t,
        n,
        d,
        solvable: n % d != 0,
    }
}

/// Residue route: enumerates both residue sets on `Z_t` and tests them for
/// disjointness.
pub fn residue_sets_disjoint(t: u64, n: u64) -> bool {
    assert!(t >= 1 && n >= 1, "cycle length and period must be positive");
    let t_us = t as usize;
    let mut yes = vec![false; t_us];
    let mut no = vec![false; t_us];
    // i·2n mod t has period at most t in i
    for i in 0..t {
        yes[((i * 2 * n) % t) as usize] = true;
        no[((n + i * 2 * n) % t) as usize] = true;
    }
    yes.iter().zip(&no).all(|(y, n)| !(y & n))
}

/// Valuation route: `2^{v₂(n)+1}` divides `t`.
pub fn valuation_solvable(t: u64, n: u64) -> bool {
    t % analytic_min_states(n) == 0
}

/// Smallest solving cycle, which is also the minimal DFA size: `2^{v₂(n)+1}`.
pub fn analytic_min_states(n: u64) -> u64 {
    assert!(n >= 1, "period must be positive");
    2u64 << n.trailing_zeros()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimalStates {
    Found(usize),
    NotFoundWithin(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeStats {
    pub machines_checked: u64,
    pub solving: u64,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub n: u64,
    pub max_states: usize,
    pub minimal_states: MinimalStates,
    pub witness: Option<UnaryDfa>,
    pub machines_checked: u64,
    /// Keyed by machine size; every size below the minimum has `solving == 0`.
    pub per_size: BTreeMap<usize, SizeStats>,
}

impl SearchReport {
    pub fn to_json(&self, include_timing: bool) -> Value {
        let minimal = match self.minimal_states {
            MinimalStates::Found(s) => json!(s),
            MinimalStates::NotFoundWithin(_) => Value::Null,
        };
        let witness = self.witness.as_ref().map_or(Value::Null, |w| {
            json!({
                "type": "dfa",
                "tail_len": w.tail_len(),
                "cycle_len": w.cycle_len(),
                "accepting": w.accepting(),
            })
        });
        let solving: BTreeMap<String, u64> = self
            .per_size
            .iter()
            .map(|(m, s)| (m.to_string(), s.solving))
            .collect();
        let mut out = json!({
            "n": self.n,
            "max_states": self.max_states,
            "minimal_states": minimal,
            "witness": witness,
            "machines_checked": self.machines_checked,
            "solving_per_size": solving,
        });
        if let MinimalStates::NotFoundWithin(b) = self.minimal_states {
            out["not_found_within"] = json!(b);
        }
        if include_timing {
            let ms: BTreeMap<String, f64> = self
                .per_size
                .iter()
                .map(|(m, s)| (m.to_string(), s.millis))
                .collect();
            out["ms_per_size"] = json!(ms);
        }
        out
    }
}

/// Accepting sets that work for a shape are exactly the supersets of
/// `required` disjoint from `forbidden`.
struct ShapeMasks {
    required: u32,
    forbidden: u32,
}

fn shape_masks(tail_len: usize, cycle_len: usize, spec: PromiseSpec) -> ShapeMasks {
    let shape = UnaryDfa::new(tail_len, cycle_len, Default::default()).expect("cycle_len > 0");
    let mut masks = ShapeMasks {
        required: 0,
        forbidden: 0,
    };
    for m in 0..shape.decision_bound(spec) {
        let bit = 1u32 << shape.state_after(m);
        match spec.classify(m) {
            Classification::Yes => masks.required |= bit,
            Classification::No => masks.forbidden |= bit,
            Classification::OutsidePromise => {}
        }
    }
    masks
}

fn mask_states(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask & (1 << b) != 0).collect()
}

type WitnessKey = (usize, usize, Vec<usize>);

/// Scans every (tail, cycle, accepting) machine with exactly `size` states.
/// Returns the number of solvers and the lexicographically smallest one.
fn scan_size(size: usize, spec: PromiseSpec) -> (u64, Option<WitnessKey>) {
    let mut solving = 0u64;
    let mut best: Option<WitnessKey> = None;
    for tail_len in 0..size {
        let cycle_len = size - tail_len;
        let masks = shape_masks(tail_len, cycle_len, spec);
        let (count, smallest) = (0u32..1 << size)
            .into_par_iter()
            .filter(|acc| acc & masks.required == masks.required && acc & masks.forbidden == 0)
            .map(|acc| (1u64, Some(mask_states(acc))))
            .reduce(
                || (0, None),
                |(c1, a), (c2, b)| {
                    let smallest = match (a, b) {
                        (Some(a), Some(b)) => Some(a.min(b)),
                        (a, b) => a.or(b),
                    };
                    (c1 + c2, smallest)
                },
            );
        solving += count;
        if best.is_none() {
            best = smallest.map(|acc| (tail_len, cycle_len, acc));
        }
    }
    (solving, best)
}

/// Exhaustive minimal-DFA search for the promise with period `n`.
///
/// Sizes are scanned in increasing order; within a size every tail/cycle
/// split and every accepting subset is tested. `threads` pins the worker
/// count; the result is independent of it.
pub fn min_dfa_search(
    n: u64,
    max_states: usize,
    threads: Option<usize>,
) -> Result<SearchReport, OracleError> {
    let spec = PromiseSpec::new(n).ok_or(OracleError::ZeroPeriod)?;
    if max_states > MAX_SEARCH_STATES {
        return Err(OracleError::BoundTooLarge(max_states));
    }
    match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| OracleError::ThreadPool(e.to_string()))?
            .install(|| search(spec, max_states)),
        None => search(spec, max_states),
    }
}

fn search(spec: PromiseSpec, max_states: usize) -> Result<SearchReport, OracleError> {
    let mut per_size = BTreeMap::new();
    let mut machines_checked = 0u64;
    for size in 1..=max_states {
        let start = Instant::now();
        let (solving, best) = scan_size(size, spec);
        let checked = size as u64 * (1u64 << size);
        machines_checked += checked;
        per_size.insert(
            size,
            SizeStats {
                machines_checked: checked,
                solving,
                millis: start.elapsed().as_secs_f64() * 1e3,
            },
        );
        if let Some((tail_len, cycle_len, accepting)) = best {
            let witness = UnaryDfa::new(tail_len, cycle_len, accepting.into_iter().collect())
                .expect("indices below size");
            if !dfa_solves_exactly(&witness, spec) {
                return Err(OracleError::WitnessRejected(witness));
            }
            return Ok(SearchReport {
                n: spec.period_n(),
                max_states,
                minimal_states: MinimalStates::Found(size),
                witness: Some(witness),
                machines_checked,
                per_size,
            });
        }
    }
    Ok(SearchReport {
        n: spec.period_n(),
        max_states,
        minimal_states: MinimalStates::NotFoundWithin(max_states),
        witness: None,
        machines_checked,
        per_size,
    })
}

/// Brute force against the closed form for every `n` in `1..=n_max`.
pub fn oracle_vs_analytic(n_max: u64, max_states: usize) -> Result<(), OracleError> {
    for n in 1..=n_max {
        let report = min_dfa_search(n, max_states, None)?;
        let expected = analytic_min_states(n);
        match report.minimal_states {
            MinimalStates::Found(found) if found as u64 == expected => {}
            MinimalStates::Found(found) => {
                return Err(OracleError::Mismatch { n, found, expected })
            }
            MinimalStates::NotFoundWithin(_) => {
                return Err(OracleError::NotFound { n, max_states })
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_examples() {
        assert!(cycle_solvable(4, 2).solvable);
        assert!(cycle_solvable(16, 8).solvable);
        assert!(!cycle_solvable(8, 8).solvable);
        assert!(!cycle_solvable(3, 2).solvable);
        assert!(cycle_solvable(4, 6).solvable);
        let v = cycle_solvable(12, 4);
        assert_eq!((v.d, v.coset_size()), (4, 3));
    }

    #[test]
    fn residue_examples() {
        // t=3, n=2: 4 is a unit mod 3, so both sets cover Z_3.
        assert!(!residue_sets_disjoint(3, 2));
        // t=4, n=6: Yes {0}, No {2}.
        assert!(residue_sets_disjoint(4, 6));
    }

    #[test]
    fn analytic_examples() {
        assert_eq!(analytic_min_states(8), 16);
        assert_eq!(analytic_min_states(12), 8);
        assert_eq!(analytic_min_states(7), 2);
    }

    fn found(n: u64, max: usize) -> usize {
        match min_dfa_search(n, max, None).unwrap().minimal_states {
            MinimalStates::Found(s) => s,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn search_examples() {
        assert_eq!(found(2, 8), 4);
        assert_eq!(found(4, 10), 8);
        assert_eq!(found(1, 4), 2);
        assert_eq!(found(6, 8), 4);
    }

    #[test]
    fn search_reports_exhaustion() {
        let r = min_dfa_search(4, 10, None).unwrap();
        for size in 1..8 {
            assert_eq!(r.per_size[&size].solving, 0);
        }
        assert!(r.per_size[&8].solving > 0);
        let expected: u64 = (1..=8u64).map(|m| m << m).sum();
        assert_eq!(r.machines_checked, expected);
        let w = r.witness.unwrap();
        assert_eq!((w.tail_len(), w.cycle_len()), (0, 8));
        assert_eq!(w.accepting().iter().copied().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn search_not_found_and_errors() {
        let r = min_dfa_search(8, 10, None).unwrap();
        assert_eq!(r.minimal_states, MinimalStates::NotFoundWithin(10));
        assert!(r.witness.is_none());
        assert_eq!(
            min_dfa_search(8, 21, None),
            Err(OracleError::BoundTooLarge(21))
        );
        assert_eq!(min_dfa_search(0, 4, None), Err(OracleError::ZeroPeriod));
        assert_eq!(
            oracle_vs_analytic(4, 6),
            Err(OracleError::NotFound {
                n: 4,
                max_states: 6
            })
        );
    }

    #[test]
    fn oracle_vs_analytic_examples() {
        assert_eq!(oracle_vs_analytic(8, 16), Ok(()));
        assert_eq!(oracle_vs_analytic(1, 2), Ok(()));
        assert_eq!(oracle_vs_analytic(12, 16), Ok(()));
    }

    #[test]
    fn report_json_shape() {
        let r = min_dfa_search(2, 8, Some(2)).unwrap();
        let v = r.to_json(false);
        assert_eq!(v["minimal_states"], 4);
        assert_eq!(v["witness"]["cycle_len"], 4);
        assert_eq!(v["witness"]["accepting"], json!([0]));
        assert!(v.get("ms_per_size").is_none());
        assert!(r.to_json(true)["ms_per_size"]["4"].is_number());
    }
}
