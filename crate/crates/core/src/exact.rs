//! Exact simulation of two-state single-rotation machines.
//!
//! With `U_a` a rotation by `π/D` and identity end markers, the state after
//! `a^m` is `(cos jπ/D, sin jπ/D)` for `j = m mod 2D`. Acceptance with
//! probability exactly 1 or 0 is then a congruence on `j`, so the decision
//! never touches floating point.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use crate::automata::{run_mcqfa, Classification, Matrix, Mcqfa, PromiseSpec};

/// Two-state MCQFA whose only non-trivial unitary is a rotation by `π/D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RotationMachine {
    denominator: u64,
}

impl RotationMachine {
    /// Returns `None` for `denominator == 0`.
    pub fn new(denominator: u64) -> Option<Self> {
        (denominator > 0).then_some(RotationMachine { denominator })
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn angle(&self) -> f64 {
        PI / self.denominator as f64
    }

    pub fn state_after(&self, input_length: u64) -> AngleState {
        AngleState {
            index: input_length % (2 * self.denominator),
        }
    }

    /// The same machine as a general floating-point [`Mcqfa`].
    pub fn to_mcqfa(&self) -> Mcqfa {
        Mcqfa::new(
            Matrix::identity(2),
            Matrix::rotation(self.angle()),
            Matrix::identity(2),
            0,
            BTreeSet::from([0]),
        )
        .expect("plane rotations are orthogonal")
    }
}

/// Angle index `j` in `0..2D`; the amplitude vector is `(cos jθ, sin jθ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AngleState {
    pub index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    ExactlyAccept,
    ExactlyReject,
    Intermediate,
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutcomeKind::ExactlyAccept => "ACCEPT",
            OutcomeKind::ExactlyReject => "REJECT",
            OutcomeKind::Intermediate => "INTERMEDIATE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOutcome {
    pub kind: OutcomeKind,
    pub state: AngleState,
    /// `cos² jθ`, reported for information only.
    pub probability_if_intermediate: Option<f64>,
}

impl ExactOutcome {
    /// Acceptance probability: exact for the two decided kinds.
    pub fn probability(&self) -> f64 {
        match self.kind {
            OutcomeKind::ExactlyAccept => 1.0,
            OutcomeKind::ExactlyReject => 0.0,
            OutcomeKind::Intermediate => self.probability_if_intermediate.unwrap_or(f64::NAN),
        }
    }
}

pub fn exact_run(machine: RotationMachine, input_length: u64) -> ExactOutcome {
    let d = machine.denominator as u128;
    let state = machine.state_after(input_length);
    let j = state.index as u128;
    // cos jπ/D = ±1  iff  j ≡ 0 (mod D);  cos jπ/D = 0  iff  2j ≡ D (mod 2D)
    let kind = if j % d == 0 {
        OutcomeKind::ExactlyAccept
    } else if (2 * j) % (2 * d) == d {
        OutcomeKind::ExactlyReject
    } else {
        OutcomeKind::Intermediate
    };
    let probability_if_intermediate = (kind == OutcomeKind::Intermediate).then(|| {
        let c = (state.index as f64 * machine.angle()).cos();
        c * c
    });
    ExactOutcome {
        kind,
        state,
        probability_if_intermediate,
    }
}

/// First length in `0..=max_len` where the exact outcome contradicts the
/// promise.
pub fn promise_counterexample(
    machine: RotationMachine,
    spec: PromiseSpec,
    max_len: u64,
) -> Option<u64> {
    (0..=max_len).find(|&m| {
        let kind = exact_run(machine, m).kind;
        match spec.classify(m) {
            Classification::Yes => kind != OutcomeKind::ExactlyAccept,
            Classification::No => kind != OutcomeKind::ExactlyReject,
            Classification::OutsidePromise => false,
        }
    })
}

/// Checks the family machine for `N = 2^k` on every length up to
/// `max_blocks · 2N`. On failure returns the first bad length.
pub fn verify_family_exactness(k: u32, max_blocks: u64) -> Result<(), u64> {
    let n = 1u64 << k;
    let machine = RotationMachine::new(2 * n).expect("positive");
    let spec = PromiseSpec::new(n).expect("positive");
    match promise_counterexample(machine, spec, max_blocks * 2 * n) {
        Some(m) => Err(m),
        None => Ok(()),
    }
}

/// Compares `cos² jθ` against the floating-point matrix simulation.
pub fn cross_check_float(machine: RotationMachine, input_length: u64, tolerance: f64) -> bool {
    let j = machine.state_after(input_length).index;
    let c = (j as f64 * machine.angle()).cos();
    let float = run_mcqfa(&machine.to_mcqfa(), input_length).accept_probability;
    (c * c - float).abs() <= tolerance
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rm(d: u64) -> RotationMachine {
        RotationMachine::new(d).unwrap()
    }

    #[test]
    fn exact_run_examples() {
        let out = exact_run(rm(4), 4);
        assert_eq!(out.kind, OutcomeKind::ExactlyAccept);
        assert_eq!(out.state.index, 4);

        let out = exact_run(rm(4), 2);
        assert_eq!(out.kind, OutcomeKind::ExactlyReject);
        assert_eq!(out.state.index, 2);

        let out = exact_run(rm(4), 1);
        assert_eq!(out.kind, OutcomeKind::Intermediate);
        assert!((out.probability() - 0.5).abs() < 1e-12);

        for d in 1..20 {
            assert_eq!(exact_run(rm(d), 0).kind, OutcomeKind::ExactlyAccept);
        }
        assert!(RotationMachine::new(0).is_none());
    }

    #[test]
    fn odd_denominator_never_rejects() {
        // 2j ≡ D (mod 2D) has no solution for odd D.
        for m in 0..60 {
            assert_ne!(exact_run(rm(5), m).kind, OutcomeKind::ExactlyReject);
        }
    }

    #[test]
    fn sign_pattern_over_blocks() {
        // q1 -> q2 -> -q1 -> -q2 -> q1, one block of N letters per arrow
        let n = 8u64;
        let machine = rm(2 * n);
        let expected = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0), (1.0, 0.0)];
        for (b, (c, s)) in expected.iter().enumerate() {
            let j = machine.state_after(b as u64 * n).index as f64;
            assert!(((j * machine.angle()).cos() - c).abs() < 1e-12);
            assert!(((j * machine.angle()).sin() - s).abs() < 1e-12);
        }
    }

    #[test]
    fn verify_family_examples() {
        assert_eq!(verify_family_exactness(1, 8), Ok(()));
        assert_eq!(verify_family_exactness(10, 4), Ok(()));
        assert_eq!(verify_family_exactness(0, 8), Ok(()));
    }

    #[test]
    fn sabotaged_rotation_fails_at_n() {
        let n = 4;
        let spec = PromiseSpec::new(n).unwrap();
        assert_eq!(promise_counterexample(rm(3 * n), spec, 16 * n), Some(n));
    }

    #[test]
    fn cross_check_examples() {
        assert!(cross_check_float(rm(4), 3, 1e-9));
        assert!(cross_check_float(rm(16), 100, 1e-9));
        assert!(cross_check_float(rm(2), 0, 1e-12));
    }
}
