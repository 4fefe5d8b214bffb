//! Machine models and their reference simulators.
//!
//! [`Mcqfa`] is a measure-once quantum finite automaton over the unary
//! alphabet `{a}` with real amplitudes. Every input `a^m` is framed by the
//! end markers, so a run applies `U_lmark`, then `U_a` exactly `m` times,
//! then `U_rmark`, and measures once against the accepting projector.
//!
//! [`UnaryDfa`] is a unary DFA stored in its canonical tail-plus-cycle form.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

/// Tolerance used when validating unitaries at construction time.
pub const UNITARY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AutomatonError {
    #[error("machine must have at least one state")]
    NoStates,
    #[error("matrix for {symbol} is not square with side {expected}")]
    BadShape { symbol: Symbol, expected: usize },
    #[error("matrix for {symbol} is not unitary (max deviation {deviation:e})")]
    NotUnitary { symbol: Symbol, deviation: f64 },
    #[error("matrix for {symbol} contains a non-finite entry")]
    NonFinite { symbol: Symbol },
    #[error("state {state} out of range for a {num_states}-state machine")]
    StateOutOfRange { state: usize, num_states: usize },
    #[error("cycle length must be positive")]
    EmptyCycle,
}

/// Input symbols of the framed tape `¢ a^m $`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    LeftMarker,
    A,
    RightMarker,
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symbol::LeftMarker => "lmark",
            Symbol::A => "a",
            Symbol::RightMarker => "rmark",
        })
    }
}

/// Dense real square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Matrix { dim, data }
    }

    /// Counter-clockwise rotation of the plane by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Matrix {
            dim: 2,
            data: vec![c, -s, s, c],
        }
    }

    /// Builds a matrix from rows. Returns `None` unless every row has
    /// exactly `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return None;
        }
        Some(Matrix {
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data
            .chunks(self.dim.max(1))
            .map(<[f64]>::to_vec)
            .collect()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.apply_into(v, &mut out);
        out
    }

    /// `out = M·v` without allocating.
    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.dim);
        for (o, row) in out.iter_mut().zip(self.data.chunks(self.dim)) {
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// Largest entry of `|M·Mᵀ − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        if self.data.iter().any(|x| !x.is_finite()) {
            return f64::INFINITY;
        }
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| self.get(i, k) * self.get(j, k)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// True iff `max |(M·Mᵀ − I)_ij| ≤ tolerance`. A non-finite entry never passes.
pub fn check_unitary(matrix: &Matrix, tolerance: f64) -> bool {
    matrix.orthogonality_defect() <= tolerance
}

/// A measure-once QFA over `{a}` with real amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Mcqfa {
    num_states: usize,
    lmark: Matrix,
    a: Matrix,
    rmark: Matrix,
    initial_state: usize,
    accepting: BTreeSet<usize>,
}

impl Mcqfa {
    pub fn new(
        lmark: Matrix,
        a: Matrix,
        rmark: Matrix,
        initial_state: usize,
        accepting: BTreeSet<usize>,
    ) -> Result<Self, AutomatonError> {
        let num_states = a.dim();
        if num_states == 0 {
            return Err(AutomatonError::NoStates);
        }
        for (symbol, m) in [
            (Symbol::LeftMarker, &lmark),
            (Symbol::A, &a),
            (Symbol::RightMarker, &rmark),
        ] {
            if m.dim() != num_states {
                return Err(AutomatonError::BadShape {
                    symbol,
                    expected: num_states,
                });
            }
            if m.data.iter().any(|x| !x.is_finite()) {
                return Err(AutomatonError::NonFinite { symbol });
            }
            let deviation = m.orthogonality_defect();
            if deviation > UNITARY_TOLERANCE {
                return Err(AutomatonError::NotUnitary { symbol, deviation });
            }
        }
        for &state in std::iter::once(&initial_state).chain(accepting.iter()) {
            if state >= num_states {
                return Err(AutomatonError::StateOutOfRange { state, num_states });
            }
        }
        Ok(Mcqfa {
            num_states,
            lmark,
            a,
            rmark,
            initial_state,
            accepting,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn unitary(&self, symbol: Symbol) -> &Matrix {
        match symbol {
            Symbol::LeftMarker => &self.lmark,
            Symbol::A => &self.a,
            Symbol::RightMarker => &self.rmark,
        }
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    fn initial_vector(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.num_states];
        v[self.initial_state] = 1.0;
        v
    }

    fn accept_mass(&self, v: &[f64]) -> f64 {
        self.accepting.iter().map(|&q| v[q] * v[q]).sum()
    }

    /// First length in `0..=max_len` on which the machine misses the promise
    /// by more than `tolerance`: a Yes length with acceptance below
    /// `1 − tolerance` or a No length with acceptance above `tolerance`.
    pub fn promise_counterexample(
        &self,
        spec: PromiseSpec,
        max_len: u64,
        tolerance: f64,
    ) -> Option<u64> {
        let mut v = self.lmark.apply(&self.initial_vector());
        for m in 0..=max_len {
            let class = spec.classify(m);
            if class != Classification::OutsidePromise {
                let p = self.accept_mass(&self.rmark.apply(&v));
                let ok = match class {
                    Classification::Yes => p >= 1.0 - tolerance,
                    Classification::No => p <= tolerance,
                    Classification::OutsidePromise => true,
                };
                if !ok {
                    return Some(m);
                }
            }
            v = self.a.apply(&v);
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRunResult {
    pub final_vector: Vec<f64>,
    pub accept_probability: f64,
}

impl QuantumRunResult {
    pub fn reject_probability(&self) -> f64 {
        self.final_vector.iter().map(|x| x * x).sum::<f64>() - self.accept_probability
    }

    pub fn norm(&self) -> f64 {
        self.final_vector.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Floating-point run on `¢ a^m $`.
pub fn run_mcqfa(machine: &Mcqfa, input_length: u64) -> QuantumRunResult {
    let mut v = machine.lmark.apply(&machine.initial_vector());
    let mut scratch = vec![0.0; machine.num_states];
    for _ in 0..input_length {
        machine.a.apply_into(&v, &mut scratch);
        std::mem::swap(&mut v, &mut scratch);
    }
    let final_vector = machine.rmark.apply(&v);
    let accept_probability = machine.accept_mass(&final_vector);
    QuantumRunResult {
        final_vector,
        accept_probability,
    }
}

/// Unary DFA in canonical form: states `0..tail_len` form the tail, the
/// remaining `cycle_len` states form the cycle. State `i` steps to `i + 1`
/// and the last state steps back to `tail_len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnaryDfa {
    tail_len: usize,
    cycle_len: usize,
    accepting: BTreeSet<usize>,
}

impl UnaryDfa {
    pub fn new(
        tail_len: usize,
        cycle_len: usize,
        accepting: BTreeSet<usize>,
    ) -> Result<Self, AutomatonError> {
        if cycle_len == 0 {
            return Err(AutomatonError::EmptyCycle);
        }
        let num_states = tail_len + cycle_len;
        if let Some(&state) = accepting.iter().find(|&&s| s >= num_states) {
            return Err(AutomatonError::StateOutOfRange { state, num_states });
        }
        Ok(UnaryDfa {
            tail_len,
            cycle_len,
            accepting,
        })
    }

    /// Pure cycle of `cycle_len` states.
    pub fn cycle(cycle_len: usize, accepting: BTreeSet<usize>) -> Result<Self, AutomatonError> {
        Self::new(0, cycle_len, accepting)
    }

    pub fn tail_len(&self) -> usize {
        self.tail_len
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle_len
    }

    pub fn num_states(&self) -> usize {
        self.tail_len + self.cycle_len
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    /// Single transition on `a`.
    pub fn step(&self, state: usize) -> usize {
        if state + 1 < self.num_states() {
            state + 1
        } else {
            self.tail_len
        }
    }

    /// State reached from state 0 after reading `a^m`.
    pub fn state_after(&self, input_length: u64) -> usize {
        let p = self.tail_len as u64;
        if input_length < p {
            input_length as usize
        } else {
            (p + (input_length - p) % self.cycle_len as u64) as usize
        }
    }

    /// Exclusive end of the length window that decides exact solving:
    /// behaviour is periodic in `t` from `p` on, the promise in `2N`.
    pub fn decision_bound(&self, spec: PromiseSpec) -> u64 {
        self.tail_len as u64 + (self.cycle_len as u64).lcm(&spec.double_period())
    }

    /// First promise length the machine answers wrongly, if any.
    pub fn promise_counterexample(&self, spec: PromiseSpec) -> Option<u64> {
        (0..self.decision_bound(spec)).find(|&m| match spec.classify(m) {
            Classification::Yes => !run_unary_dfa(self, m),
            Classification::No => run_unary_dfa(self, m),
            Classification::OutsidePromise => false,
        })
    }
}

impl fmt::Display for UnaryDfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tail_len={} cycle_len={} accepting={:?}",
            self.tail_len,
            self.cycle_len,
            self.accepting.iter().collect::<Vec<_>>()
        )
    }
}

pub fn run_unary_dfa(machine: &UnaryDfa, input_length: u64) -> bool {
    machine
        .accepting
        .contains(&machine.state_after(input_length))
}

/// True iff every Yes length is accepted and every No length rejected.
pub fn dfa_solves_exactly(machine: &UnaryDfa, spec: PromiseSpec) -> bool {
    machine.promise_counterexample(spec).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Yes,
    No,
    OutsidePromise,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Yes => "Yes",
            Classification::No => "No",
            Classification::OutsidePromise => "OutsidePromise",
        })
    }
}

/// The unary promise problem with period `N`: Yes lengths are `iN` with `i`
/// even, No lengths are `iN` with `i` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PromiseSpec {
    period_n: u64,
}

impl PromiseSpec {
    /// Returns `None` for `period_n == 0`.
    pub fn new(period_n: u64) -> Option<Self> {
        (period_n > 0).then_some(PromiseSpec { period_n })
    }

    pub fn period_n(&self) -> u64 {
        self.period_n
    }

    pub fn double_period(&self) -> u64 {
        2 * self.period_n
    }

    pub fn classify(&self, input_length: u64) -> Classification {
        let r = input_length % self.double_period();
        if r == 0 {
            Classification::Yes
        } else if r == self.period_n {
            Classification::No
        } else {
            Classification::OutsidePromise
        }
    }
}

pub fn classify(spec: PromiseSpec, input_length: u64) -> Classification {
    spec.classify(input_length)
}
