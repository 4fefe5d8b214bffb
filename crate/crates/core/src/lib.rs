//! Exact two-state quantum finite automata versus minimal unary DFAs.
//!
//! The promise problem `A^N` asks to accept `a^m` when `m` is an even
//! multiple of `N` and reject it when `m` is an odd multiple; other lengths
//! are unconstrained. A two-state measure-once QFA rotating by `π/2N` per
//! letter solves it exactly for every `N`, while the smallest DFA needs
//! `2^{v₂(N)+1}` states.
//!
//! * [`automata`]: machine models and reference simulators.
//! * [`exact`]: integer-exact simulation of rotation machines.
//! * [`family`]: the concrete QFA and DFA for each `N`.
//! * [`oracle`]: closed-form and brute-force minimal DFA sizes.
//! * [`machine_file`]: JSON machine files.
//! * [`cli`]: the `qfa-succinct` command.

pub mod automata;
pub mod cli;
pub mod exact;
pub mod family;
pub mod machine_file;
pub mod oracle;

pub use automata::{
    check_unitary, classify, dfa_solves_exactly, run_mcqfa, run_unary_dfa, Classification, Matrix,
    Mcqfa, PromiseSpec, QuantumRunResult, UnaryDfa,
};
pub use exact::{
    cross_check_float, exact_run, verify_family_exactness, ExactOutcome, OutcomeKind,
    RotationMachine,
};
pub use family::{build_mcqfa, build_min_dfa, family_table, FamilyParams};
pub use oracle::{
    analytic_min_states, cycle_solvable, min_dfa_search, oracle_vs_analytic, SearchReport,
};
