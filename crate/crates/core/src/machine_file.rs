//! JSON machine files.
//!
//! ```json
//! {"type": "mcqfa", "num_states": 2,
//!  "unitaries": {"lmark": [[1,0],[0,1]], "a": [[0,-1],[1,0]], "rmark": [[1,0],[0,1]]},
//!  "initial_state": 0, "accepting": [0]}
//! {"type": "dfa", "tail_len": 0, "cycle_len": 4, "accepting": [0]}
//! ```
//!
//! Matrices are row-major. For `mcqfa`, `initial_state` defaults to 0 and
//! `accepting` to `[0]`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{AutomatonError, Matrix, Mcqfa, Symbol, UnaryDfa};

#[derive(Debug, Error)]
pub enum MachineFileError {
    #[error("malformed machine file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("malformed machine file: {0}")]
    Shape(String),
    #[error("invalid machine: {0}")]
    Invalid(#[from] AutomatonError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitariesDoc {
    pub lmark: Vec<Vec<f64>>,
    pub a: Vec<Vec<f64>>,
    pub rmark: Vec<Vec<f64>>,
}

fn default_accepting() -> Vec<usize> {
    vec![0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MachineDoc {
    Mcqfa {
        num_states: usize,
        unitaries: UnitariesDoc,
        #[serde(default)]
        initial_state: usize,
        #[serde(default = "default_accepting")]
        accepting: Vec<usize>,
    },
    Dfa {
        tail_len: usize,
        cycle_len: usize,
        accepting: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Machine {
    Quantum(Mcqfa),
    Classical(UnaryDfa),
}

impl MachineDoc {
    pub fn into_machine(self) -> Result<Machine, MachineFileError> {
        match self {
            MachineDoc::Mcqfa {
                num_states,
                unitaries,
                initial_state,
                accepting,
            } => {
                let matrix = |symbol: Symbol, rows: &[Vec<f64>]| {
                    Matrix::from_rows(rows)
                        .filter(|m| m.dim() == num_states)
                        .ok_or_else(|| {
                            MachineFileError::Shape(format!(
                                "{symbol} must be a {num_states}x{num_states} matrix"
                            ))
                        })
                };
                let machine = Mcqfa::new(
                    matrix(Symbol::LeftMarker, &unitaries.lmark)?,
                    matrix(Symbol::A, &unitaries.a)?,
                    matrix(Symbol::RightMarker, &unitaries.rmark)?,
                    initial_state,
                    accepting.into_iter().collect(),
                )?;
                Ok(Machine::Quantum(machine))
            }
            MachineDoc::Dfa {
                tail_len,
                cycle_len,
                accepting,
            } => Ok(Machine::Classical(UnaryDfa::new(
                tail_len,
                cycle_len,
                accepting.into_iter().collect::<BTreeSet<_>>(),
            )?)),
        }
    }
}

impl From<&Machine> for MachineDoc {
    fn from(machine: &Machine) -> Self {
        match machine {
            Machine::Quantum(q) => MachineDoc::Mcqfa {
                num_states: q.num_states(),
                unitaries: UnitariesDoc {
                    lmark: q.unitary(Symbol::LeftMarker).rows(),
                    a: q.unitary(Symbol::A).rows(),
                    rmark: q.unitary(Symbol::RightMarker).rows(),
                },
                initial_state: q.initial_state(),
                accepting: q.accepting().iter().copied().collect(),
            },
            Machine::Classical(d) => MachineDoc::Dfa {
                tail_len: d.tail_len(),
                cycle_len: d.cycle_len(),
                accepting: d.accepting().iter().copied().collect(),
            },
        }
    }
}

pub fn parse_machine(text: &str) -> Result<Machine, MachineFileError> {
    serde_json::from_str::<MachineDoc>(text)?.into_machine()
}

pub fn to_json(machine: &Machine) -> String {
    serde_json::to_string_pretty(&MachineDoc::from(machine)).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{build_mcqfa, build_min_dfa, FamilyParams};
    use proptest::prelude::*;

    #[test]
    fn parses_both_kinds() {
        let q = parse_machine(
            r#"{"type":"mcqfa","num_states":2,
                "unitaries":{"lmark":[[1,0],[0,1]],"a":[[0,-1],[1,0]],"rmark":[[1,0],[0,1]]}}"#,
        )
        .unwrap();
        let Machine::Quantum(q) = q else { panic!() };
        assert_eq!(q.initial_state(), 0);
        assert_eq!(q.accepting(), &BTreeSet::from([0]));

        let d =
            parse_machine(r#"{"type":"dfa","tail_len":1,"cycle_len":2,"accepting":[1]}"#).unwrap();
        assert_eq!(
            d,
            Machine::Classical(UnaryDfa::new(1, 2, BTreeSet::from([1])).unwrap())
        );
    }

    #[test]
    fn distinguishes_parse_from_invariant_errors() {
        assert!(matches!(
            parse_machine("{"),
            Err(MachineFileError::Parse(_))
        ));
        assert!(matches!(
            parse_machine(r#"{"type":"nfa"}"#),
            Err(MachineFileError::Parse(_))
        ));
        assert!(matches!(
            parse_machine(
                r#"{"type":"mcqfa","num_states":2,
                    "unitaries":{"lmark":[[1,0],[0,1]],"a":[[1,0]],"rmark":[[1,0],[0,1]]}}"#
            ),
            Err(MachineFileError::Shape(_))
        ));
        assert!(matches!(
            parse_machine(
                r#"{"type":"mcqfa","num_states":2,
                    "unitaries":{"lmark":[[1,0],[0,1]],"a":[[1,1],[0,1]],"rmark":[[1,0],[0,1]]}}"#
            ),
            Err(MachineFileError::Invalid(AutomatonError::NotUnitary { .. }))
        ));
        assert!(matches!(
            parse_machine(r#"{"type":"dfa","tail_len":0,"cycle_len":0,"accepting":[]}"#),
            Err(MachineFileError::Invalid(AutomatonError::EmptyCycle))
        ));
    }

    proptest! {
        #[test]
        fn family_machines_round_trip(k in 0u32..12, l in 0u64..4) {
            let p = FamilyParams::new(k, l);
            for m in [Machine::Quantum(build_mcqfa(p).0), Machine::Classical(build_min_dfa(p))] {
                prop_assert_eq!(parse_machine(&to_json(&m)).unwrap(), m);
            }
        }
    }
}
