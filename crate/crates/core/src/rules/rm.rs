use crate::model::{tally_of, Instance, WeightMode};
use crate::scalar::Scalar;

use super::Solution;

/// How RM resolves `p⁺ᵣ = p⁻ᵣ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TieBreak {
    #[default]
    ExcludeOnTie,
    IncludeOnTie,
}

impl std::str::FromStr for TieBreak {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "EXCLUDE_ON_TIE" | "EXCLUDE" => Ok(TieBreak::ExcludeOnTie),
            "INCLUDE_ON_TIE" | "INCLUDE" => Ok(TieBreak::IncludeOnTie),
            other => Err(format!("unknown tie break {other:?}")),
        }
    }
}

/// The relative-majority rule: include a paragraph when its relative
/// approval outweighs its relative disapproval.
///
/// Ties are detected with the scalar's tolerance, so with an exact scalar
/// only true ties reach `tie`.
pub fn rm_solution<S: Scalar>(instance: &Instance, mode: WeightMode, tie: TieBreak) -> Solution {
    tally_of::<S>(instance, mode)
        .paragraphs()
        .filter(|(_, t)| {
            if t.plus_rel.approx_eq(t.minus_rel) {
                tie == TieBreak::IncludeOnTie
            } else {
                t.plus_rel > t.minus_rel
            }
        })
        .map(|(p, _)| p)
        .collect()
}
