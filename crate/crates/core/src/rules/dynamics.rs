use std::fmt;
use std::str::FromStr;

use super::{ccr_trajectory, RuleError, RuleSpec};
use crate::model::{Instance, LiveTally};
use crate::scalar::Scalar;

/// A progress measure of an event prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DynamicParam {
    /// `|E|`
    NumEvents,
    /// `|A(E)|`, agents that acted at least once.
    NumAgents,
    /// `|P(E)|`
    NumParagraphs,
    /// `|R(E)|`, size of the rule's current solution.
    SolutionSize,
    /// `U(R, E)`, number of document updates so far.
    NumUpdates,
}

impl DynamicParam {
    /// Whether the value depends on the output of a rule rather than on the
    /// log alone.
    pub fn is_rule_relative(self) -> bool {
        matches!(self, DynamicParam::SolutionSize | DynamicParam::NumUpdates)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DynamicParam::NumEvents => "NUM_EVENTS",
            DynamicParam::NumAgents => "NUM_AGENTS",
            DynamicParam::NumParagraphs => "NUM_PARAGRAPHS",
            DynamicParam::SolutionSize => "SOLUTION_SIZE",
            DynamicParam::NumUpdates => "NUM_UPDATES",
        }
    }

    /// Value over a live tally. `None` for rule-relative parameters.
    pub(crate) fn live_value(self, tally: &LiveTally) -> Option<u64> {
        match self {
            DynamicParam::NumEvents => Some(tally.num_events() as u64),
            DynamicParam::NumAgents => Some(tally.num_agents_seen() as u64),
            DynamicParam::NumParagraphs => Some(tally.num_paragraphs() as u64),
            DynamicParam::SolutionSize | DynamicParam::NumUpdates => None,
        }
    }
}

impl fmt::Display for DynamicParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DynamicParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_uppercase().as_str() {
            "NUM_EVENTS" | "EVENTS" => DynamicParam::NumEvents,
            "NUM_AGENTS" | "AGENTS" => DynamicParam::NumAgents,
            "NUM_PARAGRAPHS" | "PARAGRAPHS" => DynamicParam::NumParagraphs,
            "SOLUTION_SIZE" => DynamicParam::SolutionSize,
            "NUM_UPDATES" | "UPDATES" => DynamicParam::NumUpdates,
            other => return Err(format!("unknown dynamic parameter {other:?}")),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Dynamizer {
    #[default]
    None,
    /// Score on the shortest prefix whose `param` reaches `cutoff`.
    Harsh { param: DynamicParam, cutoff: u64 },
    /// `F_exp(score, param, alpha)`.
    Smooth { param: DynamicParam, alpha: f64 },
}

impl Dynamizer {
    pub fn param(&self) -> Option<DynamicParam> {
        match *self {
            Dynamizer::None => None,
            Dynamizer::Harsh { param, .. } | Dynamizer::Smooth { param, .. } => Some(param),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Dynamizer::None => "static",
            Dynamizer::Harsh { .. } => "harsh",
            Dynamizer::Smooth { .. } => "smooth",
        }
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        if let Dynamizer::Smooth { alpha, .. } = *self {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(RuleError::Domain {
                    what: "alpha",
                    value: alpha,
                });
            }
        }
        Ok(())
    }
}

/// Exponential smoothing `x · exp(−t·α·(1−x))`.
pub fn f_exp<S: Scalar>(x: S, t: u64, alpha: S) -> Result<S, RuleError> {
    let unit = |v: S, what: &'static str| {
        if v < S::zero() || v > S::one() {
            Err(RuleError::Domain {
                what,
                value: v.to_f64(),
            })
        } else {
            Ok(())
        }
    };
    unit(x, "x")?;
    unit(alpha, "alpha")?;
    Ok(f_exp_unchecked(x, t, alpha))
}

pub(crate) fn f_exp_unchecked<S: Scalar>(x: S, t: u64, alpha: S) -> S {
    if x == S::zero() {
        return S::zero();
    }
    let t = S::from_count(t as usize);
    x * (S::zero() - t * alpha * (S::one() - x)).exp()
}

/// Value of `param` on the whole log of `instance`. Rule-relative
/// parameters are measured on `rule`'s own trajectory.
pub fn param_value(
    param: DynamicParam,
    instance: &Instance,
    rule: Option<&RuleSpec>,
) -> Result<u64, RuleError> {
    let log = instance.log();
    Ok(match param {
        DynamicParam::NumEvents => log.len() as u64,
        DynamicParam::NumAgents => log.agents().len() as u64,
        DynamicParam::NumParagraphs => log.paragraphs().len() as u64,
        DynamicParam::SolutionSize | DynamicParam::NumUpdates => {
            let rule = rule.ok_or(RuleError::MissingRule(param))?;
            let traj = ccr_trajectory(rule, instance);
            if param == DynamicParam::NumUpdates {
                traj.updates() as u64
            } else {
                traj.last().map_or(0, |s| s.len()) as u64
            }
        }
    })
}

/// Length of `E↓param,t`: the shortest prefix whose `param` value is at
/// least `t`. When the value never gets there the whole log is returned.
pub fn harsh_prefix(
    instance: &Instance,
    param: DynamicParam,
    t: u64,
    rule: Option<&RuleSpec>,
) -> Result<usize, RuleError> {
    let log = instance.log();
    if param.is_rule_relative() {
        let rule = rule.ok_or(RuleError::MissingRule(param))?;
        let traj = ccr_trajectory(rule, instance);
        let mut updates = 0usize;
        for j in 0..=log.len() {
            let value = match param {
                DynamicParam::NumUpdates => {
                    // an update at index i is visible once R*(i+1) exists
                    if j >= 2 && traj.update_indices.contains(&(j - 1)) {
                        updates += 1;
                    }
                    updates as u64
                }
                _ => {
                    if j == 0 {
                        0
                    } else {
                        traj.prefix_solutions[j - 1].len() as u64
                    }
                }
            };
            if value >= t {
                return Ok(j);
            }
        }
        return Ok(log.len());
    }
    let mut live = LiveTally::new(instance.agents().iter().copied());
    if param.live_value(&live).expect("log-only parameter") >= t {
        return Ok(0);
    }
    for (k, e) in log.iter().enumerate() {
        live.apply(e);
        if param.live_value(&live).expect("log-only parameter") >= t {
            return Ok(k + 1);
        }
    }
    Ok(log.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_exp_reference_value() {
        let v = f_exp(0.60f64, 16, 0.1).unwrap();
        assert!((v - 0.316).abs() < 1e-3, "{v}");
    }

    #[test]
    fn f_exp_fixed_points() {
        for t in [0, 1, 50, 1000] {
            for a in [0.0, 0.3, 1.0] {
                assert_eq!(f_exp(1.0f64, t, a).unwrap(), 1.0);
                assert_eq!(f_exp(0.0f64, t, a).unwrap(), 0.0);
            }
        }
        assert_eq!(f_exp(0.37f64, 99, 0.0).unwrap(), 0.37);
    }

    #[test]
    fn f_exp_rejects_out_of_range() {
        assert!(matches!(
            f_exp(1.2f64, 1, 0.1),
            Err(RuleError::Domain { what: "x", .. })
        ));
        assert!(matches!(
            f_exp(0.5f64, 1, -0.1),
            Err(RuleError::Domain { what: "alpha", .. })
        ));
    }

    #[test]
    fn param_names_round_trip() {
        for p in [
            DynamicParam::NumEvents,
            DynamicParam::NumAgents,
            DynamicParam::NumParagraphs,
            DynamicParam::SolutionSize,
            DynamicParam::NumUpdates,
        ] {
            assert_eq!(p.as_str().parse::<DynamicParam>().unwrap(), p);
        }
    }
}
