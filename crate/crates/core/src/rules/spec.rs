use std::fmt;
use std::str::FromStr;

use super::{DynamicParam, Dynamizer, RamsBase, RuleError, StaticKernel};
use crate::model::WeightMode;

/// A complete CCR configuration.
///
/// Serialized as `kernel[:β]|dynamizer|x|mode`, for example
/// `RAMS:0.25|SMOOTH:NUM_EVENTS:0.1|0.5|EVER_VOTED` or `RAPS||0.5|EVER_VOTED`
/// (an empty dynamizer field means a static rule). The serialized form is
/// also the rule's identifier in results files.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuleSpec {
    pub kernel: StaticKernel,
    pub dynamizer: Dynamizer,
    pub threshold: f64,
    pub weight_mode: WeightMode,
}

impl RuleSpec {
    pub fn new(kernel: StaticKernel, threshold: f64) -> Self {
        RuleSpec {
            kernel,
            dynamizer: Dynamizer::None,
            threshold,
            weight_mode: WeightMode::default(),
        }
    }

    pub fn harsh(mut self, param: DynamicParam, cutoff: u64) -> Self {
        self.dynamizer = Dynamizer::Harsh { param, cutoff };
        self
    }

    pub fn smooth(mut self, param: DynamicParam, alpha: f64) -> Self {
        self.dynamizer = Dynamizer::Smooth { param, alpha };
        self
    }

    pub fn with_mode(mut self, mode: WeightMode) -> Self {
        self.weight_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        self.kernel.validate()?;
        self.dynamizer.validate()?;
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(RuleError::Domain {
                what: "threshold",
                value: self.threshold,
            });
        }
        Ok(())
    }

    pub fn id(&self) -> String {
        self.to_string()
    }

    pub fn family(&self) -> &'static str {
        self.dynamizer.family()
    }

    /// True when evaluating the rule on a log needs its own history.
    pub fn is_rule_relative(&self) -> bool {
        self.dynamizer
            .param()
            .is_some_and(DynamicParam::is_rule_relative)
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kernel {
            StaticKernel::Aps => f.write_str("APS")?,
            StaticKernel::Raps => f.write_str("RAPS")?,
            StaticKernel::Rams { beta, base } => {
                write!(f, "RAMS:{beta}")?;
                if base == RamsBase::ActiveAgents {
                    f.write_str(":active")?;
                }
            }
        }
        f.write_str("|")?;
        match self.dynamizer {
            Dynamizer::None => {}
            Dynamizer::Harsh { param, cutoff } => write!(f, "HARSH:{param}:{cutoff}")?,
            Dynamizer::Smooth { param, alpha } => write!(f, "SMOOTH:{param}:{alpha}")?,
        }
        write!(f, "|{}|{}", self.threshold, self.weight_mode)
    }
}

impl FromStr for RuleSpec {
    type Err = RuleError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let bad = |token: &str, reason: &str| RuleError::Parse {
            input: input.to_string(),
            token: token.to_string(),
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = input.trim().split('|').map(str::trim).collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(bad(input, "expected kernel|dynamizer|threshold[|mode]"));
        }

        let kparts: Vec<&str> = fields[0].split(':').map(str::trim).collect();
        let kernel = match (kparts[0].to_ascii_uppercase().as_str(), kparts.len()) {
            ("APS", 1) => StaticKernel::Aps,
            ("RAPS", 1) => StaticKernel::Raps,
            ("RAMS", 2 | 3) => {
                let beta: f64 = kparts[1]
                    .parse()
                    .map_err(|_| bad(kparts[1], "beta must be a number"))?;
                let base = match kparts.get(2).map(|s| s.to_ascii_lowercase()) {
                    None => RamsBase::TotalAgents,
                    Some(s) if s == "active" => RamsBase::ActiveAgents,
                    Some(s) if s == "total" => RamsBase::TotalAgents,
                    Some(_) => return Err(bad(kparts[2], "RAMS base must be total or active")),
                };
                StaticKernel::Rams { beta, base }
            }
            ("RAMS", _) => return Err(bad(fields[0], "RAMS needs a beta, e.g. RAMS:0.25")),
            _ => return Err(bad(fields[0], "unknown kernel")),
        };

        let dynamizer = if fields[1].is_empty() || fields[1].eq_ignore_ascii_case("NONE") {
            Dynamizer::None
        } else {
            let dparts: Vec<&str> = fields[1].split(':').map(str::trim).collect();
            if dparts.len() != 3 {
                return Err(bad(fields[1], "expected HARSH:param:t or SMOOTH:param:alpha"));
            }
            let param: DynamicParam = dparts[1].parse().map_err(|e: String| bad(dparts[1], &e))?;
            match dparts[0].to_ascii_uppercase().as_str() {
                "HARSH" => Dynamizer::Harsh {
                    param,
                    cutoff: dparts[2]
                        .parse()
                        .map_err(|_| bad(dparts[2], "cutoff must be a natural number"))?,
                },
                "SMOOTH" => Dynamizer::Smooth {
                    param,
                    alpha: dparts[2]
                        .parse()
                        .map_err(|_| bad(dparts[2], "alpha must be a number"))?,
                },
                _ => return Err(bad(dparts[0], "unknown dynamizer")),
            }
        };

        let threshold: f64 = fields[2]
            .parse()
            .map_err(|_| bad(fields[2], "threshold must be a number"))?;
        let weight_mode = match fields.get(3) {
            None => WeightMode::default(),
            Some(m) if m.is_empty() => WeightMode::default(),
            Some(m) => m.parse().map_err(|e: String| bad(m, &e))?,
        };
        let rule = RuleSpec {
            kernel,
            dynamizer,
            threshold,
            weight_mode,
        };
        rule.validate().map_err(|e| match e {
            RuleError::Domain { what, value } => bad(&value.to_string(), &format!("{what} outside [0, 1]")),
            other => other,
        })?;
        Ok(rule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_documented_examples() {
        let r: RuleSpec = "RAMS:0.25|SMOOTH:NUM_EVENTS:0.1|0.5|EVER_VOTED".parse().unwrap();
        assert_eq!(r.kernel, StaticKernel::rams(0.25));
        assert_eq!(
            r.dynamizer,
            Dynamizer::Smooth {
                param: DynamicParam::NumEvents,
                alpha: 0.1
            }
        );
        assert_eq!(r.threshold, 0.5);
        assert_eq!(r.weight_mode, WeightMode::EverVoted);

        let r: RuleSpec = "RAPS||0.5|EVER_VOTED".parse().unwrap();
        assert_eq!(r, RuleSpec::new(StaticKernel::Raps, 0.5));
        assert_eq!(r.to_string(), "RAPS||0.5|EVER_VOTED");
    }

    #[test]
    fn names_the_offending_token() {
        match "QUUX||0.5|EVER_VOTED".parse::<RuleSpec>() {
            Err(RuleError::Parse { token, .. }) => assert_eq!(token, "QUUX"),
            other => panic!("{other:?}"),
        }
        match "APS|HARSH:NUM_EVENTS:-3|0.5".parse::<RuleSpec>() {
            Err(RuleError::Parse { token, .. }) => assert_eq!(token, "-3"),
            other => panic!("{other:?}"),
        }
        match "APS||1.5".parse::<RuleSpec>() {
            Err(RuleError::Parse { reason, .. }) => assert!(reason.contains("threshold")),
            other => panic!("{other:?}"),
        }
    }

    fn any_rule() -> impl Strategy<Value = RuleSpec> {
        let kernel = prop_oneof![
            Just(StaticKernel::Aps),
            Just(StaticKernel::Raps),
            (0u32..=100, any::<bool>()).prop_map(|(b, active)| StaticKernel::Rams {
                beta: b as f64 / 100.0,
                base: if active {
                    RamsBase::ActiveAgents
                } else {
                    RamsBase::TotalAgents
                },
            }),
        ];
        let param = prop_oneof![
            Just(DynamicParam::NumEvents),
            Just(DynamicParam::NumAgents),
            Just(DynamicParam::NumParagraphs),
            Just(DynamicParam::SolutionSize),
            Just(DynamicParam::NumUpdates),
        ];
        let dynamizer = prop_oneof![
            Just(Dynamizer::None),
            (param.clone(), 0u64..500).prop_map(|(param, cutoff)| Dynamizer::Harsh { param, cutoff }),
            (param, 0u32..=100).prop_map(|(param, a)| Dynamizer::Smooth {
                param,
                alpha: a as f64 / 100.0
            }),
        ];
        (kernel, dynamizer, 0u32..=20, any::<bool>()).prop_map(|(kernel, dynamizer, x, ever)| {
            RuleSpec {
                kernel,
                dynamizer,
                threshold: x as f64 / 20.0,
                weight_mode: if ever {
                    WeightMode::EverVoted
                } else {
                    WeightMode::CurrentStance
                },
            }
        })
    }

    proptest! {
        #[test]
        fn textual_form_round_trips(rule in any_rule()) {
            let text = rule.to_string();
            prop_assert_eq!(text.parse::<RuleSpec>().unwrap(), rule);
        }
    }
}
