use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

use super::{AgentAction, AgentView, Payload, PopulationError, SimRng};
use crate::model::{AgentId, VoteValue};

/// Minimum share of proposals an agent wants inside its interval before it
/// stops proposing and starts voting.
pub const R_MIN: f64 = 0.2;

pub const DEFAULT_WIDTH: f64 = 0.15;

/// An agent that likes exactly the positions in `[left, right]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EuclideanAgent {
    pub id: AgentId,
    pub left: f64,
    pub right: f64,
}

impl EuclideanAgent {
    pub fn new(id: AgentId, left: f64, right: f64) -> Result<Self, PopulationError> {
        if !(0.0 <= left && left <= right && right <= 1.0) {
            return Err(PopulationError::Config(format!(
                "interval [{left}, {right}] of {id} is not inside [0, 1]"
            )));
        }
        Ok(EuclideanAgent { id, left, right })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.left <= x && x <= self.right
    }

    pub fn ideal_point(&self) -> f64 {
        (self.left + self.right) / 2.0
    }
}

/// One Euclidean turn with proposal threshold `r_min`.
pub fn euclidean_step<R: Rng + ?Sized>(
    agent: &EuclideanAgent,
    view: &AgentView,
    rng: &mut R,
    r_min: f64,
) -> AgentAction {
    let positions: Vec<f64> = view.paragraphs.iter().filter_map(|p| p.payload.position()).collect();
    let r_a = if positions.is_empty() {
        0.0
    } else {
        positions.iter().filter(|&&x| agent.contains(x)).count() as f64 / positions.len() as f64
    };
    if r_a < r_min {
        let x = if agent.left < agent.right {
            rng.random_range(agent.left..=agent.right)
        } else {
            agent.left
        };
        return AgentAction::Propose(Payload::Position(x));
    }
    let p = view.paragraphs.choose(rng).expect("r_a > 0 implies paragraphs exist");
    let v = if p.own.is_nonzero() {
        VoteValue::Abstain
    } else if p.payload.position().is_some_and(|x| agent.contains(x)) {
        VoteValue::Approve
    } else {
        VoteValue::Disapprove
    };
    AgentAction::Vote(p.id, v)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IdealPointDistribution {
    Uniform,
    Gaussian { mean: f64, sd: f64 },
    /// Equal mixture of two Gaussians.
    Bimodal { low: f64, high: f64, sd: f64 },
}

impl IdealPointDistribution {
    pub fn normal() -> Self {
        IdealPointDistribution::Gaussian { mean: 0.5, sd: 0.15 }
    }

    pub fn two_peaks() -> Self {
        IdealPointDistribution::Bimodal {
            low: 0.25,
            high: 0.75,
            sd: 0.1,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            IdealPointDistribution::Uniform => rng.random::<f64>(),
            IdealPointDistribution::Gaussian { mean, sd } => Normal::new(mean, sd).expect("validated sd").sample(rng),
            IdealPointDistribution::Bimodal { low, high, sd } => {
                let mean = if rng.random_bool(0.5) { low } else { high };
                Normal::new(mean, sd).expect("validated sd").sample(rng)
            }
        }
    }

    fn validate(&self) -> Result<(), PopulationError> {
        let sd = match *self {
            IdealPointDistribution::Uniform => return Ok(()),
            IdealPointDistribution::Gaussian { sd, .. } | IdealPointDistribution::Bimodal { sd, .. } => sd,
        };
        if !(sd.is_finite() && sd > 0.0) {
            return Err(PopulationError::Config(format!("standard deviation {sd} must be positive")));
        }
        Ok(())
    }
}

impl fmt::Display for IdealPointDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            IdealPointDistribution::Uniform => f.write_str("uniform"),
            IdealPointDistribution::Gaussian { mean, sd } => write!(f, "normal({mean},{sd})"),
            IdealPointDistribution::Bimodal { low, high, sd } => write!(f, "bimodal({low},{high},{sd})"),
        }
    }
}

impl FromStr for IdealPointDistribution {
    type Err = PopulationError;

    /// `uniform`, `normal`/`gaussian`, `bimodal`/`two-peaks`, optionally with
    /// parameters: `normal(0.5,0.15)`, `bimodal(0.25,0.75,0.1)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        let (name, args) = match s.split_once('(') {
            Some((n, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| PopulationError::Config(format!("unbalanced parentheses in {s:?}")))?;
                let args = inner
                    .split(',')
                    .map(|a| a.trim().parse::<f64>())
                    .collect::<Result<Vec<f64>, _>>()
                    .map_err(|e| PopulationError::Config(format!("bad parameter in {s:?}: {e}")))?;
                (n.trim().to_string(), Some(args))
            }
            None => (s.clone(), None),
        };
        let d = match (name.as_str(), args.as_deref()) {
            ("uniform", None) => IdealPointDistribution::Uniform,
            ("normal" | "gaussian", None) => Self::normal(),
            ("normal" | "gaussian", Some([mean, sd])) => IdealPointDistribution::Gaussian { mean: *mean, sd: *sd },
            ("bimodal" | "two-peaks" | "two_peaks", None) => Self::two_peaks(),
            ("bimodal" | "two-peaks" | "two_peaks", Some([low, high, sd])) => IdealPointDistribution::Bimodal {
                low: *low,
                high: *high,
                sd: *sd,
            },
            _ => return Err(PopulationError::Config(format!("unknown distribution {s:?}"))),
        };
        d.validate()?;
        Ok(d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PopulationSpec {
    pub n: u32,
    pub distribution: IdealPointDistribution,
    pub width: f64,
    pub seed: u64,
}

impl PopulationSpec {
    pub fn new(n: u32, distribution: IdealPointDistribution, seed: u64) -> Self {
        PopulationSpec {
            n,
            distribution,
            width: DEFAULT_WIDTH,
            seed,
        }
    }
}

/// Agents `a1..an` with width-`w` intervals centred on sampled ideal
/// points, each centre clipped to `[w/2, 1 − w/2]`.
pub fn sample_population(spec: &PopulationSpec) -> Result<Vec<EuclideanAgent>, PopulationError> {
    if spec.n == 0 {
        return Err(PopulationError::Config("population needs at least one agent".into()));
    }
    if !(spec.width > 0.0 && spec.width <= 1.0) {
        return Err(PopulationError::Config(format!("interval width {} outside (0, 1]", spec.width)));
    }
    spec.distribution.validate()?;
    let mut rng = SimRng::seed_from_u64(spec.seed);
    let half = spec.width / 2.0;
    (1..=spec.n)
        .map(|i| {
            let c = spec.distribution.sample(&mut rng).clamp(half, 1.0 - half);
            // keep the endpoints inside [0, 1] despite rounding
            EuclideanAgent::new(AgentId(i), (c - half).max(0.0), (c + half).min(1.0))
        })
        .collect()
}

pub fn write_population<W: Write>(agents: &[EuclideanAgent], out: W) -> Result<(), PopulationError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["agent", "left", "right"])?;
    for a in agents {
        w.write_record([a.id.0.to_string(), a.left.to_string(), a.right.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_population<R: Read>(input: R) -> Result<Vec<EuclideanAgent>, PopulationError> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["agent", "left", "right"] {
        return Err(PopulationError::Format {
            line: 1,
            reason: "expected header agent,left,right".into(),
        });
    }
    let mut out = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let field = |i: usize| -> Result<&str, PopulationError> {
            rec.get(i).ok_or(PopulationError::Format {
                line,
                reason: "missing field".into(),
            })
        };
        let bad = |reason: String| PopulationError::Format { line, reason };
        let id: u32 = field(0)?
            .trim_start_matches('a')
            .parse()
            .map_err(|e| bad(format!("agent: {e}")))?;
        let left: f64 = field(1)?.parse().map_err(|e| bad(format!("left: {e}")))?;
        let right: f64 = field(2)?.parse().map_err(|e| bad(format!("right: {e}")))?;
        out.push(EuclideanAgent::new(AgentId(id), left, right).map_err(|e| bad(e.to_string()))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ParagraphId;
    use crate::populations::ParagraphState;

    fn state(id: u32, x: f64, own: VoteValue) -> ParagraphState {
        ParagraphState {
            id: ParagraphId(id),
            payload: Payload::Position(x),
            plus: 1,
            minus: 0,
            own,
            in_document: false,
        }
    }

    fn view(ps: Vec<ParagraphState>) -> AgentView {
        let next = ParagraphId(ps.len() as u32 + 1);
        AgentView {
            agent: AgentId(1),
            paragraphs: ps,
            next_paragraph: next,
        }
    }

    #[test]
    fn empty_system_proposes_inside_interval() {
        let a = EuclideanAgent::new(AgentId(1), 0.2, 0.6).unwrap();
        let mut rng = SimRng::seed_from_u64(0);
        for _ in 0..100 {
            match euclidean_step(&a, &view(vec![]), &mut rng, R_MIN) {
                AgentAction::Propose(Payload::Position(x)) => assert!(a.contains(x)),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn votes_by_interval_membership() {
        let a = EuclideanAgent::new(AgentId(1), 0.2, 0.6).unwrap();
        let mut rng = SimRng::seed_from_u64(0);
        let v = view(vec![state(1, 0.4, VoteValue::Abstain)]);
        assert_eq!(euclidean_step(&a, &v, &mut rng, R_MIN), AgentAction::Vote(ParagraphId(1), VoteValue::Approve));
        // r_a = 1/2 >= 0.2, so the agent votes; whichever paragraph it picks
        // the vote follows membership.
        let v = view(vec![state(1, 0.4, VoteValue::Abstain), state(2, 0.8, VoteValue::Abstain)]);
        for _ in 0..50 {
            match euclidean_step(&a, &v, &mut rng, R_MIN) {
                AgentAction::Vote(p, VoteValue::Approve) => assert_eq!(p, ParagraphId(1)),
                AgentAction::Vote(p, VoteValue::Disapprove) => assert_eq!(p, ParagraphId(2)),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn withdraws_held_stance() {
        let a = EuclideanAgent::new(AgentId(1), 0.2, 0.6).unwrap();
        let mut rng = SimRng::seed_from_u64(0);
        let v = view(vec![state(1, 0.4, VoteValue::Approve)]);
        assert_eq!(euclidean_step(&a, &v, &mut rng, R_MIN), AgentAction::Vote(ParagraphId(1), VoteValue::Abstain));
    }

    #[test]
    fn low_coverage_proposes() {
        let a = EuclideanAgent::new(AgentId(1), 0.0, 0.4).unwrap();
        let mut rng = SimRng::seed_from_u64(0);
        let ps = (1..=10).map(|i| state(i, 0.9, VoteValue::Abstain)).collect();
        assert!(matches!(euclidean_step(&a, &view(ps), &mut rng, R_MIN), AgentAction::Propose(_)));
    }

    #[test]
    fn sampling_is_reproducible_and_clipped() {
        for d in [
            IdealPointDistribution::Uniform,
            IdealPointDistribution::normal(),
            IdealPointDistribution::two_peaks(),
        ] {
            let spec = PopulationSpec::new(20, d, 7);
            let a = sample_population(&spec).unwrap();
            assert_eq!(a.len(), 20);
            assert_eq!(a, sample_population(&spec).unwrap());
            for ag in &a {
                assert!(ag.left >= 0.0 && ag.right <= 1.0);
                assert!((ag.right - ag.left - DEFAULT_WIDTH).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gaussian_mean() {
        let n = 10_000;
        let spec = PopulationSpec::new(n, IdealPointDistribution::normal(), 11);
        let mean = sample_population(&spec).unwrap().iter().map(|a| a.ideal_point()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 3.0 * 0.15 / (n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn two_peaks_have_two_modes() {
        let spec = PopulationSpec {
            width: 0.05,
            ..PopulationSpec::new(10_000, IdealPointDistribution::two_peaks(), 5)
        };
        let mut bins = [0usize; 10];
        for a in sample_population(&spec).unwrap() {
            bins[((a.ideal_point() * 10.0) as usize).min(9)] += 1;
        }
        // peaks near 0.25 and 0.75, a trough at the centre
        assert!(bins[2] > 2 * bins[5] && bins[7] > 2 * bins[5], "{bins:?}");
        assert!(bins[2] > 2 * bins[0] && bins[7] > 2 * bins[9], "{bins:?}");
    }

    #[test]
    fn rejects_bad_specs() {
        let bad_width = PopulationSpec {
            width: 0.0,
            ..PopulationSpec::new(3, IdealPointDistribution::Uniform, 1)
        };
        assert!(sample_population(&bad_width).is_err());
        assert!(sample_population(&PopulationSpec::new(0, IdealPointDistribution::Uniform, 1)).is_err());
        assert!("normal(0.5,-1)".parse::<IdealPointDistribution>().is_err());
        assert!("zipf".parse::<IdealPointDistribution>().is_err());
    }

    #[test]
    fn csv_round_trip() {
        let a = sample_population(&PopulationSpec::new(5, IdealPointDistribution::Uniform, 3)).unwrap();
        let mut buf = Vec::new();
        write_population(&a, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("agent,left,right\n"));
        assert_eq!(read_population(&buf[..]).unwrap(), a);
    }

    #[test]
    fn distribution_names() {
        assert_eq!("two-peaks".parse::<IdealPointDistribution>().unwrap(), IdealPointDistribution::two_peaks());
        assert_eq!(
            "normal(0.4,0.1)".parse::<IdealPointDistribution>().unwrap(),
            IdealPointDistribution::Gaussian { mean: 0.4, sd: 0.1 }
        );
    }
}
