use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One run (or the mean of several) of a rule, in the two objectives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricPoint {
    pub rule: String,
    /// `None` for points averaged over repetitions.
    pub repetition: Option<usize>,
    pub events: usize,
    pub satisfaction: f64,
    pub stability: f64,
    pub solution_size: f64,
}

/// `b` is at least as good as `a` in both objectives and better in one.
pub fn dominates(b: &MetricPoint, a: &MetricPoint) -> bool {
    b.satisfaction >= a.satisfaction
        && b.stability >= a.stability
        && (b.satisfaction > a.satisfaction || b.stability > a.stability)
}

fn front_order(a: &MetricPoint, b: &MetricPoint) -> Ordering {
    b.satisfaction
        .total_cmp(&a.satisfaction)
        .then(b.stability.total_cmp(&a.stability))
        .then_with(|| a.rule.cmp(&b.rule))
}

/// Non-dominated points, by satisfaction (descending), then stability, then
/// rule id.
///
/// After sorting, a point is dominated iff some earlier point has at least
/// its stability and is not identical in both objectives, so a single pass
/// tracking the best stability seen suffices.
pub fn pareto_front(points: &[MetricPoint]) -> Vec<MetricPoint> {
    let mut sorted: Vec<&MetricPoint> = points.iter().collect();
    sorted.sort_by(|a, b| front_order(a, b));
    let mut out: Vec<MetricPoint> = Vec::new();
    let mut best: Option<(f64, f64)> = None; // (satisfaction, stability) with max stability so far
    for p in sorted {
        let keep = match best {
            None => true,
            Some((sat, stab)) => p.stability > stab || (p.stability == stab && p.satisfaction == sat),
        };
        if keep {
            if best.is_none_or(|(_, stab)| p.stability > stab) {
                best = Some((p.satisfaction, p.stability));
            }
            out.push(p.clone());
        }
    }
    out
}

/// Arithmetic mean of each rule's points, ordered by rule id.
pub fn mean_by_rule(points: &[MetricPoint]) -> Vec<MetricPoint> {
    let mut groups: BTreeMap<&str, Vec<&MetricPoint>> = BTreeMap::new();
    for p in points {
        groups.entry(&p.rule).or_default().push(p);
    }
    groups
        .into_iter()
        .map(|(rule, ps)| {
            let n = ps.len() as f64;
            let mean = |f: fn(&MetricPoint) -> f64| ps.iter().map(|p| f(p)).sum::<f64>() / n;
            MetricPoint {
                rule: rule.to_string(),
                repetition: None,
                events: (mean(|p| p.events as f64)).round() as usize,
                satisfaction: mean(|p| p.satisfaction),
                stability: mean(|p| p.stability),
                solution_size: mean(|p| p.solution_size),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(rule: &str, sat: f64, stab: f64) -> MetricPoint {
        MetricPoint {
            rule: rule.into(),
            repetition: None,
            events: 0,
            satisfaction: sat,
            stability: stab,
            solution_size: 0.0,
        }
    }

    fn oracle(points: &[MetricPoint]) -> Vec<MetricPoint> {
        let mut out: Vec<MetricPoint> = points
            .iter()
            .filter(|a| !points.iter().any(|b| dominates(b, a)))
            .cloned()
            .collect();
        out.sort_by(front_order);
        out
    }

    #[test]
    fn small_examples() {
        let pts = vec![pt("a", 0.9, 0.2), pt("b", 0.5, 0.8), pt("c", 0.4, 0.4)];
        let f = pareto_front(&pts);
        assert_eq!(f.iter().map(|p| p.rule.as_str()).collect::<Vec<_>>(), ["a", "b"]);

        let same = vec![pt("x", 0.5, 0.5), pt("y", 0.5, 0.5), pt("z", 0.5, 0.5)];
        assert_eq!(pareto_front(&same).len(), 3);
    }

    #[test]
    fn means() {
        let mut a = pt("r", 0.2, 0.4);
        a.events = 10;
        let mut b = pt("r", 0.4, 0.8);
        b.events = 20;
        let m = mean_by_rule(&[a, b, pt("s", 1.0, 1.0)]);
        assert_eq!(m.len(), 2);
        assert!((m[0].satisfaction - 0.3).abs() < 1e-12);
        assert!((m[0].stability - 0.6).abs() < 1e-12);
        assert_eq!(m[0].events, 15);
    }

    proptest! {
        #[test]
        fn front_matches_pairwise_oracle(raw in prop::collection::vec((0u8..6, 0u8..6), 0..40)) {
            // coarse grid so ties and duplicates are common
            let pts: Vec<MetricPoint> = raw
                .iter()
                .enumerate()
                .map(|(k, &(s, t))| pt(&format!("r{k:02}"), s as f64 / 5.0, t as f64 / 5.0))
                .collect();
            prop_assert_eq!(pareto_front(&pts), oracle(&pts));
        }
    }
}
