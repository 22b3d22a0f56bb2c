use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde_json::json;

use super::{AgentPolicy, PrefixMetrics, RunResult, SimError};
use crate::model::write_event_log;
use crate::welfare::MetricPoint;

/// `rule,repetition,events,satisfaction,stability,solution_size`; an empty
/// repetition marks a mean over repetitions.
pub fn write_metrics<W: Write>(points: &[MetricPoint], out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    if points.is_empty() {
        w.write_record(["rule", "repetition", "events", "satisfaction", "stability", "solution_size"])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_metrics<R: Read>(input: R) -> Result<Vec<MetricPoint>, SimError> {
    let mut r = csv::Reader::from_reader(input);
    let expected = ["rule", "repetition", "events", "satisfaction", "stability", "solution_size"];
    let headers = r.headers()?.clone();
    if !expected.iter().all(|h| headers.iter().any(|x| x == *h)) {
        return Err(SimError::Config(format!(
            "metrics file needs columns {}; found {}",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(r.deserialize().collect::<Result<Vec<MetricPoint>, _>>()?)
}

pub fn write_series<W: Write>(series: &[PrefixMetrics], out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    for s in series {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `events.log`, `metrics.csv`, `series.csv`, `audit.json` and, when
/// the policy has one, `population.csv` into `dir`.
pub fn write_run_artifacts(dir: &Path, result: &RunResult, policy: &dyn AgentPolicy) -> Result<(), SimError> {
    fs::create_dir_all(dir)?;
    let mut events = BufWriter::new(File::create(dir.join("events.log"))?);
    write_event_log(result.instance.log(), &mut events)?;
    events.flush()?;
    write_metrics(std::slice::from_ref(&result.point), File::create(dir.join("metrics.csv"))?)?;
    write_series(&result.series, File::create(dir.join("series.csv"))?)?;

    let mut pop = Vec::new();
    if policy.write_population(&mut pop)? {
        fs::write(dir.join("population.csv"), pop)?;
    }

    let audit = json!({
        "rule": result.rule.id(),
        "seed": result.seed,
        "agents": result.instance.n_agents(),
        "events": result.instance.log().len(),
        "iterations": result.iterations,
        "updates": result.trajectory.updates(),
        "final_solution": result.solution().iter().map(|p| p.0).collect::<Vec<_>>(),
        "skipped": result.skipped,
        "policy": policy.audit(),
    });
    fs::write(dir.join("audit.json"), serde_json::to_string_pretty(&audit)?)?;
    Ok(())
}
