use std::fs;
use std::path::Path;
use std::process::Command as Proc;

use ccr_cli::args::{Cli, Command};
use ccr_cli::commands::pareto_table;
use ccr_cli::config::{resolve, FileConfig};
use ccr_cli::population::PopulationKind;
use ccr_cli::CliError;
use ccr_core::populations::IdealPointDistribution;
use ccr_core::rules::{RuleSpec, StaticKernel};
use ccr_core::scheduler::{read_metrics, write_metrics};
use ccr_core::welfare::{dominates, MetricPoint};
use clap::Parser;

fn settings(argv: &[&str], file: &str) -> Result<ccr_cli::config::RunSettings, CliError> {
    let cli = Cli::try_parse_from(argv).unwrap();
    let file = FileConfig::parse(file)?;
    match &cli.command {
        Command::Simulate(a) => resolve(&file, a, None),
        Command::Sweep(a) => resolve(&file, &a.run, Some(a)),
        _ => unreachable!(),
    }
}

#[test]
fn simulate_flags_make_a_valid_config() {
    let s = settings(
        &[
            "ccr", "simulate", "--population", "euclidean:normal", "--agents", "20", "--events", "300", "--rule",
            "RAPS||0.5|EVER_VOTED",
        ],
        "",
    )
    .unwrap();
    assert_eq!(s.rules, [RuleSpec::new(StaticKernel::Raps, 0.5)]);
    assert_eq!(s.population, PopulationKind::Euclidean(IdealPointDistribution::normal()));
    assert_eq!((s.agents, s.events), (20, 300));
}

#[test]
fn unknown_rule_names_the_token() {
    match settings(&["ccr", "simulate", "--rule", "APS|WOBBLY:NUM_EVENTS:3|0.5"], "") {
        Err(CliError::Usage(m)) => assert!(m.contains("\"WOBBLY\""), "{m}"),
        other => panic!("{other:?}"),
    }
    match settings(&["ccr", "simulate", "--rule", "APS||0.5", "--population", "euclidean:lumpy"], "") {
        Err(CliError::Usage(m)) => assert!(m.contains("\"lumpy\""), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn flags_override_file_values() {
    let file = "rule = \"APS||0.5\"\nevents = 150\nseed = 9\n[llm]\nmock = true\n";
    let s = settings(&["ccr", "simulate", "--events", "250"], file).unwrap();
    assert_eq!(s.events, 250);
    assert_eq!(s.seed, 9);
    assert!(s.llm.mock);
    let s = settings(&["ccr", "simulate", "--rule", "RAPS||0.5"], file).unwrap();
    assert_eq!(s.rules[0].kernel, StaticKernel::Raps);
}

#[test]
fn config_schema_and_conflicts() {
    assert!(matches!(FileConfig::parse("evnts = 3"), Err(CliError::Schema(_))));
    assert!(matches!(FileConfig::parse("events = \"many\""), Err(CliError::Schema(_))));
    assert!(matches!(
        settings(&["ccr", "sweep", "--rule", "APS||0.5", "--grid", "standard"], ""),
        Err(CliError::Usage(_))
    ));
    assert!(matches!(settings(&["ccr", "simulate"], ""), Err(CliError::Usage(_))));
    assert_eq!(settings(&["ccr", "sweep"], "").unwrap().rules.len(), 54);
    assert_eq!(settings(&["ccr", "sweep"], "grid = \"full\"").unwrap().rules.len(), 102);
    assert!(matches!(settings(&["ccr", "sweep", "--repetitions", "0"], ""), Err(CliError::Usage(_))));
}

fn point(rule: &str, sat: f64, stab: f64) -> MetricPoint {
    MetricPoint {
        rule: rule.into(),
        repetition: None,
        events: 10,
        satisfaction: sat,
        stability: stab,
        solution_size: 1.0,
    }
}

#[test]
fn pareto_flags_match_pairwise_dominance() {
    let single = pareto_table(&[point("a", 0.5, 0.5)]);
    assert_eq!(single.len(), 1);
    assert!(!single[0].dominated);

    let pts = vec![
        point("a", 0.9, 0.1),
        point("b", 0.5, 0.5),
        point("c", 0.4, 0.4),
        point("d", 0.1, 0.9),
        point("e", 0.5, 0.5),
    ];
    for row in pareto_table(&pts) {
        let p = pts.iter().find(|p| p.rule == row.rule).unwrap();
        assert_eq!(row.dominated, pts.iter().any(|q| dominates(q, p)), "{}", row.rule);
    }
}

fn ccr() -> Proc {
    Proc::new(env!("CARGO_BIN_EXE_ccr"))
}

fn write_points(path: &Path, points: &[MetricPoint]) {
    write_metrics(points, fs::File::create(path).unwrap()).unwrap();
}

#[test]
fn pareto_unions_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write_points(&a, &[point("x", 0.9, 0.2)]);
    write_points(&b, &[point("y", 0.3, 0.8), point("z", 0.2, 0.1)]);
    let out = dir.path().join("front.csv");
    let st = ccr().args(["pareto", a.to_str().unwrap(), b.to_str().unwrap(), "-o", out.to_str().unwrap()]).status().unwrap();
    assert!(st.success());
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rule,events,satisfaction,stability,solution_size,dominated");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("x,") && lines[1].ends_with("false"));
    assert!(lines[3].starts_with("z,") && lines[3].ends_with("true"));

    fs::write(&b, "rule,score\nx,1\n").unwrap();
    let st = ccr().args(["pareto", b.to_str().unwrap()]).status().unwrap();
    assert_eq!(st.code(), Some(1));
}

#[test]
fn simulate_then_replay_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let st = ccr()
        .args(["simulate", "--rule", "RAPS|SMOOTH:NUM_UPDATES:0.3|0.5|EVER_VOTED", "--events", "120", "--seed", "5"])
        .args(["--population", "euclidean:two-peaks", "-o", run.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(st.success());
    let out = ccr().args(["replay", run.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let replayed = read_metrics(&out.stdout[..]).unwrap();
    let stored = read_metrics(fs::File::open(run.join("metrics.csv")).unwrap()).unwrap();
    assert_eq!(replayed, stored);

    // tampering with the stored series is caught
    let series = fs::read_to_string(run.join("series.csv")).unwrap();
    fs::write(run.join("series.csv"), series.replacen(",0.", ",1.", 1)).unwrap();
    let st = ccr().args(["replay", run.to_str().unwrap()]).status().unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn sweeps_repeat_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let go = |name: &str| {
        let out = dir.path().join(name);
        let st = ccr()
            .args(["sweep", "--grid", "static", "--repetitions", "2", "--events", "60", "--seed", "3"])
            .args(["-o", out.to_str().unwrap(), "--keep-runs"])
            .status()
            .unwrap();
        assert!(st.success());
        out
    };
    let a = go("a");
    let b = go("b");
    assert_eq!(fs::read(a.join("aggregated.csv")).unwrap(), fs::read(b.join("aggregated.csv")).unwrap());
    assert_eq!(read_metrics(fs::File::open(a.join("runs.csv")).unwrap()).unwrap().len(), 12);
    assert_eq!(fs::read_dir(a.join("runs")).unwrap().count(), 12);
}

#[test]
fn exit_codes() {
    let st = ccr().args(["verify", "--only", "smoothing"]).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let out = ccr().args(["verify", "--only", "swm", "--inject-fault", "raw-count-tie"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FALSIFIED"));
    let st = ccr().args(["simulate", "--rule", "NOPE||0.5"]).status().unwrap();
    assert_eq!(st.code(), Some(1));
    let st = ccr()
        .args(["simulate", "--rule", "APS||0.7", "--population", "llm", "--llm-base-url", "http://127.0.0.1:9"])
        .env_remove("CCR_LLM_API_KEY")
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(3));
    let st = ccr()
        .args(["simulate", "--rule", "APS||0.7", "--population", "llm", "--mock-llm", "--events", "20"])
        .env_remove("CCR_LLM_API_KEY")
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
}
