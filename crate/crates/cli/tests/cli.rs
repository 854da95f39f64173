//! End-to-end tests of the `ebac` binary.

use std::path::PathBuf;
use std::process::Command;

use ebac_cli::number::parse_exact;
use ebac_cli::scenario::{ClassEntry, LinkEntry, ScenarioFile, SimulationEntry};
use ebac_cli::Scenario;
use ebac_core::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn reference_path() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios/reference.json")
        .display()
        .to_string()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn ebac(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_ebac")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(run: &Run) -> Value {
    serde_json::from_str(&run.stdout).unwrap_or_else(|e| panic!("{e}: {}", run.stdout))
}

/// Exact value of an emitted quantity object.
fn exact(q: &Value) -> Rational {
    let num = q["num"].as_str().unwrap_or_else(|| panic!("not finite: {q}"));
    parse_exact(&format!("{num}/{}", q["den"].as_str().unwrap())).unwrap()
}

fn float(q: &Value) -> f64 {
    q["value"].as_str().unwrap().parse().unwrap()
}

fn scenario_file(text: &str) -> tempfile::NamedTempFile {
    let file = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(file.path(), text).unwrap();
    file
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn reference_breakpoints_match_known_values() {
    let run = ebac(&["eb", "--scenario", &reference_path(), "--format", "json"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let gammas: Vec<f64> = json(&run)["gamma"].as_array().unwrap().iter().map(float).collect();
    for (got, want) in gammas.iter().zip([1.3, 58.3, 85.2]) {
        assert!((got * 1000.0 - want).abs() <= 0.05, "{got} s vs {want} ms");
    }
}

#[test]
fn eb_beyond_flattening_is_total_rate() {
    let run = ebac(&[
        "eb",
        "--scenario",
        &reference_path(),
        "--D",
        "0.5",
        "--counts",
        "1,1,1",
        "--format",
        "json",
    ]);
    assert_eq!(run.code, 0);
    let report = json(&run);
    assert_eq!(exact(&report["aggregate_eb"]), parse_exact("1.43").unwrap());
    assert_eq!(report["candidates"].as_array().unwrap().len(), 5);
    assert_eq!(report["thresholds"].as_array().unwrap().len(), 4);
    assert_eq!(report["regime"], 4);
    assert_eq!(
        report["breakpoint_order"],
        serde_json::json!(["type1", "type2", "type3"])
    );

    // Independent check: sup over a dense grid of Σ α_i(s)/(s + D), in Mb/s.
    let specs = [
        (29.0, 1e-3, 0.7, 38e-3),
        (7.0, 1e-3, 0.7, 368e-3),
        (0.3, 15e-3, 0.03, 38e-3),
    ];
    let alpha = |t: f64| specs.iter().map(|(p, m, r, b)| (p * t + m).min(r * t + b)).sum::<f64>();
    let grid = (1..=200_000)
        .map(|k| k as f64 * 1e-4)
        .map(|s| alpha(s) / (s + 0.5))
        .fold(1.43, f64::max);
    assert!((grid - 1.43).abs() < 1e-9, "{grid}");
}

#[test]
fn zero_delay_is_unbounded_but_not_an_error() {
    let run = ebac(&["eb", "--scenario", &reference_path(), "--D", "0"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.contains("aggregate EB = unbounded"), "{}", run.stdout);
    let run = ebac(&["eb", "--scenario", &reference_path(), "--D", "0", "--format", "json"]);
    assert_eq!(json(&run)["aggregate_eb"]["value"], "unbounded");
}

#[test]
fn buffer_inverts_through_ec() {
    let path = reference_path();
    for delay in ["0.01", "0.1", "0.5"] {
        let buffer = json(&ebac(&[
            "buffer",
            "--scenario",
            &path,
            "--D",
            delay,
            "--format",
            "json",
        ]));
        let b = exact(&buffer["buffer"]);
        let fraction = format!("{}/{}", b.numer(), b.denom());
        let ec = json(&ebac(&[
            "ec",
            "--scenario",
            &path,
            "--B",
            &fraction,
            "--format",
            "json",
        ]));
        assert_eq!(
            exact(&ec["equivalent_capacity"]),
            exact(&buffer["aggregate_eb"]),
            "D = {delay}"
        );
        assert_eq!(exact(&buffer["capacity_at_buffer"]), exact(&buffer["aggregate_eb"]));
    }
}

#[test]
fn ec_without_buffer_is_a_usage_error() {
    let run = ebac(&["ec", "--scenario", &reference_path()]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("--B"), "{}", run.stderr);
}

#[test]
fn admit_reports_decision_through_exit_code() {
    let path = reference_path();
    let run = ebac(&[
        "admit",
        "--scenario",
        &path,
        "--D",
        "0.5",
        "--C",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(run.code, 0);
    let report = json(&run);
    assert_eq!(report["accepted"], true);
    assert_eq!(exact(&report["aggregate_eb"]), parse_exact("1.43").unwrap());
    assert_eq!(exact(&report["headroom"]), parse_exact("0.57").unwrap());
    assert!(report["required_buffer"].is_object());

    // 15 flows of type 1 need at least 10.5 Mb/s sustained.
    let run = ebac(&["admit", "--scenario", &path, "--counts", "15,0,0", "--format", "json"]);
    assert_eq!(run.code, 3);
    let report = json(&run);
    assert_eq!(report["accepted"], false);
    assert!(report["required_buffer"].is_null());
    assert!(float(&report["headroom"]) < 0.0);
}

#[test]
fn admit_single_flow_headroom() {
    let path = reference_path();
    let eb = json(&ebac(&[
        "eb",
        "--scenario",
        &path,
        "--counts",
        "1,0,0",
        "--format",
        "json",
    ]));
    let e1 = exact(&eb["aggregate_eb"]);
    let run = ebac(&[
        "admit",
        "--scenario",
        &path,
        "--counts",
        "1,0,0",
        "--C",
        "5",
        "--format",
        "json",
    ]);
    assert_eq!(run.code, 0);
    assert_eq!(exact(&json(&run)["headroom"]), parse_exact("5").unwrap() - e1);
}

#[test]
fn admit_checks_provisioned_buffer() {
    let run = ebac(&["admit", "--scenario", &reference_path(), "--B", "1", "--format", "json"]);
    assert_eq!(json(&run)["buffer_sufficient"], false);
    let run = ebac(&["admit", "--scenario", &reference_path(), "--B", "1000"]);
    assert!(
        run.stdout.contains("provisioned buffer sufficient = true"),
        "{}",
        run.stdout
    );
}

#[test]
fn sweep_rows_have_the_expected_shape() {
    let run = ebac(&[
        "sweep-d",
        "--scenario",
        &reference_path(),
        "--counts",
        "1,1,0",
        "--d-min",
        "0.01",
        "--d-max",
        "1.0",
        "--steps",
        "100",
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.starts_with("D,eb_aggregate,sum_eb_individual,buffer\n"));
    let rows: Vec<Vec<f64>> = csv_rows(&run.stdout)
        .iter()
        .map(|r| r.iter().map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 100);
    // Types 1 and 2: Σb/Σr = 406 kb / 1.4 Mb/s = 0.29 s.
    let tau = 0.406 / 1.4;
    for pair in rows.windows(2) {
        assert!(pair[0][0] < pair[1][0]);
        assert!(pair[1][1] <= pair[0][1]);
        assert!(pair[1][3] >= pair[0][3]);
    }
    for row in &rows {
        assert!(row[1] <= row[2]);
        if row[0] >= tau {
            assert_eq!(row[1], 1.4);
            assert_eq!(row[3], 406.0);
        }
    }
}

#[test]
fn single_class_sweep_has_no_multiplexing_gain() {
    let run = ebac(&[
        "sweep-d",
        "--scenario",
        &reference_path(),
        "--counts",
        "0,1,0",
        "--d-min",
        "0.001",
        "--d-max",
        "2",
        "--steps",
        "40",
    ]);
    for row in csv_rows(&run.stdout) {
        assert_eq!(row[1], row[2]);
    }
}

#[test]
fn sweep_rejects_bad_ranges() {
    for args in [["0.5", "0.1", "10"], ["0", "1", "10"], ["0.1", "1", "1"]] {
        let run = ebac(&[
            "sweep-d",
            "--scenario",
            &reference_path(),
            "--d-min",
            args[0],
            "--d-max",
            args[1],
            "--steps",
            args[2],
        ]);
        assert_eq!(run.code, 2, "{args:?}");
    }
}

#[test]
fn region_frontier_csv() {
    let run = ebac(&["region", "--scenario", &reference_path(), "--D", "0.1"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.starts_with("n1,n2,n3\n"));
    let rows = csv_rows(&run.stdout);
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.len() == 3));
    let mut sorted = rows.clone();
    sorted.sort_by_key(|r| r.iter().map(|c| c.parse::<u64>().unwrap()).collect::<Vec<_>>());
    assert_eq!(sorted, rows);
}

#[test]
fn region_tradeoff_tables() {
    let path = reference_path();
    let run = ebac(&["region", "--scenario", &path, "--fixed", "*,*,0"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.starts_with("n1,max_n2\n"));
    let run = ebac(&["region", "--scenario", &path, "--fixed", "0,0,*"]);
    assert!(run.stdout.starts_with("max_n3\n"));
    assert_eq!(csv_rows(&run.stdout).len(), 1);

    let run = ebac(&["region", "--scenario", &path, "--pairwise"]);
    assert!(run.stdout.starts_with("class_a,class_b,n_a,max_n_b\n"));
    let pairs: std::collections::BTreeSet<(String, String)> = csv_rows(&run.stdout)
        .into_iter()
        .map(|r| (r[0].clone(), r[1].clone()))
        .collect();
    assert_eq!(pairs.len(), 3);

    let run = ebac(&["region", "--scenario", &path, "--fixed", "1,1,1"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("free"), "{}", run.stderr);
}

#[test]
fn zero_rate_class_needs_a_cap() {
    let file = scenario_file(
        r#"{"classes": [{"name": "idle", "p": 1, "M": 1, "r": 0, "b": 2, "count": 1}],
            "link": {"C": 10, "D": 0.1}}"#,
    );
    let path = file.path().to_str().unwrap();
    let run = ebac(&["region", "--scenario", path]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("`idle`"), "{}", run.stderr);
    let run = ebac(&["region", "--scenario", path, "--cap", "5", "--format", "json"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
}

#[test]
fn simulate_holds_and_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let run = ebac(&[
        "simulate",
        "--scenario",
        &reference_path(),
        "--D",
        "0.2",
        "--dt",
        "0.001",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0, "{}{}", run.stdout, run.stderr);
    let report = json(&run);
    assert_eq!(report["holds"], true);
    assert!(exact(&report["max_virtual_delay"]) <= exact(&report["delay_limit"]));
    let text = std::fs::read_to_string(trace).unwrap();
    assert!(text.starts_with("t,cumulative_in,cumulative_out,backlog\n"));
    let rows = csv_rows(&text);
    assert!(rows.len() > 100);
    assert_eq!(rows[0], ["0", "0", "0", "0"]);
}

#[test]
fn simulate_uses_scenario_settings() {
    let file = scenario_file(
        r#"{"classes": [{"name": "a", "p": 2, "M": 1, "r": 0.5, "b": 4, "count": 2}],
            "link": {"C": 10, "D": 0.5},
            "simulation": {"dt": 0.01, "horizon": 3}}"#,
    );
    let run = ebac(&["simulate", "--scenario", file.path().to_str().unwrap()]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report = json(&run);
    assert_eq!(exact(&report["dt"]), parse_exact("0.01").unwrap());
    assert_eq!(exact(&report["horizon"]), parse_exact("3").unwrap());
}

#[test]
fn invalid_scenarios_exit_2_naming_the_problem() {
    let cases = [
        (
            r#"{"classes": [{"name": "x", "p": 1, "M": 1, "r": 2, "b": 3, "count": 1}], "link": {"C": 1, "D": 1}}"#,
            "`x`",
        ),
        (
            r#"{"classes": [{"name": "x", "p": 3, "M": 1, "r": 2, "b": 3, "count": 1, "colour": 1}], "link": {"C": 1, "D": 1}}"#,
            "colour",
        ),
        (
            r#"{"classes": [{"name": "x", "p": 3, "M": 1, "r": 2, "b": 3, "count": 1}], "link": {"C": 1, "D": 1, "buffer": 3}}"#,
            "buffer",
        ),
        (
            r#"{"classes": [{"name": "x", "p": 3, "M": 1, "r": 2, "b": 3, "count": 1}], "link": {"C": -1, "D": 1}}"#,
            "C",
        ),
        (
            r#"{"classes": [{"name": "x", "p": "three", "M": 1, "r": 2, "b": 3, "count": 1}], "link": {"C": 1, "D": 1}}"#,
            "three",
        ),
    ];
    for (text, needle) in cases {
        let file = scenario_file(text);
        let run = ebac(&["eb", "--scenario", file.path().to_str().unwrap()]);
        assert_eq!(run.code, 2, "{text}");
        assert!(run.stderr.contains(needle), "{needle}: {}", run.stderr);
    }
    let run = ebac(&["eb", "--scenario", "/nonexistent/scenario.json"]);
    assert_eq!(run.code, 2);
    let run = ebac(&["eb", "--scenario", &reference_path(), "--counts", "1,1"]);
    assert_eq!(run.code, 2);
}

#[test]
fn equal_burst_and_packet_gives_a_pure_jump() {
    let text =
        r#"{"classes": [{"name": "jump", "p": 5, "M": 2, "r": 1, "b": 2, "count": 1}], "link": {"C": 10, "D": 0.5}}"#;
    let scenario = Scenario::from_json(text).unwrap();
    let curve = scenario.catalog()[0].curve();
    assert!(curve.breakpoints().is_empty());
    assert_eq!(curve.pieces().len(), 1);
    let file = scenario_file(text);
    let run = ebac(&["eb", "--scenario", file.path().to_str().unwrap(), "--format", "json"]);
    assert_eq!(run.code, 0);
    let report = json(&run);
    assert_eq!(exact(&report["gamma"][0]), parse_exact("0").unwrap());
    // max(2 kb / 0.5 s, 1 Mb/s): the jump term is only 0.004 Mb/s.
    assert_eq!(exact(&report["aggregate_eb"]), parse_exact("1").unwrap());
}

#[test]
fn output_is_deterministic_and_out_writes_files() {
    let path = reference_path();
    for args in [
        vec!["eb", "--scenario", &path, "--format", "json"],
        vec![
            "sweep-d",
            "--scenario",
            &path,
            "--d-min",
            "0.01",
            "--d-max",
            "1",
            "--steps",
            "25",
        ],
        vec!["region", "--scenario", &path, "--pairwise"],
    ] {
        let (a, b) = (ebac(&args), ebac(&args));
        assert_eq!(a.stdout, b.stdout);
        assert!(!a.stdout.is_empty());
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let mut with_out = args.clone();
        with_out.extend(["--out", out.to_str().unwrap()]);
        let c = ebac(&with_out);
        assert_eq!(c.code, 0);
        assert!(c.stdout.is_empty());
        assert_eq!(std::fs::read_to_string(out).unwrap(), a.stdout);
    }
}

fn random_exact(rng: &mut ChaCha8Rng) -> ebac_cli::number::Exact {
    let numer: i64 = rng.gen_range(1..1_000_000);
    let denom = [1i64, 2, 3, 7, 10, 1000, 1024][rng.gen_range(0..7)];
    ebac_cli::number::Exact(parse_exact(&format!("{numer}/{denom}")).unwrap())
}

#[test]
fn scenarios_round_trip_through_json() {
    let bundled = Scenario::load(std::path::Path::new(&reference_path())).unwrap();
    assert_eq!(Scenario::from_json(&bundled.to_json()).unwrap(), bundled);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..200 {
        let classes = (0..rng.gen_range(1..5))
            .map(|i| {
                let r = random_exact(&mut rng);
                let m = random_exact(&mut rng);
                ClassEntry {
                    name: format!("c{i}"),
                    p: ebac_cli::number::Exact(&r.0 + &random_exact(&mut rng).0),
                    b: ebac_cli::number::Exact(&m.0 + &random_exact(&mut rng).0),
                    max_packet: m,
                    r,
                    count: rng.gen_range(0..100),
                }
            })
            .collect();
        let file = ScenarioFile {
            classes,
            link: LinkEntry {
                capacity: random_exact(&mut rng),
                delay: random_exact(&mut rng),
                buffer: rng.gen_bool(0.5).then(|| random_exact(&mut rng)),
            },
            simulation: rng.gen_bool(0.5).then(|| SimulationEntry {
                dt: Some(random_exact(&mut rng)),
                horizon: None,
            }),
        };
        let scenario = Scenario::from_file(file).unwrap();
        let text = scenario.to_json();
        assert_eq!(Scenario::from_json(&text).unwrap(), scenario, "case {case}: {text}");
    }
}
