use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haar-trace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn zero_xi_gives_one() {
    let out = run(&[
        "charfn",
        "--group",
        "o-even-plus",
        "--n",
        "4",
        "--m",
        "2",
        "--xi",
        "0,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["tool"], "haar-trace");
    assert_eq!(v["config"]["command"], "charfn");
    assert_eq!(v["result"]["value"]["re"].as_f64(), Some(1.0));
    assert_eq!(v["result"]["value"]["im"].as_f64(), Some(0.0));
}

#[test]
fn negative_xi_components_parse() {
    let out = run(&["charfn", "--group", "sp", "--n", "1", "--m", "1", "--xi", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    let re = json(&out)["result"]["value"]["re"].as_f64().unwrap();
    // Tr U on Sp(2) is symmetric about 0, so F(−1) = F(1) = J₁(2)
    assert!((re - 0.576_724_807_756_873_4).abs() < 1e-9);
}

#[test]
fn moment_verification_passes() {
    let out = run(&[
        "verify",
        "--suite",
        "moments",
        "--group",
        "sp",
        "--n",
        "2",
        "--max-weight",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    let section = &v["result"][0];
    assert_eq!(section["suite"], "moments");
    let entries = section["report"]["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    assert!(entries
        .iter()
        .filter(|e| e["in_range"] == true)
        .all(|e| e["pass"] == true));
}

#[test]
fn big_c_table_csv() {
    let out = run(&["report", "--table", "big-c"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# {"));
    let meta: Value = serde_json::from_str(&header[2..]).unwrap();
    assert_eq!(meta["config"]["table"], "big-c");
    let body = lines.collect::<Vec<_>>().join("\n");
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 11);
    let m = |r: &csv::StringRecord| r[0].parse::<f64>().unwrap();
    assert_eq!(m(&rows[0]), 7.0);
    assert_eq!(m(rows.last().unwrap()), 1000.0);
}

#[test]
fn convergence_series_dedupes_and_handles_empty_lists() {
    let out = run(&["report", "--table", "convergence", "--n", "2", "1", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body.len(), 3);
    assert!(body[1].starts_with("1,") && body[2].starts_with("2,"));
    let l2 = |line: &str| line.split(',').nth(2).unwrap().parse::<f64>().unwrap();
    assert!(l2(body[2]) < l2(body[1]));

    let out = run(&["report", "--table", "convergence"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1);
}

#[test]
fn csv_file_output_gets_a_metadata_sidecar() {
    let path = scratch("sample.csv");
    let p = path.to_str().unwrap();
    let out = run(&[
        "sample",
        "--group",
        "o-odd-minus",
        "--n",
        "3",
        "--m",
        "2",
        "--count",
        "5",
        "--seed",
        "9",
        "--out",
        p,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("X1,X2"));
    assert_eq!(text.lines().count(), 6);
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(format!("{p}.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["seed"], 9);
    assert_eq!(meta["config"]["group"], "o-odd-minus");
    assert!(meta["version"].is_string());
}

#[test]
fn sample_json_matches_csv() {
    let args = [
        "sample", "--group", "sp", "--n", "2", "--m", "2", "--count", "4", "--seed", "3",
    ];
    let csv_out = run(&args);
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let v = json(&run(&json_args));
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let text = String::from_utf8(csv_out.stdout).unwrap();
    let first: Vec<f64> = text
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    let from_json: Vec<f64> = rows[0]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(first, from_json);
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &[
            "sample", "--group", "sp", "--n", "3", "--m", "3", "--count", "50", "--seed", "17",
        ][..],
        &[
            "verify", "--suite", "charfn", "--group", "sp", "--n", "4", "--m", "2", "--count", "30",
        ][..],
        &["bounds", "--m", "4", "--n", "256"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn bounds_with_pointwise_part() {
    let out = run(&["bounds", "--m", "2", "--n", "8", "--group", "sp", "--xi", "1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["result"].to_string().contains("intermediate"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["charfn", "--group", "sp", "--n", "2"][..],
        &["charfn", "--group", "u", "--n", "2", "--m", "1", "--xi", "0"][..],
        &["charfn", "--group", "o-even-minus", "--n", "0", "--m", "1", "--xi", "0"][..],
        &["bounds", "--m", "4", "--n", "256", "--group", "sp"][..],
        &["bounds", "--m", "1", "--n", "256"][..],
        &["report", "--table", "nope"][..],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unreachable_truncation_exits_with_three_and_a_diagnostic() {
    let out = run(&["charfn", "--group", "sp", "--n", "2", "--m", "1", "--xi", "1e7"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["error"], "non-convergence");
    assert_eq!(v["config"]["xi"][0].as_f64(), Some(1e7));
}
