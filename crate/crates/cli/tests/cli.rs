use bbmpc_cli::acceptance::write_fixtures;
use bbmpc_cli::{run, CliOutput};

fn cli(line: &str) -> CliOutput {
    run(std::iter::once("bbmpc").chain(line.split_whitespace()))
}

fn json(out: &CliOutput) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn run_reports_correct_products() {
    let out = cli("run --protocol rho --ring zm:6 --seed 9");
    assert_eq!(out.code, 0);
    let v = json(&out);
    assert_eq!(v["correct"], true);
    assert_eq!(v["products"], 1);
}

#[test]
fn bad_parameters_exit_with_2() {
    for line in [
        "run --protocol nope",
        "run --protocol rho --ring zm:1",
        "run --protocol tau --ring zm:6",
        "distance stat --n 0",
        "codes gen --scheme rs --ring gf:97 --k 4 --c 4",
        "bench --protocol tau --ring mat:5:2",
        "pdtshr --protocol rho --a 1 --a 2 --b 3",
        "outer --circuit /nonexistent.circ",
    ] {
        let out = cli(line);
        assert_eq!(out.code, 2, "{line}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_goes_to_stdout() {
    let out = cli("--help");
    assert_eq!(out.code, 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("outer"));
}

#[test]
fn bench_csv_has_one_row_per_pair() {
    let out = cli("bench --protocol rho,tau --ring zm:6,gf:97 --trials 5");
    assert_eq!(out.code, 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    // tau is undefined over Z_6, so three rows
    assert_eq!(rows.records().count(), 3);
    assert!(text.lines().next().unwrap().starts_with("protocol,ring,params,trials,elements_transmitted"));
}

#[test]
fn distance_matches_exact_value() {
    let v = json(&cli("distance stat --ring zm:2 --n 2 --x 1"));
    let d = v["distance"]["decimal"].as_f64().unwrap();
    assert!(d > 0.0 && d <= 2f64.powf(-0.5));
    let v = json(&cli("distance psi --M 3 --k 3"));
    assert_eq!(v["within_bound"], true);
}

#[test]
fn pdtshr_given_values() {
    let v = json(&cli("pdtshr --protocol tau --ring gf:97 --a 3 --a 4 --b 5 --b 6"));
    assert_eq!(v["correct"], true);
    let v = json(&cli("pdtshr --protocol rho --ring mat:5:2 --a 1,2,3,4 --b 0,1,1,0"));
    assert_eq!(v["correct"], true);
}

#[test]
fn circuit_commands() {
    let dir = std::env::temp_dir().join(format!("bbmpc-cli-{}", std::process::id()));
    let (c, i) = write_fixtures(&dir).unwrap();
    let (c, i) = (c.display().to_string(), i.display().to_string());

    let v = json(&cli(&format!("eval --circuit {c} --inputs {i} --backend psi")));
    // s = 3*7 + 5*11 = 76, t = 76^2 mod 97 = 53
    assert_eq!(v["outputs"][0]["value"], "76");
    assert_eq!(v["outputs"][1]["value"], "53");

    let out =
        cli(&format!("outer --circuit {c} --inputs {i} --challenges other-client --replication typewise"));
    assert_eq!(out.code, 0);
    assert_eq!(json(&out)["outputs"][1]["value"], "53");

    let out = cli(&format!("outer --circuit {c} --inputs {i} --cheat 1:0:0:1"));
    assert_eq!(out.code, 0);
    let v = json(&out);
    assert_eq!(v["outcome"], "aborted");
    assert_eq!(v["abort"]["stage"], "reshare-relation");

    let report = dir.join("report.json");
    let out = cli(&format!("eval --circuit {c} --inputs {i} --out {}", report.display()));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&report).unwrap().contains("\"correct\": true"));

    let out = cli(&format!("outer --circuit {c} --servers 4 --degree 2"));
    assert_eq!(out.code, 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn timing_adds_wall_time_only_on_request() {
    assert!(json(&cli("run --protocol rho"))["wall_time_ms"].is_null());
    assert!(json(&cli("run --protocol rho --timing"))["wall_time_ms"].is_number());
}

#[test]
fn transcript_is_written() {
    let path = std::env::temp_dir().join(format!("bbmpc-transcript-{}.jsonl", std::process::id()));
    let out = cli(&format!("run --protocol rho --transcript {}", path.display()));
    assert_eq!(out.code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().count() > 1);
    for line in text.lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
    std::fs::remove_file(&path).ok();
}
