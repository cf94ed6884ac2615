use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hetmotif(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hetmotif"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = hetmotif(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn error_record(out: &Output) -> serde_json::Value {
    assert!(!out.status.success());
    serde_json::from_slice(out.stderr.trim_ascii()).unwrap()
}

fn synth(dir: &Path) -> String {
    let csv = dir.join("tx.csv").to_str().unwrap().to_string();
    ok(&[
        "synth",
        "--out",
        &csv,
        "--m",
        "1500",
        "--clients",
        "300",
        "--cards",
        "360",
        "--merchants",
        "100",
        "--terminals",
        "130",
        "--fraud-rate",
        "0.01",
        "--seed",
        "4",
        "--span",
        "3d",
        "--plant",
        "repeat-pair:instances=4,repeats=3,window=1h,fraud=true",
    ]);
    csv
}

#[test]
fn run_writes_every_output_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let stdout = ok(&[
        "run",
        "--input",
        &csv,
        "--replicas",
        "4",
        "--seed",
        "7",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert!(stdout.contains("classes over 4 random networks"), "{stdout}");
    ok(&[
        "run",
        "--input",
        &csv,
        "--replicas",
        "4",
        "--seed",
        "7",
        "--workers",
        "2",
        "--out",
        b.to_str().unwrap(),
    ]);
    for name in [
        "stats.json",
        "census_original.csv",
        "census_replica_0.csv",
        "census_replica_3.csv",
        "significance.json",
        "significance.csv",
        "ratio_evolution.csv",
        "catalog.txt",
    ] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth(dir.path());
    let out = dir.path().join("out");
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "input = {csv:?}\ngraph = \"entity\"\nreplicas = 2\nrho = 0.5\nout = {:?}\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    ok(&["run", "--config", cfg.to_str().unwrap(), "--replicas", "3"]);
    let stats: serde_json::Value = serde_json::from_slice(&fs::read(out.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["graph"], "entity");
    assert_eq!(stats["random_networks"], 3);
    assert_eq!(stats["rho"], 0.5);
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "replicaz = 3\n").unwrap();
    let rec = error_record(&hetmotif(&["run", "--config", cfg.to_str().unwrap()]));
    assert_eq!(rec["error"], "config");
}

#[test]
fn report_and_catalog_recompute_from_stored_censuses() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth(dir.path());
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();
    ok(&["run", "--input", &csv, "--replicas", "3", "--out", out_s]);
    let before = fs::read(out.join("significance.json")).unwrap();
    ok(&["report", "--out", out_s]);
    assert_eq!(fs::read(out.join("significance.json")).unwrap(), before);

    ok(&["report", "--out", out_s, "--motif-ratio-min", "2", "--min-support", "3"]);
    let catalog = ok(&["catalog", "--report", out_s, "--top", "3"]);
    assert!(
        catalog.starts_with("Motifs (ratio >= 2, f >= 3, 3 random networks)"),
        "{catalog}"
    );
    assert!(catalog.contains("r=inf"), "{catalog}");
}

#[test]
fn census_dumps_to_stdout_with_custom_schema() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    fs::write(&csv, "ts;who;shop;bad\n0;c1;m1;1\n60;c1;m2;0\n120;c2;m1;0\n").unwrap();
    let schema = dir.path().join("schema.txt");
    fs::write(
        &schema,
        "timestamp=ts\nfraud=bad\nclient=who\nmerchant=shop\ndelimiter=semicolon\n",
    )
    .unwrap();
    let dump = ok(&[
        "census",
        "--input",
        csv.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
        "--graph",
        "entity",
    ]);
    let mut lines = dump.lines();
    assert_eq!(lines.next(), Some("graph_id,code,description,count"));
    // Only the paths c1-m1-c2 and m1-c1-m2 are connected triples.
    let total: u64 = lines
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 2);

    let inline = ok(&[
        "census",
        "--input",
        csv.to_str().unwrap(),
        "--schema",
        "timestamp=ts,fraud=bad,client=who,merchant=shop",
        "--delimiter",
        ";",
        "--graph",
        "entity",
    ]);
    assert_eq!(inline, dump);
}

#[test]
fn errors_are_json_records() {
    let rec = error_record(&hetmotif(&["run", "--input", "/definitely/missing.csv"]));
    assert_eq!(rec["error"], "io");
    let rec = error_record(&hetmotif(&["run", "--rho", "2", "--input", "/x.csv"]));
    assert_eq!(rec["error"], "config");
    let out = hetmotif(&["run", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"], "usage");
    let rec = error_record(&hetmotif(&["catalog", "--report", "/definitely/missing.json"]));
    assert_eq!(rec["error"], "io");

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    fs::write(&csv, "txn_id,timestamp,fraud,client,card,merchant\n1,0,0,a,b,c\n").unwrap();
    let rec = error_record(&hetmotif(&["run", "--input", csv.to_str().unwrap()]));
    assert_eq!(rec["error"], "schema");
    assert!(rec["message"].as_str().unwrap().contains("terminal"));
}

#[test]
fn synth_rejects_infeasible_plant() {
    let dir = tempfile::tempdir().unwrap();
    let rec = error_record(&hetmotif(&[
        "synth",
        "--out",
        dir.path().join("x.csv").to_str().unwrap(),
        "--merchants",
        "2",
        "--terminals",
        "2",
        "--plant",
        "recurring-client:instances=1,merchants=5,window=1h",
    ]));
    assert_eq!(rec["error"], "config");
}
