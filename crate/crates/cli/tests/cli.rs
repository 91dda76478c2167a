use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SPEC: &str = r#"
n_entities = 300
n_years = 29
variables = ["r", "i", "p", "o", "m"]
seed = 5

[[coupling]]
driver = "i"
target = "m"
strength = 0.8
"#;

fn vcnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vcnet"))
        .args(args)
        .output()
        .unwrap()
}

fn simulate(dir: &TempDir) -> String {
    let spec = dir.path().join("spec.toml");
    fs::write(&spec, SPEC).unwrap();
    let csv = dir.path().join("panel.csv");
    let out = vcnet(&[
        "simulate",
        "--spec",
        spec.to_str().unwrap(),
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    csv.to_str().unwrap().to_string()
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn simulate_seed_override_changes_output() {
    let dir = TempDir::new().unwrap();
    let csv = simulate(&dir);
    let spec = dir.path().join("spec.toml");
    let other = dir.path().join("other.csv");
    let out = vcnet(&[
        "simulate",
        "--spec",
        spec.to_str().unwrap(),
        "--output",
        other.to_str().unwrap(),
        "--seed",
        "6",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("seed 6"));
    assert_ne!(read(Path::new(&csv)), read(&other));
    let again = dir.path().join("again.csv");
    vcnet(&[
        "simulate",
        "--spec",
        spec.to_str().unwrap(),
        "--output",
        again.to_str().unwrap(),
    ]);
    assert_eq!(read(Path::new(&csv)), read(&again));
}

#[test]
fn analyze_writes_every_output() {
    let dir = TempDir::new().unwrap();
    let csv = simulate(&dir);
    let outdir = dir.path().join("out");
    let out = vcnet(&[
        "analyze",
        "--input",
        &csv,
        "--outdir",
        outdir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in [
        "pair_correlation.tsv",
        "pair_correlation.txt",
        "directionality.tsv",
        "directionality.txt",
        "network.json",
        "correlation_network.dot",
        "directed_network.dot",
        "entity_detail.tsv",
    ] {
        assert!(outdir.join(name).exists(), "{name}");
    }
    let table = read(&outdir.join("directionality.tsv"));
    let im = table
        .lines()
        .find(|l| l.starts_with("[net income(i), market capitalization(m)]"))
        .unwrap();
    assert!(im.ends_with("\t→"), "{im}");
    let json: serde_json::Value =
        serde_json::from_str(&read(&outdir.join("network.json"))).unwrap();
    assert_eq!(json["undirected_edges"].as_array().unwrap().len(), 10);
    assert!(json["directed_edges"]
        .as_array()
        .unwrap()
        .iter()
        .any(|e| e["source"] == "i" && e["target"] == "m"));
    // header plus 300 entities for each of 10 pairs
    assert_eq!(
        read(&outdir.join("entity_detail.tsv")).lines().count(),
        1 + 3000
    );
}

#[test]
fn analyze_format_selection() {
    let dir = TempDir::new().unwrap();
    let csv = simulate(&dir);
    let outdir = dir.path().join("out");
    let out = vcnet(&[
        "analyze",
        "--input",
        &csv,
        "--outdir",
        outdir.to_str().unwrap(),
        "--format",
        "tsv",
    ]);
    assert!(out.status.success());
    assert!(outdir.join("directionality.tsv").exists());
    assert!(!outdir.join("directionality.txt").exists());
}

#[test]
fn analyze_with_schema_file() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("firms.csv");
    let mut text = String::from("firm,fy,sales,exports\n");
    for f in 0..30 {
        for y in 0..8 {
            let t = y as f64;
            let sales = 100.0 + t * (1.0 + f as f64 * 0.1) + (t * 1.3 + f as f64).sin() * 5.0;
            let exports = 50.0 + (t * 0.7 + f as f64).cos() * 4.0 + t;
            text.push_str(&format!("F{f},{},{sales},{exports}\n", 2000 + y));
        }
    }
    fs::write(&csv, text).unwrap();
    let schema = dir.path().join("schema.toml");
    fs::write(
        &schema,
        "entity_column = \"firm\"\nyear_column = \"fy\"\n[[variables]]\ncode = \"sales\"\n[[variables]]\ncode = \"exports\"\nlabel = \"export volume\"\n",
    )
    .unwrap();
    let outdir = dir.path().join("out");
    let out = vcnet(&[
        "analyze",
        "--input",
        csv.to_str().unwrap(),
        "--outdir",
        outdir.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = read(&outdir.join("pair_correlation.tsv"));
    assert_eq!(table.lines().count(), 2);
    assert!(table.contains("[sales, export volume(exports)]"));
    assert!(table.trim_end().ends_with("\t30"));
}

#[test]
fn analyze_failure_leaves_no_outputs() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("bad.csv");
    fs::write(&csv, "entity,year,x,y\nA,2000,1,2\nA,2000,3,4\n").unwrap();
    let outdir = dir.path().join("out");
    let out = vcnet(&[
        "analyze",
        "--input",
        csv.to_str().unwrap(),
        "--outdir",
        outdir.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error:"), "{err}");
    assert!(err.contains("duplicate"), "{err}");
    assert!(!outdir.exists() || fs::read_dir(&outdir).unwrap().next().is_none());
}

#[test]
fn analyze_rejects_bad_parameters() {
    let dir = TempDir::new().unwrap();
    let csv = simulate(&dir);
    let outdir = dir.path().join("out");
    for args in [["--h", "-0.5"], ["--alpha", "1.5"]] {
        let mut all = vec![
            "analyze",
            "--input",
            &csv,
            "--outdir",
            outdir.to_str().unwrap(),
        ];
        all.extend(args);
        assert!(!vcnet(&all).status.success());
    }
    assert!(!vcnet(&["analyze", "--input", "/nonexistent.csv"])
        .status
        .success());
}

#[test]
fn hist_writes_unit_area_density() {
    let dir = TempDir::new().unwrap();
    let csv = simulate(&dir);
    let outdir = dir.path().join("h");
    for statistic in ["delta-f", "pearson"] {
        let out = vcnet(&[
            "hist",
            "--input",
            &csv,
            "--outdir",
            outdir.to_str().unwrap(),
            "--pair",
            "i,m",
            "--statistic",
            statistic,
            "--bins",
            "25",
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for name in ["hist_i_m_delta_f.tsv", "hist_i_m_pearson.tsv"] {
        let text = read(&outdir.join(name));
        let rows: Vec<(f64, f64)> = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("bin_center"))
            .map(|l| {
                let (c, d) = l.split_once('\t').unwrap();
                (c.parse().unwrap(), d.parse().unwrap())
            })
            .collect();
        assert_eq!(rows.len(), 25);
        let area: f64 = rows.iter().map(|(_, d)| d * (2.0 / 25.0)).sum();
        assert!((area - 1.0).abs() < 1e-9, "{name}: {area}");
    }
}

#[test]
fn hist_errors() {
    let dir = TempDir::new().unwrap();
    let csv = simulate(&dir);
    let outdir = dir.path().join("h");
    let base = [
        "hist",
        "--input",
        csv.as_str(),
        "--outdir",
        outdir.to_str().unwrap(),
    ];
    for pair in ["i,q", "i,i", "im"] {
        let mut args = base.to_vec();
        args.extend(["--pair", pair]);
        let out = vcnet(&args);
        assert!(!out.status.success(), "{pair}");
    }
    let mut args = base.to_vec();
    args.extend(["--pair", "i,m", "--bins", "0"]);
    assert!(!vcnet(&args).status.success());
}
