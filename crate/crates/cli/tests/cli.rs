use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bigenus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bigenus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Value of column `name` in a two-line header/row CSV block.
fn column(csv: &str, name: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    row[k].to_string()
}

fn edge_lines(path: &Path) -> usize {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .count()
}

#[test]
fn generate_writes_edge_lists() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], usize); 3] = [
        (&["--n1", "3", "--n2", "3", "--p", "1"], 9),
        (&["--standard", "--n1", "8", "--n2", "2", "--p", "0.5"], 8),
        (&["--n1", "5", "--n2", "5", "--p", "0"], 0),
    ];
    for (k, (flags, edges)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("g{k}.txt"));
        let mut args = vec!["generate"];
        args.extend_from_slice(flags);
        args.extend_from_slice(&["--out", path.to_str().unwrap()]);
        let out = bigenus(&args);
        assert!(out.status.success(), "{}", stderr(&out));
        assert_eq!(edge_lines(&path), *edges);
        assert!(stderr(&out).contains(&format!("edges={edges}")));
    }
}

#[test]
fn estimate_k33_and_empty() {
    let dir = tempfile::tempdir().unwrap();
    let k33 = dir.path().join("k33.txt");
    let out = bigenus(&[
        "generate",
        "--n1",
        "3",
        "--n2",
        "3",
        "--p",
        "1",
        "--out",
        k33.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let rot = dir.path().join("rot.txt");
    let out = bigenus(&[
        "estimate",
        "--graph",
        k33.to_str().unwrap(),
        "--rotation-out",
        rot.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = stdout(&out);
    assert_eq!(column(&csv, "lower"), "1");
    let upper: u64 = column(&csv, "upper").parse().unwrap();
    assert!((1..=2).contains(&upper));
    assert_eq!(fs::read_to_string(&rot).unwrap().lines().count(), 6);
    assert!(stderr(&out).contains("nonorientable_lower=1"));

    let out = bigenus(&["estimate", "--n1", "5", "--n2", "5", "--p", "0"]);
    assert!(out.status.success());
    let csv = stdout(&out);
    assert_eq!(column(&csv, "lower"), "0");
    assert_eq!(column(&csv, "upper"), "0");
}

#[test]
fn estimate_dense_instance_near_prediction() {
    let out = bigenus(&[
        "estimate", "--n1", "80", "--n2", "80", "--p", "0.5", "--seed", "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = stdout(&out);
    let upper: f64 = column(&csv, "upper").parse().unwrap();
    let prediction: f64 = column(&csv, "prediction").parse().unwrap();
    assert_eq!(prediction, 800.0);
    let ratio = upper / prediction;
    assert!((0.8..=1.2).contains(&ratio), "ratio {ratio}");
}

#[test]
fn estimate_appends_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    for seed in ["1", "2"] {
        let out = bigenus(&[
            "estimate",
            "--n1",
            "6",
            "--n2",
            "6",
            "--p",
            "0.6",
            "--seed",
            seed,
            "--out",
            csv.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("schema,"));
}

#[test]
fn oracle_and_predict() {
    let dir = tempfile::tempdir().unwrap();
    let k33 = dir.path().join("k33.txt");
    bigenus(&[
        "generate",
        "--n1",
        "3",
        "--n2",
        "3",
        "--p",
        "1",
        "--out",
        k33.to_str().unwrap(),
    ]);
    let out = bigenus(&["oracle", "--graph", k33.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("genus=1"));

    let out = bigenus(&["predict", "--n1", "100", "--n2", "100", "--p", "0.5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("regime=dense-4gon"));
    assert!(text.contains("prediction=1250.000000"));
}

#[test]
fn guard_and_io_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let k44 = dir.path().join("k44.txt");
    bigenus(&[
        "generate",
        "--n1",
        "4",
        "--n2",
        "4",
        "--p",
        "1",
        "--out",
        k44.to_str().unwrap(),
    ]);
    let out = bigenus(&[
        "oracle",
        "--graph",
        k44.to_str().unwrap(),
        "--max-rotations",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    let out = bigenus(&[
        "generate",
        "--standard",
        "--n1",
        "30",
        "--n2",
        "25",
        "--p",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("nope.txt");
    let out = bigenus(&["estimate", "--graph", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "bipartite 2 2\n0 1\n").unwrap();
    let out = bigenus(&["estimate", "--graph", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn experiment_grid_shape_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let one = write_config(dir.path(), "one.cfg", "n1 = 10\nn2 = 10\np = 0.5\n");
    let out = bigenus(&["experiment", "--config", &one]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(data_rows(&stdout(&out)).len(), 1);

    let grid = write_config(
        dir.path(),
        "grid.cfg",
        "n1 = 12\nn2 = 12\np = 0.2, 0.4, 0.6\ntrials = 5\nseed = 40\n",
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let out = bigenus(&[
            "experiment",
            "--config",
            &grid,
            "--out",
            path.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 15);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[6], (40 + k % 5).to_string(), "seed column of row {k}");
        assert_eq!(row.last().unwrap(), "ok");
    }

    // Resume: drop two rows, rerun, and get the same file back.
    let truncated: Vec<&str> = text.lines().take(14).collect();
    fs::write(&a, truncated.join("\n") + "\n").unwrap();
    let out = bigenus(&[
        "experiment",
        "--config",
        &grid,
        "--out",
        a.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(
        stderr(&out).contains("computed=2 reused=13"),
        "{}",
        stderr(&out)
    );
    assert_eq!(fs::read_to_string(&a).unwrap(), text);
}

#[test]
fn experiment_small_part_regimes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.cfg",
        "n1 = 100000\nn2 = 5\np = nexp:-0.6, nexp:-0.4, 0.3\ntrials = 10\n",
    );
    let out = bigenus(&["experiment", "--config", &cfg]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = stdout(&out);
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let regime = header.iter().position(|h| *h == "regime").unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 30);
    for (k, row) in rows.iter().enumerate() {
        let want = ["small-part-c", "small-part-b", "small-part-a"][k / 10];
        assert_eq!(row[regime], want, "row {k}");
    }
}

#[test]
fn experiment_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.cfg", "n1 = 10\nwhat = 3\n");
    let out = bigenus(&["experiment", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"));
}
