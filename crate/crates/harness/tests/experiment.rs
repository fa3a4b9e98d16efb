use std::fs;
use std::path::Path;
use std::process::Command;

use cdmpsl_harness::experiment::{FRONT_FILE, HISTORY_FILE, SNAPSHOT_FILE};
use cdmpsl_harness::{emit_plot, execute_experiment, parse_config, read_history};

fn tiny_config(dir: &Path, variants: &str) -> String {
    format!(
        r#"
problems = [{{ name = "zdt1", d = 4 }}]
seeds = [0, 1, 2]
variants = {variants}
output_dir = "{}"

[run]
n_init = 12
iterations = 3
batch = 2

[run.generation]
n_conditional = 2
n_unconditional = 12

[run.train]
epochs = 40

[run.gp]
restarts = 1
max_iter = 40
"#,
        dir.display()
    )
}

fn files_named(root: &Path, name: &str) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() == name {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

#[test]
fn one_problem_three_seeds_layout_and_rerun() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = parse_config(&tiny_config(tmp.path(), r#"["full"]"#)).unwrap();
    let summary = execute_experiment(&cfg).unwrap();
    assert!(summary.all_succeeded(), "{summary}");
    assert_eq!(summary.medians.len(), 1);
    assert_eq!(summary.medians[0].runs, 3);

    let histories = files_named(tmp.path(), HISTORY_FILE);
    assert_eq!(histories.len(), 3);
    assert_eq!(files_named(tmp.path(), FRONT_FILE).len(), 3);
    assert_eq!(files_named(tmp.path(), SNAPSHOT_FILE).len(), 3);
    for seed in 0..3 {
        let dir = tmp.path().join("zdt1_4").join("full").join(seed.to_string());
        let mut names: Vec<String> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        assert_eq!(names, vec![SNAPSHOT_FILE, FRONT_FILE, HISTORY_FILE]);
        let records = read_history(&dir.join(HISTORY_FILE)).unwrap();
        assert_eq!(records.len(), 4);
        assert!(records.windows(2).all(|w| w[1].hv >= w[0].hv && w[1].cumulative_fe > w[0].cumulative_fe));
    }

    let first: Vec<Vec<u8>> = histories.iter().map(|p| fs::read(p).unwrap()).collect();
    execute_experiment(&cfg).unwrap();
    let second: Vec<Vec<u8>> = histories.iter().map(|p| fs::read(p).unwrap()).collect();
    assert_eq!(first, second);

    let snapshot = fs::read_to_string(tmp.path().join("zdt1_4/full/1").join(SNAPSHOT_FILE)).unwrap();
    let resolved = parse_config(&snapshot).unwrap();
    assert_eq!(resolved.seeds, vec![1]);
    assert_eq!(resolved.run.iterations, 3);
}

#[test]
fn failed_cell_does_not_stop_siblings() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = parse_config(&tiny_config(tmp.path(), r#"["no_dm"]"#)).unwrap();
    // A plain file where seed 1's run directory should go.
    fs::create_dir_all(tmp.path().join("zdt1_4/no_dm")).unwrap();
    fs::write(tmp.path().join("zdt1_4/no_dm/1"), "occupied").unwrap();
    let summary = execute_experiment(&cfg).unwrap();
    let failed: Vec<u64> = summary.failures().map(|o| o.cell.seed).collect();
    assert_eq!(failed, vec![1]);
    assert_eq!(summary.medians[0].runs, 2);
    assert!(summary.to_string().contains("FAILED"));
}

#[test]
fn medians_file_matches_independent_computation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = parse_config(&tiny_config(tmp.path(), r#"["full", "random_baseline"]"#)).unwrap();
    execute_experiment(&cfg).unwrap();
    let histories = files_named(tmp.path(), HISTORY_FILE);
    assert_eq!(histories.len(), 6);
    let out = tmp.path().join("chart.svg");
    emit_plot(&histories, &out).unwrap();

    let medians = fs::read_to_string(tmp.path().join("chart.csv")).unwrap();
    let mut rows = medians.lines();
    assert_eq!(rows.next().unwrap(), "problem,d,variant,fe,median_hv,min_hv,max_hv,runs");
    let mut checked = 0;
    for line in rows {
        let f: Vec<&str> = line.split(',').collect();
        let (variant, fe) = (f[2], f[3].parse::<usize>().unwrap());
        let mut hv: Vec<f64> = histories
            .iter()
            .filter(|p| p.to_string_lossy().contains(&format!("/{variant}/")))
            .map(|p| {
                let text = fs::read_to_string(p).unwrap();
                let row = text.lines().nth(1 + fe / 2).unwrap().to_string();
                row.split(',').nth(6).unwrap().parse::<f64>().unwrap()
            })
            .collect();
        hv.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = hv[1];
        let got: f64 = f[4].parse().unwrap();
        assert!((got - expected).abs() <= 1e-9 * expected.abs(), "{line}");
        assert!(f[5].parse::<f64>().unwrap() <= got && got <= f[6].parse::<f64>().unwrap());
        checked += 1;
    }
    assert_eq!(checked, 2 * 4);
    let svg = fs::read_to_string(&out).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn cli_subcommands() {
    let bin = env!("CARGO_BIN_EXE_cdmpsl");
    let out = Command::new(bin).arg("list-problems").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.contains("dtlz7"));

    let tmp = tempfile::tempdir().unwrap();
    let status = Command::new(bin)
        .args(["run", "--problem", "zdt2", "--dim", "3", "--seed", "5", "--variant", "no_dm"])
        .args(["--n-init", "10", "--iterations", "2", "--batch", "2"])
        .env("CDMPSL_OUTPUT_DIR", tmp.path())
        .status()
        .unwrap();
    assert!(status.success());
    let history = tmp.path().join("zdt2_3/no_dm/5").join(HISTORY_FILE);
    assert_eq!(read_history(&history).unwrap().len(), 3);

    let chart = tmp.path().join("plot.svg");
    let status = Command::new(bin)
        .args(["plot", "-o"])
        .arg(&chart)
        .arg(tmp.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(chart.exists() && tmp.path().join("plot.csv").exists());

    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "seeds = [0]\nproblems = []\n").unwrap();
    let out = Command::new(bin).args(["bench", "--config"]).arg(&bad).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}
