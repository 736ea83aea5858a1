use std::io::Write;
use std::process::{Command, Output, Stdio};

fn edgecolor(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_edgecolor"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    } else {
        drop(child.stdin.take());
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn regular_stream(seed: &str) -> String {
    stdout(&edgecolor(
        &["gen", "--kind", "random-regular", "--n", "60", "-d", "6", "--shuffle", "--seed", seed],
        None,
    ))
}

#[test]
fn gen_emits_the_stream_format() {
    let s = regular_stream("3");
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("60 180 6"));
    assert_eq!(lines.count(), 180);
    assert_eq!(s, regular_stream("3"));
    assert_ne!(s, regular_stream("4"));
}

#[test]
fn stages_compose_through_pipes() {
    let big = stdout(&edgecolor(
        &["gen", "--kind", "random-regular", "--n", "200", "-d", "60", "--shuffle"],
        None,
    ));
    let kept = stdout(&edgecolor(&["subsample", "--delta-prime", "40"], Some(&big)));
    assert!(kept.lines().next().unwrap().ends_with(" 40"));
    let csv = stdout(&edgecolor(&["color", "--strategy", "greedy"], Some(&kept)));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# schema=1"));
    assert_eq!(lines.next(), Some("edge_index,u,v,color,strategy_round"));
    let max = lines
        .map(|l| l.split(',').nth(3).unwrap().parse::<usize>().unwrap())
        .max()
        .unwrap();
    assert!(max <= 2 * 40 - 2);

    let part = stdout(&edgecolor(&["split", "--delta-prime", "10", "--part", "0"], Some(&big)));
    let header: Vec<usize> = part.lines().next().unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
    assert_eq!(header[0], 200);
}

#[test]
fn every_strategy_colors_properly() {
    let s = regular_stream("8");
    for strategy in ["greedy", "cascade", "tree-coloring", "random-order", "blank-eps"] {
        let out = stdout(&edgecolor(&["--format", "json", "color", "--strategy", strategy], Some(&s)));
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["summary"]["edges"], 180, "{strategy}");
        let colors = v["colors"].as_array().unwrap();
        assert_eq!(colors.len(), 180);
    }
}

#[test]
fn match_csv_lists_every_edge() {
    let s = regular_stream("1");
    let out = stdout(&edgecolor(&["match", "--c", "20"], Some(&s)));
    let rows: Vec<&str> = out.lines().skip(2).collect();
    assert_eq!(rows.len(), 180);
    assert!(rows.iter().all(|r| ["matched", "skipped", "rejected"].contains(&r.rsplit(',').next().unwrap())));
}

#[test]
fn recurrence_and_threshold_csv() {
    let out = stdout(&edgecolor(&["recurrence", "--delta", "25", "--c", "41", "-g", "6"], None));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[1], "level,eps_min,eps_max,two_step_bound,induction_bound");
    assert_eq!(lines.len(), 2 + 7);
    let out = stdout(&edgecolor(&["threshold", "--delta-prime", "100", "--ratio", "1.5,1.7"], None));
    let rows: Vec<Vec<&str>> = out.lines().skip(2).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert!(!rows[0][4].is_empty());
    assert!(rows[1][4].is_empty());
}

#[test]
fn game_reports_all_oracles() {
    let inst = "# root edge 0-1, one child edge each side\nc 6.5\n2 0 1 -\n3 1 0 U\n";
    let out = stdout(&edgecolor(&["game", "--runs", "2000"], Some(inst)));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in ["enumeration", "dp", "adaptive_min", "all_unmatched", "all_matched"] {
        assert!(v[key].is_number(), "{key}");
    }
    let dp = v["dp"].as_f64().unwrap();
    assert!((v["enumeration"].as_f64().unwrap() - dp).abs() < 1e-12);
    assert_eq!(v["monte_carlo"]["runs"], 2000);
}

#[test]
fn experiment_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"generator": {"kind": {"kind": "random-regular", "d": 8}, "n": 200, "order": "uniformly-random"},
            "strategy": {"strategy": "greedy"}, "trials": 3, "seed": 5}"#,
    )
    .unwrap();
    let out_path = dir.path().join("report.csv");
    let cfg_arg = cfg.to_str().unwrap();
    let out_arg = out_path.to_str().unwrap();
    stdout(&edgecolor(&["experiment", "-c", cfg_arg, "--out", out_arg], None));
    let a = std::fs::read_to_string(&out_path).unwrap();
    assert!(a.starts_with("# schema=1\nscope,trial,metric,value,std_error,lo,hi\n"));
    let b = stdout(&edgecolor(&["--threads", "2", "experiment", "-c", cfg_arg], None));
    assert_eq!(a, b);
    let json = stdout(&edgecolor(&["--format", "json", "experiment", "-c", cfg_arg], None));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["trials"].as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(edgecolor(&["verify", "recurrence"], None).status.code(), Some(0));
    assert_eq!(edgecolor(&["verify", "nonsense"], None).status.code(), Some(2));
    assert_eq!(edgecolor(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(edgecolor(&["color"], Some("3 1 2\n0 7\n")).status.code(), Some(2));
    assert_eq!(edgecolor(&["subsample", "--delta-prime", "5"], Some(&regular_stream("1"))).status.code(), Some(2));
}
