use std::process::{Command, Output};

fn thetagenus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thetagenus"))
        .args(args)
        .env_remove("THETA_THREADS")
        .env_remove("THETA_MAX_VECTORS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Value of `key` in `--kv` output.
fn kv(out: &Output, key: &str) -> String {
    let prefix = format!("{key}=");
    stdout(out)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix).map(str::to_string))
        .unwrap_or_else(|| panic!("no {key} in\n{}", stdout(out)))
}

#[track_caller]
fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        stdout(out),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn lattice_e8() {
    let out = thetagenus(&["lattice", "E8", "--kv"]);
    assert_exit(&out, 0);
    assert_eq!(kv(&out, "lattices.0.kissing"), "240");
    assert_eq!(kv(&out, "lattices.0.even_unimodular"), "yes");
    assert_eq!(kv(&out, "lattices.0.check"), "ok");
}

#[test]
fn human_report_has_header_and_wall_time() {
    let text = stdout(&thetagenus(&["lattice", "D16+"]));
    assert!(
        text.starts_with("command: thetagenus lattice D16+\ncatalog version: "),
        "{text}"
    );
    assert!(text.contains("assumptions: none"));
    assert!(text.contains("wall time: "));
    let det = stdout(&thetagenus(&["lattice", "D16+", "--deterministic"]));
    assert!(!det.contains("wall time"));
}

#[test]
fn unknown_lattice_is_usage_error() {
    let out = thetagenus(&["lattice", "Nope"]);
    assert_exit(&out, 2);
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("Leech"),
        "valid names are listed"
    );
}

#[test]
fn all_rank_24() {
    let out = thetagenus(&["lattice", "--all-rank", "24", "--kv"]);
    assert_exit(&out, 0);
    assert_eq!(kv(&out, "lattices"), "24");
    assert_eq!(kv(&out, "failed"), "0");
    assert_eq!(kv(&out, "lattices.23.name"), "Leech");
    assert_eq!(kv(&out, "lattices.23.min_norm"), "4");
    assert_eq!(kv(&out, "lattices.23.kissing"), "196560");
}

#[test]
fn theta_rank_windows() {
    let out = thetagenus(&["theta", "rank", "--lattices", "E8^2,D16+", "--degree", "3", "--kv"]);
    assert_exit(&out, 0);
    assert_eq!(kv(&out, "rank"), "1");
    let out = thetagenus(&[
        "theta",
        "rank",
        "--lattices",
        "all24",
        "--degree",
        "1",
        "--bound",
        "4",
        "--kv",
    ]);
    assert_exit(&out, 0);
    assert_eq!(kv(&out, "lattices"), "24");
    assert_eq!(kv(&out, "rank"), "2");
}

#[test]
fn theta_diff_finds_degree_four_witness() {
    let out = thetagenus(&["theta", "diff", "E8^2", "D16+", "--degree", "4", "--kv"]);
    assert_exit(&out, 0);
    assert_eq!(kv(&out, "r(E8^2)"), "7257600");
    assert_eq!(kv(&out, "r(D16+)"), "2096640");
    let out = thetagenus(&["theta", "diff", "E8^2", "D16+", "--degree", "2", "--kv"]);
    assert_eq!(kv(&out, "witness"), "none");
}

#[test]
fn odd_bound_is_usage_error() {
    assert_exit(
        &thetagenus(&["theta", "rank", "--lattices", "E8", "--degree", "1", "--bound", "3"]),
        2,
    );
}

#[test]
fn capacity_limit_exits_3() {
    let out = thetagenus(&[
        "theta",
        "rank",
        "--lattices",
        "E8",
        "--degree",
        "1",
        "--bound",
        "4",
        "--max-vectors",
        "10",
    ]);
    assert_exit(&out, 3);
    let out = Command::new(env!("CARGO_BIN_EXE_thetagenus"))
        .args(["theta", "rank", "--lattices", "E8", "--degree", "1", "--bound", "4"])
        .env("THETA_MAX_VECTORS", "10")
        .output()
        .unwrap();
    assert_exit(&out, 3);
}

#[test]
fn tsv_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.tsv");
    let p = path.to_str().unwrap();
    let out = thetagenus(&[
        "theta",
        "table",
        "--lattices",
        "E8^2,D16+",
        "--degree",
        "1",
        "--bound",
        "4",
        "--tsv",
        p,
    ]);
    assert_exit(&out, 0);
    let tsv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = tsv.lines().collect();
    assert_eq!(lines.len(), 3, "{tsv}");
    assert!(
        lines[1].starts_with("E8^2\t1\t480\t") && lines[2].starts_with("D16+\t1\t480\t"),
        "{tsv}"
    );
}

#[test]
fn deterministic_across_threads() {
    let run = |t: &str| {
        stdout(&thetagenus(&[
            "theta",
            "table",
            "--lattices",
            "E8^2,D16+",
            "--degree",
            "2",
            "--deterministic",
            "--threads",
            t,
        ]))
    };
    let one = run("1");
    assert!(one.contains("counts:"));
    assert_eq!(one, run("4"));
}

#[test]
fn custom_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cat.txt");
    std::fs::write(&path, "version test-1\nname Mine\ncomponents E8\nexpected_roots 240\n").unwrap();
    let p = path.to_str().unwrap();
    let out = thetagenus(&["lattice", "Mine", "--catalog", p, "--kv"]);
    assert_exit(&out, 0);
    assert_eq!(kv(&out, "catalog_version"), "test-1");
    assert_eq!(kv(&out, "lattices.0.roots"), "240");

    std::fs::write(&path, "name Bad\ncomponents E8\nexpected_roots 100\n").unwrap();
    let out = thetagenus(&["lattice", "Bad", "--catalog", p, "--kv"]);
    assert_exit(&out, 4);
    assert_eq!(kv(&out, "lattices.0.check"), "FAIL");

    std::fs::write(&path, "components E8\n").unwrap();
    assert_exit(&thetagenus(&["lattice", "E8", "--catalog", p]), 2);
}

#[test]
fn param_analyze_g24() {
    let out = thetagenus(&["param", "analyze", "D12[12]", "--m", "24", "--kv"]);
    assert_exit(&out, 0);
    assert_eq!(kv(&out, "g"), "12");
    assert_eq!(kv(&out, "T"), "{}");
    assert_eq!(kv(&out, "multiplicity"), "2");
    assert_eq!(kv(&out, "condition"), "satisfied");

    let out = thetagenus(&["param", "analyze", "D12!0[12]", "--m", "24", "--kv"]);
    assert_exit(&out, 0);
    assert_eq!(kv(&out, "g"), "18");
    assert!(kv(&out, "assumption.0").contains("forced"));
}

#[test]
fn param_analyze_g8_and_g16() {
    let out = thetagenus(&["param", "analyze", "1[7]+1", "--m", "8", "--kv"]);
    assert_eq!(kv(&out, "g"), "0");
    let out = thetagenus(&["param", "analyze", "D12[4]+1[7]+1", "--m", "16", "--kv"]);
    assert_eq!(kv(&out, "g"), "4");
}

#[test]
fn param_scan_m16() {
    let out = thetagenus(&["param", "scan", "--m", "16", "--kv"]);
    assert_exit(&out, 0);
    assert_eq!(kv(&out, "parameters"), "2");
    assert_eq!(kv(&out, "g_values"), "{0, 4}");
    assert_eq!(kv(&out, "max_g"), "4");
}

#[test]
fn param_scan_rejects_large_weight() {
    assert_exit(&thetagenus(&["param", "scan", "--m", "16", "--max-weight", "40"]), 2);
}

#[test]
fn param_validate_exit_codes() {
    assert_exit(&thetagenus(&["param", "validate", "D12[4]+1[7]+1", "--m", "16"]), 0);
    let out = thetagenus(&["param", "validate", "1[16]", "--m", "24", "--kv"]);
    assert_exit(&out, 4);
    assert_eq!(kv(&out, "valid"), "no");
    // D24 needs an index
    assert_exit(&thetagenus(&["param", "validate", "D24[4]", "--m", "24"]), 2);
    assert_exit(&thetagenus(&["param", "validate", "D12[", "--m", "24"]), 2);
    assert_exit(&thetagenus(&["param", "analyze", "1[16]", "--m", "24"]), 4);
}

#[test]
fn epsilon_table_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eps.txt");
    std::fs::write(&path, "# extra signs\nD12 D16 -1\n").unwrap();
    let p = path.to_str().unwrap();
    let base = thetagenus(&[
        "param",
        "analyze",
        "D12[4]+1[7]+1",
        "--m",
        "16",
        "--kv",
        "--deterministic",
    ]);
    let with = thetagenus(&[
        "param",
        "analyze",
        "D12[4]+1[7]+1",
        "--m",
        "16",
        "--kv",
        "--deterministic",
        "--epsilon-table",
        p,
    ]);
    assert_exit(&with, 0);
    // the built-in rules decide every pair here, so the file changes nothing but the echo
    let body = |o: &Output| {
        stdout(o)
            .lines()
            .filter(|l| !l.starts_with("command="))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(body(&base), body(&with));

    // a table entry that contradicts a built-in rule is rejected
    std::fs::write(&path, "D18 1 +1\n").unwrap();
    assert_exit(
        &thetagenus(&["param", "analyze", "D12[12]", "--m", "24", "--epsilon-table", p]),
        2,
    );
}

#[test]
fn central_value_beyond_table() {
    let out = thetagenus(&["param", "analyze", "D508[508]", "--m", "1016", "--kv"]);
    assert_exit(&out, 0);
    assert!(kv(&out, "g").starts_with("unknown"), "{}", stdout(&out));
    let out = thetagenus(&[
        "param",
        "analyze",
        "D508[508]",
        "--m",
        "1016",
        "--kv",
        "--assume-central-nonvanishing",
    ]);
    assert_exit(&out, 0);
    assert_eq!(kv(&out, "g"), "508");
    assert!(stdout(&out).contains("central nonvanishing assumed for D508"));
}

#[test]
fn command_echo_drops_execution_flags() {
    let out = thetagenus(&[
        "param",
        "analyze",
        "1[7] + 1",
        "--m",
        "8",
        "--threads",
        "2",
        "--kv",
        "--deterministic",
    ]);
    assert_eq!(kv(&out, "command"), "thetagenus param analyze \"1[7] + 1\" --m 8");
}
