use std::process::{Command, Output};

fn ils(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ils"))
        .args(args)
        .env_remove("ILS_SEED")
        .output()
        .expect("run ils")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_mdid() {
    let o = ils(&[
        "solve", "--algo", "mdid", "--width", "32", "--i", "10", "--d", "3", "--a", "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "j=8 delta=2 algo=mdid ties=true\n");
}

#[test]
fn solve_oracle_tie() {
    let o = ils(&["solve", "--algo", "oracle", "--i", "3", "--d", "5", "--a", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "j=8 delta=1 algo=oracle ties=true\n");
}

#[test]
fn solve_every_algo_agrees() {
    for algo in ["div", "mdid", "ds", "adds", "oracle"] {
        let o = ils(&[
            "solve",
            "--algo",
            algo,
            "--i",
            "1000000000",
            "--d",
            "1000000",
            "--a",
            "1000100",
        ]);
        assert_eq!(o.status.code(), Some(0), "{algo}");
        assert_eq!(stdout(&o), format!("j=999900010 delta=1000 algo={algo} ties=false\n"));
    }
}

#[test]
fn solve_negative() {
    let o = ils(&[
        "solve",
        "--algo",
        "ds",
        "--i",
        "10",
        "--d",
        "3",
        "--a",
        "4",
        "--negative",
    ]);
    assert_eq!(stdout(&o), "j=-8 delta=-2 algo=ds ties=true\n");
}

#[test]
fn solve_adds_with_chunks() {
    let o = ils(&[
        "solve",
        "--algo",
        "adds",
        "--width",
        "32",
        "--i",
        "100000000",
        "--d",
        "1000000",
        "--a",
        "1000100",
        "--chunks",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("j=99990001 "), "{}", stdout(&o));
}

#[test]
fn solve_overflow_exits_2_with_condition() {
    let o = ils(&[
        "solve",
        "--algo",
        "mdid",
        "--width",
        "32",
        "--i",
        "100000000",
        "--d",
        "1000000",
        "--a",
        "999950",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("(i mod A)·D + ⌊A/2⌋ bound"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn argument_errors_exit_1() {
    for args in [
        vec!["solve", "--algo", "mdid", "--i", "1e6", "--d", "1", "--a", "1"],
        vec!["solve", "--algo", "mdid", "--i", "1", "--d", "1", "--a", "0"],
        vec!["solve", "--algo", "nope", "--i", "1", "--d", "1", "--a", "1"],
        vec!["fuzz", "--trials", "0"],
        vec!["bench", "--scenario", "nope", "--out", "x.csv"],
        vec![],
    ] {
        let o = ils(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn check_reports_conditions() {
    let o = ils(&[
        "check",
        "--algo",
        "mdid",
        "--width",
        "32",
        "--i",
        "2",
        "--d",
        "1073741824",
        "--a",
        "2147483647",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("algorithm=MDID satisfied=false\n"), "{out}");
    assert!(out.contains("violated=iD bound (i<A, D<A case)"));

    let o = ils(&[
        "check",
        "--algo",
        "ds",
        "--width",
        "32",
        "--i",
        "2",
        "--d",
        "1073741824",
        "--a",
        "2147483647",
        "--kappa",
        "2",
    ]);
    assert_eq!(stdout(&o), "algorithm=DS satisfied=true\n");
}

#[test]
fn fuzz_lists_suites() {
    let o = ils(&["fuzz", "--width", "64", "--trials", "1000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    for suite in [
        "oracle-agreement",
        "residual-bound",
        "guard-soundness",
        "partition-invariance",
    ] {
        assert!(out.contains(&format!("pass {suite} ")), "{out}");
    }
}

#[test]
fn fuzz_seed_from_env() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_ils"))
            .args(["fuzz", "--width", "32", "--trials", "50"])
            .env("ILS_SEED", seed)
            .output()
            .unwrap()
    };
    assert!(stdout(&run("9")).starts_with("fuzz width=32 trials=50 seed=9\n"));
}

#[test]
fn bench_writes_table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t2.csv");
    let o = ils(&[
        "bench",
        "--scenario",
        "int32-d1e6",
        "--samples",
        "2000",
        "--seed",
        "42",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("rows=16"));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("algorithm,width,D,i,N,samples,err_min,err_max,err_avg,overflow_count,note")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 16);
    for r in rows.iter().filter(|r| r[0] == "adds") {
        assert_eq!(&r[6..9], ["0", "0", "0"], "{r:?}");
    }
    assert_eq!(
        rows.iter().filter(|r| r[0] == "adds").map(|r| r[4]).collect::<Vec<_>>(),
        ["1", "1", "10", "100"]
    );
    assert!(rows.iter().filter(|r| r[0] == "mdid").all(|r| r[10] == "Overflow"));

    // Same seed, same bytes.
    let again = dir.path().join("again.csv");
    ils(&[
        "bench",
        "--scenario",
        "int32-d1e6",
        "--samples",
        "2000",
        "--seed",
        "42",
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn bench_explicit_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("custom.csv");
    let o = ils(&[
        "bench",
        "--width",
        "64",
        "--d",
        "1000000000",
        "--i",
        "1000000000000,1000000000000000",
        "--algorithms",
        "mdid,adds",
        "--samples",
        "200",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(!stdout(&o).contains("note:"));
}

#[test]
fn bench_unwritable_path_leaves_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("t.csv");
    let o = ils(&[
        "bench",
        "--scenario",
        "int32-d1e6",
        "--samples",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn bench_fig3_preset_writes_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f3.csv");
    let o = ils(&[
        "bench",
        "--scenario",
        "fig3-int32",
        "--samples",
        "300",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("violations=0"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("width,D,i,N,sample,u,error\n"));
    assert_eq!(text.lines().count(), 1 + 300 * 20);
    for line in text.lines().skip(1) {
        let f: Vec<i64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(2 * f[6].abs() <= f[3], "{line}");
    }
}

#[test]
fn sweep_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = ils(&[
        "sweep",
        "--n",
        "1,4",
        "--samples",
        "100",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("rows=200"));
    assert!(stdout(&o).contains("N=1 max_abs_error=0"));
}
