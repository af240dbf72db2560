use std::process::{Command, Output};

fn chunkwise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chunkwise"))
        .args(args)
        .env_remove("CHUNKWISE_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn simulate_prints_csv_to_stdout() {
    let o = chunkwise(&[
        "simulate",
        "--schedule",
        "FAC2,STATIC",
        "--pinning",
        "PIN1,PIN5",
        "--reps",
        "2",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "benchmark,schedule,pinning,median,stddev,n_chunks,imbalance_pct,repetitions"
    );
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("ac,FAC2,PIN1,"));
    assert!(lines[4].starts_with("ac,STATIC,PIN5,"));
    let cols: Vec<&str> = lines[4].split(',').collect();
    assert_eq!((cols[4], cols[5], cols[7]), ("0.0", "20", "2"));
    // Halving every speed doubles the makespan exactly.
    let median = |l: &str| l.split(',').nth(3).unwrap().parse::<f64>().unwrap();
    assert_eq!(median(lines[4]), 2.0 * median(lines[3]));
}

#[test]
fn trace_dumps_chunks() {
    let o = chunkwise(&[
        "trace",
        "--n",
        "100",
        "--workers",
        "4",
        "--schedule",
        "fac2",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let sizes: Vec<u64> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(sizes.len(), 20);
    assert_eq!(&sizes[..5], &[13, 13, 13, 13, 6]);
    assert!(text.starts_with("seq,worker,start,size\n0,0,0,13\n"));

    let o = chunkwise(&[
        "trace",
        "--n",
        "1000",
        "--pinning",
        "PIN2",
        "--schedule",
        "WF2",
    ]);
    let first: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .take(2)
        .map(String::from)
        .collect();
    assert_eq!(first, ["0,0,0,28", "1,1,28,14"]);
}

#[test]
fn seed_comes_from_the_environment() {
    let base = ["trace", "--n", "1000", "--schedule", "RAND"];
    let a = stdout(&chunkwise(&base));
    let with_flag = stdout(&chunkwise(&[&base[..], &["--seed", "9"]].concat()));
    let with_env = Command::new(env!("CARGO_BIN_EXE_chunkwise"))
        .args(base)
        .env("CHUNKWISE_SEED", "9")
        .output()
        .unwrap();
    assert_ne!(a, with_flag);
    assert_eq!(with_flag, stdout(&with_env));
}

#[test]
fn seed_precedence_flag_then_config_then_environment() {
    let dir = tempfile::tempdir().unwrap();
    let plain = dir.path().join("plain.cfg");
    let seeded = dir.path().join("seeded.cfg");
    std::fs::write(
        &plain,
        "reps = 1
[sweep]
schedules = RAND
",
    )
    .unwrap();
    std::fs::write(
        &seeded,
        "reps = 1
seed = 5
[sweep]
schedules = RAND
",
    )
    .unwrap();
    let run = |cfg: &std::path::Path, env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_chunkwise"));
        c.args(["simulate", "--config", cfg.to_str().unwrap()])
            .env_remove("CHUNKWISE_SEED");
        if let Some(v) = env {
            c.env("CHUNKWISE_SEED", v);
        }
        if let Some(v) = flag {
            c.args(["--seed", v]);
        }
        let o = c.output().unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    let s5 = run(&plain, None, Some("5"));
    let s9 = run(&plain, None, Some("9"));
    assert_ne!(s5, s9);
    assert_eq!(run(&plain, Some("9"), None), s9);
    assert_eq!(run(&seeded, Some("9"), None), s5);
    assert_eq!(run(&seeded, Some("5"), Some("9")), s9);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    let csv = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        format!(
            "[experiment]\nreps = 3\n[workload]\npreset = lava_md\n[sweep]\nschedules = SS, GSS\n\
             pinnings = PIN4\n[output]\ncsv = {}\n",
            csv.display()
        ),
    )
    .unwrap();
    let o = chunkwise(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--schedule",
        "TSS",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("lava_md,TSS,PIN4,"));
    assert!(text.ends_with(",3\n"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| chunkwise(args).status.code().unwrap();
    assert_eq!(code(&["simulate", "--schedule", "FAC9"]), 2);
    assert_eq!(code(&["simulate", "--pinning", "PIN7"]), 2);
    assert_eq!(code(&["simulate", "--workload", "lu"]), 2);
    assert_eq!(code(&["simulate", "--reps", "0"]), 2);
    assert_eq!(code(&["simulate", "--config", "/nonexistent.cfg"]), 3);
    assert_eq!(code(&["simulate", "--trace", "/nonexistent.txt"]), 3);
    assert_eq!(
        code(&["simulate", "--reps", "1", "--out", "/nonexistent/dir/x.csv"]),
        3
    );
    let o = chunkwise(&["simulate", "--workload", "lu"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ac, ac_full, c_md"));
}

#[test]
fn execute_on_uniform_workers() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.txt");
    std::fs::write(&trace, "# costs\n".to_string() + &"2\n".repeat(5000)).unwrap();
    let csv = dir.path().join("e.csv");
    let o = chunkwise(&[
        "execute",
        "--trace",
        trace.to_str().unwrap(),
        "--schedule",
        "SS,GSS",
        "--pinning",
        "UNIFORM:3",
        "--reps",
        "2",
        "--queue",
        "atomic",
        "--cost-unit-us",
        "0.01",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let ss = text.lines().find(|l| l.starts_with("t,SS,")).unwrap();
    assert!(ss.contains(",5000,"), "{ss}");
    assert!(std::fs::read_to_string(dir.path().join("e.csv.host"))
        .unwrap()
        .contains("cost_unit_ns=10\n"));
}

#[test]
fn presets_lists_everything() {
    let text = stdout(&chunkwise(&["presets"]));
    for name in [
        "ac", "c_md", "lava_md", "md350", "nas_mg", "PIN1", "PIN5", "UNIFORM", "WF2",
    ] {
        assert!(text.contains(name), "{name}");
    }
}
