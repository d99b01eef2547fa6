use std::fs;
use std::process::{Command, Output};

fn obf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obf"))
        .args(args)
        .output()
        .expect("run obf")
}

fn config(dir: &tempfile::TempDir, text: &str) -> String {
    let path = dir.path().join("sweep.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn writes_identical_csv_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        &dir,
        "pt_dbm = [20, 40]\ntrials = 5000\nseed = 4\npt_over_noise = true\n",
    );
    let mut outputs = Vec::new();
    for w in ["1", "3"] {
        let out = dir.path().join(format!("w{w}.csv"));
        let run = obf(&[
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--workers",
            w,
        ]);
        assert!(
            run.status.success(),
            "{}",
            String::from_utf8_lossy(&run.stderr)
        );
        outputs.push(fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 6);
    assert!(text.starts_with("pt_dbm,ph_dbm,scheme,"));
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        &dir,
        "pt_dbm = 30\ntrials = 100000\nmodes = [\"full_feedback\"]\n",
    );
    let run = obf(&[
        "--config",
        &cfg,
        "--trials",
        "123",
        "--seed",
        "9",
        "--workers",
        "2",
    ]);
    assert!(run.status.success());
    let stdout = String::from_utf8(run.stdout).unwrap();
    let row: Vec<&str> = stdout.lines().nth(1).unwrap().split(',').collect();
    assert_eq!((row[9], row[10]), ("123", "9"));
}

#[test]
fn failures_name_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.toml");
    let run = obf(&["--config", missing.to_str().unwrap()]);
    assert!(!run.status.success());
    assert!(String::from_utf8_lossy(&run.stderr).contains("config stage"));

    let cfg = config(&dir, "pt_dbm = 30\nalpha = 2.0\n");
    let run = obf(&["--config", &cfg]);
    assert!(!run.status.success());
    let err = String::from_utf8_lossy(&run.stderr).to_string();
    assert!(
        err.contains("config stage") && err.contains("alpha"),
        "{err}"
    );

    let cfg = config(&dir, "pt_dbm = 30\ntrials = 10\n");
    let bad_out = dir.path().join("no_such_dir").join("x.csv");
    let run = obf(&["--config", &cfg, "--out", bad_out.to_str().unwrap()]);
    assert!(!run.status.success());
    assert!(String::from_utf8_lossy(&run.stderr).contains("output stage"));
}

#[test]
fn shipped_configs_parse() {
    for name in ["reference.toml", "six_antennas_lossy_dc.toml"] {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/").to_string() + name;
        obf::parse_config(&fs::read_to_string(&path).unwrap())
            .unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
