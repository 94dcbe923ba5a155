use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn walshvp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walshvp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("walshvp-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn verify_lemmas_report() {
    let o = walshvp(&["verify-lemmas", "--resolution", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lemma,instances,worst_margin,pass"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn approx_table_all_within_bound() {
    let o = walshvp(&[
        "approx",
        "--function",
        "abs_power:1.0",
        "--weights",
        "uniform",
        "--p",
        "inf",
        "--nmin",
        "1",
        "--nmax",
        "6",
        "--resolution",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["n", "p", "error", "modulus", "ratio", "bound", "bound_ok"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0].parse::<u32>().unwrap(), i as u32 + 1);
        assert_eq!(&row[1], "inf");
        assert_eq!(&row[6], "true");
        let digits = row[2]
            .trim_start_matches("0.")
            .trim_start_matches('0')
            .replace('.', "");
        assert!(digits.len() <= 12, "{}", &row[2]);
    }
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed="));
}

#[test]
fn approx_json_mirror() {
    let o = walshvp(&[
        "approx",
        "--function",
        "random:5",
        "--weights",
        "linear_down",
        "--resolution",
        "8",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 6 * 3);
    assert_eq!(v["records"][0]["bound_ok"], true);
    assert_eq!(v["function"], "random:5");
}

#[test]
fn weights_validate_file() {
    let path = scratch("w.csv");
    fs::write(
        &path,
        "k,t\n8,1/8\n9,1/8\n10,1/8\n11,1/8\n12,0.125\n13,1/8\n14,1/8\n15,1/8\n",
    )
    .unwrap();
    let o = walshvp(&[
        "weights-validate",
        "--weights",
        path.to_str().unwrap(),
        "--n",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("3,1,true,constant,"), "{row}");

    fs::write(&path, "k,t\n2,1/2\n3,1/4\n").unwrap();
    let o = walshvp(&["weights-validate", "--weights", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().nth(1).unwrap().contains(",false,"));

    let o = walshvp(&[
        "weights-validate",
        "--weights",
        path.to_str().unwrap(),
        "--n",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unnormalized_weights_fail_the_check() {
    let path = scratch("raw.csv");
    fs::write(&path, "k,t\n4,1\n5,1\n6,1\n7,1\n").unwrap();
    let o = walshvp(&[
        "approx",
        "--function",
        "abs_power:1",
        "--weights",
        path.to_str().unwrap(),
        "--nmin",
        "2",
        "--nmax",
        "2",
        "--resolution",
        "6",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().nth(1).unwrap().ends_with(",false"));
}

#[test]
fn unknown_flag_is_usage_error() {
    let o = walshvp(&["approx", "--colour", "blue"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert!(o.stdout.is_empty());
}

#[test]
fn transform_round_trip_through_files() {
    let spec = scratch("spec.txt");
    let back = scratch("back.txt");
    let o = walshvp(&[
        "transform",
        "--function",
        "walsh:0=1,3=-0.5",
        "--resolution",
        "3",
        "--out",
        spec.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&spec).unwrap();
    assert!(text.starts_with("SPECTRUM\nN=3\n1.0\n0.0\n0.0\n-0.5\n"));
    let o = walshvp(&[
        "transform",
        "--inverse",
        "--input",
        spec.to_str().unwrap(),
        "--out",
        back.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let samples = fs::read_to_string(&back).unwrap();
    let o = walshvp(&["transform", "--input", back.to_str().unwrap(), "--out", "-"]);
    assert_eq!(stdout(&o), text);
    assert!(samples.starts_with("N=3\n0.5\n1.5\n1.5\n0.5\n"));
}

#[test]
fn config_file_with_flag_override() {
    let cfg = scratch("run.toml");
    fs::write(
        &cfg,
        "resolution = 9\nfunction = \"step_mix:4\"\nweights = \"cesaro:2\"\np = \"1,inf\"\nnmax = 3\n",
    )
    .unwrap();
    let o = walshvp(&["approx", "--config", cfg.to_str().unwrap(), "--nmax", "5"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(stdout(&o).lines().count(), 1 + 5 * 2);

    fs::write(&cfg, "resolutoin = 9\n").unwrap();
    let o = walshvp(&["approx", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_is_identical_across_thread_counts() {
    let args = [
        "approx",
        "--function",
        "random",
        "--seed",
        "99",
        "--weights",
        "linear_up",
        "--resolution",
        "11",
    ];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_walshvp"))
            .args(args)
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    let one = run("1");
    assert!(!one.is_empty());
    assert_eq!(one, run("4"));
    assert_eq!(one, run("4"));
}

#[test]
fn resolution_cap_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_walshvp"))
        .args(["modulus", "--function", "indicator:2", "--resolution", "6"])
        .env("WALSHVP_MAX_N", "5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = walshvp(&[
        "modulus",
        "--function",
        "indicator:2",
        "--resolution",
        "6",
        "--p",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    // ω_1(1_{I_2}, 2^{-n}) = 2 μ(I_2) = 1/2 below level 2, 0 from level 2 on
    let text = stdout(&o);
    let moduli: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(moduli, vec!["0.5", "0.5", "0", "0", "0", "0", "0"]);
}

#[test]
fn kernel_norms_table() {
    let o = walshvp(&["kernel-norms", "--resolution", "6", "--nmax", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("n,l1_dirichlet,l1_fejer"));
    assert_eq!(text.lines().count(), 9);
    // ‖D_3‖_1 = (3 + 1 + 1 + 1) / 4
    assert!(text.lines().nth(3).unwrap().starts_with("3,1.5,"));
}
