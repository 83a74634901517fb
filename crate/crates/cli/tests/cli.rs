use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn workdir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonmarkov"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn assert_exit(args: &[&str], code: i32) {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "args {args:?}: stdout {} stderr {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn usage_errors_exit_one() {
    assert_exit(&["coefficients"], 1);
    assert_exit(&["coefficients", "--figure", "9z"], 1);
    assert_exit(&["coefficients", "--figure", "2a"], 1);
    assert_exit(&["measures", "--figure", "4"], 1);
    assert_exit(&["coefficients", "--figure", "1a", "--grid", "1"], 1);
    assert_exit(&["coefficients", "--figure", "1a", "--tmax", "-3"], 1);
    assert_exit(&["measures", "--figure", "2a", "--variant", "markov"], 1);
    assert_exit(&["coefficients", "--figure", "1a", "--compare-rwa"], 1);
    assert_exit(
        &[
            "coefficients",
            "--config",
            "/nonexistent.conf",
            "--tmax",
            "1",
        ],
        1,
    );
    assert_exit(&["plot", "/nonexistent.csv"], 1);
    // clap-level problems: conflicting sources, unknown subcommand
    assert_exit(&["coefficients", "--figure", "1a", "--config", "x"], 1);
    assert_exit(&["frobnicate"], 1);
}

#[test]
fn help_and_version_exit_zero() {
    assert_exit(&["--help"], 0);
    assert_exit(&["--version"], 0);
    assert_exit(&["measures", "--help"], 0);
}

#[test]
fn coefficients_from_config_are_deterministic() {
    let dir = workdir("coeff-config");
    let conf = dir.join("params.conf");
    fs::write(
        &conf,
        "# narrow window set\ngamma0 = 1\nlambda = 400\ndelta = 10\nomega0 = 100\n",
    )
    .unwrap();
    let conf = conf.to_str().unwrap();
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for out in [&out_a, &out_b] {
        let out = out.to_str().unwrap();
        assert_exit(
            &[
                "coefficients",
                "--config",
                conf,
                "--tmax",
                "0.05",
                "--grid",
                "16",
                "--order",
                "tcl2",
                "--out",
                out,
            ],
            0,
        );
    }
    let csv_a = fs::read(out_a.join("coefficients_custom.csv")).unwrap();
    let csv_b = fs::read(out_b.join("coefficients_custom.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "same config must reproduce identical bytes");

    let text = String::from_utf8(csv_a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 17, "header plus sixteen grid rows");
    assert!(lines[0].starts_with("t,S+II,"));
    // tcl2 leaves every fourth-order column zero
    for line in &lines[1..] {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        for idx in [2, 4, 6, 8, 9, 11, 13] {
            assert_eq!(f[idx], 0.0, "fourth-order column {idx} in {line}");
        }
    }
    assert_eq!(lines.last().unwrap().split(',').next().unwrap(), "0.05");
}

#[test]
fn measures_narrow_reservoir_has_no_backflow() {
    let dir = workdir("measures-2c");
    let out = dir.to_str().unwrap();
    assert_exit(
        &["measures", "--figure", "2c", "--grid", "41", "--out", out],
        0,
    );
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("intervals_2c_full.json")).unwrap())
            .unwrap();
    assert_eq!(json["variant"], "full");
    assert_eq!(json["ibi"].as_array().unwrap().len(), 0, "{json}");
    assert!(dir.join("measures_2c_full.csv").exists());
}

#[test]
fn rwa_interval_lists_coincide_and_comparison_emits_both() {
    let dir = workdir("measures-rwa");
    let out = dir.to_str().unwrap();
    assert_exit(
        &[
            "measures",
            "--figure",
            "2b",
            "--variant",
            "rwa",
            "--grid",
            "61",
            "--out",
            out,
        ],
        0,
    );
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("intervals_2b_rwa.json")).unwrap())
            .unwrap();
    assert_eq!(json["idi"], json["ibi"]);
    assert!(!json["idi"].as_array().unwrap().is_empty(), "{json}");

    assert_exit(
        &[
            "measures",
            "--figure",
            "2b",
            "--order",
            "tcl2",
            "--compare-rwa",
            "--grid",
            "41",
            "--out",
            out,
        ],
        0,
    );
    for name in [
        "measures_2b_full.csv",
        "intervals_2b_full.json",
        "measures_2b_rwa.csv",
        "intervals_2b_rwa.json",
    ] {
        assert!(dir.join(name).exists(), "{name}");
    }
}

#[test]
fn positivity_figure_emits_three_series() {
    let dir = workdir("positivity-4");
    let out = dir.to_str().unwrap();
    assert_exit(
        &[
            "positivity",
            "--figure",
            "4",
            "--grid",
            "61",
            "--order",
            "tcl2",
            "--out",
            out,
        ],
        0,
    );
    for tag in ["4a", "4b", "4c"] {
        let text = fs::read_to_string(dir.join(format!("positivity_{tag}.csv"))).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("t,Theta,"));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "0");
        assert_eq!(first[7], "1", "G(0) = 1 in {tag}");
    }
}

#[test]
fn plot_renders_svg_and_rejects_empty_input() {
    let dir = workdir("plot");
    let out = dir.to_str().unwrap();
    let conf = dir.join("params.conf");
    fs::write(&conf, "lambda = 400\ndelta = 10\nomega0 = 100\n").unwrap();
    assert_exit(
        &[
            "coefficients",
            "--config",
            conf.to_str().unwrap(),
            "--tmax",
            "0.05",
            "--grid",
            "16",
            "--order",
            "tcl2",
            "--out",
            out,
        ],
        0,
    );
    let csv = dir.join("coefficients_custom.csv");
    assert_exit(&["plot", csv.to_str().unwrap(), "--out", out], 0);
    let svg = fs::read_to_string(dir.join("coefficients_custom.svg")).unwrap();
    assert!(svg.contains("<svg"));

    let empty = dir.join("empty.csv");
    fs::write(&empty, "t,g,sigma,in_idi,in_ibi\n").unwrap();
    assert_exit(&["plot", empty.to_str().unwrap(), "--out", out], 1);
    assert!(!dir.join("empty.svg").exists(), "no image for empty input");
}

#[test]
fn plot_overlay_combines_measure_csvs() {
    let dir = workdir("plot-overlay");
    let out = dir.to_str().unwrap();
    assert_exit(
        &[
            "measures",
            "--figure",
            "2b",
            "--order",
            "tcl2",
            "--compare-rwa",
            "--grid",
            "41",
            "--out",
            out,
        ],
        0,
    );
    let full = dir.join("measures_2b_full.csv");
    let rwa = dir.join("measures_2b_rwa.csv");
    assert_exit(
        &[
            "plot",
            full.to_str().unwrap(),
            rwa.to_str().unwrap(),
            "--overlay",
            "--out",
            out,
        ],
        0,
    );
    assert!(dir.join("measures_2b_full_overlay.svg").exists());
    // same pair drawn as the divisibility panel
    assert_exit(
        &[
            "plot",
            full.to_str().unwrap(),
            rwa.to_str().unwrap(),
            "--overlay",
            "--series",
            "g",
            "--out",
            out,
        ],
        0,
    );
}
