use std::path::Path;
use std::process::{Command, Output};

use levygof::data::Fixture;
use serde_json::Value;

fn levygof(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levygof"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = levygof(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn records(text: &str) -> Vec<Value> {
    text.lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn numbers(text: &str) -> Vec<f64> {
    text.lines().map(|l| l.parse().unwrap()).collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fnv1a(values: &[f64]) -> u64 {
    let text = values
        .iter()
        .map(|x| format!("{x:.2}"))
        .collect::<Vec<_>>()
        .join(",");
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

#[test]
fn fixtures_match_transcribed_tables() {
    assert_eq!(Fixture::Vessels.observations().len(), 20);
    assert_eq!(Fixture::Rainfall.observations().len(), 31);
    assert_eq!(
        fnv1a(Fixture::Vessels.observations()),
        0x3053_7cf8_4f49_f193
    );
    assert_eq!(
        fnv1a(Fixture::Rainfall.observations()),
        0x891d_0ea3_cb8a_4498
    );
}

#[test]
fn sample_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for p in [&a, &b] {
        ok(&[
            "sample",
            "--dist",
            "levy",
            "--c",
            "2",
            "--n",
            "5",
            "--seed",
            "7",
            "--out",
            path_str(p),
        ]);
    }
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());
    assert_eq!(numbers(&String::from_utf8(first).unwrap()).len(), 5);
    assert_ne!(
        ok(&["sample", "--c", "2", "--n", "5", "--seed", "7"]),
        ok(&["sample", "--c", "2", "--n", "5", "--seed", "8"])
    );
}

#[test]
fn pareto_sample_respects_support() {
    let xs = numbers(&ok(&[
        "sample", "--dist", "pareto", "--params", "0.75,1.0", "--n", "100", "--seed", "1",
    ]));
    assert_eq!(xs.len(), 100);
    assert!(xs.iter().all(|&x| x >= 0.75));
}

#[test]
fn levy_sample_median() {
    let mut xs = numbers(&ok(&[
        "sample", "--dist", "levy", "--c", "1", "--n", "1000000", "--seed", "3",
    ]));
    xs.sort_by(f64::total_cmp);
    let median = 0.5 * (xs[499_999] + xs[500_000]);
    assert!(
        (median / 2.198_109_338_317_732 - 1.0).abs() < 0.01,
        "median {median}"
    );
}

#[test]
fn shifted_levy_sample_stays_above_location() {
    let xs = numbers(&ok(&[
        "sample", "--c", "1", "--mu", "-3", "--n", "1000", "--seed", "2",
    ]));
    assert!(xs.iter().all(|&x| x > -3.0));
}

#[test]
fn estimate_mle_on_constant_data() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("const.txt");
    std::fs::write(&p, "# constant\n3.5\n3.5\n\n3.5  # trailing\n3.5\n").unwrap();
    let r = &records(&ok(&[
        "estimate",
        "--method",
        "mle",
        "--input",
        path_str(&p),
    ]))[0];
    assert_eq!(r["method"], "mle");
    assert_eq!(r["n"], 4);
    assert!((r["estimate"].as_f64().unwrap() - 3.5).abs() < 1e-12);
}

#[test]
fn estimate_qcm_recovers_scale_from_sample_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("levy.txt");
    ok(&[
        "sample",
        "--c",
        "2",
        "--n",
        "1000000",
        "--seed",
        "4",
        "--out",
        path_str(&p),
    ]);
    let r = &records(&ok(&[
        "estimate",
        "--method",
        "qcm",
        "--split",
        "0.02,0.48",
        "--input",
        path_str(&p),
    ]))[0];
    let c = r["estimate"].as_f64().unwrap();
    assert!((c - 2.0).abs() < 0.02, "{c}");
    for method in ["qcv", "mle", "cov"] {
        let r = &records(&ok(&[
            "estimate",
            "--method",
            method,
            "--input",
            path_str(&p),
        ]))[0];
        let c = r["estimate"].as_f64().unwrap();
        assert!((c - 2.0).abs() < 0.05, "{method}: {c}");
    }
}

#[test]
fn estimate_cov_on_degenerate_data_fails_with_estimation_code() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("const.txt");
    std::fs::write(&p, "2\n2\n2\n").unwrap();
    let out = levygof(&["estimate", "--method", "cov", "--input", path_str(&p)]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not positive"));
}

#[test]
fn estimate_rejects_nonpositive_data() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("neg.txt");
    std::fs::write(&p, "1\n-2\n3\n").unwrap();
    let out = levygof(&["estimate", "--method", "mle", "--input", path_str(&p)]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    std::fs::write(&p, "1.0\n# note\n2.x\n").unwrap();
    let out = levygof(&["estimate", "--method", "mle", "--input", path_str(&p)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let missing = dir.path().join("missing.txt");
    let out = levygof(&["estimate", "--method", "mle", "--input", path_str(&missing)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(levygof(&["estimate", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        levygof(&["test", "--fixture", "vessels"]).status.code(),
        Some(2)
    );
    assert_eq!(
        levygof(&["estimate", "--method", "nope", "--fixture", "vessels"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(levygof(&[]).status.code(), Some(2));
}

#[test]
fn csv_column_selection() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("d.csv");
    std::fs::write(&p, "year,value\n2001,4\n2002,4\n").unwrap();
    let by_name = records(&ok(&[
        "estimate",
        "--method",
        "mle",
        "--input",
        path_str(&p),
        "--column",
        "value",
    ]));
    let by_index = records(&ok(&[
        "estimate",
        "--method",
        "mle",
        "--input",
        path_str(&p),
        "--column",
        "2",
    ]));
    assert_eq!(by_name[0]["estimate"], by_index[0]["estimate"]);
    assert!((by_name[0]["estimate"].as_f64().unwrap() - 4.0).abs() < 1e-12);
}

#[test]
fn cn_is_unchanged_by_shifting_rainfall() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.txt");
    let shifted = dir.path().join("shifted.txt");
    let values = Fixture::Rainfall.observations();
    std::fs::write(
        &raw,
        values.iter().map(|x| format!("{x}\n")).collect::<String>(),
    )
    .unwrap();
    std::fs::write(
        &shifted,
        values
            .iter()
            .map(|x| format!("{}\n", x + 1000.0))
            .collect::<String>(),
    )
    .unwrap();
    let run = |p: &Path| {
        records(&ok(&[
            "test",
            "--stat",
            "cn",
            "--input",
            path_str(p),
            "--replicates",
            "200",
        ]))[0]["value"]
            .as_f64()
            .unwrap()
    };
    let (a, b) = (run(&raw), run(&shifted));
    assert!((a - b).abs() <= 1e-8 * a.abs(), "{a} vs {b}");
    let fixture = records(&ok(&[
        "test",
        "--stat",
        "cn",
        "--fixture",
        "rainfall",
        "--replicates",
        "200",
    ]));
    assert_eq!(fixture[0]["value"].as_f64().unwrap(), a);
}

#[test]
fn test_all_reports_every_fixed_location_statistic() {
    let out = ok(&[
        "test",
        "--all",
        "--fixture",
        "vessels",
        "--replicates",
        "2000",
        "--seed",
        "11",
    ]);
    let rs = records(&out);
    let names: Vec<&str> = rs
        .iter()
        .map(|r| r["statistic"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["vn", "tn", "on", "deltan", "ran"]);
    for r in &rs {
        let p = r["p_value"].as_f64().unwrap();
        assert!(p > 0.0 && p <= 1.0);
        assert_eq!(r["replicates"], 2000);
    }
    assert_eq!(
        out,
        ok(&[
            "test",
            "--all",
            "--fixture",
            "vessels",
            "--replicates",
            "2000",
            "--seed",
            "11",
            "--workers",
            "4"
        ])
    );
}

#[test]
fn test_reports_per_statistic_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("tiny.txt");
    std::fs::write(&p, "1\n2\n3\n4\n").unwrap();
    // Too small for the windows of O_n, but fine for V_n.
    let out = levygof(&[
        "test",
        "--stat",
        "on",
        "--input",
        path_str(&p),
        "--replicates",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let out = ok(&[
        "test",
        "--all",
        "--input",
        path_str(&p),
        "--replicates",
        "50",
    ]);
    let rs = records(&out);
    assert!(rs.iter().any(|r| r.get("error").is_some()));
    assert!(rs.iter().any(|r| r.get("p_value").is_some()));
}

#[test]
fn sample_output_round_trips_into_test() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.txt");
    ok(&[
        "sample",
        "--c",
        "3",
        "--n",
        "60",
        "--seed",
        "9",
        "--out",
        path_str(&p),
    ]);
    let rs = records(&ok(&[
        "test",
        "--stat",
        "tn",
        "--input",
        path_str(&p),
        "--replicates",
        "500",
    ]));
    assert_eq!(rs[0]["n"], 60);
}

#[test]
fn ppplot_fits_vessels_better_than_rainfall() {
    let deviation = |args: &[&str]| {
        let rs = records(&ok(args));
        let header = &rs[0];
        assert_eq!(header["fit"], "mle");
        let n = header["n"].as_u64().unwrap() as usize;
        assert_eq!(rs.len(), n + 1);
        let max = rs[1..]
            .iter()
            .map(|r| (r["empirical"].as_f64().unwrap() - r["theoretical"].as_f64().unwrap()).abs())
            .fold(0.0, f64::max);
        assert!((max - header["max_deviation"].as_f64().unwrap()).abs() < 1e-12);
        max
    };
    let vessels = deviation(&["ppplot", "--fixture", "vessels"]);
    let rainfall = deviation(&["ppplot", "--fixture", "rainfall"]);
    assert!(vessels < 0.2, "{vessels}");
    assert!(rainfall > vessels, "{rainfall} vs {vessels}");

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("big.txt");
    ok(&[
        "sample",
        "--c",
        "5",
        "--n",
        "100000",
        "--seed",
        "6",
        "--out",
        path_str(&p),
    ]);
    let big = deviation(&["ppplot", "--input", path_str(&p)]);
    assert!(big < 0.01, "{big}");
}

#[test]
fn power_command_reproduces_reference_cells() {
    let rs = records(&ok(&[
        "power",
        "--stat",
        "on",
        "--alt",
        "halfnormal:1.0",
        "--n",
        "50",
        "--level",
        "0.05",
        "--replicates",
        "5000",
    ]));
    assert!(rs[0]["power"].as_f64().unwrap() >= 0.99);
    let rs = records(&ok(&[
        "power",
        "--stat",
        "vn",
        "--alt",
        "lognormal:0,1",
        "--n",
        "30",
        "--level",
        "0.05",
        "--replicates",
        "5000",
    ]));
    assert!((rs[0]["power"].as_f64().unwrap() - 0.82).abs() <= 0.04);
}

#[test]
fn power_grid_covers_every_combination() {
    let rs = records(&ok(&[
        "power",
        "--stat",
        "tn",
        "--alt",
        "gamma:2,3",
        "--alt",
        "rayleigh:1",
        "--n-grid",
        "20,30",
        "--level",
        "0.01,0.05",
        "--replicates",
        "300",
    ]));
    assert_eq!(rs.len(), 8);
    let all = records(&ok(&[
        "power",
        "--stat",
        "vn",
        "--n",
        "20",
        "--replicates",
        "200",
    ]));
    assert_eq!(all.len(), 12);
}

#[test]
fn calibrate_emits_ordered_thresholds() {
    let rs = records(&ok(&[
        "calibrate",
        "--stat",
        "on",
        "--n",
        "30",
        "--replicates",
        "2000",
    ]));
    assert_eq!(rs.len(), 2);
    for r in &rs {
        assert!(r["lower"].as_f64().unwrap() < r["upper"].as_f64().unwrap());
    }
}

#[test]
fn diagnose_shows_more_skew_at_small_n() {
    let ks = |n: &str| {
        records(&ok(&[
            "diagnose",
            "--stat",
            "tn",
            "--n",
            n,
            "--replicates",
            "10000",
        ]))[0]["ks_distance"]
            .as_f64()
            .unwrap()
    };
    assert!(ks("20") > ks("1000"));
}

#[test]
fn table_output_is_aligned_text() {
    let out = ok(&[
        "estimate",
        "--method",
        "mle",
        "--fixture",
        "rainfall",
        "--table",
    ]);
    assert!(out.lines().count() >= 2);
    assert!(serde_json::from_str::<Value>(out.lines().next().unwrap()).is_err());
}
