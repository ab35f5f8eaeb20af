use std::path::Path;
use std::process::{Command, Output};

use relay_secrecy::asymptotics;
use relay_secrecy::channel::{sample_channel, ChannelRealization, FadingConfig};
use relay_secrecy::format::fmt_f64_12;
use relay_secrecy::montecarlo::EnsembleSummary;
use relay_secrecy::schemes::SecondHop;
use relay_secrecy::RateUnit;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relay-secrecy"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sample_then_region_equals_region_from_seed() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(run(
        p,
        &["sample", "--seed", "12", "--draw", "4", "--m", "4", "--out", "r.json"]
    )
    .status
    .success());
    let from_file = run(p, &["region", "--input", "r.json", "--pr", "2"]);
    let from_seed = run(p, &["region", "--seed", "12", "--draw", "4", "--m", "4", "--pr", "2"]);
    assert!(from_file.status.success() && from_seed.status.success());
    assert_eq!(from_file.stdout, from_seed.stdout);

    let json = std::fs::read_to_string(p.join("r.json")).unwrap();
    let r = ChannelRealization::from_json(&json).unwrap();
    let cfg = FadingConfig {
        m: 4,
        sigma_g: 1.0,
        sigma_h: 2.0,
        sigma_z: 2.0,
        n0: 1.0,
        seed: 12,
    };
    assert_eq!(r, sample_channel(&cfg, 4).unwrap());
}

#[test]
fn fig2_region_lists_all_six_schemes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["region", "--preset", "fig2", "--out", "r.csv"]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("scheme,alpha,R_d,R_e,on_frontier"));
    let mut schemes: Vec<&str> = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5);
        for f in &fields[1..4] {
            f.parse::<f64>().unwrap();
        }
        if schemes.last() != Some(&fields[0]) {
            schemes.push(fields[0]);
        }
    }
    assert_eq!(
        schemes,
        [
            "single_null_d",
            "single_null_e",
            "single_null_union",
            "double_null",
            "tdma",
            "outer"
        ]
    );
}

#[test]
fn scheme_selection_and_unit_flag() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let bits = stdout(&run(
        p,
        &["region", "--seed", "1", "--schemes", "outer", "--alpha-points", "3"],
    ));
    let nats = stdout(&run(
        p,
        &[
            "--unit",
            "nats",
            "region",
            "--seed",
            "1",
            "--schemes",
            "outer",
            "--alpha-points",
            "3",
        ],
    ));
    assert_eq!(bits.lines().count(), 4);
    for (b, n) in bits.lines().zip(nats.lines()).skip(1) {
        let b: Vec<f64> = b.split(',').skip(2).take(2).map(|x| x.parse().unwrap()).collect();
        let n: Vec<f64> = n.split(',').skip(2).take(2).map(|x| x.parse().unwrap()).collect();
        for (x, y) in b.iter().zip(&n) {
            assert!((x * std::f64::consts::LN_2 - y).abs() <= 1e-10 * y.max(1e-300));
        }
    }
}

#[test]
fn validate_reports_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["validate", "--seed", "7", "--m", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().count() >= 10);
    assert!(text.lines().all(|l| l.starts_with("PASS ") || l.starts_with("INFO ")));
    assert!(text.contains("PASS evaluator_round_trip"));
}

#[test]
fn low_snr_slopes_match_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["asymptotics", "--regime", "low", "--pr", "1e-4", "--seed", "3"],
    );
    assert!(o.status.success());
    let text = stdout(&o);

    let cfg = FadingConfig {
        m: 5,
        sigma_g: 1.0,
        sigma_h: 2.0,
        sigma_z: 2.0,
        n0: 1.0,
        seed: 3,
    };
    let r = sample_channel(&cfg, 0).unwrap();
    let slopes = asymptotics::low_snr_slopes(&SecondHop::from(&r), 0.5, 1e-4)
        .unwrap()
        .in_unit(RateUnit::Bits);
    for (name, value) in slopes.named() {
        let row = text
            .lines()
            .find(|l| l.split(',').nth(3) == Some(name))
            .unwrap_or_else(|| panic!("{name} missing"));
        assert_eq!(row.rsplit(',').next().unwrap(), fmt_f64_12(value), "{name}");
    }
}

#[test]
fn montecarlo_summary_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(
        p.join("cfg.json"),
        r#"{"fading":{"m":3,"sigma_g":1,"sigma_h":2,"sigma_z":2,"n0":1,"seed":5},"n_draws":8,"p_r":1,"alpha_points":11}"#,
    )
    .unwrap();
    let o = run(
        p,
        &[
            "--unit",
            "nats",
            "montecarlo",
            "--config",
            "cfg.json",
            "--out",
            "s.json",
            "--draw-dir",
            "draws",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = EnsembleSummary::from_json(&std::fs::read_to_string(p.join("s.json")).unwrap()).unwrap();
    assert_eq!(summary.draws, 8);
    assert_eq!(summary.unit, RateUnit::Nats);
    assert_eq!(std::fs::read_dir(p.join("draws")).unwrap().count(), 8);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let code = |args: &[&str]| run(p, args).status.code();

    assert_eq!(code(&["region", "--pr", "-1"]), Some(2));
    assert_eq!(code(&["region", "--bogus"]), Some(2));
    assert_eq!(code(&[]), Some(2));
    assert_eq!(code(&["region", "--m", "1", "--schemes", "double_null"]), Some(2));
    assert_eq!(code(&["region", "--input", "missing.json"]), Some(3));
    std::fs::write(p.join("bad.json"), "{\"m\": 2, \"h\": [").unwrap();
    assert_eq!(code(&["region", "--input", "bad.json"]), Some(3));
    std::fs::write(p.join("bad_cfg.json"), "{\"n_draws\": 2}").unwrap();
    assert_eq!(code(&["montecarlo", "--config", "bad_cfg.json"]), Some(3));
    assert_eq!(code(&["--help"]), Some(0));
}
