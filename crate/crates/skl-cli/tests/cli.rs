use std::fs;
use std::path::PathBuf;
use std::process::Command;

use skl_cli::{cli_main_with, EXIT_FAIL, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("skl").chain(args.iter().copied());
    let code = cli_main_with(argv, &mut out, &mut err);
    let mut text = String::from_utf8(out).unwrap();
    text.push_str(&String::from_utf8(err).unwrap());
    (code, text)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("skl-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn value<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn demo_pke_at_n8_seed7_succeeds() {
    let (code, text) = run(&["demo", "pke", "--n", "8", "--seed", "7"]);
    assert_eq!(code, EXIT_OK, "{text}");
    assert_eq!(value(&text, "result"), "pass");
    for phase in ["setup", "keygen", "use", "delete", "verify"] {
        assert_eq!(value(&text, &format!("phase.{phase}")), "pass");
    }
}

#[test]
fn demo_runs_every_scheme_over_tcp() {
    for scheme in ["pke-ni", "prf"] {
        let (code, text) = run(&["demo", scheme, "--n", "2", "--seed", "1", "--tcp"]);
        assert_eq!(code, EXIT_OK, "{text}");
    }
}

#[test]
fn zero_pairs_is_a_usage_error() {
    assert_eq!(run(&["demo", "pke", "--n", "0"]).0, EXIT_USAGE);
    assert_eq!(run(&["keygen", "--n", "0"]).0, EXIT_USAGE);
}

#[test]
fn malformed_command_lines_are_usage_errors() {
    assert_eq!(run(&["demo", "rsa"]).0, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["demo", "pke", "--params", "huge"]).0, EXIT_USAGE);
    assert_eq!(
        run(&["experiment", "cut-and-choose", "--adversary", "refusing"]).0,
        EXIT_USAGE
    );
    assert_eq!(run(&["--help"]).0, EXIT_OK);
}

#[test]
fn file_lifecycle_round_trips_and_verifies() {
    let dir = scratch("lifecycle");
    let d = dir.to_str().unwrap();
    assert_eq!(
        run(&["keygen", "--n", "2", "--seed", "5", "--out", d]).0,
        EXIT_OK
    );
    let message = "01".repeat(32);
    let (code, text) = run(&["encrypt", "--out", d, "--message", &message]);
    assert_eq!(code, EXIT_OK, "{text}");
    for _ in 0..2 {
        let (code, text) = run(&["decrypt", "--out", d]);
        assert_eq!(code, EXIT_OK, "{text}");
        assert_eq!(value(&text, "message"), message);
    }
    assert_eq!(run(&["delete", "--out", d]).0, EXIT_OK);
    assert!(!dir.join("qdk.bin").exists());
    let (code, text) = run(&["verify", "--out", d]);
    assert_eq!(code, EXIT_OK, "{text}");
    assert_eq!(value(&text, "verify"), "accept");
    // The key is gone, so a second decryption cannot happen.
    assert_eq!(run(&["decrypt", "--out", d]).0, EXIT_FAIL);
}

#[test]
fn wrong_length_message_is_a_usage_error() {
    let dir = scratch("msglen");
    let d = dir.to_str().unwrap();
    assert_eq!(run(&["keygen", "--n", "1", "--out", d]).0, EXIT_OK);
    assert_eq!(
        run(&["encrypt", "--out", d, "--message", "0101"]).0,
        EXIT_USAGE
    );
    assert_eq!(
        run(&["encrypt", "--out", d, "--message", "x"]).0,
        EXIT_USAGE
    );
}

#[test]
fn corrupted_or_missing_certificates_fail_verification() {
    let dir = scratch("corrupt");
    let d = dir.to_str().unwrap();
    assert_eq!(
        run(&["keygen", "--n", "2", "--seed", "11", "--out", d]).0,
        EXIT_OK
    );
    assert_eq!(run(&["delete", "--out", d]).0, EXIT_OK);
    let cert = dir.join("cert.bin");
    let good = fs::read(&cert).unwrap();
    assert_eq!(run(&["verify", "--out", d]).0, EXIT_OK);
    // Every byte of the frame header (tag, version, item count) is load-bearing.
    for i in 0..6 {
        let mut bad = good.clone();
        bad[i] ^= 0x5a;
        fs::write(&cert, &bad).unwrap();
        let (code, text) = run(&["verify", "--out", d]);
        assert_eq!(code, EXIT_FAIL, "byte {i}: {text}");
        assert_eq!(value(&text, "verify"), "reject");
    }
    fs::write(&cert, &good[..good.len() - 1]).unwrap();
    assert_eq!(run(&["verify", "--out", d]).0, EXIT_FAIL);
    fs::remove_file(&cert).unwrap();
    assert_eq!(run(&["verify", "--out", d]).0, EXIT_FAIL);
}

#[test]
fn keygen_is_reproducible_from_the_seed() {
    let read =
        |dir: &PathBuf| ["ek.bin", "qdk.bin", "lessor.bin"].map(|f| fs::read(dir.join(f)).unwrap());
    let a = scratch("seed-a");
    let b = scratch("seed-b");
    assert_eq!(
        run(&[
            "keygen",
            "--n",
            "1",
            "--seed",
            "4",
            "--out",
            a.to_str().unwrap()
        ])
        .0,
        EXIT_OK
    );
    assert_eq!(
        run(&[
            "keygen",
            "--n",
            "1",
            "--seed",
            "4",
            "--out",
            b.to_str().unwrap()
        ])
        .0,
        EXIT_OK
    );
    assert_eq!(read(&a), read(&b));
}

#[test]
fn config_file_supplies_defaults_that_flags_override() {
    let dir = scratch("config");
    let cfg = dir.join("skl.conf");
    fs::write(&cfg, "# lab settings\nn = 1\nw = 2\nseed = 3 # fixed\n").unwrap();
    let c = cfg.to_str().unwrap();
    let (code, text) = run(&["--config", c, "demo", "prf"]);
    assert_eq!(code, EXIT_OK, "{text}");
    assert_eq!(
        (value(&text, "n"), value(&text, "w"), value(&text, "seed")),
        ("1", "2", "3")
    );
    let (_, text) = run(&["--config", c, "demo", "prf", "--n", "2"]);
    assert_eq!(value(&text, "n"), "2");
    fs::write(&cfg, "n = 0\n").unwrap();
    assert_eq!(run(&["--config", c, "demo", "pke"]).0, EXIT_USAGE);
    fs::write(&cfg, "shade = blue\n").unwrap();
    assert_eq!(run(&["--config", c, "demo", "pke"]).0, EXIT_USAGE);
}

#[test]
fn stats_delvrfy_at_n8_lands_in_the_reference_interval() {
    let (code, text) = run(&[
        "stats", "delvrfy", "--trials", "10000", "--n", "8", "--seed", "2",
    ]);
    assert_eq!(code, EXIT_OK, "{text}");
    let rate: f64 = value(&text, "rate").parse().unwrap();
    assert!((2f64.powi(-9)..=2f64.powi(-7)).contains(&rate), "{rate}");
}

#[test]
fn stats_subcommands_report() {
    for args in [
        &["stats", "hadamard", "--trials", "100000"][..],
        &["stats", "smudging", "--w", "4", "--trials", "5"],
    ] {
        let (code, text) = run(args);
        assert_eq!(code, EXIT_OK, "{args:?}: {text}");
    }
    // Messiness needs the wide CRS noise of the full preset.
    assert_eq!(run(&["stats", "messy", "--params", "demo"]).0, EXIT_USAGE);
}

#[test]
fn experiments_match_their_expected_outcomes() {
    let (code, text) = run(&[
        "experiment",
        "cut-and-choose",
        "--trials",
        "100",
        "--n",
        "4",
    ]);
    assert_eq!(code, EXIT_OK, "{text}");
    assert_eq!(value(&text, "wins"), "0");
    let (code, text) = run(&[
        "experiment",
        "cut-and-choose",
        "--adversary",
        "keep-everything",
        "--trials",
        "10",
    ]);
    assert_eq!(code, EXIT_OK, "{text}");
    assert_eq!(value(&text, "wins"), "10");
    for args in [
        &[
            "experiment",
            "ow-vra",
            "--n",
            "1",
            "--w",
            "2",
            "--trials",
            "4",
        ][..],
        &[
            "experiment",
            "ow-vra",
            "--ni",
            "--n",
            "1",
            "--w",
            "2",
            "--trials",
            "4",
        ],
        &[
            "experiment",
            "up-vra",
            "--n",
            "1",
            "--w",
            "2",
            "--ell",
            "4",
            "--trials",
            "4",
        ],
        &[
            "experiment",
            "ow-vra",
            "--adversary",
            "refusing",
            "--n",
            "1",
            "--trials",
            "2",
        ],
    ] {
        let (code, text) = run(args);
        assert_eq!(code, EXIT_OK, "{args:?}: {text}");
    }
}

#[test]
fn bench_reports_every_scheme() {
    let (code, text) = run(&["bench", "--n", "1", "--w", "4"]);
    assert_eq!(code, EXIT_OK, "{text}");
    for scheme in ["pke", "pke-ni", "prf"] {
        value(&text, &format!("bench.{scheme}.session_ms"));
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_skl");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(
        status(&["demo", "pke", "--n", "1", "--w", "4"]),
        Some(EXIT_OK)
    );
    assert_eq!(status(&["demo", "pke", "--n", "0"]), Some(EXIT_USAGE));
}
