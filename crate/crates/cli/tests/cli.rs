//! Exit codes, config handling, output routing and list parsing.

mod common;

use std::fs;
use std::str::FromStr;

use common::{run, run_ok};
use noon_coherence::dynamics::JosephsonSystem;
use noon_coherence::squeezing::rotated_second_moment;
use noon_coherence::TwoModeState;
use noon_coherence_cli::lists::{OrderList, TimeList, ValueList};

fn code(args: &[&str]) -> Option<i32> {
    run(args, None).status.code()
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["--version"]), Some(0));
    assert_eq!(code(&["dynamics", "--help"]), Some(0));
}

#[test]
fn invalid_input_exits_with_two() {
    assert_eq!(code(&["bogus"]), Some(2));
    assert_eq!(code(&["attenuate", "--eta", "0.5"]), Some(2));
    assert_eq!(code(&["attenuate", "--n", "5", "--eta", "1.5"]), Some(2));
    assert_eq!(code(&["attenuate", "--n", "5", "--eta", "0..1:"]), Some(2));
    assert_eq!(code(&["splitter", "--n", "5", "--orders", "0"]), Some(2));
    assert_eq!(code(&["splitter", "--n", "5", "--precision", "0"]), Some(2));
    assert_eq!(code(&["fringes", "--state", common::NOON_3, "--m", "3", "--k", "12"]), Some(2));
    // Four phases cannot resolve the third harmonic.
    assert_eq!(code(&["fringes", "--state", common::NOON_3, "--m", "3", "--k", "4"]), Some(2));
    assert_eq!(code(&["infer", "--data", "tests/fixtures/missing.csv"]), Some(2));

    let mut cmd = std::process::Command::new(common::BIN);
    cmd.current_dir(common::crate_dir()).args(["splitter", "--n", "5"]);
    assert_eq!(cmd.env("NOON_COHERENCE_THREADS", "0").output().unwrap().status.code(), Some(2));
}

#[test]
fn orders_above_total_report_zero() {
    let text = String::from_utf8(run_ok(&["splitter", "--n", "5", "--orders", "6"], None)).unwrap();
    let secs = common::sections(&text);
    let coh = common::table(&secs, "coherence");
    assert_eq!(common::column(coh, "C_n"), [0.0]);
    assert_eq!(common::column(coh, "c_n"), [0.0]);
}

#[test]
fn unresolvable_period_exits_with_three() {
    let out = run(&["dynamics", "--n", "100", "--g", "1", "--times", "0,T/4"], None);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    // Absolute times need no period.
    assert_eq!(code(&["dynamics", "--n", "100", "--g", "1", "--orders", "100", "--times", "0,0.1"]), Some(0));
}

#[test]
fn config_file_fills_in_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(&config, r#"{"n": 5, "eta": "0.5", "orders": [5], "precision": 6}"#).unwrap();
    let path = config.to_str().unwrap();

    let text = String::from_utf8(run_ok(&["attenuate", "--config", path], None)).unwrap();
    assert!(text.contains("0.5,5,0.03125,0.03125,"), "{text}");

    let text = String::from_utf8(run_ok(&["attenuate", "--config", path, "--eta", "1"], None)).unwrap();
    assert!(text.contains("1,5,1,1,"), "{text}");

    fs::write(&config, r#"{"n": 5, "eta": 0.5, "colour": "red"}"#).unwrap();
    assert_eq!(code(&["attenuate", "--config", path]), Some(2));
}

#[test]
fn output_file_and_sibling_tables() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("noon.csv");
    let out = run(&["attenuate", "--n", "3", "--eta", "0.9", "--output", target.to_str().unwrap()], None);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let primary = fs::read_to_string(&target).unwrap();
    assert!(primary.starts_with("eta,n,C_n,c_n,"), "{primary}");
    let distribution = fs::read_to_string(dir.path().join("noon.distribution.csv")).unwrap();
    assert!(distribution.starts_with("eta,two_jz,probability"));
    assert!(dir.path().join("noon.metadata.csv").exists());

    let json = String::from_utf8(run_ok(&["splitter", "--n", "4", "--format", "json"], None)).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(doc["command"], "splitter");
}

#[test]
fn list_grammar() {
    assert_eq!(ValueList::from_str("0..1:5").unwrap().0, [0.0, 0.25, 0.5, 0.75, 1.0]);
    assert_eq!(ValueList::from_str("0.2, 0.7").unwrap().0, [0.2, 0.7]);
    assert!(ValueList::from_str("0..1:0").is_err());
    assert!(ValueList::from_str("a").is_err());

    assert_eq!(OrderList::from_str("1..4").unwrap().0, [1, 2, 3, 4]);
    assert_eq!(OrderList::from_str("2,5").unwrap().0, [2, 5]);
    assert!(OrderList::from_str("x").is_err());

    let times = TimeList::from_str("0,T/4,3*T/2,0..T:3").unwrap();
    assert!(times.uses_period());
    assert_eq!(times.resolve(Some(8.0)).unwrap(), [0.0, 2.0, 12.0, 0.0, 4.0, 8.0]);
    assert!(times.resolve(None).is_err());
    let absolute = TimeList::from_str("0.5,1").unwrap();
    assert!(!absolute.uses_period());
    assert_eq!(absolute.resolve(None).unwrap(), [0.5, 1.0]);
}

#[test]
fn josephson_ground_state_certifies_two_atom_coherence() {
    let n = 100;
    let ground = JosephsonSystem::new(n, 0.05, 1.0).unwrap().ground_state();
    let m = ground.schwinger_moments(&[]);
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("ground.csv");
    fs::write(
        &data,
        format!(
            "label,mean_n,jx,jy,jz,jy_var,jz_var\nground,{},{},{},{},{},{}\n",
            m.ntot,
            m.jx,
            m.jy,
            m.jz,
            m.jy2 - m.jy * m.jy,
            m.jz2 - m.jz * m.jz
        ),
    )
    .unwrap();
    let json = String::from_utf8(run_ok(&["infer", "--data", data.to_str().unwrap()], None)).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    let inference = &doc["details"][0]["inference"];
    assert_eq!(inference["certified"], true, "{json}");
    let bound = inference["rotated_moment_lower_bound"].as_f64().unwrap();
    assert!(bound > 0.0);
    assert!(rotated_second_moment(&ground).norm() >= bound * (1.0 - 1e-9));
}
