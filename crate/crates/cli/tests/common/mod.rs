#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_noon-coherence");

pub fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> PathBuf {
    crate_dir().join("tests").join("fixtures").join(name)
}

/// A reference command with a stored golden output.
pub struct Case {
    pub fixture: &'static str,
    pub args: &'static [&'static str],
    /// Cheap enough to repeat in the determinism checks.
    pub repeatable: bool,
}

pub const EMBEDDED_CAT: &str = r#"{"kind": "embedded_cat", "n": 20, "n_l": 4}"#;
pub const NOON_3: &str = r#"{"kind": "noon", "n": 3}"#;

pub const CASES: &[Case] = &[
    Case { fixture: "attenuate_n5.csv", args: &["attenuate", "--n", "5", "--eta", "0..1:11"], repeatable: true },
    Case {
        fixture: "attenuate_n50.csv",
        args: &["attenuate", "--n", "50", "--eta", "0.8", "--orders", "50"],
        repeatable: true,
    },
    Case { fixture: "splitter_n5.csv", args: &["splitter", "--n", "5"], repeatable: true },
    Case { fixture: "splitter_n10.csv", args: &["splitter", "--n", "10"], repeatable: true },
    Case { fixture: "splitter_n100.csv", args: &["splitter", "--n", "100"], repeatable: true },
    Case { fixture: "splitter_n20_eta08.csv", args: &["splitter", "--n", "20", "--eta", "0.8"], repeatable: true },
    Case { fixture: "splitter_n100_eta09.csv", args: &["splitter", "--n", "100", "--eta", "0.9"], repeatable: false },
    Case {
        fixture: "dynamics_n5.csv",
        args: &["dynamics", "--n", "5", "--g", "10", "--nl", "0", "--orders", "1..5", "--times", "0..T/2:41"],
        repeatable: true,
    },
    Case {
        fixture: "dynamics_n20.csv",
        args: &["dynamics", "--n", "20", "--g", "4", "--nl", "4", "--orders", "1..20", "--times", "0,T/8,T/4"],
        repeatable: true,
    },
    Case {
        fixture: "fringes_embedded.csv",
        args: &["fringes", "--state", EMBEDDED_CAT, "--m", "12", "--k", "64"],
        repeatable: true,
    },
    Case {
        fixture: "fringes_noon3.csv",
        args: &["fringes", "--state", NOON_3, "--m", "3", "--k", "16"],
        repeatable: true,
    },
    Case { fixture: "infer_data.json", args: &["infer", "--data", "tests/fixtures/infer_data.csv"], repeatable: true },
];

/// Runs the binary from the crate directory.
pub fn run(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.current_dir(crate_dir()).args(args).env_remove("NOON_COHERENCE_THREADS");
    if let Some(t) = threads {
        cmd.env("NOON_COHERENCE_THREADS", t.to_string());
    }
    cmd.output().expect("binary runs")
}

pub fn run_ok(args: &[&str], threads: Option<usize>) -> Vec<u8> {
    let out = run(args, threads);
    assert!(
        out.status.success(),
        "{args:?} failed with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

/// Sections of multi-table CSV output, keyed by the `# name` lines.
pub fn sections(text: &str) -> Vec<(String, Vec<Vec<String>>)> {
    let mut out: Vec<(String, Vec<Vec<String>>)> = Vec::new();
    for line in text.lines() {
        if let Some(name) = line.strip_prefix("# ") {
            out.push((name.to_string(), Vec::new()));
        } else if !line.is_empty() {
            if out.is_empty() {
                out.push((String::new(), Vec::new()));
            }
            out.last_mut().unwrap().1.push(line.split(',').map(str::to_string).collect());
        }
    }
    out
}

/// Column `name` of a table whose first row is the header, as numbers.
pub fn column(rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let idx = rows[0].iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
    rows[1..].iter().map(|r| r[idx].parse().unwrap_or(f64::NAN)).collect()
}

pub fn table<'a>(secs: &'a [(String, Vec<Vec<String>>)], name: &str) -> &'a [Vec<String>] {
    &secs.iter().find(|(n, _)| n == name).unwrap_or_else(|| panic!("no table {name}")).1
}
