use std::path::PathBuf;
use std::process::{Command, Output};

use tanglefloer_cli::machine;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn cmd() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tanglefloer"));
    c.env_remove(tanglefloer_cli::THREADS_ENV);
    c
}

fn run(args: &[&str]) -> Output {
    cmd().args(args).output().unwrap()
}

fn arg(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn figure_eight_homology() {
    let o = run(&["homology", &arg("figure8.tgl")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "H_-1 = Z\nH_-2 = Z^2\nH_-3 = Z\n");
}

#[test]
fn signs_n_agree_with_m_on_figure_eight() {
    let m = run(&["homology", "--signs", "m", &arg("figure8.tgl")]);
    let n = run(&["homology", "--signs", "n", &arg("figure8.tgl")]);
    assert_eq!(n.status.code(), Some(0));
    assert_eq!(stdout(&m), stdout(&n));
}

#[test]
fn invalid_tangle_exits_one() {
    let o = run(&["validate", &arg("broken.tgl")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("duplicate unstable parameter"));
}

#[test]
fn valid_fixtures_exit_zero() {
    for f in ["figure8.tgl", "tilted.tgl", "henon_pair.tgl", "chaos.tgl"] {
        assert_eq!(run(&["validate", &arg(f)]).status.code(), Some(0), "{f}");
    }
}

#[test]
fn different_tangles_are_not_invariant() {
    let o = run(&["invariance", &arg("figure8.tgl"), &arg("tilted.tgl")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn format_and_io_errors_exit_three() {
    assert_eq!(run(&["homology", "/nonexistent/x.tgl"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    let dir = std::env::temp_dir().join(format!("tanglefloer-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("garbage.tgl");
    std::fs::write(&bad, "surface torus\npt ???\n").unwrap();
    assert_eq!(run(&["validate", bad.to_str().unwrap()]).status.code(), Some(3));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn machine_block_parses() {
    let o = run(&["--machine", "homology", &arg("figure8.tgl")]);
    let v = machine::extract(&stdout(&o)).expect("machine block");
    assert_eq!(v["exit_code"], 0);
    assert_eq!(v["command"], "homology");
    let ranks: Vec<(i64, u64)> = v["homology"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| (g["degree"].as_i64().unwrap(), g["free_rank"].as_u64().unwrap()))
        .collect();
    assert_eq!(ranks, vec![(-1, 1), (-2, 2), (-3, 1)]);

    let o = run(&["--machine", "validate", &arg("broken.tgl")]);
    assert_eq!(machine::extract(&stdout(&o)).unwrap()["exit_code"], 1);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["trace", "--tau", "1", "--budget", "8"];
    let one = cmd().args(args).env(tanglefloer_cli::THREADS_ENV, "1").output().unwrap();
    let four = cmd().args(args).env(tanglefloer_cli::THREADS_ENV, "4").output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stderr, four.stderr);
    assert_eq!(one.stdout, run(&args).stdout);
}

#[test]
fn unusable_thread_count_falls_back_to_default() {
    let args = ["homology", &arg("figure8.tgl")];
    for bad in ["zero", "0", ""] {
        let o = cmd().args(args).env(tanglefloer_cli::THREADS_ENV, bad).output().unwrap();
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(o.stdout, run(&args).stdout);
    }
}

#[test]
fn traced_tangle_feeds_back_into_homology() {
    let dir = std::env::temp_dir().join(format!("tanglefloer-trace-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("henon.tgl");
    let o = run(&["trace", "--tau", "0", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("fixed point"));
    let h = run(&["homology", out.to_str().unwrap()]);
    assert_eq!(h.status.code(), Some(0));
    assert_eq!(stdout(&h), "H_2 = Z\nH_1 = Z\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn finger_move_round_trip() {
    let o = run(&["move", &arg("badflip_pre.tgl"), &arg("badflip.mv")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("secondary pair (r, s) invariant"));
    let dir = std::env::temp_dir().join(format!("tanglefloer-move-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("after.tgl");
    std::fs::write(&out, &o.stdout).unwrap();
    let v = run(&["validate", out.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("csi: no (pairs: u+s+)"));
    let inv = run(&["invariance", &arg("badflip_pre.tgl"), out.to_str().unwrap()]);
    assert_eq!(inv.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sketch_is_svg() {
    let o = run(&["sketch", &arg("tilted.tgl")]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
}

#[test]
fn dump_lists_boundary_shapes() {
    let o = run(&["homology", "--dump", &arg("figure8.tgl")]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("deg ") && l.contains("rows=") && l.contains("cols=")));
}
