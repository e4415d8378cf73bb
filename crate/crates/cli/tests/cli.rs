use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fastpolar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fastpolar"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let ga = dir.path().join("ga.json");
    let fast = dir.path().join("fast.json");
    let o = fastpolar(&[
        "construct",
        "--n",
        "1024",
        "--k",
        "896",
        "--method",
        "ga",
        "--out",
        path(&ga),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = fastpolar(&[
        "construct",
        "--n",
        "1024",
        "--k",
        "896",
        "--method",
        "ga",
        "--fast",
        "--out",
        path(&fast),
    ]);
    assert!(o.status.success());
    let hist = stdout(&o);
    assert!(hist.contains("BCH t=2\t2"));
    assert!(hist.contains("BCH t=1\t3"));

    let o = fastpolar(&["stats", path(&fast), "--baseline", path(&ga)]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("label,terminal_nodes,visited_nodes,edges,directed_edges,f_ops,nodes_reduction"));
    let fast_row: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(fast_row[0], "fast");
    let nodes: usize = fast_row[1].parse().unwrap();
    assert!((21..=24).contains(&nodes));

    let tree = dir.path().join("tree.json");
    let o = fastpolar(&["stats", path(&ga), "--tree", path(&tree)]);
    assert!(o.status.success());
    let t: serde_json::Value = serde_json::from_str(&fs::read_to_string(&tree).unwrap()).unwrap();
    assert_eq!(t["size"], 1024);
}

#[test]
fn full_rate_code_is_one_node() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r1.json");
    let o = fastpolar(&["construct", "--n", "32", "--k", "32", "--fast", "--out", path(&out)]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["segments"], serde_json::json!(["Rate1", "Rate1"]));
    let o = fastpolar(&["stats", path(&out)]);
    assert_eq!(stdout(&o).lines().nth(1).unwrap(), "r1,1,1,0,0,0");
}

#[test]
fn construct_to_stdout() {
    let o = fastpolar(&["construct", "--n", "64", "--k", "32", "--method", "pw"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["k"], 32);
    assert!(stderr(&o).contains("total"));
}

#[test]
fn exit_codes() {
    let o = fastpolar(&["construct", "--n", "48", "--k", "8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("48"));

    let o = fastpolar(&["construct", "--n", "32", "--k", "4", "--fast"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("segment 1"));

    let o = fastpolar(&["construct", "--n", "32", "--k", "40"]);
    assert_eq!(o.status.code(), Some(1));

    let o = fastpolar(&["stats", "/nonexistent/layout.json"]);
    assert_eq!(o.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"n\": 32}").unwrap();
    let o = fastpolar(&["stats", path(&bad)]);
    assert_eq!(o.status.code(), Some(3));

    let o = fastpolar(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(fastpolar(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulate_noiseless_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("smoke.toml");
    fs::write(
        &cfg,
        "n = 64\nk = 48\nlayout = [\"ga\", \"fast\"]\narithmetic = [\"float\", \"fixed(4,5)\"]\n\
         snr_grid_db = [0.0, 1.0]\nmax_frames = 100\nnoiseless = true\nseed = 3\n",
    )
    .unwrap();
    let o = fastpolar(&["simulate", path(&cfg), "--workers", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 4 * 2);
    for series in ["ga_float", "ga_fixed4-5", "fast_float", "fast_fixed4-5"] {
        let csv = fs::read_to_string(dir.path().join(format!("smoke_{series}.csv"))).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "snr_db,ebn0_db,frames,frame_errors,bit_errors,bler,ber"
        );
        for l in lines {
            let cols: Vec<&str> = l.split(',').collect();
            assert_eq!(cols[2], "100");
            assert_eq!(cols[5], "0.0");
        }
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("smoke_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["series"].as_array().unwrap().len(), 4);
    assert!(manifest["revision"]
        .as_str()
        .unwrap()
        .starts_with(env!("CARGO_PKG_VERSION")));
}

#[test]
fn simulate_is_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("noisy.toml");
    fs::write(
        &cfg,
        "n = 128\nk = 100\nlayout = \"ga\"\nmodulation = \"bpsk\"\nsnr_grid_db = [2.0, 3.0]\n\
         max_frames = 3000\ntarget_errors = 30\nseed = 9\n",
    )
    .unwrap();
    let a = fastpolar(&[
        "simulate",
        path(&cfg),
        "--workers",
        "1",
        "--out",
        path(&dir.path().join("a")),
    ]);
    let b = fastpolar(&[
        "simulate",
        path(&cfg),
        "--workers",
        "4",
        "--out",
        path(&dir.path().join("b")),
    ]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn simulate_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(
        &cfg,
        "n = 64\nk = 32\nlayout = \"ga\"\nsnr_grid_db = [1.0]\nframes_per_point = 10\n",
    )
    .unwrap();
    let o = fastpolar(&["simulate", path(&cfg)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("frames_per_point"));

    let o = fastpolar(&["simulate", path(&dir.path().join("missing.toml"))]);
    assert_eq!(o.status.code(), Some(3));

    fs::write(&cfg, "n = 64\nk = 32\nlayout = \"ga\"\nsnr_grid_db = []\n").unwrap();
    let o = fastpolar(&["simulate", path(&cfg)]);
    assert_eq!(o.status.code(), Some(1));
}
