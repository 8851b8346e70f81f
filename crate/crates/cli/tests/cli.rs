use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn osim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_osim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = osim(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path_arg(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn read(p: PathBuf) -> String {
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn four_node_osim_selects_a_first() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fig");
    ok(&[
        "select",
        "--set",
        "generator=FIG1",
        "--set",
        "algorithm=OSIM",
        "--set",
        "k=1",
        "--seed",
        "3",
        "--out",
        path_arg(&out),
    ]);
    let csv = read(dir.path().join("fig.csv"));
    assert!(csv.starts_with("# schema: osim-selection/1"), "{csv}");
    assert!(csv.lines().any(|l| l.starts_with("1,A,")), "{csv}");
    let json: serde_json::Value = serde_json::from_str(&read(dir.path().join("fig.json"))).unwrap();
    assert_eq!(json["schema"], "osim-report/1");
    assert_eq!(json["seeds"][0], "A");
}

#[test]
fn empty_k_list_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x");
    let res = osim(&[
        "select",
        "--set",
        "generator=FIG1",
        "--set",
        "k=",
        "--seed",
        "1",
        "--out",
        path_arg(&out),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("`k`"));
}

#[test]
fn missing_seed_and_bad_keys_exit_two() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x");
    assert_eq!(
        osim(&["select", "--set", "generator=FIG1", "--out", path_arg(&out)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        osim(&[
            "select",
            "--set",
            "colour=red",
            "--seed",
            "1",
            "--out",
            path_arg(&out)
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        osim(&[
            "select",
            "--set",
            "generator=FIG1",
            "--set",
            "k=9",
            "--seed",
            "1",
            "--out",
            path_arg(&out)
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        osim(&[
            "select",
            "--set",
            "generator=FIG1",
            "--threads",
            "0",
            "--seed",
            "1",
            "--out",
            path_arg(&out)
        ])
        .status
        .code(),
        Some(2)
    );
    let missing = dir.path().join("absent.txt");
    let graph = format!("graph={}", missing.display());
    assert_eq!(
        osim(&[
            "select",
            "--set",
            &graph,
            "--seed",
            "1",
            "--out",
            path_arg(&out)
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn select_output_repeats_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let args = |name: &str| -> Vec<String> {
        [
            "select",
            "--set",
            "generator=ER",
            "--set",
            "n=200",
            "--set",
            "q=0.02",
            "--set",
            "params=opinion_uniform,phi_uniform",
            "--set",
            "k=1,3,5",
            "--seed",
            "11",
            "--out",
        ]
        .iter()
        .map(|s| s.to_string())
        .chain([dir.path().join(name).display().to_string()])
        .collect()
    };
    for name in ["a", "b"] {
        let a = args(name);
        ok(&a.iter().map(String::as_str).collect::<Vec<_>>());
    }
    assert_eq!(
        read(dir.path().join("a.csv")),
        read(dir.path().join("b.csv"))
    );
    assert_eq!(
        read(dir.path().join("a.json")),
        read(dir.path().join("b.json"))
    );
    assert_eq!(data_rows(&read(dir.path().join("a.csv"))).len(), 5);
}

#[test]
fn generate_four_node_matches_the_fixture() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g");
    ok(&[
        "generate",
        "--set",
        "generator=FIG1",
        "--seed",
        "0",
        "--out",
        path_arg(&out),
    ]);
    let edges = read(dir.path().join("g.edges"));
    assert!(edges.starts_with("# schema: osim-edges/1"));
    let arcs: Vec<&str> = edges.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(
        arcs,
        [
            "A D 0.8 0.9 0.5",
            "B A 0.1 0.7 1",
            "B C 0.1 0.8 1",
            "C D 0.9 0.1 0.5"
        ]
    );
    let attrs = read(dir.path().join("g.attrs"));
    assert!(attrs.contains("D -0.3"));
}

#[test]
fn generated_files_load_back() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g");
    ok(&[
        "generate",
        "--set",
        "generator=FIG1",
        "--seed",
        "0",
        "--out",
        path_arg(&g),
    ]);
    let config = dir.path().join("run.conf");
    std::fs::write(
        &config,
        "# fixture from disk\ngraph = g.edges\nattributes = g.attrs\nk = 1\nl = 2\n",
    )
    .unwrap();
    let out = dir.path().join("sel");
    ok(&[
        "select",
        "--config",
        path_arg(&config),
        "--seed",
        "1",
        "--out",
        path_arg(&out),
    ]);
    assert!(read(dir.path().join("sel.csv"))
        .lines()
        .any(|l| l.starts_with("1,A,")));
}

#[test]
fn tree_of_depth_zero_is_one_node() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t");
    ok(&[
        "generate",
        "--set",
        "generator=TREE",
        "--set",
        "depth=0",
        "--seed",
        "0",
        "--out",
        path_arg(&out),
    ]);
    let ids = read(dir.path().join("t.ids"));
    assert_eq!(ids.lines().filter(|l| !l.starts_with('#')).count(), 1);
    let edges = read(dir.path().join("t.edges"));
    assert_eq!(
        edges
            .lines()
            .filter(|l| !l.starts_with('#') && l.split_whitespace().count() > 1)
            .count(),
        0
    );
}

#[test]
fn er_generation_is_reproducible() {
    let dir = TempDir::new().unwrap();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        ok(&[
            "generate",
            "--set",
            "generator=ER",
            "--set",
            "n=500",
            "--set",
            "q=0.01",
            "--seed",
            "5",
            "--out",
            path_arg(&out),
        ]);
    }
    let a = read(dir.path().join("a.edges"));
    assert_eq!(a, read(dir.path().join("b.edges")));
    let m = a
        .lines()
        .filter(|l| !l.starts_with('#') && l.split_whitespace().count() > 1)
        .count();
    assert!((2000..3000).contains(&m), "m = {m}");
}

#[test]
fn evaluate_four_node_c_matches_opinion_spread() {
    let dir = TempDir::new().unwrap();
    let seeds = dir.path().join("seeds.txt");
    std::fs::write(&seeds, "C  # the negative one\n").unwrap();
    let out = dir.path().join("ev");
    ok(&[
        "evaluate",
        "--set",
        "generator=FIG1",
        "--set",
        "replicas=100000",
        "--set",
        "kinds=OPINION_SPREAD",
        "--seeds",
        path_arg(&seeds),
        "--seed",
        "2",
        "--out",
        path_arg(&out),
    ]);
    let rows = data_rows(&read(dir.path().join("ev.csv")));
    assert_eq!(rows.len(), 1);
    let mean: f64 = rows[0][3].parse().unwrap();
    let se: f64 = rows[0][4].parse().unwrap();
    assert!((mean + 0.351).abs() <= 3.0 * se, "mean {mean} se {se}");
    assert_eq!(rows[0][5], "100000");
}

#[test]
fn evaluate_rejects_empty_and_unknown_seeds() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ev");
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "# nothing\n").unwrap();
    let unknown = dir.path().join("unknown.txt");
    std::fs::write(&unknown, "A Z\n").unwrap();
    for seeds in [&empty, &unknown] {
        let res = osim(&[
            "evaluate",
            "--set",
            "generator=FIG1",
            "--seeds",
            path_arg(seeds),
            "--seed",
            "2",
            "--out",
            path_arg(&out),
        ]);
        assert_eq!(
            res.status.code(),
            Some(2),
            "{}",
            String::from_utf8_lossy(&res.stderr)
        );
    }
}

#[test]
fn zero_lambda_never_lowers_effective_spread() {
    let dir = TempDir::new().unwrap();
    let seeds = dir.path().join("seeds.txt");
    std::fs::write(&seeds, "0 1 2 3 4\n").unwrap();
    let out = dir.path().join("ev");
    ok(&[
        "evaluate",
        "--set",
        "generator=ER",
        "--set",
        "n=300",
        "--set",
        "q=0.015",
        "--set",
        "params=ic_uniform:0.2,opinion_uniform,phi_uniform",
        "--set",
        "lambda=0,1",
        "--set",
        "kinds=EFFECTIVE_OPINION_SPREAD",
        "--set",
        "k=1,5",
        "--set",
        "replicas=2000",
        "--seeds",
        path_arg(&seeds),
        "--seed",
        "4",
        "--out",
        path_arg(&out),
    ]);
    let rows = data_rows(&read(dir.path().join("ev.csv")));
    assert_eq!(rows.len(), 4);
    for pair in rows.chunks(2) {
        assert_eq!((pair[0][2].as_str(), pair[1][2].as_str()), ("0", "1"));
        let (a, b): (f64, f64) = (pair[0][3].parse().unwrap(), pair[1][3].parse().unwrap());
        assert!(a >= b, "λ=0 {a} < λ=1 {b}");
    }
}

#[test]
fn compare_writes_one_block_per_algorithm() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("cmp");
    ok(&[
        "compare",
        "--set",
        "generator=ER",
        "--set",
        "n=120",
        "--set",
        "q=0.03",
        "--set",
        "params=opinion_uniform,phi_uniform",
        "--set",
        "k=1,2",
        "--set",
        "algorithms=EASYIM,OSIM,PATH_UNION,MODIFIED_GREEDY",
        "--set",
        "replicas=500",
        "--set",
        "greedy_replicas=50",
        "--set",
        "kinds=SPREAD",
        "--seed",
        "8",
        "--out",
        path_arg(&out),
    ]);
    let rows = data_rows(&read(dir.path().join("cmp.csv")));
    assert_eq!(rows.len(), 4 * 2);
    let seeds = data_rows(&read(dir.path().join("cmp.seeds.csv")));
    assert_eq!(seeds.len(), 4 * 2);
    let timing = read(dir.path().join("cmp.timing.csv"));
    assert!(timing.starts_with("# schema: osim-timing/1\nphase,wall_ms\n"));
}
