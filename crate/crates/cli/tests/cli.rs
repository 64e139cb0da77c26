use std::path::PathBuf;
use std::process::{Command, Output};

fn gfz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gfz"))
        .args(args)
        .env_remove("GFZ_SPECTRAL_CAP")
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn parse_csv(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(gfz(&[]).status.code(), Some(2));
    assert_eq!(gfz(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gfz(&["apply", "--op", "gcn"]).status.code(), Some(2));
}

#[test]
fn list_shows_the_catalog() {
    let o = gfz(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().count() > 14);
    assert!(text.starts_with("name\tfamily\tnorm_kind\tp_coeffs\tq_coeffs"));
    for name in ["gcn", "sage_mean", "gin", "chebnet", "deepwalk", "dcnn", "gdc-ppr", "node2vec", "line", "sgc", "auto_regressive", "ppnp", "arma", "parwalks"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{name}\t"))), "{name}");
    }
}

#[test]
fn apply_gcn_on_k2_both_routes() {
    let (g, x) = (data("k2.tsv"), data("k2_features.csv"));
    let spatial = gfz(&["apply", "--graph", &g, "--features", &x, "--op", "gcn", "--route", "spatial"]);
    assert!(spatial.status.success());
    assert_eq!(stdout(&spatial), "1.5\n0.5\n");
    let spectral = gfz(&["apply", "--graph", &g, "--features", &x, "--op", "gcn", "--route", "spectral"]);
    assert!(spectral.status.success());
    let (a, b) = (parse_csv(&stdout(&spatial)), parse_csv(&stdout(&spectral)));
    for (ra, rb) in a.iter().zip(&b) {
        assert!((ra[0] - rb[0]).abs() <= 1e-8);
    }
}

#[test]
fn apply_with_cache_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z.csv");
    let cache = dir.path().join("bases");
    let args = [
        "apply", "--graph", &data("graph10.tsv"), "--features", &data("features10.csv"),
        "--op", "ppnp:alpha=0.3", "--route", "spectral",
        "--cache", cache.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ];
    assert!(gfz(&args).status.success());
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let first = std::fs::read_to_string(&out).unwrap();
    assert!(gfz(&args).status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), first);
    assert_eq!(parse_csv(&first).len(), 10);
}

#[test]
fn missing_file_exits_1() {
    let o = gfz(&["apply", "--graph", "/nonexistent/g.tsv", "--op", "gcn"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn unknown_operator_exits_1() {
    let o = gfz(&["apply", "--graph", &data("k2.tsv"), "--op", "nosuchop"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_bundled_graph_passes() {
    let o = gfz(&["verify", "--graph", &data("graph10.tsv"), "--features", &data("features10.csv")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let entries = v.as_array().unwrap();
    assert!(entries.len() >= 14);
    for e in entries {
        assert_eq!(e["pass"], true);
        assert!(e["max_err"].as_f64().unwrap() <= 1e-8);
        assert!(e.get("mean_err").is_some() && e["bipartite"] == false);
    }
}

#[test]
fn verify_with_zero_tolerance_fails() {
    let o = gfz(&["verify", "--graph", &data("graph10.tsv"), "--op", "gcn", "--op", "ppnp", "--tol", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.as_array().unwrap().iter().all(|e| e["pass"] == false));
}

#[test]
fn verify_flags_bipartite_graphs() {
    let o = gfz(&["verify", "--graph", &data("k2.tsv"), "--op", "sage_mean"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["bipartite"], true);
}

#[test]
fn spectral_cap_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_gfz"))
        .args(["apply", "--graph", &data("graph10.tsv"), "--op", "gcn", "--route", "spectral"])
        .env("GFZ_SPECTRAL_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn approx_emits_one_row_per_fitter() {
    let o = gfz(&["approx", "--target", "sign", "--poly", "8", "--rational", "4,4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    let err = |l: &str| l.split(',').nth(4).unwrap().parse::<f64>().unwrap();
    assert!(lines[1].starts_with("sign,poly,8,0,"));
    assert!(lines[2].starts_with("sign,rational,4,4,"));
    assert!(err(lines[2]) * 5.0 <= err(lines[1]));
    let curve = gfz(&["approx", "--target", "abs", "--budgets", "1,2,4"]);
    assert_eq!(stdout(&curve).lines().count(), 4);
    assert_eq!(gfz(&["approx", "--target", "sign", "--rational", "4"]).status.code(), Some(1));
}

#[test]
fn oversmooth_row_count() {
    let o = gfz(&["oversmooth", "--graph", &data("graph10.tsv"), "--op", "sgc", "--k", "200"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "k,max_row_dist,dirichlet,stationary_dist");
    assert_eq!(text.lines().count(), 201);
}

#[test]
fn sample_is_reproducible() {
    let args = ["sample", "--graph", &data("graph10.tsv"), "--walks", "1000", "--len", "10", "--seed", "42"];
    let a = gfz(&args);
    let b = gfz(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 1 + 10 * 1000);
    let c = gfz(&["sample", "--graph", &data("graph10.tsv"), "--walks", "2", "--len", "5", "--seed", "42", "--p", "0.5", "--q", "2"]);
    assert!(stdout(&c).starts_with("# seed=42 length=5 per_node=2 p=0.5 q=2"));
}

#[test]
fn bench_small_run() {
    let o = gfz(&["bench", "--families", "linear", "--sizes", "100", "--reps", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "family,n,F,K,median_seconds,reps");
    assert_eq!(text.lines().count(), 2);
    assert_eq!(gfz(&["bench", "--families", "cubic"]).status.code(), Some(1));
}
