//! End-to-end runs of the murmur binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn murmur(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_murmur"))
        .args(args)
        .output()
        .expect("spawn murmur")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_toy_corpus(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("toy.csv");
    fs::write(
        &path,
        "label,conductor,rank,a1,a2,a3,a4,a6\n\
         11.a,11,0,0,-1,1,-10,-20\n\
         19.a,19,0,0,1,1,1,0\n\
         37.a,37,1,0,0,1,-1,0\n\
         43.a,43,1,0,1,1,0,0\n",
    )
    .unwrap();
    path
}

#[test]
fn ap_reproduces_reference_rows() {
    let out = murmur(&["ap", "--curve", "0,0,1,-1,0", "--pmax", "100"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines[0], "prime,count,discrepancy,aggregate");
    assert_eq!(lines.len(), 26); // header + 25 primes
    assert_eq!(lines[1], "2,4,-2,-2");
    assert_eq!(*lines.last().unwrap(), "97,93,4,-14");
}

#[test]
fn ap_rejects_singular_equations() {
    let out = murmur(&["ap", "--curve", "0,0,0,0,0"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("E_DISCRIMINANT_ZERO"));
}

#[test]
fn chebyshev_table_and_crossings() {
    let out = murmur(&["chebyshev", "--limit", "100"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.trim().lines().count(), 25); // header + 24 odd primes
    assert!(text.ends_with("97,1,1,-2\n"));

    let out = murmur(&["chebyshev", "--limit", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "prime,remainder,discrepancy,aggregate");

    let out = murmur(&["chebyshev", "--limit", "30000", "--crossings", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("crossing 26861"));
}

#[test]
fn average_requires_both_parities() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_toy_corpus(dir.path());
    // [11, 20) holds only even-rank classes
    let out = murmur(&[
        "average",
        "--corpus",
        corpus.to_str().unwrap(),
        "--interval",
        "11:19",
        "--pmax",
        "10",
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("E_EMPTY_PARITY"));
    assert!(stderr(&out).contains("parity 1"));
}

#[test]
fn average_emits_series_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_toy_corpus(dir.path());
    let csv = dir.path().join("series.csv");
    let plot = dir.path().join("series.svg");
    let out = murmur(&[
        "average",
        "--corpus",
        corpus.to_str().unwrap(),
        "--interval",
        "11:43",
        "--pmax",
        "10",
        "--out",
        csv.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines[0], "prime,x,mean_even,mean_odd,count_even,count_odd");
    // even: curves at 11 and 19 (a_2 = -2, 0); odd: 37 and 43 (both -2)
    assert_eq!(lines[1], "2,0.181818,-1.000,-2.000,2,2");
    let svg = fs::read_to_string(&plot).unwrap();
    assert!(svg.contains("viewBox=\"0 0 1200 400\""));
    assert!(svg.contains("blue") && svg.contains("red"));
}

#[test]
fn dataset_exports_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_toy_corpus(dir.path());
    let out = murmur(&[
        "dataset",
        "--corpus",
        corpus.to_str().unwrap(),
        "--interval",
        "11:40",
        "--parity",
        "1",
        "--pmax",
        "10",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text, "label,p_2,p_3,p_5,p_7\n37.a,-2,-3,-2,-1\n");
}

#[test]
fn train_rejects_single_class() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_toy_corpus(dir.path());
    let out = murmur(&[
        "train",
        "--corpus",
        corpus.to_str().unwrap(),
        "--classes",
        "1",
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("E_SINGLE_CLASS"));
}

#[test]
fn manifest_reruns_byte_identical_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_toy_corpus(dir.path());
    let csv = dir.path().join("out.csv");
    let manifest = dir.path().join("run.json");
    let run = |threads: &str| {
        let out = murmur(&[
            "average",
            "--corpus",
            corpus.to_str().unwrap(),
            "--interval",
            "11:43",
            "--pmax",
            "30",
            "--out",
            csv.to_str().unwrap(),
            "--manifest",
            manifest.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        fs::read(&csv).unwrap()
    };
    let sequential = run("1");
    let parallel = run("2");
    assert_eq!(sequential, parallel);

    // replaying the manifest reproduces the same bytes
    fs::remove_file(&csv).unwrap();
    let out = murmur(&["rerun", manifest.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(fs::read(&csv).unwrap(), sequential);

    let recorded: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(recorded["subcommand"], "average");
    assert_eq!(recorded["interval_lo"], 11);
    assert_eq!(recorded["interval_hi"], 44);
}

#[test]
fn pca_writes_projection_profile_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_toy_corpus(dir.path());
    let proj = dir.path().join("proj.csv");
    let profile = dir.path().join("profile.csv");
    let plot = dir.path().join("pca.svg");
    let model = dir.path().join("model.csv");
    let out = murmur(&[
        "pca",
        "--corpus",
        corpus.to_str().unwrap(),
        "--interval",
        "11:43",
        "--pmax",
        "20",
        "--k",
        "2",
        "--out",
        proj.to_str().unwrap(),
        "--profile",
        profile.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&proj).unwrap();
    assert!(text.starts_with("label,rank,pc1,pc2\n"));
    assert_eq!(text.trim().lines().count(), 5);
    let prof = fs::read_to_string(&profile).unwrap();
    assert!(prof.starts_with("prime,weight\n"));
    assert_eq!(prof.trim().lines().count(), 9); // 8 primes <= 20
    assert!(fs::read_to_string(&plot).unwrap().contains("<svg"));
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(model.with_extension("csv.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["kind"], "pca");
    assert_eq!(sidecar["dimension"], 8);
}
