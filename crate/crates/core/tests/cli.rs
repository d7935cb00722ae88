use std::fs;
use std::path::{Path, PathBuf};

use jobrec::cli::run;
use jobrec::xml::load_profile;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn jobrec(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("jobrec").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn evaluate_identical_rankings_prints_zero() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("r.csv");
    fs::write(&f, "jid,rank\nJ1,1\nJ2,2\nJ3,3\n").unwrap();
    let (code, out, _) = jobrec(&["evaluate", "--sys", p(&f), "--usr", p(&f)]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "0");
}

#[test]
fn evaluate_reversed_rankings() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.csv");
    let usr = dir.path().join("usr.csv");
    fs::write(&sys, "jid,rank\nC,1\nB,2\nA,3\n").unwrap();
    fs::write(&usr, "jid,rank\nA,1\nB,2\nC,3\n").unwrap();
    let (code, out, _) = jobrec(&["evaluate", "--sys", p(&sys), "--usr", p(&usr)]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "8");
}

#[test]
fn evaluate_rejects_mismatched_items() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.csv");
    let usr = dir.path().join("usr.csv");
    fs::write(&sys, "jid,rank\nA,1\nB,2\n").unwrap();
    fs::write(&usr, "jid,rank\nA,1\nC,2\n").unwrap();
    let (code, _, err) = jobrec(&["evaluate", "--sys", p(&sys), "--usr", p(&usr)]);
    assert_eq!(code, 1);
    assert!(err.contains("error"));
}

#[test]
fn ingest_twice_inserts_nothing_the_second_time() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("jpd.xml");
    let src = data("two_jpd.xml");
    let (code, out, _) = jobrec(&["ingest", p(&src), "--out", p(&db)]);
    assert_eq!(code, 0);
    assert!(out.contains("inserted 2,"), "{out}");
    let first = fs::read_to_string(&db).unwrap();

    let (code, out, _) = jobrec(&["ingest", p(&src), "--out", p(&db)]);
    assert_eq!(code, 0);
    assert!(out.contains("inserted 0,"), "{out}");
    assert!(out.contains("duplicates 2"), "{out}");
    assert_eq!(fs::read_to_string(&db).unwrap(), first);
}

#[test]
fn ingest_merges_several_files() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("jpd.xml");
    let (code, out, _) = jobrec(&[
        "ingest",
        p(&data("two_jpd.xml")),
        p(&data("fixture_jpd.xml")),
        "--out",
        p(&db),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("store size 32"), "{out}");
}

#[test]
fn ingest_reports_malformed_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.xml");
    fs::write(&bad, "<JPD>\n<JobProposal JID=\"J1\">\n</Oops>\n").unwrap();
    let (code, _, err) = jobrec(&["ingest", p(&bad), "--out", p(&dir.path().join("o.xml"))]);
    assert_eq!(code, 1);
    assert!(err.contains("bad.xml") && err.contains('3'), "{err}");
}

#[test]
fn recommend_then_accept_updates_profile() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("ada.xml");
    let jpd = data("two_jpd.xml");

    let (code, out, _) = jobrec(&[
        "recommend", "--jpd", p(&jpd), "--profile", p(&profile), "--topics", "java", "--sel", "0.4",
        "--strategy", "pnf",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("alpha 0.55\n"), "{out}");
    assert!(out.contains("J1\t"), "{out}");
    assert!(!profile.exists(), "no feedback, no profile write");

    let (code, out, _) = jobrec(&[
        "recommend", "--jpd", p(&jpd), "--profile", p(&profile), "--topics", "java", "--strategy", "pnf",
        "--accept", "J1",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("sigma 1"), "{out}");
    let saved = load_profile(&profile).unwrap();
    assert_eq!(saved.uid, "ada");
    assert_eq!(saved.past_queries.len(), 1);
    assert_eq!(saved.past_queries[0].sigma, 1.0);
    assert_eq!(saved.past_queries[0].alpha, 0.55);

    // sigma 1 pushes the next PNF audacity up by 0.5
    let (code, out, _) = jobrec(&[
        "recommend", "--jpd", p(&jpd), "--profile", p(&profile), "--topics", "java", "--strategy", "pnf",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("alpha 1\n"), "{out}");
}

#[test]
fn recommend_rejects_unrecommended_acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("u.xml");
    let (code, _, err) = jobrec(&[
        "recommend", "--jpd", p(&data("two_jpd.xml")), "--profile", p(&profile), "--topics", "java",
        "--accept", "J2",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("J2"), "{err}");
    assert!(!profile.exists());
}

#[test]
fn simulate_demo_config_writes_three_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("small.conf");
    fs::write(
        &conf,
        format!(
            "corpus.path = {}\nusers.count = 4\nqueries.count = 6\nseed = 3\nstrategy.kind = 2-lse\n",
            p(&data("fixture_jpd.xml"))
        ),
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let (code, _, err) = jobrec(&["simulate", "--config", p(&conf), "--out-dir", p(&out_dir)]);
    assert_eq!(code, 0, "{err}");
    let rows = |name: &str| fs::read_to_string(out_dir.join(name)).unwrap().lines().count() - 1;
    assert_eq!(rows("episodes.csv"), 4 * 6);
    assert_eq!(rows("series.csv"), 6);
    assert_eq!(rows("profile_size.csv"), 6);
}

#[test]
fn simulate_shipped_config() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = jobrec(&["simulate", "--config", p(&data("cohort.conf")), "--out-dir", p(dir.path())]);
    assert_eq!(code, 0, "{err}");
    let episodes = fs::read_to_string(dir.path().join("episodes.csv")).unwrap();
    assert_eq!(episodes.lines().count() - 1, 50 * 25);
}

#[test]
fn bad_flags_exit_with_usage() {
    let (code, _, err) = jobrec(&["recommend", "--topics", "java"]);
    assert_eq!(code, 2);
    assert!(err.to_lowercase().contains("usage"), "{err}");
    let (code, _, _) = jobrec(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _, _) = jobrec(&[]);
    assert_eq!(code, 2);
}

#[test]
fn bad_config_exits_with_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    fs::write(&conf, "users.count = 3\nno equals sign here\n").unwrap();
    let (code, _, err) = jobrec(&["simulate", "--config", p(&conf), "--out-dir", p(dir.path())]);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn help_is_success() {
    let (code, out, _) = jobrec(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("simulate"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_jobrec");
    let status = std::process::Command::new(bin)
        .arg("--bogus")
        .stderr(std::process::Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("r.csv");
    fs::write(&f, "jid,rank\nA,1\n").unwrap();
    let out = std::process::Command::new(bin)
        .args(["evaluate", "--sys", p(&f), "--usr", p(&f)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0");
}
