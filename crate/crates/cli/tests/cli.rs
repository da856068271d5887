use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn tuhf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tuhf"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn path(name: &str) -> String {
    fixture(name).to_str().expect("utf-8 path").to_string()
}

fn ok(args: &[&str]) -> String {
    let out = tuhf(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out)
}

fn exit_code(args: &[&str]) -> i32 {
    tuhf(args).status.code().expect("exited normally")
}

#[test]
fn out_rank_of_the_two_adic_tower() {
    assert_eq!(ok(&["out-rank", &path("two_inf_alt.tower")]), "1\n");
}

#[test]
fn a_tower_is_isomorphic_to_itself() {
    let a = path("two_inf_alt.tower");
    assert_eq!(ok(&["iso", &a, &a]), "isomorphic, r = 1/1\n");
}

#[test]
fn preamble_ratio_is_the_witness() {
    let out = ok(&["iso", &path("preamble_three.tower"), &path("preamble_third.tower")]);
    assert_eq!(out, "isomorphic, r = 3/1\n");
}

#[test]
fn swapped_primes_are_not_isomorphic() {
    let out = ok(&["iso", &path("two_three.tower"), &path("three_two.tower")]);
    assert_eq!(out, "not isomorphic\n");
}

#[test]
fn factor_recovers_the_shift() {
    let out = ok(&["factor", &path("two_inf_alt.tower"), "--auto", &path("shift2.auto")]);
    assert_eq!(out.lines().last(), Some("word 2/1"));
    assert!(out.contains("consistent: yes"));
}

#[test]
fn shift_output_matches_the_fixture() {
    let out = ok(&["shift", &path("two_inf_alt.tower"), "-p", "2", "--levels", "1..2"]);
    let expected = std::fs::read_to_string(fixture("shift2.auto")).unwrap();
    assert_eq!(out, expected);
}

#[test]
fn materialized_words_factor_back() {
    let dir = tempfile::tempdir().unwrap();
    let tower = path("two_inf_alt.tower");
    let mut data = String::new();
    for level in ["1", "2"] {
        data += &ok(&["materialize", &tower, "--word", "1/2", "--level", level]);
    }
    let auto = dir.path().join("inverse.auto");
    std::fs::write(&auto, data).unwrap();
    let out = ok(&["factor", &tower, "--auto", auto.to_str().unwrap()]);
    assert_eq!(out.lines().last(), Some("word 1/2"));
}

#[test]
fn tower_show_lists_levels_and_pair() {
    let out = ok(&["tower", "show", &path("preamble_three.tower"), "--depth", "3"]);
    assert!(out.contains("level 3: k = 30, s = 6, t = 5"), "{out}");
    assert!(out.contains("s_phi = 2^inf*3\n"), "{out}");
    assert!(out.contains("t_phi = 5^inf\n"), "{out}");
    let out = ok(&["tower", "show", &path("mixed.tower")]);
    assert!(out.contains("supernatural pair: not alternating"), "{out}");
}

#[test]
fn normalize_folds_the_preamble() {
    let out = ok(&["tower", "normalize", &path("preamble_three.tower")]);
    assert_eq!(out, "k1 3 3 1\ncycle alt 2 5\n");
}

#[test]
fn torsion_reports_a_non_identity_power() {
    let out = ok(&["torsion", &path("two_inf_alt.tower"), "--word", "2/1", "-p", "3"]);
    assert!(out.contains("matches tower: no"), "{out}");
    assert!(out.ends_with("not the identity\n"), "{out}");
}

#[test]
fn embedding_calculus() {
    assert_eq!(
        ok(&["embed", "compose", "std 2", "nest 2", "-k", "2"]),
        "T_2 -> T_8\nm=8 n=2 blocks=1,2,5,6;3,4,7,8\n"
    );
    assert_eq!(ok(&["embed", "compare", "std 2", "nest 2", "-k", "2"]), "greater\n");
    assert_eq!(ok(&["embed", "compare", "nest 2", "std 2", "-k", "2"]), "less\n");
    let tensor = ok(&["embed", "tensor", "std 2", "nest 2", "-k", "2", "-j", "2"]);
    let alt = ok(&["embed", "compose", "alt 2 2", "std 1", "-k", "4"]);
    assert_eq!(tensor, alt);
}

#[test]
fn gelfand_verdicts_agree() {
    let out = ok(&["gelfand", "cmp", &path("two_inf_alt.tower"), "--x", "0,1", "--y", "1,0"]);
    assert_eq!(out, "lexicographic: less\nprojections: less\nwitness: level 2, e_(2,3)\n");
    let out = ok(&["gelfand", "cmp", &path("two_inf_alt.tower"), "--x", "1,0", "--y", "0,1"]);
    assert!(out.ends_with("witness: none\n"), "{out}");
    let out = ok(&[
        "gelfand", "cmp", &path("two_inf_alt.tower"), "--x", "0,1", "--y", "1,0", "--y-tail", "other",
    ]);
    assert!(out.starts_with("lexicographic: incomparable\nprojections: incomparable\n"), "{out}");
}

#[test]
fn normalizer_split_of_a_phased_shift() {
    let out = ok(&["normalizer", "split", "--matrix", &path("phased_shift.mat")]);
    assert_eq!(
        out,
        "dim 3\nD = diag(0.000000+1.000000i, -1.000000+0.000000i, 1.000000+0.000000i)\nW = {(1,2), (2,3)}\n"
    );
}

#[test]
fn check_all_passes_on_the_two_adic_tower() {
    let out = ok(&["check", "all", &path("two_inf_alt.tower"), "--seed", "3", "--cases", "10"]);
    assert!(out.ends_with("sweeps passed\n"), "{out}");
    assert!(!out.contains("FAILED"), "{out}");
}

#[test]
fn output_is_deterministic() {
    let args = ["check", "all", &path("two_inf_alt.tower"), "--seed", "11", "--cases", "5"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn domain_errors_exit_with_one() {
    assert_eq!(exit_code(&["out-rank", &path("mixed.tower")]), 1);
    assert_eq!(exit_code(&["shift", &path("two_inf_alt.tower"), "-p", "3", "--levels", "1..2"]), 1);
    assert_eq!(exit_code(&["embed", "compare", "std 2", "std 3", "-k", "2"]), 1);
    assert_eq!(exit_code(&["gelfand", "cmp", &path("two_inf_alt.tower"), "--x", "0", "--y", "0,1"]), 1);
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tower");
    std::fs::write(&bad, "k1 x\ncycle std 2\n").unwrap();
    let out = tuhf(&["out-rank", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let auto = dir.path().join("bad.auto");
    std::fs::write(&auto, "levels 1\n").unwrap();
    assert_eq!(exit_code(&["factor", &path("two_inf_alt.tower"), "--auto", auto.to_str().unwrap()]), 2);
    assert_eq!(exit_code(&["out-rank", dir.path().join("missing").to_str().unwrap()]), 2);
    assert_eq!(exit_code(&["shift", &path("two_inf_alt.tower"), "-p", "2", "--levels", "2..1"]), 2);
    assert_eq!(exit_code(&["embed", "compose", "bogus 2", "std 2", "-k", "2"]), 2);
    assert_eq!(exit_code(&["materialize", &path("two_inf_alt.tower"), "--word", "two"]), 2);
}
