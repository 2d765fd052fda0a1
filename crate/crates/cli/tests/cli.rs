use std::path::PathBuf;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = ordelab_cli::run(std::iter::once("ordelab").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ordelab-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn catalog_lists_the_seven_groups() {
    let (code, out) = run(&["--format", "records", "catalog"]);
    assert_eq!(code, 0);
    let names: Vec<&str> = out.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(names, ["z", "z2", "f2", "klein", "heis", "bs12", "p237"]);
    let (code, out) = run(&["catalog", "--show", "bs12"]);
    assert_eq!(code, 0);
    assert!(out.contains("affine_model: true"));
}

#[test]
fn z_has_two_cones() {
    let (code, out) = run(&["cones", "--preset", "z", "--radius", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("# cone ").count(), 2);
    assert!(out.contains("# cones: 2\n"));
    assert!(out.contains("a^3\t+1\n") && out.contains("a^3\t-1\n"));
}

#[test]
fn unsat_exits_one() {
    let (code, out) = run(&["cones", "--preset", "z", "--radius", "2", "--force-star", "a"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("UNSAT nodes="));
}

#[test]
fn forced_signs_are_respected() {
    let (code, out) = run(&["cones", "--preset", "klein", "--radius", "2", "--force-star", "a", "--limit", "100"]);
    assert_eq!(code, 0);
    for block in out.split("# cone ").skip(1) {
        assert!(block.lines().any(|l| l == "a\t*"), "{block}");
    }
}

#[test]
fn certify_p237_is_negative() {
    let (code, out) = run(&["certify", "--preset", "p237"]);
    assert_eq!(code, 1);
    assert!(out.contains("certificate: NO-SURJECTION diag(1,1,1)\n"));
    let (code, out) = run(&["--format", "records", "certify", "--preset", "klein"]);
    assert_eq!(code, 0);
    assert!(out.contains("certificate\tSURJECTS a->0 b->1\n"));
}

#[test]
fn cone_file_round_trip_through_realize() {
    let dir = scratch("realize");
    let file = dir.join("z2.cone");
    let (_, cone) = run(&["cones", "--preset", "z2", "--radius", "2", "--index", "3"]);
    std::fs::write(&file, &cone).unwrap();
    let (code, out) = run(&["realize", "--preset", "z2", "--radius", "2", "--cone", file.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("p\t0/1\n") && out.ends_with("verify: PASS\n"));
    let (_, by_index) = run(&["realize", "--preset", "z2", "--radius", "2", "--index", "3"]);
    assert_eq!(out.lines().skip(1).collect::<Vec<_>>(), by_index.lines().skip(1).collect::<Vec<_>>());
    std::fs::write(&file, "a\t+1\na^-1\t+1\n").unwrap();
    let (code, _) = run(&["realize", "--preset", "z2", "--radius", "2", "--cone", file.to_str().unwrap()]);
    assert_eq!(code, 2);
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn crossings_and_recurrence() {
    let (code, out) = run(&["--format", "records", "crossings", "--preset", "bs12", "--word-bound", "3", "--power-bound", "8"]);
    assert_eq!(code, 0);
    for line in ["crossing\tFOUND", "f\ta^-1", "u\t0/1\tid", "v\t1/1\tb", "N\t2", "M\t2", "replay\ttrue"] {
        assert!(out.lines().any(|l| l == line), "missing {line}:\n{out}");
    }
    assert!(out.contains("lemma_recurrence\tFAILS"));
    let (code, out) = run(&["crossings", "--preset", "z2", "--index", "0", "--word-bound", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("crossing: NONE-UP-TO-BOUND"));
    let (code, out) = run(&["recurrence", "--preset", "z2", "--chain", "id,a,a^2", "--h", "b", "--bound", "16"]);
    assert_eq!(code, 0);
    assert!(out.contains("recurrence: RECURRENT-UP-TO-BOUND"));
    // the lemma chain of the affine crossing fails
    let (code, out) = run(&["recurrence", "--preset", "bs12", "--chain", "a^-3 b a^-1 b a^-1 b,a^-1 b", "--h", "b^-1 a^-1 b"]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("recurrence: FAILS"));
}

#[test]
fn pipeline_reports() {
    let (code, out) = run(&["pipeline", "--preset", "klein", "--radius", "2", "--bounds", "8"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("verdict: CONSISTENT\n"));
    let (code, out) = run(&["--format", "records", "pipeline", "--preset", "p237", "--radius", "2", "--exploratory"]);
    assert_eq!(code, 0);
    assert!(out.contains("exploratory\ttrue\n"));
    assert!(!out.contains("INCONSISTENT"));
}

#[test]
fn parse_and_ball_from_files() {
    let dir = scratch("parse");
    let pres = dir.join("g.pres");
    let rules = dir.join("g.rules");
    std::fs::write(&pres, "< a, b | a b a^-1 b^-1 >\n").unwrap();
    std::fs::write(&rules, "%free\nb a -> a b\nb a^-1 -> a^-1 b\nb^-1 a -> a b^-1\nb^-1 a^-1 -> a^-1 b^-1\n").unwrap();
    let (p, r) = (pres.to_str().unwrap(), rules.to_str().unwrap());
    let (code, out) = run(&["--format", "records", "parse", "--presentation", p, "--rules", r, "--word", "b a b^-1"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("confluent\ttrue"));
    assert!(out.contains("normal_form\tb a b^-1\ta\n"));
    let (code, out) = run(&["--format", "records", "ball", "--presentation", p, "--rules", r, "--radius", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("size\t25\n") && out.contains("sphere\t3\t12\t25\n"));
    let (code, _) = run(&["ball", "--presentation", p, "--radius", "2"]);
    assert_eq!(code, 2, "rules are required for the ball");
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn envelope_output() {
    let (code, out) = run(&["envelope", "--preset", "bs12", "--g", "a^-1", "--x", "1", "--bound", "4"]);
    assert_eq!(code, 0);
    assert!(out.contains("lo: 1/16\n") && out.contains("hi: +inf\n"));
    assert!(out.contains("cofinal: NOT-COFINAL fixes=0/1"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["frobnicate"],
        vec!["ball"],
        vec!["ball", "--preset", "nosuch"],
        vec!["cones", "--preset", "z", "--radius", "x"],
        vec!["--parallelism", "0", "catalog"],
        vec!["recurrence", "--preset", "z2", "--chain", "id,q", "--h", "a"],
        vec!["realize", "--preset", "z", "--cone", "/nonexistent/file"],
    ] {
        assert_eq!(run(&args).0, 2, "{args:?}");
    }
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ordelab");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["catalog"]), Some(0));
    assert_eq!(status(&["certify", "--preset", "p237"]), Some(1));
    assert_eq!(status(&["ball", "--radius", "2"]), Some(2));
}
