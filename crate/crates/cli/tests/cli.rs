use std::path::PathBuf;
use std::process::Command;

use htk::commands::{self, exit};
use htk::report::{CommandResult, Report};
use htk::spec::ProblemSpec;

fn spec_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(format!("{name}.toml"))
}

fn spec(name: &str) -> ProblemSpec {
    ProblemSpec::from_path(&spec_path(name)).unwrap()
}

fn htk(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_htk"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn round_trip(r: &Report) {
    let back: Report = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(&back, r);
}

#[test]
fn analyze_examples() {
    for (name, circuits, points) in [("tp1", 1, 2), ("a2", 3, 3), ("standard", 0, 1)] {
        let o = commands::analyze(&spec(name)).unwrap();
        round_trip(&o.report);
        let CommandResult::Analyze(a) = &o.report.result else {
            panic!()
        };
        assert_eq!(a.circuits.len(), circuits, "{name}");
        let fps = a.fixed_points.as_ref().unwrap();
        assert_eq!(fps.len(), points, "{name}");
        assert_eq!(a.verdict, "smooth");
        let d = a.u[0].len();
        assert!(fps.iter().all(|f| f.stabilizer_dimension == d));
    }
}

#[test]
fn analyze_echoes_default_levels() {
    let o = commands::analyze(&spec("d3")).unwrap();
    let CommandResult::Analyze(a) = &o.report.result else {
        panic!()
    };
    assert_eq!(a.alpha, vec!["1".to_string()]);
    assert_eq!(a.beta, vec![["0".to_string(), "0".to_string()]]);
}

#[test]
fn rings_tables() {
    let o = commands::rings(&spec("a1")).unwrap();
    round_trip(&o.report);
    assert_eq!(o.exit_code, exit::OK);
    let CommandResult::Rings(r) = &o.report.result else {
        panic!()
    };
    let product = |flavor: &str| -> String {
        let t = r.flavors.iter().find(|f| f.flavor == flavor).unwrap();
        t.table
            .iter()
            .find(|e| e.left == "r^(-1,-1)" && e.right == "r^(1,1)")
            .unwrap()
            .product
            .clone()
    };
    assert_eq!(product("additive"), "(y1^2)*r^(0,0)");
    assert_eq!(product("multiplicative"), "(s1^2 - 2*s1 + 1)*r^(0,0)");
    assert_eq!(product("elliptic"), "(ϑ̄1*ϑ̄2)*r^(0,0)");

    let mut s = spec("a1");
    s.options.degree = 0;
    let CommandResult::Rings(r) = commands::rings(&s).unwrap().report.result else {
        panic!()
    };
    assert!(r
        .flavors
        .iter()
        .all(|f| f.table.len() == 1 && f.table[0].product == "r^(0,0)"));

    let CommandResult::Rings(r) = commands::rings(&spec("a2")).unwrap().report.result else {
        panic!()
    };
    assert!(r.oracle_consistent);
    assert!(r.flavors.iter().all(|f| f.table.len() == 6));
}

#[test]
fn hikita_examples() {
    for name in ["tp1", "a2", "standard_v"] {
        let o = commands::hikita(&spec(name)).unwrap();
        round_trip(&o.report);
        assert_eq!(o.exit_code, exit::OK, "{name}");
    }
    let CommandResult::Hikita(h) = commands::hikita(&spec("standard_v")).unwrap().report.result
    else {
        panic!()
    };
    assert!(h.circuit_ideal.generators.is_empty());
    let o = commands::hikita(&spec("orbifold")).unwrap();
    assert_eq!(o.exit_code, exit::HIKITA_FAIL);
    let CommandResult::Hikita(h) = &o.report.result else {
        panic!()
    };
    assert!(!h.within_hypotheses);
}

#[test]
fn verify_examples() {
    let o = commands::verify(&spec("tp1")).unwrap();
    round_trip(&o.report);
    assert_eq!(o.exit_code, exit::OK);
    let CommandResult::Verify(v) = &o.report.result else {
        panic!()
    };
    assert!(v.checks.iter().all(|c| c.tolerance > 0.0));
    assert!(!v.truncation_warning);

    let o = commands::verify(&spec("coarse")).unwrap();
    assert_eq!(o.exit_code, exit::FAILURE);
    let CommandResult::Verify(v) = &o.report.result else {
        panic!()
    };
    let e = v.checks.iter().find(|c| c.name == "e_moment").unwrap();
    assert!(!e.pass && e.residual > e.tolerance);
    assert_eq!(e.step, Some(0.1));

    assert_eq!(
        commands::verify(&spec("large_tau")).unwrap().exit_code,
        exit::OK
    );
}

#[test]
fn reports_are_deterministic() {
    for name in ["tp1", "a2"] {
        let s = spec(name);
        assert_eq!(
            commands::verify(&s).unwrap().report.to_json(),
            commands::verify(&s).unwrap().report.to_json()
        );
        assert_eq!(
            commands::analyze(&s).unwrap().report.to_json(),
            commands::analyze(&s).unwrap().report.to_json()
        );
    }
}

#[test]
fn plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("a2");
    let o = commands::plot(&spec("a2"), &prefix).unwrap();
    round_trip(&o.report);
    let CommandResult::Plot(p) = &o.report.result else {
        panic!()
    };
    assert_eq!(p.marked_points, 3);
    let svg = std::fs::read_to_string(dir.path().join("a2_elliptic.svg")).unwrap();
    assert_eq!(svg.matches("class=\"fixed\"").count(), 3);
    assert!(dir.path().join("a2_real.svg").exists());

    let err = commands::plot(&spec("d3"), &dir.path().join("d3"))
        .err()
        .unwrap();
    assert!(err.to_string().contains("d = 3"));
}

#[test]
fn binary_exit_codes() {
    let tp1 = spec_path("tp1");
    let tp1 = tp1.to_str().unwrap();
    let (code, out, _) = htk(&["hikita", "--spec", tp1, "--json"]);
    assert_eq!(code, 0);
    let r: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(r.command, "hikita");

    let (code, out, _) = htk(&["verify", "--spec", tp1, "--seed", "7", "--samples", "20"]);
    assert_eq!(code, 0);
    assert!(out.contains("seed 7"));

    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| -> String {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_string()
    };
    let bad = write("bad.toml", "role = \"u\"\nmatrix = [[1], [1, 0]]\n");
    assert_eq!(htk(&["analyze", "--spec", &bad]).0, exit::PARSE);
    let degenerate = write("deg.toml", "role = \"u\"\nmatrix = [[2], [2]]\n");
    assert_eq!(htk(&["analyze", "--spec", &degenerate]).0, exit::DEGENERATE);
    let non_generic = write(
        "ng.toml",
        "role = \"v\"\nmatrix = [[1], [1]]\nalpha_hat = [1, 1]\n",
    );
    assert_eq!(
        htk(&["hikita", "--spec", &non_generic]).0,
        exit::NON_GENERIC_ALPHA
    );
    let orbifold = spec_path("orbifold");
    assert_eq!(
        htk(&["hikita", "--spec", orbifold.to_str().unwrap()]).0,
        exit::HIKITA_FAIL
    );

    let out_file = dir.path().join("report.json");
    let (code, stdout, _) = htk(&[
        "analyze",
        "--spec",
        tp1,
        "--json",
        "--out",
        out_file.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let r: Report = serde_json::from_str(&std::fs::read_to_string(out_file).unwrap()).unwrap();
    assert_eq!(r.spec_name, "tp1");
}
