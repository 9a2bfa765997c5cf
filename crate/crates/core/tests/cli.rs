use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;

use albanese::cli::{golden_checks, parse_basepoint, parse_curve, run, Cli, EvalOutput, ExtendOutput, HodgeOutput, VERIFY_FAILED};
use albanese::connext::LogExtension;
use albanese::exactalg::rational::{q, qi};
use albanese::exactalg::FuncElem;
use albanese::hodge::HodgeGenerators;
use albanese::periods::{BasepointKind, PeriodMapJson, PeriodMapResult};
use albanese::Error;
use clap::Parser;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/v1")
}

fn run_args(args: &[&str]) -> (i32, String) {
    let cli = Cli::try_parse_from(std::iter::once("albanese").chain(args.iter().copied())).unwrap();
    run(&cli)
}

fn ok(args: &[&str]) -> String {
    let (code, out) = run_args(args);
    assert_eq!(code, 0, "{args:?}: {out}");
    out
}

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_albanese")).args(args).output().unwrap()
}

#[test]
fn golden_files_match() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let lines = golden_checks(&fixtures(), update).unwrap();
    assert!(!lines.is_empty());
    for l in &lines {
        assert!(l.pass, "{}", l.render());
    }
}

#[test]
fn extend_example() {
    let out = ok(&["extend", "--curve", "[1,0,0,1]", "--genus", "1", "--level", "2"]);
    let j: ExtendOutput = serde_json::from_str(&out).unwrap();
    let c = Arc::new(parse_curve("[1,0,0,1]", Some(1)).unwrap());
    let e = j.extension.h.iter().find(|e| e.r == 4 && e.i == 0).unwrap();
    assert_eq!(e.word, "A1A1");
    assert_eq!(FuncElem::from_json(&e.elem, c.f_arc().clone()).unwrap(), c.big_f().pow(2).scale(&q(1, 2)));
    let k = j.lambda_like_constants.unwrap();
    assert_eq!((k.lambda, k.mu, k.kappa, k.nu), (qi(2), qi(0), qi(0), qi(-8)));
    let back = LogExtension::from_json(&j.extension, c.clone()).unwrap();
    assert_eq!(back.to_json(), j.extension);
    let text = ok(&["extend", "--level", "2", "--format", "text"]);
    assert!(text.contains("h[A1A1] (r=4, i=0)"));
    assert!(text.contains("C' (7x7):"));
}

#[test]
fn hodge_example() {
    let out = ok(&["hodge", "--curve", "[1,0,0,0,0,1]", "--genus", "2", "--level", "2", "--basepoint", "x=2"]);
    let j: HodgeOutput = serde_json::from_str(&out).unwrap();
    let c = Arc::new(parse_curve("[1,0,0,0,0,1]", Some(2)).unwrap());
    let want = (&c.x() - &c.constant(qi(2))).scale(&q(-2, 3));
    let gen = j.hodge.generators.iter().find(|g| g.m == 0 && g.f == 1).unwrap();
    let a1a3 = gen.terms.iter().find(|t| t.len == 2 && t.rank == 8).unwrap();
    assert_eq!(FuncElem::from_json(&a1a3.coeff, c.f_arc().clone()).unwrap(), want);
    let a3a1 = gen.terms.iter().find(|t| t.len == 2 && t.rank == 14).unwrap();
    assert_eq!(FuncElem::from_json(&a3a1.coeff, c.f_arc().clone()).unwrap(), -&want);
    let based = Arc::new((*c).clone().with_basepoint(albanese::exactalg::Basepoint { x: qi(2), y: None }).unwrap());
    let back = HodgeGenerators::from_json(&j.hodge, based).unwrap();
    assert_eq!(back.to_json(), j.hodge);
    let (code, _) = run_args(&["hodge", "--basepoint", "tangential"]);
    assert_eq!(code, 2);
}

#[test]
fn periodmap_example() {
    let out = ok(&["periodmap", "--level", "3", "--basepoint", "tangential"]);
    let j: PeriodMapJson = serde_json::from_str(&out).unwrap();
    assert_eq!(j.basepoint, BasepointKind::Tangential);
    let brackets: Vec<&str> = j.u.iter().map(|t| t.bracket.as_str()).collect();
    for b in ["A0", "[A0,A1]", "[A0,[A0,A1]]", "[A1,[A0,A1]]"] {
        assert!(brackets.contains(&b), "{b} in {brackets:?}");
    }
    let labels: Vec<&str> = j.forms.iter().map(|f| f.label.as_str()).collect();
    assert_eq!(&labels[..4], &["a0", "a1", "a1p", "Fa0"]);
    let c = parse_curve("[1,0,0,1]", None).unwrap();
    let back = PeriodMapResult::from_json(&j, &c).unwrap();
    assert_eq!(back.to_json(j.constants.clone()), j);
}

#[test]
fn eval_examples() {
    let forms = r#"[{"label":"w","series":{"val":-1,"coeffs":["1","2"]}}]"#;
    let out = ok(&["eval", "--forms", forms, "--z", "1/2"]);
    let v: EvalOutput = serde_json::from_str(&out).unwrap();
    assert_eq!(v.value.log_coeffs, vec!["1", "1"]);
    let out = ok(&["eval", "--forms", forms, "--z", "1/2", "--log-z", "3"]);
    let v: EvalOutput = serde_json::from_str(&out).unwrap();
    assert_eq!(v.value.log_coeffs, vec!["4"]);
    assert_eq!(v.log_z.as_deref(), Some("3"));
    let dir = tempfile_dir();
    let oracle = dir.join("oracle.json");
    std::fs::write(&oracle, r#"[{"word":["w"],"value":"5"}]"#).unwrap();
    let out = ok(&["eval", "--forms", forms, "--z", "1/2", "--oracle", oracle.to_str().unwrap()]);
    let v: EvalOutput = serde_json::from_str(&out).unwrap();
    assert_eq!(v.value.log_coeffs, vec!["6", "1"]);
    let form = serde_json::to_string(&parse_curve("[1,0,0,1]", None).unwrap().alpha(0).u.to_json()).unwrap();
    let spec = format!(r#"[{{"label":"a0","form":{form}}}]"#);
    let out = ok(&["eval", "--forms", &spec, "--z", "1/3", "--curve", "[1,0,0,1]", "--order", "8"]);
    let v: EvalOutput = serde_json::from_str(&out).unwrap();
    assert_eq!(v.value.prec, Some(9));
    let (code, _) = run_args(&["eval", "--forms", &spec, "--z", "1/3"]);
    assert_eq!(code, 2);
}

fn tempfile_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("albanese-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn parsers() {
    assert_eq!(parse_basepoint("rational").unwrap(), (BasepointKind::Rational, None));
    assert_eq!(parse_basepoint("tangential").unwrap(), (BasepointKind::Tangential, None));
    let (k, p) = parse_basepoint("x=0,y=1").unwrap();
    assert_eq!(k, BasepointKind::Rational);
    assert_eq!(p.unwrap().y, Some(qi(1)));
    assert!(parse_basepoint("y=1").is_err());
    assert_eq!(parse_curve("[0,0,1]", None).unwrap_err(), Error::SingularCurve);
    assert!(matches!(parse_curve("[1,0,0,1]", Some(2)), Err(Error::NotOddModel(_))));
    assert!(parse_curve("[\"1/2\",0,0,1]", None).is_ok());
    assert!(parse_curve("not json", None).is_err());
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["extend", "--curve", "[1,-1,0,1]", "--level", "3"][..],
        &["hodge", "--level", "3"][..],
        &["periodmap", "--curve", "[1,0,0,0,0,1]", "--level", "2", "--basepoint", "tangential"][..],
    ] {
        assert_eq!(ok(args), ok(args));
    }
}

#[test]
fn binary_exit_codes() {
    let o = bin(&["extend", "--level", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("\"level\": 1"));
    let o = bin(&["extend", "--curve", "[0,0,1]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    assert_eq!(bin(&["extend", "--level", "0"]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
    let pole = r#"[{"label":"w","series":{"val":-2,"coeffs":["1"]}}]"#;
    assert_eq!(bin(&["eval", "--forms", pole, "--z", "1/2"]).status.code(), Some(2));
    let vague = r#"[{"label":"w","series":{"val":0,"coeffs":[],"prec":-1}}]"#;
    assert_eq!(bin(&["eval", "--forms", vague, "--z", "1/2"]).status.code(), Some(4));
}

#[test]
fn verify_reports_the_printed_level_four_display() {
    let o = bin(&["verify", "--fixtures", fixtures().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(VERIFY_FAILED));
    let out = String::from_utf8_lossy(&o.stdout);
    let failed: Vec<&str> = out.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failed.len(), 2, "{out}");
    assert!(failed.iter().all(|l| l.contains("n=4 printed display")));
    assert!(out.lines().filter(|l| l.contains("amended display")).all(|l| l.starts_with("PASS")));
    assert!(out.lines().any(|l| l.starts_with("PASS golden")));
}
