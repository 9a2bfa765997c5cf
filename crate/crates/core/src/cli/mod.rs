//! Command-line front end: `extend`, `hodge`, `periodmap`, `eval`, `verify`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::connext::{ExtensionJson, LogExtension};
use crate::error::{Error, Result};
use crate::evalnum::{compose_paths, tangential_value, DiskForm, DiskPoint, LaurentOrForm, LogValueJson, OracleEntryJson, TableOracle};
use crate::exactalg::rational::{fmt_rational, parse_rational};
use crate::exactalg::{Basepoint, BasisChoice, CurveModel, FChoice, Poly, Rational};
use crate::hodge::{HodgeConstants, HodgeGenerators, HodgeJson};
use crate::periods::closed::{closed_form_with, Level4Display};
use crate::periods::{constants_table, period_map_run, BasepointKind, ShPoly};

#[derive(Parser, Debug)]
#[command(name = "albanese", version, about = "Unipotent Albanese maps on y^2 = f(x), deg f odd, over Q")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Logarithmic extension of the level-n universal connection.
    Extend(CurveArgs),
    /// F^0 generators of the Hodge filtration.
    Hodge(CurveArgs),
    /// Coordinates of the de Rham period map.
    Periodmap(CurveArgs),
    /// Iterated integrals from the tangential basepoint at infinity.
    Eval(EvalArgs),
    /// Recompute the closed forms and the golden files.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    /// Coefficients of f, constant term first, as a JSON list of integers or rational strings.
    #[arg(long, default_value = "[1,0,0,1]")]
    pub curve: String,
    /// Genus; must equal (deg f - 1) / 2 when given.
    #[arg(long)]
    pub genus: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub level: u32,
    /// `rational`, `tangential`, or an affine point `x=2` / `x=2,y=3`.
    #[arg(long, default_value = "rational")]
    pub basepoint: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    /// JSON file (or inline JSON) with a list of forms `{label, series}` or `{label, form}`.
    #[arg(long)]
    pub forms: String,
    /// Parameter value `pi = z` of the endpoint, or of the split point with `--oracle`.
    #[arg(long)]
    pub z: String,
    /// Value substituted for `log z`; kept symbolic when absent.
    #[arg(long)]
    pub log_z: Option<String>,
    /// JSON file with prefix values `[{word, value}]` of the integrals from `z` to the far endpoint.
    #[arg(long)]
    pub oracle: Option<PathBuf>,
    /// Curve for forms given as function-field elements.
    #[arg(long)]
    pub curve: Option<String>,
    /// Expansion order for forms given as function-field elements.
    #[arg(long, default_value_t = 24)]
    pub order: i64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Golden-file directory; each subdirectory holds `case.json` and the expected outputs.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    /// Rewrite the golden files instead of comparing.
    #[arg(long)]
    pub update: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

/// Parsed and validated job.
#[derive(Clone, Debug)]
pub struct JobConfig {
    pub curve: Arc<CurveModel>,
    pub kind: BasepointKind,
    pub level: u32,
    pub format: Format,
}

impl JobConfig {
    pub fn from_args(a: &CurveArgs) -> Result<Self> {
        if a.level == 0 {
            return Err(Error::InvalidInput("level must be at least 1".into()));
        }
        let (kind, point) = parse_basepoint(&a.basepoint)?;
        let mut curve = parse_curve(&a.curve, a.genus)?;
        if let Some(b) = point {
            curve = curve.with_basepoint(b)?;
        }
        Ok(JobConfig { curve: Arc::new(curve), kind, level: a.level, format: a.format })
    }
}

/// Curve from a JSON coefficient list, constant term first.
pub fn parse_curve(spec: &str, genus: Option<usize>) -> Result<CurveModel> {
    let v: Vec<serde_json::Value> = serde_json::from_str(spec).map_err(|e| Error::InvalidInput(format!("curve: {e}")))?;
    let coeffs = v
        .iter()
        .map(|c| match c {
            serde_json::Value::Number(n) => parse_rational(&n.to_string()),
            serde_json::Value::String(s) => parse_rational(s),
            other => Err(Error::InvalidInput(format!("coefficient {other}"))),
        })
        .collect::<Result<Vec<Rational>>>()?;
    let f = Poly::new(coeffs);
    let d = f.degree().unwrap_or(0);
    let g = d.saturating_sub(1) / 2;
    if let Some(gg) = genus {
        if gg != g || d != 2 * gg + 1 {
            return Err(Error::NotOddModel(format!("deg f = {d} but genus = {gg}")));
        }
    }
    CurveModel::new(f, g, BasisChoice::Standard, FChoice::Standard)
}

/// `rational`, `tangential`, `x=..`, `x=..,y=..`.
pub fn parse_basepoint(s: &str) -> Result<(BasepointKind, Option<Basepoint>)> {
    let t = s.trim();
    match t {
        "rational" => return Ok((BasepointKind::Rational, None)),
        "tangential" => return Ok((BasepointKind::Tangential, None)),
        _ => {}
    }
    let mut x = None;
    let mut y = None;
    for part in t.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(|| Error::InvalidInput(format!("basepoint {s}")))?;
        let v = parse_rational(v.trim())?;
        match k.trim() {
            "x" => x = Some(v),
            "y" => y = Some(v),
            other => return Err(Error::InvalidInput(format!("basepoint key {other}"))),
        }
    }
    let x = x.ok_or_else(|| Error::InvalidInput(format!("basepoint {s} has no x")))?;
    Ok((BasepointKind::Rational, Some(Basepoint { x, y })))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendOutput {
    #[serde(flatten)]
    pub extension: ExtensionJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_like_constants: Option<HodgeConstants>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HodgeOutput {
    #[serde(flatten)]
    pub hodge: HodgeJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<HodgeConstants>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalOutput {
    pub z: String,
    #[serde(flatten)]
    pub value: LogValueJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_z: Option<String>,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn run_extend(cfg: &JobConfig) -> Result<String> {
    let ext = LogExtension::compute(cfg.curve.clone(), cfg.level)?;
    let out = ExtendOutput { extension: ext.to_json(), lambda_like_constants: constants_table(&cfg.curve) };
    Ok(match cfg.format {
        Format::Json => to_json(&out),
        Format::Text => extend_text(&ext),
    })
}

fn extend_text(ext: &LogExtension) -> String {
    let mut s = String::new();
    let j = ext.to_json();
    let _ = writeln!(s, "{:?}, level {}", ext.curve(), ext.level());
    for e in &j.h {
        let _ = writeln!(s, "h[{}] (r={}, i={}) = {}", e.word, e.r, e.i, crate::exactalg::FuncElem::from_json(&e.elem, ext.curve().f_arc().clone()).map(|f| f.to_string()).unwrap_or_default());
    }
    for (k, w) in ext.c_map() {
        let word: String = crate::wordalg::word_string(k.0, k.1, ext.alphabet()).iter().map(|l| format!("A{l}")).collect();
        let _ = writeln!(s, "c[{word}] = {w}");
    }
    if ext.level() <= 3 {
        let gm = ext.gauge().matrix(ext.curve());
        let _ = writeln!(s, "G ({}x{}):", gm.len(), gm.len());
        for row in &gm {
            let _ = writeln!(s, "  [{}]", row.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "));
        }
        let cm = ext.cprime_matrix();
        let _ = writeln!(s, "C' ({}x{}):", cm.dim(), cm.dim());
        for row in &cm.entries {
            let _ = writeln!(s, "  [{}]", row.iter().map(|e| if e.is_zero() { "0".into() } else { e.to_string() }).collect::<Vec<_>>().join(", "));
        }
    }
    s
}

pub fn run_hodge(cfg: &JobConfig) -> Result<String> {
    if cfg.kind == BasepointKind::Tangential {
        return Err(Error::InvalidInput("the Hodge filtration is computed at a rational basepoint".into()));
    }
    let ext = LogExtension::compute(cfg.curve.clone(), cfg.level)?;
    let gens = HodgeGenerators::compute(&ext, cfg.level)?;
    let out = HodgeOutput { hodge: gens.to_json(), constants: constants_table(&cfg.curve) };
    Ok(match cfg.format {
        Format::Json => to_json(&out),
        Format::Text => {
            let mut s = String::new();
            for g in &out.hodge.generators {
                let _ = writeln!(s, "T[{}] (m={}, f={}):", g.word, g.m, g.f);
                for (k, v) in gens.a_map((g.m, g.f)).into_iter().flatten() {
                    let word: String = crate::wordalg::word_string(k.0, k.1, ext.alphabet()).iter().map(|l| format!("A{l}")).collect();
                    let _ = writeln!(s, "  {word}: {v}");
                }
            }
            if let Some(c) = &out.constants {
                let _ = writeln!(s, "lambda = {}, mu = {}, kappa = {}, nu = {}", c.lambda, c.mu, c.kappa, c.nu);
            }
            s
        }
    })
}

pub fn run_periodmap(cfg: &JobConfig) -> Result<String> {
    let run = period_map_run(cfg.level, cfg.curve.clone(), cfg.kind)?;
    let r = &run.result;
    Ok(match cfg.format {
        Format::Json => to_json(&r.to_json(constants_table(&cfg.curve))),
        Format::Text => {
            let mut s = String::new();
            for (_, name, f) in r.registry.labels() {
                let _ = writeln!(s, "{name} = {f}");
            }
            let _ = writeln!(s, "u:");
            for (w, c) in &r.u.terms {
                let _ = writeln!(s, "  {w}: {}", c.display_with(&r.registry));
            }
            let _ = writeln!(s, "hodge factor:");
            for (w, c) in &r.hodge_factor.terms {
                let _ = writeln!(s, "  {w}: {}", c.display_with(&r.registry));
            }
            s
        }
    })
}

fn read_json_arg(s: &str) -> Result<String> {
    let t = s.trim_start();
    if t.starts_with('[') || t.starts_with('{') {
        return Ok(s.to_string());
    }
    fs::read_to_string(s).map_err(|e| Error::InvalidInput(format!("{s}: {e}")))
}

pub fn run_eval(a: &EvalArgs) -> Result<String> {
    let entries: Vec<LaurentOrForm> = serde_json::from_str(&read_json_arg(&a.forms)?).map_err(|e| Error::InvalidInput(format!("forms: {e}")))?;
    let curve = a.curve.as_deref().map(|c| parse_curve(c, None)).transpose()?;
    let forms = entries.iter().map(|e| e.to_disk_form(curve.as_ref(), a.order)).collect::<Result<Vec<DiskForm>>>()?;
    let z = DiskPoint::new(parse_rational(&a.z)?)?;
    let log_z = a.log_z.as_deref().map(parse_rational).transpose()?;
    let value = match &a.oracle {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
            let entries: Vec<OracleEntryJson> = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("oracle: {e}")))?;
            let oracle = TableOracle::from_json(&entries)?;
            if let Err((u, w)) = oracle.check_shuffle() {
                return Err(Error::InvalidInput(format!("oracle violates the shuffle relation on {u:?} x {w:?}")));
            }
            compose_paths(&forms, &z, &oracle, log_z.as_ref())?
        }
        None => {
            let series: Vec<_> = forms.iter().map(|f| f.series.clone()).collect();
            tangential_value(&series, &z, log_z.as_ref())?
        }
    };
    let out = EvalOutput { z: fmt_rational(z.z()), value: value.to_json(), log_z: log_z.as_ref().map(fmt_rational) };
    Ok(match a.format {
        Format::Json => to_json(&out),
        Format::Text => {
            let terms: Vec<String> = out.value.log_coeffs.iter().enumerate().map(|(j, c)| if j == 0 { c.clone() } else { format!("({c})*log(z)^{j}") }).collect();
            let tail = out.value.prec.map(|p| format!(" + O(z^{p})")).unwrap_or_default();
            format!("{}{}\n", if terms.is_empty() { "0".into() } else { terms.join(" + ") }, tail)
        }
    })
}

/// One golden-file case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenCase {
    pub curve: String,
    pub genus: usize,
    pub level: u32,
    #[serde(default = "default_basepoint")]
    pub basepoint: String,
    /// Subset of `extend`, `hodge`, `periodmap`.
    pub outputs: Vec<String>,
}

fn default_basepoint() -> String {
    "rational".into()
}

impl GoldenCase {
    pub fn config(&self) -> Result<JobConfig> {
        JobConfig::from_args(&CurveArgs {
            curve: self.curve.clone(),
            genus: Some(self.genus),
            level: self.level,
            basepoint: self.basepoint.clone(),
            format: Format::Json,
        })
    }

    pub fn render(&self, output: &str) -> Result<String> {
        let cfg = self.config()?;
        match output {
            "extend" => run_extend(&cfg),
            "hodge" => run_hodge(&cfg),
            "periodmap" => run_periodmap(&cfg),
            other => Err(Error::InvalidInput(format!("unknown output {other}"))),
        }
    }
}

/// Outcome of one verification check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckLine {
    pub fn render(&self) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        if self.detail.is_empty() {
            format!("{tag} {}", self.name)
        } else {
            format!("{tag} {} ({})", self.name, self.detail)
        }
    }
}

/// Built-in closed-form comparisons for `(curve, genus, kind, level)`.
pub fn closed_form_checks() -> Result<Vec<CheckLine>> {
    let cases: &[(&[i64], BasepointKind, u32)] = &[
        (&[1, 0, 0, 1], BasepointKind::Rational, 4),
        (&[1, -1, 0, 1], BasepointKind::Rational, 4),
        (&[1, 0, 0, 1], BasepointKind::Tangential, 3),
        (&[1, -1, 0, 1], BasepointKind::Tangential, 3),
        (&[1, 0, 0, 0, 0, 1], BasepointKind::Rational, 2),
        (&[1, 0, 0, 0, 0, 1], BasepointKind::Tangential, 2),
    ];
    let mut out = Vec::new();
    for &(coeffs, kind, top) in cases {
        let curve = Arc::new(CurveModel::standard(coeffs)?);
        let g = curve.genus();
        let run = period_map_run(top, curve.clone(), kind)?;
        let reg = &run.result.registry;
        let one = ShPoly::one();
        for n in 1..=top {
            let u = run.result.u.lie_expand(g, n, &one)?;
            let h = run.result.hodge_factor.lie_expand(g, n, &one)?;
            let mut displays = vec![Level4Display::Printed];
            if g == 1 && kind == BasepointKind::Rational && n == 4 {
                displays.push(Level4Display::Amended);
            }
            for l4 in displays {
                let Some(cf) = closed_form_with(n, kind, reg, &run.extension, &run.hodge, l4)? else { continue };
                let du = u.sub(&cf.u.lie_expand(g, n, &one)?)?;
                let dh = h.sub(&cf.hodge_factor.lie_expand(g, n, &one)?)?;
                let suffix = match (l4, n) {
                    (Level4Display::Amended, _) => " amended display",
                    (_, 4) => " printed display",
                    _ => "",
                };
                let name = format!("y^2 = {} {kind:?} n={n}{suffix}", curve.f());
                let detail = if du.is_zero() && dh.is_zero() {
                    String::new()
                } else {
                    format!("{} u words and {} hodge-factor words differ", du.words().len(), dh.words().len())
                };
                out.push(CheckLine { name, pass: du.is_zero() && dh.is_zero(), detail });
            }
        }
        let ident = run.result.check_identity(&run.pcr)?;
        out.push(CheckLine { name: format!("y^2 = {} {kind:?} exp(h)exp(u) = p at n={top}", curve.f()), pass: ident, detail: String::new() });
    }
    Ok(out)
}

/// Compares (or rewrites) every golden file below `dir`.
pub fn golden_checks(dir: &Path, update: bool) -> Result<Vec<CheckLine>> {
    let mut cases: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("case.json").is_file())
        .collect();
    cases.sort();
    let mut out = Vec::new();
    for c in cases {
        let text = fs::read_to_string(c.join("case.json")).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let case: GoldenCase = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", c.display())))?;
        for o in &case.outputs {
            let file = c.join(format!("{o}.json"));
            let got = case.render(o)?;
            let name = format!("golden {}/{o}.json", c.file_name().and_then(|s| s.to_str()).unwrap_or("?"));
            if update {
                fs::write(&file, &got).map_err(|e| Error::InvalidInput(format!("{}: {e}", file.display())))?;
                out.push(CheckLine { name, pass: true, detail: "written".into() });
                continue;
            }
            let want = fs::read_to_string(&file).unwrap_or_default();
            out.push(CheckLine { name, pass: got == want, detail: if got == want { String::new() } else { "output differs".into() } });
        }
    }
    Ok(out)
}

/// Runs the verification suite; the report has one line per check.
pub fn run_verify(a: &VerifyArgs) -> Result<(String, bool)> {
    let mut lines = closed_form_checks()?;
    if let Some(dir) = &a.fixtures {
        lines.extend(golden_checks(dir, a.update)?);
    }
    let pass = lines.iter().all(|l| l.pass);
    let mut s: String = lines.iter().map(|l| l.render() + "\n").collect();
    let failed = lines.iter().filter(|l| !l.pass).count();
    let _ = writeln!(s, "{} checks, {} failed", lines.len(), failed);
    Ok((s, pass))
}

/// Exit code for a finished verification with failures.
pub const VERIFY_FAILED: i32 = 3;

/// Runs one command; returns the exit code and the text for stdout.
pub fn run(cli: &Cli) -> (i32, String) {
    let res = match &cli.command {
        Command::Extend(a) => JobConfig::from_args(a).and_then(|c| run_extend(&c)).map(|s| (0, s)),
        Command::Hodge(a) => JobConfig::from_args(a).and_then(|c| run_hodge(&c)).map(|s| (0, s)),
        Command::Periodmap(a) => JobConfig::from_args(a).and_then(|c| run_periodmap(&c)).map(|s| (0, s)),
        Command::Eval(a) => run_eval(a).map(|s| (0, s)),
        Command::Verify(a) => run_verify(a).map(|(s, ok)| (if ok { 0 } else { VERIFY_FAILED }, s)),
    };
    match res {
        Ok(v) => v,
        Err(e) => (e.exit_code(), format!("error: {e}\n")),
    }
}

/// Entry point for the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (code, text) = run(&cli);
    if code == 0 || matches!(cli.command, Command::Verify(_)) {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
    code
}
