use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use albanese::connext::{gauge_apply_word, gauge_of_connection, log_pole_constant, universal_conn_matrix, verify_log_poles, LogExtension};
use albanese::evalnum::{tangential_value, DiskPoint, LogValue};
use albanese::exactalg::rational::{one, q, qi};
use albanese::exactalg::{Basepoint, CurveModel, FuncElem, LaurentSeries, OneForm, Rational};
use albanese::hodge::{check_conditions_im, hodge_constants, HodgeGenerators};
use albanese::periods::closed::{closed_form_with, Level4Display};
use albanese::periods::{period_map, period_map_run, BasepointKind, ShPoly};
use albanese::wordalg::{rank_of, shuffle_words, word_string, Key, LieExpr, LieWord, TensorElem, TensorSquare};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Check = Result<(), String>;

/// Criteria whose failure is known and recorded.
const EXPECTED_FAIL: &[u32] = &[5];

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn curve(coeffs: &[i64]) -> Arc<CurveModel> {
    Arc::new(CurveModel::standard(coeffs).unwrap())
}

fn based(coeffs: &[i64], x: i64, y: Option<i64>) -> Arc<CurveModel> {
    let c = CurveModel::standard(coeffs).unwrap();
    Arc::new(c.with_basepoint(Basepoint { x: qi(x), y: y.map(qi) }).unwrap())
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e:?}"))
}

fn word(c: &CurveModel, n: u32, letters: &[u8]) -> TensorElem<FuncElem> {
    TensorElem::word(c.genus(), n, letters, c.one())
}

fn lie(c: &CurveModel, n: u32, s: &str) -> TensorElem<FuncElem> {
    LieWord::parse(s).unwrap().expand(c.genus(), n, &c.one()).unwrap()
}

fn key(letters: &[u8], g: usize) -> Key {
    (letters.len() as u32, rank_of(letters, 2 * g as u32))
}

/// `lambda` from `lambda dF - F^2 alpha_0 / 2` having a logarithmic pole at infinity.
fn lambda_of(c: &CurveModel) -> Result<Rational, String> {
    let f = c.big_f();
    let target = c.alpha(0).mul_fe(&f.pow(2)).scale(&q(1, 2));
    let l = ok(log_pole_constant(&target, c), "lambda")?.ok_or("no lambda")?;
    let order = ok(c.pole_order_form(&(&f.d().scale(&l) - &target)), "pole order")?;
    ensure!(order <= 1, "lambda dF - F^2 a0/2 has pole order {order}");
    Ok(l)
}

/// `mu` from `lambda F dF / 3 + mu dF - F^3 alpha_0 / 6` having a logarithmic pole at infinity.
fn mu_of(c: &CurveModel, lambda: &Rational) -> Result<Rational, String> {
    let f = c.big_f();
    let target = &c.alpha(0).mul_fe(&f.pow(3)).scale(&q(1, 6)) - &f.d().mul_fe(f).scale(&(lambda * q(1, 3)));
    let m = ok(log_pole_constant(&target, c), "mu")?.ok_or("no mu")?;
    let order = ok(c.pole_order_form(&(&f.d().scale(&m) - &target)), "pole order")?;
    ensure!(order <= 1, "mu condition has pole order {order}");
    Ok(m)
}

fn criterion_1() -> Check {
    for c in [curve(&[1, 0, 0, 1]), curve(&[1, -1, 0, 1])] {
        let e = ok(LogExtension::compute(c.clone(), 2), "extension")?;
        let f = c.big_f().clone();
        let z = c.zero();
        let gm = e.gauge().matrix(&c);
        let h2: Vec<Vec<FuncElem>> = (0..4).map(|i| gm[i][4..7].to_vec()).collect();
        let want = vec![
            vec![z.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone()],
            vec![f.clone(), z.clone(), z.clone()],
            vec![z.clone(), f.clone(), f.pow(2).scale(&q(1, 2))],
        ];
        ensure!(h2 == want, "H2 differs for {:?}", c.f());
        let a0 = c.alpha(0).clone();
        let a1p = &f.d() - c.alpha(1);
        let fa0 = a0.mul_fe(&f);
        let zf = c.zero_form();
        let cp = ok(gauge_of_connection(&universal_conn_matrix(2, &c), &e.gauge(), &c), "gauge")?;
        let d2: Vec<Vec<OneForm>> = cp
            .block(2, 1)
            .into_iter()
            .zip(cp.block(2, 0))
            .map(|(mut r, last)| {
                r.extend(last);
                r
            })
            .collect();
        let want = vec![
            vec![-&a0, zf.clone(), zf.clone()],
            vec![zf.clone(), -&a0, -&fa0],
            vec![a1p.clone(), zf.clone(), fa0.clone()],
            vec![zf.clone(), a1p.clone(), zf.clone()],
        ];
        ensure!(d2 == want, "D'2 differs for {:?}", c.f());
    }
    Ok(())
}

fn criterion_2() -> Check {
    for c in [curve(&[1, 0, 0, 1]), curve(&[1, -1, 0, 1])] {
        let e = ok(LogExtension::compute(c.clone(), 4), "extension")?;
        let f = c.big_f();
        let l = lambda_of(&c)?;
        let h3 = [([0u8, 1, 1], f.scale(&l)), ([1, 0, 1], f.scale(&(&l * qi(-2)))), ([1, 1, 0], f.scale(&l)), ([1, 1, 1], f.pow(3).scale(&q(1, 6)))];
        for (w, want) in h3 {
            ensure!(e.h_of(&w) == want, "H3 entry {w:?}");
        }
        for w in [[0u8, 0, 0], [0, 0, 1], [0, 1, 0], [1, 0, 0]] {
            ensure!(e.h_of(&w).is_zero(), "H3 entry {w:?} nonzero");
        }
        let m = mu_of(&c, &l)?;
        let g41 = ok(gauge_apply_word(&e.gauge(), (0, 1), &c), "G4(1)")?;
        ensure!(g41.coeff_of(&[1, 1, 1, 1]) == f.pow(4).scale(&q(1, 24)), "F^4/24 A1^4");
        let f2 = f.pow(2);
        let pattern = [
            ([0u8, 1, 1, 1], q(1, 6), qi(1)),
            ([1, 0, 1, 1], q(1, 2), qi(-3)),
            ([1, 1, 0, 1], q(-3, 2), qi(3)),
            ([1, 1, 1, 0], q(5, 6), qi(-1)),
        ];
        for (w, lf, mf) in pattern {
            let want = &f2.scale(&(&lf * &l)) + &f.scale(&(&mf * &m));
            ensure!(g41.coeff_of(&w) == want, "G4(1) mu-pattern at {w:?}");
        }
        let k = ok(hodge_constants(&c), "constants")?;
        ensure!(k.lambda == l && k.mu == m, "constants table disagrees with defining conditions");
    }
    let c = curve(&[1, 0, 0, 1]);
    let l = lambda_of(&c)?;
    ensure!(l.clone() * &l == qi(4), "|lambda| = {l}");
    ensure!(mu_of(&c, &l)? == qi(0), "mu != 0");
    Ok(())
}

fn gens(c: &Arc<CurveModel>, n: u32) -> Result<(LogExtension, HodgeGenerators), String> {
    let e = ok(LogExtension::compute(c.clone(), n), "extension")?;
    let h = ok(HodgeGenerators::compute(&e, n), "hodge")?;
    Ok((e, h))
}

fn criterion_3() -> Check {
    for (coeffs, b) in [(&[1, 0, 0, 1][..], (2, 3)), (&[1, -1, 0, 1][..], (1, 1))] {
        let c = based(coeffs, b.0, Some(b.1));
        let k = ok(hodge_constants(&c), "constants")?;
        let unit = |n| TensorElem::unit(1, n, c.one());
        let (_, h1) = gens(&c, 1)?;
        ensure!(h1.keys() == vec![(0, 1), (1, 2)], "level 1 index set");
        ensure!(h1.generator((0, 1)) == unit(1) && h1.generator((1, 2)) == word(&c, 1, &[1]), "level 1 generators");
        let (_, h2) = gens(&c, 2)?;
        ensure!(h2.generator((0, 1)) == unit(2), "level 2: 1");
        ensure!(h2.generator((1, 2)) == word(&c, 2, &[1]), "level 2: A1");
        ensure!(h2.generator((2, 4)) == word(&c, 2, &[1, 1]), "level 2: A1^2");
        let (_, h3) = gens(&c, 3)?;
        let a1 = ok(word(&c, 3, &[1]).add(&lie(&c, 3, "[[A0,A1],A1]").scale_q(&k.lambda)), "add")?;
        ensure!(h3.generator((1, 2)) == a1, "level 3: A1 + lambda [[A0,A1],A1]");
        ensure!(h3.generator((0, 1)) == unit(3), "level 3: 1");
        ensure!(h3.generator((2, 4)) == word(&c, 3, &[1, 1]) && h3.generator((3, 8)) == word(&c, 3, &[1, 1, 1]), "level 3: A1^2, A1^3");
        let (_, h4) = gens(&c, 4)?;
        let xb = &c.x() - &c.constant(qi(b.0));
        let t4 = lie(&c, 4, "[A1,[A1,[A1,A0]]]");
        let one4 = ok(unit(4).add(&t4.scale(&xb.scale(&(&k.nu / qi(3))))), "add")?;
        ensure!(h4.generator((0, 1)) == one4, "level 4: 1 + nu/3 (x - x(b)) [A1,[A1,[A1,A0]]]");
        let a1 = ok(
            word(&c, 4, &[1]).add(&lie(&c, 4, "[[A0,A1],A1]").scale_q(&k.lambda)).and_then(|t| t.sub(&t4.scale_q(&(&k.mu + &k.kappa / qi(3))))),
            "add",
        )?;
        ensure!(h4.generator((1, 2)) == a1, "level 4: A1 generator");
        let br = lie(&c, 4, "[A0,A1]");
        let sq = word(&c, 4, &[1, 1]);
        let comm = ok(br.concat_mul(&sq).and_then(|x| x.sub(&sq.concat_mul(&br).unwrap())), "bracket")?;
        ensure!(h4.generator((2, 4)) == ok(sq.add(&comm.scale_q(&k.lambda)), "add")?, "level 4: A1^2 generator");
        ensure!(h4.generator((3, 8)) == word(&c, 4, &[1, 1, 1]) && h4.generator((4, 16)) == word(&c, 4, &[1, 1, 1, 1]), "level 4: A1^3, A1^4");
        ensure!(h4.a((2, 4), (4, 8)).as_constant() == Some(k.lambda.clone()), "table entry lambda");
        ensure!(h4.a((2, 4), (4, 12)).as_constant() == Some(-k.lambda.clone()), "table entry -lambda");
        ensure!(h4.a((1, 2), (4, 12)).as_constant() == Some(-qi(3) * &k.mu - &k.kappa), "table entry -3mu-kappa");
        ensure!(h4.a((0, 1), (4, 8)) == xb.scale(&(-&k.nu / qi(3))), "table entry nu (x - x(b))");
        ensure!(k.kappa == qi(0) && k.mu == qi(0) && k.nu.clone() * &k.nu == qi(64), "kappa, mu, |nu| on the standard basis");
    }
    Ok(())
}

fn criterion_4() -> Check {
    for (xb, yb) in [(0, Some(1)), (-1, Some(0)), (2, None)] {
        let c = based(&[1, 0, 0, 0, 0, 1], xb, yb);
        let (e, h) = gens(&c, 2)?;
        let x_minus = &c.x() - &c.constant(qi(xb));
        let expected = ok(TensorElem::unit(2, 2, c.one()).add(&lie(&c, 2, "[A1,A3]").scale(&x_minus.scale(&q(-2, 3)))), "add")?;
        ensure!(h.generator((0, 1)) == expected, "generator 1 at x(b) = {xb}");
        for w in [&[2u8][..], &[3], &[2, 2], &[2, 3], &[3, 2], &[3, 3]] {
            ensure!(h.generator(key(w, 2)) == word(&c, 2, w), "generator {w:?} at x(b) = {xb}");
        }
        ensure!(ok(check_conditions_im(&h, &e), "conditions")?.pass(), "conditions I_m");
    }
    for coeffs in [&[1, 0, 0, 0, 0, 1][..], &[1, 2, 0, -3, 0, 1][..]] {
        let c = curve(coeffs);
        let g = c.genus();
        let (_, h) = gens(&c, 2)?;
        for k in g..2 * g {
            for i in 0..2 * g {
                for j in 0..2 * g {
                    let cijk = h.a(key(&[k as u8], g), key(&[i as u8, j as u8], g));
                    let cjik = h.a(key(&[k as u8], g), key(&[j as u8, i as u8], g));
                    ensure!(cijk.is_zero() || cijk.as_constant().is_some(), "c_{i}{j}{k} not constant");
                    ensure!(cijk == -&cjik, "c_{i}{j}{k} != -c_{j}{i}{k}");
                    ensure!(i >= g || j >= g || cijk.is_zero(), "c_{i}{j}{k} nonzero for i, j < g");
                }
            }
        }
    }
    Ok(())
}

fn expand(e: &LieExpr<ShPoly>, g: usize, n: u32) -> TensorElem<ShPoly> {
    e.lie_expand(g, n, &ShPoly::one()).unwrap()
}

fn criterion_5() -> Check {
    let cases: &[(&[i64], BasepointKind, &[u32])] = &[
        (&[1, 0, 0, 1], BasepointKind::Rational, &[2, 3, 4]),
        (&[1, -1, 0, 1], BasepointKind::Rational, &[2, 3, 4]),
        (&[1, 0, 0, 1], BasepointKind::Tangential, &[2, 3]),
        (&[1, -1, 0, 1], BasepointKind::Tangential, &[2, 3]),
        (&[1, 0, 0, 0, 0, 1], BasepointKind::Rational, &[2]),
        (&[1, 0, 0, 0, 0, 1], BasepointKind::Tangential, &[2]),
    ];
    let mut failures = vec![];
    for &(coeffs, kind, levels) in cases {
        let c = curve(coeffs);
        let g = c.genus();
        let top = *levels.iter().max().unwrap();
        let run = ok(period_map_run(top, c.clone(), kind), "period map")?;
        for &n in levels {
            let cf = ok(closed_form_with(n, kind, &run.result.registry, &run.extension, &run.hodge, Level4Display::Printed), "closed form")?
                .ok_or(format!("no closed form for n={n}"))?;
            let same_u = expand(&cf.u, g, n) == expand(&run.result.u, g, n);
            let same_h = expand(&cf.hodge_factor, g, n) == expand(&run.result.hodge_factor, g, n);
            if !(same_u && same_h) {
                failures.push(format!("{coeffs:?} {kind:?} u{n}"));
            }
        }
    }
    ensure!(failures.is_empty(), "display mismatch: {}", failures.join(", "));
    Ok(())
}

fn criterion_6() -> Check {
    // (a) grouplike paths and primitive coordinates, n <= 3, g <= 2
    let cases: &[(Arc<CurveModel>, BasepointKind)] = &[
        (curve(&[1, 0, 0, 1]), BasepointKind::Rational),
        (curve(&[1, 0, 0, 1]), BasepointKind::Tangential),
        (based(&[1, 0, 0, 0, 0, 1], 0, Some(1)), BasepointKind::Rational),
        (curve(&[1, 0, 0, 0, 0, 1]), BasepointKind::Tangential),
    ];
    for (c, kind) in cases {
        let run = ok(period_map_run(3, c.clone(), *kind), "period map")?;
        for n in 1..=3 {
            ensure!(run.pcr.truncate(n).is_grouplike(), "(a) p_{n} not grouplike, g={} {kind:?}", c.genus());
            let u = ok(period_map(n, c.clone(), *kind), "period map")?;
            ensure!(expand(&u.u, c.genus(), n).is_primitive(), "(a) u_{n} not primitive, g={} {kind:?}", c.genus());
        }
    }
    // (b) exp/log and the bialgebra axiom
    let mut runner = TestRunner::new(Config { cases: 200, failure_persistence: None, ..Config::default() });
    ok(
        runner.run(&(1usize..=2, 1u32..=4).prop_flat_map(|(g, n)| (elem(g, n, false), elem(g, n, true), elem(g, n, true))), |(a, x, y)| {
            prop_assert_eq!(a.exp().unwrap().log().unwrap(), a.clone());
            let lhs = x.concat_mul(&y).unwrap().coproduct().terms;
            prop_assert_eq!(lhs, square_mul(&x.coproduct(), &y.coproduct(), x.alphabet(), x.n()));
            Ok(())
        }),
        "(b)",
    )?;
    // (c) conditions I_m
    for (c, top) in [(based(&[1, 0, 0, 1], 2, Some(3)), 4), (based(&[1, -1, 0, 1], 1, Some(1)), 4), (based(&[1, 0, 0, 0, 0, 1], 0, Some(1)), 3)] {
        for n in 1..=top {
            let (e, h) = gens(&c, n)?;
            ensure!(ok(check_conditions_im(&h, &e), "conditions")?.pass(), "(c) I_m fails at level {n}");
            for gen in h.keys() {
                let mut bad = h.clone();
                bad.set_a(gen, (n, 1), &h.a(gen, (n, 1)) + &c.one());
                ensure!(!ok(check_conditions_im(&bad, &e), "conditions")?.pass(), "(c) perturbation of {gen:?} passes at level {n}");
            }
        }
    }
    // (d) log poles
    for (c, top) in [(curve(&[1, 0, 0, 1]), 4), (curve(&[1, -1, 0, 1]), 4), (curve(&[1, 0, 0, 0, 0, 1]), 3)] {
        let e = ok(LogExtension::compute(c.clone(), top), "extension")?;
        for n in 1..=top {
            let en = e.truncate(n);
            ensure!(ok(verify_log_poles(&en.cprime_matrix(), &c), "verify")?.pass, "(d) C'_{n} fails, g={}", c.genus());
            ensure!(!ok(verify_log_poles(&universal_conn_matrix(n, &c), &c), "verify")?.pass, "(d) raw C_{n} passes, g={}", c.genus());
        }
    }
    // (e) tangential values
    let mut runner = TestRunner::new(Config { cases: 100, failure_persistence: None, ..Config::default() });
    ok(
        runner.run(&(poly(), prop::collection::vec(log_form(), 1..4), prop::collection::vec(log_form(), 1..4), point()), |(gp, u, w, z)| {
            let zp = DiskPoint::new(z.clone()).unwrap();
            let dg: Vec<Rational> = gp.iter().enumerate().skip(1).map(|(i, c)| c * qi(i as i64)).collect();
            if !dg.is_empty() {
                let v = tangential_value(&[LaurentSeries::exact(0, dg)], &zp, None).unwrap();
                let g_at_z = gp.iter().rev().fold(qi(0), |acc, c| acc * &z + c);
                prop_assert_eq!(v, LogValue::constant(g_at_z - &gp[0]));
            }
            let val = |f: &[LaurentSeries]| tangential_value(f, &zp, None).unwrap();
            let lhs = val(&u).mul(&val(&w));
            let forms: Vec<LaurentSeries> = u.iter().chain(w.iter()).cloned().collect();
            let ui: Vec<u8> = (0..u.len() as u8).collect();
            let wi: Vec<u8> = (u.len() as u8..forms.len() as u8).collect();
            let mut rhs = LogValue::constant(qi(0));
            for (s, m) in shuffle_words(&ui, &wi) {
                let word: Vec<LaurentSeries> = s.iter().map(|&k| forms[k as usize].clone()).collect();
                rhs = rhs.add(&val(&word).scale(&qi(m as i64)));
            }
            prop_assert_eq!(lhs, rhs);
            Ok(())
        }),
        "(e)",
    )?;
    Ok(())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(a, b)| q(a, b))
}

fn elem(g: usize, n: u32, with_constant: bool) -> impl Strategy<Value = TensorElem<Rational>> {
    let a = 2 * g as u8;
    prop::collection::vec((prop::collection::vec(0..a, 0..=n as usize), rational()), 0..6).prop_map(move |terms| {
        let mut t = TensorElem::zero(g, n, one());
        for (x, c) in terms {
            if x.is_empty() && !with_constant {
                continue;
            }
            t = t.add(&TensorElem::word(g, n, &x, one()).scale_q(&c)).unwrap();
        }
        t
    })
}

fn square_mul(x: &TensorSquare<Rational>, y: &TensorSquare<Rational>, a: u32, n: u32) -> BTreeMap<(Key, Key), Rational> {
    let k = |w: &[u8]| (w.len() as u32, rank_of(w, a));
    let mut out: BTreeMap<(Key, Key), Rational> = BTreeMap::new();
    for (&(l1, r1), c1) in &x.terms {
        for (&(l2, r2), c2) in &y.terms {
            if l1.0 + r1.0 + l2.0 + r2.0 > n {
                continue;
            }
            let mut left = word_string(l1.0, l1.1, a);
            left.extend(word_string(l2.0, l2.1, a));
            let mut right = word_string(r1.0, r1.1, a);
            right.extend(word_string(r2.0, r2.1, a));
            *out.entry((k(&left), k(&right))).or_default() += c1 * c2;
        }
    }
    out.retain(|_, c| *c != qi(0));
    out
}

fn poly() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), 1..5)
}

fn log_form() -> impl Strategy<Value = LaurentSeries> {
    (any::<bool>(), poly()).prop_map(|(pole, c)| LaurentSeries::exact(if pole { -1 } else { 0 }, c))
}

fn point() -> impl Strategy<Value = Rational> {
    (prop_oneof![-7i64..=-1, 1i64..=7], 2i64..=9).prop_map(|(a, b)| q(a, b))
}

fn peak_rss_kib() -> Option<u64> {
    let s = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = s.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn criterion_7() -> Check {
    let c = curve(&[1, 0, 0, 0, 0, 1]);
    let e = ok(LogExtension::compute(c.clone(), 3), "extension")?;
    let dim = e.cprime_matrix().dim();
    ensure!(dim == 85, "dimension {dim}");
    ensure!(ok(e.verify(), "verify")?.pass, "C'_3 log poles");
    if let Some(kib) = peak_rss_kib() {
        ensure!(kib < 1 << 20, "peak memory {} MiB", kib >> 10);
    }
    Ok(())
}

fn main() {
    let criteria: [(u32, &str, fn() -> Check, u64); 7] = [
        (1, "gauge level 2 (EC)", criterion_1, 1),
        (2, "gauge levels 3 and 4 (EC)", criterion_2, 5),
        (3, "Hodge filtration levels 1 to 4 (EC)", criterion_3, 10),
        (4, "Hodge filtration level 2 (HEC)", criterion_4, 10),
        (5, "period map displays", criterion_5, 30),
        (6, "property suites", criterion_6, 120),
        (7, "scaling g=2 n=3", criterion_7, 60),
    ];
    let mut unexpected = 0;
    for (id, name, f, budget) in criteria {
        let t = Instant::now();
        let r = f();
        let el = t.elapsed();
        let r = r.and_then(|()| if el > Duration::from_secs(budget) { Err(format!("took {el:.2?}, budget {budget} s")) } else { Ok(()) });
        match r {
            Ok(()) => println!("PASS {id} {name} ({el:.2?})"),
            Err(e) => {
                let tag = if EXPECTED_FAIL.contains(&id) { " [expected]" } else { "" };
                println!("FAIL {id} {name} ({el:.2?}): {e}{tag}");
                if tag.is_empty() {
                    unexpected += 1;
                }
            }
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
