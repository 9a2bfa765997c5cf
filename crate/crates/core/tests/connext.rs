use std::sync::Arc;

use albanese::connext::{
    basis_keys, gauge_apply_word, gauge_of_connection, log_pole_constant, solve_h, universal_conn_matrix, verify_log_poles, ConnMat, Gauge,
    LogExtension,
};
use albanese::exactalg::rational::{q, qi};
use albanese::exactalg::{CurveModel, FuncElem, OneForm};
use albanese::wordalg::{rank_of, word_string, Key};
use albanese::Error;

fn curve(coeffs: &[i64]) -> Arc<CurveModel> {
    Arc::new(CurveModel::standard(coeffs).unwrap())
}

fn ec_curves() -> Vec<Arc<CurveModel>> {
    vec![curve(&[1, 0, 0, 1]), curve(&[1, -1, 0, 1])]
}

fn key(letters: &[u8], a: u32) -> Key {
    (letters.len() as u32, rank_of(letters, a))
}

/// `lambda` from its defining condition: `lambda dF - F^2 alpha_0 / 2` is logarithmic at infinity.
fn lambda_of(c: &CurveModel) -> albanese::exactalg::Rational {
    let f = c.big_f();
    let target = c.alpha(0).mul_fe(&f.pow(2)).scale(&q(1, 2));
    let l = log_pole_constant(&target, c).unwrap().unwrap();
    let check = &f.d().scale(&l) - &target;
    assert!(c.pole_order_form(&check).unwrap() <= 1);
    l
}

/// `mu` from its defining condition: `lambda F dF / 3 + mu dF - F^3 alpha_0 / 6` is logarithmic.
fn mu_of(c: &CurveModel, lambda: &albanese::exactalg::Rational) -> albanese::exactalg::Rational {
    let f = c.big_f();
    let target = &c.alpha(0).mul_fe(&f.pow(3)).scale(&q(1, 6)) - &f.d().mul_fe(f).scale(&(lambda * q(1, 3)));
    let m = log_pole_constant(&target, c).unwrap().unwrap();
    let check = &f.d().scale(&m) - &target;
    assert!(c.pole_order_form(&check).unwrap() <= 1);
    m
}

#[test]
fn universal_matrix_examples() {
    let c = curve(&[1, 0, 0, 1]);
    let m = universal_conn_matrix(1, &c);
    assert_eq!(m.dim(), 3);
    let z = c.zero_form();
    let want = vec![vec![z.clone(), z.clone(), -c.alpha(0)], vec![z.clone(), z.clone(), -c.alpha(1)], vec![z.clone(), z.clone(), z.clone()]];
    assert_eq!(m.entries, want);
    let m0 = universal_conn_matrix(0, &c);
    assert_eq!(m0.dim(), 1);
    assert!(m0.is_zero());
    let c2 = curve(&[1, 0, 0, 0, 0, 1]);
    let m = universal_conn_matrix(1, &c2);
    assert_eq!(m.dim(), 5);
    for i in 0..4 {
        assert_eq!(m.entries[i][4], -c2.alpha(i));
        for j in 0..4 {
            assert!(m.entries[i][j].is_zero());
        }
    }
    assert!(m.entries[4].iter().all(OneForm::is_zero));
}

#[test]
fn universal_matrix_block_recursion() {
    for c in [curve(&[1, 0, 0, 1]), curve(&[1, 0, 0, 0, 0, 1])] {
        for n in 0..3 {
            let small = universal_conn_matrix(n, &c);
            let big = universal_conn_matrix(n + 1, &c);
            let off = big.dim() - small.dim();
            for i in 0..small.dim() {
                for j in 0..small.dim() {
                    assert_eq!(big.entries[off + i][off + j], small.entries[i][j]);
                }
            }
            for i in 0..big.dim() {
                for j in 0..off {
                    assert!(big.entries[i][j].is_zero());
                }
            }
        }
    }
}

#[test]
fn solve_h_examples() {
    let c = curve(&[1, 0, 0, 1]);
    let f = c.big_f();
    let (h, w) = solve_h(c.alpha(1), &c).unwrap();
    assert_eq!(h, *f);
    assert_eq!(w, &f.d() - c.alpha(1));
    assert!(c.pole_order_form(&w).unwrap() <= 1);
    let (h, w) = solve_h(&f.d().mul_fe(f), &c).unwrap();
    assert_eq!(h, f.pow(2).scale(&q(1, 2)));
    assert!(w.is_zero());
    let (h, w) = solve_h(c.alpha(0), &c).unwrap();
    assert!(h.is_zero());
    assert_eq!(w, -c.alpha(0));
}

#[test]
fn level_one_gauge() {
    for c in ec_curves() {
        let e = LogExtension::compute(c.clone(), 1).unwrap();
        assert!(e.h_ri(1, 0).unwrap().is_zero());
        assert_eq!(e.h_ri(2, 0).unwrap(), *c.big_f());
        let cp = gauge_of_connection(&universal_conn_matrix(1, &c), &e.gauge(), &c).unwrap();
        assert_eq!(cp.entries[0][2], -c.alpha(0));
        assert_eq!(cp.entries[1][2], &c.big_f().d() - c.alpha(1));
    }
}

#[test]
fn level_two_gauge_and_connection() {
    for c in ec_curves() {
        let e = LogExtension::compute(c.clone(), 2).unwrap();
        let f = c.big_f().clone();
        let (z, zero_f) = (c.zero(), c.zero_form());
        let gm = e.gauge().matrix(&c);
        let h2: Vec<Vec<FuncElem>> = (0..4).map(|i| gm[i][4..7].to_vec()).collect();
        let want = vec![
            vec![z.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone()],
            vec![f.clone(), z.clone(), z.clone()],
            vec![z.clone(), f.clone(), f.pow(2).scale(&q(1, 2))],
        ];
        assert_eq!(h2, want);
        let a0 = c.alpha(0).clone();
        let a1p = &f.d() - c.alpha(1);
        let fa0 = a0.mul_fe(&f);
        let cp = gauge_of_connection(&universal_conn_matrix(2, &c), &e.gauge(), &c).unwrap();
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
            vec![-&a0, zero_f.clone(), zero_f.clone()],
            vec![zero_f.clone(), -&a0, -&fa0],
            vec![a1p.clone(), zero_f.clone(), fa0.clone()],
            vec![zero_f.clone(), a1p.clone(), zero_f.clone()],
        ];
        assert_eq!(d2, want);
    }
}

#[test]
fn level_three_gauge() {
    for c in ec_curves() {
        let e = LogExtension::compute(c.clone(), 3).unwrap();
        let f = c.big_f();
        let l = lambda_of(&c);
        assert_eq!(e.h_of(&[0, 1, 1]), f.scale(&l));
        assert_eq!(e.h_of(&[1, 0, 1]), f.scale(&(&l * qi(-2))));
        assert_eq!(e.h_of(&[1, 1, 0]), f.scale(&l));
        assert_eq!(e.h_of(&[1, 1, 1]), f.pow(3).scale(&q(1, 6)));
        for w in [[0u8, 0, 0], [0, 0, 1], [0, 1, 0], [1, 0, 0]] {
            assert!(e.h_of(&w).is_zero(), "{w:?}");
        }
    }
    let l = lambda_of(&curve(&[1, 0, 0, 1]));
    assert_eq!(l, qi(2));
}

#[test]
fn level_four_group_element() {
    for c in ec_curves() {
        let e = LogExtension::compute(c.clone(), 4).unwrap();
        let f = c.big_f();
        let l = lambda_of(&c);
        let m = mu_of(&c, &l);
        let g41 = gauge_apply_word(&e.gauge(), (0, 1), &c).unwrap();
        assert_eq!(g41.coeff_of(&[1, 1, 1, 1]), f.pow(4).scale(&q(1, 24)));
        let f2 = f.pow(2);
        let pattern = [
            ([0u8, 1, 1, 1], q(1, 6), qi(1)),
            ([1, 0, 1, 1], q(1, 2), qi(-3)),
            ([1, 1, 0, 1], q(-3, 2), qi(3)),
            ([1, 1, 1, 0], q(5, 6), qi(-1)),
        ];
        for (w, lf, mf) in pattern {
            let want = &f2.scale(&(&lf * &l)) + &f.scale(&(&mf * &m));
            assert_eq!(g41.coeff_of(&w), want, "{w:?}");
        }
        assert_eq!(g41.coeff_of(&[]), c.one());
        assert_eq!(g41.coeff_of(&[1]), *f);
    }
    let c = curve(&[1, 0, 0, 1]);
    let l = lambda_of(&c);
    assert_eq!(l.clone() * &l, qi(4));
    assert_eq!(mu_of(&c, &l), qi(0));
}

#[test]
fn gauge_of_empty_word_at_level_two() {
    let c = curve(&[1, 0, 0, 1]);
    let e = LogExtension::compute(c.clone(), 2).unwrap();
    let g = gauge_apply_word(&e.gauge(), (0, 1), &c).unwrap();
    let f = c.big_f();
    let words: Vec<_> = g.words();
    assert_eq!(words.len(), 3);
    assert_eq!(g.coeff_of(&[]), c.one());
    assert_eq!(g.coeff_of(&[1]), *f);
    assert_eq!(g.coeff_of(&[1, 1]), f.pow(2).scale(&q(1, 2)));
}

#[test]
fn gauge_fixes_top_words() {
    let c = curve(&[1, 0, 0, 1]);
    let e = LogExtension::compute(c.clone(), 3).unwrap();
    for r in 1..=8 {
        let t = gauge_apply_word(&e.gauge(), (3, r), &c).unwrap();
        assert_eq!(t.words(), vec![(word_string(3, r, 2), c.one())]);
    }
    assert!(matches!(gauge_apply_word(&e.gauge(), (4, 1), &c), Err(Error::OutOfRange(_))));
}

#[test]
fn identity_gauge_is_neutral() {
    let c = curve(&[1, 0, 0, 1]);
    let empty = Default::default();
    let id = Gauge { n: 2, g: 1, h: &empty };
    let m = universal_conn_matrix(2, &c);
    assert_eq!(gauge_of_connection(&m, &id, &c).unwrap(), m);
    let wrong = Gauge { n: 3, g: 1, h: &empty };
    assert_eq!(gauge_of_connection(&m, &wrong, &c).unwrap_err(), Error::DimensionMismatch);
}

#[test]
fn log_pole_verification() {
    for c in [curve(&[1, 0, 0, 1]), curve(&[1, -1, 0, 1]), curve(&[1, 0, 0, 0, 0, 1])] {
        let top = if c.genus() == 1 { 4 } else { 2 };
        let e = LogExtension::compute(c.clone(), top).unwrap();
        for n in 1..=top {
            let en = e.truncate(n);
            let raw = universal_conn_matrix(n, &c);
            let cp = gauge_of_connection(&raw, &en.gauge(), &c).unwrap();
            assert_eq!(cp, en.cprime_matrix());
            assert!(verify_log_poles(&cp, &c).unwrap().pass, "C' level {n}");
            assert!(en.verify().unwrap().pass);
            let report = verify_log_poles(&raw, &c).unwrap();
            assert!(!report.pass, "C level {n}");
            assert!(report.entries.iter().any(|(_, o)| *o >= 2));
        }
    }
    let c = curve(&[1, 0, 0, 1]);
    assert!(verify_log_poles(&ConnMat::zero(2, &c), &c).unwrap().pass);
}

#[test]
fn projection_and_shift_laws() {
    for c in ec_curves() {
        let e4 = LogExtension::compute(c.clone(), 4).unwrap();
        let e3 = LogExtension::compute(c.clone(), 3).unwrap();
        assert_eq!(e4.truncate(3).h_map(), e3.h_map());
        assert_eq!(e4.truncate(3).c_map(), e3.c_map());
        let (g4, g3) = (e4.gauge().matrix(&c), e3.gauge().matrix(&c));
        let (c4, c3) = (e4.cprime_matrix(), e3.cprime_matrix());
        let off = g4.len() - g3.len();
        for i in 0..g3.len() {
            for j in 0..g3.len() {
                assert_eq!(g4[off + i][off + j], g3[i][j]);
                assert_eq!(c4.entries[off + i][off + j], c3.entries[i][j]);
            }
        }
        for i in 0..3 {
            for r in 1..=2u64.pow(3 - i) {
                assert_eq!(e4.h_ri(r, i + 1).unwrap(), e3.h_ri(r, i).unwrap());
                assert_eq!(e4.c_ri(r, i + 1).unwrap(), e3.c_ri(r, i).unwrap());
            }
        }
    }
}

/// Every nonzero entry of `C'` sits at row `p w`, column `w` and equals `c_p`.
#[test]
fn scalar_block_structure() {
    for (c, n) in [(curve(&[1, 0, 0, 1]), 3), (curve(&[1, 0, 0, 0, 0, 1]), 2)] {
        let e = LogExtension::compute(c.clone(), n).unwrap();
        let a = e.alphabet();
        let cp = gauge_of_connection(&universal_conn_matrix(n, &c), &e.gauge(), &c).unwrap();
        for (i, ri) in cp.basis.iter().enumerate() {
            for (j, cj) in cp.basis.iter().enumerate() {
                let (rw, cw) = (word_string(ri.0, ri.1, a), word_string(cj.0, cj.1, a));
                let entry = &cp.entries[i][j];
                if rw.len() > cw.len() && rw.ends_with(&cw) {
                    let p = &rw[..rw.len() - cw.len()];
                    assert_eq!(*entry, e.c(key(p, a)));
                } else {
                    assert!(entry.is_zero(), "row {rw:?} col {cw:?}");
                }
            }
        }
    }
}

#[test]
fn holomorphic_letters_stay_regular() {
    for c in [curve(&[1, 0, 0, 1]), curve(&[1, -1, 0, 1]), curve(&[1, 0, 0, 0, 0, 1]), curve(&[1, 0, 0, 0, 0, 0, 0, 1])] {
        let e = LogExtension::compute(c.clone(), 1).unwrap();
        for i in 0..c.genus() as u8 {
            assert!(c.pole_order_form(&e.c_of(&[i])).unwrap() <= 0);
        }
    }
}

fn mat_mul(a: &[Vec<FuncElem>], b: &[Vec<FuncElem>], c: &CurveModel) -> Vec<Vec<FuncElem>> {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut acc = c.zero();
                    for k in 0..d {
                        if !a[i][k].is_zero() && !b[k][j].is_zero() {
                            acc = &acc + &(&a[i][k] * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Inverse of a unitriangular matrix with nonzero entries above the diagonal only.
fn unitriangular_inverse(g: &[Vec<FuncElem>], c: &CurveModel) -> Vec<Vec<FuncElem>> {
    let d = g.len();
    let mut x = vec![vec![c.zero(); d]; d];
    for j in 0..d {
        for i in (0..=j).rev() {
            let mut acc = if i == j { c.one() } else { c.zero() };
            for k in i + 1..=j {
                if !g[i][k].is_zero() && !x[k][j].is_zero() {
                    acc = &acc - &(&g[i][k] * &x[k][j]);
                }
            }
            x[i][j] = acc;
        }
    }
    x
}

#[test]
fn gauge_inverse_cocycle() {
    let c = curve(&[1, -1, 0, 1]);
    let e = LogExtension::compute(c.clone(), 4).unwrap();
    for n in 1..=4 {
        let g = e.truncate(n).gauge().matrix(&c);
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert!(i <= j || v.is_zero());
            }
        }
        let inv = unitriangular_inverse(&g, &c);
        let id: Vec<Vec<FuncElem>> = (0..g.len()).map(|i| (0..g.len()).map(|j| if i == j { c.one() } else { c.zero() }).collect()).collect();
        assert_eq!(mat_mul(&g, &inv, &c), id);
        assert_eq!(mat_mul(&inv, &g, &c), id);
    }
}

#[test]
fn json_round_trip_and_determinism() {
    let c = curve(&[1, -1, 0, 1]);
    let e = LogExtension::compute(c.clone(), 3).unwrap();
    let j = e.to_json();
    let back = LogExtension::from_json(&j, c.clone()).unwrap();
    assert_eq!(back.h_map(), e.h_map());
    assert_eq!(back.c_map(), e.c_map());
    let again = LogExtension::compute(c.clone(), 3).unwrap().to_json();
    assert_eq!(serde_json::to_string(&j).unwrap(), serde_json::to_string(&again).unwrap());
    assert_eq!(j.h.iter().find(|x| x.word == "A1A1").unwrap().i, 1);
}

#[test]
fn genus_two_level_three_dimension() {
    let c = curve(&[1, 0, 0, 0, 0, 1]);
    assert_eq!(basis_keys(3, 2).len(), 85);
    let e = LogExtension::compute(c.clone(), 3).unwrap();
    assert_eq!(e.cprime_matrix().dim(), 85);
    assert!(e.verify().unwrap().pass);
}
