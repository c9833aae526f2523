//! Library values against independent reference computations, then against
//! the frozen values those computations produced.

mod common;

use c2span::cofinite::compute_constants;
use c2span::scalar::{frac, int};
use c2span::spanset::compute_l;
use c2span::{build_module, build_virasoro_voa, minimal_model_central_charge, ModVec, ModuleKind, Scalar, Word};
use common::{c2_codim, partitions, product_series, rank, NaiveVerma, Pbw, Vect};
use num_traits::Zero;

fn lee_yang() -> Scalar {
    frac(-22, 5)
}

const VACUUM_DIMS: [usize; 13] = [1, 0, 1, 1, 1, 1, 2, 2, 3, 3, 4, 4, 6];
const MODULE_DIMS: [usize; 22] = [1, 1, 1, 1, 2, 2, 3, 3, 4, 5, 6, 7, 9, 10, 12, 14, 17, 19, 23, 26, 31, 35];

fn to_word(p: &Pbw) -> Word {
    Word::new(&p.iter().map(|&x| x as u8).collect::<Vec<_>>())
}

fn to_modvec(v: &Vect) -> ModVec {
    let mut out = ModVec::zero();
    for (w, c) in v {
        out.add_term(to_word(w), c.clone());
    }
    out
}

#[test]
fn lee_yang_is_the_two_five_minimal_model() {
    assert_eq!(minimal_model_central_charge(2, 5), lee_yang());
}

#[test]
fn verma_dims_are_partition_counts() {
    let voa = build_virasoro_voa(lee_yang(), 10).unwrap();
    let m = build_module(&voa, frac(3, 7), 10, ModuleKind::Verma);
    for d in 0..=10 {
        assert_eq!(m.dim(d), partitions(d as i64, 1).len());
        assert_eq!(voa.adjoint().verma_dim(d), partitions(d as i64, 2).len());
    }
}

#[test]
fn vacuum_dims_match_gram_rank_and_character() {
    let naive = NaiveVerma::vacuum(lee_yang());
    let series = product_series(&[2, 3], 12);
    let voa = build_virasoro_voa(lee_yang(), 12).unwrap();
    for d in 0..=12 {
        let oracle = if d == 0 { 1 } else { rank(&naive.gram(d as i64)) };
        assert_eq!(oracle, series[d], "weight {d}");
        assert_eq!(voa.dim(d), oracle, "weight {d}");
    }
    assert_eq!(voa.graded_dims(), VACUUM_DIMS);
}

#[test]
fn module_dims_match_gram_rank_and_character() {
    let naive = NaiveVerma::new(lee_yang(), frac(-1, 5));
    let series = product_series(&[1, 4], 21);
    for d in 0..=10 {
        assert_eq!(rank(&naive.gram(d as i64)), series[d], "depth {d}");
    }
    let voa = build_virasoro_voa(lee_yang(), 4).unwrap();
    let m = build_module(&voa, frac(-1, 5), 21, ModuleKind::SimpleQuotient);
    assert_eq!(m.graded_dims(), series);
    assert_eq!(m.graded_dims(), MODULE_DIMS);
}

#[test]
fn zero_weight_simple_module_is_the_vacuum() {
    let voa = build_virasoro_voa(lee_yang(), 12).unwrap();
    let m = build_module(&voa, Scalar::zero(), 12, ModuleKind::SimpleQuotient);
    assert_eq!(m.graded_dims(), VACUUM_DIMS);
}

#[test]
fn gram_matrix_matches_reference() {
    let naive = NaiveVerma::vacuum(lee_yang());
    let voa = build_virasoro_voa(lee_yang(), 6).unwrap();
    for d in 0..=6usize {
        let g = voa.adjoint().gram_matrix(d);
        let words = voa.adjoint().verma_basis(d);
        for (i, u) in words.iter().enumerate() {
            for (j, v) in words.iter().enumerate() {
                let pu: Pbw = u.parts().iter().map(|&x| x as i64).collect();
                let pv: Pbw = v.parts().iter().map(|&x| x as i64).collect();
                assert_eq!(g.get(i, j), naive.form(&pu, &pv));
            }
        }
    }
    let g4 = voa.adjoint().gram_matrix(4).to_dense();
    assert_eq!(g4, vec![vec![frac(-198, 25), frac(-66, 5)], vec![frac(-66, 5), int(-22)]]);
    assert_eq!(rank(&g4), 1);
}

/// Modes of `omega`, `L(-3) 1 = L(-1) omega` and `L(-2)^2 1 = omega_{-1} omega`
/// written through Virasoro generators.
fn reference_mode(naive: &NaiveVerma, which: usize, n: i64, w: &Pbw) -> Vect {
    let depth: i64 = w.iter().sum();
    let basis = |w: &Pbw| {
        let mut v = Vect::new();
        v.insert(w.clone(), Scalar::from_integer(1.into()));
        v
    };
    match which {
        0 => naive.act(n - 1, w),
        1 => {
            let mut v = naive.act(n - 2, w);
            for x in v.values_mut() {
                *x *= int(-n);
            }
            v.retain(|_, x| !x.is_zero());
            v
        }
        _ => {
            // sum_{i>=0} L(-2-i) L(n+i-1) + sum_{i>=0} L(n-2-i) L(i-1)
            let mut out = Vect::new();
            let mut add = |v: Vect| {
                for (k, x) in v {
                    let e = out.entry(k.clone()).or_insert_with(Scalar::zero);
                    *e += x;
                    if e.is_zero() {
                        out.remove(&k);
                    }
                }
            };
            let mut i = 0;
            while n + i - 1 <= depth {
                add(naive.act_vec(-2 - i, &naive.act(n + i - 1, w)));
                i += 1;
            }
            let mut i = 0;
            while i - 1 <= depth {
                add(naive.act_vec(n - 2 - i, &naive.act_vec(i - 1, &basis(w))));
                i += 1;
            }
            out
        }
    }
}

#[test]
fn vertex_modes_match_generator_formulas() {
    let h = frac(-1, 5);
    let naive = NaiveVerma::new(lee_yang(), h.clone());
    let voa = build_virasoro_voa(lee_yang(), 8).unwrap();
    let m = build_module(&voa, h, 10, ModuleKind::Verma);
    // PBW words of the universal algebra; the Verma module is not a module of the quotient
    let labels = [ModVec::basis(Word::new(&[2])), ModVec::basis(Word::new(&[3])), ModVec::basis(Word::new(&[2, 2]))];
    for (which, u) in labels.iter().enumerate() {
        for n in -3..=3 {
            for d in 0..=4 {
                for w in partitions(d, 1) {
                    let got = m.vertex_mode(u, n, &ModVec::basis(to_word(&w))).unwrap();
                    assert_eq!(got, to_modvec(&reference_mode(&naive, which, n, &w)), "label {which}, n {n}, word {w:?}");
                }
            }
        }
    }
}

#[test]
fn c2_data_matches_reference() {
    let voa = build_virasoro_voa(lee_yang(), 12).unwrap();
    let data = compute_constants(&voa).unwrap();
    let oracle: Vec<usize> = (0..=12).map(|d| c2_codim(&lee_yang(), d)).collect();
    assert_eq!(data.codims, oracle);
    assert_eq!(oracle, [1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
    // N = last weight outside C2 plus one, B = 2, Q = max(N, 2B - 1) + 1
    assert_eq!((data.b, data.n, data.q), (2, 3, 4));
    assert_eq!(data.x, vec![voa.omega()]);
}

#[test]
fn l_constant_from_direct_action() {
    let voa = build_virasoro_voa(lee_yang(), 8).unwrap();
    let data = compute_constants(&voa).unwrap();
    let h = frac(-1, 5);
    let naive = NaiveVerma::new(lee_yang(), h.clone());
    // omega_1 w = L(0) w = h w, omega_2 w = L(1) w = 0
    assert!(!naive.act(0, &[]).is_empty());
    assert!(naive.act(1, &[]).is_empty());
    let m = build_module(&voa, h, 6, ModuleKind::SimpleQuotient);
    assert_eq!(compute_l(&voa, &m, &data).unwrap(), 2);
    assert_eq!(compute_l(&voa, voa.adjoint(), &data).unwrap(), 0);
}
