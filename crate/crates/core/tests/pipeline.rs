//! Worked examples and error paths across the pipeline.

use c2span::cofinite::{cofinite_report, compute_constants, enumerate_voa_spanset, singular_like_rewrite};
use c2span::modes::{commutator_swap, iterate_expand, repeat_reduce};
use c2span::scalar::{frac, int};
use c2span::spanset::{enumerate_module_spanset, is_spanning_element, verify_module_span};
use c2span::zhu::{an_dim_estimate, on_span};
use c2span::*;

fn lee_yang(w: usize) -> (VoaModel, CofiniteData) {
    let voa = build_virasoro_voa(frac(-22, 5), w).unwrap();
    let data = compute_constants(&voa).unwrap();
    (voa, data)
}

fn word(voa: &VoaModel, idx: &[i64], base: Base) -> ModeWord {
    let ops: Vec<ModeOp> = idx.iter().map(|&i| ModeOp::new(voa.omega(), i)).collect();
    ModeWord::new(&ops, base)
}

#[test]
fn cofinite_report_names_constants() {
    let (voa, data) = lee_yang(8);
    let json = serde_json::to_value(cofinite_report(&voa, &data)).unwrap();
    assert_eq!(json["B"], 2);
    assert_eq!(json["N"], 3);
    assert_eq!(json["Q"], 4);
    assert_eq!(json["x"].as_array().unwrap().len(), 1);
}

#[test]
fn module_spanset_small_depths() {
    let (voa, data) = lee_yang(8);
    let adj = voa.adjoint();
    assert_eq!(enumerate_module_spanset(&voa, adj, &data, 0, 4), vec![word(&voa, &[-3], Base::Vacuum)]);
    let m = build_module(&voa, frac(-1, 5), 8, ModuleKind::SimpleQuotient);
    assert_eq!(enumerate_module_spanset(&voa, &m, &data, 2, 0), {
        // w, w_1 w, w_1^2 w, w_1^3 w all sit at depth 0
        let mut v: Vec<ModeWord> = (0..4).map(|k| word(&voa, &vec![1; k], Base::Generator)).collect();
        v.sort();
        v
    });
    for d in 0..=8 {
        for w in enumerate_module_spanset(&voa, &m, &data, 2, d) {
            assert!(is_spanning_element(&data, 2, &w));
        }
    }
}

#[test]
fn repeated_negative_index_normalizes() {
    let (voa, data) = lee_yang(12);
    let m = build_module(&voa, frac(-1, 5), 12, ModuleKind::SimpleQuotient);
    let e = Expression::word(word(&voa, &[-2, -2], Base::Generator));
    let out = normalize(&voa, &m, &data, 2, &e).unwrap();
    assert!(out.expression.terms().all(|(w, _)| is_spanning_element(&data, 2, w)));
    assert_eq!(evaluate(&out.expression, &voa, &m).unwrap(), evaluate(&e, &voa, &m).unwrap());
    assert!(out.trace.iter().any(|t| t.rule == "repeat"));
}

#[test]
fn fourth_power_of_omega_shortens() {
    let (voa, data) = lee_yang(12);
    let adj = voa.adjoint();
    let e = Expression::word(word(&voa, &[-1; 4], Base::Vacuum));
    let out = normalize(&voa, adj, &data, 0, &e).unwrap();
    assert!(!out.expression.is_zero());
    for (w, _) in out.expression.terms() {
        assert!(w.len() < 4);
        assert!(w.ops.windows(2).all(|p| p[0].index < p[1].index));
    }
    assert_eq!(evaluate(&out.expression, &voa, adj).unwrap(), evaluate(&e, &voa, adj).unwrap());

    let rhs = singular_like_rewrite(&voa, &data, &[voa.omega(); 4]).unwrap();
    assert_eq!(evaluate(&rhs, &voa, adj).unwrap(), evaluate(&e, &voa, adj).unwrap());
    let words = enumerate_voa_spanset(&voa, &data, 8);
    assert!(rhs.terms().all(|(w, _)| words.contains(w) && w.len() < 4));
}

#[test]
fn spanning_elements_are_fixed_points() {
    let (voa, data) = lee_yang(12);
    let m = build_module(&voa, frac(-1, 5), 10, ModuleKind::SimpleQuotient);
    for d in 0..=6 {
        for w in enumerate_module_spanset(&voa, &m, &data, 2, d) {
            if c2span::modes::filtration(&voa, &w.ops) > voa.w_max() {
                continue;
            }
            let e = Expression::word(w);
            assert_eq!(normalize(&voa, &m, &data, 2, &e).unwrap().expression, e);
        }
    }
}

#[test]
fn module_span_report() {
    let (voa, data) = lee_yang(12);
    let m = build_module(&voa, frac(-1, 5), 10, ModuleKind::SimpleQuotient);
    let r = verify_module_span(&voa, &m, &data, 2, 8).unwrap();
    assert_eq!(r.rows[0].rank, 1);
    assert!(r.rows.iter().all(|row| row.rank == row.dim));
    assert_eq!(r.cn_stabilized, vec![true, true, true]);
    assert_eq!(r.cn_totals, vec![3, 5, 8]);
}

#[test]
fn wrong_l_shows_a_deficit() {
    let (voa, data) = lee_yang(8);
    let m = build_module(&voa, frac(-1, 5), 8, ModuleKind::SimpleQuotient);
    assert_eq!(verify_module_span(&voa, &m, &data, 0, 4), Err(Error::SpanDeficit { depth: 1, rank: 0, dim: 1 }));
}

#[test]
fn normalize_rejects_bad_inputs() {
    let (voa, data) = lee_yang(6);
    let m = build_module(&voa, frac(-1, 5), 6, ModuleKind::SimpleQuotient);
    let vac = Expression::word(word(&voa, &[-1], Base::Vacuum));
    assert!(matches!(normalize(&voa, &m, &data, 2, &vac), Err(Error::BaseMismatch(_))));
    let heavy = Expression::word(word(&voa, &[-1, -1, -1, -1], Base::Generator));
    assert!(matches!(normalize(&voa, &m, &data, 2, &heavy), Err(Error::WindowTooSmall(_))));
    let deep = Expression::word(word(&voa, &[-9], Base::Generator));
    assert!(matches!(normalize(&voa, &m, &data, 2, &deep), Err(Error::WindowTooSmall(_))));
}

#[test]
fn virasoro_bracket_from_commutator() {
    let (voa, _) = lee_yang(8);
    let m = build_module(&voa, frac(-1, 5), 8, ModuleKind::SimpleQuotient);
    let c = voa.central_charge().clone();
    for a in -2..=3i64 {
        for b in -2..=3i64 {
            let w = word(&voa, &[a, b], Base::Generator);
            let lhs = evaluate(&Expression::word(w.clone()), &voa, &m).unwrap();
            let rhs = evaluate(&commutator_swap(&voa, &w, 0).unwrap(), &voa, &m).unwrap();
            assert_eq!(lhs, rhs);
            // [L(a-1), L(b-1)] w = (a - b) L(a+b-2) w + central term
            let g = m.generator();
            let direct = m.act_lie_mode(a - 1, &m.act_lie_mode(b - 1, &g).unwrap()).unwrap();
            let swapped = m.act_lie_mode(b - 1, &m.act_lie_mode(a - 1, &g).unwrap()).unwrap();
            let mut bracket = m.act_lie_mode(a + b - 2, &g).unwrap().scaled(&int(a - b));
            if a + b == 2 {
                let k = a - 1;
                bracket.add_scaled(&g, &(&c * frac(k * k * k - k, 12)));
            }
            assert_eq!(direct.sub(&swapped), bracket);
        }
    }
}

#[test]
fn iterate_and_repeat_on_basis_vectors() {
    let (voa, _) = lee_yang(8);
    let m = build_module(&voa, frac(-1, 5), 10, ModuleKind::SimpleQuotient);
    let om = voa.omega();
    let (l3, _) = voa.intern_word(&[3]).unwrap();
    for j in -2..=2 {
        for s in -2..=2 {
            for d in 0..=3 {
                for t in m.basis_vectors(d) {
                    let direct = m.vertex_mode(&voa.product(om, j, l3).unwrap(), s, &t).unwrap();
                    let expanded = iterate_expand(&voa, om, j, l3, s, d as i64).apply(&voa, &m, &t).unwrap();
                    assert_eq!(direct, expanded, "j {j} s {s} depth {d}");
                }
            }
        }
    }
    for n in 1..=3 {
        let w = ModeWord::new(&[ModeOp::new(om, -n), ModeOp::new(l3, -n), ModeOp::new(om, 0)], Base::Generator);
        let lhs = evaluate(&Expression::word(w.clone()), &voa, &m).unwrap();
        assert_eq!(evaluate(&repeat_reduce(&voa, &w, 0).unwrap(), &voa, &m).unwrap(), lhs);
    }
}

#[test]
fn zhu_vacuum_estimate() {
    let (voa, data) = lee_yang(10);
    let r = an_dim_estimate(&voa, voa.adjoint(), &data, 0, 0, &[4, 5, 6, 7, 8, 9, 10]).unwrap();
    assert!(r.stabilized);
    assert_eq!(r.value, Some(2));
    assert_eq!(r.representative_threshold, 3);
    // nothing fits below the cheapest product
    assert_eq!(on_span(&voa, voa.adjoint(), 2, 4).unwrap().rank(), 0);
}

#[test]
fn model_descriptor_round_trips() {
    let (voa, _) = lee_yang(6);
    let m = build_module(&voa, frac(-1, 5), 6, ModuleKind::SimpleQuotient);
    let d = m.descriptor();
    let s = serde_json::to_string(&d).unwrap();
    assert!(s.contains("\"lowest_weight\":\"-1/5\""));
    let back: c2span::virasoro::ModelDescriptor = serde_json::from_str(&s).unwrap();
    assert_eq!(back, d);
}
