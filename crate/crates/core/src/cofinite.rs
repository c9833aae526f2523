//! C_n subspaces, the representative set X and the constants B, N, Q.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{invert, solve_in_span, EchelonBasis, Vector};
use crate::modes::{apply_ops, evaluate, Base, Expression, ModeOp, ModeWord, Ops, VecId};
use crate::scalar::{fmt_scalar, Scalar};
use crate::virasoro::{ModVec, VoaModel};

/// Interned basis vectors of `V(d)`.
pub fn basis_ids(voa: &VoaModel, d: usize) -> Result<Vec<VecId>> {
    voa.adjoint()
        .basis_vectors(d)
        .iter()
        .map(|v| voa.intern(v).map(|x| x.expect("basis vectors are nonzero").0))
        .collect()
}

/// Independent producers `a_{-n} b` spanning `C_n(V) ∩ V(d)`, with their coordinate vectors.
pub struct CnPiece {
    pub producers: Vec<(VecId, VecId)>,
    pub vectors: Vec<Vector>,
    pub echelon: EchelonBasis,
}

/// `C_n(V) ∩ V(d)`: spanned by `a_{-n} b` with `a, b` basis vectors, `wt(a) >= 1`.
pub fn cn_space(voa: &VoaModel, n: usize, d: usize) -> Result<CnPiece> {
    if n < 2 {
        return Err(Error::PreconditionViolation(format!("C_n needs n >= 2, got {n}")));
    }
    if d > voa.w_max() {
        return Err(Error::OutOfWindow { depth: d as i64, w_max: voa.w_max() });
    }
    let adj = voa.adjoint();
    let mut echelon = EchelonBasis::new(adj.dim(d));
    let mut producers = Vec::new();
    let mut vectors = Vec::new();
    // wt(a_{-n} b) = wt(a) + wt(b) + n - 1
    for wa in 1..=d {
        let Some(wb) = (d + 1).checked_sub(wa + n) else { break };
        for a in basis_ids(voa, wa)? {
            for b in basis_ids(voa, wb)? {
                let v = voa.product(a, -(n as i64), b)?;
                let coords = adj.coordinates(&v, d);
                if echelon.insert(&coords) {
                    producers.push((a, b));
                    vectors.push(coords);
                }
            }
        }
    }
    Ok(CnPiece { producers, vectors, echelon })
}

/// `dim V(d) - dim C_n(V) ∩ V(d)` for `d = 0..=up_to`.
pub fn cn_codims(voa: &VoaModel, n: usize, up_to: usize) -> Result<Vec<usize>> {
    (0..=up_to).map(|d| Ok(voa.dim(d) - cn_space(voa, n, d)?.echelon.rank())).collect()
}

/// How to write a weight-`d` vector as X representatives plus `C_2` producers.
#[derive(Debug, Clone)]
struct Decomposition {
    reps: Vec<VecId>,
    producers: Vec<(VecId, VecId)>,
    inverse: Vec<Vector>,
}

/// A vector split as `sum_x alpha_x x + sum gamma (a_{-2} b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct C2Split {
    pub reps: Vec<(VecId, Scalar)>,
    pub producers: Vec<((VecId, VecId), Scalar)>,
}

#[derive(Debug, Clone)]
pub struct CofiniteData {
    pub x: Vec<VecId>,
    pub b: usize,
    pub n: usize,
    pub q: usize,
    pub window: usize,
    /// `dim V(d) / (C_2(V) ∩ V(d))` per weight.
    pub codims: Vec<usize>,
    decomp: Vec<Decomposition>,
}

impl CofiniteData {
    /// Position of `id` in X.
    pub fn x_pos(&self, id: VecId) -> Option<usize> {
        self.x.iter().position(|&x| x == id)
    }

    /// Splits a homogeneous weight-`d` VOA vector modulo `C_2(V)`.
    pub fn split(&self, voa: &VoaModel, v: &ModVec, d: usize) -> Result<C2Split> {
        let dec = self
            .decomp
            .get(d)
            .ok_or_else(|| Error::WindowTooSmall(format!("weight {d} exceeds the cofinite window {}", self.window)))?;
        let coords = voa.adjoint().coordinates(v, d);
        let y: Vector = dec
            .inverse
            .iter()
            .map(|row| row.iter().zip(&coords).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum())
            .collect();
        let nr = dec.reps.len();
        Ok(C2Split {
            reps: dec.reps.iter().zip(&y[..nr]).filter(|(_, c)| !c.is_zero()).map(|(&x, c)| (x, c.clone())).collect(),
            producers: dec.producers.iter().zip(&y[nr..]).filter(|(_, c)| !c.is_zero()).map(|(&p, c)| (p, c.clone())).collect(),
        })
    }
}

/// Chooses X as the echelon complement of `C_2(V)` in each weight, vacuum excluded.
pub fn choose_x(voa: &VoaModel) -> Result<CofiniteData> {
    let w_max = voa.w_max();
    let adj = voa.adjoint();
    let mut x = Vec::new();
    let mut codims = Vec::new();
    let mut decomp = Vec::new();
    for d in 0..=w_max {
        let dim = adj.dim(d);
        let (reps, producers, vectors) = if d == 0 {
            (Vec::new(), Vec::new(), Vec::new())
        } else {
            let piece = cn_space(voa, 2, d)?;
            let pivots = piece.echelon.pivots();
            let reps: Vec<usize> = (0..dim).filter(|j| !pivots.contains(j)).collect();
            (reps, piece.producers, piece.vectors)
        };
        codims.push(if d == 0 { 1 } else { reps.len() });
        let basis = basis_ids(voa, d)?;
        let rep_ids: Vec<VecId> = reps.iter().map(|&j| basis[j]).collect();
        let inverse = if d == 0 {
            Vec::new()
        } else {
            // columns: unit vectors at the complement, then producer vectors
            let mut cols: Vec<Vector> = reps
                .iter()
                .map(|&j| (0..dim).map(|i| if i == j { Scalar::from_integer(1.into()) } else { Scalar::zero() }).collect())
                .collect();
            cols.extend(vectors);
            let rows: Vec<Vector> = (0..dim).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
            if dim == 0 {
                Vec::new()
            } else {
                invert(&rows).ok_or_else(|| Error::Internal(format!("complement of C2 at weight {d} is not a basis")))?
            }
        };
        x.extend(&rep_ids);
        decomp.push(Decomposition { reps: rep_ids, producers, inverse });
    }
    let last_nonzero = (1..=w_max).rev().find(|&d| codims[d] > 0).unwrap_or(0);
    if w_max < last_nonzero + 2 {
        return Err(Error::NotCofiniteInWindow { last_nonzero, w_max });
    }
    let b = x.iter().map(|&id| voa.weight(id)).max().unwrap_or(0);
    let n = last_nonzero + 1;
    let q = (n as i64).max(2 * b as i64 - 1) as usize + 1;
    Ok(CofiniteData { x, b, n, q, window: w_max, codims, decomp })
}

/// Smallest `N >= 1` with `V(i) ⊆ C_2(V)` for all `N <= i <= w_max`.
pub fn find_n(voa: &VoaModel) -> Result<usize> {
    choose_x(voa).map(|d| d.n)
}

/// Assembles X, B, N, Q and checks the weight bounds they rest on.
pub fn compute_constants(voa: &VoaModel) -> Result<CofiniteData> {
    let data = choose_x(voa)?;
    let adj = voa.adjoint();
    let b = data.b as i64;
    // products of -1 modes have weight sum wt(x^i) <= B k
    for &x in &data.x {
        let mut ops = Ops::new();
        for k in 1..=data.q {
            ops.push(ModeOp::new(x, -1));
            let w = crate::modes::filtration(voa, &ops);
            if w > voa.w_max() {
                break;
            }
            if w as i64 > b * k as i64 {
                return Err(Error::Internal(format!("weight bound fails for k = {k}")));
            }
            let v = apply_ops(voa, adj, &ops, &adj.generator())?;
            if !v.is_zero() && v.homogeneous_depth() != Some(w) {
                return Err(Error::Internal("product of -1 modes is not homogeneous of the expected weight".into()));
            }
        }
    }
    // long strictly decreasing words outweigh long products of -1 modes
    for k in (2 * b).max(0) as usize..=(data.q + 4) {
        if (k as i64) < 2 * b || k == 0 {
            continue;
        }
        for l in k..=(k + 4) {
            if b * k as i64 >= (l * (l + 1) / 2) as i64 {
                return Err(Error::Internal(format!("weight comparison fails at k = {k}, l = {l}")));
            }
        }
    }
    if data.q < 2 || (data.q as i64) < 2 * b || data.q <= data.n {
        return Err(Error::Internal("Q violates its defining inequalities".into()));
    }
    Ok(data)
}

/// Words `x^1_{-n1} .. x^k_{-nk} 1` with `n1 > .. > nk > 0` and `x^i` in X, of weight `d`.
pub fn enumerate_voa_spanset(voa: &VoaModel, data: &CofiniteData, d: usize) -> Vec<ModeWord> {
    fn go(voa: &VoaModel, x: &[VecId], min_n: i64, left: i64, cur: &mut Vec<ModeOp>, out: &mut Vec<ModeWord>) {
        if left == 0 {
            let ops: Vec<ModeOp> = cur.iter().rev().copied().collect();
            out.push(ModeWord::new(&ops, Base::Vacuum));
        }
        for &id in x {
            let w = voa.weight(id) as i64;
            // weight of x_{-n} is w + n - 1
            let mut n = min_n;
            while w + n - 1 <= left {
                cur.push(ModeOp::new(id, -n));
                go(voa, x, n + 1, left - (w + n - 1), cur, out);
                cur.pop();
                n += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(voa, &data.x, 1, d as i64, &mut Vec::new(), &mut out);
    out.sort();
    for w in &out {
        let l = w.len();
        assert!(d >= l * (l + 1) / 2, "strictly decreasing word of length {l} below weight {d}");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightRow {
    pub weight: usize,
    pub dim: usize,
    pub elements: usize,
    pub rank: usize,
    /// `dim V(d) / C_n(V) ∩ V(d)` for `n = 2, 3, 4, 5`.
    pub cn_codims: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoaSpanReport {
    pub schema: String,
    pub rows: Vec<WeightRow>,
    /// Total `dim V / C_n(V)` inside the window for `n = 2, 3, 4, 5`.
    pub cn_totals: Vec<usize>,
}

/// Checks that the enumerated words span `V(d)` for every `d <= up_to`.
pub fn verify_voa_span(voa: &VoaModel, data: &CofiniteData, up_to: usize) -> Result<VoaSpanReport> {
    if up_to > voa.w_max() {
        return Err(Error::WindowTooSmall(format!("weight {up_to} exceeds the VOA window {}", voa.w_max())));
    }
    let adj = voa.adjoint();
    let mut rows = Vec::new();
    let codims: Vec<Vec<usize>> = (2..=5).map(|n| cn_codims(voa, n, up_to)).collect::<Result<_>>()?;
    for d in 0..=up_to {
        let words = enumerate_voa_spanset(voa, data, d);
        let mut ech = EchelonBasis::new(adj.dim(d));
        for w in &words {
            let v = evaluate(&Expression::word(w.clone()), voa, adj)?;
            ech.insert(&adj.coordinates(&v, d));
        }
        let (rank, dim) = (ech.rank(), adj.dim(d));
        if rank < dim {
            return Err(Error::SpanDeficit { depth: d, rank, dim });
        }
        rows.push(WeightRow { weight: d, dim, elements: words.len(), rank, cn_codims: codims.iter().map(|c| c[d]).collect() });
    }
    let cn_totals = codims.iter().map(|c| c.iter().sum()).collect();
    Ok(VoaSpanReport { schema: "c2span.voa-span/1".into(), rows, cn_totals })
}

/// Rewrites `x^1_{-1} .. x^k_{-1} 1` (`k >= Q`) as a combination of strictly
/// decreasing words of length `< k`.
pub fn singular_like_rewrite(voa: &VoaModel, data: &CofiniteData, xs: &[VecId]) -> Result<Expression> {
    let k = xs.len();
    if k < data.q {
        return Err(Error::PreconditionViolation(format!("need at least Q = {} vectors, got {k}", data.q)));
    }
    let adj = voa.adjoint();
    let ops: Ops = xs.iter().map(|&x| ModeOp::new(x, -1)).collect();
    let d = crate::modes::filtration(voa, &ops);
    if d > voa.w_max() {
        return Err(Error::WindowTooSmall(format!("product of weight {d} exceeds the VOA window {}", voa.w_max())));
    }
    let target = apply_ops(voa, adj, &ops, &adj.generator())?;
    let words = enumerate_voa_spanset(voa, data, d);
    let vectors: Vec<Vector> = words
        .iter()
        .map(|w| evaluate(&Expression::word(w.clone()), voa, adj).map(|v| adj.coordinates(&v, d)))
        .collect::<Result<_>>()?;
    let coeffs = solve_in_span(&vectors, &adj.coordinates(&target, d))
        .map_err(|_| Error::Internal(format!("strictly decreasing words do not span weight {d}")))?;
    let mut out = Expression::zero();
    for (w, c) in words.into_iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        if w.len() >= k {
            return Err(Error::Internal(format!("rewrite of a length-{k} product uses a word of length {}", w.len())));
        }
        out.push(voa, w, c);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XEntry {
    pub weight: usize,
    pub vector: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CofiniteReport {
    pub schema: String,
    pub central_charge: String,
    pub window: usize,
    pub dims: Vec<usize>,
    pub c2_codims: Vec<usize>,
    pub x: Vec<XEntry>,
    #[serde(rename = "B")]
    pub b: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "Q")]
    pub q: usize,
    /// N is only known relative to the window it was computed in.
    pub n_window_relative: bool,
}

pub fn cofinite_report(voa: &VoaModel, data: &CofiniteData) -> CofiniteReport {
    CofiniteReport {
        schema: "c2span.cofinite/1".into(),
        central_charge: fmt_scalar(voa.central_charge()),
        window: data.window,
        dims: voa.graded_dims(),
        c2_codims: data.codims.clone(),
        x: data.x.iter().map(|&id| XEntry { weight: voa.weight(id), vector: voa.vector(id).to_string() }).collect(),
        b: data.b,
        n: data.n,
        q: data.q,
        n_window_relative: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::frac;
    use crate::virasoro::build_virasoro_voa;

    #[test]
    fn lee_yang_constants() {
        let voa = build_virasoro_voa(frac(-22, 5), 8).unwrap();
        let data = compute_constants(&voa).unwrap();
        assert_eq!(data.x, vec![voa.omega()]);
        assert_eq!((data.b, data.n, data.q), (2, 3, 4));
        assert_eq!(cn_space(&voa, 2, 0).unwrap().echelon.rank(), 0);
        assert_eq!(cn_space(&voa, 2, 2).unwrap().echelon.rank(), 0);
        assert_eq!(cn_space(&voa, 3, 1).unwrap().echelon.rank(), 0);
    }

    #[test]
    fn voa_words_small_weights() {
        let voa = build_virasoro_voa(frac(-22, 5), 8).unwrap();
        let data = compute_constants(&voa).unwrap();
        let w4 = enumerate_voa_spanset(&voa, &data, 4);
        assert_eq!(w4, vec![ModeWord::new(&[ModeOp::new(voa.omega(), -3)], Base::Vacuum)]);
        assert_eq!(enumerate_voa_spanset(&voa, &data, 0), vec![ModeWord::base_only(Base::Vacuum)]);
        assert!(enumerate_voa_spanset(&voa, &data, 1).is_empty());
        assert_eq!(enumerate_voa_spanset(&voa, &data, 8).len(), 3);
    }

    #[test]
    fn generic_central_charge_is_not_cofinite() {
        let voa = build_virasoro_voa(frac(1, 3), 10).unwrap();
        assert!(matches!(choose_x(&voa), Err(Error::NotCofiniteInWindow { .. })));
    }

    #[test]
    fn short_rewrite_requires_q_vectors() {
        let voa = build_virasoro_voa(frac(-22, 5), 8).unwrap();
        let data = compute_constants(&voa).unwrap();
        let om = voa.omega();
        assert!(matches!(singular_like_rewrite(&voa, &data, &[om, om, om]), Err(Error::PreconditionViolation(_))));
        let e = singular_like_rewrite(&voa, &data, &[om; 4]).unwrap();
        assert!(e.terms().all(|(w, _)| w.len() < 4));
    }
}
