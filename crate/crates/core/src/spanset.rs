//! Module spanning sets: the constant L, enumeration of spanning elements,
//! span verification and the normalization engine that rewrites arbitrary
//! mode words into spanning elements.
//!
//! Normalization runs an induction on the pair `(t, K)`, ordered
//! lexicographically: `t` is the filtration level of a word and `K` bounds the
//! mode indices that already satisfy the spanning-element conditions. A word
//! is in normal form at level `K` when it is a sorted word over X with all
//! indices `< L` and, for every index `j >= -K`, index `j` occurs at most
//! `Q - 1` times if `j >= 0` and at most once if `j < 0`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cofinite::{basis_ids, singular_like_rewrite, CofiniteData};
use crate::error::{Error, Result};
use crate::linalg::EchelonBasis;
use crate::modes::{
    commutator_swap, evaluate, filtration, iterate_in_word, operator_weight, repeat_reduce, residue_repeat_identity,
    suffix_depth, Base, Expression, ModeOp, ModeWord, Ops, VecId,
};
use crate::scalar::{fmt_scalar, Scalar};
use crate::virasoro::{ModuleModel, VoaModel};

/// `L = max_x l_x + 1`, where `l_x` is the largest `l >= 0` with `x_l w != 0`.
/// Zero when no nonnegative mode of X acts nonzero on the generator.
pub fn compute_l(voa: &VoaModel, module: &ModuleModel, data: &CofiniteData) -> Result<usize> {
    let w = module.generator();
    let mut l = 0;
    for &x in &data.x {
        let xv = voa.vector(x);
        // x_j w has depth wt(x) - j - 1
        for j in (0..voa.weight(x) as i64).rev() {
            if !module.vertex_mode(&xv, j, &w)?.is_zero() {
                l = l.max(j as usize + 1);
                break;
            }
        }
    }
    Ok(l)
}

fn base_of(module: &ModuleModel) -> Base {
    if module.is_vacuum() {
        Base::Vacuum
    } else {
        Base::Generator
    }
}

/// Sort key of an operator over X: index first, then position in X.
fn key(data: &CofiniteData, op: &ModeOp) -> (i64, usize) {
    (op.index, data.x_pos(op.vec).unwrap_or(usize::MAX))
}

/// Checks the spanning-element conditions on a word.
pub fn is_spanning_element(data: &CofiniteData, l: usize, word: &ModeWord) -> bool {
    let ops = &word.ops;
    if ops.iter().any(|o| data.x_pos(o.vec).is_none() || o.index >= l as i64) {
        return false;
    }
    for pair in ops.windows(2) {
        if key(data, &pair[0]) > key(data, &pair[1]) || (pair[0].index < 0 && pair[0].index == pair[1].index) {
            return false;
        }
    }
    let mut run = 0;
    for (i, o) in ops.iter().enumerate() {
        run = if i > 0 && ops[i - 1].index == o.index { run + 1 } else { 1 };
        if o.index >= 0 && run >= data.q {
            return false;
        }
    }
    true
}

/// Number of admissible nonnegative-index parts: for each of the `L` index
/// values, a multiset over X of size at most `Q - 1`.
pub fn nonnegative_configurations(data: &CofiniteData, l: usize) -> u128 {
    let x = data.x.len() as u128;
    // multisets of size <= Q-1 over x labels: C(x + Q - 1, Q - 1)
    let mut per_index: u128 = 1;
    for i in 1..data.q as u128 {
        per_index = per_index * (x + i) / i;
    }
    per_index.pow(l as u32)
}

/// All spanning elements of depth `d` that do not vanish by weight alone.
pub fn enumerate_module_spanset(
    voa: &VoaModel,
    module: &ModuleModel,
    data: &CofiniteData,
    l: usize,
    d: usize,
) -> Vec<ModeWord> {
    let base = base_of(module);
    let x = &data.x;
    // nonnegative parts, each index value carrying a sorted multiset over X
    let mut nonneg: Vec<Vec<ModeOp>> = vec![Vec::new()];
    for j in 0..l as i64 {
        let mut next = Vec::new();
        for part in &nonneg {
            let mut stack = vec![(part.clone(), 0usize, 0usize)];
            while let Some((ops, from, count)) = stack.pop() {
                next.push(ops.clone());
                if count + 1 >= data.q {
                    continue;
                }
                for (pos, &id) in x.iter().enumerate().skip(from) {
                    let mut o = ops.clone();
                    o.push(ModeOp::new(id, j));
                    stack.push((o, pos, count + 1));
                }
            }
        }
        nonneg = next;
    }
    fn negatives(voa: &VoaModel, x: &[VecId], n: i64, left: i64, cur: &mut Vec<ModeOp>, out: &mut Vec<Vec<ModeOp>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if n > left {
            return;
        }
        negatives(voa, x, n + 1, left, cur, out);
        for &id in x {
            let w = voa.weight(id) as i64 + n - 1;
            if w <= left {
                cur.push(ModeOp::new(id, -n));
                negatives(voa, x, n + 1, left - w, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    for part in &nonneg {
        let left = d as i64 - operator_weight(voa, part);
        if left < 0 {
            continue;
        }
        let mut negs = Vec::new();
        negatives(voa, x, 1, left, &mut Vec::new(), &mut negs);
        for neg in negs {
            let mut ops: Ops = neg.iter().rev().copied().collect();
            ops.extend(part.iter().copied());
            let w = ModeWord { ops, base };
            let mut e = Expression::zero();
            e.push(voa, w.clone(), Scalar::one());
            if !e.is_zero() {
                debug_assert!(is_spanning_element(data, l, &w));
                out.push(w);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthRow {
    pub depth: usize,
    pub dim: usize,
    pub elements: usize,
    pub rank: usize,
    /// `dim M(d) / C_n(M) ∩ M(d)` for `n = 2, 3, 4`.
    pub cn_codims: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleSpanReport {
    pub schema: String,
    pub central_charge: String,
    pub lowest_weight: String,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "Q")]
    pub q: usize,
    pub rows: Vec<DepthRow>,
    /// Total `dim M / C_n(M)` inside the window for `n = 2, 3, 4`.
    pub cn_totals: Vec<usize>,
    /// Whether the codimension of `C_n(M)` vanishes on the last two depths.
    pub cn_stabilized: Vec<bool>,
    /// Bound on the nonnegative-index parts; every depth has finitely many elements.
    pub nonnegative_configurations: String,
}

/// `dim M(d) / C_n(M) ∩ M(d)` where `C_n(M)` is spanned by `v_{-n} m`.
pub fn module_cn_codim(voa: &VoaModel, module: &ModuleModel, n: usize, d: usize) -> Result<usize> {
    let mut ech = EchelonBasis::new(module.dim(d));
    // depth of v_{-n} m is wt(v) + n - 1 + depth(m)
    for wv in 1..=d {
        let Some(dm) = (d + 1).checked_sub(wv + n) else { break };
        if module.dim(dm) == 0 {
            continue;
        }
        for v in basis_ids(voa, wv)? {
            let vv = voa.vector(v);
            for m in module.basis_vectors(dm) {
                let r = module.vertex_mode(&vv, -(n as i64), &m)?;
                ech.insert(&module.coordinates(&r, d));
                if ech.rank() == ech.dim() {
                    return Ok(0);
                }
            }
        }
    }
    Ok(module.dim(d) - ech.rank())
}

/// Checks that the spanning elements span `M(d)` for every `d <= up_to`.
pub fn verify_module_span(
    voa: &VoaModel,
    module: &ModuleModel,
    data: &CofiniteData,
    l: usize,
    up_to: usize,
) -> Result<ModuleSpanReport> {
    if up_to > module.w_max() {
        return Err(Error::WindowTooSmall(format!("depth {up_to} exceeds the module window {}", module.w_max())));
    }
    let base = base_of(module);
    let mut rows = Vec::new();
    for d in 0..=up_to {
        let words = enumerate_module_spanset(voa, module, data, l, d);
        let dim = module.dim(d);
        let mut ech = EchelonBasis::new(dim);
        for w in &words {
            debug_assert_eq!(w.base, base);
            let v = evaluate(&Expression::word(w.clone()), voa, module)?;
            ech.insert(&module.coordinates(&v, d));
            if ech.rank() == dim {
                break;
            }
        }
        if ech.rank() < dim {
            return Err(Error::SpanDeficit { depth: d, rank: ech.rank(), dim });
        }
        let cn_codims = (2..=4).map(|n| module_cn_codim(voa, module, n, d)).collect::<Result<Vec<_>>>()?;
        rows.push(DepthRow { depth: d, dim, elements: words.len(), rank: ech.rank(), cn_codims });
    }
    let cn_totals: Vec<usize> = (0..3).map(|i| rows.iter().map(|r| r.cn_codims[i]).sum()).collect();
    let cn_stabilized = (0..3).map(|i| rows.len() >= 2 && rows[rows.len() - 2..].iter().all(|r| r.cn_codims[i] == 0)).collect();
    Ok(ModuleSpanReport {
        schema: "c2span.module-span/1".into(),
        central_charge: fmt_scalar(voa.central_charge()),
        lowest_weight: fmt_scalar(module.lowest_weight()),
        l,
        q: data.q,
        rows,
        cn_totals,
        cn_stabilized,
        nonnegative_configurations: nonnegative_configurations(data, l).to_string(),
    })
}

/// One applied rule in a normalization run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceLine {
    pub rule: String,
    pub t: usize,
    #[serde(rename = "K")]
    pub k: i64,
    pub terms_in: usize,
    pub terms_out: usize,
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (t={}, K={}) {} -> {}", self.rule, self.t, self.k, self.terms_in, self.terms_out)
    }
}

/// Result of [`normalize`]: the rewritten expression and the rule log.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub expression: Expression,
    pub trace: Vec<TraceLine>,
    /// Number of recursive descents, each checked to lower `(t, K)`.
    pub descents: usize,
}

/// Rewrites `e` into a combination of spanning elements.
pub fn normalize(
    voa: &VoaModel,
    module: &ModuleModel,
    data: &CofiniteData,
    l: usize,
    e: &Expression,
) -> Result<Normalized> {
    let mut n = Normalizer::new(voa, module, data, l);
    let expression = n.normalize(e)?;
    Ok(Normalized { expression, trace: n.trace, descents: n.descents })
}

/// Normalization state. Results of `NF(word, K)` are memoized, so one
/// normalizer can be reused across inputs over the same models.
pub struct Normalizer<'a> {
    voa: &'a VoaModel,
    module: &'a ModuleModel,
    data: &'a CofiniteData,
    l: i64,
    memo: HashMap<(ModeWord, i64), Arc<Expression>>,
    active: HashSet<(ModeWord, i64)>,
    rewrites: HashMap<Vec<VecId>, Expression>,
    trace: Vec<TraceLine>,
    descents: usize,
}

impl<'a> Normalizer<'a> {
    pub fn new(voa: &'a VoaModel, module: &'a ModuleModel, data: &'a CofiniteData, l: usize) -> Self {
        Normalizer {
            voa,
            module,
            data,
            l: l as i64,
            memo: HashMap::new(),
            active: HashSet::new(),
            rewrites: HashMap::new(),
            trace: Vec::new(),
            descents: 0,
        }
    }

    pub fn trace(&self) -> &[TraceLine] {
        &self.trace
    }

    pub fn take_trace(&mut self) -> Vec<TraceLine> {
        std::mem::take(&mut self.trace)
    }

    pub fn normalize(&mut self, e: &Expression) -> Result<Expression> {
        let voa = self.voa;
        let mut out = Expression::zero();
        for (w, c) in e.terms() {
            if w.base == Base::Vacuum && !self.module.is_vacuum() {
                return Err(Error::BaseMismatch("|0>".into()));
            }
            let t = filtration(voa, &w.ops);
            if t > voa.w_max() || t > self.data.window {
                return Err(Error::WindowTooSmall(format!(
                    "filtration level {t} exceeds the VOA window {}",
                    voa.w_max().min(self.data.window)
                )));
            }
            let d = operator_weight(voa, &w.ops);
            if d > self.module.w_max() as i64 {
                return Err(Error::WindowTooSmall(format!(
                    "operator weight {d} exceeds the module window {}",
                    self.module.w_max()
                )));
            }
            let mut start = Expression::zero();
            start.push(voa, w.clone(), Scalar::one());
            let Some((w, c0)) = start.terms().next().map(|(w, c0)| (w.clone(), c0.clone())) else {
                continue;
            };
            let t = filtration(voa, &w.ops);
            // past this bound no index is left unconstrained
            let bound = d + (t as i64 - 1).max(0) * self.l;
            let nf = self.nf(&w, bound + 1)?;
            for z in nf.terms().map(|(z, _)| z) {
                if !is_spanning_element(self.data, self.l as usize, z) {
                    return Err(Error::Internal(format!("output word {z:?} is not a spanning element")));
                }
                if z.ops.first().is_some_and(|o| -o.index > bound) {
                    return Err(Error::Internal(format!("leading index of {z:?} exceeds the bound {bound}")));
                }
            }
            out.add_scaled(&nf, &(c * &c0));
        }
        Ok(out)
    }

    fn log(&mut self, rule: &str, t: usize, k: i64, terms_in: usize, terms_out: usize) {
        self.trace.push(TraceLine { rule: rule.to_string(), t, k, terms_in, terms_out });
    }

    /// Records a recursive call from `(t, k)` to `(t2, k2)`; the pair must drop.
    fn descend(&mut self, from: (usize, i64), to: (usize, i64)) -> Result<()> {
        if to >= from {
            return Err(Error::Internal(format!("measure did not decrease: {from:?} -> {to:?}")));
        }
        self.descents += 1;
        Ok(())
    }

    fn t_of(&self, w: &ModeWord) -> usize {
        filtration(self.voa, &w.ops)
    }

    /// Normalizes each word of `e` at level `k`; every word must have filtration below `t`.
    fn nf_sum(&mut self, e: &Expression, t: usize, k: i64) -> Result<Expression> {
        let mut out = Expression::zero();
        for (w, c) in e.terms() {
            self.descend((t, k), (self.t_of(w), k))?;
            out.add_scaled(&*self.nf(w, k)?, c);
        }
        Ok(out)
    }

    /// Normal form of a single word at level `k`.
    fn nf(&mut self, y: &ModeWord, k: i64) -> Result<Arc<Expression>> {
        let memo_key = (y.clone(), k);
        if let Some(e) = self.memo.get(&memo_key) {
            return Ok(e.clone());
        }
        if !self.active.insert(memo_key.clone()) {
            return Err(Error::Internal(format!("normalization cycle at {y:?}, K = {k}")));
        }
        let t = self.t_of(y);
        let out = if y.ops.is_empty() {
            Expression::word(y.clone())
        } else if k <= -self.l {
            // sort, replace by X representatives and annihilate
            let (main, corr) = self.prepare(y)?;
            let mut out = Expression::zero();
            for (z, c) in main.terms() {
                if z.ops.last().is_some_and(|o| o.index >= self.l) {
                    continue;
                }
                out.add_raw(z.clone(), c.clone());
            }
            self.log("reorder", t, k, 1, main.len() + corr.len());
            out.add_scaled(&self.nf_sum(&corr, t, k)?, &Scalar::one());
            out
        } else {
            self.descend((t, k), (t, k - 1))?;
            let below = self.nf(y, k - 1)?;
            let mut out = Expression::zero();
            for (z, c) in below.terms() {
                out.add_scaled(&self.fix(z, t, k)?, c);
            }
            out
        };
        self.active.remove(&memo_key);
        let out = Arc::new(out);
        self.memo.insert(memo_key, out.clone());
        Ok(out)
    }

    /// Brings a word satisfying the level `k - 1` conditions to level `k`.
    fn fix(&mut self, z: &ModeWord, t: usize, k: i64) -> Result<Expression> {
        let theta = -k;
        let limit = if theta >= 0 { self.data.q - 1 } else { 1 };
        let mut out = Expression::zero();
        let mut work = vec![(z.clone(), Scalar::one())];
        while let Some((z, c)) = work.pop() {
            let f = z.ops.iter().take_while(|o| o.index < theta).count();
            let p = z.ops[f..].iter().take_while(|o| o.index == theta).count();
            if p <= limit {
                out.add_raw(z, c);
                continue;
            }
            if f > 0 {
                out.add_scaled(&self.front_merge(&z, f, t, k)?, &c);
                continue;
            }
            let rewritten = if theta >= 0 {
                self.residue(&z)?
            } else {
                let e = repeat_reduce(self.voa, &z, 0)?;
                self.log("repeat", t, k, 1, e.len());
                e
            };
            for (u, cu) in rewritten.terms() {
                let cu = &c * cu;
                if self.t_of(u) < t {
                    self.descend((t, k), (self.t_of(u), k))?;
                    out.add_scaled(&*self.nf(u, k)?, &cu);
                    continue;
                }
                let (main, corr) = self.prepare(u)?;
                out.add_scaled(&self.nf_sum(&corr, t, k)?, &cu);
                for (z2, c2) in main.terms() {
                    let f2 = z2.ops.iter().take_while(|o| o.index < theta).count();
                    if f2 > 0 {
                        out.add_scaled(&self.front_merge(z2, f2, t, k)?, &(&cu * c2));
                    } else if theta == -1 && z2.len() < z.len() {
                        // a -1 mode of an X representative: same level, one operator fewer
                        self.log("k1-loop", t, k, 1, 1);
                        work.push((z2.clone(), &cu * c2));
                    } else {
                        return Err(Error::Internal(format!("rewrite of {z:?} left {z2:?} without progress")));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `front * NF(rest, k)` re-sorted, for a word whose first `f` operators lie below `-k`.
    fn front_merge(&mut self, z: &ModeWord, f: usize, t: usize, k: i64) -> Result<Expression> {
        let rest = ModeWord::new(&z.ops[f..], z.base);
        self.descend((t, k), (self.t_of(&rest), k))?;
        let inner = self.nf(&rest, k)?;
        let mut out = Expression::zero();
        let mut corr = Expression::zero();
        for (r, c) in inner.terms() {
            let mut ops: Ops = z.ops[..f].iter().copied().collect();
            ops.extend(r.ops.iter().copied());
            let (main, extra) = self.sort_word(ModeWord { ops, base: z.base })?;
            if let Some(m) = main {
                out.add_raw(m, c.clone());
            }
            corr.add_scaled(&extra, c);
        }
        self.log("front", t, k, inner.len(), out.len() + corr.len());
        out.add_scaled(&self.nf_sum(&corr, t, k)?, &Scalar::one());
        Ok(out)
    }

    /// Rewrites the leading `Q` operators, all with index `-k >= 0`.
    fn residue(&mut self, z: &ModeWord) -> Result<Expression> {
        let q = self.data.q;
        let m = z.ops[0].index;
        // the word reads x^Q_m .. x^1_m
        let xs: Vec<VecId> = z.ops[..q].iter().rev().map(|o| o.vec).collect();
        let rhs = match self.rewrites.get(&xs) {
            Some(r) => r.clone(),
            None => {
                let r = singular_like_rewrite(self.voa, self.data, &xs)?;
                self.rewrites.insert(xs.clone(), r.clone());
                r
            }
        };
        let depth = suffix_depth(self.voa, &z.ops, q, 0);
        let sum = residue_repeat_identity(self.voa, &xs, m, &rhs, depth.max(0))?;
        let mut out = Expression::zero();
        for (ops, c) in sum.terms() {
            out.push(self.voa, z.splice(0..q, ops), c.clone());
        }
        self.log("residue", self.t_of(z), -m, 1, out.len());
        Ok(out)
    }

    /// Replaces every operator by X representatives and sorts. Returns sorted
    /// words of the same filtration level and the lower-level corrections.
    fn prepare(&mut self, y: &ModeWord) -> Result<(Expression, Expression)> {
        let voa = self.voa;
        let mut words = Expression::zero();
        words.push(voa, y.clone(), Scalar::one());
        let mut corr = Expression::zero();
        let len = words.terms().next().map_or(0, |(w, _)| w.len());
        for p in 0..len {
            let mut next = Expression::zero();
            for (w, c) in words.terms() {
                let op = w.ops[p];
                if self.data.x_pos(op.vec).is_some() {
                    next.add_raw(w.clone(), c.clone());
                    continue;
                }
                let wt = voa.weight(op.vec);
                let split = self.data.split(voa, &voa.vector(op.vec), wt)?;
                for (x, a) in &split.reps {
                    next.push(voa, w.splice(p..p + 1, &[ModeOp::new(*x, op.index)]), c * a);
                }
                for ((a, b), g) in &split.producers {
                    corr.add_scaled(&iterate_in_word(voa, w, p, *a, -2, *b, g)?, c);
                }
            }
            words = next;
        }
        let mut main = Expression::zero();
        for (w, c) in words.terms() {
            let (m, extra) = self.sort_word(w.clone())?;
            if let Some(m) = m {
                main.add_raw(m, c.clone());
            }
            corr.add_scaled(&extra, c);
        }
        Ok((main, corr))
    }

    /// Sorts a word over X by adjacent transpositions. The transposed word is
    /// `None` if it vanishes by weight; commutator terms are returned separately.
    fn sort_word(&self, mut w: ModeWord) -> Result<(Option<ModeWord>, Expression)> {
        let mut corr = Expression::zero();
        loop {
            let Some(p) = (0..w.len().saturating_sub(1)).find(|&p| key(self.data, &w.ops[p]) > key(self.data, &w.ops[p + 1]))
            else {
                return Ok((Some(w), corr));
            };
            let e = commutator_swap(self.voa, &w, p)?;
            let swapped = w.splice(p..p + 2, &[w.ops[p + 1], w.ops[p]]);
            let keep = !e.coeff(&swapped).is_zero();
            for (u, c) in e.terms() {
                if *u != swapped {
                    corr.add_raw(u.clone(), c.clone());
                }
            }
            if !keep {
                return Ok((None, corr));
            }
            w = swapped;
        }
    }
}

/// Random words over `vectors` with filtration `<= max_t` and depth `<= max_depth`
/// whose every intermediate depth stays inside the module window.
pub fn random_words(
    voa: &VoaModel,
    module: &ModuleModel,
    vectors: &[VecId],
    count: usize,
    max_t: usize,
    max_depth: usize,
    seed: u64,
) -> Vec<ModeWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = base_of(module);
    let mut out = Vec::with_capacity(count);
    while out.len() < count && !vectors.is_empty() {
        let len = rng.gen_range(1..=4);
        let mut ops = Ops::new();
        for _ in 0..len {
            let v = vectors[rng.gen_range(0..vectors.len())];
            ops.push(ModeOp::new(v, rng.gen_range(-4..=2)));
        }
        if filtration(voa, &ops) > max_t {
            continue;
        }
        let depths: Vec<i64> = (0..ops.len()).map(|i| suffix_depth(voa, &ops, i, 0)).collect();
        if depths[0] < 0 || depths[0] > max_depth as i64 || depths.iter().any(|&d| d < 0 || d > module.w_max() as i64) {
            continue;
        }
        out.push(ModeWord { ops, base });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cofinite::compute_constants;
    use crate::scalar::frac;
    use crate::virasoro::{build_module, build_virasoro_voa, ModuleKind};

    #[test]
    fn lee_yang_l_values() {
        let voa = build_virasoro_voa(frac(-22, 5), 8).unwrap();
        let data = compute_constants(&voa).unwrap();
        let m = build_module(&voa, frac(-1, 5), 6, ModuleKind::SimpleQuotient);
        assert_eq!(compute_l(&voa, &m, &data).unwrap(), 2);
        assert_eq!(compute_l(&voa, voa.adjoint(), &data).unwrap(), 0);
    }

    #[test]
    fn vacuum_elements_small_depths() {
        let voa = build_virasoro_voa(frac(-22, 5), 8).unwrap();
        let data = compute_constants(&voa).unwrap();
        let om = voa.omega();
        let adj = voa.adjoint();
        assert_eq!(
            enumerate_module_spanset(&voa, adj, &data, 0, 4),
            vec![ModeWord::new(&[ModeOp::new(om, -3)], Base::Vacuum)]
        );
        assert_eq!(enumerate_module_spanset(&voa, adj, &data, 0, 0), vec![ModeWord::base_only(Base::Vacuum)]);
    }

    #[test]
    fn spanning_element_predicate() {
        let voa = build_virasoro_voa(frac(-22, 5), 8).unwrap();
        let data = compute_constants(&voa).unwrap();
        let om = voa.omega();
        let w = |idx: &[i64]| ModeWord::new(&idx.iter().map(|&i| ModeOp::new(om, i)).collect::<Vec<_>>(), Base::Generator);
        assert!(is_spanning_element(&data, 2, &w(&[-3, -1, 0, 1, 1, 1])));
        assert!(!is_spanning_element(&data, 2, &w(&[-1, -1])));
        assert!(!is_spanning_element(&data, 2, &w(&[1, 1, 1, 1])));
        assert!(!is_spanning_element(&data, 2, &w(&[0, -1])));
        assert!(!is_spanning_element(&data, 2, &w(&[2])));
    }

    #[test]
    fn spanning_element_is_fixed() {
        let voa = build_virasoro_voa(frac(-22, 5), 8).unwrap();
        let data = compute_constants(&voa).unwrap();
        let m = build_module(&voa, frac(-1, 5), 6, ModuleKind::SimpleQuotient);
        let om = voa.omega();
        let w = ModeWord::new(&[ModeOp::new(om, -2), ModeOp::new(om, 0), ModeOp::new(om, 1)], Base::Generator);
        let e = Expression::word(w.clone());
        assert_eq!(normalize(&voa, &m, &data, 2, &e).unwrap().expression, e);
    }
}
