//! Mode words, formal sums of them, and the Borcherds-identity rewrites.
//!
//! A mode word `u1_{j1} u2_{j2} .. uk_{jk} w` is stored leftmost operator
//! first; operators act right to left on the base ket. Vectors labelling the
//! operators live in the VOA's intern store and are referred to by [`VecId`].
//!
//! The identities involve infinite sums that truncate on any fixed vector.
//! Inside a word the truncation is exact: the depth of the vector an operator
//! acts on is known, so a term is generated only while it can be nonzero.
//! Free-standing operator sums carry the largest input depth they are valid for.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::{binomial_q, sign, Scalar};
use crate::virasoro::{ModVec, ModuleModel, VoaModel};

/// Handle of an interned homogeneous VOA vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VecId(pub u32);

#[derive(Default)]
struct StoreInner {
    vectors: Vec<Arc<ModVec>>,
    weights: Vec<usize>,
    index: HashMap<ModVec, VecId>,
}

/// Interning store for VOA vectors. Vectors are stored up to scale: the
/// stored representative has leading coefficient one.
#[derive(Default)]
pub struct VectorStore {
    inner: Mutex<StoreInner>,
}

impl VectorStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `(id, scale)` with `v = scale * get(id)`, or `None` for zero.
    pub fn intern(&self, v: &ModVec, weight: usize) -> Option<(VecId, Scalar)> {
        let (_, lead) = v.leading()?;
        let lead = lead.clone();
        let unit = v.scaled(&lead.recip());
        let mut g = self.inner.lock();
        if let Some(&id) = g.index.get(&unit) {
            return Some((id, lead));
        }
        let id = VecId(g.vectors.len() as u32);
        g.vectors.push(Arc::new(unit.clone()));
        g.weights.push(weight);
        g.index.insert(unit, id);
        Some((id, lead))
    }

    pub fn get(&self, id: VecId) -> Arc<ModVec> {
        self.inner.lock().vectors[id.0 as usize].clone()
    }

    pub fn weight(&self, id: VecId) -> usize {
        self.inner.lock().weights[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.inner.lock().vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The mode `vec_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeOp {
    pub vec: VecId,
    pub index: i64,
}

impl ModeOp {
    pub fn new(vec: VecId, index: i64) -> Self {
        Self { vec, index }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Base {
    /// The vacuum of the VOA, acted on inside the adjoint module.
    Vacuum,
    /// The lowest-weight generator `w` of a module.
    Generator,
}

pub type Ops = SmallVec<[ModeOp; 8]>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeWord {
    pub ops: Ops,
    pub base: Base,
}

impl ModeWord {
    pub fn new(ops: &[ModeOp], base: Base) -> Self {
        Self { ops: SmallVec::from_slice(ops), base }
    }

    pub fn base_only(base: Base) -> Self {
        Self { ops: Ops::new(), base }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Copy with `ops[range]` replaced by `with`.
    pub fn splice(&self, range: std::ops::Range<usize>, with: &[ModeOp]) -> ModeWord {
        let mut ops = Ops::with_capacity(self.ops.len() + with.len());
        ops.extend_from_slice(&self.ops[..range.start]);
        ops.extend_from_slice(with);
        ops.extend_from_slice(&self.ops[range.end..]);
        ModeWord { ops, base: self.base }
    }
}

/// `wt(u_n) = wt(u) - n - 1`.
pub fn wt_mode(weight: usize, n: i64) -> i64 {
    weight as i64 - n - 1
}

pub fn op_weight(voa: &VoaModel, op: &ModeOp) -> i64 {
    wt_mode(voa.weight(op.vec), op.index)
}

/// Sum of operator weights, i.e. the depth of the result above the base.
pub fn operator_weight(voa: &VoaModel, ops: &[ModeOp]) -> i64 {
    ops.iter().map(|o| op_weight(voa, o)).sum()
}

/// Filtration level: the sum of the weights of the vectors labelling the modes.
pub fn filtration(voa: &VoaModel, ops: &[ModeOp]) -> usize {
    ops.iter().map(|o| voa.weight(o.vec)).sum()
}

/// Depth of `ops[from..]` applied to a vector of depth `base_depth`.
pub fn suffix_depth(voa: &VoaModel, ops: &[ModeOp], from: usize, base_depth: i64) -> i64 {
    base_depth + operator_weight(voa, &ops[from..])
}

/// Removes identity modes of the vacuum; `false` if some vacuum mode kills the word.
fn strip_vacuum(voa: &VoaModel, ops: &mut Ops) -> bool {
    let vac = voa.vacuum();
    if ops.iter().any(|o| o.vec == vac && o.index != -1) {
        return false;
    }
    ops.retain(|o| o.vec != vac);
    true
}

/// True when weight arithmetic alone forces the word applied to a vector of
/// depth `base_depth` to vanish.
fn vanishes(voa: &VoaModel, ops: &[ModeOp], base: Option<Base>, base_depth: i64) -> bool {
    let mut d = base_depth;
    for o in ops.iter().rev() {
        d += op_weight(voa, o);
        if d < 0 {
            return true;
        }
    }
    // u_n 1 = 0 for n >= 0
    base == Some(Base::Vacuum) && ops.last().is_some_and(|o| o.index >= 0)
}

/// A canonical formal sum of mode words.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Expression {
    terms: BTreeMap<ModeWord, Scalar>,
}

impl Expression {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(w: ModeWord) -> Self {
        let mut e = Self::zero();
        e.add_raw(w, Scalar::one());
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ModeWord, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &ModeWord) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Adds without simplification.
    pub fn add_raw(&mut self, w: ModeWord, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Adds after dropping vacuum identity modes and words that vanish by weight.
    pub fn push(&mut self, voa: &VoaModel, mut w: ModeWord, c: Scalar) {
        if c.is_zero() || !strip_vacuum(voa, &mut w.ops) || vanishes(voa, &w.ops, Some(w.base), 0) {
            return;
        }
        self.add_raw(w, c);
    }

    pub fn add_scaled(&mut self, other: &Expression, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (w, x) in &other.terms {
            self.add_raw(w.clone(), x * c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Expression {
        let mut e = Expression::zero();
        e.add_scaled(self, c);
        e
    }

    pub fn sub(&self, other: &Expression) -> Expression {
        let mut e = self.clone();
        e.add_scaled(other, &-Scalar::one());
        e
    }
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(w, c)| (w, crate::scalar::fmt_scalar(c)))).finish()
    }
}

/// A formal sum of operator products, valid on inputs of depth `<= max_depth`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct OperatorSum {
    terms: BTreeMap<Ops, Scalar>,
    max_depth: i64,
}

impl OperatorSum {
    pub fn zero(max_depth: i64) -> Self {
        Self { terms: BTreeMap::new(), max_depth }
    }

    pub fn identity(max_depth: i64) -> Self {
        let mut s = Self::zero(max_depth);
        s.add(Ops::new(), Scalar::one());
        s
    }

    pub fn max_depth(&self) -> i64 {
        self.max_depth
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Ops, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, ops: Ops, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(ops) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Adds unless the product vanishes on every admissible input.
    fn push(&mut self, voa: &VoaModel, mut ops: Ops, c: Scalar) {
        if c.is_zero() || !strip_vacuum(voa, &mut ops) || vanishes(voa, &ops, None, self.max_depth) {
            return;
        }
        self.add(ops, c);
    }

    pub fn add_scaled(&mut self, other: &OperatorSum, c: &Scalar) {
        for (ops, x) in &other.terms {
            self.add(ops.clone(), x * c);
        }
    }

    /// Applies the sum to a module vector.
    pub fn apply(&self, voa: &VoaModel, module: &ModuleModel, v: &ModVec) -> Result<ModVec> {
        if let Some(&d) = v.depths().last() {
            if d as i64 > self.max_depth {
                return Err(Error::PreconditionViolation(format!(
                    "operator sum truncated for depth {} applied at depth {d}",
                    self.max_depth
                )));
            }
        }
        let mut out = ModVec::zero();
        for (ops, c) in &self.terms {
            out.add_scaled(&apply_ops(voa, module, ops, v)?, c);
        }
        Ok(out)
    }

    /// The sum as words on a base ket.
    pub fn on_base(&self, voa: &VoaModel, base: Base) -> Expression {
        let mut e = Expression::zero();
        for (ops, c) in &self.terms {
            e.push(voa, ModeWord { ops: ops.clone(), base }, c.clone());
        }
        e
    }
}

impl fmt::Debug for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(w, c)| (w, crate::scalar::fmt_scalar(c)))).finish()
    }
}

/// Applies `ops` (rightmost first) to `v`.
pub fn apply_ops(voa: &VoaModel, module: &ModuleModel, ops: &[ModeOp], v: &ModVec) -> Result<ModVec> {
    let mut cur = v.clone();
    for o in ops.iter().rev() {
        if cur.is_zero() {
            break;
        }
        cur = module.vertex_mode(&voa.vector(o.vec), o.index, &cur)?;
    }
    Ok(cur)
}

/// Evaluates an expression on the generator of `module`.
pub fn evaluate(e: &Expression, voa: &VoaModel, module: &ModuleModel) -> Result<ModVec> {
    let mut out = ModVec::zero();
    for (w, c) in e.terms() {
        if w.base == Base::Vacuum && !module.is_vacuum() {
            return Err(Error::BaseMismatch("|0>".into()));
        }
        out.add_scaled(&apply_ops(voa, module, &w.ops, &module.generator())?, c);
    }
    Ok(out)
}

/// A split of `{1..n}` into an increasing `lambda` and a decreasing complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSplit {
    pub n: usize,
    pub i: usize,
    pub lambda: Vec<usize>,
    pub lambda_bar: Vec<usize>,
}

/// All `C(n, i)` splits, `lambda` in lexicographic order.
pub fn lambda_splits(n: usize, i: usize) -> Vec<IndexSplit> {
    fn go(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for k in start..=n {
            if n - k + 1 < left {
                break;
            }
            cur.push(k);
            go(k + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    if i > n {
        return Vec::new();
    }
    let mut subsets = Vec::new();
    go(1, n, i, &mut Vec::new(), &mut subsets);
    subsets
        .into_iter()
        .map(|lambda| {
            let lambda_bar = (1..=n).rev().filter(|k| !lambda.contains(k)).collect();
            IndexSplit { n, i, lambda, lambda_bar }
        })
        .collect()
}

fn check_pair(word: &ModeWord, p: usize) -> Result<(ModeOp, ModeOp)> {
    if p + 1 >= word.ops.len() {
        return Err(Error::PreconditionViolation(format!("no operator pair at position {p} in a word of length {}", word.ops.len())));
    }
    Ok((word.ops[p], word.ops[p + 1]))
}

/// Transposes the operators at `p` and `p + 1`:
/// `u_a v_b = v_b u_a + sum_i C(a, i) (u_i v)_{a+b-i}`.
pub fn commutator_swap(voa: &VoaModel, word: &ModeWord, p: usize) -> Result<Expression> {
    let (u, v) = check_pair(word, p)?;
    let mut out = Expression::zero();
    out.push(voa, word.splice(p..p + 2, &[v, u]), Scalar::one());
    let top = voa.weight(u.vec) as i64 + voa.weight(v.vec) as i64 - 1;
    for i in 0..=top {
        let c = binomial_q(u.index, i as u64);
        if c.is_zero() {
            continue;
        }
        if let Some((id, scale)) = voa.product_id(u.vec, i, v.vec)? {
            let op = ModeOp::new(id, u.index + v.index - i);
            out.push(voa, word.splice(p..p + 2, &[op]), c * scale);
        }
    }
    Ok(out)
}

/// Terms of `(a_j b)_s` as two-operator products, complete on inputs of depth
/// `<= depth`:
/// `sum_i (-1)^i C(j, i) [a_{j-i} b_{s+i} - (-1)^j b_{j+s-i} a_i]`.
fn iterate_terms(voa: &VoaModel, a: VecId, j: i64, b: VecId, s: i64, depth: i64) -> Vec<([ModeOp; 2], Scalar)> {
    let (wa, wb) = (voa.weight(a) as i64, voa.weight(b) as i64);
    let mut out = Vec::new();
    let mut i = 0i64;
    while wb - (s + i) - 1 + depth >= 0 {
        let c = sign(i) * binomial_q(j, i as u64);
        if j >= 0 && i > j {
            break;
        }
        if !c.is_zero() {
            out.push(([ModeOp::new(a, j - i), ModeOp::new(b, s + i)], c));
        }
        i += 1;
    }
    let mut i = 0i64;
    while wa - i - 1 + depth >= 0 {
        if j >= 0 && i > j {
            break;
        }
        let c = -(sign(i) * binomial_q(j, i as u64) * sign(j));
        if !c.is_zero() {
            out.push(([ModeOp::new(b, j + s - i), ModeOp::new(a, i)], c));
        }
        i += 1;
    }
    out
}

/// `(a_j b)_s` expanded into modes of `a` and `b`, valid on inputs of depth `<= max_depth`.
pub fn iterate_expand(voa: &VoaModel, a: VecId, j: i64, b: VecId, s: i64, max_depth: i64) -> OperatorSum {
    let mut out = OperatorSum::zero(max_depth);
    for (ops, c) in iterate_terms(voa, a, j, b, s, max_depth) {
        out.push(voa, SmallVec::from_slice(&ops), c);
    }
    out
}

/// Replaces the operator at `p` by `coef * (a_j b)_{index}` expanded with the
/// iterate formula, truncated exactly for the vector it acts on.
pub fn iterate_in_word(
    voa: &VoaModel,
    word: &ModeWord,
    p: usize,
    a: VecId,
    j: i64,
    b: VecId,
    coef: &Scalar,
) -> Result<Expression> {
    let op = *word.ops.get(p).ok_or_else(|| Error::PreconditionViolation(format!("no operator at position {p}")))?;
    let depth = suffix_depth(voa, &word.ops, p + 1, 0);
    let mut out = Expression::zero();
    if depth < 0 {
        return Ok(out);
    }
    for (ops, c) in iterate_terms(voa, a, j, b, op.index, depth) {
        out.push(voa, word.splice(p..p + 1, &ops), c * coef);
    }
    Ok(out)
}

/// Rewrites `u_{-n} v_{-n}` at positions `p, p + 1`:
/// `u_{-n} v_{-n} = (u_{-1} v)_{1-2n} - sum_{i != n-1} u_{-1-i} v_{1-2n+i} - sum_i v_{-2n-i} u_i`.
pub fn repeat_reduce(voa: &VoaModel, word: &ModeWord, p: usize) -> Result<Expression> {
    let (u, v) = check_pair(word, p)?;
    if u.index != v.index {
        return Err(Error::NotARepeat(p, p + 1));
    }
    let n = -u.index;
    if n < 1 {
        return Err(Error::Inapplicable { rule: "repeat_reduce", reason: format!("repeated index {} is not negative", u.index) });
    }
    let depth = suffix_depth(voa, &word.ops, p + 2, 0);
    let mut out = Expression::zero();
    if depth < 0 {
        return Ok(out);
    }
    if let Some((id, scale)) = voa.product_id(u.vec, -1, v.vec)? {
        out.push(voa, word.splice(p..p + 2, &[ModeOp::new(id, 1 - 2 * n)]), scale);
    }
    let (wu, wv) = (voa.weight(u.vec) as i64, voa.weight(v.vec) as i64);
    let mut i = 0i64;
    while wv - (1 - 2 * n + i) - 1 + depth >= 0 {
        if i != n - 1 {
            let ops = [ModeOp::new(u.vec, -1 - i), ModeOp::new(v.vec, 1 - 2 * n + i)];
            out.push(voa, word.splice(p..p + 2, &ops), -Scalar::one());
        }
        i += 1;
    }
    let mut i = 0i64;
    while wu - i - 1 + depth >= 0 {
        let ops = [ModeOp::new(v.vec, -2 * n - i), ModeOp::new(u.vec, i)];
        out.push(voa, word.splice(p..p + 2, &ops), -Scalar::one());
        i += 1;
    }
    Ok(out)
}

/// One term of the expansion of `Y(x^1_{-1} .. x^n_{-1} v, z)`:
/// `left * z^{z_power} Y(v, z) * right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionTerm {
    pub split: IndexSplit,
    /// `m[k - 1]` is the summation index attached to `x^k`.
    pub m: Vec<i64>,
    pub left: Ops,
    pub right: Ops,
    pub z_power: i64,
}

impl ExpansionTerm {
    /// The operator product contributing to the mode `s` of the expanded vertex operator.
    pub fn ops_for_mode(&self, v: VecId, s: i64) -> Ops {
        let mut ops = self.left.clone();
        ops.push(ModeOp::new(v, s + self.z_power));
        ops.extend_from_slice(&self.right);
        ops
    }
}

fn split_term(xs: &[VecId], split: &IndexSplit, m: &[i64]) -> ExpansionTerm {
    let left = split.lambda.iter().map(|&k| ModeOp::new(xs[k - 1], -1 - m[k - 1])).collect();
    let right = split.lambda_bar.iter().map(|&k| ModeOp::new(xs[k - 1], m[k - 1])).collect();
    let z_power = split.lambda.iter().map(|&k| m[k - 1]).sum::<i64>() - split.lambda_bar.iter().map(|&k| 1 + m[k - 1]).sum::<i64>();
    ExpansionTerm { split: split.clone(), m: m.to_vec(), left, right, z_power }
}

/// The expansion of `Y(x^1_{-1} .. x^n_{-1} v, z)` over all splits, with every
/// summation index in `0..=max_m`.
pub fn expand_minus_one_product(xs: &[VecId], max_m: i64) -> Result<Vec<ExpansionTerm>> {
    let n = xs.len();
    if n == 0 {
        return Err(Error::PreconditionViolation("need at least one vector".into()));
    }
    let mut out = Vec::new();
    let mut m = vec![0i64; n];
    for i in 0..=n {
        for split in lambda_splits(n, i) {
            loop {
                out.push(split_term(xs, &split, &m));
                // odometer over m in [0, max_m]^n
                let mut k = 0;
                while k < n && m[k] == max_m {
                    m[k] = 0;
                    k += 1;
                }
                if k == n {
                    break;
                }
                m[k] += 1;
            }
        }
    }
    Ok(out)
}

/// Mode `s` of `x^1_{-1} .. x^n_{-1} v` via the split expansion, complete on
/// inputs of depth `<= max_depth`. `skip` filters out individual terms.
fn minus_one_mode_filtered(
    voa: &VoaModel,
    xs: &[VecId],
    v: VecId,
    s: i64,
    max_depth: i64,
    skip: &dyn Fn(&ExpansionTerm) -> bool,
) -> Result<OperatorSum> {
    let n = xs.len();
    if n == 0 {
        return Err(Error::PreconditionViolation("need at least one vector".into()));
    }
    let wv = voa.weight(v) as i64;
    let is_vac = v == voa.vacuum();
    let mut out = OperatorSum::zero(max_depth);
    for i in 0..=n {
        for split in lambda_splits(n, i) {
            let mut m = vec![0i64; n];
            // right operators, rightmost (last in lambda_bar) first
            let right: Vec<usize> = split.lambda_bar.iter().rev().copied().collect();
            enumerate_right(voa, xs, &right, 0, max_depth, &mut m, &mut |m, depth| {
                let spent: i64 = split.lambda_bar.iter().map(|&k| 1 + m[k - 1]).sum();
                // v_p with p = s + sum_left m - spent must act nonzero on `depth`
                let (lo, hi) = if is_vac {
                    let t = -1 - s + spent;
                    (t, t)
                } else {
                    (0, wv - 1 + depth - s + spent)
                };
                if hi < 0 || lo > hi {
                    return;
                }
                let mut m = m.to_vec();
                for total in lo.max(0)..=hi {
                    compositions(&split.lambda, total, &mut m, 0, &mut |m| {
                        let term = split_term(xs, &split, m);
                        if !skip(&term) {
                            out.push(voa, term.ops_for_mode(v, s), Scalar::one());
                        }
                    });
                }
            });
        }
    }
    Ok(out)
}

fn enumerate_right(
    voa: &VoaModel,
    xs: &[VecId],
    labels: &[usize],
    at: usize,
    depth: i64,
    m: &mut Vec<i64>,
    f: &mut dyn FnMut(&[i64], i64),
) {
    if at == labels.len() {
        f(m, depth);
        return;
    }
    let k = labels[at];
    let w = voa.weight(xs[k - 1]) as i64;
    for mk in 0..=(depth + w - 1) {
        m[k - 1] = mk;
        enumerate_right(voa, xs, labels, at + 1, depth + w - mk - 1, m, f);
    }
    m[k - 1] = 0;
}

fn compositions(labels: &[usize], total: i64, m: &mut Vec<i64>, at: usize, f: &mut dyn FnMut(&[i64])) {
    if at + 1 >= labels.len() {
        if let Some(&k) = labels.get(at) {
            m[k - 1] = total;
            f(m);
            m[k - 1] = 0;
        } else if total == 0 {
            f(m);
        }
        return;
    }
    let k = labels[at];
    for x in 0..=total {
        m[k - 1] = x;
        compositions(labels, total - x, m, at + 1, f);
    }
    m[k - 1] = 0;
}

/// Mode `s` of `x^1_{-1} .. x^n_{-1} v` read off from the split expansion.
pub fn minus_one_mode(voa: &VoaModel, xs: &[VecId], v: VecId, s: i64, max_depth: i64) -> Result<OperatorSum> {
    minus_one_mode_filtered(voa, xs, v, s, max_depth, &|_| false)
}

/// Mode `s` of the VOA vector `ops 1`, expanded by nesting the iterate formula.
pub fn mode_of_vacuum_word(voa: &VoaModel, ops: &[ModeOp], s: i64, max_depth: i64) -> OperatorSum {
    let mut out = OperatorSum::zero(max_depth);
    let Some((&a, rest)) = ops.split_first() else {
        if s == -1 {
            out.add(Ops::new(), Scalar::one());
        }
        return out;
    };
    let (j, wa) = (a.index, voa.weight(a.vec) as i64);
    let wb = operator_weight(voa, rest);
    let mut i = 0i64;
    while wb - (s + i) - 1 + max_depth >= 0 {
        if j >= 0 && i > j {
            break;
        }
        let c = sign(i) * binomial_q(j, i as u64);
        if !c.is_zero() {
            for (inner, x) in mode_of_vacuum_word(voa, rest, s + i, max_depth).terms() {
                let mut o = Ops::new();
                o.push(ModeOp::new(a.vec, j - i));
                o.extend_from_slice(inner);
                out.push(voa, o, &c * x);
            }
        }
        i += 1;
    }
    let mut i = 0i64;
    while wa - i - 1 + max_depth >= 0 {
        if j >= 0 && i > j {
            break;
        }
        let c = -(sign(i) * binomial_q(j, i as u64) * sign(j));
        if !c.is_zero() {
            let inner_depth = max_depth + wa - i - 1;
            for (inner, x) in mode_of_vacuum_word(voa, rest, j + s - i, inner_depth).terms() {
                let mut o = inner.clone();
                o.push(ModeOp::new(a.vec, i));
                out.push(voa, o, &c * x);
            }
        }
        i += 1;
    }
    out
}

/// Rewrites `x^Q_m .. x^1_m` (the list `xs` is `x^1 .. x^Q`) using a rewriting
/// `rhs` of `x^1_{-1} .. x^Q_{-1} 1` into shorter words. The result is an
/// operator sum equal to the repeated product on inputs of depth `<= max_depth`:
/// the matching mode of `rhs`, minus every other term of the split expansion.
pub fn residue_repeat_identity(
    voa: &VoaModel,
    xs: &[VecId],
    m: i64,
    rhs: &Expression,
    max_depth: i64,
) -> Result<OperatorSum> {
    let q = xs.len() as i64;
    if q == 0 {
        return Err(Error::PreconditionViolation("need at least one vector".into()));
    }
    if m < 0 {
        return Err(Error::Inapplicable { rule: "residue_repeat_identity", reason: format!("index {m} is negative") });
    }
    let adj = voa.adjoint();
    let mut lhs_ops = Ops::new();
    for &x in xs {
        lhs_ops.push(ModeOp::new(x, -1));
    }
    let lhs = apply_ops(voa, adj, &lhs_ops, &adj.generator())?;
    if evaluate(rhs, voa, adj)? != lhs {
        return Err(Error::BadRewrite);
    }
    let s = q * (m + 1) - 1;
    let mut out = OperatorSum::zero(max_depth);
    for (w, c) in rhs.terms() {
        out.add_scaled(&mode_of_vacuum_word(voa, &w.ops, s, max_depth), c);
    }
    let rest = minus_one_mode_filtered(voa, xs, voa.vacuum(), s, max_depth, &|t| t.split.i == 0 && t.m.iter().all(|&x| x == m))?;
    out.add_scaled(&rest, &-Scalar::one());
    Ok(out)
}

/// LHS minus RHS of the Borcherds identity for `u, v` at `(k, q, r)` applied to `target`:
/// `sum_i C(-k, i) (u_{-r+i} v)_{-k-q-i}
///  - sum_i (-1)^i C(-r, i) [u_{-k-r-i} v_{-q+i} - (-1)^r v_{-q-r-i} u_{-k+i}]`.
#[allow(clippy::too_many_arguments)]
pub fn borcherds_residual(
    voa: &VoaModel,
    module: &ModuleModel,
    u: VecId,
    v: VecId,
    k: i64,
    q: i64,
    r: i64,
    target: &ModVec,
) -> Result<ModVec> {
    let (wu, wv) = (voa.weight(u) as i64, voa.weight(v) as i64);
    let dt = target.depths().last().copied().unwrap_or(0) as i64;
    let (uv, vv) = (voa.vector(u), voa.vector(v));
    let mut out = ModVec::zero();
    let mut i = 0i64;
    while -r + i < wu + wv {
        if k <= 0 && i > -k {
            break;
        }
        let c = binomial_q(-k, i as u64);
        if !c.is_zero() {
            let comp = voa.product(u, -r + i, v)?;
            if !comp.is_zero() {
                out.add_scaled(&module.vertex_mode(&comp, -k - q - i, target)?, &c);
            }
        }
        i += 1;
    }
    let mut i = 0i64;
    while -q + i <= wv - 1 + dt {
        if r <= 0 && i > -r {
            break;
        }
        let c = sign(i) * binomial_q(-r, i as u64);
        if !c.is_zero() {
            let inner = module.vertex_mode(&vv, -q + i, target)?;
            out.add_scaled(&module.vertex_mode(&uv, -k - r - i, &inner)?, &-c);
        }
        i += 1;
    }
    let mut i = 0i64;
    while -k + i <= wu - 1 + dt {
        if r <= 0 && i > -r {
            break;
        }
        let c = sign(i) * binomial_q(-r, i as u64) * sign(r);
        if !c.is_zero() {
            let inner = module.vertex_mode(&uv, -k + i, target)?;
            out.add_scaled(&module.vertex_mode(&vv, -q - r - i, &inner)?, &c);
        }
        i += 1;
    }
    Ok(out)
}
