//! Truncated Virasoro-type models.
//!
//! A [`ModuleModel`] is a lowest-weight Virasoro module cut off at depth
//! `w_max`: either the Verma module or its simple quotient. Vectors are
//! sparse combinations of PBW words `L(-n1)..L(-nk) w` with `n1 >= .. >= nk`.
//! The vacuum variant imposes `L(-1)1 = 0`, so its words only use parts `>= 2`.
//!
//! Simple quotients are cut out per depth as the radical of the contravariant
//! form. A depth-`d` vector lies in the radical exactly when `L(1)` and `L(2)`
//! send it into the radical one and two levels down, so each level is built
//! from the two below it. [`ModuleModel::gram_matrix`] computes the form
//! directly and is kept for cross-checks.
//!
//! All vectors handed out are in normal form: for a simple quotient they are
//! supported on the chosen quotient basis words, so equality of vectors is
//! equality in the quotient.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::linalg::{invert, EchelonBasis, SparseMatrix, Vector};
use crate::modes::{VecId, VectorStore};
use crate::scalar::{binomial_q, fmt_scalar, frac, int, sign, Scalar};

/// A PBW word `L(-n1) L(-n2) .. L(-nk)` with `n1 >= n2 >= .. >= nk >= 1`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(SmallVec<[u8; 14]>);

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a word from parts; panics unless the parts are nonincreasing and positive.
    pub fn new(parts: &[u8]) -> Self {
        assert!(parts.iter().all(|&p| p > 0), "parts must be positive: {parts:?}");
        assert!(parts.windows(2).all(|w| w[0] >= w[1]), "parts must be nonincreasing: {parts:?}");
        Self(SmallVec::from_slice(parts))
    }

    pub fn parts(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.iter().map(|&p| p as usize).sum()
    }

    fn head(&self) -> u8 {
        self.0[0]
    }

    fn tail(&self) -> Word {
        Word(SmallVec::from_slice(&self.0[1..]))
    }

    fn prepend(&self, part: u8) -> Word {
        debug_assert!(self.0.first().is_none_or(|&h| h <= part));
        let mut v = SmallVec::with_capacity(self.len() + 1);
        v.push(part);
        v.extend_from_slice(&self.0);
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.depth().cmp(&other.depth()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| format!("L[-{p}]")).collect();
        write!(f, "{}", s.join(" "))
    }
}

/// Partitions of `d` into parts `>= min_part`, ordered lexicographically by
/// part sequence (largest part first).
pub fn partitions(d: usize, min_part: usize) -> Vec<Word> {
    fn go(rem: usize, max: usize, min: usize, cur: &mut Vec<u8>, out: &mut Vec<Word>) {
        if rem == 0 {
            out.push(Word::new(cur));
            return;
        }
        for p in (min..=max.min(rem)).rev() {
            cur.push(p as u8);
            go(rem - p, p, min, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(d, d, min_part.max(1), &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// A vector of a model: sparse coefficients over PBW words.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ModVec {
    terms: BTreeMap<Word, Scalar>,
}

impl ModVec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(word: Word) -> Self {
        Self::term(word, Scalar::one())
    }

    pub fn term(word: Word, c: Scalar) -> Self {
        let mut v = Self::zero();
        v.add_term(word, c);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, word: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &ModVec, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (w, x) in &other.terms {
            self.add_term(w.clone(), x * c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> ModVec {
        let mut v = ModVec::zero();
        v.add_scaled(self, c);
        v
    }

    pub fn sub(&self, other: &ModVec) -> ModVec {
        let mut v = self.clone();
        v.add_scaled(other, &-Scalar::one());
        v
    }

    /// Depths present in the support, ascending.
    pub fn depths(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(Word::depth).collect();
        d.dedup();
        d
    }

    /// The depth of a nonzero homogeneous vector.
    pub fn homogeneous_depth(&self) -> Option<usize> {
        match self.depths().as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    /// The depth-`d` component.
    pub fn component(&self, d: usize) -> ModVec {
        ModVec { terms: self.terms.iter().filter(|(w, _)| w.depth() == d).map(|(w, c)| (w.clone(), c.clone())).collect() }
    }

    /// Leading word and coefficient, used to normalize directions.
    pub fn leading(&self) -> Option<(&Word, &Scalar)> {
        self.terms.iter().next()
    }
}

impl fmt::Debug for ModVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ModVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("({})*{{{w}}}", fmt_scalar(c))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleKind {
    Verma,
    SimpleQuotient,
}

#[derive(Debug, Default)]
struct Level {
    verma: Vec<Word>,
    basis: Vec<Word>,
    basis_pos: HashMap<Word, usize>,
    /// Image coordinates used to solve for quotient coordinates.
    sel: Vec<usize>,
    inv: Vec<Vector>,
    /// Quotient coordinates of Verma words, filled on demand.
    coords: Mutex<HashMap<Word, Arc<Vector>>>,
}

type ModeKey = (Word, i64, Word);

/// A truncated lowest-weight module of the Virasoro algebra.
pub struct ModuleModel {
    c: Scalar,
    h: Scalar,
    w_max: usize,
    kind: ModuleKind,
    vacuum: bool,
    levels: Vec<Level>,
    act_cache: Mutex<HashMap<(i64, Word), Arc<ModVec>>>,
    mode_cache: Mutex<HashMap<ModeKey, Arc<ModVec>>>,
}

impl fmt::Debug for ModuleModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModuleModel")
            .field("c", &fmt_scalar(&self.c))
            .field("h", &fmt_scalar(&self.h))
            .field("w_max", &self.w_max)
            .field("kind", &self.kind)
            .field("vacuum", &self.vacuum)
            .field("dims", &self.graded_dims())
            .finish()
    }
}

impl ModuleModel {
    fn build(c: Scalar, h: Scalar, w_max: usize, kind: ModuleKind, vacuum: bool) -> Self {
        let mut m = ModuleModel {
            c,
            h,
            w_max,
            kind,
            vacuum,
            levels: Vec::with_capacity(w_max + 1),
            act_cache: Mutex::new(HashMap::new()),
            mode_cache: Mutex::new(HashMap::new()),
        };
        for d in 0..=w_max {
            let level = m.build_level(d);
            m.levels.push(level);
        }
        m
    }

    fn build_level(&self, d: usize) -> Level {
        let verma = partitions(d, if self.vacuum { 2 } else { 1 });
        let trivial = |basis: Vec<Word>| {
            let basis_pos = basis.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
            Level { verma: verma.clone(), basis, basis_pos, ..Default::default() }
        };
        if self.kind == ModuleKind::Verma || d == 0 {
            return trivial(verma.clone());
        }
        // the quotient is spanned by L(-1) M_{d-1} + L(-2) M_{d-2}; the rank of
        // their (L(1), L(2)) images is its dimension
        let mut span = EchelonBasis::new(self.image_len(d));
        for n in [1usize, 2] {
            if n > d {
                continue;
            }
            for b in self.levels[d - n].basis.clone() {
                let f = self.image_of_lowered(n as i64, &b).expect("levels below are built");
                span.insert(&f);
            }
        }
        let dim = span.rank();
        if dim == 0 {
            return trivial(Vec::new());
        }
        // greedy choice among Verma words, scanning from the top of the order
        let mut ech = EchelonBasis::new(span.dim());
        let mut chosen = Vec::new();
        for w in verma.iter().rev() {
            let f = self.image(w).expect("levels below are built");
            if ech.insert(&f) {
                chosen.push((w.clone(), f));
                if chosen.len() == dim {
                    break;
                }
            }
        }
        chosen.sort_by(|x, y| x.0.cmp(&y.0));
        let mut rows = EchelonBasis::new(dim);
        let mut sel = Vec::new();
        for row in 0..span.dim() {
            let v: Vector = chosen.iter().map(|(_, f)| f[row].clone()).collect();
            if rows.insert(&v) {
                sel.push(row);
                if sel.len() == dim {
                    break;
                }
            }
        }
        let square: Vec<Vector> =
            sel.iter().map(|&row| chosen.iter().map(|(_, f)| f[row].clone()).collect()).collect();
        let inv = invert(&square).expect("selected rows are independent");
        let basis: Vec<Word> = chosen.into_iter().map(|(w, _)| w).collect();
        let basis_pos = basis.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        Level { verma, basis, basis_pos, sel, inv, coords: Mutex::new(HashMap::new()) }
    }

    fn image_len(&self, d: usize) -> usize {
        [1usize, 2].iter().filter(|&&k| k <= d).map(|&k| self.levels[d - k].basis.len()).sum()
    }

    fn image_coords(&self, d: usize, parts: [ModVec; 2]) -> Vector {
        let mut f = Vec::new();
        for (k, v) in [1usize, 2].into_iter().zip(parts) {
            if k > d {
                continue;
            }
            let below = &self.levels[d - k];
            let mut coords = vec![Scalar::zero(); below.basis.len()];
            for (bw, x) in v.terms() {
                coords[below.basis_pos[bw]] = x.clone();
            }
            f.extend(coords);
        }
        f
    }

    /// `(L(1) w, L(2) w)` in the quotient below the depth of `w`.
    fn image(&self, w: &Word) -> Result<Vector> {
        let d = w.depth();
        let l1 = (*self.act_word(1, w)?).clone();
        let l2 = if d >= 2 { (*self.act_word(2, w)?).clone() } else { ModVec::zero() };
        Ok(self.image_coords(d, [l1, l2]))
    }

    /// Image of `L(-n) b` for a basis word `b`, computed without level `depth(b) + n`.
    fn image_of_lowered(&self, n: i64, b: &Word) -> Result<Vector> {
        let d = b.depth() + n as usize;
        let mut parts = [ModVec::zero(), ModVec::zero()];
        for (slot, k) in [1i64, 2].into_iter().enumerate() {
            if k as usize > d {
                continue;
            }
            // L(k) L(-n) b = L(-n) L(k) b + (k + n) L(k - n) b + central term
            let mut v = self.act_lie_mode(-n, &*self.act_word(k, b)?)?;
            v.add_scaled(&*self.act_word(k - n, b)?, &int(k + n));
            if k == n {
                v.add_term(b.clone(), &self.c * frac(k * k * k - k, 12));
            }
            parts[slot] = v;
        }
        Ok(self.image_coords(d, parts))
    }

    pub fn central_charge(&self) -> &Scalar {
        &self.c
    }

    pub fn lowest_weight(&self) -> &Scalar {
        &self.h
    }

    pub fn w_max(&self) -> usize {
        self.w_max
    }

    pub fn kind(&self) -> ModuleKind {
        self.kind
    }

    pub fn is_vacuum(&self) -> bool {
        self.vacuum
    }

    /// Depths `0..=available` are usable.
    fn available(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn dim(&self, d: usize) -> usize {
        self.levels.get(d).map_or(0, |l| l.basis.len())
    }

    pub fn verma_dim(&self, d: usize) -> usize {
        self.levels.get(d).map_or(0, |l| l.verma.len())
    }

    pub fn graded_dims(&self) -> Vec<usize> {
        (0..self.levels.len()).map(|d| self.dim(d)).collect()
    }

    /// The quotient basis words at depth `d`.
    pub fn basis(&self, d: usize) -> &[Word] {
        self.levels.get(d).map_or(&[], |l| l.basis.as_slice())
    }

    pub fn verma_basis(&self, d: usize) -> &[Word] {
        self.levels.get(d).map_or(&[], |l| l.verma.as_slice())
    }

    pub fn basis_vectors(&self, d: usize) -> Vec<ModVec> {
        self.basis(d).iter().cloned().map(ModVec::basis).collect()
    }

    pub fn generator(&self) -> ModVec {
        ModVec::basis(Word::empty())
    }

    fn check_depth(&self, depth: i64) -> Result<()> {
        if depth > self.available() as i64 {
            return Err(Error::OutOfWindow { depth, w_max: self.w_max });
        }
        Ok(())
    }

    /// Normal form of a single PBW word.
    pub fn project_word(&self, w: &Word) -> Result<ModVec> {
        let d = w.depth();
        self.check_depth(d as i64)?;
        if self.vacuum && w.parts().contains(&1) {
            return Err(Error::PreconditionViolation(format!("vacuum words use parts >= 2, got {w:?}")));
        }
        let level = &self.levels[d];
        if self.kind == ModuleKind::Verma || d == 0 {
            return Ok(ModVec::basis(w.clone()));
        }
        if let Some(&i) = level.basis_pos.get(w) {
            return Ok(ModVec::basis(level.basis[i].clone()));
        }
        let cached = level.coords.lock().get(w).cloned();
        let y = match cached {
            Some(y) => y,
            None => {
                let f = self.image(w)?;
                let y: Vector = level
                    .inv
                    .iter()
                    .map(|inv_row| {
                        inv_row.iter().zip(&level.sel).fold(Scalar::zero(), |acc, (a, &row)| {
                            if a.is_zero() || f[row].is_zero() {
                                acc
                            } else {
                                acc + a * &f[row]
                            }
                        })
                    })
                    .collect();
                let y = Arc::new(y);
                level.coords.lock().insert(w.clone(), y.clone());
                y
            }
        };
        let mut v = ModVec::zero();
        for (b, c) in level.basis.iter().zip(y.iter()) {
            v.add_term(b.clone(), c.clone());
        }
        Ok(v)
    }

    /// Normal form of an arbitrary combination of PBW words.
    pub fn project(&self, v: &ModVec) -> Result<ModVec> {
        let mut out = ModVec::zero();
        for (w, c) in v.terms() {
            out.add_scaled(&self.project_word(w)?, c);
        }
        Ok(out)
    }

    /// Coordinates of a homogeneous normal-form vector over `basis(d)`.
    pub fn coordinates(&self, v: &ModVec, d: usize) -> Vector {
        let level = &self.levels[d];
        let mut out = vec![Scalar::zero(); level.basis.len()];
        for (w, c) in v.terms() {
            if w.depth() == d {
                out[level.basis_pos[w]] = c.clone();
            }
        }
        out
    }

    /// Inverse of [`Self::coordinates`].
    pub fn from_coordinates(&self, coords: &[Scalar], d: usize) -> ModVec {
        let mut v = ModVec::zero();
        for (w, c) in self.basis(d).iter().zip(coords) {
            v.add_term(w.clone(), c.clone());
        }
        v
    }

    /// `L(k)` applied to a PBW word (any word, not only basis words).
    pub fn act_word(&self, k: i64, w: &Word) -> Result<Arc<ModVec>> {
        let target = w.depth() as i64 - k;
        if target < 0 {
            return Ok(Arc::new(ModVec::zero()));
        }
        self.check_depth(target)?;
        let key = (k, w.clone());
        if let Some(v) = self.act_cache.lock().get(&key) {
            return Ok(v.clone());
        }
        let v = Arc::new(self.act_word_uncached(k, w)?);
        self.act_cache.lock().insert(key, v.clone());
        Ok(v)
    }

    fn act_word_uncached(&self, k: i64, w: &Word) -> Result<ModVec> {
        if w.is_empty() {
            return match k {
                k if k > 0 => Ok(ModVec::zero()),
                0 => Ok(ModVec::term(Word::empty(), self.h.clone())),
                -1 if self.vacuum => Ok(ModVec::zero()),
                _ => self.project_word(&Word::new(&[(-k) as u8])),
            };
        }
        let n1 = w.head() as i64;
        if k < 0 && -k >= n1 {
            return self.project_word(&w.prepend((-k) as u8));
        }
        // L(k) L(-n1) rest = L(-n1) L(k) rest + (k + n1) L(k - n1) rest + central term,
        // with rest first reduced to quotient basis words
        let rest = self.project_word(&w.tail())?;
        let central = if k == n1 { &self.c * frac(k * k * k - k, 12) } else { Scalar::zero() };
        let mut out = ModVec::zero();
        for (b, c) in rest.terms() {
            for (w2, c2) in self.act_word(k, b)?.terms() {
                out.add_scaled(&*self.act_word(-n1, w2)?, &(c * c2));
            }
            if k + n1 != 0 {
                out.add_scaled(&*self.act_word(k - n1, b)?, &(c * int(k + n1)));
            }
            if !central.is_zero() {
                out.add_term(b.clone(), c * &central);
            }
        }
        Ok(out)
    }

    /// `L(k)` applied to a vector.
    pub fn act_lie_mode(&self, k: i64, v: &ModVec) -> Result<ModVec> {
        let mut out = ModVec::zero();
        for (w, c) in v.terms() {
            out.add_scaled(&*self.act_word(k, w)?, c);
        }
        Ok(out)
    }

    /// The mode `u_n` of the vacuum-module PBW word `u` applied to a basis word.
    ///
    /// Uses the iterate formula with `u = omega_p b`, `p = 1 - n1`:
    /// `(omega_p b)_n = sum_i (-1)^i C(p,i) [omega_{p-i} b_{n+i} - (-1)^p b_{p+n-i} omega_i]`.
    pub fn vertex_mode_word(&self, u: &Word, n: i64, x: &Word) -> Result<Arc<ModVec>> {
        let xd = x.depth() as i64;
        let target = xd + u.depth() as i64 - n - 1;
        if target < 0 {
            return Ok(Arc::new(ModVec::zero()));
        }
        if u.is_empty() {
            return Ok(Arc::new(if n == -1 { ModVec::basis(x.clone()) } else { ModVec::zero() }));
        }
        self.check_depth(target)?;
        let key = (u.clone(), n, x.clone());
        if let Some(v) = self.mode_cache.lock().get(&key) {
            return Ok(v.clone());
        }
        let p = 1 - u.head() as i64;
        let rest = u.tail();
        let rest_wt = rest.depth() as i64;
        let mut out = ModVec::zero();
        // omega_{p-i} b_{n+i} x, nonzero only while b_{n+i} x has depth >= 0
        let mut i = 0i64;
        while xd + rest_wt - (n + i) > 0 {
            let coeff = sign(i) * binomial_q(p, i as u64);
            let inner = self.vertex_mode_word(&rest, n + i, x)?;
            for (w2, c) in inner.terms() {
                out.add_scaled(&*self.act_word(p - i - 1, w2)?, &(c * &coeff));
            }
            i += 1;
        }
        // i = 0 term: b_k L(-1) x = L(-1) b_k x + k b_{k-1} x keeps every
        // intermediate at or below the target depth
        let k = p + n;
        let lead = -sign(p);
        for (w2, c) in self.vertex_mode_word(&rest, k, x)?.terms() {
            out.add_scaled(&*self.act_word(-1, w2)?, &(c * &lead));
        }
        if k != 0 {
            out.add_scaled(&*self.vertex_mode_word(&rest, k - 1, x)?, &(&lead * int(k)));
        }
        // - (-1)^p b_{p+n-i} omega_i x, nonzero only while i - 1 <= depth(x)
        for i in 1..=(xd + 1) {
            let coeff = -(sign(i) * binomial_q(p, i as u64) * sign(p));
            let inner = self.act_word(i - 1, x)?;
            for (w2, c) in inner.terms() {
                out.add_scaled(&*self.vertex_mode_word(&rest, p + n - i, w2)?, &(c * &coeff));
            }
        }
        let out = Arc::new(out);
        self.mode_cache.lock().insert(key, out.clone());
        Ok(out)
    }

    /// The mode `u_n` of a vacuum-module vector `u` applied to `v`.
    pub fn vertex_mode(&self, u: &ModVec, n: i64, v: &ModVec) -> Result<ModVec> {
        let mut out = ModVec::zero();
        for (uw, uc) in u.terms() {
            for (vw, vc) in v.terms() {
                out.add_scaled(&*self.vertex_mode_word(uw, n, vw)?, &(uc * vc));
            }
        }
        Ok(out)
    }

    /// Contravariant form on the Verma PBW basis at depth `d`, normalized by
    /// `<w, w> = 1` and `L(n)^* = L(-n)`.
    pub fn gram_matrix(&self, d: usize) -> SparseMatrix {
        let twin = ModuleModel::build(self.c.clone(), self.h.clone(), d, ModuleKind::Verma, self.vacuum);
        let basis = twin.verma_basis(d).to_vec();
        let mut g = SparseMatrix::zeros(basis.len(), basis.len());
        for (j, y) in basis.iter().enumerate() {
            for (i, x) in basis.iter().enumerate() {
                let mut v = ModVec::basis(y.clone());
                for &part in x.parts() {
                    v = twin.act_lie_mode(part as i64, &v).expect("annihilators stay in window");
                }
                g.set(i, j, v.coeff(&Word::empty()));
            }
        }
        g
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor {
            schema: "c2span.model/1".into(),
            role: if self.vacuum { "voa".into() } else { "module".into() },
            central_charge: self.c.clone(),
            lowest_weight: self.h.clone(),
            w_max: self.w_max,
            kind: self.kind,
            graded_dims: self.graded_dims(),
            verma_dims: (0..=self.w_max).map(|d| self.verma_dim(d)).collect(),
            basis: (0..=self.w_max)
                .map(|d| self.basis(d).iter().map(|w| render_word(w, self.vacuum)).collect())
                .collect(),
        }
    }
}

fn render_word(w: &Word, vacuum: bool) -> String {
    let ket = if vacuum { "|0>" } else { "|h>" };
    if w.is_empty() {
        ket.to_string()
    } else {
        format!("{w} {ket}")
    }
}

/// JSON description of a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub schema: String,
    pub role: String,
    #[serde(with = "crate::scalar::serde_str")]
    pub central_charge: Scalar,
    #[serde(with = "crate::scalar::serde_str")]
    pub lowest_weight: Scalar,
    pub w_max: usize,
    pub kind: ModuleKind,
    pub graded_dims: Vec<usize>,
    pub verma_dims: Vec<usize>,
    pub basis: Vec<Vec<String>>,
}

/// An interned vector with its scale, or `None` for zero.
type Interned = Option<(VecId, Scalar)>;

/// A truncated simple Virasoro vertex operator algebra.
///
/// Its adjoint module is the simple quotient of the vacuum module, and all
/// vectors used as mode labels are interned in an internal store.
pub struct VoaModel {
    adjoint: ModuleModel,
    store: VectorStore,
    vacuum_id: VecId,
    omega_id: VecId,
    products: Mutex<HashMap<(VecId, i64, VecId), Interned>>,
}

impl fmt::Debug for VoaModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VoaModel").field("adjoint", &self.adjoint).finish()
    }
}

/// Builds the simple Virasoro VOA of central charge `c` up to weight `w_max`.
pub fn build_virasoro_voa(c: Scalar, w_max: usize) -> Result<VoaModel> {
    if w_max < 2 {
        return Err(Error::PreconditionViolation(format!("w_max must be at least 2, got {w_max}")));
    }
    let adjoint = ModuleModel::build(c, Scalar::zero(), w_max, ModuleKind::SimpleQuotient, true);
    let store = VectorStore::new();
    let (vacuum_id, _) = store.intern(&ModVec::basis(Word::empty()), 0).expect("vacuum is nonzero");
    let omega = adjoint.project_word(&Word::new(&[2]))?;
    let (omega_id, _) = store.intern(&omega, 2).ok_or_else(|| Error::Internal("omega vanishes".into()))?;
    Ok(VoaModel { adjoint, store, vacuum_id, omega_id, products: Mutex::new(HashMap::new()) })
}

/// Builds the lowest-weight module of lowest weight `h` over `voa`.
pub fn build_module(voa: &VoaModel, h: Scalar, w_max: usize, kind: ModuleKind) -> ModuleModel {
    ModuleModel::build(voa.central_charge().clone(), h, w_max, kind, false)
}

/// Central charge of the `(p, q)` minimal model, `1 - 6 (p - q)^2 / (p q)`.
pub fn minimal_model_central_charge(p: i64, q: i64) -> Scalar {
    int(1) - frac(6 * (p - q) * (p - q), p * q)
}

impl VoaModel {
    pub fn central_charge(&self) -> &Scalar {
        self.adjoint.central_charge()
    }

    pub fn w_max(&self) -> usize {
        self.adjoint.w_max()
    }

    pub fn adjoint(&self) -> &ModuleModel {
        &self.adjoint
    }

    pub fn store(&self) -> &VectorStore {
        &self.store
    }

    pub fn dim(&self, d: usize) -> usize {
        self.adjoint.dim(d)
    }

    pub fn graded_dims(&self) -> Vec<usize> {
        self.adjoint.graded_dims()
    }

    pub fn vacuum(&self) -> VecId {
        self.vacuum_id
    }

    pub fn omega(&self) -> VecId {
        self.omega_id
    }

    /// Normal form of the PBW word `L(-n1)..L(-nk) 1`.
    pub fn word_vector(&self, parts: &[u8]) -> Result<ModVec> {
        self.adjoint.project_word(&Word::new(parts))
    }

    /// Interns a homogeneous vector, returning its id and the scale with
    /// `v = scale * stored(id)`; `None` for the zero vector.
    pub fn intern(&self, v: &ModVec) -> Result<Option<(VecId, Scalar)>> {
        if v.is_zero() {
            return Ok(None);
        }
        let d = v
            .homogeneous_depth()
            .ok_or_else(|| Error::PreconditionViolation("mode labels must be homogeneous".into()))?;
        let nf = self.adjoint.project(v)?;
        Ok(self.store.intern(&nf, d))
    }

    /// Interns a PBW word vector and returns its id (the word must not vanish).
    pub fn intern_word(&self, parts: &[u8]) -> Result<(VecId, Scalar)> {
        let v = self.word_vector(parts)?;
        self.intern(&v)?
            .ok_or_else(|| Error::PreconditionViolation(format!("L-word {parts:?} vanishes in the simple quotient")))
    }

    pub fn vector(&self, id: VecId) -> Arc<ModVec> {
        self.store.get(id)
    }

    pub fn weight(&self, id: VecId) -> usize {
        self.store.weight(id)
    }

    /// `u_n v` inside the VOA, for interned vectors.
    pub fn product(&self, u: VecId, n: i64, v: VecId) -> Result<ModVec> {
        let wt = self.weight(u) as i64 + self.weight(v) as i64 - n - 1;
        if wt > self.w_max() as i64 {
            return Err(Error::UnresolvableProduct { weight: wt, w_max: self.w_max() });
        }
        self.adjoint.vertex_mode(&self.vector(u), n, &self.vector(v))
    }

    /// `u_n v` interned: `Some((id, scale))` with `u_n v = scale * stored(id)`.
    pub fn product_id(&self, u: VecId, n: i64, v: VecId) -> Result<Option<(VecId, Scalar)>> {
        let wt = self.weight(u) as i64 + self.weight(v) as i64 - n - 1;
        if wt < 0 {
            return Ok(None);
        }
        let key = (u, n, v);
        if let Some(hit) = self.products.lock().get(&key) {
            return Ok(hit.clone());
        }
        let prod = self.product(u, n, v)?;
        let out = if prod.is_zero() { None } else { self.store.intern(&prod, wt as usize) };
        self.products.lock().insert(key, out.clone());
        Ok(out)
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        self.adjoint.descriptor()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_scalar;

    fn lee_yang() -> Scalar {
        parse_scalar("-22/5").unwrap()
    }

    #[test]
    fn partitions_are_ordered() {
        let p = partitions(4, 1);
        let parts: Vec<&[u8]> = p.iter().map(Word::parts).collect();
        assert_eq!(parts, vec![&[1, 1, 1, 1][..], &[2, 1, 1], &[2, 2], &[3, 1], &[4]]);
        assert_eq!(partitions(4, 2).len(), 2);
        assert_eq!(partitions(1, 2).len(), 0);
        assert_eq!(partitions(0, 1), vec![Word::empty()]);
    }

    #[test]
    fn vacuum_low_weights() {
        let v = build_virasoro_voa(frac(1, 2), 4).unwrap();
        assert_eq!(v.dim(0), 1);
        assert_eq!(v.dim(1), 0);
        assert!(build_virasoro_voa(frac(1, 2), 1).is_err());
    }

    #[test]
    fn lowering_and_grading() {
        let voa = build_virasoro_voa(lee_yang(), 6).unwrap();
        let h = frac(3, 7);
        let m = build_module(&voa, h.clone(), 6, ModuleKind::Verma);
        // L(1) L(-2) w = 3 L(-1) w
        let v = m.act_lie_mode(1, &ModVec::basis(Word::new(&[2]))).unwrap();
        assert_eq!(v, ModVec::term(Word::new(&[1]), int(3)));
        for d in 0..=4 {
            for w in m.basis(d) {
                let v = m.act_lie_mode(0, &ModVec::basis(w.clone())).unwrap();
                assert_eq!(v, ModVec::term(w.clone(), &h + int(d as i64)));
            }
        }
        // L(2) L(-2) 1 = c/2 1
        let omega = voa.word_vector(&[2]).unwrap();
        let v = voa.adjoint().act_lie_mode(2, &omega).unwrap();
        assert_eq!(v, ModVec::term(Word::empty(), lee_yang() / int(2)));
    }

    #[test]
    fn out_of_window_is_reported() {
        let voa = build_virasoro_voa(lee_yang(), 4).unwrap();
        let m = build_module(&voa, frac(-1, 5), 3, ModuleKind::SimpleQuotient);
        let err = m.act_lie_mode(-4, &m.generator()).unwrap_err();
        assert_eq!(err, Error::OutOfWindow { depth: 4, w_max: 3 });
    }

    #[test]
    fn gram_small_depths() {
        let voa = build_virasoro_voa(lee_yang(), 4).unwrap();
        let h = frac(2, 3);
        let m = build_module(&voa, h.clone(), 3, ModuleKind::Verma);
        assert_eq!(m.gram_matrix(0).to_dense(), vec![vec![int(1)]]);
        assert_eq!(m.gram_matrix(1).to_dense(), vec![vec![int(2) * &h]]);
        assert!(m.gram_matrix(3).is_symmetric());
    }

    #[test]
    fn descriptor_serializes_rationals_as_strings() {
        let voa = build_virasoro_voa(lee_yang(), 4).unwrap();
        let json = serde_json::to_string(&voa.descriptor()).unwrap();
        assert!(json.contains("\"central_charge\":\"-22/5\""), "{json}");
        let back: ModelDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(back, voa.descriptor());
    }
}
