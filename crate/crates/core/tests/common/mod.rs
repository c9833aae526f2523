//! Reference implementations used as oracles. Nothing here calls into the
//! library's algebra: vectors are plain maps from PBW words to rationals.
#![allow(dead_code)]

use std::collections::BTreeMap;

use c2span::scalar::{frac, int};
use c2span::Scalar;
use num_traits::{One, Zero};

/// Parts `n1 >= n2 >= ..` of `L(-n1) L(-n2) .. w`.
pub type Pbw = Vec<i64>;
pub type Vect = BTreeMap<Pbw, Scalar>;

fn add(into: &mut Vect, from: &Vect, c: &Scalar) {
    for (w, x) in from {
        let e = into.entry(w.clone()).or_insert_with(Scalar::zero);
        *e += x * c;
        if e.is_zero() {
            into.remove(w);
        }
    }
}

/// Verma module of the Virasoro algebra, or the vacuum module `M(c, 0) / <L(-1) 1>`.
pub struct NaiveVerma {
    pub c: Scalar,
    pub h: Scalar,
    pub vacuum: bool,
}

impl NaiveVerma {
    pub fn new(c: Scalar, h: Scalar) -> Self {
        Self { c, h, vacuum: false }
    }

    pub fn vacuum(c: Scalar) -> Self {
        Self { c, h: Scalar::zero(), vacuum: true }
    }

    pub fn act(&self, k: i64, w: &[i64]) -> Vect {
        let mut out = Vect::new();
        if w.is_empty() {
            if k > 0 || (self.vacuum && k == -1) {
                return out;
            }
            if k == 0 {
                if !self.h.is_zero() {
                    out.insert(vec![], self.h.clone());
                }
                return out;
            }
            out.insert(vec![-k], Scalar::one());
            return out;
        }
        let m = w[0];
        let rest = &w[1..];
        if k < 0 && -k >= m {
            let mut p = vec![-k];
            p.extend_from_slice(w);
            out.insert(p, Scalar::one());
            return out;
        }
        // L(k) L(-m) = L(-m) L(k) + (k + m) L(k - m) + c/12 (k^3 - k) [k = m]
        for (v, x) in self.act(k, rest) {
            add(&mut out, &self.act(-m, &v), &x);
        }
        if k + m != 0 {
            add(&mut out, &self.act(k - m, rest), &int(k + m));
        }
        if k == m {
            let mut r = Vect::new();
            r.insert(rest.to_vec(), Scalar::one());
            add(&mut out, &r, &(&self.c * frac(k * k * k - k, 12)));
        }
        out
    }

    pub fn act_vec(&self, k: i64, v: &Vect) -> Vect {
        let mut out = Vect::new();
        for (w, x) in v {
            add(&mut out, &self.act(k, w), x);
        }
        out
    }

    pub fn words(&self, d: i64) -> Vec<Pbw> {
        partitions(d, if self.vacuum { 2 } else { 1 })
    }

    /// Contravariant form `<u, v>` with `L(n)^* = L(-n)` and `<w, w> = 1`.
    pub fn form(&self, u: &[i64], v: &[i64]) -> Scalar {
        let mut cur = Vect::new();
        cur.insert(v.to_vec(), Scalar::one());
        for &n in u {
            cur = self.act_vec(n, &cur);
        }
        cur.get(&Vec::new()).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn gram(&self, d: i64) -> Vec<Vec<Scalar>> {
        let ws = self.words(d);
        ws.iter().map(|u| ws.iter().map(|v| self.form(u, v)).collect()).collect()
    }
}

/// Partitions of `d` into parts `>= min`, parts nonincreasing.
pub fn partitions(d: i64, min: i64) -> Vec<Pbw> {
    fn go(left: i64, max: i64, min: i64, cur: &mut Pbw, out: &mut Vec<Pbw>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (min..=max.min(left)).rev() {
            cur.push(p);
            go(left - p, p, min, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(d, d, min, &mut Vec::new(), &mut out);
    out
}

/// Rank by plain Gaussian elimination.
pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for j in c..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

/// Coefficients of `prod_{n >= 1, n mod 5 in residues} 1 / (1 - q^n)` up to `q^top`.
pub fn product_series(residues: &[i64], top: usize) -> Vec<usize> {
    let mut s = vec![0usize; top + 1];
    s[0] = 1;
    for n in 1..=top {
        if !residues.contains(&((n % 5) as i64)) {
            continue;
        }
        for i in n..=top {
            s[i] += s[i - n];
        }
    }
    s
}

/// `dim V(d) / C_2(V) ∩ V(d)` for the simple Virasoro VOA: `C_2` of the
/// universal algebra is spanned by words with a part `>= 3`, and passing to
/// the simple quotient divides out the radical of the form.
pub fn c2_codim(c: &Scalar, d: i64) -> usize {
    if d == 0 {
        return 1;
    }
    let v = NaiveVerma::vacuum(c.clone());
    let g = v.gram(d);
    let words = v.words(d);
    let rows: Vec<Vec<Scalar>> =
        words.iter().zip(&g).filter(|(w, _)| w.iter().any(|&p| p >= 3)).map(|(_, r)| r.clone()).collect();
    rank(&g) - rank(&rows)
}
