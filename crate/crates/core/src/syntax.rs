//! Text form of mode-word expressions.
//!
//! ```text
//! expr  := "0" | ["-"] term (("+" | "-") term)*
//! term  := [rational ["*"]] op* ket
//! op    := ("w" | "L" | "1" | "v{" int ("," int)* "}") "[" int "]"
//! ket   := "|0>" | "|h>" | "|w>"
//! ```
//!
//! `w[n]` is the mode `omega_n`, `L[n]` the Virasoro mode `L(n) = omega_{n+1}`,
//! `1[n]` a mode of the vacuum and `v{-3,-2}[n]` a mode of `L(-3) L(-2) 1`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::modes::{Base, Expression, ModeOp, ModeWord, VecId};
use crate::scalar::{fmt_scalar, parse_scalar, Scalar};
use crate::virasoro::{ModVec, VoaModel, Word};

struct Lexer<'s> {
    src: &'s str,
    pos: usize,
}

impl<'s> Lexer<'s> {
    fn rest(&self) -> &'s str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let r = self.rest();
        self.pos += r.len() - r.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {s:?}")))
        }
    }

    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in {:?}", self.pos, self.src))
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let r = self.rest();
        let len = r
            .char_indices()
            .take_while(|&(i, c)| c.is_ascii_digit() || (i == 0 && (c == '-' || c == '+')))
            .count();
        let tok = &r[..len];
        let v = tok.parse::<i64>().map_err(|_| self.error("expected an integer"))?;
        self.pos += len;
        Ok(v)
    }

    /// A rational coefficient, if one starts here.
    fn coefficient(&mut self) -> Result<Option<Scalar>> {
        self.skip_ws();
        let r = self.rest();
        let len = r.chars().take_while(|c| c.is_ascii_digit() || *c == '/').count();
        if len == 0 || r[len..].trim_start().starts_with('[') {
            return Ok(None);
        }
        let c = parse_scalar(&r[..len])?;
        self.pos += len;
        self.eat("*");
        Ok(Some(c))
    }
}

/// Interns `L(p1) L(p2) .. 1` (indices as written, applied right to left).
fn vacuum_word_vector(voa: &VoaModel, parts: &[i64]) -> Result<(VecId, Scalar)> {
    let adj = voa.adjoint();
    let mut v = ModVec::basis(Word::empty());
    for &p in parts.iter().rev() {
        if p >= 0 {
            return Err(Error::Parse(format!("vector labels use negative Virasoro modes, got {p}")));
        }
        v = adj.act_lie_mode(p, &v)?;
    }
    let wt = parts.iter().map(|p| -p).sum::<i64>() as usize;
    voa.intern(&v)?.ok_or_else(|| Error::Parse(format!("vector v{parts:?} is zero")))
        .map(|(id, c)| {
            debug_assert_eq!(voa.weight(id), wt);
            (id, c)
        })
}

/// Parses an expression, interning every mode label in `voa`.
pub fn parse_expression(voa: &VoaModel, src: &str) -> Result<Expression> {
    let mut lx = Lexer { src, pos: 0 };
    let mut out = Expression::zero();
    if src.trim() == "0" {
        return Ok(out);
    }
    let mut sign = Scalar::one();
    if lx.eat("-") {
        sign = -sign;
    } else {
        lx.eat("+");
    }
    loop {
        let mut coef = lx.coefficient()?.unwrap_or_else(Scalar::one) * &sign;
        let mut ops = Vec::new();
        let base = loop {
            if lx.eat("|0>") {
                break Base::Vacuum;
            }
            if lx.eat("|h>") || lx.eat("|w>") {
                break Base::Generator;
            }
            let (id, shift) = if lx.eat("v{") {
                let mut parts = vec![lx.int()?];
                while lx.eat(",") {
                    parts.push(lx.int()?);
                }
                lx.expect("}")?;
                let (id, c) = vacuum_word_vector(voa, &parts)?;
                coef *= c;
                (id, 0)
            } else if lx.eat("w") {
                (voa.omega(), 0)
            } else if lx.eat("L") {
                (voa.omega(), 1)
            } else if lx.eat("1") {
                (voa.vacuum(), 0)
            } else {
                return Err(lx.error("expected a mode or a ket"));
            };
            lx.expect("[")?;
            let n = lx.int()?;
            lx.expect("]")?;
            ops.push(ModeOp::new(id, n + shift));
        };
        out.push(voa, ModeWord::new(&ops, base), coef);
        match lx.peek() {
            None => break,
            Some('+') => {
                lx.eat("+");
                sign = Scalar::one();
            }
            Some('-') => {
                lx.eat("-");
                sign = -Scalar::one();
            }
            Some(_) => return Err(lx.error("expected '+', '-' or end of input")),
        }
    }
    Ok(out)
}

/// Name of a mode label for printing.
pub fn label(voa: &VoaModel, id: VecId) -> String {
    if id == voa.omega() {
        return "w".into();
    }
    if id == voa.vacuum() {
        return "1".into();
    }
    let v = voa.vector(id);
    match v.terms().collect::<Vec<_>>().as_slice() {
        [(w, c)] if c.is_one() => {
            let parts: Vec<String> = w.parts().iter().map(|p| format!("-{p}")).collect();
            format!("v{{{}}}", parts.join(","))
        }
        _ => format!("u{}", id.0),
    }
}

pub fn format_word(voa: &VoaModel, w: &ModeWord) -> String {
    let mut s: Vec<String> = w.ops.iter().map(|o| format!("{}[{}]", label(voa, o.vec), o.index)).collect();
    s.push(match w.base {
        Base::Vacuum => "|0>".into(),
        Base::Generator => "|h>".into(),
    });
    s.join(" ")
}

/// Prints an expression in the syntax accepted by [`parse_expression`]
/// (labels of non-monomial vectors print as `u<id>` and do not parse back).
pub fn format_expression(voa: &VoaModel, e: &Expression) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (w, c)) in e.terms().enumerate() {
        let neg = c < &Scalar::zero();
        let mag = if neg { -c.clone() } else { c.clone() };
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if !mag.is_one() {
            out.push_str(&fmt_scalar(&mag));
            out.push_str(" * ");
        }
        out.push_str(&format_word(voa, w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};
    use crate::virasoro::build_virasoro_voa;

    #[test]
    fn parses_examples() {
        let voa = build_virasoro_voa(frac(-22, 5), 8).unwrap();
        let om = voa.omega();
        let e = parse_expression(&voa, "w[-1] w[-1] w[-1] w[-1] |0>").unwrap();
        assert_eq!(e, Expression::word(ModeWord::new(&[ModeOp::new(om, -1); 4], Base::Vacuum)));
        let e = parse_expression(&voa, "L[-2] |h>").unwrap();
        assert_eq!(e, Expression::word(ModeWord::new(&[ModeOp::new(om, -1)], Base::Generator)));
        let e = parse_expression(&voa, "3/5 * w[-2] |h> - w[0] |h>").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.coeff(&ModeWord::new(&[ModeOp::new(om, 0)], Base::Generator)), int(-1));
        // identity modes of the vacuum drop out
        let e = parse_expression(&voa, "1[-1] w[-3] |0>").unwrap();
        assert_eq!(e, Expression::word(ModeWord::new(&[ModeOp::new(om, -3)], Base::Vacuum)));
        // L(-2) 1 is omega
        let e = parse_expression(&voa, "v{-2}[-1] |0>").unwrap();
        assert_eq!(e, Expression::word(ModeWord::new(&[ModeOp::new(om, -1)], Base::Vacuum)));
    }

    #[test]
    fn round_trip() {
        let voa = build_virasoro_voa(frac(-22, 5), 8).unwrap();
        for src in ["0", "w[-1] w[-1] |0>", "-2/3 * w[-2] v{-3}[0] |h> + w[1] |h>", "v{-2,-2}[-3] |h>"] {
            let e = parse_expression(&voa, src).unwrap();
            let back = parse_expression(&voa, &format_expression(&voa, &e)).unwrap();
            assert_eq!(e, back, "{src}");
        }
    }

    #[test]
    fn rejects_garbage() {
        let voa = build_virasoro_voa(frac(-22, 5), 8).unwrap();
        for src in ["", "w[-1]", "x[1] |h>", "w[-1 |h>", "w[-1] |h> w"] {
            assert!(matches!(parse_expression(&voa, src), Err(Error::Parse(_))), "{src}");
        }
    }
}
