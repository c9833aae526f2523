//! The products `u ∘_n w`, their span `O_n(M)` inside a depth window, and
//! windowed dimension estimates for `A_n(M) = M / O_n(M)`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cofinite::{basis_ids, CofiniteData};
use crate::error::{Error, Result};
use crate::linalg::{EchelonBasis, Vector};
use crate::scalar::{binomial_q, factorial, fmt_scalar, int, Scalar};
use crate::virasoro::{ModVec, ModuleKind, ModuleModel, VoaModel};

/// `u ∘_n w = sum_{j >= 0} C(wt(u) + n, j) u_{j-2n-2} w` for a homogeneous VOA vector `u`.
pub fn circ_n(module: &ModuleModel, u: &ModVec, wt_u: usize, w: &ModVec, n: usize) -> Result<ModVec> {
    let top = wt_u + n;
    let mut out = ModVec::zero();
    for j in 0..=top {
        let idx = j as i64 - 2 * n as i64 - 2;
        out.add_scaled(&module.vertex_mode(u, idx, w)?, &binomial_q(top as i64, j as u64));
    }
    Ok(out)
}

/// Coordinates of a vector of `M_{<= w}` in the concatenated graded bases.
fn window_coordinates(module: &ModuleModel, v: &ModVec, w: usize) -> Vector {
    let mut out = Vec::new();
    for d in 0..=w {
        out.extend(module.coordinates(&v.component(d), d));
    }
    out
}

fn window_dim(module: &ModuleModel, w: usize) -> usize {
    (0..=w).map(|d| module.dim(d)).sum()
}

/// Echelon basis of the span of `u ∘_n m` over graded basis vectors `u`, `m`
/// whose top component `wt(u) + depth(m) + 2n + 1` lies at depth `<= w`.
pub fn on_span(voa: &VoaModel, module: &ModuleModel, n: usize, w: usize) -> Result<EchelonBasis> {
    if w > module.w_max() {
        return Err(Error::WindowTooSmall(format!("depth {w} exceeds the module window {}", module.w_max())));
    }
    let mut ech = EchelonBasis::new(window_dim(module, w));
    let Some(room) = w.checked_sub(2 * n + 1) else { return Ok(ech) };
    for wu in 0..=room.min(voa.w_max()) {
        for u in basis_ids(voa, wu)? {
            let uv = voa.vector(u);
            for dm in 0..=(room - wu) {
                for m in module.basis_vectors(dm) {
                    let v = circ_n(module, &uv, wu, &m, n)?;
                    ech.insert(&window_coordinates(module, &v, w));
                }
            }
        }
    }
    Ok(ech)
}

/// Depth from which every spanning element is reducible modulo `O_n(M)`:
/// elements whose leading index is `<= -(2n + 2)` reduce, so representatives
/// use negative indices in `-(2n + 1)..=-1` only, each once, and nonnegative
/// indices below `L` at most `Q - 1` times each.
pub fn representative_threshold(voa: &VoaModel, data: &CofiniteData, l: usize, n: usize) -> usize {
    let weights: Vec<i64> = data.x.iter().map(|&x| voa.weight(x) as i64).collect();
    let best = |f: &dyn Fn(i64) -> i64| weights.iter().map(|&w| f(w)).max().unwrap_or(0).max(0);
    let mut bound = 0;
    for k in 1..=(2 * n as i64 + 1) {
        bound += best(&|w| w + k - 1);
    }
    for j in 0..l as i64 {
        bound += (data.q as i64 - 1) * best(&|w| w - j - 1);
    }
    bound as usize + 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZhuReport {
    pub schema: String,
    pub central_charge: String,
    pub lowest_weight: String,
    pub n: usize,
    pub schedule: Vec<usize>,
    /// `dim M_{<= W} - dim (O_n(M) ∩ window)` per scheduled `W`; each an upper bound.
    pub dims: Vec<usize>,
    pub representative_threshold: usize,
    pub stabilized: bool,
    pub value: Option<usize>,
}

/// Windowed estimate of `dim A_n(M)` with stabilization detection.
pub fn an_dim_estimate(
    voa: &VoaModel,
    module: &ModuleModel,
    data: &CofiniteData,
    l: usize,
    n: usize,
    schedule: &[usize],
) -> Result<ZhuReport> {
    if module.kind() != ModuleKind::SimpleQuotient {
        return Err(Error::PreconditionViolation("dimension estimates need an irreducible module".into()));
    }
    if schedule.is_empty() || schedule.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::PreconditionViolation("schedule must be nonempty and increasing".into()));
    }
    let dims: Vec<usize> = schedule
        .iter()
        .map(|&w| on_span(voa, module, n, w).map(|e| window_dim(module, w) - e.rank()))
        .collect::<Result<_>>()?;
    let threshold = representative_threshold(voa, data, l, n);
    let max_w = *schedule.last().expect("nonempty");
    let settled = dims.len() >= 3 && dims[dims.len() - 3..].iter().all(|&d| d == dims[dims.len() - 1]);
    let stabilized = settled && threshold < max_w;
    Ok(ZhuReport {
        schema: "c2span.zhu/1".into(),
        central_charge: fmt_scalar(voa.central_charge()),
        lowest_weight: fmt_scalar(module.lowest_weight()),
        n,
        schedule: schedule.to_vec(),
        value: stabilized.then(|| dims[dims.len() - 1]),
        dims,
        representative_threshold: threshold,
        stabilized,
    })
}

/// `(L(-1) v)_{-k} t - k v_{-k-1} t`, zero for every VOA vector `v`.
pub fn shift_identity_residual(voa: &VoaModel, module: &ModuleModel, v: &ModVec, k: i64, t: &ModVec) -> Result<ModVec> {
    let dv = voa.adjoint().act_lie_mode(-1, v)?;
    let lhs = module.vertex_mode(&dv, -k, t)?;
    let rhs = module.vertex_mode(v, -k - 1, t)?;
    Ok(lhs.sub(&rhs.scaled(&int(k))))
}

/// Replays the reduction of a leading mode `x_{-m}` with `m >= 2n + 2`:
/// with `s = m - 2n - 2` and `y = (2n+1)!/(2n+1+s)! L(-1)^s x`,
/// `x_{-m} r = y ∘_n r - sum_{j >= 1} C(wt(y) + n, j) y_{j-2n-2} r`.
/// Returns the difference of the two sides.
pub fn reduction_residual(
    voa: &VoaModel,
    module: &ModuleModel,
    x: &ModVec,
    wt_x: usize,
    m: usize,
    n: usize,
    r: &ModVec,
) -> Result<ModVec> {
    if m < 2 * n + 2 {
        return Err(Error::Inapplicable { rule: "reduction", reason: format!("leading index -{m} is above -{}", 2 * n + 2) });
    }
    let s = m - 2 * n - 2;
    let mut y = x.clone();
    for _ in 0..s {
        y = voa.adjoint().act_lie_mode(-1, &y)?;
    }
    let y = y.scaled(&(Scalar::from(factorial(2 * n as u64 + 1)) / Scalar::from(factorial((2 * n + 1 + s) as u64))));
    let wt_y = wt_x + s;
    let mut rhs = circ_n(module, &y, wt_y, r, n)?;
    for j in 1..=(wt_y + n) {
        let c = binomial_q((wt_y + n) as i64, j as u64);
        if c.is_zero() {
            continue;
        }
        rhs = rhs.sub(&module.vertex_mode(&y, j as i64 - 2 * n as i64 - 2, r)?.scaled(&c));
    }
    let lhs = module.vertex_mode(x, -(m as i64), r)?;
    Ok(lhs.sub(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cofinite::compute_constants;
    use crate::scalar::frac;
    use crate::virasoro::{build_module, build_virasoro_voa, Word};

    #[test]
    fn vacuum_circ_vanishes() {
        let voa = build_virasoro_voa(frac(-22, 5), 6).unwrap();
        let m = build_module(&voa, frac(-1, 5), 6, ModuleKind::SimpleQuotient);
        let one = ModVec::basis(Word::empty());
        for n in 0..3 {
            assert!(circ_n(&m, &one, 0, &m.generator(), n).unwrap().is_zero());
        }
    }

    #[test]
    fn omega_circ_on_generator() {
        let voa = build_virasoro_voa(frac(-22, 5), 6).unwrap();
        let m = build_module(&voa, frac(-1, 5), 6, ModuleKind::SimpleQuotient);
        let om = voa.vector(voa.omega());
        let got = circ_n(&m, &om, 2, &m.generator(), 0).unwrap();
        let g = m.generator();
        let mut want = m.act_lie_mode(-3, &g).unwrap();
        want.add_scaled(&m.act_lie_mode(-2, &g).unwrap(), &int(2));
        want.add_scaled(&m.act_lie_mode(-1, &g).unwrap(), &int(1));
        assert_eq!(got, want);
    }

    #[test]
    fn tiny_window_keeps_generator() {
        let voa = build_virasoro_voa(frac(-22, 5), 6).unwrap();
        let data = compute_constants(&voa).unwrap();
        let m = build_module(&voa, frac(-1, 5), 6, ModuleKind::SimpleQuotient);
        assert_eq!(on_span(&voa, &m, 0, 0).unwrap().rank(), 0);
        let r = an_dim_estimate(&voa, &m, &data, 2, 0, &[0]).unwrap();
        assert_eq!(r.dims, vec![1]);
        assert!(!r.stabilized);
    }

    #[test]
    fn verma_modules_are_rejected() {
        let voa = build_virasoro_voa(frac(-22, 5), 6).unwrap();
        let data = compute_constants(&voa).unwrap();
        let m = build_module(&voa, frac(-1, 5), 4, ModuleKind::Verma);
        assert!(matches!(an_dim_estimate(&voa, &m, &data, 2, 0, &[2, 3, 4]), Err(Error::PreconditionViolation(_))));
    }
}
