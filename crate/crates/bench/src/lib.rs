//! Shared fixtures for the benchmarks.

use c2span::scalar::frac;
use c2span::{build_module, build_virasoro_voa, compute_constants, CofiniteData, ModuleKind, ModuleModel, VoaModel};

/// The Lee-Yang algebra at window `w` with its constants and the module `h = -1/5` at depth `d`.
pub fn lee_yang(w: usize, d: usize) -> (VoaModel, CofiniteData, ModuleModel) {
    let voa = build_virasoro_voa(frac(-22, 5), w).expect("window builds");
    let data = compute_constants(&voa).expect("Lee-Yang is cofinite");
    let module = build_module(&voa, frac(-1, 5), d, ModuleKind::SimpleQuotient);
    (voa, data, module)
}
