//! Assembly and stepping cost against `N`.

use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::commutant::{maximally_mixed, symmetric_basis_state};
use crate::error::Result;
use crate::evolve::rk4_step;
use crate::model::{Channel, Grid, HamiltonianTerm, InitialState, Matrix, Method, ModelSpec, Output, Scope};
use crate::pparticle::{assemble_p, CMat};
use crate::schedule::Schedule;

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    #[serde(rename = "N")]
    pub n: u32,
    pub d: usize,
    pub commutant_dim: usize,
    /// `d^{2N}`, the Liouville-space dimension without symmetry; `None` past `u128`.
    pub full_dim: Option<u128>,
    pub nnz: usize,
    pub assembly_ms: f64,
    pub step_ms: f64,
}

/// Lowering operator `Σ_k |k⟩⟨k+1|`.
pub fn lowering(d: usize) -> CMat {
    CMat::from_fn(d, d, |r, c| C64::new(if c == r + 1 { 1.0 } else { 0.0 }, 0.0))
}

/// Collective decay with `H = Σ_k k |k⟩⟨k|`, optionally with local dephasing.
pub fn bench_model(n: u32, d: usize, local: bool) -> ModelSpec {
    let h = CMat::from_fn(d, d, |r, c| C64::new(if r == c { r as f64 } else { 0.0 }, 0.0));
    let mut channels =
        vec![Channel { scope: Scope::Collective, p: 1, jump: Matrix::from_cmat(&lowering(d)), rate: Schedule::constant(1.0) }];
    if local {
        channels.push(Channel { scope: Scope::Local, p: 1, jump: Matrix::from_cmat(&h), rate: Schedule::constant(0.1) });
    }
    ModelSpec {
        version: 1,
        n,
        d,
        hamiltonian: vec![HamiltonianTerm { matrix: Matrix::from_cmat(&h), p: 1, schedule: Schedule::default() }],
        channels,
        initial_state: InitialState::MaximallyMixed,
        observables: Vec::new(),
        grid: Grid { t0: 0.0, t1: 1.0, dt: Some(1e-3), method: Method::Rk4, atol: 1e-10, rtol: 1e-8, dt_min: 1e-12 },
        output: Output::default(),
    }
}

/// Assembles [`bench_model`] and times `steps` RK4 steps from the fully
/// excited symmetric state (maximally mixed when `d = 1`).
pub fn bench_point(n: u32, d: usize, local: bool, steps: usize) -> Result<BenchRow> {
    let spec = bench_model(n, d, local);
    let index = spec.index()?;
    let start = Instant::now();
    let m = assemble_p(&spec, &index)?;
    let assembly_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut content = vec![0u32; d];
    content[d - 1] = n;
    let rho = if d > 1 { symmetric_basis_state(&index, &content)? } else { maximally_mixed(&index) };
    let mut y = rho.data;
    let z = vec![C64::new(0.0, 0.0); y.len()];
    let mut work = [z.clone(), z.clone(), z];
    let steps = steps.max(1);
    let start = Instant::now();
    for s in 0..steps {
        rk4_step(&m, &mut y, s as f64 * 1e-3, 1e-3, &mut work)?;
    }
    let step_ms = start.elapsed().as_secs_f64() * 1e3 / steps as f64;
    let full_dim = (d as u128).checked_pow(2 * n);
    Ok(BenchRow { n, d, commutant_dim: index.dim, full_dim, nnz: m.nnz(), assembly_ms, step_ms })
}

pub fn bench(d: usize, n_min: u32, n_max: u32, local: bool, steps: usize) -> Result<Vec<BenchRow>> {
    (n_min..=n_max).map(|n| bench_point(n, d, local, steps)).collect()
}
