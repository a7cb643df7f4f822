//! Brute-force reference on the full `d^N`-dimensional space.
//!
//! Operators are sparse, the density matrix is dense row-major. Basis state
//! `b = Σ_k s_k d^{N−k}` lists qudit 1 first.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::commutant::{collective_components, PiOperator};
use crate::error::{Error, Result};
use crate::evolve::{fixed_steps, rk4_step};
use crate::model::{
    Channel, Entry, Grid, HamiltonianTerm, InitialState, Matrix, Method, ModelSpec, ObservableSpec, Output, Scope,
};
use crate::pparticle::{assemble_p, CMat};
use crate::schedule::Schedule;
use crate::sparse::Csr;
use crate::tableaux::{binomial, partitions_of, swt_basis, syt_count, Partition};

/// Default cap on `d^N`.
pub const DEFAULT_FULL_CAP: u128 = 4096;
/// Fixed step used when the model grid has none.
pub const DEFAULT_DT: f64 = 0.01;

/// Ordered tuples `n_1 < … < n_p` of sites `0..n`.
pub fn tuples(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(p);
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for s in start..n {
            cur.push(s);
            rec(s + 1, n, p, cur, out);
            cur.pop();
        }
    }
    rec(0, n, p, &mut cur, &mut out);
    out
}

fn digits(mut b: usize, n: usize, d: usize) -> Vec<usize> {
    let mut v = vec![0; n];
    for k in (0..n).rev() {
        v[k] = b % d;
        b /= d;
    }
    v
}

fn join(v: &[usize], d: usize) -> usize {
    v.iter().fold(0, |a, &x| a * d + x)
}

/// `x` acting on `sites` (in order), identity elsewhere.
pub fn embed(x: &CMat, sites: &[usize], n: usize, d: usize) -> Csr {
    let dim = d.pow(n as u32);
    let mut t = Vec::new();
    for b in 0..dim {
        let mut v = digits(b, n, d);
        let col = join(&sites.iter().map(|&s| v[s]).collect::<Vec<_>>(), d);
        for row in 0..x.nrows() {
            let val = x[(row, col)];
            if val == C64::new(0.0, 0.0) {
                continue;
            }
            let sub = digits(row, sites.len(), d);
            for (k, &s) in sites.iter().enumerate() {
                v[s] = sub[k];
            }
            t.push((join(&v, d), b, val));
        }
    }
    Csr::from_triplets(dim, dim, t)
}

/// `Σ_{n_1<…<n_p} x^{(n_1…n_p)}`.
pub fn embed_collective(x: &CMat, p: usize, n: usize, d: usize) -> Csr {
    let dim = d.pow(n as u32);
    let t = tuples(n, p).iter().flat_map(|s| embed(x, s, n, d).iter().collect::<Vec<_>>()).collect();
    Csr::from_triplets(dim, dim, t)
}

/// Swap of sites `k` and `k + 1` as a basis map.
fn swap_map(k: usize, n: usize, d: usize) -> Vec<usize> {
    (0..d.pow(n as u32))
        .map(|b| {
            let mut v = digits(b, n, d);
            v.swap(k, k + 1);
            join(&v, d)
        })
        .collect()
}

fn is_permutation_invariant(op: &Csr, n: usize, d: usize) -> bool {
    let scale = op.max_abs().max(1.0);
    (0..n.saturating_sub(1)).all(|k| {
        let map = swap_map(k, n, d);
        op.iter().all(|(r, c, v)| (op.get(map[r], map[c]) - v).norm() <= 1e-12 * scale)
    })
}

fn dense_is_pi(rho: &[C64], n: usize, d: usize) -> bool {
    let dim = d.pow(n as u32);
    (0..n.saturating_sub(1)).all(|k| {
        let map = swap_map(k, n, d);
        (0..dim).all(|r| (0..dim).all(|c| (rho[map[r] * dim + map[c]] - rho[r * dim + c]).norm() <= 1e-12))
    })
}

pub struct FullChannel {
    pub rate: Schedule,
    pub ops: Vec<Csr>,
    pub ldl: Vec<Csr>,
}

pub struct FullModel {
    pub n: usize,
    pub d: usize,
    pub dim: usize,
    pub hamiltonian: Vec<(Schedule, Csr)>,
    pub channels: Vec<FullChannel>,
    pub rho0: Vec<C64>,
}

fn pure_density(psi: &[C64]) -> Vec<C64> {
    psi.iter().flat_map(|a| psi.iter().map(move |b| a * b.conj())).collect()
}

fn dicke_vector(content: &[u32], n: usize, d: usize) -> Vec<C64> {
    let dim = d.pow(n as u32);
    let mut psi: Vec<C64> = (0..dim)
        .map(|b| {
            let v = digits(b, n, d);
            let ok = (0..d).all(|k| v.iter().filter(|&&x| x == k).count() == content[k] as usize);
            C64::new(if ok { 1.0 } else { 0.0 }, 0.0)
        })
        .collect();
    let norm = psi.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|x| *x /= norm);
    psi
}

fn full_state(s: &InitialState, n: usize, d: usize) -> Result<Vec<C64>> {
    let dim = d.pow(n as u32);
    match s {
        InitialState::MaximallyMixed => {
            let mut rho = vec![C64::new(0.0, 0.0); dim * dim];
            (0..dim).for_each(|i| rho[i * dim + i] = C64::new(1.0 / dim as f64, 0.0));
            Ok(rho)
        }
        InitialState::PureProduct { amplitudes } => {
            let amp: Vec<C64> = amplitudes.iter().map(|a| a.value()).collect();
            let psi: Vec<C64> = (0..dim).map(|b| digits(b, n, d).iter().map(|&k| amp[k]).product()).collect();
            Ok(pure_density(&psi))
        }
        InitialState::SymmetricBasisState { content } => Ok(pure_density(&dicke_vector(content, n, d))),
        InitialState::Components { entries } => {
            let top = Partition::new(vec![n as u32])?;
            let mut rho = vec![C64::new(0.0, 0.0); dim * dim];
            for e in entries {
                if Partition::new(e.nu.clone())? != top {
                    return Err(Error::Unsupported(format!(
                        "explicit components outside the symmetric block {top} have no full-space reference"
                    )));
                }
                let w = crate::tableaux::GtPattern::from_rows(&e.w)?;
                let w2 = crate::tableaux::GtPattern::from_rows(&e.w_prime)?;
                let (a, b) = (dicke_vector(&w.content(), n, d), dicke_vector(&w2.content(), n, d));
                let v = e.value.value();
                for i in 0..dim {
                    for j in 0..dim {
                        rho[i * dim + j] += v * a[i] * b[j].conj();
                    }
                }
            }
            Ok(rho)
        }
        InitialState::Mixture { weights, states } => {
            let mut rho = vec![C64::new(0.0, 0.0); dim * dim];
            for (w, st) in weights.iter().zip(states) {
                for (r, x) in rho.iter_mut().zip(full_state(st, n, d)?) {
                    *r += x * *w;
                }
            }
            Ok(rho)
        }
    }
}

/// Full-space model with the default size cap.
pub fn build_full(spec: &ModelSpec) -> Result<FullModel> {
    build_full_with_cap(spec, DEFAULT_FULL_CAP)
}

pub fn build_full_with_cap(spec: &ModelSpec, cap: u128) -> Result<FullModel> {
    spec.validate()?;
    let (n, d) = (spec.n as usize, spec.d);
    let dim = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if dim > cap {
        return Err(Error::ResourceCap { what: "full Hilbert-space dimension", value: dim, cap });
    }
    let dim = dim as usize;
    let check_pi = n <= 6;
    let hamiltonian: Vec<(Schedule, Csr)> =
        spec.hamiltonian.iter().map(|h| (h.schedule.clone(), embed_collective(&h.matrix.to_cmat(), h.p, n, d))).collect();
    let mut channels = Vec::new();
    for c in &spec.channels {
        let x = c.jump.to_cmat();
        let ops = match c.scope {
            Scope::Local => tuples(n, c.p).iter().map(|s| embed(&x, s, n, d)).collect(),
            Scope::Collective => vec![embed_collective(&x, c.p, n, d)],
        };
        let ldl: Vec<Csr> = ops.iter().map(|o: &Csr| o.adjoint().matmul(o)).collect();
        if check_pi {
            let sum = |v: &[Csr]| Csr::from_triplets(dim, dim, v.iter().flat_map(|o| o.iter().collect::<Vec<_>>()).collect());
            if !is_permutation_invariant(&sum(&ops), n, d) || !is_permutation_invariant(&sum(&ldl), n, d) {
                return Err(Error::Internal("embedded channel is not permutation invariant".into()));
            }
        }
        channels.push(FullChannel { rate: c.rate.clone(), ops, ldl });
    }
    if check_pi && hamiltonian.iter().any(|(_, h)| !is_permutation_invariant(h, n, d)) {
        return Err(Error::Internal("embedded Hamiltonian is not permutation invariant".into()));
    }
    let rho0 = full_state(&spec.initial_state, n, d)?;
    if check_pi && !dense_is_pi(&rho0, n, d) {
        return Err(Error::Internal("initial state is not permutation invariant".into()));
    }
    Ok(FullModel { n, d, dim, hamiltonian, channels, rho0 })
}

impl FullModel {
    pub fn rhs(&self, rho: &[C64], t: f64, out: &mut [C64]) -> Result<()> {
        let n = self.dim;
        out.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        let add = |out: &mut [C64], s: C64, x: &[C64]| out.iter_mut().zip(x).for_each(|(o, v)| *o += s * v);
        for (sched, h) in &self.hamiltonian {
            let s = sched.eval(t)?;
            add(out, C64::new(0.0, -s), &h.lmul(rho, n));
            add(out, C64::new(0.0, s), &h.rmul(rho, n));
        }
        for ch in &self.channels {
            let g = ch.rate.eval(t)?;
            for (l, ldl) in ch.ops.iter().zip(&ch.ldl) {
                add(out, C64::new(g, 0.0), &l.rmul_adj(&l.lmul(rho, n), n));
                add(out, C64::new(-0.5 * g, 0.0), &ldl.lmul(rho, n));
                add(out, C64::new(-0.5 * g, 0.0), &ldl.rmul(rho, n));
            }
        }
        Ok(())
    }

    pub fn trace(&self, rho: &[C64]) -> C64 {
        (0..self.dim).map(|i| rho[i * self.dim + i]).sum()
    }

    pub fn purity(&self, rho: &[C64]) -> f64 {
        let n = self.dim;
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| rho[i * n + j] * rho[j * n + i]).sum::<C64>().re
    }

    pub fn expectation(&self, x: &Csr, rho: &[C64]) -> C64 {
        x.iter().map(|(r, c, v)| v * rho[c * self.dim + r]).sum()
    }
}

/// Maximum deviations between the two pipelines. Each is divided by
/// `max(1, Σ|terms|)` of the full-space sum it compares against.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub n: u32,
    pub d: usize,
    pub steps: usize,
    pub trace: f64,
    pub purity: f64,
    pub observables: Vec<(String, f64)>,
}

impl Report {
    pub fn max_deviation(&self) -> f64 {
        self.observables.iter().map(|(_, v)| *v).fold(self.trace.max(self.purity), f64::max)
    }
}

/// `E^{ab} = |a⟩⟨b|` for all level pairs.
pub fn unit_matrices(d: usize) -> Vec<(String, CMat)> {
    let mut out = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let mut m = CMat::zeros(d, d);
            m[(a, b)] = C64::new(1.0, 0.0);
            out.push((format!("E{a}{b}"), m));
        }
    }
    out
}

/// Integrates both pipelines with fixed-step RK4 on the model grid and
/// compares trace, purity, every collective `E^{ab}` and each matrix observable.
pub fn full_evolve_compare(spec: &ModelSpec) -> Result<Report> {
    let full = build_full(spec)?;
    let index = spec.index()?;
    let m = assemble_p(spec, &index)?;
    let mut rho_c = spec.initial_components(&index)?.data;
    let mut rho_f = full.rho0.clone();
    let (n, d) = (full.n, full.d);

    let mut names = Vec::new();
    let mut comm_ops: Vec<PiOperator> = Vec::new();
    let mut full_ops: Vec<Csr> = Vec::new();
    for (name, x) in unit_matrices(d) {
        comm_ops.push(collective_components(&x, 1, &index)?);
        full_ops.push(embed_collective(&x, 1, n, d));
        names.push(name);
    }
    for o in &spec.observables {
        if let Some(mat) = &o.matrix {
            let x = mat.to_cmat();
            comm_ops.push(collective_components(&x, o.p, &index)?);
            full_ops.push(embed_collective(&x, o.p, n, d));
            names.push(o.name.clone());
        }
    }
    let mut report = Report {
        n: spec.n,
        d,
        steps: 0,
        trace: 0.0,
        purity: 0.0,
        observables: names.into_iter().map(|n| (n, 0.0)).collect(),
    };
    let compare = |rc: &[C64], rf: &[C64], report: &mut Report| -> Result<()> {
        let pc = PiOperator { index: Arc::clone(&index), data: rc.to_vec() };
        let dim = full.dim;
        let trace_scale = (0..dim).map(|i| rf[i * dim + i].norm()).sum::<f64>().max(1.0);
        report.trace = report.trace.max((pc.trace() - full.trace(rf)).norm() / trace_scale);
        let purity_scale = rf.iter().map(|x| x.norm_sqr()).sum::<f64>().max(1.0);
        report.purity = report.purity.max((pc.purity() - full.purity(rf)).abs() / purity_scale);
        for (k, (co, fo)) in comm_ops.iter().zip(&full_ops).enumerate() {
            let scale = fo.iter().map(|(r, c, v)| (v * rf[c * dim + r]).norm()).sum::<f64>().max(1.0);
            let dev = (co.expectation(&pc)? - full.expectation(fo, rf)).norm() / scale;
            report.observables[k].1 = report.observables[k].1.max(dev);
        }
        Ok(())
    };
    compare(&rho_c, &rho_f, &mut report)?;
    let g = &spec.grid;
    let span = g.t1 - g.t0;
    if span > 0.0 {
        let steps = fixed_steps(span, g.dt.unwrap_or(DEFAULT_DT));
        let h = span / steps as f64;
        let z = vec![C64::new(0.0, 0.0); rho_c.len()];
        let mut work = [z.clone(), z.clone(), z];
        let zf = vec![C64::new(0.0, 0.0); rho_f.len()];
        let (mut k, mut acc, mut tmp) = (zf.clone(), zf.clone(), zf);
        for s in 0..steps {
            let t = g.t0 + s as f64 * h;
            rk4_step(&m, &mut rho_c, t, h, &mut work)?;
            // same scheme on the full space
            acc.copy_from_slice(&rho_f);
            full.rhs(&rho_f, t, &mut k)?;
            acc.iter_mut().zip(&k).for_each(|(a, x)| *a += x * (h / 6.0));
            for (frac, weight) in [(0.5, 2.0), (0.5, 2.0), (1.0, 1.0)] {
                tmp.iter_mut().zip(rho_f.iter().zip(&k)).for_each(|(o, (r, x))| *o = r + x * (frac * h));
                full.rhs(&tmp, t + frac * h, &mut k)?;
                acc.iter_mut().zip(&k).for_each(|(a, x)| *a += x * (weight * h / 6.0));
            }
            rho_f.copy_from_slice(&acc);
            compare(&rho_c, &rho_f, &mut report)?;
        }
        report.steps = steps;
    }
    Ok(report)
}

/// One row of the dimension audit.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AuditRow {
    pub n: u32,
    pub d: usize,
    /// `Σ_ν f^ν(d)²`.
    pub commutant: u128,
    /// `binom(N + d² − 1, N)`.
    pub binomial: u128,
    /// `Σ_ν f^ν f^ν(d)`.
    pub hilbert: u128,
    /// `d^N`.
    pub d_pow_n: u128,
    pub ok: bool,
}

pub fn dimension_audit(n_max: u32, d_max: usize) -> Result<Vec<AuditRow>> {
    let mut rows = Vec::new();
    for d in 1..=d_max {
        for n in 1..=n_max {
            let (mut commutant, mut hilbert) = (0u128, 0u128);
            for nu in partitions_of(n, d) {
                let fd = swt_basis(&nu, d).len() as u128;
                commutant += fd * fd;
                hilbert += syt_count(&nu)? * fd;
            }
            let binomial = binomial((n as u64) + (d * d) as u64 - 1, n as u64)?;
            let d_pow_n = (d as u128).checked_pow(n).ok_or(Error::Overflow("d^N"))?;
            rows.push(AuditRow { n, d, commutant, binomial, hilbert, d_pow_n, ok: commutant == binomial && hilbert == d_pow_n });
        }
    }
    Ok(rows)
}

fn random_cmat(dim: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(dim, dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn hermitian(x: CMat) -> CMat {
    (&x + x.adjoint()) * C64::new(0.5, 0.0)
}

/// Average of `x` over all factor permutations.
pub fn symmetrize(x: &CMat, d: usize, p: usize) -> CMat {
    let dim = d.pow(p as u32);
    let perms = permutations(p);
    let mut out = CMat::zeros(dim, dim);
    for perm in &perms {
        let map: Vec<usize> = (0..dim)
            .map(|i| {
                let v = digits(i, p, d);
                join(&perm.iter().map(|&k| v[k]).collect::<Vec<_>>(), d)
            })
            .collect();
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] += x[(map[i], map[j])];
            }
        }
    }
    out / C64::new(perms.len() as f64, 0.0)
}

fn permutations(p: usize) -> Vec<Vec<usize>> {
    if p == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(p - 1) {
        for pos in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(pos, p - 1);
            out.push(v);
        }
    }
    out
}

fn random_schedule(rng: &mut impl Rng, time_dependent: bool) -> Schedule {
    if time_dependent {
        Schedule::Sinusoidal {
            offset: rng.gen_range(-0.5..0.5),
            amplitude: rng.gen_range(0.0..0.5),
            frequency: rng.gen_range(0.1..2.0),
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
        }
    } else {
        Schedule::constant(rng.gen_range(-1.0..1.0))
    }
}

fn random_state(n: u32, d: usize, rng: &mut impl Rng, depth: usize) -> InitialState {
    match rng.gen_range(0..if depth == 0 { 4 } else { 3 }) {
        0 => InitialState::MaximallyMixed,
        1 => {
            let v: Vec<C64> = (0..d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            InitialState::PureProduct { amplitudes: v.into_iter().map(|x| Entry::from(x / norm)).collect() }
        }
        2 => {
            let mut content = vec![0u32; d];
            for _ in 0..n {
                content[rng.gen_range(0..d)] += 1;
            }
            InitialState::SymmetricBasisState { content }
        }
        _ => {
            let w: f64 = rng.gen_range(0.1..0.9);
            InitialState::Mixture {
                weights: vec![w, 1.0 - w],
                states: vec![random_state(n, d, rng, 1), random_state(n, d, rng, 1)],
            }
        }
    }
}

/// Options for [`random_model`].
#[derive(Clone, Debug)]
pub struct RandomOptions {
    /// Add symmetric two-particle Hamiltonian, local and collective terms.
    pub two_particle: bool,
    pub time_dependent: bool,
    pub t1: f64,
    pub dt: f64,
}

impl Default for RandomOptions {
    fn default() -> Self {
        RandomOptions { two_particle: false, time_dependent: false, t1: 1.0, dt: DEFAULT_DT }
    }
}

/// Random PI model: Hermitian `H`, local `ℓ` and collective `L` with rates in `[−1, 1]`.
pub fn random_model(n: u32, d: usize, rng: &mut impl Rng, opts: &RandomOptions) -> ModelSpec {
    let (td_h, td_c) = (opts.time_dependent && rng.gen_bool(0.5), opts.time_dependent && rng.gen_bool(0.5));
    let mut hamiltonian = vec![HamiltonianTerm {
        matrix: Matrix::from_cmat(&hermitian(random_cmat(d, rng))),
        p: 1,
        schedule: random_schedule(rng, td_h),
    }];
    let mut channels = vec![
        Channel {
            scope: Scope::Local,
            p: 1,
            jump: Matrix::from_cmat(&random_cmat(d, rng)),
            rate: random_schedule(rng, opts.time_dependent),
        },
        Channel {
            scope: Scope::Collective,
            p: 1,
            jump: Matrix::from_cmat(&random_cmat(d, rng)),
            rate: random_schedule(rng, td_c),
        },
    ];
    if opts.two_particle && n >= 2 {
        let dim = d * d;
        hamiltonian.push(HamiltonianTerm {
            matrix: Matrix::from_cmat(&hermitian(symmetrize(&random_cmat(dim, rng), d, 2))),
            p: 2,
            schedule: random_schedule(rng, opts.time_dependent),
        });
        for scope in [Scope::Local, Scope::Collective] {
            channels.push(Channel {
                scope,
                p: 2,
                jump: Matrix::from_cmat(&(symmetrize(&random_cmat(dim, rng), d, 2) * C64::new(0.5, 0.0))),
                rate: random_schedule(rng, opts.time_dependent),
            });
        }
    }
    let obs = hermitian(random_cmat(d, rng));
    ModelSpec {
        version: 1,
        n,
        d,
        hamiltonian,
        channels,
        initial_state: random_state(n, d, rng, 0),
        observables: vec![ObservableSpec { name: "x".into(), matrix: Some(Matrix::from_cmat(&obs)), p: 1, components: None }],
        grid: Grid { t0: 0.0, t1: opts.t1, dt: Some(opts.dt), method: Method::Rk4, atol: 1e-10, rtol: 1e-8, dt_min: 1e-12 },
        output: Output::default(),
    }
}

/// `(N, d)` pairs cycled through by [`fuzz`].
pub const FUZZ_SIZES: [(u32, usize); 6] = [(2, 2), (3, 2), (4, 2), (5, 2), (2, 3), (3, 3)];

/// Compares `count` random models; model `k` uses size `FUZZ_SIZES[k % 6]`
/// and seed `seed + k`, with sinusoidal rates on every other model.
pub fn fuzz(count: usize, seed: u64, two_particle: bool) -> Vec<(ModelSpec, Result<Report>)> {
    use rand::SeedableRng;
    (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let (n, d) = if two_particle { [(3, 2), (4, 2)][k % 2] } else { FUZZ_SIZES[k % FUZZ_SIZES.len()] };
            let opts = RandomOptions { two_particle, time_dependent: k % 2 == 1, ..Default::default() };
            let spec = random_model(n, d, &mut rng, &opts);
            let report = full_evolve_compare(&spec);
            (spec, report)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn dense(m: &Csr) -> Vec<C64> {
        let mut out = vec![c(0.0, 0.0); m.nrows * m.ncols];
        for (r, cc, v) in m.iter() {
            out[r * m.ncols + cc] = v;
        }
        out
    }

    #[test]
    fn embedding_examples() {
        let sz = CMat::from_row_slice(2, 2, &[c(-0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        let xc = embed_collective(&sz, 1, 2, 2);
        let diag: Vec<f64> = (0..4).map(|i| xc.get(i, i).re).collect();
        assert_eq!(diag, vec![-1.0, 0.0, 0.0, 1.0]);
        assert_eq!(xc.nnz(), 2);
        assert!(is_permutation_invariant(&xc, 2, 2));
        let s_minus = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let first = embed(&s_minus, &[0], 2, 2);
        assert_eq!(first.get(0b01, 0b11), c(1.0, 0.0));
        assert!(!is_permutation_invariant(&first, 2, 2));
        assert_eq!(tuples(4, 2).len(), 6);
        // two-site operator lands on the chosen sites in order
        let mut cnot = CMat::zeros(4, 4);
        for (r, col) in [(0, 0), (1, 1), (3, 2), (2, 3)] {
            cnot[(r, col)] = c(1.0, 0.0);
        }
        let e = embed(&cnot, &[0, 2], 3, 2);
        assert_eq!(e.get(0b111, 0b110), c(1.0, 0.0));
    }

    #[test]
    fn single_qudit_is_plain_lindblad() {
        let text = r#"{"N": 1, "d": 2, "hamiltonian": [{"matrix": [[0, 1], [1, 0]]}],
            "channels": [{"scope": "local", "jump": [[0, 1], [0, 0]], "rate": 0.5}],
            "initial_state": {"kind": "pure_product", "amplitudes": [0, 1]}, "grid": {"t1": 0.3, "dt": 0.01, "method": "rk4"}}"#;
        let spec = ModelSpec::from_json(text).unwrap();
        let full = build_full(&spec).unwrap();
        let rho = full.rho0.clone();
        let mut out = vec![c(0.0, 0.0); 4];
        full.rhs(&rho, 0.0, &mut out).unwrap();
        // ρ = |1⟩⟨1|: decay −γ on the excited population, coherences from σx
        assert!((out[3] - c(-0.5, 0.0)).norm() < 1e-14);
        assert!((out[0] - c(0.5, 0.0)).norm() < 1e-14);
        assert!((out[1] - c(0.0, -1.0)).norm() < 1e-14);
        assert!(full_evolve_compare(&spec).unwrap().max_deviation() < 1e-12);
    }

    #[test]
    fn unitary_and_dephasing_agreement() {
        let text = r#"{"N": 2, "d": 3, "hamiltonian": [{"matrix": [[1, [0, 1], 0], [[0, -1], 0, 0.5], [0, 0.5, -1]]}],
            "initial_state": {"kind": "pure_product", "amplitudes": [0.6, 0, 0.8]}, "grid": {"t1": 1, "dt": 0.01, "method": "rk4"}}"#;
        let spec = ModelSpec::from_json(text).unwrap();
        assert!(full_evolve_compare(&spec).unwrap().max_deviation() < 1e-9);
        let deph = text.replace(r#""initial_state""#, r#""channels": [{"scope": "local", "jump": [[1, 0, 0], [0, 0, 0], [0, 0, -1]], "rate": 1}], "initial_state""#);
        assert!(full_evolve_compare(&ModelSpec::from_json(&deph).unwrap()).unwrap().max_deviation() < 1e-8);
    }

    #[test]
    fn random_models_agree() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for &(n, d) in &FUZZ_SIZES[..3] {
            let spec = random_model(n, d, &mut rng, &RandomOptions { time_dependent: true, ..Default::default() });
            let r = full_evolve_compare(&spec).unwrap();
            assert!(r.max_deviation() < 1e-8, "{r:?}");
        }
    }

    #[test]
    fn components_state_only_in_symmetric_block() {
        let ok = r#"{"N": 2, "d": 2, "initial_state": {"kind": "components", "entries": [
            {"nu": [2], "w": [[2, 0], [1]], "w_prime": [[2, 0], [1]], "value": 0.5},
            {"nu": [2], "w": [[2, 0], [2]], "w_prime": [[2, 0], [2]], "value": 0.5},
            {"nu": [2], "w": [[2, 0], [1]], "w_prime": [[2, 0], [2]], "value": [0, 0.25]},
            {"nu": [2], "w": [[2, 0], [2]], "w_prime": [[2, 0], [1]], "value": [0, -0.25]}]},
            "channels": [{"scope": "collective", "jump": [[0, 1], [0, 0]], "rate": 1}],
            "grid": {"t1": 0.5, "dt": 0.01, "method": "rk4"}}"#;
        assert!(full_evolve_compare(&ModelSpec::from_json(ok).unwrap()).unwrap().max_deviation() < 1e-10);
        let singlet = r#"{"N": 2, "d": 2, "initial_state": {"kind": "components", "entries": [
            {"nu": [1, 1], "w": [[1, 1], [1]], "w_prime": [[1, 1], [1]], "value": 1}]}, "grid": {"t1": 0.5}}"#;
        assert!(matches!(build_full(&ModelSpec::from_json(singlet).unwrap()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn audit_examples() {
        let rows = dimension_audit(3, 3).unwrap();
        let get = |n, d| rows.iter().find(|r| r.n == n && r.d == d).unwrap().clone();
        assert_eq!((get(2, 2).commutant, get(2, 2).binomial), (10, 10));
        assert_eq!((get(3, 3).commutant, get(3, 3).binomial), (165, 165));
        assert_eq!(get(3, 1).commutant, 1);
        assert!(rows.iter().all(|r| r.ok));
    }

    #[test]
    fn cap_and_symmetrize() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let spec = random_model(13, 2, &mut rng, &RandomOptions::default());
        assert!(matches!(build_full(&spec), Err(Error::ResourceCap { .. })));
        let x = random_cmat(8, &mut rng);
        let s = symmetrize(&x, 2, 3);
        assert!(crate::model::factor_symmetry_defect(&s, 2, 3) < 1e-14);
        assert_eq!(permutations(3).len(), 6);
        let e = embed_collective(&CMat::identity(4, 4), 2, 3, 2);
        assert_eq!(dense(&e).iter().filter(|v| v.norm() > 0.0).count(), 8);
    }
}
