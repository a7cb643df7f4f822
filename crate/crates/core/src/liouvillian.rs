//! K-coefficients and the projected master-equation matrix.
//!
//! The matrix acts on F-basis component vectors. It is a sum of parts, each
//! a time-independent block-sparse matrix times a scalar schedule. Blocks are
//! keyed by `(λ, ν)` shape indices; inside a block, row `W_λ f^λ(d) + W'_λ`
//! and column `W_ν f^ν(d) + W'_ν` follow the component layout.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::commutant::{CommutantIndex, PiOperator};
use crate::error::{Error, Result};
use crate::model::{ModelSpec, Scope};
use crate::pparticle::{path_engine, CMat};
use crate::schedule::Schedule;
use crate::sparse::Csr;
use crate::tableaux::{syt_count, GtPattern};
use crate::threenu::{g_operator, RMat};

fn trace_against(g: &RMat, x: &CMat) -> C64 {
    g.iter().zip(x.iter()).map(|(a, b)| b * *a).sum()
}

fn check_single(x: &CMat, d: usize) -> Result<()> {
    if x.shape() != (d, d) {
        return Err(Error::Dimension(format!("expected a {d}×{d} matrix, got {}×{}", x.nrows(), x.ncols())));
    }
    Ok(())
}

/// `K_{X,Y}^{(λ,W_λ,W'_λ; ν,W_ν,W'_ν)}` summed over `μ ∈ {λ^-} ∩ {ν^-}`.
pub fn k_coefficient(
    x: &CMat,
    y: &CMat,
    w_lambda: &GtPattern,
    w2_lambda: &GtPattern,
    w_nu: &GtPattern,
    w2_nu: &GtPattern,
) -> Result<C64> {
    let d = w_nu.d();
    check_single(x, d)?;
    check_single(y, d)?;
    let (lambda, nu) = (w_lambda.shape(), w_nu.shape());
    let n = nu.weight() as f64;
    let (fl, fn_) = (syt_count(&lambda)? as f64, syt_count(&nu)? as f64);
    let mut acc = C64::new(0.0, 0.0);
    for mu in lambda.removals().into_iter().filter(|m| nu.removals().contains(m)) {
        let fm = syt_count(&mu)? as f64;
        let r = (n * fm / fl * n * fm / fn_).sqrt();
        let tx = trace_against(&g_operator(&mu, w_lambda, w_nu, d)?, x);
        let ty = trace_against(&g_operator(&mu, w2_lambda, w2_nu, d)?, y);
        acc += tx * ty.conj() * r;
    }
    Ok(acc)
}

/// `K_X^{(λ,W_λ,W̃_λ)} = Σ_{μ ∈ {λ^-}} r^μ_λ Tr[g_μ^{(λ,W_λ;λ,W̃_λ)†} X]`.
pub fn k_x(x: &CMat, w_lambda: &GtPattern, w_tilde: &GtPattern) -> Result<C64> {
    let d = w_lambda.d();
    check_single(x, d)?;
    let lambda = w_lambda.shape();
    let n = lambda.weight() as f64;
    let fl = syt_count(&lambda)? as f64;
    let mut acc = C64::new(0.0, 0.0);
    for mu in lambda.removals() {
        let r = n * syt_count(&mu)? as f64 / fl;
        acc += trace_against(&g_operator(&mu, w_lambda, w_tilde, d)?, x) * r;
    }
    Ok(acc)
}

/// One additive term `schedule(t) · M`.
#[derive(Clone, Debug)]
pub struct Part {
    pub label: String,
    pub schedule: Schedule,
    pub blocks: BTreeMap<(usize, usize), Csr>,
}

impl Part {
    fn merge(&mut self, other: Part) {
        for (key, m) in other.blocks {
            let merged = match self.blocks.remove(&key) {
                Some(a) => Csr::from_triplets(a.nrows, a.ncols, a.iter().chain(m.iter()).collect()),
                None => m,
            };
            self.blocks.insert(key, merged);
        }
        self.label = format!("{} + {}", self.label, other.label);
    }

    pub fn nnz(&self) -> usize {
        self.blocks.values().map(Csr::nnz).sum()
    }
}

#[derive(Clone, Debug)]
pub struct LiouvillianMatrix {
    pub index: Arc<CommutantIndex>,
    pub parts: Vec<Part>,
}

fn left_mul(r: &CMat) -> Csr {
    // (R ρ)_{W,W'} = Σ_K R[W][K] ρ_{K,W'}
    let n = r.nrows();
    let mut t = Vec::new();
    for w in 0..n {
        for k in 0..n {
            let v = r[(w, k)];
            if v != C64::new(0.0, 0.0) {
                t.extend((0..n).map(|w2| (w * n + w2, k * n + w2, v)));
            }
        }
    }
    Csr::from_triplets(n * n, n * n, t)
}

fn right_mul(s: &CMat) -> Csr {
    // (ρ S)_{W,W'} = Σ_K ρ_{W,K} S[K][W']
    let n = s.nrows();
    let mut t = Vec::new();
    for k in 0..n {
        for w2 in 0..n {
            let v = s[(k, w2)];
            if v != C64::new(0.0, 0.0) {
                t.extend((0..n).map(|w| (w * n + w2, w * n + k, v)));
            }
        }
    }
    Csr::from_triplets(n * n, n * n, t)
}

fn sandwich(a: &CMat) -> Csr {
    // (A ρ A†)_{W,W'} = Σ A[W][K] ρ_{K,K'} conj(A[W'][K'])
    let n = a.nrows();
    let nz: Vec<(usize, usize, C64)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| a[(i, j)] != C64::new(0.0, 0.0)).map(|(i, j)| (i, j, a[(i, j)]))
        .collect();
    let mut t = Vec::with_capacity(nz.len() * nz.len());
    for &(w, k, x) in &nz {
        for &(w2, k2, y) in &nz {
            t.push((w * n + w2, k * n + k2, x * y.conj()));
        }
    }
    Csr::from_triplets(n * n, n * n, t)
}

fn combine(terms: &[(C64, &Csr)]) -> Csr {
    let (r, c) = (terms[0].1.nrows, terms[0].1.ncols);
    Csr::from_triplets(r, c, terms.iter().flat_map(|(s, m)| m.iter().map(move |(i, j, v)| (i, j, v * s))).collect())
}

fn diagonal_part(label: String, schedule: Schedule, per_block: Vec<Csr>) -> Part {
    let blocks = per_block.into_iter().enumerate().filter(|(_, m)| m.nnz() > 0).map(|(b, m)| ((b, b), m)).collect();
    Part { label, schedule, blocks }
}

fn reduced(x: &CMat, p: usize, index: &CommutantIndex) -> Result<Vec<CMat>> {
    path_engine(index.n, index.d, p)?.reduced(x)
}

/// `−i[H_c, ρ]` for `H_c = Σ_{tuples} H^{(n_1…n_p)}`.
pub fn coherent_part(h: &CMat, p: usize, schedule: Schedule, index: &CommutantIndex) -> Result<Part> {
    let k = reduced(h, p, index)?;
    let i = C64::new(0.0, 1.0);
    let blocks = k.par_iter().map(|kh| combine(&[(i, &right_mul(kh)), (-i, &left_mul(kh))])).collect();
    Ok(diagonal_part(format!("coherent p={p}"), schedule, blocks))
}

/// `Σ_{tuples} ℓ ρ ℓ† − ½{ℓ†ℓ, ρ}`.
pub fn local_part(l: &CMat, p: usize, rate: Schedule, index: &CommutantIndex) -> Result<Part> {
    let engine = path_engine(index.n, index.d, p)?;
    let ldl = l.adjoint() * l;
    let loss = engine.reduced(&ldl)?;
    let half = C64::new(-0.5, 0.0);
    let mut blocks: BTreeMap<(usize, usize), Csr> = loss
        .par_iter()
        .map(|k| combine(&[(half, &left_mul(k)), (half, &right_mul(k))]))
        .collect::<Vec<_>>()
        .into_iter()
        .enumerate()
        .map(|(b, m)| ((b, b), m))
        .collect();
    let gain: Vec<((usize, usize), Vec<(usize, usize, C64)>)> = engine.gain(l, l)?.into_iter().collect();
    let gain: Vec<((usize, usize), Csr)> = gain
        .into_par_iter()
        .map(|((lb, nb), t)| {
            let (rows, cols) = (index.blocks[lb].size(), index.blocks[nb].size());
            ((lb, nb), Csr::from_triplets(rows, cols, t))
        })
        .collect();
    for (key, m) in gain {
        let merged = match blocks.remove(&key) {
            Some(a) => combine(&[(C64::new(1.0, 0.0), &a), (C64::new(1.0, 0.0), &m)]),
            None => m,
        };
        blocks.insert(key, merged);
    }
    blocks.retain(|_, m| m.nnz() > 0);
    Ok(Part { label: format!("local p={p}"), schedule: rate, blocks })
}

/// `L_c ρ L_c† − ½{L_c†L_c, ρ}` for `L_c = Σ_{tuples} L^{(n_1…n_p)}`.
pub fn collective_part(l: &CMat, p: usize, rate: Schedule, index: &CommutantIndex) -> Result<Part> {
    let k = reduced(l, p, index)?;
    let half = C64::new(-0.5, 0.0);
    let one = C64::new(1.0, 0.0);
    let blocks = k
        .par_iter()
        .map(|kl| {
            let kk = kl.adjoint() * kl;
            combine(&[(one, &sandwich(kl)), (half, &left_mul(&kk)), (half, &right_mul(&kk))])
        })
        .collect();
    Ok(diagonal_part(format!("collective p={p}"), rate, blocks))
}

/// Assembles every Hamiltonian term and channel of `model`, up to `p_cap` particles.
pub(crate) fn assemble_terms(model: &ModelSpec, index: &Arc<CommutantIndex>, p_cap: usize) -> Result<LiouvillianMatrix> {
    if model.n != index.n || model.d != index.d {
        return Err(Error::Dimension(format!(
            "model has (N,d)=({},{}) but index has ({},{})",
            model.n, model.d, index.n, index.d
        )));
    }
    let problems = model.problems_with_cap(p_cap);
    if !problems.is_empty() {
        return Err(Error::InvalidModel(problems));
    }
    let mut parts = Vec::new();
    for h in &model.hamiltonian {
        parts.push(coherent_part(&h.matrix.to_cmat(), h.p, h.schedule.clone(), index)?);
    }
    for c in &model.channels {
        let m = c.jump.to_cmat();
        parts.push(match c.scope {
            Scope::Local => local_part(&m, c.p, c.rate.clone(), index)?,
            Scope::Collective => collective_part(&m, c.p, c.rate.clone(), index)?,
        });
    }
    Ok(LiouvillianMatrix::new(index.clone(), parts))
}

/// Assembles a model whose terms are all single-particle.
pub fn assemble(model: &ModelSpec, index: &Arc<CommutantIndex>) -> Result<LiouvillianMatrix> {
    let multi = model.hamiltonian.iter().map(|h| h.p).chain(model.channels.iter().map(|c| c.p)).find(|&p| p != 1);
    if let Some(p) = multi {
        return Err(Error::Unsupported(format!("{p}-particle term; use the p-particle assembly")));
    }
    assemble_terms(model, index, 1)
}

impl LiouvillianMatrix {
    /// Parts with identical schedules are merged.
    pub fn new(index: Arc<CommutantIndex>, parts: Vec<Part>) -> Self {
        let mut merged: Vec<Part> = Vec::new();
        for p in parts {
            match merged.iter_mut().find(|m| m.schedule == p.schedule) {
                Some(m) => m.merge(p),
                None => merged.push(p),
            }
        }
        for p in &mut merged {
            p.blocks.retain(|_, m| m.nnz() > 0);
        }
        LiouvillianMatrix { index, parts: merged }
    }

    pub fn dim(&self) -> usize {
        self.index.dim
    }

    pub fn nnz(&self) -> usize {
        self.parts.iter().map(Part::nnz).sum()
    }

    pub fn is_time_dependent(&self) -> bool {
        self.parts.iter().any(|p| !p.schedule.is_constant())
    }

    /// Every `(λ, ν)` pair carrying a nonzero block.
    pub fn block_keys(&self) -> Vec<(usize, usize)> {
        let mut keys: Vec<_> = self.parts.iter().flat_map(|p| p.blocks.keys().copied()).collect();
        keys.sort_unstable();
        keys.dedup();
        keys
    }

    pub fn scalars(&self, t: f64) -> Result<Vec<f64>> {
        self.parts.iter().map(|p| p.schedule.eval(t)).collect()
    }

    /// `ρ̇ = M(t) ρ` on raw component vectors.
    pub fn apply_raw(&self, rho: &[C64], t: f64, out: &mut [C64]) -> Result<()> {
        let scal = self.scalars(t)?;
        let index = &self.index;
        let mut slices: Vec<&mut [C64]> = Vec::with_capacity(index.blocks.len());
        let mut rest = out;
        for blk in &index.blocks {
            let (head, tail) = rest.split_at_mut(blk.size());
            slices.push(head);
            rest = tail;
        }
        slices.into_par_iter().enumerate().for_each(|(lb, dst)| {
            dst.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
            for (part, &s) in self.parts.iter().zip(&scal) {
                if s == 0.0 {
                    continue;
                }
                for (&(_, nb), m) in part.blocks.range((lb, 0)..(lb + 1, 0)) {
                    let src = &index.blocks[nb];
                    m.mul_vec_add(C64::new(s, 0.0), &rho[src.offset..src.offset + src.size()], dst);
                }
            }
        });
        Ok(())
    }

    pub fn apply(&self, rho: &PiOperator, t: f64) -> Result<PiOperator> {
        if rho.data.len() != self.dim() {
            return Err(Error::Dimension(format!("state has {} components, matrix {}", rho.data.len(), self.dim())));
        }
        let mut out = PiOperator::zeros(&self.index);
        self.apply_raw(&rho.data, t, &mut out.data)?;
        Ok(out)
    }

    /// Global coordinate list of `M(t)` with duplicates summed.
    pub fn entries(&self, t: f64) -> Result<Vec<(usize, usize, C64)>> {
        let scal = self.scalars(t)?;
        let mut t = Vec::new();
        for (part, &s) in self.parts.iter().zip(&scal) {
            for (&(lb, nb), m) in &part.blocks {
                let (ro, co) = (self.index.blocks[lb].offset, self.index.blocks[nb].offset);
                t.extend(m.iter().map(|(r, c, v)| (ro + r, co + c, v * s)));
            }
        }
        Ok(Csr::from_triplets(self.dim(), self.dim(), t).iter().collect())
    }

    /// Global coordinate list of one part without its schedule.
    pub fn part_entries(&self, part: usize) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::new();
        for (&(lb, nb), m) in &self.parts[part].blocks {
            let (ro, co) = (self.index.blocks[lb].offset, self.index.blocks[nb].offset);
            out.extend(m.iter().map(|(r, c, v)| (ro + r, co + c, v)));
        }
        out
    }

    /// Largest `|Σ_{λ,W} √f^λ M[(λ,W,W), col]|` over columns, and the largest
    /// entry magnitude, for one part.
    pub fn trace_column_defect(&self, part: usize) -> (f64, f64) {
        let mut sums = vec![C64::new(0.0, 0.0); self.dim()];
        let mut scale = 0.0f64;
        for (&(lb, nb), m) in &self.parts[part].blocks {
            let blk = &self.index.blocks[lb];
            let n = blk.dim();
            let co = self.index.blocks[nb].offset;
            scale = scale.max(m.max_abs());
            for (r, c, v) in m.iter() {
                if r / n == r % n {
                    sums[co + c] += v * blk.sqrt_f;
                }
            }
        }
        (sums.iter().map(|s| s.norm()).fold(0.0, f64::max), scale)
    }

    fn lookup(&self, part: usize) -> std::collections::HashMap<(usize, usize), C64> {
        self.part_entries(part).into_iter().map(|(r, c, v)| ((r, c), v)).collect()
    }

    fn transpose_within(&self, flat: usize) -> usize {
        let (b, w, w2) = self.index.decode(flat);
        self.index.flat(b, w2, w)
    }

    /// `max |M[(λ,W',W),(ν,W'_ν,W_ν)] − conj M[(λ,W,W'),(ν,W_ν,W'_ν)]|` for one part.
    pub fn hermiticity_compat_defect(&self, part: usize) -> f64 {
        let map = self.lookup(part);
        let zero = C64::new(0.0, 0.0);
        map.iter()
            .map(|(&(r, c), v)| {
                let other = map.get(&(self.transpose_within(r), self.transpose_within(c))).copied().unwrap_or(zero);
                (other - v.conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max |M[c, r] − conj M[r, c]|` for one part.
    pub fn hermitian_defect(&self, part: usize) -> f64 {
        let map = self.lookup(part);
        let zero = C64::new(0.0, 0.0);
        map.iter()
            .map(|(&(r, c), v)| (map.get(&(c, r)).copied().unwrap_or(zero) - v.conj()).norm())
            .fold(0.0, f64::max)
    }
}
