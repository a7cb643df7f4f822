//! The commutant F-basis: indexing, PI operators as component vectors and
//! their algebra.
//!
//! A PI operator is stored as the flat vector of its components
//! `A_{ν,W,W'}` in the orthonormal basis `F_ν^{(W,W')}`. The flat position of
//! `(ν, W, W')` is `offset_ν + W · f^ν(d) + W'` with shapes in canonical
//! order and patterns in canonical order within each shape.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::pparticle::{path_engine, CMat};
use crate::tableaux::{partitions_of, swt_basis, syt_count, GtPattern, Partition, SwtBasis};

/// Default cap on the commutant dimension accepted by [`CommutantIndex::new`].
pub const DEFAULT_DIM_CAP: u128 = 2_000_000;

/// One `ν` block of the index.
#[derive(Debug)]
pub struct ShapeBlock {
    pub shape: Partition,
    /// `f^ν`.
    pub f: u128,
    pub sqrt_f: f64,
    pub basis: Arc<SwtBasis>,
    pub offset: usize,
}

impl ShapeBlock {
    /// `f^ν(d)`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn size(&self) -> usize {
        self.dim() * self.dim()
    }
}

#[derive(Debug)]
pub struct CommutantIndex {
    pub n: u32,
    pub d: usize,
    pub blocks: Vec<ShapeBlock>,
    pub dim: usize,
    lookup: HashMap<Partition, usize>,
}

impl CommutantIndex {
    pub fn new(n: u32, d: usize) -> Result<Self> {
        Self::with_cap(n, d, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(n: u32, d: usize, cap: u128) -> Result<Self> {
        if d == 0 {
            return Err(Error::Dimension("d must be at least 1".into()));
        }
        let dim = crate::tableaux::commutant_dimension(n, d)?;
        if dim > cap {
            return Err(Error::ResourceCap { what: "commutant dimension", value: dim, cap });
        }
        let mut blocks = Vec::new();
        let mut offset = 0;
        for shape in partitions_of(n, d) {
            let f = syt_count(&shape)?;
            let basis = swt_basis(&shape, d);
            let size = basis.len() * basis.len();
            blocks.push(ShapeBlock { sqrt_f: (f as f64).sqrt(), f, basis, offset, shape });
            offset += size;
        }
        debug_assert_eq!(offset as u128, dim);
        let lookup = blocks.iter().enumerate().map(|(i, b)| (b.shape.clone(), i)).collect();
        Ok(CommutantIndex { n, d, blocks, dim: offset, lookup })
    }

    pub fn shape_index(&self, shape: &Partition) -> Option<usize> {
        self.lookup.get(shape).copied()
    }

    pub fn flat(&self, block: usize, w: usize, w2: usize) -> usize {
        let b = &self.blocks[block];
        b.offset + w * b.dim() + w2
    }

    /// Inverse of [`CommutantIndex::flat`].
    pub fn decode(&self, flat: usize) -> (usize, usize, usize) {
        let block = self.blocks.partition_point(|b| b.offset <= flat) - 1;
        let b = &self.blocks[block];
        let local = flat - b.offset;
        (block, local / b.dim(), local % b.dim())
    }

    pub fn locate(&self, shape: &Partition, w: &GtPattern, w2: &GtPattern) -> Option<usize> {
        let bi = self.shape_index(shape)?;
        let b = &self.blocks[bi];
        Some(self.flat(bi, b.basis.index_of(w)?, b.basis.index_of(w2)?))
    }
}

/// A PI operator given by its F-basis components.
#[derive(Clone, Debug)]
pub struct PiOperator {
    pub index: Arc<CommutantIndex>,
    pub data: Vec<C64>,
}

fn same_index(a: &PiOperator, b: &PiOperator) -> Result<()> {
    if Arc::ptr_eq(&a.index, &b.index) || (a.index.n == b.index.n && a.index.d == b.index.d) {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "operators on (N,d)=({},{}) and ({},{})",
            a.index.n, a.index.d, b.index.n, b.index.d
        )))
    }
}

impl PiOperator {
    pub fn zeros(index: &Arc<CommutantIndex>) -> Self {
        PiOperator { index: index.clone(), data: vec![C64::new(0.0, 0.0); index.dim] }
    }

    /// The single basis element `F_ν^{(W,W')}`.
    pub fn basis_element(index: &Arc<CommutantIndex>, flat: usize) -> Self {
        let mut op = Self::zeros(index);
        op.data[flat] = C64::new(1.0, 0.0);
        op
    }

    pub fn block(&self, b: usize) -> &[C64] {
        let blk = &self.index.blocks[b];
        &self.data[blk.offset..blk.offset + blk.size()]
    }

    /// Representation matrix `A(ν)` of block `b`: components divided by `√f^ν`.
    pub fn block_matrix(&self, b: usize) -> CMat {
        let blk = &self.index.blocks[b];
        let n = blk.dim();
        CMat::from_fn(n, n, |i, j| self.data[blk.offset + i * n + j] / blk.sqrt_f)
    }

    pub fn scale(&self, s: C64) -> Self {
        PiOperator { index: self.index.clone(), data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, other: &PiOperator) -> Result<Self> {
        same_index(self, other)?;
        Ok(PiOperator { index: self.index.clone(), data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() })
    }

    pub fn multiply(&self, other: &PiOperator) -> Result<Self> {
        same_index(self, other)?;
        let mut out = Self::zeros(&self.index);
        for blk in &self.index.blocks {
            let n = blk.dim();
            let o = blk.offset;
            for w in 0..n {
                for k in 0..n {
                    let a = self.data[o + w * n + k];
                    if a == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let a = a / blk.sqrt_f;
                    for w2 in 0..n {
                        out.data[o + w * n + w2] += a * other.data[o + k * n + w2];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(&self.index);
        for blk in &self.index.blocks {
            let n = blk.dim();
            for w in 0..n {
                for w2 in 0..n {
                    out.data[blk.offset + w * n + w2] = self.data[blk.offset + w2 * n + w].conj();
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.index
            .blocks
            .iter()
            .map(|blk| {
                let n = blk.dim();
                (0..n).map(|w| self.data[blk.offset + w * n + w]).sum::<C64>() * blk.sqrt_f
            })
            .sum()
    }

    /// `w_ν = √f^ν Σ_W A_{ν,W,W}` for every block, in index order.
    pub fn block_weights(&self) -> Vec<f64> {
        self.index
            .blocks
            .iter()
            .map(|blk| {
                let n = blk.dim();
                (0..n).map(|w| self.data[blk.offset + w * n + w].re).sum::<f64>() * blk.sqrt_f
            })
            .collect()
    }

    /// `Tr(A† B)`.
    pub fn hs_inner(&self, other: &PiOperator) -> Result<C64> {
        same_index(self, other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum())
    }

    /// `Tr(X ρ)` with `self = X`.
    pub fn expectation(&self, rho: &PiOperator) -> Result<C64> {
        same_index(self, rho)?;
        let mut acc = C64::new(0.0, 0.0);
        for blk in &self.index.blocks {
            let n = blk.dim();
            for w in 0..n {
                for k in 0..n {
                    acc += self.data[blk.offset + w * n + k] * rho.data[blk.offset + k * n + w];
                }
            }
        }
        Ok(acc)
    }

    /// `Tr(ρ²)`; equals the squared component norm for Hermitian `ρ`.
    pub fn purity(&self) -> f64 {
        self.expectation(self).map(|c| c.re).unwrap_or(f64::NAN)
    }

    /// `max |A_{ν,W,W'} − conj(A_{ν,W',W})|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.data.iter().zip(&self.adjoint().data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Components `√f^ν δ_{W,W'}` of the identity.
pub fn identity_components(index: &Arc<CommutantIndex>) -> PiOperator {
    let mut op = PiOperator::zeros(index);
    for blk in &index.blocks {
        let n = blk.dim();
        for w in 0..n {
            op.data[blk.offset + w * n + w] = C64::new(blk.sqrt_f, 0.0);
        }
    }
    op
}

/// Components of `X_c = Σ_{n_1<…<n_p} X^{(n_1…n_p)}` for a `d^p × d^p`
/// matrix `x`, namely `√f^ν K_X^{(ν,W,W')}`.
pub fn collective_components(x: &CMat, p: usize, index: &Arc<CommutantIndex>) -> Result<PiOperator> {
    let engine = path_engine(index.n, index.d, p)?;
    let reduced = engine.reduced(x)?;
    let mut op = PiOperator::zeros(index);
    for (bi, blk) in index.blocks.iter().enumerate() {
        let k = &reduced[bi];
        let n = blk.dim();
        for w in 0..n {
            for w2 in 0..n {
                op.data[blk.offset + w * n + w2] = k[(w, w2)] * blk.sqrt_f;
            }
        }
    }
    Ok(op)
}

/// Maximally mixed state `𝟙 / d^N`.
pub fn maximally_mixed(index: &Arc<CommutantIndex>) -> PiOperator {
    let dn = (index.d as f64).powi(index.n as i32);
    identity_components(index).scale(C64::new(1.0 / dn, 0.0))
}

fn multinomial_sqrt(content: &[u32]) -> f64 {
    // √(N! / Π n_k!) via log-gamma-free running product
    let mut acc = 1.0f64;
    let mut total = 0u32;
    for &c in content {
        for i in 1..=c {
            total += 1;
            acc *= total as f64 / i as f64;
        }
    }
    acc.sqrt()
}

/// `|φ⟩^{⊗N}` for normalized amplitudes `φ_0..φ_{d-1}`.
pub fn pure_product(index: &Arc<CommutantIndex>, amplitudes: &[C64]) -> Result<PiOperator> {
    if amplitudes.len() != index.d {
        return Err(Error::Dimension(format!("{} amplitudes for d = {}", amplitudes.len(), index.d)));
    }
    let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("amplitudes have squared norm {norm}")));
    }
    let mut op = PiOperator::zeros(index);
    let top = Partition::new(vec![index.n]).expect("one-row shape");
    let Some(bi) = index.shape_index(&top) else {
        return Ok(op);
    };
    let blk = &index.blocks[bi];
    let coef: Vec<C64> = blk
        .basis
        .patterns
        .iter()
        .map(|w| {
            let content = w.content();
            let mut c = C64::new(multinomial_sqrt(&content), 0.0);
            for (k, &nk) in content.iter().enumerate() {
                c *= amplitudes[k].powu(nk);
            }
            c
        })
        .collect();
    let n = blk.dim();
    for w in 0..n {
        for w2 in 0..n {
            op.data[blk.offset + w * n + w2] = coef[w] * coef[w2].conj();
        }
    }
    Ok(op)
}

/// Symmetric basis state with the given content, `|D_n⟩⟨D_n|`.
pub fn symmetric_basis_state(index: &Arc<CommutantIndex>, content: &[u32]) -> Result<PiOperator> {
    if content.len() != index.d || content.iter().sum::<u32>() != index.n {
        return Err(Error::InvalidState(format!(
            "content {content:?} is not a composition of N = {} into d = {} parts",
            index.n, index.d
        )));
    }
    let top = Partition::new(vec![index.n]).expect("one-row shape");
    let w = GtPattern::symmetric(content);
    let flat = index.locate(&top, &w, &w).expect("one-row pattern exists");
    Ok(PiOperator::basis_element(index, flat))
}
