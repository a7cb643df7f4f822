//! Clebsch-Gordan coefficients `⟨W_μ, j | W_λ⟩` for the Pieri coupling
//! `U^μ(d) ⊗ U^{(1)}(d) → U^λ(d)` in the Gel'fand-Tsetlin basis.
//!
//! Each coefficient is the square root of a rational number times a sign.
//! The rational is accumulated exactly in `i128` and only the final square
//! root is taken in floating point.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tableaux::{shift_minus, swt_basis, GtPattern, Partition, ShiftPattern};

/// Reduced fraction with positive denominator.
#[derive(Clone, Copy, Debug)]
struct Ratio {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    const ONE: Ratio = Ratio { num: 1, den: 1 };

    fn mul(self, num: i64, den: i64) -> Result<Ratio> {
        if den == 0 {
            return Err(Error::Internal("zero denominator in CGC formula".into()));
        }
        let (mut n, mut d) = (num as i128, den as i128);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g1 = gcd(self.num, d).max(1);
        let g2 = gcd(n, self.den).max(1);
        let num = (self.num / g1).checked_mul(n / g2).ok_or(Error::Overflow("CGC radicand"))?;
        let den = (self.den / g2).checked_mul(d / g1).ok_or(Error::Overflow("CGC radicand"))?;
        Ok(Ratio { num, den })
    }

    fn sqrt(self) -> Result<f64> {
        if self.num < 0 {
            return Err(Error::Internal(format!("negative CGC radicand {}/{}", self.num, self.den)));
        }
        Ok((self.num as f64 / self.den as f64).sqrt())
    }
}

/// Evaluates `⟨W_μ, j | W_λ⟩`; zero unless `W_λ − W_μ` is a shift pattern
/// `Δ_{j+1}(τ)`.
pub fn cgc(w_mu: &GtPattern, j: usize, w_lambda: &GtPattern) -> Result<f64> {
    let d = w_lambda.d();
    if w_mu.d() != d {
        return Err(Error::Dimension(format!("patterns with {} and {d} rows", w_mu.d())));
    }
    let Some(shift) = ShiftPattern::of_difference(w_lambda, w_mu) else {
        return Ok(0.0);
    };
    if shift.i != j + 1 {
        return Ok(0.0);
    }
    let p = |i: usize, k: usize| w_mu.m(i, k) as i64 + k as i64 - i as i64;
    let tau = |k: usize| shift.tau(k);

    let mut radicand = Ratio::ONE;
    let t = tau(j + 1);
    let top = p(t, j + 1);
    for k in 1..=j {
        radicand = radicand.mul(top - p(k, j), 1)?;
    }
    for k in (1..=j + 1).filter(|&k| k != t) {
        radicand = radicand.mul(1, top - p(k, j + 1))?;
    }

    let mut sign = 1.0;
    for l in (j + 2)..=d {
        let (lo, hi) = (tau(l - 1), tau(l));
        if lo < hi {
            sign = -sign;
        }
        let p_lo = p(lo, l - 1);
        let p_hi = p(hi, l);
        for k in (1..=l).filter(|&k| k != hi) {
            radicand = radicand.mul(p_lo - p(k, l) + 1, p_hi - p(k, l))?;
        }
        for k in (1..l).filter(|&k| k != lo) {
            radicand = radicand.mul(p_hi - p(k, l - 1), p_lo - p(k, l - 1) + 1)?;
        }
    }
    Ok(sign * radicand.sqrt()?)
}

/// A nonzero coefficient `⟨W_μ, j | W_λ⟩` stored against a fixed `W_λ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CgcEntry {
    /// Position of `μ` in [`CgcTable::mus`].
    pub mu: usize,
    /// Position of `W_μ` in the canonical pattern list of `μ`.
    pub w_mu: usize,
    pub j: usize,
    pub value: f64,
}

/// All nonzero coefficients coupling into the irrep `λ`.
#[derive(Clone, Debug)]
pub struct CgcTable {
    pub lambda: Partition,
    pub d: usize,
    /// `{λ^-}` in canonical order.
    pub mus: Vec<Partition>,
    /// `rows[w_λ]` lists the entries for the `w_λ`-th pattern of `λ`.
    pub rows: Vec<Vec<CgcEntry>>,
}

impl CgcTable {
    pub fn build(lambda: &Partition, d: usize) -> Result<Self> {
        let basis = swt_basis(lambda, d);
        let mus = lambda.removals();
        let mut rows = Vec::with_capacity(basis.len());
        for w_lambda in &basis.patterns {
            let mut row = Vec::new();
            for (mi, mu) in mus.iter().enumerate() {
                let mu_basis = swt_basis(mu, d);
                for j in 0..d {
                    for w_mu in shift_minus(mu, j, w_lambda) {
                        let value = cgc(&w_mu, j, w_lambda)?;
                        if value != 0.0 {
                            let w_mu = mu_basis.index_of(&w_mu).expect("shift set stays inside the basis");
                            row.push(CgcEntry { mu: mi, w_mu, j, value });
                        }
                    }
                }
            }
            rows.push(row);
        }
        Ok(CgcTable { lambda: lambda.clone(), d, mus, rows })
    }

    /// Coefficient lookup by indices; zero when absent.
    pub fn get(&self, w_lambda: usize, mu: &Partition, w_mu: usize, j: usize) -> f64 {
        let Some(mi) = self.mus.iter().position(|m| m == mu) else {
            return 0.0;
        };
        self.rows[w_lambda]
            .iter()
            .find(|e| e.mu == mi && e.w_mu == w_mu && e.j == j)
            .map_or(0.0, |e| e.value)
    }

    pub fn nonzero_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

static TABLES: LazyLock<RwLock<HashMap<(Partition, usize), Arc<CgcTable>>>> = LazyLock::new(Default::default);

/// Memoized [`CgcTable`] for `(λ, d)`.
pub fn cgc_table(lambda: &Partition, d: usize) -> Result<Arc<CgcTable>> {
    let key = (lambda.clone(), d);
    if let Some(t) = TABLES.read().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let t = Arc::new(CgcTable::build(lambda, d)?);
    Ok(TABLES.write().unwrap().entry(key).or_insert(t).clone())
}

/// Max deviation of `Σ_{j,W_μ} ⟨W_μ,j|W_λ⟩⟨W_μ,j|W_ν⟩` from `δ_{λ,ν} δ_{W_λ,W_ν}`
/// over all pattern pairs. Vacuous (zero) unless `μ ∈ {λ^-} ∩ {ν^-}`.
pub fn verify_orthogonality(lambda: &Partition, nu: &Partition, mu: &Partition, d: usize) -> Result<f64> {
    let tl = cgc_table(lambda, d)?;
    let tn = cgc_table(nu, d)?;
    let (Some(ml), Some(mn)) = (tl.mus.iter().position(|m| m == mu), tn.mus.iter().position(|m| m == mu)) else {
        return Ok(0.0);
    };
    let project = |row: &[CgcEntry], mi: usize| -> HashMap<(usize, usize), f64> {
        row.iter().filter(|e| e.mu == mi).map(|e| ((e.w_mu, e.j), e.value)).collect()
    };
    let mut worst: f64 = 0.0;
    for (a, row_l) in tl.rows.iter().enumerate() {
        let vl = project(row_l, ml);
        for (b, row_n) in tn.rows.iter().enumerate() {
            let vn = project(row_n, mn);
            let dot: f64 = vl.iter().filter_map(|(k, x)| vn.get(k).map(|y| x * y)).sum();
            let target = if lambda == nu && a == b { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    Ok(worst)
}
