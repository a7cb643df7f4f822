//! Minimal compressed-sparse-row matrix over `Complex64`.

use num_complex::Complex64 as C64;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Csr {
    pub nrows: usize,
    pub ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    data: Vec<C64>,
}

impl Csr {
    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed
    /// and exact zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut data: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!(r < nrows && c < ncols);
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                indices.push(c as u32);
                data.push(v);
                last = Some((r, c));
            }
        }
        // drop cancelled entries
        let mut keep_rows = Vec::with_capacity(rows.len());
        let mut k = 0;
        for i in 0..data.len() {
            if data[i] != C64::new(0.0, 0.0) {
                data[k] = data[i];
                indices[k] = indices[i];
                keep_rows.push(rows[i]);
                k += 1;
            }
        }
        data.truncate(k);
        indices.truncate(k);
        for &r in &keep_rows {
            indptr[r + 1] += 1;
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Csr { nrows, ncols, indptr, indices, data }
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let (a, b) = (self.indptr[r], self.indptr[r + 1]);
        self.indices[a..b].iter().zip(&self.data[a..b]).map(|(&c, &v)| (c as usize, v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.row(r).find(|&(cc, _)| cc == c).map_or(C64::new(0.0, 0.0), |(_, v)| v)
    }

    /// `y += alpha · A x`.
    pub fn mul_vec_add(&self, alpha: C64, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (r, yr) in y.iter_mut().enumerate() {
            let (a, b) = (self.indptr[r], self.indptr[r + 1]);
            let mut acc = C64::new(0.0, 0.0);
            for k in a..b {
                acc += self.data[k] * x[self.indices[k] as usize];
            }
            *yr += alpha * acc;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> Csr {
        let t = self.iter().map(|(r, c, v)| (c, r, v.conj())).collect();
        Csr::from_triplets(self.ncols, self.nrows, t)
    }

    /// Sparse product `self · other`.
    pub fn matmul(&self, other: &Csr) -> Csr {
        assert_eq!(self.ncols, other.nrows);
        let mut t = Vec::new();
        for r in 0..self.nrows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    t.push((r, c, a * b));
                }
            }
        }
        Csr::from_triplets(self.nrows, other.ncols, t)
    }

    /// Row-major dense `n × n` product `A ρ`.
    pub fn lmul(&self, rho: &[C64], n: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.nrows * n];
        for r in 0..self.nrows {
            for (k, v) in self.row(r) {
                let src = &rho[k * n..(k + 1) * n];
                let dst = &mut out[r * n..(r + 1) * n];
                for (o, s) in dst.iter_mut().zip(src) {
                    *o += v * s;
                }
            }
        }
        out
    }

    /// Row-major dense product `ρ A`.
    pub fn rmul(&self, rho: &[C64], n: usize) -> Vec<C64> {
        let m = rho.len() / n;
        let mut out = vec![C64::new(0.0, 0.0); m * self.ncols];
        for k in 0..self.nrows {
            for (c, v) in self.row(k) {
                for r in 0..m {
                    out[r * self.ncols + c] += rho[r * n + k] * v;
                }
            }
        }
        out
    }

    /// Row-major dense product `ρ A†`.
    pub fn rmul_adj(&self, rho: &[C64], n: usize) -> Vec<C64> {
        let m = rho.len() / n;
        let mut out = vec![C64::new(0.0, 0.0); m * self.nrows];
        for c in 0..self.nrows {
            for (k, v) in self.row(c) {
                let v = v.conj();
                for r in 0..m {
                    out[r * self.nrows + c] += rho[r * n + k] * v;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn sample() -> Csr {
        Csr::from_triplets(
            3,
            3,
            vec![(0, 1, c(1.0, 2.0)), (2, 0, c(-1.0, 0.5)), (0, 1, c(1.0, 0.0)), (1, 1, c(0.0, 0.0)), (2, 2, c(3.0, 0.0))],
        )
    }

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let m = sample();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 1), c(2.0, 2.0));
        assert_eq!(m.get(1, 1), c(0.0, 0.0));
        let cancel = Csr::from_triplets(2, 2, vec![(0, 0, c(1.0, 0.0)), (0, 0, c(-1.0, 0.0))]);
        assert_eq!(cancel.nnz(), 0);
    }

    #[test]
    fn dense_products_match_naive() {
        let a = sample();
        let ad = dense(&a);
        let rho: Vec<C64> = (0..9).map(|k| c(k as f64 * 0.3 - 1.0, (k * k) as f64 * 0.1)).collect();
        let naive = |x: &[C64], y: &[C64]| {
            let mut o = vec![c(0.0, 0.0); 9];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        o[i * 3 + j] += x[i * 3 + k] * y[k * 3 + j];
                    }
                }
            }
            o
        };
        let adag: Vec<C64> = (0..9).map(|k| ad[(k % 3) * 3 + k / 3].conj()).collect();
        let close = |x: &[C64], y: &[C64]| x.iter().zip(y).all(|(a, b)| (a - b).norm() < 1e-14);
        assert!(close(&a.lmul(&rho, 3), &naive(&ad, &rho)));
        assert!(close(&a.rmul(&rho, 3), &naive(&rho, &ad)));
        assert!(close(&a.rmul_adj(&rho, 3), &naive(&rho, &adag)));
        assert!(close(&dense(&a.adjoint()), &adag));
        assert!(close(&dense(&a.matmul(&a)), &naive(&ad, &ad)));
        let mut y = vec![c(1.0, 0.0); 3];
        a.mul_vec_add(c(0.0, 1.0), &rho[..3], &mut y);
        for r in 0..3 {
            let mut s = c(0.0, 0.0);
            for k in 0..3 {
                s += ad[r * 3 + k] * rho[k];
            }
            assert!((y[r] - (c(1.0, 0.0) + c(0.0, 1.0) * s)).norm() < 1e-14);
        }
    }
}
