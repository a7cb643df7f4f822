//! 3ν symbols, single-qudit g-operators and the associated one-qudit states.

use nalgebra::DMatrix;

use crate::cgc::{cgc, cgc_table};
use crate::error::{Error, Result};
use crate::tableaux::{swt_basis, GtPattern, Partition};

pub type RMat = DMatrix<f64>;

/// `{ν_L, ν, ν_R}`: true iff `ν ∈ {ν_L^-} ∩ {ν_R^-}`.
pub fn triangular_delta(nu_l: &Partition, nu: &Partition, nu_r: &Partition) -> bool {
    nu_l.removals().contains(nu) && nu_r.removals().contains(nu)
}

/// 3ν symbol with its labels.
#[derive(Clone, Debug)]
pub struct ThreeNuSymbol {
    pub nu_l: Partition,
    pub nu: Partition,
    pub nu_r: Partition,
    pub w_l: GtPattern,
    pub w: GtPattern,
    pub w_r: GtPattern,
    /// `d × d`, entry `(i, j) = ⟨W, i|W_L⟩ ⟨W, j|W_R⟩`.
    pub matrix: RMat,
}

fn valid_for(shape: &Partition, w: &GtPattern, d: usize) -> bool {
    w.d() == d && w.is_valid() && w.shape() == *shape
}

/// Builds the 3ν symbol; any pattern that is not a valid tableau of its
/// shape yields the null matrix.
pub fn threenu_symbol(
    nu_l: &Partition,
    w_l: &GtPattern,
    nu: &Partition,
    w: &GtPattern,
    nu_r: &Partition,
    w_r: &GtPattern,
    d: usize,
) -> Result<ThreeNuSymbol> {
    let mut matrix = RMat::zeros(d, d);
    if valid_for(nu_l, w_l, d) && valid_for(nu, w, d) && valid_for(nu_r, w_r, d) && triangular_delta(nu_l, nu, nu_r) {
        let left: Vec<f64> = (0..d).map(|i| cgc(w, i, w_l)).collect::<Result<_>>()?;
        let right: Vec<f64> = (0..d).map(|j| cgc(w, j, w_r)).collect::<Result<_>>()?;
        for i in 0..d {
            for j in 0..d {
                matrix[(i, j)] = left[i] * right[j];
            }
        }
    }
    Ok(ThreeNuSymbol {
        nu_l: nu_l.clone(),
        nu: nu.clone(),
        nu_r: nu_r.clone(),
        w_l: w_l.clone(),
        w: w.clone(),
        w_r: w_r.clone(),
        matrix,
    })
}

/// `g_μ^{(λ,W_λ; ν,W_ν)} = Σ_{W_μ}` of the 3ν symbols, as a `d × d` matrix.
pub fn g_operator(mu: &Partition, w_lambda: &GtPattern, w_nu: &GtPattern, d: usize) -> Result<RMat> {
    let lambda = w_lambda.shape();
    let nu = w_nu.shape();
    let mut g = RMat::zeros(d, d);
    if !triangular_delta(&lambda, mu, &nu) {
        return Ok(g);
    }
    let tl = cgc_table(&lambda, d)?;
    let tn = cgc_table(&nu, d)?;
    let (Some(il), Some(inu)) = (swt_basis(&lambda, d).index_of(w_lambda), swt_basis(&nu, d).index_of(w_nu)) else {
        return Ok(g);
    };
    let ml = tl.mus.iter().position(|m| m == mu).expect("μ ∈ {λ^-}");
    let mn = tn.mus.iter().position(|m| m == mu).expect("μ ∈ {ν^-}");
    for a in tl.rows[il].iter().filter(|e| e.mu == ml) {
        for b in tn.rows[inu].iter().filter(|e| e.mu == mn && e.w_mu == a.w_mu) {
            g[(a.j, b.j)] += a.value * b.value;
        }
    }
    Ok(g)
}

/// One-qudit state `ρ_μ^{(ν,W_ν)} = g_μ^{(ν,W_ν;ν,W_ν)}`.
pub fn rho_state(mu: &Partition, w_nu: &GtPattern, d: usize) -> Result<RMat> {
    let nu = w_nu.shape();
    if !nu.removals().contains(mu) {
        return Err(Error::InvalidState(format!("{mu} is not an inner-corner removal of {nu}")));
    }
    g_operator(mu, w_nu, w_nu, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableaux::{partitions_of, swt_enumerate};

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn qubit(nu: &[u32], n0: u32) -> GtPattern {
        swt_enumerate(&p(nu), 2).into_iter().find(|w| w.m(1, 1) == n0).unwrap()
    }

    fn close(a: &RMat, b: &RMat, tol: f64) -> bool {
        (a - b).abs().max() <= tol
    }

    #[test]
    fn triangular_delta_examples() {
        assert!(triangular_delta(&p(&[2, 1]), &p(&[2]), &p(&[3])));
        assert!(!triangular_delta(&p(&[3]), &p(&[2]), &p(&[1, 1, 1])));
        for nu in partitions_of(5, 3) {
            for m in nu.removals() {
                assert!(triangular_delta(&nu, &m, &nu));
            }
        }
    }

    #[test]
    fn threenu_examples() {
        let w2 = qubit(&[2], 1);
        let w1 = qubit(&[1], 0);
        let s = threenu_symbol(&p(&[2]), &w2, &p(&[1]), &w1, &p(&[2]), &w2, 2).unwrap();
        assert!(close(&s.matrix, &RMat::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.0]), 1e-15));
        let z = threenu_symbol(&p(&[3]), &qubit(&[3], 1), &p(&[2]), &qubit(&[2], 1), &p(&[1, 1]), &qubit(&[1, 1], 1), 2);
        assert_eq!(z.unwrap().matrix, RMat::zeros(2, 2));
        // invalid pattern for its declared shape gives the null matrix
        let bad = threenu_symbol(&p(&[2]), &qubit(&[1], 0), &p(&[1]), &w1, &p(&[2]), &w2, 2).unwrap();
        assert_eq!(bad.matrix, RMat::zeros(2, 2));
    }

    #[test]
    fn threenu_transpose_symmetry() {
        let d = 3;
        for lam in partitions_of(3, d) {
            for nu in partitions_of(3, d) {
                for mu in lam.removals().into_iter().filter(|m| nu.removals().contains(m)) {
                    for wl in swt_enumerate(&lam, d) {
                        for wr in swt_enumerate(&nu, d) {
                            for w in swt_enumerate(&mu, d) {
                                let a = threenu_symbol(&lam, &wl, &mu, &w, &nu, &wr, d).unwrap().matrix;
                                let b = threenu_symbol(&nu, &wr, &mu, &w, &lam, &wl, d).unwrap().matrix;
                                assert_eq!(a, b.transpose());
                                assert!(a.iter().filter(|x| **x != 0.0).count() <= 1);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn g_operator_examples() {
        let w = qubit(&[2], 1);
        let g = g_operator(&p(&[1]), &w, &w, 2).unwrap();
        assert!(close(&g, &RMat::from_diagonal_element(2, 2, 0.5), 1e-15));
        let w0 = qubit(&[2], 0);
        let g = g_operator(&p(&[1]), &w0, &w0, 2).unwrap();
        assert!(close(&g, &RMat::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]), 1e-15));
        for wl in swt_enumerate(&p(&[3]), 2) {
            for wn in swt_enumerate(&p(&[2, 1]), 2) {
                assert!(g_operator(&p(&[2]), &wl, &wn, 2).unwrap().trace().abs() < 1e-14);
            }
        }
    }

    #[test]
    fn g_operator_matches_threenu_sum() {
        let d = 3;
        for lam in partitions_of(4, d) {
            for nu in partitions_of(4, d) {
                for mu in partitions_of(3, d) {
                    for wl in swt_enumerate(&lam, d) {
                        for wn in swt_enumerate(&nu, d) {
                            let g = g_operator(&mu, &wl, &wn, d).unwrap();
                            let mut brute = RMat::zeros(d, d);
                            for w in swt_enumerate(&mu, d) {
                                brute += threenu_symbol(&lam, &wl, &mu, &w, &nu, &wn, d).unwrap().matrix;
                            }
                            assert!(close(&g, &brute, 1e-14));
                            let adj = g_operator(&mu, &wn, &wl, d).unwrap();
                            assert_eq!(g.transpose(), adj);
                            assert!(g.rank(1e-12) <= d);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn trace_rules() {
        for d in 1..=3 {
            for n in 1..=5 {
                let shapes = partitions_of(n, d);
                for lam in &shapes {
                    for nu in &shapes {
                        for mu in partitions_of(n - 1, d) {
                            let delta = triangular_delta(lam, &mu, nu);
                            for wl in swt_enumerate(lam, d) {
                                for wn in swt_enumerate(nu, d) {
                                    // sum over W_μ of 3ν traces equals the g trace
                                    let tr = g_operator(&mu, &wl, &wn, d).unwrap().trace();
                                    let expect = if delta && lam == nu && wl == wn { 1.0 } else { 0.0 };
                                    assert!((tr - expect).abs() <= 1e-10, "{lam} {mu} {nu}");
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rho_state_examples_and_positivity() {
        let half = RMat::from_diagonal_element(2, 2, 0.5);
        assert!(close(&rho_state(&p(&[1]), &qubit(&[2], 1), 2).unwrap(), &half, 1e-15));
        assert!(close(&rho_state(&p(&[1]), &qubit(&[1, 1], 1), 2).unwrap(), &half, 1e-15));
        for n in 1..6u32 {
            let top = GtPattern::symmetric(&[n, 0]);
            let r = rho_state(&p(&[n - 1]), &top, 2).unwrap();
            assert!(close(&r, &RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]), 1e-15));
        }
        assert!(rho_state(&p(&[2]), &qubit(&[1, 1], 1), 2).is_err());
        for d in 1..=3 {
            for n in 1..=6 {
                for nu in partitions_of(n, d) {
                    for w in swt_enumerate(&nu, d) {
                        for mu in nu.removals() {
                            let r = rho_state(&mu, &w, d).unwrap();
                            assert!((r.trace() - 1.0).abs() <= 1e-12);
                            let ev = r.clone().symmetric_eigenvalues();
                            assert!(ev.min() >= -1e-12);
                        }
                    }
                }
            }
        }
    }
}
