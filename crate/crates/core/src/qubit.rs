//! Closed forms for qubits (`d = 2`).
//!
//! A label is `ν = (ν1, ν2)` with the unique pattern of `n0` zeros,
//! `ν2 ≤ n0 ≤ ν1`. Everything here is computed from elementary formulas so
//! that it can serve as a reference for the general machinery.

use crate::error::{Error, Result};

/// `ν = (ν1, ν2)` with `n0` zeros.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QubitLabel {
    pub nu1: u32,
    pub nu2: u32,
    pub n0: u32,
}

impl QubitLabel {
    pub fn new(nu1: u32, nu2: u32, n0: u32) -> Result<Self> {
        if nu1 < nu2 || nu1 == 0 && nu2 == 0 && n0 != 0 || n0 < nu2 || n0 > nu1 {
            return Err(Error::InvalidPattern(format!("no qubit pattern ({nu1},{nu2}) with n0 = {n0}")));
        }
        Ok(QubitLabel { nu1, nu2, n0 })
    }

    pub fn n(&self) -> u32 {
        self.nu1 + self.nu2
    }

    pub fn delta(&self) -> u32 {
        self.nu1 - self.nu2
    }
}

fn sqrt_or_zero(x: f64) -> f64 {
    if x > 0.0 {
        x.sqrt()
    } else {
        0.0
    }
}

/// `ζ_{kτ}^{ν,n0} = ⟨W_{ν^{−τ}}^{n0+k−1}, k | W_ν^{n0}⟩`.
pub fn zeta(k: u32, tau: u32, nu1: u32, nu2: u32, n0: u32) -> f64 {
    let (nu1, nu2, n0) = (nu1 as f64, nu2 as f64, n0 as f64);
    let dn = nu1 - nu2;
    match (k, tau) {
        (0, 1) if dn > 0.0 => sqrt_or_zero((n0 - nu2) / dn),
        (1, 1) if dn > 0.0 => sqrt_or_zero((nu1 - n0) / dn),
        (0, 2) if nu2 > 0.0 => -sqrt_or_zero((nu1 + 1.0 - n0) / (dn + 2.0)),
        (1, 2) if nu2 > 0.0 => sqrt_or_zero((n0 - nu2 + 1.0) / (dn + 2.0)),
        _ => 0.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficient {
    A,
    B,
    D,
}

/// `A_q`, `B_q` or `D_q` at `(ν, n0)`; negative radicands give 0.
pub fn abd(q: i32, which: Coefficient, nu1: u32, nu2: u32, n0: u32) -> f64 {
    let (a, b, n) = (nu1 as f64, nu2 as f64, n0 as f64);
    match (which, q) {
        (Coefficient::A, 1) => sqrt_or_zero((a - n + 1.0) * (n - b)),
        (Coefficient::A, 0) => (a + b - 2.0 * n) / 2.0,
        (Coefficient::A, -1) => sqrt_or_zero((a - n) * (n + 1.0 - b)),
        (Coefficient::B, 1) => sqrt_or_zero((n - b) * (n - b - 1.0)),
        (Coefficient::B, 0) => sqrt_or_zero((a - n) * (n - b)),
        (Coefficient::B, -1) => -sqrt_or_zero((a - n - 1.0) * (a - n)),
        (Coefficient::D, 1) => -sqrt_or_zero((a - n + 1.0) * (a - n + 2.0)),
        (Coefficient::D, 0) => sqrt_or_zero((a - n + 1.0) * (n - b + 1.0)),
        (Coefficient::D, -1) => sqrt_or_zero((n - b + 1.0) * (n - b + 2.0)),
        _ => 0.0,
    }
}

/// `s_{+1} = |1⟩⟨0|`, `s_{−1} = |0⟩⟨1|`, `s_0 = (|1⟩⟨1| − |0⟩⟨0|)/2`, row-major.
pub fn s_matrix(q: i32) -> [[f64; 2]; 2] {
    match q {
        1 => [[0.0, 0.0], [1.0, 0.0]],
        -1 => [[0.0, 1.0], [0.0, 0.0]],
        0 => [[-0.5, 0.0], [0.0, 0.5]],
        _ => [[0.0; 2]; 2],
    }
}

fn binom(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `f^ν = (Δν + 1)/(ν1 + 1) · binom(N, ν2)`.
pub fn f_nu(nu1: u32, nu2: u32) -> f64 {
    (nu1 - nu2 + 1) as f64 / (nu1 + 1) as f64 * binom(nu1 + nu2, nu2)
}

/// `d_N^J = binom(N, N/2 − J)(2J + 1)/(J + 1 + N/2)`.
pub fn d_nj(n: u32, j: f64) -> f64 {
    let k = n as f64 / 2.0 - j;
    binom(n, k.round() as u32) * (2.0 * j + 1.0) / (j + 1.0 + n as f64 / 2.0)
}

/// `(ν, n0) → (J, M)` with `J = Δν/2`, `M = N/2 − n0`.
pub fn dicke_map(label: QubitLabel) -> (f64, f64) {
    (label.delta() as f64 / 2.0, label.n() as f64 / 2.0 - label.n0 as f64)
}

fn half_integer(x: f64) -> Option<i64> {
    let two = 2.0 * x;
    (two.fract() == 0.0 && two.is_finite()).then_some(two as i64)
}

/// `(N, J, M) → (ν, n0)`.
pub fn dicke_inverse(n: u32, j: f64, m: f64) -> Result<QubitLabel> {
    let bad = || Error::InvalidPattern(format!("(N, J, M) = ({n}, {j}, {m}) is not a valid Dicke label"));
    let (tj, tm) = (half_integer(j).ok_or_else(bad)?, half_integer(m).ok_or_else(bad)?);
    let tn = 2 * n as i64;
    // 2ν1 = N + 2J etc., all doubled to stay integral
    let (a2, b2, z2) = (n as i64 + tj, n as i64 - tj, n as i64 - tm);
    if tj < 0 || tm.abs() > tj || a2 % 2 != 0 || z2 % 2 != 0 || b2 < 0 || tj > tn {
        return Err(bad());
    }
    QubitLabel::new((a2 / 2) as u32, (b2 / 2) as u32, (z2 / 2) as u32).map_err(|_| bad())
}

/// The four rows of the table of single-qubit g-operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `λ = ν`, `μ = ν^{−1}`.
    SameFirst,
    /// `λ = ν`, `μ = ν^{−2}`.
    SameSecond,
    /// `λ = ν_b = (ν1 − 1, ν2 + 1)`, `μ = ν^{−1}`.
    Lower,
    /// `λ = ν_c = (ν1 + 1, ν2 − 1)`, `μ = ν^{−2}`.
    Upper,
}

impl Branch {
    pub const ALL: [Branch; 4] = [Branch::SameFirst, Branch::SameSecond, Branch::Lower, Branch::Upper];

    /// `(λ, μ)` shapes, `None` when either is not a valid partition.
    pub fn shapes(self, nu1: u32, nu2: u32) -> Option<((u32, u32), (u32, u32))> {
        let mu1 = (nu1 > nu2).then(|| (nu1 - 1, nu2));
        let mu2 = (nu2 > 0).then(|| (nu1, nu2 - 1));
        match self {
            Branch::SameFirst => Some(((nu1, nu2), mu1?)),
            Branch::SameSecond => Some(((nu1, nu2), mu2?)),
            Branch::Lower => (nu1 >= nu2 + 2).then(|| ((nu1 - 1, nu2 + 1), (nu1 - 1, nu2))),
            Branch::Upper => (nu2 > 0).then(|| ((nu1 + 1, nu2 - 1), (nu1, nu2 - 1))),
        }
    }
}

/// `Tr[g_μ^{(λ,W^{n0−q'}; ν,W^{n0})†} s_q]` from the closed forms.
pub fn table_trace(branch: Branch, q: i32, q_prime: i32, label: QubitLabel) -> f64 {
    if q != q_prime || branch.shapes(label.nu1, label.nu2).is_none() {
        return 0.0;
    }
    let (a, b, n) = (label.nu1, label.nu2, label.n0);
    let dn = label.delta() as f64;
    match branch {
        Branch::SameFirst => abd(q, Coefficient::A, a, b, n) / dn,
        Branch::SameSecond => -abd(q, Coefficient::A, a, b, n) / (dn + 2.0),
        Branch::Lower => abd(q, Coefficient::B, a, b, n) / dn,
        Branch::Upper => abd(q, Coefficient::D, a, b, n) / (dn + 2.0),
    }
}

/// One term `c · F_λ^{(W^{n0_λ}, W^{n0'_λ})}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityTerm {
    pub lambda: (u32, u32),
    pub n0: u32,
    pub n0_prime: u32,
    pub coefficient: f64,
}

/// Expansion of `Σ_n s_q^{(n)} F_ν^{(W^{n0}, W^{n0'})} s_r^{(n)†}`; invalid
/// or vanishing terms are omitted.
pub fn qubit_identity_coefficients(q: i32, r: i32, nu1: u32, nu2: u32, n0: u32, n0_prime: u32) -> Vec<IdentityTerm> {
    let (a, b) = (nu1 as f64, nu2 as f64);
    let dn = a - b;
    let fnu = f_nu(nu1, nu2);
    let (m0, m0p) = (n0 as i64 - q as i64, n0_prime as i64 - r as i64);
    let mut out = Vec::new();
    let mut push = |lambda: (u32, u32), c: f64| {
        let ok = |m: i64| m >= lambda.1 as i64 && m <= lambda.0 as i64;
        if c != 0.0 && ok(m0) && ok(m0p) {
            out.push(IdentityTerm { lambda, n0: m0 as u32, n0_prime: m0p as u32, coefficient: c });
        }
    };
    if nu1 > nu2 {
        let c = (a + b + 2.0) / (dn * (dn + 2.0))
            * abd(q, Coefficient::A, nu1, nu2, n0)
            * abd(r, Coefficient::A, nu1, nu2, n0_prime);
        push((nu1, nu2), c);
    }
    if nu1 >= nu2 + 2 {
        let lam = (nu1 - 1, nu2 + 1);
        let c = (a + 1.0) / (dn * (dn + 1.0))
            * abd(q, Coefficient::B, nu1, nu2, n0)
            * abd(r, Coefficient::B, nu1, nu2, n0_prime)
            * (fnu / f_nu(lam.0, lam.1)).sqrt();
        push(lam, c);
    }
    if nu2 > 0 {
        let lam = (nu1 + 1, nu2 - 1);
        let c = b / ((dn + 1.0) * (dn + 2.0))
            * abd(q, Coefficient::D, nu1, nu2, n0)
            * abd(r, Coefficient::D, nu1, nu2, n0_prime)
            * (fnu / f_nu(lam.0, lam.1)).sqrt();
        push(lam, c);
    }
    out
}
