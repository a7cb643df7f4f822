//! JSON model description and its validation.
//!
//! Matrices are row-major nested lists; an entry is either a real number or
//! an `[re, im]` pair. A `d^p × d^p` matrix acts on qudits `N − p + 1, …, N`
//! with multi-index `Σ_k i_k d^{p−k}`.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::commutant::{
    collective_components, maximally_mixed, pure_product, symmetric_basis_state, CommutantIndex, PiOperator,
};
use crate::error::{Error, Result};
use crate::pparticle::{CMat, DEFAULT_P_CAP};
use crate::schedule::{lenient, Schedule};
use crate::tableaux::{GtPattern, Partition};

/// Tolerance for Hermiticity and factor-permutation symmetry checks.
pub const MATRIX_TOL: f64 = 1e-10;
/// Tolerance for the unit trace of initial states.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    pub fn value(self) -> C64 {
        match self {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

impl From<C64> for Entry {
    fn from(c: C64) -> Self {
        Entry::Complex([c.re, c.im])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matrix(pub Vec<Vec<Entry>>);

impl Matrix {
    pub fn from_cmat(m: &CMat) -> Self {
        Matrix((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect()).collect())
    }

    fn shape_problem(&self, dim: usize) -> Option<String> {
        if self.0.len() != dim || self.0.iter().any(|r| r.len() != dim) {
            let cols = self.0.first().map_or(0, Vec::len);
            Some(format!("matrix is {}×{cols}, expected {dim}×{dim}", self.0.len()))
        } else if self.0.iter().flatten().any(|e| !e.value().re.is_finite() || !e.value().im.is_finite()) {
            Some("matrix has non-finite entries".into())
        } else {
            None
        }
    }

    pub fn to_cmat(&self) -> CMat {
        let n = self.0.len();
        let m = self.0.first().map_or(0, Vec::len);
        CMat::from_fn(n, m, |i, j| self.0[i][j].value())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Local,
    Collective,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianTerm {
    pub matrix: Matrix,
    #[serde(default = "one")]
    pub p: usize,
    #[serde(default, deserialize_with = "lenient")]
    pub schedule: Schedule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Channel {
    pub scope: Scope,
    #[serde(default = "one")]
    pub p: usize,
    pub jump: Matrix,
    #[serde(default, deserialize_with = "lenient")]
    pub rate: Schedule,
}

/// One F-basis component `(ν, W, W', value)`; patterns as GT rows, top first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentEntry {
    pub nu: Vec<u32>,
    pub w: Vec<Vec<u32>>,
    pub w_prime: Vec<Vec<u32>>,
    pub value: Entry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    MaximallyMixed,
    PureProduct { amplitudes: Vec<Entry> },
    SymmetricBasisState { content: Vec<u32> },
    Components { entries: Vec<ComponentEntry> },
    Mixture { weights: Vec<f64>, states: Vec<InitialState> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Matrix>,
    #[serde(default = "one")]
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<ComponentEntry>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4,
    #[default]
    Rk45,
}

fn default_atol() -> f64 {
    1e-10
}
fn default_rtol() -> f64 {
    1e-8
}
fn default_dt_min() -> f64 {
    1e-12
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    /// Fixed step for `rk4`, initial step for `rk45`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_dt_min")]
    pub dt_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default = "one")]
    pub thinning: usize,
}

impl Default for Output {
    fn default() -> Self {
        Output { path: None, thinning: 1 }
    }
}

fn default_version() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(rename = "N", alias = "n")]
    pub n: u32,
    pub d: usize,
    #[serde(default)]
    pub hamiltonian: Vec<HamiltonianTerm>,
    #[serde(default)]
    pub channels: Vec<Channel>,
    pub initial_state: InitialState,
    #[serde(default)]
    pub observables: Vec<ObservableSpec>,
    pub grid: Grid,
    #[serde(default)]
    pub output: Output,
}

/// Largest deviation of `x` from `P x P†` over all factor permutations `P`.
pub fn factor_symmetry_defect(x: &CMat, d: usize, p: usize) -> f64 {
    let dim = d.pow(p as u32);
    let digits = |mut i: usize| {
        let mut v = vec![0; p];
        for k in (0..p).rev() {
            v[k] = i % d;
            i /= d;
        }
        v
    };
    let join = |v: &[usize]| v.iter().fold(0, |a, &x| a * d + x);
    let mut perm: Vec<usize> = (0..p).collect();
    let mut worst = 0.0f64;
    loop {
        let map: Vec<usize> = (0..dim)
            .map(|i| {
                let v = digits(i);
                join(&perm.iter().map(|&k| v[k]).collect::<Vec<_>>())
            })
            .collect();
        for i in 0..dim {
            for j in 0..dim {
                worst = worst.max((x[(map[i], map[j])] - x[(i, j)]).norm());
            }
        }
        if !next_permutation(&mut perm) {
            return worst;
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub fn hermiticity_defect(x: &CMat) -> f64 {
    (x - x.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Every violation, with the default particle cap.
    pub fn problems(&self) -> Vec<String> {
        self.problems_with_cap(DEFAULT_P_CAP)
    }

    pub fn problems_with_cap(&self, p_cap: usize) -> Vec<String> {
        let mut out = Vec::new();
        if self.version != 1 {
            out.push(format!("unsupported version {}", self.version));
        }
        if self.n == 0 {
            out.push("N must be at least 1".into());
        }
        if self.d == 0 {
            out.push("d must be at least 1".into());
        }
        let shape_ok = self.n > 0 && self.d > 0;
        let check_p = |what: &str, p: usize, out: &mut Vec<String>| {
            if p == 0 || p as u32 > self.n || p > p_cap {
                out.push(format!("{what}: p = {p} must lie in 1..={}", (self.n as usize).min(p_cap)));
                false
            } else {
                true
            }
        };
        let check_matrix = |what: &str, m: &Matrix, p: usize, hermitian: bool, out: &mut Vec<String>| {
            let Some(dim) = self.d.checked_pow(p as u32) else {
                out.push(format!("{what}: d^p overflows"));
                return;
            };
            if let Some(e) = m.shape_problem(dim) {
                out.push(format!("{what}: {e}"));
                return;
            }
            let x = m.to_cmat();
            if hermitian && hermiticity_defect(&x) > MATRIX_TOL {
                out.push(format!("{what}: matrix is not Hermitian"));
            }
            if p > 1 && factor_symmetry_defect(&x, self.d, p) > MATRIX_TOL {
                out.push(format!("{what}: matrix is not symmetric under factor permutations"));
            }
        };
        for (k, h) in self.hamiltonian.iter().enumerate() {
            let what = format!("hamiltonian[{k}]");
            if check_p(&what, h.p, &mut out) && shape_ok {
                check_matrix(&what, &h.matrix, h.p, true, &mut out);
            }
            out.extend(h.schedule.problems().into_iter().map(|e| format!("{what}.schedule: {e}")));
        }
        for (k, c) in self.channels.iter().enumerate() {
            let what = format!("channels[{k}]");
            if check_p(&what, c.p, &mut out) && shape_ok {
                check_matrix(&what, &c.jump, c.p, false, &mut out);
            }
            out.extend(c.rate.problems().into_iter().map(|e| format!("{what}.rate: {e}")));
        }
        for (k, o) in self.observables.iter().enumerate() {
            let what = format!("observables[{k}] ({})", o.name);
            match (&o.matrix, &o.components) {
                (Some(m), None) => {
                    if check_p(&what, o.p, &mut out) && shape_ok {
                        check_matrix(&what, m, o.p, false, &mut out);
                    }
                }
                (None, Some(entries)) => {
                    if shape_ok {
                        out.extend(self.component_problems(entries).into_iter().map(|e| format!("{what}: {e}")));
                    }
                }
                _ => out.push(format!("{what}: exactly one of matrix and components is required")),
            }
        }
        if self.observables.iter().enumerate().any(|(i, o)| self.observables[..i].iter().any(|q| q.name == o.name)) {
            out.push("observable names must be unique".into());
        }
        if shape_ok {
            self.state_problems(&self.initial_state, "initial_state", &mut out);
        }
        let g = &self.grid;
        if !(g.t0.is_finite() && g.t1.is_finite()) || g.t1 < g.t0 {
            out.push("grid: need finite t0 ≤ t1".into());
        }
        match (g.method, g.dt) {
            (Method::Rk4, None) => out.push("grid: rk4 requires dt".into()),
            (_, Some(dt)) if !(dt.is_finite() && dt > 0.0) => out.push("grid: dt must be positive".into()),
            _ => {}
        }
        if !(g.atol > 0.0 && g.rtol >= 0.0 && g.dt_min > 0.0) {
            out.push("grid: need atol > 0, rtol ≥ 0, dt_min > 0".into());
        }
        if self.output.thinning == 0 {
            out.push("output: thinning must be at least 1".into());
        }
        for (what, s) in self.schedules() {
            let (a, b) = s.domain();
            if s.problems().is_empty() && (g.t0 < a || g.t1 > b) {
                out.push(format!("{what}: tabulated domain [{a}, {b}] does not cover the grid"));
            }
        }
        out
    }

    fn schedules(&self) -> Vec<(String, &Schedule)> {
        let mut v: Vec<(String, &Schedule)> =
            self.hamiltonian.iter().enumerate().map(|(k, h)| (format!("hamiltonian[{k}].schedule"), &h.schedule)).collect();
        v.extend(self.channels.iter().enumerate().map(|(k, c)| (format!("channels[{k}].rate"), &c.rate)));
        v
    }

    fn component_problems(&self, entries: &[ComponentEntry]) -> Vec<String> {
        let mut out = Vec::new();
        for (k, e) in entries.iter().enumerate() {
            let nu = match Partition::new(e.nu.clone()) {
                Ok(nu) if nu.weight() == self.n && nu.len() <= self.d => nu,
                _ => {
                    out.push(format!("entry {k}: {:?} is not a partition of N = {} with ≤ d parts", e.nu, self.n));
                    continue;
                }
            };
            for (label, rows) in [("w", &e.w), ("w_prime", &e.w_prime)] {
                match GtPattern::from_rows(rows) {
                    Ok(w) if w.d() == self.d && w.shape() == nu => {}
                    _ => out.push(format!("entry {k}: {label} is not a pattern of shape {nu} with d = {}", self.d)),
                }
            }
        }
        out
    }

    fn state_problems(&self, s: &InitialState, what: &str, out: &mut Vec<String>) {
        match s {
            InitialState::MaximallyMixed => {}
            InitialState::PureProduct { amplitudes } => {
                if amplitudes.len() != self.d {
                    out.push(format!("{what}: {} amplitudes for d = {}", amplitudes.len(), self.d));
                } else {
                    let norm: f64 = amplitudes.iter().map(|a| a.value().norm_sqr()).sum();
                    if (norm - 1.0).abs() > STATE_TOL {
                        out.push(format!("{what}: amplitudes have squared norm {norm}"));
                    }
                }
            }
            InitialState::SymmetricBasisState { content } => {
                if content.len() != self.d || content.iter().sum::<u32>() != self.n {
                    out.push(format!("{what}: content must have d entries summing to N"));
                }
            }
            InitialState::Components { entries } => {
                let errs = self.component_problems(entries);
                out.extend(errs.into_iter().map(|e| format!("{what}: {e}")));
            }
            InitialState::Mixture { weights, states } => {
                if weights.len() != states.len() || states.is_empty() {
                    out.push(format!("{what}: mixture needs one weight per state"));
                }
                if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                    out.push(format!("{what}: mixture weights must be non-negative"));
                }
                if (weights.iter().sum::<f64>() - 1.0).abs() > STATE_TOL {
                    out.push(format!("{what}: mixture weights must sum to 1"));
                }
                for (k, st) in states.iter().enumerate() {
                    self.state_problems(st, &format!("{what}.states[{k}]"), out);
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModel(problems))
        }
    }

    pub fn index(&self) -> Result<Arc<CommutantIndex>> {
        Ok(Arc::new(CommutantIndex::new(self.n, self.d)?))
    }

    pub fn initial_components(&self, index: &Arc<CommutantIndex>) -> Result<PiOperator> {
        let rho = state_components(&self.initial_state, index)?;
        let tr = rho.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("initial state has trace {tr}")));
        }
        if rho.hermiticity_defect() > STATE_TOL {
            return Err(Error::InvalidState("initial state is not Hermitian".into()));
        }
        Ok(rho)
    }

    /// Observables as PI operators, in declaration order.
    pub fn observable_components(&self, index: &Arc<CommutantIndex>) -> Result<Vec<(String, PiOperator)>> {
        self.observables
            .iter()
            .map(|o| {
                let op = match (&o.matrix, &o.components) {
                    (Some(m), _) => collective_components(&m.to_cmat(), o.p, index)?,
                    (None, Some(e)) => explicit_components(e, index)?,
                    (None, None) => return Err(Error::InvalidModel(vec![format!("observable {} is empty", o.name)])),
                };
                Ok((o.name.clone(), op))
            })
            .collect()
    }
}

pub fn explicit_components(entries: &[ComponentEntry], index: &Arc<CommutantIndex>) -> Result<PiOperator> {
    let mut op = PiOperator::zeros(index);
    for e in entries {
        let nu = Partition::new(e.nu.clone())?;
        let w = GtPattern::from_rows(&e.w)?;
        let w2 = GtPattern::from_rows(&e.w_prime)?;
        let flat = index
            .locate(&nu, &w, &w2)
            .ok_or_else(|| Error::InvalidPattern(format!("component ({nu}, {w}, {w2}) is not in the index")))?;
        op.data[flat] += e.value.value();
    }
    Ok(op)
}

fn state_components(s: &InitialState, index: &Arc<CommutantIndex>) -> Result<PiOperator> {
    match s {
        InitialState::MaximallyMixed => Ok(maximally_mixed(index)),
        InitialState::PureProduct { amplitudes } => {
            pure_product(index, &amplitudes.iter().map(|a| a.value()).collect::<Vec<_>>())
        }
        InitialState::SymmetricBasisState { content } => symmetric_basis_state(index, content),
        InitialState::Components { entries } => explicit_components(entries, index),
        InitialState::Mixture { weights, states } => {
            let mut acc = PiOperator::zeros(index);
            for (w, st) in weights.iter().zip(states) {
                acc = acc.add(&state_components(st, index)?.scale(C64::new(*w, 0.0)))?;
            }
            Ok(acc)
        }
    }
}

/// Reads, parses and validates a model file.
pub fn load_and_validate(path: impl AsRef<Path>) -> Result<ModelSpec> {
    let text = std::fs::read_to_string(path)?;
    let spec = ModelSpec::from_json(&text)?;
    spec.validate()?;
    Ok(spec)
}
