//! p-particle generalization: partition paths, generalized 3ν symbols,
//! p-qudit g-operators and K-coefficients.
//!
//! Two routes are provided. The direct route ([`generalized_threenu`],
//! [`generalized_g`], [`k_p_coefficient`]) follows the definitions literally
//! and sums over every interior pattern assignment. [`PathEngine`] is the
//! production route: it grows CGC chains upward from every centre pattern
//! at level `N − p` and pairs chains that share a centre.
//!
//! Multi-indices of `d^p × d^p` matrices follow the qudit order
//! `N − p + 1, …, N`: `i = Σ_k i_k d^{p−k}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, LazyLock, RwLock};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::cgc::{cgc, cgc_table};
use crate::commutant::CommutantIndex;
use crate::liouvillian::{assemble_terms, LiouvillianMatrix};
use crate::model::ModelSpec;
use crate::error::{Error, Result};
use crate::tableaux::{binomial, partitions_of, swt_basis, swt_enumerate, syt_count, GtPattern, Partition};
use crate::threenu::RMat;

pub type CMat = DMatrix<C64>;

/// Default cap on the particle number of a channel.
pub const DEFAULT_P_CAP: usize = 3;

/// `(ν_{l,p−1}, …, ν_{l,1}, ν_c, ν_{r,1}, …, ν_{r,p−1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionPath(pub Vec<Partition>);

impl PartitionPath {
    pub fn p(&self) -> usize {
        self.0.len().div_ceil(2)
    }

    pub fn center(&self) -> &Partition {
        &self.0[self.p() - 1]
    }

    pub fn reversed(&self) -> PartitionPath {
        PartitionPath(self.0.iter().rev().cloned().collect())
    }

    pub fn is_palindromic(&self) -> bool {
        *self == self.reversed()
    }

    /// Left chain `ν_{l,0} = ν_c, ν_{l,1}, …, ν_{l,p−1}`.
    fn left(&self) -> Vec<&Partition> {
        self.0[..self.p()].iter().rev().collect()
    }

    /// Right chain `ν_{r,0} = ν_c, ν_{r,1}, …, ν_{r,p−1}`.
    fn right(&self) -> Vec<&Partition> {
        self.0[self.p() - 1..].iter().collect()
    }

    /// `{ν_L, path, ν_R}`.
    pub fn delta(&self, nu_l: &Partition, nu_r: &Partition) -> bool {
        let chain_ok = |chain: Vec<&Partition>, top: &Partition| {
            let mut full = chain;
            full.push(top);
            full.windows(2).all(|w| w[1].removals().contains(w[0]))
        };
        chain_ok(self.left(), nu_l) && chain_ok(self.right(), nu_r)
    }
}

fn descents(top: &Partition, p: usize) -> Vec<Vec<Partition>> {
    // chains [top^-, top^{--}, …] of length p
    let mut out = vec![Vec::new()];
    for _ in 0..p {
        out = out
            .into_iter()
            .flat_map(|c: Vec<Partition>| {
                let last = c.last().cloned().unwrap_or_else(|| top.clone());
                last.removals().into_iter().map(move |m| {
                    let mut c = c.clone();
                    c.push(m);
                    c
                })
            })
            .collect();
    }
    out
}

/// All paths with `{λ, path, ν} = 1`, sorted.
pub fn enumerate_paths(lambda: &Partition, nu: &Partition, p: usize) -> Vec<PartitionPath> {
    let mut out = Vec::new();
    for l in descents(lambda, p) {
        for r in descents(nu, p) {
            if l.last() != r.last() {
                continue;
            }
            // l = [ν_{l,p−1}, …, ν_{l,1}, ν_c] read top-down
            let mut shapes: Vec<Partition> = l.clone();
            shapes.extend(r[..p - 1].iter().rev().cloned());
            out.push(PartitionPath(shapes));
        }
    }
    out.sort();
    out.dedup();
    out
}

fn multi_digits(mut idx: usize, d: usize, p: usize) -> Vec<usize> {
    let mut digits = vec![0; p];
    for k in (0..p).rev() {
        digits[k] = idx % d;
        idx /= d;
    }
    digits
}

/// Generalized 3ν symbol for one interior pattern assignment `w_path`
/// (same order as the path). Invalid patterns give the null matrix.
pub fn generalized_threenu(
    path: &PartitionPath,
    w_path: &[GtPattern],
    nu_l: &Partition,
    w_l: &GtPattern,
    nu_r: &Partition,
    w_r: &GtPattern,
    d: usize,
) -> Result<RMat> {
    let p = path.p();
    let dim = d.pow(p as u32);
    let mut out = RMat::zeros(dim, dim);
    let valid = |s: &Partition, w: &GtPattern| w.d() == d && w.is_valid() && w.shape() == *s;
    if w_path.len() != path.0.len()
        || !path.0.iter().zip(w_path).all(|(s, w)| valid(s, w))
        || !valid(nu_l, w_l)
        || !valid(nu_r, w_r)
        || !path.delta(nu_l, nu_r)
    {
        return Ok(out);
    }
    let mut wl: Vec<&GtPattern> = w_path[..p].iter().rev().collect();
    wl.push(w_l);
    let mut wr: Vec<&GtPattern> = w_path[p - 1..].iter().collect();
    wr.push(w_r);
    // factor tables: lf[k][i] = ⟨W_{l,k−1}, i | W_{l,k}⟩
    let table = |chain: &[&GtPattern]| -> Result<Vec<Vec<f64>>> {
        (1..=p).map(|k| (0..d).map(|i| cgc(chain[k - 1], i, chain[k])).collect()).collect()
    };
    let lf = table(&wl)?;
    let rf = table(&wr)?;
    for a in 0..dim {
        let ia = multi_digits(a, d, p);
        let left: f64 = (0..p).map(|k| lf[k][ia[k]]).product();
        if left == 0.0 {
            continue;
        }
        for b in 0..dim {
            let jb = multi_digits(b, d, p);
            out[(a, b)] = left * (0..p).map(|k| rf[k][jb[k]]).product::<f64>();
        }
    }
    Ok(out)
}

/// `g_path^{(ν_L,W_L; ν_R,W_R)}`: sum of generalized 3ν symbols over every
/// interior pattern assignment.
pub fn generalized_g(path: &PartitionPath, w_l: &GtPattern, w_r: &GtPattern, d: usize) -> Result<RMat> {
    let p = path.p();
    let dim = d.pow(p as u32);
    let (nu_l, nu_r) = (w_l.shape(), w_r.shape());
    let mut g = RMat::zeros(dim, dim);
    if !path.delta(&nu_l, &nu_r) {
        return Ok(g);
    }
    let choices: Vec<Vec<GtPattern>> = path.0.iter().map(|s| swt_enumerate(s, d)).collect();
    let mut pick = vec![0usize; choices.len()];
    loop {
        let ws: Vec<GtPattern> = pick.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
        g += generalized_threenu(path, &ws, &nu_l, w_l, &nu_r, w_r, d)?;
        let mut k = 0;
        loop {
            if k == pick.len() {
                return Ok(g);
            }
            pick[k] += 1;
            if pick[k] < choices[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

fn trace_against(g: &RMat, x: &CMat) -> C64 {
    g.iter().zip(x.iter()).map(|(a, b)| b * *a).sum()
}

fn r_factor(n: u32, p: usize, center: &Partition, top: &Partition) -> Result<f64> {
    Ok(binomial(n as u64, p as u64)? as f64 * syt_count(center)? as f64 / syt_count(top)? as f64)
}

fn check_p(p: usize, n: u32) -> Result<()> {
    if p == 0 || p as u32 > n {
        return Err(Error::Dimension(format!("p = {p} must lie in 1..=N = {n}")));
    }
    Ok(())
}

/// `K_{X_p,Y_p}^{(λ,W_λ,W'_λ; ν,W_ν,W'_ν)}` by direct summation over paths.
pub fn k_p_coefficient(
    x: &CMat,
    y: &CMat,
    w_lambda: &GtPattern,
    w2_lambda: &GtPattern,
    w_nu: &GtPattern,
    w2_nu: &GtPattern,
    p: usize,
) -> Result<C64> {
    let (lambda, nu) = (w_lambda.shape(), w_nu.shape());
    let n = nu.weight();
    check_p(p, n)?;
    let d = w_nu.d();
    let dim = d.pow(p as u32);
    if x.shape() != (dim, dim) || y.shape() != (dim, dim) {
        return Err(Error::Dimension(format!("expected {dim}×{dim} matrices")));
    }
    let mut acc = C64::new(0.0, 0.0);
    for path in enumerate_paths(&lambda, &nu, p) {
        let tx = trace_against(&generalized_g(&path, w_lambda, w_nu, d)?, x);
        let ty = trace_against(&generalized_g(&path, w2_lambda, w2_nu, d)?, y);
        let r = (r_factor(n, p, path.center(), &lambda)? * r_factor(n, p, path.center(), &nu)?).sqrt();
        acc += tx * ty.conj() * r;
    }
    Ok(acc)
}

/// One up-chain from a centre pattern to a pattern at level `N`.
#[derive(Clone, Debug)]
struct Chain {
    /// Index into the centre's list of distinct shape sequences.
    seq: usize,
    top: usize,
    multi: usize,
    coef: f64,
}

#[derive(Debug)]
struct Center {
    shape: Partition,
    f: f64,
    /// Shape sequences for levels `N − p + 1..=N`; the last entry is the top shape.
    seqs: Vec<Vec<Partition>>,
    top_block: Vec<usize>,
    /// Chains grouped by centre pattern.
    chains: Vec<Vec<Chain>>,
}

/// Path traces `T^X_path(W_λ, W_ν) = Tr[g_path^{(λ,W_λ;ν,W_ν)†} X]` keyed by
/// `(centre, left sequence, right sequence)`.
pub struct PathTraces {
    entries: BTreeMap<(usize, usize, usize), CMat>,
}

/// Production route for K-coefficients of a fixed `(N, d, p)`.
#[derive(Debug)]
pub struct PathEngine {
    pub n: u32,
    pub d: usize,
    pub p: usize,
    /// Shapes at level `N` in canonical order.
    pub shapes: Vec<Partition>,
    f_top: Vec<f64>,
    binom: f64,
    centers: Vec<Center>,
}

type UpMap = HashMap<(Partition, usize), Vec<(Partition, usize, usize, f64)>>;

fn up_map(level: u32, d: usize) -> Result<UpMap> {
    let mut map: UpMap = HashMap::new();
    for lam in partitions_of(level, d) {
        let t = cgc_table(&lam, d)?;
        for (wl, row) in t.rows.iter().enumerate() {
            for e in row {
                map.entry((t.mus[e.mu].clone(), e.w_mu)).or_default().push((lam.clone(), wl, e.j, e.value));
            }
        }
    }
    Ok(map)
}

impl PathEngine {
    pub fn new(n: u32, d: usize, p: usize) -> Result<Self> {
        check_p(p, n)?;
        let shapes = partitions_of(n, d);
        let f_top = shapes.iter().map(|s| syt_count(s).map(|f| f as f64)).collect::<Result<Vec<_>>>()?;
        let ups: Vec<UpMap> = ((n - p as u32 + 1)..=n).map(|lvl| up_map(lvl, d)).collect::<Result<_>>()?;
        let shape_pos: HashMap<&Partition, usize> = shapes.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut centers = Vec::new();
        for shape in partitions_of(n - p as u32, d) {
            let basis = swt_basis(&shape, d);
            let mut seqs: Vec<Vec<Partition>> = Vec::new();
            let mut seq_pos: HashMap<Vec<Partition>, usize> = HashMap::new();
            let mut chains = Vec::with_capacity(basis.len());
            for wc in 0..basis.len() {
                let mut frontier = vec![(Vec::<Partition>::new(), shape.clone(), wc, 0usize, 1.0f64)];
                for up in &ups {
                    let mut next = Vec::new();
                    for (seq, s, w, multi, coef) in &frontier {
                        for (lam, wl, j, v) in up.get(&(s.clone(), *w)).map(Vec::as_slice).unwrap_or(&[]) {
                            let mut seq = seq.clone();
                            seq.push(lam.clone());
                            next.push((seq, lam.clone(), *wl, multi * d + j, coef * v));
                        }
                    }
                    frontier = next;
                }
                let list = frontier
                    .into_iter()
                    .map(|(seq, _, top, multi, coef)| {
                        let id = *seq_pos.entry(seq.clone()).or_insert_with(|| {
                            seqs.push(seq);
                            seqs.len() - 1
                        });
                        Chain { seq: id, top, multi, coef }
                    })
                    .collect();
                chains.push(list);
            }
            let top_block = seqs.iter().map(|s| shape_pos[s.last().expect("p ≥ 1")]).collect();
            centers.push(Center { f: syt_count(&shape)? as f64, shape, seqs, top_block, chains });
        }
        Ok(PathEngine { n, d, p, binom: binomial(n as u64, p as u64)? as f64, shapes, f_top, centers })
    }

    fn check(&self, x: &CMat) -> Result<()> {
        let dim = self.d.pow(self.p as u32);
        if x.shape() != (dim, dim) {
            return Err(Error::Dimension(format!(
                "{}-particle matrix must be {dim}×{dim}, got {}×{}",
                self.p,
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(())
    }

    fn block_dim(&self, b: usize) -> usize {
        swt_basis(&self.shapes[b], self.d).len()
    }

    pub fn traces(&self, x: &CMat) -> Result<PathTraces> {
        self.check(x)?;
        let mut entries: BTreeMap<(usize, usize, usize), CMat> = BTreeMap::new();
        for (ci, c) in self.centers.iter().enumerate() {
            for group in &c.chains {
                for a in group {
                    for b in group {
                        let v = x[(a.multi, b.multi)] * (a.coef * b.coef);
                        if v == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let m = entries.entry((ci, a.seq, b.seq)).or_insert_with(|| {
                            CMat::zeros(self.block_dim(c.top_block[a.seq]), self.block_dim(c.top_block[b.seq]))
                        });
                        m[(a.top, b.top)] += v;
                    }
                }
            }
        }
        Ok(PathTraces { entries })
    }

    /// Reduced matrices `K_X(λ)` for every top shape, in canonical order.
    pub fn reduced(&self, x: &CMat) -> Result<Vec<CMat>> {
        let t = self.traces(x)?;
        let mut out: Vec<CMat> = (0..self.shapes.len()).map(|b| CMat::zeros(self.block_dim(b), self.block_dim(b))).collect();
        for (&(ci, sl, sr), m) in &t.entries {
            if sl != sr {
                continue;
            }
            let c = &self.centers[ci];
            let top = c.top_block[sl];
            let r = self.binom * c.f / self.f_top[top];
            out[top] += m * C64::new(r, 0.0);
        }
        Ok(out)
    }

    /// Gain blocks `K_{X,Y}` keyed by `(λ, ν)` block indices. Each block is
    /// a triplet list with row `W_λ f^λ(d) + W'_λ` and column
    /// `W_ν f^ν(d) + W'_ν`.
    pub fn gain(&self, x: &CMat, y: &CMat) -> Result<BTreeMap<(usize, usize), Vec<(usize, usize, C64)>>> {
        let tx = self.traces(x)?;
        let ty = self.traces(y)?;
        let mut out: BTreeMap<(usize, usize), Vec<(usize, usize, C64)>> = BTreeMap::new();
        let nonzeros = |m: &CMat| -> Vec<(usize, usize, C64)> {
            let mut v = Vec::new();
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    if m[(i, j)] != C64::new(0.0, 0.0) {
                        v.push((i, j, m[(i, j)]));
                    }
                }
            }
            v
        };
        for (key, mx) in &tx.entries {
            let Some(my) = ty.entries.get(key) else { continue };
            let c = &self.centers[key.0];
            let (lb, nb) = (c.top_block[key.1], c.top_block[key.2]);
            let (fl, fn_) = (self.block_dim(lb), self.block_dim(nb));
            let factor = self.binom * c.f / (self.f_top[lb] * self.f_top[nb]).sqrt();
            let (ex, ey) = (nonzeros(mx), nonzeros(my));
            let list = out.entry((lb, nb)).or_default();
            for &(a, b, vx) in &ex {
                for &(a2, b2, vy) in &ey {
                    list.push((a * fl + a2, b * fn_ + b2, vx * vy.conj() * factor));
                }
            }
        }
        Ok(out)
    }

    /// Paths known to the engine, with their top shapes, for inspection.
    pub fn paths(&self) -> Vec<(Partition, PartitionPath, Partition)> {
        let mut out = Vec::new();
        for c in &self.centers {
            for l in &c.seqs {
                for r in &c.seqs {
                    let p = self.p;
                    let mut shapes: Vec<Partition> = l[..p - 1].iter().rev().cloned().collect();
                    shapes.push(c.shape.clone());
                    shapes.extend(r[..p - 1].iter().cloned());
                    out.push((l[p - 1].clone(), PartitionPath(shapes), r[p - 1].clone()));
                }
            }
        }
        out
    }
}

static ENGINES: LazyLock<RwLock<HashMap<(u32, usize, usize), Arc<PathEngine>>>> = LazyLock::new(Default::default);

/// Memoized [`PathEngine`] for `(N, d, p)`.
pub fn path_engine(n: u32, d: usize, p: usize) -> Result<Arc<PathEngine>> {
    let key = (n, d, p);
    if let Some(e) = ENGINES.read().unwrap().get(&key) {
        return Ok(e.clone());
    }
    let e = Arc::new(PathEngine::new(n, d, p)?);
    Ok(ENGINES.write().unwrap().entry(key).or_insert(e).clone())
}

/// Assembles a model with terms of any particle number up to [`DEFAULT_P_CAP`].
pub fn assemble_p(model: &ModelSpec, index: &Arc<CommutantIndex>) -> Result<LiouvillianMatrix> {
    assemble_p_with_cap(model, index, DEFAULT_P_CAP)
}

pub fn assemble_p_with_cap(model: &ModelSpec, index: &Arc<CommutantIndex>, p_cap: usize) -> Result<LiouvillianMatrix> {
    assemble_terms(model, index, p_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::threenu::{g_operator, threenu_symbol};
    use rand::{Rng, SeedableRng};

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn random_cmat(dim: usize, rng: &mut impl Rng) -> CMat {
        CMat::from_fn(dim, dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    /// Symmetrizes a two-particle matrix under the factor swap.
    fn symmetrize2(a: &CMat, d: usize) -> CMat {
        let swap = |i: usize| (i % d) * d + i / d;
        CMat::from_fn(d * d, d * d, |i, j| (a[(i, j)] + a[(swap(i), swap(j))]) * 0.5)
    }

    #[test]
    fn paths_and_delta() {
        let paths = enumerate_paths(&p(&[2, 1]), &p(&[2, 1]), 1);
        assert_eq!(paths, vec![PartitionPath(vec![p(&[1, 1])]), PartitionPath(vec![p(&[2])])]);
        let paths = enumerate_paths(&p(&[2]), &p(&[2]), 2);
        assert_eq!(paths, vec![PartitionPath(vec![p(&[1]), Partition::empty(), p(&[1])])]);
        let path = PartitionPath(vec![p(&[2]), p(&[1]), p(&[1, 1])]);
        assert!(path.delta(&p(&[3]), &p(&[2, 1])));
        assert!(!path.delta(&p(&[3]), &p(&[3])));
        assert_eq!(path.reversed(), PartitionPath(vec![p(&[1, 1]), p(&[1]), p(&[2])]));
        assert!(!path.is_palindromic());
    }

    #[test]
    fn p1_reduces_to_threenu() {
        let d = 3;
        for lam in partitions_of(3, d) {
            for nu in partitions_of(3, d) {
                for mu in partitions_of(2, d) {
                    let path = PartitionPath(vec![mu.clone()]);
                    for wl in swt_enumerate(&lam, d) {
                        for wr in swt_enumerate(&nu, d) {
                            for w in swt_enumerate(&mu, d) {
                                let a = generalized_threenu(&path, std::slice::from_ref(&w), &lam, &wl, &nu, &wr, d).unwrap();
                                let b = threenu_symbol(&lam, &wl, &mu, &w, &nu, &wr, d).unwrap().matrix;
                                assert_eq!(a, b);
                            }
                            assert_eq!(generalized_g(&path, &wl, &wr, d).unwrap(), g_operator(&mu, &wl, &wr, d).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn two_qubit_coupled_projectors() {
        // N = 2, d = 2, ν_L = ν_R = (2): the path (1), ∅, (1) gives the
        // rank-one projector on the symmetric coupled state of the content.
        let path = PartitionPath(vec![p(&[1]), Partition::empty(), p(&[1])]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (n0, v) in [(2u32, [1.0, 0.0, 0.0, 0.0]), (1, [0.0, s, s, 0.0]), (0, [0.0, 0.0, 0.0, 1.0])] {
            let w = GtPattern::symmetric(&[n0, 2 - n0]);
            let g = generalized_g(&path, &w, &w, 2).unwrap();
            let expect = RMat::from_fn(4, 4, |i, j| v[i] * v[j]);
            assert!((g - expect).abs().max() < 1e-15);
        }
        let singlet = swt_enumerate(&p(&[1, 1]), 2).pop().unwrap();
        let g = generalized_g(&path, &singlet, &singlet, 2).unwrap();
        let expect = RMat::from_fn(4, 4, |i, j| [0.0, s, -s, 0.0][i] * [0.0, s, -s, 0.0][j]);
        assert!((g - expect).abs().max() < 1e-15);
    }

    #[test]
    fn generalized_trace_rule_p2() {
        for d in 2..=3 {
            for n in 2..=4u32 {
                if d == 3 && n == 4 {
                    continue; // covered by the acceptance target
                }
                let shapes = partitions_of(n, d);
                for lam in &shapes {
                    for nu in &shapes {
                        for path in enumerate_paths(lam, nu, 2) {
                            for wl in swt_enumerate(lam, d) {
                                for wn in swt_enumerate(nu, d) {
                                    let tr = generalized_g(&path, &wl, &wn, d).unwrap().trace();
                                    let expect = lam == nu && wl == wn && path.is_palindromic();
                                    assert!((tr - if expect { 1.0 } else { 0.0 }).abs() < 1e-10);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn generalized_states_are_states() {
        let d = 2;
        for n in 2..=4u32 {
            for nu in partitions_of(n, d) {
                for path in enumerate_paths(&nu, &nu, 2).into_iter().filter(PartitionPath::is_palindromic) {
                    for w in swt_enumerate(&nu, d) {
                        let g = generalized_g(&path, &w, &w, d).unwrap();
                        assert!((g.trace() - 1.0).abs() < 1e-12);
                        assert!(g.clone().symmetric_eigenvalues().min() > -1e-12);
                        let adj = generalized_g(&path.reversed(), &w, &w, d).unwrap();
                        assert_eq!(g.transpose(), adj);
                    }
                }
            }
        }
    }

    #[test]
    fn k_p_identity_branching() {
        for (n, d, pp) in [(3u32, 2usize, 2usize), (4, 2, 2), (3, 3, 2), (3, 2, 3)] {
            let dim = d.pow(pp as u32);
            let eye = CMat::identity(dim, dim);
            let b = binomial(n as u64, pp as u64).unwrap() as f64;
            for nu in partitions_of(n, d) {
                for w in swt_enumerate(&nu, d) {
                    for w2 in swt_enumerate(&nu, d) {
                        let k = k_p_coefficient(&eye, &eye, &w, &w2, &w, &w2, pp).unwrap();
                        assert!((k - C64::new(b, 0.0)).norm() < 1e-12);
                    }
                }
            }
        }
        let w = GtPattern::symmetric(&[1, 1]);
        assert!(k_p_coefficient(&CMat::identity(8, 8), &CMat::identity(8, 8), &w, &w, &w, &w, 3).is_err());
    }

    #[test]
    fn engine_matches_direct_route() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (n, d, pp) in [(2u32, 2usize, 1usize), (3, 2, 1), (3, 3, 1), (3, 2, 2), (4, 2, 2), (3, 3, 2), (3, 2, 3)] {
            let dim = d.pow(pp as u32);
            let x = random_cmat(dim, &mut rng);
            let y = random_cmat(dim, &mut rng);
            let engine = PathEngine::new(n, d, pp).unwrap();
            let gain = engine.gain(&x, &y).unwrap();
            let reduced = engine.reduced(&x).unwrap();
            let eye = CMat::identity(dim, dim);
            for (lb, lam) in engine.shapes.iter().enumerate() {
                let lp = swt_enumerate(lam, d);
                for (nb, nu) in engine.shapes.iter().enumerate() {
                    let np = swt_enumerate(nu, d);
                    let block: HashMap<(usize, usize), C64> = gain.get(&(lb, nb)).map_or(HashMap::new(), |l| {
                        let mut m = HashMap::new();
                        for &(r, c, v) in l {
                            *m.entry((r, c)).or_insert(C64::new(0.0, 0.0)) += v;
                        }
                        m
                    });
                    for (a, wa) in lp.iter().enumerate() {
                        for (a2, wa2) in lp.iter().enumerate() {
                            for (b, wb) in np.iter().enumerate() {
                                for (b2, wb2) in np.iter().enumerate() {
                                    let direct = k_p_coefficient(&x, &y, wa, wa2, wb, wb2, pp).unwrap();
                                    let got = block.get(&(a * lp.len() + a2, b * np.len() + b2)).copied().unwrap_or_default();
                                    assert!((direct - got).norm() < 1e-12, "({n},{d},{pp}) {lam} {nu}");
                                }
                            }
                        }
                    }
                    if lb == nb {
                        for (a, wa) in lp.iter().enumerate() {
                            for (b, wb) in lp.iter().enumerate() {
                                let kx = k_p_coefficient(&x, &eye, wa, &lp[0], wb, &lp[0], pp).unwrap();
                                assert!((reduced[lb][(a, b)] - kx).norm() < 1e-12);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn symmetric_two_particle_input_is_consistent() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let x = symmetrize2(&random_cmat(4, &mut rng), 2);
        let swap = |i: usize| (i % 2) * 2 + i / 2;
        for i in 0..4 {
            for j in 0..4 {
                assert!((x[(i, j)] - x[(swap(i), swap(j))]).norm() < 1e-15);
            }
        }
        let e = path_engine(3, 2, 2).unwrap();
        assert!(e.reduced(&x).is_ok());
        assert!(e.reduced(&CMat::identity(2, 2)).is_err());
        assert!(!e.paths().is_empty());
    }
}
