//! Partitions, Young tableau counts and Gel'fand-Tsetlin patterns.
//!
//! Partitions label the irreps of `S_N` and `U(d)` appearing in the
//! Schur-Weyl decomposition of `(C^d)^{⊗N}`. Semistandard Weyl tableaux of
//! shape `ν` with entries in `0..d` are stored as their Gel'fand-Tsetlin
//! patterns: `d` rows, row `k` holding `k` entries `m_{1,k} ≥ … ≥ m_{k,k}`,
//! with the top row equal to `ν` padded with zeros.
//!
//! Orderings are canonical and deterministic: partitions are listed in
//! reverse-lexicographic order (`(3), (2,1), (1,1,1)`), patterns in
//! lexicographic order of their flattened rows read top to bottom.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, LazyLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An integer partition with weakly decreasing positive parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Builds a partition, dropping trailing zeros.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(Error::InvalidPartition(parts));
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Part `i` (0-based), zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn padded(&self, d: usize) -> Vec<u32> {
        (0..d).map(|i| self.part(i)).collect()
    }

    /// Removes the last box of row `row` (0-based) if that box is an inner corner.
    pub fn without_box(&self, row: usize) -> Option<Partition> {
        if row >= self.len() || self.part(row) <= self.part(row + 1) {
            return None;
        }
        let mut parts = self.0.clone();
        parts[row] -= 1;
        if parts[row] == 0 {
            parts.pop();
        }
        Some(Partition(parts))
    }

    /// Adds a box at the end of row `row` (0-based) if that cell is an outer
    /// corner and the result still has at most `d` parts.
    pub fn with_box(&self, row: usize, d: usize) -> Option<Partition> {
        if row >= d || row > self.len() || (row > 0 && self.part(row - 1) <= self.part(row)) {
            return None;
        }
        let mut parts = self.0.clone();
        if row == self.len() {
            parts.push(1);
        } else {
            parts[row] += 1;
        }
        Some(Partition(parts))
    }

    /// All `ν^-`, in canonical order.
    pub fn removals(&self) -> Vec<Partition> {
        let mut out: Vec<_> = (0..self.len()).filter_map(|r| self.without_box(r)).collect();
        sort_canonical(&mut out);
        out
    }

    /// All `ν^+` with at most `d` parts, in canonical order.
    pub fn additions(&self, d: usize) -> Vec<Partition> {
        let mut out: Vec<_> = (0..=self.len()).filter_map(|r| self.with_box(r, d)).collect();
        sort_canonical(&mut out);
        out
    }

    /// Dotted label used in file headers, e.g. `2.1`; the empty partition is `0`.
    pub fn label(&self) -> String {
        if self.0.is_empty() {
            return "0".to_string();
        }
        self.0.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(".")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

fn sort_canonical(v: &mut Vec<Partition>) {
    v.sort_by(|a, b| b.cmp(a));
    v.dedup();
}

/// Row (0-based) in which `larger` has exactly one more box than `smaller`.
pub fn added_row(smaller: &Partition, larger: &Partition) -> Option<usize> {
    if larger.weight() != smaller.weight() + 1 {
        return None;
    }
    let n = larger.len().max(smaller.len());
    let mut row = None;
    for i in 0..n {
        match larger.part(i) as i64 - smaller.part(i) as i64 {
            0 => {}
            1 if row.is_none() => row = Some(i),
            _ => return None,
        }
    }
    row
}

/// All partitions of `n` with at most `d` parts, reverse-lexicographic.
pub fn partitions_of(n: u32, d: usize) -> Vec<Partition> {
    fn rec(rest: u32, max: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if slots == 0 {
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, d, &mut Vec::new(), &mut out);
    out
}

/// The corner sets `{ν^-}`, `{ν^+}` and `{ν^{-+}}` of a partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerSets {
    pub minus: Vec<Partition>,
    pub plus: Vec<Partition>,
    pub minus_plus: Vec<Partition>,
}

pub fn corner_sets(nu: &Partition, d: usize) -> CornerSets {
    let minus = nu.removals();
    let plus = nu.additions(d);
    let mut minus_plus: Vec<_> = minus.iter().flat_map(|m| m.additions(d)).collect();
    sort_canonical(&mut minus_plus);
    CornerSets { minus, plus, minus_plus }
}

/// Shapes reachable by removing `p` boxes one corner at a time, then adding
/// `p` boxes back (`{ν^{-^p +^p}}`).
pub fn corner_sets_p(nu: &Partition, d: usize, p: usize) -> Vec<Partition> {
    let mut level = vec![nu.clone()];
    for _ in 0..p {
        let mut next: Vec<_> = level.iter().flat_map(|s| s.removals()).collect();
        sort_canonical(&mut next);
        level = next;
    }
    for _ in 0..p {
        let mut next: Vec<_> = level.iter().flat_map(|s| s.additions(d)).collect();
        sort_canonical(&mut next);
        level = next;
    }
    level
}

/// Exact product of integer powers, accumulated as prime exponents so that
/// ratios such as `N! / ∏ hooks` never overflow in intermediate steps.
#[derive(Default)]
struct PrimeExponents(BTreeMap<u64, i64>);

impl PrimeExponents {
    fn mul(&mut self, mut n: u64, sign: i64) {
        debug_assert!(n > 0);
        let mut f = 2;
        while f * f <= n {
            while n.is_multiple_of(f) {
                *self.0.entry(f).or_insert(0) += sign;
                n /= f;
            }
            f += 1;
        }
        if n > 1 {
            *self.0.entry(n).or_insert(0) += sign;
        }
    }

    fn value(&self, what: &'static str) -> Result<u128> {
        let mut acc: u128 = 1;
        for (&p, &e) in &self.0 {
            if e < 0 {
                return Err(Error::Internal(format!("{what} is not an integer")));
            }
            for _ in 0..e {
                acc = acc.checked_mul(p as u128).ok_or(Error::Overflow(what))?;
            }
        }
        Ok(acc)
    }
}

/// `f^ν`, the number of standard Young tableaux of shape `ν` (hook-length formula).
pub fn syt_count(nu: &Partition) -> Result<u128> {
    let n = nu.weight() as u64;
    let mut acc = PrimeExponents::default();
    for k in 2..=n {
        acc.mul(k, 1);
    }
    let cols = nu.part(0) as usize;
    let col_len: Vec<usize> = (0..cols).map(|c| nu.parts().iter().filter(|&&p| p as usize > c).count()).collect();
    for (r, &row) in nu.parts().iter().enumerate() {
        for (c, &clen) in col_len.iter().enumerate().take(row as usize) {
            let hook = (row as usize - c - 1) + (clen - r - 1) + 1;
            acc.mul(hook as u64, -1);
        }
    }
    acc.value("f^ν (hook-length formula)")
}

/// `f^ν(d)`, the dimension of the `U(d)` irrep `ν` (Weyl dimension formula).
pub fn weyl_dimension(nu: &Partition, d: usize) -> Result<u128> {
    if nu.len() > d {
        return Ok(0);
    }
    let mut acc = PrimeExponents::default();
    for i in 0..d {
        for j in (i + 1)..d {
            let num = nu.part(i) as i64 - nu.part(j) as i64 + (j - i) as i64;
            acc.mul(num as u64, 1);
            acc.mul((j - i) as u64, -1);
        }
    }
    acc.value("f^ν(d) (Weyl dimension formula)")
}

pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128).ok_or(Error::Overflow("binomial"))? / (i as u128 + 1);
    }
    Ok(acc)
}

/// Dimension of the commutant, `binom(N + d² − 1, N)`.
pub fn commutant_dimension(n: u32, d: usize) -> Result<u128> {
    binomial(n as u64 + (d * d) as u64 - 1, n as u64)
}

/// Gel'fand-Tsetlin pattern of a semistandard Weyl tableau.
///
/// Entries are stored row by row from the top row (`k = d`) down to the
/// single-entry bottom row (`k = 1`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GtPattern {
    d: usize,
    m: Vec<u32>,
}

fn row_offset(d: usize, k: usize) -> usize {
    (d * (d + 1) - k * (k + 1)) / 2
}

impl GtPattern {
    /// Builds a pattern from rows listed top (`d` entries) to bottom (1 entry).
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let d = rows.len();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != d - r {
                return Err(Error::InvalidPattern(format!("row {r} has {} entries, expected {}", row.len(), d - r)));
            }
        }
        let pat = GtPattern { d, m: rows.concat() };
        if !pat.is_valid() {
            return Err(Error::InvalidPattern(format!("{rows:?} violates betweenness")));
        }
        Ok(pat)
    }

    /// The unique pattern of a one-row shape `(n)` with content `n_0..n_{d-1}`.
    pub fn symmetric(content: &[u32]) -> Self {
        let d = content.len();
        let mut m = vec![0; d * (d + 1) / 2];
        for k in 1..=d {
            m[row_offset(d, k)] = content[..k].iter().sum();
        }
        GtPattern { d, m }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Entry `m_{i,k}` (both 1-based).
    pub fn m(&self, i: usize, k: usize) -> u32 {
        self.m[row_offset(self.d, k) + i - 1]
    }

    /// Row `k` (1-based), holding `k` entries.
    pub fn row(&self, k: usize) -> &[u32] {
        let o = row_offset(self.d, k);
        &self.m[o..o + k]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        (1..=self.d).rev().map(|k| self.row(k).to_vec()).collect()
    }

    pub fn flat(&self) -> &[u32] {
        &self.m
    }

    pub fn shape(&self) -> Partition {
        Partition::new(self.row(self.d).to_vec()).expect("top row of a valid pattern is a partition")
    }

    pub fn row_sum(&self, k: usize) -> u32 {
        if k == 0 {
            0
        } else {
            self.row(k).iter().sum()
        }
    }

    /// Box counts `n_0..n_{d-1}`: `n_{k-1} = |m_k| - |m_{k-1}|`.
    pub fn content(&self) -> Vec<u32> {
        (1..=self.d).map(|k| self.row_sum(k) - self.row_sum(k - 1)).collect()
    }

    pub fn is_valid(&self) -> bool {
        let top = self.row(self.d);
        if top.windows(2).any(|w| w[0] < w[1]) {
            return false;
        }
        (2..=self.d).all(|k| (1..k).all(|i| self.m(i + 1, k) <= self.m(i, k - 1) && self.m(i, k - 1) <= self.m(i, k)))
    }
}

impl fmt::Display for GtPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join(" | "))
    }
}

/// All GT patterns with top row `ν` (padded to `d`), in canonical order.
pub fn swt_enumerate(nu: &Partition, d: usize) -> Vec<GtPattern> {
    if nu.len() > d || d == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut m = nu.padded(d);
    fn fill(d: usize, m: &mut Vec<u32>, out: &mut Vec<GtPattern>) {
        let filled = m.len();
        // next row to fill: k such that row_offset(d, k) == filled
        let k = (1..d).rev().find(|&k| row_offset(d, k) == filled);
        let Some(k) = k else {
            out.push(GtPattern { d, m: m.clone() });
            return;
        };
        let upper = row_offset(d, k + 1);
        fn pick(d: usize, k: usize, i: usize, upper: usize, m: &mut Vec<u32>, out: &mut Vec<GtPattern>) {
            if i > k {
                fill(d, m, out);
                return;
            }
            let lo = m[upper + i];
            let hi = m[upper + i - 1];
            for v in lo..=hi {
                m.push(v);
                pick(d, k, i + 1, upper, m, out);
                m.pop();
            }
        }
        pick(d, k, 1, upper, m, out);
    }
    fill(d, &mut m, &mut out);
    out
}

/// The patterns of one shape with a reverse lookup table.
#[derive(Debug)]
pub struct SwtBasis {
    pub shape: Partition,
    pub d: usize,
    pub patterns: Vec<GtPattern>,
    lookup: HashMap<GtPattern, usize>,
}

impl SwtBasis {
    pub fn new(shape: &Partition, d: usize) -> Self {
        let patterns = swt_enumerate(shape, d);
        let lookup = patterns.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        SwtBasis { shape: shape.clone(), d, patterns, lookup }
    }

    pub fn index_of(&self, w: &GtPattern) -> Option<usize> {
        self.lookup.get(w).copied()
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

static BASES: LazyLock<RwLock<HashMap<(Partition, usize), Arc<SwtBasis>>>> = LazyLock::new(Default::default);

/// Shared, memoized [`SwtBasis`] for `(shape, d)`.
pub fn swt_basis(shape: &Partition, d: usize) -> Arc<SwtBasis> {
    let key = (shape.clone(), d);
    if let Some(b) = BASES.read().unwrap().get(&key) {
        return b.clone();
    }
    let b = Arc::new(SwtBasis::new(shape, d));
    BASES.write().unwrap().entry(key).or_insert(b).clone()
}

/// Triangular shift pattern `Δ_i(τ_d, τ_{d-1}, …, τ_i)`: a unit at column
/// `τ_k` in every row `k ≥ i` and zeros below.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftPattern {
    /// Lowest nonzero row; the pattern adds or removes one box labelled `i - 1`.
    pub i: usize,
    /// `tau[k - i]` is the 1-based unit position in row `k`, for `k = i..=d`.
    pub tau: Vec<usize>,
}

impl ShiftPattern {
    pub fn tau(&self, k: usize) -> usize {
        self.tau[k - self.i]
    }

    /// Every member of `Δ_i(τ_d)` for patterns with `d` rows.
    pub fn all(i: usize, tau_d: usize, d: usize) -> Vec<ShiftPattern> {
        assert!(i >= 1 && i <= d && tau_d >= 1 && tau_d <= d);
        let mut out = vec![vec![tau_d]];
        for k in (i..d).rev() {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (1..=k).map(move |pos| {
                        let mut t = t.clone();
                        t.push(pos);
                        t
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|mut t| {
                t.reverse();
                ShiftPattern { i, tau: t }
            })
            .collect()
    }

    /// Recognises `upper - lower` as a shift pattern.
    pub fn of_difference(upper: &GtPattern, lower: &GtPattern) -> Option<ShiftPattern> {
        let d = upper.d();
        if lower.d() != d {
            return None;
        }
        let mut tau = Vec::new();
        let mut i = None;
        for k in 1..=d {
            let mut unit = None;
            for pos in 1..=k {
                match upper.m(pos, k) as i64 - lower.m(pos, k) as i64 {
                    0 => {}
                    1 if unit.is_none() => unit = Some(pos),
                    _ => return None,
                }
            }
            match (unit, i) {
                (None, None) => {}
                (None, Some(_)) => return None,
                (Some(pos), None) => {
                    i = Some(k);
                    tau.push(pos);
                }
                (Some(pos), Some(_)) => tau.push(pos),
            }
        }
        i.map(|i| ShiftPattern { i, tau })
    }

    fn apply(&self, base: &GtPattern, sign: i64) -> Option<GtPattern> {
        let d = base.d();
        let mut m = base.m.clone();
        for k in self.i..=d {
            let idx = row_offset(d, k) + self.tau(k) - 1;
            let v = m[idx] as i64 + sign;
            if v < 0 {
                return None;
            }
            m[idx] = v as u32;
        }
        let pat = GtPattern { d, m };
        pat.is_valid().then_some(pat)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftDirection {
    Minus,
    Plus,
}

/// `W_μ^{(-j)}(W_ν)`: patterns of shape `μ ∈ {ν^-}` obtained from `W_ν` by
/// subtracting a shift pattern with `i = j + 1`.
pub fn shift_minus(mu: &Partition, j: usize, w_nu: &GtPattern) -> Vec<GtPattern> {
    let d = w_nu.d();
    let Some(row) = added_row(mu, &w_nu.shape()) else {
        return Vec::new();
    };
    if j >= d {
        return Vec::new();
    }
    let mut out: Vec<_> = ShiftPattern::all(j + 1, row + 1, d).iter().filter_map(|s| s.apply(w_nu, -1)).collect();
    out.sort();
    out
}

/// `W_λ^{(+j)}(W_μ)`: patterns of shape `λ ∈ {μ^+}` obtained from `W_μ` by
/// adding a shift pattern with `i = j + 1`.
pub fn shift_plus(lambda: &Partition, j: usize, w_mu: &GtPattern) -> Vec<GtPattern> {
    let d = w_mu.d();
    let Some(row) = added_row(&w_mu.shape(), lambda) else {
        return Vec::new();
    };
    if j >= d || lambda.len() > d {
        return Vec::new();
    }
    let mut out: Vec<_> = ShiftPattern::all(j + 1, row + 1, d).iter().filter_map(|s| s.apply(w_mu, 1)).collect();
    out.sort();
    out
}

pub fn shift_set(shape: &Partition, j: usize, w: &GtPattern, direction: ShiftDirection) -> Vec<GtPattern> {
    match direction {
        ShiftDirection::Minus => shift_minus(shape, j, w),
        ShiftDirection::Plus => shift_plus(shape, j, w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    // Brute-force oracles.

    fn brute_partitions(n: u32, d: usize) -> BTreeSet<Vec<u32>> {
        let mut out = BTreeSet::new();
        let mut v = vec![0u32; d];
        loop {
            if v.iter().sum::<u32>() == n && v.windows(2).all(|w| w[0] >= w[1]) {
                out.insert(v.iter().copied().filter(|&x| x > 0).collect());
            }
            let mut i = 0;
            loop {
                if i == d {
                    return out;
                }
                v[i] += 1;
                if v[i] <= n {
                    break;
                }
                v[i] = 0;
                i += 1;
            }
        }
    }

    fn cells(nu: &Partition) -> Vec<(usize, usize)> {
        nu.parts().iter().enumerate().flat_map(|(r, &len)| (0..len as usize).map(move |c| (r, c))).collect()
    }

    /// All semistandard fillings with entries `0..d`, returned as GT patterns.
    fn brute_ssyt(nu: &Partition, d: usize) -> BTreeSet<Vec<u32>> {
        let cells = cells(nu);
        let n = cells.len();
        let mut out = BTreeSet::new();
        let total = (d as u64).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut fill = std::collections::HashMap::new();
            for &cell in &cells {
                fill.insert(cell, (c % d as u64) as u32);
                c /= d as u64;
            }
            let ok = cells.iter().all(|&(r, col)| {
                let v = fill[&(r, col)];
                let right = fill.get(&(r, col + 1)).is_none_or(|&w| w >= v);
                let below = fill.get(&(r + 1, col)).is_none_or(|&w| w > v);
                right && below
            });
            if ok {
                let mut m = Vec::new();
                for k in (1..=d).rev() {
                    for r in 0..k {
                        m.push(cells.iter().filter(|&&(rr, cc)| rr == r && fill[&(rr, cc)] < k as u32).count() as u32);
                    }
                }
                out.insert(m);
            }
        }
        out
    }

    fn brute_syt(nu: &Partition) -> u128 {
        fn count(shape: &mut Vec<u32>, target: &[u32]) -> u128 {
            if shape.iter().zip(target).all(|(a, b)| a == b) {
                return 1;
            }
            let mut total = 0;
            for r in 0..target.len() {
                let ok = shape[r] < target[r] && (r == 0 || shape[r - 1] > shape[r]);
                if ok {
                    shape[r] += 1;
                    total += count(shape, target);
                    shape[r] -= 1;
                }
            }
            total
        }
        count(&mut vec![0; nu.len()], nu.parts())
    }

    #[test]
    fn partitions_examples() {
        assert_eq!(partitions_of(3, 2), vec![p(&[3]), p(&[2, 1])]);
        assert_eq!(partitions_of(4, 2), vec![p(&[4]), p(&[3, 1]), p(&[2, 2])]);
        for d in 1..5 {
            assert_eq!(partitions_of(1, d), vec![p(&[1])]);
        }
        assert_eq!(partitions_of(0, 3), vec![Partition::empty()]);
    }

    #[test]
    fn partitions_match_exhaustive_enumeration() {
        for n in 0..=8 {
            for d in 1..=4 {
                let got = partitions_of(n, d);
                let set: BTreeSet<Vec<u32>> = got.iter().map(|x| x.parts().to_vec()).collect();
                assert_eq!(set, brute_partitions(n, d), "n={n} d={d}");
                assert!(got.windows(2).all(|w| w[0] > w[1]), "order n={n} d={d}");
            }
        }
    }

    #[test]
    fn corner_set_examples() {
        let cs = corner_sets(&p(&[2, 1]), 2);
        assert_eq!(cs.minus, vec![p(&[2]), p(&[1, 1])]);
        assert_eq!(cs.minus_plus, vec![p(&[3]), p(&[2, 1])]);
        let cs3 = corner_sets(&p(&[2, 1]), 3);
        assert_eq!(cs3.minus_plus, vec![p(&[3]), p(&[2, 1]), p(&[1, 1, 1])]);
        for n in 1..6 {
            assert_eq!(corner_sets(&p(&[n]), 3).minus, vec![Partition::new(vec![n - 1]).unwrap()]);
        }
        for nu in partitions_of(5, 3) {
            assert!(corner_sets(&nu, 3).minus_plus.contains(&nu));
        }
    }

    #[test]
    fn invalid_partitions_rejected() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0, 1]).is_err());
        assert_eq!(Partition::new(vec![2, 1, 0, 0]).unwrap(), p(&[2, 1]));
    }

    #[test]
    fn syt_counts() {
        assert_eq!(syt_count(&p(&[2, 1])).unwrap(), 2);
        assert_eq!(syt_count(&p(&[2, 2])).unwrap(), 2);
        assert_eq!(syt_count(&p(&[7])).unwrap(), 1);
        assert_eq!(syt_count(&Partition::empty()).unwrap(), 1);
        for n in 1..=7 {
            for nu in partitions_of(n, n as usize) {
                assert_eq!(syt_count(&nu).unwrap(), brute_syt(&nu), "{nu}");
            }
        }
    }

    #[test]
    fn syt_overflow_is_reported() {
        // f^ν for a large staircase exceeds 128 bits.
        let nu = Partition::new((1..=25).rev().collect()).unwrap();
        assert!(matches!(syt_count(&nu), Err(Error::Overflow(_))));
        // but a moderately large shape beyond 64-bit factorials still works
        let nu = Partition::new(vec![20, 20]).unwrap();
        assert_eq!(syt_count(&nu).unwrap(), 6564120420); // Catalan(20)
    }

    #[test]
    fn swt_examples() {
        let pats = swt_enumerate(&p(&[2, 1]), 2);
        assert_eq!(pats.len(), 2);
        assert_eq!(pats.iter().map(|w| w.m(1, 1)).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(swt_enumerate(&p(&[2, 1]), 3).len(), 8);
        assert_eq!(swt_enumerate(&p(&[1, 1]), 2).len(), 1);
        assert!(swt_enumerate(&p(&[1, 1, 1]), 2).is_empty());
        assert_eq!(swt_enumerate(&Partition::empty(), 3).len(), 1);
    }

    #[test]
    fn swt_matches_brute_force_and_weyl() {
        for n in 0..=5 {
            for d in 1..=3 {
                for nu in partitions_of(n, d) {
                    let pats = swt_enumerate(&nu, d);
                    let set: BTreeSet<Vec<u32>> = pats.iter().map(|w| w.flat().to_vec()).collect();
                    assert_eq!(set, brute_ssyt(&nu, d), "{nu} d={d}");
                    assert_eq!(pats.len() as u128, weyl_dimension(&nu, d).unwrap());
                    assert!(pats.windows(2).all(|w| w[0] < w[1]));
                    assert!(pats.iter().all(|w| w.is_valid() && w.shape() == nu));
                }
            }
        }
    }

    #[test]
    fn content_examples() {
        let pats = swt_enumerate(&p(&[2, 1]), 2);
        assert_eq!(pats[0].content(), vec![1, 2]);
        let one = swt_enumerate(&p(&[1, 1]), 2);
        assert_eq!(one[0].content(), vec![1, 1]);
        let top = GtPattern::symmetric(&[4, 0, 0]);
        assert_eq!(top.content(), vec![4, 0, 0]);
        assert_eq!(top.rows(), vec![vec![4, 0, 0], vec![4, 0], vec![4]]);
        for w in swt_enumerate(&p(&[3, 2, 1]), 4) {
            assert_eq!(w.content().iter().sum::<u32>(), 6);
            assert_eq!(w.content()[0], w.m(1, 1));
        }
    }

    #[test]
    fn from_rows_validates() {
        assert!(GtPattern::from_rows(&[vec![2, 1], vec![1]]).is_ok());
        assert!(GtPattern::from_rows(&[vec![2, 1], vec![3]]).is_err());
        assert!(GtPattern::from_rows(&[vec![2, 1], vec![1, 1]]).is_err());
    }

    #[test]
    fn shift_set_examples() {
        let w_nu = swt_enumerate(&p(&[2, 1]), 2).into_iter().find(|w| w.m(1, 1) == 1).unwrap();
        let got = shift_minus(&p(&[2]), 1, &w_nu);
        assert_eq!(got, vec![GtPattern::from_rows(&[vec![2, 0], vec![1]]).unwrap()]);

        let singlet = &swt_enumerate(&p(&[1, 1]), 2)[0];
        let got = shift_minus(&p(&[1]), 0, singlet);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].m(1, 1), 0);
        assert_eq!(got[0].content(), vec![0, 1]);

        for d in 2..=4 {
            for nu in partitions_of(4, d) {
                for w in swt_enumerate(&nu, d) {
                    for mu in nu.removals() {
                        assert!(shift_minus(&mu, d - 1, &w).len() <= 1);
                    }
                }
            }
        }
    }

    #[test]
    fn shift_pattern_cardinality() {
        for d in 1..=5usize {
            for i in 1..=d {
                let fact = |n: usize| (1..=n).product::<usize>();
                assert_eq!(ShiftPattern::all(i, 1, d).len(), fact(d - 1) / fact(i - 1));
            }
        }
    }

    #[test]
    fn shift_sets_brute_force_and_equivalence() {
        for n in 1..=5 {
            for d in 1..=3 {
                for nu in partitions_of(n, d) {
                    for mu in nu.removals() {
                        let mu_pats = swt_enumerate(&mu, d);
                        for w_nu in swt_enumerate(&nu, d) {
                            for j in 0..d {
                                let minus = shift_minus(&mu, j, &w_nu);
                                let fact = |n: usize| (1..=n).product::<usize>();
                                assert!(minus.len() <= fact(d - 1) / fact(j));
                                // brute force scan over all W_μ
                                let brute: Vec<_> = mu_pats
                                    .iter()
                                    .filter(|w_mu| {
                                        ShiftPattern::of_difference(&w_nu, w_mu).is_some_and(|s| s.i == j + 1)
                                    })
                                    .cloned()
                                    .collect();
                                assert_eq!(minus, brute);
                                for w_mu in &mu_pats {
                                    let a = minus.contains(w_mu);
                                    let b = shift_plus(&nu, j, w_mu).contains(&w_nu);
                                    assert_eq!(a, b, "{nu} {mu} j={j}");
                                    if a {
                                        let mut c = w_mu.content();
                                        c[j] += 1;
                                        assert_eq!(c, w_nu.content());
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn branching_and_dimension_sums() {
        for n in 1..=8u32 {
            for d in 1..=4 {
                let mut schur_weyl = 0u128;
                let mut commutant = 0u128;
                for nu in partitions_of(n, d) {
                    let f = syt_count(&nu).unwrap();
                    let fd = weyl_dimension(&nu, d).unwrap();
                    // removals of a shape with ≤ d rows never need > d rows
                    let branch: u128 = nu.removals().iter().map(|m| syt_count(m).unwrap()).sum();
                    assert_eq!(branch, f);
                    schur_weyl += f * fd;
                    commutant += fd * fd;
                }
                assert_eq!(schur_weyl, (d as u128).pow(n));
                assert_eq!(commutant, commutant_dimension(n, d).unwrap());
            }
        }
    }
}
