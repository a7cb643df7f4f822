//! File formats: trajectory CSV, index manifest, coordinate-list export and
//! combinatorics dumps.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cgc::cgc_table;
use crate::commutant::CommutantIndex;
use crate::error::{Error, Result};
use crate::evolve::{Record, Trajectory};
use crate::liouvillian::LiouvillianMatrix;
use crate::model::Grid;
use crate::tableaux::{binomial, partitions_of, swt_basis, syt_count, Partition};

pub const MANIFEST_FORMAT: &str = "piqudit-index";
pub const MANIFEST_VERSION: u32 = 1;

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockManifest {
    pub nu: Vec<u32>,
    pub label: String,
    /// `f^ν`, as a decimal string (may exceed 64 bits).
    pub f: String,
    /// `f^ν(d)`.
    pub dim: usize,
    pub offset: usize,
    /// GT patterns in index order, each flattened top row first.
    pub patterns: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Column {
    Time,
    Re { observable: String },
    Im { observable: String },
    Purity,
    Weight { nu: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    #[serde(rename = "N")]
    pub n: u32,
    pub d: usize,
    pub dim: usize,
    /// Flat position of `ρ_{ν,W,W'}` is `offset_ν + W·dim_ν + W'`; the block
    /// matrix is the component block divided by `√f^ν`.
    pub layout: String,
    pub blocks: Vec<BlockManifest>,
    pub observables: Vec<String>,
    /// Header name and meaning of each CSV column, in order.
    pub columns: Vec<(String, Column)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default)]
    pub accepted_steps: usize,
    #[serde(default)]
    pub rejected_steps: usize,
}

impl Manifest {
    pub fn new(index: &CommutantIndex, observables: &[String]) -> Self {
        let blocks = index
            .blocks
            .iter()
            .map(|b| BlockManifest {
                nu: b.shape.parts().to_vec(),
                label: b.shape.label(),
                f: b.f.to_string(),
                dim: b.dim(),
                offset: b.offset,
                patterns: b.basis.patterns.iter().map(|w| w.flat().to_vec()).collect(),
            })
            .collect::<Vec<_>>();
        let mut columns = vec![("t".to_string(), Column::Time)];
        for o in observables {
            columns.push((format!("re({o})"), Column::Re { observable: o.clone() }));
            columns.push((format!("im({o})"), Column::Im { observable: o.clone() }));
        }
        columns.push(("purity".into(), Column::Purity));
        for b in &blocks {
            columns.push((b.label.clone(), Column::Weight { nu: b.nu.clone() }));
        }
        Manifest {
            format: MANIFEST_FORMAT.into(),
            version: MANIFEST_VERSION,
            n: index.n,
            d: index.d,
            dim: index.dim,
            layout: "flat = offset + W * dim + W'; block matrix = components / sqrt(f)".into(),
            blocks,
            observables: observables.to_vec(),
            columns,
            grid: None,
            accepted_steps: 0,
            rejected_steps: 0,
        }
    }

    pub fn for_trajectory(index: &CommutantIndex, traj: &Trajectory, grid: &Grid) -> Self {
        let mut m = Manifest::new(index, &traj.names);
        m.grid = Some(grid.clone());
        m.accepted_steps = traj.accepted_steps;
        m.rejected_steps = traj.rejected_steps;
        m
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Manifest = serde_json::from_str(text).map_err(Error::Parse)?;
        if m.format != MANIFEST_FORMAT || m.version != MANIFEST_VERSION {
            return Err(Error::Format(format!("unknown manifest format {} v{}", m.format, m.version)));
        }
        Ok(m)
    }

    /// Rebuilds the index and checks it against the recorded layout.
    pub fn index(&self) -> Result<Arc<CommutantIndex>> {
        let index = CommutantIndex::new(self.n, self.d)?;
        if Manifest::new(&index, &self.observables).blocks != self.blocks {
            return Err(Error::Format("manifest layout does not match the canonical index".into()));
        }
        Ok(Arc::new(index))
    }

    /// `(ν, W, W')` patterns for a flat component position.
    pub fn decode(&self, flat: usize) -> Option<(&[u32], &[u32], &[u32])> {
        let b = self.blocks.iter().find(|b| flat >= b.offset && flat < b.offset + b.dim * b.dim)?;
        let r = flat - b.offset;
        Some((&b.nu, &b.patterns[r / b.dim], &b.patterns[r % b.dim]))
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn parse_num(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Format(format!("bad number '{s}'")))
}

/// One row per record, columns as listed in the manifest.
pub fn write_trajectory_csv<W: Write>(out: W, manifest: &Manifest, traj: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(manifest.columns.iter().map(|(h, _)| h.as_str())).map_err(csv_err)?;
    for r in &traj.records {
        let mut row = vec![num(r.t)];
        for v in &r.values {
            row.push(num(v.re));
            row.push(num(v.im));
        }
        row.push(num(r.purity));
        row.extend(r.weights.iter().map(|&x| num(x)));
        w.write_record(&row).map_err(csv_err)?;
    }
    Ok(w.flush()?)
}

/// Inverse of [`write_trajectory_csv`]; the trace is recovered as `Σ w_ν`.
pub fn read_trajectory_csv<R: Read>(input: R, manifest: &Manifest) -> Result<Vec<Record>> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let expected: Vec<&String> = manifest.columns.iter().map(|(h, _)| h).collect();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Format("CSV header does not match the manifest".into()));
    }
    let k = manifest.observables.len();
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(csv_err)?;
        let f: Vec<f64> = row.iter().map(parse_num).collect::<Result<_>>()?;
        if f.len() != manifest.columns.len() {
            return Err(Error::Format("CSV row width does not match the manifest".into()));
        }
        let values = (0..k).map(|i| C64::new(f[1 + 2 * i], f[2 + 2 * i])).collect();
        let weights: Vec<f64> = f[2 + 2 * k..].to_vec();
        out.push(Record {
            t: f[0],
            trace: C64::new(weights.iter().sum(), 0.0),
            purity: f[1 + 2 * k],
            values,
            weights,
        });
    }
    Ok(out)
}

/// Long-format component snapshots: `t, flat, re, im`.
pub fn write_snapshots_csv<W: Write>(out: W, traj: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "flat", "re", "im"]).map_err(csv_err)?;
    for (t, data) in &traj.snapshots {
        for (k, v) in data.iter().enumerate() {
            w.write_record([num(*t), k.to_string(), num(v.re), num(v.im)]).map_err(csv_err)?;
        }
    }
    Ok(w.flush()?)
}

/// Coordinate list `row, col, re, im` of the matrix at time `t`, sorted.
pub fn write_coo_csv<W: Write>(out: W, m: &LiouvillianMatrix, t: f64) -> Result<()> {
    let mut entries = m.entries(t)?;
    entries.sort_by_key(|&(r, c, _)| (r, c));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row", "col", "re", "im"]).map_err(csv_err)?;
    for (r, c, v) in entries {
        w.write_record([r.to_string(), c.to_string(), num(v.re), num(v.im)]).map_err(csv_err)?;
    }
    Ok(w.flush()?)
}

pub fn read_coo_csv<R: Read>(input: R) -> Result<Vec<(usize, usize, C64)>> {
    let mut rd = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(csv_err)?;
        let idx = |k: usize| row[k].parse::<usize>().map_err(|_| Error::Format(format!("bad index '{}'", &row[k])));
        out.push((idx(0)?, idx(1)?, C64::new(parse_num(&row[2])?, parse_num(&row[3])?)));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ShapeTable {
    pub nu: Vec<u32>,
    pub label: String,
    pub f: String,
    pub weyl_dim: usize,
    pub patterns: Vec<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tables {
    #[serde(rename = "N")]
    pub n: u32,
    pub d: usize,
    pub commutant_dim: String,
    pub binomial: String,
    pub shapes: Vec<ShapeTable>,
}

pub fn tables(n: u32, d: usize) -> Result<Tables> {
    let mut shapes = Vec::new();
    let mut total = 0u128;
    for nu in partitions_of(n, d) {
        let basis = swt_basis(&nu, d);
        total += (basis.len() as u128).pow(2);
        shapes.push(ShapeTable {
            nu: nu.parts().to_vec(),
            label: nu.label(),
            f: syt_count(&nu)?.to_string(),
            weyl_dim: basis.len(),
            patterns: basis.patterns.iter().map(|w| w.rows()).collect(),
        });
    }
    Ok(Tables {
        n,
        d,
        commutant_dim: total.to_string(),
        binomial: binomial(n as u64 + (d * d) as u64 - 1, n as u64)?.to_string(),
        shapes,
    })
}

/// Nonzero coefficients `⟨W_μ, j | W_λ⟩` for every `λ ⊢ N`, keyed
/// `"<W_μ flat>;<j>;<W_λ flat>"` with comma-separated entries.
pub fn cgc_dump(n: u32, d: usize) -> Result<BTreeMap<String, BTreeMap<String, String>>> {
    let mut out = BTreeMap::new();
    let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    for lambda in partitions_of(n, d) {
        let table = cgc_table(&lambda, d)?;
        let lb = swt_basis(&lambda, d);
        let mut entries = BTreeMap::new();
        for (wl, row) in table.rows.iter().enumerate() {
            for e in row {
                let mb = swt_basis(&table.mus[e.mu], d);
                let key = format!("{};{};{}", join(mb.patterns[e.w_mu].flat()), e.j, join(lb.patterns[wl].flat()));
                entries.insert(key, e.value.to_string());
            }
        }
        out.insert(lambda.label(), entries);
    }
    Ok(out)
}

/// Parses a dotted shape label such as `2.1`.
pub fn parse_label(label: &str) -> Result<Partition> {
    let parts = label
        .split('.')
        .map(|s| s.parse::<u32>().map_err(|_| Error::Format(format!("bad partition label '{label}'"))))
        .collect::<Result<Vec<_>>>()?;
    Partition::new(parts.into_iter().filter(|&p| p > 0).collect())
}
