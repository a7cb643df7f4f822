//! Time integration of `ρ̇ = M(t) ρ` on component vectors.

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::commutant::{CommutantIndex, PiOperator};
use crate::error::{Error, Result};
use crate::liouvillian::LiouvillianMatrix;
use crate::model::{Grid, Method, ModelSpec, STATE_TOL};
use crate::pparticle::assemble_p;

/// Trace drift beyond this aborts integration.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Observables evaluated on one state.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub t: f64,
    pub trace: C64,
    pub purity: f64,
    pub values: Vec<C64>,
    /// `w_ν` per shape, in index order.
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub names: Vec<String>,
    pub records: Vec<Record>,
    /// `(t, components)` at recorded times when snapshots were requested.
    pub snapshots: Vec<(f64, Vec<C64>)>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn series(&self, name: &str) -> Option<Vec<C64>> {
        let k = self.names.iter().position(|n| n == name)?;
        Some(self.records.iter().map(|r| r.values[k]).collect())
    }

    pub fn final_state(&self, index: &Arc<CommutantIndex>) -> Option<PiOperator> {
        self.snapshots.last().map(|(_, d)| PiOperator { index: index.clone(), data: d.clone() })
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    /// Record every `thinning`-th accepted step (the last step is always recorded).
    pub thinning: usize,
    pub snapshots: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { thinning: 1, snapshots: false }
    }
}

pub fn observe(rho: &PiOperator, t: f64, observables: &[(String, PiOperator)]) -> Result<Record> {
    Ok(Record {
        t,
        trace: rho.trace(),
        purity: rho.purity(),
        values: observables.iter().map(|(_, o)| o.expectation(rho)).collect::<Result<_>>()?,
        weights: rho.block_weights(),
    })
}

/// Re-evaluates observables on stored snapshots.
pub fn record_observables(
    traj: &Trajectory,
    index: &Arc<CommutantIndex>,
    observables: &[(String, PiOperator)],
) -> Result<Vec<Record>> {
    traj.snapshots
        .iter()
        .map(|(t, d)| observe(&PiOperator { index: index.clone(), data: d.clone() }, *t, observables))
        .collect()
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn inf_norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

struct Recorder<'a> {
    index: &'a Arc<CommutantIndex>,
    observables: &'a [(String, PiOperator)],
    opts: &'a Options,
    trace0: C64,
    traj: Trajectory,
}

impl Recorder<'_> {
    fn check_drift(&self, y: &[C64], t: f64) -> Result<PiOperator> {
        let rho = PiOperator { index: self.index.clone(), data: y.to_vec() };
        let drift = (rho.trace() - self.trace0).norm();
        if drift.is_nan() || drift > TRACE_DRIFT_LIMIT {
            return Err(Error::TraceDrift { t, drift, limit: TRACE_DRIFT_LIMIT });
        }
        Ok(rho)
    }

    fn step(&mut self, y: &[C64], t: f64, last: bool) -> Result<()> {
        let rho = self.check_drift(y, t)?;
        let k = self.traj.accepted_steps;
        if last || k.is_multiple_of(self.opts.thinning) {
            self.traj.records.push(observe(&rho, t, self.observables)?);
            if self.opts.snapshots {
                self.traj.snapshots.push((t, rho.data));
            }
        }
        Ok(())
    }
}

/// Integrates from `grid.t0` to `grid.t1`.
pub fn integrate(
    m: &LiouvillianMatrix,
    rho0: &PiOperator,
    grid: &Grid,
    observables: &[(String, PiOperator)],
    opts: &Options,
) -> Result<Trajectory> {
    if rho0.data.len() != m.dim() {
        return Err(Error::Dimension(format!("state has {} components, matrix {}", rho0.data.len(), m.dim())));
    }
    let trace0 = rho0.trace();
    if (trace0 - C64::new(1.0, 0.0)).norm() > STATE_TOL {
        return Err(Error::InvalidState(format!("initial trace {trace0} differs from 1")));
    }
    if rho0.hermiticity_defect() > STATE_TOL {
        return Err(Error::InvalidState("initial state is not Hermitian".into()));
    }
    if opts.thinning == 0 {
        return Err(Error::InvalidModel(vec!["thinning must be at least 1".into()]));
    }
    let mut rec = Recorder {
        index: &m.index,
        observables,
        opts,
        trace0,
        traj: Trajectory {
            names: observables.iter().map(|(n, _)| n.clone()).collect(),
            records: Vec::new(),
            snapshots: Vec::new(),
            accepted_steps: 0,
            rejected_steps: 0,
        },
    };
    let span = grid.t1 - grid.t0;
    rec.step(&rho0.data, grid.t0, span <= 0.0)?;
    if span > 0.0 {
        match grid.method {
            Method::Rk4 => rk4(m, rho0.data.clone(), grid, &mut rec)?,
            Method::Rk45 => rk45(m, rho0.data.clone(), grid, &mut rec)?,
        }
    }
    Ok(rec.traj)
}

/// Number of fixed steps covering `span` with step at most `dt`.
pub fn fixed_steps(span: f64, dt: f64) -> usize {
    let ratio = span / dt;
    let r = ratio.round();
    if (ratio - r).abs() < 1e-9 * ratio.max(1.0) {
        (r as usize).max(1)
    } else {
        ratio.ceil() as usize
    }
}

/// One classical Runge–Kutta step of size `h`.
pub fn rk4_step(m: &LiouvillianMatrix, y: &mut [C64], t: f64, h: f64, work: &mut [Vec<C64>; 3]) -> Result<()> {
    let [k, acc, tmp] = work;
    let hc = |x: f64| C64::new(x, 0.0);
    acc.copy_from_slice(y);
    m.apply_raw(y, t, k)?;
    axpy(acc, hc(h / 6.0), k);
    for (frac, weight) in [(0.5, 2.0), (0.5, 2.0), (1.0, 1.0)] {
        tmp.copy_from_slice(y);
        axpy(tmp, hc(frac * h), k);
        m.apply_raw(tmp, t + frac * h, k)?;
        axpy(acc, hc(weight * h / 6.0), k);
    }
    y.copy_from_slice(acc);
    Ok(())
}

fn rk4(m: &LiouvillianMatrix, mut y: Vec<C64>, grid: &Grid, rec: &mut Recorder) -> Result<()> {
    let span = grid.t1 - grid.t0;
    let n = fixed_steps(span, grid.dt.expect("rk4 requires dt"));
    let h = span / n as f64;
    let z = vec![C64::new(0.0, 0.0); y.len()];
    let mut work = [z.clone(), z.clone(), z];
    for s in 0..n {
        let t = grid.t0 + s as f64 * h;
        rk4_step(m, &mut y, t, h, &mut work)?;
        rec.traj.accepted_steps += 1;
        let t_next = if s + 1 == n { grid.t1 } else { grid.t0 + (s + 1) as f64 * h };
        rec.step(&y, t_next, s + 1 == n)?;
    }
    Ok(())
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn rk45(m: &LiouvillianMatrix, mut y: Vec<C64>, grid: &Grid, rec: &mut Recorder) -> Result<()> {
    let len = y.len();
    let zero = C64::new(0.0, 0.0);
    let mut k: Vec<Vec<C64>> = vec![vec![zero; len]; 7];
    let mut tmp = vec![zero; len];
    let mut t = grid.t0;
    let span = grid.t1 - grid.t0;
    let mut h = grid.dt.unwrap_or(span / 100.0).min(span);
    m.apply_raw(&y, t, &mut k[0])?;
    loop {
        let last = t + h >= grid.t1 - 1e-14 * span.max(1.0);
        if last {
            h = grid.t1 - t;
        } else if h < grid.dt_min {
            return Err(Error::StepUnderflow { t, dt: h, dt_min: grid.dt_min });
        }
        for s in 1..7 {
            tmp.copy_from_slice(&y);
            for (j, a) in A[s][..s].iter().enumerate() {
                if *a != 0.0 {
                    axpy(&mut tmp, C64::new(h * a, 0.0), &k[j]);
                }
            }
            m.apply_raw(&tmp, t + C[s] * h, &mut k[s])?;
        }
        // tmp now holds the fifth-order solution (stage 7 input)
        let mut err = vec![zero; len];
        for (j, e) in E.iter().enumerate() {
            if *e != 0.0 {
                axpy(&mut err, C64::new(h * e, 0.0), &k[j]);
            }
        }
        let tol = grid.atol + grid.rtol * inf_norm(&y).max(inf_norm(&tmp));
        let en = inf_norm(&err);
        if en <= tol {
            t = if last { grid.t1 } else { t + h };
            std::mem::swap(&mut y, &mut tmp);
            k.swap(0, 6);
            rec.traj.accepted_steps += 1;
            rec.step(&y, t, last)?;
            if last {
                return Ok(());
            }
        } else {
            rec.traj.rejected_steps += 1;
            if last && h < grid.dt_min {
                return Err(Error::StepUnderflow { t, dt: h, dt_min: grid.dt_min });
            }
        }
        let factor = if en == 0.0 { 5.0 } else { (0.9 * (tol / en).powf(0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
}

/// Builds, assembles and integrates a validated model.
pub struct Run {
    pub index: Arc<CommutantIndex>,
    pub matrix: LiouvillianMatrix,
    pub trajectory: Trajectory,
    pub assembly_seconds: f64,
    pub integration_seconds: f64,
}

pub fn run_model(spec: &ModelSpec, snapshots: bool) -> Result<Run> {
    spec.validate()?;
    let index = spec.index()?;
    let start = std::time::Instant::now();
    let matrix = assemble_p(spec, &index)?;
    let assembly_seconds = start.elapsed().as_secs_f64();
    let rho0 = spec.initial_components(&index)?;
    let obs = spec.observable_components(&index)?;
    let start = std::time::Instant::now();
    let opts = Options { thinning: spec.output.thinning, snapshots };
    let trajectory = integrate(&matrix, &rho0, &spec.grid, &obs, &opts)?;
    Ok(Run { index, matrix, trajectory, assembly_seconds, integration_seconds: start.elapsed().as_secs_f64() })
}
