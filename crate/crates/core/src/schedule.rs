//! Scalar time dependence for rates and Hamiltonian terms.

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// `t → real`, possibly negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Schedule {
    Constant {
        value: f64,
    },
    /// `offset + amplitude · sin(2π · frequency · t + phase)`.
    Sinusoidal {
        #[serde(default)]
        offset: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Linear interpolation on strictly increasing `times`.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Constant { value: 1.0 }
    }
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Schedule::Constant { value }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Schedule::Constant { .. })
    }

    /// Well-formedness problems, empty when the schedule is usable.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            Schedule::Constant { value } => {
                if !value.is_finite() {
                    out.push("constant value is not finite".into());
                }
            }
            Schedule::Sinusoidal { offset, amplitude, frequency, phase } => {
                if ![offset, amplitude, frequency, phase].iter().all(|x| x.is_finite()) {
                    out.push("sinusoidal parameters must be finite".into());
                }
            }
            Schedule::Tabulated { times, values } => {
                if times.is_empty() {
                    out.push("tabulated schedule has no samples".into());
                }
                if times.len() != values.len() {
                    out.push(format!("tabulated schedule has {} times but {} values", times.len(), values.len()));
                }
                if times.iter().chain(values).any(|x| !x.is_finite()) {
                    out.push("tabulated samples must be finite".into());
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    out.push("tabulated times must be strictly increasing".into());
                }
            }
        }
        out
    }

    /// Domain `[t_min, t_max]`; unbounded for analytic kinds.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Schedule::Tabulated { times, .. } if !times.is_empty() => (times[0], times[times.len() - 1]),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            Schedule::Constant { value } => Ok(*value),
            Schedule::Sinusoidal { offset, amplitude, frequency, phase } => {
                Ok(offset + amplitude * (std::f64::consts::TAU * frequency * t + phase).sin())
            }
            Schedule::Tabulated { times, values } => {
                let (t_min, t_max) = self.domain();
                if times.is_empty() || !(t_min..=t_max).contains(&t) {
                    return Err(Error::ScheduleDomain { t, t_min, t_max });
                }
                let k = times.partition_point(|&x| x <= t);
                if k == times.len() {
                    return Ok(values[k - 1]);
                }
                let (t0, t1) = (times[k - 1], times[k]);
                let s = (t - t0) / (t1 - t0);
                Ok(values[k - 1] * (1.0 - s) + values[k] * s)
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Lenient {
    Number(f64),
    Full(Schedule),
}

/// Accepts either a bare number (constant) or a tagged schedule object.
pub fn lenient<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Schedule, D::Error> {
    Ok(match Lenient::deserialize(de)? {
        Lenient::Number(value) => Schedule::Constant { value },
        Lenient::Full(s) => s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation() {
        assert_eq!(Schedule::constant(-0.3).eval(7.0).unwrap(), -0.3);
        let s = Schedule::Sinusoidal { offset: 0.5, amplitude: 2.0, frequency: 0.25, phase: 0.0 };
        assert!((s.eval(1.0).unwrap() - 2.5).abs() < 1e-15);
        let tab = Schedule::Tabulated { times: vec![0.0, 1.0, 3.0], values: vec![1.0, 3.0, -1.0] };
        assert_eq!(tab.eval(0.0).unwrap(), 1.0);
        assert_eq!(tab.eval(0.5).unwrap(), 2.0);
        assert_eq!(tab.eval(2.0).unwrap(), 1.0);
        assert_eq!(tab.eval(3.0).unwrap(), -1.0);
        assert!(matches!(tab.eval(3.01), Err(Error::ScheduleDomain { .. })));
        assert!(matches!(tab.eval(-1e-9), Err(Error::ScheduleDomain { .. })));
    }

    #[test]
    fn well_formedness() {
        let bad = Schedule::Tabulated { times: vec![0.0, 2.0, 1.0], values: vec![0.0; 3] };
        assert_eq!(bad.problems().len(), 1);
        let bad = Schedule::Tabulated { times: vec![], values: vec![1.0] };
        assert_eq!(bad.problems().len(), 2);
        assert!(Schedule::default().problems().is_empty());
    }

    #[test]
    fn json_forms() {
        #[derive(Deserialize)]
        struct W {
            #[serde(deserialize_with = "lenient")]
            s: Schedule,
        }
        let w: W = serde_json::from_str(r#"{"s": 0.7}"#).unwrap();
        assert_eq!(w.s, Schedule::constant(0.7));
        let w: W = serde_json::from_str(r#"{"s": {"kind": "sinusoidal", "amplitude": 1, "frequency": 2}}"#).unwrap();
        assert_eq!(w.s, Schedule::Sinusoidal { offset: 0.0, amplitude: 1.0, frequency: 2.0, phase: 0.0 });
        assert!(serde_json::from_str::<W>(r#"{"s": {"kind": "cubic"}}"#).is_err());
    }
}
