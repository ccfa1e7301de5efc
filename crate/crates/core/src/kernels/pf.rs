use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four PF function families of the kernel zoo.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PfSpec {
    /// e^{-a(x-δ)} for x > δ, 1/2 at x = δ, 0 below.
    OneSidedExp {
        a: f64,
        #[serde(default)]
        delta: f64,
    },
    /// x e^{-x} for x > 0.
    Omega,
    /// (γ+1)e^{-γ|x|} - γe^{-(γ+1)|x|}.
    EvenM { gamma: f64 },
    /// Centered normal density.
    Gaussian { variance: f64 },
}

impl PfSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        match self {
            PfSpec::OneSidedExp { a, delta } => {
                positive("a", *a)?;
                if !delta.is_finite() {
                    return Err(Error::NonFinite(*delta));
                }
                Ok(())
            }
            PfSpec::Omega => Ok(()),
            PfSpec::EvenM { gamma } => positive("gamma", *gamma),
            PfSpec::Gaussian { variance } => positive("variance", *variance),
        }
    }

    /// Interval outside which the function is below ~1e-17 of its peak.
    pub fn support_window(&self) -> (f64, f64) {
        match self {
            PfSpec::OneSidedExp { a, delta } => (*delta, delta + 40.0 / a),
            PfSpec::Omega => (0.0, 50.0),
            PfSpec::EvenM { gamma } => (-40.0 / gamma, 40.0 / gamma),
            PfSpec::Gaussian { variance } => {
                let w = 10.0 * variance.sqrt();
                (-w, w)
            }
        }
    }

    /// Value at x, using the one-sided limit from the right at a jump.
    fn right_limit(&self, x: f64) -> f64 {
        match self {
            PfSpec::OneSidedExp { delta, .. } if x == *delta => 1.0,
            _ => pf_eval(self, x),
        }
    }
}

pub fn pf_eval(pf: &PfSpec, x: f64) -> f64 {
    match pf {
        PfSpec::OneSidedExp { a, delta } => {
            if x > *delta {
                (-a * (x - delta)).exp()
            } else if x == *delta {
                0.5
            } else {
                0.0
            }
        }
        PfSpec::Omega => {
            if x > 0.0 {
                x * (-x).exp()
            } else {
                0.0
            }
        }
        PfSpec::EvenM { gamma } => {
            let t = x.abs();
            (gamma + 1.0) * (-gamma * t).exp() - gamma * (-(gamma + 1.0) * t).exp()
        }
        PfSpec::Gaussian { variance } => gaussian(x, *variance),
    }
}

pub(crate) fn gaussian(x: f64, variance: f64) -> f64 {
    (-x * x / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
}

/// Anything that can be lifted to a Toeplitz kernel.
pub trait PfFunction: Sync {
    fn eval(&self, x: f64) -> f64;
}

impl PfFunction for PfSpec {
    fn eval(&self, x: f64) -> f64 {
        pf_eval(self, x)
    }
}

/// A PF function convolved with a Gaussian, tabulated on a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothedPf {
    pub start: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl SmoothedPf {
    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    /// Trapezoid sum of the tabulated values.
    pub fn integral(&self) -> f64 {
        let n = self.values.len();
        let inner: f64 = self.values.iter().sum();
        self.step * (inner - 0.5 * (self.values[0] + self.values[n - 1]))
    }
}

impl PfFunction for SmoothedPf {
    /// Linear interpolation between nodes, zero outside the table.
    fn eval(&self, x: f64) -> f64 {
        if !(x >= self.start && x <= self.end()) {
            return 0.0;
        }
        let pos = (x - self.start) / self.step;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}

/// Convolution of `pf` with the centered Gaussian of the given variance.
///
/// Trapezoid quadrature with step σ/20 over the PF's support window; the
/// table extends 6σ past the window on each side.
pub fn gaussian_smooth_pf(pf: &PfSpec, variance: f64) -> Result<SmoothedPf> {
    gaussian_smooth_pf_with_step(pf, variance, variance.sqrt() / 20.0)
}

pub fn gaussian_smooth_pf_with_step(pf: &PfSpec, variance: f64, step: f64) -> Result<SmoothedPf> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::InvalidParameter(format!("variance must be positive, got {variance}")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
    }
    pf.validate()?;
    let sigma = variance.sqrt();
    let (lo, hi) = pf.support_window();
    let nodes = ((hi - lo) / step).ceil() as usize;
    if nodes > 50_000_000 {
        return Err(Error::InvalidParameter("quadrature grid too fine for the support window".into()));
    }
    let samples: Vec<f64> = (0..=nodes)
        .map(|k| {
            let s = lo + k as f64 * step;
            let w = if k == 0 || k == nodes { 0.5 * step } else { step };
            let v = if k == 0 { pf.right_limit(s) } else { pf_eval(pf, s) };
            w * v
        })
        .collect();
    let margin = (6.0 * sigma / step).ceil() as usize;
    let reach = (8.0 * sigma / step).ceil() as i64;
    let total = nodes + 2 * margin;
    let values = (0..=total)
        .map(|m| {
            // z_m sits on the node lattice, offset by `margin` nodes to the left.
            let c = m as i64 - margin as i64;
            let k_lo = (c - reach).max(0) as usize;
            let k_hi = ((c + reach).min(nodes as i64)).max(-1);
            if k_hi < k_lo as i64 {
                return 0.0;
            }
            (k_lo..=k_hi as usize)
                .map(|k| samples[k] * gaussian((c - k as i64) as f64 * step, variance))
                .sum()
        })
        .collect();
    Ok(SmoothedPf {
        start: lo - margin as f64 * step,
        step,
        values,
    })
}
