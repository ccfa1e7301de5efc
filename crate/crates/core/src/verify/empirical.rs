//! Randomized forward check: feed F tuples of the order spec's orders and test the
//! output order.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::certify::{first_certified_negative, Certificate};
use super::trial_rng;
use crate::error::{Error, Result};
use crate::generators::{random_kernel_tuple, random_points, Generator, TupleCoord};
use crate::linalg::{tn_order, tp_order, Matrix, MinorSelector, OrderedPoints, Scalar, Tolerance};
use crate::transforms::{apply, Bound, Mode, MixedPowerTransform, OrderSpec};

/// Largest grid drawn; larger domains are sampled on 8 points.
pub const MAX_GRID: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalViolation {
    pub trial: u64,
    pub inputs: Vec<Matrix>,
    pub output: Matrix,
    pub selector: MinorSelector,
    pub det: Scalar,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalReport {
    pub mode: Mode,
    pub seed: u64,
    pub trials: u64,
    pub grid: (usize, usize),
    pub target_order: usize,
    pub violations: u64,
    /// Outputs whose order check failed only within tolerance.
    pub inconclusive: u64,
    /// Trials dropped because a drawn input missed its order.
    pub skipped: u64,
    pub first_violation: Option<EmpiricalViolation>,
}

impl EmpiricalReport {
    pub fn preserved(&self) -> bool {
        self.violations == 0
    }
}

enum Trial {
    Ok,
    Skipped,
    Inconclusive,
    Violation(Box<EmpiricalViolation>),
}

fn order_of(m: &Matrix, positive: bool, k: usize, tol: &Tolerance) -> Result<crate::linalg::OrderReport> {
    if positive {
        tp_order(m, Some(k), tol)
    } else {
        tn_order(m, Some(k), tol)
    }
}

/// (1+xy)^δ with δ ∈ (k-2, k-1): order k but usually not k+1.
fn jain_input(rng: &mut ChaCha8Rng, xs: &OrderedPoints, ys: &OrderedPoints, k: usize) -> Result<Matrix> {
    let delta = (k as f64 - 2.0).max(0.0) + rng.gen_range(0.05..0.95);
    let (x, y) = (xs.to_f64_vec(), ys.to_f64_vec());
    let data = x.iter().flat_map(|&a| y.iter().map(move |&b| (1.0 + a * b).powf(delta))).collect();
    Matrix::from_float(x.len(), y.len(), data)?.with_points(Some(xs.clone()), Some(ys.clone()))
}

/// A random 0-1 matrix of TN order ≥ k, by rejection.
fn zero_one_input(rng: &mut ChaCha8Rng, r: usize, c: usize, k: usize, symmetric: bool) -> Result<Option<Matrix>> {
    let tol = Tolerance::default();
    for _ in 0..64 {
        let mut v = vec![0i64; r * c];
        for i in 0..r {
            for j in 0..c {
                if symmetric && j < i {
                    v[i * c + j] = v[j * c + i];
                } else {
                    v[i * c + j] = i64::from(rng.gen_bool(0.7));
                }
            }
        }
        let rows: Vec<&[i64]> = v.chunks(c).collect();
        let m = Matrix::from_int_rows(&rows)?;
        if tn_order(&m, Some(k), &tol)?.order >= k {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

fn run_trial(
    f: &MixedPowerTransform,
    spec: &OrderSpec,
    mode: Mode,
    grid: (usize, usize),
    target: usize,
    seed: u64,
    trial: u64,
) -> Result<Trial> {
    let (r, c) = grid;
    let mut gen = Generator::from_rng(trial_rng(seed, trial));
    let xs = random_points(gen.rng(), r);
    let ys = if mode.symmetric() { xs.clone() } else { random_points(gen.rng(), c) };
    let full = r.min(c);
    let tol = Tolerance::default();
    let mut inputs = Vec::with_capacity(f.arity());
    for kb in &spec.k {
        let k = kb.finite().map_or(full, |v| (v as usize).min(full));
        // TN coordinates also draw 0-1 matrices, whose zero patterns reach
        // the boundary of the class; lower orders also draw (1+xy)^δ
        let pick: u8 = gen.rng().gen_range(0..3);
        let m = if pick == 0 && !mode.positive() {
            match zero_one_input(gen.rng(), r, c, k, mode.symmetric())? {
                Some(m) => m,
                None => return Ok(Trial::Skipped),
            }
        } else if pick == 1 && k < full {
            let m = jain_input(gen.rng(), &xs, &ys, k)?;
            if order_of(&m, mode.positive(), k, &tol)?.order < k {
                return Ok(Trial::Skipped);
            }
            m
        } else {
            random_kernel_tuple(&[TupleCoord::Generated { class: mode }], &xs, &ys, &mut gen)?.remove(0)
        };
        inputs.push(m);
    }
    let refs: Vec<&Matrix> = inputs.iter().collect();
    let output = apply(f, &refs)?;
    let check_tol = Tolerance::new(1e-12, true)?;
    let rep = order_of(&output, mode.positive(), target, &check_tol)?;
    if rep.order >= target {
        return Ok(Trial::Ok);
    }
    let found = if output.is_exact() {
        rep.witness.map(|w| (w.selector, w.det, None))
    } else {
        first_certified_negative(&output, target, &check_tol)?.map(|(s, cert)| (s, Scalar::Float(cert.det), Some(cert)))
    };
    Ok(match found {
        Some((selector, det, certificate)) => Trial::Violation(Box::new(EmpiricalViolation {
            trial,
            inputs,
            output,
            selector,
            det,
            certificate,
        })),
        None => Trial::Inconclusive,
    })
}

/// Applies F to `trials` random input tuples of the order spec's orders and
/// checks that the output has order min(l, N) on the sampled grid.
pub fn empirical_preservation(
    f: &MixedPowerTransform,
    spec: &OrderSpec,
    mode: Mode,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalReport> {
    spec.validate()?;
    if spec.p() != f.arity() {
        return Err(Error::InvalidParameter(format!(
            "transform has {} coordinates but the order spec lists {} orders",
            f.arity(),
            spec.p()
        )));
    }
    if spec.symmetric != mode.symmetric() {
        return Err(Error::MalformedSpec(format!("mode {mode} does not match the order spec's symmetry")));
    }
    let size = |b: Bound| match b {
        Bound::Finite(v) => Ok((v as usize).min(MAX_GRID)),
        Bound::Infinite => Err(Error::MalformedSpec("empirical checks need finite domain sizes".into())),
    };
    let grid = (size(spec.size_x)?, size(spec.size_y())?);
    let target = spec.l.finite().map_or(usize::MAX, |v| v as usize).min(grid.0).min(grid.1);
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(f, spec, mode, grid, target, seed, t))
        .collect::<Result<_>>()?;
    let mut report = EmpiricalReport {
        mode,
        seed,
        trials,
        grid,
        target_order: target,
        violations: 0,
        inconclusive: 0,
        skipped: 0,
        first_violation: None,
    };
    for r in results {
        match r {
            Trial::Ok => {}
            Trial::Skipped => report.skipped += 1,
            Trial::Inconclusive => report.inconclusive += 1,
            Trial::Violation(v) => {
                report.violations += 1;
                report.first_violation.get_or_insert(*v);
            }
        }
    }
    Ok(report)
}
