use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::pf::{pf_eval, PfSpec};
use super::piecewise::PiecewiseLinearMap;
use crate::error::{Error, Result};
use crate::linalg::{pow_rational, Matrix, OrderedPoints, Scalar};

/// A tabulated function as `[point, value]` pairs.
pub type Table = Vec<(Scalar, Scalar)>;

/// Closed-form kernel families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// e^{xy/n}
    VandermondeExp { n: f64 },
    /// 1 + xy
    Jain,
    /// max(1 + xy, 0)
    Jks,
    /// 1 + u0^{x+y}
    Hankel { u0: Scalar },
    /// φ(x)ψ(y)
    RankOne { phi: Table, psi: Table },
    /// e^{xy/n} φ(x)ψ(y)
    RankOneApprox { phi: Table, psi: Table, n: f64 },
    /// Λ(φ_X(x) - φ_Y(y)), or Λ(φ_Y(y) - φ_X(x)) when `reflect` is set.
    ToeplitzPf {
        pf: PfSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi_x: Option<PiecewiseLinearMap>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi_y: Option<PiecewiseLinearMap>,
        #[serde(default)]
        reflect: bool,
    },
    Constant { c: Scalar },
    /// `inner` on domain_x × domain_y, `pad_value` elsewhere.
    Padded {
        inner: Box<PaddedInner>,
        pad_value: u8,
        domain_x: Vec<Scalar>,
        domain_y: Vec<Scalar>,
    },
    /// `matrix[i][j]` on the ε-box around (x_anchors[i], y_anchors[j]), 0 elsewhere.
    Inflation {
        matrix: Matrix,
        x_anchors: Vec<f64>,
        y_anchors: Vec<f64>,
        eps: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PaddedInner {
    Kernel(KernelSpec),
    Matrix(Matrix),
}

fn same_point(a: &Scalar, b: &Scalar) -> bool {
    match (a, b) {
        (Scalar::Exact(p), Scalar::Exact(q)) => p == q,
        _ => a.to_f64() == b.to_f64(),
    }
}

fn lookup(table: &Table, x: &Scalar) -> Result<Scalar> {
    table
        .iter()
        .find(|(p, _)| same_point(p, x))
        .map(|(_, v)| v.clone())
        .ok_or_else(|| Error::Untabulated(x.to_string()))
}

fn positive_finite(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

fn check_increasing(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() || v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!("{what} must be nonempty and strictly increasing")));
    }
    Ok(())
}

fn min_gap(v: &[f64]) -> f64 {
    v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::VandermondeExp { n } => positive_finite("n", *n),
            KernelSpec::Jain | KernelSpec::Jks => Ok(()),
            KernelSpec::Hankel { u0 } => {
                let u = u0.to_f64();
                if u > 0.0 && u < 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("u0 must lie in (0,1), got {u0}")))
                }
            }
            KernelSpec::RankOne { phi, psi } | KernelSpec::RankOneApprox { phi, psi, .. } => {
                if let KernelSpec::RankOneApprox { n, .. } = self {
                    positive_finite("n", *n)?;
                }
                for (p, v) in phi.iter().chain(psi) {
                    if !(v.to_f64() > 0.0) {
                        return Err(Error::InvalidParameter(format!("table value at {p} must be positive, got {v}")));
                    }
                }
                Ok(())
            }
            KernelSpec::ToeplitzPf { pf, .. } => pf.validate(),
            KernelSpec::Constant { c } => {
                if c.to_f64() >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("constant must be nonnegative, got {c}")))
                }
            }
            KernelSpec::Padded {
                inner,
                pad_value,
                domain_x,
                domain_y,
            } => {
                if *pad_value > 1 {
                    return Err(Error::InvalidParameter(format!("pad_value must be 0 or 1, got {pad_value}")));
                }
                OrderedPoints::from_scalars(domain_x.clone())?;
                OrderedPoints::from_scalars(domain_y.clone())?;
                match inner.as_ref() {
                    PaddedInner::Kernel(k) => k.validate(),
                    PaddedInner::Matrix(m) => {
                        if m.shape() != (domain_x.len(), domain_y.len()) {
                            return Err(Error::ShapeMismatch {
                                expected: (domain_x.len(), domain_y.len()),
                                found: m.shape(),
                            });
                        }
                        Ok(())
                    }
                }
            }
            KernelSpec::Inflation {
                matrix,
                x_anchors,
                y_anchors,
                eps,
            } => {
                check_increasing(x_anchors, "x anchors")?;
                check_increasing(y_anchors, "y anchors")?;
                if matrix.shape() != (x_anchors.len(), y_anchors.len()) {
                    return Err(Error::ShapeMismatch {
                        expected: (x_anchors.len(), y_anchors.len()),
                        found: matrix.shape(),
                    });
                }
                positive_finite("eps", *eps)?;
                let gap = min_gap(x_anchors).min(min_gap(y_anchors));
                if *eps >= gap / 2.0 {
                    return Err(Error::InvalidParameter(format!(
                        "eps {eps} must be below half the minimal anchor gap {gap}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Kernel value at one point pair; exact whenever the family and inputs allow.
    pub fn eval(&self, x: &Scalar, y: &Scalar) -> Result<Scalar> {
        let (xf, yf) = (x.to_f64(), y.to_f64());
        Ok(match self {
            KernelSpec::VandermondeExp { n } => Scalar::Float((xf * yf / n).exp()),
            KernelSpec::Jain | KernelSpec::Jks => {
                let clamp = matches!(self, KernelSpec::Jks);
                match (x, y) {
                    (Scalar::Exact(p), Scalar::Exact(q)) => {
                        let v = BigRational::one() + p * q;
                        Scalar::Exact(if clamp && v.is_negative() { BigRational::zero() } else { v })
                    }
                    _ => {
                        let v = 1.0 + xf * yf;
                        Scalar::Float(if clamp { v.max(0.0) } else { v })
                    }
                }
            }
            KernelSpec::Hankel { u0 } => match (u0, x.add(y).ok()) {
                (Scalar::Exact(u), Some(Scalar::Exact(s))) if s.is_integer() => {
                    let e = s.to_integer();
                    let base = if e.is_negative() { u.recip() } else { u.clone() };
                    let e = e.abs().to_u32().ok_or_else(|| Error::InvalidParameter("exponent too large".into()))?;
                    Scalar::Exact(BigRational::one() + pow_rational(&base, e))
                }
                _ => Scalar::Float(1.0 + u0.to_f64().powf(xf + yf)),
            },
            KernelSpec::RankOne { phi, psi } => {
                let (a, b) = (lookup(phi, x)?, lookup(psi, y)?);
                match a.mul(&b) {
                    Ok(v) => v,
                    Err(_) => Scalar::Float(a.to_f64() * b.to_f64()),
                }
            }
            KernelSpec::RankOneApprox { phi, psi, n } => {
                Scalar::Float((xf * yf / n).exp() * lookup(phi, x)?.to_f64() * lookup(psi, y)?.to_f64())
            }
            KernelSpec::ToeplitzPf {
                pf,
                phi_x,
                phi_y,
                reflect,
            } => {
                let u = phi_x.as_ref().map_or(xf, |m| m.eval(xf));
                let v = phi_y.as_ref().map_or(yf, |m| m.eval(yf));
                Scalar::Float(pf_eval(pf, if *reflect { v - u } else { u - v }))
            }
            KernelSpec::Constant { c } => c.clone(),
            KernelSpec::Padded {
                inner,
                pad_value,
                domain_x,
                domain_y,
            } => {
                let i = domain_x.iter().position(|p| same_point(p, x));
                let j = domain_y.iter().position(|p| same_point(p, y));
                match (i, j, inner.as_ref()) {
                    (Some(_), Some(_), PaddedInner::Kernel(k)) => k.eval(x, y)?,
                    (Some(i), Some(j), PaddedInner::Matrix(m)) => m.get(i, j),
                    _ => Scalar::Exact(BigRational::from_integer(BigInt::from(*pad_value))),
                }
            }
            KernelSpec::Inflation {
                matrix,
                x_anchors,
                y_anchors,
                eps,
            } => {
                let i = x_anchors.iter().position(|a| (xf - a).abs() < *eps);
                let j = y_anchors.iter().position(|a| (yf - a).abs() < *eps);
                match (i, j) {
                    (Some(i), Some(j)) => matrix.get(i, j),
                    _ => Scalar::Exact(BigRational::zero()),
                }
            }
        })
    }
}

/// K[X; Y] with the grids recorded on the matrix.
///
/// The result is exact when every entry came out exact, float otherwise.
pub fn sample_kernel(spec: &KernelSpec, xs: &OrderedPoints, ys: &OrderedPoints) -> Result<Matrix> {
    spec.validate()?;
    if let KernelSpec::Padded { domain_x, domain_y, .. } = spec {
        for (dom, grid, axis) in [(domain_x, xs, "x"), (domain_y, ys, "y")] {
            let pts = grid.scalars();
            if let Some(p) = dom.iter().find(|p| !pts.iter().any(|g| same_point(g, p))) {
                return Err(Error::InvalidParameter(format!(
                    "padded inner {axis}-domain point {p} is not on the sampling grid"
                )));
            }
        }
    }
    let mut data = Vec::with_capacity(xs.len() * ys.len());
    for x in xs.scalars() {
        for y in ys.scalars() {
            data.push(spec.eval(&x, &y)?);
        }
    }
    let m = if data.iter().all(Scalar::is_exact) {
        Matrix::from_scalars(xs.len(), ys.len(), data)?
    } else {
        Matrix::from_float(xs.len(), ys.len(), data.iter().map(Scalar::to_f64).collect())?
    };
    m.with_points(Some(xs.clone()), Some(ys.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{det_exact, rat, tn_order, Tolerance};

    fn ints(v: &[i64]) -> OrderedPoints {
        OrderedPoints::integers(v).unwrap()
    }

    #[test]
    fn jain_grid() {
        let m = sample_kernel(&KernelSpec::Jain, &ints(&[1, 2, 3]), &ints(&[1, 2, 3])).unwrap();
        assert_eq!(m, Matrix::from_int_rows(&[[2, 3, 4], [3, 5, 7], [4, 7, 10]]).unwrap().with_points(Some(ints(&[1, 2, 3])), Some(ints(&[1, 2, 3]))).unwrap());
        assert!(det_exact(&m).unwrap().is_zero());
    }

    #[test]
    fn hankel_grid_exact_and_float() {
        let spec = KernelSpec::Hankel { u0: Scalar::exact(1, 2) };
        let m = sample_kernel(&spec, &ints(&[1, 2]), &ints(&[1, 2])).unwrap();
        assert_eq!(m.get(0, 0), Scalar::exact(5, 4));
        assert_eq!(m.get(0, 1), Scalar::exact(9, 8));
        assert_eq!(m.get(1, 1), Scalar::exact(17, 16));
        let spec = KernelSpec::Hankel { u0: Scalar::Float(0.5) };
        let m = sample_kernel(&spec, &ints(&[1, 2]), &ints(&[1, 2])).unwrap();
        assert_eq!(m.to_f64_vec(), vec![1.25, 1.125, 1.125, 1.0625]);
    }

    #[test]
    fn constant_and_jks_clamp() {
        let m = sample_kernel(&KernelSpec::Constant { c: Scalar::int(3) }, &ints(&[0, 5]), &ints(&[1, 2, 9])).unwrap();
        assert!(m.exact_data().unwrap().iter().all(|v| *v == rat(3, 1)));
        let m = sample_kernel(&KernelSpec::Jks, &ints(&[-2]), &ints(&[1, 3])).unwrap();
        assert_eq!(m.get(0, 0), Scalar::int(0));
        assert_eq!(m.get(0, 1), Scalar::int(0));
    }

    #[test]
    fn rank_one_table_lookup() {
        let phi = vec![(Scalar::int(1), Scalar::int(2)), (Scalar::int(2), Scalar::int(3))];
        let psi = vec![(Scalar::int(1), Scalar::exact(1, 2))];
        let spec = KernelSpec::RankOne { phi, psi };
        let m = sample_kernel(&spec, &ints(&[1, 2]), &ints(&[1])).unwrap();
        assert_eq!(m.get(1, 0), Scalar::exact(3, 2));
        assert!(matches!(sample_kernel(&spec, &ints(&[1, 3]), &ints(&[1])), Err(Error::Untabulated(_))));
    }

    #[test]
    fn padded_kernel() {
        let spec = KernelSpec::Padded {
            inner: Box::new(PaddedInner::Matrix(Matrix::from_int_rows(&[[1, 2], [2, 1]]).unwrap())),
            pad_value: 1,
            domain_x: vec![Scalar::int(1), Scalar::int(2)],
            domain_y: vec![Scalar::int(1), Scalar::int(2)],
        };
        let m = sample_kernel(&spec, &ints(&[1, 2, 3, 4]), &ints(&[1, 2, 3, 4])).unwrap();
        assert_eq!(m.get(1, 0), Scalar::int(2));
        assert_eq!(m.get(3, 3), Scalar::int(1));
        let r = tn_order(&m, None, &Tolerance::default()).unwrap();
        assert_eq!(r.order, 1);
        assert!(sample_kernel(&spec, &ints(&[1, 3]), &ints(&[1, 2])).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(KernelSpec::Hankel { u0: Scalar::int(1) }.validate().is_err());
        assert!(KernelSpec::VandermondeExp { n: 0.0 }.validate().is_err());
        assert!(KernelSpec::Constant { c: Scalar::int(-1) }.validate().is_err());
    }

    #[test]
    fn json_tags() {
        let k: KernelSpec = serde_json::from_str(r#"{"kind":"jks"}"#).unwrap();
        assert_eq!(k, KernelSpec::Jks);
        let k: KernelSpec = serde_json::from_str(r#"{"kind":"hankel","u0":0.5}"#).unwrap();
        assert_eq!(k, KernelSpec::Hankel { u0: Scalar::Float(0.5) });
        let k: KernelSpec = serde_json::from_str(r#"{"kind":"toeplitz_pf","pf":{"kind":"omega"},"phi_x":{"inputs":[1,2],"outputs":[0,1]}}"#).unwrap();
        assert!(matches!(k, KernelSpec::ToeplitzPf { phi_x: Some(_), .. }));
        let back: KernelSpec = serde_json::from_str(&serde_json::to_string(&k).unwrap()).unwrap();
        assert_eq!(back, k);
    }
}
