use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pow_rational, Matrix, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Term {
    /// t^α with 0^0 = 1.
    Power { alpha: f64 },
    /// 1 for t > 0, 0 at t = 0.
    Heaviside,
}

impl Term {
    /// The exponent when the term is a power with integral exponent.
    fn integer_power(&self) -> Option<u32> {
        match self {
            Term::Power { alpha } if alpha.fract() == 0.0 && *alpha <= 4096.0 => Some(*alpha as u32),
            _ => None,
        }
    }

    /// Exponent seen by positive inputs (a Heaviside factor is t^0 there).
    pub fn positive_exponent(&self) -> f64 {
        match self {
            Term::Power { alpha } => *alpha,
            Term::Heaviside => 0.0,
        }
    }
}

/// F(t) = c · ∏_{j∈J} t_j^{α_j} · ∏_{i∉J} 1_{t_i>0}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTransform", into = "RawTransform")]
pub struct MixedPowerTransform {
    c: Scalar,
    terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
struct RawTransform {
    c: Scalar,
    terms: Vec<Term>,
}

impl TryFrom<RawTransform> for MixedPowerTransform {
    type Error = Error;
    fn try_from(r: RawTransform) -> Result<Self> {
        MixedPowerTransform::new(r.c, r.terms)
    }
}

impl From<MixedPowerTransform> for RawTransform {
    fn from(f: MixedPowerTransform) -> Self {
        RawTransform { c: f.c, terms: f.terms }
    }
}

impl MixedPowerTransform {
    pub fn new(c: Scalar, terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("a transform needs at least one coordinate".into()));
        }
        let cf = c.to_f64();
        if !(cf >= 0.0) || !cf.is_finite() {
            return Err(Error::InvalidParameter(format!("c must be nonnegative, got {c}")));
        }
        for t in &terms {
            if let Term::Power { alpha } = t {
                if !(*alpha >= 0.0) || !alpha.is_finite() {
                    return Err(Error::InvalidParameter(format!("exponents must be nonnegative, got {alpha}")));
                }
            }
        }
        Ok(MixedPowerTransform { c, terms })
    }

    /// c · t^α in one variable.
    pub fn power(c: Scalar, alpha: f64) -> Result<Self> {
        Self::new(c, vec![Term::Power { alpha }])
    }

    /// ∏ t_j^{α_j} with c = 1.
    pub fn powers(alphas: &[f64]) -> Result<Self> {
        Self::new(Scalar::int(1), alphas.iter().map(|&alpha| Term::Power { alpha }).collect())
    }

    pub fn arity(&self) -> usize {
        self.terms.len()
    }

    pub fn c(&self) -> &Scalar {
        &self.c
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Same function with coordinates reordered: new term i is old term perm[i].
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Self::new(self.c.clone(), perm.iter().map(|&i| self.terms[i]).collect())
    }

    fn exact_capable(&self) -> bool {
        self.c.is_exact() && self.terms.iter().all(|t| matches!(t, Term::Heaviside) || t.integer_power().is_some())
    }

    fn eval_exact(&self, t: &[&BigRational]) -> BigRational {
        let mut v = self.c.as_exact().expect("exact c").clone();
        for (term, x) in self.terms.iter().zip(t) {
            match term {
                Term::Heaviside => {
                    if !x.is_positive() {
                        return BigRational::zero();
                    }
                }
                Term::Power { .. } => {
                    let e = term.integer_power().expect("integral exponent");
                    v *= if e == 0 { BigRational::one() } else { pow_rational(x, e) };
                }
            }
        }
        v
    }

    pub fn eval_f64(&self, t: &[f64]) -> f64 {
        let mut v = self.c.to_f64();
        for (term, &x) in self.terms.iter().zip(t) {
            v *= match term {
                Term::Heaviside => {
                    if x > 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                // powf(0, 0) = 1 and powf(0, α>0) = 0, matching the convention.
                Term::Power { alpha } => x.powf(*alpha),
            };
        }
        v
    }

    /// F at one point; exact when c, the inputs and all exponents allow it.
    pub fn eval(&self, t: &[Scalar]) -> Result<Scalar> {
        if t.len() != self.arity() {
            return Err(Error::InvalidParameter(format!("expected {} arguments, got {}", self.arity(), t.len())));
        }
        if self.exact_capable() && t.iter().all(Scalar::is_exact) {
            let xs: Vec<&BigRational> = t.iter().map(|s| s.as_exact().unwrap()).collect();
            Ok(Scalar::Exact(self.eval_exact(&xs)))
        } else {
            let xs: Vec<f64> = t.iter().map(Scalar::to_f64).collect();
            Ok(Scalar::Float(self.eval_f64(&xs)))
        }
    }
}

/// Entrywise F(K_1, ..., K_p).
///
/// Exact when every input is exact, c is exact and every exponent is an
/// integer; float otherwise. Grid points are taken from the first input.
pub fn apply(f: &MixedPowerTransform, ms: &[&Matrix]) -> Result<Matrix> {
    if ms.len() != f.arity() {
        return Err(Error::InvalidParameter(format!(
            "transform has arity {} but {} matrices were given",
            f.arity(),
            ms.len()
        )));
    }
    let shape = ms[0].shape();
    for m in ms {
        if m.shape() != shape {
            return Err(Error::ShapeMismatch {
                expected: shape,
                found: m.shape(),
            });
        }
        if let Some((row, col, value)) = m.first_negative() {
            return Err(Error::NegativeEntry { row, col, value });
        }
    }
    let (r, c) = shape;
    let exact = f.exact_capable() && ms.iter().all(|m| m.is_exact());
    let out = if exact {
        let data: Vec<&[BigRational]> = ms.iter().map(|m| m.exact_data().unwrap()).collect();
        let vals = (0..r * c)
            .map(|k| f.eval_exact(&data.iter().map(|d| &d[k]).collect::<Vec<_>>()))
            .collect();
        Matrix::from_exact(r, c, vals)?
    } else {
        let data: Vec<Vec<f64>> = ms.iter().map(|m| m.to_f64_vec()).collect();
        let vals = (0..r * c)
            .map(|k| f.eval_f64(&data.iter().map(|d| d[k]).collect::<Vec<_>>()))
            .collect();
        Matrix::from_float(r, c, vals)?
    };
    out.with_points(ms[0].row_points().cloned(), ms[0].col_points().cloned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{det_exact, det_float, minor, MinorSelector, Tolerance};

    fn root2() -> Matrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Matrix::from_float_rows(&[[1.0, s, 0.0], [s, 1.0, s], [0.0, s, 1.0]]).unwrap()
    }

    #[test]
    fn conventions_at_zero() {
        let f = MixedPowerTransform::new(Scalar::int(1), vec![Term::Power { alpha: 0.0 }, Term::Heaviside]).unwrap();
        assert_eq!(f.eval(&[Scalar::int(0), Scalar::int(3)]).unwrap(), Scalar::int(1));
        assert_eq!(f.eval(&[Scalar::int(2), Scalar::int(0)]).unwrap(), Scalar::int(0));
        let g = MixedPowerTransform::power(Scalar::int(1), 0.5).unwrap();
        assert_eq!(g.eval(&[Scalar::int(0)]).unwrap(), Scalar::Float(0.0));
        assert_eq!(f.eval_f64(&[0.0, 1.0]), 1.0);
    }

    #[test]
    fn homothety() {
        let m = Matrix::from_int_rows(&[[1, 2], [3, 4]]).unwrap();
        let f = MixedPowerTransform::power(Scalar::int(3), 1.0).unwrap();
        assert_eq!(apply(&f, &[&m]).unwrap(), Matrix::from_int_rows(&[[3, 6], [9, 12]]).unwrap());
    }

    #[test]
    fn sqrt_two_power() {
        let f = MixedPowerTransform::power(Scalar::int(1), 0.5).unwrap();
        let out = apply(&f, &[&root2()]).unwrap();
        let (v, _) = det_float(&out, &Tolerance::default()).unwrap();
        assert!((v - (1.0 - 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn symmetric_pair_minor() {
        let k1 = Matrix::from_int_rows(&[[2, 2, 1, 1], [2, 2, 1, 1], [1, 1, 2, 2], [1, 1, 2, 2]]).unwrap();
        let k2 = Matrix::from_int_rows(&[[2, 1, 1, 0], [1, 2, 2, 1], [1, 2, 2, 1], [0, 1, 1, 2]]).unwrap();
        let f = MixedPowerTransform::powers(&[1.0, 1.0]).unwrap();
        let out = apply(&f, &[&k1, &k2]).unwrap();
        let sel = MinorSelector::new(vec![0, 1, 2], vec![1, 2, 3]).unwrap();
        assert_eq!(minor(&out, &sel).unwrap(), Scalar::int(-6));
        assert!(out.is_exact());
        assert!(det_exact(&out).is_ok());
    }

    #[test]
    fn errors() {
        let f = MixedPowerTransform::powers(&[1.0, 1.0]).unwrap();
        let a = Matrix::identity(2).unwrap();
        let b = Matrix::identity(3).unwrap();
        assert!(matches!(apply(&f, &[&a, &b]), Err(Error::ShapeMismatch { .. })));
        assert!(apply(&f, &[&a]).is_err());
        let neg = Matrix::from_int_rows(&[[1, -1], [0, 1]]).unwrap();
        assert!(matches!(apply(&f, &[&a, &neg]), Err(Error::NegativeEntry { .. })));
        assert!(MixedPowerTransform::power(Scalar::int(-1), 1.0).is_err());
        assert!(MixedPowerTransform::power(Scalar::int(1), -0.5).is_err());
        assert!(serde_json::from_str::<MixedPowerTransform>(r#"{"c":1,"terms":[{"kind":"power","alpha":-1}]}"#).is_err());
    }

    #[test]
    fn json_format() {
        let f: MixedPowerTransform =
            serde_json::from_str(r#"{"c":2,"terms":[{"kind":"power","alpha":1.5},{"kind":"heaviside"}]}"#).unwrap();
        assert_eq!(f.arity(), 2);
        assert_eq!(f.terms()[1], Term::Heaviside);
        let back: MixedPowerTransform = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }
}
