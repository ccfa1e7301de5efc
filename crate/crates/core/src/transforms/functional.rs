use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Tolerance;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalVerdict {
    pub holds: bool,
    /// Pairs actually tested.
    pub checked: usize,
    pub witness: Option<FunctionalWitness>,
}

fn value(f: &dyn Fn(&[f64]) -> f64, t: &[f64]) -> Result<f64> {
    let v = f(t);
    if !v.is_finite() || v < 0.0 {
        return Err(Error::Domain(format!("F({t:?}) = {v} is not a nonnegative finite value")));
    }
    Ok(v)
}

fn check_point(t: &[f64], p: usize) -> Result<()> {
    if t.len() != p {
        return Err(Error::Domain(format!("point {t:?} does not have {p} coordinates")));
    }
    if let Some(x) = t.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::Domain(format!("coordinate {x} is outside [0, inf)")));
    }
    Ok(())
}

/// Checks F(t)F(t') ≥ F(√(t t'))² on every sample pair.
///
/// Coordinates must lie in [0, ∞) and F must return nonnegative finite values.
pub fn check_mult_mid_convex(
    f: &dyn Fn(&[f64]) -> f64,
    samples: &[(Vec<f64>, Vec<f64>)],
    tol: &Tolerance,
) -> Result<FunctionalVerdict> {
    let mut checked = 0;
    for (x, y) in samples {
        check_point(x, x.len())?;
        check_point(y, x.len())?;
        let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a * b).sqrt()).collect();
        let lhs = value(f, x)? * value(f, y)?;
        let rhs = value(f, &mid)?.powi(2);
        checked += 1;
        if lhs < rhs - tol.threshold(lhs.max(rhs)) {
            return Ok(FunctionalVerdict {
                holds: false,
                checked,
                witness: Some(FunctionalWitness {
                    x: x.clone(),
                    y: y.clone(),
                    lhs,
                    rhs,
                }),
            });
        }
    }
    Ok(FunctionalVerdict {
        holds: true,
        checked,
        witness: None,
    })
}

/// Checks F(x) ≤ F(y) (or < when `strict`) for every pair with x_j < y_j in
/// all coordinates. Pairs ordered the other way are swapped; incomparable
/// pairs are skipped.
pub fn check_jointly_monotone(
    f: &dyn Fn(&[f64]) -> f64,
    samples: &[(Vec<f64>, Vec<f64>)],
    strict: bool,
) -> FunctionalVerdict {
    let mut checked = 0;
    for (a, b) in samples {
        let (x, y) = if a.iter().zip(b).all(|(u, v)| u < v) {
            (a, b)
        } else if a.iter().zip(b).all(|(u, v)| v < u) {
            (b, a)
        } else {
            continue;
        };
        checked += 1;
        let (fx, fy) = (f(x), f(y));
        let ok = if strict { fx < fy } else { fx <= fy };
        if !ok {
            return FunctionalVerdict {
                holds: false,
                checked,
                witness: Some(FunctionalWitness {
                    x: x.clone(),
                    y: y.clone(),
                    lhs: fx,
                    rhs: fy,
                }),
            };
        }
    }
    FunctionalVerdict {
        holds: true,
        checked,
        witness: None,
    }
}

/// Random point pairs in (lo, hi)^p, coordinates log-uniform.
pub fn random_pairs<R: Rng>(rng: &mut R, p: usize, count: usize, lo: f64, hi: f64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let (a, b) = (lo.ln(), hi.ln());
    let point = |rng: &mut R| (0..p).map(|_| rng.gen_range(a..b).exp()).collect::<Vec<f64>>();
    (0..count).map(|_| (point(rng), point(rng))).collect()
}

/// Random pairs with y > x in every coordinate.
pub fn random_ordered_pairs<R: Rng>(rng: &mut R, p: usize, count: usize, lo: f64, hi: f64) -> Vec<(Vec<f64>, Vec<f64>)> {
    random_pairs(rng, p, count, lo, hi)
        .into_iter()
        .map(|(x, y)| {
            let lo: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a.min(*b)).collect();
            let hi: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a.max(*b) * 1.01 + 1e-9).collect();
            (lo, hi)
        })
        .collect()
}

/// Sampled evidence for the |X| = 2 symmetric clauses, which characterize
/// preservers among arbitrary functions. Sampling can refute these
/// properties but never establish them, so `conclusive` is always false.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoPointEvidence {
    pub jointly_monotone: FunctionalVerdict,
    pub mid_convex: FunctionalVerdict,
    /// F is unchanged when an order-1 coordinate varies.
    pub independent_of_low_order: bool,
    /// Positive values on the sampled points (required for the TP variant).
    pub positive: bool,
    pub conclusive: bool,
}

impl TwoPointEvidence {
    pub fn refuted(&self, positive_mode: bool) -> bool {
        !self.jointly_monotone.holds
            || !self.mid_convex.holds
            || !self.independent_of_low_order
            || (positive_mode && !self.positive)
    }
}

/// Gathers the sampled functional properties of an arbitrary F against the
/// |X| = 2 symmetric clauses. `low_order` lists coordinates with k_j = 1.
/// In `positive_mode` (STP) strict monotonicity is required.
pub fn assess_two_point<R: Rng>(
    f: &dyn Fn(&[f64]) -> f64,
    p: usize,
    low_order: &[usize],
    positive_mode: bool,
    rng: &mut R,
    count: usize,
    tol: &Tolerance,
) -> Result<TwoPointEvidence> {
    let pairs = random_pairs(rng, p, count, 1e-3, 1e3);
    let ordered = random_ordered_pairs(rng, p, count, 1e-3, 1e3);
    let mid_convex = check_mult_mid_convex(f, &pairs, tol)?;
    let jointly_monotone = check_jointly_monotone(f, &ordered, positive_mode);
    let mut independent = true;
    let mut positive = true;
    for (x, y) in &pairs {
        let fx = f(x);
        positive &= fx > 0.0;
        for &j in low_order {
            let mut z = x.clone();
            z[j] = y[j];
            let fz = f(&z);
            if (fx - fz).abs() > tol.threshold(fx.abs().max(fz.abs())) {
                independent = false;
            }
        }
    }
    Ok(TwoPointEvidence {
        jointly_monotone,
        mid_convex,
        independent_of_low_order: independent,
        positive,
        conclusive: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(3)
    }

    #[test]
    fn powers_are_mid_affine() {
        let pairs = random_pairs(&mut rng(), 1, 1000, 1e-3, 1e3);
        let v = check_mult_mid_convex(&|t: &[f64]| t[0].powf(1.7), &pairs, &Tolerance::default()).unwrap();
        assert!(v.holds);
        assert_eq!(v.checked, 1000);
    }

    #[test]
    fn exp_is_mid_convex() {
        let pairs = random_pairs(&mut rng(), 1, 1000, 1e-3, 5.0);
        let v = check_mult_mid_convex(&|t: &[f64]| t[0].exp(), &pairs, &Tolerance::default()).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn domain_violation() {
        let pairs = vec![(vec![0.1], vec![0.2])];
        let r = check_mult_mid_convex(&|t: &[f64]| t[0] - 1.0, &pairs, &Tolerance::default());
        assert!(matches!(r, Err(Error::Domain(_))));
        let neg = vec![(vec![-0.1], vec![0.2])];
        assert!(check_mult_mid_convex(&|t: &[f64]| t[0], &neg, &Tolerance::default()).is_err());
    }

    #[test]
    fn additive_shift_fails_mid_convexity() {
        // 1 + t: (1+a)(1+b) ≥ (1+√ab)² holds, but t/(1+t) fails.
        let pairs = random_pairs(&mut rng(), 1, 200, 1e-2, 1e2);
        let v = check_mult_mid_convex(&|t: &[f64]| t[0] / (1.0 + t[0]), &pairs, &Tolerance::default()).unwrap();
        assert!(!v.holds);
        assert!(v.witness.is_some());
    }

    #[test]
    fn monotonicity() {
        let pairs = random_ordered_pairs(&mut rng(), 2, 1000, 1e-3, 1e3);
        let c = |_: &[f64]| 2.0;
        assert!(check_jointly_monotone(&c, &pairs, false).holds);
        let strict = check_jointly_monotone(&c, &pairs, true);
        assert!(!strict.holds);
        assert!(strict.witness.is_some());
        let f = |t: &[f64]| t[0].sqrt() * t[1];
        let v = check_jointly_monotone(&f, &pairs, true);
        assert!(v.holds);
        assert_eq!(v.checked, 1000);
    }

    #[test]
    fn two_point_evidence() {
        let tol = Tolerance::default();
        let e = assess_two_point(&|t: &[f64]| t[0] * t[1].powf(2.0), 2, &[], true, &mut rng(), 300, &tol).unwrap();
        assert!(!e.refuted(true));
        assert!(!e.conclusive);
        let e = assess_two_point(&|t: &[f64]| t[0] * t[1], 2, &[1], false, &mut rng(), 300, &tol).unwrap();
        assert!(e.refuted(false));
        let e = assess_two_point(&|t: &[f64]| 1.0 + t[0], 1, &[], false, &mut rng(), 300, &tol).unwrap();
        assert!(!e.refuted(false));
    }
}
