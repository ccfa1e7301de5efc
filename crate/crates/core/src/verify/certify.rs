//! Certifying that a minor is negative beyond doubt.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{
    abs_permanent, det_exact, det_float, enumerate_minors, rational_to_f64, Matrix, MinorMode, MinorSelector,
    Tolerance,
};

/// A certified witness must clear its threshold by this factor.
pub const REQUIRED_MARGIN: f64 = 10.0;

/// Unit roundoff of f64.
const U: f64 = f64::EPSILON / 2.0;

/// Two independent evaluations of one minor and how far it sits from zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Exact determinant of the stored entries, rounded for display.
    pub det: f64,
    /// LU determinant in f64.
    pub det_float: f64,
    /// How far rounding in the entries could have moved the determinant.
    pub envelope: f64,
    /// max(envelope, tolerance threshold).
    pub threshold: f64,
    /// |det| / threshold.
    pub margin: f64,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.det < 0.0 && self.det_float < 0.0 && self.margin >= REQUIRED_MARGIN
    }
}

/// Re-evaluates the minor exactly and in floating point.
///
/// Exact inputs have no rounding envelope. Float entries are taken as the
/// rationals they store; the envelope perm(|A|)((1+64u)^n - 1) covers a few
/// ulps of error in how each entry was computed.
pub fn certify(m: &Matrix, sel: &MinorSelector, tol: &Tolerance) -> Result<Certificate> {
    let sub = m.submatrix(sel)?;
    let n = sub.rows();
    let exact = det_exact(&sub.to_exact()?)?;
    let det = if exact.is_zero() { 0.0 } else { rational_to_f64(&exact) };
    let det = if det == 0.0 && !exact.is_zero() {
        // underflow; keep the sign
        if exact.is_negative() {
            -f64::MIN_POSITIVE
        } else {
            f64::MIN_POSITIVE
        }
    } else {
        det
    };
    let (det_float, _) = det_float(&sub.to_float(), tol)?;
    let envelope = if sub.is_exact() {
        0.0
    } else {
        abs_permanent(&sub)? * ((1.0 + 64.0 * U).powi(n as i32) - 1.0)
    };
    let threshold = envelope.max(tol.threshold(sub.hadamard_bound()));
    Ok(Certificate {
        det,
        det_float,
        envelope,
        threshold,
        margin: det.abs() / threshold,
    })
}

/// The first minor of size ≤ `max_order` (sizes ascending, then lexicographic)
/// that certifies as negative.
pub fn first_certified_negative(
    m: &Matrix,
    max_order: usize,
    tol: &Tolerance,
) -> Result<Option<(MinorSelector, Certificate)>> {
    let top = max_order.min(m.rows()).min(m.cols());
    let a = m.to_f64_vec();
    let c = m.cols();
    for r in 1..=top {
        for sel in enumerate_minors(m, r, MinorMode::All)? {
            // cheap float screen before the exact re-check
            let mut sub: Vec<f64> = sel
                .rows
                .iter()
                .flat_map(|&i| sel.cols.iter().map(move |&j| (i, j)))
                .map(|(i, j)| a[i * c + j])
                .collect();
            let h: f64 = (0..r)
                .map(|i| sub[i * r..(i + 1) * r].iter().map(|x| x * x).sum::<f64>().sqrt())
                .product();
            let d = crate::linalg::lu_det(&mut sub, r);
            if d < -tol.threshold(h) {
                let cert = certify(m, &sel, tol)?;
                if cert.holds() {
                    return Ok(Some((sel, cert)));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_zero_one() {
        let m = Matrix::from_int_rows(&[[1, 1, 0], [1, 1, 1], [0, 1, 1]]).unwrap();
        let (sel, cert) = first_certified_negative(&m, 3, &Tolerance::default()).unwrap().unwrap();
        assert_eq!(sel, MinorSelector::full(3));
        assert_eq!(cert.det, -1.0);
        assert_eq!(cert.envelope, 0.0);
        assert!(cert.holds());
    }

    #[test]
    fn rounding_noise_is_not_certified() {
        // singular up to rounding
        let t = 0.1f64;
        let m = Matrix::from_float_rows(&[[1.0, t], [3.0 * t, 3.0 * t * t]]).unwrap();
        let cert = certify(&m, &MinorSelector::full(2), &Tolerance::default()).unwrap();
        assert!(!cert.holds());
        assert!(first_certified_negative(&m, 2, &Tolerance::default()).unwrap().is_none());
    }

    #[test]
    fn float_witness() {
        let s = 0.5f64.sqrt().powf(0.5);
        let m = Matrix::from_float_rows(&[[1.0, s, 0.0], [s, 1.0, s], [0.0, s, 1.0]]).unwrap();
        let (_, cert) = first_certified_negative(&m, 3, &Tolerance::default()).unwrap().unwrap();
        assert!((cert.det - (1.0 - 2f64.powf(0.5))).abs() < 1e-12);
        assert!(cert.envelope > 0.0);
    }
}
