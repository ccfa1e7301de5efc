use serde::{Deserialize, Serialize};

use super::det::minor_sign;
use super::matrix::{Matrix, MinorSelector};
use super::minors::{enumerate_minors, MinorMode};
use super::scalar::{Scalar, Sign, Tolerance};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(flatten)]
    pub selector: MinorSelector,
    pub det: Scalar,
}

/// Result of an order computation.
///
/// `order` is 0 when some entry already fails the 1×1 test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub order: usize,
    /// True when `order` equals min(rows, cols).
    pub full: bool,
    pub checked_up_to: usize,
    pub witness: Option<Witness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Test {
    Nonnegative,
    Positive,
}

impl Test {
    fn violated(self, s: Sign) -> bool {
        match self {
            Test::Nonnegative => s == Sign::Neg,
            Test::Positive => s != Sign::Pos,
        }
    }
}

fn limit(m: &Matrix, k_max: Option<usize>) -> Result<usize> {
    if k_max == Some(0) {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    let n = m.rows().min(m.cols());
    Ok(k_max.map_or(n, |k| k.min(n)))
}

fn first_violation(m: &Matrix, r: usize, mode: MinorMode, test: Test, tol: &Tolerance) -> Result<Option<Witness>> {
    for sel in enumerate_minors(m, r, mode)? {
        let (det, sign) = minor_sign(m, &sel, tol)?;
        if test.violated(sign) {
            return Ok(Some(Witness { selector: sel, det }));
        }
    }
    Ok(None)
}

fn brute_order(m: &Matrix, k_max: Option<usize>, test: Test, tol: &Tolerance) -> Result<OrderReport> {
    let lim = limit(m, k_max)?;
    for r in 1..=lim {
        if let Some(w) = first_violation(m, r, MinorMode::All, test, tol)? {
            return Ok(OrderReport {
                order: r - 1,
                full: false,
                checked_up_to: lim,
                witness: Some(w),
            });
        }
    }
    Ok(OrderReport {
        order: lim,
        full: lim == m.rows().min(m.cols()),
        checked_up_to: lim,
        witness: None,
    })
}

/// Largest k ≤ k_max with every minor of size ≤ k nonnegative.
///
/// `k_max = None` means unbounded. The witness is the lexicographically first
/// minor of size `order + 1` with negative determinant.
pub fn tn_order(m: &Matrix, k_max: Option<usize>, tol: &Tolerance) -> Result<OrderReport> {
    brute_order(m, k_max, Test::Nonnegative, tol)
}

/// Largest k ≤ k_max with every minor of size ≤ k strictly positive.
///
/// For exact matrices and a full-order request, the contiguous minors are
/// tested first; if they are all positive the matrix is TP by Fekete's
/// criterion and no further minors are needed.
pub fn tp_order(m: &Matrix, k_max: Option<usize>, tol: &Tolerance) -> Result<OrderReport> {
    let lim = limit(m, k_max)?;
    let n = m.rows().min(m.cols());
    if m.is_exact() && lim == n && n > 2 && fekete_tp(m, tol)? {
        return Ok(OrderReport {
            order: n,
            full: true,
            checked_up_to: n,
            witness: None,
        });
    }
    brute_order(m, k_max, Test::Positive, tol)
}

/// TP order computed from every minor, never using the contiguous shortcut.
pub fn tp_order_brute(m: &Matrix, k_max: Option<usize>, tol: &Tolerance) -> Result<OrderReport> {
    brute_order(m, k_max, Test::Positive, tol)
}

/// Whether every contiguous minor of every size is strictly positive.
pub fn fekete_tp(m: &Matrix, tol: &Tolerance) -> Result<bool> {
    let n = m.rows().min(m.cols());
    for r in 1..=n {
        if first_violation(m, r, MinorMode::Contiguous, Test::Positive, tol)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::scalar::rat_int;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn zero_one_matrix() {
        let m = Matrix::from_int_rows(&[[1, 1, 0], [1, 1, 1], [0, 1, 1]]).unwrap();
        let r = tn_order(&m, Some(3), &tol()).unwrap();
        assert_eq!(r.order, 2);
        let w = r.witness.unwrap();
        assert_eq!(w.selector, MinorSelector::full(3));
        assert_eq!(w.det, Scalar::Exact(rat_int(-1)));
        // Sub-check: all nine 2×2 minors are 0 or 1.
        for sel in enumerate_minors(&m, 2, MinorMode::All).unwrap() {
            let (d, _) = minor_sign(&m, &sel, &tol()).unwrap();
            let d = d.as_exact().unwrap().clone();
            assert!(d == rat_int(0) || d == rat_int(1));
        }
    }

    #[test]
    fn one_two_two_one() {
        let m = Matrix::from_int_rows(&[[1, 2], [2, 1]]).unwrap();
        let r = tn_order(&m, Some(2), &tol()).unwrap();
        assert_eq!(r.order, 1);
        assert_eq!(r.witness.unwrap().det, Scalar::int(-3));
    }

    #[test]
    fn row_vector_is_full() {
        let m = Matrix::from_int_rows(&[[0, 3, 1, 2]]).unwrap();
        let r = tn_order(&m, None, &tol()).unwrap();
        assert!(r.full);
        assert_eq!(r.order, 1);
    }

    #[test]
    fn tp_examples() {
        let e = |v: f64| v.exp();
        let vdm = Matrix::from_float_rows(&[[e(1.0), e(2.0)], [e(2.0), e(4.0)]]).unwrap();
        assert_eq!(tp_order(&vdm, None, &tol()).unwrap().order, 2);
        let jain = Matrix::from_int_rows(&[[2, 3], [3, 5]]).unwrap();
        assert_eq!(tp_order(&jain, None, &tol()).unwrap().order, 2);
        let ones = Matrix::from_int_rows(&[[1, 1], [1, 1]]).unwrap();
        let r = tp_order(&ones, None, &tol()).unwrap();
        assert_eq!(r.order, 1);
        assert_eq!(r.witness.unwrap().det, Scalar::int(0));
        let id = Matrix::identity(2).unwrap();
        assert_eq!(tp_order(&id, None, &tol()).unwrap().order, 0);
    }

    #[test]
    fn negative_entry_gives_order_zero() {
        let m = Matrix::from_int_rows(&[[1, -1], [0, 1]]).unwrap();
        let r = tn_order(&m, None, &tol()).unwrap();
        assert_eq!(r.order, 0);
        assert_eq!(r.witness.unwrap().selector, MinorSelector::new(vec![0], vec![1]).unwrap());
    }

    #[test]
    fn k_max_zero_rejected() {
        let m = Matrix::identity(2).unwrap();
        assert!(tn_order(&m, Some(0), &tol()).is_err());
    }

    #[test]
    fn fekete_path_agrees_with_witness_search() {
        // Contiguous minors positive but the matrix is not TP is impossible; a
        // matrix failing only at a non-contiguous minor must still be caught.
        let m = Matrix::from_int_rows(&[[1, 1, 1], [1, 2, 4], [1, 3, 9]]).unwrap();
        assert_eq!(tp_order(&m, None, &tol()).unwrap(), tp_order_brute(&m, None, &tol()).unwrap());
        let bad = Matrix::from_int_rows(&[[1, 1, 0], [1, 2, 1], [1, 3, 2]]).unwrap();
        assert_eq!(tp_order(&bad, None, &tol()).unwrap(), tp_order_brute(&bad, None, &tol()).unwrap());
    }
}
