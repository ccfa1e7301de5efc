use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::matrix::{Entries, Matrix, MinorSelector};
use super::scalar::{Scalar, Sign, Tolerance};
use crate::error::{Error, Result};

fn require_square(m: &Matrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(m.rows())
}

/// Exact determinant by fraction-free (Bareiss) elimination.
///
/// Each row is first scaled by the lcm of its denominators so the
/// elimination runs over integers.
pub fn det_exact(m: &Matrix) -> Result<BigRational> {
    let n = require_square(m)?;
    let data = m.exact_data().ok_or(Error::NotExact)?;
    let mut scale = BigInt::one();
    let mut a: Vec<BigInt> = Vec::with_capacity(n * n);
    for i in 0..n {
        let row = &data[i * n..(i + 1) * n];
        let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        for q in row {
            a.push(q.numer() * (&l / q.denom()));
        }
        scale *= l;
    }
    Ok(BigRational::new(bareiss(&mut a, n), scale))
}

pub(crate) fn bareiss(a: &mut [BigInt], n: usize) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&i| !a[i * n + k].is_zero()) {
                Some(p) => {
                    for j in 0..n {
                        a.swap(k * n + j, p * n + j);
                    }
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        let pivot = a[k * n + k].clone();
        for i in k + 1..n {
            let lead = a[i * n + k].clone();
            for j in k + 1..n {
                let v = &a[i * n + j] * &pivot - &lead * &a[k * n + j];
                // Sylvester's identity makes this division exact.
                a[i * n + j] = v / &prev;
            }
            a[i * n + k] = BigInt::zero();
        }
        prev = pivot;
    }
    let d = a[n * n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Determinant by LU with partial pivoting, plus its sign under `tol`.
///
/// The relative threshold uses the column-scaled Hadamard bound as magnitude.
pub fn det_float(m: &Matrix, tol: &Tolerance) -> Result<(f64, Sign)> {
    let n = require_square(m)?;
    let mut a = m.to_f64_vec();
    if let Some(x) = a.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(*x));
    }
    let det = lu_det(&mut a, n);
    if !det.is_finite() {
        return Err(Error::NonFinite(det));
    }
    Ok((det, tol.sign(det, m.hadamard_bound())))
}

pub(crate) fn lu_det(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
            .unwrap_or(k);
        if a[p * n + k] == 0.0 {
            return 0.0;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            if f != 0.0 {
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
    }
    det
}

/// Determinant of a square matrix in its own arithmetic.
pub fn det(m: &Matrix) -> Result<Scalar> {
    match m.entries() {
        Entries::Exact(_) => det_exact(m).map(Scalar::Exact),
        Entries::Float(_) => {
            let n = require_square(m)?;
            let mut a = m.to_f64_vec();
            Ok(Scalar::Float(lu_det(&mut a, n)))
        }
    }
}

/// Value of one minor of `m`.
pub fn minor(m: &Matrix, sel: &MinorSelector) -> Result<Scalar> {
    det(&m.submatrix(sel)?)
}

/// Sign of one minor: exact for rational matrices, tolerance-guarded otherwise.
pub fn minor_sign(m: &Matrix, sel: &MinorSelector, tol: &Tolerance) -> Result<(Scalar, Sign)> {
    let sub = m.submatrix(sel)?;
    if m.is_exact() {
        let d = det_exact(&sub)?;
        let s = Sign::of_ordering(d.cmp(&BigRational::zero()));
        Ok((Scalar::Exact(d), s))
    } else {
        let (v, s) = det_float(&sub, tol)?;
        Ok((Scalar::Float(v), s))
    }
}

/// Permanent of |entries|, used to bound how far rounding in the entries can
/// move a determinant.
pub fn abs_permanent(m: &Matrix) -> Result<f64> {
    let n = require_square(m)?;
    let a: Vec<f64> = m.to_f64_vec().iter().map(|x| x.abs()).collect();
    // Ryser's formula; n stays small here.
    let mut total = 0.0;
    for subset in 1u32..(1u32 << n) {
        let mut prod = 1.0;
        for i in 0..n {
            let s: f64 = (0..n).filter(|&j| subset & (1 << j) != 0).map(|j| a[i * n + j]).sum();
            prod *= s;
        }
        let sign = if (n as u32 - subset.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * prod;
    }
    Ok(total.abs())
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::scalar::rat;

    fn cofactor(a: &[BigRational], n: usize) -> BigRational {
        if n == 1 {
            return a[0].clone();
        }
        let mut total = BigRational::zero();
        for j in 0..n {
            let minor: Vec<BigRational> = (1..n)
                .flat_map(|i| (0..n).filter(move |&c| c != j).map(move |c| (i, c)))
                .map(|(i, c)| a[i * n + c].clone())
                .collect();
            let term = &a[j] * cofactor(&minor, n - 1);
            if j % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    #[test]
    fn zero_one_matrix_has_det_minus_one() {
        let m = Matrix::from_int_rows(&[[1, 1, 0], [1, 1, 1], [0, 1, 1]]).unwrap();
        assert_eq!(det_exact(&m).unwrap(), rat(-1, 1));
    }

    #[test]
    fn identity_and_block_matrix() {
        assert_eq!(det_exact(&Matrix::identity(3).unwrap()).unwrap(), rat(1, 1));
        let k1 = Matrix::from_int_rows(&[[2, 2, 1, 1], [2, 2, 1, 1], [1, 1, 2, 2], [1, 1, 2, 2]]).unwrap();
        assert!(det_exact(&k1).unwrap().is_zero());
    }

    #[test]
    fn rational_entries_and_pivoting() {
        let m = Matrix::from_rational_rows(vec![
            vec![rat(0, 1), rat(1, 2), rat(1, 3)],
            vec![rat(2, 3), rat(0, 1), rat(1, 1)],
            vec![rat(1, 5), rat(3, 4), rat(0, 1)],
        ])
        .unwrap();
        assert_eq!(det_exact(&m).unwrap(), cofactor(m.exact_data().unwrap(), 3));
    }

    #[test]
    fn non_square_rejected() {
        let m = Matrix::from_int_rows(&[[1, 2]]).unwrap();
        assert!(matches!(det_exact(&m), Err(Error::NotSquare { .. })));
        assert!(det_float(&m.to_float(), &Tolerance::default()).is_err());
    }

    #[test]
    fn float_examples() {
        let tol = Tolerance::default();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let root2 = |a: f64| {
            Matrix::from_float_rows(&[[1.0, s.powf(a), 0.0], [s.powf(a), 1.0, s.powf(a)], [0.0, s.powf(a), 1.0]]).unwrap()
        };
        let (v, sign) = det_float(&root2(1.0), &tol).unwrap();
        assert!(v.abs() < 1e-12);
        assert_eq!(sign, Sign::Zero);
        let (v, sign) = det_float(&root2(0.5), &tol).unwrap();
        assert!((v - (1.0 - 2f64.sqrt())).abs() < 1e-12);
        assert_eq!(sign, Sign::Neg);
        let (v, sign) = det_float(&Matrix::from_float_rows(&[[5.0]]).unwrap(), &tol).unwrap();
        assert_eq!((v, sign), (5.0, Sign::Pos));
    }

    #[test]
    fn bareiss_matches_cofactor_on_random_integers() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let data: Vec<BigRational> = (0..16).map(|_| rat(rng.gen_range(-9..=9), 1)).collect();
            let m = Matrix::from_exact(4, 4, data.clone()).unwrap();
            assert_eq!(det_exact(&m).unwrap(), cofactor(&data, 4));
        }
    }

    #[test]
    fn permanent_of_ones() {
        let m = Matrix::from_float_rows(&[[1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]]).unwrap();
        assert!((abs_permanent(&m).unwrap() - 6.0).abs() < 1e-12);
    }
}
