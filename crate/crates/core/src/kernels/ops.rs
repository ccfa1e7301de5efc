use num_rational::BigRational;
use num_traits::{One, Zero};

use super::pf::{gaussian, PfFunction};
use super::piecewise::PiecewiseLinearMap;
use super::spec::KernelSpec;
use crate::error::{Error, Result};
use crate::linalg::{Entries, Matrix, OrderedPoints};

fn check_placement(map: &[usize], inner: usize, outer: usize, axis: &str) -> Result<()> {
    let ok = map.len() == inner && map.windows(2).all(|w| w[0] < w[1]) && map.last().is_some_and(|&i| i < outer);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{axis} placement {map:?} is not an order-preserving embedding of {inner} into {outer}"
        )))
    }
}

/// Embeds `inner` into an |X|×|Y| matrix at the given row and column
/// positions, filling everything else with `pad_value` (0 or 1).
pub fn pad(
    inner: &Matrix,
    xs: &OrderedPoints,
    ys: &OrderedPoints,
    row_map: &[usize],
    col_map: &[usize],
    pad_value: u8,
) -> Result<Matrix> {
    if pad_value > 1 {
        return Err(Error::InvalidParameter(format!("pad_value must be 0 or 1, got {pad_value}")));
    }
    let (r, c) = (xs.len(), ys.len());
    check_placement(row_map, inner.rows(), r, "row")?;
    check_placement(col_map, inner.cols(), c, "column")?;
    let mut slot = vec![None; r * c];
    for (a, &i) in row_map.iter().enumerate() {
        for (b, &j) in col_map.iter().enumerate() {
            slot[i * c + j] = Some((a, b));
        }
    }
    let entries = match inner.entries() {
        Entries::Exact(_) => {
            let fill = if pad_value == 1 { BigRational::one() } else { BigRational::zero() };
            let data = slot
                .iter()
                .map(|s| s.map_or_else(|| fill.clone(), |(a, b)| inner.get(a, b).to_exact().expect("exact entry")))
                .collect();
            Matrix::from_exact(r, c, data)?
        }
        Entries::Float(_) => {
            let data = slot
                .iter()
                .map(|s| s.map_or(pad_value as f64, |(a, b)| inner.get_f64(a, b)))
                .collect();
            Matrix::from_float(r, c, data)?
        }
    };
    entries.with_points(Some(xs.clone()), Some(ys.clone()))
}

/// Places `inner` centered in an n×m zero matrix (offsets rounded down).
pub fn centered_placement(inner: usize, outer: usize) -> Vec<usize> {
    let off = (outer - inner) / 2;
    (off..off + inner).collect()
}

/// Kernel equal to a_ij on the ε-box around (x_anchors[i], y_anchors[j]) and
/// zero elsewhere.
pub fn inflate(a: &Matrix, x_anchors: &[f64], y_anchors: &[f64], eps: f64) -> Result<KernelSpec> {
    let spec = KernelSpec::Inflation {
        matrix: a.clone(),
        x_anchors: x_anchors.to_vec(),
        y_anchors: y_anchors.to_vec(),
        eps,
    };
    spec.validate()?;
    Ok(spec)
}

/// Entry (i,j) = Λ(φ_X(x_i) - φ_Y(y_j)); with `reflect`, Λ(φ_Y(y_j) - φ_X(x_i)).
pub fn toeplitz_sample(
    pf: &dyn PfFunction,
    phi_x: &PiecewiseLinearMap,
    phi_y: &PiecewiseLinearMap,
    xs: &OrderedPoints,
    ys: &OrderedPoints,
    reflect: bool,
) -> Result<Matrix> {
    let u: Vec<f64> = xs.to_f64_vec().iter().map(|&x| phi_x.eval(x)).collect();
    let v: Vec<f64> = ys.to_f64_vec().iter().map(|&y| phi_y.eval(y)).collect();
    let data = u
        .iter()
        .flat_map(|&a| v.iter().map(move |&b| if reflect { b - a } else { a - b }))
        .map(|d| pf.eval(d))
        .collect();
    Matrix::from_float(u.len(), v.len(), data)?.with_points(Some(xs.clone()), Some(ys.clone()))
}

fn gaussian_weights(points: &[f64], variance: f64) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|&p| {
            let row: Vec<f64> = points.iter().map(|&q| gaussian(p - q, variance)).collect();
            let mass: f64 = row.iter().sum();
            row.into_iter().map(|w| w / mass).collect()
        })
        .collect()
}

/// Discrete Gaussian smoothing G M Hᵀ on the matrix's own grids, with each
/// row of G and H normalized to unit mass so constants are fixed.
pub fn whitney_smooth_kernel(m: &Matrix, variance: f64) -> Result<Matrix> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::InvalidParameter(format!("variance must be positive, got {variance}")));
    }
    let (xs, ys) = match (m.row_points(), m.col_points()) {
        (Some(x), Some(y)) => (x.clone(), y.clone()),
        _ => return Err(Error::MissingGrid),
    };
    let g = gaussian_weights(&xs.to_f64_vec(), variance);
    let h = gaussian_weights(&ys.to_f64_vec(), variance);
    let (r, c) = m.shape();
    let a = m.to_f64_vec();
    // tmp = M Hᵀ
    let mut tmp = vec![0.0; r * c];
    for k in 0..r {
        for j in 0..c {
            tmp[k * c + j] = (0..c).map(|l| a[k * c + l] * h[j][l]).sum();
        }
    }
    let entry = |i: usize, j: usize| (0..r).map(|k| g[i][k] * tmp[k * c + j]).sum::<f64>();
    let symmetric = m.is_symmetric() && xs == ys;
    let mut out = vec![0.0; r * c];
    for i in 0..r {
        for j in 0..c {
            out[i * c + j] = if symmetric && j < i { out[j * c + i] } else { entry(i, j) };
        }
    }
    Matrix::from_float(r, c, out)?.with_points(Some(xs), Some(ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::pf::{gaussian_smooth_pf, PfSpec};
    use crate::kernels::piecewise::piecewise_linear;
    use crate::kernels::spec::sample_kernel;
    use crate::linalg::{tn_order, tp_order, Scalar, Tolerance};
    use approx::assert_abs_diff_eq;

    fn ints(v: &[i64]) -> OrderedPoints {
        OrderedPoints::integers(v).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn efjs() -> Matrix {
        Matrix::from_int_rows(&[[1, 1, 0], [1, 1, 1], [0, 1, 1]]).unwrap()
    }

    #[test]
    fn pad_single_one_center() {
        let g = ints(&[1, 2, 3]);
        let m = pad(&Matrix::identity(1).unwrap(), &g, &g, &[1], &[1], 0).unwrap();
        assert_eq!(m.get(1, 1), Scalar::int(1));
        assert_eq!(m.get(0, 0), Scalar::int(0));
        assert!(tn_order(&m, None, &tol()).unwrap().full);
    }

    #[test]
    fn pad_by_ones_has_tp_order_one() {
        let g = ints(&[1, 2, 3, 4]);
        let inner = Matrix::from_int_rows(&[[1, 2], [2, 1]]).unwrap();
        let m = pad(&inner, &g, &g, &[0, 1], &[0, 1], 1).unwrap();
        assert_eq!(m.get(2, 3), Scalar::int(1));
        assert_eq!(tp_order(&m, None, &tol()).unwrap().order, 1);
    }

    #[test]
    fn pad_keeps_zero_one_order() {
        let g = ints(&[1, 2, 3, 4, 5]);
        let m = pad(&efjs(), &g, &g, &[1, 2, 3], &[1, 2, 3], 0).unwrap();
        assert_eq!(tn_order(&m, None, &tol()).unwrap().order, 2);
    }

    #[test]
    fn pad_rejects_bad_placement() {
        let g = ints(&[1, 2, 3]);
        assert!(pad(&efjs(), &g, &g, &[0, 2, 1], &[0, 1, 2], 0).is_err());
        assert!(pad(&efjs(), &g, &g, &[0, 1, 3], &[0, 1, 2], 0).is_err());
        assert!(pad(&efjs(), &g, &g, &[0, 1, 2], &[0, 1, 2], 2).is_err());
    }

    #[test]
    fn inflation_examples() {
        let spec = inflate(&Matrix::identity(2).unwrap(), &[1.0, 2.0], &[1.0, 2.0], 0.25).unwrap();
        let g = ints(&[1, 2]);
        let m = sample_kernel(&spec, &g, &g).unwrap();
        assert_eq!(m.exact_data().unwrap(), Matrix::identity(2).unwrap().exact_data().unwrap());
        let x = OrderedPoints::float(vec![0.5, 1.0, 2.0]).unwrap();
        let m = sample_kernel(&spec, &x, &g).unwrap();
        assert_eq!(m.to_f64_vec(), vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        assert!(inflate(&Matrix::identity(2).unwrap(), &[1.0, 2.0], &[1.0, 2.0], 0.5).is_err());
        assert!(inflate(&Matrix::identity(2).unwrap(), &[2.0, 1.0], &[1.0, 2.0], 0.1).is_err());
    }

    #[test]
    fn toeplitz_examples() {
        let id = PiecewiseLinearMap::identity();
        let m = toeplitz_sample(&PfSpec::Omega, &id, &id, &ints(&[1, 2, 3]), &ints(&[0, 1, 2]), false).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(m.get_f64(i, i), (-1.0f64).exp(), epsilon = 1e-15);
        }
        let g = ints(&[0, 1]);
        let m = toeplitz_sample(&PfSpec::OneSidedExp { a: 1.0, delta: 0.0 }, &id, &id, &g, &g, false).unwrap();
        assert_eq!(m.to_f64_vec(), vec![0.5, 0.0, (-1.0f64).exp(), 0.5]);
        let x = OrderedPoints::float(vec![-0.7, 0.1, 1.3, 2.0]).unwrap();
        let m = toeplitz_sample(&PfSpec::Gaussian { variance: 1.0 }, &id, &id, &x, &x, false).unwrap();
        assert!(m.is_symmetric());
    }

    #[test]
    fn reflection_mirrors() {
        let id = PiecewiseLinearMap::identity();
        let g = ints(&[0, 1]);
        let pf = PfSpec::OneSidedExp { a: 1.0, delta: 0.0 };
        let m = toeplitz_sample(&pf, &id, &id, &g, &g, true).unwrap();
        assert_eq!(m.to_f64_vec(), vec![0.5, (-1.0f64).exp(), 0.0, 0.5]);
    }

    #[test]
    fn smoothed_omega_is_tp3() {
        let s = gaussian_smooth_pf(&PfSpec::Omega, 0.1).unwrap();
        let id = PiecewiseLinearMap::identity();
        let g = OrderedPoints::float(vec![0.0, 0.5, 1.0]).unwrap();
        let m = toeplitz_sample(&s, &id, &id, &g, &g, false).unwrap();
        assert_eq!(tp_order(&m, None, &tol()).unwrap().order, 3);
    }

    #[test]
    fn reparametrized_toeplitz() {
        let phi = piecewise_linear(&[1.0, 2.0, 3.0], &[0.5, 1.5, 2.5]).unwrap();
        let id = PiecewiseLinearMap::identity();
        let m = toeplitz_sample(&PfSpec::Omega, &phi, &id, &ints(&[2]), &ints(&[0]), false).unwrap();
        assert_abs_diff_eq!(m.get_f64(0, 0), 1.5 * (-1.5f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn whitney_constant_and_symmetry() {
        let g = ints(&[1, 2, 3]);
        let ones = sample_kernel(&KernelSpec::Constant { c: Scalar::int(1) }, &g, &g).unwrap();
        let s = whitney_smooth_kernel(&ones, 0.3).unwrap();
        for v in s.to_f64_vec() {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-14);
        }
        assert_eq!(tp_order(&s, None, &tol()).unwrap().order, 1);
        let jain = sample_kernel(&KernelSpec::Jain, &g, &g).unwrap();
        let s = whitney_smooth_kernel(&jain, 0.2).unwrap();
        assert!(s.is_symmetric());
        assert!(whitney_smooth_kernel(&Matrix::identity(2).unwrap(), 0.1).is_err());
        assert!(whitney_smooth_kernel(&ones, 0.0).is_err());
    }

    #[test]
    fn whitney_on_padded_zero_one() {
        let g = OrderedPoints::float(vec![0.5, 1.0, 1.5, 2.0, 2.5]).unwrap();
        let m = pad(&efjs(), &g, &g, &[1, 2, 3], &[1, 2, 3], 0).unwrap();
        let s = whitney_smooth_kernel(&m, 0.05).unwrap();
        assert!(tn_order(&s, None, &tol()).unwrap().order >= 2);
        assert!(tp_order(&s, Some(2), &tol()).unwrap().order == 2);
    }
}
