//! Symmetric TN completion of 2×2 TN matrices.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{det_exact, Matrix, MinorSelector, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Rows (0,1) × columns (1,2).
    TopRight,
    /// Rows (1,2) × columns (0,1).
    BottomLeft,
    /// Rows (0,1) × columns (0,1), used for the zero-padded diagonal case.
    TopLeft,
}

impl Placement {
    pub fn selector(&self) -> MinorSelector {
        let (r, c) = match self {
            Placement::TopRight => (vec![0, 1], vec![1, 2]),
            Placement::BottomLeft => (vec![1, 2], vec![0, 1]),
            Placement::TopLeft => (vec![0, 1], vec![0, 1]),
        };
        MinorSelector { rows: r, cols: c }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletionResult {
    pub output: Matrix,
    /// The free corner entry.
    pub star: Scalar,
    /// Whether the input was completed through its transpose.
    pub transposed: bool,
    pub placement: Placement,
}

/// The lower bounds on the corner entry of
/// [[∗, a, b], [a, c, d], [b, d, (d²+1)/c]] that make every minor TN.
///
/// Requires c > 0. Bound (a) is absent when d = 0.
pub fn corner_bounds(a: &BigRational, b: &BigRational, c: &BigRational, d: &BigRational) -> [Option<BigRational>; 5] {
    let one = BigRational::one();
    let dd1 = d * d + &one;
    [
        if d.is_zero() { None } else { Some(a * b / d) },
        Some(BigRational::zero()),
        Some(a * a / c),
        Some(b * b * c / &dd1),
        Some(-(BigRational::from_integer(2.into())) * a * b * d + b * b * c + a * a * &dd1 / c),
    ]
}

/// Whether `star` satisfies every active bound.
pub fn bounds_satisfied(bounds: &[Option<BigRational>; 5], star: &BigRational) -> bool {
    bounds.iter().flatten().all(|b| star >= b)
}

fn complete_c_positive(a: &BigRational, b: &BigRational, c: &BigRational, d: &BigRational) -> (Vec<BigRational>, BigRational) {
    let bounds = corner_bounds(a, b, c, d);
    let star = bounds.iter().flatten().max().cloned().expect("bound (b) is always active");
    let corner = (d * d + BigRational::one()) / c;
    let out = vec![
        star.clone(),
        a.clone(),
        b.clone(),
        a.clone(),
        c.clone(),
        d.clone(),
        b.clone(),
        d.clone(),
        corner,
    ];
    (out, star)
}

/// Embeds a TN 2×2 matrix [[a,b],[c,d]] into a symmetric TN 3×3 matrix.
///
/// The corner entry is the maximum of its lower bounds, the smallest value
/// that works. Float inputs are read as their exact binary values.
pub fn stn_complete(m: &Matrix) -> Result<CompletionResult> {
    if m.shape() != (2, 2) {
        return Err(Error::ShapeMismatch {
            expected: (2, 2),
            found: m.shape(),
        });
    }
    let m = m.to_exact()?;
    let v = m.exact_data().unwrap();
    let (a, b, c, d) = (&v[0], &v[1], &v[2], &v[3]);
    if let Some(x) = v.iter().find(|x| *x < &BigRational::zero()) {
        return Err(Error::NotTotallyNonnegative(format!("negative entry {x}")));
    }
    let det = det_exact(&m)?;
    if det < BigRational::zero() {
        return Err(Error::NotTotallyNonnegative(format!("determinant {det} is negative")));
    }
    let zero = BigRational::zero();
    let (data, star, transposed, placement) = if !c.is_zero() {
        let (data, star) = complete_c_positive(a, b, c, d);
        (data, star, false, Placement::TopRight)
    } else if !b.is_zero() {
        // Complete the transpose [[a,c],[b,d]]; A then sits bottom-left.
        let (data, star) = complete_c_positive(a, c, b, d);
        (data, star, true, Placement::BottomLeft)
    } else {
        let data = vec![
            a.clone(),
            zero.clone(),
            zero.clone(),
            zero.clone(),
            d.clone(),
            zero.clone(),
            zero.clone(),
            zero.clone(),
            zero.clone(),
        ];
        (data, zero, false, Placement::TopLeft)
    };
    Ok(CompletionResult {
        output: Matrix::from_exact(3, 3, data)?,
        star: Scalar::Exact(star),
        transposed,
        placement,
    })
}
