use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::scalar::{f64_to_rational, rat_int, rational_to_f64, Scalar};
use crate::error::{Error, Result};

/// Strictly increasing, nonempty tuple of grid points.
#[derive(Clone, Debug, PartialEq)]
pub enum OrderedPoints {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl OrderedPoints {
    pub fn exact(values: Vec<BigRational>) -> Result<Self> {
        if values.is_empty() || values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::PointsNotIncreasing);
        }
        Ok(OrderedPoints::Exact(values))
    }

    pub fn float(values: Vec<f64>) -> Result<Self> {
        if let Some(x) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite(*x));
        }
        if values.is_empty() || values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::PointsNotIncreasing);
        }
        Ok(OrderedPoints::Float(values))
    }

    pub fn integers(values: &[i64]) -> Result<Self> {
        Self::exact(values.iter().map(|&v| rat_int(v)).collect())
    }

    pub fn from_scalars(values: Vec<Scalar>) -> Result<Self> {
        if values.iter().all(Scalar::is_exact) {
            Self::exact(values.into_iter().map(|s| s.to_exact()).collect::<Result<_>>()?)
        } else {
            Self::float(values.iter().map(Scalar::to_f64).collect())
        }
    }

    pub fn len(&self) -> usize {
        match self {
            OrderedPoints::Exact(v) => v.len(),
            OrderedPoints::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, OrderedPoints::Exact(_))
    }

    pub fn get(&self, i: usize) -> Scalar {
        match self {
            OrderedPoints::Exact(v) => Scalar::Exact(v[i].clone()),
            OrderedPoints::Float(v) => Scalar::Float(v[i]),
        }
    }

    pub fn scalars(&self) -> Vec<Scalar> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        match self {
            OrderedPoints::Exact(v) => v.iter().map(rational_to_f64).collect(),
            OrderedPoints::Float(v) => v.clone(),
        }
    }

    /// Points at the given (strictly increasing) indices.
    pub fn select(&self, idx: &[usize]) -> OrderedPoints {
        match self {
            OrderedPoints::Exact(v) => OrderedPoints::Exact(idx.iter().map(|&i| v[i].clone()).collect()),
            OrderedPoints::Float(v) => OrderedPoints::Float(idx.iter().map(|&i| v[i]).collect()),
        }
    }
}

impl Serialize for OrderedPoints {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.scalars().serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrderedPoints {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<Scalar>::deserialize(d)?;
        OrderedPoints::from_scalars(v).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Entries {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

/// Dense row-major matrix, optionally tagged with the grid that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Entries,
    row_points: Option<OrderedPoints>,
    col_points: Option<OrderedPoints>,
}

fn check_shape(rows: usize, cols: usize, len: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::Empty);
    }
    if rows * cols != len {
        return Err(Error::InvalidParameter(format!(
            "{len} entries do not fill a {rows}x{cols} matrix"
        )));
    }
    Ok(())
}

impl Matrix {
    pub fn from_exact(rows: usize, cols: usize, data: Vec<BigRational>) -> Result<Self> {
        check_shape(rows, cols, data.len())?;
        Ok(Matrix {
            rows,
            cols,
            entries: Entries::Exact(data),
            row_points: None,
            col_points: None,
        })
    }

    pub fn from_float(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_shape(rows, cols, data.len())?;
        if let Some(x) = data.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite(*x));
        }
        Ok(Matrix {
            rows,
            cols,
            entries: Entries::Float(data),
            row_points: None,
            col_points: None,
        })
    }

    /// All-exact input gives an exact matrix, all-float a float one.
    pub fn from_scalars(rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if data.iter().all(Scalar::is_exact) {
            Self::from_exact(rows, cols, data.into_iter().map(|s| s.to_exact()).collect::<Result<_>>()?)
        } else if data.iter().all(|s| !s.is_exact()) {
            Self::from_float(rows, cols, data.iter().map(Scalar::to_f64).collect())
        } else {
            Err(Error::MixedArithmetic)
        }
    }

    pub fn from_int_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        if rows.iter().any(|row| row.as_ref().len() != c) {
            return Err(Error::InvalidParameter("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|row| row.as_ref().iter().map(|&v| rat_int(v))).collect();
        Self::from_exact(r, c, data)
    }

    pub fn from_rational_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidParameter("ragged rows".into()));
        }
        Self::from_exact(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_float_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        if rows.iter().any(|row| row.as_ref().len() != c) {
            return Err(Error::InvalidParameter("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|row| row.as_ref().iter().copied()).collect();
        Self::from_float(r, c, data)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![BigRational::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = BigRational::one();
        }
        Self::from_exact(n, n, data)
    }

    pub fn filled(rows: usize, cols: usize, value: &Scalar) -> Result<Self> {
        Self::from_scalars(rows, cols, vec![value.clone(); rows * cols])
    }

    pub fn with_points(mut self, row_points: Option<OrderedPoints>, col_points: Option<OrderedPoints>) -> Result<Self> {
        if let Some(p) = &row_points {
            if p.len() != self.rows {
                return Err(Error::InvalidParameter(format!(
                    "{} row points for {} rows",
                    p.len(),
                    self.rows
                )));
            }
        }
        if let Some(p) = &col_points {
            if p.len() != self.cols {
                return Err(Error::InvalidParameter(format!(
                    "{} column points for {} columns",
                    p.len(),
                    self.cols
                )));
            }
        }
        self.row_points = row_points;
        self.col_points = col_points;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    pub fn row_points(&self) -> Option<&OrderedPoints> {
        self.row_points.as_ref()
    }

    pub fn col_points(&self) -> Option<&OrderedPoints> {
        self.col_points.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.entries, Entries::Exact(_))
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        let k = i * self.cols + j;
        match &self.entries {
            Entries::Exact(v) => Scalar::Exact(v[k].clone()),
            Entries::Float(v) => Scalar::Float(v[k]),
        }
    }

    pub fn get_f64(&self, i: usize, j: usize) -> f64 {
        let k = i * self.cols + j;
        match &self.entries {
            Entries::Exact(v) => rational_to_f64(&v[k]),
            Entries::Float(v) => v[k],
        }
    }

    pub fn exact_data(&self) -> Option<&[BigRational]> {
        match &self.entries {
            Entries::Exact(v) => Some(v),
            Entries::Float(_) => None,
        }
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        match &self.entries {
            Entries::Exact(v) => v.iter().map(rational_to_f64).collect(),
            Entries::Float(v) => v.clone(),
        }
    }

    pub fn row_scalars(&self, i: usize) -> Vec<Scalar> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    /// Float copy (rounding exact entries to nearest double).
    pub fn to_float(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: Entries::Float(self.to_f64_vec()),
            row_points: self.row_points.clone(),
            col_points: self.col_points.clone(),
        }
    }

    /// Exact copy; float entries convert to their exact binary values.
    pub fn to_exact(&self) -> Result<Matrix> {
        let data = match &self.entries {
            Entries::Exact(v) => v.clone(),
            Entries::Float(v) => v.iter().map(|&x| f64_to_rational(x)).collect::<Result<_>>()?,
        };
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: Entries::Exact(data),
            row_points: self.row_points.clone(),
            col_points: self.col_points.clone(),
        })
    }

    pub fn transpose(&self) -> Matrix {
        let (r, c) = (self.rows, self.cols);
        let entries = match &self.entries {
            Entries::Exact(v) => Entries::Exact((0..r * c).map(|k| v[(k % r) * c + k / r].clone()).collect()),
            Entries::Float(v) => Entries::Float((0..r * c).map(|k| v[(k % r) * c + k / r]).collect()),
        };
        Matrix {
            rows: c,
            cols: r,
            entries,
            row_points: self.col_points.clone(),
            col_points: self.row_points.clone(),
        }
    }

    pub fn submatrix(&self, sel: &MinorSelector) -> Result<Matrix> {
        sel.check_bounds(self.rows, self.cols)?;
        let idx = sel
            .rows
            .iter()
            .flat_map(|&i| sel.cols.iter().map(move |&j| i * self.cols + j));
        let entries = match &self.entries {
            Entries::Exact(v) => Entries::Exact(idx.map(|k| v[k].clone()).collect()),
            Entries::Float(v) => Entries::Float(idx.map(|k| v[k]).collect()),
        };
        Ok(Matrix {
            rows: sel.rows.len(),
            cols: sel.cols.len(),
            entries,
            row_points: self.row_points.as_ref().map(|p| p.select(&sel.rows)),
            col_points: self.col_points.as_ref().map(|p| p.select(&sel.cols)),
        })
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        (0..n).all(|i| (i + 1..n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Hadamard bound of the matrix with every column scaled to unit max norm,
    /// times the product of the scales. For a square matrix this bounds |det|,
    /// and stays tight when column scales differ by many orders of magnitude.
    pub fn hadamard_bound(&self) -> f64 {
        let scale: Vec<f64> = (0..self.cols)
            .map(|j| (0..self.rows).fold(0.0f64, |m, i| m.max(self.get_f64(i, j).abs())))
            .map(|c| if c > 0.0 { c } else { 1.0 })
            .collect();
        let rows: f64 = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| (self.get_f64(i, j) / scale[j]).powi(2)).sum::<f64>().sqrt())
            .product();
        rows * scale.iter().product::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.to_f64_vec().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// First negative entry, if any.
    pub fn first_negative(&self) -> Option<(usize, usize, f64)> {
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.get(i, j)))
            .find(|(_, _, v)| match v {
                Scalar::Exact(q) => q < &BigRational::zero(),
                Scalar::Float(x) => *x < 0.0,
            })
            .map(|(i, j, v)| (i, j, v.to_f64()))
    }

    /// Entrywise (Schur) product.
    pub fn schur(&self, other: &Matrix) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        let entries = match (&self.entries, &other.entries) {
            (Entries::Exact(a), Entries::Exact(b)) => Entries::Exact(a.iter().zip(b).map(|(x, y)| x * y).collect()),
            (Entries::Float(a), Entries::Float(b)) => Entries::Float(a.iter().zip(b).map(|(x, y)| x * y).collect()),
            _ => return Err(Error::MixedArithmetic),
        };
        Ok(Matrix {
            entries,
            ..self.clone()
        })
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: (self.cols, other.cols),
                found: other.shape(),
            });
        }
        let (n, m, p) = (self.rows, self.cols, other.cols);
        let entries = match (&self.entries, &other.entries) {
            (Entries::Exact(a), Entries::Exact(b)) => {
                let mut out = vec![BigRational::zero(); n * p];
                for i in 0..n {
                    for k in 0..m {
                        let aik = &a[i * m + k];
                        if aik.is_zero() {
                            continue;
                        }
                        for j in 0..p {
                            out[i * p + j] += aik * &b[k * p + j];
                        }
                    }
                }
                Entries::Exact(out)
            }
            (Entries::Float(a), Entries::Float(b)) => {
                let mut out = vec![0.0; n * p];
                for i in 0..n {
                    for k in 0..m {
                        for j in 0..p {
                            out[i * p + j] += a[i * m + k] * b[k * p + j];
                        }
                    }
                }
                Entries::Float(out)
            }
            _ => return Err(Error::MixedArithmetic),
        };
        Ok(Matrix {
            rows: n,
            cols: p,
            entries,
            row_points: None,
            col_points: None,
        })
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row_scalars(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Row and column index tuples of a square minor (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MinorSelector {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

fn strictly_increasing(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl MinorSelector {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.is_empty() || rows.len() != cols.len() {
            return Err(Error::InvalidSelector(format!(
                "index tuples must be nonempty and of equal length ({} vs {})",
                rows.len(),
                cols.len()
            )));
        }
        if !strictly_increasing(&rows) || !strictly_increasing(&cols) {
            return Err(Error::InvalidSelector("indices must be strictly increasing".into()));
        }
        Ok(MinorSelector { rows, cols })
    }

    /// The whole of an n×n matrix.
    pub fn full(n: usize) -> Self {
        MinorSelector {
            rows: (0..n).collect(),
            cols: (0..n).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn is_contiguous(&self) -> bool {
        let run = |v: &[usize]| v.windows(2).all(|w| w[1] == w[0] + 1);
        run(&self.rows) && run(&self.cols)
    }

    pub(crate) fn check_bounds(&self, rows: usize, cols: usize) -> Result<()> {
        let ok = !self.rows.is_empty()
            && self.rows.len() == self.cols.len()
            && strictly_increasing(&self.rows)
            && strictly_increasing(&self.cols)
            && self.rows.last().is_some_and(|&r| r < rows)
            && self.cols.last().is_some_and(|&c| c < cols);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSelector(format!("{self} does not fit a {rows}x{cols} matrix")))
        }
    }
}

impl fmt::Display for MinorSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rows {:?} x cols {:?}", self.rows, self.cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transpose_swaps_points() {
        let m = Matrix::from_int_rows(&[[1, 2, 3], [4, 5, 6]])
            .unwrap()
            .with_points(
                Some(OrderedPoints::integers(&[0, 1]).unwrap()),
                Some(OrderedPoints::integers(&[1, 2, 3]).unwrap()),
            )
            .unwrap();
        let t = m.transpose();
        assert_eq!(t.shape(), (3, 2));
        assert_eq!(t.get(2, 1), Scalar::int(6));
        assert_eq!(t.row_points().unwrap().len(), 3);
        assert_eq!(t.transpose(), m);
    }

    #[test]
    fn rejects_bad_shapes_and_points() {
        assert!(Matrix::from_float(0, 1, vec![]).is_err());
        assert!(Matrix::from_float(1, 2, vec![1.0]).is_err());
        assert!(Matrix::from_float(1, 1, vec![f64::NAN]).is_err());
        assert!(OrderedPoints::float(vec![1.0, 1.0]).is_err());
        assert!(OrderedPoints::float(vec![]).is_err());
        let m = Matrix::identity(2).unwrap();
        assert!(m.with_points(Some(OrderedPoints::integers(&[1]).unwrap()), None).is_err());
    }

    #[test]
    fn selector_validation() {
        assert!(MinorSelector::new(vec![1, 0], vec![0, 1]).is_err());
        assert!(MinorSelector::new(vec![0], vec![0, 1]).is_err());
        let s = MinorSelector::new(vec![0, 2], vec![1, 2]).unwrap();
        assert!(!s.is_contiguous());
        let m = Matrix::identity(2).unwrap();
        assert!(m.submatrix(&s).is_err());
    }

    #[test]
    fn submatrix_and_products() {
        let m = Matrix::from_int_rows(&[[1, 2, 3], [4, 5, 6], [7, 8, 10]]).unwrap();
        let s = MinorSelector::new(vec![1, 2], vec![0, 2]).unwrap();
        assert_eq!(m.submatrix(&s).unwrap(), Matrix::from_int_rows(&[[4, 6], [7, 10]]).unwrap());
        let id = Matrix::identity(3).unwrap();
        assert_eq!(m.matmul(&id).unwrap(), m);
        assert_eq!(m.schur(&id).unwrap(), Matrix::from_int_rows(&[[1, 0, 0], [0, 5, 0], [0, 0, 10]]).unwrap());
        assert!(m.schur(&m.to_float()).is_err());
    }
}
