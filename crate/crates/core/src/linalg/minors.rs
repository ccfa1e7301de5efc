use serde::{Deserialize, Serialize};

use super::matrix::{Matrix, MinorSelector};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MinorMode {
    All,
    /// Only minors whose row and column indices are consecutive runs.
    Contiguous,
}

/// Strictly increasing r-tuples from 0..n in lexicographic order.
#[derive(Clone, Debug)]
pub struct IncreasingTuples {
    n: usize,
    current: Option<Vec<usize>>,
}

impl IncreasingTuples {
    pub fn new(n: usize, r: usize) -> Self {
        let current = if r == 0 || r > n { None } else { Some((0..r).collect()) };
        IncreasingTuples { n, current }
    }
}

impl Iterator for IncreasingTuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        let r = cur.len();
        let mut i = r;
        while i > 0 && cur[i - 1] == self.n - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            self.current = None;
        } else {
            cur[i - 1] += 1;
            for k in i..r {
                cur[k] = cur[k - 1] + 1;
            }
        }
        Some(out)
    }
}

fn tuples(n: usize, r: usize, mode: MinorMode) -> Vec<Vec<usize>> {
    match mode {
        MinorMode::All => IncreasingTuples::new(n, r).collect(),
        MinorMode::Contiguous => (0..=n - r).map(|s| (s..s + r).collect()).collect(),
    }
}

/// Every r×r selector of a rows×cols matrix, row tuples outermost, both in
/// lexicographic order.
pub fn enumerate_minors_of_shape(
    rows: usize,
    cols: usize,
    r: usize,
    mode: MinorMode,
) -> Result<impl Iterator<Item = MinorSelector>> {
    let max = rows.min(cols);
    if r == 0 || r > max {
        return Err(Error::MinorSizeOutOfRange { size: r, max });
    }
    let row_tuples = tuples(rows, r, mode);
    let col_tuples = tuples(cols, r, mode);
    Ok(row_tuples.into_iter().flat_map(move |rt| {
        col_tuples.clone().into_iter().map(move |ct| MinorSelector {
            rows: rt.clone(),
            cols: ct,
        })
    }))
}

pub fn enumerate_minors(m: &Matrix, r: usize, mode: MinorMode) -> Result<impl Iterator<Item = MinorSelector>> {
    enumerate_minors_of_shape(m.rows(), m.cols(), r, mode)
}
