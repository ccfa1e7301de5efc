//! Random TN/TP/STN/STP matrices from nonnegative bidiagonal factorizations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{sample_kernel, KernelSpec};
use crate::linalg::{tn_order, tp_order, Matrix, OrderedPoints, Tolerance};
use crate::transforms::Mode;

/// Factor parameters are multiples of 1/QUANTUM.
const QUANTUM: i64 = 64;

fn default_zero_prob() -> f64 {
    0.3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub class: Mode,
    pub parameter_range: (f64, f64),
    pub seed: u64,
    /// Probability that a TN/STN factor parameter is zero.
    #[serde(default = "default_zero_prob")]
    pub zero_prob: f64,
}

impl GenSpec {
    pub fn new(n: usize, class: Mode, seed: u64) -> Self {
        GenSpec {
            n,
            class,
            parameter_range: (0.25, 4.0),
            seed,
            zero_prob: default_zero_prob(),
        }
    }
}

/// A seeded stream of random matrices. Not meant to be shared across threads;
/// give each worker its own seed.
#[derive(Clone, Debug)]
pub struct Generator {
    rng: ChaCha8Rng,
    range: (f64, f64),
    zero_prob: f64,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            range: (0.25, 4.0),
            zero_prob: default_zero_prob(),
        }
    }

    /// Continues an existing stream, e.g. one seeded per search trial.
    pub fn from_rng(rng: ChaCha8Rng) -> Self {
        Generator {
            rng,
            range: (0.25, 4.0),
            zero_prob: default_zero_prob(),
        }
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad parameter range ({lo}, {hi})")));
        }
        self.range = (lo, hi);
        Ok(self)
    }

    pub fn with_zero_prob(mut self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("zero probability {p} outside [0,1]")));
        }
        self.zero_prob = p;
        Ok(self)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A positive parameter: log-uniform in the range (uniform when it starts
    /// at 0), rounded to a multiple of 1/64 and at least 1/64.
    fn positive(&mut self) -> BigRational {
        let (lo, hi) = self.range;
        let v = if lo > 0.0 {
            self.rng.gen_range(lo.ln()..=hi.ln()).exp()
        } else {
            self.rng.gen_range(lo..=hi)
        };
        let k = ((v * QUANTUM as f64).round() as i64).max(1);
        BigRational::new(BigInt::from(k), BigInt::from(QUANTUM))
    }

    fn param(&mut self, allow_zero: bool) -> BigRational {
        if allow_zero && self.rng.gen_bool(self.zero_prob) {
            BigRational::zero()
        } else {
            self.positive()
        }
    }

    /// Product of the n(n-1)/2 elementary lower bidiagonal factors.
    fn lower_factor(&mut self, n: usize, allow_zero: bool) -> Vec<BigRational> {
        let mut m = identity(n);
        for k in 1..n {
            for i in (k..n).rev() {
                let l = self.param(allow_zero);
                if l.is_zero() {
                    continue;
                }
                // m ← m (I + l E_{i,i-1}): column i-1 gains l × column i.
                for r in 0..n {
                    let add = &m[r * n + i] * &l;
                    m[r * n + i - 1] += add;
                }
            }
        }
        m
    }

    /// L · D · Uᵀ from independent bidiagonal products; TN (or TP when no
    /// parameter can vanish).
    fn factor_product(&mut self, n: usize, allow_zero: bool) -> Result<Matrix> {
        let l = self.lower_factor(n, allow_zero);
        let d: Vec<BigRational> = (0..n).map(|_| self.param(allow_zero)).collect();
        let u = self.lower_factor(n, allow_zero);
        let mut ld = l;
        for r in 0..n {
            for c in 0..n {
                ld[r * n + c] *= &d[c];
            }
        }
        let ut = Matrix::from_exact(n, n, u)?.transpose();
        Matrix::from_exact(n, n, ld)?.matmul(&ut)
    }

    /// A verified n×n matrix of the given class.
    pub fn matrix(&mut self, n: usize, class: Mode) -> Result<Matrix> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if class.positive() && self.range.0 <= 0.0 && self.range.1 <= 1.0 / QUANTUM as f64 {
            return Err(Error::InvalidParameter("TP classes need a positive parameter range".into()));
        }
        let allow_zero = !class.positive();
        let w = self.factor_product(n, allow_zero)?;
        let m = if class.symmetric() { w.matmul(&w.transpose())? } else { w };
        verify(&m, class)?;
        Ok(m)
    }
}

fn identity(n: usize) -> Vec<BigRational> {
    let mut m = vec![BigRational::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = BigRational::one();
    }
    m
}

fn verify(m: &Matrix, class: Mode) -> Result<()> {
    let n = m.rows();
    let tol = Tolerance::default();
    if class.symmetric() && !m.is_symmetric() {
        return Err(Error::GeneratorCheck(format!("{class} output is not symmetric")));
    }
    let report = if class.positive() {
        tp_order(m, None, &tol)?
    } else {
        tn_order(m, None, &tol)?
    };
    if report.order != n {
        return Err(Error::GeneratorCheck(format!(
            "{class} output of size {n} has order {} (witness {:?})",
            report.order, report.witness
        )));
    }
    Ok(())
}

/// One matrix from a full spec.
pub fn random_matrix(spec: &GenSpec) -> Result<Matrix> {
    let (lo, hi) = spec.parameter_range;
    if spec.class.positive() && lo <= 0.0 {
        return Err(Error::InvalidParameter("TP/STP need a parameter range inside (0, inf)".into()));
    }
    Generator::new(spec.seed)
        .with_range(lo, hi)?
        .with_zero_prob(spec.zero_prob)?
        .matrix(spec.n, spec.class)
}

/// How one coordinate of a kernel tuple is produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum TupleCoord {
    Generated { class: Mode },
    Kernel { spec: KernelSpec },
}

/// Matrices for each coordinate on a shared grid, with the grid attached.
///
/// Generated coordinates are drawn at size max(|X|, |Y|) and cut to the
/// leading |X|×|Y| block, which keeps the class.
pub fn random_kernel_tuple(
    coords: &[TupleCoord],
    xs: &OrderedPoints,
    ys: &OrderedPoints,
    gen: &mut Generator,
) -> Result<Vec<Matrix>> {
    let (r, c) = (xs.len(), ys.len());
    coords
        .iter()
        .map(|coord| match coord {
            TupleCoord::Generated { class } => {
                if class.symmetric() && xs != ys {
                    return Err(Error::InvalidParameter("symmetric classes need X = Y".into()));
                }
                let n = r.max(c);
                let m = gen.matrix(n, *class)?;
                let data = m.exact_data().expect("generator output is exact");
                let block = (0..r)
                    .flat_map(|i| data[i * n..i * n + c].iter().cloned())
                    .collect();
                Matrix::from_exact(r, c, block)?.with_points(Some(xs.clone()), Some(ys.clone()))
            }
            TupleCoord::Kernel { spec } => sample_kernel(spec, xs, ys),
        })
        .collect()
}

/// n strictly increasing exact points: a start in [1/4, 1] and gaps in [1/2, 3/2],
/// all multiples of 1/4.
pub fn random_points<R: Rng>(rng: &mut R, n: usize) -> OrderedPoints {
    let mut k: i64 = rng.gen_range(1..=4);
    let mut v = Vec::with_capacity(n);
    for _ in 0..n {
        v.push(BigRational::new(BigInt::from(k), BigInt::from(4)));
        k += rng.gen_range(2..=6);
    }
    OrderedPoints::exact(v).expect("increasing by construction")
}
