//! Randomized counterexample search for power families that fail a given
//! order.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certify::{first_certified_negative, Certificate};
use super::trial_rng;
use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::kernels::{pf_eval, PfSpec};
use crate::linalg::{Matrix, MinorSelector, OrderedPoints, Tolerance};
use crate::transforms::Mode;

/// Kernel or matrix families raised to an entrywise power. `r` is the order
/// whose failure is sought; grids have r points unless noted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// (1 + x_i x_j)^α on a symmetric grid.
    JainPower { alpha: f64, r: usize },
    /// max(1 + xy, 0)^α on independent grids; fails TP^(r).
    JksPower { alpha: f64, r: usize },
    /// Ω(x - y)^α with Ω(x) = x e^{-x} for x > 0.
    OmegaToeplitzPower { alpha: f64, r: usize },
    /// M_γ(x - y)^n; grid sizes come from the budget.
    MGammaPower { gamma: f64, n: u32 },
    /// (1 + u0^{x+x'})^α on a symmetric grid.
    HankelPower { u0: f64, alpha: f64, r: usize },
    /// A^α for random 4×4 TP matrices A; fails TP^(4).
    FourByFourPower { alpha: f64 },
    /// A^α for random symmetric TP matrices A of the given size, looking at
    /// minors of size ≤ `order`.
    SymmetricTpPower { alpha: f64, size: usize, order: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_trials: u64,
    pub grid_size_range: (usize, usize),
    pub point_range: (f64, f64),
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_trials: 10_000,
            grid_size_range: (2, 5),
            point_range: (0.0, 20.0),
            seed: 1,
        }
    }
}

impl SearchBudget {
    pub fn with_seed(seed: u64) -> Self {
        SearchBudget {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.grid_size_range;
        let (lo, hi) = self.point_range;
        if self.max_trials == 0 {
            return Err(Error::InvalidParameter("max_trials must be positive".into()));
        }
        if a < 1 || a > b || b > 8 {
            return Err(Error::InvalidParameter(format!("grid sizes ({a}, {b}) must satisfy 1 ≤ a ≤ b ≤ 8")));
        }
        if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!("point range ({lo}, {hi}) must satisfy 0 ≤ lo < hi")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchWitness {
    pub family: Family,
    pub seed: u64,
    pub trial: u64,
    /// The powered matrix; grid families attach their points.
    pub matrix: Matrix,
    /// The exact base matrix for the random-matrix families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Matrix>,
    pub selector: MinorSelector,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found(Box<SearchWitness>),
    SearchExhausted { trials: u64 },
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&SearchWitness> {
        match self {
            SearchOutcome::Found(w) => Some(w),
            SearchOutcome::SearchExhausted { .. } => None,
        }
    }
}

fn noninteger_in(alpha: f64, top: f64) -> bool {
    alpha > 0.0 && alpha < top && alpha.fract() != 0.0
}

fn regime(msg: String) -> Error {
    Error::Regime(msg)
}

impl Family {
    /// Rejects parameters for which no violation is predicted.
    pub fn check_regime(&self) -> Result<()> {
        let finite = |a: f64| a.is_finite();
        match *self {
            Family::JainPower { alpha, r }
            | Family::JksPower { alpha, r }
            | Family::OmegaToeplitzPower { alpha, r }
            | Family::HankelPower { alpha, r, .. } => {
                if !(3..=8).contains(&r) {
                    return Err(regime(format!("order r = {r} must lie in 3..=8")));
                }
                if let Family::HankelPower { u0, .. } = self {
                    if !(*u0 > 0.0 && *u0 < 1.0) {
                        return Err(regime(format!("u0 = {u0} must lie in (0, 1)")));
                    }
                }
                if !noninteger_in(alpha, r as f64 - 2.0) {
                    return Err(regime(format!(
                        "α = {alpha} is outside (0, {})∖ℤ, where order {r} holds",
                        r - 2
                    )));
                }
            }
            Family::MGammaPower { gamma, n } => {
                if !(gamma > 0.0 && finite(gamma)) {
                    return Err(regime(format!("γ = {gamma} must be positive")));
                }
                if n < 2 {
                    return Err(regime(format!("n = {n}: M_γ itself is a PF function")));
                }
            }
            Family::FourByFourPower { alpha } => {
                if !(alpha > 1.0 && finite(alpha)) {
                    return Err(regime(format!("α = {alpha} must exceed 1")));
                }
            }
            Family::SymmetricTpPower { alpha, size, order } => {
                if !(4..=6).contains(&size) || !(4..=size).contains(&order) {
                    return Err(regime(format!("size {size} and order {order} need 4 ≤ order ≤ size ≤ 6")));
                }
                let ok = if size == 4 {
                    alpha > 0.0 && alpha < 2.0 && alpha != 1.0
                } else {
                    alpha > 0.0 && finite(alpha) && alpha != 1.0
                };
                if !ok {
                    return Err(regime(format!("α = {alpha} preserves order {order} on size {size}")));
                }
            }
        }
        Ok(())
    }

    /// Largest minor size inspected.
    fn order(&self, grid: usize) -> usize {
        match *self {
            Family::JainPower { r, .. }
            | Family::JksPower { r, .. }
            | Family::OmegaToeplitzPower { r, .. }
            | Family::HankelPower { r, .. } => r,
            Family::MGammaPower { .. } => grid,
            Family::FourByFourPower { .. } => 4,
            Family::SymmetricTpPower { order, .. } => order,
        }
    }
}

/// n distinct points drawn log-uniformly from the range; a zero lower end
/// becomes hi·1e-4.
pub fn sample_points<R: Rng>(rng: &mut R, n: usize, range: (f64, f64)) -> Vec<f64> {
    let (lo, hi) = range;
    let lo = if lo > 0.0 { lo } else { hi * 1e-4 };
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(lo.ln()..hi.ln()).exp()).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] > 1e-9 * hi) {
            return v;
        }
    }
}

fn grid_matrix(xs: &[f64], ys: &[f64], f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
    let data = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).map(|(x, y)| f(x, y)).collect();
    Matrix::from_float(xs.len(), ys.len(), data)?.with_points(
        Some(OrderedPoints::float(xs.to_vec())?),
        Some(OrderedPoints::float(ys.to_vec())?),
    )
}

fn powered(base: &Matrix, alpha: f64) -> Result<Matrix> {
    let data = base.to_f64_vec().iter().map(|x| x.powf(alpha)).collect();
    Matrix::from_float(base.rows(), base.cols(), data)
}

struct Sample {
    matrix: Matrix,
    base: Option<Matrix>,
}

fn draw(family: &Family, budget: &SearchBudget, rng: &mut ChaCha8Rng) -> Result<Sample> {
    let range = budget.point_range;
    let grid = |rng: &mut ChaCha8Rng, n| sample_points(rng, n, range);
    let sample = |matrix| Ok(Sample { matrix, base: None });
    match *family {
        Family::JainPower { alpha, r } => {
            let x = grid(rng, r);
            sample(grid_matrix(&x, &x, |a, b| (1.0 + a * b).powf(alpha))?)
        }
        Family::JksPower { alpha, r } => {
            let (x, y) = (grid(rng, r), grid(rng, r));
            sample(grid_matrix(&x, &y, |a, b| (1.0 + a * b).max(0.0).powf(alpha))?)
        }
        Family::OmegaToeplitzPower { alpha, r } => {
            let (x, y) = (grid(rng, r), grid(rng, r));
            sample(grid_matrix(&x, &y, |a, b| pf_eval(&PfSpec::Omega, a - b).powf(alpha))?)
        }
        Family::MGammaPower { gamma, n } => {
            let (lo, hi) = budget.grid_size_range;
            let size = rng.gen_range(lo..=hi);
            let (x, y) = (grid(rng, size), grid(rng, size));
            let pf = PfSpec::EvenM { gamma };
            sample(grid_matrix(&x, &y, |a, b| pf_eval(&pf, a - b).powi(n as i32))?)
        }
        Family::HankelPower { u0, alpha, r } => {
            let x = grid(rng, r);
            sample(grid_matrix(&x, &x, |a, b| (1.0 + u0.powf(a + b)).powf(alpha))?)
        }
        Family::FourByFourPower { alpha } => {
            let base = Generator::from_rng(rng.clone()).with_range(0.1, 10.0)?.matrix(4, Mode::Tp)?;
            Ok(Sample {
                matrix: powered(&base, alpha)?,
                base: Some(base),
            })
        }
        Family::SymmetricTpPower { alpha, size, .. } => {
            let base = Generator::from_rng(rng.clone()).with_range(0.1, 10.0)?.matrix(size, Mode::Stp)?;
            Ok(Sample {
                matrix: powered(&base, alpha)?,
                base: Some(base),
            })
        }
    }
}

/// Samples the family until some minor of size ≤ its order certifies as
/// negative. Trials run in parallel; the reported witness is the one with the
/// lowest trial index, so results depend only on the seed.
pub fn search_counterexample(family: &Family, budget: &SearchBudget) -> Result<SearchOutcome> {
    family.check_regime()?;
    budget.validate()?;
    let tol = Tolerance::default();
    let hit = (0..budget.max_trials).into_par_iter().find_map_first(|trial| {
        let mut rng = trial_rng(budget.seed, trial);
        let mut run = || -> Result<Option<SearchWitness>> {
            let s = draw(family, budget, &mut rng)?;
            let order = family.order(s.matrix.rows().min(s.matrix.cols()));
            Ok(first_certified_negative(&s.matrix, order, &tol)?.map(|(selector, certificate)| SearchWitness {
                family: family.clone(),
                seed: budget.seed,
                trial,
                matrix: s.matrix,
                base: s.base,
                selector,
                certificate,
            }))
        };
        match run() {
            Ok(None) => None,
            Ok(Some(w)) => Some(Ok(w)),
            Err(e) => Some(Err(e)),
        }
    });
    match hit {
        None => Ok(SearchOutcome::SearchExhausted {
            trials: budget.max_trials,
        }),
        Some(Ok(w)) => Ok(SearchOutcome::Found(Box::new(w))),
        Some(Err(e)) => Err(e),
    }
}
