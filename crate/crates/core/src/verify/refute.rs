//! Concrete input tuples showing that an inadmissible transform fails.

use serde::Serialize;

use super::certify::{first_certified_negative, Certificate};
use super::search::{search_counterexample, Family, SearchBudget, SearchOutcome, SearchWitness};
use crate::error::Result;
use crate::linalg::{tn_order, tp_order, Matrix, MinorSelector, Scalar, Tolerance};
use crate::transforms::{apply, classify, Bound, Clause, ClausePart, Defect, MixedPowerTransform, Mode, OrderSpec, Outcome};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Refutation {
    pub rule: Clause,
    pub defect: Defect,
    pub construction: String,
    pub inputs: Vec<Matrix>,
    pub output: Matrix,
    pub selector: MinorSelector,
    pub det: Scalar,
    /// Present when the output is floating point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_trial: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RefutationOutcome {
    Refuted(Box<Refutation>),
    NotRefuted { reason: String },
}

impl RefutationOutcome {
    pub fn refutation(&self) -> Option<&Refutation> {
        match self {
            RefutationOutcome::Refuted(r) => Some(r),
            RefutationOutcome::NotRefuted { .. } => None,
        }
    }
}

/// The 0-1 pair whose Schur product is [[1,1,0],[1,1,1],[0,1,1]].
pub(crate) fn zero_one_pair() -> (Matrix, Matrix) {
    let k1 = Matrix::from_int_rows(&[[1, 1, 0], [1, 1, 1], [1, 1, 1]]).expect("static");
    let k2 = k1.transpose();
    (k1, k2)
}

/// The symmetric 4×4 pair whose powered product has a negative 3×3 minor.
pub(crate) fn symmetric_pair() -> (Matrix, Matrix) {
    let k1 = Matrix::from_int_rows(&[[2, 2, 1, 1], [2, 2, 1, 1], [1, 1, 2, 2], [1, 1, 2, 2]]).expect("static");
    let k2 = Matrix::from_int_rows(&[[2, 1, 1, 0], [1, 2, 2, 1], [1, 2, 2, 1], [0, 1, 1, 2]]).expect("static");
    (k1, k2)
}

/// [[1, s, 0], [s, 1, s], [0, s, 1]] with s = 1/√2.
pub(crate) fn sqrt2_matrix() -> Matrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Matrix::from_float_rows(&[[1.0, s, 0.0], [s, 1.0, s], [0.0, s, 1.0]]).expect("static")
}

/// G (K + ηI) Gᵀ with the Gaussian matrix G_ij = exp(-(i-j)²/2σ²). For a
/// TN matrix K with K + ηI nonsingular and TN this is TP; symmetric K gives
/// a symmetric result.
pub(crate) fn smoothed(k: &Matrix, sigma: f64, eta: f64) -> Result<Matrix> {
    let n = k.rows();
    let g: Vec<f64> = (0..n * n)
        .map(|idx| {
            let d = (idx / n) as f64 - (idx % n) as f64;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let mut a = k.to_f64_vec();
    for i in 0..n {
        a[i * n + i] += eta;
    }
    let ga: Vec<f64> = (0..n * n)
        .map(|idx| (0..n).map(|l| g[(idx / n) * n + l] * a[l * n + idx % n]).sum())
        .collect();
    let mut out: Vec<f64> = (0..n * n)
        .map(|idx| (0..n).map(|l| ga[(idx / n) * n + l] * g[(idx % n) * n + l]).sum())
        .collect();
    if k.is_symmetric() {
        for i in 0..n {
            for j in 0..i {
                out[i * n + j] = out[j * n + i];
            }
        }
    }
    Matrix::from_float(n, n, out)
}

/// e^{x_i y_j / n}: TP on increasing positive grids and close to all-ones.
fn vandermonde(xs: &[f64], ys: &[f64], n: f64) -> Result<Matrix> {
    let data = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x * y / n).exp())).collect();
    Matrix::from_float(xs.len(), ys.len(), data)
}

fn index_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64).collect()
}

fn points_of(m: &Matrix) -> (Vec<f64>, Vec<f64>) {
    match (m.row_points(), m.col_points()) {
        (Some(x), Some(y)) => (x.to_f64_vec(), y.to_f64_vec()),
        _ => (index_grid(m.rows()), index_grid(m.cols())),
    }
}

fn powered(m: &Matrix, gamma: f64) -> Result<Matrix> {
    let data = m.to_f64_vec().iter().map(|x| x.powf(gamma)).collect();
    Matrix::from_float(m.rows(), m.cols(), data)
}

/// A failing minor of size ≤ `limit`, exact for rational outputs.
fn violation(
    output: &Matrix,
    limit: usize,
    positive: bool,
    tol: &Tolerance,
) -> Result<Option<(MinorSelector, Scalar, Option<Certificate>)>> {
    if output.is_exact() {
        let rep = if positive {
            tp_order(output, Some(limit), tol)?
        } else {
            tn_order(output, Some(limit), tol)?
        };
        Ok(rep.witness.map(|w| (w.selector, w.det, None)))
    } else {
        Ok(first_certified_negative(output, limit, tol)?.map(|(s, c)| (s, Scalar::Float(c.det), Some(c))))
    }
}

struct Attempt {
    construction: String,
    inputs: Vec<Matrix>,
    /// Set when every output entry is known to equal a stored constant.
    exact_output: bool,
    search_trial: Option<u64>,
}

struct Ctx<'a> {
    f: &'a MixedPowerTransform,
    mode: Mode,
    limit: usize,
    tol: Tolerance,
}

impl Ctx<'_> {
    /// Inputs: `special` at the given coordinates, companions elsewhere.
    /// TN companions are all ones; TP companions are e^{xy/n}.
    fn tuple(&self, special: Vec<(usize, Matrix)>, xs: &[f64], ys: &[f64], n: f64) -> Result<Vec<Matrix>> {
        let companion = if self.mode.positive() {
            vandermonde(xs, ys, n)?
        } else {
            Matrix::filled(xs.len(), ys.len(), &Scalar::int(1))?
        };
        let mut out = vec![companion; self.f.arity()];
        for (j, m) in special {
            out[j] = m;
        }
        Ok(out)
    }

    fn evaluate(&self, a: Attempt, rule: Clause, defect: Defect) -> Result<Option<Refutation>> {
        let refs: Vec<&Matrix> = a.inputs.iter().collect();
        let output = apply(self.f, &refs)?;
        let checked = if a.exact_output { output.to_exact()? } else { output.clone() };
        Ok(violation(&checked, self.limit, self.mode.positive(), &self.tol)?.map(|(selector, det, certificate)| {
            Refutation {
                rule,
                defect,
                construction: a.construction,
                inputs: a.inputs,
                output,
                selector,
                det,
                certificate,
                search_trial: a.search_trial,
            }
        }))
    }

    /// Tries each companion scale in turn for TP modes.
    fn with_companions(
        &self,
        rule: Clause,
        defect: Defect,
        construction: &str,
        special: impl Fn() -> Result<Vec<(usize, Matrix)>>,
        grid: (&[f64], &[f64]),
        search_trial: Option<u64>,
    ) -> Result<Option<Refutation>> {
        let scales: &[f64] = if self.mode.positive() { &[1e4, 1e6, 1e9] } else { &[1.0] };
        for &n in scales {
            let inputs = self.tuple(special()?, grid.0, grid.1, n)?;
            let attempt = Attempt {
                construction: construction.to_string(),
                inputs,
                exact_output: false,
                search_trial,
            };
            if let Some(r) = self.evaluate(attempt, rule, defect)? {
                return Ok(Some(r));
            }
        }
        Ok(None)
    }
}

fn exponent(f: &MixedPowerTransform, j: usize) -> f64 {
    f.terms()[j].positive_exponent()
}

fn found(o: SearchOutcome) -> Option<SearchWitness> {
    match o {
        SearchOutcome::Found(w) => Some(*w),
        SearchOutcome::SearchExhausted { .. } => None,
    }
}

/// Builds inputs of the order spec's orders for which F's output fails order
/// min(l, N), following the defect `classify` reports.
pub fn refute(
    f: &MixedPowerTransform,
    spec: &OrderSpec,
    mode: Mode,
    budget: &SearchBudget,
) -> Result<RefutationOutcome> {
    let verdict = classify(f, spec, mode)?;
    let defect = match (verdict.outcome, verdict.defect) {
        (Outcome::Inadmissible, Some(d)) => d,
        (o, _) => {
            return Ok(RefutationOutcome::NotRefuted {
                reason: format!("classified {o:?}; nothing to refute"),
            })
        }
    };
    let n_bound = spec.n();
    let limit = n_bound.finite().map_or(usize::MAX, |v| v as usize);
    let rule = verdict.rule;
    let ctx = Ctx {
        f,
        mode,
        limit,
        tol: Tolerance::default(),
    };
    let positive = mode.positive();
    let symmetric = mode.symmetric();
    let p = f.arity();

    let result: Option<Refutation> = match defect {
        Defect::NotPositive | Defect::NoPositivePower => {
            let v = Matrix::from_int_rows(&[[2, 1], [1, 1]])?;
            let attempt = Attempt {
                construction: "constant output on TP inputs [[2,1],[1,1]]".into(),
                inputs: vec![v; p],
                exact_output: true,
                search_trial: None,
            };
            ctx.evaluate(attempt, rule, defect)?
        }
        Defect::DependsOnLowOrder { index } => {
            if positive {
                let x = index_grid(2);
                ctx.with_companions(
                    rule,
                    defect,
                    "order-1 input [[1,2],[2,1]] with e^{xy/n} companions",
                    || Ok(vec![(index, Matrix::from_int_rows(&[[1, 2], [2, 1]])?)]),
                    (&x, &x),
                    None,
                )?
            } else {
                let inputs = ctx.tuple(vec![(index, Matrix::from_int_rows(&[[0, 1], [1, 0]])?)], &[0.0; 2], &[0.0; 2], 1.0)?;
                let attempt = Attempt {
                    construction: "order-1 input [[0,1],[1,0]] with all-ones companions".into(),
                    inputs,
                    exact_output: false,
                    search_trial: None,
                };
                ctx.evaluate(attempt, rule, defect)?
            }
        }
        Defect::SeveralPowers { first, second } => {
            let (k1, k2, what) = if symmetric {
                let (a, b) = symmetric_pair();
                (a, b, "symmetric 4×4 pair")
            } else {
                let (a, b) = zero_one_pair();
                (a, b, "0-1 pair K and Kᵀ")
            };
            if positive {
                let x = index_grid(k1.rows());
                let mut hit = None;
                for sigma in [0.4, 0.35, 0.45, 0.3] {
                    let (s1, s2) = (smoothed(&k1, sigma, 1e-3)?, smoothed(&k2, sigma, 1e-3)?);
                    let full = |m: &Matrix| tp_order(m, None, &ctx.tol).map(|r| r.full);
                    if !(full(&s1)? && full(&s2)?) {
                        continue;
                    }
                    let label = format!("{what}, smoothed to TP with σ = {sigma}, η = 1e-3");
                    hit = ctx.with_companions(
                        rule,
                        defect,
                        &label,
                        || Ok(vec![(first, s1.clone()), (second, s2.clone())]),
                        (&x, &x),
                        None,
                    )?;
                    if hit.is_some() {
                        break;
                    }
                }
                hit
            } else {
                let n = k1.rows();
                let inputs = ctx.tuple(vec![(first, k1), (second, k2)], &vec![0.0; n], &vec![0.0; n], 1.0)?;
                let attempt = Attempt {
                    construction: format!("{what} with all-ones companions"),
                    inputs,
                    exact_output: false,
                    search_trial: None,
                };
                ctx.evaluate(attempt, rule, defect)?
            }
        }
        Defect::HeavisidePresent { index } => {
            let inputs = ctx.tuple(vec![(index, sqrt2_matrix())], &[0.0; 3], &[0.0; 3], 1.0)?;
            let attempt = Attempt {
                construction: "√2 matrix under the indicator, all-ones companions".into(),
                inputs,
                exact_output: false,
                search_trial: None,
            };
            ctx.evaluate(attempt, rule, defect)?
        }
        Defect::ExponentBelowOne { index, alpha } => {
            if positive {
                // input (1+xy)^{ε/α} is TP^(3); its α-power (1+xy)^ε is not
                let eps = (1.0 + alpha) / 2.0;
                let family = if symmetric {
                    Family::JainPower { alpha: eps, r: 3 }
                } else {
                    Family::JksPower { alpha: eps, r: 3 }
                };
                refute_by_search(&ctx, rule, defect, index, family, eps / alpha, spec.k[index].finite().map(|v| v as usize), budget)?
            } else {
                let inputs = ctx.tuple(vec![(index, sqrt2_matrix())], &[0.0; 3], &[0.0; 3], 1.0)?;
                let attempt = Attempt {
                    construction: "√2 matrix with all-ones companions".into(),
                    inputs,
                    exact_output: false,
                    search_trial: None,
                };
                ctx.evaluate(attempt, rule, defect)?
            }
        }
        Defect::ExponentNotAllowed { index, alpha } => {
            let family = if !symmetric {
                Family::FourByFourPower { alpha }
            } else if rule.part == ClausePart::Four && spec.size_x == Bound::Finite(4) {
                Family::SymmetricTpPower { alpha, size: 4, order: 4 }
            } else {
                Family::SymmetricTpPower {
                    alpha,
                    size: 5,
                    order: limit.min(5),
                }
            };
            match found(search_counterexample(&family, budget)?) {
                None => None,
                Some(w) => {
                    let base = w.base.clone().expect("matrix families carry their base");
                    let x = index_grid(base.rows());
                    ctx.with_companions(
                        rule,
                        defect,
                        &format!("random TP base from {family:?}"),
                        || Ok(vec![(index, base.clone())]),
                        (&x, &x),
                        Some(w.trial),
                    )?
                }
            }
        }
        Defect::OrderTooSmall { index, k } => {
            let alpha = exponent(f, index);
            if rule.part == ClausePart::Three && !positive {
                let (k1, k2) = zero_one_pair();
                let e1 = k1.schur(&k2)?;
                let inputs = ctx.tuple(vec![(index, e1)], &[0.0; 3], &[0.0; 3], 1.0)?;
                let attempt = Attempt {
                    construction: "0-1 matrix [[1,1,0],[1,1,1],[0,1,1]], which is TN^(2)".into(),
                    inputs,
                    exact_output: false,
                    search_trial: None,
                };
                ctx.evaluate(attempt, rule, defect)?
            } else {
                // (1+xy)^δ with δ ∈ (r-3, r-2) has order r-1 ≥ k but not r
                let k = k as usize;
                let r = if rule.part == ClausePart::Three { 3 } else { limit.min(k + 2) };
                let delta = if r == 3 { 0.5 } else { r as f64 - 2.5 };
                if r > 8 {
                    None
                } else {
                    let family = if symmetric || !positive {
                        Family::JainPower { alpha: delta, r }
                    } else {
                        Family::JksPower { alpha: delta, r }
                    };
                    refute_by_search(&ctx, rule, defect, index, family, delta / alpha, Some(k), budget)?
                }
            }
        }
    };
    Ok(match result {
        Some(r) => RefutationOutcome::Refuted(Box::new(r)),
        None => RefutationOutcome::NotRefuted {
            reason: format!("no certified violation for {defect:?} under {rule}"),
        },
    })
}

/// Searches (1+xy)^{target} for a failing grid, then feeds (1+xy)^{gamma} to
/// coordinate `index` on that grid.
fn refute_by_search(
    ctx: &Ctx<'_>,
    rule: Clause,
    defect: Defect,
    index: usize,
    family: Family,
    gamma: f64,
    required: Option<usize>,
    budget: &SearchBudget,
) -> Result<Option<Refutation>> {
    let Some(w) = found(search_counterexample(&family, budget)?) else {
        return Ok(None);
    };
    let (xs, ys) = points_of(&w.matrix);
    let jain = {
        let data = xs.iter().flat_map(|&x| ys.iter().map(move |&y| 1.0 + x * y)).collect();
        Matrix::from_float(xs.len(), ys.len(), data)?
    };
    let input = powered(&jain, gamma)?;
    let need = required.unwrap_or(usize::MAX).min(input.rows()).min(input.cols());
    let rep = if ctx.mode.positive() {
        tp_order(&input, Some(need), &ctx.tol)?
    } else {
        tn_order(&input, Some(need), &ctx.tol)?
    };
    if rep.order < need {
        return Ok(None);
    }
    ctx.with_companions(
        rule,
        defect,
        &format!("(1+xy)^{gamma} on the grid found by {family:?}"),
        || Ok(vec![(index, input.clone())]),
        (&xs, &ys),
        Some(w.trial),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::Term;

    fn fin(v: &[u64]) -> Vec<Bound> {
        v.iter().map(|&x| Bound::Finite(x)).collect()
    }

    fn spec(k: &[u64], l: u64, sx: u64, sy: u64, mode: Mode) -> OrderSpec {
        if mode.symmetric() {
            OrderSpec::symmetric(fin(k), Bound::Finite(l), Bound::Finite(sx))
        } else {
            OrderSpec::new(fin(k), Bound::Finite(l), Bound::Finite(sx), Bound::Finite(sy))
        }
    }

    fn pw(a: f64) -> Term {
        Term::Power { alpha: a }
    }

    fn f(c: i64, terms: Vec<Term>) -> MixedPowerTransform {
        MixedPowerTransform::new(Scalar::int(c), terms).unwrap()
    }

    fn check(f: &MixedPowerTransform, s: OrderSpec, mode: Mode) -> Refutation {
        match refute(f, &s, mode, &SearchBudget::default()).unwrap() {
            RefutationOutcome::Refuted(r) => {
                assert!(r.selector.size() <= s.n().finite().unwrap() as usize);
                *r
            }
            RefutationOutcome::NotRefuted { reason } => panic!("{mode} {s:?} {f:?}: {reason}"),
        }
    }

    #[test]
    fn tn_defects() {
        let r = check(&f(1, vec![pw(1.0), pw(1.0)]), spec(&[1, 3], 2, 3, 3, Mode::Tn), Mode::Tn);
        assert!(matches!(r.defect, Defect::DependsOnLowOrder { index: 0 }));
        assert_eq!(r.det.to_f64(), -1.0);
        let r = check(&f(1, vec![Term::Heaviside, pw(1.0)]), spec(&[3, 3], 3, 3, 3, Mode::Tn), Mode::Tn);
        assert!(matches!(r.defect, Defect::SeveralPowers { .. } | Defect::HeavisidePresent { .. }));
        check(&f(1, vec![pw(1.0), pw(1.0)]), spec(&[3, 3], 3, 3, 3, Mode::Tn), Mode::Tn);
        check(&f(1, vec![pw(0.5)]), spec(&[3], 3, 3, 3, Mode::Tn), Mode::Tn);
        check(&f(1, vec![pw(1.0)]), spec(&[2], 3, 3, 3, Mode::Tn), Mode::Tn);
        check(&f(1, vec![pw(2.0)]), spec(&[4], 4, 4, 4, Mode::Tn), Mode::Tn);
        let r = check(&f(1, vec![pw(1.0)]), spec(&[3], 4, 5, 5, Mode::Tn), Mode::Tn);
        assert!(matches!(r.defect, Defect::OrderTooSmall { k: 3, .. }));
    }

    #[test]
    fn tp_defects() {
        let r = check(&f(0, vec![pw(1.0)]), spec(&[2], 2, 2, 2, Mode::Tp), Mode::Tp);
        assert_eq!(r.defect, Defect::NotPositive);
        let r = check(&f(2, vec![Term::Heaviside]), spec(&[2], 2, 2, 2, Mode::Tp), Mode::Tp);
        assert_eq!(r.defect, Defect::NoPositivePower);
        assert_eq!(r.det, Scalar::int(0));
        check(&f(1, vec![pw(1.0), pw(2.0)]), spec(&[1, 2], 2, 3, 3, Mode::Tp), Mode::Tp);
        check(&f(1, vec![pw(1.0), pw(1.0)]), spec(&[3, 3], 3, 3, 3, Mode::Tp), Mode::Tp);
        check(&f(1, vec![pw(0.5)]), spec(&[3], 3, 3, 3, Mode::Tp), Mode::Tp);
        check(&f(1, vec![pw(1.0)]), spec(&[2], 3, 3, 3, Mode::Tp), Mode::Tp);
        check(&f(1, vec![pw(2.0)]), spec(&[4], 4, 4, 4, Mode::Tp), Mode::Tp);
        check(&f(1, vec![pw(1.0), pw(1.0)]), spec(&[4, 4], 4, 4, 4, Mode::Tp), Mode::Tp);
    }

    #[test]
    fn symmetric_defects() {
        check(&f(1, vec![pw(1.0), pw(1.0)]), spec(&[4, 4], 4, 4, 4, Mode::Stn), Mode::Stn);
        check(&f(1, vec![pw(1.5)]), spec(&[4], 4, 4, 4, Mode::Stn), Mode::Stn);
        check(&f(1, vec![pw(2.0)]), spec(&[4], 4, 5, 5, Mode::Stn), Mode::Stn);
        check(&f(1, vec![pw(3.0)]), spec(&[5], 5, 5, 5, Mode::Stn), Mode::Stn);
        check(&f(1, vec![pw(0.5), pw(1.0)]), spec(&[3, 3], 3, 3, 3, Mode::Stn), Mode::Stn);
        check(&f(1, vec![pw(1.0), pw(1.0)]), spec(&[4, 4], 4, 4, 4, Mode::Stp), Mode::Stp);
        check(&f(1, vec![pw(0.5)]), spec(&[3], 3, 3, 3, Mode::Stp), Mode::Stp);
        check(&f(1, vec![pw(1.0)]), spec(&[2], 3, 3, 3, Mode::Stp), Mode::Stp);
        check(&f(1, vec![pw(1.5)]), spec(&[4], 4, 4, 4, Mode::Stp), Mode::Stp);
    }

    #[test]
    fn admissible_is_not_refuted() {
        let out = refute(&f(1, vec![pw(1.0)]), &spec(&[4], 4, 4, 4, Mode::Tn), Mode::Tn, &SearchBudget::default()).unwrap();
        assert!(out.refutation().is_none());
    }

    #[test]
    fn smoothing_keeps_symmetry_and_positivity() {
        let (k1, _) = symmetric_pair();
        let s = smoothed(&k1, 0.4, 1e-3).unwrap();
        assert!(s.is_symmetric());
        assert!(tp_order(&s, None, &Tolerance::default()).unwrap().full);
    }
}
