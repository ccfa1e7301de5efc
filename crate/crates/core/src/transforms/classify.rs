use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use super::order_spec::{Bound, Mode, OrderSpec};
use super::transform::{MixedPowerTransform, Term};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClausePart {
    One,
    Two,
    TwoA,
    TwoB,
    Three,
    Four,
    Five,
}

impl fmt::Display for ClausePart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClausePart::One => "1",
            ClausePart::Two => "2",
            ClausePart::TwoA => "2a",
            ClausePart::TwoB => "2b",
            ClausePart::Three => "3",
            ClausePart::Four => "4",
            ClausePart::Five => "5",
        })
    }
}

/// One clause of the four decision tables, e.g. `STN(2a)`.
///
/// For TN/TP, part 4 covers every N ≥ 4; for STN/STP, part 5 covers N ≥ 5.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub mode: Mode,
    pub part: ClausePart,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.mode, self.part)
    }
}

impl Serialize for Clause {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Clause {
    /// Every clause of the four tables.
    pub fn all() -> Vec<Clause> {
        use ClausePart::*;
        let mut out = Vec::new();
        for mode in [Mode::Tn, Mode::Tp] {
            for part in [One, Two, Three, Four] {
                out.push(Clause { mode, part });
            }
        }
        for mode in [Mode::Stn, Mode::Stp] {
            for part in [One, TwoA, TwoB, Three, Four, Five] {
                out.push(Clause { mode, part });
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Admissible,
    Inadmissible,
    /// The clause's extra hypothesis fails; the tables give no verdict.
    OutOfScope,
}

/// Why a transform fails its clause. Indices are 0-based coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Defect {
    /// c = 0 in a TP mode.
    NotPositive,
    /// Every exponent is zero in a TP mode.
    NoPositivePower,
    /// F depends on a coordinate whose input is only of order 1.
    DependsOnLowOrder { index: usize },
    SeveralPowers { first: usize, second: usize },
    HeavisidePresent { index: usize },
    ExponentBelowOne { index: usize, alpha: f64 },
    ExponentNotAllowed { index: usize, alpha: f64 },
    OrderTooSmall { index: usize, k: u64 },
}

impl Defect {
    /// The coordinates this defect points at, for reindexing under permutations.
    pub fn reindexed(&self, perm_inverse: &[usize]) -> Defect {
        let m = |i: usize| perm_inverse[i];
        match *self {
            Defect::DependsOnLowOrder { index } => Defect::DependsOnLowOrder { index: m(index) },
            Defect::SeveralPowers { first, second } => {
                let (a, b) = (m(first), m(second));
                Defect::SeveralPowers {
                    first: a.min(b),
                    second: a.max(b),
                }
            }
            Defect::HeavisidePresent { index } => Defect::HeavisidePresent { index: m(index) },
            Defect::ExponentBelowOne { index, alpha } => Defect::ExponentBelowOne { index: m(index), alpha },
            Defect::ExponentNotAllowed { index, alpha } => Defect::ExponentNotAllowed { index: m(index), alpha },
            Defect::OrderTooSmall { index, k } => Defect::OrderTooSmall { index: m(index), k },
            d => d,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationVerdict {
    pub admissible: bool,
    pub outcome: Outcome,
    pub rule: Clause,
    pub n: Bound,
    pub reason: String,
    pub defect: Option<Defect>,
}

/// Facts about F read in a given mode.
struct Facts {
    c_zero: bool,
    /// Coordinates with a positive exponent. In TP modes a Heaviside factor is
    /// t^0 on positive inputs, so it never appears here.
    powers: Vec<(usize, f64)>,
    heavisides: Vec<usize>,
}

impl Facts {
    fn new(f: &MixedPowerTransform, mode: Mode) -> Facts {
        let mut powers = Vec::new();
        let mut heavisides = Vec::new();
        for (j, t) in f.terms().iter().enumerate() {
            match t {
                Term::Power { alpha } if *alpha > 0.0 => powers.push((j, *alpha)),
                Term::Heaviside if !mode.positive() => heavisides.push(j),
                _ => {}
            }
        }
        Facts {
            c_zero: f.c().is_zero(),
            powers,
            heavisides,
        }
    }

    fn constant(&self) -> bool {
        self.c_zero || (self.powers.is_empty() && self.heavisides.is_empty())
    }
}

type Step = std::result::Result<(), Defect>;

fn k_below(k: Bound, min: Bound) -> Option<u64> {
    match k {
        Bound::Finite(v) if k < min => Some(v),
        _ => None,
    }
}

struct Checks<'a> {
    facts: &'a Facts,
    k: &'a [Bound],
}

impl Checks<'_> {
    fn low_order(&self) -> Step {
        for (j, k) in self.k.iter().enumerate() {
            if *k == Bound::Finite(1)
                && (self.facts.powers.iter().any(|(i, _)| *i == j) || self.facts.heavisides.contains(&j))
            {
                return Err(Defect::DependsOnLowOrder { index: j });
            }
        }
        Ok(())
    }

    fn no_power(&self) -> Step {
        if self.facts.powers.is_empty() {
            Err(Defect::NoPositivePower)
        } else {
            Ok(())
        }
    }

    fn several(&self) -> Step {
        match self.facts.powers.as_slice() {
            [(a, _), (b, _), ..] => Err(Defect::SeveralPowers { first: *a, second: *b }),
            _ => Ok(()),
        }
    }

    fn heaviside(&self) -> Step {
        match self.facts.heavisides.first() {
            Some(&index) => Err(Defect::HeavisidePresent { index }),
            None => Ok(()),
        }
    }

    fn below_one(&self) -> Step {
        match self.facts.powers.iter().find(|(_, a)| *a < 1.0) {
            Some(&(index, alpha)) => Err(Defect::ExponentBelowOne { index, alpha }),
            None => Ok(()),
        }
    }

    fn allowed(&self, ok: impl Fn(f64) -> bool) -> Step {
        match self.facts.powers.iter().find(|(_, a)| !ok(*a)) {
            Some(&(index, alpha)) => Err(Defect::ExponentNotAllowed { index, alpha }),
            None => Ok(()),
        }
    }

    fn order_at_least(&self, min: Bound) -> Step {
        for &(j, _) in &self.facts.powers {
            if let Some(k) = k_below(self.k[j], min) {
                return Err(Defect::OrderTooSmall { index: j, k });
            }
        }
        Ok(())
    }
}

enum Decision {
    Admissible(String),
    Inadmissible(Defect),
    OutOfScope(String),
}

fn describe(d: &Defect, n: Bound) -> String {
    match d {
        Defect::NotPositive => "TP targets need c > 0".into(),
        Defect::NoPositivePower => "a constant cannot produce strictly positive minors of size 2".into(),
        Defect::DependsOnLowOrder { index } => {
            format!("F depends on t_{} although its input is only of order 1", index + 1)
        }
        Defect::SeveralPowers { first, second } => format!(
            "t_{} and t_{} both carry positive powers; only one variable may appear at N = {n}",
            first + 1,
            second + 1
        ),
        Defect::HeavisidePresent { index } => {
            format!("indicator factor on t_{} is not allowed at N = {n}", index + 1)
        }
        Defect::ExponentBelowOne { index, alpha } => {
            format!("exponent {alpha} on t_{} is below 1", index + 1)
        }
        Defect::ExponentNotAllowed { index, alpha } => {
            format!("exponent {alpha} on t_{} is not allowed at N = {n}", index + 1)
        }
        Defect::OrderTooSmall { index, k } => {
            format!("input order k_{} = {k} is below N = {n}", index + 1)
        }
    }
}

/// Decides whether `F[-]` maps (order k_1, ..., order k_p) tuples into
/// order-l kernels for the given mode, following the four decision tables.
///
/// For STN(2a)/STP(2a) the tables characterize preservers among all functions
/// by joint monotonicity, mid-convexity and independence from order-1
/// coordinates; mixed power functions meet the first two automatically, so
/// the verdict here reduces to the independence condition.
pub fn classify(f: &MixedPowerTransform, spec: &OrderSpec, mode: Mode) -> Result<ClassificationVerdict> {
    spec.validate()?;
    if spec.p() != f.arity() {
        return Err(Error::MalformedSpec(format!(
            "spec lists {} orders for a transform of arity {}",
            spec.p(),
            f.arity()
        )));
    }
    if spec.symmetric != mode.symmetric() {
        return Err(Error::MalformedSpec(format!(
            "mode {mode} needs symmetric = {}",
            mode.symmetric()
        )));
    }
    let n = spec.n();
    let part = match (mode.symmetric(), n) {
        (_, Bound::Finite(1)) => ClausePart::One,
        (false, Bound::Finite(2)) => ClausePart::Two,
        (true, Bound::Finite(2)) if spec.size_x == Bound::Finite(2) => ClausePart::TwoA,
        (true, Bound::Finite(2)) => ClausePart::TwoB,
        (_, Bound::Finite(3)) => ClausePart::Three,
        (false, _) => ClausePart::Four,
        (true, Bound::Finite(4)) => ClausePart::Four,
        (true, _) => ClausePart::Five,
    };
    let facts = Facts::new(f, mode);
    let ck = Checks { facts: &facts, k: &spec.k };
    let any_k_infinite = spec.k.iter().any(|k| !k.is_finite());
    let x_infinite = !spec.size_x.is_finite();
    let y_infinite = !spec.size_y().is_finite();
    let x_is_4 = spec.size_x == Bound::Finite(4);
    let is_one = |a: f64| a == 1.0;

    let decision = if mode.positive() && facts.c_zero {
        Decision::Inadmissible(Defect::NotPositive)
    } else if part == ClausePart::One {
        Decision::Admissible("every function preserves order 1".into())
    } else if !mode.positive() && part != ClausePart::Two && part != ClausePart::TwoA && part != ClausePart::TwoB && facts.constant() {
        Decision::Admissible("nonnegative constants preserve every order".into())
    } else {
        use ClausePart::*;
        let out_of_scope = match (mode, part) {
            (Mode::Tp, Four) => x_infinite && y_infinite && spec.l.is_finite() && any_k_infinite,
            (Mode::Stp, Four) => x_infinite && any_k_infinite,
            (Mode::Stp, Five) => x_infinite && spec.l.is_finite() && any_k_infinite,
            _ => false,
        };
        if out_of_scope {
            Decision::OutOfScope(format!(
                "{} assumes finite input orders in this configuration",
                Clause { mode, part }
            ))
        } else {
            let steps: Step = match (mode, part) {
                (Mode::Tn | Mode::Stn, Two | TwoA | TwoB) => {
                    if facts.c_zero {
                        Ok(())
                    } else {
                        ck.low_order()
                    }
                }
                (Mode::Tp | Mode::Stp, Two | TwoA | TwoB) => ck.no_power().and_then(|_| ck.low_order()),
                (Mode::Tn, Three) => ck
                    .several()
                    .and_then(|_| ck.heaviside())
                    .and_then(|_| ck.below_one())
                    .and_then(|_| ck.order_at_least(n)),
                (Mode::Tn, _) => ck
                    .several()
                    .and_then(|_| ck.heaviside())
                    .and_then(|_| ck.below_one())
                    .and_then(|_| ck.allowed(is_one))
                    .and_then(|_| ck.order_at_least(n)),
                (Mode::Tp, Three) => ck
                    .no_power()
                    .and_then(|_| ck.several())
                    .and_then(|_| ck.below_one())
                    .and_then(|_| ck.order_at_least(n)),
                (Mode::Tp, _) => ck
                    .no_power()
                    .and_then(|_| ck.several())
                    .and_then(|_| ck.below_one())
                    .and_then(|_| ck.allowed(is_one))
                    .and_then(|_| ck.order_at_least(n)),
                (Mode::Stn, Three) => ck
                    .heaviside()
                    .and_then(|_| ck.below_one())
                    .and_then(|_| ck.order_at_least(n)),
                (Mode::Stp, Three) => ck
                    .no_power()
                    .and_then(|_| ck.below_one())
                    .and_then(|_| ck.order_at_least(n)),
                (Mode::Stn | Mode::Stp, Four | Five) => {
                    let first = if mode == Mode::Stn { ck.heaviside() } else { ck.no_power() };
                    first
                        .and_then(|_| ck.below_one())
                        .and_then(|_| ck.several())
                        .and_then(|_| {
                            if part == Four && x_is_4 {
                                ck.allowed(|a| a == 1.0 || a >= 2.0)
                            } else {
                                ck.allowed(is_one)
                            }
                        })
                        .and_then(|_| ck.order_at_least(n))
                }
                (_, One) => Ok(()),
            };
            match steps {
                Ok(()) => Decision::Admissible(admissible_reason(mode, part, &facts)),
                Err(d) => Decision::Inadmissible(d),
            }
        }
    };
    let rule = Clause { mode, part };
    Ok(match decision {
        Decision::Admissible(reason) => ClassificationVerdict {
            admissible: true,
            outcome: Outcome::Admissible,
            rule,
            n,
            reason,
            defect: None,
        },
        Decision::Inadmissible(d) => ClassificationVerdict {
            admissible: false,
            outcome: Outcome::Inadmissible,
            rule,
            n,
            reason: describe(&d, n),
            defect: Some(d),
        },
        Decision::OutOfScope(reason) => ClassificationVerdict {
            admissible: false,
            outcome: Outcome::OutOfScope,
            rule,
            n,
            reason,
            defect: None,
        },
    })
}

fn admissible_reason(mode: Mode, part: ClausePart, facts: &Facts) -> String {
    use ClausePart::*;
    match part {
        Two | TwoB => "mixed power function; coordinates of order 1 enter only as t^0".into(),
        TwoA => "mixed power function: jointly non-decreasing, multiplicatively mid-convex, \
                 and independent of order-1 coordinates"
            .into(),
        _ if facts.powers.len() > 1 => format!("{mode}: product of powers, each at least 1 with enough input order"),
        _ => format!("{mode}: single power with admissible exponent and input order"),
    }
}
