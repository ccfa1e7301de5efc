use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A positive integer or the unbounded token. Serialized as an integer or `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Finite(u64),
    Infinite,
}

impl Bound {
    pub fn is_finite(&self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    pub fn finite(&self) -> Option<u64> {
        match self {
            Bound::Finite(n) => Some(*n),
            Bound::Infinite => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(n) => write!(f, "{n}"),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(n) => s.serialize_u64(*n),
            Bound::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Bound;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a positive integer or \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Bound, E> {
                Ok(Bound::Finite(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Bound, E> {
                u64::try_from(v).map(Bound::Finite).map_err(|_| E::custom(format!("negative order {v}")))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Bound, E> {
                match v.trim().to_ascii_lowercase().as_str() {
                    "inf" | "infinity" | "∞" => Ok(Bound::Infinite),
                    other => other.parse().map(Bound::Finite).map_err(|_| E::custom(format!("bad order {v:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Tn,
    Tp,
    Stn,
    Stp,
}

impl Mode {
    pub fn symmetric(&self) -> bool {
        matches!(self, Mode::Stn | Mode::Stp)
    }

    /// Strict positivity (TP/STP) rather than nonnegativity.
    pub fn positive(&self) -> bool {
        matches!(self, Mode::Tp | Mode::Stp)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Tn => "TN",
            Mode::Tp => "TP",
            Mode::Stn => "STN",
            Mode::Stp => "STP",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s.to_ascii_lowercase().as_str() {
            "tn" => Ok(Mode::Tn),
            "tp" => Ok(Mode::Tp),
            "stn" => Ok(Mode::Stn),
            "stp" => Ok(Mode::Stp),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

/// Orders k_j of the inputs, target order l and domain sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderSpec {
    pub k: Vec<Bound>,
    pub l: Bound,
    pub size_x: Bound,
    #[serde(default)]
    pub size_y: Option<Bound>,
    #[serde(default)]
    pub symmetric: bool,
}

impl OrderSpec {
    pub fn new(k: Vec<Bound>, l: Bound, size_x: Bound, size_y: Bound) -> Self {
        OrderSpec {
            k,
            l,
            size_x,
            size_y: Some(size_y),
            symmetric: false,
        }
    }

    pub fn symmetric(k: Vec<Bound>, l: Bound, size_x: Bound) -> Self {
        OrderSpec {
            k,
            l,
            size_x,
            size_y: None,
            symmetric: true,
        }
    }

    pub fn p(&self) -> usize {
        self.k.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.k.is_empty() {
            return Err(Error::MalformedSpec("k must list at least one order".into()));
        }
        let all = self.k.iter().chain([&self.l, &self.size_x]).chain(self.size_y.iter());
        for b in all {
            if *b == Bound::Finite(0) {
                return Err(Error::MalformedSpec("orders and sizes must be at least 1".into()));
            }
        }
        if self.symmetric {
            if let Some(y) = self.size_y {
                if y != self.size_x {
                    return Err(Error::MalformedSpec(format!(
                        "symmetric spec needs size_y = size_x, got {y} and {}",
                        self.size_x
                    )));
                }
            }
        } else if self.size_y.is_none() {
            return Err(Error::MalformedSpec("size_y is required unless symmetric".into()));
        }
        Ok(())
    }

    pub fn size_y(&self) -> Bound {
        self.size_y.unwrap_or(self.size_x)
    }

    /// N = min(|X|, |Y|, l), or min(|X|, l) when symmetric.
    pub fn n(&self) -> Bound {
        if self.symmetric {
            self.size_x.min(self.l)
        } else {
            self.size_x.min(self.size_y()).min(self.l)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_json() {
        let v: Vec<Bound> = serde_json::from_str(r#"[3, "inf", "∞", "7"]"#).unwrap();
        assert_eq!(v, vec![Bound::Finite(3), Bound::Infinite, Bound::Infinite, Bound::Finite(7)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[3,"inf","inf",7]"#);
        assert!(serde_json::from_str::<Bound>("-1").is_err());
        assert!(Bound::Finite(u64::MAX) < Bound::Infinite);
    }

    #[test]
    fn n_value() {
        let s = OrderSpec::new(vec![Bound::Infinite; 2], Bound::Finite(3), Bound::Finite(5), Bound::Finite(5));
        assert_eq!(s.n(), Bound::Finite(3));
        let s = OrderSpec::symmetric(vec![Bound::Infinite], Bound::Infinite, Bound::Finite(4));
        assert_eq!(s.n(), Bound::Finite(4));
        let s: OrderSpec = serde_json::from_str(r#"{"k":["inf"],"l":"inf","size_x":"inf","size_y":2}"#).unwrap();
        assert_eq!(s.n(), Bound::Finite(2));
    }

    #[test]
    fn malformed() {
        let s = OrderSpec::new(vec![], Bound::Finite(3), Bound::Finite(5), Bound::Finite(5));
        assert!(s.validate().is_err());
        let s = OrderSpec::new(vec![Bound::Finite(0)], Bound::Finite(3), Bound::Finite(5), Bound::Finite(5));
        assert!(s.validate().is_err());
        let mut s = OrderSpec::symmetric(vec![Bound::Infinite], Bound::Finite(3), Bound::Finite(5));
        s.size_y = Some(Bound::Finite(4));
        assert!(s.validate().is_err());
    }
}
