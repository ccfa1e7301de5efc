use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order-preserving piecewise-linear map through anchor pairs.
///
/// Outside the anchors it continues with the slope of the end segment
/// (slope 1 for a single anchor).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Anchors", into = "Anchors")]
pub struct PiecewiseLinearMap {
    inputs: Vec<f64>,
    outputs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Anchors {
    inputs: Vec<f64>,
    outputs: Vec<f64>,
}

impl TryFrom<Anchors> for PiecewiseLinearMap {
    type Error = Error;
    fn try_from(a: Anchors) -> Result<Self> {
        piecewise_linear(&a.inputs, &a.outputs)
    }
}

impl From<PiecewiseLinearMap> for Anchors {
    fn from(m: PiecewiseLinearMap) -> Self {
        Anchors {
            inputs: m.inputs,
            outputs: m.outputs,
        }
    }
}

fn increasing(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1])
}

pub fn piecewise_linear(inputs: &[f64], outputs: &[f64]) -> Result<PiecewiseLinearMap> {
    if inputs.is_empty() || inputs.len() != outputs.len() {
        return Err(Error::InvalidParameter(format!(
            "need equal nonempty anchor tuples, got {} inputs and {} outputs",
            inputs.len(),
            outputs.len()
        )));
    }
    if !increasing(inputs) || !increasing(outputs) {
        return Err(Error::PointsNotIncreasing);
    }
    Ok(PiecewiseLinearMap {
        inputs: inputs.to_vec(),
        outputs: outputs.to_vec(),
    })
}

impl PiecewiseLinearMap {
    pub fn identity() -> Self {
        PiecewiseLinearMap {
            inputs: vec![0.0],
            outputs: vec![0.0],
        }
    }

    fn slope(&self, i: usize) -> f64 {
        (self.outputs[i + 1] - self.outputs[i]) / (self.inputs[i + 1] - self.inputs[i])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.inputs.len();
        if n == 1 {
            return self.outputs[0] + (x - self.inputs[0]);
        }
        let seg = match self.inputs.iter().position(|&a| a > x) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => n - 2,
        };
        self.outputs[seg] + self.slope(seg) * (x - self.inputs[seg])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let m = piecewise_linear(&[1.0, 2.0, 4.0], &[0.5, 1.5, 2.5]).unwrap();
        assert_eq!(m.eval(2.0), 1.5);
        assert_eq!(m.eval(3.0), 2.0);
        assert_eq!(m.eval(6.0), 3.5);
        assert_eq!(m.eval(0.0), -0.5);
        let m = piecewise_linear(&[1.0, 3.0], &[0.0, 1.0]).unwrap();
        assert_eq!(m.eval(2.0), 0.5);
        let id = piecewise_linear(&[0.0, 1.0, 5.0], &[0.0, 1.0, 5.0]).unwrap();
        for x in [0.0, 0.3, 2.0, 5.0] {
            assert_eq!(id.eval(x), x);
        }
        assert_eq!(PiecewiseLinearMap::identity().eval(-7.5), -7.5);
    }

    #[test]
    fn rejects_non_increasing() {
        assert!(piecewise_linear(&[1.0, 1.0], &[0.0, 1.0]).is_err());
        assert!(piecewise_linear(&[1.0, 2.0], &[1.0, 0.0]).is_err());
        assert!(piecewise_linear(&[1.0], &[]).is_err());
        assert!(serde_json::from_str::<PiecewiseLinearMap>(r#"{"inputs":[2,1],"outputs":[0,1]}"#).is_err());
    }
}
