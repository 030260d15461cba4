//! Finite-dimensional ordered spaces `(ℝ^D, K, B)` with a finitely generated
//! cone `K` and a symmetric unit ball `B`.
//!
//! ```json
//! {"dim": 2, "cone": [[1,0],[0,1]], "ball": "linf", "label": "linf2"}
//! ```

use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Ball {
    Linf,
    L1,
    L2,
    /// Vertex list of a symmetric polytope.
    Polytope(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderedSpace {
    dim: usize,
    cone: Vec<Vec<f64>>,
    ball: Ball,
    label: String,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedSpace(msg.into())
}

impl OrderedSpace {
    /// An empty generator list is the cone `{0}`.
    pub fn new(dim: usize, cone: Vec<Vec<f64>>, ball: Ball, label: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(malformed("dimension must be positive"));
        }
        for (i, g) in cone.iter().enumerate() {
            if g.len() != dim {
                return Err(malformed(format!(
                    "generator {i} has length {}, expected {dim}",
                    g.len()
                )));
            }
            if g.iter().any(|v| !v.is_finite()) || g.iter().all(|v| *v == 0.0) {
                return Err(malformed(format!("generator {i} is zero or non-finite")));
            }
        }
        if let Ball::Polytope(vs) = &ball {
            if vs.is_empty() {
                return Err(malformed("polytope ball has no vertices"));
            }
            for (i, v) in vs.iter().enumerate() {
                if v.len() != dim || v.iter().any(|x| !x.is_finite()) {
                    return Err(malformed(format!(
                        "ball vertex {i} has the wrong length or non-finite entries"
                    )));
                }
                let has_neg = vs
                    .iter()
                    .any(|w| w.iter().zip(v).all(|(a, b)| (a + b).abs() <= 1e-9 * (1.0 + b.abs())));
                if !has_neg {
                    return Err(malformed(format!("ball is not symmetric: −vertex {i} is missing")));
                }
            }
        }
        Ok(Self {
            dim,
            cone,
            ball,
            label: label.into(),
        })
    }

    /// `ℓ∞^N` with its positive orthant.
    pub fn linf(n: usize) -> Result<Self> {
        Self::new(n, unit_vectors(n), Ball::Linf, format!("linf:{n}"))
    }

    /// Dual of `ℓ∞^N`: `ℓ₁^N` with the positive orthant.
    pub fn l1(n: usize) -> Result<Self> {
        Self::new(n, unit_vectors(n), Ball::L1, format!("l1:{n}"))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cone(&self) -> &[Vec<f64>] {
        &self.cone
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Gauge of a tagged ball; `None` for polytopes (see [`super::gauge`]).
    pub fn ball_norm(&self, x: &[f64]) -> Option<f64> {
        match &self.ball {
            Ball::Linf => Some(x.iter().fold(0.0f64, |s, v| s.max(v.abs()))),
            Ball::L1 => Some(x.iter().map(|v| v.abs()).sum()),
            Ball::L2 => Some(x.iter().map(|v| v * v).sum::<f64>().sqrt()),
            Ball::Polytope(_) => None,
        }
    }

    /// `sup{|f·x| : x ∈ B}`, the dual norm of `f`.
    pub fn dual_ball_norm(&self, f: &[f64]) -> f64 {
        match &self.ball {
            Ball::Linf => f.iter().map(|v| v.abs()).sum(),
            Ball::L1 => f.iter().fold(0.0f64, |s, v| s.max(v.abs())),
            Ball::L2 => f.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Ball::Polytope(vs) => vs.iter().map(|v| super::simplex::dot(f, v).abs()).fold(0.0, f64::max),
        }
    }

    pub fn to_json(&self) -> Value {
        let ball = match &self.ball {
            Ball::Linf => json!("linf"),
            Ball::L1 => json!("l1"),
            Ball::L2 => json!("l2"),
            Ball::Polytope(vs) => json!(vs),
        };
        json!({"dim": self.dim, "cone": self.cone, "ball": ball, "label": self.label})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let err = |path: &str, msg: &str| Error::Json {
            path: path.into(),
            message: msg.into(),
        };
        let dim = v
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| err("dim", "expected a positive integer"))?;
        let rows = |val: &Value, path: &str| -> Result<Vec<Vec<f64>>> {
            let arr = val.as_array().ok_or_else(|| err(path, "expected a list of vectors"))?;
            arr.iter()
                .enumerate()
                .map(|(i, r)| {
                    r.as_array()
                        .ok_or_else(|| err(&format!("{path}[{i}]"), "expected a list of numbers"))?
                        .iter()
                        .enumerate()
                        .map(|(j, x)| {
                            x.as_f64()
                                .ok_or_else(|| err(&format!("{path}[{i}][{j}]"), "expected a number"))
                        })
                        .collect()
                })
                .collect()
        };
        let cone = rows(v.get("cone").ok_or_else(|| err("cone", "missing"))?, "cone")?;
        let ball = match v.get("ball") {
            Some(Value::String(s)) => match s.as_str() {
                "linf" => Ball::Linf,
                "l1" => Ball::L1,
                "l2" => Ball::L2,
                _ => return Err(err("ball", "expected \"linf\", \"l1\", \"l2\" or a vertex list")),
            },
            Some(vs @ Value::Array(_)) => Ball::Polytope(rows(vs, "ball")?),
            _ => return Err(err("ball", "expected \"linf\", \"l1\", \"l2\" or a vertex list")),
        };
        let label = v.get("label").and_then(Value::as_str).unwrap_or("space");
        Self::new(dim as usize, cone, ball, label)
    }
}

pub(crate) fn unit_vectors(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let s = OrderedSpace::new(
            2,
            vec![vec![1.0, 1.0], vec![1.0, -1.0]],
            Ball::Polytope(vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]),
            "diamond",
        )
        .unwrap();
        assert_eq!(OrderedSpace::from_json(&s.to_json()).unwrap(), s);
        assert_eq!(
            OrderedSpace::from_json(&OrderedSpace::linf(3).unwrap().to_json())
                .unwrap()
                .ball(),
            &Ball::Linf
        );
    }

    #[test]
    fn validation() {
        assert!(OrderedSpace::new(2, vec![vec![0.0, 0.0]], Ball::Linf, "z").is_err());
        assert!(OrderedSpace::new(2, vec![], Ball::Polytope(vec![vec![1.0, 0.0]]), "asym").is_err());
        let e = OrderedSpace::from_json(&json!({"dim": 2, "cone": [[1, "x"]], "ball": "linf"})).unwrap_err();
        assert!(matches!(e, Error::Json { path, .. } if path == "cone[0][1]"));
    }
}
