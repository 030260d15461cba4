//! JSON form of systems and matrices.
//!
//! ```json
//! {"label": "linf2", "ambient_dim": 2, "unital": true,
//!  "basis": [[[[1,0],[0,0]],[[0,0],[0,0]]], ...]}
//! ```
//!
//! Complex entries are `[re, im]` pairs; matrices are lists of rows. Errors
//! name the offending position, e.g. `basis[1][0][2]`.

use serde_json::{json, Value};

use super::system::OperatorSystem;
use crate::error::{Error, Result};
use crate::numkernel::ComplexMatrix;
use crate::scalar::{cx, Cx, Real};

pub(crate) fn err(path: &str, message: impl Into<String>) -> Error {
    Error::Json {
        path: path.to_string(),
        message: message.into(),
    }
}

pub fn complex_to_json<T: Real>(z: Cx<T>) -> Value {
    json!([z.re.as_f64(), z.im.as_f64()])
}

pub fn complex_from_json<T: Real>(v: &Value, path: &str) -> Result<Cx<T>> {
    match v {
        Value::Number(n) => Ok(cx(T::lit(n.as_f64().unwrap_or(f64::NAN)), T::zero())),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0]
                .as_f64()
                .ok_or_else(|| err(&format!("{path}[0]"), "expected a number"))?;
            let im = a[1]
                .as_f64()
                .ok_or_else(|| err(&format!("{path}[1]"), "expected a number"))?;
            if !re.is_finite() || !im.is_finite() {
                return Err(err(path, "non-finite entry"));
            }
            Ok(cx(T::lit(re), T::lit(im)))
        }
        _ => Err(err(path, "expected [re, im]")),
    }
}

pub fn matrix_to_json<T: Real>(m: &ComplexMatrix<T>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| complex_to_json(m[(i, j)])).collect()))
            .collect(),
    )
}

/// Parses a list of rows; `shape` fixes the expected `rows × cols`.
pub fn matrix_from_json<T: Real>(v: &Value, path: &str, shape: Option<(usize, usize)>) -> Result<ComplexMatrix<T>> {
    let rows = v.as_array().ok_or_else(|| err(path, "expected a list of rows"))?;
    let r = rows.len();
    if r == 0 {
        return Err(err(path, "empty matrix"));
    }
    let c = rows[0]
        .as_array()
        .ok_or_else(|| err(&format!("{path}[0]"), "expected a row"))?
        .len();
    if let Some((er, ec)) = shape {
        if r != er {
            return Err(err(path, format!("expected {er} rows, found {r}")));
        }
        if c != ec {
            return Err(err(&format!("{path}[0]"), format!("expected {ec} columns, found {c}")));
        }
    }
    let mut data = Vec::with_capacity(r * c);
    for (i, row) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        let row = row.as_array().ok_or_else(|| err(&rp, "expected a row"))?;
        if row.len() != c {
            return Err(err(&rp, format!("expected {c} columns, found {}", row.len())));
        }
        for (j, z) in row.iter().enumerate() {
            data.push(complex_from_json(z, &format!("{rp}[{j}]"))?);
        }
    }
    ComplexMatrix::from_vec(r, c, data)
}

pub fn system_to_json<T: Real>(sys: &OperatorSystem<T>) -> Value {
    json!({
        "label": sys.label(),
        "ambient_dim": sys.ambient_dim(),
        "unital": sys.is_unital(),
        "basis": sys.basis().iter().map(matrix_to_json).collect::<Vec<_>>(),
    })
}

pub fn system_from_json<T: Real>(v: &Value) -> Result<OperatorSystem<T>> {
    let obj = v.as_object().ok_or_else(|| err("$", "expected an object"))?;
    let label = obj
        .get("label")
        .and_then(Value::as_str)
        .ok_or_else(|| err("label", "expected a string"))?;
    let d = obj
        .get("ambient_dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| err("ambient_dim", "expected a positive integer"))? as usize;
    if d == 0 {
        return Err(err("ambient_dim", "expected a positive integer"));
    }
    let unital = obj
        .get("unital")
        .and_then(Value::as_bool)
        .ok_or_else(|| err("unital", "expected a boolean"))?;
    let basis = obj
        .get("basis")
        .and_then(Value::as_array)
        .ok_or_else(|| err("basis", "expected a list of matrices"))?;
    let mats = basis
        .iter()
        .enumerate()
        .map(|(s, m)| matrix_from_json(m, &format!("basis[{s}]"), Some((d, d))))
        .collect::<Result<Vec<_>>>()?;
    OperatorSystem::new(&mats, unital, label)
}
