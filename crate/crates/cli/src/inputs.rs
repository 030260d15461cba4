//! Parsing of system, element, functional and map arguments.

use serde_json::{json, Value};
use std::path::Path;

use opsysdual::corpus::parse_system_spec;
use opsysdual::dualspace::{LinearMap, MatrixFunctional};
use opsysdual::numkernel::ComplexMatrix;
use opsysdual::opsys::{matrix_from_json, matrix_to_json, system_to_json, MatrixElement};
use opsysdual::rng::XorShiftRng;
use opsysdual::{Cx, Element, Functional, Matrix, System};

use crate::CliError;

fn invalid(m: impl Into<String>) -> CliError {
    CliError::Invalid(m.into())
}

fn parse_json(text: &str, what: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| invalid(format!("{what}: not valid JSON ({e})")))
}

/// Inline JSON, or the contents of an existing file.
fn json_arg(spec: &str, what: &str) -> Result<Option<Value>, CliError> {
    let t = spec.trim();
    if t.starts_with('[') || t.starts_with('{') {
        return parse_json(t, what).map(Some);
    }
    let path = Path::new(t.strip_prefix('@').unwrap_or(t));
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        return parse_json(&text, what).map(Some);
    }
    Ok(None)
}

fn number(s: &str, what: &str) -> Result<usize, CliError> {
    s.parse()
        .map_err(|_| invalid(format!("{what}: expected a number, got '{s}'")))
}

fn seed(s: &str) -> Result<u64, CliError> {
    crate::parse_seed(s).map_err(invalid)
}

pub fn system(spec: &str) -> Result<System, CliError> {
    Ok(parse_system_spec(spec)?)
}

pub fn system_json(sys: &System) -> Value {
    system_to_json(sys)
}

/// `unit[:n]`, `basis:s`, `random:SEED[:n]`, a concrete matrix in
/// `M_n(M_d)`, `{"level": n, "matrix": ..}`, or a file holding either.
pub fn element(sys: &System, spec: &str) -> Result<Element, CliError> {
    if let Some(v) = json_arg(spec, "element")? {
        let m = match &v {
            Value::Object(o) => matrix_from_json(
                o.get("matrix")
                    .ok_or_else(|| invalid("element object needs a 'matrix' field"))?,
                "matrix",
                None,
            )?,
            other => matrix_from_json(other, "element", None)?,
        };
        let d = sys.ambient_dim();
        if m.rows() != m.cols() || m.rows() % d != 0 {
            return Err(invalid(format!(
                "element is {}x{}, expected a square multiple of {d}",
                m.rows(),
                m.cols()
            )));
        }
        return Ok(MatrixElement::from_concrete(sys.clone(), &m)?);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["unit"] => Ok(MatrixElement::unit(sys.clone(), 1)?),
        ["unit", n] => Ok(MatrixElement::unit(sys.clone(), number(n, "level")?)?),
        ["basis", s] => {
            let s = number(s, "basis index")?;
            let b = sys
                .basis()
                .get(s)
                .ok_or_else(|| invalid(format!("basis index {s} out of range (dim {})", sys.dim())))?;
            Ok(MatrixElement::from_concrete(sys.clone(), b)?)
        }
        ["random", sd] | ["random", sd, _] => {
            let n = parts.get(2).map(|n| number(n, "level")).transpose()?.unwrap_or(1);
            if n == 0 {
                return Err(invalid("level must be at least 1"));
            }
            let mut rng = XorShiftRng::new(seed(sd)?);
            Ok(MatrixElement::random_self_adjoint(sys.clone(), n, &mut rng))
        }
        _ => Err(invalid(format!("unknown element spec '{spec}'"))),
    }
}

pub fn element_json(x: &Element) -> Value {
    json!({"level": x.level(), "matrix": matrix_to_json(x.concrete())})
}

fn entry_map(i: usize, j: usize) -> impl Fn(&Matrix) -> Matrix {
    move |a| ComplexMatrix::from_fn(1, 1, |_, _| a[(i, j)])
}

/// Basis values, functional JSON, a named map, or `random:SEED[:m]`.
pub fn functional(sys: &System, spec: &str) -> Result<Functional, CliError> {
    if let Some(v) = json_arg(spec, "functional")? {
        return functional_from_value(sys, v);
    }
    let d = sys.ambient_dim();
    let parts: Vec<&str> = spec.split(':').collect();
    let f = match parts.as_slice() {
        ["trace"] => MatrixFunctional::trace(sys.clone()),
        ["identity"] => MatrixFunctional::from_map(sys.clone(), d, |a| a.clone())?,
        ["transpose"] => MatrixFunctional::from_map(sys.clone(), d, |a| a.transpose())?,
        ["entry", i, j] => {
            let (i, j) = (number(i, "row")?, number(j, "column")?);
            if i >= d || j >= d {
                return Err(invalid(format!("entry ({i}, {j}) out of range for M_{d}")));
            }
            MatrixFunctional::from_map(sys.clone(), 1, entry_map(i, j))?
        }
        ["random", sd] | ["random", sd, _] => {
            let m = parts.get(2).map(|n| number(n, "level")).transpose()?.unwrap_or(1);
            if m == 0 {
                return Err(invalid("level must be at least 1"));
            }
            let mut rng = XorShiftRng::new(seed(sd)?);
            MatrixFunctional::random_self_adjoint(sys.clone(), m, &mut rng)
        }
        _ => return Err(invalid(format!("unknown functional spec '{spec}'"))),
    };
    Ok(f)
}

fn functional_from_value(sys: &System, v: Value) -> Result<Functional, CliError> {
    match v {
        Value::Array(items) if items.iter().all(|x| x.is_number() || is_pair(x)) => {
            let values = items
                .iter()
                .enumerate()
                .map(|(s, z)| opsysdual::opsys::json::complex_from_json(z, &format!("functional[{s}]")))
                .collect::<opsysdual::Result<Vec<Cx<f64>>>>()?;
            if values.len() != sys.dim() {
                return Err(invalid(format!(
                    "functional has {} values, the system has dimension {}",
                    values.len(),
                    sys.dim()
                )));
            }
            Ok(MatrixFunctional::new(sys.clone(), 1, values)?)
        }
        Value::Array(rows) => {
            let m = rows.len();
            functional_from_value(sys, json!({"system": sys.label(), "level": m, "values": rows}))
        }
        Value::Object(mut o) => {
            o.entry("system").or_insert_with(|| json!(sys.label()));
            Ok(MatrixFunctional::from_json(sys.clone(), &Value::Object(o))?)
        }
        _ => Err(invalid("functional must be a list or an object")),
    }
}

fn is_pair(v: &Value) -> bool {
    v.as_array()
        .map(|a| a.len() == 2 && a.iter().all(Value::is_number))
        .unwrap_or(false)
}

/// `identity`, `transpose`, `diagonal`, or a JSON list of source-basis images.
pub fn linear_map(source: &System, target: &System, spec: &str) -> Result<LinearMap<f64>, CliError> {
    if let Some(v) = json_arg(spec, "map")? {
        let list = v.as_array().ok_or_else(|| invalid("map must be a list of matrices"))?;
        let dt = target.ambient_dim();
        let images = list
            .iter()
            .enumerate()
            .map(|(s, m)| matrix_from_json(m, &format!("map[{s}]"), Some((dt, dt))))
            .collect::<opsysdual::Result<Vec<Matrix>>>()?;
        return Ok(LinearMap::new(source.clone(), target.clone(), images)?);
    }
    let map = match spec {
        "identity" => LinearMap::from_fn(source.clone(), target.clone(), |a| a.clone())?,
        "transpose" => LinearMap::from_fn(source.clone(), target.clone(), |a| a.transpose())?,
        "diagonal" => LinearMap::from_fn(source.clone(), target.clone(), |a| {
            ComplexMatrix::from_fn(
                a.rows(),
                a.cols(),
                |i, j| if i == j { a[(i, i)] } else { Cx::new(0.0, 0.0) },
            )
        })?,
        _ => return Err(invalid(format!("unknown map spec '{spec}'"))),
    };
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn functional_forms_agree() {
        let s = system("linfty:2").unwrap();
        let a = functional(&s, "[1,-1]").unwrap();
        let b = functional(&s, "[[1,0],[-1,0]]").unwrap();
        let c = functional(&s, r#"{"level": 1, "values": [[[[1,0],[-1,0]]]]}"#).unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(a.values(), c.values());
        assert!(functional(&s, "[1,2,3]").is_err());
        assert!(functional(&s, "nonsense").is_err());
    }

    #[test]
    fn elements() {
        let s = system("m:2").unwrap();
        assert_eq!(element(&s, "unit:3").unwrap().level(), 3);
        assert_eq!(element(&s, "random:7:2").unwrap().level(), 2);
        let x = element(&s, "[[0,1],[1,0]]").unwrap();
        assert_eq!(x.level(), 1);
        assert!(element(&s, "[[0,1,0],[1,0,0],[0,0,0]]").is_err());
        let off = system("offdiag-m2").unwrap();
        assert!(element(&off, "[[1,0],[0,0]]").is_err());
    }
}
