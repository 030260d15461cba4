//! Persisted witnesses and their re-verification.
//!
//! A certificate is a JSON object
//! `{"kind", "system", "functional"?, "claimed", "residual", "tol", "solver", "data"}`.
//! [`verify`] recomputes residuals from the stored matrices and vectors
//! (eigenvalues, products, traces, LP row sums) and never runs an
//! optimizer. Each check passes within `10·tol·(1 + |claimed|)`.
//!
//! What each kind proves:
//! - `cp-witness`, `extension`: a PSD Choi matrix with the right read-outs,
//!   so `f ∈ M_m(S*)^+`;
//! - `cp-falsifier`: `x ∈ M_n(S)^+` with `⟨v, θ_f^{(n)}(x) v⟩ < 0`;
//! - `cb-norm`: a PSD Paulsen block, an upper bound on `‖θ_f‖_cb`;
//! - `cb-see-saw`, `d-norm`, `bidual`: lower bounds attained at stored points;
//! - `cone-check`: the smallest eigenvalue of an element;
//! - `element-norm`: the operator norm of an element;
//! - `decomposition`: `x = u − v` with norms `≤ claimed`, or, for `+∞`, a
//!   functional vanishing on the cone but not on `x`;
//! - `properness`: spanning positives, or a nonzero `φ` with `±φ` positive;
//! - `wittstock`: four CP contractions recombining to `θ_f`;
//! - `flat-norm`, `order-unit`: primal points with LP duals.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::sync::Arc;

use crate::dualspace::bidual::bidual_matrix;
use crate::dualspace::cbnorm::{paulsen_bound, paulsen_residual};
use crate::dualspace::choi::{output_marginal, readout_residual};
use crate::dualspace::cp::falsify_threshold;
use crate::dualspace::{
    frame_coords, real_rank, theta_apply, wittstock_residuals, BidualReport, ChoiCertificate, ChoiKind, CpReport,
    LinealityWitness, MatrixFunctional, NormReport, WittstockReport, SPAN_RANK_TOL,
};
use crate::error::{Error, Result};
use crate::numkernel::{eig_hermitian, operator_norm, top_singular, vec_inner, ComplexMatrix, HermitianMatrix};
use crate::opsys::json::{complex_from_json, complex_to_json};
use crate::opsys::{
    decomposition::witness_residual, level_frame, matrix_from_json, matrix_to_json, system_from_json, system_to_json,
    ConeReport, DecompositionValue, MatrixElement, OperatorSystem,
};
use crate::scalar_layer::{check_mass_dual, flat_norm_lp, FlatNorm, OrderUnitReport, OrderedSpace};
use crate::Cx;

type M = ComplexMatrix<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    CpWitness,
    Extension,
    CpFalsifier,
    CbNorm,
    CbSeeSaw,
    DNorm,
    ConeCheck,
    ElementNorm,
    Decomposition,
    Properness,
    Wittstock,
    Bidual,
    FlatNorm,
    OrderUnit,
}

impl CertificateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificateKind::CpWitness => "cp-witness",
            CertificateKind::Extension => "extension",
            CertificateKind::CpFalsifier => "cp-falsifier",
            CertificateKind::CbNorm => "cb-norm",
            CertificateKind::CbSeeSaw => "cb-see-saw",
            CertificateKind::DNorm => "d-norm",
            CertificateKind::ConeCheck => "cone-check",
            CertificateKind::ElementNorm => "element-norm",
            CertificateKind::Decomposition => "decomposition",
            CertificateKind::Properness => "properness",
            CertificateKind::Wittstock => "wittstock",
            CertificateKind::Bidual => "bidual",
            CertificateKind::FlatNorm => "flat-norm",
            CertificateKind::OrderUnit => "order-unit",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub method: String,
    pub level: usize,
    pub restarts: usize,
    pub seed: u64,
    pub converged: bool,
}

impl SolverMeta {
    pub fn new(method: impl Into<String>, level: usize) -> Self {
        Self {
            method: method.into(),
            level,
            converged: true,
            ..Default::default()
        }
    }

    pub fn with_search(mut self, restarts: usize, seed: u64) -> Self {
        self.restarts = restarts;
        self.seed = seed;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    /// System JSON; absent for ordered-space certificates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<Value>,
    /// A norm or constant; `null` is `+∞`. Flags are `1` (true) or `0`.
    pub claimed: Option<f64>,
    pub residual: f64,
    pub tol: f64,
    pub solver: SolverMeta,
    pub data: Value,
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("certificate fields serialize")
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        serde_json::from_value(v.clone()).map_err(|e| Error::Json {
            path: "$".into(),
            message: e.to_string(),
        })
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json()).expect("finite values");
        std::fs::write(path, text).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&v)
    }

    fn slack(&self) -> f64 {
        10.0 * self.tol.max(1e-12) * (1.0 + self.claimed.map(f64::abs).unwrap_or(0.0))
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn vec_to_json(v: &[Cx<f64>]) -> Value {
    Value::Array(v.iter().map(|z| complex_to_json(*z)).collect())
}

fn vec_from_json(v: &Value, path: &str) -> Result<Vec<Cx<f64>>> {
    v.as_array()
        .ok_or_else(|| Error::Json {
            path: path.into(),
            message: "expected a list of complex numbers".into(),
        })?
        .iter()
        .enumerate()
        .map(|(i, z)| complex_from_json(z, &format!("{path}[{i}]")))
        .collect()
}

fn element_to_json(x: &MatrixElement<f64>) -> Value {
    json!({"level": x.level(), "matrix": matrix_to_json(x.concrete())})
}

fn base(kind: CertificateKind, sys: &OperatorSystem<f64>, f: Option<&MatrixFunctional<f64>>) -> Certificate {
    Certificate {
        kind,
        system: Some(system_to_json(sys)),
        functional: f.map(MatrixFunctional::to_json),
        claimed: None,
        residual: 0.0,
        tol: 1e-7,
        solver: SolverMeta::default(),
        data: Value::Null,
    }
}

/// Membership or non-membership certificate of `f ∈ M_m(S*)^+`; `None`
/// for an undecided report.
pub fn cp_certificate(f: &MatrixFunctional<f64>, report: &CpReport<f64>, tol: f64) -> Option<Certificate> {
    if let Some(c) = &report.certificate {
        return Some(choi_certificate(f, c, tol, report.method));
    }
    let fal = report.falsifier.as_ref()?;
    let mut cert = base(CertificateKind::CpFalsifier, f.system(), Some(f));
    cert.claimed = Some(0.0);
    cert.tol = tol;
    cert.residual = (-fal.min_eigenvalue).max(0.0);
    cert.solver = SolverMeta::new(report.method, fal.level);
    cert.data = json!({
        "x": element_to_json(&fal.x),
        "vector": vec_to_json(&fal.vector),
        "min_eigenvalue": fal.min_eigenvalue,
    });
    Some(cert)
}

pub fn choi_certificate(f: &MatrixFunctional<f64>, c: &ChoiCertificate<f64>, tol: f64, method: &str) -> Certificate {
    let kind = match c.kind {
        ChoiKind::CpWitness => CertificateKind::CpWitness,
        _ => CertificateKind::Extension,
    };
    let mut cert = base(kind, f.system(), Some(f));
    cert.claimed = Some(1.0);
    cert.tol = tol;
    cert.residual = c.residual;
    cert.solver = SolverMeta::new(method, f.level());
    cert.data = json!({"choi": matrix_to_json(c.choi.as_matrix())});
    cert
}

/// Certificate for a [`NormReport`] of `dual_norm`, `cb_norm_seesaw` or
/// `d_norm` (chosen by `kind`).
pub fn norm_certificate(
    f: &MatrixFunctional<f64>,
    report: &NormReport<f64>,
    kind: CertificateKind,
    seed: u64,
) -> Result<Certificate> {
    let mut cert = base(kind, f.system(), Some(f));
    cert.claimed = finite(report.value);
    cert.tol = report.tol;
    cert.residual = report.residual;
    cert.solver = SolverMeta {
        method: report.method.as_str().into(),
        level: report.level,
        restarts: report.restarts,
        seed,
        converged: report.converged,
    };
    cert.data = match kind {
        CertificateKind::CbNorm => {
            let j = report
                .paulsen
                .as_ref()
                .ok_or_else(|| Error::Invalid("norm report carries no Paulsen block".into()))?;
            json!({"paulsen": matrix_to_json(j.as_matrix())})
        }
        CertificateKind::CbSeeSaw | CertificateKind::DNorm => json!({
            "x": report.witness.as_ref().map(|w| element_to_json(&w.x)),
            "per_level": report.per_level,
        }),
        other => return Err(Error::Invalid(format!("{} is not a norm certificate", other.as_str()))),
    };
    Ok(cert)
}

pub fn cone_certificate(x: &MatrixElement<f64>, report: &ConeReport<f64>, tol: f64) -> Certificate {
    let mut cert = base(CertificateKind::ConeCheck, x.system(), None);
    cert.claimed = Some(if report.member { 1.0 } else { 0.0 });
    cert.tol = tol;
    cert.solver = SolverMeta::new("eigenvalues", x.level());
    cert.data = json!({
        "x": element_to_json(x),
        "min_eigenvalue": report.min_eigenvalue,
        "hermitian_defect": report.hermitian_defect,
    });
    cert
}

pub fn element_norm_certificate(x: &MatrixElement<f64>, tol: f64) -> Certificate {
    let mut cert = base(CertificateKind::ElementNorm, x.system(), None);
    cert.claimed = Some(operator_norm(x.concrete()));
    cert.tol = tol;
    cert.solver = SolverMeta::new("singular-values", x.level());
    cert.data = json!({"x": element_to_json(x)});
    cert
}

/// For an infinite value, `lineality` must hold `P, Q ⪰ 0` with
/// `Tr(F(P + Q)) = 0` on the frame.
pub fn decomposition_certificate(
    x: &MatrixElement<f64>,
    value: &DecompositionValue<f64>,
    lineality: Option<&LinealityWitness>,
    tol: f64,
) -> Certificate {
    let mut cert = base(CertificateKind::Decomposition, x.system(), None);
    cert.claimed = finite(value.value);
    cert.tol = tol;
    cert.residual = value.residual;
    cert.solver = SolverMeta::new(format!("{:?}", value.method).to_lowercase(), x.level());
    let mut data = json!({"x": element_to_json(x), "lower_bound": value.lower_bound});
    if let Some((u, v)) = &value.witness {
        data["u"] = element_to_json(u);
        data["v"] = element_to_json(v);
    } else if let Some(w) = lineality {
        // The functional y ↦ Tr((c ⊗ P) y) vanishes on M_n(S)^+; c = ww* for
        // the eigenvector of [Tr(P x_ij)] with the largest |λ|.
        let n = x.level();
        let d = x.system().ambient_dim();
        let mm = M::from_fn(n, n, |i, j| w.p.matmul(&x.concrete().block(i, j, d, d)).trace());
        let e = eig_hermitian(&HermitianMatrix::from_hermitian_part(&mm));
        let k = if e.max().abs() >= e.min().abs() { n - 1 } else { 0 };
        let col = e.column(k);
        let c = crate::numkernel::outer(&col, &col);
        data["p"] = matrix_to_json(&w.p);
        data["q"] = matrix_to_json(&w.q);
        data["c"] = matrix_to_json(&c);
    }
    cert.data = data;
    cert
}

/// Properness flag with spanning positives (`proper`) or a lineality
/// witness (not proper).
pub fn properness_certificate(
    sys: &Arc<OperatorSystem<f64>>,
    proper: bool,
    samples: &[M],
    lineality: Option<&LinealityWitness>,
    seed: u64,
) -> Result<Certificate> {
    let mut cert = base(CertificateKind::Properness, sys, None);
    cert.claimed = Some(if proper { 1.0 } else { 0.0 });
    cert.solver = SolverMeta::new(if proper { "span-density" } else { "lineality-sdp" }, 1).with_search(0, seed);
    cert.data = if proper {
        json!({"samples": samples.iter().map(matrix_to_json).collect::<Vec<_>>()})
    } else {
        let w = lineality.ok_or_else(|| Error::Invalid("non-properness needs a lineality witness".into()))?;
        json!({"p": matrix_to_json(&w.p), "q": matrix_to_json(&w.q)})
    };
    Ok(cert)
}

pub fn wittstock_certificate(f: &MatrixFunctional<f64>, report: &WittstockReport<f64>, tol: f64) -> Certificate {
    let mut cert = base(CertificateKind::Wittstock, f.system(), Some(f));
    cert.claimed = Some(report.residual());
    cert.tol = tol;
    cert.residual = report.residual();
    cert.solver = SolverMeta::new(report.method, f.level());
    cert.data = json!({
        "parts": report.parts.iter().map(|p| matrix_to_json(p.choi.as_matrix())).collect::<Vec<_>>(),
        "cb_norm": report.cb_norm,
    });
    cert
}

pub fn bidual_certificate(z: &MatrixElement<f64>, report: &BidualReport<f64>, seed: u64) -> Certificate {
    let mut cert = base(CertificateKind::Bidual, z.system(), None);
    cert.claimed = Some(report.report.value);
    cert.tol = report.report.tol;
    cert.residual = report.report.residual;
    cert.solver = SolverMeta {
        method: report.report.method.as_str().into(),
        level: report.report.level,
        restarts: report.report.restarts,
        seed,
        converged: report.report.converged,
    };
    cert.data = json!({
        "z": element_to_json(z),
        "choi": matrix_to_json(report.choi.as_matrix()),
        "n": report.functional_level,
        "per_level": report.report.per_level,
        "element_norm": report.element_norm,
    });
    cert
}

pub fn flat_norm_certificate(space: &OrderedSpace, f: &[f64], r: &FlatNorm, tol: f64) -> Certificate {
    Certificate {
        kind: CertificateKind::FlatNorm,
        system: None,
        functional: None,
        claimed: Some(r.value),
        residual: 0.0,
        tol,
        solver: SolverMeta::new(r.method, 1),
        data: json!({
            "space": space.to_json(),
            "f": f,
            "sign": r.sign,
            "weights": r.weights,
            "lp_point": r.lp_point,
            "duals": r.duals,
        }),
    }
}

pub fn order_unit_certificate(space: &OrderedSpace, u: &[f64], r: &OrderUnitReport, tol: f64) -> Certificate {
    Certificate {
        kind: CertificateKind::OrderUnit,
        system: None,
        functional: None,
        claimed: Some(r.forced_mass),
        residual: 0.0,
        tol,
        solver: SolverMeta::new("lp", 1),
        data: json!({
            "space": space.to_json(),
            "u": u,
            "is_order_unit": r.is_order_unit,
            "tests": r.tests,
            "evidence": r.evidence,
            "normalized": r.normalized_generators,
            "mass_witness": r.mass_witness,
            "mass_weights": r.mass_weights,
            "mass_dual": r.mass_dual,
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub kind: CertificateKind,
    pub ok: bool,
    pub checks: Vec<Check>,
}

struct Checks(Vec<Check>);

impl Checks {
    /// `value ≤ bound` (NaN fails).
    fn le(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.0.push(Check {
            name: name.into(),
            value,
            bound,
            ok: value <= bound,
        });
    }

    fn holds(&mut self, name: impl Into<String>, ok: bool) {
        self.0.push(Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            bound: 1.0,
            ok,
        });
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).filter(|x| !x.is_null()).ok_or_else(|| Error::Json {
        path: format!("data.{key}"),
        message: "missing".into(),
    })
}

fn matrix(v: &Value, key: &str) -> Result<M> {
    matrix_from_json(field(v, key)?, &format!("data.{key}"), None)
}

fn reals(v: &Value, key: &str) -> Result<Vec<f64>> {
    serde_json::from_value(field(v, key)?.clone()).map_err(|e| Error::Json {
        path: format!("data.{key}"),
        message: e.to_string(),
    })
}

fn min_eig(m: &M) -> f64 {
    eig_hermitian(&HermitianMatrix::from_hermitian_part(m)).min()
}

fn max_eig(m: &M) -> f64 {
    eig_hermitian(&HermitianMatrix::from_hermitian_part(m)).max()
}

/// Element of `M_n(S)` stored under `key`; membership failures are checks.
fn element(
    sys: &Arc<OperatorSystem<f64>>,
    v: &Value,
    key: &str,
    checks: &mut Checks,
) -> Result<Option<MatrixElement<f64>>> {
    let e = field(v, key)?;
    let m = matrix_from_json(field(e, "matrix")?, &format!("data.{key}.matrix"), None)?;
    let x = MatrixElement::from_concrete(sys.clone(), &m);
    checks.holds(format!("{key} lies in M_n(S)"), x.is_ok());
    Ok(x.ok())
}

/// Re-verifies a certificate without solving anything.
pub fn verify(cert: &Certificate) -> Result<Verification> {
    let mut checks = Checks(Vec::new());
    let slack = cert.slack();
    let d = &cert.data;
    let sys: Option<Arc<OperatorSystem<f64>>> = match &cert.system {
        Some(s) => Some(Arc::new(system_from_json(s)?)),
        None => None,
    };
    let need_sys = || {
        sys.clone()
            .ok_or_else(|| Error::Invalid("certificate has no system".into()))
    };
    let functional = || -> Result<MatrixFunctional<f64>> {
        let fv = cert
            .functional
            .as_ref()
            .ok_or_else(|| Error::Invalid("certificate has no functional".into()))?;
        MatrixFunctional::from_json(need_sys()?, fv)
    };
    match cert.kind {
        CertificateKind::CpWitness | CertificateKind::Extension => {
            let f = functional()?;
            let c = matrix(d, "choi")?;
            checks.le("choi psd", -min_eig(&c), slack);
            checks.le("read-out", readout_residual(&f, &c), slack);
        }
        CertificateKind::CpFalsifier => {
            let f = functional()?;
            let s = need_sys()?;
            if let Some(x) = element(&s, d, "x", &mut checks)? {
                checks.le("x psd", -min_eig(x.concrete()), slack);
                checks.le("x contraction", operator_norm(x.concrete()), 1.0 + slack);
                let v = vec_from_json(field(d, "vector")?, "data.vector")?;
                let t = theta_apply(&f, &x)?;
                let nv = vec_inner(&v, &v).re;
                let q = if nv > 0.0 {
                    vec_inner(&v, &t.matvec(&v)).re / nv
                } else {
                    0.0
                };
                checks.le("negative direction", q, -falsify_threshold(&f));
            }
        }
        CertificateKind::CbNorm => {
            let f = functional()?;
            let j = matrix(d, "paulsen")?;
            let (dd, m) = (f.system().ambient_dim(), f.level());
            checks.le("paulsen psd", -min_eig(&j), slack);
            checks.le("read-out", paulsen_residual(&f, &j), slack);
            let bound = paulsen_bound(&j, dd, m);
            let claimed = cert.claimed.unwrap_or(f64::INFINITY);
            checks.le("claimed vs marginal bound", (claimed - bound).abs(), slack);
        }
        CertificateKind::CbSeeSaw | CertificateKind::DNorm => {
            let f = functional()?;
            let s = need_sys()?;
            let claimed = cert.claimed.unwrap_or(f64::INFINITY);
            if d.get("x").map(Value::is_null).unwrap_or(true) {
                checks.le("claimed without witness", claimed, slack);
            } else if let Some(x) = element(&s, d, "x", &mut checks)? {
                if cert.kind == CertificateKind::DNorm {
                    checks.le("x psd", -min_eig(x.concrete()), slack);
                }
                checks.le("x contraction", operator_norm(x.concrete()), 1.0 + slack);
                let value = operator_norm(&theta_apply(&f, &x)?);
                checks.le("attained value", (value - claimed).abs(), slack);
            }
            if let Some(levels) = d.get("per_level").and_then(Value::as_array) {
                let running: Vec<f64> = levels.iter().filter_map(|l| l.get("running")?.as_f64()).collect();
                checks.holds("trace nondecreasing", running.windows(2).all(|w| w[1] >= w[0]));
            }
        }
        CertificateKind::ConeCheck => {
            let s = need_sys()?;
            if let Some(x) = element(&s, d, "x", &mut checks)? {
                let lmin = min_eig(x.concrete());
                let recorded = field(d, "min_eigenvalue")?.as_f64().unwrap_or(f64::NAN);
                checks.le("eigenvalue", (lmin - recorded).abs(), slack);
                let member = x.hermitian_defect() <= 1e-9 * (1.0 + x.concrete().max_abs()) && lmin >= -cert.tol;
                checks.holds("flag", member == (cert.claimed == Some(1.0)));
            }
        }
        CertificateKind::ElementNorm => {
            let s = need_sys()?;
            if let Some(x) = element(&s, d, "x", &mut checks)? {
                let claimed = cert.claimed.unwrap_or(f64::INFINITY);
                checks.le("norm", (operator_norm(x.concrete()) - claimed).abs(), slack);
            }
        }
        CertificateKind::Decomposition => {
            let s = need_sys()?;
            let x = element(&s, d, "x", &mut checks)?;
            if let (Some(x), Some(claimed)) = (x, cert.claimed) {
                let u = element(&s, d, "u", &mut checks)?;
                let v = element(&s, d, "v", &mut checks)?;
                if let (Some(u), Some(v)) = (u, v) {
                    checks.le("x = u − v, u, v ⪰ 0", witness_residual(&x, &u, &v), slack);
                    checks.le("‖u‖", operator_norm(u.concrete()), claimed + slack);
                    checks.le("‖v‖", operator_norm(v.concrete()), claimed + slack);
                }
            } else if let Some(x) = element(&s, d, "x", &mut Checks(Vec::new()))? {
                let (p, q, c) = (matrix(d, "p")?, matrix(d, "q")?, matrix(d, "c")?);
                lineality_checks(&s, &p, &q, &mut checks);
                checks.le("c psd", -min_eig(&c), 1e-12);
                let val = c.kron(&p).matmul(x.concrete()).trace().norm();
                checks.le("functional separates x", -val, -100.0 * slack);
            }
        }
        CertificateKind::Properness => {
            let s = need_sys()?;
            if cert.claimed == Some(1.0) {
                let samples = field(d, "samples")?
                    .as_array()
                    .ok_or_else(|| Error::Invalid("samples must be a list".into()))?
                    .iter()
                    .enumerate()
                    .map(|(i, m)| matrix_from_json(m, &format!("data.samples[{i}]"), None))
                    .collect::<Result<Vec<M>>>()?;
                let mut worst = 0.0f64;
                let mut inside = true;
                for m in &samples {
                    worst = worst.max(-min_eig(m));
                    inside &= MatrixElement::from_concrete(s.clone(), m).is_ok();
                }
                checks.holds("samples lie in S", inside);
                checks.le("samples psd", worst, slack);
                let rank = real_rank(&frame_coords(&s, 1, &samples), SPAN_RANK_TOL);
                checks.le("span deficit", (s.dim() - rank.min(s.dim())) as f64, 0.0);
            } else {
                lineality_checks(&s, &matrix(d, "p")?, &matrix(d, "q")?, &mut checks);
            }
        }
        CertificateKind::Wittstock => {
            let f = functional()?;
            let parts = field(d, "parts")?
                .as_array()
                .ok_or_else(|| Error::Invalid("parts must be a list".into()))?
                .iter()
                .enumerate()
                .map(|(i, m)| matrix_from_json(m, &format!("data.parts[{i}]"), None))
                .collect::<Result<Vec<M>>>()?;
            checks.holds("four parts", parts.len() == 4);
            let (recon, psd, cap) = wittstock_residuals(&f, &parts);
            checks.le("reconstruction", recon, slack);
            checks.le("parts psd", psd, slack);
            checks.le("parts contractive", cap, slack);
        }
        CertificateKind::Bidual => {
            let s = need_sys()?;
            if let Some(z) = element(&s, d, "z", &mut checks)? {
                let c = matrix(d, "choi")?;
                let n = field(d, "n")?.as_u64().unwrap_or(0) as usize;
                let dd = s.ambient_dim();
                checks.holds("choi shape", n > 0 && c.rows() == dd * n);
                if n > 0 && c.rows() == dd * n {
                    checks.le("choi psd", -min_eig(&c), slack);
                    checks.le("unit image ≤ 1", max_eig(&output_marginal(&c, dd, n)), 1.0 + slack);
                    let (value, _, _) = top_singular(&bidual_matrix(&z, &c, n));
                    let claimed = cert.claimed.unwrap_or(f64::INFINITY);
                    checks.le("attained value", (value - claimed).abs(), slack);
                }
            }
        }
        CertificateKind::FlatNorm => {
            let space = OrderedSpace::from_json(field(d, "space")?)?;
            let f = reals(d, "f")?;
            let claimed = cert.claimed.unwrap_or(f64::INFINITY);
            let sign = field(d, "sign")?.as_f64().unwrap_or(1.0);
            let fs: Vec<f64> = f.iter().map(|v| sign * v).collect();
            if space.cone().is_empty() {
                checks.le("empty cone value", claimed.abs(), 0.0);
            } else if d.get("duals").map(Value::is_null).unwrap_or(true) {
                // ℓ2 ball: optimality of the cone projection p = Σ w h / ‖·‖.
                let w = reals(d, "weights")?;
                let mut p = vec![0.0; space.dim()];
                for (h, wi) in space.cone().iter().zip(&w) {
                    for (pi, hi) in p.iter_mut().zip(h) {
                        *pi += wi * hi;
                    }
                }
                checks.le("weights nonnegative", -w.iter().fold(0.0f64, |m, v| m.min(*v)), 1e-12);
                let len = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                let proj: Vec<f64> = p.iter().map(|v| v * claimed).collect();
                let r: Vec<f64> = fs.iter().zip(&proj).map(|(a, b)| a - b).collect();
                let kkt = space
                    .cone()
                    .iter()
                    .map(|h| h.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>())
                    .fold(0.0, f64::max);
                checks.le("unit point", (len - 1.0).abs(), slack);
                checks.le("projection optimality", kkt, slack);
            } else {
                let point = reals(d, "lp_point")?;
                let duals: [Vec<f64>; 2] =
                    serde_json::from_value(field(d, "duals")?.clone()).map_err(|e| Error::Json {
                        path: "data.duals".into(),
                        message: e.to_string(),
                    })?;
                let (lp, c) = flat_norm_lp(&space, &fs);
                checks.le("primal feasibility", lp.primal_check(&point), slack);
                let value: f64 = c.iter().zip(&point).map(|(a, b)| a * b).sum();
                checks.le("attained value", (value - claimed).abs(), slack);
                for (name, sgn, y) in [("+f", 1.0, &duals[0]), ("−f", -1.0, &duals[1])] {
                    let fsg: Vec<f64> = f.iter().map(|v| sgn * v).collect();
                    let (lp, c) = flat_norm_lp(&space, &fsg);
                    let (viol, bound) = lp.max_dual_check(&c, y);
                    checks.le(format!("dual feasibility {name}"), viol, slack);
                    checks.le(format!("upper bound {name}"), bound - claimed, slack);
                }
            }
        }
        CertificateKind::OrderUnit => {
            let space = OrderedSpace::from_json(field(d, "space")?)?;
            let u = reals(d, "u")?;
            let gens: Vec<Vec<f64>> = serde_json::from_value(field(d, "normalized")?.clone()).unwrap_or_default();
            let y: Vec<Vec<f64>> = serde_json::from_value(field(d, "mass_dual")?.clone()).unwrap_or_default();
            let claimed = cert.claimed.unwrap_or(f64::INFINITY);
            if !gens.is_empty() {
                let (viol, bound) = check_mass_dual(&space, &gens, &y);
                checks.le("mass dual feasibility", viol, slack);
                checks.le("mass lower bound", claimed - bound, slack);
            }
            let tests: Vec<Vec<f64>> = serde_json::from_value(field(d, "tests")?.clone()).unwrap_or_default();
            let evidence = field(d, "evidence")?.as_array().cloned().unwrap_or_default();
            checks.holds("evidence per test", tests.len() == evidence.len());
            let mut all = true;
            for (i, (t, e)) in tests.iter().zip(&evidence).enumerate() {
                let ok = domination_check(&space, &u, t, e, slack);
                all &= ok.unwrap_or(false);
                checks.holds(format!("test {i}"), ok.is_some());
            }
            let flag = field(d, "is_order_unit")?.as_bool().unwrap_or(false);
            checks.holds("order-unit flag", all == flag);
        }
    }
    let ok = !checks.0.is_empty() && checks.0.iter().all(|c| c.ok);
    Ok(Verification {
        kind: cert.kind,
        ok,
        checks: checks.0,
    })
}

/// `P, Q ⪰ 0`, `Tr(F(P + Q)) = 0` on the frame and `φ = (Tr(F P))_F ≠ 0`.
fn lineality_checks(sys: &OperatorSystem<f64>, p: &M, q: &M, checks: &mut Checks) {
    checks.le("P psd", -min_eig(p), 1e-9);
    checks.le("Q psd", -min_eig(q), 1e-9);
    let frame = level_frame(sys, 1);
    let sum = p.add(q);
    let off = frame.iter().map(|f| f.inner(&sum).norm()).fold(0.0, f64::max);
    let phi = frame.iter().map(|f| f.inner(p).norm().powi(2)).sum::<f64>().sqrt();
    checks.le("±φ agree on S", off, 1e-7);
    checks.le("φ nonzero", -phi, -1e-4);
}

/// `Some(true)` for a valid scale, `Some(false)` for a valid Farkas ray,
/// `None` if the evidence does not check.
fn domination_check(space: &OrderedSpace, u: &[f64], t: &[f64], e: &Value, slack: f64) -> Option<bool> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    match e.get("kind")?.as_str()? {
        "scale" => {
            let alpha = e.get("alpha")?.as_f64()?;
            let w: Vec<f64> = serde_json::from_value(e.get("weights")?.clone()).ok()?;
            if alpha < -slack || w.iter().any(|v| *v < -slack) || w.len() != space.cone().len() {
                return None;
            }
            let ok = (0..space.dim()).all(|i| {
                let cw: f64 = space.cone().iter().zip(&w).map(|(h, wi)| h[i] * wi).sum();
                (alpha * u[i] - t[i] - cw).abs() <= slack
            });
            ok.then_some(true)
        }
        "farkas" => {
            let y: Vec<f64> = serde_json::from_value(e.get("y")?.clone()).ok()?;
            let ok =
                dot(&y, u) >= -slack && space.cone().iter().all(|h| dot(&y, h) <= slack) && dot(&y, t) < -100.0 * slack;
            ok.then_some(false)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_full, build_linfty, build_offdiag_m2};
    use crate::dualspace::{d_norm, dual_cone_lineality, dual_norm, is_cp, CpSettings, DNormSettings};
    use crate::opsys::{cone_membership, decomposition_value};
    use crate::scalar_layer::{flat_norm, order_unit_check};

    fn round_trip(c: &Certificate) -> Verification {
        let back = Certificate::from_json(&serde_json::from_str(&c.to_json().to_string()).unwrap()).unwrap();
        assert_eq!(&back, c);
        verify(&back).unwrap()
    }

    #[test]
    fn norm_certificates_verify() {
        let f = MatrixFunctional::scalar(build_linfty(2).unwrap(), &[1.0, -1.0]).unwrap();
        let cb = dual_norm(&f, 1e-7);
        let v = round_trip(&norm_certificate(&f, &cb, CertificateKind::CbNorm, 1).unwrap());
        assert!(v.ok, "{v:?}");
        let dn = d_norm(
            &f,
            DNormSettings {
                level_max: 2,
                restarts: 4,
                ..Default::default()
            },
        );
        let v = round_trip(&norm_certificate(&f, &dn, CertificateKind::DNorm, 1).unwrap());
        assert!(v.ok, "{v:?}");
    }

    #[test]
    fn tampered_claim_fails() {
        let f = MatrixFunctional::scalar(build_linfty(2).unwrap(), &[1.0, -1.0]).unwrap();
        let cb = dual_norm(&f, 1e-7);
        let mut c = norm_certificate(&f, &cb, CertificateKind::CbNorm, 1).unwrap();
        c.claimed = Some(1.5);
        assert!(!verify(&c).unwrap().ok);
    }

    #[test]
    fn cp_certificates_both_ways() {
        let s = build_full(2).unwrap();
        let tr = MatrixFunctional::trace(s.clone());
        let r = is_cp(&tr, CpSettings::default()).unwrap();
        assert!(round_trip(&cp_certificate(&tr, &r, 1e-7).unwrap()).ok);
        let t = MatrixFunctional::from_map(s, 2, |a| a.transpose()).unwrap();
        let r = is_cp(&t, CpSettings::default()).unwrap();
        let c = cp_certificate(&t, &r, 1e-7).unwrap();
        let v = round_trip(&c);
        assert!(v.ok, "{} {v:?}", c.kind.as_str());
    }

    #[test]
    fn counterexample_certificates() {
        let s = build_offdiag_m2().unwrap();
        let lin = dual_cone_lineality(&s, 1);
        let p = properness_certificate(&s, false, &[], lin.witness.as_ref(), 1).unwrap();
        assert!(round_trip(&p).ok);
        let x = MatrixElement::from_concrete(s.clone(), &M::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()).unwrap();
        let dv = decomposition_value(&x, 1e-7).unwrap();
        assert!(!dv.is_finite());
        let c = decomposition_certificate(&x, &dv, lin.witness.as_ref(), 1e-7);
        let v = round_trip(&c);
        assert!(v.ok, "{v:?}");
        let cone = cone_certificate(&x, &cone_membership(&x, 1e-7), 1e-7);
        assert!(round_trip(&cone).ok);
    }

    #[test]
    fn scalar_certificates() {
        let s = OrderedSpace::linf(3).unwrap();
        let f = [0.5, -2.0, 1.0];
        let r = flat_norm(&f, &s).unwrap();
        assert!(round_trip(&flat_norm_certificate(&s, &f, &r, 1e-9)).ok);
        let l1 = OrderedSpace::l1(3).unwrap();
        let u = [1.0, 1.0, 1.0];
        let r = order_unit_check(&u, &l1).unwrap();
        let v = round_trip(&order_unit_certificate(&l1, &u, &r, 1e-9));
        assert!(v.ok, "{v:?}");
    }
}
