use serde::Serialize;

use crate::numkernel::HermitianMatrix;
use crate::opsys::MatrixElement;
use crate::scalar::{Cx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    ExtensionSdp,
    SeeSaw,
    LpOracle,
}

impl NormMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormMethod::ExtensionSdp => "extension-sdp",
            NormMethod::SeeSaw => "see-saw",
            NormMethod::LpOracle => "lp-oracle",
        }
    }
}

/// Optimizer of a see-saw sup: `value = Re⟨η, θ(x) ζ⟩`.
#[derive(Clone, Debug)]
pub struct NormWitness<T: Real> {
    pub x: MatrixElement<T>,
    pub zeta: Vec<Cx<T>>,
    pub eta: Vec<Cx<T>>,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct LevelValue {
    pub level: usize,
    /// Best value found at this level.
    pub raw: f64,
    /// Max over levels `≤ level`.
    pub running: f64,
}

#[derive(Clone, Debug)]
pub struct NormReport<T: Real> {
    pub value: T,
    pub method: NormMethod,
    /// Highest level searched (or the functional level for the SDP).
    pub level: usize,
    pub restarts: usize,
    pub tol: T,
    pub per_level: Vec<LevelValue>,
    pub witness: Option<NormWitness<T>>,
    /// Paulsen block `[[J₁, C_Θ], [C_Θ†, J₂]]` for the SDP value.
    pub paulsen: Option<HermitianMatrix<T>>,
    /// Constraint violation of the witness or certificate.
    pub residual: T,
    pub converged: bool,
}

impl<T: Real> NormReport<T> {
    pub(crate) fn trivial(method: NormMethod, level: usize, tol: T) -> Self {
        Self {
            value: T::zero(),
            method,
            level,
            restarts: 0,
            tol,
            per_level: Vec::new(),
            witness: None,
            paulsen: None,
            residual: T::zero(),
            converged: true,
        }
    }
}
