//! Linear read-outs of Choi matrices as real constraint rows.

use super::functional::{readout_matrix, MatrixFunctional};
use crate::numkernel::hvec::functional as hfunctional;
use crate::numkernel::{hdim, unhvec, ComplexMatrix, HermitianMatrix};
use crate::scalar::{ci, Cx, Real};

/// Certificate kinds carried by [`ChoiCertificate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChoiKind {
    /// PSD Choi matrix of the map itself (`S = M_d`).
    CpWitness,
    /// PSD Choi matrix of a map on `M_d` restricting to the functional on `S`.
    Extension,
    /// One part of a four-term decomposition.
    WittstockPair,
}

#[derive(Clone, Debug)]
pub struct ChoiCertificate<T: Real> {
    /// `Σ E_ij ⊗ Θ(E_ij)` in `M_d ⊗ M_m`.
    pub choi: HermitianMatrix<T>,
    pub kind: ChoiKind,
    /// Max of the read-out mismatch and `max(0, −λ_min)`.
    pub residual: T,
}

/// One complex read-out `Tr(G C_sub) = target`, where `C_sub` sits at block
/// offset `(row, col)` of a larger Hermitian variable of size `size`.
#[derive(Clone, Debug)]
pub struct Readout<T: Real> {
    pub g: ComplexMatrix<T>,
    pub target: Cx<T>,
}

/// Read-outs of `f` from a `dm × dm` Choi matrix: `Tr((b_sᵀ ⊗ E_lk) C) = f_kl(b_s)`.
pub fn readouts<T: Real>(f: &MatrixFunctional<T>) -> Vec<Readout<T>> {
    let m = f.level();
    let mut out = Vec::with_capacity(m * m * f.system().dim());
    for (s, b) in f.system().basis().iter().enumerate() {
        for k in 0..m {
            for l in 0..m {
                out.push(Readout {
                    g: readout_matrix(b, m, k, l),
                    target: f.value(k, l, s),
                });
            }
        }
    }
    out
}

/// Embeds `g` at `(r0, c0)` of a zero `size × size` matrix.
pub fn place<T: Real>(g: &ComplexMatrix<T>, size: usize, r0: usize, c0: usize) -> ComplexMatrix<T> {
    let mut big = ComplexMatrix::zeros(size, size);
    big.set_submatrix(r0, c0, g);
    big
}

/// Real rows `(Re, Im)` of `Tr(G X)` for Hermitian `X` in hvec coordinates.
pub fn complex_rows<T: Real>(g: &ComplexMatrix<T>) -> (Vec<T>, Vec<T>) {
    (hfunctional(g), hfunctional(&g.scale(-ci::<T>())))
}

/// Largest read-out mismatch of a Choi matrix against `f`.
pub fn readout_residual<T: Real>(f: &MatrixFunctional<T>, choi: &ComplexMatrix<T>) -> T {
    readouts(f)
        .iter()
        .map(|r| (r.g.matmul(choi).trace() - r.target).norm())
        .fold(T::zero(), T::max)
}

/// Orthonormal Hermitian basis `A_a = unhvec(e_a)` of `M_m`, so that
/// `hvec(M)_a = Tr(A_a M)`.
pub fn hvec_basis<T: Real>(m: usize) -> Vec<ComplexMatrix<T>> {
    (0..hdim(m))
        .map(|a| {
            let mut e = vec![T::zero(); hdim(m)];
            e[a] = T::one();
            unhvec(&e, m)
        })
        .collect()
}

/// `Tr_1` over the input factor `M_d` of `M_d ⊗ M_m`.
pub fn output_marginal<T: Real>(c: &ComplexMatrix<T>, d: usize, m: usize) -> ComplexMatrix<T> {
    c.partial_trace_first(d, m)
}
