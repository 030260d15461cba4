//! Builders for the named systems, a seeded random generator, and the
//! manifest used by the verification suite.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numkernel::ComplexMatrix;
use crate::opsys::{make_system, system_from_json, system_to_json};
use crate::rng::XorShiftRng;
use crate::scalar::{creal, Real};
use crate::System;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "seed")]
pub enum Provenance {
    PaperExample,
    Builder,
    Random(u64),
    UserFile,
}

/// Properties a verification run is expected to confirm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExpectedProperties {
    pub unital: Option<bool>,
    pub dualizable: Option<bool>,
    pub dual_cone_proper: Option<bool>,
    pub dim: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub system: System,
    pub provenance: Provenance,
    pub expected: ExpectedProperties,
}

impl CorpusEntry {
    fn new(system: System, provenance: Provenance) -> Self {
        Self {
            system,
            provenance,
            expected: ExpectedProperties::default(),
        }
    }

    fn expect(mut self, e: ExpectedProperties) -> Self {
        self.expected = e;
        self
    }

    pub fn label(&self) -> &str {
        self.system.label()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "label": self.label(),
            "provenance": self.provenance,
            "expected": self.expected,
            "system": system_to_json(&self.system),
        })
    }
}

fn units(n: usize) -> Vec<ComplexMatrix<f64>> {
    (0..n).map(|i| ComplexMatrix::unit(n, i, i)).collect()
}

/// Diagonal matrices in `M_N`.
pub fn build_linfty(n: usize) -> Result<System> {
    if n == 0 {
        return Err(Error::Invalid("linfty needs N ≥ 1".into()));
    }
    make_system(&units(n), true, format!("linfty:{n}"))
}

/// All of `M_d`.
pub fn build_full(d: usize) -> Result<System> {
    if d == 0 {
        return Err(Error::Invalid("full algebra needs d ≥ 1".into()));
    }
    let gens: Vec<_> = (0..d * d).map(|k| ComplexMatrix::unit(d, k / d, k % d)).collect();
    make_system(&gens, true, format!("m:{d}"))
}

/// Toeplitz matrices in `M_n`: span of `Shift^k`, `|k| ≤ n − 1`.
pub fn build_toeplitz(n: usize) -> Result<System> {
    if n == 0 {
        return Err(Error::Invalid("toeplitz needs n ≥ 1".into()));
    }
    let mut gens = vec![ComplexMatrix::identity(n)];
    for k in 1..n {
        let up = ComplexMatrix::from_fn(n, n, |r, c| if c == r + k { creal(1.0) } else { creal(0.0) });
        gens.push(up.transpose());
        gens.push(up);
    }
    make_system(&gens, true, format!("toeplitz:{n}"))
}

/// `span{E_ii} ∪ {E_ij : i ~ j}` for a symmetric adjacency matrix; the
/// diagonal of `adjacency` is ignored.
pub fn build_graph_system(adjacency: &[Vec<bool>]) -> Result<System> {
    let d = adjacency.len();
    if d == 0 {
        return Err(Error::Invalid("graph needs at least one vertex".into()));
    }
    for (i, row) in adjacency.iter().enumerate() {
        if row.len() != d {
            return Err(Error::shape("adjacency row", d, row.len()));
        }
        for j in 0..i {
            if row[j] != adjacency[j][i] {
                return Err(Error::AsymmetricAdjacency(i, j));
            }
        }
    }
    let mut gens = units(d);
    let mut edges = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            if adjacency[i][j] {
                gens.push(ComplexMatrix::unit(d, i, j));
                gens.push(ComplexMatrix::unit(d, j, i));
                edges.push(format!("{i}-{j}"));
            }
        }
    }
    make_system(&gens, true, format!("graph:{d}:[{}]", edges.join(",")))
}

/// Path graph on `d` vertices.
pub fn path_adjacency(d: usize) -> Vec<Vec<bool>> {
    (0..d).map(|i| (0..d).map(|j| i.abs_diff(j) == 1).collect()).collect()
}

/// `span{E₁₂, E₂₁}`: no nonzero positive elements at any level.
pub fn build_offdiag_m2() -> Result<System> {
    make_system(
        &[ComplexMatrix::unit(2, 0, 1), ComplexMatrix::unit(2, 1, 0)],
        false,
        "offdiag-m2",
    )
}

/// `span{E₁₂ + E₂₁}`: one-dimensional, cone `{0}`.
pub fn build_symmetric_offdiag() -> Result<System> {
    let m = ComplexMatrix::unit(2, 0, 1).add(&ComplexMatrix::unit(2, 1, 0));
    make_system(&[m], false, "sym-offdiag-m2")
}

/// The non-unital counterexamples and the full algebras `M_d`, `d ≤ 3`.
pub fn build_counterexamples() -> Result<Vec<CorpusEntry>> {
    let mut out = vec![
        CorpusEntry::new(build_offdiag_m2()?, Provenance::PaperExample).expect(ExpectedProperties {
            unital: Some(false),
            dualizable: Some(false),
            dual_cone_proper: Some(false),
            dim: Some(2),
        }),
        CorpusEntry::new(build_symmetric_offdiag()?, Provenance::PaperExample).expect(ExpectedProperties {
            unital: Some(false),
            dualizable: Some(false),
            dual_cone_proper: Some(false),
            dim: Some(1),
        }),
    ];
    for d in 1..=3 {
        out.push(
            CorpusEntry::new(build_full(d)?, Provenance::PaperExample).expect(ExpectedProperties {
                unital: Some(true),
                dualizable: Some(true),
                dual_cone_proper: Some(true),
                dim: Some(d * d),
            }),
        );
    }
    Ok(out)
}

/// Random Hermitian `d × d`: entries uniform on `[−1, 1]` (real and
/// imaginary parts drawn in row-major order), then `(A + A†)/2`.
pub fn random_hermitian<T: Real>(d: usize, rng: &mut XorShiftRng) -> ComplexMatrix<T> {
    let a = ComplexMatrix::from_fn(d, d, |_, _| rng.complex::<T>());
    a.hermitian_part()
}

/// Span of `k` seeded random Hermitian matrices, plus `I` when `unital`.
pub fn random_system(seed: u64, d: usize, k: usize, unital: bool) -> Result<System> {
    if d == 0 {
        return Err(Error::Invalid("random system needs d ≥ 1".into()));
    }
    let max = d * d - usize::from(unital);
    if k > max {
        return Err(Error::TooManyGenerators { k, d, max });
    }
    let mut rng = XorShiftRng::new(seed);
    let mut gens = Vec::with_capacity(k + 1);
    if unital {
        gens.push(ComplexMatrix::identity(d));
    }
    gens.extend((0..k).map(|_| random_hermitian::<f64>(d, &mut rng)));
    make_system(
        &gens,
        unital,
        format!("random:{seed}:{d}:{k}:{}", if unital { "u" } else { "n" }),
    )
}

/// Every built-in entry, in manifest order.
pub fn corpus() -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for n in 1..=3 {
        let proper = ExpectedProperties {
            unital: Some(true),
            dualizable: Some(true),
            dual_cone_proper: Some(true),
            dim: Some(n),
        };
        let prov = if n == 3 {
            Provenance::PaperExample
        } else {
            Provenance::Builder
        };
        out.push(CorpusEntry::new(build_linfty(n)?, prov).expect(proper));
    }
    for n in 2..=3 {
        out.push(
            CorpusEntry::new(build_toeplitz(n)?, Provenance::Builder).expect(ExpectedProperties {
                unital: Some(true),
                dim: Some(2 * n - 1),
                ..Default::default()
            }),
        );
    }
    out.push(
        CorpusEntry::new(build_graph_system(&path_adjacency(3))?, Provenance::Builder).expect(ExpectedProperties {
            unital: Some(true),
            dim: Some(7),
            ..Default::default()
        }),
    );
    out.extend(build_counterexamples()?);
    out.push(CorpusEntry::new(random_system(1, 3, 3, false)?, Provenance::Random(1)));
    Ok(out)
}

/// Manifest listing every entry with provenance and expectations.
pub fn manifest() -> Result<Value> {
    Ok(Value::Array(corpus()?.iter().map(CorpusEntry::to_json).collect()))
}

/// Reads a system file written by [`write_system`].
pub fn read_system(path: &std::path::Path) -> Result<CorpusEntry> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let sys = system_from_json(&v)?;
    Ok(CorpusEntry::new(std::sync::Arc::new(sys), Provenance::UserFile))
}

pub fn write_system(system: &System, path: &std::path::Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&system_to_json(system)).expect("values are finite");
    std::fs::write(path, text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

/// Resolves a command-line system spec: `linfty:N`, `m:D`, `toeplitz:N`,
/// `path:N`, `graph:N:i-j,k-l`, `offdiag-m2`, `sym-offdiag-m2`,
/// `random:SEED:D:K[:u]`, or a path to a system JSON file.
pub fn parse_system_spec(spec: &str) -> Result<System> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::Invalid(format!("expected a number in system spec '{spec}', got '{s}'")))
    };
    match parts.as_slice() {
        ["linfty", n] => build_linfty(num(n)?),
        ["m", d] => build_full(num(d)?),
        ["toeplitz", n] => build_toeplitz(num(n)?),
        ["path", n] => build_graph_system(&path_adjacency(num(n)?)),
        ["graph", n, edges] => {
            let d = num(n)?;
            let mut adj = vec![vec![false; d]; d];
            for e in edges.split(',').filter(|e| !e.is_empty()) {
                let (a, b) = e
                    .split_once('-')
                    .ok_or_else(|| Error::Invalid(format!("edge '{e}' is not of the form i-j")))?;
                let (a, b) = (num(a)?, num(b)?);
                if a >= d || b >= d {
                    return Err(Error::Invalid(format!("edge '{e}' out of range")));
                }
                adj[a][b] = true;
                adj[b][a] = true;
            }
            build_graph_system(&adj)
        }
        ["offdiag-m2"] => build_offdiag_m2(),
        ["sym-offdiag-m2"] => build_symmetric_offdiag(),
        ["random", seed, d, k] => random_system(num(seed)? as u64, num(d)?, num(k)?, false),
        ["random", seed, d, k, "u"] => random_system(num(seed)? as u64, num(d)?, num(k)?, true),
        _ => {
            let p = std::path::Path::new(spec);
            if p.exists() {
                read_system(p).map(|e| e.system)
            } else {
                Err(Error::Invalid(format!("unknown system spec '{spec}'")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ComplexMatrix as M;

    #[test]
    fn linfty_shapes() {
        let s1 = build_linfty(1).unwrap();
        assert_eq!((s1.dim(), s1.ambient_dim()), (1, 1));
        let s2 = build_linfty(2).unwrap();
        assert!(s2.contains(&M::identity(2)) && s2.contains(&M::diag_real(&[1.0, -1.0])));
        assert_eq!(s2.dim(), 2);
    }

    #[test]
    fn toeplitz_dimensions() {
        for n in 1..=4 {
            let s = build_toeplitz(n).unwrap();
            assert_eq!(s.dim(), 2 * n - 1);
            assert!(s.is_unital());
        }
    }

    #[test]
    fn graph_systems() {
        let empty = build_graph_system(&[vec![false, false], vec![false, false]]).unwrap();
        assert_eq!(empty.dim(), 2);
        assert!(empty.is_algebra());
        let k2 = build_graph_system(&[vec![false, true], vec![true, false]]).unwrap();
        assert_eq!(k2.dim(), 4);
        let p3 = build_graph_system(&path_adjacency(3)).unwrap();
        assert_eq!((p3.dim(), p3.ambient_dim()), (7, 3));
        assert!(p3.is_unital());
        let bad = build_graph_system(&[vec![false, true], vec![false, false]]);
        assert_eq!(bad.unwrap_err(), Error::AsymmetricAdjacency(1, 0));
    }

    #[test]
    fn counterexamples() {
        let c = build_counterexamples().unwrap();
        assert_eq!(c[0].expected.dual_cone_proper, Some(false));
        assert_eq!(c[1].system.dim(), 1);
        assert!(c
            .iter()
            .any(|e| e.label() == "m:2" && e.expected.dualizable == Some(true)));
    }

    #[test]
    fn random_systems() {
        let a = random_system(0, 2, 1, true).unwrap();
        assert_eq!(a.dim(), 2);
        assert!(a.is_unital());
        let b = random_system(0, 2, 1, true).unwrap();
        assert_eq!(a.basis(), b.basis());
        let c = random_system(1, 3, 3, false).unwrap();
        assert_eq!(c.dim(), 3);
        assert!(matches!(
            random_system(0, 2, 4, true),
            Err(Error::TooManyGenerators { .. })
        ));
    }

    #[test]
    fn specs() {
        assert_eq!(parse_system_spec("linfty:3").unwrap().dim(), 3);
        assert_eq!(parse_system_spec("graph:3:0-1,1-2").unwrap().dim(), 7);
        assert_eq!(parse_system_spec("offdiag-m2").unwrap().dim(), 2);
        assert!(parse_system_spec("nonsense").is_err());
    }
}
