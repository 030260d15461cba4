//! Products of (optionally capped) PSD blocks with nonnegative and free reals.

use super::eig::{clip, eig_hermitian, eig_hermitian_from, HermitianMatrix};
use super::hvec::{hdim, hvec_into, unhvec};
use super::matrix::ComplexMatrix;
use crate::scalar::Real;

/// One Hermitian block: `0 ⪯ X` and, with a cap, `X ⪯ cap·I`.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdBlock<T: Real> {
    pub dim: usize,
    pub cap: Option<T>,
}

/// Layout: PSD blocks in hvec coordinates, then `nonneg` reals, then `free` reals.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeSpec<T: Real> {
    pub blocks: Vec<PsdBlock<T>>,
    pub nonneg: usize,
    pub free: usize,
}

impl<T: Real> ConeSpec<T> {
    pub fn psd(dims: &[usize]) -> Self {
        Self {
            blocks: dims.iter().map(|&dim| PsdBlock { dim, cap: None }).collect(),
            nonneg: 0,
            free: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| hdim(b.dim)).sum::<usize>() + self.nonneg + self.free
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.blocks.len() + 1);
        let mut o = 0;
        for b in &self.blocks {
            off.push(o);
            o += hdim(b.dim);
        }
        off.push(o);
        off
    }

    pub fn block_matrix(&self, v: &[T], k: usize) -> ComplexMatrix<T> {
        let off = self.offsets();
        unhvec(&v[off[k]..off[k + 1]], self.blocks[k].dim)
    }
}

/// Projects onto a [`ConeSpec`], reusing eigenvectors between calls.
#[derive(Clone, Debug)]
pub struct ConeProjector<T: Real> {
    spec: ConeSpec<T>,
    offsets: Vec<usize>,
    cache: Vec<Option<ComplexMatrix<T>>>,
}

impl<T: Real> ConeProjector<T> {
    pub fn new(spec: ConeSpec<T>) -> Self {
        let offsets = spec.offsets();
        let cache = vec![None; spec.blocks.len()];
        Self { spec, offsets, cache }
    }

    pub fn spec(&self) -> &ConeSpec<T> {
        &self.spec
    }

    /// Projects in place; returns the smallest eigenvalue seen before clipping.
    pub fn project(&mut self, v: &mut [T]) -> T {
        let mut lmin = T::infinity();
        for (k, blk) in self.spec.blocks.iter().enumerate() {
            let seg = &mut v[self.offsets[k]..self.offsets[k + 1]];
            if blk.dim == 1 {
                lmin = lmin.min(seg[0]);
                seg[0] = clip(seg[0], blk.cap);
                continue;
            }
            let h = HermitianMatrix::from_raw(unhvec(seg, blk.dim));
            let e = match &self.cache[k] {
                Some(g) => eig_hermitian_from(&h, g),
                None => eig_hermitian(&h),
            };
            lmin = lmin.min(e.min());
            let p = e.reconstruct_with(|l| clip(l, blk.cap));
            self.cache[k] = Some(e.vectors);
            hvec_into(&p, seg);
        }
        let base = *self.offsets.last().unwrap_or(&0);
        for x in v[base..base + self.spec.nonneg].iter_mut() {
            lmin = lmin.min(*x);
            *x = x.max(T::zero());
        }
        lmin
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::hvec::hvec;

    #[test]
    fn capped_projection_clips_spectrum() {
        let spec = ConeSpec {
            blocks: vec![PsdBlock { dim: 2, cap: Some(1.0) }],
            nonneg: 1,
            free: 1,
        };
        let mut p = ConeProjector::new(spec);
        let m = ComplexMatrix::<f64>::diag_real(&[3.0, -2.0]);
        let mut v = hvec(&m);
        v.push(-1.0);
        v.push(-7.0);
        let lmin = p.project(&mut v);
        assert_eq!(lmin, -2.0);
        assert_eq!(&v[..2], &[1.0, 0.0]);
        assert_eq!(v[4], 0.0);
        assert_eq!(v[5], -7.0);
    }
}
