//! Dense-matrix oracles for small lattices.
//!
//! These build the full `N × N` step operator column by column from the
//! matrix-free [`Walk`] and diagonalize it with a complex Schur
//! decomposition. They exist to cross-check the fast paths and are capped
//! in size.

use nalgebra::{DMatrix, DVector, RealField};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::scalar::{Cplx, Real};
use crate::walk::{Walk, WalkConfig};

pub const DEFAULT_DENSE_CAP: usize = 4096;

pub type DenseMatrix<T> = DMatrix<Cplx<T>>;

/// Column `j` is the step applied to the `j`-th basis state.
pub fn dense_operator<T: Real + RealField>(config: &WalkConfig<T>, lattice: &LatticeSpec) -> Result<DenseMatrix<T>> {
    dense_operator_with_cap(config, lattice, DEFAULT_DENSE_CAP)
}

pub fn dense_operator_with_cap<T: Real + RealField>(
    config: &WalkConfig<T>,
    lattice: &LatticeSpec,
    cap: usize,
) -> Result<DenseMatrix<T>> {
    let dim = lattice.num_vertices();
    if dim > cap {
        return Err(Error::DenseCapExceeded { requested: dim, cap });
    }
    let walk = Walk::new(*lattice, *config)?;
    let zero = Cplx::new(T::zero(), T::zero());
    let mut m = DMatrix::from_element(dim, dim, zero);
    let mut column = vec![zero; dim];
    for j in 0..dim {
        column.iter_mut().for_each(|c| *c = zero);
        column[j] = Cplx::new(T::one(), T::zero());
        walk.apply_in_place(&mut column);
        for (i, c) in column.iter().enumerate() {
            m[(i, j)] = *c;
        }
    }
    Ok(m)
}

/// `max |(M†M − I)_ij|`.
pub fn unitarity_residual<T: Real + RealField>(m: &DenseMatrix<T>) -> T {
    let prod = m.adjoint() * m;
    let mut worst = T::zero();
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { T::one() } else { T::zero() };
            let d = (prod[(i, j)] - Cplx::new(target, T::zero())).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn eigenvalues<T: Real + RealField>(m: &DenseMatrix<T>) -> Result<Vec<Cplx<T>>> {
    let eps = T::epsilon() * T::lit(16.0);
    let schur = nalgebra::Schur::try_new(m.clone(), eps, 10_000).ok_or(Error::EigenFailed)?;
    let vals = schur.eigenvalues().ok_or(Error::EigenFailed)?;
    Ok(vals.iter().copied().collect())
}

/// Arguments of the eigenvalues, in `(−π, π]`.
pub fn eigenphases<T: Real + RealField>(m: &DenseMatrix<T>) -> Result<Vec<T>> {
    Ok(eigenvalues(m)?.into_iter().map(|z| crate::spectral::wrap_phase(num_traits::Float::atan2(z.im, z.re))).collect())
}

/// Smallest eigenphase strictly greater than `floor`.
pub fn smallest_positive_eigenphase<T: Real + RealField>(m: &DenseMatrix<T>, floor: T) -> Result<Option<T>> {
    Ok(eigenphases(m)?.into_iter().filter(|&p| p > floor).fold(None, |best, p| match best {
        Some(b) if b <= p => Some(b),
        _ => Some(p),
    }))
}

/// Unit eigenvector for an eigenvalue known to good accuracy, by inverse
/// iteration with a slightly shifted eigenvalue.
pub fn eigenvector_for<T: Real + RealField>(m: &DenseMatrix<T>, eigenvalue: Cplx<T>) -> Result<DVector<Cplx<T>>> {
    let dim = m.nrows();
    let shift = eigenvalue * Cplx::new(T::one() + num_traits::Float::sqrt(T::epsilon()) * T::lit(1e-2), T::zero());
    let mut shifted = m.clone();
    for i in 0..dim {
        shifted[(i, i)] -= shift;
    }
    let lu = shifted.lu();
    let mut x = DVector::from_fn(dim, |i, _| Cplx::new(T::one() + T::lit(0.01) * T::from_usize_lossy(i % 7), T::zero()));
    for _ in 0..3 {
        x = lu.solve(&x).ok_or(Error::EigenFailed)?;
        let norm = num_traits::Float::sqrt(x.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()));
        if norm <= T::zero() || !num_traits::Float::is_finite(norm) {
            return Err(Error::EigenFailed);
        }
        x.iter_mut().for_each(|z| *z /= norm);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{initial_state, step};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn dense_matches_matrix_free_and_is_unitary() {
        let lattice = LatticeSpec::new(2).unwrap();
        let cfg = WalkConfig::<f64>::default();
        let m = dense_operator(&cfg, &lattice).unwrap();
        assert!(unitarity_residual(&m) < 1e-10);
        let s = initial_state::<f64>(lattice);
        let fast = step(&s, &cfg).unwrap();
        let v = DVector::from_column_slice(s.amplitudes());
        let slow = &m * v;
        for (a, b) in fast.amplitudes().iter().zip(slow.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn half_turn_is_signed_permutation() {
        let lattice = LatticeSpec::new(3).unwrap();
        let cfg = WalkConfig::<f64>::unmarked().with_theta(FRAC_PI_2);
        let m = dense_operator(&cfg, &lattice).unwrap();
        // the four swaps compose to the identity on this lattice, so U = −I
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let expected = if i == j { -1.0 } else { 0.0 };
                assert!((m[(i, j)] - Cplx::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cap_enforced() {
        let lattice = LatticeSpec::new(4).unwrap();
        let err = dense_operator_with_cap(&WalkConfig::<f64>::default(), &lattice, 32).unwrap_err();
        assert!(matches!(err, Error::DenseCapExceeded { requested: 64, cap: 32 }));
    }

    #[test]
    fn inverse_iteration_recovers_eigenvector() {
        let lattice = LatticeSpec::new(3).unwrap();
        let m = dense_operator(&WalkConfig::<f64>::default(), &lattice).unwrap();
        let lam = smallest_positive_eigenphase(&m, 1e-9).unwrap().unwrap();
        assert!(lam > 0.0 && lam < PI);
        let z = Cplx::from_polar(1.0, lam);
        let v = eigenvector_for(&m, z).unwrap();
        let r = &m * &v - &v * z;
        assert!(r.norm() < 1e-9);
    }
}
