//! Hermitian eigensolvers used by the brute-force oracles.
//!
//! Small problems are diagonalized densely. Larger ones use a restarted
//! block Krylov iteration with Rayleigh–Ritz extraction; the block is wider
//! than the number of requested pairs so degenerate levels come out with
//! their full multiplicity.

use nalgebra::{ComplexField, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Default cap on the dimension of any brute-force diagonalization.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

pub trait LinearOperator<T>: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`; `y` is overwritten.
    fn apply(&self, x: &[T], y: &mut [T]);
}

#[derive(Clone, Debug)]
pub struct EigenOptions {
    pub cap: usize,
    /// Relative residual `‖Ax − λx‖ / max(1, |λ|)` accepted for every returned pair.
    pub tol: f64,
    pub max_restarts: usize,
    /// Problems up to this size are diagonalized densely.
    pub dense_below: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            cap: DEFAULT_DIMENSION_CAP,
            tol: 1e-9,
            max_restarts: 400,
            dense_below: 400,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPairs<T> {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal in the plain Euclidean inner product.
    pub vectors: Vec<Vec<T>>,
}

pub fn lowest_eigenpairs<T, Op>(op: &Op, k: usize, opts: &EigenOptions) -> Result<EigenPairs<T>>
where
    T: ComplexField<RealField = f64> + Copy,
    Op: LinearOperator<T> + ?Sized,
{
    let n = op.dim();
    if n > opts.cap {
        return Err(Error::SizeCap { dimension: n, cap: opts.cap });
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!("requested {k} eigenpairs of a {n}-dimensional operator")));
    }
    if n <= opts.dense_below.max(k + 8) {
        dense(op, k)
    } else {
        block_krylov(op, k, opts)
    }
}

fn dense<T, Op>(op: &Op, k: usize) -> Result<EigenPairs<T>>
where
    T: ComplexField<RealField = f64> + Copy,
    Op: LinearOperator<T> + ?Sized,
{
    let n = op.dim();
    let mut m = DMatrix::<T>::zeros(n, n);
    let mut e = vec![T::zero(); n];
    let mut col = vec![T::zero(); n];
    for j in 0..n {
        e[j] = T::one();
        op.apply(&e, &mut col);
        e[j] = T::zero();
        m.column_mut(j).copy_from_slice(&col);
    }
    let m = (&m + m.adjoint()) * T::from_real(0.5);
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order[..k]
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    Ok(EigenPairs { values, vectors })
}

fn block_krylov<T, Op>(op: &Op, k: usize, opts: &EigenOptions) -> Result<EigenPairs<T>>
where
    T: ComplexField<RealField = f64> + Copy,
    Op: LinearOperator<T> + ?Sized,
{
    let n = op.dim();
    let block = (k + 6).max(8).min(n);
    let steps = 16usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_b0b);
    let mut x = DMatrix::<T>::from_fn(n, block, |_, _| T::from_real(rng.random::<f64>() - 0.5));
    let mut last_residual = f64::INFINITY;

    for _ in 0..opts.max_restarts {
        let mut basis: Option<DMatrix<T>> = None;
        let mut image: Option<DMatrix<T>> = None;
        let mut next = x.clone();
        for _ in 0..steps {
            let q = orthonormalize_against(next, basis.as_ref());
            if q.ncols() == 0 {
                break;
            }
            let aq = apply_block(op, &q);
            next = aq.clone();
            basis = Some(match basis {
                None => q,
                Some(b) => hcat(&b, &q),
            });
            image = Some(match image {
                None => aq,
                Some(b) => hcat(&b, &aq),
            });
            if basis.as_ref().map_or(0, |b| b.ncols()) + block > n {
                break;
            }
        }
        let (v, av) = (basis.expect("nonempty basis"), image.expect("nonempty image"));
        let g = v.adjoint() * &av;
        let g = (&g + g.adjoint()) * T::from_real(0.5);
        let m = g.nrows();
        let eig = g.symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let keep = block.min(order.len());
        let y = DMatrix::<T>::from_fn(m, keep, |r, c| eig.eigenvectors[(r, order[c])]);
        let ritz = &v * &y;
        let aritz = &av * &y;
        let mut worst = 0.0f64;
        for c in 0..k {
            let theta = eig.eigenvalues[order[c]];
            let r = aritz.column(c) - ritz.column(c) * T::from_real(theta);
            worst = worst.max(r.norm() / theta.abs().max(1.0));
        }
        last_residual = worst;
        if worst < opts.tol {
            let values = (0..k).map(|c| eig.eigenvalues[order[c]]).collect();
            let vectors = (0..k).map(|c| ritz.column(c).iter().copied().collect()).collect();
            return Ok(EigenPairs { values, vectors });
        }
        x = ritz;
    }
    Err(Error::Unsupported(format!(
        "eigensolver did not converge (residual {last_residual:.2e})"
    )))
}

fn apply_block<T, Op>(op: &Op, q: &DMatrix<T>) -> DMatrix<T>
where
    T: ComplexField<RealField = f64> + Copy,
    Op: LinearOperator<T> + ?Sized,
{
    use rayon::prelude::*;
    let n = q.nrows();
    let cols: Vec<Vec<T>> = (0..q.ncols())
        .into_par_iter()
        .map(|c| {
            let x: Vec<T> = q.column(c).iter().copied().collect();
            let mut y = vec![T::zero(); n];
            op.apply(&x, &mut y);
            y
        })
        .collect();
    DMatrix::from_fn(n, cols.len(), |r, c| cols[c][r])
}

fn hcat<T: ComplexField + Copy>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let mut out = DMatrix::<T>::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// Block Gram–Schmidt (two passes) followed by modified Gram–Schmidt inside
/// the block; columns that collapse numerically are dropped.
fn orthonormalize_against<T>(mut z: DMatrix<T>, basis: Option<&DMatrix<T>>) -> DMatrix<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    if let Some(v) = basis {
        for _ in 0..2 {
            let coeff = v.adjoint() * &z;
            z -= v * coeff;
        }
    }
    let mut kept: Vec<nalgebra::DVector<T>> = Vec::new();
    for c in 0..z.ncols() {
        let mut col = z.column(c).into_owned();
        let start = col.norm();
        for _ in 0..2 {
            for q in &kept {
                let proj = q.dotc(&col);
                col -= q * proj;
            }
            if let Some(v) = basis {
                let coeff = v.adjoint() * &col;
                col -= v * coeff;
            }
        }
        let nrm = col.norm();
        if nrm > 1e-10 * start.max(1e-300) && nrm > 1e-300 {
            kept.push(col / T::from_real(nrm));
        }
    }
    if kept.is_empty() {
        return DMatrix::zeros(z.nrows(), 0);
    }
    DMatrix::from_columns(&kept)
}
