//! Rank decisions and eigendecompositions on top of nalgebra's SVD,
//! Schur and Hermitian eigensolvers.

use std::cmp::Ordering;

use nalgebra::linalg::{Schur, SymmetricEigen, SVD};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{ComplexMatrix, C64, ZERO};
use super::tolerance::TolerancePolicy;
use crate::error::{invalid, Error, Result};

const MAX_ITER: usize = 10_000;

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_finite() {
        return Err(invalid("non-finite entries"));
    }
    let svd = SVD::try_new(m.to_nalgebra(), false, false, f64::EPSILON, MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

fn rank_cutoff(m: &ComplexMatrix, sigma_max: f64, pol: &TolerancePolicy) -> f64 {
    pol.rank_rel * sigma_max * m.rows().max(m.cols()) as f64
}

/// Number of singular values above `rank_rel · σ_max · max(rows, cols)`.
pub fn numerical_rank(m: &ComplexMatrix, pol: &TolerancePolicy) -> Result<usize> {
    let s = singular_values(m)?;
    let sigma_max = s.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return Ok(0);
    }
    let cut = rank_cutoff(m, sigma_max, pol);
    Ok(s.iter().filter(|&&x| x > cut).count())
}

/// Orthonormal basis (column vectors) of the right null space, using the same
/// cutoff as [`numerical_rank`].
pub fn null_space(m: &ComplexMatrix, pol: &TolerancePolicy) -> Result<Vec<ComplexMatrix>> {
    if !m.is_finite() {
        return Err(invalid("non-finite entries"));
    }
    let n = m.cols();
    // pad to square so nalgebra returns a full V
    let padded = if m.rows() < n {
        ComplexMatrix::from_fn(n, n, |r, c| if r < m.rows() { m.get(r, c) } else { ZERO })
    } else {
        m.clone()
    };
    let svd = SVD::try_new(padded.to_nalgebra(), false, true, f64::EPSILON, MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let v_t = svd.v_t.as_ref().expect("requested V");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = if sigma_max == 0.0 { f64::INFINITY } else { rank_cutoff(m, sigma_max, pol) };
    let mut out = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= cut || sigma_max == 0.0 {
            // null vector is the conjugate of the k-th row of V†
            let v: Vec<C64> = (0..n).map(|c| v_t[(k, c)].conj()).collect();
            out.push(ComplexMatrix::column(&v));
        }
    }
    Ok(out)
}

/// An eigenvalue with a unit-norm right eigenvector.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: C64,
    pub vector: ComplexMatrix,
}

/// Full eigendecomposition of a square matrix.
///
/// Eigenvalues come from the complex Schur form; eigenvectors from back
/// substitution on the triangular factor. Output is sorted by descending
/// modulus, ties broken by descending real then imaginary part. Each vector
/// has unit norm and its first non-negligible component is real positive.
pub fn eigen(m: &ComplexMatrix) -> Result<Vec<EigenPair>> {
    if !m.is_square() {
        return Err(invalid(format!("eigen needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    if !m.is_finite() {
        return Err(invalid("non-finite entries"));
    }
    let n = m.rows();
    let (q, t) = schur_form(m)?;
    let t_norm = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let small = (f64::EPSILON * t_norm).max(f64::MIN_POSITIVE);

    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = DVector::from_element(n, ZERO);
        y[k] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut s = ZERO;
            for l in j + 1..=k {
                s += t[(j, l)] * y[l];
            }
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() < small {
                denom = C64::new(small, 0.0);
            }
            y[j] = -s / denom;
            let big = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if big > 1e100 {
                y /= C64::new(big, 0.0);
            }
        }
        let v = &q * y;
        let norm = v.norm();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::NumericalFailure("degenerate eigenvector".into()));
        }
        let v: Vec<C64> = v.iter().map(|z| z / norm).collect();
        pairs.push(EigenPair { value: lambda, vector: ComplexMatrix::column(&fix_phase(v)) });
    }
    sort_eigenpairs(&mut pairs, t_norm);
    Ok(pairs)
}

/// Eigenvalues only, same ordering as [`eigen`].
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(invalid("eigenvalues need a square matrix"));
    }
    if !m.is_finite() {
        return Err(invalid("non-finite entries"));
    }
    let (_, t) = schur_form(m)?;
    let t_norm = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut pairs: Vec<EigenPair> =
        (0..m.rows()).map(|k| EigenPair { value: t[(k, k)], vector: ComplexMatrix::zeros(1, 1) }).collect();
    sort_eigenpairs(&mut pairs, t_norm);
    Ok(pairs.into_iter().map(|p| p.value).collect())
}

/// Complex Schur form `m = Q T Q†`.
///
/// QR iteration can stall on permutation-like matrices; on failure the
/// matrix is conjugated by a fixed pseudo-random unitary and retried.
fn schur_form(m: &ComplexMatrix) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let a = m.to_nalgebra();
    if let Some(s) = Schur::try_new(a.clone(), f64::EPSILON, MAX_ITER) {
        return Ok(s.unpack());
    }
    let n = m.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let g = DMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let u = g.qr().q();
    let conj = u.adjoint() * a * &u;
    let (q, t) = Schur::try_new(conj, f64::EPSILON, MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure("Schur iteration did not converge".into()))?
        .unpack();
    Ok((u * q, t))
}

fn fix_phase(mut v: Vec<C64>) -> Vec<C64> {
    let lead = v.iter().copied().find(|z| z.norm() > 1e-10);
    if let Some(z) = lead {
        let phase = z.conj() / z.norm();
        for x in &mut v {
            *x *= phase;
        }
    }
    v
}

fn sort_eigenpairs(pairs: &mut [EigenPair], scale: f64) {
    pairs.sort_by(|a, b| b.value.norm().total_cmp(&a.value.norm()));
    // moduli equal up to rounding form one tie group
    let tol = 1e-10 * scale.max(1.0);
    let mut start = 0;
    while start < pairs.len() {
        let head = pairs[start].value.norm();
        let mut end = start + 1;
        while end < pairs.len() && head - pairs[end].value.norm() <= tol {
            end += 1;
        }
        pairs[start..end].sort_by(|a, b| match b.value.re.total_cmp(&a.value.re) {
            Ordering::Equal => b.value.im.total_cmp(&a.value.im),
            o => o,
        });
        start = end;
    }
}

/// Eigendecomposition of the Hermitian part of `m`: ascending eigenvalues
/// with matching orthonormal eigenvectors.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, Vec<ComplexMatrix>)> {
    if !m.is_square() {
        return Err(invalid("hermitian_eigen needs a square matrix"));
    }
    if !m.is_finite() {
        return Err(invalid("non-finite entries"));
    }
    let h = m.hermitian_part();
    let eig = SymmetricEigen::try_new(h.to_nalgebra(), f64::EPSILON, MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure("Hermitian eigensolver did not converge".into()))?;
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let v: Vec<C64> = (0..n).map(|r| eig.eigenvectors[(r, k)]).collect();
            ComplexMatrix::column(&fix_phase(v))
        })
        .collect();
    Ok((values, vectors))
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// Minimum-norm least-squares solution of `a x = b`, discarding singular
/// values below `rel_cut · σ_max`.
pub fn least_squares(a: &ComplexMatrix, b: &ComplexMatrix, rel_cut: f64) -> Result<ComplexMatrix> {
    if !a.is_finite() || !b.is_finite() {
        return Err(invalid("non-finite entries"));
    }
    let svd = SVD::try_new(a.to_nalgebra(), true, true, f64::EPSILON, MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let x = svd.solve(&b.to_nalgebra(), rel_cut * sigma_max).map_err(|e| Error::NumericalFailure(e.into()))?;
    Ok(ComplexMatrix::from_nalgebra(&x))
}

/// Principal square root and inverse square root of a positive definite
/// matrix. Fails when the smallest eigenvalue is not positive.
pub fn psd_sqrt_and_inv_sqrt(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (vals, vecs) = hermitian_eigen(m)?;
    if vals.first().copied().unwrap_or(0.0) <= 0.0 {
        return Err(Error::NumericalFailure("matrix is not positive definite".into()));
    }
    let n = m.rows();
    let mut sqrt = ComplexMatrix::zeros(n, n);
    let mut inv_sqrt = ComplexMatrix::zeros(n, n);
    for (lam, v) in vals.iter().zip(&vecs) {
        let p = ComplexMatrix::outer(v, v);
        sqrt = &sqrt + &p.scale_real(lam.sqrt());
        inv_sqrt = &inv_sqrt + &p.scale_real(1.0 / lam.sqrt());
    }
    Ok((sqrt, inv_sqrt))
}
