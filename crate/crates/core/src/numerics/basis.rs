use super::matrix::ComplexMatrix;
use super::tolerance::TolerancePolicy;
use crate::error::{invalid, Result};

/// Orthonormal (Hilbert–Schmidt) basis of a linear subspace of matrices of a
/// fixed shape. Column vectors are the `cols == 1` special case.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    shape: (usize, usize),
    basis: Vec<ComplexMatrix>,
}

impl SubspaceBasis {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self { shape: (rows, cols), basis: Vec::new() }
    }

    /// Orthonormal basis of `span(elements)`.
    pub fn spanned_by(shape: (usize, usize), elements: &[ComplexMatrix], pol: &TolerancePolicy) -> Result<Self> {
        orthonormal_extend(&Self::empty(shape.0, shape.1), elements, pol)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Dimension of the ambient space.
    pub fn ambient_dim(&self) -> usize {
        self.shape.0 * self.shape.1
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    /// Component of `m` orthogonal to the subspace.
    pub fn residual(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut r = m.clone();
        // two Gram–Schmidt sweeps keep the residual orthogonal to working precision
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.hs_inner(&r);
                r = &r - &b.scale(c);
            }
        }
        r
    }

    /// Whether `m` lies in the span, judged with the same cutoff as
    /// [`orthonormal_extend`].
    pub fn contains(&self, m: &ComplexMatrix, pol: &TolerancePolicy) -> bool {
        let n = m.frobenius_norm();
        n == 0.0 || self.residual(m).frobenius_norm() <= pol.rank_rel * n * self.ambient_dim() as f64
    }
}

/// Extends an orthonormal basis by the components of `candidates` that are
/// not already in its span.
///
/// A candidate contributes a new direction when its projection residual
/// exceeds `rank_rel · ‖candidate‖ · ambient_dim`. Candidates whose norm is
/// below `rank_rel` times the largest candidate norm count as zero.
pub fn orthonormal_extend(
    basis: &SubspaceBasis,
    candidates: &[ComplexMatrix],
    pol: &TolerancePolicy,
) -> Result<SubspaceBasis> {
    if let Some(bad) = candidates.iter().find(|c| c.shape() != basis.shape) {
        return Err(invalid(format!("candidate shape {:?} does not match basis shape {:?}", bad.shape(), basis.shape)));
    }
    if candidates.iter().any(|c| !c.is_finite()) {
        return Err(invalid("non-finite candidate"));
    }
    let mut out = basis.clone();
    let ambient = out.ambient_dim() as f64;
    let max_norm = candidates.iter().map(ComplexMatrix::frobenius_norm).fold(0.0, f64::max);
    for c in candidates {
        if out.is_full() {
            break;
        }
        let norm = c.frobenius_norm();
        if norm == 0.0 || norm <= pol.rank_rel * max_norm {
            continue;
        }
        let r = out.residual(c);
        let rn = r.frobenius_norm();
        if rn > pol.rank_rel * norm * ambient {
            out.basis.push(r.scale_real(1.0 / rn));
        }
    }
    Ok(out)
}
