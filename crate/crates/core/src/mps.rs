//! Translation-invariant MPS tensors: gauge normalization, injectivity
//! length and the rank of the `Γ_L` coefficient map.

use crate::channel::{transfer_matrix, KrausChannel};
use crate::error::{invalid, Error, Result};
use crate::indices::kraus_rank_index;
use crate::numerics::{
    eigenvalues, orthonormal_extend, psd_sqrt_and_inv_sqrt, ComplexMatrix, SubspaceBasis, TolerancePolicy,
};
use crate::spectral::spectral_report;

/// Largest `phys_d^L` that [`gamma_rank`] will enumerate.
pub const GAMMA_BUDGET: usize = 1_000_000;

/// `phys_d` matrices of size `bond_dim × bond_dim`.
#[derive(Debug, Clone)]
pub struct MpsTensor {
    bond_dim: usize,
    matrices: Vec<ComplexMatrix>,
}

impl MpsTensor {
    /// Checks shapes and that the transfer map has a nonzero spectral radius.
    pub fn new(matrices: Vec<ComplexMatrix>) -> Result<Self> {
        let bond_dim = matrices.first().ok_or_else(|| invalid("MPS tensor needs at least one matrix"))?.rows();
        if bond_dim == 0 {
            return Err(invalid("bond dimension must be positive"));
        }
        for (i, a) in matrices.iter().enumerate() {
            if a.shape() != (bond_dim, bond_dim) {
                return Err(invalid(format!("matrix {i} has shape {:?}, expected {bond_dim}x{bond_dim}", a.shape())));
            }
            if !a.is_finite() {
                return Err(invalid(format!("matrix {i} has non-finite entries")));
            }
        }
        let t = Self { bond_dim, matrices };
        let raw = t.raw_channel(&TolerancePolicy::default())?;
        let radius = eigenvalues(&transfer_matrix(&raw))?.first().map_or(0.0, |z| z.norm());
        if radius.is_nan() || radius <= 0.0 {
            return Err(invalid("transfer map has zero spectral radius"));
        }
        Ok(t)
    }

    /// Physical dimension (number of matrices).
    pub fn phys_d(&self) -> usize {
        self.matrices.len()
    }

    pub fn bond_dim(&self) -> usize {
        self.bond_dim
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    /// The CP map `X ↦ Σ A_i X A_i†` of the tensor as given.
    pub fn raw_channel(&self, pol: &TolerancePolicy) -> Result<KrausChannel> {
        KrausChannel::new(self.matrices.clone(), pol)
    }
}

/// Gauge transform to a trace-preserving tensor
/// `B_i = M^{1/2} A_i M^{-1/2} / √λ`, with `M` the leading eigenvector of
/// the dual transfer map and `λ` its spectral radius. Tensors that are
/// already trace preserving come back unchanged.
pub fn normalize_tensor(t: &MpsTensor, pol: &TolerancePolicy) -> Result<(MpsTensor, KrausChannel)> {
    let raw = t.raw_channel(pol)?;
    if raw.is_tp() {
        return Ok((t.clone(), raw));
    }
    let dual = KrausChannel::new(t.matrices.iter().map(ComplexMatrix::adjoint).collect(), pol)?;
    let rep = spectral_report(&dual, pol)?;
    let m = match rep.fixed_point.as_ref() {
        Some(m) if rep.fixed_point_is_full_rank(pol) => m,
        _ => {
            return Err(Error::GaugeFailure(format!(
                "dual fixed point is rank deficient (min eigenvalue {:E})",
                rep.fixed_point_min_eig
            )))
        }
    };
    let (sqrt, inv_sqrt) = psd_sqrt_and_inv_sqrt(m).map_err(|e| Error::GaugeFailure(e.to_string()))?;
    let s = 1.0 / rep.spectral_radius.sqrt();
    let b: Vec<ComplexMatrix> = t.matrices.iter().map(|a| (&(&sqrt * a) * &inv_sqrt).scale_real(s)).collect();
    let ch = KrausChannel::new(b.clone(), pol)?;
    if !ch.is_tp() {
        return Err(Error::GaugeFailure(format!(
            "normalized tensor misses trace preservation by {:E}",
            ch.tp_deviation()
        )));
    }
    Ok((MpsTensor { bond_dim: t.bond_dim, matrices: b }, ch))
}

/// Outcome of [`injectivity_length_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Injectivity {
    /// Least `L` from which `Γ_L` is injective; `None` if never.
    pub length: Option<usize>,
    /// Whether the span analysis ran on the raw tensor because the gauge
    /// normalization failed.
    pub gauge_failed: bool,
}

/// Injectivity length `i(A)` of the tensor.
pub fn injectivity_length(t: &MpsTensor, pol: &TolerancePolicy) -> Result<Option<usize>> {
    Ok(injectivity_length_report(t, pol)?.length)
}

/// [`injectivity_length`] together with the gauge status.
pub fn injectivity_length_report(t: &MpsTensor, pol: &TolerancePolicy) -> Result<Injectivity> {
    let (ch, gauge_failed) = match normalize_tensor(t, pol) {
        Ok((_, ch)) => (ch, false),
        Err(Error::GaugeFailure(_)) => (t.raw_channel(pol)?, true),
        Err(e) => return Err(e),
    };
    Ok(Injectivity { length: kraus_rank_index(&ch, pol)?, gauge_failed })
}

/// Rank of `X ↦ Σ tr(X A_{i_1}⋯A_{i_L}) |i_1⋯i_L⟩`, from the
/// `phys_d^L × D²` coefficient matrix whose rows are `vec(Pᵀ)` for every
/// length-`L` product `P`.
pub fn gamma_rank(t: &MpsTensor, len: usize, pol: &TolerancePolicy) -> Result<usize> {
    if len == 0 {
        return Err(invalid("L must be positive"));
    }
    let words = word_count(t.phys_d(), len)?;
    let d = t.bond_dim;
    let mut basis = SubspaceBasis::empty(d * d, 1);
    let mut batch = Vec::with_capacity(BATCH);
    // depth-first over words with prefix products on a stack
    let mut stack: Vec<(usize, ComplexMatrix)> = vec![(0, ComplexMatrix::identity(d))];
    let mut seen = 0usize;
    while let Some((depth, prefix)) = stack.pop() {
        if depth == len {
            batch.push(prefix.transpose().vectorize());
            seen += 1;
            if batch.len() == BATCH || seen == words {
                basis = orthonormal_extend(&basis, &batch, pol)?;
                batch.clear();
                if basis.is_full() {
                    break;
                }
            }
            continue;
        }
        for a in t.matrices.iter().rev() {
            stack.push((depth + 1, &prefix * a));
        }
    }
    if !batch.is_empty() {
        basis = orthonormal_extend(&basis, &batch, pol)?;
    }
    Ok(basis.dim())
}

const BATCH: usize = 256;

fn word_count(phys_d: usize, len: usize) -> Result<usize> {
    let too_big = || Error::ResourceLimit(format!("{phys_d}^{len} exceeds the budget of {GAMMA_BUDGET} words"));
    let n = u32::try_from(len).ok().and_then(|l| phys_d.checked_pow(l)).ok_or_else(too_big)?;
    if n > GAMMA_BUDGET {
        return Err(too_big());
    }
    Ok(n)
}

/// Dimension of the kernel of `Γ_L` viewed as a map into the physical
/// space, i.e. `phys_d^L − rank`: the range of the local parent
/// Hamiltonian term.
pub fn kernel_dim(t: &MpsTensor, len: usize, pol: &TolerancePolicy) -> Result<usize> {
    let words = word_count(t.phys_d(), len)?;
    Ok(words - gamma_rank(t, len, pol)?)
}
