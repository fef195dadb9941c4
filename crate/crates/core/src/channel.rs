//! Completely positive maps in Kraus form.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numerics::{hermitian_eigen, numerical_rank, operator_norm, ComplexMatrix, TolerancePolicy, C64, ZERO};

/// A CP map `X ↦ Σ A_k X A_k†` on `D×D` matrices.
///
/// The stored Kraus list is always reduced: its elements are pairwise
/// Hilbert–Schmidt orthogonal and nonzero, so `d()` equals the number of
/// linearly independent Kraus operators. The reduction preserves the map.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
    is_tp: bool,
    tp_deviation: f64,
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub is_cp: bool,
    pub is_tp: bool,
    pub tp_deviation: f64,
    pub d_independent: usize,
}

impl KrausChannel {
    /// Builds a channel from an arbitrary Kraus list and reduces it.
    pub fn new(kraus: Vec<ComplexMatrix>, pol: &TolerancePolicy) -> Result<Self> {
        let dim = kraus.first().ok_or_else(|| invalid("at least one Kraus operator is required"))?.rows();
        for (k, a) in kraus.iter().enumerate() {
            if a.shape() != (dim, dim) {
                return Err(invalid(format!("Kraus operator {k} has shape {:?}, expected {dim}x{dim}", a.shape())));
            }
            if !a.is_finite() {
                return Err(invalid(format!("Kraus operator {k} has non-finite entries")));
            }
        }
        let reduced = reduce_kraus(kraus, pol)?;
        if reduced.is_empty() {
            return Err(invalid("all Kraus operators vanish"));
        }
        let tp_deviation = tp_deviation(dim, &reduced)?;
        Ok(Self { dim, kraus: reduced, is_tp: tp_deviation <= pol.tp_abs, tp_deviation })
    }

    /// [`KrausChannel::new`] under the default tolerances.
    pub fn from_kraus(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(kraus, &TolerancePolicy::default())
    }

    /// Hilbert space dimension `D`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of independent Kraus operators `d = dim S_1`.
    pub fn d(&self) -> usize {
        self.kraus.len()
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn is_tp(&self) -> bool {
        self.is_tp
    }

    pub fn tp_deviation(&self) -> f64 {
        self.tp_deviation
    }

    /// The channel with every Kraus operator scaled by `s`.
    pub fn scaled(&self, s: f64, pol: &TolerancePolicy) -> Result<Self> {
        Self::new(self.kraus.iter().map(|k| k.scale_real(s)).collect(), pol)
    }

    /// The dual map `X ↦ Σ A_k† X A_k` in Kraus form.
    pub fn dual(&self, pol: &TolerancePolicy) -> Result<Self> {
        Self::new(self.kraus.iter().map(ComplexMatrix::adjoint).collect(), pol)
    }
}

/// Hilbert–Schmidt orthogonalization that keeps the map intact: with
/// `G = U Λ U†` the Gram matrix of the input, `B_m = Σ_k U_{km} A_k`.
fn reduce_kraus(kraus: Vec<ComplexMatrix>, pol: &TolerancePolicy) -> Result<Vec<ComplexMatrix>> {
    let n = kraus.len();
    let gram = ComplexMatrix::from_fn(n, n, |j, k| kraus[j].hs_inner(&kraus[k]));
    let max_diag = (0..n).map(|k| gram.get(k, k).re).fold(0.0, f64::max);
    if max_diag == 0.0 {
        return Ok(Vec::new());
    }
    let cutoff = pol.rank_rel * max_diag * n as f64;
    let off_diag = (0..n)
        .flat_map(|j| (0..n).filter(move |&k| k != j).map(move |k| (j, k)))
        .map(|(j, k)| gram.get(j, k).norm())
        .fold(0.0, f64::max);
    if off_diag <= 1e-14 * max_diag {
        return Ok(kraus
            .into_iter()
            .enumerate()
            .filter(|(k, _)| gram.get(*k, *k).re > cutoff)
            .map(|(_, a)| a)
            .collect());
    }
    let (vals, vecs) = hermitian_eigen(&gram)?;
    let dim = kraus[0].rows();
    let mut out = Vec::new();
    for (lam, u) in vals.iter().zip(&vecs).rev() {
        if *lam <= cutoff {
            continue;
        }
        let mut b = ComplexMatrix::zeros(dim, dim);
        for (k, a) in kraus.iter().enumerate() {
            let c = u.get(k, 0);
            if c != ZERO {
                b = &b + &a.scale(c);
            }
        }
        out.push(b);
    }
    Ok(out)
}

fn tp_deviation(dim: usize, kraus: &[ComplexMatrix]) -> Result<f64> {
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for a in kraus {
        sum = &sum + &(&a.adjoint() * a);
    }
    operator_norm(&(&sum - &ComplexMatrix::identity(dim)))
}

/// Reports trace preservation and the independent Kraus count.
pub fn validate(ch: &KrausChannel, pol: &TolerancePolicy) -> ValidationReport {
    ValidationReport {
        is_cp: true,
        is_tp: ch.tp_deviation <= pol.tp_abs,
        tp_deviation: ch.tp_deviation,
        d_independent: ch.d(),
    }
}

/// `Σ_k A_k X A_k†`.
pub fn apply(ch: &KrausChannel, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.shape() != (ch.dim, ch.dim) {
        return Err(invalid(format!("input has shape {:?}, channel acts on {}x{}", x.shape(), ch.dim, ch.dim)));
    }
    let mut out = ComplexMatrix::zeros(ch.dim, ch.dim);
    for a in &ch.kraus {
        out = &out + &(&(a * x) * &a.adjoint());
    }
    Ok(out)
}

/// Choi matrix `(id ⊗ E)(Ω)` with `Ω = Σ |ii⟩⟨jj|`.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub dim: usize,
    pub matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn rank(&self, pol: &TolerancePolicy) -> Result<usize> {
        numerical_rank(&self.matrix, pol)
    }
}

/// Builds the Choi matrix; entry `((i,a),(j,b))` is `E(|i⟩⟨j|)_{ab}`.
pub fn choi(ch: &KrausChannel) -> ChoiMatrix {
    let d = ch.dim;
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for a in &ch.kraus {
        // v(i, a) = A[a, i] is (id ⊗ A)|Ω⟩
        let v: Vec<C64> = (0..d * d).map(|idx| a.get(idx % d, idx / d)).collect();
        let v = ComplexMatrix::column(&v);
        m = &m + &ComplexMatrix::outer(&v, &v);
    }
    ChoiMatrix { dim: d, matrix: m }
}

/// Matrix of `X ↦ E(X)` on row-major vectorized operators: `Σ A_k ⊗ conj(A_k)`.
pub fn transfer_matrix(ch: &KrausChannel) -> ComplexMatrix {
    let d = ch.dim;
    let mut t = ComplexMatrix::zeros(d * d, d * d);
    for a in &ch.kraus {
        t = &t + &a.kron(&a.conj());
    }
    t
}

/// `E^n` in Kraus form with at most `D²` operators, read off the
/// eigendecomposition of the Choi matrix of `E^n`.
pub fn power_reduced(ch: &KrausChannel, n: usize, pol: &TolerancePolicy) -> Result<KrausChannel> {
    if n == 0 {
        return Err(invalid("power must be at least 1"));
    }
    if n == 1 {
        return Ok(ch.clone());
    }
    let d = ch.dim;
    let tn = transfer_matrix(ch).pow(n);
    // reshuffle: choi[(i,a),(j,b)] = T^n[(a,b),(i,j)]
    let choi = ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, a) = (r / d, r % d);
        let (j, b) = (c / d, c % d);
        tn.get(a * d + b, i * d + j)
    });
    let (vals, vecs) = hermitian_eigen(&choi)?;
    let top = vals.last().copied().unwrap_or(0.0);
    if top.is_nan() || top <= 0.0 {
        return Err(Error::NumericalFailure(format!("E^{n} has a vanishing Choi matrix")));
    }
    let kraus: Vec<ComplexMatrix> = vals
        .iter()
        .zip(&vecs)
        .rev()
        .filter(|(lam, _)| **lam > pol.psd_rel * top)
        .map(|(lam, v)| ComplexMatrix::from_fn(d, d, |a, i| v.get(i * d + a, 0) * lam.sqrt()))
        .collect();
    KrausChannel::new(kraus, pol)
}

/// Nonnegative `D×D` matrix whose columns sum to one, acting as `p' = S p`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl StochasticMatrix {
    /// Validates nonnegativity and column sums (within `tp_abs`).
    pub fn new(rows: Vec<Vec<f64>>, pol: &TolerancePolicy) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(invalid("stochastic matrix must be square and nonempty"));
        }
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                if !x.is_finite() || x < 0.0 {
                    return Err(invalid(format!("entry ({i}, {j}) = {x} is not a nonnegative number")));
                }
            }
        }
        for j in 0..dim {
            let s: f64 = rows.iter().map(|r| r[j]).sum();
            if (s - 1.0).abs() > pol.tp_abs {
                return Err(invalid(format!("column {j} sums to {s}, expected 1")));
            }
        }
        Ok(Self { dim, entries: rows.into_iter().flatten().collect() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Support pattern `a_ij > 0`.
    pub fn pattern(&self) -> Vec<Vec<bool>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j) > 0.0).collect()).collect()
    }

    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j) * p[j]).sum()).collect()
    }
}

/// Kraus operators `√a_ij |i⟩⟨j|`, one per positive entry (row-major order).
pub fn classical_embed(s: &StochasticMatrix, pol: &TolerancePolicy) -> Result<KrausChannel> {
    let d = s.dim;
    let mut kraus = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let a = s.get(i, j);
            if a > 0.0 {
                kraus.push(ComplexMatrix::unit(d, i, j).scale_real(a.sqrt()));
            }
        }
    }
    KrausChannel::new(kraus, pol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{eigenvalues, pauli_matrices, ONE};

    fn pol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn pauli_channel() -> KrausChannel {
        let s = 1.0 / 3f64.sqrt();
        KrausChannel::from_kraus(pauli_matrices().iter().map(|p| p.scale_real(s)).collect()).unwrap()
    }

    fn fully_depolarizing() -> KrausChannel {
        let mut k = vec![ComplexMatrix::identity(2).scale_real(0.5)];
        k.extend(pauli_matrices().iter().map(|p| p.scale_real(0.5)));
        KrausChannel::from_kraus(k).unwrap()
    }

    #[test]
    fn pauli_validation() {
        let r = validate(&pauli_channel(), &pol());
        assert!(r.is_tp && r.is_cp);
        assert_eq!(r.d_independent, 3);
    }

    #[test]
    fn shift_chord_is_not_tp() {
        let a0 = ComplexMatrix::from_fn(3, 3, |r, c| if r == (c + 1) % 3 { ONE } else { ZERO });
        let a1 = ComplexMatrix::unit(3, 1, 2);
        let ch = KrausChannel::from_kraus(vec![a0, a1]).unwrap();
        let r = validate(&ch, &pol());
        assert!(!r.is_tp);
        // Σ A†A = 1 + |2⟩⟨2|
        assert!((r.tp_deviation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_is_tp() {
        let [x, ..] = pauli_matrices();
        let r = validate(&KrausChannel::from_kraus(vec![x]).unwrap(), &pol());
        assert!(r.is_tp);
        assert_eq!(r.d_independent, 1);
    }

    #[test]
    fn mismatched_kraus_dims() {
        let err = KrausChannel::from_kraus(vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)]);
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn reduction_merges_dependent_kraus() {
        let id = ComplexMatrix::identity(2);
        let ch = KrausChannel::from_kraus(vec![id.scale_real(0.6), id.scale_real(0.8)]).unwrap();
        assert_eq!(ch.d(), 1);
        assert!(ch.is_tp());
        let x = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert!(apply(&ch, &x).unwrap().max_abs_diff(&x) < 1e-14);
    }

    #[test]
    fn apply_examples() {
        let rho0 = ComplexMatrix::unit(2, 0, 0);
        let out = apply(&fully_depolarizing(), &rho0).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-14);
        let out = apply(&pauli_channel(), &rho0).unwrap();
        let want = ComplexMatrix::diag(&[C64::new(1.0 / 3.0, 0.0), C64::new(2.0 / 3.0, 0.0)]);
        assert!(out.max_abs_diff(&want) < 1e-14);
        let id = KrausChannel::from_kraus(vec![ComplexMatrix::identity(2)]).unwrap();
        let x = ComplexMatrix::from_real_rows(&[&[0.3, -1.0], &[2.0, 7.0]]).unwrap();
        assert!(apply(&id, &x).unwrap().max_abs_diff(&x) == 0.0);
        assert!(apply(&id, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn choi_ranks() {
        let id = KrausChannel::from_kraus(vec![ComplexMatrix::identity(2)]).unwrap();
        assert_eq!(choi(&id).rank(&pol()).unwrap(), 1);
        assert_eq!(choi(&pauli_channel()).rank(&pol()).unwrap(), 3);
        let dep = choi(&fully_depolarizing());
        assert_eq!(dep.rank(&pol()).unwrap(), 4);
        assert!(dep.matrix.max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.5)) < 1e-14);
    }

    #[test]
    fn transfer_spectra() {
        let id = KrausChannel::from_kraus(vec![ComplexMatrix::identity(2)]).unwrap();
        assert!(transfer_matrix(&id).max_abs_diff(&ComplexMatrix::identity(4)) == 0.0);
        let ev = eigenvalues(&transfer_matrix(&fully_depolarizing())).unwrap();
        assert!((ev[0] - ONE).norm() < 1e-12);
        assert!(ev[1..].iter().all(|z| z.norm() < 1e-12));
        let shift = ComplexMatrix::from_fn(3, 3, |r, c| if r == (c + 1) % 3 { ONE } else { ZERO });
        let ev = eigenvalues(&transfer_matrix(&KrausChannel::from_kraus(vec![shift]).unwrap())).unwrap();
        assert_eq!(ev.len(), 9);
        assert!(ev.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        assert!(ev.iter().all(|z| (z.powu(3) - ONE).norm() < 1e-10));
        let ones = ev.iter().filter(|z| (*z - ONE).norm() < 1e-8).count();
        assert_eq!(ones, 3);
    }

    #[test]
    fn power_of_pauli_is_full() {
        let p2 = power_reduced(&pauli_channel(), 2, &pol()).unwrap();
        assert_eq!(p2.d(), 4);
        assert!(p2.is_tp());
        let id = KrausChannel::from_kraus(vec![ComplexMatrix::identity(3)]).unwrap();
        assert_eq!(power_reduced(&id, 7, &pol()).unwrap().d(), 1);
    }

    #[test]
    fn stochastic_validation() {
        assert!(StochasticMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]], &pol()).is_ok());
        assert!(StochasticMatrix::new(vec![vec![0.5, 0.6], vec![0.5, 0.5]], &pol()).is_err());
        assert!(StochasticMatrix::new(vec![vec![1.5, 0.0], vec![-0.5, 1.0]], &pol()).is_err());
    }

    #[test]
    fn embeddings() {
        let half = StochasticMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]], &pol()).unwrap();
        let ch = classical_embed(&half, &pol()).unwrap();
        assert_eq!(ch.d(), 4);
        assert!(ch.is_tp());
        let perm =
            StochasticMatrix::new(vec![vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], &pol()).unwrap();
        let ch = classical_embed(&perm, &pol()).unwrap();
        assert_eq!(ch.d(), 3);
        for k in ch.kraus() {
            assert_eq!(k.data().iter().filter(|z| **z != ZERO).count(), 1);
        }
    }
}
