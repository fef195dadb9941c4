//! Transfer-matrix spectra, fixed points, the spectral primitivity test and
//! the zero-error dichotomy classifier.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::channel::{transfer_matrix, KrausChannel};
use crate::error::Result;
use crate::indices::{kraus_rank_index, q_bracket, QSearch};
use crate::numerics::{eigenvalues, hermitian_eigen, null_space, operator_norm, ComplexMatrix, TolerancePolicy, C64};

/// Two peripheral eigenvalues count as the same phase when closer than this
/// (relative). Distinct roots of unity of order ≤ 36 are ≥ 0.17 apart.
const PHASE_SEPARATION: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    /// Transfer-matrix eigenvalues, descending modulus.
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub spectrum: Vec<C64>,
    pub spectral_radius: f64,
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub peripheral: Vec<C64>,
    /// Hermitian, trace-one fixed point of `E / r`; absent when none exists.
    #[serde(serialize_with = "crate::report::ser_matrix_opt")]
    pub fixed_point: Option<ComplexMatrix>,
    pub fixed_point_min_eig: f64,
    pub fixed_point_multiplicity: usize,
    pub period: usize,
    /// Largest non-peripheral modulus divided by the spectral radius.
    pub lambda2_modulus: f64,
}

impl SpectralReport {
    /// Whether a peripheral eigenvalue other than the spectral radius exists.
    pub fn has_nontrivial_peripheral(&self) -> bool {
        let r = self.spectral_radius;
        r > 0.0 && self.peripheral.iter().any(|z| (z / r - 1.0).norm() > PHASE_SEPARATION)
    }

    pub fn fixed_point_is_full_rank(&self, pol: &TolerancePolicy) -> bool {
        match &self.fixed_point {
            None => false,
            Some(fp) => {
                let scale = operator_norm(fp).unwrap_or(0.0);
                self.fixed_point_min_eig > pol.psd_rel * scale
            }
        }
    }
}

/// Spectrum, peripheral part, fixed point, multiplicity and period of the
/// map normalized by its spectral radius.
pub fn spectral_report(ch: &KrausChannel, pol: &TolerancePolicy) -> Result<SpectralReport> {
    let dim = ch.dim();
    let t = transfer_matrix(ch);
    let spectrum = eigenvalues(&t)?;
    let r = spectrum.first().map_or(0.0, |z| z.norm());
    if r <= f64::MIN_POSITIVE {
        return Ok(SpectralReport {
            spectrum,
            spectral_radius: 0.0,
            peripheral: Vec::new(),
            fixed_point: None,
            fixed_point_min_eig: 0.0,
            fixed_point_multiplicity: 0,
            period: 1,
            lambda2_modulus: 0.0,
        });
    }
    let window = r * (1.0 - pol.peripheral_rel);
    let peripheral: Vec<C64> = spectrum.iter().copied().filter(|z| z.norm() >= window).collect();
    let lambda2_modulus = spectrum.iter().filter(|z| z.norm() < window).map(|z| z.norm() / r).fold(0.0, f64::max);

    let shifted = &t.scale_real(1.0 / r) - &ComplexMatrix::identity(dim * dim);
    let right = null_space(&shifted, pol)?;
    let left = null_space(&shifted.adjoint(), pol)?;
    let multiplicity = right.len();
    let fixed_point = if multiplicity == 0 { None } else { Some(fixed_point_from(&right, &left, dim)) };
    let fixed_point_min_eig = match &fixed_point {
        Some(fp) => hermitian_eigen(fp)?.0[0],
        None => 0.0,
    };
    let period = peripheral.iter().filter_map(|z| root_order(z.arg(), dim * dim, pol.peripheral_rel)).fold(1, lcm);

    Ok(SpectralReport {
        spectrum,
        spectral_radius: r,
        peripheral,
        fixed_point,
        fixed_point_min_eig,
        fixed_point_multiplicity: multiplicity,
        period,
        lambda2_modulus,
    })
}

/// Image of the identity under the eigenprojector `R (L†R)⁻¹ L†`, Hermitized
/// and trace-normalized. A single eigenvector is used when the projector
/// cannot be formed.
fn fixed_point_from(right: &[ComplexMatrix], left: &[ComplexMatrix], dim: usize) -> ComplexMatrix {
    let k = right.len();
    let vec_id = ComplexMatrix::identity(dim).vectorize();
    let mut candidate = None;
    if left.len() == k {
        let g = DMatrix::from_fn(k, k, |a, b| left[a].hs_inner(&right[b]));
        let rhs = DVector::from_fn(k, |a, _| left[a].hs_inner(&vec_id));
        if let Some(c) = g.lu().solve(&rhs) {
            let x = right
                .iter()
                .zip(c.iter())
                .fold(ComplexMatrix::zeros(dim * dim, 1), |acc, (v, ci)| &acc + &v.scale(*ci));
            if x.frobenius_norm() > 1e-12 {
                candidate = Some(x);
            }
        }
    }
    let x = candidate.unwrap_or_else(|| right[0].clone());
    let x = x.reshape(dim, dim).expect("D² entries");
    normalize_hermitian(&x)
}

fn normalize_hermitian(x: &ComplexMatrix) -> ComplexMatrix {
    let tr = x.trace();
    let phase = if tr.norm() > 1e-12 * x.frobenius_norm() {
        tr.conj() / tr.norm()
    } else {
        // fall back on the largest diagonal entry to fix the global phase
        let big = (0..x.rows()).map(|i| x.get(i, i)).max_by(|a, b| a.norm().total_cmp(&b.norm()));
        big.map_or(C64::new(1.0, 0.0), |z| if z.norm() > 0.0 { z.conj() / z.norm() } else { C64::new(1.0, 0.0) })
    };
    let h = x.scale(phase).hermitian_part();
    let tr = h.trace().re;
    if tr.abs() > 1e-300 {
        h.scale_real(1.0 / tr)
    } else {
        h
    }
}

/// Smallest `q ≤ max_order` with `θ/2π ≈ p/q` within `tol`.
fn root_order(theta: f64, max_order: usize, tol: f64) -> Option<usize> {
    let x = (theta / std::f64::consts::TAU).rem_euclid(1.0);
    (1..=max_order).find(|&q| {
        let scaled = x * q as f64;
        (scaled - scaled.round()).abs() <= tol * q as f64
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Reason a channel fails the spectral primitivity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NotPrimitiveReason {
    RankDeficientFixedPoint,
    MultipleFixedPoints,
    PeripheralEigenvalue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PrimitivityVerdict {
    Primitive,
    NotPrimitive(NotPrimitiveReason),
}

impl PrimitivityVerdict {
    pub fn is_primitive(self) -> bool {
        self == Self::Primitive
    }
}

/// Verdict from an already computed report.
pub fn classify_from_report(rep: &SpectralReport, pol: &TolerancePolicy) -> PrimitivityVerdict {
    use NotPrimitiveReason::*;
    if !rep.fixed_point_is_full_rank(pol) {
        PrimitivityVerdict::NotPrimitive(RankDeficientFixedPoint)
    } else if rep.has_nontrivial_peripheral() {
        PrimitivityVerdict::NotPrimitive(PeripheralEigenvalue)
    } else if rep.fixed_point_multiplicity >= 2 || rep.peripheral.len() >= 2 {
        PrimitivityVerdict::NotPrimitive(MultipleFixedPoints)
    } else {
        PrimitivityVerdict::Primitive
    }
}

/// Primitive iff the spectral radius is the only peripheral eigenvalue, its
/// eigenspace is one-dimensional and the fixed point is positive definite.
pub fn classify_primitivity(ch: &KrausChannel, pol: &TolerancePolicy) -> Result<PrimitivityVerdict> {
    Ok(classify_from_report(&spectral_report(ch, pol)?, pol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZeroErrorCase {
    AlwaysPositive,
    VanishesFromQ,
    PreconditionFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZeroErrorReason {
    MultipleFixedPoints,
    PeripheralEigenvalue,
    Primitive,
    NoFullRankFixedPoint,
}

/// Position of a channel in the zero-error dichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZeroErrorVerdict {
    pub case: ZeroErrorCase,
    pub reason: ZeroErrorReason,
    /// Upper bound on `q` (from which all powers have zero one-shot
    /// zero-error capacity) in the `VanishesFromQ` case.
    pub n_threshold: Option<usize>,
}

/// Verdict from a spectral report and, for primitive channels, `q_upper`.
pub fn zero_error_from_parts(rep: &SpectralReport, q_upper: Option<usize>, pol: &TolerancePolicy) -> ZeroErrorVerdict {
    let (case, reason) = if !rep.fixed_point_is_full_rank(pol) {
        (ZeroErrorCase::PreconditionFailed, ZeroErrorReason::NoFullRankFixedPoint)
    } else if rep.has_nontrivial_peripheral() {
        (ZeroErrorCase::AlwaysPositive, ZeroErrorReason::PeripheralEigenvalue)
    } else if rep.fixed_point_multiplicity >= 2 || rep.peripheral.len() >= 2 {
        (ZeroErrorCase::AlwaysPositive, ZeroErrorReason::MultipleFixedPoints)
    } else {
        (ZeroErrorCase::VanishesFromQ, ZeroErrorReason::Primitive)
    };
    ZeroErrorVerdict { case, reason, n_threshold: if case == ZeroErrorCase::VanishesFromQ { q_upper } else { None } }
}

/// Full dichotomy classification, computing `q_upper` when needed.
pub fn zero_error_classify(ch: &KrausChannel, pol: &TolerancePolicy) -> Result<ZeroErrorVerdict> {
    let rep = spectral_report(ch, pol)?;
    let mut verdict = zero_error_from_parts(&rep, None, pol);
    if verdict.case == ZeroErrorCase::VanishesFromQ {
        let i = kraus_rank_index(ch, pol)?;
        let q = q_bracket(ch, i, QSearch::default(), pol)?;
        verdict.n_threshold = Some(q.q_upper);
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::*;

    fn pol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn depolarizing_report() {
        let rep = spectral_report(&depolarizing(2, 1.0).unwrap(), &pol()).unwrap();
        assert!((rep.spectrum[0] - 1.0).norm() < 1e-12);
        assert!(rep.spectrum[1..].iter().all(|z| z.norm() < 1e-12));
        let fp = rep.fixed_point.as_ref().unwrap();
        assert!(fp.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-12);
        assert!((rep.fixed_point_min_eig - 0.5).abs() < 1e-12);
        assert_eq!(rep.period, 1);
        assert!(rep.lambda2_modulus < 1e-12);
    }

    #[test]
    fn cyclic_shift_report() {
        let rep = spectral_report(&cyclic_shift_unitary(3).unwrap(), &pol()).unwrap();
        assert_eq!(rep.peripheral.len(), 9);
        assert_eq!(rep.fixed_point_multiplicity, 3);
        assert_eq!(rep.period, 3);
        let fp = rep.fixed_point.unwrap();
        assert!(fp.max_abs_diff(&ComplexMatrix::identity(3).scale_real(1.0 / 3.0)) < 1e-10);
    }

    #[test]
    fn amplitude_damping_report() {
        let rep = spectral_report(&amplitude_damping(0.5).unwrap(), &pol()).unwrap();
        let fp = rep.fixed_point.as_ref().unwrap();
        assert!(fp.max_abs_diff(&ComplexMatrix::unit(2, 0, 0)) < 1e-12);
        assert!(rep.fixed_point_min_eig.abs() < 1e-12);
        assert_eq!(rep.period, 1);
    }

    #[test]
    fn verdicts() {
        use NotPrimitiveReason::*;
        assert_eq!(classify_primitivity(&pauli_channel(), &pol()).unwrap(), PrimitivityVerdict::Primitive);
        assert_eq!(
            classify_primitivity(&cyclic_shift_unitary(3).unwrap(), &pol()).unwrap(),
            PrimitivityVerdict::NotPrimitive(PeripheralEigenvalue)
        );
        assert_eq!(
            classify_primitivity(&amplitude_damping(0.5).unwrap(), &pol()).unwrap(),
            PrimitivityVerdict::NotPrimitive(RankDeficientFixedPoint)
        );
        assert_eq!(
            classify_primitivity(&depolarizing(2, 0.0).unwrap(), &pol()).unwrap(),
            PrimitivityVerdict::NotPrimitive(MultipleFixedPoints)
        );
        assert!(classify_primitivity(&shift_chord_channel(4).unwrap(), &pol()).unwrap().is_primitive());
    }

    #[test]
    fn zero_error_cases() {
        let v = zero_error_classify(&cyclic_shift_unitary(3).unwrap(), &pol()).unwrap();
        assert_eq!((v.case, v.reason), (ZeroErrorCase::AlwaysPositive, ZeroErrorReason::PeripheralEigenvalue));
        let v = zero_error_classify(&depolarizing(2, 1.0).unwrap(), &pol()).unwrap();
        assert_eq!((v.case, v.n_threshold), (ZeroErrorCase::VanishesFromQ, Some(1)));
        let v = zero_error_classify(&amplitude_damping(0.5).unwrap(), &pol()).unwrap();
        assert_eq!(v.case, ZeroErrorCase::PreconditionFailed);
    }

    #[test]
    fn root_orders() {
        assert_eq!(root_order(0.0, 9, 1e-8), Some(1));
        assert_eq!(root_order(std::f64::consts::TAU / 3.0, 9, 1e-8), Some(3));
        assert_eq!(root_order(-std::f64::consts::TAU / 3.0, 9, 1e-8), Some(3));
        assert_eq!(root_order(1.0, 9, 1e-8), None);
    }
}
