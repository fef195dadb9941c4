//! Growth of the operator spans `S_n`, their accumulations `T_n` and the
//! vector spans `H_n(φ) = S_n|φ⟩`.
//!
//! `S_{n+1}` is always obtained from a basis of `S_n` by left multiplication
//! with the Kraus operators; products are never enumerated.

use crate::channel::KrausChannel;
use crate::error::{invalid, Result};
use crate::numerics::{orthonormal_extend, ComplexMatrix, TolerancePolicy};

pub use crate::numerics::SubspaceBasis;

/// Basis of `S_1`, the span of the Kraus operators.
pub fn s1(ch: &KrausChannel, pol: &TolerancePolicy) -> Result<SubspaceBasis> {
    SubspaceBasis::spanned_by((ch.dim(), ch.dim()), ch.kraus(), pol)
}

/// `span{A_k B : B ∈ S_n}`.
pub fn step_s(ch: &KrausChannel, sn: &SubspaceBasis, pol: &TolerancePolicy) -> Result<SubspaceBasis> {
    let d = ch.dim();
    if sn.shape() != (d, d) {
        return Err(invalid(format!("span elements are {:?}, channel acts on {d}x{d}", sn.shape())));
    }
    let candidates: Vec<ComplexMatrix> =
        sn.elements().iter().flat_map(|b| ch.kraus().iter().map(move |a| a * b)).collect();
    orthonormal_extend(&SubspaceBasis::empty(d, d), &candidates, pol)
}

/// Iterator over `(n, S_n)` for `n = 1, 2, …`.
pub struct SpanIter<'a> {
    ch: &'a KrausChannel,
    pol: TolerancePolicy,
    current: Option<SubspaceBasis>,
    n: usize,
}

impl<'a> SpanIter<'a> {
    pub fn new(ch: &'a KrausChannel, pol: &TolerancePolicy) -> Self {
        Self { ch, pol: *pol, current: None, n: 0 }
    }
}

impl Iterator for SpanIter<'_> {
    type Item = Result<(usize, SubspaceBasis)>;

    fn next(&mut self) -> Option<Self::Item> {
        let next = match &self.current {
            None => s1(self.ch, &self.pol),
            Some(s) => step_s(self.ch, s, &self.pol),
        };
        match next {
            Ok(s) => {
                self.n += 1;
                self.current = Some(s.clone());
                Some(Ok((self.n, s)))
            }
            Err(e) => Some(Err(e)),
        }
    }
}

/// `[dim S_1, …, dim S_{n_max}]`. Once `S_n` is the full matrix space every
/// later entry is `D²` as well, so the loop stops there.
pub fn s_dims(ch: &KrausChannel, n_max: usize, pol: &TolerancePolicy) -> Result<Vec<usize>> {
    let full = ch.dim() * ch.dim();
    let mut out = Vec::with_capacity(n_max);
    for item in SpanIter::new(ch, pol).take(n_max) {
        let (_, s) = item?;
        out.push(s.dim());
        if s.is_full() {
            break;
        }
    }
    out.resize(n_max, full);
    Ok(out)
}

/// Basis of `T_n = span(S_1 ∪ … ∪ S_n)`.
pub fn t_basis(ch: &KrausChannel, n: usize, pol: &TolerancePolicy) -> Result<SubspaceBasis> {
    let mut t = SubspaceBasis::empty(ch.dim(), ch.dim());
    for item in SpanIter::new(ch, pol).take(n) {
        let (_, s) = item?;
        t = orthonormal_extend(&t, s.elements(), pol)?;
        if t.is_full() {
            break;
        }
    }
    Ok(t)
}

/// `[dim T_1, …, dim T_{n_max}]`. A stall `T_{n+1} = T_n` is final, so the
/// tail is filled as soon as one occurs.
pub fn t_dims(ch: &KrausChannel, n_max: usize, pol: &TolerancePolicy) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = Vec::with_capacity(n_max);
    let mut t = SubspaceBasis::empty(ch.dim(), ch.dim());
    for item in SpanIter::new(ch, pol).take(n_max) {
        let (_, s) = item?;
        t = orthonormal_extend(&t, s.elements(), pol)?;
        let stalled = out.last() == Some(&t.dim());
        out.push(t.dim());
        if stalled || t.is_full() {
            break;
        }
    }
    let last = out.last().copied().unwrap_or(0);
    out.resize(n_max, last);
    Ok(out)
}

/// `dim H_n(φ)`, equal to the rank of `E^n(|φ⟩⟨φ|)`. `n = 0` gives `span{φ}`.
pub fn h_dim(ch: &KrausChannel, phi: &ComplexMatrix, n: usize, pol: &TolerancePolicy) -> Result<usize> {
    Ok(h_basis(ch, phi, n, pol)?.dim())
}

/// Orthonormal basis of `H_n(φ)`, grown vector by vector as
/// `H_{m+1} = span{A_k h : h ∈ H_m}`.
pub fn h_basis(ch: &KrausChannel, phi: &ComplexMatrix, n: usize, pol: &TolerancePolicy) -> Result<SubspaceBasis> {
    let d = ch.dim();
    if phi.shape() != (d, 1) {
        return Err(invalid(format!("phi must be a {d}x1 column, got {:?}", phi.shape())));
    }
    let norm = phi.frobenius_norm();
    if norm == 0.0 {
        return Err(invalid("phi must be nonzero"));
    }
    let mut h = SubspaceBasis::spanned_by((d, 1), &[phi.scale_real(1.0 / norm)], pol)?;
    for _ in 0..n {
        let candidates: Vec<ComplexMatrix> =
            h.elements().iter().flat_map(|v| ch.kraus().iter().map(move |a| a * v)).collect();
        h = orthonormal_extend(&SubspaceBasis::empty(d, 1), &candidates, pol)?;
        if h.dim() == 0 {
            break;
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{pauli_channel, shift_chord_channel};
    use crate::numerics::{C64, ONE, ZERO};

    fn pol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn identity(d: usize) -> KrausChannel {
        KrausChannel::from_kraus(vec![ComplexMatrix::identity(d)]).unwrap()
    }

    #[test]
    fn pauli_growth() {
        let ch = pauli_channel();
        let s = s1(&ch, &pol()).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(step_s(&ch, &s, &pol()).unwrap().dim(), 4);
        assert_eq!(s_dims(&ch, 3, &pol()).unwrap(), vec![3, 4, 4]);
        assert_eq!(t_dims(&ch, 2, &pol()).unwrap(), vec![3, 4]);
    }

    #[test]
    fn identity_growth() {
        let ch = identity(2);
        let s = s1(&ch, &pol()).unwrap();
        assert_eq!(step_s(&ch, &s, &pol()).unwrap().dim(), 1);
        assert_eq!(t_dims(&ch, 5, &pol()).unwrap(), vec![1; 5]);
        let phi = ComplexMatrix::column(&[C64::new(0.3, 0.1), C64::new(-2.0, 0.0)]);
        for n in 0..4 {
            assert_eq!(h_dim(&ch, &phi, n, &pol()).unwrap(), 1);
        }
    }

    #[test]
    fn single_unitary_stays_one_dimensional() {
        let u = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let ch = KrausChannel::from_kraus(vec![u]).unwrap();
        assert_eq!(s_dims(&ch, 4, &pol()).unwrap(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn shift_chord_sequence() {
        let ch = shift_chord_channel(3).unwrap();
        assert_eq!(s_dims(&ch, 6, &pol()).unwrap(), vec![2, 3, 5, 6, 8, 9]);
        let t = t_dims(&ch, 8, &pol()).unwrap();
        assert_eq!(*t.last().unwrap(), 9);
        assert!(t.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn pauli_h1_is_two_for_any_phi() {
        let ch = pauli_channel();
        for phi in [[ONE, ZERO], [C64::new(0.6, 0.0), C64::new(0.0, 0.8)], [ONE, ONE]] {
            assert_eq!(h_dim(&ch, &ComplexMatrix::column(&phi), 1, &pol()).unwrap(), 2);
        }
    }

    #[test]
    fn h_dim_rejects_zero_vector() {
        let ch = pauli_channel();
        assert!(h_dim(&ch, &ComplexMatrix::zeros(2, 1), 1, &pol()).is_err());
        assert!(h_dim(&ch, &ComplexMatrix::zeros(3, 1), 1, &pol()).is_err());
    }

    #[test]
    fn step_rejects_wrong_shape() {
        let ch = pauli_channel();
        assert!(step_s(&ch, &SubspaceBasis::empty(3, 3), &pol()).is_err());
    }
}
