//! Primitivity indices: `i(A)`, a certified bracket on `q(E)`, the classical
//! exponent `p(A)` and the quantum Wielandt certificates.

mod classical;
mod q_bracket;
mod witness;

use serde::Serialize;

pub use classical::{classical_exponent, classical_exponent_pattern, wielandt_cap};
pub use q_bracket::{q_bracket, QBracket, QSearch};
pub use witness::{
    case_bound, general_bound, span_witness, wielandt_certificates_for, SpanWitness, WielandtCase, WielandtCertificate,
    WitnessKind,
};

use crate::channel::KrausChannel;
use crate::error::Result;
use crate::numerics::TolerancePolicy;
use crate::spans::SpanIter;

/// Least `n` with `S_n = M_D`, searched up to the general cap
/// `(D² − d + 1)·D²`. `None` certifies that no `n` works, so the channel is
/// not primitive.
pub fn kraus_rank_index(ch: &KrausChannel, pol: &TolerancePolicy) -> Result<Option<usize>> {
    let cap = general_bound(ch.dim(), ch.d());
    for item in SpanIter::new(ch, pol).take(cap) {
        let (n, s) = item?;
        if s.is_full() {
            return Ok(Some(n));
        }
        if s.dim() == 0 {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Bracket on `q` for a channel that must be primitive.
pub fn primitivity_index_q(ch: &KrausChannel, search: QSearch, pol: &TolerancePolicy) -> Result<QBracket> {
    q_bracket(ch, kraus_rank_index(ch, pol)?, search, pol)
}

/// Quantum Wielandt certificate computed together with `i(A)`.
pub fn wielandt_certificates(ch: &KrausChannel, pol: &TolerancePolicy) -> Result<WielandtCertificate> {
    let i = kraus_rank_index(ch, pol)?;
    wielandt_certificates_for(ch, i, DEFAULT_WITNESS_SAMPLES, 0, pol)
}

pub const DEFAULT_WITNESS_SAMPLES: usize = 64;

/// Combined verdict on the indices of one channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimitivityReport {
    /// `None` when the channel never reaches full Kraus rank.
    pub i_index: Option<usize>,
    pub q_lower: Option<usize>,
    pub q_upper: Option<usize>,
    pub q_exact: bool,
    pub thm1_case: WielandtCase,
    pub thm1_bound: usize,
    pub bound_respected: bool,
    pub certificates: Vec<String>,
}

/// Options for [`primitivity_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexOptions {
    pub search: QSearch,
    pub witness_samples: usize,
    pub witness_seed: u64,
    /// Skip the `q` search and report only `i` and the certificates.
    pub skip_q: bool,
}

impl Default for IndexOptions {
    fn default() -> Self {
        Self { search: QSearch::default(), witness_samples: DEFAULT_WITNESS_SAMPLES, witness_seed: 0, skip_q: false }
    }
}

/// Runs `i`, the `q` bracket and the Wielandt certificate.
pub fn primitivity_report(ch: &KrausChannel, opts: &IndexOptions, pol: &TolerancePolicy) -> Result<PrimitivityReport> {
    let i = kraus_rank_index(ch, pol)?;
    primitivity_report_with_index(ch, i, opts, pol)
}

/// [`primitivity_report`] with `i` supplied by the caller (e.g. from the
/// exact engine).
pub fn primitivity_report_with_index(
    ch: &KrausChannel,
    i: Option<usize>,
    opts: &IndexOptions,
    pol: &TolerancePolicy,
) -> Result<PrimitivityReport> {
    let cert = wielandt_certificates_for(ch, i, opts.witness_samples, opts.witness_seed, pol)?;
    let mut certificates = Vec::new();
    match i {
        Some(i) => certificates.push(format!("dim S_{i} = D^2 = {}", ch.dim() * ch.dim())),
        None => certificates.push(format!("dim S_n < D^2 for all n <= {}", general_bound(ch.dim(), ch.d()))),
    }
    match cert.witness.kind {
        WitnessKind::Invertible => certificates.push("S_1 contains an invertible element".into()),
        WitnessKind::NonInvertibleNonzeroEig => {
            certificates.push("S_1 contains a non-nilpotent singular element".into())
        }
        WitnessKind::Unknown => {}
    }
    let (q_lower, q_upper, q_exact) = match i {
        Some(_) if !opts.skip_q => {
            let q = q_bracket(ch, i, opts.search, pol)?;
            certificates.extend(q.certificates);
            (Some(q.q_lower), Some(q.q_upper), q.q_exact)
        }
        Some(i) => (Some(1), Some(i), i == 1),
        None => (None, None, false),
    };
    Ok(PrimitivityReport {
        i_index: i,
        q_lower,
        q_upper,
        q_exact,
        thm1_case: cert.case,
        thm1_bound: cert.bound,
        bound_respected: cert.bound_respected,
        certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::classical_embed;
    use crate::generators::*;
    use crate::numerics::ComplexMatrix;

    fn pol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn pauli_indices() {
        let ch = pauli_channel();
        assert_eq!(kraus_rank_index(&ch, &pol()).unwrap(), Some(2));
        let q = primitivity_index_q(&ch, QSearch::default(), &pol()).unwrap();
        assert_eq!((q.q_lower, q.q_upper, q.q_exact), (1, 1, true));
        let c = wielandt_certificates(&ch, &pol()).unwrap();
        assert_eq!((c.case, c.bound, c.bound_respected), (WielandtCase::InvertibleInSpan, 2, true));
    }

    #[test]
    fn shift_chord_three() {
        let ch = shift_chord_channel(3).unwrap();
        assert_eq!(kraus_rank_index(&ch, &pol()).unwrap(), Some(6));
        let c = wielandt_certificates(&ch, &pol()).unwrap();
        assert_eq!((c.case, c.bound, c.bound_respected), (WielandtCase::InvertibleInSpan, 8, true));
        assert_eq!(span_witness(&ch, 16, 3, &pol()).unwrap().kind, WitnessKind::Invertible);
    }

    #[test]
    fn unitary_never_full() {
        let ch = KrausChannel::from_kraus(vec![cyclic_shift(2)]).unwrap();
        assert_eq!(kraus_rank_index(&ch, &pol()).unwrap(), None);
        assert!(matches!(primitivity_index_q(&ch, QSearch::default(), &pol()), Err(crate::Error::NotPrimitive)));
    }

    #[test]
    fn wielandt_embedding() {
        let ch = classical_embed(&wielandt_digraph(3).unwrap(), &pol()).unwrap();
        assert_eq!(ch.d(), 4);
        assert_eq!(kraus_rank_index(&ch, &pol()).unwrap(), Some(5));
        let q = primitivity_index_q(&ch, QSearch::default(), &pol()).unwrap();
        assert_eq!((q.q_lower, q.q_upper, q.q_exact), (5, 5, true));
        let c = wielandt_certificates(&ch, &pol()).unwrap();
        assert_eq!((c.case, c.bound, c.bound_respected), (WielandtCase::InvertibleInSpan, 6, true));
    }

    #[test]
    fn fully_depolarizing_q_is_one() {
        let ch = depolarizing(2, 1.0).unwrap();
        let q = primitivity_index_q(&ch, QSearch::default(), &pol()).unwrap();
        assert_eq!((q.q_lower, q.q_upper, q.q_exact), (1, 1, true));
    }

    #[test]
    fn nilpotent_span_is_unknown() {
        let ch = KrausChannel::from_kraus(vec![ComplexMatrix::unit(2, 0, 1)]).unwrap();
        assert_eq!(span_witness(&ch, 64, 1, &pol()).unwrap().kind, WitnessKind::Unknown);
    }
}
