use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::channel::KrausChannel;
use crate::error::Result;
use crate::numerics::{eigenvalues, numerical_rank, ComplexMatrix, TolerancePolicy, C64};

/// Which hypothesis of the quantum Wielandt bounds a span element certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WitnessKind {
    Invertible,
    NonInvertibleNonzeroEig,
    Unknown,
}

/// A verified element `Σ_k c_k A_k` of `S_1`, or `Unknown` when sampling found
/// none. `Unknown` does not prove that the span is nilpotent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanWitness {
    pub kind: WitnessKind,
    #[serde(serialize_with = "crate::report::ser_complex_vec")]
    pub witness_coeffs: Vec<C64>,
    #[serde(serialize_with = "crate::report::ser_complex_opt")]
    pub witness_eigenvalue: Option<C64>,
}

/// Draws `samples` seeded complex Gaussian combinations of the reduced Kraus
/// operators and returns the first certificate found.
///
/// An element counts as having a nonzero eigenvalue when
/// `‖X^D‖ > D · rank_rel · ‖X‖^D` (Frobenius norms), i.e. it is not nilpotent.
pub fn span_witness(ch: &KrausChannel, samples: usize, seed: u64, pol: &TolerancePolicy) -> Result<SpanWitness> {
    let dim = ch.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fallback: Option<SpanWitness> = None;
    for _ in 0..samples.max(1) {
        let coeffs: Vec<C64> = (0..ch.d())
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re, im)
            })
            .collect();
        let x = combine(ch.kraus(), &coeffs);
        let norm = x.frobenius_norm();
        if norm == 0.0 {
            continue;
        }
        if numerical_rank(&x, pol)? == dim {
            return Ok(SpanWitness { kind: WitnessKind::Invertible, witness_coeffs: coeffs, witness_eigenvalue: None });
        }
        if fallback.is_none() {
            let xn = x.scale_real(1.0 / norm);
            if xn.pow(dim).frobenius_norm() > dim as f64 * pol.rank_rel {
                let top = eigenvalues(&x)?[0];
                fallback = Some(SpanWitness {
                    kind: WitnessKind::NonInvertibleNonzeroEig,
                    witness_coeffs: coeffs,
                    witness_eigenvalue: Some(top),
                });
            }
        }
    }
    Ok(fallback.unwrap_or(SpanWitness {
        kind: WitnessKind::Unknown,
        witness_coeffs: Vec::new(),
        witness_eigenvalue: None,
    }))
}

pub(crate) fn combine(kraus: &[ComplexMatrix], coeffs: &[C64]) -> ComplexMatrix {
    let dim = kraus[0].rows();
    kraus.iter().zip(coeffs).fold(ComplexMatrix::zeros(dim, dim), |acc, (a, c)| &acc + &a.scale(*c))
}

/// Case of the quantum Wielandt theorem selected from a span witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WielandtCase {
    General,
    InvertibleInSpan,
    NonInvertibleNonzeroEig,
    NotApplicable,
}

impl WielandtCase {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::General => "General",
            Self::InvertibleInSpan => "InvertibleInSpan",
            Self::NonInvertibleNonzeroEig => "NonInvertibleNonzeroEig",
            Self::NotApplicable => "NotApplicable",
        }
    }
}

/// General cap `(D² − d + 1)·D²` on `i(A)`.
pub fn general_bound(dim: usize, d: usize) -> usize {
    (dim * dim + 1 - d) * dim * dim
}

/// Bound attached to a case for a channel with `D`, `d`.
pub fn case_bound(case: WielandtCase, dim: usize, d: usize) -> usize {
    match case {
        WielandtCase::InvertibleInSpan => dim * dim + 1 - d,
        WielandtCase::NonInvertibleNonzeroEig => dim * dim,
        WielandtCase::General | WielandtCase::NotApplicable => general_bound(dim, d),
    }
}

/// Strongest applicable case, its bound, and whether a finite `i` respects it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WielandtCertificate {
    pub case: WielandtCase,
    pub bound: usize,
    pub bound_respected: bool,
    pub witness: SpanWitness,
}

/// Selects the case from a span witness and checks `i` against its bound.
/// Channels that never reach full Kraus rank are outside the theorem's
/// hypothesis and get `NotApplicable`.
pub fn wielandt_certificates_for(
    ch: &KrausChannel,
    i_index: Option<usize>,
    samples: usize,
    seed: u64,
    pol: &TolerancePolicy,
) -> Result<WielandtCertificate> {
    let witness = span_witness(ch, samples, seed, pol)?;
    let case = match (i_index, witness.kind) {
        (None, _) => WielandtCase::NotApplicable,
        (Some(_), WitnessKind::Invertible) => WielandtCase::InvertibleInSpan,
        (Some(_), WitnessKind::NonInvertibleNonzeroEig) => WielandtCase::NonInvertibleNonzeroEig,
        (Some(_), WitnessKind::Unknown) => WielandtCase::General,
    };
    let bound = case_bound(case, ch.dim(), ch.d());
    let bound_respected = i_index.is_none_or(|i| i <= bound);
    Ok(WielandtCertificate { case, bound, bound_respected, witness })
}
