//! Independent oracles shared by the integration tests. Nothing here goes
//! through the span engine: products are enumerated explicitly and ranks
//! come straight from nalgebra's SVD.

#![allow(dead_code)]

use nalgebra::DMatrix;
use qprim::{ComplexMatrix, KrausChannel, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x0ddba11)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Haar-ish unitary from the QR factor of a Gaussian matrix.
pub fn unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let q = gaussian(rng, n, n).to_nalgebra().qr().q();
    ComplexMatrix::from_nalgebra(&q)
}

/// Rank of a list of equally shaped matrices, each flattened to a column.
pub fn svd_rank(mats: &[ComplexMatrix]) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let len = mats[0].len();
    let m = DMatrix::from_fn(len, mats.len(), |r, c| mats[c].data()[r]);
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let cut = 1e-9 * top * len.max(mats.len()) as f64;
    sv.iter().filter(|&&s| s > cut).count()
}

/// Every product `A_{w_1}⋯A_{w_n}` over words of length `n`.
pub fn all_products(kraus: &[ComplexMatrix], n: usize) -> Vec<ComplexMatrix> {
    let mut level = vec![ComplexMatrix::identity(kraus[0].rows())];
    for _ in 0..n {
        level = level.iter().flat_map(|p| kraus.iter().map(move |a| p * a)).collect();
    }
    level
}

/// `dim S_n` by explicit enumeration of all `d^n` products.
pub fn brute_span_dim(kraus: &[ComplexMatrix], n: usize) -> usize {
    svd_rank(&all_products(kraus, n))
}

/// `E^n(X)` by repeated application of the Kraus sum.
pub fn apply_n(ch: &KrausChannel, x: &ComplexMatrix, n: usize) -> ComplexMatrix {
    let mut y = x.clone();
    for _ in 0..n {
        y = ch
            .kraus()
            .iter()
            .fold(ComplexMatrix::zeros(x.rows(), x.cols()), |acc, a| &acc + &(&(a * &y) * &a.adjoint()));
    }
    y
}

/// Least `n ≤ D²` such that walks of length exactly `n` join every ordered
/// pair of vertices, via reachable-set propagation on bitmasks.
/// `pattern[i][j]` is the arc `j → i` (column-stochastic convention).
pub fn walk_exponent(pattern: &[Vec<bool>]) -> Option<usize> {
    let n = pattern.len();
    let full: u64 = if n == 64 { u64::MAX } else { (1 << n) - 1 };
    let succ: Vec<u64> = (0..n).map(|j| (0..n).filter(|&i| pattern[i][j]).fold(0u64, |m, i| m | 1 << i)).collect();
    let mut reach: Vec<u64> = (0..n).map(|j| 1u64 << j).collect();
    for len in 1..=n * n {
        reach = reach.iter().map(|&set| (0..n).filter(|&v| set >> v & 1 == 1).fold(0u64, |m, v| m | succ[v])).collect();
        if reach.iter().all(|&s| s == full) {
            return Some(len);
        }
    }
    None
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eig(m: &ComplexMatrix) -> f64 {
    let h = m.hermitian_part().to_nalgebra();
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Random unit vector.
pub fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let v = gaussian(rng, n, 1);
    v.scale_real(1.0 / v.frobenius_norm())
}
