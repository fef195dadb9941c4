//! Certified bracket on the primitivity index `q`.
//!
//! Lower bounds come from explicit witnesses `φ` with `dim H_n(φ) < D`, each
//! confirmed by the span engine. Upper bounds come from `q ≤ i` and, for
//! qubits, from showing that the `2×2` minors of `[B_1φ, …, B_mφ]` share no
//! common projective root.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::numerics::{
    eigen, hermitian_eigen, least_squares, null_space, numerical_rank, singular_values, ComplexMatrix, SubspaceBasis,
    TolerancePolicy, C64, ONE, ZERO,
};
use crate::spans::{h_dim, SpanIter};

/// Stacked smallest singular value below which a minimizer is checked.
const WITNESS_SIGMA: f64 = 1e-7;
const MAX_SWEEPS: usize = 400;
const NEWTON_STEPS: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QBracket {
    pub q_lower: usize,
    pub q_upper: usize,
    pub q_exact: bool,
    pub certificates: Vec<String>,
}

/// Search budget for the bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QSearch {
    /// Random restarts of the local minimization per level.
    pub effort: usize,
    pub seed: u64,
}

impl Default for QSearch {
    fn default() -> Self {
        Self { effort: 64, seed: 0 }
    }
}

/// Bracket `q_lower ≤ q ≤ q_upper` for a channel with finite `i = i_index`.
pub fn q_bracket(
    ch: &KrausChannel,
    i_index: Option<usize>,
    search: QSearch,
    pol: &TolerancePolicy,
) -> Result<QBracket> {
    let i = i_index.ok_or(Error::NotPrimitive)?;
    let dim = ch.dim();
    let mut lower = 1;
    let mut upper = i;
    let mut certs = vec![format!("q <= i = {i}")];
    for item in SpanIter::new(ch, pol).take(i.saturating_sub(1)) {
        let (n, sn) = item?;
        if dim == 2 {
            match qubit_minor_test(&sn, pol)? {
                MinorOutcome::NoCommonRoot => {
                    upper = n;
                    certs.push(format!("q <= {n}: 2x2 minors of S_{n}|phi> have no common root"));
                    break;
                }
                MinorOutcome::Root(phi) if h_dim(ch, &phi, n, pol)? < dim => {
                    lower = n + 1;
                    certs.push(witness_line(n, &phi));
                    continue;
                }
                _ => {}
            }
        }
        match find_deficient(ch, &sn, n, search, pol)? {
            Some(phi) => {
                lower = n + 1;
                certs.push(witness_line(n, &phi));
            }
            None => break,
        }
    }
    Ok(QBracket { q_lower: lower, q_upper: upper, q_exact: lower == upper, certificates: certs })
}

fn witness_line(n: usize, phi: &ComplexMatrix) -> String {
    let parts: Vec<String> = phi.data().iter().map(|z| format!("({:.6},{:.6})", z.re, z.im)).collect();
    format!("q > {n}: dim H_{n}(phi) < D for phi = [{}]", parts.join(", "))
}

fn basis_vector(dim: usize, k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, 1, |r, _| if r == k { ONE } else { ZERO })
}

/// Singular values of `[B_1φ, …, B_mφ]`, descending. Taken directly rather
/// than from the Gram matrix, which would square away small values.
fn stacked_singular_values(sn: &SubspaceBasis, phi: &ComplexMatrix) -> Result<Vec<f64>> {
    let data: Vec<C64> = sn.elements().iter().flat_map(|b| (b * phi).data().to_vec()).collect();
    singular_values(&ComplexMatrix::new(sn.dim(), phi.rows(), data)?)
}

/// Smallest singular value of the stacked map at unit `φ`.
fn stacked_sigma(sn: &SubspaceBasis, phi: &ComplexMatrix) -> Result<f64> {
    let sv = stacked_singular_values(sn, phi)?;
    Ok(if sv.len() < phi.rows() { 0.0 } else { sv.last().copied().unwrap_or(0.0) })
}

/// [`stacked_sigma`] over `σ_max`.
fn stacked_ratio(sn: &SubspaceBasis, phi: &ComplexMatrix) -> Result<f64> {
    let sv = stacked_singular_values(sn, phi)?;
    let top = sv.first().copied().unwrap_or(0.0);
    if top <= 0.0 || sv.len() < phi.rows() {
        return Ok(0.0);
    }
    Ok(sv.last().copied().unwrap_or(0.0) / top)
}

/// `Σ_j (B_j φ)(B_j φ)†`.
fn stacked_gram(sn: &SubspaceBasis, phi: &ComplexMatrix) -> ComplexMatrix {
    let dim = phi.rows();
    sn.elements().iter().fold(ComplexMatrix::zeros(dim, dim), |acc, b| {
        let v = b * phi;
        &acc + &ComplexMatrix::outer(&v, &v)
    })
}

/// `Σ_j B_j† ψψ† B_j`.
fn dual_gram(sn: &SubspaceBasis, psi: &ComplexMatrix) -> ComplexMatrix {
    let dim = psi.rows();
    sn.elements().iter().fold(ComplexMatrix::zeros(dim, dim), |acc, b| {
        let w = &b.adjoint() * psi;
        &acc + &ComplexMatrix::outer(&w, &w)
    })
}

/// Looks for `φ` with `dim H_n(φ) < D`: coordinate vectors, eigenvectors of
/// the Kraus operators, then alternating minimization of
/// `Σ_j |ψ† B_j φ|²` over unit `φ`, `ψ` from seeded restarts.
fn find_deficient(
    ch: &KrausChannel,
    sn: &SubspaceBasis,
    n: usize,
    search: QSearch,
    pol: &TolerancePolicy,
) -> Result<Option<ComplexMatrix>> {
    let dim = ch.dim();
    let confirm = |phi: &ComplexMatrix| -> Result<bool> { Ok(h_dim(ch, phi, n, pol)? < dim) };
    if sn.dim() < dim {
        let phi = basis_vector(dim, 0);
        return Ok(confirm(&phi)?.then_some(phi));
    }
    let mut structured: Vec<ComplexMatrix> = (0..dim).map(|k| basis_vector(dim, k)).collect();
    for a in ch.kraus() {
        structured.extend(eigen(a)?.into_iter().map(|p| p.vector));
    }
    for phi in &structured {
        if stacked_ratio(sn, phi)? < WITNESS_SIGMA && confirm(phi)? {
            return Ok(Some(phi.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    for _ in 0..search.effort {
        let start = random_unit(&mut rng, dim);
        let (phi, psi, _) = alternating_min(sn, start)?;
        let phi = newton_polish(sn, psi, phi, pol)?;
        let sigma = stacked_sigma(sn, &phi)?;
        if sigma < WITNESS_SIGMA && confirm(&phi)? {
            return Ok(Some(phi));
        }
    }
    Ok(None)
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let v = ComplexMatrix::from_fn(dim, 1, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let n = v.frobenius_norm();
    v.scale_real(1.0 / n)
}

/// Block-coordinate descent on `f(φ, ψ) = Σ_j |ψ† B_j φ|²`; each half step
/// is an exact minimization (smallest eigenvector). Returns the final `φ`,
/// `ψ` and `sqrt(f)`, the smallest singular value of the stacked map at `φ`
/// when the basis is orthonormal.
fn alternating_min(sn: &SubspaceBasis, mut phi: ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix, f64)> {
    let mut best = f64::INFINITY;
    let mut psi = phi.clone();
    let mut slow = 0;
    for _ in 0..MAX_SWEEPS {
        let (_, vecs) = hermitian_eigen(&stacked_gram(sn, &phi))?;
        psi = vecs[0].clone();
        let (vals, vecs) = hermitian_eigen(&dual_gram(sn, &psi))?;
        phi = vecs[0].clone();
        let f = vals[0].max(0.0);
        if f < 1e-30 {
            return Ok((phi, psi, f.sqrt()));
        }
        if f > best * (1.0 - 1e-4) {
            slow += 1;
            if slow > 20 && f > 1e-10 {
                break;
            }
        } else {
            slow = 0;
        }
        best = best.min(f);
    }
    Ok((phi, psi, best.sqrt()))
}

/// Gauss-Newton on the bilinear system `χᵀ B_j φ = 0` with `χ = conj(ψ)`,
/// stepping in the orthogonal complements of `χ` and `φ`. Converges
/// quadratically near isolated roots where the descent above stalls.
fn newton_polish(
    sn: &SubspaceBasis,
    psi: ComplexMatrix,
    mut phi: ComplexMatrix,
    pol: &TolerancePolicy,
) -> Result<ComplexMatrix> {
    let dim = phi.rows();
    let b = sn.elements();
    let mut chi = psi.conj();
    let mut prev = f64::INFINITY;
    for _ in 0..NEWTON_STEPS {
        let t_chi = null_space(&chi.adjoint(), pol)?;
        let t_phi = null_space(&phi.adjoint(), pol)?;
        if t_chi.len() + 1 != dim || t_phi.len() + 1 != dim {
            break;
        }
        let chi_t = chi.transpose();
        let k = dim - 1;
        let mut rows = Vec::with_capacity(b.len());
        let mut rhs = Vec::with_capacity(b.len());
        let mut resid = 0.0;
        for bj in b {
            let bphi = bj * &phi;
            let left = &chi_t * bj;
            let f = (&chi_t * &bphi).get(0, 0);
            resid += f.norm_sqr();
            rhs.push(-f);
            let bphi_t = bphi.transpose();
            let row: Vec<C64> = t_chi
                .iter()
                .map(|t| (&bphi_t * t).get(0, 0))
                .chain(t_phi.iter().map(|t| (&left * t).get(0, 0)))
                .collect();
            rows.push(row);
        }
        // no nearby root: Gauss-Newton contracts fast or not at all
        if resid < 1e-30 || resid > 0.5 * prev {
            break;
        }
        prev = resid;
        let jac = ComplexMatrix::from_rows(&rows)?;
        let step = least_squares(&jac, &ComplexMatrix::column(&rhs), 1e-12)?;
        let (mut next_chi, mut next_phi) = (chi.clone(), phi.clone());
        for c in 0..k {
            next_chi = &next_chi + &t_chi[c].scale(step.get(c, 0));
            next_phi = &next_phi + &t_phi[c].scale(step.get(k + c, 0));
        }
        next_chi = next_chi.scale_real(1.0 / next_chi.frobenius_norm());
        next_phi = next_phi.scale_real(1.0 / next_phi.frobenius_norm());
        if !next_phi.is_finite() || !next_chi.is_finite() {
            break;
        }
        (chi, phi) = (next_chi, next_phi);
    }
    Ok(phi)
}

enum MinorOutcome {
    NoCommonRoot,
    Root(ComplexMatrix),
    Ambiguous,
}

/// Qubit test: `φ = (x, y)` is deficient iff all `2×2` minors
/// `det[B_jφ, B_kφ]` vanish. Each minor is a binary quadratic form; the forms
/// share a projective root iff that root annihilates the whole span of forms.
fn qubit_minor_test(sn: &SubspaceBasis, pol: &TolerancePolicy) -> Result<MinorOutcome> {
    let b = sn.elements();
    let mut rows: Vec<[C64; 3]> = Vec::new();
    for j in 0..b.len() {
        for k in j + 1..b.len() {
            let (p, q) = (&b[j], &b[k]);
            let g = |m: &ComplexMatrix, r, c| m.get(r, c);
            let xx = g(p, 0, 0) * g(q, 1, 0) - g(p, 1, 0) * g(q, 0, 0);
            let xy =
                g(p, 0, 0) * g(q, 1, 1) + g(p, 0, 1) * g(q, 1, 0) - g(p, 1, 0) * g(q, 0, 1) - g(p, 1, 1) * g(q, 0, 0);
            let yy = g(p, 0, 1) * g(q, 1, 1) - g(p, 1, 1) * g(q, 0, 1);
            rows.push([xx, xy, yy]);
        }
    }
    let scale = rows.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    if rows.is_empty() || scale == 0.0 {
        return Ok(MinorOutcome::Root(basis_vector(2, 0)));
    }
    let coeffs = ComplexMatrix::from_fn(rows.len(), 3, |r, c| rows[r][c]);
    if numerical_rank(&coeffs, pol)? == 3 {
        return Ok(MinorOutcome::NoCommonRoot);
    }
    let lead = rows.iter().max_by(|a, b| norm3(a).total_cmp(&norm3(b))).copied().expect("nonempty");
    let mut best: Option<(f64, ComplexMatrix)> = None;
    for phi in quadratic_roots(lead) {
        let resid = rows.iter().map(|r| eval_form(r, &phi).norm()).fold(0.0, f64::max) / scale;
        if best.as_ref().is_none_or(|(b, _)| resid < *b) {
            best = Some((resid, phi));
        }
    }
    Ok(match best {
        Some((resid, phi)) if resid <= 1e-10 => MinorOutcome::Root(phi),
        Some((resid, _)) if resid > 1e-6 => MinorOutcome::NoCommonRoot,
        _ => MinorOutcome::Ambiguous,
    })
}

fn norm3(r: &[C64; 3]) -> f64 {
    r.iter().map(|z| z.norm_sqr()).sum()
}

fn eval_form(r: &[C64; 3], phi: &ComplexMatrix) -> C64 {
    let (x, y) = (phi.get(0, 0), phi.get(1, 0));
    r[0] * x * x + r[1] * x * y + r[2] * y * y
}

/// Projective roots `(x : y)` of `a x² + b xy + c y²`, as unit vectors.
fn quadratic_roots([a, b, c]: [C64; 3]) -> Vec<ComplexMatrix> {
    let scale = a.norm().max(b.norm()).max(c.norm());
    let unit = |x: C64, y: C64| {
        let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
        ComplexMatrix::column(&[x / n, y / n])
    };
    let mut out = Vec::new();
    if a.norm() <= 1e-14 * scale {
        // y = 0 is a root; the other solves b x + c y = 0
        out.push(unit(ONE, ZERO));
        if b.norm() > 1e-14 * scale {
            out.push(unit(-c, b));
        }
        return out;
    }
    let disc = (b * b - a * c * 4.0).sqrt();
    // numerically stable pair of roots of a t² + b t + c with t = x / y
    let s = if (b.conj() * disc).re >= 0.0 { -(b + disc) } else { -(b - disc) };
    if s.norm() > 1e-300 {
        out.push(unit(s / (a * 2.0), ONE));
        out.push(unit(c * 2.0 / s, ONE));
    } else {
        out.push(unit(ZERO, ONE));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots_are_roots() {
        let forms = [
            [ONE, C64::new(-3.0, 0.0), C64::new(2.0, 0.0)],
            [ZERO, ONE, C64::new(0.5, 1.0)],
            [C64::new(0.0, 1.0), ZERO, ONE],
            [ONE, C64::new(2.0, 0.0), ONE],
        ];
        for f in forms {
            for phi in quadratic_roots(f) {
                assert!(eval_form(&f, &phi).norm() < 1e-12, "{f:?}");
            }
        }
    }

    #[test]
    fn single_restart_finds_isolated_witness() {
        // S_2 has dimension 4 = 2D - 2 here, so deficient φ are isolated points
        let pol = TolerancePolicy::default();
        let ch = crate::generators::random_channel(3, 2, 0).unwrap();
        let search = QSearch { effort: 1, seed: 0 };
        let b = q_bracket(&ch, Some(4), search, &pol).unwrap();
        assert_eq!((b.q_lower, b.q_upper), (3, 4));
    }
}
