//! Named example families and seeded random instances.
//!
//! Random streams use `ChaCha8Rng::seed_from_u64(seed)`; complex Gaussian
//! entries are drawn with `StandardNormal`, real part first, in row-major
//! order. Both are platform independent, so a seed pins the output bit for bit.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{KrausChannel, StochasticMatrix};
use crate::error::{invalid, Result};
use crate::mps::MpsTensor;
use crate::numerics::{pauli_matrices, ComplexMatrix, TolerancePolicy, C64, ONE, ZERO};

fn pol() -> TolerancePolicy {
    TolerancePolicy::default()
}

/// Kraus operators `σ_α/√3`.
pub fn pauli_channel() -> KrausChannel {
    let s = 1.0 / 3f64.sqrt();
    KrausChannel::from_kraus(pauli_matrices().iter().map(|p| p.scale_real(s)).collect())
        .expect("Pauli Kraus operators are valid")
}

/// Cyclic shift `Σ_i |i+1 mod D⟩⟨i|`.
pub fn cyclic_shift(dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |r, c| if r == (c + 1) % dim { ONE } else { ZERO })
}

/// The raw operators `A_0 = Σ_i |i+1 mod D⟩⟨i|` and `A_1 = |1⟩⟨D−1|`.
pub fn shift_chord_kraus(dim: usize) -> Result<Vec<ComplexMatrix>> {
    if dim < 2 {
        return Err(invalid(format!("shift_chord needs D >= 2, got {dim}")));
    }
    Ok(vec![cyclic_shift(dim), ComplexMatrix::unit(dim, 1, dim - 1)])
}

/// CP map (not trace preserving) with `i(A) = D² − D`.
pub fn shift_chord_channel(dim: usize) -> Result<KrausChannel> {
    KrausChannel::from_kraus(shift_chord_kraus(dim)?)
}

/// Column-stochastic matrix on the arcs `i → i+1` (`i < D−1`), `D−1 → 0` and
/// `D−1 → 1`, uniform per column. Its exponent is `D² − 2D + 2`.
pub fn wielandt_digraph(dim: usize) -> Result<StochasticMatrix> {
    if dim < 3 {
        return Err(invalid(format!("wielandt_digraph needs D >= 3, got {dim}")));
    }
    let mut rows = vec![vec![0.0; dim]; dim];
    for i in 0..dim - 1 {
        rows[i + 1][i] = 1.0;
    }
    rows[0][dim - 1] = 0.5;
    rows[1][dim - 1] = 0.5;
    StochasticMatrix::new(rows, &pol())
}

/// `E(X) = (1−w)X + w·tr(X)·1/D`.
pub fn depolarizing(dim: usize, weight: f64) -> Result<KrausChannel> {
    if dim == 0 || !(0.0..=1.0).contains(&weight) {
        return Err(invalid(format!("depolarizing needs D >= 1 and w in [0, 1], got D={dim}, w={weight}")));
    }
    let mut kraus = vec![ComplexMatrix::identity(dim).scale_real((1.0 - weight).sqrt())];
    let s = (weight / dim as f64).sqrt();
    for i in 0..dim {
        for j in 0..dim {
            kraus.push(ComplexMatrix::unit(dim, i, j).scale_real(s));
        }
    }
    KrausChannel::from_kraus(kraus)
}

/// Qubit amplitude damping with decay probability `gamma`.
pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(invalid(format!("amplitude damping needs gamma in [0, 1], got {gamma}")));
    }
    let k0 = ComplexMatrix::diag(&[ONE, C64::new((1.0 - gamma).sqrt(), 0.0)]);
    let k1 = ComplexMatrix::unit(2, 0, 1).scale_real(gamma.sqrt());
    KrausChannel::from_kraus(vec![k0, k1])
}

/// Unitary channel of the cyclic shift.
pub fn cyclic_shift_unitary(dim: usize) -> Result<KrausChannel> {
    if dim == 0 {
        return Err(invalid("cyclic_shift_unitary needs D >= 1"));
    }
    KrausChannel::from_kraus(vec![cyclic_shift(dim)])
}

/// GHZ tensor `A_i = |i⟩⟨i|`, `i < D`.
pub fn ghz_tensor(bond: usize) -> Result<MpsTensor> {
    if bond < 2 {
        return Err(invalid("ghz_tensor needs D >= 2"));
    }
    MpsTensor::new((0..bond).map(|i| ComplexMatrix::unit(bond, i, i)).collect())
}

/// AKLT-type tensor `A_α = σ_α`.
pub fn aklt_tensor() -> MpsTensor {
    MpsTensor::new(pauli_matrices().to_vec()).expect("Pauli tensor is valid")
}

fn gaussian_block(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// `D×D` complex Gaussian matrices drawn from one seeded stream.
pub fn random_gaussian_matrices(dim: usize, count: usize, seed: u64) -> Vec<ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| gaussian_block(&mut rng, dim, dim)).collect()
}

/// Random TP channel: the columns of a `dD×D` complex Gaussian matrix are
/// orthonormalized (modified Gram–Schmidt, two passes) into an isometry `V`
/// and `A_k` is the `k`-th `D×D` block of rows.
pub fn random_channel(dim: usize, d: usize, seed: u64) -> Result<KrausChannel> {
    if dim == 0 || d == 0 || d > dim * dim {
        return Err(invalid(format!("random_channel needs 1 <= d <= D^2, got D={dim}, d={d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_block(&mut rng, d * dim, dim);
    let v = orthonormal_columns(&g)?;
    let kraus = (0..d).map(|k| ComplexMatrix::from_fn(dim, dim, |r, c| v.get(k * dim + r, c))).collect();
    KrausChannel::from_kraus(kraus)
}

fn orthonormal_columns(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = g.shape();
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for c in 0..cols {
        let mut v: Vec<C64> = (0..rows).map(|r| g.get(r, c)).collect();
        for _ in 0..2 {
            for u in &q {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 1e-12 {
            return Err(invalid("Gaussian draw is numerically rank deficient"));
        }
        q.push(v.into_iter().map(|z| z / norm).collect());
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |r, c| q[c][r]))
}

/// Random MPS tensor with complex Gaussian matrices.
pub fn random_tensor(phys_d: usize, bond: usize, seed: u64) -> Result<MpsTensor> {
    MpsTensor::new(random_gaussian_matrices(bond, phys_d, seed))
}

/// Random column-stochastic matrix: each column gets a random support that
/// always contains the diagonal entry and its successor, so the result is
/// primitive whenever `D ≥ 1`.
pub fn random_primitive_stochastic(dim: usize, seed: u64) -> Result<StochasticMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![vec![0.0; dim]; dim];
    for j in 0..dim {
        let mut weights: Vec<f64> = (0..dim)
            .map(|i| {
                let forced = i == j || i == (j + 1) % dim;
                if forced || rng.random_bool(0.25) {
                    rng.random_range(0.1..1.0)
                } else {
                    0.0
                }
            })
            .collect();
        let s: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= s);
        for (row, w) in rows.iter_mut().zip(&weights) {
            row[j] = *w;
        }
    }
    // column sums are exact up to rounding; renormalize the last entry
    for j in 0..dim {
        let s: f64 = rows.iter().map(|row| row[j]).sum();
        if let Some(row) = rows.iter_mut().rev().find(|row| row[j] > 0.0) {
            row[j] += 1.0 - s;
        }
    }
    StochasticMatrix::new(rows, &pol())
}

/// Generator families addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorName {
    Pauli,
    ShiftChord,
    WielandtDigraph,
    Depolarizing,
    AmplitudeDamping,
    CyclicShiftUnitary,
    GhzTensor,
    AkltTensor,
    RandomChannel,
}

impl GeneratorName {
    pub const ALL: [GeneratorName; 9] = [
        Self::Pauli,
        Self::ShiftChord,
        Self::WielandtDigraph,
        Self::Depolarizing,
        Self::AmplitudeDamping,
        Self::CyclicShiftUnitary,
        Self::GhzTensor,
        Self::AkltTensor,
        Self::RandomChannel,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pauli => "pauli",
            Self::ShiftChord => "shift_chord",
            Self::WielandtDigraph => "wielandt_digraph",
            Self::Depolarizing => "depolarizing",
            Self::AmplitudeDamping => "amplitude_damping",
            Self::CyclicShiftUnitary => "cyclic_shift_unitary",
            Self::GhzTensor => "ghz_tensor",
            Self::AkltTensor => "aklt_tensor",
            Self::RandomChannel => "random_channel",
        }
    }
}

/// `name[:key=val,key=val]`, e.g. `shift_chord:D=4` or
/// `random_channel:D=3,d=2,seed=7`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub name: GeneratorName,
    pub params: BTreeMap<String, String>,
}

impl FromStr for GeneratorSpec {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let name = GeneratorName::ALL
            .into_iter()
            .find(|g| g.as_str() == name.trim())
            .ok_or_else(|| invalid(format!("unknown generator '{name}'")))?;
        let mut params = BTreeMap::new();
        for kv in rest.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
            let (k, v) =
                kv.split_once('=').ok_or_else(|| invalid(format!("generator parameter '{kv}' is not key=value")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { name, params })
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name.as_str())?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

impl GeneratorSpec {
    fn get<T: FromStr>(&self, keys: &[&str], default: Option<T>) -> Result<T> {
        for k in keys {
            if let Some(v) = self.params.get(*k) {
                return v.parse().map_err(|_| invalid(format!("cannot parse {k}={v} for {}", self.name.as_str())));
            }
        }
        default.ok_or_else(|| invalid(format!("{} requires parameter {}", self.name.as_str(), keys[0])))
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(invalid(format!("unknown parameter '{k}' for {}", self.name.as_str()))),
            None => Ok(()),
        }
    }
}

/// Output of [`named_channel`].
#[derive(Debug, Clone)]
pub enum Generated {
    Channel(KrausChannel),
    Tensor(MpsTensor),
    Stochastic(StochasticMatrix),
}

/// Builds the object named by `spec`.
pub fn named_channel(spec: &GeneratorSpec) -> Result<Generated> {
    use GeneratorName::*;
    Ok(match spec.name {
        Pauli => {
            spec.check_keys(&[])?;
            Generated::Channel(pauli_channel())
        }
        ShiftChord => {
            spec.check_keys(&["D"])?;
            Generated::Channel(shift_chord_channel(spec.get(&["D"], Some(3))?)?)
        }
        WielandtDigraph => {
            spec.check_keys(&["D"])?;
            Generated::Stochastic(wielandt_digraph(spec.get(&["D"], Some(3))?)?)
        }
        Depolarizing => {
            spec.check_keys(&["D", "w", "p"])?;
            Generated::Channel(depolarizing(spec.get(&["D"], Some(2))?, spec.get(&["w", "p"], Some(1.0))?)?)
        }
        AmplitudeDamping => {
            spec.check_keys(&["gamma"])?;
            Generated::Channel(amplitude_damping(spec.get(&["gamma"], Some(0.5))?)?)
        }
        CyclicShiftUnitary => {
            spec.check_keys(&["D"])?;
            Generated::Channel(cyclic_shift_unitary(spec.get(&["D"], Some(3))?)?)
        }
        GhzTensor => {
            spec.check_keys(&["D"])?;
            Generated::Tensor(ghz_tensor(spec.get(&["D"], Some(2))?)?)
        }
        AkltTensor => {
            spec.check_keys(&[])?;
            Generated::Tensor(aklt_tensor())
        }
        RandomChannel => {
            spec.check_keys(&["D", "d", "seed"])?;
            Generated::Channel(random_channel(
                spec.get(&["D"], None)?,
                spec.get(&["d"], None)?,
                spec.get(&["seed"], Some(0))?,
            )?)
        }
    })
}
