//! Exact rank arithmetic over the Gaussian integers.
//!
//! Every finite `f64` is a dyadic rational, so any floating-point input has an
//! exact Gaussian-rational reading. Scaling a matrix by a power of two does not
//! change any span, so matrices are lifted to `Z[i]` and reduced by
//! cross-multiplication (fraction-free elimination) with content removal.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::ComplexMatrix;
use crate::error::{invalid, Result};

/// Element of `Z[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        Self { re: re.into(), im: im.into() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self { re: BigInt::one(), im: BigInt::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl Add for &GaussInt {
    type Output = GaussInt;
    fn add(self, o: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &GaussInt {
    type Output = GaussInt;
    fn sub(self, o: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for &GaussInt {
    type Output = GaussInt;
    fn mul(self, o: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
}

impl Neg for &GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt { re: -&self.re, im: -&self.im }
    }
}

/// Splits a finite double into `mantissa · 2^exp` with an odd mantissa.
fn dyadic(x: f64) -> (BigInt, i32) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mant, mut exp) = if raw_exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), raw_exp - 1075) };
    let tz = mant.trailing_zeros();
    mant >>= tz;
    exp += tz as i32;
    (BigInt::from(sign) * BigInt::from(mant), exp)
}

/// Dense matrix over `Z[i]`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussInt>,
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<GaussInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(invalid("entry count does not match shape"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![GaussInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = GaussInt::one();
        }
        m
    }

    /// Lifts a floating matrix to `Z[i]` after multiplying by the smallest
    /// power of two that clears all denominators (integer matrices are kept
    /// as they are). Returns the lifted matrix and the exponent used.
    pub fn lift(m: &ComplexMatrix) -> (Self, u32) {
        let parts: Vec<((BigInt, i32), (BigInt, i32))> =
            m.data().iter().map(|z| (dyadic(z.re), dyadic(z.im))).collect();
        let min_exp = parts
            .iter()
            .flat_map(|(a, b)| [a, b])
            .filter(|(mant, _)| !mant.is_zero())
            .map(|(_, e)| *e)
            .min()
            .unwrap_or(0);
        let shift = (-min_exp).max(0) as u32;
        let lift = |(mant, e): &(BigInt, i32)| -> BigInt {
            if mant.is_zero() {
                BigInt::zero()
            } else {
                mant << ((*e + shift as i32) as u32)
            }
        };
        let data = parts.iter().map(|(a, b)| GaussInt { re: lift(a), im: lift(b) }).collect();
        (Self { rows: m.rows(), cols: m.cols(), data }, shift)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &GaussInt {
        &self.data[r * self.cols + c]
    }

    pub fn data(&self) -> &[GaussInt] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(GaussInt::is_zero)
    }

    pub fn mul(&self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, o.rows, "exact product shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let b = o.get(k, c);
                    if !b.is_zero() {
                        let idx = r * o.cols + c;
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, n: usize) -> ExactMatrix {
        (0..n).fold(Self::identity(self.rows), |acc, _| acc.mul(self))
    }
}

/// Incrementally maintained echelon basis of a subspace of `Z[i]^n`.
#[derive(Clone, Debug)]
pub struct ExactEchelon {
    len: usize,
    // (pivot, vector) sorted by pivot; each vector is zero before its pivot
    rows: Vec<(usize, Vec<GaussInt>)>,
}

impl ExactEchelon {
    pub fn new(len: usize) -> Self {
        Self { len, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.len
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[GaussInt]> {
        self.rows.iter().map(|(_, v)| v.as_slice())
    }

    /// Inserts `v`; returns whether it enlarged the span.
    pub fn insert(&mut self, mut v: Vec<GaussInt>) -> bool {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        for (p, e) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let (ep, vp) = (e[*p].clone(), v[*p].clone());
            for j in *p..self.len {
                v[j] = &(&ep * &v[j]) - &(&vp * &e[j]);
            }
            remove_content(&mut v);
        }
        match v.iter().position(|z| !z.is_zero()) {
            None => false,
            Some(pivot) => {
                let at = self.rows.partition_point(|(p, _)| *p < pivot);
                self.rows.insert(at, (pivot, v));
                true
            }
        }
    }
}

fn remove_content(v: &mut [GaussInt]) {
    let mut g = BigInt::zero();
    for z in v.iter() {
        g = g.gcd(&z.re).gcd(&z.im);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    let g = g.abs();
    for z in v.iter_mut() {
        z.re = &z.re / &g;
        z.im = &z.im / &g;
    }
}

/// Exact rank of a family of matrices viewed as vectors.
pub fn exact_rank(mats: &[ExactMatrix]) -> usize {
    let Some(first) = mats.first() else { return 0 };
    let mut ech = ExactEchelon::new(first.rows * first.cols);
    for m in mats {
        ech.insert(m.data.clone());
        if ech.is_full() {
            break;
        }
    }
    ech.rank()
}

/// Exact counterpart of the floating span engine: dimensions of
/// `S_n = span{A_{k1}…A_{kn}}` for the lifted Kraus operators.
#[derive(Clone, Debug)]
pub struct ExactSpanEngine {
    dim: usize,
    kraus: Vec<ExactMatrix>,
}

impl ExactSpanEngine {
    pub fn new(kraus: &[ComplexMatrix]) -> Result<Self> {
        let dim = kraus.first().ok_or_else(|| invalid("no Kraus operators"))?.rows();
        if kraus.iter().any(|k| k.shape() != (dim, dim)) {
            return Err(invalid("Kraus operators must all be DxD"));
        }
        Ok(Self { dim, kraus: kraus.iter().map(|k| ExactMatrix::lift(k).0).collect() })
    }

    pub fn kraus(&self) -> &[ExactMatrix] {
        &self.kraus
    }

    fn to_matrix(&self, v: &[GaussInt]) -> ExactMatrix {
        ExactMatrix { rows: self.dim, cols: self.dim, data: v.to_vec() }
    }

    fn first(&self) -> ExactEchelon {
        let mut ech = ExactEchelon::new(self.dim * self.dim);
        for k in &self.kraus {
            ech.insert(k.data.clone());
        }
        ech
    }

    fn step(&self, s: &ExactEchelon) -> ExactEchelon {
        let mut next = ExactEchelon::new(self.dim * self.dim);
        for b in s.vectors() {
            let b = self.to_matrix(b);
            for a in &self.kraus {
                next.insert(a.mul(&b).data);
                if next.is_full() {
                    return next;
                }
            }
        }
        next
    }

    /// Number of linearly independent Kraus operators.
    pub fn independent_count(&self) -> usize {
        self.first().rank()
    }

    /// `[dim S_1, …, dim S_{n_max}]`, filling with `D²` once full.
    pub fn s_dims(&self, n_max: usize) -> Vec<usize> {
        let full = self.dim * self.dim;
        let mut out = Vec::with_capacity(n_max);
        let mut s = self.first();
        for n in 1..=n_max {
            if n > 1 {
                s = self.step(&s);
            }
            out.push(s.rank());
            if s.is_full() {
                out.resize(n_max, full);
                break;
            }
        }
        out
    }

    /// Least `n ≤ cap` with `S_n` full, where `cap = (D² − d + 1)·D²`.
    pub fn kraus_rank_index(&self) -> Option<usize> {
        let full = self.dim * self.dim;
        let mut s = self.first();
        let cap = (full - s.rank() + 1) * full;
        for n in 1..=cap {
            if n > 1 {
                s = self.step(&s);
            }
            if s.is_full() {
                return Some(n);
            }
            if s.rank() == 0 {
                return None;
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::pauli_matrices;

    #[test]
    fn dyadic_decomposition() {
        assert_eq!(dyadic(0.75), (BigInt::from(3), -2));
        assert_eq!(dyadic(-8.0), (BigInt::from(-1), 3));
        assert_eq!(dyadic(1.0), (BigInt::from(1), 0));
    }

    #[test]
    fn lift_keeps_integers() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[2.0, 0.0]]).unwrap();
        let (e, shift) = ExactMatrix::lift(&m);
        assert_eq!(shift, 0);
        assert_eq!(e.get(1, 0), &GaussInt::new(2, 0));
        let h = ComplexMatrix::from_real_rows(&[&[0.5, 0.25]]).unwrap();
        let (e, shift) = ExactMatrix::lift(&h);
        assert_eq!(shift, 2);
        assert_eq!(e.get(0, 0), &GaussInt::new(2, 0));
    }

    #[test]
    fn echelon_rank() {
        let mut ech = ExactEchelon::new(3);
        let v = |a: i64, b: i64, c: i64| vec![GaussInt::new(a, 0), GaussInt::new(b, 0), GaussInt::new(c, 0)];
        assert!(ech.insert(v(1, 2, 3)));
        assert!(ech.insert(v(2, 4, 7)));
        assert!(!ech.insert(v(3, 6, 10)));
        assert!(ech.insert(vec![GaussInt::zero(), GaussInt::new(0, 1), GaussInt::zero()]));
        assert!(ech.is_full());
    }

    #[test]
    fn pauli_spans_exact() {
        let e = ExactSpanEngine::new(&pauli_matrices()).unwrap();
        assert_eq!(e.s_dims(3), vec![3, 4, 4]);
        assert_eq!(e.kraus_rank_index(), Some(2));
    }
}
