//! Dense arithmetic in the truncated tensor algebra `T^N(R^d)`.
//!
//! A [`TruncatedTensor`] stores levels `0..=N` back to back in one flat
//! buffer. Level `k` holds `d^k` coefficients indexed by words of length `k`
//! in lexicographic order, so the flat buffer is exactly the canonical
//! (length, lexicographic) flattening used by the JSON format.

use crate::error::{Error, Result};
use crate::scalar::{factorial_f64, Real, Scalar};

use std::sync::atomic::{AtomicUsize, Ordering};

/// Default upper bound on the number of coefficients in one tensor.
pub const DEFAULT_ENTRY_CAP: usize = 10_000_000;

static ENTRY_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_ENTRY_CAP);

/// Process-wide coefficient cap used by constructors without an explicit cap.
pub fn entry_cap() -> usize {
    ENTRY_CAP.load(Ordering::Relaxed)
}

pub fn set_entry_cap(cap: usize) {
    ENTRY_CAP.store(cap, Ordering::Relaxed);
}

/// `Σ_{k=0..depth} d^k`, failing if it exceeds `cap`.
pub(crate) fn count_entries(
    d: usize,
    depth: usize,
    cap: usize,
    what: &'static str,
) -> Result<usize> {
    if d == 0 {
        return Err(Error::EmptyAlphabet);
    }
    let mut total: u128 = 0;
    let mut pow: u128 = 1;
    for _ in 0..=depth {
        total += pow;
        if total > cap as u128 {
            return Err(Error::CapExceeded {
                what,
                requested: total,
                cap,
            });
        }
        pow = pow.saturating_mul(d as u128);
    }
    Ok(total as usize)
}

/// Flat offset of level `k`: `Σ_{j<k} d^j`.
#[inline]
pub fn level_offset(d: usize, k: usize) -> usize {
    if d == 1 {
        k
    } else {
        (d.pow(k as u32) - 1) / (d - 1)
    }
}

/// Element of `T^N(R^d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedTensor<S> {
    d: usize,
    depth: usize,
    data: Vec<S>,
}

impl<S: Scalar> TruncatedTensor<S> {
    pub fn zeros(d: usize, depth: usize) -> Result<Self> {
        Self::zeros_with_cap(d, depth, entry_cap())
    }

    pub fn zeros_with_cap(d: usize, depth: usize, cap: usize) -> Result<Self> {
        let len = count_entries(d, depth, cap, "tensor")?;
        Ok(Self {
            d,
            depth,
            data: vec![S::zero(); len],
        })
    }

    /// The unit `𝟙 = (1, 0, 0, …)`.
    pub fn unit(d: usize, depth: usize) -> Result<Self> {
        Self::unit_with_cap(d, depth, entry_cap())
    }

    pub fn unit_with_cap(d: usize, depth: usize, cap: usize) -> Result<Self> {
        let mut t = Self::zeros_with_cap(d, depth, cap)?;
        t.data[0] = S::one();
        Ok(t)
    }

    /// Tensor that is `v` at level one and zero elsewhere.
    pub fn from_vector(v: &[S], depth: usize) -> Result<Self> {
        let mut t = Self::zeros(v.len(), depth)?;
        if depth >= 1 {
            t.level_mut(1).clone_from_slice(v);
        }
        Ok(t)
    }

    /// Builds a tensor from the canonical flattening.
    pub fn from_flat(d: usize, depth: usize, data: Vec<S>) -> Result<Self> {
        Self::from_flat_with_cap(d, depth, data, entry_cap())
    }

    pub fn from_flat_with_cap(d: usize, depth: usize, data: Vec<S>, cap: usize) -> Result<Self> {
        let len = count_entries(d, depth, cap, "tensor")?;
        if data.len() != len {
            return Err(Error::BadLength {
                got: data.len(),
                d,
                depth,
            });
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite_value()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { d, depth, data })
    }

    /// Builds a tensor from one coefficient array per level.
    pub fn from_levels(d: usize, levels: Vec<Vec<S>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::BadLength {
                got: 0,
                d,
                depth: 0,
            });
        }
        let depth = levels.len() - 1;
        for (k, level) in levels.iter().enumerate() {
            if d == 0 || level.len() != d.pow(k as u32) {
                return Err(Error::BadLength {
                    got: level.len(),
                    d,
                    depth: k,
                });
            }
        }
        Self::from_flat(d, depth, levels.into_iter().flatten().collect())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Canonical flattening: level ascending, lexicographic within level.
    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<S> {
        self.data
    }

    pub fn level(&self, k: usize) -> &[S] {
        let start = level_offset(self.d, k);
        &self.data[start..start + self.d.pow(k as u32)]
    }

    pub fn level_mut(&mut self, k: usize) -> &mut [S] {
        let start = level_offset(self.d, k);
        let len = self.d.pow(k as u32);
        &mut self.data[start..start + len]
    }

    pub fn levels(&self) -> impl Iterator<Item = &[S]> {
        (0..=self.depth).map(move |k| self.level(k))
    }

    pub fn scalar_part(&self) -> &S {
        &self.data[0]
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.d == other.d && self.depth == other.depth
    }

    pub(crate) fn check_shape(&self, other: &Self) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                left_d: self.d,
                left_depth: self.depth,
                right_d: other.d,
                right_depth: other.depth,
            })
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn zeros_like(&self) -> Self {
        Self {
            d: self.d,
            depth: self.depth,
            data: vec![S::zero(); self.data.len()],
        }
    }

    fn unit_like(&self) -> Self {
        let mut t = self.zeros_like();
        t.data[0] = S::one();
        t
    }

    /// Tensor product: level `k` is `Σ_{n+m=k} a_n ⊗ b_m`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let d = self.d;
        let mut out = self.zeros_like();
        for k in 0..=self.depth {
            let start = level_offset(d, k);
            let out_k = &mut out.data[start..start + d.pow(k as u32)];
            for n in 0..=k {
                let a_n = self.level(n);
                let b_m = other.level(k - n);
                let stride = b_m.len();
                for (u, au) in a_n.iter().enumerate() {
                    if au.is_zero() {
                        continue;
                    }
                    let row = &mut out_k[u * stride..(u + 1) * stride];
                    for (o, bv) in row.iter_mut().zip(b_m) {
                        *o += au.clone() * bv.clone();
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (o, b) in out.data.iter_mut().zip(&other.data) {
            *o += b.clone();
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (o, b) in out.data.iter_mut().zip(&other.data) {
            *o -= b.clone();
        }
        Ok(out)
    }

    pub fn scale(&self, lambda: S) -> Self {
        let mut out = self.clone();
        for o in out.data.iter_mut() {
            *o *= lambda.clone();
        }
        out
    }

    /// Canonical projection `π^N_n` onto levels `0..=n`.
    pub fn project(&self, n: usize) -> Result<Self> {
        if n > self.depth {
            return Err(Error::DepthExceeded {
                requested: n,
                depth: self.depth,
            });
        }
        let len = level_offset(self.d, n + 1);
        Ok(Self {
            d: self.d,
            depth: n,
            data: self.data[..len].to_vec(),
        })
    }

    /// Neumann series inverse `a₀⁻¹ Σ_{k=0..N} (−b)^{⊗k}` with `b = a₀⁻¹a − 𝟙`.
    pub fn inverse(&self) -> Result<Self> {
        let a0 = self.data[0].clone();
        if a0.is_zero() {
            return Err(Error::NotInvertible);
        }
        let inv_a0 = S::one() / a0;
        let mut b = self.scale(inv_a0.clone());
        b.data[0] = S::zero();
        // r ← 𝟙 − b⊗r, N times
        let mut r = self.unit_like();
        for _ in 0..self.depth {
            let mut next = b.mul_unchecked(&r).scale(-S::one());
            next.data[0] += S::one();
            r = next;
        }
        Ok(r.scale(inv_a0))
    }

    /// `Σ_{n=0..N} a^{⊗n}/n!`, evaluated by nested multiplication.
    pub fn exp(&self) -> Result<Self> {
        if !self.data[0].is_zero() {
            return Err(Error::ExpDomain);
        }
        // r ← 𝟙 + (a⊗r)/n for n = N, …, 1
        let mut r = self.unit_like();
        for n in (1..=self.depth).rev() {
            let mut next = self.mul_unchecked(&r).scale(S::one() / S::from_count(n));
            next.data[0] += S::one();
            r = next;
        }
        Ok(r)
    }

    /// `Σ_{n=1..N} (−1)^{n+1} (a−𝟙)^{⊗n}/n`, evaluated by nested multiplication.
    pub fn log(&self) -> Result<Self> {
        if self.data[0] != S::one() {
            return Err(Error::LogDomain);
        }
        if self.depth == 0 {
            return Ok(self.zeros_like());
        }
        let mut b = self.clone();
        b.data[0] = S::zero();
        let coeff = |n: usize| {
            let c = S::one() / S::from_count(n);
            if n % 2 == 1 {
                c
            } else {
                -c
            }
        };
        let mut r = self.unit_like().scale(coeff(self.depth));
        for n in (1..self.depth).rev() {
            let mut next = b.mul_unchecked(&r);
            next.data[0] += coeff(n);
            r = next;
        }
        Ok(b.mul_unchecked(&r))
    }

    /// Dilation `δ_λ`: level `k` scaled by `λ^k`.
    pub fn dilation(&self, lambda: S) -> Self {
        let mut out = self.clone();
        let mut factor = S::one();
        for k in 1..=self.depth {
            factor *= lambda.clone();
            for x in out.level_mut(k) {
                *x *= factor.clone();
            }
        }
        out
    }

    /// `v^{⊗k}/k!` at each level, computed level by level.
    pub(crate) fn exp_of_vector(v: &[S], depth: usize) -> Result<Self> {
        let d = v.len();
        let mut t = Self::zeros(d, depth)?;
        t.data[0] = S::one();
        for k in 1..=depth {
            let (prev_part, cur_part) = t.data.split_at_mut(level_offset(d, k));
            let prev = &prev_part[level_offset(d, k - 1)..];
            let cur = &mut cur_part[..d.pow(k as u32)];
            let inv_k = S::one() / S::from_count(k);
            for (u, pu) in prev.iter().enumerate() {
                let scaled = pu.clone() * inv_k.clone();
                for (j, vj) in v.iter().enumerate() {
                    cur[u * d + j] = scaled.clone() * vj.clone();
                }
            }
        }
        Ok(t)
    }
}

impl<S: Real> TruncatedTensor<S> {
    /// Euclidean norm of level `k` in the orthonormal word basis.
    pub fn hs_norm_level(&self, k: usize) -> S {
        self.level(k)
            .iter()
            .fold(S::zero(), |acc, &x| acc + x * x)
            .sqrt()
    }

    /// Hilbert–Schmidt norm of the whole tensor.
    pub fn hs_norm(&self) -> S {
        self.data
            .iter()
            .fold(S::zero(), |acc, &x| acc + x * x)
            .sqrt()
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> S {
        self.data.iter().fold(S::zero(), |acc, &x| acc.max(x.abs()))
    }

    /// `‖self − other‖ / (1 + ‖self‖)`.
    pub fn rel_diff(&self, other: &Self) -> Result<S> {
        let diff = self.sub(other)?;
        Ok(diff.hs_norm() / (S::one() + self.hs_norm()))
    }

    /// `‖self − other‖ ≤ tol·(1 + ‖self‖)`.
    pub fn approx_eq(&self, other: &Self, tol: S) -> bool {
        matches!(self.rel_diff(other), Ok(r) if r <= tol)
    }

    /// `max_k (k!‖x_k‖)^{1/k}` over `k = 1..N`.
    fn graded_max(&self) -> S {
        (1..=self.depth)
            .map(|k| {
                let scaled = S::from_f64(factorial_f64(k)) * self.hs_norm_level(k);
                scaled.powf(S::one() / S::from_count(k))
            })
            .fold(S::zero(), S::max)
    }

    /// Homogeneous norm `|x| = max_k (k!‖x_k‖)^{1/k} + max_k (k!‖(x⁻¹)_k‖)^{1/k}`
    /// on tensors with level-0 entry equal to one.
    pub fn homogeneous_norm(&self) -> Result<S> {
        if self.data[0] != S::one() {
            return Err(Error::LevelZero { expected: "1" });
        }
        let inv = self.inverse()?;
        Ok(self.graded_max() + inv.graded_max())
    }

    /// `ρ_N(x, y) = |x⁻¹ ⊗ y|`, evaluated as `|𝟙 + x⁻¹ ⊗ (y − x)|` so that
    /// rounding scales with `y − x` and `ρ_N(x, x) = 0` exactly.
    pub fn rho_metric(&self, other: &Self) -> Result<S> {
        self.check_shape(other)?;
        if self.data[0] != S::one() || other.data[0] != S::one() {
            return Err(Error::LevelZero { expected: "1" });
        }
        let mut z = self.inverse()?.mul_unchecked(&other.sub(self)?);
        z.data[0] = S::one();
        z.homogeneous_norm()
    }
}
