//! Signatures of sampled paths.
//!
//! A [`SampledPath`] is read as the piecewise-linear curve through its
//! samples. The signature of a linear piece with increment `Δx` is the tensor
//! exponential of `Δx`, and pieces are combined with Chen's relation
//! `X_{s,t} = X_{s,u} ⊗ X_{u,t}`. [`brute_force_sig`] evaluates the iterated
//! integrals directly with left-point sums and serves as an independent check.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{count_entries, entry_cap, TruncatedTensor};

/// Strictly increasing times in `[0, 1]` with one point of `R^d` per time.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPath<S> {
    d: usize,
    times: Vec<S>,
    points: Vec<S>,
}

impl<S: Scalar> SampledPath<S> {
    pub fn new(times: Vec<S>, points: Vec<Vec<S>>) -> Result<Self> {
        let d = points.first().map(Vec::len).unwrap_or(0);
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.len() != d) {
            return Err(Error::InvalidPath(format!(
                "point {i} has {} coordinates, expected {d}",
                p.len()
            )));
        }
        Self::from_flat(d, times, points.into_iter().flatten().collect())
    }

    /// `points` holds `times.len()` rows of `d` coordinates back to back.
    pub fn from_flat(d: usize, times: Vec<S>, points: Vec<S>) -> Result<Self> {
        if d == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if times.is_empty() {
            return Err(Error::InvalidPath("no samples".into()));
        }
        if points.len() != times.len() * d {
            return Err(Error::InvalidPath(format!(
                "{} coordinates for {} samples of dimension {d}",
                points.len(),
                times.len()
            )));
        }
        if let Some(i) = times.iter().position(|t| !t.is_finite_value()) {
            return Err(Error::InvalidPath(format!("time {i} is not finite")));
        }
        if let Some(i) = points.iter().position(|x| !x.is_finite_value()) {
            return Err(Error::InvalidPath(format!(
                "sample {} has a non-finite coordinate",
                i / d
            )));
        }
        if let Some(i) = times.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPath(format!(
                "times not strictly increasing at sample {}",
                i + 1
            )));
        }
        if times[0] < S::zero() || *times.last().unwrap() > S::one() {
            return Err(Error::InvalidPath("times must lie in [0, 1]".into()));
        }
        Ok(Self { d, times, points })
    }

    /// Samples at evenly spaced times `i/(n−1)` on `[0, 1]`.
    pub fn uniform(points: Vec<Vec<S>>) -> Result<Self> {
        let n = points.len();
        let times = if n <= 1 {
            vec![S::zero(); n]
        } else {
            let last = S::from_count(n - 1);
            (0..n).map(|i| S::from_count(i) / last.clone()).collect()
        };
        Self::new(times, points)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[S] {
        &self.times
    }

    pub fn point(&self, i: usize) -> &[S] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn start_time(&self) -> &S {
        &self.times[0]
    }

    pub fn end_time(&self) -> &S {
        self.times.last().unwrap()
    }

    /// Value of the piecewise-linear interpolant at `t`; exact at sample times.
    pub fn value_at(&self, t: &S) -> Result<Vec<S>> {
        if t < self.start_time() || t > self.end_time() {
            return Err(Error::InvalidInterval {
                s: t.to_f64_lossy(),
                t: t.to_f64_lossy(),
            });
        }
        let i = self.times.partition_point(|x| x <= t) - 1;
        if self.times[i] == *t || i + 1 == self.len() {
            return Ok(self.point(i).to_vec());
        }
        let w = (t.clone() - self.times[i].clone())
            / (self.times[i + 1].clone() - self.times[i].clone());
        Ok(self
            .point(i)
            .iter()
            .zip(self.point(i + 1))
            .map(|(a, b)| a.clone() + w.clone() * (b.clone() - a.clone()))
            .collect())
    }

    /// The path `λ·X`.
    pub fn scaled(&self, lambda: S) -> Self {
        Self {
            d: self.d,
            times: self.times.clone(),
            points: self
                .points
                .iter()
                .map(|x| x.clone() * lambda.clone())
                .collect(),
        }
    }

    /// Same points on new times; the new grid must satisfy the usual invariants.
    pub fn with_times(&self, times: Vec<S>) -> Result<Self> {
        if times.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} times for {} samples",
                times.len(),
                self.len()
            )));
        }
        Self::from_flat(self.d, times, self.points.clone())
    }

    /// Time reversal: `t ↦ t₀ + t_last − t`, samples in reverse order.
    pub fn reverse(&self) -> Self {
        let span = self.start_time().clone() + self.end_time().clone();
        let times = self
            .times
            .iter()
            .rev()
            .map(|t| span.clone() - t.clone())
            .collect();
        let points = (0..self.len())
            .rev()
            .flat_map(|i| self.point(i).to_vec())
            .collect();
        Self {
            d: self.d,
            times,
            points,
        }
    }

    fn increment(&self, from: &[S], to: &[S]) -> Vec<S> {
        to.iter()
            .zip(from)
            .map(|(b, a)| b.clone() - a.clone())
            .collect()
    }
}

/// Signature of a linear segment with increment `dx`: `exp(dx)`.
pub fn segment_sig<S: Scalar>(dx: &[S], depth: usize) -> Result<TruncatedTensor<S>> {
    if let Some(i) = dx.iter().position(|x| !x.is_finite_value()) {
        return Err(Error::InvalidPath(format!(
            "increment coordinate {i} is not finite"
        )));
    }
    TruncatedTensor::exp_of_vector(dx, depth)
}

/// Ordered product over a balanced binary tree. Order is preserved.
fn tree_product<S: Scalar>(
    mut items: Vec<TruncatedTensor<S>>,
    d: usize,
    depth: usize,
) -> Result<TruncatedTensor<S>> {
    if items.is_empty() {
        return TruncatedTensor::unit(d, depth);
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.mul_unchecked(&b)),
                None => next.push(a),
            }
        }
        items = next;
    }
    Ok(items.pop().unwrap())
}

/// Signature `X_{s,t}` of the piecewise-linear path over `[s, t]`.
pub fn path_signature<S: Scalar>(
    p: &SampledPath<S>,
    depth: usize,
    s: &S,
    t: &S,
) -> Result<TruncatedTensor<S>> {
    if s > t || s < p.start_time() || t > p.end_time() {
        return Err(Error::InvalidInterval {
            s: s.to_f64_lossy(),
            t: t.to_f64_lossy(),
        });
    }
    count_entries(p.d(), depth, entry_cap(), "tensor")?;
    if s == t {
        return TruncatedTensor::unit(p.d(), depth);
    }
    let first = p.times.partition_point(|x| x <= s);
    let last = p.times.partition_point(|x| x < t);
    let mut knots: Vec<Vec<S>> = Vec::with_capacity(last - first + 2);
    knots.push(p.value_at(s)?);
    knots.extend((first..last).map(|i| p.point(i).to_vec()));
    knots.push(p.value_at(t)?);

    let mut factors = Vec::with_capacity(knots.len() - 1);
    for w in knots.windows(2) {
        let dx = p.increment(&w[0], &w[1]);
        if dx.iter().all(|x| x.is_zero()) {
            continue;
        }
        factors.push(segment_sig(&dx, depth)?);
    }
    tree_product(factors, p.d(), depth)
}

/// Signature over the full sampled range.
pub fn full_signature<S: Scalar>(p: &SampledPath<S>, depth: usize) -> Result<TruncatedTensor<S>> {
    path_signature(p, depth, p.start_time(), p.end_time())
}

/// Window signature through the inverse-product route `X_{0,s}⁻¹ ⊗ X_{0,t}`.
pub fn path_signature_by_inverse<S: Scalar>(
    p: &SampledPath<S>,
    depth: usize,
    s: &S,
    t: &S,
) -> Result<TruncatedTensor<S>> {
    let start = p.start_time().clone();
    let to_s = path_signature(p, depth, &start, s)?;
    let to_t = path_signature(p, depth, &start, t)?;
    Ok(to_s.inverse()?.mul_unchecked(&to_t))
}

/// Log-signature over the full sampled range.
pub fn log_signature<S: Scalar>(p: &SampledPath<S>, depth: usize) -> Result<TruncatedTensor<S>> {
    full_signature(p, depth)?.log()
}

/// Left-point Riemann–Stieltjes evaluation of the iterated integrals over a
/// uniform refinement of the full range into `mesh` steps:
/// `S_k ← S_k + S_{k−1} ⊗ ΔX`.
pub fn brute_force_sig<S: Scalar>(
    p: &SampledPath<S>,
    depth: usize,
    mesh: usize,
) -> Result<TruncatedTensor<S>> {
    if mesh == 0 {
        return Err(Error::TooFewSamples("mesh must be at least 1"));
    }
    let d = p.d();
    let mut sig = TruncatedTensor::unit(d, depth)?;
    if p.len() == 1 {
        return Ok(sig);
    }
    let t0 = p.start_time().clone();
    let span = p.end_time().clone() - t0.clone();
    let steps = S::from_count(mesh);
    let mut prev = p.point(0).to_vec();
    for j in 1..=mesh {
        let t = if j == mesh {
            p.end_time().clone()
        } else {
            t0.clone() + span.clone() * S::from_count(j) / steps.clone()
        };
        let cur = p.value_at(&t)?;
        let dx = p.increment(&prev, &cur);
        for k in (1..=depth).rev() {
            let lower: Vec<S> = sig.level(k - 1).to_vec();
            let level = sig.level_mut(k);
            for (u, lu) in lower.iter().enumerate() {
                for (a, da) in dx.iter().enumerate() {
                    level[u * d + a] += lu.clone() * da.clone();
                }
            }
        }
        prev = cur;
    }
    Ok(sig)
}

/// Antisymmetric part of the depth-2 signature, `A_ij = ½(⟨S,ij⟩ − ⟨S,ji⟩)`.
pub fn levy_area<S: Scalar>(p: &SampledPath<S>) -> Result<Vec<Vec<S>>> {
    let d = p.d();
    if d < 2 {
        return Err(Error::DimensionMismatch("Lévy area needs d ≥ 2".into()));
    }
    let sig = full_signature(p, 2)?;
    let level = sig.level(2);
    let two = S::from_count(2);
    Ok((0..d)
        .map(|i| {
            (0..d)
                .map(|j| (level[i * d + j].clone() - level[j * d + i].clone()) / two.clone())
                .collect()
        })
        .collect())
}

/// Two-parameter map `(i, j) ↦ X_{t_i, t_j}` on a time grid, `i ≤ j`.
pub trait TwoParameter<S: Scalar> {
    fn times(&self) -> &[S];
    fn d(&self) -> usize;
    fn depth(&self) -> usize;
    fn increment(&self, i: usize, j: usize) -> TruncatedTensor<S>;
}

/// The curve `t ↦ X_{0,t}` on a grid. Increments are derived as
/// `X_{s,t} = X_{0,s}⁻¹ ⊗ X_{0,t}`.
#[derive(Clone, Debug)]
pub struct SignaturePath<S> {
    d: usize,
    depth: usize,
    times: Vec<S>,
    tensors: Vec<TruncatedTensor<S>>,
    inverses: Vec<TruncatedTensor<S>>,
}

impl<S: Scalar> SignaturePath<S> {
    /// Assembles a signature path from externally supplied tensors.
    pub fn from_parts(times: Vec<S>, tensors: Vec<TruncatedTensor<S>>) -> Result<Self> {
        if times.is_empty() || times.len() != tensors.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} times for {} tensors",
                times.len(),
                tensors.len()
            )));
        }
        if let Some(i) = times.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPath(format!(
                "times not strictly increasing at grid point {}",
                i + 1
            )));
        }
        let (d, depth) = (tensors[0].d(), tensors[0].depth());
        for t in &tensors {
            tensors[0].check_shape(t)?;
            if *t.scalar_part() != S::one() {
                return Err(Error::LevelZero { expected: "1" });
            }
        }
        let inverses = tensors
            .iter()
            .map(|t| t.inverse())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            d,
            depth,
            times,
            tensors,
            inverses,
        })
    }

    pub fn tensors(&self) -> &[TruncatedTensor<S>] {
        &self.tensors
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &TruncatedTensor<S> {
        self.tensors.last().unwrap()
    }

    /// Every tensor replaced by its antipode inverse.
    pub fn pointwise_inverse(&self) -> Result<Self> {
        let tensors = self
            .tensors
            .iter()
            .map(crate::grouplike::grouplike_inverse)
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(self.times.clone(), tensors)
    }

    /// Every tensor `g_t` replaced by `b ⊗ g_t`.
    pub fn left_translate(&self, b: &TruncatedTensor<S>) -> Result<Self> {
        let tensors = self
            .tensors
            .iter()
            .map(|g| b.mul(g))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(self.times.clone(), tensors)
    }
}

impl<S: Scalar> TwoParameter<S> for SignaturePath<S> {
    fn times(&self) -> &[S] {
        &self.times
    }
    fn d(&self) -> usize {
        self.d
    }
    fn depth(&self) -> usize {
        self.depth
    }
    fn increment(&self, i: usize, j: usize) -> TruncatedTensor<S> {
        self.inverses[i].mul_unchecked(&self.tensors[j])
    }
}

/// Running Chen products at every sample time; `tensors[0] = 𝟙`.
pub fn signature_path<S: Scalar>(p: &SampledPath<S>, depth: usize) -> Result<SignaturePath<S>> {
    let mut tensors = Vec::with_capacity(p.len());
    let mut acc = TruncatedTensor::unit(p.d(), depth)?;
    tensors.push(acc.clone());
    for i in 1..p.len() {
        let dx = p.increment(p.point(i - 1), p.point(i));
        if dx.iter().any(|x| !x.is_zero()) {
            acc = acc.mul_unchecked(&segment_sig(&dx, depth)?);
        }
        tensors.push(acc.clone());
    }
    SignaturePath::from_parts(p.times.clone(), tensors)
}

/// A two-parameter functional stored explicitly for every grid pair `i ≤ j`.
#[derive(Clone, Debug)]
pub struct PairwiseFunctional<S> {
    d: usize,
    depth: usize,
    times: Vec<S>,
    table: Vec<TruncatedTensor<S>>,
}

impl<S: Scalar> PairwiseFunctional<S> {
    pub fn from_fn(
        times: Vec<S>,
        mut f: impl FnMut(usize, usize) -> Result<TruncatedTensor<S>>,
    ) -> Result<Self> {
        let n = times.len();
        if n == 0 {
            return Err(Error::TooFewSamples("empty grid"));
        }
        let mut table = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                table.push(f(i, j)?);
            }
        }
        let (d, depth) = (table[0].d(), table[0].depth());
        for t in &table {
            table[0].check_shape(t)?;
        }
        Ok(Self {
            d,
            depth,
            times,
            table,
        })
    }

    pub fn from_two_parameter(src: &impl TwoParameter<S>) -> Result<Self> {
        Self::from_fn(src.times().to_vec(), |i, j| Ok(src.increment(i, j)))
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let n = self.times.len();
        assert!(i <= j && j < n, "grid pair ({i}, {j}) out of range");
        // row r holds n − r entries
        i * n - i * i.saturating_sub(1) / 2 + (j - i)
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedTensor<S> {
        &self.table[self.slot(i, j)]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut TruncatedTensor<S> {
        let k = self.slot(i, j);
        &mut self.table[k]
    }
}

impl<S: Scalar> TwoParameter<S> for PairwiseFunctional<S> {
    fn times(&self) -> &[S] {
        &self.times
    }
    fn d(&self) -> usize {
        self.d
    }
    fn depth(&self) -> usize {
        self.depth
    }
    fn increment(&self, i: usize, j: usize) -> TruncatedTensor<S> {
        self.get(i, j).clone()
    }
}
