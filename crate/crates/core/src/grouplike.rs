//! Membership and structure tests for the free nilpotent group `G^N(R^d)`
//! and its Lie algebra.
//!
//! A tensor with level-0 entry one is group-like when its word pairing is a
//! character of the shuffle algebra: `⟨a, u ⧢ v⟩ = ⟨a, u⟩·⟨a, v⟩` for every
//! pair of nonempty words with `|u| + |v| ≤ N`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{count_entries, TruncatedTensor};
use crate::word::{shuffle, words_of_length, Word};

/// Default tolerance for the shuffle-character test on float data.
pub const DEFAULT_GROUPLIKE_TOL: f64 = 1e-8;

/// A failing (or worst) word pair of the shuffle identity.
#[derive(Clone, Debug, PartialEq)]
pub struct ShuffleViolation<S> {
    pub u: Word,
    pub v: Word,
    /// `|⟨a, u⧢v⟩ − ⟨a,u⟩⟨a,v⟩|`
    pub residual: S,
    /// `residual / (1 + |⟨a,u⟩⟨a,v⟩|)`, the quantity compared with the tolerance.
    pub scaled: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrouplikeReport<S> {
    pub passed: bool,
    /// Word pair with the largest scaled residual; `None` when no pair exists (N < 2).
    pub worst: Option<ShuffleViolation<S>>,
    pub pairs_checked: usize,
}

/// Serialisable `(u, v, residual)` triple.
#[derive(Clone, Debug, Serialize)]
pub struct ViolationTriple(pub Vec<usize>, pub Vec<usize>, pub f64);

impl<S: Scalar> ShuffleViolation<S> {
    pub fn triple(&self) -> ViolationTriple {
        ViolationTriple(
            self.u.letters().to_vec(),
            self.v.letters().to_vec(),
            self.residual.to_f64_lossy(),
        )
    }
}

/// Precomputed shuffle expansions for all word pairs `u ≤ v`, `|u|,|v| ≥ 1`,
/// `|u|+|v| ≤ N`, as flat coefficient indices.
#[derive(Clone, Debug)]
pub struct ShuffleTable {
    d: usize,
    depth: usize,
    entries: Vec<ShuffleEntry>,
}

#[derive(Clone, Debug)]
struct ShuffleEntry {
    u: Word,
    v: Word,
    u_flat: usize,
    v_flat: usize,
    terms: Vec<(usize, i64)>,
}

impl ShuffleTable {
    pub fn new(d: usize, depth: usize) -> Result<Self> {
        count_entries(d, depth, crate::tensor::entry_cap(), "shuffle table")?;
        let flat = |w: &Word| crate::tensor::level_offset(d, w.len()) + w.index(d);
        let mut entries = Vec::new();
        for lu in 1..depth {
            for lv in lu..=(depth - lu) {
                for u in words_of_length(d, lu) {
                    for v in words_of_length(d, lv) {
                        if lu == lv && v < u {
                            continue;
                        }
                        let terms = shuffle(&u, &v).terms().map(|(w, c)| (flat(w), c)).collect();
                        entries.push(ShuffleEntry {
                            u_flat: flat(&u),
                            v_flat: flat(&v),
                            u: u.clone(),
                            v,
                            terms,
                        });
                    }
                }
            }
        }
        Ok(Self { d, depth, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Runs the shuffle-character test against `a`.
    pub fn check<S: Scalar>(&self, a: &TruncatedTensor<S>, tol: S) -> Result<GrouplikeReport<S>> {
        if a.d() != self.d || a.depth() != self.depth {
            return Err(Error::ShapeMismatch {
                left_d: a.d(),
                left_depth: a.depth(),
                right_d: self.d,
                right_depth: self.depth,
            });
        }
        if *a.scalar_part() != S::one() {
            return Err(Error::LevelZero { expected: "1" });
        }
        let x = a.as_slice();
        let mut worst: Option<ShuffleViolation<S>> = None;
        let mut passed = true;
        for e in &self.entries {
            let mut lhs = S::zero();
            for &(i, c) in &e.terms {
                lhs += x[i].clone() * S::from_count(c as usize);
            }
            let prod = x[e.u_flat].clone() * x[e.v_flat].clone();
            let residual = (lhs - prod.clone()).abs();
            let bound = S::one() + prod.abs();
            if residual > tol.clone() * bound.clone() {
                passed = false;
            }
            let scaled = residual.clone() / bound;
            if worst.as_ref().is_none_or(|w| scaled > w.scaled) {
                worst = Some(ShuffleViolation {
                    u: e.u.clone(),
                    v: e.v.clone(),
                    residual,
                    scaled,
                });
            }
        }
        Ok(GrouplikeReport {
            passed,
            worst,
            pairs_checked: self.entries.len(),
        })
    }
}

/// Shuffle-character test `⟨a, u⧢v⟩ = ⟨a,u⟩⟨a,v⟩` within
/// `tol·(1 + |⟨a,u⟩⟨a,v⟩|)` for every admissible word pair.
pub fn is_grouplike<S: Scalar>(a: &TruncatedTensor<S>, tol: S) -> Result<GrouplikeReport<S>> {
    if *a.scalar_part() != S::one() {
        return Err(Error::LevelZero { expected: "1" });
    }
    ShuffleTable::new(a.d(), a.depth())?.check(a, tol)
}

/// Inverse through the antipode: `⟨b, w⟩ = (−1)^{|w|} ⟨a, reverse(w)⟩`.
///
/// Agrees with [`TruncatedTensor::inverse`] exactly when `a` is group-like.
pub fn grouplike_inverse<S: Scalar>(a: &TruncatedTensor<S>) -> Result<TruncatedTensor<S>> {
    if *a.scalar_part() != S::one() {
        return Err(Error::LevelZero { expected: "1" });
    }
    let d = a.d();
    let mut out = a.clone();
    for k in 1..=a.depth() {
        let src = a.level(k);
        let odd = k % 2 == 1;
        for (i, slot) in out.level_mut(k).iter_mut().enumerate() {
            let rev = Word::from_index(k, i, d).reversed().index(d);
            *slot = if odd {
                -src[rev].clone()
            } else {
                src[rev].clone()
            };
        }
    }
    Ok(out)
}

/// Commutator `[a, b] = a⊗b − b⊗a`.
pub fn lie_bracket<S: Scalar>(
    a: &TruncatedTensor<S>,
    b: &TruncatedTensor<S>,
) -> Result<TruncatedTensor<S>> {
    a.mul(b)?.sub(&b.mul_unchecked(a))
}

/// Lie-element test: `π₀(x) = 0` and `exp(x)` is group-like at `tol`.
pub fn is_lie<S: Scalar>(x: &TruncatedTensor<S>, tol: S) -> Result<GrouplikeReport<S>> {
    if !x.scalar_part().is_zero() {
        return Err(Error::LevelZero { expected: "0" });
    }
    is_grouplike(&x.exp()?, tol)
}

/// Dimensions of the homogeneous components (levels `1..=depth`) of the
/// free nilpotent Lie algebra, by rank of the spanned iterated brackets.
pub fn lie_project_dims(d: usize, depth: usize) -> Result<Vec<usize>> {
    const CAP: usize = 200_000;
    count_entries(d, depth, CAP, "Lie dimension scan")?;
    if depth == 0 {
        return Ok(Vec::new());
    }
    // basis[k] holds independent homogeneous Lie elements of level k+1
    let mut basis: Vec<Vec<Vec<f64>>> = Vec::with_capacity(depth);
    basis.push(
        (0..d)
            .map(|i| {
                let mut v = vec![0.0; d];
                v[i] = 1.0;
                v
            })
            .collect(),
    );
    for k in 2..=depth {
        let mut echelon = Echelon::new(d.pow(k as u32));
        let mut level_basis = Vec::new();
        for i in 1..=k / 2 {
            let j = k - i;
            for x in &basis[i - 1] {
                for y in &basis[j - 1] {
                    let br = bracket_homogeneous(x, y);
                    if echelon.insert(&br) {
                        level_basis.push(br);
                    }
                }
            }
        }
        basis.push(level_basis);
    }
    Ok(basis.iter().map(Vec::len).collect())
}

/// `x⊗y − y⊗x` for homogeneous levels given as flat coefficient arrays.
fn bracket_homogeneous(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len() * y.len()];
    for (u, xu) in x.iter().enumerate() {
        for (v, yv) in y.iter().enumerate() {
            out[u * y.len() + v] += xu * yv;
        }
    }
    for (v, yv) in y.iter().enumerate() {
        for (u, xu) in x.iter().enumerate() {
            out[v * x.len() + u] -= yv * xu;
        }
    }
    out
}

/// Incremental row-echelon form for rank computation.
struct Echelon {
    rows: Vec<(usize, Vec<f64>)>,
    width: usize,
}

impl Echelon {
    const TOL: f64 = 1e-9;

    fn new(width: usize) -> Self {
        Self {
            rows: Vec::new(),
            width,
        }
    }

    /// Reduces `v` against the stored rows; stores and returns true if it is
    /// independent of them.
    fn insert(&mut self, v: &[f64]) -> bool {
        debug_assert_eq!(v.len(), self.width);
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return false;
        }
        let mut r: Vec<f64> = v.iter().map(|x| x / scale).collect();
        for (pivot, row) in &self.rows {
            let f = r[*pivot];
            if f != 0.0 {
                for (a, b) in r.iter_mut().zip(row) {
                    *a -= f * b;
                }
            }
        }
        let (pivot, max) = r.iter().enumerate().fold((0, 0.0f64), |(pi, pm), (i, x)| {
            if x.abs() > pm {
                (i, x.abs())
            } else {
                (pi, pm)
            }
        });
        if max <= Self::TOL {
            return false;
        }
        let p = r[pivot];
        for a in r.iter_mut() {
            *a /= p;
        }
        // keep existing rows reduced in the new pivot column
        for (_, row) in self.rows.iter_mut() {
            let f = row[pivot];
            if f != 0.0 {
                for (a, b) in row.iter_mut().zip(&r) {
                    *a -= f * b;
                }
            }
        }
        self.rows.push((pivot, r));
        true
    }
}

/// A tensor with level-0 entry one, optionally certified group-like.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<S> {
    tensor: TruncatedTensor<S>,
    geometric: Option<bool>,
}

impl<S: Scalar> GroupElement<S> {
    /// Wraps `t`, checking only the level-0 entry.
    pub fn new(t: TruncatedTensor<S>) -> Result<Self> {
        if *t.scalar_part() != S::one() {
            return Err(Error::LevelZero { expected: "1" });
        }
        Ok(Self {
            tensor: t,
            geometric: None,
        })
    }

    /// Wraps `t` and caches the outcome of the shuffle-character test.
    pub fn checked(t: TruncatedTensor<S>, tol: S) -> Result<Self> {
        let report = is_grouplike(&t, tol)?;
        Ok(Self {
            tensor: t,
            geometric: Some(report.passed),
        })
    }

    pub fn tensor(&self) -> &TruncatedTensor<S> {
        &self.tensor
    }

    pub fn into_tensor(self) -> TruncatedTensor<S> {
        self.tensor
    }

    pub fn is_geometric(&self) -> Option<bool> {
        self.geometric
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            tensor: self.tensor.mul(&other.tensor)?,
            geometric: None,
        })
    }

    /// Antipode inverse when certified group-like, Neumann inverse otherwise.
    pub fn inverse(&self) -> Result<Self> {
        let tensor = if self.geometric == Some(true) {
            grouplike_inverse(&self.tensor)?
        } else {
            self.tensor.inverse()?
        };
        Ok(Self {
            tensor,
            geometric: self.geometric,
        })
    }
}
