//! Hölder and rough-path analytics on sampled data, plus the Young integral.
//!
//! All suprema are taken over the sampled grid, so every reported constant is
//! a lower bound for the corresponding quantity of any continuous path
//! through the samples. Constants are reported, never thresholded.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grouplike::ShuffleTable;
use crate::scalar::{factorial_f64, Real, Scalar};
use crate::signature::{SampledPath, SignaturePath, TwoParameter};

/// Grids up to this size use all sample pairs; larger ones use dyadic gaps.
pub const ALL_PAIRS_LIMIT: usize = 2000;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::ExponentOutOfRange(alpha))
    }
}

/// Index pairs `i < j` entering a Hölder supremum on a grid of `n` points.
pub fn holder_pairs(n: usize) -> Vec<(usize, usize)> {
    if n <= ALL_PAIRS_LIMIT {
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect()
    } else {
        let mut out = Vec::new();
        for i in 0..n {
            let mut gap = 1;
            while i + gap < n {
                out.push((i, i + gap));
                gap *= 2;
            }
        }
        out
    }
}

/// `max ‖X_t − X_s‖ / |t − s|^α` over sampled pairs.
pub fn holder_norm<S: Real>(p: &SampledPath<S>, alpha: f64) -> Result<S> {
    check_alpha(alpha)?;
    if p.len() < 2 {
        return Err(Error::TooFewSamples(
            "Hölder norm needs at least two samples",
        ));
    }
    let a = S::from_f64(alpha);
    let times = p.times();
    Ok(holder_pairs(p.len())
        .into_iter()
        .map(|(i, j)| {
            let dist = p
                .point(i)
                .iter()
                .zip(p.point(j))
                .fold(S::zero(), |acc, (&x, &y)| acc + (y - x) * (y - x))
                .sqrt();
            dist / (times[j] - times[i]).powf(a)
        })
        .fold(S::zero(), S::max))
}

/// Per-level constants `max ‖X^k_{s,t}‖ / |t − s|^{kα}`, `k = 1..N`.
pub fn graded_holder<S: Real>(sp: &impl TwoParameter<S>, alpha: f64) -> Result<Vec<S>> {
    check_alpha(alpha)?;
    let times = sp.times();
    if times.len() < 2 {
        return Err(Error::TooFewSamples(
            "graded Hölder constants need at least two grid points",
        ));
    }
    let a = S::from_f64(alpha);
    let mut consts = vec![S::zero(); sp.depth()];
    for (i, j) in holder_pairs(times.len()) {
        let x = sp.increment(i, j);
        let dt = times[j] - times[i];
        for (k, c) in consts.iter_mut().enumerate() {
            let level = k + 1;
            let ratio = x.hs_norm_level(level) / dt.powf(a * S::from_count(level));
            *c = c.max(ratio);
        }
    }
    Ok(consts)
}

/// `max ρ_N(𝟙, X_{s,t}) / |t − s|^α`. Every grid tensor must pass the
/// shuffle-character test at `tol`.
pub fn rho_holder<S: Real>(sp: &SignaturePath<S>, alpha: f64, tol: S) -> Result<S> {
    Ok(holder_report(sp, alpha, tol)?.rho_constant)
}

/// Graded and homogeneous Hölder constants together with the two-sided
/// inequalities linking them on the same grid.
#[derive(Clone, Debug, Serialize)]
pub struct HolderReport<S> {
    pub alpha: f64,
    /// `C_k`, constants of the levels of `X_{s,t}`.
    pub level_constants: Vec<S>,
    /// `C'_k`, constants of the levels of `X_{s,t}⁻¹`.
    pub inverse_level_constants: Vec<S>,
    /// `R = max |X_{s,t}| / |t−s|^α`.
    pub rho_constant: S,
    /// `max_k (k!C_k)^{1/k} + max_k (k!C'_k)^{1/k}`, which bounds `R` above.
    pub rho_upper_bound: S,
    /// `R^k / k!`, which bounds `C_k` above.
    pub level_upper_bounds: Vec<S>,
    /// Both inequalities hold within rounding.
    pub bounds_consistent: bool,
}

pub fn holder_report<S: Real>(
    sp: &SignaturePath<S>,
    alpha: f64,
    tol: S,
) -> Result<HolderReport<S>> {
    check_alpha(alpha)?;
    if sp.len() < 2 {
        return Err(Error::TooFewSamples(
            "rough Hölder constants need at least two grid points",
        ));
    }
    let table = ShuffleTable::new(sp.d(), sp.depth())?;
    for (index, g) in sp.tensors().iter().enumerate() {
        let report = table.check(g, tol)?;
        if !report.passed {
            let residual = report.worst.map(|w| w.scaled.to_f64_lossy()).unwrap_or(0.0);
            return Err(Error::NotWeaklyGeometric { index, residual });
        }
    }
    let depth = sp.depth();
    let a = S::from_f64(alpha);
    let times = sp.times();
    let mut level = vec![S::zero(); depth];
    let mut inverse_level = vec![S::zero(); depth];
    let mut rho = S::zero();
    for (i, j) in holder_pairs(times.len()) {
        let x = sp.increment(i, j);
        let inv = x.inverse()?;
        let dt = times[j] - times[i];
        for k in 1..=depth {
            let denom = dt.powf(a * S::from_count(k));
            level[k - 1] = level[k - 1].max(x.hs_norm_level(k) / denom);
            inverse_level[k - 1] = inverse_level[k - 1].max(inv.hs_norm_level(k) / denom);
        }
        rho = rho.max(x.homogeneous_norm()? / dt.powf(a));
    }
    let graded_root = |consts: &[S]| {
        consts
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let k = k + 1;
                (S::from_f64(factorial_f64(k)) * c).powf(S::one() / S::from_count(k))
            })
            .fold(S::zero(), S::max)
    };
    let upper = graded_root(&level) + graded_root(&inverse_level);
    let level_upper: Vec<S> = (1..=depth)
        .map(|k| rho.powi(k as i32) / S::from_f64(factorial_f64(k)))
        .collect();
    let slack = S::from_f64(1e-9);
    let consistent = rho <= upper * (S::one() + slack) + slack
        && level
            .iter()
            .zip(&level_upper)
            .all(|(&c, &b)| c <= b * (S::one() + slack) + slack);
    Ok(HolderReport {
        alpha,
        level_constants: level,
        inverse_level_constants: inverse_level,
        rho_constant: rho,
        rho_upper_bound: upper,
        level_upper_bounds: level_upper,
        bounds_consistent: consistent,
    })
}

/// Worst Chen-relation violation over grid triples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChenViolation<S> {
    pub triple: (usize, usize, usize),
    /// `‖X_{s,t} − X_{s,u}⊗X_{u,t}‖ / (1 + ‖X_{s,t}‖)`
    pub residual: S,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplicativeReport<S> {
    pub passed: bool,
    pub worst: Option<ChenViolation<S>>,
    pub triples_checked: usize,
}

/// Checks `X_{s,t} = X_{s,u} ⊗ X_{u,t}` for all grid triples `s ≤ u ≤ t`
/// within the relative tolerance `tol`.
pub fn is_multiplicative<S: Real>(
    f: &impl TwoParameter<S>,
    tol: S,
) -> Result<MultiplicativeReport<S>> {
    let n = f.times().len();
    if n < 3 {
        return Err(Error::TooFewSamples(
            "Chen check needs at least three grid points",
        ));
    }
    let mut worst: Option<ChenViolation<S>> = None;
    let mut passed = true;
    let mut count = 0;
    for i in 0..n {
        for k in i..n {
            let whole = f.increment(i, k);
            for j in i..=k {
                let split = f.increment(i, j).mul(&f.increment(j, k))?;
                let residual = whole.rel_diff(&split)?;
                count += 1;
                if residual.is_nan() || residual > tol {
                    passed = false;
                }
                if worst
                    .as_ref()
                    .is_none_or(|w| residual > w.residual || residual.is_nan())
                {
                    worst = Some(ChenViolation {
                        triple: (i, j, k),
                        residual,
                    });
                }
            }
        }
    }
    Ok(MultiplicativeReport {
        passed,
        worst,
        triples_checked: count,
    })
}

/// Smallest admissible truncation depth for Hölder exponent `α`: `⌊1/α⌋`.
pub fn minimal_depth(alpha: f64) -> Result<usize> {
    check_alpha(alpha)?;
    Ok((1.0 / alpha).floor() as usize)
}

#[derive(Clone, Debug, PartialEq)]
pub struct YoungOptions {
    /// Number of uniform steps on the common interval.
    pub refine: usize,
    /// Declared Hölder exponents `(α of X, β of Y)`.
    pub exponents: Option<(f64, f64)>,
    /// Refuse to integrate unless the declared exponents satisfy `α + β > 1`.
    pub strict: bool,
}

impl Default for YoungOptions {
    fn default() -> Self {
        Self {
            refine: 10_000,
            exponents: None,
            strict: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct YoungResult<S> {
    /// One entry per coordinate of `X` for a scalar integrand, or one per row
    /// of a matrix-valued integrand.
    pub value: Vec<S>,
    /// `α + β > 1` for the declared exponents, if any were declared.
    pub condition_met: Option<bool>,
    pub interval: (S, S),
}

/// Evaluates a piecewise-linear path at nondecreasing times.
struct Cursor<'a, S> {
    path: &'a SampledPath<S>,
    seg: usize,
}

impl<'a, S: Scalar> Cursor<'a, S> {
    fn new(path: &'a SampledPath<S>) -> Self {
        Self { path, seg: 0 }
    }

    fn eval(&mut self, t: &S, out: &mut [S]) {
        let times = self.path.times();
        while self.seg + 1 < times.len() && times[self.seg + 1] <= *t {
            self.seg += 1;
        }
        let i = self.seg;
        if i + 1 == times.len() || times[i] == *t {
            out.clone_from_slice(self.path.point(i));
            return;
        }
        let w = (t.clone() - times[i].clone()) / (times[i + 1].clone() - times[i].clone());
        for ((o, a), b) in out
            .iter_mut()
            .zip(self.path.point(i))
            .zip(self.path.point(i + 1))
        {
            *o = a.clone() + w.clone() * (b.clone() - a.clone());
        }
    }
}

/// Left-point Riemann–Stieltjes sum `Σ Y(s)·X_{s,t}` over a uniform
/// refinement of the common sampled interval.
///
/// `Y` is either scalar (integrated against every coordinate of `X`) or a
/// row-major `e×d` matrix for `X` in `R^d`.
pub fn young_integral<S: Scalar>(
    y: &SampledPath<S>,
    x: &SampledPath<S>,
    opts: &YoungOptions,
) -> Result<YoungResult<S>> {
    let condition_met = match opts.exponents {
        Some((a, b)) => {
            for e in [a, b] {
                if !(e > 0.0 && e <= 1.0) {
                    return Err(Error::Regularity(format!("exponent {e} outside (0, 1]")));
                }
            }
            Some(a + b > 1.0)
        }
        None => None,
    };
    if opts.strict {
        match condition_met {
            None => {
                return Err(Error::Regularity(
                    "strict mode needs declared exponents".into(),
                ))
            }
            Some(false) => {
                let (a, b) = opts.exponents.unwrap();
                return Err(Error::Regularity(format!("α + β = {} ≤ 1", a + b)));
            }
            Some(true) => {}
        }
    }
    if opts.refine == 0 {
        return Err(Error::TooFewSamples("refinement must be at least 1"));
    }
    let d = x.d();
    let rows = if y.d() == 1 {
        None
    } else if y.d().is_multiple_of(d) {
        Some(y.d() / d)
    } else {
        return Err(Error::DimensionMismatch(format!(
            "integrand of dimension {} against integrator of dimension {d}",
            y.d()
        )));
    };
    let lo = if y.start_time() > x.start_time() {
        y.start_time()
    } else {
        x.start_time()
    }
    .clone();
    let hi = if y.end_time() < x.end_time() {
        y.end_time()
    } else {
        x.end_time()
    }
    .clone();
    if lo >= hi {
        return Err(Error::InvalidInterval {
            s: lo.to_f64_lossy(),
            t: hi.to_f64_lossy(),
        });
    }

    let mut value = vec![S::zero(); rows.unwrap_or(d)];
    let mut yc = Cursor::new(y);
    let mut xc = Cursor::new(x);
    let mut y_now = vec![S::zero(); y.d()];
    let mut x_now = vec![S::zero(); d];
    let mut x_next = vec![S::zero(); d];
    yc.eval(&lo, &mut y_now);
    xc.eval(&lo, &mut x_now);
    let span = hi.clone() - lo.clone();
    let steps = S::from_count(opts.refine);
    for k in 1..=opts.refine {
        let t = if k == opts.refine {
            hi.clone()
        } else {
            lo.clone() + span.clone() * S::from_count(k) / steps.clone()
        };
        xc.eval(&t, &mut x_next);
        match rows {
            None => {
                for ((v, a), b) in value.iter_mut().zip(&x_now).zip(&x_next) {
                    *v += y_now[0].clone() * (b.clone() - a.clone());
                }
            }
            Some(_) => {
                for (r, v) in value.iter_mut().enumerate() {
                    for j in 0..d {
                        *v += y_now[r * d + j].clone() * (x_next[j].clone() - x_now[j].clone());
                    }
                }
            }
        }
        std::mem::swap(&mut x_now, &mut x_next);
        yc.eval(&t, &mut y_now);
    }
    Ok(YoungResult {
        value,
        condition_met,
        interval: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::{signature_path, PairwiseFunctional};
    use crate::tensor::TruncatedTensor;

    type P = SampledPath<f64>;

    fn linear(v: &[f64], n: usize) -> P {
        let pts = (0..n)
            .map(|i| v.iter().map(|x| x * i as f64 / (n - 1) as f64).collect())
            .collect();
        P::uniform(pts).unwrap()
    }

    #[test]
    fn holder_norm_cases() {
        let c = P::uniform(vec![vec![2.0]; 5]).unwrap();
        assert_eq!(holder_norm(&c, 0.5).unwrap(), 0.0);
        let l = linear(&[1.0], 11);
        for alpha in [0.1, 0.5, 0.9] {
            assert!((holder_norm(&l, alpha).unwrap() - 1.0).abs() < 1e-14);
        }
        let scaled = l.scaled(-3.0);
        assert!(
            (holder_norm(&scaled, 0.4).unwrap() - 3.0 * holder_norm(&l, 0.4).unwrap()).abs()
                < 1e-13
        );
        assert!(holder_norm(&l, 1.0).is_err());
        assert!(holder_norm(&l, 0.0).is_err());
        assert!(holder_norm(&P::uniform(vec![vec![1.0]]).unwrap(), 0.5).is_err());
    }

    #[test]
    fn dyadic_pairs_for_large_grids() {
        assert_eq!(holder_pairs(4).len(), 6);
        let pairs = holder_pairs(3000);
        assert!(pairs.len() < 3000 * 12);
        assert!(pairs.contains(&(0, 2048)) && !pairs.contains(&(0, 3)));
    }

    #[test]
    fn graded_constants_of_linear_path() {
        let v = [0.6, -0.8, 1.2];
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let sp = signature_path(&linear(&v, 9), 4).unwrap();
        let consts = graded_holder(&sp, 0.4).unwrap();
        for (k, c) in consts.iter().enumerate() {
            let expected = norm.powi(k as i32 + 1) / factorial_f64(k + 1);
            assert!(
                (c - expected).abs() <= 1e-10 * (1.0 + expected),
                "level {}",
                k + 1
            );
        }
        let constant = signature_path(&P::uniform(vec![vec![1.0, 2.0]; 4]).unwrap(), 3).unwrap();
        assert!(graded_holder(&constant, 0.3)
            .unwrap()
            .iter()
            .all(|c| *c == 0.0));
        assert_eq!(rho_holder(&constant, 0.3, 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn rho_holder_rejects_non_geometric() {
        let mut bad = TruncatedTensor::unit(2, 2).unwrap();
        bad.level_mut(2)[1] = 1.0;
        let sp = SignaturePath::from_parts(
            vec![0.0, 1.0],
            vec![TruncatedTensor::unit(2, 2).unwrap(), bad],
        )
        .unwrap();
        assert!(matches!(
            rho_holder(&sp, 0.4, 1e-8),
            Err(Error::NotWeaklyGeometric { index: 1, .. })
        ));
    }

    #[test]
    fn holder_report_bounds() {
        let p = P::uniform(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.3],
            vec![0.2, 1.1],
            vec![-0.5, 0.4],
        ])
        .unwrap();
        let sp = signature_path(&p, 3).unwrap();
        let r = holder_report(&sp, 0.35, 1e-8).unwrap();
        assert!(r.bounds_consistent);
        assert!(r.rho_constant.is_finite() && r.rho_constant > 0.0);
    }

    #[test]
    fn multiplicativity() {
        let p = P::uniform(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.5],
            vec![0.2, 1.0],
            vec![0.4, -0.3],
        ])
        .unwrap();
        let sp = signature_path(&p, 3).unwrap();
        let r = is_multiplicative(&sp, 1e-9).unwrap();
        assert!(r.passed);
        assert_eq!(r.triples_checked, 20);

        let mut table = PairwiseFunctional::from_two_parameter(&sp).unwrap();
        table.get_mut(0, 2).level_mut(1)[0] += 1.0;
        let r = is_multiplicative(&table, 1e-9).unwrap();
        assert!(!r.passed);
        let (i, j, k) = r.worst.unwrap().triple;
        assert!((i, j) == (0, 2) || (i, k) == (0, 2), "{:?}", (i, j, k));

        let two = SignaturePath::from_parts(
            vec![0.0, 1.0],
            vec![TruncatedTensor::unit(1, 1).unwrap(); 2],
        )
        .unwrap();
        assert!(is_multiplicative(&two, 1e-9).is_err());
    }

    #[test]
    fn hand_built_level_two_functional_is_multiplicative() {
        let times = vec![0.0, 0.25, 0.6, 1.0];
        let w = [0.0, 2.0, -1.0, 0.5];
        let f = PairwiseFunctional::from_fn(times.clone(), |i, j| {
            let mut t = TruncatedTensor::unit(2, 2)?;
            for (slot, x) in t.level_mut(2).iter_mut().zip(w) {
                *slot = (times[j] - times[i]) * x;
            }
            Ok(t)
        })
        .unwrap();
        assert!(is_multiplicative(&f, 1e-12).unwrap().passed);
    }

    #[test]
    fn minimal_depths() {
        assert_eq!(minimal_depth(0.6).unwrap(), 1);
        assert_eq!(minimal_depth(0.4).unwrap(), 2);
        assert_eq!(minimal_depth(0.5).unwrap(), 2);
        assert_eq!(minimal_depth(0.3).unwrap(), 3);
        assert!(minimal_depth(1.0).is_err());
        assert!(minimal_depth(-0.2).is_err());
    }

    #[test]
    fn young_closed_forms() {
        let t = linear(&[1.0], 2);
        let r = young_integral(&t, &t, &YoungOptions::default()).unwrap();
        assert!((r.value[0] - 0.5).abs() < 1e-4);
        assert_eq!(r.condition_met, None);

        let sq = P::uniform(
            (0..=100)
                .map(|i| vec![(i as f64 / 100.0).powi(2)])
                .collect(),
        )
        .unwrap();
        let r = young_integral(&sq, &t, &YoungOptions::default()).unwrap();
        assert!((r.value[0] - 1.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn young_constant_integrand() {
        let c = P::uniform(vec![vec![2.5]; 3]).unwrap();
        let x = P::uniform(vec![vec![0.0, 1.0], vec![0.7, -0.4], vec![0.3, 0.9]]).unwrap();
        let r = young_integral(
            &c,
            &x,
            &YoungOptions {
                refine: 37,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((r.value[0] - 2.5 * 0.3).abs() < 1e-14);
        assert!((r.value[1] - 2.5 * -0.1).abs() < 1e-14);
    }

    #[test]
    fn young_matrix_integrand() {
        // 1×2 matrix (1, 2) against X = (t, t) gives 3
        let y = P::uniform(vec![vec![1.0, 2.0]; 2]).unwrap();
        let x = linear(&[1.0, 1.0], 2);
        let r = young_integral(
            &y,
            &x,
            &YoungOptions {
                refine: 10,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.value.len(), 1);
        assert!((r.value[0] - 3.0).abs() < 1e-14);
        let bad = P::uniform(vec![vec![1.0, 2.0, 3.0]; 2]).unwrap();
        assert!(young_integral(&bad, &x, &YoungOptions::default()).is_err());
    }

    #[test]
    fn young_strict_mode() {
        let t = linear(&[1.0], 2);
        let strict = |exponents| YoungOptions {
            refine: 10,
            exponents,
            strict: true,
        };
        assert!(young_integral(&t, &t, &strict(None)).is_err());
        assert!(matches!(
            young_integral(&t, &t, &strict(Some((0.4, 0.5)))),
            Err(Error::Regularity(_))
        ));
        assert!(young_integral(&t, &t, &strict(Some((0.6, 0.5)))).is_ok());
        let lax = YoungOptions {
            refine: 10,
            exponents: Some((0.3, 0.3)),
            strict: false,
        };
        assert_eq!(
            young_integral(&t, &t, &lax).unwrap().condition_met,
            Some(false)
        );
    }
}
