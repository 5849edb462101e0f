//! The Bernoulli measure `μ_λ`: parameters, Fourier transform, sampling.
//!
//! The transform is the infinite product `μ̂_λ(t) = Π_{k≥1} cos(2πλ^k t)`.
//! Truncating after `D` factors leaves a certified error: each dropped factor
//! satisfies `|1 - cos θ| ≤ θ²/2`, so
//!
//! ```text
//! |μ̂_λ(t) - Π_{k≤D}| ≤ Σ_{k>D} (2πλ^k t)²/2 = 2π²t²λ^{2(D+1)}/(1-λ²).
//! ```
//!
//! Two evaluation paths exist. [`eval_muhat`] works directly in f64 and is
//! adequate for small arguments. [`eval_muhat_at`] takes an exact rational
//! argument and reduces every factor argument mod 1 in exact arithmetic
//! before calling `cos`; this keeps full precision even when `t` is on the
//! order of `10^14` (lattice frequencies), and returns exact `0.0` whenever a
//! factor argument reduces to 1/4 or 3/4.

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{self, fract_nonneg};
use crate::{Error, Result};

const TAU: f64 = std::f64::consts::TAU;

/// Parameter of a Bernoulli measure: an exact reduced rational `λ ∈ (0, 1)`.
///
/// Infinite orthogonal families of exponentials only exist when `λ = q/(2n)`
/// with `q` odd; [`BernoulliParam::half_denominator`] exposes that shape when
/// it applies, but the measure itself (and zero-set queries) make sense for
/// any rational `λ`, so the constructor accepts the general reduced form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BernoulliParam {
    num: u64,
    den: u64,
}

impl BernoulliParam {
    /// Reduced rational `num/den` with `0 < num/den < 1`.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num >= den {
            return Err(Error::Contract(format!(
                "lambda must lie in (0,1), got {num}/{den}"
            )));
        }
        if num::integer::gcd(num, den) != 1 {
            return Err(Error::Contract(format!(
                "lambda must be in reduced form, got {num}/{den}"
            )));
        }
        Ok(Self { num, den })
    }

    /// `λ = q/(2n)` for odd `q`; the form every spectrum construction assumes.
    pub fn from_half_denominator(q: u64, n: u64) -> Result<Self> {
        if q.is_multiple_of(2) {
            return Err(Error::Contract(format!("numerator must be odd, got {q}")));
        }
        let den = n
            .checked_mul(2)
            .ok_or_else(|| Error::Contract("denominator overflow".into()))?;
        Self::new(q, den)
    }

    /// Parses a `"q/m"` string.
    pub fn parse(s: &str) -> Result<Self> {
        let r = rational::parse_rational(s)?;
        let num = r
            .numer()
            .to_u64()
            .ok_or_else(|| Error::Contract(format!("lambda numerator out of range: {s}")))?;
        let den = r
            .denom()
            .to_u64()
            .ok_or_else(|| Error::Contract(format!("lambda denominator out of range: {s}")))?;
        Self::new(num, den)
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    /// `n` such that `λ = q/(2n)`, when the denominator is even.
    pub fn half_denominator(&self) -> Option<u64> {
        self.den.is_multiple_of(2).then_some(self.den / 2)
    }

    pub fn lambda(&self) -> BigRational {
        BigRational::new(self.num.into(), self.den.into())
    }

    pub fn lambda_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for BernoulliParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// A truncated transform value with its certified truncation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    pub value: f64,
    /// Upper bound on `|μ̂_λ(t) - value|` from the dropped tail factors.
    pub abs_error_bound: f64,
    pub product_depth: u32,
}

/// Tail bound `2π²t²λ^{2(D+1)}/(1-λ²)` for truncation after `D` factors.
pub fn truncation_bound(lam: &BernoulliParam, t: f64, depth: u32) -> f64 {
    let l = lam.lambda_f64();
    let tail = l.powi(2 * (depth as i32 + 1));
    2.0 * std::f64::consts::PI.powi(2) * t * t * tail / (1.0 - l * l)
}

/// Truncated transform `Π_{k=1..depth} cos(2πλ^k t)` in plain f64.
///
/// Adequate for moderate `t`; for lattice-scale arguments use
/// [`eval_muhat_at`], which reduces arguments exactly.
pub fn eval_muhat(lam: &BernoulliParam, t: f64, depth: u32) -> TransformValue {
    assert!(depth >= 1, "depth must be positive");
    let l = lam.lambda_f64();
    let mut x = TAU * t;
    let mut value = 1.0;
    for _ in 0..depth {
        x *= l;
        value *= x.cos();
    }
    TransformValue {
        value,
        abs_error_bound: truncation_bound(lam, t, depth),
        product_depth: depth,
    }
}

/// Truncated transform at an exact rational argument.
///
/// Each factor argument `λ^k t` is reduced mod 1 exactly before evaluating
/// the cosine, so precision does not degrade with the size of `t`, and
/// factors whose reduced argument is exactly 1/4 or 3/4 contribute an exact
/// `0.0` (annihilating the product).
pub fn eval_muhat_at(lam: &BernoulliParam, t: &BigRational, depth: u32) -> TransformValue {
    assert!(depth >= 1, "depth must be positive");
    TransformValue {
        value: cos_product_at(lam, t, depth),
        abs_error_bound: truncation_bound(lam, rational::to_f64(t), depth),
        product_depth: depth,
    }
}

/// `cos(2πr)` with the argument reduced mod 1 in exact arithmetic.
/// Quarter-integer arguments give exact `0.0`, `±1.0`.
pub(crate) fn cos2pi_rational(r: &BigRational) -> f64 {
    let f = fract_nonneg(&r.abs());
    cos2pi_frac_big(f.numer(), f.denom())
}

/// `sin(2πr)`, exact at quarter integers; odd in `r`.
pub(crate) fn sin2pi_rational(r: &BigRational) -> f64 {
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let f = fract_nonneg(&r.abs());
    let (num, den) = (f.numer(), f.denom());
    if num.is_zero() {
        return 0.0;
    }
    let four_num = num * 4u32;
    let s = if four_num == *den {
        1.0
    } else if four_num == den * 3u32 {
        -1.0
    } else if num * 2u32 == *den {
        0.0
    } else {
        (TAU * rational::to_f64(&f)).sin()
    };
    sign * s
}

fn cos2pi_frac_big(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 1.0;
    }
    let four_num = num * 4u32;
    if four_num == *den || four_num == den * 3u32 {
        return 0.0;
    }
    if num * 2u32 == *den {
        return -1.0;
    }
    (TAU * BigRational::new(num.clone(), den.clone()).to_f64().unwrap()).cos()
}

fn cos2pi_frac_u128(r: u128, den: u128) -> f64 {
    if r == 0 {
        return 1.0;
    }
    // 4r and 3·den stay in range because the caller caps den at 2^120.
    if let (Some(r4), Some(d3)) = (r.checked_mul(4), den.checked_mul(3)) {
        if r4 == den || r4 == d3 {
            return 0.0;
        }
    }
    if r.checked_mul(2) == Some(den) {
        return -1.0;
    }
    (TAU * (r as f64 / den as f64)).cos()
}

// u128 state stays safe as long as another numerator/denominator multiply
// cannot overflow.
const U128_GUARD: u128 = 1 << 120;

/// Product of `cos(2πλ^k|s|)` for `k = 1..=depth` with exact argument
/// reduction. u128 fast path with BigInt fallback.
fn cos_product_at(lam: &BernoulliParam, s: &BigRational, depth: u32) -> f64 {
    let s_abs = s.abs();
    let a = lam.num as u128;
    let b = lam.den as u128;
    let mut value = 1.0f64;

    let (n0, d0) = (s_abs.numer().to_u128(), s_abs.denom().to_u128());
    if let (Some(mut num), Some(mut den)) = (n0, d0) {
        let mut k = 0;
        while k < depth {
            if num >= U128_GUARD / a || den >= U128_GUARD / b {
                break;
            }
            num *= a;
            den *= b;
            k += 1;
            let r = if num >= den { num % den } else { num };
            value *= cos2pi_frac_u128(r, den);
            if value == 0.0 {
                return 0.0;
            }
        }
        if k == depth {
            return value;
        }
        // Overflow guard tripped: continue in BigInt from factor k+1.
        return value * cos_product_big(lam, &s_abs, k + 1, depth);
    }
    cos_product_big(lam, &s_abs, 1, depth)
}

fn cos_product_big(lam: &BernoulliParam, s_abs: &BigRational, from: u32, depth: u32) -> f64 {
    let a = BigInt::from(lam.num);
    let b = BigInt::from(lam.den);
    let mut num = s_abs.numer() * a.pow(from - 1);
    let mut den = s_abs.denom() * b.pow(from - 1);
    let mut value = 1.0f64;
    for _ in from..=depth {
        num *= &a;
        den *= &b;
        let r = num.mod_floor(&den);
        value *= cos2pi_frac_big(&r, &den);
        if value == 0.0 {
            return 0.0;
        }
    }
    value
}

/// Exact support interval `[-λ/(1-λ), λ/(1-λ)]`.
pub fn support_interval(lam: &BernoulliParam) -> (BigRational, BigRational) {
    let l = lam.lambda();
    let radius = &l / (BigRational::one() - &l);
    (-radius.clone(), radius)
}

/// Draws of the truncated random series `Σ_{k≤terms} ω_k λ^k`, `ω_k = ±1`.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub samples: Vec<f64>,
    /// Radius `λ^(terms+1)/(1-λ)` of the dropped tail; downstream statistics
    /// widen their tolerances by this much.
    pub tail_radius: f64,
    pub terms: u32,
    pub seed: u64,
}

/// Reproducible draws from the truncated Bernoulli series.
pub fn sample_measure(
    lam: &BernoulliParam,
    count: usize,
    terms: u32,
    seed: u64,
) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::Contract("sample count must be positive".into()));
    }
    if terms == 0 {
        return Err(Error::Contract("term count must be positive".into()));
    }
    let l = lam.lambda_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut powers = Vec::with_capacity(terms as usize);
    let mut p = 1.0;
    for _ in 0..terms {
        p *= l;
        powers.push(p);
    }
    let samples = (0..count)
        .map(|_| {
            powers
                .iter()
                .map(|pw| if rng.gen::<bool>() { *pw } else { -*pw })
                .sum()
        })
        .collect();
    let tail_radius = l.powi(terms as i32 + 1) / (1.0 - l);
    Ok(SampleBatch {
        samples,
        tail_radius,
        terms,
        seed,
    })
}

/// Real part of the empirical characteristic function at frequency `t`.
/// (The measure is symmetric, so the transform is real.)
pub fn empirical_char_fn(samples: &[f64], t: f64) -> f64 {
    samples.iter().map(|x| (TAU * t * x).cos()).sum::<f64>() / samples.len() as f64
}

/// Max residual of the scaling identity `μ̂(t) = cos(2πλt)·μ̂(λt)` over a
/// grid, both sides truncated at `depth`. The residual cannot exceed the sum
/// of the two truncation bounds.
pub fn check_invariance(lam: &BernoulliParam, grid: &[BigRational], depth: u32) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::Contract("invariance check needs a nonempty grid".into()));
    }
    if depth < 2 {
        return Err(Error::Contract("invariance check needs depth >= 2".into()));
    }
    let l = lam.lambda();
    let mut worst = 0.0f64;
    for t in grid {
        let lhs = eval_muhat_at(lam, t, depth).value;
        let lt = t * &l;
        let rhs = cos2pi_rational(&lt) * eval_muhat_at(lam, &lt, depth).value;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{parse_rational, rational_linspace};

    fn big(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn param_validation() {
        assert!(BernoulliParam::new(1, 4).is_ok());
        assert!(BernoulliParam::new(2, 4).is_err()); // not reduced
        assert!(BernoulliParam::new(4, 3).is_err()); // >= 1
        assert!(BernoulliParam::new(0, 3).is_err());
        assert!(BernoulliParam::from_half_denominator(2, 4).is_err()); // even q
        let lam = BernoulliParam::from_half_denominator(3, 4).unwrap();
        assert_eq!(lam.denominator(), 8);
        assert_eq!(lam.half_denominator(), Some(4));
        let third = BernoulliParam::new(1, 3).unwrap();
        assert_eq!(third.half_denominator(), None);
    }

    #[test]
    fn muhat_at_zero_is_one_with_zero_bound() {
        let lam = BernoulliParam::new(1, 4).unwrap();
        let v = eval_muhat(&lam, 0.0, 10);
        assert_eq!(v.value, 1.0);
        assert_eq!(v.abs_error_bound, 0.0);
    }

    #[test]
    fn muhat_dyadic_closed_form() {
        // For λ = 1/2 the product telescopes to sin(2πt)/(2πt).
        let lam = BernoulliParam::new(1, 2).unwrap();
        let v = eval_muhat(&lam, 0.5, 40);
        assert!(v.value.abs() < 1e-12, "got {}", v.value);
        for t in [0.3, 1.7, -2.4] {
            let sinc = (TAU * t).sin() / (TAU * t);
            assert!((eval_muhat(&lam, t, 40).value - sinc).abs() < 1e-12);
        }
    }

    #[test]
    fn muhat_exact_zero_factor() {
        // t = 2, λ = 1/8: the k = 1 factor is cos(π/2) = 0 and the exact
        // path must return literal zero.
        let lam = BernoulliParam::new(1, 8).unwrap();
        let v = eval_muhat_at(&lam, &big("2"), 5);
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn muhat_exact_path_matches_float_path_small_args() {
        let lam = BernoulliParam::new(3, 8).unwrap();
        for t in ["1/3", "7/5", "-9/4", "123/7"] {
            let tr = big(t);
            let exact = eval_muhat_at(&lam, &tr, 25).value;
            let float = eval_muhat(&lam, rational::to_f64(&tr), 25).value;
            assert!((exact - float).abs() < 1e-9, "t={t}: {exact} vs {float}");
        }
    }

    #[test]
    fn support_intervals() {
        let half = BernoulliParam::new(1, 2).unwrap();
        assert_eq!(support_interval(&half), (big("-1"), big("1")));
        let quarter = BernoulliParam::new(1, 4).unwrap();
        assert_eq!(support_interval(&quarter), (big("-1/3"), big("1/3")));
        let tq = BernoulliParam::new(3, 8).unwrap();
        assert_eq!(support_interval(&tq), (big("-3/5"), big("3/5")));
    }

    #[test]
    fn sampling_statistics() {
        let lam = BernoulliParam::new(1, 2).unwrap();
        let batch = sample_measure(&lam, 100_000, 60, 42).unwrap();
        let n = batch.samples.len() as f64;
        let mean = batch.samples.iter().sum::<f64>() / n;
        // symmetric ±1 coin: mean 0 within 3·(sd/√N), sd² = 1/3
        let sd = (1.0f64 / 3.0).sqrt();
        assert!(mean.abs() < 3.0 * sd / n.sqrt() + batch.tail_radius, "mean {mean}");
        // Var = Σ λ^{2k} = λ²/(1-λ²) = 1/3
        let var = batch.samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        assert!((var - 1.0 / 3.0).abs() < 0.01, "var {var}");
        // all samples inside the support inflated by the tail radius
        let (lo, hi) = support_interval(&lam);
        let (lo, hi) = (rational::to_f64(&lo), rational::to_f64(&hi));
        for x in &batch.samples {
            assert!(*x >= lo - batch.tail_radius && *x <= hi + batch.tail_radius);
        }
    }

    #[test]
    fn sampling_rejects_empty() {
        let lam = BernoulliParam::new(1, 2).unwrap();
        assert!(sample_measure(&lam, 0, 10, 1).is_err());
    }

    #[test]
    fn sampling_reproducible() {
        let lam = BernoulliParam::new(3, 8).unwrap();
        let a = sample_measure(&lam, 100, 40, 7).unwrap();
        let b = sample_measure(&lam, 100, 40, 7).unwrap();
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn invariance_residuals() {
        // both sides equal 1 at t = 0
        let lam = BernoulliParam::new(1, 4).unwrap();
        assert_eq!(check_invariance(&lam, &[big("0")], 5).unwrap(), 0.0);

        // λ = 1/8, t = 2: both sides are exactly zero
        let lam8 = BernoulliParam::new(1, 8).unwrap();
        assert_eq!(check_invariance(&lam8, &[big("2")], 5).unwrap(), 0.0);

        // λ = 1/2 over [0,4]: residual below 1e-10 at depth 40
        let half = BernoulliParam::new(1, 2).unwrap();
        let grid = rational_linspace(&big("0"), &big("4"), 100).unwrap();
        assert!(check_invariance(&half, &grid, 40).unwrap() < 1e-10);

        // residual bounded by the two truncation bounds (coarse depth)
        let lam38 = BernoulliParam::new(3, 8).unwrap();
        let grid = rational_linspace(&big("0"), &big("2"), 17).unwrap();
        let res = check_invariance(&lam38, &grid, 6).unwrap();
        let worst_bound: f64 = grid
            .iter()
            .map(|t| {
                truncation_bound(&lam38, rational::to_f64(t), 6)
                    + truncation_bound(&lam38, rational::to_f64(t) * 0.375, 6)
            })
            .fold(0.0, f64::max);
        assert!(res <= worst_bound + 1e-12, "res {res} bound {worst_bound}");

        assert!(check_invariance(&lam, &[], 5).is_err());
        assert!(check_invariance(&lam, &[big("1")], 1).is_err());
    }

    #[test]
    fn empirical_cf_matches_transform() {
        let lam = BernoulliParam::new(1, 4).unwrap();
        let batch = sample_measure(&lam, 50_000, 60, 11).unwrap();
        for t in [0.25, 1.0, 2.5] {
            let ecf = empirical_char_fn(&batch.samples, t);
            let exact = eval_muhat(&lam, t, 60);
            let tol = 3.0 / (batch.samples.len() as f64).sqrt()
                + exact.abs_error_bound
                + TAU * t.abs() * batch.tail_radius;
            assert!((ecf - exact.value).abs() < tol, "t={t}");
        }
    }
}
