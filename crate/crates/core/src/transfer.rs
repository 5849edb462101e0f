//! Transfer operators whose fixed point is the spectral function.
//!
//! For `λ = 1/(2n)` and an odd dilation `p`, the operator
//!
//! ```text
//! (T_p f)(t) = cos²(πt/n)·f(t/(2n)) + sin²(πt/n)·f(t/(2n) + p/4)
//! ```
//!
//! fixes the spectral function of `pΓ(1/2n)`, is localized on the interval
//! `J = [0, pn/(2(2n-1))]`, and contracts the `max|f'|` seminorm by
//! `πp/(4n) + 1/(2n)`. When that constant is below 1 — equivalently
//! `p < 2(2n-1)/π` — the only fixed point in the class
//! `{f ≥ 0, f(0) = 1}` is the constant 1, which is exactly the
//! orthonormal-basis property of the family.
//!
//! The measure `μ_{3/8}` has its own chain of operators: the `Γ(1/8)`
//! spectral sums against `μ_{3/8}` at successive dilations `3^k` satisfy
//! `T_k f_{k+1} = f_k` with
//! `T_k f(t) = cos²(2π·3t/8) f(3t/8) + sin²(2π·3t/8) f(3t/8 + 3^(k+1)/4)`.
//!
//! Functions are uniform-grid samples with linear interpolation; the maps
//! contract by `1/(2n)`, so interpolation error stays controlled.

use num::{BigInt, BigRational, Zero};

use crate::lattice::SpectrumSpec;
use crate::measure::{cos2pi_rational, BernoulliParam};
use crate::rational::{format_float, to_f64};
use crate::spectral::{partial_spectral, SpectrumFamily};
use crate::{Error, Result};

/// Largest chain index accepted by [`chain_transfer_38`]; the branch shift
/// `3^(k+1)/4` grows geometrically with `k`.
pub const CHAIN_INDEX_CAP: u32 = 3;

/// A real function on `[a, b]` sampled at uniform nodes, evaluated between
/// nodes by linear interpolation. Evaluation outside the interval is a
/// contract violation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    a: f64,
    b: f64,
    samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(a: f64, b: f64, samples: Vec<f64>) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::Contract(format!("bad interval [{a}, {b}]")));
        }
        if samples.len() < 2 {
            return Err(Error::Contract("grid function needs at least 2 nodes".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Contract("grid function samples must be finite".into()));
        }
        Ok(Self { a, b, samples })
    }

    pub fn from_fn(a: f64, b: f64, nodes: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::Contract("grid function needs at least 2 nodes".into()));
        }
        let h = (b - a) / (nodes - 1) as f64;
        Self::new(a, b, (0..nodes).map(|i| f(a + i as f64 * h)).collect())
    }

    pub fn constant(a: f64, b: f64, nodes: usize, value: f64) -> Result<Self> {
        Self::from_fn(a, b, nodes, |_| value)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn node_count(&self) -> usize {
        self.samples.len()
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / (self.samples.len() - 1) as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn node(&self, i: usize) -> f64 {
        self.a + i as f64 * self.spacing()
    }

    /// Linear interpolation; `x` must lie in `[a, b]` (a relative slack of
    /// 1e-9 absorbs float dust from mapped endpoints).
    pub fn eval(&self, x: f64) -> f64 {
        let slack = 1e-9 * self.b.abs().max(self.a.abs()).max(1.0);
        assert!(
            x >= self.a - slack && x <= self.b + slack,
            "evaluation at {x} outside [{}, {}]",
            self.a,
            self.b
        );
        let x = x.clamp(self.a, self.b);
        let h = self.spacing();
        let pos = (x - self.a) / h;
        let i = (pos.floor() as usize).min(self.samples.len() - 2);
        let w = pos - i as f64;
        self.samples[i] * (1.0 - w) + self.samples[i + 1] * w
    }

    /// Max absolute deviation from the constant 1.
    pub fn sup_deviation_from_one(&self) -> f64 {
        self.samples.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Discrete `max|f'|`: largest absolute slope between adjacent nodes.
    pub fn seminorm(&self) -> f64 {
        let h = self.spacing();
        self.samples
            .windows(2)
            .map(|w| ((w[1] - w[0]) / h).abs())
            .fold(0.0, f64::max)
    }

    /// CSV export `t,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (i, v) in self.samples.iter().enumerate() {
            out.push_str(&format!("{},{}\n", format_float(self.node(i)), format_float(*v)));
        }
        out
    }
}

/// The operator parameters for `λ = 1/(2n)` with odd dilation `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferSpec {
    n: u64,
    p: u64,
}

impl TransferSpec {
    pub fn new(n: u64, p: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Contract(format!("transfer operator needs n >= 2, got {n}")));
        }
        if p == 0 || p.is_multiple_of(2) {
            return Err(Error::Contract(format!("dilation must be odd, got {p}")));
        }
        Ok(Self { n, p })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dilation(&self) -> u64 {
        self.p
    }

    pub fn tau0(&self, t: f64) -> f64 {
        t / (2.0 * self.n as f64)
    }

    pub fn tau_p(&self, t: f64) -> f64 {
        t / (2.0 * self.n as f64) + self.p as f64 / 4.0
    }
}

/// The invariant interval `J = [0, pn/(2(2n-1))]`, the smallest `[0, R]`
/// mapped into itself by both branches.
pub fn invariant_interval(n: u64, p: u64) -> Result<(BigRational, BigRational)> {
    let spec = TransferSpec::new(n, p)?;
    let r = BigRational::new(
        BigInt::from(spec.p * spec.n),
        BigInt::from(2 * (2 * spec.n - 1)),
    );
    Ok((BigRational::zero(), r))
}

/// One application of the transfer operator, sampled on the grid of `f`.
/// `f`'s interval must contain the invariant interval (and the origin).
pub fn apply_transfer(spec: &TransferSpec, f: &GridFunction) -> Result<GridFunction> {
    let (_, r) = invariant_interval(spec.n, spec.p)?;
    let r = to_f64(&r);
    let (a, b) = f.interval();
    if a > 0.0 || b < r - 1e-12 {
        return Err(Error::Contract(format!(
            "function domain [{a}, {b}] does not contain the invariant interval [0, {r}]"
        )));
    }
    let n = spec.n as f64;
    let samples = (0..f.node_count())
        .map(|i| {
            let t = f.node(i);
            // weights cos², 1-cos² so that constants are exact fixed points
            let w0 = (std::f64::consts::PI * t / n).cos().powi(2);
            w0 * f.eval(spec.tau0(t)) + (1.0 - w0) * f.eval(spec.tau_p(t))
        })
        .collect();
    GridFunction::new(a, b, samples)
}

/// The seminorm contraction constant `πp/(4n) + 1/(2n)` and whether it is
/// below 1 (exactly the predicate `p < 2(2n-1)/π`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contractivity {
    pub constant: f64,
    pub contractive: bool,
}

pub fn contractivity_constant(n: u64, p: u64) -> Result<Contractivity> {
    TransferSpec::new(n, p)?;
    let (nf, pf) = (n as f64, p as f64);
    Ok(Contractivity {
        constant: std::f64::consts::PI * pf / (4.0 * nf) + 1.0 / (2.0 * nf),
        contractive: pf * std::f64::consts::PI < 2.0 * (2.0 * nf - 1.0),
    })
}

/// Per-iteration statistics of the fixed-point run.
#[derive(Debug, Clone, Copy)]
pub struct IterationRecord {
    pub iter: u32,
    /// `max |f_i - 1|` over the nodes.
    pub sup_dev: f64,
    /// Discrete `max|f'|` seminorm.
    pub seminorm: f64,
    /// `max |f_i - f_(i-1)|`; `None` on the initial record.
    pub step: Option<f64>,
}

/// Result of iterating the transfer operator from a starting function.
#[derive(Debug, Clone)]
pub struct FixedPointRun {
    pub final_fn: GridFunction,
    pub history: Vec<IterationRecord>,
    pub converged: bool,
}

impl FixedPointRun {
    /// CSV export `iter,sup_dev,seminorm`.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("iter,sup_dev,seminorm\n");
        for rec in &self.history {
            out.push_str(&format!(
                "{},{},{}\n",
                rec.iter,
                format_float(rec.sup_dev),
                format_float(rec.seminorm)
            ));
        }
        out
    }
}

/// Repeated application of the operator from `f0`, which must be an
/// admissible starting function: nonnegative with `f0(0) = 1`. Terminates
/// when `max|f_i - f_(i-1)|` drops to `tol` or after `max_iters`.
pub fn iterate_to_fixed_point(
    spec: &TransferSpec,
    f0: GridFunction,
    max_iters: u32,
    tol: f64,
) -> Result<FixedPointRun> {
    let (a, b) = f0.interval();
    if a > 0.0 || b < 0.0 {
        return Err(Error::Contract("starting function must contain the origin".into()));
    }
    if f0.samples().iter().any(|v| *v < 0.0) {
        return Err(Error::Contract("starting function must be nonnegative".into()));
    }
    if (f0.eval(0.0) - 1.0).abs() > 1e-12 {
        return Err(Error::Contract("starting function must satisfy f(0) = 1".into()));
    }
    let mut history = vec![IterationRecord {
        iter: 0,
        sup_dev: f0.sup_deviation_from_one(),
        seminorm: f0.seminorm(),
        step: None,
    }];
    let mut current = f0;
    let mut converged = false;
    for iter in 1..=max_iters {
        let next = apply_transfer(spec, &current)?;
        let step = next
            .samples()
            .iter()
            .zip(current.samples())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        history.push(IterationRecord {
            iter,
            sup_dev: next.sup_deviation_from_one(),
            seminorm: next.seminorm(),
            step: Some(step),
        });
        current = next;
        if step <= tol {
            converged = true;
            break;
        }
    }
    Ok(FixedPointRun {
        final_fn: current,
        history,
        converged,
    })
}

/// Residual of a truncated functional-equation identity, together with the
/// truncation-error budget that bounds it mathematically.
#[derive(Debug, Clone, Copy)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub truncation_budget: f64,
}

/// Exact finite recursion satisfied by the truncated spectral sums: with
/// `λ = q/(2n)` and `c_K` the depth-`K` sum over `pΓ(1/2n)`,
///
/// ```text
/// c_K(t) = cos²(πqt/n)·c'_(K-1)(qt/2n) + sin²(πqt/n)·c'_(K-1)(qt/2n + pq/4)
/// ```
///
/// where `c'` sums over `(qp)Γ(1/2n)`. For `q = 1` this is the transfer
/// operator acting on its own family; for `μ_{3/8}` over `Γ(1/8)` it is the
/// first link of the dilation chain. Both sides are evaluated independently
/// (direct sums over their lattices), so the residual is bounded by the
/// accumulated product-truncation error.
pub fn functional_equation_residual(
    lam: &BernoulliParam,
    spec: &SpectrumSpec,
    grid: &[BigRational],
    product_depth: u32,
    cap: u32,
) -> Result<ResidualReport> {
    if spec.digit_depth() < 1 {
        return Err(Error::Contract("recursion needs digit depth >= 1".into()));
    }
    if grid.is_empty() {
        return Err(Error::Contract("residual check needs a nonempty grid".into()));
    }
    if lam.denominator() != 2 * spec.n() {
        return Err(Error::Contract(format!(
            "lambda denominator {} must equal 2n = {}",
            lam.denominator(),
            2 * spec.n()
        )));
    }
    let q = lam.numerator();
    let k = spec.digit_depth();
    let lhs_family = SpectrumFamily::enumerate(*spec, cap)?;
    let rhs_spec = SpectrumSpec::new(spec.n(), q * spec.dilation(), k - 1)?;
    let rhs_family = SpectrumFamily::enumerate(rhs_spec, cap)?;

    let lambda = lam.lambda();
    let shift = BigRational::new(
        BigInt::from(spec.dilation() * q),
        BigInt::from(4u32),
    );
    let mut max_residual = 0.0f64;
    let mut budget = 0.0f64;
    for t in grid {
        let lhs = partial_spectral(lam, &lhs_family, t, product_depth);
        let t0 = t * &lambda;
        let t1 = &t0 + &shift;
        let c = cos2pi_rational(&t0);
        let (w0, w1) = (c * c, 1.0 - c * c);
        let r0 = partial_spectral(lam, &rhs_family, &t0, product_depth);
        let r1 = partial_spectral(lam, &rhs_family, &t1, product_depth);
        let rhs = w0 * r0.value + w1 * r1.value;
        max_residual = max_residual.max((lhs.value - rhs).abs());
        budget = budget.max(lhs.error_bound + w0 * r0.error_bound + w1 * r1.error_bound);
    }
    Ok(ResidualReport {
        max_residual,
        truncation_budget: budget,
    })
}

/// One operator of the `μ_{3/8}` dilation chain acting on a grid function:
/// `(T_k f)(t) = cos²(2π·3t/8) f(3t/8) + sin²(2π·3t/8) f(3t/8 + 3^(k+1)/4)`.
/// The result is sampled on `[0, 3]`; `f` must cover
/// `[0, 9/8 + 3^(k+1)/4]`.
pub fn chain_transfer_38(k: u32, f: &GridFunction) -> Result<GridFunction> {
    if k > CHAIN_INDEX_CAP {
        return Err(Error::ResourceCap(format!(
            "chain index {k} exceeds cap {CHAIN_INDEX_CAP}"
        )));
    }
    let shift = 3_f64.powi(k as i32 + 1) / 4.0;
    let needed = 9.0 / 8.0 + shift;
    let (a, b) = f.interval();
    if a > 0.0 || b < needed - 1e-12 {
        return Err(Error::Contract(format!(
            "chain operator {k} needs the function on [0, {needed}], got [{a}, {b}]"
        )));
    }
    let samples = (0..f.node_count())
        .map(|i| {
            let t = i as f64 * 3.0 / (f.node_count() - 1) as f64;
            let x = 3.0 * t / 8.0;
            let w0 = (std::f64::consts::TAU * x).cos().powi(2);
            w0 * f.eval(x) + (1.0 - w0) * f.eval(x + shift)
        })
        .collect();
    GridFunction::new(0.0, 3.0, samples)
}

/// Chain-link identity for `μ_{3/8}`: the depth-`K` spectral sum over
/// `3^k Γ(1/8)` equals `T_k` applied to the depth-`(K-1)` sum over
/// `3^(k+1) Γ(1/8)`, up to product truncation. Evaluated pointwise on the
/// grid (no interpolation).
pub fn chain_identity_residual_38(
    k: u32,
    grid: &[BigRational],
    digit_depth: u32,
    product_depth: u32,
    cap: u32,
) -> Result<ResidualReport> {
    let lam = BernoulliParam::new(3, 8).expect("3/8 is valid");
    let p = 3u64
        .checked_pow(k)
        .ok_or_else(|| Error::ResourceCap(format!("chain index {k} too large")))?;
    let spec = SpectrumSpec::new(4, p, digit_depth)?;
    functional_equation_residual(&lam, &spec, grid, product_depth, cap)
}
