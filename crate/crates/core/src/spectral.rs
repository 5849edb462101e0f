//! Truncated spectral functions, scans, Gram sections, frame bounds.
//!
//! For a frequency set `Γ` the spectral function is
//! `c_Γ(t) = Σ_{γ∈Γ} |μ̂(t+γ)|²`. It is ≤ 1 exactly when `E(Γ)` is
//! orthogonal and ≡ 1 exactly when `E(Γ)` is an orthonormal basis, so
//! truncated partial sums — which are monotone lower bounds in the digit
//! depth — are direct numerical evidence for or against completeness.
//!
//! Grid points are exact rationals. Every term whose frequency difference
//! has a zero-set certificate contributes an exact `0.0` regardless of the
//! product depth; the remaining terms are evaluated with exact argument
//! reduction, so values stay accurate even at lattice-scale frequencies.

use num::BigRational;
use rayon::prelude::*;

use crate::lattice::{enumerate_gamma, GammaElement, SpectrumSpec};
use crate::measure::{eval_muhat_at, BernoulliParam};
use crate::rational::{format_float, format_rational, odd_prime_factors, to_f64};
use crate::zeros::in_zero_set;
use crate::{Error, Result};

/// Cap on the number of frequencies in a Gram section.
pub const DEFAULT_GRAM_CAP: usize = 2048;

/// An enumerated spectrum with its elements materialized.
#[derive(Debug, Clone)]
pub struct SpectrumFamily {
    pub spec: SpectrumSpec,
    pub elements: Vec<GammaElement>,
}

impl SpectrumFamily {
    pub fn enumerate(spec: SpectrumSpec, cap: u32) -> Result<Self> {
        Ok(Self {
            elements: enumerate_gamma(&spec, cap)?,
            spec,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = &BigRational> {
        self.elements.iter().map(|e| &e.value)
    }
}

/// One evaluated point of a truncated spectral sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEval {
    /// The partial sum `Σ_γ |μ̂(t+γ)|²` (a lower bound for the full sum up
    /// to the recorded truncation error).
    pub value: f64,
    /// Aggregated product-truncation error over the terms.
    pub error_bound: f64,
    /// How many terms were annihilated by an exact zero-set certificate.
    pub certified_zero_terms: usize,
}

/// Can any `t + γ` (γ a half-integer multiple) reach the zero set of `μ̂_λ`?
/// Zero-set denominators divide `4·A^k`, so every odd prime of `den(t)` must
/// divide `A`; otherwise no certificate exists for any term at this point.
fn certificates_possible(lam: &BernoulliParam, t: &BigRational) -> bool {
    use num::ToPrimitive;
    let Some(den) = t.denom().to_u64() else {
        return true; // oversized denominator: fall back to per-term checks
    };
    odd_prime_factors(den)
        .into_iter()
        .all(|p| lam.numerator().is_multiple_of(p))
}

/// Truncated spectral sum at one exact rational point.
pub fn partial_spectral(
    lam: &BernoulliParam,
    family: &SpectrumFamily,
    t: &BigRational,
    product_depth: u32,
) -> PointEval {
    let snapshots = [family.len()];
    partial_spectral_prefixes(lam, family, t, product_depth, &snapshots)[0]
}

/// Running prefix sums of the spectral sum over the (ascending) family,
/// snapshotted at the given element counts. Because the lattice enumeration
/// is prefix-closed, the snapshot at `2^k` elements is exactly the depth-`k`
/// partial sum, and successive snapshots are nondecreasing by construction.
fn partial_spectral_prefixes(
    lam: &BernoulliParam,
    family: &SpectrumFamily,
    t: &BigRational,
    product_depth: u32,
    snapshots: &[usize],
) -> Vec<PointEval> {
    let check_certs = certificates_possible(lam, t);
    let mut out = Vec::with_capacity(snapshots.len());
    let mut value = 0.0f64;
    let mut error = 0.0f64;
    let mut certified = 0usize;
    let mut next = 0usize;
    for (idx, el) in family.elements.iter().enumerate() {
        while next < snapshots.len() && snapshots[next] == idx {
            out.push(PointEval {
                value,
                error_bound: error,
                certified_zero_terms: certified,
            });
            next += 1;
        }
        let s = t + &el.value;
        if check_certs && in_zero_set(lam, &s).member {
            certified += 1;
            continue;
        }
        let tv = eval_muhat_at(lam, &s, product_depth);
        value += tv.value * tv.value;
        error += 2.0 * tv.value.abs() * tv.abs_error_bound
            + tv.abs_error_bound * tv.abs_error_bound;
    }
    while next < snapshots.len() {
        out.push(PointEval {
            value,
            error_bound: error,
            certified_zero_terms: certified,
        });
        next += 1;
    }
    out
}

/// A grid of truncated spectral-sum values.
#[derive(Debug, Clone)]
pub struct SpectralScan {
    pub lam: BernoulliParam,
    pub spec: SpectrumSpec,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub error_bounds: Vec<f64>,
    pub product_depth: u32,
    pub truncation_note: String,
}

impl SpectralScan {
    pub fn digit_depth(&self) -> u32 {
        self.spec.digit_depth()
    }

    /// Smallest value on the grid.
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// CSV export `t,value,error_bound,K,D`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value,error_bound,K,D\n");
        for i in 0..self.grid.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                format_float(self.grid[i]),
                format_float(self.values[i]),
                format_float(self.error_bounds[i]),
                self.spec.digit_depth(),
                self.product_depth
            ));
        }
        out
    }
}

fn truncation_note(product_depth: u32) -> String {
    format!(
        "values are certified lower bounds: per-point error aggregates the \
         product-truncation bound of each term at depth {product_depth}; \
         no tail bound over the lattice is included"
    )
}

/// Pointwise truncated spectral sums over an exact rational grid.
pub fn scan(
    lam: &BernoulliParam,
    spec: SpectrumSpec,
    grid: &[BigRational],
    product_depth: u32,
    cap: u32,
) -> Result<SpectralScan> {
    let mut scans = scan_depths(lam, spec, &[spec.digit_depth()], grid, product_depth, cap)?;
    Ok(scans.pop().expect("one requested depth"))
}

/// Scans at several digit depths sharing one pass over the deepest lattice.
/// Snapshots of a single running sum guarantee the monotonicity of values
/// across depths pointwise, even in floating point.
pub fn scan_depths(
    lam: &BernoulliParam,
    spec: SpectrumSpec,
    digit_depths: &[u32],
    grid: &[BigRational],
    product_depth: u32,
    cap: u32,
) -> Result<Vec<SpectralScan>> {
    if grid.is_empty() {
        return Err(Error::Contract("scan needs a nonempty grid".into()));
    }
    if digit_depths.is_empty() {
        return Err(Error::Contract("scan needs at least one digit depth".into()));
    }
    if digit_depths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract("digit depths must be strictly ascending".into()));
    }
    let deepest = *digit_depths.last().unwrap();
    let family = SpectrumFamily::enumerate(spec.with_depth(deepest), cap)?;
    let snapshots: Vec<usize> = digit_depths.iter().map(|k| 1usize << k).collect();

    let per_point: Vec<Vec<PointEval>> = grid
        .par_iter()
        .map(|t| partial_spectral_prefixes(lam, &family, t, product_depth, &snapshots))
        .collect();

    let grid_f64: Vec<f64> = grid.iter().map(to_f64).collect();
    Ok(digit_depths
        .iter()
        .enumerate()
        .map(|(di, &k)| SpectralScan {
            lam: *lam,
            spec: spec.with_depth(k),
            grid: grid_f64.clone(),
            values: per_point.iter().map(|p| p[di].value).collect(),
            error_bounds: per_point.iter().map(|p| p[di].error_bound).collect(),
            product_depth,
            truncation_note: truncation_note(product_depth),
        })
        .collect())
}

/// Verdict of a scan family over increasing digit depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagnosis {
    ConsistentWithOnb,
    DeficiencyEvidence,
    Inconclusive,
}

impl Diagnosis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Diagnosis::ConsistentWithOnb => "consistent-with-onb",
            Diagnosis::DeficiencyEvidence => "deficiency-evidence",
            Diagnosis::Inconclusive => "inconclusive",
        }
    }
}

/// Thresholds for [`classify_scan`]. The defaults separate a pinned-at-zero
/// defect from slow convergence at desk scale; they are tunable knobs, not
/// theorems.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyTolerances {
    /// Plateau level: consistent-with-ONB needs every value above
    /// `1 - plateau` at the deepest scan.
    pub plateau: f64,
    /// A point is stalled when all successive increments stay below this.
    pub increment: f64,
    /// A stalled point must sit below `1 - gap` to count as deficiency.
    pub gap: f64,
}

impl Default for ClassifyTolerances {
    fn default() -> Self {
        Self {
            plateau: 1e-2,
            increment: 1e-4,
            gap: 5e-2,
        }
    }
}

/// Classifies a family of scans of the same grid at increasing digit depth.
pub fn classify_scan(scans: &[SpectralScan], tol: &ClassifyTolerances) -> Result<Diagnosis> {
    if scans.len() < 2 {
        return Err(Error::Contract(
            "classification needs scans at two or more digit depths".into(),
        ));
    }
    let points = scans[0].grid.len();
    for s in scans {
        if s.grid.len() != points {
            return Err(Error::Contract("scans must share one grid".into()));
        }
    }
    if scans.windows(2).any(|w| w[0].digit_depth() >= w[1].digit_depth()) {
        return Err(Error::Contract("scans must have ascending digit depth".into()));
    }
    let last = scans.last().unwrap();
    if last.values.iter().all(|v| *v > 1.0 - tol.plateau) {
        return Ok(Diagnosis::ConsistentWithOnb);
    }
    for i in 0..points {
        let stalled = scans
            .windows(2)
            .all(|w| w[1].values[i] - w[0].values[i] < tol.increment);
        if stalled && last.values[i] < 1.0 - tol.gap {
            return Ok(Diagnosis::DeficiencyEvidence);
        }
    }
    Ok(Diagnosis::Inconclusive)
}

/// Max absolute central-difference slope of a scan on a uniform grid.
pub fn derivative_scan(scan: &SpectralScan) -> Result<f64> {
    let g = &scan.grid;
    if g.len() < 3 {
        return Err(Error::Contract("derivative scan needs at least 3 points".into()));
    }
    let h = g[1] - g[0];
    if h <= 0.0 {
        return Err(Error::Contract("grid must be increasing".into()));
    }
    for w in g.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0) {
            return Err(Error::Contract("derivative scan needs a uniform grid".into()));
        }
    }
    let mut worst = 0.0f64;
    for i in 1..g.len() - 1 {
        worst = worst.max(((scan.values[i + 1] - scan.values[i - 1]) / (2.0 * h)).abs());
    }
    Ok(worst)
}

/// Finite section of the Gram matrix `μ̂(γ_i - γ_j)` of an exponential
/// family. Symmetric with unit diagonal; certified zero-set differences are
/// exact zeros.
#[derive(Debug, Clone)]
pub struct GramSection {
    pub frequencies: Vec<BigRational>,
    pub entries: Vec<Vec<f64>>,
    pub product_depth: u32,
}

/// Builds the Gram section of a frequency set.
pub fn gram_section(
    lam: &BernoulliParam,
    frequencies: &[BigRational],
    product_depth: u32,
    cap: usize,
) -> Result<GramSection> {
    if frequencies.is_empty() {
        return Err(Error::Contract("Gram section needs at least one frequency".into()));
    }
    if frequencies.len() > cap {
        return Err(Error::ResourceCap(format!(
            "{} frequencies exceed the Gram cap {}",
            frequencies.len(),
            cap
        )));
    }
    let n = frequencies.len();
    let mut entries = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        entries[i][i] = 1.0;
        for j in (i + 1)..n {
            let diff = &frequencies[i] - &frequencies[j];
            let v = if in_zero_set(lam, &diff).member {
                0.0
            } else {
                eval_muhat_at(lam, &diff, product_depth).value
            };
            entries[i][j] = v;
            entries[j][i] = v;
        }
    }
    Ok(GramSection {
        frequencies: frequencies.to_vec(),
        entries,
        product_depth,
    })
}

/// An eigenvalue estimate with its residual `‖Gv - λv‖₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenEstimate {
    pub value: f64,
    pub residual: f64,
}

/// Extremal eigenvalue estimates of a Gram section; finite-section stand-ins
/// for frame bounds of the exponential family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub lower: EigenEstimate,
    pub upper: EigenEstimate,
    pub iterations: u32,
}

fn matvec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Power iteration with Rayleigh quotient; deterministic tilted start so the
/// initial vector is never orthogonal to the dominant eigenvector of a small
/// symmetric section in practice.
fn power_iterate(m: &[Vec<f64>], iters: u32) -> EigenEstimate {
    let n = m.len();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 1e-3 * i as f64).collect();
    let s = norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    for _ in 0..iters {
        let w = matvec(m, &v);
        let wn = norm(&w);
        if wn == 0.0 {
            // v is in the kernel: eigenvalue 0, exact
            return EigenEstimate { value: 0.0, residual: 0.0 };
        }
        v = w.into_iter().map(|x| x / wn).collect();
    }
    let w = matvec(m, &v);
    let value: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
    let residual = norm(&w.iter().zip(&v).map(|(a, b)| a - value * b).collect::<Vec<_>>());
    EigenEstimate { value, residual }
}

/// Largest eigenvalue by power iteration; smallest by a shifted iteration on
/// `sI - G` with `s` just above the largest estimate.
pub fn frame_bound_estimates(g: &GramSection, iters: u32) -> Result<FrameBounds> {
    if iters == 0 {
        return Err(Error::Contract("eigenvalue estimation needs iters >= 1".into()));
    }
    let upper = power_iterate(&g.entries, iters);
    let shift = upper.value + upper.residual + 1e-9;
    let n = g.entries.len();
    let shifted: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = if i == j { shift } else { 0.0 };
                    d - g.entries[i][j]
                })
                .collect()
        })
        .collect();
    let inner = power_iterate(&shifted, iters);
    let lower = EigenEstimate {
        value: shift - inner.value,
        residual: inner.residual,
    };
    Ok(FrameBounds {
        lower,
        upper,
        iterations: iters,
    })
}

/// JSON export of a Gram section with its eigen-estimates.
pub fn gram_json(g: &GramSection, bounds: &FrameBounds) -> serde_json::Value {
    serde_json::json!({
        "frequencies": g.frequencies.iter().map(format_rational).collect::<Vec<_>>(),
        "product_depth": g.product_depth,
        "matrix": g.entries,
        "upper": {"value": bounds.upper.value, "residual": bounds.upper.residual},
        "lower": {"value": bounds.lower.value, "residual": bounds.lower.residual},
        "iterations": bounds.iterations,
    })
}
