//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//! Tolerances are pinned here; scan plateau/dip levels were frozen from the
//! first calibration run and guard against regressions.

use std::sync::OnceLock;
use std::time::Instant;

use bernoulli_spectra::lattice::{is_hadamard_triple, SpectrumSpec, DEFAULT_ENUM_CAP};
use bernoulli_spectra::measure::{
    empirical_char_fn, eval_muhat, sample_measure, BernoulliParam,
};
use bernoulli_spectra::rational::{parse_rational, rational_linspace, Rational};
use bernoulli_spectra::spectral::{
    derivative_scan, partial_spectral, scan_depths, SpectralScan, SpectrumFamily,
};
use bernoulli_spectra::transfer::{
    chain_identity_residual_38, contractivity_constant, functional_equation_residual,
    iterate_to_fixed_point, GridFunction, TransferSpec,
};
use bernoulli_spectra::zeros::{pairwise_orthogonal, DEFAULT_PAIRWISE_CAP};
use num::BigInt;

const PRODUCT_DEPTH: u32 = 30;
const SCAN_DEPTHS: [u32; 4] = [4, 8, 12, 16];
/// f64 rounding allowance for accumulated spectral sums, on top of the
/// certified truncation bounds (which only cover dropped product factors).
const FLOAT_SUM_SLACK: f64 = 1e-7;

fn big(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn report(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion:02}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion:02} failed: {detail}");
}

/// The three scan families several criteria share, computed once.
struct ScanSet {
    /// λ = 1/4 over Γ(1/4) on [0, 1].
    quarter: Vec<SpectralScan>,
    /// λ = 1/8 over 3Γ(1/8) on [0, 6/7].
    three: Vec<SpectralScan>,
    /// λ = 1/8 over 5Γ(1/8) on [0, 10/7].
    five: Vec<SpectralScan>,
}

fn scans() -> &'static ScanSet {
    static SCANS: OnceLock<ScanSet> = OnceLock::new();
    SCANS.get_or_init(|| {
        let grid = |hi: &str| rational_linspace(&big("0"), &big(hi), 64).unwrap();
        let quarter = scan_depths(
            &BernoulliParam::new(1, 4).unwrap(),
            SpectrumSpec::new(2, 1, 16).unwrap(),
            &SCAN_DEPTHS,
            &grid("1"),
            PRODUCT_DEPTH,
            DEFAULT_ENUM_CAP,
        )
        .unwrap();
        let lam8 = BernoulliParam::new(1, 8).unwrap();
        let three = scan_depths(
            &lam8,
            SpectrumSpec::new(4, 3, 16).unwrap(),
            &SCAN_DEPTHS,
            &grid("6/7"),
            PRODUCT_DEPTH,
            DEFAULT_ENUM_CAP,
        )
        .unwrap();
        let five = scan_depths(
            &lam8,
            SpectrumSpec::new(4, 5, 16).unwrap(),
            &SCAN_DEPTHS,
            &grid("10/7"),
            PRODUCT_DEPTH,
            DEFAULT_ENUM_CAP,
        )
        .unwrap();
        ScanSet {
            quarter,
            three,
            five,
        }
    })
}

#[test]
fn acceptance_01_dyadic_closed_form() {
    // λ = 1/2: the product telescopes to sin(2πt)/(2πt).
    let lam = BernoulliParam::new(1, 2).unwrap();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..200 {
        let t = -4.0 + 8.0 * i as f64 / 199.0;
        let sinc = if t == 0.0 {
            1.0
        } else {
            (std::f64::consts::TAU * t).sin() / (std::f64::consts::TAU * t)
        };
        worst = worst.max((eval_muhat(&lam, t, 40).value - sinc).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-10 && elapsed.as_secs_f64() < 1.0;
    report(
        1,
        pass,
        &format!("max |product - sinc| = {worst:.2e} over 200 points in [-4,4], {elapsed:.2?}"),
    );
}

#[test]
fn acceptance_02_exact_orthogonality_suites() {
    let suites = [
        (BernoulliParam::new(1, 4).unwrap(), 2u64, 1u64),
        (BernoulliParam::new(1, 8).unwrap(), 4, 1),
        (BernoulliParam::new(1, 8).unwrap(), 4, 3),
        (BernoulliParam::new(3, 8).unwrap(), 4, 1),
    ];
    let mut detail = String::new();
    let mut pass = true;
    for (lam, n, p) in suites {
        let fam =
            SpectrumFamily::enumerate(SpectrumSpec::new(n, p, 6).unwrap(), DEFAULT_ENUM_CAP)
                .unwrap();
        let freqs: Vec<Rational> = fam.values().cloned().collect();
        let start = Instant::now();
        let rep = pairwise_orthogonal(&lam, &freqs, DEFAULT_PAIRWISE_CAP).unwrap();
        let elapsed = start.elapsed();
        pass &= rep.all_orthogonal && elapsed.as_secs_f64() < 5.0;
        detail.push_str(&format!(
            "[λ={lam} {p}Γ(1/{}) depth 6: {} pairs exact in {elapsed:.2?}] ",
            2 * n,
            rep.pairs_checked
        ));
    }
    report(2, pass, detail.trim());
}

#[test]
fn acceptance_03_onb_evidence_scans() {
    // Plateau floor frozen from the first calibration run.
    const PLATEAU_FLOOR: f64 = 0.99;
    let mut pass = true;
    let mut detail = String::new();
    for (name, family) in [("Γ(1/4)", &scans().quarter), ("3Γ(1/8)", &scans().three)] {
        for w in family.windows(2) {
            for i in 0..w[0].values.len() {
                pass &= w[1].values[i] >= w[0].values[i];
            }
        }
        for scan in family.iter() {
            for i in 0..scan.values.len() {
                pass &= scan.values[i] <= 1.0 + scan.error_bounds[i] + FLOAT_SUM_SLACK;
            }
        }
        let deepest_min = family.last().unwrap().min_value();
        pass &= deepest_min > PLATEAU_FLOOR;
        detail.push_str(&format!("[{name}: min at K=16 is {deepest_min:.6}] "));
    }
    report(
        3,
        pass,
        &format!("{}nondecreasing in K, bounded by 1 + truncation", detail),
    );
}

#[test]
fn acceptance_04_defect_witness_pinned_at_zero() {
    // p = 2n-1 = 7: e_{-2} is orthogonal to the whole family, so the
    // spectral sum at t = 2 is exactly zero, every term certified.
    let lam = BernoulliParam::new(1, 8).unwrap();
    let t = big("2");
    let mut pass = true;
    for k in 0..=8u32 {
        let fam = SpectrumFamily::enumerate(SpectrumSpec::new(4, 7, k).unwrap(), DEFAULT_ENUM_CAP)
            .unwrap();
        let e = partial_spectral(&lam, &fam, &t, PRODUCT_DEPTH);
        pass &= e.value == 0.0 && e.certified_zero_terms == fam.len();
    }
    report(
        4,
        pass,
        "7Γ(1/8) spectral sum at t = 2 is exactly 0.0 for every K ≤ 8 (all terms certified)",
    );
}

#[test]
fn acceptance_05_contractivity_table() {
    // Admissible dilation lists as stated; the predicate itself is
    // p·π < 2(2n-1), evaluated per odd p until it first fails.
    let expected: [(u64, &[u64]); 5] = [
        (2, &[1]),
        (3, &[1]),
        (4, &[1, 3]),
        (5, &[1, 3, 5]),
        (6, &[1, 3, 5, 7]),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (n, want) in expected {
        let mut got = Vec::new();
        let mut p = 1u64;
        loop {
            let c = contractivity_constant(n, p).unwrap();
            if !c.contractive {
                break;
            }
            got.push(p);
            p += 2;
        }
        if got != want {
            pass = false;
            detail.push_str(&format!(
                "[n={n}: predicate admits {got:?}, stated table says {want:?}; \
                 e.g. constant(n={n}, p={}) = {:.4} < 1] ",
                got.last().unwrap(),
                contractivity_constant(n, *got.last().unwrap()).unwrap().constant
            ));
        } else {
            detail.push_str(&format!("[n={n}: {got:?}] "));
        }
    }
    report(5, pass, detail.trim());
}

type StartFn = Box<dyn Fn(f64) -> f64>;

#[test]
fn acceptance_06_fixed_point_convergence() {
    let spec = TransferSpec::new(4, 3).unwrap();
    let r = 6.0 / 7.0;
    let starts: [(&str, StartFn); 3] = [
        ("bump", Box::new(move |t| 1.0 + t * (r - t))),
        ("sine", Box::new(|t| 1.0 + 0.5 * (std::f64::consts::PI * t).sin())),
        ("decay", Box::new(|t| (1.0 + t) * (-t).exp())),
    ];
    let start_time = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    for (name, f) in starts {
        let f0 = GridFunction::from_fn(0.0, r, 4097, f).unwrap();
        let run = iterate_to_fixed_point(&spec, f0, 60, 0.0).unwrap();
        let hit = run
            .history
            .iter()
            .find(|rec| rec.sup_dev < 1e-8)
            .map(|rec| rec.iter);
        // geometric-mean seminorm decay over the tail, while well above
        // the float floor
        let s: Vec<f64> = run
            .history
            .iter()
            .map(|rec| rec.seminorm)
            .filter(|v| *v > 1e-12)
            .collect();
        let tail = &s[s.len() / 2..];
        let ratio = if tail.len() >= 2 {
            (tail[tail.len() - 1] / tail[0]).powf(1.0 / (tail.len() - 1) as f64)
        } else {
            f64::NAN
        };
        pass &= hit.is_some_and(|it| it <= 60) && ratio <= 0.72 + 0.02;
        detail.push_str(&format!(
            "[{name}: sup|f-1| < 1e-8 at iter {:?}, tail seminorm ratio {ratio:.4}] ",
            hit
        ));
    }
    let elapsed = start_time.elapsed();
    pass &= elapsed.as_secs_f64() < 10.0;
    report(6, pass, &format!("{}{elapsed:.2?} on 4097 nodes", detail));
}

#[test]
fn acceptance_07_functional_equation_residual() {
    let grid67 = rational_linspace(&big("0"), &big("6/7"), 64).unwrap();
    let rep8 = functional_equation_residual(
        &BernoulliParam::new(1, 8).unwrap(),
        &SpectrumSpec::new(4, 3, 8).unwrap(),
        &grid67,
        PRODUCT_DEPTH,
        DEFAULT_ENUM_CAP,
    )
    .unwrap();
    // the μ_{3/8} recursion over Γ(1/8) is localized on [0, 6/5]
    let grid65 = rational_linspace(&big("0"), &big("6/5"), 64).unwrap();
    let rep38 = functional_equation_residual(
        &BernoulliParam::new(3, 8).unwrap(),
        &SpectrumSpec::new(4, 1, 8).unwrap(),
        &grid65,
        PRODUCT_DEPTH,
        DEFAULT_ENUM_CAP,
    )
    .unwrap();
    let pass = rep8.max_residual < 1e-9 && rep38.max_residual < 1e-9;
    report(
        7,
        pass,
        &format!(
            "λ=1/8 3Γ K=8: {:.2e}; λ=3/8 Γ(1/8) K=8: {:.2e} (both < 1e-9)",
            rep8.max_residual, rep38.max_residual
        ),
    );
}

#[test]
fn acceptance_08_chain_identity() {
    let grid = rational_linspace(&big("0"), &big("3"), 64).unwrap();
    let mut pass = true;
    let mut detail = String::new();
    for k in 0..=2u32 {
        let rep = chain_identity_residual_38(k, &grid, 8, PRODUCT_DEPTH, DEFAULT_ENUM_CAP).unwrap();
        pass &= rep.max_residual < 1e-9;
        detail.push_str(&format!("[k={k}: {:.2e}] ", rep.max_residual));
    }
    report(8, pass, &format!("{}all < 1e-9 at K=8, D=30", detail));
}

#[test]
fn acceptance_09_maximality_stress() {
    use bernoulli_spectra::maximal::{stress_maximality, CaseTag};
    let start = Instant::now();
    let rep = stress_maximality(1000, 1_000_000, 0xB5).unwrap();
    let elapsed = start.elapsed();
    let verified = rep.verified_total();
    let p0 = rep.per_case.keys().any(|t| {
        matches!(t, CaseTag::P0FirstDigit | CaseTag::P0OddDigit | CaseTag::P0EvenDigit)
    });
    let p1 = rep.per_case.keys().any(|t| {
        matches!(t, CaseTag::P1FirstDigit | CaseTag::P1OddDigit | CaseTag::P1EvenDigit)
    });
    let plarge = rep.per_case.contains_key(&CaseTag::PLarge);
    let pass = verified == 1000
        && rep.unresolved.is_empty()
        && p0
        && p1
        && plarge
        && elapsed.as_secs_f64() < 10.0;
    report(
        9,
        pass,
        &format!(
            "1000/1000 verified, 0 unresolved, all proof cases hit ({} tags), {elapsed:.2?}",
            rep.per_case.len()
        ),
    );
}

#[test]
fn acceptance_10_derivative_bound() {
    // stated bound for orthogonal families: |c'| ≤ 2λ/(1-λ), plus a 0.05
    // discretization allowance
    let mut pass = true;
    let mut detail = String::new();
    let families = [
        ("Γ(1/4)", &scans().quarter, 2.0 * 0.25 / 0.75),
        ("3Γ(1/8)", &scans().three, 2.0 * 0.125 / 0.875),
        ("5Γ(1/8)", &scans().five, 2.0 * 0.125 / 0.875),
    ];
    for (name, fam, bound) in families {
        let mut worst = (0u32, 0.0f64);
        for scan in fam.iter() {
            let slope = derivative_scan(scan).unwrap();
            if slope > worst.1 {
                worst = (scan.digit_depth(), slope);
            }
            pass &= slope <= bound + 0.05;
        }
        detail.push_str(&format!(
            "[{name}: worst slope {:.4} at K={} vs {bound:.4}+0.05] ",
            worst.1, worst.0
        ));
    }
    report(10, pass, detail.trim());
}

#[test]
fn acceptance_11_five_gamma_dip_persists() {
    // Stated criterion: a grid minimum below 0.95 that fails to rise
    // between K=12 and K=16 (deficiency evidence for 5Γ(1/8)).
    const DIP_CEILING: f64 = 0.95;
    const RISE_TOLERANCE: f64 = 1e-3;
    let five = &scans().five;
    let min8 = five.iter().find(|s| s.digit_depth() == 8).unwrap().min_value();
    let min12 = five.iter().find(|s| s.digit_depth() == 12).unwrap().min_value();
    let min16 = five.iter().find(|s| s.digit_depth() == 16).unwrap().min_value();
    let pass = min16 < DIP_CEILING && (min16 - min12) < RISE_TOLERANCE;
    report(
        11,
        pass,
        &format!(
            "grid minimum by K: 8 → {min8:.6}, 12 → {min12:.6}, 16 → {min16:.6}; \
             rise 12→16 is {:.2e} (criterion wants < {DIP_CEILING} and a stall < {RISE_TOLERANCE:.0e}); \
             the dip keeps filling in, so deficiency evidence does not materialize",
            min16 - min12
        ),
    );
}

#[test]
fn acceptance_12_monte_carlo_cross_check() {
    let mut pass = true;
    let mut detail = String::new();
    for (lam, seed) in [
        (BernoulliParam::new(1, 4).unwrap(), 0x41u64),
        (BernoulliParam::new(3, 8).unwrap(), 0x42u64),
    ] {
        let batch = sample_measure(&lam, 100_000, 64, seed).unwrap();
        let n = batch.samples.len() as f64;
        let mut worst_margin = f64::INFINITY;
        for j in 1..=20 {
            let t = j as f64 / 4.0;
            let ecf = empirical_char_fn(&batch.samples, t);
            let exact = eval_muhat(&lam, t, 64);
            let tol = 3.0 / n.sqrt()
                + exact.abs_error_bound
                + std::f64::consts::TAU * t * batch.tail_radius;
            let margin = tol - (ecf - exact.value).abs();
            worst_margin = worst_margin.min(margin);
            pass &= margin > 0.0;
        }
        detail.push_str(&format!("[λ={lam}: worst margin {worst_margin:.2e}] "));
    }
    report(
        12,
        pass,
        &format!("{}20 frequencies each, 10^5 samples", detail),
    );
}

#[test]
fn acceptance_13_hadamard_checks() {
    let l = vec![big("0"), big("2")];
    let b1: Vec<BigInt> = vec![0.into(), 2.into()];
    let b2: Vec<BigInt> = vec![(-1).into(), 1.into()];
    let b_bad: Vec<BigInt> = vec![0.into(), 1.into()];
    let pass = is_hadamard_triple(&b1, &l, 8).unwrap()
        && is_hadamard_triple(&b2, &l, 8).unwrap()
        && !is_hadamard_triple(&b_bad, &l, 8).unwrap();
    report(
        13,
        pass,
        "({0,2}, {0,2}, 8) and ({-1,1}, {0,2}, 8) unitary; ({0,1}, {0,2}, 8) not",
    );
}
