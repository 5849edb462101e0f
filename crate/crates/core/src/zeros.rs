//! Exact membership in the zero set of `μ̂_λ`.
//!
//! A factor of the infinite product vanishes exactly when `4tλ^k` is an odd
//! integer for some `k ≥ 1`, i.e. the zero set is `{(2m+1)/(4λ^k)}`. For
//! rational `t = a/b` and `λ = A/B` the feasible `k` are pinned down by prime
//! valuations:
//!
//! * `B` even: `2 + v₂(a) - v₂(b) = k·v₂(B)` must hold exactly (the quotient
//!   is odd), so at most one `k` is possible;
//! * `A` even: symmetric, `k = -(2 + v₂(a) - v₂(b))/v₂(A)`;
//! * both odd: `v₂(t) = -2` is forced and `k` is bounded by
//!   `min_ρ v_ρ(a)/v_ρ(B)` over the odd primes `ρ | B`.
//!
//! Each candidate is then verified in exact rational arithmetic, so a
//! [`ZeroWitness`] is a genuine certificate. Exponentials `e_γ1`, `e_γ2` are
//! orthogonal in `L²(μ_λ)` precisely when `γ1 - γ2` is in the zero set.

use num::{BigInt, BigRational, Integer, One, Zero};

use crate::measure::BernoulliParam;
use crate::rational::{format_rational, odd_part, odd_prime_factors, rational_pow, v2, vp};
use crate::{Error, Result};

/// Default cap on the size of a set handed to [`pairwise_orthogonal`].
pub const DEFAULT_PAIRWISE_CAP: usize = 4096;

/// Exact certificate for zero-set membership.
///
/// For members, `t = (2m+1)/(4λ^k)` holds exactly. For non-members, every
/// `k ≤ search_bound` was ruled out, and `search_bound` is at least the
/// valuation-derived feasibility bound, so no larger `k` can work either.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroWitness {
    pub member: bool,
    pub k: Option<u32>,
    pub m: Option<BigInt>,
    pub search_bound: u32,
}

impl ZeroWitness {
    fn non_member(search_bound: u32) -> Self {
        ZeroWitness {
            member: false,
            k: None,
            m: None,
            search_bound,
        }
    }

    /// JSON certificate `{member, k, m, search_bound}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "member": self.member,
            "k": self.k,
            "m": self.m.as_ref().map(|m| m.to_string()),
            "search_bound": self.search_bound,
        })
    }
}

/// Reduced form `t = 2^d · u / 3^p` with `u` odd (and coprime to 3 when
/// `p > 0`); the shape in which zero-set membership for `λ = 3/8` is decided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedForm38 {
    pub two_exponent: i64,
    pub odd_factor: BigInt,
    pub three_exponent: u32,
}

/// Decomposes a nonzero rational as `2^d·u/3^p`.
///
/// Returns `None` when the denominator carries a prime other than 2 or 3
/// (such a `t` can never reach the zero set of `μ̂_{3/8}`). Rejects `t = 0`.
pub fn reduced_form_38(t: &BigRational) -> Result<Option<ReducedForm38>> {
    if t.is_zero() {
        return Err(Error::Contract("reduced form is undefined at t = 0".into()));
    }
    let a = t.numer();
    let b = t.denom();
    let d = v2(a) as i64 - v2(b) as i64;
    let a_odd = odd_part(a);
    let b_odd = odd_part(b);
    let p = vp(&b_odd, 3);
    if b_odd != BigInt::from(3u32).pow(p as u32) {
        return Ok(None);
    }
    Ok(Some(ReducedForm38 {
        two_exponent: d,
        odd_factor: a_odd,
        three_exponent: p as u32,
    }))
}

/// Valuation-feasible values of `k`, plus the bound that makes a negative
/// answer a certificate. Empty list means no `k ≥ 1` can work.
fn feasible_ks(lam: &BernoulliParam, t: &BigRational) -> (Vec<u32>, u32) {
    let a = t.numer();
    let b = t.denom();
    let v2a = v2(a) as i64;
    let v2b = v2(b) as i64;
    let big_a = lam.numerator();
    let big_b = lam.denominator();

    if big_b.is_multiple_of(2) {
        let v2_b = big_b.trailing_zeros() as i64;
        let lhs = 2 + v2a - v2b;
        if lhs >= v2_b && lhs % v2_b == 0 {
            let k = (lhs / v2_b) as u32;
            return (vec![k], k);
        }
        let bound = (lhs / v2_b).max(0) as u32;
        return (vec![], bound.max(1));
    }
    if big_a.is_multiple_of(2) {
        let v2_a = big_a.trailing_zeros() as i64;
        let lhs = -(2 + v2a - v2b);
        if lhs >= v2_a && lhs % v2_a == 0 {
            let k = (lhs / v2_a) as u32;
            return (vec![k], k);
        }
        let bound = (lhs / v2_a).max(0) as u32;
        return (vec![], bound.max(1));
    }
    // Both parts odd: v₂(t) = -2 is necessary, and odd primes of B bound k.
    if v2a - v2b != -2 {
        return (vec![], 1);
    }
    let mut bound = u64::MAX;
    for rho in odd_prime_factors(big_b) {
        let va = vp(a, rho);
        let vb = vp(&BigInt::from(big_b), rho);
        bound = bound.min(va / vb);
    }
    if bound == 0 || bound == u64::MAX {
        return (vec![], 1);
    }
    let bound = bound.min(u32::MAX as u64) as u32;
    ((1..=bound).collect(), bound)
}

/// Exact zero-set membership with certificate, generic valuation-guided
/// search. `t = 0` is a non-member (`μ̂(0) = 1`).
pub fn in_zero_set_generic(lam: &BernoulliParam, t: &BigRational) -> ZeroWitness {
    if t.is_zero() {
        return ZeroWitness::non_member(1);
    }
    let (candidates, bound) = feasible_ks(lam, t);
    let lambda = lam.lambda();
    for k in candidates {
        // 4tλ^k must be an odd integer 2m+1.
        let x = t * BigRational::from_integer(4.into()) * rational_pow(&lambda, k);
        if x.is_integer() && x.numer().is_odd() {
            let m = (x.numer() - BigInt::one()) / BigInt::from(2);
            return ZeroWitness {
                member: true,
                k: Some(k),
                m: Some(m),
                search_bound: bound,
            };
        }
    }
    ZeroWitness::non_member(bound.max(1))
}

/// Fast closed-form membership test for `λ = 3/8`:
/// `t ∈ Z_{3/8}` iff `t = 2^d·u/3^p` with `d ≥ 1`, `d ≡ 1 (mod 3)` and
/// `p ≤ (d+2)/3`. (The witness is `k = (d+2)/3`.)
fn in_zero_set_38(t: &BigRational) -> ZeroWitness {
    if t.is_zero() {
        return ZeroWitness::non_member(1);
    }
    let Some(rf) = reduced_form_38(t).expect("t != 0") else {
        return ZeroWitness::non_member(1);
    };
    let d = rf.two_exponent;
    if d < 1 || d % 3 != 1 {
        return ZeroWitness::non_member(((d.max(1) + 2) / 3) as u32);
    }
    let k = ((d + 2) / 3) as u32;
    if rf.three_exponent > k {
        return ZeroWitness::non_member(k);
    }
    // 2m+1 = u·3^(k-p)
    let odd = rf.odd_factor * BigInt::from(3u32).pow(k - rf.three_exponent);
    let m = (odd - BigInt::one()) / BigInt::from(2);
    ZeroWitness {
        member: true,
        k: Some(k),
        m: Some(m),
        search_bound: k,
    }
}

/// Exact membership of a rational `t` in the zero set of `μ̂_λ`.
///
/// Irrational `t` never lies in the zero set for rational `λ`; callers treat
/// that case as non-membership without calling in.
pub fn in_zero_set(lam: &BernoulliParam, t: &BigRational) -> ZeroWitness {
    if lam.numerator() == 3 && lam.denominator() == 8 {
        in_zero_set_38(t)
    } else {
        in_zero_set_generic(lam, t)
    }
}

/// Orthogonality of `e_γ1` and `e_γ2` in `L²(μ_λ)`: true iff the difference
/// lies in the zero set. Equal frequencies are never orthogonal.
pub fn are_orthogonal(
    lam: &BernoulliParam,
    gamma1: &BigRational,
    gamma2: &BigRational,
) -> (bool, Option<ZeroWitness>) {
    if gamma1 == gamma2 {
        return (false, None);
    }
    let w = in_zero_set(lam, &(gamma1 - gamma2));
    let member = w.member;
    (member, Some(w))
}

/// First pair that fails orthogonality, with the non-membership certificate
/// for its difference.
#[derive(Debug, Clone)]
pub struct OrthogonalityFailure {
    pub gamma1: BigRational,
    pub gamma2: BigRational,
    pub difference: BigRational,
    pub certificate: ZeroWitness,
}

/// Result of an exhaustive pairwise orthogonality check.
#[derive(Debug, Clone)]
pub struct OrthogonalityReport {
    pub all_orthogonal: bool,
    pub pairs_checked: u64,
    pub first_failure: Option<OrthogonalityFailure>,
}

impl OrthogonalityReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "all_orthogonal": self.all_orthogonal,
            "pairs_checked": self.pairs_checked,
            "first_failure": self.first_failure.as_ref().map(|f| serde_json::json!({
                "gamma1": format_rational(&f.gamma1),
                "gamma2": format_rational(&f.gamma2),
                "difference": format_rational(&f.difference),
                "certificate": f.certificate.to_json(),
            })),
        })
    }
}

/// Exhaustive exact orthogonality over all unordered pairs of `set`,
/// short-circuiting at the first failure.
pub fn pairwise_orthogonal(
    lam: &BernoulliParam,
    set: &[BigRational],
    cap: usize,
) -> Result<OrthogonalityReport> {
    if set.len() < 2 {
        return Err(Error::Contract(
            "pairwise orthogonality needs at least two frequencies".into(),
        ));
    }
    if set.len() > cap {
        return Err(Error::ResourceCap(format!(
            "set of {} frequencies exceeds cap {}",
            set.len(),
            cap
        )));
    }
    let mut pairs = 0u64;
    for i in 0..set.len() {
        for j in (i + 1)..set.len() {
            pairs += 1;
            let diff = &set[i] - &set[j];
            let w = in_zero_set(lam, &diff);
            if !w.member {
                return Ok(OrthogonalityReport {
                    all_orthogonal: false,
                    pairs_checked: pairs,
                    first_failure: Some(OrthogonalityFailure {
                        gamma1: set[i].clone(),
                        gamma2: set[j].clone(),
                        difference: diff,
                        certificate: w,
                    }),
                });
            }
        }
    }
    Ok(OrthogonalityReport {
        all_orthogonal: true,
        pairs_checked: pairs,
        first_failure: None,
    })
}
