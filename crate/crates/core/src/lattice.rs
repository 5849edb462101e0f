//! Candidate spectra `pΓ(1/2n)` from digit expansions.
//!
//! `Γ(1/2n)` is the set of finite sums `Σ a_k (2n)^k` with digits
//! `a_k ∈ {0, n/2}`; dilating by an odd `p` gives the families whose
//! exponentials are orthogonal (and sometimes complete) in `L²(μ_{1/2n})`.
//! Elements are kept as exact rationals — for odd `n` the digit `n/2` is a
//! half-integer — and enumeration order is ascending numeric value, which
//! coincides with binary counter order on the digit flags.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::rational::{format_float, format_rational};
use crate::{Error, Result};

/// Default cap on the digit depth (2^24 elements).
pub const DEFAULT_ENUM_CAP: u32 = 24;

/// Description of a candidate spectrum `pΓ(1/2n)` truncated at `digit_depth`
/// digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpectrumSpec {
    n: u64,
    p: u64,
    digit_depth: u32,
}

impl SpectrumSpec {
    /// `n ≥ 2`, odd dilation `p ≥ 1`. Depth 0 denotes the singleton `{0}`
    /// (the base case of the functional-equation recursion).
    pub fn new(n: u64, p: u64, digit_depth: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Contract(format!(
                "spectrum requires n >= 2, got n = {n}"
            )));
        }
        if p == 0 || p.is_multiple_of(2) {
            return Err(Error::Contract(format!(
                "dilation must be a positive odd integer, got p = {p}"
            )));
        }
        Ok(Self { n, p, digit_depth })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dilation(&self) -> u64 {
        self.p
    }

    pub fn digit_depth(&self) -> u32 {
        self.digit_depth
    }

    /// Same lattice at a different truncation depth.
    pub fn with_depth(&self, digit_depth: u32) -> Self {
        Self { digit_depth, ..*self }
    }

    /// The base of the digit expansion, `2n`.
    pub fn base(&self) -> u64 {
        2 * self.n
    }

    /// The nonzero digit, `n/2`, as an exact rational.
    pub fn half_digit(&self) -> BigRational {
        BigRational::new(self.n.into(), 2.into())
    }
}

impl std::fmt::Display for SpectrumSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}G(1/{})@{}", self.p, 2 * self.n, self.digit_depth)
    }
}

/// One element of `pΓ(1/2n)`: its exact value together with the digit flags
/// (bit `k` set means digit `n/2` at position `k`, little-endian base `2n`).
#[derive(Debug, Clone, PartialEq)]
pub struct GammaElement {
    pub value: BigRational,
    /// `value` rounded to f64 (exact while values stay below 2^53).
    pub value_f64: f64,
    pub bits: u32,
    pub digit_len: u32,
}

impl GammaElement {
    /// Digit values, little-endian, padded to the spec depth:
    /// e.g. `2;2` for 18 in `Γ(1/8)` at depth 2.
    pub fn digit_string(&self, spec: &SpectrumSpec) -> String {
        let half = spec.half_digit();
        (0..self.digit_len.max(1))
            .map(|k| {
                if self.bits >> k & 1 == 1 {
                    format_rational(&half)
                } else {
                    "0".to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// All `2^K` elements of `pΓ(1/2n)` with digit strings of length `≤ K`,
/// ascending. The depth-`K` set is exactly the first `2^K` elements of any
/// deeper enumeration.
pub fn enumerate_gamma(spec: &SpectrumSpec, cap: u32) -> Result<Vec<GammaElement>> {
    let k = spec.digit_depth;
    if k > cap || k > 30 {
        return Err(Error::ResourceCap(format!(
            "digit depth {k} exceeds enumeration cap {}",
            cap.min(30)
        )));
    }
    let base = BigInt::from(spec.base());
    let mut powers = Vec::with_capacity(k as usize);
    let mut pw = BigInt::one();
    for _ in 0..k {
        powers.push(pw.clone());
        pw *= &base;
    }
    let scale = BigInt::from(spec.p) * BigInt::from(spec.n); // p·n·M / 2
    let count: u64 = 1u64 << k;
    let mut out = Vec::with_capacity(count as usize);
    for bits in 0..count {
        let mut m = BigInt::zero();
        let mut rest = bits;
        while rest != 0 {
            let pos = rest.trailing_zeros();
            m += &powers[pos as usize];
            rest &= rest - 1;
        }
        let value = BigRational::new(&scale * m, BigInt::from(2));
        let value_f64 = value.to_f64().unwrap_or(f64::INFINITY);
        out.push(GammaElement {
            value,
            value_f64,
            bits: bits as u32,
            digit_len: k,
        });
    }
    Ok(out)
}

/// Value of a digit-flag string: `p · Σ flags[k]·(n/2)·(2n)^k`.
pub fn digits_to_value(spec: &SpectrumSpec, flags: &[bool]) -> BigRational {
    let base = BigInt::from(spec.base());
    let mut m = BigInt::zero();
    let mut pw = BigInt::one();
    for &f in flags {
        if f {
            m += &pw;
        }
        pw *= &base;
    }
    BigRational::new(BigInt::from(spec.p) * BigInt::from(spec.n) * m, BigInt::from(2))
}

/// Digit flags of a value, or `None` when the value is not in `pΓ(1/2n)`
/// (any depth). Little-endian, no trailing `false` flags.
pub fn value_to_digits(spec: &SpectrumSpec, value: &BigRational) -> Option<Vec<bool>> {
    if value.is_negative() {
        return None;
    }
    // value = p·(n/2)·M with M a base-2n integer over digits {0,1}
    let scaled = value * BigRational::new(2.into(), (spec.p * spec.n).into());
    if !scaled.is_integer() {
        return None;
    }
    let mut m = scaled.to_integer();
    let base = BigInt::from(spec.base());
    let mut flags = Vec::new();
    while !m.is_zero() {
        let digit = &m % &base;
        if digit.is_zero() {
            flags.push(false);
        } else if digit.is_one() {
            flags.push(true);
        } else {
            return None;
        }
        m /= &base;
    }
    Some(flags)
}

/// Unitarity of the normalized matrix `e^(2πi·b·l/N)/√|B|`: true iff every
/// pair of distinct columns has vanishing inner product (within 1e-12 of the
/// exactly reduced trigonometric sum). Row norms are automatic.
pub fn is_hadamard_triple(b: &[BigInt], l: &[BigRational], modulus: u64) -> Result<bool> {
    if b.len() != l.len() || b.is_empty() {
        return Err(Error::Contract(
            "Hadamard triple needs |B| = |L| >= 1".into(),
        ));
    }
    if modulus < 2 {
        return Err(Error::Contract("Hadamard modulus must be >= 2".into()));
    }
    let tol = 1e-12;
    let n = BigRational::from_integer(modulus.into());
    for i in 0..l.len() {
        for j in (i + 1)..l.len() {
            let diff = &l[i] - &l[j];
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for bv in b {
                let arg = BigRational::from_integer(bv.clone()) * &diff / &n;
                re += crate::measure::cos2pi_rational(&arg);
                im += crate::measure::sin2pi_rational(&arg);
            }
            if re.hypot(im) > tol * b.len() as f64 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// CSV export `index,value_num,value_den,digits`.
pub fn gamma_csv(spec: &SpectrumSpec, elements: &[GammaElement]) -> String {
    let mut out = String::from("index,value_num,value_den,digits\n");
    for (i, el) in elements.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i,
            el.value.numer(),
            el.value.denom(),
            el.digit_string(spec)
        ));
    }
    out
}

/// JSON export of the enumerated family.
pub fn gamma_json(spec: &SpectrumSpec, elements: &[GammaElement]) -> serde_json::Value {
    serde_json::json!({
        "n": spec.n(),
        "p": spec.dilation(),
        "digit_depth": spec.digit_depth(),
        "elements": elements.iter().enumerate().map(|(i, el)| serde_json::json!({
            "index": i,
            "value": format_rational(&el.value),
            "value_f64_17sig": format_float(el.value_f64),
            "digits": el.digit_string(spec),
        })).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    fn big(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn values(spec: &SpectrumSpec) -> Vec<BigRational> {
        enumerate_gamma(spec, DEFAULT_ENUM_CAP)
            .unwrap()
            .into_iter()
            .map(|e| e.value)
            .collect()
    }

    #[test]
    fn gamma_eighth_depth_two() {
        let spec = SpectrumSpec::new(4, 1, 2).unwrap();
        assert_eq!(values(&spec), vec![big("0"), big("2"), big("16"), big("18")]);
    }

    #[test]
    fn gamma_quarter_depth_two() {
        let spec = SpectrumSpec::new(2, 1, 2).unwrap();
        assert_eq!(values(&spec), vec![big("0"), big("1"), big("4"), big("5")]);
    }

    #[test]
    fn gamma_dilated() {
        let spec = SpectrumSpec::new(4, 3, 2).unwrap();
        assert_eq!(values(&spec), vec![big("0"), big("6"), big("48"), big("54")]);
    }

    #[test]
    fn half_integer_digits_for_odd_n() {
        let spec = SpectrumSpec::new(3, 1, 2).unwrap();
        // digits {0, 3/2}, base 6
        assert_eq!(values(&spec), vec![big("0"), big("3/2"), big("9"), big("21/2")]);
        let els = enumerate_gamma(&spec, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(els[3].digit_string(&spec), "3/2;3/2");
    }

    #[test]
    fn ascending_and_prefix_closed() {
        let spec6 = SpectrumSpec::new(4, 3, 6).unwrap();
        let deep = values(&spec6);
        for w in deep.windows(2) {
            assert!(w[0] < w[1]);
        }
        let shallow = values(&SpectrumSpec::new(4, 3, 4).unwrap());
        assert_eq!(&deep[..16], &shallow[..]);
    }

    #[test]
    fn rejects_small_n_and_even_p() {
        assert!(SpectrumSpec::new(1, 1, 4).is_err());
        assert!(SpectrumSpec::new(4, 2, 4).is_err());
        assert!(SpectrumSpec::new(4, 0, 4).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let spec = SpectrumSpec::new(4, 1, 12).unwrap();
        assert!(matches!(
            enumerate_gamma(&spec, 10),
            Err(Error::ResourceCap(_))
        ));
    }

    #[test]
    fn digit_round_trips() {
        let spec = SpectrumSpec::new(4, 1, 3).unwrap();
        // digits (2,2) little-endian = 2 + 2·8 = 18
        assert_eq!(digits_to_value(&spec, &[true, true]), big("18"));
        assert_eq!(value_to_digits(&spec, &big("18")), Some(vec![true, true]));
        // 6 = 2 + 4·1 has no {0,2} base-8 expansion
        assert_eq!(value_to_digits(&spec, &big("6")), None);
        // scaled case
        let spec3 = SpectrumSpec::new(4, 3, 3).unwrap();
        assert_eq!(value_to_digits(&spec3, &big("54")), Some(vec![true, true]));
    }

    #[test]
    fn hadamard_examples() {
        let l: Vec<BigRational> = vec![big("0"), big("2")];
        let b1: Vec<BigInt> = vec![0.into(), 2.into()];
        assert!(is_hadamard_triple(&b1, &l, 8).unwrap());
        let b2: Vec<BigInt> = vec![(-1).into(), 1.into()];
        assert!(is_hadamard_triple(&b2, &l, 8).unwrap());
        let b3: Vec<BigInt> = vec![0.into(), 1.into()];
        assert!(!is_hadamard_triple(&b3, &l, 8).unwrap());
        assert!(is_hadamard_triple(&b1, &[big("0")], 8).is_err());
    }

    #[test]
    fn csv_schema() {
        let spec = SpectrumSpec::new(4, 1, 2).unwrap();
        let els = enumerate_gamma(&spec, DEFAULT_ENUM_CAP).unwrap();
        let csv = gamma_csv(&spec, &els);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("index,value_num,value_den,digits"));
        assert_eq!(lines.next(), Some("0,0,1,0;0"));
        assert_eq!(lines.next(), Some("1,2,1,2;0")); // digit string shows values
    }
}
