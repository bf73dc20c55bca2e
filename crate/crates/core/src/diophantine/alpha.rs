//! Rotation numbers: parsing, enclosures at any precision, and continued
//! fraction expansion.

use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::DiophantineError;
use crate::numerics::{Dyadic, PrecisionReal, Round};

/// How the user described `alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphaSpec {
    /// `(sqrt 5 - 1) / 2 = [0; 1, 1, 1, ...]`.
    Golden,
    /// `[0; prefix..., period, period, ...]`. An empty period is rejected
    /// because it would denote a rational.
    Quotients { prefix: Vec<u64>, period: Vec<u64> },
    /// An enclosure `value ± err` given in decimal.
    Decimal { text: String, value: BigRational, err: BigRational },
}

impl AlphaSpec {
    pub fn quotients(prefix: Vec<u64>, period: Vec<u64>) -> Self {
        AlphaSpec::Quotients { prefix, period }
    }

    pub fn is_golden(&self) -> bool {
        matches!(self, AlphaSpec::Golden)
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches(['-', '+']);
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

fn parse_list(s: &str) -> Result<Vec<u64>, DiophantineError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<u64>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => Err(DiophantineError::Parse(format!("bad partial quotient `{t}`"))),
        })
        .collect()
}

impl FromStr for AlphaSpec {
    type Err = DiophantineError;

    /// Accepted forms: `golden`; `cf:2,1,3,1` (the list repeats forever);
    /// `cf:5,2;1` (prefix `5,2` then `1` forever); a decimal with an
    /// optional error bound, `0.6180339887±1e-10` or `0.618+-1e-3`. A
    /// decimal without an error bound is an exact rational.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("golden") {
            return Ok(AlphaSpec::Golden);
        }
        if let Some(body) = s.strip_prefix("cf:") {
            let (prefix, period) = match body.split_once(';') {
                Some((p, q)) => (parse_list(p)?, parse_list(q)?),
                None => (Vec::new(), parse_list(body)?),
            };
            if period.is_empty() {
                return Err(DiophantineError::RationalInput(s.to_string()));
            }
            return Ok(AlphaSpec::Quotients { prefix, period });
        }
        let (v, e) = if let Some((v, e)) = s.split_once('±') {
            (v, Some(e))
        } else if let Some((v, e)) = s.split_once("+-") {
            (v, Some(e))
        } else {
            (s, None)
        };
        let value = parse_decimal(v).ok_or_else(|| DiophantineError::Parse(s.to_string()))?;
        let err = match e {
            Some(e) => parse_decimal(e).ok_or_else(|| DiophantineError::Parse(s.to_string()))?,
            None => BigRational::zero(),
        };
        if err.is_negative() {
            return Err(DiophantineError::Parse(format!("negative error bound in `{s}`")));
        }
        if err.is_zero() {
            return Err(DiophantineError::RationalInput(s.to_string()));
        }
        Ok(AlphaSpec::Decimal { text: s.to_string(), value, err })
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        match self {
            AlphaSpec::Golden => write!(f, "golden"),
            AlphaSpec::Quotients { prefix, period } if prefix.is_empty() => {
                write!(f, "cf:{}", join(period))
            }
            AlphaSpec::Quotients { prefix, period } => {
                write!(f, "cf:{};{}", join(prefix), join(period))
            }
            AlphaSpec::Decimal { text, .. } => write!(f, "{text}"),
        }
    }
}

impl Serialize for AlphaSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AlphaSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// First `k` partial quotients `a_1..a_k` of `alpha = [0; a_1, a_2, ...]`
/// together with the convergents `p_j / q_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub partial_quotients: Vec<BigUint>,
    /// `(p_j, q_j)` for `j = 1..=k`.
    pub convergents: Vec<(BigUint, BigUint)>,
}

impl ContinuedFraction {
    pub fn from_quotients(partial_quotients: Vec<BigUint>) -> Self {
        let convergents = convergents(&partial_quotients);
        ContinuedFraction { partial_quotients, convergents }
    }
}

/// Convergents of `[0; a_1, a_2, ...]` via the standard recurrences.
pub fn convergents(quotients: &[BigUint]) -> Vec<(BigUint, BigUint)> {
    let (mut p_prev, mut p) = (BigUint::one(), BigUint::zero());
    let (mut q_prev, mut q) = (BigUint::zero(), BigUint::one());
    let mut out = Vec::with_capacity(quotients.len());
    for a in quotients {
        let p_next = a * &p + &p_prev;
        let q_next = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push((p.clone(), q.clone()));
    }
    out
}

/// Outcome of expanding an enclosure `[lo, hi]` into a continued fraction.
pub(crate) struct IntervalExpansion {
    pub quotients: Vec<BigUint>,
    /// Quotient expansion stopped because the endpoints disagreed (or an
    /// endpoint became rational at this depth).
    pub exhausted: bool,
}

/// Partial quotients shared by every number in `[lo, hi] ⊂ (0, 1)`.
///
/// Stops after `max_terms` quotients, when `stop` returns true for the
/// current denominator, or when the endpoints disagree.
pub(crate) fn expand_interval(
    lo: &BigRational,
    hi: &BigRational,
    max_terms: usize,
    mut stop: impl FnMut(&BigUint) -> bool,
) -> IntervalExpansion {
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let mut quotients = Vec::new();
    let (mut q_prev, mut q) = (BigUint::zero(), BigUint::one());
    loop {
        if quotients.len() >= max_terms || stop(&q) {
            return IntervalExpansion { quotients, exhausted: false };
        }
        if !a.is_positive() || !b.is_positive() || a >= BigRational::one() || b >= BigRational::one() {
            return IntervalExpansion { quotients, exhausted: true };
        }
        let (ra, rb) = (a.recip(), b.recip());
        let (fa, fb) = (ra.floor(), rb.floor());
        if fa != fb {
            return IntervalExpansion { quotients, exhausted: true };
        }
        let digit = fa.to_integer().to_biguint().expect("positive quotient");
        a = ra - &fa;
        b = rb - &fb;
        // The map x -> 1/x reverses the order of endpoints.
        std::mem::swap(&mut a, &mut b);
        let q_next = &digit * &q + &q_prev;
        q_prev = std::mem::replace(&mut q, q_next);
        quotients.push(digit);
    }
}

/// A certified irrational rotation number.
///
/// Enclosures narrow on demand for continued-fraction inputs; a decimal
/// input has a fixed enclosure and precision requests beyond it come back
/// no narrower.
#[derive(Debug)]
pub struct Alpha {
    spec: AlphaSpec,
    cache: RwLock<Option<(u32, PrecisionReal)>>,
}

impl Clone for Alpha {
    fn clone(&self) -> Self {
        Alpha { spec: self.spec.clone(), cache: RwLock::new(self.cache.read().unwrap().clone()) }
    }
}

impl PartialEq for Alpha {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Alpha {
    pub fn new(spec: AlphaSpec) -> Result<Self, DiophantineError> {
        if let AlphaSpec::Decimal { value, err, text } = &spec {
            let (lo, hi) = (value - err, value + err);
            if lo.floor() != hi.floor() || lo.floor() == lo {
                return Err(DiophantineError::NotCertifiable {
                    spec: text.clone(),
                    index: 0,
                    reason: "enclosure contains an integer".into(),
                });
            }
        }
        Ok(Alpha { spec, cache: RwLock::new(None) })
    }

    pub fn golden() -> Self {
        Alpha::new(AlphaSpec::Golden).expect("golden ratio is irrational")
    }

    pub fn parse(s: &str) -> Result<Self, DiophantineError> {
        Alpha::new(s.parse()?)
    }

    pub fn spec(&self) -> &AlphaSpec {
        &self.spec
    }

    /// The `j`-th partial quotient (1-based) of a continued-fraction spec.
    fn periodic_quotient(prefix: &[u64], period: &[u64], j: usize) -> u64 {
        if j <= prefix.len() {
            prefix[j - 1]
        } else {
            period[(j - 1 - prefix.len()) % period.len()]
        }
    }

    fn decimal_bounds(value: &BigRational, err: &BigRational) -> (BigRational, BigRational) {
        let lo = value - err;
        let shift = BigRational::from_integer(lo.floor().to_integer());
        (lo - &shift, value + err - shift)
    }

    /// Enclosure of `alpha mod 1` with width at most `2^-prec` where the
    /// input allows it.
    pub fn enclosure(&self, prec: u32) -> PrecisionReal {
        if let Some((p, e)) = self.cache.read().unwrap().as_ref() {
            if *p >= prec {
                return e.round(prec);
            }
        }
        let e = match &self.spec {
            AlphaSpec::Golden => Self::periodic_enclosure(&[], &[1], prec),
            AlphaSpec::Quotients { prefix, period } => Self::periodic_enclosure(prefix, period, prec),
            AlphaSpec::Decimal { value, err, .. } => {
                let (lo, hi) = Self::decimal_bounds(value, err);
                PrecisionReal::new(
                    Dyadic::from_ratio(lo.numer(), lo.denom(), prec.max(64), Round::Down),
                    Dyadic::from_ratio(hi.numer(), hi.denom(), prec.max(64), Round::Up),
                )
            }
        };
        *self.cache.write().unwrap() = Some((prec, e.clone()));
        e
    }

    fn periodic_enclosure(prefix: &[u64], period: &[u64], prec: u32) -> PrecisionReal {
        // alpha lies between consecutive convergents; stop once they are
        // 2^-(prec+2) apart.
        let target = BigUint::one() << (prec as usize + 2);
        let (mut p_prev, mut p) = (BigUint::one(), BigUint::zero());
        let (mut q_prev, mut q) = (BigUint::zero(), BigUint::one());
        let mut j = 1;
        loop {
            let a = BigUint::from(Self::periodic_quotient(prefix, period, j));
            let p_next = &a * &p + &p_prev;
            let q_next = &a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
            j += 1;
            if j > 2 && &q * &q_prev > target {
                break;
            }
        }
        let w = prec + 8;
        let x = PrecisionReal::from_ratio(&p.clone().into(), &q.clone().into(), w);
        let y = PrecisionReal::from_ratio(&p_prev.into(), &q_prev.into(), w);
        x.hull(&y).round(prec + 4)
    }

    /// First `k` partial quotients, certified for the input enclosure.
    pub fn expand(&self, k: usize) -> Result<ContinuedFraction, DiophantineError> {
        let quotients = match &self.spec {
            AlphaSpec::Golden => vec![BigUint::one(); k],
            AlphaSpec::Quotients { prefix, period } => (1..=k)
                .map(|j| BigUint::from(Self::periodic_quotient(prefix, period, j)))
                .collect(),
            AlphaSpec::Decimal { value, err, text } => {
                let (lo, hi) = Self::decimal_bounds(value, err);
                let ex = expand_interval(&lo, &hi, k, |_| false);
                if ex.quotients.len() < k {
                    return Err(DiophantineError::NotCertifiable {
                        spec: text.clone(),
                        index: ex.quotients.len() + 1,
                        reason: "decimal enclosure too wide to pin down the quotient".into(),
                    });
                }
                ex.quotients
            }
        };
        Ok(ContinuedFraction::from_quotients(quotients))
    }
}

/// [`Alpha::expand`] on a freshly parsed spec.
pub fn expand_alpha(spec: &AlphaSpec, k: usize) -> Result<ContinuedFraction, DiophantineError> {
    Alpha::new(spec.clone())?.expand(k)
}

/// `log2` of a positive integer, rounded up, as a precision helper.
pub(crate) fn bits_of(q: &BigUint) -> u32 {
    q.bits().to_u32().unwrap_or(u32::MAX)
}

/// `true` if `q` divides `r` exactly.
#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use crate::numerics::{decide, Decision, PrecisionLadder};

    fn ones(k: usize) -> Vec<BigUint> {
        vec![BigUint::one(); k]
    }

    #[test]
    fn golden_quotients_are_all_one() {
        let cf = Alpha::golden().expand(5).unwrap();
        assert_eq!(cf.partial_quotients, ones(5));
        let q: Vec<u32> = cf.convergents.iter().map(|(_, q)| q.to_u32().unwrap()).collect();
        assert_eq!(q, vec![1, 2, 3, 5, 8]);
    }

    #[test]
    fn quotient_list_echoes() {
        let spec: AlphaSpec = "cf:2,3,4".parse().unwrap();
        let cf = expand_alpha(&spec, 3).unwrap();
        let got: Vec<u64> = cf.partial_quotients.iter().map(|a| a.to_u64().unwrap()).collect();
        assert_eq!(got, vec![2, 3, 4]);
        let spec: AlphaSpec = "cf:5;1,2".parse().unwrap();
        let cf = expand_alpha(&spec, 6).unwrap();
        let got: Vec<u64> = cf.partial_quotients.iter().map(|a| a.to_u64().unwrap()).collect();
        assert_eq!(got, vec![5, 1, 2, 1, 2, 1]);
    }

    // Oracle: continued fractions of the two endpoint rationals, computed by
    // plain Euclid on integers.
    fn euclid_cf(mut n: BigInt, mut d: BigInt, k: usize) -> Vec<BigInt> {
        let mut out = Vec::new();
        // skip integer part
        let (_, r) = n.div_rem(&d);
        n = r;
        while out.len() < k && !n.is_zero() {
            let (a, r) = d.div_rem(&n);
            out.push(a);
            d = n;
            n = r;
        }
        out
    }

    #[test]
    fn decimal_with_error_certifies_ten_quotients() {
        let spec: AlphaSpec = "0.61803398874989±1e-14".parse().unwrap();
        let cf = expand_alpha(&spec, 10).unwrap();
        assert_eq!(cf.partial_quotients, ones(10));
        let scale = BigInt::from(10).pow(14);
        let lo = euclid_cf(BigInt::from(61803398874988u64), scale.clone(), 10);
        let hi = euclid_cf(BigInt::from(61803398874990u64), scale, 10);
        assert_eq!(lo, hi);
        assert!(lo.iter().all(|a| a.is_one()));
    }

    #[test]
    fn wide_decimal_is_not_certifiable() {
        let spec: AlphaSpec = "0.618±1e-3".parse().unwrap();
        assert!(matches!(expand_alpha(&spec, 10), Err(DiophantineError::NotCertifiable { .. })));
    }

    #[test]
    fn rationals_are_rejected() {
        assert!(matches!("0.5".parse::<AlphaSpec>(), Err(DiophantineError::RationalInput(_))));
        assert!(matches!("cf:2,3;".parse::<AlphaSpec>(), Err(DiophantineError::RationalInput(_))));
        assert!(matches!(Alpha::parse("0.5±0.5"), Err(DiophantineError::NotCertifiable { .. })));
    }

    #[test]
    fn spec_text_round_trips() {
        for s in ["golden", "cf:2,1,3,1", "cf:5;1,2", "0.6180339887±1e-10"] {
            let spec: AlphaSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
    }

    #[test]
    fn golden_enclosure_is_tight_and_correct() {
        let a = Alpha::golden().enclosure(300);
        assert!(a.width() <= Dyadic::pow2(-300));
        // alpha^2 + alpha - 1 = 0 is checked on the enclosure.
        let poly = a.mul(&a, 400).add(&a, 400).sub(&PrecisionReal::one(), 400);
        assert!(poly.contains(&Dyadic::zero()));
        // dist(alpha, Z) = 1 - alpha = alpha^2.
        let d = crate::numerics::dist_to_grid(&a, &BigUint::one(), 300);
        let sq = a.mul(&a, 300);
        assert!(d.overlaps(&sq));
        assert!((d.mid_f64() - 0.3819660112501051).abs() < 1e-15);
    }

    #[test]
    fn decide_alpha_against_truncated_decimal() {
        // 128-bit oracle from the convergent recurrences: alpha = 0.61803398874989...
        let alpha = Alpha::golden();
        let c = BigRational::new(6180339887i64.into(), 10_000_000_000i64.into());
        let oracle = alpha.enclosure(128);
        assert!(oracle.lo().to_rational() > c);
        let d = decide(
            |p| (alpha.enclosure(p), PrecisionReal::from_rational(&c, p)),
            &PrecisionLadder::default().capped(64),
        );
        assert_eq!(d, Decision::Greater);
    }

    #[test]
    fn convergents_bracket_alpha_with_classical_bound() {
        let alpha = Alpha::parse("cf:2,1,3,1").unwrap();
        let cf = alpha.expand(12).unwrap();
        let e = alpha.enclosure(256);
        for k in 0..11 {
            let (p, q) = &cf.convergents[k];
            let (_, q1) = &cf.convergents[k + 1];
            let approx = PrecisionReal::from_ratio(&p.clone().into(), &q.clone().into(), 256);
            let err = e.sub(&approx, 256).abs();
            let bound = PrecisionReal::from_ratio(&BigInt::one(), &BigInt::from(q * q1), 256);
            assert!(err.hi() < bound.lo(), "k={k}");
            // alternation: even-indexed convergents (k = 0, 2, ..) lie below alpha... for [0; a1, ..]
            // the first convergent 1/a1 is above alpha.
            let above = approx.lo() > e.hi();
            assert_eq!(above, k % 2 == 0, "k={k}");
        }
    }
}
