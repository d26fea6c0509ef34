//! Exact rational scalars and vectors.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type Rat = BigRational;

/// A point of the real cocharacter or character space with rational entries.
pub type RatVec = Vec<Rat>;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn from_ints(v: &[i64]) -> RatVec {
    v.iter().map(|&x| int(x)).collect()
}

pub fn zeros(n: usize) -> RatVec {
    vec![Rat::zero(); n]
}

pub fn unit(n: usize, i: usize) -> RatVec {
    let mut v = zeros(n);
    v[i] = Rat::one();
    v
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn norm_sq(a: &[Rat]) -> Rat {
    dot(a, a)
}

pub fn is_zero(a: &[Rat]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn add(a: &[Rat], b: &[Rat]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rat], s: &Rat) -> RatVec {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[Rat]) -> RatVec {
    a.iter().map(|x| -x).collect()
}

/// `a + s * b`
pub fn axpy(a: &[Rat], s: &Rat, b: &[Rat]) -> RatVec {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// Scales a nonzero rational vector to the unique positive multiple whose
/// entries are coprime integers. Zero vectors are returned unchanged.
pub fn primitive(v: &[Rat]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn primitive_rat(v: &[Rat]) -> RatVec {
    primitive(v).into_iter().map(Rat::from_integer).collect()
}

/// Scales so the first nonzero entry is positive, then makes primitive.
pub fn primitive_oriented(v: &[Rat]) -> RatVec {
    let p = primitive_rat(v);
    match p.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => neg(&p),
        _ => p,
    }
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational {0:?}: expected `p` or `p/q` with q nonzero")]
pub struct ParseRatError(pub String);

/// Parses `p` or `p/q` (whitespace tolerated around the parts).
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let err = || ParseRatError(s.to_string());
    let mut parts = s.splitn(2, '/');
    let p: BigInt = parts
        .next()
        .ok_or_else(err)?
        .trim()
        .parse()
        .map_err(|_| err())?;
    let q: BigInt = match parts.next() {
        Some(q) => q.trim().parse().map_err(|_| err())?,
        None => BigInt::one(),
    };
    if q.is_zero() {
        return Err(err());
    }
    Ok(Rat::new(p, q))
}

/// Rounds to the nearest f64 by way of the big-integer parts.
pub fn to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

/// An exact real number of the form `num / sqrt(den)` with `den > 0`, used to
/// compare values of `μ(λ)/‖λ‖` without leaving the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedSqrtRatio {
    pub num: Rat,
    pub den: Rat,
}

impl SignedSqrtRatio {
    pub fn new(num: Rat, den: Rat) -> Self {
        assert!(
            den.is_positive(),
            "denominator under the root must be positive"
        );
        SignedSqrtRatio { num, den }
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.num) / to_f64(&self.den).sqrt()
    }

    pub fn signum(&self) -> Ordering {
        self.num.cmp(&Rat::zero())
    }
}

impl Ord for SignedSqrtRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        // same sign: compare num^2/den, reversed for negatives
        let lhs = &self.num * &self.num * &other.den;
        let rhs = &other.num * &other.num * &self.den;
        match sa {
            Ordering::Greater => lhs.cmp(&rhs),
            Ordering::Less => rhs.cmp(&lhs),
            Ordering::Equal => Ordering::Equal,
        }
    }
}

impl PartialOrd for SignedSqrtRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SignedSqrtRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/sqrt({})", fmt_rat(&self.num), fmt_rat(&self.den))
    }
}
