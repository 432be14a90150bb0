//! Exact rational plane arithmetic: rationals, complex points, discs, and
//! certified directed bounds for the irrational quantities (square roots,
//! natural logarithms) that the certificates need.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("square root of negative value {0}")]
    NegativeSqrt(Q),
    #[error("logarithm of non-positive value {0}")]
    NonPositiveLog(Q),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(Q),
    #[error("invalid rational literal `{0}`")]
    BadRational(String),
    #[error("disc radius must be positive, got {0}")]
    BadRadius(Q),
    #[error("bound pair violates lower <= upper: [{0}, {1}]")]
    BadBounds(Q, Q),
}

/// Arbitrary-precision rational, always in canonical reduced form with a
/// positive denominator. Serializes as the string `"p/q"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Q(BigRational);

impl Q {
    pub fn new(num: i64, den: i64) -> Q {
        assert!(den != 0, "zero denominator");
        Q(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn int(n: i64) -> Q {
        Q(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Q {
        Q(BigRational::zero())
    }

    pub fn one() -> Q {
        Q(BigRational::one())
    }

    pub fn from_big(r: BigRational) -> Q {
        Q(r)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Q {
        Q(self.0.abs())
    }

    pub fn recip(&self) -> Q {
        assert!(!self.is_zero(), "reciprocal of zero");
        Q(self.0.recip())
    }

    pub fn min(self, other: Q) -> Q {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Q) -> Q {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Integer power with negative exponents allowed (base must be nonzero).
    pub fn pow(&self, exp: i32) -> Q {
        Q((&self.0).pow(exp))
    }

    /// Power of ten, handy for tolerances like `Q::pow10(-9)`.
    pub fn pow10(exp: i32) -> Q {
        Q::int(10).pow(exp)
    }

    /// Decimal rendering with `digits` places, rounded toward zero.
    /// Used only for SVG/report output, never for arithmetic.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = (self.numer().magnitude() * scale.magnitude()) / self.denom().magnitude();
        let neg = self.numer().sign() == Sign::Minus && !scaled.is_zero();
        let abs = scaled.to_string();
        let (int_part, frac_part) = if abs.len() > digits as usize {
            let split = abs.len() - digits as usize;
            (abs[..split].to_string(), abs[split..].to_string())
        } else {
            ("0".to_string(), format!("{:0>width$}", abs, width = digits as usize))
        };
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Lossy; used for SVG layout and progress output only.
        let digits = 15u32;
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = (self.numer() * &scale).div_floor(self.denom());
        let s = scaled.to_string();
        s.parse::<f64>().map(|v| v / 1e15).unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Q {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Q, GeometryError> {
        let bad = || GeometryError::BadRational(s.to_string());
        match s.split_once('/') {
            Some((p, q)) => {
                let num = BigInt::from_str(p.trim()).map_err(|_| bad())?;
                let den = BigInt::from_str(q.trim()).map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(Q(BigRational::new(num, den)))
            }
            None => {
                let num = BigInt::from_str(s.trim()).map_err(|_| bad())?;
                Ok(Q(BigRational::from_integer(num)))
            }
        }
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        Q::from_str(&s).map_err(D::Error::custom)
    }
}

macro_rules! q_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Q {
            type Output = Q;
            fn $method(self, rhs: Q) -> Q {
                Q((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Q> for &Q {
            type Output = Q;
            fn $method(self, rhs: &'a Q) -> Q {
                Q((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Q> for Q {
            type Output = Q;
            fn $method(self, rhs: &Q) -> Q {
                Q((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Q> for &Q {
            type Output = Q;
            fn $method(self, rhs: Q) -> Q {
                Q((&self.0).$method(rhs.0))
            }
        }
    };
}

q_binop!(Add, add);
q_binop!(Sub, sub);
q_binop!(Mul, mul);
q_binop!(Div, div);

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q(-self.0)
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q(-&self.0)
    }
}

impl AddAssign<&Q> for Q {
    fn add_assign(&mut self, rhs: &Q) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Q> for Q {
    fn sub_assign(&mut self, rhs: &Q) {
        self.0 -= &rhs.0;
    }
}

/// A point of the rational plane, doubling as an exact Gaussian rational.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QPoint {
    pub re: Q,
    pub im: Q,
}

impl QPoint {
    pub fn new(re: Q, im: Q) -> QPoint {
        QPoint { re, im }
    }

    pub fn int(re: i64, im: i64) -> QPoint {
        QPoint::new(Q::int(re), Q::int(im))
    }

    pub fn zero() -> QPoint {
        QPoint::int(0, 0)
    }

    pub fn norm_sq(&self) -> Q {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn conj(&self) -> QPoint {
        QPoint::new(self.re.clone(), -&self.im)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, s: &Q) -> QPoint {
        QPoint::new(&self.re * s, &self.im * s)
    }

    pub fn recip(&self) -> QPoint {
        let n = self.norm_sq();
        assert!(!n.is_zero(), "reciprocal of zero");
        QPoint::new(&self.re / &n, -&(&self.im / &n))
    }
}

impl fmt::Display for QPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.re, self.im)
    }
}

impl Add for &QPoint {
    type Output = QPoint;
    fn add(self, rhs: &QPoint) -> QPoint {
        QPoint::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &QPoint {
    type Output = QPoint;
    fn sub(self, rhs: &QPoint) -> QPoint {
        QPoint::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &QPoint {
    type Output = QPoint;
    fn mul(self, rhs: &QPoint) -> QPoint {
        QPoint::new(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }
}

impl Neg for &QPoint {
    type Output = QPoint;
    fn neg(self) -> QPoint {
        QPoint::new(-&self.re, -&self.im)
    }
}

impl Div for &QPoint {
    type Output = QPoint;
    fn div(self, rhs: &QPoint) -> QPoint {
        self * &rhs.recip()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscKind {
    Open,
    Closed,
}

/// A disc in the unit-disc frame. Radius is always strictly positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disc {
    pub center: QPoint,
    pub radius: Q,
    pub kind: DiscKind,
}

impl Disc {
    pub fn open(center: QPoint, radius: Q) -> Result<Disc, GeometryError> {
        Disc::new(center, radius, DiscKind::Open)
    }

    pub fn closed(center: QPoint, radius: Q) -> Result<Disc, GeometryError> {
        Disc::new(center, radius, DiscKind::Closed)
    }

    pub fn new(center: QPoint, radius: Q, kind: DiscKind) -> Result<Disc, GeometryError> {
        if !radius.is_positive() {
            return Err(GeometryError::BadRadius(radius));
        }
        Ok(Disc { center, radius, kind })
    }

    pub fn unit_closed() -> Disc {
        Disc {
            center: QPoint::zero(),
            radius: Q::one(),
            kind: DiscKind::Closed,
        }
    }

    /// Exact test: `z` strictly inside the disc (open interior).
    pub fn strictly_contains(&self, z: &QPoint) -> bool {
        let d2 = dist_point_point_sq(&self.center, z);
        d2 < &self.radius * &self.radius
    }

    /// Exact test: `z` on the bounding circle.
    pub fn on_circle(&self, z: &QPoint) -> bool {
        let d2 = dist_point_point_sq(&self.center, z);
        d2 == &self.radius * &self.radius
    }

    /// Exact test: the closed disc `other` (center/radius) lies inside this
    /// disc's closure: |c1-c2| + r2 <= r1, decided on squares.
    pub fn closure_contains_disc(&self, other: &Disc) -> bool {
        let slack = &self.radius - &other.radius;
        if slack.is_negative() {
            return false;
        }
        let d2 = dist_point_point_sq(&self.center, &other.center);
        d2 <= &slack * &slack
    }

    /// Exact test: open discs are disjoint (tangency allowed): |c1-c2| >= r1+r2.
    pub fn open_disjoint(&self, other: &Disc) -> bool {
        let s = &self.radius + &other.radius;
        let d2 = dist_point_point_sq(&self.center, &other.center);
        d2 >= &s * &s
    }
}

/// A certified envelope `[lower, upper]` around a real quantity.
///
/// Safety-critical comparisons always use the conservative end; exactness is
/// never assumed for irrational quantities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundPair {
    pub lower: Q,
    pub upper: Q,
}

impl BoundPair {
    pub fn new(lower: Q, upper: Q) -> Result<BoundPair, GeometryError> {
        if lower > upper {
            return Err(GeometryError::BadBounds(lower, upper));
        }
        Ok(BoundPair { lower, upper })
    }

    pub fn exact(v: Q) -> BoundPair {
        BoundPair { lower: v.clone(), upper: v }
    }

    pub fn width(&self) -> Q {
        &self.upper - &self.lower
    }

    pub fn contains(&self, v: &Q) -> bool {
        &self.lower <= v && v <= &self.upper
    }

    pub fn add(&self, other: &BoundPair) -> BoundPair {
        BoundPair {
            lower: &self.lower + &other.lower,
            upper: &self.upper + &other.upper,
        }
    }

    pub fn shift(&self, v: &Q) -> BoundPair {
        BoundPair {
            lower: &self.lower + v,
            upper: &self.upper + v,
        }
    }

    pub fn scale(&self, v: &Q) -> BoundPair {
        if v.is_negative() {
            BoundPair {
                lower: &self.upper * v,
                upper: &self.lower * v,
            }
        } else {
            BoundPair {
                lower: &self.lower * v,
                upper: &self.upper * v,
            }
        }
    }

    /// Clamp the envelope to be non-negative (for quantities known >= 0).
    pub fn clamp_nonneg(self) -> BoundPair {
        BoundPair {
            lower: self.lower.max(Q::zero()),
            upper: self.upper.max(Q::zero()),
        }
    }
}

/// Exact squared Euclidean distance.
pub fn dist_point_point_sq(a: &QPoint, b: &QPoint) -> Q {
    (a - b).norm_sq()
}

/// Exact squared distance from a point to a closed segment [a, b].
pub fn dist_point_segment_sq(z: &QPoint, a: &QPoint, b: &QPoint) -> Q {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2.is_zero() {
        return dist_point_point_sq(z, a);
    }
    let az = z - a;
    // Rational projection parameter, clamped to [0, 1].
    let t = &(&(&az.re * &ab.re) + &(&az.im * &ab.im)) / &len2;
    let t = t.max(Q::zero()).min(Q::one());
    let proj = a + &ab.scale(&t);
    dist_point_point_sq(z, &proj)
}

/// Certified envelope of the square root of a non-negative rational.
///
/// Uses integer square roots on a scaled value, so the envelope is tight:
/// width <= tol, and exact (width 0) for perfect squares of rationals.
pub fn sqrt_bounds(x: &Q, tol: &Q) -> Result<BoundPair, GeometryError> {
    if x.is_negative() {
        return Err(GeometryError::NegativeSqrt(x.clone()));
    }
    if !tol.is_positive() {
        return Err(GeometryError::BadTolerance(tol.clone()));
    }
    if x.is_zero() {
        return Ok(BoundPair::exact(Q::zero()));
    }
    let p = x.numer().clone();
    let q = x.denom().clone();
    // sqrt(p/q) = isqrt(p*q*n^2) / (q*n); gap 1/(q*n) <= tol.
    let inv_tol = tol.recip();
    let n: BigInt = (inv_tol.numer() * &q).div_ceil(&(inv_tol.denom() * &q * &q)).max(BigInt::one());
    let scaled = &p * &q * &n * &n;
    let root = scaled.sqrt();
    let den = &q * &n;
    let lower = Q(BigRational::new(root.clone(), den.clone()));
    if &root * &root == scaled {
        return Ok(BoundPair::exact(lower));
    }
    let upper = Q(BigRational::new(root + BigInt::one(), den));
    BoundPair::new(lower, upper)
}

/// Certified envelope of the k-th root of a non-negative rational.
pub fn root_bounds(x: &Q, k: u32, tol: &Q) -> Result<BoundPair, GeometryError> {
    assert!(k >= 1);
    if x.is_negative() {
        return Err(GeometryError::NegativeSqrt(x.clone()));
    }
    if !tol.is_positive() {
        return Err(GeometryError::BadTolerance(tol.clone()));
    }
    if x.is_zero() {
        return Ok(BoundPair::exact(Q::zero()));
    }
    if k == 1 {
        return Ok(BoundPair::exact(x.clone()));
    }
    // Bisection on rationals with dyadic midpoints; compares k-th powers exactly.
    let mut lo = Q::zero();
    let mut hi = x.clone().max(Q::one());
    loop {
        let width = &hi - &lo;
        if &width <= tol {
            break;
        }
        let mid = &(&lo + &hi) / &Q::int(2);
        let mp = mid.pow(k as i32);
        if &mp <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    BoundPair::new(lo, hi)
}

/// Natural-log envelope of 2, to tolerance `tol`, via the atanh series at 1/3.
fn ln2_bounds(tol: &Q) -> BoundPair {
    atanh_series_bounds(&Q::new(1, 3), tol).scale(&Q::int(2))
}

/// Envelope of atanh(t) = sum t^(2j+1)/(2j+1) for |t| < 1, with the geometric
/// tail bound |t|^(2J+3)/((2J+3)(1-t^2)).
fn atanh_series_bounds(t: &Q, tol: &Q) -> BoundPair {
    let t2 = t * t;
    debug_assert!(t2 < Q::one());
    let geom = (&Q::one() - &t2).recip();
    let mut sum = Q::zero();
    let mut term = t.clone(); // t^(2j+1)
    let mut j: i64 = 0;
    loop {
        sum += &(&term / &Q::int(2 * j + 1));
        term = &term * &t2;
        j += 1;
        let tail = &(&term.abs() / &Q::int(2 * j + 1)) * &geom;
        if &tail <= tol {
            // sum is below the true value for t > 0 (all terms positive);
            // for t < 0 the series alternates in sign of t but terms share
            // t's sign, so the partial sum is above the true value.
            return if t.is_negative() {
                BoundPair {
                    lower: &sum - &tail,
                    upper: sum,
                }
            } else {
                BoundPair {
                    lower: sum.clone(),
                    upper: &sum + &tail,
                }
            };
        }
    }
}

/// Certified envelope of the natural logarithm of a positive rational,
/// width <= tol.
pub fn log_bounds(x: &Q, tol: &Q) -> Result<BoundPair, GeometryError> {
    if !x.is_positive() {
        return Err(GeometryError::NonPositiveLog(x.clone()));
    }
    if !tol.is_positive() {
        return Err(GeometryError::BadTolerance(tol.clone()));
    }
    if x == &Q::one() {
        return Ok(BoundPair::exact(Q::zero()));
    }
    // Reduce x = m * 2^e with m in [3/4, 3/2); ln x = e ln 2 + 2 atanh((m-1)/(m+1)).
    let mut m = x.clone();
    let mut e: i64 = 0;
    let half = Q::new(1, 2);
    let three_halves = Q::new(3, 2);
    let three_quarters = Q::new(3, 4);
    while m >= three_halves {
        m = &m * &half;
        e += 1;
    }
    while m < three_quarters {
        m = &m * &Q::int(2);
        e -= 1;
    }
    // Width budget: atanh part contributes <= tol/2 (tol/4 before the x2
    // scale), the ln2 part <= 2 * budget * |e| = tol/2.
    let quarter_tol = tol.clone() / &Q::int(4);
    let mut out =
        atanh_series_bounds(&(&(&m - &Q::one()) / &(&m + &Q::one())), &quarter_tol).scale(&Q::int(2));
    if e != 0 {
        let budget = &quarter_tol / &Q::int(e.abs());
        out = out.add(&ln2_bounds(&budget).scale(&Q::int(e)));
    }
    Ok(out)
}

/// `n` distinct points exactly on the unit circle, via the rational
/// parametrization t -> ((1-t^2)/(1+t^2), 2t/(1+t^2)) and its antipodes.
/// Points are quasi-uniform; exactness (|p| = 1) is what matters here.
pub fn unit_circle_points(n: usize) -> Vec<QPoint> {
    let mut out = Vec::with_capacity(n);
    let half = n.div_ceil(2);
    for i in 0..half {
        // t in (-1, 1): angles cover the right half circle.
        let t = Q::new(2 * i as i64 + 1 - half as i64, half as i64 + 1);
        let t2 = &t * &t;
        let den = (&Q::one() + &t2).recip();
        let p = QPoint::new(&(&Q::one() - &t2) * &den, &(&t * &Q::int(2)) * &den);
        out.push(p.clone());
        if out.len() < n {
            out.push(-&p);
        }
    }
    out.truncate(n);
    out
}

/// Certified envelope of max(0, |c_a - c_b| - r_a - r_b), the distance
/// between the two (closed) discs. `tol` controls envelope width.
pub fn dist_disc_disc(a: &Disc, b: &Disc, tol: &Q) -> Result<BoundPair, GeometryError> {
    let d2 = dist_point_point_sq(&a.center, &b.center);
    let d = sqrt_bounds(&d2, tol)?;
    let off = -&(&a.radius + &b.radius);
    Ok(d.shift(&off).clamp_nonneg())
}
