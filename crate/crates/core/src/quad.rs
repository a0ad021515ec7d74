//! Exact arithmetic in the maximal order of an imaginary quadratic field of
//! class number one, and in its suborders `Z + m*w*Z`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::intmat::{column_hnf, hnf_basis, Int, IntMatrix};

/// The discriminants `-d` with class number one.
pub const CLASS_NUMBER_ONE: [u32; 9] = [1, 2, 3, 7, 11, 19, 43, 67, 163];

/// `d` values for which the norm is Euclidean.
pub const NORM_EUCLIDEAN: [u32; 5] = [1, 2, 3, 7, 11];

/// Identifies the field `Q(sqrt(-d))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldTag {
    d: u32,
}

impl FieldTag {
    pub fn new(d: u32) -> Result<Self> {
        if CLASS_NUMBER_ONE.contains(&d) {
            Ok(FieldTag { d })
        } else {
            Err(Error::domain(format!(
                "d={d} is not one of the class-number-one values {CLASS_NUMBER_ONE:?}"
            )))
        }
    }

    pub fn d(self) -> u32 {
        self.d
    }

    /// True when `w = (1 + sqrt(-d)) / 2`, i.e. `-d = 1 mod 4`.
    pub fn half_integral(self) -> bool {
        self.d % 4 == 3
    }

    /// `w^2 = -d`, or `w^2 = w - k` with this `k = (1 + d) / 4`.
    pub fn k(self) -> i64 {
        (1 + self.d as i64) / 4
    }

    pub fn is_euclidean(self) -> bool {
        NORM_EUCLIDEAN.contains(&self.d)
    }

    pub fn check_same(self, other: FieldTag) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::TagMismatch {
                left: self.d,
                right: other.d,
            })
        }
    }

    /// `w` as a floating complex number (display and sanity checks only).
    pub fn omega_f64(self) -> (f64, f64) {
        let s = (self.d as f64).sqrt();
        if self.half_integral() {
            (0.5, s / 2.0)
        } else {
            (0.0, s)
        }
    }
}

/// The element `x + y*w` of the maximal order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadInt {
    tag: FieldTag,
    x: Int,
    y: Int,
}

impl fmt::Debug for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[d={}]", self, self.tag.d)
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.x.is_zero(), self.y.is_zero()) {
            (_, true) => write!(f, "{}", self.x),
            (true, false) => write!(f, "{}*w", self.y),
            (false, false) if self.y.is_negative() => write!(f, "{}-{}*w", self.x, -&self.y),
            (false, false) => write!(f, "{}+{}*w", self.x, self.y),
        }
    }
}

impl QuadInt {
    pub fn new(tag: FieldTag, x: impl Into<Int>, y: impl Into<Int>) -> Self {
        QuadInt {
            tag,
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn zero(tag: FieldTag) -> Self {
        Self::new(tag, 0, 0)
    }

    pub fn one(tag: FieldTag) -> Self {
        Self::new(tag, 1, 0)
    }

    pub fn omega(tag: FieldTag) -> Self {
        Self::new(tag, 0, 1)
    }

    pub fn from_int(tag: FieldTag, n: impl Into<Int>) -> Self {
        Self::new(tag, n, 0)
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn x(&self) -> &Int {
        &self.x
    }

    pub fn y(&self) -> &Int {
        &self.y
    }

    /// Coordinate epimorphism onto the `1` component.
    pub fn x_map(&self) -> Int {
        self.x.clone()
    }

    /// Coordinate epimorphism onto the `w` component.
    pub fn y_map(&self) -> Int {
        self.y.clone()
    }

    pub fn coords(&self) -> [Int; 2] {
        [self.x.clone(), self.y.clone()]
    }

    pub fn from_coords(tag: FieldTag, c: &[Int]) -> Self {
        Self::new(tag, c[0].clone(), c[1].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn checked_add(&self, other: &QuadInt) -> Result<QuadInt> {
        self.tag.check_same(other.tag)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &QuadInt) -> Result<QuadInt> {
        self.tag.check_same(other.tag)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &QuadInt) -> Result<QuadInt> {
        self.tag.check_same(other.tag)?;
        Ok(self * other)
    }

    pub fn scale(&self, k: &Int) -> QuadInt {
        QuadInt {
            tag: self.tag,
            x: &self.x * k,
            y: &self.y * k,
        }
    }

    pub fn norm(&self) -> Int {
        let (x, y) = (&self.x, &self.y);
        if self.tag.half_integral() {
            x * x + x * y + y * y * self.tag.k()
        } else {
            x * x + y * y * self.tag.d
        }
    }

    pub fn conj(&self) -> QuadInt {
        if self.tag.half_integral() {
            QuadInt::new(self.tag, &self.x + &self.y, -&self.y)
        } else {
            QuadInt::new(self.tag, self.x.clone(), -&self.y)
        }
    }

    /// Matrix of multiplication by `self` on coordinate columns `(x, y)`.
    pub fn mul_matrix(&self) -> IntMatrix {
        let (x, y) = (self.x.clone(), self.y.clone());
        if self.tag.half_integral() {
            let k = self.tag.k();
            IntMatrix::from_rows(&[vec![x.clone(), -(&y * k)], vec![y.clone(), x + y]])
        } else {
            let d = self.tag.d;
            IntMatrix::from_rows(&[vec![x.clone(), -(&y * d)], vec![y, x]])
        }
    }

    /// Exact quotient `self / b`, or `None` when `b` does not divide `self`.
    pub fn div_exact(&self, b: &QuadInt) -> Result<Option<QuadInt>> {
        self.tag.check_same(b.tag)?;
        if b.is_zero() {
            return Err(Error::domain("division by zero"));
        }
        let n = b.norm();
        let p = self * &b.conj();
        if p.x.is_multiple_of(&n) && p.y.is_multiple_of(&n) {
            Ok(Some(QuadInt::new(self.tag, &p.x / &n, &p.y / &n)))
        } else {
            Ok(None)
        }
    }

    pub fn divides(&self, a: &QuadInt) -> Result<bool> {
        Ok(a.div_exact(self)?.is_some())
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// Element of `self + b*O` closest to zero in norm, as `(q, self - q*b)`
    /// with `q` the rounded quotient. Euclidean fields only.
    fn euclid_step(&self, b: &QuadInt) -> (QuadInt, QuadInt) {
        let n = b.norm();
        let p = self * &b.conj();
        let q = if self.tag.half_integral() {
            // x + y*w = (x + y/2) + y*sqrt(-d)/2
            let y0 = round_div(&p.y, &n);
            // x0 = round(px/n + (py/n - y0)/2) = round((2px + py - y0*n) / 2n)
            let num = &p.x * 2 + &p.y - &y0 * &n;
            let x0 = round_div(&num, &(&n * 2));
            QuadInt::new(self.tag, x0, y0)
        } else {
            QuadInt::new(self.tag, round_div(&p.x, &n), round_div(&p.y, &n))
        };
        let r = self - &(&q * b);
        (q, r)
    }

    /// Generator of `a*O + b*O`, normalized to its canonical associate.
    pub fn gcd(&self, b: &QuadInt) -> Result<QuadInt> {
        self.tag.check_same(b.tag)?;
        if self.is_zero() && b.is_zero() {
            return Err(Error::domain("gcd(0, 0) is undefined"));
        }
        let g = if self.tag.is_euclidean() {
            let (mut r0, mut r1) = (self.clone(), b.clone());
            while !r1.is_zero() {
                let (_, r) = r0.euclid_step(&r1);
                r0 = std::mem::replace(&mut r1, r);
            }
            r0
        } else {
            ideal_generator(self, b)?
        };
        Ok(g.canonical_associate())
    }

    /// `(a0, b0)` with `self*a0 + b*b0 = 1`.
    pub fn bezout(&self, b: &QuadInt) -> Result<(QuadInt, QuadInt)> {
        self.tag.check_same(b.tag)?;
        let tag = self.tag;
        if self.is_zero() && b.is_zero() {
            return Err(Error::domain("bezout(0, 0) is undefined"));
        }
        let (g, s, t) = if tag.is_euclidean() {
            let (mut r0, mut r1) = (self.clone(), b.clone());
            let (mut s0, mut s1) = (QuadInt::one(tag), QuadInt::zero(tag));
            let (mut t0, mut t1) = (QuadInt::zero(tag), QuadInt::one(tag));
            while !r1.is_zero() {
                let (q, r) = r0.euclid_step(&r1);
                r0 = std::mem::replace(&mut r1, r);
                let s = &s0 - &(&q * &s1);
                s0 = std::mem::replace(&mut s1, s);
                let t = &t0 - &(&q * &t1);
                t0 = std::mem::replace(&mut t1, t);
            }
            (r0, s0, t0)
        } else {
            let m = IntMatrix::from_columns(&[
                self.coords().to_vec(),
                (self * &QuadInt::omega(tag)).coords().to_vec(),
                b.coords().to_vec(),
                (b * &QuadInt::omega(tag)).coords().to_vec(),
            ]);
            let h = column_hnf(&m)?;
            if !(h.hnf.get(0, 0).is_one() && h.hnf.get(1, 1).is_one()) {
                return Err(Error::domain(format!("{self} and {b} are not coprime")));
            }
            // reduced HNF of the unit ideal is the identity, so column 0 hits (1, 0)
            let c = h.transform.column(0);
            let s = QuadInt::new(tag, c[0].clone(), c[1].clone());
            let t = QuadInt::new(tag, c[2].clone(), c[3].clone());
            (QuadInt::one(tag), s, t)
        };
        if !g.is_unit() {
            return Err(Error::domain(format!("{self} and {b} are not coprime")));
        }
        let inv = g.conj();
        Ok((&s * &inv, &t * &inv))
    }

    /// The unit multiple chosen as representative of the associate class:
    /// among multiples with `y >= 0`, least `y`, then positive `x`, then least `x`.
    pub fn canonical_associate(&self) -> QuadInt {
        if self.is_zero() {
            return self.clone();
        }
        units(self.tag)
            .iter()
            .map(|u| self * u)
            .filter(|c| !c.y.is_negative())
            .min_by(associate_order)
            .expect("some associate has y >= 0")
    }

    /// The unit `u` with `self * u` canonical.
    pub fn canonicalizing_unit(&self) -> QuadInt {
        let target = self.canonical_associate();
        units(self.tag)
            .into_iter()
            .find(|u| self * u == target)
            .expect("canonical associate is a unit multiple")
    }

    /// Floating embedding into the complex numbers (display and sanity checks only).
    pub fn to_complex(&self) -> (f64, f64) {
        let (wr, wi) = self.tag.omega_f64();
        let x = int_to_f64(&self.x);
        let y = int_to_f64(&self.y);
        (x + y * wr, y * wi)
    }

    /// Parses the literal grammar `[-]x[+|-]y*w` for the field `tag`.
    pub fn parse(tag: FieldTag, s: &str) -> Result<QuadInt> {
        let (x, y) = parse_literal(s)?;
        Ok(QuadInt::new(tag, x, y))
    }
}

fn associate_order(a: &QuadInt, b: &QuadInt) -> Ordering {
    a.y.cmp(&b.y)
        .then_with(|| b.x.is_positive().cmp(&a.x.is_positive()))
        .then_with(|| a.x.cmp(&b.x))
}

pub(crate) fn int_to_f64(n: &Int) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

/// Nearest integer to `p / q` for `q > 0`, halves rounded up.
fn round_div(p: &Int, q: &Int) -> Int {
    let two = Int::from(2);
    (p * &two + q).div_floor(&(q * &two))
}

/// Generator of `a*O + b*O` by search: the ideal's index is the norm of any
/// generator, and class number one guarantees one exists.
fn ideal_generator(a: &QuadInt, b: &QuadInt) -> Result<QuadInt> {
    let tag = a.tag;
    let w = QuadInt::omega(tag);
    let m = IntMatrix::from_columns(&[
        a.coords().to_vec(),
        (a * &w).coords().to_vec(),
        b.coords().to_vec(),
        (b * &w).coords().to_vec(),
    ]);
    let h = hnf_basis(&m)?;
    let (h00, h10, h11) = (h.get(0, 0), h.get(1, 0), h.get(1, 1));
    let n = h00 * h11;
    let d = Int::from(tag.d);
    // N(x + y w) >= d y^2 / 4, and |x + y/2| <= sqrt(N)
    let ybound: Int = Roots::sqrt(&(&n * 4 / &d)) + 1;
    let xbound: Int = Roots::sqrt(&n) + 1;
    let mut y = -ybound.clone();
    while y <= ybound {
        let center = if tag.half_integral() {
            -(&y).div_floor(&Int::from(2))
        } else {
            Int::zero()
        };
        // x = s*h00, and y - s*h10 must be a multiple of h11
        let lo = (&center - &xbound).div_ceil(h00);
        let hi = (&center + &xbound).div_floor(h00);
        let mut s = lo;
        while s <= hi {
            if (&y - &s * h10).is_multiple_of(h11) {
                let g = QuadInt::new(tag, &s * h00, y.clone());
                if g.norm() == n {
                    return Ok(g);
                }
            }
            s += 1;
        }
        y += 1;
    }
    Err(Error::internal(format!(
        "no generator found for the ideal ({a}, {b}) of index {n}"
    )))
}

fn parse_literal(s: &str) -> Result<(Int, Int)> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || Error::Parse(format!("invalid literal {s:?}; expected [-]x[+|-]y*w"));
    if t.is_empty() {
        return Err(err());
    }
    let Some(body) = t.strip_suffix('w') else {
        return Int::from_str(&t).map(|x| (x, Int::zero())).map_err(|_| err());
    };
    let body = body.strip_suffix('*').unwrap_or(body);
    // split off the w coefficient at the last sign that is not leading
    let split = body
        .char_indices()
        .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
        .map(|(i, _)| i)
        .last();
    let (xs, ys) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("", body),
    };
    let x = if xs.is_empty() {
        Int::zero()
    } else {
        Int::from_str(xs).map_err(|_| err())?
    };
    let y = match ys {
        "" | "+" => Int::one(),
        "-" => -Int::one(),
        _ => Int::from_str(ys.strip_prefix('+').unwrap_or(ys)).map_err(|_| err())?,
    };
    Ok((x, y))
}

/// The unit group of the maximal order.
pub fn units(tag: FieldTag) -> Vec<QuadInt> {
    let u = |x: i64, y: i64| QuadInt::new(tag, x, y);
    match tag.d {
        1 => vec![u(1, 0), u(0, 1), u(-1, 0), u(0, -1)],
        3 => vec![u(1, 0), u(0, 1), u(-1, 1), u(-1, 0), u(0, -1), u(1, -1)],
        _ => vec![u(1, 0), u(-1, 0)],
    }
}

impl<'a> Add<&'a QuadInt> for &'a QuadInt {
    type Output = QuadInt;
    /// Panics on a field mismatch; use `checked_add` at API boundaries.
    fn add(self, o: &QuadInt) -> QuadInt {
        assert_eq!(self.tag, o.tag, "field mismatch");
        QuadInt::new(self.tag, &self.x + &o.x, &self.y + &o.y)
    }
}

impl<'a> Sub<&'a QuadInt> for &'a QuadInt {
    type Output = QuadInt;
    fn sub(self, o: &QuadInt) -> QuadInt {
        assert_eq!(self.tag, o.tag, "field mismatch");
        QuadInt::new(self.tag, &self.x - &o.x, &self.y - &o.y)
    }
}

impl<'a> Mul<&'a QuadInt> for &'a QuadInt {
    type Output = QuadInt;
    fn mul(self, o: &QuadInt) -> QuadInt {
        assert_eq!(self.tag, o.tag, "field mismatch");
        let (a, b, c, e) = (&self.x, &self.y, &o.x, &o.y);
        let be = b * e;
        if self.tag.half_integral() {
            // w^2 = w - k
            QuadInt::new(self.tag, a * c - &be * self.tag.k(), a * e + b * c + be)
        } else {
            QuadInt::new(self.tag, a * c - &be * self.tag.d, a * e + b * c)
        }
    }
}

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt::new(self.tag, -&self.x, -&self.y)
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        -&self
    }
}

/// The order `Z + m*w*Z` of conductor `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderRef {
    tag: FieldTag,
    conductor: u64,
}

impl OrderRef {
    pub fn new(tag: FieldTag, conductor: u64) -> Result<Self> {
        if conductor == 0 {
            return Err(Error::domain("conductor must be positive"));
        }
        Ok(OrderRef { tag, conductor })
    }

    pub fn maximal(tag: FieldTag) -> Self {
        OrderRef { tag, conductor: 1 }
    }

    pub fn tag(self) -> FieldTag {
        self.tag
    }

    pub fn conductor(self) -> u64 {
        self.conductor
    }

    pub fn is_maximal(self) -> bool {
        self.conductor == 1
    }

    pub fn contains(self, q: &QuadInt) -> bool {
        q.tag == self.tag && q.y.is_multiple_of(&Int::from(self.conductor))
    }
}
