//! Exact arithmetic in Q and Q(zeta3), 7-adic valuations, and reduction
//! modulo a prime above 7.
//!
//! Elements of Q(zeta3) are stored on the power basis {1, z3} with
//! `z3^2 = -1 - z3`. Elements of Q embed with a zero z3-coordinate.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

// num-rational reduces after every operation with num-integer's binary gcd,
// which is quadratic when the operands have very different sizes — exactly
// the shape of the series arithmetic here (huge numerators, tiny
// denominators). These helpers reduce with one Euclidean division instead,
// and skip reduction entirely on the integer fast path.

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let s = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << s;
        }
    }
}

/// Euclidean gcd with big division steps, finishing in machine words; far
/// cheaper than bit-at-a-time binary gcd on multi-limb operands.
fn fast_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.is_zero() {
            return a;
        }
        if let Some(bs) = b.to_u64() {
            let r = (&a % &b).to_u64().expect("remainder below a u64 modulus");
            return BigInt::from(gcd_u64(r, bs));
        }
        let r = &a % &b;
        a = b;
        b = r;
    }
}

fn gcd_big_small(a: &BigInt, b: &BigInt) -> BigInt {
    if b.is_zero() {
        return a.abs();
    }
    let r = a % b;
    r.gcd(b)
}

fn rnew(n: BigInt, d: BigInt) -> Rational {
    debug_assert!(!d.is_zero());
    let (n, d) = if d.is_negative() { (-n, -d) } else { (n, d) };
    if d.is_one() {
        return Rational::new_raw(n, d);
    }
    let g = gcd_big_small(&n, &d);
    if g.is_one() {
        Rational::new_raw(n, d)
    } else {
        Rational::new_raw(&n / &g, d / g)
    }
}

fn rmul(x: &Rational, y: &Rational) -> Rational {
    if x.denom().is_one() && y.denom().is_one() {
        return Rational::new_raw(x.numer() * y.numer(), BigInt::one());
    }
    rnew(x.numer() * y.numer(), x.denom() * y.denom())
}

fn radd(x: &Rational, y: &Rational) -> Rational {
    if x.denom() == y.denom() {
        if x.denom().is_one() {
            return Rational::new_raw(x.numer() + y.numer(), BigInt::one());
        }
        return rnew(x.numer() + y.numer(), x.denom().clone());
    }
    let g = fast_gcd(x.denom(), y.denom());
    let lcm = x.denom() / &g * y.denom();
    let n = x.numer() * (y.denom() / &g) + y.numer() * (x.denom() / &g);
    rnew(n, lcm)
}

fn rsub(x: &Rational, y: &Rational) -> Rational {
    if x.denom() == y.denom() {
        if x.denom().is_one() {
            return Rational::new_raw(x.numer() - y.numer(), BigInt::one());
        }
        return rnew(x.numer() - y.numer(), x.denom().clone());
    }
    let g = fast_gcd(x.denom(), y.denom());
    let lcm = x.denom() / &g * y.denom();
    let n = x.numer() * (y.denom() / &g) - y.numer() * (x.denom() / &g);
    rnew(n, lcm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldTag {
    Q,
    QZeta3,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not 7-integral at the chosen prime: {0}")]
    NotIntegral(String),
    #[error("cannot parse field element: {0}")]
    Parse(String),
}

/// An element of Q or Q(zeta3), written `a + b*z3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    tag: FieldTag,
    a: Rational,
    b: Rational,
}

impl FieldElement {
    pub fn from_rational(r: Rational) -> Self {
        FieldElement { tag: FieldTag::Q, a: r, b: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0);
        Self::from_rational(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `a + b*z3` in Q(zeta3).
    pub fn zeta3_linear(a: Rational, b: Rational) -> Self {
        FieldElement { tag: FieldTag::QZeta3, a, b }
    }

    pub fn zeta3_from_ints(a: i64, b: i64) -> Self {
        Self::zeta3_linear(
            Rational::from_integer(BigInt::from(a)),
            Rational::from_integer(BigInt::from(b)),
        )
    }

    pub fn zeta3() -> Self {
        Self::zeta3_from_ints(0, 1)
    }

    pub fn zero(tag: FieldTag) -> Self {
        FieldElement { tag, a: Rational::zero(), b: Rational::zero() }
    }

    pub fn one(tag: FieldTag) -> Self {
        FieldElement { tag, a: Rational::one(), b: Rational::zero() }
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Coordinate on 1 in the power basis.
    pub fn coord_a(&self) -> &Rational {
        &self.a
    }

    /// Coordinate on z3 in the power basis.
    pub fn coord_b(&self) -> &Rational {
        &self.b
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.b.is_zero() {
            Some(&self.a)
        } else {
            None
        }
    }

    /// Reinterpret in Q(zeta3); used when mixing level-one series over Q
    /// with constants from the zeta3 groups.
    pub fn promote(&self, tag: FieldTag) -> Self {
        match (self.tag, tag) {
            (FieldTag::Q, FieldTag::QZeta3) => FieldElement {
                tag: FieldTag::QZeta3,
                a: self.a.clone(),
                b: self.b.clone(),
            },
            _ => self.clone(),
        }
    }

    fn join_tag(&self, other: &Self) -> FieldTag {
        if self.tag == FieldTag::QZeta3 || other.tag == FieldTag::QZeta3 {
            FieldTag::QZeta3
        } else {
            FieldTag::Q
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        FieldElement {
            tag: self.join_tag(other),
            a: radd(&self.a, &other.a),
            b: radd(&self.b, &other.b),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        FieldElement {
            tag: self.join_tag(other),
            a: rsub(&self.a, &other.a),
            b: rsub(&self.b, &other.b),
        }
    }

    pub fn neg(&self) -> Self {
        FieldElement { tag: self.tag, a: -self.a.clone(), b: -self.b.clone() }
    }

    /// (a + b z3)(c + d z3) = (ac - bd) + (ad + bc - bd) z3.
    pub fn mul(&self, other: &Self) -> Self {
        let tag = self.join_tag(other);
        if other.b.is_zero() {
            if self.b.is_zero() {
                return FieldElement { tag, a: rmul(&self.a, &other.a), b: Rational::zero() };
            }
            return FieldElement {
                tag,
                a: rmul(&self.a, &other.a),
                b: rmul(&self.b, &other.a),
            };
        }
        if self.b.is_zero() {
            return FieldElement {
                tag,
                a: rmul(&self.a, &other.a),
                b: rmul(&self.a, &other.b),
            };
        }
        let ac = rmul(&self.a, &other.a);
        let bd = rmul(&self.b, &other.b);
        let ad_bc = radd(&rmul(&self.a, &other.b), &rmul(&self.b, &other.a));
        FieldElement { tag, a: rsub(&ac, &bd), b: rsub(&ad_bc, &bd) }
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        FieldElement { tag: self.tag, a: rmul(&self.a, r), b: rmul(&self.b, r) }
    }

    /// Field norm to Q: a^2 - ab + b^2.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    pub fn inverse(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        // conj(a + b z3) = (a - b) - b z3, and x * conj(x) = norm(x).
        let n = self.norm();
        Ok(FieldElement {
            tag: self.tag,
            a: (&self.a - &self.b) / &n,
            b: -(&self.b / &n),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self, FieldError> {
        Ok(self.mul(&other.inverse()?))
    }

    /// The nontrivial automorphism z3 -> z3^2 = -1 - z3.
    pub fn conjugate(&self) -> Self {
        FieldElement {
            tag: self.tag,
            a: &self.a - &self.b,
            b: -self.b.clone(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = FieldElement::one(self.tag);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }
}

pub fn field_op(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement, FieldError> {
    match op {
        ArithOp::Add => Ok(a.add(b)),
        ArithOp::Sub => Ok(a.sub(b)),
        ArithOp::Mul => Ok(a.mul(b)),
        ArithOp::Div => a.div(b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Exponent of 7 in a rational; `None` encodes +infinity (the zero element).
pub fn valuation7(r: &Rational) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    let seven = BigInt::from(7);
    let mut v = 0i64;
    let mut n = r.numer().abs();
    while (&n % &seven).is_zero() {
        n /= &seven;
        v += 1;
    }
    let mut d = r.denom().abs();
    while (&d % &seven).is_zero() {
        d /= &seven;
        v -= 1;
    }
    Some(v)
}

/// Choice of prime above 7. Over Q(zeta3) the two primes correspond to the
/// two roots of x^2 + x + 1 in F_7, namely 2 and 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeReduction {
    pub tag: FieldTag,
    pub residue: u8,
}

impl PrimeReduction {
    pub fn rational() -> Self {
        PrimeReduction { tag: FieldTag::Q, residue: 0 }
    }

    pub fn zeta3(residue: u8) -> Self {
        assert!(residue == 2 || residue == 4, "residue must satisfy r^2 + r + 1 = 0 mod 7");
        PrimeReduction { tag: FieldTag::QZeta3, residue }
    }

    /// Both primes over 7 in Q(zeta3).
    pub fn both_zeta3() -> [Self; 2] {
        [Self::zeta3(2), Self::zeta3(4)]
    }
}

use num_integer::Integer;

/// Root of x² + x + 1 congruent to `residue` mod 7, lifted mod `modulus`
/// (a power of 7) by Newton iteration.
fn lifted_zeta3_root(residue: u8, modulus: &BigInt) -> BigInt {
    let mut w = BigInt::from(residue);
    loop {
        let f = (&w * &w + &w + 1i32).mod_floor(modulus);
        if f.is_zero() {
            return w;
        }
        let fp = (2i32 * &w + 1i32).mod_floor(modulus);
        let inv = fp.extended_gcd(modulus).x.mod_floor(modulus);
        w = (&w - f * inv).mod_floor(modulus);
    }
}

/// Image in F_7 = O/p of an element integral at the chosen prime p over 7.
///
/// Writes x = (A + B·ζ₃)/D with integers A, B, D and k = v₇(D); x is
/// p-integral iff A + B·ω ≡ 0 mod 7ᵏ for the 7-adic root ω of x² + x + 1
/// picked out by the residue. This is weaker than componentwise
/// 7-integrality of A/D and B/D: cancellation at one prime is allowed.
pub fn reduce_mod_prime7(x: &FieldElement, pr: &PrimeReduction) -> Result<u8, FieldError> {
    let seven = BigInt::from(7);
    // common denominator by hand: the library operators would re-reduce
    // against the (huge) numerators on every multiplication
    let g = fast_gcd(x.a.denom(), x.b.denom());
    let d = x.a.denom() / &g * x.b.denom();
    let a_int = x.a.numer() * (&d / x.a.denom());
    let b_int = x.b.numer() * (&d / x.b.denom());
    let mut k = 0u32;
    let mut d_unit = d;
    while (&d_unit % &seven).is_zero() {
        d_unit /= &seven;
        k += 1;
    }
    let modulus = seven.pow(k + 1);
    let omega = if b_int.is_zero() {
        BigInt::zero()
    } else {
        lifted_zeta3_root(pr.residue, &modulus)
    };
    let num = (a_int + b_int * omega).mod_floor(&modulus);
    let pk = seven.pow(k);
    if !(&num % &pk).is_zero() {
        return Err(FieldError::NotIntegral(x.to_string()));
    }
    let n7 = u8::try_from((num / pk).mod_floor(&seven)).unwrap();
    let d7 = u8::try_from(d_unit.mod_floor(&seven)).unwrap();
    let dinv = (1u8..7).find(|y| (y * d7) % 7 == 1).expect("unit mod 7");
    Ok((n7 * dinv) % 7)
}

impl fmt::Display for FieldElement {
    /// Canonical text encoding: `a/b` or `a/b+c/d*z3` (denominator omitted
    /// when 1, `+` becomes `-` for negative z3-coordinates).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn rat(r: &Rational) -> String {
            if r.denom().is_one() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        if self.b.is_zero() {
            return write!(f, "{}", rat(&self.a));
        }
        let babs = self.b.abs();
        let sign = if self.b.is_negative() { '-' } else { '+' };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{}*z3", rat(&babs))
            } else {
                write!(f, "{}*z3", rat(&babs))
            }
        } else {
            write!(f, "{}{}{}*z3", rat(&self.a), sign, rat(&babs))
        }
    }
}

impl FromStr for FieldElement {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let parse_rat = |t: &str| -> Result<Rational, FieldError> {
            let t = t.trim();
            let mk = |n: &str, d: &str| -> Result<Rational, FieldError> {
                let n: BigInt = n.parse().map_err(|_| FieldError::Parse(t.to_string()))?;
                let d: BigInt = d.parse().map_err(|_| FieldError::Parse(t.to_string()))?;
                if d.is_zero() {
                    return Err(FieldError::Parse(t.to_string()));
                }
                Ok(Rational::new(n, d))
            };
            match t.split_once('/') {
                Some((n, d)) => mk(n, d),
                None => mk(t, "1"),
            }
        };
        match s.strip_suffix("*z3") {
            None => Ok(FieldElement::from_rational(parse_rat(s)?)),
            Some(head) => {
                // split off the z3 coefficient at the last +/- that is not
                // a leading sign or part of a fraction
                let bytes = head.as_bytes();
                let mut split = None;
                for i in (1..bytes.len()).rev() {
                    if bytes[i] == b'+' || bytes[i] == b'-' {
                        if bytes[i - 1] == b'/' {
                            continue;
                        }
                        split = Some(i);
                        break;
                    }
                }
                match split {
                    None => Ok(FieldElement::zeta3_linear(Rational::zero(), parse_rat(head)?)),
                    Some(i) => {
                        let a = parse_rat(&head[..i])?;
                        let sign = if bytes[i] == b'-' { -1 } else { 1 };
                        let b = parse_rat(&head[i + 1..])?
                            * Rational::from_integer(BigInt::from(sign));
                        // "a-..*z3" where a itself may be absent is not produced
                        // by Display, so no further cases are needed.
                        Ok(FieldElement::zeta3_linear(a, b))
                    }
                }
            }
        }
    }
}
