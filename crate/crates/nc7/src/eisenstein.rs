//! Eisenstein-series numerics: the character sums X(n,c), partial Dirichlet
//! sums D(n,k), Fourier coefficients, the exact weight-2 series, the weight-4
//! ansatz fit, and the large-c bound scan.
//!
//! The floating backbone is portable double-double arithmetic (~31 decimal
//! digits) so that the default working precision of 30 digits is honored
//! without a native multiprecision dependency.

use crate::exactfield::{FieldElement, Rational};
use crate::hauptmodul::{self, HauptError, UDescriptor};
use crate::permgroup::{ChiKernel, GroupDescriptor, GroupId};
use crate::qseries::{e4_series, e6_series, PowerSeries};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

// ---------------------------------------------------------------------------
// Double-double arithmetic
// ---------------------------------------------------------------------------

/// Unevaluated sum `hi + lo` of two doubles with |lo| <= ulp(hi)/2, giving
/// roughly 106 bits of significand. All operations are pure f64 arithmetic
/// (Dekker splitting, no FMA), so results are bit-identical across platforms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ahi, alo) = split(a);
    let (bhi, blo) = split(b);
    let err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    /// pi to double-double precision (hi = f64 pi, lo = remainder).
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const TWO_PI: Dd = Dd {
        hi: 6.283185307179586,
        lo: 2.449_293_598_294_706_4e-16,
    };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn from_i64(x: i64) -> Dd {
        // |x| can exceed 2^53; split exactly into two doubles.
        let hi = (x >> 27 << 27) as f64;
        let lo = (x - (x >> 27 << 27)) as f64;
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, o: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, o);
        let s2 = s2 + self.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, o: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, o);
        let p2 = p2 + self.lo * o;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add_f64(q3)
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        // One Newton step from the f64 square root doubles the precision.
        let x = self.hi.sqrt();
        let y = Dd::from_f64(x);
        y.add(self.div(y)).mul_f64(0.5)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    pub fn powi(self, n: u32) -> Dd {
        let mut acc = Dd::ONE;
        let mut base = self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            k >>= 1;
        }
        acc
    }

    /// Exact value as a rational (both components are dyadic rationals).
    pub fn to_rational(self) -> Rational {
        let a = Rational::from_float(self.hi).expect("finite");
        let b = Rational::from_float(self.lo).expect("finite");
        a + b
    }

    /// Decimal string with `digits` significant digits, computed exactly from
    /// the dyadic rational value (round half away from zero).
    pub fn to_decimal(self, digits: usize) -> String {
        let r = self.to_rational();
        if r.is_zero() {
            return "0".to_string();
        }
        let neg = r.is_negative();
        let mut num = r.numer().abs();
        let den = r.denom().abs();
        // normalize to num/scaled_den in [1,10): exp10 is the decimal exponent
        let mut exp10: i64 = 0;
        let ten = BigInt::from(10);
        while num < den {
            num *= &ten;
            exp10 -= 1;
        }
        let mut scaled_den = den.clone();
        while num >= scaled_den.clone() * &ten {
            scaled_den *= &ten;
            exp10 += 1;
        }
        // now produce `digits` digits of num/scaled_den in [1,10)
        let mut digits_out = String::new();
        let mut rem = num;
        for _ in 0..digits {
            let d = &rem / &scaled_den;
            digits_out.push(char::from(b'0' + d.to_u8().unwrap_or(0)));
            rem = (rem - d * &scaled_den) * &ten;
        }
        // rounding from the next digit
        let next = (&rem / &scaled_den).to_u8().unwrap_or(0);
        if next >= 5 {
            let mut bytes: Vec<u8> = digits_out.into_bytes();
            let mut i = bytes.len();
            loop {
                if i == 0 {
                    bytes.insert(0, b'1');
                    exp10 += 1;
                    bytes.pop();
                    break;
                }
                i -= 1;
                if bytes[i] == b'9' {
                    bytes[i] = b'0';
                } else {
                    bytes[i] += 1;
                    break;
                }
            }
            digits_out = String::from_utf8(bytes).expect("digits");
        }
        let mantissa = if digits_out.len() > 1 {
            format!("{}.{}", &digits_out[..1], &digits_out[1..])
        } else {
            digits_out.clone()
        };
        let sign = if neg { "-" } else { "" };
        format!("{sign}{mantissa}e{exp10}")
    }
}

// ---------------------------------------------------------------------------
// Complex double-double
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CxDd {
    pub re: Dd,
    pub im: Dd,
}

impl CxDd {
    pub const ZERO: CxDd = CxDd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: CxDd = CxDd {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    #[inline]
    pub fn new(re: Dd, im: Dd) -> CxDd {
        CxDd { re, im }
    }

    #[inline]
    pub fn add(self, o: CxDd) -> CxDd {
        CxDd::new(self.re.add(o.re), self.im.add(o.im))
    }

    #[inline]
    pub fn sub(self, o: CxDd) -> CxDd {
        CxDd::new(self.re.sub(o.re), self.im.sub(o.im))
    }

    #[inline]
    pub fn mul(self, o: CxDd) -> CxDd {
        CxDd::new(
            self.re.mul(o.re).sub(self.im.mul(o.im)),
            self.re.mul(o.im).add(self.im.mul(o.re)),
        )
    }

    #[inline]
    pub fn scale(self, s: Dd) -> CxDd {
        CxDd::new(self.re.mul(s), self.im.mul(s))
    }

    #[inline]
    pub fn conj(self) -> CxDd {
        CxDd::new(self.re, self.im.neg())
    }

    pub fn abs(self) -> Dd {
        self.re.mul(self.re).add(self.im.mul(self.im)).sqrt()
    }

    pub fn powi(self, n: u32) -> CxDd {
        let mut acc = CxDd::ONE;
        let mut base = self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            k >>= 1;
        }
        acc
    }
}

/// cos and sin of 2*pi*m/q for exact integers, by octant reduction and a
/// double-double Taylor series on [0, pi/4].
pub fn unit_root(m: i64, q: i64) -> CxDd {
    assert!(q > 0);
    let m = m.rem_euclid(q);
    // octant o = floor(8m/q); residual angle 2*pi*(8m - o*q)/(8q) in [0, pi/4)
    let o = (8 * m) / q;
    let num = 8 * m - o * q;
    let theta = Dd::TWO_PI.mul(Dd::from_i64(num).div(Dd::from_i64(8 * q)));
    let (c, s) = sincos_taylor(theta);
    let oct = octant_unit(o as u8);
    CxDd::new(c, s).mul(oct)
}

/// e^{i pi o/4} for o in 0..8.
fn octant_unit(o: u8) -> CxDd {
    let h = Dd::from_f64(0.5).sqrt(); // sqrt(1/2)
    let one = Dd::ONE;
    let z = Dd::ZERO;
    match o {
        0 => CxDd::new(one, z),
        1 => CxDd::new(h, h),
        2 => CxDd::new(z, one),
        3 => CxDd::new(h.neg(), h),
        4 => CxDd::new(one.neg(), z),
        5 => CxDd::new(h.neg(), h.neg()),
        6 => CxDd::new(z, one.neg()),
        7 => CxDd::new(h, h.neg()),
        _ => unreachable!(),
    }
}

/// Taylor evaluation of (cos t, sin t) for 0 <= t < pi/4 + eps.
fn sincos_taylor(t: Dd) -> (Dd, Dd) {
    let t2 = t.mul(t);
    // sin: t * sum (-1)^k t^(2k)/(2k+1)!, cos: sum (-1)^k t^(2k)/(2k)!
    let mut sin_acc = Dd::ONE;
    let mut cos_acc = Dd::ONE;
    let mut term_s = Dd::ONE;
    let mut term_c = Dd::ONE;
    let mut k = 1u32;
    loop {
        // advance factorial denominators: sin term k uses (2k)(2k+1), cos (2k-1)(2k)
        term_c = term_c.mul(t2).div(Dd::from_i64((2 * k as i64 - 1) * 2 * k as i64));
        term_s = term_s.mul(t2).div(Dd::from_i64(2 * k as i64 * (2 * k as i64 + 1)));
        let (sc, ss) = if k % 2 == 1 {
            (cos_acc.sub(term_c), sin_acc.sub(term_s))
        } else {
            (cos_acc.add(term_c), sin_acc.add(term_s))
        };
        cos_acc = sc;
        sin_acc = ss;
        if term_c.hi.abs() < 1e-35 && term_s.hi.abs() < 1e-35 {
            break;
        }
        k += 1;
        if k > 40 {
            break;
        }
    }
    (cos_acc, sin_acc.mul(t))
}

/// zeta_8^n = e^{2 pi i n/8}.
pub fn zeta8_pow(n: i64) -> CxDd {
    octant_unit(n.rem_euclid(8) as u8)
}

// (rest of the module: character-sum kernels, Dirichlet sums, exact g2/g4,
// scan) follows below.

// ---------------------------------------------------------------------------
// Fast indicator row kernel
// ---------------------------------------------------------------------------

/// Euclidean row kernel tuned for bulk evaluation. For 1 <= d < c it returns
/// the same bitmask as [`ChiKernel::row`] (bit j = chi(c, d + j*c)) but with a
/// single positive-operand division per reduction step.
///
/// Derivation: reduce the bottom row (c,d) by right multiplication,
/// (a,b) -> (a,b)·S·T^k = (b, kb - a) with k = ceil(a/b), which keeps both
/// entries nonnegative and strictly shrinks b. Tracked points undergo the
/// inverse image maps, i.e. x -> tinv^k(sinv(x)) per step; at the terminal
/// row (1,0) a lift is T^x·S, so bit j = [s(x_j) in basepoint T-orbit]
/// (the orbit is T-invariant, so the T^x factor is immaterial). A nonzero
/// terminal a means gcd(c,d) = a > 1 and the whole row is zero.
pub struct RowKernel {
    /// step[k][x] = tinv^k(sinv(x)) for k mod ord; 8-wide rows so that masked
    /// indices (x & 7) elide bounds checks in the hot loop
    step: Vec<[u8; 8]>,
    /// final_bit[x] = 1 iff s(x) lies in the basepoint's T-orbit
    final_bit: [u8; 8],
    ord: u32,
    width: usize,
    start: [u8; 6],
}

impl RowKernel {
    pub fn new(g: &GroupDescriptor) -> Self {
        let ord = g.phi_t.order();
        let t_inv = g.phi_t.inverse();
        let s_inv = g.phi_s.inverse();
        let mut step = Vec::with_capacity(ord as usize);
        let mut tp = crate::permgroup::Permutation7::identity();
        for _ in 0..ord {
            let mut tab = [0u8; 8];
            for x in 0..7u8 {
                tab[x as usize] = tp.apply0(s_inv.apply0(x));
            }
            step.push(tab);
            tp = t_inv.compose(&tp);
        }
        let width = g.width as usize;
        let mut start = [0u8; 6];
        let mut in_cycle = [false; 7];
        let mut p = g.basepoint - 1;
        for j in 0..width {
            start[j] = p;
            in_cycle[p as usize] = true;
            p = g.phi_t.apply0(p);
        }
        let mut final_bit = [0u8; 8];
        for x in 0..7u8 {
            if in_cycle[g.phi_s.apply0(x) as usize] {
                final_bit[x as usize] = 1;
            }
        }
        RowKernel {
            step,
            final_bit,
            ord,
            width,
            start,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Bit j = chi(c, d + j*c) for 0 <= j < width; requires 1 <= d < c.
    #[inline]
    pub fn row(&self, c: u32, d: u32) -> u8 {
        match self.width {
            4 => self.row_w::<4>(c, d),
            1 => self.row_w::<1>(c, d),
            2 => self.row_w::<2>(c, d),
            3 => self.row_w::<3>(c, d),
            5 => self.row_w::<5>(c, d),
            _ => self.row_w::<6>(c, d),
        }
    }

    #[inline]
    fn row_w<const W: usize>(&self, c: u32, d: u32) -> u8 {
        debug_assert!(d >= 1 && d < c && self.width == W);
        let mut a = c;
        let mut b = d;
        let mut x = [0u8; W];
        x.copy_from_slice(&self.start[..W]);
        loop {
            // (a,b) -> (b, k*b - a) with k = ceil(a/b); a > b >= 1 throughout.
            // Small quotients dominate (Gauss-Kuzmin), so resolve k <= 4 by
            // comparison before falling back to hardware division.
            let b2 = b << 1;
            let (km, nb) = if a <= b2 {
                (2u32, b2 - a)
            } else if a <= b2 + b {
                (3u32, b2 + b - a)
            } else if a <= b << 2 {
                (4u32, (b << 2) - a)
            } else {
                let q = a / b;
                let r = a - q * b;
                let k = if r == 0 { q } else { q + 1 };
                let km = if k < self.ord { k } else { k % self.ord };
                (km, if r == 0 { 0 } else { b - r })
            };
            let tab = &self.step[km as usize];
            for p in x.iter_mut() {
                *p = tab[(*p & 7) as usize];
            }
            a = b;
            b = nb;
            if b == 0 {
                break;
            }
        }
        if a != 1 {
            return 0;
        }
        let mut bits = 0u8;
        for (j, &p) in x.iter().enumerate() {
            bits |= self.final_bit[(p & 7) as usize] << j;
        }
        bits
    }
}

/// Sieve of smallest prime factors up to n (index 0 and 1 unused).
pub fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Marks buf[d] = 1 for 1 <= d <= limit coprime to c, using the smallest
/// prime factor table for the distinct primes of c.
fn mark_coprime(c: u32, limit: usize, spf: &[u32], buf: &mut Vec<u8>) {
    buf.clear();
    buf.resize(limit + 1, 1);
    if limit == 0 {
        return;
    }
    buf[0] = 0;
    let mut m = c;
    while m > 1 {
        let p = spf[m as usize];
        let mut j = p as usize;
        while j <= limit {
            buf[j] = 0;
            j += p as usize;
        }
        while m % p == 0 {
            m /= p;
        }
    }
}

// ---------------------------------------------------------------------------
// X(n,c)
// ---------------------------------------------------------------------------

/// X(n,c) = sum_{d=1}^{w c} chi(c,d) e^{2 pi i n d/(w c)}, evaluated with the
/// row batching (one word problem serves the whole width-w row). Generic over
/// the group; O(c) kernel calls. Used for modest c and as the reference
/// implementation for the mirrored fast path.
pub fn x_sum(kern: &ChiKernel, n: u32, c: u32) -> CxDd {
    let w = kern.width() as u32;
    let mut sums = [CxDd::ZERO; 6];
    // incremental rotation by e^{2 pi i n/(w c)}
    let omega = unit_root(n as i64, (w * c) as i64);
    let mut z = CxDd::ONE;
    for d in 1..=c {
        z = z.mul(omega);
        let row = kern.row(c as i64, d as i64);
        if row != 0 {
            for (j, s) in sums[..w as usize].iter_mut().enumerate() {
                if row >> j & 1 == 1 {
                    *s = s.add(z);
                }
            }
        }
    }
    let mut x = CxDd::ZERO;
    for (j, s) in sums[..w as usize].iter().enumerate() {
        x = x.add(s.mul(unit_root((n * j as u32) as i64, w as i64)));
    }
    x
}

/// Scratch state for bulk G1 X(n,c) evaluation. The smallest-prime-factor
/// table is borrowed so parallel workers can share one sieve.
pub struct G1XContext<'a> {
    kern: RowKernel,
    chik: ChiKernel,
    spf: &'a [u32],
    coprime: Vec<u8>,
}

impl<'a> G1XContext<'a> {
    /// `spf` must cover every c that will be queried.
    pub fn new(spf: &'a [u32]) -> Self {
        let g = crate::permgroup::descriptor(GroupId::new(crate::permgroup::Family::G, 1));
        G1XContext {
            kern: RowKernel::new(g),
            chik: ChiKernel::new(g),
            spf,
            coprime: Vec::new(),
        }
    }

    /// X(n,c) for G1 using the half-range mirror: row(c, c-d) equals row(c,d)
    /// with bits (0,1,2,3) -> (0,3,2,1), which follows from the indicator
    /// identities chi(c,d) = chi(-c,-d) and chi(-c,e) = chi(c,e+c). Hence
    /// X(n,c) = Y + i^n conj(Y) with Y the d <= (c-1)/2 partial sum.
    pub fn x_sum_fast(&mut self, n: u32, c: u32) -> CxDd {
        if c <= 4 {
            return x_sum(&self.chik, n, c);
        }
        let h = ((c - 1) / 2) as usize;
        mark_coprime(c, h, self.spf, &mut self.coprime);
        let omega = unit_root(n as i64, 4 * c as i64);
        let mut z = CxDd::ONE;
        let mut sums = [CxDd::ZERO; 4];
        for d in 1..=h {
            z = z.mul(omega);
            if self.coprime[d] == 0 {
                continue;
            }
            let row = self.kern.row(c, d as u32);
            if row != 0 {
                for (j, s) in sums.iter_mut().enumerate() {
                    if row >> j & 1 == 1 {
                        *s = s.add(z);
                    }
                }
            }
        }
        let mut y = CxDd::ZERO;
        for (j, s) in sums.iter().enumerate() {
            y = y.add(s.mul(zeta8_pow(2 * (n as i64) * j as i64)));
        }
        y.add(zeta8_pow(2 * n as i64).mul(y.conj()))
    }
}

// ---------------------------------------------------------------------------
// Partial Dirichlet sums and Fourier coefficients
// ---------------------------------------------------------------------------

#[derive(Debug, thiserror::Error)]
pub enum EisError {
    #[error("precision {0} out of range (15..=31 decimal digits)")]
    PrecisionRange(u32),
    #[error("weight k = {0} unsupported (need k >= 2)")]
    BadWeight(u32),
    #[error("n must be >= 1")]
    BadIndex,
    #[error("chunk size must be >= 1")]
    BadChunk,
    #[error(transparent)]
    Haupt(#[from] HauptError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum BoundKind {
    /// 4/((k-2) N^(k-2)) from the tail integral, valid for k >= 4 (and k = 3).
    Rigorous,
    /// k = 2: convergence is only apparent; the attached bound extrapolates
    /// the same tail shape and carries no proof.
    Heuristic,
    /// N = 0 sentinel: nothing summed.
    Infinite,
}

/// Deterministic partial sum of D(n,k) = sum_c X(n,c)/c^k over c <= cutoff.
#[derive(Debug, Clone)]
pub struct PartialSum {
    pub n: u32,
    pub k: u32,
    pub cutoff: u32,
    pub chunk_size: u32,
    pub precision: u32,
    pub value: CxDd,
    pub error_bound: f64,
    pub bound_kind: BoundKind,
}

pub fn tail_bound(k: u32, cutoff: u32) -> (f64, BoundKind) {
    if cutoff == 0 {
        return (f64::INFINITY, BoundKind::Infinite);
    }
    if k >= 3 {
        let km2 = (k - 2) as f64;
        (4.0 / (km2 * (cutoff as f64).powf(km2)), BoundKind::Rigorous)
    } else {
        // no proven tail estimate at k = 2; report the k=3-shaped guess
        (4.0 / cutoff as f64, BoundKind::Heuristic)
    }
}

/// Ascending-c chunked evaluation of D(n,k) through c = cutoff for G1.
/// Chunks are computed independently (in parallel when a rayon pool is
/// active) and folded in ascending order, so the result is bit-identical
/// for fixed (n, k, cutoff, chunk_size) regardless of worker count.
pub fn d_partial(
    n: u32,
    k: u32,
    cutoff: u32,
    chunk_size: u32,
    precision: u32,
) -> Result<PartialSum, EisError> {
    if !(15..=31).contains(&precision) {
        return Err(EisError::PrecisionRange(precision));
    }
    if k < 2 {
        return Err(EisError::BadWeight(k));
    }
    if n == 0 {
        return Err(EisError::BadIndex);
    }
    if chunk_size == 0 {
        return Err(EisError::BadChunk);
    }
    let (error_bound, bound_kind) = tail_bound(k, cutoff);
    if cutoff == 0 {
        return Ok(PartialSum {
            n,
            k,
            cutoff,
            chunk_size,
            precision,
            value: CxDd::ZERO,
            error_bound,
            bound_kind,
        });
    }
    let spf = smallest_prime_factors(cutoff as usize);
    let chunks: Vec<(u32, u32)> = (1..=cutoff)
        .step_by(chunk_size as usize)
        .map(|lo| (lo, (lo + chunk_size - 1).min(cutoff)))
        .collect();
    use rayon::prelude::*;
    let partials: Vec<CxDd> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut ctx = G1XContext::new(&spf);
            let mut acc = CxDd::ZERO;
            for c in lo..=hi {
                let x = ctx.x_sum_fast(n, c);
                let ck = Dd::from_i64(c as i64).powi(k);
                acc = acc.add(x.scale(Dd::ONE.div(ck)));
            }
            acc
        })
        .collect();
    let mut value = CxDd::ZERO;
    for p in partials {
        value = value.add(p);
    }
    Ok(PartialSum {
        n,
        k,
        cutoff,
        chunk_size,
        precision,
        value,
        error_bound,
        bound_kind,
    })
}

/// Fourier coefficient a_n = (n pi i/2)^k D(n,k)/(n (k-1)!) of the cusp-infinity
/// weight-k Eisenstein series for G1, from a partial D sum. The constant term
/// of the series is 1.
#[derive(Debug, Clone)]
pub struct EisensteinCoefficient {
    pub n: u32,
    pub k: u32,
    pub value: CxDd,
    pub error_bound: f64,
    pub bound_kind: BoundKind,
    pub partial: PartialSum,
}

pub fn eisenstein_coefficient(
    n: u32,
    k: u32,
    cutoff: u32,
    precision: u32,
    chunk_size: u32,
) -> Result<EisensteinCoefficient, EisError> {
    if k < 4 || k % 2 != 0 {
        return Err(EisError::BadWeight(k));
    }
    let partial = d_partial(n, k, cutoff, chunk_size, precision)?;
    // (n pi i / 2)^k / (n (k-1)!) -- k is even so i^k = +-1
    let mut fact = 1i64;
    for j in 1..k as i64 {
        fact *= j;
    }
    let mag = Dd::PI.mul_f64(n as f64 * 0.5).powi(k);
    let sign = if k % 4 == 0 { 1.0 } else { -1.0 };
    let scale = mag.mul_f64(sign).div(Dd::from_i64(n as i64 * fact));
    let value = partial.value.scale(scale);
    let error_bound = partial.error_bound * scale.to_f64().abs();
    Ok(EisensteinCoefficient {
        n,
        k,
        value,
        error_bound,
        bound_kind: partial.bound_kind,
        partial,
    })
}

// ---------------------------------------------------------------------------
// Exact weight-2 series and the weight-4 ansatz
// ---------------------------------------------------------------------------

/// An Eisenstein-series pullback (E4 or E6) expressed in the normalized local
/// variable: q = u^{-w} q̂^w substituted into the level-1 q-expansion.
fn level_one_pullback(series_of: fn(i64) -> PowerSeries, ud: &UDescriptor, prec: i64) -> PowerSeries {
    let w = ud.width as i64;
    let scale = ud.u_pow_w.inverse().expect("u^w nonzero");
    let m = (prec - 1).div_euclid(w) + 2;
    series_of(m)
        .substitute_scaled_power(&scale, ud.width)
        .truncate(prec)
}

/// Exact normalized Fourier coefficients a_n/u^n, n = 0..=order, of the unique
/// normalized weight-2 form g2 = E6*e3*f3/(E4*f2), computed as a q̂-series.
pub fn g2_exact(group: GroupId, order: i64) -> Result<PowerSeries, HauptError> {
    let (ud, jd) = hauptmodul::load_constants(group)?;
    let zhat = hauptmodul::solve_hauptmodul_stepwise(group, order + 8)?.series;
    let prec = order + 1;
    let e6 = level_one_pullback(e6_series, &ud, prec + 3);
    let e4 = level_one_pullback(e4_series, &ud, prec + 3);
    let num = e6.mul(&jd.e3().eval_series(&zhat)).mul(&jd.f3().eval_series(&zhat));
    let den = e4.mul(&jd.f2().eval_series(&zhat));
    Ok(num.div(&den).truncate(prec))
}

/// The two exact series of the weight-4 ansatz for G1,
/// g4(C) = (E4/f̂3(ẑ))·â1(ẑ)·(ẑ − C) = A − C·B:
/// A = E4·â1(ẑ)·ẑ/f̂3(ẑ) (constant term 1), B = E4·â1(ẑ)/f̂3(ẑ) (no constant).
pub fn g4_ansatz_parts(order: i64) -> Result<(PowerSeries, PowerSeries), HauptError> {
    let group = GroupId::new(crate::permgroup::Family::G, 1);
    let (ud, jd) = hauptmodul::load_constants(group)?;
    let zhat = hauptmodul::solve_hauptmodul_stepwise(group, order + 8)?.series;
    let prec = order + 1;
    let e4 = level_one_pullback(e4_series, &ud, prec + 3);
    let base = e4.mul(&jd.a1().eval_series(&zhat)).div(&jd.f3().eval_series(&zhat));
    let a = base.mul(&zhat).truncate(prec);
    let b = base.truncate(prec);
    Ok((a, b))
}

/// Convert an exact rational field element to double-double.
pub fn rational_to_dd(x: &Rational) -> Dd {
    let hi = x.to_f64().unwrap_or(f64::NAN);
    if !hi.is_finite() {
        return Dd::from_f64(hi);
    }
    let rem = x - Rational::from_float(hi).expect("finite");
    let lo = rem.to_f64().unwrap_or(0.0);
    let (h, l) = quick_two_sum(hi, lo);
    Dd { hi: h, lo: l }
}

fn field_to_dd(x: &FieldElement) -> Dd {
    debug_assert!(x.is_rational());
    rational_to_dd(&x.as_rational().expect("rational element"))
}

/// |u| = 7^{1/4}/49 for G1; a_n/u^n = a_n * zeta8^{-n} * (49^n / 7^{n/4}).
fn g1_u_inverse_magnitude_pow(n: u32) -> Dd {
    let seven_q = Dd::from_f64(7.0).sqrt().sqrt(); // 7^(1/4)
    Dd::from_i64(49).div(seven_q).powi(n)
}

/// Normalized numeric coefficient a_n/u^n for G1 weight-k series: divides out
/// the principal-branch u = (-7)^{1/4}/7^2 (phase zeta8, magnitude 7^{1/4}/49).
pub fn normalize_g1_coefficient(n: u32, a: CxDd) -> CxDd {
    a.mul(zeta8_pow(-(n as i64))).scale(g1_u_inverse_magnitude_pow(n))
}

#[derive(Debug, Clone)]
pub struct G4FitReport {
    /// cutoff used for the numeric a1
    pub cutoff: u32,
    pub precision: u32,
    /// the numeric normalized coefficient a1/u
    pub a1_numeric: Dd,
    pub a1_error_bound: f64,
    /// fitted constant C of the ansatz
    pub c_fit: Dd,
    pub c_error_bound: f64,
    /// 1/|B1|, the sensitivity of C to the numeric input
    pub condition: f64,
    /// predicted normalized coefficients a_n/u^n for n = 0..=order
    pub predicted: Vec<Dd>,
    /// propagated uncertainty on each prediction
    pub predicted_bounds: Vec<f64>,
}

/// Fits C of the weight-4 ansatz from the numeric a1 (computed with the given
/// cutoff) and predicts the normalized coefficients a_n/u^n up to `order`.
pub fn g4_fit_and_predict(cutoff: u32, precision: u32, order: i64) -> Result<G4FitReport, EisError> {
    let (a, b) = g4_ansatz_parts(order)?;
    let coeff = eisenstein_coefficient(1, 4, cutoff, precision, 4096)?;
    let norm = normalize_g1_coefficient(1, coeff.value);
    let a1_numeric = norm.re; // phase law: imaginary part is noise
    let a1_error_bound = coeff.error_bound * g1_u_inverse_magnitude_pow(1).to_f64();
    let a1_exact = field_to_dd(&a.coeff(1));
    let b1_exact = field_to_dd(&b.coeff(1));
    if b1_exact.to_f64() == 0.0 {
        return Err(EisError::BadIndex);
    }
    let c_fit = a1_exact.sub(a1_numeric).div(b1_exact);
    let condition = 1.0 / b1_exact.to_f64().abs();
    let c_error_bound = a1_error_bound * condition;
    let mut predicted = Vec::new();
    let mut predicted_bounds = Vec::new();
    for m in 0..=order {
        let am = field_to_dd(&a.coeff(m));
        let bm = field_to_dd(&b.coeff(m));
        predicted.push(am.sub(c_fit.mul(bm)));
        predicted_bounds.push(c_error_bound * bm.to_f64().abs());
    }
    Ok(G4FitReport {
        cutoff,
        precision,
        a1_numeric,
        a1_error_bound,
        c_fit,
        c_error_bound,
        condition,
        predicted,
        predicted_bounds,
    })
}

// ---------------------------------------------------------------------------
// Bound scan (f64 fast path)
// ---------------------------------------------------------------------------

/// One scan record for X(1,c).
#[derive(Debug, Clone, Copy)]
pub struct ScanRow {
    pub c: u32,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    /// Re(X * zeta8^{-1}) * c^{2/7} / phi(c)
    pub norm27: f64,
    /// Re(X * zeta8^{-1}) * c^{1/2} / phi(c)
    pub norm12: f64,
    pub is_exception: bool,
}

#[derive(Debug, Clone)]
pub struct ScanSummary {
    pub cmax: u32,
    pub rows: u64,
    /// all c with |X(1,c)| >= c^(5/7)
    pub exceptions: Vec<u32>,
}

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Scans X(1,c) for c <= cmax in plain f64 (the ~1e-11 accumulated rotation
/// error is far below the c^(5/7) comparison scale), reporting each row to
/// `sink` and collecting the exception list.
pub fn stats_scan(cmax: u32, mut sink: impl FnMut(&ScanRow)) -> ScanSummary {
    let g = crate::permgroup::descriptor(GroupId::new(crate::permgroup::Family::G, 1));
    let kern = RowKernel::new(g);
    let chik = ChiKernel::new(g);
    let spf = smallest_prime_factors(cmax as usize);
    let mut coprime: Vec<u8> = Vec::new();
    let mut exceptions = Vec::new();
    let mut rows = 0u64;
    for c in 1..=cmax {
        let (re, im) = if c <= 4 {
            let x = x_sum(&chik, 1, c);
            (x.re.to_f64(), x.im.to_f64())
        } else {
            // half-range with the mirror X = Y + i*conj(Y) (n = 1)
            let h = ((c - 1) / 2) as usize;
            mark_coprime(c, h, &spf, &mut coprime);
            let theta = std::f64::consts::PI / (2.0 * c as f64); // 2 pi/(4c)
            let (wr, wi) = (theta.cos(), theta.sin());
            let (mut zr, mut zi) = (1.0f64, 0.0f64);
            let mut sr = [0.0f64; 4];
            let mut si = [0.0f64; 4];
            for d in 1..=h {
                let t = zr * wr - zi * wi;
                zi = zr * wi + zi * wr;
                zr = t;
                if coprime[d] == 0 {
                    continue;
                }
                let row = kern.row(c, d as u32);
                if row != 0 {
                    for j in 0..4 {
                        if row >> j & 1 == 1 {
                            sr[j] += zr;
                            si[j] += zi;
                        }
                    }
                }
            }
            // Y = sum_j i^j S_j ; X = Y + i conj(Y)
            let yr = sr[0] - si[1] - sr[2] + si[3];
            let yi = si[0] + sr[1] - si[2] - sr[3];
            (yr + yi, yi + yr) // (yr - (-yi), yi + yr): i*conj(y) = (yi, yr)
        };
        let phi = totient(c, &spf) as f64;
        let cf = c as f64;
        let abs = (re * re + im * im).sqrt();
        // Re(X * zeta8^{-1}) = (re + im)/sqrt(2)
        let along_ray = (re + im) * FRAC_1_SQRT_2;
        let is_exception = abs >= cf.powf(5.0 / 7.0);
        if is_exception {
            exceptions.push(c);
        }
        let rec = ScanRow {
            c,
            re,
            im,
            abs,
            norm27: along_ray * cf.powf(2.0 / 7.0) / phi,
            norm12: along_ray * cf.sqrt() / phi,
            is_exception,
        };
        sink(&rec);
        rows += 1;
    }
    ScanSummary {
        cmax,
        rows,
        exceptions,
    }
}

/// Euler totient from the smallest-prime-factor table.
pub fn totient(c: u32, spf: &[u32]) -> u32 {
    let mut m = c;
    let mut phi = 1u32;
    while m > 1 {
        let p = spf[m as usize];
        let mut pk = 1u32;
        m /= p;
        while m % p == 0 {
            pk *= p;
            m /= p;
        }
        phi *= pk * (p - 1);
    }
    phi
}
