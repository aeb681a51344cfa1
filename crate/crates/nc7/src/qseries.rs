//! Truncated Laurent series with exact coefficients, and the level-one
//! series E4, E6, delta, j.

use crate::exactfield::{FieldElement, FieldTag};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// A Laurent series known modulo q^prec: `coeffs[i]` is the coefficient of
/// q^(offset + i), and prec = offset + coeffs.len().
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    pub offset: i64,
    pub coeffs: Vec<FieldElement>,
}

impl PowerSeries {
    pub fn new(offset: i64, coeffs: Vec<FieldElement>) -> Self {
        PowerSeries { offset, coeffs }
    }

    pub fn zero(prec: i64) -> Self {
        PowerSeries {
            offset: prec,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(v: FieldElement, prec: i64) -> Self {
        let mut s = PowerSeries {
            offset: 0,
            coeffs: vec![v],
        };
        s.pad_to(prec);
        s
    }

    /// Monomial c·q^n.
    pub fn monomial(c: FieldElement, n: i64, prec: i64) -> Self {
        let mut s = PowerSeries {
            offset: n,
            coeffs: vec![c],
        };
        s.pad_to(prec);
        s
    }

    pub fn prec(&self) -> i64 {
        self.offset + self.coeffs.len() as i64
    }

    /// Coefficient of q^n; zero below the offset, panics at or above prec.
    pub fn coeff(&self, n: i64) -> FieldElement {
        assert!(n < self.prec(), "coefficient of q^{n} beyond precision");
        if n < self.offset {
            FieldElement::zero(FieldTag::Q)
        } else {
            self.coeffs[(n - self.offset) as usize].clone()
        }
    }

    /// Extend with explicit zero coefficients (exact for a polynomial value).
    pub fn pad_to(&mut self, prec: i64) {
        while self.prec() < prec {
            self.coeffs.push(FieldElement::zero(FieldTag::Q));
        }
    }

    /// Drop stored leading zeros so the offset equals the true valuation;
    /// a zero series becomes the empty series at its precision.
    pub fn normalized(&self) -> Self {
        match self.valuation() {
            None => PowerSeries::zero(self.prec()),
            Some(v) => {
                let skip = (v - self.offset) as usize;
                PowerSeries {
                    offset: v,
                    coeffs: self.coeffs[skip..].to_vec(),
                }
            }
        }
    }

    pub fn truncate(&self, prec: i64) -> Self {
        if prec <= self.offset {
            return PowerSeries::zero(prec);
        }
        let keep = (prec - self.offset) as usize;
        PowerSeries {
            offset: self.offset,
            coeffs: self.coeffs[..keep.min(self.coeffs.len())].to_vec(),
        }
    }

    /// Exponent of the first nonzero coefficient, or None for (truncated) zero.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.offset + i as i64)
    }

    pub fn add(&self, o: &Self) -> Self {
        let offset = self.offset.min(o.offset);
        let prec = self.prec().min(o.prec());
        if prec <= offset {
            return PowerSeries::zero(prec);
        }
        let coeffs = (offset..prec)
            .map(|n| {
                let a = if n >= self.offset && n < self.prec() {
                    self.coeff(n)
                } else {
                    FieldElement::zero(FieldTag::Q)
                };
                let b = if n >= o.offset && n < o.prec() {
                    o.coeff(n)
                } else {
                    FieldElement::zero(FieldTag::Q)
                };
                a.add(&b)
            })
            .collect();
        PowerSeries { offset, coeffs }
    }

    pub fn neg(&self) -> Self {
        PowerSeries {
            offset: self.offset,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &FieldElement) -> Self {
        PowerSeries {
            offset: self.offset,
            coeffs: self.coeffs.iter().map(|c| c.mul(k)).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let offset = self.offset + o.offset;
        let prec = (self.prec() + o.offset).min(o.prec() + self.offset);
        if prec <= offset {
            return PowerSeries::zero(prec);
        }
        let len = (prec - offset) as usize;
        let mut coeffs = vec![FieldElement::zero(FieldTag::Q); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        PowerSeries { offset, coeffs }
    }

    /// Reciprocal, by the standard recursion on coefficients. The series must
    /// have a nonzero coefficient at its stated offset.
    pub fn inverse(&self) -> Self {
        let val = self.valuation().expect("inverse of zero series");
        let skip = (val - self.offset) as usize;
        let coeffs = &self.coeffs[skip..];
        let lead_inv = coeffs[0].inverse().expect("leading coefficient unit");
        let len = coeffs.len();
        let mut out = Vec::with_capacity(len);
        out.push(lead_inv.clone());
        for n in 1..len {
            let mut acc = FieldElement::zero(FieldTag::Q);
            for k in 1..=n {
                if !coeffs[k].is_zero() {
                    acc = acc.add(&coeffs[k].mul(&out[n - k]));
                }
            }
            out.push(acc.neg().mul(&lead_inv));
        }
        PowerSeries {
            offset: -val,
            coeffs: out,
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inverse())
    }

    pub fn pow(&self, n: u64) -> Self {
        if n == 0 {
            let prec = self.prec() - self.offset; // best available for x^0
            return PowerSeries::constant(FieldElement::one(FieldTag::Q), prec.max(1));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitute q -> s·q^w: the q^n term picks up sⁿ and moves to q^(wn).
    /// Negative n uses s⁻¹.
    pub fn substitute_scaled_power(&self, s: &FieldElement, w: u32) -> Self {
        assert!(w >= 1);
        let w = w as i64;
        let offset = self.offset * w;
        let prec = (self.prec() - 1) * w + 1;
        let len = (prec - offset) as usize;
        let mut coeffs = vec![FieldElement::zero(FieldTag::Q); len];
        let s_inv = s.inverse().expect("scale must be invertible");
        // walk exponents outward from 0 so each power of s costs one multiply
        let mut pow_cache = FieldElement::one(FieldTag::Q);
        for n in 0..self.prec().max(0) {
            if n >= 1 {
                pow_cache = pow_cache.mul(s);
            }
            if n >= self.offset && !self.coeff(n).is_zero() {
                coeffs[(n * w - offset) as usize] = self.coeff(n).mul(&pow_cache);
            }
        }
        let mut pow_cache = FieldElement::one(FieldTag::Q);
        for n in (self.offset..0).rev() {
            pow_cache = pow_cache.mul(&s_inv);
            if n < self.prec() && !self.coeff(n).is_zero() {
                coeffs[(n * w - offset) as usize] = self.coeff(n).mul(&pow_cache);
            }
        }
        PowerSeries { offset, coeffs }
    }

    /// Shift exponents by k (multiply by q^k).
    pub fn shift(&self, k: i64) -> Self {
        PowerSeries {
            offset: self.offset + k,
            coeffs: self.coeffs.clone(),
        }
    }
}

/// Divisor power sum sigma_k(n) for all n in 1..=terms, by sieving.
fn sigma_table(k: u32, terms: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); terms + 1];
    for d in 1..=terms {
        let dk = BigInt::from(d).pow(k);
        let mut m = d;
        while m <= terms {
            out[m] += &dk;
            m += d;
        }
    }
    out
}

fn eisenstein_level_one(weight_k: u32, scale: i64, prec: i64) -> PowerSeries {
    let terms = (prec - 1).max(0) as usize;
    let sig = sigma_table(weight_k - 1, terms);
    let mut coeffs = Vec::with_capacity(terms + 1);
    coeffs.push(FieldElement::one(FieldTag::Q));
    for n in 1..=terms {
        let c = BigRational::from(BigInt::from(scale) * &sig[n]);
        coeffs.push(FieldElement::from_rational(c));
    }
    PowerSeries::new(0, coeffs)
}

/// E4 = 1 + 240 Σ sigma_3(n) qⁿ, to precision `prec`.
pub fn e4_series(prec: i64) -> PowerSeries {
    eisenstein_level_one(4, 240, prec)
}

/// E6 = 1 - 504 Σ sigma_5(n) qⁿ.
pub fn e6_series(prec: i64) -> PowerSeries {
    eisenstein_level_one(6, -504, prec)
}

/// delta = (E4³ - E6²)/1728 = q - 24q² + 252q³ - ...
pub fn delta_series(prec: i64) -> PowerSeries {
    let e4 = e4_series(prec);
    let e6 = e6_series(prec);
    let num = e4.pow(3).sub(&e6.pow(2));
    let inv1728 = FieldElement::from_ratio(1, 1728);
    num.scale(&inv1728).truncate(prec)
}

/// j = E4³/delta = q⁻¹ + 744 + 196884q + ...
pub fn j_series(prec: i64) -> PowerSeries {
    let e4 = e4_series(prec + 2);
    let delta = delta_series(prec + 2);
    e4.pow(3).mul(&delta.inverse()).truncate(prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_int(n)
    }

    #[test]
    fn arithmetic_basics() {
        let a = PowerSeries::new(0, vec![fe(1), fe(2), fe(3)]);
        let b = PowerSeries::new(0, vec![fe(1), fe(-1), fe(0)]);
        let s = a.add(&b);
        assert_eq!(s.coeff(0), fe(2));
        assert_eq!(s.coeff(1), fe(1));
        let p = a.mul(&b);
        assert_eq!(p.coeff(0), fe(1));
        assert_eq!(p.coeff(1), fe(1)); // 1*(-1) + 2*1
        assert_eq!(p.coeff(2), fe(1)); // 0 - 2 + 3
    }

    #[test]
    fn inverse_of_geometric() {
        // 1/(1 - q) = 1 + q + q² + ...
        let a = PowerSeries::new(0, vec![fe(1), fe(-1), fe(0), fe(0), fe(0)]);
        let inv = a.inverse();
        for n in 0..5 {
            assert_eq!(inv.coeff(n), fe(1));
        }
        assert_eq!(a.mul(&inv).coeff(0), fe(1));
    }

    #[test]
    fn laurent_inverse_tracks_offset() {
        // 1/(q⁻¹ + 1) = q - q² + q³ - ...
        let a = PowerSeries::new(-1, vec![fe(1), fe(1), fe(0), fe(0)]);
        let inv = a.inverse();
        assert_eq!(inv.offset, 1);
        assert_eq!(inv.coeff(1), fe(1));
        assert_eq!(inv.coeff(2), fe(-1));
        assert_eq!(inv.coeff(3), fe(1));
    }

    #[test]
    fn substitution_scales_and_spreads() {
        // (q⁻¹ + 5 + 2q) with q -> s·q³
        let s = FieldElement::from_int(2);
        let a = PowerSeries::new(-1, vec![fe(1), fe(5), fe(2)]);
        let b = a.substitute_scaled_power(&s, 3);
        assert_eq!(b.offset, -3);
        assert_eq!(b.coeff(-3), FieldElement::from_ratio(1, 2));
        assert_eq!(b.coeff(0), fe(5));
        assert_eq!(b.coeff(3), fe(4));
        assert_eq!(b.coeff(-2), fe(0));
    }

    #[test]
    fn delta_expansion() {
        let d = delta_series(6);
        let expect = [(1, 1), (2, -24), (3, 252), (4, -1472), (5, 4830)];
        for (n, c) in expect {
            assert_eq!(d.coeff(n), fe(c), "delta q^{n}");
        }
        assert_eq!(d.coeff(0), fe(0));
    }

    #[test]
    fn j_expansion() {
        let j = j_series(4);
        let expect = [
            (-1, 1),
            (0, 744),
            (1, 196884),
            (2, 21493760),
            (3, 864299970),
        ];
        for (n, c) in expect {
            assert_eq!(j.coeff(n), fe(c), "j q^{n}");
        }
    }

    #[test]
    fn e_series_heads() {
        let e4 = e4_series(4);
        assert_eq!(e4.coeff(1), fe(240));
        assert_eq!(e4.coeff(2), fe(2160));
        assert_eq!(e4.coeff(3), fe(6720));
        let e6 = e6_series(3);
        assert_eq!(e6.coeff(1), fe(-504));
        assert_eq!(e6.coeff(2), fe(-16632));
    }
}
