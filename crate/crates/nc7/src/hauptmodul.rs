//! Hauptmodul data and computations in the normalized frame: the j-equation
//! constants for the eight canonical index-7 groups, consistency checks,
//! solving the q-expansion, and unbounded-denominator certificates mod 7.
//!
//! All computation happens after the substitutions z = u·ẑ, q_w = u⁻¹·q̂,
//! ĵ = u⁻ʷ·j, which push every coefficient into Q or Q(ζ₃); the degree-12
//! fields containing u itself are never represented.

use crate::exactfield::{
    reduce_mod_prime7, FieldElement, FieldError, FieldTag, PrimeReduction, Rational,
};
use crate::permgroup::{Family, GroupId};
use crate::qseries::{j_series, PowerSeries};
use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HauptError {
    #[error("no stored j-equation data for {0} (canonical groups only)")]
    UnknownGroup(GroupId),
    #[error("coefficient a_{n} is not integral at the chosen prime: {detail}")]
    NotIntegral { n: i64, detail: String },
    #[error("no residue choice yields an integral reduction for {0}")]
    NoValidResidue(GroupId),
    #[error("newton pivot not invertible for {0}: wrong constants")]
    NewtonPivot(GroupId),
}

/// The scaling datum: w with q = u⁻ʷq̂ʷ, and the base-field value of uʷ.
#[derive(Debug, Clone)]
pub struct UDescriptor {
    pub group: GroupId,
    pub width: u32,
    pub u_pow_w: FieldElement,
    pub u_text: &'static str,
}

/// Normalized j-equation constants: ĉᵢ = cᵢ/u^wt(i), so â₁ = x + ĉ₁,
/// f̂₃ = x² + ĉ₂x + ĉ₃, ê₃ = x + ĉ₄, f̂₂ = x³ + ĉ₅x² + ĉ₆x + ĉ₇, ê₂ = x + ĉ₈.
#[derive(Debug, Clone)]
pub struct JEquationData {
    pub group: GroupId,
    pub exponent_e: u32,
    pub chat: [FieldElement; 8],
}

/// A dense polynomial with field coefficients, ascending degree.
#[derive(Debug, Clone)]
pub struct Poly(pub Vec<FieldElement>);

impl Poly {
    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = vec![FieldElement::zero(FieldTag::Q); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly(out)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let len = self.0.len().max(o.0.len());
        let zero = FieldElement::zero(FieldTag::Q);
        let c = (0..len)
            .map(|i| {
                let a = self.0.get(i).unwrap_or(&zero);
                let b = o.0.get(i).unwrap_or(&zero);
                a.sub(b)
            })
            .collect();
        Poly(c)
    }

    pub fn scale(&self, k: &FieldElement) -> Poly {
        Poly(self.0.iter().map(|c| c.mul(k)).collect())
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly(vec![FieldElement::one(FieldTag::Q)]);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.0
            .get(i)
            .cloned()
            .unwrap_or_else(|| FieldElement::zero(FieldTag::Q))
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero(FieldTag::Q);
        for c in self.0.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Horner evaluation at a Laurent series argument.
    pub fn eval_series(&self, x: &PowerSeries) -> PowerSeries {
        let guard = x.prec() + 16;
        let mut acc = PowerSeries::constant(self.0.last().cloned().unwrap(), guard);
        for c in self.0.iter().rev().skip(1) {
            acc = acc.mul(x).add(&PowerSeries::constant(c.clone(), guard));
        }
        acc
    }
}

impl JEquationData {
    pub fn a1(&self) -> Poly {
        Poly(vec![self.chat[0].clone(), FieldElement::one(FieldTag::Q)])
    }
    pub fn f3(&self) -> Poly {
        Poly(vec![
            self.chat[2].clone(),
            self.chat[1].clone(),
            FieldElement::one(FieldTag::Q),
        ])
    }
    pub fn e3(&self) -> Poly {
        Poly(vec![self.chat[3].clone(), FieldElement::one(FieldTag::Q)])
    }
    pub fn f2(&self) -> Poly {
        Poly(vec![
            self.chat[6].clone(),
            self.chat[5].clone(),
            self.chat[4].clone(),
            FieldElement::one(FieldTag::Q),
        ])
    }
    pub fn e2(&self) -> Poly {
        Poly(vec![self.chat[7].clone(), FieldElement::one(FieldTag::Q)])
    }
}

fn fe(n: i64) -> FieldElement {
    FieldElement::from_int(n)
}

fn fz(a: i64, b: i64) -> FieldElement {
    FieldElement::zeta3_from_ints(a, b)
}

fn over_7_7(num: FieldElement) -> FieldElement {
    let seven7 = FieldElement::from_rational(Rational::new(BigInt::from(1), BigInt::from(823543)));
    num.mul(&seven7)
}

/// Stored data for the six groups whose constants appear in the source
/// tables. The V-family canonical groups carry the Galois conjugates of the
/// U-family data (complex conjugation maps the U-groups onto the V-groups
/// and fixes the defining equations' rational structure).
fn raw_constants(group: GroupId) -> Option<(u32, FieldElement, &'static str, [FieldElement; 8])> {
    use Family::*;
    let data = match (group.family, group.index) {
        (G, 1) => (
            4,
            over_7_7(fe(-1)),
            "u = (-7)^(1/4)/7^2",
            [
                fe(168),
                fe(256),
                // the source's constant list prints 10869 here, but that value
                // fails the eliminated system (residual 81 in the z^1
                // equation); 10896 — from the source's own substitution
                // c3 = 2c2²-2c2c5+c5²/3-c2c8+2c5c8/3+2c6/3 — satisfies all
                // seven equations and reproduces the displayed normalized
                // equation (q̂⁵ coefficient 26544) and the tabulated expansion
                fe(10896),
                fe(-264),
                fe(160),
                fe(-28968),
                fe(-5900544),
                fe(184),
            ],
        ),
        (G, 3) => (
            3,
            over_7_7(fe(-2)),
            "u = (-2/7)^(1/3)/7^2",
            [
                fe(-462),
                fe(-444),
                fe(-148284),
                fe(-516),
                fe(-1422),
                fe(822204),
                fe(-185029704),
                fe(996),
            ],
        ),
        (H, 1) => (
            5,
            over_7_7(fe(-1)),
            "u = (-7^3)^(1/5)/7^2",
            [
                fe(28),
                fe(51),
                fe(-636),
                fe(-97),
                fe(-18),
                fe(-2979),
                fe(-111348),
                fe(92),
            ],
        ),
        (H, 3) => (
            2,
            over_7_7(fe(-1)),
            "u = (-7)^(1/2)/7^4",
            [
                fe(-952),
                fe(96),
                fe(-205797696),
                fe(-5048),
                fe(-5904),
                fe(426314304),
                fe(-2498515200000),
                fe(7048),
            ],
        ),
        (U, 1) => (
            6,
            over_7_7(fz(15060, 21156)),
            "u = ((1763*z3+1255)*12/7^7)^(1/6)",
            [
                fz(-10, -8),
                fz(-6, -6),
                fz(-20, -28),
                fz(8, 10),
                fz(-8, -4),
                fz(12, -60),
                fz(-276, 60),
                fe(6),
            ],
        ),
        (U, 6) => (
            1,
            over_7_7(fz(757, -249)),
            "u = ((3*z3+1)/7)^7",
            [
                fz(-4944, -1368),
                fz(238944, 59472),
                fz(1457337024, 738742464),
                fz(1968, -1368),
                fz(-512496, -128520),
                fz(-13411016640, -5453272512),
                fz(-38174900673024, -8345692154880),
                fz(5424, 3816),
            ],
        ),
        (V, 1) => {
            let (w, u, _, c) = raw_constants(GroupId::new(U, 1)).unwrap();
            (
                w,
                u.conjugate(),
                "u = (conj(1763*z3+1255)*12/7^7)^(1/6)",
                c.map(|x| x.conjugate()),
            )
        }
        (V, 6) => {
            let (w, u, _, c) = raw_constants(GroupId::new(U, 6)).unwrap();
            (
                w,
                u.conjugate(),
                "u = ((3*conj(z3)+1)/7)^7",
                c.map(|x| x.conjugate()),
            )
        }
        _ => return None,
    };
    Some(data)
}

/// The j-equation constants and scaling datum for a canonical group.
pub fn load_constants(group: GroupId) -> Result<(UDescriptor, JEquationData), HauptError> {
    let (width, u_pow_w, u_text, chat) =
        raw_constants(group).ok_or(HauptError::UnknownGroup(group))?;
    Ok((
        UDescriptor {
            group,
            width,
            u_pow_w,
            u_text,
        },
        JEquationData {
            group,
            exponent_e: 7 - width,
            chat,
        },
    ))
}

#[derive(Debug, Clone)]
pub struct CheckItem {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub group: GroupId,
    pub items: Vec<CheckItem>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.items.iter().all(|i| i.ok)
    }

    fn push(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.items.push(CheckItem {
            name: name.into(),
            ok,
            detail: detail.into(),
        });
    }
}

/// Consistency checks on the stored constants:
/// f̂₃³ê₃ − f̂₂²ê₂ = 1728·u⁻ʷ·â₁^e coefficientwise (the seven-equation
/// eliminated system in normalized variables), the distinct-root
/// nonequalities, and for G₁ the linear relation 3ĉ₁ − 3ĉ₂ − ĉ₄ = 0.
pub fn verify_constants(group: GroupId) -> Result<Report, HauptError> {
    let (ud, jd) = load_constants(group)?;
    let mut rep = Report {
        group,
        items: Vec::new(),
    };
    let c = &jd.chat;

    let lhs = jd.f3().pow(3).mul(&jd.e3()).sub(&jd.f2().pow(2).mul(&jd.e2()));
    let factor = fe(1728).mul(&ud.u_pow_w.inverse().expect("u^w nonzero"));
    let rhs = jd.a1().pow(jd.exponent_e).scale(&factor);
    let diff = lhs.sub(&rhs);
    for (k, d) in diff.0.iter().enumerate() {
        rep.push(
            format!("eliminated identity, x^{k}"),
            d.is_zero(),
            if d.is_zero() {
                String::new()
            } else {
                format!("residual {d}")
            },
        );
    }

    let pairwise = c[0]
        .sub(&c[3])
        .mul(&c[0].sub(&c[7]))
        .mul(&c[3].sub(&c[7]));
    rep.push(
        "(c1-c4)(c1-c8)(c4-c8) != 0",
        !pairwise.is_zero(),
        pairwise.to_string(),
    );
    for j in [0usize, 3, 7] {
        let v3 = jd.f3().eval(&c[j]);
        rep.push(
            format!("c{}^2+c2*c{}+c3 != 0", j + 1, j + 1),
            !v3.is_zero(),
            v3.to_string(),
        );
        let v2 = jd.f2().eval(&c[j]);
        rep.push(
            format!("c{}^3+c5*c{}^2+c6*c{}+c7 != 0", j + 1, j + 1, j + 1),
            !v2.is_zero(),
            v2.to_string(),
        );
    }
    let disc3 = c[1].mul(&c[1]).sub(&c[2].mul(&fe(4)));
    rep.push("disc f3 != 0", !disc3.is_zero(), disc3.to_string());
    let (c5, c6, c7) = (&c[4], &c[5], &c[6]);
    let disc2 = c5
        .mul(c5)
        .mul(c6)
        .mul(c6)
        .sub(&c6.pow(3).mul(&fe(4)))
        .sub(&c5.pow(3).mul(c7).mul(&fe(4)))
        .sub(&c7.mul(c7).mul(&fe(27)))
        .add(&c5.mul(c6).mul(c7).mul(&fe(18)));
    rep.push("disc f2 != 0", !disc2.is_zero(), disc2.to_string());

    if group == GroupId::new(Family::G, 1) {
        let lin = fe(3).mul(&c[0]).sub(&fe(3).mul(&c[1])).sub(&c[3]);
        rep.push("3c1-3c2-c4 = 0", lin.is_zero(), lin.to_string());
    }
    Ok(rep)
}

/// ĵ = u⁻ʷ·j with q = u⁻ʷ·q̂ʷ: a Laurent series in q̂ over the base field
/// with leading term q̂⁻ʷ, known modulo q̂^prec.
pub fn jhat_series(ud: &UDescriptor, prec: i64) -> PowerSeries {
    let w = ud.width as i64;
    let scale = ud.u_pow_w.inverse().expect("u^w nonzero");
    let m = (prec - 1).div_euclid(w) + 2; // q-precision needed before substitution
    let j = j_series(m);
    j.substitute_scaled_power(&scale, ud.width)
        .scale(&scale)
        .truncate(prec)
}

/// The hauptmodul expansion ẑ = q̂⁻¹ + Σ_{n≥1} âₙq̂ⁿ with coefficients
/// through q̂^order.
#[derive(Debug, Clone)]
pub struct HauptmodulSeries {
    pub group: GroupId,
    pub order: i64,
    pub series: PowerSeries,
}

impl HauptmodulSeries {
    pub fn coeff(&self, n: i64) -> FieldElement {
        self.series.coeff(n)
    }
}

/// F(x) = f̂₃(x)³ê₃(x) − ĵ·â₁(x)^e, the normalized first j-equation.
fn f_of(jd: &JEquationData, jhat: &PowerSeries, x: &PowerSeries) -> PowerSeries {
    let f3v = jd.f3().eval_series(x);
    let e3v = jd.e3().eval_series(x);
    let a1v = jd.a1().eval_series(x);
    f3v.pow(3)
        .mul(&e3v)
        .sub(&jhat.mul(&a1v.pow(jd.exponent_e as u64)))
}

/// F′(x) = f̂₃²(3(2x+ĉ₂)ê₃ + f̂₃) − ĵ·e·â₁^{e−1}.
fn fprime_of(jd: &JEquationData, jhat: &PowerSeries, x: &PowerSeries) -> PowerSeries {
    let f3v = jd.f3().eval_series(x);
    let e3v = jd.e3().eval_series(x);
    let a1v = jd.a1().eval_series(x);
    let f3d = Poly(vec![jd.chat[1].clone(), fe(2)]).eval_series(x);
    let e = jd.exponent_e;
    let poly_part = f3v
        .pow(2)
        .mul(&f3d.scale(&fe(3)).mul(&e3v).add(&f3v));
    let jpart = jhat
        .scale(&fe(e as i64))
        .mul(&a1v.pow((e - 1) as u64));
    poly_part.sub(&jpart)
}

/// Solve F(ẑ) = 0 by Newton iteration from ẑ = q̂⁻¹ with precision doubling.
/// An iterate correct to O(q̂^m) improves to O(q̂^{2m+1}).
pub fn solve_hauptmodul(group: GroupId, order: i64) -> Result<HauptmodulSeries, HauptError> {
    assert!(order >= 1);
    let (ud, jd) = load_constants(group)?;
    let target = order + 1;
    let jhat = jhat_series(&ud, target);
    let mut x = PowerSeries::monomial(FieldElement::one(FieldTag::Q), -1, 1);
    let mut m = 1i64;
    while m < target {
        let m2 = (2 * m + 1).min(target);
        x.pad_to(m2);
        let jh = jhat.truncate(m2);
        let f = f_of(&jd, &jh, &x).normalized();
        let fp = fprime_of(&jd, &jh, &x).normalized();
        match fp.valuation() {
            Some(-6) => {}
            _ => return Err(HauptError::NewtonPivot(group)),
        }
        x = x.sub(&f.div(&fp)).truncate(m2);
        m = m2;
    }
    debug_assert!(x.coeff(-1).sub(&FieldElement::one(FieldTag::Q)).is_zero());
    debug_assert!(x.coeff(0).is_zero());
    Ok(HauptmodulSeries {
        group,
        order,
        series: x,
    })
}

/// Independent order-by-order solver used to cross-check Newton: with the
/// expansion known through q̂ⁿ⁻¹, the next coefficient is
/// âₙ = −[q̂^{n−6}] F(ẑ) / w. Maintains the powers ẑᵏ incrementally via
/// binomial updates so each step costs O(order) coefficient operations.
pub fn solve_hauptmodul_stepwise(group: GroupId, order: i64) -> Result<HauptmodulSeries, HauptError> {
    assert!(order >= 1);
    let (ud, jd) = load_constants(group)?;
    let target = order + 1;
    let w = ud.width as i64;
    let jhat = jhat_series(&ud, target);
    let e = jd.exponent_e;

    // coefficient arrays of f̂₃³ê₃ (degree 7) and â₁^e (degree e)
    let fpoly = jd.f3().pow(3).mul(&jd.e3());
    let qpoly = jd.a1().pow(e);

    let mut x = PowerSeries::monomial(FieldElement::one(FieldTag::Q), -1, target);
    let mut pows: Vec<PowerSeries> = (0..=7)
        .map(|k| PowerSeries::monomial(FieldElement::one(FieldTag::Q), -(k as i64), target))
        .collect();
    let winv = fe(w).inverse().unwrap();
    let binom: [[i64; 8]; 8] = {
        let mut b = [[0i64; 8]; 8];
        for (n, row) in b.iter_mut().enumerate() {
            row[0] = 1;
            for k in 1..=n {
                row[k] = 0;
            }
        }
        for n in 1..8 {
            for k in 1..=n {
                b[n][k] = b[n - 1][k - 1] + if k <= n - 1 { b[n - 1][k] } else { 0 };
            }
        }
        b
    };

    for n in 0..=order {
        // [q̂^{n-6}] F(x) with the current truncation of x
        let idx = n - 6;
        let mut coefficient = FieldElement::zero(FieldTag::Q);
        for (i, p) in fpoly.0.iter().enumerate() {
            if !p.is_zero() {
                coefficient = coefficient.add(&p.mul(&pows[i].coeff(idx)));
            }
        }
        // subtract [q̂^{n-6}] of ĵ · â₁(x)^e via one convolution coefficient
        let mut conv = FieldElement::zero(FieldTag::Q);
        let a_off = -(e as i64);
        for t in -w..(jhat.prec()) {
            let a_idx = idx - t;
            if a_idx < a_off || a_idx >= pows[0].prec() - (e as i64 - 1) {
                continue;
            }
            let jt = jhat.coeff(t);
            if jt.is_zero() {
                continue;
            }
            let mut aval = FieldElement::zero(FieldTag::Q);
            for (i, qc) in qpoly.0.iter().enumerate() {
                if !qc.is_zero() {
                    aval = aval.add(&qc.mul(&pows[i].coeff(a_idx)));
                }
            }
            conv = conv.add(&jt.mul(&aval));
        }
        coefficient = coefficient.sub(&conv);
        let an = coefficient.neg().mul(&winv);
        if n == 0 {
            debug_assert!(an.is_zero(), "constant term must vanish");
        }
        if an.is_zero() {
            continue;
        }
        // x += an·q̂ⁿ; update powers with the binomial expansion, reading
        // only not-yet-updated (old) entries by descending k
        let delta_coeff = an.clone();
        for k in (1..=7usize).rev() {
            let mut acc = pows[k].clone();
            let mut an_pow = FieldElement::one(FieldTag::Q);
            for j in 1..=k {
                an_pow = an_pow.mul(&delta_coeff);
                if (j as i64) * n - (k - j) as i64 >= target {
                    break;
                }
                let term = pows[k - j]
                    .scale(&an_pow.mul(&fe(binom[k][j])))
                    .shift((j as i64) * n)
                    .truncate(target);
                acc = add_keeping_prec(&acc, &term, target);
            }
            pows[k] = acc;
        }
        x = add_keeping_prec(&x, &PowerSeries::monomial(an, n, target), target);
    }
    Ok(HauptmodulSeries {
        group,
        order,
        series: pows[1].clone().truncate(target),
    })
}

/// Add two series both valid to `prec`, keeping that precision even when one
/// operand stores fewer explicit terms (it is an exact polynomial there).
fn add_keeping_prec(a: &PowerSeries, b: &PowerSeries, prec: i64) -> PowerSeries {
    let mut a = a.clone();
    let mut b = b.clone();
    a.pad_to(prec);
    b.pad_to(prec);
    a.add(&b)
}

/// Series-level verification that the solved expansion satisfies both
/// normalized j-equations and the eliminated identity.
pub fn verify_j_equations_series(group: GroupId, order: i64) -> Result<Report, HauptError> {
    let (ud, jd) = load_constants(group)?;
    let z = solve_hauptmodul(group, order)?;
    let target = order + 1;
    let jhat = jhat_series(&ud, target);
    let mut rep = Report {
        group,
        items: Vec::new(),
    };

    let first = f_of(&jd, &jhat, &z.series);
    report_residual(&mut rep, "jhat*a1^e = f3^3*e3", &first);

    let uinv = ud.u_pow_w.inverse().unwrap();
    let a1v = jd.a1().eval_series(&z.series);
    let f2v = jd.f2().eval_series(&z.series);
    let e2v = jd.e2().eval_series(&z.series);
    let shifted = jhat.sub(&PowerSeries::constant(fe(1728).mul(&uinv), jhat.prec()));
    let second = shifted
        .mul(&a1v.pow(jd.exponent_e as u64))
        .sub(&f2v.pow(2).mul(&e2v));
    report_residual(&mut rep, "(jhat-1728u^-w)*a1^e = f2^2*e2", &second);

    let f3v = jd.f3().eval_series(&z.series);
    let e3v = jd.e3().eval_series(&z.series);
    let elim = f3v
        .pow(3)
        .mul(&e3v)
        .sub(&f2v.pow(2).mul(&e2v))
        .sub(&a1v.pow(jd.exponent_e as u64).scale(&fe(1728).mul(&uinv)));
    report_residual(&mut rep, "1728u^-w*a1^e = f3^3*e3 - f2^2*e2", &elim);
    Ok(rep)
}

fn report_residual(rep: &mut Report, name: &str, residual: &PowerSeries) {
    match residual.valuation() {
        None => rep.push(name, true, format!("zero through q^{}", residual.prec() - 1)),
        Some(v) => rep.push(name, false, format!("first nonzero residual at q^{v}")),
    }
}

/// Table rows (n, âₙ) in canonical text encoding, n = −1..=order.
pub fn export_normalized_table(
    group: GroupId,
    order: i64,
) -> Result<Vec<(i64, String)>, HauptError> {
    let z = solve_hauptmodul(group, order)?;
    Ok((-1..=order).map(|n| (n, z.coeff(n).to_string())).collect())
}

// ---------------------------------------------------------------------------
// mod-7 machinery for the unbounded-denominator certificate

/// Laurent series over F_7 with the same truncation bookkeeping as
/// PowerSeries.
#[derive(Debug, Clone)]
struct SeriesF7 {
    offset: i64,
    c: Vec<u8>,
}

impl SeriesF7 {
    fn prec(&self) -> i64 {
        self.offset + self.c.len() as i64
    }

    fn coeff(&self, n: i64) -> u8 {
        if n < self.offset {
            0
        } else {
            self.c[(n - self.offset) as usize]
        }
    }

    fn mul(&self, o: &SeriesF7) -> SeriesF7 {
        let offset = self.offset + o.offset;
        let prec = (self.prec() + o.offset).min(o.prec() + self.offset);
        let len = (prec - offset).max(0) as usize;
        let mut c = vec![0u16; len];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                c[i + j] = (c[i + j] + a as u16 * b as u16) % 7;
            }
        }
        SeriesF7 {
            offset,
            c: c.into_iter().map(|x| x as u8).collect(),
        }
    }

    fn sub(&self, o: &SeriesF7) -> SeriesF7 {
        let offset = self.offset.min(o.offset);
        let prec = self.prec().min(o.prec());
        let c = (offset..prec.max(offset))
            .map(|n| (7 + self.coeff_or0(n) - o.coeff_or0(n)) % 7)
            .collect();
        SeriesF7 { offset, c }
    }

    fn coeff_or0(&self, n: i64) -> u8 {
        if n < self.offset || n >= self.prec() {
            0
        } else {
            self.coeff(n)
        }
    }

    fn first_nonzero(&self) -> Option<i64> {
        self.c
            .iter()
            .position(|&x| x != 0)
            .map(|i| self.offset + i as i64)
    }
}

fn reduce_series_mod7(s: &PowerSeries, pr: &PrimeReduction) -> Result<SeriesF7, (i64, FieldError)> {
    let mut c = Vec::with_capacity(s.coeffs.len());
    for n in s.offset..s.prec() {
        c.push(reduce_mod_prime7(&s.coeff(n), pr).map_err(|e| (n, e))?);
    }
    Ok(SeriesF7 {
        offset: s.offset,
        c,
    })
}

fn poly_mod7(p: &Poly, pr: &PrimeReduction) -> Result<Vec<u8>, FieldError> {
    p.0.iter().map(|c| reduce_mod_prime7(c, pr)).collect()
}

/// Which prime over 7 to reduce at for Q(ζ₃) groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidueChoice {
    Auto,
    Fixed(u8),
}

/// The shape of the reduced degree-7 equation over F₇(ĵ): collapsed means
/// it reads x⁷ + α·ĵ·x^e + β with every other coefficient ≡ 0.
#[derive(Debug, Clone)]
pub struct ReducedShape {
    pub exponent_e: u32,
    pub alpha: u8,
    pub beta: u8,
    pub collapsed: bool,
}

#[derive(Debug, Clone)]
pub struct UbdCertificate {
    pub group: GroupId,
    pub order: i64,
    /// `None` for groups with rational coefficients.
    pub residue: Option<u8>,
    /// For Q(ζ₃) groups under `Auto`: whether the other residue failed to
    /// produce a valid certificate (expected: true — at the prime where u
    /// is a unit the equation does not degenerate to the Hensel shape).
    pub other_residue_failed: Option<bool>,
    pub integral: bool,
    pub reduced_equation_ok: bool,
    /// ĵ reduces to exactly q̂⁻ʷ (all later coefficients ≡ 0): the
    /// renormalization only strips the 7-powers at one of the two primes.
    pub jhat_collapsed: bool,
    pub shape: ReducedShape,
    /// Whether (α, β) matches the displayed G₁ reduction x⁷ + ĵx³ + 2.
    pub matches_displayed_g1: bool,
    /// Indices n ≤ order with âₙ ≢ 0 at the chosen prime.
    pub nonzero_indices: Vec<i64>,
    /// The nonzero reductions persist: the latest one forces a successor
    /// beyond the computed range (see `certificate_attempt`).
    pub tail_nonzero: bool,
}

impl UbdCertificate {
    /// The finite certificate in full: integral coefficients, the reduced
    /// equation holds and has the degenerate three-term shape, and nonzero
    /// reductions persist to the end of the computed range.
    pub fn valid(&self) -> bool {
        self.integral
            && self.reduced_equation_ok
            && self.jhat_collapsed
            && self.shape.collapsed
            && self.tail_nonzero
    }
}

fn certificate_attempt(
    z: &HauptmodulSeries,
    ud: &UDescriptor,
    jd: &JEquationData,
    jhat: &PowerSeries,
    pr: &PrimeReduction,
) -> Result<UbdCertificate, HauptError> {
    let order = z.order;
    let zbar = reduce_series_mod7(&z.series, pr)
        .map_err(|(n, e)| HauptError::NotIntegral { n, detail: e.to_string() })?;
    let jbar = reduce_series_mod7(jhat, pr)
        .map_err(|(n, e)| HauptError::NotIntegral { n, detail: e.to_string() })?;

    // residual of the reduced equation f̄₃(z̄)³ē₃(z̄) − j̄·ā₁(z̄)^e over F₇
    let e = jd.exponent_e;
    let fbar = poly_mod7(&jd.f3().pow(3).mul(&jd.e3()), pr)
        .map_err(|e| HauptError::NotIntegral { n: -2, detail: e.to_string() })?;
    let qbar = poly_mod7(&jd.a1().pow(e), pr)
        .map_err(|e| HauptError::NotIntegral { n: -2, detail: e.to_string() })?;
    let eval_f7 = |coeffs: &[u8], x: &SeriesF7| -> SeriesF7 {
        let guard = x.prec() + 16;
        let mut acc = SeriesF7 {
            offset: 0,
            c: vec![*coeffs.last().unwrap(); 1],
        };
        acc.c.resize((guard).max(1) as usize, 0);
        for &cc in coeffs.iter().rev().skip(1) {
            let mut next = acc.mul(x);
            if !next.c.is_empty() {
                let pos = -next.offset;
                if (0..next.c.len() as i64).contains(&pos) {
                    next.c[pos as usize] = (next.c[pos as usize] + cc) % 7;
                }
            }
            acc = next;
        }
        acc
    };
    let lhs = eval_f7(&fbar, &zbar);
    let rhs = jbar.mul(&eval_f7(&qbar, &zbar));
    let residual = lhs.sub(&rhs);
    let reduced_equation_ok = residual.first_nonzero().is_none();

    // shape of the reduced polynomial equation
    let collapsed_f = fbar[1..7].iter().all(|&x| x == 0);
    let collapsed_q = qbar[..e as usize].iter().all(|&x| x == 0);
    let shape = ReducedShape {
        exponent_e: e,
        alpha: (7 - qbar[e as usize] % 7) % 7, // coefficient of ĵx^e in F
        beta: fbar[0],
        collapsed: collapsed_f && collapsed_q,
    };
    let matches_displayed_g1 = shape.collapsed && shape.alpha == 1 && shape.beta == 2;

    let jhat_collapsed = {
        let w = ud.width as i64;
        (-w..jbar.prec()).all(|n| jbar.coeff_or0(n) == u8::from(n == -w))
    };

    let nonzero_indices: Vec<i64> = (1..=order).filter(|&n| zbar.coeff(n) != 0).collect();
    // The reduced series is lacunary: the collapsed equation x^7 = a*jhat*x^e + b
    // with jhat = qhat^(-w) maps a nonzero coefficient at index n to one at an
    // index in (n, 7n + w]. Persistence therefore means the largest nonzero
    // index seen is late enough that its forced successor lies beyond the
    // computed range.
    let tail_nonzero = nonzero_indices.last().is_some_and(|&n| 7 * n >= order);

    Ok(UbdCertificate {
        group: z.group,
        order,
        residue: if ud.u_pow_w.tag() == FieldTag::QZeta3 {
            Some(pr.residue)
        } else {
            None
        },
        other_residue_failed: None,
        integral: true,
        reduced_equation_ok,
        jhat_collapsed,
        shape,
        matches_displayed_g1,
        nonzero_indices,
        tail_nonzero,
    })
}

/// Produce the finite unbounded-denominator certificate: 7-integrality of
/// every âₙ at the chosen prime, validity of the reduced equation over F₇,
/// and persistence of nonzero reductions into the tail. Since u has negative
/// 7-adic valuation, each nonzero reduction index certifies a denominator
/// growing with n in the q_w-expansion of z.
pub fn ubd_certificate(
    group: GroupId,
    order: i64,
    choice: ResidueChoice,
) -> Result<UbdCertificate, HauptError> {
    let (ud, jd) = load_constants(group)?;
    let z = solve_hauptmodul(group, order)?;
    let jhat = jhat_series(&ud, order + 1);
    if ud.u_pow_w.tag() == FieldTag::Q {
        return certificate_attempt(&z, &ud, &jd, &jhat, &PrimeReduction::rational());
    }
    match choice {
        ResidueChoice::Fixed(r) => {
            certificate_attempt(&z, &ud, &jd, &jhat, &PrimeReduction::zeta3(r))
        }
        ResidueChoice::Auto => {
            let attempts: Vec<Result<UbdCertificate, HauptError>> = PrimeReduction::both_zeta3()
                .into_iter()
                .map(|pr| certificate_attempt(&z, &ud, &jd, &jhat, &pr))
                .collect();
            let invalid = attempts
                .iter()
                .filter(|r| !matches!(r, Ok(c) if c.valid()))
                .count();
            let mut best: Option<UbdCertificate> = None;
            for res in attempts {
                if let Ok(cert) = res {
                    let take = match best.as_ref() {
                        None => true,
                        Some(b) => cert.valid() && !b.valid(),
                    };
                    if take {
                        best = Some(cert);
                    }
                }
            }
            match best {
                Some(mut cert) => {
                    cert.other_residue_failed = Some(invalid == 1);
                    Ok(cert)
                }
                None => Err(HauptError::NoValidResidue(group)),
            }
        }
    }
}
