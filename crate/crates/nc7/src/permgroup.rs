//! Permutations of seven points, the four transitive homomorphisms from the
//! modular group to S7, matrix-to-word decomposition, membership testing for
//! the index-7 subgroups, the bottom-row indicator chi, and the action of the
//! outer automorphism.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// A bijection of {1..7}; `images[i]` is the image of point `i+1`, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Permutation7([u8; 7]);

impl Permutation7 {
    pub fn identity() -> Self {
        Permutation7([0, 1, 2, 3, 4, 5, 6])
    }

    pub fn from_images_one_based(images: [u8; 7]) -> Self {
        let mut seen = [false; 7];
        let mut out = [0u8; 7];
        for (i, &im) in images.iter().enumerate() {
            assert!((1..=7).contains(&im), "image out of range");
            assert!(!seen[(im - 1) as usize], "not a bijection");
            seen[(im - 1) as usize] = true;
            out[i] = im - 1;
        }
        Permutation7(out)
    }

    /// Parse one-line cycle notation such as `(12)(34)(56)` or `(235)(764)`.
    /// Points are single digits 1..7; `()` or the empty string is the identity.
    pub fn from_cycles(s: &str) -> Self {
        let mut images = [0u8, 1, 2, 3, 4, 5, 6];
        let mut cycle: Vec<u8> = Vec::new();
        for ch in s.chars() {
            match ch {
                '(' => cycle.clear(),
                ')' => {
                    for w in 0..cycle.len() {
                        let from = cycle[w];
                        let to = cycle[(w + 1) % cycle.len()];
                        images[from as usize] = to;
                    }
                    cycle.clear();
                }
                '1'..='7' => cycle.push(ch.to_digit(10).unwrap() as u8 - 1),
                c if c.is_whitespace() => {}
                c => panic!("bad cycle notation character {c:?}"),
            }
        }
        let p = Permutation7(images);
        assert!(p.is_valid());
        p
    }

    fn is_valid(&self) -> bool {
        let mut seen = [false; 7];
        for &x in &self.0 {
            if x > 6 || seen[x as usize] {
                return false;
            }
            seen[x as usize] = true;
        }
        true
    }

    /// Image of a point in 1..=7.
    pub fn apply(&self, point: u8) -> u8 {
        self.0[(point - 1) as usize] + 1
    }

    pub(crate) fn apply0(&self, p: u8) -> u8 {
        self.0[p as usize]
    }

    /// `self` after `other`: (self ∘ other)(x) = self(other(x)).
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = [0u8; 7];
        for i in 0..7 {
            out[i] = self.0[other.0[i] as usize];
        }
        Permutation7(out)
    }

    pub fn inverse(&self) -> Self {
        let mut out = [0u8; 7];
        for i in 0..7 {
            out[self.0[i] as usize] = i as u8;
        }
        Permutation7(out)
    }

    pub fn pow(&self, n: i64) -> Self {
        let ord = self.order() as i64;
        let mut k = n.rem_euclid(ord);
        let mut acc = Self::identity();
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                acc = base.compose(&acc);
            }
            base = base.compose(&base);
            k >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.0 == [0, 1, 2, 3, 4, 5, 6]
    }

    pub fn order(&self) -> u32 {
        let mut p = *self;
        let mut n = 1;
        while !p.is_identity() {
            p = p.compose(self);
            n += 1;
        }
        n
    }

    /// The cycle containing `point` (1-based), in cycle order.
    pub fn cycle_of(&self, point: u8) -> Vec<u8> {
        let mut cyc = vec![point];
        let mut x = self.apply(point);
        while x != point {
            cyc.push(x);
            x = self.apply(x);
        }
        cyc
    }
}

impl fmt::Display for Permutation7 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut done = [false; 7];
        let mut wrote = false;
        for start in 1..=7u8 {
            if done[(start - 1) as usize] {
                continue;
            }
            let cyc = self.cycle_of(start);
            for &p in &cyc {
                done[(p - 1) as usize] = true;
            }
            if cyc.len() > 1 {
                wrote = true;
                write!(f, "(")?;
                for p in &cyc {
                    write!(f, "{p}")?;
                }
                write!(f, ")")?;
            }
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// Letters for words in the modular group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordLetter {
    S,
    SInv,
    T,
    TInv,
    R,
    RInv,
}

/// An element of PSL2(Z): integer matrix with determinant one, compared up
/// to global sign.
#[derive(Debug, Clone)]
pub struct UnimodularMatrix {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl UnimodularMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        let m = UnimodularMatrix {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        };
        assert!(m.det().is_one(), "matrix ({a},{b};{c},{d}) is not unimodular");
        m
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    pub fn t() -> Self {
        Self::new(1, 1, 0, 1)
    }

    pub fn s() -> Self {
        Self::new(0, -1, 1, 0)
    }

    /// R = S·T.
    pub fn r() -> Self {
        Self::new(0, -1, 1, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn mul(&self, o: &Self) -> Self {
        UnimodularMatrix {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn inverse(&self) -> Self {
        UnimodularMatrix {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        }
    }

    pub fn pow(&self, n: i64) -> Self {
        let (mut base, mut k) = if n < 0 {
            (self.inverse(), (-n) as u64)
        } else {
            (self.clone(), n as u64)
        };
        let mut acc = Self::identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// The outer automorphism: (a b; c d) -> (a -b; -c d).
    pub fn outer_psi(&self) -> Self {
        UnimodularMatrix {
            a: self.a.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.d.clone(),
        }
    }

    /// PSL2 equality (up to global sign).
    pub fn eq_up_to_sign(&self, o: &Self) -> bool {
        (self.a == o.a && self.b == o.b && self.c == o.c && self.d == o.d)
            || (self.a == -&o.a && self.b == -&o.b && self.c == -&o.c && self.d == -&o.d)
    }

    pub fn from_letter(l: WordLetter) -> Self {
        match l {
            WordLetter::S => Self::s(),
            WordLetter::SInv => Self::s().inverse(),
            WordLetter::T => Self::t(),
            WordLetter::TInv => Self::t().inverse(),
            WordLetter::R => Self::r(),
            WordLetter::RInv => Self::r().inverse(),
        }
    }

    pub fn from_word(word: &[WordLetter]) -> Self {
        word.iter()
            .fold(Self::identity(), |m, &l| m.mul(&Self::from_letter(l)))
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// One of the four transitive homomorphism families (stabilizer preimages
/// G, H, U, V of the homomorphisms phi_1..phi_4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    G,
    H,
    U,
    V,
}

impl Family {
    pub fn all() -> [Family; 4] {
        [Family::G, Family::H, Family::U, Family::V]
    }
}

/// Identifier for one of the 28 index-7 noncongruence subgroups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GroupId {
    pub family: Family,
    pub index: u8,
}

impl GroupId {
    pub fn new(family: Family, index: u8) -> Self {
        assert!((1..=7).contains(&index));
        GroupId { family, index }
    }

    /// The eight groups whose data is stored as ground truth.
    pub fn canonical() -> [GroupId; 8] {
        use Family::*;
        [
            GroupId::new(G, 1),
            GroupId::new(G, 3),
            GroupId::new(H, 1),
            GroupId::new(H, 3),
            GroupId::new(U, 1),
            GroupId::new(U, 6),
            GroupId::new(V, 1),
            GroupId::new(V, 6),
        ]
    }

    pub fn all() -> Vec<GroupId> {
        Family::all()
            .into_iter()
            .flat_map(|f| (1..=7).map(move |i| GroupId::new(f, i)))
            .collect()
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            Family::G => 'G',
            Family::H => 'H',
            Family::U => 'U',
            Family::V => 'V',
        };
        write!(f, "{}{}", fam, self.index)
    }
}

impl FromStr for GroupId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut chars = s.chars();
        let fam = match chars.next() {
            Some('G') | Some('g') => Family::G,
            Some('H') | Some('h') => Family::H,
            Some('U') | Some('u') => Family::U,
            Some('V') | Some('v') => Family::V,
            _ => return Err(format!("unknown group id {s:?}")),
        };
        let idx: u8 = chars
            .as_str()
            .parse()
            .map_err(|_| format!("unknown group id {s:?}"))?;
        if !(1..=7).contains(&idx) {
            return Err(format!("group index out of range in {s:?}"));
        }
        Ok(GroupId::new(fam, idx))
    }
}

/// Everything needed to compute with one subgroup: the homomorphism images,
/// the stabilized point, the cusp width at infinity, and generator matrices.
#[derive(Debug, Clone)]
pub struct GroupDescriptor {
    pub id: GroupId,
    pub phi_s: Permutation7,
    pub phi_r: Permutation7,
    pub phi_t: Permutation7,
    pub basepoint: u8,
    pub width: u8,
    pub generators: Vec<UnimodularMatrix>,
}

fn family_images(f: Family) -> (Permutation7, Permutation7) {
    let (s, r) = match f {
        Family::G => ("(12)(34)(56)", "(235)(467)"),
        Family::H => ("(12)(34)(56)", "(235)(764)"),
        Family::U => ("(12)(34)(67)", "(235)(467)"),
        Family::V => ("(12)(34)(67)", "(253)(467)"),
    };
    (Permutation7::from_cycles(s), Permutation7::from_cycles(r))
}

/// Presentation generators of the basepoint-1 group in each family.
fn base_generators(f: Family) -> Vec<UnimodularMatrix> {
    match f {
        Family::G => vec![
            UnimodularMatrix::t().pow(4),
            UnimodularMatrix::new(3, -5, 2, -3),
            UnimodularMatrix::r(),
        ],
        Family::H => vec![
            UnimodularMatrix::t().pow(5),
            UnimodularMatrix::new(2, -5, 1, -2),
            UnimodularMatrix::r(),
        ],
        Family::U => vec![
            UnimodularMatrix::t().pow(6),
            UnimodularMatrix::new(1, -2, 1, -1),
            UnimodularMatrix::r(),
        ],
        Family::V => vec![
            UnimodularMatrix::t().pow(6),
            UnimodularMatrix::new(4, -17, 1, -4),
            UnimodularMatrix::r(),
        ],
    }
}

/// Shortest word in S, T whose permutation image sends 1 to `target`.
fn word_mapping_one_to(phi_s: &Permutation7, phi_t: &Permutation7, target: u8) -> Vec<WordLetter> {
    if target == 1 {
        return Vec::new();
    }
    // BFS over left-factors: image of 1 under phi(word), word read as a
    // matrix product with the rightmost letter applied first. Extending a
    // word on the left by letter L maps the current image x to phi(L)(x).
    let mut prev: HashMap<u8, (u8, WordLetter)> = HashMap::new();
    let mut frontier = vec![1u8];
    prev.insert(1, (0, WordLetter::S)); // sentinel
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &x in &frontier {
            for (l, p) in [(WordLetter::S, phi_s), (WordLetter::T, phi_t)] {
                let y = p.apply(x);
                if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(y) {
                    e.insert((x, l));
                    next.push(y);
                }
            }
        }
        frontier = next;
        if prev.contains_key(&target) {
            break;
        }
    }
    let mut word = Vec::new();
    let mut cur = target;
    while cur != 1 {
        let (p, l) = prev[&cur];
        word.push(l);
        cur = p;
    }
    word
}

static DESCRIPTORS: OnceLock<HashMap<GroupId, GroupDescriptor>> = OnceLock::new();

fn build_descriptor(id: GroupId) -> GroupDescriptor {
    let (phi_s, phi_r) = family_images(id.family);
    let phi_t = phi_s.compose(&phi_r);
    let width = phi_t.cycle_of(id.index).len() as u8;
    let base = base_generators(id.family);
    let generators = if id.index == 1 {
        base
    } else {
        let word = word_mapping_one_to(&phi_s, &phi_t, id.index);
        let m = UnimodularMatrix::from_word(&word);
        let minv = m.inverse();
        base.iter().map(|g| m.mul(g).mul(&minv)).collect()
    };
    GroupDescriptor {
        id,
        phi_s,
        phi_r,
        phi_t,
        basepoint: id.index,
        width,
        generators,
    }
}

/// Descriptor lookup for any of the 28 subgroups.
pub fn descriptor(id: GroupId) -> &'static GroupDescriptor {
    let map = DESCRIPTORS.get_or_init(|| {
        GroupId::all()
            .into_iter()
            .map(|id| (id, build_descriptor(id)))
            .collect()
    });
    &map[&id]
}

/// Image of a word under the group's homomorphism. phi(T) = phi(S)∘phi(R),
/// with the rightmost letter of the word applied first.
pub fn evaluate_word(word: &[WordLetter], g: &GroupDescriptor) -> Permutation7 {
    let s = g.phi_s;
    let r = g.phi_r;
    let t = g.phi_t;
    let mut acc = Permutation7::identity();
    for &l in word {
        let p = match l {
            WordLetter::S | WordLetter::SInv => s, // S has order 2
            WordLetter::T => t,
            WordLetter::TInv => t.inverse(),
            WordLetter::R => r,
            WordLetter::RInv => r.inverse(),
        };
        acc = acc.compose(&p);
    }
    acc
}

/// Decompose a unimodular matrix as a word over {S, T, T^-1} whose product
/// equals the matrix up to sign: Euclidean reduction of the bottom row by
/// right multiplications, then a power of T fixed by the top row.
pub fn matrix_to_word(m: &UnimodularMatrix) -> Vec<WordLetter> {
    #[derive(Clone)]
    enum Step {
        TPow(BigInt), // right-multiplied by T^(-q)
        SMul,         // right-multiplied by S
    }
    let mut c = m.c.clone();
    let mut d = m.d.clone();
    let mut steps: Vec<Step> = Vec::new();
    let mut w = UnimodularMatrix::identity();
    while !c.is_zero() {
        let q = num_integer::Integer::div_floor(&d, &c);
        if !q.is_zero() {
            d -= &q * &c;
            w = w.mul(&UnimodularMatrix::t().pow_big(&-&q));
            steps.push(Step::TPow(q));
        }
        // now |d| < |c|, so swapping strictly shrinks |c|
        let old_c = c;
        c = d;
        d = -old_c;
        w = w.mul(&UnimodularMatrix::s());
        steps.push(Step::SMul);
    }
    // m * w = ±T^k
    let tail = m.mul(&w);
    debug_assert!(tail.c.is_zero());
    let k = if tail.d.is_one() {
        tail.b.clone()
    } else {
        -tail.b.clone()
    };
    let mut word = Vec::new();
    push_t_power(&mut word, &k);
    for step in steps.iter().rev() {
        match step {
            Step::SMul => word.push(WordLetter::S),
            Step::TPow(q) => push_t_power(&mut word, q),
        }
    }
    word
}

fn push_t_power(word: &mut Vec<WordLetter>, q: &BigInt) {
    let letter = if q.is_negative() {
        WordLetter::TInv
    } else {
        WordLetter::T
    };
    let mut n = q.abs();
    while n.is_positive() {
        word.push(letter);
        n -= 1;
    }
}

impl UnimodularMatrix {
    fn pow_big(&self, n: &BigInt) -> Self {
        let (mut base, mut k) = if n.is_negative() {
            (self.inverse(), n.abs())
        } else {
            (self.clone(), n.clone())
        };
        let mut acc = Self::identity();
        while k.is_positive() {
            if (&k & BigInt::one()).is_one() {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }
}

/// Membership via word decomposition: the permutation image must fix the
/// group's basepoint.
pub fn is_member(m: &UnimodularMatrix, g: &GroupDescriptor) -> bool {
    let word = matrix_to_word(m);
    let p = evaluate_word(&word, g);
    p.apply(g.basepoint) == g.basepoint
}

/// Indicator of bottom rows: 1 iff some matrix with bottom row (c, d) lies
/// in the group. Zero for non-coprime rows.
pub fn chi(c: i64, d: i64, g: &GroupDescriptor) -> u8 {
    ChiKernel::new(g).chi(c, d)
}

/// Word-problem kernel specialized for a fixed group: tracks the images of
/// the basepoint's T-orbit through the Euclidean reduction of a bottom row,
/// answering chi for the `width` rows (c, d + j·c) with a single reduction.
pub struct ChiKernel {
    tpow: Vec<[u8; 7]>, // phi(T)^k tables for k mod ord(phi(T)), 0-based
    s: [u8; 7],
    ord: i64,
    width: usize,
    start: [u8; 6],
    in_cycle: [bool; 7],
}

impl ChiKernel {
    pub fn new(g: &GroupDescriptor) -> Self {
        let ord = g.phi_t.order() as i64;
        let mut tpow = Vec::with_capacity(ord as usize);
        let mut p = Permutation7::identity();
        for _ in 0..ord {
            let mut tab = [0u8; 7];
            for i in 0..7 {
                tab[i] = p.apply0(i as u8);
            }
            tpow.push(tab);
            p = g.phi_t.compose(&p);
        }
        let mut s = [0u8; 7];
        for i in 0..7 {
            s[i] = g.phi_s.apply0(i as u8);
        }
        let width = g.width as usize;
        let mut start = [0u8; 6];
        let mut point = g.basepoint - 1;
        let mut in_cycle = [false; 7];
        for j in 0..width {
            start[j] = point;
            in_cycle[point as usize] = true;
            point = tpow[1][point as usize];
        }
        ChiKernel {
            tpow,
            s,
            ord,
            width,
            start,
            in_cycle,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Bit j of the result is chi(c, d + j*c) for 0 <= j < width.
    #[inline]
    pub fn row(&self, c: i64, d: i64) -> u8 {
        let (mut c, mut d) = if c < 0 { (-c, -d) } else { (c, d) };
        let full: u8 = (1u16 << self.width) as u8 - 1;
        if c == 0 {
            return if d == 1 || d == -1 { full } else { 0 };
        }
        let w = self.width;
        let mut x = self.start;
        loop {
            let q = d.div_euclid(c);
            d -= q * c;
            let qm = q.rem_euclid(self.ord) as usize;
            if qm != 0 {
                let t = &self.tpow[qm];
                for p in x[..w].iter_mut() {
                    *p = t[*p as usize];
                }
            }
            if d == 0 {
                if c != 1 {
                    return 0;
                }
                for p in x[..w].iter_mut() {
                    *p = self.s[*p as usize];
                }
                break;
            }
            for p in x[..w].iter_mut() {
                *p = self.s[*p as usize];
            }
            let old_c = c;
            c = d;
            d = -old_c;
        }
        let mut bits = 0u8;
        for (j, &p) in x[..w].iter().enumerate() {
            if self.in_cycle[p as usize] {
                bits |= 1 << j;
            }
        }
        bits
    }

    pub fn chi(&self, c: i64, d: i64) -> u8 {
        self.row(c, d) & 1
    }
}

/// Image of a subgroup under the outer automorphism (a b; c d) -> (a -b; -c d),
/// located by conjugating every generator and finding the unique index-7
/// subgroup containing all the images.
pub fn outer_automorphism_image(g: &GroupDescriptor) -> GroupId {
    let conj: Vec<UnimodularMatrix> = g.generators.iter().map(|m| m.outer_psi()).collect();
    let mut hits = Vec::new();
    for id in GroupId::all() {
        let cand = descriptor(id);
        if conj.iter().all(|m| is_member(m, cand)) {
            hits.push(id);
        }
    }
    match hits.as_slice() {
        [unique] => *unique,
        _ => panic!(
            "outer automorphism image of {} not unique: {:?} (group data error)",
            g.id, hits
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> &'static GroupDescriptor {
        descriptor(GroupId::new(Family::G, 1))
    }

    #[test]
    fn table_t_images() {
        // phi(T) = phi(S)∘phi(R) must reproduce the tabulated T images
        let cases = [
            (Family::G, "(1245)(367)"),
            (Family::H, "(12475)(36)"),
            (Family::U, "(124735)"),
            (Family::V, "(125473)"),
        ];
        for (f, t) in cases {
            let d = descriptor(GroupId::new(f, 1));
            assert_eq!(d.phi_t, Permutation7::from_cycles(t), "{f:?}");
        }
    }

    #[test]
    fn defining_relations() {
        for f in Family::all() {
            let d = descriptor(GroupId::new(f, 1));
            assert!(d.phi_s.compose(&d.phi_s).is_identity());
            assert!(d.phi_r.compose(&d.phi_r).compose(&d.phi_r).is_identity());
        }
    }

    #[test]
    fn evaluate_word_examples() {
        use WordLetter::*;
        // [S, R] is the matrix S·R... no: T = S·R? T = S·R does not hold;
        // R = S·T so S·R = S·S·T = T up to sign.
        let p = evaluate_word(&[S, R], g1());
        assert_eq!(p, Permutation7::from_cycles("(1245)(367)"));
        assert!(evaluate_word(&[], g1()).is_identity());
        let u1 = descriptor(GroupId::new(Family::U, 1));
        assert!(evaluate_word(&[R, R, R], u1).is_identity());
    }

    #[test]
    fn widths_match_t_cycles() {
        let expect = [
            (Family::G, 1, 4),
            (Family::G, 3, 3),
            (Family::H, 1, 5),
            (Family::H, 3, 2),
            (Family::U, 1, 6),
            (Family::U, 6, 1),
            (Family::V, 1, 6),
            (Family::V, 6, 1),
        ];
        for (f, i, w) in expect {
            assert_eq!(descriptor(GroupId::new(f, i)).width, w, "{f:?}{i}");
        }
    }

    #[test]
    fn matrix_to_word_examples() {
        assert!(matrix_to_word(&UnimodularMatrix::identity()).is_empty());
        let t4 = UnimodularMatrix::t().pow(4);
        let w = matrix_to_word(&t4);
        assert!(UnimodularMatrix::from_word(&w).eq_up_to_sign(&t4));
        let e1 = UnimodularMatrix::new(3, -5, 2, -3);
        let w = matrix_to_word(&e1);
        assert!(UnimodularMatrix::from_word(&w).eq_up_to_sign(&e1));
    }

    #[test]
    fn membership_examples() {
        let e1 = UnimodularMatrix::new(3, -5, 2, -3);
        assert!(is_member(&e1, g1()));
        assert!(!is_member(&UnimodularMatrix::s(), g1()));
        assert!(is_member(&UnimodularMatrix::identity(), g1()));
    }

    #[test]
    fn all_stored_generators_are_members() {
        for id in GroupId::all() {
            let d = descriptor(id);
            for m in &d.generators {
                assert!(is_member(m, d), "generator {m} of {id}");
            }
        }
    }

    #[test]
    fn chi_examples() {
        let d = g1();
        assert_eq!(chi(0, 1, d), 1);
        assert_eq!(chi(2, 4, d), 0);
        // chi(1,0): exactly one of S, TS, T^2 S, T^3 S fixes the basepoint
        let s = UnimodularMatrix::s();
        let hits = (0..4)
            .filter(|&k| is_member(&UnimodularMatrix::t().pow(k).mul(&s), d))
            .count();
        assert_eq!(hits, 1);
        assert_eq!(chi(1, 0, d), 1);
    }

    /// The kernel must agree with the definition: chi(c,d) = 1 iff T^k·lift
    /// is a member for some 0 <= k < width, for every group.
    #[test]
    fn chi_matches_membership_oracle() {
        use num_integer::Integer;
        for id in GroupId::canonical() {
            let d = descriptor(id);
            let kernel = ChiKernel::new(d);
            for c in -20i64..=20 {
                for dd in -20i64..=20 {
                    let expected = if BigInt::from(c).gcd(&BigInt::from(dd)) != BigInt::one() {
                        0
                    } else {
                        // lift (c,d) by extended euclid: find a,b with a*d - b*c = 1
                        let e = BigInt::from(dd).extended_gcd(&BigInt::from(c));
                        // e.x*d + e.y*c = 1, so lift = (x, -y; c, d)
                        let lift = UnimodularMatrix {
                            a: e.x.clone(),
                            b: -e.y.clone(),
                            c: BigInt::from(c),
                            d: BigInt::from(dd),
                        };
                        assert!(lift.det().is_one());
                        let member = (0..d.width as i64)
                            .any(|k| is_member(&UnimodularMatrix::t().pow(k).mul(&lift), d));
                        u8::from(member)
                    };
                    assert_eq!(
                        kernel.chi(c, dd),
                        expected,
                        "group {id} chi({c},{dd})"
                    );
                }
            }
        }
    }

    #[test]
    fn chi_row_bits_are_shifts() {
        for id in GroupId::canonical() {
            let d = descriptor(id);
            let kernel = ChiKernel::new(d);
            for c in 1i64..=40 {
                for dd in 1..=c {
                    let bits = kernel.row(c, dd);
                    for j in 0..kernel.width() as i64 {
                        assert_eq!(
                            (bits >> j) & 1,
                            kernel.chi(c, dd + j * c),
                            "group {id} c={c} d={dd} j={j}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn outer_automorphism_table() {
        // the G and H families are permuted by (12)(36)(45)
        let sigma = |i: u8| match i {
            1 => 2,
            2 => 1,
            3 => 6,
            6 => 3,
            4 => 5,
            5 => 4,
            7 => 7,
            _ => unreachable!(),
        };
        for f in [Family::G, Family::H] {
            for i in 1..=7u8 {
                let img = outer_automorphism_image(descriptor(GroupId::new(f, i)));
                assert_eq!(img, GroupId::new(f, sigma(i)), "{f:?}{i}");
            }
        }
        // psi maps U_j to V_j' per the tabulated pairing
        let pairs = [(1, 2), (2, 1), (3, 4), (4, 3), (5, 5), (6, 6), (7, 7)];
        for (uj, vj) in pairs {
            let img = outer_automorphism_image(descriptor(GroupId::new(Family::U, uj)));
            assert_eq!(img, GroupId::new(Family::V, vj), "U{uj}");
        }
    }

    #[test]
    fn outer_automorphism_is_involution() {
        for id in GroupId::all() {
            let img = outer_automorphism_image(descriptor(id));
            let back = outer_automorphism_image(descriptor(img));
            assert_eq!(back, id);
        }
    }
}
