//! Exact arithmetic in the four norm-Euclidean rings Z, Z[i], Z[ω] and Z[√−2].
//!
//! Elements are stored as a pair of arbitrary-precision coordinates `a + bθ`,
//! where θ is the adjoined generator of the ring (absent for Z).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the supported rings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RingId {
    Integers,
    Gaussian,
    Eisenstein,
    SqrtMinusTwo,
}

impl RingId {
    pub const ALL: [RingId; 4] = [
        RingId::Integers,
        RingId::Gaussian,
        RingId::Eisenstein,
        RingId::SqrtMinusTwo,
    ];

    /// θ² written as `s + tθ`; `None` for Z.
    pub fn theta_square(self) -> Option<(i64, i64)> {
        match self {
            RingId::Integers => None,
            RingId::Gaussian => Some((-1, 0)),
            RingId::Eisenstein => Some((-1, -1)),
            RingId::SqrtMinusTwo => Some((-2, 0)),
        }
    }

    /// Letter used for θ in the textual element syntax.
    pub fn symbol(self) -> Option<char> {
        match self {
            RingId::Integers => None,
            RingId::Gaussian => Some('i'),
            RingId::Eisenstein => Some('w'),
            RingId::SqrtMinusTwo => Some('s'),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RingId::Integers => "Integers",
            RingId::Gaussian => "Gaussian",
            RingId::Eisenstein => "Eisenstein",
            RingId::SqrtMinusTwo => "SqrtMinusTwo",
        }
    }

    /// Evaluate the norm form on small coordinates.
    pub fn norm_i128(self, a: i128, b: i128) -> i128 {
        match self {
            RingId::Integers => a * a,
            RingId::Gaussian => a * a + b * b,
            RingId::Eisenstein => a * a - a * b + b * b,
            RingId::SqrtMinusTwo => a * a + 2 * b * b,
        }
    }

    pub fn zero(self) -> RingElement {
        RingElement::from_i64(self, 0, 0)
    }

    pub fn one(self) -> RingElement {
        RingElement::from_i64(self, 1, 0)
    }

    /// The adjoined generator θ.
    pub fn theta(self) -> Option<RingElement> {
        self.theta_square()
            .map(|_| RingElement::from_i64(self, 0, 1))
    }

    /// The full unit group of the ring.
    pub fn units(self) -> Vec<RingElement> {
        let pairs: &[(i64, i64)] = match self {
            RingId::Integers | RingId::SqrtMinusTwo => &[(1, 0), (-1, 0)],
            RingId::Gaussian => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
            // ±1, ±ω, ±ω² with ω² = −1 − ω
            RingId::Eisenstein => &[(1, 0), (-1, 0), (0, 1), (0, -1), (-1, -1), (1, 1)],
        };
        pairs
            .iter()
            .map(|&(a, b)| RingElement::from_i64(self, a, b))
            .collect()
    }

    /// Whether the rational prime `q` stays prime in this ring.
    pub fn is_inert(self, q: &BigInt) -> bool {
        let r = |m: u32| q.mod_floor(&BigInt::from(m)).to_u32().unwrap();
        match self {
            RingId::Integers => true,
            RingId::Gaussian => r(4) == 3,
            RingId::Eisenstein => r(3) == 2,
            RingId::SqrtMinusTwo => matches!(r(8), 5 | 7),
        }
    }

    /// All elements with norm strictly below `bound`, as small coordinate pairs,
    /// sorted by `(norm, a, b)`.
    pub fn elements_below_norm(self, bound: i64) -> Vec<(i64, i64)> {
        if bound <= 0 {
            return Vec::new();
        }
        // a² − ab + b² ≥ 3b²/4 bounds every coordinate by sqrt(4N/3)
        let r = ((4 * bound as i128 / 3) as f64).sqrt() as i64 + 2;
        let b_range = if self == RingId::Integers { 0..=0 } else { -r..=r };
        let mut out = Vec::new();
        for a in -r..=r {
            for b in b_range.clone() {
                let nm = self.norm_i128(a as i128, b as i128);
                if nm < bound as i128 {
                    out.push((nm, a, b));
                }
            }
        }
        out.sort();
        out.into_iter().map(|(_, a, b)| (a, b)).collect()
    }

    /// Non-unit elements of minimal norm, up to associates.
    pub fn minimal_norm_primes(self) -> Vec<RingElement> {
        let mut bound = 4;
        loop {
            let mut found: Vec<RingElement> = Vec::new();
            let mut best: Option<i128> = None;
            for (a, b) in self.elements_below_norm(bound) {
                let nm = self.norm_i128(a as i128, b as i128);
                if nm <= 1 {
                    continue;
                }
                if best.is_some_and(|m| nm > m) {
                    break;
                }
                best = Some(nm);
                let x = RingElement::from_i64(self, a, b).canonical_associate();
                if !found.contains(&x) {
                    found.push(x);
                }
            }
            if !found.is_empty() {
                found.sort_by_key(|x| (x.a.clone(), x.b.clone()));
                return found;
            }
            bound *= 2;
        }
    }

    /// Primes of norm at most `norm_max`, one per associate class, sorted by norm.
    pub fn primes_up_to_norm(self, norm_max: i64) -> Vec<RingElement> {
        let mut out: Vec<RingElement> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (a, b) in self.elements_below_norm(norm_max + 1) {
            let x = RingElement::from_i64(self, a, b);
            if x.is_zero() || x.is_unit() {
                continue;
            }
            if x.is_prime().unwrap_or(false) {
                let c = x.canonical_associate();
                if seen.insert((c.a.clone(), c.b.clone())) {
                    out.push(c);
                }
            }
        }
        out.sort_by(|x, y| {
            (x.norm(), x.a.clone(), x.b.clone()).cmp(&(y.norm(), y.a.clone(), y.b.clone()))
        });
        out
    }
}

impl fmt::Display for RingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RingId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "z" | "integers" | "int" => Ok(RingId::Integers),
            "zi" | "z[i]" | "gaussian" => Ok(RingId::Gaussian),
            "zw" | "z[w]" | "eisenstein" => Ok(RingId::Eisenstein),
            "zs" | "z[s]" | "z[sqrt-2]" | "sqrtminustwo" | "sqrt-2" => Ok(RingId::SqrtMinusTwo),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "unknown ring (expected Integers, Gaussian, Eisenstein or SqrtMinusTwo)"
                    .into(),
            }),
        }
    }
}

/// An element `a + bθ` of one of the supported rings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    ring: RingId,
    a: BigInt,
    b: BigInt,
}

impl RingElement {
    pub fn new(ring: RingId, a: BigInt, b: BigInt) -> Self {
        let b = if ring == RingId::Integers { BigInt::zero() } else { b };
        RingElement { ring, a, b }
    }

    pub fn from_i64(ring: RingId, a: i64, b: i64) -> Self {
        Self::new(ring, BigInt::from(a), BigInt::from(b))
    }

    pub fn ring(&self) -> RingId {
        self.ring
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    /// Coordinates as machine integers, when they fit.
    pub fn small(&self) -> Option<(i64, i64)> {
        Some((self.a.to_i64()?, self.b.to_i64()?))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn norm(&self) -> BigInt {
        let (a, b) = (&self.a, &self.b);
        match self.ring {
            RingId::Integers => a * a,
            RingId::Gaussian => a * a + b * b,
            RingId::Eisenstein => a * a - a * b + b * b,
            RingId::SqrtMinusTwo => a * a + BigInt::from(2) * b * b,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// Complex conjugate; `x * x.conj() == norm(x)`.
    pub fn conj(&self) -> RingElement {
        match self.ring {
            RingId::Integers => self.clone(),
            RingId::Gaussian | RingId::SqrtMinusTwo => {
                RingElement::new(self.ring, self.a.clone(), -&self.b)
            }
            // conj(ω) = ω² = −1 − ω
            RingId::Eisenstein => RingElement::new(self.ring, &self.a - &self.b, -&self.b),
        }
    }

    /// Euclidean division with `x = q·y + r` and `norm(r) < norm(y)`.
    ///
    /// The quotient rounds each rational coordinate of `x / y` to the nearest
    /// integer, breaking ties toward negative infinity.
    pub fn divmod(&self, y: &RingElement) -> Result<(RingElement, RingElement)> {
        assert_eq!(self.ring, y.ring, "ring mismatch");
        if y.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = y.norm();
        let num = self * &y.conj();
        let q = RingElement::new(
            self.ring,
            round_half_down(&num.a, &d),
            round_half_down(&num.b, &d),
        );
        let r = self - &(&q * y);
        Ok((q, r))
    }

    /// Whether `self` divides `x` exactly.
    pub fn divides(&self, x: &RingElement) -> bool {
        if self.is_zero() {
            return x.is_zero();
        }
        let d = self.norm();
        let num = x * &self.conj();
        num.a.is_multiple_of(&d) && num.b.is_multiple_of(&d)
    }

    /// Representative of the associate class: the lexicographically greatest
    /// `(a, b)` among all unit multiples.
    pub fn canonical_associate(&self) -> RingElement {
        self.ring
            .units()
            .iter()
            .map(|u| u * self)
            .max_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)))
            .unwrap()
    }

    pub fn is_associate(&self, other: &RingElement) -> bool {
        self.canonical_associate() == other.canonical_associate()
    }

    /// Primality in R: the norm is a rational prime, or the element is an
    /// associate of an inert rational prime.
    pub fn is_prime(&self) -> Result<bool> {
        if self.is_zero() || self.is_unit() {
            return Err(Error::ZeroOrUnit(self.to_string()));
        }
        if self.ring == RingId::Integers {
            return Ok(is_rational_prime(&self.a.abs()));
        }
        let nm = self.norm();
        if is_rational_prime(&nm) {
            return Ok(true);
        }
        let root = nm.sqrt();
        Ok(&root * &root == nm && is_rational_prime(&root) && self.ring.is_inert(&root))
    }

    pub fn pow(&self, e: u32) -> RingElement {
        let mut acc = self.ring.one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Parse the textual syntax `a`, `a+b*i`, `a+b*w`, `a+b*s`.
    pub fn parse(ring: RingId, s: &str) -> Result<RingElement> {
        let err = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(err("empty element"));
        }
        let mut a = BigInt::zero();
        let mut b = BigInt::zero();
        // split into signed terms
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (i, ch) in text.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.is_empty() && !cur.ends_with(['+', '-', '*']) {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        for term in terms {
            let mut sign = BigInt::one();
            let mut body = term.as_str();
            while let Some(c) = body.chars().next() {
                match c {
                    '+' => body = &body[1..],
                    '-' => {
                        sign = -sign;
                        body = &body[1..];
                    }
                    _ => break,
                }
            }
            if body.is_empty() {
                return Err(err("dangling sign"));
            }
            let sym = body.chars().last().unwrap();
            if sym.is_ascii_digit() {
                let v: BigInt = body.parse().map_err(|_| err("bad integer"))?;
                a += sign * v;
                continue;
            }
            match ring.symbol() {
                Some(expected) if sym == expected => {}
                _ => return Err(err(&format!("unexpected symbol `{sym}` for {ring}"))),
            }
            let coef = &body[..body.len() - 1];
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let v: BigInt = if coef.is_empty() {
                BigInt::one()
            } else {
                coef.parse().map_err(|_| err("bad coefficient"))?
            };
            b += sign * v;
        }
        Ok(RingElement::new(ring, a, b))
    }
}

fn round_half_down(n: &BigInt, d: &BigInt) -> BigInt {
    // nearest integer to n/d (d > 0), ties toward −∞: ceil((2n − d) / 2d)
    let two = BigInt::from(2);
    let num = &two * n - d;
    let den = &two * d;
    -((-num).div_floor(&den))
}

/// Deterministic Miller–Rabin for the sizes that occur here (exact below 3.3·10²⁴).
pub fn is_rational_prime(n: &BigInt) -> bool {
    let n = match n.to_biguint() {
        Some(n) => n,
        None => return false,
    };
    let small = [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    if n < BigUint::from(2u32) {
        return false;
    }
    for &p in &small {
        let p = BigUint::from(p);
        if n == p {
            return true;
        }
        if (&n % &p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let nm1 = &n - &one;
    let mut d = nm1.clone();
    let mut s = 0;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &small {
        let mut x = BigUint::from(a).modpow(&d, &n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), &n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl<'a> Add<&'a RingElement> for &'a RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        debug_assert_eq!(self.ring, rhs.ring);
        RingElement::new(self.ring, &self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl<'a> Sub<&'a RingElement> for &'a RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        debug_assert_eq!(self.ring, rhs.ring);
        RingElement::new(self.ring, &self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl<'a> Mul<&'a RingElement> for &'a RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        debug_assert_eq!(self.ring, rhs.ring);
        let (a, b, c, d) = (&self.a, &self.b, &rhs.a, &rhs.b);
        match self.ring.theta_square() {
            None => RingElement::new(self.ring, a * c, BigInt::zero()),
            Some((s, t)) => {
                let bd = b * d;
                RingElement::new(
                    self.ring,
                    a * c + &bd * BigInt::from(s),
                    a * d + b * c + bd * BigInt::from(t),
                )
            }
        }
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement::new(self.ring, -&self.a, -&self.b)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.ring.symbol() {
            Some(s) if !self.b.is_zero() => s,
            _ => return write!(f, "{}", self.a),
        };
        let mag = self.b.abs();
        let theta = if mag.is_one() {
            sym.to_string()
        } else {
            format!("{mag}*{sym}")
        };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{theta}")
            } else {
                write!(f, "{theta}")
            }
        } else {
            let sign = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{}{sign}{theta}", self.a)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(ring: RingId, a: i64, b: i64) -> RingElement {
        RingElement::from_i64(ring, a, b)
    }

    #[test]
    fn norms() {
        assert_eq!(el(RingId::Gaussian, 1, 1).norm(), BigInt::from(2));
        assert_eq!(el(RingId::Eisenstein, 1, 4).norm(), BigInt::from(13));
        assert_eq!(el(RingId::Eisenstein, 3, 4).norm(), BigInt::from(13));
        assert!(el(RingId::SqrtMinusTwo, 0, 0).norm().is_zero());
    }

    #[test]
    fn divmod_examples() {
        let z = |a| el(RingId::Integers, a, 0);
        assert_eq!(z(7).divmod(&z(3)).unwrap(), (z(2), z(1)));

        let x = el(RingId::Gaussian, 5, 3);
        let y = el(RingId::Gaussian, 2, 0);
        let (q, r) = x.divmod(&y).unwrap();
        assert_eq!(&(&q * &y) + &r, x);
        assert!(r.norm() < y.norm());
        // 5/2 and 3/2 are both ties, rounded down
        assert_eq!(q, el(RingId::Gaussian, 2, 1));
        assert_eq!(r, el(RingId::Gaussian, 1, 1));

        for ring in RingId::ALL {
            let x = el(ring, 17, -9);
            assert_eq!(x.divmod(&ring.one()).unwrap(), (x.clone(), ring.zero()));
        }
        assert_eq!(x.divmod(&RingId::Gaussian.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn unit_groups() {
        assert_eq!(RingId::Gaussian.units().len(), 4);
        assert_eq!(RingId::Eisenstein.units().len(), 6);
        assert_eq!(RingId::SqrtMinusTwo.units().len(), 2);
        assert_eq!(RingId::Integers.units().len(), 2);
        for ring in RingId::ALL {
            let units = ring.units();
            for u in &units {
                assert!(u.is_unit());
                assert!(units.contains(&-u));
                for v in &units {
                    assert!(units.contains(&(u * v)));
                }
            }
            // every norm-1 element is listed
            let norm_one: Vec<_> = ring
                .elements_below_norm(2)
                .into_iter()
                .map(|(a, b)| el(ring, a, b))
                .filter(|x| x.is_unit())
                .collect();
            assert_eq!(norm_one.len(), units.len());
        }
    }

    #[test]
    fn primality() {
        assert!(el(RingId::Gaussian, 3, 0).is_prime().unwrap());
        assert!(el(RingId::Eisenstein, 1, 4).is_prime().unwrap());
        assert!(!el(RingId::Gaussian, 2, 0).is_prime().unwrap());
        assert!(el(RingId::Eisenstein, 2, 0).is_prime().unwrap());
        assert!(!el(RingId::Eisenstein, 7, 0).is_prime().unwrap());
        assert!(el(RingId::SqrtMinusTwo, 5, 0).is_prime().unwrap());
        assert!(!el(RingId::SqrtMinusTwo, 3, 0).is_prime().unwrap());
        assert!(el(RingId::Integers, -7, 0).is_prime().unwrap());
        assert!(!el(RingId::Integers, 9, 0).is_prime().unwrap());
        assert!(matches!(
            el(RingId::Gaussian, 0, 1).is_prime(),
            Err(Error::ZeroOrUnit(_))
        ));
        assert!(RingId::Gaussian.zero().is_prime().is_err());
    }

    #[test]
    fn minimal_norm() {
        let g = RingId::Gaussian.minimal_norm_primes();
        assert_eq!(g, vec![el(RingId::Gaussian, 1, 1)]);
        let s = RingId::SqrtMinusTwo.minimal_norm_primes();
        assert_eq!(s.len(), 1);
        assert!(s[0].is_associate(&el(RingId::SqrtMinusTwo, 0, 1)));
        assert_eq!(RingId::Integers.minimal_norm_primes(), vec![el(RingId::Integers, 2, 0)]);
        let e = RingId::Eisenstein.minimal_norm_primes();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].norm(), BigInt::from(3));
        for ring in RingId::ALL {
            for p in ring.minimal_norm_primes() {
                assert!(p.is_prime().unwrap());
            }
        }
    }

    #[test]
    fn parse_and_display() {
        let w = RingId::Eisenstein;
        assert_eq!(RingElement::parse(w, "1+4*w").unwrap(), el(w, 1, 4));
        assert_eq!(RingElement::parse(w, " 4*w + 1 ").unwrap(), el(w, 1, 4));
        assert_eq!(RingElement::parse(w, "-w").unwrap(), el(w, 0, -1));
        assert_eq!(RingElement::parse(w, "3+-2*w").unwrap(), el(w, 3, -2));
        assert_eq!(RingElement::parse(RingId::Integers, "-13").unwrap(), el(RingId::Integers, -13, 0));
        assert!(RingElement::parse(RingId::Gaussian, "1+2*w").is_err());
        assert!(RingElement::parse(RingId::Integers, "1+i").is_err());
        for (a, b) in [(0, 0), (1, 4), (-3, -1), (0, -2), (5, 1), (0, 1)] {
            let x = el(RingId::SqrtMinusTwo, a, b);
            assert_eq!(RingElement::parse(RingId::SqrtMinusTwo, &x.to_string()).unwrap(), x);
        }
        assert_eq!(el(w, 1, 4).to_string(), "1+4*w");
        assert_eq!(el(RingId::Gaussian, 1, -1).to_string(), "1-i");
    }

    #[test]
    fn scan_small_norms() {
        let ps = RingId::Gaussian.primes_up_to_norm(13);
        let norms: Vec<i64> = ps.iter().map(|p| p.norm().to_i64().unwrap()).collect();
        assert_eq!(norms, vec![2, 5, 5, 9, 13, 13]);
    }
}
