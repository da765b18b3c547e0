//! Residue fields `F = R/(p)` with tabulated arithmetic, the unit image `U`
//! and the coset structure of `F×/U`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{RingElement, RingId};

/// Default upper bound on `q = |F|` for tabulated fields.
pub const DEFAULT_FIELD_CAP: u64 = 256;

/// A residue class, identified by its index in the owning context's element table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A ring, a prime of it, and the fully tabulated residue field.
#[derive(Clone, Debug)]
pub struct PrimeContext {
    ring: RingId,
    p: RingElement,
    q: usize,
    reps: Vec<RingElement>,
    lookup: HashMap<(i64, i64), Fe>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    units: Vec<Fe>,
    in_units: Vec<bool>,
    cosets: Vec<Vec<Fe>>,
    coset_of: Vec<u32>,
}

impl PrimeContext {
    pub fn new(ring: RingId, p: RingElement) -> Result<Self> {
        Self::with_cap(ring, p, DEFAULT_FIELD_CAP)
    }

    /// Build `R/(p)`.
    ///
    /// Every class has a member of norm `< norm(p)` (a Euclidean remainder), so
    /// scanning that ball in `(norm, a, b)` order meets each class first at its
    /// canonical representative: minimal norm, then lexicographically least.
    /// `|F| = norm(p)`, except over Z where the norm is `a²` and `|F| = |p|`.
    pub fn with_cap(ring: RingId, p: RingElement, cap: u64) -> Result<Self> {
        if p.ring() != ring {
            return Err(Error::InvalidParameter(format!("{p} is not an element of {ring}")));
        }
        if !p.is_prime()? {
            return Err(Error::NotPrime {
                element: p.to_string(),
                ring,
            });
        }
        let q = field_order(&p).to_u64().unwrap_or(u64::MAX);
        if q > cap {
            return Err(Error::FieldTooLarge { q, cap });
        }
        let q = q as usize;
        let norm_p = p.norm().to_i64().expect("norm fits after the cap check");

        let ball = ring.elements_below_norm(norm_p);
        let mut reps: Vec<RingElement> = Vec::with_capacity(q);
        let mut lookup: HashMap<(i64, i64), Fe> = HashMap::with_capacity(ball.len());
        let mut class_of_ball: Vec<usize> = Vec::with_capacity(ball.len());
        for &(a, b) in &ball {
            let x = RingElement::from_i64(ring, a, b);
            let found = reps.iter().position(|r| p.divides(&(&x - r)));
            let idx = match found {
                Some(i) => i,
                None => {
                    reps.push(x);
                    reps.len() - 1
                }
            };
            class_of_ball.push(idx);
        }
        assert_eq!(reps.len(), q, "residue field of {p} has the wrong order");

        // indices 0 and 1 are the classes of 0 and 1, the rest follow discovery order
        let class_zero = class_of_ball[ball.iter().position(|&c| c == (0, 0)).unwrap()];
        let class_one = class_of_ball[ball.iter().position(|&c| c == (1, 0)).unwrap()];
        let mut order: Vec<usize> = vec![class_zero, class_one];
        order.extend((0..q).filter(|&c| c != class_zero && c != class_one));
        let mut renumber = vec![0u32; q];
        for (new, &old) in order.iter().enumerate() {
            renumber[old] = new as u32;
        }
        let reps: Vec<RingElement> = order.iter().map(|&old| reps[old].clone()).collect();
        for (&(a, b), &c) in ball.iter().zip(&class_of_ball) {
            lookup.insert((a, b), Fe(renumber[c]));
        }

        let mut ctx = PrimeContext {
            ring,
            p,
            q,
            reps,
            lookup,
            add: Vec::new(),
            mul: Vec::new(),
            neg: Vec::new(),
            inv: Vec::new(),
            units: Vec::new(),
            in_units: Vec::new(),
            cosets: Vec::new(),
            coset_of: Vec::new(),
        };
        ctx.tabulate();
        Ok(ctx)
    }

    /// Parse ring and prime from CLI-style strings.
    pub fn parse(ring: &str, p: &str) -> Result<Self> {
        let ring: RingId = ring.parse()?;
        Self::new(ring, RingElement::parse(ring, p)?)
    }

    fn tabulate(&mut self) {
        let q = self.q;
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        for i in 0..q {
            for j in i..q {
                let s = self.reduce(&(&self.reps[i] + &self.reps[j])).0;
                let m = self.reduce(&(&self.reps[i] * &self.reps[j])).0;
                add[i * q + j] = s;
                add[j * q + i] = s;
                mul[i * q + j] = m;
                mul[j * q + i] = m;
            }
        }
        let mut neg = vec![0u32; q];
        let mut inv = vec![0u32; q];
        for i in 0..q {
            neg[i] = (0..q).find(|&j| add[i * q + j] == 0).unwrap() as u32;
            if i != 0 {
                inv[i] = (0..q).find(|&j| mul[i * q + j] == 1).unwrap() as u32;
            }
        }
        self.add = add;
        self.mul = mul;
        self.neg = neg;
        self.inv = inv;

        let mut units: Vec<Fe> = self.ring.units().iter().map(|u| self.reduce(u)).collect();
        units.sort();
        units.dedup();
        let mut in_units = vec![false; q];
        for u in &units {
            in_units[u.idx()] = true;
        }
        let mut coset_of = vec![u32::MAX; q];
        let mut cosets: Vec<Vec<Fe>> = Vec::new();
        for x in 1..q {
            if coset_of[x] != u32::MAX {
                continue;
            }
            let mut c: Vec<Fe> = units.iter().map(|&u| self.mul(Fe(x as u32), u)).collect();
            c.sort();
            for y in &c {
                coset_of[y.idx()] = cosets.len() as u32;
            }
            cosets.push(c);
        }
        self.units = units;
        self.in_units = in_units;
        self.cosets = cosets;
        self.coset_of = coset_of;
    }

    pub fn ring(&self) -> RingId {
        self.ring
    }

    pub fn p(&self) -> &RingElement {
        &self.p
    }

    /// `|F|`.
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q as u32).map(Fe)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fe> {
        (1..self.q as u32).map(Fe)
    }

    /// Canonical representative in R of a residue class.
    pub fn rep(&self, x: Fe) -> &RingElement {
        &self.reps[x.idx()]
    }

    pub fn representatives(&self) -> &[RingElement] {
        &self.reps
    }

    /// The reduction map `R → F`.
    pub fn reduce(&self, x: &RingElement) -> Fe {
        let (_, r) = x.divmod(&self.p).expect("p is nonzero");
        let key = r.small().expect("remainder coordinates are small");
        self.lookup[&key]
    }

    pub fn from_int(&self, n: i64) -> Fe {
        self.reduce(&RingElement::from_i64(self.ring, n, 0))
    }

    #[inline]
    pub fn add(&self, x: Fe, y: Fe) -> Fe {
        Fe(self.add[x.idx() * self.q + y.idx()])
    }

    #[inline]
    pub fn mul(&self, x: Fe, y: Fe) -> Fe {
        Fe(self.mul[x.idx() * self.q + y.idx()])
    }

    #[inline]
    pub fn neg(&self, x: Fe) -> Fe {
        Fe(self.neg[x.idx()])
    }

    #[inline]
    pub fn sub(&self, x: Fe, y: Fe) -> Fe {
        self.add(x, self.neg(y))
    }

    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, x: Fe) -> Fe {
        assert!(!x.is_zero(), "inverse of zero");
        Fe(self.inv[x.idx()])
    }

    #[inline]
    pub fn div(&self, x: Fe, y: Fe) -> Fe {
        self.mul(x, self.inv(y))
    }

    pub fn pow(&self, x: Fe, e: u64) -> Fe {
        let mut acc = Fe::ONE;
        for _ in 0..e {
            acc = self.mul(acc, x);
        }
        acc
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, x: Fe) -> usize {
        assert!(!x.is_zero());
        let mut y = x;
        let mut k = 1;
        while y != Fe::ONE {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    /// The unit image `U ⊆ F×`, sorted by index.
    pub fn unit_image(&self) -> &[Fe] {
        &self.units
    }

    #[inline]
    pub fn is_unit_image(&self, x: Fe) -> bool {
        self.in_units[x.idx()]
    }

    /// Nonzero and outside `U`.
    #[inline]
    pub fn is_nonunit_class(&self, x: Fe) -> bool {
        !x.is_zero() && !self.in_units[x.idx()]
    }

    pub fn is_full_unit_image(&self) -> bool {
        self.units.len() == self.q - 1
    }

    /// The cosets of `F×/U`, each sorted, ordered by least element.
    pub fn cosets(&self) -> &[Vec<Fe>] {
        &self.cosets
    }

    /// Index of the coset of a nonzero element.
    #[inline]
    pub fn coset_index(&self, x: Fe) -> usize {
        debug_assert!(!x.is_zero());
        self.coset_of[x.idx()] as usize
    }

    /// Least element of the coset containing `x`; the chosen transversal.
    #[inline]
    pub fn coset_rep(&self, x: Fe) -> Fe {
        self.cosets[self.coset_index(x)][0]
    }

    /// `|F×/U|`.
    pub fn coset_count(&self) -> usize {
        self.cosets.len()
    }

    /// The U-orbits on F: `{0}` followed by the cosets.
    pub fn orbits(&self) -> Vec<Vec<Fe>> {
        let mut out = vec![vec![Fe::ZERO]];
        out.extend(self.cosets.iter().cloned());
        out
    }

    /// `|F/U|`, the number of U-orbits on F.
    pub fn orbit_count(&self) -> usize {
        self.cosets.len() + 1
    }

    /// Human-readable form of a residue class (its canonical representative).
    pub fn show(&self, x: Fe) -> String {
        self.rep(x).to_string()
    }

    pub fn q_big(&self) -> BigInt {
        BigInt::from(self.q)
    }
}

/// `|R/(p)|` for a prime `p`.
pub fn field_order(p: &RingElement) -> BigInt {
    match p.ring() {
        RingId::Integers => p.a().magnitude().clone().into(),
        _ => p.norm(),
    }
}

/// One context per prime, up to associates, of every supported ring with `q ≤ q_max`.
pub fn contexts_up_to(q_max: usize) -> Vec<PrimeContext> {
    let mut out = Vec::new();
    for ring in RingId::ALL {
        let bound = match ring {
            RingId::Integers => (q_max * q_max) as i64,
            _ => q_max as i64,
        };
        for p in ring.primes_up_to_norm(bound) {
            if field_order(&p) <= BigInt::from(q_max) {
                out.push(PrimeContext::with_cap(ring, p, q_max as u64).expect("prime of small norm"));
            }
        }
    }
    out
}
