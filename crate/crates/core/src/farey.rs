//! Simple closed curves on the one-holed torus, labelled by slopes.
//!
//! A simple closed curve is determined by its primitive homology class
//! `(p, q)` up to sign. Two curves meet once exactly when their slopes are
//! Farey neighbours, and the mapping class group acts through `SL(2, Z)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// An unoriented primitive homology class.
///
/// Always stored normalized: `gcd(|p|, |q|) = 1` and either `q > 0`, or
/// `q = 0` and `p = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    pub const INFINITY: Slope = Slope { p: 1, q: 0 };
    pub const ZERO: Slope = Slope { p: 0, q: 1 };
    pub const ONE: Slope = Slope { p: 1, q: 1 };

    /// The three slopes of the seed triangle, in seed order.
    pub const BASE_TRIANGLE: [Slope; 3] = [Slope::INFINITY, Slope::ZERO, Slope::ONE];

    pub fn new(p: i64, q: i64) -> Result<Slope> {
        normalize_slope(p, q)
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// Signed determinant `p1 q2 - p2 q1` of the chosen representatives.
    pub fn det(&self, other: &Slope) -> i128 {
        self.p as i128 * other.q as i128 - other.p as i128 * self.q as i128
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = Error;

    /// Parses `p/q`; `1/0` is the slope at infinity.
    fn from_str(s: &str) -> Result<Slope> {
        let (p, q) = s
            .split_once('/')
            .ok_or_else(|| domain(format!("slope `{s}` is not of the form p/q")))?;
        let p = p
            .trim()
            .parse::<i64>()
            .map_err(|e| domain(format!("slope numerator `{p}`: {e}")))?;
        let q = q
            .trim()
            .parse::<i64>()
            .map_err(|e| domain(format!("slope denominator `{q}`: {e}")))?;
        normalize_slope(p, q)
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

fn normalize_wide(p: i128, q: i128) -> Result<Slope> {
    if p == 0 && q == 0 {
        return Err(domain("the zero vector is not a slope"));
    }
    let g = gcd(p, q);
    let (mut p, mut q) = (p / g, q / g);
    if q < 0 || (q == 0 && p < 0) {
        p = -p;
        q = -q;
    }
    let p = i64::try_from(p).map_err(|_| Error::IntegerOverflow)?;
    let q = i64::try_from(q).map_err(|_| Error::IntegerOverflow)?;
    Ok(Slope { p, q })
}

/// The normalized primitive representative of the line through `(p, q)`.
pub fn normalize_slope(p: i64, q: i64) -> Result<Slope> {
    normalize_wide(p as i128, q as i128)
}

/// Geometric intersection number `|p1 q2 - p2 q1|`.
///
/// Saturates at `u64::MAX`, which is only reachable for components beyond
/// 32 bits.
pub fn intersection_number(s1: &Slope, s2: &Slope) -> u64 {
    u64::try_from(s1.det(s2).unsigned_abs()).unwrap_or(u64::MAX)
}

pub fn is_farey_neighbor(s1: &Slope, s2: &Slope) -> bool {
    intersection_number(s1, s2) == 1
}

/// The two common Farey neighbours of a neighbouring pair: the mediant
/// `s1 + s2` and the difference `s1 - s2` (each normalized).
pub fn farey_children(s1: &Slope, s2: &Slope) -> Result<(Slope, Slope)> {
    let i = intersection_number(s1, s2);
    if i != 1 {
        return Err(Error::NotNeighbors(
            s1.to_string(),
            s2.to_string(),
            i.min(i64::MAX as u64) as i64,
        ));
    }
    let (p1, q1, p2, q2) = (s1.p as i128, s1.q as i128, s2.p as i128, s2.q as i128);
    Ok((
        normalize_wide(p1 + p2, q1 + q2)?,
        normalize_wide(p1 - p2, q1 - q2)?,
    ))
}

/// The common neighbour of `s1, s2` other than `known`.
pub(crate) fn other_companion(s1: &Slope, s2: &Slope, known: &Slope) -> Result<Slope> {
    let (m, d) = farey_children(s1, s2)?;
    if m == *known {
        Ok(d)
    } else if d == *known {
        Ok(m)
    } else {
        Err(domain(format!(
            "{known} is not a common neighbour of {s1} and {s2}"
        )))
    }
}

/// An orientation preserving mapping class, acting on homology as an
/// integer matrix `[[a, b], [c, d]]` of determinant one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MappingClass {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl MappingClass {
    pub const IDENTITY: MappingClass = MappingClass {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };

    /// The order-four rotation; its square is `-I`, which fixes every slope.
    pub const ROTATION: MappingClass = MappingClass {
        a: 0,
        b: -1,
        c: 1,
        d: 0,
    };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<MappingClass> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return Err(domain(format!(
                "matrix [[{a}, {b}], [{c}, {d}]] has determinant {det}, expected 1"
            )));
        }
        Ok(MappingClass { a, b, c, d })
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// The Dehn twist about `gamma`: `x -> x + det(gamma, x) gamma`.
    ///
    /// The formula is quadratic in `gamma`, so it does not depend on the
    /// sign of the representative.
    pub fn dehn_twist(gamma: &Slope) -> Result<MappingClass> {
        let (p, q) = (gamma.p as i128, gamma.q as i128);
        let to64 = |v: i128| i64::try_from(v).map_err(|_| Error::IntegerOverflow);
        MappingClass::new(
            to64(1 - p * q)?,
            to64(p * p)?,
            to64(-q * q)?,
            to64(1 + p * q)?,
        )
    }

    /// A matrix whose first column is `mu` and whose second column is a
    /// vector `nu` with `det(mu, nu) = 1`, i.e. sends `1/0 -> mu`,
    /// `0/1 -> nu` and `1/1 -> mu + nu`.
    pub fn frame(mu: &Slope) -> Result<MappingClass> {
        let (g, x, y) = ext_gcd(mu.p as i128, mu.q as i128);
        debug_assert_eq!(g, 1);
        // x p + y q = 1, so nu = (-y, x) has det(mu, nu) = p x + q y = 1.
        let to64 = |v: i128| i64::try_from(v).map_err(|_| Error::IntegerOverflow);
        MappingClass::new(mu.p, to64(-y)?, mu.q, to64(x)?)
    }

    pub fn inverse(&self) -> MappingClass {
        MappingClass {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn compose(&self, other: &MappingClass) -> Result<MappingClass> {
        let m = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            let v = x as i128 * y as i128 + z as i128 * w as i128;
            i64::try_from(v).map_err(|_| Error::IntegerOverflow)
        };
        Ok(MappingClass {
            a: m(self.a, other.a, self.b, other.c)?,
            b: m(self.a, other.b, self.b, other.d)?,
            c: m(self.c, other.a, self.d, other.c)?,
            d: m(self.c, other.b, self.d, other.d)?,
        })
    }

    /// Image of the oriented vector `(p, q)`, without normalization.
    pub fn apply_vector(&self, p: i64, q: i64) -> Result<(i64, i64)> {
        let (p, q) = (p as i128, q as i128);
        let np = self.a as i128 * p + self.b as i128 * q;
        let nq = self.c as i128 * p + self.d as i128 * q;
        Ok((
            i64::try_from(np).map_err(|_| Error::IntegerOverflow)?,
            i64::try_from(nq).map_err(|_| Error::IntegerOverflow)?,
        ))
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

pub fn apply_mapping_class(g: &MappingClass, s: &Slope) -> Result<Slope> {
    let (p, q) = (s.p as i128, s.q as i128);
    normalize_wide(
        g.a as i128 * p + g.b as i128 * q,
        g.c as i128 * p + g.d as i128 * q,
    )
}

/// All normalized slopes with `|p| <= bound` and `q <= bound`, by direct
/// coprimality test.
pub fn slopes_in_box(bound: i64) -> Vec<Slope> {
    let mut out = Vec::new();
    for q in 0..=bound {
        for p in -bound..=bound {
            if gcd(p as i128, q as i128) == 1 {
                if let Ok(s) = normalize_slope(p, q) {
                    if s.p == p && s.q == q {
                        out.push(s);
                    }
                }
            }
        }
    }
    out
}
