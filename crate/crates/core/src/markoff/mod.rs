//! Generalized Markoff triples as coordinates on Teichmüller space.
//!
//! A point is fixed by the traces `(x1, x2, x3)` of the curves with slopes
//! `1/0, 0/1, 1/1`. They satisfy
//!
//! ```text
//! x1^2 + x2^2 + x3^2 - x1 x2 x3 = kappa,   kappa = 2 - 2 cosh(l_delta / 2),
//! ```
//!
//! with every `x_i > 2`. Every other simple closed geodesic is reached by
//! Vieta moves `x_i -> x_j x_k - x_i` down the trivalent tree of triples.

mod oracle;
mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::farey::{other_companion, Slope};
use crate::geometry::length_from_trace;

pub use oracle::{christoffel_word, commutator_trace, fricke_oracle, FrickeRepresentation, Mat2};
pub use tree::{
    enumerate_geodesics, enumerate_geodesics_parallel, enumerate_neighbor_pairs, systole_record,
    Branch, BranchWalk, GeodesicStream, NeighborPair,
};

/// Lengths beyond this are rejected; the matching trace is about `1e130`.
pub const MAX_LENGTH: f64 = 600.0;

/// Relative tolerance for membership of a triple on the cubic.
pub const CUBIC_TOLERANCE: f64 = 1e-9;

/// Which root of the quadratic in `x3` to use for the seed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Root {
    #[default]
    Smaller,
    Larger,
}

/// Three pairwise once-meeting simple closed geodesics with their traces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FareyTriple {
    pub slopes: [Slope; 3],
    pub traces: [f64; 3],
}

impl FareyTriple {
    pub fn cubic_value(&self) -> f64 {
        let [a, b, c] = self.traces;
        a * a + b * b + c * c - a * b * c
    }

    /// Residual against `kappa`, scaled by the size of the largest monomial.
    pub fn cubic_residual(&self, kappa: f64) -> f64 {
        cubic_residual(self.traces, kappa)
    }
}

pub(crate) fn cubic_residual(x: [f64; 3], kappa: f64) -> f64 {
    let [a, b, c] = x;
    let scale = (a * a)
        .max(b * b)
        .max(c * c)
        .max((a * b * c).abs())
        .max(1.0);
    (a * a + b * b + c * c - a * b * c - kappa).abs() / scale
}

/// One simple closed geodesic at a surface point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicRecord {
    pub slope: Slope,
    pub trace: f64,
    pub length: f64,
}

impl GeodesicRecord {
    pub fn from_trace(slope: Slope, trace: f64) -> Result<GeodesicRecord> {
        Ok(GeodesicRecord {
            slope,
            trace,
            length: length_from_trace(trace)?,
        })
    }
}

/// A point of `T_1(l_delta)` in trace coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    boundary_length: f64,
    kappa: f64,
    seed: FareyTriple,
}

pub fn kappa_of_boundary(l_delta: f64) -> Result<f64> {
    if !(l_delta >= 0.0) || !l_delta.is_finite() {
        return Err(domain(format!(
            "boundary length must be finite and >= 0, got {l_delta}"
        )));
    }
    Ok(2.0 - 2.0 * (l_delta / 2.0).cosh())
}

impl SurfacePoint {
    /// Builds a point from all three seed traces, checking the cubic.
    pub fn from_traces(x1: f64, x2: f64, x3: f64, l_delta: f64) -> Result<SurfacePoint> {
        let kappa = kappa_of_boundary(l_delta)?;
        for x in [x1, x2, x3] {
            if !(x > 2.0) || !x.is_finite() {
                return Err(domain(format!("seed trace {x} is not in (2, inf)")));
            }
        }
        let residual = cubic_residual([x1, x2, x3], kappa);
        if residual > CUBIC_TOLERANCE {
            return Err(Error::CubicViolation(x1, x2, x3, residual));
        }
        Ok(SurfacePoint {
            boundary_length: l_delta,
            kappa,
            seed: FareyTriple {
                slopes: Slope::BASE_TRIANGLE,
                traces: [x1, x2, x3],
            },
        })
    }

    /// The punctured torus with all three seed traces equal to 3.
    pub fn hexagonal() -> SurfacePoint {
        SurfacePoint::from_traces(3.0, 3.0, 3.0, 0.0).expect("(3,3,3) lies on the Markoff cubic")
    }

    /// A point whose systole is the curve `1/0` of length `systole`.
    ///
    /// The crossing curves `0/1` and `1/1` are placed symmetrically on the
    /// twist orbit, so both have trace `2 cosh(systole/4) cosh(perp)` with
    /// `sinh(perp) sinh(systole/2) = cosh(l_delta/4)`.
    pub fn near_cusp(systole: f64, l_delta: f64) -> Result<SurfacePoint> {
        if !(systole > 0.0) || !systole.is_finite() {
            return Err(domain(format!("systole must be positive, got {systole}")));
        }
        let r = (l_delta / 4.0).cosh();
        let s2 = (systole / 2.0).sinh();
        let partner = (s2 * s2 + r * r).sqrt() / (systole / 4.0).sinh();
        // The crossing curves must be longer than the systole itself.
        let x1 = 2.0 * (systole / 2.0).cosh();
        if partner <= x1 {
            return Err(domain(format!(
                "length {systole} cannot be the systole: crossing curves have trace {partner} <= {x1}"
            )));
        }
        SurfacePoint::from_traces(x1, partner, partner, l_delta)
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary_length
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn seed(&self) -> &FareyTriple {
        &self.seed
    }

    pub fn traces(&self) -> [f64; 3] {
        self.seed.traces
    }

    /// `cosh(l_delta / 4)`, the constant appearing in every angle formula.
    pub fn boundary_factor(&self) -> f64 {
        (self.boundary_length / 4.0).cosh()
    }
}

/// Solves the cubic for `x3` given `x1, x2`.
pub fn make_surface_point(x1: f64, x2: f64, l_delta: f64, root: Root) -> Result<SurfacePoint> {
    let kappa = kappa_of_boundary(l_delta)?;
    for x in [x1, x2] {
        if !(x > 2.0) || !x.is_finite() {
            return Err(domain(format!("trace {x} is not in (2, inf)")));
        }
    }
    // x3^2 - x1 x2 x3 + (x1^2 + x2^2 - kappa) = 0
    let b = x1 * x2;
    let c = x1 * x1 + x2 * x2 - kappa;
    let discriminant = b * b - 4.0 * c;
    if !(discriminant >= 0.0) {
        return Err(Error::NoAdmissibleRoot { discriminant });
    }
    let sq = discriminant.sqrt();
    let larger = (b + sq) / 2.0;
    // Product of roots is c; avoids cancellation in (b - sq) / 2.
    let smaller = c / larger;
    let x3 = match root {
        Root::Smaller => smaller,
        Root::Larger => larger,
    };
    if !(x3 > 2.0) {
        return Err(Error::NoAdmissibleRoot { discriminant });
    }
    SurfacePoint::from_traces(x1, x2, x3, l_delta)
}

/// Replaces coordinate `i` by `x_j x_k - x_i` and slope `i` by the other
/// common neighbour of the remaining two slopes.
pub fn vieta_flip(t: &FareyTriple, i: usize) -> Result<FareyTriple> {
    if i > 2 {
        return Err(domain(format!("flip index {i} out of range")));
    }
    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
    let mut out = *t;
    out.traces[i] = t.traces[j] * t.traces[k] - t.traces[i];
    out.slopes[i] = other_companion(&t.slopes[j], &t.slopes[k], &t.slopes[i])?;
    Ok(out)
}

/// Trace of the simple closed geodesic with slope `s`.
///
/// Descends the Stern–Brocot tree from the seed edge `1/0, 0/1` (or
/// `-1/0, 0/1` for negative slopes), carrying the trace of the difference
/// class so every mediant comes from `tr(u + v) = tr u tr v - tr(u - v)`.
pub fn trace_of_slope(pt: &SurfacePoint, s: &Slope) -> Result<f64> {
    let [x1, x2, x3] = pt.seed.traces;
    if *s == Slope::INFINITY {
        return Ok(x1);
    }
    if *s == Slope::ZERO {
        return Ok(x2);
    }
    let (p, q) = (s.p(), s.q());
    let negative = p < 0;
    let target = (p.unsigned_abs() as u128, q as u128);

    // Oriented so that L = (1,0) or (-1,0) and R = (0,1) lie in the slope's quadrant.
    let (mut l, mut r) = ((1u128, 0u128), (0u128, 1u128));
    let (mut tl, mut tr) = (x1, x2);
    let (first_mediant, first_difference) = if negative {
        (x1 * x2 - x3, x3)
    } else {
        (x3, x1 * x2 - x3)
    };
    let mut td = first_difference;
    let mut tm = first_mediant;
    let mut first = true;
    let mut steps: u64 = 0;
    loop {
        let m = (l.0 + r.0, l.1 + r.1);
        if !first {
            tm = tl * tr - td;
        }
        first = false;
        if !tm.is_finite() || tm > 2.0 * (MAX_LENGTH / 2.0).cosh() {
            return Err(Error::Overflow {
                depth: steps.min(u32::MAX as u64) as u32,
                detail: format!("trace of slope {s} exceeds the representable range"),
            });
        }
        if m == target {
            return Ok(tm);
        }
        steps += 1;
        // target/q vs mediant ratio, compared by cross multiplication.
        if target.0 * m.1 < m.0 * target.1 {
            // target lies between M and R
            td = tl;
            l = m;
            tl = tm;
        } else {
            td = tr;
            r = m;
            tr = tm;
        }
    }
}
