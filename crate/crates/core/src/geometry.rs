//! Hyperbolic trigonometry on the one-holed torus.
//!
//! Two once-meeting geodesics `alpha, beta` together with either common
//! neighbour `gamma` satisfy
//!
//! ```text
//! cos(angle) = (cosh a cosh b - cosh c) / (sinh a sinh b),   a = l_alpha / 2, ...
//! sinh a sinh b sin(angle) = cosh(l_delta / 4)
//! ```
//!
//! The two neighbours give supplementary angles. Angles are evaluated as
//! `atan2(cosh(l_delta/4), cosh a cosh b - cosh c)`, which is exact in both
//! relations on the cubic and stays accurate for small angles.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::farey::{
    apply_mapping_class, intersection_number, normalize_slope, MappingClass, Slope,
};
use crate::markoff::{
    cubic_residual, kappa_of_boundary, trace_of_slope, GeodesicRecord, SurfacePoint,
};

/// Tolerance for traces fed to the angle formulas.
pub const ANGLE_CUBIC_TOLERANCE: f64 = 1e-6;

/// Slack allowed on a cosine before it is treated as a logic error.
pub const COSINE_SLACK: f64 = 1e-12;

/// Relative size of `sinh^2 a sinh^2 b - cosh^2(l_delta/4)` below which the
/// angle differential is taken to be on its singular locus.
pub const SINGULAR_TOLERANCE: f64 = 1e-10;

/// Central-difference step for twist derivatives.
pub const TWIST_STEP: f64 = 1e-4;

pub fn length_from_trace(x: f64) -> Result<f64> {
    if !(x > 2.0) || !x.is_finite() {
        return Err(domain(format!("trace {x} is not in (2, inf)")));
    }
    if x < 4.0 {
        // sinh(l/2) = sqrt(x^2/4 - 1); x - 2 is exact here.
        Ok(2.0 * (((x - 2.0) * (x + 2.0)).sqrt() / 2.0).asinh())
    } else {
        Ok(2.0 * (x / 2.0).acosh())
    }
}

pub fn trace_from_length(l: f64) -> Result<f64> {
    if !(l > 0.0) {
        return Err(domain(format!("length {l} is not positive")));
    }
    let x = 2.0 * (l / 2.0).cosh();
    if !x.is_finite() {
        return Err(domain(format!("length {l} overflows the trace")));
    }
    Ok(x)
}

/// `cosh(l/2)` and `sinh(l/2)` from a trace, without going through `l`.
fn half_hyperbolic(x: f64) -> (f64, f64) {
    let c = x / 2.0;
    (c, ((c - 1.0) * (c + 1.0)).sqrt())
}

/// The angle at the intersection of two once-meeting geodesics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnglePair {
    pub alpha: GeodesicRecord,
    pub beta: GeodesicRecord,
    /// Trace of the common neighbour used on the opposite side.
    pub third_trace: f64,
    pub angle: f64,
    /// `min(angle, pi - angle)`, kept separately because `pi - angle` loses
    /// the low bits of a small supplement.
    pub acute: f64,
    /// `cosh(l_delta / 4)`.
    pub boundary_factor: f64,
}

impl AnglePair {
    /// `|cos(angle) - (cosh a cosh b - cosh c)/(sinh a sinh b)|`.
    pub fn cosine_residual(&self) -> f64 {
        let (ca, sa) = half_hyperbolic(self.alpha.trace);
        let (cb, sb) = half_hyperbolic(self.beta.trace);
        (self.angle.cos() - (ca * cb - self.third_trace / 2.0) / (sa * sb)).abs()
    }

    /// Relative residual of `sinh^2 a sinh^2 b sin^2(angle) = cosh^2(l_delta/4)`.
    pub fn sines_residual(&self) -> f64 {
        let (_, sa) = half_hyperbolic(self.alpha.trace);
        let (_, sb) = half_hyperbolic(self.beta.trace);
        let r2 = self.boundary_factor * self.boundary_factor;
        let lhs = sa * sa * sb * sb * self.acute.sin().powi(2);
        (lhs - r2).abs() / r2
    }
}

/// Angle between curves with traces `a_tr, b_tr` whose common neighbour on
/// the far side has trace `c_tr`. The records are labelled `1/0` and `0/1`;
/// use [`angle_between`] to keep real slopes.
pub fn angle_cosine_rule(a_tr: f64, b_tr: f64, c_tr: f64, l_delta: f64) -> Result<AnglePair> {
    let kappa = kappa_of_boundary(l_delta)?;
    for x in [a_tr, b_tr, c_tr] {
        if !(x > 2.0) || !x.is_finite() {
            return Err(domain(format!("trace {x} is not in (2, inf)")));
        }
    }
    let residual = cubic_residual([a_tr, b_tr, c_tr], kappa);
    if residual > ANGLE_CUBIC_TOLERANCE {
        return Err(Error::CubicViolation(a_tr, b_tr, c_tr, residual));
    }
    let (ca, sa) = half_hyperbolic(a_tr);
    let (cb, sb) = half_hyperbolic(b_tr);
    let r = (l_delta / 4.0).cosh();
    let num = ca * cb - c_tr / 2.0;
    let cos = num / (sa * sb);
    if cos.abs() > 1.0 + COSINE_SLACK {
        return Err(Error::Numeric(format!("cosine {cos} outside [-1, 1]")));
    }
    let angle = r.atan2(num);
    if !(angle > 0.0 && angle < std::f64::consts::PI) {
        return Err(domain(format!("degenerate triangle with angle {angle}")));
    }
    Ok(AnglePair {
        alpha: GeodesicRecord::from_trace(Slope::INFINITY, a_tr)?,
        beta: GeodesicRecord::from_trace(Slope::ZERO, b_tr)?,
        third_trace: c_tr,
        angle,
        acute: r.atan2(num.abs()),
        boundary_factor: r,
    })
}

/// The angle between once-meeting `alpha` and `beta` on the side facing
/// `third`, one of their two common neighbours.
pub fn angle_between(
    pt: &SurfacePoint,
    alpha: &Slope,
    beta: &Slope,
    third: &Slope,
) -> Result<AnglePair> {
    let i = intersection_number(alpha, beta);
    if i != 1 {
        return Err(Error::NotNeighbors(
            alpha.to_string(),
            beta.to_string(),
            i.min(i64::MAX as u64) as i64,
        ));
    }
    if intersection_number(alpha, third) != 1 || intersection_number(beta, third) != 1 {
        return Err(domain(format!(
            "{third} is not a common neighbour of {alpha} and {beta}"
        )));
    }
    let mut pair = angle_cosine_rule(
        trace_of_slope(pt, alpha)?,
        trace_of_slope(pt, beta)?,
        trace_of_slope(pt, third)?,
        pt.boundary_length(),
    )?;
    pair.alpha.slope = *alpha;
    pair.beta.slope = *beta;
    Ok(pair)
}

/// `arcsin(cosh(l_delta/4) / (sinh a sinh b))`, the acute angle.
pub fn angle_arcsin(a_tr: f64, b_tr: f64, l_delta: f64) -> Result<f64> {
    for x in [a_tr, b_tr] {
        if !(x > 2.0) || !x.is_finite() {
            return Err(domain(format!("trace {x} is not in (2, inf)")));
        }
    }
    let (_, sa) = half_hyperbolic(a_tr);
    let (_, sb) = half_hyperbolic(b_tr);
    let arg = (l_delta / 4.0).cosh() / (sa * sb);
    if arg > 1.0 + COSINE_SLACK {
        return Err(domain(format!(
            "sine {arg} exceeds 1: no acute angle for these lengths"
        )));
    }
    Ok(arg.min(1.0).asin())
}

/// First-order change of the acute angle when the two lengths change by
/// `dl_alpha, dl_beta`:
///
/// ```text
/// -cosh(l_delta/4) (coth a dl_alpha + coth b dl_beta) / (2 sqrt(sinh^2 a sinh^2 b - cosh^2(l_delta/4)))
/// ```
///
/// Zero on the locus where the angle is a right angle.
pub fn angle_differential(a_tr: f64, b_tr: f64, l_delta: f64, dl_alpha: f64, dl_beta: f64) -> f64 {
    let (ca, sa) = half_hyperbolic(a_tr);
    let (cb, sb) = half_hyperbolic(b_tr);
    let r2 = (l_delta / 4.0).cosh().powi(2);
    let gap = sa * sa * sb * sb - r2;
    if gap < SINGULAR_TOLERANCE * r2 {
        return 0.0;
    }
    -r2.sqrt() * (ca / sa * dl_alpha + cb / sb * dl_beta) / (2.0 * gap.sqrt())
}

/// As [`angle_differential`], for the angle facing the neighbour with trace
/// `c_tr`; negates the acute value on the obtuse side.
pub fn angle_differential_signed(
    a_tr: f64,
    b_tr: f64,
    c_tr: f64,
    l_delta: f64,
    dl_alpha: f64,
    dl_beta: f64,
) -> f64 {
    let (ca, sa) = half_hyperbolic(a_tr);
    let (cb, sb) = half_hyperbolic(b_tr);
    let r = (l_delta / 4.0).cosh();
    let num = ca * cb - c_tr / 2.0;
    if num.abs() < SINGULAR_TOLERANCE.sqrt() * r {
        return 0.0;
    }
    -r * (ca / sa * dl_alpha + cb / sb * dl_beta) / (2.0 * num)
}

/// Lengths of the curves `T^n gamma'` obtained by twisting `gamma'` along
/// `gamma`: `cosh(l_n / 2) = cosh(n l_gamma / 2 + theta) cosh(perp)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistOrbit {
    pub gamma: GeodesicRecord,
    pub gamma_prime: GeodesicRecord,
    /// Length of the common perpendicular, `sinh(perp) sinh(l_gamma/2) = cosh(l_delta/4)`.
    pub perp: f64,
    pub theta: f64,
}

pub fn twist_orbit(pt: &SurfacePoint, gamma: &Slope, gamma_prime: &Slope) -> Result<TwistOrbit> {
    let i = intersection_number(gamma, gamma_prime);
    if i != 1 {
        return Err(Error::NotNeighbors(
            gamma.to_string(),
            gamma_prime.to_string(),
            i.min(i64::MAX as u64) as i64,
        ));
    }
    let g = GeodesicRecord::from_trace(*gamma, trace_of_slope(pt, gamma)?)?;
    let gp = GeodesicRecord::from_trace(*gamma_prime, trace_of_slope(pt, gamma_prime)?)?;
    let next = apply_mapping_class(&MappingClass::dehn_twist(gamma)?, gamma_prime)?;
    let y0 = gp.trace;
    let y1 = trace_of_slope(pt, &next)?;
    let (ch, sh) = half_hyperbolic(g.trace);
    let perp = (pt.boundary_factor() / sh).asinh();
    let cp = perp.cosh();
    if y0 / 2.0 < cp * (1.0 - 1e-12) {
        return Err(Error::Numeric(format!(
            "orbit inconsistency: cosh(l/2) = {} below cosh(perp) = {cp}",
            y0 / 2.0
        )));
    }
    let theta = ((y1 - ch * y0) / (2.0 * cp * sh)).asinh();
    let check = theta.cosh() * cp;
    if (check - y0 / 2.0).abs() > 1e-8 * y0 {
        return Err(Error::Numeric(format!(
            "orbit inconsistency: cosh(theta) cosh(perp) = {check}, expected {}",
            y0 / 2.0
        )));
    }
    Ok(TwistOrbit {
        gamma: g,
        gamma_prime: gp,
        perp,
        theta,
    })
}

impl TwistOrbit {
    /// Trace after twisting a distance `s` along `gamma`; a full Dehn twist
    /// is `s = l_gamma`.
    pub fn trace_at(&self, s: f64) -> f64 {
        2.0 * (s / 2.0 + self.theta).cosh() * self.perp.cosh()
    }

    pub fn length_at(&self, s: f64) -> f64 {
        2.0 * ((s / 2.0 + self.theta).cosh() * self.perp.cosh()).acosh()
    }

    pub fn orbit_length(&self, n: i64) -> f64 {
        self.length_at(n as f64 * self.gamma.length)
    }

    /// The slope `T^n gamma'`.
    pub fn orbit_slope(&self, n: i64) -> Result<Slope> {
        let (g, x) = (self.gamma.slope, self.gamma_prime.slope);
        let k = n as i128 * g.det(&x);
        let p = x.p() as i128 + k * g.p() as i128;
        let q = x.q() as i128 + k * g.q() as i128;
        normalize_slope(
            i64::try_from(p).map_err(|_| Error::IntegerOverflow)?,
            i64::try_from(q).map_err(|_| Error::IntegerOverflow)?,
        )
    }

    /// Twist distance at which `gamma'` is shortest.
    pub fn minimizer(&self) -> f64 {
        -2.0 * self.theta
    }

    /// Relative residual of `sinh(perp) sinh(l_gamma/2) = cosh(l_delta/4)`.
    pub fn perp_residual(&self, l_delta: f64) -> f64 {
        let r = (l_delta / 4.0).cosh();
        (self.perp.sinh() * (self.gamma.length / 2.0).sinh() - r).abs() / r
    }
}

/// The Fenchel–Nielsen twist flow along `mu`, acting on trace coordinates.
///
/// The frame `g` sends `1/0 -> mu`; in pulled-back coordinates the flow
/// fixes the trace of `1/0` and moves `0/1` and `1/1` along their twist
/// orbit, which keeps the point on the cubic. Short curves come out of the
/// pulled-back descent as differences of products of order `tr mu`, so the
/// relative accuracy degrades like `tr(mu)^2` times machine precision.
#[derive(Clone, Copy, Debug)]
pub struct TwistFlow {
    frame_inverse: MappingClass,
    orbit: TwistOrbit,
    l_delta: f64,
}

impl TwistFlow {
    pub fn new(pt: &SurfacePoint, mu: &Slope) -> Result<TwistFlow> {
        let frame = MappingClass::frame(mu)?;
        let [_, b, _, d] = frame.entries();
        let first = twist_orbit(pt, mu, &normalize_slope(b, d)?)?;
        // Move the second column to the shortest crossing curve, which keeps
        // the pulled-back seed traces small.
        let k = (first.minimizer() / first.gamma.length).round() as i64;
        let frame = frame.compose(&MappingClass::new(1, k, 0, 1)?)?;
        let [_, b, _, d] = frame.entries();
        Ok(TwistFlow {
            frame_inverse: frame.inverse(),
            orbit: twist_orbit(pt, mu, &normalize_slope(b, d)?)?,
            l_delta: pt.boundary_length(),
        })
    }

    pub fn orbit(&self) -> &TwistOrbit {
        &self.orbit
    }

    /// The point twisted by distance `s`, in the pulled-back coordinates.
    pub fn point_at(&self, s: f64) -> Result<SurfacePoint> {
        let o = &self.orbit;
        SurfacePoint::from_traces(
            o.gamma.trace,
            o.trace_at(s),
            o.trace_at(s + o.gamma.length),
            self.l_delta,
        )
    }

    pub fn length_at(&self, alpha: &Slope, s: f64) -> Result<f64> {
        let pulled = apply_mapping_class(&self.frame_inverse, alpha)?;
        length_from_trace(trace_of_slope(&self.point_at(s)?, &pulled)?)
    }

    /// `d l_alpha / ds` at `s = 0` by central differences.
    pub fn length_derivative(&self, alpha: &Slope) -> Result<f64> {
        let h = TWIST_STEP;
        Ok((self.length_at(alpha, h)? - self.length_at(alpha, -h)?) / (2.0 * h))
    }
}

/// Twist derivative of a once-meeting pair against the cosine of their angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WolpertCheck {
    /// `cos` of the angle facing `T_gamma(gamma')`.
    pub analytic: f64,
    /// `d l_{gamma'} / ds` at `s = 0` along the twist about `gamma`.
    pub finite_diff: f64,
}

impl WolpertCheck {
    pub fn discrepancy(&self) -> f64 {
        (self.analytic.abs() - self.finite_diff.abs()).abs()
    }
}

/// With positive twists oriented as in [`TwistOrbit`], `finite_diff` is
/// `-analytic`.
pub fn wolpert_derivative_check(
    pt: &SurfacePoint,
    gamma: &Slope,
    gamma_prime: &Slope,
) -> Result<WolpertCheck> {
    let orbit = twist_orbit(pt, gamma, gamma_prime)?;
    let next = orbit.orbit_slope(1)?;
    let pair = angle_between(pt, gamma, gamma_prime, &next)?;
    let h = TWIST_STEP;
    Ok(WolpertCheck {
        analytic: pair.angle.cos(),
        finite_diff: (orbit.length_at(h) - orbit.length_at(-h)) / (2.0 * h),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markoff::{make_surface_point, Root};
    use std::f64::consts::PI;

    fn s(p: i64, q: i64) -> Slope {
        normalize_slope(p, q).unwrap()
    }

    #[test]
    fn trace_length_pair() {
        assert!((length_from_trace(3.0).unwrap() - 1.9248473002384139).abs() < 1e-14);
        for x in [2.001, 3.0, 100.0] {
            let back = trace_from_length(length_from_trace(x).unwrap()).unwrap();
            assert!((back - x).abs() < 1e-12 * x);
        }
        assert!(length_from_trace(2.0 + 1e-12).unwrap() < 1e-5);
        assert!(length_from_trace(2.0).is_err());
        assert!(trace_from_length(0.0).is_err());
    }

    #[test]
    fn hexagonal_angles() {
        let acute = angle_cosine_rule(3.0, 3.0, 3.0, 0.0).unwrap();
        assert!((acute.angle - 0.6f64.acos()).abs() < 1e-15);
        let obtuse = angle_cosine_rule(3.0, 3.0, 6.0, 0.0).unwrap();
        assert!((obtuse.angle - (PI - 0.6f64.acos())).abs() < 1e-15);
        assert!((angle_arcsin(3.0, 3.0, 0.0).unwrap() - 0.8f64.asin()).abs() < 1e-15);
        assert!(acute.sines_residual() < 1e-15);
        assert!(acute.cosine_residual() < 1e-15);
    }

    #[test]
    fn arcsin_matches_cosine_rule_when_acute() {
        let v = angle_arcsin(6.0, 15.0, 0.0).unwrap();
        let expect = (1.0 / ((3f64.acosh()).sinh() * (7.5f64.acosh()).sinh())).asin();
        assert!((v - expect).abs() < 1e-15);
        let c = angle_cosine_rule(6.0, 15.0, 3.0, 0.0).unwrap();
        assert!(c.angle < PI / 2.0);
        assert!((c.angle - v).abs() < 1e-12);
        // sinh a sinh b = cosh(l_delta/4) gives a right angle
        let x = 2.0 * 2f64.sqrt();
        assert!((angle_arcsin(x, x, 0.0).unwrap() - PI / 2.0).abs() < 1e-7);
        assert!(angle_arcsin(2.1, 2.1, 0.0).is_err());
    }

    #[test]
    fn degenerate_and_off_cubic_rejected() {
        assert!(angle_cosine_rule(3.0, 3.0, 2.0, 0.0).is_err());
        assert!(matches!(
            angle_cosine_rule(3.0, 3.0, 4.0, 0.0),
            Err(Error::CubicViolation(..))
        ));
    }

    #[test]
    fn differential_matches_central_differences() {
        let da = angle_differential(3.0, 3.0, 0.0, 0.0, 0.0);
        assert_eq!(da, 0.0);
        // Move along the curve where (a, 3, c) stays on the cubic.
        let angle_at = |la: f64| -> f64 {
            let a = trace_from_length(la).unwrap();
            let pt = make_surface_point(a, 3.0, 0.0, Root::Smaller).unwrap();
            angle_cosine_rule(a, 3.0, pt.traces()[2], 0.0)
                .unwrap()
                .angle
        };
        let la = length_from_trace(3.0).unwrap();
        let formula = angle_differential(3.0, 3.0, 0.0, 1.0, 0.0);
        let mut errs = vec![];
        for h in [1e-3, 1e-4] {
            let fd = (angle_at(la + h) - angle_at(la - h)) / (2.0 * h);
            errs.push((fd - formula).abs());
        }
        assert!(errs[0] < 1e-5 && errs[1] < 1e-7, "{errs:?}");
        assert!(angle_differential(3.0, 3.0, 0.0, 1.0, 1.0) < 0.0);
        let signed = angle_differential_signed(3.0, 3.0, 6.0, 0.0, 1.0, 1.0);
        assert!((signed + angle_differential(3.0, 3.0, 0.0, 1.0, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn hexagonal_twist_orbit() {
        let pt = SurfacePoint::hexagonal();
        let o = twist_orbit(&pt, &Slope::ONE, &Slope::INFINITY).unwrap();
        assert!((o.perp - 5f64.sqrt().ln()).abs() < 1e-14);
        assert!((o.theta + o.gamma.length / 4.0).abs() < 1e-14);
        let traces: Vec<f64> = (-3..=4)
            .map(|n| 2.0 * (o.orbit_length(n) / 2.0).cosh())
            .collect();
        for (t, e) in traces
            .iter()
            .zip([39.0, 15.0, 6.0, 3.0, 3.0, 6.0, 15.0, 39.0])
        {
            assert!((t - e).abs() < 1e-12 * e, "{traces:?}");
        }
        assert_eq!(o.orbit_slope(1).unwrap(), Slope::ZERO);
        assert_eq!(o.orbit_slope(3).unwrap(), s(2, 3));
        assert!(o.perp_residual(0.0) < 1e-14);
    }

    #[test]
    fn orbit_matches_tree_traces() {
        for (x1, x2, ld) in [(3.0, 3.0, 0.0), (3.4, 4.1, 1.0), (2.7, 5.2, 2.0)] {
            let pt = make_surface_point(x1, x2, ld, Root::Larger).unwrap();
            for (g, gp) in [(s(1, 1), s(1, 0)), (s(2, 3), s(1, 1)), (s(-1, 2), s(0, 1))] {
                let o = twist_orbit(&pt, &g, &gp).unwrap();
                for n in -8..=8 {
                    let tree =
                        length_from_trace(trace_of_slope(&pt, &o.orbit_slope(n).unwrap()).unwrap())
                            .unwrap();
                    assert!((o.orbit_length(n) - tree).abs() < 1e-9 * tree.max(1.0));
                }
            }
        }
    }

    #[test]
    fn twist_orbit_needs_neighbours() {
        let pt = SurfacePoint::hexagonal();
        assert!(matches!(
            twist_orbit(&pt, &s(1, 0), &s(1, 2)),
            Err(Error::NotNeighbors(..))
        ));
    }

    #[test]
    fn wolpert_at_hexagonal_point() {
        let pt = SurfacePoint::hexagonal();
        let w = wolpert_derivative_check(&pt, &Slope::ONE, &Slope::INFINITY).unwrap();
        assert!((w.analytic - 0.6).abs() < 1e-12);
        assert!((w.finite_diff + 0.6).abs() < 1e-8);
    }

    #[test]
    fn twist_flow_reproduces_point_and_orbit() {
        let pt = make_surface_point(3.3, 3.9, 1.0, Root::Smaller).unwrap();
        for mu in [s(0, 1), s(1, 0), s(2, 3), s(-1, 2)] {
            let flow = TwistFlow::new(&pt, &mu).unwrap();
            for alpha in [s(1, 0), s(0, 1), s(1, 1), s(5, 2), s(-4, 7)] {
                let direct = length_from_trace(trace_of_slope(&pt, &alpha).unwrap()).unwrap();
                let flowed = flow.length_at(&alpha, 0.0).unwrap();
                assert!(
                    (flowed - direct).abs() < 1e-9 * direct,
                    "mu {mu} alpha {alpha}: {flowed} vs {direct}"
                );
                let d = flow.length_derivative(&alpha).unwrap();
                assert!(d.abs() <= intersection_number(&alpha, &mu) as f64 + 1e-8);
            }
            assert!(flow.length_derivative(&mu).unwrap().abs() < 1e-9);
        }
    }
}
