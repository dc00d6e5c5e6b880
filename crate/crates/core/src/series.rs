//! Length series over simple closed geodesics with truncation estimates.
//!
//! Tail estimates bound the number of geodesics in each unit shell
//! `[t, t + 1)` by `C (2t + 1)`, where `C` is twice the largest observed
//! `N(t) / t^2` on the upper half of the enumerated range, and multiply by
//! the largest term the shell can contain. The decay is exact; the counting
//! constant is fitted, so the bound is not rigorous.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::farey::{intersection_number, is_farey_neighbor, MappingClass, Slope};
use crate::geometry::{angle_cosine_rule, angle_differential_signed, twist_orbit, TwistFlow};
use crate::markoff::{
    enumerate_geodesics, enumerate_geodesics_parallel, enumerate_neighbor_pairs, systole_record,
    trace_of_slope, GeodesicRecord, SurfacePoint, MAX_LENGTH,
};
use crate::spectrum::collar_width;
use crate::summation::{parallel_compensated_sum, KahanSum};

/// Chunk size for the parallel reduction.
const CHUNK: usize = 256;

/// Enumeration depth for the part of the degeneration sum not on the
/// once-meeting orbit.
pub const REMAINDER_CUTOFF: f64 = 30.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub value: f64,
    pub terms_used: usize,
    pub cutoff_length: f64,
    pub tail_bound: f64,
    pub target: Option<f64>,
    pub abs_error_vs_target: Option<f64>,
}

impl SeriesReport {
    fn new(
        value: f64,
        terms_used: usize,
        cutoff_length: f64,
        tail_bound: f64,
        target: Option<f64>,
    ) -> SeriesReport {
        SeriesReport {
            value,
            terms_used,
            cutoff_length,
            tail_bound,
            target,
            abs_error_vs_target: target.map(|t| (value - t).abs()),
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.abs_error_vs_target.is_some_and(|e| e < tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum TermKind {
    Mcshane,
    Arctan,
    /// Angle variations along the twist about a curve of length `mu_length`.
    Variation {
        mu_length: f64,
    },
}

struct TailModel {
    kind: TermKind,
    sys: f64,
    r: f64,
}

impl TailModel {
    fn new(pt: &SurfacePoint, kind: TermKind) -> Result<TailModel> {
        Ok(TailModel {
            kind,
            sys: systole_record(pt)?.length,
            r: pt.boundary_factor(),
        })
    }

    /// Largest term carried by an item of size `>= t`; for variations the
    /// size is `l_alpha + l_beta` and each pair carries two terms.
    fn max_term(&self, t: f64) -> f64 {
        match self.kind {
            TermKind::Mcshane => 2.0 / (1.0 + t.exp()),
            TermKind::Arctan => (self.r / (t / 2.0).sinh()).atan(),
            TermKind::Variation { mu_length } => {
                let w = collar_width(mu_length).unwrap_or(f64::INFINITY);
                let p = (self.sys / 2.0).sinh() * ((t - self.sys) / 2.0).sinh();
                if !(p > self.r) || t <= self.sys {
                    return f64::INFINITY;
                }
                let coth = 1.0 / (self.sys / 2.0).tanh();
                2.0 * self.r * coth * t / (w * 2.0 * (p * p - self.r * self.r).sqrt())
            }
        }
    }

    /// Smallest size from which the shell estimate is meaningful.
    fn exact_below(&self) -> f64 {
        let mut t = self.sys + 1.0;
        if let TermKind::Variation { .. } = self.kind {
            t = 2.0 * self.sys + 1.0;
            while !self.max_term(t).is_finite() && t < MAX_LENGTH {
                t += 1.0;
            }
            t += 1.0;
        }
        t
    }

    /// Shell sum beyond `cutoff`, fitted on `sizes` (sorted, all `< cutoff`).
    fn shell_tail(&self, sizes: &[f64], cutoff: f64) -> f64 {
        let mut c = sizes.len() as f64 / (cutoff * cutoff);
        for (i, s) in sizes.iter().enumerate() {
            if *s >= cutoff / 2.0 {
                c = c.max((i + 1) as f64 / (s * s));
            }
        }
        let c = 2.0 * c;
        let mut tail = KahanSum::new();
        let mut t = cutoff;
        while t < 2.0 * MAX_LENGTH {
            let shell = c * (2.0 * t + 1.0) * self.max_term(t);
            tail.add(shell);
            if shell <= 1e-18 * tail.value() || shell < 1e-300 {
                break;
            }
            t += 1.0;
        }
        tail.value()
    }
}

/// Heuristic upper bound for the terms omitted beyond `cutoff`.
pub fn tail_estimate(pt: &SurfacePoint, cutoff: f64, kind: TermKind) -> Result<f64> {
    let model = TailModel::new(pt, kind)?;
    if cutoff < model.sys {
        return Err(domain(format!(
            "cutoff {cutoff} is below the systole {}",
            model.sys
        )));
    }
    let sizes: Vec<f64> = match kind {
        TermKind::Variation { .. } => enumerate_neighbor_pairs(pt, cutoff)?
            .iter()
            .map(|p| p.length_sum())
            .collect(),
        _ => enumerate_geodesics(pt, cutoff)?
            .iter()
            .map(|r| r.length)
            .collect(),
    };
    Ok(model.shell_tail(&sizes, cutoff))
}

/// Sums `term(l)` over geodesics of length `< cutoff`; terms between the
/// cutoff and the start of the shell estimate go into the tail.
fn geodesic_series(
    pt: &SurfacePoint,
    cutoff: f64,
    kind: TermKind,
    target: f64,
    threads: usize,
    term: impl Fn(f64) -> f64 + Sync,
) -> Result<SeriesReport> {
    if !(cutoff > 0.0) {
        return Err(domain(format!("cutoff {cutoff} is not positive")));
    }
    let model = TailModel::new(pt, kind)?;
    let reach = cutoff.max(model.exact_below());
    let recs = enumerate_geodesics_parallel(pt, reach, threads.max(1))?;
    let used = recs.partition_point(|r| r.length < cutoff);
    let terms: Vec<f64> = recs[..used].iter().map(|r| term(r.length)).collect();
    let value = if threads > 1 {
        parallel_compensated_sum(&terms, CHUNK)
    } else {
        terms.iter().copied().collect::<KahanSum>().value()
    };
    let gap: KahanSum = recs[used..].iter().map(|r| term(r.length)).collect();
    let sizes: Vec<f64> = recs.iter().map(|r| r.length).collect();
    let tail = gap.value() + model.shell_tail(&sizes, reach);
    Ok(SeriesReport::new(value, used, cutoff, tail, Some(target)))
}

pub fn mcshane_term(l: f64) -> f64 {
    2.0 / (1.0 + l.exp())
}

pub fn arctan_term(boundary_factor: f64, l: f64) -> f64 {
    (boundary_factor / (l / 2.0).sinh()).atan()
}

/// `sum 2 / (1 + exp l)` at a cusped point; the target is 1.
pub fn mcshane_sum(pt: &SurfacePoint, cutoff: f64) -> Result<SeriesReport> {
    mcshane_sum_parallel(pt, cutoff, 1)
}

pub fn mcshane_sum_parallel(
    pt: &SurfacePoint,
    cutoff: f64,
    threads: usize,
) -> Result<SeriesReport> {
    if pt.boundary_length() != 0.0 {
        return Err(domain(format!(
            "this sum needs a cusp, boundary length is {}",
            pt.boundary_length()
        )));
    }
    geodesic_series(pt, cutoff, TermKind::Mcshane, 1.0, threads, mcshane_term)
}

/// `sum arctan(cosh(l_delta/4) / sinh(l/2))`; the target is `3 pi / 2`.
pub fn arctan_sum(pt: &SurfacePoint, cutoff: f64) -> Result<SeriesReport> {
    arctan_sum_parallel(pt, cutoff, 1)
}

pub fn arctan_sum_parallel(pt: &SurfacePoint, cutoff: f64, threads: usize) -> Result<SeriesReport> {
    let r = pt.boundary_factor();
    geodesic_series(pt, cutoff, TermKind::Arctan, 1.5 * PI, threads, move |l| {
        arctan_term(r, l)
    })
}

/// `pi - 2 arctan(cosh(l_delta/4) / sinh(l_gamma/2))`.
pub fn telescoping_target(boundary_factor: f64, l_gamma: f64) -> f64 {
    PI - 2.0 * arctan_term(boundary_factor, l_gamma)
}

/// Angles between consecutive twists `T^n gamma'`, `T^{n+1} gamma'` for
/// `-big_n <= n < big_n`.
pub fn telescoping_sum(
    pt: &SurfacePoint,
    gamma: &Slope,
    gamma_prime: &Slope,
    big_n: u32,
) -> Result<SeriesReport> {
    if big_n < 1 {
        return Err(domain("the orbit sum needs N >= 1"));
    }
    let orbit = twist_orbit(pt, gamma, gamma_prime)?;
    let l_delta = pt.boundary_length();
    let r = pt.boundary_factor();
    let g_tr = orbit.gamma.trace;
    let n = big_n as i64;
    let traces = (-n..=n)
        .map(|k| trace_of_slope(pt, &orbit.orbit_slope(k)?))
        .collect::<Result<Vec<_>>>()?;
    let mut value = KahanSum::new();
    for w in traces.windows(2) {
        value.add(angle_cosine_rule(w[0], w[1], g_tr, l_delta)?.angle);
    }
    // Beyond the window every angle is acute with sine r / (sinh sinh), and
    // an acute angle is at most pi/2 times its sine.
    let half = |k: i64| {
        let c = orbit.trace_at(k as f64 * orbit.gamma.length) / 2.0;
        (c, ((c - 1.0) * (c + 1.0)).sqrt())
    };
    let mut tail = KahanSum::new();
    for dir in [1i64, -1] {
        let mut k = if dir > 0 { n } else { -n - 1 };
        loop {
            let ((c0, s0), (c1, s1)) = (half(k), half(k + 1));
            let sine = r / (s0 * s1);
            let acute = c0 * c1 - g_tr / 2.0 > 0.0;
            let term = if acute { PI / 2.0 * sine.min(1.0) } else { PI };
            tail.add(term);
            if !(term > 1e-300) || term < 1e-18 * tail.value() {
                break;
            }
            k += dir;
        }
    }
    Ok(SeriesReport::new(
        value.value(),
        traces.len() - 1,
        orbit.orbit_length(n).max(orbit.orbit_length(-n)),
        tail.value(),
        Some(telescoping_target(r, orbit.gamma.length)),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    /// Signed sum, target 0.
    pub series: SeriesReport,
    pub abs_sum: f64,
    pub abs_tail_bound: f64,
    pub pairs: usize,
    /// `max |dl_alpha t(mu)| / i(alpha, mu)` over curves crossing `mu`.
    pub max_derivative_ratio: f64,
    /// Curves whose derivative exceeds their intersection number with `mu`.
    pub bound_violations: Vec<Slope>,
}

/// `sum d(angle) . t(mu)` over ordered once-meeting pairs `(alpha, beta)`
/// with `l_alpha + l_beta < cutoff`, each unordered pair contributing its
/// two supplementary angles.
pub fn variation_sum(pt: &SurfacePoint, mu: &Slope, cutoff: f64) -> Result<VariationReport> {
    variation_sum_parallel(pt, mu, cutoff, 1)
}

pub fn variation_sum_parallel(
    pt: &SurfacePoint,
    mu: &Slope,
    cutoff: f64,
    threads: usize,
) -> Result<VariationReport> {
    let flow = TwistFlow::new(pt, mu)?;
    let kind = TermKind::Variation {
        mu_length: flow.orbit().gamma.length,
    };
    let model = TailModel::new(pt, kind)?;
    let reach = cutoff.max(model.exact_below());
    let pairs = enumerate_neighbor_pairs(pt, reach)?;

    let mut slopes: Vec<Slope> = pairs
        .iter()
        .flat_map(|p| [p.first.slope, p.second.slope])
        .collect();
    slopes.sort();
    slopes.dedup();
    let derive = |s: &Slope| flow.length_derivative(s).map(|d| (*s, d));
    let derivs: Vec<(Slope, f64)> = if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| domain(format!("cannot build thread pool: {e}")))?;
        pool.install(|| slopes.par_iter().map(derive).collect::<Result<_>>())?
    } else {
        slopes.iter().map(derive).collect::<Result<_>>()?
    };

    let mut max_ratio: f64 = 0.0;
    let mut bound_violations = Vec::new();
    for (s, d) in &derivs {
        let i = intersection_number(s, mu) as f64;
        if i > 0.0 {
            max_ratio = max_ratio.max(d.abs() / i);
        }
        if d.abs() > i + 1e-8 {
            bound_violations.push(*s);
        }
    }
    let dl: HashMap<Slope, f64> = derivs.into_iter().collect();

    let l_delta = pt.boundary_length();
    let mut signed = KahanSum::new();
    let mut abs = KahanSum::new();
    let mut gap = KahanSum::new();
    let mut used = 0;
    for p in &pairs {
        let (a, b) = (&p.first, &p.second);
        for (_, c_tr) in p.companions {
            let t = angle_differential_signed(
                a.trace,
                b.trace,
                c_tr,
                l_delta,
                dl[&a.slope],
                dl[&b.slope],
            );
            if p.length_sum() < cutoff {
                signed.add(t);
                abs.add(t.abs());
            } else {
                gap.add(t.abs());
            }
        }
        if p.length_sum() < cutoff {
            used += 1;
        }
    }
    let sizes: Vec<f64> = pairs.iter().map(|p| p.length_sum()).collect();
    let tail = gap.value() + model.shell_tail(&sizes, reach);
    Ok(VariationReport {
        series: SeriesReport::new(signed.value(), 2 * used, cutoff, tail, Some(0.0)),
        abs_sum: abs.value(),
        abs_tail_bound: tail,
        pairs: used,
        max_derivative_ratio: max_ratio,
        bound_violations,
    })
}

/// Test functions for the limit at the cusp, written in `u = sech(l/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// `f(u) = u`.
    SechLinear,
    /// `f(u) = arctan(cosh(l_delta/4) u / sqrt(1 - u^2))`, the arctan term.
    Arctan,
    /// `f(u) = 2 / (1 + ((1 + sqrt(1 - u^2)) / u)^2)`, the McShane term.
    Mcshane,
}

impl Profile {
    pub fn eval(&self, u: f64, boundary_factor: f64) -> f64 {
        match self {
            Profile::SechLinear => u,
            Profile::Arctan => (boundary_factor * u / ((1.0 - u) * (1.0 + u)).sqrt()).atan(),
            Profile::Mcshane => {
                if u == 0.0 {
                    return 0.0;
                }
                let e = (1.0 + ((1.0 - u) * (1.0 + u)).sqrt()) / u;
                2.0 / (1.0 + e * e)
            }
        }
    }

    pub fn slope_at_zero(&self, boundary_factor: f64) -> f64 {
        match self {
            Profile::SechLinear => 1.0,
            Profile::Arctan => boundary_factor,
            Profile::Mcshane => 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Profile::SechLinear => "sech-linear",
            Profile::Arctan => "arctan",
            Profile::Mcshane => "mcshane",
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Profile> {
        match s {
            "sech-linear" => Ok(Profile::SechLinear),
            "arctan" => Ok(Profile::Arctan),
            "mcshane" => Ok(Profile::Mcshane),
            other => Err(domain(format!(
                "unknown profile {other:?}; expected sech-linear, arctan or mcshane"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegenerationReport {
    /// `f(sech(eps/2))` plus the once-meeting orbit sum, against
    /// `f(1) + pi sech(l_delta/4) f'(0)`.
    pub series: SeriesReport,
    pub systole_term: f64,
    pub orbit_sum: f64,
    pub orbit_terms: usize,
    /// `sum sech(l/2)` over the once-meeting orbit, against `pi sech(l_delta/4)`.
    pub sech_orbit_sum: f64,
    pub sech_orbit_target: f64,
    /// `sum f` over enumerated curves meeting the systole at least twice.
    pub remainder: f64,
    pub remainder_terms: usize,
    pub remainder_cutoff: f64,
}

/// Evaluates the series `sum f(sech(l/2))` at the point whose systole `1/0`
/// has length `epsilon`.
pub fn degeneration_limit(l_delta: f64, epsilon: f64, f: Profile) -> Result<DegenerationReport> {
    let r = (l_delta / 4.0).cosh();
    degeneration_limit_with(l_delta, epsilon, |u| f.eval(u, r), f.slope_at_zero(r))
}

/// As [`degeneration_limit`] for an arbitrary `f` continuous on `[0, 1]`
/// with `f(u) = f'(0) u + o(u)`.
pub fn degeneration_limit_with(
    l_delta: f64,
    epsilon: f64,
    f: impl Fn(f64) -> f64,
    f_prime_zero: f64,
) -> Result<DegenerationReport> {
    let pt = SurfacePoint::near_cusp(epsilon, l_delta)?;
    let r = pt.boundary_factor();
    let sech = |l: f64| 1.0 / (l / 2.0).cosh();
    let systole_term = f(sech(epsilon));

    let orbit = twist_orbit(&pt, &Slope::INFINITY, &Slope::ZERO)?;
    let centre = (orbit.minimizer() / orbit.gamma.length).round() as i64;
    let mut f_sum = KahanSum::new();
    let mut s_sum = KahanSum::new();
    let mut orbit_terms = 0;
    for dir in [1i64, -1] {
        let mut k = if dir > 0 { centre } else { centre - 1 };
        loop {
            let u = sech(orbit.orbit_length(k));
            f_sum.add(f(u));
            s_sum.add(u);
            orbit_terms += 1;
            if u < 1e-17 * s_sum.value() {
                break;
            }
            k += dir;
        }
    }

    let mut remainder = KahanSum::new();
    let mut remainder_terms = 0;
    for rec in enumerate_geodesics(&pt, REMAINDER_CUTOFF)? {
        if intersection_number(&rec.slope, &Slope::INFINITY) >= 2 {
            remainder.add(f(sech(rec.length)));
            remainder_terms += 1;
        }
    }

    // f(u) <= m u on (0, 1), and sech(l/2) <= 2 exp(-l/2).
    let m = (1..10_000)
        .map(|k| {
            let u = k as f64 / 10_000.0;
            f(u) / u
        })
        .fold(f_prime_zero.abs(), f64::max)
        * (1.0 + 1e-3);
    let bound = 2.0 * m * tail_bound_cusp(&pt, 2, 0.5)?;

    let value = systole_term + f_sum.value();
    let target = f(1.0) + PI / r * f_prime_zero;
    Ok(DegenerationReport {
        series: SeriesReport::new(value, orbit_terms + 1, epsilon, bound, Some(target)),
        systole_term,
        orbit_sum: f_sum.value(),
        orbit_terms,
        sech_orbit_sum: s_sum.value(),
        sech_orbit_target: PI / r,
        remainder: remainder.value(),
        remainder_terms,
        remainder_cutoff: REMAINDER_CUTOFF,
    })
}

/// The shortest geodesic meeting `sys` once.
pub fn shortest_crossing(pt: &SurfacePoint, sys: &Slope) -> Result<GeodesicRecord> {
    let [_, b, _, d] = MappingClass::frame(sys)?.entries();
    let nu = crate::farey::normalize_slope(b, d)?;
    debug_assert!(is_farey_neighbor(sys, &nu));
    let orbit = twist_orbit(pt, sys, &nu)?;
    let k = (orbit.minimizer() / orbit.gamma.length).floor() as i64;
    let mut best: Option<GeodesicRecord> = None;
    for n in [k - 1, k, k + 1, k + 2] {
        let s = orbit.orbit_slope(n)?;
        let rec = GeodesicRecord::from_trace(s, trace_of_slope(pt, &s)?)?;
        if best.is_none_or(|b| rec.length < b.length) {
            best = Some(rec);
        }
    }
    Ok(best.expect("four candidates"))
}

/// Upper bound for `sum exp(-t l)` over simple geodesics meeting the
/// systole at least `n` times, from `l >= (|x| l_sys + |y| l_cross) / 2`:
///
/// ```text
/// 2 / (1 - exp(-t l_sys / 2)) * exp(-t n l_cross / 2) / (1 - exp(-t l_cross / 2))
/// ```
pub fn tail_bound_cusp(pt: &SurfacePoint, n: u32, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain(format!("exponent t = {t} must be positive")));
    }
    if n < 1 {
        return Err(domain("intersection count must be at least 1"));
    }
    let sys = systole_record(pt)?;
    let cross = shortest_crossing(pt, &sys.slope)?;
    let k = 0.5;
    let a = (-t * k * sys.length).exp();
    let b = (-t * k * cross.length).exp();
    Ok(2.0 / (1.0 - a) * (-t * k * n as f64 * cross.length).exp() / (1.0 - b))
}
