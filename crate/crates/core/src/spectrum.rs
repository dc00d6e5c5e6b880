//! Statistics of the simple length spectrum.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::farey::{intersection_number, Slope};
use crate::markoff::{enumerate_geodesics, systole_record, GeodesicRecord, SurfacePoint};

pub fn systole(pt: &SurfacePoint) -> Result<GeodesicRecord> {
    systole_record(pt)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub systole_length: f64,
    pub systole_slope: Slope,
    /// `(t, N(t))` with `N(t)` the number of simple geodesics of length `< t`.
    pub counts: Vec<(f64, usize)>,
    /// `N(2T) / N(T)` for `T` half the largest threshold; absent if `N(T) = 0`.
    pub growth_ratio: Option<f64>,
}

/// `N(t)` for each `t`, given records sorted by length.
pub fn count_below(records: &[GeodesicRecord], t: f64) -> usize {
    records.partition_point(|r| r.length < t)
}

pub fn counting_function(pt: &SurfacePoint, thresholds: &[f64]) -> Result<SpectrumSummary> {
    if thresholds.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(domain("thresholds must be sorted in increasing order"));
    }
    let sys = systole_record(pt)?;
    let top = thresholds.last().copied().unwrap_or(0.0);
    let records = if top > 0.0 {
        enumerate_geodesics(pt, top)?
    } else {
        Vec::new()
    };
    let counts = thresholds
        .iter()
        .map(|&t| (t, count_below(&records, t)))
        .collect();
    let half = count_below(&records, top / 2.0);
    let growth_ratio = (half > 0).then(|| count_below(&records, top) as f64 / half as f64);
    Ok(SpectrumSummary {
        systole_length: sys.length,
        systole_slope: sys.slope,
        counts,
        growth_ratio,
    })
}

/// Half-width of the embedded collar around a geodesic of length `l_mu`,
/// doubled: `2 arcsinh(1 / sinh(l_mu / 2))`.
pub fn collar_width(l_mu: f64) -> Result<f64> {
    if !(l_mu > 0.0) {
        return Err(domain(format!("length {l_mu} is not positive")));
    }
    Ok(2.0 * (1.0 / (l_mu / 2.0).sinh()).asinh())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollarViolation {
    pub gamma: GeodesicRecord,
    pub mu: GeodesicRecord,
    pub intersection: u64,
    /// `i(gamma, mu) w(l_mu)`, which should not exceed `l_gamma`.
    pub crossing_length: f64,
}

/// Pairs of geodesics shorter than `cutoff` for which
/// `i(gamma, mu) w(l_mu) <= l_gamma` fails.
pub fn collar_check(pt: &SurfacePoint, cutoff: f64) -> Result<Vec<CollarViolation>> {
    let recs = enumerate_geodesics(pt, cutoff)?;
    let widths = recs
        .iter()
        .map(|r| collar_width(r.length))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for gamma in &recs {
        for (mu, w) in recs.iter().zip(&widths) {
            let i = intersection_number(&gamma.slope, &mu.slope);
            let crossing_length = i as f64 * w;
            if i > 0 && crossing_length > gamma.length * (1.0 + 1e-12) {
                out.push(CollarViolation {
                    gamma: *gamma,
                    mu: *mu,
                    intersection: i,
                    crossing_length,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductViolation {
    pub alpha: GeodesicRecord,
    pub beta: GeodesicRecord,
    pub product: f64,
    pub bound: f64,
}

/// Once-meeting pairs shorter than `cutoff` violating
/// `sinh(l_alpha/2) sinh(l_beta/2) >= sinh(sys/2) (l_alpha + l_beta) / 4`.
pub fn product_lower_bound_check(pt: &SurfacePoint, cutoff: f64) -> Result<Vec<ProductViolation>> {
    let sys = systole_record(pt)?.length;
    let recs = enumerate_geodesics(pt, cutoff)?;
    let mut out = Vec::new();
    for (i, a) in recs.iter().enumerate() {
        for b in &recs[i + 1..] {
            if intersection_number(&a.slope, &b.slope) != 1 {
                continue;
            }
            let (product, bound) = product_bound_terms(a.length, b.length, sys);
            if product < bound * (1.0 - 1e-12) {
                out.push(ProductViolation {
                    alpha: *a,
                    beta: *b,
                    product,
                    bound,
                });
            }
        }
    }
    Ok(out)
}

pub fn product_bound_terms(l_alpha: f64, l_beta: f64, sys: f64) -> (f64, f64) {
    (
        (l_alpha / 2.0).sinh() * (l_beta / 2.0).sinh(),
        (sys / 2.0).sinh() * (l_alpha + l_beta) / 4.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::length_from_trace;
    use crate::markoff::{make_surface_point, Root};

    #[test]
    fn hexagonal_systole_and_counts() {
        let pt = SurfacePoint::hexagonal();
        let s = systole(&pt).unwrap();
        assert!((s.length - 2.0 * 1.5f64.acosh()).abs() < 1e-15);
        assert!(Slope::BASE_TRIANGLE.contains(&s.slope));
        let c = counting_function(&pt, &[1.0, s.length, s.length + 1e-9, 15.0, 30.0]).unwrap();
        assert_eq!(c.counts[0].1, 0);
        assert_eq!(c.counts[1].1, 0);
        assert_eq!(c.counts[2].1, 3);
        assert!(c.counts.windows(2).all(|w| w[0].1 <= w[1].1));
        let g = c.growth_ratio.unwrap();
        assert!((3.2..=4.8).contains(&g), "{g}");
        assert!(counting_function(&pt, &[3.0, 2.0]).is_err());
    }

    #[test]
    fn near_cusp_systole() {
        let pt = SurfacePoint::near_cusp(0.1, 0.0).unwrap();
        assert_eq!(pt.traces()[0], 2.0 * 0.05f64.cosh());
        let s = systole(&pt).unwrap();
        assert_eq!(s.slope, Slope::INFINITY);
        assert!((s.length - 0.1).abs() < 1e-12);
    }

    #[test]
    fn hexagonal_multiplicities() {
        let recs = enumerate_geodesics(&SurfacePoint::hexagonal(), 10.0).unwrap();
        let mut i = 0;
        while i < recs.len() {
            let mut j = i;
            while j < recs.len() && (recs[j].length - recs[i].length).abs() < 1e-9 {
                j += 1;
            }
            assert_eq!((j - i) % 3, 0, "length {}", recs[i].length);
            i = j;
        }
    }

    #[test]
    fn collar_width_shape() {
        let ws: Vec<f64> = [0.01, 0.1, 1.0, 5.0]
            .iter()
            .map(|&l| collar_width(l).unwrap())
            .collect();
        assert!(ws.windows(2).all(|w| w[0] > w[1]));
        assert!(collar_width(1e-8).unwrap() > 30.0);
        assert!(collar_width(0.0).is_err());
    }

    #[test]
    fn collar_and_product_hold() {
        let pt = SurfacePoint::hexagonal();
        assert!(collar_check(&pt, 15.0).unwrap().is_empty());
        assert!(product_lower_bound_check(&pt, 15.0).unwrap().is_empty());
        let l = length_from_trace(3.0).unwrap();
        let (lhs, rhs) = product_bound_terms(l, l, l);
        assert!((lhs - 1.25).abs() < 1e-14);
        assert!((rhs - 1.0760).abs() < 1e-4);
        let (lhs, rhs) = product_bound_terms(30.0, 30.0, l);
        assert!(lhs / rhs > 1e10);
    }

    #[test]
    fn systole_shrinks_as_a_trace_tends_to_two() {
        let mut last = f64::INFINITY;
        for x1 in [2.8f64, 2.5, 2.2, 2.05, 2.01] {
            let x2 = 3.0 * x1 / ((x1 - 2.0) * (x1 + 2.0)).sqrt();
            let pt = make_surface_point(x1, x2, 0.0, Root::Larger).unwrap();
            let s = systole(&pt).unwrap().length;
            assert!(s < last);
            last = s;
        }
        assert!(last < 0.21);
    }
}
