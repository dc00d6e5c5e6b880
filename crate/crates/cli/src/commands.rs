use holed_torus::geometry::twist_orbit;
use holed_torus::markoff::enumerate_geodesics_parallel;
use holed_torus::series::{
    arctan_sum_parallel, degeneration_limit, mcshane_sum_parallel, telescoping_sum,
    variation_sum_parallel, SeriesReport,
};
use holed_torus::spectrum::{counting_function, systole};
use holed_torus::{trace_of_slope, GeodesicRecord, Result, SurfacePoint};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Cli, Command, Format};
use crate::point;

pub struct Outcome {
    pub point: PointSummary,
    pub result: Value,
    pub pass: bool,
    /// Rows for `--format csv`, header first.
    pub csv: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Serialize)]
pub struct PointSummary {
    pub traces: [f64; 3],
    pub boundary_length: f64,
    pub kappa: f64,
    pub boundary_factor: f64,
    pub systole: GeodesicRecord,
}

impl PointSummary {
    fn of(pt: &SurfacePoint) -> Result<PointSummary> {
        Ok(PointSummary {
            traces: pt.traces(),
            boundary_length: pt.boundary_length(),
            kappa: pt.kappa(),
            boundary_factor: pt.boundary_factor(),
            systole: systole(pt)?,
        })
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let threads = cli.threads as usize;
    let tol = cli.tol;
    match &cli.command {
        Command::Verify { point, cutoff } => {
            let pt = point::build(point)?;
            let arctan = arctan_sum_parallel(&pt, *cutoff, threads)?;
            let mcshane = if pt.boundary_length() == 0.0 {
                Some(mcshane_sum_parallel(&pt, *cutoff, threads)?)
            } else {
                None
            };
            let checks: Vec<&SeriesReport> = std::iter::once(&arctan).chain(&mcshane).collect();
            let pass = checks.iter().all(|r| r.passes(tol));
            let explanation = checks
                .iter()
                .filter(|r| !r.passes(tol))
                .map(|r| miss(r, tol))
                .collect::<Vec<_>>();
            Ok(Outcome {
                point: PointSummary::of(&pt)?,
                result: json!({
                    "arctan": arctan,
                    "mcshane": mcshane,
                    "explanation": explanation,
                }),
                pass,
                csv: None,
            })
        }
        Command::Spectrum {
            point,
            cutoff,
            thresholds,
        } => {
            let pt = point::build(point)?;
            let records = enumerate_geodesics_parallel(&pt, *cutoff, threads)?;
            let thresholds = thresholds
                .clone()
                .unwrap_or_else(|| (1..=8).map(|k| cutoff * k as f64 / 8.0).collect());
            let summary = counting_function(&pt, &thresholds)?;
            let csv = (cli.format == Format::Csv).then(|| {
                let mut rows = vec![vec![
                    "slope_p".to_string(),
                    "slope_q".to_string(),
                    "trace".to_string(),
                    "length".to_string(),
                ]];
                rows.extend(records.iter().map(|r| {
                    vec![
                        r.slope.p().to_string(),
                        r.slope.q().to_string(),
                        format!("{:.16e}", r.trace),
                        format!("{:.16e}", r.length),
                    ]
                }));
                rows
            });
            Ok(Outcome {
                point: PointSummary::of(&pt)?,
                result: json!({
                    "cutoff": cutoff,
                    "count": records.len(),
                    "summary": summary,
                    "geodesics": records,
                }),
                pass: true,
                csv,
            })
        }
        Command::TwistOrbit {
            point,
            gamma,
            gamma_prime,
            n,
        } => {
            let pt = point::build(point)?;
            let orbit = twist_orbit(&pt, gamma, gamma_prime)?;
            let series = telescoping_sum(&pt, gamma, gamma_prime, *n)?;
            let m = *n as i64;
            let members = (-m..=m)
                .map(|k| {
                    let s = orbit.orbit_slope(k)?;
                    Ok(json!({
                        "n": k,
                        "slope": s,
                        "length": orbit.orbit_length(k),
                        "tree_trace": trace_of_slope(&pt, &s)?,
                    }))
                })
                .collect::<Result<Vec<Value>>>()?;
            let pass = series.passes(tol);
            Ok(Outcome {
                point: PointSummary::of(&pt)?,
                result: json!({
                    "orbit": orbit,
                    "minimizer": orbit.minimizer(),
                    "series": series,
                    "members": members,
                    "explanation": explain(&series, tol),
                }),
                pass,
                csv: None,
            })
        }
        Command::Degenerate {
            epsilon,
            ldelta,
            f,
            limit_tol,
        } => {
            let pt = SurfacePoint::near_cusp(*epsilon, *ldelta)?;
            let report = degeneration_limit(*ldelta, *epsilon, *f)?;
            let gap = (report.sech_orbit_sum - report.sech_orbit_target).abs();
            let pass = gap < *limit_tol;
            let mut explanation = Vec::new();
            if !pass {
                explanation.push(format!(
                    "orbit sum of sech(l/2) is {gap:e} from its limit, not below {limit_tol:e}"
                ));
            }
            Ok(Outcome {
                point: PointSummary::of(&pt)?,
                result: json!({
                    "profile": f,
                    "report": report,
                    "sech_orbit_error": gap,
                    "explanation": explanation,
                }),
                pass,
                csv: None,
            })
        }
        Command::Variation { point, mu, cutoff } => {
            let pt = point::build(point)?;
            let report = variation_sum_parallel(&pt, mu, *cutoff, threads)?;
            let pass = report.series.passes(tol) && report.bound_violations.is_empty();
            let mut explanation = explain(&report.series, tol);
            if !report.bound_violations.is_empty() {
                explanation.push(format!(
                    "{} curves exceed the derivative bound",
                    report.bound_violations.len()
                ));
            }
            Ok(Outcome {
                point: PointSummary::of(&pt)?,
                result: json!({
                    "mu": mu,
                    "report": report,
                    "explanation": explanation,
                }),
                pass,
                csv: None,
            })
        }
    }
}

fn explain(r: &SeriesReport, tol: f64) -> Vec<String> {
    if r.passes(tol) {
        Vec::new()
    } else {
        vec![miss(r, tol)]
    }
}

fn miss(r: &SeriesReport, tol: f64) -> String {
    let err = r.abs_error_vs_target.unwrap_or(f64::NAN);
    let mut s = format!(
        "|value - target| = {err:e} is not below {tol:e} after {} terms",
        r.terms_used
    );
    if r.tail_bound >= tol {
        s.push_str(&format!(
            "; the tail beyond length {} is bounded only by {:e}",
            r.cutoff_length, r.tail_bound
        ));
    }
    s
}
