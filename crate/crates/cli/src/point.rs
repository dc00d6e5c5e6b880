use holed_torus::{make_surface_point, Error, Result, Root, SurfacePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::PointArgs;

pub fn build(args: &PointArgs) -> Result<SurfacePoint> {
    match args.preset.as_deref() {
        None => make_surface_point(
            args.x1.unwrap_or(3.0),
            args.x2.unwrap_or(3.0),
            args.ldelta,
            args.root.into(),
        ),
        Some("hexagonal") if args.ldelta == 0.0 => Ok(SurfacePoint::hexagonal()),
        Some("hexagonal") => make_surface_point(3.0, 3.0, args.ldelta, args.root.into()),
        Some("random") => random(args.seed, args.ldelta),
        Some(other) => match other.strip_prefix("near-cusp:") {
            Some(eps) => {
                let eps = eps
                    .parse::<f64>()
                    .map_err(|e| Error::Domain(format!("near-cusp length `{eps}`: {e}")))?;
                SurfacePoint::near_cusp(eps, args.ldelta)
            }
            None => Err(Error::Domain(format!(
                "unknown preset `{other}`; expected hexagonal, near-cusp:EPS or random"
            ))),
        },
    }
}

/// Draws `x1, x2` uniformly from `(2.5, 5)` and a root until the cubic has one above 2.
fn random(seed: u64, l_delta: f64) -> Result<SurfacePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..1000 {
        let x1 = rng.random_range(2.5..5.0);
        let x2 = rng.random_range(2.5..5.0);
        let root = if rng.random_bool(0.5) {
            Root::Larger
        } else {
            Root::Smaller
        };
        match make_surface_point(x1, x2, l_delta, root) {
            Ok(pt) => return Ok(pt),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one draw"))
}
