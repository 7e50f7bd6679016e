//! Finite chains of great-circle descents.
//!
//! In the gnomonic plane a descent step of plane angle `beta` multiplies the
//! radius by `sec(beta)` exactly and turns the polar angle by `beta`. The
//! planner exploits this: it reaches the target longitude with the smallest
//! number of equal steps whose accumulated secant factor does not overshoot
//! the target radius, then lands exactly with one `(+gamma, -gamma)` zigzag
//! pair. A strictly more southerly target is always reachable; a target at
//! the same or higher latitude never is, because `sec(beta) >= 1`.

use thiserror::Error;

use crate::config::Tolerances;
use crate::geom::{
    angle_between, descent_point, latlon_to_vec, vec_to_latlon, Frame, GeomError, LatLon,
    UnitVec,
};

/// Planner refuses to emit more steps than this.
pub const MAX_PLAN_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DescentError {
    #[error("target latitude {to_lat} is not strictly more southerly than start latitude {from_lat}")]
    NotMoreSoutherly { from_lat: f64, to_lat: f64 },
    #[error("endpoint at latitude {lat_deg} lies in the pole/equator degeneracy band")]
    DegenerateEndpoint { lat_deg: f64 },
    #[error("plan needs more than {limit} steps")]
    PlanTooLong { limit: usize },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// One descent step: move from `from` along its descent circle by the signed
/// plane angle `beta_deg`, with `0 < |beta| < 90`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentStep {
    pub beta_deg: f64,
    pub from: UnitVec,
    pub to: UnitVec,
}

/// A chain of descent steps; `points` has one more entry than `steps` and
/// colatitude grows along it.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentPath {
    pub frame: Frame,
    pub points: Vec<UnitVec>,
    pub steps: Vec<DescentStep>,
}

impl DescentPath {
    pub fn start(&self) -> &UnitVec {
        self.points.first().expect("path has at least one point")
    }

    pub fn end(&self) -> &UnitVec {
        self.points.last().expect("path has at least one point")
    }
}

/// A broken path invariant, reported by index into the step list.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub index: usize,
    pub message: String,
}

fn band(lat_deg: f64, tol: &Tolerances) -> Result<(), DescentError> {
    if lat_deg <= tol.lat || lat_deg >= 90.0 - tol.lat {
        return Err(DescentError::DegenerateEndpoint { lat_deg });
    }
    Ok(())
}

/// Accumulated secant factor of `n` equal steps covering `dphi` degrees.
/// Infinite when a single step would reach or pass 90 degrees.
fn secant_factor(dphi_deg: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let step = dphi_deg.abs() / n as f64;
    if step >= 90.0 {
        return f64::INFINITY;
    }
    let sec = 1.0 / step.to_radians().cos();
    sec.powi(n as i32)
}

/// Smallest `n` with `sec(dphi/n)^n <= ratio`; 0 when `dphi == 0`.
fn smallest_step_count(dphi_deg: f64, ratio: f64) -> Result<usize, DescentError> {
    if dphi_deg == 0.0 {
        return Ok(0);
    }
    // The factor is strictly decreasing in n once steps are below 90
    // degrees, and tends to 1 < ratio, so a smallest n exists.
    let mut lo = (dphi_deg.abs() / 90.0).floor() as usize + 1;
    if secant_factor(dphi_deg, lo) <= ratio {
        return Ok(lo);
    }
    let mut hi = lo;
    loop {
        hi = hi.saturating_mul(2);
        if hi > MAX_PLAN_STEPS {
            return Err(DescentError::PlanTooLong { limit: MAX_PLAN_STEPS });
        }
        if secant_factor(dphi_deg, hi) <= ratio {
            break;
        }
    }
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if secant_factor(dphi_deg, mid) <= ratio {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Plan a descent chain from `from` to a strictly more southerly `to`.
/// Deterministic: identical inputs give identical paths.
pub fn plan(
    frame: &Frame,
    from: LatLon,
    to: LatLon,
    tol: &Tolerances,
) -> Result<DescentPath, DescentError> {
    band(from.lat_deg(), tol)?;
    band(to.lat_deg(), tol)?;
    if to.lat_deg() >= from.lat_deg() {
        return Err(DescentError::NotMoreSoutherly {
            from_lat: from.lat_deg(),
            to_lat: to.lat_deg(),
        });
    }

    let r = (90.0 - from.lat_deg()).to_radians().tan();
    let big_r = (90.0 - to.lat_deg()).to_radians().tan();
    let ratio = big_r / r;
    let dphi = crate::geom::normalize_lon(to.lon_deg() - from.lon_deg());

    let n = smallest_step_count(dphi, ratio)?;
    let mut betas: Vec<f64> = Vec::with_capacity(n + 2);
    if n > 0 {
        let step = dphi / n as f64;
        betas.extend(std::iter::repeat_n(step, n));
    }
    // Zigzag pair landing exactly on the target radius: sec^2(gamma) is the
    // remaining ratio. Skipped when the correction is below angular noise.
    let reached = secant_factor(dphi, n);
    let gamma = (reached / ratio).sqrt().min(1.0).acos();
    if gamma >= tol.ang {
        betas.push(gamma.to_degrees());
        betas.push(-gamma.to_degrees());
    }

    let mut points = vec![latlon_to_vec(frame, from)];
    let mut steps = Vec::with_capacity(betas.len());
    for beta in betas {
        let cur = *points.last().expect("non-empty");
        let next = descent_point(frame, &cur, beta, tol)?;
        steps.push(DescentStep {
            beta_deg: beta,
            from: cur,
            to: next,
        });
        points.push(next);
    }
    Ok(DescentPath {
        frame: *frame,
        points,
        steps,
    })
}

/// Recheck every path invariant with geometry primitives only; the planner
/// and this checker share nothing beyond those primitives. Returns the empty
/// list when the path is sound.
pub fn validate(path: &DescentPath, tol: &Tolerances) -> Vec<Violation> {
    let mut out = Vec::new();
    if path.points.len() != path.steps.len() + 1 {
        out.push(Violation {
            index: 0,
            message: format!(
                "{} points do not match {} steps",
                path.points.len(),
                path.steps.len()
            ),
        });
        return out;
    }
    let pole = path.frame.e3();
    for (i, step) in path.steps.iter().enumerate() {
        if angle_between(&step.from, &path.points[i]) > tol.ang {
            out.push(Violation {
                index: i,
                message: "step origin disagrees with path point".to_string(),
            });
        }
        if angle_between(&step.to, &path.points[i + 1]) > tol.ang {
            out.push(Violation {
                index: i,
                message: "step target disagrees with path point".to_string(),
            });
        }
        if !(step.beta_deg != 0.0 && step.beta_deg.abs() < 90.0) {
            out.push(Violation {
                index: i,
                message: format!("step angle {} outside 0 < |beta| < 90", step.beta_deg),
            });
            continue;
        }
        match descent_point(&path.frame, &path.points[i], step.beta_deg, tol) {
            Ok(expected) => {
                if angle_between(&expected, &path.points[i + 1]) > tol.ang {
                    out.push(Violation {
                        index: i,
                        message: "point is not the descent of its predecessor".to_string(),
                    });
                }
            }
            Err(e) => out.push(Violation {
                index: i,
                message: format!("step cannot be recomputed: {e}"),
            }),
        }
        let colat0 = angle_between(&path.points[i], &pole);
        let colat1 = angle_between(&path.points[i + 1], &pole);
        if colat1 < colat0 - tol.ang {
            out.push(Violation {
                index: i,
                message: "colatitude decreases along the path".to_string(),
            });
        }
    }
    for i in 1..path.points.len().saturating_sub(1) {
        let lat = vec_to_latlon(&path.frame, &path.points[i]).lat_deg();
        if lat <= tol.lat || lat >= 90.0 - tol.lat {
            out.push(Violation {
                index: i,
                message: format!("interior point at latitude {lat} leaves the open band"),
            });
        }
    }
    out
}

/// Scalar cross-check, independent of the vector recomputation in
/// [`validate`]: every step must satisfy
/// `tan(colat_next) = tan(colat) * sec(beta)`.
pub fn check_radius_law(path: &DescentPath, tol: &Tolerances) -> Vec<Violation> {
    let mut out = Vec::new();
    let pole = path.frame.e3();
    for (i, step) in path.steps.iter().enumerate() {
        if i + 1 >= path.points.len() {
            break;
        }
        let colat0 = angle_between(&path.points[i], &pole);
        let colat1 = angle_between(&path.points[i + 1], &pole);
        let expected = (colat0.tan() / step.beta_deg.to_radians().cos()).atan();
        if (colat1 - expected).abs() > tol.ang {
            out.push(Violation {
                index: i,
                message: format!(
                    "radius law violated: colatitude {colat1} differs from expected {expected}"
                ),
            });
        }
    }
    out
}
