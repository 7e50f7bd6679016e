//! Spherical and projective geometry primitives.
//!
//! Directions are unit vectors in real 3-space; a rank-1 subspace is a unit
//! vector modulo sign. A [`Frame`] fixes a pole and an equator so that
//! points can be addressed by latitude and longitude, projected gnomonically
//! onto the tangent plane at the pole, and walked down descent circles.

use thiserror::Error;

use crate::config::Tolerances;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    #[error("({x}, {y}, {z}) has norm {norm}, expected a unit vector")]
    NonUnitVector { x: f64, y: f64, z: f64, norm: f64 },
    #[error("cannot normalize a zero or non-finite vector")]
    ZeroVector,
    #[error("latitude {lat_deg} outside [-90, 90]")]
    LatitudeOutOfRange { lat_deg: f64 },
    #[error("longitude {lon_deg} is not finite")]
    LongitudeNotFinite { lon_deg: f64 },
    #[error("point at latitude {lat_deg} must lie strictly between equator and pole")]
    DegeneratePoint { lat_deg: f64 },
    #[error("descent angle {beta_deg} out of range: |beta| must be below 90")]
    BetaOutOfRange { beta_deg: f64 },
    #[error("point at latitude {lat_deg} does not lie in the open northern hemisphere")]
    EquatorOrSouthern { lat_deg: f64 },
    #[error("not a right-handed orthonormal basis (residual {residual:e})")]
    NonOrthonormalFrame { residual: f64 },
}

/// A unit vector in real 3-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVec {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVec {
    /// Accepts components whose norm is within `tol.norm` of 1.
    pub fn new(x: f64, y: f64, z: f64, tol: &Tolerances) -> Result<UnitVec, GeomError> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > tol.norm {
            return Err(GeomError::NonUnitVector { x, y, z, norm });
        }
        Ok(UnitVec { x, y, z })
    }

    /// Scales an arbitrary non-zero vector onto the unit sphere.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<UnitVec, GeomError> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(GeomError::ZeroVector);
        }
        let norm = (x * x + y * y + z * z).sqrt();
        if norm < 1e-150 {
            return Err(GeomError::ZeroVector);
        }
        // Leave already-unit input untouched so round-trips are bit-stable.
        if (norm - 1.0).abs() <= 1e-12 {
            return Ok(UnitVec { x, y, z });
        }
        Ok(UnitVec {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub(crate) fn raw(x: f64, y: f64, z: f64) -> UnitVec {
        UnitVec { x, y, z }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, other: &UnitVec) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &UnitVec) -> [f64; 3] {
        [
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        ]
    }

    /// The antipodal representative; signed zeros are normalized away.
    pub fn flipped(&self) -> UnitVec {
        UnitVec {
            x: -self.x + 0.0,
            y: -self.y + 0.0,
            z: -self.z + 0.0,
        }
    }
}

fn cross_norm(a: &UnitVec, b: &UnitVec) -> f64 {
    let c = a.cross(b);
    (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
}

/// Angle between two unit vectors in radians, accurate near 0 and pi.
pub fn angle_between(a: &UnitVec, b: &UnitVec) -> f64 {
    cross_norm(a, b).atan2(a.dot(b))
}

/// A rank-1 subspace: a unit vector in canonical sign form. The first
/// component whose magnitude exceeds the canonicalization threshold is
/// strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjPoint {
    rep: UnitVec,
}

impl ProjPoint {
    pub fn new(v: UnitVec, tol: &Tolerances) -> ProjPoint {
        canonicalize(v, tol)
    }

    /// Validates the norm before canonicalizing, for raw component input.
    pub fn from_components(x: f64, y: f64, z: f64, tol: &Tolerances) -> Result<ProjPoint, GeomError> {
        Ok(canonicalize(UnitVec::new(x, y, z, tol)?, tol))
    }

    pub fn rep(&self) -> UnitVec {
        self.rep
    }
}

/// Sign-canonical representative of the line through `v`. Idempotent, and
/// `canonicalize(v) == canonicalize(-v)` for every unit `v`.
pub fn canonicalize(v: UnitVec, tol: &Tolerances) -> ProjPoint {
    let comps = [v.x, v.y, v.z];
    let mut flip = false;
    for c in comps {
        if c.abs() > tol.canon {
            flip = c < 0.0;
            break;
        }
    }
    let rep = if flip {
        v.flipped()
    } else {
        UnitVec {
            x: v.x + 0.0,
            y: v.y + 0.0,
            z: v.z + 0.0,
        }
    };
    ProjPoint { rep }
}

/// Angle between two rank-1 subspaces, degrees in [0, 90].
pub fn proj_angle(a: &ProjPoint, b: &ProjPoint) -> f64 {
    cross_norm(&a.rep, &b.rep).atan2(a.rep.dot(&b.rep).abs()).to_degrees()
}

/// Latitude and longitude in degrees: lat in [-90, 90], lon in (-180, 180].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatLon {
    lat_deg: f64,
    lon_deg: f64,
}

impl LatLon {
    pub fn new(lat_deg: f64, lon_deg: f64) -> Result<LatLon, GeomError> {
        if lat_deg.is_nan() || lat_deg.abs() > 90.0 {
            return Err(GeomError::LatitudeOutOfRange { lat_deg });
        }
        if !lon_deg.is_finite() {
            return Err(GeomError::LongitudeNotFinite { lon_deg });
        }
        Ok(LatLon {
            lat_deg,
            lon_deg: normalize_lon(lon_deg),
        })
    }

    pub fn lat_deg(&self) -> f64 {
        self.lat_deg
    }

    pub fn lon_deg(&self) -> f64 {
        self.lon_deg
    }
}

/// Signed representative of a longitude (or longitude difference) in
/// (-180, 180].
pub fn normalize_lon(lon_deg: f64) -> f64 {
    let mut r = lon_deg % 360.0;
    if r <= -180.0 {
        r += 360.0;
    } else if r > 180.0 {
        r -= 360.0;
    }
    r + 0.0
}

/// A right-handed orthonormal basis: `e3` is the pole, `e1` the longitude-0
/// equator direction, `e2` the longitude-90 equator direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    e1: UnitVec,
    e2: UnitVec,
    e3: UnitVec,
}

impl Frame {
    pub fn new(e1: UnitVec, e2: UnitVec, e3: UnitVec, tol: &Tolerances) -> Result<Frame, GeomError> {
        let d12 = e1.dot(&e2).abs();
        let d13 = e1.dot(&e3).abs();
        let d23 = e2.dot(&e3).abs();
        let det = {
            let c = e2.cross(&e3);
            e1.x * c[0] + e1.y * c[1] + e1.z * c[2]
        };
        let residual = d12.max(d13).max(d23).max((det - 1.0).abs());
        if residual > tol.orth {
            return Err(GeomError::NonOrthonormalFrame { residual });
        }
        Ok(Frame { e1, e2, e3 })
    }

    /// The world frame: x, y axes on the equator, z at the pole.
    pub fn standard() -> Frame {
        Frame {
            e1: UnitVec::raw(1.0, 0.0, 0.0),
            e2: UnitVec::raw(0.0, 1.0, 0.0),
            e3: UnitVec::raw(0.0, 0.0, 1.0),
        }
    }

    /// Frame with the given pole whose longitude-0 meridian passes through
    /// `through`; `e2` follows by right-handedness.
    pub fn from_pole_and_meridian(
        pole: UnitVec,
        through: UnitVec,
        tol: &Tolerances,
    ) -> Result<Frame, GeomError> {
        let d = through.dot(&pole);
        let hx = through.x - d * pole.x;
        let hy = through.y - d * pole.y;
        let hz = through.z - d * pole.z;
        let hn = (hx * hx + hy * hy + hz * hz).sqrt();
        if hn <= tol.orth {
            let lat_deg = 90.0 - angle_between(&pole, &through).to_degrees();
            return Err(GeomError::DegeneratePoint { lat_deg });
        }
        let e1 = UnitVec::raw(hx / hn, hy / hn, hz / hn);
        let c = pole.cross(&e1);
        let e2 = UnitVec::raw(c[0], c[1], c[2]);
        Ok(Frame { e1, e2, e3: pole })
    }

    pub fn e1(&self) -> UnitVec {
        self.e1
    }

    pub fn e2(&self) -> UnitVec {
        self.e2
    }

    /// The pole.
    pub fn e3(&self) -> UnitVec {
        self.e3
    }

    /// Coordinates of `v` in this basis.
    pub fn to_local(&self, v: &UnitVec) -> UnitVec {
        UnitVec::raw(v.dot(&self.e1), v.dot(&self.e2), v.dot(&self.e3))
    }

    /// Inverse of [`Frame::to_local`].
    pub fn from_local(&self, v: &UnitVec) -> UnitVec {
        UnitVec::raw(
            v.x * self.e1.x + v.y * self.e2.x + v.z * self.e3.x,
            v.x * self.e1.y + v.y * self.e2.y + v.z * self.e3.y,
            v.x * self.e1.z + v.y * self.e2.z + v.z * self.e3.z,
        )
    }
}

/// A point on the tangent plane at the pole, in earth radii. The pole
/// projects to the origin and a point at colatitude `c` lands at radius
/// `tan(c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub u: f64,
    pub v: f64,
}

impl PlanePoint {
    pub fn radius(&self) -> f64 {
        self.u.hypot(self.v)
    }
}

/// vec = cos(lat)cos(lon) e1 + cos(lat)sin(lon) e2 + sin(lat) e3.
pub fn latlon_to_vec(f: &Frame, p: LatLon) -> UnitVec {
    let lat = p.lat_deg.to_radians();
    let lon = p.lon_deg.to_radians();
    let local = UnitVec::raw(lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin());
    f.from_local(&local)
}

/// Inverse chart; longitude 0 by convention at the poles.
pub fn vec_to_latlon(f: &Frame, v: &UnitVec) -> LatLon {
    let local = f.to_local(v);
    let h = local.x.hypot(local.y);
    let lat_deg = local.z.atan2(h).to_degrees();
    let lon_deg = if h == 0.0 {
        0.0
    } else {
        normalize_lon(local.y.atan2(local.x).to_degrees())
    };
    LatLon { lat_deg, lon_deg }
}

fn band_check(f: &Frame, psi: &UnitVec, tol: &Tolerances) -> Result<LatLon, GeomError> {
    let ll = vec_to_latlon(f, psi);
    if ll.lat_deg <= tol.lat || ll.lat_deg >= 90.0 - tol.lat {
        return Err(GeomError::DegeneratePoint { lat_deg: ll.lat_deg });
    }
    Ok(ll)
}

/// The equator crossing of the descent circle of `psi`, at longitude
/// `lon(psi) + 90` by the fixed sign convention.
pub fn e_point(f: &Frame, psi: &UnitVec, tol: &Tolerances) -> Result<UnitVec, GeomError> {
    let ll = band_check(f, psi, tol)?;
    let e = LatLon::new(0.0, ll.lon_deg + 90.0).expect("equator longitude is finite");
    Ok(latlon_to_vec(f, e))
}

/// The third member of the orthogonal triple through `psi` and its equator
/// point: latitude `90 - lat(psi)`, longitude `lon(psi) + 180`.
pub fn perp_point(f: &Frame, psi: &UnitVec, tol: &Tolerances) -> Result<UnitVec, GeomError> {
    let ll = band_check(f, psi, tol)?;
    let p = LatLon::new(90.0 - ll.lat_deg, ll.lon_deg + 180.0).expect("valid by band check");
    Ok(latlon_to_vec(f, p))
}

/// Central projection from the sphere's centre onto the tangent plane at the
/// pole: `(u, v) = (x/z, y/z)` in frame coordinates.
pub fn gnomonic(f: &Frame, v: &UnitVec, tol: &Tolerances) -> Result<PlanePoint, GeomError> {
    let local = f.to_local(v);
    let h = local.x.hypot(local.y);
    let lat_deg = local.z.atan2(h).to_degrees();
    if lat_deg <= tol.lat {
        return Err(GeomError::EquatorOrSouthern { lat_deg });
    }
    Ok(PlanePoint {
        u: local.x / local.z,
        v: local.y / local.z,
    })
}

/// Inverse of [`gnomonic`]; plane coordinates must be finite.
pub fn ungnomonic(f: &Frame, p: &PlanePoint) -> UnitVec {
    let local = UnitVec::normalized(p.u, p.v, 1.0).expect("finite plane point");
    f.from_local(&local)
}

/// Walk down the descent circle of `psi` by plane angle `beta_deg`: project
/// gnomonically, move `r tan(beta)` along the tangent line at the image (in
/// the +longitude direction for positive beta), and lift back. The result
/// stays in the plane spanned by `psi` and its equator point, and its
/// colatitude grows by the secant law `r' = r sec(beta)`.
pub fn descent_point(
    f: &Frame,
    psi: &UnitVec,
    beta_deg: f64,
    tol: &Tolerances,
) -> Result<UnitVec, GeomError> {
    band_check(f, psi, tol)?;
    if beta_deg.is_nan() || beta_deg.abs() >= 90.0 {
        return Err(GeomError::BetaOutOfRange { beta_deg });
    }
    if beta_deg == 0.0 {
        return Ok(*psi);
    }
    let p = gnomonic(f, psi, tol)?;
    let r = p.radius();
    let phi = p.v.atan2(p.u);
    let t = r * beta_deg.to_radians().tan();
    let moved = PlanePoint {
        u: p.u - t * phi.sin(),
        v: p.v + t * phi.cos(),
    };
    Ok(ungnomonic(f, &moved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn unit(x: f64, y: f64, z: f64) -> UnitVec {
        UnitVec::normalized(x, y, z).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let t = tol();
        let p = canonicalize(unit(0.0, 0.0, 1.0), &t);
        assert_eq!(p.rep(), unit(0.0, 0.0, 1.0));
        let p = canonicalize(unit(0.0, 0.0, -1.0), &t);
        assert_eq!(p.rep(), unit(0.0, 0.0, 1.0));
        let p = canonicalize(UnitVec::new(-0.5, 0.0, -0.8660254037844386, &t).unwrap(), &t);
        assert!((p.rep().x() - 0.5).abs() < 1e-15);
        assert!((p.rep().z() - 0.8660254037844386).abs() < 1e-15);
    }

    #[test]
    fn non_unit_vector_rejected() {
        let t = tol();
        assert!(matches!(
            UnitVec::new(1.0, 1.0, 0.0, &t),
            Err(GeomError::NonUnitVector { .. })
        ));
        assert!(matches!(
            ProjPoint::from_components(0.0, 0.0, 0.5, &t),
            Err(GeomError::NonUnitVector { .. })
        ));
    }

    #[test]
    fn latlon_chart_basics() {
        let f = Frame::standard();
        let pole = latlon_to_vec(&f, LatLon::new(90.0, 0.0).unwrap());
        assert!(angle_between(&pole, &f.e3()) < 1e-12);
        let e2 = latlon_to_vec(&f, LatLon::new(0.0, 90.0).unwrap());
        assert!(angle_between(&e2, &f.e2()) < 1e-12);
        let a = latlon_to_vec(&f, LatLon::new(60.0, 0.0).unwrap());
        assert!((a.x() - 0.5).abs() < 1e-12);
        assert!(a.y().abs() < 1e-12);
        assert!((a.z() - 0.8660254037844386).abs() < 1e-12);
    }

    #[test]
    fn lon_normalization() {
        assert_eq!(normalize_lon(190.0), -170.0);
        assert_eq!(normalize_lon(-180.0), 180.0);
        assert_eq!(normalize_lon(180.0), 180.0);
        assert_eq!(normalize_lon(540.0), 180.0);
        assert!(LatLon::new(91.0, 0.0).is_err());
    }

    #[test]
    fn e_point_examples() {
        let t = tol();
        let f = Frame::standard();
        let psi = latlon_to_vec(&f, LatLon::new(60.0, 0.0).unwrap());
        let e = e_point(&f, &psi, &t).unwrap();
        assert!(angle_between(&e, &unit(0.0, 1.0, 0.0)) < 1e-12);

        let psi = latlon_to_vec(&f, LatLon::new(30.0, 45.0).unwrap());
        let e = e_point(&f, &psi, &t).unwrap();
        let ll = vec_to_latlon(&f, &e);
        assert!(ll.lat_deg().abs() < 1e-12);
        assert!((ll.lon_deg() - 135.0).abs() < 1e-9);

        let pole = latlon_to_vec(&f, LatLon::new(90.0, 0.0).unwrap());
        assert!(matches!(
            e_point(&f, &pole, &t),
            Err(GeomError::DegeneratePoint { .. })
        ));
        let equator = latlon_to_vec(&f, LatLon::new(0.0, 10.0).unwrap());
        assert!(matches!(
            e_point(&f, &equator, &t),
            Err(GeomError::DegeneratePoint { .. })
        ));
    }

    #[test]
    fn perp_point_examples() {
        let t = tol();
        let f = Frame::standard();
        let psi = latlon_to_vec(&f, LatLon::new(60.0, 0.0).unwrap());
        let p = perp_point(&f, &psi, &t).unwrap();
        assert!((p.x() + 0.8660254037844386).abs() < 1e-12);
        assert!(p.y().abs() < 1e-12);
        assert!((p.z() - 0.5).abs() < 1e-12);

        let psi = latlon_to_vec(&f, LatLon::new(45.0, 10.0).unwrap());
        let p = perp_point(&f, &psi, &t).unwrap();
        let ll = vec_to_latlon(&f, &p);
        assert!((ll.lat_deg() - 45.0).abs() < 1e-9);
        assert!((ll.lon_deg() + 170.0).abs() < 1e-9);
    }

    #[test]
    fn gnomonic_examples() {
        let t = tol();
        let f = Frame::standard();
        let pole = latlon_to_vec(&f, LatLon::new(90.0, 0.0).unwrap());
        let p = gnomonic(&f, &pole, &t).unwrap();
        assert!(p.radius() < 1e-12);

        let a = latlon_to_vec(&f, LatLon::new(60.0, 0.0).unwrap());
        let p = gnomonic(&f, &a, &t).unwrap();
        assert!((p.u - (30.0f64).to_radians().tan()).abs() < 1e-12);
        assert!(p.v.abs() < 1e-12);

        let eq = latlon_to_vec(&f, LatLon::new(0.0, 33.0).unwrap());
        assert!(matches!(
            gnomonic(&f, &eq, &t),
            Err(GeomError::EquatorOrSouthern { .. })
        ));
    }

    #[test]
    fn descent_point_examples() {
        let t = tol();
        let f = Frame::standard();
        let psi = latlon_to_vec(&f, LatLon::new(60.0, 0.0).unwrap());

        let same = descent_point(&f, &psi, 0.0, &t).unwrap();
        assert!(angle_between(&same, &psi) < 1e-12);

        // Oracle: r' = r sec(beta), plane angle moves by beta.
        let moved = descent_point(&f, &psi, 36.0, &t).unwrap();
        let p = gnomonic(&f, &moved, &t).unwrap();
        let r_expected = (30.0f64).to_radians().tan() / (36.0f64).to_radians().cos();
        assert!((p.radius() - r_expected).abs() < 1e-12);
        assert!((r_expected - 0.7136441795461798).abs() < 1e-12);
        assert!((p.v.atan2(p.u).to_degrees() - 36.0).abs() < 1e-9);

        assert!(matches!(
            descent_point(&f, &psi, 90.0, &t),
            Err(GeomError::BetaOutOfRange { .. })
        ));
    }

    #[test]
    fn proj_angle_examples() {
        let t = tol();
        let a = canonicalize(unit(0.0, 0.0, 1.0), &t);
        assert!(proj_angle(&a, &a) < 1e-12);
        let b = canonicalize(unit(1.0, 0.0, 0.0), &t);
        assert!((proj_angle(&a, &b) - 90.0).abs() < 1e-12);
        let c = canonicalize(unit(0.5, 0.0, 0.8660254037844386), &t);
        assert!((proj_angle(&a, &c) - 30.0).abs() < 1e-9);
    }

    prop_compose! {
        fn arb_unit()(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) -> Option<UnitVec> {
            UnitVec::normalized(x, y, z).ok()
        }
    }

    prop_compose! {
        // Latitudes away from the degenerate band so the triple construction applies.
        fn arb_band_point()(lat in 1.0f64..89.0, lon in -179.0f64..180.0) -> LatLon {
            LatLon::new(lat, lon).unwrap()
        }
    }

    proptest! {
        #[test]
        fn canonicalize_idempotent_and_sign_invariant(v in arb_unit()) {
            let t = tol();
            prop_assume!(v.is_some());
            let v = v.unwrap();
            let p = canonicalize(v, &t);
            let q = canonicalize(v.flipped(), &t);
            prop_assert_eq!(p.rep(), q.rep());
            prop_assert_eq!(canonicalize(p.rep(), &t).rep(), p.rep());
        }

        #[test]
        fn triple_is_orthogonal(ll in arb_band_point()) {
            let t = tol();
            let f = Frame::standard();
            let psi = latlon_to_vec(&f, ll);
            let e = e_point(&f, &psi, &t).unwrap();
            let p = perp_point(&f, &psi, &t).unwrap();
            prop_assert!(psi.dot(&e).abs() < t.orth);
            prop_assert!(psi.dot(&p).abs() < t.orth);
            prop_assert!(e.dot(&p).abs() < t.orth);

            // Latitude and longitude relations of the perpendicular point.
            let pl = vec_to_latlon(&f, &p);
            prop_assert!((pl.lat_deg() + ll.lat_deg() - 90.0).abs() < 1e-9);
            let dlon = normalize_lon(pl.lon_deg() - ll.lon_deg() - 180.0);
            prop_assert!(dlon.abs() < 1e-9);
        }

        #[test]
        fn descent_point_invariants(ll in arb_band_point(), beta in -89.0f64..89.0) {
            let t = tol();
            let f = Frame::standard();
            let psi = latlon_to_vec(&f, ll);
            let e = e_point(&f, &psi, &t).unwrap();
            let moved = descent_point(&f, &psi, beta, &t).unwrap();

            // Coplanar with psi and its equator point.
            let c = psi.cross(&e);
            let det = c[0] * moved.x() + c[1] * moved.y() + c[2] * moved.z();
            prop_assert!(det.abs() < t.orth);

            // Colatitude never decreases.
            let colat0 = angle_between(&psi, &f.e3());
            let colat1 = angle_between(&moved, &f.e3());
            prop_assert!(colat1 >= colat0 - t.ang);

            // Gnomonic image stays on the tangent line at the summit image.
            let p0 = gnomonic(&f, &psi, &t).unwrap();
            let p1 = gnomonic(&f, &moved, &t).unwrap();
            let r = p0.radius();
            let radial = (p1.u * p0.u + p1.v * p0.v) / r;
            prop_assert!((radial - r).abs() < t.plane.max(r * 1e-12));
        }

        #[test]
        fn latlon_round_trip(ll in arb_band_point()) {
            let f = Frame::standard();
            let v = latlon_to_vec(&f, ll);
            let back = vec_to_latlon(&f, &v);
            prop_assert!((back.lat_deg() - ll.lat_deg()).abs() < 1e-9);
            prop_assert!(normalize_lon(back.lon_deg() - ll.lon_deg()).abs() < 1e-9);
        }

        #[test]
        fn gnomonic_round_trip(lat in 1.0f64..90.0, lon in -179.0f64..180.0) {
            let t = tol();
            let f = Frame::standard();
            let v = latlon_to_vec(&f, LatLon::new(lat, lon).unwrap());
            let p = gnomonic(&f, &v, &t).unwrap();
            let back = ungnomonic(&f, &p);
            prop_assert!(angle_between(&v, &back) < t.ang);
            let colat = (90.0 - lat).to_radians();
            prop_assert!((p.radius() - colat.tan()).abs() < 1e-9 * (1.0 + colat.tan()));
        }
    }
}
