//! The single tolerance record threaded through every module.

/// Numeric tolerances. One instance is passed through construction,
/// validation, planning and serialization so that every module agrees on
/// what counts as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed deviation of a vector norm from 1.
    pub norm: f64,
    /// Inner products and determinants treated as zero.
    pub orth: f64,
    /// Distances in the gnomonic plane.
    pub plane: f64,
    /// Angular comparisons, in radians.
    pub ang: f64,
    /// Degeneracy band around the poles and the equator, in degrees.
    pub lat: f64,
    /// Component magnitude below which the canonical sign rule skips to the
    /// next component.
    pub canon: f64,
    /// Projective merge radius for deduplication, in degrees.
    pub merge: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            norm: 1e-9,
            orth: 1e-9,
            plane: 1e-9,
            ang: 1e-9,
            lat: 1e-6,
            canon: 1e-12,
            merge: 1e-7,
        }
    }
}

impl Tolerances {
    /// Set a tolerance by name. Used by document overrides and the CLI.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), String> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(format!("tolerance value {value} must be finite and non-negative"));
        }
        match name {
            "norm" => self.norm = value,
            "orth" => self.orth = value,
            "plane" => self.plane = value,
            "ang" => self.ang = value,
            "lat" => self.lat = value,
            "canon" => self.canon = value,
            "merge" => self.merge = value,
            _ => return Err(format!("unknown tolerance `{name}`")),
        }
        Ok(())
    }
}
