//! Numerical tolerances, collected in one place.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Algebraic identities: determinants, trace identities.
    pub algebraic: f64,
    /// Lengths and distances.
    pub length: f64,
    /// Angles computed directly from tangents.
    pub angle: f64,
    /// Equality of angles across records (theta comparisons).
    pub angle_equality: f64,
    /// Deviation beyond which an equal-class pair is reported by the contrapositive probe.
    pub contrapositive: f64,
    /// |trace| band around 2 for isometry classification.
    pub classify: f64,
    /// Hyperbolic distance at which a point counts as lying on a geodesic.
    pub on_geodesic: f64,
    /// Parameter agreement for merging crossings.
    pub param_merge: f64,
    /// Parameter gap below which two distinct lifts signal a triple point.
    pub triple_point: f64,
    /// Minimum |det| of the tangent pair at a crossing.
    pub tangent_det: f64,
    /// Each step of a strictly decreasing column must drop by at least this much.
    pub monotone_step: f64,
    /// Smallest admissible imaginary part of a point.
    pub min_height: f64,
    /// Projective separation below which boundary points coincide.
    pub boundary: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        algebraic: 1e-12,
        length: 1e-9,
        angle: 1e-9,
        angle_equality: 1e-8,
        contrapositive: 1e-6,
        classify: 1e-10,
        on_geodesic: 1e-9,
        param_merge: 1e-9,
        triple_point: 1e-7,
        tangent_det: 1e-12,
        monotone_step: 1e-10,
        min_height: 1e-14,
        boundary: 1e-12,
    };

    /// Applies `key=value` overrides separated by commas, e.g.
    /// `angle_equality=1e-7,monotone_step=1e-11`. Unknown keys are rejected.
    pub fn with_overrides(mut self, overrides: &str) -> Result<Self> {
        for item in overrides.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("tolerance override {item:?} is not key=value")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("tolerance {key} has non-numeric value {value:?}")))?;
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidInput(format!("tolerance {key} must be finite and non-negative")));
            }
            let slot = match key.trim() {
                "algebraic" => &mut self.algebraic,
                "length" => &mut self.length,
                "angle" => &mut self.angle,
                "angle_equality" => &mut self.angle_equality,
                "contrapositive" => &mut self.contrapositive,
                "classify" => &mut self.classify,
                "on_geodesic" => &mut self.on_geodesic,
                "param_merge" => &mut self.param_merge,
                "triple_point" => &mut self.triple_point,
                "tangent_det" => &mut self.tangent_det,
                "monotone_step" => &mut self.monotone_step,
                "min_height" => &mut self.min_height,
                "boundary" => &mut self.boundary,
                other => return Err(Error::InvalidInput(format!("unknown tolerance key {other:?}"))),
            };
            *slot = value;
        }
        Ok(self)
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Defaults used by the geometric primitives.
pub const TOL: Tolerances = Tolerances::DEFAULT;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_apply_and_reject_unknown_keys() {
        let t = Tolerances::DEFAULT.with_overrides("angle_equality=1e-7, monotone_step=0").unwrap();
        assert_eq!(t.angle_equality, 1e-7);
        assert_eq!(t.monotone_step, 0.0);
        assert!(Tolerances::DEFAULT.with_overrides("bogus=1").is_err());
        assert!(Tolerances::DEFAULT.with_overrides("length").is_err());
        assert!(Tolerances::DEFAULT.with_overrides("length=-1").is_err());
        assert_eq!(Tolerances::DEFAULT.with_overrides("").unwrap(), Tolerances::DEFAULT);
    }
}
