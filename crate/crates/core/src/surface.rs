//! Marked hyperbolic structures as explicit discrete representations of
//! the free group of rank two.
//!
//! The marking is the ordered generator list: the same word evaluated in two
//! representations names the same free homotopy class.

use std::collections::BTreeMap;
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{word_to_map, Word};
use crate::hypgeom::{translation_along, BoundaryPoint, Geodesic, MoebiusMap};

/// Direction of the twist deformation relative to the representation.
///
/// `b ↦ T(σ·s)·b`, where `T(t)` translates by `t` along the axis of `a`.
/// Calibrated once on `holed_torus(2, 0)` with `y = b` so that the
/// anticlockwise angle from `y` to `a` decreases at `s = 0⁺`.
pub const TWIST_SIGN: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SurfaceKind {
    /// Pair of pants with boundary lengths `[ℓ₁, ℓ₂, ℓ₃]`; boundary classes
    /// are `a`, `b` and `(ab)⁻¹`.
    Pants { lengths: [f64; 3] },
    /// One-holed torus: `a` is a simple closed geodesic of length `length`,
    /// `b` a dual curve crossing it once with length `dual_length` at zero
    /// twist; `twist` is the accumulated Fenchel–Nielsen twist along `a`.
    HoledTorus { length: f64, twist: f64, dual_length: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceRep {
    kind: SurfaceKind,
    generators: Vec<MoebiusMap>,
    distinguished_simple: Option<usize>,
}

fn check_length(name: &str, l: f64) -> Result<()> {
    if l.is_finite() && l > 0.0 {
        Ok(())
    } else {
        Err(Error::DegenerateParams(format!("{name} must be positive and finite, got {l}")))
    }
}

/// Dual length making `b` cross `a` perpendicularly with
/// `sech²(ℓ_b/2) = u·tanh²(ℓ/2)`; any `u ∈ (0, 1)` keeps `tr[a,b] < −2`.
pub fn dual_length_for(length: f64, u: f64) -> f64 {
    2.0 * (1.0 / ((0.5 * length).tanh() * u.sqrt())).acosh()
}

pub fn pants(l1: f64, l2: f64, l3: f64) -> Result<SurfaceRep> {
    check_length("l1", l1)?;
    check_length("l2", l2)?;
    check_length("l3", l3)?;
    let (h1, h2, h3) = (0.5 * l1, 0.5 * l2, 0.5 * l3);
    // Right-angled hexagon: distance between the axes of a and b.
    let cosh_d = (h3.cosh() + h1.cosh() * h2.cosh()) / (h1.sinh() * h2.sinh());
    let d = cosh_d.acosh();
    let near = (0.5 * d).tanh();
    if !(d.is_finite() && near > 0.0 && near < 1.0) {
        return Err(Error::DegenerateParams(format!("pants({l1}, {l2}, {l3}) has degenerate hexagon")));
    }
    let a = MoebiusMap::diagonal(l1);
    let b_axis = Geodesic::new(BoundaryPoint::real(1.0 / near), BoundaryPoint::real(near))?;
    let b = translation_along(&b_axis, l2);
    let rep = SurfaceRep {
        kind: SurfaceKind::Pants { lengths: [l1, l2, l3] },
        generators: vec![a, b],
        distinguished_simple: None,
    };
    rep.validate()?;
    Ok(rep)
}

pub fn holed_torus(length: f64, twist: f64) -> Result<SurfaceRep> {
    check_length("length", length)?;
    holed_torus_with_dual(length, twist, dual_length_for(length, 0.5))
}

pub fn holed_torus_with_dual(length: f64, twist: f64, dual_length: f64) -> Result<SurfaceRep> {
    check_length("length", length)?;
    check_length("dual_length", dual_length)?;
    if !twist.is_finite() {
        return Err(Error::DegenerateParams(format!("twist must be finite, got {twist}")));
    }
    let a = MoebiusMap::diagonal(length);
    let dual_axis = Geodesic::new(BoundaryPoint::real(-1.0), BoundaryPoint::real(1.0))?;
    let b0 = translation_along(&dual_axis, dual_length);
    let b = if twist == 0.0 { b0 } else { MoebiusMap::diagonal(TWIST_SIGN * twist).compose(&b0) };
    let rep = SurfaceRep {
        kind: SurfaceKind::HoledTorus { length, twist, dual_length },
        generators: vec![a, b],
        distinguished_simple: Some(0),
    };
    rep.validate()?;
    Ok(rep)
}

impl SurfaceRep {
    pub fn kind(&self) -> &SurfaceKind {
        &self.kind
    }

    pub fn generators(&self) -> &[MoebiusMap] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn distinguished_simple(&self) -> Option<usize> {
        self.distinguished_simple
    }

    /// The distinguished simple curve as a one-letter word.
    pub fn distinguished_word(&self) -> Result<Word> {
        self.distinguished_simple
            .map(|i| Word::generator(i as u8))
            .ok_or(Error::NoDistinguishedCurve)
    }

    pub fn word_map(&self, w: &Word) -> Result<MoebiusMap> {
        word_to_map(&self.generators, w)
    }

    /// Length of the closed geodesic in the class of `w`.
    pub fn class_length(&self, w: &Word) -> Result<f64> {
        self.word_map(w)?.translation_length()
    }

    /// Axis of `w`, a lift of its closed geodesic.
    pub fn geodesic_rep(&self, w: &Word) -> Result<Geodesic> {
        self.word_map(w)?.axis()
    }

    /// Left twist of distance `s` along the distinguished simple curve.
    pub fn twist_rep(&self, s: f64) -> Result<SurfaceRep> {
        let i = self.distinguished_simple.ok_or(Error::NoDistinguishedCurve)?;
        if s == 0.0 {
            return Ok(self.clone());
        }
        let shift = translation_along(&self.generators[i].axis()?, TWIST_SIGN * s);
        let generators = self
            .generators
            .iter()
            .enumerate()
            .map(|(j, g)| if j == i { *g } else { shift.compose(g) })
            .collect();
        let kind = match self.kind {
            SurfaceKind::HoledTorus { length, twist, dual_length } => {
                SurfaceKind::HoledTorus { length, twist: twist + s, dual_length }
            }
            other => other,
        };
        Ok(SurfaceRep { kind, generators, distinguished_simple: self.distinguished_simple })
    }

    /// Re-checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        if self.generators.len() != 2 {
            return Err(Error::DegenerateParams(format!("expected 2 generators, got {}", self.generators.len())));
        }
        for (i, g) in self.generators.iter().enumerate() {
            if !g.entries().iter().all(|e| e.is_finite()) || (g.det() - 1.0).abs() > 1e-12 {
                return Err(Error::DegenerateParams(format!("generator {i} does not have unit determinant")));
            }
            g.translation_length()
                .map_err(|_| Error::DegenerateParams(format!("generator {i} is not hyperbolic")))?;
        }
        let (a, b) = (self.generators[0], self.generators[1]);
        let trace_ok = |m: &MoebiusMap, l: f64| (m.trace().abs() - 2.0 * (0.5 * l).cosh()).abs() <= 1e-9 * (0.5 * l).cosh().max(1.0);
        match self.kind {
            SurfaceKind::Pants { lengths: [l1, l2, l3] } => {
                let ab_inv = a.compose(&b).inverse();
                if !(trace_ok(&a, l1) && trace_ok(&b, l2) && trace_ok(&ab_inv, l3)) {
                    return Err(Error::DegenerateParams("boundary traces do not match pants lengths".into()));
                }
                if self.distinguished_simple.is_some() {
                    return Err(Error::DegenerateParams("pants carry no distinguished curve".into()));
                }
            }
            SurfaceKind::HoledTorus { length, .. } => {
                if !trace_ok(&a, length) {
                    return Err(Error::DegenerateParams("trace of a does not match its length".into()));
                }
                let comm = a.mul_raw(&b).mul_raw(&a.inverse()).mul_raw(&b.inverse());
                if !(comm.trace() < -2.0 - 1e-9) {
                    return Err(Error::NotDiscrete(comm.trace()));
                }
                if self.distinguished_simple != Some(0) {
                    return Err(Error::DegenerateParams("holed torus twists along generator a".into()));
                }
            }
        }
        Ok(())
    }

    /// Surface file: compact JSON with every float written to 17
    /// significant digits, followed by a newline.
    pub fn to_json(&self) -> String {
        let file = SurfaceFile::from(self);
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
        file.serialize(&mut ser).expect("in-memory serialization");
        buf.push(b'\n');
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    pub fn from_json(text: &str) -> Result<SurfaceRep> {
        let file: SurfaceFile = serde_json::from_str(text)?;
        file.try_into()
    }
}

/// Writes floats as `{:.16e}`, enough digits for an exact round trip.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceFile {
    kind: String,
    params: BTreeMap<String, f64>,
    generators: Vec<[f64; 4]>,
    distinguished_simple: Option<usize>,
}

impl From<&SurfaceRep> for SurfaceFile {
    fn from(rep: &SurfaceRep) -> Self {
        let (kind, params) = match rep.kind {
            SurfaceKind::Pants { lengths: [l1, l2, l3] } => {
                ("pants", vec![("l1", l1), ("l2", l2), ("l3", l3)])
            }
            SurfaceKind::HoledTorus { length, twist, dual_length } => (
                "holed-torus",
                vec![("length", length), ("twist", twist), ("dual_length", dual_length)],
            ),
        };
        SurfaceFile {
            kind: kind.to_string(),
            params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            generators: rep.generators.iter().map(MoebiusMap::entries).collect(),
            distinguished_simple: rep.distinguished_simple,
        }
    }
}

impl TryFrom<SurfaceFile> for SurfaceRep {
    type Error = Error;

    fn try_from(file: SurfaceFile) -> Result<Self> {
        let take = |keys: &[&str]| -> Result<Vec<f64>> {
            let mut extra: Vec<&String> = file.params.keys().filter(|k| !keys.contains(&k.as_str())).collect();
            if let Some(k) = extra.pop() {
                return Err(Error::InvalidInput(format!("unknown surface parameter {k:?}")));
            }
            keys.iter()
                .map(|k| {
                    file.params
                        .get(*k)
                        .copied()
                        .ok_or_else(|| Error::InvalidInput(format!("missing surface parameter {k:?}")))
                })
                .collect()
        };
        let kind = match file.kind.as_str() {
            "pants" => {
                let v = take(&["l1", "l2", "l3"])?;
                SurfaceKind::Pants { lengths: [v[0], v[1], v[2]] }
            }
            "holed-torus" => {
                let v = take(&["length", "twist", "dual_length"])?;
                SurfaceKind::HoledTorus { length: v[0], twist: v[1], dual_length: v[2] }
            }
            other => return Err(Error::InvalidInput(format!("unknown surface kind {other:?}"))),
        };
        let generators = file
            .generators
            .iter()
            .map(|&[a, b, c, d]| MoebiusMap { a, b, c, d })
            .collect();
        let rep = SurfaceRep { kind, generators, distinguished_simple: file.distinguished_simple };
        rep.validate()?;
        Ok(rep)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleKind {
    Pants,
    HoledTorus,
}

/// Deterministic source of points in Teichmüller space: sample `i` depends
/// only on `(seed, i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSampler {
    pub seed: u64,
    pub kind: SampleKind,
    pub length_range: (f64, f64),
    pub twist_range: (f64, f64),
}

impl MetricSampler {
    pub fn new(seed: u64, kind: SampleKind) -> Self {
        MetricSampler { seed, kind, length_range: (0.5, 4.0), twist_range: (-2.0, 2.0) }
    }

    pub fn sample(&self, i: usize) -> SurfaceRep {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i as u64);
        let (lo, hi) = self.length_range;
        let mut length = || rng.random_range(lo..=hi);
        let rep = match self.kind {
            SampleKind::Pants => pants(length(), length(), length()),
            SampleKind::HoledTorus => {
                let l = length();
                let (tlo, thi) = self.twist_range;
                let t = rng.random_range(tlo..=thi);
                let u = rng.random_range(0.25..=0.85);
                holed_torus_with_dual(l, t, dual_length_for(l, u))
            }
        };
        rep.expect("sampler ranges only produce valid surfaces")
    }
}
