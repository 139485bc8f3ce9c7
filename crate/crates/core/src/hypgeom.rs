//! Upper half-plane geometry: Möbius maps, boundary points, oriented
//! geodesics, distances, angles and hyperbolic trigonometry.
//!
//! Every geodesic carries a standard frame, an isometry sending the
//! imaginary axis (oriented upward) onto it with `i` landing on the point of
//! the geodesic closest to `i`. Most constructions pull back to that frame,
//! where the geodesic is `0 → ∞` and arclength is `ln(y)`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::TOL;

/// Orientation-preserving isometry of H, a real 2×2 matrix with unit
/// determinant taken up to sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IsometryClass {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl MoebiusMap {
    pub const IDENTITY: MoebiusMap = MoebiusMap { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// Builds a map from matrix entries, rescaling to unit determinant.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::BadDeterminant(det));
        }
        Ok(MoebiusMap { a, b, c, d }.scaled(1.0 / det.sqrt()))
    }

    /// `diag(e^{ℓ/2}, e^{-ℓ/2})`: translation by `ℓ` along `0 → ∞`.
    pub fn diagonal(length: f64) -> Self {
        let h = (0.5 * length).exp();
        MoebiusMap { a: h, b: 0.0, c: 0.0, d: 1.0 / h }
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    fn scaled(self, k: f64) -> Self {
        MoebiusMap { a: self.a * k, b: self.b * k, c: self.c * k, d: self.d * k }
    }

    /// Rescales by `1/√det` to remove accumulated drift. Left alone when the
    /// drift is within the rounding error of `ad - bc` itself, since for large
    /// entries that error would otherwise be injected into every entry.
    pub fn renormalized(self) -> Self {
        let det = self.det();
        let noise = 64.0 * f64::EPSILON * ((self.a * self.d).abs() + (self.b * self.c).abs());
        if det > 0.0 && det.is_finite() && (det - 1.0).abs() > noise {
            self.scaled(1.0 / det.sqrt())
        } else {
            self
        }
    }

    /// Plain matrix product `self · other`, no renormalization.
    pub fn mul_raw(&self, o: &MoebiusMap) -> MoebiusMap {
        MoebiusMap {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// `self · other` (apply `other` first), renormalized.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        self.mul_raw(other).renormalized()
    }

    /// Adjugate; equals the inverse for unit determinant.
    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `self · m · self⁻¹`.
    pub fn conjugate(&self, m: &MoebiusMap) -> MoebiusMap {
        self.mul_raw(m).mul_raw(&self.inverse()).renormalized()
    }

    pub fn pow(&self, k: i64) -> MoebiusMap {
        let base = if k < 0 { self.inverse() } else { *self };
        let mut acc = MoebiusMap::IDENTITY;
        for i in 0..k.unsigned_abs() {
            acc = acc.mul_raw(&base);
            if i % 16 == 15 {
                acc = acc.renormalized();
            }
        }
        acc.renormalized()
    }

    /// Equality in PSL(2, R): entrywise within `tol` up to a global sign.
    pub fn approx_eq(&self, other: &MoebiusMap, tol: f64) -> bool {
        let close = |s: f64| {
            (self.a - s * other.a).abs() <= tol
                && (self.b - s * other.b).abs() <= tol
                && (self.c - s * other.c).abs() <= tol
                && (self.d - s * other.d).abs() <= tol
        };
        close(1.0) || close(-1.0)
    }

    fn apply_complex(&self, z: Complex64) -> Complex64 {
        (z * self.a + self.b) / (z * self.c + self.d)
    }

    pub fn apply(&self, p: HPoint) -> Result<HPoint> {
        let w = self.apply_complex(p.to_complex());
        HPoint::new(w.re, w.im)
    }

    pub fn apply_boundary(&self, p: BoundaryPoint) -> BoundaryPoint {
        let (u, v) = p.pair();
        BoundaryPoint::from_pair_unchecked(self.a * u + self.b * v, self.c * u + self.d * v)
    }

    pub fn apply_geodesic(&self, g: &Geodesic) -> Geodesic {
        Geodesic { from: self.apply_boundary(g.from), to: self.apply_boundary(g.to) }
    }

    /// Derivative modulus `1/λ²` at a fixed point given projectively, where
    /// `λ` is the eigenvalue of the fixing eigenvector.
    fn derivative_at_fixed(&self, u: f64, v: f64) -> f64 {
        let lambda = ((self.a * u + self.b * v) * u + (self.c * u + self.d * v) * v) / (u * u + v * v);
        1.0 / (lambda * lambda)
    }

    pub fn classify(&self) -> Result<IsometryClass> {
        let t = self.trace().abs();
        let tol = TOL.classify;
        if t > 2.0 + tol {
            return Ok(IsometryClass::Hyperbolic);
        }
        if t < 2.0 - tol {
            return Ok(IsometryClass::Elliptic);
        }
        if self.approx_eq(&MoebiusMap::IDENTITY, tol) {
            return Ok(IsometryClass::Identity);
        }
        // A genuine parabolic has nilpotent m - sI.
        let s = self.trace().signum();
        let n = MoebiusMap { a: self.a - s, b: self.b, c: self.c, d: self.d - s };
        let n2 = n.mul_raw(&n);
        let norm = |m: &MoebiusMap| m.entries().iter().map(|e| e * e).sum::<f64>().sqrt();
        if norm(&n2) > 1e-3 * norm(&n).powi(2) {
            return Err(Error::AmbiguousClass(self.trace()));
        }
        Ok(IsometryClass::Parabolic)
    }

    fn require_hyperbolic(&self) -> Result<()> {
        match self.classify() {
            Ok(IsometryClass::Hyperbolic) => Ok(()),
            _ => Err(Error::NotHyperbolic(self.trace().abs())),
        }
    }

    /// `2·arccosh(|tr|/2)`.
    pub fn translation_length(&self) -> Result<f64> {
        self.require_hyperbolic()?;
        Ok(2.0 * (0.5 * self.trace().abs()).acosh())
    }

    /// Oriented axis from the repelling to the attracting fixed point.
    pub fn axis(&self) -> Result<Geodesic> {
        self.require_hyperbolic()?;
        let t = self.trace();
        let root = (t * t - 4.0).sqrt();
        let l1 = 0.5 * (t + t.signum() * root);
        let l2 = 1.0 / l1;
        let eigvec = |lambda: f64| {
            let v1 = (self.b, lambda - self.a);
            let v2 = (lambda - self.d, self.c);
            if v1.0.hypot(v1.1) >= v2.0.hypot(v2.1) {
                v1
            } else {
                v2
            }
        };
        let (p, q) = (eigvec(l1), eigvec(l2));
        let (dp, dq) = (self.derivative_at_fixed(p.0, p.1), self.derivative_at_fixed(q.0, q.1));
        let (rep, att) = if dp < dq { (q, p) } else { (p, q) };
        Geodesic::new(BoundaryPoint::new(rep.0, rep.1)?, BoundaryPoint::new(att.0, att.1)?)
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Point of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HPoint {
    x: f64,
    y: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > TOL.min_height) || !x.is_finite() || !y.is_finite() {
            return Err(Error::DegeneratePoint(y));
        }
        Ok(HPoint { x, y })
    }

    pub const I: HPoint = HPoint { x: 0.0, y: 1.0 };

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

/// Hyperbolic distance, computed as `2·asinh(|p − q| / (2√(p_y q_y)))`.
pub fn dist(p: HPoint, q: HPoint) -> f64 {
    let e = (p.x - q.x).hypot(p.y - q.y);
    2.0 * (e / (2.0 * (p.y * q.y).sqrt())).asinh()
}

/// Point of `∂H = R ∪ {∞}` as a projective pair, normalized so the
/// larger-magnitude coordinate equals `+1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    u: f64,
    v: f64,
}

impl BoundaryPoint {
    pub const INFINITY: BoundaryPoint = BoundaryPoint { u: 1.0, v: 0.0 };

    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !(u.is_finite() && v.is_finite()) || (u == 0.0 && v == 0.0) {
            return Err(Error::DegenerateBoundaryPoint);
        }
        Ok(Self::from_pair_unchecked(u, v))
    }

    fn from_pair_unchecked(u: f64, v: f64) -> Self {
        let m = if u.abs() > v.abs() { u } else { v };
        let (u, v) = (u / m, v / m);
        // Avoid a signed zero in the minor coordinate.
        BoundaryPoint { u: u + 0.0, v: v + 0.0 }
    }

    pub fn real(x: f64) -> Self {
        Self::from_pair_unchecked(x, 1.0)
    }

    pub fn pair(&self) -> (f64, f64) {
        (self.u, self.v)
    }

    /// `u/v`, infinite at `∞`.
    pub fn value(&self) -> f64 {
        if self.v == 0.0 {
            f64::INFINITY
        } else {
            self.u / self.v
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.v == 0.0
    }

    /// Projective separation `|u₁v₂ − u₂v₁|` (zero iff the points agree).
    pub fn separation(&self, other: &BoundaryPoint) -> f64 {
        (self.u * other.v - self.v * other.u).abs()
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "∞")
        } else {
            write!(f, "{}", self.value())
        }
    }
}

/// Oriented complete geodesic `from → to`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geodesic {
    pub from: BoundaryPoint,
    pub to: BoundaryPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngleMode {
    /// Angle in (0, π) between the forward tangents.
    PositiveDirections,
    /// Angle in [0, π) turning anticlockwise from the second line to the first.
    Anticlockwise,
}

impl Geodesic {
    pub fn new(from: BoundaryPoint, to: BoundaryPoint) -> Result<Self> {
        if from.separation(&to) <= TOL.boundary {
            return Err(Error::DegenerateGeodesic);
        }
        Ok(Geodesic { from, to })
    }

    pub fn reversed(&self) -> Geodesic {
        Geodesic { from: self.to, to: self.from }
    }

    /// Same endpoint set, ignoring orientation.
    pub fn same_trace(&self, other: &Geodesic) -> bool {
        let t = TOL.boundary;
        (self.from.separation(&other.from) <= t && self.to.separation(&other.to) <= t)
            || (self.from.separation(&other.to) <= t && self.to.separation(&other.from) <= t)
    }

    /// Largest projective separation between corresponding endpoints.
    pub fn endpoint_deviation(&self, other: &Geodesic) -> f64 {
        self.from.separation(&other.from).max(self.to.separation(&other.to))
    }

    /// Isometry taking `0 → ∞` onto this geodesic, orientation included,
    /// with `i` sent to the point of the geodesic closest to `i`.
    pub fn frame(&self) -> MoebiusMap {
        let (pu, pv) = self.from.pair();
        let (qu, qv) = self.to.pair();
        let mut s = MoebiusMap { a: qu, b: pu, c: qv, d: pv };
        if s.det() < 0.0 {
            s.b = -s.b;
            s.d = -s.d;
        }
        let s = s.renormalized();
        let w = s.inverse().apply_complex(Complex64::new(0.0, 1.0));
        s.mul_raw(&MoebiusMap::diagonal(w.norm().ln())).renormalized()
    }

    /// Closest point to `i`; origin of the arclength parameter.
    pub fn anchor(&self) -> HPoint {
        let f = self.frame();
        let z = f.apply_complex(Complex64::new(0.0, 1.0));
        HPoint { x: z.re, y: z.im }
    }

    /// Pulls `p` back to the frame, returning `(signed arclength from the
    /// anchor, distance from the geodesic)`.
    fn locate(&self, p: HPoint) -> (f64, f64) {
        let w = self.frame().inverse().apply_complex(p.to_complex());
        (w.norm().ln(), (w.re.abs() / w.im).asinh())
    }

    pub fn distance_to(&self, p: HPoint) -> f64 {
        self.locate(p).1
    }

    /// Signed arclength of `p` from the anchor, `p` required on the geodesic.
    pub fn param_of(&self, p: HPoint) -> Result<f64> {
        let (t, off) = self.locate(p);
        if off > TOL.on_geodesic {
            return Err(Error::PointNotOnGeodesic(off));
        }
        Ok(t)
    }

    pub fn point_at_param(&self, t: f64) -> Result<HPoint> {
        let z = self.frame().apply_complex(Complex64::new(0.0, t.exp()));
        HPoint::new(z.re, z.im)
    }

    /// Unit forward tangent at a point of the geodesic, as a complex number.
    pub fn tangent_at(&self, p: HPoint) -> Result<Complex64> {
        let f = self.frame();
        let w = f.inverse().apply_complex(p.to_complex());
        let off = (w.re.abs() / w.im).asinh();
        if off > TOL.on_geodesic {
            return Err(Error::PointNotOnGeodesic(off));
        }
        // Derivative of the frame at w is 1/(cw + d)^2; push forward the upward direction.
        let den = w * f.c + f.d;
        let t = Complex64::new(0.0, 1.0) / (den * den);
        Ok(t / t.norm())
    }
}

impl fmt::Display for Geodesic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} → {}", self.from, self.to)
    }
}

/// Oriented geodesic through `p` and then `q`.
pub fn geodesic_through(p: HPoint, q: HPoint) -> Result<Geodesic> {
    if dist(p, q) <= TOL.length * 1e-3 {
        return Err(Error::CoincidentPoints);
    }
    // Endpoints c ± r of the circle through p, q centred on the real axis,
    // written projectively so the vertical case needs no special handling.
    let n = (q.x * q.x + q.y * q.y) - (p.x * p.x + p.y * p.y);
    let dd = 2.0 * (q.x - p.x);
    let s = ((p.x * dd - n).powi(2) + (p.y * dd).powi(2)).sqrt();
    let big = if n >= 0.0 { n + s } else { n - s };
    let e1 = BoundaryPoint::new(big, dd)?;
    let e2 = BoundaryPoint::new(2.0 * p.x * n - (p.x * p.x + p.y * p.y) * dd, big)?;
    let g = Geodesic::new(e1, e2)?;
    let (tp, _) = g.locate(p);
    let (tq, _) = g.locate(q);
    Ok(if tq > tp { g } else { g.reversed() })
}

/// Transverse intersection point of two geodesics, if their endpoint
/// pairs separate each other on `∂H`.
pub fn intersect(g1: &Geodesic, g2: &Geodesic) -> Result<Option<HPoint>> {
    if g1.same_trace(g2) {
        return Err(Error::CoincidentGeodesics);
    }
    let f = g1.frame();
    let finv = f.inverse();
    let (u1, u2) = finv.apply_boundary(g2.from).pair();
    let (w1, w2) = finv.apply_boundary(g2.to).pair();
    let t = TOL.boundary;
    // Endpoints at 0 or ∞ of the frame are shared with g1.
    if u1.abs() <= t || u2.abs() <= t || w1.abs() <= t || w2.abs() <= t {
        return Ok(None);
    }
    let prod = (u1 * w1) / (u2 * w2);
    if prod >= 0.0 {
        return Ok(None);
    }
    let z = f.apply_complex(Complex64::new(0.0, (-prod).sqrt()));
    HPoint::new(z.re, z.im).map(Some)
}

/// Angle between two geodesics at a common point.
pub fn angle_between(g1: &Geodesic, g2: &Geodesic, p: HPoint, mode: AngleMode) -> Result<f64> {
    let t1 = g1.tangent_at(p)?;
    let t2 = g2.tangent_at(p)?;
    // Signed angle turning from t2 to t1.
    let turn = (t2.conj() * t1).arg();
    match mode {
        AngleMode::PositiveDirections => {
            if g1.same_trace(g2) {
                return Err(Error::CoincidentGeodesics);
            }
            Ok(turn.abs())
        }
        AngleMode::Anticlockwise => {
            let phi = turn.rem_euclid(PI);
            Ok(if phi >= PI { 0.0 } else { phi })
        }
    }
}

/// Point at signed arclength `d` from `p` along `g` (positive toward `g.to`).
pub fn point_along(g: &Geodesic, p: HPoint, d: f64) -> Result<HPoint> {
    let t = g.param_of(p)?;
    g.point_at_param(t + d)
}

/// Hyperbolic isometry with axis `g` translating by `s` (backward when `s < 0`).
pub fn translation_along(g: &Geodesic, s: f64) -> MoebiusMap {
    if s == 0.0 {
        return MoebiusMap::IDENTITY;
    }
    g.frame().conjugate(&MoebiusMap::diagonal(s))
}

/// Angle opposite side `c` in a triangle with sides `a`, `b`, `c`.
pub fn cosine_rule_angle(a: f64, b: f64, c: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && c >= 0.0) {
        return Err(Error::NotATriangle(a, b, c));
    }
    let cos = (a.cosh() * b.cosh() - c.cosh()) / (a.sinh() * b.sinh());
    if !cos.is_finite() || cos.abs() > 1.0 + TOL.algebraic {
        return Err(Error::NotATriangle(a, b, c));
    }
    Ok(cos.clamp(-1.0, 1.0).acos())
}

/// The construction relating the axes of `x`, `y` and `xy` when the first
/// two cross at `p`.
#[derive(Clone, Copy, Debug)]
pub struct ProductAxis {
    pub axis: Geodesic,
    pub p: HPoint,
    /// On `A_x`, `τ_x/2` ahead of `p`.
    pub q: HPoint,
    /// On `A_y`, `τ_y/2` behind `p`.
    pub r: HPoint,
}

pub fn axis_of_product(x: &MoebiusMap, y: &MoebiusMap) -> Result<ProductAxis> {
    let ax = x.axis()?;
    let ay = y.axis()?;
    let p = match intersect(&ax, &ay) {
        Ok(Some(p)) => p,
        Ok(None) | Err(Error::CoincidentGeodesics) => return Err(Error::AxesDisjoint),
        Err(e) => return Err(e),
    };
    let q = point_along(&ax, p, 0.5 * x.translation_length()?)?;
    let r = point_along(&ay, p, -0.5 * y.translation_length()?)?;
    Ok(ProductAxis { axis: geodesic_through(r, q)?, p, q, r })
}
