//! Intersection points of two closed geodesics, their signs, and the
//! Goldman bracket.
//!
//! Intersection points of the closed geodesics of `x` and `y` correspond to
//! lifts `A_{gyg⁻¹}` of `y` crossing a fundamental segment `[0, τ_x)` of the
//! axis `A_x`, measured by arclength from the point of `A_x` closest to `i`.
//! The search walks reduced conjugators `g` by increasing length. A crossing
//! anywhere on `A_x` is slid into the fundamental segment by a power of `x`,
//! and lifts are deduplicated by the reduced word of the conjugate.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::group::{conj_class, cyclic_reduce, ConjClass, Letter, Word};
use crate::hypgeom::{axis_of_product, intersect, point_along, BoundaryPoint, Geodesic, HPoint, MoebiusMap};
use crate::surface::SurfaceRep;
use crate::tol::TOL;

pub const DEFAULT_RADIUS_CAP: usize = 14;

/// One intersection point of the closed geodesics of `x` and `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionRecord {
    /// `g`, so that `A_{gyg⁻¹}` carries the lift through `point`.
    pub conjugator: Word,
    /// Reduced `g y g⁻¹`.
    pub conjugate: Word,
    /// The lift of the intersection point on `A_x`.
    pub point: HPoint,
    /// Arclength of `point` along `A_x` from its anchor, in `[0, τ_x)`.
    pub param: f64,
    /// `+1` when (x′, y′) is positively oriented.
    pub sign: i8,
    /// Reduced `x · g y g⁻¹`, whose axis projects to the loop product.
    pub term_word: Word,
    pub term_class: ConjClass,
    pub conjugate_axis: Geodesic,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BracketSum {
    /// Nonzero coefficients after cancellation.
    pub terms: BTreeMap<ConjClass, i64>,
    /// Every intersection record, including those whose terms cancel.
    pub records: Vec<IntersectionRecord>,
    pub radius_used: usize,
    /// Set when `⟨x⟩ = ⟨y⟩` and the sum was returned empty without a search.
    pub shortcut: bool,
    /// Number of points of `x` crossed by two branches of `y`.
    pub coincident_crossings: usize,
}

impl BracketSum {
    fn from_records(records: Vec<IntersectionRecord>, radius_used: usize) -> Self {
        let mut terms: BTreeMap<ConjClass, i64> = BTreeMap::new();
        for r in &records {
            *terms.entry(r.term_class.clone()).or_default() += i64::from(r.sign);
        }
        terms.retain(|_, c| *c != 0);
        BracketSum { terms, records, radius_used, shortcut: false, coincident_crossings: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Number of terms counted with multiplicity.
pub fn term_count(bs: &BracketSum) -> u64 {
    bs.terms.values().map(|c| c.unsigned_abs()).sum()
}

#[derive(Clone, Debug)]
struct Hit {
    conjugator: Word,
    param: f64,
}

/// Search state for one `(rep, x, y)` triple, everything expressed in the
/// frame of `A_x` so that `A_x` is the imaginary axis with its anchor at `i`.
struct Search<'a> {
    rep: &'a SurfaceRep,
    x: Word,
    y: Word,
    tau_x: f64,
    axis_x: Geodesic,
    gens: Vec<MoebiusMap>,
    gens_inv: Vec<MoebiusMap>,
    y_frame: MoebiusMap,
    hits: HashMap<Word, Hit>,
}

fn require_core(w: &Word, rep: &SurfaceRep) -> Result<()> {
    if w.is_empty() || !w.is_cyclically_reduced() {
        return Err(Error::NotCyclicallyReduced(w.to_string()));
    }
    if w.rank_needed() > rep.rank() {
        let bad = w.letters().iter().map(Letter::gen).max().unwrap_or(0);
        return Err(Error::BadLetter { index: bad, rank: rep.rank() });
    }
    Ok(())
}

/// `x` and `y` have parallel closed geodesics iff their primitive roots
/// agree up to conjugacy and inversion.
fn share_root(x: &Word, y: &Word) -> bool {
    let rx = conj_class(&x.primitive_root().0);
    let ry = conj_class(&y.primitive_root().0);
    rx == ry || rx == ry.inverse()
}

impl<'a> Search<'a> {
    fn new(rep: &'a SurfaceRep, x: &Word, y: &Word) -> Result<Self> {
        require_core(x, rep)?;
        require_core(y, rep)?;
        if share_root(x, y) {
            return Err(Error::NonPrimitiveCollision(x.to_string(), y.to_string()));
        }
        let xm = rep.word_map(x)?;
        let tau_x = xm.translation_length()?;
        rep.word_map(y)?.translation_length()?;
        let axis_x = xm.axis()?;
        let frame = axis_x.frame();
        let frame_inv = frame.inverse();
        let into_frame = |m: &MoebiusMap| frame_inv.mul_raw(m).mul_raw(&frame).renormalized();
        let gens: Vec<MoebiusMap> = rep.generators().iter().map(into_frame).collect();
        let gens_inv = gens.iter().map(MoebiusMap::inverse).collect();
        let y_frame = crate::group::word_to_map(&gens, y)?;
        Ok(Search {
            rep,
            x: x.clone(),
            y: y.clone(),
            tau_x,
            axis_x,
            gens,
            gens_inv,
            y_frame,
            hits: HashMap::new(),
        })
    }

    fn letter_map(&self, l: Letter) -> &MoebiusMap {
        if l.is_inverse() {
            &self.gens_inv[l.gen()]
        } else {
            &self.gens[l.gen()]
        }
    }

    /// Crossing parameter of the axis of `c` (in frame) with the imaginary axis.
    fn crossing_param(c: &MoebiusMap) -> Result<Option<f64>> {
        let scale = c.entries().iter().fold(0.0f64, |m, e| m.max(e.abs()));
        if c.b.abs() <= TOL.algebraic * scale && c.c.abs() <= TOL.algebraic * scale {
            return Err(Error::CoincidentGeodesics);
        }
        // Fixed points have product -b/c; they straddle 0 iff b/c > 0.
        if c.c == 0.0 || c.b == 0.0 || (c.b > 0.0) != (c.c > 0.0) {
            return Ok(None);
        }
        let t = 0.5 * (c.b / c.c).ln();
        Ok(t.is_finite().then_some(t))
    }

    /// Visits every reduced conjugator of length exactly `len`.
    fn search_length(&mut self, len: usize) -> Result<()> {
        let mut prefix = Vec::with_capacity(len);
        let mut found = Vec::new();
        self.dfs(len, &mut prefix, MoebiusMap::IDENTITY, &mut found)?;
        for (g, t) in found {
            self.fold_and_insert(g, t)?;
        }
        Ok(())
    }

    fn dfs(&self, left: usize, prefix: &mut Vec<Letter>, g: MoebiusMap, found: &mut Vec<(Word, f64)>) -> Result<()> {
        if left == 0 {
            let c = g.mul_raw(&self.y_frame).mul_raw(&g.inverse());
            match Self::crossing_param(&c) {
                Ok(Some(t)) => found.push((Word::from_letters(prefix.clone()), t)),
                Ok(None) => {}
                Err(Error::CoincidentGeodesics) => {
                    return Err(Error::NonPrimitiveCollision(self.x.to_string(), self.y.to_string()))
                }
                Err(e) => return Err(e),
            }
            return Ok(());
        }
        for gen in 0..self.gens.len() as u8 {
            for inverse in [false, true] {
                let l = Letter::new(gen, inverse);
                if prefix.last() == Some(&l.inv()) {
                    continue;
                }
                prefix.push(l);
                let next = g.mul_raw(self.letter_map(l));
                let next = if prefix.len().is_multiple_of(8) { next.renormalized() } else { next };
                self.dfs(left - 1, prefix, next, found)?;
                prefix.pop();
            }
        }
        Ok(())
    }

    /// Slides a crossing at parameter `t` into `[0, τ_x)` by `x^{-k}` and
    /// records it if its lift is new.
    fn fold_and_insert(&mut self, g: Word, t: f64) -> Result<()> {
        let mut k = (t / self.tau_x).floor();
        if t - k * self.tau_x >= self.tau_x - TOL.param_merge {
            k += 1.0;
        }
        if k.abs() > 1e6 {
            return Ok(());
        }
        let h = self.x.pow(-(k as i64)).mul(&g);
        let conjugate = h.conjugate(&self.y);
        if self.hits.contains_key(&conjugate) {
            return Ok(());
        }
        // Re-evaluate the folded lift directly; discard numerically spurious crossings.
        let c = crate::group::word_to_map(&self.gens, &conjugate)?;
        let Some(param) = Self::crossing_param(&c).ok().flatten() else {
            return Ok(());
        };
        if param < -TOL.param_merge || param >= self.tau_x - TOL.param_merge {
            return Ok(());
        }
        self.hits.insert(conjugate, Hit { conjugator: h, param: param.max(0.0) });
        Ok(())
    }

    /// Pairs of crossing parameters closer than the triple-point tolerance:
    /// two branches of `y` passing through one point of `x`.
    fn coincidences(&self) -> Vec<(f64, f64)> {
        let mut params: Vec<f64> = self.hits.values().map(|h| h.param).collect();
        params.sort_by(f64::total_cmp);
        let mut out: Vec<(f64, f64)> =
            params.windows(2).filter(|w| w[1] - w[0] < TOL.triple_point).map(|w| (w[0], w[1])).collect();
        if let (Some(first), Some(last)) = (params.first(), params.last()) {
            if params.len() > 2 && first + self.tau_x - last < TOL.triple_point {
                out.push((*last, *first));
            }
        }
        out
    }

    fn records(&self) -> Result<Vec<IntersectionRecord>> {
        let (root, power) = self.y.primitive_root();
        let mut out = Vec::with_capacity(self.hits.len() * power);
        for (conjugate, hit) in &self.hits {
            // A k-fold curve passes through each crossing k times.
            for j in 0..power {
                let g = hit.conjugator.mul(&root.pow(j as i64));
                out.push(make_record(self.rep, &self.x, &self.axis_x, self.tau_x, g, conjugate.clone())?);
            }
        }
        out.sort_by(|a, b| {
            a.term_class
                .cmp(&b.term_class)
                .then(a.param.total_cmp(&b.param))
                .then(a.conjugator.cmp(&b.conjugator))
        });
        Ok(out)
    }
}

fn make_record(
    rep: &SurfaceRep,
    x: &Word,
    axis_x: &Geodesic,
    tau_x: f64,
    conjugator: Word,
    conjugate: Word,
) -> Result<IntersectionRecord> {
    let conjugate_axis = rep.word_map(&conjugate)?.axis()?;
    let point = intersect(axis_x, &conjugate_axis)?.ok_or(Error::AxesDisjoint)?;
    let param = axis_x.param_of(point)?;
    let param = if param < 0.0 && param > -TOL.param_merge { 0.0 } else { param };
    debug_assert!(param < tau_x);
    let sign = tangent_sign(axis_x, &conjugate_axis, point)?;
    let term_word = x.mul(&conjugate);
    let term_class = conj_class(&term_word);
    Ok(IntersectionRecord { conjugator, conjugate, point, param, sign, term_word, term_class, conjugate_axis })
}

/// Sign of `det(t₁, t₂)` for the forward unit tangents at `p`.
fn tangent_sign(g1: &Geodesic, g2: &Geodesic, p: HPoint) -> Result<i8> {
    let t1 = g1.tangent_at(p)?;
    let t2 = g2.tangent_at(p)?;
    let det = t1.re * t2.im - t1.im * t2.re;
    if det.abs() < TOL.tangent_det {
        return Err(Error::TangentDegenerate(det.abs()));
    }
    Ok(if det > 0.0 { 1 } else { -1 })
}

/// All crossings found with conjugators of length at most `radius`.
/// `x` and `y` must be nontrivial and cyclically reduced.
pub fn enumerate_intersections(rep: &SurfaceRep, x: &Word, y: &Word, radius: usize) -> Result<Vec<IntersectionRecord>> {
    if radius < 1 {
        return Err(Error::InvalidInput("radius must be at least 1".into()));
    }
    let mut search = Search::new(rep, x, y)?;
    for len in 0..=radius {
        search.search_length(len)?;
    }
    search.records()
}

/// `ε(p)` recomputed from the record's geometry.
pub fn sign_of(record: &IntersectionRecord, rep: &SurfaceRep, x: &Word) -> Result<i8> {
    let axis_x = rep.geodesic_rep(x)?;
    tangent_sign(&axis_x, &record.conjugate_axis, record.point)
}

#[derive(Clone, Debug)]
pub struct Stabilized {
    pub records: Vec<IntersectionRecord>,
    pub radius_used: usize,
    /// Parameter pairs where two branches of `y` cross `x` at one point.
    /// Each branch still counts as its own crossing, as after pushing `y`
    /// into general position.
    pub coincidences: Vec<(f64, f64)>,
}

impl Stabilized {
    /// `Err(TriplePoint)` if some point of `x` carries two branches of `y`.
    pub fn require_general_position(&self) -> Result<()> {
        match self.coincidences.first() {
            Some(&(p, q)) => Err(Error::TriplePoint(p, q)),
            None => Ok(()),
        }
    }
}

/// Grows the search radius from `|x| + |y| + 2` until two consecutive radii
/// give the same crossings. Works on the cyclically reduced cores.
pub fn stabilize(rep: &SurfaceRep, x: &Word, y: &Word, cap: usize) -> Result<Stabilized> {
    let (x, _) = cyclic_reduce(x);
    let (y, _) = cyclic_reduce(y);
    let mut search = Search::new(rep, &x, &y)?;
    let mut r = x.len() + y.len() + 2;
    if r + 1 > cap {
        return Err(Error::NoStabilization(cap));
    }
    for len in 0..=r {
        search.search_length(len)?;
    }
    loop {
        let before = search.hits.len();
        search.search_length(r + 1)?;
        if search.hits.len() == before {
            return Ok(Stabilized {
                records: search.records()?,
                radius_used: r + 1,
                coincidences: search.coincidences(),
            });
        }
        r += 1;
        if r + 1 > cap {
            return Err(Error::NoStabilization(cap));
        }
    }
}

/// `[⟨x⟩, ⟨y⟩]` as a formal signed sum of classes.
pub fn goldman_bracket(rep: &SurfaceRep, x: &Word, y: &Word, cap: usize) -> Result<BracketSum> {
    let (cx, _) = cyclic_reduce(x);
    let (cy, _) = cyclic_reduce(y);
    require_core(&cx, rep).map_err(|_| Error::NotCyclicallyReduced(x.to_string()))?;
    require_core(&cy, rep).map_err(|_| Error::NotCyclicallyReduced(y.to_string()))?;
    if conj_class(&cx) == conj_class(&cy) {
        return Ok(BracketSum { shortcut: true, ..BracketSum::default() });
    }
    match stabilize(rep, &cx, &cy, cap) {
        Ok(s) => Ok(BracketSum {
            coincident_crossings: s.coincidences.len(),
            ..BracketSum::from_records(s.records, s.radius_used)
        }),
        Err(Error::NonPrimitiveCollision(..)) => Ok(BracketSum::default()),
        Err(e) => Err(e),
    }
}

/// `i(x, y)`, the number of transverse crossings of the closed geodesics.
pub fn geometric_intersection_number(rep: &SurfaceRep, x: &Word, y: &Word, cap: usize) -> Result<usize> {
    match stabilize(rep, x, y, cap) {
        Ok(s) => Ok(s.records.len()),
        Err(Error::NonPrimitiveCollision(..)) => Ok(0),
        Err(e) => Err(e),
    }
}

/// One geodesic arc of a lifted loop product.
#[derive(Clone, Copy, Debug)]
pub struct LiftArc {
    pub index: i64,
    pub carrier: Geodesic,
    pub start: HPoint,
    pub end: HPoint,
    pub midpoint: HPoint,
    pub length: f64,
}

impl LiftArc {
    fn new(index: i64, carrier: Geodesic, start: HPoint, length: f64) -> Result<LiftArc> {
        let end = point_along(&carrier, start, length)?;
        let midpoint = point_along(&carrier, start, 0.5 * length)?;
        Ok(LiftArc { index, carrier, start, end, midpoint, length })
    }

    fn moved(&self, index: i64, m: &MoebiusMap) -> Result<LiftArc> {
        Ok(LiftArc {
            index,
            carrier: m.apply_geodesic(&self.carrier),
            start: m.apply(self.start)?,
            end: m.apply(self.end)?,
            midpoint: m.apply(self.midpoint)?,
            length: self.length,
        })
    }
}

/// The lift of `x ∗_p y` through a crossing, in coordinates where the axis
/// of `h = x·gyg⁻¹` runs `0 → ∞`. There `h` is the dilation by
/// `e^{ℓ(h)}`, so arcs far from the crossing keep full relative precision.
#[derive(Clone, Debug)]
pub struct LiftPath {
    /// Takes the normalized coordinates back to the surface's half-plane.
    pub frame: MoebiusMap,
    /// The crossing, normalized.
    pub crossing: HPoint,
    pub term_length: f64,
    pub arcs: Vec<LiftArc>,
}

impl LiftPath {
    /// The term axis in normalized coordinates.
    pub fn term_axis() -> Geodesic {
        Geodesic::new(BoundaryPoint::real(0.0), BoundaryPoint::INFINITY).expect("distinct endpoints")
    }

    /// Largest distance from an arc midpoint to the axis of the term.
    pub fn midpoint_deviation(&self) -> f64 {
        let axis = Self::term_axis();
        self.arcs.iter().map(|a| axis.distance_to(a.midpoint)).fold(0.0, f64::max)
    }
}

/// The arcs `γ_{-n} … γ_n`: `γ_0` runs `τ_x` along `A_x` from the crossing,
/// `γ_1` runs `τ_y` along `x(A_{gyg⁻¹})`, and `γ_{i+2} = h(γ_i)`. Even arcs
/// lie on lifts of `x`, odd arcs on lifts of `y`.
pub fn lift_path(rep: &SurfaceRep, x: &Word, y: &Word, record: &IntersectionRecord, n: usize) -> Result<LiftPath> {
    let (x, _) = cyclic_reduce(x);
    let (y, _) = cyclic_reduce(y);
    let (x, y) = (&x, &y);
    // Products are formed in the frame of A_x, where the crossing sits at
    // i·e^{param} exactly, then moved once into the frame of the term axis.
    let frame_x = rep.word_map(x)?.axis()?.frame();
    let to_x = frame_x.inverse();
    let gens: Vec<MoebiusMap> =
        rep.generators().iter().map(|m| to_x.mul_raw(m).mul_raw(&frame_x).renormalized()).collect();
    let xm = crate::group::word_to_map(&gens, x)?;
    let y0 = crate::group::word_to_map(&gens, &record.conjugate)?;
    let tau_x = xm.translation_length()?;
    let tau_y = rep.word_map(y)?.translation_length()?;
    let h = xm.mul_raw(&y0).renormalized();
    let term_length = h.translation_length()?;
    let frame_h = h.axis()?.frame();
    let to_h = frame_h.inverse();
    let local = |m: &MoebiusMap| to_h.mul_raw(m).mul_raw(&frame_h).renormalized();
    let (xl, yl) = (local(&xm), local(&y0));
    let crossing = to_h.apply(HPoint::new(0.0, record.param.exp())?)?;
    let frame = frame_x.mul_raw(&frame_h).renormalized();

    let g0 = LiftArc::new(0, xl.axis()?, crossing, tau_x)?;
    let g1 = LiftArc::new(1, yl.axis()?, crossing, tau_y)?.moved(1, &xl)?;
    let base = [g0, g1];
    let n = n as i64;
    let arcs = (-n..=n)
        .map(|i| {
            let k = i.div_euclid(2) as f64;
            base[i.rem_euclid(2) as usize].moved(i, &MoebiusMap::diagonal(k * term_length))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LiftPath { frame, crossing, term_length, arcs })
}

/// `|ℓ(term)/2 − d(R, Q)|` for the product-axis construction at the record.
pub fn term_length_residual(rep: &SurfaceRep, x: &Word, record: &IntersectionRecord) -> Result<f64> {
    let pa = axis_of_product(&rep.word_map(x)?, &rep.word_map(&record.conjugate)?)?;
    let half = 0.5 * rep.class_length(&record.term_word)?;
    Ok((half - crate::hypgeom::dist(pa.r, pa.q)).abs())
}

/// Pairs of records with equal term class and opposite signs.
pub fn opposite_sign_collisions(records: &[IntersectionRecord]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..records.len() {
        for j in i + 1..records.len() {
            if records[i].term_class == records[j].term_class && records[i].sign != records[j].sign {
                out.push((i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{holed_torus, pants};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn pants_boundaries_are_disjoint() {
        let rep = pants(2.0, 2.0, 2.0).unwrap();
        assert!(enumerate_intersections(&rep, &w("a"), &w("b"), 6).unwrap().is_empty());
        assert_eq!(geometric_intersection_number(&rep, &w("a"), &w("b"), 14).unwrap(), 0);
        assert!(goldman_bracket(&rep, &w("a"), &w("b"), 14).unwrap().is_empty());
    }

    #[test]
    fn holed_torus_generators_cross_once() {
        let rep = holed_torus(2.0, 0.0).unwrap();
        let recs = enumerate_intersections(&rep, &w("a"), &w("b"), 6).unwrap();
        assert_eq!(recs.len(), 1);
        let bs = goldman_bracket(&rep, &w("a"), &w("b"), 14).unwrap();
        assert_eq!(term_count(&bs), 1);
        assert_eq!(bs.terms.keys().next().unwrap(), &conj_class(&w("ab")));
        assert_eq!(bs.terms.values().next().unwrap().abs(), 1);
    }

    #[test]
    fn conjugated_dual_curve() {
        let rep = holed_torus(2.0, 0.0).unwrap();
        let recs = stabilize(&rep, &w("a"), &w("baB"), 14);
        // baB is conjugate to a: the geodesics coincide.
        assert!(matches!(recs, Err(Error::NonPrimitiveCollision(..))));
        assert_eq!(geometric_intersection_number(&rep, &w("a"), &w("baB"), 14).unwrap(), 0);
        // y = b a b⁻¹ is conjugate to a, so the bracket vanishes.
        assert!(goldman_bracket(&rep, &w("a"), &w("baB"), 14).unwrap().is_empty());
    }

    #[test]
    fn record_invariants_hold() {
        let rep = holed_torus(1.7, 0.4).unwrap();
        let x = w("a");
        let y = w("abbAB");
        let s = stabilize(&rep, &x, &y, 14).unwrap();
        let tau = rep.class_length(&x).unwrap();
        let ax = rep.geodesic_rep(&x).unwrap();
        assert!(!s.records.is_empty());
        for r in &s.records {
            let p = intersect(&ax, &r.conjugate_axis).unwrap().unwrap();
            assert!(crate::hypgeom::dist(p, r.point) <= 1e-9);
            assert!(r.param >= 0.0 && r.param < tau);
            assert_eq!(r.term_class, conj_class(&r.term_word));
            assert_eq!(r.conjugate, r.conjugator.conjugate(&y));
            assert_eq!(sign_of(r, &rep, &x).unwrap(), r.sign);
        }
    }

    #[test]
    fn perpendicular_sign_is_negative() {
        // x = a points up the imaginary axis; b's axis runs -1 → 1, pointing right at i.
        let rep = holed_torus(2.0, 0.0).unwrap();
        let recs = enumerate_intersections(&rep, &w("a"), &w("b"), 4).unwrap();
        assert_eq!(recs[0].sign, -1);
        // Swapping the roles flips the sign.
        let swapped = enumerate_intersections(&rep, &w("b"), &w("a"), 4).unwrap();
        assert_eq!(swapped.len(), 1);
        assert_eq!(swapped[0].sign, 1);
    }

    #[test]
    fn reversing_y_flips_signs() {
        let rep = holed_torus(1.3, -0.6).unwrap();
        let x = w("a");
        for y in ["abb", "aabAb", "bbaB"] {
            let y = w(y);
            let fwd = stabilize(&rep, &x, &y, 14).unwrap().records;
            let rev = stabilize(&rep, &x, &y.inverse(), 14).unwrap().records;
            assert_eq!(fwd.len(), rev.len());
            for r in &fwd {
                let m = rev.iter().find(|q| (q.param - r.param).abs() <= 1e-9).expect("param-matched record");
                assert_eq!(m.sign, -r.sign);
            }
        }
    }

    #[test]
    fn intersection_number_is_symmetric() {
        let rep = holed_torus(1.1, 0.3).unwrap();
        for (x, y) in [("a", "abb"), ("ab", "aBB"), ("aab", "bbA"), ("abAB", "ab")] {
            let (x, y) = (w(x), w(y));
            let xy = stabilize(&rep, &x, &y, 14).unwrap().records;
            let yx = stabilize(&rep, &y, &x, 14).unwrap().records;
            assert_eq!(xy.len(), yx.len(), "{x} {y}");
            let sxy: i64 = xy.iter().map(|r| i64::from(r.sign)).sum();
            let syx: i64 = yx.iter().map(|r| i64::from(r.sign)).sum();
            assert_eq!(sxy, -syx);
        }
    }

    #[test]
    fn proper_powers_count_each_pass() {
        let rep = holed_torus(2.0, 0.0).unwrap();
        let recs = stabilize(&rep, &w("a"), &w("bb"), 14).unwrap().records;
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].term_class, recs[1].term_class);
        assert_eq!(recs[0].sign, recs[1].sign);
        let bs = goldman_bracket(&rep, &w("a"), &w("bb"), 14).unwrap();
        assert_eq!(term_count(&bs), 2);
        // x a proper power: the fundamental segment covers two periods.
        assert_eq!(geometric_intersection_number(&rep, &w("aa"), &w("b"), 14).unwrap(), 2);
    }

    #[test]
    fn same_class_shortcut_and_collisions() {
        let rep = holed_torus(2.0, 0.0).unwrap();
        let bs = goldman_bracket(&rep, &w("ab"), &w("ba"), 14).unwrap();
        assert!(bs.shortcut && bs.is_empty());
        for (x, y) in [("a", "aa"), ("ab", "abab"), ("a", "A"), ("ab", "BA")] {
            let bs = goldman_bracket(&rep, &w(x), &w(y), 14).unwrap();
            assert!(bs.is_empty() && !bs.shortcut, "{x} {y}");
            assert_eq!(geometric_intersection_number(&rep, &w(x), &w(y), 14).unwrap(), 0);
        }
    }

    #[test]
    fn input_validation() {
        let rep = holed_torus(2.0, 0.0).unwrap();
        assert!(matches!(enumerate_intersections(&rep, &w("aba"), &w("b"), 0), Err(Error::InvalidInput(_))));
        assert!(matches!(enumerate_intersections(&rep, &w("abA"), &w("b"), 3), Err(Error::NotCyclicallyReduced(_))));
        assert!(matches!(enumerate_intersections(&rep, &w("a"), &w("c"), 3), Err(Error::BadLetter { .. })));
        assert!(goldman_bracket(&rep, &w("aA"), &w("b"), 14).is_err());
        assert!(matches!(stabilize(&rep, &w("abababab"), &w("bbbbb"), 14), Err(Error::NoStabilization(14))));
    }

    #[test]
    fn stabilized_answer_survives_larger_radius() {
        // A generic twist: at twist 0 the symmetric metric puts self-crossings of y on x.
        let rep = holed_torus(1.7, 0.37).unwrap();
        for (x, y) in [("a", "aabAB"), ("a", "abbAb"), ("ab", "aB")] {
            let (x, y) = (w(x), w(y));
            let s = stabilize(&rep, &x, &y, 14).unwrap();
            let wide = enumerate_intersections(&rep, &x, &y, s.radius_used + 2).unwrap();
            assert_eq!(s.records, wide);
        }
    }

    #[test]
    fn lift_path_structure() {
        let rep = holed_torus(2.0, 0.0).unwrap();
        let (x, y) = (w("a"), w("abb"));
        let s = stabilize(&rep, &x, &y, 14).unwrap();
        let r = &s.records[0];
        let single = lift_path(&rep, &x, &y, r, 0).unwrap();
        assert_eq!(single.arcs.len(), 1);
        let a0 = &single.arcs[0];
        assert!((crate::hypgeom::dist(a0.start, a0.end) - 2.0).abs() <= 1e-9);
        assert!(crate::hypgeom::dist(single.frame.apply(a0.start).unwrap(), r.point) <= 1e-9);
        let path = lift_path(&rep, &x, &y, r, 3).unwrap();
        assert_eq!(path.arcs.len(), 7);
        for pair in path.arcs.windows(2) {
            assert!(crate::hypgeom::dist(pair[0].end, pair[1].start) <= 1e-9);
        }
        assert!(path.midpoint_deviation() <= 1e-8);
        // Arc 2 starts at h(crossing).
        let h = rep.word_map(&r.term_word).unwrap();
        let a2 = path.arcs.iter().find(|a| a.index == 2).unwrap();
        assert!(crate::hypgeom::dist(path.frame.apply(a2.start).unwrap(), h.apply(r.point).unwrap()) <= 1e-8);
    }

    #[test]
    fn lift_arcs_lie_on_lifts_of_x_and_y() {
        let rep = holed_torus(1.3, 0.6).unwrap();
        let (x, y) = (w("aB"), w("abbAb"));
        let (lx, ly) = (rep.class_length(&x).unwrap(), rep.class_length(&y).unwrap());
        for r in &stabilize(&rep, &x, &y, 14).unwrap().records {
            let path = lift_path(&rep, &x, &y, r, 2).unwrap();
            for a in &path.arcs {
                let expect = if a.index.rem_euclid(2) == 0 { lx } else { ly };
                assert!((a.length - expect).abs() <= 1e-12);
                assert!((crate::hypgeom::dist(a.start, a.end) - expect).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn coincident_branches_are_counted_separately() {
        // The elliptic involution of a one-holed torus fixes points on a,
        // and aabb passes through one of them twice.
        let rep = holed_torus(1.7, 0.37).unwrap();
        let s = stabilize(&rep, &w("a"), &w("aabb"), 14).unwrap();
        assert_eq!(s.coincidences.len(), 1);
        assert_eq!(s.records.len(), 2);
        assert!(matches!(s.require_general_position(), Err(Error::TriplePoint(..))));
        let bs = goldman_bracket(&rep, &w("a"), &w("aabb"), 14).unwrap();
        assert_eq!(bs.coincident_crossings, 1);
        assert_eq!(term_count(&bs), 2);
        assert!(stabilize(&rep, &w("a"), &w("abb"), 14).unwrap().require_general_position().is_ok());
    }

    #[test]
    fn term_length_matches_product_construction() {
        let rep = holed_torus(0.9, 1.2).unwrap();
        let x = w("a");
        for y in ["b", "abb", "aBBab"] {
            for r in &stabilize(&rep, &x, &w(y), 14).unwrap().records {
                assert!(term_length_residual(&rep, &x, r).unwrap() <= 1e-8);
            }
        }
    }

    fn exponent_sums(w: &Word) -> (i64, i64) {
        let mut e = [0i64; 2];
        for l in w.letters() {
            e[l.gen()] += if l.is_inverse() { -1 } else { 1 };
        }
        (e[0], e[1])
    }

    #[test]
    fn signed_count_is_homological_intersection() {
        let rep = holed_torus(1.4, 0.23).unwrap();
        let words = ["a", "b", "ab", "aB", "abb", "aab", "aBaB", "abAbb", "aabbb", "abaBB"];
        for x in words {
            for y in words {
                let (x, y) = (w(x), w(y));
                let Ok(s) = stabilize(&rep, &x, &y, 14) else {
                    continue;
                };
                let signed: i64 = s.records.iter().map(|r| i64::from(r.sign)).sum();
                let (xa, xb) = exponent_sums(&x);
                let (ya, yb) = exponent_sums(&y);
                assert_eq!(signed, -(xa * yb - xb * ya), "{x} {y}");
            }
        }
    }

    #[test]
    fn simple_slopes_meet_minimally() {
        let rep = holed_torus(1.2, -0.4).unwrap();
        // (word, slope p/q as exponent sums of a and b)
        let simple: [(&str, i64, i64); 7] = [("a", 1, 0), ("b", 0, 1), ("ab", 1, 1), ("aB", 1, -1), ("abb", 1, 2), ("aab", 2, 1), ("aBB", 1, -2)];
        for (x, p, q) in simple {
            for (y, r, t) in simple {
                if x == y {
                    continue;
                }
                let n = geometric_intersection_number(&rep, &w(x), &w(y), 14).unwrap();
                assert_eq!(n as i64, (p * t - q * r).abs(), "{x} {y}");
            }
        }
    }
}
