//! Intersection angles `θ_p` (between positive directions) and `φ_p`
//! (anticlockwise from `y` to `x`), and the check that records with equal
//! loop-product classes meet at equal angles in every metric.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::goldman::{stabilize, IntersectionRecord};
use crate::group::{ConjClass, Word};
use crate::hypgeom::{angle_between, cosine_rule_angle, AngleMode};
use crate::surface::SurfaceRep;

pub fn theta(rep: &SurfaceRep, x: &Word, _y: &Word, record: &IntersectionRecord) -> Result<f64> {
    angle_between(&rep.geodesic_rep(x)?, &record.conjugate_axis, record.point, AngleMode::PositiveDirections)
}

pub fn phi(rep: &SurfaceRep, x: &Word, _y: &Word, record: &IntersectionRecord) -> Result<f64> {
    angle_between(&rep.geodesic_rep(x)?, &record.conjugate_axis, record.point, AngleMode::Anticlockwise)
}

/// `θ` recovered from the triangle with sides `τ_x/2`, `τ_y/2`, `ℓ(term)/2`,
/// whose angle opposite the last side is `π − θ`.
pub fn angle_from_lengths(rep: &SurfaceRep, x: &Word, y: &Word, record: &IntersectionRecord) -> Result<f64> {
    let tx = rep.class_length(x)?;
    let ty = rep.class_length(y)?;
    let tt = rep.class_length(&record.term_word)?;
    Ok(PI - cosine_rule_angle(0.5 * tx, 0.5 * ty, 0.5 * tt)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AngleRow {
    pub conjugator: Word,
    pub param: f64,
    pub sign: i8,
    pub term_class: ConjClass,
    pub theta: f64,
    pub phi: f64,
    pub theta_from_lengths: f64,
}

impl AngleRow {
    /// Distance from the relation `θ + φ = π` (sign +1) or `θ = φ` (sign −1).
    pub fn case_residual(&self) -> f64 {
        if self.sign > 0 {
            (self.theta + self.phi - PI).abs()
        } else {
            (self.theta - self.phi).abs()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassGroup {
    pub class: ConjClass,
    /// Indices into the report's rows.
    pub members: Vec<usize>,
    pub max_theta_deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AngleReport {
    pub metric_id: String,
    pub rows: Vec<AngleRow>,
    pub groups: Vec<ClassGroup>,
}

impl AngleReport {
    pub fn build(metric_id: &str, rep: &SurfaceRep, x: &Word, y: &Word, records: &[IntersectionRecord]) -> Result<Self> {
        let rows = records
            .iter()
            .map(|r| {
                Ok(AngleRow {
                    conjugator: r.conjugator.clone(),
                    param: r.param,
                    sign: r.sign,
                    term_class: r.term_class.clone(),
                    theta: theta(rep, x, y, r)?,
                    phi: phi(rep, x, y, r)?,
                    theta_from_lengths: angle_from_lengths(rep, x, y, r)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut by_class: BTreeMap<&ConjClass, Vec<usize>> = BTreeMap::new();
        for (i, row) in rows.iter().enumerate() {
            by_class.entry(&row.term_class).or_default().push(i);
        }
        let groups = by_class
            .into_iter()
            .map(|(class, members)| {
                let thetas = members.iter().map(|&i| rows[i].theta);
                let hi = thetas.clone().fold(f64::NEG_INFINITY, f64::max);
                let lo = thetas.fold(f64::INFINITY, f64::min);
                ClassGroup { class: class.clone(), members, max_theta_deviation: hi - lo }
            })
            .collect();
        Ok(AngleReport { metric_id: metric_id.to_string(), rows, groups })
    }

    pub fn max_group_deviation(&self) -> f64 {
        self.groups.iter().map(|g| g.max_theta_deviation).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_group_deviation() <= tol
    }

    pub fn max_case_residual(&self) -> f64 {
        self.rows.iter().map(AngleRow::case_residual).fold(0.0, f64::max)
    }

    pub fn max_coherence_residual(&self) -> f64 {
        self.rows.iter().map(|r| (r.theta - r.theta_from_lengths).abs()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.metric_id, r.param, r.sign, r.term_class, r.theta, r.phi, r.theta_from_lengths
            )?;
        }
        Ok(())
    }
}

pub const CSV_HEADER: &str = "metric_id,param,sign,term_class,theta,phi,theta_from_lengths";

/// One report per metric, in input order.
pub fn equal_term_report(reps: &[(String, SurfaceRep)], x: &Word, y: &Word, cap: usize) -> Result<Vec<AngleReport>> {
    if reps.is_empty() {
        return Err(Error::InvalidInput("at least one metric is required".into()));
    }
    reps.par_iter()
        .map(|(id, rep)| {
            let recs = match stabilize(rep, x, y, cap) {
                Ok(s) => s.records,
                Err(Error::NonPrimitiveCollision(..)) => Vec::new(),
                Err(e) => return Err(e),
            };
            let (cx, _) = crate::group::cyclic_reduce(x);
            let (cy, _) = crate::group::cyclic_reduce(y);
            AngleReport::build(id, rep, &cx, &cy, &recs)
        })
        .collect()
}

/// A pair of records sharing a term class whose angles differ by more than
/// the probe tolerance in some metric.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeHit {
    pub metric_id: String,
    pub class: ConjClass,
    pub deviation: f64,
}

pub fn contrapositive_probe(reports: &[AngleReport], tol: f64) -> Vec<ProbeHit> {
    reports
        .iter()
        .flat_map(|rep| {
            rep.groups.iter().filter(|g| g.max_theta_deviation > tol).map(|g| ProbeHit {
                metric_id: rep.metric_id.clone(),
                class: g.class.clone(),
                deviation: g.max_theta_deviation,
            })
        })
        .collect()
}

/// Classes carried by two records of opposite sign in some report.
pub fn opposite_sign_classes(reports: &[AngleReport]) -> Vec<(String, ConjClass)> {
    let mut out = Vec::new();
    for rep in reports {
        for g in &rep.groups {
            let first = rep.rows[g.members[0]].sign;
            if g.members.iter().any(|&i| rep.rows[i].sign != first) {
                out.push((rep.metric_id.clone(), g.class.clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{holed_torus, MetricSampler, SampleKind};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn perpendicular_crossing() {
        let rep = holed_torus(2.0, 0.0).unwrap();
        let (x, y) = (w("a"), w("b"));
        let r = &stabilize(&rep, &x, &y, 14).unwrap().records[0];
        assert!((theta(&rep, &x, &y, r).unwrap() - PI / 2.0).abs() <= 1e-12);
        assert!((phi(&rep, &x, &y, r).unwrap() - PI / 2.0).abs() <= 1e-12);
        // Pythagoras: cosh(ℓ/2) = cosh(τx/2) cosh(τy/2).
        let lt = rep.class_length(&r.term_word).unwrap();
        let lx = rep.class_length(&x).unwrap();
        let ly = rep.class_length(&y).unwrap();
        assert!(((0.5 * lt).cosh() - (0.5 * lx).cosh() * (0.5 * ly).cosh()).abs() <= 1e-9);
        assert!((angle_from_lengths(&rep, &x, &y, r).unwrap() - PI / 2.0).abs() <= 1e-9);
    }

    #[test]
    fn rows_satisfy_case_relations_and_coherence() {
        let sampler = MetricSampler::new(7, SampleKind::HoledTorus);
        for i in 0..4 {
            let rep = sampler.sample(i);
            for (x, y) in [("a", "abb"), ("a", "aBBab"), ("ab", "aB"), ("a", "bbaB")] {
                let (x, y) = (w(x), w(y));
                let recs = stabilize(&rep, &x, &y, 14).unwrap().records;
                let report = AngleReport::build("m", &rep, &x, &y, &recs).unwrap();
                for row in &report.rows {
                    assert!(row.theta > 0.0 && row.theta < PI);
                    assert!((0.0..PI).contains(&row.phi));
                }
                assert!(report.max_case_residual() <= 1e-9);
                assert!(report.max_coherence_residual() <= 1e-8);
            }
        }
    }

    #[test]
    fn phi_is_stable_under_reanchoring() {
        // Shifting the fundamental segment by x moves every lift by x; angles must not change.
        let rep = holed_torus(1.6, 0.3).unwrap();
        let (x, y) = (w("a"), w("abbA"));
        let (y, _) = crate::group::cyclic_reduce(&y);
        for r in stabilize(&rep, &x, &y, 14).unwrap().records {
            let shifted_g = x.mul(&r.conjugator);
            let conj = shifted_g.conjugate(&y);
            let axis = rep.geodesic_rep(&conj).unwrap();
            let ax = rep.geodesic_rep(&x).unwrap();
            let p = crate::hypgeom::intersect(&ax, &axis).unwrap().unwrap();
            let ph = angle_between(&ax, &axis, p, AngleMode::Anticlockwise).unwrap();
            assert!((ph - phi(&rep, &x, &y, &r).unwrap()).abs() <= 1e-9);
        }
    }

    #[test]
    fn equal_classes_have_equal_angles() {
        let sampler = MetricSampler::new(3, SampleKind::HoledTorus);
        let reps: Vec<_> = (0..5).map(|i| (format!("m{i}"), sampler.sample(i))).collect();
        // bb crosses a twice with the same term class.
        let reports = equal_term_report(&reps, &w("a"), &w("bb"), 14).unwrap();
        assert!(reports.iter().all(|r| r.groups.iter().any(|g| g.members.len() == 2)));
        assert!(reports.iter().all(|r| r.passes(1e-8)));
        assert!(contrapositive_probe(&reports, 1e-6).is_empty());
        assert!(opposite_sign_classes(&reports).is_empty());
    }

    #[test]
    fn singleton_groups_pass_vacuously() {
        let rep = holed_torus(2.0, 0.0).unwrap();
        let reports = equal_term_report(&[("only".into(), rep)], &w("a"), &w("b"), 14).unwrap();
        assert_eq!(reports[0].max_group_deviation(), 0.0);
        assert!(reports[0].passes(0.0));
        assert!(equal_term_report(&[], &w("a"), &w("b"), 14).is_err());
    }

    #[test]
    fn near_degenerate_triangle_is_flagged() {
        assert!(cosine_rule_angle(1.0, 1.0, 2.5).is_err());
        let sharp = cosine_rule_angle(1.0, 1.0, 1e-9).unwrap();
        assert!(sharp < 1e-6);
    }

    #[test]
    fn csv_rows() {
        let rep = holed_torus(2.0, 0.0).unwrap();
        let reports = equal_term_report(&[("m0".into(), rep)], &w("a"), &w("b"), 14).unwrap();
        let mut buf = Vec::new();
        reports[0].write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let fields: Vec<&str> = text.trim_end().split(',').collect();
        assert_eq!(fields.len(), CSV_HEADER.split(',').count());
        assert_eq!(fields[0], "m0");
        assert_eq!(fields[3], "ab");
    }
}
