use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{align, config_to_json, ConfigFile, Configuration};
use crate::error::{Error, Result};
use crate::geom::{angle_from_radius, rotate, Rotation, UnitVector};

/// Chordal gap allowed between consecutive segment endpoints.
pub const JOINT_TOL: f64 = 1e-10;

pub type Evaluator = Arc<dyn Fn(f64) -> Vec<UnitVector> + Send + Sync>;

/// One closed-form piece of a path, parametrized by t in [0, 1].
#[derive(Clone)]
pub struct Segment {
    pub kind: String,
    pub params: serde_json::Value,
    eval: Evaluator,
}

impl std::fmt::Debug for Segment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Segment")
            .field("kind", &self.kind)
            .field("params", &self.params)
            .finish()
    }
}

impl Segment {
    pub fn new(
        kind: impl Into<String>,
        params: serde_json::Value,
        eval: impl Fn(f64) -> Vec<UnitVector> + Send + Sync + 'static,
    ) -> Self {
        Segment {
            kind: kind.into(),
            params,
            eval: Arc::new(eval),
        }
    }

    pub fn points(&self, t: f64) -> Vec<UnitVector> {
        (self.eval)(t.clamp(0.0, 1.0))
    }

    pub fn at(&self, t: f64) -> Result<Configuration> {
        Configuration::new(self.points(t))
    }

    pub fn reversed(&self) -> Segment {
        let f = self.eval.clone();
        Segment {
            kind: self.kind.clone(),
            params: serde_json::json!({ "reversed": self.params }),
            eval: Arc::new(move |t| f(1.0 - t)),
        }
    }

    pub fn rotated(&self, r: &Rotation) -> Segment {
        let f = self.eval.clone();
        let r = *r;
        Segment {
            kind: self.kind.clone(),
            params: self.params.clone(),
            eval: Arc::new(move |t| f(t).iter().map(|u| rotate(&r, u)).collect()),
        }
    }

    /// Point k becomes point `images[k]`.
    pub fn relabeled(&self, images: &[usize]) -> Segment {
        let f = self.eval.clone();
        let images = images.to_vec();
        Segment {
            kind: self.kind.clone(),
            params: self.params.clone(),
            eval: Arc::new(move |t| {
                let old = f(t);
                let mut new = old.clone();
                for (k, &i) in images.iter().enumerate() {
                    new[i] = old[k];
                }
                new
            }),
        }
    }

    /// Rigid rotation of a fixed configuration about `axis` by `angle`·t.
    pub fn rigid_rotation(start: &Configuration, axis: crate::geom::Vec3, angle: f64) -> Segment {
        let pts = start.points().to_vec();
        Segment::new(
            "rigid-rotation",
            serde_json::json!({ "axis": [axis.x, axis.y, axis.z], "angle": angle }),
            move |t| {
                let r = Rotation::about_axis(axis, angle * t);
                pts.iter().map(|u| rotate(&r, u)).collect()
            },
        )
    }
}

/// A chain of segments with continuous joints, all at one radius.
#[derive(Clone, Debug)]
pub struct DeformationPath {
    segments: Vec<Segment>,
    radius: f64,
    target: Option<Configuration>,
}

fn joint_gap(a: &[UnitVector], b: &[UnitVector]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.vec() - y.vec()).norm())
        .fold(0.0, f64::max)
}

impl DeformationPath {
    pub fn new(radius: f64) -> Self {
        DeformationPath {
            segments: Vec::new(),
            radius,
            target: None,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn target(&self) -> Option<&Configuration> {
        self.target.as_ref()
    }

    pub fn with_target(mut self, target: Configuration) -> Self {
        self.target = Some(target);
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    /// Appends a segment whose start must meet the current end.
    pub fn push(&mut self, seg: Segment) -> Result<()> {
        if let Some(last) = self.segments.last() {
            let gap = joint_gap(&last.points(1.0), &seg.points(0.0));
            if gap >= JOINT_TOL {
                return Err(Error::InvalidConfiguration(format!(
                    "segment '{}' starts {gap:.3e} away from the end of '{}'",
                    seg.kind, last.kind
                )));
            }
        }
        self.segments.push(seg);
        Ok(())
    }

    pub fn start(&self) -> Result<Configuration> {
        self.first()?.at(0.0)
    }

    pub fn end(&self) -> Result<Configuration> {
        self.last()?.at(1.0)
    }

    fn first(&self) -> Result<&Segment> {
        self.segments
            .first()
            .ok_or_else(|| Error::InvalidConfiguration("empty path".into()))
    }

    fn last(&self) -> Result<&Segment> {
        self.segments
            .last()
            .ok_or_else(|| Error::InvalidConfiguration("empty path".into()))
    }

    /// Configuration at time `t` of segment `seg`.
    pub fn at(&self, seg: usize, t: f64) -> Result<Configuration> {
        self.segments
            .get(seg)
            .ok_or_else(|| Error::Domain(format!("segment {seg} out of range")))?
            .at(t)
    }

    /// Configuration at global time s in [0, 1], segments sharing time equally.
    pub fn at_global(&self, s: f64) -> Result<Configuration> {
        let k = self.segments.len();
        if k == 0 {
            return Err(Error::InvalidConfiguration("empty path".into()));
        }
        let x = s.clamp(0.0, 1.0) * k as f64;
        let i = (x.floor() as usize).min(k - 1);
        self.segments[i].at(x - i as f64)
    }

    /// Concatenation; the other path's radius is ignored and the target taken from it.
    pub fn concat(&self, other: &DeformationPath) -> Result<DeformationPath> {
        let mut out = self.clone();
        for s in &other.segments {
            out.push(s.clone())?;
        }
        out.target = other.target.clone();
        Ok(out)
    }

    /// Time reversal; the declared target becomes the original start.
    pub fn reversed(&self) -> Result<DeformationPath> {
        Ok(DeformationPath {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
            radius: self.radius,
            target: Some(self.start()?),
        })
    }

    pub fn rotated(&self, r: &Rotation) -> DeformationPath {
        DeformationPath {
            segments: self.segments.iter().map(|s| s.rotated(r)).collect(),
            radius: self.radius,
            target: self.target.as_ref().map(|c| c.rotate_all(r)),
        }
    }

    /// Point k becomes point `images[k]` throughout.
    pub fn relabeled(&self, images: &[usize]) -> DeformationPath {
        DeformationPath {
            segments: self.segments.iter().map(|s| s.relabeled(images)).collect(),
            radius: self.radius,
            target: self.target.as_ref().map(|c| c.relabeled(images)),
        }
    }

    /// Appends `other` after relabeling it so that its start coincides
    /// point-for-point with the current end. Both must occupy the same
    /// positions (within 1e-6) up to labels.
    pub fn then_matched(&self, other: &DeformationPath) -> Result<DeformationPath> {
        let end = self.end()?;
        let start = other.start()?;
        if end.n() != start.n() {
            return Err(Error::Matching("paths have different sizes".into()));
        }
        // end[k] = start[q[k]]: relabel other by q⁻¹ so its label k starts at end[k]
        let mut inverse = vec![usize::MAX; end.n()];
        for (k, u) in end.points().iter().enumerate() {
            let (q, d) = start
                .points()
                .iter()
                .enumerate()
                .map(|(q, w)| (q, (u.vec() - w.vec()).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty");
            if d > 1e-6 || inverse[q] != usize::MAX {
                return Err(Error::Matching(format!(
                    "end point {k} has no unique partner in the next path"
                )));
            }
            inverse[q] = k;
        }
        self.concat(&other.relabeled(&inverse))
    }

    /// Samples `per_segment` keyframes per segment.
    pub fn keyframes(&self, per_segment: usize) -> Result<Vec<Configuration>> {
        let m = per_segment.max(2);
        let mut out = Vec::new();
        for s in &self.segments {
            for i in 0..m {
                out.push(s.at(i as f64 / (m - 1) as f64)?);
            }
        }
        Ok(out)
    }

    /// JSON export: per-segment kind, parameters and sampled keyframes.
    pub fn to_json(&self, per_segment: usize) -> Result<String> {
        #[derive(Serialize)]
        struct SegOut<'a> {
            kind: &'a str,
            params: &'a serde_json::Value,
            keyframes: Vec<ConfigFile>,
        }
        #[derive(Serialize)]
        struct PathOut<'a> {
            radius: f64,
            segments: Vec<SegOut<'a>>,
        }
        let m = per_segment.max(2);
        let mut segments = Vec::new();
        for s in &self.segments {
            let mut keyframes = Vec::with_capacity(m);
            for i in 0..m {
                keyframes.push(ConfigFile::from_config(
                    &s.at(i as f64 / (m - 1) as f64)?,
                    Some(self.radius),
                ));
            }
            segments.push(SegOut {
                kind: &s.kind,
                params: &s.params,
                keyframes,
            });
        }
        Ok(serde_json::to_string_pretty(&PathOut {
            radius: self.radius,
            segments,
        })
        .expect("serializable"))
    }

    /// Frames for rendering, one configuration JSON per line.
    pub fn frames_json(&self, per_segment: usize) -> Result<Vec<String>> {
        Ok(self
            .keyframes(per_segment)?
            .iter()
            .map(|c| config_to_json(c, Some(self.radius)))
            .collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PathReport {
    /// Minimum pairwise separation over all samples.
    pub min_separation: f64,
    /// Minimum over samples strictly inside the path (joints included,
    /// the very first and very last sample excluded).
    pub interior_min_separation: f64,
    /// `(segment, t)` of samples below the allowed separation.
    pub violation_times: Vec<(usize, f64)>,
    pub samples: usize,
    /// Alignment rms of the end against the declared target.
    pub endpoint_match_rms: Option<f64>,
}

impl PathReport {
    pub fn is_valid(&self) -> bool {
        self.violation_times.is_empty()
    }
}

/// Samples each segment at `samples_per_segment` uniformly spaced times and
/// flags samples whose separation drops below θ(radius) − 1e-9.
pub fn verify_path(path: &DeformationPath, samples_per_segment: usize) -> Result<PathReport> {
    if samples_per_segment < 2 {
        return Err(Error::Domain("at least two samples per segment".into()));
    }
    let limit = angle_from_radius(path.radius)? - 1e-9;
    let m = samples_per_segment;
    let nseg = path.segments.len();
    let jobs: Vec<(usize, usize)> = (0..nseg)
        .flat_map(|s| (0..m).map(move |i| (s, i)))
        .collect();
    let seps: Vec<(usize, f64, f64)> = jobs
        .par_iter()
        .map(|&(s, i)| {
            let t = i as f64 / (m - 1) as f64;
            let sep = Configuration::new(path.segments[s].points(t))
                .map(|c| c.min_separation())
                .unwrap_or(0.0);
            (s, t, sep)
        })
        .collect();
    let mut min_sep = f64::INFINITY;
    let mut interior = f64::INFINITY;
    let mut violations = Vec::new();
    for (k, &(s, t, sep)) in seps.iter().enumerate() {
        min_sep = min_sep.min(sep);
        if k != 0 && k != seps.len() - 1 {
            interior = interior.min(sep);
        }
        if sep < limit {
            violations.push((s, t));
        }
    }
    let endpoint_match_rms = match &path.target {
        Some(target) => Some(align(&path.end()?, target).rms),
        None => None,
    };
    Ok(PathReport {
        min_separation: min_sep,
        interior_min_separation: interior,
        violation_times: violations,
        samples: seps.len(),
        endpoint_match_rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{named, NamedConfig};
    use crate::geom::Vec3;

    fn rotation_path() -> DeformationPath {
        let dod = named(&NamedConfig::Dod).unwrap();
        let mut p = DeformationPath::new(1.0);
        p.push(Segment::rigid_rotation(&dod, Vec3::z(), 1.0))
            .unwrap();
        p
    }

    #[test]
    fn rigid_rotation_is_safe() {
        let p = rotation_path();
        let rep = verify_path(&p, 50).unwrap();
        assert!(rep.is_valid());
        assert!((rep.min_separation - (1.0 / 5f64.sqrt()).acos()).abs() < 1e-12);
        assert_eq!(rep.samples, 50);
        assert!(rep.endpoint_match_rms.is_none());
    }

    #[test]
    fn joints_must_meet() {
        let mut p = rotation_path();
        let dod = named(&NamedConfig::Dod).unwrap();
        assert!(p
            .push(Segment::rigid_rotation(&dod, Vec3::z(), 1.0))
            .is_err());
        let end = p.end().unwrap();
        p.push(Segment::rigid_rotation(&end, Vec3::x(), 0.5))
            .unwrap();
        assert_eq!(p.segments().len(), 2);
    }

    #[test]
    fn reverse_and_relabel() {
        let p = rotation_path();
        let r = p.reversed().unwrap();
        assert!(align(&r.end().unwrap(), &p.start().unwrap()).rms < 1e-15);
        assert!(align(&r.start().unwrap(), &p.end().unwrap()).rms < 1e-15);
        let images: Vec<usize> = (0..12).map(|k| (k + 1) % 12).collect();
        let q = p.relabeled(&images);
        assert_eq!(q.start().unwrap().point(1), p.start().unwrap().point(0));
        let both = p.concat(&r).unwrap();
        assert!(align(&both.end().unwrap(), &p.start().unwrap()).rms < 1e-15);
    }

    #[test]
    fn overlap_is_flagged() {
        let pts = vec![UnitVector::north(), UnitVector::from_spherical(0.5, 0.0)];
        let mut p = DeformationPath::new(1.0);
        p.push(Segment::new("static", serde_json::Value::Null, move |_| {
            pts.clone()
        }))
        .unwrap();
        let rep = verify_path(&p, 5).unwrap();
        assert_eq!(rep.violation_times.len(), 5);
        assert!(verify_path(&p, 1).is_err());
    }

    #[test]
    fn json_export() {
        let p = rotation_path();
        let v: serde_json::Value = serde_json::from_str(&p.to_json(3).unwrap()).unwrap();
        assert_eq!(v["segments"][0]["kind"], "rigid-rotation");
        assert_eq!(v["segments"][0]["keyframes"].as_array().unwrap().len(), 3);
        assert_eq!(p.frames_json(4).unwrap().len(), 4);
    }
}
