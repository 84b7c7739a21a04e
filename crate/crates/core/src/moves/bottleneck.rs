//! Crossing configurations of the five-ball move at radii above 1, and the
//! modified move that passes through them.
//!
//! Chart labels: 0 is the pole N, 1..=5 the upper ring U₁..U₅, 6..=10 the
//! lower ring V₁..V₅, 11 the antipode S. At the start Uᵢ sits at longitude
//! 72(i−1)° and Vᵢ at 36 + 72(i−1)°; the move carries every Uᵢ past Vᵢ.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::m5::PolarChart;
use super::path::{DeformationPath, Segment};
use crate::config::{named, ConfigFile, Configuration, NamedConfig};
use crate::error::{Error, Result};
use crate::geom::{angle_from_radius, radius_from_angle, slerp, UnitVector, Vec3};
use crate::maximin::{self, wrap_angle, Constraints, Equality, PolishOptions};

const POLE: usize = 0;
const ANTIPODE: usize = 11;

fn upper(i: usize) -> usize {
    i
}

fn lower(i: usize) -> usize {
    5 + i
}

fn lower_reference(i: usize) -> f64 {
    (36.0 + 72.0 * (i as f64 - 1.0)).to_radians()
}

fn spherical(polar: f64, lon: f64) -> Vec3 {
    UnitVector::from_spherical(polar, lon).vec()
}

fn longitude(p: &Vec3) -> f64 {
    p.y.atan2(p.x)
}

/// Fixes the rotation: pole and antipode share their projection on the
/// equatorial plane, and the lower ring keeps its mean longitude offset at 0.
fn gauge() -> Vec<Equality> {
    vec![
        Equality::EqualCoordinate(POLE, ANTIPODE, 0),
        Equality::EqualCoordinate(POLE, ANTIPODE, 1),
        Equality::MeanLongitude((1..=5).map(|i| (lower(i), lower_reference(i))).collect()),
    ]
}

/// Icosahedral start in chart labels, with the upper ring turned by `turns`
/// fifths of a revolution.
fn chart_icosahedron(turns: f64) -> Vec<Vec3> {
    let a = 2f64.atan();
    let mut p = vec![Vec3::z()];
    for i in 1..=5 {
        p.push(spherical(a, (72.0 * (i as f64 - 1.0 + turns)).to_radians()));
    }
    for i in 1..=5 {
        p.push(spherical(PI - a, lower_reference(i)));
    }
    p.push(-Vec3::z());
    p
}

/// Start for crossing `j`: both rings on the parallels touching the poles,
/// Uⱼ and every ball in `held` over their partners, the other upper balls
/// nudged to their side of their partners.
fn crossing_seed(j: usize, held: Option<usize>) -> Vec<Vec3> {
    let stagger = 0.6f64.to_radians();
    let mut p = vec![Vec3::z()];
    for i in 1..=5 {
        let shift = match i.cmp(&j) {
            _ if Some(i) == held => 0.0,
            std::cmp::Ordering::Less => stagger,
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Greater => -stagger,
        };
        p.push(spherical(PI / 3.0, lower_reference(i) + shift));
    }
    for i in 1..=5 {
        p.push(spherical(2.0 * PI / 3.0, lower_reference(i)));
    }
    p.push(-Vec3::z());
    p
}

/// Uⱼ over Vⱼ: both on one great circle with each pole. With `held`, a
/// second upper ball is pinned over its partner, a limit of the states in
/// which it is about to cross or has just crossed.
fn crossing_constraints(j: usize, held: Option<usize>) -> Constraints {
    let mut e = gauge();
    e.push(Equality::Coplanar(POLE, upper(j), lower(j)));
    e.push(Equality::Coplanar(ANTIPODE, upper(j), lower(j)));
    if let Some(i) = held {
        e.push(Equality::LongitudeGap(upper(i), lower(i), 0.0));
    }
    Constraints { equalities: e }
}

/// The configuration met when Uⱼ passes over Vⱼ, at the largest radius the
/// crossing admits.
#[derive(Clone, Debug)]
pub struct BottleneckResult {
    pub j: usize,
    pub r1_j: f64,
    pub theta: f64,
    /// Chart labels, see the module documentation.
    pub config: Configuration,
}

impl Serialize for BottleneckResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BottleneckResult", 4)?;
        st.serialize_field("j", &self.j)?;
        st.serialize_field("r1_j", &self.r1_j)?;
        st.serialize_field("theta", &self.theta)?;
        st.serialize_field(
            "config",
            &ConfigFile::from_config(&self.config, Some(self.r1_j)),
        )?;
        st.end()
    }
}

/// Upper-ring balls before Uⱼ have passed (or are over) their partners,
/// those after have not.
fn crossing_order_holds(j: usize, p: &[Vec3]) -> bool {
    let d = offsets(p);
    (1..=5).all(|i| match i.cmp(&j) {
        std::cmp::Ordering::Less => d[i - 1] >= -1e-12,
        std::cmp::Ordering::Equal => true,
        std::cmp::Ordering::Greater => d[i - 1] <= 1e-12,
    })
}

/// Seed plus `restarts` random perturbations of it, each polished under the
/// crossing constraints, for the plain crossing and for each choice of a
/// held second ball; the best result respecting the crossing order.
fn best_crossing(j: usize, restarts: usize, spread: f64, seed: u64) -> Option<maximin::Polished> {
    let variants: Vec<Option<usize>> = std::iter::once(None)
        .chain((1..=5).filter(|&i| i != j).map(Some))
        .collect();
    variants
        .into_par_iter()
        .filter_map(|held| best_crossing_variant(j, held, restarts, spread, seed))
        .reduce_with(|a, b| if b.separation > a.separation { b } else { a })
}

fn best_crossing_variant(
    j: usize,
    held: Option<usize>,
    restarts: usize,
    spread: f64,
    seed: u64,
) -> Option<maximin::Polished> {
    let cons = crossing_constraints(j, held);
    let opts = PolishOptions {
        max_iter: 2000,
        ..PolishOptions::default()
    };
    let base = crossing_seed(j, held);
    (0..=restarts as u64)
        .into_par_iter()
        .filter_map(|k| {
            let start: Vec<Vec3> = if k == 0 {
                base.clone()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k);
                base.iter()
                    .map(|p| {
                        let n = Vec3::new(
                            StandardNormal.sample(&mut rng),
                            StandardNormal.sample(&mut rng),
                            StandardNormal.sample(&mut rng),
                        );
                        (p + n * (spread / 3f64.sqrt())).normalize()
                    })
                    .collect()
            };
            let r = maximin::maximize(&start, &cons, &opts);
            (cons.violation(&r.points) < 1e-12 && crossing_order_holds(j, &r.points))
                .then_some((k, r))
        })
        .reduce_with(|a, b| {
            if b.1.separation > a.1.separation || (b.1.separation == a.1.separation && b.0 < a.0) {
                b
            } else {
                a
            }
        })
        .map(|(_, r)| r)
}

const CROSSING_RESTARTS: usize = 8;
const CROSSING_SPREAD: f64 = 0.03;

fn solve_crossing(j: usize) -> Result<BottleneckResult> {
    let best = best_crossing(j, CROSSING_RESTARTS, CROSSING_SPREAD, 0).ok_or_else(|| {
        Error::Numeric(format!(
            "crossing {j}: no restart satisfied the constraints"
        ))
    })?;
    let theta = best.separation;
    Ok(BottleneckResult {
        j,
        r1_j: radius_from_angle(theta)?,
        theta,
        config: Configuration::from_vecs(&best.points)?,
    })
}

fn all_crossings() -> &'static std::result::Result<Vec<BottleneckResult>, String> {
    static CACHE: OnceLock<std::result::Result<Vec<BottleneckResult>, String>> = OnceLock::new();
    CACHE.get_or_init(|| {
        (1..=5usize)
            .into_par_iter()
            .map(solve_crossing)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.to_string())
    })
}

pub fn bottleneck_radius(j: usize) -> Result<BottleneckResult> {
    if !(1..=5).contains(&j) {
        return Err(Error::Domain(format!(
            "crossing index must be in 1..=5, got {j}"
        )));
    }
    bottleneck_radii().map(|v| v[j - 1].clone())
}

/// All five crossings, solved concurrently once per process.
pub fn bottleneck_radii() -> Result<Vec<BottleneckResult>> {
    all_crossings().clone().map_err(Error::Numeric)
}

/// r₁: the smallest of the five crossing radii.
pub fn critical_radius_lower_bound() -> Result<f64> {
    Ok(bottleneck_radii()?
        .iter()
        .map(|b| b.r1_j)
        .fold(f64::INFINITY, f64::min))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FeasibilityBracket {
    pub j: usize,
    pub below_feasible: bool,
    pub above_infeasible: bool,
    /// Best separation found by the perturbed restarts.
    pub best_restart_theta: f64,
}

/// Checks that crossing `j` is realizable at r₁⁽ʲ⁾ − `delta` and that no
/// restart from `restarts` perturbations of the crossing seed (rms `spread`
/// radians per point, streams of `seed`) reaches r₁⁽ʲ⁾ + `delta`.
pub fn bottleneck_bracket(
    j: usize,
    delta: f64,
    restarts: usize,
    spread: f64,
    seed: u64,
) -> Result<FeasibilityBracket> {
    let b = bottleneck_radius(j)?;
    let best = best_crossing(j, restarts, spread, seed).map_or(0.0, |r| r.separation);
    let below = angle_from_radius(b.r1_j - delta)?;
    let above = angle_from_radius(b.r1_j + delta)?;
    Ok(FeasibilityBracket {
        j,
        below_feasible: b.config.min_separation() >= below,
        above_infeasible: best < above,
        best_restart_theta: best,
    })
}

/// Longitude offsets lon(Uᵢ) − lon(Vᵢ).
fn offsets(p: &[Vec3]) -> [f64; 5] {
    let mut d = [0.0; 5];
    for (i, di) in d.iter_mut().enumerate() {
        *di = wrap_angle(longitude(&p[upper(i + 1)]) - longitude(&p[lower(i + 1)]));
    }
    d
}

fn with_offsets(p: &[Vec3], d: &[f64; 5]) -> Vec<Vec3> {
    let mut q = p.to_vec();
    let now = offsets(p);
    for i in 0..5 {
        let k = upper(i + 1);
        let rot = nalgebra::Rotation3::from_axis_angle(&Vec3::z_axis(), d[i] - now[i]);
        q[k] = rot * p[k];
    }
    q
}

fn solve_at_offsets(warm: &[Vec3], d: &[f64; 5]) -> Vec<Vec3> {
    let mut e = gauge();
    for i in 1..=5 {
        e.push(Equality::LongitudeGap(upper(i), lower(i), d[i - 1]));
    }
    let cons = Constraints { equalities: e };
    maximin::maximize(&with_offsets(warm, d), &cons, &PolishOptions::default()).points
}

fn slerp_all(a: &[Vec3], b: &[Vec3], s: f64) -> Vec<UnitVector> {
    a.iter()
        .zip(b)
        .map(|(x, y)| slerp(&UnitVector::normalize(*x), &UnitVector::normalize(*y), s))
        .collect()
}

fn slerp_floor(a: &[Vec3], b: &[Vec3], samples: usize) -> f64 {
    (0..=samples)
        .map(|k| {
            let pts: Vec<Vec3> = slerp_all(a, b, k as f64 / samples as f64)
                .iter()
                .map(|u| u.vec())
                .collect();
            maximin::min_separation(&pts)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Best configuration with Uₗ offset by `value` from Vₗ and each ball in
/// `holds` pinned over its partner.
fn solve_led(warm: &[Vec3], lead: usize, value: f64, holds: &[usize]) -> Vec<Vec3> {
    let mut e = gauge();
    e.push(Equality::LongitudeGap(upper(lead), lower(lead), value));
    let mut d = offsets(warm);
    d[lead - 1] = value;
    for &i in holds {
        e.push(Equality::LongitudeGap(upper(i), lower(i), 0.0));
        d[i - 1] = 0.0;
    }
    let cons = Constraints { equalities: e };
    maximin::maximize(&with_offsets(warm, &d), &cons, &PolishOptions::default()).points
}

/// Free balls on the wrong side of their partners; `sides[i]` is +1 for
/// balls that must be at or past their partner and −1 for the others.
fn side_violations(p: &[Vec3], sides: &[f64; 5], lead: usize, holds: &[usize]) -> Vec<usize> {
    let d = offsets(p);
    (1..=5)
        .filter(|&i| i != lead && !holds.contains(&i) && sides[i - 1] * d[i - 1] < -1e-10)
        .collect()
}

/// [`solve_led`] with the other balls free on their sides: balls that cross
/// over are pinned and re-solved, pinned balls are released when that helps.
fn solve_led_sided(warm: &[Vec3], lead: usize, value: f64, sides: &[f64; 5]) -> Vec<Vec3> {
    let mut holds: Vec<usize> = Vec::new();
    loop {
        let mut p = solve_led(warm, lead, value, &holds);
        let bad = side_violations(&p, sides, lead, &holds);
        if bad.is_empty() {
            let mut k = 0;
            while k < holds.len() {
                let mut trial = holds.clone();
                trial.remove(k);
                let q = solve_led(&p, lead, value, &trial);
                let better = maximin::min_separation(&q) >= maximin::min_separation(&p) - 1e-12;
                if better && side_violations(&q, sides, lead, &trial).is_empty() {
                    holds = trial;
                    p = q;
                } else {
                    k += 1;
                }
            }
            return p;
        }
        holds.extend(bad);
    }
}

/// Offsets a fraction `s` of the way from `a` to `b`.
fn blend_offsets(a: &[Vec3], b: &[Vec3], s: f64) -> [f64; 5] {
    let (da, db) = (offsets(a), offsets(b));
    let mut d = [0.0; 5];
    for i in 0..5 {
        d[i] = da[i] + s * wrap_angle(db[i] - da[i]);
    }
    d
}

fn between(a: &[Vec3], b: &[Vec3], s: f64) -> Vec<Vec3> {
    let warm: Vec<Vec3> = slerp_all(a, b, s).iter().map(|u| u.vec()).collect();
    solve_at_offsets(&warm, &blend_offsets(a, b, s))
}

/// Configurations visited by the modified move, in chart labels, joined by
/// per-point great-circle interpolation; with the separation the chain keeps.
#[derive(Clone, Debug)]
struct Chain {
    frames: Vec<Vec<Vec3>>,
    floor: f64,
}

const STEPS_PER_LEG: usize = 12;
const FLOOR_SAMPLES: usize = 64;
/// Offset of Uⱼ from Vⱼ at the keyframes flanking crossing j.
const FLANK: f64 = 3.0 * PI / 180.0;

fn subdivide(a: &[Vec3], b: &[Vec3], depth: usize, out: &mut Vec<Vec<Vec3>>) {
    let ends = maximin::min_separation(a).min(maximin::min_separation(b));
    if depth > 0 && slerp_floor(a, b, FLOOR_SAMPLES) < ends - 1e-9 {
        let m = between(a, b, 0.5);
        subdivide(a, &m, depth - 1, out);
        subdivide(&m, b, depth - 1, out);
    } else {
        out.push(b.to_vec());
    }
}

/// Keyframes: the icosahedron, then for each crossing j the best
/// configurations with Uⱼ a little short of Vⱼ, over Vⱼ, and a little past,
/// then the turned icosahedron. Between keyframes all five offsets move
/// linearly and each intermediate configuration is optimized for its offsets.
fn build_chain() -> Result<Chain> {
    let crossings: Vec<Vec<Vec3>> = bottleneck_radii()?
        .iter()
        .map(|b| b.config.vecs())
        .collect();
    let mut keys: Vec<Vec<Vec3>> = vec![chart_icosahedron(0.0)];
    for j in 1..=5 {
        let here = &crossings[j - 1];
        let next = if j < 5 {
            crossings[j].clone()
        } else {
            chart_icosahedron(1.0)
        };
        let mut sides = [-1.0; 5];
        for side in sides.iter_mut().take(j - 1) {
            *side = 1.0;
        }
        let prev = keys.last().expect("nonempty").clone();
        let reach = offsets(&prev)[j - 1].abs();
        let warm = between(&prev, here, 1.0 - (FLANK / reach).min(1.0));
        keys.push(solve_led_sided(&warm, j, -FLANK, &sides));
        keys.push(here.clone());
        sides[j - 1] = 1.0;
        let reach = offsets(&next)[j - 1].abs();
        let warm = between(here, &next, (FLANK / reach).min(1.0));
        keys.push(solve_led_sided(&warm, j, FLANK, &sides));
    }
    keys.push(chart_icosahedron(1.0));

    let mut coarse = vec![keys[0].clone()];
    for w in keys.windows(2) {
        let mut cur = w[0].clone();
        for step in 1..STEPS_PER_LEG {
            let d = blend_offsets(&w[0], &w[1], step as f64 / STEPS_PER_LEG as f64);
            cur = solve_at_offsets(&cur, &d);
            coarse.push(cur.clone());
        }
        coarse.push(w[1].clone());
    }

    let mut frames = vec![coarse[0].clone()];
    for w in coarse.windows(2) {
        subdivide(&w[0], &w[1], 6, &mut frames);
    }
    let floor = frames
        .windows(2)
        .map(|w| slerp_floor(&w[0], &w[1], FLOOR_SAMPLES))
        .fold(f64::INFINITY, f64::min);
    Ok(Chain { frames, floor })
}

fn chain() -> Result<&'static Chain> {
    static CACHE: OnceLock<std::result::Result<Chain, String>> = OnceLock::new();
    CACHE
        .get_or_init(|| build_chain().map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Error::Numeric(e.clone()))
}

/// Largest radius the constructed modified move is certified for.
pub fn modified_m5_radius() -> Result<f64> {
    radius_from_angle(chain()?.floor)
}

/// Five-ball move about `pole` of the icosahedral configuration for radii
/// above 1. The rings never contract; instead every configuration along the
/// way maximizes the minimum separation for its longitude offsets, which
/// advance leg by leg through the five crossings. The path is built once
/// and serves every admissible radius.
pub fn modified_m5_path(pole: usize, direction: i32, r: f64) -> Result<DeformationPath> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let r1 = critical_radius_lower_bound()?;
    if r > r1 {
        return Err(Error::InfeasibleMove(format!(
            "r = {r} exceeds the smallest crossing radius {r1:.9}"
        )));
    }
    let chain = chain()?;
    let certified = radius_from_angle(chain.floor)?;
    if r > certified {
        return Err(Error::InfeasibleMove(format!(
            "r = {r} is below r1 = {r1:.9} but above {certified:.9}, the radius the constructed path keeps"
        )));
    }
    let start = named(&NamedConfig::Dod)?;
    let chart = PolarChart::new(&start, pole, direction)?;
    let order = chart.order();
    let frame = chart.frame;
    let to_world = move |pts: Vec<UnitVector>| -> Vec<UnitVector> {
        let mut out = vec![UnitVector::north(); 12];
        for (c, u) in pts.iter().enumerate() {
            out[order[c]] = frame.to_world(u.polar(), u.longitude());
        }
        out
    };

    let mut path = DeformationPath::new(r);
    let params = serde_json::json!({ "pole": pole, "direction": direction });
    for w in chain.frames.windows(2) {
        let (a, b) = (w[0].clone(), w[1].clone());
        let map = to_world;
        path.push(Segment::new("m5mod-slerp", params.clone(), move |s| {
            map(slerp_all(&a, &b, s))
        }))?;
    }
    let cycle = chart.cycle();
    let target = Configuration::new(cycle.iter().map(|&k| start.point(k)).collect())?;
    Ok(path.with_target(target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::contact_graph;

    /// Contact graphs of the five crossings from an independent constrained
    /// optimizer (crossing order as inequalities), chart labels.
    const CONTACTS: [&[(usize, usize)]; 5] = [
        &[
            (0, 1),
            (0, 3),
            (0, 4),
            (0, 5),
            (1, 2),
            (1, 6),
            (2, 3),
            (2, 7),
            (3, 4),
            (3, 8),
            (4, 5),
            (4, 9),
            (5, 10),
            (6, 10),
            (6, 11),
            (7, 8),
            (7, 11),
            (8, 9),
            (8, 11),
            (9, 10),
            (9, 11),
        ],
        &[
            (0, 1),
            (0, 5),
            (1, 2),
            (1, 6),
            (2, 3),
            (2, 7),
            (3, 4),
            (3, 8),
            (4, 5),
            (4, 9),
            (5, 10),
            (6, 7),
            (6, 10),
            (6, 11),
            (8, 9),
            (8, 11),
            (9, 10),
            (9, 11),
            (10, 11),
        ],
        &[
            (0, 1),
            (0, 3),
            (0, 5),
            (1, 2),
            (1, 6),
            (2, 3),
            (2, 7),
            (3, 4),
            (3, 8),
            (4, 5),
            (4, 9),
            (5, 10),
            (6, 7),
            (6, 10),
            (6, 11),
            (7, 11),
            (8, 11),
            (9, 10),
            (9, 11),
            (10, 11),
        ],
        &[
            (0, 1),
            (0, 5),
            (1, 2),
            (1, 6),
            (2, 3),
            (2, 7),
            (3, 4),
            (3, 8),
            (4, 5),
            (4, 9),
            (5, 10),
            (6, 7),
            (6, 10),
            (6, 11),
            (7, 8),
            (7, 11),
            (8, 11),
            (9, 10),
            (10, 11),
        ],
        &[
            (0, 1),
            (0, 2),
            (0, 3),
            (0, 5),
            (1, 2),
            (1, 6),
            (2, 3),
            (2, 7),
            (3, 4),
            (3, 8),
            (4, 5),
            (4, 9),
            (5, 10),
            (6, 7),
            (6, 10),
            (7, 8),
            (7, 11),
            (8, 9),
            (8, 11),
            (9, 11),
            (10, 11),
        ],
    ];
    const RADII: [f64; 5] = [
        1.0024310758,
        1.0013127952,
        1.0005834212,
        1.0013127952,
        1.0024310758,
    ];

    #[test]
    fn crossings_match_oracle() {
        for b in bottleneck_radii().unwrap() {
            assert!(
                (b.r1_j - RADII[b.j - 1]).abs() < 1e-9,
                "j = {}: {}",
                b.j,
                b.r1_j
            );
            let g = contact_graph(&b.config, b.theta, 1e-8).unwrap();
            let mut edges = g.edges.clone();
            edges.sort_unstable();
            assert_eq!(edges, CONTACTS[b.j - 1].to_vec(), "j = {}", b.j);
        }
        let r1 = critical_radius_lower_bound().unwrap();
        assert!((r1 - RADII[2]).abs() < 1e-9);
        assert!(bottleneck_radii().unwrap().iter().all(|b| b.r1_j > 1.0));
    }

    #[test]
    fn crossing_chain_is_coplanar() {
        for b in bottleneck_radii().unwrap() {
            let p = b.config.vecs();
            let (u, v) = (upper(b.j), lower(b.j));
            assert!(p[POLE].dot(&p[u].cross(&p[v])).abs() < 1e-12);
            assert!(p[ANTIPODE].dot(&p[u].cross(&p[v])).abs() < 1e-12);
        }
    }

    #[test]
    fn crossings_keep_their_order() {
        for b in bottleneck_radii().unwrap() {
            assert!(crossing_order_holds(b.j, &b.config.vecs()));
        }
    }

    #[test]
    fn chart_start_is_icosahedral() {
        let c = Configuration::from_vecs(&chart_icosahedron(0.0)).unwrap();
        let dod = named(&NamedConfig::Dod).unwrap();
        assert!(crate::config::match_up_to_relabeling(&c, &dod, 1e-7).is_some());
        assert!((c.min_separation() - (1.0 / 5f64.sqrt()).acos()).abs() < 1e-12);
        let d = offsets(&chart_icosahedron(0.0));
        assert!(d.iter().all(|x| (x + PI / 5.0).abs() < 1e-12));
        let d = offsets(&chart_icosahedron(1.0));
        assert!(d.iter().all(|x| (x - PI / 5.0).abs() < 1e-12));
    }

    #[test]
    fn modified_move_radii() {
        let r1 = critical_radius_lower_bound().unwrap();
        let certified = modified_m5_radius().unwrap();
        assert!(certified > 1.0 && certified <= r1);
        assert!(r1 - certified < 1e-6);
        for r in [1.0 + 1e-4, (1.0 + r1) / 2.0, 1.0005] {
            let p = modified_m5_path(0, 1, r).unwrap();
            let rep = crate::moves::verify_path(&p, 200).unwrap();
            assert!(rep.is_valid(), "r = {r}");
            assert!(rep.endpoint_match_rms.unwrap() < 1e-12);
        }
        assert!(matches!(
            modified_m5_path(0, 1, r1 + 0.01),
            Err(Error::InfeasibleMove(_))
        ));
        assert!(matches!(
            modified_m5_path(0, 1, (certified + r1) / 2.0),
            Err(Error::InfeasibleMove(_))
        ));
    }

    #[test]
    fn bracket_of_the_smallest_crossing() {
        let b = bottleneck_bracket(3, 1e-4, 8, 0.02, 7).unwrap();
        assert!(b.below_feasible && b.above_infeasible);
    }

    #[test]
    fn bad_index() {
        assert!(bottleneck_radius(0).is_err());
        assert!(bottleneck_radius(6).is_err());
    }
}
