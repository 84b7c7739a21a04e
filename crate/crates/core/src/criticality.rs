//! Stress graphs and the balance test that certifies criticality of the
//! injectivity radius.

use std::f64::consts::PI;

use crate::lp::{Cmp, LinearProgram, Sense};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::config::{contact_graph, injectivity_radius, Configuration, ContactGraph, CONTACT_TOL};
use crate::error::{Error, Result};
use crate::geom::{displace, unit_tangent_toward, TangentVector, UnitVector, Vec3};

/// Largest per-vertex force norm accepted as balanced.
pub const BALANCE_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct StressGraph {
    pub graph: ContactGraph,
    /// One weight per entry of `graph.edges`.
    pub weights: Vec<f64>,
}

impl StressGraph {
    /// Total angular length of the edges carrying positive weight.
    pub fn support_length(&self) -> f64 {
        let k = self.weights.iter().filter(|&&w| w > 1e-12).count();
        k as f64 * self.graph.contact_angle
    }
}

/// Unit edge tangents at each vertex: `per_vertex[i]` lists `(edge index, tangent)`.
#[derive(Clone, Debug)]
pub struct ForceSystem {
    pub per_vertex: Vec<Vec<(usize, TangentVector)>>,
}

impl ForceSystem {
    /// Net force at every vertex under `weights`.
    pub fn net_forces(&self, weights: &[f64]) -> Vec<Vec3> {
        self.per_vertex
            .iter()
            .map(|list| {
                list.iter()
                    .map(|(e, t)| t.direction() * weights[*e])
                    .fold(Vec3::zeros(), |a, b| a + b)
            })
            .collect()
    }

    pub fn residual(&self, weights: &[f64]) -> f64 {
        self.net_forces(weights)
            .iter()
            .map(|f| f.norm())
            .fold(0.0, f64::max)
    }
}

pub fn force_system(u: &Configuration, g: &ContactGraph) -> Result<ForceSystem> {
    let mut per_vertex = vec![Vec::new(); u.n()];
    for (e, &(i, j)) in g.edges.iter().enumerate() {
        let (pi, pj) = (u.point(i), u.point(j));
        let (Some(ti), Some(tj)) = (unit_tangent_toward(&pi, &pj), unit_tangent_toward(&pj, &pi))
        else {
            return Err(Error::DegenerateEdge { i, j });
        };
        per_vertex[i].push((e, TangentVector::new(pi, ti)));
        per_vertex[j].push((e, TangentVector::new(pj, tj)));
    }
    Ok(ForceSystem { per_vertex })
}

#[derive(Clone, Debug)]
pub struct BalanceCertificate {
    pub balanced: bool,
    pub stress: Option<StressGraph>,
    pub residual: f64,
}

impl BalanceCertificate {
    /// `(i, j, w)` triples of the returned stress.
    pub fn weight_triples(&self) -> Vec<(usize, usize, f64)> {
        self.stress
            .as_ref()
            .map(|s| {
                s.graph
                    .edges
                    .iter()
                    .zip(&s.weights)
                    .map(|(&(i, j), &w)| (i, j, w))
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

impl Serialize for BalanceCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BalanceCertificate", 3)?;
        st.serialize_field("balanced", &self.balanced)?;
        let triples: Vec<(usize, usize, f64)> = self.weight_triples();
        st.serialize_field("weights", &triples)?;
        st.serialize_field("residual", &self.residual)?;
        st.end()
    }
}

/// Balance test at separation `theta` with the default contact tolerance.
pub fn is_balanced(u: &Configuration, theta: f64) -> Result<BalanceCertificate> {
    is_balanced_with_tol(u, theta, CONTACT_TOL)
}

/// Looks for weights w ≥ 0 with Σw = 1 on the contact graph whose edge
/// tangents cancel at every vertex.
///
/// The equalities are relaxed by slack variables whose total is minimized,
/// so a certificate is returned even when only approximate balance is
/// possible; `balanced` is decided on the exact residual of the weights.
pub fn is_balanced_with_tol(u: &Configuration, theta: f64, tol: f64) -> Result<BalanceCertificate> {
    let g = contact_graph(u, theta, tol)?;
    if g.edges.is_empty() {
        return Ok(BalanceCertificate {
            balanced: false,
            stress: None,
            residual: f64::INFINITY,
        });
    }
    let fs = force_system(u, &g)?;
    let weights = min_residual_weights(&fs, g.edges.len())?;
    let residual = fs.residual(&weights);
    let balanced = residual <= BALANCE_TOL;
    Ok(BalanceCertificate {
        balanced,
        stress: Some(StressGraph { graph: g, weights }),
        residual,
    })
}

fn min_residual_weights(fs: &ForceSystem, n_edges: usize) -> Result<Vec<f64>> {
    let mut lp = LinearProgram::new(Sense::Minimize);
    let w: Vec<usize> = (0..n_edges)
        .map(|_| lp.add_var(0.0, 0.0, f64::INFINITY))
        .collect();
    lp.add_row(w.iter().map(|&v| (v, 1.0)).collect(), Cmp::Eq, 1.0);
    for list in &fs.per_vertex {
        if list.is_empty() {
            continue;
        }
        for k in 0..3 {
            let mut row: Vec<(usize, f64)> = list
                .iter()
                .map(|(e, t)| (w[*e], t.direction()[k]))
                .collect();
            let plus = lp.add_var(1.0, 0.0, f64::INFINITY);
            let minus = lp.add_var(1.0, 0.0, f64::INFINITY);
            row.push((plus, -1.0));
            row.push((minus, 1.0));
            lp.add_row(row, Cmp::Eq, 0.0);
        }
    }
    let sol = lp
        .solve()
        .map_err(|e| Error::Numeric(format!("balance LP: {e}")))?;
    Ok(w.iter().map(|&v| sol.x[v].max(0.0)).collect())
}

/// Smallest critical radius of N labeled points, attained by the N-ring.
pub fn first_critical_radius(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "first critical radius needs N >= 3, got {n}"
        )));
    }
    let s = (PI / n as f64).sin();
    Ok(s / (1.0 - s))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProbeResult {
    pub improving: bool,
    pub best_gain: f64,
}

/// Displaces every point along its own tangent, `U#tV`.
pub fn displace_all(u: &Configuration, v: &[Vec3], t: f64) -> Result<Configuration> {
    let pts = u
        .points()
        .iter()
        .zip(v)
        .map(|(p, d)| displace(p, &TangentVector::new(*p, *d), t))
        .collect::<Result<Vec<UnitVector>>>()?;
    Configuration::new(pts)
}

/// A random variation with a unit tangent vector at every point.
pub fn random_variation(u: &Configuration, rng: &mut ChaCha8Rng) -> Vec<Vec3> {
    u.points()
        .iter()
        .map(|p| loop {
            let g = Vec3::new(
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
            );
            let t = TangentVector::new(*p, g).direction();
            let n = t.norm();
            if n > 1e-9 {
                break t / n;
            }
        })
        .collect()
}

/// Samples random variations and reports the largest first-order gain of ρ.
pub fn improving_direction_probe(
    u: &Configuration,
    samples: usize,
    step: f64,
) -> Result<ProbeResult> {
    improving_direction_probe_seeded(u, samples, step, 0)
}

pub fn improving_direction_probe_seeded(
    u: &Configuration,
    samples: usize,
    step: f64,
    seed: u64,
) -> Result<ProbeResult> {
    let rho = injectivity_radius(u)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_gain = 0.0f64;
    for _ in 0..samples.max(1) {
        let v = random_variation(u, &mut rng);
        let moved = displace_all(u, &v, step)?;
        let gain = (injectivity_radius(&moved)? - rho).max(0.0) / step;
        best_gain = best_gain.max(gain);
    }
    Ok(ProbeResult {
        improving: best_gain > 10.0 * step,
        best_gain,
    })
}

/// `[ρ(U#tV) − 2ρ(U) + ρ(U#(−t)V)] / t²` along a fixed variation.
pub fn directional_second_difference(u: &Configuration, v: &[Vec3], t: f64) -> Result<f64> {
    let rho = injectivity_radius(u)?;
    let plus = injectivity_radius(&displace_all(u, v, t)?)?;
    let minus = injectivity_radius(&displace_all(u, v, -t)?)?;
    Ok((plus - 2.0 * rho + minus) / (t * t))
}
