//! Local maximization of the minimum pairwise angular distance.
//!
//! Three stages, each usable alone: softmin gradient ascent, iterated
//! tangent-space LP polish, and Gauss-Newton refinement on the active set.
//! Optional equality constraints let the same machinery solve the
//! constrained patterns of the move module.

use nalgebra::{DMatrix, DVector};

use crate::geom::Vec3;
use crate::lp::{Cmp, LinearProgram, Sense};

/// Equality constraints on the points.
#[derive(Clone, Debug, PartialEq)]
pub enum Equality {
    /// det(p_a, p_b, p_c) = 0: the three points lie on a great circle.
    Coplanar(usize, usize, usize),
    /// Coordinate `axis` of p_a equals that of p_b.
    EqualCoordinate(usize, usize, usize),
    /// lon(p_a) − lon(p_b) = target, modulo 2π.
    LongitudeGap(usize, usize, f64),
    /// Σ (lon(p_k) − ref_k) = 0 over the listed points, each term modulo 2π.
    MeanLongitude(Vec<(usize, f64)>),
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    let t = std::f64::consts::TAU;
    a - t * ((a + std::f64::consts::PI) / t).floor()
}

fn longitude(p: &Vec3) -> f64 {
    p.y.atan2(p.x)
}

fn longitude_gradient(p: &Vec3) -> Vec3 {
    let r2 = (p.x * p.x + p.y * p.y).max(1e-300);
    Vec3::new(-p.y / r2, p.x / r2, 0.0)
}

impl Equality {
    fn value(&self, p: &[Vec3]) -> f64 {
        match self {
            Equality::Coplanar(a, b, c) => p[*a].dot(&p[*b].cross(&p[*c])),
            Equality::EqualCoordinate(a, b, k) => p[*a][*k] - p[*b][*k],
            Equality::LongitudeGap(a, b, target) => {
                wrap_angle(longitude(&p[*a]) - longitude(&p[*b]) - target)
            }
            Equality::MeanLongitude(refs) => refs
                .iter()
                .map(|(k, r)| wrap_angle(longitude(&p[*k]) - r))
                .sum(),
        }
    }

    /// Ambient gradient entries `(point, gradient)`.
    fn gradient(&self, p: &[Vec3]) -> Vec<(usize, Vec3)> {
        match self {
            Equality::Coplanar(a, b, c) => {
                let (a, b, c) = (*a, *b, *c);
                vec![
                    (a, p[b].cross(&p[c])),
                    (b, p[c].cross(&p[a])),
                    (c, p[a].cross(&p[b])),
                ]
            }
            Equality::EqualCoordinate(a, b, k) => {
                let mut e = Vec3::zeros();
                e[*k] = 1.0;
                vec![(*a, e), (*b, -e)]
            }
            Equality::LongitudeGap(a, b, _) => vec![
                (*a, longitude_gradient(&p[*a])),
                (*b, -longitude_gradient(&p[*b])),
            ],
            Equality::MeanLongitude(refs) => refs
                .iter()
                .map(|(k, _)| (*k, longitude_gradient(&p[*k])))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Constraints {
    pub equalities: Vec<Equality>,
}

impl Constraints {
    pub fn violation(&self, p: &[Vec3]) -> f64 {
        self.equalities
            .iter()
            .map(|e| e.value(p).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PolishOptions {
    pub max_iter: usize,
    /// Pairs within this of the minimum always enter the LP.
    pub near_tol: f64,
    /// Stop once the predicted gain falls below this.
    pub slack_tol: f64,
    pub initial_step: f64,
}

impl Default for PolishOptions {
    fn default() -> Self {
        PolishOptions {
            max_iter: 200,
            near_tol: 1e-6,
            slack_tol: 1e-12,
            initial_step: 0.02,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Polished {
    pub points: Vec<Vec3>,
    pub separation: f64,
    pub iterations: usize,
}

fn angle(a: &Vec3, b: &Vec3) -> f64 {
    a.dot(b).clamp(-1.0, 1.0).acos()
}

pub fn min_separation(p: &[Vec3]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            m = m.min(angle(&p[i], &p[j]));
        }
    }
    m
}

/// Gradient of the angle between `a` and `b` with respect to `a`.
fn angle_gradient(a: &Vec3, b: &Vec3) -> Vec3 {
    let c = a.dot(b).clamp(-1.0, 1.0);
    let s = (1.0 - c * c).sqrt().max(1e-300);
    -(b - a * c) / s
}

fn tangent_basis(u: &Vec3) -> (Vec3, Vec3) {
    let helper = if u.x.abs() < 0.6 {
        Vec3::x()
    } else if u.y.abs() < 0.6 {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let e1 = (helper - u * u.dot(&helper)).normalize();
    (e1, u.cross(&e1))
}

fn step_points(p: &[Vec3], bases: &[(Vec3, Vec3)], d: &[f64]) -> Vec<Vec3> {
    p.iter()
        .zip(bases)
        .enumerate()
        .map(|(i, (u, (e1, e2)))| (u + e1 * d[2 * i] + e2 * d[2 * i + 1]).normalize())
        .collect()
}

/// Softmin value −(1/β) log Σ exp(−β θᵢⱼ) and its tangent gradient.
fn softmin(p: &[Vec3], beta: f64, grad: Option<&mut Vec<Vec3>>) -> f64 {
    let n = p.len();
    let mut thetas = Vec::with_capacity(n * (n - 1) / 2);
    let mut lo = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let t = angle(&p[i], &p[j]);
            lo = lo.min(t);
            thetas.push(t);
        }
    }
    let mut z = 0.0;
    for t in thetas.iter_mut() {
        *t = (-beta * (*t - lo)).exp();
        z += *t;
    }
    if let Some(g) = grad {
        g.clear();
        g.resize(n, Vec3::zeros());
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                let w = thetas[k] / z;
                k += 1;
                if w < 1e-16 {
                    continue;
                }
                g[i] += angle_gradient(&p[i], &p[j]) * w;
                g[j] += angle_gradient(&p[j], &p[i]) * w;
            }
        }
        for (gi, u) in g.iter_mut().zip(p) {
            *gi -= u * u.dot(gi);
        }
    }
    lo - z.ln() / beta
}

/// Projected gradient ascent of the softmin with β = 100, 1000, 10⁴.
///
/// Starting at β = 10 over-smooths: for N = 13 every start then drains into
/// one suboptimal basin.
pub fn softmin_ascent(points: &mut Vec<Vec3>) {
    softmin_ascent_from(points, 100.0);
}

/// Softmin ascent with the β schedule starting at `beta0`, ×10 up to 10⁴.
pub fn softmin_ascent_from(points: &mut Vec<Vec3>, beta0: f64) {
    let mut grad = Vec::new();
    let mut beta: f64 = beta0;
    while beta <= 1e4 * (1.0 + 1e-12) {
        let mut eta = 0.5 / beta.sqrt();
        let mut f = softmin(points, beta, Some(&mut grad));
        for _ in 0..300 {
            let mut improved = false;
            for _ in 0..30 {
                let trial: Vec<Vec3> = points
                    .iter()
                    .zip(&grad)
                    .map(|(u, g)| (u + g * eta).normalize())
                    .collect();
                let ft = softmin(&trial, beta, None);
                if ft > f {
                    let gain = ft - f;
                    *points = trial;
                    f = softmin(points, beta, Some(&mut grad));
                    eta *= 1.5;
                    improved = gain > 1e-15;
                    break;
                }
                eta *= 0.5;
            }
            if !improved {
                break;
            }
        }
        beta *= 10.0;
    }
}

/// Iterated trust-region LP: maximize τ subject to every candidate pair
/// growing to first order by at least τ above the current minimum, with
/// linearized equalities, then accept the step if the true objective
/// improves.
pub fn lp_polish(points: &[Vec3], cons: &Constraints, opts: &PolishOptions) -> Polished {
    let n = points.len();
    let mu = 10.0;
    let merit = |p: &[Vec3]| min_separation(p) - mu * cons.violation(p);
    let mut p = points.to_vec();
    let mut m = merit(&p);
    let mut delta = opts.initial_step;
    let mut iterations = 0;
    while iterations < opts.max_iter && delta > 1e-14 {
        iterations += 1;
        let bases: Vec<(Vec3, Vec3)> = p.iter().map(tangent_basis).collect();
        let theta_min = min_separation(&p);
        let window = opts.near_tol.max(4.0 * delta);

        let mut lp = LinearProgram::new(Sense::Maximize);
        let d: Vec<usize> = (0..2 * n).map(|_| lp.add_var(0.0, -delta, delta)).collect();
        let tau = lp.add_var(1.0, f64::NEG_INFINITY, 1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                let t = angle(&p[i], &p[j]);
                if t > theta_min + window {
                    continue;
                }
                let gi = angle_gradient(&p[i], &p[j]);
                let gj = angle_gradient(&p[j], &p[i]);
                let row = vec![
                    (tau, 1.0),
                    (d[2 * i], -gi.dot(&bases[i].0)),
                    (d[2 * i + 1], -gi.dot(&bases[i].1)),
                    (d[2 * j], -gj.dot(&bases[j].0)),
                    (d[2 * j + 1], -gj.dot(&bases[j].1)),
                ];
                lp.add_row(row, Cmp::Le, t - theta_min);
            }
        }
        for e in &cons.equalities {
            let row: Vec<(usize, f64)> = e
                .gradient(&p)
                .iter()
                .flat_map(|(k, g)| {
                    [
                        (d[2 * k], g.dot(&bases[*k].0)),
                        (d[2 * k + 1], g.dot(&bases[*k].1)),
                    ]
                })
                .collect();
            lp.add_row(row, Cmp::Eq, -e.value(&p));
        }
        let Ok(sol) = lp.solve() else {
            // only the linearized equalities can make the LP infeasible
            if delta >= 0.2 {
                break;
            }
            delta = (delta * 2.0).min(0.2);
            continue;
        };
        let gain = sol.x[tau];
        if gain < opts.slack_tol && cons.violation(&p) < 1e-14 {
            break;
        }
        let step: Vec<f64> = d.iter().map(|&k| sol.x[k]).collect();
        let trial = step_points(&p, &bases, &step);
        let mt = merit(&trial);
        if mt > m {
            let ratio = (mt - m) / gain.max(1e-300);
            p = trial;
            m = mt;
            let at_bound = step.iter().any(|s| s.abs() > 0.99 * delta);
            if ratio > 0.5 && at_bound {
                delta = (delta * 2.0).min(0.2);
            }
        } else {
            delta *= 0.25;
        }
    }
    Polished {
        separation: min_separation(&p),
        points: p,
        iterations,
    }
}

/// Gauss-Newton on {θᵢⱼ = s for pairs within `active_tol` of the minimum,
/// equalities = 0}, minimum-norm steps. Returns `None` unless the result
/// satisfies its equations to 1e-13, keeps every other pair above s, and
/// does not lower the minimum by more than 1e-10.
pub fn refine_active_set(points: &[Vec3], cons: &Constraints, active_tol: f64) -> Option<Polished> {
    let n = points.len();
    let theta0 = min_separation(points);
    let mut active = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if angle(&points[i], &points[j]) <= theta0 + active_tol {
                active.push((i, j));
            }
        }
    }
    let mut p = points.to_vec();
    let mut s = active
        .iter()
        .map(|&(i, j)| angle(&p[i], &p[j]))
        .sum::<f64>()
        / active.len() as f64;
    let rows = active.len() + cons.equalities.len();
    let cols = 2 * n + 1;
    let residual = |p: &[Vec3], s: f64| -> DVector<f64> {
        let mut f = DVector::zeros(rows);
        for (k, &(i, j)) in active.iter().enumerate() {
            f[k] = angle(&p[i], &p[j]) - s;
        }
        for (k, e) in cons.equalities.iter().enumerate() {
            f[active.len() + k] = e.value(p);
        }
        f
    };
    let mut f = residual(&p, s);
    for _ in 0..40 {
        if f.amax() < 1e-15 {
            break;
        }
        let bases: Vec<(Vec3, Vec3)> = p.iter().map(tangent_basis).collect();
        let mut jac = DMatrix::zeros(rows, cols);
        for (k, &(i, j)) in active.iter().enumerate() {
            let gi = angle_gradient(&p[i], &p[j]);
            let gj = angle_gradient(&p[j], &p[i]);
            jac[(k, 2 * i)] = gi.dot(&bases[i].0);
            jac[(k, 2 * i + 1)] = gi.dot(&bases[i].1);
            jac[(k, 2 * j)] = gj.dot(&bases[j].0);
            jac[(k, 2 * j + 1)] = gj.dot(&bases[j].1);
            jac[(k, 2 * n)] = -1.0;
        }
        for (k, e) in cons.equalities.iter().enumerate() {
            for (q, g) in e.gradient(&p) {
                jac[(active.len() + k, 2 * q)] += g.dot(&bases[q].0);
                jac[(active.len() + k, 2 * q + 1)] += g.dot(&bases[q].1);
            }
        }
        let svd = jac.svd(true, true);
        let step = svd.solve(&(-&f), 1e-10).ok()?;
        let d: Vec<f64> = step.iter().take(2 * n).copied().collect();
        let trial = step_points(&p, &bases, &d);
        let st = s + step[2 * n];
        let ft = residual(&trial, st);
        if !ft.iter().all(|v| v.is_finite()) || ft.amax() >= f.amax() {
            break;
        }
        p = trial;
        s = st;
        f = ft;
    }
    let sep = min_separation(&p);
    let finite = p.iter().all(|v| v.iter().all(|c| c.is_finite()));
    let ok = finite && f.amax() < 1e-13 && sep >= s - 1e-13 && sep >= theta0 - 1e-10;
    ok.then_some(Polished {
        points: p,
        separation: sep,
        iterations: 0,
    })
}

/// LP polish followed by active-set refinement at progressively tighter
/// activity thresholds; the first refinement that succeeds is kept.
pub fn maximize(points: &[Vec3], cons: &Constraints, opts: &PolishOptions) -> Polished {
    let polished = lp_polish(points, cons, opts);
    for tol in [1e-6, 1e-7, 1e-8, 1e-9] {
        if let Some(mut r) = refine_active_set(&polished.points, cons, tol) {
            if cons.violation(&r.points) < 1e-13 {
                r.iterations = polished.iterations;
                return r;
            }
        }
    }
    polished
}
