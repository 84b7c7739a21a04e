//! Multi-start maximin solver for N points on the sphere, with residual
//! certification against known minimal polynomials of the optimal radius.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::config::{injectivity_radius, ConfigFile, Configuration};
use crate::criticality::{is_balanced, BalanceCertificate};
use crate::error::{Error, Result};
use crate::geom::{radius_from_angle, Vec3};
use crate::maximin::{self, Constraints, PolishOptions};

/// Optimal angles in degrees as tabulated, for N = 3..14 and 24.
pub const KNOWN_ANGLES_DEG: [(usize, f64); 13] = [
    (3, 120.0),
    (4, 109.4712),
    (5, 90.0),
    (6, 90.0),
    (7, 77.8695),
    (8, 74.8585),
    (9, 70.5288),
    (10, 66.1468),
    (11, 63.4349),
    (12, 63.4349),
    (13, 57.1367),
    (14, 55.6706),
    (24, 43.6908),
];

/// Optimal radii as tabulated (four decimals).
pub const KNOWN_RADII: [(usize, f64); 13] = [
    (3, 6.4641),
    (4, 4.4495),
    (5, 2.4142),
    (6, 2.4142),
    (7, 1.6913),
    (8, 1.5496),
    (9, 1.3660),
    (10, 1.2013),
    (11, 1.1085),
    (12, 1.1085),
    (13, 0.9165),
    (14, 0.8759),
    (24, 0.5926),
];

pub fn known_angle_deg(n: usize) -> Option<f64> {
    KNOWN_ANGLES_DEG
        .iter()
        .find(|(m, _)| *m == n)
        .map(|(_, a)| *a)
}

/// Integer polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegerPolynomial {
    coefficients: Vec<i64>,
}

impl IntegerPolynomial {
    pub fn new(mut coefficients: Vec<i64>) -> Result<Self> {
        while coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            return Err(Error::Domain("zero polynomial".into()));
        }
        Ok(IntegerPolynomial { coefficients })
    }

    /// From coefficients in descending degree, as polynomials are usually written.
    pub fn from_descending(c: &[i64]) -> Result<Self> {
        Self::new(c.iter().rev().copied().collect())
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x + c as f64)
    }
}

/// Minimal polynomials of the optimal radius where known, descending degree.
pub fn minimal_polynomial(n: usize) -> Option<IntegerPolynomial> {
    let c: &[i64] = match n {
        3 => &[1, -6, -3],
        4 => &[1, -4, -2],
        6 => &[1, -2, -1],
        7 => &[1, -6, -3, 8, 12, 6, 1],
        8 => &[1, -8, 4, 8, 2],
        9 => &[2, -2, -1],
        10 => &[4, -30, 17, 24, -4, -6, -1],
        12 => &[1, -6, 1, 4, 1],
        24 => &[1, -10, 23, 20, -5, -6, -1],
        _ => return None,
    };
    IntegerPolynomial::from_descending(c).ok()
}

/// |p(r)|.
pub fn certify_polynomial(p: &IntegerPolynomial, r: f64) -> f64 {
    p.eval(r).abs()
}

#[derive(Clone, Debug)]
pub struct TammesResult {
    pub n: usize,
    pub theta: f64,
    pub radius: f64,
    pub config: Configuration,
    pub restarts_used: usize,
    pub certificate: BalanceCertificate,
}

impl TammesResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

impl Serialize for TammesResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TammesResult", 7)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("theta", &self.theta)?;
        st.serialize_field("theta_deg", &self.theta.to_degrees())?;
        st.serialize_field("radius", &self.radius)?;
        st.serialize_field(
            "config",
            &ConfigFile::from_config(&self.config, Some(self.radius)),
        )?;
        st.serialize_field("restarts_used", &self.restarts_used)?;
        st.serialize_field("certificate", &self.certificate)?;
        st.end()
    }
}

/// Random start for restart `index`, independent of scheduling.
fn random_start(n: usize, seed: u64, index: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..n)
        .map(|_| loop {
            let v = Vec3::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            );
            let norm = v.norm();
            if norm > 1e-12 {
                return v / norm;
            }
        })
        .collect()
}

/// Best local maximum of the minimum separation over `restarts` random starts.
///
/// Each restart (softmin ascent, then polish) runs independently on its own
/// random stream; the reduction keeps the largest separation with the lowest
/// restart index on ties, so the outcome depends only on `(n, restarts, seed)`.
pub fn solve(n: usize, restarts: usize, seed: u64) -> Result<TammesResult> {
    solve_traced(n, restarts, seed).map(|(r, _)| r)
}

/// As [`solve`], also returning the best-so-far separation after each restart.
pub fn solve_traced(n: usize, restarts: usize, seed: u64) -> Result<(TammesResult, Vec<f64>)> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "Tammes solver needs N >= 3, got {n}"
        )));
    }
    if restarts < 1 {
        return Err(Error::Domain("at least one restart is required".into()));
    }
    let cons = Constraints::default();
    let opts = PolishOptions::default();
    let polished: Vec<maximin::Polished> = (0..restarts as u64)
        .into_par_iter()
        .map(|k| {
            let mut p = random_start(n, seed, k);
            maximin::softmin_ascent(&mut p);
            maximin::maximize(&p, &cons, &opts)
        })
        .collect();

    let mut best = 0;
    let mut trace = Vec::with_capacity(restarts);
    for (k, p) in polished.iter().enumerate() {
        if p.separation > polished[best].separation {
            best = k;
        }
        trace.push(polished[best].separation);
    }
    let points = &polished[best].points;
    let config = Configuration::from_vecs(points)?;
    let theta = 2.0 * injectivity_radius(&config)?;
    let certificate = is_balanced(&config, theta)?;
    let result = TammesResult {
        n,
        theta,
        radius: radius_from_angle(theta)?,
        config,
        restarts_used: restarts,
        certificate,
    };
    Ok((result, trace))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RobinsonGap {
    pub r_n: f64,
    pub r_n_minus_1: f64,
    pub strict: bool,
}

/// Compares the best radius found for N and N − 1.
pub fn robinson_gap(n: usize, restarts: usize, seed: u64) -> Result<RobinsonGap> {
    if n < 4 {
        return Err(Error::Domain(format!(
            "gap comparison needs N >= 4, got {n}"
        )));
    }
    let a = solve(n, restarts, seed)?;
    let b = solve(n - 1, restarts, seed)?;
    Ok(RobinsonGap {
        r_n: a.radius,
        r_n_minus_1: b.radius,
        strict: a.radius < b.radius - 1e-6,
    })
}
