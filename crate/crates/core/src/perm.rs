//! Permutations induced by closed deformation paths and the groups they generate.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::config::{candidate_alignments, named, Configuration, NamedConfig};
use crate::error::{Error, Result};
use crate::geom::{angular_distance, rotate, Rotation, Vec3};
use crate::moves::{m5_path, m6_path, modified_m5_path, DeformationPath, M6Variant, Segment};

/// Nearest reference point must be closer than this to accept a match.
pub const MATCH_ACCEPT: f64 = 1e-3;
/// Second-nearest reference point must be farther than this.
pub const MATCH_REJECT: f64 = 0.1;

/// Bijection of `0..n`; `images[k]` is where `k` goes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::Domain(format!(
                    "{images:?} is not a permutation of 0..{n}"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// The cycle (c0 c1 ... ) on n points.
    pub fn cycle(n: usize, cycle: &[usize]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        for (i, &c) in cycle.iter().enumerate() {
            if c >= n {
                return Err(Error::Domain(format!(
                    "cycle entry {c} out of range for n = {n}"
                )));
            }
            images[c] = cycle[(i + 1) % cycle.len()];
        }
        Permutation::new(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, k: usize) -> usize {
        self.images[k]
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Permutation {
            images: self.images.iter().map(|&x| other.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (k, &x) in self.images.iter().enumerate() {
            images[x] = k;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &x)| k == x)
    }

    /// Disjoint cycles of length at least 2, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cyc.push(x);
                x = self.images[x];
            }
            if cyc.len() > 1 {
                out.push(cyc);
            }
        }
        out
    }

    /// Nontrivial cycle lengths in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    pub fn parity(&self) -> Parity {
        let transpositions: usize = self.cycles().iter().map(|c| c.len() - 1).sum();
        if transpositions.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<usize>) -> Result<Self> {
        Permutation::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(usize::to_string).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

pub fn parity(p: &Permutation) -> Parity {
    p.parity()
}

/// Label of the reference point nearest to `u`, if unambiguous.
fn nearest_label(u: &crate::geom::UnitVector, reference: &Configuration) -> Result<usize> {
    let mut best = (usize::MAX, f64::INFINITY);
    let mut second = f64::INFINITY;
    for (l, w) in reference.points().iter().enumerate() {
        let d = angular_distance(u, w);
        if d < best.1 {
            second = best.1;
            best = (l, d);
        } else if d < second {
            second = d;
        }
    }
    if best.1 >= MATCH_ACCEPT || second <= MATCH_REJECT {
        return Err(Error::Matching(format!(
            "nearest reference point at {:.3e} rad, second nearest at {second:.3e} rad",
            best.1
        )));
    }
    Ok(best.0)
}

/// Matches every point of `u`, after rotating by `rot`, to its nearest reference point.
fn match_points(
    u: &Configuration,
    reference: &Configuration,
    rot: &Rotation,
) -> Result<Permutation> {
    let images = u
        .points()
        .iter()
        .map(|p| nearest_label(&rotate(rot, p), reference))
        .collect::<Result<Vec<_>>>()?;
    Permutation::new(images)
        .map_err(|_| Error::Matching("two points matched the same reference point".into()))
}

fn rotation_angle(r: &Rotation) -> f64 {
    ((r.matrix().trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
}

/// Permutation of `reference` labels carried out by the endpoint of `u`:
/// point k of `u` lands on reference point `σ(k)`.
///
/// If `u` already sits on the reference positions no rotation is applied.
/// Otherwise, among the rotations that carry `u` onto the reference, the one
/// with the smallest angle is used.
pub fn permutation_between(u: &Configuration, reference: &Configuration) -> Result<Permutation> {
    if u.n() != reference.n() {
        return Err(Error::Domain(format!(
            "endpoint has {} points, reference has {}",
            u.n(),
            reference.n()
        )));
    }
    if let Ok(p) = match_points(u, reference, &Rotation::identity()) {
        return Ok(p);
    }
    let best = candidate_alignments(u, reference)
        .into_iter()
        .filter(|(_, al)| al.rms <= MATCH_ACCEPT)
        .min_by(|a, b| rotation_angle(&a.1.rotation).total_cmp(&rotation_angle(&b.1.rotation)))
        .ok_or_else(|| {
            Error::Domain("endpoint is not equivalent to the reference modulo rotation".into())
        })?;
    match_points(u, reference, &best.1.rotation)
}

pub fn induced_permutation(
    path: &DeformationPath,
    reference: &Configuration,
) -> Result<Permutation> {
    permutation_between(&path.end()?, reference)
}

/// Follows the balls through `samples` frames per segment by nearest-point
/// matching alone, ignoring the labels the path carries, and returns the
/// permutation read off at the end.
pub fn tracked_permutation(
    path: &DeformationPath,
    reference: &Configuration,
    samples: usize,
) -> Result<Permutation> {
    let m = samples.max(2);
    let start = path.start()?;
    let n = start.n();
    // slot[k]: index in the current frame of the ball that started as k
    let mut slot: Vec<usize> = (0..n).collect();
    let mut prev = start.clone();
    for seg in path.segments() {
        for i in 1..m {
            let t = i as f64 / (m - 1) as f64;
            let cur = seg.at(t)?;
            let step = frame_step(&prev, &cur)?;
            for x in slot.iter_mut() {
                *x = step[*x];
            }
            prev = cur;
        }
    }
    let ends = Configuration::new(slot.iter().map(|&x| prev.point(x)).collect())?;
    permutation_between(&ends, reference)
}

/// For each point of `prev`, the unique point of `cur` within a third of the
/// smallest separation of `prev`.
fn frame_step(prev: &Configuration, cur: &Configuration) -> Result<Vec<usize>> {
    let reach = prev.min_separation() / 3.0;
    let mut out = Vec::with_capacity(prev.n());
    for p in prev.points() {
        let near: Vec<usize> = (0..cur.n())
            .filter(|&l| angular_distance(p, &cur.point(l)) < reach)
            .collect();
        match near.as_slice() {
            [l] => out.push(*l),
            _ => {
                return Err(Error::Matching(format!(
                    "{} candidates within {reach:.3e} rad between consecutive frames",
                    near.len()
                )))
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
struct Level {
    base: usize,
    /// transversal[x] maps the base point to x
    transversal: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
}

/// Permutation group held as a base and strong generating set.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    /// strong generators, each tagged with the first level it belongs to
    strong: Vec<(usize, Permutation)>,
    levels: Vec<Level>,
}

enum Sift {
    Member,
    Residue(usize, Permutation),
}

impl PermGroup {
    /// Deterministic Schreier–Sims: every Schreier generator at every level is
    /// sifted through the levels below; a nontrivial residue becomes a new
    /// strong generator and the check restarts.
    pub fn new(generators: &[Permutation]) -> Result<Self> {
        let degree = generators.first().map_or(0, Permutation::degree);
        if generators.iter().any(|g| g.degree() != degree) {
            return Err(Error::Domain("generators act on different degrees".into()));
        }
        let mut group = PermGroup {
            degree,
            generators: generators.to_vec(),
            strong: Vec::new(),
            levels: Vec::new(),
        };
        for g in generators.iter().filter(|g| !g.is_identity()) {
            group.ensure_moved(g);
            group.strong.push((0, g.clone()));
        }
        group.rebuild();
        while let Some((level, h)) = group.failing_schreier_generator() {
            let level = if level == group.levels.len() {
                group.ensure_moved(&h)
            } else {
                level
            };
            group.strong.push((level, h));
            group.rebuild();
        }
        Ok(group)
    }

    /// Appends base points until `g` moves one of them; returns the level
    /// of the first base point it moves.
    fn ensure_moved(&mut self, g: &Permutation) -> usize {
        if let Some(i) = self.levels.iter().position(|l| g.apply(l.base) != l.base) {
            return i;
        }
        let b = (0..self.degree)
            .find(|&x| g.apply(x) != x)
            .expect("non-identity");
        self.levels.push(Level {
            base: b,
            transversal: Vec::new(),
            orbit: Vec::new(),
        });
        self.levels.len() - 1
    }

    fn gens_at(&self, level: usize) -> impl Iterator<Item = &Permutation> {
        self.strong
            .iter()
            .filter(move |(l, _)| *l >= level)
            .map(|(_, g)| g)
    }

    fn rebuild(&mut self) {
        for i in 0..self.levels.len() {
            let gens: Vec<Permutation> = self.gens_at(i).cloned().collect();
            let level = &mut self.levels[i];
            level.transversal = vec![None; self.degree];
            level.transversal[level.base] = Some(Permutation::identity(self.degree));
            level.orbit = vec![level.base];
            let mut head = 0;
            while head < level.orbit.len() {
                let x = level.orbit[head];
                head += 1;
                for g in &gens {
                    let y = g.apply(x);
                    if level.transversal[y].is_none() {
                        let u = level.transversal[x].as_ref().expect("orbit point").then(g);
                        level.transversal[y] = Some(u);
                        level.orbit.push(y);
                    }
                }
            }
        }
    }

    fn sift_from(&self, start: usize, g: &Permutation) -> Sift {
        let mut h = g.clone();
        for (i, level) in self.levels.iter().enumerate().skip(start) {
            let beta = h.apply(level.base);
            match &level.transversal[beta] {
                Some(u) => h = h.then(&u.inverse()),
                None => return Sift::Residue(i, h),
            }
        }
        if h.is_identity() {
            Sift::Member
        } else {
            Sift::Residue(self.levels.len(), h)
        }
    }

    fn failing_schreier_generator(&self) -> Option<(usize, Permutation)> {
        for (i, level) in self.levels.iter().enumerate() {
            for &x in &level.orbit {
                let ux = level.transversal[x].as_ref().expect("orbit point");
                for s in self.gens_at(i) {
                    let y = s.apply(x);
                    let uy = level.transversal[y].as_ref().expect("orbit is closed");
                    let schreier = ux.then(s).then(&uy.inverse());
                    if let Sift::Residue(j, h) = self.sift_from(i + 1, &schreier) {
                        return Some((j, h));
                    }
                }
            }
        }
        None
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// Product of the fundamental orbit lengths.
    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .map(|l| BigUint::from(l.orbit.len()))
            .product()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && matches!(self.sift_from(0, g), Sift::Member)
    }

    pub fn is_even(&self) -> bool {
        self.generators.iter().all(Permutation::is_even)
    }
}

pub fn generated_group_order(gens: &[Permutation]) -> Result<BigUint> {
    Ok(PermGroup::new(gens)?.order())
}

/// The twelve five-ball moves, one per pole, at radius `r`, with their permutations.
pub fn m5_permutations(r: f64) -> Result<Vec<Permutation>> {
    let dod = named(&NamedConfig::Dod)?;
    (0..12)
        .map(|p| induced_permutation(&m5_path(p, 1, r)?, &dod))
        .collect()
}

pub fn modified_m5_permutations(r: f64) -> Result<Vec<Permutation>> {
    let dod = named(&NamedConfig::Dod)?;
    (0..12)
        .map(|p| induced_permutation(&modified_m5_path(p, 1, r)?, &dod))
        .collect()
}

/// Axis through the centre of a square face of the cuboctahedral
/// configuration `u` at contact angle π/3.
fn four_fold_axis(u: &Configuration) -> Result<Vec3> {
    let n = u.n();
    let near = |i: usize, j: usize, angle: f64| {
        (angular_distance(&u.point(i), &u.point(j)) - angle).abs() < 1e-6
    };
    for a in 0..n {
        for c in a + 1..n {
            if !near(a, c, FRAC_PI_2) {
                continue;
            }
            let common: Vec<usize> = (0..n)
                .filter(|&k| {
                    near(a, k, std::f64::consts::FRAC_PI_3)
                        && near(c, k, std::f64::consts::FRAC_PI_3)
                })
                .collect();
            if let [b, d] = common[..] {
                let s = u.point(a).vec() + u.point(b).vec() + u.point(c).vec() + u.point(d).vec();
                return Ok(s.normalize());
            }
        }
    }
    Err(Error::Domain("no square face found".into()))
}

/// Closed path: six-ball move to FCC, a quarter turn about a four-fold axis,
/// and the six-ball move backwards.
pub fn quarter_turn_path(r: f64) -> Result<DeformationPath> {
    let there = m6_path(M6Variant::Fcc, r, 0.0)?;
    let fcc = there.end()?;
    let axis = four_fold_axis(&fcc)?;
    let mut turned = there.clone();
    turned.push(Segment::rigid_rotation(&fcc, axis, FRAC_PI_2))?;
    turned.then_matched(&there.reversed()?)
}

pub fn quarter_turn_permutation(r: f64) -> Result<Permutation> {
    induced_permutation(&quarter_turn_path(r)?, &named(&NamedConfig::Dod)?)
}

/// Parity census of the moves available at one radius.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentEvidence {
    pub radius: f64,
    pub generators: Vec<Permutation>,
    #[serde(serialize_with = "as_decimal")]
    pub group_order: BigUint,
    pub all_even: bool,
    pub odd_available: bool,
    pub compositions: usize,
    pub compositions_even: usize,
    pub cycle_types: BTreeMap<String, usize>,
}

fn as_decimal<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub const RANDOM_COMPOSITIONS: usize = 50;

/// For r ≤ 1 the five-ball moves and the quarter-turn composite are used; for
/// r > 1 the modified five-ball moves, which exist up to the certified radius.
/// Random words in the moves are composed and their parities counted.
pub fn component_lower_bound_check(r: f64, seed: u64) -> Result<ComponentEvidence> {
    let mut generators = if r <= 1.0 {
        let mut g = m5_permutations(r)?;
        g.push(quarter_turn_permutation(r)?);
        g
    } else {
        modified_m5_permutations(r)?
    };
    generators.dedup();
    let group = PermGroup::new(&generators)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut compositions_even = 0;
    let mut cycle_types = BTreeMap::new();
    for _ in 0..RANDOM_COMPOSITIONS {
        let len = rng.gen_range(2..=10);
        let mut w = Permutation::identity(generators[0].degree());
        let mut expected = Parity::Even;
        for _ in 0..len {
            let g = &generators[rng.gen_range(0..generators.len())];
            let g = if rng.gen_bool(0.5) {
                g.inverse()
            } else {
                g.clone()
            };
            if !g.is_even() {
                expected = expected.flip();
            }
            w = w.then(&g);
        }
        debug_assert_eq!(w.parity(), expected);
        if w.is_even() {
            compositions_even += 1;
        }
        *cycle_types
            .entry(format!("{:?}", w.cycle_type()))
            .or_insert(0) += 1;
    }
    Ok(ComponentEvidence {
        radius: r,
        all_even: group.is_even(),
        odd_available: !group.is_even(),
        group_order: group.order(),
        generators,
        compositions: RANDOM_COMPOSITIONS,
        compositions_even,
        cycle_types,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use proptest::prelude::*;
    use rand::Rng;

    use super::*;

    fn closure_order(gens: &[Permutation], n: usize) -> usize {
        let mut seen: HashSet<Permutation> = HashSet::new();
        let mut stack = vec![Permutation::identity(n)];
        seen.insert(Permutation::identity(n));
        while let Some(p) = stack.pop() {
            for g in gens {
                let q = p.then(g);
                if seen.insert(q.clone()) {
                    stack.push(q);
                }
            }
        }
        seen.len()
    }

    fn factorial(n: u64) -> BigUint {
        (1..=n).map(BigUint::from).product()
    }

    #[test]
    fn composition_convention() {
        let a = Permutation::cycle(3, &[0, 1]).unwrap();
        let b = Permutation::cycle(3, &[1, 2]).unwrap();
        // 0 -a-> 1 -b-> 2
        assert_eq!(a.then(&b).apply(0), 2);
        assert!(a.then(&a.inverse()).is_identity());
    }

    #[test]
    fn parities() {
        assert_eq!(Permutation::identity(12).parity(), Parity::Even);
        assert_eq!(
            Permutation::cycle(12, &[0, 1, 2, 3, 4]).unwrap().parity(),
            Parity::Even
        );
        let three_fours = Permutation::cycle(12, &[0, 1, 2, 3])
            .unwrap()
            .then(&Permutation::cycle(12, &[4, 5, 6, 7]).unwrap())
            .then(&Permutation::cycle(12, &[8, 9, 10, 11]).unwrap());
        assert_eq!(three_fours.cycle_type(), vec![4, 4, 4]);
        assert_eq!(three_fours.parity(), Parity::Odd);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(serde_json::from_str::<Permutation>("[1,1]").is_err());
        let p: Permutation = serde_json::from_str("[1,2,0]").unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1,2,0]");
    }

    #[test]
    fn small_group_orders() {
        let c5 = Permutation::cycle(12, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(generated_group_order(&[c5]).unwrap(), BigUint::from(5u32));
        let s = [
            Permutation::cycle(8, &[0, 1]).unwrap(),
            Permutation::cycle(8, &[0, 1, 2, 3, 4, 5, 6, 7]).unwrap(),
        ];
        assert_eq!(generated_group_order(&s).unwrap(), factorial(8));
        assert_eq!(
            generated_group_order(&[Permutation::identity(4)]).unwrap(),
            BigUint::from(1u32)
        );
    }

    #[test]
    fn membership() {
        let gens = [
            Permutation::cycle(6, &[0, 1, 2]).unwrap(),
            Permutation::cycle(6, &[2, 3, 4]).unwrap(),
        ];
        let g = PermGroup::new(&gens).unwrap();
        assert_eq!(g.order(), BigUint::from(60u32));
        assert!(g.contains(&Permutation::cycle(6, &[0, 4, 1]).unwrap()));
        assert!(!g.contains(&Permutation::cycle(6, &[0, 1]).unwrap()));
        assert!(!g.contains(&Permutation::cycle(6, &[0, 5, 1]).unwrap()));
    }

    fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn order_matches_closure(gens in (2usize..=7).prop_flat_map(|n| prop::collection::vec(perm_strategy(n), 1..=3))) {
            let brute = closure_order(&gens, gens[0].degree());
            prop_assert!(brute <= 10_000);
            prop_assert_eq!(generated_group_order(&gens).unwrap(), BigUint::from(brute));
        }

        #[test]
        fn inverse_and_associativity(a in perm_strategy(9), b in perm_strategy(9), c in perm_strategy(9)) {
            prop_assert_eq!(a.then(&b).then(&c), a.then(&b.then(&c)));
            prop_assert!(a.then(&a.inverse()).is_identity());
            let pa = a.is_even() == b.is_even();
            prop_assert_eq!(a.then(&b).is_even(), pa);
        }
    }

    #[test]
    fn five_ball_moves_are_five_cycles() {
        for p in m5_permutations(1.0).unwrap() {
            assert_eq!(p.cycle_type(), vec![5]);
        }
    }

    #[test]
    fn five_ball_moves_generate_the_alternating_group() {
        let gens = m5_permutations(1.0).unwrap();
        assert_eq!(
            generated_group_order(&gens).unwrap(),
            factorial(12) / BigUint::from(2u32)
        );
    }

    #[test]
    fn quarter_turn_is_odd() {
        let s = quarter_turn_permutation(1.0).unwrap();
        assert_eq!(s.cycle_type(), vec![4, 4, 4]);
        assert_eq!(s.parity(), Parity::Odd);
        let mut gens = m5_permutations(1.0).unwrap();
        gens.push(s);
        assert_eq!(generated_group_order(&gens).unwrap(), factorial(12));
    }

    #[test]
    fn identity_path() {
        let dod = named(&NamedConfig::Dod).unwrap();
        let mut path = DeformationPath::new(1.0);
        path.push(Segment::rigid_rotation(&dod, Vec3::z(), 0.0))
            .unwrap();
        assert!(induced_permutation(&path, &dod).unwrap().is_identity());
    }

    #[test]
    fn rotated_endpoint() {
        // a symmetry rotation of the icosahedron: smallest-angle alignment is the identity
        let dod = named(&NamedConfig::Dod).unwrap();
        let tilt = Rotation::about_axis(Vec3::new(0.3, -0.2, 1.0), 0.05);
        let p = permutation_between(&dod.rotate_all(&tilt), &dod).unwrap();
        assert!(p.is_identity());
        let fcc = named(&NamedConfig::Fcc).unwrap();
        assert!(matches!(
            permutation_between(&fcc, &dod),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn functorial_on_five_ball_words() {
        let dod = named(&NamedConfig::Dod).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..6 {
            let mut path = m5_path(rng.gen_range(0..12), 1, 1.0).unwrap();
            let mut expected = induced_permutation(&path, &dod).unwrap();
            for _ in 0..3 {
                let dir = if rng.gen_bool(0.5) { 1 } else { -1 };
                let next = m5_path(rng.gen_range(0..12), dir, 1.0).unwrap();
                expected = expected.then(&induced_permutation(&next, &dod).unwrap());
                path = path.then_matched(&next).unwrap();
            }
            assert_eq!(induced_permutation(&path, &dod).unwrap(), expected);
        }
    }

    #[test]
    fn functorial_with_the_quarter_turn() {
        let dod = named(&NamedConfig::Dod).unwrap();
        let q = quarter_turn_path(1.0).unwrap();
        let m = m5_path(4, 1, 1.0).unwrap();
        let both = q.then_matched(&m).unwrap();
        let expected = induced_permutation(&q, &dod)
            .unwrap()
            .then(&induced_permutation(&m, &dod).unwrap());
        assert_eq!(induced_permutation(&both, &dod).unwrap(), expected);
    }

    #[test]
    fn tracking_agrees_with_labels() {
        let dod = named(&NamedConfig::Dod).unwrap();
        let path = m5_path(0, 1, 1.0)
            .unwrap()
            .then_matched(&m5_path(7, -1, 1.0).unwrap())
            .unwrap();
        let carried = induced_permutation(&path, &dod).unwrap();
        for samples in [16, 64, 257] {
            let tracked = tracked_permutation(&path, &dod, samples).unwrap();
            assert_eq!(tracked, carried);
            assert_eq!(tracked.parity(), carried.parity());
        }
    }

    #[test]
    fn evidence_at_unit_radius() {
        let ev = component_lower_bound_check(1.0, 0).unwrap();
        assert!(ev.odd_available);
        assert!(!ev.all_even);
        assert_eq!(ev.group_order, factorial(12));
    }

    #[test]
    fn evidence_above_unit_radius() {
        for r in [1.0 + 1e-4, 1.0005] {
            let ev = component_lower_bound_check(r, 0).unwrap();
            assert!(ev.all_even, "r = {r}");
            assert!(!ev.odd_available);
            assert_eq!(ev.compositions_even, RANDOM_COMPOSITIONS);
            assert_eq!(ev.group_order, factorial(12) / BigUint::from(2u32));
        }
    }
}
