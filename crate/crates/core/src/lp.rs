//! Small dense linear programs: two-phase tableau simplex with bounded and
//! free variables. Sized for the balance and polish problems here (a few
//! hundred columns at most).

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex iteration limit reached")]
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

#[derive(Clone, Debug)]
struct Var {
    cost: f64,
    lo: f64,
    hi: f64,
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    sense: Sense,
    vars: Vec<Var>,
    rows: Vec<(Vec<(usize, f64)>, Cmp, f64)>,
}

/// How an original variable maps onto nonnegative columns.
#[derive(Clone, Copy, Debug)]
enum Map {
    /// x = lo + col
    Shift(usize, f64),
    /// x = hi − col
    Mirror(usize, f64),
    /// x = pos − neg
    Free(usize, usize),
}

const EPS: f64 = 1e-11;

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            sense,
            vars: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Adds a variable with objective coefficient `cost` and bounds `[lo, hi]`
    /// (either may be infinite); returns its index.
    pub fn add_var(&mut self, cost: f64, lo: f64, hi: f64) -> usize {
        self.vars.push(Var { cost, lo, hi });
        self.vars.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) {
        self.rows.push((coeffs, cmp, rhs));
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        // columns: structural (nonnegative) first
        let mut maps = Vec::with_capacity(self.vars.len());
        let mut ncol = 0usize;
        let mut extra_rows: Vec<(usize, f64)> = Vec::new(); // col <= width
        for v in &self.vars {
            let m = if v.lo.is_finite() {
                let c = ncol;
                ncol += 1;
                if v.hi.is_finite() {
                    extra_rows.push((c, v.hi - v.lo));
                }
                Map::Shift(c, v.lo)
            } else if v.hi.is_finite() {
                let c = ncol;
                ncol += 1;
                Map::Mirror(c, v.hi)
            } else {
                ncol += 2;
                Map::Free(ncol - 2, ncol - 1)
            };
            maps.push(m);
        }
        let sign = if self.sense == Sense::Maximize {
            1.0
        } else {
            -1.0
        };
        let mut cost = vec![0.0; ncol];
        let mut offset = 0.0;
        for (v, m) in self.vars.iter().zip(&maps) {
            let c = sign * v.cost;
            match *m {
                Map::Shift(k, lo) => {
                    cost[k] += c;
                    offset += c * lo;
                }
                Map::Mirror(k, hi) => {
                    cost[k] -= c;
                    offset += c * hi;
                }
                Map::Free(p, q) => {
                    cost[p] += c;
                    cost[q] -= c;
                }
            }
        }

        // rows over structural columns
        let mut rows: Vec<(Vec<f64>, Cmp, f64)> = Vec::new();
        for (coeffs, cmp, rhs) in &self.rows {
            let mut a = vec![0.0; ncol];
            let mut b = *rhs;
            for &(i, c) in coeffs {
                match maps[i] {
                    Map::Shift(k, lo) => {
                        a[k] += c;
                        b -= c * lo;
                    }
                    Map::Mirror(k, hi) => {
                        a[k] -= c;
                        b -= c * hi;
                    }
                    Map::Free(p, q) => {
                        a[p] += c;
                        a[q] -= c;
                    }
                }
            }
            rows.push((a, *cmp, b));
        }
        for (k, w) in extra_rows {
            let mut a = vec![0.0; ncol];
            a[k] = 1.0;
            rows.push((a, Cmp::Le, w));
        }

        let x = solve_standard(&rows, &cost, ncol)?;
        let mut out = Vec::with_capacity(self.vars.len());
        for m in &maps {
            out.push(match *m {
                Map::Shift(k, lo) => lo + x[k],
                Map::Mirror(k, hi) => hi - x[k],
                Map::Free(p, q) => x[p] - x[q],
            });
        }
        let objective = self.vars.iter().zip(&out).map(|(v, x)| v.cost * x).sum();
        let _ = offset;
        Ok(LpSolution { x: out, objective })
    }
}

/// Maximizes cost·x over x ≥ 0 subject to the rows.
fn solve_standard(
    rows: &[(Vec<f64>, Cmp, f64)],
    cost: &[f64],
    n: usize,
) -> Result<Vec<f64>, LpError> {
    let m = rows.len();
    if m == 0 {
        if cost.iter().any(|&c| c > EPS) {
            return Err(LpError::Unbounded);
        }
        return Ok(vec![0.0; n]);
    }
    // column layout: structural | slack/surplus | artificial
    let n_slack = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
    let mut n_art = 0;
    for (_, cmp, b) in rows {
        let needs = match cmp {
            Cmp::Eq => true,
            Cmp::Le => *b < 0.0,
            Cmp::Ge => *b >= 0.0,
        };
        if needs {
            n_art += 1;
        }
    }
    let width = n + n_slack + n_art;
    let mut t = DMatrix::<f64>::zeros(m, width + 1);
    let mut basis = vec![0usize; m];
    let mut is_art = vec![false; width];
    let (mut s_col, mut a_col) = (n, n + n_slack);
    for (i, (a, cmp, b)) in rows.iter().enumerate() {
        let flip = *b < 0.0;
        let f = if flip { -1.0 } else { 1.0 };
        for j in 0..n {
            t[(i, j)] = f * a[j];
        }
        t[(i, width)] = f * b;
        let slack_sign = match cmp {
            Cmp::Le => Some(1.0),
            Cmp::Ge => Some(-1.0),
            Cmp::Eq => None,
        };
        let mut basic = None;
        if let Some(s) = slack_sign {
            t[(i, s_col)] = f * s;
            if f * s > 0.0 {
                basic = Some(s_col);
            }
            s_col += 1;
        }
        match basic {
            Some(c) => basis[i] = c,
            None => {
                t[(i, a_col)] = 1.0;
                is_art[a_col] = true;
                basis[i] = a_col;
                a_col += 1;
            }
        }
    }
    let original = t.clone();

    // phase 1: maximize −Σ artificials
    if n_art > 0 {
        let c1: Vec<f64> = (0..width)
            .map(|j| if is_art[j] { -1.0 } else { 0.0 })
            .collect();
        let allowed = vec![true; width];
        run_simplex(&mut t, &mut basis, &c1, &allowed)?;
        let infeas: f64 = (0..m)
            .filter(|&i| is_art[basis[i]])
            .map(|i| t[(i, width)])
            .sum();
        let scale = 1.0 + rows.iter().map(|r| r.2.abs()).fold(0.0, f64::max);
        if infeas > 1e-9 * scale {
            return Err(LpError::Infeasible);
        }
        // drive zero-level artificials out of the basis
        for i in 0..m {
            if is_art[basis[i]] {
                if let Some(j) = (0..width).find(|&j| !is_art[j] && t[(i, j)].abs() > 1e-9) {
                    pivot(&mut t, &mut basis, i, j);
                }
            }
        }
    }
    let mut c2 = vec![0.0; width];
    c2[..n].copy_from_slice(cost);
    let allowed: Vec<bool> = (0..width).map(|j| !is_art[j]).collect();
    run_simplex(&mut t, &mut basis, &c2, &allowed)?;

    let mut x = vec![0.0; width];
    for i in 0..m {
        x[basis[i]] = t[(i, width)];
    }
    refine_basic_solution(&original, &basis, &mut x, width);
    Ok(x[..n].iter().map(|&v| v.max(0.0)).collect())
}

/// Recomputes the basic variables from the original rows to shed the
/// rounding accumulated in the tableau.
fn refine_basic_solution(original: &DMatrix<f64>, basis: &[usize], x: &mut [f64], width: usize) {
    let m = basis.len();
    let bmat = DMatrix::from_fn(m, m, |i, k| original[(i, basis[k])]);
    let rhs = DVector::from_fn(m, |i, _| original[(i, width)]);
    if let Some(sol) = bmat.lu().solve(&rhs) {
        if sol.iter().all(|v| v.is_finite() && *v > -1e-9) {
            let drift = (0..m)
                .map(|k| (sol[k] - x[basis[k]]).abs())
                .fold(0.0, f64::max);
            if drift < 1e-6 {
                for k in 0..m {
                    x[basis[k]] = sol[k].max(0.0);
                }
            }
        }
    }
}

fn pivot(t: &mut DMatrix<f64>, basis: &mut [usize], r: usize, c: usize) {
    let p = t[(r, c)];
    let cols = t.ncols();
    for j in 0..cols {
        t[(r, j)] /= p;
    }
    for i in 0..t.nrows() {
        if i == r {
            continue;
        }
        let f = t[(i, c)];
        if f != 0.0 {
            for j in 0..cols {
                let v = t[(r, j)];
                if v != 0.0 {
                    t[(i, j)] -= f * v;
                }
            }
            t[(i, c)] = 0.0;
        }
    }
    basis[r] = c;
}

fn run_simplex(
    t: &mut DMatrix<f64>,
    basis: &mut [usize],
    cost: &[f64],
    allowed: &[bool],
) -> Result<(), LpError> {
    let m = t.nrows();
    let width = t.ncols() - 1;
    let limit = 50 * (m + width) + 1000;
    let mut bland = false;
    let mut degenerate_run = 0;
    for _ in 0..limit {
        // reduced costs
        let mut best: Option<(usize, f64)> = None;
        for j in 0..width {
            if !allowed[j] || basis.contains(&j) {
                continue;
            }
            let mut d = cost[j];
            for i in 0..m {
                d -= cost[basis[i]] * t[(i, j)];
            }
            if d > 1e-10 {
                if bland {
                    best = Some((j, d));
                    break;
                }
                if best.is_none_or(|(_, bd)| d > bd) {
                    best = Some((j, d));
                }
            }
        }
        let Some((j, _)) = best else {
            return Ok(());
        };
        let mut row: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = t[(i, j)];
            if a > EPS {
                let ratio = t[(i, width)].max(0.0) / a;
                let better = match row {
                    None => true,
                    Some((r, br)) => {
                        ratio < br - 1e-14 || (ratio <= br + 1e-14 && basis[i] < basis[r])
                    }
                };
                if better {
                    row = Some((i, ratio));
                }
            }
        }
        let Some((r, ratio)) = row else {
            return Err(LpError::Unbounded);
        };
        if ratio < 1e-14 {
            degenerate_run += 1;
            if degenerate_run > 30 {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }
        pivot(t, basis, r, j);
    }
    Err(LpError::IterationLimit)
}
