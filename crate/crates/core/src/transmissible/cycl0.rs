//! Planar realizability of an `m`-cycle: adjacent points no farther apart
//! than in the space, non-adjacent points no closer.
//!
//! The problem is nonconvex. The solver maximizes the smallest constraint
//! slack from a classical-scaling start and seeded random restarts, so an
//! `Infeasible` answer is a heuristic certificate only.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::FinMetric;
use crate::scalar::Scalar;

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct Cycl0Options {
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Gradient steps per restart.
    pub iterations: usize,
}

impl Default for Cycl0Options {
    fn default() -> Self {
        Cycl0Options { tol: 1e-6, restarts: 16, seed: 0, iterations: 1500 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cycl0Outcome {
    Feasible { g: Vec<Point>, min_slack: f64 },
    Infeasible { best_min_slack: f64, best_g: Vec<Point> },
}

impl Cycl0Outcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Cycl0Outcome::Feasible { .. })
    }

    pub fn min_slack(&self) -> f64 {
        match self {
            Cycl0Outcome::Feasible { min_slack, .. } => *min_slack,
            Cycl0Outcome::Infeasible { best_min_slack, .. } => *best_min_slack,
        }
    }

    pub fn points(&self) -> &[Point] {
        match self {
            Cycl0Outcome::Feasible { g, .. } => g,
            Cycl0Outcome::Infeasible { best_g, .. } => best_g,
        }
    }
}

/// Checks the cycle `tuple` (labels of `d`, in cyclic order).
pub fn cycl0_check<T: Scalar, S: AsRef<str>>(
    d: &FinMetric<T>,
    tuple: &[S],
    opts: &Cycl0Options,
) -> Result<Cycl0Outcome> {
    let idx = d.indices_of(tuple)?;
    cycl0_check_idx(d, &idx, opts)
}

pub fn cycl0_check_idx<T: Scalar>(d: &FinMetric<T>, idx: &[usize], opts: &Cycl0Options) -> Result<Cycl0Outcome> {
    let m = idx.len();
    if m < 3 {
        return Err(Error::ArityTooSmall(m));
    }
    for (k, i) in idx.iter().enumerate() {
        if idx[..k].contains(i) {
            return Err(Error::TupleNotInjective);
        }
    }
    let x: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| idx.iter().map(|&j| d.d(i, j).lossy_f64()).collect())
        .collect();
    Ok(solve(&x, opts))
}

fn adjacent(i: usize, j: usize, m: usize) -> bool {
    (i + 1) % m == j || (j + 1) % m == i
}

/// Smallest slack of `g` against the distances `x`.
pub fn min_slack(x: &[Vec<f64>], g: &[Point]) -> f64 {
    let m = x.len();
    let mut worst = f64::INFINITY;
    for i in 0..m {
        for j in i + 1..m {
            let s = if adjacent(i, j, m) { x[i][j] - norm(g[i], g[j]) } else { norm(g[i], g[j]) - x[i][j] };
            worst = worst.min(s);
        }
    }
    worst
}

fn norm(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Runs every restart and keeps the best, the earliest on ties.
pub fn solve(x: &[Vec<f64>], opts: &Cycl0Options) -> Cycl0Outcome {
    let m = x.len();
    let scale = {
        let (sum, count) = (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .fold((0.0, 0usize), |(s, c), (i, j)| (s + x[i][j], c + 1));
        if count == 0 || sum <= 0.0 {
            1.0
        } else {
            sum / count as f64
        }
    };
    let unit: Vec<Vec<f64>> = x.iter().map(|r| r.iter().map(|v| v / scale).collect()).collect();
    let base = classical_scaling(&unit);
    let runs: Vec<(f64, Vec<Point>)> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 { base.clone() } else { perturbed(&base, opts.seed, r as u64) };
            optimize(&unit, start, opts.iterations)
        })
        .collect();
    let (_, best_g) = runs
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one restart");
    let g: Vec<Point> = best_g.iter().map(|p| [p[0] * scale, p[1] * scale]).collect();
    let slack = min_slack(x, &g);
    if slack >= -opts.tol {
        Cycl0Outcome::Feasible { g, min_slack: slack }
    } else {
        Cycl0Outcome::Infeasible { best_min_slack: slack, best_g: g }
    }
}

/// Top-two classical multidimensional scaling of a distance matrix.
fn classical_scaling(x: &[Vec<f64>]) -> Vec<Point> {
    let m = x.len();
    let sq = DMatrix::from_fn(m, m, |i, j| x[i][j] * x[i][j]);
    let center = DMatrix::<f64>::identity(m, m) - DMatrix::from_element(m, m, 1.0 / m as f64);
    let b = -0.5 * &center * sq * &center;
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &c| eig.eigenvalues[c].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&c)));
    let axis = |k: usize, i: usize| {
        order
            .get(k)
            .map_or(0.0, |&col| eig.eigenvectors[(i, col)] * eig.eigenvalues[col].max(0.0).sqrt())
    };
    (0..m).map(|i| [axis(0, i), axis(1, i)]).collect()
}

fn perturbed(base: &[Point], seed: u64, stream: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    base.iter()
        .map(|p| {
            let dx: f64 = StandardNormal.sample(&mut rng);
            let dy: f64 = StandardNormal.sample(&mut rng);
            [p[0] + 0.5 * dx, p[1] + 0.5 * dy]
        })
        .collect()
}

/// Slack `s` of the pair `(i, j)` and its gradient with respect to `g_i`
/// (the gradient with respect to `g_j` is the negative).
fn slack_and_grad(x: &[Vec<f64>], g: &[Point], i: usize, j: usize) -> (f64, Point) {
    let m = x.len();
    let diff = [g[i][0] - g[j][0], g[i][1] - g[j][1]];
    let len = diff[0].hypot(diff[1]);
    let dir = if len > 1e-12 {
        [diff[0] / len, diff[1] / len]
    } else {
        let angle = (i * m + j) as f64;
        [angle.cos(), angle.sin()]
    };
    if adjacent(i, j, m) {
        (x[i][j] - len, [-dir[0], -dir[1]])
    } else {
        (len - x[i][j], dir)
    }
}

fn pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect()
}

/// Squared-violation penalty and its gradient.
fn penalty(x: &[Vec<f64>], g: &[Point], pairs: &[(usize, usize)]) -> (f64, Vec<Point>) {
    let mut value = 0.0;
    let mut grad = vec![[0.0; 2]; g.len()];
    for &(i, j) in pairs {
        let (s, ds) = slack_and_grad(x, g, i, j);
        if s < 0.0 {
            value += s * s;
            for k in 0..2 {
                grad[i][k] += 2.0 * s * ds[k];
                grad[j][k] -= 2.0 * s * ds[k];
            }
        }
    }
    (value, grad)
}

/// Negated soft minimum of the slacks at sharpness `beta`, and its gradient.
fn soft_min(x: &[Vec<f64>], g: &[Point], pairs: &[(usize, usize)], beta: f64) -> (f64, Vec<Point>) {
    let terms: Vec<(f64, Point)> = pairs.iter().map(|&(i, j)| slack_and_grad(x, g, i, j)).collect();
    let low = terms.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = terms.iter().map(|t| (-beta * (t.0 - low)).exp()).collect();
    let total: f64 = weights.iter().sum();
    let value = low - total.ln() / beta;
    let mut grad = vec![[0.0; 2]; g.len()];
    for ((&(i, j), (_, ds)), w) in pairs.iter().zip(&terms).zip(&weights) {
        let w = w / total;
        for k in 0..2 {
            grad[i][k] -= w * ds[k];
            grad[j][k] += w * ds[k];
        }
    }
    (-value, grad)
}

/// Backtracking gradient descent on `f`; returns the final point.
fn descend(
    mut g: Vec<Point>,
    steps: usize,
    f: impl Fn(&[Point]) -> (f64, Vec<Point>),
    mut on_point: impl FnMut(&[Point]),
) -> Vec<Point> {
    let mut step = 0.1;
    let (mut value, mut grad) = f(&g);
    for _ in 0..steps {
        let gnorm2: f64 = grad.iter().map(|p| p[0] * p[0] + p[1] * p[1]).sum();
        if gnorm2 < 1e-30 {
            break;
        }
        let mut accepted = false;
        while step > 1e-14 {
            let cand: Vec<Point> = g
                .iter()
                .zip(&grad)
                .map(|(p, d)| [p[0] - step * d[0], p[1] - step * d[1]])
                .collect();
            let (cv, cg) = f(&cand);
            if cv <= value - 1e-4 * step * gnorm2 {
                g = cand;
                value = cv;
                grad = cg;
                accepted = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        on_point(&g);
        if !accepted {
            break;
        }
    }
    g
}

/// Penalty descent to reach feasibility, then soft-min ascent on the
/// smallest slack with increasing sharpness. Returns the best point seen.
fn optimize(x: &[Vec<f64>], start: Vec<Point>, iterations: usize) -> (f64, Vec<Point>) {
    let pairs = pairs(x.len());
    let mut best = (min_slack(x, &start), start.clone());
    let mut track = |g: &[Point]| {
        let s = min_slack(x, g);
        if s > best.0 {
            best = (s, g.to_vec());
        }
    };
    let phase = iterations.max(8) / 8;
    let g = descend(start, phase, |g| penalty(x, g, &pairs), &mut track);
    let mut g = g;
    for beta in [4.0, 16.0, 64.0, 256.0, 1024.0, 4096.0, 16384.0] {
        g = descend(g, phase, |g| soft_min(x, g, &pairs, beta), &mut track);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational as Q;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("p{i}")).collect()
    }

    #[test]
    fn triangles_are_feasible() {
        let d = FinMetric::from_fn(names(3), |i, j| rat((i + j) as i64 + 2, 1)).unwrap();
        let out = cycl0_check(&d, &names(3), &Cycl0Options::default()).unwrap();
        assert!(out.is_feasible());
    }

    #[test]
    fn own_planar_metric_is_feasible() {
        let pts = [[0.0, 0.0], [2.0, 0.0], [3.0, 1.5], [1.0, 2.5], [-0.5, 1.0]];
        let d = FinMetric::from_fn(names(5), |i, j| norm(pts[i], pts[j])).unwrap();
        let out = cycl0_check(&d, &names(5), &Cycl0Options::default()).unwrap();
        assert!(out.is_feasible());
        assert!(out.min_slack() >= -1e-9);
    }

    #[test]
    fn c4_square_is_optimal() {
        let d: FinMetric<Q> =
            FinMetric::from_fn(names(4), |i, j| if (j - i) % 2 == 1 { rat(1, 1) } else { rat(2, 1) }).unwrap();
        let out = cycl0_check(&d, &names(4), &Cycl0Options::default()).unwrap();
        assert!(!out.is_feasible());
        // a square of side 3(√2 − 1) balances both constraint kinds
        let expected = 4.0 - 3.0 * 2f64.sqrt();
        assert!((out.min_slack() - expected).abs() < 1e-4, "{}", out.min_slack());
    }

    #[test]
    fn rejects_bad_tuples() {
        let d = FinMetric::equilateral(names(3), rat(1, 1)).unwrap();
        let o = Cycl0Options::default();
        assert_eq!(cycl0_check(&d, &["p0", "p1"], &o), Err(Error::ArityTooSmall(2)));
        assert_eq!(cycl0_check(&d, &["p0", "p1", "p0"], &o), Err(Error::TupleNotInjective));
    }

    #[test]
    fn deterministic() {
        let d = FinMetric::from_fn(names(5), |i, j| 1.0 + ((i * 7 + j * 3) % 5) as f64 / 10.0).unwrap();
        let o = Cycl0Options { restarts: 6, ..Default::default() };
        assert_eq!(cycl0_check(&d, &names(5), &o).unwrap(), cycl0_check(&d, &names(5), &o).unwrap());
    }
}
