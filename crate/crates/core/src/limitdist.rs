//! Empirical load distributions of sparse random graphs `G(n, λ/n)` and
//! fixed-point anchors for the giant component and its 2-core.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ordered_float::OrderedFloat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use thiserror::Error;

use crate::balance::balanced_loads;
use crate::graph::{pair_from_index, Graph};
use crate::oracles::densest_density;
use crate::rational::{format_rational, simplest_in_interval, to_f64, Rational};

/// Graphs with at most this many vertices use the exact solver by default.
pub const EXACT_CROSSOVER: usize = 20_000;
pub const REBALANCE_TOL: f64 = 1e-6;
const REBALANCE_MAX_SWEEPS: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LimitError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("rebalancing did not converge after {sweeps} sweeps (residual {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },
    #[error("ECDFs with different λ or n cannot be merged")]
    MergeMismatch,
    #[error("densest-subgraph oracle failed: {0}")]
    Oracle(String),
}

/// A load value: exact when known, otherwise a float.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LoadValue {
    Exact(Rational),
    Approx(OrderedFloat<f64>),
}

impl LoadValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            LoadValue::Exact(r) => to_f64(r),
            LoadValue::Approx(x) => x.0,
        }
    }

    pub fn exact(&self) -> Option<Rational> {
        match self {
            LoadValue::Exact(r) => Some(*r),
            LoadValue::Approx(_) => None,
        }
    }
}

/// Aggregated load samples. Keys are ordered by numeric value, with exact
/// values first on exact ties.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadEcdf {
    pub lambda: f64,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    counts: BTreeMap<(OrderedFloat<f64>, LoadValue), u64>,
    total: u64,
}

impl LoadEcdf {
    pub fn new(lambda: f64, n: usize, seed: u64) -> Self {
        LoadEcdf {
            lambda,
            n,
            trials: 0,
            seed,
            counts: BTreeMap::new(),
            total: 0,
        }
    }

    pub fn add_trial(&mut self, loads: &[LoadValue]) {
        for v in loads {
            *self.counts.entry((OrderedFloat(v.to_f64()), *v)).or_default() += 1;
        }
        self.total += loads.len() as u64;
        self.trials += 1;
    }

    /// Associative and commutative merge; keeps the smaller seed.
    pub fn merge(&mut self, other: &LoadEcdf) -> Result<(), LimitError> {
        if self.lambda != other.lambda || self.n != other.n {
            return Err(LimitError::MergeMismatch);
        }
        for (k, c) in &other.counts {
            *self.counts.entry(*k).or_default() += c;
        }
        self.total += other.total;
        self.trials += other.trials;
        self.seed = self.seed.min(other.seed);
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// `(value, mass)` in increasing order.
    pub fn atoms(&self) -> impl Iterator<Item = (LoadValue, f64)> + '_ {
        let t = self.total as f64;
        self.counts.iter().map(move |((_, v), &c)| (*v, c as f64 / t))
    }

    fn mass_where(&self, pred: impl Fn(&LoadValue) -> bool) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let c: u64 = self.counts.iter().filter(|((_, v), _)| pred(v)).map(|(_, c)| c).sum();
        c as f64 / self.total as f64
    }

    /// Mass strictly below `r`, compared exactly where possible.
    pub fn mass_below(&self, r: Rational) -> f64 {
        self.mass_where(|v| cmp_value(v, r).is_lt())
    }

    pub fn mass_above(&self, r: Rational) -> f64 {
        self.mass_where(|v| cmp_value(v, r).is_gt())
    }

    pub fn mass_at(&self, r: Rational) -> f64 {
        self.mass_where(|v| cmp_value(v, r).is_eq())
    }

    /// CSV with header `load,cumulative_mass,rational`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("load,cumulative_mass,rational\n");
        let mut cum = 0u64;
        for ((x, v), c) in &self.counts {
            cum += c;
            let r = v.exact().map(|r| format_rational(&r)).unwrap_or_default();
            let _ = writeln!(out, "{:.12},{:.12},{}", x.0, cum as f64 / self.total as f64, r);
        }
        out
    }
}

fn cmp_value(v: &LoadValue, r: Rational) -> std::cmp::Ordering {
    match v {
        LoadValue::Exact(x) => x.cmp(&r),
        LoadValue::Approx(x) => x.0.total_cmp(&to_f64(&r)),
    }
}

/// `μ_λ((x, ∞))` estimated by the ECDF.
pub fn f_lambda(ecdf: &LoadEcdf, x: f64) -> f64 {
    if ecdf.total == 0 {
        return 0.0;
    }
    let c: u64 = ecdf
        .counts
        .range((OrderedFloat(x), LoadValue::Approx(OrderedFloat(f64::INFINITY)))..)
        .filter(|((y, _), _)| y.0 > x)
        .map(|(_, c)| c)
        .sum();
    c as f64 / ecdf.total as f64
}

/// `G(n, q)` by skipping geometrically over the colex pair order.
pub fn sample_gnp<R: Rng + ?Sized>(n: usize, q: f64, rng: &mut R) -> Graph {
    let pairs = n * n.saturating_sub(1) / 2;
    let mut edges = Vec::new();
    if q >= 1.0 {
        edges.extend((0..pairs).map(pair_from_index));
    } else if q > 0.0 {
        let geo = Geometric::new(q).expect("0 < q < 1");
        let mut idx: u64 = 0;
        loop {
            idx = idx.saturating_add(geo.sample(rng));
            if idx >= pairs as u64 {
                break;
            }
            edges.push(pair_from_index(idx as usize));
            idx += 1;
        }
    }
    Graph::from_edges(n, edges).expect("pairs in range")
}

/// Random graph for one trial, on its own stream of the root seed.
pub fn trial_graph(n: usize, lambda: f64, seed: u64, trial: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    sample_gnp(n, if n == 0 { 0.0 } else { lambda / n as f64 }, &mut rng)
}

/// Loads by cyclic per-edge rebalancing until no edge moves more than
/// `tol`, then snapped to the simplest rational with denominator at most
/// `n` within `tol` where one exists.
pub fn approximate_loads(g: &Graph, tol: f64) -> Result<Vec<LoadValue>, LimitError> {
    let n = g.n();
    let edges = g.edges();
    let mut to_hi = vec![0.5f64; edges.len()];
    let mut load = vec![0.0f64; n];
    for &(a, b) in edges {
        load[a] += 0.5;
        load[b] += 0.5;
    }
    let mut sweeps = 0;
    loop {
        let mut moved = 0.0f64;
        for (e, &(a, b)) in edges.iter().enumerate() {
            let x = to_hi[e];
            let la = load[a] - (1.0 - x);
            let lb = load[b] - x;
            let nx = ((la - lb + 1.0) / 2.0).clamp(0.0, 1.0);
            if nx != x {
                moved = moved.max((nx - x).abs());
                to_hi[e] = nx;
                load[a] = la + 1.0 - nx;
                load[b] = lb + nx;
            }
        }
        sweeps += 1;
        if moved < tol * 1e-2 {
            break;
        }
        if sweeps >= REBALANCE_MAX_SWEEPS {
            return Err(LimitError::NonConvergence { sweeps, residual: moved });
        }
    }
    Ok(load
        .iter()
        .map(|&x| match simplest_in_interval(x - tol, x + tol, n.max(1) as i64) {
            Some(r) => LoadValue::Exact(r),
            None => LoadValue::Approx(OrderedFloat(x)),
        })
        .collect())
}

pub fn exact_load_values(g: &Graph) -> Vec<LoadValue> {
    balanced_loads(g).loads.into_iter().map(LoadValue::Exact).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EcdfOptions {
    pub crossover: usize,
    pub tol: f64,
}

impl Default for EcdfOptions {
    fn default() -> Self {
        EcdfOptions {
            crossover: EXACT_CROSSOVER,
            tol: REBALANCE_TOL,
        }
    }
}

pub fn empirical_load_distribution(n: usize, lambda: f64, trials: usize, seed: u64) -> Result<LoadEcdf, LimitError> {
    empirical_load_distribution_with(n, lambda, trials, seed, EcdfOptions::default())
}

pub fn empirical_load_distribution_with(
    n: usize,
    lambda: f64,
    trials: usize,
    seed: u64,
    opts: EcdfOptions,
) -> Result<LoadEcdf, LimitError> {
    Ok(empirical_with_maxima(n, lambda, trials, seed, opts)?.0)
}

/// The ECDF together with each trial's maximal load.
pub fn empirical_with_maxima(
    n: usize,
    lambda: f64,
    trials: usize,
    seed: u64,
    opts: EcdfOptions,
) -> Result<(LoadEcdf, Vec<LoadValue>), LimitError> {
    if n == 0 || trials == 0 || !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(LimitError::Invalid(format!("n = {n}, lambda = {lambda}, trials = {trials}")));
    }
    let per_trial: Vec<Vec<LoadValue>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let g = trial_graph(n, lambda, seed, t);
            if n <= opts.crossover {
                Ok(exact_load_values(&g))
            } else {
                approximate_loads(&g, opts.tol)
            }
        })
        .collect::<Result<_, _>>()?;
    let mut ecdf = LoadEcdf::new(lambda, n, seed);
    let mut maxima = Vec::with_capacity(trials);
    for loads in &per_trial {
        ecdf.add_trial(loads);
        let max = loads.iter().copied().max_by(|a, b| a.to_f64().total_cmp(&b.to_f64()));
        maxima.push(max.unwrap_or(LoadValue::Exact(Rational::default())));
    }
    Ok((ecdf, maxima))
}

/// Per trial: `(max balanced load, densest-subgraph density)`.
pub fn max_load_samples(n: usize, lambda: f64, trials: usize, seed: u64) -> Result<Vec<(Rational, Rational)>, LimitError> {
    if n == 0 || trials == 0 || !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(LimitError::Invalid(format!("n = {n}, lambda = {lambda}, trials = {trials}")));
    }
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let g = trial_graph(n, lambda, seed, t);
            let max = balanced_loads(&g).max_load().unwrap_or_default();
            let dens = densest_density(&g).map_err(|e| LimitError::Oracle(e.to_string()))?;
            Ok((max, dens))
        })
        .collect()
}

/// Median of the per-trial maximal loads (lower median for even counts).
pub fn rho_lambda(n: usize, lambda: f64, trials: usize, seed: u64) -> Result<f64, LimitError> {
    let samples = max_load_samples(n, lambda, trials, seed)?;
    if let Some((a, b)) = samples.iter().find(|(a, b)| a != b) {
        return Err(LimitError::Oracle(format!("max load {a} differs from density {b}")));
    }
    let mut maxes: Vec<Rational> = samples.into_iter().map(|(a, _)| a).collect();
    maxes.sort();
    Ok(to_f64(&maxes[(maxes.len() - 1) / 2]))
}

/// Largest root of `y = 1 - exp(-λ y)`.
pub fn giant_fraction(lambda: f64) -> f64 {
    if lambda <= 1.0 {
        return 0.0;
    }
    let mut y = 1.0f64;
    for _ in 0..1_000_000 {
        let next = 0.5 * y + 0.5 * (1.0 - (-lambda * y).exp());
        if (next - y).abs() < 1e-13 {
            return next;
        }
        y = next;
    }
    y
}

/// `Pr(Poisson(λy) ≥ 2)` with `y` the giant fraction.
pub fn two_core_fraction(lambda: f64) -> f64 {
    let y = giant_fraction(lambda);
    if y == 0.0 {
        return 0.0;
    }
    let m = lambda * y;
    1.0 - (-m).exp() - m * (-m).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn fixed_points() {
        assert_eq!(giant_fraction(1.0), 0.0);
        assert_eq!(giant_fraction(0.5), 0.0);
        assert!((giant_fraction(2.0) - 0.79681).abs() < 1e-5);
        assert!((giant_fraction(4.0) - 0.98017).abs() < 1e-4);
        assert_eq!(two_core_fraction(0.9), 0.0);
        assert!((two_core_fraction(2.0) - 0.47300).abs() < 1e-4);
        assert!((two_core_fraction(4.0) - 0.9024).abs() < 1e-3);
    }

    #[test]
    fn lambda_zero() {
        let e = empirical_load_distribution(50, 0.0, 2, 1).unwrap();
        assert_eq!(e.total(), 100);
        assert_eq!(e.mass_at(int(0)), 1.0);
        assert_eq!(f_lambda(&e, 0.0), 0.0);
        assert_eq!(f_lambda(&e, -1.0), 1.0);
        assert_eq!(rho_lambda(50, 0.0, 3, 1).unwrap(), 0.0);
    }

    #[test]
    fn sampler_edge_count_is_plausible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = sample_gnp(2000, 3.0 / 2000.0, &mut rng);
        // mean 2998.5, sd about 55
        assert!((g.edge_count() as f64 - 2998.5).abs() < 300.0);
        assert_eq!(sample_gnp(5, 1.0, &mut rng).edge_count(), 10);
        assert_eq!(sample_gnp(5, 0.0, &mut rng).edge_count(), 0);
    }

    #[test]
    fn approximate_matches_exact() {
        for t in 0..5 {
            let g = trial_graph(300, 2.5, 9, t);
            let exact = exact_load_values(&g);
            let approx = approximate_loads(&g, 1e-6).unwrap();
            for (a, b) in exact.iter().zip(&approx) {
                assert!((a.to_f64() - b.to_f64()).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn csv_and_masses() {
        let mut e = LoadEcdf::new(1.0, 4, 0);
        e.add_trial(&[
            LoadValue::Exact(int(0)),
            LoadValue::Exact(rat(1, 2)),
            LoadValue::Exact(rat(1, 2)),
            LoadValue::Approx(OrderedFloat(1.25)),
        ]);
        assert_eq!(e.mass_below(int(1)), 0.75);
        assert_eq!(e.mass_above(int(1)), 0.25);
        assert_eq!(f_lambda(&e, 0.5), 0.25);
        assert_eq!(f_lambda(&e, 0.49), 0.75);
        assert_eq!(
            e.to_csv(),
            "load,cumulative_mass,rational\n\
             0.000000000000,0.250000000000,0/1\n\
             0.500000000000,0.750000000000,1/2\n\
             1.250000000000,1.000000000000,\n"
        );
    }

    #[test]
    fn merge_is_order_independent() {
        let a = empirical_load_distribution(40, 1.5, 2, 1).unwrap();
        let b = empirical_load_distribution(40, 1.5, 3, 2).unwrap();
        let c = empirical_load_distribution(40, 1.5, 1, 3).unwrap();
        let mut x = a.clone();
        x.merge(&b).unwrap();
        x.merge(&c).unwrap();
        let mut y = c.clone();
        y.merge(&a).unwrap();
        y.merge(&b).unwrap();
        assert_eq!(x, y);
        let other = empirical_load_distribution(41, 1.5, 1, 3).unwrap();
        assert_eq!(x.merge(&other), Err(LimitError::MergeMismatch));
    }
}
