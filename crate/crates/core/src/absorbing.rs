//! Killed random walks on `Z/nZ` and the substochastic chain behind them.
//!
//! Two clocks appear. The discrete chain `M' = I/3 + 2M/3` moves to each
//! neighbor with probability `1/6` per step and is absorbed with probability
//! `a_x = 1 - rowsum_x(M')`. The continuous-time walk jumps to each neighbor
//! at rate `1`. Running the chain as a Poisson process at rate
//! [`WALK_CLOCK_FACTOR`] gives exactly the walk, with kill rate
//! `WALK_CLOCK_FACTOR * a_x`. Rates handed to the simulator and to `G_b` are
//! walk-clock rates.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::report::{fmt_f64, Table};
use crate::spectral::circulant::CirculantPlusDiagonal;
use crate::spectral::eigen::dense_hermitian_eigen;
use crate::spectral::families::build_harper;
use crate::spectral::matrix::RealMatrix;

/// Chain steps per unit of walk time: `2 / (M'(0,1) + M'(0,n-1))`.
pub const WALK_CLOCK_FACTOR: f64 = 6.0;

/// Walks still running at this time are reported as a simulation-cap error.
pub const TIME_CAP: f64 = 1e6;

const ROW_SUM_TOL: f64 = 1e-12;

/// Nonnegative matrix with row sums at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstochasticMatrix(RealMatrix);

impl SubstochasticMatrix {
    pub fn new(m: RealMatrix) -> Result<Self> {
        if !m.is_square() {
            return domain("substochastic matrix must be square");
        }
        if let Some(x) = m.as_slice().iter().find(|&&x| x < 0.0 || !x.is_finite()) {
            return domain(format!("entry {x} is negative or not finite"));
        }
        for i in 0..m.rows() {
            let s: f64 = m.row(i).iter().sum();
            if s > 1.0 + ROW_SUM_TOL {
                return domain(format!("row {i} sums to {s} > 1"));
            }
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.0.row(i).iter().sum()).collect()
    }

    /// Eigenvalues, descending. Requires a symmetric matrix.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(dense_hermitian_eigen(&self.0, false)?.eigenvalues)
    }
}

/// `M' = I/3 + 2M/3`. Rounding noise below `1e-14` is clamped to zero.
pub fn build_substochastic(m: &CirculantPlusDiagonal) -> Result<SubstochasticMatrix> {
    let dense = m
        .to_dense_real()
        .ok_or_else(|| Error::Domain("substochastic transform needs a real matrix".into()))?;
    let n = dense.rows();
    let mut out = RealMatrix::from_fn(n, n, |i, j| {
        2.0 * dense[(i, j)] / 3.0 + if i == j { 1.0 / 3.0 } else { 0.0 }
    });
    for x in out.as_mut_slice() {
        if *x < 0.0 && *x > -1e-14 {
            *x = 0.0;
        }
    }
    SubstochasticMatrix::new(out)
}

/// `(n+1) x (n+1)` stochastic matrix; state `0` absorbs and state `i >= 1`
/// is row `i - 1` of `M'`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorbingChain(RealMatrix);

pub fn build_absorbing(mp: &SubstochasticMatrix) -> AbsorbingChain {
    let n = mp.n();
    let sums = mp.row_sums();
    let mut p = RealMatrix::zeros(n + 1, n + 1);
    p[(0, 0)] = 1.0;
    for i in 0..n {
        p[(i + 1, 0)] = (1.0 - sums[i]).max(0.0);
        for j in 0..n {
            p[(i + 1, j + 1)] = mp.matrix()[(i, j)];
        }
    }
    AbsorbingChain(p)
}

impl AbsorbingChain {
    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    /// `a_i`, the one-step absorption probability from transient state `i`.
    pub fn absorption_probabilities(&self) -> Vec<f64> {
        (1..self.0.rows()).map(|i| self.0[(i, 0)]).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.0.rows()).map(|i| self.0.row(i).iter().sum()).collect()
    }

    /// Spectrum on functions vanishing at the absorbing state, descending.
    pub fn dirichlet_eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.0.rows() - 1;
        let sub = RealMatrix::from_fn(n, n, |i, j| self.0[(i + 1, j + 1)]);
        Ok(dense_hermitian_eigen(&sub, false)?.eigenvalues)
    }
}

/// Position-dependent killing intensities on `Z/nZ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KillRates {
    u: Vec<f64>,
}

impl KillRates {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if u.is_empty() {
            return domain("kill rates must be nonempty");
        }
        if let Some(x) = u.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return domain(format!("kill rate {x} is negative or not finite"));
        }
        Ok(Self { u })
    }

    pub fn zeros(n: usize) -> Self {
        Self { u: vec![0.0; n] }
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.u
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.u.iter().map(|x| x * factor).collect())
    }

    /// First index of the smallest rate.
    pub fn weakest_site(&self) -> usize {
        let mut best = 0;
        for (i, x) in self.u.iter().enumerate() {
            if *x < self.u[best] {
                best = i;
            }
        }
        best
    }

    /// Nondecreasing rearrangement.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.u.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Chain-clock rates `(1 - cos(2 pi a x / n)) / 3`; these equal the
/// absorption probabilities of `build_absorbing(build_substochastic(M_n(a)))`.
pub fn harper_kill_rates(n: usize, a: usize) -> Result<KillRates> {
    if n < 3 {
        return domain(format!("need n >= 3, got {n}"));
    }
    KillRates::new(
        (0..n)
            .map(|x| {
                let r = ((a * x) % n) as f64;
                (1.0 - (2.0 * std::f64::consts::PI * r / n as f64).cos()) / 3.0
            })
            .collect(),
    )
}

/// Harper kill rates on the walk clock: `2 (1 - cos(2 pi a x / n))`.
pub fn harper_walk_rates(n: usize, a: usize) -> Result<KillRates> {
    harper_kill_rates(n, a)?.scaled(WALK_CLOCK_FACTOR)
}

/// One killed-walk trajectory. Local times are keyed by signed displacement
/// from the start.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkTrace {
    pub start: usize,
    /// Visited positions on `Z/nZ`; empty unless recording was requested.
    pub states: Vec<usize>,
    /// Holding time in each entry of `states`.
    pub holding_times: Vec<f64>,
    pub absorbed: bool,
    /// Reached displacement `+-(b+1)` before absorption.
    pub exited: bool,
    /// Time at which the trajectory stopped: absorption, exit, or horizon.
    pub tau: f64,
    pub local_times: BTreeMap<i64, f64>,
}

impl WalkTrace {
    /// Occupation time of `|displacement| = y`.
    pub fn folded_local_time(&self, y: u64) -> f64 {
        let y = y as i64;
        let plus = self.local_times.get(&y).copied().unwrap_or(0.0);
        if y == 0 {
            plus
        } else {
            plus + self.local_times.get(&-y).copied().unwrap_or(0.0)
        }
    }

    pub fn trace_csv(&self) -> Table {
        let mut t = Table::new(&["t", "state"]);
        let mut clock = 0.0;
        for (s, h) in self.states.iter().zip(&self.holding_times) {
            t.push(vec![fmt_f64(clock), s.to_string()]);
            clock += h;
        }
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkOptions {
    pub start: usize,
    /// Stop on reaching displacement `+-(b+1)`.
    pub exit_radius: Option<u64>,
    /// Stop, unabsorbed, at this time.
    pub horizon: Option<f64>,
    pub record_path: bool,
}

/// Independent substream for trial `trial` of a run seeded by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Nearest-neighbor walk at rate 1 per neighbor with killing intensity
/// `rates[x]`, simulated event by event.
pub fn run_walk<R: Rng>(rates: &KillRates, opts: &WalkOptions, rng: &mut R) -> Result<WalkTrace> {
    let n = rates.n();
    if opts.start >= n {
        return domain(format!("start {} outside 0..{n}", opts.start));
    }
    let u = rates.as_slice();
    let mut x = opts.start;
    let mut disp: i64 = 0;
    let mut t = 0.0;
    let mut trace = WalkTrace {
        start: opts.start,
        states: Vec::new(),
        holding_times: Vec::new(),
        absorbed: false,
        exited: false,
        tau: 0.0,
        local_times: BTreeMap::new(),
    };
    loop {
        let total = 2.0 + u[x];
        let e: f64 = rng.sample(Exp1);
        let mut hold = e / total;
        let stop_at_horizon = opts.horizon.is_some_and(|h| t + hold >= h);
        if stop_at_horizon {
            hold = opts.horizon.unwrap() - t;
        }
        if opts.record_path {
            trace.states.push(x);
            trace.holding_times.push(hold);
        }
        *trace.local_times.entry(disp).or_insert(0.0) += hold;
        t += hold;
        if stop_at_horizon {
            break;
        }
        if t > TIME_CAP {
            return Err(Error::SimulationCap(format!(
                "walk still running at time {TIME_CAP:e}"
            )));
        }
        let r = rng.gen::<f64>() * total;
        if r < 1.0 {
            x = (x + 1) % n;
            disp += 1;
        } else if r < 2.0 {
            x = (x + n - 1) % n;
            disp -= 1;
        } else {
            trace.absorbed = true;
            break;
        }
        if opts.exit_radius.is_some_and(|b| disp.unsigned_abs() == b + 1) {
            trace.exited = true;
            break;
        }
    }
    trace.tau = t;
    Ok(trace)
}

/// One trajectory from `floor(n/2)` until absorption or exit at radius `b+1`,
/// with the path recorded.
pub fn simulate_killed_walk(n: usize, rates: &KillRates, b: u64, seed: u64) -> Result<WalkTrace> {
    if rates.n() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: rates.n(),
        });
    }
    let opts = WalkOptions {
        start: n / 2,
        exit_radius: Some(b),
        horizon: None,
        record_path: true,
    };
    run_walk(rates, &opts, &mut trial_rng(seed, 0))
}

fn check_nonnegative(v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return domain("vector must have length b + 1 >= 1");
    }
    if let Some(x) = v.iter().find(|x| x.is_nan() || **x < 0.0) {
        return domain(format!("coordinate {x} is negative"));
    }
    Ok(())
}

/// `F_b` with `b = v.len() - 1`.
pub fn f_b(v: &[f64]) -> Result<f64> {
    check_nonnegative(v)?;
    let b1 = v.len() as f64;
    let mut log = -(1.0 + b1 * b1 * v[0] / 2.0).ln();
    for (l, &vl) in v.iter().enumerate().skip(1) {
        log -= (1.0 + b1 * (b1 - l as f64) * vl).ln();
    }
    Ok((log / b1).exp())
}

/// `G_b` with `b = v.len() - 1`.
pub fn g_b(v: &[f64]) -> Result<f64> {
    check_nonnegative(v)?;
    let b1 = v.len() as f64;
    let log: f64 = v
        .iter()
        .enumerate()
        .map(|(k, &vk)| -(1.0 + b1 * (b1 - k as f64) * vk / 2.0).ln())
        .sum();
    Ok((log / b1).exp())
}

/// `G_b` of the `b + 1` smallest rates.
pub fn g_b_sorted(rates: &KillRates, b: usize) -> Result<f64> {
    if b + 1 > rates.n() {
        return domain(format!("b + 1 = {} exceeds n = {}", b + 1, rates.n()));
    }
    g_b(&rates.sorted()[..=b])
}

/// Stage rates of the exit time from radius `b`:
/// `2 (1 - cos(pi (2k - 1) / (2 (b + 1))))`, `k = 1..=b+1`, increasing.
pub fn hitting_time_mgf_rates(b: usize) -> Vec<f64> {
    let b1 = (b + 1) as f64;
    (1..=b + 1)
        .map(|k| {
            let theta = std::f64::consts::PI * (2 * k - 1) as f64 / (2.0 * b1);
            2.0 * (1.0 - theta.cos())
        })
        .collect()
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn from_samples(x: &[f64]) -> Self {
        let m = x.len() as f64;
        let mean = x.iter().sum::<f64>() / m;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
        Self {
            mean,
            std_error: (var / m).sqrt(),
        }
    }

    /// `|mean - target| <= z * std_error`.
    pub fn within(&self, target: f64, z: f64) -> bool {
        (self.mean - target).abs() <= z * self.std_error
    }
}

/// Unbiased sample variance with the large-sample standard error
/// `sqrt((m4 - s^4) / N)`.
pub fn variance_estimate(x: &[f64]) -> Estimate {
    let m = x.len() as f64;
    let mean = x.iter().sum::<f64>() / m;
    let s2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / m;
    Estimate {
        mean: s2,
        std_error: ((m4 - s2 * s2).max(0.0) / m).sqrt(),
    }
}

/// Exit-time and local-time statistics of the unkilled walk at radius `b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingStats {
    pub b: usize,
    pub trials: usize,
    pub tau_mean: Estimate,
    pub tau_variance: Estimate,
    /// Mean folded local time at `|displacement| = y`, `y = 0..=b`.
    pub local_time_means: Vec<Estimate>,
}

pub fn hitting_statistics(b: usize, trials: usize, seed: u64) -> Result<HittingStats> {
    if trials < 2 {
        return domain("need at least two trials");
    }
    let n = 2 * (b + 1) + 1;
    let rates = KillRates::zeros(n);
    let opts = WalkOptions {
        start: 0,
        exit_radius: Some(b as u64),
        horizon: None,
        record_path: false,
    };
    let traces: Vec<WalkTrace> = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_walk(&rates, &opts, &mut trial_rng(seed, i)))
        .collect::<Result<_>>()?;
    let taus: Vec<f64> = traces.iter().map(|t| t.tau).collect();
    let local_time_means = (0..=b as u64)
        .map(|y| {
            let l: Vec<f64> = traces.iter().map(|t| t.folded_local_time(y)).collect();
            Estimate::from_samples(&l)
        })
        .collect();
    Ok(HittingStats {
        b,
        trials,
        tau_mean: Estimate::from_samples(&taus),
        tau_variance: variance_estimate(&taus),
        local_time_means,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalCheck {
    /// Empirical `P(tau > tau_b)`.
    pub survival: Estimate,
    pub g_b: f64,
}

impl SurvivalCheck {
    pub fn bound_holds(&self, z: f64) -> bool {
        self.survival.mean <= self.g_b + z * self.survival.std_error
    }
}

/// Monte-Carlo `P(tau > tau_b)` from `start` against `G_b` of the sorted rates.
pub fn survival_bound_check(
    rates: &KillRates,
    b: usize,
    start: usize,
    trials: usize,
    seed: u64,
) -> Result<SurvivalCheck> {
    if trials < 1000 {
        return domain(format!("need at least 1000 trials, got {trials}"));
    }
    let opts = WalkOptions {
        start,
        exit_radius: Some(b as u64),
        horizon: None,
        record_path: false,
    };
    let survived: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_walk(rates, &opts, &mut trial_rng(seed, i)).map(|t| f64::from(u8::from(t.exited))))
        .collect::<Result<_>>()?;
    Ok(SurvivalCheck {
        survival: Estimate::from_samples(&survived),
        g_b: g_b_sorted(rates, b)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaStarEstimate {
    pub estimate: f64,
    pub window_start: f64,
    pub horizon: f64,
    pub survivors_at_horizon: usize,
    pub points_used: usize,
}

pub const MIN_SURVIVORS: usize = 100;
const WINDOW_POINTS: usize = 50;

/// Decay rate of `P(tau > t)` from a least-squares fit of `-log S(t)` on
/// `t` over the last half of `[0, horizon]`. Points with fewer than
/// [`MIN_SURVIVORS`] survivors are dropped. Walks start at the site of
/// weakest killing, where the surviving mode has its mass.
pub fn estimate_lambda_star(
    rates: &KillRates,
    trials: usize,
    horizon: f64,
    seed: u64,
) -> Result<LambdaStarEstimate> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return domain(format!("horizon must be positive, got {horizon}"));
    }
    let start = rates.weakest_site();
    let opts = WalkOptions {
        start,
        exit_radius: None,
        horizon: Some(horizon),
        record_path: false,
    };
    let mut times: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            run_walk(rates, &opts, &mut trial_rng(seed, i))
                .map(|t| if t.absorbed { t.tau } else { f64::INFINITY })
        })
        .collect::<Result<_>>()?;
    times.sort_by(f64::total_cmp);
    let survivors = |t: f64| trials - times.partition_point(|&x| x <= t);
    let window_start = horizon / 2.0;
    let pts: Vec<(f64, f64)> = (0..=WINDOW_POINTS)
        .map(|i| window_start + (horizon - window_start) * i as f64 / WINDOW_POINTS as f64)
        .filter_map(|t| {
            let s = survivors(t);
            (s >= MIN_SURVIVORS).then(|| (t, -(s as f64 / trials as f64).ln()))
        })
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "fewer than {MIN_SURVIVORS} survivors over the fit window"
        )));
    }
    let m = pts.len() as f64;
    let tx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ty = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - tx) * (p.1 - ty)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - tx).powi(2)).sum();
    Ok(LambdaStarEstimate {
        estimate: sxy / sxx,
        window_start,
        horizon,
        survivors_at_horizon: survivors(horizon),
        points_used: pts.len(),
    })
}

/// Walk-clock decay rate from the dense spectrum:
/// `WALK_CLOCK_FACTOR * (1 - lambda_1(M'))`.
pub fn dense_lambda_star(n: usize, a: usize) -> Result<f64> {
    let top = build_substochastic(&build_harper(n, a)?)?.eigenvalues()?[0];
    Ok(WALK_CLOCK_FACTOR * (1.0 - top))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsorbReport {
    pub n: usize,
    pub a: usize,
    pub b: usize,
    pub trials: usize,
    pub seed: u64,
    pub start: usize,
    pub clock_factor: f64,
    pub survival: f64,
    pub survival_std_error: f64,
    pub g_b: f64,
    pub lambda_star_estimate: Option<f64>,
    pub lambda_star_exact: f64,
}
