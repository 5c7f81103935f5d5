//! Exponential moments of orbit edge counts.
//!
//! With `S_k = sum_t I_{t-1} J1_{t-1} I_t J2_t`, integrating out the `J`s
//! leaves a product of `1 + I_{t-1} I_t s² ν` with `ν = e^θ - 1`, so every
//! moment is a bilinear form in powers of the transfer matrix
//! `T[a][b] = Pr(I = b) (1 + a b s² ν)`. Its eigenvalues `μ1 > μ2` are the
//! roots of `x² - (1 + p s² ν) x + p (1 - p) s² ν`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    #[error("k must be at least 1")]
    ZeroLength,
    #[error("invalid moment parameters: {0}")]
    Invalid(String),
    #[error("moment overflows f64 (log value {0})")]
    Overflow(f64),
    #[error("roots too close (|μ1 - μ2| = {0:e}); use the transfer-matrix value")]
    IllConditioned(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainKind {
    Cycle,
    FreeChain,
    ConfinedChain,
}

/// Which chain endpoints are forced to `I = 1` for confined chains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ConfinedBoundary {
    /// `I_0 = I_k = 1`.
    #[default]
    BothPinned,
    /// `I_0 = 1` only; `I_k` is Bernoulli.
    SourcePinned,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentParams {
    pub theta: f64,
    pub nu: f64,
    pub p: f64,
    pub s: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub l: usize,
    /// `alpha_ladder[k]` for `1 <= k <= L + 1`; index 0 unused.
    pub alpha_ladder: Vec<f64>,
    pub confined: ConfinedBoundary,
}

/// Truncation `L(α, ε)`: `floor(1/(1-α))` if `α < 1`, else
/// `ceil((2 + 2ε)/ε)`.
pub fn truncation_l(alpha: f64, eps: f64) -> usize {
    if alpha < 1.0 {
        (1.0 / (1.0 - alpha)).floor() as usize
    } else {
        ((2.0 + 2.0 * eps) / eps).ceil() as usize
    }
}

impl MomentParams {
    pub fn new(p: f64, s: f64, theta: f64, alpha: f64, eps: f64) -> Result<Self, MomentError> {
        if !(p > 0.0 && p <= 1.0 && s >= 0.0 && s <= 1.0) {
            return Err(MomentError::Invalid(format!("p = {p}, s = {s}")));
        }
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(MomentError::Invalid(format!("theta = {theta}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0 && eps > 0.0) {
            return Err(MomentError::Invalid(format!("alpha = {alpha}, eps = {eps}")));
        }
        let nu = theta.exp_m1();
        let tr = 1.0 + p * s * s * nu;
        let det = p * (1.0 - p) * s * s * nu;
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        let mu1 = (tr + disc) / 2.0;
        // the smaller root via the product avoids cancellation
        let mu2 = if mu1 > 0.0 { det / mu1 } else { 0.0 };
        let l = truncation_l(alpha, eps);
        let mut ladder = vec![0.0; l + 2];
        for (k, a) in ladder.iter_mut().enumerate().take(l + 1).skip(1) {
            *a = (k as f64 - 1.0) / k as f64;
        }
        ladder[l + 1] = alpha.min(l as f64 / (l as f64 + 1.0));
        Ok(MomentParams {
            theta,
            nu,
            p,
            s,
            mu1,
            mu2,
            l,
            alpha_ladder: ladder,
            confined: ConfinedBoundary::default(),
        })
    }

    pub fn with_confined(mut self, c: ConfinedBoundary) -> Self {
        self.confined = c;
        self
    }

    fn transfer(&self) -> [[f64; 2]; 2] {
        let q = self.s * self.s * self.nu;
        let pr = [1.0 - self.p, self.p];
        [[pr[0], pr[1]], [pr[0], pr[1] * (1.0 + q)]]
    }
}

/// `log E exp(θ S_k)` by propagating the transfer matrix with per-step
/// rescaling.
pub fn exact_dp_log_moment(kind: ChainKind, k: usize, mp: &MomentParams) -> Result<f64, MomentError> {
    if k == 0 {
        return Err(MomentError::ZeroLength);
    }
    let t = mp.transfer();
    let step = |v: [f64; 2]| -> [f64; 2] {
        [
            v[0] * t[0][0] + v[1] * t[1][0],
            v[0] * t[0][1] + v[1] * t[1][1],
        ]
    };
    // row vector times T^k, starting from `start`; returns (vector, log scale)
    let run = |start: [f64; 2]| -> ([f64; 2], f64) {
        let mut v = start;
        let mut log_scale = 0.0;
        for _ in 0..k {
            v = step(v);
            let m = v[0].max(v[1]);
            if m > 0.0 {
                v = [v[0] / m, v[1] / m];
                log_scale += m.ln();
            }
        }
        (v, log_scale)
    };
    let log = match kind {
        ChainKind::Cycle => {
            let (a, la) = run([1.0, 0.0]);
            let (b, lb) = run([0.0, 1.0]);
            log_add(la + a[0].ln(), lb + b[1].ln())
        }
        ChainKind::FreeChain => {
            let (v, l) = run([1.0 - mp.p, mp.p]);
            l + (v[0] + v[1]).ln()
        }
        ChainKind::ConfinedChain => {
            let (v, l) = run([0.0, 1.0]);
            match mp.confined {
                ConfinedBoundary::BothPinned => l + v[1].ln() - mp.p.ln(),
                ConfinedBoundary::SourcePinned => l + (v[0] + v[1]).ln(),
            }
        }
    };
    Ok(log)
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

pub fn exact_dp_moment(kind: ChainKind, k: usize, mp: &MomentParams) -> Result<f64, MomentError> {
    let l = exact_dp_log_moment(kind, k, mp)?;
    let v = l.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(MomentError::Overflow(l))
    }
}

/// Coefficients `(c1, c2)` with moment `= c1 μ1^k + c2 μ2^k` for all
/// `k >= 1`.
pub fn chain_coefficients(kind: ChainKind, mp: &MomentParams) -> Result<(f64, f64), MomentError> {
    if kind == ChainKind::Cycle {
        return Ok((1.0, 1.0));
    }
    let a1 = exact_dp_moment(kind, 1, mp)?;
    if mp.mu2 == 0.0 {
        return Ok((a1 / mp.mu1, 0.0));
    }
    let gap = mp.mu1 - mp.mu2;
    if gap.abs() < 1e-12 * mp.mu1.max(1.0) {
        return Err(MomentError::IllConditioned(gap.abs()));
    }
    let a2 = exact_dp_moment(kind, 2, mp)?;
    let c1 = (a2 - mp.mu2 * a1) / (mp.mu1 * gap);
    let c2 = (mp.mu1 * a1 - a2) / (mp.mu2 * gap);
    Ok((c1, c2))
}

pub fn closed_form_moment(kind: ChainKind, k: usize, mp: &MomentParams) -> Result<f64, MomentError> {
    if k == 0 {
        return Err(MomentError::ZeroLength);
    }
    let (c1, c2) = chain_coefficients(kind, mp)?;
    let v = c1 * mp.mu1.powi(k as i32) + c2 * mp.mu2.powi(k as i32);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(MomentError::Overflow(f64::INFINITY))
    }
}

/// Monte Carlo estimate of `E exp(θ S_k)`: `(mean, standard error)`.
///
/// Plain sampling almost never sees the long runs of shared edges that
/// dominate the moment when `p` is small and `θ` large, so paths are drawn
/// from a tilted proposal: indicators follow the chain whose kernel is the
/// transfer matrix reweighted by its Perron vector, and each shared pair is
/// an edge with probability `s²e^θ/(1 + s²ν)`. Every draw carries its exact
/// likelihood ratio against the model, so the estimator stays unbiased.
///
/// Draws are split into fixed chunks, each with its own stream, so the
/// result does not depend on the thread count.
pub fn monte_carlo_moment(
    kind: ChainKind,
    k: usize,
    mp: &MomentParams,
    draws: usize,
    seed: u64,
) -> Result<(f64, f64), MomentError> {
    if k == 0 {
        return Err(MomentError::ZeroLength);
    }
    if draws < 2 {
        return Err(MomentError::Invalid("need at least two draws".into()));
    }
    let prop = Proposal::new(mp);
    const CHUNK: usize = 1 << 14;
    let chunks = draws.div_ceil(CHUNK);
    let (sum, sum_sq) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(draws - c * CHUNK);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                let x = prop.draw(kind, k, mp, &mut rng).exp();
                sum += x;
                sum_sq += x * x;
            }
            (sum, sum_sq)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = draws as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

struct Proposal {
    /// `kernel[a][b]`: probability of indicator `b` after `a`.
    kernel: [[f64; 2]; 2],
    /// Start probability of indicator 1.
    start: f64,
    /// Edge probability on a pair with both indicators set.
    edge: f64,
}

impl Proposal {
    fn new(mp: &MomentParams) -> Self {
        let t = mp.transfer();
        let h = [mp.p, mp.mu1 - (1.0 - mp.p)];
        let mut kernel = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                kernel[a][b] = t[a][b] * h[b] / (mp.mu1 * h[a]);
            }
        }
        let (up, down) = (kernel[0][1], kernel[1][0]);
        let start = if up + down > 0.0 { up / (up + down) } else { mp.p };
        let s2 = mp.s * mp.s;
        let edge = s2 * mp.theta.exp() / (1.0 + s2 * mp.nu);
        Proposal { kernel, start, edge }
    }

    /// One draw of `log(exp(θ S_k) · likelihood ratio)`.
    fn draw<R: Rng>(&self, kind: ChainKind, k: usize, mp: &MomentParams, rng: &mut R) -> f64 {
        let pr = |b: bool| if b { mp.p } else { 1.0 - mp.p };
        let s2 = mp.s * mp.s;
        let mut log_w = 0.0;
        let first = if kind == ChainKind::ConfinedChain {
            true
        } else {
            let b = rng.random::<f64>() < self.start;
            log_w += (pr(b) / if b { self.start } else { 1.0 - self.start }).ln();
            b
        };
        let mut prev = first;
        for t in 1..=k {
            let forced = match kind {
                ChainKind::Cycle if t == k => Some(first),
                ChainKind::ConfinedChain if t == k && mp.confined == ConfinedBoundary::BothPinned => Some(true),
                _ => None,
            };
            let cur = match forced {
                Some(b) => b,
                None => {
                    let row = self.kernel[prev as usize];
                    let b = rng.random::<f64>() < row[1];
                    log_w += (pr(b) / row[b as usize]).ln();
                    b
                }
            };
            if prev && cur {
                if rng.random::<f64>() < self.edge {
                    log_w += mp.theta + (s2 / self.edge).ln();
                } else {
                    log_w += ((1.0 - s2) / (1.0 - self.edge)).ln();
                }
            }
            prev = cur;
        }
        log_w
    }
}
