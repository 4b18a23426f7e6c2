//! Seeded Wiener-process sampling.
//!
//! Every trajectory owns an [`RngStream`]: a ChaCha20 generator keyed by the
//! master seed with the trajectory index as its stream (nonce) selector, so
//! streams are independent and need no shared state across threads. Normal
//! variates come from the ziggurat sampler `rand_distr::StandardNormal`
//! (pinned to rand_distr 0.5.1 in the manifest).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Independent random stream for one trajectory.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        Self { master_seed, stream_index, rng }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// One standard normal draw.
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// One draw from N(0, variance).
    pub fn normal(&mut self, variance: f64) -> f64 {
        let z = self.standard_normal();
        if variance == 0.0 {
            0.0
        } else {
            variance.sqrt() * z
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || t.is_nan() {
        Err(Error::NegativeTime(t))
    } else {
        Ok(())
    }
}

/// W_t ~ N(0, t). Always consumes exactly one normal draw, so sweeps over t
/// stay aligned on the same underlying variates.
pub fn sample_terminal(stream: &mut RngStream, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(stream.normal(t))
}

/// Per-pulse noise argument W_{t/N²} = W_t / N, shared by all N pulses of a run.
pub fn shared_pulse_value(w_t: f64, n: usize) -> f64 {
    assert!(n >= 1, "pulse count must be positive");
    w_t / n as f64
}

/// Jointly samples (W_{t/N²}, W_{t/(N+2)²}) from one Wiener path.
pub fn correlated_pair(stream: &mut RngStream, t: f64, n: usize) -> Result<(f64, f64)> {
    correlated_pair_lagged(stream, t, n, 2)
}

/// Jointly samples (W_{t/N²}, W_{t/(N+L)²}) from one Wiener path.
///
/// The later time t/(N+L)² is drawn first; the earlier value adds an
/// independent increment with variance t/N² − t/(N+L)².
pub fn correlated_pair_lagged(stream: &mut RngStream, t: f64, n: usize, lag: usize) -> Result<(f64, f64)> {
    check_time(t)?;
    if n == 0 {
        return Err(Error::InvalidArgument("pulse count must be positive".into()));
    }
    let far = (n + lag) as f64;
    let w_far = stream.normal(t / (far * far));
    let delta = stream.normal(increment_variance(t, n, lag));
    Ok((w_far + delta, w_far))
}

/// Var[W_{t/N²} − W_{t/(N+L)²}] = t·((N+L)² − N²)/(N²(N+L)²); for L = 2 this is 4t(N+1)/(N²(N+2)²).
pub fn increment_variance(t: f64, n: usize, lag: usize) -> f64 {
    let (near, far) = (n as f64, (n + lag) as f64);
    t * (far * far - near * near) / (near * near * far * far)
}

/// Discretized Wiener path on [0, t_final].
#[derive(Debug, Clone, PartialEq)]
pub struct WienerPath {
    pub t_final: f64,
    pub increments: Vec<f64>,
    pub terminal: f64,
}

impl WienerPath {
    pub fn from_increments(t_final: f64, increments: Vec<f64>) -> Result<Self> {
        check_time(t_final)?;
        if increments.is_empty() {
            return Err(Error::InvalidArgument("a Wiener path needs at least one step".into()));
        }
        let terminal = increments.iter().sum();
        Ok(Self { t_final, increments, terminal })
    }

    pub fn n_steps(&self) -> usize {
        self.increments.len()
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.n_steps() as f64
    }

    /// W at each grid point, starting with W_0 = 0.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        std::iter::once(0.0)
            .chain(self.increments.iter().map(|dw| {
                acc += dw;
                acc
            }))
            .collect()
    }

    /// Path on the grid with half as many steps, by summing adjacent increments.
    pub fn coarsen(&self) -> Result<Self> {
        if !self.n_steps().is_multiple_of(2) {
            return Err(Error::InvalidArgument("coarsening needs an even step count".into()));
        }
        let inc = self.increments.chunks(2).map(|p| p[0] + p[1]).collect();
        Self::from_increments(self.t_final, inc)
    }

    /// Path on the grid with twice as many steps whose coarsening is `self`.
    ///
    /// Each increment ΔW over a step of length h is split by the Brownian
    /// bridge: the first half is ΔW/2 + √(h/4)·Z, the second half the remainder.
    pub fn refine(&self, stream: &mut RngStream) -> Result<Self> {
        let quarter = self.dt() / 4.0;
        let mut inc = Vec::with_capacity(2 * self.n_steps());
        for &dw in &self.increments {
            let first = dw / 2.0 + stream.normal(quarter);
            inc.push(first);
            inc.push(dw - first);
        }
        Self::from_increments(self.t_final, inc)
    }
}

/// Path with `steps` independent N(0, t/steps) increments.
pub fn sample_path(stream: &mut RngStream, t: f64, steps: usize) -> Result<WienerPath> {
    check_time(t)?;
    if steps == 0 {
        return Err(Error::InvalidArgument("a Wiener path needs at least one step".into()));
    }
    let var = t / steps as f64;
    let increments = (0..steps).map(|_| stream.normal(var)).collect();
    WienerPath::from_increments(t, increments)
}
