//! State space for delay difference systems.
//!
//! A history assigns each channel a finite sample window
//!
//! ```text
//! alpha_i(j),    j = r, r+1, ..., 0,    r <= 0,
//! ```
//!
//! and the space of histories carries the sup norm over channels and window
//! offsets. A trajectory extends a history forward under the recurrence
//!
//! ```text
//! x_i(m+1) = c_i(m) x_i(m - tau) + h_i(m, window(x, m)),
//! ```
//!
//! where `window(x, m)` is the history formed by the samples x(m+j),
//! j = r..0. The window start must satisfy `r <= -tau` so the leakage term
//! always falls inside the window.

use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Errors from state construction and indexing.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum StateError {
    #[error("state has {got} channels, expected {expected}")]
    ChannelMismatch { expected: usize, got: usize },
    #[error("window starts at {got}, expected {expected}")]
    WindowMismatch { expected: i64, got: i64 },
    #[error("channel {channel} carries {got} samples, window [{start}, 0] needs {need}")]
    BadWindow {
        channel: usize,
        got: usize,
        need: usize,
        start: i64,
    },
    #[error("at least one channel is required")]
    NoChannels,
    #[error("window start {start} must be <= 0 and <= -leakage delay ({delay})")]
    WindowTooShort { start: i64, delay: u32 },
    #[error("non-finite sample {value} at channel {channel}, offset {offset}")]
    NonFinite {
        channel: usize,
        offset: i64,
        value: f64,
    },
    #[error("index {index} outside [{lo}, {hi}]")]
    OutOfRange { index: i64, lo: i64, hi: i64 },
    #[error("weight {value} at channel {channel} must be positive and finite")]
    BadWeight { channel: usize, value: f64 },
}

/// A finite history: one sample per channel per window offset `r..=0`.
///
/// Sample `values[i][k]` holds channel `i` at offset `window_start + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryState {
    window_start: i64,
    values: Vec<Vec<f64>>,
}

impl HistoryState {
    /// Wraps per-channel sample rows. Every row must carry exactly
    /// `-window_start + 1` finite samples.
    pub fn new(window_start: i64, values: Vec<Vec<f64>>) -> Result<Self, StateError> {
        if values.is_empty() {
            return Err(StateError::NoChannels);
        }
        if window_start > 0 {
            return Err(StateError::WindowTooShort {
                start: window_start,
                delay: 0,
            });
        }
        let need = (-window_start + 1) as usize;
        for (channel, row) in values.iter().enumerate() {
            if row.len() != need {
                return Err(StateError::BadWindow {
                    channel,
                    got: row.len(),
                    need,
                    start: window_start,
                });
            }
            for (k, &value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(StateError::NonFinite {
                        channel,
                        offset: window_start + k as i64,
                        value,
                    });
                }
            }
        }
        Ok(HistoryState {
            window_start,
            values,
        })
    }

    /// The all-zero history.
    pub fn zero(channels: usize, window_start: i64) -> Result<Self, StateError> {
        let len = (-window_start.min(0) + 1) as usize;
        Self::new(window_start, vec![vec![0.0; len]; channels])
    }

    /// Builds a history by evaluating `f(channel, offset)` over the window.
    pub fn from_fn(
        channels: usize,
        window_start: i64,
        f: impl Fn(usize, i64) -> f64,
    ) -> Result<Self, StateError> {
        if window_start > 0 {
            return Err(StateError::WindowTooShort {
                start: window_start,
                delay: 0,
            });
        }
        let values = (0..channels)
            .map(|i| (window_start..=0).map(|j| f(i, j)).collect())
            .collect();
        Self::new(window_start, values)
    }

    pub fn channels(&self) -> usize {
        self.values.len()
    }

    pub fn window_start(&self) -> i64 {
        self.window_start
    }

    /// Number of samples per channel.
    pub fn window_len(&self) -> usize {
        (-self.window_start + 1) as usize
    }

    /// Sample of `channel` at `offset` in `window_start..=0`.
    ///
    /// Panics when the index falls outside the window; use [`Self::get`]
    /// for the checked form.
    pub fn value(&self, channel: usize, offset: i64) -> f64 {
        self.get(channel, offset)
            .unwrap_or_else(|e| panic!("history access: {e}"))
    }

    /// Checked sample access.
    pub fn get(&self, channel: usize, offset: i64) -> Result<f64, StateError> {
        if channel >= self.channels() {
            return Err(StateError::ChannelMismatch {
                expected: self.channels(),
                got: channel,
            });
        }
        if offset < self.window_start || offset > 0 {
            return Err(StateError::OutOfRange {
                index: offset,
                lo: self.window_start,
                hi: 0,
            });
        }
        Ok(self.values[channel][(offset - self.window_start) as usize])
    }

    /// Raw samples of one channel, ordered from `window_start` to `0`.
    pub fn samples(&self, channel: usize) -> &[f64] {
        &self.values[channel]
    }

    /// Sup norm: the largest absolute sample over all channels and offsets.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Sup-norm distance to another history on the same window shape.
    pub fn distance(&self, other: &Self) -> Result<f64, StateError> {
        if self.channels() != other.channels() {
            return Err(StateError::ChannelMismatch {
                expected: self.channels(),
                got: other.channels(),
            });
        }
        if self.window_start != other.window_start {
            return Err(StateError::WindowMismatch {
                expected: self.window_start,
                got: other.window_start,
            });
        }
        let mut d = 0.0f64;
        for (a, b) in self.values.iter().zip(&other.values) {
            for (x, y) in a.iter().zip(b) {
                d = d.max((x - y).abs());
            }
        }
        Ok(d)
    }

    /// Overwrites this window in place from a sample buffer, taking
    /// `window_len` consecutive samples per channel starting at `offset`.
    pub(crate) fn fill_from_samples(&mut self, samples: &[Vec<f64>], offset: usize) {
        let len = self.window_len();
        for (row, src) in self.values.iter_mut().zip(samples) {
            row.copy_from_slice(&src[offset..offset + len]);
        }
    }
}

/// Per-channel leakage coefficient stream `c_i(m)`.
pub type CoefficientFn = Arc<dyn Fn(usize, i64) -> f64 + Send + Sync>;

/// Functional part `h_i(m, window)`; Lipschitz in the window sup norm.
pub type NonlinearityFn = Arc<dyn Fn(usize, i64, &HistoryState) -> f64 + Send + Sync>;

/// A delay difference system
///
/// ```text
/// x_i(m+1) = c_i(m) x_i(m - leakage_delay) + h_i(m, window(x, m)).
/// ```
///
/// Closures are shared behind `Arc`, so the definition is cheap to clone and
/// safe to simulate from several threads at once.
#[derive(Clone)]
pub struct SystemDefinition {
    channels: usize,
    leakage_delay: u32,
    window_start: i64,
    leakage: CoefficientFn,
    nonlinearity: NonlinearityFn,
    period: Option<u32>,
}

impl SystemDefinition {
    /// Builds a system. Requires `channels >= 1` and
    /// `window_start <= -leakage_delay` so the leakage term stays inside
    /// the window.
    pub fn new(
        channels: usize,
        leakage_delay: u32,
        window_start: i64,
        leakage: CoefficientFn,
        nonlinearity: NonlinearityFn,
    ) -> Result<Self, StateError> {
        if channels == 0 {
            return Err(StateError::NoChannels);
        }
        if window_start > -(i64::from(leakage_delay)) {
            return Err(StateError::WindowTooShort {
                start: window_start,
                delay: leakage_delay,
            });
        }
        Ok(SystemDefinition {
            channels,
            leakage_delay,
            window_start,
            leakage,
            nonlinearity,
            period: None,
        })
    }

    /// Declares the coefficient period `omega >= 1`: all of `c_i`, `h_i`
    /// must satisfy `c_i(m + omega) = c_i(m)` and
    /// `h_i(m + omega, w) = h_i(m, w)`. Required by the period map.
    pub fn with_period(mut self, omega: u32) -> Self {
        assert!(omega >= 1, "period must be at least 1");
        self.period = Some(omega);
        self
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn leakage_delay(&self) -> u32 {
        self.leakage_delay
    }

    pub fn window_start(&self) -> i64 {
        self.window_start
    }

    pub fn period(&self) -> Option<u32> {
        self.period
    }

    /// Evaluates the leakage coefficient `c_i(m)`.
    pub fn leakage_at(&self, channel: usize, m: i64) -> f64 {
        (self.leakage)(channel, m)
    }

    /// Evaluates the functional part `h_i(m, window)`.
    pub fn nonlinearity_at(&self, channel: usize, m: i64, window: &HistoryState) -> f64 {
        (self.nonlinearity)(channel, m, window)
    }

    /// Change of variables `y_i = x_i / weights[i]` for positive finite
    /// weights: trajectories of the returned system are the componentwise
    /// weighted trajectories of this one (up to floating-point rounding).
    /// The leakage stream is unchanged; the functional part becomes
    /// `h_i(m, W u) / weights[i]` with `(W u)_j = weights[j] * u_j`.
    pub fn rescaled(&self, weights: &[f64]) -> Result<SystemDefinition, StateError> {
        if weights.len() != self.channels {
            return Err(StateError::ChannelMismatch {
                expected: self.channels,
                got: weights.len(),
            });
        }
        for (channel, &value) in weights.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(StateError::BadWeight { channel, value });
            }
        }
        let w = weights.to_vec();
        let inner = Arc::clone(&self.nonlinearity);
        let nonlinearity: NonlinearityFn = Arc::new(move |i, m, window: &HistoryState| {
            let values = window
                .values
                .iter()
                .zip(&w)
                .map(|(row, &wj)| row.iter().map(|v| v * wj).collect())
                .collect();
            let scaled = HistoryState {
                window_start: window.window_start,
                values,
            };
            inner(i, m, &scaled) / w[i]
        });
        Ok(SystemDefinition {
            channels: self.channels,
            leakage_delay: self.leakage_delay,
            window_start: self.window_start,
            leakage: Arc::clone(&self.leakage),
            nonlinearity,
            period: self.period,
        })
    }
}

impl fmt::Debug for SystemDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemDefinition")
            .field("channels", &self.channels)
            .field("leakage_delay", &self.leakage_delay)
            .field("window_start", &self.window_start)
            .field("period", &self.period)
            .finish_non_exhaustive()
    }
}

/// A simulated solution segment: samples `x_i(m)` for
/// `m = window_start ..= horizon`, together with the generating system.
#[derive(Debug, Clone)]
pub struct Trajectory {
    system: SystemDefinition,
    window_start: i64,
    horizon: i64,
    samples: Vec<Vec<f64>>,
}

impl Trajectory {
    pub(crate) fn from_parts(
        system: SystemDefinition,
        window_start: i64,
        horizon: i64,
        samples: Vec<Vec<f64>>,
    ) -> Self {
        Trajectory {
            system,
            window_start,
            horizon,
            samples,
        }
    }

    pub fn system(&self) -> &SystemDefinition {
        &self.system
    }

    pub fn channels(&self) -> usize {
        self.samples.len()
    }

    pub fn window_start(&self) -> i64 {
        self.window_start
    }

    /// Largest time index carried by the trajectory.
    pub fn horizon(&self) -> i64 {
        self.horizon
    }

    /// Sample `x_channel(m)`, `m` in `window_start ..= horizon`.
    ///
    /// Panics outside that range; use [`Self::get`] for the checked form.
    pub fn value(&self, channel: usize, m: i64) -> f64 {
        self.get(channel, m)
            .unwrap_or_else(|e| panic!("trajectory access: {e}"))
    }

    /// Checked sample access.
    pub fn get(&self, channel: usize, m: i64) -> Result<f64, StateError> {
        if channel >= self.channels() {
            return Err(StateError::ChannelMismatch {
                expected: self.channels(),
                got: channel,
            });
        }
        if m < self.window_start || m > self.horizon {
            return Err(StateError::OutOfRange {
                index: m,
                lo: self.window_start,
                hi: self.horizon,
            });
        }
        Ok(self.samples[channel][(m - self.window_start) as usize])
    }

    /// Raw samples of one channel, ordered from `window_start` to `horizon`.
    pub fn samples(&self, channel: usize) -> &[f64] {
        &self.samples[channel]
    }

    /// The history `window(x, m)`: samples x(m+j) for j = window_start..0.
    /// Defined for `0 <= m <= horizon`.
    pub fn window(&self, m: i64) -> Result<HistoryState, StateError> {
        if m < 0 || m > self.horizon {
            return Err(StateError::OutOfRange {
                index: m,
                lo: 0,
                hi: self.horizon,
            });
        }
        let len = (-self.window_start + 1) as usize;
        let base = m as usize;
        let values = self
            .samples
            .iter()
            .map(|row| row[base..base + len].to_vec())
            .collect();
        // Samples come from a finished simulation, so they are finite.
        Ok(HistoryState {
            window_start: self.window_start,
            values,
        })
    }
}
