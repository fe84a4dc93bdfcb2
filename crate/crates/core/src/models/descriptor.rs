//! Periodic coefficient streams with exact supremum bounds.
//!
//! Model coefficients are described symbolically so that certificates can
//! bound them exactly while the engine samples them in `f64`. Every
//! descriptor is periodic; evaluation reduces the time index modulo the
//! period first, which keeps sampled streams bitwise periodic.

use super::ModelError;
use crate::rational::{format_rat, rat_int, rat_to_f64, Rat};
use num_traits::{Signed, ToPrimitive, Zero};

/// A periodic scalar stream `m -> value`.
#[derive(Debug, Clone, PartialEq)]
pub enum Descriptor {
    /// Constant value.
    Constant(Rat),
    /// Cyclic table; period is the table length.
    Table(Vec<Rat>),
    /// `amplitude * cos(2 pi m / period)`.
    Cosine { amplitude: Rat, period: u32 },
    /// `amplitude * sin(2 pi m / period)`.
    Sine { amplitude: Rat, period: u32 },
    /// `base + delta * (-1)^m`; period 2.
    Alternating { base: Rat, delta: Rat },
}

impl Descriptor {
    pub fn zero() -> Self {
        Descriptor::Constant(Rat::zero())
    }

    pub fn constant_int(v: i64) -> Self {
        Descriptor::Constant(rat_int(v))
    }

    /// Checks structural validity (non-empty tables, positive periods).
    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            Descriptor::Table(values) if values.is_empty() => Err(ModelError::BadDescriptor(
                "table descriptor needs at least one value".into(),
            )),
            Descriptor::Cosine { period, .. } | Descriptor::Sine { period, .. } if *period == 0 => {
                Err(ModelError::BadDescriptor(
                    "trigonometric descriptor needs period >= 1".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    /// Fundamental period of the stream.
    pub fn period(&self) -> u32 {
        match self {
            Descriptor::Constant(_) => 1,
            Descriptor::Table(values) => values.len() as u32,
            Descriptor::Cosine { period, .. } | Descriptor::Sine { period, .. } => *period,
            Descriptor::Alternating { .. } => 2,
        }
    }

    /// Exact value at `m` when the stream is rational-valued (everything
    /// except the trigonometric kinds).
    pub fn rational_value(&self, m: i64) -> Option<Rat> {
        match self {
            Descriptor::Constant(v) => Some(v.clone()),
            Descriptor::Table(values) => {
                let idx = m.rem_euclid(values.len() as i64) as usize;
                Some(values[idx].clone())
            }
            Descriptor::Alternating { base, delta } => Some(if m.rem_euclid(2) == 0 {
                base + delta
            } else {
                base - delta
            }),
            _ => None,
        }
    }

    /// Sampled value at time `m`.
    pub fn value(&self, m: i64) -> f64 {
        match self {
            Descriptor::Cosine { amplitude, period } => {
                let phase = m.rem_euclid(i64::from(*period)) as f64;
                rat_to_f64(amplitude) * (std::f64::consts::TAU * phase / f64::from(*period)).cos()
            }
            Descriptor::Sine { amplitude, period } => {
                let phase = m.rem_euclid(i64::from(*period)) as f64;
                rat_to_f64(amplitude) * (std::f64::consts::TAU * phase / f64::from(*period)).sin()
            }
            other => rat_to_f64(&other.rational_value(m).expect("rational kinds covered")),
        }
    }

    /// Largest `|value(m)|` over one period of integer samples.
    pub fn sampled_sup(&self) -> f64 {
        (0..i64::from(self.period()))
            .map(|m| self.value(m).abs())
            .fold(0.0, f64::max)
    }

    /// Exact upper bound on `sup_m |value(m)|`: the amplitude for the
    /// trigonometric kinds (attained only when the peak falls on an integer
    /// sample), the exact maximum otherwise.
    pub fn analytic_sup(&self) -> Rat {
        match self {
            Descriptor::Constant(v) => v.abs(),
            Descriptor::Table(values) => values
                .iter()
                .map(|v| v.abs())
                .max()
                .expect("validated non-empty"),
            Descriptor::Cosine { amplitude, .. } | Descriptor::Sine { amplitude, .. } => {
                amplitude.abs()
            }
            Descriptor::Alternating { base, delta } => {
                (base + delta).abs().max((base - delta).abs())
            }
        }
    }

    /// True when the stream is identically zero.
    pub fn is_zero(&self) -> bool {
        self.analytic_sup().is_zero()
    }
}

/// A nonnegative-integer-valued periodic stream used for term delays.
///
/// Built from a rational-valued [`Descriptor`] whose samples over one period
/// are all nonnegative integers; the samples are frozen at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayDescriptor {
    samples: Vec<u32>,
}

impl DelayDescriptor {
    pub fn new(source: Descriptor) -> Result<Self, ModelError> {
        source.validate()?;
        if matches!(source, Descriptor::Cosine { .. } | Descriptor::Sine { .. }) {
            return Err(ModelError::BadDelay {
                value: "trigonometric".into(),
                m: 0,
            });
        }
        let mut samples = Vec::with_capacity(source.period() as usize);
        for m in 0..i64::from(source.period()) {
            let v = source
                .rational_value(m)
                .expect("trigonometric kinds rejected above");
            if !v.is_integer() || v.is_negative() {
                return Err(ModelError::BadDelay {
                    value: format_rat(&v),
                    m,
                });
            }
            let as_u32 = v
                .to_integer()
                .to_u32()
                .ok_or_else(|| ModelError::BadDelay {
                    value: format_rat(&v),
                    m,
                })?;
            samples.push(as_u32);
        }
        Ok(DelayDescriptor { samples })
    }

    pub fn constant(delay: u32) -> Self {
        DelayDescriptor {
            samples: vec![delay],
        }
    }

    pub fn period(&self) -> u32 {
        self.samples.len() as u32
    }

    pub fn delay_at(&self, m: i64) -> u32 {
        self.samples[m.rem_euclid(self.samples.len() as i64) as usize]
    }

    pub fn max_delay(&self) -> u32 {
        *self
            .samples
            .iter()
            .max()
            .expect("non-empty by construction")
    }
}
