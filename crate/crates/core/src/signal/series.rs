use crate::error::{Error, Result};
use crate::geometry::PhaseVector;

use super::scenario::WaveformScenario;

/// Uniformly sampled multi-phase series.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSeries {
    pub dt: f64,
    pub t0: f64,
    pub samples: Vec<PhaseVector>,
    /// Closed-form derivative channels; `channels[k]` holds order `k + 1`.
    pub channels: Vec<Vec<PhaseVector>>,
}

impl SampledSeries {
    pub fn new(t0: f64, dt: f64, samples: Vec<PhaseVector>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        if let Some(first) = samples.first() {
            let dim = first.dim();
            if let Some(bad) = samples.iter().find(|s| s.dim() != dim) {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: bad.dim(),
                });
            }
        }
        Ok(Self {
            dt,
            t0,
            samples,
            channels: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples.first().map_or(0, PhaseVector::dim)
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// Largest sample magnitude, used to scale degeneracy thresholds.
    pub fn max_magnitude(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.norm()))
    }
}

/// Samples a scenario on `t0, t0 + dt, ...` up to and including `t0 + duration`.
pub fn sample_series(
    scenario: &WaveformScenario,
    t0: f64,
    duration: f64,
    dt: f64,
    with_analytic: bool,
) -> Result<SampledSeries> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "duration must be positive, got {duration}"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    scenario.validate()?;
    // tolerate representation error in duration/dt so 0.1/1e-4 gives 1001 samples
    let steps = (duration / dt * (1.0 + 1e-12)).floor() as usize;
    let times: Vec<f64> = (0..=steps).map(|k| t0 + k as f64 * dt).collect();
    let samples = times
        .iter()
        .map(|&t| scenario.evaluate(t, 0))
        .collect::<Result<Vec<_>>>()?;
    let mut series = SampledSeries::new(t0, dt, samples)?;
    if with_analytic {
        series.channels = (1..=3)
            .map(|order| times.iter().map(|&t| scenario.evaluate(t, order)).collect())
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(series)
}

/// Derivative estimate on the sample grid of its source; samples within
/// `order` steps of either end have no estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedSeries {
    pub dt: f64,
    pub t0: f64,
    pub order: usize,
    pub values: Vec<Option<PhaseVector>>,
}

fn central_difference(values: &[Option<PhaseVector>], dt: f64) -> Vec<Option<PhaseVector>> {
    let n = values.len();
    (0..n)
        .map(|k| {
            if k == 0 || k + 1 >= n {
                return None;
            }
            match (&values[k - 1], &values[k + 1]) {
                (Some(a), Some(b)) => Some((b - a).scaled(0.5 / dt)),
                _ => None,
            }
        })
        .collect()
}

/// Repeated central differencing, `order` passes (1 to 3 without
/// `allow_high_order`).
pub fn differentiate_with(series: &SampledSeries, order: usize, allow_high_order: bool) -> Result<DerivedSeries> {
    if order == 0 || (order > 3 && !allow_high_order) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference order must be in 1..=3, got {order} (orders above 3 amplify noise and need explicit opt-in)"
        )));
    }
    let need = 2 * order + 1;
    if series.len() < need {
        return Err(Error::TooFewSamples {
            got: series.len(),
            need,
        });
    }
    let mut values: Vec<Option<PhaseVector>> = series.samples.iter().cloned().map(Some).collect();
    for _ in 0..order {
        values = central_difference(&values, series.dt);
    }
    Ok(DerivedSeries {
        dt: series.dt,
        t0: series.t0,
        order,
        values,
    })
}

pub fn differentiate(series: &SampledSeries, order: usize) -> Result<DerivedSeries> {
    differentiate_with(series, order, false)
}

/// How derivatives are obtained for the analysis pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeSource {
    /// Closed-form channels attached to the series.
    Analytic,
    /// Repeated central differencing of the samples.
    FiniteDifference { allow_high_order: bool },
}

/// `[v, v', ..., v^(max_order)]` per sample, `None` where any order is missing.
pub fn derivative_stacks(
    series: &SampledSeries,
    max_order: usize,
    source: DerivativeSource,
) -> Result<Vec<Option<Vec<PhaseVector>>>> {
    let n = series.len();
    let mut orders: Vec<Vec<Option<PhaseVector>>> = Vec::with_capacity(max_order);
    match source {
        DerivativeSource::Analytic => {
            if series.channels.len() < max_order {
                return Err(Error::InvalidParameter(format!(
                    "series carries {} analytic derivative channels, need {max_order}",
                    series.channels.len()
                )));
            }
            for ch in &series.channels[..max_order] {
                orders.push(ch.iter().cloned().map(Some).collect());
            }
        }
        DerivativeSource::FiniteDifference { allow_high_order } => {
            for order in 1..=max_order {
                orders.push(differentiate_with(series, order, allow_high_order)?.values);
            }
        }
    }
    Ok((0..n)
        .map(|k| {
            let mut stack = Vec::with_capacity(max_order + 1);
            stack.push(series.samples[k].clone());
            for o in &orders {
                stack.push(o[k].clone()?);
            }
            Some(stack)
        })
        .collect())
}
