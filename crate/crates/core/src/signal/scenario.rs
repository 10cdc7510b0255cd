//! Declarative multi-phase waveforms with closed-form time derivatives.
//!
//! Phase `h` of a scenario is
//!
//! ```text
//! v_h(t) = g_h A(t) [ sin(psi_h) + sum_m w_{m,h} sin(m psi_h) ],   psi_h = theta(t) + phi_h
//! ```
//!
//! where `A` is the common amplitude law, `g_h` a per-phase gain, `theta` the
//! integral of the frequency law plus `theta0`, and `phi_h` the phase offset.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

use crate::error::{Error, Result};
use crate::geometry::PhaseVector;
use crate::park::ALPHA;

/// Nominal angular frequency, 2π·60 rad/s.
pub const OMEGA_O: f64 = 2.0 * PI * 60.0;

/// Phase displacement of a six-phase system, 2π/6.
pub const BETA: f64 = 2.0 * PI / 6.0;

/// Nominal amplitude of the built-in scenarios, 15 kV.
pub const V_NOMINAL: f64 = 15e3;

pub const BUILTIN_NAMES: [&str; 7] = ["E1", "E2", "E3", "E4", "E5", "E6", "SIX"];

#[derive(Debug, Clone, PartialEq)]
pub enum AmplitudeLaw {
    Constant(f64),
    /// `base + depth * sin(rate * t)`, rate in rad/s.
    Sinusoidal { base: f64, depth: f64, rate: f64 },
    /// `base` outside `[start, end]`, `floor * base` inside, with quintic
    /// smoothstep transitions of length `ramp` at both edges (inside the window).
    Dip {
        base: f64,
        floor: f64,
        start: f64,
        end: f64,
        ramp: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrequencyLaw {
    /// Constant angular frequency (rad/s).
    Constant(f64),
    /// `base + amplitude * sin(2π freq_hz t)` (rad/s).
    Sinusoidal { base: f64, amplitude: f64, freq_hz: f64 },
    /// `start + rate * t` (rad/s).
    Ramp { start: f64, rate: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Harmonic {
    pub order: u32,
    /// Relative amplitude per phase.
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveformScenario {
    pub n_phases: usize,
    pub amplitude_law: AmplitudeLaw,
    /// Per-phase amplitude gains.
    pub gains: Vec<f64>,
    pub frequency_law: FrequencyLaw,
    pub phase_offsets: Vec<f64>,
    pub harmonics: Vec<Harmonic>,
    pub theta0: f64,
}

fn smoothstep(x: f64, order: usize) -> f64 {
    match order {
        0 => x * x * x * (10.0 + x * (-15.0 + 6.0 * x)),
        1 => 30.0 * x * x * (1.0 - x) * (1.0 - x),
        2 => 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x),
        3 => 60.0 * (1.0 - 6.0 * x + 6.0 * x * x),
        _ => unreachable!("order <= 3"),
    }
}

impl AmplitudeLaw {
    /// `[A, A', A'', A''']` at `t`.
    pub fn derivatives(&self, t: f64) -> [f64; 4] {
        match *self {
            AmplitudeLaw::Constant(a) => [a, 0.0, 0.0, 0.0],
            AmplitudeLaw::Sinusoidal { base, depth, rate } => {
                let mut out = [0.0; 4];
                for (k, o) in out.iter_mut().enumerate() {
                    *o = depth * rate.powi(k as i32) * (rate * t + k as f64 * FRAC_PI_2).sin();
                }
                out[0] += base;
                out
            }
            AmplitudeLaw::Dip {
                base,
                floor,
                start,
                end,
                ramp,
            } => {
                // depth profile D(t) in [0, 1] and its derivatives
                let mut d = [0.0; 4];
                if t >= start && t <= end {
                    if t < start + ramp {
                        let x = (t - start) / ramp;
                        for (k, dk) in d.iter_mut().enumerate() {
                            *dk = smoothstep(x, k) / ramp.powi(k as i32);
                        }
                    } else if t > end - ramp {
                        let x = (end - t) / ramp;
                        for (k, dk) in d.iter_mut().enumerate() {
                            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                            *dk = sign * smoothstep(x, k) / ramp.powi(k as i32);
                        }
                    } else {
                        d[0] = 1.0;
                    }
                }
                let depth = base * (1.0 - floor);
                [base - depth * d[0], -depth * d[1], -depth * d[2], -depth * d[3]]
            }
        }
    }
}

impl FrequencyLaw {
    /// `[theta - theta0, theta', theta'', theta''']` at `t`.
    pub fn angle_derivatives(&self, t: f64) -> [f64; 4] {
        match *self {
            FrequencyLaw::Constant(w) => [w * t, w, 0.0, 0.0],
            FrequencyLaw::Sinusoidal {
                base,
                amplitude,
                freq_hz,
            } => {
                let m = 2.0 * PI * freq_hz;
                let (s, c) = (m * t).sin_cos();
                [
                    base * t + amplitude * (1.0 - c) / m,
                    base + amplitude * s,
                    amplitude * m * c,
                    -amplitude * m * m * s,
                ]
            }
            FrequencyLaw::Ramp { start, rate } => {
                [start * t + 0.5 * rate * t * t, start + rate * t, rate, 0.0]
            }
        }
    }

    pub fn omega(&self, t: f64) -> f64 {
        self.angle_derivatives(t)[1]
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    match (n, k) {
        (_, 0) => 1.0,
        (n, k) if k == n => 1.0,
        (2, 1) => 2.0,
        (3, 1) | (3, 2) => 3.0,
        _ => unreachable!("order <= 3"),
    }
}

impl WaveformScenario {
    /// Balanced three-phase set with the positive (abc) sequence.
    pub fn balanced(amplitude_law: AmplitudeLaw, frequency_law: FrequencyLaw, theta0: f64) -> Self {
        Self {
            n_phases: 3,
            amplitude_law,
            gains: vec![1.0; 3],
            frequency_law,
            phase_offsets: vec![0.0, -ALPHA, ALPHA],
            harmonics: Vec::new(),
            theta0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_phases;
        if n < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 phases, got {n}")));
        }
        if self.gains.len() != n || self.phase_offsets.len() != n {
            return Err(Error::InvalidParameter(format!(
                "per-phase gains and offsets must have {n} entries"
            )));
        }
        if self.gains.iter().any(|g| !(*g >= 0.0)) {
            return Err(Error::InvalidParameter("phase gains must be non-negative".into()));
        }
        let amps_ok = match self.amplitude_law {
            AmplitudeLaw::Constant(a) => a >= 0.0,
            AmplitudeLaw::Sinusoidal { base, depth, .. } => base - depth.abs() >= 0.0,
            AmplitudeLaw::Dip {
                base,
                floor,
                start,
                end,
                ramp,
            } => base >= 0.0 && floor >= 0.0 && ramp > 0.0 && end - start >= 2.0 * ramp,
        };
        if !amps_ok {
            return Err(Error::InvalidParameter("amplitude law must stay non-negative".into()));
        }
        for h in &self.harmonics {
            if h.order < 2 {
                return Err(Error::InvalidParameter(format!(
                    "harmonic order must be at least 2, got {}",
                    h.order
                )));
            }
            if h.weights.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "harmonic weights must have {n} entries"
                )));
            }
        }
        Ok(())
    }

    /// Closed-form `deriv_order`-th time derivative at `t` (order 0..=3).
    pub fn evaluate(&self, t: f64, deriv_order: usize) -> Result<PhaseVector> {
        if deriv_order > 3 {
            return Err(Error::InvalidParameter(format!(
                "closed-form derivatives are available up to order 3, got {deriv_order}"
            )));
        }
        let amp = self.amplitude_law.derivatives(t);
        let ang = self.frequency_law.angle_derivatives(t);
        let (w1, w2, w3) = (ang[1], ang[2], ang[3]);

        let values = (0..self.n_phases)
            .map(|h| {
                let psi = self.theta0 + ang[0] + self.phase_offsets[h];
                // S^(j)(psi) for j = 0..3
                let mut s = [0.0; 4];
                for (j, sj) in s.iter_mut().enumerate() {
                    let shift = j as f64 * FRAC_PI_2;
                    *sj = (psi + shift).sin();
                    for harm in &self.harmonics {
                        let m = harm.order as f64;
                        *sj += harm.weights[h] * m.powi(j as i32) * (m * psi + shift).sin();
                    }
                }
                // derivatives of g(t) = S(psi(t))
                let g = [
                    s[0],
                    s[1] * w1,
                    s[2] * w1 * w1 + s[1] * w2,
                    s[3] * w1 * w1 * w1 + 3.0 * s[2] * w1 * w2 + s[1] * w3,
                ];
                let f: f64 = (0..=deriv_order)
                    .map(|k| binomial(deriv_order, k) * amp[k] * g[deriv_order - k])
                    .sum();
                self.gains[h] * f
            })
            .collect();
        PhaseVector::new(values)
    }
}

/// One of the named reference scenarios (E1 to E6 and SIX).
pub fn builtin_scenario(name: &str) -> Result<WaveformScenario> {
    let v = V_NOMINAL;
    let theta0 = FRAC_PI_6;
    let base = WaveformScenario::balanced(
        AmplitudeLaw::Constant(v),
        FrequencyLaw::Constant(OMEGA_O),
        theta0,
    );
    let sc = match name.to_ascii_uppercase().as_str() {
        "E1" => base,
        "E2" => WaveformScenario {
            frequency_law: FrequencyLaw::Constant(1.2 * OMEGA_O),
            ..base
        },
        "E3" => WaveformScenario {
            amplitude_law: AmplitudeLaw::Sinusoidal {
                base: v,
                depth: 3e3,
                rate: 0.2 * OMEGA_O,
            },
            ..base
        },
        "E4" => WaveformScenario {
            frequency_law: FrequencyLaw::Sinusoidal {
                base: OMEGA_O,
                amplitude: 2.0 * PI,
                freq_hz: 10.0,
            },
            ..base
        },
        "E5" => WaveformScenario {
            gains: vec![1.0, 1.2, 0.8],
            ..base
        },
        "E6" => WaveformScenario {
            harmonics: vec![Harmonic {
                order: 5,
                weights: vec![0.1, 0.2, 0.1],
            }],
            ..base
        },
        "SIX" => WaveformScenario {
            n_phases: 6,
            amplitude_law: AmplitudeLaw::Constant(v),
            gains: vec![1.0; 6],
            frequency_law: FrequencyLaw::Constant(OMEGA_O),
            phase_offsets: (0..6).map(|h| -(h as f64) * BETA).collect(),
            harmonics: Vec::new(),
            theta0: 0.0,
        },
        _ => {
            return Err(Error::UnknownScenario {
                name: name.to_string(),
            })
        }
    };
    Ok(sc)
}
