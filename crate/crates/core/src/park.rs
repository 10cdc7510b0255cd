//! Power-invariant Park and Clarke transforms, their rotation matrices, the
//! cylindrical interface between dq frames spinning at different speeds, and
//! the rotation of an arbitrary attitude matrix.
//!
//! Row order follows the sine-first convention: the d axis is aligned with
//! `sin(theta)`, the q axis with `cos(theta)`, and the third row is the
//! zero-sequence axis.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::geometry::{PhaseVector, SquareMatrix};

/// Phase displacement of a three-phase system, 2π/3.
pub const ALPHA: f64 = 2.0 * PI / 3.0;

/// Orthonormality slack accepted on attitude-matrix inputs.
pub const ATTITUDE_ORTHO_TOL: f64 = 1e-8;

/// Phase angles of a generator rotor and its terminal bus, both measured
/// against the same reference rotating at the nominal frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylindricalAngles {
    /// Bus-voltage phase angle (rad).
    pub theta_s: f64,
    /// Rotor angle (rad).
    pub delta_r: f64,
    /// Bus-voltage angular frequency (rad/s).
    pub omega_s: f64,
    /// Rotor angular speed (rad/s).
    pub omega_r: f64,
}

/// Integrates the Park angular speed with the trapezoidal rule.
///
/// Returns the unwrapped angle at every sample; the first entry is `theta0`.
pub fn park_angle(omega: &[f64], dt: f64, theta0: f64) -> Result<Vec<f64>> {
    if omega.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let mut out = Vec::with_capacity(omega.len());
    // compensated sum: long series accumulate many small increments
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    out.push(theta0);
    for w in omega.windows(2) {
        let inc = 0.5 * dt * (w[0] + w[1]) - carry;
        let next = sum + inc;
        carry = (next - sum) - inc;
        sum = next;
        out.push(theta0 + sum);
    }
    Ok(out)
}

pub fn park_matrix(theta: f64) -> SquareMatrix {
    let k = (2.0_f64 / 3.0).sqrt();
    let angles = [theta, theta - ALPHA, theta + ALPHA];
    let z = k * FRAC_1_SQRT_2;
    let mut data = Vec::with_capacity(9);
    data.extend(angles.iter().map(|a| k * a.sin()));
    data.extend(angles.iter().map(|a| k * a.cos()));
    data.extend([z; 3]);
    SquareMatrix::from_row_major(3, data).expect("3x3 finite")
}

/// Stationary alpha-beta-zero frame: the Park matrix frozen at zero angle.
pub fn clarke_matrix() -> SquareMatrix {
    park_matrix(0.0)
}

/// `v_dqo = P(theta) v_abc`
pub fn park_apply(theta: f64, v_abc: &PhaseVector) -> Result<PhaseVector> {
    park_matrix(theta).mul_vec(v_abc)
}

/// Ω_P = P' P^T for a Park frame spinning at `omega`.
pub fn park_rotation(omega: f64) -> SquareMatrix {
    let mut m = SquareMatrix::zeros(3);
    m.set(0, 1, omega);
    m.set(1, 0, -omega);
    m
}

/// Park transform of the time derivative of the phase quantity:
/// `P v'_abc = v'_dqo + Ω_P^T v_dqo`.
pub fn dq_derivative(v_dqo_dot: &PhaseVector, omega: f64, v_dqo: &PhaseVector) -> Result<PhaseVector> {
    let rot = park_rotation(omega).transpose().mul_vec(v_dqo)?;
    if rot.dim() != v_dqo_dot.dim() {
        return Err(Error::DimensionMismatch {
            left: v_dqo_dot.dim(),
            right: rot.dim(),
        });
    }
    Ok(v_dqo_dot + &rot)
}

/// Change of coordinates from the generator dq frame to the network dq frame.
///
/// Equal to `P(theta_ref + theta_s) P^T(theta_ref + delta_r)` for any common
/// reference angle.
pub fn cylindrical_frame(angles: &CylindricalAngles) -> SquareMatrix {
    let d = angles.theta_s - angles.delta_r;
    let (s, c) = d.sin_cos();
    SquareMatrix::from_row_major(3, vec![c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0])
        .expect("3x3 finite")
}

/// Ω_C = C' C^T, identical to `park_rotation(omega_s) - park_rotation(omega_r)`.
pub fn cylindrical_rotation(omega_s: f64, omega_r: f64) -> SquareMatrix {
    park_rotation(omega_s - omega_r)
}

/// Rotation Ω_A = A' A^T of a sampled attitude matrix at `index`, with A'
/// from a central difference. End samples have no estimate.
pub fn attitude_rotation(path: &[SquareMatrix], index: usize, dt: f64) -> Result<SquareMatrix> {
    if index == 0 || index + 1 >= path.len() {
        return Err(Error::BoundaryIndex {
            index,
            len: path.len(),
        });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let (prev, cur, next) = (&path[index - 1], &path[index], &path[index + 1]);
    for m in [prev, cur, next] {
        let violation = m.orthonormality_violation();
        if violation > ATTITUDE_ORTHO_TOL {
            return Err(Error::NotOrthonormal { violation });
        }
    }
    let deriv = next.sub(prev)?.scaled(0.5 / dt);
    deriv.mul_transpose(cur)
}
