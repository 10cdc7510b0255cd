//! Three-dimensional Frenet frame of a voltage trajectory.
//!
//! The voltage is read as the velocity of a space curve (the flux linkage), so
//! the curve speed is `|v|` and the frame, curvature and torsion follow from
//! `v`, `v'` and `v''`:
//!
//! ```text
//! T = v / |v|        B = (v x v') / |v x v'|        N = B x T
//! kappa = |v x v'| / |v|^3
//! tau   = v . (v' x v'') / |v x v'|^2
//! omega_kappa = |v| kappa      omega_tau = |v| tau
//! ```
//!
//! Frame matrices stack `T`, `N`, `B` as rows, so `F v` gives the tangent,
//! normal and binormal components of `v`.

use crate::error::{Error, Result};
use crate::geometry::{cross, dot, PhaseVector, SquareMatrix};
use crate::park::park_matrix;

/// Relative tolerance of the magnitude threshold (fraction of nominal |v|).
pub const EPS_V_REL: f64 = 1e-6;

/// Default relative threshold on `|v x v'| / (|v| |v'|)` below which the
/// curve is treated as straight and the normal is undefined.
pub const EPS_KAPPA: f64 = 1e-9;

/// Orthonormality slack accepted on frame inputs.
pub const FRAME_ORTHO_TOL: f64 = 1e-10;

/// Phase quantity and its time derivatives at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeBundle {
    pub v: PhaseVector,
    pub v1: PhaseVector,
    pub v2: PhaseVector,
    pub v3: Option<PhaseVector>,
}

impl DerivativeBundle {
    pub fn new(
        v: PhaseVector,
        v1: PhaseVector,
        v2: PhaseVector,
        v3: Option<PhaseVector>,
    ) -> Result<Self> {
        let dim = v.dim();
        for other in [Some(&v1), Some(&v2), v3.as_ref()].into_iter().flatten() {
            if other.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: other.dim(),
                });
            }
            if !other.is_finite() {
                return Err(Error::InvalidVector("non-finite derivative".into()));
            }
        }
        if !v.is_finite() {
            return Err(Error::InvalidVector("non-finite value".into()));
        }
        Ok(Self { v, v1, v2, v3 })
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }
}

/// Degeneracy thresholds for [`frenet3`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetTolerances {
    /// Absolute magnitude (same unit as `v`) at or below which nothing is defined.
    pub eps_v: f64,
    /// Relative straightness threshold, see [`EPS_KAPPA`].
    pub eps_kappa: f64,
}

impl FrenetTolerances {
    /// Thresholds scaled to a nominal voltage magnitude.
    pub fn for_nominal(nominal_magnitude: f64) -> Self {
        Self {
            eps_v: EPS_V_REL * nominal_magnitude.abs(),
            eps_kappa: EPS_KAPPA,
        }
    }
}

impl Default for FrenetTolerances {
    fn default() -> Self {
        Self {
            eps_v: 0.0,
            eps_kappa: EPS_KAPPA,
        }
    }
}

/// Frenet frame and invariants at one sample.
///
/// When `defined` is false the axes that could not be formed are zero
/// vectors: all three if `|v|` fell below the magnitude threshold, only `N`
/// and `B` if the curve is locally straight.
#[derive(Debug, Clone, PartialEq)]
pub struct FrenetState {
    pub tangent: PhaseVector,
    pub normal: PhaseVector,
    pub binormal: PhaseVector,
    /// Curve speed, equal to the voltage magnitude.
    pub s_dot: f64,
    pub kappa: f64,
    pub tau: f64,
    pub omega_kappa: f64,
    pub omega_tau: f64,
    /// `omega_tau T + omega_kappa B`, in phase coordinates.
    pub darboux: PhaseVector,
    pub defined: bool,
}

impl FrenetState {
    fn undefined(s_dot: f64, tangent: PhaseVector, omega_kappa: f64) -> Self {
        Self {
            tangent,
            normal: PhaseVector::zeros(3),
            binormal: PhaseVector::zeros(3),
            s_dot,
            kappa: if s_dot > 0.0 { omega_kappa / s_dot } else { 0.0 },
            tau: 0.0,
            omega_kappa,
            omega_tau: 0.0,
            darboux: PhaseVector::zeros(3),
            defined: false,
        }
    }

    /// Whether at least the tangent is available.
    pub fn has_tangent(&self) -> bool {
        self.tangent.norm() > 0.0
    }

    /// Frame matrix with rows `T`, `N`, `B`.
    pub fn frame_matrix(&self) -> Option<SquareMatrix> {
        self.defined.then(|| {
            SquareMatrix::from_rows(&[
                self.tangent.clone(),
                self.normal.clone(),
                self.binormal.clone(),
            ])
            .expect("3x3 finite")
        })
    }

    /// Ω_F built from this sample's frequencies.
    pub fn omega_matrix(&self) -> SquareMatrix {
        frenet_rotation(self.omega_kappa, self.omega_tau)
    }
}

/// Frenet frame, curvature, torsion and frequencies from a derivative bundle.
///
/// Degenerate samples are reported through `defined = false`, not as errors;
/// the only error is a non-3-phase bundle.
pub fn frenet3(bundle: &DerivativeBundle, tol: &FrenetTolerances) -> Result<FrenetState> {
    if bundle.dim() != 3 {
        return Err(Error::CrossDimension { dim: bundle.dim() });
    }
    let v = &bundle.v;
    let s = v.norm();
    if s == 0.0 || s <= tol.eps_v {
        return Ok(FrenetState::undefined(s, PhaseVector::zeros(3), 0.0));
    }
    let tangent = v.scaled(1.0 / s);

    let w = cross(v, &bundle.v1)?;
    let w_norm = w.norm();
    let omega_kappa = w_norm / (s * s);
    if w_norm == 0.0 || w_norm <= tol.eps_kappa * s * bundle.v1.norm() {
        return Ok(FrenetState::undefined(s, tangent, omega_kappa));
    }

    let binormal = w.scaled(1.0 / w_norm);
    let normal = cross(&binormal, &tangent)?;
    let kappa = w_norm / (s * s * s);
    let tau = dot(v, &cross(&bundle.v1, &bundle.v2)?)? / (w_norm * w_norm);
    let omega_tau = s * tau;
    let darboux = &tangent.scaled(omega_tau) + &binormal.scaled(omega_kappa);

    Ok(FrenetState {
        tangent,
        normal,
        binormal,
        s_dot: s,
        kappa,
        tau,
        omega_kappa,
        omega_tau,
        darboux,
        defined: true,
    })
}

/// Ω_F: the skew matrix with `omega_kappa` on the (T,N) and `omega_tau` on
/// the (N,B) positions, so that `F' = Ω_F F`.
pub fn frenet_rotation(omega_kappa: f64, omega_tau: f64) -> SquareMatrix {
    let mut m = SquareMatrix::zeros(3);
    m.set(0, 1, omega_kappa);
    m.set(1, 0, -omega_kappa);
    m.set(1, 2, omega_tau);
    m.set(2, 1, -omega_tau);
    m
}

/// Components of `v` on the sample's own frame: `(|v|, 0, 0)` up to rounding.
pub fn frenet_apply(state: &FrenetState, v: &PhaseVector) -> Result<PhaseVector> {
    let f = state.frame_matrix().ok_or(Error::UndefinedFrame { s_dot: state.s_dot })?;
    f.mul_vec(v)
}

/// Frenet-Serret residual `max |F'_k - Ω_F,k F_k|` at every interior sample,
/// with `F'` from a central difference.
///
/// Entry `j` of the output belongs to sample `j + 1`.
pub fn frenet_serret_residual(
    frames: &[SquareMatrix],
    invariants: &[(f64, f64)],
    dt: f64,
) -> Result<Vec<f64>> {
    if frames.len() < 3 {
        return Err(Error::TooFewSamples {
            got: frames.len(),
            need: 3,
        });
    }
    if invariants.len() != frames.len() {
        return Err(Error::DimensionMismatch {
            left: frames.len(),
            right: invariants.len(),
        });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    for f in frames {
        let violation = f.orthonormality_violation();
        if violation > crate::park::ATTITUDE_ORTHO_TOL {
            return Err(Error::NotOrthonormal { violation });
        }
    }
    (1..frames.len() - 1)
        .map(|k| {
            let deriv = frames[k + 1].sub(&frames[k - 1])?.scaled(0.5 / dt);
            let (wk, wt) = invariants[k];
            let model = frenet_rotation(wk, wt).mul_mat(&frames[k])?;
            Ok(deriv.sub(&model)?.max_abs())
        })
        .collect()
}

/// Rotation term of the frame-transformed derivative.
///
/// For `w = F x` the transform of the speed satisfies
/// `F x' = w' + Ω_F^T w = w' + r x w`, with `r` the Darboux vector expressed
/// in frame coordinates, `(omega_tau, 0, omega_kappa)`. Returns `r x w`.
pub fn darboux_rotation(state: &FrenetState, w: &PhaseVector) -> Result<PhaseVector> {
    let f = state.frame_matrix().ok_or(Error::UndefinedFrame { s_dot: state.s_dot })?;
    let r_frame = f.mul_vec(&state.darboux)?;
    cross(&r_frame, w)
}

/// Ψ = P(theta) F^T: from a local Frenet frame to a network Park frame.
pub fn psi_frame(theta: f64, frame: &SquareMatrix) -> Result<SquareMatrix> {
    if frame.dim() != 3 {
        return Err(Error::DimensionMismatch {
            left: 3,
            right: frame.dim(),
        });
    }
    let violation = frame.orthonormality_violation();
    if violation > FRAME_ORTHO_TOL {
        return Err(Error::NotOrthonormal { violation });
    }
    park_matrix(theta).mul_transpose(frame)
}

/// Ω_Ψ = Ω_P - Ψ Ω_F Ψ^T.
pub fn psi_rotation(omega_p: f64, psi: &SquareMatrix, omega_f: &SquareMatrix) -> Result<SquareMatrix> {
    let violation = psi.orthonormality_violation();
    if violation > FRAME_ORTHO_TOL {
        return Err(Error::NotOrthonormal { violation });
    }
    let skew = omega_f.skew_violation();
    if skew > 1e-12 * omega_f.max_abs().max(1.0) {
        return Err(Error::NotSkewSymmetric { violation: skew });
    }
    let conj = psi.mul_mat(omega_f)?.mul_transpose(psi)?;
    crate::park::park_rotation(omega_p).sub(&conj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::skew_part_check;
    use crate::park::{park_apply, park_rotation, ALPHA};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    const OMEGA_O: f64 = 2.0 * PI * 60.0;
    const V: f64 = 15e3;

    fn balanced(theta: f64, omega: f64) -> DerivativeBundle {
        let ph = [theta, theta - ALPHA, theta + ALPHA];
        let v = PhaseVector::from(ph.map(|a| V * a.sin()));
        let v1 = PhaseVector::from(ph.map(|a| V * omega * a.cos()));
        let v2 = PhaseVector::from(ph.map(|a| -V * omega * omega * a.sin()));
        DerivativeBundle::new(v, v1, v2, None).unwrap()
    }

    fn helix(a: f64, b: f64, t: f64) -> DerivativeBundle {
        DerivativeBundle::new(
            PhaseVector::from([-a * t.sin(), a * t.cos(), b]),
            PhaseVector::from([-a * t.cos(), -a * t.sin(), 0.0]),
            PhaseVector::from([a * t.sin(), -a * t.cos(), 0.0]),
            None,
        )
        .unwrap()
    }

    #[test]
    fn balanced_voltage_frame_equals_park_matrix() {
        let theta = 0.37;
        let s = frenet3(&balanced(theta, OMEGA_O), &FrenetTolerances::default()).unwrap();
        assert!(s.defined);
        assert_abs_diff_eq!(s.omega_kappa, OMEGA_O, epsilon = 1e-9 * OMEGA_O);
        assert_abs_diff_eq!(s.omega_tau, 0.0, epsilon = 1e-9 * OMEGA_O);
        assert_abs_diff_eq!(s.s_dot, 1.5_f64.sqrt() * V, epsilon = 1e-9 * V);
        let diff = s.frame_matrix().unwrap().sub(&park_matrix(theta)).unwrap();
        assert!(diff.max_abs() < 1e-12);
    }

    #[test]
    fn helix_closed_form() {
        let (a, b) = (2.0, 0.5);
        let s = frenet3(&helix(a, b, 0.8), &FrenetTolerances::default()).unwrap();
        let den = a * a + b * b;
        assert_abs_diff_eq!(s.kappa, a / den, epsilon = 1e-14);
        assert_abs_diff_eq!(s.tau, b / den, epsilon = 1e-14);
    }

    #[test]
    fn helix_matches_finite_difference_frame_derivative() {
        // T' = omega_kappa N computed by differencing T along the curve
        let (a, b) = (1.3, 0.7);
        let h = 1e-5;
        let t0 = 0.4;
        let tol = FrenetTolerances::default();
        let at = |t| frenet3(&helix(a, b, t), &tol).unwrap();
        let (m, c, p) = (at(t0 - h), at(t0), at(t0 + h));
        let dt_vec = &p.tangent - &m.tangent;
        let fd_kappa_rate = dot(&dt_vec, &c.normal).unwrap() / (2.0 * h);
        let db = &p.binormal - &m.binormal;
        let fd_tau_rate = -dot(&db, &c.normal).unwrap() / (2.0 * h);
        assert_abs_diff_eq!(fd_kappa_rate, c.omega_kappa, epsilon = 1e-8);
        assert_abs_diff_eq!(fd_tau_rate, c.omega_tau, epsilon = 1e-8);
    }

    #[test]
    fn planar_curve_has_zero_torsion() {
        let b = DerivativeBundle::new(
            PhaseVector::from([1.0, 2.0, 0.0]),
            PhaseVector::from([-0.5, 0.3, 0.0]),
            PhaseVector::from([0.2, -1.1, 0.0]),
            None,
        )
        .unwrap();
        let s = frenet3(&b, &FrenetTolerances::default()).unwrap();
        assert!(s.defined);
        assert_eq!(s.tau, 0.0);
        assert_eq!(s.omega_tau, 0.0);
    }

    #[test]
    fn degenerate_samples_are_flagged() {
        let tol = FrenetTolerances::for_nominal(V);
        let zero = DerivativeBundle::new(
            PhaseVector::zeros(3),
            PhaseVector::from([1.0, 0.0, 0.0]),
            PhaseVector::zeros(3),
            None,
        )
        .unwrap();
        let s = frenet3(&zero, &tol).unwrap();
        assert!(!s.defined && !s.has_tangent());
        assert_eq!(s.s_dot, 0.0);

        let straight = DerivativeBundle::new(
            PhaseVector::from([1.0, 2.0, 3.0]),
            PhaseVector::from([2.0, 4.0, 6.0]),
            PhaseVector::zeros(3),
            None,
        )
        .unwrap();
        let s = frenet3(&straight, &tol).unwrap();
        assert!(!s.defined && s.has_tangent());
        assert!(s.kappa.abs() < 1e-12);
        assert!(frenet_apply(&s, &straight.v).is_err());

        let four = PhaseVector::new(vec![1.0; 4]).unwrap();
        let b4 = DerivativeBundle::new(four.clone(), four.clone(), four, None).unwrap();
        assert!(matches!(
            frenet3(&b4, &tol),
            Err(Error::CrossDimension { dim: 4 })
        ));
    }

    #[test]
    fn reversed_sequence_flips_binormal_only() {
        let theta = 1.1;
        let fwd = balanced(theta, OMEGA_O);
        let swap = |p: &PhaseVector| PhaseVector::from([p[0], p[2], p[1]]);
        let rev = DerivativeBundle::new(swap(&fwd.v), swap(&fwd.v1), swap(&fwd.v2), None).unwrap();
        let tol = FrenetTolerances::default();
        let a = frenet3(&fwd, &tol).unwrap();
        let b = frenet3(&rev, &tol).unwrap();
        assert_abs_diff_eq!(a.omega_kappa, b.omega_kappa, epsilon = 1e-9);
        assert!(b.omega_kappa > 0.0);
        let s3 = 1.0 / 3.0_f64.sqrt();
        for i in 0..3 {
            assert_abs_diff_eq!(a.binormal[i], s3, epsilon = 1e-12);
            assert_abs_diff_eq!(b.binormal[i], -s3, epsilon = 1e-12);
        }
    }

    #[test]
    fn frenet_apply_gives_dc_vector() {
        let bundle = balanced(0.2, OMEGA_O);
        let s = frenet3(&bundle, &FrenetTolerances::default()).unwrap();
        let w = frenet_apply(&s, &bundle.v).unwrap();
        assert_abs_diff_eq!(w[0], 1.5_f64.sqrt() * V, epsilon = 1e-9);
        assert!(w[1].abs() < 1e-10 * w[0]);
        assert!(w[2].abs() < 1e-10 * w[0]);
    }

    #[test]
    fn darboux_rotation_examples() {
        let bundle = balanced(0.6, OMEGA_O);
        let s = frenet3(&bundle, &FrenetTolerances::default()).unwrap();
        let w = PhaseVector::from([s.s_dot, 0.0, 0.0]);
        let r = darboux_rotation(&s, &w).unwrap();
        assert_abs_diff_eq!(r[0], 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r[1], s.omega_kappa * s.s_dot, epsilon = 1e-6);
        assert_abs_diff_eq!(r[2], 0.0, epsilon = 1e-6);

        // F v' = w' + r x w, with w' = 0 in steady state
        let fv1 = s.frame_matrix().unwrap().mul_vec(&bundle.v1).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(fv1[i], r[i], epsilon = 1e-9 * s.omega_kappa * s.s_dot);
        }

        let mut zero = s.clone();
        zero.darboux = PhaseVector::zeros(3);
        assert_eq!(darboux_rotation(&zero, &w).unwrap(), PhaseVector::zeros(3));
    }

    #[test]
    fn darboux_rotation_equals_transposed_omega() {
        let s = frenet3(&helix(1.7, -0.4, 2.3), &FrenetTolerances::default()).unwrap();
        let w = PhaseVector::from([0.3, -2.0, 1.4]);
        let r = darboux_rotation(&s, &w).unwrap();
        let expect = s.omega_matrix().transpose().mul_vec(&w).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(r[i], expect[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn transformed_derivative_matches_difference() {
        // F x' = w' + r x w along a helix frame, for an arbitrary curve x
        let (a, b, t, h): (f64, f64, f64, f64) = (1.3, 0.6, 0.9, 1e-5);
        let x = |t: f64| PhaseVector::from([t.cos() + t * t, (2.0 * t).sin(), 0.5 * t]);
        let x1 = PhaseVector::from([-t.sin() + 2.0 * t, 2.0 * (2.0 * t).cos(), 0.5]);
        let state = |t: f64| frenet3(&helix(a, b, t), &FrenetTolerances::default()).unwrap();
        let w = |t: f64| state(t).frame_matrix().unwrap().mul_vec(&x(t)).unwrap();
        let s = state(t);
        let lhs = s.frame_matrix().unwrap().mul_vec(&x1).unwrap();
        let w1 = (&w(t + h) - &w(t - h)).scaled(0.5 / h);
        let rhs = &w1 + &darboux_rotation(&s, &w(t)).unwrap();
        assert!((&lhs - &rhs).max_abs() < 1e-8, "{lhs:?} vs {rhs:?}");
    }

    #[test]
    fn psi_frame_examples() {
        let theta = 0.8;
        let p = park_matrix(theta);
        let psi = psi_frame(theta, &p).unwrap();
        assert!(psi.sub(&SquareMatrix::identity(3)).unwrap().max_abs() < 1e-12);

        let bundle = balanced(1.9, 1.2 * OMEGA_O);
        let s = frenet3(&bundle, &FrenetTolerances::default()).unwrap();
        let f = s.frame_matrix().unwrap();
        let psi = psi_frame(theta, &f).unwrap();
        let v_tnb = f.mul_vec(&bundle.v).unwrap();
        let via_psi = psi.mul_vec(&v_tnb).unwrap();
        let direct = park_apply(theta, &bundle.v).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(via_psi[i], direct[i], epsilon = 1e-12 * V);
        }

        assert!(matches!(
            psi_frame(theta, &p.scaled(1.1)),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn psi_rotation_examples() {
        let omega_f = frenet_rotation(300.0, 12.0);
        let r = psi_rotation(OMEGA_O, &SquareMatrix::identity(3), &omega_f).unwrap();
        let expect = park_rotation(OMEGA_O).sub(&omega_f).unwrap();
        assert!(r.sub(&expect).unwrap().max_abs() < 1e-12);

        let r = psi_rotation(OMEGA_O, &SquareMatrix::identity(3), &frenet_rotation(OMEGA_O, 0.0)).unwrap();
        assert_eq!(r.max_abs(), 0.0);

        let psi = park_matrix(0.3).mul_transpose(&park_matrix(-1.2)).unwrap();
        let r = psi_rotation(OMEGA_O, &psi, &omega_f).unwrap();
        assert!(skew_part_check(&r, 1e-12 * OMEGA_O));

        let mut bad = omega_f.clone();
        bad.set(0, 0, 1.0);
        assert!(matches!(
            psi_rotation(OMEGA_O, &psi, &bad),
            Err(Error::NotSkewSymmetric { .. })
        ));
    }

    #[test]
    fn residual_of_constant_frame_is_zero() {
        let frames = vec![park_matrix(0.4); 4];
        let r = frenet_serret_residual(&frames, &[(0.0, 0.0); 4], 1e-3).unwrap();
        assert_eq!(r, vec![0.0, 0.0]);
        assert!(matches!(
            frenet_serret_residual(&frames[..2], &[(0.0, 0.0); 2], 1e-3),
            Err(Error::TooFewSamples { got: 2, need: 3 })
        ));
    }
}
