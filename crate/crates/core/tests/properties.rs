use approx::assert_relative_eq;
use proptest::prelude::*;

use frenet_park::frenet::{frenet3, DerivativeBundle, FrenetTolerances};
use frenet_park::frenet_nd::gram_schmidt_frame;
use frenet_park::geometry::{cross, dot, hodge_complement, PhaseVector, SquareMatrix};
use frenet_park::park::{cylindrical_rotation, park_angle, park_matrix, park_rotation};
use frenet_park::signal::{read_series, write_series, SampledSeries};

fn vec_of(dim: usize) -> impl Strategy<Value = PhaseVector> {
    prop::collection::vec(-1e3..1e3_f64, dim).prop_map(|v| PhaseVector::new(v).unwrap())
}

fn vec3() -> impl Strategy<Value = PhaseVector> {
    vec_of(3)
}

/// Proper orthogonal 3x3 matrix from three Euler angles.
fn rotation3() -> impl Strategy<Value = SquareMatrix> {
    (-3.2..3.2_f64, -3.2..3.2_f64, -3.2..3.2_f64).prop_map(|(a, b, c)| {
        let rz = |t: f64| SquareMatrix::from_row_major(3, vec![t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0]).unwrap();
        let rx = |t: f64| SquareMatrix::from_row_major(3, vec![1.0, 0.0, 0.0, 0.0, t.cos(), -t.sin(), 0.0, t.sin(), t.cos()]).unwrap();
        rz(a).mul_mat(&rx(b)).unwrap().mul_mat(&rz(c)).unwrap()
    })
}

/// Bundle whose first two derivatives are comfortably independent.
fn generic_bundle() -> impl Strategy<Value = DerivativeBundle> {
    (vec3(), vec3(), vec3())
        .prop_filter("independent", |(v, v1, _)| {
            let w = cross(v, v1).unwrap().norm();
            v.norm() > 1.0 && w > 1e-3 * v.norm() * v1.norm()
        })
        .prop_map(|(v, v1, v2)| DerivativeBundle::new(v, v1, v2, None).unwrap())
}

fn rel_close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(a.abs()).max(b.abs())
}

proptest! {
    #[test]
    fn dot_is_symmetric_and_bounded(u in vec_of(5), v in vec_of(5)) {
        let uv = dot(&u, &v).unwrap();
        prop_assert_eq!(uv, dot(&v, &u).unwrap());
        prop_assert!(uv.abs() <= u.norm() * v.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn cross_is_antisymmetric_and_orthogonal(u in vec3(), v in vec3()) {
        let c = cross(&u, &v).unwrap();
        prop_assert_eq!(&c, &-&cross(&v, &u).unwrap());
        let scale = u.norm() * v.norm() * c.norm().max(1.0);
        prop_assert!(dot(&c, &u).unwrap().abs() <= 1e-12 * scale * u.norm().max(1.0));
        prop_assert!(dot(&c, &v).unwrap().abs() <= 1e-12 * scale * v.norm().max(1.0));
    }

    #[test]
    fn hodge_equals_cross_in_three_dimensions(u in vec3(), v in vec3()) {
        prop_assume!(cross(&u, &v).unwrap().norm() > 1e-6 * u.norm() * v.norm());
        let h = hodge_complement(&[u.clone(), v.clone()]).unwrap();
        let c = cross(&u, &v).unwrap();
        prop_assert!((&h - &c).max_abs() <= 1e-12 * c.max_abs().max(u.norm() * v.norm()));
    }

    #[test]
    fn hodge_is_orthogonal_in_five_dimensions(vs in prop::collection::vec(vec_of(5), 4)) {
        if let Ok(h) = hodge_complement(&vs) {
            let scale: f64 = vs.iter().map(PhaseVector::norm).product();
            for v in &vs {
                prop_assert!(dot(&h, v).unwrap().abs() <= 1e-10 * scale * v.norm());
            }
        }
    }

    #[test]
    fn park_matrix_is_orthonormal_and_power_invariant(theta in -1e3..1e3_f64, v in vec3()) {
        let p = park_matrix(theta);
        prop_assert!(p.orthonormality_violation() <= 1e-12);
        let w = p.mul_vec(&v).unwrap();
        prop_assert!(rel_close(w.norm_squared(), v.norm_squared(), 1e-300, 1e-12));
    }

    #[test]
    fn cylindrical_rotation_is_difference_of_park_rotations(ws in -1e4..1e4_f64, wr in -1e4..1e4_f64) {
        let lhs = cylindrical_rotation(ws, wr);
        let rhs = park_rotation(ws).sub(&park_rotation(wr)).unwrap();
        prop_assert_eq!(lhs.as_row_major(), rhs.as_row_major());
    }

    #[test]
    fn constant_speed_park_angle_is_linear(w in -1e3..1e3_f64, theta0 in -3.0..3.0_f64, n in 2usize..200) {
        let dt = 1e-4;
        let th = park_angle(&vec![w; n], dt, theta0).unwrap();
        for (k, t) in th.iter().enumerate() {
            prop_assert!((t - (theta0 + w * dt * k as f64)).abs() <= 1e-12 * (1.0 + (w * dt * n as f64).abs()));
        }
    }

    #[test]
    fn frenet_state_invariants(b in generic_bundle()) {
        let s = frenet3(&b, &FrenetTolerances::default()).unwrap();
        prop_assert!(s.defined);
        let f = s.frame_matrix().unwrap();
        prop_assert!(f.orthonormality_violation() <= 1e-10);
        prop_assert!((f.determinant() - 1.0).abs() <= 1e-10);
        let vn = b.v.norm();
        prop_assert!(rel_close(dot(&s.tangent, &b.v).unwrap(), vn, vn, 1e-12));
        prop_assert!(dot(&s.normal, &b.v).unwrap().abs() <= 1e-10 * vn);
        prop_assert!(dot(&s.binormal, &b.v).unwrap().abs() <= 1e-10 * vn);
        prop_assert!(dot(&s.binormal, &b.v1).unwrap().abs() <= 1e-10 * b.v1.norm());
        prop_assert!(dot(&s.normal, &b.v1).unwrap() >= 0.0);
        prop_assert!(s.kappa >= 0.0);
        prop_assert!(rel_close(s.omega_kappa, vn * s.kappa, 0.0, 1e-12));
        prop_assert!(rel_close(s.omega_tau, vn * s.tau, 1e-300, 1e-12));
        prop_assert_eq!(s.s_dot, vn);
    }

    #[test]
    fn frenet_invariants_ignore_phase_rotation(b in generic_bundle(), q in rotation3()) {
        let tol = FrenetTolerances::default();
        let a = frenet3(&b, &tol).unwrap();
        let rb = DerivativeBundle::new(
            q.mul_vec(&b.v).unwrap(),
            q.mul_vec(&b.v1).unwrap(),
            q.mul_vec(&b.v2).unwrap(),
            None,
        )
        .unwrap();
        let r = frenet3(&rb, &tol).unwrap();
        let wscale = a.omega_kappa.abs().max(a.omega_tau.abs());
        prop_assert!(rel_close(a.s_dot, r.s_dot, 0.0, 1e-12));
        prop_assert!(rel_close(a.omega_kappa, r.omega_kappa, wscale, 1e-9));
        prop_assert!(rel_close(a.omega_tau, r.omega_tau, wscale, 1e-9));
        // axes rotate with the coordinates
        let rt = q.mul_vec(&a.tangent).unwrap();
        prop_assert!((&rt - &r.tangent).max_abs() <= 1e-10);
        let rbn = q.mul_vec(&a.binormal).unwrap();
        prop_assert!((&rbn - &r.binormal).max_abs() <= 1e-8);
    }

    /// Balanced positive-sequence signals of any amplitude and angle law:
    /// the Frenet frame is the Park matrix at the signal angle.
    #[test]
    fn balanced_frenet_frame_is_park(
        theta in -50.0..50.0_f64,
        w in 10.0..1e3_f64,
        w1 in -1e4..1e4_f64,
        a in 1.0..1e5_f64,
        a1 in -1e5..1e5_f64,
        a2 in -1e7..1e7_f64,
    ) {
        // v = a(t) u(theta(t)), u = sqrt(2/3) (sin theta, sin(theta - alpha), sin(theta + alpha))
        let p = park_matrix(theta);
        let (u, up) = (p.row(0), p.row(1));
        let v = u.scaled(a);
        // u' = w up, up' = -w u
        let v1 = &u.scaled(a1) + &up.scaled(a * w);
        let v2 = &u.scaled(a2 - a * w * w) + &up.scaled(2.0 * a1 * w + a * w1);
        let b = DerivativeBundle::new(v, v1, v2, None).unwrap();
        let s = frenet3(&b, &FrenetTolerances::default()).unwrap();
        prop_assert!(s.defined);
        let f = s.frame_matrix().unwrap();
        prop_assert!(f.sub(&p).unwrap().max_abs() <= 1e-9);
        prop_assert!(rel_close(s.omega_kappa, w, w, 1e-9));
        prop_assert!(s.omega_tau.abs() <= 1e-9 * w);
    }

    #[test]
    fn plane_curves_have_no_torsion(
        e1 in vec3(), e2 in vec3(),
        c in prop::collection::vec(-10.0..10.0_f64, 6),
    ) {
        let n = cross(&e1, &e2).unwrap().norm();
        prop_assume!(e1.norm() > 1.0 && e2.norm() > 1.0 && n > 1e-3 * e1.norm() * e2.norm());
        let comb = |x: f64, y: f64| &e1.scaled(x) + &e2.scaled(y);
        let (v, v1, v2) = (comb(c[0], c[1]), comb(c[2], c[3]), comb(c[4], c[5]));
        prop_assume!(cross(&v, &v1).unwrap().norm() > 1e-3 * v.norm() * v1.norm() && v.norm() > 1.0);
        let s = frenet3(&DerivativeBundle::new(v, v1, v2, None).unwrap(), &FrenetTolerances::default()).unwrap();
        prop_assert!(s.omega_tau.abs() <= 1e-9 * s.omega_kappa.abs().max(1.0));
    }

    #[test]
    fn generalized_frame_is_orthonormal(derivs in prop::collection::vec(vec_of(5), 1..5)) {
        prop_assume!(derivs[0].norm() > 1.0);
        let f = gram_schmidt_frame(&derivs, 1e-8).unwrap();
        prop_assert!(f.matrix().orthonormality_violation() <= 1e-10);
        prop_assert!(f.rank >= 1 && f.rank <= derivs.len());
        prop_assert!((&f.vectors[0] - &derivs[0].normalized().unwrap()).max_abs() <= 1e-12);
    }

    #[test]
    fn csv_round_trip_is_exact(
        t0 in -10.0..10.0_f64,
        dt in 1e-6..1e-1_f64,
        values in prop::collection::vec(prop::collection::vec(-1e6..1e6_f64, 4), 2..30),
    ) {
        let samples = values.into_iter().map(|v| PhaseVector::new(v).unwrap()).collect();
        let s = SampledSeries::new(t0, dt, samples).unwrap();
        let mut buf = Vec::new();
        write_series(&s, &mut buf).unwrap();
        let back = read_series(buf.as_slice()).unwrap();
        prop_assert_eq!(&back.samples, &s.samples);
        prop_assert_eq!(back.t0, s.t0);
        assert_relative_eq!(back.dt, s.dt, max_relative = 1e-9);
    }
}

#[test]
fn data_types_cross_threads() {
    fn check<T: Send + Sync>() {}
    check::<PhaseVector>();
    check::<SquareMatrix>();
    check::<SampledSeries>();
    check::<frenet_park::FrenetState>();
    check::<frenet_park::GeneralizedFrame>();
    check::<frenet_park::Error>();
}
