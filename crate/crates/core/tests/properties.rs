use nalgebra::{Matrix3, Vector3, Vector4};
use proptest::prelude::*;

use torsor::affine::{transform_form, transform_point, transform_torsor, AffineForm, AffinePoint, GalileanFrameChange, PointwiseTorsor, Torsor};
use torsor::algebra::rotation_exp;
use torsor::connection::GalileanConnection;
use torsor::simulate::{step, PointwiseState};

fn v3(s: f64) -> impl Strategy<Value = Vector3<f64>> {
    prop::array::uniform3(-s..s).prop_map(Vector3::from)
}

fn v4(s: f64) -> impl Strategy<Value = Vector4<f64>> {
    prop::array::uniform4(-s..s).prop_map(Vector4::from)
}

fn rotation() -> impl Strategy<Value = Matrix3<f64>> {
    v3(3.0).prop_map(|w| rotation_exp(&w, 1.0))
}

fn galilei() -> impl Strategy<Value = GalileanFrameChange> {
    (v3(2.0), rotation(), -2.0..2.0f64, v3(2.0)).prop_map(|(u, r, tau0, k)| GalileanFrameChange::new(u, r, tau0, k).unwrap())
}

fn torsor() -> impl Strategy<Value = Torsor> {
    (v4(2.0), prop::array::uniform6(-2.0..2.0f64)).prop_map(|(t, upper)| Torsor::from_upper(t, upper))
}

fn form() -> impl Strategy<Value = AffineForm> {
    (-2.0..2.0f64, v4(2.0)).prop_map(|(chi, phi)| AffineForm::new(chi, phi))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn composition_is_associative(a in galilei(), b in galilei(), c in galilei()) {
        let l = a.compose(&b).compose(&c).to_affine().extended();
        let r = a.compose(&b.compose(&c)).to_affine().extended();
        prop_assert!((l - r).amax() < 1e-12);
    }

    #[test]
    fn inverse_cancels(a in galilei()) {
        let e = a.compose(&a.inverse()).to_affine().extended();
        prop_assert!((e - nalgebra::SMatrix::<f64, 5, 5>::identity()).amax() < 1e-12);
    }

    #[test]
    fn composition_matches_matrix_product(a in galilei(), b in galilei()) {
        let (ea, eb) = (a.to_affine().extended(), b.to_affine().extended());
        prop_assert!((a.compose(&b).to_affine().extended() - ea * eb).amax() < 1e-12);
    }

    #[test]
    fn transforms_are_functorial(a in galilei(), b in galilei(), v in v4(3.0), tau in torsor()) {
        let (fa, fb) = (a.to_affine(), b.to_affine());
        let ab = fa.compose(&fb);
        let p = AffinePoint::new(v);
        let stepwise = transform_point(&fb, &transform_point(&fa, &p)).homogeneous();
        prop_assert!((transform_point(&ab, &p).homogeneous() - stepwise).amax() < 1e-11);
        let stepwise = transform_torsor(&fb, &transform_torsor(&fa, &tau)).extended();
        prop_assert!((transform_torsor(&ab, &tau).extended() - stepwise).amax() < 1e-10);
    }

    #[test]
    fn form_values_are_invariant(a in galilei(), psi in form(), v in v4(3.0)) {
        let f = a.to_affine();
        let p = AffinePoint::new(v);
        prop_assert!(close(transform_form(&f, &psi).value(&transform_point(&f, &p)), psi.value(&p), 1e-12));
    }

    #[test]
    fn pairing_is_invariant(a in galilei(), tau in torsor(), psi in form(), chi in form()) {
        let f = a.to_affine();
        let before = tau.pair(&psi, &chi);
        let after = transform_torsor(&f, &tau).pair(&transform_form(&f, &psi), &transform_form(&f, &chi));
        prop_assert!(close(before, after, 1e-11));
        prop_assert!(close(tau.pair(&psi, &chi), -tau.pair(&chi, &psi), 1e-12));
    }

    #[test]
    fn mass_is_galilean_invariant(a in galilei(), m in 0.01..50.0f64, l0 in v3(2.0), v in v3(5.0), x in v3(5.0)) {
        let tau = PointwiseTorsor::from_proper(m, l0, v, x).to_torsor();
        prop_assert!(close(transform_torsor(&a.to_affine(), &tau).t()[0], m, 1e-12));
    }

    #[test]
    fn pointwise_torsor_law(m in 0.01..50.0f64, l0 in v3(2.0), v in v3(5.0), x in v3(5.0)) {
        let s = PointwiseTorsor::from_proper(m, l0, v, x);
        prop_assert!((s.p - m * v).amax() < 1e-12 * (1.0 + (m * v).amax()));
        prop_assert!((s.q - m * x).amax() < 1e-12 * (1.0 + (m * x).amax()));
        let l = l0 + x.cross(&(m * v));
        prop_assert!((s.l - l).amax() < 1e-12 * (1.0 + l.amax()));
        prop_assert!((s.proper_angular_momentum() - l0).amax() < 1e-10 * (1.0 + l.amax()));
    }

    #[test]
    fn pointwise_packing_round_trips(m in 0.01..50.0f64, p in v3(5.0), q in v3(5.0), l in v3(5.0)) {
        let s = PointwiseTorsor { m, p, q, l };
        prop_assert_eq!(PointwiseTorsor::from_torsor(&s.to_torsor()), s);
    }

    #[test]
    fn integrator_keeps_mass(m in 0.01..50.0f64, x in v3(3.0), v in v3(3.0), w in v3(2.0), g in v3(10.0), dt in 1e-4..0.1f64) {
        let s = PointwiseState::new(0.0, m, x, v, Vector3::zeros()).unwrap();
        let next = step(&s, &GalileanConnection::rotating(w, g), dt).unwrap();
        prop_assert_eq!(next.m, m);
    }
}
