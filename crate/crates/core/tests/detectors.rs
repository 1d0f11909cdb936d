//! The checks must fail when the construction is broken.

use twistred::reduction::{
    convention_audit, measure_d_omega, reduce, reduce_unchecked, verify_basic, CheckConfig, Convention, ReduceOptions,
};
use twistred::skew::{collinear_planes, distance_to_plane, SkewMatrix};
use twistred::torsion::{torsion_classes, verify_torsion_equations};
use twistred::torus::{stream_rng, MomentLevel};
use twistred::twist::{alpha_from_skew, gram_schmidt, TwistForm};
use twistred::{Error, ScalarField, C64};

#[test]
fn wrong_charge_is_rejected_and_breaks_basicness() {
    let m = SkewMatrix::random(4, &mut stream_rng(5, 0)).unwrap();
    let a = alpha_from_skew(&m);
    // z₁²α_M has charge 4i, but q_V/2 = 2i on C⁴
    let z0 = ScalarField::z(4, 0);
    let coeffs = a.coeffs().iter().map(|c| c.mul(&z0).mul(&z0)).collect();
    let tf = TwistForm::new(coeffs, vec![C64::new(0.0, 4.0)]);
    let level = MomentLevel::unit_sphere(4);
    assert!(matches!(
        reduce(&level, vec![tf.clone()], &ReduceOptions::default()),
        Err(Error::Precondition(_))
    ));

    let red = reduce_unchecked(&level, vec![tf], &ReduceOptions::default()).unwrap();
    let pts = red.sample(5, 1, |_| true).unwrap();
    let e = verify_basic(&red, &pts, &CheckConfig::default()).unwrap();
    let lie = e.get("basic: L_V1 Omega").unwrap();
    assert!(!lie.passed() && lie.value > 0.1, "{lie}");
    assert!(e.get("basic: iota_V1 Omega").unwrap().passed());
}

#[test]
fn reduced_omega_is_not_closed() {
    let m = SkewMatrix::random(4, &mut stream_rng(6, 0)).unwrap();
    let red = reduce(&MomentLevel::unit_sphere(4), vec![alpha_from_skew(&m)], &ReduceOptions::default()).unwrap();
    let pts = red.sample(5, 0, |_| true).unwrap();
    let e = measure_d_omega(&red, &pts, &CheckConfig::default()).unwrap();
    assert!(e.value > 0.1);
}

#[test]
fn opposite_w5_sign_fails_off_the_lt_locus() {
    let m = SkewMatrix::block_diagonal(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)]);
    let level = MomentLevel::unit_sphere(4);
    let t = torsion_classes(&m).unwrap();
    let pts = level.sample(10, 0, |_| true).unwrap();
    let e = verify_torsion_equations(&t, &level, &pts, 10, 0, 1e-8).unwrap();
    assert!(e.all_passed());
    assert!(e.get("torsion: dOmega equation with W5 = +2Re(eta)").unwrap().value > 0.1);
}

#[test]
fn small_pfaffian_is_refused() {
    let m = SkewMatrix::block_diagonal(&[C64::new(1.0, 0.0), C64::new(0.01, 0.0)]);
    assert!(matches!(torsion_classes(&m), Err(Error::Singular(_))));
}

#[test]
fn two_twist_audit_rejects_the_unpinned_sign() {
    let m1 = SkewMatrix::block_diagonal(&[C64::new(1.0, 0.0); 4]);
    let m2 = SkewMatrix::block_diagonal(&[
        C64::new(1.5, 0.0),
        C64::new(-0.7, 0.0),
        C64::new(2.3, 0.5),
        C64::new(0.4, -1.1),
    ]);
    let twists = gram_schmidt(&[alpha_from_skew(&m1), alpha_from_skew(&m2)]).unwrap();
    let opts = ReduceOptions {
        normalize: true,
        ..ReduceOptions::default()
    };
    let red = reduce(&MomentLevel::unit_sphere(8), twists, &opts).unwrap();
    let planes = collinear_planes(&m1, &m2, 1e-8).unwrap();
    let pts = red.sample(4, 0, |z| planes.iter().all(|p| distance_to_plane(z, p) >= 1e-2)).unwrap();
    let cfg = CheckConfig {
        trials: 4,
        tol: 1e-8,
        ..CheckConfig::default()
    };
    let audit = convention_audit(&red, &pts, &cfg).unwrap();
    assert_eq!(audit.passing_classes, 1);
    let stated = audit.rows.iter().find(|r| r.convention == Convention::standard(2)).unwrap();
    assert!(!stated.passed && stated.su2 > 0.1);
    assert!(audit.selected.is_some());
}
