use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};

use hotspots::geometry::{
    is_convex, is_starlike_complement, origin_arc, symmetrize_domain, DirichletPart, DomainSpec, Location,
    MixedDomain, Starlike, GEOM_TOL,
};
use hotspots::Point;
use proptest::prelude::*;

/// A hooked killing curve under the arc `π/3 → 2π/3`: the pocket at
/// `(0.35, 0.5)` is outside `D` while its half `(0.175, 0.25)` is inside.
fn hooked_blob() -> MixedDomain {
    let gamma1: Vec<[f64; 2]> = (0..=64)
        .map(|k| {
            let a = FRAC_PI_3 + FRAC_PI_3 * k as f64 / 64.0;
            [a.cos(), a.sin()]
        })
        .collect();
    let s = 3f64.sqrt() / 2.0;
    let gamma2 = vec![
        [0.5, s],
        [0.1, 0.6],
        [0.1, 0.3],
        [0.4, 0.3],
        [0.4, 0.2],
        [-0.1, 0.2],
        [-0.1, 0.6],
        [-0.5, s],
    ];
    let spec = DomainSpec::Sampled {
        gamma1,
        gamma2,
        arc: hotspots::geometry::ArcDesignation::Gamma1,
        allow_nonconvex: true,
        rotation: 0.0,
    };
    spec.build().unwrap()
}

#[test]
fn hooked_blob_is_not_starlike() {
    let d = hooked_blob();
    assert!(!d.is_convex());
    let pocket = Point::new(0.35, 0.5);
    assert_eq!(d.contains(pocket), Location::Outside);
    assert_eq!(d.contains(pocket * 0.5), Location::Interior);
    match is_starlike_complement(&d).unwrap() {
        Starlike::No { z, t } => {
            // Independent confirmation of the reported witness.
            assert!(z.norm() < 1.0);
            assert_ne!(d.contains(z), Location::Interior);
            assert_eq!(d.contains(z * t), Location::Interior);
        }
        Starlike::Yes(_) => panic!("the hooked blob passed"),
    }
}

#[test]
fn catalog_domains_are_starlike() {
    for d in [
        MixedDomain::half_disk(DirichletPart::Straight),
        MixedDomain::sector(PI / 4.0, DirichletPart::Straight).unwrap(),
        MixedDomain::lens_reflecting_arc(PI / 4.0, 1.2).unwrap(),
    ] {
        assert!(is_starlike_complement(&d).unwrap().holds());
    }
}

#[test]
fn right_corner_angles() {
    for d in [
        MixedDomain::half_disk(DirichletPart::Straight),
        MixedDomain::half_disk(DirichletPart::Arc),
        MixedDomain::sector(PI / 3.0, DirichletPart::Straight).unwrap(),
        MixedDomain::sector(PI / 4.0, DirichletPart::Arc).unwrap(),
    ] {
        let (a, b) = d.corner_angles().unwrap();
        assert!(
            (a - FRAC_PI_2).abs() < 1e-6 && (b - FRAC_PI_2).abs() < 1e-6,
            "{a} {b}"
        );
    }
}

#[test]
fn domain_json_round_trips() {
    let text = r#"{"kind":"arc_gamma2","half_angle":0.6,"corner_angle":1.1,"rotation":0.3}"#;
    let spec: DomainSpec = serde_json::from_str(text).unwrap();
    let again: DomainSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(spec, again);
    assert_eq!(spec.build().unwrap(), again.build().unwrap());
    assert!(serde_json::from_str::<DomainSpec>(r#"{"kind":"sector","half_angle":0.5,"extra":1}"#).is_err());
}

fn random_interior(d: &MixedDomain, u: f64, v: f64) -> Option<Point> {
    let (lo, hi) = d.bounding_box();
    let z = Point::new(lo.re + u * (hi.re - lo.re), lo.im + v * (hi.im - lo.im));
    (d.contains(z) == Location::Interior).then_some(z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lens_symmetrization_is_convex(a in 0.1..1.4f64, frac in 0.05..1.0f64, rot in 0.0..TAU) {
        let beta = a + frac * (FRAC_PI_2 - a);
        let d = MixedDomain::lens(a, beta).unwrap().rotated(rot).unwrap();
        prop_assert!(d.satisfies_angle_hypothesis(1e-9).unwrap());
        let sym = symmetrize_domain(&d).unwrap();
        prop_assert!(is_convex(sym.full_boundary(), GEOM_TOL).unwrap().is_convex());
    }

    #[test]
    fn symmetrization_reflect_is_an_involution(u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let d = MixedDomain::lens(PI / 4.0, 1.3).unwrap();
        let sym = symmetrize_domain(&d).unwrap();
        if let Some(z) = random_interior(&d, u, v) {
            let w = sym.reflect(z).unwrap();
            prop_assert!(sym.contains(w));
            prop_assert!((sym.reflect(w).unwrap() - z).norm() < 1e-12);
        }
    }

    #[test]
    fn origin_arc_never_leaves_through_gamma1(
        u1 in 0.0..1.0f64, v1 in 0.0..1.0f64, u2 in 0.0..1.0f64, v2 in 0.0..1.0f64, which in 0usize..3,
    ) {
        let d = match which {
            0 => MixedDomain::half_disk(DirichletPart::Arc),
            1 => MixedDomain::lens(PI / 4.0, FRAC_PI_2).unwrap(),
            _ => MixedDomain::lens(PI / 3.0, 1.2).unwrap(),
        };
        if let (Some(z1), Some(z2)) = (random_interior(&d, u1, v1), random_interior(&d, u2, v2)) {
            let verdict = origin_arc(&d, z1, z2).unwrap();
            prop_assert!(verdict.holds(), "{z1} {z2} {verdict:?}");
        }
    }
}
