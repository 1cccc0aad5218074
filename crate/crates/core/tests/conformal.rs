use std::f64::consts::PI;
use std::sync::Arc;

use hotspots::conformal::{
    build_disk_map, convexity_functional, half_disk_map, radial_profile_check, schwarz_reflect,
    HolomorphicMap, MapTarget, Potential, PowerSeriesMap,
};
use hotspots::geometry::{symmetrize_domain, Location, MixedDomain};
use hotspots::Point;

fn lens_map() -> (MixedDomain, PowerSeriesMap) {
    let d = MixedDomain::lens(PI / 4.0, PI / 2.0).unwrap();
    let target = MapTarget::Symmetrized(Box::new(symmetrize_domain(&d).unwrap()));
    let m = build_disk_map(&target, 64, 1e-10).unwrap();
    (d, m)
}

fn polar_grid(nr: usize, nt: usize) -> impl Iterator<Item = Point> {
    (0..nr).flat_map(move |j| {
        let r = (j as f64 + 0.5) / nr as f64;
        (0..nt).map(move |k| Point::from_polar(r, 2.0 * PI * k as f64 / nt as f64))
    })
}

#[test]
fn orthogonal_lens_map_matches_closed_form() {
    // D* = B(−i√2, 1); the normalized map is a Möbius map.
    let (_, m) = lens_map();
    let c = 2f64.sqrt() - 1.0;
    let exact =
        |z: Point| Point::new(0.0, -2f64.sqrt()) + (z + Point::new(0.0, c)) / (1.0 - Point::new(0.0, c) * z);
    for z in polar_grid(16, 32) {
        assert!((m.value(z) - exact(z)).norm() < 1e-10, "{z}");
    }
}

#[test]
fn lens_map_is_symmetric_and_maps_upper_half_into_domain() {
    let (d, m) = lens_map();
    let unit = hotspots::geometry::Circle::unit();
    for j in 0..32 {
        for k in 0..32 {
            let z = Point::new(-0.95 + 1.9 * j as f64 / 31.0, -0.95 + 1.9 * k as f64 / 31.0);
            if z.norm() >= 1.0 {
                continue;
            }
            let lhs = unit.invert(m.value(z.conj())).unwrap();
            assert!((lhs - m.value(z)).norm() < 1e-8);
            if z.im > 1e-3 {
                assert_eq!(d.contains(m.value(z)), Location::Interior, "{z}");
            }
        }
    }
}

#[test]
fn reflected_lens_map_has_no_seam_jump() {
    let (_, m) = lens_map();
    let r = schwarz_reflect(m, hotspots::geometry::Circle::unit(), 1e-6).unwrap();
    assert!(r.seam_jump() < 1e-6);
    // one-sided difference quotients across the seam
    let h = 1e-6;
    for k in 0..100 {
        let x = Point::new(-0.9 + 1.8 * k as f64 / 99.0, 0.0);
        let above = (r.value(x + Point::new(0.0, h)) - r.value(x)) / Point::new(0.0, h);
        let below = (r.value(x) - r.value(x - Point::new(0.0, h))) / Point::new(0.0, h);
        assert!((above - below).norm() < 1e-4, "{x}: {above} vs {below}");
    }
}

#[test]
fn built_maps_are_convex_with_monotone_profiles() {
    let ellipse = build_disk_map(
        &MapTarget::Ellipse {
            center: Point::new(0.0, 0.0),
            a: 1.0,
            b: 0.8,
        },
        512,
        1e-5,
    )
    .unwrap();
    let (_, lens) = lens_map();
    let radii: Vec<f64> = (1..=64).map(|k| k as f64 / 65.0).collect();
    for map in [&ellipse as &dyn HolomorphicMap, &lens] {
        for z in polar_grid(64, 64) {
            assert!(convexity_functional(map, z).unwrap() > 0.0);
        }
        for k in 0..64 {
            let p = radial_profile_check(map, 2.0 * PI * k as f64 / 64.0, &radii).unwrap();
            assert!(p.monotone, "min increment {}", p.min_increment);
        }
    }
    assert!(Potential::from_map(Arc::new(ellipse)).is_admissible());
}

#[test]
fn half_disk_map_is_convex_on_upper_half() {
    let f = half_disk_map();
    for z in polar_grid(64, 64).filter(|z| z.im > 0.0) {
        assert!(convexity_functional(&f, z).unwrap() > 0.0);
    }
    let radii: Vec<f64> = (1..=64).map(|k| k as f64 / 65.0).collect();
    let p = radial_profile_check(&f, PI / 3.0, &radii).unwrap();
    assert!(p.monotone);
}

#[test]
fn cornered_lens_map_stays_inside() {
    let d = MixedDomain::lens(PI / 4.0, 0.45 * PI).unwrap();
    let target = MapTarget::Symmetrized(Box::new(symmetrize_domain(&d).unwrap()));
    let m = build_disk_map(&target, 256, 1e-3).unwrap();
    for z in polar_grid(16, 64).filter(|z| z.im > 0.05) {
        assert_eq!(d.contains(m.value(z)), Location::Interior, "{z}");
    }
}
