use std::f64::consts::PI;

use hotspots::geometry::{DirichletPart, MixedDomain};
use hotspots::spectral::{
    assemble, ground_state, hotspot_locate, monotonicity_along_curve, reference_eigen, NodalField, RayCurve,
    ReferenceCase, TriMesh,
};

// Tabulated Bessel zeros: j'₁,₁, j₀,₁ and j'₂,₁.
const JP11: f64 = 1.841_183_781_340_659_3;
const J01: f64 = 2.404_825_557_695_773;
const JP21: f64 = 3.054_236_928_227_140_4;

fn cases() -> [(ReferenceCase, f64); 3] {
    [
        (ReferenceCase::HalfDiskNeumannArc, JP11 * JP11),
        (ReferenceCase::HalfDiskDirichletArc, J01 * J01),
        (ReferenceCase::Sector { half_angle: PI / 4.0 }, JP21 * JP21),
    ]
}

fn quadratic_form(a: &hotspots::spectral::FemSystem, x: &[f64], stiffness: bool) -> f64 {
    let m = if stiffness { &a.k } else { &a.m };
    m.iter().map(|(v, (i, j))| x[i] * v * x[j]).sum()
}

#[test]
fn references_match_tabulated_zeros() {
    for (case, mu) in cases() {
        let r = reference_eigen(case).unwrap();
        assert!((r.mu1 - mu).abs() < 1e-10 * mu, "{case:?}: {} vs {mu}", r.mu1);
        assert!((r.psi(r.maximizer()) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn refinement_converges_monotonically() {
    for (case, mu) in cases() {
        let d = reference_eigen(case).unwrap().domain();
        let mus: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&h| ground_state(&d, h).unwrap().1.mu1)
            .collect();
        let (d1, d2) = ((mus[0] - mus[1]).abs(), (mus[1] - mus[2]).abs());
        assert!(d2 < d1, "{case:?}: {mus:?}");
        // P1 eigenvalues approach from above.
        assert!(mus.iter().all(|&m| m > mu - 1e-9), "{case:?}: {mus:?}");
        assert!((mus[2] - mu).abs() < 0.01 * mu, "{case:?}: {mus:?}");
    }
}

#[test]
fn ground_state_invariants() {
    for (case, _) in cases() {
        let d = reference_eigen(case).unwrap().domain();
        let h = 0.04;
        let (mesh, pair) = ground_state(&d, h).unwrap();
        let system = assemble(&mesh).unwrap();
        let x: Vec<f64> = system.free_to_vertex.iter().map(|&v| pair.psi1[v]).collect();
        let rq = quadratic_form(&system, &x, true) / quadratic_form(&system, &x, false);
        assert!(
            (rq - pair.mu1).abs() < 1e-8 * pair.mu1,
            "{case:?}: {rq} vs {}",
            pair.mu1
        );
        for (v, dirichlet) in mesh.dirichlet_vertices().into_iter().enumerate() {
            if dirichlet {
                assert_eq!(pair.psi1[v], 0.0);
            }
        }
        assert!(pair.psi1.iter().all(|&p| p >= -1e-10));
        assert!(mesh.min_angle().to_degrees() >= 20.0);
        let spot = hotspot_locate(&pair, &mesh, &d);
        assert!(spot.dist_to_gamma1 <= h, "{case:?}: {}", spot.dist_to_gamma1);
    }
}

#[test]
fn psi_increases_toward_the_reflecting_arc() {
    let h = 0.03;
    for d in [
        MixedDomain::half_disk(DirichletPart::Straight),
        MixedDomain::sector(PI / 4.0, DirichletPart::Straight).unwrap(),
    ] {
        let (mesh, pair) = ground_state(&d, h).unwrap();
        let field = NodalField::new(&mesh, &pair.psi1).unwrap();
        let curves = RayCurve::euclidean_family(&d, 16, (1.0 / h).round() as usize + 1).unwrap();
        for c in &curves {
            assert_eq!(
                monotonicity_along_curve(&field, c).unwrap().violations,
                0,
                "θ = {}",
                c.theta
            );
        }
    }
}

#[test]
fn mesh_text_round_trips() {
    let d = MixedDomain::half_disk(DirichletPart::Arc);
    let (mesh, _) = ground_state(&d, 0.1).unwrap();
    let again = TriMesh::from_text(&mesh.to_text()).unwrap();
    assert_eq!(again.triangles(), mesh.triangles());
    assert_eq!(again.boundary_edges(), mesh.boundary_edges());
    assert_eq!(again.vertices().len(), mesh.vertices().len());
}
