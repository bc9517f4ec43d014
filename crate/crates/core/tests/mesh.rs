use poremsa::mesh::*;
use std::f64::consts::PI;

fn opts(refine: u32) -> MeshOptions {
    MeshOptions {
        refine,
        ..Default::default()
    }
}

fn default_ellipse() -> UnitCellGeometry {
    UnitCellGeometry::ellipse(0.62, 2.0, PI / 4.0).unwrap()
}

#[test]
fn ellipse_area_formula() {
    let g = default_ellipse();
    assert!((g.porosity() - 0.62).abs() < 1e-14);
    match g.inclusions[0] {
        Inclusion::Ellipse { a, b, .. } => {
            assert!((PI * a * b - 0.38).abs() < 1e-14);
            assert!((a / b - 2.0).abs() < 1e-14);
        }
        _ => panic!("expected an ellipse"),
    }
}

#[test]
fn ellipse_mesh_measures_porosity() {
    let mesh = build_cell(&default_ellipse(), &opts(0)).unwrap();
    let solid = 1.0 - mesh.fluid_area();
    assert!((solid - 0.38).abs() < 0.002, "solid area {solid}");
    let report = validate_mesh(&mesh);
    assert!(report.is_valid(), "{:?}", report.violations);
    assert!(report.min_angle > 15.0, "min angle {}", report.min_angle);
}

#[test]
fn square_side_from_porosity() {
    for (phi, side) in [(0.19, 0.9), (0.75, 0.5)] {
        let g = UnitCellGeometry::square(phi).unwrap();
        match g.inclusions[0] {
            Inclusion::Rectangle { hx, hy, .. } => {
                assert!((2.0 * hx - side).abs() < 1e-12);
                assert_eq!(hx, hy);
            }
            _ => panic!("expected a square"),
        }
    }
    assert!(UnitCellGeometry::square(1.0).is_err());
    assert!(UnitCellGeometry::ellipse(1.0, 2.0, 0.0).is_err());
}

#[test]
fn unreachable_porosity_is_rejected() {
    assert!(UnitCellGeometry::ellipse(0.12, 4.0, 0.0).is_err());
    assert!(UnitCellGeometry::ellipse(0.5, 0.5, 0.0).is_err());
}

#[test]
fn square_mesh_is_exact_and_valid() {
    for phi in [0.19, 0.36, 0.51, 0.64, 0.75] {
        let mesh = build_cell(&UnitCellGeometry::square(phi).unwrap(), &opts(0)).unwrap();
        assert!((mesh.fluid_area() - phi).abs() < 1e-12, "{phi}");
        assert!(validate_mesh(&mesh).is_valid());
    }
}

#[test]
fn refinement_halves_wall_edges() {
    let g = default_ellipse();
    let h0 = build_cell(&g, &opts(0)).unwrap().min_edge_near_wall();
    let h1 = build_cell(&g, &opts(1)).unwrap().min_edge_near_wall();
    let ratio = h1 / h0;
    assert!((ratio - 0.5).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn fluid_area_converges_at_second_order() {
    let g = UnitCellGeometry::ellipse(0.62, 2.0, 0.0).unwrap();
    let errs: Vec<f64> = (0..3)
        .map(|r| {
            let o = MeshOptions {
                h_far: 0.2,
                refine: r,
                ..Default::default()
            };
            (build_cell(&g, &o).unwrap().fluid_area() - 0.62).abs()
        })
        .collect();
    let order = [(errs[0] / errs[1]).log2(), (errs[1] / errs[2]).log2()];
    for o in order {
        assert!((o - 2.0).abs() < 0.5, "{errs:?} {order:?}");
    }
}

#[test]
fn periodic_faces_are_paired() {
    let mesh = build_cell(&default_ellipse(), &opts(0)).unwrap();
    let report = validate_mesh(&mesh);
    assert!(report.max_pair_residual < 1e-12);
    let left = mesh
        .boundary_edges
        .iter()
        .filter(|e| e.marker == Marker::Left)
        .count();
    let right = mesh
        .boundary_edges
        .iter()
        .filter(|e| e.marker == Marker::Right)
        .count();
    assert_eq!(left, right);
    assert!(mesh.solid_edges().count() > 0);
}

#[test]
fn perturbed_periodic_vertex_is_reported() {
    let mut mesh = build_cell(&default_ellipse(), &opts(0)).unwrap();
    let v = mesh.periodic_pairs[0].high;
    mesh.vertices[v][1] += 1e-6;
    let report = validate_mesh(&mesh);
    assert!(report
        .violations
        .iter()
        .any(|s| s.contains("periodic pair")));
}

#[test]
fn inverted_triangle_is_reported() {
    let mut mesh = build_cell(&default_ellipse(), &opts(0)).unwrap();
    mesh.triangles[3].swap(0, 1);
    let report = validate_mesh(&mesh);
    assert!(report
        .violations
        .iter()
        .any(|s| s.contains("nonpositive area")));
}

#[test]
fn mesh_file_round_trip() {
    let mesh = build_cell(&UnitCellGeometry::square(0.64).unwrap(), &opts(0)).unwrap();
    let text = write_mesh(&mesh);
    let back = read_mesh(&text).unwrap();
    assert_eq!(back.vertices, mesh.vertices);
    assert_eq!(back.triangles, mesh.triangles);
    assert_eq!(back.boundary_edges, mesh.boundary_edges);
    assert_eq!(back.periodic_pairs, mesh.periodic_pairs);
}

#[test]
fn malformed_mesh_file_reports_line() {
    match read_mesh("this is not a mesh\n") {
        Err(MeshError::Parse { line, .. }) => assert_eq!(line, 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn custom_inclusions_build() {
    let g = UnitCellGeometry {
        inclusions: vec![
            Inclusion::Ellipse {
                center: [0.3, 0.3],
                a: 0.15,
                b: 0.1,
                rotation: 0.3,
            },
            Inclusion::Rectangle {
                center: [0.7, 0.7],
                hx: 0.1,
                hy: 0.15,
            },
        ],
    };
    g.validate().unwrap();
    let mesh = build_cell(&g, &opts(0)).unwrap();
    let report = validate_mesh(&mesh);
    assert!(report.is_valid(), "{:?}", report.violations);
    assert!((mesh.fluid_area() - g.porosity()).abs() < 2e-3);
    let overlapping = UnitCellGeometry {
        inclusions: vec![g.inclusions[0].clone(), g.inclusions[0].clone()],
    };
    assert!(overlapping.validate().is_err());
}

#[test]
fn wall_cap_limits_first_layer() {
    let g = default_ellipse();
    let capped = MeshOptions {
        wall_cap: Some(2e-3),
        ..Default::default()
    };
    let h = build_cell(&g, &capped).unwrap().min_edge_near_wall();
    assert!(h <= 2.5e-3, "{h}");
}
