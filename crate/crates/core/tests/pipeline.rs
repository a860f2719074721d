use roadsight_core::cloud::{build_scene, edge_manifold_violations, remove_overhead, PipelineConfig};
use roadsight_core::geom::Point;
use roadsight_core::sight::{station_grid, sweep, OcclusionIndex, SweepConfig};
use roadsight_core::synth::{gen_straight, hovering_box_cloud};
use roadsight_core::Execution;

#[test]
fn dense_straight_corridor_reduces_tenfold() {
    let road = gen_straight(40.0, 7.0, 0.05).unwrap();
    let config = PipelineConfig::default();
    let (mesh, report) = build_scene(&road.cloud, &road.trajectory, &config, Execution::default()).unwrap();
    assert_eq!(report.input_points, 801 * 141);
    assert!(report.reduction_factor.unwrap() >= 10.0, "{report:?}");
    assert!(!report.regions.is_empty());
    for r in &report.regions {
        assert!(r.rms <= config.planes.dist_tol);
    }
    assert_eq!(report.triangles, mesh.triangle_count());
    assert_eq!(edge_manifold_violations(&mesh), 0);
    mesh.validate().unwrap();
}

#[test]
fn hovering_vehicle_is_removed() {
    let road = gen_straight(60.0, 7.0, 0.25).unwrap();
    let vehicle = hovering_box_cloud(Point::new(30.0, 0.5, 0.0), 4.5, 1.8, 0.5, 2.0, 0.1).unwrap();
    let mut cloud = road.cloud.clone();
    cloud.profile_ids = None;
    cloud.extend(&vehicle);
    let kept = remove_overhead(&cloud, &road.trajectory, 3.5, 0.3, Execution::default()).unwrap();
    assert_eq!(kept.len(), road.cloud.len());
    assert!(kept.points.iter().all(|p| p.z == 0.0));
}

#[test]
fn pipeline_mesh_keeps_flat_road_open() {
    let road = gen_straight(600.0, 7.0, 0.25).unwrap();
    let (mesh, _) = build_scene(&road.cloud, &road.trajectory, &PipelineConfig::default(), Execution::default()).unwrap();
    let index = OcclusionIndex::build(&mesh);
    let config = SweepConfig {
        station_step: 50.0,
        ..SweepConfig::default()
    };
    let stations = station_grid(&road.trajectory, 50.0).unwrap();
    let p = sweep(&index, &road.trajectory, &stations[..3], &config).unwrap();
    assert!(p.stations.iter().all(|st| st.available_d == 400.0));
}

#[test]
fn sequential_and_parallel_builds_match() {
    let road = gen_straight(20.0, 7.0, 0.1).unwrap();
    let config = PipelineConfig::default();
    let (a, ra) = build_scene(&road.cloud, &road.trajectory, &config, Execution::Sequential).unwrap();
    let (b, rb) = build_scene(&road.cloud, &road.trajectory, &config, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra, rb);
}
