use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use roadsight_core::cloud::{build_scene, extract_planes, PipelineConfig};
use roadsight_core::sight::{sweep, OcclusionIndex, SweepConfig, TargetSpec};
use roadsight_core::synth::{gen_crest, gen_straight};
use roadsight_core::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn crest_sweep(c: &mut Criterion) {
    let crest = gen_crest(2000.0, 1000.0, 7.0, 1.0).unwrap();
    let traj = &crest.corridor.trajectory;
    let index = OcclusionIndex::build(&crest.corridor.mesh);
    let start = crest.s_at_x(-150.0);
    let stations: Vec<f64> = (0..100).map(|k| start + 2.0 * k as f64).collect();
    let mut group = c.benchmark_group("crest_sweep_100_stations");
    group.sample_size(10);
    for (name, execution) in MODES {
        let config = SweepConfig {
            search_step: 1.0,
            execution,
            ..SweepConfig::default()
        };
        group.bench_function(BenchmarkId::new("point_pair", name), |b| {
            b.iter(|| sweep(&index, traj, &stations, &config).unwrap())
        });
        let boxed = SweepConfig {
            target: TargetSpec::vehicle_box(),
            ..config.clone()
        };
        group.bench_function(BenchmarkId::new("box", name), |b| {
            b.iter(|| sweep(&index, traj, &stations[..20], &boxed).unwrap())
        });
    }
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let road = gen_straight(30.0, 7.0, 0.1).unwrap();
    let config = PipelineConfig::default();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    for (name, execution) in MODES {
        group.bench_function(BenchmarkId::new("ransac", name), |b| {
            b.iter(|| extract_planes(&road.cloud.points, &config.planes, execution).unwrap())
        });
        group.bench_function(BenchmarkId::new("build_scene", name), |b| {
            b.iter(|| build_scene(&road.cloud, &road.trajectory, &config, execution).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, crest_sweep, pipeline);
criterion_main!(benches);
