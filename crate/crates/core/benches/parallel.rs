use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use spinlattice::beamline::{simulate_with, SimulateOptions};
use spinlattice::config::{parse_config, scenario};
use spinlattice::elements::{lov_prism_map, GradientAxis, LovPrism, PhysicsParams};
use spinlattice::field::apply_with;
use spinlattice::{make_grid, uniform_state, Execution, Spinor};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn transport(c: &mut Criterion) {
    let config = parse_config(scenario("fig2c").unwrap()).unwrap().config;
    let mut group = c.benchmark_group("simulate");
    group.sample_size(10);
    for rays in [20_000, 100_000] {
        for (name, exec) in MODES {
            let opts = SimulateOptions { n_rays: Some(rays), exec, ..Default::default() };
            group.bench_with_input(BenchmarkId::new(name, rays), &opts, |b, o| b.iter(|| simulate_with(&config, o).unwrap()));
        }
    }
    group.finish();
}

fn field_apply(c: &mut Criterion) {
    let g = make_grid(25.0, 25.0, 0.05).unwrap();
    let map = lov_prism_map(&LovPrism::with_period(GradientAxis::X, 3.82), &PhysicsParams::default())
        .unwrap()
        .materialize(&g)
        .unwrap();
    let field = uniform_state(&g, Spinor::UP).unwrap();
    let mut group = c.benchmark_group("apply");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| apply_with(&map, &field, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, transport, field_apply);
criterion_main!(benches);
