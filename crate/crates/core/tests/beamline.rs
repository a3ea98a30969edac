use spinlattice::analysis::{visibility, Axis};
use spinlattice::beamline::{
    ideal_lov_state, optimize_currents, sample_rays, simulate_with, trace_ray, BeamlineConfig, Objective,
    OptimizeOptions, SimulateOptions,
};
use spinlattice::config::{parse_config, scenario};
use spinlattice::elements::{Element, ElementKind, LovPrism, GradientAxis, Slit, SpinDirection, SpinFilter};
use spinlattice::grid::make_grid;
use spinlattice::run::analysis_map;
use spinlattice::{Component, Execution, Spinor};

fn load(name: &str) -> BeamlineConfig {
    parse_config(scenario(name).unwrap()).unwrap().config
}

fn without_analyzer(mut c: BeamlineConfig) -> BeamlineConfig {
    c.elements.retain(|e| !matches!(e.kind, ElementKind::SpinFilter(_)));
    c
}

fn opts(rays: usize) -> SimulateOptions {
    SimulateOptions { n_rays: Some(rays), ..Default::default() }
}

#[test]
fn flux_is_conserved_without_analyzer() {
    let mut c = without_analyzer(load("fig2c"));
    // a wide camera catches the whole divergent beam
    c.camera.grid = make_grid(200.0, 200.0, 0.5).unwrap();
    let sim = simulate_with(&c, &opts(50_000)).unwrap();
    let d = &sim.diagnostics;
    assert!(sim.images.is_empty());
    assert!((d.camera_weight - d.source_weight).abs() <= 1e-3 * d.source_weight, "{d:?}");
    assert_eq!(d.rays_on_camera, d.rays);
}

#[test]
fn ensemble_is_linear_in_polarization() {
    let base = load("fig2b");
    let run = |p: f64, dir: SpinDirection| {
        let mut c = base.clone();
        c.polarization = p;
        c.initial_direction = dir;
        simulate_with(&c, &opts(20_000)).unwrap()
    };
    let mixed = run(0.94, SpinDirection::PlusZ);
    let up = run(1.0, SpinDirection::PlusZ);
    let down = run(1.0, SpinDirection::MinusZ);
    let (wu, wd) = (0.5 * (1.0 + 0.94), 0.5 * (1.0 - 0.94));
    let expect = up.images[0].intensity.combine(wu, &down.images[0].intensity, wd).unwrap();
    assert!(mixed.images[0].intensity.max_abs_difference(&expect).unwrap() <= 1e-12);
}

#[test]
fn divergence_washes_out_fringes() {
    let base = load("fig2a");
    let vis: Vec<f64> = [0.0, 0.5, 1.0, 2.0]
        .iter()
        .map(|&d| {
            let mut c = base.clone();
            c.source.divergence_fwhm_x = d;
            c.source.divergence_fwhm_y = d;
            visibility(&analysis_map(&simulate_with(&c, &opts(100_000)).unwrap()).unwrap(), Axis::X).unwrap()
        })
        .collect();
    assert!(vis.windows(2).all(|w| w[1] <= w[0]), "{vis:?}");
    // no divergence: only polarizer and analyzer efficiencies remain
    assert!((vis[0] - 0.94 * 0.94).abs() < 0.02, "{vis:?}");
}

#[test]
fn same_seed_same_images_in_both_modes() {
    let c = load("fig2c");
    let seq = simulate_with(&c, &SimulateOptions { exec: Execution::Sequential, ..opts(30_000) }).unwrap();
    let par = simulate_with(&c, &SimulateOptions { exec: Execution::Parallel, ..opts(30_000) }).unwrap();
    let again = simulate_with(&c, &opts(30_000)).unwrap();
    assert_eq!(seq, par);
    assert_eq!(par, again);
    let other = simulate_with(&c, &SimulateOptions { seed: Some(99), ..opts(30_000) }).unwrap();
    assert_ne!(other.flux, par.flux);
}

#[test]
fn ideal_image_matches_closed_form_lattice() {
    let mut c = load("fig2b");
    c.source.divergence_fwhm_x = 0.0;
    c.source.divergence_fwhm_y = 0.0;
    let a = c.nominal_period().unwrap().unwrap();
    let sim = simulate_with(&c, &opts(1000)).unwrap();
    let expect = ideal_lov_state(&c.camera.grid, a, 1).unwrap();
    assert!(sim.ideal.max_difference(&expect).unwrap() < 1e-12);
}

#[test]
fn translation_by_half_period_swaps_filters() {
    let base = load("fig3");
    let mut shifted = base.clone();
    shifted.prisms_mut().next().unwrap().offset = 6.0;
    let up = SpinFilter::new(SpinDirection::PlusZ, 0.94).unwrap();
    let down = SpinFilter::new(SpinDirection::MinusZ, 0.94).unwrap();
    let a = simulate_with(&base, &SimulateOptions { filters: vec![up], ..opts(20_000) }).unwrap();
    let b = simulate_with(&shifted, &SimulateOptions { filters: vec![down], ..opts(20_000) }).unwrap();
    assert!(a.images[0].intensity.max_abs_difference(&b.images[0].intensity).unwrap() <= 1e-9);
    assert!(a.images[0].ideal.max_abs_difference(&b.images[0].ideal).unwrap() <= 1e-9);
}

#[test]
fn two_pair_filter_mixing() {
    let g = make_grid(12.0, 12.0, 0.1).unwrap();
    let f = ideal_lov_state(&g, 6.0, 2).unwrap();
    let ip = SpinFilter::ideal(SpinDirection::PlusZ);
    let im = SpinFilter::ideal(SpinDirection::MinusZ);
    let sum_defect = f
        .cells()
        .iter()
        .map(|s| (ip.transmission(s) + im.transmission(s) - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(sum_defect <= 1e-12);
    // along x the cell-center ring picks up an azimuthal variation
    let fx = SpinFilter::ideal(SpinDirection::PlusX);
    let ring: Vec<f64> = (0..64)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
            let (i, j) = (g.index_x(1.5 * t.cos()), g.index_y(1.5 * t.sin()));
            fx.transmission(&f.at(i.unwrap(), j.unwrap()))
        })
        .collect();
    let spread = ring.iter().copied().fold(f64::MIN, f64::max) - ring.iter().copied().fold(f64::MAX, f64::min);
    assert!(spread > 0.1, "{spread}");
}

#[test]
fn blocked_rays_carry_no_weight() {
    let mut c = load("fig2a");
    c.elements.insert(0, Element::new(0.5, ElementKind::Slit(Slit { width_x: 2.0, width_y: 2.0 })));
    let rays = sample_rays(&c.source, 1, Spinor::UP);
    let traced: Vec<_> = rays.iter().map(|r| trace_ray(r, &c).unwrap()).collect();
    assert!(traced.iter().any(|r| r.weight == 0.0));
    assert!(traced.iter().any(|r| r.weight > 0.0));
    let sim = simulate_with(&c, &SimulateOptions { seed: Some(1), ..opts(rays.len()) }).unwrap();
    assert_eq!(sim.diagnostics.rays_blocked, traced.iter().filter(|r| r.weight == 0.0).count());
}

#[test]
fn empty_beamline_images_the_source() {
    let c = parse_config("[source]\ndivergence_fwhm_x = 0.0\ndivergence_fwhm_y = 0.0\nbeam_width_x = 25.0\nbeam_width_y = 25.0\n")
        .unwrap()
        .config;
    let sim = simulate_with(&c, &opts(62_500)).unwrap();
    assert!((sim.flux.total() - 1.0).abs() < 1e-12);
    assert!(sim.ideal.cells().iter().all(|s| *s == Spinor::UP));
    assert_eq!(sim.ideal.component_intensity(Component::Down).iter().sum::<f64>(), 0.0);
}

#[test]
fn misordered_elements_are_rejected() {
    let mut c = load("fig2a");
    c.elements.swap(0, 1);
    let e = simulate_with(&c, &opts(10)).unwrap_err().to_string();
    assert!(e.contains("0.965") && e.contains("1.06"), "{e}");
    let mut c = load("fig2a");
    c.elements.insert(1, Element::new(1.0, ElementKind::SpinFilter(SpinFilter::ideal(SpinDirection::PlusX))));
    assert!(simulate_with(&c, &opts(10)).is_err());
}

#[test]
fn optimizer_is_flat_without_divergence() {
    let mut c = load("fig2a");
    c.source.divergence_fwhm_x = 0.0;
    c.source.divergence_fwhm_y = 0.0;
    let mut o = OptimizeOptions::new(Objective::Visibility(Axis::X), vec![0, 1, 2]);
    o.simulate.n_rays = Some(40_000);
    let r = optimize_currents(&c, &o).unwrap();
    assert_eq!(r.flat, vec![0, 1, 2], "{r:?}");
    assert_eq!(r.currents, r.initial_currents);
}

#[test]
fn optimizer_never_loses_contrast() {
    let mut c = load("fig2c");
    c.set_currents(&[5.0; 4]).unwrap();
    let mut o = OptimizeOptions::new(Objective::LatticeContrast, vec![0, 1, 2, 3]);
    o.simulate.n_rays = Some(20_000);
    o.descent.max_sweeps = 2;
    let r = optimize_currents(&c, &o).unwrap();
    assert!(r.value >= r.initial_value, "{r:?}");
    assert!(r.trace.windows(2).all(|w| w[1] >= w[0]));
    if r.flat.len() < 4 {
        assert!(r.currents.iter().any(|&i| (i - r.currents[0]).abs() > 1e-6), "{r:?}");
    }
}

#[test]
fn prism_without_current_is_identity() {
    let mut c = load("fig2a");
    c.source.divergence_fwhm_x = 0.0;
    c.source.divergence_fwhm_y = 0.0;
    for p in c.prisms_mut() {
        *p = LovPrism::new(p.axis, 0.0);
    }
    assert_eq!(c.prisms().next().unwrap().axis, GradientAxis::Y);
    let sim = simulate_with(&c, &opts(5000)).unwrap();
    assert!(sim.ideal.cells().iter().all(|s| *s == Spinor::UP));
}
