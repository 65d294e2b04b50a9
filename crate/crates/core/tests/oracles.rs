use std::f64::consts::PI;

use vanhove::radial_grid::{build_radial_grid, cutoff_energy_shift, EnergyShift, QuadratureScheme};
use vanhove::renorm::{renorm_flow, FlowConfig};

fn small_flow(n_max: usize) -> FlowConfig {
    FlowConfig {
        lambda_max: 10.0,
        nodes: 6,
        n_max,
        lambda_list: vec![10.0],
        ..FlowConfig::default()
    }
}

#[test]
fn ground_overlap_improves_with_particle_cutoff() {
    let overlaps: Vec<f64> = [2, 3, 4, 6]
        .iter()
        .map(|&n| renorm_flow(&small_flow(n)).unwrap()[0].ground_overlap)
        .collect();
    for w in overlaps.windows(2) {
        assert!(w[1] >= w[0] - 1e-14, "{overlaps:?}");
    }
    assert!(1.0 - overlaps[3] < 1e-6, "{overlaps:?}");
}

#[test]
fn truncation_error_sits_above_the_exact_shift() {
    for n in [2, 3, 4, 6] {
        let row = &renorm_flow(&small_flow(n)).unwrap()[0];
        assert!(row.converged);
        // Variational: truncation can only raise the ground energy.
        assert!(row.renormalized_ground >= -1e-12, "n_max {n}: {}", row.renormalized_ground);
    }
}

/// Composite Simpson with 2·10⁵ panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let n = 200_000;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

#[test]
fn energy_shift_matches_direct_quadrature() {
    for (g, e0, l) in [(1.0, 1.0, 5.0), (0.3, 4.0, 40.0), (2.0, 0.01, 7.5)] {
        let closed = cutoff_energy_shift(g, e0, l, EnergyShift::ClosedForm).unwrap();
        let direct = -g * g / (2.0 * PI * PI) * simpson(|k| k * k / (k * k + e0), 0.0, l);
        assert!((closed - direct).abs() <= 1e-12 * closed.abs(), "{closed} vs {direct}");
    }
}

#[test]
fn composite_grid_converges_for_cutoffs_on_panel_edges() {
    for l in [5.0, 10.0, 20.0, 40.0] {
        let closed = cutoff_energy_shift(1.0, 1.0, l, EnergyShift::ClosedForm).unwrap();
        let errs: Vec<f64> = [64, 128, 256]
            .iter()
            .map(|&m| {
                let grid = build_radial_grid(40.0, m, QuadratureScheme::CompositeGaussLegendre { panels: 8 }).unwrap();
                let quad = cutoff_energy_shift(1.0, 1.0, l, EnergyShift::Quadrature(&grid)).unwrap();
                (closed - quad).abs() / closed.abs()
            })
            .collect();
        assert!(errs[1] < errs[0] && errs[2] < errs[1].max(1e-14), "cutoff {l}: {errs:?}");
        assert!(errs[2] <= 1e-8, "cutoff {l}: {errs:?}");
    }
}
