mod common;

use mgas_core::gkls::{generate, GklsClassSpec, GklsFunction};
use mgas_core::parallel::{map_indices, Execution};

use common::scan_minimum;

#[test]
fn all_presets_carry_their_certificate() {
    for class in 1..=8u8 {
        let spec = GklsClassSpec::preset(class).unwrap();
        let results = map_indices(10, Execution::Parallel, |i| {
            let g = generate(&spec, i as u64).unwrap();
            (
                g.evaluate(g.global_minimizer()).unwrap(),
                scan_minimum(&g, 10_000),
                g.balls_disjoint(),
                g.balls_inside_domain(),
            )
        });
        for (at_min, scanned, disjoint, inside) in results {
            assert!((at_min + 1.0).abs() <= 1e-12, "class {class}");
            assert!(scanned >= -1.0 - 1e-9, "class {class}: {scanned}");
            assert!(disjoint && inside, "class {class}");
        }
    }
}

#[test]
fn global_minimizer_sits_at_distance_d() {
    for class in 1..=8u8 {
        let spec = GklsClassSpec::preset(class).unwrap().with_seed(42);
        let g = generate(&spec, 5).unwrap();
        let d: f64 = g
            .global_minimizer()
            .iter()
            .zip(&g.vertex)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!((d - spec.dist_d).abs() < 1e-12);
        assert_eq!(g.radii[0], spec.radius_r);
    }
}

#[test]
fn json_description_round_trips() {
    let g = generate(&GklsClassSpec::preset(4).unwrap(), 1).unwrap();
    let text = serde_json::to_string(&g).unwrap();
    let back: GklsFunction = serde_json::from_str(&text).unwrap();
    assert_eq!(back, g);
}
