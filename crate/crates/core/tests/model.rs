use robustl0_core::model::{generate_problem, is_dissociated, GenParams, SparseSignal};
use robustl0_core::rng::seeded;

#[test]
fn entry_density_matches_degree() {
    let params = GenParams {
        n: 4096,
        m: 1024,
        k: 100,
        d: 7,
        sigma_s: 1.0,
        sigma_n: 0.0,
        seed: 3,
    };
    let p = generate_problem(&params, &mut seeded(3)).unwrap();
    let cells = (params.n * params.m) as f64;
    let ones: usize = p.matrix.columns().map(|c| c.len()).sum();
    let density = ones as f64 / cells;
    let expect = params.d as f64 / params.m as f64;
    let se = (expect * (1.0 - expect) / cells).sqrt();
    assert!((density - expect).abs() <= 3.0 * se);
    for col in p.matrix.columns() {
        assert_eq!(col.len(), 7);
        assert!(col.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn sketch_sum_is_degree_times_signal_sum() {
    let params = GenParams {
        n: 2048,
        m: 512,
        k: 60,
        d: 7,
        sigma_s: 1.0,
        sigma_n: 0.0,
        seed: 8,
    };
    let p = generate_problem(&params, &mut seeded(8)).unwrap();
    let sy: f64 = p.y.iter().sum();
    let sx: f64 = p.x.iter().map(|(_, v)| v).sum();
    assert!((sy - 7.0 * sx).abs() < 1e-9 * (1.0 + sx.abs()));
}

#[test]
fn gaussian_supports_are_dissociated() {
    for s in 0..100 {
        let params = GenParams {
            n: 200,
            m: 100,
            k: 12,
            d: 5,
            sigma_s: 1.0,
            sigma_n: 0.0,
            seed: s,
        };
        let p = generate_problem(&params, &mut seeded(s)).unwrap();
        assert!(is_dissociated(&p.x).unwrap());
    }
    let x = SparseSignal::from_pairs(4, [(0, 1.0), (1, 2.0), (2, 3.0)]).unwrap();
    assert!(!is_dissociated(&x).unwrap());
}

#[test]
fn generation_is_deterministic() {
    let params = GenParams::from_ratios(4096, 0.3, 0.1, 7, 1.0, 1e-3, 42);
    let a = generate_problem(&params, &mut seeded(42)).unwrap();
    let b = generate_problem(&params, &mut seeded(42)).unwrap();
    assert_eq!(a, b);
}
