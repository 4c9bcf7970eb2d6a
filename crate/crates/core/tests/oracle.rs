use spidernet_core::oracle::{
    closed_walk_count, evolve, light_cone_bound, operator_moment, EvolveOptions,
};
use spidernet_core::walk::{
    classical_probabilities, classical_probability, quantum_amplitude, quantum_amplitudes,
};
use spidernet_core::{
    build, jacobi_for_spidernet, spectral_measure, Flavor, Quadrature, SpidernetParams,
    WalkOperatorKind,
};

fn params(a: u32, b: u32, c: u32) -> SpidernetParams {
    SpidernetParams::new(a, b, c).unwrap()
}

#[test]
fn spectral_and_oracle_agree_inside_the_light_cone() {
    let quad = Quadrature::default();
    for p in [params(4, 6, 3), params(3, 3, 2)] {
        let g = build(p, 7).unwrap();
        for (kind, flavor) in [
            (WalkOperatorKind::Adjacency, Flavor::Quantum),
            (WalkOperatorKind::NegativeLaplacian, Flavor::Quantum),
            (WalkOperatorKind::NegativeLaplacian, Flavor::Classical),
        ] {
            let seq = jacobi_for_spidernet(&p, kind);
            let bound = light_cone_bound(&seq, g.depth() + 1, 1e-6, flavor).unwrap();
            let times: Vec<f64> = (1..=12)
                .map(|i| (bound * i as f64 / 12.0).min(bound))
                .collect();
            let r = evolve(&g, kind, flavor, &times, &EvolveOptions::default()).unwrap();
            r.require_trusted().unwrap();
            let mu = spectral_measure(&seq).unwrap();
            for (i, &t) in times.iter().enumerate() {
                match flavor {
                    Flavor::Quantum => {
                        let q = quantum_amplitudes(&mu, 5, t, &quad).unwrap();
                        for (k, v) in q.iter().enumerate() {
                            assert!((v - r.stratum_projection(i, k)).norm() < 1e-6);
                            assert!((v.norm_sqr() - r.stratum_probability(i, k)).abs() < 1e-6);
                        }
                    }
                    Flavor::Classical => {
                        let pk = classical_probabilities(&mu, 5, t, &quad).unwrap();
                        for (k, v) in pk.iter().enumerate() {
                            assert!((v - r.stratum_probability(i, k)).abs() < 1e-6);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn single_values_against_a_depth_nine_graph() {
    let p = params(4, 6, 3);
    let g = build(p, 9).unwrap();
    let quad = Quadrature::default();
    let opts = EvolveOptions::default();

    let adj = spectral_measure(&jacobi_for_spidernet(&p, WalkOperatorKind::Adjacency)).unwrap();
    let r = evolve(
        &g,
        WalkOperatorKind::Adjacency,
        Flavor::Quantum,
        &[1.3],
        &opts,
    )
    .unwrap();
    let q1 = quantum_amplitude(&adj, 1, 1.3, &quad).unwrap();
    assert!((q1 - r.stratum_projection(0, 1)).norm() < 1e-6);

    let lap = spectral_measure(&jacobi_for_spidernet(
        &p,
        WalkOperatorKind::NegativeLaplacian,
    ))
    .unwrap();
    let r = evolve(
        &g,
        WalkOperatorKind::NegativeLaplacian,
        Flavor::Classical,
        &[2.0],
        &opts,
    )
    .unwrap();
    let p0 = classical_probability(&lap, 0, 2.0, &quad).unwrap();
    assert!((p0 - r.stratum_probability(0, 0)).abs() < 1e-6);
}

#[test]
fn moments_match_operator_powers() {
    let quad = Quadrature::default();
    for p in [
        params(4, 6, 3),
        params(4, 4, 3),
        params(3, 3, 2),
        params(5, 7, 2),
    ] {
        let g = build(p, 6).unwrap();
        for kind in [
            WalkOperatorKind::Adjacency,
            WalkOperatorKind::NegativeLaplacian,
        ] {
            let mu = spectral_measure(&jacobi_for_spidernet(&p, kind)).unwrap();
            for m in 0..=10 {
                let exact = operator_moment(&g, kind, m).unwrap();
                let moment = mu.moment(m as u32, &quad).unwrap();
                assert!(
                    (moment - exact).abs() <= 1e-8 * exact.abs().max(1.0),
                    "{p:?} {kind:?} m={m}: {moment} vs {exact}"
                );
                if kind == WalkOperatorKind::Adjacency {
                    assert_eq!(closed_walk_count(&g, m).unwrap() as f64, exact);
                }
            }
        }
    }
}

#[test]
fn frozen_closed_walk_counts() {
    let g = build(params(4, 6, 3), 6).unwrap();
    let counts: Vec<u64> = (0..=10)
        .map(|m| closed_walk_count(&g, m).unwrap())
        .collect();
    assert_eq!(
        counts,
        [1, 0, 4, 8, 44, 168, 776, 3472, 16204, 76296, 365080]
    );
    let g = build(params(4, 4, 3), 6).unwrap();
    let counts: Vec<u64> = (0..=10)
        .map(|m| closed_walk_count(&g, m).unwrap())
        .collect();
    assert_eq!(counts, [1, 0, 4, 0, 28, 0, 232, 0, 2092, 0, 19864]);
}

#[test]
fn stratum_two_is_uniform() {
    for p in [params(4, 6, 3), params(4, 4, 3), params(5, 7, 2)] {
        let g = build(p, 5).unwrap();
        let times = [0.2, 0.9, 1.7, 3.1];
        for (kind, flavor) in [
            (WalkOperatorKind::Adjacency, Flavor::Quantum),
            (WalkOperatorKind::NegativeLaplacian, Flavor::Classical),
        ] {
            let r = evolve(&g, kind, flavor, &times, &EvolveOptions::default()).unwrap();
            for i in 0..times.len() {
                let psi = r.vertex_slice(i);
                for range in g.strata() {
                    let probs: Vec<f64> = psi[range.clone()]
                        .iter()
                        .map(|v| match flavor {
                            Flavor::Quantum => v.norm_sqr(),
                            Flavor::Classical => v.re,
                        })
                        .collect();
                    let hi = probs.iter().cloned().fold(f64::MIN, f64::max);
                    let lo = probs.iter().cloned().fold(f64::MAX, f64::min);
                    assert!(hi - lo <= 1e-10, "{p:?} {flavor:?} {}", hi - lo);
                }
            }
        }
    }
}
