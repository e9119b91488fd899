mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{close, Binary, Radio, Scene};
use relay_d2d::allocation::{interference_at_bs, interference_at_node, Victim};
use relay_d2d::baseline::{GreedyAllocator, RelayCandidates};
use relay_d2d::channel::{GeometryConfig, PathLossModel};
use relay_d2d::ga::{penalized_fitness, random_genes, run_ga, GaConfig, GeneLayout};
use relay_d2d::{evaluate, Mode, RadioParams, Topology};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn instance(
    c: usize,
    d: usize,
    l: usize,
    n_rbs: usize,
    seed: u64,
) -> (Topology, RadioParams, Radio) {
    let geo = GeometryConfig {
        n_cues: c,
        n_pairs: d,
        n_relays: l,
        ..GeometryConfig::default()
    };
    let topo = Topology::generate(&geo, PathLossModel::default(), &mut rng(seed)).unwrap();
    let params = RadioParams {
        n_rbs,
        ..RadioParams::default()
    };
    (
        topo,
        params,
        Radio {
            n_rbs,
            ..Radio::reference()
        },
    )
}

#[test]
fn three_rb_instance_matches_hand_model() {
    for seed in 0..20 {
        let (topo, params, radio) = instance(1, 1, 1, 3, seed);
        let scene = Scene::of(&topo);
        let layout = GeneLayout::new(&topo, &params);
        for cue in 0..3 {
            for rb in 0..3 {
                for mode in 0..2 {
                    let alloc = layout.decode(&[cue, rb, mode]);
                    let got = evaluate(&alloc, &topo, &params).unwrap();
                    let want = common::evaluate(&scene, &radio, &Binary::of(&alloc, 3, 1));
                    assert!(
                        close(got.sum_rate, want.sum, 1e-9),
                        "{} vs {}",
                        got.sum_rate,
                        want.sum
                    );
                }
            }
        }
    }
}

#[test]
fn interference_terms_match_coordinates() {
    for seed in 0..30 {
        let (topo, params, radio) = instance(4, 6, 3, 5, 100 + seed);
        let scene = Scene::of(&topo);
        let layout = GeneLayout::new(&topo, &params);
        let alloc = layout.decode(&random_genes(&layout, &mut rng(seed)));
        let b = Binary::of(&alloc, 5, 3);
        for n in 0..5 {
            let bs = interference_at_bs(&alloc, &topo, &params, n);
            assert!(close(
                bs,
                common::bs_interference(&scene, &radio, &b, n),
                1e-9
            ));
            for d in 0..6 {
                let rx = interference_at_node(&alloc, &topo, &params, n, Victim::Receiver(d));
                assert!(close(
                    rx,
                    common::pair_side_interference(&scene, &radio, &b, n, d, None),
                    1e-9
                ));
                for l in 0..3 {
                    let at = interference_at_node(
                        &alloc,
                        &topo,
                        &params,
                        n,
                        Victim::Relay { pair: d, relay: l },
                    );
                    let want = common::pair_side_interference(&scene, &radio, &b, n, d, Some(l));
                    assert!(
                        close(at, want, 1e-9),
                        "pair {d} relay {l} rb {n}: {at} vs {want}"
                    );
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluate_matches_reference_at_moderate_scale(
        seed in 0u64..10_000,
        c in 0usize..8,
        d in 0usize..10,
        l in 0usize..6,
        extra in 1usize..6,
    ) {
        let n_rbs = c + extra;
        let (topo, params, radio) = instance(c, d, l, n_rbs, seed);
        let layout = GeneLayout::new(&topo, &params);
        let alloc = layout.decode(&random_genes(&layout, &mut rng(seed ^ 0xabcd)));
        let got = evaluate(&alloc, &topo, &params).unwrap();
        let want = common::evaluate(&Scene::of(&topo), &radio, &Binary::of(&alloc, n_rbs, l));
        prop_assert!(close(got.sum_rate, want.sum, 1e-9));
        for (a, b) in got.cue_rates.iter().zip(&want.cue) {
            prop_assert!(close(*a, *b, 1e-9));
        }
        for (a, b) in got.due_rates.iter().zip(&want.pair) {
            prop_assert!(close(*a, *b, 1e-9));
        }
        prop_assert_eq!(got.feasible(), want.feasible);
    }
}

#[test]
fn ga_finds_optimum_of_three_rb_instance() {
    let cfg = GaConfig {
        penalty_cue: 0.0,
        penalty_due: 0.0,
        ..GaConfig::default()
    };
    for seed in 0..10 {
        let (topo, params, radio) = instance(2, 1, 1, 3, 300 + seed);
        let all = common::all_assignments(2, 1, 1, 3);
        assert_eq!(all.len(), 3 * 2 * 3 * 2);
        let scene = Scene::of(&topo);
        let best = all
            .iter()
            .map(|b| common::evaluate(&scene, &radio, b).sum)
            .fold(f64::NEG_INFINITY, f64::max);
        let out = run_ga(&topo, &params, &cfg, &mut rng(seed)).unwrap();
        assert!(
            close(out.best.fitness, best, 1e-9),
            "{} vs {best}",
            out.best.fitness
        );
    }
}

#[test]
fn ga_never_beats_enumerated_fitness() {
    let cfg = GaConfig {
        max_generations: 200,
        ..GaConfig::default()
    };
    for seed in 0..10 {
        let (topo, params, radio) = instance(2, 2, 2, 4, 400 + seed);
        let scene = Scene::of(&topo);
        let ceiling = common::all_assignments(2, 2, 2, 4)
            .iter()
            .map(|b| {
                common::penalized(
                    &radio,
                    &common::evaluate(&scene, &radio, b),
                    cfg.penalty_cue,
                    cfg.penalty_due,
                )
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let out = run_ga(&topo, &params, &cfg, &mut rng(seed)).unwrap();
        assert!(out.best.fitness <= ceiling * (1.0 + 1e-9));
        assert_eq!(
            out.best.fitness,
            penalized_fitness(&out.report, &params, &cfg)
        );
    }
}

/// Greedy rate of pair `d` on `n` in `mode`, among the pairs committed so far.
fn walkthrough_rate(
    scene: &Scene,
    radio: &Radio,
    committed: &Binary,
    d: usize,
    n: usize,
    relay: Option<usize>,
) -> f64 {
    let mut trial = committed.clone();
    match relay {
        None => trial.y[d][n] = 1,
        Some(l) => trial.z[d][l][n] = 1,
    }
    common::evaluate(scene, radio, &trial).pair[d]
}

#[test]
fn heuristic_matches_independent_walkthrough() {
    for seed in 0..25 {
        let (n_rbs, n_pairs, n_relays) = (2, 2, 2);
        let (topo, params, radio) = instance(1, n_pairs, n_relays, n_rbs, 500 + seed);
        let scene = Scene::of(&topo);
        let cue_rb = vec![(seed % 2) as usize];

        let mut committed = Binary {
            x: vec![(0..n_rbs).map(|n| u8::from(n == cue_rb[0])).collect()],
            y: vec![vec![0; n_rbs]; n_pairs],
            z: vec![vec![vec![0; n_rbs]; n_relays]; n_pairs],
        };
        let mut expected = Vec::new();
        let mut open: Vec<usize> = (0..n_pairs).collect();
        while !open.is_empty() {
            let mut best: Option<(f64, usize, usize, Option<usize>)> = None;
            for &d in &open {
                for n in 0..n_rbs {
                    let mut options = vec![(
                        walkthrough_rate(&scene, &radio, &committed, d, n, None),
                        None,
                    )];
                    let relayed = (0..n_relays)
                        .map(|l| {
                            (
                                walkthrough_rate(&scene, &radio, &committed, d, n, Some(l)),
                                Some(l),
                            )
                        })
                        .fold(None, |acc: Option<(f64, Option<usize>)>, x| match acc {
                            Some(a) if a.0 >= x.0 => Some(a),
                            _ => Some(x),
                        });
                    options.extend(relayed);
                    for (rate, relay) in options {
                        if best.is_none_or(|b| rate > b.0) {
                            best = Some((rate, d, n, relay));
                        }
                    }
                }
            }
            let (rate, d, n, relay) = best.unwrap();
            match relay {
                None => committed.y[d][n] = 1,
                Some(l) => committed.z[d][l][n] = 1,
            }
            open.retain(|&p| p != d);
            expected.push((d, n, relay.map_or(Mode::Direct, Mode::Relayed), rate));
        }

        let mut greedy =
            GreedyAllocator::new(&topo, &params, cue_rb, RelayCandidates::All).unwrap();
        for (d, n, mode, rate) in expected {
            let commit = greedy.step().unwrap();
            assert_eq!(
                (commit.pair, commit.rb, commit.mode),
                (d, n, mode),
                "seed {seed}"
            );
            assert!(close(commit.rate, rate, 1e-9));
        }
        assert!(greedy.step().is_none());
    }
}
