use std::collections::BTreeMap;

use pauli_games::classical::{evaluate_pair, load_strategy_file};
use pauli_games::game::{
    build_ams_game, build_psams_game, seeded_rng, QuestionSampler, SamplingProcedure,
};
use pauli_games::harness::{play, PlayStrategy};
use pauli_games::rational::{to_f64, Rational};

fn fixture() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/ams-witness.json")
}

#[test]
fn every_procedure_draws_pairs_uniformly() {
    let g = build_ams_game().unwrap();
    let n = 180_000;
    let expected = n as f64 / 90.0;
    let sigma = (n as f64 * (1.0 / 90.0) * (89.0 / 90.0)).sqrt();
    for procedure in SamplingProcedure::ALL {
        let sampler = QuestionSampler::new(&g, procedure).unwrap();
        let mut rng = seeded_rng(11);
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for _ in 0..n {
            *counts.entry(sampler.sample(&mut rng)).or_default() += 1;
        }
        assert_eq!(counts.len(), 90, "{procedure}");
        for (pair, c) in counts {
            assert!(g.pair(pair.0, pair.1).is_some());
            assert!(
                (c as f64 - expected).abs() < 5.0 * sigma,
                "{procedure} {pair:?}: {c}"
            );
        }
    }
}

#[test]
fn psams_draws_sync_pairs_at_rate_p() {
    let g = build_psams_game(Rational::new(1, 7)).unwrap();
    let sampler = QuestionSampler::new(&g, SamplingProcedure::Flat).unwrap();
    let mut rng = seeded_rng(12);
    let n = 200_000;
    let sync = (0..n).filter(|_| {
        let (j, k) = sampler.sample(&mut rng);
        j == k
    });
    let rate = sync.count() as f64 / n as f64;
    let p = 1.0 / 7.0;
    assert!(
        (rate - p).abs() < 5.0 * (p * (1.0 - p) / n as f64).sqrt(),
        "{rate}"
    );
}

#[test]
fn optimal_witness_wins_eight_ninths_of_rounds() {
    let (g, s) = load_strategy_file(fixture()).unwrap();
    let value = evaluate_pair(&g, &s).unwrap();
    assert_eq!(value, Rational::new(8, 9));
    assert!(!s.is_symmetric());

    let log = play(
        &g,
        &PlayStrategy::Classical(s),
        SamplingProcedure::Flat,
        1_000_000,
        2024,
    )
    .unwrap();
    let sum = log.summary();
    let v = to_f64(value);
    let sigma = (v * (1.0 - v) / sum.rounds as f64).sqrt();
    assert!((sum.win_rate - v).abs() < 5.0 * sigma, "{sum:?}");
}

#[test]
fn entangled_play_always_wins_and_agrees_on_shared_variables() {
    let g = build_psams_game(Rational::new(1, 7)).unwrap();
    let log = play(
        &g,
        &PlayStrategy::EntangledPerfect,
        SamplingProcedure::Flat,
        100_000,
        7,
    )
    .unwrap();
    assert_eq!(log.summary().win_rate, 1.0);
    let mut shared = 0;
    for r in &log.rounds {
        for (pa, pb) in &g.pair(r.j, r.k).unwrap().shared {
            assert_eq!(r.a.bit(*pa), r.b.bit(*pb));
            shared += 1;
        }
    }
    assert!(shared > 100_000);
}

#[test]
fn entangled_play_under_every_ams_procedure() {
    let g = build_ams_game().unwrap();
    for procedure in SamplingProcedure::ALL {
        let log = play(&g, &PlayStrategy::EntangledPerfect, procedure, 20_000, 3).unwrap();
        assert_eq!(log.summary().wins, 20_000, "{procedure}");
    }
}

#[test]
fn same_seed_same_log() {
    let g = build_ams_game().unwrap();
    let a = play(
        &g,
        &PlayStrategy::EntangledPerfect,
        SamplingProcedure::VariableFirst,
        5_000,
        99,
    )
    .unwrap();
    let b = play(
        &g,
        &PlayStrategy::EntangledPerfect,
        SamplingProcedure::VariableFirst,
        5_000,
        99,
    )
    .unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    let c = play(
        &g,
        &PlayStrategy::EntangledPerfect,
        SamplingProcedure::VariableFirst,
        5_000,
        100,
    )
    .unwrap();
    assert_ne!(a.rounds, c.rounds);
}
