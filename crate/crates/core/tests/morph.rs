mod common;

use dbm::geometry::{find_intersections, mae, RepairConfig};
use dbm::morph::*;
use dbm::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{baselines, brute_force_crossings};

#[test]
fn unit_weights_reproduce_every_baseline() {
    let b = baselines(400);
    assert_eq!(b.len(), 25);
    for (k, s) in b.shapes().iter().enumerate() {
        for repair in [None, Some(&RepairConfig::default())] {
            let m = morph(&b, &WeightVector::unit(b.len(), k), repair).unwrap();
            assert_eq!(mae(&m, s).unwrap(), 0.0, "{}", s.name);
        }
    }
}

#[test]
fn a_single_scaled_weight_copies_its_baseline() {
    let b = baselines(400);
    for c in [1e-3, 0.1, 0.37, 1.0] {
        let mut w = vec![0.0; b.len()];
        w[0] = c;
        assert_eq!(morph(&b, &WeightVector(w), None).unwrap().y(), b.shapes()[0].y());
    }
}

#[test]
fn equal_pair_is_the_pointwise_average() {
    let b = baselines(400);
    let mut w = vec![0.0; b.len()];
    w[0] = 0.5;
    w[1] = 0.5;
    let m = morph(&b, &WeightVector(w), None).unwrap();
    let (s0, s1) = (b.shapes()[0].y(), b.shapes()[1].y());
    for i in 0..m.y().len() {
        assert!((m.y()[i] - (s0[i] + s1[i]) / 2.0).abs() <= 1e-16, "{i}");
    }
}

#[test]
fn scaling_weights_changes_nothing() {
    let b = baselines(400);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    while checked < 100 {
        let w = sample_weights(&mut rng, b.len(), MorphMode::Dbm);
        let c: f64 = rng.gen_range(0.05..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let scaled = WeightVector(w.0.iter().map(|v| c * v).collect());
        match (morph(&b, &w, None), morph(&b, &scaled, None)) {
            (Ok(a), Ok(s)) => assert_eq!(a.y(), s.y()),
            (Err(_), Err(_)) => {}
            other => panic!("{other:?}"),
        }
        checked += 1;
    }
}

#[test]
fn blend_matches_the_normalized_sum() {
    let b = baselines(400);
    for seed in 0..50 {
        let w = random_weights(seed, b.len(), MorphMode::Dbm);
        let Ok(m) = morph(&b, &w, None) else { continue };
        let sum = w.sum();
        for i in 0..m.y().len() {
            let direct: f64 = b.shapes().iter().zip(&w.0).map(|(s, wn)| wn / sum * s.y()[i]).sum();
            // the quantized weights move each term by at most 2^-31 of |y| <= 1
            assert!((m.y()[i] - direct).abs() <= 1e-7 * (1.0 + direct.abs()), "seed {seed} i {i}");
        }
    }
}

#[test]
fn interpolation_stays_inside_the_baseline_envelope() {
    let b = baselines(400);
    for seed in 0..100 {
        let m = morph(&b, &random_weights(seed, b.len(), MorphMode::DbmI), None).unwrap();
        for i in 0..m.y().len() {
            let lo = b.shapes().iter().map(|s| s.y()[i]).fold(f64::INFINITY, f64::min);
            let hi = b.shapes().iter().map(|s| s.y()[i]).fold(f64::NEG_INFINITY, f64::max);
            assert!(m.y()[i] >= lo - 1e-8 && m.y()[i] <= hi + 1e-8, "seed {seed} i {i}");
        }
    }
}

#[test]
fn validate_examples() {
    let mut w = vec![0.0; 25];
    w[0] = 0.2;
    w[1] = -0.3;
    w[2] = 0.6;
    let w = WeightVector(w);
    assert!(validate(&w, MorphMode::Dbm).is_empty());
    assert_eq!(validate(&w, MorphMode::DbmI), vec![Violation::Negative { index: 1, value: -0.3 }]);

    let zero = WeightVector(vec![0.5, -0.5, 0.0]);
    assert!(matches!(validate(&zero, MorphMode::Dbm)[..], [Violation::DegenerateSum { .. }]));
    let outside = WeightVector(vec![1.5, 0.0]);
    assert!(matches!(validate(&outside, MorphMode::Dbm)[..], [Violation::OutOfBounds { index: 0, .. }]));
}

#[test]
fn degenerate_sum_is_an_error() {
    let b = baselines(100);
    let mut w = vec![0.0; b.len()];
    w[3] = 0.4;
    w[7] = -0.4;
    assert!(matches!(morph(&b, &WeightVector(w), None), Err(Error::DegenerateWeights { .. })));
    assert!(matches!(morph(&b, &WeightVector(vec![1.0]), None), Err(Error::InvalidWeights(_))));
}

#[test]
fn random_weights_are_seeded_and_centred() {
    assert_eq!(random_weights(42, 25, MorphMode::Dbm), random_weights(42, 25, MorphMode::Dbm));
    assert_ne!(random_weights(42, 25, MorphMode::Dbm), random_weights(43, 25, MorphMode::Dbm));
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for mode in [MorphMode::Dbm, MorphMode::DbmI] {
        let (lo, hi) = mode.bounds();
        let mut mean = [0.0; 25];
        for _ in 0..10_000 {
            let w = sample_weights(&mut rng, 25, mode);
            assert!(w.0.iter().all(|&v| v >= lo && v <= hi));
            for (m, v) in mean.iter_mut().zip(&w.0) {
                *m += v / 10_000.0;
            }
        }
        assert!(mean.iter().all(|m| (m - (lo + hi) / 2.0).abs() <= 0.05), "{mode:?}");
    }
}

#[test]
fn weight_rows_round_trip_through_csv() {
    let w = random_weights(5, 25, MorphMode::Dbm);
    assert_eq!(WeightVector::from_csv_row(&w.to_csv_row()).unwrap(), w);
    assert!(WeightVector::from_csv_row("0.1,x").is_err());
}

/// Repair over random extrapolating weight vectors: every output passes the
/// brute-force oracle or is reported non-repairable, rarely the latter.
#[test]
fn repaired_morphs_are_clean_or_flagged() {
    let b = baselines(400);
    let cfg = RepairConfig::default();
    let (mut clean, mut repaired, mut flagged, mut degenerate) = (0, 0, 0, 0);
    for seed in 0..1000 {
        let w = random_weights(seed, b.len(), MorphMode::Dbm);
        match morph(&b, &w, Some(&cfg)) {
            Ok(m) => {
                assert_eq!(brute_force_crossings(&m), 0, "seed {seed}");
                let raw = b.blend(&w).unwrap();
                if find_intersections(&raw).is_empty() {
                    clean += 1;
                } else {
                    repaired += 1;
                }
            }
            Err(Error::NonRepairable { .. }) => flagged += 1,
            Err(Error::DegenerateWeights { .. }) => degenerate += 1,
            Err(e) => panic!("seed {seed}: {e}"),
        }
    }
    eprintln!("clean {clean} repaired {repaired} non-repairable {flagged} degenerate {degenerate}");
    assert_eq!(clean + repaired + flagged + degenerate, 1000);
    assert!(repaired > 100, "too few crossings exercised: {repaired}");
    assert!((flagged as f64) < 0.05 * (1000 - degenerate) as f64, "{flagged} flagged");
}
