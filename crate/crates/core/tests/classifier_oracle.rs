use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigmax_core::classifier::*;
use sigmax_core::uncertainty::{ConditionalTable, DiscreteProbability, Kind, OutcomeSet};
use sigmax_testkit::{classifier::pattern_posterior, gen};

struct Instance {
    prior: Vec<f64>,
    pcf: Vec<Vec<f64>>,
    pzf: Vec<Vec<f64>>,
    model: ClassifierModel,
}

fn instance(rng: &mut ChaCha8Rng, patterns: usize, features: usize, symbols: usize) -> Instance {
    let pcf = gen::probability_rows(rng, features, patterns);
    let pzf = gen::probability_rows(rng, features, symbols);
    let f = OutcomeSet::indexed(features).unwrap();
    let model = ClassifierModel::new(
        ClassifierKind::Sigma,
        ConditionalTable::new(f.clone(), OutcomeSet::indexed(patterns).unwrap(), pcf.clone(), Kind::Probability).unwrap(),
        ConditionalTable::new(f, OutcomeSet::indexed(symbols).unwrap(), pzf.clone(), Kind::Probability).unwrap(),
    )
    .unwrap();
    Instance {
        prior: gen::probability(rng, patterns),
        pcf,
        pzf,
        model,
    }
}

fn prior_state(p: &[f64]) -> ClassifierState {
    ClassifierState {
        belief: PatternBelief::Probability(DiscreteProbability::from_weights(p.to_vec()).unwrap()),
        step: 0,
    }
}

#[test]
fn sigma_classifier_matches_joint_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for patterns in 1..=3 {
        for features in 1..=3 {
            for _ in 0..6 {
                let inst = instance(&mut rng, patterns, features, 4);
                let fp = inst.model.default_feature_predictive();
                for _ in 0..10 {
                    let symbols: Vec<usize> = (0..5).map(|_| rng.random_range(0..4)).collect();
                    let mut state = prior_state(&inst.prior);
                    for k in 0..symbols.len() {
                        state = sigma_classify_step(&state, symbols[k], &inst.model, None).unwrap();
                        let want = pattern_posterior(&inst.prior, &inst.pcf, &inst.pzf, &fp, &symbols[..=k]);
                        for (g, w) in state.belief.weights().iter().zip(&want) {
                            assert!((g - w).abs() <= 1e-12, "{patterns}x{features} {symbols:?}: {g} vs {w}");
                        }
                        assert_eq!(map_decision(&state), sigmax_core::uncertainty::argmax(&want).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn non_uniform_feature_predictive_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let inst = instance(&mut rng, 3, 3, 4);
    let fp = gen::probability(&mut rng, 3);
    let symbols = [2, 0, 3, 3, 1];
    let mut state = prior_state(&inst.prior);
    for &z in &symbols {
        state = sigma_classify_step(&state, z, &inst.model, Some(&fp)).unwrap();
    }
    let want = pattern_posterior(&inst.prior, &inst.pcf, &inst.pzf, &fp, &symbols);
    for (g, w) in state.belief.weights().iter().zip(&want) {
        assert!((g - w).abs() <= 1e-12);
    }
}

/// Random search for tables where the sum and max forms pick different
/// patterns on the same evidence.
fn find_divergence() -> Option<(ClassifierModel, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..10_000 {
        let inst = instance(&mut rng, 2, 2, 2);
        let symbols: Vec<usize> = (0..3).map(|_| rng.random_range(0..2)).collect();
        let sigma = classify_sequence(ClassifierState::prior(&inst.model), &symbols, &inst.model).unwrap();
        let max_model = inst.model.converted();
        let max = classify_sequence(ClassifierState::prior(&max_model), &symbols, &max_model).unwrap();
        let (a, b) = (sigma.last().unwrap(), max.last().unwrap());
        let margin = |w: &[f64]| (w[0] - w[1]).abs();
        if map_decision(a) != map_decision(b) && margin(a.belief.weights()) > 1e-3 && margin(b.belief.weights()) > 1e-3 {
            return Some((inst.model, symbols));
        }
    }
    None
}

#[test]
fn sum_and_max_classifiers_can_disagree() {
    let (model, symbols) = find_divergence().expect("a diverging instance exists");
    let sigma = classify_sequence(ClassifierState::prior(&model), &symbols, &model).unwrap();
    // confirm the sum decision independently
    let pcf: Vec<Vec<f64>> = model.pattern_given_feature().rows().map(<[f64]>::to_vec).collect();
    let pzf: Vec<Vec<f64>> = model.measurement_given_feature().rows().map(<[f64]>::to_vec).collect();
    let want = pattern_posterior(&[0.5, 0.5], &pcf, &pzf, &[0.5, 0.5], &symbols);
    let decision = map_decision(sigma.last().unwrap());
    assert_eq!(decision, sigmax_core::uncertainty::argmax(&want).unwrap());
    let m = model.converted();
    let max = classify_sequence(ClassifierState::prior(&m), &symbols, &m).unwrap();
    assert_ne!(map_decision(max.last().unwrap()), decision);
}

#[test]
fn single_feature_forms_agree_on_every_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for patterns in 1..=3 {
        let inst = instance(&mut rng, patterns, 1, 4);
        let symbols: Vec<usize> = (0..12).map(|_| rng.random_range(0..4)).collect();
        let sigma = classify_sequence(ClassifierState::prior(&inst.model), &symbols, &inst.model).unwrap();
        let m = inst.model.converted();
        let max = classify_sequence(ClassifierState::prior(&m), &symbols, &m).unwrap();
        for (a, b) in sigma.iter().zip(&max) {
            assert_eq!(map_decision(a), map_decision(b), "{:?} {:?}", a.belief.weights(), b.belief.weights());
        }
    }
}

#[test]
fn both_forms_stay_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let inst = instance(&mut rng, 3, 3, 4);
        let symbols: Vec<usize> = (0..20).map(|_| rng.random_range(0..4)).collect();
        for model in [inst.model.clone(), inst.model.converted()] {
            for s in classify_sequence(ClassifierState::prior(&model), &symbols, &model).unwrap() {
                let w = s.belief.weights();
                match model.kind() {
                    ClassifierKind::Sigma => assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12),
                    ClassifierKind::Max => assert!((w.iter().copied().fold(0.0, f64::max) - 1.0).abs() <= 1e-12),
                }
            }
        }
    }
}
