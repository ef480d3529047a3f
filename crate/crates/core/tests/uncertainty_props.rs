use proptest::prelude::*;
use sigmax_core::uncertainty::*;

fn raw_weights(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001f64..1.0, 1..=max_len)
}

fn prob(raw: &[f64]) -> DiscreteProbability {
    DiscreteProbability::normalize(OutcomeSet::indexed(raw.len()).unwrap(), raw).unwrap()
}

fn poss(raw: &[f64]) -> DiscretePossibility {
    DiscretePossibility::normalize(OutcomeSet::indexed(raw.len()).unwrap(), raw).unwrap()
}

fn table(raw: &[Vec<f64>], kind: Kind) -> ConditionalTable {
    let rows = raw
        .iter()
        .map(|r| match kind {
            Kind::Probability => prob(r).weights().to_vec(),
            Kind::Possibility => poss(r).weights().to_vec(),
        })
        .collect();
    ConditionalTable::from_rows(rows, kind).unwrap()
}

fn rows(n: usize, m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.001f64..1.0, m), n)
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #[test]
    fn klir_round_trip_from_probability(raw in raw_weights(8)) {
        let p = prob(&raw);
        let back = poss_to_prob(&prob_to_poss(&p));
        prop_assert!(close(back.weights(), p.weights(), 1e-12));
    }

    #[test]
    fn klir_round_trip_from_possibility(raw in raw_weights(8)) {
        let pi = poss(&raw);
        let back = prob_to_poss(&poss_to_prob(&pi));
        prop_assert!(close(back.weights(), pi.weights(), 1e-12));
    }

    #[test]
    fn klir_transforms_share_argmax(raw in raw_weights(8)) {
        let p = prob(&raw);
        prop_assert_eq!(prob_to_poss(&p).argmax(), p.argmax());
    }

    #[test]
    fn compositions_preserve_normalization(a in rows(3, 4), b in rows(4, 2)) {
        let s = compose_stochastic(&table(&a, Kind::Probability), &table(&b, Kind::Probability)).unwrap();
        for r in s.rows() {
            prop_assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let f = compose_fuzzy(&table(&a, Kind::Possibility), &table(&b, Kind::Possibility)).unwrap();
        for r in f.rows() {
            prop_assert!((r.iter().copied().fold(0.0, f64::max) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn compositions_are_associative(a in rows(2, 3), b in rows(3, 4), c in rows(4, 2)) {
        for kind in [Kind::Probability, Kind::Possibility] {
            let (ta, tb, tc) = (table(&a, kind), table(&b, kind), table(&c, kind));
            let compose = |x: &ConditionalTable, y: &ConditionalTable| match kind {
                Kind::Probability => compose_stochastic(x, y).unwrap(),
                Kind::Possibility => compose_fuzzy(x, y).unwrap(),
            };
            let left = compose(&compose(&ta, &tb), &tc);
            let right = compose(&ta, &compose(&tb, &tc));
            for (l, r) in left.rows().zip(right.rows()) {
                prop_assert!(close(l, r, 1e-12));
            }
        }
    }

    #[test]
    fn hetero_to_prob_matches_brute_force(pxz in rows(3, 4), pizy in rows(2, 3), y in 0usize..2) {
        let p_xz = table(&pxz, Kind::Probability);
        let pi_zy = table(&pizy, Kind::Possibility);
        let induced = compose_hetero_to_prob(&p_xz, &pi_zy, y).unwrap();
        let mut want = vec![0.0f64; 4];
        for (x, w) in want.iter_mut().enumerate() {
            for z in 0..3 {
                *w = w.max(p_xz.get(z, x) * pi_zy.get(y, z));
            }
        }
        prop_assert!(close(&induced.raw, &want, 0.0));
        let s: f64 = want.iter().sum();
        let norm: Vec<f64> = want.iter().map(|w| w / s).collect();
        prop_assert!(close(induced.normalized.weights(), &norm, 1e-15));
    }

    #[test]
    fn hetero_to_poss_matches_brute_force(piyz in rows(3, 4), pzx in rows(2, 3), x in 0usize..2) {
        let pi_yz = table(&piyz, Kind::Possibility);
        let p_zx = table(&pzx, Kind::Probability);
        let induced = compose_hetero_to_poss(&pi_yz, &p_zx, x).unwrap();
        let mut want = vec![0.0; 4];
        for (y, w) in want.iter_mut().enumerate() {
            for z in 0..3 {
                *w += pi_yz.get(z, y) * p_zx.get(x, z);
            }
        }
        prop_assert!(close(&induced.raw, &want, 1e-15));
        let m = want.iter().copied().fold(0.0, f64::max);
        prop_assert!((induced.normalized.weights().iter().copied().fold(0.0, f64::max) - 1.0).abs() < 1e-12);
        prop_assert!(close(induced.normalized.weights(), &want.iter().map(|w| w / m).collect::<Vec<_>>(), 1e-15));
    }

    #[test]
    fn hybrid_joints_from_marginals_are_normalized(cond in rows(3, 4), marginal in prop::collection::vec(0.001f64..1.0, 3)) {
        let pi = poss(&marginal);
        let h = hybrid_from_marginal_conditional(&table(&cond, Kind::Probability), Marginal::Possibility(&pi)).unwrap();
        prop_assert!((h.max_of_sum() - 1.0).abs() < 1e-12);
        let induced = induced_marginal(&h, Axis::Fuzzy);
        prop_assert!(close(&induced, pi.weights(), 1e-12));

        let p = prob(&marginal);
        let h = hybrid_from_marginal_conditional(&table(&cond, Kind::Possibility), Marginal::Probability(&p)).unwrap();
        prop_assert!((h.sum_of_max() - 1.0).abs() < 1e-12);
        prop_assert!(close(&induced_marginal(&h, Axis::Random), p.weights(), 1e-12));
    }

    #[test]
    fn updates_preserve_normalization(prior in raw_weights(6), seed in prop::collection::vec(0.0f64..1.0, 6)) {
        let lik: Vec<f64> = seed.iter().take(prior.len()).map(|v| v + 0.01).collect();
        prop_assume!(lik.len() == prior.len());
        let capped: Vec<f64> = lik.iter().map(|v| v.min(1.0)).collect();
        let p = prob_update_with_poss_likelihood(&prob(&prior), &capped).unwrap();
        prop_assert!((p.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let pi = possibility_update(&poss(&prior), &capped).unwrap();
        prop_assert!((pi.weights().iter().copied().fold(0.0, f64::max) - 1.0).abs() < 1e-12);
        let pi2 = poss_update_with_prob_likelihood(&poss(&prior), &lik).unwrap();
        prop_assert!((pi2.weights().iter().copied().fold(0.0, f64::max) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn possibility_update_ignores_likelihood_scale(prior in raw_weights(6), scale in 0.01f64..100.0) {
        let pi = poss(&prior);
        let lik: Vec<f64> = (0..prior.len()).map(|i| 0.1 + 0.1 * i as f64).collect();
        let scaled: Vec<f64> = lik.iter().map(|l| l * scale).collect();
        let a = poss_update_with_prob_likelihood(&pi, &lik).unwrap();
        let b = poss_update_with_prob_likelihood(&pi, &scaled).unwrap();
        prop_assert!(close(a.weights(), b.weights(), 1e-12));
        prop_assert_eq!(a.argmax(), b.argmax());
    }

    #[test]
    fn converted_tables_keep_their_row_argmax(raw in rows(3, 4)) {
        let t = table(&raw, Kind::Probability);
        let c = t.convert();
        prop_assert_eq!(c.kind(), Kind::Possibility);
        for (a, b) in t.rows().zip(c.rows()) {
            prop_assert_eq!(argmax(a), argmax(b));
        }
        let back = c.convert();
        for (a, b) in t.rows().zip(back.rows()) {
            prop_assert!(close(a, b, 1e-12));
        }
    }
}
