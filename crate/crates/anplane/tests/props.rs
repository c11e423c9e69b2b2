//! Property-based invariants across the library: things that must hold for
//! any valid input, not just the worked examples.

use anplane::data::{
    CandidateRecord, ConditionalSystem, DistortionTable, FiniteDistribution, JointInstance,
    SegmentRecord,
};
use anplane::divergence;
use anplane::frontier::{self, FrontierDivergence};
use anplane::sweep;
use proptest::prelude::*;

fn norm_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.01..1.0f64, n).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn dist_pair() -> impl Strategy<Value = (FiniteDistribution, FiniteDistribution)> {
    (2usize..=5).prop_flat_map(|n| {
        (norm_vec(n), norm_vec(n)).prop_map(move |(p, q)| {
            (
                FiniteDistribution::new(labels(n), p).unwrap(),
                FiniteDistribution::new(labels(n), q).unwrap(),
            )
        })
    })
}

proptest! {
    #[test]
    fn tv_is_a_bounded_symmetric_metric((p, q) in dist_pair()) {
        let pq = divergence::total_variation(&p, &q).unwrap().value;
        let qp = divergence::total_variation(&q, &p).unwrap().value;
        prop_assert!((0.0..=1.0 + 1e-12).contains(&pq));
        prop_assert!((pq - qp).abs() < 1e-15);
        let pp = divergence::total_variation(&p, &p).unwrap().value;
        prop_assert_eq!(pp, 0.0);
    }

    #[test]
    fn kl_is_nonnegative_and_zero_on_self((p, q) in dist_pair()) {
        let v = divergence::kl_divergence(&p, &q).unwrap().value;
        prop_assert!(v >= 0.0);
        let vv = divergence::kl_divergence(&p, &p).unwrap().value;
        prop_assert!(vv.abs() < 1e-15);
    }

    #[test]
    fn d2_identity_kernel_is_l2((p, q) in dist_pair()) {
        let n = p.probs().len();
        let eye: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
            .collect();
        let v = divergence::d2_exact(&p, &q, &eye).unwrap().value;
        let l2 = p
            .probs()
            .iter()
            .zip(q.probs())
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        prop_assert!((v - l2).abs() < 1e-12);
    }

    #[test]
    fn constant_critics_see_no_difference(
        (p, q) in dist_pair(),
        c in -5.0..5.0f64,
        k in 1usize..12,
        exponent in 1u8..=3,
    ) {
        let n = p.probs().len();
        let draws = vec![vec![c; n]; k];
        let v = divergence::dp_monte_carlo(q.probs(), p.probs(), &draws, exponent as f64)
            .unwrap()
            .value;
        prop_assert!(v < 1e-10, "constant critic produced {v}");
    }

    #[test]
    fn risk_chain_orders_hold_for_any_critics(
        epsilon in 0.05..0.95f64,
        np in 2usize..5,
        nq in 2usize..5,
        rows in proptest::collection::vec(
            proptest::collection::vec(-10.0..10.0f64, 10),
            3..30,
        ),
    ) {
        let samples_p: Vec<f64> = (0..np).map(|i| i as f64).collect();
        let samples_q: Vec<f64> = (0..nq).map(|i| 10.0 + i as f64).collect();
        let mut idx = 0usize;
        let report = divergence::classification_risk_check(
            epsilon,
            &samples_p,
            &samples_q,
            rows.len(),
            |pts| {
                let row = &rows[idx % rows.len()];
                idx += 1;
                Ok(row[..pts.len()].to_vec())
            },
        )
        .unwrap();
        prop_assert!(report.neg_d_inf <= report.neg_d1 + 1e-12);
        prop_assert!(report.chain_holds, "{report:?}");
    }

    #[test]
    fn system_marginal_is_a_mixture(
        (nx, ny) in (2usize..=4, 2usize..=4),
    ) {
        // Deterministic inner generation keeps the strategy simple: the
        // outer shape is the random part that matters here.
        let rows: Vec<Vec<f64>> = (0..nx)
            .map(|x| {
                let raw: Vec<f64> = (0..ny).map(|y| 1.0 + ((x * 7 + y * 3) % 5) as f64).collect();
                let s: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / s).collect()
            })
            .collect();
        let p_x: Vec<f64> = {
            let raw: Vec<f64> = (0..nx).map(|x| 1.0 + (x % 3) as f64).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / s).collect()
        };
        let sys = ConditionalSystem::new(labels(nx), labels(ny), rows.clone()).unwrap();
        let m = frontier::system_marginal(&sys, &p_x).unwrap();
        let total: f64 = m.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for (y, &got) in m.probs().iter().enumerate() {
            let manual: f64 = (0..nx).map(|x| p_x[x] * rows[x][y]).sum();
            prop_assert!((got - manual).abs() < 1e-15);
        }
    }
}

fn pool() -> impl Strategy<Value = Vec<CandidateRecord>> {
    proptest::collection::vec(
        (-1.0..1.0f64, -30.0..-0.01f64, 1u64..40),
        1..6,
    )
    .prop_map(|raw| {
        raw.into_iter()
            .enumerate()
            .map(|(i, (accuracy, logprob, token_count))| CandidateRecord {
                text: format!("t{i}"),
                system_id: format!("s{i}"),
                accuracy,
                logprob,
                token_count,
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn oracle_pick_is_the_scan_argmax(cands in pool(), beta in 0.0..10.0f64) {
        let got = sweep::oracle_select_index(&cands, beta).unwrap();
        let best = cands
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.accuracy + beta * c.logprob / c.token_count as f64))
            .fold((0usize, f64::NEG_INFINITY), |acc, (i, s)| {
                if s > acc.1 { (i, s) } else { acc }
            })
            .0;
        prop_assert_eq!(got, best);
    }

    #[test]
    fn sweep_means_blend_over_partitions(
        pools_a in proptest::collection::vec(pool(), 1..4),
        pools_b in proptest::collection::vec(pool(), 1..4),
        beta in 0.0..5.0f64,
    ) {
        let seg = |tag: &str, i: usize, c: Vec<CandidateRecord>| SegmentRecord {
            segment_id: format!("{tag}{i}"),
            source: String::new(),
            reference: String::new(),
            candidates: c,
        };
        let a: Vec<SegmentRecord> = pools_a.into_iter().enumerate().map(|(i, c)| seg("a", i, c)).collect();
        let b: Vec<SegmentRecord> = pools_b.into_iter().enumerate().map(|(i, c)| seg("b", i, c)).collect();
        let all: Vec<SegmentRecord> = a.iter().cloned().chain(b.iter().cloned()).collect();
        let ca = sweep::sweep_curve(&a, &[beta]).unwrap();
        let cb = sweep::sweep_curve(&b, &[beta]).unwrap();
        let cc = sweep::sweep_curve(&all, &[beta]).unwrap();
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let blended = (na * ca.points[0].accuracy + nb * cb.points[0].accuracy) / (na + nb);
        prop_assert!((cc.points[0].accuracy - blended).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn grid_staircase_is_monotone(
        a in 0.05..0.95f64,
        d01 in 0.05..1.0f64,
        d10 in 0.05..1.0f64,
        r0 in 0.05..0.95f64,
    ) {
        let inst = JointInstance::new(
            vec!["x0".into()],
            vec!["y0".into(), "y1".into()],
            vec![vec![a, 1.0 - a]],
        )
        .unwrap();
        let delta =
            DistortionTable::new(vec![vec![vec![0.0, d01], vec![d10, 0.0]]]).unwrap();
        let r_y =
            FiniteDistribution::new(vec!["y0".into(), "y1".into()], vec![r0, 1.0 - r0]).unwrap();
        let fr = frontier::brute_force_frontier(&inst, &delta, &r_y, &FrontierDivergence::Tv, 40)
            .unwrap();
        prop_assert!(!fr.points.is_empty());
        for pair in fr.points.windows(2) {
            prop_assert!(pair[0].naturalness < pair[1].naturalness);
            prop_assert!(pair[0].accuracy >= pair[1].accuracy);
        }
    }

    #[test]
    fn lp_at_beta_zero_solves_the_unconstrained_problem(
        joint_raw in proptest::collection::vec(0.01..1.0f64, 4),
        delta_raw in proptest::collection::vec(0.0..1.0f64, 8),
        r0 in 0.05..0.95f64,
    ) {
        let s: f64 = joint_raw.iter().sum();
        let inst = JointInstance::new(
            vec!["x0".into(), "x1".into()],
            vec!["y0".into(), "y1".into()],
            vec![
                vec![joint_raw[0] / s, joint_raw[1] / s],
                vec![joint_raw[2] / s, joint_raw[3] / s],
            ],
        )
        .unwrap();
        let delta = DistortionTable::new(vec![
            vec![
                vec![delta_raw[0], delta_raw[1]],
                vec![delta_raw[2], delta_raw[3]],
            ],
            vec![
                vec![delta_raw[4], delta_raw[5]],
                vec![delta_raw[6], delta_raw[7]],
            ],
        ])
        .unwrap();
        let r_y =
            FiniteDistribution::new(vec!["y0".into(), "y1".into()], vec![r0, 1.0 - r0]).unwrap();
        let fr = frontier::scalarization_frontier(
            &inst,
            &delta,
            &r_y,
            &FrontierDivergence::Tv,
            &[0.0],
            2,
            5,
        )
        .unwrap();
        let w = frontier::selection_weights(&inst, &delta).unwrap();
        let best: f64 = -w
            .iter()
            .map(|row| row.iter().cloned().fold(f64::INFINITY, f64::min))
            .sum::<f64>();
        prop_assert!((fr.points[0].accuracy - best).abs() < 1e-8);
    }
}
