//! The O(n + K) implementations against their pair-sum definitions on 200
//! random instances: identical to 1e-9 relative or better.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use modsig::reference;
use modsig::{
    beta_weights, bias_alternative, bias_hat, degree_moments, log_likelihood, modularity_hat,
    sample_graph, variance_hat, CommunityAssignment, EdgeModel, PiVector,
};

fn rel_close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs().max(1e-12)
}

struct Instance {
    pi: PiVector,
    assignment: CommunityAssignment,
    r: f64,
    seed: u64,
}

fn instance(index: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(0xABCD_0000 + index);
    let n: usize = rng.random_range(5..=60);
    let k: usize = rng.random_range(2..=6.min(n - 1));
    let pi: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.2)).collect();
    let mut values: Vec<String> = (0..n).map(|i| (i % k).to_string()).collect();
    values.shuffle(&mut rng);
    Instance {
        pi: PiVector::from_values(pi).unwrap(),
        assignment: CommunityAssignment::from_values(&values),
        r: rng.random_range(0.05..5.0),
        seed: 0x5EED_0000 + index,
    }
}

/// Scales the parameters down until every pair mean is Bernoulli-feasible.
fn bernoulli_safe(p: &PiVector) -> PiVector {
    let mut top = [0.0f64; 2];
    for &v in p.pi() {
        if v > top[0] {
            top = [v, top[0]];
        } else if v > top[1] {
            top[1] = v;
        }
    }
    let max_mu = top[0] * top[1];
    let scale = (0.9 / max_mu).sqrt().min(1.0);
    PiVector::from_values(p.pi().iter().map(|v| v * scale).collect()).unwrap()
}

#[test]
fn factorized_sums_match_pair_sums() {
    for index in 0..200 {
        let inst = instance(index);
        let a = &inst.assignment;

        let b_fast = bias_hat(&inst.pi, a).unwrap();
        let b_ref = reference::bias_hat(&inst.pi, a).unwrap();
        assert!(rel_close(b_fast, b_ref, 1e-9), "bias #{index}: {b_fast} vs {b_ref}");

        let pi_bern = bernoulli_safe(&inst.pi);
        let families = [
            (EdgeModel::Poisson, &inst.pi),
            (EdgeModel::NegBin { r: inst.r }, &inst.pi),
            (EdgeModel::Bernoulli, &pi_bern),
        ];
        for (model, p) in families {
            let w = beta_weights(p, a).unwrap();
            let v_fast = variance_hat(p, &model, a).unwrap();
            let v_ref = reference::variance_hat(p, &model, a, &w.beta).unwrap();
            assert!(
                rel_close(v_fast, v_ref, 1e-9),
                "variance #{index} {model:?}: {v_fast} vs {v_ref}"
            );

            let alt_fast = bias_alternative(p, &model, a).unwrap();
            let alt_ref = reference::bias_alternative(p, &model, a).unwrap();
            assert!(
                rel_close(alt_fast, alt_ref, 1e-9),
                "alt bias #{index} {model:?}: {alt_fast} vs {alt_ref}"
            );

            let m_fast = degree_moments(p, &model).unwrap();
            let m_ref = reference::degree_moments(p, &model).unwrap();
            assert!(rel_close(m_fast.e_d1, m_ref.e_d1, 1e-9));
            for i in 0..p.len() {
                assert!(
                    rel_close(m_fast.e_d[i], m_ref.e_d[i], 1e-9)
                        && rel_close(m_fast.var_d[i], m_ref.var_d[i], 1e-9),
                    "moments #{index} {model:?} node {i}"
                );
            }
        }
    }
}

#[test]
fn graph_quantities_match_pair_sums() {
    let mut tested = 0;
    for index in 0..60 {
        let inst = instance(index);
        let sampled = sample_graph(&inst.pi, &EdgeModel::Poisson, inst.seed).unwrap();
        let (g, keep) = sampled.drop_isolated();
        let a = inst.assignment.restrict(&keep);
        if g.n() < 3 || a.is_degenerate() {
            continue;
        }
        tested += 1;

        let q_fast = modularity_hat(&g, &a).unwrap();
        let q_ref = reference::modularity_hat(&g, &a).unwrap();
        assert!(rel_close(q_fast, q_ref, 1e-12), "q #{index}: {q_fast} vs {q_ref}");

        for model in [EdgeModel::Poisson, EdgeModel::NegBin { r: inst.r }] {
            let ll_fast = log_likelihood(&g, &model).unwrap();
            let ll_ref = reference::log_likelihood(&g, &model).unwrap();
            assert!(
                rel_close(ll_fast, ll_ref, 1e-9),
                "ll #{index} {model:?}: {ll_fast} vs {ll_ref}"
            );
        }
    }
    assert!(tested >= 50, "only {tested} usable instances");
}
