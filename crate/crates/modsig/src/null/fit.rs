use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::null::family::{EdgeModel, Family};
use crate::null::{estimate_pi, PiVector};

/// Dispersion search range: r is optimized on a log scale over
/// [1e-6, 1e6]. A fit at the upper cap is indistinguishable from Poisson.
const LN_R_MIN: f64 = -13.815510557964274; // ln 1e-6
const LN_R_MAX: f64 = 13.815510557964274; // ln 1e6
/// Absolute tolerance of every one-dimensional parameter search (on ln r,
/// and on omega directly).
const SEARCH_TOL: f64 = 1e-8;
const OMEGA_MAX: f64 = 1.0 - 1e-9;
const MAX_SWEEPS: usize = 200;
/// Relative log-likelihood gain per sweep below which the zero-inflated
/// dispersion alternation counts as settled.
const LL_TOL: f64 = 1e-10;

/// A fitted edge-value model with its maximized log-likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedEdgeModel {
    pub model: EdgeModel,
    pub log_likelihood: f64,
    /// True when the dispersion estimate hit the upper cap, meaning the data
    /// carry no evidence of overdispersion.
    pub r_at_cap: bool,
    pub warnings: Vec<String>,
}

/// One row of a model comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparisonRow {
    pub model: EdgeModel,
    /// n degree parameters plus the family's extra parameters. The degree
    /// parameters are plug-in estimates, never re-fitted per family, so every
    /// row shares the same n-dimensional base.
    pub parameter_count: usize,
    pub log_likelihood: f64,
    /// 2 (saturated - model) log-likelihood.
    pub residual_deviance: f64,
    pub r_at_cap: bool,
    pub warnings: Vec<String>,
}

/// Goodness-of-fit comparison of the count families on one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub saturated_log_likelihood: f64,
    pub rows: Vec<ModelComparisonRow>,
}

/// Log-likelihood of the full adjacency (every unordered pair, zeros
/// included) under the model with plug-in degree parameters.
///
/// Quadratic in n except for Poisson, where the zero pairs reduce to a
/// closed form and the cost is O(n + m).
pub fn log_likelihood(g: &Graph, m: &EdgeModel) -> Result<f64> {
    m.validate()?;
    validate_weights(g, m.family())?;
    let p = estimate_pi(g)?;
    check_bernoulli_feasible(&p, m.family())?;
    Ok(log_likelihood_plugin(g, &p, m))
}

/// Likelihood with caller-supplied degree parameters; inputs assumed valid.
pub(crate) fn log_likelihood_plugin(g: &Graph, p: &PiVector, m: &EdgeModel) -> f64 {
    if let EdgeModel::Poisson = m {
        // sum_{i<j} [a ln mu - ln a! ] - sum_{i<j} mu, the second sum in
        // closed form over all pairs.
        let pi = p.pi();
        let edge_part: f64 = g
            .edges()
            .iter()
            .map(|&(i, j, w)| {
                if w == 0.0 {
                    0.0
                } else {
                    w * (pi[i] * pi[j]).ln() - libm::lgamma(w + 1.0)
                }
            })
            .sum();
        return edge_part - 0.5 * p.expected_total_degree();
    }
    let n = g.n();
    let pi = p.pi();
    // Row partials are collected in index order and summed sequentially, so
    // the result is identical for any rayon worker count.
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let nbrs = g.neighbors(i);
            let mut next = nbrs.partition_point(|&(j, _)| j <= i);
            let mut acc = 0.0;
            for j in (i + 1)..n {
                let w = if next < nbrs.len() && nbrs[next].0 == j {
                    let w = nbrs[next].1;
                    next += 1;
                    w
                } else {
                    0.0
                };
                acc += m.log_pmf(w, pi[i] * pi[j]);
            }
            acc
        })
        .collect();
    rows.iter().sum()
}

/// Log-likelihood of the saturated count model: one free Poisson mean per
/// pair, maximized at the observed value. Zero pairs contribute zero.
pub fn saturated_log_likelihood(g: &Graph) -> Result<f64> {
    validate_weights(g, Family::Poisson)?;
    Ok(g.edges()
        .iter()
        .map(|&(_, _, w)| {
            if w == 0.0 {
                0.0
            } else {
                -w + w * w.ln() - libm::lgamma(w + 1.0)
            }
        })
        .sum())
}

/// Fits one family by maximum likelihood with plug-in degree parameters.
///
/// Families with no extra parameter only evaluate the likelihood. The
/// dispersion r is found by golden-section search on ln r (the profile is
/// unimodal in practice; the search is deterministic, about 45 evaluations
/// for tolerance 1e-8). Zero inflation omega is searched on [0, 1 - 1e-9].
/// The zero-inflated negative binomial alternates the two one-dimensional
/// searches until both moves fall below tolerance.
pub fn fit_edge_model(g: &Graph, family: Family) -> Result<FittedEdgeModel> {
    validate_weights(g, family)?;
    let p = estimate_pi(g)?;
    check_bernoulli_feasible(&p, family)?;
    let mut warnings = Vec::new();
    let (model, ll, r_at_cap) = match family {
        Family::Bernoulli => {
            let m = EdgeModel::Bernoulli;
            (m, log_likelihood_plugin(g, &p, &m), false)
        }
        Family::Poisson => {
            let m = EdgeModel::Poisson;
            (m, log_likelihood_plugin(g, &p, &m), false)
        }
        Family::NegBin => {
            let (t, ll) = golden_max(
                |t| log_likelihood_plugin(g, &p, &EdgeModel::NegBin { r: t.exp() }),
                LN_R_MIN,
                LN_R_MAX,
                SEARCH_TOL,
            );
            let at_cap = cap_flags(t, &mut warnings);
            (EdgeModel::NegBin { r: t.exp() }, ll, at_cap)
        }
        Family::ZiPoisson => {
            let (omega, ll) = golden_max(
                |w| log_likelihood_plugin(g, &p, &EdgeModel::ZiPoisson { omega: w }),
                0.0,
                OMEGA_MAX,
                SEARCH_TOL,
            );
            (EdgeModel::ZiPoisson { omega }, ll, false)
        }
        Family::ZiNegBin => {
            let (omega, t, ll, settled) = fit_zinb(g, &p);
            if !settled {
                warnings.push(format!(
                    "zero-inflation/dispersion fit was still drifting after {MAX_SWEEPS} \
                     sweeps; reporting the best point found"
                ));
            }
            let at_cap = cap_flags(t, &mut warnings);
            (
                EdgeModel::ZiNegBin {
                    omega,
                    r: t.exp(),
                },
                ll,
                at_cap,
            )
        }
    };
    Ok(FittedEdgeModel {
        model,
        log_likelihood: ll,
        r_at_cap,
        warnings,
    })
}

fn cap_flags(t: f64, warnings: &mut Vec<String>) -> bool {
    if t >= LN_R_MAX - 10.0 * SEARCH_TOL {
        warnings.push(
            "dispersion estimate hit the upper cap r = 1e6: no evidence of overdispersion, effectively Poisson".into(),
        );
        true
    } else {
        if t <= LN_R_MIN + 10.0 * SEARCH_TOL {
            warnings.push(
                "dispersion estimate hit the lower cap r = 1e-6: extreme overdispersion".into(),
            );
        }
        false
    }
}

/// Coordinate ascent for (omega, ln r), each step a golden-section search.
/// Convergence is judged on the likelihood, not the parameters: extra
/// zeros can be traded between omega and small r along a near-flat ridge,
/// where the parameter zigzag long outlives any change in the fit itself.
/// Returns the best point found and whether the ascent settled.
fn fit_zinb(g: &Graph, p: &PiVector) -> (f64, f64, f64, bool) {
    let ll = |omega: f64, t: f64| {
        log_likelihood_plugin(
            g,
            p,
            &EdgeModel::ZiNegBin {
                omega,
                r: t.exp(),
            },
        )
    };
    // Start the alternation from the plain negative binomial fit (the
    // omega = 0 slice).
    let mut omega = 0.0;
    let (mut t, mut value) = golden_max(|t| ll(omega, t), LN_R_MIN, LN_R_MAX, SEARCH_TOL);
    for _ in 0..MAX_SWEEPS {
        let (omega_new, _) = golden_max(|w| ll(w, t), 0.0, OMEGA_MAX, SEARCH_TOL);
        let (t_new, value_new) =
            golden_max(|t| ll(omega_new, t), LN_R_MIN, LN_R_MAX, SEARCH_TOL);
        let moved = (omega_new - omega).abs().max((t_new - t).abs());
        let gained = value_new - value;
        omega = omega_new;
        t = t_new;
        value = value_new;
        if moved <= SEARCH_TOL || gained <= LL_TOL * (1.0 + value.abs()) {
            return (omega, t, value, true);
        }
    }
    (omega, t, value, false)
}

/// Fits all count families and reports deviances against the saturated
/// model. Rows appear in fixed order: poisson, zipoisson, negbin, zinegbin.
pub fn compare_models(g: &Graph) -> Result<ModelComparison> {
    validate_weights(g, Family::Poisson)?;
    let saturated = saturated_log_likelihood(g)?;
    let n = g.n();
    let mut rows = Vec::with_capacity(4);
    for family in [
        Family::Poisson,
        Family::ZiPoisson,
        Family::NegBin,
        Family::ZiNegBin,
    ] {
        let fit = fit_edge_model(g, family)?;
        rows.push(ModelComparisonRow {
            model: fit.model,
            parameter_count: n + family.extra_parameter_count(),
            log_likelihood: fit.log_likelihood,
            residual_deviance: 2.0 * (saturated - fit.log_likelihood),
            r_at_cap: fit.r_at_cap,
            warnings: fit.warnings,
        });
    }
    Ok(ModelComparison {
        saturated_log_likelihood: saturated,
        rows,
    })
}

fn validate_weights(g: &Graph, family: Family) -> Result<()> {
    match family {
        Family::Bernoulli => {
            for &(i, j, w) in g.edges() {
                if w != 1.0 && w != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "bernoulli model requires 0/1 edge values, found {w} on {:?} -- {:?}",
                        g.node_label(i),
                        g.node_label(j)
                    )));
                }
            }
            Ok(())
        }
        _ => {
            for &(_, _, w) in g.edges() {
                if w.fract() != 0.0 {
                    return Err(Error::NonIntegerWeight {
                        context: format!("{} model", family.name()),
                        weight: w,
                    });
                }
            }
            Ok(())
        }
    }
}

/// Strict feasibility: the largest plug-in edge mean must stay below 1 for
/// the Bernoulli family.
fn check_bernoulli_feasible(p: &PiVector, family: Family) -> Result<()> {
    if family != Family::Bernoulli {
        return Ok(());
    }
    let (mut hi1, mut hi2) = (0.0f64, 0.0f64);
    for &x in p.pi() {
        if x > hi1 {
            hi2 = hi1;
            hi1 = x;
        } else if x > hi2 {
            hi2 = x;
        }
    }
    let mu_max = hi1 * hi2;
    if mu_max >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "bernoulli model infeasible: largest plug-in edge mean {mu_max:.6} reaches 1"
        )));
    }
    Ok(())
}

/// Golden-section maximization on [a, b]; assumes a unimodal objective.
/// Returns the midpoint of the final bracket (width <= tol) and its value.
/// One objective evaluation per iteration after the initial two.
fn golden_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    const INVPHI2: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (a, b);
    let mut h = b - a;
    let mut c = a + INVPHI2 * h;
    let mut d = a + INVPHI * h;
    let mut fc = f(c);
    let mut fd = f(d);
    while h > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            h = b - a;
            c = a + INVPHI2 * h;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            h = b - a;
            d = a + INVPHI * h;
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, SelfLoopPolicy};

    #[test]
    fn golden_max_finds_quadratic_peak() {
        let (x, fx) = golden_max(|x| -(x - 2.0) * (x - 2.0), -10.0, 10.0, 1e-8);
        assert!((x - 2.0).abs() <= 1e-7);
        assert!((-1e-13..=0.0).contains(&fx));
        // Peak at a boundary is found at the boundary.
        let (x, _) = golden_max(|x| x, 0.0, 1.0, 1e-8);
        assert!(x >= 1.0 - 1e-7);
    }

    #[test]
    fn poisson_shortcut_matches_pair_scan() {
        let g = build_graph(
            [
                ("a", "b", 2.0),
                ("b", "c", 1.0),
                ("c", "d", 3.0),
                ("a", "d", 1.0),
                ("b", "e", 1.0),
            ],
            SelfLoopPolicy::Reject,
        )
        .unwrap();
        let p = estimate_pi(&g).unwrap();
        let fast = log_likelihood_plugin(&g, &p, &EdgeModel::Poisson);
        // Pair-by-pair evaluation of the same likelihood.
        let mut slow = 0.0;
        for i in 0..g.n() {
            for j in (i + 1)..g.n() {
                let w = g
                    .neighbors(i)
                    .iter()
                    .find(|&&(k, _)| k == j)
                    .map_or(0.0, |&(_, w)| w);
                slow += EdgeModel::Poisson.log_pmf(w, p.pi()[i] * p.pi()[j]);
            }
        }
        assert!((fast - slow).abs() <= 1e-12 * slow.abs());
    }

    #[test]
    fn zi_at_zero_matches_base_likelihood() {
        let g = build_graph(
            [("a", "b", 2.0), ("b", "c", 1.0), ("a", "c", 1.0), ("c", "d", 4.0)],
            SelfLoopPolicy::Reject,
        )
        .unwrap();
        // Poisson takes a closed-form shortcut over the zero pairs, so its
        // sum order differs from the pair scan: equality up to a few ulps.
        let zip = log_likelihood(&g, &EdgeModel::ZiPoisson { omega: 0.0 }).unwrap();
        let pois = log_likelihood(&g, &EdgeModel::Poisson).unwrap();
        assert!((zip - pois).abs() <= 1e-14 * pois.abs());
        // Both negative binomial variants go through the same pair scan and
        // the zero-inflation delegates term by term: bitwise equal.
        let zinb = log_likelihood(&g, &EdgeModel::ZiNegBin { omega: 0.0, r: 0.9 }).unwrap();
        let nb = log_likelihood(&g, &EdgeModel::NegBin { r: 0.9 }).unwrap();
        assert_eq!(zinb, nb);
    }

    #[test]
    fn count_models_reject_fractional_weights() {
        let g = build_graph([("a", "b", 1.5), ("b", "c", 1.0)], SelfLoopPolicy::Reject).unwrap();
        assert!(matches!(
            log_likelihood(&g, &EdgeModel::Poisson),
            Err(Error::NonIntegerWeight { .. })
        ));
        assert!(log_likelihood(&g, &EdgeModel::Bernoulli).is_err());
    }

    #[test]
    fn bernoulli_rejects_infeasible_means() {
        let g = build_graph(
            (0..6).map(|k| (format!("x{k}"), "hub".to_string(), 1.0)),
            SelfLoopPolicy::Reject,
        )
        .unwrap();
        // hub degree 6, total 12: pi_hub = 6/sqrt(12) = 1.73 and the largest
        // pair mean is 1.73 * 0.29 = 0.5 < 1, so this one is feasible.
        assert!(log_likelihood(&g, &EdgeModel::Bernoulli).is_ok());
        let g2 = build_graph(
            (0..40).map(|k| (format!("x{k}"), format!("hub{}", k % 2), 1.0)),
            SelfLoopPolicy::Reject,
        )
        .unwrap();
        // Two hubs of degree 20, total degree 80: pi_hub = 20/sqrt(80) ~ 2.24
        // and their pair mean ~ 5 >= 1.
        assert!(matches!(
            log_likelihood(&g2, &EdgeModel::Bernoulli),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn saturated_likelihood_zero_for_simple_graph() {
        // All weights 1: each edge contributes -1 + 0 - 0 = -1.
        let g = build_graph([("a", "b", 1.0), ("b", "c", 1.0)], SelfLoopPolicy::Reject).unwrap();
        assert_eq!(saturated_log_likelihood(&g).unwrap(), -2.0);
    }

    #[test]
    fn poisson_fit_on_poisson_data_caps_dispersion() {
        // Regular-ish integer graph with no overdispersion: the negative
        // binomial profile increases in r and caps out.
        let edges: Vec<(String, String, f64)> = (0..12)
            .map(|i| (format!("n{i}"), format!("n{}", (i + 1) % 12), 1.0))
            .collect();
        let g = build_graph(edges, SelfLoopPolicy::Reject).unwrap();
        let fit = fit_edge_model(&g, Family::NegBin).unwrap();
        assert!(fit.r_at_cap);
        assert!(!fit.warnings.is_empty());
        let pois = fit_edge_model(&g, Family::Poisson).unwrap();
        assert!((fit.log_likelihood - pois.log_likelihood).abs() < 1e-3);
    }

    #[test]
    fn comparison_orders_rows_and_deviances_nonnegative() {
        let g = build_graph(
            [
                ("a", "b", 3.0),
                ("a", "c", 1.0),
                ("b", "c", 2.0),
                ("c", "d", 1.0),
                ("d", "e", 5.0),
                ("a", "e", 1.0),
            ],
            SelfLoopPolicy::Reject,
        )
        .unwrap();
        let cmp = compare_models(&g).unwrap();
        let names: Vec<&str> = cmp.rows.iter().map(|r| r.model.family().name()).collect();
        assert_eq!(names, ["poisson", "zi-poisson", "negbin", "zi-negbin"]);
        assert_eq!(cmp.rows[0].parameter_count, 5);
        assert_eq!(cmp.rows[1].parameter_count, 6);
        assert_eq!(cmp.rows[2].parameter_count, 6);
        assert_eq!(cmp.rows[3].parameter_count, 7);
        for row in &cmp.rows {
            assert!(
                row.residual_deviance >= -1e-9,
                "{}: deviance {}",
                row.model.family().name(),
                row.residual_deviance
            );
        }
        // Nested families cannot fit worse (up to search tolerance).
        let ll: Vec<f64> = cmp.rows.iter().map(|r| r.log_likelihood).collect();
        assert!(ll[1] >= ll[0] - 1e-6, "zip {} vs poisson {}", ll[1], ll[0]);
        assert!(ll[3] >= ll[2] - 1e-6, "zinb {} vs nb {}", ll[3], ll[2]);
        assert!(ll[3] >= ll[1] - 1e-4, "zinb {} vs zip {}", ll[3], ll[1]);
    }
}
