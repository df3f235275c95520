//! Degree-parameter estimates come with closed-form standard errors; this
//! checks their calibration by simulation.

use modsig::{clt_standard_errors, estimate_pi, sample_graph, EdgeModel, PiVector};

pub fn main() {
    let n = 300;
    let truth: Vec<f64> = (0..n).map(|i| 0.4 + 1.6 * (i as f64) / (n as f64)).collect();
    let p = PiVector::from_values(truth.clone()).unwrap();
    let model = EdgeModel::Poisson;

    // One draw: estimate each pi_i and its standard error.
    let g = sample_graph(&p, &model, 99).unwrap();
    let p_hat = estimate_pi(&g).unwrap();
    let se = clt_standard_errors(&p_hat, &model).unwrap();
    println!("{:>6} {:>8} {:>10} {:>10}", "node", "true", "estimate", "std err");
    for i in (0..n).step_by(60) {
        println!(
            "{:>6} {:>8.3} {:>10.3} {:>10.4}",
            i,
            truth[i],
            p_hat.pi()[i],
            se.se_pi(i),
        );
    }

    // Coverage over repeated draws: a 95% interval should cover the truth
    // about 95% of the time, averaged over nodes.
    let replicates = 300;
    let mut covered = 0usize;
    let mut total = 0usize;
    for rep in 0..replicates {
        let g = sample_graph(&p, &model, 1000 + rep).unwrap();
        if g.isolated_nodes().is_empty() {
            let p_hat = estimate_pi(&g).unwrap();
            let se = clt_standard_errors(&p_hat, &model).unwrap();
            for (i, &t) in truth.iter().enumerate() {
                let half = 1.96 * se.se_pi(i);
                if (p_hat.pi()[i] - t).abs() <= half {
                    covered += 1;
                }
                total += 1;
            }
        }
    }
    let coverage = covered as f64 / total as f64;
    println!("\nnominal 95% interval covers the truth {:.1}% of the time", 100.0 * coverage);
    println!("({} replicates, {} nodes each)", replicates, n);
}
