//! The balance function: exact enumeration, Monte Carlo and the upper bound.
//!
//! ```bash
//! cargo run --release --example balance
//! ```

use lbsda::verify::balance::{
    balance_exact_bernoulli, balance_monte_carlo, balance_upper_bound_rhs, tradeoff_support_point, BalanceQuery,
};
use lbsda::ArmModel;

fn main() -> lbsda::Result<()> {
    let mut rng = lbsda::sim_rng(0);
    for (j, m) in [(1, 1), (3, 10), (5, 100)] {
        let q = BalanceQuery::bernoulli(0.6, 0.4, j, m)?;
        let exact = balance_exact_bernoulli(&q)?;
        let mc = balance_monte_carlo(&q, 200_000, &mut rng);
        let u = tradeoff_support_point(&q)?;
        println!(
            "j = {j}, M = {m:>3}: exact {exact:.6e}, monte carlo {:.6e} +- {:.1e}, bound at u = {u}: {:.6e}",
            mc.estimate,
            mc.std_error,
            balance_upper_bound_rhs(&q, u)?
        );
    }

    // no exact form for gaussian arms; the estimator still applies
    let q = BalanceQuery::new(ArmModel::gaussian(1.0, 0.5)?, ArmModel::gaussian(0.5, 0.5)?, 4, 20)?;
    let mc = balance_monte_carlo(&q, 200_000, &mut rng);
    println!("gaussian j = 4, M = 20: {:.6e} +- {:.1e}", mc.estimate, mc.std_error);
    Ok(())
}
