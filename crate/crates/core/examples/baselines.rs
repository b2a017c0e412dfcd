//! Forgetting baselines on the Gaussian switching instance, driven one step
//! at a time through the `Policy` trait.
//!
//! ```bash
//! cargo run --release --example baselines
//! ```

use lbsda::baselines::index::klucb_index;
use lbsda::baselines::tuning;
use lbsda::cli::presets;
use lbsda::{Family, PolicySpec};

fn main() -> lbsda::Result<()> {
    println!("klucb(0, 1, f = 1) = {:.9}", klucb_index(0.0, 1.0, 1.0, Family::Bernoulli, 0.0));

    let env = presets::gaussian_switching_environment(10_000, [0.5; 4])?;
    println!(
        "sw-ucb tau = {}, d-ucb gamma = {:.5}, exp3s (alpha, gamma) = {:?}",
        tuning::sliding_window(&env, true),
        tuning::discount(&env, true),
        tuning::exp3s_parameters(&env)
    );

    for name in ["ucb1", "sw-ucb", "d-ucb", "sw-klucb", "d-klucb", "sw-ts", "dts", "exp3s"] {
        let mut policy = PolicySpec::named(name).build(&env)?;
        let mut rng = lbsda::sim_rng(3);
        let mut regret = 0.0;
        for t in 1..=env.horizon() {
            let arm = policy.select(&mut rng)[0];
            let reward = env.sample_reward(arm, t, &mut rng)?;
            regret += env.best_mean(t)? - env.oracle_mean(arm, t)?;
            policy.observe(arm, reward);
            policy.end_round(&mut rng);
        }
        println!("{name:<9} one-run dynamic regret {regret:>8.1}");
    }
    Ok(())
}
