//! Piecewise-stationary environments and KL divergences.
//!
//! ```bash
//! cargo run --release --example environments
//! ```

use lbsda::cli::presets;
use lbsda::envs::{kl_bernoulli, kl_means};
use lbsda::{ArmModel, EnvironmentSpec, Family, Phase};

fn main() -> lbsda::Result<()> {
    println!("kl(0.05, 0.15) = {:.10}", kl_bernoulli(0.05, 0.15));
    println!("gaussian kl(0, 1; sigma 0.5) = {}", kl_means(Family::Gaussian, 0.0, 1.0, 0.5));

    // two phases, the best arm swaps at t = 51
    let env = EnvironmentSpec::new(
        100,
        vec![
            Phase { start: 1, arms: vec![ArmModel::bernoulli(0.8)?, ArmModel::bernoulli(0.2)?] },
            Phase { start: 51, arms: vec![ArmModel::bernoulli(0.2)?, ArmModel::bernoulli(0.8)?] },
        ],
    )?;
    let mut rng = lbsda::sim_rng(1);
    for t in [1, 50, 51, 100] {
        println!(
            "t = {t:>3}: best mean {}, arm 0 mean {}, sample {}",
            env.best_mean(t)?,
            env.oracle_mean(0, t)?,
            env.sample_reward(0, t, &mut rng)?
        );
    }

    let g = presets::gaussian_switching_environment(10_000, presets::SIGMA_PATH)?;
    for p in g.phases() {
        let means: Vec<f64> = p.arms.iter().map(|a| a.mean).collect();
        println!("phase from {:>5}: means {means:?}, sigma {}", p.start, p.arms[0].scale);
    }
    Ok(())
}
