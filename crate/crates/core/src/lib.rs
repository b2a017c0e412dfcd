//! Last-block subsampling dueling bandits.
//!
//! The crate is organised around the pieces of a regret benchmark:
//!
//! - [`envs`]: one-parameter exponential-family arms and piecewise-stationary
//!   environments (oracle means, reward sampling, KL divergences).
//! - [`sda`]: the subsampling dueling policies LB-SDA, LB-SDA-LM (limited
//!   memory) and SW-LB-SDA (sliding window), with their history buffers.
//! - [`baselines`]: UCB1, kl-UCB, Thompson sampling and their sliding-window /
//!   discounted variants, plus EXP3S.
//! - [`harness`]: replication loop, dynamic-regret accounting, aggregation and
//!   CSV/manifest persistence.
//! - [`verify`]: independent oracles and trajectory checkers (balance
//!   function, leader-count identity, sliding-window leader bound, storage).
//! - [`cli`]: experiment config files, named presets and the commands behind
//!   the `sda-bench` binary.
//!
//! Every policy implements [`policy::Policy`]; round-based algorithms return a
//! set of arms per round, step-based baselines return a single arm.

pub mod baselines;
pub mod cli;
pub mod envs;
pub mod error;
pub mod harness;
pub mod policy;
pub mod sda;
pub mod verify;

pub use envs::{ArmModel, EnvironmentSpec, Family, Phase};
pub use error::{Error, Result};
pub use harness::{run_experiment, run_replication, AggregateResult, ExperimentConfig, RunRecord};
pub use policy::{Policy, PolicySpec};

/// Random stream used by every simulation. ChaCha keeps results identical
/// across platforms for a given seed.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Builds the random stream for one replication.
pub fn sim_rng(seed: u64) -> SimRng {
    use rand::SeedableRng;
    SimRng::seed_from_u64(seed)
}
