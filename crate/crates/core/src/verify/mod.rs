//! Independent oracles and checkers: the balance function and its upper
//! bound, the leader-count identity of LB-SDA, the windowed leader bound of
//! SW-LB-SDA and the storage bound of LB-SDA-LM.

pub mod balance;
pub mod suites;
pub mod trajectory;

pub use balance::{
    balance_exact_bernoulli, balance_monte_carlo, check_balance_upper_bound, check_balance_upper_bound_grid,
    BalanceEstimate, BalanceQuery,
};
pub use suites::{Suite, SuiteOptions, SuiteOutcome};
pub use trajectory::{
    check_lemma_wt, check_storage, check_sw_leader_bound, CheckReport, RoundRecord, Trajectory, TrajectoryKind,
};
