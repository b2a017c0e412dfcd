//! Last-block subsampling dueling algorithms.
//!
//! All three variants work in rounds. Round 1 pulls every arm once; from then
//! on a leader is elected and every other arm (a challenger) duels it: the
//! challenger's mean is compared to the mean of the leader's most recent
//! block of the same size. Winning challengers are pulled; if none wins, the
//! leader alone is pulled. Arms with very few samples are always pulled
//! (forced exploration at rate `√(ln r)`, or `√(ln τ)` with a window).
//!
//! - [`LbSda`] keeps the full history, or a capacity-bounded history when
//!   built with a [`MemorySchedule`] (LB-SDA-LM).
//! - [`SwLbSda`] only uses the rewards of the last `τ` rounds and adds the
//!   modified leader rule and diversity flags.
//!
//! Within a round, arms are pulled in ascending index order.

mod history;
mod lbsda;
mod schedule;
mod sliding;

use rand::Rng;

pub use history::HistoryBuffer;
pub use lbsda::LbSda;
pub use schedule::{MemoryForm, MemorySchedule};
pub use sliding::{diversity_flags, diversity_window, sw_leader_update, SwLbSda};

use crate::error::{Error, Result};

/// `√(ln x)`, the forced-exploration level for round `x` (or window `x`).
pub fn forced_exploration_level(x: u64) -> f64 {
    (x.max(1) as f64).ln().sqrt()
}

/// Leader election shared by the stationary variants: the arm with most
/// pulls, then the largest reward sum, then uniformly at random.
pub fn lbsda_leader<R: Rng + ?Sized>(counts: &[u64], sums: &[f64], rng: &mut R) -> Result<usize> {
    if counts.is_empty() || counts.len() != sums.len() {
        return Err(Error::Argument(
            "leader election needs matching, non-empty counts and sums".into(),
        ));
    }
    Ok(argmax_count_then_sum(0..counts.len(), counts, sums, None, rng))
}

/// Argmax over `candidates` of `counts`, breaking ties by larger `sums`, then
/// in favour of `incumbent`, then uniformly at random.
pub(crate) fn argmax_count_then_sum<R: Rng + ?Sized>(
    candidates: impl IntoIterator<Item = usize>,
    counts: &[u64],
    sums: &[f64],
    incumbent: Option<usize>,
    rng: &mut R,
) -> usize {
    let mut best: Vec<usize> = Vec::new();
    for k in candidates {
        match best.first() {
            None => best.push(k),
            Some(&b) => {
                let ord = counts[k]
                    .cmp(&counts[b])
                    .then_with(|| sums[k].total_cmp(&sums[b]));
                match ord {
                    std::cmp::Ordering::Greater => {
                        best.clear();
                        best.push(k);
                    }
                    std::cmp::Ordering::Equal => best.push(k),
                    std::cmp::Ordering::Less => {}
                }
            }
        }
    }
    if best.len() == 1 {
        return best[0];
    }
    if let Some(i) = incumbent.filter(|i| best.contains(i)) {
        return i;
    }
    best[rng.random_range(0..best.len())]
}
