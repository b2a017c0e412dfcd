//! The balance function
//! `α(M, j) = E_{X ~ ν⋆_j}[(1 - F_{ν_j}(X))^M]`, where `ν_j` is the law of a
//! sum of `j` i.i.d. rewards: the chance that one size-`j` block of the
//! optimal arm is beaten by all of `M` independent size-`j` blocks of a
//! suboptimal arm.
//!
//! Bernoulli arms admit an exact evaluation by binomial enumeration; every
//! family has a Monte Carlo estimator with a standard error.

use rand::Rng;
use statrs::function::erf::erfc;

use crate::envs::{kl_divergence, ArmModel, Family};
use crate::error::{Error, Result};

/// Largest block size accepted by the exact Bernoulli enumeration.
pub const MAX_EXACT_BLOCK: u32 = 60;

/// Absolute slack on exact-versus-bound comparisons.
pub const BOUND_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceQuery {
    pub optimal: ArmModel,
    pub suboptimal: ArmModel,
    /// Block size `j ≥ 1`.
    pub block_size: u32,
    /// Number of suboptimal blocks `M`.
    pub duel_count: u64,
}

impl BalanceQuery {
    pub fn new(optimal: ArmModel, suboptimal: ArmModel, block_size: u32, duel_count: u64) -> Result<Self> {
        if !optimal.comparable(&suboptimal) {
            return Err(Error::Domain(
                "balance query arms must share a family (and σ)".into(),
            ));
        }
        if optimal.mean <= suboptimal.mean {
            return Err(Error::Argument(format!(
                "optimal mean {} must exceed suboptimal mean {}",
                optimal.mean, suboptimal.mean
            )));
        }
        if block_size == 0 {
            return Err(Error::Argument("block size must be >= 1".into()));
        }
        Ok(BalanceQuery {
            optimal,
            suboptimal,
            block_size,
            duel_count,
        })
    }

    pub fn bernoulli(p_opt: f64, p_sub: f64, block_size: u32, duel_count: u64) -> Result<Self> {
        Self::new(
            ArmModel::bernoulli(p_opt)?,
            ArmModel::bernoulli(p_sub)?,
            block_size,
            duel_count,
        )
    }

    fn require_exact(&self) -> Result<()> {
        if self.optimal.family != Family::Bernoulli {
            return Err(Error::Unsupported(format!(
                "exact balance is only available for bernoulli arms, got {:?}",
                self.optimal.family
            )));
        }
        if self.block_size > MAX_EXACT_BLOCK {
            return Err(Error::Argument(format!(
                "block size {} exceeds the enumeration limit {MAX_EXACT_BLOCK}",
                self.block_size
            )));
        }
        Ok(())
    }
}

/// Probability mass function of `Bin(n, p)`.
pub fn binomial_pmf(n: u32, p: f64) -> Vec<f64> {
    let mut pmf = Vec::with_capacity(n as usize + 1);
    let mut coef = 1.0f64;
    for x in 0..=n {
        if x > 0 {
            coef *= (n - x + 1) as f64 / x as f64;
        }
        pmf.push(coef * p.powi(x as i32) * (1.0 - p).powi((n - x) as i32));
    }
    pmf
}

/// `P(Bin(n, p) > x)` for `x = 0..=n`, summed from the upper tail.
pub fn binomial_survival(n: u32, p: f64) -> Vec<f64> {
    let pmf = binomial_pmf(n, p);
    let mut surv = vec![0.0; pmf.len()];
    for x in (0..pmf.len() - 1).rev() {
        surv[x] = surv[x + 1] + pmf[x + 1];
    }
    surv
}

fn pow_m(base: f64, m: u64) -> f64 {
    if m == 0 {
        1.0
    } else if m <= i32::MAX as u64 {
        base.powi(m as i32)
    } else {
        base.powf(m as f64)
    }
}

/// Exact balance function for Bernoulli arms.
pub fn balance_exact_bernoulli(q: &BalanceQuery) -> Result<f64> {
    q.require_exact()?;
    let j = q.block_size;
    let pmf_opt = binomial_pmf(j, q.optimal.mean);
    let surv_sub = binomial_survival(j, q.suboptimal.mean);
    Ok(pmf_opt
        .iter()
        .zip(&surv_sub)
        .map(|(&w, &s)| w * pow_m(s, q.duel_count))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Sample budget of the nested empirical CDF used for Poisson and
/// Exponential arms.
pub const DEFAULT_INNER_SAMPLES: usize = 20_000;

/// Monte Carlo estimate of the balance function.
///
/// `X` is a block of `j` rewards drawn from an equal mixture of the optimal
/// and suboptimal arms and weighted by `f⋆(X) / q(X)`. The weight is at most
/// 2, and the small block sums that dominate `α` for large `M` are sampled
/// often enough for the standard error to be meaningful. The survival
/// function of the suboptimal block sum is exact for Bernoulli (binomial) and
/// Gaussian (normal) arms and an empirical CDF of `inner` simulated block sums
/// otherwise.
pub fn balance_monte_carlo<R: Rng + ?Sized>(
    q: &BalanceQuery,
    samples: usize,
    rng: &mut R,
) -> BalanceEstimate {
    balance_monte_carlo_with_inner(q, samples, DEFAULT_INNER_SAMPLES, rng)
}

pub fn balance_monte_carlo_with_inner<R: Rng + ?Sized>(
    q: &BalanceQuery,
    samples: usize,
    inner: usize,
    rng: &mut R,
) -> BalanceEstimate {
    if q.duel_count == 0 || samples == 0 {
        return BalanceEstimate {
            estimate: 1.0,
            std_error: 0.0,
        };
    }
    let j = q.block_size;
    let block = |arm: &ArmModel, rng: &mut R| (0..j).map(|_| arm.sample(rng)).sum::<f64>();

    let survival: Box<dyn Fn(f64) -> f64> = match q.suboptimal.family {
        Family::Bernoulli => {
            let surv = binomial_survival(j, q.suboptimal.mean);
            Box::new(move |x: f64| surv[(x.round() as usize).min(surv.len() - 1)])
        }
        Family::Gaussian => {
            let mu = j as f64 * q.suboptimal.mean;
            let sd = q.suboptimal.scale * (j as f64).sqrt();
            Box::new(move |x: f64| 0.5 * erfc((x - mu) / (sd * std::f64::consts::SQRT_2)))
        }
        Family::Poisson | Family::Exponential => {
            let mut sums: Vec<f64> = (0..inner.max(1)).map(|_| block(&q.suboptimal, rng)).collect();
            sums.sort_by(f64::total_cmp);
            let n = sums.len() as f64;
            Box::new(move |x: f64| {
                let below = sums.partition_point(|&s| s <= x) as f64;
                1.0 - below / n
            })
        }
    };

    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let x = if rng.random::<bool>() {
            block(&q.optimal, rng)
        } else {
            block(&q.suboptimal, rng)
        };
        let ratio = block_log_ratio(&q.suboptimal, &q.optimal, j, x).exp();
        let v = 2.0 / (1.0 + ratio) * pow_m(survival(x), q.duel_count);
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    BalanceEstimate {
        estimate: mean,
        std_error: (var / n).sqrt(),
    }
}

/// `ln(f_a(s) / f_b(s))` for the density of a sum `s` of `j` rewards, `a`
/// and `b` from the same family.
fn block_log_ratio(a: &ArmModel, b: &ArmModel, j: u32, s: f64) -> f64 {
    let j = j as f64;
    let (ma, mb) = (a.mean, b.mean);
    match a.family {
        Family::Bernoulli => {
            let log_pmf = |p: f64| {
                let ones = if s > 0.0 { s * p.ln() } else { 0.0 };
                let zeros = if j - s > 0.0 { (j - s) * (1.0 - p).ln() } else { 0.0 };
                ones + zeros
            };
            let (la, lb) = (log_pmf(ma), log_pmf(mb));
            if la == lb {
                0.0
            } else {
                la - lb
            }
        }
        Family::Gaussian => (s * (ma - mb) - j * (ma * ma - mb * mb) / 2.0) / (a.scale * a.scale),
        Family::Poisson => s * (ma / mb).ln() - j * (ma - mb),
        Family::Exponential => j * (mb / ma).ln() - s * (1.0 / ma - 1.0 / mb),
    }
}

/// Right-hand side `F⋆_j(u) + (1 - F_j(u))^M` of the balance upper bound
/// (Bernoulli arms, `u` on the block-sum scale).
pub fn balance_upper_bound_rhs(q: &BalanceQuery, u: f64) -> Result<f64> {
    q.require_exact()?;
    let j = q.block_size;
    if !(0.0..=j as f64).contains(&u) {
        return Err(Error::Argument(format!("u = {u} outside [0, {j}]")));
    }
    let x = u.floor() as usize;
    let cdf_opt: f64 = binomial_pmf(j, q.optimal.mean)[..=x].iter().sum();
    let surv_sub = binomial_survival(j, q.suboptimal.mean)[x];
    Ok(cdf_opt.min(1.0) + pow_m(surv_sub, q.duel_count))
}

/// Whether `α(M, j) ≤ F⋆_j(u) + (1 - F_j(u))^M` holds at `u`.
pub fn check_balance_upper_bound(q: &BalanceQuery, u: f64) -> Result<bool> {
    let alpha = balance_exact_bernoulli(q)?;
    Ok(alpha <= balance_upper_bound_rhs(q, u)? + BOUND_TOLERANCE)
}

/// Checks the bound at every support point `u ∈ {0, …, j}`.
pub fn check_balance_upper_bound_grid(q: &BalanceQuery) -> Result<bool> {
    for u in 0..=q.block_size {
        if !check_balance_upper_bound(q, u as f64)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Support point picked by the `u* = (j·kl + ln M)/M` trade-off: the largest
/// `x` whose suboptimal block CDF does not exceed `u*` (0 if none).
pub fn tradeoff_support_point(q: &BalanceQuery) -> Result<f64> {
    q.require_exact()?;
    let kl = kl_divergence(&q.suboptimal, &q.optimal)?;
    let m = q.duel_count.max(1) as f64;
    let level = ((q.block_size as f64 * kl + m.ln()) / m).min(1.0);
    let pmf = binomial_pmf(q.block_size, q.suboptimal.mean);
    let mut cdf = 0.0;
    let mut point = 0;
    for (x, p) in pmf.iter().enumerate() {
        cdf += p;
        if cdf <= level {
            point = x;
        } else {
            break;
        }
    }
    Ok(point as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_outcome_enumeration() {
        let q = BalanceQuery::bernoulli(0.6, 0.4, 1, 1).unwrap();
        // 0.4·(1-0.6) + 0.6·0
        assert_abs_diff_eq!(balance_exact_bernoulli(&q).unwrap(), 0.16, epsilon = 1e-15);
        let q = BalanceQuery::bernoulli(0.5001, 0.5, 1, 1).unwrap();
        assert_abs_diff_eq!(balance_exact_bernoulli(&q).unwrap(), 0.24995, epsilon = 1e-15);
    }

    #[test]
    fn nonincreasing_in_m() {
        for (po, ps, j) in [(0.6, 0.4, 1), (0.6, 0.4, 5), (0.8, 0.7, 10), (0.3, 0.2, 30)] {
            let mut prev = f64::INFINITY;
            for m in [1u64, 2, 5, 10, 100, 1000, 1_000_000] {
                let a = balance_exact_bernoulli(&BalanceQuery::bernoulli(po, ps, j, m).unwrap()).unwrap();
                assert!(a <= prev);
                prev = a;
            }
        }
        let a = balance_exact_bernoulli(&BalanceQuery::bernoulli(0.6, 0.4, 1, 1_000_000).unwrap()).unwrap();
        assert!(a < 1e-6);
    }

    #[test]
    fn exact_rejects_other_families_and_large_blocks() {
        let q = BalanceQuery::new(
            ArmModel::gaussian(1.0, 1.0).unwrap(),
            ArmModel::gaussian(0.0, 1.0).unwrap(),
            1,
            1,
        )
        .unwrap();
        assert!(matches!(balance_exact_bernoulli(&q), Err(Error::Unsupported(_))));
        let q = BalanceQuery::bernoulli(0.6, 0.4, 61, 1).unwrap();
        assert!(matches!(balance_exact_bernoulli(&q), Err(Error::Argument(_))));
        assert!(BalanceQuery::bernoulli(0.4, 0.6, 1, 1).is_err());
    }

    #[test]
    fn monte_carlo_matches_exact() {
        let q = BalanceQuery::bernoulli(0.6, 0.4, 1, 1).unwrap();
        let mut rng = crate::sim_rng(1);
        let e = balance_monte_carlo(&q, 1_000_000, &mut rng);
        assert!((e.estimate - 0.16).abs() <= 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn zero_duels_is_one() {
        let q = BalanceQuery::bernoulli(0.6, 0.4, 3, 0).unwrap();
        let mut rng = crate::sim_rng(1);
        let e = balance_monte_carlo(&q, 1000, &mut rng);
        assert_eq!(e.estimate, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    /// Double simulation: draw the optimal block and `M` suboptimal blocks and
    /// count how often every suboptimal block is strictly larger.
    fn double_monte_carlo(q: &BalanceQuery, n: usize, rng: &mut crate::SimRng) -> (f64, f64) {
        let block = |a: &ArmModel, rng: &mut crate::SimRng| (0..q.block_size).map(|_| a.sample(rng)).sum::<f64>();
        let mut hits = 0usize;
        for _ in 0..n {
            let x = block(&q.optimal, rng);
            if (0..q.duel_count).all(|_| block(&q.suboptimal, rng) > x) {
                hits += 1;
            }
        }
        let p = hits as f64 / n as f64;
        (p, (p * (1.0 - p) / n as f64).sqrt())
    }

    #[test]
    fn gaussian_against_double_simulation() {
        let q = BalanceQuery::new(
            ArmModel::gaussian(1.0, 1.0).unwrap(),
            ArmModel::gaussian(0.0, 1.0).unwrap(),
            1,
            1,
        )
        .unwrap();
        let mut rng = crate::sim_rng(5);
        let e = balance_monte_carlo(&q, 200_000, &mut rng);
        let (p, se) = double_monte_carlo(&q, 200_000, &mut rng);
        let combined = (e.std_error.powi(2) + se * se).sqrt();
        assert!((e.estimate - p).abs() <= 3.0 * combined, "{e:?} vs {p}");
    }

    #[test]
    fn poisson_and_exponential_against_double_simulation() {
        let cases = [
            (ArmModel::poisson(2.0).unwrap(), ArmModel::poisson(1.5).unwrap(), 3, 2),
            (ArmModel::exponential(1.0).unwrap(), ArmModel::exponential(0.7).unwrap(), 2, 3),
        ];
        for (i, (a, b, j, m)) in cases.into_iter().enumerate() {
            let q = BalanceQuery::new(a, b, j, m).unwrap();
            let mut rng = crate::sim_rng(50 + i as u64);
            let e = balance_monte_carlo_with_inner(&q, 100_000, 100_000, &mut rng);
            let (p, se) = double_monte_carlo(&q, 100_000, &mut rng);
            // the nested CDF adds its own error; allow the combined 3σ plus a
            // small ECDF slack of order 1/√inner
            let combined = (e.std_error.powi(2) + se * se).sqrt();
            assert!((e.estimate - p).abs() <= 3.0 * combined + 0.005, "{q:?}: {e:?} vs {p}");
        }
    }

    #[test]
    fn upper_bound_examples() {
        let q = BalanceQuery::bernoulli(0.6, 0.4, 5, 20).unwrap();
        assert!(check_balance_upper_bound(&q, 5.0).unwrap());
        assert!(balance_upper_bound_rhs(&q, 5.0).unwrap() >= 1.0);
        for u in 0..=5 {
            assert!(check_balance_upper_bound(&q, u as f64).unwrap());
        }
        let u = tradeoff_support_point(&q).unwrap();
        assert!(check_balance_upper_bound(&q, u).unwrap());
        assert!(balance_upper_bound_rhs(&q, 6.0).is_err());
    }

    #[test]
    fn upper_bound_full_grid() {
        let grid: Vec<f64> = (2..=8).map(|i| i as f64 / 10.0).collect();
        for &po in &grid {
            for &ps in grid.iter().filter(|&&p| p < po) {
                for j in 1..=10 {
                    for m in [1, 10, 100] {
                        let q = BalanceQuery::bernoulli(po, ps, j, m).unwrap();
                        assert!(check_balance_upper_bound_grid(&q).unwrap(), "{q:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn pmf_sums_to_one() {
        for (n, p) in [(1, 0.3), (10, 0.5), (60, 0.05)] {
            let s: f64 = binomial_pmf(n, p).iter().sum();
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(binomial_survival(n, p)[0], 1.0 - (1.0 - p).powi(n as i32), epsilon = 1e-12);
        }
    }
}
