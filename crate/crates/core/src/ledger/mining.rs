//! Mining economics: relative hash power, block propagation and orphaning,
//! the success probability of each miner, and winner sampling.

use super::LedgerError;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Constants of the consensus competition.
///
/// Propagation time is modelled as `kappa * block_size_kb`; with the
/// defaults a 10 KB block propagates for 600 s, one mean block interval.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MiningModel {
    /// Mean block-arrival rate (1/s).
    pub eta: f64,
    /// Propagation seconds per KB of block.
    pub propagation_rate_kappa: f64,
    /// Block size in KB.
    pub block_size_kb: f64,
    /// Tokens minted for the first miner that achieves consensus.
    pub first_miner_reward: f64,
}

impl Default for MiningModel {
    fn default() -> Self {
        Self {
            eta: 1.0 / 600.0,
            propagation_rate_kappa: 60.0,
            block_size_kb: 4.0,
            first_miner_reward: 30.0,
        }
    }
}

impl MiningModel {
    pub fn validate(&self) -> Result<(), LedgerError> {
        if !(self.eta > 0.0) {
            return Err(LedgerError::Domain(format!("eta must be positive, got {}", self.eta)));
        }
        if self.propagation_rate_kappa < 0.0 {
            return Err(LedgerError::Domain("kappa must be non-negative".into()));
        }
        if self.block_size_kb < 0.0 {
            return Err(LedgerError::Domain("block size must be non-negative".into()));
        }
        if self.first_miner_reward < 0.0 {
            return Err(LedgerError::Domain("miner reward must be non-negative".into()));
        }
        Ok(())
    }

    pub fn propagation_time_s(&self) -> f64 {
        propagation_time(self.block_size_kb, self.propagation_rate_kappa)
    }
}

/// Fraction of the network's total hash power held by one miner.
pub fn relative_hash_power(p_mhs: f64, total_mhs: f64) -> Result<f64, LedgerError> {
    if !(total_mhs > 0.0) {
        return Err(LedgerError::Domain(format!("total hash power must be positive, got {total_mhs}")));
    }
    if p_mhs < 0.0 || p_mhs > total_mhs {
        return Err(LedgerError::Domain(format!(
            "hash power {p_mhs} outside [0, {total_mhs}]"
        )));
    }
    Ok(p_mhs / total_mhs)
}

/// Seconds for a block of `block_size_kb` to propagate, linear in size.
pub fn propagation_time(block_size_kb: f64, kappa: f64) -> f64 {
    block_size_kb * kappa
}

/// Probability that a mined block is discarded because it propagated too
/// slowly: `1 - exp(-eta * prop_time)`.
pub fn orphan_probability(eta: f64, prop_time_s: f64) -> f64 {
    1.0 - (-eta * prop_time_s).exp()
}

/// Probability that a miner with `rel_power` both mines first and avoids
/// orphaning: `rel_power * exp(-eta * prop_time)`.
pub fn mining_success_probability(rel_power: f64, eta: f64, prop_time_s: f64) -> f64 {
    rel_power * (-eta * prop_time_s).exp()
}

/// Expected tokens from mining: reward times success probability.
pub fn expected_reward(reward_tokens: f64, success_prob: f64) -> f64 {
    reward_tokens * success_prob
}

/// Draws at most one winner, where entry `m` wins with probability
/// `success_probs[m]`. With residual probability `1 - sum` no tracked
/// miner wins the slot. Probabilities are renormalized only in the
/// degenerate case where they sum past 1.
pub fn sample_winner<R: Rng + ?Sized>(
    success_probs: &[f64],
    rng: &mut R,
) -> Result<Option<usize>, LedgerError> {
    let mut total = 0.0;
    for (i, &p) in success_probs.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(LedgerError::Domain(format!("probability {p} at index {i} outside [0,1]")));
        }
        total += p;
    }
    let scale = if total > 1.0 { 1.0 / total } else { 1.0 };
    let draw: f64 = rng.gen();
    let mut cumulative = 0.0;
    for (i, &p) in success_probs.iter().enumerate() {
        cumulative += p * scale;
        if draw < cumulative {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn relative_hash_power_hand_values() {
        assert_eq!(relative_hash_power(500.0, 500.0).unwrap(), 1.0);
        assert_eq!(relative_hash_power(50.0, 500.0).unwrap(), 0.1);
        assert_eq!(relative_hash_power(0.0, 500.0).unwrap(), 0.0);
        assert!(relative_hash_power(600.0, 500.0).is_err());
        assert!(relative_hash_power(1.0, 0.0).is_err());
    }

    #[test]
    fn propagation_time_hand_values() {
        assert_eq!(propagation_time(0.0, 60.0), 0.0);
        assert_eq!(propagation_time(10.0, 60.0), 600.0);
        assert_eq!(propagation_time(1.0, 60.0), 60.0);
    }

    #[test]
    fn orphan_probability_hand_values() {
        let eta = 1.0 / 600.0;
        assert_eq!(orphan_probability(eta, 0.0), 0.0);
        assert_relative_eq!(orphan_probability(eta, 600.0), 0.6321205588285577, max_relative = 1e-12);
        assert_relative_eq!(orphan_probability(eta, 60.0), 0.09516258196404048, max_relative = 1e-12);
    }

    #[test]
    fn orphan_and_survival_sum_to_one_exactly() {
        let eta = 1.0 / 600.0;
        for prop in [0.0, 1.0, 60.0, 240.0, 600.0, 5000.0] {
            let survive = (-eta * prop).exp();
            assert_eq!(orphan_probability(eta, prop) + survive, 1.0);
        }
    }

    #[test]
    fn mining_success_hand_values() {
        let eta = 1.0 / 600.0;
        assert_eq!(mining_success_probability(0.0, eta, 600.0), 0.0);
        assert_relative_eq!(
            mining_success_probability(0.1, eta, 600.0),
            0.036787944117144235,
            max_relative = 1e-12
        );
        assert_eq!(mining_success_probability(1.0, eta, 0.0), 1.0);
    }

    #[test]
    fn expected_reward_hand_values() {
        assert_eq!(expected_reward(30.0, 0.0), 0.0);
        assert_relative_eq!(expected_reward(30.0, 0.036788), 1.10364, max_relative = 1e-12);
        assert_eq!(expected_reward(30.0, 1.0), 30.0);
    }

    #[test]
    fn success_probability_monotonicity() {
        let eta = 1.0 / 600.0;
        let mut prev = -1.0;
        for i in 0..=10 {
            let p = mining_success_probability(i as f64 / 10.0, eta, 120.0);
            assert!(p > prev);
            prev = p;
        }
        let mut prev = 2.0;
        for prop in [0.0, 60.0, 300.0, 600.0, 1200.0] {
            let p = mining_success_probability(0.5, eta, prop);
            assert!(p < prev);
            prev = p;
        }
    }

    #[test]
    fn sample_winner_degenerate_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(sample_winner(&[0.0, 0.0, 0.0], &mut rng).unwrap(), None);
            assert_eq!(sample_winner(&[1.0], &mut rng).unwrap(), Some(0));
        }
        assert!(sample_winner(&[1.2], &mut rng).is_err());
    }

    #[test]
    fn sample_winner_renormalizes_oversized_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let w = sample_winner(&[0.9, 0.9], &mut rng).unwrap();
            assert!(w.is_some());
        }
    }

    #[test]
    fn sample_winner_matches_analytic_frequencies() {
        let probs = [0.3, 0.2];
        let n = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0usize; 3];
        for _ in 0..n {
            match sample_winner(&probs, &mut rng).unwrap() {
                Some(i) => counts[i] += 1,
                None => counts[2] += 1,
            }
        }
        let expect = [0.3, 0.2, 0.5];
        for (count, p) in counts.iter().zip(expect) {
            let freq = *count as f64 / n as f64;
            assert!((freq - p).abs() < 0.01, "freq {freq} vs {p}");
        }
    }
}
