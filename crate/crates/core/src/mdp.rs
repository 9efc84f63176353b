//! Decision-problem encoding: the observed system state, the factored
//! discrete action space over (UE, hash level) pairs, feasibility masking,
//! and the scalar utility.
//!
//! A joint action assigns every server one UE and one hash-power level. The
//! joint space is far too large for a flat value-network head, so each
//! timeslot is decomposed into one sub-decision per server, taken in fixed
//! server order: server `m` picks a `(ue, level)` pair from the `U * L`
//! sub-actions that remain feasible given the earlier picks. The value
//! network sees the encoded state plus a one-hot server index and the
//! remaining hash budget, so every sub-decision is a distinct input.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MdpError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no feasible sub-action remains")]
    NoFeasibleSubaction,
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Per-timeslot snapshot observed by the agent: every UE's compute demand
/// and every server's reputation score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub ue_demands: Vec<f64>,
    pub server_reputations: Vec<f64>,
}

impl SystemState {
    pub fn validate(&self) -> Result<(), MdpError> {
        for &x in self.ue_demands.iter().chain(&self.server_reputations) {
            if !x.is_finite() || x < 0.0 {
                return Err(MdpError::Domain(format!("state entries must be finite and >= 0, got {x}")));
            }
        }
        Ok(())
    }
}

/// One server's share of a joint action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServerDecision {
    /// Index of the UE this server serves.
    pub ue: usize,
    /// Index into the allowed hash-power levels.
    pub hash_level: usize,
}

/// Per-timeslot decisions, one entry per server in server order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointAction {
    pub decisions: Vec<ServerDecision>,
}

/// Ordered menu of allowed hash powers (MHash/s). Level 0 is abstention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HashLevels(Vec<f64>);

impl Default for HashLevels {
    fn default() -> Self {
        HashLevels(vec![0.0, 20.0, 40.0, 60.0, 80.0, 100.0])
    }
}

impl HashLevels {
    pub fn new(levels: Vec<f64>) -> Result<Self, MdpError> {
        if levels.is_empty() {
            return Err(MdpError::Domain("at least one hash level required".into()));
        }
        for pair in levels.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(MdpError::Domain("hash levels must be strictly increasing".into()));
            }
        }
        if levels[0] < 0.0 {
            return Err(MdpError::Domain("hash levels must be non-negative".into()));
        }
        Ok(HashLevels(levels))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn power(&self, level: usize) -> Option<f64> {
        self.0.get(level).copied()
    }

    pub fn max_power(&self) -> f64 {
        *self.0.last().expect("non-empty by construction")
    }
}

/// Number of per-server sub-actions for `num_ues` UEs and `num_levels`
/// hash levels.
pub fn subaction_space(num_ues: usize, num_levels: usize) -> usize {
    num_ues * num_levels
}

/// The per-server discrete sub-action space and its shared constraints.
///
/// A sub-action index encodes `(ue, level)` as `ue * L + level`.
#[derive(Debug, Clone)]
pub struct ActionSpace {
    num_ues: usize,
    levels: HashLevels,
    total_hash_mhs: f64,
}

impl ActionSpace {
    pub fn new(num_ues: usize, levels: HashLevels, total_hash_mhs: f64) -> Result<Self, MdpError> {
        if num_ues == 0 {
            return Err(MdpError::Domain("need at least one UE".into()));
        }
        if !(total_hash_mhs > 0.0) {
            return Err(MdpError::Domain(format!(
                "total network hash must be positive, got {total_hash_mhs}"
            )));
        }
        if levels.max_power() > total_hash_mhs {
            return Err(MdpError::Domain(format!(
                "max hash level {} exceeds network total {total_hash_mhs}",
                levels.max_power()
            )));
        }
        Ok(ActionSpace { num_ues, levels, total_hash_mhs })
    }

    pub fn num_ues(&self) -> usize {
        self.num_ues
    }

    pub fn levels(&self) -> &HashLevels {
        &self.levels
    }

    pub fn total_hash_mhs(&self) -> f64 {
        self.total_hash_mhs
    }

    pub fn subaction_count(&self) -> usize {
        subaction_space(self.num_ues, self.levels.len())
    }

    pub fn decode(&self, index: usize) -> Result<ServerDecision, MdpError> {
        if index >= self.subaction_count() {
            return Err(MdpError::InvalidAction(format!(
                "sub-action index {index} outside 0..{}",
                self.subaction_count()
            )));
        }
        Ok(ServerDecision { ue: index / self.levels.len(), hash_level: index % self.levels.len() })
    }

    pub fn encode(&self, decision: ServerDecision) -> usize {
        decision.ue * self.levels.len() + decision.hash_level
    }

    /// Feasibility of every sub-action for the next server, given the UEs
    /// already taken and the hash power already committed by earlier
    /// servers this slot. A sub-action is feasible when its UE is unserved,
    /// its level fits the remaining network budget, and its power is
    /// strictly below the network total.
    pub fn feasible_mask(
        &self,
        taken_ues: &[usize],
        used_hash_mhs: f64,
    ) -> Result<Vec<bool>, MdpError> {
        let mut mask = vec![false; self.subaction_count()];
        let mut any = false;
        for ue in 0..self.num_ues {
            if taken_ues.contains(&ue) {
                continue;
            }
            for (level, &power) in self.levels.values().iter().enumerate() {
                let fits = used_hash_mhs + power <= self.total_hash_mhs && power < self.total_hash_mhs;
                if fits {
                    mask[ue * self.levels.len() + level] = true;
                    any = true;
                }
            }
        }
        if !any {
            return Err(MdpError::NoFeasibleSubaction);
        }
        Ok(mask)
    }

    /// Checks all joint constraints: one decision per server, in-range
    /// indices, pairwise-distinct UEs, per-server power strictly below the
    /// network total, and total power within the network budget.
    pub fn validate_action(&self, action: &JointAction, num_servers: usize) -> Result<(), MdpError> {
        if action.decisions.len() != num_servers {
            return Err(MdpError::InvalidAction(format!(
                "expected {num_servers} server decisions, got {}",
                action.decisions.len()
            )));
        }
        let mut total_power = 0.0;
        for (m, d) in action.decisions.iter().enumerate() {
            if d.ue >= self.num_ues {
                return Err(MdpError::InvalidAction(format!(
                    "server {m} selects UE {} outside 0..{}",
                    d.ue, self.num_ues
                )));
            }
            let power = self.levels.power(d.hash_level).ok_or_else(|| {
                MdpError::InvalidAction(format!(
                    "server {m} selects hash level {} outside 0..{}",
                    d.hash_level,
                    self.levels.len()
                ))
            })?;
            if power >= self.total_hash_mhs {
                return Err(MdpError::InvalidAction(format!(
                    "server {m} hash power {power} not strictly below network total {}",
                    self.total_hash_mhs
                )));
            }
            total_power += power;
        }
        for i in 0..action.decisions.len() {
            for j in (i + 1)..action.decisions.len() {
                if action.decisions[i].ue == action.decisions[j].ue {
                    return Err(MdpError::InvalidAction(format!(
                        "servers {i} and {j} both select UE {}",
                        action.decisions[i].ue
                    )));
                }
            }
        }
        if total_power > self.total_hash_mhs {
            return Err(MdpError::InvalidAction(format!(
                "total allocated hash {total_power} exceeds network total {}",
                self.total_hash_mhs
            )));
        }
        Ok(())
    }
}

/// Min-max scaling of the raw state into `[0,1]` features.
///
/// Features are clamped to the configured ranges; a degenerate range maps
/// everything to the midpoint 0.5.
#[derive(Debug, Clone)]
pub struct StateScaler {
    num_ues: usize,
    num_servers: usize,
    demand_range: (f64, f64),
    reputation_range: (f64, f64),
}

fn scale_feature(x: f64, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
    } else {
        0.5
    }
}

impl StateScaler {
    pub fn new(
        num_ues: usize,
        num_servers: usize,
        demand_range: (f64, f64),
        reputation_range: (f64, f64),
    ) -> Self {
        StateScaler { num_ues, num_servers, demand_range, reputation_range }
    }

    /// Encodes the state as `[demands..., reputations...]`, each entry
    /// min-max scaled into `[0,1]`.
    pub fn encode(&self, state: &SystemState) -> Result<Vec<f64>, MdpError> {
        if state.ue_demands.len() != self.num_ues {
            return Err(MdpError::DimensionMismatch {
                expected: self.num_ues,
                got: state.ue_demands.len(),
            });
        }
        if state.server_reputations.len() != self.num_servers {
            return Err(MdpError::DimensionMismatch {
                expected: self.num_servers,
                got: state.server_reputations.len(),
            });
        }
        state.validate()?;
        let mut out = Vec::with_capacity(self.num_ues + self.num_servers);
        out.extend(state.ue_demands.iter().map(|&d| scale_feature(d, self.demand_range)));
        out.extend(
            state
                .server_reputations
                .iter()
                .map(|&r| scale_feature(r, self.reputation_range)),
        );
        Ok(out)
    }

    pub fn feature_len(&self) -> usize {
        self.num_ues + self.num_servers
    }
}

/// Input vector for one sub-decision: encoded state, one-hot server index,
/// and the fraction of the network hash budget still unallocated.
pub fn decision_features(
    encoded_state: &[f64],
    server: usize,
    num_servers: usize,
    remaining_hash_mhs: f64,
    total_hash_mhs: f64,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(encoded_state.len() + num_servers + 1);
    out.extend_from_slice(encoded_state);
    for m in 0..num_servers {
        out.push(if m == server { 1.0 } else { 0.0 });
    }
    out.push((remaining_hash_mhs / total_hash_mhs).clamp(0.0, 1.0));
    out
}

/// Length of [`decision_features`] output for the given dimensions.
pub fn decision_feature_len(num_ues: usize, num_servers: usize) -> usize {
    num_ues + 2 * num_servers + 1
}

/// Relative weights on the three utility terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardWeights {
    pub mining: f64,
    pub revenue: f64,
    pub latency: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        RewardWeights { mining: 1.0, revenue: 1.0, latency: 1.0 }
    }
}

impl RewardWeights {
    pub fn validate(&self) -> Result<(), MdpError> {
        for w in [self.mining, self.revenue, self.latency] {
            if !w.is_finite() || w < 0.0 {
                return Err(MdpError::Domain(format!("weights must be finite and >= 0, got {w}")));
            }
        }
        Ok(())
    }
}

/// One server's contribution to the slot utility.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UtilityTerms {
    pub mining_reward: f64,
    pub revenue: f64,
    pub latency: f64,
}

impl UtilityTerms {
    pub fn weighted(&self, w: &RewardWeights) -> f64 {
        w.mining * self.mining_reward + w.revenue * self.revenue - w.latency * self.latency
    }
}

/// Slot utility: the weighted sum of every server's mining reward and
/// service revenue minus its execution latency.
pub fn reward(terms: &[UtilityTerms], weights: &RewardWeights) -> f64 {
    terms.iter().map(|t| t.weighted(weights)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn space() -> ActionSpace {
        ActionSpace::new(6, HashLevels::default(), 500.0).unwrap()
    }

    #[test]
    fn subaction_space_counts() {
        assert_eq!(subaction_space(20, 6), 120);
        assert_eq!(subaction_space(1, 1), 1);
        assert_eq!(subaction_space(5, 6), 30);
    }

    #[test]
    fn encode_decode_roundtrip() {
        let s = space();
        for idx in 0..s.subaction_count() {
            let d = s.decode(idx).unwrap();
            assert_eq!(s.encode(d), idx);
        }
        assert!(s.decode(s.subaction_count()).is_err());
    }

    #[test]
    fn fresh_slot_has_all_subactions_feasible() {
        let s = space();
        let mask = s.feasible_mask(&[], 0.0).unwrap();
        assert!(mask.iter().all(|&b| b));
    }

    #[test]
    fn last_server_sees_only_remaining_ue() {
        // U = M = 3: after two picks exactly one UE stays available.
        let s = ActionSpace::new(3, HashLevels::default(), 500.0).unwrap();
        let mask = s.feasible_mask(&[0, 2], 0.0).unwrap();
        let feasible: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
        assert_eq!(feasible.len(), s.levels().len());
        for idx in feasible {
            assert_eq!(s.decode(idx).unwrap().ue, 1);
        }
    }

    #[test]
    fn exhausted_budget_leaves_only_level_zero() {
        let s = space();
        let mask = s.feasible_mask(&[], 500.0).unwrap();
        for (idx, &ok) in mask.iter().enumerate() {
            let d = s.decode(idx).unwrap();
            assert_eq!(ok, d.hash_level == 0, "index {idx}");
        }
    }

    #[test]
    fn no_feasible_subaction_is_an_error() {
        let s = ActionSpace::new(2, HashLevels::default(), 500.0).unwrap();
        assert_eq!(s.feasible_mask(&[0, 1], 0.0), Err(MdpError::NoFeasibleSubaction));
    }

    #[test]
    fn validate_action_rejects_duplicates_and_budget_overruns() {
        let s = space();
        let dup = JointAction {
            decisions: vec![
                ServerDecision { ue: 1, hash_level: 0 },
                ServerDecision { ue: 1, hash_level: 1 },
            ],
        };
        assert!(s.validate_action(&dup, 2).is_err());

        let tight = ActionSpace::new(6, HashLevels::default(), 150.0).unwrap();
        let over = JointAction {
            decisions: vec![
                ServerDecision { ue: 0, hash_level: 5 },
                ServerDecision { ue: 1, hash_level: 5 },
            ],
        };
        assert!(tight.validate_action(&over, 2).is_err());

        let ok = JointAction {
            decisions: vec![
                ServerDecision { ue: 0, hash_level: 5 },
                ServerDecision { ue: 1, hash_level: 3 },
            ],
        };
        assert!(s.validate_action(&ok, 2).is_ok());
    }

    #[test]
    fn encode_state_scales_with_config_ranges() {
        let scaler = StateScaler::new(2, 1, (0.6, 1.6), (0.0, 2.0));
        let state = SystemState { ue_demands: vec![0.6, 1.6], server_reputations: vec![1.0] };
        let enc = scaler.encode(&state).unwrap();
        assert_relative_eq!(enc[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(enc[1], 1.0, epsilon = 1e-15);
        assert_relative_eq!(enc[2], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn encode_state_is_pure_and_checks_dimensions() {
        let scaler = StateScaler::new(2, 1, (0.6, 1.6), (0.0, 2.0));
        let state = SystemState { ue_demands: vec![1.1, 1.1], server_reputations: vec![1.2] };
        assert_eq!(scaler.encode(&state).unwrap(), scaler.encode(&state).unwrap());
        assert_relative_eq!(scaler.encode(&state).unwrap()[0], 0.5, epsilon = 1e-15);

        let bad = SystemState { ue_demands: vec![1.0], server_reputations: vec![1.0] };
        assert!(matches!(scaler.encode(&bad), Err(MdpError::DimensionMismatch { .. })));
    }

    #[test]
    fn degenerate_range_maps_to_midpoint() {
        let scaler = StateScaler::new(1, 1, (1.0, 1.0), (0.0, 2.0));
        let state = SystemState { ue_demands: vec![1.0], server_reputations: vec![0.0] };
        let enc = scaler.encode(&state).unwrap();
        assert_eq!(enc[0], 0.5);
    }

    #[test]
    fn decision_features_layout() {
        let feats = decision_features(&[0.25, 0.75], 1, 3, 250.0, 500.0);
        assert_eq!(feats, vec![0.25, 0.75, 0.0, 1.0, 0.0, 0.5]);
        assert_eq!(decision_feature_len(6, 3), 6 + 6 + 1);
    }

    #[test]
    fn reward_hand_values() {
        let w = RewardWeights::default();
        assert_eq!(reward(&[], &w), 0.0);
        let terms = [UtilityTerms { mining_reward: 1.1036, revenue: 0.15, latency: 0.4 }];
        assert_relative_eq!(reward(&terms, &w), 0.8536, max_relative = 1e-12);
        let revenue_only = RewardWeights { mining: 0.0, revenue: 1.0, latency: 0.0 };
        assert_relative_eq!(reward(&terms, &revenue_only), 0.15, max_relative = 1e-12);
    }

    #[test]
    fn reward_is_linear_in_weights() {
        let terms = [
            UtilityTerms { mining_reward: 2.0, revenue: 0.3, latency: 0.7 },
            UtilityTerms { mining_reward: 0.5, revenue: 0.1, latency: 1.3 },
        ];
        let w1 = RewardWeights { mining: 0.2, revenue: 1.5, latency: 0.4 };
        let w2 = RewardWeights { mining: 1.0, revenue: 0.0, latency: 2.0 };
        let sum = RewardWeights {
            mining: w1.mining + w2.mining,
            revenue: w1.revenue + w2.revenue,
            latency: w1.latency + w2.latency,
        };
        assert_relative_eq!(
            reward(&terms, &sum),
            reward(&terms, &w1) + reward(&terms, &w2),
            max_relative = 1e-12
        );
    }
}
