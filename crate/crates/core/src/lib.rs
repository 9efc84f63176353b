//! Simulator for a blockchain-backed multi-access edge computing (MEC)
//! system: user equipments (UEs) offload compute tasks to edge servers,
//! pay for service through an emulated trading contract, and the servers
//! spend allocated hash power competing to mine the blocks that record
//! those trades.
//!
//! The crate is organised around the moving parts of that system:
//!
//! * [`ledger`] — accounts, the trading contract with gas accounting,
//!   mining/orphaning probabilities, and the hash-linked chain.
//! * [`mec`] — task generation, service cost and execution latency,
//!   reputation tracking, and the per-timeslot environment step.
//! * [`mdp`] — state encoding, the factored discrete action space with
//!   feasibility masking, and the scalar utility.
//! * [`nn`] — a small dense network with manual backpropagation and Adam,
//!   used for Q-value regression.
//! * [`agents`] — double/classic DQN, tabular Q-learning, and a genetic
//!   optimizer baseline.
//! * [`harness`] — experiment configuration, training loops, parameter
//!   sweeps, and CSV reporting.

pub mod agents;
pub mod harness;
pub mod ledger;
pub mod mdp;
pub mod mec;
pub mod nn;

pub use agents::{
    classic_dqn_target, double_dqn_target, ga_optimize, q_learning_update, DqnAgent, DqnConfig,
    EpsilonSchedule, Experience, GaParams, QTable, ReplayBuffer, TabularAgent, TabularConfig,
    TargetRule,
};
pub use harness::{
    contract_cost_report, measure_ecl_art, run_training, sweep_block_size, sweep_demand,
    sweep_ue_counts, AblationMode, ExperimentConfig, HarnessError, MetricsRow, Scheme,
};
pub use ledger::{
    expected_reward, gas_to_cost, mining_success_probability, orphan_probability,
    propagation_time, relative_hash_power, sample_winner, Account, AccountId, Block, Chain,
    ContractId, GasSchedule, Ledger, LedgerError, MiningModel, Transaction, TxKind,
};
pub use mdp::{
    decision_features, subaction_space, ActionSpace, HashLevels, JointAction, MdpError,
    RewardWeights, ServerDecision, StateScaler, SystemState, UtilityTerms,
};
pub use mec::{
    execution_latency, reputation_score, sample_tasks, service_cost, Env, EnvConfig, EnvError,
    MecServer, ReputationTracker, ServerOutcome, TaskSpec, TimeslotOutcome,
};
pub use nn::{adam_step, mse_loss, Activation, AdamState, DenseNet, Gradients, NnError};
