//! Blockchain-as-a-service emulation: accounts with token balances, the
//! trading contract with gas metering, the mining/orphaning probability
//! model, winner sampling, and a hash-linked chain of committed blocks.
//!
//! Cryptography is deliberately stubbed: identities and wallet addresses
//! are opaque random tokens and block digests are SHA-256 over a canonical
//! byte encoding. Linkage integrity is in scope, key security is not.

mod chain;
mod mining;

pub use chain::{Block, Chain, Transaction, TxKind};
pub use mining::{
    expected_reward, mining_success_probability, orphan_probability, propagation_time,
    relative_hash_power, sample_winner, MiningModel,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LedgerError {
    #[error("unknown account id {0}")]
    UnknownAccount(usize),
    #[error("unknown contract id {0}")]
    UnknownContract(usize),
    #[error("insufficient balance: have {have}, need {need}")]
    InsufficientBalance { have: f64, need: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("chain verification failed at height {height}: {reason}")]
    ChainVerification { height: u64, reason: String },
    #[error("chain import failed: {0}")]
    ChainImport(String),
}

/// A registered participant: opaque identity/key stubs plus a token balance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Account {
    pub user_id: String,
    pub pubkey_stub: String,
    pub privkey_stub: String,
    pub wallet_address: String,
    pub balance_tokens: f64,
}

/// Index of an account within one ledger instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AccountId(pub usize);

/// Index of a trading contract within one ledger instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractId(pub usize);

/// Gas metering constants and the gas -> ether -> USD exchange rates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GasSchedule {
    pub creation_trade_gas: u64,
    pub trading_gas: u64,
    pub ether_per_gas: f64,
    pub usd_per_ether: f64,
}

impl Default for GasSchedule {
    fn default() -> Self {
        Self {
            creation_trade_gas: 170_948,
            trading_gas: 3_904_827,
            ether_per_gas: 2e-8,
            usd_per_ether: 195.0,
        }
    }
}

impl GasSchedule {
    pub fn validate(&self) -> Result<(), LedgerError> {
        if self.creation_trade_gas == 0 || self.trading_gas == 0 {
            return Err(LedgerError::Domain("gas costs must be positive".into()));
        }
        if self.ether_per_gas <= 0.0 || self.usd_per_ether <= 0.0 {
            return Err(LedgerError::Domain("exchange rates must be positive".into()));
        }
        Ok(())
    }
}

/// Truncates `x >= 0` toward zero at `digits` places after the decimal
/// point. The tiny relative guard keeps values that are an exact decimal
/// (up to float noise) from being knocked down a whole step.
fn truncate_fraction_digits(x: f64, digits: u32) -> f64 {
    let scale = 10f64.powi(digits as i32);
    (x * scale * (1.0 + 1e-12)).floor() / scale
}

/// Converts metered gas into the (ether, usd) pair as displayed in cost
/// reports: ether is truncated to `fraction_digits` decimal places and the
/// USD figure is the truncated ether times the exchange rate, itself
/// truncated to four places. The USD column therefore reflects the rounded
/// ether figure, not the raw product.
pub fn gas_to_cost(gas: u64, schedule: &GasSchedule, fraction_digits: u32) -> (f64, f64) {
    let ether = truncate_fraction_digits(gas as f64 * schedule.ether_per_gas, fraction_digits);
    let usd = truncate_fraction_digits(ether * schedule.usd_per_ether, 4);
    (ether, usd)
}

/// A recorded trading contract: payer identity plus the service terms the
/// payment is computed from.
#[derive(Debug, Clone)]
pub struct TradeContract {
    pub payer: AccountId,
    pub wallet_address: String,
    pub user_id: String,
    pub pubkey_stub: String,
    pub demand_gcycles: f64,
    pub price_unit: f64,
}

impl TradeContract {
    pub fn cost_tokens(&self) -> f64 {
        self.price_unit * self.demand_gcycles
    }
}

/// Single-writer ledger instance: accounts, contracts, the pending
/// transaction pool, cumulative gas counter, and the committed chain.
#[derive(Debug)]
pub struct Ledger {
    accounts: Vec<Account>,
    contracts: Vec<TradeContract>,
    pending: Vec<Transaction>,
    chain: Chain,
    gas_schedule: GasSchedule,
    gas_used: u64,
    total_minted: f64,
    slot: u64,
    rng: ChaCha8Rng,
}

impl Ledger {
    /// Creates a ledger with a genesis block and no accounts. `seed`
    /// drives the opaque identity tokens only.
    pub fn new(gas_schedule: GasSchedule, seed: u64) -> Result<Self, LedgerError> {
        gas_schedule.validate()?;
        Ok(Self {
            accounts: Vec::new(),
            contracts: Vec::new(),
            pending: Vec::new(),
            chain: Chain::with_genesis(),
            gas_schedule,
            gas_used: 0,
            total_minted: 0.0,
            slot: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    fn fresh_token(&mut self, tag: &str) -> String {
        let mut bytes = [0u8; 16];
        self.rng.fill(&mut bytes);
        format!("{tag}{}", hex::encode(bytes))
    }

    /// Registers a participant with fresh unique identity tokens.
    pub fn register_account(&mut self, initial_balance: f64) -> Result<AccountId, LedgerError> {
        if !initial_balance.is_finite() || initial_balance < 0.0 {
            return Err(LedgerError::Domain(format!(
                "initial balance must be finite and non-negative, got {initial_balance}"
            )));
        }
        let mut wallet = self.fresh_token("w");
        while self.accounts.iter().any(|a| a.wallet_address == wallet) {
            wallet = self.fresh_token("w");
        }
        let account = Account {
            user_id: self.fresh_token("id"),
            pubkey_stub: self.fresh_token("pk"),
            privkey_stub: self.fresh_token("sk"),
            wallet_address: wallet,
            balance_tokens: initial_balance,
        };
        self.accounts.push(account);
        Ok(AccountId(self.accounts.len() - 1))
    }

    pub fn account(&self, id: AccountId) -> Result<&Account, LedgerError> {
        self.accounts.get(id.0).ok_or(LedgerError::UnknownAccount(id.0))
    }

    pub fn balance(&self, id: AccountId) -> Result<f64, LedgerError> {
        Ok(self.account(id)?.balance_tokens)
    }

    /// Initializes a trading contract for `payer` and meters the creation
    /// gas. The contract records the payer's wallet, identity, public key
    /// stub, service demand, and unit price.
    pub fn creation_trade(
        &mut self,
        payer: AccountId,
        demand_gcycles: f64,
        price_unit: f64,
    ) -> Result<ContractId, LedgerError> {
        if demand_gcycles <= 0.0 || price_unit <= 0.0 {
            return Err(LedgerError::Domain(format!(
                "contract terms must be positive, got demand {demand_gcycles}, price {price_unit}"
            )));
        }
        let account = self.account(payer)?.clone();
        self.contracts.push(TradeContract {
            payer,
            wallet_address: account.wallet_address,
            user_id: account.user_id,
            pubkey_stub: account.pubkey_stub,
            demand_gcycles,
            price_unit,
        });
        self.gas_used += self.gas_schedule.creation_trade_gas;
        Ok(ContractId(self.contracts.len() - 1))
    }

    /// Executes the payment recorded by a contract: the payer transfers the
    /// service cost to `esp` and the transfer joins the pending pool. On
    /// insufficient balance nothing changes, including the gas counter.
    pub fn trading(&mut self, contract: ContractId, esp: AccountId) -> Result<f64, LedgerError> {
        let (payer, cost) = {
            let c = self
                .contracts
                .get(contract.0)
                .ok_or(LedgerError::UnknownContract(contract.0))?;
            (c.payer, c.cost_tokens())
        };
        let esp_wallet = self.account(esp)?.wallet_address.clone();
        let payer_acct = self.account(payer)?;
        if payer_acct.balance_tokens < cost {
            return Err(LedgerError::InsufficientBalance {
                have: payer_acct.balance_tokens,
                need: cost,
            });
        }
        let payer_wallet = payer_acct.wallet_address.clone();
        self.accounts[payer.0].balance_tokens -= cost;
        self.accounts[esp.0].balance_tokens += cost;
        self.pending.push(Transaction {
            kind: TxKind::Trade { contract: contract.0 as u64 },
            from: Some(payer_wallet),
            to: esp_wallet,
            amount_tokens: cost,
            slot: self.slot,
        });
        self.gas_used += self.gas_schedule.trading_gas;
        Ok(cost)
    }

    /// Credits freshly minted tokens (a mining reward) to an account. The
    /// mint is tagged so token-conservation checks can separate it from
    /// transfers.
    pub fn mint(&mut self, to: AccountId, amount: f64) -> Result<(), LedgerError> {
        if !amount.is_finite() || amount < 0.0 {
            return Err(LedgerError::Domain(format!("mint amount must be non-negative, got {amount}")));
        }
        let wallet = self.account(to)?.wallet_address.clone();
        self.accounts[to.0].balance_tokens += amount;
        self.total_minted += amount;
        self.pending.push(Transaction {
            kind: TxKind::Mint,
            from: None,
            to: wallet,
            amount_tokens: amount,
            slot: self.slot,
        });
        Ok(())
    }

    /// Drains the pending pool into a new block mined by `miner` (`None`
    /// marks a block won outside the tracked server set).
    pub fn commit_block(&mut self, miner: Option<usize>) -> &Block {
        let txs = std::mem::take(&mut self.pending);
        self.chain.append(txs, miner)
    }

    /// Advances the slot stamp applied to subsequently pending transactions.
    pub fn advance_slot(&mut self) {
        self.slot += 1;
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn gas_schedule(&self) -> &GasSchedule {
        &self.gas_schedule
    }

    /// Cumulative gas metered across all contract executions.
    pub fn gas_used(&self) -> u64 {
        self.gas_used
    }

    /// Total tokens created by mints (tagged separately from transfers).
    pub fn total_minted(&self) -> f64 {
        self.total_minted
    }

    /// Sum of all account balances.
    pub fn total_balance(&self) -> f64 {
        self.accounts.iter().map(|a| a.balance_tokens).sum()
    }

    pub fn num_accounts(&self) -> usize {
        self.accounts.len()
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len()
    }
}
