//! Hash-linked block storage. Digests are SHA-256 over a canonical byte
//! encoding of the block contents, so any mutation of a committed block is
//! detectable by re-verification.

use super::LedgerError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::io::{BufRead, Write};

/// 32-byte digest, serialized as lowercase hex.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Digest32(pub [u8; 32]);

impl fmt::Debug for Digest32 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", hex::encode(self.0))
    }
}

impl Serialize for Digest32 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(self.0))
    }
}

impl<'de> Deserialize<'de> for Digest32 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let bytes = hex::decode(&text).map_err(serde::de::Error::custom)?;
        let arr: [u8; 32] = bytes
            .try_into()
            .map_err(|_| serde::de::Error::custom("digest must be 32 bytes"))?;
        Ok(Digest32(arr))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TxKind {
    /// Payment executed by a trading contract.
    Trade { contract: u64 },
    /// Freshly created mining reward.
    Mint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transaction {
    pub kind: TxKind,
    pub from: Option<String>,
    pub to: String,
    pub amount_tokens: f64,
    pub slot: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub height: u64,
    pub prev_digest: Digest32,
    pub tx_list: Vec<Transaction>,
    /// Mining server index; `None` for genesis and externally won blocks.
    pub miner: Option<usize>,
    pub digest: Digest32,
}

fn put_str(hasher: &mut Sha256, s: &str) {
    hasher.update((s.len() as u64).to_le_bytes());
    hasher.update(s.as_bytes());
}

fn block_digest(height: u64, prev: &Digest32, txs: &[Transaction], miner: Option<usize>) -> Digest32 {
    let mut h = Sha256::new();
    h.update(height.to_le_bytes());
    h.update(prev.0);
    match miner {
        Some(m) => {
            h.update([1u8]);
            h.update((m as u64).to_le_bytes());
        }
        None => h.update([0u8]),
    }
    h.update((txs.len() as u64).to_le_bytes());
    for tx in txs {
        match &tx.kind {
            TxKind::Trade { contract } => {
                h.update([0u8]);
                h.update(contract.to_le_bytes());
            }
            TxKind::Mint => h.update([1u8]),
        }
        match &tx.from {
            Some(from) => {
                h.update([1u8]);
                put_str(&mut h, from);
            }
            None => h.update([0u8]),
        }
        put_str(&mut h, &tx.to);
        h.update(tx.amount_tokens.to_le_bytes());
        h.update(tx.slot.to_le_bytes());
    }
    Digest32(h.finalize().into())
}

/// Append-only block sequence rooted at a fixed genesis block.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    blocks: Vec<Block>,
}

impl Chain {
    pub fn with_genesis() -> Self {
        let prev = Digest32([0u8; 32]);
        let digest = block_digest(0, &prev, &[], None);
        Chain {
            blocks: vec![Block { height: 0, prev_digest: prev, tx_list: Vec::new(), miner: None, digest }],
        }
    }

    pub fn append(&mut self, tx_list: Vec<Transaction>, miner: Option<usize>) -> &Block {
        let prev = self.blocks.last().expect("genesis always present");
        let height = prev.height + 1;
        let prev_digest = prev.digest;
        let digest = block_digest(height, &prev_digest, &tx_list, miner);
        self.blocks.push(Block { height, prev_digest, tx_list, miner, digest });
        self.blocks.last().expect("just pushed")
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn head(&self) -> &Block {
        self.blocks.last().expect("genesis always present")
    }

    /// Recomputes every digest and checks linkage and height order.
    pub fn verify(&self) -> Result<(), LedgerError> {
        if self.blocks.is_empty() {
            return Err(LedgerError::ChainVerification { height: 0, reason: "empty chain".into() });
        }
        let mut prev: Option<&Block> = None;
        for block in &self.blocks {
            let expected_height = prev.map_or(0, |p| p.height + 1);
            if block.height != expected_height {
                return Err(LedgerError::ChainVerification {
                    height: block.height,
                    reason: format!("expected height {expected_height}"),
                });
            }
            let expected_prev = prev.map_or(Digest32([0u8; 32]), |p| p.digest);
            if block.prev_digest != expected_prev {
                return Err(LedgerError::ChainVerification {
                    height: block.height,
                    reason: "previous-digest link broken".into(),
                });
            }
            let recomputed = block_digest(block.height, &block.prev_digest, &block.tx_list, block.miner);
            if recomputed != block.digest {
                return Err(LedgerError::ChainVerification {
                    height: block.height,
                    reason: "stored digest does not match contents".into(),
                });
            }
            prev = Some(block);
        }
        Ok(())
    }

    /// Writes one JSON record per block, in height order.
    pub fn export<W: Write>(&self, mut out: W) -> Result<(), LedgerError> {
        for block in &self.blocks {
            let line = serde_json::to_string(block)
                .map_err(|e| LedgerError::ChainImport(e.to_string()))?;
            writeln!(out, "{line}").map_err(|e| LedgerError::ChainImport(e.to_string()))?;
        }
        Ok(())
    }

    /// Parses a line-delimited export. Call [`Chain::verify`] afterwards to
    /// check integrity; import itself only requires well-formed records.
    pub fn import<R: BufRead>(input: R) -> Result<Self, LedgerError> {
        let mut blocks = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| LedgerError::ChainImport(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let block: Block = serde_json::from_str(&line)
                .map_err(|e| LedgerError::ChainImport(format!("record {i}: {e}")))?;
            blocks.push(block);
        }
        if blocks.is_empty() {
            return Err(LedgerError::ChainImport("no records".into()));
        }
        Ok(Chain { blocks })
    }
}
