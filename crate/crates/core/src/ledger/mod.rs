//! Simulated permissioned blockchain.
//!
//! A single writer appends one block per accepted transaction. Each block
//! commits to its predecessor through `prev_hash`, so rewriting any committed
//! field breaks either the block's own digest or the link from its successor:
//!
//! ```text
//! block_hash_k = MD5("index|prev_hash|timestamp_ms|tx_seq|tx_kind|tx_payload")
//! prev_hash_k  = block_hash_{k-1}      (32 zeros for k = 0)
//! ```
//!
//! Rejected transactions never reach the chain.

mod digest;
mod state;
mod transaction;

use std::net::Ipv4Addr;

use thiserror::Error;

use crate::net::{LinkKey, Mac};

pub use digest::{md5_hex, Digest};
pub use state::{BandwidthMatrices, ChainState};
pub use transaction::{SlaEntry, SlaFlag, Transaction, TxKind, TxPayload};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("malformed digest `{0}`")]
    MalformedDigest(String),
    #[error("MAC {0} already bound")]
    DuplicateMac(Mac),
    #[error("IP {0} already bound")]
    DuplicateIp(Ipv4Addr),
    #[error("SLA index {0} already defined")]
    DuplicateSlaIndex(u64),
    #[error("SLA for {0} -> {1} already defined")]
    DuplicateSlaPair(Ipv4Addr, Ipv4Addr),
    #[error("SLA index {0} is not defined")]
    UnknownSlaIndex(u64),
    #[error("guaranteed SLA {0} has zero bandwidth")]
    ZeroGuaranteedSla(u64),
    #[error("link {0} is not in the bandwidth matrices")]
    UnknownLink(LinkKey),
    #[error("link {0} appears twice in one path")]
    RepeatedLink(LinkKey),
    #[error("insufficient bandwidth on {link}: {available_bps} bps available, {requested_bps} requested")]
    InsufficientBandwidth {
        link: LinkKey,
        available_bps: u64,
        requested_bps: u64,
    },
    #[error(
        "releasing {released_bps} bps on {link} would exceed its {max_bps} bps maximum ({available_bps} available)"
    )]
    OverRelease {
        link: LinkKey,
        available_bps: u64,
        released_bps: u64,
        max_bps: u64,
    },
}

/// A sealed block. Fields are public so tamper scenarios can rewrite them;
/// [`Ledger::validate_chain`] reports any such rewrite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub index: u64,
    pub prev_hash: Digest,
    pub timestamp_ms: u64,
    pub transactions: Vec<Transaction>,
    pub block_hash: Digest,
}

impl Block {
    /// Canonical encoding without the trailing `block_hash`.
    pub fn canonical(&self) -> String {
        let mut out = format!("{}|{}|{}", self.index, self.prev_hash, self.timestamp_ms);
        for tx in &self.transactions {
            out.push('|');
            out.push_str(&tx.canonical());
        }
        out
    }

    pub fn compute_hash(&self) -> Digest {
        Digest::of(self.canonical())
    }

    /// One line of the chain export: canonical encoding plus `|block_hash`.
    pub fn export_line(&self) -> String {
        format!("{}|{}", self.canonical(), self.block_hash)
    }
}

#[derive(Debug, Clone)]
pub struct Ledger {
    blocks: Vec<Block>,
    state: ChainState,
    genesis: BandwidthMatrices,
    next_seq: u64,
}

impl Default for Ledger {
    fn default() -> Self {
        Ledger::new(BandwidthMatrices::default())
    }
}

impl Ledger {
    /// Creates an empty chain. `link_maxima` fixes the guaranteed-queue
    /// maximum of every link key; all of it starts out available.
    pub fn new(link_maxima: BandwidthMatrices) -> Self {
        Ledger {
            blocks: Vec::new(),
            state: ChainState::genesis(link_maxima.clone()),
            genesis: link_maxima,
            next_seq: 0,
        }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Raw access for tamper simulation. Contract state is not touched.
    pub fn blocks_mut(&mut self) -> &mut [Block] {
        &mut self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn append_transaction(&mut self, payload: TxPayload, timestamp_ms: u64) -> Result<&Block, LedgerError> {
        self.state.apply(&payload)?;
        let index = self.blocks.len() as u64;
        let prev_hash = self.blocks.last().map_or(Digest::ZERO, |b| b.block_hash);
        let mut block = Block {
            index,
            prev_hash,
            timestamp_ms,
            transactions: vec![Transaction {
                seq: self.next_seq,
                payload,
            }],
            block_hash: Digest::ZERO,
        };
        block.block_hash = block.compute_hash();
        self.next_seq += 1;
        self.blocks.push(block);
        Ok(self.blocks.last().expect("just pushed"))
    }

    pub fn validate_chain(&self) -> bool {
        let mut prev = Digest::ZERO;
        for (i, block) in self.blocks.iter().enumerate() {
            if block.index != i as u64 || block.prev_hash != prev {
                return false;
            }
            if block.compute_hash() != block.block_hash {
                return false;
            }
            prev = block.block_hash;
        }
        true
    }

    /// Contract state rebuilt by replaying every committed transaction in
    /// `seq` order onto the genesis state.
    pub fn replay(&self) -> Result<ChainState, LedgerError> {
        let mut txs: Vec<&Transaction> = self.blocks.iter().flat_map(|b| &b.transactions).collect();
        txs.sort_by_key(|tx| tx.seq);
        let mut state = ChainState::genesis(self.genesis.clone());
        for tx in txs {
            state.apply(&tx.payload)?;
        }
        Ok(state)
    }

    pub fn export_chain(&self) -> String {
        let mut out = String::new();
        for block in &self.blocks {
            out.push_str(&block.export_line());
            out.push('\n');
        }
        out
    }

    pub fn record_command_hash(&mut self, digest: Digest, timestamp_ms: u64) -> Result<&Block, LedgerError> {
        self.append_transaction(TxPayload::RecordCommandHash { digest }, timestamp_ms)
    }

    /// Parses and records a hex digest.
    pub fn record_command_hash_hex(&mut self, hex: &str, timestamp_ms: u64) -> Result<&Block, LedgerError> {
        let digest: Digest = hex.parse()?;
        self.record_command_hash(digest, timestamp_ms)
    }

    pub fn contains_command_hash(&self, digest: &Digest) -> bool {
        self.state.contains_command_hash(digest)
    }

    pub fn put_ip_mac(&mut self, ip: Ipv4Addr, mac: Mac, timestamp_ms: u64) -> Result<&Block, LedgerError> {
        self.append_transaction(TxPayload::PutIpMac { ip, mac }, timestamp_ms)
    }

    pub fn mac_authorized(&self, mac: &Mac) -> Option<Ipv4Addr> {
        self.state.mac_authorized(mac)
    }

    pub fn put_sla(&mut self, entry: SlaEntry, timestamp_ms: u64) -> Result<&Block, LedgerError> {
        self.append_transaction(TxPayload::PutSla(entry), timestamp_ms)
    }

    /// Replaces the entry with the same index in place.
    pub fn update_sla(&mut self, entry: SlaEntry, timestamp_ms: u64) -> Result<&Block, LedgerError> {
        self.append_transaction(TxPayload::UpdateSla(entry), timestamp_ms)
    }

    /// Exact, direction-sensitive lookup.
    pub fn find_sla(&self, src: Ipv4Addr, dst: Ipv4Addr) -> Option<&SlaEntry> {
        self.state.find_sla(src, dst)
    }

    /// All-or-nothing decrement of `bw_bps` on every key of `links`.
    pub fn reserve_bandwidth(
        &mut self,
        links: &[LinkKey],
        bw_bps: u64,
        timestamp_ms: u64,
    ) -> Result<&Block, LedgerError> {
        self.append_transaction(
            TxPayload::ReserveBandwidth {
                links: links.to_vec(),
                bw_bps,
            },
            timestamp_ms,
        )
    }

    pub fn release_bandwidth(
        &mut self,
        links: &[LinkKey],
        bw_bps: u64,
        timestamp_ms: u64,
    ) -> Result<&Block, LedgerError> {
        self.append_transaction(
            TxPayload::ReleaseBandwidth {
                links: links.to_vec(),
                bw_bps,
            },
            timestamp_ms,
        )
    }

    pub fn available_bps(&self, key: &LinkKey) -> Option<u64> {
        self.state.available().get(key)
    }

    pub fn set_traversal_edge(
        &mut self,
        from: u32,
        to: u32,
        edge_switch: &str,
        timestamp_ms: u64,
    ) -> Result<&Block, LedgerError> {
        self.append_transaction(
            TxPayload::SetTraversalEdge {
                from,
                to,
                edge_switch: edge_switch.to_string(),
            },
            timestamp_ms,
        )
    }

    pub fn traversal_edge(&self, from: u32, to: u32) -> Option<&str> {
        self.state.traversal_edge(from, to)
    }
}
