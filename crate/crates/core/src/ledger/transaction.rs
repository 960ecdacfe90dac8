use std::fmt;
use std::net::Ipv4Addr;

use crate::net::{LinkKey, Mac};

use super::Digest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlaFlag {
    BestEffort = 0,
    Guaranteed = 1,
}

impl SlaFlag {
    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(SlaFlag::BestEffort),
            1 => Some(SlaFlag::Guaranteed),
            _ => None,
        }
    }

    pub fn bit(self) -> u8 {
        self as u8
    }
}

/// One row of the SLA definition table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlaEntry {
    pub index: u64,
    pub src_ip: Ipv4Addr,
    pub dst_ip: Ipv4Addr,
    pub sla_bandwidth_bps: u64,
    pub flag: SlaFlag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TxKind {
    RecordCommandHash,
    PutIpMac,
    PutSla,
    UpdateSla,
    ReserveBandwidth,
    ReleaseBandwidth,
    SetTraversalEdge,
}

impl TxKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TxKind::RecordCommandHash => "RecordCommandHash",
            TxKind::PutIpMac => "PutIpMac",
            TxKind::PutSla => "PutSla",
            TxKind::UpdateSla => "UpdateSla",
            TxKind::ReserveBandwidth => "ReserveBandwidth",
            TxKind::ReleaseBandwidth => "ReleaseBandwidth",
            TxKind::SetTraversalEdge => "SetTraversalEdge",
        }
    }
}

impl fmt::Display for TxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Contract call carried by a transaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TxPayload {
    RecordCommandHash { digest: Digest },
    PutIpMac { ip: Ipv4Addr, mac: Mac },
    PutSla(SlaEntry),
    UpdateSla(SlaEntry),
    ReserveBandwidth { links: Vec<LinkKey>, bw_bps: u64 },
    ReleaseBandwidth { links: Vec<LinkKey>, bw_bps: u64 },
    SetTraversalEdge { from: u32, to: u32, edge_switch: String },
}

impl TxPayload {
    pub fn kind(&self) -> TxKind {
        match self {
            TxPayload::RecordCommandHash { .. } => TxKind::RecordCommandHash,
            TxPayload::PutIpMac { .. } => TxKind::PutIpMac,
            TxPayload::PutSla(_) => TxKind::PutSla,
            TxPayload::UpdateSla(_) => TxKind::UpdateSla,
            TxPayload::ReserveBandwidth { .. } => TxKind::ReserveBandwidth,
            TxPayload::ReleaseBandwidth { .. } => TxKind::ReleaseBandwidth,
            TxPayload::SetTraversalEdge { .. } => TxKind::SetTraversalEdge,
        }
    }

    /// Fields joined by `,` in declaration order. A link list is one field,
    /// its keys joined by `;`.
    pub fn canonical(&self) -> String {
        match self {
            TxPayload::RecordCommandHash { digest } => digest.to_string(),
            TxPayload::PutIpMac { ip, mac } => format!("{ip},{mac}"),
            TxPayload::PutSla(e) | TxPayload::UpdateSla(e) => format!(
                "{},{},{},{},{}",
                e.index,
                e.src_ip,
                e.dst_ip,
                e.sla_bandwidth_bps,
                e.flag.bit()
            ),
            TxPayload::ReserveBandwidth { links, bw_bps } | TxPayload::ReleaseBandwidth { links, bw_bps } => {
                let joined: Vec<String> = links.iter().map(ToString::to_string).collect();
                format!("{},{}", joined.join(";"), bw_bps)
            }
            TxPayload::SetTraversalEdge { from, to, edge_switch } => format!("{from},{to},{edge_switch}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub seq: u64,
    pub payload: TxPayload,
}

impl Transaction {
    pub fn kind(&self) -> TxKind {
        self.payload.kind()
    }

    /// `seq|kind|payload`.
    pub fn canonical(&self) -> String {
        format!("{}|{}|{}", self.seq, self.kind(), self.payload.canonical())
    }
}
