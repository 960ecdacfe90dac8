use std::collections::BTreeSet;
use std::net::Ipv4Addr;

use crate::net::Mac;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArpOp {
    Request,
    Reply,
}

/// Abstract ARP message carried inside `ArpRequest`/`ArpReply` commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArpMessage {
    pub op: ArpOp,
    pub sender_ip: Ipv4Addr,
    pub sender_mac: Mac,
    pub target_ip: Ipv4Addr,
    pub target_mac: Option<Mac>,
}

impl ArpMessage {
    pub fn request(sender_ip: Ipv4Addr, sender_mac: Mac, target_ip: Ipv4Addr) -> Self {
        ArpMessage {
            op: ArpOp::Request,
            sender_ip,
            sender_mac,
            target_ip,
            target_mac: None,
        }
    }

    /// `op,sender_ip,sender_mac,target_ip,target_mac` with `-` for a missing
    /// target MAC.
    pub fn encode(&self) -> Vec<u8> {
        let op = match self.op {
            ArpOp::Request => "Request",
            ArpOp::Reply => "Reply",
        };
        let target_mac = self.target_mac.map_or_else(|| "-".to_string(), |m| m.to_string());
        format!(
            "{op},{},{},{},{target_mac}",
            self.sender_ip, self.sender_mac, self.target_ip
        )
        .into_bytes()
    }

    pub fn decode(bytes: &[u8]) -> Option<Self> {
        let text = std::str::from_utf8(bytes).ok()?;
        let fields: Vec<&str> = text.split(',').collect();
        let [op, sip, smac, tip, tmac] = fields.as_slice() else {
            return None;
        };
        let op = match *op {
            "Request" => ArpOp::Request,
            "Reply" => ArpOp::Reply,
            _ => return None,
        };
        let target_mac = match *tmac {
            "-" => None,
            m => Some(m.parse().ok()?),
        };
        if op == ArpOp::Request && target_mac.is_some() {
            return None;
        }
        Some(ArpMessage {
            op,
            sender_ip: sip.parse().ok()?,
            sender_mac: smac.parse().ok()?,
            target_ip: tip.parse().ok()?,
            target_mac,
        })
    }
}

/// Unordered host-IP pairs that completed a validated request/reply exchange.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArpPairRegistry {
    qualified: BTreeSet<(Ipv4Addr, Ipv4Addr)>,
}

impl ArpPairRegistry {
    fn key(a: Ipv4Addr, b: Ipv4Addr) -> (Ipv4Addr, Ipv4Addr) {
        (a.min(b), a.max(b))
    }

    pub(crate) fn qualify(&mut self, a: Ipv4Addr, b: Ipv4Addr) -> bool {
        self.qualified.insert(Self::key(a, b))
    }

    pub fn contains(&self, a: Ipv4Addr, b: Ipv4Addr) -> bool {
        self.qualified.contains(&Self::key(a, b))
    }

    pub fn len(&self) -> usize {
        self.qualified.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qualified.is_empty()
    }
}
