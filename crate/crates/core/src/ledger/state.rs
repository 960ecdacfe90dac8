use std::collections::{BTreeMap, BTreeSet};
use std::net::Ipv4Addr;

use crate::net::{LinkKey, Mac};

use super::{Digest, LedgerError, SlaEntry, SlaFlag, TxPayload};

/// Available guaranteed bandwidth per link, split the way the contract stores
/// it: backbone links between controllers, and links inside each domain.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BandwidthMatrices {
    pub inter: BTreeMap<(u32, u32), u64>,
    pub intra: BTreeMap<u32, BTreeMap<(String, String), u64>>,
}

impl BandwidthMatrices {
    pub fn get(&self, key: &LinkKey) -> Option<u64> {
        match key {
            LinkKey::Inter { a, b } => self.inter.get(&(*a, *b)).copied(),
            LinkKey::Intra { domain, a, b } => self
                .intra
                .get(domain)
                .and_then(|m| m.get(&(a.clone(), b.clone())))
                .copied(),
        }
    }

    fn get_mut(&mut self, key: &LinkKey) -> Option<&mut u64> {
        match key {
            LinkKey::Inter { a, b } => self.inter.get_mut(&(*a, *b)),
            LinkKey::Intra { domain, a, b } => self
                .intra
                .get_mut(domain)
                .and_then(|m| m.get_mut(&(a.clone(), b.clone()))),
        }
    }

    /// Inserts or overwrites one entry. Keys are already normalised, so the
    /// matrix stays symmetric.
    pub fn set(&mut self, key: &LinkKey, value: u64) {
        match key {
            LinkKey::Inter { a, b } => {
                self.inter.insert((*a, *b), value);
            }
            LinkKey::Intra { domain, a, b } => {
                self.intra
                    .entry(*domain)
                    .or_default()
                    .insert((a.clone(), b.clone()), value);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (LinkKey, u64)> + '_ {
        let inter = self.inter.iter().map(|(&(a, b), &v)| (LinkKey::Inter { a, b }, v));
        let intra = self.intra.iter().flat_map(|(&domain, m)| {
            m.iter().map(move |((a, b), &v)| {
                (
                    LinkKey::Intra {
                        domain,
                        a: a.clone(),
                        b: b.clone(),
                    },
                    v,
                )
            })
        });
        inter.chain(intra)
    }

    pub fn len(&self) -> usize {
        self.inter.len() + self.intra.values().map(BTreeMap::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Simulated smart-contract storage. Mutated only through [`ChainState::apply`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChainState {
    command_hashes: BTreeSet<Digest>,
    ip_by_mac: BTreeMap<Mac, Ipv4Addr>,
    mac_by_ip: BTreeMap<Ipv4Addr, Mac>,
    sla: BTreeMap<u64, SlaEntry>,
    sla_by_pair: BTreeMap<(Ipv4Addr, Ipv4Addr), u64>,
    available: BandwidthMatrices,
    maxima: BandwidthMatrices,
    traversal: BTreeMap<(u32, u32), String>,
}

impl ChainState {
    /// Fresh state whose links all start at their guaranteed-queue maximum.
    pub fn genesis(maxima: BandwidthMatrices) -> Self {
        ChainState {
            available: maxima.clone(),
            maxima,
            ..ChainState::default()
        }
    }

    pub fn contains_command_hash(&self, d: &Digest) -> bool {
        self.command_hashes.contains(d)
    }

    pub fn command_hash_count(&self) -> usize {
        self.command_hashes.len()
    }

    pub fn mac_authorized(&self, mac: &Mac) -> Option<Ipv4Addr> {
        self.ip_by_mac.get(mac).copied()
    }

    pub fn ip_mac_entries(&self) -> impl Iterator<Item = (Ipv4Addr, Mac)> + '_ {
        self.mac_by_ip.iter().map(|(&ip, &mac)| (ip, mac))
    }

    pub fn find_sla(&self, src: Ipv4Addr, dst: Ipv4Addr) -> Option<&SlaEntry> {
        self.sla_by_pair.get(&(src, dst)).and_then(|i| self.sla.get(i))
    }

    pub fn sla_entries(&self) -> impl Iterator<Item = &SlaEntry> {
        self.sla.values()
    }

    pub fn available(&self) -> &BandwidthMatrices {
        &self.available
    }

    pub fn maxima(&self) -> &BandwidthMatrices {
        &self.maxima
    }

    pub fn traversal_edge(&self, from: u32, to: u32) -> Option<&str> {
        self.traversal.get(&(from, to)).map(String::as_str)
    }

    pub fn traversal_entries(&self) -> &BTreeMap<(u32, u32), String> {
        &self.traversal
    }

    /// Validates `payload` and applies it. On error nothing is changed.
    pub fn apply(&mut self, payload: &TxPayload) -> Result<(), LedgerError> {
        match payload {
            TxPayload::RecordCommandHash { digest } => {
                self.command_hashes.insert(*digest);
            }
            TxPayload::PutIpMac { ip, mac } => {
                if self.ip_by_mac.contains_key(mac) {
                    return Err(LedgerError::DuplicateMac(*mac));
                }
                if self.mac_by_ip.contains_key(ip) {
                    return Err(LedgerError::DuplicateIp(*ip));
                }
                self.ip_by_mac.insert(*mac, *ip);
                self.mac_by_ip.insert(*ip, *mac);
            }
            TxPayload::PutSla(entry) => {
                check_sla(entry)?;
                if self.sla.contains_key(&entry.index) {
                    return Err(LedgerError::DuplicateSlaIndex(entry.index));
                }
                if self.sla_by_pair.contains_key(&(entry.src_ip, entry.dst_ip)) {
                    return Err(LedgerError::DuplicateSlaPair(entry.src_ip, entry.dst_ip));
                }
                self.sla_by_pair.insert((entry.src_ip, entry.dst_ip), entry.index);
                self.sla.insert(entry.index, entry.clone());
            }
            TxPayload::UpdateSla(entry) => {
                check_sla(entry)?;
                let old = self
                    .sla
                    .get(&entry.index)
                    .ok_or(LedgerError::UnknownSlaIndex(entry.index))?;
                let pair = (entry.src_ip, entry.dst_ip);
                if let Some(&owner) = self.sla_by_pair.get(&pair) {
                    if owner != entry.index {
                        return Err(LedgerError::DuplicateSlaPair(entry.src_ip, entry.dst_ip));
                    }
                }
                let old_pair = (old.src_ip, old.dst_ip);
                self.sla_by_pair.remove(&old_pair);
                self.sla_by_pair.insert(pair, entry.index);
                self.sla.insert(entry.index, entry.clone());
            }
            TxPayload::ReserveBandwidth { links, bw_bps } => {
                check_distinct(links)?;
                for key in links {
                    let avail = self
                        .available
                        .get(key)
                        .ok_or_else(|| LedgerError::UnknownLink(key.clone()))?;
                    if avail < *bw_bps {
                        return Err(LedgerError::InsufficientBandwidth {
                            link: key.clone(),
                            available_bps: avail,
                            requested_bps: *bw_bps,
                        });
                    }
                }
                for key in links {
                    *self.available.get_mut(key).expect("checked above") -= bw_bps;
                }
            }
            TxPayload::ReleaseBandwidth { links, bw_bps } => {
                check_distinct(links)?;
                for key in links {
                    let avail = self
                        .available
                        .get(key)
                        .ok_or_else(|| LedgerError::UnknownLink(key.clone()))?;
                    let max = self.maxima.get(key).unwrap_or(0);
                    if avail.checked_add(*bw_bps).is_none_or(|v| v > max) {
                        return Err(LedgerError::OverRelease {
                            link: key.clone(),
                            available_bps: avail,
                            released_bps: *bw_bps,
                            max_bps: max,
                        });
                    }
                }
                for key in links {
                    *self.available.get_mut(key).expect("checked above") += bw_bps;
                }
            }
            TxPayload::SetTraversalEdge { from, to, edge_switch } => {
                self.traversal.insert((*from, *to), edge_switch.clone());
            }
        }
        Ok(())
    }
}

fn check_sla(entry: &SlaEntry) -> Result<(), LedgerError> {
    if entry.flag == SlaFlag::Guaranteed && entry.sla_bandwidth_bps == 0 {
        return Err(LedgerError::ZeroGuaranteedSla(entry.index));
    }
    Ok(())
}

fn check_distinct(links: &[LinkKey]) -> Result<(), LedgerError> {
    let mut seen = BTreeSet::new();
    for key in links {
        if !seen.insert(key) {
            return Err(LedgerError::RepeatedLink(key.clone()));
        }
    }
    Ok(())
}
