//! Per-controller integrity verification and malicious-host detection.
//!
//! A sender hashes each command, writes the digest to the ledger and only then
//! queues the command for delivery. Receivers re-hash what arrived and look the
//! digest up, either before deploying (`Immediate`) or after, from a FIFO
//! buffer drained at the end of every tick (`Deferred`).
//!
//! Hosts obtain addresses through DHCP only if their MAC is bound in the
//! ledger's IP-MAC table, and ARP messages whose sender IP/MAC pair contradicts
//! that table are dropped. A host pair may talk only after a validated ARP
//! request and its matching reply.

mod arp;
mod command;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::net::Ipv4Addr;
use std::str::FromStr;

use thiserror::Error;

use crate::event_log::{EventKind, SecurityEventKind};
use crate::fabric::Fabric;
use crate::ledger::{Digest, LedgerError};
use crate::net::Mac;

pub use arp::{ArpMessage, ArpOp, ArpPairRegistry};
pub use command::{compute_command_digest, CommandKind, ControlCommand, Destination};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ControlPlaneError {
    #[error("unknown controller {0}")]
    UnknownController(u32),
    #[error("command payload is empty")]
    EmptyPayload,
    #[error("controller {controller} sent timestamp {got} after {last}")]
    NonMonotonicTimestamp { controller: u32, last: u64, got: u64 },
    #[error("ledger rejected command digest: {0}")]
    LedgerRejected(#[from] LedgerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum VerifyMode {
    #[default]
    Immediate,
    Deferred,
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerifyMode::Immediate => "immediate",
            VerifyMode::Deferred => "deferred",
        })
    }
}

impl FromStr for VerifyMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "immediate" => Ok(VerifyMode::Immediate),
            "deferred" => Ok(VerifyMode::Deferred),
            other => Err(format!("unknown verify mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerificationResult {
    pub command_digest: Digest,
    pub controller: u32,
    pub verified: bool,
    pub mode: VerifyMode,
    pub decided_at_ms: u64,
}

/// A command deployed without verification, waiting in its receiver's buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeferredTicket {
    pub command_digest: Digest,
    pub controller: u32,
    pub kind: CommandKind,
    pub received_at_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receipt {
    Verified(VerificationResult),
    Deferred(DeferredTicket),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DhcpOutcome {
    Assigned(Ipv4Addr),
    Denied,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArpAction {
    /// Sender IP/MAC contradicted the ledger.
    Dropped,
    /// Target not local: request flooded to peer controllers.
    Flooded(Digest),
    /// Target local and the requester remote: reply sent back as a command.
    RepliedRemote(Digest),
    /// Requester and target under the same controller.
    RepliedLocal,
    /// A reply matched an outstanding request; the pair is now qualified.
    Qualified,
    /// Valid but of no concern here: a flood for some other domain, or an
    /// unsolicited reply.
    Discarded,
}

/// Selects an in-flight command and the byte to invert. Fires once.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TamperRule {
    pub target_digest: Option<Digest>,
    pub command: Option<CommandKind>,
    pub to: Option<u32>,
    pub flip_byte: usize,
}

impl TamperRule {
    fn matches(&self, sent_digest: &Digest, cmd: &ControlCommand, to: u32) -> bool {
        self.target_digest.is_none_or(|d| d == *sent_digest)
            && self.command.is_none_or(|k| k == cmd.kind)
            && self.to.is_none_or(|t| t == to)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Pending {
    Deliver {
        to: u32,
        cmd: ControlCommand,
        sent_digest: Digest,
    },
    Verify {
        to: u32,
        cmd: ControlCommand,
    },
}

#[derive(Debug, Clone, Default)]
struct ControllerState {
    deferred: VecDeque<DeferredTicket>,
    /// (requester IP, target IP) of requests this controller originated.
    pending_arp: BTreeSet<(Ipv4Addr, Ipv4Addr)>,
    last_sent_ms: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct ControlPlane {
    mode: VerifyMode,
    verify_delay_ms: u64,
    controllers: BTreeMap<u32, ControllerState>,
    queue: BTreeMap<(u64, u64), Pending>,
    next_item: u64,
    assigned_ips: BTreeMap<String, Ipv4Addr>,
    registry: ArpPairRegistry,
    results: Vec<VerificationResult>,
    tamper_rules: Vec<TamperRule>,
}

impl ControlPlane {
    pub fn new(fabric: &Fabric, mode: VerifyMode, verify_delay_ms: u64) -> Self {
        ControlPlane {
            mode,
            verify_delay_ms,
            controllers: fabric
                .topology
                .controllers()
                .map(|c| (c.id, ControllerState::default()))
                .collect(),
            queue: BTreeMap::new(),
            next_item: 0,
            assigned_ips: BTreeMap::new(),
            registry: ArpPairRegistry::default(),
            results: Vec::new(),
            tamper_rules: Vec::new(),
        }
    }

    pub fn mode(&self) -> VerifyMode {
        self.mode
    }

    pub fn results(&self) -> &[VerificationResult] {
        &self.results
    }

    pub fn registry(&self) -> &ArpPairRegistry {
        &self.registry
    }

    pub fn host_ip(&self, host: &str) -> Option<Ipv4Addr> {
        self.assigned_ips.get(host).copied()
    }

    pub fn pending_deliveries(&self) -> usize {
        self.queue.len()
    }

    pub fn deferred_len(&self, controller: u32) -> usize {
        self.controllers.get(&controller).map_or(0, |c| c.deferred.len())
    }

    pub fn arm_tamper(&mut self, rule: TamperRule) {
        self.tamper_rules.push(rule);
    }

    fn state_mut(&mut self, id: u32) -> Result<&mut ControllerState, ControlPlaneError> {
        self.controllers
            .get_mut(&id)
            .ok_or(ControlPlaneError::UnknownController(id))
    }

    fn enqueue(&mut self, at_ms: u64, item: Pending) {
        self.queue.insert((at_ms, self.next_item), item);
        self.next_item += 1;
    }

    fn check_sendable(&mut self, cmd: &ControlCommand) -> Result<Vec<u32>, ControlPlaneError> {
        if cmd.payload.is_empty() {
            return Err(ControlPlaneError::EmptyPayload);
        }
        let state = self.state_mut(cmd.src_controller)?;
        if let Some(last) = state.last_sent_ms {
            if cmd.timestamp_ms < last {
                return Err(ControlPlaneError::NonMonotonicTimestamp {
                    controller: cmd.src_controller,
                    last,
                    got: cmd.timestamp_ms,
                });
            }
        }
        match cmd.dst {
            Destination::Controller(id) => {
                if !self.controllers.contains_key(&id) {
                    return Err(ControlPlaneError::UnknownController(id));
                }
                Ok(vec![id])
            }
            Destination::Broadcast => Ok(Vec::new()),
        }
    }

    /// Records the command digest in the ledger, then queues delivery to the
    /// destination, or to every peer on broadcast.
    pub fn send_command(&mut self, fabric: &mut Fabric, cmd: ControlCommand) -> Result<Digest, ControlPlaneError> {
        self.dispatch(fabric, cmd, true)
    }

    /// Fault injection: delivers the command without recording its digest.
    pub fn send_unrecorded(&mut self, fabric: &mut Fabric, cmd: ControlCommand) -> Result<Digest, ControlPlaneError> {
        self.dispatch(fabric, cmd, false)
    }

    fn dispatch(
        &mut self,
        fabric: &mut Fabric,
        cmd: ControlCommand,
        record: bool,
    ) -> Result<Digest, ControlPlaneError> {
        let mut targets = self.check_sendable(&cmd)?;
        if cmd.dst == Destination::Broadcast {
            let src = fabric
                .topology
                .controller(cmd.src_controller)
                .ok_or(ControlPlaneError::UnknownController(cmd.src_controller))?;
            targets = src.peer_ids.clone();
        }
        let digest = compute_command_digest(&cmd);
        if record {
            fabric.ledger.record_command_hash(digest, fabric.now_ms)?;
            fabric.log.push(
                fabric.now_ms,
                EventKind::Record,
                format!("{digest} from={} kind={}", cmd.src_controller, cmd.kind),
            );
        }
        self.state_mut(cmd.src_controller)?.last_sent_ms = Some(cmd.timestamp_ms);
        for to in targets {
            self.enqueue(
                fabric.now_ms,
                Pending::Deliver {
                    to,
                    cmd: cmd.clone(),
                    sent_digest: digest,
                },
            );
        }
        Ok(digest)
    }

    /// Handles every queued delivery and delayed verification due by
    /// `fabric.now_ms`, including anything those produce.
    pub fn process(&mut self, fabric: &mut Fabric) -> Result<(), ControlPlaneError> {
        while let Some((&(at, seq), _)) = self.queue.first_key_value() {
            if at > fabric.now_ms {
                break;
            }
            let item = self.queue.remove(&(at, seq)).expect("present");
            match item {
                Pending::Deliver { to, cmd, sent_digest } => self.deliver(fabric, to, cmd, sent_digest)?,
                Pending::Verify { to, cmd } => {
                    self.receive_command(fabric, to, &cmd, VerifyMode::Immediate)?;
                }
            }
        }
        Ok(())
    }

    fn deliver(
        &mut self,
        fabric: &mut Fabric,
        to: u32,
        mut cmd: ControlCommand,
        sent_digest: Digest,
    ) -> Result<(), ControlPlaneError> {
        let now = fabric.now_ms;
        fabric
            .log
            .push(now, EventKind::Deliver, format!("{sent_digest} to={to}"));
        if let Some(pos) = self.tamper_rules.iter().position(|r| r.matches(&sent_digest, &cmd, to)) {
            let rule = self.tamper_rules.remove(pos);
            cmd = cmd.flip_byte(rule.flip_byte);
            fabric.log.push(
                now,
                EventKind::Tamper,
                format!(
                    "{sent_digest} to={to} offset={} now={}",
                    rule.flip_byte % (cmd.mutable_len()),
                    compute_command_digest(&cmd)
                ),
            );
        }
        match self.mode {
            VerifyMode::Immediate if self.verify_delay_ms > 0 => {
                self.enqueue(now + self.verify_delay_ms, Pending::Verify { to, cmd });
            }
            mode => {
                self.receive_command(fabric, to, &cmd, mode)?;
            }
        }
        Ok(())
    }

    /// Verifies (or buffers) a delivered command and deploys it when allowed.
    pub fn receive_command(
        &mut self,
        fabric: &mut Fabric,
        dst: u32,
        cmd: &ControlCommand,
        mode: VerifyMode,
    ) -> Result<Receipt, ControlPlaneError> {
        self.state_mut(dst)?;
        let digest = compute_command_digest(cmd);
        let now = fabric.now_ms;
        match mode {
            VerifyMode::Immediate => {
                let verified = fabric.ledger.contains_command_hash(&digest);
                let result = VerificationResult {
                    command_digest: digest,
                    controller: dst,
                    verified,
                    mode,
                    decided_at_ms: now,
                };
                self.results.push(result);
                if verified {
                    fabric
                        .log
                        .push(now, EventKind::Verified, format!("{digest} at={dst} mode=immediate"));
                    self.deploy(fabric, dst, cmd)?;
                } else {
                    fabric.log.push(
                        now,
                        EventKind::Security(SecurityEventKind::ImmediateIntegrityFailure),
                        format!("{digest} at={dst} kind={} dropped", cmd.kind),
                    );
                }
                Ok(Receipt::Verified(result))
            }
            VerifyMode::Deferred => {
                let ticket = DeferredTicket {
                    command_digest: digest,
                    controller: dst,
                    kind: cmd.kind,
                    received_at_ms: now,
                };
                self.state_mut(dst)?.deferred.push_back(ticket);
                self.deploy(fabric, dst, cmd)?;
                Ok(Receipt::Deferred(ticket))
            }
        }
    }

    fn deploy(&mut self, fabric: &mut Fabric, at: u32, cmd: &ControlCommand) -> Result<(), ControlPlaneError> {
        let digest = compute_command_digest(cmd);
        fabric.log.push(
            fabric.now_ms,
            EventKind::Deployed,
            format!("{digest} at={at} kind={}", cmd.kind),
        );
        if matches!(cmd.kind, CommandKind::ArpRequest | CommandKind::ArpReply) {
            match ArpMessage::decode(&cmd.payload) {
                Some(arp) => {
                    self.handle_arp(fabric, at, arp, Some(cmd.src_controller))?;
                }
                None => fabric.log.push(
                    fabric.now_ms,
                    EventKind::Discarded,
                    format!("{digest} at={at} undecodable ARP payload"),
                ),
            }
        }
        Ok(())
    }

    /// Drains the controller's deferred buffer in FIFO order.
    pub fn flush_deferred(
        &mut self,
        fabric: &mut Fabric,
        dst: u32,
    ) -> Result<Vec<VerificationResult>, ControlPlaneError> {
        let tickets: Vec<DeferredTicket> = self.state_mut(dst)?.deferred.drain(..).collect();
        let now = fabric.now_ms;
        let mut out = Vec::with_capacity(tickets.len());
        for t in tickets {
            let verified = fabric.ledger.contains_command_hash(&t.command_digest);
            let result = VerificationResult {
                command_digest: t.command_digest,
                controller: dst,
                verified,
                mode: VerifyMode::Deferred,
                decided_at_ms: now,
            };
            if verified {
                fabric.log.push(
                    now,
                    EventKind::Verified,
                    format!("{} at={dst} mode=deferred", t.command_digest),
                );
            } else {
                fabric.log.push(
                    now,
                    EventKind::Security(SecurityEventKind::PostHocIntegrityFailure),
                    format!("{} at={dst} kind={} already deployed", t.command_digest, t.kind),
                );
            }
            self.results.push(result);
            out.push(result);
        }
        Ok(out)
    }

    pub fn flush_all_deferred(&mut self, fabric: &mut Fabric) -> Result<Vec<VerificationResult>, ControlPlaneError> {
        let ids: Vec<u32> = self.controllers.keys().copied().collect();
        let mut out = Vec::new();
        for id in ids {
            out.extend(self.flush_deferred(fabric, id)?);
        }
        Ok(out)
    }

    /// Hands out the IP bound to `mac`, or denies the host.
    pub fn handle_dhcp(&mut self, fabric: &mut Fabric, ctrl: u32, mac: Mac) -> Result<DhcpOutcome, ControlPlaneError> {
        self.state_mut(ctrl)?;
        let now = fabric.now_ms;
        match fabric.ledger.mac_authorized(&mac) {
            Some(ip) => {
                if let Some(host) = fabric.topology.host_by_mac(&mac) {
                    self.assigned_ips.insert(host.name.clone(), ip);
                }
                fabric
                    .log
                    .push(now, EventKind::Dhcp, format!("mac={mac} ip={ip} at={ctrl}"));
                Ok(DhcpOutcome::Assigned(ip))
            }
            None => {
                fabric.log.push(
                    now,
                    EventKind::Security(SecurityEventKind::UnauthorizedHost),
                    format!("mac={mac} at={ctrl}"),
                );
                Ok(DhcpOutcome::Denied)
            }
        }
    }

    fn local_host_with_ip(&self, fabric: &Fabric, ctrl: u32, ip: Ipv4Addr) -> Option<Mac> {
        let domain = fabric.topology.controller(ctrl)?.domain_id;
        fabric
            .topology
            .hosts()
            .filter(|h| h.domain_id == domain)
            .find(|h| self.assigned_ips.get(&h.name) == Some(&ip))
            .map(|h| h.mac)
    }

    /// Processes an ARP message at `ctrl`. `via` is the peer controller the
    /// message came from, or `None` when it came from a local host.
    pub fn handle_arp(
        &mut self,
        fabric: &mut Fabric,
        ctrl: u32,
        arp: ArpMessage,
        via: Option<u32>,
    ) -> Result<ArpAction, ControlPlaneError> {
        self.state_mut(ctrl)?;
        let now = fabric.now_ms;
        if fabric.ledger.mac_authorized(&arp.sender_mac) != Some(arp.sender_ip) {
            fabric.log.push(
                now,
                EventKind::Security(SecurityEventKind::ArpSpoof),
                format!(
                    "{:?} sender_ip={} sender_mac={} at={ctrl}",
                    arp.op, arp.sender_ip, arp.sender_mac
                ),
            );
            return Ok(ArpAction::Dropped);
        }
        match arp.op {
            ArpOp::Request => {
                if let Some(target_mac) = self.local_host_with_ip(fabric, ctrl, arp.target_ip) {
                    let reply = ArpMessage {
                        op: ArpOp::Reply,
                        sender_ip: arp.target_ip,
                        sender_mac: target_mac,
                        target_ip: arp.sender_ip,
                        target_mac: Some(arp.sender_mac),
                    };
                    match via {
                        None => {
                            self.state_mut(ctrl)?.pending_arp.insert((arp.sender_ip, arp.target_ip));
                            self.handle_arp(fabric, ctrl, reply, None)?;
                            Ok(ArpAction::RepliedLocal)
                        }
                        Some(peer) => {
                            let digest = self.send_command(
                                fabric,
                                ControlCommand {
                                    kind: CommandKind::ArpReply,
                                    src_controller: ctrl,
                                    dst: Destination::Controller(peer),
                                    payload: reply.encode(),
                                    timestamp_ms: now,
                                },
                            )?;
                            Ok(ArpAction::RepliedRemote(digest))
                        }
                    }
                } else if via.is_none() {
                    self.state_mut(ctrl)?.pending_arp.insert((arp.sender_ip, arp.target_ip));
                    let digest = self.send_command(
                        fabric,
                        ControlCommand {
                            kind: CommandKind::ArpRequest,
                            src_controller: ctrl,
                            dst: Destination::Broadcast,
                            payload: arp.encode(),
                            timestamp_ms: now,
                        },
                    )?;
                    Ok(ArpAction::Flooded(digest))
                } else {
                    fabric.log.push(
                        now,
                        EventKind::Discarded,
                        format!(
                            "ARP {} -> {} from={} not local to {ctrl}",
                            arp.sender_ip,
                            arp.target_ip,
                            via.unwrap_or(ctrl)
                        ),
                    );
                    Ok(ArpAction::Discarded)
                }
            }
            ArpOp::Reply => {
                let key = (arp.target_ip, arp.sender_ip);
                if self.state_mut(ctrl)?.pending_arp.remove(&key) {
                    self.registry.qualify(arp.target_ip, arp.sender_ip);
                    fabric.log.push(
                        now,
                        EventKind::Qualified,
                        format!("{} {} at={ctrl}", arp.target_ip, arp.sender_ip),
                    );
                    Ok(ArpAction::Qualified)
                } else {
                    fabric.log.push(
                        now,
                        EventKind::Discarded,
                        format!("unsolicited ARP reply {} -> {} at={ctrl}", arp.sender_ip, arp.target_ip),
                    );
                    Ok(ArpAction::Discarded)
                }
            }
        }
    }

    /// Starts an ARP exchange from `src_host` for `dst_host`'s address.
    /// Hosts without a DHCP lease use 0.0.0.0, which the IP-MAC check rejects.
    pub fn arp_exchange(
        &mut self,
        fabric: &mut Fabric,
        src_host: &str,
        dst_host: &str,
    ) -> Result<Option<ArpAction>, ControlPlaneError> {
        let (Some(src), Some(dst)) = (fabric.topology.host(src_host), fabric.topology.host(dst_host)) else {
            return Ok(None);
        };
        let unassigned = Ipv4Addr::UNSPECIFIED;
        let arp = ArpMessage::request(
            self.host_ip(&src.name).unwrap_or(unassigned),
            src.mac,
            self.host_ip(&dst.name).unwrap_or(unassigned),
        );
        self.arp_from_host(fabric, src_host, arp).map(Some)
    }

    /// Injects an ARP message as if `host` had emitted it.
    pub fn arp_from_host(
        &mut self,
        fabric: &mut Fabric,
        host: &str,
        arp: ArpMessage,
    ) -> Result<ArpAction, ControlPlaneError> {
        let domain = fabric.topology.host(host).map(|h| h.domain_id).unwrap_or_default();
        let ctrl = fabric
            .topology
            .controller_for_domain(domain)
            .ok_or(ControlPlaneError::UnknownController(domain))?;
        let action = self.handle_arp(fabric, ctrl, arp, None)?;
        self.process(fabric)?;
        Ok(action)
    }

    /// True iff both hosts hold leases and completed a qualified ARP exchange.
    pub fn can_communicate(&self, h1: &str, h2: &str) -> bool {
        match (self.host_ip(h1), self.host_ip(h2)) {
            (Some(a), Some(b)) => self.registry.contains(a, b),
            _ => false,
        }
    }
}
