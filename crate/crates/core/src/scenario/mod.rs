//! Scenario files and the simulation driver.
//!
//! A scenario is a line-based text file. Each non-comment line is a record
//! kind followed by `key=value` pairs:
//!
//! ```text
//! controller id=<int> domain=<int> peers=<int,int,...>
//! switch id=<str> domain=<int> edge=<0|1>
//! link a=<id> b=<id> capacity_mbps=<real> gq_mbps=<real>
//! host name=<str> mac=<MAC> switch=<id>
//! traversal from=<int> to=<int> edge_switch=<id>
//! ipmac ip=<IPv4> mac=<MAC>
//! sla index=<int> src=<IPv4> dst=<IPv4> bw_mbps=<real> flag=<0|1>
//! run ticks=<int> verify_mode=<immediate|deferred> verify_delay=<ticks>
//! event t=<int> kind=<kind> ...
//! ```
//!
//! Event kinds and their keys:
//!
//! | kind           | keys                                                       |
//! |----------------|------------------------------------------------------------|
//! | `dhcp`         | `host`                                                     |
//! | `arp_exchange` | `src`, `dst`                                               |
//! | `send_command` | `from`, `to` (id or `broadcast`), `command`, `payload` (hex), optional `record=0` |
//! | `tamper`       | any of `target_digest`, `command`, `to`, `flip_byte`       |
//! | `start_flow`   | `id`, `src`, `dst`, `demand_mbps`, optional `meter_mbps`   |
//! | `stop_flow`    | `id`                                                       |
//! | `provision`    | `id`, `src`, `dst`, optional `meter_mbps`                  |
//!
//! `#` starts a comment. Events must be sorted by `t`; events sharing a time
//! run in file order.

mod parse;
mod run;
mod world;

use std::net::Ipv4Addr;

use thiserror::Error;

use crate::control_plane::{CommandKind, ControlPlaneError, Destination, VerifyMode};
use crate::ledger::{Digest, LedgerError, SlaEntry};
use crate::net::Mac;
use crate::provisioning::ProvisionError;
use crate::topology::{TopologyDescription, TopologyError};

pub use parse::parse_scenario;
pub use run::{run, write_outputs, RunError, RunSummary};
pub use world::World;

pub const CASE_A: &str = include_str!("../../scenarios/case_a.scn");
pub const CASE_B: &str = include_str!("../../scenarios/case_b.scn");

/// Source text of a built-in scenario.
pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "case_a" => Some(CASE_A),
        "case_b" => Some(CASE_B),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown id `{id}`")]
    UnknownId { line: usize, id: String },
    #[error("line {line}: event is earlier than the one before it")]
    UnsortedEvents { line: usize },
    #[error("invalid topology: {0}")]
    Topology(#[from] TopologyError),
    #[error("ledger: {0}")]
    Ledger(#[from] LedgerError),
    #[error("control plane: {0}")]
    ControlPlane(#[from] ControlPlaneError),
    #[error("provisioning: {0}")]
    Provision(#[from] ProvisionError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraversalEntry {
    pub from: u32,
    pub to: u32,
    pub edge_switch: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Dhcp {
        host: String,
    },
    ArpExchange {
        src: String,
        dst: String,
    },
    SendCommand {
        from: u32,
        to: Destination,
        command: CommandKind,
        payload: Vec<u8>,
        record: bool,
    },
    Tamper {
        target_digest: Option<Digest>,
        command: Option<CommandKind>,
        to: Option<u32>,
        flip_byte: usize,
    },
    StartFlow {
        id: String,
        src: String,
        dst: String,
        demand_bps: u64,
        meter_bps: Option<u64>,
    },
    StopFlow {
        id: String,
    },
    Provision {
        id: String,
        src: String,
        dst: String,
        meter_bps: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduledEvent {
    pub t: u64,
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub topology: TopologyDescription,
    pub traversal: Vec<TraversalEntry>,
    pub ip_mac: Vec<(Ipv4Addr, Mac)>,
    pub sla: Vec<SlaEntry>,
    pub events: Vec<ScheduledEvent>,
    pub ticks: u64,
    pub verify_mode: VerifyMode,
    pub verify_delay_ticks: u64,
}

impl Scenario {
    /// Renders the scenario in the line format; parsing the result yields an
    /// equal scenario.
    pub fn to_text(&self) -> String {
        parse::serialize(self)
    }
}
