//! Ledger-backed multi-controller SDN simulator.
//!
//! Controllers record a digest of every inter-controller command on a
//! hash-chained ledger before sending it, and receivers check what arrived
//! against that record. The same ledger holds the IP-MAC bindings used to
//! authorize hosts, the SLA table, and the bandwidth matrices consulted by the
//! provisioning engine. A fluid-model engine then shares link capacity between
//! guaranteed and best-effort flows tick by tick.

pub mod control_plane;
pub mod event_log;
pub mod fabric;
pub mod flow_sim;
pub mod ledger;
pub mod net;
pub mod provisioning;
pub mod scenario;
pub mod topology;

pub use control_plane::{ControlCommand, ControlPlane, VerifyMode};
pub use event_log::{EventKind, EventLog, SecurityEventKind};
pub use fabric::Fabric;
pub use flow_sim::{allocate_link, water_fill, LinkDemand, MetricRow, Queue};
pub use ledger::{Block, Digest, Ledger, SlaEntry, SlaFlag};
pub use net::{LinkKey, Mac};
pub use provisioning::{Flow, FlowState, OutcomeKind, ProvisionOutcome, ProvisionRequest, Provisioner, ServiceClass};
pub use scenario::{parse_scenario, Scenario, ScenarioError, World};
pub use topology::{Path, Topology};
