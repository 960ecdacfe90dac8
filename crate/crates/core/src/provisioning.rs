//! SLA-driven bandwidth provisioning.
//!
//! A request is guaranteed iff its `(src_ip, dst_ip)` SLA row carries flag 1.
//! Guaranteed requests reserve their SLA bandwidth on every link of the
//! composed path if it fits there, otherwise on the first feasible loop-free
//! alternate (by hop count, then node sequence, up to the topology diameter).
//! When nothing fits the flow runs best-effort on the composed path and waits,
//! in demotion order, until its guaranteed path frees up.
//!
//! Every method takes `&mut self`, so requests, promotions and teardowns are
//! processed strictly one at a time and each decision sees the ledger state
//! left by the previous one.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::net::Ipv4Addr;

use thiserror::Error;

use crate::event_log::EventKind;
use crate::fabric::Fabric;
use crate::ledger::{Block, Ledger, LedgerError, SlaEntry, SlaFlag};
use crate::net::LinkKey;
use crate::topology::{LinkKind, Path, Topology, TopologyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProvisionError {
    #[error("unknown host `{0}`")]
    UnknownHost(String),
    #[error("flow `{0}` already exists")]
    DuplicateFlow(String),
    #[error("unknown flow `{0}`")]
    UnknownFlow(String),
    #[error("meter cap of flow `{0}` is below its SLA bandwidth")]
    InvalidMeter(String),
    #[error("no controller path from domain {from} to domain {to}")]
    NoControllerPath { from: u32, to: u32 },
    #[error("traversal matrix has no edge switch for {from} -> {to}")]
    MissingTraversal { from: u32, to: u32 },
    #[error("no path: {0}")]
    NoPath(#[from] TopologyError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProvisionRequest {
    pub flow_id: String,
    pub src_host: String,
    pub dst_host: String,
    pub src_ip: Ipv4Addr,
    pub dst_ip: Ipv4Addr,
    pub demand_bps: u64,
    pub meter_cap_bps: Option<u64>,
    pub requested_at_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ServiceClass {
    Guaranteed,
    BestEffort,
}

impl fmt::Display for ServiceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ServiceClass::Guaranteed => "Guaranteed",
            ServiceClass::BestEffort => "BestEffort",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlowState {
    ActiveGuaranteed,
    ActiveBestEffort,
    DemotedAwaitingPromotion,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    pub id: String,
    pub src_host: String,
    pub dst_host: String,
    pub class: ServiceClass,
    pub demand_bps: u64,
    pub meter_cap_bps: Option<u64>,
    /// Path the traffic currently takes.
    pub path: Path,
    pub state: FlowState,
    pub sla_index: Option<u64>,
    /// Bandwidth reserved while `ActiveGuaranteed`; the SLA bandwidth.
    pub reserved_bps: u64,
    /// Promotion target of a demoted flow.
    pub guaranteed_path: Option<Path>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutcomeKind {
    GuaranteedOnPrimaryPath,
    GuaranteedOnAlternatePath,
    BestEffortFallback,
    BestEffort,
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutcomeKind::GuaranteedOnPrimaryPath => "GuaranteedOnPrimaryPath",
            OutcomeKind::GuaranteedOnAlternatePath => "GuaranteedOnAlternatePath",
            OutcomeKind::BestEffortFallback => "BestEffortFallback",
            OutcomeKind::BestEffort => "BestEffort",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProvisionOutcome {
    pub kind: OutcomeKind,
    pub flow: Flow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Guaranteed(SlaEntry),
    BestEffort,
}

pub fn classify_request(ledger: &Ledger, src_ip: Ipv4Addr, dst_ip: Ipv4Addr) -> Classification {
    match ledger.find_sla(src_ip, dst_ip) {
        Some(entry) if entry.flag == SlaFlag::Guaranteed => Classification::Guaranteed(entry.clone()),
        _ => Classification::BestEffort,
    }
}

/// Minimum-hop controller chain over the peer graph, lowest ids on ties.
pub fn controller_path(topology: &Topology, src_domain: u32, dst_domain: u32) -> Result<Vec<u32>, ProvisionError> {
    let none = || ProvisionError::NoControllerPath {
        from: src_domain,
        to: dst_domain,
    };
    let src = topology.controller_for_domain(src_domain).ok_or_else(none)?;
    let dst = topology.controller_for_domain(dst_domain).ok_or_else(none)?;

    let mut dist = BTreeMap::from([(dst, 0usize)]);
    let mut queue = VecDeque::from([dst]);
    while let Some(c) = queue.pop_front() {
        let d = dist[&c];
        for &p in &topology.controller(c).expect("known").peer_ids {
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(p) {
                e.insert(d + 1);
                queue.push_back(p);
            }
        }
    }
    let mut remaining = *dist.get(&src).ok_or_else(none)?;
    let mut chain = vec![src];
    let mut current = src;
    while remaining > 0 {
        // peer_ids are sorted, so the first match is the lowest id
        current = *topology
            .controller(current)
            .expect("known")
            .peer_ids
            .iter()
            .find(|p| dist.get(p) == Some(&(remaining - 1)))
            .expect("consistent distances");
        chain.push(current);
        remaining -= 1;
    }
    Ok(chain)
}

/// End-to-end path: per-domain shortest segments stitched together at the
/// edge switches named by the ledger's traversal matrix.
pub fn compose_path(
    topology: &Topology,
    ledger: &Ledger,
    src_host: &str,
    dst_host: &str,
) -> Result<Path, ProvisionError> {
    let src = topology
        .host(src_host)
        .ok_or_else(|| ProvisionError::UnknownHost(src_host.to_string()))?;
    let dst = topology
        .host(dst_host)
        .ok_or_else(|| ProvisionError::UnknownHost(dst_host.to_string()))?;
    let chain = controller_path(topology, src.domain_id, dst.domain_id)?;
    let domain_of = |c: u32| topology.controller(c).expect("known").domain_id;

    let mut nodes: Vec<String> = Vec::new();
    let mut entry = src.name.clone();
    for pair in chain.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let exit = ledger
            .traversal_edge(a, b)
            .ok_or(ProvisionError::MissingTraversal { from: a, to: b })?;
        let ingress = ledger
            .traversal_edge(b, a)
            .ok_or(ProvisionError::MissingTraversal { from: b, to: a })?;
        let segment = topology.local_shortest_path(domain_of(a), &entry, exit)?;
        append_segment(&mut nodes, segment.nodes);
        let crossing = topology.link_between(exit, ingress).and_then(|k| topology.link(k));
        if crossing.is_none_or(|l| l.kind != LinkKind::InterDomain) {
            return Err(TopologyError::NoPath {
                from: exit.to_string(),
                to: ingress.to_string(),
            }
            .into());
        }
        entry = ingress.to_string();
    }
    let last = *chain.last().expect("non-empty chain");
    let segment = topology.local_shortest_path(domain_of(last), &entry, &dst.name)?;
    append_segment(&mut nodes, segment.nodes);

    let distinct: BTreeSet<&String> = nodes.iter().collect();
    if distinct.len() != nodes.len() {
        return Err(TopologyError::NoPath {
            from: src_host.to_string(),
            to: dst_host.to_string(),
        }
        .into());
    }
    Ok(topology.path_from_nodes(nodes)?)
}

fn append_segment(nodes: &mut Vec<String>, segment: Vec<String>) {
    let skip = usize::from(nodes.last().is_some() && nodes.last() == segment.first());
    nodes.extend(segment.into_iter().skip(skip));
}

/// Every link of `path` still has `bw_bps` of guaranteed bandwidth available.
pub fn path_feasible(ledger: &Ledger, path: &Path, bw_bps: u64) -> bool {
    path.links
        .iter()
        .all(|k| ledger.available_bps(k).is_some_and(|a| a >= bw_bps))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TeardownReport {
    pub released: Option<Block>,
    pub promoted: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct Provisioner {
    flows: BTreeMap<String, Flow>,
    demoted: VecDeque<String>,
}

impl Provisioner {
    pub fn new() -> Self {
        Provisioner::default()
    }

    pub fn flows(&self) -> impl Iterator<Item = &Flow> {
        self.flows.values()
    }

    pub fn flow(&self, id: &str) -> Option<&Flow> {
        self.flows.get(id)
    }

    /// Demoted flow ids, earliest demotion first.
    pub fn demoted(&self) -> impl Iterator<Item = &str> {
        self.demoted.iter().map(String::as_str)
    }

    pub fn set_demand(&mut self, id: &str, demand_bps: u64) -> Result<(), ProvisionError> {
        let flow = self
            .flows
            .get_mut(id)
            .ok_or_else(|| ProvisionError::UnknownFlow(id.to_string()))?;
        flow.demand_bps = demand_bps;
        Ok(())
    }

    /// Sum of bandwidth held by `ActiveGuaranteed` flows, per link.
    pub fn reserved_per_link(&self) -> BTreeMap<LinkKey, u64> {
        let mut out = BTreeMap::new();
        for f in self.flows.values().filter(|f| f.state == FlowState::ActiveGuaranteed) {
            for k in &f.path.links {
                *out.entry(k.clone()).or_insert(0) += f.reserved_bps;
            }
        }
        out
    }

    pub fn provision(
        &mut self,
        fabric: &mut Fabric,
        req: &ProvisionRequest,
    ) -> Result<ProvisionOutcome, ProvisionError> {
        if self.flows.contains_key(&req.flow_id) {
            return Err(ProvisionError::DuplicateFlow(req.flow_id.clone()));
        }
        let primary = compose_path(&fabric.topology, &fabric.ledger, &req.src_host, &req.dst_host)?;
        let now = fabric.now_ms;
        let mut flow = Flow {
            id: req.flow_id.clone(),
            src_host: req.src_host.clone(),
            dst_host: req.dst_host.clone(),
            class: ServiceClass::BestEffort,
            demand_bps: req.demand_bps,
            meter_cap_bps: None,
            path: primary.clone(),
            state: FlowState::ActiveBestEffort,
            sla_index: None,
            reserved_bps: 0,
            guaranteed_path: None,
        };

        let kind = match classify_request(&fabric.ledger, req.src_ip, req.dst_ip) {
            Classification::BestEffort => OutcomeKind::BestEffort,
            Classification::Guaranteed(sla) => {
                let meter = req.meter_cap_bps.unwrap_or(sla.sla_bandwidth_bps);
                if meter < sla.sla_bandwidth_bps {
                    return Err(ProvisionError::InvalidMeter(req.flow_id.clone()));
                }
                flow.class = ServiceClass::Guaranteed;
                flow.meter_cap_bps = Some(meter);
                flow.sla_index = Some(sla.index);
                flow.reserved_bps = sla.sla_bandwidth_bps;
                let bw = sla.sla_bandwidth_bps;

                let chosen = if path_feasible(&fabric.ledger, &primary, bw) {
                    Some((primary.clone(), OutcomeKind::GuaranteedOnPrimaryPath))
                } else {
                    fabric
                        .topology
                        .simple_paths(&req.src_host, &req.dst_host, fabric.topology.diameter())
                        .into_iter()
                        .find(|p| path_feasible(&fabric.ledger, p, bw))
                        .map(|p| (p, OutcomeKind::GuaranteedOnAlternatePath))
                };
                match chosen {
                    Some((path, kind)) => {
                        fabric.ledger.reserve_bandwidth(&path.links, bw, now)?;
                        flow.path = path;
                        flow.state = FlowState::ActiveGuaranteed;
                        kind
                    }
                    None => {
                        flow.state = FlowState::DemotedAwaitingPromotion;
                        flow.guaranteed_path = Some(primary);
                        self.demoted.push_back(flow.id.clone());
                        OutcomeKind::BestEffortFallback
                    }
                }
            }
        };
        fabric
            .log
            .push(now, EventKind::Provision, format!("{},{kind},{}", flow.id, flow.path));
        self.flows.insert(flow.id.clone(), flow.clone());
        Ok(ProvisionOutcome { kind, flow })
    }

    /// Re-checks demoted flows in demotion order and moves every one that now
    /// fits back onto its guaranteed path.
    pub fn try_promote(&mut self, fabric: &mut Fabric) -> Result<Vec<String>, ProvisionError> {
        let mut promoted = Vec::new();
        let mut still_waiting = VecDeque::new();
        while let Some(id) = self.demoted.pop_front() {
            let flow = self.flows.get_mut(&id).expect("demoted flows exist");
            let target = flow.guaranteed_path.clone().expect("demoted flows keep a target");
            if path_feasible(&fabric.ledger, &target, flow.reserved_bps) {
                fabric
                    .ledger
                    .reserve_bandwidth(&target.links, flow.reserved_bps, fabric.now_ms)?;
                flow.path = target;
                flow.guaranteed_path = None;
                flow.state = FlowState::ActiveGuaranteed;
                fabric
                    .log
                    .push(fabric.now_ms, EventKind::Promote, format!("{},{}", id, flow.path));
                promoted.push(id);
            } else {
                still_waiting.push_back(id);
            }
        }
        self.demoted = still_waiting;
        Ok(promoted)
    }

    /// Removes a flow, releasing its reservation, then retries promotions.
    pub fn teardown(&mut self, fabric: &mut Fabric, flow_id: &str) -> Result<TeardownReport, ProvisionError> {
        let flow = self
            .flows
            .remove(flow_id)
            .ok_or_else(|| ProvisionError::UnknownFlow(flow_id.to_string()))?;
        self.demoted.retain(|id| id != flow_id);
        let released = if flow.state == FlowState::ActiveGuaranteed {
            Some(
                fabric
                    .ledger
                    .release_bandwidth(&flow.path.links, flow.reserved_bps, fabric.now_ms)?
                    .clone(),
            )
        } else {
            None
        };
        fabric.log.push(fabric.now_ms, EventKind::Teardown, flow_id.to_string());
        let promoted = self.try_promote(fabric)?;
        Ok(TeardownReport { released, promoted })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::BandwidthMatrices;
    use crate::net::Mac;
    use crate::topology::{ControllerSpec, HostSpec, LinkSpec, SwitchSpec, TopologyDescription};

    fn ip(s: &str) -> Ipv4Addr {
        s.parse().unwrap()
    }

    fn host_ip(n: u8) -> Ipv4Addr {
        Ipv4Addr::new(10, 0, 0, n)
    }

    fn mbps(x: f64) -> u64 {
        (x * 1e6).round() as u64
    }

    fn ledger_for(topology: &Topology) -> Ledger {
        let mut maxima = BandwidthMatrices::default();
        for l in topology.links() {
            maxima.set(&l.key, l.guaranteed_queue_max_bps);
        }
        Ledger::new(maxima)
    }

    /// Case B tree with Table III loaded: 9.4 Mbps links, 5 Mbps queues.
    fn case_b() -> Fabric {
        let mut desc = TopologyDescription {
            controllers: vec![ControllerSpec {
                id: 0,
                domain: 0,
                peers: vec![],
            }],
            ..Default::default()
        };
        let link = |a: &str, b: &str| LinkSpec {
            a: a.into(),
            b: b.into(),
            capacity_bps: mbps(9.4),
            gq_bps: mbps(5.0),
        };
        desc.switches.push(SwitchSpec {
            id: "s1".into(),
            domain: 0,
            edge: false,
        });
        for leaf in 0..4u8 {
            let sw = format!("s{}", leaf + 2);
            desc.switches.push(SwitchSpec {
                id: sw.clone(),
                domain: 0,
                edge: false,
            });
            desc.links.push(link("s1", &sw));
            for j in 0..4u8 {
                let n = leaf * 4 + j + 1;
                desc.hosts.push(HostSpec {
                    name: format!("h{n}"),
                    mac: Mac::new([2, 0, 0, 0, 0, n]),
                    switch: sw.clone(),
                });
                desc.links.push(link(&format!("h{n}"), &sw));
            }
        }
        let topology = Topology::build(&desc).unwrap();
        let mut ledger = ledger_for(&topology);
        let rows = [
            (1, 5, 5.7, SlaFlag::BestEffort),
            (2, 6, 3.7, SlaFlag::BestEffort),
            (3, 7, 1.8, SlaFlag::Guaranteed),
            (4, 8, 2.8, SlaFlag::Guaranteed),
        ];
        for (i, (s, d, bw, flag)) in rows.into_iter().enumerate() {
            ledger
                .put_sla(
                    SlaEntry {
                        index: i as u64,
                        src_ip: host_ip(s),
                        dst_ip: host_ip(d),
                        sla_bandwidth_bps: mbps(bw),
                        flag,
                    },
                    0,
                )
                .unwrap();
        }
        Fabric::new(topology, ledger)
    }

    fn req(id: &str, s: u8, d: u8, demand: f64) -> ProvisionRequest {
        ProvisionRequest {
            flow_id: id.into(),
            src_host: format!("h{s}"),
            dst_host: format!("h{d}"),
            src_ip: host_ip(s),
            dst_ip: host_ip(d),
            demand_bps: mbps(demand),
            meter_cap_bps: None,
            requested_at_ms: 0,
        }
    }

    #[test]
    fn classification_follows_flag() {
        let fabric = case_b();
        assert!(matches!(
            classify_request(&fabric.ledger, host_ip(3), host_ip(7)),
            Classification::Guaranteed(SlaEntry {
                sla_bandwidth_bps: 1_800_000,
                ..
            })
        ));
        assert_eq!(
            classify_request(&fabric.ledger, host_ip(1), host_ip(5)),
            Classification::BestEffort
        );
        assert_eq!(
            classify_request(&fabric.ledger, host_ip(9), host_ip(10)),
            Classification::BestEffort
        );
    }

    #[test]
    fn case_b_composed_path() {
        let fabric = case_b();
        let p = compose_path(&fabric.topology, &fabric.ledger, "h3", "h7").unwrap();
        assert_eq!(p.nodes, vec!["h3", "s2", "s1", "s3", "h7"]);
        assert_eq!(p.links.len(), 4);
    }

    #[test]
    fn guaranteed_admission_sequence() {
        let mut fabric = case_b();
        let mut prov = Provisioner::new();
        let g1 = prov.provision(&mut fabric, &req("g1", 3, 7, 1.8)).unwrap();
        assert_eq!(g1.kind, OutcomeKind::GuaranteedOnPrimaryPath);
        for k in &g1.flow.path.links {
            assert_eq!(fabric.ledger.available_bps(k), Some(3_200_000));
        }
        let g2 = prov.provision(&mut fabric, &req("g2", 4, 8, 2.8)).unwrap();
        assert_eq!(g2.kind, OutcomeKind::GuaranteedOnPrimaryPath);
        let core = LinkKey::intra(0, "s1", "s2");
        assert_eq!(fabric.ledger.available_bps(&core), Some(400_000));

        // a third guaranteed flow on the saturated trunk has no alternative in a tree
        fabric
            .ledger
            .put_sla(
                SlaEntry {
                    index: 10,
                    src_ip: host_ip(1),
                    dst_ip: host_ip(6),
                    sla_bandwidth_bps: 1_000_000,
                    flag: SlaFlag::Guaranteed,
                },
                0,
            )
            .unwrap();
        let g3 = prov.provision(&mut fabric, &req("g3", 1, 6, 1.0)).unwrap();
        assert_eq!(g3.kind, OutcomeKind::BestEffortFallback);
        assert_eq!(g3.flow.state, FlowState::DemotedAwaitingPromotion);
        assert_eq!(fabric.ledger.available_bps(&core), Some(400_000));

        // tearing down g1 frees 1.8 Mbps and g3 is promoted
        let report = prov.teardown(&mut fabric, "g1").unwrap();
        assert!(report.released.is_some());
        assert_eq!(report.promoted, vec!["g3".to_string()]);
        assert_eq!(prov.flow("g3").unwrap().state, FlowState::ActiveGuaranteed);
        assert_eq!(fabric.ledger.available_bps(&core), Some(1_200_000));
    }

    #[test]
    fn best_effort_leaves_ledger_alone() {
        let mut fabric = case_b();
        let mut prov = Provisioner::new();
        let before = fabric.ledger.len();
        let be = prov.provision(&mut fabric, &req("be1", 1, 5, 5.7)).unwrap();
        assert_eq!(be.kind, OutcomeKind::BestEffort);
        assert_eq!(be.flow.path.nodes, vec!["h1", "s2", "s1", "s3", "h5"]);
        let report = prov.teardown(&mut fabric, "be1").unwrap();
        assert!(report.released.is_none());
        assert_eq!(fabric.ledger.len(), before);
        assert_eq!(
            prov.teardown(&mut fabric, "be1").unwrap_err(),
            ProvisionError::UnknownFlow("be1".into())
        );
    }

    #[test]
    fn teardown_then_reprovision_is_identical() {
        let mut fabric = case_b();
        let mut prov = Provisioner::new();
        let first = prov.provision(&mut fabric, &req("g1", 3, 7, 1.8)).unwrap();
        let before = fabric.ledger.state().available().clone();
        prov.teardown(&mut fabric, "g1").unwrap();
        let again = prov.provision(&mut fabric, &req("g1", 3, 7, 1.8)).unwrap();
        assert_eq!(first, again);
        assert_eq!(fabric.ledger.state().available(), &before);
    }

    #[test]
    fn promotion_order() {
        let mut fabric = case_b();
        let mut prov = Provisioner::new();
        // fill the trunk: 1.8 + 2.8 = 4.6 of 5 Mbps
        prov.provision(&mut fabric, &req("g1", 3, 7, 1.8)).unwrap();
        prov.provision(&mut fabric, &req("g2", 4, 8, 2.8)).unwrap();
        for (idx, s, d) in [(20, 1, 7), (21, 2, 8)] {
            fabric
                .ledger
                .put_sla(
                    SlaEntry {
                        index: idx,
                        src_ip: host_ip(s),
                        dst_ip: host_ip(d),
                        sla_bandwidth_bps: 1_500_000,
                        flag: SlaFlag::Guaranteed,
                    },
                    0,
                )
                .unwrap();
        }
        assert_eq!(
            prov.provision(&mut fabric, &req("d1", 1, 7, 1.5)).unwrap().kind,
            OutcomeKind::BestEffortFallback
        );
        assert_eq!(
            prov.provision(&mut fabric, &req("d2", 2, 8, 1.5)).unwrap().kind,
            OutcomeKind::BestEffortFallback
        );
        assert!(prov.try_promote(&mut fabric).unwrap().is_empty());
        // releasing g1 leaves 2.2 Mbps: room for exactly one 1.5 Mbps flow
        let report = prov.teardown(&mut fabric, "g1").unwrap();
        assert_eq!(report.promoted, vec!["d1".to_string()]);
        assert_eq!(prov.demoted().collect::<Vec<_>>(), vec!["d2"]);
    }

    #[test]
    fn errors() {
        let mut fabric = case_b();
        let mut prov = Provisioner::new();
        prov.provision(&mut fabric, &req("x", 1, 5, 1.0)).unwrap();
        assert_eq!(
            prov.provision(&mut fabric, &req("x", 1, 5, 1.0)).unwrap_err(),
            ProvisionError::DuplicateFlow("x".into())
        );
        let mut bad_meter = req("g", 3, 7, 1.8);
        bad_meter.meter_cap_bps = Some(1_000_000);
        assert_eq!(
            prov.provision(&mut fabric, &bad_meter).unwrap_err(),
            ProvisionError::InvalidMeter("g".into())
        );
        let mut ghost = req("y", 1, 5, 1.0);
        ghost.dst_host = "h99".into();
        assert_eq!(
            prov.provision(&mut fabric, &ghost).unwrap_err(),
            ProvisionError::UnknownHost("h99".into())
        );
    }

    fn mesh_fabric(peers: &[(u32, Vec<u32>)]) -> Topology {
        let controllers = peers
            .iter()
            .map(|(id, p)| ControllerSpec {
                id: *id,
                domain: *id,
                peers: p.clone(),
            })
            .collect();
        let switches = peers
            .iter()
            .map(|(id, _)| SwitchSpec {
                id: format!("e{id}"),
                domain: *id,
                edge: true,
            })
            .collect();
        let mut links = Vec::new();
        for (id, p) in peers {
            for q in p.iter().filter(|q| *q > id) {
                links.push(LinkSpec {
                    a: format!("e{id}"),
                    b: format!("e{q}"),
                    capacity_bps: 10,
                    gq_bps: 5,
                });
            }
        }
        Topology::build(&TopologyDescription {
            controllers,
            switches,
            links,
            hosts: vec![],
        })
        .unwrap()
    }

    #[test]
    fn controller_paths() {
        let line = mesh_fabric(&[(0, vec![1]), (1, vec![0, 2]), (2, vec![1])]);
        assert_eq!(controller_path(&line, 0, 2).unwrap(), vec![0, 1, 2]);
        assert_eq!(controller_path(&line, 1, 1).unwrap(), vec![1]);
        let mesh = mesh_fabric(&[(0, vec![1, 2]), (1, vec![0, 2]), (2, vec![0, 1])]);
        assert_eq!(controller_path(&mesh, 1, 0).unwrap(), vec![1, 0]);
        // square 0-1-3, 0-2-3: tie resolved through the lower id
        let square = mesh_fabric(&[(0, vec![1, 2]), (1, vec![0, 3]), (2, vec![0, 3]), (3, vec![1, 2])]);
        assert_eq!(controller_path(&square, 0, 3).unwrap(), vec![0, 1, 3]);
        assert!(matches!(
            controller_path(&square, 0, 7),
            Err(ProvisionError::NoControllerPath { .. })
        ));
    }

    #[test]
    fn inter_domain_composition_uses_traversal_matrix() {
        let desc = TopologyDescription {
            controllers: vec![
                ControllerSpec {
                    id: 0,
                    domain: 0,
                    peers: vec![1],
                },
                ControllerSpec {
                    id: 1,
                    domain: 1,
                    peers: vec![0],
                },
            ],
            switches: vec![
                SwitchSpec {
                    id: "a1".into(),
                    domain: 0,
                    edge: false,
                },
                SwitchSpec {
                    id: "a2".into(),
                    domain: 0,
                    edge: true,
                },
                SwitchSpec {
                    id: "b1".into(),
                    domain: 1,
                    edge: true,
                },
                SwitchSpec {
                    id: "b2".into(),
                    domain: 1,
                    edge: false,
                },
            ],
            links: [("a1", "a2"), ("a2", "b1"), ("b1", "b2"), ("ha", "a1"), ("hb", "b2")]
                .iter()
                .map(|(a, b)| LinkSpec {
                    a: a.to_string(),
                    b: b.to_string(),
                    capacity_bps: 10,
                    gq_bps: 5,
                })
                .collect(),
            hosts: vec![
                HostSpec {
                    name: "ha".into(),
                    mac: Mac::new([1; 6]),
                    switch: "a1".into(),
                },
                HostSpec {
                    name: "hb".into(),
                    mac: Mac::new([2; 6]),
                    switch: "b2".into(),
                },
            ],
        };
        let topology = Topology::build(&desc).unwrap();
        let mut ledger = ledger_for(&topology);
        assert_eq!(
            compose_path(&topology, &ledger, "ha", "hb").unwrap_err(),
            ProvisionError::MissingTraversal { from: 0, to: 1 }
        );
        ledger.set_traversal_edge(0, 1, "a2", 0).unwrap();
        ledger.set_traversal_edge(1, 0, "b1", 0).unwrap();
        let p = compose_path(&topology, &ledger, "ha", "hb").unwrap();
        assert_eq!(p.nodes, vec!["ha", "a1", "a2", "b1", "b2", "hb"]);
        assert_eq!(p.links.iter().filter(|k| matches!(k, LinkKey::Inter { .. })).count(), 1);
        assert_eq!(ip("10.0.0.1"), host_ip(1));
    }
}
