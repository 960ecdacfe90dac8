//! Static network model: controllers and their domains, switches, hosts and
//! the links between them.
//!
//! Hosts hang off exactly one switch through a single access link, so they
//! never act as transit nodes. All searches visit neighbours in lexicographic
//! id order, which makes every returned path deterministic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::net::{validate_node_id, AddrError, LinkKey, Mac};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error(transparent)]
    Addr(#[from] AddrError),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("domain {0} has no controller")]
    UnknownDomain(u32),
    #[error("unknown controller {0}")]
    UnknownController(u32),
    #[error("controller {0} lists {1} as a peer but not vice versa")]
    AsymmetricPeers(u32, u32),
    #[error("inter-domain link {a}-{b} terminates on a switch that is not a domain edge")]
    EdgeLinkOnNonEdgeSwitch { a: String, b: String },
    #[error("invalid link {a}-{b}: {reason}")]
    InvalidLink { a: String, b: String, reason: String },
    #[error("host `{0}` has no access link to its switch")]
    MissingAccessLink(String),
    #[error("topology is not connected: `{0}` is unreachable")]
    DisconnectedGraph(String),
    #[error("no path from `{from}` to `{to}`")]
    NoPath { from: String, to: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControllerSpec {
    pub id: u32,
    pub domain: u32,
    pub peers: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchSpec {
    pub id: String,
    pub domain: u32,
    pub edge: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkSpec {
    pub a: String,
    pub b: String,
    pub capacity_bps: u64,
    pub gq_bps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HostSpec {
    pub name: String,
    pub mac: Mac,
    pub switch: String,
}

/// Everything needed to build a [`Topology`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TopologyDescription {
    pub controllers: Vec<ControllerSpec>,
    pub switches: Vec<SwitchSpec>,
    pub links: Vec<LinkSpec>,
    pub hosts: Vec<HostSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Controller {
    pub id: u32,
    pub domain_id: u32,
    pub peer_ids: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Switch {
    pub id: String,
    pub domain_id: u32,
    pub is_domain_edge: bool,
}

/// Static host data. The IP address is handed out at run time by DHCP and
/// lives in the control plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Host {
    pub name: String,
    pub mac: Mac,
    pub attached_switch: String,
    pub domain_id: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LinkKind {
    IntraDomain,
    InterDomain,
    HostAccess,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkState {
    pub a: String,
    pub b: String,
    pub capacity_bps: u64,
    pub guaranteed_queue_max_bps: u64,
    pub kind: LinkKind,
    pub key: LinkKey,
}

/// A node sequence together with the link keys joining consecutive nodes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub nodes: Vec<String>,
    pub links: Vec<LinkKey>,
}

impl Path {
    pub fn hops(&self) -> usize {
        self.links.len()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.nodes.join(">"))
    }
}

#[derive(Debug, Clone)]
pub struct Topology {
    controllers: BTreeMap<u32, Controller>,
    domain_controller: BTreeMap<u32, u32>,
    switches: BTreeMap<String, Switch>,
    hosts: BTreeMap<String, Host>,
    links: BTreeMap<LinkKey, LinkState>,
    adjacency: BTreeMap<String, BTreeMap<String, LinkKey>>,
    diameter: usize,
}

impl Topology {
    pub fn build(desc: &TopologyDescription) -> Result<Self, TopologyError> {
        let mut controllers = BTreeMap::new();
        let mut domain_controller = BTreeMap::new();
        for c in &desc.controllers {
            if controllers.contains_key(&c.id) {
                return Err(TopologyError::DuplicateId(format!("controller {}", c.id)));
            }
            if domain_controller.insert(c.domain, c.id).is_some() {
                return Err(TopologyError::DuplicateId(format!("domain {}", c.domain)));
            }
            let mut peers = c.peers.clone();
            peers.sort_unstable();
            peers.dedup();
            controllers.insert(
                c.id,
                Controller {
                    id: c.id,
                    domain_id: c.domain,
                    peer_ids: peers,
                },
            );
        }
        for c in controllers.values() {
            for p in &c.peer_ids {
                let peer = controllers.get(p).ok_or(TopologyError::UnknownController(*p))?;
                if !peer.peer_ids.contains(&c.id) {
                    return Err(TopologyError::AsymmetricPeers(c.id, *p));
                }
            }
        }

        let mut switches = BTreeMap::new();
        let mut seen_ids = BTreeSet::new();
        for s in &desc.switches {
            validate_node_id(&s.id)?;
            if !seen_ids.insert(s.id.clone()) {
                return Err(TopologyError::DuplicateId(s.id.clone()));
            }
            if !domain_controller.contains_key(&s.domain) {
                return Err(TopologyError::UnknownDomain(s.domain));
            }
            switches.insert(
                s.id.clone(),
                Switch {
                    id: s.id.clone(),
                    domain_id: s.domain,
                    is_domain_edge: s.edge,
                },
            );
        }

        let mut hosts = BTreeMap::new();
        let mut macs = BTreeSet::new();
        for h in &desc.hosts {
            validate_node_id(&h.name)?;
            if !seen_ids.insert(h.name.clone()) {
                return Err(TopologyError::DuplicateId(h.name.clone()));
            }
            if !macs.insert(h.mac) {
                return Err(TopologyError::DuplicateId(h.mac.to_string()));
            }
            let sw = switches
                .get(&h.switch)
                .ok_or_else(|| TopologyError::UnknownNode(h.switch.clone()))?;
            hosts.insert(
                h.name.clone(),
                Host {
                    name: h.name.clone(),
                    mac: h.mac,
                    attached_switch: h.switch.clone(),
                    domain_id: sw.domain_id,
                },
            );
        }

        let mut links = BTreeMap::new();
        let mut adjacency: BTreeMap<String, BTreeMap<String, LinkKey>> =
            seen_ids.iter().map(|id| (id.clone(), BTreeMap::new())).collect();
        for l in &desc.links {
            let invalid = |reason: &str| TopologyError::InvalidLink {
                a: l.a.clone(),
                b: l.b.clone(),
                reason: reason.to_string(),
            };
            if l.a == l.b {
                return Err(invalid("self loop"));
            }
            if l.gq_bps > l.capacity_bps {
                return Err(invalid("guaranteed queue exceeds capacity"));
            }
            let (kind, key) = match (hosts.get(&l.a), hosts.get(&l.b)) {
                (Some(_), Some(_)) => return Err(invalid("host-to-host link")),
                (Some(h), None) | (None, Some(h)) => {
                    let other = if h.name == l.a { &l.b } else { &l.a };
                    if !switches.contains_key(other) {
                        return Err(TopologyError::UnknownNode(other.clone()));
                    }
                    if *other != h.attached_switch {
                        return Err(invalid("host linked to a switch it is not attached to"));
                    }
                    (LinkKind::HostAccess, LinkKey::intra(h.domain_id, &l.a, &l.b))
                }
                (None, None) => {
                    let sa = switches
                        .get(&l.a)
                        .ok_or_else(|| TopologyError::UnknownNode(l.a.clone()))?;
                    let sb = switches
                        .get(&l.b)
                        .ok_or_else(|| TopologyError::UnknownNode(l.b.clone()))?;
                    if sa.domain_id == sb.domain_id {
                        (LinkKind::IntraDomain, LinkKey::intra(sa.domain_id, &l.a, &l.b))
                    } else {
                        if !sa.is_domain_edge || !sb.is_domain_edge {
                            return Err(TopologyError::EdgeLinkOnNonEdgeSwitch {
                                a: l.a.clone(),
                                b: l.b.clone(),
                            });
                        }
                        let ca = domain_controller[&sa.domain_id];
                        let cb = domain_controller[&sb.domain_id];
                        (LinkKind::InterDomain, LinkKey::inter(ca, cb))
                    }
                }
            };
            if links.contains_key(&key) {
                return Err(TopologyError::DuplicateId(key.to_string()));
            }
            adjacency
                .get_mut(&l.a)
                .expect("known node")
                .insert(l.b.clone(), key.clone());
            adjacency
                .get_mut(&l.b)
                .expect("known node")
                .insert(l.a.clone(), key.clone());
            links.insert(
                key.clone(),
                LinkState {
                    a: l.a.clone(),
                    b: l.b.clone(),
                    capacity_bps: l.capacity_bps,
                    guaranteed_queue_max_bps: l.gq_bps,
                    kind,
                    key,
                },
            );
        }
        for h in hosts.values() {
            if adjacency[&h.name].is_empty() {
                return Err(TopologyError::MissingAccessLink(h.name.clone()));
            }
        }

        let mut topo = Topology {
            controllers,
            domain_controller,
            switches,
            hosts,
            links,
            adjacency,
            diameter: 0,
        };
        if let Some(first) = topo.adjacency.keys().next().cloned() {
            let reach = topo.bfs_distances(&first, |_| true);
            if let Some(missing) = topo.adjacency.keys().find(|n| !reach.contains_key(*n)) {
                return Err(TopologyError::DisconnectedGraph(missing.clone()));
            }
        }
        topo.diameter = topo
            .adjacency
            .keys()
            .map(|n| topo.bfs_distances(n, |_| true).into_values().max().unwrap_or(0))
            .max()
            .unwrap_or(0);
        Ok(topo)
    }

    /// Largest hop distance between any two nodes.
    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn controllers(&self) -> impl Iterator<Item = &Controller> {
        self.controllers.values()
    }

    pub fn controller(&self, id: u32) -> Option<&Controller> {
        self.controllers.get(&id)
    }

    pub fn controller_for_domain(&self, domain: u32) -> Option<u32> {
        self.domain_controller.get(&domain).copied()
    }

    pub fn switches(&self) -> impl Iterator<Item = &Switch> {
        self.switches.values()
    }

    pub fn switch(&self, id: &str) -> Option<&Switch> {
        self.switches.get(id)
    }

    pub fn hosts(&self) -> impl Iterator<Item = &Host> {
        self.hosts.values()
    }

    pub fn host(&self, name: &str) -> Option<&Host> {
        self.hosts.get(name)
    }

    pub fn host_by_mac(&self, mac: &Mac) -> Option<&Host> {
        self.hosts.values().find(|h| h.mac == *mac)
    }

    pub fn links(&self) -> impl Iterator<Item = &LinkState> {
        self.links.values()
    }

    pub fn link(&self, key: &LinkKey) -> Option<&LinkState> {
        self.links.get(key)
    }

    /// Domain a switch or host belongs to.
    pub fn node_domain(&self, id: &str) -> Option<u32> {
        self.switches
            .get(id)
            .map(|s| s.domain_id)
            .or_else(|| self.hosts.get(id).map(|h| h.domain_id))
    }

    pub fn neighbors(&self, id: &str) -> impl Iterator<Item = (&str, &LinkKey)> {
        self.adjacency
            .get(id)
            .into_iter()
            .flat_map(|m| m.iter().map(|(n, k)| (n.as_str(), k)))
    }

    pub fn link_between(&self, a: &str, b: &str) -> Option<&LinkKey> {
        self.adjacency.get(a).and_then(|m| m.get(b))
    }

    /// Builds a [`Path`] from a node sequence.
    pub fn path_from_nodes(&self, nodes: Vec<String>) -> Result<Path, TopologyError> {
        let mut links = Vec::with_capacity(nodes.len().saturating_sub(1));
        for pair in nodes.windows(2) {
            let key = self
                .link_between(&pair[0], &pair[1])
                .ok_or_else(|| TopologyError::NoPath {
                    from: pair[0].clone(),
                    to: pair[1].clone(),
                })?;
            links.push(key.clone());
        }
        Ok(Path { nodes, links })
    }

    fn bfs_distances(&self, start: &str, allow: impl Fn(&str) -> bool) -> BTreeMap<String, usize> {
        let mut dist = BTreeMap::new();
        dist.insert(start.to_string(), 0usize);
        let mut queue = VecDeque::from([start.to_string()]);
        while let Some(node) = queue.pop_front() {
            let d = dist[&node];
            for (next, _) in self.neighbors(&node) {
                if !dist.contains_key(next) && allow(next) {
                    dist.insert(next.to_string(), d + 1);
                    queue.push_back(next.to_string());
                }
            }
        }
        dist
    }

    /// Minimum-hop path over nodes accepted by `allow`. Among equal-length
    /// paths the one with the lexicographically smallest node sequence wins.
    pub fn shortest_path_where(
        &self,
        from: &str,
        to: &str,
        allow: impl Fn(&str) -> bool,
    ) -> Result<Path, TopologyError> {
        let no_path = || TopologyError::NoPath {
            from: from.to_string(),
            to: to.to_string(),
        };
        if !self.adjacency.contains_key(from) {
            return Err(TopologyError::UnknownNode(from.to_string()));
        }
        if !self.adjacency.contains_key(to) {
            return Err(TopologyError::UnknownNode(to.to_string()));
        }
        if !allow(from) || !allow(to) {
            return Err(no_path());
        }
        // Distances to the target, then a greedy walk picking the smallest
        // id that still lies on a shortest path.
        let to_target = self.bfs_distances(to, |n| allow(n));
        let mut remaining = *to_target.get(from).ok_or_else(no_path)?;
        let mut nodes = vec![from.to_string()];
        let mut current = from.to_string();
        while remaining > 0 {
            let next = self
                .neighbors(&current)
                .map(|(n, _)| n)
                .find(|n| to_target.get(*n) == Some(&(remaining - 1)))
                .expect("bfs distances are consistent")
                .to_string();
            nodes.push(next.clone());
            current = next;
            remaining -= 1;
        }
        self.path_from_nodes(nodes)
    }

    /// Shortest path confined to one domain's switches and hosts.
    pub fn local_shortest_path(&self, domain: u32, from: &str, to: &str) -> Result<Path, TopologyError> {
        if !self.domain_controller.contains_key(&domain) {
            return Err(TopologyError::UnknownDomain(domain));
        }
        for node in [from, to] {
            match self.node_domain(node) {
                None => return Err(TopologyError::UnknownNode(node.to_string())),
                Some(d) if d != domain => {
                    return Err(TopologyError::NoPath {
                        from: from.to_string(),
                        to: to.to_string(),
                    })
                }
                Some(_) => {}
            }
        }
        self.shortest_path_where(from, to, |n| self.node_domain(n) == Some(domain))
    }

    /// All loop-free paths from `from` to `to` with at most `max_hops` links,
    /// ordered by hop count and then node sequence.
    pub fn simple_paths(&self, from: &str, to: &str, max_hops: usize) -> Vec<Path> {
        let mut found = Vec::new();
        let mut stack = vec![from.to_string()];
        let mut on_path = BTreeSet::from([from.to_string()]);
        self.extend_paths(to, max_hops, &mut stack, &mut on_path, &mut found);
        found.sort_by(|a: &Vec<String>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        found
            .into_iter()
            .map(|nodes| self.path_from_nodes(nodes).expect("walked real links"))
            .collect()
    }

    fn extend_paths(
        &self,
        to: &str,
        max_hops: usize,
        stack: &mut Vec<String>,
        on_path: &mut BTreeSet<String>,
        found: &mut Vec<Vec<String>>,
    ) {
        let last = stack.last().expect("non-empty").clone();
        if last == to {
            found.push(stack.clone());
            return;
        }
        if stack.len() > max_hops {
            return;
        }
        // Hosts are leaves: a walk may end at one but never pass through it.
        if stack.len() > 1 && self.hosts.contains_key(&last) {
            return;
        }
        for (next, _) in self.neighbors(&last) {
            if on_path.contains(next) {
                continue;
            }
            stack.push(next.to_string());
            on_path.insert(next.to_string());
            self.extend_paths(to, max_hops, stack, on_path, found);
            on_path.remove(next);
            stack.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mac(i: u8) -> Mac {
        Mac::new([0x0a, 0, 0, 0, 0, i])
    }

    fn link(a: &str, b: &str) -> LinkSpec {
        LinkSpec {
            a: a.into(),
            b: b.into(),
            capacity_bps: 10_000_000,
            gq_bps: 5_000_000,
        }
    }

    fn sw(id: &str, domain: u32, edge: bool) -> SwitchSpec {
        SwitchSpec {
            id: id.into(),
            domain,
            edge,
        }
    }

    fn single_controller() -> Vec<ControllerSpec> {
        vec![ControllerSpec {
            id: 0,
            domain: 0,
            peers: vec![],
        }]
    }

    /// depth 2, fan-out 4 tree: root s1, leaves s2..s5, hosts h1..h16.
    pub(crate) fn tree_depth2_fanout4() -> TopologyDescription {
        let mut desc = TopologyDescription {
            controllers: single_controller(),
            ..Default::default()
        };
        desc.switches.push(sw("s1", 0, false));
        for leaf in 0..4u8 {
            let leaf_id = format!("s{}", leaf + 2);
            desc.switches.push(sw(&leaf_id, 0, false));
            desc.links.push(link("s1", &leaf_id));
            for j in 0..4u8 {
                let n = leaf * 4 + j + 1;
                let name = format!("h{n}");
                desc.hosts.push(HostSpec {
                    name: name.clone(),
                    mac: mac(n),
                    switch: leaf_id.clone(),
                });
                desc.links.push(link(&name, &leaf_id));
            }
        }
        desc
    }

    #[test]
    fn tree_topology_counts() {
        let topo = Topology::build(&tree_depth2_fanout4()).unwrap();
        let leaves = topo
            .switches()
            .filter(|s| topo.neighbors(&s.id).filter(|(n, _)| n.starts_with('h')).count() > 0);
        assert_eq!(leaves.count(), 4);
        assert_eq!(topo.switches().count(), 5);
        assert_eq!(topo.hosts().count(), 16);
        assert_eq!(topo.diameter(), 4);
    }

    #[test]
    fn tree_leaf_to_leaf_path() {
        let topo = Topology::build(&tree_depth2_fanout4()).unwrap();
        let p = topo.local_shortest_path(0, "s2", "s3").unwrap();
        assert_eq!(p.nodes, vec!["s2", "s1", "s3"]);
        assert_eq!(p.hops(), 2);
        let hosts = topo.local_shortest_path(0, "h3", "h7").unwrap();
        assert_eq!(hosts.nodes, vec!["h3", "s2", "s1", "s3", "h7"]);
        assert_eq!(
            hosts.links,
            vec![
                LinkKey::intra(0, "h3", "s2"),
                LinkKey::intra(0, "s1", "s2"),
                LinkKey::intra(0, "s1", "s3"),
                LinkKey::intra(0, "h7", "s3"),
            ]
        );
    }

    #[test]
    fn path_to_self() {
        let topo = Topology::build(&tree_depth2_fanout4()).unwrap();
        let p = topo.local_shortest_path(0, "s4", "s4").unwrap();
        assert_eq!(p.nodes, vec!["s4"]);
        assert!(p.links.is_empty());
    }

    #[test]
    fn single_switch_two_hosts() {
        let desc = TopologyDescription {
            controllers: single_controller(),
            switches: vec![sw("s1", 0, false)],
            links: vec![link("h1", "s1"), link("s1", "h2")],
            hosts: vec![
                HostSpec {
                    name: "h1".into(),
                    mac: mac(1),
                    switch: "s1".into(),
                },
                HostSpec {
                    name: "h2".into(),
                    mac: mac(2),
                    switch: "s1".into(),
                },
            ],
        };
        let topo = Topology::build(&desc).unwrap();
        assert_eq!(topo.links().count(), 2);
        assert!(topo.links().all(|l| l.kind == LinkKind::HostAccess));
        assert_eq!(
            topo.local_shortest_path(0, "h1", "h2").unwrap().nodes,
            vec!["h1", "s1", "h2"]
        );
    }

    /// a - {b, c} - d, both 2 hops.
    fn diamond() -> Topology {
        let desc = TopologyDescription {
            controllers: single_controller(),
            switches: ["a", "b", "c", "d"].iter().map(|s| sw(s, 0, false)).collect(),
            links: vec![link("a", "c"), link("a", "b"), link("c", "d"), link("b", "d")],
            hosts: vec![],
        };
        Topology::build(&desc).unwrap()
    }

    #[test]
    fn diamond_tie_break_matches_enumeration() {
        let topo = diamond();
        let chosen = topo.local_shortest_path(0, "a", "d").unwrap();
        // brute force: every simple path, keep the minimum-hop ones
        let all = topo.simple_paths("a", "d", 10);
        let min = all.iter().map(Path::hops).min().unwrap();
        let minimal: Vec<&Path> = all.iter().filter(|p| p.hops() == min).collect();
        assert_eq!(minimal.len(), 2);
        assert!(minimal.contains(&&chosen));
        assert_eq!(chosen.nodes, vec!["a", "b", "d"]);
    }

    #[test]
    fn simple_paths_ordering() {
        let topo = diamond();
        let paths: Vec<Vec<String>> = topo.simple_paths("a", "b", 3).into_iter().map(|p| p.nodes).collect();
        assert_eq!(paths, vec![vec!["a", "b"], vec!["a", "c", "d", "b"]]);
        assert!(topo.simple_paths("a", "b", 0).is_empty());
    }

    #[test]
    fn build_errors() {
        let mut desc = tree_depth2_fanout4();
        desc.switches.push(sw("s1", 0, false));
        assert_eq!(
            Topology::build(&desc).unwrap_err(),
            TopologyError::DuplicateId("s1".into())
        );

        let mut desc = tree_depth2_fanout4();
        desc.switches.push(sw("s99", 0, false));
        assert_eq!(
            Topology::build(&desc).unwrap_err(),
            TopologyError::DisconnectedGraph("s99".into())
        );

        // inter-domain link on non-edge switches
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
            switches: vec![sw("s1", 0, true), sw("s2", 1, false)],
            links: vec![link("s1", "s2")],
            hosts: vec![],
        };
        assert!(matches!(
            Topology::build(&desc),
            Err(TopologyError::EdgeLinkOnNonEdgeSwitch { .. })
        ));

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
                    peers: vec![],
                },
            ],
            ..Default::default()
        };
        assert_eq!(
            Topology::build(&desc).unwrap_err(),
            TopologyError::AsymmetricPeers(0, 1)
        );

        let mut desc = tree_depth2_fanout4();
        desc.links.retain(|l| l.a != "h16");
        assert_eq!(
            Topology::build(&desc).unwrap_err(),
            TopologyError::MissingAccessLink("h16".into())
        );

        let mut desc = tree_depth2_fanout4();
        desc.links[0].gq_bps = desc.links[0].capacity_bps + 1;
        assert!(matches!(Topology::build(&desc), Err(TopologyError::InvalidLink { .. })));
    }

    #[test]
    fn local_path_stays_in_domain() {
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
            switches: vec![sw("a", 0, true), sw("b", 0, false), sw("x", 1, true)],
            links: vec![link("a", "b"), link("a", "x")],
            hosts: vec![],
        };
        let topo = Topology::build(&desc).unwrap();
        assert!(matches!(
            topo.local_shortest_path(0, "b", "x"),
            Err(TopologyError::NoPath { .. })
        ));
        assert_eq!(topo.link_between("a", "x"), Some(&LinkKey::inter(0, 1)));
        assert_eq!(topo.link(&LinkKey::inter(1, 0)).unwrap().kind, LinkKind::InterDomain);
    }
}
