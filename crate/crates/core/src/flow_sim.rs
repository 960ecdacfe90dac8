//! Fluid-model bandwidth sharing.
//!
//! Each link has two queues. Guaranteed flows take `min(demand, meter)`; if
//! their sum exceeds the guaranteed-queue cap they are scaled down in
//! proportion. Best-effort flows share whatever capacity the guaranteed queue
//! leaves unused, max-min fair.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::net::LinkKey;
use crate::provisioning::{Flow, FlowState};
use crate::topology::{LinkState, Topology};

const EPS: f64 = 1e-9;

/// Max-min fair split of `capacity` among `demands`.
///
/// Flows are visited in increasing demand order; each takes the smaller of
/// its demand and an equal share of what is left.
pub fn water_fill(capacity: f64, demands: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..demands.len()).collect();
    order.sort_by(|&a, &b| demands[a].total_cmp(&demands[b]).then(a.cmp(&b)));
    let mut out = vec![0.0; demands.len()];
    let mut left = capacity.max(0.0);
    for (served, &i) in order.iter().enumerate() {
        let share = left / (demands.len() - served) as f64;
        let take = demands[i].max(0.0).min(share);
        out[i] = take;
        left -= take;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Queue {
    Guaranteed { meter_cap_bps: f64 },
    BestEffort,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkDemand {
    pub queue: Queue,
    pub demand_bps: f64,
}

/// Guaranteed rates on one link before any cap: `min(demand, meter)`.
fn offered(d: &LinkDemand) -> Option<f64> {
    match d.queue {
        Queue::Guaranteed { meter_cap_bps } => Some(d.demand_bps.max(0.0).min(meter_cap_bps.max(0.0))),
        Queue::BestEffort => None,
    }
}

/// Allocation of a single link, in the order of `demands`.
pub fn allocate_link(link: &LinkState, demands: &[LinkDemand]) -> Vec<f64> {
    let gq = link.guaranteed_queue_max_bps as f64;
    let offered_total: f64 = demands.iter().filter_map(offered).sum();
    let scale = if offered_total > gq { gq / offered_total } else { 1.0 };

    let mut out = vec![0.0; demands.len()];
    let mut used = 0.0;
    let mut be_idx = Vec::new();
    for (i, d) in demands.iter().enumerate() {
        match offered(d) {
            Some(g) => {
                out[i] = g * scale;
                used += out[i];
            }
            None => be_idx.push(i),
        }
    }
    let be_demands: Vec<f64> = be_idx.iter().map(|&i| demands[i].demand_bps).collect();
    let be = water_fill(link.capacity_bps as f64 - used, &be_demands);
    for (i, r) in be_idx.into_iter().zip(be) {
        out[i] = r;
    }
    out
}

/// One flow as seen by the network-wide solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SimFlow {
    pub id: String,
    pub queue: Queue,
    pub demand_bps: f64,
    pub links: Vec<LinkKey>,
}

impl SimFlow {
    /// Only `ActiveGuaranteed` flows use the guaranteed queue; demoted flows
    /// ride best-effort until promoted.
    pub fn from_flow(flow: &Flow) -> Self {
        let queue = match (flow.state, flow.meter_cap_bps) {
            (FlowState::ActiveGuaranteed, Some(m)) => Queue::Guaranteed {
                meter_cap_bps: m as f64,
            },
            (FlowState::ActiveGuaranteed, None) => Queue::Guaranteed {
                meter_cap_bps: flow.reserved_bps as f64,
            },
            _ => Queue::BestEffort,
        };
        SimFlow {
            id: flow.id.clone(),
            queue,
            demand_bps: flow.demand_bps as f64,
            links: flow.path.links.clone(),
        }
    }
}

/// Network-wide allocation, in the order of `flows`.
///
/// Guaranteed flow `f` receives `offered_f * min_l min(1, gq_l / offered_l)`
/// over its links `l`, which keeps every guaranteed queue within its cap and
/// reduces to proportional scaling on a single link. Best-effort flows are
/// then solved jointly by progressive filling on the capacity left on each
/// link, which gives the max-min fair allocation across the whole network.
pub fn step(topology: &Topology, flows: &[SimFlow]) -> Vec<f64> {
    let link = |k: &LinkKey| topology.link(k).expect("flow paths use known links");

    let mut offered_on: BTreeMap<&LinkKey, f64> = BTreeMap::new();
    for f in flows {
        if let Some(g) = offered(&LinkDemand {
            queue: f.queue,
            demand_bps: f.demand_bps,
        }) {
            for k in &f.links {
                *offered_on.entry(k).or_insert(0.0) += g;
            }
        }
    }
    let factor: BTreeMap<&LinkKey, f64> = offered_on
        .iter()
        .map(|(k, &o)| {
            let gq = link(k).guaranteed_queue_max_bps as f64;
            (*k, if o > gq { gq / o } else { 1.0 })
        })
        .collect();

    let mut alloc = vec![0.0; flows.len()];
    let mut residual: BTreeMap<&LinkKey, f64> = BTreeMap::new();
    for f in flows {
        for k in &f.links {
            residual.entry(k).or_insert(link(k).capacity_bps as f64);
        }
    }
    for (i, f) in flows.iter().enumerate() {
        if let Some(g) = offered(&LinkDemand {
            queue: f.queue,
            demand_bps: f.demand_bps,
        }) {
            let s = f.links.iter().map(|k| factor[k]).fold(1.0, f64::min);
            alloc[i] = g * s;
            for k in &f.links {
                *residual.get_mut(k).expect("seeded") -= alloc[i];
            }
        }
    }

    let be: Vec<usize> = (0..flows.len())
        .filter(|&i| flows[i].queue == Queue::BestEffort)
        .collect();
    let mut active: Vec<usize> = be.iter().copied().filter(|&i| flows[i].demand_bps > 0.0).collect();
    while !active.is_empty() {
        let mut users: BTreeMap<&LinkKey, usize> = BTreeMap::new();
        for &i in &active {
            for k in &flows[i].links {
                *users.entry(k).or_insert(0) += 1;
            }
        }
        let link_inc = users
            .iter()
            .map(|(k, &n)| residual[k].max(0.0) / n as f64)
            .fold(f64::INFINITY, f64::min);
        let demand_inc = active
            .iter()
            .map(|&i| flows[i].demand_bps - alloc[i])
            .fold(f64::INFINITY, f64::min);
        let inc = link_inc.min(demand_inc).max(0.0);

        for &i in &active {
            alloc[i] += inc;
            for k in &flows[i].links {
                *residual.get_mut(k).expect("seeded") -= inc;
            }
        }
        let saturated = |k: &LinkKey| residual[k] <= EPS * link(k).capacity_bps.max(1) as f64;
        active.retain(|&i| {
            let f = &flows[i];
            f.demand_bps - alloc[i] > EPS * f.demand_bps.max(1.0) && !f.links.iter().any(saturated)
        });
    }
    // clamp rounding residue
    for (i, f) in flows.iter().enumerate() {
        if f.queue == Queue::BestEffort {
            alloc[i] = alloc[i].min(f.demand_bps).max(0.0);
        }
    }
    alloc
}

pub fn loss_rate(demand_bps: f64, allocated_bps: f64) -> f64 {
    if demand_bps <= 0.0 {
        0.0
    } else {
        ((demand_bps - allocated_bps) / demand_bps).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub tick: u64,
    pub flow_id: String,
    /// `Guaranteed` while the flow holds a reservation, else `BestEffort`.
    pub class: &'static str,
    pub demand_bps: f64,
    pub allocated_bps: f64,
    pub loss_rate: f64,
}

impl MetricRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{:.0},{:.0},{:.6}",
            self.tick, self.flow_id, self.class, self.demand_bps, self.allocated_bps, self.loss_rate
        )
    }
}

pub const METRICS_HEADER: &str = "tick,flow_id,class,demand_bps,allocated_bps,loss_rate";

pub fn metrics_csv(rows: &[MetricRow]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.csv_line());
    }
    out
}

/// Per-class demand and allocation totals of one tick.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClassTotals {
    pub guaranteed_demand: f64,
    pub guaranteed_alloc: f64,
    pub best_effort_demand: f64,
    pub best_effort_alloc: f64,
}

impl ClassTotals {
    pub fn guaranteed_loss(&self) -> f64 {
        loss_rate(self.guaranteed_demand, self.guaranteed_alloc)
    }

    pub fn best_effort_loss(&self) -> f64 {
        loss_rate(self.best_effort_demand, self.best_effort_alloc)
    }
}

pub fn totals_by_tick(rows: &[MetricRow]) -> BTreeMap<u64, ClassTotals> {
    let mut out: BTreeMap<u64, ClassTotals> = BTreeMap::new();
    for r in rows {
        let t = out.entry(r.tick).or_default();
        if r.class == "Guaranteed" {
            t.guaranteed_demand += r.demand_bps;
            t.guaranteed_alloc += r.allocated_bps;
        } else {
            t.best_effort_demand += r.demand_bps;
            t.best_effort_alloc += r.allocated_bps;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::Mac;
    use crate::topology::{ControllerSpec, HostSpec, LinkKind, LinkSpec, SwitchSpec, TopologyDescription};
    use proptest::prelude::*;

    fn link(capacity: u64, gq: u64) -> LinkState {
        LinkState {
            a: "x".into(),
            b: "y".into(),
            capacity_bps: capacity,
            guaranteed_queue_max_bps: gq,
            kind: LinkKind::IntraDomain,
            key: LinkKey::intra(0, "x", "y"),
        }
    }

    fn be(d: f64) -> LinkDemand {
        LinkDemand {
            queue: Queue::BestEffort,
            demand_bps: d,
        }
    }

    fn g(d: f64, meter: f64) -> LinkDemand {
        LinkDemand {
            queue: Queue::Guaranteed { meter_cap_bps: meter },
            demand_bps: d,
        }
    }

    fn close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-6, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn water_fill_examples() {
        close(&water_fill(10.0, &[2.0, 8.0, 8.0]), &[2.0, 4.0, 4.0]);
        close(&water_fill(10.0, &[1.0, 2.0]), &[1.0, 2.0]);
        close(&water_fill(0.0, &[1.0, 2.0]), &[0.0, 0.0]);
        assert!(water_fill(5.0, &[]).is_empty());
    }

    #[test]
    fn case_b_link_before_and_after() {
        let l = link(9_400_000, 5_000_000);
        close(&allocate_link(&l, &[be(5.7e6), be(3.7e6)]), &[5.7e6, 3.7e6]);
        let after = allocate_link(&l, &[be(5.7e6), be(3.7e6), g(1.8e6, 2e6), g(2.8e6, 3e6)]);
        close(&after, &[2.4e6, 2.4e6, 1.8e6, 2.8e6]);
    }

    #[test]
    fn meter_and_queue_caps() {
        let l = link(10_000_000, 5_000_000);
        // meter clips 4 -> 3, then 3 + 4 = 7 is scaled to 5
        let out = allocate_link(&l, &[g(4e6, 3e6), g(4e6, 8e6), be(10e6)]);
        close(&out, &[5e6 * 3.0 / 7.0, 5e6 * 4.0 / 7.0, 5e6]);
        // unused guaranteed share goes to best effort
        close(&allocate_link(&l, &[g(1e6, 2e6), be(20e6)]), &[1e6, 9e6]);
    }

    /// Two switches in a line with three hosts; h1 and h2 share the trunk.
    fn line() -> Topology {
        let mut desc = TopologyDescription {
            controllers: vec![ControllerSpec {
                id: 0,
                domain: 0,
                peers: vec![],
            }],
            switches: vec![
                SwitchSpec {
                    id: "s1".into(),
                    domain: 0,
                    edge: false,
                },
                SwitchSpec {
                    id: "s2".into(),
                    domain: 0,
                    edge: false,
                },
            ],
            ..Default::default()
        };
        let mk = |a: &str, b: &str, c: u64| LinkSpec {
            a: a.into(),
            b: b.into(),
            capacity_bps: c,
            gq_bps: c / 2,
        };
        desc.links = vec![
            mk("s1", "s2", 10),
            mk("h1", "s1", 100),
            mk("h2", "s1", 4),
            mk("h3", "s2", 100),
        ];
        for (i, (h, s)) in [("h1", "s1"), ("h2", "s1"), ("h3", "s2")].into_iter().enumerate() {
            desc.hosts.push(HostSpec {
                name: h.into(),
                mac: Mac::new([0, 0, 0, 0, 0, i as u8]),
                switch: s.into(),
            });
        }
        Topology::build(&desc).unwrap()
    }

    #[test]
    fn network_max_min_redistributes_bottleneck_slack() {
        let t = line();
        let trunk = LinkKey::intra(0, "s1", "s2");
        let flows = vec![
            SimFlow {
                id: "a".into(),
                queue: Queue::BestEffort,
                demand_bps: 100.0,
                links: vec![LinkKey::intra(0, "h1", "s1"), trunk.clone()],
            },
            // limited to 4 by its access link, so `a` gets the remaining 6
            SimFlow {
                id: "b".into(),
                queue: Queue::BestEffort,
                demand_bps: 100.0,
                links: vec![LinkKey::intra(0, "h2", "s1"), trunk.clone()],
            },
        ];
        close(&step(&t, &flows), &[6.0, 4.0]);
    }

    #[test]
    fn step_matches_allocate_link_on_one_link() {
        let t = line();
        let trunk = LinkKey::intra(0, "s1", "s2");
        let demands = [g(3.0, 4.0), g(4.0, 4.0), be(9.0), be(1.0)];
        let flows: Vec<SimFlow> = demands
            .iter()
            .enumerate()
            .map(|(i, d)| SimFlow {
                id: i.to_string(),
                queue: d.queue,
                demand_bps: d.demand_bps,
                links: vec![trunk.clone()],
            })
            .collect();
        close(&step(&t, &flows), &allocate_link(t.link(&trunk).unwrap(), &demands));
    }

    #[test]
    fn csv_format() {
        let row = MetricRow {
            tick: 3,
            flow_id: "be1".into(),
            class: "BestEffort",
            demand_bps: 5.7e6,
            allocated_bps: 2.4e6,
            loss_rate: loss_rate(5.7e6, 2.4e6),
        };
        assert_eq!(row.csv_line(), "3,be1,BestEffort,5700000,2400000,0.578947");
        assert!(metrics_csv(&[row]).starts_with(METRICS_HEADER));
        assert_eq!(loss_rate(0.0, 0.0), 0.0);
    }

    fn demand_strategy() -> impl Strategy<Value = LinkDemand> {
        (any::<bool>(), 0.0..20e6f64, 0.0..20e6f64).prop_map(|(is_g, d, m)| if is_g { g(d, m) } else { be(d) })
    }

    proptest! {
        #[test]
        fn link_invariants(cap in 1u64..20_000_000, gq_frac in 0.0..1.0f64, demands in prop::collection::vec(demand_strategy(), 0..12)) {
            let gq = (cap as f64 * gq_frac) as u64;
            let l = link(cap, gq);
            let out = allocate_link(&l, &demands);
            let total: f64 = out.iter().sum();
            prop_assert!(total <= cap as f64 * (1.0 + 1e-9) + 1e-6);
            let g_total: f64 = demands.iter().zip(&out).filter(|(d, _)| d.queue != Queue::BestEffort).map(|(_, r)| r).sum();
            prop_assert!(g_total <= gq as f64 * (1.0 + 1e-9) + 1e-6);
            for (d, r) in demands.iter().zip(&out) {
                prop_assert!(*r >= 0.0 && *r <= d.demand_bps + 1e-6);
                if let Queue::Guaranteed { meter_cap_bps } = d.queue {
                    prop_assert!(*r <= meter_cap_bps + 1e-6);
                }
            }
        }
    }
}
