use std::collections::BTreeSet;

use super::{Event, Scenario, ScenarioError, ScheduledEvent};
use crate::control_plane::{ControlCommand, ControlPlane, TamperRule};
use crate::event_log::EventKind;
use crate::fabric::Fabric;
use crate::flow_sim::{self, loss_rate, MetricRow, SimFlow};
use crate::ledger::{BandwidthMatrices, Ledger};
use crate::provisioning::{FlowState, ProvisionRequest, Provisioner};
use crate::topology::Topology;

const TICK_MS: u64 = 1000;

/// A scenario being simulated.
///
/// Tick `k` (1-based) covers `[k-1, k)` seconds. Events stamped `t = k-1`
/// run at the start of tick `k`, then link shares are computed. At the end
/// of the tick the control plane drains due deliveries, deferred digests are
/// flushed, and demoted flows are re-checked for promotion.
#[derive(Debug, Clone)]
pub struct World {
    pub fabric: Fabric,
    pub control: ControlPlane,
    pub provisioner: Provisioner,
    rows: Vec<MetricRow>,
    events: Vec<ScheduledEvent>,
    next_event: usize,
    ticks_done: u64,
    total_ticks: u64,
    blocked: BTreeSet<String>,
}

impl World {
    /// Builds the topology and writes the scenario's IP-MAC, SLA and
    /// traversal tables to the ledger at time 0.
    pub fn new(scenario: &Scenario) -> Result<Self, ScenarioError> {
        let topology = Topology::build(&scenario.topology)?;
        let mut maxima = BandwidthMatrices::default();
        for l in topology.links() {
            maxima.set(&l.key, l.guaranteed_queue_max_bps);
        }
        let mut ledger = Ledger::new(maxima);
        for (ip, mac) in &scenario.ip_mac {
            ledger.put_ip_mac(*ip, *mac, 0)?;
        }
        for entry in &scenario.sla {
            ledger.put_sla(entry.clone(), 0)?;
        }
        for t in &scenario.traversal {
            ledger.set_traversal_edge(t.from, t.to, &t.edge_switch, 0)?;
        }
        let fabric = Fabric::new(topology, ledger);
        let control = ControlPlane::new(&fabric, scenario.verify_mode, scenario.verify_delay_ticks * TICK_MS);
        Ok(World {
            fabric,
            control,
            provisioner: Provisioner::new(),
            rows: Vec::new(),
            events: scenario.events.clone(),
            next_event: 0,
            ticks_done: 0,
            total_ticks: scenario.ticks,
            blocked: BTreeSet::new(),
        })
    }

    pub fn ticks_done(&self) -> u64 {
        self.ticks_done
    }

    pub fn total_ticks(&self) -> u64 {
        self.total_ticks
    }

    pub fn is_finished(&self) -> bool {
        self.ticks_done >= self.total_ticks
    }

    pub fn rows(&self) -> &[MetricRow] {
        &self.rows
    }

    pub fn step_tick(&mut self) -> Result<(), ScenarioError> {
        self.fabric.now_ms = self.ticks_done * TICK_MS;
        while let Some(e) = self.events.get(self.next_event) {
            if e.t > self.ticks_done {
                break;
            }
            let event = e.event.clone();
            self.next_event += 1;
            self.apply(&event)?;
            self.control.process(&mut self.fabric)?;
        }

        let flows: Vec<_> = self.provisioner.flows().collect();
        let sims: Vec<SimFlow> = flows.iter().map(|f| SimFlow::from_flow(f)).collect();
        let alloc = flow_sim::step(&self.fabric.topology, &sims);
        let tick = self.ticks_done + 1;
        for ((flow, sim), a) in flows.iter().zip(&sims).zip(alloc) {
            self.rows.push(MetricRow {
                tick,
                flow_id: flow.id.clone(),
                class: if flow.state == FlowState::ActiveGuaranteed {
                    "Guaranteed"
                } else {
                    "BestEffort"
                },
                demand_bps: sim.demand_bps,
                allocated_bps: a,
                loss_rate: loss_rate(sim.demand_bps, a),
            });
        }

        self.ticks_done = tick;
        self.fabric.now_ms = tick * TICK_MS;
        self.control.process(&mut self.fabric)?;
        self.control.flush_all_deferred(&mut self.fabric)?;
        self.provisioner.try_promote(&mut self.fabric)?;
        Ok(())
    }

    pub fn run_to_end(&mut self) -> Result<(), ScenarioError> {
        while !self.is_finished() {
            self.step_tick()?;
        }
        Ok(())
    }

    fn apply(&mut self, event: &Event) -> Result<(), ScenarioError> {
        let fabric = &mut self.fabric;
        match event {
            Event::Dhcp { host } => {
                let h = fabric.topology.host(host).expect("validated at parse time");
                let ctrl = fabric
                    .topology
                    .controller_for_domain(h.domain_id)
                    .expect("every domain has a controller");
                let mac = h.mac;
                self.control.handle_dhcp(fabric, ctrl, mac)?;
            }
            Event::ArpExchange { src, dst } => {
                self.control.arp_exchange(fabric, src, dst)?;
            }
            Event::SendCommand {
                from,
                to,
                command,
                payload,
                record,
            } => {
                let cmd = ControlCommand {
                    kind: *command,
                    src_controller: *from,
                    dst: *to,
                    payload: payload.clone(),
                    timestamp_ms: fabric.now_ms,
                };
                if *record {
                    self.control.send_command(fabric, cmd)?;
                } else {
                    self.control.send_unrecorded(fabric, cmd)?;
                }
            }
            Event::Tamper {
                target_digest,
                command,
                to,
                flip_byte,
            } => {
                self.control.arm_tamper(TamperRule {
                    target_digest: *target_digest,
                    command: *command,
                    to: *to,
                    flip_byte: *flip_byte,
                });
            }
            Event::StartFlow {
                id,
                src,
                dst,
                demand_bps,
                meter_bps,
            } => {
                if self.provisioner.flow(id).is_some() {
                    self.provisioner.set_demand(id, *demand_bps)?;
                } else {
                    self.start(id, src, dst, *demand_bps, *meter_bps)?;
                }
            }
            Event::Provision {
                id,
                src,
                dst,
                meter_bps,
            } => {
                self.start(id, src, dst, 0, *meter_bps)?;
            }
            Event::StopFlow { id } => {
                if !self.blocked.remove(id) {
                    self.provisioner.teardown(fabric, id)?;
                }
            }
        }
        Ok(())
    }

    /// Provisions a flow, unless its endpoints lack a qualified ARP pair.
    fn start(
        &mut self,
        id: &str,
        src: &str,
        dst: &str,
        demand_bps: u64,
        meter_bps: Option<u64>,
    ) -> Result<(), ScenarioError> {
        let ips = self.control.host_ip(src).zip(self.control.host_ip(dst));
        let Some((src_ip, dst_ip)) = ips.filter(|_| self.control.can_communicate(src, dst)) else {
            self.fabric.log.push(
                self.fabric.now_ms,
                EventKind::FlowBlocked,
                format!("{id} src={src} dst={dst} no qualified ARP pair"),
            );
            self.blocked.insert(id.to_string());
            return Ok(());
        };
        self.blocked.remove(id);
        let req = ProvisionRequest {
            flow_id: id.to_string(),
            src_host: src.to_string(),
            dst_host: dst.to_string(),
            src_ip,
            dst_ip,
            demand_bps,
            meter_cap_bps: meter_bps,
            requested_at_ms: self.fabric.now_ms,
        };
        self.provisioner.provision(&mut self.fabric, &req)?;
        Ok(())
    }
}
