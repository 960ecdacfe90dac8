use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use super::{Event, Scenario, ScenarioError, ScheduledEvent, TraversalEntry};
use crate::control_plane::{Destination, VerifyMode};
use crate::ledger::{SlaEntry, SlaFlag};
use crate::net::mbps_to_bps;
use crate::topology::{ControllerSpec, HostSpec, LinkSpec, SwitchSpec, Topology, TopologyDescription};

/// One `kind key=value ...` line.
struct Record<'a> {
    line: usize,
    kind: &'a str,
    fields: BTreeMap<&'a str, &'a str>,
}

impl<'a> Record<'a> {
    fn parse(line: usize, text: &'a str) -> Result<Self, ScenarioError> {
        let mut tokens = text.split_whitespace();
        let kind = tokens.next().expect("caller skips blank lines");
        let mut fields = BTreeMap::new();
        for tok in tokens {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| syntax(line, format!("expected key=value, got `{tok}`")))?;
            if fields.insert(k, v).is_some() {
                return Err(syntax(line, format!("duplicate key `{k}`")));
            }
        }
        Ok(Record { line, kind, fields })
    }

    fn take(&mut self, key: &str) -> Result<&'a str, ScenarioError> {
        self.fields
            .remove(key)
            .ok_or_else(|| syntax(self.line, format!("missing `{key}`")))
    }

    fn take_opt(&mut self, key: &str) -> Option<&'a str> {
        self.fields.remove(key)
    }

    fn value<T: FromStr>(&self, key: &str, raw: &str) -> Result<T, ScenarioError> {
        raw.parse()
            .map_err(|_| syntax(self.line, format!("bad value `{raw}` for `{key}`")))
    }

    fn get<T: FromStr>(&mut self, key: &str) -> Result<T, ScenarioError> {
        let raw = self.take(key)?;
        self.value(key, raw)
    }

    fn get_opt<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, ScenarioError> {
        self.take_opt(key).map(|raw| self.value(key, raw)).transpose()
    }

    fn flag(&mut self, key: &str) -> Result<bool, ScenarioError> {
        match self.take(key)? {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(syntax(self.line, format!("`{key}` must be 0 or 1, got `{other}`"))),
        }
    }

    fn mbps(&mut self, key: &str) -> Result<u64, ScenarioError> {
        let v: f64 = self.get(key)?;
        mbps_to_bps(v).map_err(|e| syntax(self.line, e.to_string()))
    }

    fn mbps_opt(&mut self, key: &str) -> Result<Option<u64>, ScenarioError> {
        match self.get_opt::<f64>(key)? {
            None => Ok(None),
            Some(v) => mbps_to_bps(v).map(Some).map_err(|e| syntax(self.line, e.to_string())),
        }
    }

    fn finish(self) -> Result<(), ScenarioError> {
        match self.fields.keys().next() {
            None => Ok(()),
            Some(k) => Err(syntax(self.line, format!("unexpected key `{k}` for `{}`", self.kind))),
        }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Syntax {
        line,
        message: message.into(),
    }
}

fn unknown(line: usize, id: impl Into<String>) -> ScenarioError {
    ScenarioError::UnknownId { line, id: id.into() }
}

/// Parses and validates a scenario. Every id referenced by a link, host,
/// traversal entry or event must be declared somewhere in the file.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut desc = TopologyDescription::default();
    let mut traversal = Vec::new();
    let mut ip_mac = Vec::new();
    let mut sla = Vec::new();
    let mut events = Vec::new();
    let mut run: Option<(u64, VerifyMode, u64)> = None;

    // line numbers of records whose references are checked after the pass
    let mut controller_lines = Vec::new();
    let mut switch_lines = Vec::new();
    let mut link_lines = Vec::new();
    let mut host_lines = Vec::new();
    let mut traversal_lines = Vec::new();
    let mut event_lines = Vec::new();

    let mut line_count = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        line_count = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut r = Record::parse(line, content)?;
        match r.kind {
            "controller" => {
                let id = r.get("id")?;
                let domain = r.get("domain")?;
                let peers_raw = r.take("peers")?;
                let peers = if peers_raw.is_empty() {
                    Vec::new()
                } else {
                    peers_raw
                        .split(',')
                        .map(|p| r.value("peers", p))
                        .collect::<Result<_, _>>()?
                };
                desc.controllers.push(ControllerSpec { id, domain, peers });
                controller_lines.push(line);
            }
            "switch" => {
                let id = r.take("id")?.to_string();
                let domain = r.get("domain")?;
                let edge = r.flag("edge")?;
                desc.switches.push(SwitchSpec { id, domain, edge });
                switch_lines.push(line);
            }
            "link" => {
                let a = r.take("a")?.to_string();
                let b = r.take("b")?.to_string();
                let capacity_bps = r.mbps("capacity_mbps")?;
                let gq_bps = r.mbps("gq_mbps")?;
                desc.links.push(LinkSpec {
                    a,
                    b,
                    capacity_bps,
                    gq_bps,
                });
                link_lines.push(line);
            }
            "host" => {
                let name = r.take("name")?.to_string();
                let mac = r.get("mac")?;
                let switch = r.take("switch")?.to_string();
                desc.hosts.push(HostSpec { name, mac, switch });
                host_lines.push(line);
            }
            "traversal" => {
                let from = r.get("from")?;
                let to = r.get("to")?;
                let edge_switch = r.take("edge_switch")?.to_string();
                traversal.push(TraversalEntry { from, to, edge_switch });
                traversal_lines.push(line);
            }
            "ipmac" => {
                let ip = r.get("ip")?;
                let mac = r.get("mac")?;
                ip_mac.push((ip, mac));
            }
            "sla" => {
                let index = r.get("index")?;
                let src_ip = r.get("src")?;
                let dst_ip = r.get("dst")?;
                let sla_bandwidth_bps = r.mbps("bw_mbps")?;
                let flag = if r.flag("flag")? {
                    SlaFlag::Guaranteed
                } else {
                    SlaFlag::BestEffort
                };
                sla.push(SlaEntry {
                    index,
                    src_ip,
                    dst_ip,
                    sla_bandwidth_bps,
                    flag,
                });
            }
            "run" => {
                if run.is_some() {
                    return Err(syntax(line, "duplicate `run` record"));
                }
                let ticks = r.get("ticks")?;
                let mode = r.get_opt("verify_mode")?.unwrap_or_default();
                let delay = r.get_opt("verify_delay")?.unwrap_or(0);
                run = Some((ticks, mode, delay));
            }
            "event" => {
                let t = r.get("t")?;
                let event = parse_event(&mut r)?;
                events.push(ScheduledEvent { t, event });
                event_lines.push(line);
            }
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
        r.finish()?;
    }

    if desc.controllers.is_empty() {
        return Err(syntax(line_count + 1, "missing topology: no controller records"));
    }

    resolve_references(
        &desc,
        &traversal,
        &events,
        Lines {
            controller: &controller_lines,
            switch: &switch_lines,
            link: &link_lines,
            host: &host_lines,
            traversal: &traversal_lines,
            event: &event_lines,
        },
    )?;
    Topology::build(&desc)?;

    let (ticks, verify_mode, verify_delay_ticks) =
        run.unwrap_or_else(|| (events.last().map_or(1, |e| e.t + 1), VerifyMode::Immediate, 0));
    Ok(Scenario {
        topology: desc,
        traversal,
        ip_mac,
        sla,
        events,
        ticks,
        verify_mode,
        verify_delay_ticks,
    })
}

fn parse_event(r: &mut Record<'_>) -> Result<Event, ScenarioError> {
    let kind = r.take("kind")?;
    Ok(match kind {
        "dhcp" => Event::Dhcp {
            host: r.take("host")?.to_string(),
        },
        "arp_exchange" => Event::ArpExchange {
            src: r.take("src")?.to_string(),
            dst: r.take("dst")?.to_string(),
        },
        "send_command" => {
            let from = r.get("from")?;
            let to: Destination = r.get("to")?;
            let command = r.get("command")?;
            let raw = r.take("payload")?;
            let payload = hex::decode(raw).map_err(|_| syntax(r.line, format!("payload `{raw}` is not hex")))?;
            let record = match r.take_opt("record") {
                None | Some("1") => true,
                Some("0") => false,
                Some(other) => return Err(syntax(r.line, format!("`record` must be 0 or 1, got `{other}`"))),
            };
            Event::SendCommand {
                from,
                to,
                command,
                payload,
                record,
            }
        }
        "tamper" => Event::Tamper {
            target_digest: r.get_opt("target_digest")?,
            command: r.get_opt("command")?,
            to: r.get_opt("to")?,
            flip_byte: r.get_opt("flip_byte")?.unwrap_or(0),
        },
        "start_flow" => Event::StartFlow {
            id: r.take("id")?.to_string(),
            src: r.take("src")?.to_string(),
            dst: r.take("dst")?.to_string(),
            demand_bps: r.mbps("demand_mbps")?,
            meter_bps: r.mbps_opt("meter_mbps")?,
        },
        "stop_flow" => Event::StopFlow {
            id: r.take("id")?.to_string(),
        },
        "provision" => Event::Provision {
            id: r.take("id")?.to_string(),
            src: r.take("src")?.to_string(),
            dst: r.take("dst")?.to_string(),
            meter_bps: r.mbps_opt("meter_mbps")?,
        },
        other => return Err(syntax(r.line, format!("unknown event kind `{other}`"))),
    })
}

struct Lines<'a> {
    controller: &'a [usize],
    switch: &'a [usize],
    link: &'a [usize],
    host: &'a [usize],
    traversal: &'a [usize],
    event: &'a [usize],
}

fn resolve_references(
    desc: &TopologyDescription,
    traversal: &[TraversalEntry],
    events: &[ScheduledEvent],
    lines: Lines<'_>,
) -> Result<(), ScenarioError> {
    let controllers: BTreeMap<u32, u32> = desc.controllers.iter().map(|c| (c.id, c.domain)).collect();
    let domains: BTreeSet<u32> = controllers.values().copied().collect();
    let switches: BTreeMap<&str, &SwitchSpec> = desc.switches.iter().map(|s| (s.id.as_str(), s)).collect();
    let hosts: BTreeSet<&str> = desc.hosts.iter().map(|h| h.name.as_str()).collect();

    for (c, &line) in desc.controllers.iter().zip(lines.controller) {
        if let Some(p) = c.peers.iter().find(|p| !controllers.contains_key(p)) {
            return Err(unknown(line, p.to_string()));
        }
    }
    for (s, &line) in desc.switches.iter().zip(lines.switch) {
        if !domains.contains(&s.domain) {
            return Err(unknown(line, format!("domain {}", s.domain)));
        }
    }
    for (h, &line) in desc.hosts.iter().zip(lines.host) {
        if !switches.contains_key(h.switch.as_str()) {
            return Err(unknown(line, &h.switch));
        }
    }
    for (l, &line) in desc.links.iter().zip(lines.link) {
        for end in [&l.a, &l.b] {
            if !switches.contains_key(end.as_str()) && !hosts.contains(end.as_str()) {
                return Err(unknown(line, end));
            }
        }
    }
    for (t, &line) in traversal.iter().zip(lines.traversal) {
        for c in [t.from, t.to] {
            if !controllers.contains_key(&c) {
                return Err(unknown(line, c.to_string()));
            }
        }
        let sw = switches
            .get(t.edge_switch.as_str())
            .ok_or_else(|| unknown(line, &t.edge_switch))?;
        if !sw.edge || sw.domain != controllers[&t.from] {
            return Err(syntax(
                line,
                format!(
                    "`{}` is not an edge switch of controller {}'s domain",
                    t.edge_switch, t.from
                ),
            ));
        }
    }

    let mut last_t = 0;
    let mut flows = BTreeSet::new();
    for (e, &line) in events.iter().zip(lines.event) {
        if e.t < last_t {
            return Err(ScenarioError::UnsortedEvents { line });
        }
        last_t = e.t;
        let host = |h: &String| {
            if hosts.contains(h.as_str()) {
                Ok(())
            } else {
                Err(unknown(line, h))
            }
        };
        let ctrl = |c: u32| {
            if controllers.contains_key(&c) {
                Ok(())
            } else {
                Err(unknown(line, c.to_string()))
            }
        };
        match &e.event {
            Event::Dhcp { host: h } => host(h)?,
            Event::ArpExchange { src, dst } => {
                host(src)?;
                host(dst)?;
            }
            Event::SendCommand { from, to, .. } => {
                ctrl(*from)?;
                if let Destination::Controller(c) = to {
                    ctrl(*c)?;
                }
            }
            Event::Tamper { to, .. } => {
                if let Some(c) = to {
                    ctrl(*c)?;
                }
            }
            Event::StartFlow { id, src, dst, .. } | Event::Provision { id, src, dst, .. } => {
                host(src)?;
                host(dst)?;
                flows.insert(id.as_str());
            }
            Event::StopFlow { id } => {
                if !flows.contains(id.as_str()) {
                    return Err(unknown(line, id));
                }
            }
        }
    }
    Ok(())
}

fn mbps(bps: u64) -> String {
    format!("{}", bps as f64 / 1e6)
}

pub(super) fn serialize(s: &Scenario) -> String {
    let mut out = String::new();
    let d = &s.topology;
    for c in &d.controllers {
        let peers: Vec<String> = c.peers.iter().map(u32::to_string).collect();
        let _ = writeln!(
            out,
            "controller id={} domain={} peers={}",
            c.id,
            c.domain,
            peers.join(",")
        );
    }
    for sw in &d.switches {
        let _ = writeln!(
            out,
            "switch id={} domain={} edge={}",
            sw.id,
            sw.domain,
            u8::from(sw.edge)
        );
    }
    for l in &d.links {
        let _ = writeln!(
            out,
            "link a={} b={} capacity_mbps={} gq_mbps={}",
            l.a,
            l.b,
            mbps(l.capacity_bps),
            mbps(l.gq_bps)
        );
    }
    for h in &d.hosts {
        let _ = writeln!(out, "host name={} mac={} switch={}", h.name, h.mac, h.switch);
    }
    for t in &s.traversal {
        let _ = writeln!(
            out,
            "traversal from={} to={} edge_switch={}",
            t.from, t.to, t.edge_switch
        );
    }
    for (ip, mac) in &s.ip_mac {
        let _ = writeln!(out, "ipmac ip={ip} mac={mac}");
    }
    for e in &s.sla {
        let _ = writeln!(
            out,
            "sla index={} src={} dst={} bw_mbps={} flag={}",
            e.index,
            e.src_ip,
            e.dst_ip,
            mbps(e.sla_bandwidth_bps),
            e.flag.bit()
        );
    }
    let _ = writeln!(
        out,
        "run ticks={} verify_mode={} verify_delay={}",
        s.ticks, s.verify_mode, s.verify_delay_ticks
    );
    for e in &s.events {
        let _ = write!(out, "event t={} ", e.t);
        let _ = match &e.event {
            Event::Dhcp { host } => writeln!(out, "kind=dhcp host={host}"),
            Event::ArpExchange { src, dst } => writeln!(out, "kind=arp_exchange src={src} dst={dst}"),
            Event::SendCommand {
                from,
                to,
                command,
                payload,
                record,
            } => writeln!(
                out,
                "kind=send_command from={from} to={to} command={command} payload={}{}",
                hex::encode(payload),
                if *record { "" } else { " record=0" }
            ),
            Event::Tamper {
                target_digest,
                command,
                to,
                flip_byte,
            } => {
                let mut line = String::from("kind=tamper");
                if let Some(d) = target_digest {
                    let _ = write!(line, " target_digest={d}");
                }
                if let Some(c) = command {
                    let _ = write!(line, " command={c}");
                }
                if let Some(c) = to {
                    let _ = write!(line, " to={c}");
                }
                writeln!(out, "{line} flip_byte={flip_byte}")
            }
            Event::StartFlow {
                id,
                src,
                dst,
                demand_bps,
                meter_bps,
            } => {
                let meter = meter_bps.map_or(String::new(), |m| format!(" meter_mbps={}", mbps(m)));
                writeln!(
                    out,
                    "kind=start_flow id={id} src={src} dst={dst} demand_mbps={}{meter}",
                    mbps(*demand_bps)
                )
            }
            Event::StopFlow { id } => writeln!(out, "kind=stop_flow id={id}"),
            Event::Provision {
                id,
                src,
                dst,
                meter_bps,
            } => {
                let meter = meter_bps.map_or(String::new(), |m| format!(" meter_mbps={}", mbps(m)));
                writeln!(out, "kind=provision id={id} src={src} dst={dst}{meter}")
            }
        };
    }
    out
}
