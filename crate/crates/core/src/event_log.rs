//! Append-only scenario event log, written out as `events.csv`.
//!
//! Every line is `time_ms,event_kind,detail`. Provisioning decisions carry a
//! three-part detail, giving `time_ms,provision,flow_id,outcome_kind,path`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SecurityEventKind {
    UnauthorizedHost,
    ArpSpoof,
    PostHocIntegrityFailure,
    ImmediateIntegrityFailure,
}

impl SecurityEventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SecurityEventKind::UnauthorizedHost => "UnauthorizedHost",
            SecurityEventKind::ArpSpoof => "ArpSpoof",
            SecurityEventKind::PostHocIntegrityFailure => "PostHocIntegrityFailure",
            SecurityEventKind::ImmediateIntegrityFailure => "ImmediateIntegrityFailure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    Security(SecurityEventKind),
    /// Sender wrote a command digest to the ledger.
    Record,
    /// A command reached a receiving controller.
    Deliver,
    /// In-flight mutation of a command.
    Tamper,
    Verified,
    Deployed,
    Discarded,
    Dhcp,
    Qualified,
    Provision,
    Promote,
    Teardown,
    FlowBlocked,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Security(k) => k.as_str(),
            EventKind::Record => "record",
            EventKind::Deliver => "deliver",
            EventKind::Tamper => "tamper",
            EventKind::Verified => "verified",
            EventKind::Deployed => "deployed",
            EventKind::Discarded => "discarded",
            EventKind::Dhcp => "dhcp",
            EventKind::Qualified => "qualified",
            EventKind::Provision => "provision",
            EventKind::Promote => "promote",
            EventKind::Teardown => "teardown",
            EventKind::FlowBlocked => "flow_blocked",
        }
    }

    pub fn is_security(self) -> bool {
        matches!(self, EventKind::Security(_))
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub time_ms: u64,
    pub kind: EventKind,
    pub detail: String,
}

impl EventRecord {
    pub fn csv_line(&self) -> String {
        format!("{},{},{}", self.time_ms, self.kind, self.detail)
    }
}

#[derive(Debug, Clone, Default)]
pub struct EventLog {
    records: Vec<EventRecord>,
}

impl EventLog {
    pub fn push(&mut self, time_ms: u64, kind: EventKind, detail: impl Into<String>) {
        self.records.push(EventRecord {
            time_ms,
            kind,
            detail: detail.into(),
        });
    }

    pub fn records(&self) -> &[EventRecord] {
        &self.records
    }

    pub fn security_events(&self) -> impl Iterator<Item = &EventRecord> {
        self.records.iter().filter(|r| r.kind.is_security())
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.records.iter().filter(|r| r.kind == kind).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_ms,event_kind,detail\n");
        for r in &self.records {
            out.push_str(&r.csv_line());
            out.push('\n');
        }
        out
    }
}
