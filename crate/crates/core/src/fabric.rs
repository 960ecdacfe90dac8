use crate::event_log::EventLog;
use crate::ledger::Ledger;
use crate::topology::Topology;

/// State shared by the control plane and the provisioning engine: the static
/// network, the ledger, the event log and the simulation clock.
#[derive(Debug, Clone)]
pub struct Fabric {
    pub topology: Topology,
    pub ledger: Ledger,
    pub log: EventLog,
    pub now_ms: u64,
}

impl Fabric {
    pub fn new(topology: Topology, ledger: Ledger) -> Self {
        Fabric {
            topology,
            ledger,
            log: EventLog::default(),
            now_ms: 0,
        }
    }
}
