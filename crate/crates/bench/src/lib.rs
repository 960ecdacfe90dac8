//! Fixtures shared by the criterion benches.

use chainsdn::flow_sim::{LinkDemand, Queue};
use chainsdn::ledger::{BandwidthMatrices, Digest};
use chainsdn::scenario::{parse_scenario, CASE_B};
use chainsdn::topology::{LinkKind, LinkState};
use chainsdn::{Ledger, LinkKey, Scenario};

pub fn case_b() -> Scenario {
    parse_scenario(CASE_B).expect("built-in scenario parses")
}

/// A 10 Mbps link with a 5 Mbps guaranteed queue.
pub fn ten_mbps_link() -> LinkState {
    LinkState {
        a: "s1".into(),
        b: "s2".into(),
        capacity_bps: 10_000_000,
        guaranteed_queue_max_bps: 5_000_000,
        kind: LinkKind::IntraDomain,
        key: LinkKey::intra(0, "s1", "s2"),
    }
}

/// `n` demands alternating guaranteed and best-effort, all oversubscribed.
pub fn mixed_demands(n: usize) -> Vec<LinkDemand> {
    (0..n)
        .map(|i| {
            let demand_bps = 1e6 * (1 + i % 7) as f64;
            let queue = if i % 2 == 0 {
                Queue::Guaranteed { meter_cap_bps: 2e6 }
            } else {
                Queue::BestEffort
            };
            LinkDemand { queue, demand_bps }
        })
        .collect()
}

/// A ledger holding `n` command-hash blocks.
pub fn ledger_with_blocks(n: usize) -> Ledger {
    let mut ledger = Ledger::new(BandwidthMatrices::default());
    for i in 0..n {
        ledger
            .record_command_hash(Digest::of(i.to_le_bytes()), i as u64)
            .expect("fresh digests are accepted");
    }
    ledger
}
