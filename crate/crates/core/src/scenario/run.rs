use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use super::{Scenario, ScenarioError, World};
use crate::flow_sim::metrics_csv;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSummary {
    pub id: String,
    pub class: &'static str,
    pub ticks: usize,
    pub mean_allocated_bps: f64,
    pub mean_loss_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub ticks: u64,
    pub chain_blocks: usize,
    pub chain_valid: bool,
    pub verifications_passed: usize,
    pub verifications_failed: usize,
    pub security_events: usize,
    pub flows: Vec<FlowSummary>,
}

impl RunSummary {
    pub fn of(world: &World) -> Self {
        let mut per_flow: BTreeMap<&str, (&'static str, usize, f64, f64)> = BTreeMap::new();
        for r in world.rows() {
            let e = per_flow.entry(&r.flow_id).or_insert((r.class, 0, 0.0, 0.0));
            e.0 = r.class;
            e.1 += 1;
            e.2 += r.allocated_bps;
            e.3 += r.loss_rate;
        }
        let results = world.control.results();
        let passed = results.iter().filter(|r| r.verified).count();
        RunSummary {
            ticks: world.ticks_done(),
            chain_blocks: world.fabric.ledger.len(),
            chain_valid: world.fabric.ledger.validate_chain(),
            verifications_passed: passed,
            verifications_failed: results.len() - passed,
            security_events: world.fabric.log.security_events().count(),
            flows: per_flow
                .into_iter()
                .map(|(id, (class, n, alloc, loss))| FlowSummary {
                    id: id.to_string(),
                    class,
                    ticks: n,
                    mean_allocated_bps: alloc / n as f64,
                    mean_loss_rate: loss / n as f64,
                })
                .collect(),
        }
    }

    /// 0 for a clean run, 2 when any security event fired.
    pub fn exit_code(&self) -> i32 {
        if self.security_events > 0 {
            2
        } else {
            0
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ticks {}", self.ticks);
        let _ = writeln!(out, "chain_blocks {}", self.chain_blocks);
        let _ = writeln!(out, "chain_valid {}", self.chain_valid);
        let _ = writeln!(out, "verifications_passed {}", self.verifications_passed);
        let _ = writeln!(out, "verifications_failed {}", self.verifications_failed);
        let _ = writeln!(out, "security_events {}", self.security_events);
        for f in &self.flows {
            let _ = writeln!(
                out,
                "flow {} class={} ticks={} mean_allocated_bps={:.0} mean_loss_rate={:.6}",
                f.id, f.class, f.ticks, f.mean_allocated_bps, f.mean_loss_rate
            );
        }
        out
    }
}

/// Writes `metrics.csv`, `events.csv`, `chain.log` and `summary.txt`.
pub fn write_outputs(world: &World, out_dir: &Path) -> Result<RunSummary, RunError> {
    fs::create_dir_all(out_dir)?;
    let summary = RunSummary::of(world);
    fs::write(out_dir.join("metrics.csv"), metrics_csv(world.rows()))?;
    fs::write(out_dir.join("events.csv"), world.fabric.log.to_csv())?;
    fs::write(out_dir.join("chain.log"), world.fabric.ledger.export_chain())?;
    fs::write(out_dir.join("summary.txt"), summary.to_text())?;
    Ok(summary)
}

/// Simulates the whole scenario and writes its artifacts to `out_dir`.
pub fn run(scenario: &Scenario, out_dir: &Path) -> Result<RunSummary, RunError> {
    let mut world = World::new(scenario)?;
    world.run_to_end()?;
    write_outputs(&world, out_dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{parse_scenario, CASE_A};

    #[test]
    fn writes_all_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run(&parse_scenario(CASE_A).unwrap(), dir.path()).unwrap();
        assert_eq!(summary.exit_code(), 0);
        assert!(summary.chain_valid);
        assert_eq!((summary.verifications_passed, summary.verifications_failed), (3, 0));
        for f in ["metrics.csv", "events.csv", "chain.log", "summary.txt"] {
            assert!(dir.path().join(f).is_file(), "{f}");
        }
        let text = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
        assert!(text.contains("chain_valid true"));
        assert!(text.contains("flow f1 class=Guaranteed ticks=3"));
    }
}
