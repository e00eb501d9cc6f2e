//! Replications over seeds, run in parallel, one thread per seed.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::sync::OnceLock;
use std::thread;
use std::time::Instant;

use crate::config::Scenario;
use crate::engine::{EngineError, RunOutput, RunParams, Simulation};
use crate::policy::PolicySpec;

/// Nanoseconds since the first call; used to time solver calls.
pub fn monotonic_nanos() -> u64 {
    static START: OnceLock<Instant> = OnceLock::new();
    START.get_or_init(Instant::now).elapsed().as_nanos() as u64
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub seeds: Vec<u64>,
    pub horizon_days: u32,
    pub warmup_days: u32,
    /// Record wall-clock solve times.
    pub timed: bool,
}

impl Plan {
    pub fn from_scenario(sc: &Scenario) -> Plan {
        Plan {
            seeds: sc.simulation.seeds.clone(),
            horizon_days: sc.simulation.horizon_days,
            warmup_days: sc.simulation.warmup_days,
            timed: false,
        }
    }

    fn params(&self, seed: u64) -> RunParams {
        RunParams {
            horizon_days: self.horizon_days,
            warmup_days: self.warmup_days,
            seed,
        }
    }
}

/// Runs `spec` once per seed. Results come back in seed order.
pub fn run_policy(sc: &Scenario, spec: &PolicySpec, plan: &Plan) -> Result<Vec<RunOutput>, EngineError> {
    if plan.seeds.is_empty() {
        return Err(EngineError::Config("no seeds given".into()));
    }
    let discharge = spec.discharge(&sc.discharge);
    let clock = plan.timed.then_some(monotonic_nanos as fn() -> u64);
    let results: Vec<Result<RunOutput, EngineError>> = thread::scope(|s| {
        let handles: Vec<_> = plan
            .seeds
            .iter()
            .map(|&seed| {
                let discharge = discharge.clone();
                s.spawn(move || {
                    let mut policy = spec.build(&sc.pmodel, clock);
                    Simulation::new(sc, discharge, policy.as_mut(), plan.params(seed))?.run()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("replication thread panicked"))
            .collect()
    });
    results.into_iter().collect()
}

/// Runs one seed and writes the event trace to `path`.
pub fn run_traced(
    sc: &Scenario,
    spec: &PolicySpec,
    plan: &Plan,
    seed: u64,
    path: &Path,
) -> Result<RunOutput, EngineError> {
    let file = File::create(path)
        .map_err(|e| EngineError::Config(format!("cannot create {}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    let mut policy = spec.build(&sc.pmodel, None);
    let run = Simulation::new(sc, spec.discharge(&sc.discharge), policy.as_mut(), plan.params(seed))?
        .with_trace(&mut out)
        .run();
    drop(out);
    run
}
