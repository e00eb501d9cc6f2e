//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria 1 to 5 and 8 are correctness checks and fail the target when
//! they fail. Criteria 6 and 7 compare the simulated hospital with reported
//! figures; they are printed but do not fail the target.

mod common;

use std::cmp::Ordering;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wardflow::config::Scenario;
use wardflow::experiment::{run_policy, Plan};
use wardflow::metrics::{write_overflow_csv, write_summary_csv, write_wait_csv, MetricsSummary};
use wardflow::policy::PolicySpec;
use wardflow_core::domain::is_admissible;
use wardflow_core::solver::{
    brute_force_oracle, fcfs_normalize, min_cost_relaxation, min_overflow_budget,
    overflow_budget, same_type, solve_p_model, BudgetParams,
};
use wardflow_core::testkit::{random_instance, random_typed_instance, RandomSpec};

struct Report {
    hard_failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, pass: bool, hard: bool, detail: String) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        let note = if hard || pass { "" } else { " (reported only)" };
        println!("criterion {id}: {verdict}{note}  {detail}");
        if hard && !pass {
            self.hard_failures += 1;
        }
    }
}

fn solver_exactness(r: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let spec = RandomSpec::default();
    let (mut cases, mut bad) = (0, 0);
    for _ in 0..500 {
        let base = random_instance(&mut rng, &spec);
        let budgets = match min_overflow_budget(&base) {
            Ok(m) => vec![m.budget, m.budget + 1.0, f64::INFINITY],
            Err(_) => vec![f64::INFINITY],
        };
        for b in budgets {
            let inst = base.clone().with_budget(b);
            cases += 1;
            let ok = match (solve_p_model(&inst), brute_force_oracle(&inst)) {
                (Ok(s), Ok(o)) => {
                    s.plan.objective.compare(&o.objective, 1e-9) == Ordering::Equal
                        && s.plan.objective.impossible == o.objective.impossible
                        && is_admissible(&inst, &s.plan) == Ok(true)
                }
                (Err(a), Err(b)) => a == b,
                _ => false,
            };
            bad += usize::from(!ok);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    r.line(
        "1",
        bad == 0 && secs < 60.0,
        true,
        format!("{cases} solves on 500 instances, {bad} mismatches, {secs:.2} s"),
    );
}

fn lp_integrality(r: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let spec = RandomSpec {
        max_patients: 8,
        max_beds: 12,
        ..RandomSpec::default()
    };
    let (mut feasible, mut fractional) = (0, 0);
    for _ in 0..1000 {
        let inst = random_instance(&mut rng, &spec);
        if let Ok(x) = min_cost_relaxation(&inst) {
            feasible += 1;
            let integral = x
                .iter()
                .flatten()
                .all(|v| v.abs() <= 1e-7 || (v - 1.0).abs() <= 1e-7);
            fractional += usize::from(!integral);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    r.line(
        "2",
        fractional == 0 && secs < 60.0,
        true,
        format!("1000 instances ({feasible} feasible), {fractional} fractional optima, {secs:.2} s"),
    );
}

fn fcfs_property(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    let (mut checks, mut bad, mut swaps, mut minus_inf) = (0, 0, 0, 0);
    let mut instances = 0;
    while instances < 200 {
        let t = random_typed_instance(&mut rng);
        let Ok(m) = min_overflow_budget(&t.instance) else {
            continue;
        };
        let inst = t.instance.clone().with_budget(m.budget);
        let plan = solve_p_model(&inst).expect("feasible at B*").plan;
        let freed: Vec<usize> = (0..inst.beds.len())
            .filter(|&b| inst.beds[b].is_available_now())
            .collect();
        if freed.is_empty() {
            continue;
        }
        instances += 1;
        for b in freed {
            checks += 1;
            let out = fcfs_normalize(&inst, &plan, inst.beds[b].id).expect("known bed");
            swaps += usize::from(out != plan);
            // objectives are extended reals: any impossible pairing makes it -inf
            let same_value = match (plan.objective.impossible, out.objective.impossible) {
                (0, 0) => (out.objective.finite - plan.objective.finite).abs() <= 1e-12,
                (a, b) => {
                    minus_inf += 1;
                    a > 0 && b > 0
                }
            };
            let earliest = out.patient_on(b).map_or(true, |k| {
                (0..inst.patients.len()).all(|l| {
                    !same_type(&inst, k, l)
                        || inst.patients[k].request_time <= inst.patients[l].request_time
                })
            });
            let admissible = is_admissible(&inst, &out) == Ok(true);
            bad += usize::from(!(same_value && earliest && admissible));
        }
    }
    r.line(
        "3",
        bad == 0 && swaps > 0,
        true,
        format!(
            "200 instances, {checks} freed beds ({minus_inf} with objective -inf), \
             {swaps} reassignments, {bad} violations"
        ),
    );
}

fn budget_rule(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut bad = 0;
    for _ in 0..1000 {
        let b_star = f64::from(rng.random_range(0u32..30));
        let n = rng.random_range(0usize..80);
        let integral: f64 = rng.random_range(0.0..120.0);
        let alpha: f64 = rng.random_range(0.0..1.0);
        let beta: f64 = rng.random_range(0.0..0.5);
        let delta: f64 = rng.random_range(0.0..12.0);
        let p = BudgetParams::new(alpha, beta, delta).unwrap();
        let got = overflow_budget(b_star, n, integral, &p);
        let direct = b_star.max((alpha * n as f64 + beta * integral).floor());
        bad += usize::from(got < b_star || got != direct);
    }
    r.line("4", bad == 0, true, format!("1000 tuples, {bad} mismatches"));
}

fn simulation_sanity(r: &mut Report) {
    let tiny = common::Tiny::default();
    let sc = tiny.scenario();
    let mut waits = 0usize;
    let mut overflows = 0usize;
    let mut admitted = 0usize;
    for name in ["bmu", "tb2", "p(0,0,0)", "p(0.15,0.02,4)"] {
        let spec: PolicySpec = name.parse().unwrap();
        let plan = Plan {
            seeds: vec![1],
            horizon_days: 500,
            warmup_days: 50,
            timed: false,
        };
        for run in run_policy(&sc, &spec, &plan).expect("tiny run") {
            admitted += run.records.len();
            waits += run.records.iter().filter(|x| x.admission != x.request).count();
            overflows += run.records.iter().filter(|x| x.overflowed()).count();
        }
    }
    let long = Plan {
        seeds: vec![9],
        horizon_days: 10_000,
        warmup_days: 100,
        timed: false,
    };
    let run = &run_policy(&sc, &PolicySpec::Bmu, &long).expect("long run")[0];
    let expected = tiny.daily_requests * tiny.mean_stay_days();
    let err = (run.mean_occupancy - expected).abs() / expected;
    r.line(
        "5",
        waits == 0 && overflows == 0 && err < 0.05,
        true,
        format!(
            "{admitted} uncontended admissions, {waits} waits, {overflows} overflows; \
             occupancy {:.3} vs {expected:.3} over 10k days ({:.2}% off)",
            run.mean_occupancy,
            100.0 * err
        ),
    );
}

fn summary(sc: &Scenario, spec: &PolicySpec, plan: &Plan) -> MetricsSummary {
    let runs = run_policy(sc, spec, plan).unwrap_or_else(|e| panic!("{}: {e}", spec.label()));
    MetricsSummary::from_runs(&runs, sc.simulation.batches)
}

fn reproduction(r: &mut Report) {
    let sc = Scenario::reference();
    let plan = Plan {
        seeds: vec![1, 2, 3, 4, 5],
        horizon_days: 1000,
        warmup_days: 100,
        timed: false,
    };
    let names = ["bmu", "early1", "early2", "p(0,0,0)", "p(0.15,0,0)", "p(0.15,0.02,4)", "tb2", "tb1"];
    let mut rows = Vec::new();
    for name in names {
        let spec: PolicySpec = name.parse().unwrap();
        let mut plan = plan.clone();
        plan.timed = name == "p(0,0,0)";
        let start = Instant::now();
        let s = summary(&sc, &spec, &plan);
        println!(
            "  {:<16} overflow {:>6.2}%  wait {:>5.2} h  22-04 {:>5.2} h  12-16 {:>5.2} h  ({:.0} s)",
            s.policy,
            100.0 * s.overflow_rate().unwrap_or(f64::NAN),
            s.mean_wait.unwrap_or(f64::NAN),
            s.night_wait.unwrap_or(f64::NAN),
            s.afternoon_wait.unwrap_or(f64::NAN),
            start.elapsed().as_secs_f64()
        );
        rows.push(s);
    }
    let get = |label: &str| rows.iter().find(|s| s.policy == label).expect("policy ran");
    let (bmu, early2, p0) = (get("BMU"), get("Early-2"), get("P(0,0,0)"));
    let night = |s: &MetricsSummary| s.night_wait.unwrap_or(f64::NAN);
    let ovf = |label: &str| get(label).overflow_rate().unwrap_or(f64::NAN);

    let ratio = night(bmu) / bmu.afternoon_wait.unwrap_or(f64::NAN);
    r.line("6a", ratio >= 1.5, false, format!("BMU night/afternoon wait ratio {ratio:.2} (need >= 1.5)"));

    let order = ["BMU", "P(0,0,0)", "P(0.15,0,0)", "P(0.15,0.02,4)", "TB-2", "TB-1"];
    let o: Vec<f64> = order.iter().map(|l| ovf(l)).collect();
    let ordered = o[0] < o[1] && o[1] < o[2] && o[2] < o[3] && o[3] <= o[4] && o[4] < o[5];
    let in_band = (0.08..=0.14).contains(&o[0]);
    let listed: Vec<String> = order
        .iter()
        .zip(&o)
        .map(|(l, v)| format!("{l} {:.2}%", 100.0 * v))
        .collect();
    r.line(
        "6b",
        ordered && in_band,
        false,
        format!(
            "{}; ordering {}, BMU in [8%, 14%] {}",
            listed.join(", "),
            if ordered { "holds" } else { "broken" },
            if in_band { "yes" } else { "no" }
        ),
    );

    let cut = |s: &MetricsSummary| 1.0 - night(s) / night(bmu);
    r.line(
        "6c",
        cut(p0) >= 0.30,
        false,
        format!("P(0,0,0) cuts the 22-04 wait by {:.1}% (need >= 30%)", 100.0 * cut(p0)),
    );
    r.line(
        "6d",
        cut(early2) < cut(p0),
        false,
        format!(
            "Early-2 cuts the 22-04 wait by {:.1}%, P(0,0,0) by {:.1}%",
            100.0 * cut(early2),
            100.0 * cut(p0)
        ),
    );

    let v = p0.solver.as_ref().expect("P(0,0,0) reports solver stats");
    let mean = v.mean_seconds.unwrap_or(f64::NAN);
    let max = v.max_seconds.unwrap_or(f64::NAN);
    let share = v.lp_integral_share.unwrap_or(f64::NAN);
    let timing = mean <= 0.05 && max <= 3.0;
    r.line(
        "7",
        timing && (0.30..=0.70).contains(&share),
        false,
        format!(
            "{} solves, mean {:.5} s, max {:.3} s (timing {}), LP-integral {:.2}% (band 30-70%)",
            v.solves,
            mean,
            max,
            if timing { "ok" } else { "too slow" },
            100.0 * share
        ),
    );
}

fn determinism(r: &mut Report) {
    let sc = Scenario::reference();
    let plan = Plan {
        seeds: vec![11, 12],
        horizon_days: 150,
        warmup_days: 20,
        timed: false,
    };
    let csv = |spec: &PolicySpec| {
        let s = summary(&sc, spec, &plan);
        let mut out = Vec::new();
        write_summary_csv(&mut out, std::slice::from_ref(&s)).unwrap();
        write_wait_csv(&mut out, &s).unwrap();
        write_overflow_csv(&mut out, &s).unwrap();
        out
    };
    let mut same = true;
    for name in ["bmu", "tb1", "p(0.15,0.02,4)"] {
        let spec: PolicySpec = name.parse().unwrap();
        same &= csv(&spec) == csv(&spec);
    }
    r.line("8", same, true, "repeated runs of BMU, TB-1, P(0.15,0.02,4) give identical CSV bytes".into());
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |ids: &str| filter.is_empty() || filter.iter().any(|f| ids.split(',').any(|id| id == f));
    let mut r = Report { hard_failures: 0 };
    type Step = (&'static str, fn(&mut Report));
    let steps: [Step; 7] = [
        ("1", solver_exactness),
        ("2", lp_integrality),
        ("3", fcfs_property),
        ("4", budget_rule),
        ("5", simulation_sanity),
        ("8", determinism),
        ("6,7", reproduction),
    ];
    for (id, step) in steps {
        if wanted(id) {
            step(&mut r);
        }
    }
    if r.hard_failures > 0 {
        println!("{} correctness criteria failed", r.hard_failures);
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
