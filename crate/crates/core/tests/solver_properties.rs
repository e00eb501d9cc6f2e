use std::cmp::Ordering;

use proptest::prelude::*;
use wardflow_core::domain::{is_admissible, validate_instance, Objective};
use wardflow_core::solver::{
    brute_force_min_cost, brute_force_oracle, min_overflow_budget, overflow_budget,
    solve_p_model, BudgetParams, SolverError,
};
use wardflow_core::{
    AssignmentInstance, Availability, BedId, BoardedPatient, CandidateBed, Edge, LogWeight,
    Minutes, PatientId, PoolId, Source, TypeId,
};

fn weight() -> impl Strategy<Value = LogWeight> {
    prop_oneof![
        1 => Just(LogWeight::Impossible),
        1 => Just(LogWeight::Finite(0.0)),
        3 => (0.01f64..1.0).prop_map(|p| LogWeight::Finite(p.ln())),
    ]
}

fn cost() -> impl Strategy<Value = f64> {
    prop_oneof![3 => Just(0.0), 2 => Just(1.0), 1 => Just(2.5)]
}

/// Edge matrix with holes, patched so that every patient and every bed has
/// at least one edge.
fn instance() -> impl Strategy<Value = AssignmentInstance> {
    (1usize..=5, 1usize..=7)
        .prop_flat_map(|(np, nb)| {
            let cell = proptest::option::weighted(0.6, (weight(), cost()));
            (
                Just(np),
                Just(nb),
                proptest::collection::vec(cell, np * nb),
                proptest::collection::vec(0u8..3, nb),
            )
        })
        .prop_map(|(np, nb, cells, avail)| {
            let mut edges: Vec<Vec<Edge>> = vec![Vec::new(); np];
            for i in 0..np {
                for b in 0..nb {
                    if let Some((weight, cost)) = cells[i * nb + b] {
                        edges[i].push(Edge { bed: b, weight, cost });
                    }
                }
            }
            for i in 0..np {
                if edges[i].is_empty() {
                    edges[i].push(Edge {
                        bed: i % nb,
                        weight: LogWeight::Finite(-0.5),
                        cost: 1.0,
                    });
                }
            }
            for b in 0..nb {
                if !edges.iter().flatten().any(|e| e.bed == b) {
                    let i = b % np;
                    let pos = edges[i].partition_point(|e| e.bed < b);
                    edges[i].insert(
                        pos,
                        Edge {
                            bed: b,
                            weight: LogWeight::Finite(-1.0),
                            cost: 0.0,
                        },
                    );
                }
            }
            AssignmentInstance {
                patients: (0..np)
                    .map(|i| BoardedPatient {
                        id: PatientId(i as u64 + 1),
                        type_id: TypeId(1),
                        request_time: Minutes(-60 * i as i64),
                        delay_target: Minutes::from_hours(10),
                        source: Source::Ed,
                    })
                    .collect(),
                beds: avail
                    .iter()
                    .enumerate()
                    .map(|(b, &a)| CandidateBed {
                        id: BedId(b as u32 + 1),
                        pool: PoolId(1),
                        availability: match a {
                            0 => Availability::Now(Minutes(0)),
                            k => Availability::Later { day: i64::from(k) - 1 },
                        },
                    })
                    .collect(),
                edges,
                budget: f64::INFINITY,
            }
        })
}

fn same(a: &Objective, b: &Objective) -> bool {
    a.compare(b, 1e-9) == Ordering::Equal
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn generated_instances_are_valid(inst in instance()) {
        prop_assert!(validate_instance(&inst).is_ok());
    }

    #[test]
    fn min_budget_matches_enumeration(inst in instance()) {
        match (min_overflow_budget(&inst), brute_force_min_cost(&inst)) {
            (Ok(m), Ok(o)) => {
                prop_assert!((m.budget - o.total_cost).abs() < 1e-9);
                prop_assert_eq!(is_admissible(&inst, &m.plan), Ok(true));
            }
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn p_model_matches_enumeration(inst in instance(), extra in 0u8..3) {
        let Ok(m) = min_overflow_budget(&inst) else {
            return Ok(());
        };
        let b = if extra == 2 { f64::INFINITY } else { m.budget + f64::from(extra) };
        let inst = inst.with_budget(b);
        let r = solve_p_model(&inst).unwrap();
        let o = brute_force_oracle(&inst).unwrap();
        prop_assert!(same(&r.plan.objective, &o.objective), "{:?} vs {:?}", r.plan, o);
        prop_assert!(r.plan.total_cost <= b + 1e-9);
        prop_assert_eq!(is_admissible(&inst, &r.plan), Ok(true));
    }

    #[test]
    fn below_min_budget_is_infeasible(inst in instance()) {
        let Ok(m) = min_overflow_budget(&inst) else {
            return Ok(());
        };
        prop_assume!(m.budget > 0.0);
        let r = solve_p_model(&inst.with_budget(m.budget - 0.5));
        prop_assert!(matches!(r, Err(SolverError::Infeasible(_))), "{:?}", r);
    }

    #[test]
    fn budget_rule(
        b_star in 0u32..20,
        n in 0usize..60,
        integral in 0.0f64..80.0,
        alpha in 0.0f64..1.0,
        beta in 0.0f64..0.2,
    ) {
        let p = BudgetParams::new(alpha, beta, 4.0).unwrap();
        let b_star = f64::from(b_star);
        let got = overflow_budget(b_star, n, integral, &p);
        let want = b_star.max((alpha * n as f64 + beta * integral).floor());
        prop_assert_eq!(got, want);
        prop_assert!(got >= b_star);
    }
}
