//! Line-oriented text form of an [`AssignmentInstance`].
//!
//! ```text
//! wardflow-instance 1
//! budget <real | inf>
//! patient <id> <type> <request_minute> <target_minutes> <source>
//! bed <id> <pool> now <minute>
//! bed <id> <pool> later <day>
//! edge <patient_index> <bed_index> <log_weight | impossible> <cost>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Reals are written
//! in shortest round-trip form, so dump then load is bit-exact.

use std::fmt::Write as _;

use thiserror::Error;
use wardflow_core::domain::validate_instance;
use wardflow_core::{
    AssignmentInstance, Availability, BedId, BoardedPatient, CandidateBed, Edge, LogWeight,
    Minutes, PatientId, PoolId, Source, TypeId,
};

const MAGIC: &str = "wardflow-instance";
const VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid instance: {0}")]
    Invalid(String),
}

fn real(x: f64) -> String {
    format!("{x:?}")
}

pub fn dump_instance(inst: &AssignmentInstance) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC} {VERSION}");
    let _ = writeln!(s, "budget {}", real(inst.budget));
    for p in &inst.patients {
        let _ = writeln!(
            s,
            "patient {} {} {} {} {}",
            p.id.0,
            p.type_id.0,
            p.request_time.0,
            p.delay_target.0,
            p.source.name()
        );
    }
    for b in &inst.beds {
        let _ = match b.availability {
            Availability::Now(t) => writeln!(s, "bed {} {} now {}", b.id.0, b.pool.0, t.0),
            Availability::Later { day } => writeln!(s, "bed {} {} later {}", b.id.0, b.pool.0, day),
        };
    }
    for (i, edges) in inst.edges.iter().enumerate() {
        for e in edges {
            let w = match e.weight {
                LogWeight::Finite(w) => real(w),
                LogWeight::Impossible => "impossible".into(),
            };
            let _ = writeln!(s, "edge {i} {} {w} {}", e.bed, real(e.cost));
        }
    }
    s
}

fn source(name: &str) -> Option<Source> {
    Source::ALL.into_iter().find(|s| s.name() == name)
}

pub fn load_instance(text: &str) -> Result<AssignmentInstance, FormatError> {
    let mut inst = AssignmentInstance {
        patients: Vec::new(),
        beds: Vec::new(),
        edges: Vec::new(),
        budget: f64::INFINITY,
    };
    let mut header = false;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let err = |message: String| FormatError::Syntax { line, message };
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        macro_rules! num {
            ($i:expr, $ty:ty) => {
                f.get($i)
                    .ok_or_else(|| err(format!("missing field {}", $i)))?
                    .parse::<$ty>()
                    .map_err(|e| err(format!("field {}: {e}", $i)))?
            };
        }
        if !header {
            if f.as_slice() != [MAGIC, "1"] {
                return Err(err(format!("expected `{MAGIC} {VERSION}`")));
            }
            header = true;
            continue;
        }
        match f[0] {
            "budget" if f.len() == 2 => inst.budget = num!(1, f64),
            "patient" if f.len() == 6 => {
                let src = source(f[5]).ok_or_else(|| err(format!("unknown source `{}`", f[5])))?;
                inst.patients.push(BoardedPatient {
                    id: PatientId(num!(1, u64)),
                    type_id: TypeId(num!(2, u16)),
                    request_time: Minutes(num!(3, i64)),
                    delay_target: Minutes(num!(4, i64)),
                    source: src,
                });
            }
            "bed" if f.len() == 5 => {
                let availability = match f[3] {
                    "now" => Availability::Now(Minutes(num!(4, i64))),
                    "later" => Availability::Later { day: num!(4, i64) },
                    other => return Err(err(format!("unknown availability `{other}`"))),
                };
                inst.beds.push(CandidateBed {
                    id: BedId(num!(1, u32)),
                    pool: PoolId(num!(2, u16)),
                    availability,
                });
            }
            "edge" if f.len() == 5 => {
                let i = num!(1, usize);
                let weight = match f[3] {
                    "impossible" => LogWeight::Impossible,
                    _ => LogWeight::Finite(num!(3, f64)),
                };
                if i >= inst.patients.len() {
                    return Err(err(format!("edge for undeclared patient {i}")));
                }
                inst.edges.resize(inst.patients.len(), Vec::new());
                inst.edges[i].push(Edge {
                    bed: num!(2, usize),
                    weight,
                    cost: num!(4, f64),
                });
            }
            other => return Err(err(format!("unexpected `{other}` line"))),
        }
    }
    if !header {
        return Err(FormatError::Syntax {
            line: 1,
            message: "empty input".into(),
        });
    }
    inst.edges.resize(inst.patients.len(), Vec::new());
    validate_instance(&inst).map_err(|v| FormatError::Invalid(v.to_string()))?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use wardflow_core::testkit::{random_instance, RandomSpec};

    #[test]
    fn round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let mut inst = random_instance(&mut rng, &RandomSpec::default());
            inst.budget = 1.0 / 3.0;
            let text = dump_instance(&inst);
            let back = load_instance(&text).unwrap();
            assert_eq!(back, inst);
            assert_eq!(dump_instance(&back), text);
        }
    }

    #[test]
    fn infinite_budget_and_comments() {
        let text = "wardflow-instance 1\n# tiny\nbudget inf\npatient 7 2 -30 600 ed\nbed 3 1 later 0\nedge 0 0 -0.5 1.0\n";
        let inst = load_instance(text).unwrap();
        assert!(inst.budget.is_infinite());
        assert_eq!(inst.patients[0].request_time, Minutes(-30));
        assert_eq!(inst.edges[0][0].weight, LogWeight::Finite(-0.5));
    }

    #[test]
    fn reports_line_numbers() {
        let text = "wardflow-instance 1\nbudget 2\nbed 1 x now 0\n";
        match load_instance(text) {
            Err(FormatError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(load_instance("budget 1\n").is_err());
    }
}
