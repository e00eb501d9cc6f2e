//! Patients, beds, compatibility tiers, and the per-iteration assignment
//! instance.
//!
//! A [`Hospital`] fixes the static structure: bed pools, patient types, and
//! the [`CompatibilityMap`] telling which pools are primary, preferred, or
//! secondary for each type together with the overflow cost of using them.
//!
//! An [`AssignmentInstance`] is a snapshot taken at one decision iteration:
//! the boarded patients, the candidate beds, the eligible beds of every
//! patient with the log-probability weight and overflow cost of each
//! pairing, and the overflow budget. An [`AssignmentPlan`] sends every
//! patient to exactly one eligible bed.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::time::Minutes;

/// Absolute tolerance used when checking the budget constraint.
pub const BUDGET_TOLERANCE: f64 = 1e-9;

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident, $inner:ty) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        #[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
        #[cfg_attr(feature = "serde", serde(transparent))]
        pub struct $name(pub $inner);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(PatientId, u64);
id_type!(BedId, u32);
id_type!(
    /// Bed pool index (1..=34 in the reference hospital).
    PoolId,
    u16
);
id_type!(TypeId, u16);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Specialty {
    Cardiology,
    Gastroenterology,
    Geriatrics,
    GeneralMedicine,
    Respiratory,
    Surgery,
    /// Surgical beds reserved for elective and same-day admissions.
    #[cfg_attr(feature = "serde", serde(rename = "surgery-el"))]
    SurgeryElective,
    /// Common secondary pools shared by all specialties.
    Mixed,
}

impl Specialty {
    pub const ALL: [Specialty; 8] = [
        Specialty::Cardiology,
        Specialty::Gastroenterology,
        Specialty::Geriatrics,
        Specialty::GeneralMedicine,
        Specialty::Respiratory,
        Specialty::Surgery,
        Specialty::SurgeryElective,
        Specialty::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Specialty::Cardiology => "cardiology",
            Specialty::Gastroenterology => "gastroenterology",
            Specialty::Geriatrics => "geriatrics",
            Specialty::GeneralMedicine => "general-medicine",
            Specialty::Respiratory => "respiratory",
            Specialty::Surgery => "surgery",
            Specialty::SurgeryElective => "surgery-el",
            Specialty::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Specialty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Gender {
    Male,
    Female,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum GenderLabel {
    MaleOnly,
    FemaleOnly,
    GenderNeutral,
}

impl GenderLabel {
    pub fn admits(self, gender: Gender) -> bool {
        matches!(
            (self, gender),
            (GenderLabel::GenderNeutral, _)
                | (GenderLabel::MaleOnly, Gender::Male)
                | (GenderLabel::FemaleOnly, Gender::Female)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AccommodationClass {
    A1,
    B1,
    B2,
    C,
}

impl AccommodationClass {
    pub const ALL: [AccommodationClass; 4] = [
        AccommodationClass::A1,
        AccommodationClass::B1,
        AccommodationClass::B2,
        AccommodationClass::C,
    ];
}

/// Where a bed request originates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Source {
    /// Emergency department.
    Ed,
    /// Same-day admission after day surgery.
    Sda,
    /// Elective admission.
    El,
    /// Specialist outpatient clinic.
    Soc,
}

impl Source {
    pub const ALL: [Source; 4] = [Source::Ed, Source::Sda, Source::El, Source::Soc];

    pub fn name(self) -> &'static str {
        match self {
            Source::Ed => "ed",
            Source::Sda => "sda",
            Source::El => "el",
            Source::Soc => "soc",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PatientType {
    pub id: TypeId,
    pub specialty: Specialty,
    pub gender: Gender,
    pub class: AccommodationClass,
    /// Sources that may produce requests of this type.
    pub sources: Vec<Source>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BedPool {
    pub id: PoolId,
    pub specialty: Specialty,
    pub gender_label: GenderLabel,
    pub class: AccommodationClass,
    pub capacity: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Tier {
    Primary,
    Preferred,
    Secondary,
}

impl Tier {
    pub fn is_overflow(self) -> bool {
        self != Tier::Primary
    }

    pub fn name(self) -> &'static str {
        match self {
            Tier::Primary => "primary",
            Tier::Preferred => "preferred",
            Tier::Secondary => "secondary",
        }
    }
}

/// Overflow cost per non-primary tier. Primary pools always cost zero.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TierCosts {
    pub preferred: f64,
    pub secondary: f64,
}

impl Default for TierCosts {
    fn default() -> Self {
        TierCosts {
            preferred: 1.0,
            secondary: 1.0,
        }
    }
}

impl TierCosts {
    pub fn cost(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Primary => 0.0,
            Tier::Preferred => self.preferred,
            Tier::Secondary => self.secondary,
        }
    }
}

/// Pools a patient type may use, in search order within each tier.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TypeTiers {
    pub primary: Vec<PoolId>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub preferred: Vec<PoolId>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub secondary: Vec<PoolId>,
}

impl TypeTiers {
    pub fn tier_of(&self, pool: PoolId) -> Option<Tier> {
        if self.primary.contains(&pool) {
            Some(Tier::Primary)
        } else if self.preferred.contains(&pool) {
            Some(Tier::Preferred)
        } else if self.secondary.contains(&pool) {
            Some(Tier::Secondary)
        } else {
            None
        }
    }

    /// All pools, primary first, then preferred, then secondary.
    pub fn pools(&self) -> impl Iterator<Item = (PoolId, Tier)> + '_ {
        self.primary
            .iter()
            .map(|&p| (p, Tier::Primary))
            .chain(self.preferred.iter().map(|&p| (p, Tier::Preferred)))
            .chain(self.secondary.iter().map(|&p| (p, Tier::Secondary)))
    }
}

/// Type-to-pool eligibility with overflow costs `u(type, pool)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityMap {
    tiers: BTreeMap<TypeId, TypeTiers>,
    costs: TierCosts,
}

impl CompatibilityMap {
    pub fn new(
        tiers: BTreeMap<TypeId, TypeTiers>,
        costs: TierCosts,
    ) -> Result<Self, DomainError> {
        if !(costs.preferred > 0.0 && costs.preferred.is_finite())
            || !(costs.secondary > 0.0 && costs.secondary.is_finite())
        {
            return Err(DomainError::NonPositiveOverflowCost);
        }
        for (&ty, t) in &tiers {
            if t.primary.is_empty() {
                return Err(DomainError::NoPrimaryPool(ty));
            }
            let mut seen = BTreeSet::new();
            for (pool, _) in t.pools() {
                if !seen.insert(pool) {
                    return Err(DomainError::OverlappingTiers { ty, pool });
                }
            }
        }
        Ok(CompatibilityMap { tiers, costs })
    }

    pub fn tiers(&self, ty: TypeId) -> Option<&TypeTiers> {
        self.tiers.get(&ty)
    }

    pub fn tier(&self, ty: TypeId, pool: PoolId) -> Option<Tier> {
        self.tiers.get(&ty).and_then(|t| t.tier_of(pool))
    }

    /// Overflow cost of sending a patient of `ty` to `pool`, `None` when
    /// the pool is not eligible.
    pub fn cost(&self, ty: TypeId, pool: PoolId) -> Option<f64> {
        self.tier(ty, pool).map(|t| self.costs.cost(t))
    }

    pub fn costs(&self) -> TierCosts {
        self.costs
    }

    pub fn types(&self) -> impl Iterator<Item = (TypeId, &TypeTiers)> {
        self.tiers.iter().map(|(&k, v)| (k, v))
    }
}

/// Static ward structure: pools, types, and their compatibility.
#[derive(Debug, Clone)]
pub struct Hospital {
    pools: Vec<BedPool>,
    types: Vec<PatientType>,
    compat: CompatibilityMap,
    pool_index: BTreeMap<PoolId, usize>,
    type_index: BTreeMap<TypeId, usize>,
}

impl Hospital {
    pub fn new(
        pools: Vec<BedPool>,
        types: Vec<PatientType>,
        compat: CompatibilityMap,
    ) -> Result<Self, DomainError> {
        let mut pool_index = BTreeMap::new();
        for (k, p) in pools.iter().enumerate() {
            if p.capacity == 0 {
                return Err(DomainError::EmptyPool(p.id));
            }
            if pool_index.insert(p.id, k).is_some() {
                return Err(DomainError::DuplicatePool(p.id));
            }
        }
        let mut type_index = BTreeMap::new();
        let mut combos = BTreeSet::new();
        for (k, t) in types.iter().enumerate() {
            if type_index.insert(t.id, k).is_some() {
                return Err(DomainError::DuplicateType(t.id));
            }
            if !combos.insert((t.specialty, t.gender, t.class)) {
                return Err(DomainError::DuplicateTypeCombination(t.id));
            }
            if compat.tiers(t.id).is_none() {
                return Err(DomainError::MissingTiers(t.id));
            }
        }
        for (ty, tiers) in compat.types() {
            if !type_index.contains_key(&ty) {
                return Err(DomainError::UnknownType(ty));
            }
            for (pool, _) in tiers.pools() {
                let Some(&k) = pool_index.get(&pool) else {
                    return Err(DomainError::UnknownPool(pool));
                };
                let gender = types[type_index[&ty]].gender;
                if !pools[k].gender_label.admits(gender) {
                    return Err(DomainError::GenderMismatch { ty, pool });
                }
            }
        }
        Ok(Hospital {
            pools,
            types,
            compat,
            pool_index,
            type_index,
        })
    }

    pub fn pools(&self) -> &[BedPool] {
        &self.pools
    }

    pub fn types(&self) -> &[PatientType] {
        &self.types
    }

    pub fn compat(&self) -> &CompatibilityMap {
        &self.compat
    }

    pub fn pool(&self, id: PoolId) -> Option<&BedPool> {
        self.pool_index.get(&id).map(|&k| &self.pools[k])
    }

    pub fn patient_type(&self, id: TypeId) -> Option<&PatientType> {
        self.type_index.get(&id).map(|&k| &self.types[k])
    }

    pub fn total_beds(&self) -> u32 {
        self.pools.iter().map(|p| p.capacity).sum()
    }
}

/// A patient waiting for a bed at a decision iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct BoardedPatient {
    pub id: PatientId,
    pub type_id: TypeId,
    /// Time the request entered the queue (`a_i`).
    pub request_time: Minutes,
    /// Delay target `tau_i`, strictly positive.
    pub delay_target: Minutes,
    pub source: Source,
}

/// When a candidate bed becomes available.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Availability {
    /// Free at the given time; the availability time is deterministic.
    Now(Minutes),
    /// Occupied with a discharge scheduled on the given day; the hour follows
    /// the discharge-hour distribution.
    Later { day: i64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateBed {
    pub id: BedId,
    pub pool: PoolId,
    pub availability: Availability,
}

impl CandidateBed {
    pub fn is_available_now(&self) -> bool {
        matches!(self.availability, Availability::Now(_))
    }
}

/// `ln P(d_j - a_i <= tau_i)`, with probability zero carried as an explicit
/// flag rather than a float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogWeight {
    Finite(f64),
    Impossible,
}

impl LogWeight {
    pub fn from_probability(p: f64) -> LogWeight {
        if p > 0.0 {
            LogWeight::Finite(libm::log(p.min(1.0)))
        } else {
            LogWeight::Impossible
        }
    }

    pub fn is_impossible(self) -> bool {
        matches!(self, LogWeight::Impossible)
    }

    /// The extended-real value (`-inf` when impossible).
    pub fn value(self) -> f64 {
        match self {
            LogWeight::Finite(w) => w,
            LogWeight::Impossible => f64::NEG_INFINITY,
        }
    }

    pub fn finite_part(self) -> f64 {
        match self {
            LogWeight::Finite(w) => w,
            LogWeight::Impossible => 0.0,
        }
    }
}

/// Eligible pairing of a patient with a bed (`j in J_i`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Index into [`AssignmentInstance::beds`].
    pub bed: usize,
    pub weight: LogWeight,
    pub cost: f64,
}

/// One decision iteration's assignment problem.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentInstance {
    pub patients: Vec<BoardedPatient>,
    pub beds: Vec<CandidateBed>,
    /// `edges[i]` lists the eligible beds of patient `i`, sorted by bed index.
    pub edges: Vec<Vec<Edge>>,
    /// Overflow budget `B`; `f64::INFINITY` disables the constraint.
    pub budget: f64,
}

impl AssignmentInstance {
    pub fn edge(&self, patient: usize, bed: usize) -> Option<&Edge> {
        let list = self.edges.get(patient)?;
        list.binary_search_by_key(&bed, |e| e.bed)
            .ok()
            .map(|k| &list[k])
    }

    pub fn with_budget(mut self, budget: f64) -> Self {
        self.budget = budget;
        self
    }

    pub fn has_impossible_edges(&self) -> bool {
        self.edges
            .iter()
            .flatten()
            .any(|e| e.weight.is_impossible())
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }
}

/// Structural problems found by [`validate_instance`].
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceViolation {
    EdgeListMismatch { patients: usize, edge_lists: usize },
    DuplicatePatientId(PatientId),
    DuplicateBedId(BedId),
    NonPositiveDelayTarget(PatientId),
    EmptyEligibleSet(PatientId),
    BedIndexOutOfRange { patient: PatientId, bed: usize },
    UnsortedOrDuplicateEdge { patient: PatientId, bed: usize },
    NegativeCost { patient: PatientId, bed: BedId },
    InvalidCost { patient: PatientId, bed: BedId },
    InvalidWeight { patient: PatientId, bed: BedId },
    NegativeBudget,
    UnusedBed(BedId),
}

impl fmt::Display for InstanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use InstanceViolation::*;
        match self {
            EdgeListMismatch {
                patients,
                edge_lists,
            } => write!(f, "{patients} patients but {edge_lists} edge lists"),
            DuplicatePatientId(id) => write!(f, "duplicate patient id {id}"),
            DuplicateBedId(id) => write!(f, "duplicate bed id {id}"),
            NonPositiveDelayTarget(id) => write!(f, "patient {id} has a non-positive delay target"),
            EmptyEligibleSet(id) => write!(f, "patient {id} has an empty eligible set"),
            BedIndexOutOfRange { patient, bed } => {
                write!(f, "patient {patient} references bed index {bed} out of range")
            }
            UnsortedOrDuplicateEdge { patient, bed } => {
                write!(f, "patient {patient} lists bed index {bed} out of order or twice")
            }
            NegativeCost { patient, bed } => {
                write!(f, "negative cost on edge ({patient}, {bed})")
            }
            InvalidCost { patient, bed } => write!(f, "non-finite cost on edge ({patient}, {bed})"),
            InvalidWeight { patient, bed } => {
                write!(f, "log weight on edge ({patient}, {bed}) is positive or NaN")
            }
            NegativeBudget => f.write_str("negative or NaN budget"),
            UnusedBed(id) => write!(f, "bed {id} is not eligible for any patient"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainError {
    Invalid(InstanceViolation),
    /// A plan does not have one bed per patient.
    PlanLength { expected: usize, found: usize },
    /// A plan references a bed index the instance does not have.
    UnknownBed(usize),
    /// A plan pairs a patient with a bed outside its eligible set.
    IneligiblePair { patient: usize, bed: usize },
    EmptyPool(PoolId),
    DuplicatePool(PoolId),
    DuplicateType(TypeId),
    DuplicateTypeCombination(TypeId),
    MissingTiers(TypeId),
    UnknownType(TypeId),
    UnknownPool(PoolId),
    NoPrimaryPool(TypeId),
    OverlappingTiers { ty: TypeId, pool: PoolId },
    GenderMismatch { ty: TypeId, pool: PoolId },
    NonPositiveOverflowCost,
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DomainError::*;
        match self {
            Invalid(v) => write!(f, "invalid instance: {v}"),
            PlanLength { expected, found } => {
                write!(f, "plan assigns {found} patients, instance has {expected}")
            }
            UnknownBed(b) => write!(f, "plan references unknown bed index {b}"),
            IneligiblePair { patient, bed } => {
                write!(f, "bed {bed} is not eligible for patient {patient}")
            }
            EmptyPool(p) => write!(f, "pool {p} has zero capacity"),
            DuplicatePool(p) => write!(f, "duplicate pool id {p}"),
            DuplicateType(t) => write!(f, "duplicate patient type id {t}"),
            DuplicateTypeCombination(t) => {
                write!(f, "type {t} repeats a (specialty, gender, class) combination")
            }
            MissingTiers(t) => write!(f, "type {t} has no compatibility entry"),
            UnknownType(t) => write!(f, "compatibility entry for unknown type {t}"),
            UnknownPool(p) => write!(f, "compatibility references unknown pool {p}"),
            NoPrimaryPool(t) => write!(f, "type {t} has no primary pool"),
            OverlappingTiers { ty, pool } => {
                write!(f, "pool {pool} appears in more than one tier of type {ty}")
            }
            GenderMismatch { ty, pool } => {
                write!(f, "pool {pool} does not admit the gender of type {ty}")
            }
            NonPositiveOverflowCost => f.write_str("non-primary tier costs must be positive"),
        }
    }
}

impl core::error::Error for DomainError {}

impl From<InstanceViolation> for DomainError {
    fn from(v: InstanceViolation) -> Self {
        DomainError::Invalid(v)
    }
}

/// Checks the structural invariants of an instance and reports the first
/// violation found.
pub fn validate_instance(inst: &AssignmentInstance) -> Result<(), InstanceViolation> {
    use InstanceViolation::*;
    if inst.edges.len() != inst.patients.len() {
        return Err(EdgeListMismatch {
            patients: inst.patients.len(),
            edge_lists: inst.edges.len(),
        });
    }
    if inst.budget.is_nan() || inst.budget < 0.0 {
        return Err(NegativeBudget);
    }
    let mut ids = BTreeSet::new();
    for p in &inst.patients {
        if !ids.insert(p.id) {
            return Err(DuplicatePatientId(p.id));
        }
    }
    let mut bed_ids = BTreeSet::new();
    for b in &inst.beds {
        if !bed_ids.insert(b.id) {
            return Err(DuplicateBedId(b.id));
        }
    }
    let mut used = alloc::vec![false; inst.beds.len()];
    for (p, edges) in inst.patients.iter().zip(&inst.edges) {
        if p.delay_target.0 <= 0 {
            return Err(NonPositiveDelayTarget(p.id));
        }
        if edges.is_empty() {
            return Err(EmptyEligibleSet(p.id));
        }
        let mut prev: Option<usize> = None;
        for e in edges {
            if e.bed >= inst.beds.len() {
                return Err(BedIndexOutOfRange {
                    patient: p.id,
                    bed: e.bed,
                });
            }
            if prev.is_some_and(|q| q >= e.bed) {
                return Err(UnsortedOrDuplicateEdge {
                    patient: p.id,
                    bed: e.bed,
                });
            }
            prev = Some(e.bed);
            let bed = inst.beds[e.bed].id;
            if e.cost.is_nan() || e.cost.is_infinite() {
                return Err(InvalidCost { patient: p.id, bed });
            }
            if e.cost < 0.0 {
                return Err(NegativeCost { patient: p.id, bed });
            }
            if let LogWeight::Finite(w) = e.weight {
                if w.is_nan() || w > 0.0 {
                    return Err(InvalidWeight { patient: p.id, bed });
                }
            }
            used[e.bed] = true;
        }
    }
    if let Some(k) = used.iter().position(|u| !u) {
        return Err(UnusedBed(inst.beds[k].id));
    }
    Ok(())
}

/// Extended-real objective `V(z)` kept in symbolic form: the number of
/// pairings with zero probability, and the sum of the finite log weights.
///
/// Plans with fewer impossible pairings rank higher; ties are broken by the
/// finite sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub impossible: usize,
    pub finite: f64,
}

impl Objective {
    pub const ZERO: Objective = Objective {
        impossible: 0,
        finite: 0.0,
    };

    pub fn value(&self) -> f64 {
        if self.impossible > 0 {
            f64::NEG_INFINITY
        } else {
            self.finite
        }
    }

    /// Orders objectives, treating finite parts within `tol` as equal.
    pub fn compare(&self, other: &Objective, tol: f64) -> Ordering {
        match other.impossible.cmp(&self.impossible) {
            Ordering::Equal => {
                let scale = 1.0f64.max(self.finite.abs()).max(other.finite.abs());
                let d = self.finite - other.finite;
                if d.abs() <= tol * scale {
                    Ordering::Equal
                } else if d > 0.0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            o => o,
        }
    }
}

/// A full assignment of patients to beds.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentPlan {
    /// `bed_of[i]` is the bed index assigned to patient `i`.
    pub bed_of: Vec<usize>,
    pub objective: Objective,
    pub total_cost: f64,
}

impl AssignmentPlan {
    /// Builds a plan from per-patient bed indices, computing objective and
    /// cost. Fails on ineligible pairs; does not check bed exclusivity or the
    /// budget (see [`is_admissible`]).
    pub fn evaluate(inst: &AssignmentInstance, bed_of: Vec<usize>) -> Result<Self, DomainError> {
        if bed_of.len() != inst.patients.len() {
            return Err(DomainError::PlanLength {
                expected: inst.patients.len(),
                found: bed_of.len(),
            });
        }
        let mut objective = Objective::ZERO;
        let mut total_cost = 0.0;
        for (i, &b) in bed_of.iter().enumerate() {
            if b >= inst.beds.len() {
                return Err(DomainError::UnknownBed(b));
            }
            let e = inst
                .edge(i, b)
                .ok_or(DomainError::IneligiblePair { patient: i, bed: b })?;
            match e.weight {
                LogWeight::Finite(w) => objective.finite += w,
                LogWeight::Impossible => objective.impossible += 1,
            }
            total_cost += e.cost;
        }
        Ok(AssignmentPlan {
            bed_of,
            objective,
            total_cost,
        })
    }

    /// `(patient index, bed index)` pairs in patient order.
    pub fn matches(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bed_of.iter().copied().enumerate()
    }

    pub fn patient_on(&self, bed: usize) -> Option<usize> {
        self.bed_of.iter().position(|&b| b == bed)
    }
}

/// Whether `plan` assigns every patient to exactly one eligible bed, uses
/// each bed at most once, and stays within the budget.
pub fn is_admissible(inst: &AssignmentInstance, plan: &AssignmentPlan) -> Result<bool, DomainError> {
    if plan.bed_of.len() != inst.patients.len() {
        return Err(DomainError::PlanLength {
            expected: inst.patients.len(),
            found: plan.bed_of.len(),
        });
    }
    if let Some(&b) = plan.bed_of.iter().find(|&&b| b >= inst.beds.len()) {
        return Err(DomainError::UnknownBed(b));
    }
    let mut used = alloc::vec![false; inst.beds.len()];
    let mut cost = 0.0;
    for (i, &b) in plan.bed_of.iter().enumerate() {
        let Some(e) = inst.edge(i, b) else {
            return Ok(false);
        };
        if core::mem::replace(&mut used[b], true) {
            return Ok(false);
        }
        cost += e.cost;
    }
    Ok(cost <= inst.budget + BUDGET_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    pub(crate) fn patient(id: u64, a: i64) -> BoardedPatient {
        BoardedPatient {
            id: PatientId(id),
            type_id: TypeId(1),
            request_time: Minutes(a),
            delay_target: Minutes::from_hours(10),
            source: Source::Ed,
        }
    }

    fn bed(id: u32) -> CandidateBed {
        CandidateBed {
            id: BedId(id),
            pool: PoolId(1),
            availability: Availability::Now(Minutes(0)),
        }
    }

    fn edge(bed: usize, cost: f64) -> Edge {
        Edge {
            bed,
            weight: LogWeight::Finite(0.0),
            cost,
        }
    }

    #[test]
    fn minimal_instance_is_valid() {
        let inst = AssignmentInstance {
            patients: vec![patient(1, 0)],
            beds: vec![bed(1)],
            edges: vec![vec![edge(0, 0.0)]],
            budget: 0.0,
        };
        assert_eq!(validate_instance(&inst), Ok(()));
    }

    #[test]
    fn empty_eligible_set_is_reported() {
        let inst = AssignmentInstance {
            patients: vec![patient(1, 0), patient(2, 0)],
            beds: vec![bed(1)],
            edges: vec![vec![edge(0, 0.0)], vec![]],
            budget: 0.0,
        };
        let v = validate_instance(&inst).unwrap_err();
        assert_eq!(v, InstanceViolation::EmptyEligibleSet(PatientId(2)));
        assert!(alloc::format!("{v}").contains("empty eligible set"));
    }

    #[test]
    fn negative_cost_is_reported() {
        let inst = AssignmentInstance {
            patients: vec![patient(1, 0)],
            beds: vec![bed(1)],
            edges: vec![vec![edge(0, -1.0)]],
            budget: 0.0,
        };
        let v = validate_instance(&inst).unwrap_err();
        assert!(matches!(v, InstanceViolation::NegativeCost { .. }));
        assert!(alloc::format!("{v}").contains("negative cost"));
    }

    #[test]
    fn other_violations() {
        let base = AssignmentInstance {
            patients: vec![patient(1, 0)],
            beds: vec![bed(1), bed(2)],
            edges: vec![vec![edge(0, 0.0), edge(1, 1.0)]],
            budget: 0.0,
        };
        let mut i = base.clone();
        i.budget = -1.0;
        assert_eq!(validate_instance(&i), Err(InstanceViolation::NegativeBudget));
        let mut i = base.clone();
        i.beds[1].id = BedId(1);
        assert_eq!(validate_instance(&i), Err(InstanceViolation::DuplicateBedId(BedId(1))));
        let mut i = base.clone();
        i.edges[0].pop();
        assert_eq!(validate_instance(&i), Err(InstanceViolation::UnusedBed(BedId(2))));
        let mut i = base.clone();
        i.edges[0][1].weight = LogWeight::Finite(0.5);
        assert!(matches!(
            validate_instance(&i),
            Err(InstanceViolation::InvalidWeight { .. })
        ));
        let mut i = base;
        i.patients[0].delay_target = Minutes(0);
        assert!(matches!(
            validate_instance(&i),
            Err(InstanceViolation::NonPositiveDelayTarget(_))
        ));
    }

    fn two_by_two(budget: f64) -> AssignmentInstance {
        AssignmentInstance {
            patients: vec![patient(1, 0), patient(2, 0)],
            beds: vec![bed(1), bed(2)],
            edges: vec![
                vec![edge(0, 0.0), edge(1, 1.0)],
                vec![edge(0, 0.0), edge(1, 1.0)],
            ],
            budget,
        }
    }

    #[test]
    fn admissibility() {
        let inst = two_by_two(1.0);
        let ok = AssignmentPlan::evaluate(&inst, vec![0, 1]).unwrap();
        assert_eq!(is_admissible(&inst, &ok), Ok(true));
        let shared = AssignmentPlan::evaluate(&inst, vec![0, 0]).unwrap();
        assert_eq!(is_admissible(&inst, &shared), Ok(false));
        // total cost = B + 1
        let over = AssignmentPlan::evaluate(&inst, vec![1, 0]).unwrap();
        assert_eq!(is_admissible(&inst.clone().with_budget(0.0), &over), Ok(false));
        let bad = AssignmentPlan {
            bed_of: vec![0, 7],
            objective: Objective::ZERO,
            total_cost: 0.0,
        };
        assert_eq!(is_admissible(&inst, &bad), Err(DomainError::UnknownBed(7)));
    }

    #[test]
    fn objective_ordering() {
        let a = Objective {
            impossible: 0,
            finite: -5.0,
        };
        let b = Objective {
            impossible: 1,
            finite: 0.0,
        };
        assert_eq!(a.compare(&b, 1e-9), Ordering::Greater);
        assert_eq!(b.value(), f64::NEG_INFINITY);
        let c = Objective {
            impossible: 0,
            finite: -5.0 + 1e-12,
        };
        assert_eq!(a.compare(&c, 1e-9), Ordering::Equal);
    }

    #[test]
    fn gender_labels() {
        assert!(GenderLabel::GenderNeutral.admits(Gender::Female));
        assert!(!GenderLabel::MaleOnly.admits(Gender::Female));
    }

    #[test]
    fn compatibility_rejects_overlap_and_missing_primary() {
        let mut tiers = BTreeMap::new();
        tiers.insert(
            TypeId(1),
            TypeTiers {
                primary: vec![PoolId(1)],
                preferred: vec![PoolId(1)],
                secondary: vec![],
            },
        );
        assert!(matches!(
            CompatibilityMap::new(tiers, TierCosts::default()),
            Err(DomainError::OverlappingTiers { .. })
        ));
        let mut tiers = BTreeMap::new();
        tiers.insert(TypeId(1), TypeTiers::default());
        assert_eq!(
            CompatibilityMap::new(tiers, TierCosts::default()),
            Err(DomainError::NoPrimaryPool(TypeId(1)))
        );
    }

    #[test]
    fn costs_are_zero_only_on_primary() {
        let mut tiers = BTreeMap::new();
        tiers.insert(
            TypeId(1),
            TypeTiers {
                primary: vec![PoolId(1)],
                preferred: vec![PoolId(2)],
                secondary: vec![PoolId(3)],
            },
        );
        let map = CompatibilityMap::new(
            tiers,
            TierCosts {
                preferred: 1.0,
                secondary: 2.0,
            },
        )
        .unwrap();
        assert_eq!(map.cost(TypeId(1), PoolId(1)), Some(0.0));
        assert_eq!(map.cost(TypeId(1), PoolId(2)), Some(1.0));
        assert_eq!(map.cost(TypeId(1), PoolId(3)), Some(2.0));
        assert_eq!(map.cost(TypeId(1), PoolId(4)), None);
    }
}
