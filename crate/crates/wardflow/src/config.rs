//! Hospital configuration: a single JSON document holding the ward layout,
//! patient mix, length-of-stay moments, arrival curves, discharge curve and
//! allocation delays.
//!
//! [`HospitalConfig`] is the raw, serde-facing schema. [`Scenario`] is the
//! validated form the engine runs on.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use wardflow_core::policies::PModelParams;
use wardflow_core::probability::LengthOfStayLaw;
use wardflow_core::rates::{ArrivalIntensity, DailyBatch};
use wardflow_core::solver::BudgetParams;
use wardflow_core::time::Weekday;
use wardflow_core::{
    AccommodationClass, BedPool, CompatibilityMap, DischargeHourDistribution, Gender,
    GenderLabel, Hospital, Minutes, PatientType, PoolId, Source, Specialty, TierCosts, TypeId,
    TypeTiers,
};

pub const SCHEMA_VERSION: u32 = 1;
const SHARE_TOLERANCE: f64 = 1e-9;

/// The reference configuration shipped with the crate.
pub const REFERENCE_JSON: &str = include_str!("../data/reference.json");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid value for `{key}`: {message}")]
    Semantic { key: String, message: String },
}

fn semantic(key: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Semantic {
        key: key.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HospitalConfig {
    pub version: u32,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub tier_costs: TierCosts,
    pub pools: Vec<PoolSpec>,
    pub types: Vec<TypeSpec>,
    pub arrivals: ArrivalSpec,
    /// Specialty shares of requests from each source.
    pub specialty_mix: BTreeMap<Source, BTreeMap<Specialty, f64>>,
    /// Requested accommodation class shares within each specialty.
    pub class_mix: BTreeMap<Specialty, BTreeMap<AccommodationClass, f64>>,
    pub gender_mix: BTreeMap<Specialty, BTreeMap<Gender, f64>>,
    /// Sources whose surgical B2 requests go to the elective surgical pools.
    #[serde(default)]
    pub elective_b2_sources: Vec<Source>,
    pub length_of_stay: BTreeMap<Specialty, LosRow>,
    /// Relative frequency of each discharge hour.
    pub discharge_hours: [f64; 24],
    pub pre_allocation: DelayCurve,
    pub post_allocation: DelayCurve,
    pub simulation: SimulationSpec,
    #[serde(default)]
    pub pmodel: PModelSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolSpec {
    pub id: u16,
    pub specialty: Specialty,
    pub gender: GenderLabel,
    pub class: AccommodationClass,
    pub capacity: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeSpec {
    pub id: u16,
    pub specialty: Specialty,
    pub gender: Gender,
    pub class: AccommodationClass,
    pub primary: Vec<u16>,
    #[serde(default)]
    pub preferred: Vec<u16>,
    #[serde(default)]
    pub secondary: Vec<u16>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrivalSpec {
    /// Mean requests per day over all sources, averaged over the week.
    pub daily_requests: f64,
    pub source_shares: BTreeMap<Source, f64>,
    /// Relative hourly profile for sources arriving as a Poisson stream.
    /// Sources without a profile arrive as one batch per day.
    pub hourly_profile: BTreeMap<Source, [f64; 24]>,
    pub batch_hour: u8,
    #[serde(default)]
    pub closed_weekdays: BTreeMap<Source, Vec<Weekday>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Moments {
    pub mean: f64,
    pub sd: f64,
}

/// A length-of-stay entry: moments, or an empirical pmf over nights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LosEntry {
    Moments(Moments),
    Empirical { pmf: Vec<f64> },
}

impl LosEntry {
    pub fn law(&self) -> LengthOfStayLaw {
        match self {
            LosEntry::Moments(m) => LengthOfStayLaw::Moments {
                mean: m.mean,
                sd: m.sd,
            },
            LosEntry::Empirical { pmf } => LengthOfStayLaw::Empirical(pmf.clone()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LosRow {
    pub ed_am: Option<LosEntry>,
    pub ed_pm: Option<LosEntry>,
    pub sda: Option<LosEntry>,
    pub el: Option<LosEntry>,
    pub soc: Option<LosEntry>,
}

/// Which length-of-stay column applies to an admission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LosColumn {
    EdAm,
    EdPm,
    Sda,
    El,
    Soc,
}

impl LosColumn {
    pub const ALL: [LosColumn; 5] = [
        LosColumn::EdAm,
        LosColumn::EdPm,
        LosColumn::Sda,
        LosColumn::El,
        LosColumn::Soc,
    ];

    /// ED admissions split at noon; other sources have a single column.
    pub fn for_admission(source: Source, admitted_before_noon: bool) -> LosColumn {
        match source {
            Source::Ed if admitted_before_noon => LosColumn::EdAm,
            Source::Ed => LosColumn::EdPm,
            Source::Sda => LosColumn::Sda,
            Source::El => LosColumn::El,
            Source::Soc => LosColumn::Soc,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LosColumn::EdAm => "ed_am",
            LosColumn::EdPm => "ed_pm",
            LosColumn::Sda => "sda",
            LosColumn::El => "el",
            LosColumn::Soc => "soc",
        }
    }
}

impl LosRow {
    pub fn get(&self, col: LosColumn) -> Option<&LosEntry> {
        match col {
            LosColumn::EdAm => self.ed_am.as_ref(),
            LosColumn::EdPm => self.ed_pm.as_ref(),
            LosColumn::Sda => self.sda.as_ref(),
            LosColumn::El => self.el.as_ref(),
            LosColumn::Soc => self.soc.as_ref(),
        }
    }
}

/// Log-normal delay parameters by hour of day, in hours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelayCurve {
    pub mean_hours: [f64; 24],
    pub sd_hours: [f64; 24],
}

impl DelayCurve {
    pub fn zero() -> Self {
        DelayCurve {
            mean_hours: [0.0; 24],
            sd_hours: [0.0; 24],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    pub horizon_days: u32,
    pub warmup_days: u32,
    pub seeds: Vec<u64>,
    #[serde(default = "default_batches")]
    pub batches: usize,
}

fn default_batches() -> usize {
    30
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PModelSpec {
    pub delay_target_hours: f64,
    pub lead_minutes: i64,
    pub max_extra_days: u32,
}

impl Default for PModelSpec {
    fn default() -> Self {
        PModelSpec {
            delay_target_hours: 10.0,
            lead_minutes: 30,
            max_extra_days: 3,
        }
    }
}

impl PModelSpec {
    pub fn params(&self, budget: BudgetParams) -> PModelParams {
        let mut p = PModelParams::new(budget);
        p.delay_target = Minutes::from_hours_f64(self.delay_target_hours);
        p.lead = Minutes(self.lead_minutes);
        p.max_extra_days = self.max_extra_days;
        p
    }
}

/// How requests from one source are generated.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceArrivals {
    /// Periodic Poisson stream with these hourly rates (requests per hour).
    Stream { hourly: [f64; 24] },
    /// One Poisson-sized batch per day at `minute_of_day`.
    Batch {
        minute_of_day: i64,
        mean_by_weekday: [f64; 7],
    },
}

/// Cumulative type distribution for one source.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeMix {
    pub types: Vec<TypeId>,
    pub cumulative: Vec<f64>,
}

impl TypeMix {
    /// Inverts a uniform draw.
    pub fn sample(&self, u: f64) -> TypeId {
        let k = self.cumulative.partition_point(|&c| c <= u);
        self.types[k.min(self.types.len() - 1)]
    }
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub hospital: Hospital,
    pub discharge: DischargeHourDistribution,
    pub sources: BTreeMap<Source, SourceArrivals>,
    /// Combined intensity of all sources, for budget look-ahead.
    pub intensity: ArrivalIntensity,
    pub type_mix: BTreeMap<Source, TypeMix>,
    /// Length-of-stay law by (type, column).
    pub los: BTreeMap<(TypeId, LosColumn), LengthOfStayLaw>,
    pub pre_allocation: DelayCurve,
    pub post_allocation: DelayCurve,
    pub simulation: SimulationSpec,
    pub pmodel: PModelSpec,
}

impl HospitalConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn reference() -> Self {
        Self::from_json(REFERENCE_JSON).expect("reference config parses")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<Scenario, ConfigError> {
        if self.version != SCHEMA_VERSION {
            return Err(semantic(
                "version",
                format!("expected {SCHEMA_VERSION}, got {}", self.version),
            ));
        }
        let hospital = self.build_hospital()?;
        let discharge = DischargeHourDistribution::from_weights(self.discharge_hours)
            .map_err(|e| semantic("discharge_hours", e.to_string()))?;
        let (sources, intensity) = self.build_arrivals()?;
        let type_mix = self.build_type_mix(&hospital, &sources)?;
        let los = self.build_los(&hospital, &type_mix)?;
        check_delays("pre_allocation", &self.pre_allocation)?;
        check_delays("post_allocation", &self.post_allocation)?;
        let sim = &self.simulation;
        if sim.horizon_days > 0 && sim.warmup_days >= sim.horizon_days {
            return Err(semantic(
                "simulation.warmup_days",
                "must be below horizon_days",
            ));
        }
        let pm = &self.pmodel;
        if !(pm.delay_target_hours > 0.0 && pm.delay_target_hours.is_finite()) {
            return Err(semantic("pmodel.delay_target_hours", "must be positive"));
        }
        if pm.lead_minutes < 0 {
            return Err(semantic("pmodel.lead_minutes", "must be nonnegative"));
        }
        Ok(Scenario {
            hospital,
            discharge,
            sources,
            intensity,
            type_mix,
            los,
            pre_allocation: self.pre_allocation.clone(),
            post_allocation: self.post_allocation.clone(),
            simulation: self.simulation.clone(),
            pmodel: self.pmodel,
        })
    }

    fn build_hospital(&self) -> Result<Hospital, ConfigError> {
        let mut pools = Vec::with_capacity(self.pools.len());
        for (k, p) in self.pools.iter().enumerate() {
            if p.capacity < 1 || p.capacity > i64::from(u32::MAX) {
                return Err(semantic(
                    format!("pools[{k}].capacity"),
                    format!("must be a positive bed count, got {}", p.capacity),
                ));
            }
            pools.push(BedPool {
                id: PoolId(p.id),
                specialty: p.specialty,
                gender_label: p.gender,
                class: p.class,
                capacity: p.capacity as u32,
            });
        }
        let mut types = Vec::with_capacity(self.types.len());
        let mut tiers = BTreeMap::new();
        for t in &self.types {
            let mut sources: Vec<Source> = self
                .specialty_mix
                .iter()
                .filter(|(_, mix)| mix.get(&base_specialty(t.specialty)).is_some_and(|&p| p > 0.0))
                .map(|(&s, _)| s)
                .collect();
            if t.specialty == Specialty::SurgeryElective {
                sources.retain(|s| self.elective_b2_sources.contains(s));
            } else if t.specialty == Specialty::Surgery && t.class == AccommodationClass::B2 {
                sources.retain(|s| !self.elective_b2_sources.contains(s));
            }
            types.push(PatientType {
                id: TypeId(t.id),
                specialty: t.specialty,
                gender: t.gender,
                class: t.class,
                sources,
            });
            let ids = |v: &[u16]| v.iter().map(|&p| PoolId(p)).collect::<Vec<_>>();
            tiers.insert(
                TypeId(t.id),
                TypeTiers {
                    primary: ids(&t.primary),
                    preferred: ids(&t.preferred),
                    secondary: ids(&t.secondary),
                },
            );
        }
        let compat = CompatibilityMap::new(tiers, self.tier_costs)
            .map_err(|e| semantic("types", e.to_string()))?;
        Hospital::new(pools, types, compat).map_err(|e| semantic("pools/types", e.to_string()))
    }

    fn build_arrivals(
        &self,
    ) -> Result<(BTreeMap<Source, SourceArrivals>, ArrivalIntensity), ConfigError> {
        let a = &self.arrivals;
        if !(a.daily_requests >= 0.0 && a.daily_requests.is_finite()) {
            return Err(semantic(
                "arrivals.daily_requests",
                "must be a nonnegative number",
            ));
        }
        check_shares(
            "arrivals.source_shares",
            a.source_shares.values().copied(),
        )?;
        if a.batch_hour > 23 {
            return Err(semantic("arrivals.batch_hour", "must be an hour of day"));
        }
        let mut sources = BTreeMap::new();
        let mut intensity = ArrivalIntensity::zero();
        for (&src, &share) in &a.source_shares {
            let per_day = a.daily_requests * share;
            let closed = a.closed_weekdays.get(&src).cloned().unwrap_or_default();
            if let Some(profile) = a.hourly_profile.get(&src) {
                if !closed.is_empty() {
                    return Err(semantic(
                        format!("arrivals.closed_weekdays.{}", src.name()),
                        "only batch sources can have closed weekdays",
                    ));
                }
                let total: f64 = profile.iter().sum();
                if profile.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || total <= 0.0 {
                    return Err(semantic(
                        format!("arrivals.hourly_profile.{}", src.name()),
                        "weights must be nonnegative with a positive sum",
                    ));
                }
                let mut hourly = [0.0; 24];
                for h in 0..24 {
                    hourly[h] = per_day * profile[h] / total;
                    intensity.hourly[h] += hourly[h];
                }
                sources.insert(src, SourceArrivals::Stream { hourly });
            } else {
                let open = 7 - closed.len();
                if open == 0 {
                    return Err(semantic(
                        format!("arrivals.closed_weekdays.{}", src.name()),
                        "source is closed every day",
                    ));
                }
                // the weekly total is spread over the open days
                let mut mean_by_weekday = [0.0; 7];
                for d in Weekday::ALL {
                    if !closed.contains(&d) {
                        mean_by_weekday[d.index()] = per_day * 7.0 / open as f64;
                    }
                }
                let minute_of_day = i64::from(a.batch_hour) * 60;
                intensity.batches.push(DailyBatch {
                    minute_of_day,
                    mean_by_weekday,
                });
                sources.insert(
                    src,
                    SourceArrivals::Batch {
                        minute_of_day,
                        mean_by_weekday,
                    },
                );
            }
        }
        for src in a.hourly_profile.keys() {
            if !a.source_shares.contains_key(src) {
                return Err(semantic(
                    format!("arrivals.hourly_profile.{}", src.name()),
                    "source has no share",
                ));
            }
        }
        Ok((sources, intensity))
    }

    fn build_type_mix(
        &self,
        hospital: &Hospital,
        sources: &BTreeMap<Source, SourceArrivals>,
    ) -> Result<BTreeMap<Source, TypeMix>, ConfigError> {
        let mut by_combo = BTreeMap::new();
        for t in hospital.types() {
            by_combo.insert((t.specialty, t.gender, t.class), t.id);
        }
        for (sp, mix) in &self.class_mix {
            check_shares(format!("class_mix.{sp}"), mix.values().copied())?;
        }
        for (sp, mix) in &self.gender_mix {
            check_shares(format!("gender_mix.{sp}"), mix.values().copied())?;
        }
        let mut out = BTreeMap::new();
        for &src in sources.keys() {
            let mix = self.specialty_mix.get(&src).ok_or_else(|| {
                semantic(
                    format!("specialty_mix.{}", src.name()),
                    "missing for a source with a share",
                )
            })?;
            check_shares(
                format!("specialty_mix.{}", src.name()),
                mix.values().copied(),
            )?;
            let mut weights: BTreeMap<TypeId, f64> = BTreeMap::new();
            for (&sp, &p_sp) in mix {
                if p_sp == 0.0 {
                    continue;
                }
                let classes = self
                    .class_mix
                    .get(&sp)
                    .ok_or_else(|| semantic(format!("class_mix.{sp}"), "missing"))?;
                let genders = self
                    .gender_mix
                    .get(&sp)
                    .ok_or_else(|| semantic(format!("gender_mix.{sp}"), "missing"))?;
                for (&class, &p_c) in classes {
                    for (&gender, &p_g) in genders {
                        let p = p_sp * p_c * p_g;
                        if p == 0.0 {
                            continue;
                        }
                        let sp_eff = if sp == Specialty::Surgery
                            && class == AccommodationClass::B2
                            && self.elective_b2_sources.contains(&src)
                        {
                            Specialty::SurgeryElective
                        } else {
                            sp
                        };
                        let ty = by_combo.get(&(sp_eff, gender, class)).ok_or_else(|| {
                            semantic(
                                format!("specialty_mix.{}.{sp}", src.name()),
                                format!("no patient type for {sp_eff} {gender:?} {class:?}"),
                            )
                        })?;
                        *weights.entry(*ty).or_default() += p;
                    }
                }
            }
            let total: f64 = weights.values().sum();
            let mut types = Vec::new();
            let mut cumulative = Vec::new();
            let mut acc = 0.0;
            for (ty, w) in weights {
                acc += w / total;
                types.push(ty);
                cumulative.push(acc);
            }
            if let Some(last) = cumulative.last_mut() {
                *last = 1.0;
            }
            out.insert(src, TypeMix { types, cumulative });
        }
        Ok(out)
    }

    fn build_los(
        &self,
        hospital: &Hospital,
        type_mix: &BTreeMap<Source, TypeMix>,
    ) -> Result<BTreeMap<(TypeId, LosColumn), LengthOfStayLaw>, ConfigError> {
        let mut out = BTreeMap::new();
        for (&src, mix) in type_mix {
            let cols: &[LosColumn] = match src {
                Source::Ed => &[LosColumn::EdAm, LosColumn::EdPm],
                Source::Sda => &[LosColumn::Sda],
                Source::El => &[LosColumn::El],
                Source::Soc => &[LosColumn::Soc],
            };
            for &ty in &mix.types {
                let sp = base_specialty(hospital.patient_type(ty).expect("known type").specialty);
                for &col in cols {
                    let key = format!("length_of_stay.{sp}.{}", col.name());
                    let entry = self
                        .length_of_stay
                        .get(&sp)
                        .and_then(|row| row.get(col))
                        .ok_or_else(|| semantic(&key, "missing for a specialty that receives requests"))?;
                    let law = entry.law();
                    law.validate().map_err(|e| semantic(&key, e.to_string()))?;
                    out.insert((ty, col), law);
                }
            }
        }
        Ok(out)
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        HospitalConfig::from_json(&text)?.validate()
    }

    pub fn reference() -> Scenario {
        HospitalConfig::reference()
            .validate()
            .expect("reference config validates")
    }
}

/// Length-of-stay tables are kept per clinical specialty; elective
/// surgical pools share the surgical row.
pub fn base_specialty(sp: Specialty) -> Specialty {
    match sp {
        Specialty::SurgeryElective => Specialty::Surgery,
        other => other,
    }
}

fn check_shares(key: impl Into<String>, values: impl Iterator<Item = f64>) -> Result<(), ConfigError> {
    let key = key.into();
    let mut sum = 0.0;
    for v in values {
        if !(v.is_finite() && v >= 0.0) {
            return Err(semantic(key, format!("share {v} is not a probability")));
        }
        sum += v;
    }
    if (sum - 1.0).abs() > SHARE_TOLERANCE {
        return Err(semantic(key, format!("shares sum to {sum}, expected 1")));
    }
    Ok(())
}

fn check_delays(key: &str, c: &DelayCurve) -> Result<(), ConfigError> {
    for h in 0..24 {
        let (m, s) = (c.mean_hours[h], c.sd_hours[h]);
        if !(m.is_finite() && s.is_finite() && m >= 0.0 && s >= 0.0) || (m == 0.0 && s > 0.0) {
            return Err(semantic(
                format!("{key}[{h}]"),
                format!("mean {m} / sd {s} is not a valid delay"),
            ));
        }
    }
    Ok(())
}
