//! Small ward used by the policy unit tests.
//!
//! Pools: 0 general medicine male C (primary for type 0), 1 general
//! medicine male B2 (preferred for type 0), 2 mixed male C (secondary for
//! both types), 3 cardiology male C (primary for type 1).

use alloc::collections::BTreeMap;
use alloc::vec;

use rand_core::RngCore;

use super::{BedStatus, BedView, WaitingPatient, WardSnapshot};
use crate::domain::{
    AccommodationClass, BedId, BedPool, CompatibilityMap, Gender, GenderLabel, Hospital,
    PatientId, PatientType, PoolId, Source, Specialty, TierCosts, TypeId, TypeTiers,
};
use crate::probability::DischargeHourDistribution;
use crate::rates::ArrivalIntensity;
use crate::time::Minutes;

pub struct Fixture {
    pub hospital: Hospital,
    pub discharge: DischargeHourDistribution,
    pub arrivals: ArrivalIntensity,
}

impl Fixture {
    pub fn new() -> Self {
        let pool = |id, specialty, class| BedPool {
            id: PoolId(id),
            specialty,
            gender_label: GenderLabel::MaleOnly,
            class,
            capacity: 4,
        };
        let pools = vec![
            pool(0, Specialty::GeneralMedicine, AccommodationClass::C),
            pool(1, Specialty::GeneralMedicine, AccommodationClass::B2),
            pool(2, Specialty::Mixed, AccommodationClass::C),
            pool(3, Specialty::Cardiology, AccommodationClass::C),
        ];
        let ty = |id, specialty| PatientType {
            id: TypeId(id),
            specialty,
            gender: Gender::Male,
            class: AccommodationClass::C,
            sources: vec![Source::Ed],
        };
        let types = vec![ty(0, Specialty::GeneralMedicine), ty(1, Specialty::Cardiology)];
        let mut tiers = BTreeMap::new();
        tiers.insert(
            TypeId(0),
            TypeTiers {
                primary: vec![PoolId(0)],
                preferred: vec![PoolId(1)],
                secondary: vec![PoolId(2)],
            },
        );
        tiers.insert(
            TypeId(1),
            TypeTiers {
                primary: vec![PoolId(3)],
                preferred: vec![],
                secondary: vec![PoolId(2)],
            },
        );
        let compat = CompatibilityMap::new(tiers, TierCosts::default()).unwrap();
        Fixture {
            hospital: Hospital::new(pools, types, compat).unwrap(),
            discharge: DischargeHourDistribution::uniform(),
            arrivals: ArrivalIntensity::zero(),
        }
    }

    pub fn snap<'a>(
        &'a self,
        now: Minutes,
        waiting: &'a [WaitingPatient],
        beds: &'a [BedView],
    ) -> WardSnapshot<'a> {
        WardSnapshot {
            now,
            hospital: &self.hospital,
            waiting,
            beds,
            discharge: &self.discharge,
            arrivals: &self.arrivals,
        }
    }
}

pub fn bed(id: u32, pool: u16, status: BedStatus) -> BedView {
    BedView {
        id: BedId(id),
        pool: PoolId(pool),
        status,
        claimed_by: None,
    }
}

pub fn occupied(day: i64) -> BedStatus {
    BedStatus::Occupied {
        discharge_day: Some(day),
    }
}

pub fn patient(id: u64, type_id: u16, at: Minutes) -> WaitingPatient {
    WaitingPatient {
        id: PatientId(id),
        type_id: TypeId(type_id),
        request_time: at,
        requested: at,
        source: Source::Ed,
    }
}

pub fn at(day: i64, h: i64, m: i64) -> Minutes {
    Minutes::from_days(day) + Minutes::from_hours(h) + Minutes(m)
}

/// Returns the same word forever; 0 draws below any probability, `u64::MAX`
/// above.
pub struct FixedRng(pub u64);

impl RngCore for FixedRng {
    fn next_u32(&mut self) -> u32 {
        (self.0 >> 32) as u32
    }
    fn next_u64(&mut self) -> u64 {
        self.0
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        dst.fill(0);
    }
}
