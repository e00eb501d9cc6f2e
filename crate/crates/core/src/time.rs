//! Simulation clock in integer minutes from the epoch.
//!
//! Day 0 of the epoch is a Monday.

use core::fmt;
use core::ops::{Add, AddAssign, Sub};

pub const MINUTES_PER_HOUR: i64 = 60;
pub const MINUTES_PER_DAY: i64 = 24 * MINUTES_PER_HOUR;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Minutes(pub i64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Weekday {
    Monday,
    Tuesday,
    Wednesday,
    Thursday,
    Friday,
    Saturday,
    Sunday,
}

impl Weekday {
    pub const ALL: [Weekday; 7] = [
        Weekday::Monday,
        Weekday::Tuesday,
        Weekday::Wednesday,
        Weekday::Thursday,
        Weekday::Friday,
        Weekday::Saturday,
        Weekday::Sunday,
    ];

    pub fn of_day(day: i64) -> Weekday {
        Self::ALL[day.rem_euclid(7) as usize]
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl Minutes {
    pub const ZERO: Minutes = Minutes(0);

    pub const fn from_hours(hours: i64) -> Minutes {
        Minutes(hours * MINUTES_PER_HOUR)
    }

    pub const fn from_days(days: i64) -> Minutes {
        Minutes(days * MINUTES_PER_DAY)
    }

    /// Rounds a fractional hour count to the nearest minute.
    pub fn from_hours_f64(hours: f64) -> Minutes {
        Minutes(libm::round(hours * MINUTES_PER_HOUR as f64) as i64)
    }

    pub const fn day(self) -> i64 {
        self.0.div_euclid(MINUTES_PER_DAY)
    }

    pub const fn minute_of_day(self) -> i64 {
        self.0.rem_euclid(MINUTES_PER_DAY)
    }

    pub const fn hour_of_day(self) -> u8 {
        (self.minute_of_day() / MINUTES_PER_HOUR) as u8
    }

    /// Time of day as a fraction of a day in `[0, 1)`.
    pub fn fraction_of_day(self) -> f64 {
        self.minute_of_day() as f64 / MINUTES_PER_DAY as f64
    }

    pub fn weekday(self) -> Weekday {
        Weekday::of_day(self.day())
    }

    pub const fn start_of_day(day: i64) -> Minutes {
        Minutes(day * MINUTES_PER_DAY)
    }

    pub fn as_hours(self) -> f64 {
        self.0 as f64 / MINUTES_PER_HOUR as f64
    }
}

impl Add for Minutes {
    type Output = Minutes;
    fn add(self, rhs: Minutes) -> Minutes {
        Minutes(self.0 + rhs.0)
    }
}

impl AddAssign for Minutes {
    fn add_assign(&mut self, rhs: Minutes) {
        self.0 += rhs.0;
    }
}

impl Sub for Minutes {
    type Output = Minutes;
    fn sub(self, rhs: Minutes) -> Minutes {
        Minutes(self.0 - rhs.0)
    }
}

impl fmt::Display for Minutes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.minute_of_day();
        write!(f, "d{}+{:02}:{:02}", self.day(), m / 60, m % 60)
    }
}
