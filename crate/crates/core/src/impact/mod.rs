//! Energy, time and emission accounting for collection scenarios.
//!
//! Each truck class has a linear model per quantity:
//! `total = per_km * distance_km + per_stop * stop_visits`. Classes never
//! share coefficients. Factors can be back-solved from an observed
//! scenario total (distance-only). Scenario pairs are compared as percent
//! improvements, `(existing - proposed) / existing * 100`.

mod io;
mod report;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kv::KvError;
use crate::table::TableError;
use crate::vrp::RouteMetrics;

pub use io::{read_factors, read_summary, summary_from_kv, summary_to_kv, write_factors, FACTOR_COLUMNS};
pub use report::{format_table, format_text, ReportFormat};

/// Largest allowed relative gap between `n_trucks x average` and the total.
pub const SUMMARY_CONSISTENCY_TOL: f64 = 0.05;

#[derive(Debug, Error)]
pub enum ImpactError {
    #[error("{what} must be finite and >= 0, got {value}")]
    NegativeInput { what: &'static str, value: f64 },
    #[error("cannot calibrate from a scenario with zero distance")]
    ZeroDistance,
    #[error("baseline must be > 0, got {0}")]
    NonpositiveBaseline(f64),
    #[error("scenario `{name}`: {reason}")]
    InconsistentSummary { name: String, reason: String },
    #[error("factor file: {0}")]
    BadFactors(String),
    #[error(transparent)]
    Kv(#[from] KvError),
    #[error(transparent)]
    Table(#[from] TableError),
}

fn nonneg(what: &'static str, value: f64) -> Result<f64, ImpactError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(ImpactError::NegativeInput { what, value })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearFactor {
    pub per_km: f64,
    pub per_stop: f64,
}

impl LinearFactor {
    pub fn apply(&self, total_km: f64, stop_visits: f64) -> f64 {
        self.per_km * total_km + self.per_stop * stop_visits
    }
}

/// Coefficients for one truck class.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ImpactFactors {
    pub class: String,
    /// MJ.
    pub energy: LinearFactor,
    /// Grams of each gas.
    pub co: LinearFactor,
    pub co2: LinearFactor,
    pub nox: LinearFactor,
}

impl ImpactFactors {
    pub fn validate(&self) -> Result<(), ImpactError> {
        for (what, f) in [
            ("energy factor", self.energy),
            ("CO factor", self.co),
            ("CO2 factor", self.co2),
            ("NOx factor", self.nox),
        ] {
            nonneg(what, f.per_km)?;
            nonneg(what, f.per_stop)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Emissions {
    pub co_g: f64,
    pub co2_g: f64,
    pub nox_g: f64,
}

/// Energy per day, MJ.
pub fn energy_consumption(total_km: f64, stop_visits: f64, factors: &ImpactFactors) -> Result<f64, ImpactError> {
    let km = nonneg("total_km", total_km)?;
    let stops = nonneg("stop visits", stop_visits)?;
    factors.validate()?;
    Ok(factors.energy.apply(km, stops))
}

/// CO, CO2 and NOx per day, grams.
pub fn emissions(total_km: f64, stop_visits: f64, factors: &ImpactFactors) -> Result<Emissions, ImpactError> {
    let km = nonneg("total_km", total_km)?;
    let stops = nonneg("stop visits", stop_visits)?;
    factors.validate()?;
    Ok(Emissions {
        co_g: factors.co.apply(km, stops),
        co2_g: factors.co2.apply(km, stops),
        nox_g: factors.nox.apply(km, stops),
    })
}

/// Daily working time split into its parts, hours.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct TimeConsumption {
    pub drive_h: f64,
    pub service_h: f64,
    pub unload_h: f64,
    pub total_h: f64,
}

pub fn time_consumption(metrics: &RouteMetrics) -> TimeConsumption {
    let t = &metrics.totals;
    let drive_h = t.drive_s / 3600.0;
    let service_h = t.service_s / 3600.0;
    let unload_h = t.unload_s / 3600.0;
    TimeConsumption {
        drive_h,
        service_h,
        unload_h,
        total_h: drive_h + service_h + unload_h,
    }
}

/// Fleet-day hours from a truck count and an average route time.
pub fn fleet_time_h(n_trucks: u32, avg_route_h: f64) -> f64 {
    n_trucks as f64 * avg_route_h
}

/// One column of a scenario comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub name: String,
    pub collection_method: String,
    pub n_trucks: u32,
    pub truck_capacity_kg: f64,
    pub n_stops: u32,
    pub avg_stop_time_s: f64,
    pub avg_route_km: f64,
    pub total_km: f64,
    pub avg_route_h: f64,
    pub total_time_h: f64,
    pub energy_mj_day: f64,
    pub co_g_day: f64,
    pub co2_g_day: f64,
    pub nox_g_day: f64,
}

impl ScenarioSummary {
    /// Rejects negative fields and totals that disagree with
    /// `n_trucks x average` by more than [`SUMMARY_CONSISTENCY_TOL`].
    pub fn validate(&self) -> Result<(), ImpactError> {
        let fields = [
            ("truck_capacity_kg", self.truck_capacity_kg),
            ("avg_stop_time_s", self.avg_stop_time_s),
            ("avg_route_km", self.avg_route_km),
            ("total_km", self.total_km),
            ("avg_route_h", self.avg_route_h),
            ("total_time_h", self.total_time_h),
            ("energy_mj_day", self.energy_mj_day),
            ("co_g_day", self.co_g_day),
            ("co2_g_day", self.co2_g_day),
            ("nox_g_day", self.nox_g_day),
        ];
        for (what, v) in fields {
            nonneg(what, v)?;
        }
        for (what, avg, total) in [
            ("distance", self.avg_route_km, self.total_km),
            ("time", self.avg_route_h, self.total_time_h),
        ] {
            let gap = self.consistency_gap(avg, total);
            if gap > SUMMARY_CONSISTENCY_TOL {
                return Err(ImpactError::InconsistentSummary {
                    name: self.name.clone(),
                    reason: format!(
                        "{what}: {} trucks x {avg} = {} vs total {total} ({:.1}% apart)",
                        self.n_trucks,
                        self.n_trucks as f64 * avg,
                        gap * 100.0
                    ),
                });
            }
        }
        Ok(())
    }

    /// Relative gap between `n_trucks x avg` and `total`.
    pub fn consistency_gap(&self, avg: f64, total: f64) -> f64 {
        let product = self.n_trucks as f64 * avg;
        let scale = total.abs().max(product.abs());
        if scale == 0.0 {
            0.0
        } else {
            (product - total).abs() / scale
        }
    }

    pub fn distance_gap(&self) -> f64 {
        self.consistency_gap(self.avg_route_km, self.total_km)
    }

    pub fn time_gap(&self) -> f64 {
        self.consistency_gap(self.avg_route_h, self.total_time_h)
    }
}

/// Back-solves distance-only factors that reproduce a scenario's totals.
pub fn calibrate_factors(summary: &ScenarioSummary) -> Result<ImpactFactors, ImpactError> {
    if !(summary.total_km.is_finite() && summary.total_km > 0.0) {
        return Err(ImpactError::ZeroDistance);
    }
    let per_km = |total: f64| LinearFactor {
        per_km: total / summary.total_km,
        per_stop: 0.0,
    };
    let factors = ImpactFactors {
        class: summary.name.clone(),
        energy: per_km(summary.energy_mj_day),
        co: per_km(summary.co_g_day),
        co2: per_km(summary.co2_g_day),
        nox: per_km(summary.nox_g_day),
    };
    factors.validate()?;
    Ok(factors)
}

/// `(existing - proposed) / existing x 100`, unrounded. Negative values are
/// regressions.
pub fn percent_improvement(existing: f64, proposed: f64) -> Result<f64, ImpactError> {
    if !(existing.is_finite() && existing > 0.0) {
        return Err(ImpactError::NonpositiveBaseline(existing));
    }
    Ok((existing - proposed) / existing * 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Indicator {
    AvgRouteDistance,
    AvgRouteTime,
    TotalTime,
    Co,
    Co2,
    Nox,
    TotalDistance,
}

impl Indicator {
    pub const ALL: [Indicator; 7] = [
        Indicator::AvgRouteDistance,
        Indicator::AvgRouteTime,
        Indicator::TotalTime,
        Indicator::Co,
        Indicator::Co2,
        Indicator::Nox,
        Indicator::TotalDistance,
    ];

    pub fn value(&self, s: &ScenarioSummary) -> f64 {
        match self {
            Indicator::AvgRouteDistance => s.avg_route_km,
            Indicator::AvgRouteTime => s.avg_route_h,
            Indicator::TotalTime => s.total_time_h,
            Indicator::Co => s.co_g_day,
            Indicator::Co2 => s.co2_g_day,
            Indicator::Nox => s.nox_g_day,
            Indicator::TotalDistance => s.total_km,
        }
    }

    pub fn key(&self) -> &'static str {
        match self {
            Indicator::AvgRouteDistance => "avg_route_distance",
            Indicator::AvgRouteTime => "avg_route_time",
            Indicator::TotalTime => "total_time",
            Indicator::Co => "co",
            Indicator::Co2 => "co2",
            Indicator::Nox => "nox",
            Indicator::TotalDistance => "total_distance",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub existing: ScenarioSummary,
    pub proposed: ScenarioSummary,
    /// In [`Indicator::ALL`] order.
    pub improvements: Vec<(Indicator, f64)>,
}

impl ComparisonReport {
    pub fn improvement(&self, metric: Indicator) -> Option<f64> {
        self.improvements.iter().find(|(m, _)| *m == metric).map(|(_, p)| *p)
    }
}

/// Percent improvement of `proposed` over `existing` for every metric.
pub fn compare_scenarios(
    existing: &ScenarioSummary,
    proposed: &ScenarioSummary,
) -> Result<ComparisonReport, ImpactError> {
    existing.validate()?;
    proposed.validate()?;
    let improvements = Indicator::ALL
        .iter()
        .map(|m| Ok((*m, percent_improvement(m.value(existing), m.value(proposed))?)))
        .collect::<Result<_, ImpactError>>()?;
    Ok(ComparisonReport {
        existing: existing.clone(),
        proposed: proposed.clone(),
        improvements,
    })
}


#[cfg(test)]
mod tests {
    use super::reference::{existing, proposed};
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn distance_only(per_km: f64) -> ImpactFactors {
        ImpactFactors {
            class: "t".into(),
            energy: LinearFactor { per_km, per_stop: 0.0 },
            co: LinearFactor { per_km, per_stop: 0.0 },
            co2: LinearFactor { per_km, per_stop: 0.0 },
            nox: LinearFactor { per_km, per_stop: 0.0 },
        }
    }

    #[test]
    fn energy_examples() {
        let e = energy_consumption(1756.0, 0.0, &distance_only(62.02)).unwrap();
        assert!(rel(e, 108_907.0) < 0.005);
        assert_eq!(energy_consumption(0.0, 0.0, &distance_only(62.02)).unwrap(), 0.0);
        let f = ImpactFactors {
            energy: LinearFactor {
                per_km: 3.0,
                per_stop: 7.0,
            },
            ..Default::default()
        };
        let one = energy_consumption(10.0, 4.0, &f).unwrap();
        let two = energy_consumption(20.0, 8.0, &f).unwrap();
        assert_eq!(two, 2.0 * one);
        assert!(matches!(
            energy_consumption(-1.0, 0.0, &f),
            Err(ImpactError::NegativeInput { .. })
        ));
    }

    #[test]
    fn emission_examples() {
        let co2 = emissions(1756.0, 0.0, &distance_only(19.474)).unwrap().co2_g;
        assert!(rel(co2, 34_197.0) < 0.005);
        let nox = emissions(3347.0, 0.0, &distance_only(0.06274)).unwrap().nox_g;
        assert!(rel(nox, 210.0) < 0.005);
        assert_eq!(emissions(0.0, 0.0, &distance_only(5.0)).unwrap(), Emissions::default());
        assert!(emissions(1.0, -2.0, &distance_only(5.0)).is_err());
    }

    #[test]
    fn calibration_examples() {
        let e = calibrate_factors(&existing()).unwrap();
        assert!((e.energy.per_km - 62.02).abs() < 0.005);
        assert!((e.co.per_km - 0.08086).abs() < 0.00001);
        assert!((e.co2.per_km - 19.474).abs() < 0.0005);
        let p = calibrate_factors(&proposed()).unwrap();
        assert!((p.energy.per_km - 100.41).abs() < 0.005);
        assert!((p.nox.per_km - 0.06274).abs() < 0.000005);
        assert_eq!(p.energy.per_stop, 0.0);
        let mut zero = existing();
        zero.total_km = 0.0;
        assert!(matches!(calibrate_factors(&zero), Err(ImpactError::ZeroDistance)));
    }

    #[test]
    fn calibration_round_trips() {
        for s in [existing(), proposed()] {
            let f = calibrate_factors(&s).unwrap();
            let e = energy_consumption(s.total_km, 0.0, &f).unwrap();
            let g = emissions(s.total_km, 0.0, &f).unwrap();
            assert!(rel(e, s.energy_mj_day) < 1e-12);
            assert!(rel(g.co_g, s.co_g_day) < 1e-12);
            assert!(rel(g.co2_g, s.co2_g_day) < 1e-12);
            assert!(rel(g.nox_g, s.nox_g_day) < 1e-12);
        }
    }

    #[test]
    fn percent_examples() {
        assert!((percent_improvement(84.6, 62.2).unwrap() - 26.477).abs() < 1e-3);
        assert_eq!(percent_improvement(7.0, 7.0).unwrap(), 0.0);
        assert!((percent_improvement(473.0, 210.0).unwrap() - 55.60).abs() < 0.01);
        assert!(matches!(
            percent_improvement(0.0, 1.0),
            Err(ImpactError::NonpositiveBaseline(_))
        ));
    }

    #[test]
    fn reference_fleet_time_and_distance_identities() {
        assert!(rel(fleet_time_h(16, 5.3), 84.6) < 0.005);
        assert!(rel(fleet_time_h(50, 1.2), 62.2) < 0.04);
        assert!(rel(16.0 * 110.0, 1756.0) < 0.005);
        assert!(rel(50.0 * 67.0, 3347.0) < 0.005);
        assert!(existing().validate().is_ok());
        assert!(proposed().validate().is_ok());
        assert!(proposed().time_gap() > 0.02 && proposed().time_gap() < 0.05);
    }

    #[test]
    fn inconsistent_summary_is_rejected() {
        let mut s = existing();
        s.total_km = 2000.0;
        assert!(matches!(s.validate(), Err(ImpactError::InconsistentSummary { .. })));
        let mut s = existing();
        s.co_g_day = -1.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn reference_comparison() {
        let r = compare_scenarios(&existing(), &proposed()).unwrap();
        let expected = [
            (Indicator::AvgRouteDistance, 39.09),
            (Indicator::AvgRouteTime, 77.36),
            (Indicator::TotalTime, 26.48),
            (Indicator::Co, 31.69),
            (Indicator::Co2, 43.09),
            (Indicator::Nox, 55.60),
            (Indicator::TotalDistance, -90.60),
        ];
        for (m, p) in expected {
            assert!((r.improvement(m).unwrap() - p).abs() < 0.01, "{m:?}");
        }
    }

    #[test]
    fn identical_scenarios_compare_to_zero() {
        let r = compare_scenarios(&existing(), &existing()).unwrap();
        assert!(r.improvements.iter().all(|(_, p)| *p == 0.0));
    }

    #[test]
    fn swapping_scenarios_inverts_percentages() {
        let fwd = compare_scenarios(&existing(), &proposed()).unwrap();
        let back = compare_scenarios(&proposed(), &existing()).unwrap();
        for m in Indicator::ALL {
            let p = fwd.improvement(m).unwrap();
            let q = back.improvement(m).unwrap();
            assert!((q - (-p / (1.0 - p / 100.0))).abs() < 1e-9, "{m:?}");
        }
    }
}
