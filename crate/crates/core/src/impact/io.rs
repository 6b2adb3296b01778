use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ImpactError, ImpactFactors, LinearFactor, ScenarioSummary};
use crate::kv::KvFile;
use crate::table;

pub const FACTOR_COLUMNS: &[&str] = &["class", "quantity", "per_km", "per_stop"];

const QUANTITIES: [&str; 4] = ["energy", "co", "co2", "nox"];

#[derive(Debug, Serialize, Deserialize)]
struct FactorRecord {
    class: String,
    quantity: String,
    per_km: f64,
    #[serde(default)]
    per_stop: Option<f64>,
}

/// Reads a factor table. Missing quantities default to zero; an empty
/// `per_stop` cell means zero.
pub fn read_factors(path: &Path) -> Result<Vec<ImpactFactors>, ImpactError> {
    let rows: Vec<FactorRecord> = table::read_file(path, FACTOR_COLUMNS)?;
    let mut by_class: BTreeMap<String, (ImpactFactors, Vec<&'static str>)> = BTreeMap::new();
    for row in rows {
        let entry = by_class.entry(row.class.clone()).or_insert_with(|| {
            (
                ImpactFactors {
                    class: row.class.clone(),
                    ..Default::default()
                },
                Vec::new(),
            )
        });
        let quantity = row.quantity.to_ascii_lowercase();
        let Some(q) = QUANTITIES.iter().find(|q| **q == quantity) else {
            return Err(ImpactError::BadFactors(format!(
                "class `{}`: unknown quantity `{}`",
                row.class, row.quantity
            )));
        };
        if entry.1.contains(q) {
            return Err(ImpactError::BadFactors(format!(
                "class `{}`: quantity `{}` given twice",
                row.class, q
            )));
        }
        entry.1.push(q);
        let f = LinearFactor {
            per_km: row.per_km,
            per_stop: row.per_stop.unwrap_or(0.0),
        };
        match *q {
            "energy" => entry.0.energy = f,
            "co" => entry.0.co = f,
            "co2" => entry.0.co2 = f,
            _ => entry.0.nox = f,
        }
    }
    let out: Vec<ImpactFactors> = by_class.into_values().map(|(f, _)| f).collect();
    for f in &out {
        f.validate()?;
    }
    Ok(out)
}

pub fn write_factors(path: &Path, factors: &[ImpactFactors]) -> Result<(), ImpactError> {
    let rows: Vec<FactorRecord> = factors
        .iter()
        .flat_map(|f| {
            [("energy", f.energy), ("co", f.co), ("co2", f.co2), ("nox", f.nox)]
                .into_iter()
                .map(|(q, lf)| FactorRecord {
                    class: f.class.clone(),
                    quantity: q.to_string(),
                    per_km: lf.per_km,
                    per_stop: Some(lf.per_stop),
                })
        })
        .collect();
    Ok(table::write_file(path, FACTOR_COLUMNS, &rows)?)
}

const SUMMARY_KEYS: &[&str] = &[
    "name",
    "collection_method",
    "n_trucks",
    "truck_capacity_kg",
    "n_stops",
    "avg_stop_time_s",
    "avg_route_km",
    "total_km",
    "avg_route_h",
    "total_time_h",
    "energy_mj_day",
    "co_g_day",
    "co2_g_day",
    "nox_g_day",
];

/// Builds and validates a summary from `key=value` entries.
pub fn summary_from_kv(kv: &KvFile) -> Result<ScenarioSummary, ImpactError> {
    kv.reject_unknown(SUMMARY_KEYS, &[])?;
    let s = ScenarioSummary {
        name: kv.require("name")?,
        collection_method: kv.get_or("collection_method", String::new())?,
        n_trucks: kv.require("n_trucks")?,
        truck_capacity_kg: kv.require("truck_capacity_kg")?,
        n_stops: kv.require("n_stops")?,
        avg_stop_time_s: kv.require("avg_stop_time_s")?,
        avg_route_km: kv.require("avg_route_km")?,
        total_km: kv.require("total_km")?,
        avg_route_h: kv.require("avg_route_h")?,
        total_time_h: kv.require("total_time_h")?,
        energy_mj_day: kv.require("energy_mj_day")?,
        co_g_day: kv.require("co_g_day")?,
        co2_g_day: kv.require("co2_g_day")?,
        nox_g_day: kv.require("nox_g_day")?,
    };
    s.validate()?;
    Ok(s)
}

pub fn read_summary(path: &Path) -> Result<ScenarioSummary, ImpactError> {
    summary_from_kv(&KvFile::read(path)?)
}

pub fn summary_to_kv(s: &ScenarioSummary) -> String {
    let fields: [(&str, String); 14] = [
        ("name", s.name.clone()),
        ("collection_method", s.collection_method.clone()),
        ("n_trucks", s.n_trucks.to_string()),
        ("truck_capacity_kg", s.truck_capacity_kg.to_string()),
        ("n_stops", s.n_stops.to_string()),
        ("avg_stop_time_s", s.avg_stop_time_s.to_string()),
        ("avg_route_km", s.avg_route_km.to_string()),
        ("total_km", s.total_km.to_string()),
        ("avg_route_h", s.avg_route_h.to_string()),
        ("total_time_h", s.total_time_h.to_string()),
        ("energy_mj_day", s.energy_mj_day.to_string()),
        ("co_g_day", s.co_g_day.to_string()),
        ("co2_g_day", s.co2_g_day.to_string()),
        ("nox_g_day", s.nox_g_day.to_string()),
    ];
    fields.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impact::reference;

    #[test]
    fn summary_round_trip() {
        let s = reference::existing();
        let text = summary_to_kv(&s);
        let back = summary_from_kv(&KvFile::parse(&text, "t").unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn summary_rejects_unknown_and_inconsistent() {
        let text = summary_to_kv(&reference::existing()) + "hc_g_day=1\n";
        assert!(summary_from_kv(&KvFile::parse(&text, "t").unwrap()).is_err());
        let text = summary_to_kv(&reference::existing()).replace("total_km=1756", "total_km=3000");
        assert!(matches!(
            summary_from_kv(&KvFile::parse(&text, "t").unwrap()),
            Err(ImpactError::InconsistentSummary { .. })
        ));
    }

    #[test]
    fn factor_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("factors.csv");
        let f = ImpactFactors {
            class: "4t".into(),
            energy: LinearFactor {
                per_km: 100.41,
                per_stop: 2.5,
            },
            co: LinearFactor {
                per_km: 0.03,
                per_stop: 0.0,
            },
            co2: LinearFactor {
                per_km: 5.8,
                per_stop: 0.0,
            },
            nox: LinearFactor {
                per_km: 0.06274,
                per_stop: 0.0,
            },
        };
        write_factors(&path, std::slice::from_ref(&f)).unwrap();
        assert_eq!(read_factors(&path).unwrap(), vec![f]);
    }

    #[test]
    fn factor_file_defaults_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("factors.csv");
        std::fs::write(
            &path,
            "class,quantity,per_km,per_stop\n18t,energy,62.02,\n18t,CO2,19.474,0\n",
        )
        .unwrap();
        let f = read_factors(&path).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(
            f[0].energy,
            LinearFactor {
                per_km: 62.02,
                per_stop: 0.0
            }
        );
        assert_eq!(f[0].co2.per_km, 19.474);
        assert_eq!(f[0].nox, LinearFactor::default());

        std::fs::write(&path, "class,quantity,per_km,per_stop\n18t,hc,1,0\n").unwrap();
        assert!(matches!(read_factors(&path), Err(ImpactError::BadFactors(_))));
        std::fs::write(&path, "class,quantity,per_km,per_stop\n18t,co,-1,0\n").unwrap();
        assert!(matches!(read_factors(&path), Err(ImpactError::NegativeInput { .. })));
    }
}
