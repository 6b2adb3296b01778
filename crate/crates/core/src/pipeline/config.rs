use std::path::{Path, PathBuf};

use crate::coverage::{CoverageConfig, DistanceMode, DEFAULT_GENERATION_RATE};
use crate::impact::{summary_from_kv, ScenarioSummary};
use crate::kv::{KvError, KvFile};
use crate::network::{Metric, NodeId};
use crate::table;
use crate::vrp::{FleetSpec, SolverOptions};

use super::{ErrorKind, PipelineError};

const TOP_KEYS: &[&str] = &[
    "network",
    "buildings",
    "objective",
    "seed",
    "generation_rate_kg_unit_day",
];
const SECTIONS: &[&str] = &[
    "depot", "coverage", "fleet", "solver", "impact", "existing", "proposed", "scenario",
];
const DEPOT_KEYS: &[&str] = &["x_m", "y_m", "snap_max_m"];
const COVERAGE_KEYS: &[&str] = &["radius_m", "distance_mode", "max_stop_load_kg", "candidate_nodes"];
const FLEET_KEYS: &[&str] = &[
    "capacity_kg",
    "speed_kmh",
    "stop_service_s",
    "unload_s",
    "shift_s",
    "crew_size",
];
const SOLVER_KEYS: &[&str] = &["restarts", "move_budget"];
const IMPACT_KEYS: &[&str] = &["factors", "class"];
const SCENARIO_KEYS: &[&str] = &["name", "collection_method"];

pub const DEFAULT_SNAP_MAX_M: f64 = 500.0;

/// Everything `plan` needs. Paths are resolved against the config file's
/// directory.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Directory holding `nodes.csv`, `edges.csv` and optionally `turns.csv`.
    pub network_dir: PathBuf,
    pub buildings: PathBuf,
    pub depot_x_m: f64,
    pub depot_y_m: f64,
    pub depot_snap_max_m: f64,
    pub coverage: CoverageConfig,
    pub fleet: FleetSpec,
    pub objective: Metric,
    pub seed: u64,
    pub generation_rate_kg_unit_day: f64,
    pub solver: SolverOptions,
    pub factors: Option<PathBuf>,
    /// Row of the factor file to use; the only class when `None`.
    pub factor_class: Option<String>,
    pub name: String,
    pub collection_method: String,
    /// Fixed summary of the system being replaced.
    pub existing: Option<ScenarioSummary>,
    /// Replaces the computed summary in the comparison.
    pub proposed_override: Option<ScenarioSummary>,
}

fn config_err(origin: &str, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::new("config", ErrorKind::Config, format!("{origin}: {e}"))
}

fn kv_err(e: KvError) -> PipelineError {
    PipelineError::new("config", ErrorKind::Config, e)
}

impl ScenarioConfig {
    pub fn read(path: &Path) -> Result<Self, PipelineError> {
        let kv = KvFile::read(path).map_err(kv_err)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_kv(&kv, base)
    }

    pub fn from_kv(kv: &KvFile, base: &Path) -> Result<Self, PipelineError> {
        kv.reject_unknown(TOP_KEYS, SECTIONS).map_err(kv_err)?;
        let depot = kv.section("depot");
        let cov = kv.section("coverage");
        let fl = kv.section("fleet");
        let sol = kv.section("solver");
        let imp = kv.section("impact");
        let scen = kv.section("scenario");
        for (sec, keys) in [
            (&depot, DEPOT_KEYS),
            (&cov, COVERAGE_KEYS),
            (&fl, FLEET_KEYS),
            (&sol, SOLVER_KEYS),
            (&imp, IMPACT_KEYS),
            (&scen, SCENARIO_KEYS),
        ] {
            sec.reject_unknown(keys, &[]).map_err(kv_err)?;
        }

        let resolve = |p: String| base.join(p);
        let fleet_default = FleetSpec::default();
        let fleet = FleetSpec {
            capacity_kg: fl.get_or("capacity_kg", fleet_default.capacity_kg).map_err(kv_err)?,
            speed_kmh: fl.get_or("speed_kmh", fleet_default.speed_kmh).map_err(kv_err)?,
            stop_service_s: fl
                .get_or("stop_service_s", fleet_default.stop_service_s)
                .map_err(kv_err)?,
            unload_s: fl.get_or("unload_s", fleet_default.unload_s).map_err(kv_err)?,
            shift_s: fl.get_or("shift_s", fleet_default.shift_s).map_err(kv_err)?,
            crew_size: fl.get_or("crew_size", fleet_default.crew_size).map_err(kv_err)?,
        };
        fleet.validate().map_err(|e| config_err(kv.origin(), e))?;

        let cov_default = CoverageConfig::default();
        let candidate_nodes = match cov.raw("candidate_nodes") {
            None => None,
            Some(cell) => Some(
                table::split_ids(cell)
                    .map_err(|e| config_err(kv.origin(), format!("coverage.candidate_nodes: {e}")))?
                    .into_iter()
                    .map(NodeId)
                    .collect(),
            ),
        };
        let coverage = CoverageConfig {
            radius_m: cov.get_or("radius_m", cov_default.radius_m).map_err(kv_err)?,
            distance_mode: cov.get_or("distance_mode", DistanceMode::default()).map_err(kv_err)?,
            max_stop_load_kg: cov
                .get_or("max_stop_load_kg", cov_default.max_stop_load_kg)
                .map_err(kv_err)?,
            candidate_nodes,
            service_time_s: fleet.stop_service_s,
        };
        coverage.validate().map_err(|e| config_err(kv.origin(), e))?;

        let solver_default = SolverOptions::default();
        let solver = SolverOptions {
            restarts: sol.get_or("restarts", solver_default.restarts).map_err(kv_err)?,
            move_budget: sol.get_or("move_budget", solver_default.move_budget).map_err(kv_err)?,
        };

        let rate = kv
            .get_or("generation_rate_kg_unit_day", DEFAULT_GENERATION_RATE)
            .map_err(kv_err)?;
        if !(rate.is_finite() && rate > 0.0) {
            return Err(config_err(
                kv.origin(),
                format!("generation_rate_kg_unit_day must be > 0, got {rate}"),
            ));
        }
        let snap: f64 = depot.get_or("snap_max_m", DEFAULT_SNAP_MAX_M).map_err(kv_err)?;
        if !(snap.is_finite() && snap >= 0.0) {
            return Err(config_err(
                kv.origin(),
                format!("depot.snap_max_m must be >= 0, got {snap}"),
            ));
        }

        let summary = |prefix: &str| -> Result<Option<ScenarioSummary>, PipelineError> {
            if !kv.has_section(prefix) {
                return Ok(None);
            }
            summary_from_kv(&kv.section(prefix))
                .map(Some)
                .map_err(|e| PipelineError::new("config", ErrorKind::Config, e))
        };

        let cfg = ScenarioConfig {
            network_dir: resolve(kv.require("network").map_err(kv_err)?),
            buildings: resolve(kv.require("buildings").map_err(kv_err)?),
            depot_x_m: depot.require("x_m").map_err(kv_err)?,
            depot_y_m: depot.require("y_m").map_err(kv_err)?,
            depot_snap_max_m: snap,
            coverage,
            fleet,
            objective: kv.get_or("objective", Metric::Time).map_err(kv_err)?,
            seed: kv.get_or("seed", 0u64).map_err(kv_err)?,
            generation_rate_kg_unit_day: rate,
            solver,
            factors: imp.get::<String>("factors").map_err(kv_err)?.map(resolve),
            factor_class: imp.get("class").map_err(kv_err)?,
            name: scen.get_or("name", "proposed".to_string()).map_err(kv_err)?,
            collection_method: scen
                .get_or("collection_method", "Door-to-Door".to_string())
                .map_err(kv_err)?,
            existing: summary("existing")?,
            proposed_override: summary("proposed")?,
        };
        for (what, p) in [("network", &cfg.network_dir), ("buildings", &cfg.buildings)] {
            if !p.exists() {
                return Err(config_err(
                    kv.origin(),
                    format!("{what} path {} does not exist", p.display()),
                ));
            }
        }
        if let Some(f) = &cfg.factors {
            if !f.exists() {
                return Err(config_err(
                    kv.origin(),
                    format!("impact.factors path {} does not exist", f.display()),
                ));
            }
        }
        Ok(cfg)
    }
}
