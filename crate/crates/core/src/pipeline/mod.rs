//! End-to-end scenario runs: coverage, travel matrix, routing, metrics and
//! impact, plus synthetic city generation and route geometry export.

mod config;
mod geometry;
mod synth;

use std::error::Error as StdError;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use thiserror::Error;

use crate::coverage::{
    aggregate_demand, place_stops, read_buildings, verify_coverage, write_stops, CoverageError, CoverageReport,
    DemandPoint, StopPoint,
};
use crate::impact::{
    compare_scenarios, emissions, energy_consumption, format_table, format_text, read_factors, summary_to_kv,
    ComparisonReport, ImpactError, ImpactFactors, ScenarioSummary,
};
use crate::network::{load_network, travel_matrix, NetworkError, NodeId, RoadNetwork};
use crate::vrp::{route_metrics, solve_vrp_with, write_plan, Depot, RouteMetrics, RoutePlan, VrpError};

pub use config::{ScenarioConfig, DEFAULT_SNAP_MAX_M};
pub use geometry::{emit_route_geometry, polyline_length, trip_vertices};
pub use synth::{gen_synthetic_city, synthetic_city, SyntheticCity, SyntheticCitySpec};

pub const STOPS_FILE: &str = "stops.csv";
pub const PLAN_FILE: &str = "plan.csv";
pub const ROUTES_FILE: &str = "routes.geojson";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const REPORT_TABLE_FILE: &str = "report.csv";
pub const REPORT_TEXT_FILE: &str = "report.txt";

/// Relative tolerance for cross-stage mass balance; the partition of
/// demand ids is checked exactly.
const MASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Infeasible,
    Data,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::Infeasible => 3,
            ErrorKind::Data => 4,
        }
    }
}

#[derive(Debug, Error)]
#[error("{stage}: {source}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub kind: ErrorKind,
    #[source]
    pub source: Box<dyn StdError + Send + Sync>,
}

impl PipelineError {
    pub fn new(stage: &'static str, kind: ErrorKind, source: impl Into<Box<dyn StdError + Send + Sync>>) -> Self {
        PipelineError {
            stage,
            kind,
            source: source.into(),
        }
    }
}

fn network_kind(e: &NetworkError) -> ErrorKind {
    match e {
        NetworkError::NoNodeWithinRange { .. } | NetworkError::Unreachable { .. } => ErrorKind::Infeasible,
        _ => ErrorKind::Data,
    }
}

fn coverage_kind(e: &CoverageError) -> ErrorKind {
    match e {
        CoverageError::InvalidConfig(_) | CoverageError::InvalidRate(_) => ErrorKind::Config,
        CoverageError::UncoverableDemand(_) => ErrorKind::Infeasible,
        CoverageError::Network(n) => network_kind(n),
        _ => ErrorKind::Data,
    }
}

fn vrp_kind(e: &VrpError) -> ErrorKind {
    match e {
        VrpError::InvalidFleet(_) => ErrorKind::Config,
        VrpError::InfeasibleStop { .. } | VrpError::UnreachableStop { .. } | VrpError::ShiftTooShort { .. } => {
            ErrorKind::Infeasible
        }
        _ => ErrorKind::Data,
    }
}

fn impact_kind(e: &ImpactError) -> ErrorKind {
    match e {
        ImpactError::Kv(_) | ImpactError::InconsistentSummary { .. } => ErrorKind::Config,
        _ => ErrorKind::Data,
    }
}

fn at<E, K>(stage: &'static str, kind: K) -> impl FnOnce(E) -> PipelineError
where
    E: StdError + Send + Sync + 'static,
    K: FnOnce(&E) -> ErrorKind,
{
    move |e| {
        let k = kind(&e);
        PipelineError::new(stage, k, e)
    }
}

/// Everything computed by one scenario run.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub network: RoadNetwork,
    pub demands: Vec<DemandPoint>,
    pub depot: Depot,
    pub stops: Vec<StopPoint>,
    pub coverage: CoverageReport,
    pub plan: RoutePlan,
    pub metrics: RouteMetrics,
    pub summary: ScenarioSummary,
    pub comparison: Option<ComparisonReport>,
    pub geometry: Value,
}

fn select_factors(cfg: &ScenarioConfig) -> Result<Option<ImpactFactors>, PipelineError> {
    let Some(path) = &cfg.factors else {
        return Ok(None);
    };
    let all = read_factors(path).map_err(at("impact", impact_kind))?;
    let chosen = match &cfg.factor_class {
        Some(class) => all.into_iter().find(|f| &f.class == class),
        None if all.len() == 1 => all.into_iter().next(),
        None => {
            return Err(PipelineError::new(
                "config",
                ErrorKind::Config,
                format!("{} holds {} classes; set impact.class", path.display(), all.len()),
            ))
        }
    };
    chosen.map(Some).ok_or_else(|| {
        PipelineError::new(
            "config",
            ErrorKind::Config,
            format!(
                "class `{}` not found in {}",
                cfg.factor_class.as_deref().unwrap_or(""),
                path.display()
            ),
        )
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= MASS_TOL * a.abs().max(b.abs()).max(1.0)
}

fn mass_error(what: String) -> PipelineError {
    PipelineError::new("coverage", ErrorKind::Data, what)
}

fn check_mass(demands: &[DemandPoint], stops: &[StopPoint], plan: &RoutePlan) -> Result<(), PipelineError> {
    let mut ids: Vec<u64> = stops
        .iter()
        .flat_map(|s| s.covered_demand_ids.iter().copied())
        .collect();
    ids.sort_unstable();
    let mut expected: Vec<u64> = demands.iter().map(|d| d.id).collect();
    expected.sort_unstable();
    if ids != expected {
        return Err(mass_error("stops do not partition the demand points".to_string()));
    }
    let demand_kg: f64 = demands.iter().map(|d| d.waste_kg_day).sum();
    let stop_kg: f64 = stops.iter().map(|s| s.assigned_demand_kg).sum();
    let trip_kg: f64 = plan.trips().map(|t| t.load_kg).sum();
    if !close(demand_kg, stop_kg) || !close(stop_kg, trip_kg) {
        return Err(mass_error(format!(
            "mass balance broken: buildings {demand_kg} kg, stops {stop_kg} kg, trips {trip_kg} kg"
        )));
    }
    Ok(())
}

fn summarize(
    cfg: &ScenarioConfig,
    stops: &[StopPoint],
    plan: &RoutePlan,
    metrics: &RouteMetrics,
    factors: Option<&ImpactFactors>,
) -> Result<ScenarioSummary, PipelineError> {
    let total_km = metrics.totals.distance_m / 1000.0;
    let visits = metrics.totals.stop_visits as f64;
    let (energy, gases) = match factors {
        Some(f) => (
            energy_consumption(total_km, visits, f).map_err(at("impact", impact_kind))?,
            emissions(total_km, visits, f).map_err(at("impact", impact_kind))?,
        ),
        None => (0.0, Default::default()),
    };
    let avg_stop_time_s = if stops.is_empty() {
        0.0
    } else {
        stops.iter().map(|s| s.service_time_s).sum::<f64>() / stops.len() as f64
    };
    Ok(ScenarioSummary {
        name: cfg.name.clone(),
        collection_method: cfg.collection_method.clone(),
        n_trucks: plan.fleet_size as u32,
        truck_capacity_kg: cfg.fleet.capacity_kg,
        n_stops: stops.len() as u32,
        avg_stop_time_s,
        avg_route_km: metrics.avg_route_km,
        total_km,
        avg_route_h: metrics.avg_route_h,
        total_time_h: metrics.totals.total_s / 3600.0,
        energy_mj_day: energy,
        co_g_day: gases.co_g,
        co2_g_day: gases.co2_g,
        nox_g_day: gases.nox_g,
    })
}

/// Runs every stage in memory without writing files.
pub fn plan_scenario(cfg: &ScenarioConfig) -> Result<PipelineOutput, PipelineError> {
    let factors = select_factors(cfg)?;

    let net = load_network(&cfg.network_dir, cfg.fleet.speed_kmh).map_err(at("network/load", network_kind))?;
    log::info!("network: {} nodes, {} edges", net.nodes().len(), net.edges().len());

    let buildings = read_buildings(&cfg.buildings).map_err(at("buildings", coverage_kind))?;
    let demands =
        aggregate_demand(&buildings, cfg.generation_rate_kg_unit_day).map_err(at("buildings", coverage_kind))?;

    let depot_node = net
        .snap(cfg.depot_x_m, cfg.depot_y_m, cfg.depot_snap_max_m)
        .map_err(at("network/snap", network_kind))?;
    let depot = Depot { node: depot_node };

    let stops = place_stops(&net, &demands, &cfg.coverage).map_err(at("coverage", coverage_kind))?;
    let coverage = verify_coverage(&stops, &demands, &net, &cfg.coverage);
    if !coverage.is_clean() {
        return Err(PipelineError::new(
            "coverage",
            ErrorKind::Data,
            format!("stop placement failed its audit: {coverage:?}"),
        ));
    }
    log::info!("coverage: {} demand points on {} stops", demands.len(), stops.len());

    let mut nodes: Vec<NodeId> = vec![depot.node];
    nodes.extend(stops.iter().map(|s| s.node));
    let matrix = travel_matrix(&net, &nodes, cfg.objective).map_err(at("network/matrix", network_kind))?;

    let plan = solve_vrp_with(
        &matrix,
        &stops,
        &depot,
        &cfg.fleet,
        cfg.objective,
        cfg.seed,
        &cfg.solver,
    )
    .map_err(at("vrp", vrp_kind))?;
    plan.check(&stops, &cfg.fleet).map_err(at("vrp", vrp_kind))?;
    check_mass(&demands, &stops, &plan)?;
    log::info!("vrp: {} trips on {} trucks", plan.trip_count, plan.fleet_size);

    let metrics = route_metrics(&plan, &matrix, &stops, &depot, &cfg.fleet).map_err(at("metrics", vrp_kind))?;
    let summary = summarize(cfg, &stops, &plan, &metrics, factors.as_ref())?;

    let comparison = match &cfg.existing {
        None => None,
        Some(existing) => {
            let proposed = match &cfg.proposed_override {
                Some(p) => p.clone(),
                None if factors.is_some() => summary.clone(),
                None => {
                    return Err(PipelineError::new(
                        "impact",
                        ErrorKind::Config,
                        "comparing against an existing scenario needs impact.factors or a proposed.* block",
                    ))
                }
            };
            Some(compare_scenarios(existing, &proposed).map_err(at("impact", impact_kind))?)
        }
    };

    let geometry = emit_route_geometry(&plan, &stops, &depot, &net).map_err(at("geometry", network_kind))?;

    Ok(PipelineOutput {
        network: net,
        demands,
        depot,
        stops,
        coverage,
        plan,
        metrics,
        summary,
        comparison,
        geometry,
    })
}

/// Writes the stop table, plan table, route geometry, summary and, when a
/// comparison was made, both report formats. Returns the written paths.
pub fn write_outputs(out: &PipelineOutput, dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    let io = |e: std::io::Error| PipelineError::new("output", ErrorKind::Data, e);
    fs::create_dir_all(dir).map_err(io)?;
    let mut written = Vec::new();

    let p = dir.join(STOPS_FILE);
    write_stops(&p, &out.stops).map_err(at("output", coverage_kind))?;
    written.push(p);

    let p = dir.join(PLAN_FILE);
    write_plan(&p, &out.plan).map_err(at("output", vrp_kind))?;
    written.push(p);

    let p = dir.join(ROUTES_FILE);
    let mut text = serde_json::to_string_pretty(&out.geometry).expect("json values serialize");
    text.push('\n');
    fs::write(&p, text).map_err(io)?;
    written.push(p);

    let p = dir.join(SUMMARY_FILE);
    fs::write(&p, summary_to_kv(&out.summary)).map_err(io)?;
    written.push(p);

    if let Some(report) = &out.comparison {
        let p = dir.join(REPORT_TABLE_FILE);
        fs::write(&p, format_table(report)).map_err(io)?;
        written.push(p);
        let p = dir.join(REPORT_TEXT_FILE);
        fs::write(&p, format_text(report)).map_err(io)?;
        written.push(p);
    }
    Ok(written)
}

pub fn run_pipeline(cfg: &ScenarioConfig, out_dir: &Path) -> Result<PipelineOutput, PipelineError> {
    let out = plan_scenario(cfg)?;
    write_outputs(&out, out_dir)?;
    Ok(out)
}
