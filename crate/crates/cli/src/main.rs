use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use wasteroute::coverage::{
    aggregate_demand, read_buildings, read_stops, verify_coverage, CoverageConfig, DistanceMode,
};
use wasteroute::impact::{compare_scenarios, format_table, format_text, read_summary, ReportFormat};
use wasteroute::kv::KvFile;
use wasteroute::network::{load_network, Metric};
use wasteroute::pipeline::{
    gen_synthetic_city, run_pipeline, ErrorKind, PipelineError, ScenarioConfig, SyntheticCitySpec,
};

#[derive(Parser, Debug)]
#[command(
    name = "wasteroute",
    version,
    about = "Plan solid-waste collection stops, routes and fleets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Place stops, route the fleet and write plan, geometry and reports.
    Plan {
        config: PathBuf,
        #[arg(long)]
        objective: Option<Metric>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value = "table")]
        format: ReportFormat,
    },
    /// Generate a seeded grid city with buildings and a scenario config.
    Synth {
        spec: PathBuf,
        #[arg(long, default_value = "city")]
        out: PathBuf,
    },
    /// Compare two scenario summaries.
    Compare {
        existing: PathBuf,
        proposed: PathBuf,
        #[arg(long, default_value = "table")]
        format: ReportFormat,
    },
    /// Audit a stops table against buildings on a network directory.
    Verify {
        stops: PathBuf,
        buildings: PathBuf,
        network: PathBuf,
        #[arg(long, default_value_t = 300.0)]
        radius_m: f64,
        #[arg(long, default_value = "network")]
        distance_mode: DistanceMode,
        #[arg(long, default_value_t = 520.0)]
        max_stop_load_kg: f64,
        #[arg(long, default_value_t = wasteroute::coverage::DEFAULT_GENERATION_RATE)]
        rate: f64,
    },
}

fn data(stage: &'static str) -> impl Fn(String) -> PipelineError {
    move |e| PipelineError::new(stage, ErrorKind::Data, e)
}

fn plan(
    config: &Path,
    objective: Option<Metric>,
    seed: Option<u64>,
    out: &Path,
    format: ReportFormat,
) -> Result<(), PipelineError> {
    let mut cfg = ScenarioConfig::read(config)?;
    if let Some(o) = objective {
        cfg.objective = o;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let result = run_pipeline(&cfg, out)?;
    let s = &result.summary;
    println!(
        "{} stops, {} trips, {} trucks, {:.3} km, {:.3} h",
        s.n_stops, result.plan.trip_count, s.n_trucks, s.total_km, s.total_time_h
    );
    if let Some(report) = &result.comparison {
        match format {
            ReportFormat::Table => print!("{}", format_table(report)),
            ReportFormat::Text => print!("{}", format_text(report)),
        }
    }
    info!("outputs written to {}", out.display());
    Ok(())
}

fn synth(spec_path: &Path, out: &Path) -> Result<(), PipelineError> {
    let kv = KvFile::read(spec_path).map_err(|e| PipelineError::new("config", ErrorKind::Config, e))?;
    let spec = SyntheticCitySpec::from_kv(&kv)?;
    let city = gen_synthetic_city(&spec, out)?;
    println!(
        "{} nodes, {} edges, {} buildings in {}",
        city.network.nodes().len(),
        city.network.edges().len(),
        city.buildings.len(),
        out.display()
    );
    Ok(())
}

fn compare(existing: &Path, proposed: &Path, format: ReportFormat) -> Result<(), PipelineError> {
    let load = |p: &Path| read_summary(p).map_err(|e| PipelineError::new("impact", ErrorKind::Data, e));
    let report = compare_scenarios(&load(existing)?, &load(proposed)?).map_err(|e| data("impact")(e.to_string()))?;
    match format {
        ReportFormat::Table => print!("{}", format_table(&report)),
        ReportFormat::Text => print!("{}", format_text(&report)),
    }
    Ok(())
}

fn verify(
    stops: &Path,
    buildings: &Path,
    network: &Path,
    cfg: CoverageConfig,
    rate: f64,
) -> Result<bool, PipelineError> {
    cfg.validate()
        .map_err(|e| PipelineError::new("config", ErrorKind::Config, e))?;
    let net = load_network(network, 40.0).map_err(|e| data("network/load")(e.to_string()))?;
    let buildings = read_buildings(buildings).map_err(|e| data("buildings")(e.to_string()))?;
    let demands = aggregate_demand(&buildings, rate).map_err(|e| PipelineError::new("config", ErrorKind::Config, e))?;
    let stops = read_stops(stops).map_err(|e| data("coverage")(e.to_string()))?;
    let report = verify_coverage(&stops, &demands, &net, &cfg);
    println!("uncovered: {:?}", report.uncovered);
    println!("multiply assigned: {:?}", report.multiply_assigned);
    println!("unknown ids: {:?}", report.unknown_ids);
    println!("overloaded stops: {:?}", report.overloaded_stops);
    println!("load mismatches: {:?}", report.load_mismatches);
    println!("max load: {:.2} kg", report.max_load_kg);
    for bin in &report.load_histogram {
        println!("  [{:>8.1}, {:>8.1}) kg: {}", bin.lower_kg, bin.upper_kg, bin.count);
    }
    Ok(report.is_clean())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan {
            config,
            objective,
            seed,
            out,
            format,
        } => plan(&config, objective, seed, &out, format),
        Command::Synth { spec, out } => synth(&spec, &out),
        Command::Compare {
            existing,
            proposed,
            format,
        } => compare(&existing, &proposed, format),
        Command::Verify {
            stops,
            buildings,
            network,
            radius_m,
            distance_mode,
            max_stop_load_kg,
            rate,
        } => {
            let cfg = CoverageConfig {
                radius_m,
                distance_mode,
                max_stop_load_kg,
                ..Default::default()
            };
            match verify(&stops, &buildings, &network, cfg, rate) {
                Ok(true) => Ok(()),
                Ok(false) => {
                    eprintln!("error: coverage audit found problems");
                    return ExitCode::from(ErrorKind::Data.exit_code() as u8);
                }
                Err(e) => Err(e),
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
