use std::fmt::Write as _;
use std::str::FromStr;

use super::{ComparisonReport, Indicator, ScenarioSummary};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Table,
    Text,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "text" => Ok(ReportFormat::Text),
            other => Err(format!("unknown report format `{other}` (expected table or text)")),
        }
    }
}

/// Decimal places used when printing the percent column.
fn percent_digits(metric: Indicator) -> usize {
    match metric {
        Indicator::TotalTime => 1,
        _ => 0,
    }
}

/// Up to two decimals, trailing zeros dropped.
fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn percent(report: &ComparisonReport, metric: Indicator) -> String {
    match report.improvement(metric) {
        Some(p) => format!("{:.*}%", percent_digits(metric), p),
        None => "-".to_string(),
    }
}

type Row = (&'static str, fn(&ScenarioSummary) -> String, Option<Indicator>);

const ROWS: [Row; 13] = [
    ("Waste Collection Method", |s| s.collection_method.clone(), None),
    ("Number of Trucks", |s| s.n_trucks.to_string(), None),
    ("Truck Capacity (ton)", |s| num(s.truck_capacity_kg / 1000.0), None),
    ("Number of Stop points", |s| s.n_stops.to_string(), None),
    (
        "Average Time spent at each Collection Point (min.)",
        |s| num(s.avg_stop_time_s / 60.0),
        None,
    ),
    (
        "Average Route Distance (km)",
        |s| num(s.avg_route_km),
        Some(Indicator::AvgRouteDistance),
    ),
    (
        "Total Traveled Distance (km)",
        |s| num(s.total_km),
        Some(Indicator::TotalDistance),
    ),
    (
        "Average Route Time (hr.)",
        |s| num(s.avg_route_h),
        Some(Indicator::AvgRouteTime),
    ),
    ("Total Energy Consumption (MJ/day)", |s| num(s.energy_mj_day), None),
    (
        "Total Time Consumption (h/day)",
        |s| num(s.total_time_h),
        Some(Indicator::TotalTime),
    ),
    ("CO Emissions (g/day)", |s| num(s.co_g_day), Some(Indicator::Co)),
    ("CO₂ Emissions (g/day)", |s| num(s.co2_g_day), Some(Indicator::Co2)),
    ("NOx Emissions (g/day)", |s| num(s.nox_g_day), Some(Indicator::Nox)),
];

/// Comma-separated comparison table, one row per reported quantity.
pub fn format_table(report: &ComparisonReport) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(["Scenario", "Existing Scenario", "Proposed Scenario", "% Improvement"])
        .expect("in-memory write");
    for (label, value, metric) in ROWS {
        let p = metric.map_or_else(|| "-".to_string(), |m| percent(report, m));
        w.write_record([label.to_string(), value(&report.existing), value(&report.proposed), p])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Readable summary with unrounded-to-two-decimal percentages.
pub fn format_text(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let (e, p) = (&report.existing, &report.proposed);
    let _ = writeln!(out, "Scenario comparison: {} vs {}", e.name, p.name);
    let _ = writeln!(
        out,
        "  {}: {} trucks, {} stops, {} km total",
        e.name,
        e.n_trucks,
        e.n_stops,
        num(e.total_km)
    );
    let _ = writeln!(
        out,
        "  {}: {} trucks, {} stops, {} km total",
        p.name,
        p.n_trucks,
        p.n_stops,
        num(p.total_km)
    );
    let _ = writeln!(out);
    for (m, pct) in &report.improvements {
        let word = if *pct < 0.0 { "increase" } else { "reduction" };
        let _ = writeln!(
            out,
            "  {:<20} {:>12} -> {:<12} {:>7.2}% {}",
            m.key(),
            num(m.value(e)),
            num(m.value(p)),
            pct.abs(),
            word
        );
    }
    out
}
