//! Planning toolkit for municipal solid-waste collection.
//!
//! The pipeline runs in four stages, each in its own module:
//!
//! * [`network`]: directed road graph, shortest paths, travel-cost matrices.
//! * [`coverage`]: household demand aggregation and stop-point placement
//!   under a service radius and a per-stop load cap.
//! * [`vrp`]: capacitated multi-trip routing from a single depot, fleet
//!   sizing against a working shift, and an exhaustive oracle for small
//!   instances.
//! * [`impact`]: linear energy/emission models, factor calibration, and
//!   existing-vs-proposed scenario comparison.
//!
//! [`pipeline`] wires them together behind a flat key-value configuration
//! and also generates seeded synthetic grid cities.

pub mod coverage;
pub mod impact;
pub mod kv;
pub mod network;
pub mod pipeline;
pub mod table;
pub mod vrp;

pub use network::{Metric, NodeId, RoadNetwork};
