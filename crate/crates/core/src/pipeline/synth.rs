use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coverage::{Building, BUILDING_COLUMNS};
use crate::kv::KvFile;
use crate::network::{write_network, Edge, Node, RoadNetwork};
use crate::table;

use super::{ErrorKind, PipelineError};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCitySpec {
    pub seed: u64,
    /// Blocks along x.
    pub cols: u32,
    /// Blocks along y.
    pub rows: u32,
    pub block_m: f64,
    pub buildings_per_block: u32,
    /// Dwelling units per building, inclusive range.
    pub units_min: u32,
    pub units_max: u32,
    pub speed_kmh: f64,
}

impl Default for SyntheticCitySpec {
    fn default() -> Self {
        SyntheticCitySpec {
            seed: 0,
            cols: 3,
            rows: 3,
            block_m: 200.0,
            buildings_per_block: 7,
            units_min: 4,
            units_max: 16,
            speed_kmh: 40.0,
        }
    }
}

const SPEC_KEYS: &[&str] = &[
    "seed",
    "cols",
    "rows",
    "block_m",
    "buildings_per_block",
    "units_min",
    "units_max",
    "speed_kmh",
];

impl SyntheticCitySpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.cols == 0 || self.rows == 0 {
            return Err("grid dimensions must be positive".into());
        }
        if !(self.block_m.is_finite() && self.block_m > 0.0) {
            return Err(format!("block_m must be > 0, got {}", self.block_m));
        }
        if !(self.speed_kmh.is_finite() && self.speed_kmh > 0.0) {
            return Err(format!("speed_kmh must be > 0, got {}", self.speed_kmh));
        }
        if self.units_min > self.units_max {
            return Err(format!("units_min {} > units_max {}", self.units_min, self.units_max));
        }
        Ok(())
    }

    pub fn from_kv(kv: &KvFile) -> Result<Self, PipelineError> {
        let err = |e: String| PipelineError::new("config", ErrorKind::Config, e);
        let kv_err = |e: crate::kv::KvError| PipelineError::new("config", ErrorKind::Config, e);
        kv.reject_unknown(SPEC_KEYS, &[]).map_err(kv_err)?;
        let d = SyntheticCitySpec::default();
        let spec = SyntheticCitySpec {
            seed: kv.get_or("seed", d.seed).map_err(kv_err)?,
            cols: kv.get_or("cols", d.cols).map_err(kv_err)?,
            rows: kv.get_or("rows", d.rows).map_err(kv_err)?,
            block_m: kv.get_or("block_m", d.block_m).map_err(kv_err)?,
            buildings_per_block: kv
                .get_or("buildings_per_block", d.buildings_per_block)
                .map_err(kv_err)?,
            units_min: kv.get_or("units_min", d.units_min).map_err(kv_err)?,
            units_max: kv.get_or("units_max", d.units_max).map_err(kv_err)?,
            speed_kmh: kv.get_or("speed_kmh", d.speed_kmh).map_err(kv_err)?,
        };
        spec.validate().map_err(|e| err(format!("{}: {e}", kv.origin())))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCity {
    pub network: RoadNetwork,
    pub buildings: Vec<Building>,
}

/// Grid street network with two-way streets and buildings scattered inside
/// the blocks. Node ids run row by row from 1 at the origin corner.
pub fn synthetic_city(spec: &SyntheticCitySpec) -> Result<SyntheticCity, String> {
    spec.validate()?;
    let (nx, ny) = (spec.cols as u64 + 1, spec.rows as u64 + 1);
    let id = |i: u64, j: u64| j * nx + i + 1;
    let mut nodes = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            nodes.push(Node::new(id(i, j), i as f64 * spec.block_m, j as f64 * spec.block_m));
        }
    }
    let mut edges = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if i + 1 < nx {
                edges.push(Edge::new(id(i, j), id(i + 1, j), spec.block_m, spec.speed_kmh));
                edges.push(Edge::new(id(i + 1, j), id(i, j), spec.block_m, spec.speed_kmh));
            }
            if j + 1 < ny {
                edges.push(Edge::new(id(i, j), id(i, j + 1), spec.block_m, spec.speed_kmh));
                edges.push(Edge::new(id(i, j + 1), id(i, j), spec.block_m, spec.speed_kmh));
            }
        }
    }
    let network = RoadNetwork::new(nodes, edges).map_err(|e| e.to_string())?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let margin = 0.1 * spec.block_m;
    let mut buildings = Vec::new();
    for bj in 0..spec.rows {
        for bi in 0..spec.cols {
            let (x0, y0) = (bi as f64 * spec.block_m, bj as f64 * spec.block_m);
            for _ in 0..spec.buildings_per_block {
                let x = x0 + rng.gen_range(margin..=spec.block_m - margin);
                let y = y0 + rng.gen_range(margin..=spec.block_m - margin);
                let units = rng.gen_range(spec.units_min..=spec.units_max);
                buildings.push(Building {
                    id: buildings.len() as u64 + 1,
                    x_m: (x * 100.0).round() / 100.0,
                    y_m: (y * 100.0).round() / 100.0,
                    dwelling_units: units as i64,
                });
            }
        }
    }
    Ok(SyntheticCity { network, buildings })
}

/// Writes `network/`, `buildings.csv` and a `scenario.cfg` with the depot on
/// the origin corner into `dir`.
pub fn gen_synthetic_city(spec: &SyntheticCitySpec, dir: &Path) -> Result<SyntheticCity, PipelineError> {
    let city = synthetic_city(spec).map_err(|e| PipelineError::new("config", ErrorKind::Config, e))?;
    let io = |e: std::io::Error| PipelineError::new("output", ErrorKind::Data, e);
    let net_dir = dir.join("network");
    fs::create_dir_all(&net_dir).map_err(io)?;
    write_network(&net_dir, &city.network).map_err(|e| PipelineError::new("output", ErrorKind::Data, e))?;
    table::write_file(&dir.join("buildings.csv"), BUILDING_COLUMNS, &city.buildings)
        .map_err(|e| PipelineError::new("output", ErrorKind::Data, e))?;
    let cfg = format!(
        "# synthetic {}x{} grid, seed {}\nnetwork=network\nbuildings=buildings.csv\ndepot.x_m=0\ndepot.y_m=0\n\
         seed={}\nobjective=time\nfleet.speed_kmh={}\n",
        spec.cols, spec.rows, spec.seed, spec.seed, spec.speed_kmh
    );
    fs::write(dir.join("scenario.cfg"), cfg).map_err(io)?;
    Ok(city)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{shortest_path, Metric};

    fn spec(cols: u32, rows: u32) -> SyntheticCitySpec {
        SyntheticCitySpec {
            cols,
            rows,
            ..Default::default()
        }
    }

    #[test]
    fn two_by_two_grid_counts() {
        let city = synthetic_city(&spec(2, 2)).unwrap();
        assert_eq!(city.network.nodes().len(), 9);
        assert_eq!(city.network.edges().len(), 24);
        assert_eq!(city.buildings.len(), 28);
    }

    #[test]
    fn strongly_connected() {
        let city = synthetic_city(&spec(3, 2)).unwrap();
        let ids: Vec<_> = city.network.nodes().iter().map(|n| n.id).collect();
        for &a in &ids {
            for &b in &ids {
                assert!(shortest_path(&city.network, a, b, Metric::Time).is_ok());
            }
        }
    }

    #[test]
    fn same_seed_same_files() {
        let s = SyntheticCitySpec {
            seed: 11,
            ..Default::default()
        };
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        gen_synthetic_city(&s, a.path()).unwrap();
        gen_synthetic_city(&s, b.path()).unwrap();
        for f in [
            "network/nodes.csv",
            "network/edges.csv",
            "buildings.csv",
            "scenario.cfg",
        ] {
            assert_eq!(
                fs::read(a.path().join(f)).unwrap(),
                fs::read(b.path().join(f)).unwrap(),
                "{f}"
            );
        }
        let other = synthetic_city(&SyntheticCitySpec {
            seed: 12,
            ..Default::default()
        })
        .unwrap();
        assert_ne!(other.buildings, synthetic_city(&s).unwrap().buildings);
    }

    #[test]
    fn zero_density_gives_no_buildings() {
        let s = SyntheticCitySpec {
            buildings_per_block: 0,
            ..Default::default()
        };
        let dir = tempfile::tempdir().unwrap();
        let city = gen_synthetic_city(&s, dir.path()).unwrap();
        assert!(city.buildings.is_empty());
        let text = fs::read_to_string(dir.path().join("buildings.csv")).unwrap();
        assert_eq!(text.trim(), "id,x_m,y_m,dwelling_units");
        assert_eq!(city.network.nodes().len(), 16);
    }

    #[test]
    fn buildings_stay_inside_blocks() {
        let s = spec(3, 3);
        let city = synthetic_city(&s).unwrap();
        for b in &city.buildings {
            assert!(b.x_m > 0.0 && b.x_m < 600.0 && b.y_m > 0.0 && b.y_m < 600.0);
            assert!((4..=16).contains(&b.dwelling_units));
        }
    }

    #[test]
    fn bad_spec() {
        assert!(synthetic_city(&spec(0, 2)).is_err());
        let s = SyntheticCitySpec {
            units_min: 5,
            units_max: 2,
            ..Default::default()
        };
        assert!(synthetic_city(&s).is_err());
    }
}
