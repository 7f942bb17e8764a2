//! Datasets of networks: simulated generators, OpenFlights ingestion and
//! JSON persistence.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use log::{info, warn};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::spectral::Network;

/// Default noise level of [`generate_clustered`].
pub const DEFAULT_SIGMA: f64 = 5e-2;

/// Ordered collection of networks sharing a node count.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    networks: Vec<Network>,
    labels: Vec<Option<String>>,
    pub meta: BTreeMap<String, String>,
}

impl Dataset {
    pub fn new(
        networks: Vec<Network>,
        labels: Vec<Option<String>>,
        meta: BTreeMap<String, String>,
    ) -> Result<Self> {
        let first = networks
            .first()
            .ok_or_else(|| Error::DegenerateDataset("empty dataset".into()))?;
        let n = first.n();
        if labels.len() != networks.len() {
            return Err(Error::SizeMismatch {
                expected: networks.len(),
                found: labels.len(),
            });
        }
        let mut ids = HashSet::new();
        for net in &networks {
            if net.n() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    found: net.n(),
                });
            }
            if !ids.insert(net.id()) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate network id {:?}",
                    net.id()
                )));
            }
        }
        Ok(Self {
            n,
            networks,
            labels,
            meta,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.networks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.networks.is_empty()
    }

    pub fn networks(&self) -> &[Network] {
        &self.networks
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    /// Labels with missing entries replaced by the empty string.
    pub fn label_strings(&self) -> Vec<String> {
        self.labels
            .iter()
            .map(|l| l.clone().unwrap_or_default())
            .collect()
    }
}

fn adjacency_from_edges(n: usize, edges: &[(usize, usize, f64)]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for &(a, b, w) in edges {
        m[(a, b)] = w;
        m[(b, a)] = w;
    }
    m
}

/// Topology of a member of the two-parameter family.
pub fn two_parameter_topology(t: f64) -> &'static str {
    if t < 0.0 {
        "eight"
    } else if t > 0.0 {
        "hourglass"
    } else {
        "tree"
    }
}

/// The six-node network `X(s, t)`.
///
/// Nodes are numbered 0..6. The tree is {0,2}, {1,2}, {3,4}, {3,5} with unit
/// weight plus the central edge {2,3} of weight `s`. For `t < 0` the end
/// triangles are closed by {0,1} and {4,5} ("eight"); for `t > 0` the edges
/// {0,3} and {2,4} form two triangles sharing the central edge
/// ("hourglass"). Added edges weigh `|t|`.
pub fn two_parameter_network(id: impl Into<String>, s: f64, t: f64) -> Result<Network> {
    let mut edges = vec![
        (0, 2, 1.0),
        (1, 2, 1.0),
        (3, 4, 1.0),
        (3, 5, 1.0),
        (2, 3, s),
    ];
    if t < 0.0 {
        edges.extend([(0, 1, -t), (4, 5, -t)]);
    } else if t > 0.0 {
        edges.extend([(0, 3, t), (2, 4, t)]);
    }
    Network::new(id, adjacency_from_edges(6, &edges))
}

/// `num` networks `X(s, t)` with `(s, t)` uniform on `[½, 3⁄2] × [−½, ½]`.
///
/// Labels hold the topology; the sampled parameters are stored in `meta`
/// under `<id>.s` and `<id>.t`.
pub fn generate_two_parameter(num: usize, seed: u64) -> Result<Dataset> {
    if num == 0 {
        return Err(Error::InvalidArgument("num must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut networks = Vec::with_capacity(num);
    let mut labels = Vec::with_capacity(num);
    let mut meta = BTreeMap::new();
    meta.insert("generator".into(), "two-parameter".into());
    meta.insert("seed".into(), seed.to_string());
    meta.insert("num".into(), num.to_string());
    for k in 0..num {
        let s: f64 = rng.random_range(0.5..=1.5);
        let t: f64 = rng.random_range(-0.5..=0.5);
        let id = format!("x{k:02}");
        meta.insert(format!("{id}.s"), format!("{s:?}"));
        meta.insert(format!("{id}.t"), format!("{t:?}"));
        labels.push(Some(two_parameter_topology(t).to_string()));
        networks.push(two_parameter_network(id, s, t)?);
    }
    Dataset::new(networks, labels, meta)
}

/// Cluster templates of [`generate_clustered`], all on ten nodes.
pub fn cluster_templates() -> Vec<(&'static str, DMatrix<f64>)> {
    let n = 10;
    let star = DMatrix::from_fn(n, n, |i, j| if (i == 0) ^ (j == 0) { 1.0 } else { 0.0 });
    // Two adjacent hubs, each linked to every leaf; leaves not interlinked.
    let two_hub = DMatrix::from_fn(n, n, |i, j| {
        if i == j || (i >= 2 && j >= 2) {
            0.0
        } else {
            1.0
        }
    });
    let complete = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 0.5 });
    vec![
        ("star", star),
        ("two-hub-star", two_hub),
        ("complete", complete),
    ]
}

/// `3 · per_cluster` ten-node networks: each template perturbed by adding
/// Gaussian noise of standard deviation `sigma` to every off-diagonal weight
/// and taking absolute values. Diagonals stay zero.
pub fn generate_clustered(per_cluster: usize, sigma: f64, seed: u64) -> Result<Dataset> {
    if per_cluster == 0 {
        return Err(Error::InvalidArgument(
            "per_cluster must be at least 1".into(),
        ));
    }
    let noise = Normal::new(0.0, sigma)
        .map_err(|_| Error::InvalidArgument(format!("invalid sigma {sigma}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut networks = Vec::new();
    let mut labels = Vec::new();
    for (name, template) in cluster_templates() {
        let n = template.nrows();
        for k in 0..per_cluster {
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in (i + 1)..n {
                    let w = (template[(i, j)] + noise.sample(&mut rng)).abs();
                    m[(i, j)] = w;
                    m[(j, i)] = w;
                }
            }
            networks.push(Network::new(format!("{name}-{k:02}"), m)?);
            labels.push(Some(name.to_string()));
        }
    }
    let mut meta = BTreeMap::new();
    meta.insert("generator".into(), "clustered".into());
    meta.insert("seed".into(), seed.to_string());
    meta.insert("per_cluster".into(), per_cluster.to_string());
    meta.insert("sigma".into(), format!("{sigma:?}"));
    Dataset::new(networks, labels, meta)
}

/// Assignment of countries to the macro-regions used as network nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMapping {
    pub regions: Vec<String>,
    pub country_to_region: BTreeMap<String, String>,
}

const DEFAULT_REGIONS: &str = include_str!("../data/regions.json");

impl RegionMapping {
    pub fn new(regions: Vec<String>, country_to_region: BTreeMap<String, String>) -> Result<Self> {
        let mapping = Self {
            regions,
            country_to_region,
        };
        mapping.validate()?;
        Ok(mapping)
    }

    /// The six macro-regions in and around Europe.
    pub fn default_europe() -> Self {
        serde_json::from_str(DEFAULT_REGIONS).expect("bundled region mapping is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let mapping: Self = serde_json::from_str(&text).map_err(|e| Error::Schema {
            pointer: String::new(),
            message: e.to_string(),
        })?;
        mapping.validate()?;
        Ok(mapping)
    }

    fn validate(&self) -> Result<()> {
        if self.regions.is_empty() {
            return Err(Error::Schema {
                pointer: "/regions".into(),
                message: "at least one region is required".into(),
            });
        }
        let known: HashSet<&String> = self.regions.iter().collect();
        for (country, region) in &self.country_to_region {
            if !known.contains(region) {
                return Err(Error::Schema {
                    pointer: format!("/country_to_region/{}", escape_pointer(country)),
                    message: format!("unknown region {region:?}"),
                });
            }
        }
        Ok(())
    }

    pub fn region_index(&self, country: &str) -> Option<usize> {
        let region = self.country_to_region.get(country)?;
        self.regions.iter().position(|r| r == region)
    }
}

/// Per-airline route tallies gathered during ingestion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RouteCounts {
    pub total: u64,
    pub mapped: u64,
    pub unmapped: u64,
    pub unknown_airport: u64,
    /// Upper-triangular cell counts `(r1, r2)` with `r1 ≤ r2`.
    pub cells: BTreeMap<(usize, usize), u64>,
}

fn is_null(field: &str) -> bool {
    field.is_empty() || field == "\\N"
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader)
}

struct AirportIndex {
    by_id: HashMap<String, String>,
    by_code: HashMap<String, String>,
}

impl AirportIndex {
    fn read<R: Read>(reader: R, file: &str) -> Result<Self> {
        let mut by_id = HashMap::new();
        let mut by_code = HashMap::new();
        for record in csv_reader(reader).records() {
            let record = record.map_err(|e| csv_error(file, &e))?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() < 6 {
                return Err(Error::Parse {
                    file: file.into(),
                    line,
                    message: format!("expected at least 6 fields, found {}", record.len()),
                });
            }
            let country = record[3].to_string();
            if !is_null(&record[0]) {
                by_id.insert(record[0].to_string(), country.clone());
            }
            for code in [&record[4], &record[5]] {
                if !is_null(code) {
                    by_code.insert(code.to_string(), country.clone());
                }
            }
        }
        Ok(Self { by_id, by_code })
    }

    fn country(&self, code: &str, id: &str) -> Option<&String> {
        if !is_null(id) {
            if let Some(c) = self.by_id.get(id) {
                return Some(c);
            }
        }
        if !is_null(code) {
            return self.by_code.get(code);
        }
        None
    }
}

fn csv_error(file: &str, e: &csv::Error) -> Error {
    Error::Parse {
        file: file.into(),
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}

/// Tallies routes of the requested airlines in a single pass over the
/// routes file.
pub fn count_routes<R: Read, A: Read>(
    routes: R,
    airports: A,
    mapping: &RegionMapping,
    airlines: &[String],
) -> Result<BTreeMap<String, RouteCounts>> {
    let index = AirportIndex::read(airports, "airports")?;
    let mut counts: BTreeMap<String, RouteCounts> = airlines
        .iter()
        .map(|a| (a.clone(), RouteCounts::default()))
        .collect();
    for record in csv_reader(routes).records() {
        let record = record.map_err(|e| csv_error("routes", &e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() < 9 {
            return Err(Error::Parse {
                file: "routes".into(),
                line,
                message: format!("expected 9 fields, found {}", record.len()),
            });
        }
        let Some(tally) = counts.get_mut(&record[0]) else {
            continue;
        };
        tally.total += 1;
        let src = index.country(&record[2], &record[3]);
        let dst = index.country(&record[4], &record[5]);
        let (Some(src), Some(dst)) = (src, dst) else {
            warn!(
                "routes:{line}: unknown airport in {}-{} for {}; counted in the total only",
                &record[2], &record[4], &record[0]
            );
            tally.unknown_airport += 1;
            continue;
        };
        match (mapping.region_index(src), mapping.region_index(dst)) {
            (Some(a), Some(b)) => {
                tally.mapped += 1;
                *tally.cells.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
            _ => tally.unmapped += 1,
        }
    }
    Ok(counts)
}

/// Builds one network per airline over the mapping's regions. The weight of
/// edge {r1, r2} is the share of the airline's routes (all routes worldwide,
/// either direction) joining those regions; routes inside a region go on the
/// diagonal. Airlines without routes are skipped.
pub fn ingest_openflights(
    routes: impl AsRef<Path>,
    airports: impl AsRef<Path>,
    mapping: &RegionMapping,
    airlines: &[String],
) -> Result<Dataset> {
    let routes = BufReader::new(File::open(routes.as_ref())?);
    let airports = BufReader::new(File::open(airports.as_ref())?);
    let counts = count_routes(routes, airports, mapping, airlines)?;
    dataset_from_counts(&counts, mapping, airlines)
}

pub fn dataset_from_counts(
    counts: &BTreeMap<String, RouteCounts>,
    mapping: &RegionMapping,
    airlines: &[String],
) -> Result<Dataset> {
    let n = mapping.regions.len();
    let mut networks = Vec::new();
    let mut labels = Vec::new();
    let mut meta = BTreeMap::new();
    meta.insert("source".into(), "openflights".into());
    meta.insert("regions".into(), mapping.regions.join(","));
    let mut seen = HashSet::new();
    for airline in airlines {
        if !seen.insert(airline) {
            continue;
        }
        let tally = &counts[airline];
        if tally.total == 0 {
            warn!("airline {airline} has no routes; skipped");
            continue;
        }
        info!(
            "airline {airline}: {} routes ({} mapped, {} outside the regions, {} unknown airports)",
            tally.total, tally.mapped, tally.unmapped, tally.unknown_airport
        );
        let mut m = DMatrix::zeros(n, n);
        for (&(a, b), &c) in &tally.cells {
            let w = c as f64 / tally.total as f64;
            m[(a, b)] = w;
            m[(b, a)] = w;
        }
        meta.insert(format!("{airline}.routes"), tally.total.to_string());
        meta.insert(format!("{airline}.mapped"), tally.mapped.to_string());
        meta.insert(
            format!("{airline}.unknown_airports"),
            tally.unknown_airport.to_string(),
        );
        networks.push(Network::new(airline.clone(), m)?);
        labels.push(Some(airline.clone()));
    }
    if networks.is_empty() {
        return Err(Error::EmptySelection);
    }
    Dataset::new(networks, labels, meta)
}

#[derive(Serialize)]
struct NetworkRecord<'a> {
    id: &'a str,
    label: Option<&'a str>,
    adjacency: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct DatasetRecord<'a> {
    n: usize,
    networks: Vec<NetworkRecord<'a>>,
    meta: &'a BTreeMap<String, String>,
}

pub fn to_json(dataset: &Dataset) -> Result<String> {
    let record = DatasetRecord {
        n: dataset.n,
        networks: dataset
            .networks
            .iter()
            .zip(&dataset.labels)
            .map(|(net, label)| NetworkRecord {
                id: net.id(),
                label: label.as_deref(),
                adjacency: net.to_rows(),
            })
            .collect(),
        meta: &dataset.meta,
    };
    serde_json::to_string_pretty(&record).map_err(|e| Error::Io(e.into()))
}

pub fn save(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    out.write_all(to_json(dataset)?.as_bytes())?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Dataset> {
    let text = std::fs::read_to_string(path.as_ref())?;
    from_json(&text)
}

fn escape_pointer(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        pointer: pointer.into(),
        message: message.into(),
    }
}

/// Parses and validates a dataset document. Errors carry a JSON pointer to
/// the offending field.
pub fn from_json(text: &str) -> Result<Dataset> {
    let root: Value = serde_json::from_str(text).map_err(|e| schema("", e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| schema("", "expected an object"))?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .filter(|&n| n >= 1)
        .ok_or_else(|| schema("/n", "expected a positive integer"))? as usize;
    let items = obj
        .get("networks")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("/networks", "expected an array"))?;
    if items.is_empty() {
        return Err(schema("/networks", "expected at least one network"));
    }

    let mut networks = Vec::with_capacity(items.len());
    let mut labels = Vec::with_capacity(items.len());
    let mut ids = HashSet::new();
    for (k, item) in items.iter().enumerate() {
        let base = format!("/networks/{k}");
        let item = item
            .as_object()
            .ok_or_else(|| schema(&base, "expected an object"))?;
        let id = item
            .get("id")
            .and_then(Value::as_str)
            .ok_or_else(|| schema(format!("{base}/id"), "expected a string"))?;
        if !ids.insert(id.to_string()) {
            return Err(schema(format!("{base}/id"), format!("duplicate id {id:?}")));
        }
        let label = match item.get("label") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(schema(format!("{base}/label"), "expected a string or null")),
        };
        let rows = item
            .get("adjacency")
            .and_then(Value::as_array)
            .ok_or_else(|| schema(format!("{base}/adjacency"), "expected an array"))?;
        if rows.len() != n {
            return Err(schema(
                format!("{base}/adjacency"),
                format!("expected {n} rows, found {}", rows.len()),
            ));
        }
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| schema(format!("{base}/adjacency/{i}"), "expected an array"))?;
            if row.len() != n {
                return Err(schema(
                    format!("{base}/adjacency/{i}"),
                    format!("expected {n} entries, found {}", row.len()),
                ));
            }
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = v.as_f64().ok_or_else(|| {
                    schema(format!("{base}/adjacency/{i}/{j}"), "expected a number")
                })?;
            }
        }
        let net = Network::new(id, m).map_err(|e| match e {
            Error::NonSymmetric { i, j, .. } => {
                schema(format!("{base}/adjacency/{i}/{j}"), e.to_string())
            }
            other => schema(format!("{base}/adjacency"), other.to_string()),
        })?;
        networks.push(net);
        labels.push(label);
    }

    let mut meta = BTreeMap::new();
    match obj.get("meta") {
        None | Some(Value::Null) => {}
        Some(Value::Object(entries)) => {
            for (key, value) in entries {
                let value = value.as_str().ok_or_else(|| {
                    schema(
                        format!("/meta/{}", escape_pointer(key)),
                        "expected a string",
                    )
                })?;
                meta.insert(key.clone(), value.to_string());
            }
        }
        Some(_) => return Err(schema("/meta", "expected an object")),
    }
    Dataset::new(networks, labels, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::spectrum;

    fn edge_count(net: &Network) -> usize {
        let a = net.adjacency();
        let mut count = 0;
        for i in 0..a.nrows() {
            for j in (i + 1)..a.ncols() {
                if a[(i, j)] != 0.0 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn two_parameter_topologies() {
        let tree = two_parameter_network("t", 1.0, 0.0).unwrap();
        assert_eq!(edge_count(&tree), 5);
        assert!((0..6).all(|i| tree.adjacency()[(i, i)] == 0.0));
        let trace: f64 = spectrum(&tree).unwrap().values().iter().sum();
        assert!(trace.abs() < 1e-12);
        assert_eq!(
            edge_count(&two_parameter_network("e", 1.0, -0.3).unwrap()),
            7
        );
        assert_eq!(
            edge_count(&two_parameter_network("h", 1.0, 0.3).unwrap()),
            7
        );
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(
            generate_two_parameter(16, 7).unwrap(),
            generate_two_parameter(16, 7).unwrap()
        );
        assert_ne!(
            generate_two_parameter(4, 7).unwrap(),
            generate_two_parameter(4, 8).unwrap()
        );
        assert_eq!(
            generate_clustered(5, 0.05, 42).unwrap(),
            generate_clustered(5, 0.05, 42).unwrap()
        );
    }

    #[test]
    fn two_parameter_ranges_and_labels() {
        let d = generate_two_parameter(50, 3).unwrap();
        assert_eq!(d.n(), 6);
        for (net, label) in d.networks().iter().zip(d.labels()) {
            let s: f64 = d.meta[&format!("{}.s", net.id())].parse().unwrap();
            let t: f64 = d.meta[&format!("{}.t", net.id())].parse().unwrap();
            assert!((0.5..=1.5).contains(&s));
            assert!((-0.5..=0.5).contains(&t));
            assert_eq!(label.as_deref(), Some(two_parameter_topology(t)));
            assert_eq!(net.adjacency()[(2, 3)], s);
        }
    }

    #[test]
    fn noiseless_clusters_are_templates() {
        let d = generate_clustered(2, 0.0, 1).unwrap();
        assert_eq!(d.len(), 6);
        let templates = cluster_templates();
        for (k, net) in d.networks().iter().enumerate() {
            assert_eq!(net.adjacency(), &templates[k / 2].1);
        }
        let s = spectrum(&d.networks()[4]).unwrap();
        for v in &s.values()[..9] {
            assert!((v + 0.5).abs() < 1e-12);
        }
        assert!((s.values()[9] - 4.5).abs() < 1e-12);
    }

    #[test]
    fn clustered_weights_are_nonnegative_with_zero_diagonal() {
        let d = generate_clustered(5, 0.05, 42).unwrap();
        assert_eq!(d.len(), 15);
        for net in d.networks() {
            let a = net.adjacency();
            assert!(a.iter().all(|&w| w >= 0.0));
            assert!((0..10).all(|i| a[(i, i)] == 0.0));
        }
    }

    #[test]
    fn schema_errors_point_at_fields() {
        let asym = r#"{"n": 2, "networks": [{"id": "a", "label": null,
            "adjacency": [[0, 1], [2, 0]]}], "meta": {}}"#;
        match from_json(asym) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/networks/0/adjacency/0/1"),
            other => panic!("unexpected {other:?}"),
        }
        let mismatch = r#"{"n": 2, "networks": [{"id": "a", "label": null,
            "adjacency": [[0, 1], [1, 0]]}, {"id": "b", "label": null,
            "adjacency": [[0, 1, 0], [1, 0, 0], [0, 0, 0]]}], "meta": {}}"#;
        match from_json(mismatch) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/networks/1/adjacency"),
            other => panic!("unexpected {other:?}"),
        }
        let dup = r#"{"n": 1, "networks": [{"id": "a", "adjacency": [[0]]},
            {"id": "a", "adjacency": [[0]]}]}"#;
        match from_json(dup) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/networks/1/id"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn default_mapping_has_six_regions() {
        let m = RegionMapping::default_europe();
        assert_eq!(m.regions.len(), 6);
        assert!(m.validate().is_ok());
        assert_eq!(
            m.region_index("France").map(|i| m.regions[i].as_str()),
            Some("Western Europe")
        );
    }
}
