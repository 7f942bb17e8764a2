//! Report documents written by the command-line tool.
//!
//! Every CSV table in [`Report::plot_tables`] is a pure function of
//! [`Report::result`], see [`plot_tables`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use spectral_bsa::barycentric::planar_point;
use spectral_bsa::{BackwardPath, BsaResult, HalfPlane, Polygon2D};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    pub dataset_meta: BTreeMap<String, String>,
    pub result: ReportResult,
    pub plot_tables: BTreeMap<String, String>,
}

impl Report {
    pub fn new(
        command: String,
        dataset_meta: BTreeMap<String, String>,
        result: ReportResult,
    ) -> Self {
        let plot_tables = plot_tables(&result);
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            dataset_meta,
            result,
            plot_tables,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReportResult {
    Bsa(BsaReport),
    Backward(BackwardReport),
    TangentPca(TangentPcaReport),
    Polygon(PolygonReport),
}

/// Identifiers and labels of the dataset, in dataset order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataIndex {
    pub ids: Vec<String>,
    pub labels: Vec<Option<String>>,
}

impl DataIndex {
    fn label(&self, i: usize) -> &str {
        self.labels[i].as_deref().unwrap_or("")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsaReport {
    pub data: DataIndex,
    pub ref_ids: Vec<String>,
    pub fit: BsaResult,
    pub variance_explained: Option<f64>,
    /// Planar embedding of the references when there are exactly three.
    pub polygon: Option<Polygon2D>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardReport {
    pub path: BackwardPath,
    /// The step with the requested number of references, fully evaluated.
    pub selected: BsaReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deformation {
    pub component: usize,
    pub t: f64,
    pub adjacency: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentPcaReport {
    pub data: DataIndex,
    pub mean: Vec<Vec<f64>>,
    pub components: Vec<Vec<Vec<f64>>>,
    pub scores: Vec<Vec<f64>>,
    pub explained_variance_ratio: Vec<f64>,
    pub total_variance: f64,
    pub deformations: Vec<Deformation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonReport {
    pub ref_ids: Vec<String>,
    pub ref_indices: Vec<usize>,
    pub polygon: Polygon2D,
    pub spectral_distances: [f64; 3],
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn num(x: f64) -> String {
    x.to_string()
}

fn polygon_tables(polygon: &Polygon2D, tables: &mut BTreeMap<String, String>) {
    tables.insert(
        "polygon-vertices".into(),
        csv(
            &["vertex", "x", "y"],
            polygon
                .vertices_2d
                .iter()
                .enumerate()
                .map(|(k, v)| vec![k.to_string(), num(v[0]), num(v[1])]),
        ),
    );
    tables.insert(
        "polygon-rays".into(),
        csv(
            &["ray", "dx", "dy"],
            polygon
                .rays
                .iter()
                .enumerate()
                .map(|(k, v)| vec![k.to_string(), num(v[0]), num(v[1])]),
        ),
    );
    tables.insert(
        "reference-points-2d".into(),
        csv(
            &["reference", "x", "y"],
            polygon
                .ref_points_2d
                .iter()
                .enumerate()
                .map(|(k, v)| vec![k.to_string(), num(v[0]), num(v[1])]),
        ),
    );
}

fn halfplane_table(halfplanes: &[HalfPlane]) -> String {
    csv(
        &["facet", "alpha_x", "alpha_y", "beta"],
        halfplanes
            .iter()
            .enumerate()
            .map(|(k, h)| vec![k.to_string(), num(h.alpha[0]), num(h.alpha[1]), num(h.beta)]),
    )
}

fn bsa_tables(report: &BsaReport, tables: &mut BTreeMap<String, String>) {
    let fit = &report.fit;
    let mut header = vec!["id".to_string(), "label".into(), "squared_error".into()];
    header.extend((0..fit.ref_indices.len()).map(|k| format!("w{k}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    tables.insert(
        "weights".into(),
        csv(
            &header,
            fit.weights.iter().enumerate().map(|(i, w)| {
                let mut row = vec![
                    field(&report.data.ids[i]),
                    field(report.data.label(i)),
                    num(fit.per_datum_sq_error[i]),
                ];
                row.extend(w.iter().map(|&x| num(x)));
                row
            }),
        ),
    );
    if let Some(polygon) = &report.polygon {
        tables.insert(
            "projection-2d".into(),
            csv(
                &["id", "label", "x", "y"],
                fit.weights.iter().enumerate().map(|(i, w)| {
                    let p = planar_point(polygon, w);
                    vec![
                        field(&report.data.ids[i]),
                        field(report.data.label(i)),
                        num(p[0]),
                        num(p[1]),
                    ]
                }),
            ),
        );
        polygon_tables(polygon, tables);
    }
}

/// CSV payloads derived from `result`.
pub fn plot_tables(result: &ReportResult) -> BTreeMap<String, String> {
    let mut tables = BTreeMap::new();
    match result {
        ReportResult::Bsa(r) => bsa_tables(r, &mut tables),
        ReportResult::Backward(r) => {
            bsa_tables(&r.selected, &mut tables);
            tables.insert(
                "mse-vs-dimension".into(),
                csv(
                    &["dimension", "num_refs", "mse", "ref_ids"],
                    r.path.steps.iter().map(|s| {
                        let ids: Vec<&str> = s
                            .ref_indices
                            .iter()
                            .map(|&i| r.selected.data.ids[i].as_str())
                            .collect();
                        vec![
                            s.dimension().to_string(),
                            s.ref_indices.len().to_string(),
                            num(s.mse),
                            field(&ids.join(";")),
                        ]
                    }),
                ),
            );
        }
        ReportResult::TangentPca(r) => {
            let mut header = vec!["id".to_string(), "label".into()];
            header.extend((0..r.explained_variance_ratio.len()).map(|k| format!("pc{}", k + 1)));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            tables.insert(
                "scores".into(),
                csv(
                    &header,
                    r.scores.iter().enumerate().map(|(i, s)| {
                        let mut row = vec![field(&r.data.ids[i]), field(r.data.label(i))];
                        row.extend(s.iter().map(|&x| num(x)));
                        row
                    }),
                ),
            );
            let mut cumulative = 0.0;
            tables.insert(
                "explained-variance".into(),
                csv(
                    &["component", "ratio", "cumulative"],
                    r.explained_variance_ratio
                        .iter()
                        .enumerate()
                        .map(|(k, &x)| {
                            cumulative += x;
                            vec![(k + 1).to_string(), num(x), num(cumulative)]
                        }),
                ),
            );
            if !r.deformations.is_empty() {
                let mut edges = String::from("component,t,i,j,weight\n");
                for d in &r.deformations {
                    for (i, row) in d.adjacency.iter().enumerate() {
                        for (j, &w) in row.iter().enumerate().skip(i) {
                            writeln!(edges, "{},{},{i},{j},{}", d.component + 1, num(d.t), num(w))
                                .expect("writing to a string");
                        }
                    }
                }
                tables.insert("deformation-edges".into(), edges);
            }
        }
        ReportResult::Polygon(r) => {
            polygon_tables(&r.polygon, &mut tables);
            tables.insert("halfplanes".into(), halfplane_table(&r.polygon.halfplanes));
        }
    }
    tables
}
