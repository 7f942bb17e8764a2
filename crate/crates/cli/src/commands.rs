use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use spectral_bsa::baselines::{component_deformation, tangent_pca, DEFAULT_MAX_ITER, DEFAULT_TOL};
use spectral_bsa::bsa::{dataset_spectra, evaluate, reconstruct_spectrum, variance_explained};
use spectral_bsa::datasets::{self, Dataset, RegionMapping, DEFAULT_SIGMA};
use spectral_bsa::{
    embed_polygon_2d, fit, fit_backward, spectrum_distance, BsaConfig, BsaResult, Search,
};

use crate::report::{
    BackwardReport, BsaReport, DataIndex, Deformation, PolygonReport, Report, ReportResult,
    TangentPcaReport,
};

#[derive(Debug, Parser)]
#[command(
    name = "spectral-bsa",
    version,
    about = "Barycentric subspace analysis of unlabeled networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a simulated dataset.
    #[command(subcommand)]
    Generate(Generate),
    /// Sample-limited BSA, optionally convex and/or backward.
    Bsa(BsaArgs),
    /// Tangent PCA at the Fréchet mean in the permutation graph space.
    Tpca(TpcaArgs),
    /// Planar embedding of the barycentric subspace of three references.
    Polygon(PolygonArgs),
    /// Build airline route networks from OpenFlights files.
    Ingest(IngestArgs),
}

#[derive(Debug, Subcommand)]
pub enum Generate {
    /// Six-node networks X(s, t) with tree, "eight" and "hourglass" shapes.
    TwoParameter {
        #[arg(long, default_value_t = 16)]
        num: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Noisy copies of a star, a two-hub star and a complete network.
    Clustered {
        #[arg(long, default_value_t = 5)]
        per_cluster: usize,
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct BsaArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Number of reference networks (subspace dimension is refs − 1).
    #[arg(long)]
    pub refs: usize,
    /// Restrict projections to the convex hull of the references.
    #[arg(long)]
    pub convex: bool,
    /// Run the backward path and report the step with `--refs` references.
    #[arg(long)]
    pub backward: bool,
    /// Number of references the backward path starts from [default: N − 1].
    #[arg(long, requires = "backward")]
    pub start: Option<usize>,
    /// Minimal spectral distance between any two references.
    #[arg(long)]
    pub min_sep: Option<f64>,
    /// Only consider reference sets with pairwise distinct dataset labels.
    #[arg(long)]
    pub distinct_labels: bool,
    #[arg(long)]
    pub parallel: bool,
    /// Largest number of reference subsets scored exhaustively.
    #[arg(long)]
    pub budget: Option<u128>,
    #[arg(long)]
    pub out: PathBuf,
    /// Write the reconstructed network of every projected datum here.
    #[arg(long)]
    pub reconstruct: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TpcaArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub components: usize,
    /// Also report `mean ± T · component` for every component.
    #[arg(long)]
    pub deform: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PolygonArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Three references, given as network ids or 0-based indices.
    #[arg(long, value_delimiter = ',', required = true)]
    pub refs: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub routes: PathBuf,
    #[arg(long)]
    pub airports: PathBuf,
    /// Country-to-region mapping [default: the bundled six European regions].
    #[arg(long)]
    pub mapping: Option<PathBuf>,
    /// Comma-separated airline codes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub airlines: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli, command_line: String) -> Result<()> {
    match cli.command {
        Command::Generate(g) => generate(g),
        Command::Bsa(args) => bsa(args, command_line),
        Command::Tpca(args) => tpca(args, command_line),
        Command::Polygon(args) => polygon(args, command_line),
        Command::Ingest(args) => ingest(args),
    }
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    datasets::load(path).with_context(|| format!("loading {}", path.display()))
}

fn save_dataset(d: &Dataset, path: &Path) -> Result<()> {
    datasets::save(d, path).with_context(|| format!("writing {}", path.display()))
}

fn write_report(report: &Report, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn summarize(d: &Dataset) {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for label in d.labels() {
        *counts.entry(label.as_deref().unwrap_or("-")).or_default() += 1;
    }
    let labels: Vec<String> = counts.iter().map(|(l, c)| format!("{l}: {c}")).collect();
    println!("N={} n={} labels {{{}}}", d.len(), d.n(), labels.join(", "));
}

fn generate(g: Generate) -> Result<()> {
    let (d, out) = match g {
        Generate::TwoParameter { num, seed, out } => {
            (datasets::generate_two_parameter(num, seed)?, out)
        }
        Generate::Clustered {
            per_cluster,
            sigma,
            seed,
            out,
        } => (datasets::generate_clustered(per_cluster, sigma, seed)?, out),
    };
    save_dataset(&d, &out)?;
    summarize(&d);
    Ok(())
}

fn data_index(d: &Dataset) -> DataIndex {
    DataIndex {
        ids: d.networks().iter().map(|g| g.id().to_string()).collect(),
        labels: d.labels().to_vec(),
    }
}

fn bsa_report(d: &Dataset, fit: BsaResult) -> Result<BsaReport> {
    let data = data_index(d);
    let ref_ids = fit
        .ref_indices
        .iter()
        .map(|&i| data.ids[i].clone())
        .collect();
    let variance_explained = match variance_explained(d.networks(), &fit) {
        Ok(v) => Some(v),
        Err(e) => {
            warn!("variance explained unavailable: {e}");
            None
        }
    };
    let polygon = if fit.ref_spectra.len() == 3 {
        match embed_polygon_2d(&fit.ref_spectra) {
            Ok(p) => Some(p),
            Err(e) => {
                warn!("no planar embedding of the references: {e}");
                None
            }
        }
    } else {
        None
    };
    Ok(BsaReport {
        data,
        ref_ids,
        fit,
        variance_explained,
        polygon,
    })
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn write_reconstructions(d: &Dataset, fit: &BsaResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (i, (datum, point)) in d.networks().iter().zip(&fit.projections).enumerate() {
        let net = reconstruct_spectrum(datum, point)?;
        let mut meta = BTreeMap::new();
        meta.insert("source".into(), "reconstruction".into());
        meta.insert("datum".into(), datum.id().to_string());
        meta.insert(
            "squared_error".into(),
            fit.per_datum_sq_error[i].to_string(),
        );
        let single = Dataset::new(vec![net], vec![d.labels()[i].clone()], meta)?;
        save_dataset(
            &single,
            &dir.join(format!("{}.json", file_stem(datum.id()))),
        )?;
    }
    info!("wrote {} reconstructions to {}", d.len(), dir.display());
    Ok(())
}

fn bsa(args: BsaArgs, command_line: String) -> Result<()> {
    let d = load_dataset(&args.input)?;
    let mut config = BsaConfig::new(args.refs)
        .convex(args.convex)
        .parallel(args.parallel);
    if let Some(sep) = args.min_sep {
        config = config.min_ref_separation(sep);
    }
    if args.distinct_labels {
        config = config.cluster_labels(d.label_strings());
    }
    if let Some(budget) = args.budget {
        config.subset_budget = budget;
    }

    let result = if args.backward {
        let start = args.start.unwrap_or(d.len().saturating_sub(1).max(1));
        if args.refs > start {
            bail!(
                "--refs {} exceeds the backward start of {start} references",
                args.refs
            );
        }
        let mut path_config = config.clone().search(Search::GreedyBackward);
        path_config.num_refs = start;
        let path = fit_backward(d.networks(), &path_config)?;
        let step = path
            .step_with_refs(args.refs)
            .expect("the path reaches every size down to one");
        let selected = evaluate(d.networks(), &step.ref_indices, args.convex)?;
        for s in &path.steps {
            info!("dimension {:>3}: mse {:e}", s.dimension(), s.mse);
        }
        ReportResult::Backward(BackwardReport {
            path,
            selected: bsa_report(&d, selected)?,
        })
    } else {
        ReportResult::Bsa(bsa_report(&d, fit(d.networks(), &config)?)?)
    };

    let selected = match &result {
        ReportResult::Bsa(r) => r,
        ReportResult::Backward(r) => &r.selected,
        _ => unreachable!(),
    };
    println!(
        "references {:?}, mse {:e}",
        selected.ref_ids, selected.fit.mse
    );
    if let Some(dir) = &args.reconstruct {
        write_reconstructions(&d, &selected.fit, dir)?;
    }
    let report = Report::new(command_line, d.meta.clone(), result);
    write_report(&report, &args.out)
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn tpca(args: TpcaArgs, command_line: String) -> Result<()> {
    let d = load_dataset(&args.input)?;
    let pca = tangent_pca(d.networks(), args.components, args.tol, args.max_iter)?;
    let mut deformations = Vec::new();
    if let Some(t) = args.deform {
        for component in 0..pca.components.len() {
            for t in [-t, t] {
                let g = component_deformation(&pca, component, t)?;
                deformations.push(Deformation {
                    component,
                    t,
                    adjacency: g.to_rows(),
                });
            }
        }
    }
    let explained: f64 = pca.explained_variance_ratio.iter().sum();
    println!(
        "{} components explain {:.2}% of the variance",
        pca.components.len(),
        100.0 * explained
    );
    let result = ReportResult::TangentPca(TangentPcaReport {
        data: data_index(&d),
        mean: pca.mean.to_rows(),
        components: pca.components.iter().map(rows).collect(),
        scores: pca.scores,
        explained_variance_ratio: pca.explained_variance_ratio,
        total_variance: pca.total_variance,
        deformations,
    });
    write_report(
        &Report::new(command_line, d.meta.clone(), result),
        &args.out,
    )
}

fn resolve_ref(d: &Dataset, token: &str) -> Result<usize> {
    let token = token.trim();
    if let Some(i) = d.networks().iter().position(|g| g.id() == token) {
        return Ok(i);
    }
    match token.parse::<usize>() {
        Ok(i) if i < d.len() => Ok(i),
        Ok(i) => bail!("reference index {i} out of range for {} networks", d.len()),
        Err(_) => bail!("unknown reference {token:?}"),
    }
}

fn polygon(args: PolygonArgs, command_line: String) -> Result<()> {
    if args.refs.len() != 3 {
        bail!(
            "--refs takes exactly three references, got {}",
            args.refs.len()
        );
    }
    let d = load_dataset(&args.input)?;
    let indices = args
        .refs
        .iter()
        .map(|t| resolve_ref(&d, t))
        .collect::<Result<Vec<_>>>()?;
    let spectra = dataset_spectra(d.networks())?;
    let refs: Vec<_> = indices.iter().map(|&i| spectra[i].clone()).collect();
    let polygon = embed_polygon_2d(&refs)?;
    println!(
        "{} polygon with {} sides",
        if polygon.closed {
            "closed"
        } else {
            "unbounded"
        },
        polygon.sides
    );
    let result = ReportResult::Polygon(PolygonReport {
        ref_ids: indices
            .iter()
            .map(|&i| d.networks()[i].id().to_string())
            .collect(),
        ref_indices: indices,
        spectral_distances: [
            spectrum_distance(&refs[0], &refs[1])?,
            spectrum_distance(&refs[0], &refs[2])?,
            spectrum_distance(&refs[1], &refs[2])?,
        ],
        polygon,
    });
    write_report(
        &Report::new(command_line, d.meta.clone(), result),
        &args.out,
    )
}

fn ingest(args: IngestArgs) -> Result<()> {
    let mapping = match &args.mapping {
        Some(path) => {
            RegionMapping::load(path).with_context(|| format!("loading {}", path.display()))?
        }
        None => RegionMapping::default_europe(),
    };
    let airlines: Vec<String> = args.airlines.iter().map(|a| a.trim().to_string()).collect();
    let d = datasets::ingest_openflights(&args.routes, &args.airports, &mapping, &airlines)?;
    save_dataset(&d, &args.out)?;
    summarize(&d);
    Ok(())
}
