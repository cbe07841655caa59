//! `texfuse` command line: segment images, extract features, train and apply
//! the classifier, and run method-combination experiments.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use texfuse::bayes::{classify, fit, load_models, save_models, FitOptions};
use texfuse::harness::{
    combine_features, extract_method, load_features, parse_report_csv, render_report, run_experiment,
    save_features, ExperimentConfig, ReportFormat, DOCUMENTED_DEFAULTS,
};
use texfuse::imaging::{
    load_pgm, read_segment_manifest, segment_image, split_assignment, write_segment_manifest, Boundary,
};
use texfuse::{CovarianceMode, LabeledDataset, Method, SegmentationConfig, Split};

#[derive(Parser)]
#[command(name = "texfuse", version, about = "Texture classification with combined feature extractors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cut class images into overlapping segments and write a manifest.
    Segment(SegmentArgs),
    /// Extract one feature table per method from a segment manifest.
    Extract(ExtractArgs),
    /// Fit the Gaussian classifier on the training rows of feature tables.
    Train(TrainArgs),
    /// Predict classes for feature-table rows with a trained model.
    Classify(ClassifyArgs),
    /// Run a full experiment from a config file and write the report.
    Experiment(ExperimentArgs),
    /// Re-render a stored CSV report.
    Report(ReportArgs),
}

#[derive(Args)]
struct SegmentArgs {
    /// `CLASS=PATH` of a binary PGM, one per class.
    #[arg(long = "image", required = true, value_parser = parse_image_arg)]
    images: Vec<(String, PathBuf)>,
    /// Output directory for segment PGMs and manifest.csv.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 32)]
    segment_size: usize,
    #[arg(long, default_value_t = 16)]
    stride: usize,
    #[arg(long, default_value = "wrap")]
    boundary: Boundary,
    /// Training segments per class.
    #[arg(long, default_value_t = 64)]
    train_count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExtractArgs {
    /// Path to manifest.csv written by `segment`.
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory; one `<method>.csv` per method.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated methods; defaults to the config's list.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<Method>,
    /// Experiment config supplying extractor settings (image entries are ignored).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Feature tables from `extract`; columns are joined in canonical method order.
    #[arg(long = "features", required = true)]
    features: Vec<PathBuf>,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "full")]
    classifier: CovarianceMode,
    #[arg(long, default_value_t = 1e-6)]
    ridge: f64,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    /// Same tables, in any order, as used for training.
    #[arg(long = "features", required = true)]
    features: Vec<PathBuf>,
    /// Predictions CSV: segment_id,class,split,predicted.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Flat `key = value` config file.
    #[arg(long, required_unless_present = "print_defaults")]
    config: Option<PathBuf>,
    /// Write the CSV report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the markdown report here.
    #[arg(long)]
    markdown: Option<PathBuf>,
    /// Print every config key with its default and exit.
    #[arg(long)]
    print_defaults: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// CSV report written by `experiment`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "markdown")]
    format: ReportFormat,
}

fn parse_image_arg(s: &str) -> std::result::Result<(String, PathBuf), String> {
    let (class, path) = s.split_once('=').ok_or("expected CLASS=PATH")?;
    if class.is_empty() || path.is_empty() {
        return Err("expected CLASS=PATH".into());
    }
    Ok((class.to_string(), PathBuf::from(path)))
}

fn segment(args: SegmentArgs) -> Result<()> {
    let cfg = SegmentationConfig {
        segment_size: args.segment_size,
        stride: args.stride,
        boundary: args.boundary,
    };
    let mut names: Vec<String> = Vec::new();
    let mut segments = Vec::new();
    for (label, (class, path)) in args.images.iter().enumerate() {
        if names.contains(class) {
            bail!("class `{class}` given twice");
        }
        names.push(class.clone());
        let img = load_pgm(path).with_context(|| format!("loading {}", path.display()))?;
        segments.extend(segment_image(&img, &cfg, label)?);
    }
    let labels: Vec<usize> = segments.iter().map(|s| s.label).collect();
    let splits = split_assignment(&labels, args.train_count, args.seed)?;
    let manifest = write_segment_manifest(&args.out, &segments, &splits, &names)?;
    println!("{} segments -> {}", segments.len(), manifest.display());
    Ok(())
}

fn extract(args: ExtractArgs) -> Result<()> {
    let cfg = match &args.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    let methods = if args.methods.is_empty() { cfg.methods.clone() } else { args.methods };
    let (entries, names) = read_segment_manifest(&args.manifest)?;
    let splits: Vec<Split> = entries.iter().map(|e| e.split).collect();
    let segments: Vec<_> = entries.into_iter().map(|e| e.segment).collect();
    fs::create_dir_all(&args.out)?;
    for m in methods {
        let (data, degenerate) = extract_method(&segments, &splits, &names, m, &cfg.extractors)?;
        let path = args.out.join(format!("{}.csv", m.name()));
        save_features(&path, &data)?;
        println!("{m}: {} x {} ({degenerate} degenerate) -> {}", data.n_rows(), data.n_features(), path.display());
    }
    Ok(())
}

/// Loads tables that describe the same rows and joins their columns.
fn load_combined(paths: &[PathBuf], class_names: Option<&[String]>) -> Result<LabeledDataset> {
    let first = load_features(&paths[0], class_names).with_context(|| format!("reading {}", paths[0].display()))?;
    let mut parts = vec![first];
    for p in &paths[1..] {
        let d = load_features(p, Some(&parts[0].class_names)).with_context(|| format!("reading {}", p.display()))?;
        parts.push(d);
    }
    let refs: Vec<&LabeledDataset> = parts.iter().collect();
    Ok(combine_features(&refs)?)
}

fn train(args: TrainArgs) -> Result<()> {
    let data = load_combined(&args.features, None)?;
    let opts = FitOptions {
        ridge: args.ridge,
        mode: args.classifier,
    };
    let models = fit(&data, &opts)?;
    save_models(&args.out, &models, opts.mode)?;
    let ridged = models.iter().filter(|m| m.regularization_used > 0.0).count();
    println!(
        "{} classes x {} features ({ridged} regularized) -> {}",
        models.len(),
        data.n_features(),
        args.out.display()
    );
    Ok(())
}

fn classify_cmd(args: ClassifyArgs) -> Result<()> {
    let (models, _) = load_models(&args.model)?;
    let names: Vec<String> = models.iter().map(|m| m.name.clone()).collect();
    let data = load_combined(&args.features, Some(&names))?;
    let mut w = csv::Writer::from_path(&args.out)?;
    w.write_record(["segment_id", "class", "split", "predicted"])?;
    let mut tally = [(0u64, 0u64); 2];
    for i in 0..data.n_rows() {
        let pred = classify(&models, data.row(i))?.label;
        let t = &mut tally[(data.splits[i] == Split::Test) as usize];
        t.0 += (pred == data.labels[i]) as u64;
        t.1 += 1;
        w.write_record([
            data.segment_ids[i].to_string(),
            names[data.labels[i]].clone(),
            data.splits[i].as_str().to_string(),
            models[pred].name.clone(),
        ])?;
    }
    w.flush()?;
    for (split, (ok, n)) in ["train", "test"].iter().zip(tally) {
        if n > 0 {
            println!("{split}: {ok}/{n} correct ({:.2}%)", 100.0 * ok as f64 / n as f64);
        }
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    if args.print_defaults {
        print!("{DOCUMENTED_DEFAULTS}");
        return Ok(());
    }
    let path = args.config.expect("required by clap");
    let cfg = ExperimentConfig::from_file(&path).with_context(|| format!("config {}", path.display()))?;
    if cfg.images.is_empty() {
        bail!("config lists no `image.<class>` entries");
    }
    let report = run_experiment(&cfg)?;
    if let Some(out) = &args.out {
        write_text(out, &render_report(&report, ReportFormat::Csv))?;
    }
    if let Some(md) = &args.markdown {
        write_text(md, &render_report(&report, ReportFormat::Markdown))?;
    }
    if args.out.is_none() && args.markdown.is_none() {
        print!("{}", render_report(&report, ReportFormat::Markdown));
    }
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    print!("{}", render_report(&parse_report_csv(&text)?, args.format));
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Segment(a) => segment(a),
        Command::Extract(a) => extract(a),
        Command::Train(a) => train(a),
        Command::Classify(a) => classify_cmd(a),
        Command::Experiment(a) => experiment(a),
        Command::Report(a) => report(a),
    }
}
