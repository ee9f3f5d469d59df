use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use serde_json::json;
use slimapi_core::annotations::{merge, validate, AnnotationSet, Diagnostic};
use slimapi_core::classify::{
    classify, reduction_stats, render_markdown, suggest_annotations, MoveConfig, RemovalConfig, StatsDocument,
};
use slimapi_core::evolution::{diff_api, migrate_annotations, MigrationDocument};
use slimapi_core::extract::{extract_api, summarize_surface, SourceTree};
use slimapi_core::generate::{infer_adapted_api, render_wrappers};
use slimapi_core::json::{self, Document};
use slimapi_core::model::ApiModel;
use slimapi_core::usage::{mine, Corpus, UsageDocument};
use slimapi_core::Error;
use slimapi_service::{AppState, Cors, LoadError, ServiceConfig};

#[derive(Parser)]
#[command(name = "slimapi", version, about = "Mine how a Python library is used and generate a slimmer API for it")]
struct Cli {
    /// Print diagnostics on stderr as JSON lines.
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the API model of a library source tree.
    Extract {
        root: PathBuf,
        #[arg(long = "version", value_name = "VERSION")]
        library_version: String,
        #[arg(short, long)]
        output: PathBuf,
        /// Library name when it differs from the directory name.
        #[arg(long)]
        name: Option<String>,
        #[arg(long, value_name = "GLOB")]
        include: Vec<String>,
        #[arg(long, value_name = "GLOB")]
        exclude: Vec<String>,
        /// Where to write warnings; defaults to extract-report.json next to the output.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Count library usage over a corpus of client programs.
    Mine {
        corpus: PathBuf,
        #[arg(long)]
        api: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Restrict the corpus to the files listed in a manifest.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
    },
    /// Classify elements and report how much of the API could go.
    Stats {
        #[arg(long)]
        api: PathBuf,
        #[arg(long)]
        usages: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        markdown: Option<PathBuf>,
    },
    /// Suggest @remove (and optionally @move) annotations from usage data.
    Suggest {
        #[arg(long)]
        api: PathBuf,
        #[arg(long)]
        usages: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Also suggest moves by class-name suffix.
        #[arg(long)]
        moves: bool,
        /// Suffix-to-module mapping, e.g. `Encoder=preprocessing`; implies --moves.
        #[arg(long, value_name = "SUFFIX=MODULE")]
        suffix: Vec<String>,
        /// Function names never removed; replaces the default keep-list.
        #[arg(long, value_name = "NAME")]
        keep: Vec<String>,
        /// Manual annotations that take precedence over the suggestions.
        #[arg(long)]
        merge: Option<PathBuf>,
    },
    /// Generate the wrapper package.
    Generate {
        #[arg(long)]
        api: PathBuf,
        #[arg(long)]
        annotations: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        package_name: Option<String>,
    },
    /// Compare two versions and migrate an annotation set.
    Diff {
        #[arg(long)]
        old: PathBuf,
        #[arg(long)]
        new: PathBuf,
        #[arg(long)]
        annotations: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Serve the model, usages and annotations over HTTP.
    Serve {
        #[arg(long)]
        api: PathBuf,
        #[arg(long)]
        usages: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Browser origin allowed by CORS; any origin when omitted.
        #[arg(long, value_name = "URL")]
        allow_origin: Option<String>,
    },
}

/// A failure whose diagnostics have already been collected.
struct Reported(Vec<Diagnostic>);

fn long_version() -> String {
    format!(
        "{}\nschemas: {} {} {} {} {} {}",
        env!("CARGO_PKG_VERSION"),
        json::API_SCHEMA,
        json::USAGES_SCHEMA,
        json::ANNOTATIONS_SCHEMA,
        json::REPORT_SCHEMA,
        json::MIGRATION_SCHEMA,
        json::EXTRACT_REPORT_SCHEMA
    )
}

fn main() -> ExitCode {
    let version: &'static str = Box::leak(long_version().into_boxed_str());
    let matches = Cli::command().long_version(version).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let json_errors = cli.json_errors;
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e, json_errors);
            ExitCode::from(1)
        }
    }
}

fn report(e: &anyhow::Error, json_errors: bool) {
    let diagnostics: Option<&[Diagnostic]> = if let Some(Reported(d)) = e.downcast_ref::<Reported>() {
        Some(d)
    } else if let Some(Error::Validation(v)) = e.downcast_ref::<Error>() {
        Some(&v.errors)
    } else if let Some(LoadError::InvalidAnnotations { validation, .. }) = e.downcast_ref::<LoadError>() {
        Some(&validation.errors)
    } else {
        None
    };
    let message = format!("{e:#}");
    match (diagnostics, json_errors) {
        (Some(ds), true) => {
            for d in ds {
                eprintln!("{}", json!({"level": "error", "target": d.target, "kind": d.kind, "message": d.message, "related": d.related}));
            }
        }
        (Some(ds), false) => {
            eprintln!("error: {message}");
            for d in ds {
                eprintln!("  {d}");
            }
        }
        (None, true) => eprintln!("{}", json!({"level": "error", "message": message})),
        (None, false) => eprintln!("error: {message}"),
    }
}

impl std::fmt::Debug for Reported {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} diagnostic(s)", self.0.len())
    }
}

impl std::fmt::Display for Reported {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} error(s)", self.0.len())
    }
}

impl std::error::Error for Reported {}

fn warn(message: impl std::fmt::Display) {
    eprintln!("warning: {message}");
}

fn read_api(path: &Path) -> Result<ApiModel> {
    ApiModel::read_from(path).with_context(|| format!("reading {}", path.display()))
}

fn read_usages(path: &Path) -> Result<UsageDocument> {
    UsageDocument::read_from(path).with_context(|| format!("reading {}", path.display()))
}

fn read_annotations(path: &Path) -> Result<AnnotationSet> {
    AnnotationSet::read_from(path).with_context(|| format!("reading {}", path.display()))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Extract { root, library_version, output, name, include, exclude, report } => {
            let (tree, mut warnings) = SourceTree::discover(&root, name.as_deref(), &include, &exclude)?;
            let (model, mut extraction) = extract_api(&tree, &library_version)?;
            warnings.append(&mut extraction.warnings);
            extraction.warnings = warnings;
            model.write_to(&output)?;
            let report_path = report.unwrap_or_else(|| output.with_file_name("extract-report.json"));
            extraction.write_to(&report_path)?;
            if !extraction.warnings.is_empty() {
                warn(format!("{} extraction warning(s), see {}", extraction.warnings.len(), report_path.display()));
            }
            Ok(())
        }
        Command::Mine { corpus, api, output, manifest, jobs } => {
            let model = read_api(&api)?;
            let corpus = match manifest {
                Some(m) => Corpus::from_manifest(&corpus, Corpus::read_manifest(&m)?)?,
                None => Corpus::discover(&corpus)?,
            };
            let doc = mine(&corpus, &model, jobs.into())?;
            doc.write_to(&output)?;
            if doc.report.files_skipped > 0 {
                warn(format!("{} of {} file(s) skipped", doc.report.files_skipped, doc.report.files_total));
            }
            Ok(())
        }
        Command::Stats { api, usages, output, markdown } => {
            let model = read_api(&api)?;
            let usages = read_usages(&usages)?;
            let classification = classify(&model, &usages.counts)?;
            let surface = summarize_surface(&model);
            let summary = reduction_stats(&classification, &surface);
            let table = render_markdown(&summary);
            if let Some(path) = &markdown {
                json::write_file(path, table.as_bytes())?;
            }
            match &output {
                Some(path) => StatsDocument { surface, summary, classification }.write_to(path)?,
                None if markdown.is_none() => print!("{table}"),
                None => {}
            }
            Ok(())
        }
        Command::Suggest { api, usages, output, moves, suffix, keep, merge: manual } => {
            let model = read_api(&api)?;
            let usages = read_usages(&usages)?;
            let classification = classify(&model, &usages.counts)?;
            let mut removals = RemovalConfig::default();
            if !keep.is_empty() {
                removals.keep = keep;
            }
            let mut move_config = MoveConfig::default();
            for entry in &suffix {
                let Some((s, m)) = entry.split_once('=').filter(|(s, m)| !s.is_empty() && !m.is_empty()) else {
                    bail!("--suffix expects SUFFIX=MODULE, got `{entry}`");
                };
                move_config.set(s, m);
            }
            let moves = (moves || !suffix.is_empty()).then_some(&move_config);
            let auto = suggest_annotations(&model, &classification, &removals, moves);
            let set = match manual {
                Some(path) => {
                    let outcome = merge(&auto, &read_annotations(&path)?, &model)?;
                    for w in &outcome.warnings {
                        warn(w);
                    }
                    if !outcome.validation.is_ok() {
                        return Err(Reported(outcome.validation.errors).into());
                    }
                    outcome.set
                }
                None => auto,
            };
            for w in validate(&set, &model, Some(&usages.counts)).warnings {
                warn(w);
            }
            set.write_to(&output)?;
            Ok(())
        }
        Command::Generate { api, annotations, output, package_name } => {
            let model = read_api(&api)?;
            let set = match annotations {
                Some(path) => read_annotations(&path)?,
                None => AnnotationSet::empty_for(&model),
            };
            let adapted = infer_adapted_api(&model, &set, package_name.as_deref())?;
            render_wrappers(&adapted).write_to(&output)?;
            Ok(())
        }
        Command::Diff { old, new, annotations, output } => {
            let (old, new) = (read_api(&old)?, read_api(&new)?);
            let diff = diff_api(&old, &new)?;
            let doc = match annotations {
                Some(path) => {
                    let outcome = migrate_annotations(&read_annotations(&path)?, &diff, &old, &new)?;
                    for c in &outcome.report.conflicts {
                        warn(format!("{}: {}", c.annotation.target, c.reason));
                    }
                    MigrationDocument { diff, annotations: Some(outcome.set), report: Some(outcome.report) }
                }
                None => MigrationDocument { diff, annotations: None, report: None },
            };
            doc.write_to(&output)?;
            Ok(())
        }
        Command::Serve { api, usages, annotations, port, host, allow_origin } => {
            let state = AppState::load(&ServiceConfig { api, usages, annotations })?;
            let cors = allow_origin.map_or(Cors::Any, Cors::Origin);
            let addr = SocketAddr::new(host, port);
            let runtime = tokio::runtime::Runtime::new()?;
            eprintln!("serving {} {} on http://{addr}/v1", state.model().library_name(), state.model().library_version());
            runtime.block_on(slimapi_service::serve(state, addr, &cors)).with_context(|| format!("serving on {addr}"))
        }
    }
}
