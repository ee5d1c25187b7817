//! `therminfo`: search, predict, ingest and review against a store, either
//! in process or through a running service (`--server`).
//!
//! Exit codes: 0 success, 1 domain error (invalid structure, out of
//! domain, not found, rejected data, unreachable service), 2 usage error.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use therminfo_client::{Backend, ClientError, ErrorCode, HttpBackend, TextMode};
use therminfo_core::api::{ApiError, CasrnCheck, PredictionRequest};
use therminfo_core::engine::fit_rows;
use therminfo_core::search::AdvancedFilters;
use therminfo_core::store::{read_dataset, validate_casrn, CompoundInput, Decision, PhysicalState};
use therminfo_core::thermo::Phase;
use therminfo_core::{Engine, EngineConfig};
use therminfo_server::ServerConfig;

#[derive(Debug, Parser)]
#[command(name = "therminfo", version, about = "Thermochemical compound store and bond-additivity enthalpy estimator")]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Base URL of a running service; the store is opened in process otherwise.
    #[arg(long, global = true, env = "THERMINFO_SERVER")]
    server: Option<String>,
    /// Admin token for review, pending, ingest and audit through a service.
    #[arg(long, global = true, env = "THERMINFO_ADMIN_TOKEN", hide_env_values = true)]
    admin_token: Option<String>,
    /// Store directory for in-process use; an in-memory store otherwise.
    #[arg(long, global = true, env = "THERMINFO_DATA_DIR")]
    data_dir: Option<PathBuf>,
    /// Do not load the bundled datasets into an empty store.
    #[arg(long, global = true)]
    no_seed: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load a JSON-lines or CSV dataset into the store.
    Ingest { file: PathBuf },
    /// Search the store.
    Search(SearchArgs),
    /// Show one compound by molecular id.
    Show { id: String },
    /// Estimate enthalpies of formation for a hydrocarbon.
    Predict {
        /// SMILES, or a stored name with --name.
        input: String,
        /// Treat the input as a compound name.
        #[arg(long)]
        name: bool,
        /// Ring C=C bonds with E configuration in 8- or 12-membered rings.
        #[arg(long = "trans-ring", default_value_t = 0)]
        trans_ring: u32,
        #[arg(long, value_enum)]
        phase: Option<PhaseArg>,
    },
    /// Fit a parameter table on a dataset.
    Fit {
        #[arg(long, value_enum)]
        phase: PhaseArg,
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a CAS registry number.
    ValidateCasrn { casrn: String },
    /// Record counts per category.
    Stats,
    /// Re-check every stored record.
    Audit,
    /// Submit a compound (JSON file) for review.
    Submit {
        file: PathBuf,
        #[arg(long)]
        submitter: String,
    },
    /// List submissions awaiting review.
    Pending,
    /// Approve or reject a submission.
    Review {
        id: String,
        #[arg(value_enum)]
        decision: DecisionArg,
        #[arg(long)]
        note: Option<String>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        port: Option<u16>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PhaseArg {
    Gas,
    Liquid,
}

impl From<PhaseArg> for Phase {
    fn from(p: PhaseArg) -> Phase {
        match p {
            PhaseArg::Gas => Phase::Gas,
            PhaseArg::Liquid => Phase::Liquid,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecisionArg {
    Approve,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SearchMode {
    Quick,
    Name,
    Formula,
    Id,
    Casrn,
    Similarity,
    Substructure,
    Advanced,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(value_enum)]
    mode: SearchMode,
    /// Query text or SMILES; advanced search uses the filter options.
    query: Option<String>,
    /// Similarity threshold in percent: 70, 75, 80, 85, 90, 95 or 100.
    #[arg(long, default_value_t = 100)]
    threshold: u32,
    #[arg(long = "filter-name")]
    filter_name: Option<String>,
    #[arg(long)]
    formula: Option<String>,
    #[arg(long)]
    state: Option<PhysicalState>,
    #[arg(long)]
    weight: Option<f64>,
    #[arg(long)]
    weight_min: Option<f64>,
    #[arg(long)]
    weight_max: Option<f64>,
    #[arg(long)]
    class: Option<String>,
    #[arg(long)]
    subclass: Option<String>,
    #[arg(long)]
    family: Option<String>,
    /// Required characteristic tag; repeatable.
    #[arg(long = "characteristic")]
    characteristics: Vec<String>,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<ClientError> for Failure {
    fn from(e: ClientError) -> Self {
        match &e {
            ClientError::Api(api) if is_usage(api) => Failure::Usage(api.message.clone()),
            ClientError::Api(api) => Failure::Domain(describe_api_error(api)),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        ClientError::Api(e).into()
    }
}

fn is_usage(e: &ApiError) -> bool {
    matches!(e.code, ErrorCode::BadRequest | ErrorCode::InvalidQuery | ErrorCode::InvalidThreshold)
}

fn describe_api_error(e: &ApiError) -> String {
    let mut s = format!("{}: {}", e.code.as_str(), e.message);
    for issue in therminfo_core::api::issues_of(e) {
        s.push_str(&format!("\n  {}: {}", issue.field.as_deref().unwrap_or("-"), issue.message));
    }
    s
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce(&T) -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("serialisable"));
    } else {
        print!("{}", text(value));
    }
}

fn backend(cli: &Cli) -> Result<Box<dyn Backend>, Failure> {
    if let Some(url) = &cli.server {
        return Ok(Box::new(HttpBackend::new(url, cli.admin_token.clone())?));
    }
    let engine = Engine::open(&EngineConfig {
        store_path: cli.data_dir.as_ref().map(|d| d.join("store.jsonl")),
        seed_fixtures: !cli.no_seed,
        gas_table: None,
        liquid_table: None,
    })?;
    Ok(Box::new(engine))
}

fn warn_if_ephemeral(cli: &Cli) {
    if cli.server.is_none() && cli.data_dir.is_none() {
        eprintln!("note: no --data-dir given; changes are not persisted");
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let json = cli.json;
    match &cli.command {
        Command::ValidateCasrn { casrn } => {
            let check = CasrnCheck {
                casrn: casrn.clone(),
                valid: validate_casrn(casrn),
            };
            emit(json, &check, |c| format!("{}\n", if c.valid { "valid" } else { "invalid" }));
            Ok(if check.valid { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Fit { phase, file, out } => {
            let rows = read_dataset(file).map_err(|e| Failure::Domain(e.to_string()))?;
            let report = fit_rows(rows, (*phase).into(), &file.display().to_string())?;
            if let Some(path) = out {
                std::fs::write(path, report.fitted.to_json())
                    .map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
            }
            emit(json, &report, output::fit);
            Ok(ExitCode::SUCCESS)
        }
        Command::Serve { port } => {
            let mut config = ServerConfig::from_env().map_err(|e| Failure::Usage(e.to_string()))?;
            if let Some(p) = port {
                config.port = *p;
            }
            if let Some(d) = &cli.data_dir {
                config.data_dir = Some(d.clone());
            }
            if cli.admin_token.is_some() {
                config.admin_token = cli.admin_token.clone();
            }
            if cli.no_seed {
                config.seed = false;
            }
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env()
                        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
                )
                .init();
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Domain(e.to_string()))?;
            rt.block_on(therminfo_server::serve(config)).map_err(|e| Failure::Domain(e.to_string()))?;
            Ok(ExitCode::SUCCESS)
        }
        _ => {
            let b = backend(&cli)?;
            run_with(&cli, b.as_ref())
        }
    }
}

fn run_with(cli: &Cli, b: &dyn Backend) -> Result<ExitCode, Failure> {
    let json = cli.json;
    match &cli.command {
        Command::Ingest { file } => {
            warn_if_ephemeral(cli);
            let report = b.ingest_file(file)?;
            emit(json, &report, output::ingest);
            Ok(if report.rejected > 0 { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        Command::Search(args) => {
            let need = || {
                args.query
                    .clone()
                    .ok_or_else(|| Failure::Usage(format!("search {:?} needs a query", args.mode).to_lowercase()))
            };
            let response = match args.mode {
                SearchMode::Quick => b.search_text(TextMode::Quick, &need()?)?,
                SearchMode::Name => b.search_text(TextMode::Name, &need()?)?,
                SearchMode::Formula => b.search_text(TextMode::Formula, &need()?)?,
                SearchMode::Id | SearchMode::Casrn => b.search_text(TextMode::Lookup, &need()?)?,
                SearchMode::Similarity => b.search_structure(&need()?, args.threshold)?,
                SearchMode::Substructure => b.search_substructure(&need()?)?,
                SearchMode::Advanced => b.search_advanced(&AdvancedFilters {
                    name: args.filter_name.clone().or_else(|| args.query.clone()),
                    formula: args.formula.clone(),
                    physical_state: args.state,
                    weight: args.weight,
                    weight_min: args.weight_min,
                    weight_max: args.weight_max,
                    class: args.class.clone(),
                    subclass: args.subclass.clone(),
                    family: args.family.clone(),
                    characteristics: args.characteristics.clone(),
                })?,
            };
            emit(json, &response, output::search);
            Ok(ExitCode::SUCCESS)
        }
        Command::Show { id } => {
            let record = b.compound(id)?;
            emit(json, &record, output::record);
            Ok(ExitCode::SUCCESS)
        }
        Command::Predict {
            input,
            name,
            trans_ring,
            phase,
        } => {
            let req = PredictionRequest {
                smiles: (!name).then(|| input.clone()),
                name: name.then(|| input.clone()),
                trans_ring_double_bonds: *trans_ring,
                phase: phase.map(Phase::from),
            };
            let p = b.predict(&req)?;
            emit(json, &p, output::prediction);
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats => {
            emit(json, &b.stats()?, output::stats);
            Ok(ExitCode::SUCCESS)
        }
        Command::Audit => {
            let report = b.audit()?;
            emit(json, &report, output::audit);
            Ok(if report.is_clean() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Submit { file, submitter } => {
            warn_if_ephemeral(cli);
            let text =
                std::fs::read_to_string(file).map_err(|e| Failure::Domain(format!("{}: {e}", file.display())))?;
            let input: CompoundInput =
                serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
            let sub = b.submit(&input, submitter)?;
            emit(json, &sub, output::submission);
            Ok(ExitCode::SUCCESS)
        }
        Command::Pending => {
            let list = b.pending()?;
            emit(json, &list, |l| l.iter().map(output::submission).collect());
            Ok(ExitCode::SUCCESS)
        }
        Command::Review { id, decision, note } => {
            warn_if_ephemeral(cli);
            let decision = match decision {
                DecisionArg::Approve => Decision::Approve,
                DecisionArg::Reject => Decision::Reject,
            };
            let sub = b.review(id, decision, note.as_deref())?;
            emit(json, &sub, output::submission);
            Ok(ExitCode::SUCCESS)
        }
        Command::ValidateCasrn { .. } | Command::Fit { .. } | Command::Serve { .. } => unreachable!("handled in run"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            eprintln!("usage: therminfo <COMMAND> [OPTIONS]; see therminfo --help");
            ExitCode::from(2)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
