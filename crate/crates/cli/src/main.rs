use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mtensor::io::{read_scenario, read_tensor_json, write_indicator_csv, write_tensor_json};
use mtensor::ledger::{build_tensor, parse_transactions_csv, Taxonomy};
use mtensor::sim::run;
use mtensor::{rank1_approx, AlsConfig};
use mtensor_server::{serve, ServerConfig, DEFAULT_MAX_SESSIONS};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "mtensor", version, about = "Money-as-a-tensor toolkit")]
struct Cli {
    /// Pretty-print JSON written to stdout.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a (sector, agent, time) tensor from a transaction CSV.
    Ingest {
        #[arg(long)]
        transactions: PathBuf,
        /// JSON with `sectors`, `agents` and `periods` label lists.
        #[arg(long)]
        taxonomy: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank-1 decomposition of a tensor JSON file.
    Decompose {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a scenario file and emit the indicator CSV.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Start the HTTP session API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Origin allowed to call the API from a browser.
        #[arg(long)]
        allow_origin: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_SESSIONS)]
        max_sessions: usize,
    },
}

enum Failure {
    Validation(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Io(_) => 2,
        }
    }
}

type Outcome = Result<(), Failure>;

fn invalid(context: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Validation(format!("{}: {e}", context.display()))
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

/// Writes via a temporary file in the destination directory, then renames.
fn write_atomic(path: &Path, bytes: &[u8]) -> Outcome {
    let io = |e: std::io::Error| Failure::Io(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn stdout(bytes: &[u8]) -> Outcome {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| Failure::Io(format!("cannot write stdout: {e}")))
}

fn print_json(v: &Value, pretty: bool) -> Outcome {
    let mut text =
        if pretty { serde_json::to_string_pretty(v) } else { serde_json::to_string(v) }.expect("json values serialize");
    text.push('\n');
    stdout(text.as_bytes())
}

fn ingest(transactions: &Path, taxonomy: &Path, out: &Path) -> Outcome {
    let tax: Taxonomy = serde_json::from_slice(&read(taxonomy)?).map_err(|e| invalid(taxonomy, e))?;
    let txns = parse_transactions_csv(&read(transactions)?).map_err(|e| invalid(transactions, e))?;
    let tensor = build_tensor(&txns, &tax).map_err(|e| invalid(transactions, e))?;
    let bytes = write_tensor_json(&tensor, &tax).map_err(|e| invalid(out, e))?;
    write_atomic(out, &bytes)?;
    eprintln!("ingested {} transactions, total {}, into {}", txns.len(), tensor.sum(), out.display());
    Ok(())
}

fn decompose(path: &Path, max_iters: usize, tol: f64, seed: u64, pretty: bool) -> Outcome {
    let (tensor, tax) = read_tensor_json(&read(path)?).map_err(|e| invalid(path, e))?;
    let cfg = AlsConfig::new(max_iters, tol, seed).map_err(|e| Failure::Validation(e.to_string()))?;
    let fit = rank1_approx(&tensor, &cfg);
    let f = &fit.factors;
    print_json(
        &json!({
            "weight": f.weight,
            "x": f.x,
            "y": f.y,
            "z": f.z,
            "residual": fit.residual,
            "iterations": fit.iterations,
            "axes": tax,
        }),
        pretty,
    )
}

fn simulate(path: &Path, seed: Option<u64>, out: Option<&Path>) -> Outcome {
    let mut scenario = read_scenario(&read(path)?).map_err(|e| invalid(path, e))?;
    if let Some(seed) = seed {
        scenario.config.seed = seed;
    }
    let frames = run(&scenario.config, &scenario.shocks, &scenario.schedule).map_err(|e| invalid(path, e))?;
    let csv = write_indicator_csv(&frames);
    match out {
        Some(p) => write_atomic(p, &csv),
        None => stdout(&csv),
    }
}

fn serve_cmd(host: &str, port: u16, allow_origin: Option<String>, max_sessions: usize) -> Outcome {
    let cfg = ServerConfig { allow_origin, max_sessions };
    let app = mtensor_server::router(&cfg).map_err(Failure::Validation)?;
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(e.to_string()))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| Failure::Io(format!("cannot bind {host}:{port}: {e}")))?;
        let addr = listener.local_addr().map_err(|e| Failure::Io(e.to_string()))?;
        eprintln!("listening on http://{addr}");
        serve(listener, app).await.map_err(|e| Failure::Io(e.to_string()))
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage mistakes are validation failures; 2 is reserved for I/O.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Ingest { transactions, taxonomy, out } => ingest(&transactions, &taxonomy, &out),
        Command::Decompose { tensor, max_iters, tol, seed } => decompose(&tensor, max_iters, tol, seed, cli.pretty),
        Command::Simulate { scenario, seed, out } => simulate(&scenario, seed, out.as_deref()),
        Command::Serve { port, host, allow_origin, max_sessions } => serve_cmd(&host, port, allow_origin, max_sessions),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Validation(m) | Failure::Io(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}
