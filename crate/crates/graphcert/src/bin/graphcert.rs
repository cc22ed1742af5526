//! Command-line front end: analyze graphs, emit and verify
//! certificates, compute fidelity bounds, and run the numeric
//! self-test suite.
//!
//! Exit codes are a stable contract: 0 success, 1 unreadable or
//! malformed input, 2 graph not covered, 3 internal verification
//! failure, 4 certificate rejected.

use clap::{Parser, Subcommand, ValueEnum};
use graphcert::analysis;
use graphcert::bounds;
use graphcert::certificate::{self, Verdict};
use graphcert::graph::parse_graph;
use graphcert::selftest::{self, SelfTestConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_PARSE: u8 = 1;
const EXIT_NOT_COVERED: u8 = 2;
const EXIT_INTERNAL: u8 = 3;
const EXIT_REJECTED: u8 = 4;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "graphcert",
    version,
    about = "Certificates of non-preparability for qudit graph states in \
             bipartite-source networks without classical communication"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a graph file and build a verified certificate.
    Analyze {
        /// Graph file (see the README for the format).
        graph: PathBuf,
        /// Write the certificate JSON here instead of embedding it.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Re-verify a certificate against a graph file.
    Verify { cert: PathBuf, graph: PathBuf },
    /// Print the fidelity radius for a dimension and overlap parameter.
    Bounds {
        /// Prime local dimension.
        #[arg(long, required_unless_present = "analytic_limit")]
        d: Option<u32>,
        #[arg(long = "q-overlap", default_value_t = 1)]
        q_overlap: u32,
        /// Evaluate the large-dimension limit instead of a concrete prime.
        #[arg(long)]
        analytic_limit: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run the numeric self-test suites.
    Selftest {
        /// Largest prime dimension to exercise.
        #[arg(long, default_value_t = 13)]
        max_d: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Corrupt one expected value to prove failures propagate.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep clap's rendering but pin the usage exit code
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let code = match cli.command {
        Command::Analyze { graph, out, format } => cmd_analyze(&graph, out.as_deref(), format),
        Command::Verify { cert, graph } => cmd_verify(&cert, &graph),
        Command::Bounds {
            d,
            q_overlap,
            analytic_limit,
            format,
        } => cmd_bounds(d, q_overlap, analytic_limit, format),
        Command::Selftest {
            max_d,
            seed,
            inject_fault,
        } => cmd_selftest(max_d, seed, inject_fault),
    };
    ExitCode::from(code)
}

fn read_graph(path: &Path) -> Result<graphcert::graph::Multigraph, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_PARSE
    })?;
    parse_graph(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_PARSE
    })
}

fn cmd_analyze(graph_path: &Path, out: Option<&Path>, format: Format) -> u8 {
    let graph = match read_graph(graph_path) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let mut report = match analysis::analyze(&graph, Some(graph_path.display().to_string())) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INTERNAL;
        }
    };
    if !report.covered {
        match format {
            Format::Text => print!("{}", report.to_text()),
            Format::Json => print!("{}", report.to_json()),
        }
        return EXIT_NOT_COVERED;
    }
    if let Some(out_path) = out {
        let cert = analysis::detach_certificate(&mut report, out_path.display().to_string())
            .expect("covered analysis always carries a certificate");
        if let Err(e) = std::fs::write(out_path, certificate::to_json(&cert)) {
            eprintln!("error: cannot write {}: {e}", out_path.display());
            return EXIT_PARSE;
        }
    }
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => print!("{}", report.to_json()),
    }
    EXIT_OK
}

fn cmd_verify(cert_path: &Path, graph_path: &Path) -> u8 {
    let graph = match read_graph(graph_path) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let text = match std::fs::read_to_string(cert_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cert_path.display());
            return EXIT_PARSE;
        }
    };
    let cert = match certificate::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("reject: {e}");
            return EXIT_REJECTED;
        }
    };
    match certificate::verify_against_graph(&cert, &graph) {
        Verdict::Accept => {
            println!("accept");
            EXIT_OK
        }
        Verdict::Reject(r) => {
            eprintln!("reject: {r}");
            EXIT_REJECTED
        }
    }
}

fn cmd_bounds(d: Option<u32>, q_overlap: u32, analytic_limit: bool, format: Format) -> u8 {
    let bound = if analytic_limit {
        bounds::fidelity_threshold_limit(q_overlap)
    } else {
        bounds::fidelity_threshold(d.expect("clap enforces --d"), q_overlap)
    };
    let bound = match bound {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    match format {
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&bound).expect("bound serialization")
            );
        }
        Format::Text => {
            match bound.dimension {
                bounds::DimensionParam::Prime(d) => println!("d: {d}"),
                bounds::DimensionParam::AnalyticLimit(_) => println!("d: analytic limit"),
            }
            println!("q_overlap: {}", bound.q_overlap);
            println!("beta: {}", fmt(bound.beta));
            println!("gamma: {}", fmt(bound.gamma));
            println!("delta_max: {}", fmt(bound.delta_max));
            println!("f_min: {}", fmt(bound.f_min));
        }
    }
    EXIT_OK
}

fn fmt(v: f64) -> String {
    serde_json::to_string(&v).expect("finite float")
}

fn cmd_selftest(max_d: u32, seed: u64, inject_fault: bool) -> u8 {
    if !graphcert::modular::is_prime(max_d) {
        eprintln!("error: --max-d must be prime");
        return EXIT_PARSE;
    }
    let report = selftest::run(&SelfTestConfig {
        max_d,
        seed,
        inject_fault,
    });
    for check in &report.checks {
        let status = if check.passed { "pass" } else { "FAIL" };
        println!("{status}  {} — {}", check.name, check.detail);
    }
    if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_INTERNAL
    }
}
