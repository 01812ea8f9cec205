use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use codedpir::fixtures;
use codedpir::harness::{self, AuditMode, ProtocolTag, Scheme, TableOptions};
use codedpir::optimizer::{optimize_rate, optimize_rate_colluding, OptConfig, OptResult, DEFAULT_BUDGET};
use codedpir::rate::{self, lrc_e_matrix, render};
use codedpir::{rng, CodeSpec, LinearCode};

type Res<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(name = "codedpir", version, about = "Private information retrieval over linearly coded storage")]
struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, env = "CODEDPIR_SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Code properties.
    Code {
        #[command(subcommand)]
        cmd: CodeCmd,
    },
    /// Finite and asymptotic MDS-PIR capacity.
    Capacity {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        f: Option<u32>,
    },
    /// Rate-matrix constructions.
    Matrix {
        #[command(subcommand)]
        cmd: MatrixCmd,
    },
    /// Maximize the rate of the file-independent protocols.
    Optimize {
        spec: PathBuf,
        #[arg(long, requires = "query_code")]
        colluding: bool,
        #[arg(long)]
        query_code: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// One end-to-end retrieval.
    Simulate(SimArgs),
    /// Empirical privacy audit of a protocol's queries.
    AuditPrivacy(AuditArgs),
    /// Reproduce the rate tables.
    Report {
        #[command(subcommand)]
        cmd: ReportCmd,
    },
    /// Built-in table fixtures.
    Fixtures {
        #[command(subcommand)]
        cmd: FixturesCmd,
    },
}

#[derive(Subcommand)]
enum CodeCmd {
    Info { spec: PathBuf },
    /// Generalized Hamming weight d_s.
    Ghw {
        spec: PathBuf,
        #[arg(long)]
        s: usize,
    },
}

#[derive(Subcommand)]
enum MatrixCmd {
    Find {
        spec: PathBuf,
        /// Generic construction from d_min (the default).
        #[arg(long, conflicts_with_all = ["automorphisms", "lrc"])]
        lemma4: bool,
        /// JSON list of n coordinate permutations (0-based images).
        #[arg(long, conflicts_with = "lrc")]
        automorphisms: Option<PathBuf>,
        /// Swap-based E-matrix for an `lrc` spec.
        #[arg(long)]
        lrc: bool,
    },
}

#[derive(Subcommand)]
enum ReportCmd {
    Tables {
        #[arg(long, default_value = "fixtures")]
        fixtures: PathBuf,
        /// Also run one retrieval per found scheme.
        #[arg(long)]
        round_trip: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
}

#[derive(Subcommand)]
enum FixturesCmd {
    Write {
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Proto {
    P1,
    P2,
    P3,
}

#[derive(Args)]
struct SchemeArgs {
    #[arg(long)]
    code: PathBuf,
    /// Query code for Protocol 3 (defaults to a fixture's query code, else the storage code).
    #[arg(long)]
    query_code: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
}

#[derive(Args)]
struct SimArgs {
    protocol: Proto,
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long, default_value_t = 2)]
    files: usize,
    /// 0-based index of the requested file.
    #[arg(long, default_value_t = 0)]
    request: usize,
    /// Message symbols live in GF(q^ell).
    #[arg(long, default_value_t = 1)]
    ell: u32,
    #[arg(long)]
    transcript: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    protocol: Proto,
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Comma-separated 0-based node indices; every legal set when omitted.
    #[arg(long)]
    collude: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Enumerate all randomness instead of sampling.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 2)]
    files: usize,
}

/// A code spec, or a table fixture (its storage code, plus its query code if any).
fn load_specs(path: &Path) -> Res<(CodeSpec, Option<CodeSpec>)> {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if v.get("family").is_some() {
        return Ok((serde_json::from_value(v)?, None));
    }
    let fx: fixtures::Fixture = serde_json::from_value(v)?;
    Ok((fx.code, fx.query_code))
}

fn load_spec(path: &Path) -> Res<LinearCode> {
    Ok(load_specs(path)?.0.build()?)
}

fn print_json<T: serde::Serialize>(x: &T) -> Res<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, x)?;
    writeln!(out)?;
    Ok(())
}

fn opt_config(seed: u64, budget: u128) -> OptConfig {
    OptConfig { seed, budget, ..Default::default() }
}

fn report_opt(r: &OptResult) -> Res<()> {
    for s in &r.steps {
        eprintln!("Γ={} β={} d={} patterns={} exhaustive={} subsampled={}: {}", s.gamma, s.beta, s.d, s.patterns, s.exhaustive, s.subsampled, s.outcome);
    }
    println!("rate {} = {}", r.rate(), render(&r.rate(), 4));
    if let Some(e) = &r.e {
        print_json(&serde_json::json!({ "gamma": r.gamma, "d": e.d, "beta": e.beta,
            "ehat": e.ehat.to_strings(), "ebar": e.ebar.to_strings() }))?;
    }
    Ok(())
}

fn build_scheme(proto: Proto, a: &SchemeArgs, seed: u64) -> Res<(Scheme, LinearCode)> {
    let code = load_spec(&a.code)?;
    let tag = match proto {
        Proto::P1 => ProtocolTag::P1,
        Proto::P2 => ProtocolTag::P2,
        Proto::P3 => ProtocolTag::P3,
    };
    let cbar = match (&a.query_code, load_specs(&a.code)?.1) {
        (Some(p), _) => Some(load_spec(p)?),
        (None, Some(q)) => Some(q.build()?),
        (None, None) => None,
    };
    let scheme = harness::build_scheme(tag, &code, cbar.as_ref(), &opt_config(seed, a.budget))?;
    Ok((scheme, code))
}

fn run(cli: Cli) -> Res<bool> {
    let seed = cli.seed.unwrap_or_else(rng::env_seed);
    match cli.cmd {
        Cmd::Code { cmd: CodeCmd::Info { spec } } => {
            let c = load_spec(&spec)?;
            print_json(&serde_json::json!({
                "n": c.n(), "k": c.k(), "q": c.field().order(),
                "d_min": c.min_distance()?,
                "dual_d_min": c.dual().min_distance()?,
                "information_set": c.pivot_information_set(),
                "generator": c.generator().to_rows(),
                "parity_check": c.parity_check().to_rows(),
            }))?;
        }
        Cmd::Code { cmd: CodeCmd::Ghw { spec, s } } => {
            println!("{}", load_spec(&spec)?.generalized_hamming_weight(s)?);
        }
        Cmd::Capacity { n, k, f } => {
            let c = rate::capacity_asymptotic(n, k);
            println!("C_inf = {c} = {}", render(&c, 4));
            if let Some(f) = f {
                let c = rate::capacity_finite(n, k, f);
                println!("C_f = {c} = {}", render(&c, 4));
            }
        }
        Cmd::Matrix { cmd: MatrixCmd::Find { spec, lemma4: _, automorphisms, lrc } } => {
            let cs = load_specs(&spec)?.0;
            let code = cs.build()?;
            if lrc {
                let (params, _) = cs.lrc_params()?.ok_or("--lrc needs an lrc spec")?;
                let e = lrc_e_matrix(&params, &code)?;
                for s in &e.swaps {
                    eprintln!("iteration {}: row {} moves {} -> {}", s.iteration, s.row, s.from, s.to);
                }
                print_json(&serde_json::json!({ "e": e.e.to_strings(), "rate": render(&rate::capacity_asymptotic(code.n() as u64, code.k() as u64), 4) }))?;
            } else {
                let lam = match automorphisms {
                    Some(p) => {
                        let perms: Vec<Vec<usize>> = serde_json::from_str(&std::fs::read_to_string(p)?)?;
                        rate::lambda_from_automorphisms(&code, &perms, &code.pivot_information_set())?
                    }
                    None => rate::lambda_generic(&code, seed)?,
                };
                let r = lam.ratio();
                print_json(&serde_json::json!({ "kappa": lam.kappa, "nu": lam.nu, "ratio": r.to_string(), "lambda": lam.lam.to_strings() }))?;
            }
        }
        Cmd::Optimize { spec, colluding, query_code, budget } => {
            let code = load_spec(&spec)?;
            let cfg = opt_config(seed, budget);
            let r = match (colluding, query_code) {
                (true, Some(q)) => optimize_rate_colluding(&code, &load_spec(&q)?, &cfg)?,
                _ => optimize_rate(&code, &cfg)?,
            };
            report_opt(&r)?;
        }
        Cmd::Simulate(a) => {
            let (scheme, code) = build_scheme(a.protocol, &a.scheme, seed)?;
            let t = harness::simulate(&scheme, &code, a.files, a.request, a.ell, seed)?;
            println!("rate {} ({} of {} symbols), recovered: {}", t.rate, t.file_symbols, t.downloads, t.recovered);
            println!("file digest {}", t.decoded_digest);
            if let Some(out) = a.transcript {
                std::fs::write(out, serde_json::to_string_pretty(&t)?)?;
            }
            return Ok(t.recovered);
        }
        Cmd::AuditPrivacy(a) => {
            let (scheme, code) = build_scheme(a.protocol, &a.scheme, seed)?;
            let sets = match &a.collude {
                Some(s) => vec![s.split(',').map(|x| x.trim().parse()).collect::<Result<Vec<usize>, _>>()?],
                None => harness::legal_sets(&scheme, code.n()),
            };
            let mode = if a.exact { AuditMode::Exact } else { AuditMode::Statistical { trials: a.trials } };
            let rep = harness::privacy_audit(&scheme, &code, a.files, &sets, mode, seed)?;
            for s in rep.failing_sets() {
                eprintln!("set {:?} fails (p = {:?})", s.set, s.min_p);
            }
            println!("{} sets, {} tests, per-test level {:.3e}: {}", rep.sets.len(), rep.tests, rep.alpha, if rep.pass { "pass" } else { "FAIL" });
            return Ok(rep.pass);
        }
        Cmd::Report { cmd: ReportCmd::Tables { fixtures: dir, round_trip, budget } } => {
            let fx = fixtures::load_dir(&dir)?;
            if fx.is_empty() {
                return Err(format!("no fixtures in {}", dir.display()).into());
            }
            let opts = TableOptions { opt: opt_config(seed, budget), round_trip };
            let mut ok = true;
            for f in &fx {
                let row = harness::report_row(f, &opts)?;
                ok &= row.matches();
                println!("{}", row.render());
            }
            return Ok(ok);
        }
        Cmd::Fixtures { cmd: FixturesCmd::Write { dir } } => {
            let fx = fixtures::builtin()?;
            fixtures::write_dir(&dir, &fx)?;
            println!("wrote {} fixtures to {}", fx.len(), dir.display());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        // e.g. `codedpir ... | head`
        Err(e) if e.downcast_ref::<serde_json::Error>().and_then(|e| e.io_error_kind()) == Some(std::io::ErrorKind::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<std::io::Error>().map(|e| e.kind()) == Some(std::io::ErrorKind::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
