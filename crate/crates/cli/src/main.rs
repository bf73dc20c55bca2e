use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fundomain::harness::{
    build_cached, export_csv, inspect, load, run_suites, save, BuildConfig, ExportKind, HarnessError, Status, Suite,
};

/// Build and check circle maps conjugate to an irrational rotation whose
/// rotated Cantor sets form a measurable fundamental domain.
#[derive(Parser)]
#[command(name = "fundomain", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a construction and write its JSON descriptor.
    Build(BuildArgs),
    /// Run verification suites on a descriptor.
    Verify {
        descriptor: PathBuf,
        /// Suite to run; repeat for several. Default: all.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Sample phi, F, derivative, or cdf on a uniform grid as CSV.
    Export {
        descriptor: PathBuf,
        #[arg(long)]
        what: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Output file; stdout when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Summarize a descriptor.
    Inspect {
        descriptor: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct BuildArgs {
    /// `key = value [unit]` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key, `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    n_max: Option<String>,
    #[arg(long)]
    depth: Option<String>,
    #[arg(long)]
    i_max: Option<String>,
    #[arg(long)]
    d_max: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, short, default_value = "fundomain.json")]
    out: PathBuf,
}

fn config_from(a: &BuildArgs) -> Result<BuildConfig, HarnessError> {
    let mut c = match &a.config {
        Some(p) => std::fs::read_to_string(p)?.parse()?,
        None => BuildConfig::default(),
    };
    let named = [("alpha", &a.alpha), ("n_max", &a.n_max), ("depth", &a.depth), ("i_max", &a.i_max), ("d_max", &a.d_max), ("grid", &a.grid)];
    for (k, v) in named {
        if let Some(v) = v {
            c.set(k, v)?;
        }
    }
    for s in &a.sets {
        let (k, v) = s.split_once('=').ok_or_else(|| HarnessError::Config(format!("--set expects key=value, got `{s}`")))?;
        c.set(k.trim(), v)?;
    }
    c.validate()?;
    Ok(c)
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<(), HarnessError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, HarnessError> {
    match cli.cmd {
        Cmd::Build(a) => {
            let cfg = config_from(&a)?;
            let c = build_cached(&cfg)?;
            save(&c, &a.out)?;
            eprintln!("wrote {}", a.out.display());
            Ok(0)
        }
        Cmd::Verify { descriptor, suites, report } => {
            let wanted = if suites.is_empty() {
                Suite::ALL.to_vec()
            } else {
                suites.iter().map(|s| s.parse()).collect::<Result<Vec<Suite>, _>>()?
            };
            let c = load(&descriptor)?;
            let r = run_suites(&c, &wanted);
            for k in &r.checks {
                let tag = match k.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Undecided => "UNDECIDED",
                };
                eprintln!("{tag:9} {} ({} ms)", k.name, k.wall_ms);
            }
            let mut text = serde_json::to_string_pretty(&r).expect("report serializes");
            text.push('\n');
            write_out(report.as_ref(), &text)?;
            Ok(r.exit_code())
        }
        Cmd::Export { descriptor, what, samples, out } => {
            let kind: ExportKind = what.parse()?;
            let c = load(&descriptor)?;
            write_out(out.as_ref(), &export_csv(&c, kind, samples)?)?;
            Ok(0)
        }
        Cmd::Inspect { descriptor, json } => {
            let c = load(&descriptor)?;
            let info = inspect(&c);
            if json {
                println!("{}", serde_json::to_string_pretty(&info).expect("map serializes"));
            } else {
                for (k, v) in info {
                    println!("{k}: {v}");
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
