//! `vfl` — batch experiment driver for the vortex lab.
//!
//! Usage: `vfl <kind> [--config FILE] [--seed N] [--out DIR] [kind flags]`
//! with kinds: solve, transport, decay-study, symprod, lefschetz, nielsen,
//! bifurcation, spinc. Outputs are deterministic for a fixed (config,
//! seed): JSON records, CSV tables, self-contained SVG plots, and a
//! manifest.json listing every artifact with its sha256. Exit codes:
//! 0 ok, 1 computational failure, 2 config error.

mod plots;
mod runners;

use std::path::PathBuf;
use std::process::ExitCode;

pub struct Cli {
    pub kind: String,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub flags: std::collections::BTreeMap<String, String>,
}

fn parse_args() -> Result<Cli, String> {
    let mut args = std::env::args().skip(1);
    let kind = args.next().ok_or_else(usage)?;
    if kind == "--help" || kind == "-h" {
        return Err(usage());
    }
    let mut cli = Cli {
        kind,
        config: None,
        out: PathBuf::from("."),
        seed: 0,
        flags: Default::default(),
    };
    while let Some(flag) = args.next() {
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| format!("unexpected argument {flag:?}\n{}", usage()))?;
        let value = args
            .next()
            .ok_or_else(|| format!("flag --{key} requires a value"))?;
        match key {
            "config" => cli.config = Some(PathBuf::from(value)),
            "out" => cli.out = PathBuf::from(value),
            "seed" => {
                cli.seed = value
                    .parse()
                    .map_err(|_| format!("--seed must be an integer, got {value:?}"))?
            }
            other => {
                cli.flags.insert(other.to_string(), value);
            }
        }
    }
    Ok(cli)
}

fn usage() -> String {
    "usage: vfl <kind> [--config FILE] [--seed N] [--out DIR] [flags]\n\
     kinds: solve | transport | decay-study | symprod | lefschetz | nielsen | bifurcation | spinc\n\
     kind flags: symprod --g G --d D [--mode betti|euler];\n\
     \x20           lefschetz --g G --d D --matrix FILE; nielsen --g G --trials N"
        .to_string()
}

fn main() -> ExitCode {
    let cli = match parse_args() {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    if let Ok(threads) = std::env::var("VFL_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
    }
    match runners::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // machine-readable error record on stderr; partial artifacts
            // are removed by the runner before returning
            let record = serde_json::json!({
                "error": e.message,
                "kind": cli.kind,
                "schema_pointer": e.pointer,
            });
            eprintln!("{}", serde_json::to_string(&record).unwrap());
            ExitCode::from(e.exit_code)
        }
    }
}
