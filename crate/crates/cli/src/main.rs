use clap::Parser;
use debranges_cli::{load_config, output_prefix, run, write_artifacts, Command, CSV_HELP};
use std::path::PathBuf;
use std::process::ExitCode;

/// Batch experiments on de Branges spaces of canonical systems.
#[derive(Parser, Debug)]
#[command(name = "debranges", version, after_help = CSV_HELP)]
struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output prefix; writes <prefix>.csv and <prefix>.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Maximum number of worker threads.
    #[arg(long, env = "SAMPLER_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = args.threads.filter(|&n| n > 0) {
        // Only fails if a global pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = load_config(&args.config).and_then(|config| {
        let prefix = output_prefix(&config, args.out.as_deref(), &args.config);
        let artifacts = run(args.command, config)?;
        write_artifacts(&prefix, &artifacts).map(|()| prefix)
    });
    match result {
        Ok(prefix) => {
            println!("wrote {0}.csv and {0}.json", prefix.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
