use std::process::ExitCode;

use clap::Parser;
use statsurf_cli::args::Cli;
use statsurf_cli::run;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.into_config() {
        Err(e) => {
            eprintln!("statsurf: {e}");
            e.exit_code()
        }
        Ok((config, threads)) => {
            if let Some(n) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("statsurf: cannot set up {n} threads: {e}");
                    return ExitCode::from(2);
                }
            }
            match run(&config).and_then(|out| out.write_artifacts().map(|_| out)) {
                Ok(out) => {
                    print!("{out}");
                    out.status.exit_code()
                }
                Err(e) => {
                    eprintln!("statsurf: {e}");
                    e.exit_code()
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
