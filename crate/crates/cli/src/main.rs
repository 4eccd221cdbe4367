use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use maglat::Cli;

fn main() -> ExitCode {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                // bad flags are configuration mistakes
                _ => ExitCode::from(1),
            };
        }
    };
    let (command, args) = cli.command.split();

    if let Some(n) = args.threads {
        if n == 0 {
            eprintln!("maglat: config error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("maglat: cannot start thread pool: {e}");
            return ExitCode::from(2);
        }
    }

    match maglat::dispatch(command, args) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("maglat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
