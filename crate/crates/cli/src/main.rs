use clap::Parser;
use theta_hecke::qanalog::Exact;
use theta_hecke_cli::{configure_threads, run, Cli, USAGE_EXIT};

fn main() {
    let cli = Cli::parse();
    configure_threads();
    let code = match run(cli, &Exact) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            USAGE_EXIT
        }
    };
    std::process::exit(code);
}
