use clap::Parser;
use infoengine_cli::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("infoengine: {e}");
        std::process::exit(e.exit_code());
    }
}
