use clap::Parser;

fn main() {
    let cli = parset_cli::Cli::parse();
    if let Err(err) = parset_cli::run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
