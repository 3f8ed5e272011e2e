use clap::Parser;

fn main() {
    let cli = cobarlie::cli::Cli::parse();
    std::process::exit(cobarlie::cli::run(cli));
}
