use clap::Parser;

fn main() {
    let cli = bilattice::cli::Cli::parse();
    std::process::exit(bilattice::cli::main_with(cli));
}
