use clap::Parser;

fn main() {
    let cli = terraspec::cli::Cli::parse();
    std::process::exit(terraspec::cli::main_with(cli));
}
