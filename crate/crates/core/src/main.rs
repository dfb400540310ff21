use clap::Parser;

fn main() {
    let cli = finsler::app::Cli::parse();
    std::process::exit(finsler::app::main_with(cli));
}
