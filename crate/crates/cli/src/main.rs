use clap::Parser;

fn main() {
    let cli = tileasm::Cli::parse();
    std::process::exit(tileasm::execute(cli));
}
