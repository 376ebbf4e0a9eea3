use clap::Parser;

fn main() {
    let cli = mxr::Cli::parse();
    std::process::exit(mxr::main_with(&cli));
}
