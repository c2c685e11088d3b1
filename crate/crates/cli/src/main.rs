use clap::Parser;

fn main() {
    let cli = gthresh::Cli::parse();
    if let Err(e) = gthresh::run(&cli) {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
