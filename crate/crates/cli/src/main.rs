use clap::Parser;

fn main() {
    let cli = eclimb::app::Cli::parse();
    let stdout = std::io::stdout();
    if let Err(e) = eclimb::app::run(&cli, std::env::vars(), &mut stdout.lock()) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
