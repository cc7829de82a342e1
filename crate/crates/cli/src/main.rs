use clap::Parser;

fn main() {
    let cli = match dlam_cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are ordinary output.
            if err.use_stderr() {
                eprint!("{err}");
                std::process::exit(dlam_cli::commands::EXIT_USAGE);
            }
            print!("{err}");
            std::process::exit(0);
        }
    };
    std::process::exit(dlam_cli::run(&cli));
}
