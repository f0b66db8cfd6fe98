use clap::Parser;
use statues_cli::{execute, Cli, Io};

fn main() {
    let cli = Cli::parse();
    let code = execute(
        &cli,
        &mut Io {
            stdin: &mut std::io::stdin(),
            stdout: &mut std::io::stdout(),
            stderr: &mut std::io::stderr(),
        },
    );
    std::process::exit(code);
}
