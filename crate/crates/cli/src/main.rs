mod args;
mod commands;
mod output;

use clap::Parser;

use args::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(a) => commands::build(a),
        Command::Explain(a) => commands::explain(a),
        Command::Pathmetrics(a) => commands::pathmetrics(a),
        Command::Evaluate(a) => commands::evaluate_cmd(a),
        Command::Serve(a) => commands::serve(a),
        Command::Bsp(a) => commands::bsp(a, cli.seed),
        Command::Moons(a) => commands::moons(a, cli.seed),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}
