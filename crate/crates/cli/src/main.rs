use clap::Parser;
use fluxcz_cli::{run, sidecar_path, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(table) => {
            println!("{}: {} rows -> {} (+ {})", cli.experiment, table.rows.len(), cli.out.display(), sidecar_path(&cli.out).display());
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
