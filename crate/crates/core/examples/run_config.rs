//! Runs a configuration file through the same path as the binary.
//!
//! ```text
//! cargo run --release --example run_config -- configs/clean_rubber.cfg /tmp/out
//! ```

use std::path::PathBuf;

use front_fem::cli::{execute, Args};

fn main() {
    let mut argv = std::env::args().skip(1);
    let config = argv.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/configs/clean_rubber.cfg"
        ))
    });
    let out = argv.next().map(PathBuf::from);
    let args = Args {
        config,
        out,
        mode: None,
        quiet: false,
    };
    match execute(&args) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for f in outcome.files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code().into());
        }
    }
}
