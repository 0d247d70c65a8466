//! Runs a preset through the experiment harness and reads its CSV back.
//!
//! `cargo run --release --example presets -- <name> [--full]`; without a
//! name every preset runs in its reduced form.

use lzlab::harness::presets::{preset, PRESETS};
use lzlab::harness::{read_csv, run};

fn main() -> lzlab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let full = args.iter().any(|a| a == "--full");
    let names: Vec<&str> = match args.iter().find(|a| !a.starts_with("--")) {
        Some(name) => vec![name.as_str()],
        None => PRESETS.iter().map(|p| p.0).collect(),
    };
    let root = std::env::temp_dir().join("lzlab-presets");
    for name in names {
        let mut config = preset(name, !full)?;
        config.output = root.join(name);
        let summary = run(&config)?;
        println!("{name} (config {}):", summary.hash);
        for file in summary.files.iter().filter(|f| f.extension().is_some_and(|e| e == "csv")) {
            let (header, rows) = read_csv(file)?;
            println!("  {} rows of {}", rows.len(), header.join(","));
        }
    }
    Ok(())
}
