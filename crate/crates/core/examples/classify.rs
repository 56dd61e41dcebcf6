//! Classify every bundled degree-p fixture, or the configs given as
//! arguments, and print the verdict JSON.
//!
//!     cargo run --example classify -- path/to/run.toml

use valdef::config::RunConfig;
use valdef::fixtures;
use valdef::run::classify_config;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let configs: Vec<valdef::Result<RunConfig>> = if args.is_empty() {
        fixtures::ALL.iter().filter(|(n, _)| !n.starts_with("tower")).map(|(_, t)| fixtures::load(t)).collect()
    } else {
        args.iter().map(|a| RunConfig::load(std::path::Path::new(a))).collect()
    };
    for cfg in configs {
        match cfg.and_then(|c| classify_config(&c).map(|r| (c, r))) {
            Ok((c, (res, _))) => {
                println!("{}: {}", c.name(), serde_json::to_string(&res).unwrap());
            }
            Err(e) => eprintln!("error: {e}"),
        }
    }
}
