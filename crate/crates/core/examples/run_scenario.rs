//! Running a scenario from code: load JSON, execute the full check chain,
//! and write the machine-readable report.
//!
//! ```bash
//! cargo run --example run_scenario -- crates/core/scenarios/cp3-lt.json
//! ```

use twistred::scenario::{find, run, RunOptions, Scenario};

fn main() -> twistred::Result<()> {
    let sc = match std::env::args().nth(1) {
        Some(path) => Scenario::load(path)?,
        None => find("cp3-llt").expect("built-in"),
    };
    let rep = run(&sc, &RunOptions::default())?;
    for e in rep.entries.iter() {
        println!("{e}");
    }
    println!("{}: {} entries, passed = {}", sc.name, rep.entries.len(), rep.passed);
    let out = std::env::temp_dir().join(format!("{}-report.json", sc.name));
    std::fs::write(&out, rep.to_json())?;
    println!("report written to {}", out.display());
    Ok(())
}
