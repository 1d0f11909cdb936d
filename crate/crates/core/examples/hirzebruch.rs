//! SU(3)-structures on CP¹-bundles over Hirzebruch surfaces: a rank-3 torus
//! on C⁶ with a non-holomorphic twist form, for n = −1, 0, 1, 2.
//!
//! ```bash
//! cargo run --release --example hirzebruch
//! ```

use twistred::scenario::{find, hirzebruch_name, run, RunOptions};

fn main() -> twistred::Result<()> {
    for n in [-1, 0, 1, 2] {
        let sc = find(&hirzebruch_name(n)).expect("built-in");
        let rep = run(&sc, &RunOptions::default())?;
        let su = rep
            .entries
            .iter()
            .filter(|e| e.name.starts_with("SU:"))
            .map(|e| e.value)
            .fold(0.0, f64::max);
        println!("{:<16} SU residual {su:.2e}  passed: {}", sc.name, rep.passed);
    }
    Ok(())
}
