//! The chain of identities behind the reduction, checked one stage at a
//! time so a broken stage is easy to isolate.
//!
//! ```bash
//! cargo run --example intermediate_chain
//! ```

use twistred::reduction::{intermediate_identities, reduce, CheckConfig, ReduceOptions};
use twistred::skew::SkewMatrix;
use twistred::torus::{stream_rng, MomentLevel};
use twistred::twist::alpha_from_skew;

fn main() -> twistred::Result<()> {
    let level = MomentLevel::unit_sphere(4);
    let m = SkewMatrix::random(4, &mut stream_rng(5, 0))?;
    let red = reduce(&level, vec![alpha_from_skew(&m)], &ReduceOptions::default())?;
    let pts = red.sample(30, 1, |_| true)?;
    for e in intermediate_identities(&red, &pts, &CheckConfig::default())?.iter() {
        println!("{e}");
    }
    Ok(())
}
