//! Higher-charge twist forms by pulling back `α_M` along the Veronese map:
//! degree 1 reproduces `α_M`, degree 2 gives a charge-4i form on C⁸.
//!
//! ```bash
//! cargo run --release --example veronese
//! ```

use twistred::scenario::{find, run, RunOptions};
use twistred::skew::SkewMatrix;
use twistred::torus::stream_rng;
use twistred::twist::{alpha_from_skew, veronese_pullback};

fn main() -> twistred::Result<()> {
    let m = SkewMatrix::random(4, &mut stream_rng(2, 0))?;
    let (a, b) = (veronese_pullback(1, &m)?, alpha_from_skew(&m));
    let same = a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| x.sub(y).is_zero());
    println!("degree 1 equals alpha_M: {same}");

    let m36 = SkewMatrix::random(36, &mut stream_rng(2, 1))?;
    println!("degree 2 charge: {:?}", veronese_pullback(2, &m36)?.charge());

    let rep = run(&find("veronese-2").expect("built-in"), &RunOptions::default())?;
    for e in rep.entries.iter() {
        println!("{e}");
    }
    Ok(())
}
