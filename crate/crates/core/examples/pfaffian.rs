//! `dα_M ∧ dα_M = 8 Pf(M) Ω₀` as an exact symbolic identity, and Pf² = det.
//!
//! ```bash
//! cargo run --example pfaffian
//! ```

use twistred::skew::SkewMatrix;
use twistred::torsion::pfaffian_identity;
use twistred::torus::stream_rng;

fn main() -> twistred::Result<()> {
    let mut rng = stream_rng(4, 0);
    let m = SkewMatrix::random_integer(4, 3, &mut rng)?;
    println!("M = {:?}", m.upper_entries());
    println!("Pf(M) = {}", m.pfaffian());
    println!("d alpha^d alpha - 8 Pf(M) Omega0 is zero: {}", pfaffian_identity(&m)?.is_zero());
    for n in [2, 4, 6, 8] {
        let m = SkewMatrix::random(n, &mut rng)?;
        let (pf, det) = (m.pfaffian(), m.det());
        println!("{n}x{n}: |Pf^2 - det| / |det| = {:.1e}", (pf * pf - det).norm() / det.norm());
    }
    Ok(())
}
