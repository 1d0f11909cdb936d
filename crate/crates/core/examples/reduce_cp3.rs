//! The SU(3)-structure on CP³ from the twist form of `M = diag(J, J)`:
//! build `(Ω, ω)` on S⁷, check both SU equations and basicness, and show
//! that a basis change of the torus rescales `Ω` by `det A`.
//!
//! ```bash
//! cargo run --example reduce_cp3
//! ```

use twistred::reduction::{basis_change_check, reduce, verify_basic, verify_su_equations, CheckConfig, ReduceOptions};
use twistred::skew::SkewMatrix;
use twistred::torus::MomentLevel;
use twistred::twist::alpha_from_skew;
use twistred::C64;

fn main() -> twistred::Result<()> {
    let level = MomentLevel::unit_sphere(4);
    let m = SkewMatrix::block_diagonal(&[C64::new(1.0, 0.0); 2]);
    let opts = ReduceOptions {
        normalize: true,
        ..ReduceOptions::default()
    };
    let red = reduce(&level, vec![alpha_from_skew(&m)], &opts)?;
    let pts = red.sample(50, 0, |_| true)?;
    let cfg = CheckConfig::default();

    let local = red.local(&pts[0])?;
    println!("n = {}, conformal factor at a sample point: {:.6}", red.n(), local.factor());

    let mut entries = verify_su_equations(&red, &pts, &cfg)?;
    entries.extend(verify_basic(&red, &pts, &cfg)?);
    entries.extend(basis_change_check(&red, &[vec![-3.0]], &pts, &cfg)?);
    for e in entries.iter() {
        println!("{e}");
    }
    Ok(())
}
