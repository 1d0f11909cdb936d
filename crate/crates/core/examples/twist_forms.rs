//! Twist forms from skew matrices: `α_M = Σ (Mz)_j dz_j` is horizontal,
//! has charge 2i under the diagonal circle and vanishes nowhere on the
//! sphere when `M` is invertible.
//!
//! ```bash
//! cargo run --example twist_forms
//! ```

use twistred::skew::SkewMatrix;
use twistred::torus::{stream_rng, MomentLevel};
use twistred::twist::{alpha_from_skew, verify_twist, TwistCheck};

fn main() -> twistred::Result<()> {
    let level = MomentLevel::unit_sphere(4);
    let m = SkewMatrix::random(4, &mut stream_rng(1, 0))?;
    let alpha = alpha_from_skew(&m);
    println!("charge {}, sigma_min(M)^2 = {:.4}", alpha.charge()[0], m.sigma_min().powi(2));

    let check = TwistCheck {
        nonvanishing_bound: Some(1e-6),
        ..TwistCheck::default()
    };
    for e in verify_twist(&alpha, &level, &check, "alpha_M")?.iter() {
        println!("{e}");
    }
    Ok(())
}
