//! Torsion of the CP³ structures: the five classes W₁…W₅ in closed form,
//! both structure equations, and the criterion `M*M = μI` for W₃ = W₄ = W₅ = 0.
//!
//! ```bash
//! cargo run --release --example torsion_classes
//! ```

use twistred::skew::SkewMatrix;
use twistred::torsion::{lt_check, torsion_classes, verify_torsion_equations};
use twistred::torus::{stream_rng, MomentLevel};
use twistred::C64;

fn main() -> twistred::Result<()> {
    let level = MomentLevel::unit_sphere(4);
    let mut rng = stream_rng(3, 0);
    let cases = [
        ("diag(J, J)", SkewMatrix::block_diagonal(&[C64::new(1.0, 0.0); 2])),
        ("random LT", SkewMatrix::random_lt(4, C64::new(1.0, 0.3), &mut rng)?),
        ("diag(J, 2J)", SkewMatrix::block_diagonal(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)])),
    ];
    for (label, m) in cases {
        let t = torsion_classes(&m)?;
        let pts = level.sample(20, 0, |_| true)?;
        let eqs = verify_torsion_equations(&t, &level, &pts, 10, 0, 1e-8)?;
        let lt = lt_check(&t, &level, &pts, 10, 0)?;
        println!(
            "{label:<12} equations pass: {}  LT by matrix: {}  max |W3|,|W4|,|W5|: {:.2e}",
            eqs.all_passed(),
            lt.lt_by_matrix,
            lt.max_w345
        );
    }
    Ok(())
}
