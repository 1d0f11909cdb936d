//! Two twists on CP⁷: orthogonalize a pair of charge-2 forms, then let the
//! audit try every sign/factor combination in `(Ω, ω)` and pin the one that
//! satisfies the SU(7) equations.
//!
//! ```bash
//! cargo run --release --example convention_audit
//! ```

use twistred::reduction::{convention_audit, reduce, CheckConfig, ReduceOptions};
use twistred::skew::{collinear_planes, distance_to_plane, SkewMatrix};
use twistred::torus::MomentLevel;
use twistred::twist::{alpha_from_skew, gram_schmidt};
use twistred::C64;

fn main() -> twistred::Result<()> {
    let m1 = SkewMatrix::block_diagonal(&[C64::new(1.0, 0.0); 4]);
    let m2 = SkewMatrix::block_diagonal(&[
        C64::new(1.5, 0.0),
        C64::new(-0.7, 0.0),
        C64::new(2.3, 0.5),
        C64::new(0.4, -1.1),
    ]);
    let twists = gram_schmidt(&[alpha_from_skew(&m1), alpha_from_skew(&m2)])?;
    let opts = ReduceOptions {
        normalize: true,
        ..ReduceOptions::default()
    };
    let red = reduce(&MomentLevel::unit_sphere(8), twists, &opts)?;

    // stay away from the lines where the two forms become collinear
    let planes = collinear_planes(&m1, &m2, 1e-8)?;
    let pts = red.sample(10, 0, |z| planes.iter().all(|p| distance_to_plane(z, p) >= 1e-2))?;

    let cfg = CheckConfig {
        trials: 6,
        ..CheckConfig::default()
    };
    let audit = convention_audit(&red, &pts, &cfg)?;
    for row in &audit.rows {
        println!(
            "{:<28} SU1 {:.2e}  SU2 {:.2e}  {}",
            row.label,
            row.su1,
            row.su2,
            if row.passed { "pass" } else { "" }
        );
    }
    println!("selected: {:?}", audit.selected.map(|c| c.label()));
    println!("stated convention equivalent to selection: {}", audit.stated_equivalent);
    Ok(())
}
