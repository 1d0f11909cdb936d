//! Where a Gram–Schmidt pair degenerates: the eigenvalue clusters of
//! `M₁⁻¹M₂` give four projective lines, and approaching one of them along
//! two paths gives two different limits of the reduced form.
//!
//! ```bash
//! cargo run --example singular_lines
//! ```

use twistred::skew::{collinearity_locus, SkewMatrix};
use twistred::twist::singular_limit_probe;
use twistred::{Form, C64};

/// Terms with coefficients above 1e-3, to hide the O(ε) remainder.
fn dominant(f: &Form) -> String {
    f.iter()
        .filter(|(_, c)| c.norm() > 1e-3)
        .map(|(idx, c)| format!("({:.4})·{idx}", c))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn main() -> twistred::Result<()> {
    let c = |re: f64| C64::new(re, 0.0);
    let m1 = SkewMatrix::block_diagonal(&[c(1.0); 4]);
    let m2 = SkewMatrix::block_diagonal(&[c(1.0), c(2.0), c(3.0), c(4.0)]);

    let rep = collinearity_locus(&m1, &m2, 1e-8)?;
    for cl in &rep.clusters {
        println!("eigenvalue {:.3}: algebraic {}, geometric {}", cl.value, cl.algebraic, cl.geometric);
    }

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let probe = singular_limit_probe(&m1, &m2, [c(s), C64::new(0.0, s)], &[1e-2, 1e-4, 1e-6])?;
    println!("limit along path 1: {}", dominant(probe.limit1()));
    println!("limit along path 2: {}", dominant(probe.limit2()));
    println!("difference: {:.3}", probe.difference());
    Ok(())
}
