//! Constant-coefficient forms on C^N: wedge, contraction, evaluation, and
//! the flat SU(N)-structure identities.
//!
//! ```bash
//! cargo run --example exterior_basics
//! ```

use twistred::exterior::{big_omega0, contract, eval_on, omega0, su_constant};
use twistred::{Form, MultiIndex, TangentVector, C64};

fn main() -> twistred::Result<()> {
    let n = 3;
    let w = omega0(n);
    let vol = big_omega0(n);

    // Ω₀∧Ω̄₀ = c_N ω₀^N
    let lhs = vol.wedge(&vol.conj())?;
    let rhs = w.wedge_power(n)?.scale(su_constant(n));
    println!("Omega0^conj(Omega0) - c_3 omega0^3: {:.1e}", (&lhs - &rhs).max_abs());

    // (dz1∧dz2)(∂1, ∂2) = 1
    let a = Form::monomial(n, MultiIndex::new(&[0, 1], &[])?, C64::new(1.0, 0.0));
    let (d1, d2) = (TangentVector::d_dz(n, 0), TangentVector::d_dz(n, 1));
    println!("(dz1^dz2)(d1, d2) = {}", eval_on(&a, &[d1.clone(), d2])?);

    // ι_{∂1} ω₀ = (i/2) dz̄1
    println!("iota_d1 omega0 = {:?}", contract(&d1, &w)?);
    Ok(())
}
