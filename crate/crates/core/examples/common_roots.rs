//! Why charge-2 is special on CP³: horizontal charge-2 forms all come from
//! skew matrices, and higher-charge horizontal tuples have common zeros.
//!
//! ```bash
//! cargo run --example common_roots
//! ```

use twistred::search::{common_root_search, random_koszul_tuple, skew_tuple};
use twistred::skew::{horizontal_space_dim, SkewMatrix};
use twistred::torus::stream_rng;

fn main() -> twistred::Result<()> {
    for n in [2, 4, 6, 8] {
        println!("C^{n}: horizontal charge-2 space has dimension {}", horizontal_space_dim(n, 2)?);
    }
    let koszul = common_root_search(&random_koszul_tuple(4, 0, 0), 32, 0)?;
    println!("charge-3 Koszul tuple: min sum |P_j|^2 = {:.2e} at {:?}", koszul.min_value, koszul.argmin);

    let m = SkewMatrix::random(4, &mut stream_rng(0, 1))?;
    let skew = common_root_search(&skew_tuple(&m), 32, 0)?;
    println!("charge-2 skew tuple: min {:.4}, sigma_min^2 = {:.4}", skew.min_value, m.sigma_min().powi(2));
    Ok(())
}
