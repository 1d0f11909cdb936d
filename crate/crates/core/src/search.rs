//! Multi-start projected-gradient search for zeros of a `(1,0)`-form on a
//! moment level. A search that finds nothing corroborates nonvanishing; it
//! never proves it.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::C64;
use crate::field::ScalarField;
use crate::poly::{Monomial, Polynomial, PowerTable};
use crate::torus::{stream_rng, MomentLevel};

const MAX_ITERS: usize = 400;

#[derive(Clone, Debug)]
pub struct ZeroSearch {
    /// Smallest `Σ_j |a_j|²` reached.
    pub min_value: f64,
    pub argmin: Vec<C64>,
    pub starts: usize,
}

struct Objective<'a> {
    coeffs: &'a [ScalarField],
    /// `∂a_j/∂z_k` and `∂a_j/∂z̄_k`, indexed `[j][k]`.
    d_z: Vec<Vec<ScalarField>>,
    d_zbar: Vec<Vec<ScalarField>>,
    max_exp: usize,
}

impl<'a> Objective<'a> {
    fn new(coeffs: &'a [ScalarField]) -> Self {
        let n = coeffs.len();
        let d_z = coeffs.iter().map(|a| (0..n).map(|k| a.partial(k)).collect()).collect();
        let d_zbar = coeffs.iter().map(|a| (0..n).map(|k| a.partial(n + k)).collect()).collect();
        let max_exp = coeffs.iter().map(ScalarField::max_exponent).max().unwrap_or(0);
        Self {
            coeffs,
            d_z,
            d_zbar,
            max_exp,
        }
    }

    fn value(&self, z: &[C64]) -> Result<f64> {
        let t = PowerTable::new(z, self.max_exp);
        self.coeffs
            .iter()
            .map(|a| Ok(a.eval(&t)?.norm_sqr()))
            .sum()
    }

    /// Value and Euclidean gradient `2∂f/∂z̄` as a complex vector.
    fn value_grad(&self, z: &[C64]) -> Result<(f64, Vec<C64>)> {
        let n = z.len();
        let t = PowerTable::new(z, self.max_exp);
        let a: Vec<C64> = self.coeffs.iter().map(|c| c.eval(&t)).collect::<Result<_>>()?;
        let mut g = vec![C64::default(); n];
        for (j, aj) in a.iter().enumerate() {
            if *aj == C64::default() && self.coeffs[j].is_zero() {
                continue;
            }
            for k in 0..n {
                let dzb = &self.d_zbar[j][k];
                let dz = &self.d_z[j][k];
                let mut s = C64::default();
                if !dzb.is_zero() {
                    s += dzb.eval(&t)? * aj.conj();
                }
                if !dz.is_zero() {
                    s += *aj * dz.eval(&t)?.conj();
                }
                g[k] += s * 2.0;
            }
        }
        Ok((a.iter().map(|c| c.norm_sqr()).sum(), g))
    }
}

fn re_dot(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Pulls a nearby point back onto the level by adjusting moduli only.
fn retract(level: &MomentLevel, z: &[C64]) -> Option<Vec<C64>> {
    let action = level.action();
    let n = z.len();
    if action.rank() == 1 {
        let m = action.moment_value(z)[0];
        let t = level.level()[0] / m;
        return (t.is_finite() && t > 0.0).then(|| z.iter().map(|c| c * t.sqrt()).collect());
    }
    let q = nalgebra::DMatrix::from_fn(action.rank(), n, |a, j| action.charges()[a][j] as f64);
    let r = nalgebra::DVector::from_fn(n, |j, _| z[j].norm_sqr());
    let target = nalgebra::DVector::from_iterator(action.rank(), level.level().iter().map(|c| 2.0 * c));
    let corr = (&q * q.transpose()).lu().solve(&(&q * &r - target))?;
    let r = r - q.transpose() * corr;
    if r.iter().any(|&x| x < 0.0) {
        return None;
    }
    Some(
        z.iter()
            .zip(r.iter())
            .map(|(c, &rj)| {
                let norm = c.norm();
                if norm > 0.0 {
                    c * (rj.sqrt() / norm)
                } else {
                    C64::new(rj.sqrt(), 0.0)
                }
            })
            .collect(),
    )
}

/// Removes from `g` its components along the level's normal directions
/// `Q_a z` (real inner product).
fn project_tangent(level: &MomentLevel, z: &[C64], g: &mut [C64]) {
    let mut normals: Vec<Vec<C64>> = Vec::new();
    for row in level.action().charges() {
        let mut v: Vec<C64> = row.iter().zip(z).map(|(&q, c)| c * q as f64).collect();
        for u in &normals {
            let c = re_dot(u, &v);
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= y * c);
        }
        let nrm = re_dot(&v, &v).sqrt();
        if nrm > 0.0 {
            v.iter_mut().for_each(|x| *x /= nrm);
            normals.push(v);
        }
    }
    for u in &normals {
        let c = re_dot(u, g);
        g.iter_mut().zip(u).for_each(|(x, y)| *x -= y * c);
    }
}

fn descend(obj: &Objective, level: &MomentLevel, start: Vec<C64>) -> Result<(f64, Vec<C64>)> {
    let mut z = start;
    let (mut f, mut g) = obj.value_grad(&z)?;
    let mut step = 1.0;
    for _ in 0..MAX_ITERS {
        project_tangent(level, &z, &mut g);
        let gn = re_dot(&g, &g);
        if gn < 1e-30 || f < 1e-28 {
            break;
        }
        let mut accepted = false;
        step *= 2.0;
        while step > 1e-16 {
            let trial: Vec<C64> = z.iter().zip(&g).map(|(a, b)| a - b * step).collect();
            if let Some(zt) = retract(level, &trial) {
                if let Ok(ft) = obj.value(&zt) {
                    if ft <= f - 1e-4 * step * gn {
                        z = zt;
                        accepted = true;
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        (f, g) = obj.value_grad(&z)?;
    }
    Ok((f, z))
}

/// Minimizes `Σ_j |a_j(z)|²` over the level from `starts` sampled points.
pub fn zero_search(coeffs: &[ScalarField], level: &MomentLevel, starts: usize, seed: u64) -> Result<ZeroSearch> {
    if starts == 0 {
        return Err(Error::Precondition("zero search needs at least one start".into()));
    }
    let obj = Objective::new(coeffs);
    let init = level.sample(starts, seed, |_| true)?;
    let results: Vec<(f64, Vec<C64>)> = init
        .into_par_iter()
        .map(|z| descend(&obj, level, z))
        .collect::<Result<_>>()?;
    // first minimum in start order, independent of scheduling
    let (min_value, argmin) = results
        .into_iter()
        .reduce(|best, x| if x.0 < best.0 { x } else { best })
        .expect("at least one start");
    Ok(ZeroSearch {
        min_value,
        argmin,
        starts,
    })
}

/// Searches for a common root of homogeneous holomorphic `P_1..P_N` on the
/// unit sphere, requiring the horizontality relation `Σ z_j P_j ≡ 0`.
pub fn common_root_search(ps: &[Polynomial], starts: usize, seed: u64) -> Result<ZeroSearch> {
    let n = ps.len();
    if n == 0 || ps.iter().any(|p| p.nvars() != 2 * n) {
        return Err(Error::Precondition("need N polynomials in N variables".into()));
    }
    let deg = ps.iter().find(|p| !p.is_zero()).map(|p| p.degree()).unwrap_or(0);
    for p in ps {
        if !p.is_holomorphic() || !p.is_bihomogeneous(deg, 0) {
            return Err(Error::Precondition("polynomials must be holomorphic and homogeneous of equal degree".into()));
        }
    }
    let relation = ps
        .iter()
        .enumerate()
        .fold(Polynomial::zero(2 * n), |acc, (j, p)| acc.add(&p.mul(&Polynomial::z(n, j))));
    let scale = ps.iter().map(Polynomial::max_abs_coeff).fold(0.0, f64::max);
    // exact up to reassociation of cancelling float terms
    if relation.max_abs_coeff() > 1e-12 * scale {
        return Err(Error::Precondition("Σ z_j P_j does not vanish identically".into()));
    }
    let coeffs: Vec<ScalarField> = ps.iter().cloned().map(ScalarField::from_poly).collect();
    zero_search(&coeffs, &MomentLevel::unit_sphere(n), starts, seed)
}

/// A random charge-3 tuple `P = M(z)·z` with `M(z)` skew and linear in `z`.
pub fn koszul_tuple<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Polynomial> {
    let nv = 2 * n;
    let mut entries = vec![vec![Polynomial::zero(nv); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let lin = Polynomial::from_terms(
                nv,
                (0..n).map(|k| {
                    let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    (Monomial::var(nv, k), c)
                }),
            );
            entries[j][i] = lin.neg();
            entries[i][j] = lin;
        }
    }
    (0..n)
        .map(|i| {
            (0..n).fold(Polynomial::zero(nv), |acc, j| acc.add(&entries[i][j].mul(&Polynomial::z(n, j))))
        })
        .collect()
}

/// `P_j = Σ_i z_i m_ij`, the coefficient tuple of `α_M`.
pub fn skew_tuple(m: &crate::skew::SkewMatrix) -> Vec<Polynomial> {
    crate::twist::alpha_from_skew(m)
        .coeffs()
        .iter()
        .map(|c| c.numerator().clone())
        .collect()
}

/// Convenience generator used by examples and tests.
pub fn random_koszul_tuple(n: usize, seed: u64, index: u64) -> Vec<Polynomial> {
    koszul_tuple(n, &mut stream_rng(seed, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skew::SkewMatrix;

    #[test]
    fn skew_tuples_stay_above_quadratic_bound() {
        let mut rng = stream_rng(1, 0);
        let m = SkewMatrix::random(4, &mut rng).unwrap();
        let res = common_root_search(&skew_tuple(&m), 16, 3).unwrap();
        let bound = m.sigma_min().powi(2);
        assert!(res.min_value >= bound - 1e-8, "{} < {}", res.min_value, bound);
        // the bound is attained on the smallest singular direction
        assert!(res.min_value <= bound + 1e-6);
    }

    #[test]
    fn koszul_tuple_has_a_common_root() {
        let ps = random_koszul_tuple(4, 7, 0);
        let res = common_root_search(&ps, 64, 1).unwrap();
        assert!(res.min_value < 1e-6, "{}", res.min_value);
        let r: f64 = res.argmin.iter().map(|c| c.norm_sqr()).sum();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_horizontal_tuple_is_rejected() {
        // P_j = z_j·q(z) gives Σ z_j P_j = |z|²-type q·Σz_j² ≠ 0
        let q = Polynomial::z(2, 0).add(&Polynomial::z(2, 1));
        let ps = vec![q.mul(&Polynomial::z(2, 0)), q.mul(&Polynomial::z(2, 1))];
        assert!(matches!(common_root_search(&ps, 4, 0), Err(Error::Precondition(_))));
    }
}
