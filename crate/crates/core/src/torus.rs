//! Linear torus actions `T^s ↷ C^N` with integer weights: induced vector
//! fields, moment maps, level-set sampling and tangent frames.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::{Form, TangentVector, C64, I};
use crate::field::{ScalarField, VectorFieldExpr};

/// Rejection budget per sample before the level is declared unusable.
const MAX_ATTEMPTS: usize = 20_000;

/// Stream id of the `index`-th draw under `seed`; every parallel consumer
/// derives its generator this way so results do not depend on scheduling.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorusAction {
    dim: usize,
    /// Row `a` holds the weights `q^a_j`.
    charges: Vec<Vec<i64>>,
}

impl TorusAction {
    pub fn new(charges: Vec<Vec<i64>>) -> Result<Self> {
        let dim = charges.first().map(Vec::len).ok_or(Error::Scenario("empty charge matrix".into()))?;
        if let Some(row) = charges.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch(row.len(), dim));
        }
        if dim == 0 || dim > crate::exterior::MAX_DIM {
            return Err(Error::Scenario(format!("unsupported ambient dimension {dim}")));
        }
        let m = nalgebra::DMatrix::from_fn(charges.len(), dim, |a, j| charges[a][j] as f64);
        if m.rank(1e-9) != charges.len() {
            return Err(Error::Scenario("charge matrix does not have full row rank".into()));
        }
        Ok(Self { dim, charges })
    }

    /// The diagonal circle action `e^{it}·z` on `C^N`.
    pub fn diagonal(dim: usize) -> Self {
        Self {
            dim,
            charges: vec![vec![1; dim]],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.charges.len()
    }

    pub fn charges(&self) -> &[Vec<i64>] {
        &self.charges
    }

    /// `⟨a, q_j⟩` for every coordinate `j`.
    pub fn weights(&self, a: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|j| a.iter().zip(&self.charges).map(|(x, row)| x * row[j] as f64).sum())
            .collect()
    }

    /// Basis vector `e_k` of the Lie algebra.
    pub fn basis(&self, k: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.rank()];
        e[k] = 1.0;
        e
    }

    /// `V_a = Σ_j i⟨a,q_j⟩ (z_j ∂_j − z̄_j ∂̄_j)`.
    pub fn induced_field(&self, a: &[f64]) -> VectorFieldExpr {
        let n = self.dim;
        let mut v = VectorFieldExpr::zero(n);
        for (j, w) in self.weights(a).into_iter().enumerate() {
            v.holo[j] = ScalarField::z(n, j).scale(I * w);
            v.anti[j] = ScalarField::zbar(n, j).scale(-I * w);
        }
        v
    }

    /// `ξ_a = Σ_j ⟨a,q_j⟩ z_j ∂_j`, so that `ι_ξ = −i ι_V` on `(m,0)`-forms.
    pub fn holomorphic_field(&self, a: &[f64]) -> VectorFieldExpr {
        let n = self.dim;
        let mut v = VectorFieldExpr::zero(n);
        for (j, w) in self.weights(a).into_iter().enumerate() {
            v.holo[j] = ScalarField::z(n, j).scale(C64::new(w, 0.0));
        }
        v
    }

    /// `V_a` evaluated at `z`.
    pub fn induced_vector(&self, a: &[f64], z: &[C64]) -> TangentVector {
        let holo: Vec<C64> = self.weights(a).iter().zip(z).map(|(w, zj)| I * *w * zj).collect();
        let anti = holo.iter().map(|c| c.conj()).collect();
        TangentVector { holo, anti }
    }

    /// `ξ_a` evaluated at `z`.
    pub fn holomorphic_vector(&self, a: &[f64], z: &[C64]) -> TangentVector {
        let holo = self.weights(a).iter().zip(z).map(|(w, zj)| zj * *w).collect();
        TangentVector {
            holo,
            anti: vec![C64::default(); self.dim],
        }
    }

    /// `μ_a = ½ Σ_j q^a_j |z_j|²`, one field per basis generator.
    pub fn moment_map(&self) -> Vec<ScalarField> {
        let n = self.dim;
        self.charges
            .iter()
            .map(|row| {
                row.iter().enumerate().fold(ScalarField::zero(n), |acc, (j, &q)| {
                    let t = ScalarField::z(n, j).mul(&ScalarField::zbar(n, j));
                    acc.add(&t.scale(C64::new(0.5 * q as f64, 0.0)))
                })
            })
            .collect()
    }

    pub fn moment_value(&self, z: &[C64]) -> Vec<f64> {
        self.charges
            .iter()
            .map(|row| 0.5 * row.iter().zip(z).map(|(&q, zj)| q as f64 * zj.norm_sqr()).sum::<f64>())
            .collect()
    }

    /// V-charge of `Ω₀`: `L_{V_a}Ω₀ = i(Σ_j q^a_j)Ω₀`.
    pub fn volume_charge(&self) -> Vec<C64> {
        self.charges
            .iter()
            .map(|row| I * row.iter().sum::<i64>() as f64)
            .collect()
    }

    /// Metric Gram matrix `⟨V_k, V_l⟩ = Σ_j q^k_j q^l_j |z_j|²` of the generators.
    pub fn gram(&self, z: &[C64]) -> Vec<Vec<f64>> {
        let s = self.rank();
        (0..s)
            .map(|k| {
                (0..s)
                    .map(|l| {
                        (0..self.dim)
                            .map(|j| (self.charges[k][j] * self.charges[l][j]) as f64 * z[j].norm_sqr())
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    /// Real Jacobian of `μ` in coordinates `[x_1..x_N, y_1..y_N]`.
    fn jacobian(&self, z: &[C64]) -> Vec<Vec<f64>> {
        let n = self.dim;
        self.charges
            .iter()
            .map(|row| {
                let mut g = vec![0.0; 2 * n];
                for j in 0..n {
                    g[j] = row[j] as f64 * z[j].re;
                    g[n + j] = row[j] as f64 * z[j].im;
                }
                g
            })
            .collect()
    }
}

/// Flow times used for finite-flow invariance checks. A form is basic (or of
/// charge `k`) iff `φ_t^*Φ = Φ` (or `e^{kt}Φ`) for all `t`, so comparing at
/// a few generic finite times tests the Lie-derivative identity without a
/// truncation error.
pub const FLOW_TIMES: [f64; 3] = [0.31, 1.07, 2.53];

/// The point `φ_t(z)`, `φ_t(z)_j = e^{i w_j t} z_j`.
pub fn flow_point(z: &[C64], w: &[f64], t: f64) -> Vec<C64> {
    z.iter().zip(w).map(|(c, wj)| c * C64::from_polar(1.0, wj * t)).collect()
}

/// `(φ_t^*Φ)(z)` given `Φ(φ_t(z))`: each `dz_j` picks up `e^{i w_j t}` and
/// each `dz̄_j` picks up `e^{−i w_j t}`.
pub fn flow_pullback(at_image: &Form, w: &[f64], t: f64) -> Form {
    let terms = at_image.iter().map(|(idx, &c)| {
        let phase: f64 = idx.holo().iter().map(|&j| w[j]).sum::<f64>() - idx.anti().iter().map(|&j| w[j]).sum::<f64>();
        (*idx, c * C64::from_polar(1.0, phase * t))
    });
    Form::from_terms(at_image.dim(), terms).expect("indices come from a valid form")
}

/// Conversion between V-charges and ξ-charges: `q_ξ = q_V / i`.
pub fn xi_charge(v_charge: C64) -> C64 {
    v_charge / I
}

pub fn v_charge(xi_charge: C64) -> C64 {
    xi_charge * I
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthogonalizes `v` against `basis` (two passes of modified Gram–Schmidt).
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// A level set `μ^{-1}(c)` of a torus action.
#[derive(Clone, Debug)]
pub struct MomentLevel {
    action: TorusAction,
    level: Vec<f64>,
}

impl MomentLevel {
    pub fn new(action: TorusAction, level: Vec<f64>) -> Result<Self> {
        if level.len() != action.rank() {
            return Err(Error::DimensionMismatch(level.len(), action.rank()));
        }
        // the level must be reachable with all |z_j|² ≥ 0 and not be the origin
        if level.iter().all(|&c| c == 0.0) {
            return Err(Error::IrregularLevel("zero level contains the fixed point 0".into()));
        }
        Ok(Self { action, level })
    }

    /// The unit sphere `|z| = 1` for the diagonal action on `C^N`.
    pub fn unit_sphere(dim: usize) -> Self {
        Self {
            action: TorusAction::diagonal(dim),
            level: vec![0.5],
        }
    }

    pub fn action(&self) -> &TorusAction {
        &self.action
    }

    pub fn level(&self) -> &[f64] {
        &self.level
    }

    pub fn dim(&self) -> usize {
        self.action.dim()
    }

    /// Largest componentwise deviation `|μ(z) − c|`.
    pub fn residual(&self, z: &[C64]) -> f64 {
        self.action
            .moment_value(z)
            .iter()
            .zip(&self.level)
            .map(|(m, c)| (m - c).abs())
            .fold(0.0, f64::max)
    }

    /// One point of the level drawn from `rng`, or `None` if the attempt is rejected.
    fn try_draw<R: Rng>(&self, rng: &mut R) -> Option<Vec<C64>> {
        let n = self.dim();
        if self.action.rank() == 1 {
            // μ is homogeneous quadratic: draw a Gaussian point and rescale
            let z: Vec<C64> = (0..n)
                .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
                .collect();
            let m = self.action.moment_value(&z)[0];
            let t = self.level[0] / m;
            if !(t.is_finite() && t > 0.0) {
                return None;
            }
            let s = t.sqrt();
            return Some(z.into_iter().map(|c| c * s).collect());
        }
        // general rank: draw moduli r_j = |z_j|² ≥ 0, project onto Q r = 2c,
        // reject if the projection leaves the positive orthant
        let q = nalgebra::DMatrix::from_fn(self.action.rank(), n, |a, j| self.action.charges[a][j] as f64);
        let target = nalgebra::DVector::from_iterator(self.level.len(), self.level.iter().map(|c| 2.0 * c));
        let scale = 2.0 * self.level.iter().map(|c| c.abs()).sum::<f64>() / n as f64;
        let r = nalgebra::DVector::from_fn(n, |_, _| {
            let e: f64 = Exp1.sample(rng);
            e * scale
        });
        let qqt = &q * q.transpose();
        let corr = qqt.lu().solve(&(&q * &r - &target))?;
        let r = r - q.transpose() * corr;
        if r.iter().any(|&x| x < 0.0) {
            return None;
        }
        Some(
            r.iter()
                .map(|&rj| C64::from_polar(rj.sqrt(), rng.random_range(0.0..std::f64::consts::TAU)))
                .collect(),
        )
    }

    /// Draws `count` points of the level, reproducibly from `(seed, index)`.
    /// Points failing `accept` (e.g. near a twist-form zero) are redrawn.
    pub fn sample<F>(&self, count: usize, seed: u64, accept: F) -> Result<Vec<Vec<C64>>>
    where
        F: Fn(&[C64]) -> bool + Sync,
    {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(seed, i as u64);
                for _ in 0..MAX_ATTEMPTS {
                    let Some(z) = self.try_draw(&mut rng) else { continue };
                    if self.residual(&z) < 1e-12 && self.is_regular(&z) && accept(&z) {
                        return Ok(z);
                    }
                }
                Err(Error::SamplingFailed(MAX_ATTEMPTS))
            })
            .collect()
    }

    fn is_regular(&self, z: &[C64]) -> bool {
        self.tangent_frame(z).is_ok()
    }

    /// Orthonormal real basis of `ker dμ` at `z`, `2N − s` vectors.
    pub fn tangent_frame(&self, z: &[C64]) -> Result<Vec<TangentVector>> {
        let n = self.dim();
        if z.len() != n {
            return Err(Error::DimensionMismatch(z.len(), n));
        }
        let jac = self.action.jacobian(z);
        let scale = jac.iter().map(|g| dot(g, g).sqrt()).fold(0.0, f64::max);
        let mut normal: Vec<Vec<f64>> = Vec::with_capacity(jac.len());
        for mut g in jac {
            orthogonalize(&mut g, &normal);
            let norm = dot(&g, &g).sqrt();
            if norm <= 1e-9 * scale.max(1e-300) {
                return Err(Error::DegenerateFrame("moment-map differential is rank deficient".into()));
            }
            g.iter_mut().for_each(|x| *x /= norm);
            normal.push(g);
        }
        // complete greedily with the standard basis vector of largest residual
        let mut all = normal.clone();
        let mut frame = Vec::with_capacity(2 * n - normal.len());
        while all.len() < 2 * n {
            let best = (0..2 * n)
                .map(|i| {
                    let mut e = vec![0.0; 2 * n];
                    e[i] = 1.0;
                    orthogonalize(&mut e, &all);
                    e
                })
                .max_by(|a, b| dot(a, a).total_cmp(&dot(b, b)))
                .expect("non-empty basis");
            let norm = dot(&best, &best).sqrt();
            let v: Vec<f64> = best.into_iter().map(|x| x / norm).collect();
            frame.push(TangentVector::from_real(&v));
            all.push(v);
        }
        Ok(frame)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{big_omega0, contract, eval_on, omega0, MultiIndex};
    use crate::field::FormField;

    fn hirzebruch_like() -> TorusAction {
        TorusAction::new(vec![
            vec![1, 1, 0, 0, 0, 2],
            vec![0, 0, 1, 1, 0, -2],
            vec![0, 0, 0, 0, 1, 1],
        ])
        .unwrap()
    }

    #[test]
    fn diagonal_field_components() {
        let a = TorusAction::diagonal(2);
        let v = a.induced_field(&[1.0]);
        assert!(v.is_real());
        let t = v.eval_at(&[C64::new(1.0, 0.0), C64::new(0.0, 2.0)]).unwrap();
        assert_eq!(t.holo, vec![I, I * C64::new(0.0, 2.0)]);
        assert_eq!(t.anti[0], -I);
    }

    #[test]
    fn hamiltonian_and_commuting() {
        let act = hirzebruch_like();
        let w = FormField::from_form(&omega0(6));
        let mu = act.moment_map();
        for k in 0..3 {
            let v = act.induced_field(&act.basis(k));
            // ι_V ω₀ + dμ = 0 and L_V ω₀ = 0, exactly
            let lhs = w.contract(&v).unwrap().add(&FormField::scalar(mu[k].clone()).d());
            assert!(lhs.is_zero());
            assert!(w.lie_derivative(&v).unwrap().is_zero());
            for l in 0..3 {
                assert!(v.bracket(&act.induced_field(&act.basis(l))).is_zero());
            }
        }
    }

    #[test]
    fn volume_form_charge() {
        let act = hirzebruch_like();
        let vol = FormField::from_form(&big_omega0(6));
        for (k, q) in act.volume_charge().into_iter().enumerate() {
            let l = vol.lie_derivative(&act.induced_field(&act.basis(k))).unwrap();
            assert!(l.sub(&vol.scale(q)).is_zero());
            assert_eq!(q.re, 0.0);
        }
    }

    #[test]
    fn xi_contraction_is_minus_i_v() {
        let act = TorusAction::diagonal(2);
        let z = [C64::new(1.0, 0.0), C64::new(2.0, 0.0)];
        let vol = big_omega0(2);
        let xi = act.holomorphic_vector(&[1.0], &z);
        let by_xi = contract(&xi, &vol).unwrap();
        assert_eq!(by_xi.coeff(MultiIndex::dz(1)), C64::new(1.0, 0.0));
        assert_eq!(by_xi.coeff(MultiIndex::dz(0)), C64::new(-2.0, 0.0));
        let by_v = contract(&act.induced_vector(&[1.0], &z), &vol).unwrap();
        assert!((&by_xi - &by_v.scale(-I)).max_abs() < 1e-15);
    }

    #[test]
    fn sphere_sampling_and_frames() {
        let level = MomentLevel::unit_sphere(4);
        let pts = level.sample(10, 3, |_| true).unwrap();
        for z in &pts {
            let r: f64 = z.iter().map(|c| c.norm_sqr()).sum();
            assert!((r - 1.0).abs() < 1e-12);
            let frame = level.tangent_frame(z).unwrap();
            assert_eq!(frame.len(), 7);
            let dmu = FormField::scalar(level.action().moment_map()[0].clone()).d().eval_at(z).unwrap();
            for (i, v) in frame.iter().enumerate() {
                assert!(eval_on(&dmu, std::slice::from_ref(v)).unwrap().norm() < 1e-12);
                for w in &frame[..i] {
                    let d = dot(&v.real_components(), &w.real_components());
                    assert!(d.abs() < 1e-12);
                }
            }
        }
        // same seed, same points
        assert_eq!(pts, level.sample(10, 3, |_| true).unwrap());
    }

    #[test]
    fn zero_level_is_rejected() {
        assert!(MomentLevel::new(TorusAction::diagonal(2), vec![0.0]).is_err());
    }

    #[test]
    fn rank_three_level() {
        let level = MomentLevel::new(hirzebruch_like(), vec![3.0, 2.0, 1.0]).unwrap();
        let pts = level.sample(100, 11, |_| true).unwrap();
        assert_eq!(pts.len(), 100);
        for z in pts.iter().take(5) {
            assert!(level.residual(z) < 1e-12);
            assert_eq!(level.tangent_frame(z).unwrap().len(), 9);
        }
    }

    #[test]
    fn frame_at_pole_of_sphere() {
        let level = MomentLevel::unit_sphere(4);
        let mut z = vec![C64::default(); 4];
        z[0] = C64::new(1.0, 0.0);
        let frame = level.tangent_frame(&z).unwrap();
        assert_eq!(frame.len(), 7);
        assert!(frame.iter().all(|v| v.real_components()[0].abs() < 1e-15));
    }

    #[test]
    fn xi_pairing_with_kahler_form() {
        // ω₀(ξ, ξ̄) = (i/2)‖V‖²
        let act = hirzebruch_like();
        let z: Vec<C64> = (0..6).map(|j| C64::new(0.3 * j as f64 - 0.4, 0.2 + 0.1 * j as f64)).collect();
        let g = act.gram(&z);
        for k in 0..3 {
            let xi = act.holomorphic_vector(&act.basis(k), &z);
            let val = eval_on(&omega0(6), &[xi.clone(), xi.conj()]).unwrap();
            assert!((val - I * 0.5 * g[k][k]).norm() < 1e-13);
        }
    }
}
