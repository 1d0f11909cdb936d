//! Twist forms: horizontal, charge-definite `(1,0)`-forms, their
//! constructors, orthogonalization and verification.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::{Form, MultiIndex, C64, I};
use crate::field::{FormField, ScalarField};
use crate::poly::{Monomial, Polynomial, PowerTable};
use crate::report::{Entries, Entry, Provenance};
use crate::search::zero_search;
use crate::skew::{monomials, SkewMatrix};
use crate::torus::{flow_point, MomentLevel, TorusAction, FLOW_TIMES};

/// A `(1,0)`-form `Σ a_j dz_j` with rational coefficients and its declared
/// V-charge `k(e_a)` for each torus generator.
#[derive(Clone, Debug)]
pub struct TwistForm {
    coeffs: Vec<ScalarField>,
    charge: Vec<C64>,
}

impl TwistForm {
    pub fn new(coeffs: Vec<ScalarField>, charge: Vec<C64>) -> Self {
        Self { coeffs, charge }
    }

    /// From a form field, which must be of pure type `(1,0)`.
    pub fn from_field(field: &FormField, charge: Vec<C64>) -> Result<Self> {
        let n = field.dim();
        let mut coeffs = vec![ScalarField::zero(n); n];
        for (idx, c) in field.terms() {
            if idx.bidegree() != (1, 0) {
                return Err(Error::MixedType);
            }
            coeffs[idx.holo_mask().trailing_zeros() as usize] = c.clone();
        }
        Ok(Self { coeffs, charge })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[ScalarField] {
        &self.coeffs
    }

    pub fn charge(&self) -> &[C64] {
        &self.charge
    }

    pub fn with_charge(&self, charge: Vec<C64>) -> Self {
        Self {
            coeffs: self.coeffs.clone(),
            charge,
        }
    }

    pub fn field(&self) -> FormField {
        FormField::one_form(&self.coeffs)
    }

    pub fn is_holomorphic(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.is_polynomial() && c.numerator().is_holomorphic())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(ScalarField::is_zero)
    }

    pub fn max_exponent(&self) -> usize {
        self.coeffs.iter().map(ScalarField::max_exponent).max().unwrap_or(0)
    }

    pub fn coeffs_at(&self, z: &[C64]) -> Result<Vec<C64>> {
        let t = PowerTable::new(z, self.max_exponent());
        self.coeffs.iter().map(|c| c.eval(&t)).collect()
    }

    pub fn eval_at(&self, z: &[C64]) -> Result<Form> {
        Ok(Form::one_form(&self.coeffs_at(z)?))
    }

    pub fn norm_sq_at(&self, z: &[C64]) -> Result<f64> {
        Ok(self.coeffs_at(z)?.iter().map(|c| c.norm_sqr()).sum())
    }

    /// `‖α‖² = Σ_j a_j ā_j` as an exactly self-conjugate field.
    pub fn norm_sq(&self) -> ScalarField {
        inner(&self.coeffs, &self.coeffs).real_part()
    }
}

/// `β̄·α = Σ_j conj(b_j) a_j`.
pub fn inner(beta: &[ScalarField], alpha: &[ScalarField]) -> ScalarField {
    let n = alpha.len();
    beta.iter()
        .zip(alpha)
        .filter(|(b, a)| !b.is_zero() && !a.is_zero())
        .fold(ScalarField::zero(n), |acc, (b, a)| acc.add(&b.conj().mul(a)))
}

fn inner_at(beta: &[C64], alpha: &[C64]) -> C64 {
    beta.iter().zip(alpha).map(|(b, a)| b.conj() * a).sum()
}

/// `α_M = ᵗZ M dZ = Σ_{ij} z_i m_ij dz_j`, V-charge `2i` under the diagonal circle.
pub fn alpha_from_skew(m: &SkewMatrix) -> TwistForm {
    let n = m.n();
    let coeffs = (0..n)
        .map(|j| {
            let terms = (0..n)
                .filter(|&i| m.get(i, j) != C64::default())
                .map(|i| (Monomial::var(2 * n, i), m.get(i, j)));
            ScalarField::from_poly(Polynomial::from_terms(2 * n, terms))
        })
        .collect();
    TwistForm::new(coeffs, vec![2.0 * I])
}

/// Coefficients of `α_M` at `z`, without building fields.
pub fn alpha_from_skew_at(m: &SkewMatrix, z: &[C64]) -> Vec<C64> {
    let n = m.n();
    (0..n).map(|j| (0..n).map(|i| z[i] * m.get(i, j)).sum()).collect()
}

/// Sequential projection `β_k = α_k − Σ_{j<k} (β̄_j·α_k/‖β_j‖²) β_j`.
/// Each output keeps the charge of its input.
pub fn gram_schmidt(tfs: &[TwistForm]) -> Result<Vec<TwistForm>> {
    let first = tfs.first().ok_or(Error::Precondition("empty twist list".into()))?;
    if first.is_zero() {
        return Err(Error::Precondition("first twist form is identically zero".into()));
    }
    let mut out: Vec<TwistForm> = Vec::with_capacity(tfs.len());
    let mut inv_norms: Vec<ScalarField> = Vec::with_capacity(tfs.len());
    for a in tfs {
        let mut coeffs = a.coeffs.clone();
        for (b, inv) in out.iter().zip(&inv_norms) {
            let c = inner(&b.coeffs, &a.coeffs).mul(inv);
            if c.is_zero() {
                continue;
            }
            for (x, y) in coeffs.iter_mut().zip(&b.coeffs) {
                *x = x.sub(&c.mul(y));
            }
        }
        let beta = TwistForm::new(coeffs, a.charge.clone());
        inv_norms.push(beta.norm_sq().recip().unwrap_or_else(|_| ScalarField::zero(a.dim())));
        out.push(beta);
    }
    Ok(out)
}

/// Pointwise Gram–Schmidt on coefficient vectors.
pub fn gram_schmidt_at(alphas: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(alphas.len());
    for a in alphas {
        let mut v = a.clone();
        for b in &out {
            let nb: f64 = b.iter().map(|c| c.norm_sqr()).sum();
            if nb == 0.0 {
                continue;
            }
            let c = inner_at(b, a) / nb;
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        out.push(v);
    }
    out
}

/// Settings for [`verify_twist`].
#[derive(Clone, Debug)]
pub struct TwistCheck {
    pub points: usize,
    pub seed: u64,
    pub tol: f64,
    pub starts: usize,
    /// If set, the zero search must stay at or above this value.
    pub nonvanishing_bound: Option<f64>,
    /// Skip the symbolic Lie derivative and use the flow route instead.
    pub pointwise_charge: bool,
}

impl Default for TwistCheck {
    fn default() -> Self {
        Self {
            points: 50,
            seed: 0,
            tol: 1e-10,
            starts: 64,
            nonvanishing_bound: None,
            pointwise_charge: false,
        }
    }
}

/// Checks the twist-form axioms: horizontality, charge-definiteness, pure
/// type, and nonvanishing (by sampling plus a zero search).
pub fn verify_twist(tf: &TwistForm, level: &MomentLevel, check: &TwistCheck, label: &str) -> Result<Entries> {
    let action = level.action();
    if tf.dim() != action.dim() {
        return Err(Error::DimensionMismatch(tf.dim(), action.dim()));
    }
    if tf.charge.len() != action.rank() {
        return Err(Error::DimensionMismatch(tf.charge.len(), action.rank()));
    }
    let mut out = Entries::new();
    let pts = level.sample(check.points, check.seed, |_| true)?;
    let prov = |m: &str| Provenance::new(check.points, 0, check.seed, m);
    let alpha_at: Vec<Vec<C64>> = pts.par_iter().map(|z| tf.coeffs_at(z)).collect::<Result<_>>()?;
    let norms: Vec<f64> = alpha_at.iter().map(|a| a.iter().map(|c| c.norm_sqr()).sum()).collect();

    out.push(Entry::at_most(
        format!("{label}: pure (1,0) type"),
        0.0,
        0.0,
        Provenance::exact("structural"),
    ));

    for k in 0..action.rank() {
        let e = action.basis(k);
        // horizontality, symbolic first
        let v = action.induced_field(&e);
        let contraction = tf
            .coeffs
            .iter()
            .zip(&v.holo)
            .fold(ScalarField::zero(tf.dim()), |acc, (a, w)| acc.add(&a.mul(w)));
        let horiz = if contraction.is_zero() {
            0.0
        } else {
            pts.iter()
                .zip(&alpha_at)
                .map(|(z, a)| {
                    let vz = action.induced_vector(&e, z);
                    let val: C64 = a.iter().zip(&vz.holo).map(|(x, y)| x * y).sum();
                    let scale = (a.iter().map(|c| c.norm_sqr()).sum::<f64>() * vz.norm_sqr()).sqrt();
                    val.norm() / scale.max(1e-300)
                })
                .fold(0.0, f64::max)
        };
        out.push(Entry::at_most(
            format!("{label}: horizontality e{}", k + 1),
            horiz,
            check.tol,
            prov(if contraction.is_zero() { "symbolic (exact)" } else { "symbolic, evaluated" }),
        ));

        let (res, method) = if check.pointwise_charge {
            (charge_residual_flow(tf, action, k, &pts)?, "finite flow")
        } else {
            (charge_residual_symbolic(tf, action, k, &pts)?, "symbolic Cartan, evaluated")
        };
        out.push(Entry::at_most(
            format!("{label}: charge e{}", k + 1),
            res,
            check.tol,
            prov(method),
        ));
    }

    let min_sampled = norms.iter().copied().fold(f64::INFINITY, f64::min);
    out.push(Entry::info(format!("{label}: min |alpha|^2 sampled"), min_sampled, prov("sampling")));
    let search = zero_search(&tf.coeffs, level, check.starts, check.seed ^ 0x5eed)?;
    let sprov = Provenance::new(check.starts, 0, check.seed ^ 0x5eed, "multi-start projected gradient");
    let name = format!("{label}: min |alpha|^2 zero search");
    out.push(match check.nonvanishing_bound {
        Some(b) => Entry::at_least(name, search.min_value, b, sprov),
        None => Entry::info(name, search.min_value, sprov),
    });
    Ok(out)
}

/// `max |L_{V_k}α − k(e_k)α| / |α|` using the symbolic Cartan formula.
fn charge_residual_symbolic(tf: &TwistForm, action: &TorusAction, k: usize, pts: &[Vec<C64>]) -> Result<f64> {
    let v = action.induced_field(&action.basis(k));
    let field = tf.field();
    let resid = field.lie_derivative(&v)?.sub(&field.scale(tf.charge[k]));
    if resid.is_zero() {
        return Ok(0.0);
    }
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|z| {
            let r = resid.eval_at(z)?;
            Ok(r.max_abs() / tf.eval_at(z)?.max_abs().max(1e-300))
        })
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Same residual from the flow: `L_V α = kα` holds iff
/// `φ_t^*α = e^{kt}α` for all `t`, with `(φ_t^*α)_j(z) = e^{i w_j t} a_j(φ_t z)`.
/// Compared at the fixed times in [`FLOW_TIMES`].
pub fn charge_residual_flow(tf: &TwistForm, action: &TorusAction, k: usize, pts: &[Vec<C64>]) -> Result<f64> {
    let w = action.weights(&action.basis(k));
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|z| {
            let a = tf.coeffs_at(z)?;
            let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
            let mut worst: f64 = 0.0;
            for t in FLOW_TIMES {
                let at = tf.coeffs_at(&flow_point(z, &w, t))?;
                let e = (tf.charge[k] * t).exp();
                for j in 0..a.len() {
                    let pulled = at[j] * C64::from_polar(1.0, w[j] * t);
                    worst = worst.max((pulled - e * a[j]).norm() / scale);
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Limits of `β∧β̄/‖β‖²` along the two approach paths to a singular line.
#[derive(Clone, Debug)]
pub struct SingularLimit {
    pub eps: Vec<f64>,
    pub path1: Vec<Form>,
    pub path2: Vec<Form>,
}

impl SingularLimit {
    pub fn limit1(&self) -> &Form {
        self.path1.last().expect("non-empty eps sequence")
    }

    pub fn limit2(&self) -> &Form {
        self.path2.last().expect("non-empty eps sequence")
    }

    /// ℓ¹ norm of the difference of the two limits.
    pub fn difference(&self) -> f64 {
        (self.limit1() - self.limit2()).norm_l1()
    }
}

/// `dz_j∧dz̄_j`.
pub fn diagonal_monomial(dim: usize, j: usize) -> Form {
    Form::monomial(dim, MultiIndex::from_masks(1 << j, 1 << j), C64::new(1.0, 0.0))
}

/// Evaluates `β₂∧β̄₂/‖β₂‖²` (with `β₂` the Gram–Schmidt projection of
/// `α_{M₂}` against `α_{M₁}`) along `Z_ε = (Z₁, (ε,0), 0, 0)` and
/// `Z_ε = (Z₁, (0,ε), 0, 0)`.
pub fn singular_limit_probe(m1: &SkewMatrix, m2: &SkewMatrix, z1: [C64; 2], eps: &[f64]) -> Result<SingularLimit> {
    let n = m1.n();
    if n != 8 || m2.n() != 8 {
        return Err(Error::DimensionMismatch(n, 8));
    }
    if eps.is_empty() {
        return Err(Error::Precondition("empty eps sequence".into()));
    }
    let along = |slot: usize| -> Result<Vec<Form>> {
        eps.iter()
            .map(|&e| {
                let mut z = vec![C64::default(); 8];
                z[0] = z1[0];
                z[1] = z1[1];
                z[slot] = C64::new(e, 0.0);
                let a1 = alpha_from_skew_at(m1, &z);
                let a2 = alpha_from_skew_at(m2, &z);
                let beta = gram_schmidt_at(&[a1, a2]).pop().expect("two inputs");
                let nb: f64 = beta.iter().map(|c| c.norm_sqr()).sum();
                if nb == 0.0 {
                    return Err(Error::Pole);
                }
                let b = Form::one_form(&beta);
                Ok(b.wedge(&b.conj())?.scale_real(1.0 / nb))
            })
            .collect()
    };
    Ok(SingularLimit {
        eps: eps.to_vec(),
        path1: along(2)?,
        path2: along(3)?,
    })
}

/// Charges `q¹ = (1,1,n,0,0,a)`, `q² = (0,0,1,1,0,b)`, `q³ = (0,0,0,0,1,1)`.
pub fn hirzebruch_action(n: i64, a: i64, b: i64) -> Result<TorusAction> {
    TorusAction::new(vec![
        vec![1, 1, n, 0, 0, a],
        vec![0, 0, 1, 1, 0, b],
        vec![0, 0, 0, 0, 1, 1],
    ])
}

/// A level (in the `½|z|²` normalization) on which the Hirzebruch twist form
/// is smooth and nowhere zero: it keeps `|z₁|² + |z₂|²` bounded below.
pub fn hirzebruch_level(n: i64) -> Vec<f64> {
    let (c2, c3) = (2.0, 1.0);
    // on the level |z₁|²+|z₂|² = 2c₁ − n|z₃|² − (2−n)|z₆|², whose minimum is
    // 2c₁ − 2n c₂ − 2(n+2)c₃ for n ≥ 0 and 2c₁ − 2(2−n)c₃ for n < 0;
    // c₁ is chosen to make that minimum 2
    let nf = n as f64;
    let c1 = if n >= 0 { nf * c2 + (nf + 2.0) * c3 + 1.0 } else { (2.0 - nf) * c3 + 1.0 };
    vec![c1, c2, c3]
}

pub struct Hirzebruch {
    pub n: i64,
    pub action: TorusAction,
    pub alpha1: TwistForm,
    pub alpha2: TwistForm,
    pub alpha: TwistForm,
}

/// The non-holomorphic twist form `α = z₅α₁ + z₆α₂` with
/// `α₁ = −z₂dz₁ + z₁dz₂` and
/// `α₂ = −z₄dz₃ + z₃dz₄ + (n z₃z₄/(|z₁|²+|z₂|²))(z̄₁dz₁ + z̄₂dz₂)`,
/// for `a = 2 − n`, `b = −2`.
pub fn hirzebruch_twist(n: i64) -> Result<Hirzebruch> {
    let dim = 6;
    let action = hirzebruch_action(n, 2 - n, -2)?;
    let z = |j: usize| ScalarField::z(dim, j);
    let zb = |j: usize| ScalarField::zbar(dim, j);
    let zero = ScalarField::zero(dim);

    let mut a1 = vec![zero.clone(); dim];
    a1[0] = z(1).neg();
    a1[1] = z(0);

    let r12 = crate::field::hermitian_factor(&[z(0), z(1)])?;
    let corr = z(2)
        .mul(&z(3))
        .scale(C64::new(n as f64, 0.0))
        .mul(&ScalarField::inverse_power(r12, 1)?);
    let mut a2 = vec![zero.clone(); dim];
    a2[2] = z(3).neg();
    a2[3] = z(2);
    a2[0] = corr.mul(&zb(0));
    a2[1] = corr.mul(&zb(1));

    let alpha: Vec<ScalarField> = (0..dim).map(|j| z(4).mul(&a1[j]).add(&z(5).mul(&a2[j]))).collect();
    let half_q: Vec<C64> = action.volume_charge().into_iter().map(|q| q * 0.5).collect();
    Ok(Hirzebruch {
        n,
        alpha1: TwistForm::new(a1, vec![2.0 * I, C64::default(), C64::default()]),
        alpha2: TwistForm::new(a2, vec![I * n as f64, 2.0 * I, C64::default()]),
        alpha: TwistForm::new(alpha, half_q),
        action,
    })
}

/// Pulls `α_M` back along the degree-`n` Veronese map
/// `φ: C^{4n} → C^{2m}`, `φ(z) = (all degree-n monomials)`, `2m = C(5n−1, n)`.
/// The result has V-charge `2n·i` under the diagonal circle on `C^{4n}`.
pub fn veronese_pullback(n: usize, m: &SkewMatrix) -> Result<TwistForm> {
    if n == 0 {
        return Err(Error::Precondition("degree must be positive".into()));
    }
    let dim = 4 * n;
    let mons = monomials(dim, n);
    if mons.len() != m.n() {
        return Err(Error::DimensionMismatch(m.n(), mons.len()));
    }
    let nv = 2 * dim;
    let phi: Vec<Polynomial> = mons
        .iter()
        .map(|e| {
            let mut full = e.clone();
            full.resize(nv, 0);
            Polynomial::from_terms(nv, [(Monomial::from_exponents(&full), C64::new(1.0, 0.0))])
        })
        .collect();
    // ψ_j = Σ_i φ_i m_ij
    let psi: Vec<Polynomial> = (0..m.n())
        .map(|j| {
            (0..m.n())
                .filter(|&i| m.get(i, j) != C64::default())
                .fold(Polynomial::zero(nv), |acc, i| acc.add(&phi[i].scale(m.get(i, j))))
        })
        .collect();
    let coeffs = (0..dim)
        .map(|k| {
            let p = phi
                .iter()
                .zip(&psi)
                .fold(Polynomial::zero(nv), |acc, (f, s)| {
                    let d = f.derivative(k);
                    if d.is_zero() {
                        acc
                    } else {
                        acc.add(&s.mul(&d))
                    }
                });
            ScalarField::from_poly(p)
        })
        .collect();
    Ok(TwistForm::new(coeffs, vec![I * (2 * n) as f64]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::norm_sq;
    use crate::torus::stream_rng;

    fn jj() -> SkewMatrix {
        SkewMatrix::block_diagonal(&[C64::new(1.0, 0.0); 2])
    }

    #[test]
    fn fundamental_form_from_j() {
        let m = SkewMatrix::from_entries(2, &[(0, 1, 1.0, 0.0)]).unwrap();
        let a = alpha_from_skew(&m);
        let z = [C64::new(0.3, 0.1), C64::new(-0.2, 0.5)];
        let f = a.eval_at(&z).unwrap();
        // z₁dz₂ − z₂dz₁
        assert_eq!(f.coeff(MultiIndex::dz(1)), z[0]);
        assert_eq!(f.coeff(MultiIndex::dz(0)), -z[1]);
    }

    #[test]
    fn skew_alpha_axioms_are_exact() {
        let mut rng = stream_rng(4, 0);
        let m = SkewMatrix::random_integer(4, 3, &mut rng).unwrap();
        let a = alpha_from_skew(&m);
        let act = TorusAction::diagonal(4);
        let v = act.induced_field(&[1.0]);
        let f = a.field();
        assert!(f.contract(&v).unwrap().is_zero());
        assert!(f.lie_derivative(&v).unwrap().sub(&f.scale(2.0 * I)).is_zero());
    }

    #[test]
    fn norm_is_quadratic_form() {
        let mut rng = stream_rng(5, 0);
        let m = SkewMatrix::random(4, &mut rng).unwrap();
        let a = alpha_from_skew(&m);
        let g = m.gram();
        let level = MomentLevel::unit_sphere(4);
        for z in level.sample(20, 1, |_| true).unwrap() {
            let zv = nalgebra::DVector::from_vec(z.clone());
            let q = (zv.adjoint() * &g * &zv)[(0, 0)].re;
            let n1 = a.norm_sq_at(&z).unwrap();
            let n2 = a.norm_sq().eval_at(&z).unwrap();
            let n3 = norm_sq(&a.eval_at(&z).unwrap()).unwrap();
            assert!((q - n1).abs() < 1e-12 && (n1 - n2.re).abs() < 1e-12 && (n1 - n3).abs() < 1e-12);
            assert!(n2.im.abs() < 1e-15);
            assert!(n1 >= m.sigma_min().powi(2) - 1e-12);
        }
    }

    #[test]
    fn gram_schmidt_small_cases() {
        // already orthogonal: unchanged
        let a = alpha_from_skew(&SkewMatrix::block_diagonal(&[C64::new(1.0, 0.0), C64::default()]));
        let b = alpha_from_skew(&SkewMatrix::block_diagonal(&[C64::default(), C64::new(1.0, 0.0)]));
        let out = gram_schmidt(&[a.clone(), b.clone()]).unwrap();
        let z = [C64::new(0.3, 0.1), C64::new(-0.2, 0.5), C64::new(0.7, 0.0), C64::new(0.1, -0.4)];
        assert_eq!(out[1].coeffs_at(&z).unwrap(), b.coeffs_at(&z).unwrap());
        // self projection vanishes
        let same = gram_schmidt(&[a.clone(), a.clone()]).unwrap();
        assert!(same[1].coeffs_at(&z).unwrap().iter().all(|c| c.norm() < 1e-15));
        assert!(gram_schmidt(&[TwistForm::new(vec![ScalarField::zero(4); 4], vec![2.0 * I])]).is_err());
    }

    #[test]
    fn gram_schmidt_orthogonality_and_norm_identity() {
        let mut rng = stream_rng(6, 0);
        let m1 = SkewMatrix::random(8, &mut rng).unwrap();
        let m2 = SkewMatrix::random(8, &mut rng).unwrap();
        let (a1, a2) = (alpha_from_skew(&m1), alpha_from_skew(&m2));
        let bs = gram_schmidt(&[a1.clone(), a2.clone()]).unwrap();
        let level = MomentLevel::unit_sphere(8);
        for z in level.sample(10, 2, |_| true).unwrap() {
            let b1 = bs[0].coeffs_at(&z).unwrap();
            let b2 = bs[1].coeffs_at(&z).unwrap();
            let scale = b1.iter().chain(&b2).map(|c| c.norm()).fold(0.0, f64::max);
            assert!(inner_at(&b1, &b2).norm() < 1e-12 * scale * scale);
            assert!(inner_at(&b2, &b1).norm() < 1e-12 * scale * scale);
            let x1 = a1.coeffs_at(&z).unwrap();
            let x2 = a2.coeffs_at(&z).unwrap();
            let n1: f64 = x1.iter().map(|c| c.norm_sqr()).sum();
            let n2: f64 = x2.iter().map(|c| c.norm_sqr()).sum();
            let nb: f64 = b2.iter().map(|c| c.norm_sqr()).sum();
            let expect = n2 - inner_at(&x1, &x2).norm_sqr() / n1;
            assert!((nb - expect).abs() < 1e-12 * n2);
            // symbolic and pointwise routes agree
            let pw = gram_schmidt_at(&[x1, x2]);
            assert!(pw[1].iter().zip(&b2).all(|(p, q)| (p - q).norm() < 1e-12 * scale));
        }
    }

    #[test]
    fn singular_limits_along_two_paths() {
        let l: Vec<C64> = [1.0, 2.0, 3.0, 4.0].iter().map(|&x| C64::new(x, 0.0)).collect();
        let m1 = SkewMatrix::block_diagonal(&[C64::new(1.0, 0.0); 4]);
        let m2 = SkewMatrix::block_diagonal(&l);
        let z1 = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let probe = singular_limit_probe(&m1, &m2, z1, &[1e-2, 1e-4, 1e-6]).unwrap();
        assert!((probe.limit1() - &diagonal_monomial(8, 3)).norm_l1() < 1e-4);
        assert!((probe.limit2() - &diagonal_monomial(8, 2)).norm_l1() < 1e-4);
        assert!((probe.difference() - 2.0).abs() < 1e-4);
    }

    #[test]
    fn hirzebruch_charges_are_exact() {
        for n in -1..=2 {
            let h = hirzebruch_twist(n).unwrap();
            for tf in [&h.alpha1, &h.alpha2, &h.alpha] {
                let f = tf.field();
                for k in 0..3 {
                    let v = h.action.induced_field(&h.action.basis(k));
                    let lie = f.lie_derivative(&v).unwrap();
                    let z: Vec<C64> = (0..6).map(|j| C64::new(0.4 + 0.1 * j as f64, 0.3 - 0.2 * j as f64)).collect();
                    let r = (&lie.eval_at(&z).unwrap() - &f.eval_at(&z).unwrap().scale(tf.charge[k])).max_abs();
                    assert!(r < 1e-12, "n={n} k={k} r={r}");
                    assert!(f.contract(&v).unwrap().eval_at(&z).unwrap().max_abs() < 1e-12);
                }
            }
            assert_eq!(h.alpha.charge, vec![2.0 * I, C64::default(), I]);
            assert_eq!(h.n == 0, h.alpha.is_holomorphic());
        }
    }

    #[test]
    fn hirzebruch_levels_keep_base_coordinates_away_from_zero() {
        for n in -1..=2 {
            let h = hirzebruch_twist(n).unwrap();
            let level = MomentLevel::new(h.action.clone(), hirzebruch_level(n)).unwrap();
            for z in level.sample(200, 3, |_| true).unwrap() {
                assert!(z[0].norm_sqr() + z[1].norm_sqr() >= 2.0 - 1e-9, "n={n}");
                assert!(h.alpha.norm_sq_at(&z).unwrap() > 1e-3);
            }
        }
    }

    #[test]
    fn veronese_degree_one_is_identity() {
        let mut rng = stream_rng(8, 0);
        let m = SkewMatrix::random(4, &mut rng).unwrap();
        let v = veronese_pullback(1, &m).unwrap();
        let a = alpha_from_skew(&m);
        for (x, y) in v.coeffs().iter().zip(a.coeffs()) {
            assert!(x.sub(y).is_zero());
        }
        assert_eq!(v.charge(), a.charge());
    }

    #[test]
    fn veronese_degree_two_is_horizontal() {
        let mut rng = stream_rng(9, 0);
        let m = SkewMatrix::random(36, &mut rng).unwrap();
        let v = veronese_pullback(2, &m).unwrap();
        assert_eq!(v.dim(), 8);
        assert_eq!(v.charge(), &[4.0 * I]);
        assert!(v.coeffs().iter().all(|c| c.numerator().is_bihomogeneous(3, 0)));
        let act = TorusAction::diagonal(8);
        let xi = act.holomorphic_field(&[1.0]);
        let contraction = v
            .coeffs()
            .iter()
            .zip(&xi.holo)
            .fold(ScalarField::zero(8), |acc, (a, w)| acc.add(&a.mul(w)));
        // exact up to float reassociation of the cancelling terms
        assert!(contraction.max_coeff() < 1e-12 * v.coeffs()[0].max_coeff());
        assert!(matches!(veronese_pullback(2, &jj()), Err(Error::DimensionMismatch(4, 36))));
    }
}
