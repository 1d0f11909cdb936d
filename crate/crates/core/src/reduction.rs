//! The twist reduction: from the flat SU(N)-structure on `C^N`, a linear
//! torus action and a family of orthogonal twist forms, build `(Ω, ω)` on a
//! level set and certify that they are basic and satisfy the SU(n)-equations.
//!
//! With generators `V_1..V_s` and twist forms `α^1..α^l`:
//!
//! ```text
//! Ω = i^s ᾱ¹∧⋯∧ᾱˡ ∧ (ᾱ¹·⋯·ᾱˡ·ι_{V_1}⋯ι_{V_s}Ω₀)
//! ω = ω₀ − Σ_k (i/‖α^k‖²) α^k∧ᾱ^k
//! Ω∧ω = 0,   Ω∧Ω̄ = (−1)^{l+1} c_n ‖α¹‖⁴⋯‖αˡ‖⁴ det⟨V_a, V_b⟩ ωⁿ
//! ```
//!
//! All checks evaluate forms pointwise at sampled level points and compare
//! them on random tuples from the level's tangent frame.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{big_omega0, contract, dual_contract, omega0, su_constant, Form, TangentVector, C64, I};
use crate::field::{restricted_max_abs, restricted_residual, FormField, ScalarField};
use crate::report::{Entries, Entry, Provenance};
use crate::torus::{flow_point, flow_pullback, stream_rng, MomentLevel, TorusAction, FLOW_TIMES};
use crate::twist::{inner, TwistForm};

/// Sample points closer than this (in `‖α‖²`) to a twist-form zero are redrawn.
pub const NORM_FLOOR: f64 = 1e-8;

/// `(C^N, ω₀, Ω₀)` with a linear torus action.
#[derive(Clone, Debug)]
pub struct AmbientStructure {
    action: TorusAction,
}

impl AmbientStructure {
    pub fn new(action: TorusAction) -> Self {
        Self { action }
    }

    pub fn dim(&self) -> usize {
        self.action.dim()
    }

    pub fn action(&self) -> &TorusAction {
        &self.action
    }

    pub fn omega0(&self) -> Form {
        omega0(self.dim())
    }

    pub fn big_omega0(&self) -> Form {
        big_omega0(self.dim())
    }

    /// V-charge `q(e_a) = iΣ_j q^a_j` of `Ω₀`.
    pub fn charge(&self) -> Vec<C64> {
        self.action.volume_charge()
    }

    /// The ambient facts the reduction relies on, checked symbolically.
    pub fn check(&self) -> Result<Entries> {
        let n = self.dim();
        let mut out = Entries::new();
        let lhs = self.big_omega0().wedge(&self.big_omega0().conj())?;
        let rhs = self.omega0().wedge_power(n)?.scale(su_constant(n));
        out.push(Entry::at_most(
            "ambient: Omega0^conj(Omega0) = c_N omega0^N",
            (&lhs - &rhs).max_abs() / lhs.max_abs(),
            1e-14,
            Provenance::exact("coefficientwise"),
        ));
        let real_part = self.charge().iter().map(|q| q.re.abs()).fold(0.0, f64::max);
        out.push(Entry::equal(
            "ambient: volume charge is imaginary",
            real_part,
            0.0,
            Provenance::exact("closed form"),
        ));
        let w0 = FormField::from_form(&self.omega0());
        let v0 = FormField::from_form(&self.big_omega0());
        for (k, q) in self.charge().into_iter().enumerate() {
            let v = self.action.induced_field(&self.action.basis(k));
            let kahler = w0.lie_derivative(&v)?;
            out.push(Entry::equal(
                format!("ambient: L_V{} omega0 = 0", k + 1),
                if kahler.is_zero() { 0.0 } else { 1.0 },
                0.0,
                Provenance::exact("symbolic Cartan"),
            ));
            let vol = v0.lie_derivative(&v)?.sub(&v0.scale(q));
            out.push(Entry::equal(
                format!("ambient: L_V{} Omega0 = q Omega0", k + 1),
                if vol.is_zero() { 0.0 } else { 1.0 },
                0.0,
                Provenance::exact("symbolic Cartan"),
            ));
        }
        Ok(out)
    }
}

/// Coefficient of the correction terms `α^k∧ᾱ^k/‖α^k‖²` for `k ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermFactor {
    I,
    One,
}

/// A sign/factor reading of the reduction formulas:
/// `ω = σ(ω₀ − Σ f_k/‖α^k‖² α^k∧ᾱ^k)` with `f_1 = i`, `f_{k≥2}` given by
/// `later_factor`, and `Ω∧Ω̄ = ε c_n F ωⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convention {
    pub omega_sign: i8,
    pub later_factor: TermFactor,
    pub eq_sign: i8,
}

impl Convention {
    /// `+ω`, all corrections with `i`, sign `(−1)^{l+1}`.
    pub fn standard(l: usize) -> Self {
        Self {
            omega_sign: 1,
            later_factor: TermFactor::I,
            eq_sign: if l % 2 == 1 { 1 } else { -1 },
        }
    }

    /// Only `ε = +1` gives the SU(n)-equations up to a positive conformal factor.
    pub fn is_admissible(&self) -> bool {
        self.eq_sign == 1
    }

    /// `(σ, f, ε)` and `(−σ, f, (−1)ⁿε)` give identical residuals.
    pub fn equivalent(&self, other: &Convention, n: usize) -> bool {
        let flip = if n % 2 == 1 { -1 } else { 1 };
        self.later_factor == other.later_factor
            && ((self.omega_sign == other.omega_sign && self.eq_sign == other.eq_sign)
                || (self.omega_sign == -other.omega_sign && self.eq_sign == flip * other.eq_sign))
    }

    pub fn label(&self) -> String {
        format!(
            "{}omega, {}, {}",
            if self.omega_sign > 0 { "+" } else { "-" },
            match self.later_factor {
                TermFactor::I => "i",
                TermFactor::One => "1",
            },
            if self.eq_sign > 0 { "+c_n" } else { "-c_n" }
        )
    }
}

/// Settings for [`reduce`].
#[derive(Clone, Debug)]
pub struct ReduceOptions {
    /// Divide `Ω` by `Π‖α^k‖²` (the conformal factor then loses its `‖α‖⁴` part).
    pub normalize: bool,
    /// Rows are the generators `e_k` in the action's standard basis; identity if unset.
    pub basis: Option<Vec<Vec<f64>>>,
    pub orthogonality_points: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self {
            normalize: false,
            basis: None,
            orthogonality_points: 50,
            seed: 0,
            tol: 1e-10,
        }
    }
}

/// A validated reduction, ready for pointwise evaluation.
#[derive(Clone, Debug)]
pub struct Reduction {
    ambient: AmbientStructure,
    level: MomentLevel,
    basis: Vec<Vec<f64>>,
    twists: Vec<TwistForm>,
    normalize: bool,
    convention: Convention,
}

/// Checks the preconditions and assembles the reduction.
///
/// Fails with [`Error::Precondition`] if the twist list is empty, if the
/// charges do not sum to `q_V/2`, or if the forms are not orthogonal at
/// sampled level points.
pub fn reduce(level: &MomentLevel, twists: Vec<TwistForm>, opts: &ReduceOptions) -> Result<Reduction> {
    let red = reduce_unchecked(level, twists, opts)?;
    let action = level.action();
    let half_q: Vec<C64> = action.volume_charge().into_iter().map(|q| q * 0.5).collect();
    let s = action.rank();
    let sum: Vec<C64> = (0..s).map(|a| red.twists.iter().map(|t| t.charge()[a]).sum()).collect();
    if sum.iter().zip(&half_q).any(|(x, y)| (x - y).norm() > 1e-12) {
        return Err(Error::Precondition(format!(
            "charge-sum precondition: twist charges sum to {sum:?}, but q_V/2 = {half_q:?}"
        )));
    }
    if red.twists.len() > 1 {
        let pts = red.sample(opts.orthogonality_points, opts.seed, |_| true)?;
        let worst = red.orthogonality_residual(&pts)?;
        // written so that NaN also fails
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(worst <= opts.tol) {
            return Err(Error::Precondition(format!(
                "orthogonality: |conj(b)·a|/(|a||b|) reaches {worst:.3e} > {:.1e}",
                opts.tol
            )));
        }
    }
    Ok(red)
}

/// [`reduce`] without the charge-sum and orthogonality preconditions, for
/// negative controls that show the detectors fire.
pub fn reduce_unchecked(level: &MomentLevel, twists: Vec<TwistForm>, opts: &ReduceOptions) -> Result<Reduction> {
    let action = level.action();
    let (n, s) = (action.dim(), action.rank());
    if twists.is_empty() {
        return Err(Error::Precondition("empty twist list".into()));
    }
    for tf in &twists {
        if tf.dim() != n {
            return Err(Error::DimensionMismatch(tf.dim(), n));
        }
        if tf.charge().len() != s {
            return Err(Error::DimensionMismatch(tf.charge().len(), s));
        }
    }
    let basis = match &opts.basis {
        Some(b) => {
            if b.len() != s || b.iter().any(|r| r.len() != s) {
                return Err(Error::DimensionMismatch(b.len(), s));
            }
            b.clone()
        }
        None => (0..s).map(|k| action.basis(k)).collect(),
    };
    Ok(Reduction {
        ambient: AmbientStructure::new(action.clone()),
        level: level.clone(),
        basis,
        convention: Convention::standard(twists.len()),
        twists,
        normalize: opts.normalize,
    })
}

/// The reduced forms and their ingredients at one point.
#[derive(Clone, Debug)]
pub struct Local {
    pub z: Vec<C64>,
    pub alphas: Vec<Form>,
    pub norms: Vec<f64>,
    pub fields: Vec<TangentVector>,
    /// `ι_{V_1}⋯ι_{V_s}Ω₀`.
    pub psi: Form,
    /// `det⟨V_a, V_b⟩`.
    pub gram_det: f64,
    big_omega: Form,
    normalize: bool,
}

impl Local {
    pub fn big_omega(&self) -> &Form {
        &self.big_omega
    }

    /// `ω` under a given convention.
    pub fn omega(&self, conv: &Convention) -> Form {
        let n = self.z.len();
        let mut w = omega0(n);
        for (k, (a, &r)) in self.alphas.iter().zip(&self.norms).enumerate() {
            let f = if k == 0 || conv.later_factor == TermFactor::I {
                I
            } else {
                C64::new(1.0, 0.0)
            };
            let aa = a.wedge(&a.conj()).expect("same dimension");
            w = &w - &aa.scale(f / r);
        }
        w.scale_real(conv.omega_sign as f64)
    }

    /// The conformal factor `F` in `Ω∧Ω̄ = ε c_n F ωⁿ`.
    pub fn factor(&self) -> f64 {
        if self.normalize {
            self.gram_det
        } else {
            self.norms.iter().map(|r| r * r).product::<f64>() * self.gram_det
        }
    }

    /// The factor with `Π‖V_k‖²` in place of the Gram determinant.
    pub fn product_factor(&self) -> f64 {
        let p: f64 = self.fields.iter().map(|v| v.norm_sqr() / 2.0).product();
        self.factor() / self.gram_det * p
    }
}

impl Reduction {
    pub fn ambient(&self) -> &AmbientStructure {
        &self.ambient
    }

    pub fn level(&self) -> &MomentLevel {
        &self.level
    }

    pub fn twists(&self) -> &[TwistForm] {
        &self.twists
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn normalized(&self) -> bool {
        self.normalize
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Complex dimension of the quotient.
    pub fn n(&self) -> usize {
        self.ambient.dim() - self.basis.len()
    }

    pub fn with_convention(&self, convention: Convention) -> Self {
        Self {
            convention,
            ..self.clone()
        }
    }

    pub fn with_normalize(&self, normalize: bool) -> Self {
        Self {
            normalize,
            ..self.clone()
        }
    }

    /// The same reduction with generators `e'_k = Σ_a A_ka e_a`.
    pub fn with_basis(&self, a: &[Vec<f64>]) -> Result<Self> {
        let s = self.basis.len();
        if a.len() != s || a.iter().any(|r| r.len() != s) {
            return Err(Error::DimensionMismatch(a.len(), s));
        }
        let basis = (0..s)
            .map(|k| (0..s).map(|c| (0..s).map(|b| a[k][b] * self.basis[b][c]).sum()).collect())
            .collect();
        Ok(Self {
            basis,
            ..self.clone()
        })
    }

    /// Level points with every `‖α^k‖² ≥` [`NORM_FLOOR`] that also pass `extra`.
    pub fn sample<F>(&self, count: usize, seed: u64, extra: F) -> Result<Vec<Vec<C64>>>
    where
        F: Fn(&[C64]) -> bool + Sync,
    {
        self.level.sample(count, seed, |z| {
            self.twists
                .iter()
                .all(|t| t.norm_sq_at(z).is_ok_and(|r| r >= NORM_FLOOR))
                && extra(z)
        })
    }

    /// `max |β̄·α| / (‖α‖‖β‖)` over distinct pairs and points.
    pub fn orthogonality_residual(&self, pts: &[Vec<C64>]) -> Result<f64> {
        let vals: Vec<f64> = pts
            .par_iter()
            .map(|z| {
                let coeffs: Vec<Vec<C64>> = self.twists.iter().map(|t| t.coeffs_at(z)).collect::<Result<_>>()?;
                let mut worst: f64 = 0.0;
                for (i, a) in coeffs.iter().enumerate() {
                    for b in &coeffs[i + 1..] {
                        let ab: C64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
                        let na: f64 = a.iter().map(|c| c.norm_sqr()).sum();
                        let nb: f64 = b.iter().map(|c| c.norm_sqr()).sum();
                        worst = worst.max(ab.norm() / (na * nb).sqrt().max(1e-300));
                    }
                }
                Ok(worst)
            })
            .collect::<Result<_>>()?;
        Ok(vals.into_iter().fold(0.0, f64::max))
    }

    fn gram_det(&self, z: &[C64]) -> f64 {
        let s = self.basis.len();
        let w: Vec<Vec<f64>> = self.basis.iter().map(|e| self.ambient.action.weights(e)).collect();
        let g = nalgebra::DMatrix::from_fn(s, s, |a, b| {
            z.iter().enumerate().map(|(j, c)| w[a][j] * w[b][j] * c.norm_sqr()).sum::<f64>()
        });
        g.determinant()
    }

    /// `ι_{V_1}⋯ι_{V_s}Ω₀` (innermost contraction by `V_s`).
    fn contract_all(&self, vs: &[TangentVector]) -> Result<Form> {
        let mut psi = self.ambient.big_omega0();
        for v in vs.iter().rev() {
            psi = contract(v, &psi)?;
        }
        Ok(psi)
    }

    /// `ι_{ξ_1}⋯ι_{ξ_s}Ω₀` with the holomorphic fields `ξ_k`.
    pub fn xi_contraction(&self, z: &[C64]) -> Result<Form> {
        let xis: Vec<TangentVector> = self
            .basis
            .iter()
            .map(|e| self.ambient.action.holomorphic_vector(e, z))
            .collect();
        self.contract_all(&xis)
    }

    /// Everything at one point.
    pub fn local(&self, z: &[C64]) -> Result<Local> {
        let s = self.basis.len();
        let alphas: Vec<Form> = self.twists.iter().map(|t| t.eval_at(z)).collect::<Result<_>>()?;
        let norms: Vec<f64> = self.twists.iter().map(|t| t.norm_sq_at(z)).collect::<Result<_>>()?;
        let fields: Vec<TangentVector> = self
            .basis
            .iter()
            .map(|e| self.ambient.action.induced_vector(e, z))
            .collect();
        let psi = self.contract_all(&fields)?;
        let mut theta = psi.clone();
        for a in alphas.iter().rev() {
            theta = dual_contract(&a.conj(), &theta)?;
        }
        let mut big = Form::scalar(z.len(), I.powi(s as i32));
        for a in &alphas {
            big = big.wedge(&a.conj())?;
        }
        big = big.wedge(&theta)?;
        if self.normalize {
            big = big.scale_real(1.0 / norms.iter().product::<f64>());
        }
        Ok(Local {
            z: z.to_vec(),
            alphas,
            norms,
            fields,
            psi,
            gram_det: self.gram_det(z),
            big_omega: big,
            normalize: self.normalize,
        })
    }

    /// `Ω` and `ω` as symbolic fields, for small cases (exact Lie derivatives).
    pub fn symbolic(&self) -> Result<SymbolicStructure> {
        let n = self.ambient.dim();
        let action = &self.ambient.action;
        let alphas: Vec<FormField> = self.twists.iter().map(TwistForm::field).collect();
        let mut psi = FormField::from_form(&self.ambient.big_omega0());
        for e in self.basis.iter().rev() {
            psi = psi.contract(&action.induced_field(e))?;
        }
        let mut theta = psi;
        for a in alphas.iter().rev() {
            theta = theta.dual_contract(&a.conj())?;
        }
        let mut big = FormField::scalar(ScalarField::constant(n, I.powi(self.basis.len() as i32)));
        for a in &alphas {
            big = big.wedge(&a.conj())?;
        }
        big = big.wedge(&theta)?;
        let inv_norms: Vec<ScalarField> = self
            .twists
            .iter()
            .map(|t| t.norm_sq().recip())
            .collect::<Result<_>>()?;
        if self.normalize {
            let inv = inv_norms.iter().fold(ScalarField::one(n), |acc, f| acc.mul(f));
            big = big.mul_scalar(&inv);
        }
        let conv = self.convention;
        let mut omega = FormField::from_form(&self.ambient.omega0());
        for (k, (a, inv)) in alphas.iter().zip(&inv_norms).enumerate() {
            let f = if k == 0 || conv.later_factor == TermFactor::I {
                I
            } else {
                C64::new(1.0, 0.0)
            };
            omega = omega.sub(&a.wedge(&a.conj())?.mul_scalar(inv).scale(f));
        }
        Ok(SymbolicStructure {
            big_omega: big,
            omega: omega.scale(C64::new(conv.omega_sign as f64, 0.0)),
        })
    }
}

/// `Ω` and `ω` as rational form fields.
#[derive(Clone, Debug)]
pub struct SymbolicStructure {
    pub big_omega: FormField,
    pub omega: FormField,
}

/// Trials, seed and tolerance for pointwise checks.
#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            trials: 20,
            seed: 0,
            tol: 1e-10,
        }
    }
}

/// Runs `f(index, point)` over all points in parallel and reduces the
/// per-point residual vectors by componentwise max.
fn max_over_points<F>(pts: &[Vec<C64>], width: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(usize, &[C64]) -> Result<Vec<f64>> + Sync,
{
    let rows: Vec<Vec<f64>> = pts
        .par_iter()
        .enumerate()
        .map(|(i, z)| f(i, z))
        .collect::<Result<_>>()?;
    let mut out = vec![0.0f64; width];
    for r in rows {
        for (o, v) in out.iter_mut().zip(r) {
            // NaN propagates so that a broken evaluation fails its entry
            *o = if v.is_nan() || o.is_nan() { f64::NAN } else { o.max(v) };
        }
    }
    Ok(out)
}

/// Residuals of `Ω∧ω = 0` and `Ω∧Ω̄ = ε c_n F ωⁿ` on frame tuples at one point.
fn su_pair<R: rand::Rng>(
    big: &Form,
    omega: &Form,
    rhs_scale: C64,
    n: usize,
    frame: &[TangentVector],
    trials: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let zero = Form::zero(big.dim());
    let first = restricted_residual(
        &big.wedge(omega)?,
        &zero,
        frame,
        trials,
        big.max_abs() * omega.max_abs(),
        rng,
    )?;
    let lhs = big.wedge(&big.conj())?;
    let rhs = omega.wedge_power(n)?.scale(rhs_scale);
    let second = restricted_residual(&lhs, &rhs, frame, trials, 1e-12 * lhs.max_abs(), rng)?;
    Ok((first, second))
}

/// The two SU(n)-equations on frame tuples, under the reduction's convention.
pub fn verify_su_equations(red: &Reduction, pts: &[Vec<C64>], cfg: &CheckConfig) -> Result<Entries> {
    let n = red.n();
    let conv = red.convention;
    let cn = su_constant(n);
    let res = max_over_points(pts, 2, |i, z| {
        let loc = red.local(z)?;
        let frame = red.level.tangent_frame(z)?;
        let omega = loc.omega(&conv);
        let scale = cn * (conv.eq_sign as f64 * loc.factor());
        let (a, b) = su_pair(loc.big_omega(), &omega, scale, n, &frame, cfg.trials, &mut stream_rng(cfg.seed, i as u64))?;
        Ok(vec![a, b])
    })?;
    let prov = || Provenance::new(pts.len(), cfg.trials, cfg.seed, "frame tuples");
    Ok(Entries(vec![
        Entry::at_most("SU: Omega^omega = 0", res[0], cfg.tol, prov()),
        Entry::at_most("SU: Omega^conj(Omega) = sign c_n F omega^n", res[1], cfg.tol, prov()),
    ]))
}

/// `max_t |φ_t^*Φ − e^{ct}Φ| / |Φ|` over [`FLOW_TIMES`], where `at(z)`
/// evaluates `Φ`.
fn flow_residual<F>(z: &[C64], w: &[f64], charge: C64, at: F) -> Result<f64>
where
    F: Fn(&[C64]) -> Result<Form>,
{
    let base = at(z)?;
    let scale = base.max_abs().max(1e-300);
    let mut worst: f64 = 0.0;
    for t in FLOW_TIMES {
        let pulled = flow_pullback(&at(&flow_point(z, w, t))?, w, t);
        let expected = base.scale((charge * t).exp());
        worst = worst.max((&pulled - &expected).max_abs() / scale);
    }
    Ok(worst)
}

/// Basicness: `ι_{V_k}` of `Ω` and `ω` on frame tuples, and invariance of
/// both under the finite flow of each generator.
pub fn verify_basic(red: &Reduction, pts: &[Vec<C64>], cfg: &CheckConfig) -> Result<Entries> {
    let s = red.basis.len();
    let conv = red.convention;
    let action = &red.ambient.action;
    let res = max_over_points(pts, 4 * s, |i, z| {
        let mut rng = stream_rng(cfg.seed, i as u64);
        let loc = red.local(z)?;
        let frame = red.level.tangent_frame(z)?;
        let omega = loc.omega(&conv);
        let zero = Form::zero(z.len());
        let mut row = Vec::with_capacity(4 * s);
        for (k, e) in red.basis.iter().enumerate() {
            let v = &loc.fields[k];
            let vn = v.norm_sqr().sqrt();
            let big = loc.big_omega();
            row.push(restricted_residual(&contract(v, big)?, &zero, &frame, cfg.trials, big.max_abs() * vn, &mut rng)?);
            row.push(restricted_residual(&contract(v, &omega)?, &zero, &frame, cfg.trials, omega.max_abs() * vn, &mut rng)?);
            let w = action.weights(e);
            row.push(flow_residual(z, &w, C64::default(), |p| Ok(red.local(p)?.big_omega))?);
            row.push(flow_residual(z, &w, C64::default(), |p| Ok(red.local(p)?.omega(&conv)))?);
        }
        Ok(row)
    })?;
    let mut out = Entries::new();
    for k in 0..s {
        let prov = |m: &str| Provenance::new(pts.len(), cfg.trials, cfg.seed, m);
        let r = &res[4 * k..4 * k + 4];
        out.push(Entry::at_most(format!("basic: iota_V{} Omega", k + 1), r[0], cfg.tol, prov("frame tuples")));
        out.push(Entry::at_most(format!("basic: iota_V{} omega", k + 1), r[1], cfg.tol, prov("frame tuples")));
        out.push(Entry::at_most(format!("basic: L_V{} Omega", k + 1), r[2], cfg.tol, prov("finite flow")));
        out.push(Entry::at_most(format!("basic: L_V{} omega", k + 1), r[3], cfg.tol, prov("finite flow")));
    }
    Ok(out)
}

/// `L_{V_k}Ω` and `L_{V_k}ω` by the symbolic Cartan formula, evaluated
/// at the points relative to `|Ω|`, `|ω|`.
pub fn verify_basic_symbolic(red: &Reduction, pts: &[Vec<C64>], cfg: &CheckConfig) -> Result<Entries> {
    let sym = red.symbolic()?;
    let action = &red.ambient.action;
    let mut out = Entries::new();
    for (k, e) in red.basis.iter().enumerate() {
        let v = action.induced_field(e);
        for (name, f) in [("Omega", &sym.big_omega), ("omega", &sym.omega)] {
            let l = f.lie_derivative(&v)?;
            let res = max_over_points(pts, 1, |_, z| {
                if l.is_zero() {
                    return Ok(vec![0.0]);
                }
                Ok(vec![l.eval_at(z)?.max_abs() / f.eval_at(z)?.max_abs().max(1e-300)])
            })?;
            let method = if l.is_zero() { "symbolic Cartan (exact)" } else { "symbolic Cartan, evaluated" };
            out.push(Entry::at_most(
                format!("basic: L_V{} {name} (symbolic)", k + 1),
                res[0],
                cfg.tol,
                Provenance::new(pts.len(), 0, cfg.seed, method),
            ));
        }
        // Ω is horizontal on the ambient space, not only on the level
        let iota = sym.big_omega.contract(&v)?;
        let res = max_over_points(pts, 1, |_, z| {
            if iota.is_zero() {
                return Ok(vec![0.0]);
            }
            Ok(vec![iota.eval_at(z)?.max_abs() / sym.big_omega.eval_at(z)?.max_abs().max(1e-300)])
        })?;
        out.push(Entry::at_most(
            format!("basic: iota_V{} Omega (symbolic, ambient)", k + 1),
            res[0],
            cfg.tol,
            Provenance::new(pts.len(), 0, cfg.seed, if iota.is_zero() { "symbolic (exact)" } else { "symbolic, evaluated" }),
        ));
    }
    Ok(out)
}

/// `max |dω|` on frame tuples: measured, not asserted.
pub fn measure_d_omega(red: &Reduction, pts: &[Vec<C64>], cfg: &CheckConfig) -> Result<Entry> {
    let d = red.symbolic()?.omega.d();
    let res = max_over_points(pts, 1, |i, z| {
        let frame = red.level.tangent_frame(z)?;
        let dz = d.eval_at(z)?;
        Ok(vec![restricted_max_abs(&dz, &frame, cfg.trials, &mut stream_rng(cfg.seed, i as u64))?])
    })?;
    Ok(Entry::info("measured: |d omega| on frames", res[0], Provenance::new(pts.len(), cfg.trials, cfg.seed, "frame tuples")))
}

/// The intermediate identities of the construction, stage by stage, so a
/// failing scenario shows which stage breaks. One twist: the ξ-contracted
/// pair `(Ω_M, ω_M)`, the hatted pair `(Ω̂, ω̂)`, `ω̂ⁿ = 0` and the lift
/// `α∧ᾱ∧ω̂^{n−1} = (2i‖α‖²/n)ωⁿ`. Two twists: the double-hat chain.
pub fn intermediate_identities(red: &Reduction, pts: &[Vec<C64>], cfg: &CheckConfig) -> Result<Entries> {
    let l = red.twists.len();
    if l > 2 {
        return Err(Error::Precondition("intermediate identities cover one or two twists".into()));
    }
    let n = red.n();
    let s = red.basis.len();
    let action = &red.ambient.action;
    let names: Vec<&str> = if l == 1 {
        vec![
            "chain: Omega_M^omega_M = 0",
            "chain: Omega_M^conj(Omega_M) = c_n G omega_M^n",
            "chain: Omega_hat^omega_hat = 0",
            "chain: Omega_hat^conj(Omega_hat) = c_(n-1) |a|^2 G omega_hat^(n-1)",
            "chain: omega_hat^n = 0",
            "chain: a^conj(a)^omega_hat^(n-1) = (2i|a|^2/n) omega^n",
        ]
    } else {
        vec![
            "chain: Omega_M^omega_M = 0",
            "chain: Omega_M^conj(Omega_M) = c_n G omega_M^n",
            "chain: Omega_hat'^omega_hat' = 0",
            "chain: conj(b)·omega_hat' = (i/2) conj(b)",
            "chain: Omega_hat^b = (-1)^n |b|^2 Omega_hat'",
            "chain: Omega_hat^omega_hat = 0",
            "chain: Omega_hat^conj(Omega_hat) = c_(n-2) |a|^2 |b|^2 G omega_hat^(n-2)",
            "chain: omega^n = -n(n-1)/(4|a|^2|b|^2) a^conj(a)^b^conj(b)^omega_hat^(n-2)",
        ]
    };
    let width = names.len() + s + 1;
    let res = max_over_points(pts, width, |i, z| {
        let mut rng = stream_rng(cfg.seed, i as u64);
        let loc = red.local(z)?;
        let frame = red.level.tangent_frame(z)?;
        let w0 = omega0(z.len());
        let zero = Form::zero(z.len());
        let g = loc.gram_det;
        let om = red.xi_contraction(z)?;
        let mut row = Vec::with_capacity(width);
        let rr = |a: &Form, b: &Form, floor: f64, rng: &mut _| restricted_residual(a, b, &frame, cfg.trials, floor, rng);

        row.push(rr(&om.wedge(&w0)?, &zero, om.max_abs() * w0.max_abs(), &mut rng)?);
        let lhs = om.wedge(&om.conj())?;
        let rhs = w0.wedge_power(n)?.scale(su_constant(n) * g);
        row.push(rr(&lhs, &rhs, 1e-12 * lhs.max_abs(), &mut rng)?);

        let a = &loc.alphas[0];
        let ra = loc.norms[0];
        let hat = |w: &Form, b: &Form, r: f64| -> Result<Form> { Ok(w - &b.wedge(&b.conj())?.scale(I / (2.0 * r))) };
        let om1 = dual_contract(&a.conj(), &om)?;
        let w1 = hat(&w0, a, ra)?;
        let conv = Convention::standard(l);
        let omega = loc.omega(&conv);
        if l == 1 {
            row.push(rr(&om1.wedge(&w1)?, &zero, om1.max_abs() * w1.max_abs(), &mut rng)?);
            let lhs = om1.wedge(&om1.conj())?;
            let rhs = w1.wedge_power(n - 1)?.scale(su_constant(n - 1) * ra * g);
            row.push(rr(&lhs, &rhs, 1e-12 * lhs.max_abs(), &mut rng)?);
            let wn = w1.wedge_power(n)?;
            row.push(rr(&wn, &zero, w1.max_abs().powi(n as i32), &mut rng)?);
            let lhs = a.wedge(&a.conj())?.wedge(&w1.wedge_power(n - 1)?)?;
            let rhs = omega.wedge_power(n)?.scale(2.0 * I * ra / n as f64);
            row.push(rr(&lhs, &rhs, 1e-12 * lhs.max_abs(), &mut rng)?);
        } else {
            let b = &loc.alphas[1];
            let rb = loc.norms[1];
            row.push(rr(&om1.wedge(&w1)?, &zero, om1.max_abs() * w1.max_abs(), &mut rng)?);
            let lhs = dual_contract(&b.conj(), &w1)?;
            let rhs = b.conj().scale(I * 0.5);
            row.push((&lhs - &rhs).max_abs() / rhs.max_abs().max(1e-300));
            let om2 = dual_contract(&b.conj(), &om1)?;
            let lhs = om2.wedge(b)?;
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            let rhs = om1.scale_real(sign * rb);
            row.push((&lhs - &rhs).max_abs() / rhs.max_abs().max(1e-300));
            let w2 = hat(&w1, b, rb)?;
            row.push(rr(&om2.wedge(&w2)?, &zero, om2.max_abs() * w2.max_abs(), &mut rng)?);
            let lhs = om2.wedge(&om2.conj())?;
            let rhs = w2.wedge_power(n - 2)?.scale(su_constant(n - 2) * ra * rb * g);
            row.push(rr(&lhs, &rhs, 1e-12 * lhs.max_abs(), &mut rng)?);
            let lhs = omega.wedge_power(n)?;
            let rhs = a
                .wedge(&a.conj())?
                .wedge(&b.wedge(&b.conj())?)?
                .wedge(&w2.wedge_power(n - 2)?)?
                .scale_real(-((n * (n - 1)) as f64) / (4.0 * ra * rb));
            row.push(rr(&lhs, &rhs, 1e-12 * lhs.max_abs(), &mut rng)?);
        }

        // the fully contracted Ω̂ has charge q/2
        let full_hat = |p: &[C64]| -> Result<Form> {
            let loc = red.local(p)?;
            let mut t = red.xi_contraction(p)?;
            for a in loc.alphas.iter() {
                t = dual_contract(&a.conj(), &t)?;
            }
            Ok(t)
        };
        for e in &red.basis {
            let w = action.weights(e);
            let half_q = I * (w.iter().sum::<f64>() / 2.0);
            row.push(flow_residual(z, &w, half_q, full_hat)?);
        }

        // i^s ι_V⋯ = (−1)^s ι_ξ⋯ on (N,0)-forms
        let lhs = loc.psi.scale(I.powi(s as i32));
        let rhs = om.scale_real(if s.is_multiple_of(2) { 1.0 } else { -1.0 });
        row.push((&lhs - &rhs).max_abs() / rhs.max_abs().max(1e-300));
        Ok(row)
    })?;
    let mut out = Entries::new();
    let prov = |m: &str| Provenance::new(pts.len(), cfg.trials, cfg.seed, m);
    for (name, v) in names.iter().zip(&res) {
        out.push(Entry::at_most(*name, *v, cfg.tol, prov("frame tuples")));
    }
    for k in 0..s {
        out.push(Entry::at_most(
            format!("chain: Omega_hat charge q/2 on e{}", k + 1),
            res[names.len() + k],
            cfg.tol,
            prov("finite flow"),
        ));
    }
    out.push(Entry::at_most(
        "pipeline: i^s iota_V..Omega0 = (-1)^s iota_xi..Omega0",
        res[width - 1],
        cfg.tol,
        prov("pointwise"),
    ));
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditRow {
    pub convention: Convention,
    pub label: String,
    pub admissible: bool,
    pub su1: f64,
    pub su2: f64,
    pub passed: bool,
}

/// Residuals of every sign/factor reading of the formulas.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Audit {
    pub rows: Vec<AuditRow>,
    /// The passing convention when all passing rows are equivalent (the
    /// positive-factor representative is preferred).
    pub selected: Option<Convention>,
    /// Passing rows up to the equivalence `(σ, f, ε) ~ (−σ, f, (−1)ⁿε)`.
    pub passing_classes: usize,
    /// The stated convention `(+ω, i, (−1)^{l+1})` is equivalent to the selection.
    pub stated_equivalent: bool,
    /// `Ω∧Ω̄ = ε c_n ωⁿ` with unit factor, for raw and normalized `Ω`.
    pub unit_factor_raw: f64,
    pub unit_factor_normalized: f64,
    pub tol: f64,
}

impl Audit {
    pub fn entries(&self, points: usize, cfg: &CheckConfig) -> Entries {
        let prov = || Provenance::new(points, cfg.trials, cfg.seed, "frame tuples");
        let mut out = Entries::new();
        for r in &self.rows {
            out.push(Entry::info(format!("audit: [{}] Omega^omega", r.label), r.su1, prov()));
            out.push(Entry::info(format!("audit: [{}] Omega^conj(Omega)", r.label), r.su2, prov()));
        }
        out.push(Entry::equal(
            "audit: passing convention classes",
            self.passing_classes as f64,
            1.0,
            prov(),
        ));
        let best = self
            .selected
            .and_then(|c| self.rows.iter().find(|r| r.convention == c))
            .map(|r| r.su1.max(r.su2))
            .unwrap_or(f64::NAN);
        out.push(Entry::at_most("audit: selected convention residual", best, self.tol, prov()));
        out.push(Entry::info(
            "audit: stated convention equivalent to selection",
            if self.stated_equivalent { 1.0 } else { 0.0 },
            prov(),
        ));
        out.push(Entry::info("audit: unit factor, raw Omega", self.unit_factor_raw, prov()));
        out.push(Entry::info("audit: unit factor, normalized Omega", self.unit_factor_normalized, prov()));
        out
    }
}

/// Evaluates the SU(n) residuals for each combination of `±ω`, `i` vs `1`
/// in the later correction terms, and `±c_n`, and selects the combination
/// within `cfg.tol` if it is unique up to the sign symmetry.
pub fn convention_audit(red: &Reduction, pts: &[Vec<C64>], cfg: &CheckConfig) -> Result<Audit> {
    let n = red.n();
    let l = red.twists.len();
    let factors: &[TermFactor] = if l > 1 { &[TermFactor::I, TermFactor::One] } else { &[TermFactor::I] };
    let mut convs = Vec::new();
    for &f in factors {
        for sigma in [1i8, -1] {
            for eps in [1i8, -1] {
                convs.push(Convention {
                    omega_sign: sigma,
                    later_factor: f,
                    eq_sign: eps,
                });
            }
        }
    }
    let cn = su_constant(n);
    let width = 2 * convs.len() + 2;
    let raw = red.with_normalize(false);
    let normed = red.with_normalize(true);
    let res = max_over_points(pts, width, |i, z| {
        let loc = red.local(z)?;
        let frame = red.level.tangent_frame(z)?;
        let mut row = Vec::with_capacity(width);
        for c in &convs {
            // identical tuples for every variant
            let mut rng = stream_rng(cfg.seed, i as u64);
            let omega = loc.omega(c);
            let scale = cn * (c.eq_sign as f64 * loc.factor());
            let (a, b) = su_pair(loc.big_omega(), &omega, scale, n, &frame, cfg.trials, &mut rng)?;
            row.push(a);
            row.push(b);
        }
        let conv = red.convention;
        for r in [&raw, &normed] {
            let mut rng = stream_rng(cfg.seed, i as u64);
            let loc = r.local(z)?;
            let omega = loc.omega(&conv);
            let (_, b) = su_pair(loc.big_omega(), &omega, cn * conv.eq_sign as f64, n, &frame, cfg.trials, &mut rng)?;
            row.push(b);
        }
        Ok(row)
    })?;
    let rows: Vec<AuditRow> = convs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let (su1, su2) = (res[2 * k], res[2 * k + 1]);
            AuditRow {
                convention: *c,
                label: c.label(),
                admissible: c.is_admissible(),
                su1,
                su2,
                passed: su1 <= cfg.tol && su2 <= cfg.tol,
            }
        })
        .collect();
    let passing: Vec<Convention> = rows.iter().filter(|r| r.passed).map(|r| r.convention).collect();
    let mut classes: Vec<Convention> = Vec::new();
    for c in &passing {
        if !classes.iter().any(|d| d.equivalent(c, n)) {
            classes.push(*c);
        }
    }
    let selected = (classes.len() == 1).then(|| {
        passing
            .iter()
            .copied()
            .max_by_key(|c| (c.is_admissible(), c.omega_sign))
            .expect("one class")
    });
    let stated = Convention::standard(l);
    Ok(Audit {
        passing_classes: classes.len(),
        stated_equivalent: selected.is_some_and(|c| c.equivalent(&stated, n)),
        selected,
        rows,
        unit_factor_raw: res[width - 2],
        unit_factor_normalized: res[width - 1],
        tol: cfg.tol,
    })
}

/// Recomputes `Ω` with generators `e' = Ae` and checks `Ω' = det(A)·Ω`
/// (and that `ω` is unchanged).
pub fn basis_change_check(red: &Reduction, a: &[Vec<f64>], pts: &[Vec<C64>], cfg: &CheckConfig) -> Result<Entries> {
    let s = red.basis.len();
    let m = nalgebra::DMatrix::from_fn(s, s, |i, j| a.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0.0));
    let det = m.determinant();
    if det.abs() < 1e-12 {
        return Err(Error::Singular("basis change matrix".into()));
    }
    let other = red.with_basis(a)?;
    let conv = red.convention;
    let res = max_over_points(pts, 2, |_, z| {
        let (l1, l2) = (red.local(z)?, other.local(z)?);
        let expected = l1.big_omega().scale_real(det);
        let r1 = (l2.big_omega() - &expected).max_abs() / expected.max_abs().max(1e-300);
        let (w1, w2) = (l1.omega(&conv), l2.omega(&conv));
        let r2 = (&w2 - &w1).max_abs() / w1.max_abs();
        Ok(vec![r1, r2])
    })?;
    let prov = || Provenance::new(pts.len(), 0, cfg.seed, "pointwise");
    Ok(Entries(vec![
        Entry::at_most("basis change: Omega' = det(A) Omega", res[0], cfg.tol, prov()),
        Entry::at_most("basis change: omega unchanged", res[1], cfg.tol, prov()),
    ]))
}

/// The twist forms' pairwise inner products as fields (zero for an
/// orthogonal family up to rational cancellation).
pub fn inner_products(red: &Reduction) -> Vec<ScalarField> {
    let t = &red.twists;
    let mut out = Vec::new();
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            out.push(inner(t[j].coeffs(), t[i].coeffs()));
        }
    }
    out
}
