//! Torsion classes `W₁..W₅` of the SU(3)-structures on `CP³` built from a
//! skew matrix `M`:
//!
//! ```text
//! Ω_M = ᾱ∧Ω̂/‖α‖²,  Ω̂ = ᾱ·ι_ξΩ₀,  ω_M = ω₀ − (i/‖α‖²) α∧ᾱ
//! dα = λΩ̂ + α∧η,   λ = 2Pf(M)/‖α‖²,  η = ᾱ·dα/‖α‖²
//! W₁ = (4/3)λ̄,  W₃ = Re η∧ω₀,  W₄ = −Re η,  W₅ = −2Re η
//! ```
//!
//! The sign of `W₅` is the one for which `dΩ = W₁ω² + W₂∧ω + W̄₅∧Ω` holds;
//! reports also carry the residual under the opposite sign.
//!
//! Everything is built as rational fields; the structure equations are
//! compared on tangent frames of `S⁷`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::{big_omega0, omega0, Form, TangentVector, C64, I};
use crate::field::{restricted_max_abs, restricted_residual, FormField, ScalarField};
use crate::report::{Entries, Entry, Provenance};
use crate::skew::SkewMatrix;
use crate::torus::{stream_rng, MomentLevel, TorusAction};
use crate::twist::alpha_from_skew;

/// Matrices with `|Pf(M)|` below this are rejected: `λ` and the `1/λ` term
/// in `W₂` degenerate.
pub const PFAFFIAN_FLOOR: f64 = 0.1;

/// `M*M = μI` within this (entrywise max) counts as LT.
pub const LT_MATRIX_TOL: f64 = 1e-12;

/// `max(‖W₃‖, ‖W₄‖, ‖W₅‖)` below this counts as LT.
pub const LT_TORSION_TOL: f64 = 1e-8;

fn real_part(f: &FormField) -> FormField {
    f.add(&f.conj()).scale(C64::new(0.5, 0.0))
}


/// The structure on `CP³` and its torsion, as fields on `C⁴`.
#[derive(Clone, Debug)]
pub struct TorsionData {
    pub matrix: SkewMatrix,
    pub alpha: FormField,
    /// `‖α‖²`.
    pub norm: ScalarField,
    pub omega_hat: FormField,
    pub big_omega: FormField,
    pub omega: FormField,
    pub lambda: ScalarField,
    pub eta: FormField,
    pub w1: ScalarField,
    /// The right-hand side of the defining relation for `W₂∧ω`.
    pub w2_wedge_omega: FormField,
    /// `(W₁/2)(ω + (3i/2‖α‖²) α∧ᾱ)`, equal to `W₂` in the LT case.
    pub w2_lt: FormField,
    pub w3: FormField,
    pub w4: FormField,
    pub w5: FormField,
}

/// `λ` and `η` of the decomposition `dα = λΩ̂ + α∧η`.
pub fn lambda_eta(m: &SkewMatrix) -> Result<(ScalarField, FormField)> {
    let t = torsion_classes(m)?;
    Ok((t.lambda, t.eta))
}

/// Builds all five classes from the closed-form expressions.
pub fn torsion_classes(m: &SkewMatrix) -> Result<TorsionData> {
    if m.n() != 4 {
        return Err(Error::DimensionMismatch(m.n(), 4));
    }
    let pf = m.pfaffian();
    if pf.norm() < PFAFFIAN_FLOOR {
        return Err(Error::Singular(format!("|Pf(M)| = {:.3e} below {PFAFFIAN_FLOOR}", pf.norm())));
    }
    let n = 4;
    let tf = alpha_from_skew(m);
    let alpha = tf.field();
    let norm = tf.norm_sq();
    let inv = norm.recip()?;
    let xi = TorusAction::diagonal(n).holomorphic_field(&[1.0]);
    let omega_hat = FormField::from_form(&big_omega0(n)).contract(&xi)?.dual_contract(&alpha.conj())?;
    let big_omega = alpha.conj().wedge(&omega_hat)?.mul_scalar(&inv);
    let aa = alpha.wedge(&alpha.conj())?;
    let w0 = FormField::from_form(&omega0(n));
    let omega = w0.sub(&aa.mul_scalar(&inv).scale(I));
    let lambda = inv.scale(2.0 * pf);
    let eta = alpha.d().dual_contract(&alpha.conj())?.mul_scalar(&inv);
    let w1 = lambda.conj().scale(C64::new(4.0 / 3.0, 0.0));
    let re_eta = real_part(&eta);
    // 1/(λ‖α‖²) = 1/(2 Pf)
    let d_eta = eta.d();
    let w2_wedge_omega = omega
        .add(&aa.mul_scalar(&inv).scale(I * 1.5))
        .mul_scalar(&w1.scale(C64::new(0.5, 0.0)))
        .wedge(&omega)?
        .add(&aa.wedge(&w0)?.mul_scalar(&lambda.conj().mul(&inv)).scale(I))
        .add(&aa.wedge(&d_eta)?.scale(1.0 / (2.0 * pf)));
    let w2_lt = omega
        .add(&aa.mul_scalar(&inv).scale(I * 1.5))
        .mul_scalar(&w1.scale(C64::new(0.5, 0.0)));
    let w3 = re_eta.wedge(&w0)?;
    let w4 = re_eta.scale(C64::new(-1.0, 0.0));
    let w5 = re_eta.scale(C64::new(-2.0, 0.0));
    Ok(TorsionData {
        matrix: m.clone(),
        alpha,
        norm,
        omega_hat,
        big_omega,
        omega,
        lambda,
        eta,
        w1,
        w2_wedge_omega,
        w2_lt,
        w3,
        w4,
        w5,
    })
}

/// All evaluated pieces at one point.
struct Pointwise {
    frame: Vec<TangentVector>,
    big: Form,
    omega: Form,
    d_big: Form,
    d_omega: Form,
    w1: C64,
    w2w: Form,
    w3: Form,
    w4: Form,
    w5: Form,
}

struct Derived {
    d_big: FormField,
    d_omega: FormField,
}

fn pointwise(t: &TorsionData, d: &Derived, level: &MomentLevel, z: &[C64]) -> Result<Pointwise> {
    Ok(Pointwise {
        frame: level.tangent_frame(z)?,
        big: t.big_omega.eval_at(z)?,
        omega: t.omega.eval_at(z)?,
        d_big: d.d_big.eval_at(z)?,
        d_omega: d.d_omega.eval_at(z)?,
        w1: t.w1.eval_at(z)?,
        w2w: t.w2_wedge_omega.eval_at(z)?,
        w3: t.w3.eval_at(z)?,
        w4: t.w4.eval_at(z)?,
        w5: t.w5.eval_at(z)?,
    })
}

fn par_max<F>(pts: &[Vec<C64>], width: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(usize, &[C64]) -> Result<Vec<f64>> + Sync,
{
    let rows: Vec<Vec<f64>> = pts.par_iter().enumerate().map(|(i, z)| f(i, z)).collect::<Result<_>>()?;
    Ok((0..width)
        .map(|k| {
            rows.iter().map(|r| r[k]).fold(f64::NEG_INFINITY, |a: f64, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
        })
        .collect())
}

/// Structure equations, the `W₁` trace identity, primitivity, the `dα`
/// decomposition and `Re η = −d‖α‖²/‖α‖²`, all on `S⁷` frames.
pub fn verify_torsion_equations(
    t: &TorsionData,
    level: &MomentLevel,
    pts: &[Vec<C64>],
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<Entries> {
    let d = Derived {
        d_big: t.big_omega.d(),
        d_omega: t.omega.d(),
    };
    let d_alpha = t.alpha.d();
    let d_norm = FormField::scalar(t.norm.clone()).d();
    const NAMES: [&str; 11] = [
        "torsion: d omega = 3/2 Im(conj(W1) Omega) + W4^omega + W3",
        "torsion: d Omega = W1 omega^2 + W2^omega + conj(W5)^Omega",
        "torsion: dOmega^omega = W1 omega^3",
        "torsion: Omega^d omega = W1 omega^3",
        "torsion: W1 trace vs closed form",
        "torsion: W2 primitive",
        "torsion: W3 primitive",
        "torsion: d alpha = lambda Omega_hat + alpha^eta",
        "torsion: Re(eta) + d|a|^2/|a|^2 = 0",
        "torsion: min |lambda|",
        "torsion: dOmega equation with W5 = +2Re(eta)",
    ];
    let res = par_max(pts, NAMES.len(), |i, z| {
        let mut rng = stream_rng(seed, i as u64);
        let p = pointwise(t, &d, level, z)?;
        let f = &p.frame;
        let w2 = p.omega.wedge_power(2)?;
        let w3 = p.omega.wedge_power(3)?;
        let mut row = Vec::with_capacity(NAMES.len());

        let im = |x: &Form| (x - &x.conj()).scale(-I * 0.5);
        let rhs = &(&im(&p.big.scale(p.w1.conj() * 1.5)) + &p.w4.wedge(&p.omega)?) + &p.w3;
        row.push(restricted_residual(&p.d_omega, &rhs, f, trials, 1e-12 * p.d_omega.max_abs().max(1.0), &mut rng)?);
        let rhs = &(&w2.scale(p.w1) + &p.w2w) + &p.w5.conj().wedge(&p.big)?;
        row.push(restricted_residual(&p.d_big, &rhs, f, trials, 1e-12 * p.d_big.max_abs().max(1.0), &mut rng)?);
        let flipped = &(&w2.scale(p.w1) + &p.w2w) - &p.w5.conj().wedge(&p.big)?;
        let stated = restricted_residual(&p.d_big, &flipped, f, trials, 1e-12 * p.d_big.max_abs().max(1.0), &mut rng)?;
        let lhs = p.d_big.wedge(&p.omega)?;
        let rhs = w3.scale(p.w1);
        row.push(restricted_residual(&lhs, &rhs, f, trials, 1e-12 * rhs.max_abs(), &mut rng)?);
        let lhs = p.big.wedge(&p.d_omega)?;
        row.push(restricted_residual(&lhs, &rhs, f, trials, 1e-12 * rhs.max_abs(), &mut rng)?);

        // W₁ as the ratio (dΩ∧ω)/ω³ on one frame tuple with |ω³| large
        let lhs = p.d_big.wedge(&p.omega)?;
        let mut best = (0.0, C64::default());
        for _ in 0..trials.max(4) {
            let vs = crate::field::random_frame_tuple(f, 6, &mut rng);
            let den = crate::exterior::eval_on(&w3, &vs)?;
            if den.norm() > best.0 {
                best = (den.norm(), crate::exterior::eval_on(&lhs, &vs)? / den);
            }
        }
        row.push((best.1 - p.w1).norm() / p.w1.norm());

        let zero = Form::zero(z.len());
        let w2prim = p.w2w.wedge(&p.omega)?;
        row.push(restricted_residual(&w2prim, &zero, f, trials, p.w2w.max_abs() * p.omega.max_abs().powi(2), &mut rng)?);
        let w3prim = p.w3.wedge(&p.omega)?;
        row.push(restricted_residual(&w3prim, &zero, f, trials, (p.w3.max_abs() * p.omega.max_abs()).max(1e-300), &mut rng)?);

        let da = d_alpha.eval_at(z)?;
        let rhs = &t.omega_hat.eval_at(z)?.scale(t.lambda.eval_at(z)?) + &t.alpha.eval_at(z)?.wedge(&t.eta.eval_at(z)?)?;
        row.push((&da - &rhs).max_abs() / da.max_abs());

        let r = t.norm.eval_at(z)?.re;
        let rhs = d_norm.eval_at(z)?.scale_real(-1.0 / r);
        row.push(restricted_residual(&real_part(&t.eta).eval_at(z)?, &rhs, f, trials, rhs.max_abs(), &mut rng)?);

        // stored negated so the max over points is the min of |λ|
        row.push(-t.lambda.eval_at(z)?.norm());
        row.push(stated);
        Ok(row)
    })?;
    let prov = |m: &str| Provenance::new(pts.len(), trials, seed, m);
    let mut out = Entries::new();
    for (k, name) in NAMES.iter().enumerate().take(9) {
        let method = if k == 7 { "pointwise" } else { "frame tuples" };
        out.push(Entry::at_most(*name, res[k], tol, prov(method)));
    }
    out.push(Entry::at_least(NAMES[9], -res[9], 1e-12, prov("pointwise")));
    out.push(Entry::info(NAMES[10], res[10], prov("frame tuples")));
    out.push(Entry::equal(
        "torsion: W3, W4 real",
        if t.w3.conj().sub(&t.w3).is_zero() && t.w4.conj().sub(&t.w4).is_zero() { 0.0 } else { 1.0 },
        0.0,
        Provenance::exact("symbolic"),
    ));
    Ok(out)
}

/// Outcome of the LT test for one matrix.
#[derive(Clone, Debug)]
pub struct LtReport {
    pub mu: f64,
    pub deviation: f64,
    pub lt_by_matrix: bool,
    /// `max(‖W₃‖, ‖W₄‖, ‖W₅‖)` over frame tuples at the sample points.
    pub max_w345: f64,
    pub lt_by_torsion: bool,
    /// `dη + i|λ|²ω₀` on frames, relative to `|λ|²` (LT matrices only).
    pub d_eta: Option<f64>,
    /// `W₂` closed form vs the wedge relation on frames (LT matrices only).
    pub w2_closed_form: Option<f64>,
    /// `min ‖W₂‖` over samples (LT matrices only).
    pub w2_min: Option<f64>,
}

impl LtReport {
    pub fn consistent(&self) -> bool {
        self.lt_by_matrix == self.lt_by_torsion
    }

    pub fn entries(&self, label: &str, points: usize, trials: usize, seed: u64, tol: f64) -> Entries {
        let prov = || Provenance::new(points, trials, seed, "frame tuples");
        let mut out = Entries::new();
        out.push(Entry::info(format!("{label}: |M*M - mu I|"), self.deviation, Provenance::exact("matrix")));
        out.push(Entry::info(format!("{label}: max |W3|,|W4|,|W5|"), self.max_w345, prov()));
        out.push(Entry::equal(
            format!("{label}: LT by matrix iff LT by torsion"),
            if self.consistent() { 1.0 } else { 0.0 },
            1.0,
            prov(),
        ));
        if let Some(v) = self.d_eta {
            out.push(Entry::at_most(format!("{label}: d eta = -i|lambda|^2 omega0"), v, tol, prov()));
        }
        if let Some(v) = self.w2_closed_form {
            out.push(Entry::at_most(format!("{label}: W2 closed form"), v, tol.max(1e-8), prov()));
        }
        if let Some(v) = self.w2_min {
            out.push(Entry::at_least(format!("{label}: min |W2|"), v, 1e-12, prov()));
        }
        out
    }
}

/// Compares the matrix criterion `M*M = μI` with the sampled size of the
/// LT-obstructing classes; in the LT case also checks `dη` and `W₂`.
pub fn lt_check(t: &TorsionData, level: &MomentLevel, pts: &[Vec<C64>], trials: usize, seed: u64) -> Result<LtReport> {
    let (mu, deviation) = t.matrix.lt_deviation();
    let lt_by_matrix = deviation <= LT_MATRIX_TOL * mu.max(1.0);
    let d_eta = t.eta.d();
    let lam2 = t.lambda.mul(&t.lambda.conj());
    let w0 = omega0(4);
    let res = par_max(pts, 4, |i, z| {
        let mut rng = stream_rng(seed, i as u64);
        let f = level.tangent_frame(z)?;
        let mut row = vec![0.0f64; 4];
        for w in [&t.w3, &t.w4, &t.w5] {
            row[0] = row[0].max(restricted_max_abs(&w.eval_at(z)?, &f, trials, &mut rng)?);
        }
        if lt_by_matrix {
            let l2 = lam2.eval_at(z)?;
            let lhs = &d_eta.eval_at(z)? + &w0.scale(I * l2);
            row[1] = restricted_max_abs(&lhs, &f, trials, &mut rng)? / l2.norm();
            let omega = t.omega.eval_at(z)?;
            let lhs = t.w2_lt.eval_at(z)?.wedge(&omega)?;
            let rhs = t.w2_wedge_omega.eval_at(z)?;
            row[2] = restricted_residual(&lhs, &rhs, &f, trials, 1e-12 * rhs.max_abs(), &mut rng)?;
            row[3] = -restricted_max_abs(&t.w2_lt.eval_at(z)?, &f, trials, &mut rng)?;
        }
        Ok(row)
    })?;
    let max_w345 = res[0];
    Ok(LtReport {
        mu,
        deviation,
        lt_by_matrix,
        max_w345,
        lt_by_torsion: max_w345 < LT_TORSION_TOL,
        d_eta: lt_by_matrix.then_some(res[1]),
        w2_closed_form: lt_by_matrix.then_some(res[2]),
        w2_min: lt_by_matrix.then_some(-res[3]),
    })
}

/// `dα∧dα − 8Pf(M)Ω₀` as a symbolic form: zero coefficientwise when the
/// identity cancels exactly.
pub fn pfaffian_identity(m: &SkewMatrix) -> Result<FormField> {
    if m.n() != 4 {
        return Err(Error::DimensionMismatch(m.n(), 4));
    }
    let da = alpha_from_skew(m).field().d();
    let lhs = da.wedge(&da)?;
    let rhs = FormField::from_form(&big_omega0(4)).scale(m.pfaffian() * 8.0);
    Ok(lhs.sub(&rhs))
}
