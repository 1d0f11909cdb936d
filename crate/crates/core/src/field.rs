//! Form-valued rational functions of `(z, z̄)` with exact Wirtinger calculus.
//!
//! A [`ScalarField`] is a polynomial numerator over a *factored* denominator
//! `Π f_k^{e_k}`. Factors are shared through `Arc` and identified by content,
//! so the common case — many coefficients over powers of `‖α‖²` — never
//! multiplies out the denominator and never needs a gcd.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::exterior::{eval_on, Form, MultiIndex, TangentVector, C64};
use crate::poly::{Polynomial, PowerTable};

#[derive(Clone, Debug)]
pub struct ScalarField {
    num: Polynomial,
    den: Vec<(Arc<Polynomial>, u32)>,
}

fn factor_cmp(a: &Arc<Polynomial>, b: &Arc<Polynomial>) -> Ordering {
    if Arc::ptr_eq(a, b) {
        Ordering::Equal
    } else {
        a.content_cmp(b)
    }
}

impl ScalarField {
    pub fn zero(dim: usize) -> Self {
        Self::from_poly(Polynomial::zero(2 * dim))
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, C64::new(1.0, 0.0))
    }

    pub fn constant(dim: usize, c: C64) -> Self {
        Self::from_poly(Polynomial::constant(2 * dim, c))
    }

    pub fn z(dim: usize, j: usize) -> Self {
        Self::from_poly(Polynomial::z(dim, j))
    }

    pub fn zbar(dim: usize, j: usize) -> Self {
        Self::from_poly(Polynomial::zbar(dim, j))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        Self {
            num: p,
            den: Vec::new(),
        }
    }

    /// `1 / p^e`, keeping `p` as a single denominator factor.
    pub fn inverse_power(p: Arc<Polynomial>, e: u32) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::Pole);
        }
        let nvars = p.nvars();
        if let Some(c) = p.as_constant() {
            return Ok(Self::from_poly(Polynomial::constant(nvars, c.powi(-(e as i32)))));
        }
        Ok(Self {
            num: Polynomial::constant(nvars, C64::new(1.0, 0.0)),
            den: if e == 0 { vec![] } else { vec![(p, e)] },
        })
    }

    pub fn dim(&self) -> usize {
        self.num.nvars() / 2
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &[(Arc<Polynomial>, u32)] {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    /// Exact symbolic zero (numerator cancelled completely).
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<C64> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else if self.num.is_zero() {
            Some(C64::default())
        } else {
            None
        }
    }

    pub fn max_exponent(&self) -> usize {
        self.den
            .iter()
            .map(|(f, _)| f.max_exponent())
            .chain(std::iter::once(self.num.max_exponent()))
            .max()
            .unwrap_or(0)
    }

    fn same_den(&self, other: &Self) -> bool {
        self.den.len() == other.den.len()
            && self
                .den
                .iter()
                .zip(&other.den)
                .all(|(a, b)| a.1 == b.1 && factor_cmp(&a.0, &b.0) == Ordering::Equal)
    }

    /// Merges the two denominators, returning the combined list and the
    /// per-side multipliers `Π f^(E - e)` that bring each numerator over it.
    fn common_den(&self, other: &Self) -> (Vec<(Arc<Polynomial>, u32)>, Polynomial, Polynomial) {
        let nvars = self.num.nvars();
        let one = Polynomial::constant(nvars, C64::new(1.0, 0.0));
        let (mut ma, mut mb) = (one.clone(), one);
        let mut out = Vec::with_capacity(self.den.len() + other.den.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.den, &other.den);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => factor_cmp(&x.0, &y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    mb = mb.mul(&a[i].0.pow(a[i].1));
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    ma = ma.mul(&b[j].0.pow(b[j].1));
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let (ea, eb) = (a[i].1, b[j].1);
                    match ea.cmp(&eb) {
                        Ordering::Less => ma = ma.mul(&a[i].0.pow(eb - ea)),
                        Ordering::Greater => mb = mb.mul(&a[i].0.pow(ea - eb)),
                        Ordering::Equal => {}
                    }
                    out.push((a[i].0.clone(), ea.max(eb)));
                    i += 1;
                    j += 1;
                }
            }
        }
        (out, ma, mb)
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.scale(C64::new(sign, 0.0));
        }
        if self.same_den(other) {
            let num = if sign > 0.0 {
                self.num.add(&other.num)
            } else {
                self.num.sub(&other.num)
            };
            return Self {
                num,
                den: self.den.clone(),
            }
            .normalized();
        }
        let (den, ma, mb) = self.common_den(other);
        let a = self.num.mul(&ma);
        let b = other.num.mul(&mb);
        let num = if sign > 0.0 { a.add(&b) } else { a.sub(&b) };
        Self { num, den }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
        }
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    pub fn neg(&self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
        .normalized()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::from_poly(Polynomial::zero(self.num.nvars()));
        }
        let num = self.num.mul(&other.num);
        let mut den = Vec::with_capacity(self.den.len() + other.den.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.den, &other.den);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => factor_cmp(&x.0, &y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    den.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    den.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    den.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        Self { num, den }
    }

    /// Multiplicative inverse. The numerator becomes one new denominator factor.
    pub fn recip(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::Pole);
        }
        let nvars = self.num.nvars();
        let mut num = Polynomial::constant(nvars, C64::new(1.0, 0.0));
        for (f, e) in &self.den {
            num = num.mul(&f.pow(*e));
        }
        if let Some(c) = self.num.as_constant() {
            return Ok(Self::from_poly(num.scale(c.inv())));
        }
        Ok(Self::from_poly(num).mul(&Self::inverse_power(Arc::new(self.num.clone()), 1)?))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// Wirtinger partial derivative in variable `v` (`v < N`: `∂/∂z_v`,
    /// otherwise `∂/∂z̄_{v-N}`).
    pub fn partial(&self, v: usize) -> Self {
        let nvars = self.num.nvars();
        // (P / Π f^e)' = (P' Π_{k∈D} f_k − P Σ_{k∈D} e_k f_k' Π_{l∈D, l≠k} f_l) / (Π f^e · Π_{k∈D} f_k)
        // where D is the set of factors with nonzero derivative.
        let derivs: Vec<Option<Polynomial>> = self
            .den
            .iter()
            .map(|(f, _)| {
                let d = f.derivative(v);
                (!d.is_zero()).then_some(d)
            })
            .collect();
        let dnum = self.num.derivative(v);
        if derivs.iter().all(Option::is_none) {
            return Self {
                num: dnum,
                den: self.den.clone(),
            }
            .normalized();
        }
        let active: Vec<usize> = (0..self.den.len()).filter(|&k| derivs[k].is_some()).collect();
        let one = Polynomial::constant(nvars, C64::new(1.0, 0.0));
        let prod_except = |skip: Option<usize>| {
            active
                .iter()
                .filter(|&&k| Some(k) != skip)
                .fold(one.clone(), |acc, &k| acc.mul(&self.den[k].0))
        };
        let mut num = dnum.mul(&prod_except(None));
        for &k in &active {
            let term = self
                .num
                .mul(derivs[k].as_ref().unwrap())
                .mul(&prod_except(Some(k)))
                .scale(C64::new(self.den[k].1 as f64, 0.0));
            num = num.sub(&term);
        }
        let den = self
            .den
            .iter()
            .enumerate()
            .map(|(k, (f, e))| (f.clone(), if derivs[k].is_some() { e + 1 } else { *e }))
            .collect();
        Self { num, den }.normalized()
    }

    pub fn d_dz(&self, j: usize) -> Self {
        self.partial(j)
    }

    pub fn d_dzbar(&self, j: usize) -> Self {
        self.partial(self.dim() + j)
    }

    pub fn conj(&self) -> Self {
        let mut den: Vec<_> = self
            .den
            .iter()
            .map(|(f, e)| {
                let c = f.conj();
                // self-conjugate factors keep their identity (and sharing)
                if c == **f {
                    (f.clone(), *e)
                } else {
                    (Arc::new(c), *e)
                }
            })
            .collect();
        den.sort_by(|a, b| factor_cmp(&a.0, &b.0));
        Self {
            num: self.num.conj(),
            den,
        }
    }

    /// `(f + conj f)/2`, exactly self-conjugate. When every denominator
    /// factor is already self-conjugate only the numerator is symmetrized.
    pub fn real_part(&self) -> Self {
        let self_conj = self.den.iter().all(|(f, _)| f.conj() == **f);
        if self_conj {
            Self {
                num: self.num.real_part(),
                den: self.den.clone(),
            }
            .normalized()
        } else {
            self.add(&self.conj()).scale(C64::new(0.5, 0.0))
        }
    }

    pub fn eval(&self, table: &PowerTable) -> Result<C64> {
        let mut d = C64::new(1.0, 0.0);
        for (f, e) in &self.den {
            let v = f.eval(table);
            if v == C64::default() || !v.is_finite() {
                return Err(Error::Pole);
            }
            d *= v.powi(*e as i32);
        }
        let out = self.num.eval(table) / d;
        if !out.is_finite() {
            return Err(Error::Pole);
        }
        Ok(out)
    }

    pub fn eval_at(&self, z: &[C64]) -> Result<C64> {
        self.eval(&PowerTable::new(z, self.max_exponent()))
    }

    /// Size of the symbolic numerator (largest coefficient modulus).
    pub fn max_coeff(&self) -> f64 {
        self.num.max_abs_coeff()
    }
}

/// `Σ_j |z_j|²`-type Hermitian square `Σ_j p_j conj(p_j)` packed as one
/// exactly self-conjugate denominator factor.
pub fn hermitian_factor(ps: &[ScalarField]) -> Result<Arc<Polynomial>> {
    let mut acc: Option<Polynomial> = None;
    for p in ps {
        if !p.is_polynomial() {
            return Err(Error::Precondition("hermitian factor of a non-polynomial".into()));
        }
        let t = p.num.mul(&p.num.conj());
        acc = Some(match acc {
            Some(a) => a.add(&t),
            None => t,
        });
    }
    let p = acc.ok_or(Error::Precondition("empty factor".into()))?;
    Ok(Arc::new(p.real_part()))
}

/// A form-valued rational field.
#[derive(Clone, Debug)]
pub struct FormField {
    dim: usize,
    terms: BTreeMap<MultiIndex, ScalarField>,
}

impl FormField {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(f: ScalarField) -> Self {
        Self::monomial(MultiIndex::EMPTY, f)
    }

    pub fn monomial(idx: MultiIndex, f: ScalarField) -> Self {
        let mut out = Self::zero(f.dim());
        out.add_term(idx, f);
        out
    }

    /// Constant-coefficient field from a pointwise form.
    pub fn from_form(form: &Form) -> Self {
        let dim = form.dim();
        let mut out = Self::zero(dim);
        for (&idx, &c) in form.iter() {
            out.add_term(idx, ScalarField::constant(dim, c));
        }
        out
    }

    /// `Σ_j a_j dz_j`.
    pub fn one_form(coeffs: &[ScalarField]) -> Self {
        let dim = coeffs.len();
        let mut out = Self::zero(dim);
        for (j, c) in coeffs.iter().enumerate() {
            out.add_term(MultiIndex::dz(j), c.clone());
        }
        out
    }

    /// `Σ_j b_j dz̄_j`.
    pub fn anti_one_form(coeffs: &[ScalarField]) -> Self {
        let dim = coeffs.len();
        let mut out = Self::zero(dim);
        for (j, c) in coeffs.iter().enumerate() {
            out.add_term(MultiIndex::dzbar(j), c.clone());
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, ScalarField> {
        &self.terms
    }

    pub fn coeff(&self, idx: MultiIndex) -> Option<&ScalarField> {
        self.terms.get(&idx)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact symbolic zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, idx: MultiIndex, f: ScalarField) {
        if f.is_zero() {
            return;
        }
        match self.terms.remove(&idx) {
            Some(old) => {
                let s = old.add(&f);
                if !s.is_zero() {
                    self.terms.insert(idx, s);
                }
            }
            None => {
                self.terms.insert(idx, f);
            }
        }
    }

    pub fn grade(&self) -> Option<usize> {
        let mut gs = self.terms.keys().map(|k| k.grade());
        match gs.next() {
            None => Some(0),
            Some(g) => gs.all(|h| h == g).then_some(g),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, v) in &other.terms {
            out.add_term(k, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, v) in &other.terms {
            out.add_term(k, v.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero(self.dim);
        for (&k, v) in &self.terms {
            out.add_term(k, v.scale(c));
        }
        out
    }

    pub fn mul_scalar(&self, f: &ScalarField) -> Self {
        let mut out = Self::zero(self.dim);
        for (&k, v) in &self.terms {
            out.add_term(k, v.mul(f));
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = Self::zero(self.dim);
        for (&a, fa) in &self.terms {
            for (&b, fb) in &other.terms {
                if let Some((idx, neg)) = a.wedge(b) {
                    let p = fa.mul(fb);
                    out.add_term(idx, if neg { p.neg() } else { p });
                }
            }
        }
        Ok(out)
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (&k, v) in &self.terms {
            let (idx, neg) = k.conj();
            let c = v.conj();
            out.add_term(idx, if neg { c.neg() } else { c });
        }
        out
    }

    pub fn type_component(&self, p: usize, q: usize) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.bidegree() == (p, q))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Interior product with a vector field.
    pub fn contract(&self, v: &VectorFieldExpr) -> Result<Self> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch(v.dim(), self.dim));
        }
        let mut out = Self::zero(self.dim);
        for (&idx, c) in &self.terms {
            for (pos, (anti, j)) in idx.factors().enumerate() {
                let pairing = if anti { &v.anti[j] } else { &v.holo[j] };
                if pairing.is_zero() {
                    continue;
                }
                let rest = if anti {
                    MultiIndex::from_masks(idx.holo_mask(), idx.anti_mask() & !(1 << j))
                } else {
                    MultiIndex::from_masks(idx.holo_mask() & !(1 << j), idx.anti_mask())
                };
                let t = c.mul(pairing);
                out.add_term(rest, if pos % 2 == 1 { t.neg() } else { t });
            }
        }
        Ok(out)
    }

    /// `a·self` for a pure-type 1-form field `a`.
    pub fn dual_contract(&self, a: &FormField) -> Result<Self> {
        self.contract(&a.metric_dual()?)
    }

    /// Metric dual of a pure-type 1-form field.
    pub fn metric_dual(&self) -> Result<VectorFieldExpr> {
        let mut v = VectorFieldExpr::zero(self.dim);
        let (mut holo, mut anti) = (false, false);
        for (&idx, c) in &self.terms {
            match idx.bidegree() {
                (1, 0) => {
                    holo = true;
                    v.anti[idx.holo_mask().trailing_zeros() as usize] = c.clone();
                }
                (0, 1) => {
                    anti = true;
                    v.holo[idx.anti_mask().trailing_zeros() as usize] = c.clone();
                }
                _ => return Err(Error::MixedType),
            }
        }
        if holo && anti {
            return Err(Error::MixedType);
        }
        Ok(v)
    }

    /// Coefficientwise partial derivative.
    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (&k, v) in &self.terms {
            out.add_term(k, v.partial(var));
        }
        out
    }

    /// Exterior derivative `Σ_j dz_j∧∂_jΦ + dz̄_j∧∂̄_jΦ`.
    pub fn d(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zero(n);
        for (&idx, f) in &self.terms {
            for var in 0..2 * n {
                let df = f.partial(var);
                if df.is_zero() {
                    continue;
                }
                let basis = if var < n {
                    MultiIndex::dz(var)
                } else {
                    MultiIndex::dzbar(var - n)
                };
                if let Some((k, neg)) = basis.wedge(idx) {
                    out.add_term(k, if neg { df.neg() } else { df });
                }
            }
        }
        out
    }

    /// Cartan formula `L_V = ι_V d + d ι_V`.
    pub fn lie_derivative(&self, v: &VectorFieldExpr) -> Result<Self> {
        Ok(self.d().contract(v)?.add(&self.contract(v)?.d()))
    }

    pub fn max_exponent(&self) -> usize {
        self.terms.values().map(ScalarField::max_exponent).max().unwrap_or(0)
    }

    pub fn eval(&self, table: &PowerTable) -> Result<Form> {
        let terms = self
            .terms
            .iter()
            .map(|(&k, v)| Ok((k, v.eval(table)?)))
            .collect::<Result<Vec<_>>>()?;
        Form::from_terms(self.dim, terms)
    }

    pub fn eval_at(&self, z: &[C64]) -> Result<Form> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch(z.len(), self.dim));
        }
        self.eval(&PowerTable::new(z, self.max_exponent()))
    }

    /// Largest numerator coefficient over all terms (0 for the exact zero field).
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(ScalarField::max_coeff).fold(0.0, f64::max)
    }
}

/// A vector field `Σ a_j ∂_j + b_j ∂̄_j` with rational coefficients.
#[derive(Clone, Debug)]
pub struct VectorFieldExpr {
    pub holo: Vec<ScalarField>,
    pub anti: Vec<ScalarField>,
}

impl VectorFieldExpr {
    pub fn zero(dim: usize) -> Self {
        Self {
            holo: vec![ScalarField::zero(dim); dim],
            anti: vec![ScalarField::zero(dim); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.holo.len()
    }

    pub fn conj(&self) -> Self {
        Self {
            holo: self.anti.iter().map(ScalarField::conj).collect(),
            anti: self.holo.iter().map(ScalarField::conj).collect(),
        }
    }

    pub fn holomorphic_part(&self) -> Self {
        Self {
            holo: self.holo.clone(),
            anti: vec![ScalarField::zero(self.dim()); self.dim()],
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            holo: self.holo.iter().map(|f| f.scale(c)).collect(),
            anti: self.anti.iter().map(|f| f.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            holo: self.holo.iter().zip(&other.holo).map(|(a, b)| a.add(b)).collect(),
            anti: self.anti.iter().zip(&other.anti).map(|(a, b)| a.add(b)).collect(),
        }
    }

    /// Symbolic reality: every `∂̄_j` coefficient is the conjugate of the `∂_j` one.
    pub fn is_real(&self) -> bool {
        self.holo
            .iter()
            .zip(&self.anti)
            .all(|(h, a)| h.conj().sub(a).is_zero())
    }

    /// Directional derivative `V(f)`.
    pub fn apply(&self, f: &ScalarField) -> ScalarField {
        let n = self.dim();
        let mut out = ScalarField::zero(n);
        for j in 0..n {
            if !self.holo[j].is_zero() {
                out = out.add(&self.holo[j].mul(&f.partial(j)));
            }
            if !self.anti[j].is_zero() {
                out = out.add(&self.anti[j].mul(&f.partial(n + j)));
            }
        }
        out
    }

    /// Lie bracket `[V, W]`.
    pub fn bracket(&self, other: &Self) -> Self {
        let comp = |a: &ScalarField, b: &ScalarField| self.apply(b).sub(&other.apply(a));
        Self {
            holo: self.holo.iter().zip(&other.holo).map(|(a, b)| comp(a, b)).collect(),
            anti: self.anti.iter().zip(&other.anti).map(|(a, b)| comp(a, b)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.holo.iter().chain(&self.anti).all(ScalarField::is_zero)
    }

    pub fn eval_at(&self, z: &[C64]) -> Result<TangentVector> {
        let max = self
            .holo
            .iter()
            .chain(&self.anti)
            .map(ScalarField::max_exponent)
            .max()
            .unwrap_or(0);
        let t = PowerTable::new(z, max);
        let holo = self.holo.iter().map(|f| f.eval(&t)).collect::<Result<Vec<_>>>()?;
        let anti = self.anti.iter().map(|f| f.eval(&t)).collect::<Result<Vec<_>>>()?;
        TangentVector::new(holo, anti)
    }
}

/// Compares the symbolic Wirtinger derivatives of `f` at `z` with central
/// differences in the real coordinates `x_j, y_j`, using
/// `∂/∂z = ½(∂_x − i∂_y)` and `∂/∂z̄ = ½(∂_x + i∂_y)`.
///
/// Returns the largest deviation relative to `max(1, |derivative|)`.
pub fn finite_difference_check(f: &FormField, z: &[C64], h: f64) -> Result<f64> {
    let n = f.dim();
    if z.len() != n {
        return Err(Error::DimensionMismatch(z.len(), n));
    }
    let at = |w: &[C64]| f.eval_at(w);
    let diff = |j: usize, dir: C64| -> Result<Form> {
        let mut p = z.to_vec();
        let mut m = z.to_vec();
        p[j] += dir * h;
        m[j] -= dir * h;
        Ok((&at(&p)? - &at(&m)?).scale_real(0.5 / h))
    };
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let dx = diff(j, C64::new(1.0, 0.0))?;
        let dy = diff(j, C64::new(0.0, 1.0))?;
        let i_dy = dy.scale(C64::new(0.0, 1.0));
        let num_dz = (&dx - &i_dy).scale_real(0.5);
        let num_dzbar = (&dx + &i_dy).scale_real(0.5);
        let sym_dz = f.partial(j).eval_at(z)?;
        let sym_dzbar = f.partial(n + j).eval_at(z)?;
        for (num, sym) in [(num_dz, sym_dz), (num_dzbar, sym_dzbar)] {
            let dev = (&num - &sym).max_abs();
            worst = worst.max(dev / sym.max_abs().max(1.0));
        }
    }
    Ok(worst)
}

/// Relative residual with a magnitude floor, so that comparing two
/// near-zero quantities does not divide by zero.
pub fn relative_residual(a: C64, b: C64, floor: f64) -> f64 {
    let scale = a.norm().max(b.norm()).max(floor);
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Random real combinations `Σ c_i f_i` of frame vectors, unit length.
pub fn random_frame_tuple<R: Rng + ?Sized>(
    frame: &[TangentVector],
    k: usize,
    rng: &mut R,
) -> Vec<TangentVector> {
    (0..k)
        .map(|_| {
            let coeffs: Vec<f64> = frame.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            frame
                .iter()
                .zip(&coeffs)
                .fold(TangentVector::zero(frame[0].dim()), |acc, (v, &c)| {
                    acc.add(&v.scale(C64::new(c / norm, 0.0)))
                })
        })
        .collect()
}

/// Pointwise restricted comparison of two forms of equal grade on random
/// tuples from the span of `frame`. Returns the largest relative residual.
///
/// `floor` is the magnitude below which both sides count as zero; callers
/// pass the natural scale of the quantities being compared.
pub fn restricted_residual<R: Rng + ?Sized>(
    a: &Form,
    b: &Form,
    frame: &[TangentVector],
    trials: usize,
    floor: f64,
    rng: &mut R,
) -> Result<f64> {
    let ga = a.grade().ok_or(Error::Inhomogeneous)?;
    let gb = b.grade().ok_or(Error::Inhomogeneous)?;
    // the zero form reports grade 0; it compares against anything
    let k = match (a.is_zero(), b.is_zero()) {
        (true, true) => return Ok(0.0),
        (true, false) => gb,
        (false, true) => ga,
        _ if ga != gb => return Err(Error::GradeMismatch(ga, gb)),
        _ => ga,
    };
    if frame.is_empty() && k > 0 {
        return Err(Error::DegenerateFrame("empty frame".into()));
    }
    if frame.len() < k {
        // every k-form vanishes on a space of dimension < k
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let vs = random_frame_tuple(frame, k, rng);
        let va = if a.is_zero() { C64::default() } else { eval_on(a, &vs)? };
        let vb = if b.is_zero() { C64::default() } else { eval_on(b, &vs)? };
        worst = worst.max(relative_residual(va, vb, floor));
    }
    Ok(worst)
}

/// Largest `|a(v_1, …, v_k)|` over random unit tuples from the span of `frame`.
pub fn restricted_max_abs<R: Rng + ?Sized>(a: &Form, frame: &[TangentVector], trials: usize, rng: &mut R) -> Result<f64> {
    if a.is_zero() {
        return Ok(0.0);
    }
    let k = a.grade().ok_or(Error::Inhomogeneous)?;
    if frame.len() < k {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        worst = worst.max(eval_on(a, &random_frame_tuple(frame, k, rng))?.norm());
    }
    Ok(worst)
}

/// [`restricted_residual`] for symbolic fields at one point.
pub fn restricted_equal<R: Rng + ?Sized>(
    a: &FormField,
    b: &FormField,
    z: &[C64],
    frame: &[TangentVector],
    trials: usize,
    floor: f64,
    rng: &mut R,
) -> Result<f64> {
    restricted_residual(&a.eval_at(z)?, &b.eval_at(z)?, frame, trials, floor, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{omega0, I};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn sphere_norm(dim: usize) -> Arc<Polynomial> {
        let zs: Vec<_> = (0..dim).map(|j| ScalarField::z(dim, j)).collect();
        hermitian_factor(&zs).unwrap()
    }

    #[test]
    fn d_of_simple_fields() {
        // d(z1 dz2) = dz1∧dz2
        let f = FormField::monomial(MultiIndex::dz(1), ScalarField::z(2, 0));
        let df = f.d();
        assert_eq!(df.len(), 1);
        let v = df.eval_at(&[c(0.3), c(0.7)]).unwrap();
        assert_eq!(v.coeff(MultiIndex::new(&[0, 1], &[]).unwrap()), c(1.0));
        assert!(FormField::from_form(&omega0(3)).d().is_zero());
    }

    #[test]
    fn dd_vanishes_on_rational_field() {
        let dim = 2;
        let inv = ScalarField::inverse_power(sphere_norm(dim), 1).unwrap();
        let f = FormField::monomial(
            MultiIndex::dz(0),
            ScalarField::zbar(dim, 1).mul(&ScalarField::z(dim, 0)).mul(&inv),
        );
        assert!(f.d().d().is_zero());
    }

    #[test]
    fn quotient_rule_against_finite_differences() {
        let dim = 2;
        let inv = ScalarField::inverse_power(sphere_norm(dim), 2).unwrap();
        let f = FormField::monomial(
            MultiIndex::new(&[1], &[0]).unwrap(),
            ScalarField::z(dim, 0).mul(&ScalarField::z(dim, 0)).mul(&inv),
        );
        let z = [C64::new(0.4, -0.3), C64::new(0.2, 0.9)];
        assert!(finite_difference_check(&f, &z, 1e-5).unwrap() < 1e-8);
    }

    #[test]
    fn finite_difference_on_polynomial_field() {
        // z1² dz2 at (1, 1)
        let f = FormField::monomial(MultiIndex::dz(1), ScalarField::z(2, 0).mul(&ScalarField::z(2, 0)));
        assert!(finite_difference_check(&f, &[c(1.0), c(1.0)], 1e-5).unwrap() < 1e-8);
        let k = FormField::from_form(&omega0(2));
        assert!(finite_difference_check(&k, &[c(1.0), c(1.0)], 1e-5).unwrap() < 1e-14);
    }

    #[test]
    fn pole_is_an_error() {
        let inv = ScalarField::inverse_power(sphere_norm(2), 1).unwrap();
        assert!(matches!(inv.eval_at(&[c(0.0), c(0.0)]), Err(Error::Pole)));
        assert!(matches!(ScalarField::zero(2).recip(), Err(Error::Pole)));
    }

    #[test]
    fn shared_denominators_add_without_growth() {
        let n = sphere_norm(2);
        let a = ScalarField::z(2, 0).mul(&ScalarField::inverse_power(n.clone(), 1).unwrap());
        let b = ScalarField::z(2, 1).mul(&ScalarField::inverse_power(n, 1).unwrap());
        let s = a.add(&b);
        assert_eq!(s.denominator().len(), 1);
        assert_eq!(s.denominator()[0].1, 1);
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn recip_and_div_roundtrip() {
        let p = ScalarField::z(2, 0).add(&ScalarField::constant(2, c(2.0)));
        let q = p.div(&p).unwrap();
        let z = [C64::new(0.3, 0.1), c(0.5)];
        assert!((q.eval_at(&z).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn conj_commutes_with_d() {
        let dim = 2;
        let inv = ScalarField::inverse_power(sphere_norm(dim), 1).unwrap();
        let f = FormField::monomial(
            MultiIndex::dz(1),
            ScalarField::z(dim, 0).scale(C64::new(1.0, 2.0)).mul(&inv),
        );
        let lhs = f.d().conj();
        let rhs = f.conj().d();
        let z = [C64::new(0.4, 0.1), C64::new(-0.3, 0.6)];
        let diff = &lhs.eval_at(&z).unwrap() - &rhs.eval_at(&z).unwrap();
        assert!(diff.max_abs() < 1e-14);
        assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn lie_derivative_of_volume_form() {
        // V = Σ i z_j ∂_j − i z̄_j ∂̄_j on C^3: L_V Ω₀ = 3i Ω₀
        let dim = 3;
        let mut v = VectorFieldExpr::zero(dim);
        for j in 0..dim {
            v.holo[j] = ScalarField::z(dim, j).scale(I);
            v.anti[j] = ScalarField::zbar(dim, j).scale(-I);
        }
        assert!(v.is_real());
        let vol = FormField::from_form(&crate::exterior::big_omega0(dim));
        let l = vol.lie_derivative(&v).unwrap();
        assert!(l.sub(&vol.scale(I * 3.0)).is_zero());
        assert!(v.bracket(&v).is_zero());
    }

    #[test]
    fn restricted_comparison_ignores_normal_directions() {
        // on the sphere in C^2, d|z|² vanishes on tangent vectors
        let dim = 2;
        let r = ScalarField::from_poly((*sphere_norm(dim)).clone());
        let dr = FormField::scalar(r).d();
        let z = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        // tangent frame of S³ at z: iz, and the two vectors orthogonal to z, iz
        let frame = vec![
            TangentVector::from_real(&[0.0, -0.8, 0.6, 0.0]),
            TangentVector::from_real(&[-0.8, 0.0, 0.0, 0.6]),
            TangentVector::from_real(&[0.0, 0.6, 0.8, 0.0]),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let res = restricted_equal(&dr, &FormField::zero(dim), &z, &frame, 20, 1.0, &mut rng).unwrap();
        assert!(res < 1e-12, "{res}");
    }
}
