//! Pointwise complex exterior algebra over `C^N`.
//!
//! A [`Form`] is a sparse map from basis monomials `dz_I ∧ dz̄_J` to complex
//! coefficients. Basis monomials are stored as a pair of bitmasks, holomorphic
//! indices first and antiholomorphic indices after, each in ascending order;
//! the sign of any reordering is absorbed into the coefficient.
//!
//! Indices are zero based: bit `j` stands for `z_{j+1}`.
//!
//! The Hermitian metric is the flat one with `‖dz_j‖² = 1`. The metric dual
//! of `α = Σ a_j dz_j` is the `(0,1)` vector `Σ a_j ∂̄_j`, which gives
//! `ᾱ·α = Σ |a_j|²`, `α·ω₀ = −(i/2)α` and `ᾱ·ω₀ = (i/2)ᾱ`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// The imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest complex dimension representable by a [`MultiIndex`].
pub const MAX_DIM: usize = 64;

/// A basis monomial `dz_I ∧ dz̄_J`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex {
    holo: u64,
    anti: u64,
}

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex { holo: 0, anti: 0 };

    /// Builds a multi-index from strictly increasing index lists.
    pub fn new(holo: &[usize], anti: &[usize]) -> Result<Self> {
        Ok(Self {
            holo: mask_from(holo)?,
            anti: mask_from(anti)?,
        })
    }

    pub fn from_masks(holo: u64, anti: u64) -> Self {
        Self { holo, anti }
    }

    pub fn dz(j: usize) -> Self {
        Self { holo: 1 << j, anti: 0 }
    }

    pub fn dzbar(j: usize) -> Self {
        Self { holo: 0, anti: 1 << j }
    }

    pub fn holo_mask(&self) -> u64 {
        self.holo
    }

    pub fn anti_mask(&self) -> u64 {
        self.anti
    }

    pub fn holo(&self) -> Vec<usize> {
        bits(self.holo).collect()
    }

    pub fn anti(&self) -> Vec<usize> {
        bits(self.anti).collect()
    }

    /// `(p, q)` = number of `dz` and `dz̄` factors.
    pub fn bidegree(&self) -> (usize, usize) {
        (self.holo.count_ones() as usize, self.anti.count_ones() as usize)
    }

    pub fn grade(&self) -> usize {
        (self.holo.count_ones() + self.anti.count_ones()) as usize
    }

    /// Smallest dimension this index fits in.
    pub fn min_dim(&self) -> usize {
        let m = self.holo | self.anti;
        (64 - m.leading_zeros()) as usize
    }

    /// Product of two basis monomials. Returns `None` when a factor repeats,
    /// otherwise the canonical index and whether the sign flipped.
    pub fn wedge(self, other: MultiIndex) -> Option<(MultiIndex, bool)> {
        if self.holo & other.holo != 0 || self.anti & other.anti != 0 {
            return None;
        }
        // dz_Ia dz̄_Ja dz_Ib dz̄_Jb -> dz_(Ia∪Ib) dz̄_(Ja∪Jb)
        let mut parity = self.anti.count_ones() * other.holo.count_ones();
        parity += inversions(self.holo, other.holo);
        parity += inversions(self.anti, other.anti);
        Some((
            MultiIndex {
                holo: self.holo | other.holo,
                anti: self.anti | other.anti,
            },
            parity % 2 == 1,
        ))
    }

    /// Complex conjugate `dz̄_I ∧ dz_J`, brought back to canonical order.
    pub fn conj(self) -> (MultiIndex, bool) {
        let parity = self.holo.count_ones() * self.anti.count_ones();
        (
            MultiIndex {
                holo: self.anti,
                anti: self.holo,
            },
            parity % 2 == 1,
        )
    }

    /// Factor list in canonical order: `(is_anti, index)`.
    pub(crate) fn factors(&self) -> impl Iterator<Item = (bool, usize)> + '_ {
        bits(self.holo)
            .map(|j| (false, j))
            .chain(bits(self.anti).map(|j| (true, j)))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.grade() == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (anti, j) in self.factors() {
            if !first {
                write!(f, "∧")?;
            }
            first = false;
            if anti {
                write!(f, "dz̄{}", j + 1)?;
            } else {
                write!(f, "dz{}", j + 1)?;
            }
        }
        Ok(())
    }
}

fn mask_from(idx: &[usize]) -> Result<u64> {
    let mut mask = 0u64;
    let mut prev: Option<usize> = None;
    for &j in idx {
        if j >= MAX_DIM {
            return Err(Error::InvalidIndex(format!("index {j} exceeds {MAX_DIM}")));
        }
        if let Some(p) = prev {
            if j <= p {
                return Err(Error::InvalidIndex(format!(
                    "indices must be strictly increasing: {idx:?}"
                )));
            }
        }
        prev = Some(j);
        mask |= 1 << j;
    }
    Ok(mask)
}

pub(crate) fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let j = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(j)
        }
    })
}

/// Number of pairs `(x ∈ a, y ∈ b)` with `x > y`.
fn inversions(a: u64, b: u64) -> u32 {
    let mut n = 0;
    for k in bits(b) {
        if k < 63 {
            n += (a >> (k + 1)).count_ones();
        }
    }
    n
}

/// A pointwise element of the complexified exterior algebra on `C^N`.
#[derive(Clone, PartialEq, Default)]
pub struct Form {
    dim: usize,
    terms: BTreeMap<MultiIndex, C64>,
}

impl Form {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(dim: usize, c: C64) -> Self {
        Self::monomial(dim, MultiIndex::EMPTY, c)
    }

    pub fn monomial(dim: usize, idx: MultiIndex, c: C64) -> Self {
        let mut f = Self::zero(dim);
        f.add_term(idx, c);
        f
    }

    pub fn dz(dim: usize, j: usize) -> Self {
        Self::monomial(dim, MultiIndex::dz(j), C64::new(1.0, 0.0))
    }

    pub fn dzbar(dim: usize, j: usize) -> Self {
        Self::monomial(dim, MultiIndex::dzbar(j), C64::new(1.0, 0.0))
    }

    /// `Σ c_j dz_j`.
    pub fn one_form(coeffs: &[C64]) -> Self {
        let mut f = Self::zero(coeffs.len());
        for (j, &c) in coeffs.iter().enumerate() {
            f.add_term(MultiIndex::dz(j), c);
        }
        f
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, C64)>) -> Result<Self> {
        let mut f = Self::zero(dim);
        for (idx, c) in terms {
            if idx.min_dim() > dim {
                return Err(Error::InvalidIndex(format!("{idx} does not fit in C^{dim}")));
            }
            f.add_term(idx, c);
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, C64> {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: MultiIndex) -> C64 {
        self.terms.get(&idx).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c` to the coefficient of `idx`, dropping exact zeros.
    pub(crate) fn add_term(&mut self, idx: MultiIndex, c: C64) {
        if c == C64::default() {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == C64::default() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Common degree of all terms, or `None` for mixed-grade forms.
    /// The zero form has grade `Some(0)`.
    pub fn grade(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(MultiIndex::grade);
        match it.next() {
            None => Some(0),
            Some(g) => it.all(|h| h == g).then_some(g),
        }
    }

    pub fn is_mixed_grade(&self) -> bool {
        self.grade().is_none()
    }

    pub fn scale(&self, c: C64) -> Form {
        let mut out = Form::zero(self.dim);
        for (&idx, &v) in &self.terms {
            out.add_term(idx, v * c);
        }
        out
    }

    pub fn scale_real(&self, c: f64) -> Form {
        self.scale(C64::new(c, 0.0))
    }

    pub fn conj(&self) -> Form {
        let mut out = Form::zero(self.dim);
        for (&idx, &v) in &self.terms {
            let (cidx, neg) = idx.conj();
            out.add_term(cidx, if neg { -v.conj() } else { v.conj() });
        }
        out
    }

    /// `(self + conj(self)) / 2`.
    pub fn real_part(&self) -> Form {
        (self + &self.conj()).scale_real(0.5)
    }

    pub fn wedge(&self, other: &Form) -> Result<Form> {
        check_dim(self.dim, other.dim)?;
        let mut acc: rustc_hash::FxHashMap<MultiIndex, C64> = Default::default();
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                if let Some((idx, neg)) = a.wedge(b) {
                    let p = ca * cb;
                    *acc.entry(idx).or_default() += if neg { -p } else { p };
                }
            }
        }
        let mut out = Form::zero(self.dim);
        for (idx, c) in acc {
            out.add_term(idx, c);
        }
        Ok(out)
    }

    /// `self ∧ self ∧ ⋯` (`k` factors); `k = 0` gives the constant 1.
    pub fn wedge_power(&self, k: usize) -> Result<Form> {
        let mut out = Form::scalar(self.dim, C64::new(1.0, 0.0));
        for _ in 0..k {
            out = out.wedge(self)?;
        }
        Ok(out)
    }

    pub fn type_component(&self, p: usize, q: usize) -> Form {
        let mut out = Form::zero(self.dim);
        for (&idx, &c) in &self.terms {
            if idx.bidegree() == (p, q) {
                out.add_term(idx, c);
            }
        }
        out
    }

    pub fn norm_l1(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)·{}", c.re, c.im, idx)?;
        }
        Ok(())
    }
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        assert_eq!(self.dim, rhs.dim, "form dimension mismatch");
        let mut out = self.clone();
        for (&idx, &c) in &rhs.terms {
            out.add_term(idx, c);
        }
        out
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        assert_eq!(self.dim, rhs.dim, "form dimension mismatch");
        let mut out = self.clone();
        for (&idx, &c) in &rhs.terms {
            out.add_term(idx, -c);
        }
        out
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul<C64> for &Form {
    type Output = Form;
    fn mul(self, c: C64) -> Form {
        self.scale(c)
    }
}

/// A complex tangent vector `Σ a_j ∂_j + b_j ∂̄_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub holo: Vec<C64>,
    pub anti: Vec<C64>,
}

impl TangentVector {
    pub fn new(holo: Vec<C64>, anti: Vec<C64>) -> Result<Self> {
        check_dim(holo.len(), anti.len())?;
        Ok(Self { holo, anti })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            holo: vec![C64::default(); dim],
            anti: vec![C64::default(); dim],
        }
    }

    pub fn d_dz(dim: usize, j: usize) -> Self {
        let mut v = Self::zero(dim);
        v.holo[j] = C64::new(1.0, 0.0);
        v
    }

    pub fn d_dzbar(dim: usize, j: usize) -> Self {
        let mut v = Self::zero(dim);
        v.anti[j] = C64::new(1.0, 0.0);
        v
    }

    /// Real vector `Σ x_j ∂_{x_j} + y_j ∂_{y_j}` from components
    /// `[x_1..x_N, y_1..y_N]`.
    pub fn from_real(re: &[f64]) -> Self {
        let n = re.len() / 2;
        let holo: Vec<C64> = (0..n).map(|j| C64::new(re[j], re[n + j])).collect();
        let anti = holo.iter().map(|c| c.conj()).collect();
        Self { holo, anti }
    }

    /// Real components `[x_1..x_N, y_1..y_N]` of the real part of the vector.
    pub fn real_components(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; 2 * n];
        for j in 0..n {
            let c = (self.holo[j] + self.anti[j].conj()) * 0.5;
            out[j] = c.re;
            out[n + j] = c.im;
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.holo.len()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.holo
            .iter()
            .zip(&self.anti)
            .all(|(h, a)| (h.conj() - a).norm() <= tol)
    }

    pub fn conj(&self) -> Self {
        Self {
            holo: self.anti.iter().map(|c| c.conj()).collect(),
            anti: self.holo.iter().map(|c| c.conj()).collect(),
        }
    }

    /// `(1,0)` part.
    pub fn holomorphic_part(&self) -> Self {
        Self {
            holo: self.holo.clone(),
            anti: vec![C64::default(); self.dim()],
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            holo: self.holo.iter().map(|x| x * c).collect(),
            anti: self.anti.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            holo: self.holo.iter().zip(&other.holo).map(|(a, b)| a + b).collect(),
            anti: self.anti.iter().zip(&other.anti).map(|(a, b)| a + b).collect(),
        }
    }

    /// Pairing with a single basis covector.
    fn pair(&self, anti: bool, j: usize) -> C64 {
        if anti {
            self.anti[j]
        } else {
            self.holo[j]
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.holo.iter().chain(&self.anti).map(|c| c.norm_sqr()).sum()
    }
}

fn check_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(a, b))
    }
}

pub fn wedge(a: &Form, b: &Form) -> Result<Form> {
    a.wedge(b)
}

/// Interior product `ι_v a`.
pub fn contract(v: &TangentVector, a: &Form) -> Result<Form> {
    check_dim(v.dim(), a.dim)?;
    let mut out = Form::zero(a.dim);
    for (&idx, &c) in &a.terms {
        for (pos, (anti, j)) in idx.factors().enumerate() {
            let pairing = v.pair(anti, j);
            if pairing == C64::default() {
                continue;
            }
            let rest = if anti {
                MultiIndex::from_masks(idx.holo, idx.anti & !(1 << j))
            } else {
                MultiIndex::from_masks(idx.holo & !(1 << j), idx.anti)
            };
            let v = c * pairing;
            out.add_term(rest, if pos % 2 == 1 { -v } else { v });
        }
    }
    Ok(out)
}

/// Metric dual of a pure-type 1-form: `Σ a_j dz_j ↦ Σ a_j ∂̄_j` and
/// `Σ b_j dz̄_j ↦ Σ b_j ∂_j`.
pub fn metric_dual(a: &Form) -> Result<TangentVector> {
    let mut v = TangentVector::zero(a.dim);
    let mut seen_holo = false;
    let mut seen_anti = false;
    for (&idx, &c) in &a.terms {
        match idx.bidegree() {
            (1, 0) => {
                seen_holo = true;
                v.anti[idx.holo.trailing_zeros() as usize] = c;
            }
            (0, 1) => {
                seen_anti = true;
                v.holo[idx.anti.trailing_zeros() as usize] = c;
            }
            _ => return Err(Error::MixedType),
        }
    }
    if seen_holo && seen_anti {
        return Err(Error::MixedType);
    }
    Ok(v)
}

/// `a·b`: contraction of `b` by the metric dual of the 1-form `a`.
pub fn dual_contract(a: &Form, b: &Form) -> Result<Form> {
    contract(&metric_dual(a)?, b)
}

/// `‖α‖² = ᾱ·α` for a pure-type 1-form.
pub fn norm_sq(a: &Form) -> Result<f64> {
    let s = dual_contract(&a.conj(), a)?;
    Ok(s.coeff(MultiIndex::EMPTY).re)
}

pub fn type_component(a: &Form, p: usize, q: usize) -> Form {
    a.type_component(p, q)
}

/// Full antisymmetric evaluation `a(v_1, …, v_k)`, normalized so that
/// `(dz_1∧dz_2)(∂_1, ∂_2) = 1`.
pub fn eval_on(a: &Form, vs: &[TangentVector]) -> Result<C64> {
    for v in vs {
        check_dim(v.dim(), a.dim)?;
    }
    let k = vs.len();
    let mut total = C64::default();
    let mut mat = vec![C64::default(); k * k];
    for (&idx, &c) in &a.terms {
        let g = idx.grade();
        if g != k {
            return Err(Error::Arity { grade: g, given: k });
        }
        for (row, (anti, j)) in idx.factors().enumerate() {
            for (col, v) in vs.iter().enumerate() {
                mat[row * k + col] = v.pair(anti, j);
            }
        }
        total += c * det(&mut mat, k);
    }
    Ok(total)
}

/// Determinant by Gaussian elimination with partial pivoting (destroys `m`).
pub(crate) fn det(m: &mut [C64], k: usize) -> C64 {
    let mut d = C64::new(1.0, 0.0);
    for col in 0..k {
        let mut piv = col;
        let mut best = m[col * k + col].norm();
        for r in col + 1..k {
            let v = m[r * k + col].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return C64::default();
        }
        if piv != col {
            for c in 0..k {
                m.swap(col * k + c, piv * k + c);
            }
            d = -d;
        }
        let p = m[col * k + col];
        d *= p;
        for r in col + 1..k {
            let f = m[r * k + col] / p;
            if f == C64::default() {
                continue;
            }
            for c in col + 1..k {
                let t = m[col * k + c];
                m[r * k + c] -= f * t;
            }
        }
    }
    d
}

/// Flat Kähler form `ω₀ = (i/2) Σ dz_j ∧ dz̄_j`.
pub fn omega0(dim: usize) -> Form {
    let mut f = Form::zero(dim);
    for j in 0..dim {
        f.add_term(MultiIndex::from_masks(1 << j, 1 << j), I * 0.5);
    }
    f
}

/// Holomorphic volume form `Ω₀ = dz_1 ∧ ⋯ ∧ dz_N`.
pub fn big_omega0(dim: usize) -> Form {
    let mask = if dim == 64 { u64::MAX } else { (1u64 << dim) - 1 };
    Form::monomial(dim, MultiIndex::from_masks(mask, 0), C64::new(1.0, 0.0))
}

/// `c_n = 2ⁿ/n! · (−i)^{n²}`, the constant in `Ω∧Ω̄ = c_n ωⁿ`.
pub fn su_constant(n: usize) -> C64 {
    let mut mag = 1.0;
    for k in 1..=n {
        mag *= 2.0 / k as f64;
    }
    let phase = match (n * n) % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    };
    phase * mag
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn wedge_basics() {
        let a = Form::dz(2, 0);
        assert!(a.wedge(&a).unwrap().is_zero());
        let b = Form::dz(2, 1);
        let ab = a.wedge(&b).unwrap();
        assert_eq!(ab.coeff(MultiIndex::new(&[0, 1], &[]).unwrap()), c(1.0, 0.0));
        let ba = b.wedge(&a).unwrap();
        assert_eq!(ba, -&ab);
    }

    #[test]
    fn wedge_factorizes_volume_form() {
        let tail = Form::dz(4, 1)
            .wedge(&Form::dz(4, 2))
            .unwrap()
            .wedge(&Form::dz(4, 3))
            .unwrap();
        assert_eq!(Form::dz(4, 0).wedge(&tail).unwrap(), big_omega0(4));
        // moving dz1 to the end costs three transpositions
        assert_eq!(tail.wedge(&Form::dz(4, 0)).unwrap(), -&big_omega0(4));
    }

    #[test]
    fn wedge_moves_holomorphic_past_antiholomorphic() {
        // dz̄1 ∧ dz2 = −dz2 ∧ dz̄1
        let f = Form::dzbar(2, 0).wedge(&Form::dz(2, 1)).unwrap();
        assert_eq!(f.coeff(MultiIndex::new(&[1], &[0]).unwrap()), c(-1.0, 0.0));
    }

    #[test]
    fn contraction_examples() {
        let one = contract(&TangentVector::d_dz(1, 0), &Form::dz(1, 0)).unwrap();
        assert_eq!(one, Form::scalar(1, c(1.0, 0.0)));

        // ι_ξ(dz1∧dz2) with ξ = z1∂1 + z2∂2 at (1, 2)
        let xi = TangentVector::new(vec![c(1.0, 0.0), c(2.0, 0.0)], vec![C64::default(); 2]).unwrap();
        let got = contract(&xi, &big_omega0(2)).unwrap();
        let want = &Form::dz(2, 1) - &Form::dz(2, 0).scale_real(2.0);
        assert_eq!(got, want);

        let got = contract(&TangentVector::d_dzbar(3, 0), &omega0(3)).unwrap();
        assert_eq!(got, Form::dz(3, 0).scale(-I * 0.5));
    }

    #[test]
    fn contraction_of_scalar_is_zero() {
        let f = Form::scalar(2, c(3.0, 0.0));
        assert!(contract(&TangentVector::d_dz(2, 0), &f).unwrap().is_zero());
    }

    #[test]
    fn metric_dual_calibration() {
        let v = metric_dual(&Form::dz(3, 0)).unwrap();
        assert_eq!(v, TangentVector::d_dzbar(3, 0));

        let alpha = Form::one_form(&[c(2.0, 0.0), c(0.0, 1.0)]);
        let n = dual_contract(&alpha.conj(), &alpha).unwrap();
        assert_eq!(n, Form::scalar(2, c(5.0, 0.0)));

        let got = dual_contract(&Form::dz(3, 0).conj(), &omega0(3)).unwrap();
        assert_eq!(got, Form::dzbar(3, 0).scale(I * 0.5));
    }

    #[test]
    fn metric_dual_rejects_mixed() {
        let f = &Form::dz(2, 0) + &Form::dzbar(2, 1);
        assert!(matches!(metric_dual(&f), Err(Error::MixedType)));
        let g = Form::dz(2, 0).wedge(&Form::dz(2, 1)).unwrap();
        assert!(matches!(metric_dual(&g), Err(Error::MixedType)));
    }

    #[test]
    fn orthogonal_pair() {
        let a = Form::dz(2, 0);
        let b = Form::dz(2, 1);
        assert!(dual_contract(&b.conj(), &a).unwrap().is_zero());
        assert!(dual_contract(&a.conj(), &b).unwrap().is_zero());
    }

    #[test]
    fn norm_of_fundamental_form_on_sphere() {
        let (z1, z2) = (c(0.6, 0.0), c(0.0, 0.8));
        let alpha = Form::one_form(&[-z2, z1]);
        let n = norm_sq(&alpha).unwrap();
        assert!((n - 1.0).abs() < 1e-15);
    }

    #[test]
    fn type_components() {
        let f = Form::dz(2, 0).wedge(&Form::dzbar(2, 1)).unwrap();
        assert_eq!(type_component(&f, 1, 1), f);
        let g = Form::dz(2, 0).wedge(&Form::dz(2, 1)).unwrap();
        assert!(type_component(&g, 1, 1).is_zero());
        let w3 = omega0(3).wedge_power(3).unwrap();
        assert_eq!(type_component(&w3, 3, 3), w3);
    }

    #[test]
    fn evaluation_examples() {
        let f = big_omega0(2);
        let e1 = TangentVector::d_dz(2, 0);
        let e2 = TangentVector::d_dz(2, 1);
        assert_eq!(eval_on(&f, &[e1.clone(), e2.clone()]).unwrap(), c(1.0, 0.0));
        assert_eq!(eval_on(&f, &[e2, e1.clone()]).unwrap(), c(-1.0, 0.0));
        let v = eval_on(&omega0(2), &[e1, TangentVector::d_dzbar(2, 0)]).unwrap();
        assert_eq!(v, I * 0.5);
        assert!(matches!(
            eval_on(&omega0(2), &[TangentVector::d_dz(2, 0)]),
            Err(Error::Arity { grade: 2, given: 1 })
        ));
    }

    #[test]
    fn su_constants() {
        assert!((su_constant(3) - c(0.0, -4.0 / 3.0)).norm() < 1e-15);
        assert!((su_constant(1) - c(0.0, -2.0)).norm() < 1e-15);
        // Ω₀∧Ω̄₀ = c_N ω₀^N
        for n in 1..=5 {
            let lhs = big_omega0(n).wedge(&big_omega0(n).conj()).unwrap();
            let rhs = omega0(n).wedge_power(n).unwrap().scale(su_constant(n));
            assert!((&lhs - &rhs).max_abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn multi_index_validation() {
        assert!(MultiIndex::new(&[1, 1], &[]).is_err());
        assert!(MultiIndex::new(&[2, 1], &[]).is_err());
        let m = MultiIndex::new(&[0, 3], &[1]).unwrap();
        assert_eq!(m.bidegree(), (2, 1));
        assert_eq!(m.holo(), vec![0, 3]);
        assert!(Form::from_terms(2, [(m, c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn mixed_grade_flag() {
        let f = &Form::scalar(2, c(1.0, 0.0)) + &Form::dz(2, 0);
        assert!(f.is_mixed_grade());
        assert_eq!(Form::dz(2, 0).grade(), Some(1));
    }
}
