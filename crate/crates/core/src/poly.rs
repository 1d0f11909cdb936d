//! Sparse polynomials in `z_1..z_N, z̄_1..z̄_N` with complex coefficients.
//!
//! Variables `0..N` are the `z_j`, variables `N..2N` the `z̄_j`; the two halves
//! are treated as independent symbols, so the partial derivatives below are
//! the Wirtinger derivatives.

use std::cmp::Ordering;
use std::fmt;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::exterior::C64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(SmallVec<[u8; 16]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        let mut m = Self::one(nvars);
        m.0[k] = 1;
        m
    }

    pub fn from_exponents(exps: &[u8]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// `(holomorphic degree, antiholomorphic degree)`.
    pub fn bidegree(&self) -> (usize, usize) {
        let n = self.0.len() / 2;
        (
            self.0[..n].iter().map(|&e| e as usize).sum(),
            self.0[n..].iter().map(|&e| e as usize).sum(),
        )
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (a, &b) in out.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(b).expect("monomial exponent overflow");
        }
        Monomial(out)
    }

    fn conj(&self) -> Monomial {
        let n = self.0.len() / 2;
        let mut out = SmallVec::with_capacity(self.0.len());
        out.extend_from_slice(&self.0[n..]);
        out.extend_from_slice(&self.0[..n]);
        Monomial(out)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// Cached powers of the coordinates of one point, used for fast evaluation.
pub struct PowerTable {
    pows: Vec<Vec<C64>>,
}

impl PowerTable {
    /// Tabulates `z_j^e` and `z̄_j^e` for `e ≤ max_exp`.
    pub fn new(z: &[C64], max_exp: usize) -> Self {
        let vars = z.iter().copied().chain(z.iter().map(|c| c.conj()));
        let pows = vars
            .map(|x| {
                let mut row = Vec::with_capacity(max_exp + 1);
                let mut p = C64::new(1.0, 0.0);
                row.push(p);
                for _ in 0..max_exp {
                    p *= x;
                    row.push(p);
                }
                row
            })
            .collect();
        Self { pows }
    }

    pub fn nvars(&self) -> usize {
        self.pows.len()
    }

    #[inline]
    fn pow(&self, v: usize, e: u8) -> C64 {
        let row = &self.pows[v];
        match row.get(e as usize) {
            Some(&p) => p,
            None => row[1].powi(e as i32),
        }
    }
}

#[derive(Clone, PartialEq, Default)]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<(Monomial, C64)>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        let mut p = Self::zero(nvars);
        if c != C64::default() {
            p.terms.push((Monomial::one(nvars), c));
        }
        p
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        Self {
            nvars,
            terms: vec![(Monomial::var(nvars, k), C64::new(1.0, 0.0))],
        }
    }

    /// `z_j` in `C^dim`.
    pub fn z(dim: usize, j: usize) -> Self {
        Self::var(2 * dim, j)
    }

    /// `z̄_j` in `C^dim`.
    pub fn zbar(dim: usize, j: usize) -> Self {
        Self::var(2 * dim, dim + j)
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, C64)>) -> Self {
        let mut acc: FxHashMap<Monomial, C64> = FxHashMap::default();
        for (m, c) in terms {
            debug_assert_eq!(m.0.len(), nvars);
            *acc.entry(m).or_default() += c;
        }
        Self::from_map(nvars, acc)
    }

    fn from_map(nvars: usize, acc: FxHashMap<Monomial, C64>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| *c != C64::default()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Self { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, C64)] {
        &self.terms
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

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<C64> {
        match self.terms.as_slice() {
            [] => Some(C64::default()),
            [(m, c)] if m.degree() == 0 => Some(*c),
            _ => None,
        }
    }

    pub fn max_exponent(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|(m, _)| m.0.iter().copied())
            .max()
            .unwrap_or(0) as usize
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    /// True when every term has holomorphic degree `p` and antiholomorphic degree `q`.
    pub fn is_bihomogeneous(&self, p: usize, q: usize) -> bool {
        self.terms.iter().all(|(m, _)| m.bidegree() == (p, q))
    }

    /// True when no `z̄` appears.
    pub fn is_holomorphic(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.bidegree().1 == 0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.merge(other, 1.0)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.merge(other, -1.0)
    }

    fn merge(&self, other: &Polynomial, sign: f64) -> Polynomial {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0.clone(), b[j].1 * sign));
                    j += 1;
                }
                Ordering::Equal => {
                    let s = a[i].1 + b[j].1 * sign;
                    if s != C64::default() {
                        out.push((a[i].0.clone(), s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), c * sign)));
        Polynomial {
            nvars: self.nvars.max(other.nvars),
            terms: out,
        }
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, c: C64) -> Polynomial {
        if c == C64::default() {
            return Polynomial::zero(self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, v)| (m.clone(), v * c))
            .filter(|(_, v)| *v != C64::default())
            .collect();
        Polynomial {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if let Some(c) = other.as_constant() {
            return self.scale(c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(c);
        }
        let mut acc: FxHashMap<Monomial, C64> = FxHashMap::default();
        acc.reserve(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_default() += ca * cb;
            }
        }
        Self::from_map(self.nvars, acc)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::constant(self.nvars, C64::new(1.0, 0.0));
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to variable `v`.
    pub fn derivative(&self, v: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[v] > 0)
            .map(|(m, c)| {
                let mut e = m.0.clone();
                let k = e[v];
                e[v] = k - 1;
                (Monomial(e), c * k as f64)
            })
            .collect();
        // decrementing one exponent keeps the lexicographic order
        Polynomial {
            nvars: self.nvars,
            terms,
        }
    }

    /// Swaps `z ↔ z̄` and conjugates coefficients.
    pub fn conj(&self) -> Polynomial {
        let mut terms: Vec<_> = self.terms.iter().map(|(m, c)| (m.conj(), c.conj())).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Polynomial {
            nvars: self.nvars,
            terms,
        }
    }

    /// `(p + conj p)/2`, exactly self-conjugate.
    pub fn real_part(&self) -> Polynomial {
        self.add(&self.conj()).scale(C64::new(0.5, 0.0))
    }

    pub fn eval(&self, table: &PowerTable) -> C64 {
        let mut total = C64::default();
        for (m, c) in &self.terms {
            let mut t = *c;
            for (v, &e) in m.0.iter().enumerate() {
                if e != 0 {
                    t *= table.pow(v, e);
                }
            }
            total += t;
        }
        total
    }

    /// Evaluates at `z` with `z̄ = conj(z)`.
    pub fn eval_at(&self, z: &[C64]) -> C64 {
        self.eval(&PowerTable::new(z, self.max_exponent()))
    }

    /// Total order on content, used to sort denominator factors.
    pub(crate) fn content_cmp(&self, other: &Polynomial) -> Ordering {
        self.terms.len().cmp(&other.terms.len()).then_with(|| {
            for ((ma, ca), (mb, cb)) in self.terms.iter().zip(&other.terms) {
                let o = ma
                    .cmp(mb)
                    .then_with(|| ca.re.total_cmp(&cb.re))
                    .then_with(|| ca.im.total_cmp(&cb.im));
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let n = self.nvars / 2;
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)", c.re, c.im)?;
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = if v < n {
                    format!("z{}", v + 1)
                } else {
                    format!("z̄{}", v - n + 1)
                };
                if e == 1 {
                    write!(f, "·{name}")?;
                } else {
                    write!(f, "·{name}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn product_and_derivative() {
        // (z1 + z̄1)^2 = z1² + 2 z1 z̄1 + z̄1²
        let p = Polynomial::z(1, 0).add(&Polynomial::zbar(1, 0));
        let sq = p.mul(&p);
        assert_eq!(sq.len(), 3);
        let d = sq.derivative(0);
        // 2 z1 + 2 z̄1
        assert_eq!(d, p.scale(c(2.0)));
    }

    #[test]
    fn conjugation_is_involutive() {
        let p = Polynomial::z(2, 0)
            .mul(&Polynomial::zbar(2, 1))
            .scale(C64::new(1.0, 2.0))
            .add(&Polynomial::constant(4, C64::new(0.0, 3.0)));
        assert_eq!(p.conj().conj(), p);
        let z = [C64::new(0.3, -0.2), C64::new(1.1, 0.4)];
        assert!((p.conj().eval_at(&z) - p.eval_at(&z).conj()).norm() < 1e-15);
    }

    #[test]
    fn cancellation_drops_terms() {
        let p = Polynomial::z(1, 0);
        assert!(p.sub(&p).is_zero());
        assert_eq!(p.sub(&p).as_constant(), Some(C64::default()));
    }

    #[test]
    fn power_table_fallback() {
        let p = Polynomial::z(1, 0).pow(5);
        let z = [C64::new(0.5, 0.5)];
        let t = PowerTable::new(&z, 2);
        assert!((p.eval(&t) - z[0].powi(5)).norm() < 1e-15);
    }
}
