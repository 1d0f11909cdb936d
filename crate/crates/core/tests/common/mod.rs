#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use twistred::poly::{Monomial, Polynomial};
use twistred::{Form, FormField, MultiIndex, ScalarField, TangentVector, VectorFieldExpr, C64};

pub fn rc(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_poly(dim: usize, rng: &mut ChaCha8Rng) -> Polynomial {
    let terms: Vec<(Monomial, C64)> = (0..rng.random_range(1..=4))
        .map(|_| {
            let mut e = vec![0u8; 2 * dim];
            for _ in 0..rng.random_range(0..=3) {
                e[rng.random_range(0..2 * dim)] += 1;
            }
            (Monomial::from_exponents(&e), rc(rng))
        })
        .collect();
    Polynomial::from_terms(2 * dim, terms)
}

/// A polynomial or a polynomial over a power of `1 + |z|²` (pole-free).
pub fn random_scalar(dim: usize, rng: &mut ChaCha8Rng) -> ScalarField {
    let p = ScalarField::from_poly(random_poly(dim, rng));
    if rng.random_bool(0.5) {
        return p;
    }
    let r2 = (0..dim).fold(Polynomial::constant(2 * dim, C64::new(1.0, 0.0)), |acc, j| {
        acc.add(&Polynomial::z(dim, j).mul(&Polynomial::zbar(dim, j)))
    });
    p.mul(&ScalarField::inverse_power(Arc::new(r2), rng.random_range(1..=2)).unwrap())
}

pub fn random_index(dim: usize, grade: usize, rng: &mut ChaCha8Rng) -> MultiIndex {
    loop {
        let (mut h, mut a) = (0u64, 0u64);
        for _ in 0..grade {
            let j = rng.random_range(0..dim);
            if rng.random_bool(0.5) {
                h |= 1 << j;
            } else {
                a |= 1 << j;
            }
        }
        let idx = MultiIndex::from_masks(h, a);
        if idx.grade() == grade {
            return idx;
        }
    }
}

pub fn random_field(dim: usize, grade: usize, rng: &mut ChaCha8Rng) -> FormField {
    let mut f = FormField::zero(dim);
    for _ in 0..rng.random_range(1..=3) {
        f.add_term(random_index(dim, grade, rng), random_scalar(dim, rng));
    }
    f
}

pub fn random_vector_field(dim: usize, rng: &mut ChaCha8Rng) -> VectorFieldExpr {
    VectorFieldExpr {
        holo: (0..dim).map(|_| random_scalar(dim, rng)).collect(),
        anti: (0..dim).map(|_| random_scalar(dim, rng)).collect(),
    }
}

pub fn random_point(dim: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    (0..dim).map(|_| rc(rng)).collect()
}

pub fn random_vector(dim: usize, rng: &mut ChaCha8Rng) -> TangentVector {
    TangentVector::new(random_point(dim, rng), random_point(dim, rng)).unwrap()
}

/// Residual of `a` at `z`, relative to the scale of `reference`.
pub fn residual_at(a: &FormField, reference: &[&FormField], z: &[C64]) -> f64 {
    let scale = reference
        .iter()
        .map(|f| f.eval_at(z).unwrap().max_abs())
        .fold(1.0, f64::max);
    a.eval_at(z).unwrap().max_abs() / scale
}

pub fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    if k == 0 {
        return vec![(vec![], 1.0)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(k - 1) {
        // insert k-1 at position i: sign changes with each transposition past it
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            let moves = p.len() - i;
            out.push((q, if moves % 2 == 0 { s } else { -s }));
        }
    }
    out
}

/// Leibniz sum over permutations: `Σ_σ sgn σ Π_r θ_r(v_σ(r))`, factors in
/// canonical order (holomorphic indices ascending, then antiholomorphic).
pub fn brute_eval(a: &Form, vs: &[TangentVector]) -> C64 {
    let k = vs.len();
    let mut total = C64::default();
    for (idx, c) in a.iter() {
        let factors: Vec<(bool, usize)> = idx
            .holo()
            .into_iter()
            .map(|j| (false, j))
            .chain(idx.anti().into_iter().map(|j| (true, j)))
            .collect();
        for (perm, sign) in permutations(k) {
            let prod = factors.iter().zip(&perm).fold(C64::new(sign, 0.0), |acc, (&(anti, j), &p)| {
                acc * if anti { vs[p].anti[j] } else { vs[p].holo[j] }
            });
            total += c * prod;
        }
    }
    total
}

pub fn one_form_value(theta: &(Vec<C64>, Vec<C64>), v: &TangentVector) -> C64 {
    theta.0.iter().zip(&v.holo).map(|(a, b)| a * b).sum::<C64>() + theta.1.iter().zip(&v.anti).map(|(a, b)| a * b).sum::<C64>()
}
