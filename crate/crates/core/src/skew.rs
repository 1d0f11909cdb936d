//! Complex skew-symmetric matrices, Pfaffians, and the eigen-structure of
//! skew pencils `M₁⁻¹M₂`.

use nalgebra::DMatrix;
use num_rational::Rational64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::C64;

/// Largest coefficient-space dimension `horizontal_space_dim` will build.
pub const HORIZONTAL_DIM_GUARD: usize = 20_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix {
    m: DMatrix<C64>,
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

impl SkewMatrix {
    /// Builds from strict upper-triangle entries `(i, j, re, im)` with `i < j`
    /// (0-based); the lower triangle is filled by antisymmetry.
    pub fn from_entries(n: usize, entries: &[(usize, usize, f64, f64)]) -> Result<Self> {
        if n % 2 == 1 {
            return Err(Error::OddDimension(n));
        }
        let mut m = DMatrix::zeros(n, n);
        for &(i, j, re, im) in entries {
            if i >= j || j >= n {
                return Err(Error::NotSkew(i, j));
            }
            m[(i, j)] = C64::new(re, im);
            m[(j, i)] = -C64::new(re, im);
        }
        Ok(Self { m })
    }

    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::DimensionMismatch(n, m.ncols()));
        }
        if n % 2 == 1 {
            return Err(Error::OddDimension(n));
        }
        for i in 0..n {
            for j in i..n {
                if m[(i, j)] != -m[(j, i)] {
                    return Err(Error::NotSkew(i, j));
                }
            }
        }
        Ok(Self { m })
    }

    /// `J = [[0, 1], [−1, 0]]` scaled blockwise: `diag(λ₁J, …, λ_kJ)`.
    pub fn block_diagonal(lambdas: &[C64]) -> Self {
        let n = 2 * lambdas.len();
        let mut m = DMatrix::zeros(n, n);
        for (k, &l) in lambdas.iter().enumerate() {
            m[(2 * k, 2 * k + 1)] = l;
            m[(2 * k + 1, 2 * k)] = -l;
        }
        Self { m }
    }

    /// Entries i.i.d. standard complex Gaussian.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Self::random_with(n, rng, |r| gaussian(r))
    }

    /// Entries with small Gaussian-integer values, so that products stay
    /// exactly representable and symbolic cancellation is exact.
    pub fn random_integer<R: Rng + ?Sized>(n: usize, bound: i64, rng: &mut R) -> Result<Self> {
        Self::random_with(n, rng, |r| {
            C64::new(r.random_range(-bound..=bound) as f64, r.random_range(-bound..=bound) as f64)
        })
    }

    fn random_with<R: Rng + ?Sized>(n: usize, rng: &mut R, mut draw: impl FnMut(&mut R) -> C64) -> Result<Self> {
        if n % 2 == 1 {
            return Err(Error::OddDimension(n));
        }
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let c = draw(rng);
                m[(i, j)] = c;
                m[(j, i)] = -c;
            }
        }
        Ok(Self { m })
    }

    /// `s·U diag(J, …, J) Uᵀ` with `U` Haar-unitary; satisfies `M*M = |s|²I`.
    pub fn random_lt<R: Rng + ?Sized>(n: usize, scale: C64, rng: &mut R) -> Result<Self> {
        if n % 2 == 1 {
            return Err(Error::OddDimension(n));
        }
        let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
        let qr = g.qr();
        let (mut u, r) = (qr.q(), qr.r());
        // fix column phases so the distribution is Haar
        for k in 0..n {
            let d = r[(k, k)];
            if d.norm() > 0.0 {
                let ph = d / d.norm();
                for i in 0..n {
                    u[(i, k)] *= ph;
                }
            }
        }
        let j = Self::block_diagonal(&vec![C64::new(1.0, 0.0); n / 2]).m;
        let m = (&u * j * u.transpose()) * scale;
        // enforce exact antisymmetry against rounding
        let m = (&m - m.transpose()) * C64::new(0.5, 0.0);
        Ok(Self { m })
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    /// Real and imaginary parts of every entry are integers.
    pub fn is_integral(&self) -> bool {
        self.m.iter().all(|c| c.re.fract() == 0.0 && c.im.fract() == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Strict upper-triangle nonzero entries `(i, j, re, im)`.
    pub fn upper_entries(&self) -> Vec<(usize, usize, f64, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let c = self.m[(i, j)];
                if c != C64::default() {
                    out.push((i, j, c.re, c.im));
                }
            }
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { m: &self.m * c }
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.m.clone().svd(false, false).singular_values.iter().copied().collect()
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn det(&self) -> C64 {
        self.m.clone().lu().determinant()
    }

    pub fn pfaffian(&self) -> C64 {
        pfaffian(self)
    }

    /// `M*M`.
    pub fn gram(&self) -> DMatrix<C64> {
        self.m.adjoint() * &self.m
    }

    /// `(μ, ‖M*M − μI‖_max)` with `μ = tr(M*M)/N`.
    pub fn lt_deviation(&self) -> (f64, f64) {
        let g = self.gram();
        let n = self.n();
        let mu = g.trace().re / n as f64;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { mu } else { 0.0 };
                dev = dev.max((g[(i, j)] - target).norm());
            }
        }
        (mu, dev)
    }
}

/// Pfaffian, by expansion along the first row for small sizes and by
/// skew-symmetric elimination with pivoting otherwise.
pub fn pfaffian(m: &SkewMatrix) -> C64 {
    if m.n() <= 10 {
        pfaffian_expansion(m)
    } else {
        pfaffian_elimination(m)
    }
}

/// `Pf(A) = Σ_{j>0} (−1)^{j+1} a_{0j} Pf(A_{0̂ĵ})`.
pub fn pfaffian_expansion(m: &SkewMatrix) -> C64 {
    let idx: Vec<usize> = (0..m.n()).collect();
    expand(m, &idx)
}

fn expand(m: &SkewMatrix, idx: &[usize]) -> C64 {
    match idx.len() {
        0 => C64::new(1.0, 0.0),
        2 => m.get(idx[0], idx[1]),
        _ => {
            let mut total = C64::default();
            for k in 1..idx.len() {
                let a = m.get(idx[0], idx[k]);
                if a == C64::default() {
                    continue;
                }
                let rest: Vec<usize> = idx[1..].iter().copied().filter(|&x| x != idx[k]).collect();
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                total += a * sign * expand(m, &rest);
            }
            total
        }
    }
}

/// Parlett–Reid style elimination, `O(N³)`.
pub fn pfaffian_elimination(m: &SkewMatrix) -> C64 {
    let n = m.n();
    let mut a = m.m.clone();
    let mut pf = C64::new(1.0, 0.0);
    let mut k = 0;
    while k + 1 < n {
        let (mut kp, mut best) = (k + 1, a[(k + 1, k)].norm());
        for i in k + 2..n {
            let v = a[(i, k)].norm();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let piv = a[(k, k + 1)];
        if piv == C64::default() {
            return C64::default();
        }
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<C64> = (k + 2..n).map(|j| a[(k, j)] / piv).collect();
            let col: Vec<C64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    let upd = tau[ii] * col[jj] - col[ii] * tau[jj];
                    a[(i, j)] += upd;
                }
            }
        }
        k += 2;
    }
    pf
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    pub value: C64,
    pub algebraic: usize,
    pub geometric: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub clusters: Vec<EigenCluster>,
    /// Smallest distance between distinct cluster centres.
    pub separation: f64,
}

/// Eigenvalues of `M₁⁻¹M₂`, clustered with relative tolerance `tol`, with
/// geometric multiplicities from numerical rank.
pub fn collinearity_locus(m1: &SkewMatrix, m2: &SkewMatrix, tol: f64) -> Result<EigenReport> {
    let n = m1.n();
    if m2.n() != n {
        return Err(Error::DimensionMismatch(n, m2.n()));
    }
    if m1.sigma_min() <= 1e-12 * m1.singular_values()[0].max(1.0) {
        return Err(Error::Singular("M₁ is not invertible".into()));
    }
    let a = m1
        .m
        .clone()
        .lu()
        .solve(&m2.m)
        .ok_or_else(|| Error::Singular("M₁ is not invertible".into()))?;
    let eig = a
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Singular("Schur form did not converge".into()))?;
    let scale = a.norm().max(1.0);
    let mut clusters: Vec<(C64, Vec<C64>)> = Vec::new();
    for &l in eig.iter() {
        match clusters.iter_mut().find(|(c, _)| (c - l).norm() <= tol * scale) {
            Some((c, members)) => {
                members.push(l);
                *c = members.iter().sum::<C64>() / members.len() as f64;
            }
            None => clusters.push((l, vec![l])),
        }
    }
    clusters.sort_by(|x, y| x.0.re.total_cmp(&y.0.re).then(x.0.im.total_cmp(&y.0.im)));
    let mut out = Vec::with_capacity(clusters.len());
    for (value, members) in &clusters {
        let shifted = &a - DMatrix::<C64>::identity(n, n) * *value;
        let rank = shifted.svd(false, false).rank(tol.sqrt() * scale);
        out.push(EigenCluster {
            value: *value,
            algebraic: members.len(),
            geometric: n - rank,
        });
    }
    let mut separation = f64::INFINITY;
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            separation = separation.min((out[i].value - out[j].value).norm());
        }
    }
    Ok(EigenReport {
        clusters: out,
        separation,
    })
}

/// Orthonormal bases of the eigenspaces of `M₁⁻¹M₂`, one per eigenvalue
/// cluster: the planes on which `α_{M₁}` and `α_{M₂}` are collinear.
pub fn collinear_planes(m1: &SkewMatrix, m2: &SkewMatrix, tol: f64) -> Result<Vec<DMatrix<C64>>> {
    let report = collinearity_locus(m1, m2, tol)?;
    let n = m1.n();
    let a = m1
        .m
        .clone()
        .lu()
        .solve(&m2.m)
        .ok_or_else(|| Error::Singular("M₁ is not invertible".into()))?;
    let scale = a.norm().max(1.0);
    report
        .clusters
        .iter()
        .map(|c| {
            let shifted = &a - DMatrix::<C64>::identity(n, n) * c.value;
            let svd = shifted.svd(false, true);
            let v_t = svd.v_t.ok_or_else(|| Error::Singular("SVD failed".into()))?;
            // singular values are sorted in decreasing order
            let cols: Vec<_> = (0..n)
                .filter(|&i| svd.singular_values[i] <= tol.sqrt() * scale)
                .map(|i| v_t.row(i).adjoint())
                .collect();
            Ok(DMatrix::from_columns(&cols))
        })
        .collect()
}

/// Distance from a unit vector `z` to the span of the orthonormal columns of `plane`.
pub fn distance_to_plane(z: &[C64], plane: &DMatrix<C64>) -> f64 {
    let zv = nalgebra::DVector::from_column_slice(z);
    let proj = plane * (plane.adjoint() * &zv);
    (zv - proj).norm()
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Exponent vectors of all monomials of total degree `d` in `n` variables,
/// in descending lexicographic order (`z_1^d` first).
pub fn monomials(n: usize, d: usize) -> Vec<Vec<u8>> {
    fn rec(n: usize, d: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == n - 1 {
            prefix.push(d as u8);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e as u8);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Dimension of `{(P_1..P_N) homogeneous of degree k−1 : Σ z_j P_j ≡ 0}`,
/// by exact rank of the multiplication map on coefficient vectors.
pub fn horizontal_space_dim(n: usize, k: usize) -> Result<usize> {
    if n < 2 || k < 2 {
        return Err(Error::Precondition("need N ≥ 2 and k ≥ 2".into()));
    }
    let src = monomials(n, k - 1);
    let unknowns = n * src.len();
    if unknowns > HORIZONTAL_DIM_GUARD || binomial(n + k - 1, k) > HORIZONTAL_DIM_GUARD {
        return Err(Error::ResourceGuard(format!(
            "coefficient space of dimension {unknowns} exceeds {HORIZONTAL_DIM_GUARD}"
        )));
    }
    let dst = monomials(n, k);
    let row_of: std::collections::HashMap<&[u8], usize> =
        dst.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect();
    // column (j, m) ↦ monomial z_j·m
    let mut mat = vec![vec![Rational64::from_integer(0); unknowns]; dst.len()];
    for j in 0..n {
        for (c, m) in src.iter().enumerate() {
            let mut e = m.clone();
            e[j] += 1;
            mat[row_of[e.as_slice()]][j * src.len() + c] += Rational64::from_integer(1);
        }
    }
    Ok(unknowns - rational_rank(mat))
}

/// Exact rank by Gaussian elimination over `Q`.
pub fn rational_rank(mut mat: Vec<Vec<Rational64>>) -> usize {
    let rows = mat.len();
    let cols = mat.first().map_or(0, Vec::len);
    let zero = Rational64::from_integer(0);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| mat[r][col] != zero) else { continue };
        mat.swap(rank, p);
        let piv = mat[rank][col];
        for r in 0..rows {
            if r != rank && mat[r][col] != zero {
                let f = mat[r][col] / piv;
                for c in col..cols {
                    let t = mat[rank][c];
                    if t != zero {
                        mat[r][c] -= f * t;
                    }
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pfaffian_examples() {
        let a = C64::new(1.5, -0.5);
        let b = C64::new(-2.0, 0.25);
        let m2 = SkewMatrix::from_entries(2, &[(0, 1, a.re, a.im)]).unwrap();
        assert_eq!(m2.pfaffian(), a);
        let m4 = SkewMatrix::from_entries(4, &[(0, 1, a.re, a.im), (2, 3, b.re, b.im)]).unwrap();
        assert_eq!(m4.pfaffian(), a * b);
        let jj = SkewMatrix::block_diagonal(&[C64::new(1.0, 0.0); 2]);
        assert_eq!(jj.pfaffian(), C64::new(1.0, 0.0));
    }

    #[test]
    fn four_by_four_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = SkewMatrix::random(4, &mut rng).unwrap();
        let f = m.get(0, 1) * m.get(2, 3) - m.get(0, 2) * m.get(1, 3) + m.get(0, 3) * m.get(1, 2);
        assert!((m.pfaffian() - f).norm() < 1e-14);
    }

    #[test]
    fn expansion_and_elimination_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [2, 4, 6, 8, 10] {
            let m = SkewMatrix::random(n, &mut rng).unwrap();
            let (a, b) = (pfaffian_expansion(&m), pfaffian_elimination(&m));
            assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0), "n={n}");
            let det = m.det();
            assert!((a * a - det).norm() <= 1e-10 * det.norm());
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(SkewMatrix::from_entries(3, &[]), Err(Error::OddDimension(3))));
        assert!(SkewMatrix::from_entries(4, &[(2, 1, 1.0, 0.0)]).is_err());
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        m[(1, 0)] = C64::new(1.0, 0.0);
        assert!(matches!(SkewMatrix::from_matrix(m), Err(Error::NotSkew(0, 1))));
    }

    #[test]
    fn lt_matrices_are_unitary_multiples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = SkewMatrix::random_lt(4, C64::new(0.0, 2.0), &mut rng).unwrap();
        let (mu, dev) = m.lt_deviation();
        assert!((mu - 4.0).abs() < 1e-12);
        assert!(dev < 1e-12);
        assert!(SkewMatrix::from_matrix(m.matrix().clone()).is_ok());
    }

    #[test]
    fn block_pencil_eigenvalues() {
        let l: Vec<C64> = [1.0, 2.0, -3.0, 0.5].iter().map(|&x| C64::new(x, 0.0)).collect();
        let m1 = SkewMatrix::block_diagonal(&[C64::new(1.0, 0.0); 4]);
        let m2 = SkewMatrix::block_diagonal(&l);
        let rep = collinearity_locus(&m1, &m2, 1e-8).unwrap();
        assert_eq!(rep.clusters.len(), 4);
        for c in &rep.clusters {
            assert_eq!((c.algebraic, c.geometric), (2, 2));
            assert!(l.iter().any(|x| (x - c.value).norm() < 1e-12));
        }
        let same = collinearity_locus(&m1, &m1, 1e-8).unwrap();
        assert_eq!(same.clusters.len(), 1);
        assert_eq!(same.clusters[0].geometric, 8);
    }

    #[test]
    fn generic_pencil_has_double_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m1 = SkewMatrix::random(8, &mut rng).unwrap();
        let m2 = SkewMatrix::random(8, &mut rng).unwrap();
        let rep = collinearity_locus(&m1, &m2, 1e-8).unwrap();
        assert_eq!(rep.clusters.len(), 4);
        assert!(rep.clusters.iter().all(|c| c.algebraic == 2 && c.geometric == 2));

        // on each plane α_{M₂} is a multiple of α_{M₁}
        let planes = collinear_planes(&m1, &m2, 1e-8).unwrap();
        assert_eq!(planes.len(), 4);
        for p in &planes {
            assert_eq!(p.ncols(), 2);
            let z: Vec<C64> = (p.column(0) * C64::new(0.6, 0.0) + p.column(1) * C64::new(0.0, 0.8))
                .iter()
                .copied()
                .collect();
            assert!(distance_to_plane(&z, p) < 1e-12);
            let a1 = crate::twist::alpha_from_skew_at(&m1, &z);
            let a2 = crate::twist::alpha_from_skew_at(&m2, &z);
            let beta = crate::twist::gram_schmidt_at(&[a1, a2]).pop().unwrap();
            assert!(beta.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-8);
        }
    }

    #[test]
    fn singular_first_matrix_is_rejected() {
        let m1 = SkewMatrix::from_entries(4, &[(0, 1, 1.0, 0.0)]).unwrap();
        let m2 = SkewMatrix::block_diagonal(&[C64::new(1.0, 0.0); 2]);
        assert!(matches!(collinearity_locus(&m1, &m2, 1e-8), Err(Error::Singular(_))));
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials(4, 1)[0], vec![1, 0, 0, 0]);
        assert_eq!(monomials(4, 1)[3], vec![0, 0, 0, 1]);
        assert_eq!(monomials(8, 2).len(), 36);
        assert_eq!(monomials(4, 2).len(), binomial(5, 2));
    }

    #[test]
    fn horizontal_dimensions_match_koszul_count() {
        // independent count: the multiplication map is onto degree k, so the
        // kernel has dimension N·C(N+k−2, k−1) − C(N+k−1, k)
        for (n, k) in [(2, 2), (4, 2), (6, 2), (8, 2), (4, 3), (3, 4)] {
            let koszul = n * binomial(n + k - 2, k - 1) - binomial(n + k - 1, k);
            assert_eq!(horizontal_space_dim(n, k).unwrap(), koszul, "N={n} k={k}");
        }
        assert_eq!(horizontal_space_dim(4, 2).unwrap(), 6);
        assert_eq!(horizontal_space_dim(2, 2).unwrap(), 1);
        assert_eq!(horizontal_space_dim(4, 3).unwrap(), 20);
        assert!(matches!(horizontal_space_dim(40, 6), Err(Error::ResourceGuard(_))));
    }
}
