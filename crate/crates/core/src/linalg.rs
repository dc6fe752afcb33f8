//! Small dense complex linear algebra.
//!
//! Everything here is sequential with a fixed operation order, so results
//! are bit-for-bit reproducible across runs and thread counts.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const BISECTION_CAP: usize = 400;
const JACOBI_SWEEP_CAP: usize = 100;
const INVERSE_ITERATION_CAP: usize = 200;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        CMat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len(), "vector length does not match columns");
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// Principal submatrix on the given indices.
    pub fn principal(&self, idx: &[usize]) -> CMat {
        CMat::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Exact conjugate symmetry, compared bit for bit.
    pub fn is_exactly_hermitian(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..=i).all(|j| self[(i, j)] == self[(j, i)].conj()))
    }

    /// Gershgorin enclosure `[min_i (a_ii - r_i), max_i (a_ii + r_i)]` of the spectrum
    /// of a Hermitian matrix.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.rows {
            let r: f64 = (0..self.cols).filter(|&j| j != i).map(|j| self[(i, j)].norm()).sum();
            let d = self[(i, i)].re;
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        (lo, hi)
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Real symmetric tridiagonal matrix unitarily similar to a Hermitian input.
#[derive(Clone, Debug)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// Householder reduction of a Hermitian matrix. Off-diagonal phases are
/// dropped since a diagonal unitary similarity makes them real.
pub fn tridiagonalize(a: &CMat) -> Tridiagonal {
    assert!(a.is_square(), "tridiagonalize needs a square matrix");
    let n = a.rows;
    let mut m = a.clone();
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        let len = n - k - 1;
        let x: Vec<C64> = (0..len).map(|i| m[(k + 1 + i, k)]).collect();
        let xnorm = norm2(&x);
        if len == 1 || xnorm == 0.0 {
            off.push(x[0].norm());
            continue;
        }
        let phase = if x[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vn = norm2(&v);
        if vn == 0.0 {
            off.push(xnorm);
            continue;
        }
        for z in &mut v {
            *z /= vn;
        }
        // trailing block update A <- H A H with H = I - 2 v v*
        let p: Vec<C64> = (0..len).map(|i| (0..len).map(|j| m[(k + 1 + i, k + 1 + j)] * v[j]).sum()).collect();
        let kk = dot(&v, &p).re;
        let w: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - vi * kk).collect();
        for i in 0..len {
            for j in 0..len {
                let upd = v[i] * w[j].conj() + w[i] * v[j].conj();
                m[(k + 1 + i, k + 1 + j)] -= upd * 2.0;
            }
        }
        for i in 0..len {
            m[(k + 1 + i, k)] = if i == 0 { alpha } else { C64::new(0.0, 0.0) };
            m[(k, k + 1 + i)] = m[(k + 1 + i, k)].conj();
        }
        off.push(alpha.norm());
    }
    Tridiagonal { diag: (0..n).map(|i| m[(i, i)].re).collect(), off }
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0f64;
        for i in 0..self.diag.len() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn bounds(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        let pad = 1e-12 * (lo.abs().max(hi.abs()) + 1.0);
        (lo - pad, hi + pad)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        assert!(k < self.diag.len(), "eigenvalue index out of range");
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..BISECTION_CAP {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::NoConvergence { cap: BISECTION_CAP })
    }
}

/// Smallest and largest eigenvalue of a Hermitian matrix.
pub fn extreme_eigs(g: &CMat) -> Result<(f64, f64)> {
    if g.rows == 0 {
        return Err(Error::EmptyInput);
    }
    let t = tridiagonalize(g);
    let lo = t.eigenvalue(0)?;
    let hi = t.eigenvalue(g.rows - 1)?;
    Ok((lo, hi))
}

/// All eigenvalues in ascending order.
pub fn eigenvalues(g: &CMat) -> Result<Vec<f64>> {
    let t = tridiagonalize(g);
    (0..g.rows).map(|k| t.eigenvalue(k)).collect()
}

/// LU factorization with partial pivoting.
pub struct Lu {
    lu: CMat,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

pub fn lu(a: &CMat) -> Lu {
    assert!(a.is_square(), "LU needs a square matrix");
    let n = a.rows;
    let mut m = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let mut singular = false;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[(i, k)].norm().total_cmp(&m[(j, k)].norm())).unwrap_or(k);
        if m[(p, k)].norm() == 0.0 {
            singular = true;
            continue;
        }
        if p != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = tmp;
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let piv = m[(k, k)];
        for i in k + 1..n {
            let f = m[(i, k)] / piv;
            m[(i, k)] = f;
            for j in k + 1..n {
                let u = m[(k, j)];
                m[(i, j)] -= f * u;
            }
        }
    }
    Lu { lu: m, perm, sign, singular }
}

impl Lu {
    pub fn det(&self) -> C64 {
        if self.singular {
            return C64::new(0.0, 0.0);
        }
        (0..self.lu.rows).fold(C64::new(self.sign, 0.0), |acc, i| acc * self.lu[(i, i)])
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        if self.singular {
            return Err(Error::SingularSystem);
        }
        let n = self.lu.rows;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu[(i, i)];
        }
        Ok(x)
    }
}

pub fn det(a: &CMat) -> C64 {
    if a.rows == 0 {
        return C64::new(1.0, 0.0);
    }
    lu(a).det()
}

pub fn solve(a: &CMat, b: &[C64]) -> Result<Vec<C64>> {
    lu(a).solve(b)
}

/// Cholesky factor `L` of a Hermitian positive definite matrix, or `None`
/// if a non-positive pivot appears.
pub fn cholesky(a: &CMat) -> Option<CMat> {
    let n = a.rows;
    let mut l = CMat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Unit eigenvector for the smallest eigenvalue by shifted inverse iteration.
pub fn min_eigenvector(g: &CMat) -> Result<(f64, Vec<C64>)> {
    let n = g.rows;
    let (lmin, lmax) = extreme_eigs(g)?;
    let shift = lmin - 1e-10 * lmax.abs().max(1.0);
    let mut shifted = g.clone();
    for i in 0..n {
        shifted[(i, i)] -= shift;
    }
    let f = lu(&shifted);
    let mut x: Vec<C64> = (0..n).map(|i| C64::new(1.0 + (i as f64 * 0.618_034).fract(), 0.0)).collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|z| *z /= nx);
    let mut last = f64::NAN;
    for _ in 0..INVERSE_ITERATION_CAP {
        let y = f.solve(&x)?;
        let ny = norm2(&y);
        x = y.into_iter().map(|z| z / ny).collect();
        let rq = dot(&x, &g.matvec(&x)).re;
        if (rq - last).abs() <= 1e-15 * lmax.abs().max(1e-300) {
            return Ok((rq, x));
        }
        last = rq;
    }
    Err(Error::NoConvergence { cap: INVERSE_ITERATION_CAP })
}

/// Thin SVD `A = U diag(sigma) V*` of a matrix with at least as many rows as
/// columns; singular values are sorted in decreasing order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub sigma: Vec<f64>,
    pub u: CMat,
    pub v: CMat,
}

/// One-sided Jacobi (Hestenes) SVD with cyclic sweep order.
pub fn svd_tall(a: &CMat) -> Result<Svd> {
    assert!(a.rows >= a.cols, "svd_tall needs rows >= cols");
    let (m, n) = (a.rows, a.cols);
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()).collect();
    let tol = 1e-15;
    let mut converged = false;
    for _ in 0..JACOBI_SWEEP_CAP {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = dot(&cols[p], &cols[q]);
                let gr = gamma.norm();
                if gr == 0.0 || gr <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let ph = gamma / gr;
                let zeta = (beta - alpha) / (2.0 * gr);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for vecs in [&mut cols, &mut v] {
                    let (left, right) = vecs.split_at_mut(q);
                    let (xp, xq) = (&mut left[p], &mut right[0]);
                    for (zp, zq) in xp.iter_mut().zip(xq.iter_mut()) {
                        let bq = *zq * ph.conj();
                        let np = *zp * c - bq * s;
                        let nq = ph * (*zp * s + bq * c);
                        *zp = np;
                        *zq = nq;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { cap: JACOBI_SWEEP_CAP });
    }
    let mut order: Vec<(f64, usize)> = cols.iter().enumerate().map(|(j, c)| (norm2(c), j)).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let sigma: Vec<f64> = order.iter().map(|o| o.0).collect();
    let u = CMat::from_fn(m, n, |i, k| {
        let (s, j) = order[k];
        if s == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            cols[j][i] / s
        }
    });
    let vm = CMat::from_fn(n, n, |i, k| v[order[k].1][i]);
    Ok(Svd { sigma, u, v: vm })
}

/// The `min(rows, cols)` singular values in decreasing order.
pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    if a.rows >= a.cols {
        Ok(svd_tall(a)?.sigma)
    } else {
        Ok(svd_tall(&a.adjoint())?.sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in 0..i {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn random_matrix(r: usize, c: usize, seed: u64) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMat::from_fn(r, c, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    /// Largest eigenvalue of a positive semidefinite matrix by plain power iteration.
    fn power_iteration(a: &CMat) -> f64 {
        let mut x: Vec<C64> = (0..a.rows()).map(|i| C64::new(1.0, 0.1 * i as f64)).collect();
        let mut lambda = 0.0;
        for _ in 0..5000 {
            let y = a.matvec(&x);
            let ny = norm2(&y);
            lambda = dot(&x, &y).re / dot(&x, &x).re;
            x = y.into_iter().map(|z| z / ny).collect();
        }
        lambda
    }

    #[test]
    fn diagonal_and_scaled_identity() {
        let mut d = CMat::zeros(3, 3);
        for (i, v) in [1.0, 2.0, 3.0].iter().enumerate() {
            d[(i, i)] = C64::new(*v, 0.0);
        }
        assert_eq!(extreme_eigs(&d).unwrap(), (1.0, 3.0));
        let mut q = CMat::identity(5);
        q.data.iter_mut().for_each(|z| *z *= 0.25);
        let (lo, hi) = extreme_eigs(&q).unwrap();
        assert!((lo - 0.25).abs() < 1e-15 && (hi - 0.25).abs() < 1e-15);
    }

    #[test]
    fn extremes_match_power_iteration_oracle() {
        for seed in 0..5 {
            let h = random_hermitian(12, seed);
            let (lo, hi) = extreme_eigs(&h).unwrap();
            // shift to make both ends dominant for power iteration on PSD matrices
            let s = 10.0;
            let mut up = h.clone();
            let mut down = h.clone();
            for i in 0..12 {
                up[(i, i)] += s;
                down[(i, i)] = C64::new(s, 0.0) - h[(i, i)];
                for j in 0..12 {
                    if i != j {
                        down[(i, j)] = -h[(i, j)];
                    }
                }
            }
            assert!((power_iteration(&up) - s - hi).abs() < 1e-9 * (1.0 + hi.abs()));
            assert!((s - power_iteration(&down) - lo).abs() < 1e-9 * (1.0 + lo.abs()));
            let (glo, ghi) = h.gershgorin();
            assert!(glo <= lo && hi <= ghi);
        }
    }

    #[test]
    fn eigenvalue_sum_is_trace() {
        let h = random_hermitian(9, 42);
        let ev = eigenvalues(&h).unwrap();
        let tr: f64 = (0..9).map(|i| h[(i, i)].re).sum();
        assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-12);
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn svd_reconstructs_and_matches_gram_eigs() {
        let a = random_matrix(7, 4, 3);
        let s = svd_tall(&a).unwrap();
        let mut us = s.u.clone();
        for i in 0..7 {
            for k in 0..4 {
                us[(i, k)] *= s.sigma[k];
            }
        }
        let rec = us.matmul(&s.v.adjoint());
        for i in 0..7 {
            for j in 0..4 {
                assert!((rec[(i, j)] - a[(i, j)]).norm() < 1e-12);
            }
        }
        let ata = a.adjoint().matmul(&a);
        let ev = eigenvalues(&ata).unwrap();
        for (k, sv) in s.sigma.iter().enumerate() {
            assert!((sv * sv - ev[3 - k]).abs() < 1e-11);
        }
        let wide = singular_values(&a.adjoint()).unwrap();
        for (x, y) in wide.iter().zip(&s.sigma) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn lu_solve_and_det() {
        let a = random_matrix(6, 6, 9);
        let b: Vec<C64> = (0..6).map(|i| C64::new(i as f64, 1.0)).collect();
        let x = solve(&a, &b).unwrap();
        let r = a.matvec(&x);
        assert!(r.iter().zip(&b).all(|(u, v)| (u - v).norm() < 1e-12));
        let two = CMat::from_rows(2, 2, vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0), C64::new(4.0, 0.0)]);
        assert!((det(&two) - C64::new(-2.0, 0.0)).norm() < 1e-15);
        let sing = CMat::from_rows(2, 2, vec![C64::new(1.0, 0.0); 4]);
        assert!(matches!(solve(&sing, &[C64::new(1.0, 0.0); 2]), Err(Error::SingularSystem)));
    }

    #[test]
    fn cholesky_and_inverse_iteration() {
        let a = random_matrix(8, 8, 5);
        let mut g = a.adjoint().matmul(&a);
        for i in 0..8 {
            g[(i, i)] += 1e-3;
        }
        let l = cholesky(&g).unwrap();
        let rec = l.matmul(&l.adjoint());
        assert!((0..8).all(|i| (0..8).all(|j| (rec[(i, j)] - g[(i, j)]).norm() < 1e-12)));
        let (lam, v) = min_eigenvector(&g).unwrap();
        let gv = g.matvec(&v);
        assert!(gv.iter().zip(&v).all(|(a, b)| (a - b * lam).norm() < 1e-9));
        assert!((lam - extreme_eigs(&g).unwrap().0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn interlacing_on_principal_submatrices(seed in 0u64..1000, n in 3usize..10, drop in 0usize..3) {
            let h = random_hermitian(n, seed);
            let keep: Vec<usize> = (0..n).filter(|&i| i % 3 != drop || i == 0).collect();
            let (lo, hi) = extreme_eigs(&h).unwrap();
            let (slo, shi) = extreme_eigs(&h.principal(&keep)).unwrap();
            prop_assert!(lo <= slo + 1e-12 && shi <= hi + 1e-12);
        }
    }
}
