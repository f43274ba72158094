//! Dense symmetric linear algebra for small blocks.
//!
//! Blocks in the reduced problems never exceed a few dozen rows, so every
//! kernel here is a straightforward dense routine: Cholesky factorization,
//! triangular solves, SPD inversion, and symmetric eigenvalues via
//! Householder tridiagonalization followed by implicit QL.

use super::real::Real;
use crate::error::{Error, Result};

/// Dense square matrix, row-major.
#[derive(Debug, Clone)]
pub struct Mat<R> {
    pub n: usize,
    pub a: Vec<R>,
}

impl<R: Real> Mat<R> {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            a: vec![R::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = R::one();
        }
        m
    }

    pub fn scaled_identity(n: usize, s: R) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = s;
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> R {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.a[i * self.n + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: R) {
        self.a[i * self.n + j] += v;
    }

    pub fn fill_zero(&mut self) {
        self.a.iter_mut().for_each(|v| *v = R::zero());
    }

    pub fn max_abs(&self) -> f64 {
        self.a
            .iter()
            .map(|v| v.abs().to_f64())
            .fold(0.0, f64::max)
    }

    pub fn frob_norm(&self) -> f64 {
        self.a
            .iter()
            .map(|v| {
                let x = v.to_f64();
                x * x
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius inner product ⟨self, other⟩.
    pub fn dot(&self, other: &Mat<R>) -> R {
        let mut s = R::zero();
        for (x, y) in self.a.iter().zip(&other.a) {
            s += *x * *y;
        }
        s
    }

    pub fn trace(&self) -> R {
        let mut s = R::zero();
        for i in 0..self.n {
            s += self.at(i, i);
        }
        s
    }

    /// self ← self + c·other
    pub fn axpy(&mut self, c: R, other: &Mat<R>) {
        for (x, y) in self.a.iter_mut().zip(&other.a) {
            *x += c * *y;
        }
    }

    pub fn scale(&mut self, c: R) {
        for x in self.a.iter_mut() {
            *x *= c;
        }
    }

    /// Dense product self·other.
    pub fn matmul(&self, other: &Mat<R>) -> Mat<R> {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.at(i, k);
                if aik.to_f64() == 0.0 {
                    continue;
                }
                let row = &other.a[k * n..(k + 1) * n];
                let orow = &mut out.a[i * n..(i + 1) * n];
                for j in 0..n {
                    orow[j] += aik * row[j];
                }
            }
        }
        out
    }

    /// (self + selfᵀ)/2, in place.
    pub fn symmetrize(&mut self) {
        let n = self.n;
        let half = R::from_f64(0.5);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = (self.at(i, j) + self.at(j, i)) * half;
                self.set(i, j, v);
                self.set(j, i, v);
            }
        }
    }

    /// Lower Cholesky factor; fails on a non-positive pivot.
    pub fn cholesky(&self) -> Result<Mat<R>> {
        let n = self.n;
        let mut l = Mat::zeros(n);
        for j in 0..n {
            let mut d = self.at(j, j);
            for k in 0..j {
                let ljk = l.at(j, k);
                d -= ljk * ljk;
            }
            if d.to_f64() <= 0.0 || !d.is_finite_real() {
                return Err(Error::Solver(format!(
                    "cholesky pivot {j} non-positive ({})",
                    d.to_f64()
                )));
            }
            let djj = d.sqrt();
            l.set(j, j, djj);
            for i in (j + 1)..n {
                let mut s = self.at(i, j);
                for k in 0..j {
                    s -= l.at(i, k) * l.at(j, k);
                }
                l.set(i, j, s / djj);
            }
        }
        Ok(l)
    }

    /// Solves L y = b (forward substitution), L lower triangular.
    pub fn solve_lower(&self, b: &[R]) -> Vec<R> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.at(i, k) * y[k];
            }
            y[i] = s / self.at(i, i);
        }
        y
    }

    /// Solves Lᵀ x = b (backward substitution), L lower triangular.
    pub fn solve_lower_transpose(&self, b: &[R]) -> Vec<R> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= self.at(k, i) * x[k];
            }
            x[i] = s / self.at(i, i);
        }
        x
    }

    /// SPD inverse via an existing Cholesky factor of self.
    pub fn spd_inverse_from_chol(l: &Mat<R>) -> Mat<R> {
        let n = l.n;
        let mut inv = Mat::zeros(n);
        let mut e = vec![R::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = R::zero());
            e[j] = R::one();
            let y = l.solve_lower(&e);
            let x = l.solve_lower_transpose(&y);
            for i in 0..n {
                inv.set(i, j, x[i]);
            }
        }
        // Clean up rounding asymmetry.
        inv.symmetrize();
        inv
    }
}

fn hypot_r<R: Real>(a: R, b: R) -> R {
    let (a, b) = (a.abs(), b.abs());
    let m = a.max_val(b);
    if m.to_f64() == 0.0 {
        return R::zero();
    }
    let p = a / m;
    let q = b / m;
    m * (p * p + q * q).sqrt()
}

/// Eigenvalues of a symmetric matrix, ascending.
///
/// Householder reduction to tridiagonal form followed by implicit-shift QL.
pub fn sym_eigenvalues<R: Real>(m: &Mat<R>) -> Result<Vec<R>> {
    let n = m.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = m.clone();
    let mut d = vec![R::zero(); n];
    let mut e = vec![R::zero(); n];

    // Householder tridiagonalization (values only).
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = R::zero();
        if l > 0 {
            let mut scale = R::zero();
            for k in 0..=l {
                scale += a.at(i, k).abs();
            }
            if scale.to_f64() == 0.0 {
                e[i] = a.at(i, l);
            } else {
                for k in 0..=l {
                    let v = a.at(i, k) / scale;
                    a.set(i, k, v);
                    h += v * v;
                }
                let f = a.at(i, l);
                let g = if f.to_f64() >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a.set(i, l, f - g);
                let mut f_acc = R::zero();
                for j in 0..=l {
                    let mut g_acc = R::zero();
                    for k in 0..=j {
                        g_acc += a.at(j, k) * a.at(i, k);
                    }
                    for k in (j + 1)..=l {
                        g_acc += a.at(k, j) * a.at(i, k);
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * a.at(i, j);
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a.at(i, j);
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let sub = f * e[k] + g * a.at(i, k);
                        let v = a.at(j, k) - sub;
                        a.set(j, k, v);
                    }
                }
            }
        } else {
            e[i] = a.at(i, l);
        }
        d[i] = h;
    }
    for i in 0..n {
        d[i] = a.at(i, i);
    }
    e[0] = R::zero();

    // Implicit QL with Wilkinson shifts.
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = R::zero();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut mend = l;
            while mend < n - 1 {
                let dd = d[mend].abs() + d[mend + 1].abs();
                if e[mend].abs() <= R::eps() * dd {
                    break;
                }
                mend += 1;
            }
            if mend == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Solver(
                    "symmetric eigenvalue iteration did not converge".into(),
                ));
            }
            let two = R::from_f64(2.0);
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = hypot_r(g, R::one());
            let sign_r = if g.to_f64() >= 0.0 { r } else { -r };
            g = d[mend] - d[l] + e[l] / (g + sign_r);
            let mut s = R::one();
            let mut c = R::one();
            let mut p = R::zero();
            let mut i = mend; // loop i from mend-1 down to l
            while i > l {
                let idx = i - 1;
                let f = s * e[idx];
                let b = c * e[idx];
                r = hypot_r(f, g);
                e[idx + 1] = r;
                if r.to_f64() == 0.0 {
                    d[idx + 1] -= p;
                    e[mend] = R::zero();
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[idx + 1] - p;
                r = (d[idx] - g) * s + two * c * b;
                p = s * r;
                d[idx + 1] = g + p;
                g = c * r - b;
                i -= 1;
            }
            if r.to_f64() == 0.0 && i > l {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mend] = R::zero();
        }
    }
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(d)
}

/// Smallest eigenvalue of a symmetric matrix given as dense rows.
///
/// Symmetry is enforced by averaging; asymmetry beyond a relative 1e-8 of
/// the largest entry is rejected.
pub fn min_eigenvalue(rows: &[Vec<f64>]) -> Result<f64> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::invalid("min_eigenvalue of an empty matrix"));
    }
    let mut m = Mat::<f64>::zeros(n);
    let mut max_abs: f64 = 0.0;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::invalid("min_eigenvalue requires a square matrix"));
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::invalid("min_eigenvalue requires finite entries"));
            }
            m.set(i, j, v);
            max_abs = max_abs.max(v.abs());
        }
    }
    let tol = 1e-8 * max_abs.max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (m.at(i, j) - m.at(j, i)).abs() > tol {
                return Err(Error::invalid(format!(
                    "matrix is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    m.symmetrize();
    let eig = sym_eigenvalues(&m)?;
    Ok(eig[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::real::Dd;

    #[test]
    fn cholesky_solves_spd_system() {
        // A = LLᵀ with known factor.
        let mut a = Mat::<f64>::zeros(3);
        let vals = [[4.0, 2.0, 2.0], [2.0, 5.0, 3.0], [2.0, 3.0, 6.0]];
        for i in 0..3 {
            for j in 0..3 {
                a.set(i, j, vals[i][j]);
            }
        }
        let l = a.cholesky().unwrap();
        let b = [1.0, 2.0, 3.0];
        let y = l.solve_lower(&b);
        let x = l.solve_lower_transpose(&y);
        // Residual A x - b
        for i in 0..3 {
            let mut r = -b[i];
            for j in 0..3 {
                r += vals[i][j] * x[j];
            }
            assert!(r.abs() < 1e-12);
        }
        let inv = Mat::spd_inverse_from_chol(&l);
        let prod = a.matmul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod.at(i, j) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = Mat::<f64>::zeros(2);
        a.set(0, 0, 1.0);
        a.set(1, 1, -1.0);
        assert!(a.cholesky().is_err());
    }

    #[test]
    fn eigenvalues_identity_and_diag() {
        let eye = Mat::<f64>::identity(5);
        let e = sym_eigenvalues(&eye).unwrap();
        for v in e {
            assert!((v - 1.0).abs() < 1e-14);
        }
        let mut d = Mat::<f64>::zeros(3);
        d.set(0, 0, 3.0);
        d.set(1, 1, -2.0);
        d.set(2, 2, 0.0);
        let e = sym_eigenvalues(&d).unwrap();
        assert!((e[0] + 2.0).abs() < 1e-14);
        assert!((e[1] - 0.0).abs() < 1e-14);
        assert!((e[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_2x2_analytic() {
        // [[a, b], [b, c]] has eigenvalues (a+c)/2 ± sqrt(((a-c)/2)² + b²)
        let (a, b, c) = (1.3, -0.7, 2.9);
        let mut m = Mat::<f64>::zeros(2);
        m.set(0, 0, a);
        m.set(0, 1, b);
        m.set(1, 0, b);
        m.set(1, 1, c);
        let mid = (a + c) / 2.0;
        let rad = (((a - c) / 2.0f64).powi(2) + b * b).sqrt();
        let e = sym_eigenvalues(&m).unwrap();
        assert!((e[0] - (mid - rad)).abs() < 1e-13);
        assert!((e[1] - (mid + rad)).abs() < 1e-13);
    }

    #[test]
    fn eigenvalues_tridiagonal_known() {
        // Second-difference matrix: eigenvalues 2 - 2cos(kπ/(n+1)).
        let n = 8;
        let mut m = Mat::<f64>::zeros(n);
        for i in 0..n {
            m.set(i, i, 2.0);
            if i + 1 < n {
                m.set(i, i + 1, -1.0);
                m.set(i + 1, i, -1.0);
            }
        }
        let e = sym_eigenvalues(&m).unwrap();
        for (k, v) in e.iter().enumerate() {
            let want =
                2.0 - 2.0 * (std::f64::consts::PI * (k as f64 + 1.0) / (n as f64 + 1.0)).cos();
            assert!((v - want).abs() < 1e-12, "k={k}: {v} vs {want}");
        }
    }

    #[test]
    fn eigenvalues_dd_refine_beyond_double() {
        let mut m = Mat::<Dd>::zeros(2);
        m.set(0, 0, Dd::from_f64(2.0));
        m.set(0, 1, Dd::from_f64(1.0));
        m.set(1, 0, Dd::from_f64(1.0));
        m.set(1, 1, Dd::from_f64(2.0));
        let e = sym_eigenvalues(&m).unwrap();
        assert!((e[0].to_f64() - 1.0).abs() < 1e-15);
        assert!((e[1].to_f64() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn min_eigenvalue_api() {
        let rows = vec![
            vec![3.0, 0.0, 0.0],
            vec![0.0, -2.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ];
        assert!((min_eigenvalue(&rows).unwrap() + 2.0).abs() < 1e-13);
        let bad = vec![vec![1.0, 2.0], vec![3.0, 1.0]];
        assert!(min_eigenvalue(&bad).is_err());
    }
}
