//! Small dense-free linear algebra kernels: symmetric tridiagonal pencils
//! (Sylvester inertia, bisection, inverse iteration) and banded LU with
//! partial pivoting.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix stored by its diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn zeros(n: usize) -> Self {
        Self { diag: vec![0.0; n], off: vec![0.0; n.saturating_sub(1)] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// Bilinear form `x^T M y`.
    pub fn form(&self, x: &[f64], y: &[f64]) -> f64 {
        self.matvec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &SymTridiag) -> SymTridiag {
        SymTridiag {
            diag: self.diag.iter().zip(&other.diag).map(|(a, b)| a + c * b).collect(),
            off: self.off.iter().zip(&other.off).map(|(a, b)| a + c * b).collect(),
        }
    }

    /// Drop the first `lead` and last `trail` rows/columns.
    pub fn restrict(&self, lead: usize, trail: usize) -> SymTridiag {
        let n = self.len();
        let end = n - trail;
        SymTridiag {
            diag: self.diag[lead..end].to_vec(),
            off: if end > lead + 1 { self.off[lead..end - 1].to_vec() } else { Vec::new() },
        }
    }

    /// Solve `M x = rhs` by the tridiagonal Thomas algorithm (no pivoting).
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let tiny = 1e-300;
        let mut denom = self.diag[0];
        if denom.abs() < tiny {
            return Err(Error::Singular("zero pivot in tridiagonal solve".into()));
        }
        if n > 1 {
            c[0] = self.off[0] / denom;
        }
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.off[i - 1] * c[i - 1];
            if denom.abs() < tiny {
                return Err(Error::Singular("zero pivot in tridiagonal solve".into()));
            }
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}

/// Generalized symmetric pencil `A x = t B x` with `B` positive definite.
#[derive(Debug, Clone)]
pub struct TridiagPencil {
    pub a: SymTridiag,
    pub b: SymTridiag,
}

impl TridiagPencil {
    pub fn new(a: SymTridiag, b: SymTridiag) -> Self {
        assert_eq!(a.len(), b.len());
        Self { a, b }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Number of pencil eigenvalues strictly below `sigma`, from the negative
    /// pivots of the `LDL^T` factorization of `A - sigma B`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let n = self.len();
        let mut count = 0;
        let mut prev = 1.0;
        for i in 0..n {
            let mut d = self.a.diag[i] - sigma * self.b.diag[i];
            if i > 0 {
                let e = self.a.off[i - 1] - sigma * self.b.off[i - 1];
                d -= e * e / prev;
            }
            if d == 0.0 {
                d = -f64::EPSILON * (self.a.diag[i].abs() + sigma.abs() * self.b.diag[i].abs() + 1e-300);
            }
            if d < 0.0 {
                count += 1;
            }
            prev = d;
        }
        count
    }

    /// Rayleigh quotient `x^T A x / x^T B x`.
    pub fn rayleigh(&self, x: &[f64]) -> f64 {
        self.a.form(x, x) / self.b.form(x, x)
    }

    /// The `index`-th smallest eigenvalue (0-based) by bisection on the inertia count.
    pub fn eigenvalue(&self, index: usize, tol: f64) -> Result<f64> {
        let n = self.len();
        if index >= n {
            return Err(Error::Domain(format!("eigenvalue index {index} >= dimension {n}")));
        }
        let mut lo = -1.0;
        let mut guard = 0;
        while self.count_below(lo) > index {
            lo *= 2.0;
            guard += 1;
            if guard > 200 {
                return Err(Error::NoConvergence { solver: "pencil bracket", iterations: guard, residual: lo });
            }
        }
        let mut hi = 1.0;
        guard = 0;
        while self.count_below(hi) <= index {
            hi = if hi > 0.0 { hi * 2.0 } else { 1.0 };
            guard += 1;
            if guard > 200 {
                return Err(Error::NoConvergence { solver: "pencil bracket", iterations: guard, residual: hi });
            }
        }
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tol * (1.0 + mid.abs()) || mid == lo || mid == hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Eigenvector for an (already accurate) eigenvalue estimate by shifted
    /// inverse iteration, kept `B`-orthogonal to `deflate`.
    pub fn eigenvector(&self, eigenvalue: f64, deflate: &[Vec<f64>]) -> Result<Vec<f64>> {
        let n = self.len();
        let scale = 1.0 + eigenvalue.abs();
        let shift = eigenvalue - 1e-10 * scale;
        let shifted = self.a.axpy(-shift, &self.b);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
        let mut last = f64::INFINITY;
        for it in 0..60 {
            b_orthogonalize(&self.b, &mut x, deflate);
            let rhs = self.b.matvec(&x);
            let mut y = shifted.solve(&rhs)?;
            b_orthogonalize(&self.b, &mut y, deflate);
            let norm = self.b.form(&y, &y).sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::NoConvergence { solver: "inverse iteration", iterations: it, residual: norm });
            }
            y.iter_mut().for_each(|v| *v /= norm);
            let q = self.rayleigh(&y);
            let change = (q - last).abs();
            x = y;
            last = q;
            if it >= 2 && change <= 1e-15 * scale {
                break;
            }
        }
        Ok(x)
    }
}

fn b_orthogonalize(b: &SymTridiag, x: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let bq = b.matvec(q);
            let num: f64 = x.iter().zip(&bq).map(|(a, c)| a * c).sum();
            let den: f64 = q.iter().zip(&bq).map(|(a, c)| a * c).sum();
            let c = num / den;
            x.iter_mut().zip(q).for_each(|(xi, qi)| *xi -= c * qi);
        }
    }
}

/// Banded matrix with `kl` sub- and `ku` super-diagonals, factorized in place
/// by Gaussian elimination with partial pivoting.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl, "({i},{j}) outside band");
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku + self.kl {
            return 0.0;
        }
        self.data[self.slot(i, j)]
    }

    /// Add `v` to entry `(i, j)`; the entry must lie within the declared band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "({i},{j}) outside band");
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku + 1).min(self.n);
                (lo..hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    pub fn factorize(mut self) -> Result<BandLu> {
        let n = self.n;
        let kl = self.kl;
        let ku_fill = self.ku + self.kl;
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let last_row = (k + kl + 1).min(n);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..last_row {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Singular(format!("zero pivot at column {k}")));
            }
            piv[k] = p;
            let last_col = (k + ku_fill + 1).min(n);
            if p != k {
                // p >= k, so every column of row k up to k + ku + kl fits in row p
                for j in k..last_col {
                    let (sk, sp) = (self.slot(k, j), self.slot(p, j));
                    self.data.swap(sk, sp);
                }
            }
            let pivot = self.get(k, k);
            for i in k + 1..last_row {
                let si = self.slot(i, k);
                let l = self.data[si] / pivot;
                self.data[si] = l;
                if l != 0.0 {
                    for j in k + 1..last_col {
                        let kj = self.get(k, j);
                        if kj != 0.0 {
                            let s = self.slot(i, j);
                            self.data[s] -= l * kj;
                        }
                    }
                }
            }
        }
        Ok(BandLu { m: self, piv })
    }
}

/// LU factors of a [`BandMatrix`].
#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.m.n;
        let kl = self.m.kl;
        let ku_fill = self.m.ku + kl;
        let mut x = rhs.to_vec();
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk != 0.0 {
                for i in k + 1..(k + kl + 1).min(n) {
                    x[i] -= self.m.get(i, k) * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..(k + ku_fill + 1).min(n) {
                s -= self.m.get(k, j) * x[j];
            }
            x[k] = s / self.m.get(k, k);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiag {
        SymTridiag { diag: vec![2.0; n], off: vec![-1.0; n - 1] }
    }

    fn identity(n: usize) -> SymTridiag {
        SymTridiag { diag: vec![1.0; n], off: vec![0.0; n - 1] }
    }

    #[test]
    fn inertia_matches_known_spectrum() {
        let n = 50;
        let p = TridiagPencil::new(laplacian(n), identity(n));
        let exact = |k: usize| {
            let t = (k as f64) * std::f64::consts::PI / (2.0 * (n as f64 + 1.0));
            4.0 * t.sin().powi(2)
        };
        for k in [1usize, 2, 10, 37] {
            let ev = p.eigenvalue(k - 1, 1e-14).unwrap();
            assert!((ev - exact(k)).abs() < 1e-12, "k={k}: {ev} vs {}", exact(k));
        }
        assert_eq!(p.count_below(exact(5) + 1e-9), 5);
    }

    #[test]
    fn eigenvectors_are_b_orthogonal() {
        let n = 40;
        let b = SymTridiag { diag: vec![4.0 / 6.0; n], off: vec![1.0 / 6.0; n - 1] };
        let p = TridiagPencil::new(laplacian(n), b.clone());
        let e0 = p.eigenvalue(0, 1e-14).unwrap();
        let v0 = p.eigenvector(e0, &[]).unwrap();
        let e1 = p.eigenvalue(1, 1e-14).unwrap();
        let v1 = p.eigenvector(e1, std::slice::from_ref(&v0)).unwrap();
        assert!(b.form(&v0, &v1).abs() < 1e-12);
        assert!((p.rayleigh(&v1) - e1).abs() < 1e-12);
    }

    #[test]
    fn banded_lu_solves_with_pivoting() {
        let n = 30;
        let (kl, ku) = (2, 3);
        let mut m = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                // zero diagonal forces row exchanges
                let v = if i == j { 0.0 } else { 1.0 / (1.0 + (i as f64) - 0.5 * (j as f64)).abs().max(0.3) };
                m.add(i, j, v);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = m.matvec(&x);
        let lu = m.factorize().unwrap();
        let y = lu.solve(&b);
        for (a, c) in x.iter().zip(&y) {
            assert!((a - c).abs() < 1e-10, "{a} vs {c}");
        }
    }

    #[test]
    fn thomas_solve_roundtrip() {
        let m = laplacian(10);
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y = m.solve(&m.matvec(&x)).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
