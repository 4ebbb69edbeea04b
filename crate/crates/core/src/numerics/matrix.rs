use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported dimension. The physics only needs 6x6 and 4x4.
pub const MAX_DIM: usize = 8;

/// Square dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::Dimension(n));
        }
        Ok(Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        Ok(m)
    }

    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::Dimension(row.len()));
            }
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `self + shift * I`.
    pub fn shifted(&self, shift: Complex64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] += shift;
        }
        m
    }

    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// LU factorisation with partial pivoting.
    pub fn lu(&self) -> Result<Lu> {
        let n = self.n;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = self.norm().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
                .unwrap_or(k);
            if a[(p, k)].norm() <= f64::EPSILON * 1e-3 * scale {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let factor = a[(i, k)] / pivot;
                a[(i, k)] = factor;
                for j in k + 1..n {
                    let akj = a[(k, j)];
                    a[(i, j)] -= factor * akj;
                }
            }
        }
        Ok(Lu { factors: a, perm, sign })
    }

    pub fn determinant(&self) -> Complex64 {
        match self.lu() {
            Ok(lu) => lu.determinant(),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Solves `self * X = rhs` for a square right-hand side.
    pub fn solve(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        let lu = self.lu()?;
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n)?;
        for col in 0..n {
            let b: Vec<Complex64> = (0..n).map(|i| rhs[(i, col)]).collect();
            let x = lu.solve_vec(&b);
            for i in 0..n {
                out[(i, col)] = x[i];
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<ComplexMatrix> {
        self.solve(&ComplexMatrix::identity(self.n)?)
    }
}

/// Packed LU factors `P A = L U` (unit lower triangle implied).
#[derive(Debug, Clone)]
pub struct Lu {
    factors: ComplexMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn determinant(&self) -> Complex64 {
        let n = self.factors.n;
        (0..n).fold(Complex64::new(self.sign, 0.0), |acc, i| {
            acc * self.factors[(i, i)]
        })
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.factors.n;
        let lu = &self.factors;
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let yj = y[j];
                y[i] -= lu[(i, j)] * yj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let yj = y[j];
                y[i] -= lu[(i, j)] * yj;
            }
            y[i] /= lu[(i, i)];
        }
        y
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = ComplexMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        };
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                for j in 0..n {
                    out.data[i * n + j] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }
}
