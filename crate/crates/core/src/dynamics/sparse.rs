use nalgebra::DMatrix;
use num_complex::Complex64;

/// Compressed-row operator used by the time-stepping kernels.
///
/// Operators are built densely, but the Hamiltonians and jump operators in
/// play are mostly zeros, so the integrators only touch stored entries.
#[derive(Debug, Clone)]
pub(crate) struct Csr {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl Csr {
    /// Keeps every entry that is not exactly zero.
    pub(crate) fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let dim = m.nrows();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for r in 0..dim {
            for c in 0..dim {
                let v = m[(r, c)];
                if v != ZERO {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    #[cfg(test)]
    pub(crate) fn nnz(&self) -> usize {
        self.vals.len()
    }

    #[inline]
    fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    #[inline]
    fn row_dot(&self, r: usize, x: &[Complex64]) -> Complex64 {
        let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
        let mut re = 0.0;
        let mut im = 0.0;
        for (&c, v) in self.cols[lo..hi].iter().zip(&self.vals[lo..hi]) {
            // SAFETY: every stored column is < dim, and callers assert x.len() == dim.
            let xc = unsafe { x.get_unchecked(c) };
            re += v.re * xc.re - v.im * xc.im;
            im += v.re * xc.im + v.im * xc.re;
        }
        Complex64::new(re, im)
    }

    /// `out = base + scale · A·x`.
    pub(crate) fn affine(&self, x: &[Complex64], scale: Complex64, base: &[Complex64], out: &mut [Complex64]) {
        assert!(x.len() == self.dim && base.len() == self.dim && out.len() == self.dim);
        for (r, (o, b)) in out.iter_mut().zip(base).enumerate() {
            *o = b + self.row_dot(r, x) * scale;
        }
    }

    pub(crate) fn matvec(&self, x: &[Complex64], out: &mut [Complex64]) {
        assert!(x.len() == self.dim && out.len() == self.dim);
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row_dot(r, x);
        }
    }

    /// `⟨x|A|x⟩`.
    pub(crate) fn expectation(&self, x: &[Complex64]) -> Complex64 {
        assert_eq!(x.len(), self.dim);
        x.iter().enumerate().map(|(r, xr)| xr.conj() * self.row_dot(r, x)).sum()
    }

    /// `out = A·M` for a row-major `dim × dim` matrix `M`.
    pub(crate) fn mul_dense(&self, m: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        out.fill(ZERO);
        for r in 0..d {
            let dst = &mut out[r * d..(r + 1) * d];
            for (c, v) in self.row(r) {
                let src = &m[c * d..(c + 1) * d];
                for (o, s) in dst.iter_mut().zip(src) {
                    *o += v * s;
                }
            }
        }
    }
}

/// Row-major `d × d` copy of a column-major nalgebra matrix.
pub(crate) fn to_row_major(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    m.transpose().as_slice().to_vec()
}

pub(crate) fn from_row_major(d: usize, v: &[Complex64]) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(d, d, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_dense_products() {
        let d = 4;
        let a = DMatrix::from_fn(d, d, |r, c| {
            if (r + c) % 3 == 0 {
                Complex64::new(r as f64 + 1.0, c as f64 - 2.0)
            } else {
                ZERO
            }
        });
        let m = DMatrix::from_fn(d, d, |r, c| Complex64::new((r * d + c) as f64, 0.5));
        let csr = Csr::from_dense(&a);
        assert_eq!(csr.nnz(), a.iter().filter(|z| **z != ZERO).count());
        let mut out = vec![ZERO; d * d];
        csr.mul_dense(&to_row_major(&m), &mut out);
        let expect = &a * &m;
        assert!(from_row_major(d, &out)
            .iter()
            .zip(expect.iter())
            .all(|(x, y)| (x - y).norm() < 1e-12));

        let x: Vec<Complex64> = (0..d).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let mut y = vec![ZERO; d];
        csr.matvec(&x, &mut y);
        let ex = &a * nalgebra::DVector::from_column_slice(&x);
        assert!(y.iter().zip(ex.iter()).all(|(p, q)| (p - q).norm() < 1e-12));
        let e = csr.expectation(&x);
        let ee = nalgebra::DVector::from_column_slice(&x).dotc(&ex);
        assert!((e - ee).norm() < 1e-12);
    }
}
