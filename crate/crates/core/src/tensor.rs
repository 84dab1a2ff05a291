//! Dense complex tensors indexed by boundary bit-strings.
//!
//! A [`Tensor`] is the value type of the semantic oracle: a linear map from
//! `in_arity` wires to `out_arity` wires, stored as a dense
//! `2^out_arity x 2^in_arity` matrix. Indexing is big-endian over the ordered
//! boundary: the first output port is the most significant bit of the row
//! index, and likewise for inputs and columns.

use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    out_arity: usize,
    in_arity: usize,
    entries: Vec<Complex64>,
}

impl Tensor {
    pub fn zeros(out_arity: usize, in_arity: usize) -> Self {
        let len = (1usize << out_arity) * (1usize << in_arity);
        Tensor {
            out_arity,
            in_arity,
            entries: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// 0-wire to 0-wire map holding a single scalar.
    pub fn scalar(value: Complex64) -> Self {
        Tensor {
            out_arity: 0,
            in_arity: 0,
            entries: vec![value],
        }
    }

    pub fn identity(wires: usize) -> Self {
        let mut t = Tensor::zeros(wires, wires);
        for i in 0..1usize << wires {
            t.set(i, i, Complex64::new(1.0, 0.0));
        }
        t
    }

    pub fn from_fn(
        out_arity: usize,
        in_arity: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut t = Tensor::zeros(out_arity, in_arity);
        for row in 0..1usize << out_arity {
            for col in 0..1usize << in_arity {
                t.set(row, col, f(row, col));
            }
        }
        t
    }

    /// Diagonal map on `wires` wires; `f` receives the row index.
    pub fn diagonal(wires: usize, mut f: impl FnMut(usize) -> Complex64) -> Self {
        let mut t = Tensor::zeros(wires, wires);
        for i in 0..1usize << wires {
            t.set(i, i, f(i));
        }
        t
    }

    pub fn out_arity(&self) -> usize {
        self.out_arity
    }

    pub fn in_arity(&self) -> usize {
        self.in_arity
    }

    pub fn rows(&self) -> usize {
        1 << self.out_arity
    }

    pub fn cols(&self) -> usize {
        1 << self.in_arity
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.cols() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        let cols = self.cols();
        self.entries[row * cols + col] = value;
    }

    pub fn add_assign_at(&mut self, row: usize, col: usize, value: Complex64) {
        let cols = self.cols();
        self.entries[row * cols + col] += value;
    }

    pub fn scale(&self, c: Complex64) -> Tensor {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e *= c;
        }
        out
    }

    /// Matrix product `self * other` (`other` feeds `self`).
    pub fn matmul(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.in_arity, other.out_arity, "inner arity mismatch");
        let mut out = Tensor::zeros(self.out_arity, other.in_arity);
        for r in 0..self.rows() {
            for k in 0..self.cols() {
                let a = self.get(r, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..other.cols() {
                    out.add_assign_at(r, c, a * other.get(k, c));
                }
            }
        }
        out
    }

    /// Kronecker product; `self`'s wires become the more significant bits.
    pub fn kron(&self, other: &Tensor) -> Tensor {
        let mut out = Tensor::zeros(
            self.out_arity + other.out_arity,
            self.in_arity + other.in_arity,
        );
        for r1 in 0..self.rows() {
            for c1 in 0..self.cols() {
                let a = self.get(r1, c1);
                for r2 in 0..other.rows() {
                    for c2 in 0..other.cols() {
                        out.set(
                            (r1 << other.out_arity) | r2,
                            (c1 << other.in_arity) | c2,
                            a * other.get(r2, c2),
                        );
                    }
                }
            }
        }
        out
    }

    /// Largest absolute entry-wise difference, together with the first index
    /// pair attaining it.
    pub fn max_abs_diff(&self, other: &Tensor) -> Option<(f64, usize, usize)> {
        if self.out_arity != other.out_arity || self.in_arity != other.in_arity {
            return None;
        }
        let mut best = (0.0f64, 0usize, 0usize);
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                let d = (self.get(r, c) - other.get(r, c)).norm();
                if d > best.0 {
                    best = (d, r, c);
                }
            }
        }
        Some(best)
    }

    pub fn approx_eq(&self, other: &Tensor, tol: f64) -> bool {
        match self.max_abs_diff(other) {
            Some((d, _, _)) => d <= tol,
            None => false,
        }
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        if self.out_arity != self.in_arity {
            return false;
        }
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                if r != c && self.get(r, c).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Matrix transpose in the computational basis.
    pub fn transposed(&self) -> Tensor {
        let mut t = Tensor::zeros(self.in_arity, self.out_arity);
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_matmul_is_identity() {
        let i2 = Tensor::identity(2);
        let m = Tensor::from_fn(2, 2, |r, c| Complex64::new((r * 4 + c) as f64, 0.0));
        assert!(i2.matmul(&m).approx_eq(&m, 0.0));
        assert!(m.matmul(&i2).approx_eq(&m, 0.0));
    }

    #[test]
    fn kron_block_structure() {
        let a = Tensor::from_fn(1, 1, c64);
        let b = Tensor::identity(1);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        // (A (x) I)[(r1 r2),(c1 c2)] = A[r1,c1] * I[r2,c2]
        for r1 in 0..2 {
            for c1 in 0..2 {
                for r2 in 0..2 {
                    for c2 in 0..2 {
                        let expect = if r2 == c2 { c64(r1, c1) } else { c(0.0, 0.0) };
                        assert_eq!(k.get(r1 * 2 + r2, c1 * 2 + c2), expect);
                    }
                }
            }
        }
    }

    fn c64(r: usize, cidx: usize) -> Complex64 {
        Complex64::new((2 * r + cidx) as f64 + 1.0, 0.0)
    }

    #[test]
    fn max_abs_diff_reports_first_worst_entry() {
        let a = Tensor::zeros(1, 1);
        let mut b = Tensor::zeros(1, 1);
        b.set(1, 0, c(0.5, 0.0));
        let (d, r, col) = a.max_abs_diff(&b).unwrap();
        assert_eq!((d, r, col), (0.5, 1, 0));
    }
}
