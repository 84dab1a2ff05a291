//! `{0,1}` matrices with products over F2 and over the boolean semiring.

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    /// Row-major entries.
    data: Vec<bool>,
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                write!(f, "{}", if self.get(r, c) { 1 } else { 0 })?;
            }
        }
        write!(f, "]")
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            data: vec![false; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            data: vec![true; rows * cols],
        }
    }

    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = BitMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v != 0);
            }
        }
        m
    }

    /// Matrix with the given rows encoded as bitmasks, bit `j` = column `j`.
    pub fn from_row_masks(rows: usize, cols: usize, masks: &[usize]) -> Self {
        assert_eq!(masks.len(), rows);
        let mut m = BitMatrix::zeros(rows, cols);
        for (i, &mask) in masks.iter().enumerate() {
            for j in 0..cols {
                m.set(i, j, mask >> j & 1 == 1);
            }
        }
        m
    }

    pub fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        let mut m = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, rng.gen::<bool>());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.data[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn row_weight(&self, r: usize) -> usize {
        (0..self.cols).filter(|&c| self.get(r, c)).count()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    pub fn row_mask(&self, r: usize) -> usize {
        (0..self.cols)
            .filter(|&c| self.get(r, c))
            .fold(0, |m, c| m | 1 << c)
    }

    pub fn at_most_one_per_row(&self) -> bool {
        (0..self.rows).all(|r| self.row_weight(r) <= 1)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == self.get(c, r)))
    }

    pub fn zero_diagonal(&self) -> bool {
        (0..self.rows.min(self.cols)).all(|i| !self.get(i, i))
    }

    /// Apply to a column vector encoded as a bitmask over F2 (XOR sums).
    pub fn apply_f2(&self, x: usize) -> usize {
        let mut y = 0usize;
        for r in 0..self.rows {
            let dot = (self.row_mask(r) & x).count_ones() & 1;
            y |= (dot as usize) << r;
        }
        y
    }

    /// Apply to a column vector encoded as a bitmask over the boolean
    /// semiring (`+ = or`, `x = and`).
    pub fn apply_bool(&self, x: usize) -> usize {
        let mut y = 0usize;
        for r in 0..self.rows {
            if self.row_mask(r) & x != 0 {
                y |= 1 << r;
            }
        }
        y
    }

    fn check_compose(&self, a: &BitMatrix) -> Result<()> {
        if self.cols != a.rows {
            return Err(Error::DimensionMismatch(
                self.rows, self.cols, a.rows, a.cols,
            ));
        }
        Ok(())
    }

    /// `self * a` over F2.
    pub fn mul_f2(&self, a: &BitMatrix) -> Result<BitMatrix> {
        self.check_compose(a)?;
        let mut out = BitMatrix::zeros(self.rows, a.cols);
        for r in 0..self.rows {
            for c in 0..a.cols {
                let mut acc = false;
                for k in 0..self.cols {
                    acc ^= self.get(r, k) & a.get(k, c);
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// `self * a` over the boolean semiring.
    pub fn mul_bool(&self, a: &BitMatrix) -> Result<BitMatrix> {
        self.check_compose(a)?;
        let mut out = BitMatrix::zeros(self.rows, a.cols);
        for r in 0..self.rows {
            for c in 0..a.cols {
                let mut acc = false;
                for k in 0..self.cols {
                    acc |= self.get(r, k) & a.get(k, c);
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// All `rows x cols` matrices in lexicographic order of their flattened
    /// entries; intended for exhaustive sweeps at desk scale.
    pub fn enumerate_all(rows: usize, cols: usize) -> impl Iterator<Item = BitMatrix> {
        let n = rows * cols;
        assert!(n < 24, "enumeration too large");
        (0..1usize << n).map(move |code| {
            let mut m = BitMatrix::zeros(rows, cols);
            for i in 0..n {
                if code >> i & 1 == 1 {
                    m.data[i] = true;
                }
            }
            m
        })
    }
}

/// Free functions matching the arrow-composition laws: products are taken
/// with `b` applied after `a`, i.e. `mul_f2(b, a) = b * a`.
pub fn mul_f2(b: &BitMatrix, a: &BitMatrix) -> Result<BitMatrix> {
    b.mul_f2(a)
}

pub fn mul_bool(b: &BitMatrix, a: &BitMatrix) -> Result<BitMatrix> {
    b.mul_bool(a)
}
