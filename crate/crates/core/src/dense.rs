//! Small dense complex matrices: the reference side of cross-checks
//! (Faddeev–LeVerrier, matrix exponential) and eigenbasis solves.

use std::ops::{Index, IndexMut};

use crate::chain::TridiagonalMatrix;
use crate::error::{Error, Result};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Square row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<C64>,
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.n + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.n + c]
    }
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_tridiagonal(t: &TridiagonalMatrix) -> Self {
        let n = t.len();
        let mut m = Self::zeros(n);
        for r in 0..n {
            m[(r, r)] = t.diag()[r];
            if r + 1 < n {
                m[(r, r + 1)] = t.upper()[r];
                m[(r + 1, r)] = t.lower()[r];
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let n = cols.len();
        let mut m = Self::zeros(n);
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                m[(r, c)] = *v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        DenseMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        DenseMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        DenseMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add_diag(&mut self, s: C64) {
        for i in 0..self.n {
            self[(i, i)] += s;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self[(r, c)] * x[c]).sum())
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|c| (0..self.n).map(|r| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Solves `self · X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut x = rhs.clone();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
                .unwrap_or(col);
            if a[(piv, col)].norm() == 0.0 {
                return Err(Error::Singular);
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    x.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = a[(col, col)];
            for r in col + 1..n {
                let f = a[(r, col)] / p;
                if f == ZERO {
                    continue;
                }
                for j in col..n {
                    let v = a[(col, j)];
                    a[(r, j)] -= f * v;
                }
                for j in 0..n {
                    let v = x[(col, j)];
                    x[(r, j)] -= f * v;
                }
            }
        }
        for col in (0..n).rev() {
            let p = a[(col, col)];
            for j in 0..n {
                let mut s = x[(col, j)];
                for k in col + 1..n {
                    s -= a[(col, k)] * x[(k, j)];
                }
                x[(col, j)] = s / p;
            }
        }
        Ok(x)
    }

    pub fn solve_vec(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.n;
        let mut rhs = Self::zeros(n);
        for (i, v) in b.iter().enumerate() {
            rhs[(i, 0)] = *v;
        }
        let x = self.solve(&rhs)?;
        Ok((0..n).map(|i| x[(i, 0)]).collect())
    }
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &DenseMatrix) -> Result<DenseMatrix> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA_13: f64 = 5.371920351148152;

    let n = a.dim();
    let norm = a.norm1();
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale(C64::new(2f64.powi(-s), 0.0));
    let id = DenseMatrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let r = |x: f64| C64::new(x, 0.0);

    let u_inner = a6
        .matmul(&a6.scale(r(B[13])).add(&a4.scale(r(B[11]))).add(&a2.scale(r(B[9]))))
        .add(&a6.scale(r(B[7])))
        .add(&a4.scale(r(B[5])))
        .add(&a2.scale(r(B[3])))
        .add(&id.scale(r(B[1])));
    let u = a.matmul(&u_inner);
    let v = a6
        .matmul(&a6.scale(r(B[12])).add(&a4.scale(r(B[10]))).add(&a2.scale(r(B[8]))))
        .add(&a6.scale(r(B[6])))
        .add(&a4.scale(r(B[4])))
        .add(&a2.scale(r(B[2])))
        .add(&id.scale(r(B[0])));

    let mut result = v.sub(&u).solve(&v.add(&u))?;
    for _ in 0..s {
        result = result.matmul(&result);
    }
    Ok(result)
}
