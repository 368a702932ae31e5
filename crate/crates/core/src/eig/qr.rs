//! Single-shift complex QR on an upper-Hessenberg matrix, generic over the
//! working precision.

use std::fmt::Debug;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::Num;

use super::ddouble::DoubleDouble;
use crate::chain::TridiagonalMatrix;
use crate::error::{Error, Result};
use crate::C64;

pub(crate) trait Real: Copy + Num + Neg<Output = Self> + PartialOrd + Debug {
    /// Relative size below which a subdiagonal entry is set to zero.
    const DEFLATION: f64;
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
}

impl Real for f64 {
    const DEFLATION: f64 = 1e-14;

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }

    fn abs(self) -> Self {
        f64::abs(self)
    }
}

impl Real for DoubleDouble {
    const DEFLATION: f64 = 1e-30;

    fn from_f64(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }

    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }

    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }

    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
}

type Cx<T> = Complex<T>;

fn cabs1<T: Real>(z: Cx<T>) -> T {
    z.re.abs() + z.im.abs()
}

fn cabs<T: Real>(z: Cx<T>) -> T {
    let (a, b) = (z.re.abs(), z.im.abs());
    let (big, small) = if a > b { (a, b) } else { (b, a) };
    if big.is_zero() {
        return big;
    }
    let r = small / big;
    big * (T::one() + r * r).sqrt()
}

fn csqrt<T: Real>(z: Cx<T>) -> Cx<T> {
    let r = cabs(z);
    if r.is_zero() {
        return Cx::new(T::zero(), T::zero());
    }
    let two = T::from_f64(2.0);
    let re = ((r + z.re.abs()) / two).sqrt();
    if z.re >= T::zero() {
        Cx::new(re, z.im / (two * re))
    } else {
        let im = if z.im >= T::zero() { re } else { -re };
        Cx::new(z.im.abs() / (two * re), im)
    }
}

fn lift<T: Real>(z: C64) -> Cx<T> {
    Cx::new(T::from_f64(z.re), T::from_f64(z.im))
}

/// Eigenvalue of the trailing 2×2 block closer to its last diagonal entry.
fn wilkinson_shift<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> Cx<T> {
    let two = T::from_f64(2.0);
    let half = Cx::new(T::one() / two, T::zero());
    let mean = (a + d) * half;
    let diff = (a - d) * half;
    let disc = csqrt(diff * diff + b * c);
    let (m1, m2) = (mean + disc, mean - disc);
    if cabs1(m1 - d) <= cabs1(m2 - d) {
        m1
    } else {
        m2
    }
}

/// All eigenvalues of `m` with the number of QR sweeps spent on each
/// (eigenvalues in deflation order, bottom of the matrix first found).
pub(crate) fn hessenberg_eigenvalues<T: Real>(m: &TridiagonalMatrix) -> Result<(Vec<C64>, Vec<usize>)> {
    let n = m.len();
    let zero = Cx::new(T::zero(), T::zero());
    let mut h = vec![zero; n * n];
    let at = |r: usize, c: usize| r * n + c;
    for r in 0..n {
        h[at(r, r)] = lift(m.diag()[r]);
        if r + 1 < n {
            h[at(r, r + 1)] = lift(m.upper()[r]);
            h[at(r + 1, r)] = lift(m.lower()[r]);
        }
    }

    let norm = T::from_f64(m.norm_inf().max(f64::MIN_POSITIVE));
    let tol = T::from_f64(T::DEFLATION);
    let max_total = 30 * n;

    let mut eigs = vec![C64::new(0.0, 0.0); n];
    let mut iters = vec![0usize; n];
    let mut rot: Vec<(Cx<T>, Cx<T>)> = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut its = 0usize;
    let mut total = 0usize;

    loop {
        // Locate the bottom unreduced block [l, hi].
        let mut l = hi;
        while l > 0 {
            let mut s = cabs1(h[at(l - 1, l - 1)]) + cabs1(h[at(l, l)]);
            if s.is_zero() {
                s = norm;
            }
            if cabs1(h[at(l, l - 1)]) <= tol * s {
                h[at(l, l - 1)] = zero;
                break;
            }
            l -= 1;
        }

        if l == hi {
            let z = h[at(hi, hi)];
            eigs[hi] = C64::new(z.re.to_f64(), z.im.to_f64());
            iters[hi] = its;
            its = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }

        if total >= max_total {
            return Err(Error::NoConvergence {
                index: hi,
                iterations: total,
            });
        }
        its += 1;
        total += 1;

        let shift = if its % 30 == 0 {
            // Exceptional shift to break a stall.
            let mut s = cabs1(h[at(hi, hi - 1)]);
            if hi >= l + 2 {
                s = s + cabs1(h[at(hi - 1, hi - 2)]);
            }
            h[at(hi, hi)] + Cx::new(s * T::from_f64(0.75), s * T::from_f64(0.4375))
        } else {
            wilkinson_shift(
                h[at(hi - 1, hi - 1)],
                h[at(hi - 1, hi)],
                h[at(hi, hi - 1)],
                h[at(hi, hi)],
            )
        };

        for i in l..=hi {
            h[at(i, i)] = h[at(i, i)] - shift;
        }

        // H - sigma I = Q R, one Givens rotation per subdiagonal entry.
        rot.clear();
        for j in l..hi {
            let a = h[at(j, j)];
            let b = h[at(j + 1, j)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if r.is_zero() {
                (Cx::new(T::one(), T::zero()), zero)
            } else {
                let rc = Cx::new(r, T::zero());
                (a / rc, b / rc)
            };
            for col in j..=hi {
                let x = h[at(j, col)];
                let y = h[at(j + 1, col)];
                h[at(j, col)] = c.conj() * x + s.conj() * y;
                h[at(j + 1, col)] = c * y - s * x;
            }
            rot.push((c, s));
        }

        // R Q + sigma I.
        for (idx, (c, s)) in rot.iter().enumerate() {
            let j = l + idx;
            for row in l..=(j + 1).min(hi) {
                let x = h[at(row, j)];
                let y = h[at(row, j + 1)];
                h[at(row, j)] = x * *c + y * *s;
                h[at(row, j + 1)] = y * c.conj() - x * s.conj();
            }
        }

        for i in l..=hi {
            h[at(i, i)] = h[at(i, i)] + shift;
        }
    }

    Ok((eigs, iters))
}
