//! Non-orthogonality of right eigenvectors.

use crate::eig::{self, Precision, Spectrum};
use crate::error::Result;
use crate::sweep::{par_map, Family};
use crate::C64;

/// Gram matrix `U_{mu nu} = <mu|nu>` of the unit right eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    n: usize,
    entries: Vec<C64>,
}

impl OverlapMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, mu: usize, nu: usize) -> C64 {
        self.entries[mu * self.n + nu]
    }

    /// `|U_{mu nu}|` in row-major order.
    pub fn abs_entries(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.norm()).collect()
    }

    /// Largest `|U_{mu nu}|` with `mu != nu`.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut best: f64 = 0.0;
        for mu in 0..self.n {
            for nu in 0..self.n {
                if mu != nu {
                    best = best.max(self.get(mu, nu).norm());
                }
            }
        }
        best
    }

    fn minus_identity(&self) -> impl Iterator<Item = C64> + '_ {
        self.entries
            .iter()
            .enumerate()
            .map(move |(i, z)| if i / self.n == i % self.n { z - 1.0 } else { *z })
    }
}

/// Conjugate-linear in the left argument.
pub fn overlap_matrix(s: &Spectrum) -> OverlapMatrix {
    let n = s.eigenvectors.len();
    let mut entries = vec![C64::new(0.0, 0.0); n * n];
    for mu in 0..n {
        for nu in mu..n {
            let z: C64 = s.eigenvectors[mu]
                .iter()
                .zip(&s.eigenvectors[nu])
                .map(|(a, b)| a.conj() * b)
                .sum();
            entries[mu * n + nu] = z;
            entries[nu * n + mu] = z.conj();
        }
    }
    OverlapMatrix { n, entries }
}

/// `(1/L) sum |(U - I)_{mu nu}|`.
pub fn f1(u: &OverlapMatrix) -> f64 {
    if u.n == 0 {
        return 0.0;
    }
    u.minus_identity().map(|z| z.norm()).sum::<f64>() / u.n as f64
}

/// Frobenius norm of `U - I`.
pub fn f2(u: &OverlapMatrix) -> f64 {
    u.minus_identity().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonorthoRow {
    pub gamma: f64,
    pub f1: f64,
    pub f2: f64,
    pub distinct_count: usize,
}

/// `f1`, `f2` and the distinct-eigenvalue count at each `gamma`, in grid order.
/// Spectra are computed in extended precision.
pub fn sweep_nonortho(
    family: &Family,
    gammas: &[f64],
    tol_distinct: f64,
    workers: Option<usize>,
) -> Result<Vec<NonorthoRow>> {
    par_map(gammas, workers, |gamma| {
        let m = family.matrix_at(gamma)?;
        let s = Spectrum::compute_with(&m, Precision::Extended)?;
        let u = overlap_matrix(&s);
        Ok(NonorthoRow {
            gamma,
            f1: f1(&u),
            f2: f2(&u),
            distinct_count: eig::distinct_count(&s.eigenvalues, tol_distinct),
        })
    })
}

/// Index of the largest value (first on ties).
pub fn argmax(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
}
