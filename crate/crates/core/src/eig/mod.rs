//! Spectra of tridiagonal Hamiltonians.
//!
//! Eigenvalues come from shifted complex QR on the (already Hessenberg)
//! matrix, optionally in double-double precision. Double precision resolves
//! a coalesced pair to about `sqrt(eps) ~ 1e-8`, but a four-fold cluster
//! only to `eps^(1/4) ~ 1e-4`, which is coarser than the `1e-5` counting
//! rule; [`Precision::Extended`] brings that down to about `1e-8`.
//!
//! Right eigenvectors are built by solving the eigenvalue equation row by
//! row from `z_1 = 1`. Every eigenvalue of an unreduced tridiagonal matrix
//! therefore has a one-dimensional eigenspace, which is why coalesced
//! eigenvalues come with coalesced eigenvectors.

mod ddouble;
mod qr;

pub use ddouble::DoubleDouble;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::TridiagonalMatrix;
use crate::error::{Error, Result};
use crate::C64;

/// Two eigenvalues closer than this are counted as one.
pub const DISTINCT_TOL: f64 = 1e-5;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    #[default]
    Double,
    /// Double-double arithmetic inside the QR iteration.
    Extended,
}

/// Eigenvalues in canonical order together with the QR sweeps each took.
pub fn eigenvalues_with_iterations(m: &TridiagonalMatrix, precision: Precision) -> Result<(Vec<C64>, Vec<usize>)> {
    let (eigs, iters) = match precision {
        Precision::Double => qr::hessenberg_eigenvalues::<f64>(m)?,
        Precision::Extended => qr::hessenberg_eigenvalues::<DoubleDouble>(m)?,
    };
    let order = canonical_order(&eigs, DISTINCT_TOL);
    Ok((
        order.iter().map(|&i| eigs[i]).collect(),
        order.iter().map(|&i| iters[i]).collect(),
    ))
}

/// All `L` eigenvalues (with multiplicity) in canonical order, double precision.
pub fn eigenvalues(m: &TridiagonalMatrix) -> Result<Vec<C64>> {
    eigenvalues_in(m, Precision::Double)
}

pub fn eigenvalues_in(m: &TridiagonalMatrix, precision: Precision) -> Result<Vec<C64>> {
    Ok(eigenvalues_with_iterations(m, precision)?.0)
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `||H v - lambda v||_2`.
pub fn residual(m: &TridiagonalMatrix, lambda: C64, v: &[C64]) -> f64 {
    let hv = m.matvec(v);
    hv.iter()
        .zip(v)
        .map(|(h, x)| (h - lambda * x).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Unit 2-norm, first significant component rotated onto the positive real axis.
fn normalize_gauge(v: &mut [C64]) {
    let n = vec_norm(v);
    if n == 0.0 {
        return;
    }
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let phase = v
        .iter()
        .find(|z| z.norm() > 1e-12 * max)
        .map(|z| z.conj() / z.norm())
        .unwrap_or(C64::new(1.0, 0.0));
    let s = phase / n;
    for z in v.iter_mut() {
        *z *= s;
    }
}

fn forward_recursion(m: &TridiagonalMatrix, lambda: C64) -> Vec<C64> {
    let n = m.len();
    let (d, u, l) = (m.diag(), m.upper(), m.lower());
    let mut z = vec![ZERO; n];
    z[0] = C64::new(1.0, 0.0);
    for j in 0..n - 1 {
        let mut s = (d[j] - lambda) * z[j];
        if j > 0 {
            s += l[j - 1] * z[j - 1];
        }
        z[j + 1] = -s / u[j];
        let big = z[j + 1].norm();
        if big > 1e150 {
            for x in z[..=j + 1].iter_mut() {
                *x /= big;
            }
        }
    }
    z
}

/// LU factors of a shifted tridiagonal matrix with row interchanges.
struct TridiagLu {
    dl: Vec<C64>,
    d: Vec<C64>,
    du: Vec<C64>,
    du2: Vec<C64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(m: &TridiagonalMatrix, lambda: C64) -> Self {
        let n = m.len();
        let floor = f64::EPSILON * m.norm_inf().max(f64::MIN_POSITIVE);
        let mut d: Vec<C64> = m.diag().iter().map(|x| x - lambda).collect();
        let mut du = m.upper().to_vec();
        let mut dl = m.lower().to_vec();
        let mut du2 = vec![ZERO; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if dl[i].norm() > d[i].norm() {
                swapped[i] = true;
                std::mem::swap(&mut d[i], &mut dl[i]);
                std::mem::swap(&mut du[i], &mut d[i + 1]);
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = ZERO;
                }
                // Row i now holds the old row i+1; dl[i] holds the old pivot.
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
                if i + 2 < n {
                    du[i + 1] -= f * du2[i];
                }
            } else {
                if d[i] == ZERO {
                    d[i] = C64::new(floor, 0.0);
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            }
        }
        if let Some(last) = d.last_mut() {
            if last.norm() < floor {
                *last = C64::new(floor, 0.0);
            }
        }
        for x in d.iter_mut() {
            if *x == ZERO {
                *x = C64::new(floor, 0.0);
            }
        }
        TridiagLu {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [C64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            let t = b[i];
            b[i + 1] -= self.dl[i] * t;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.du2[i] * b[i + 2];
            }
            b[i] = s / self.d[i];
        }
    }
}

fn inverse_iteration(m: &TridiagonalMatrix, lambda: C64) -> Vec<C64> {
    let n = m.len();
    let seed = lambda.re.to_bits() ^ lambda.im.to_bits().rotate_left(29);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let lu = TridiagLu::factor(m, lambda);
    for _ in 0..4 {
        lu.solve(&mut x);
        let nrm = vec_norm(&x);
        if !nrm.is_finite() || nrm == 0.0 {
            break;
        }
        x.iter_mut().for_each(|z| *z /= nrm);
    }
    x
}

/// Right eigenvector for an (approximate) eigenvalue `lambda`.
///
/// Solves rows `1..L-1` of `(H - lambda) z = 0` forward from `z_1 = 1`.
/// Falls back to inverse iteration when a superdiagonal entry is below
/// `1e-10 ||H||` or the recursion leaves a residual above `1e-8 ||H||`.
/// Exactly diagonal matrices return the nearest basis vector.
pub fn eigenvector_for(m: &TridiagonalMatrix, lambda: C64) -> Result<Vec<C64>> {
    let n = m.len();
    let norm = m.norm_inf();
    if m.is_diagonal() {
        let j = (0..n)
            .min_by(|&a, &b| (m.diag()[a] - lambda).norm().total_cmp(&(m.diag()[b] - lambda).norm()))
            .unwrap_or(0);
        let mut e = vec![ZERO; n];
        e[j] = C64::new(1.0, 0.0);
        return Ok(e);
    }

    let accept = 1e-8 * norm;
    let mut best: Option<(f64, Vec<C64>)> = None;
    if m.upper().iter().all(|u| u.norm() >= 1e-10 * norm) {
        let mut z = forward_recursion(m, lambda);
        if z.iter().all(|x| x.is_finite()) {
            normalize_gauge(&mut z);
            let r = residual(m, lambda, &z);
            if r <= accept {
                return Ok(z);
            }
            best = Some((r, z));
        }
    }

    let mut z = inverse_iteration(m, lambda);
    normalize_gauge(&mut z);
    let r = residual(m, lambda, &z);
    if best.as_ref().is_none_or(|(rb, _)| r < *rb) {
        best = Some((r, z));
    }
    let (r, z) = best.expect("inverse iteration always yields a candidate");
    let bound = 1e-6 * norm;
    if r > bound || !r.is_finite() {
        return Err(Error::EigenvectorResidual {
            lambda,
            residual: r,
            bound,
        });
    }
    Ok(z)
}

/// Eigenvalues in canonical order with unit-norm, phase-fixed right eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    /// `eigenvectors[mu]` belongs to `eigenvalues[mu]`.
    pub eigenvectors: Vec<Vec<C64>>,
    pub iterations: Vec<usize>,
}

impl Spectrum {
    pub fn compute(m: &TridiagonalMatrix) -> Result<Self> {
        Self::compute_with(m, Precision::Double)
    }

    pub fn compute_with(m: &TridiagonalMatrix, precision: Precision) -> Result<Self> {
        let n = m.len();
        if m.is_diagonal() {
            let eigs = m.diag().to_vec();
            let order = canonical_order(&eigs, DISTINCT_TOL);
            let eigenvectors = order
                .iter()
                .map(|&j| {
                    let mut e = vec![ZERO; n];
                    e[j] = C64::new(1.0, 0.0);
                    e
                })
                .collect();
            return Ok(Spectrum {
                eigenvalues: order.iter().map(|&j| eigs[j]).collect(),
                eigenvectors,
                iterations: vec![0; n],
            });
        }
        let (eigenvalues, iterations) = eigenvalues_with_iterations(m, precision)?;
        let eigenvectors = eigenvalues
            .iter()
            .map(|&l| eigenvector_for(m, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Spectrum {
            eigenvalues,
            eigenvectors,
            iterations,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest `||H v - lambda v||` over all pairs.
    pub fn max_residual(&self, m: &TridiagonalMatrix) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(l, v)| residual(m, *l, v))
            .fold(0.0, f64::max)
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Single-linkage components at linkage distance `tol`, as lists of indices.
fn linkage_components(eigs: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let n = eigs.len();
    let mut by_re: Vec<usize> = (0..n).collect();
    by_re.sort_by(|&a, &b| eigs[a].re.total_cmp(&eigs[b].re));
    let mut parent: Vec<usize> = (0..n).collect();
    for (pos, &i) in by_re.iter().enumerate() {
        for &j in &by_re[pos + 1..] {
            if eigs[j].re - eigs[i].re > tol {
                break;
            }
            if (eigs[i] - eigs[j]).norm() <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Number of eigenvalue clusters when values within `tol` of each other
/// (transitively) are identified.
pub fn distinct_count(eigs: &[C64], tol: f64) -> usize {
    linkage_components(eigs, tol).len()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Mean of the member eigenvalues.
    pub representative: C64,
    pub multiplicity: usize,
    /// Indices into the input slice.
    pub members: Vec<usize>,
}

fn cmp_re_im(a: C64, b: C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Clusters in canonical order (real part, then imaginary part; real parts
/// within `tol` count as ties).
pub fn cluster(eigs: &[C64], tol: f64) -> Vec<Cluster> {
    let mut clusters: Vec<Cluster> = linkage_components(eigs, tol)
        .into_iter()
        .map(|mut members| {
            members.sort_by(|&a, &b| cmp_re_im(eigs[a], eigs[b]));
            let sum: C64 = members.iter().map(|&i| eigs[i]).sum();
            Cluster {
                representative: sum / members.len() as f64,
                multiplicity: members.len(),
                members,
            }
        })
        .collect();

    clusters.sort_by(|a, b| a.representative.re.total_cmp(&b.representative.re));
    // Runs of (numerically) equal real parts are ordered by imaginary part.
    let mut start = 0;
    while start < clusters.len() {
        let mut end = start + 1;
        while end < clusters.len() && clusters[end].representative.re - clusters[end - 1].representative.re <= tol {
            end += 1;
        }
        clusters[start..end].sort_by(|a, b| cmp_re_im_swapped(a.representative, b.representative));
        start = end;
    }
    clusters
}

fn cmp_re_im_swapped(a: C64, b: C64) -> std::cmp::Ordering {
    a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re))
}

/// Permutation putting `eigs` in canonical order with cluster members adjacent.
pub fn canonical_order(eigs: &[C64], tol: f64) -> Vec<usize> {
    cluster(eigs, tol).into_iter().flat_map(|c| c.members).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{legacy, TridiagonalMatrix};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn open_chain(len: usize) -> TridiagonalMatrix {
        TridiagonalMatrix::new(
            vec![c(0.0, 0.0); len],
            vec![c(-1.0, 0.0); len - 1],
            vec![c(-1.0, 0.0); len - 1],
        )
        .unwrap()
    }

    #[test]
    fn two_site_ep() {
        let m = legacy(2, 0.0, 2.0).unwrap().build();
        let e = eigenvalues(&m).unwrap();
        for z in &e {
            assert!((z - c(0.0, -1.0)).norm() < 1e-7, "{z}");
        }
        let v = eigenvector_for(&m, c(0.0, -1.0)).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((v[0] - c(s, 0.0)).norm() < 1e-14);
        assert!((v[1] - c(0.0, s)).norm() < 1e-14);
    }

    #[test]
    fn open_chain_dispersion() {
        let m = open_chain(4);
        let e = eigenvalues(&m).unwrap();
        let mut expect: Vec<f64> = (1..=4)
            .map(|n| -2.0 * (std::f64::consts::PI * n as f64 / 5.0).cos())
            .collect();
        expect.sort_by(f64::total_cmp);
        for (z, x) in e.iter().zip(&expect) {
            assert!((z.re - x).abs() < 1e-13 && z.im.abs() < 1e-13, "{z} vs {x}");
        }
        assert!((expect[3] - 1.618033988749895).abs() < 1e-12);
        // Extremal mode of -adjacency is sign-definite.
        let v = eigenvector_for(&m, e[0]).unwrap();
        assert!(v.iter().all(|z| z.re > 0.0 && z.im.abs() < 1e-12));
    }

    #[test]
    fn legacy_pc_has_five_double_clusters() {
        let m = legacy(10, 0.0, 2.0).unwrap().build();
        let e = eigenvalues(&m).unwrap();
        assert_eq!(distinct_count(&e, DISTINCT_TOL), 5);
        let cl = cluster(&e, DISTINCT_TOL);
        assert_eq!(cl.len(), 5);
        assert!(cl.iter().all(|c| c.multiplicity == 2));
        // Coalesced pairs sit at consecutive canonical indices.
        for (j, cl) in cl.iter().enumerate() {
            assert_eq!(cl.members, vec![2 * j, 2 * j + 1]);
        }
    }

    #[test]
    fn coalesced_pair_vectors_are_parallel() {
        let m = legacy(10, 0.0, 2.0).unwrap().build();
        let s = Spectrum::compute(&m).unwrap();
        for j in 0..5 {
            let (u, v) = (&s.eigenvectors[2 * j], &s.eigenvectors[2 * j + 1]);
            let overlap: C64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
            assert!(overlap.norm() >= 1.0 - 1e-4);
        }
        assert!(s.max_residual(&m) <= 1e-8 * m.norm_inf());
    }

    #[test]
    fn hermitian_clusters_are_singletons() {
        let m = open_chain(9);
        let e = eigenvalues(&m).unwrap();
        let cl = cluster(&e, DISTINCT_TOL);
        assert_eq!(cl.len(), 9);
        assert!(cl.iter().all(|c| c.multiplicity == 1));
    }

    #[test]
    fn canonical_order_groups_ties_by_imaginary_part() {
        // Two pairs on the imaginary axis with noisy real parts.
        let eigs = [c(1e-9, 2.0), c(-1e-9, 1.0), c(-2e-9, 2.0), c(3e-9, 1.0), c(-1.0, 0.0)];
        let order = canonical_order(&eigs, DISTINCT_TOL);
        assert_eq!(order[0], 4);
        assert_eq!(
            &order[1..3].iter().map(|&i| eigs[i].im).collect::<Vec<_>>(),
            &[1.0, 1.0]
        );
        assert_eq!(
            &order[3..5].iter().map(|&i| eigs[i].im).collect::<Vec<_>>(),
            &[2.0, 2.0]
        );
    }

    #[test]
    fn single_linkage_chains() {
        let eigs = [c(0.0, 0.0), c(0.8e-5, 0.0), c(1.6e-5, 0.0), c(1.0, 0.0)];
        assert_eq!(distinct_count(&eigs, 1e-5), 2);
        assert_eq!(distinct_count(&[], 1e-5), 0);
    }

    #[test]
    fn diagonal_matrix_uses_basis_vectors() {
        let m = TridiagonalMatrix::new(
            vec![c(2.0, 0.0), c(1.0, 0.0), c(3.0, -1.0)],
            vec![c(0.0, 0.0); 2],
            vec![c(0.0, 0.0); 2],
        )
        .unwrap();
        let s = Spectrum::compute(&m).unwrap();
        assert_eq!(s.eigenvalues, vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, -1.0)]);
        assert_eq!(s.eigenvectors[0], vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(eigenvector_for(&m, c(3.0, -1.0)).unwrap()[2], c(1.0, 0.0));
    }

    #[test]
    fn broken_bond_uses_inverse_iteration() {
        // Two decoupled blocks: recursion cannot cross the zero hopping.
        let m = TridiagonalMatrix::new(
            vec![c(0.0, 0.0), c(0.0, 0.0), c(5.0, 0.0), c(5.0, 0.0)],
            vec![c(-1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
            vec![c(-1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        )
        .unwrap();
        let s = Spectrum::compute(&m).unwrap();
        assert!(s.max_residual(&m) < 1e-10);
        let v = &s.eigenvectors[3];
        assert!(v[0].norm() < 1e-10 && v[1].norm() < 1e-10);
    }

    #[test]
    fn far_from_eigenvalue_is_an_error() {
        let m = open_chain(4);
        assert!(matches!(
            eigenvector_for(&m, c(0.3, 0.2)),
            Err(Error::EigenvectorResidual { .. })
        ));
    }

    #[test]
    fn extended_precision_agrees_on_simple_spectra() {
        let m = legacy(8, 0.3, 1.1).unwrap().build();
        let a = eigenvalues_in(&m, Precision::Double).unwrap();
        let b = eigenvalues_in(&m, Precision::Extended).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn one_by_one() {
        let m = TridiagonalMatrix::new(vec![c(0.0, -2.0)], vec![], vec![]).unwrap();
        assert_eq!(eigenvalues(&m).unwrap(), vec![c(0.0, -2.0)]);
        assert_eq!(Spectrum::compute(&m).unwrap().eigenvectors, vec![vec![c(1.0, 0.0)]]);
    }
}
