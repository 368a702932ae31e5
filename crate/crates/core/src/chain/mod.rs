//! Chain Hamiltonians with generalized off-center reflection symmetry.
//!
//! A [`ChainSpec`] describes a chain of `L = 2k` sites by its left half
//! (`a_i`, `b_i`, `c_i` for `i = 1..k-1`), a 2×2 central block on sites
//! `k, k+1`, a per-bond flip mask, and an optional symmetric edge potential.
//! [`ChainSpec::build`] expands it into a [`TridiagonalMatrix`]:
//!
//! ```text
//! H_{i,i}   = -a_i            (mirrored: H_{L+1-i, L+1-i} = -a_i)
//! H_{i,i+1} = -b_i, H_{i+1,i} = -c_i on left bond i
//! H_{k,k}   = -i alpha, H_{k+1,k+1} = -i gamma
//! H_{k,k+1} = -delta_upper, H_{k+1,k} = -delta_lower
//! H_{1,1}, H_{L,L} additionally carry -i beta
//! ```
//!
//! The right-half bond mirroring left bond `i` is bond `L - i` (sites
//! `L-i, L-i+1`). Unflipped it carries the exact reflection (`upper = -c_i`,
//! `lower = -b_i`); flipped it carries `upper = -b_i`, `lower = -c_i`.

mod families;
mod json;

pub use families::{family_a, family_b, family_c, family_d, legacy, random_spec, RNG_ALGORITHM};
pub use json::SpecMeta;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::C64;

const I: C64 = Complex64::new(0.0, 1.0);

/// Which sign of the pairwise-coalescence condition `delta = ±(gamma - alpha)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Central hopping that puts the restricted central block at its exceptional point.
pub fn pc_delta(alpha: f64, gamma: f64, branch: Branch) -> f64 {
    let half = (gamma - alpha) / 2.0;
    match branch {
        Branch::Plus => half,
        Branch::Minus => -half,
    }
}

/// The 2×2 block on the central sites,
/// `M = -[[i alpha, delta_upper], [delta_lower, i gamma]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralBlock {
    pub alpha: C64,
    pub gamma: C64,
    pub delta_upper: C64,
    pub delta_lower: C64,
}

impl CentralBlock {
    /// Real potentials and a symmetric real hopping.
    pub fn restricted(alpha: f64, gamma: f64, delta: f64) -> Self {
        CentralBlock {
            alpha: C64::new(alpha, 0.0),
            gamma: C64::new(gamma, 0.0),
            delta_upper: C64::new(delta, 0.0),
            delta_lower: C64::new(delta, 0.0),
        }
    }

    pub fn general(alpha: C64, gamma: C64, delta_upper: C64, delta_lower: C64) -> Self {
        CentralBlock {
            alpha,
            gamma,
            delta_upper,
            delta_lower,
        }
    }

    /// Restricted block tuned to its exceptional point.
    pub fn at_pc(alpha: f64, gamma: f64, branch: Branch) -> Self {
        Self::restricted(alpha, gamma, pc_delta(alpha, gamma, branch))
    }

    pub fn is_restricted(&self) -> bool {
        self.alpha.im == 0.0
            && self.gamma.im == 0.0
            && self.delta_upper.im == 0.0
            && self.delta_upper == self.delta_lower
    }

    pub fn ep_residual(&self) -> f64 {
        ep_residual(self)
    }

    /// Scale used to judge whether [`ep_residual`] is zero.
    pub(crate) fn scale(&self) -> f64 {
        let d = (self.alpha - self.gamma).norm();
        (self.delta_upper.norm() * self.delta_lower.norm())
            .max(d * d / 4.0)
            .max(1.0)
    }

    pub fn is_at_ep(&self, rel_tol: f64) -> bool {
        self.ep_residual() <= rel_tol * self.scale()
    }
}

/// `|delta_upper delta_lower - (alpha - gamma)^2 / 4|`; zero exactly when the
/// central block has the double eigenvalue `-i (alpha + gamma) / 2`.
pub fn ep_residual(block: &CentralBlock) -> f64 {
    let d = block.alpha - block.gamma;
    (block.delta_upper * block.delta_lower - d * d / 4.0).norm()
}

/// Generative description of a chain in the pairwise-coalescence class.
///
/// Fields are private so every instance has been validated; use the
/// `with_*` methods to derive variants.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    k: usize,
    a: Vec<C64>,
    b: Vec<C64>,
    c: Vec<C64>,
    flip_mask: Vec<bool>,
    central: CentralBlock,
    edge_beta: C64,
    meta: SpecMeta,
}

impl ChainSpec {
    /// Builds a spec with the default flip mask (right half flipped) and no edge potential.
    pub fn new(k: usize, a: Vec<C64>, b: Vec<C64>, c: Vec<C64>, central: CentralBlock) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidLength {
                len: 0,
                reason: "half-length k must be at least 1",
            });
        }
        for (name, v) in [("a", &a), ("b", &b), ("c", &c)] {
            if v.len() != k - 1 {
                return Err(Error::LengthMismatch {
                    name,
                    got: v.len(),
                    expected: k - 1,
                });
            }
        }
        Ok(ChainSpec {
            k,
            a,
            b,
            c,
            flip_mask: default_flip_mask(k),
            central,
            edge_beta: C64::new(0.0, 0.0),
            meta: SpecMeta::default(),
        })
    }

    pub fn with_flip_mask(mut self, mask: Vec<bool>) -> Result<Self> {
        let expected = 2 * (self.k - 1);
        if mask.len() != expected {
            return Err(Error::LengthMismatch {
                name: "flip_mask",
                got: mask.len(),
                expected,
            });
        }
        self.flip_mask = mask;
        Ok(self)
    }

    pub fn with_central(mut self, central: CentralBlock) -> Self {
        self.central = central;
        self
    }

    pub fn with_edge_beta(mut self, beta: C64) -> Self {
        self.edge_beta = beta;
        self
    }

    pub fn with_meta(mut self, meta: SpecMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        2 * self.k
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn a(&self) -> &[C64] {
        &self.a
    }

    pub fn b(&self) -> &[C64] {
        &self.b
    }

    pub fn c(&self) -> &[C64] {
        &self.c
    }

    pub fn flip_mask(&self) -> &[bool] {
        &self.flip_mask
    }

    pub fn central(&self) -> &CentralBlock {
        &self.central
    }

    pub fn edge_beta(&self) -> C64 {
        self.edge_beta
    }

    pub fn meta(&self) -> &SpecMeta {
        &self.meta
    }

    /// `eta_i = b_i c_i` for `i = 1..k-1` (index 0 holds `eta_1`).
    pub fn etas(&self) -> Vec<C64> {
        self.b.iter().zip(&self.c).map(|(b, c)| b * c).collect()
    }

    /// Off-center on-site coefficients as they enter `lambda I - H`: `a_i`,
    /// with `i beta` folded into `a_1`.
    pub fn effective_a(&self) -> Vec<C64> {
        let mut a = self.a.clone();
        if let Some(first) = a.first_mut() {
            *first += I * self.edge_beta;
        }
        a
    }

    pub fn build(&self) -> TridiagonalMatrix {
        build(self)
    }
}

/// Mask entries are ordered by bond position, skipping the central bond.
pub fn default_flip_mask(k: usize) -> Vec<bool> {
    let mut mask = vec![false; k - 1];
    mask.extend(std::iter::repeat_n(true, k - 1));
    mask
}

/// Expands a spec into its `L × L` matrix.
pub fn build(spec: &ChainSpec) -> TridiagonalMatrix {
    let k = spec.k;
    let len = 2 * k;
    let mut diag = vec![C64::new(0.0, 0.0); len];
    let mut upper = vec![C64::new(0.0, 0.0); len - 1];
    let mut lower = vec![C64::new(0.0, 0.0); len - 1];

    for i in 1..k {
        // Site i and its mirror L+1-i (1-based).
        diag[i - 1] = -spec.a[i - 1];
        diag[len - i] = -spec.a[i - 1];

        let (b, c) = (spec.b[i - 1], spec.c[i - 1]);
        let left = i - 1;
        let right = len - i - 1;
        let (lu, ll) = if spec.flip_mask[i - 1] { (c, b) } else { (b, c) };
        upper[left] = -lu;
        lower[left] = -ll;
        let (ru, rl) = if spec.flip_mask[k - 2 + (k - i)] {
            (b, c)
        } else {
            (c, b)
        };
        upper[right] = -ru;
        lower[right] = -rl;
    }

    let cb = &spec.central;
    diag[k - 1] = -I * cb.alpha;
    diag[k] = -I * cb.gamma;
    upper[k - 1] = -cb.delta_upper;
    lower[k - 1] = -cb.delta_lower;

    diag[0] -= I * spec.edge_beta;
    diag[len - 1] -= I * spec.edge_beta;

    TridiagonalMatrix { diag, upper, lower }
}

/// Concrete tridiagonal Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    diag: Vec<C64>,
    upper: Vec<C64>,
    lower: Vec<C64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<C64>, upper: Vec<C64>, lower: Vec<C64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::InvalidLength {
                len: 0,
                reason: "matrix must have at least one site",
            });
        }
        for (name, v) in [("upper", &upper), ("lower", &lower)] {
            if v.len() != n - 1 {
                return Err(Error::LengthMismatch {
                    name,
                    got: v.len(),
                    expected: n - 1,
                });
            }
        }
        Ok(TridiagonalMatrix { diag, upper, lower })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[C64] {
        &self.diag
    }

    /// `H_{j,j+1}`.
    pub fn upper(&self) -> &[C64] {
        &self.upper
    }

    /// `H_{j+1,j}`.
    pub fn lower(&self) -> &[C64] {
        &self.lower
    }

    /// Entry `(row, col)`, zero-based.
    pub fn get(&self, row: usize, col: usize) -> C64 {
        if row == col {
            self.diag[row]
        } else if col == row + 1 {
            self.upper[row]
        } else if row == col + 1 {
            self.lower[col]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|r| {
                let mut s = self.diag[r].norm();
                if r + 1 < n {
                    s += self.upper[r].norm();
                }
                if r > 0 {
                    s += self.lower[r - 1].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        self.upper.iter().chain(&self.lower).all(|z| *z == C64::new(0.0, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.diag.iter().sum()
    }

    /// Hermitian hoppings and on-site potentials with non-positive imaginary
    /// part: the dynamics can only lose norm.
    pub fn is_absorbing(&self) -> bool {
        self.upper.iter().zip(&self.lower).all(|(u, l)| *u == l.conj()) && self.diag.iter().all(|d| d.im <= 0.0)
    }

    pub fn is_hermitian(&self) -> bool {
        self.upper.iter().zip(&self.lower).all(|(u, l)| *u == l.conj()) && self.diag.iter().all(|d| d.im == 0.0)
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.len()];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        let n = self.len();
        for r in 0..n {
            let mut s = self.diag[r] * x[r];
            if r + 1 < n {
                s += self.upper[r] * x[r + 1];
            }
            if r > 0 {
                s += self.lower[r - 1] * x[r - 1];
            }
            y[r] = s;
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let n = self.len();
        (0..n).map(|r| (0..n).map(|c| self.get(r, c)).collect()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryKind {
    ExactOffCenter,
    GeneralizedOffCenter,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// Bond between sites `j` and `j+1` (1-based) whose hopping product differs from its mirror.
    Bond(usize),
    /// Site (1-based) whose on-site term differs from its mirror.
    Site(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub kind: SymmetryKind,
    pub violations: Vec<Violation>,
}

/// Classifies the reflection symmetry of an even-length chain, ignoring the
/// central two sites and the central bond.
pub fn check_symmetry(m: &TridiagonalMatrix) -> Result<SymmetryReport> {
    let len = m.len();
    if len % 2 != 0 {
        return Err(Error::InvalidLength {
            len,
            reason: "symmetry check needs an even number of sites",
        });
    }
    let k = len / 2;
    let scale = m.norm_inf().max(1.0);
    let tol = 1e-12 * scale;
    let close = |x: C64, y: C64, s: f64| (x - y).norm() <= tol * s;

    let mut site_violations = Vec::new();
    for j in 1..k {
        if !close(m.diag[j - 1], m.diag[len - j], 1.0) {
            site_violations.push(Violation::Site(j));
        }
    }

    let mut exact = true;
    let mut bond_violations = Vec::new();
    for j in 1..k {
        let (l, r) = (j - 1, len - j - 1);
        if !(close(m.upper[l], m.lower[r], 1.0) && close(m.lower[l], m.upper[r], 1.0)) {
            exact = false;
        }
        let pl = m.upper[l] * m.lower[l];
        let pr = m.upper[r] * m.lower[r];
        if !close(pl, pr, scale) {
            bond_violations.push(Violation::Bond(j));
        }
    }

    let kind = if !site_violations.is_empty() || !bond_violations.is_empty() {
        SymmetryKind::None
    } else if exact {
        SymmetryKind::ExactOffCenter
    } else {
        SymmetryKind::GeneralizedOffCenter
    };
    let mut violations = site_violations;
    violations.extend(bond_violations);
    Ok(SymmetryReport { kind, violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pc_delta_values() {
        assert_eq!(pc_delta(0.0, 2.0, Branch::Plus), 1.0);
        assert_eq!(pc_delta(1.5, 2.0, Branch::Minus), -0.25);
        assert_eq!(pc_delta(0.7, 0.7, Branch::Plus), 0.0);
        assert_eq!(pc_delta(0.7, 0.7, Branch::Minus), 0.0);
        let block = CentralBlock::at_pc(0.3, -1.9, Branch::Minus);
        assert!(block.ep_residual() < 1e-15);
    }

    #[test]
    fn ep_residual_values() {
        assert_eq!(ep_residual(&CentralBlock::restricted(0.0, 2.0, 1.0)), 0.0);
        let r = ep_residual(&CentralBlock::restricted(0.0, 2.0, 0.9));
        assert!((r - 0.19).abs() < 1e-15);
    }

    #[test]
    fn complex_block_at_ep_has_one_eigenvector() {
        let block = CentralBlock::general(c(0.0, 0.0), c(2.0, 0.0), c(0.0, 2.0), c(0.0, -0.5));
        assert!(block.ep_residual() < 1e-15);
        // M - z I must have rank one, z = -i (alpha + gamma) / 2.
        let z = -I * (block.alpha + block.gamma) / 2.0;
        let m = [
            [-I * block.alpha - z, -block.delta_upper],
            [-block.delta_lower, -I * block.gamma - z],
        ];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!(det.norm() < 1e-15);
        assert!(m[0][1].norm() > 0.1);
    }

    #[test]
    fn build_two_site_block() {
        let spec = ChainSpec::new(1, vec![], vec![], vec![], CentralBlock::restricted(0.0, 2.0, 1.0)).unwrap();
        let m = spec.build();
        assert_eq!(m.diag(), &[c(0.0, 0.0), c(0.0, -2.0)]);
        assert_eq!(m.upper(), &[c(-1.0, 0.0)]);
        assert_eq!(m.lower(), &[c(-1.0, 0.0)]);
    }

    #[test]
    fn build_places_coefficients_like_the_charpoly_matrix() {
        // k = 3, L = 6; lambda I - H must read
        // diag: l+a1, l+a2, l+i alpha, l+i gamma, l+a2, l+a1
        // upper: b1, b2, delta, b2, b1 ; lower: c1, c2, delta, c2, c1
        let a = vec![c(1.0, 0.1), c(2.0, 0.2)];
        let b = vec![c(3.0, 0.3), c(4.0, 0.4)];
        let cc = vec![c(5.0, 0.5), c(6.0, 0.6)];
        let spec = ChainSpec::new(
            3,
            a.clone(),
            b.clone(),
            cc.clone(),
            CentralBlock::restricted(0.5, 1.5, 0.5),
        )
        .unwrap();
        let m = spec.build();
        let neg = |v: &[C64]| v.iter().map(|z| -z).collect::<Vec<_>>();
        assert_eq!(m.diag(), &[-a[0], -a[1], c(0.0, -0.5), c(0.0, -1.5), -a[1], -a[0]]);
        assert_eq!(m.upper(), neg(&[b[0], b[1], c(0.5, 0.0), b[1], b[0]]).as_slice());
        assert_eq!(m.lower(), neg(&[cc[0], cc[1], c(0.5, 0.0), cc[1], cc[0]]).as_slice());
        assert_eq!(check_symmetry(&m).unwrap().kind, SymmetryKind::GeneralizedOffCenter);

        let exact = spec.clone().with_flip_mask(vec![false; 4]).unwrap().build();
        assert_eq!(exact.upper()[3], -cc[1]);
        assert_eq!(exact.lower()[3], -b[1]);
        assert_eq!(check_symmetry(&exact).unwrap().kind, SymmetryKind::ExactOffCenter);
    }

    #[test]
    fn edge_beta_lands_on_both_ends() {
        let spec = family_a(6, 0.0, 2.0, 1.0, c(0.3, 0.7)).unwrap();
        let m = spec.build();
        let expect = -I * c(0.3, 0.7);
        assert_eq!(m.diag()[0], expect);
        assert_eq!(m.diag()[5], expect);
        assert_eq!(spec.effective_a()[0], I * c(0.3, 0.7));
    }

    #[test]
    fn length_errors() {
        let cb = CentralBlock::restricted(0.0, 2.0, 1.0);
        assert!(matches!(
            ChainSpec::new(3, vec![c(0.0, 0.0)], vec![], vec![], cb),
            Err(Error::LengthMismatch { name: "a", .. })
        ));
        assert!(ChainSpec::new(0, vec![], vec![], vec![], cb).is_err());
        let spec = ChainSpec::new(2, vec![c(0.0, 0.0)], vec![c(1.0, 0.0)], vec![c(1.0, 0.0)], cb).unwrap();
        assert!(spec.with_flip_mask(vec![true]).is_err());
    }

    #[test]
    fn perturbed_hopping_breaks_symmetry() {
        let m = random_spec(4, 11, 1.0).unwrap().build();
        let mut upper = m.upper().to_vec();
        // Change the product on bond 2 by 1e-3.
        let prod = upper[1] * m.lower()[1];
        upper[1] *= (prod + 1e-3) / prod;
        let perturbed = TridiagonalMatrix::new(m.diag().to_vec(), upper, m.lower().to_vec()).unwrap();
        let report = check_symmetry(&perturbed).unwrap();
        assert_eq!(report.kind, SymmetryKind::None);
        assert_eq!(report.violations, vec![Violation::Bond(2)]);
    }

    #[test]
    fn odd_length_symmetry_check_fails() {
        let m = TridiagonalMatrix::new(vec![c(0.0, 0.0); 3], vec![c(1.0, 0.0); 2], vec![c(1.0, 0.0); 2]).unwrap();
        assert!(check_symmetry(&m).is_err());
    }

    #[test]
    fn absorbing_and_hermitian_flags() {
        let m = legacy(6, 0.0, 2.0).unwrap().build();
        assert!(m.is_absorbing());
        assert!(!m.is_hermitian());
        assert!(!legacy(6, -1.0, 1.0).unwrap().build().is_absorbing());
        assert!(legacy(6, 0.0, 0.0).unwrap().build().is_hermitian());
    }
}
