//! Characteristic polynomials of chain Hamiltonians.
//!
//! `P_n` denotes the determinant of the leading `n × n` block of `lambda I - H`.
//! For a chain in the coalescence class with its central block at the
//! exceptional point, `P_L = F^2` with `F = P_k + i (gamma - alpha)/2 P_{k-1}`.
//! [`verify_pc`] checks that square identity coefficient-wise when the spec is
//! available and falls back to eigenvalue multiplicities otherwise.

mod poly;

pub use poly::{poly_add, poly_eval, poly_mul, poly_scale, poly_sub, Poly};

use serde::Serialize;

use crate::chain::{ChainSpec, TridiagonalMatrix};
use crate::dense::DenseMatrix;
use crate::eig::{self, Precision};
use crate::error::{Error, Result};
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

/// Largest matrix accepted by [`charpoly_oracle`].
pub const ORACLE_MAX_LEN: usize = 12;

/// `P_0, ..., P_L` from `P_n = (lambda - H_nn) P_{n-1} - H_{n-1,n} H_{n,n-1} P_{n-2}`.
pub fn principal_minors(m: &TridiagonalMatrix) -> Vec<Poly> {
    let n = m.len();
    let mut out = Vec::with_capacity(n + 1);
    out.push(Poly::one());
    for j in 0..n {
        let mut next = &Poly::linear(-m.diag()[j]) * &out[j];
        if j > 0 {
            let eta = m.upper()[j - 1] * m.lower()[j - 1];
            next = &next - &out[j - 1].scale(eta);
        }
        out.push(next);
    }
    out
}

/// Consecutive minors `(P_n, P_{n-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPair {
    pub hi: Poly,
    pub lo: Poly,
}

impl PolyPair {
    /// One step of the minor recurrence with diagonal term `mu` and bond product `eta`.
    pub fn step(&self, mu: &Poly, eta: C64) -> PolyPair {
        PolyPair {
            hi: &(mu * &self.hi) - &self.lo.scale(eta),
            lo: self.hi.clone(),
        }
    }
}

/// 2×2 matrix with polynomial entries.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub m11: Poly,
    pub m12: Poly,
    pub m21: Poly,
    pub m22: Poly,
}

impl TransferMatrix {
    pub fn new(m11: Poly, m12: Poly, m21: Poly, m22: Poly) -> Self {
        TransferMatrix { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        Self::new(Poly::one(), Poly::zero(), Poly::zero(), Poly::one())
    }

    pub fn mul(&self, rhs: &TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            m11: &(&self.m11 * &rhs.m11) + &(&self.m12 * &rhs.m21),
            m12: &(&self.m11 * &rhs.m12) + &(&self.m12 * &rhs.m22),
            m21: &(&self.m21 * &rhs.m11) + &(&self.m22 * &rhs.m21),
            m22: &(&self.m21 * &rhs.m12) + &(&self.m22 * &rhs.m22),
        }
    }

    pub fn det(&self) -> Poly {
        &(&self.m11 * &self.m22) - &(&self.m12 * &self.m21)
    }
}

fn need_k2(spec: &ChainSpec) -> Result<()> {
    if spec.k() < 2 {
        return Err(Error::InvalidArgument(format!(
            "transfer products need k >= 2, got k = {}",
            spec.k()
        )));
    }
    Ok(())
}

/// `T = prod_{i=1}^{k-1} [[lambda + a_i, -eta_i], [1, 0]]`, multiplied left to right.
pub fn transfer_t(spec: &ChainSpec) -> Result<TransferMatrix> {
    need_k2(spec)?;
    let a = spec.effective_a();
    let eta = spec.etas();
    Ok(a.iter().zip(&eta).fold(TransferMatrix::identity(), |acc, (ai, ei)| {
        acc.mul(&TransferMatrix::new(
            Poly::linear(*ai),
            Poly::constant(-ei),
            Poly::one(),
            Poly::zero(),
        ))
    }))
}

/// `A = prod_{i=1}^{k-1} [[lambda + a_i, 1], [-eta_{i-1}, 0]]` with `eta_0 = 0`.
pub fn transfer_a(spec: &ChainSpec) -> Result<TransferMatrix> {
    need_k2(spec)?;
    let a = spec.effective_a();
    let eta = spec.etas();
    Ok(a.iter().enumerate().fold(TransferMatrix::identity(), |acc, (i, ai)| {
        let prev = if i == 0 { C64::new(0.0, 0.0) } else { eta[i - 1] };
        acc.mul(&TransferMatrix::new(
            Poly::linear(*ai),
            Poly::one(),
            Poly::constant(-prev),
            Poly::zero(),
        ))
    }))
}

/// Largest relative deviation in `A11 = T11` and `A12 = -T12 / eta_{k-1}`.
pub fn verify_at_relation(spec: &ChainSpec) -> Result<f64> {
    let t = transfer_t(spec)?;
    let a = transfer_a(spec)?;
    let k = spec.k();
    let eta = spec.etas()[k - 2];
    if eta == C64::new(0.0, 0.0) {
        return Err(Error::DegenerateEta { index: k - 1 });
    }
    let r11 = a.m11.rel_distance(&t.m11, &t.m11);
    let rhs = t.m12.scale(-1.0 / eta);
    let r12 = a.m12.rel_distance(&rhs, &rhs);
    Ok(r11.max(r12))
}

fn square_candidate(spec: &ChainSpec, minors: &[Poly]) -> Poly {
    let k = spec.k();
    let cb = spec.central();
    let coef = I * (cb.gamma - cb.alpha) / 2.0;
    &minors[k] + &minors[k - 1].scale(coef)
}

/// `F = P_k + i (gamma - alpha)/2 P_{k-1}`, whose square is `P_L` at the
/// central exceptional point.
pub fn square_factor(spec: &ChainSpec) -> Result<Poly> {
    let cb = spec.central();
    if !cb.is_restricted() || !cb.is_at_ep(1e-12) {
        return Err(Error::NotRestrictedEp {
            residual: cb.ep_residual(),
        });
    }
    Ok(square_candidate(spec, &principal_minors(&spec.build())))
}

/// `|P_L - F^2| / |P_L|` (max-coefficient norms) for the candidate factor,
/// whether or not the central block is at its exceptional point. Applies to
/// complex central blocks as well.
pub fn square_residual(spec: &ChainSpec) -> f64 {
    let minors = principal_minors(&spec.build());
    let f = square_candidate(spec, &minors);
    let pl = &minors[spec.len()];
    pl.rel_distance(&(&f * &f), pl)
}

/// Residual of `P_2k = P_{k+1} P_{k-1} - eta_{k-1} P_k P_{k-2}` (requires `k >= 2`).
pub fn four_minor_residual(spec: &ChainSpec) -> Result<f64> {
    need_k2(spec)?;
    let k = spec.k();
    let p = principal_minors(&spec.build());
    let eta = spec.etas()[k - 2];
    let rhs = &(&p[k + 1] * &p[k - 1]) - &(&p[k] * &p[k - 2]).scale(eta);
    Ok(p[2 * k].rel_distance(&rhs, &p[2 * k]))
}

/// Residuals of the two recurrence steps across the central block:
/// `P_{k+1} = (lambda + i gamma) P_k - delta_u delta_l P_{k-1}` and
/// `P_k = (lambda + i alpha) P_{k-1} - eta_{k-1} P_{k-2}` (requires `k >= 2`).
pub fn central_recursion_residual(spec: &ChainSpec) -> Result<f64> {
    need_k2(spec)?;
    let k = spec.k();
    let p = principal_minors(&spec.build());
    let cb = spec.central();
    let eta = spec.etas()[k - 2];
    let upper = &(&Poly::linear(I * cb.gamma) * &p[k]) - &p[k - 1].scale(cb.delta_upper * cb.delta_lower);
    let lower = &(&Poly::linear(I * cb.alpha) * &p[k - 1]) - &p[k - 2].scale(eta);
    Ok(p[k + 1]
        .rel_distance(&upper, &p[k + 1])
        .max(p[k].rel_distance(&lower, &p[k])))
}

/// Characteristic polynomial `det(lambda I - H)` by the Faddeev–LeVerrier trace recursion.
pub fn charpoly_oracle(m: &TridiagonalMatrix) -> Result<Poly> {
    let n = m.len();
    if n > ORACLE_MAX_LEN {
        return Err(Error::OracleGuard {
            len: n,
            max: ORACLE_MAX_LEN,
        });
    }
    let a = DenseMatrix::from_tridiagonal(m);
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    let mut mk = DenseMatrix::zeros(n);
    for k in 1..=n {
        mk = a.matmul(&mk);
        mk.add_diag(coeffs[n - k + 1]);
        coeffs[n - k] = -a.matmul(&mk).trace() / k as f64;
    }
    Ok(Poly::new(coeffs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertMode {
    Symbolic,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Bound on the relative `P_L - F^2` residual.
    pub certify: f64,
    /// Eigenvalue clustering distance.
    pub distinct: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            certify: 1e-8,
            distinct: eig::DISTINCT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcCertificate {
    pub mode: CertMode,
    pub residual: f64,
    pub certified: bool,
    pub order: u32,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy)]
pub enum PcInput<'a> {
    Spec(&'a ChainSpec),
    Matrix(&'a TridiagonalMatrix),
}

/// Clusters of the extended-precision spectrum and the relative distance
/// between `prod (lambda - root)^mult` and `P_L`.
fn clustered_reconstruction(m: &TridiagonalMatrix, tol: f64) -> Result<(Vec<eig::Cluster>, f64)> {
    let eigs = eig::eigenvalues_in(m, Precision::Extended)?;
    let clusters = eig::cluster(&eigs, tol);
    let roots: Vec<C64> = clusters
        .iter()
        .flat_map(|c| std::iter::repeat_n(c.representative, c.multiplicity))
        .collect();
    let pl = principal_minors(m).pop().unwrap_or_else(Poly::one);
    let rebuilt = Poly::from_roots(&roots);
    Ok((clusters, pl.rel_distance(&rebuilt, &pl)))
}

/// Certifies full-spectrum pairwise coalescence.
///
/// A spec with a restricted central block is judged by the square identity;
/// anything else by clustered eigenvalue multiplicities (all even). The
/// numeric residual is the root-reconstruction residual of `P_L`.
pub fn verify_pc(input: PcInput<'_>, tol: &Tolerances) -> Result<PcCertificate> {
    if let PcInput::Spec(spec) = input {
        if spec.central().is_restricted() {
            let residual = square_residual(spec);
            if residual.is_finite() {
                return Ok(PcCertificate {
                    mode: CertMode::Symbolic,
                    residual,
                    certified: residual < tol.certify,
                    order: 2,
                    tolerances: *tol,
                });
            }
        }
    }
    let built;
    let m = match input {
        PcInput::Spec(spec) => {
            built = spec.build();
            &built
        }
        PcInput::Matrix(m) => m,
    };
    let (clusters, residual) = clustered_reconstruction(m, tol.distinct)?;
    Ok(PcCertificate {
        mode: CertMode::Numeric,
        residual,
        certified: clusters.iter().all(|c| c.multiplicity % 2 == 0),
        order: 2,
        tolerances: *tol,
    })
}

/// Relative residual accepted for the clustered-root reconstruction in [`verify_power`].
pub const RECONSTRUCTION_TOL: f64 = 1e-6;

/// True when every eigenvalue cluster has multiplicity divisible by `order`
/// and the clustered roots reproduce `P_L`.
pub fn verify_power(m: &TridiagonalMatrix, order: usize, tol: f64) -> Result<bool> {
    if !matches!(order, 2 | 4 | 8) {
        return Err(Error::InvalidArgument(format!("order must be 2, 4 or 8, got {order}")));
    }
    let (clusters, residual) = clustered_reconstruction(m, tol)?;
    Ok(clusters.iter().all(|c| c.multiplicity % order == 0) && residual <= RECONSTRUCTION_TOL)
}
