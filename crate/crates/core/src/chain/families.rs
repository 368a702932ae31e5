use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{CentralBlock, ChainSpec, SpecMeta, TridiagonalMatrix};
use crate::error::{Error, Result};
use crate::C64;

/// Generator behind [`random_spec`], recorded in run metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng(seed_from_u64)";

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn half_length(len: usize, modulus: usize, what: &'static str) -> Result<usize> {
    if len == 0 || len % modulus != 0 {
        return Err(Error::InvalidLength { len, reason: what });
    }
    Ok(len / 2)
}

fn meta(family: &str) -> SpecMeta {
    SpecMeta {
        family: family.to_string(),
        seed: None,
    }
}

/// Uniform unit hoppings, potential-free off-center sites, a tunable central
/// block and a symmetric edge potential `-i beta` on sites 1 and L.
pub fn family_a(len: usize, alpha: f64, gamma: f64, delta: f64, beta: C64) -> Result<ChainSpec> {
    let k = half_length(len, 2, "family A needs an even length")?;
    let ones = vec![real(1.0); k - 1];
    Ok(ChainSpec::new(
        k,
        vec![real(0.0); k - 1],
        ones.clone(),
        ones,
        CentralBlock::restricted(alpha, gamma, delta),
    )?
    .with_edge_beta(beta)
    .with_meta(meta("a")))
}

/// Uniform chain with imaginary potentials on the two central sites.
pub fn legacy(len: usize, alpha: f64, gamma: f64) -> Result<ChainSpec> {
    Ok(family_a(len, alpha, gamma, 1.0, real(0.0))?.with_meta(meta("legacy")))
}

/// Strength of SSH bond `p` (sites `p, p+1`, 1-based): `J1` on odd bonds, `J2` on even.
fn ssh_bond(p: usize, j1: f64, j2: f64) -> f64 {
    if p % 2 == 1 {
        j1
    } else {
        j2
    }
}

/// SSH chain with imaginary central potentials. The central bond is a `J2`
/// bond when `L ≡ 0 (mod 4)` and a `J1` bond when `L ≡ 2 (mod 4)`.
pub fn family_b(len: usize, j1: f64, j2: f64, alpha: f64, gamma: f64) -> Result<ChainSpec> {
    let k = half_length(len, 2, "family B needs an even length")?;
    let hops: Vec<C64> = (1..k).map(|p| real(ssh_bond(p, j1, j2))).collect();
    let central = ssh_bond(k, j1, j2);
    Ok(ChainSpec::new(
        k,
        vec![real(0.0); k - 1],
        hops.clone(),
        hops,
        CentralBlock::restricted(alpha, gamma, central),
    )?
    .with_meta(meta("b")))
}

/// Period-3 chain with bond pattern `(J1, J1, J2)` and an independent central bond `Jc`.
pub fn family_c(len: usize, j1: f64, j2: f64, jc: f64, alpha: f64, gamma: f64) -> Result<ChainSpec> {
    let k = half_length(len, 6, "family C needs a length divisible by 6")?;
    let hops: Vec<C64> = (1..k).map(|p| real(if p % 3 == 0 { j2 } else { j1 })).collect();
    Ok(ChainSpec::new(
        k,
        vec![real(0.0); k - 1],
        hops.clone(),
        hops,
        CentralBlock::restricted(alpha, gamma, jc),
    )?
    .with_meta(meta("c")))
}

/// Chain with four-fold coalescence at `gamma1 = gamma3 = 2 gamma2 = 2`.
///
/// With `m = L/4`: unit hoppings except `gamma2` on bond `(2m, 2m+1)`,
/// potentials `-i gamma2` at `2m`, `+i gamma2` at `2m+1`, `-i gamma1` at `m`
/// and `-i gamma3` at `3m+1`. Built directly as a matrix.
pub fn family_d(len: usize, gamma1: f64, gamma2: f64, gamma3: f64) -> Result<TridiagonalMatrix> {
    if len == 0 || len % 4 != 0 {
        return Err(Error::InvalidLength {
            len,
            reason: "family D needs a length divisible by 4",
        });
    }
    let m = len / 4;
    let mut diag = vec![real(0.0); len];
    let mut upper = vec![real(-1.0); len - 1];
    let mut lower = vec![real(-1.0); len - 1];
    upper[2 * m - 1] = real(-gamma2);
    lower[2 * m - 1] = real(-gamma2);
    diag[2 * m - 1] += C64::new(0.0, -gamma2);
    diag[2 * m] += C64::new(0.0, gamma2);
    diag[m - 1] += C64::new(0.0, -gamma1);
    diag[3 * m] += C64::new(0.0, -gamma3);
    TridiagonalMatrix::new(diag, upper, lower)
}

/// Off-center coefficients drawn as `x + i y` with `x, y ~ N(0, sigma^2)`.
///
/// The central block is zero; set it with [`ChainSpec::with_central`].
pub fn random_spec(k: usize, seed: u64, sigma: f64) -> Result<ChainSpec> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("random_spec needs k >= 2, got {k}")));
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(format!("sigma = {sigma}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |n: usize| -> Vec<C64> {
        (0..n)
            .map(|_| C64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
            .collect()
    };
    let a = draw(k - 1);
    let b = draw(k - 1);
    let c = draw(k - 1);
    Ok(
        ChainSpec::new(k, a, b, c, CentralBlock::restricted(0.0, 0.0, 0.0))?.with_meta(SpecMeta {
            family: "random".to_string(),
            seed: Some(seed),
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{check_symmetry, SymmetryKind};

    #[test]
    fn family_a_corners() {
        let m = family_a(4, 0.0, 2.0, 1.0, real(0.0)).unwrap().build();
        assert_eq!(m.upper()[0], real(-1.0));
        assert_eq!(m.upper()[2], real(-1.0));
        assert_eq!(m.lower()[0], real(-1.0));
        assert_eq!(m.lower()[2], real(-1.0));
        assert_eq!(check_symmetry(&m).unwrap().kind, SymmetryKind::ExactOffCenter);
        assert!(family_a(7, 0.0, 2.0, 1.0, real(0.0)).is_err());
    }

    #[test]
    fn family_b_central_bond_follows_length_mod_four() {
        for len in [8usize, 10, 12, 14, 20, 22] {
            let m = family_b(len, 0.7, 1.3, 0.0, 2.0).unwrap().build();
            let central = m.upper()[len / 2 - 1];
            let expect = if len % 4 == 0 { -1.3 } else { -0.7 };
            assert_eq!(central, real(expect), "L = {len}");
            // Bond pattern J1, J2, J1, ...
            assert_eq!(m.upper()[0], real(-0.7));
            assert_eq!(m.upper()[1], real(-1.3));
            assert_eq!(m.upper()[len - 2], real(-0.7));
        }
        assert!(family_b(9, 1.0, 1.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn family_c_period_three() {
        let m = family_c(12, 1.5, 0.5, 1.0, 0.0, 2.0).unwrap().build();
        let u: Vec<f64> = m.upper().iter().map(|z| -z.re).collect();
        assert_eq!(u, vec![1.5, 1.5, 0.5, 1.5, 1.5, 1.0, 1.5, 1.5, 0.5, 1.5, 1.5]);
        assert!(family_c(10, 1.0, 1.0, 1.0, 0.0, 2.0).is_err());
        assert!(family_c(6, 1.0, 1.0, 1.0, 0.0, 2.0).is_ok());
    }

    #[test]
    fn family_d_layout() {
        let m = family_d(12, 2.0, 1.0, 3.0).unwrap();
        let d: Vec<C64> = m.diag().to_vec();
        assert_eq!(d[2], C64::new(0.0, -2.0)); // site m = 3
        assert_eq!(d[5], C64::new(0.0, -1.0)); // site 2m = 6
        assert_eq!(d[6], C64::new(0.0, 1.0)); // site 2m+1 = 7
        assert_eq!(d[9], C64::new(0.0, -3.0)); // site 3m+1 = 10
        assert_eq!(m.upper()[5], real(-1.0));
        assert_eq!(m.upper()[4], real(-1.0));
        let m = family_d(12, 2.0, 0.4, 2.0).unwrap();
        assert_eq!(m.upper()[5], real(-0.4));
        assert_eq!(check_symmetry(&m).unwrap().kind, SymmetryKind::ExactOffCenter);
        assert!(family_d(10, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn random_spec_is_deterministic() {
        let s1 = random_spec(5, 42, 1.0).unwrap();
        let s2 = random_spec(5, 42, 1.0).unwrap();
        let s3 = random_spec(5, 43, 1.0).unwrap();
        assert_eq!(s1, s2);
        assert_ne!(s1.a(), s3.a());
        assert_eq!(s1.meta().seed, Some(42));
        assert!(random_spec(1, 0, 1.0).is_err());
        assert_eq!(
            check_symmetry(&s1.build()).unwrap().kind,
            SymmetryKind::GeneralizedOffCenter
        );
    }
}
