use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use pc_spectra::chain::{pc_delta, Branch};
use pc_spectra::sweep::Family;
use pc_spectra::{family_d, random_spec, CentralBlock, ChainSpec, TridiagonalMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    A,
    Legacy,
    B,
    C,
    D,
    Random,
}

/// Parses `re` or `re,im`.
pub fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("`{s}`: expected re or re,im")),
    }
}

/// Chain selection: a named family with parameters, or a spec file.
#[derive(Args, Debug, Clone, Default)]
pub struct ChainArgs {
    /// Built-in family.
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    /// JSON spec file (instead of --family).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Chain length.
    #[arg(long = "L")]
    pub len: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Central hopping (family a defaults to 1; random defaults to the coalescence value).
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Edge potential, `re` or `re,im` (family a).
    #[arg(long, value_parser = parse_complex, allow_negative_numbers = true)]
    pub beta: Option<C64>,
    #[arg(long = "J1")]
    pub j1: Option<f64>,
    #[arg(long = "J2")]
    pub j2: Option<f64>,
    #[arg(long = "Jc")]
    pub jc: Option<f64>,
    /// Family d potentials; without them family d follows gamma1 = gamma3 = 2 gamma2 = 2 gamma.
    #[arg(long)]
    pub gamma1: Option<f64>,
    #[arg(long)]
    pub gamma2: Option<f64>,
    #[arg(long)]
    pub gamma3: Option<f64>,
    /// Half length for the random family (alternative to --L).
    #[arg(long)]
    pub k: Option<usize>,
    /// Coefficient spread of the random family.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
}

/// A resolved chain: a `gamma`-parametrized family, optionally pinned to a fixed matrix.
#[derive(Debug, Clone)]
pub struct Source {
    pub family: Family,
    pub gamma: Option<f64>,
    fixed: Option<TridiagonalMatrix>,
    spec_default: bool,
}

impl ChainArgs {
    fn req<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
        v.with_context(|| format!("--{name} is required for this family"))
    }

    fn check_finite(&self) -> Result<()> {
        let named = [
            ("alpha", self.alpha),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("J1", self.j1),
            ("J2", self.j2),
            ("Jc", self.jc),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
            ("sigma", Some(self.sigma)),
        ];
        for (name, v) in named {
            if v.is_some_and(|x| !x.is_finite()) {
                bail!("--{name} must be finite");
            }
        }
        if self.beta.is_some_and(|b| !b.is_finite()) {
            bail!("--beta must be finite");
        }
        Ok(())
    }

    pub fn resolve(&self, seed: u64) -> Result<Source> {
        self.check_finite()?;
        let alpha = self.alpha.unwrap_or(0.0);
        match (&self.family, &self.spec) {
            (Some(_), Some(_)) => bail!("give either --family or --spec, not both"),
            (None, None) => bail!("an input is required: --family or --spec"),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let spec = ChainSpec::from_json(&text)?;
                return Ok(Source {
                    family: Family::Spec(spec),
                    gamma: self.gamma,
                    fixed: None,
                    spec_default: true,
                });
            }
            (Some(_), None) => {}
        }
        let kind = self.family.expect("checked above");
        let len = || Self::req(self.len, "L");
        let family = match kind {
            FamilyKind::A => Family::A {
                len: len()?,
                alpha,
                delta: self.delta.unwrap_or(1.0),
                beta: self.beta.unwrap_or_default(),
            },
            FamilyKind::Legacy => Family::Legacy { len: len()?, alpha },
            FamilyKind::B => Family::B {
                len: len()?,
                j1: Self::req(self.j1, "J1")?,
                j2: Self::req(self.j2, "J2")?,
                alpha,
            },
            FamilyKind::C => Family::C {
                len: len()?,
                j1: Self::req(self.j1, "J1")?,
                j2: Self::req(self.j2, "J2")?,
                jc: Self::req(self.jc, "Jc")?,
                alpha,
            },
            FamilyKind::D => Family::DScaled { len: len()? },
            FamilyKind::Random => {
                let k = match (self.k, self.len) {
                    (Some(k), _) => k,
                    (None, Some(l)) if l % 2 == 0 => l / 2,
                    _ => bail!("family random needs --k or an even --L"),
                };
                let gamma = self.gamma.unwrap_or(0.0);
                let delta = self.delta.unwrap_or_else(|| pc_delta(alpha, gamma, Branch::Plus));
                let spec =
                    random_spec(k, seed, self.sigma)?.with_central(CentralBlock::restricted(alpha, gamma, delta));
                Family::Spec(spec)
            }
        };
        let fixed = match (kind, self.gamma1, self.gamma2, self.gamma3) {
            (FamilyKind::D, Some(g1), Some(g2), Some(g3)) => Some(family_d(len()?, g1, g2, g3)?),
            (FamilyKind::D, None, None, None) => None,
            (FamilyKind::D, ..) => bail!("family d needs all of --gamma1 --gamma2 --gamma3, or none"),
            _ => None,
        };
        Ok(Source {
            family,
            gamma: self.gamma,
            fixed,
            spec_default: kind == FamilyKind::Random,
        })
    }
}

impl Source {
    /// The matrix at `gamma` (or at the configured `--gamma` when `None`).
    pub fn matrix(&self, gamma: Option<f64>) -> Result<TridiagonalMatrix> {
        if let Some(m) = &self.fixed {
            return Ok(m.clone());
        }
        match (gamma.or(self.gamma), &self.family) {
            (Some(g), f) => Ok(f.matrix_at(g)?),
            (None, Family::Spec(s)) if self.spec_default => Ok(s.build()),
            (None, _) => bail!("--gamma is required"),
        }
    }

    /// The spec at `gamma`, if this source has one.
    pub fn spec(&self, gamma: Option<f64>) -> Result<Option<ChainSpec>> {
        if self.fixed.is_some() {
            return Ok(None);
        }
        match (gamma.or(self.gamma), &self.family) {
            (None, Family::Spec(s)) if self.spec_default => Ok(Some(s.clone())),
            (None, Family::DScaled { .. }) => Ok(None),
            (None, _) => bail!("--gamma is required"),
            (Some(g), f) => Ok(f.spec_at(g).transpose()?),
        }
    }

    pub fn len(&self) -> usize {
        self.fixed.as_ref().map_or(self.family.len(), TridiagonalMatrix::len)
    }
}
