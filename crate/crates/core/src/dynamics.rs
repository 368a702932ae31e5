//! Non-unitary evolution `psi(t) = exp(-i H t) psi(0)` and norm loss.

use std::f64::consts::PI;

use crate::chain::TridiagonalMatrix;
use crate::dense::DenseMatrix;
use crate::eig::{Precision, Spectrum};
use crate::error::{Error, Result};
use crate::sweep::{par_map, Family};
use crate::C64;

pub const DEFAULT_DT: f64 = 0.01;

/// Offset applied to `gamma` when an eigenbasis state is requested exactly at coalescence.
pub const PC_OFFSET: f64 = 1e-6;

/// Per-step slack allowed on norm growth under an absorbing Hamiltonian.
const GROWTH_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        StateVector { amplitudes }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// `<psi|psi>`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidArgument("state has zero or non-finite norm".into()));
        }
        self.amplitudes.iter_mut().for_each(|z| *z /= n);
        Ok(self)
    }
}

/// `d_j = exp(-(j - j0)^2 / 2 sigma^2) exp(i p j)` for sites `j = 1..L`, normalized.
pub fn gaussian_packet(len: usize, j0: f64, sigma: f64, p: f64) -> Result<StateVector> {
    if len == 0 || !(1.0..=len as f64).contains(&j0) || sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "wavepacket needs L >= 1, 1 <= j0 <= L, sigma > 0 (got L={len}, j0={j0}, sigma={sigma})"
        )));
    }
    StateVector::new(
        (1..=len)
            .map(|j| {
                let x = j as f64 - j0;
                C64::from_polar((-x * x / (2.0 * sigma * sigma)).exp(), p * j as f64)
            })
            .collect(),
    )
    .normalized()
}

pub fn uniform_site(len: usize) -> Result<StateVector> {
    if len == 0 {
        return Err(Error::InvalidArgument("uniform state needs L >= 1".into()));
    }
    Ok(StateVector::new(vec![C64::new(1.0 / (len as f64).sqrt(), 0.0); len]))
}

/// `sum_mu c_mu |mu>` without normalization.
pub fn eigen_superposition(s: &Spectrum, c: &[C64]) -> StateVector {
    let n = s.eigenvectors.first().map_or(0, Vec::len);
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (v, cm) in s.eigenvectors.iter().zip(c) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += cm * x;
        }
    }
    StateVector::new(out)
}

/// Equal-weight superposition of all right eigenvectors, normalized, together
/// with the coefficient `c` each eigenvector carries after normalization.
pub fn uniform_eigen_with_coefficient(s: &Spectrum) -> Result<(StateVector, C64)> {
    let len = s.len();
    if len == 0 {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    let c0 = C64::new(1.0 / (len as f64).sqrt(), 0.0);
    let raw = eigen_superposition(s, &vec![c0; len]);
    let n = raw.norm_sqr().sqrt();
    let psi = raw.normalized()?;
    Ok((psi, c0 / n))
}

pub fn uniform_eigen(s: &Spectrum) -> Result<StateVector> {
    Ok(uniform_eigen_with_coefficient(s)?.0)
}

/// Expansion coefficients of `psi` in the right eigenvectors (dense solve).
pub fn eigen_coefficients(s: &Spectrum, psi: &StateVector) -> Result<Vec<C64>> {
    DenseMatrix::from_columns(&s.eigenvectors).solve_vec(&psi.amplitudes)
}

/// Fixed-step fourth-order Runge–Kutta integrator for `dpsi/dt = -i H psi`.
struct Rk4<'a> {
    m: &'a TridiagonalMatrix,
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
    hv: Vec<C64>,
}

impl<'a> Rk4<'a> {
    fn new(m: &'a TridiagonalMatrix) -> Self {
        let z = vec![C64::new(0.0, 0.0); m.len()];
        Rk4 {
            m,
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z.clone(),
            hv: z,
        }
    }

    fn rhs(m: &TridiagonalMatrix, x: &[C64], hv: &mut [C64], out: &mut [C64]) {
        m.matvec_into(x, hv);
        for (o, h) in out.iter_mut().zip(hv.iter()) {
            *o = C64::new(h.im, -h.re);
        }
    }

    fn step(&mut self, psi: &mut [C64], h: f64) {
        let Rk4 { m, k, tmp, hv } = self;
        let [k1, k2, k3, k4] = k;
        let shifted = |tmp: &mut Vec<C64>, kk: &[C64], w: f64| {
            for ((t, p), x) in tmp.iter_mut().zip(psi.iter()).zip(kk) {
                *t = p + x * w;
            }
        };
        Self::rhs(m, psi, hv, k1);
        shifted(tmp, k1, h / 2.0);
        Self::rhs(m, tmp, hv, k2);
        shifted(tmp, k2, h / 2.0);
        Self::rhs(m, tmp, hv, k3);
        shifted(tmp, k3, h);
        Self::rhs(m, tmp, hv, k4);
        let w = h / 6.0;
        for (i, p) in psi.iter_mut().enumerate() {
            *p += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
    }
}

fn check_step_args(t: f64, dt: f64) -> Result<usize> {
    if t.is_nan() || t < 0.0 || dt.is_nan() || dt <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "need t >= 0 and dt > 0 (got t={t}, dt={dt})"
        )));
    }
    Ok((t / dt - 1e-9).ceil().max(0.0) as usize)
}

/// Runs `steps` steps of size `h`, calling `observe(step, psi)` after each.
fn integrate(
    m: &TridiagonalMatrix,
    psi0: &StateVector,
    steps: usize,
    h: f64,
    mut observe: impl FnMut(usize, &[C64]),
) -> Result<StateVector> {
    if psi0.len() != m.len() {
        return Err(Error::LengthMismatch {
            name: "psi0",
            got: psi0.len(),
            expected: m.len(),
        });
    }
    let absorbing = m.is_absorbing();
    let mut psi = psi0.amplitudes.clone();
    let mut rk = Rk4::new(m);
    let mut prev = psi0.norm_sqr();
    for step in 1..=steps {
        rk.step(&mut psi, h);
        let now: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !now.is_finite() || (absorbing && now > prev + GROWTH_SLACK * prev.max(1.0)) {
            return Err(Error::Unstable { from: prev, to: now });
        }
        prev = now;
        observe(step, &psi);
    }
    Ok(StateVector::new(psi))
}

/// `psi(t)` by RK4 with step at most `dt` (the last step is shortened to land on `t`).
pub fn evolve(m: &TridiagonalMatrix, psi0: &StateVector, t: f64, dt: f64) -> Result<StateVector> {
    let steps = check_step_args(t, dt)?;
    let h = if steps == 0 { 0.0 } else { t / steps as f64 };
    integrate(m, psi0, steps, h, |_, _| {})
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormTrace {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
}

impl NormTrace {
    pub fn last(&self) -> Option<(f64, f64)> {
        Some((*self.times.last()?, *self.norms.last()?))
    }
}

/// `N(t) = <psi(t)|psi(t)>` at every step.
pub fn norm_trace(m: &TridiagonalMatrix, psi0: &StateVector, t_max: f64, dt: f64) -> Result<NormTrace> {
    norm_trace_every(m, psi0, t_max, dt, 1)
}

/// As [`norm_trace`], recording every `every`-th step plus the final one.
pub fn norm_trace_every(
    m: &TridiagonalMatrix,
    psi0: &StateVector,
    t_max: f64,
    dt: f64,
    every: usize,
) -> Result<NormTrace> {
    let steps = check_step_args(t_max, dt)?;
    let h = if steps == 0 { 0.0 } else { t_max / steps as f64 };
    let every = every.max(1);
    let mut times = vec![0.0];
    let mut norms = vec![psi0.norm_sqr()];
    integrate(m, psi0, steps, h, |step, psi| {
        if step % every == 0 || step == steps {
            times.push(if step == steps { t_max } else { step as f64 * h });
            norms.push(psi.iter().map(|z| z.norm_sqr()).sum());
        }
    })?;
    Ok(NormTrace { times, norms })
}

/// `sum_mu exp(2 t Im lambda_mu) |c_mu|^2`: the norm with eigenvector overlaps dropped.
pub fn approx_norm(s: &Spectrum, c: &[C64], t: f64) -> f64 {
    s.eigenvalues
        .iter()
        .zip(c)
        .map(|(l, cm)| (2.0 * t * l.im).exp() * cm.norm_sqr())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Wavepacket { j0: f64, sigma: f64, p: f64 },
    UniformSite,
    UniformEigen,
}

impl InitialState {
    /// Packet at `L/4` with width `L/8` and momentum `pi/4`.
    pub fn default_wavepacket(len: usize) -> Self {
        InitialState::Wavepacket {
            j0: len as f64 / 4.0,
            sigma: len as f64 / 8.0,
            p: PI / 4.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InitialState::Wavepacket { .. } => "wavepacket",
            InitialState::UniformSite => "uniform-site",
            InitialState::UniformEigen => "uniform-eigen",
        }
    }

    /// The state for Hamiltonian `m`.
    pub fn prepare(&self, m: &TridiagonalMatrix) -> Result<StateVector> {
        match *self {
            InitialState::Wavepacket { j0, sigma, p } => gaussian_packet(m.len(), j0, sigma, p),
            InitialState::UniformSite => uniform_site(m.len()),
            InitialState::UniformEigen => uniform_eigen(&Spectrum::compute_with(m, Precision::Extended)?),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinNormRow {
    pub gamma: f64,
    /// `gamma` actually simulated (differs by [`PC_OFFSET`] for eigenbasis states at coalescence).
    pub gamma_eval: f64,
    pub final_norm: f64,
    pub trace: NormTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinNormResult {
    pub gamma_star: f64,
    pub n_min: f64,
    pub t_final: f64,
    pub rows: Vec<MinNormRow>,
}

/// Sweep settings for [`min_norm_gamma`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinNormOptions {
    /// Defaults to `3 L`.
    pub t_final: Option<f64>,
    pub dt: f64,
    /// Keep every n-th step of each trace.
    pub record_every: usize,
    pub workers: Option<usize>,
}

impl Default for MinNormOptions {
    fn default() -> Self {
        MinNormOptions {
            t_final: None,
            dt: DEFAULT_DT,
            record_every: 100,
            workers: None,
        }
    }
}

/// `N(t_final)` over the grid and its minimizer.
pub fn min_norm_gamma(
    family: &Family,
    gammas: &[f64],
    state: InitialState,
    opts: &MinNormOptions,
) -> Result<MinNormResult> {
    if gammas.is_empty() {
        return Err(Error::InvalidArgument("empty gamma grid".into()));
    }
    let t_final = opts.t_final.unwrap_or(3.0 * family.len() as f64);
    let pcs = family.pc_gammas();
    let rows = par_map(gammas, opts.workers, |gamma| {
        let at_pc = pcs.iter().any(|g| (g - gamma).abs() <= 1e-9 * g.abs().max(1.0));
        let gamma_eval = if at_pc && state == InitialState::UniformEigen {
            gamma + PC_OFFSET
        } else {
            gamma
        };
        let m = family.matrix_at(gamma_eval)?;
        let psi0 = state.prepare(&m)?;
        let trace = norm_trace_every(&m, &psi0, t_final, opts.dt, opts.record_every)?;
        let final_norm = trace.last().map_or(f64::NAN, |(_, n)| n);
        Ok(MinNormRow {
            gamma,
            gamma_eval,
            final_norm,
            trace,
        })
    })?;
    let best = rows
        .iter()
        .min_by(|a, b| a.final_norm.total_cmp(&b.final_norm))
        .expect("non-empty grid");
    Ok(MinNormResult {
        gamma_star: best.gamma,
        n_min: best.final_norm,
        t_final,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{family_b, legacy};
    use crate::dense::expm;

    #[test]
    fn packet_and_uniform_states() {
        let g = gaussian_packet(104, 26.0, 13.0, PI / 4.0).unwrap();
        assert!((g.norm_sqr() - 1.0).abs() < 1e-14);
        let flat = gaussian_packet(8, 4.0, 1e6, 0.0).unwrap();
        assert!(flat
            .amplitudes
            .iter()
            .all(|z| (z.re - 8f64.sqrt().recip()).abs() < 1e-9));
        assert_eq!(uniform_site(4).unwrap().amplitudes, vec![C64::new(0.5, 0.0); 4]);
        assert!(gaussian_packet(4, 0.0, 1.0, 0.0).is_err());
        assert!(gaussian_packet(4, 2.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn uniform_eigen_normalization() {
        let m = legacy(8, 0.0, 0.0).unwrap().build();
        let s = Spectrum::compute(&m).unwrap();
        let (_, c) = uniform_eigen_with_coefficient(&s).unwrap();
        assert!((c.re - 8f64.sqrt().recip()).abs() < 1e-12);

        let m = legacy(8, 0.0, 2.0 + 1e-6).unwrap().build();
        let s = Spectrum::compute_with(&m, Precision::Extended).unwrap();
        let (psi, c) = uniform_eigen_with_coefficient(&s).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((c.norm() * 8f64.sqrt() - 1.0).abs() > 0.1);
    }

    #[test]
    fn zero_time_and_unitary_evolution() {
        let m = legacy(10, 0.0, 0.0).unwrap().build();
        let psi = gaussian_packet(10, 3.0, 1.5, 0.7).unwrap();
        assert_eq!(evolve(&m, &psi, 0.0, 0.01).unwrap(), psi);
        let out = evolve(&m, &psi, 25.0, 0.01).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rk4_matches_expm() {
        let m = legacy(10, 0.0, 2.0).unwrap().build();
        let psi = uniform_site(10).unwrap();
        let t = 30.0;
        let rk = evolve(&m, &psi, t, DEFAULT_DT).unwrap();
        let u = expm(&DenseMatrix::from_tridiagonal(&m).scale(C64::new(0.0, -t))).unwrap();
        let exact = u.matvec(&psi.amplitudes);
        let dev: f64 = rk
            .amplitudes
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(dev < 1e-6, "{dev}");
    }

    #[test]
    fn absorbing_trace_is_monotone() {
        let m = family_b(12, 1.0, 1.5, 0.0, 2.0).unwrap().build();
        let tr = norm_trace(&m, &uniform_site(12).unwrap(), 10.0, 0.01).unwrap();
        assert!((tr.norms[0] - 1.0).abs() < 1e-14);
        assert_eq!(tr.times.len(), 1001);
        assert!(tr.norms.windows(2).all(|w| w[1] < w[0]));

        let flat = norm_trace_every(
            &legacy(6, 0.0, 0.0).unwrap().build(),
            &uniform_site(6).unwrap(),
            5.0,
            0.01,
            50,
        )
        .unwrap();
        assert_eq!(flat.times.len(), 11);
        assert!(flat.norms.iter().all(|n| (n - 1.0).abs() < 1e-9));
    }

    #[test]
    fn gain_is_not_flagged_but_blowup_is() {
        let m = legacy(4, 0.0, -1.0).unwrap().build();
        assert!(evolve(&m, &uniform_site(4).unwrap(), 1.0, 0.01).is_ok());
        // A huge step makes RK4 diverge on an absorbing chain.
        let m = legacy(4, 0.0, 50.0).unwrap().build();
        assert!(matches!(
            evolve(&m, &uniform_site(4).unwrap(), 10.0, 1.0),
            Err(Error::Unstable { .. })
        ));
    }

    #[test]
    fn approx_norm_is_exact_for_hermitian() {
        let m = legacy(8, 0.0, 0.0).unwrap().build();
        let s = Spectrum::compute(&m).unwrap();
        let psi = gaussian_packet(8, 2.0, 1.0, 0.3).unwrap();
        let c = eigen_coefficients(&s, &psi).unwrap();
        assert!((approx_norm(&s, &c, 7.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn small_min_norm_sweep() {
        let fam = Family::Legacy { len: 6, alpha: 0.0 };
        let grid = [0.5, 1.0, 2.0];
        let opts = MinNormOptions {
            t_final: Some(5.0),
            workers: Some(2),
            ..Default::default()
        };
        let res = min_norm_gamma(&fam, &grid, InitialState::UniformEigen, &opts).unwrap();
        assert_eq!(res.rows.len(), 3);
        assert_eq!(res.rows[2].gamma_eval, 2.0 + PC_OFFSET);
        assert_eq!(res.rows[0].gamma_eval, 0.5);
        assert!(grid.contains(&res.gamma_star));
        let serial = min_norm_gamma(
            &fam,
            &grid,
            InitialState::UniformEigen,
            &MinNormOptions {
                workers: Some(1),
                ..opts
            },
        )
        .unwrap();
        assert_eq!(serial, res);
    }
}
