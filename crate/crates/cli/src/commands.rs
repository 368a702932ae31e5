use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use pc_spectra::charpoly::{verify_pc, verify_power, CertMode, PcCertificate, PcInput, Tolerances};
use pc_spectra::dynamics::{min_norm_gamma, InitialState, MinNormOptions, DEFAULT_DT, PC_OFFSET};
use pc_spectra::eig::{self, Precision, Spectrum};
use pc_spectra::nonortho::{overlap_matrix, sweep_nonortho};
use pc_spectra::sweep::{par_map, Grid};
use serde_json::{json, Value};

use crate::input::ChainArgs;
use crate::output::{num, Sink, Table};

/// Settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Globals {
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub workers: Option<usize>,
    pub tol_distinct: f64,
    pub tol_certify: f64,
}

impl Globals {
    fn sink(&self) -> Sink {
        Sink::new(self.out.as_deref())
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            certify: self.tol_certify,
            distinct: self.tol_distinct,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Double,
    Extended,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct BuildArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, value_enum, default_value = "extended")]
    pub precision: PrecisionArg,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Coalescence order to certify (2, 4 or 8).
    #[arg(long, default_value_t = 2)]
    pub order: usize,
}

#[derive(Args, Debug, Clone)]
pub struct NonorthoArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// `start:stop:steps`; omit together with --heatmap for a single gamma.
    #[arg(long)]
    pub gamma_grid: Option<Grid>,
    /// Emit `|U|` entries at --gamma instead of a sweep.
    #[arg(long)]
    pub heatmap: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Wavepacket,
    UniformSite,
    UniformEigen,
}

#[derive(Args, Debug, Clone)]
pub struct DynamicsArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long)]
    pub gamma_grid: Option<Grid>,
    #[arg(long, value_enum, default_value = "wavepacket")]
    pub state: StateKind,
    /// Packet centre (site, default L/4).
    #[arg(long)]
    pub j0: Option<f64>,
    /// Packet width (default L/8).
    #[arg(long)]
    pub packet_sigma: Option<f64>,
    /// Packet momentum (default pi/4).
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Final time (default 3L).
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
    /// Keep every n-th integration step in the trace output.
    #[arg(long, default_value_t = 100)]
    pub record_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Gamma,
    Alpha,
    Delta,
    #[value(name = "J1")]
    J1,
    #[value(name = "J2")]
    J2,
    #[value(name = "Jc")]
    Jc,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    #[arg(long)]
    pub grid: Grid,
    #[arg(long, value_enum, default_value = "extended")]
    pub precision: PrecisionArg,
}

fn summary(fields: Value, sink: &Sink) {
    let line = serde_json::to_string(&fields).expect("json value");
    if sink.is_stdout() {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

pub fn build(args: &BuildArgs, g: &Globals) -> Result<()> {
    let src = args.chain.resolve(g.seed)?;
    let Some(spec) = src.spec(None)? else {
        bail!("this input has no spec form (family d is built directly as a matrix)");
    };
    let sink = g.sink();
    let mut text = spec.to_json();
    text.push('\n');
    sink.write(text.as_bytes())?;
    summary(
        json!({"command": "build", "L": spec.len(), "out": sink.describe()}),
        &sink,
    );
    Ok(())
}

pub fn spectrum(args: &SpectrumArgs, g: &Globals) -> Result<()> {
    let m = args.chain.resolve(g.seed)?.matrix(None)?;
    let eigs = eig::eigenvalues_in(&m, args.precision.into())?;
    let clusters = eig::cluster(&eigs, g.tol_distinct);
    let mut table = Table::new(&["index", "re_lambda", "im_lambda", "cluster_id", "multiplicity"])?;
    let mut index = 0;
    for (id, cl) in clusters.iter().enumerate() {
        for &i in &cl.members {
            table.row([
                index.to_string(),
                num(eigs[i].re),
                num(eigs[i].im),
                id.to_string(),
                cl.multiplicity.to_string(),
            ])?;
            index += 1;
        }
    }
    let sink = g.sink();
    sink.write(&table.into_bytes()?)?;
    summary(
        json!({"command": "spectrum", "L": m.len(), "distinct": clusters.len(), "out": sink.describe()}),
        &sink,
    );
    Ok(())
}

pub fn certificate(args: &VerifyArgs, g: &Globals, gamma: Option<f64>) -> Result<PcCertificate> {
    let src = args.chain.resolve(g.seed)?;
    let tol = g.tolerances();
    if args.order == 2 {
        if let Some(spec) = src.spec(gamma)? {
            return Ok(verify_pc(PcInput::Spec(&spec), &tol)?);
        }
        let m = src.matrix(gamma)?;
        return Ok(verify_pc(PcInput::Matrix(&m), &tol)?);
    }
    let m = src.matrix(gamma)?;
    let certified = verify_power(&m, args.order, g.tol_distinct)?;
    let base = verify_pc(PcInput::Matrix(&m), &tol)?;
    Ok(PcCertificate {
        mode: CertMode::Numeric,
        residual: base.residual,
        certified,
        order: args.order as u32,
        tolerances: tol,
    })
}

pub fn verify(args: &VerifyArgs, g: &Globals) -> Result<()> {
    let cert = certificate(args, g, None)?;
    let sink = g.sink();
    let mut text = serde_json::to_string(&cert)?;
    text.push('\n');
    sink.write(text.as_bytes())?;
    if !sink.is_stdout() {
        summary(
            json!({"command": "verify", "certified": cert.certified, "mode": cert.mode, "out": sink.describe()}),
            &sink,
        );
    }
    Ok(())
}

pub fn nonortho(args: &NonorthoArgs, g: &Globals) -> Result<()> {
    let src = args.chain.resolve(g.seed)?;
    let sink = g.sink();
    if args.heatmap {
        let m = src.matrix(None)?;
        let u = overlap_matrix(&Spectrum::compute_with(&m, Precision::Extended)?);
        let mut table = Table::new(&["mu", "nu", "abs_U"])?;
        let n = u.dim();
        for (i, a) in u.abs_entries().into_iter().enumerate() {
            table.row([(i / n).to_string(), (i % n).to_string(), num(a)])?;
        }
        sink.write(&table.into_bytes()?)?;
        summary(
            json!({"command": "nonortho", "mode": "heatmap", "L": n, "max_off_diagonal": u.max_off_diagonal(), "out": sink.describe()}),
            &sink,
        );
        return Ok(());
    }
    let gammas = match (&args.gamma_grid, src.gamma) {
        (Some(grid), _) => grid.points(),
        (None, Some(gm)) => vec![gm],
        (None, None) => bail!("nonortho needs --gamma-grid, --gamma, or --heatmap"),
    };
    let rows = sweep_nonortho(&src.family, &gammas, g.tol_distinct, g.workers)?;
    let mut table = Table::new(&["gamma", "f1", "f2", "distinct_count"])?;
    for r in &rows {
        table.row([num(r.gamma), num(r.f1), num(r.f2), r.distinct_count.to_string()])?;
    }
    sink.write(&table.into_bytes()?)?;
    let peak = rows.iter().max_by(|a, b| a.f2.total_cmp(&b.f2)).map(|r| r.gamma);
    summary(
        json!({"command": "nonortho", "mode": "sweep", "points": rows.len(), "f2_peak_gamma": peak, "out": sink.describe()}),
        &sink,
    );
    Ok(())
}

pub fn dynamics(args: &DynamicsArgs, g: &Globals) -> Result<()> {
    let src = args.chain.resolve(g.seed)?;
    let len = src.len();
    let gammas = match (&args.gamma_grid, src.gamma) {
        (Some(grid), _) => grid.points(),
        (None, Some(gm)) => vec![gm],
        (None, None) => bail!("dynamics needs --gamma-grid or --gamma"),
    };
    let state = match args.state {
        StateKind::Wavepacket => {
            let InitialState::Wavepacket { j0, sigma, p } = InitialState::default_wavepacket(len) else {
                unreachable!()
            };
            InitialState::Wavepacket {
                j0: args.j0.unwrap_or(j0),
                sigma: args.packet_sigma.unwrap_or(sigma),
                p: args.p.unwrap_or(p),
            }
        }
        StateKind::UniformSite => InitialState::UniformSite,
        StateKind::UniformEigen => InitialState::UniformEigen,
    };
    let opts = MinNormOptions {
        t_final: args.t_final,
        dt: args.dt,
        record_every: args.record_every,
        workers: g.workers,
    };
    let res = min_norm_gamma(&src.family, &gammas, state, &opts)?;
    let mut table = Table::new(&["kind", "gamma", "t", "norm"])?;
    for row in &res.rows {
        for (t, n) in row.trace.times.iter().zip(&row.trace.norms) {
            table.row(["trace".to_string(), num(row.gamma), num(*t), num(*n)])?;
        }
    }
    table.row([
        "summary".to_string(),
        num(res.gamma_star),
        num(res.t_final),
        num(res.n_min),
    ])?;
    let sink = g.sink();
    sink.write(&table.into_bytes()?)?;
    let offsets: Vec<f64> = res
        .rows
        .iter()
        .filter(|r| r.gamma_eval != r.gamma)
        .map(|r| r.gamma)
        .collect();
    summary(
        json!({
            "command": "dynamics",
            "state": state.name(),
            "L": len,
            "gamma_star": res.gamma_star,
            "N_min": res.n_min,
            "t_final": res.t_final,
            "pc_offset": if offsets.is_empty() { Value::Null } else { json!({"offset": PC_OFFSET, "gammas": offsets}) },
            "out": sink.describe(),
        }),
        &sink,
    );
    Ok(())
}

fn with_param(chain: &ChainArgs, param: SweepParam, value: f64) -> ChainArgs {
    let mut c = chain.clone();
    match param {
        SweepParam::Gamma => c.gamma = Some(value),
        SweepParam::Alpha => c.alpha = Some(value),
        SweepParam::Delta => c.delta = Some(value),
        SweepParam::J1 => c.j1 = Some(value),
        SweepParam::J2 => c.j2 = Some(value),
        SweepParam::Jc => c.jc = Some(value),
    }
    c
}

pub fn sweep(args: &SweepArgs, g: &Globals) -> Result<()> {
    let precision: Precision = args.precision.into();
    let points = args.grid.points();
    // Resolve once up front so configuration errors surface before the fan-out.
    with_param(&args.chain, args.param, points[0]).resolve(g.seed)?;
    let rows = par_map(&points, g.workers, |value| {
        let run = || -> Result<(usize, PcCertificate)> {
            let chain = with_param(&args.chain, args.param, value);
            let m = chain.resolve(g.seed)?.matrix(None)?;
            let count = eig::distinct_count(&eig::eigenvalues_in(&m, precision)?, g.tol_distinct);
            let cert = certificate(&VerifyArgs { chain, order: 2 }, g, None)?;
            Ok((count, cert))
        };
        run().map_err(|e| match e.downcast::<pc_spectra::Error>() {
            Ok(inner) => inner,
            Err(other) => pc_spectra::Error::InvalidArgument(other.to_string()),
        })
    })?;
    let name = args.param.to_possible_value().expect("named").get_name().to_string();
    let mut table = Table::new(&[name.as_str(), "distinct_count", "certified", "mode", "residual"])?;
    for (v, (count, cert)) in points.iter().zip(&rows) {
        let mode = match cert.mode {
            CertMode::Symbolic => "symbolic",
            CertMode::Numeric => "numeric",
        };
        table.row([
            num(*v),
            count.to_string(),
            cert.certified.to_string(),
            mode.to_string(),
            num(cert.residual),
        ])?;
    }
    let sink = g.sink();
    sink.write(&table.into_bytes()?)?;
    summary(
        json!({
            "command": "sweep",
            "param": name,
            "points": points.len(),
            "certified": rows.iter().filter(|r| r.1.certified).count(),
            "out": sink.describe(),
        }),
        &sink,
    );
    Ok(())
}
