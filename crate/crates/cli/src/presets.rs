use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::ValueEnum;
use pc_spectra::charpoly::{verify_pc, verify_power, PcInput};
use pc_spectra::dynamics::{min_norm_gamma, InitialState, MinNormOptions};
use pc_spectra::eig::{self, Precision, Spectrum};
use pc_spectra::nonortho::{overlap_matrix, sweep_nonortho};
use pc_spectra::sweep::{par_map, Family, Grid};
use pc_spectra::{family_b, family_d, legacy, random_spec, CentralBlock, TridiagonalMatrix, C64};
use serde_json::{json, Value};

use crate::commands::Globals;
use crate::output::{num, write_atomic, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl Preset {
    fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
        }
    }
}

/// Writes the spectrum of `m` as rows prefixed by `prefix`.
fn spectrum_rows(table: &mut Table, prefix: &[String], m: &TridiagonalMatrix, tol: f64) -> Result<usize> {
    let eigs = eig::eigenvalues_in(m, Precision::Extended)?;
    let clusters = eig::cluster(&eigs, tol);
    let mut index = 0;
    for (id, cl) in clusters.iter().enumerate() {
        for &i in &cl.members {
            let mut row = prefix.to_vec();
            row.extend([
                index.to_string(),
                num(eigs[i].re),
                num(eigs[i].im),
                id.to_string(),
                cl.multiplicity.to_string(),
            ]);
            table.row(row)?;
            index += 1;
        }
    }
    Ok(clusters.len())
}

const SPECTRUM_COLS: [&str; 5] = ["index", "re_lambda", "im_lambda", "cluster_id", "multiplicity"];

fn header(prefix: &[&str], tail: &[&str]) -> Vec<String> {
    prefix.iter().chain(tail).map(|s| s.to_string()).collect()
}

fn save(dir: &Path, file: &str, table: Table, files: &mut Vec<String>) -> Result<()> {
    let path = dir.join(file);
    write_atomic(&path, &table.into_bytes()?)?;
    files.push(path.display().to_string());
    Ok(())
}

fn new_table(cols: &[String]) -> Result<Table> {
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    Table::new(&refs)
}

fn fig1(dir: &Path, g: &Globals, files: &mut Vec<String>) -> Result<Value> {
    let mut table = new_table(&header(&["panel", "alpha", "gamma"], &SPECTRUM_COLS))?;
    let mut counts = Vec::new();
    for (panel, gammas, tied) in [("top", [1.5, 2.0, 2.5], false), ("bottom", [0.5, 1.0, 1.5], true)] {
        for gamma in gammas {
            let alpha = if tied { -gamma } else { 0.0 };
            let m = legacy(10, alpha, gamma)?.build();
            let prefix = [panel.to_string(), num(alpha), num(gamma)];
            let n = spectrum_rows(&mut table, &prefix, &m, g.tol_distinct)?;
            counts.push(json!({"panel": panel, "gamma": gamma, "distinct": n}));
        }
    }
    save(dir, "fig1_spectra.csv", table, files)?;
    Ok(json!(counts))
}

fn fig2(dir: &Path, g: &Globals, files: &mut Vec<String>) -> Result<Value> {
    let (alpha, delta) = (-1.2, 1.1);
    let base = random_spec(5, g.seed, 1.0)?;
    let mut table = new_table(&header(&["gamma"], &SPECTRUM_COLS))?;
    let mut certs = Vec::new();
    for gamma in [0.7, 1.0, 1.3] {
        let spec = base.clone().with_central(CentralBlock::restricted(alpha, gamma, delta));
        spectrum_rows(&mut table, &[num(gamma)], &spec.build(), g.tol_distinct)?;
        let cert = verify_pc(PcInput::Spec(&spec), &g.tolerances())?;
        certs.push(json!({"gamma": gamma, "certificate": cert}));
    }
    save(dir, "fig2_spectra.csv", table, files)?;
    let path = dir.join("fig2_spec.json");
    let spec = base.with_central(CentralBlock::restricted(alpha, 1.0, delta));
    write_atomic(&path, format!("{}\n", spec.to_json()).as_bytes())?;
    files.push(path.display().to_string());
    Ok(json!(certs))
}

fn fig4(dir: &Path, g: &Globals, files: &mut Vec<String>) -> Result<Value> {
    let grid = Grid::new(0.5, 2.5, 21)?.points();
    let mut table = Table::new(&["panel", "L", "J", "distinct_count"])?;
    let panels: [(&str, &[usize]); 2] = [("a", &[12, 16, 20, 22]), ("b", &[14, 18, 20, 22])];
    for (panel, lens) in panels {
        for &len in lens {
            let counts = par_map(&grid, g.workers, |j| {
                let spec = if panel == "a" {
                    family_b(len, j, 1.0, 0.0, 2.0)?
                } else {
                    family_b(len, 1.0, j, 0.0, 2.0)?
                };
                Ok(eig::distinct_count(&eig::eigenvalues(&spec.build())?, g.tol_distinct))
            })?;
            for (j, n) in grid.iter().zip(counts) {
                table.row([panel.to_string(), len.to_string(), num(*j), n.to_string()])?;
            }
        }
    }
    save(dir, "fig4_distinct.csv", table, files)?;
    Ok(json!({"grid_points": grid.len()}))
}

fn fig5(dir: &Path, _g: &Globals, files: &mut Vec<String>) -> Result<Value> {
    let mut table = Table::new(&["gamma", "mu", "nu", "abs_U"])?;
    let mut maxima = Vec::new();
    for gamma in [1.0, 3.0, 50.0] {
        let m = family_b(10, 1.5, 1.0, 0.0, gamma)?.build();
        let u = overlap_matrix(&Spectrum::compute_with(&m, Precision::Extended)?);
        let n = u.dim();
        for (i, a) in u.abs_entries().into_iter().enumerate() {
            table.row([num(gamma), (i / n).to_string(), (i % n).to_string(), num(a)])?;
        }
        maxima.push(json!({"gamma": gamma, "max_off_diagonal": u.max_off_diagonal()}));
    }
    save(dir, "fig5_overlap.csv", table, files)?;
    Ok(json!(maxima))
}

fn fig6(dir: &Path, g: &Globals, files: &mut Vec<String>) -> Result<Value> {
    let panels = [
        (
            "a",
            Family::A {
                len: 30,
                alpha: 0.0,
                delta: 0.5,
                beta: C64::new(0.0, 0.0),
            },
            1.0,
        ),
        (
            "b",
            Family::B {
                len: 20,
                j1: 1.0,
                j2: 1.5,
                alpha: 0.0,
            },
            3.0,
        ),
        (
            "b",
            Family::B {
                len: 22,
                j1: 1.0,
                j2: 1.5,
                alpha: 0.0,
            },
            2.0,
        ),
        (
            "c",
            Family::C {
                len: 30,
                j1: 1.5,
                j2: 1.5,
                jc: 1.0,
                alpha: 0.0,
            },
            2.0,
        ),
        ("d", Family::DScaled { len: 20 }, 1.0),
    ];
    let mut table = Table::new(&["panel", "L", "gamma", "f1", "f2", "distinct_count"])?;
    let mut peaks = Vec::new();
    for (panel, fam, pc) in panels {
        let grid = Grid::new(0.0, 2.0 * pc, 101)?.points();
        let rows = sweep_nonortho(&fam, &grid, g.tol_distinct, g.workers)?;
        for r in &rows {
            table.row([
                panel.to_string(),
                fam.len().to_string(),
                num(r.gamma),
                num(r.f1),
                num(r.f2),
                r.distinct_count.to_string(),
            ])?;
        }
        let peak = rows.iter().max_by(|a, b| a.f2.total_cmp(&b.f2)).map(|r| r.gamma);
        peaks.push(json!({"panel": panel, "L": fam.len(), "pc_gamma": pc, "f2_peak_gamma": peak}));
    }
    save(dir, "fig6_nonortho.csv", table, files)?;
    Ok(json!(peaks))
}

fn fig7(dir: &Path, g: &Globals, files: &mut Vec<String>) -> Result<Value> {
    let grid = Grid::new(0.5, 1.5, 101)?.points();
    let counts = par_map(&grid, g.workers, |gamma| {
        let m = family_d(12, 2.0 * gamma, gamma, 2.0 * gamma)?;
        Ok(eig::distinct_count(
            &eig::eigenvalues_in(&m, Precision::Extended)?,
            g.tol_distinct,
        ))
    })?;
    let mut table = Table::new(&["gamma", "distinct_count"])?;
    for (gamma, n) in grid.iter().zip(&counts) {
        table.row([num(*gamma), n.to_string()])?;
    }
    save(dir, "fig7_distinct.csv", table, files)?;

    let m = family_d(12, 2.0, 1.0, 2.0)?;
    let mut table = new_table(&header(&["gamma"], &SPECTRUM_COLS))?;
    let distinct = spectrum_rows(&mut table, &[num(1.0)], &m, g.tol_distinct)?;
    save(dir, "fig7_spectrum.csv", table, files)?;
    Ok(json!({"distinct_at_1": distinct, "four_wise_at_1": verify_power(&m, 4, g.tol_distinct)?}))
}

fn fig8(dir: &Path, g: &Globals, small: bool, files: &mut Vec<String>) -> Result<Value> {
    let lens = if small { [24, 26] } else { [104, 106] };
    let grid = Grid::new(0.5, 6.0, 56)?.points();
    let opts = MinNormOptions {
        workers: g.workers,
        ..Default::default()
    };
    let mut table = Table::new(&["L", "state", "gamma", "final_norm"])?;
    let mut minima = Vec::new();
    for len in lens {
        let fam = Family::B {
            len,
            j1: 1.0,
            j2: 1.5,
            alpha: 0.0,
        };
        for state in [
            InitialState::default_wavepacket(len),
            InitialState::UniformSite,
            InitialState::UniformEigen,
        ] {
            let res = min_norm_gamma(&fam, &grid, state, &opts)?;
            for r in &res.rows {
                table.row([
                    len.to_string(),
                    state.name().to_string(),
                    num(r.gamma),
                    num(r.final_norm),
                ])?;
            }
            minima.push(json!({
                "L": len,
                "state": state.name(),
                "pc_gamma": fam.pc_gammas().into_iter().fold(f64::NEG_INFINITY, f64::max),
                "gamma_star": res.gamma_star,
                "N_min": res.n_min,
            }));
        }
    }
    save(dir, "fig8_norms.csv", table, files)?;
    Ok(json!(minima))
}

/// Runs a preset, writing its files into `dir` (default `./<preset>`).
pub fn run(preset: Preset, small: bool, g: &Globals) -> Result<()> {
    let dir: PathBuf = g.out.clone().unwrap_or_else(|| PathBuf::from(preset.name()));
    std::fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    let result = match preset {
        Preset::Fig1 => fig1(&dir, g, &mut files)?,
        Preset::Fig2 => fig2(&dir, g, &mut files)?,
        Preset::Fig4 => fig4(&dir, g, &mut files)?,
        Preset::Fig5 => fig5(&dir, g, &mut files)?,
        Preset::Fig6 => fig6(&dir, g, &mut files)?,
        Preset::Fig7 => fig7(&dir, g, &mut files)?,
        Preset::Fig8 => fig8(&dir, g, small, &mut files)?,
    };
    let summary =
        json!({"command": "preset-run", "preset": preset.name(), "small": small, "files": files, "result": result});
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}
