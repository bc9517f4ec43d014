use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use poremsa::equilibrium::export_csv;
use poremsa::fem::mms::{fitted_order, scalar_mms, stokes_mms};
use poremsa::msa::{Model, MsaParams, Reservoir};
use poremsa::sweep::{
    check_report, discretize, emit_outputs, run_sweep, solve_point, solve_point_equilibrium,
    sweep_csv, RunConfig, SweepPoint, SweepRecord,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "poremsa",
    version,
    about = "Homogenized Onsager tensor of MSA electrolytes in periodic porous cells"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// INI configuration; built-in NaCl defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    model: Option<ModelArg>,
    /// Uniform mesh refinement level (halves every size per level).
    #[arg(long, global = true)]
    refine: Option<u32>,
    /// Run sweep points one after another (bitwise reproducible output).
    #[arg(long, global = true)]
    sequential: bool,
    /// Output directory; overrides [output] directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the configuration and print the derived groups.
    Check,
    /// Solve the equilibrium at one sweep point and export the fields.
    Equilibrium {
        /// Sweep point index.
        #[arg(long, default_value_t = 0)]
        point: usize,
    },
    /// Solve the cell problems at one sweep point and print the tensor.
    Upscale {
        #[arg(long, default_value_t = 0)]
        point: usize,
    },
    /// Run the configured sweep and write all output files.
    Sweep,
    /// Manufactured-solution convergence orders of the finite elements.
    Mms,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Msa,
    Ideal,
    Both,
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            RunConfig::parse(&text).with_context(|| format!("in {}", p.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(m) = cli.model {
        cfg.models = match m {
            ModelArg::Msa => vec![Model::Msa],
            ModelArg::Ideal => vec![Model::Ideal],
            ModelArg::Both => vec![Model::Msa, Model::Ideal],
        };
    }
    if let Some(r) = cli.refine {
        cfg.mesh.refine = r;
    }
    if let Some(o) = &cli.out {
        cfg.output.directory = o.clone();
    }
    Ok(cfg)
}

fn pick_point(cfg: &RunConfig, index: usize) -> Result<SweepPoint> {
    let mut points = cfg.validate()?;
    if index >= points.len() {
        bail!(
            "point {index} out of range: the sweep has {} points",
            points.len()
        );
    }
    Ok(points.swap_remove(index))
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let p = dir.join(name);
    std::fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
    println!("wrote {}", p.display());
    Ok(())
}

fn equilibrium(cli: &Cli, cfg: &RunConfig, index: usize) -> Result<()> {
    let point = pick_point(cfg, index)?;
    let disc = discretize(cfg, &point)?;
    println!(
        "mesh: {} vertices, {} triangles, {} P2 dofs",
        disc.mesh.vertices.len(),
        disc.mesh.triangles.len(),
        disc.p2.n_dofs
    );
    for &model in &cfg.models {
        let eq = solve_point_equilibrium(cfg, &point, &disc, model)?;
        println!(
            "\n[{model}]\n{}",
            poremsa::equilibrium::equilibrium_diagnostics(&eq, &disc)
        );
        if cli.out.is_some() {
            let prm = MsaParams::new(&point.electrolyte, &point.scaling);
            let res = Reservoir::for_model(&prm, model)?;
            let csv = export_csv(&eq, &disc, &point.electrolyte, &point.scaling, &res)?;
            write_file(
                &cfg.output.directory,
                &format!("equilibrium_{model}.csv"),
                &csv,
            )?;
        }
    }
    Ok(())
}

fn upscale(cli: &Cli, cfg: &RunConfig, index: usize) -> Result<()> {
    let point = pick_point(cfg, index)?;
    let disc = discretize(cfg, &point)?;
    let mut records: Vec<SweepRecord> = Vec::new();
    for &model in &cfg.models {
        let sol = solve_point(cfg, &point, &disc, model)?;
        let t = &sol.tensor;
        println!("[{model}]");
        println!("K    {:?}", t.k);
        println!(
            "Krel [{:.6}, {:.6}]",
            t.k[0][0] / sol.k0[0][0],
            t.k[1][1] / sol.k0[1][1]
        );
        for i in 0..t.n_species {
            println!("J{}   {:?}", i + 1, t.j[i]);
        }
        for j in 0..t.n_species {
            for i in 0..t.n_species {
                println!("D{}{}  {:?}", j + 1, i + 1, t.d[j][i]);
            }
        }
        println!("cell residuals {:?}", sol.cells.residuals);
        println!("{}\n", sol.onsager);
        records.push(SweepRecord::new(&point, model, &disc, &sol));
    }
    if cli.out.is_some() {
        write_file(
            &cfg.output.directory,
            "tensor.csv",
            &sweep_csv(cfg.species.len(), &records),
        )?;
    }
    Ok(())
}

fn sweep(cli: &Cli, cfg: &RunConfig) -> Result<bool> {
    let start = std::time::Instant::now();
    let outcome = run_sweep(cfg, cli.sequential)?;
    let files = emit_outputs(cfg, &outcome, &cfg.output.directory)
        .with_context(|| format!("writing outputs to {}", cfg.output.directory.display()))?;
    println!(
        "{} records, {} failures in {:.1} s",
        outcome.records.len(),
        outcome.failures.len(),
        start.elapsed().as_secs_f64()
    );
    for f in &files {
        println!("wrote {}", f.display());
    }
    for f in &outcome.failures {
        eprintln!("point {} ({}) {}: {}", f.point, f.value, f.model, f.message);
    }
    Ok(outcome.succeeded())
}

fn mms() -> Result<bool> {
    let divisions = [8, 16, 32];
    let s = scalar_mms(&divisions)?;
    let k = stokes_mms(&divisions)?;
    let (os, ou, op) = (
        fitted_order(&s, 0),
        fitted_order(&k, 0),
        fitted_order(&k, 1),
    );
    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "h", "P2 scalar", "velocity", "pressure"
    );
    for (a, b) in s.iter().zip(&k) {
        println!(
            "{:>6.4} {:>12.4e} {:>12.4e} {:>12.4e}",
            a.h, a.errors[0], b.errors[0], b.errors[1]
        );
    }
    let ok = (os - 3.0).abs() <= 0.2 && (ou - 3.0).abs() <= 0.3 && (op - 2.0).abs() <= 0.3;
    println!("orders: scalar {os:.3} (3.0), velocity {ou:.3} (3.0), pressure {op:.3} (2.0)");
    println!("verdict: {}", if ok { "pass" } else { "FAIL" });
    Ok(ok)
}

fn run(cli: &Cli) -> Result<bool> {
    if let Command::Mms = cli.command {
        return mms();
    }
    let cfg = load(cli)?;
    match &cli.command {
        Command::Check => match check_report(&cfg) {
            Ok(s) => {
                print!("{s}");
                Ok(true)
            }
            Err(e) => {
                print!("{e}");
                Ok(false)
            }
        },
        Command::Equilibrium { point } => equilibrium(cli, &cfg, *point).map(|_| true),
        Command::Upscale { point } => upscale(cli, &cfg, *point).map(|_| true),
        Command::Sweep => sweep(cli, &cfg),
        Command::Mms => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
