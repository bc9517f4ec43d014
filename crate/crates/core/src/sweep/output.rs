use super::config::{RunConfig, SweepParameter};
use super::run::{SweepOutcome, SweepRecord};
use super::svg::{line_plot, Series};
use crate::upscale::DIM;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header of `sweep.csv` for `n` species. Indices are 1-based in valence order.
pub fn csv_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "run_id",
        "model",
        "geometry",
        "porosity",
        "ell_nm",
        "n_inf_mol_per_l",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for l in 1..=DIM {
        for k in 1..=DIM {
            h.push(format!("K_{l}{k}"));
        }
    }
    h.push("Krel_11".into());
    h.push("Krel_22".into());
    let pairs: Vec<(usize, usize)> = (1..=DIM)
        .flat_map(|l| (1..=DIM).map(move |k| (l, k)))
        .collect();
    for i in 1..=n {
        for (l, k) in &pairs {
            h.push(format!("J{i}_{l}{k}"));
        }
    }
    for j in 1..=n {
        for (l, k) in &pairs {
            h.push(format!("L{j}_{l}{k}"));
        }
    }
    for j in 1..=n {
        for i in 1..=n {
            for (l, k) in &pairs {
                h.push(format!("D{j}{i}_{l}{k}"));
            }
        }
    }
    for j in 1..=n {
        h.push(format!("avg_n{j}"));
    }
    h.extend(
        ["sym_residual", "min_eig", "newton_iters", "outer_iters"]
            .iter()
            .map(|s| s.to_string()),
    );
    h
}

pub fn csv_row(r: &SweepRecord) -> Vec<String> {
    let t = &r.tensor;
    let n = t.n_species;
    let mut row = vec![
        r.run_id.clone(),
        r.model.to_string(),
        r.geometry.clone(),
        num(r.porosity),
        num(r.ell_nm),
        num(r.n_inf_mol_per_l),
    ];
    let block = |b: &[[f64; DIM]; DIM], row: &mut Vec<String>| {
        for line in b {
            for x in line {
                row.push(num(*x));
            }
        }
    };
    block(&t.k, &mut row);
    row.push(num(r.krel[0]));
    row.push(num(r.krel[1]));
    for i in 0..n {
        block(&t.j[i], &mut row);
    }
    for j in 0..n {
        block(&t.l[j], &mut row);
    }
    for j in 0..n {
        for i in 0..n {
            block(&t.d[j][i], &mut row);
        }
    }
    row.extend(r.averages.iter().map(|a| num(*a)));
    row.push(num(r.sym_residual));
    row.push(num(r.min_eig));
    row.push(r.newton_iters.to_string());
    row.push(r.outer_iters.to_string());
    row
}

pub fn sweep_csv(n_species: usize, records: &[SweepRecord]) -> String {
    let mut s = csv_header(n_species).join(",");
    s.push('\n');
    for r in records {
        s.push_str(&csv_row(r).join(","));
        s.push('\n');
    }
    s
}

/// `#` comment header followed by the resolved configuration, which parses
/// back to the same [`RunConfig`].
pub fn manifest(cfg: &RunConfig) -> String {
    let o = &cfg.solver;
    let mut s = String::new();
    let _ = writeln!(s, "# poremsa {TOOL_VERSION}");
    let _ = writeln!(
        s,
        "# tolerances: tol_pde {} tol_fp {} algebraic 1e-12 linear solve {}",
        o.tol_pde,
        o.tol_fp,
        crate::fem::SOLVE_TOL
    );
    let _ = writeln!(s, "# re-run with: poremsa sweep --config manifest.txt");
    s.push_str(&cfg.to_ini());
    s
}

/// Long-format plot table: `x,x_unit,model,quantity,value,value_unit`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub name: String,
    pub x_label: String,
    pub x_unit: String,
    pub rows: Vec<PlotRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    pub x: f64,
    pub model: String,
    pub quantity: String,
    pub value: f64,
    pub value_unit: String,
}

impl PlotData {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,x_unit,model,quantity,value,value_unit\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                num(r.x),
                self.x_unit,
                r.model,
                r.quantity,
                num(r.value),
                r.value_unit
            );
        }
        s
    }

    fn series(&self) -> Vec<Series> {
        let mut out: Vec<Series> = Vec::new();
        for r in &self.rows {
            let label = format!("{} {}", r.quantity, r.model);
            match out.iter_mut().find(|s| s.label == label) {
                Some(s) => s.points.push((r.x, r.value)),
                None => out.push(Series {
                    label,
                    points: vec![(r.x, r.value)],
                }),
            }
        }
        out
    }

    pub fn to_svg(&self) -> String {
        line_plot(
            &self.name,
            &format!("{} [{}]", self.x_label, self.x_unit),
            &self.series(),
        )
    }
}

fn sweep_axis(param: SweepParameter, r: &SweepRecord) -> (f64, &'static str, &'static str) {
    match param {
        SweepParameter::Concentration => (r.n_inf_mol_per_l, "concentration", "mol/l"),
        SweepParameter::PoreSize => (r.ell_nm, "pore_size", "nm"),
        SweepParameter::Porosity => (r.porosity, "porosity", "1"),
        SweepParameter::None => (r.n_inf_mol_per_l, "concentration", "mol/l"),
    }
}

/// Plot tables for permeability, diffusion, coupling and averaged
/// concentrations against the swept parameter. Tensor entries and averages
/// are expressed in the normalization of `n_c_ref` (mol/l): with
/// f = n_c/n_c_ref, J scales by f, D by f² and averages by f.
pub fn plot_data(
    param: SweepParameter,
    records: &[SweepRecord],
    n_c_ref: f64,
) -> Vec<PlotData> {
    let Some(first) = records.first() else {
        return Vec::new();
    };
    let (_, x_label, x_unit) = sweep_axis(param, first);
    let n = first.tensor.n_species;
    let mut tables: Vec<PlotData> = ["permeability", "diffusion", "coupling", "averages"]
        .iter()
        .map(|g| PlotData {
            name: format!("{g}_vs_{x_label}"),
            x_label: x_label.into(),
            x_unit: x_unit.into(),
            rows: Vec::new(),
        })
        .collect();
    for r in records {
        let (x, _, _) = sweep_axis(param, r);
        let model = r.model.to_string();
        let t = &r.tensor;
        let f = r.n_c_mol_per_l / n_c_ref;
        let unit = format!("dimensionless (n_c = {n_c_ref} mol/l)");
        let mut push = |table: usize, quantity: String, value: f64, unit: &str| {
            tables[table].rows.push(PlotRow {
                x,
                model: model.clone(),
                quantity,
                value,
                value_unit: unit.into(),
            });
        };
        for l in 0..DIM {
            for k in 0..DIM {
                push(
                    0,
                    format!("K_{}{}", l + 1, k + 1),
                    t.k[l][k],
                    "ell^2 (dimensionless)",
                );
            }
        }
        push(0, "Krel_11".into(), r.krel[0], "1");
        push(0, "Krel_22".into(), r.krel[1], "1");
        for j in 0..n {
            for i in 0..n {
                for l in 0..DIM {
                    push(
                        1,
                        format!("D{}{}_{}{}", j + 1, i + 1, l + 1, l + 1),
                        t.d[j][i][l][l] * f * f,
                        &unit,
                    );
                }
            }
        }
        for i in 0..n {
            for l in 0..DIM {
                push(
                    2,
                    format!("J{}_{}{}", i + 1, l + 1, l + 1),
                    t.j[i][l][l] * f,
                    &unit,
                );
            }
        }
        for j in 0..n {
            push(3, format!("avg_n{}", j + 1), r.averages[j] * f, &unit);
            push(
                3,
                format!("avg_n{}_molar", j + 1),
                r.averages[j] * r.n_c_mol_per_l,
                "mol/l",
            );
        }
    }
    tables
}

/// Writes `sweep.csv`, `manifest.txt`, the plot tables (optionally as SVG)
/// and `failures.txt` when any point failed. Returns the written paths.
pub fn emit_outputs(
    cfg: &RunConfig,
    outcome: &SweepOutcome,
    dir: &Path,
) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut write = |name: &str, body: &str| -> std::io::Result<()> {
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        written.push(p);
        Ok(())
    };
    write("sweep.csv", &sweep_csv(cfg.species.len(), &outcome.records))?;
    write("manifest.txt", &manifest(cfg))?;
    for table in plot_data(cfg.sweep.parameter, &outcome.records, cfg.n_c_mol_per_l) {
        write(&format!("{}.csv", table.name), &table.to_csv())?;
        if cfg.output.svg {
            write(&format!("{}.svg", table.name), &table.to_svg())?;
        }
    }
    let failures = dir.join("failures.txt");
    if outcome.failures.is_empty() && failures.exists() {
        std::fs::remove_file(&failures)?;
    }
    if !outcome.failures.is_empty() {
        let mut s = String::from("point,value,model,error\n");
        for f in &outcome.failures {
            let _ = writeln!(
                s,
                "{},{},{},\"{}\"",
                f.point,
                f.value,
                f.model,
                f.message.replace('"', "'").replace('\n', " ")
            );
        }
        write("failures.txt", &s)?;
    }
    Ok(written)
}
