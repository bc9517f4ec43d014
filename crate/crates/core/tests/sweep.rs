use poremsa::msa::Model;
use poremsa::sweep::*;
use std::path::PathBuf;
use std::process::Command;

const SMALL: &str = "\
[solvent]
n_c_mol_per_l = 0.1

[geometry]
kind = ellipse
porosity = 0.62
pore_size_nm = 20

[discretization]
h_far = 0.1

[solver]
model = both

[sweep]
parameter = concentration
values = 0.05, 0.2
";

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("poremsa-test-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn line_error(text: &str) -> usize {
    match RunConfig::parse(text) {
        Err(ConfigError::Parse { line, .. })
        | Err(ConfigError::UnknownKey { line, .. })
        | Err(ConfigError::UnknownSection { line, .. })
        | Err(ConfigError::Invalid { line, .. }) => line,
        other => panic!("expected a located error, got {other:?}"),
    }
}

#[test]
fn empty_text_gives_defaults() {
    assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
}

#[test]
fn parse_errors_carry_line_numbers() {
    assert_eq!(line_error("[solvent]\ntemperature = 298\n[geometry\n"), 3);
    assert_eq!(line_error("[solvent]\n\ntemprature = 298\n"), 3);
    assert_eq!(line_error("[solvent]\n[mystery]\nx = 1\n"), 2);
    assert_eq!(line_error("[solvent]\n\n[empty]\n"), 3);
    assert_eq!(line_error("[geometry]\nkind = ellipse\nporosity = lots\n"), 3);
    assert_eq!(line_error("[sweep]\nparameter = temperature\n"), 2);
}

#[test]
fn unknown_key_is_a_hard_error() {
    match RunConfig::parse("[output]\ndirectory = out\ncolour = red\n") {
        Err(ConfigError::UnknownKey { line, section, key }) => {
            assert_eq!((line, section.as_str(), key.as_str()), (3, "output", "colour"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn incomplete_species_is_rejected() {
    let err = RunConfig::parse("[species.K]\nvalence = 1\ndiffusivity = 1.9e-9\n").unwrap_err();
    assert!(matches!(err, ConfigError::Missing { .. }), "{err:?}");
    let err = RunConfig::parse("[species.K]\n").unwrap_err();
    assert!(matches!(err, ConfigError::Missing { .. }), "{err:?}");
}

#[test]
fn empty_or_unordered_grid_is_rejected() {
    let empty = "[sweep]\nparameter = pore_size\nvalues =\n";
    assert!(RunConfig::parse(empty).is_err());
    let mut cfg = RunConfig::default();
    cfg.sweep.parameter = SweepParameter::PoreSize;
    assert!(matches!(cfg.validate(), Err(ConfigError::Validation(_))));
    assert!(RunConfig::parse("[sweep]\nparameter = pore_size\nvalues = 20, 10\n").is_err());
}

#[test]
fn generated_grids() {
    let cfg = RunConfig::parse(
        "[sweep]\nparameter = concentration\nstart = 0.001\nstop = 1\ncount = 4\nscale = log\n",
    )
    .unwrap();
    let want = [0.001, 0.01, 0.1, 1.0];
    for (v, w) in cfg.sweep.values.iter().zip(want) {
        assert!((v / w - 1.0).abs() < 1e-12);
    }
    let lin = RunConfig::parse("[sweep]\nparameter = pore_size\nstart = 10\nstop = 40\ncount = 4\n")
        .unwrap();
    assert_eq!(lin.sweep.values, vec![10.0, 20.0, 30.0, 40.0]);
}

#[test]
fn non_neutral_reservoir_fails_validation() {
    let text = "\
[species.Na]
valence = 1
diffusivity = 1.333e-9
diameter = 3.3e-10
n_inf = 1

[species.Cl]
valence = -1
diffusivity = 2.032e-9
diameter = 3.3e-10
n_inf = 2
";
    let cfg = RunConfig::parse(text).unwrap();
    assert!(cfg.validate().is_err());
    match check_report(&cfg) {
        Err(ConfigError::Validation(msg)) => {
            assert!(msg.contains("electroneutrality: FAIL"), "{msg}");
            assert!(msg.contains("verdict: INVALID"), "{msg}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn check_report_groups() {
    let cfg = RunConfig::default();
    let report = check_report(&cfg).unwrap();
    assert!(report.contains("verdict: valid"), "{report}");
    let point = cfg.points().unwrap().remove(0);
    let sc = &point.scaling;
    assert!(sc.gamma_c > 0.117e9 && sc.gamma_c < 1.17e9);
    assert!(sc.xi_c > 0.252e-4 && sc.xi_c < 25.2e-4);
    let lb = sc.bjerrum_length;
    assert!((lb - 7.3e-10).abs() < 0.05 * 7.3e-10, "{lb}");
    for key in ["L_B", "lambda_D", "beta", "Gamma_c", "xi_c", "N_sigma", "Pe_", "Bound1"] {
        assert!(report.contains(key), "missing {key}");
    }
}

#[test]
fn manifest_round_trips() {
    let mut cfg = RunConfig::parse(SMALL).unwrap();
    cfg.geometry = GeometrySpec::Custom(vec![
        poremsa::mesh::Inclusion::Ellipse {
            center: [0.3, 0.4],
            a: 0.2,
            b: 0.1,
            rotation: 0.5,
        },
        poremsa::mesh::Inclusion::Rectangle {
            center: [0.75, 0.7],
            hx: 0.1,
            hy: 0.15,
        },
    ]);
    cfg.solver.tol_fp = 3e-9;
    let back = RunConfig::parse(&manifest(&cfg)).unwrap();
    match (&back.geometry, &cfg.geometry) {
        (GeometrySpec::Custom(a), GeometrySpec::Custom(b)) => {
            for (x, y) in a.iter().zip(b) {
                if let (
                    poremsa::mesh::Inclusion::Ellipse { rotation: r1, .. },
                    poremsa::mesh::Inclusion::Ellipse { rotation: r2, .. },
                ) = (x, y)
                {
                    assert!((r1 - r2).abs() < 1e-12);
                }
            }
        }
        _ => panic!("geometry kind lost"),
    }
    let mut plain = RunConfig::parse(SMALL).unwrap();
    plain.output.svg = true;
    assert_eq!(RunConfig::parse(&manifest(&plain)).unwrap(), plain);
}

#[test]
fn csv_header_schema() {
    let h = csv_header(2);
    assert_eq!(
        &h[..12],
        &[
            "run_id",
            "model",
            "geometry",
            "porosity",
            "ell_nm",
            "n_inf_mol_per_l",
            "K_11",
            "K_12",
            "K_21",
            "K_22",
            "Krel_11",
            "Krel_22"
        ]
    );
    assert_eq!(h[12], "J1_11");
    assert!(h.contains(&"L2_21".to_string()));
    assert!(h.contains(&"D12_22".to_string()));
    assert_eq!(
        &h[h.len() - 6..],
        &["avg_n1", "avg_n2", "sym_residual", "min_eig", "newton_iters", "outer_iters"]
    );
    assert_eq!(h.len(), 12 + 2 * 4 + 2 * 4 + 4 * 4 + 2 + 4);
}

#[test]
fn two_model_sweep_tags_rows_and_reruns_identically() {
    let cfg = RunConfig::parse(SMALL).unwrap();
    let a = run_sweep(&cfg, true).unwrap();
    assert!(a.succeeded(), "{:?}", a.failures);
    assert_eq!(a.records.len(), 4);
    let csv = sweep_csv(2, &a.records);
    let models: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(models, ["msa", "ideal", "msa", "ideal"]);
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), csv_header(2).len());
        assert!(cells[6].contains('e') && cells[6].split('e').next().unwrap().len() >= 18);
    }
    let b = run_sweep(&cfg, true).unwrap();
    assert_eq!(csv, sweep_csv(2, &b.records));
    let parallel = run_sweep(&cfg, false).unwrap();
    assert_eq!(csv, sweep_csv(2, &parallel.records));
    for r in &a.records {
        assert!(r.sym_residual < 1e-6 && r.min_eig > 0.0);
    }
    assert_eq!(a.records[0].model, Model::Msa);
    assert!((a.records[2].n_inf_mol_per_l - 0.2).abs() < 1e-12);
}

#[test]
fn emitted_files_and_manifest_rerun() {
    let mut cfg = RunConfig::parse(SMALL).unwrap();
    cfg.models = vec![Model::Ideal];
    cfg.output.svg = true;
    let dir = scratch("emit");
    let outcome = run_sweep(&cfg, true).unwrap();
    let files = emit_outputs(&cfg, &outcome, &dir).unwrap();
    let names: Vec<String> = files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    for want in [
        "sweep.csv",
        "manifest.txt",
        "permeability_vs_concentration.csv",
        "diffusion_vs_concentration.svg",
        "averages_vs_concentration.csv",
    ] {
        assert!(names.iter().any(|n| n == want), "{want} missing from {names:?}");
    }
    assert!(!dir.join("failures.txt").exists());
    let text = std::fs::read_to_string(dir.join("manifest.txt")).unwrap();
    let again = RunConfig::parse(&text).unwrap();
    let rerun = run_sweep(&again, true).unwrap();
    assert_eq!(
        std::fs::read_to_string(dir.join("sweep.csv")).unwrap(),
        sweep_csv(2, &rerun.records)
    );
    let svg = std::fs::read_to_string(dir.join("permeability_vs_concentration.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn concentration_modes_agree_on_relative_quantities() {
    let mut nc = RunConfig::parse(SMALL).unwrap();
    nc.models = vec![Model::Ideal];
    let mut ninf = nc.clone();
    ninf.sweep.concentration_mode = ConcentrationMode::NInf;
    let a = run_sweep(&nc, true).unwrap();
    let b = run_sweep(&ninf, true).unwrap();
    for (x, y) in a.records.iter().zip(&b.records) {
        assert!((x.krel[0] - y.krel[0]).abs() < 1e-8 * x.krel[0]);
        let f = x.n_c_mol_per_l / y.n_c_mol_per_l;
        assert!((x.averages[1] * f - y.averages[1]).abs() < 1e-7 * y.averages[1]);
        assert!((x.n_inf_mol_per_l - y.n_inf_mol_per_l).abs() < 1e-12);
    }
}

#[test]
fn pore_size_sweep_rescales_groups() {
    let cfg =
        RunConfig::parse("[sweep]\nparameter = pore_size\nvalues = 10, 20\n").unwrap();
    let p = cfg.points().unwrap();
    assert!((p[1].scaling.beta / p[0].scaling.beta - 4.0).abs() < 1e-12);
    assert!((p[1].scaling.n_sigma / p[0].scaling.n_sigma - 2.0).abs() < 1e-12);
    assert!((p[1].scaling.peclet[0] / p[0].scaling.peclet[0] - 4.0).abs() < 1e-12);
}

#[test]
fn plot_tables_rescale_to_reference_normalization() {
    let mut cfg = RunConfig::parse(SMALL).unwrap();
    cfg.models = vec![Model::Ideal];
    let out = run_sweep(&cfg, true).unwrap();
    let tables = plot_data(SweepParameter::Concentration, &out.records, 0.1);
    let diff = tables.iter().find(|t| t.name == "diffusion_vs_concentration").unwrap();
    let r = &out.records[1];
    let f = r.n_c_mol_per_l / 0.1;
    let row = diff
        .rows
        .iter()
        .find(|row| row.quantity == "D22_11" && (row.x - 0.2).abs() < 1e-12)
        .unwrap();
    assert!((row.value - r.tensor.d[1][1][0][0] * f * f).abs() < 1e-12 * row.value.abs());
}

#[test]
fn cli_check_and_sequential_sweep() {
    let dir = scratch("cli");
    let config = dir.join("small.ini");
    std::fs::write(&config, SMALL).unwrap();
    let bin = env!("CARGO_BIN_EXE_poremsa");
    let check = Command::new(bin)
        .args(["check", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(check.status.success());
    assert!(String::from_utf8_lossy(&check.stdout).contains("verdict: valid"));

    let bad = dir.join("bad.ini");
    std::fs::write(&bad, "[solver]\nmodel = msa\ntolerance = 1\n").unwrap();
    let out = Command::new(bin).args(["check", "--config"]).arg(&bad).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let target = dir.join(run);
        let status = Command::new(bin)
            .args(["sweep", "--sequential", "--model", "ideal", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&target)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        outputs.push(std::fs::read(target.join("sweep.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    std::fs::remove_dir_all(dir).unwrap();
}
