//! `dimerlab`: exact vs continuous-variable spectra of the two-component
//! Bose-Hubbard dimer from the command line.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use dimerlab::cv::{
    cv_eigenstate, cv_levels, eigenfunction_density, stationary_points_general, default_seeds,
};
use dimerlab::exact::{
    amplitude_grid, cluster_grid, degenerate_clusters, solve_parity_resolved, AmplitudeGrid,
    SolverChoice, CLUSTER_RTOL,
};
use dimerlab::fock::{FockBasis, Parity};
use dimerlab::harness::output::{
    create_file, fmt_f64, write_cv_levels_csv, write_grid_csv, write_json_file, write_levels_csv,
    write_spectrum_csv, write_trajectory_csv,
};
use dimerlab::harness::{
    compare_point, deviation_scaling, locate_collapse_refined, sweep_coupling, OutputFormat,
    RunConfig, SweepSpec,
};
use dimerlab::model::{classify_regime, critical_coupling, effective_params, ModelParams};
use dimerlab::semiclassical::{integrate_sampled, PhasePoint};

#[derive(Parser)]
#[command(name = "dimerlab", version, about = "Exact and CV spectra of the two-species Bose-Hubbard dimer")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Interspecies coupling W.
    #[arg(long = "W", global = true, allow_hyphen_values = true)]
    w: Option<f64>,
    /// Intraspecies interaction, both species.
    #[arg(long = "U", global = true)]
    u: Option<f64>,
    /// Hopping amplitude, both species.
    #[arg(long = "J", global = true)]
    j: Option<f64>,
    #[arg(long = "Na", global = true)]
    n_a: Option<usize>,
    /// Defaults to N_a.
    #[arg(long = "Nb", global = true)]
    n_b: Option<usize>,
    /// Number of low-lying levels.
    #[arg(long, global = true)]
    levels: Option<usize>,
    /// W sweep as start:stop:count.
    #[arg(long, global = true, allow_hyphen_values = true)]
    sweep: Option<SweepSpec>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
    #[arg(long, global = true)]
    solver: Option<SolverChoice>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact and CV spectrum at one parameter point.
    Spectrum,
    /// Relative levels over a W sweep (levels.csv).
    Sweep,
    /// Probability grids of exact levels and CV eigenstates.
    State(StateArgs),
    /// Locate the gap minimum of the localization transition (collapse.json).
    Collapse(CollapseArgs),
    /// Integrate a semiclassical trajectory (trajectory.csv).
    Dynamics(DynamicsArgs),
    /// Deviation report between exact and CV spectra (report.json).
    Compare(CompareArgs),
}

#[derive(Args)]
struct StateArgs {
    /// Exact level index; repeatable.
    #[arg(long = "level", id = "level")]
    level: Vec<usize>,
    /// Sum grids over the degenerate cluster containing each level.
    #[arg(long)]
    cluster: bool,
    /// CV state as n,m or n,m,+ / n,m,- (strong regime parity); repeatable.
    #[arg(long = "cv")]
    cv: Vec<String>,
}

#[derive(Args)]
struct CollapseArgs {
    /// Points in the coarse pass (the --sweep count overrides it).
    #[arg(long, default_value_t = 41)]
    coarse: usize,
    /// Points in the refinement pass.
    #[arg(long, default_value_t = 21)]
    fine: usize,
}

#[derive(Args)]
struct DynamicsArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    y0: f64,
    #[arg(long = "theta-x0", default_value_t = 0.0, allow_hyphen_values = true)]
    theta_x0: f64,
    #[arg(long = "theta-y0", default_value_t = 0.0, allow_hyphen_values = true)]
    theta_y0: f64,
    #[arg(long = "t-end", default_value_t = 100.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Keep every n-th step.
    #[arg(long, default_value_t = 100)]
    stride: usize,
}

#[derive(Args)]
struct CompareArgs {
    /// Total boson numbers for a deviation-scaling fit, e.g. 40,60,100,200.
    #[arg(long, value_delimiter = ',')]
    scaling: Vec<usize>,
}

fn build_config(g: &GlobalArgs) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => RunConfig::from_file(path)
            .with_context(|| format!("reading config {}", path.display()))?,
        None => {
            let n_a = g.n_a.context("--Na is required without --config")?;
            RunConfig::new(ModelParams::twin(n_a, 1.0, 0.0, 0.0))
        }
    };
    let p = &mut cfg.params;
    if let Some(j) = g.j {
        p.j_a = j;
        p.j_b = j;
    }
    if let Some(u) = g.u {
        p.u_a = u;
        p.u_b = u;
    }
    if let Some(w) = g.w {
        p.w = w;
    }
    if let Some(n) = g.n_a {
        p.n_a = n;
        if g.config.is_none() {
            p.n_b = n;
        }
    }
    if let Some(n) = g.n_b {
        p.n_b = n;
    }
    if let Some(k) = g.levels {
        cfg.levels = k;
    }
    if let Some(s) = g.sweep {
        cfg.sweep = Some(s);
    }
    if let Some(out) = &g.out {
        cfg.out = out.clone();
    }
    if let Some(f) = g.format {
        cfg.format = f;
    }
    if let Some(s) = g.solver {
        cfg.solver = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = build_config(&cli.global)?;
    std::fs::create_dir_all(&cfg.out)
        .with_context(|| format!("creating {}", cfg.out.display()))?;
    match cli.command {
        Command::Spectrum => run_spectrum(&cfg),
        Command::Sweep => run_sweep(&cfg),
        Command::State(a) => run_state(&cfg, &a),
        Command::Collapse(a) => run_collapse(&cfg, &a),
        Command::Dynamics(a) => run_dynamics(&cfg, &a),
        Command::Compare(a) => run_compare(&cfg, &a),
    }
}

fn run_spectrum(cfg: &RunConfig) -> Result<()> {
    let p = &cfg.params;
    let basis = FockBasis::for_params(p)?;
    let k = cfg.levels.min(basis.dim);
    let spectrum = solve_parity_resolved(p, k, cfg.solver, false)?;
    let e = effective_params(p);
    let cv = cv_levels(&e, cfg.n_max, cfg.m_max).ok();
    match cfg.format {
        OutputFormat::Csv => {
            let mut f = create_file(&cfg.out.join("spectrum.csv"))?;
            write_spectrum_csv(&mut f, &spectrum)?;
            f.flush()?;
            if let Some(levels) = &cv {
                let mut f = create_file(&cfg.out.join("cv_levels.csv"))?;
                write_cv_levels_csv(&mut f, levels)?;
                f.flush()?;
            }
        }
        OutputFormat::Json => {
            let e0 = spectrum.eigenvalues[0];
            let exact: Vec<_> = spectrum
                .eigenvalues
                .iter()
                .enumerate()
                .map(|(i, &v)| json!({"index": i, "energy": v, "relative": v - e0}))
                .collect();
            write_json_file(
                &cfg.out.join("spectrum.json"),
                &json!({"params": p, "exact": exact, "cv": cv}),
            )?;
        }
    }
    let regime = classify_regime(&e).map(|r| r.tag().to_string()).unwrap_or("asymmetric".into());
    println!("regime {regime}, dim {}", basis.dim);
    for (i, v) in spectrum.eigenvalues.iter().enumerate() {
        println!("{i} {} {}", fmt_f64(*v), fmt_f64(v - spectrum.eigenvalues[0]));
    }
    Ok(())
}

fn run_sweep(cfg: &RunConfig) -> Result<()> {
    if cfg.sweep.is_none() {
        bail!("sweep needs --sweep start:stop:count or a \"sweep\" config key");
    }
    let records = sweep_coupling(cfg)?;
    match cfg.format {
        OutputFormat::Csv => {
            let mut f = create_file(&cfg.out.join("levels.csv"))?;
            write_levels_csv(&mut f, &records)?;
            f.flush()?;
        }
        OutputFormat::Json => write_json_file(&cfg.out.join("levels.json"), &records)?,
    }
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    println!("{} points, {} failed", records.len(), failed);
    Ok(())
}

fn parse_cv_label(s: &str) -> Result<(usize, usize, Option<Parity>)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || anyhow::anyhow!("--cv '{s}' is not n,m or n,m,+/-");
    if parts.len() < 2 || parts.len() > 3 {
        return Err(bad());
    }
    let n = parts[0].parse().map_err(|_| bad())?;
    let m = parts[1].parse().map_err(|_| bad())?;
    let parity = match parts.get(2) {
        None => None,
        Some(&"+") => Some(Parity::Even),
        Some(&"-") => Some(Parity::Odd),
        Some(_) => return Err(bad()),
    };
    Ok((n, m, parity))
}

fn write_grid(cfg: &RunConfig, label: &str, grid: &AmplitudeGrid, meta: serde_json::Value) -> Result<()> {
    let sidecar = json!({
        "label": label,
        "params": cfg.params,
        "rows": grid.rows(),
        "cols": grid.cols(),
        "row_index": "n_L",
        "col_index": "m_L",
        "meta": meta,
    });
    match cfg.format {
        OutputFormat::Csv => {
            let mut f = create_file(&cfg.out.join(format!("grid_{label}.csv")))?;
            write_grid_csv(&mut f, grid)?;
            f.flush()?;
            write_json_file(&cfg.out.join(format!("grid_{label}.json")), &sidecar)?;
        }
        OutputFormat::Json => {
            let mut doc = sidecar;
            doc["values"] = json!(grid.values);
            write_json_file(&cfg.out.join(format!("grid_{label}.json")), &doc)?;
        }
    }
    println!("wrote grid_{label}");
    Ok(())
}

fn run_state(cfg: &RunConfig, a: &StateArgs) -> Result<()> {
    let p = &cfg.params;
    let basis = FockBasis::for_params(p)?;
    let mut levels = a.level.clone();
    if levels.is_empty() && a.cv.is_empty() {
        levels.push(0);
    }
    if let Some(&top) = levels.iter().max() {
        let k = (top + 1).max(cfg.levels).min(basis.dim);
        let spectrum = solve_parity_resolved(p, k, cfg.solver, true)?;
        let clusters = degenerate_clusters(&spectrum.eigenvalues, CLUSTER_RTOL);
        for &l in &levels {
            if l >= spectrum.count() {
                bail!("level {l} exceeds the {} computed levels", spectrum.count());
            }
            let (grid, members) = if a.cluster {
                let c = clusters.iter().find(|c| c.contains(&l)).expect("every level clustered");
                (cluster_grid(&spectrum, c.clone(), &basis)?, c.clone().collect::<Vec<_>>())
            } else {
                (amplitude_grid(&spectrum, l, &basis)?, vec![l])
            };
            let meta = json!({
                "source": "exact",
                "level": l,
                "members": members,
                "energy": spectrum.eigenvalues[l],
                "parity": spectrum.parities.as_ref().map(|v| v[l]),
            });
            write_grid(cfg, &format!("exact_{l}"), &grid, meta)?;
        }
    }
    let e = effective_params(p);
    for label in &a.cv {
        let (n, m, parity) = parse_cv_label(label)?;
        let state = cv_eigenstate(&e, n, m, parity)?;
        let dens = eigenfunction_density(&e, &state, &basis)?;
        if dens.width_underflow {
            eprintln!("warning: CV state {n},{m} is narrower than the grid spacing");
        }
        let suffix = match state.parity {
            Some(Parity::Even) => "_plus",
            Some(Parity::Odd) => "_minus",
            None => "",
        };
        let meta = json!({
            "source": "cv",
            "state": state,
            "raw_norm": dens.raw_norm,
            "width_underflow": dens.width_underflow,
        });
        write_grid(cfg, &format!("cv_{n}_{m}{suffix}"), &dens.grid, meta)?;
    }
    Ok(())
}

fn run_collapse(cfg: &RunConfig, a: &CollapseArgs) -> Result<()> {
    let p = &cfg.params;
    let (start, stop, coarse) = match cfg.sweep {
        Some(s) => (s.start, s.stop, s.count),
        None => {
            let wc = critical_coupling(p)
                .context("non-twin parameters need an explicit --sweep range")?;
            (0.5 * wc, 2.0 * wc, a.coarse)
        }
    };
    let est = locate_collapse_refined(p, start, stop, coarse, a.fine, cfg.solver)?;
    let wc = critical_coupling(p).ok();
    write_json_file(
        &cfg.out.join("collapse.json"),
        &json!({
            "params": p,
            "estimate": est.estimate,
            "boundary": est.boundary,
            "gap_at_minimum": est.gap_at_minimum,
            "critical_coupling": wc,
            "curve": est.curve,
        }),
    )?;
    if est.boundary {
        println!("gap minimum at sweep boundary W = {}", fmt_f64(est.estimate));
    } else {
        println!("gap minimum at W = {}", fmt_f64(est.estimate));
    }
    Ok(())
}

fn run_dynamics(cfg: &RunConfig, a: &DynamicsArgs) -> Result<()> {
    let e = effective_params(&cfg.params);
    let start = PhasePoint::new(a.x0, a.y0, a.theta_x0, a.theta_y0);
    let tr = integrate_sampled(&e, start, a.t_end, a.dt, a.stride)?;
    match cfg.format {
        OutputFormat::Csv => {
            let mut f = create_file(&cfg.out.join("trajectory.csv"))?;
            write_trajectory_csv(&mut f, &tr)?;
            f.flush()?;
        }
        OutputFormat::Json => write_json_file(&cfg.out.join("trajectory.json"), &tr)?,
    }
    let fixed = stationary_points_general(&e, &default_seeds(&e))?;
    println!(
        "{} samples, max relative drift {}, boundary {}, {} fixed points",
        tr.samples.len(),
        fmt_f64(tr.max_drift),
        tr.hit_boundary,
        fixed.points.len()
    );
    Ok(())
}

fn run_compare(cfg: &RunConfig, a: &CompareArgs) -> Result<()> {
    let p = cfg.params;
    let mut report = compare_point(&p, cfg.levels, cfg.n_max, cfg.m_max, cfg.solver)?;
    if !a.scaling.is_empty() {
        if a.scaling.iter().any(|n| n % 2 != 0) {
            bail!("--scaling takes even total boson numbers (split equally between species)");
        }
        let fit = deviation_scaling(
            &a.scaling,
            |n| ModelParams { n_a: n / 2, n_b: n / 2, ..p },
            cfg.solver,
        )?;
        report.scaling.push(fit);
    }
    write_json_file(&cfg.out.join("report.json"), &report)?;
    println!(
        "max relative deviation {}, ground overlap {}",
        fmt_f64(report.max_rel),
        fmt_f64(report.overlaps[0].overlap)
    );
    if let Some(fit) = report.scaling.first() {
        println!("deviation exponent {}", fmt_f64(fit.exponent));
    }
    Ok(())
}
