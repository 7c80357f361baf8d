//! `ssns`: build forward self-similar Navier-Stokes profiles from sphere
//! traces and certify them (decay fits, scaling identities, energy balance,
//! kernel integral bands).

mod config;

use std::fs;
use std::io::Write as IoWrite;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use config::RunConfig;
use ssns_core::caloric::{self, AngularQuad};
use ssns_core::diagnostics::{
    self, BumpSpec, EnergyTerms, ParabolicCylinder, SelfSimilarSampler,
};
use ssns_core::grid::GridSpec;
use ssns_core::io as field_io;
use ssns_core::kernel_check;
use ssns_core::landau::LandauField;
use ssns_core::solver::{self, ContinuationStatus};
use ssns_core::sphere::{self, HomogeneousField};
use ssns_core::stokes;
use ssns_core::{Error, Result};

const EXIT_INTERNAL: i32 = 1;
const EXIT_CONFIG: i32 = 2;
const EXIT_IO: i32 = 3;
const EXIT_ACCURACY: i32 = 4;
const EXIT_PARTIAL: i32 = 5;

#[derive(Parser)]
#[command(name = "ssns", version, about = "self-similar Navier-Stokes profile solver")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: trace -> caloric extension -> continuation.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Override the configured output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate checks on a solution directory and write report.csv.
    Diagnose {
        /// Solution directory produced by `solve`.
        dir: PathBuf,
        /// Comma list from: y, energy, decay, scaling, residual.
        #[arg(long)]
        checks: String,
        /// Decay-exponent pass threshold (2.5 for smooth data, 1.2 for the
        /// Hoelder fixtures).
        #[arg(long, default_value_t = 2.5)]
        decay_threshold: f64,
        /// Leray-projected profile residual pass threshold.
        #[arg(long, default_value_t = 1e-4)]
        residual_threshold: f64,
    },
    /// Evaluate the space-time kernel integral and its scaling bands.
    KernelCheck {
        #[arg(long)]
        alpha: u32,
        #[arg(long)]
        beta: u32,
        /// Comma list of radii, each > 8.
        #[arg(long)]
        radii: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the closed-form stationary jet solution onto a grid.
    Landau {
        #[arg(long)]
        b: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 16.0)]
        box_half_width: f64,
    },
    /// Fit the far-field decay exponent of a stored field.
    DecayFit {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        r_min: f64,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long, default_value_t = 6)]
        shells: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) | Error::Domain(_) | Error::Resolution(_) => EXIT_CONFIG,
        Error::Io(_) | Error::Format(_) => EXIT_IO,
        Error::Accuracy(_) => EXIT_ACCURACY,
        Error::SizeMismatch(_) => EXIT_INTERNAL,
    }
}

fn main() {
    if let Ok(v) = std::env::var("SSNS_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {
                // compute kernels are sequential; any cap >= 1 already holds
            }
            _ => {
                eprintln!("error: SSNS_THREADS must be a positive integer, got '{v}'");
                std::process::exit(EXIT_CONFIG);
            }
        }
    }
    let cli = Cli::parse();
    let code = match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    };
    std::process::exit(code);
}

fn run(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Solve { config, out } => cmd_solve(&config, out),
        Command::Diagnose {
            dir,
            checks,
            decay_threshold,
            residual_threshold,
        } => cmd_diagnose(&dir, &checks, decay_threshold, residual_threshold),
        Command::KernelCheck {
            alpha,
            beta,
            radii,
            out,
        } => cmd_kernel_check(alpha, beta, &radii, out),
        Command::Landau {
            b,
            out,
            n,
            box_half_width,
        } => cmd_landau(b, &out, n, box_half_width),
        Command::DecayFit {
            field,
            r_min,
            r_max,
            shells,
            out,
        } => cmd_decay_fit(&field, r_min, r_max, shells, out),
    }
}

fn cmd_solve(config_path: &Path, out_override: Option<PathBuf>) -> Result<i32> {
    let text = fs::read_to_string(config_path)?;
    let mut cfg = RunConfig::parse(&text)?;
    if let Some(dir) = out_override {
        cfg.output_dir = dir;
    }

    let trace_text = fs::read_to_string(&cfg.trace_file)?;
    let mut trace: sphere::SphereField<f64> = sphere::read_trace(trace_text.as_bytes())?;
    if cfg.mollify_eps > 0.0 {
        trace = sphere::mollify_sphere(&trace, cfg.mollify_eps)?;
    }
    let grid = GridSpec::new(cfg.grid_n, cfg.grid_l)?;
    let u0 = HomogeneousField::with_cutoff_for(trace, &grid)?;

    fs::create_dir_all(&cfg.output_dir)?;
    // record the trace actually used (post-mollification)
    {
        let f = fs::File::create(cfg.output_dir.join("trace.txt"))?;
        let mut w = std::io::BufWriter::new(f);
        sphere::write_trace(&u0.trace, &mut w)?;
        w.flush()?;
    }

    let profile = caloric::heat_extend(&u0, grid)?;
    field_io::write_field_file(&profile.field, &cfg.output_dir.join("u0.ssns"))?;
    fs::write(
        cfg.output_dir.join("u0.meta"),
        format!(
            "{}config_hash={}\nseed={}\nmollify_eps={}\n",
            caloric::sidecar_lines(&profile, "trace.txt"),
            cfg.hash,
            cfg.seed,
            cfg.mollify_eps
        ),
    )?;

    let problem = solver::ProfileProblem::new(profile, cfg.solver.n_s)?;
    let result = problem.continuation(&cfg.solver)?;

    let mut iter_csv = String::from("mu,iter,fp_residual,x_norm\n");
    for rec in &result.log {
        iter_csv.push_str(&format!(
            "{},{},{:e},{:e}\n",
            rec.mu, rec.iter, rec.fp_residual, rec.x_norm
        ));
    }
    fs::write(cfg.output_dir.join("iterations.csv"), iter_csv)?;

    let mut summary = format!(
        "config_hash={}\nseed={}\ntarget_mu={}\nachieved_mu={}\nstatus={}\n",
        cfg.hash,
        cfg.seed,
        result.target_mu,
        result.achieved_mu,
        match result.status {
            ContinuationStatus::Complete => "complete",
            ContinuationStatus::Partial => "partial",
        }
    );
    if let Some(sol) = &result.solution {
        field_io::write_field_file(&sol.v, &cfg.output_dir.join("v.ssns"))?;
        field_io::write_field_file(&sol.u, &cfg.output_dir.join("u.ssns"))?;
        field_io::write_field_file(&sol.p, &cfg.output_dir.join("p.ssns"))?;
        summary.push_str(&format!(
            "mu={}\nx_norm={:e}\nfp_residual={:e}\nprofile_residual={:e}\niterations={}\n",
            sol.mu, sol.x_norm, sol.fp_residual, sol.profile_residual, sol.iterations
        ));
    }
    fs::write(cfg.output_dir.join("summary.txt"), summary)?;

    match result.status {
        ContinuationStatus::Complete => Ok(0),
        ContinuationStatus::Partial => {
            eprintln!(
                "continuation stopped at mu = {} of {}",
                result.achieved_mu, result.target_mu
            );
            Ok(EXIT_PARTIAL)
        }
    }
}

fn require_file(path: &Path) -> Result<()> {
    if !path.is_file() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("missing {}", path.display()),
        )));
    }
    Ok(())
}

fn cmd_diagnose(
    dir: &Path,
    checks: &str,
    decay_threshold: f64,
    residual_threshold: f64,
) -> Result<i32> {
    let selected: Vec<&str> = checks.split(',').map(|s| s.trim()).collect();
    for c in &selected {
        if !["y", "energy", "decay", "scaling", "residual"].contains(c) {
            return Err(Error::Parameter(format!("unknown check '{c}'")));
        }
    }
    for name in ["u.ssns", "p.ssns", "summary.txt"] {
        require_file(&dir.join(name))?;
    }
    let u: ssns_core::RealField64 = field_io::read_field_file(&dir.join("u.ssns"))?;
    let p: ssns_core::RealField64 = field_io::read_field_file(&dir.join("p.ssns"))?;
    if u.ncomp != 3 || p.ncomp != 1 || u.spec != p.spec {
        return Err(Error::Format("solution fields are inconsistent".into()));
    }
    let summary = fs::read_to_string(dir.join("summary.txt"))?;
    let hash = field_io::parse_key_values(&summary)?
        .into_iter()
        .find(|(k, _)| k == "config_hash")
        .map(|(_, v)| v)
        .unwrap_or_default();

    let l = u.spec.half_width();
    let mut rows: Vec<(String, f64, f64, bool)> = Vec::new();

    for check in &selected {
        match *check {
            "scaling" => {
                let samples: Vec<([f64; 3], f64)> = vec![
                    ([0.5, -0.3, 0.8], 1.0),
                    ([1.0, 1.0, -0.5], 2.0),
                    ([-0.2, 0.4, 0.1], 0.7),
                    ([1.5, 0.0, 0.5], 1.5),
                ];
                let v = diagnostics::scaling_invariance_check(&u, 2.0, &samples)?;
                rows.push(("scaling".into(), v, 1e-6, v <= 1e-6));
            }
            "decay" => {
                require_file(&dir.join("trace.txt"))?;
                let trace_text = fs::read_to_string(dir.join("trace.txt"))?;
                let trace: sphere::SphereField<f64> = sphere::read_trace(trace_text.as_bytes())?;
                let u0 = HomogeneousField::with_cutoff_for(trace, &u.spec)?;
                let shells: Vec<f64> = (0..6)
                    .map(|i| 4.0 + (l / 2.0 - 4.0) * i as f64 / 5.0)
                    .collect();
                let fit =
                    diagnostics::asymptotics_check(&u, &u0, &shells, AngularQuad::default())?;
                let value = if fit.degenerate { f64::INFINITY } else { fit.exponent };
                rows.push(("decay".into(), value, decay_threshold, value >= decay_threshold));
            }
            "residual" => {
                let r = diagnostics::profile_residual(&u, &p)?;
                rows.push((
                    "residual".into(),
                    r.leray_relative,
                    residual_threshold,
                    r.leray_relative <= residual_threshold,
                ));
            }
            "y" => {
                let sampler = SelfSimilarSampler::new(&u, Some(&p));
                let lam = 2.0f64;
                let q_small = ParabolicCylinder::new([0.0; 3], 2.0, 0.8)?;
                let q_big = ParabolicCylinder::new([0.0; 3], lam * lam * 2.0, lam * 0.8)?;
                let res = 12;
                let y_small = diagnostics::y_functional(
                    |x, t| {
                        let v = sampler.velocity(
                            [lam * x[0], lam * x[1], lam * x[2]],
                            lam * lam * t,
                        )?;
                        Ok([lam * v[0], lam * v[1], lam * v[2]])
                    },
                    |x, t| {
                        Ok(lam
                            * lam
                            * sampler
                                .pressure([lam * x[0], lam * x[1], lam * x[2]], lam * lam * t)?)
                    },
                    &q_small,
                    res,
                )?;
                let y_big = diagnostics::y_functional(
                    |x, t| sampler.velocity(x, t),
                    |x, t| sampler.pressure(x, t),
                    &q_big,
                    res,
                )?;
                let scale = (lam * y_big.y_value).abs().max(1e-300);
                let gap = (y_small.y_value - lam * y_big.y_value).abs() / scale;
                rows.push(("y".into(), gap, 1e-3, gap <= 1e-3));
            }
            "energy" => {
                let sampler = SelfSimilarSampler::new(&u, Some(&p));
                let bump = BumpSpec {
                    center: [0.0; 3],
                    r_plateau: 0.6,
                    r_zero: 1.2,
                    t_start: 0.5,
                    t_on: 0.65,
                    t_off: 0.85,
                    t_end: 1.0,
                };
                let (resid, dissipation) =
                    diagnostics::local_energy_residual(&sampler, &bump, 16, EnergyTerms::default())?;
                let rel = if dissipation > 0.0 {
                    (resid / dissipation).abs()
                } else {
                    0.0
                };
                rows.push(("energy".into(), rel, 1e-3, rel <= 1e-3));
            }
            _ => unreachable!(),
        }
    }

    let mut csv = format!("# config_hash={hash}\ncheck,value,threshold,pass\n");
    for (name, value, threshold, pass) in &rows {
        csv.push_str(&format!("{name},{value:e},{threshold:e},{pass}\n"));
    }
    fs::write(dir.join("report.csv"), &csv)?;
    print!("{csv}");
    if rows.iter().all(|r| r.3) {
        Ok(0)
    } else {
        Ok(EXIT_ACCURACY)
    }
}

fn cmd_kernel_check(alpha: u32, beta: u32, radii: &str, out: Option<PathBuf>) -> Result<i32> {
    let radii: Vec<f64> = radii
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parameter(format!("bad radius '{s}'")))
        })
        .collect::<Result<_>>()?;
    if radii.is_empty() {
        return Err(Error::Parameter("no radii given".into()));
    }
    for &r in &radii {
        if !(r > 8.0) {
            return Err(Error::Parameter(format!("radius {r} must exceed 8")));
        }
    }
    let values: Vec<kernel_check::KernelIntegral> = radii
        .iter()
        .map(|&r| kernel_check::kernel_bound_check(alpha, beta, r))
        .collect::<Result<_>>()?;

    let mut csv = String::from("alpha,beta,R,I,expected_ratio,measured_ratio\n");
    let mut all_ok = true;
    for (i, (&r, v)) in radii.iter().zip(&values).enumerate() {
        if i == 0 {
            csv.push_str(&format!("{alpha},{beta},{r},{:e},,\n", v.value));
        } else {
            let expected = kernel_check::expected_ratio(alpha, beta, radii[i - 1], r);
            let measured = v.value / values[i - 1].value;
            all_ok &= (measured / expected - 1.0).abs() <= 0.25;
            csv.push_str(&format!(
                "{alpha},{beta},{r},{:e},{expected:e},{measured:e}\n",
                v.value
            ));
        }
    }
    print!("{csv}");
    if let Some(path) = out {
        fs::write(path, &csv)?;
    }
    Ok(if all_ok { 0 } else { EXIT_ACCURACY })
}

fn cmd_landau(b: f64, out: &Path, n: usize, box_half_width: f64) -> Result<i32> {
    let field = LandauField::new(b)?;
    let grid = GridSpec::new(n, box_half_width)?;
    let (vel, pres) = field.sample(grid, 2.0 * grid.h());
    field_io::write_field_file(&vel, out)?;
    let pressure_path = sibling_with_suffix(out, "_pressure");
    field_io::write_field_file(&pres, &pressure_path)?;
    println!(
        "wrote {} and {} (b = {b}, n = {n}, L = {box_half_width})",
        out.display(),
        pressure_path.display()
    );
    Ok(0)
}

fn sibling_with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("field");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("ssns");
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn cmd_decay_fit(
    field_path: &Path,
    r_min: f64,
    r_max: Option<f64>,
    n_shells: usize,
    out: Option<PathBuf>,
) -> Result<i32> {
    let field: ssns_core::RealField64 = field_io::read_field_file(field_path)?;
    let r_max = r_max.unwrap_or(field.spec.half_width() / 2.0);
    if n_shells < 4 {
        return Err(Error::Parameter("need at least 4 shells".into()));
    }
    let shells: Vec<f64> = (0..n_shells)
        .map(|i| r_min + (r_max - r_min) * i as f64 / (n_shells - 1) as f64)
        .collect();
    let (fit_v, fit_g) = stokes::decay_fit_with_gradient(&field, &shells)?;
    let mut csv = String::from("quantity,exponent,prefactor,r_squared,r_lo,r_hi\n");
    csv.push_str(&format!(
        "field,{:e},{:e},{:e},{},{}\n",
        fit_v.exponent, fit_v.prefactor, fit_v.r_squared, fit_v.shell_range.0, fit_v.shell_range.1
    ));
    csv.push_str(&format!(
        "gradient,{:e},{:e},{:e},{},{}\n",
        fit_g.exponent, fit_g.prefactor, fit_g.r_squared, fit_g.shell_range.0, fit_g.shell_range.1
    ));
    print!("{csv}");
    if let Some(path) = out {
        fs::write(path, &csv)?;
    }
    Ok(0)
}
