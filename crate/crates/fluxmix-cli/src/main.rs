//! `fluxmix` command line: spectra, sweeps, susceptibilities,
//! operating-point searches, the master-equation cross-check and figure
//! reproduction.
//!
//! Environment:
//! - `FLUXMIX_OUT` overrides the output directory;
//! - `FLUXMIX_THREADS` bounds the sweep thread pool.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fluxmix::circuit::{build_current_operator, build_hamiltonian};
use fluxmix::config::{parse_config, OutputFormat, RunConfig};
use fluxmix::error::Error;
use fluxmix::figures::{reproduce_figures, Figure, ALL_FIGURES};
use fluxmix::lindblad::{chi2_numeric, Chi2NumericOptions, DriveKind, DriveSpec};
use fluxmix::response::{chi2_diff, chi2_shg, chi2_sum, mixing_moduli};
use fluxmix::spectral::{convergence_report, solve_spectrum, transition_data, TransitionData};
use fluxmix::sweep::{
    evaluate_point, find_harmonic_flux, find_r_max, sweep, ChiColumn, SearchResult,
};
use fluxmix::table_io::{format_number, to_csv, to_json};

#[derive(Parser)]
#[command(name = "fluxmix", version, about = "Flux-qutrit three-wave-mixing simulator")]
struct Cli {
    /// JSON configuration file; omitted sections use reference defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Suppress default/warning notes on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the lowest three levels and the normalized transition elements.
    Spectrum(SpectrumArgs),
    /// Tabulate spectra, elements and mixing moduli over a flux grid.
    Sweep(SweepArgs),
    /// Evaluate a closed-form second-order susceptibility.
    Chi2(Chi2Args),
    /// Locate a harmonic-ladder flux point (nu31 = 2 nu21) by bisection.
    ShgPoint(ShgPointArgs),
    /// Largest transition-frequency excursions over a flux interval.
    Tunability(TunabilityArgs),
    /// Compare the master-equation extraction against the closed form.
    OracleCheck(OracleCheckArgs),
    /// Emit figure data files and SVG plots from one configured sweep.
    ReproduceFigure(ReproduceFigureArgs),
    /// Report basis-truncation convergence of the lowest three levels.
    Convergence(ConvergenceArgs),
    /// Locate a mixing-strength maximum by golden-section search.
    RMax(RMaxArgs),
}

#[derive(Args)]
struct SpectrumArgs {
    /// Reduced flux override.
    #[arg(long)]
    f: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    f_min: Option<f64>,
    #[arg(long)]
    f_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Optional chi columns, comma separated
    /// (chi_shg_abs,chi_sum_res_abs,chi_diff_res_abs).
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
    /// Output file; format from --format or the extension.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<CliFormat>,
    /// Also write an SVG plot of these columns next to the table.
    #[arg(long, value_delimiter = ',')]
    plot: Vec<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum CliFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct Chi2Args {
    /// sum | difference | shg
    #[arg(long)]
    kind: String,
    /// Drive frequency 1, GHz (defaults to resonance).
    #[arg(long)]
    nu1: Option<f64>,
    /// Drive frequency 2, GHz (defaults to resonance).
    #[arg(long)]
    nu2: Option<f64>,
    #[arg(long)]
    f: Option<f64>,
}

#[derive(Args)]
struct ShgPointArgs {
    #[arg(long, default_value_t = 0.48)]
    bracket_lo: f64,
    #[arg(long, default_value_t = 0.495)]
    bracket_hi: f64,
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
}

#[derive(Args)]
struct RMaxArgs {
    #[arg(long, default_value_t = 0.4985)]
    bracket_lo: f64,
    #[arg(long, default_value_t = 0.5)]
    bracket_hi: f64,
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
}

#[derive(Args)]
struct TunabilityArgs {
    #[arg(long, default_value_t = 0.5)]
    f_min: f64,
    #[arg(long, default_value_t = 0.53)]
    f_max: f64,
    #[arg(long, default_value_t = 301)]
    steps: usize,
}

#[derive(Args)]
struct OracleCheckArgs {
    /// Flux point for the comparison.
    #[arg(long)]
    f: Option<f64>,
    /// Resonant drive configuration: sum | difference.
    #[arg(long)]
    resonant: Option<String>,
    /// Detuned drive configuration: sum | difference (drive 1 offset by
    /// --detune GHz).
    #[arg(long)]
    detuned: Option<String>,
    /// Detuning for --detuned, GHz.
    #[arg(long, default_value_t = 0.2)]
    detune: f64,
}

#[derive(Args)]
struct ReproduceFigureArgs {
    /// Figure ids (2a 2b 2c 3a 3b 4a 4b) or `all`.
    #[arg(required = true)]
    figures: Vec<String>,
    /// Output directory (FLUXMIX_OUT overrides).
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ConvergenceArgs {
    /// Truncations as n_max:m_max pairs.
    #[arg(long, value_delimiter = ',', default_values_t = ["8:8".to_string(), "12:12".to_string()])]
    bases: Vec<String>,
}

fn load_config(cli: &Cli) -> fluxmix::Result<RunConfig> {
    let parsed = match &cli.config {
        Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
        None => parse_config("{}")?,
    };
    if !cli.quiet {
        for line in &parsed.applied_defaults {
            eprintln!("default applied: {line}");
        }
        for warning in &parsed.warnings {
            eprintln!("warning: {warning}");
        }
    }
    Ok(parsed.config)
}

fn transition_at(cfg: &RunConfig, f: f64) -> fluxmix::Result<TransitionData> {
    Ok(evaluate_point(&cfg.circuit, &cfg.basis, &cfg.rates, f, &[])?.td)
}

fn print_search(label: &str, r: &SearchResult) {
    println!(
        "{label}: f_star = {:.6}, objective = {}, bracket_width = {:.2e}, iterations = {}",
        r.f_star,
        format_number(r.objective),
        r.bracket_width,
        r.iterations
    );
}

fn run(cli: &Cli) -> fluxmix::Result<()> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Spectrum(args) => {
            let params = cfg.circuit.with_f(args.f.unwrap_or(cfg.circuit.f));
            let h = build_hamiltonian(&params, &cfg.basis)?;
            let i_op = build_current_operator(&params, &cfg.basis)?;
            let spec = solve_spectrum(&h, &params, 3)?;
            let td = transition_data(&spec, &i_op)?;
            println!("f = {}", params.f);
            for (k, e) in spec.energies.iter().enumerate() {
                println!("E{} = {} GHz", k + 1, format_number(*e));
            }
            println!("nu21 = {} GHz", format_number(td.omega21));
            println!("nu31 = {} GHz", format_number(td.omega31));
            println!("nu32 = {} GHz", format_number(td.omega32));
            println!("i12 = {:+e} {:+e}i  |i12| = {}", td.i12.re, td.i12.im, format_number(td.i12.norm()));
            println!("i23 = {:+e} {:+e}i  |i23| = {}", td.i23.re, td.i23.im, format_number(td.i23.norm()));
            println!("i13 = {:+e} {:+e}i  |i13| = {}", td.i13.re, td.i13.im, format_number(td.i13.norm()));
            let m = mixing_moduli(&td);
            println!("R = {}  R1 = {}  R2 = {}", format_number(m.r), format_number(m.r1), format_number(m.r2));
        }
        Command::Sweep(args) => {
            let f_min = args.f_min.unwrap_or(cfg.sweep.f_min);
            let f_max = args.f_max.unwrap_or(cfg.sweep.f_max);
            let steps = args.steps.unwrap_or(cfg.sweep.steps);
            let columns: Vec<ChiColumn> = args
                .columns
                .iter()
                .map(|name| ChiColumn::from_name(name))
                .collect::<fluxmix::Result<_>>()?;
            let table =
                sweep(&cfg.circuit, &cfg.basis, &cfg.rates, f_min, f_max, steps, &columns)?;
            let format = match (args.format, &args.out) {
                (Some(CliFormat::Csv), _) => OutputFormat::Csv,
                (Some(CliFormat::Json), _) => OutputFormat::Json,
                (None, Some(path)) if path.extension().is_some_and(|e| e == "json") => {
                    OutputFormat::Json
                }
                (None, Some(_)) => OutputFormat::Csv,
                (None, None) => cfg.output.format,
            };
            let rendered = match format {
                OutputFormat::Csv => to_csv(&table)?,
                OutputFormat::Json => to_json(&table)?,
            };
            match &args.out {
                Some(path) => {
                    let path = out_path(path);
                    std::fs::write(&path, rendered)?;
                    if !cli.quiet {
                        eprintln!("wrote {}", path.display());
                    }
                }
                None => print!("{rendered}"),
            }
            if !args.plot.is_empty() {
                let cols: Vec<&str> = args.plot.iter().map(String::as_str).collect();
                let base = args.out.clone().unwrap_or_else(|| PathBuf::from("sweep.csv"));
                let svg_path = out_path(&base).with_extension("svg");
                fluxmix::svg::emit_plot(&table, &cols, "flux sweep", "value", &svg_path)?;
                if !cli.quiet {
                    eprintln!("wrote {}", svg_path.display());
                }
            }
        }
        Command::Chi2(args) => {
            let f = args.f.unwrap_or(cfg.circuit.f);
            let td = transition_at(&cfg, f)?;
            let chi = match args.kind.as_str() {
                "sum" => {
                    let nu1 = args.nu1.unwrap_or(td.omega21);
                    let nu2 = args.nu2.unwrap_or(td.omega32);
                    chi2_sum(&td, &cfg.rates, nu1, nu2)?
                }
                "difference" => {
                    let nu1 = args.nu1.unwrap_or(td.omega31);
                    let nu2 = args.nu2.unwrap_or(td.omega31 + td.omega21);
                    chi2_diff(&td, &cfg.rates, nu1, nu2)?
                }
                "shg" => {
                    let (delta, chi) = chi2_shg(&td, &cfg.rates)?;
                    println!("delta = {} GHz", format_number(delta));
                    chi
                }
                other => {
                    return Err(Error::InvalidParameter {
                        name: "kind",
                        reason: format!("expected sum|difference|shg, got `{other}`"),
                    })
                }
            };
            println!("f = {f}");
            println!("nu1 = {} GHz, nu2 = {} GHz", format_number(chi.nu1), format_number(chi.nu2));
            println!("chi2 = {:+e} {:+e}i", chi.value.re, chi.value.im);
            println!("|chi2| = {}", format_number(chi.magnitude()));
        }
        Command::ShgPoint(args) => {
            let r = find_harmonic_flux(
                &cfg.circuit,
                &cfg.basis,
                (args.bracket_lo, args.bracket_hi),
                args.tol,
            )?;
            print_search("harmonic flux point", &r);
        }
        Command::RMax(args) => {
            let r = find_r_max(
                &cfg.circuit,
                &cfg.basis,
                (args.bracket_lo, args.bracket_hi),
                args.tol,
            )?;
            print_search("mixing maximum", &r);
        }
        Command::Tunability(args) => {
            let (d31, d21, d32) = fluxmix::sweep::tunability_report(
                &cfg.circuit,
                &cfg.basis,
                &cfg.rates,
                args.f_min,
                args.f_max,
                args.steps,
            )?;
            println!("delta31_max = {} GHz", format_number(d31));
            println!("delta21_max = {} GHz", format_number(d21));
            println!("delta32_max = {} GHz", format_number(d32));
        }
        Command::OracleCheck(args) => {
            let f = args.f.unwrap_or(0.5008);
            let td = transition_at(&cfg, f)?;
            let (kind_str, detune) = match (&args.resonant, &args.detuned) {
                (Some(k), None) => (k.as_str(), 0.0),
                (None, Some(k)) => (k.as_str(), args.detune),
                _ => {
                    return Err(Error::InvalidParameter {
                        name: "oracle-check",
                        reason: "pass exactly one of --resonant or --detuned".into(),
                    })
                }
            };
            let gamma_min = cfg.rates.gamma_min();
            let scale = std::f64::consts::TAU * cfg.circuit.ej_over_h;
            let weak = |i_abs: f64| gamma_min / 40.0 / (i_abs.max(1e-12) * scale);
            let (drive, closed) = match kind_str {
                "sum" => {
                    let nu1 = td.omega21 + detune;
                    let nu2 = td.omega32;
                    let drive = DriveSpec {
                        kind: DriveKind::SumConfig,
                        phi1: weak(td.i12.norm()),
                        phi2: weak(td.i23.norm()),
                        nu1,
                        nu2,
                        ej_over_h: cfg.circuit.ej_over_h,
                    };
                    (drive, chi2_sum(&td, &cfg.rates, nu1, nu2)?)
                }
                "difference" => {
                    let nu1 = td.omega31 + detune;
                    let nu2 = td.omega32;
                    let drive = DriveSpec {
                        kind: DriveKind::DifferenceConfig,
                        phi1: weak(td.i13.norm()),
                        phi2: weak(td.i23.norm()),
                        nu1,
                        nu2,
                        ej_over_h: cfg.circuit.ej_over_h,
                    };
                    (drive, chi2_diff(&td, &cfg.rates, nu1, 2.0 * nu1 - nu2)?)
                }
                other => {
                    return Err(Error::InvalidParameter {
                        name: "oracle-check",
                        reason: format!("expected sum|difference, got `{other}`"),
                    })
                }
            };
            let numeric = chi2_numeric(&td, &cfg.rates, &drive, Chi2NumericOptions::default())?;
            let rel = (numeric.value - closed.value).norm() / closed.value.norm();
            println!("f = {f}");
            println!("closed form  = {:+e} {:+e}i", closed.value.re, closed.value.im);
            println!("master eq.   = {:+e} {:+e}i", numeric.value.re, numeric.value.im);
            println!("relative error = {rel:.6}");
        }
        Command::ReproduceFigure(args) => {
            let figures: Vec<Figure> = if args.figures.iter().any(|s| s == "all") {
                ALL_FIGURES.to_vec()
            } else {
                args.figures
                    .iter()
                    .map(|id| Figure::from_id(id))
                    .collect::<fluxmix::Result<_>>()?
            };
            let out_dir = out_path(&args.out_dir);
            for data in reproduce_figures(&cfg, &figures)? {
                let (csv, svg) = data.write_to(&out_dir)?;
                if !cli.quiet {
                    eprintln!("wrote {}", csv.display());
                    eprintln!("wrote {}", svg.display());
                }
            }
        }
        Command::Convergence(args) => {
            let mut bases = Vec::new();
            for spec in &args.bases {
                let (n, m) = spec.split_once(':').ok_or_else(|| Error::InvalidParameter {
                    name: "bases",
                    reason: format!("expected n_max:m_max, got `{spec}`"),
                })?;
                let parse = |s: &str| {
                    s.parse::<i32>().map_err(|_| Error::InvalidParameter {
                        name: "bases",
                        reason: format!("bad integer `{s}`"),
                    })
                };
                bases.push(fluxmix::circuit::BasisSpec { n_max: parse(n)?, m_max: parse(m)? });
            }
            let report = convergence_report(&cfg.circuit, &bases)?;
            print!("{}", report.render());
        }
    }
    Ok(())
}

/// Apply the FLUXMIX_OUT override to a relative output path.
fn out_path(path: &std::path::Path) -> PathBuf {
    match std::env::var_os("FLUXMIX_OUT") {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("FLUXMIX_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json_record());
            ExitCode::FAILURE
        }
    }
}
