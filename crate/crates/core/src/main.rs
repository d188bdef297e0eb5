//! Command-line front end: parse a config, dispatch to the computational
//! modules, and emit CSV/JSON artifacts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use deltaprime::distribution::{self, Role, Surface};
use deltaprime::error::Error;
use deltaprime::inverse::{design, verify_resonance, DesignRequest};
use deltaprime::potential::{geometry, RegularizationParams};
use deltaprime::transfer::{bound_state, closed_form_lambda, scattering, wavenumbers, ConnectionMatrix};
use deltaprime::transparency::{chi, coupled_constants, g_value, solve_roots, FreeConstants, TSet};

const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_SOLVER: u8 = 4;
const EXIT_IO: u8 = 5;

#[derive(Parser)]
#[command(name = "deltaprime", version, about = "Resonant transmission across a squeezed rectangular delta-prime model")]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; defaults to <subcommand>.csv (or .json) in $DELTAPRIME_OUTDIR.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep |T|^2(lambda) for the regularized potential; CSV: lambda, epsilon, k, T2, R2, det_residual.
    Scan {
        /// lo:hi:step
        #[arg(long, default_value = "0:40:0.1")]
        lambda_grid: String,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[command(flatten)]
        params: ParamFlags,
    },
    /// Roots of a reduced transparency equation over a lambda grid; CSV: set, lambda, root_index, root_value, residual, chi, g.
    Roots {
        #[arg(long)]
        set: String,
        /// lo:hi:step
        #[arg(long, default_value = "0:40:0.1")]
        lambda_grid: String,
        #[arg(long, default_value_t = 1e3)]
        search_max: f64,
        #[arg(long, default_value_t = 4)]
        max_roots: usize,
        #[command(flatten)]
        params: ParamFlags,
    },
    /// Inverse design at a target lambda; JSON design record plus CSV scan (lambda, T2).
    Inverse {
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// lo:hi window for the verification sweep; defaults to lambda +/- 30%.
        #[arg(long)]
        window: Option<String>,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        root_index: usize,
        #[command(flatten)]
        params: ParamFlags,
    },
    /// Distributional moments down an epsilon ladder; CSV: epsilon, j, value, role.
    Moments {
        #[arg(long, value_parser = parse_role)]
        role: Role,
        #[arg(long, default_value_t = 2)]
        j_max: usize,
        /// Comma-separated epsilon ladder.
        #[arg(long, default_value = "1e-1,1e-2,1e-3,1e-4")]
        epsilons: String,
        #[command(flatten)]
        params: ParamFlags,
    },
    /// Bound state of a connection matrix; JSON record.
    Boundstate {
        #[arg(long, allow_negative_numbers = true)]
        chi: f64,
        #[arg(long, allow_negative_numbers = true)]
        g: f64,
    },
    /// Classify an exponent triple; JSON record.
    Classify {
        #[command(flatten)]
        params: ParamFlags,
    },
}

/// Model parameters; every flag overrides the config-file value.
#[derive(Args, Clone, Copy, Default)]
struct ParamFlags {
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a3: Option<f64>,
    #[arg(long)]
    c0: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    c3: Option<f64>,
    #[arg(long)]
    varsigma: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
}

/// Optional config-file mirror of the numeric parameters.
#[derive(Deserialize, Default, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    mu: Option<f64>,
    nu: Option<f64>,
    tau: Option<f64>,
    a: Option<[f64; 3]>,
    c: Option<[f64; 4]>,
    varsigma: Option<f64>,
    epsilon: Option<f64>,
    lambda: Option<f64>,
    eta: Option<f64>,
}

/// Fully resolved parameters: defaults <- config file <- flags.
#[derive(Clone, Copy)]
struct Resolved {
    params: RegularizationParams,
    lambda: f64,
    eta: f64,
}

fn parse_role(s: &str) -> Result<Role, String> {
    match s.to_ascii_lowercase().as_str() {
        "delta" => Ok(Role::Delta),
        "deltaprime" | "delta-prime" | "delta_prime" => Ok(Role::DeltaPrime),
        other => Err(format!("unknown role {other:?} (delta | deltaprime)")),
    }
}

fn resolve(file: &FileConfig, flags: &ParamFlags) -> Resolved {
    let fa = file.a.unwrap_or([0.0; 3]);
    let fc = file.c.unwrap_or([1.0; 4]);
    Resolved {
        params: RegularizationParams {
            mu: flags.mu.or(file.mu).unwrap_or(2.0),
            nu: flags.nu.or(file.nu).unwrap_or(2.0),
            tau: flags.tau.or(file.tau).unwrap_or(1.0),
            a: [
                flags.a1.unwrap_or(fa[0]),
                flags.a2.unwrap_or(fa[1]),
                flags.a3.unwrap_or(fa[2]),
            ],
            c: [
                flags.c0.unwrap_or(fc[0]),
                flags.c1.unwrap_or(fc[1]),
                flags.c2.unwrap_or(fc[2]),
                flags.c3.unwrap_or(fc[3]),
            ],
            varsigma: flags.varsigma.or(file.varsigma).unwrap_or(1.0),
            epsilon: flags.epsilon.or(file.epsilon).unwrap_or(1e-4),
        },
        lambda: flags.lambda.or(file.lambda).unwrap_or(1.0),
        eta: flags.eta.or(file.eta).unwrap_or(0.0),
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::config(format!("grid must be lo:hi:step, got {spec:?}")));
    }
    let lo: f64 = parts[0].parse().map_err(|_| CliError::config("bad grid lo"))?;
    let hi: f64 = parts[1].parse().map_err(|_| CliError::config("bad grid hi"))?;
    let step: f64 = parts[2].parse().map_err(|_| CliError::config("bad grid step"))?;
    if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(CliError::config(format!("degenerate grid {spec:?}")));
    }
    let n = ((hi - lo) / step).round() as usize + 1;
    Ok((0..n).map(|i| lo + step * i as f64).filter(|&x| x <= hi + step * 1e-9).collect())
}

struct CliError {
    code: u8,
    kind: &'static str,
    message: String,
}

impl CliError {
    fn config(msg: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, kind: "config", message: msg.into() }
    }
    fn io(msg: impl std::fmt::Display) -> Self {
        Self { code: EXIT_IO, kind: "io", message: msg.to_string() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::InvalidParameter(_) | Error::ConstraintViolation(_) => (EXIT_CONFIG, "config"),
            Error::InfeasibleTarget(_) => (EXIT_INFEASIBLE, "infeasible"),
            Error::SolverFailure(_) | Error::VerificationFailed(_) | Error::SingularScattering(_) => {
                (EXIT_SOLVER, "solver")
            }
        };
        Self { code, kind, message: e.to_string() }
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn out_path(requested: &Option<PathBuf>, default_name: &str) -> PathBuf {
    if let Some(p) = requested {
        return p.clone();
    }
    let dir = std::env::var_os("DELTAPRIME_OUTDIR").map(PathBuf::from).unwrap_or_default();
    dir.join(default_name)
}

/// Write atomically: temp file in the target directory, then rename.
fn write_artifact(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(CliError::io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(CliError::io)?;
    std::fs::rename(&tmp, path).map_err(CliError::io)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "code": e.code, "kind": e.kind, "message": e.message })
            );
            ExitCode::from(e.code)
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<FileConfig, CliError> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(CliError::io)?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::config(format!("bad config {}: {e}", p.display())))
        }
    }
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let file = load_config(&cli.config)?;
    match &cli.cmd {
        Cmd::Scan { lambda_grid, k, params } => {
            let r = resolve(&file, params);
            if !(*k > 0.0) {
                return Err(CliError::config(format!("k must be > 0, got {k}")));
            }
            let g = geometry(&r.params)?;
            let mut csv = String::from("lambda,epsilon,k,T2,R2,det_residual\n");
            for lambda in parse_grid(lambda_grid)? {
                let wn = wavenumbers(k * k, lambda, r.eta, &g);
                let m = closed_form_lambda(&wn, g.l, g.rho, g.r);
                let s = scattering(&m, *k, -g.l, g.rho + g.r)?;
                let det = (m.det() - num_complex::Complex64::new(1.0, 0.0)).norm();
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    num(lambda),
                    num(r.params.epsilon),
                    num(*k),
                    num(s.t2),
                    num(s.r2),
                    num(det)
                );
            }
            let path = out_path(&cli.output, "scan.csv");
            write_artifact(&path, &csv)?;
            Ok(vec![path])
        }
        Cmd::Roots { set, lambda_grid, search_max, max_roots, params } => {
            let set: TSet = set.parse()?;
            let r = resolve(&file, params);
            let exps = set.default_exponents();
            let free = FreeConstants {
                c0: r.params.c[0],
                c1: r.params.c[1],
                c2: r.params.c[2],
                c3: r.params.c[3],
            };
            let mut csv = String::from("set,lambda,root_index,root_value,residual,chi,g\n");
            for lambda in parse_grid(lambda_grid)? {
                if lambda == 0.0 {
                    continue;
                }
                let roots = solve_roots(set, lambda, r.params.varsigma, *search_max, *max_roots)?;
                for root in roots {
                    let cc = coupled_constants(set, lambda, r.params.varsigma, root.root_value, &free)?;
                    let x = chi(set, lambda, cc.varsigma, root.root_value)?;
                    let g = g_value(set, lambda, r.eta, cc.varsigma, root.root_value, cc.c, exps)?;
                    let _ = writeln!(
                        csv,
                        "{set},{},{},{},{},{},{}",
                        num(lambda),
                        root.root_index,
                        num(root.root_value),
                        num(root.residual),
                        num(x),
                        num(g)
                    );
                }
            }
            let path = out_path(&cli.output, "roots.csv");
            write_artifact(&path, &csv)?;
            Ok(vec![path])
        }
        Cmd::Inverse { set, k, window, samples, root_index, params } => {
            let set: TSet = set.parse()?;
            let r = resolve(&file, params);
            let lambda = r.lambda;
            let req = DesignRequest {
                target_lambda: lambda,
                set,
                varsigma: r.params.varsigma,
                eta: r.eta,
                free: FreeConstants {
                    c0: r.params.c[0],
                    c1: r.params.c[1],
                    c2: r.params.c[2],
                    c3: r.params.c[3],
                },
                exponents: None,
                epsilon: r.params.epsilon,
                root_index: *root_index,
            };
            let d = design(&req)?;
            let (lo, hi) = match window {
                Some(w) => {
                    let g = parse_grid(&format!("{w}:1"))
                        .map_err(|_| CliError::config(format!("window must be lo:hi, got {w:?}")))?;
                    (g[0], *g.last().unwrap())
                }
                None => (lambda - 0.3 * lambda.abs(), lambda + 0.3 * lambda.abs()),
            };
            let report = verify_resonance(&d, *k, (lo, hi), *samples)?;

            let json_path = out_path(&cli.output, "inverse.json");
            let csv_path = json_path.with_extension("csv");
            let record = serde_json::json!({
                "design": d,
                "k": k,
                "window": [lo, hi],
                "peak_lambda": report.peak_lambda,
                "peak_T2": report.peak_t2,
                "limit_T2": report.limit_t2,
            });
            write_artifact(&json_path, &format!("{record:#}\n"))?;
            let mut csv = String::from("lambda,T2\n");
            for (l, t2) in &report.scan {
                let _ = writeln!(csv, "{},{}", num(*l), num(*t2));
            }
            write_artifact(&csv_path, &csv)?;
            Ok(vec![json_path, csv_path])
        }
        Cmd::Moments { role, j_max, epsilons, params } => {
            let r = resolve(&file, params);
            let ladder: Vec<f64> = epsilons
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::config(format!("bad epsilon ladder {epsilons:?}")))?;
            let mut csv = String::from("epsilon,j,value,role\n");
            let role_name = match role {
                Role::Delta => "delta",
                Role::DeltaPrime => "deltaprime",
            };
            for &eps in &ladder {
                let p = r.params.with_epsilon(eps);
                for j in 0..=*j_max {
                    let m = distribution::moment(&p, *role, j)?;
                    let _ = writeln!(csv, "{},{},{},{}", num(eps), j, num(m.value), role_name);
                }
            }
            let path = out_path(&cli.output, "moments.csv");
            write_artifact(&path, &csv)?;
            Ok(vec![path])
        }
        Cmd::Boundstate { chi, g } => {
            let conn = ConnectionMatrix::new(*chi, *g)?;
            let record = match bound_state(&conn)? {
                Some(kappa) => serde_json::json!({
                    "chi": chi, "g": g, "bound": true,
                    "kappa": kappa, "energy": -kappa * kappa,
                }),
                None => serde_json::json!({ "chi": chi, "g": g, "bound": false }),
            };
            let path = out_path(&cli.output, "boundstate.json");
            write_artifact(&path, &format!("{record:#}\n"))?;
            Ok(vec![path])
        }
        Cmd::Classify { params } => {
            let r = resolve(&file, params);
            let (mu, nu, tau) = (r.params.mu, r.params.nu, r.params.tau);
            let surface = distribution::classify(mu, nu, tau)?;
            let k = distribution::SurfaceConstants::from(&r.params);
            let (name, residual) = match surface {
                Surface::DeltaInterior => ("S_delta_interior".to_string(), 0.0),
                Surface::DeltaExterior => ("S_delta_exterior".to_string(), 0.0),
                Surface::DeltaBoundary(p) => {
                    (format!("S_delta_boundary({p:?})"), distribution::p_constraint_residual(p, &k))
                }
                Surface::DeltaPrime(q) => {
                    (format!("S_deltaprime({q:?})"), distribution::q_constraint_residual(q, &k))
                }
            };
            let record = serde_json::json!({
                "mu": mu, "nu": nu, "tau": tau,
                "surface": name, "constraint_residual": residual,
            });
            let path = out_path(&cli.output, "classify.json");
            write_artifact(&path, &format!("{record:#}\n"))?;
            Ok(vec![path])
        }
    }
}
