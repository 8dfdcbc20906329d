use std::fmt;
use std::path::PathBuf;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use spinframe::coefficients::{assemble_tensor, TensorKey};
use spinframe::objective::fidelity_report;
use spinframe::optimizer::{
    best_of_starts, fit_asymptote, fit_asymptote_by, OptimizationResult, PowerLawFit, ResultDocument, SweepOptions,
    SweepRow,
};
use spinframe::quadrature::{all_keys, make_grid, CoefficientOracle};
use spinframe::simulator::{monte_carlo, povm_defect, write_samples_csv, MonteCarloOptions, TrueRotation};
use spinframe::so3::{big_d, rotation_matrix, EulerAngles};
use spinframe::states::{AliceState, FiducialState};
use spinframe::{FidelityReport64, Objective64, OptimizationResult64};

use crate::output::{create_file, emit, to_json, write_file};
use crate::{
    CheckKind, ObjectiveArgs, ObjectiveKind, OptimizeArgs, SimulateArgs, SolverArgs, SweepArgs, TrueFrame, VerifyArgs,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_CONVERGED: u8 = 2;
pub const EXIT_VERIFY_FAILED: u8 = 3;

/// Largest level accepted by the optimizing commands.
const MAX_N: u32 = 20;
const MAX_VERIFY_N: u32 = 6;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Library(spinframe::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        1
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
            CliError::Library(e) => write!(f, "{e}"),
        }
    }
}

impl From<spinframe::Error> for CliError {
    fn from(e: spinframe::Error) -> Self {
        CliError::Library(e)
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn parse_range(text: &str) -> Result<(u32, u32), String> {
    let text = text.trim();
    let parse = |s: &str| s.trim().parse::<u32>().map_err(|e| format!("invalid level `{s}`: {e}"));
    let (from, to) = if let Some((a, b)) = text.split_once("..=") {
        (parse(a)?, parse(b)?)
    } else if let Some((a, b)) = text.split_once("..") {
        (parse(a)?, parse(b)?)
    } else {
        let n = parse(text)?;
        (n, n)
    };
    if from == 0 || from > to {
        return Err(format!("range must satisfy 1 <= from <= to, got {from}..{to}"));
    }
    Ok((from, to))
}

fn objective(args: &ObjectiveArgs) -> CliResult<Objective64> {
    match (args.objective, args.w_z, args.w_xy) {
        (ObjectiveKind::Weighted, Some(wz), Some(wxy)) => Ok(Objective64::weighted(wz, wxy)?),
        (ObjectiveKind::Weighted, _, _) => Err(CliError::Usage("--objective weighted needs --w-z and --w-xy".into())),
        (_, None, None) => Ok(match args.objective {
            ObjectiveKind::Z => Objective64::ZAxis,
            ObjectiveKind::Xy => Objective64::XyAxes,
            _ => Objective64::XyzAxes,
        }),
        _ => Err(CliError::Usage(
            "--w-z and --w-xy only apply to --objective weighted".into(),
        )),
    }
}

fn sweep_options(args: &SolverArgs) -> CliResult<SweepOptions<f64>> {
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", args.tol)));
    }
    if args.max_iter == 0 {
        return Err(CliError::Usage("--max-iter must be at least 1".into()));
    }
    Ok(SweepOptions {
        tol: args.tol,
        max_iter: args.max_iter,
        random_restarts: args.restarts,
        seed: args.seed,
    })
}

fn check_level(n: u32) -> CliResult<()> {
    if n == 0 || n > MAX_N {
        return Err(CliError::Usage(format!("--n must be between 1 and {MAX_N}, got {n}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct OptimizeOutput {
    objective: Objective64,
    n: u32,
    report: FidelityReport64,
    result: ResultDocument<f64>,
}

fn run_optimization(n: u32, obj: &Objective64, solver: &SolverArgs) -> CliResult<OptimizationResult64> {
    check_level(n)?;
    Ok(best_of_starts(obj, n, &sweep_options(solver)?)?)
}

pub fn optimize(args: &OptimizeArgs) -> CliResult<u8> {
    let obj = objective(&args.objective)?;
    let result = run_optimization(args.n, &obj, &args.solver)?;
    let out = OptimizeOutput {
        objective: obj,
        n: args.n,
        report: fidelity_report(&result.a, &result.b, &obj)?,
        result: result.to_document(),
    };
    emit(args.output.as_deref(), &to_json(&out)?)?;
    if !result.converged {
        eprintln!("warning: not converged after {} iterations", result.iterations);
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(EXIT_OK)
}

struct CheckRow {
    name: &'static str,
    worst: f64,
    tolerance: f64,
    offender: String,
}

impl CheckRow {
    fn passed(&self) -> bool {
        self.worst < self.tolerance
    }
}

fn track(worst: &mut (f64, String), value: f64, label: impl FnOnce() -> String) {
    if value > worst.0 || value.is_nan() {
        *worst = (value, label());
    }
}

type WeightFn = fn(&EulerAngles<f64>) -> f64;

fn check_coefficients(n: u32, inject_fault: bool) -> CliResult<CheckRow> {
    let j_max = n - 1;
    let grid = make_grid(j_max);
    let mut worst = (0.0, String::from("none"));
    let cases: [(&str, Objective64, WeightFn); 2] = [
        ("g", Objective64::ZAxis, |e| e.beta.cos()),
        ("h", Objective64::XyAxes, |e| {
            let r = rotation_matrix(e).r;
            r[0][0] + r[1][1]
        }),
    ];
    for (label, obj, weight) in cases {
        let mut tensor = assemble_tensor(obj, j_max)?;
        if inject_fault && label == "g" {
            tensor.add(TensorKey::new(0, 0, 0, 0, 0, 0), Complex::new(1e-6, 0.0))?;
        }
        let oracle = CoefficientOracle::new(|e| Complex::new(weight(e), 0.0), j_max, &grid);
        for key in all_keys(j_max) {
            let dev = (tensor.get(&key) - oracle.coefficient(key.j, key.k, key.m, key.n, key.r, key.s)?).norm();
            track(&mut worst, dev, || {
                format!(
                    "{label} (j,k,m,n,r,s) = ({},{},{},{},{},{})",
                    key.j, key.k, key.m, key.n, key.r, key.s
                )
            });
        }
    }
    Ok(CheckRow {
        name: "coefficients",
        worst: worst.0,
        tolerance: 1e-10,
        offender: worst.1,
    })
}

fn check_povm(n: u32, rng: &mut ChaCha8Rng) -> CliResult<CheckRow> {
    let grid = make_grid(n - 1);
    let mut worst = (0.0, String::from("none"));
    track(&mut worst, povm_defect(&FiducialState::uniform(n)?, &grid), || {
        "uniform fiducial".into()
    });
    for i in 0..3 {
        let b = FiducialState::random(n, rng)?;
        track(&mut worst, povm_defect(&b, &grid), || format!("random fiducial #{i}"));
    }
    Ok(CheckRow {
        name: "povm",
        worst: worst.0,
        tolerance: 1e-10,
        offender: worst.1,
    })
}

fn check_rotations(n: u32, rng: &mut ChaCha8Rng) -> CliResult<CheckRow> {
    let mut worst = (0.0, String::from("none"));
    for i in 0..1000 {
        let (alpha, beta, gamma) = (
            rng.random::<f64>() * std::f64::consts::TAU,
            rng.random::<f64>() * std::f64::consts::PI,
            rng.random::<f64>() * std::f64::consts::TAU,
        );
        let e = EulerAngles::new(alpha, beta, gamma);
        let r = rotation_matrix(&e);
        let half = (beta / 2.0).cos() * ((alpha + gamma) / 2.0).cos();
        let label = || format!("angles ({alpha:.6}, {beta:.6}, {gamma:.6})");
        track(&mut worst, (r.r[2][2] - beta.cos()).abs(), label);
        track(
            &mut worst,
            (r.r[0][0] + r.r[1][1] - (1.0 + beta.cos()) * (alpha + gamma).cos()).abs(),
            label,
        );
        track(
            &mut worst,
            (r.trace() - (1.0 + 2.0 * (2.0 * half * half - 1.0))).abs(),
            label,
        );
        if i < 100 {
            for j in 0..n {
                let ji = j as i32;
                for p in -ji..=ji {
                    for q in -ji..=ji {
                        let mut s = Complex::new(0.0, 0.0);
                        for k in -ji..=ji {
                            s += big_d(j, p, k, &e)? * big_d(j, q, k, &e)?.conj();
                        }
                        let want = if p == q { 1.0 } else { 0.0 };
                        track(&mut worst, (s - Complex::new(want, 0.0)).norm(), || {
                            format!("unitarity j={j} ({p},{q}) at {}", label())
                        });
                    }
                }
            }
        }
    }
    Ok(CheckRow {
        name: "rotations",
        worst: worst.0,
        tolerance: 1e-12,
        offender: worst.1,
    })
}

pub fn verify(args: &VerifyArgs) -> CliResult<u8> {
    if args.n == 0 || args.n > MAX_VERIFY_N {
        return Err(CliError::Usage(format!(
            "verify supports 1 <= n <= {MAX_VERIFY_N}, got {}",
            args.n
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let wants = |k: CheckKind| args.check == CheckKind::All || args.check == k;
    let mut rows = Vec::new();
    if wants(CheckKind::Coefficients) {
        rows.push(check_coefficients(args.n, args.inject_fault)?);
    }
    if wants(CheckKind::Povm) {
        rows.push(check_povm(args.n, &mut rng)?);
    }
    if wants(CheckKind::Rotations) {
        rows.push(check_rotations(args.n, &mut rng)?);
    }
    println!("{:<14}{:>20}{:>12}  status", "check", "worst deviation", "tolerance");
    for row in &rows {
        println!(
            "{:<14}{:>20.11e}{:>12.1e}  {}",
            row.name,
            row.worst,
            row.tolerance,
            if row.passed() { "pass" } else { "FAIL" }
        );
    }
    let failed: Vec<_> = rows.iter().filter(|r| !r.passed()).collect();
    if failed.is_empty() {
        return Ok(EXIT_OK);
    }
    for row in failed {
        println!(
            "{}: worst offender {} deviates by {:.11e}",
            row.name, row.offender, row.worst
        );
    }
    Ok(EXIT_VERIFY_FAILED)
}

#[derive(Serialize)]
struct FitSummary {
    prefactor: f64,
    exponent: f64,
    points: usize,
}

impl From<PowerLawFit<f64>> for FitSummary {
    fn from(f: PowerLawFit<f64>) -> Self {
        Self {
            prefactor: f.prefactor,
            exponent: f.exponent,
            points: f.points,
        }
    }
}

#[derive(Serialize)]
struct FitFooter {
    objective: Objective64,
    n_from: u32,
    n_to: u32,
    fit_from: u32,
    /// Fit of the per-axis mean square error.
    per_axis: FitSummary,
    /// Fit of the mean square error summed over the weighted axes.
    total: FitSummary,
}

pub fn sweep(args: &SweepArgs) -> CliResult<u8> {
    let obj = objective(&args.objective)?;
    let (from, to) = args.n;
    check_level(to)?;
    let rows: Vec<SweepRow<f64>> = spinframe::optimizer::sweep(&obj, from, to, &sweep_options(&args.solver)?)?;
    let mut csv = String::from(SweepRow::<f64>::CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.csv_line());
        csv.push('\n');
    }
    emit(args.output.as_deref(), &csv)?;

    if let Some(fit_from) = args.fit_from {
        let footer = FitFooter {
            objective: obj,
            n_from: from,
            n_to: to,
            fit_from,
            per_axis: fit_asymptote(&rows, fit_from)?.into(),
            total: fit_asymptote_by(&rows, fit_from, |r| r.mse_total)?.into(),
        };
        let text = to_json(&footer)?;
        let target: Option<PathBuf> = args.fit_output.clone().or_else(|| {
            args.output.as_ref().map(|p| {
                let mut s = p.clone().into_os_string();
                s.push(".fit.json");
                PathBuf::from(s)
            })
        });
        match target {
            Some(p) => write_file(&p, &text)?,
            None => eprintln!("{text}"),
        }
    }
    let unconverged: Vec<u32> = rows.iter().filter(|r| !r.converged).map(|r| r.n).collect();
    if !unconverged.is_empty() {
        eprintln!("warning: not converged for n = {unconverged:?}");
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(EXIT_OK)
}

fn load_states(path: &std::path::Path) -> CliResult<(AliceState<f64>, FiducialState<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let doc = value.get("result").cloned().unwrap_or(value);
    let doc: ResultDocument<f64> =
        serde_json::from_value(doc).map_err(|e| CliError::Io(format!("{}: not a state file: {e}", path.display())))?;
    // files carry 12 significant digits, so renormalize on the way in
    let a = AliceState::normalized(doc.a.n, doc.a.dense()?)?;
    let b = FiducialState::normalized(doc.b.n, doc.b.dense()?)?;
    Ok((a, b))
}

#[derive(Serialize)]
struct SimulateOutput {
    n: u32,
    /// Exact expectations of the same states, for comparison.
    analytic: FidelityReport64,
    monte_carlo: spinframe::MonteCarloReport64,
}

pub fn simulate(args: &SimulateArgs) -> CliResult<u8> {
    let (a, b) = match (&args.state, args.n) {
        (Some(path), None) => load_states(path)?,
        (None, Some(n)) => {
            let obj = objective(&args.objective)?;
            let r: OptimizationResult<f64> = run_optimization(n, &obj, &args.solver)?;
            (r.a, r.b)
        }
        _ => return Err(CliError::Usage("simulate needs either --state FILE or --n N".into())),
    };
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let opts = MonteCarloOptions {
        samples: args.samples,
        seed: args.solver.seed,
        true_rotation: match args.true_frame {
            TrueFrame::Haar => TrueRotation::Haar,
            TrueFrame::Identity => TrueRotation::Fixed {
                angles: EulerAngles::identity(),
            },
        },
        keep_samples: args.samples_csv.is_some(),
    };
    let (report, samples) = monte_carlo(&a, &b, &opts)?;
    if let Some(path) = &args.samples_csv {
        let file = create_file(path)?;
        write_samples_csv(std::io::BufWriter::new(file), &samples)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let out = SimulateOutput {
        n: a.n(),
        analytic: fidelity_report(&a, &b, &Objective64::XyzAxes)?,
        monte_carlo: report,
    };
    emit(args.output.as_deref(), &to_json(&out)?)?;
    Ok(EXIT_OK)
}
