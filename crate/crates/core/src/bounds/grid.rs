use std::fmt;
use std::str::FromStr;

use crate::distortion::{small_ratio_threshold, Dilatation};
use crate::error::{Error, Result};

use super::check::{BoundCheck, CheckDomain, Inequality, Point};
use super::constants::Constants;
use super::families::{
    eta_linear_exp_at, eta_power_at, eta_sandwich_at, lambda_exp_at, lambda_linear_at, lambda_sandwich_at, lambda_taylor_at,
    log_convexity_check, PointData, ETA_SMALL_BOUND,
};
use super::monotone::{eta_versus_k, lambda_versus_k, power_versus_k};
use super::report::{Skip, VerifyReport};

/// A group of related inequalities, selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    LambdaTaylor,
    LambdaLinear,
    LambdaExp,
    LambdaSandwich,
    EtaLinearExp,
    EtaSandwich,
    EtaPower,
    LogConvexity,
    Monotone,
    Structure,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::LambdaTaylor,
        Family::LambdaLinear,
        Family::LambdaExp,
        Family::LambdaSandwich,
        Family::EtaLinearExp,
        Family::EtaSandwich,
        Family::EtaPower,
        Family::LogConvexity,
        Family::Monotone,
        Family::Structure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::LambdaTaylor => "lambda_taylor",
            Family::LambdaLinear => "lambda_linear",
            Family::LambdaExp => "lambda_exp",
            Family::LambdaSandwich => "lambda_sandwich",
            Family::EtaLinearExp => "eta_linear_exp",
            Family::EtaSandwich => "eta_sandwich",
            Family::EtaPower => "eta_power",
            Family::LogConvexity => "log_convexity",
            Family::Monotone => "monotone",
            Family::Structure => "structure",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
            Error::Config(format!("unknown family '{s}', expected one of {}", names.join(", ")))
        })
    }
}

/// Sampling of the monotone claims, chosen so that consecutive increments
/// are resolvable in binary64.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneSampling {
    /// Dilatations for the scaled-`η` functions.
    pub eta_k: Vec<f64>,
    pub eta_t: Vec<f64>,
    /// Dilatations for the `λ` ratio functions.
    pub lambda_k: Vec<f64>,
    /// Dilatations for the power-ratio and root functions.
    pub power_k: Vec<f64>,
    pub power_t: Vec<f64>,
}

impl Default for MonotoneSampling {
    fn default() -> Self {
        let shifted: Vec<f64> = linspace(0.05_f64.log10(), 2.0, 30)
            .into_iter()
            .map(|x| 1.0 + 10f64.powf(x))
            .collect();
        Self {
            eta_k: linspace(1.05, 2.0, 30),
            eta_t: logspace(-2.0, 2.0, 10),
            lambda_k: shifted.clone(),
            power_k: shifted,
            power_t: logspace(-2.0, 2.0, 10),
        }
    }
}

/// Parameters of a verification sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub k_values: Vec<f64>,
    pub t_values: Vec<f64>,
    /// Slack values of the linear `λ` bound.
    pub deltas: Vec<f64>,
    /// Weights `p` of the log-convexity checks, paired as `(K, 1/K)`.
    pub convexity_weights: Vec<f64>,
    pub families: Vec<Family>,
    pub monotone: MonotoneSampling,
}

impl Default for GridSpec {
    /// `K = 100^{i/40}` for `i = 1..=40`, 40 log-spaced `t` in `[1e-4, 1e4]`.
    fn default() -> Self {
        let a = 4.0 / std::f64::consts::PI
            * crate::elliptic::ellint_k(crate::elliptic::UnitRadius::SELF_COMPLEMENTARY)
                .expect("K(1/√2)")
                .powi(2);
        Self {
            k_values: (1..=40).map(|i| 100f64.powf(f64::from(i) / 40.0)).collect(),
            t_values: logspace(-4.0, 4.0, 40),
            deltas: vec![0.1, 1.0, 5.0 - a, 10.0],
            convexity_weights: vec![0.5, 0.3],
            families: Family::ALL.to_vec(),
            monotone: MonotoneSampling::default(),
        }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: &[f64]| {
            if let Some(x) = v.iter().find(|x| !(**x > 0.0) || x.is_infinite()) {
                return Err(Error::Config(format!("{name} value {x} must be finite and positive")));
            }
            Ok(())
        };
        positive("K", &self.k_values)?;
        positive("t", &self.t_values)?;
        positive("delta", &self.deltas)?;
        if let Some(p) = self.convexity_weights.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(Error::Config(format!("weight p = {p} must lie in (0, 1)")));
        }
        Ok(())
    }

    fn enabled(&self, f: Family) -> bool {
        self.families.contains(&f)
    }
}

/// How to run the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Data-parallel over grid points; `threads = None` uses the global pool.
    /// Without the `parallel` feature this runs sequentially.
    Parallel {
        threads: Option<usize>,
    },
}

impl Default for Execution {
    fn default() -> Self {
        Execution::Parallel { threads: None }
    }
}

impl Execution {
    /// Reads `QCDIST_THREADS`: unset means the global pool, `1` means
    /// sequential, `n > 1` a local pool of `n` threads.
    pub fn from_env() -> Result<Self> {
        match std::env::var("QCDIST_THREADS") {
            Err(_) => Ok(Execution::default()),
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(1) => Ok(Execution::Sequential),
                Ok(n) if n > 1 => Ok(Execution::Parallel { threads: Some(n) }),
                _ => Err(Error::Config(format!("QCDIST_THREADS = '{v}' must be a positive integer"))),
            },
        }
    }
}

/// A unit of work producing the checks of one family at one point.
#[derive(Debug, Clone, Copy)]
enum Task {
    Lambda(Family, f64),
    Linear(f64, f64),
    Point(Family, f64, f64),
    Probe(f64),
    Convexity(f64, f64, f64),
    EtaMonotone(f64),
    PowerMonotone(f64),
    LambdaMonotone,
    Structure(f64),
    StructureConstants,
}

#[derive(Default)]
struct Output {
    checks: Vec<BoundCheck>,
    skipped: Vec<Skip>,
}

impl Output {
    fn skip(family: Family, point: Point, reason: impl Into<String>) -> Self {
        Self {
            checks: Vec::new(),
            skipped: vec![Skip {
                family: family.name().to_string(),
                point,
                reason: reason.into(),
            }],
        }
    }

    fn checks(checks: Vec<BoundCheck>) -> Self {
        Self {
            checks,
            skipped: Vec::new(),
        }
    }
}

const ETA_SMALL_CONSTANT: Inequality = Inequality {
    name: "eta_small_constant",
    formula: "T(1) = mu^{-1}(log2/2)^{-2} - 1 < 0.000011",
};
const AB_PRODUCT: Inequality = Inequality {
    name: "ab_product_bound",
    formula: "A(r) B(r) <= 4c, c = exp(2K(1/sqrt2)^2/pi)/8",
};
const AB_BEATS_POWER: Inequality = Inequality {
    name: "ab_lower_beats_power_lower",
    formula: "16^{1-1/K} < A^{2K} B^{-2/K} / 16 for r >= 0.99, K >= 2",
};

/// Runs every enabled family over the grid with the default execution.
pub fn verify_grid(spec: &GridSpec) -> Result<VerifyReport> {
    verify_grid_with(spec, Execution::default())
}

/// Runs every enabled family over the grid. The result does not depend on
/// the execution mode.
pub fn verify_grid_with(spec: &GridSpec, execution: Execution) -> Result<VerifyReport> {
    spec.validate()?;
    let constants = Constants::compute()?;
    let tasks = plan(spec, &constants);
    let run = |task: &Task| run_task(*task, spec, &constants);
    let outputs = execute(&tasks, execution, run)?;
    let mut report = VerifyReport::default();
    for o in outputs {
        report.checks.extend(o.checks);
        report.skipped.extend(o.skipped);
    }
    Ok(report)
}

#[cfg(feature = "parallel")]
fn execute<F>(tasks: &[Task], execution: Execution, run: F) -> Result<Vec<Output>>
where
    F: Fn(&Task) -> Output + Sync + Send,
{
    use rayon::prelude::*;
    match execution {
        Execution::Sequential => Ok(tasks.iter().map(run).collect()),
        Execution::Parallel { threads: None } => Ok(tasks.par_iter().map(run).collect()),
        Execution::Parallel { threads: Some(n) } => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot build a pool of {n} threads: {e}")))?;
            Ok(pool.install(|| tasks.par_iter().map(run).collect()))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn execute<F>(tasks: &[Task], _execution: Execution, run: F) -> Result<Vec<Output>>
where
    F: Fn(&Task) -> Output,
{
    Ok(tasks.iter().map(run).collect())
}

fn plan(spec: &GridSpec, c: &Constants) -> Vec<Task> {
    let mut t_eta = spec.t_values.clone();
    if !t_eta.contains(&1.0) {
        t_eta.push(1.0);
    }
    t_eta.sort_by(f64::total_cmp);
    let mut tasks = Vec::new();
    for &family in Family::ALL.iter().filter(|f| spec.enabled(**f)) {
        match family {
            Family::LambdaTaylor | Family::LambdaExp | Family::LambdaSandwich => {
                tasks.extend(spec.k_values.iter().map(|&k| Task::Lambda(family, k)));
            }
            Family::LambdaLinear => {
                for &delta in &spec.deltas {
                    let top = c.k0(delta).min(2.0);
                    let mut ks: Vec<f64> = (1..=4).map(|j| 1.0 + (top - 1.0) * f64::from(j) / 4.0).collect();
                    ks.extend(spec.k_values.iter().filter(|&&k| k > 1.0 && k <= top));
                    ks.sort_by(f64::total_cmp);
                    ks.dedup();
                    tasks.extend(ks.into_iter().map(|k| Task::Linear(k, delta)));
                }
            }
            Family::EtaLinearExp | Family::EtaPower | Family::EtaSandwich => {
                for &k in &spec.k_values {
                    tasks.extend(t_eta.iter().map(|&t| Task::Point(family, k, t)));
                    if family == Family::EtaSandwich {
                        tasks.push(Task::Probe(k));
                    }
                }
            }
            Family::LogConvexity => {
                for &k in &spec.k_values {
                    for &t in &t_eta {
                        tasks.extend(spec.convexity_weights.iter().map(|&p| Task::Convexity(k, t, p)));
                    }
                }
            }
            Family::Monotone => {
                tasks.push(Task::LambdaMonotone);
                tasks.extend(spec.monotone.eta_t.iter().map(|&t| Task::EtaMonotone(t)));
                tasks.extend(spec.monotone.power_t.iter().map(|&t| Task::PowerMonotone(t)));
            }
            Family::Structure => {
                tasks.push(Task::StructureConstants);
                tasks.extend(spec.t_values.iter().map(|&t| Task::Structure(t)));
            }
        }
    }
    tasks
}

fn needs_above_one(family: Family) -> bool {
    !matches!(family, Family::LambdaSandwich | Family::EtaSandwich)
}

fn run_task(task: Task, spec: &GridSpec, c: &Constants) -> Output {
    let (family, point) = task_origin(task);
    if let Some(k) = point.k {
        if k < 1.0 || (k == 1.0 && needs_above_one(family)) {
            let bound = if needs_above_one(family) { "K > 1" } else { "K >= 1" };
            return Output::skip(family, point, format!("K = {k} is outside the domain {bound}"));
        }
    }
    match evaluate(task, spec, c) {
        Ok(o) => o,
        Err(e) => Output::checks(vec![BoundCheck::evaluation_error(family.name(), point, &e.to_string())]),
    }
}

fn task_origin(task: Task) -> (Family, Point) {
    match task {
        Task::Lambda(f, k) => (f, Point::k(k)),
        Task::Linear(k, delta) => (
            Family::LambdaLinear,
            Point {
                delta: Some(delta),
                ..Point::k(k)
            },
        ),
        Task::Point(f, k, t) => (f, Point::kt(k, t)),
        Task::Probe(k) => (Family::EtaSandwich, Point::k(k)),
        Task::Convexity(k, t, p) => (
            Family::LogConvexity,
            Point {
                l: Some(1.0 / k),
                p: Some(p),
                ..Point::kt(k, t)
            },
        ),
        Task::EtaMonotone(t) | Task::PowerMonotone(t) => (Family::Monotone, Point::t(t)),
        Task::LambdaMonotone => (Family::Monotone, Point::default()),
        Task::Structure(t) => (Family::Structure, Point::t(t)),
        Task::StructureConstants => (Family::Structure, Point::default()),
    }
}

fn evaluate(task: Task, spec: &GridSpec, c: &Constants) -> Result<Output> {
    let dil = Dilatation::new;
    Ok(match task {
        Task::Lambda(f, k) => {
            let d = PointData::new(dil(k)?, 1.0)?;
            Output::checks(match f {
                Family::LambdaTaylor => lambda_taylor_at(&d, c),
                Family::LambdaExp => lambda_exp_at(&d, c),
                _ => lambda_sandwich_at(&d, c),
            })
        }
        Task::Linear(k, delta) => Output::checks(vec![lambda_linear_at(&PointData::new(dil(k)?, 1.0)?, delta, c)]),
        Task::Point(f, k, t) => {
            let d = PointData::new(dil(k)?, t)?;
            Output::checks(match f {
                Family::EtaLinearExp => eta_linear_exp_at(&d, c),
                Family::EtaPower => eta_power_at(&d, c),
                _ => eta_sandwich_at(&d, c),
            })
        }
        Task::Probe(k) => match small_ratio_threshold(dil(k)?) {
            None => Output::skip(
                Family::EtaSandwich,
                Point::k(k),
                format!("{} probe: threshold T(K) underflows", ETA_SMALL_BOUND.name),
            ),
            Some(tk) => {
                let mut checks = eta_sandwich_at(&PointData::new(dil(k)?, 0.5 * tk)?, c);
                checks.extend(eta_sandwich_at(&PointData::new(dil(k)?, tk)?, c));
                Output::checks(checks)
            }
        },
        Task::Convexity(k, t, p) => {
            if k == 1.0 {
                return Ok(Output::skip(Family::LogConvexity, Point::kt(k, t), "K = 1/K"));
            }
            Output::checks(log_convexity_check(dil(k)?, dil(1.0 / k)?, t, p)?)
        }
        Task::EtaMonotone(t) => Output::checks(eta_versus_k(t, &spec.monotone.eta_k)?),
        Task::PowerMonotone(t) => Output::checks(power_versus_k(t, &spec.monotone.power_k)?),
        Task::LambdaMonotone => Output::checks(lambda_versus_k(&spec.monotone.lambda_k, c)?),
        Task::StructureConstants => Output::checks(vec![BoundCheck::strict(
            &ETA_SMALL_CONSTANT,
            Point::default(),
            CheckDomain::Linear,
            c.small_ratio,
            1.1e-5,
            1.1e-5 - c.small_ratio,
        )]),
        Task::Structure(t) => {
            let d = PointData::new(dil(1.0)?, t)?;
            let (ln_a, ln_b) = (d.ln_a(), d.ln_b());
            let ceiling = (4.0 * c.c_power).ln();
            let mut checks = vec![BoundCheck::non_strict(
                &AB_PRODUCT,
                Point::t(t),
                CheckDomain::Log,
                ln_a + ln_b,
                ceiling,
                super::check::STRICT_RELATIVE_TOLERANCE,
            )];
            if d.r.r() >= 0.99 {
                let ln16 = 16f64.ln();
                for &k in spec.k_values.iter().filter(|&&k| k >= 2.0) {
                    let lhs = (1.0 - 1.0 / k) * ln16;
                    let rhs = 2.0 * k * ln_a - 2.0 / k * ln_b - ln16;
                    checks.push(BoundCheck::strict(
                        &AB_BEATS_POWER,
                        Point::kt(k, t),
                        CheckDomain::Log,
                        lhs,
                        rhs,
                        rhs - lhs,
                    ));
                }
            }
            Output::checks(checks)
        }
    })
}

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// `n` points `10^x` with `x` equally spaced on `[a, b]`.
pub(crate) fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a, b, n).into_iter().map(|x| 10f64.powf(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> GridSpec {
        GridSpec {
            k_values: vec![0.5, 1.0, 1.5, 2.0, 10.0],
            t_values: vec![1e-3, 1.0, 50.0],
            deltas: vec![0.1, 100.0],
            monotone: MonotoneSampling {
                eta_k: linspace(1.05, 2.0, 5),
                eta_t: vec![0.1, 10.0],
                lambda_k: vec![1.1, 2.0, 5.0, 20.0],
                power_k: vec![1.1, 2.0, 5.0, 20.0],
                power_t: vec![1.0],
            },
            ..GridSpec::default()
        }
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("nope".parse::<Family>().is_err());
    }

    #[test]
    fn small_grid_passes_and_records_skips() {
        let report = verify_grid_with(&small_spec(), Execution::Sequential).unwrap();
        let failures: Vec<_> = report.failures().collect();
        assert!(failures.is_empty(), "{failures:#?}");
        assert!(report.skipped.iter().any(|s| s.point.k == Some(0.5)));
        assert!(report.skipped.iter().any(|s| s.family == "lambda_taylor" && s.point.k == Some(1.0)));
        assert!(!report
            .skipped
            .iter()
            .any(|s| s.family == "lambda_sandwich" && s.point.k == Some(1.0)));
        assert!(report.checks.iter().any(|c| c.name == "lambda_two_closed_form"));
    }

    #[test]
    fn execution_modes_agree() {
        let spec = small_spec();
        let a = verify_grid_with(&spec, Execution::Sequential).unwrap();
        let b = verify_grid_with(&spec, Execution::Parallel { threads: Some(3) }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn family_filter() {
        let spec = GridSpec {
            families: vec![Family::LambdaExp],
            ..small_spec()
        };
        let report = verify_grid_with(&spec, Execution::Sequential).unwrap();
        assert!(report.checks.iter().all(|c| c.name.starts_with("lambda_exp")));
    }

    #[test]
    fn invalid_grid_is_a_config_error() {
        let spec = GridSpec {
            t_values: vec![0.0],
            ..small_spec()
        };
        assert!(matches!(verify_grid(&spec), Err(Error::Config(_))));
    }

    #[test]
    fn default_grid_shape() {
        let g = GridSpec::default();
        assert_eq!(g.k_values.len(), 40);
        assert!((g.k_values[39] - 100.0).abs() < 1e-12);
        assert_eq!(g.t_values.len(), 40);
        assert_eq!((g.t_values[0], g.t_values[39]), (1e-4, 1e4));
    }
}
