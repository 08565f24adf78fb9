//! Acceptance criteria. Prints one PASS/FAIL line per criterion, with the
//! failing sub-checks indented below it, and exits non-zero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qcdist::bounds::{eta_sandwich, lambda_sandwich, verify_grid, Constants, Family, GridSpec};
use qcdist::distortion::{
    eta_expansion, eta_partial_k, lambda, phi, phi_partials, quasisymmetry_margin_excess, quasisymmetry_threshold, singular_value,
    Dilatation,
};
use qcdist::elliptic::{ellint_all, ellint_derivatives, ellint_e, ellint_k, UnitRadius};
use qcdist::modulus::{mu, mu_derivative, mu_inverse};

/// Outcome of one criterion: a list of named sub-checks.
#[derive(Default)]
struct Outcome {
    checks: Vec<(String, bool)>,
}

impl Outcome {
    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push((name.into(), ok));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

fn radius(r: f64) -> UnitRadius {
    UnitRadius::new(r).unwrap()
}

fn dil(k: f64) -> Dilatation {
    Dilatation::new(k).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

fn constants_reproduced() -> Outcome {
    let mut o = Outcome::default();
    for e in Constants::compute().unwrap().table() {
        o.check(
            format!("{} = {:.7} vs {} (tol {})", e.name, e.value, e.published, e.tolerance),
            e.within_tolerance(),
        );
    }
    o
}

fn lambda_two_closed_form() -> Outcome {
    let mut o = Outcome::default();
    let exact = 4.0 * SQRT_2 * (SQRT_2 + 1.0).powi(2);
    let value = lambda(dil(2.0)).unwrap();
    o.check(
        format!("lambda(2) = {value} vs {exact}, rel {:.1e}", rel(value, exact)),
        rel(value, exact) <= 1e-11,
    );
    o
}

fn sandwich_endpoints() -> Outcome {
    let mut o = Outcome::default();
    let checks = lambda_sandwich(dil(1.0), &Constants::compute().unwrap()).unwrap();
    let find = |name: &str| checks.iter().find(|c| c.name == name).unwrap();
    let lower = find("lambda_sandwich_lower");
    let upper = find("lambda_sandwich_upper");
    o.check(
        format!("lower endpoint {:.10} vs 0.9999902", lower.lhs),
        (lower.lhs - 0.999_990_2).abs() <= 1e-6,
    );
    o.check(
        format!("upper endpoint {:.10} vs 1.0025922", upper.rhs),
        (upper.rhs - 1.002_592_2).abs() <= 1e-6,
    );
    o.check(
        "endpoints bracket lambda(1) = 1",
        lower.lhs < 1.0 && 1.0 < upper.rhs && lower.rhs == 1.0 && upper.lhs == 1.0,
    );
    o
}

fn identity_suite() -> Outcome {
    let mut o = Outcome::default();
    let start = Instant::now();

    let worst = logspace(1e-6, 1.0 - 1e-6, 1000)
        .into_iter()
        .map(|r| {
            let v = ellint_all(radius(r)).unwrap();
            rel(v.k * v.e_prime + v.k_prime * v.e - v.k * v.k_prime, FRAC_PI_2)
        })
        .fold(0.0, f64::max);
    o.check(format!("Legendre relation on 1000 radii, worst rel {worst:.1e}"), worst <= 1e-12);

    let radii = logspace(1e-8, 1.0 - 1e-8, 500);
    let worst = radii
        .iter()
        .map(|&r| rel(mu(radius(r)).unwrap() * mu(radius(r).complement()).unwrap(), PI * PI / 4.0))
        .fold(0.0, f64::max);
    o.check(format!("mu(r) mu(r') = pi^2/4, worst rel {worst:.1e}"), worst <= 1e-12);
    let worst = radii
        .iter()
        .map(|&r| rel(mu_inverse(mu(radius(r)).unwrap()).unwrap().r(), r))
        .fold(0.0, f64::max);
    o.check(format!("mu^-1(mu(r)) = r, worst rel {worst:.1e}"), worst <= 1e-12);

    let mut worst = 0.0_f64;
    for k in linspace(0.2, 5.0, 50) {
        for r in linspace(0.01, 0.99, 50) {
            let u = radius(r);
            let a = phi(dil(k), u).unwrap().r();
            let b = phi(dil(1.0 / k), u.complement()).unwrap().r();
            worst = worst.max((a * a + b * b - 1.0).abs());
        }
    }
    o.check(
        format!("phi_K(r)^2 + phi_1/K(r')^2 = 1 on 50x50, worst {worst:.1e}"),
        worst <= 1e-11,
    );

    let worst = linspace(0.01, 0.99, 99)
        .into_iter()
        .map(|r| {
            let (alpha, beta) = (r * r, phi(dil(1.0 / 3.0), radius(r)).unwrap().r().powi(2));
            ((alpha * beta).powf(0.25) + ((1.0 - alpha) * (1.0 - beta)).powf(0.25) - 1.0).abs()
        })
        .fold(0.0, f64::max);
    o.check(format!("degree-3 modular equation, worst {worst:.1e}"), worst <= 1e-10);

    let worst = linspace(1.0, 20.0, 200)
        .into_iter()
        .map(|k| (lambda(dil(k)).unwrap() * lambda(dil(1.0 / k)).unwrap() - 1.0).abs())
        .fold(0.0, f64::max);
    o.check(format!("lambda(K) lambda(1/K) = 1, worst {worst:.1e}"), worst <= 1e-10);

    let h = 1e-6;
    let mut worst = 0.0_f64;
    for r in linspace(0.01, 0.99, 50) {
        let (dk, de) = ellint_derivatives(radius(r)).unwrap();
        worst = worst.max(rel(dk, central_difference(|x| ellint_k(radius(x)).unwrap(), r, h)));
        worst = worst.max(rel(de, central_difference(|x| ellint_e(radius(x)), r, h)));
        let dmu = mu_derivative(radius(r)).unwrap();
        worst = worst.max(rel(dmu, central_difference(|x| mu(radius(x)).unwrap(), r, h)));
        for k in [0.5, 1.5, 3.0] {
            let p = phi_partials(dil(k), radius(r)).unwrap();
            let s = phi(dil(k), radius(r)).unwrap();
            // Difference whichever of s, s' is small: it carries full relative
            // precision, and ∂s' = −(s/s') ∂s.
            let (scale, pick): (f64, fn(UnitRadius) -> f64) = if s.r() > FRAC_1_SQRT_2 {
                (-s.r() / s.r_prime(), UnitRadius::r_prime)
            } else {
                (1.0, UnitRadius::r)
            };
            let fd_r = central_difference(|x| pick(phi(dil(k), radius(x)).unwrap()), r, h);
            let fd_k = central_difference(|x| pick(phi(dil(x), radius(r)).unwrap()), k, h);
            worst = worst.max(rel(scale * p.d_r, fd_r));
            worst = worst.max(rel(scale * p.d_k, fd_k));
        }
    }
    for k in [1.2, 2.0, 4.0] {
        for t in [0.05, 0.5, 1.0, 5.0, 50.0] {
            let d = eta_partial_k(dil(k), t).unwrap();
            let fd = central_difference(|x| qcdist::distortion::eta(dil(x), t).unwrap(), k, h);
            worst = worst.max(rel(d, fd));
        }
    }
    o.check(format!("derivatives vs central differences, worst rel {worst:.1e}"), worst <= 1e-6);

    let elapsed = start.elapsed();
    o.check(format!("identity suite time {elapsed:.2?}"), elapsed <= Duration::from_secs(60));
    o
}

fn inequality_sweep() -> Outcome {
    let mut o = Outcome::default();
    let start = Instant::now();
    let report = verify_grid(&GridSpec::default()).unwrap();
    let elapsed = start.elapsed();
    let summary = report.summary();
    o.check(format!("default grid time {elapsed:.2?}"), elapsed <= Duration::from_secs(120));
    o.check(format!("{} checks (> 10000)", summary.total), summary.total > 10_000);
    o.check(format!("{} failures", summary.failed), summary.failed == 0);
    let failures: Vec<String> = report.failures().take(5).map(|c| format!("{} at {:?}", c.name, c.point)).collect();
    if !failures.is_empty() {
        o.check(format!("first failures: {}", failures.join("; ")), false);
    }
    let min_margin = summary.families.iter().map(|f| f.min_margin).fold(f64::INFINITY, f64::min);
    o.check(format!("every margin positive (min {min_margin:.3e})"), min_margin > 0.0);
    let names: Vec<&str> = summary.families.iter().map(|f| f.name.as_str()).collect();
    for family in Family::ALL {
        let covered = family_check_prefixes(family).iter().any(|p| names.iter().any(|n| n.starts_with(p)));
        o.check(format!("family {} produced checks", family.name()), covered);
    }
    o
}

/// Name prefixes of the checks emitted by each family.
fn family_check_prefixes(family: Family) -> &'static [&'static str] {
    match family {
        Family::LambdaTaylor => &["lambda_taylor", "lambda_two"],
        Family::LambdaLinear => &["lambda_linear"],
        Family::LambdaExp => &["lambda_exp"],
        Family::LambdaSandwich => &["lambda_sandwich"],
        Family::EtaLinearExp => &["eta_exp", "eta_additive", "lambda_gap"],
        Family::EtaSandwich => &["eta_sandwich", "eta_small", "eta_c1", "eta_c2"],
        Family::EtaPower => &["eta_power", "eta_ab", "eta_kk", "eta_chain", "lambda_log2"],
        Family::LogConvexity => &["eta_log_concave", "eta_plus_one"],
        Family::Monotone => &[
            "eta_scaled",
            "eta_log_derivative",
            "lambda_log_ratio",
            "lambda_shifted",
            "eta_power_ratio",
            "eta_root",
        ],
        Family::Structure => &["eta_small_constant", "ab_"],
    }
}

fn asymptotics() -> Outcome {
    let mut o = Outcome::default();
    let k = 100.0;
    // At t = 1, E = πK and λ = e^E/16 − 1/2 + δ, so
    // log λ − log(e^E/16 − 1/2) = log1p(16 q δ / (1 − 8q)), q = e^{−E}.
    let x = eta_expansion(dil(k), 1.0).unwrap();
    let q = x.nome;
    let diff = (16.0 * q * x.residual() / (1.0 - 8.0 * q)).ln_1p();
    let relative = diff / x.ln_eta();
    let bound = 10.0 * (-2.0 * PI * k).exp();
    o.check(
        format!("lambda(100): relative log gap {relative:.3e} < {bound:.3e}"),
        relative > 0.0 && relative < bound,
    );
    let c = Constants::compute().unwrap();
    for t in [0.5, 1.0, 5.0] {
        let x = eta_expansion(dil(k), t).unwrap();
        let q2 = x.nome * x.nome;
        // e^E δ = 5/4 + q² ρ₂ lies strictly between c₁ = 1/4 + 1/(4q² + 1)
        // and c₂ = (1 + 4(5q⁴ + 14q² + 5)/(q⁶ + 7q⁴ + 7q² + 1))/16.
        let above_c1 = x.scaled_residual > -4.0 / (4.0 * q2 + 1.0);
        let c2 = (1.0 + 4.0 * (5.0 * q2 * q2 + 14.0 * q2 + 5.0) / (q2 * q2 * q2 + 7.0 * q2 * q2 + 7.0 * q2 + 1.0)) / 16.0;
        let below_c2 = 1.25 + q2 * x.scaled_residual < c2;
        o.check(
            format!("eta_100({t}): c1 < e^E delta < c2 (rho2 = {:.6})", x.scaled_residual),
            above_c1 && below_c2,
        );
        let family = eta_sandwich(dil(k), t, &c).unwrap();
        o.check(format!("eta_100({t}): sandwich family passes"), family.iter().all(|c| c.pass));
    }
    o
}

fn singular_values() -> Outcome {
    let mut o = Outcome::default();
    let k1 = FRAC_1_SQRT_2;
    let expected = [
        (1, k1),
        (2, SQRT_2 - 1.0),
        (3, (6f64.sqrt() - SQRT_2) / 4.0),
        (4, 3.0 - 2.0 * SQRT_2),
    ];
    for (p, closed) in expected {
        let v = singular_value(p).unwrap().k_p.r();
        o.check(format!("k_{p} = {v:.16} vs {closed:.16}"), (v - closed).abs() <= 1e-10);
    }
    // Landen's transformation k_{4p} = (1 − k_p')/(1 + k_p') at p = 1/2,
    // where k_{1/2}' = k_2, gives the fixed point k_2 = (1 − k_2)/(1 + k_2).
    let k2 = singular_value(2).unwrap().k_p.r();
    o.check(
        "k_2 is the fixed point of (1 - k)/(1 + k)",
        ((1.0 - k2) / (1.0 + k2) - k2).abs() <= 1e-10,
    );
    // μ(k_4) = 2 μ(k_1), so k_4 = φ_{1/2}(k_1); at p = 1 Landen gives (1 − k_1)/(1 + k_1).
    let via_phi = phi(dil(0.5), radius(k1)).unwrap().r();
    let via_landen = (1.0 - k1) / (1.0 + k1);
    o.check(
        format!("k_4 via phi_1/2(k_1) = {via_phi:.16} vs Landen {via_landen:.16}"),
        (via_phi - via_landen).abs() <= 1e-10 && (via_landen - (3.0 - 2.0 * SQRT_2)).abs() <= 1e-15,
    );
    let worst = (1..=16)
        .map(|p| (mu(singular_value(p).unwrap().k_p).unwrap() - FRAC_PI_2 * f64::from(p).sqrt()).abs())
        .fold(0.0, f64::max);
    o.check(format!("mu(k_p) = (pi/2) sqrt p for p = 1..16, worst {worst:.1e}"), worst <= 1e-11);
    o
}

fn quasisymmetry() -> Outcome {
    let mut o = Outcome::default();
    let excesses = logspace(1e-12, 1e-3, 46);
    let worst = excesses
        .iter()
        .map(|&h| (h, quasisymmetry_margin_excess(h).unwrap()))
        .fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    o.check(
        format!(
            "margin <= 16 on K - 1 in [1e-12, 1e-3] (max {:.3} at K - 1 = {:.1e})",
            worst.1, worst.0
        ),
        worst.1 <= 16.0,
    );
    let at = quasisymmetry_margin_excess(1e-8).unwrap();
    o.check(format!("margin at K = 1 + 1e-8 is {at:.4} (< 1e-3)"), at < 1e-3);
    let h0 = quasisymmetry_threshold();
    o.check(format!("threshold K0 = 1 + {h0:.4e} in (1, 2)"), h0 > 0.0 && h0 < 1.0);
    o
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 constants reproduction", constants_reproduced),
        ("2 lambda(2) closed form", lambda_two_closed_form),
        ("3 sandwich endpoints at K = 1", sandwich_endpoints),
        ("4 identity suite", identity_suite),
        ("5 inequality sweep on the default grid", inequality_sweep),
        ("6 asymptotics at K = 100", asymptotics),
        ("7 singular values", singular_values),
        ("8 quasisymmetry margin", quasisymmetry),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = run();
        let ok = outcome.passed();
        println!("{} criterion {name}", if ok { "PASS" } else { "FAIL" });
        for (check, pass) in &outcome.checks {
            println!("    {} {check}", if *pass { "ok  " } else { "FAIL" });
        }
        failed += usize::from(!ok);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
