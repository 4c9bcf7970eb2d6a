//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use spidernet::commands::{fit_trace, FitOptions};
use spidernet_core::decay::{characteristic_time, classical_window, fit_power_law};
use spidernet_core::gauss::gauss_rule;
use spidernet_core::jacobi::{orthogonal_poly, stieltjes};
use spidernet_core::oracle::{closed_walk_count, evolve, light_cone_bound, EvolveOptions};
use spidernet_core::walk::{limit_amplitude, quantum_amplitude, spectral_trace};
use spidernet_core::{
    build, jacobi_for_spidernet, spectral_measure, Complex64, Flavor, JacobiSequence, Quadrature,
    SpidernetParams, WalkOperatorKind,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const ADJ: WalkOperatorKind = WalkOperatorKind::Adjacency;
const LAP: WalkOperatorKind = WalkOperatorKind::NegativeLaplacian;

fn params(a: u32, b: u32, c: u32) -> SpidernetParams {
    SpidernetParams::new(a, b, c).unwrap()
}

fn name(p: &SpidernetParams) -> String {
    format!("S({},{},{})", p.a(), p.b(), p.c())
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Trapezoid rule on a smooth periodic integrand over `[0, pi]`.
fn periodic_mean(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = PI / n as f64;
    let inner: f64 = (1..n).map(|i| f(i as f64 * h)).sum();
    (inner + 0.5 * (f(0.0) + f(PI))) / n as f64
}

// Integral representations, independent of the library's Bessel routines.
fn j0(x: f64) -> f64 {
    periodic_mean(600, |th| (x * th.sin()).cos())
}

fn j1(x: f64) -> f64 {
    periodic_mean(600, |th| (th - x * th.sin()).cos())
}

fn i0_scaled(x: f64) -> f64 {
    periodic_mean(600, |th| (x * (th.cos() - 1.0)).exp())
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn line_closed_forms() -> Outcome {
    let start = Instant::now();
    let p = params(2, 2, 1);
    let times = linspace(0.0, 20.0, 200);
    let quad = Quadrature::default();
    let q = spectral_trace(Some(p), ADJ, Flavor::Quantum, &times, 1, &quad).map_err(err)?;
    let c = spectral_trace(Some(p), LAP, Flavor::Classical, &times, 1, &quad).map_err(err)?;
    let mut eq: f64 = 0.0;
    let mut ec: f64 = 0.0;
    for (i, &t) in times.iter().enumerate() {
        eq = eq.max((q.value(i, 0) - j0(2.0 * t)).norm());
        ec = ec.max((c.probability(i, 0) - i0_scaled(2.0 * t)).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        eq <= 1e-8 && ec <= 1e-8 && secs <= 10.0,
        format!("max |q0 - J0(2t)| = {eq:.2e}, max |p0 - e^-2t I0(2t)| = {ec:.2e}, {secs:.2} s"),
    )
}

fn limit_family() -> Outcome {
    let mu = spectral_measure(&JacobiSequence::semicircle()).map_err(err)?;
    let quad = Quadrature::default();
    let mut closed: f64 = 0.0;
    let mut route: f64 = 0.0;
    for t in linspace(0.2, 20.0, 100) {
        let q = limit_amplitude(0, t);
        let reference = (j1(2.0 * t) / t).powi(2);
        closed = closed.max((q.norm_sqr() - reference).abs());
        route = route.max((q - quantum_amplitude(&mu, 0, t, &quad).map_err(err)?).norm());
    }
    verdict(
        closed <= 1e-10 && route <= 1e-10,
        format!("|q0|^2 vs (J1(2t)/t)^2 {closed:.2e}, vs semicircle quadrature {route:.2e}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let depth = 9;
    let quad = Quadrature::default();
    let opts = EvolveOptions::default();
    let mut worst: f64 = 0.0;
    let mut bounds = Vec::new();
    for p in [params(4, 6, 3), params(3, 3, 2)] {
        let g = build(p, depth).map_err(err)?;
        for (kind, flavor) in [
            (ADJ, Flavor::Quantum),
            (LAP, Flavor::Quantum),
            (LAP, Flavor::Classical),
        ] {
            let seq = jacobi_for_spidernet(&p, kind);
            let bound =
                light_cone_bound(&seq, depth + 1, opts.light_cone_tol, flavor).map_err(err)?;
            bounds.push(format!("{:.2}", bound));
            let times: Vec<f64> = (1..=40)
                .map(|i| (bound * i as f64 / 40.0).min(bound))
                .collect();
            let r = evolve(&g, kind, flavor, &times, &opts).map_err(err)?;
            r.require_trusted().map_err(err)?;
            let s = spectral_trace(Some(p), kind, flavor, &times, 5, &quad).map_err(err)?;
            for i in 0..times.len() {
                for k in 0..5 {
                    let d = match flavor {
                        Flavor::Quantum => (s.value(i, k) - r.stratum_projection(i, k))
                            .norm()
                            .max((s.probability(i, k) - r.stratum_probability(i, k)).abs()),
                        Flavor::Classical => {
                            (s.probability(i, k) - r.stratum_probability(i, k)).abs()
                        }
                    };
                    worst = worst.max(d);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst <= 1e-6 && secs <= 120.0,
        format!("depth {depth}, k <= 4, 40 times up to t = [{}], max deviation {worst:.2e}, {secs:.1} s", bounds.join(", ")),
    )
}

fn moment_suite() -> Outcome {
    let quad = Quadrature::default();
    let mut worst: f64 = 0.0;
    for p in [params(4, 6, 3), params(4, 4, 3)] {
        let g = build(p, 6).map_err(err)?;
        let mu = spectral_measure(&jacobi_for_spidernet(&p, ADJ)).map_err(err)?;
        for m in 0..=10 {
            let exact = closed_walk_count(&g, m).map_err(err)? as f64;
            let moment = mu.moment(m as u32, &quad).map_err(err)?;
            worst = worst.max((moment - exact).abs() / exact.max(1.0));
        }
    }
    verdict(
        worst <= 1e-8,
        format!("m = 0..10, max relative error {worst:.2e}"),
    )
}

fn normalization() -> Outcome {
    let quad = Quadrature::default();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    let families = [
        Some(params(4, 6, 3)),
        Some(params(3, 3, 2)),
        Some(params(4, 4, 3)),
        None,
    ];
    for p in families {
        for kind in [ADJ, LAP] {
            let seq = match p {
                Some(p) => jacobi_for_spidernet(&p, kind),
                None => JacobiSequence::semicircle(),
            };
            let tmax = 30.0;
            let strata = (2.0 * seq.omega_tail().sqrt() * tmax).ceil() as usize + 30;
            let times = linspace(0.0, tmax, 61);
            let trace =
                spectral_trace(p, kind, Flavor::Quantum, &times, strata, &quad).map_err(err)?;
            for i in 0..times.len() {
                worst = worst.max((trace.total(i) - 1.0).abs());
            }
            if p.is_none() {
                break;
            }
        }
        let Some(p) = p else { continue };
        // Classical: K = 30 strata, grid up to the K = 30 light cone (at most t = 3).
        let seq = jacobi_for_spidernet(&p, LAP);
        let tmax = light_cone_bound(&seq, 30, 1e-6, Flavor::Classical)
            .map_err(err)?
            .min(3.0);
        let times = linspace(0.0, tmax, 31);
        let trace =
            spectral_trace(Some(p), LAP, Flavor::Classical, &times, 30, &quad).map_err(err)?;
        for i in 0..times.len() {
            worst = worst.max((trace.total(i) - 1.0).abs());
        }
        lines.push(format!("{} classical to t = {tmax:.2}", name(&p)));
    }
    verdict(
        worst <= 1e-6,
        format!(
            "quantum t <= 30 with K = 2 sqrt(w) t + 30, {}; max |sum - 1| = {worst:.2e}",
            lines.join(", ")
        ),
    )
}

fn power_laws() -> Outcome {
    let quad = Quadrature::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [params(4, 6, 3), params(3, 3, 2), params(4, 4, 3)] {
        let seq = jacobi_for_spidernet(&p, LAP);
        let ctimes = linspace(0.01, 4.0, 400);
        let classical =
            spectral_trace(Some(p), LAP, Flavor::Classical, &ctimes, 1, &quad).map_err(err)?;
        let fit = fit_trace(&classical, &FitOptions::default()).map_err(err)?;
        let literal = fit_power_law(&classical.series(0), (0.3, 3.0)).map_err(err)?;
        let (lo, hi) = classical_window(&seq);
        ok &= (fit.exponent + 1.5).abs() <= 0.15;

        // The adjacency measure of S(4,6,3) has an atom, so |q0|^2 does not
        // decay there; the Laplacian measure is atom-free for all three.
        let qtimes = linspace(0.01, 80.0, 8000);
        let quantum =
            spectral_trace(Some(p), LAP, Flavor::Quantum, &qtimes, 1, &quad).map_err(err)?;
        let qfit = fit_trace(&quantum, &FitOptions::default()).map_err(err)?;
        ok &= (qfit.exponent + 3.0).abs() <= 0.3 && qfit.n_points >= 10;
        parts.push(format!(
            "{} classical {:.3} on [{lo:.2}, {hi:.2}] ([0.3, 3]: {:.3}), quantum {:.3} over {} maxima",
            name(&p),
            fit.exponent,
            literal.exponent,
            qfit.exponent,
            qfit.n_points
        ));
    }
    verdict(ok, parts.join("; "))
}

fn characteristic_times() -> Outcome {
    let quad = Quadrature::default();
    let opts = EvolveOptions::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [params(4, 6, 3), params(3, 3, 2), params(4, 4, 3)] {
        let times = linspace(0.0, 8.0, 801);
        let quantum =
            spectral_trace(Some(p), LAP, Flavor::Quantum, &times, 2, &quad).map_err(err)?;
        let tq = characteristic_time(&quantum, 1, None, 0.05).map_err(err)?;

        let g = build(p, 3).map_err(err)?;
        let long = linspace(0.0, 200.0, 2001);
        let finite = evolve(&g, LAP, Flavor::Classical, &long, &opts)
            .map_err(err)?
            .to_trace(&g, 2);
        let tc =
            characteristic_time(&finite, 1, Some(g.vertex_count() as u64), 0.05).map_err(err)?;

        let classical =
            spectral_trace(Some(p), LAP, Flavor::Classical, &times, 2, &quad).map_err(err)?;
        let first = characteristic_time(&classical, 1, None, 0.05).map_err(err)?;
        ok &= tq.t_c < tc.t_c;
        parts.push(format!(
            "{} quantum {:.3} < classical {:.3} (N = {}; classical first maximum {:.3})",
            name(&p),
            tq.t_c,
            tc.t_c,
            g.vertex_count(),
            first.t_c
        ));
    }
    verdict(ok, parts.join("; "))
}

fn property_suites() -> Outcome {
    let quad = Quadrature::default();
    let mut failures = Vec::new();
    let mut seqs = Vec::new();
    for p in [
        params(4, 6, 3),
        params(3, 3, 2),
        params(4, 4, 3),
        params(5, 7, 2),
        params(2, 2, 1),
    ] {
        for kind in [ADJ, LAP] {
            seqs.push(jacobi_for_spidernet(&p, kind));
        }
    }
    seqs.push(JacobiSequence::semicircle());

    let mut herglotz = 0;
    for s in &seqs {
        for i in 0..41 {
            for im in [1e-6, 1e-3, 0.1, 1.0, 10.0] {
                let z = Complex64::new(-15.0 + 0.75 * i as f64, im);
                let g = stieltjes(s, z).map_err(err)?;
                herglotz += 1;
                if !(g.im < 0.0 && g.norm() <= (1.0 + 1e-12) / im) {
                    failures.push(format!("Herglotz at {z}"));
                }
            }
        }
    }

    for s in &seqs {
        let mu = spectral_measure(s).map_err(err)?;
        let bound = s.spectral_bound().max(1.0);
        for n in 1..=10 {
            let rule = gauss_rule(s, n).map_err(err)?;
            for m in 0..2 * n as u32 {
                let exact = mu.moment(m, &quad).map_err(err)?;
                if (exact - rule.integrate(|x| x.powi(m as i32))).abs()
                    > 1e-9 * bound.powi(m as i32)
                {
                    failures.push(format!("Gauss n={n} m={m}"));
                }
            }
        }
        for j in 0..=8 {
            for k in j..=8 {
                let inner = mu
                    .integrate(&quad, |x| {
                        orthogonal_poly(s, j, x) * orthogonal_poly(s, k, x)
                    })
                    .map_err(err)?;
                let expect = if j == k { s.population(k) } else { 0.0 };
                if (inner - expect).abs() > 1e-8 * (s.population(j) * s.population(k)).sqrt() {
                    failures.push(format!("orthogonality j={j} k={k}"));
                }
            }
        }
    }

    let mut spread: f64 = 0.0;
    for p in [params(4, 6, 3), params(4, 4, 3), params(5, 7, 2)] {
        let g = build(p, 5).map_err(err)?;
        let times = [0.2, 0.9, 1.7, 3.1];
        for (kind, flavor) in [
            (ADJ, Flavor::Quantum),
            (LAP, Flavor::Quantum),
            (LAP, Flavor::Classical),
        ] {
            let r = evolve(&g, kind, flavor, &times, &EvolveOptions::default()).map_err(err)?;
            for i in 0..times.len() {
                let psi = r.vertex_slice(i);
                for range in g.strata() {
                    let probs = psi[range.clone()].iter().map(|v| match flavor {
                        Flavor::Quantum => v.norm_sqr(),
                        Flavor::Classical => v.re,
                    });
                    let (lo, hi) =
                        probs.fold((f64::MAX, f64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)));
                    spread = spread.max(hi - lo);
                }
            }
        }
    }
    if spread > 1e-10 {
        failures.push(format!("uniformity spread {spread:.2e}"));
    }
    let detail = format!(
        "{herglotz} Herglotz samples, Gauss n <= 10 and orthogonality j,k <= 8 on {} sequences, stratum spread {spread:.1e}",
        seqs.len()
    );
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; failed: {}", failures.join(", ")))
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("closed-form line check", line_closed_forms),
        ("limit family", limit_family),
        ("oracle equivalence", oracle_equivalence),
        ("moment suite", moment_suite),
        ("normalization", normalization),
        ("power laws", power_laws),
        ("characteristic-time ordering", characteristic_times),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {} {title}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} {title}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
