//! Acceptance run: one line per criterion.
//!
//! Criteria listed in `KNOWN_FAILING` are computed and reported like every
//! other one; they do not fail the run, but any other failure does, and so
//! does a known-failing criterion that starts passing (the list is stale).

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use smallforms::approx::{classify, dimension_lower_bound, Classification};
use smallforms::exact::{abs_lt, from_f64, int, ratio, Point};
use smallforms::io;
use smallforms::measure::{
    borel_cantelli_partial_sum, dichotomy_experiment, form_poly, solution_cells, CellPath, DichotomyTable,
    SampleRegion, ThetaTuple,
};
use smallforms::solver::{
    canonical_form_at, coefficient_box_size, default_delta0, dirichlet_witness, enumerate_solutions, Backend,
    SolverConfig,
};
use smallforms::ubiquity::{
    calibrate_eta, mvt_inclusion_check, random_offset, regularity_and_condensation, resonant_points, UbiquityConfig,
    ETA_EXPONENTS,
};
use smallforms::{ApproxFunction, DimensionFunction, SystemMap};

const KNOWN_FAILING: [u32; 2] = [4, 6];

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn veronese(n: usize, m: usize) -> SystemMap {
    SystemMap::veronese(n, m, ratio(-1, 2), ratio(1, 2)).unwrap()
}

fn dyadic_point(rng: &mut ChaCha8Rng, m: usize) -> Point {
    Point::new((0..m).map(|_| ratio(rng.gen_range(-(1i64 << 19)..=(1i64 << 19)), 1 << 20)).collect())
}

// 1 -------------------------------------------------------------------------

fn backend_csv() -> (bool, String, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    let mut total = 0;
    let mut csv = Vec::new();
    for case in 0..100 {
        let n = rng.gen_range(1..=3usize);
        let m = rng.gen_range(1..=n);
        let h_max = rng.gen_range(1..=32u64);
        let c = rng.gen_range(0.5..2.0);
        let threshold = (n + 1 - m) as f64 / m as f64;
        let tau = rng.gen_range(0.5 * threshold..1.5 * threshold + 0.5);
        let s = veronese(n, m);
        let x = dyadic_point(&mut rng, m);
        let psi = ApproxFunction::power_law(c, tau).unwrap();
        let ex = enumerate_solutions(&s, &x, &psi, &SolverConfig::exhaustive(h_max)).unwrap();
        let la = enumerate_solutions(&s, &x, &psi, &SolverConfig::lattice(h_max)).unwrap();
        let forms = |v: &[smallforms::SolutionRecord]| v.iter().map(|r| r.form.clone()).collect::<Vec<_>>();
        total += ex.len();
        if forms(&ex) != forms(&la) {
            mismatches += 1;
            eprintln!("  case {case}: n={n} m={m} H={h_max} exhaustive {} vs lattice {}", ex.len(), la.len());
        }
        io::write_solutions(&mut csv, &la).unwrap();
    }
    (mismatches == 0, format!("100 configs, {total} solutions, {mismatches} mismatching configs"), csv)
}

fn criterion_1() -> (bool, String) {
    let start = Instant::now();
    let (ok, detail, _) = backend_csv();
    let secs = start.elapsed().as_secs_f64();
    (ok && secs < 120.0, format!("{detail}, {secs:.1}s (target < 120s)"))
}

// 2 -------------------------------------------------------------------------

fn criterion_2() -> (bool, String) {
    let start = Instant::now();
    let s = veronese(2, 1);
    let delta0 = default_delta0(&s);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let points: Vec<Point> = (0..50).map(|_| dyadic_point(&mut rng, 1)).collect();
    let failures: usize = points
        .par_iter()
        .map(|x| {
            (5..=12)
                .filter(|&t| match dirichlet_witness(&s, x, t, delta0) {
                    Ok(w) => {
                        // re-verify the witness independently of the solver
                        let f = form_poly(&w.record.form, &s, 0);
                        !(w.record.form.height() <= w.height_bound && abs_lt(&f.eval(&x.0[0]), w.value_bound))
                    }
                    Err(_) => true,
                })
                .count()
        })
        .sum();
    let secs = start.elapsed().as_secs_f64();
    (failures == 0 && secs < 60.0, format!("δ₀ = {delta0}, 50 points × t ∈ 5..=12, {failures} failures, {secs:.1}s (target < 60s)"))
}

// 3 -------------------------------------------------------------------------

fn criterion_3() -> (bool, String) {
    // τ = (n − m + e)/m, so the sum exponent is e and the threshold sits at e = 1
    let es = [(0, 4), (1, 4), (2, 4), (3, 4), (9, 10), (1, 1), (9, 5), (2, 1), (5, 2), (3, 1)];
    let pairs: Vec<(u32, u32)> = (1..=4).flat_map(|n| (1..=n).map(move |m| (n, m))).collect();
    let mut wrong_class = 0;
    let mut wrong_growth = 0;
    let mut points = 0;
    for &(n, m) in &pairs {
        for &(p, q) in &es {
            points += 1;
            let e = ratio(p, q);
            let tau_q = (int(i64::from(n) - i64::from(m)) + &e) / int(i64::from(m));
            let tau = smallforms::exact::to_f64(&tau_q);
            let psi = ApproxFunction::power_law(1.0, tau).unwrap();
            let v = classify(&psi, n, m, &[1_000, 100_000]).unwrap();
            // truth from the stored dyadic τ, compared exactly
            let stored = from_f64(tau).unwrap();
            let divergent = stored * int(i64::from(m)) <= int(i64::from(n + 1 - m));
            let expected = if divergent { Classification::Divergent } else { Classification::Convergent };
            if v.classification != expected {
                wrong_class += 1;
                eprintln!("  n={n} m={m} τ={tau}: {} vs {expected}", v.classification);
            }
            let (s1, s2) = (v.partial_sums[0].1, v.partial_sums[1].1);
            let growth = s2 / s1 - 1.0;
            let ok = if divergent { growth >= 0.10 } else { growth <= 0.01 };
            if !ok {
                wrong_growth += 1;
                eprintln!("  n={n} m={m} τ={tau}: growth {growth:.4} for {expected}");
            }
        }
    }
    (
        points == 100 && wrong_class == 0 && wrong_growth == 0,
        format!("{points} (n, m, τ) points, {wrong_class} misclassified, {wrong_growth} growth violations"),
    )
}

// 4 -------------------------------------------------------------------------

fn dichotomy_tables() -> (DichotomyTable, DichotomyTable, usize) {
    let s = veronese(2, 1);
    let region = SampleRegion::of_system(&s, 1000, 4);
    let run = |tau: f64| {
        let psi = ApproxFunction::power_law(1.0, tau).unwrap();
        let lattice = dichotomy_experiment(&s, &psi, &region, 9, &SolverConfig::default()).unwrap();
        let exhaustive_config = SolverConfig { backend: Backend::Exhaustive, ..SolverConfig::default() };
        let exhaustive = dichotomy_experiment(&s, &psi, &region, 7, &exhaustive_config).unwrap();
        let disagreements = lattice
            .counts
            .iter()
            .zip(&exhaustive.counts)
            .filter(|(a, b)| a[..=7] != b[..])
            .count();
        let failures = lattice.failures.len() + exhaustive.failures.len();
        (lattice, disagreements + failures)
    };
    let (conv, d1) = run(2.5);
    let (div, d2) = run(2.0);
    (conv, div, d1 + d2)
}

fn criterion_4() -> (bool, String) {
    let start = Instant::now();
    let (conv, div, disagreements) = dichotomy_tables();
    let tail: Vec<_> = conv.rows.iter().filter(|r| r.t >= 4).collect();
    let decays = tail.windows(2).all(|w| w[1].mean_count < w[0].mean_count);
    let ratios: Vec<f64> = tail.iter().map(|r| r.mean_count / r.heuristic).collect();
    let within = ratios.iter().all(|&q| (0.25..=4.0).contains(&q));
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &q| (a.min(q), b.max(q)));
    let min_hit = div.rows.iter().map(|r| r.hit_fraction).fold(1.0, f64::min);
    let secs = start.elapsed().as_secs_f64();
    let pass = disagreements == 0 && decays && within && min_hit > 0.2 && secs < 600.0;
    (
        pass,
        format!(
            "τ=2.5: decay {decays}, mean/heuristic on t ≥ 4 in [{lo:.2}, {hi:.2}] (need [0.25, 4]); \
             τ=2: min hit fraction {min_hit:.3}; backend disagreements {disagreements}; {secs:.1}s"
        ),
    )
}

// 5 -------------------------------------------------------------------------

fn criterion_5() -> (bool, String) {
    let mut report = Vec::new();
    let mut violations = 0usize;
    for n in 1..=3usize {
        let s = veronese(n, 1);
        let psi = ApproxFunction::power_law(1.0, n as f64).unwrap();
        let total = coefficient_box_size(n, 16).unwrap();
        let (max_k, bad) = (0..total)
            .into_par_iter()
            .filter_map(|i| canonical_form_at(n, 16, i))
            .map(|form| {
                let d = solution_cells(&form, &s, &psi, 0).unwrap();
                let f = form_poly(&form, &s, 0);
                let mut bad = usize::from(d.cells.len() > d.k_bound) + usize::from(!d.length_bound_holds());
                bad += d.cells.iter().filter(|c| !abs_lt(&f.eval(&c.interior_point()), d.psi_value)).count();
                bad += d.gap_points().iter().filter(|g| abs_lt(&f.eval(g), d.psi_value)).count();
                (d.cells.len(), bad)
            })
            .reduce(|| (0, 0), |a, b| (a.0.max(b.0), a.1 + b.1));
        violations += bad;
        report.push(format!("n={n}: K={max_k} (bound {})", n * (n + 1) / 2 + 1));
    }
    (violations == 0, format!("{}, {violations} violations", report.join(", ")))
}

// 6 -------------------------------------------------------------------------

fn criterion_6() -> (bool, String) {
    let s = veronese(2, 1);
    let psi = ApproxFunction::power_law(1.0, 2.5).unwrap();
    let region = SampleRegion::of_system(&s, 0, 0);
    let exact = borel_cantelli_partial_sum(&s, &psi, &region, 16, CellPath::Exact, u128::MAX).unwrap();
    let fast = borel_cantelli_partial_sum(&s, &psi, &region, 16, CellPath::Quadratic, u128::MAX).unwrap();
    let agree = (exact.cell_sum - fast.cell_sum).abs() <= 1e-10 * exact.cell_sum;
    let sums: Vec<f64> = [64u64, 256, 1024]
        .iter()
        .map(|&h| borel_cantelli_partial_sum(&s, &psi, &region, h, CellPath::Quadratic, u128::MAX).unwrap().cell_sum)
        .collect();
    let (d1, d2) = (sums[1] - sums[0], sums[2] - sums[1]);
    let shrink = d1 / d2;
    (
        agree && sums.iter().all(|v| v.is_finite()) && shrink >= 4.0,
        format!(
            "sums {:.6} / {:.6} / {:.6}, increments {d1:.6} then {d2:.6}, shrink {shrink:.2}× (need ≥ 4); \
             closed-form path matches exact cells at H=16: {agree}",
            sums[0], sums[1], sums[2]
        ),
    )
}

// 7 -------------------------------------------------------------------------

fn covering_csv() -> (Option<f64>, Vec<smallforms::ubiquity::Covering>, Vec<u8>) {
    let s = veronese(2, 1);
    let c = UbiquityConfig::for_system(&s);
    let (lo, hi) = (c.omega_lo.clone(), c.omega_hi.clone());
    let cal = calibrate_eta(&s, &c, &[6, 7, 8], 3, ETA_EXPONENTS, (&lo, &hi), 0, 0).unwrap();
    let mut csv = Vec::new();
    io::write_coverings(&mut csv, &cal.table).unwrap();
    (cal.eta, cal.table, csv)
}

fn criterion_7() -> (bool, String) {
    let start = Instant::now();
    let (eta, table, _) = covering_csv();
    let secs = start.elapsed().as_secs_f64();
    let at = |eta: f64| -> Vec<f64> { table.iter().filter(|r| r.eta == eta).map(|r| r.fraction).collect() };
    let best_narrow = (-4..=4)
        .rev()
        .map(|e| f64::from(e).exp2())
        .find(|&e| at(e).iter().all(|&f| f >= 0.25));
    match eta {
        Some(e) => {
            let f = at(e);
            (
                f.iter().all(|&v| v >= 0.25) && secs < 300.0,
                format!(
                    "η = 2^{}: fractions {:.4} / {:.4} / {:.4} at t = 6/7/8; within 2^-4..2^4 passing η: {best_narrow:?}; {secs:.1}s",
                    e.log2(),
                    f[0],
                    f[1],
                    f[2]
                ),
            )
        }
        None => (false, format!("no η reaches 0.25 on t = 6, 7, 8; {secs:.1}s")),
    }
}

// 8 -------------------------------------------------------------------------

fn criterion_8() -> (bool, String) {
    let mut report = Vec::new();
    let mut failures = 0usize;
    for (n, m) in [(1usize, 1usize), (2, 1), (2, 2), (3, 1), (3, 2)] {
        let s = veronese(n, m);
        let c = UbiquityConfig::for_system(&s);
        let psi = ApproxFunction::power_law(1.0, (n + 1 - m) as f64 / m as f64).unwrap();
        let points = resonant_points(&s, &c, 8).unwrap();
        let bad: usize = points
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                (0..10u64)
                    .filter(|&k| match random_offset(p, &psi, &c, 8, i as u64 * 10 + k) {
                        Ok(Some(x)) => !mvt_inclusion_check(&x, p, &psi, &s, &c).is_ok_and(|v| v.holds),
                        _ => true,
                    })
                    .count()
            })
            .sum();
        failures += bad;
        report.push(format!("(n={n}, m={m}): {} points", points.len()));
    }
    (failures == 0, format!("{}; 10 offsets each, {failures} failures", report.join(", ")))
}

// 9 -------------------------------------------------------------------------

fn criterion_9() -> (bool, String) {
    let dim = dimension_lower_bound(2, 1, 1, 3.0).unwrap();
    let s = veronese(2, 1);
    let c = UbiquityConfig::for_system(&s);
    let psi = ApproxFunction::power_law(1.0, 2.0).unwrap();
    let g = DimensionFunction::power(1.0).unwrap();
    let reg = regularity_and_condensation(&c, &psi, &g, 20).unwrap();
    let ratio_ok = reg.ratio_exponent == (-3, 1) && reg.ratios.iter().all(|&r| r == 0.125) && reg.ratio() == 0.125;
    let s22 = veronese(2, 2);
    let reg22 = regularity_and_condensation(&UbiquityConfig::for_system(&s22), &psi, &g, 5).unwrap();
    let theta = ThetaTuple::new(vec![vec![0.0625, 0.5, 8.0]]).unwrap().diagnostics();
    let pass = dim == 0.75 && ratio_ok && reg22.ratio_exponent == (-3, 2) && theta.theta_hat_bound == Some(0.25);
    (
        pass,
        format!(
            "dimension {dim}, ratio {} (exponent {:?}; m=2 exponent {:?}), θ̂ bound {:?}",
            reg.ratio(),
            reg.ratio_exponent,
            reg22.ratio_exponent,
            theta.theta_hat_bound
        ),
    )
}

// 10 ------------------------------------------------------------------------

fn criterion_10() -> (bool, String) {
    let (_, _, a1) = backend_csv();
    let (_, _, b1) = backend_csv();
    let dich = || {
        let (conv, div, _) = dichotomy_tables();
        let mut out = Vec::new();
        io::write_dichotomy(&mut out, &conv).unwrap();
        io::write_dichotomy(&mut out, &div).unwrap();
        out
    };
    let (a4, b4) = (dich(), dich());
    let (_, _, a7) = covering_csv();
    let (_, _, b7) = covering_csv();
    let same = [a1 == b1, a4 == b4, a7 == b7];
    (
        same.iter().all(|&b| b),
        format!(
            "identical CSV bytes: criterion 1 {} ({} bytes), criterion 4 {} ({} bytes), criterion 7 {} ({} bytes)",
            same[0],
            a1.len(),
            same[1],
            a4.len(),
            same[2],
            a7.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> (bool, String)); 10] = [
        (1, "backend oracle equivalence", criterion_1),
        (2, "Dirichlet witness existence", criterion_2),
        (3, "Khintchine threshold sweep", criterion_3),
        (4, "dichotomy trend", criterion_4),
        (5, "cell bounds", criterion_5),
        (6, "Borel-Cantelli increments", criterion_6),
        (7, "ubiquity covering", criterion_7),
        (8, "inclusion check", criterion_8),
        (9, "closed-form spot values", criterion_9),
        (10, "determinism", criterion_10),
    ];
    let only: Vec<u32> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut outcomes = Vec::new();
    for (id, title, run) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = run();
        let o = Outcome { id, title, pass, detail, elapsed: start.elapsed() };
        println!(
            "criterion {:>2} {:<30} {}  [{:.1}s] {}",
            o.id,
            o.title,
            if o.pass { "PASS" } else { "FAIL" },
            o.elapsed.as_secs_f64(),
            o.detail
        );
        outcomes.push(o);
    }
    let unexpected: Vec<u32> = outcomes.iter().filter(|o| !o.pass && !KNOWN_FAILING.contains(&o.id)).map(|o| o.id).collect();
    let stale: Vec<u32> = outcomes.iter().filter(|o| o.pass && KNOWN_FAILING.contains(&o.id)).map(|o| o.id).collect();
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} criteria pass; known failing {KNOWN_FAILING:?}", outcomes.len());
    if !unexpected.is_empty() || !stale.is_empty() {
        println!("acceptance: unexpected failures {unexpected:?}, unexpectedly passing {stale:?}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
