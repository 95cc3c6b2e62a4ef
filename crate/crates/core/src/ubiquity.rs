//! Resonant root systems, local ubiquity covering, and the inclusion check
//! `Λ_R(Φ) ⊂ L(F, Ψ)`.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{ApproxFunction, DimensionFunction};
use crate::curves::SystemMap;
use crate::error::{invalid, Error, Result};
use crate::exact::{abs_lt, format_rational, from_f64, int, ratio, to_f64, CompensatedSum, Point, Rational};
use crate::measure::{form_poly, wilson_interval};
use crate::poly::Poly;
use crate::roots::{real_roots, RealRoot};
use crate::solver::{canonical_form_at, coefficient_box_size, Form};

/// Default root precision, about `10^{−30}`.
pub const ROOT_BITS: u32 = 100;
/// Residual bound `|F_j(γ_j)|` required at the refined approximation.
pub const ROOT_RESIDUAL: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq)]
pub struct UbiquityConfig {
    pub n: usize,
    pub m: usize,
    /// The box `Ω` (a sup-norm ball when all sides are equal).
    pub omega_lo: Vec<Rational>,
    pub omega_hi: Vec<Rational>,
    pub eta: f64,
    pub delta0: Rational,
    /// Covering target, `2^{−m−1}` by default.
    pub k0: f64,
    pub root_bits: u32,
    pub work_limit: u128,
}

impl UbiquityConfig {
    /// `Ω = U`, `η = 1`, `δ₀ = ((n+1)M)^{−1}`.
    pub fn for_system(system: &SystemMap) -> Self {
        let (lo, hi) = system
            .curves()
            .iter()
            .map(|c| {
                let (a, b) = c.interval();
                (a.clone(), b.clone())
            })
            .unzip();
        let m = system.m();
        UbiquityConfig {
            n: system.n(),
            m,
            omega_lo: lo,
            omega_hi: hi,
            eta: 1.0,
            delta0: Rational::from_integer(1.into()) / (int(system.n() as i64 + 1) * system.derivative_bound()),
            k0: 0.5f64.powi(m as i32 + 1),
            root_bits: ROOT_BITS,
            work_limit: 1_000_000_000,
        }
    }

    pub fn with_omega(mut self, lo: Vec<Rational>, hi: Vec<Rational>) -> Self {
        self.omega_lo = lo;
        self.omega_hi = hi;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_delta0(mut self, delta0: Rational) -> Self {
        self.delta0 = delta0;
        self
    }

    pub fn validate(&self, system: &SystemMap) -> Result<()> {
        if (self.n, self.m) != (system.n(), system.m()) {
            return invalid("configuration dimensions do not match the system");
        }
        if self.omega_lo.len() != self.m || self.omega_hi.len() != self.m {
            return invalid(format!("Ω must have dimension {}", self.m));
        }
        for ((c, lo), hi) in system.curves().iter().zip(&self.omega_lo).zip(&self.omega_hi) {
            if lo >= hi {
                return invalid("Ω has an empty side");
            }
            if !(c.contains(lo) && c.contains(hi)) {
                return Err(Error::OutsideDomain(format!("Ω side [{}, {}]", format_rational(lo), format_rational(hi))));
            }
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return invalid("η must be positive");
        }
        if !(self.delta0 > Rational::zero() && self.delta0 <= int(1)) {
            return invalid("δ₀ must lie in (0, 1]");
        }
        if !(self.k0 > 0.0 && self.k0 < 1.0) {
            return invalid("k₀ must lie in (0, 1)");
        }
        Ok(())
    }

    /// `ρ(r) = (2/η)·r^{−(n+1)/m}`.
    pub fn rho(&self, r: f64) -> f64 {
        2.0 / self.eta * r.powf(-((self.n + 1) as f64) / self.m as f64)
    }

    /// `ρ(2^t)`, exact for `m = 1` and dyadic `η`.
    pub fn rho_level(&self, t: u32) -> f64 {
        let e = -((self.n + 1) as f64) * t as f64 / self.m as f64;
        2.0 / self.eta * e.exp2()
    }

    /// `⌊δ₀·2^t⌋`.
    pub fn height_bound(&self, t: u32) -> u64 {
        let v = &self.delta0 * Rational::from_integer(num_bigint::BigInt::from(1u8) << t as usize);
        u64::try_from(v.floor().to_integer()).unwrap_or(u64::MAX)
    }

    pub fn omega_contains(&self, x: &Point) -> bool {
        x.dim() == self.m
            && x.coords().iter().zip(&self.omega_lo).zip(&self.omega_hi).all(|((v, lo), hi)| lo <= v && v <= hi)
    }
}

/// `R_α = (γ_1, …, γ_m)` for one form, with weight `β = H(F)/δ₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonantPoint {
    pub form: Form,
    pub roots: Vec<RealRoot>,
    pub beta: Rational,
    /// The level `t` it was built at; `β ≤ 2^t`.
    pub t: u32,
}

impl ResonantPoint {
    pub fn approx(&self) -> Vec<f64> {
        self.roots.iter().map(RealRoot::approx).collect()
    }

    pub fn to_record(&self) -> ResonantRecord {
        ResonantRecord {
            form: self.form.coeffs().to_vec(),
            intervals: self
                .roots
                .iter()
                .map(|r| (format_rational(&r.lo), format_rational(&r.hi)))
                .collect(),
            beta: format_rational(&self.beta),
            t: self.t,
        }
    }
}

/// JSON form of a resonant point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonantRecord {
    pub form: Vec<i64>,
    pub intervals: Vec<(String, String)>,
    pub beta: String,
    pub t: u32,
}

/// Roots of `p` in `[lo, hi]` refined until the midpoint residual is below
/// [`ROOT_RESIDUAL`].
fn certified_roots(p: &Poly, lo: &Rational, hi: &Rational, bits: u32) -> Result<Vec<RealRoot>> {
    let mut bits = bits;
    loop {
        let roots = real_roots(p, lo, hi, bits);
        if roots.iter().all(|r| abs_lt(&p.eval(&r.midpoint()), ROOT_RESIDUAL)) {
            return Ok(roots);
        }
        if bits > 1024 {
            return Err(Error::Invariant("root residual stays above 1e-30".into()));
        }
        bits += 32;
    }
}

/// `J(t)`: every root tuple in `Ω` of every canonical form with
/// `H(F) ≤ δ₀2^t`, in form order then root order.
pub fn resonant_points(system: &SystemMap, config: &UbiquityConfig, t: u32) -> Result<Vec<ResonantPoint>> {
    config.validate(system)?;
    if t > 62 {
        return invalid("level above 62 is not supported");
    }
    let h = config.height_bound(t);
    if h < 1 {
        return Err(Error::Precondition(format!("δ₀·2^{t} < 1, no forms at this level")));
    }
    let n = system.n();
    let total = coefficient_box_size(n, h).ok_or(Error::WorkLimit { requested: u128::MAX, limit: config.work_limit })?;
    if u128::from(total / 2) > config.work_limit {
        return Err(Error::WorkLimit { requested: u128::from(total / 2), limit: config.work_limit });
    }
    let per_form: Vec<Result<Vec<ResonantPoint>>> = (0..total)
        .into_par_iter()
        .filter_map(|i| canonical_form_at(n, h, i))
        .map(|form| {
            let mut per_coord = Vec::with_capacity(system.m());
            for j in 0..system.m() {
                let p = form_poly(&form, system, j);
                if p.is_zero() {
                    log::warn!("form {:?} vanishes on coordinate {j}; skipped", form.coeffs());
                    return Ok(Vec::new());
                }
                let roots = certified_roots(&p, &config.omega_lo[j], &config.omega_hi[j], config.root_bits)?;
                if roots.is_empty() {
                    return Ok(Vec::new());
                }
                per_coord.push(roots);
            }
            let beta = int(form.height() as i64) / &config.delta0;
            Ok(cartesian(&per_coord)
                .into_iter()
                .map(|roots| ResonantPoint { form: form.clone(), roots, beta: beta.clone(), t })
                .collect())
        })
        .collect();
    let mut out = Vec::new();
    for r in per_form {
        out.extend(r?);
    }
    Ok(out)
}

fn cartesian(lists: &[Vec<RealRoot>]) -> Vec<Vec<RealRoot>> {
    let mut acc: Vec<Vec<RealRoot>> = vec![Vec::new()];
    for list in lists {
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |r| {
                    let mut v = prefix.clone();
                    v.push(r.clone());
                    v
                })
            })
            .collect();
    }
    acc
}

/// Covered share of a box by `∪ B(R_α, ρ(2^t))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Covering {
    pub t: u32,
    pub eta: f64,
    pub rho: f64,
    pub points: usize,
    pub fraction: f64,
    /// 95% interval; degenerate for the exact one-dimensional path.
    pub ci: (f64, f64),
    pub exact: bool,
}

/// `λ_m(∪_{α∈J(t)} B(R_α, ρ(2^t)) ∩ B) / λ_m(B)`.
///
/// For `m = 1` the union is computed exactly from the isolating brackets,
/// covering only what every point of the bracket covers, so the fraction is
/// a certified lower bound. For `m ≥ 2` it is a seeded Monte Carlo estimate
/// with sup-norm distances to the bracket midpoints.
pub fn covering_fraction(
    points: &[ResonantPoint],
    config: &UbiquityConfig,
    t: u32,
    ball: (&[Rational], &[Rational]),
    samples: usize,
    seed: u64,
) -> Result<Covering> {
    let (lo, hi) = ball;
    if lo.len() != config.m || hi.len() != config.m || lo.iter().zip(hi).any(|(a, b)| a >= b) {
        return invalid("covering ball must be a nonempty box of dimension m");
    }
    let inside = lo
        .iter()
        .zip(hi)
        .zip(config.omega_lo.iter().zip(&config.omega_hi))
        .all(|((a, b), (olo, ohi))| olo <= a && b <= ohi);
    if !inside {
        return invalid("covering ball must lie inside Ω");
    }
    let rho = config.rho_level(t);
    let mut out = Covering { t, eta: config.eta, rho, points: points.len(), fraction: 0.0, ci: (0.0, 0.0), exact: config.m == 1 };
    if points.is_empty() {
        log::warn!("no resonant points at level {t}; covering fraction is 0");
        if config.m != 1 {
            out.ci = wilson_interval(0, samples as u64);
        }
        return Ok(out);
    }
    if config.m == 1 {
        let r = from_f64(rho)?;
        let mut intervals: Vec<(Rational, Rational)> = points
            .iter()
            .filter_map(|p| {
                let g = &p.roots[0];
                let a = (&g.hi - &r).max(lo[0].clone());
                let b = (&g.lo + &r).min(hi[0].clone());
                (a < b).then_some((a, b))
            })
            .collect();
        intervals.sort();
        let mut covered = Rational::zero();
        let mut current: Option<(Rational, Rational)> = None;
        for (a, b) in intervals {
            current = match current {
                Some((ca, cb)) if a <= cb => Some((ca, cb.max(b))),
                Some((ca, cb)) => {
                    covered += cb - ca;
                    Some((a, b))
                }
                None => Some((a, b)),
            };
        }
        if let Some((ca, cb)) = current {
            covered += cb - ca;
        }
        let fraction = to_f64(&(covered / (&hi[0] - &lo[0])));
        out.fraction = fraction;
        out.ci = (fraction, fraction);
        return Ok(out);
    }
    if samples == 0 {
        return invalid("Monte Carlo covering needs samples");
    }
    let mut centers: Vec<Vec<f64>> = points.iter().map(ResonantPoint::approx).collect();
    centers.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let (flo, fhi): (Vec<f64>, Vec<f64>) = (lo.iter().map(to_f64).collect(), hi.iter().map(to_f64).collect());
    let hits = (0..samples as u64)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let x: Vec<f64> = flo.iter().zip(&fhi).map(|(a, b)| a + (b - a) * rng.gen::<f64>()).collect();
            let start = centers.partition_point(|c| c[0] < x[0] - rho);
            centers[start..]
                .iter()
                .take_while(|c| c[0] <= x[0] + rho)
                .any(|c| c.iter().zip(&x).all(|(a, b)| (a - b).abs() <= rho))
        })
        .count() as u64;
    out.fraction = hits as f64 / samples as f64;
    out.ci = wilson_interval(hits, samples as u64);
    Ok(out)
}

/// Outcome of the inclusion check at one offset point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionVerdict {
    /// `max_j |F_j(x_j)| < Ψ(H(F))`, decided exactly.
    pub holds: bool,
    pub max_value: f64,
    pub psi_h: f64,
    /// `Φ(β) = Ψ(β)/β`.
    pub phi_beta: f64,
    /// `(n+1)·M·H·δ₀·Ψ(H)/H`.
    pub mvt_bound: f64,
    /// `(n+1)·M·H·Φ(β)`, the Mean Value estimate at the actual radius.
    pub mvt_bound_beta: f64,
}

/// Checks `|F_j(x_j)| < Ψ(H)` for `x` within `Φ(β)` of `R_α`.
pub fn mvt_inclusion_check(
    x: &Point,
    resonant: &ResonantPoint,
    psi: &ApproxFunction,
    system: &SystemMap,
    config: &UbiquityConfig,
) -> Result<InclusionVerdict> {
    if !config.omega_contains(x) {
        return Err(Error::OutsideDomain(x.to_string()));
    }
    let beta = to_f64(&resonant.beta);
    let phi_beta = psi.evaluate_real(beta)? / beta;
    // certified distance: the far end of each bracket
    for (v, r) in x.coords().iter().zip(&resonant.roots) {
        let far = (v - &r.lo).abs().max((v - &r.hi).abs());
        if !abs_lt(&far, phi_beta) {
            return Err(Error::Precondition(format!(
                "{x} is not within Φ(β) = {phi_beta:e} of the resonant point"
            )));
        }
    }
    let h = resonant.form.height();
    let psi_h = psi.evaluate(h)?;
    let mut holds = true;
    let mut max_value = 0.0f64;
    for (j, v) in x.coords().iter().enumerate() {
        let value = form_poly(&resonant.form, system, j).eval(v);
        holds &= abs_lt(&value, psi_h);
        max_value = max_value.max(to_f64(&value.abs()));
    }
    let scale = (config.n + 1) as f64 * to_f64(system.derivative_bound()) * h as f64;
    Ok(InclusionVerdict {
        holds,
        max_value,
        psi_h,
        phi_beta,
        mvt_bound: scale * to_f64(&config.delta0) * psi_h / h as f64,
        mvt_bound_beta: scale * phi_beta,
    })
}

/// A point at sup-distance `< Φ(β)` from `R_α` inside `Ω`, drawn from the
/// seeded stream `(seed, index)`; `None` when the bracket is too wide to
/// leave room for an offset.
pub fn random_offset(
    resonant: &ResonantPoint,
    psi: &ApproxFunction,
    config: &UbiquityConfig,
    seed: u64,
    index: u64,
) -> Result<Option<Point>> {
    let beta = to_f64(&resonant.beta);
    let phi = from_f64(psi.evaluate_real(beta)? / beta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut coords = Vec::with_capacity(resonant.roots.len());
    for (j, r) in resonant.roots.iter().enumerate() {
        let room = &phi - r.width();
        if room <= Rational::zero() {
            return Ok(None);
        }
        // u ∈ (−1, 1) on a 2^{-30} grid keeps the offset strictly inside
        let k: i64 = rng.gen_range(-(1i64 << 30) + 1..(1i64 << 30));
        let offset = &room * ratio(k, 1i64 << 30);
        let mut v = r.midpoint() + &offset;
        if v < config.omega_lo[j] || v > config.omega_hi[j] {
            v = r.midpoint() - &offset;
        }
        coords.push(v.max(config.omega_lo[j].clone()).min(config.omega_hi[j].clone()));
    }
    Ok(Some(Point::new(coords)))
}

/// Regularity of `ρ` and the two forms of the divergence sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    /// `log₂` of `ρ(2^{t+1})/ρ(2^t)`, as the exact fraction `(num, den)`.
    pub ratio_exponent: (i64, i64),
    /// `ρ(2^{t+1})/ρ(2^t)` evaluated for `t = 1, …, t_max − 1`.
    pub ratios: Vec<f64>,
    /// Partial sums `Σ_{t≤T} g̃(Φ(2^t))/ρ(2^t)^m`.
    pub lemma_sums: Vec<f64>,
    /// Partial sums `Σ_{t≤T} 2^{t(n+1)} g̃(Ψ(2^t)/2^t)`.
    pub condensed_sums: Vec<f64>,
    /// `(η/2)^m`, the per-term factor between the two.
    pub scale: f64,
}

impl RegularityReport {
    pub fn ratio(&self) -> f64 {
        (self.ratio_exponent.0 as f64 / self.ratio_exponent.1 as f64).exp2()
    }
}

/// `g` is taken as the reduced function `g̃` of the one-dimensional setting.
pub fn regularity_and_condensation(
    config: &UbiquityConfig,
    psi: &ApproxFunction,
    g: &DimensionFunction,
    t_max: u32,
) -> Result<RegularityReport> {
    if t_max < 2 {
        return invalid("t_max must be at least 2");
    }
    if t_max > 1000 {
        return invalid("t_max above 1000 is not supported");
    }
    let (n, m) = (config.n as i64, config.m as i64);
    let common = num_integer::gcd(n + 1, m);
    let ratio_exponent = (-(n + 1) / common, m / common);
    let ratios = (1..t_max).map(|t| config.rho_level(t + 1) / config.rho_level(t)).collect();
    let scale = (config.eta / 2.0).powi(m as i32);
    let mut lemma = CompensatedSum::new();
    let mut condensed = CompensatedSum::new();
    let mut lemma_sums = Vec::with_capacity(t_max as usize);
    let mut condensed_sums = Vec::with_capacity(t_max as usize);
    for t in 1..=t_max {
        let h = (t as f64).exp2();
        let phi = psi.evaluate_real(h)? / h;
        let gv = g.eval(phi);
        let a = gv / config.rho_level(t).powi(m as i32);
        let b = ((n + 1) as f64 * t as f64).exp2() * gv;
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Overflow { terms: t as u64 });
        }
        if (a - scale * b).abs() > 1e-9 * a.abs().max(scale * b.abs()) {
            return Err(Error::Invariant(format!("term {t}: {a:e} ≠ (η/2)^m·{b:e}")));
        }
        lemma.add(a);
        condensed.add(b);
        lemma_sums.push(lemma.value());
        condensed_sums.push(condensed.value());
    }
    Ok(RegularityReport { ratio_exponent, ratios, lemma_sums, condensed_sums, scale })
}

/// Result of the dyadic sweep over `η`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaCalibration {
    pub eta: Option<f64>,
    pub k0: f64,
    pub table: Vec<Covering>,
}

/// Dyadic exponents swept by default, `η ∈ {2^{−8}, …, 2^4}`.
pub const ETA_EXPONENTS: std::ops::RangeInclusive<i32> = -8..=4;

/// Picks the largest `η = 2^e`, `e ∈ exponents`, whose covering fraction
/// reaches `k₀` on `consecutive` consecutive levels of `levels`.
///
/// `ρ` shrinks as `η` grows, so the largest passing `η` is the tightest
/// radius for which the covering still holds.
pub fn calibrate_eta(
    system: &SystemMap,
    config: &UbiquityConfig,
    levels: &[u32],
    consecutive: usize,
    exponents: std::ops::RangeInclusive<i32>,
    ball: (&[Rational], &[Rational]),
    samples: usize,
    seed: u64,
) -> Result<EtaCalibration> {
    if consecutive == 0 || consecutive > levels.len() {
        return invalid("need 1 ≤ consecutive ≤ number of levels");
    }
    let etas: Vec<f64> = exponents.map(|e| f64::from(e).exp2()).collect();
    let sets: Vec<Vec<ResonantPoint>> = levels.iter().map(|&t| resonant_points(system, config, t)).collect::<Result<_>>()?;
    let mut table = Vec::new();
    let mut chosen = None;
    for &eta in &etas {
        let c = config.clone().with_eta(eta);
        let row: Vec<Covering> = levels
            .iter()
            .zip(&sets)
            .map(|(&t, pts)| covering_fraction(pts, &c, t, ball, samples, seed))
            .collect::<Result<_>>()?;
        let mut run = 0;
        let mut ok = false;
        for cov in &row {
            run = if cov.fraction >= config.k0 { run + 1 } else { 0 };
            ok |= run >= consecutive;
        }
        if ok {
            chosen = Some(eta);
        }
        table.extend(row);
    }
    Ok(EtaCalibration { eta: chosen, k0: config.k0, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::DimensionFunction;

    fn veronese(n: usize, m: usize) -> SystemMap {
        SystemMap::veronese(n, m, ratio(-1, 2), ratio(1, 2)).unwrap()
    }

    #[test]
    fn level_one_roots_for_lines() {
        let s = veronese(1, 1);
        let c = UbiquityConfig::for_system(&s).with_delta0(int(1));
        let pts = resonant_points(&s, &c, 1).unwrap();
        // a_0 + a_1 x with H ≤ 2 and root −a_0/a_1 ∈ [−1/2, 1/2]
        let mut oracle = Vec::new();
        for a0 in -2i64..=2 {
            for a1 in -2i64..=2 {
                let canonical = (a0 > 0) || (a0 == 0 && a1 > 0);
                if !canonical || a1 == 0 {
                    continue;
                }
                let r = ratio(-a0, a1);
                if r >= ratio(-1, 2) && r <= ratio(1, 2) {
                    oracle.push((vec![a0, a1], r));
                }
            }
        }
        let mut got: Vec<(Vec<i64>, Rational)> = pts
            .iter()
            .map(|p| {
                assert!(p.roots[0].is_exact());
                (p.form.coeffs().to_vec(), p.roots[0].lo.clone())
            })
            .collect();
        got.sort();
        oracle.sort();
        assert_eq!(got, oracle);
        assert!(got.contains(&(vec![1, 2], ratio(-1, 2))));
        assert!(pts.iter().all(|p| p.beta <= int(2)));
    }

    #[test]
    fn roots_are_certified() {
        let s = veronese(2, 1);
        let c = UbiquityConfig::for_system(&s);
        for p in resonant_points(&s, &c, 6).unwrap() {
            let f = form_poly(&p.form, &s, 0);
            let r = &p.roots[0];
            assert!(abs_lt(&f.eval(&r.midpoint()), 1e-30));
            if !r.is_exact() {
                let sf = f.squarefree();
                assert!(sf.eval(&r.lo).signum() * sf.eval(&r.hi).signum() < Rational::zero());
            }
        }
    }

    #[test]
    fn far_roots_contribute_nothing() {
        let s = veronese(2, 1);
        let f = Form::new(vec![-2, 0, 1]).unwrap();
        let p = form_poly(&f, &s, 0);
        assert!(real_roots(&p, &ratio(-1, 2), &ratio(1, 2), 64).is_empty());
    }

    #[test]
    fn product_of_root_lists() {
        let a = vec![RealRoot { lo: int(0), hi: int(0) }, RealRoot { lo: int(1), hi: int(1) }];
        let b: Vec<RealRoot> = (0..3).map(|k| RealRoot { lo: int(k), hi: int(k) }).collect();
        assert_eq!(cartesian(&[a, b]).len(), 6);
    }

    #[test]
    fn two_curves_give_tuples() {
        let s = veronese(2, 2);
        let c = UbiquityConfig::for_system(&s);
        let pts = resonant_points(&s, &c, 5).unwrap();
        assert!(!pts.is_empty());
        for p in &pts {
            assert_eq!(p.roots.len(), 2);
            for (j, r) in p.roots.iter().enumerate() {
                assert!(abs_lt(&form_poly(&p.form, &s, j).eval(&r.midpoint()), 1e-30));
            }
        }
    }

    #[test]
    fn covering_edge_cases() {
        let s = veronese(1, 1);
        let c = UbiquityConfig::for_system(&s).with_eta(1.0);
        let lo = [ratio(-1, 8)];
        let hi = [ratio(1, 8)];
        let empty = covering_fraction(&[], &c, 2, (&lo, &hi), 0, 0).unwrap();
        assert_eq!(empty.fraction, 0.0);
        let center = ResonantPoint { form: Form::new(vec![0, 1]).unwrap(), roots: vec![RealRoot { lo: int(0), hi: int(0) }], beta: int(1), t: 2 };
        // ρ(2^2) = 2·2^{−4} = 1/8 covers [−1/8, 1/8]
        let full = covering_fraction(&[center], &c, 2, (&lo, &hi), 0, 0).unwrap();
        assert_eq!(full.fraction, 1.0);
    }

    #[test]
    fn covering_monotone_in_eta_and_level() {
        let s = veronese(2, 1);
        let base = UbiquityConfig::for_system(&s);
        let (lo, hi) = (base.omega_lo.clone(), base.omega_hi.clone());
        let pts = resonant_points(&s, &base, 6).unwrap();
        let mut last = f64::INFINITY;
        for e in -4..=4 {
            let c = base.clone().with_eta(f64::from(e).exp2());
            let f = covering_fraction(&pts, &c, 6, (&lo, &hi), 0, 0).unwrap().fraction;
            assert!(f <= last);
            last = f;
        }
        // J(t) grows with t; compare at a fixed radius
        let c = base.clone().with_eta(0.25);
        let small = covering_fraction(&pts, &c, 6, (&lo, &hi), 0, 0).unwrap().fraction;
        let more = resonant_points(&s, &base, 7).unwrap();
        assert!(more.len() >= pts.len());
        let large = covering_fraction(&more, &c, 6, (&lo, &hi), 0, 0).unwrap().fraction;
        assert!(large >= small);
    }

    #[test]
    fn calibration_picks_largest_passing_eta() {
        let s = veronese(1, 1);
        let c = UbiquityConfig::for_system(&s);
        let (lo, hi) = (c.omega_lo.clone(), c.omega_hi.clone());
        let cal = calibrate_eta(&s, &c, &[4, 5, 6], 3, -4..=4, (&lo, &hi), 0, 0).unwrap();
        let eta = cal.eta.unwrap();
        let passes = |e: f64| cal.table.iter().filter(|r| r.eta == e).all(|r| r.fraction >= c.k0);
        assert!(passes(eta));
        assert!(cal.table.iter().filter(|r| r.eta > eta).any(|r| r.fraction < c.k0) || eta == 16.0);
    }

    #[test]
    fn monte_carlo_covering_agrees_with_exact_on_products() {
        // m = 2 box covered by the product of two exact 1-D unions would need
        // a tuple per pair; a single point covering the whole box is exact
        let s = veronese(2, 2);
        let c = UbiquityConfig::for_system(&s).with_eta(1.0);
        let p = ResonantPoint {
            form: Form::new(vec![0, 1, 0]).unwrap(),
            roots: vec![RealRoot { lo: int(0), hi: int(0) }; 2],
            beta: int(6),
            t: 1,
        };
        let lo = [ratio(-1, 8), ratio(-1, 8)];
        let hi = [ratio(1, 8), ratio(1, 8)];
        // ρ(2) = 2·2^{−3/2} ≈ 0.707 covers the box
        let cov = covering_fraction(&[p], &c, 1, (&lo, &hi), 500, 9).unwrap();
        assert_eq!(cov.fraction, 1.0);
    }

    #[test]
    fn inclusion_at_root_and_linear_example() {
        let s = veronese(1, 1);
        let c = UbiquityConfig::for_system(&s);
        let psi = ApproxFunction::power_law(1.0, 2.0).unwrap();
        let form = Form::new(vec![-1, 4]).unwrap();
        let root = RealRoot { lo: ratio(1, 4), hi: ratio(1, 4) };
        let beta = int(4) / &c.delta0;
        let p = ResonantPoint { form, roots: vec![root], beta: beta.clone(), t: 0 };
        let at_root = mvt_inclusion_check(&Point::new(vec![ratio(1, 4)]), &p, &psi, &s, &c).unwrap();
        assert!(at_root.holds && at_root.max_value == 0.0);
        let b = to_f64(&beta);
        let phi = b.powi(-2) / b;
        let x = Point::new(vec![ratio(1, 4) + from_f64(phi / 2.0).unwrap()]);
        let v = mvt_inclusion_check(&x, &p, &psi, &s, &c).unwrap();
        assert_eq!(v.phi_beta, phi);
        // |F(x)| = 4·Φ(β)/2, against Ψ(4) = 1/16
        assert_eq!(v.max_value, 2.0 * phi);
        assert_eq!(v.holds, 2.0 * phi < 1.0 / 16.0);
        let far = Point::new(vec![ratio(1, 4) + from_f64(phi).unwrap()]);
        assert!(matches!(mvt_inclusion_check(&far, &p, &psi, &s, &c), Err(Error::Precondition(_))));
        let outside = Point::new(vec![int(1)]);
        assert!(matches!(mvt_inclusion_check(&outside, &p, &psi, &s, &c), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn regularity_examples() {
        let s = veronese(2, 1);
        let c = UbiquityConfig::for_system(&s);
        let psi = ApproxFunction::power_law(1.0, 2.0).unwrap();
        let g = DimensionFunction::power(1.0).unwrap();
        let r = regularity_and_condensation(&c, &psi, &g, 20).unwrap();
        assert_eq!(r.ratio_exponent, (-3, 1));
        assert_eq!(r.ratio(), 0.125);
        assert!(r.ratios.iter().all(|&v| v == 0.125));
        for (t, v) in r.condensed_sums.iter().enumerate() {
            assert!((v - (t + 1) as f64).abs() < 1e-9);
        }
        let zero = regularity_and_condensation(&c, &ApproxFunction::zero(), &g, 5).unwrap();
        assert!(zero.lemma_sums.iter().all(|&v| v == 0.0));
        assert!(regularity_and_condensation(&c, &psi, &g, 1).is_err());
    }
}
