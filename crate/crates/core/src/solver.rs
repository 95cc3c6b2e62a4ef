//! Integer coefficient vectors giving simultaneously small form values.
//!
//! Two backends: an exhaustive scan of the coefficient box (the oracle) and a
//! per-dyadic-block lattice reduction followed by bounded enumeration. Both
//! decide the final strict inequality `max_j |F_j(x_j)| < Ψ(H)` exactly.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::ApproxFunction;
use crate::curves::SystemMap;
use crate::error::{invalid, Error, Result};
use crate::exact::{cmp_abs_ratio, from_f64, int, to_f64, CompensatedSum, Point, Rational};
use crate::lattice::{combine, enumerate_short, lll};

/// Nonzero integer coefficient vector in canonical sign (first nonzero entry
/// positive).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Form {
    coeffs: Vec<i64>,
}

impl Form {
    /// Canonicalizes the sign; rejects the zero vector.
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self> {
        let Some(first) = coeffs.iter().find(|&&c| c != 0) else {
            return invalid("the zero vector is not a form");
        };
        if coeffs.iter().any(|&c| c == i64::MIN) {
            return invalid("coefficient out of range");
        }
        if *first < 0 {
            for c in &mut coeffs {
                *c = -*c;
            }
        }
        Ok(Form { coeffs })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn height(&self) -> u64 {
        self.coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// Dyadic block `t` with `2^t ≤ H < 2^{t+1}`.
    pub fn block(&self) -> u32 {
        63 - self.height().leading_zeros()
    }

    fn sort_key(&self) -> (u64, &[i64]) {
        (self.height(), &self.coeffs)
    }
}

/// Size of the coefficient box `[−h, h]^{n+1}`, if it fits in a `u64`.
pub fn coefficient_box_size(n: usize, h: u64) -> Option<u64> {
    (2 * h).checked_add(1)?.checked_pow(n as u32 + 1)
}

/// The `index`-th vector of `[−h, h]^{n+1}` (first coordinate fastest) when
/// it is a canonical form; `None` for the zero vector and negated forms.
pub fn canonical_form_at(n: usize, h: u64, index: u64) -> Option<Form> {
    let side = 2 * h + 1;
    let mut r = index;
    let mut coeffs = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        coeffs.push((r % side) as i64 - h as i64);
        r /= side;
    }
    match coeffs.iter().find(|&&c| c != 0) {
        Some(&first) if first > 0 => Some(Form { coeffs }),
        _ => None,
    }
}

/// Sort order used for every solution list: height, then coefficients.
pub fn form_order(a: &Form, b: &Form) -> Ordering {
    a.sort_key().cmp(&b.sort_key())
}

/// Exact and floating values of `f_{j,k}^{(i)}(x_j)` at one point.
#[derive(Debug, Clone)]
pub struct PointData {
    pub n: usize,
    pub m: usize,
    /// `num[j][k] / den[j] = f_{j,k}(x_j)`.
    num: Vec<Vec<BigInt>>,
    den: Vec<BigInt>,
    /// `deriv[i][j][k] = f_{j,k}^{(i)}(x_j)` for `i ≤ n`.
    deriv: Vec<Vec<Vec<f64>>>,
    abs_sum: Vec<f64>,
}

impl PointData {
    pub fn new(system: &SystemMap, x: &Point) -> Result<Self> {
        let ys = system.evaluate_system_matrix(x, system.n())?;
        let (n, m) = (system.n(), system.m());
        let mut num = Vec::with_capacity(m);
        let mut den = Vec::with_capacity(m);
        for row in &ys[0] {
            let d = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            num.push(row.iter().map(|q| q.numer() * (&d / q.denom())).collect());
            den.push(d);
        }
        let deriv: Vec<Vec<Vec<f64>>> = ys
            .iter()
            .map(|y| y.iter().map(|row| row.iter().map(to_f64).collect()).collect())
            .collect();
        let abs_sum = deriv[0].iter().map(|row| row.iter().map(|v| v.abs()).sum()).collect();
        Ok(PointData { n, m, num, den, deriv, abs_sum })
    }

    pub fn values(&self, j: usize) -> &[f64] {
        &self.deriv[0][j]
    }

    /// `f_{j,k}(x_j)` exactly.
    pub fn exact(&self, j: usize, k: usize) -> Rational {
        Rational::new(self.num[j][k].clone(), self.den[j].clone())
    }

    /// Numerator of `F_j(x_j)` over the common denominator `den[j]`.
    fn numerator(&self, j: usize, a: &[i64]) -> BigInt {
        self.num[j].iter().zip(a).filter(|(_, &c)| c != 0).map(|(v, &c)| v * c).sum()
    }

    /// Exact `F_j(x_j)`.
    pub fn form_value(&self, j: usize, a: &[i64]) -> Rational {
        Rational::new(self.numerator(j, a), self.den[j].clone())
    }

    /// `max_j |F_j(x_j)| < bound`, decided exactly.
    pub fn strictly_below(&self, a: &[i64], bound: f64) -> bool {
        (0..self.m).all(|j| cmp_abs_ratio(&self.numerator(j, a), &self.den[j], bound) == Ordering::Less)
    }

    fn approx_value(&self, order: usize, j: usize, a: &[i64]) -> f64 {
        let mut acc = CompensatedSum::new();
        for (v, &c) in self.deriv[order][j].iter().zip(a) {
            acc.add(v * c as f64);
        }
        acc.value()
    }

    /// Bound on the rounding error of the `f64` form value for heights up to
    /// `h`.
    fn rounding_slack(&self, j: usize, h: u64) -> f64 {
        8.0 * (self.n as f64 + 2.0) * f64::EPSILON * h as f64 * self.abs_sum[j] + f64::MIN_POSITIVE
    }

    fn record(&self, form: Form, x: &Point) -> SolutionRecord {
        let a = form.coeffs();
        let residuals = (0..self.m).map(|j| to_f64(&self.form_value(j, a).abs())).collect();
        let derivative_profile = (0..self.m)
            .map(|j| (0..=self.n).map(|i| self.approx_value(i, j, a).abs()).collect())
            .collect();
        let block = form.block();
        SolutionRecord { form, point: x.clone(), residuals, derivative_profile, block }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    pub form: Form,
    pub point: Point,
    /// `|F_j(x_j)|` rounded from the exact value.
    pub residuals: Vec<f64>,
    /// `derivative_profile[j][i] = |F_j^{(i)}(x_j)|` for `i ≤ n`.
    pub derivative_profile: Vec<Vec<f64>>,
    pub block: u32,
}

impl SolutionRecord {
    pub fn height(&self) -> u64 {
        self.form.height()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Exhaustive,
    #[default]
    Lattice,
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Backend::Exhaustive),
            "lattice" => Ok(Backend::Lattice),
            other => invalid(format!("unknown backend {other:?} (expected exhaustive or lattice)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub backend: Backend,
    pub h_max: u64,
    /// Replaces the per-block scale `Ψ(2^t)` of the lattice backend.
    pub epsilon: Option<f64>,
    pub lll_delta: f64,
    /// Slack on the enumeration radius.
    pub radius_multiplier: f64,
    /// Largest coefficient box the exhaustive backend accepts.
    pub work_limit: u128,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            backend: Backend::Lattice,
            h_max: 32,
            epsilon: None,
            lll_delta: 0.99,
            radius_multiplier: 1.05,
            work_limit: 1_000_000_000,
        }
    }
}

impl SolverConfig {
    pub fn exhaustive(h_max: u64) -> Self {
        SolverConfig { backend: Backend::Exhaustive, h_max, ..Self::default() }
    }

    pub fn lattice(h_max: u64) -> Self {
        SolverConfig { backend: Backend::Lattice, h_max, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.h_max < 1 {
            return invalid("H_max must be at least 1");
        }
        if self.h_max > 1 << 40 {
            return invalid("H_max above 2^40 is not supported");
        }
        if !(self.lll_delta > 0.25 && self.lll_delta < 1.0) {
            return invalid(format!("LLL parameter must lie in (1/4, 1), got {}", self.lll_delta));
        }
        if !(self.radius_multiplier >= 1.0 && self.radius_multiplier.is_finite()) {
            return invalid("the radius multiplier must be at least 1");
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return invalid("the ε override must be positive");
            }
        }
        Ok(())
    }
}

/// `F_j^{(i)}(x_j)` for `i ≤ max_order`, exact.
pub fn evaluate_form(form: &Form, system: &SystemMap, x: &Point, max_order: usize) -> Result<Vec<Vec<Rational>>> {
    if form.coeffs().len() != system.n() + 1 {
        return invalid(format!("form has {} coefficients, system needs {}", form.coeffs().len(), system.n() + 1));
    }
    let ys = system.evaluate_system_matrix(x, max_order)?;
    Ok((0..system.m())
        .map(|j| {
            (0..=max_order)
                .map(|i| {
                    ys[i][j]
                        .iter()
                        .zip(form.coeffs())
                        .map(|(v, &c)| v * int(c))
                        .sum()
                })
                .collect()
        })
        .collect())
}

/// All canonical forms with `1 ≤ H ≤ H_max` and `max_j |F_j(x_j)| < Ψ(H)`,
/// sorted by height then coefficients.
pub fn enumerate_solutions(
    system: &SystemMap,
    x: &Point,
    psi: &ApproxFunction,
    config: &SolverConfig,
) -> Result<Vec<SolutionRecord>> {
    config.validate()?;
    let data = PointData::new(system, x)?;
    let psi_table = psi.table_up_to(config.h_max)?;
    let forms = match config.backend {
        Backend::Exhaustive => exhaustive(&data, &psi_table, config)?,
        Backend::Lattice => {
            if !psi.is_monotone() {
                return invalid("the lattice backend needs a monotone Ψ");
            }
            lattice_search(&data, &psi_table, config)?
        }
    };
    Ok(forms.into_iter().map(|f| data.record(f, x)).collect())
}

fn box_size(n: usize, h: u64) -> u128 {
    let side = 2 * u128::from(h) + 1;
    side.checked_pow(n as u32 + 1).map_or(u128::MAX, |v| v / 2)
}

/// Exhaustive scan. Only tails `(a_1..a_n)` whose first nonzero entry is
/// positive are visited; the sign of `a_0` then fixes the canonical
/// representative.
fn exhaustive(data: &PointData, psi: &[f64], config: &SolverConfig) -> Result<Vec<Form>> {
    let h = config.h_max;
    let requested = box_size(data.n, h);
    if requested > config.work_limit {
        return Err(Error::WorkLimit { requested, limit: config.work_limit });
    }
    // suffix maxima: largest Ψ at heights ≥ h
    let mut psi_hi = vec![0.0f64; psi.len() + 1];
    for k in (1..psi.len()).rev() {
        psi_hi[k] = psi_hi[k + 1].max(psi[k]);
    }
    let n = data.n;
    let hi = h as i64;
    let pivot = (0..data.m)
        .filter(|&j| data.values(j)[0] != 0.0)
        .max_by(|&a, &b| data.values(a)[0].abs().total_cmp(&data.values(b)[0].abs()));
    let slack: Vec<f64> = (0..data.m).map(|j| data.rounding_slack(j, h)).collect();

    let mut found: Vec<Form> = (1..=hi)
        .filter(|&a0| {
            let mut a = vec![0i64; n + 1];
            a[0] = a0;
            passes(data, &a, psi[a0 as usize], &slack)
        })
        .map(|a0| {
            let mut a = vec![0i64; n + 1];
            a[0] = a0;
            Form { coeffs: a }
        })
        .collect();

    let per_first: Vec<Vec<Form>> = (0..=hi)
        .into_par_iter()
        .map(|a1| {
            let mut out = Vec::new();
            let mut tail = vec![0i64; n];
            tail[0] = a1;
            scan_tails(data, psi, &psi_hi, &slack, pivot, hi, &mut tail, 1, a1 > 0, &mut out);
            out
        })
        .collect();
    found.extend(per_first.into_iter().flatten());
    found.sort_by(form_order);
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn scan_tails(
    data: &PointData,
    psi: &[f64],
    psi_hi: &[f64],
    slack: &[f64],
    pivot: Option<usize>,
    hi: i64,
    tail: &mut Vec<i64>,
    pos: usize,
    positive: bool,
    out: &mut Vec<Form>,
) {
    if pos == tail.len() {
        if positive {
            scan_constant(data, psi, psi_hi, slack, pivot, hi, tail, out);
        }
        return;
    }
    let start = if positive { -hi } else { 0 };
    for v in start..=hi {
        tail[pos] = v;
        scan_tails(data, psi, psi_hi, slack, pivot, hi, tail, pos + 1, positive || v > 0, out);
    }
    tail[pos] = 0;
}

#[allow(clippy::too_many_arguments)]
fn scan_constant(
    data: &PointData,
    psi: &[f64],
    psi_hi: &[f64],
    slack: &[f64],
    pivot: Option<usize>,
    hi: i64,
    tail: &[i64],
    out: &mut Vec<Form>,
) {
    let tail_h = tail.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0) as usize;
    let bound = psi_hi[tail_h.max(1)];
    if bound <= 0.0 {
        return;
    }
    let (lo0, hi0) = match pivot {
        Some(j) => {
            let vals = data.values(j);
            let r: f64 = vals[1..].iter().zip(tail).map(|(v, &c)| v * c as f64).sum();
            let f0 = vals[0];
            let w = bound + slack[j];
            let (p, q) = ((-r - w) / f0, (-r + w) / f0);
            let (p, q) = if p <= q { (p, q) } else { (q, p) };
            if q < -(hi as f64) - 1.0 || p > hi as f64 + 1.0 {
                return;
            }
            ((p.floor() as i64).max(-hi), (q.ceil() as i64).min(hi))
        }
        None => (-hi, hi),
    };
    let mut a = Vec::with_capacity(tail.len() + 1);
    a.push(0);
    a.extend_from_slice(tail);
    for a0 in lo0..=hi0 {
        a[0] = a0;
        let hgt = tail_h.max(a0.unsigned_abs() as usize);
        if passes(data, &a, psi[hgt], slack) {
            let coeffs = if a0 < 0 { a.iter().map(|c| -c).collect() } else { a.clone() };
            out.push(Form { coeffs });
        }
    }
}

/// Floating prefilter then exact decision of `max_j |F_j| < bound`.
fn passes(data: &PointData, a: &[i64], bound: f64, slack: &[f64]) -> bool {
    if bound <= 0.0 {
        return false;
    }
    for j in 0..data.m {
        let v: f64 = data.values(j).iter().zip(a).map(|(f, &c)| f * c as f64).sum();
        if v.abs() >= bound + slack[j] {
            return false;
        }
    }
    data.strictly_below(a, bound)
}

/// Lattice backend over the dyadic blocks `2^t ≤ H < 2^{t+1}` up to `H_max`.
fn lattice_search(data: &PointData, psi: &[f64], config: &SolverConfig) -> Result<Vec<Form>> {
    let h_max = config.h_max;
    let blocks: Vec<u32> = (0..64).take_while(|&t| (1u64 << t) <= h_max).collect();
    let per_block: Vec<Vec<Form>> = blocks
        .par_iter()
        .map(|&t| {
            let lo = 1u64 << t;
            let hi = ((1u64 << (t + 1)) - 1).min(h_max);
            // Ψ is non-increasing, so the block maximum sits at its left end
            let scale = config.epsilon.unwrap_or(psi[lo as usize]);
            if psi[lo as usize] <= 0.0 {
                return Ok(Vec::new());
            }
            let mut out = Vec::new();
            block_candidates(data, scale, hi, config, |a| {
                let form = match Form::new(a.to_vec()) {
                    Ok(f) => f,
                    Err(_) => return ControlFlow::Continue(()),
                };
                let h = form.height();
                if a == form.coeffs() && (lo..=hi).contains(&h) && data.strictly_below(a, psi[h as usize]) {
                    out.push(form);
                }
                ControlFlow::Continue(())
            })?;
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let set: BTreeSet<Form> = per_block.into_iter().flatten().collect();
    let mut forms: Vec<Form> = set.into_iter().collect();
    forms.sort_by(form_order);
    Ok(forms)
}

/// Runs `visit` on every integer vector `a` whose image
/// `(F_1/ε, …, F_m/ε, a_0/S, …, a_n/S)` lies in the Euclidean ball of
/// squared radius `(m + n + 1)·multiplier`. That ball contains the unit
/// sup-norm cube, so every `a` with `|F_j| < ε` and `|a|_∞ ≤ S` is visited.
pub(crate) fn block_candidates<F>(data: &PointData, eps: f64, s: u64, config: &SolverConfig, mut visit: F) -> Result<()>
where
    F: FnMut(&[i64]) -> ControlFlow<()>,
{
    let (n, m) = (data.n, data.m);
    let dim = m + n + 1;
    let eps_q = from_f64(eps)?;
    let s_q = Rational::from_integer(BigInt::from(s));
    let exact_rows: Vec<Vec<Rational>> = (0..=n)
        .map(|k| {
            let mut row: Vec<Rational> = (0..m).map(|j| data.exact(j, k) / &eps_q).collect();
            row.extend((0..=n).map(|i| if i == k { s_q.recip() } else { Rational::zero() }));
            row
        })
        .collect();
    let mut transform: Vec<Vec<i64>> = (0..=n).map(|i| (0..=n).map(|j| i64::from(i == j)).collect()).collect();
    let mut rows: Vec<Vec<f64>> = exact_rows.iter().map(|r| r.iter().map(to_f64).collect()).collect();
    for _ in 0..4 {
        let red = lll(&rows, config.lll_delta);
        let identity = red
            .transform
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().enumerate().all(|(j, &v)| v == i64::from(i == j)));
        transform = compose(&red.transform, &transform)?;
        rows = transform
            .iter()
            .map(|t| {
                (0..dim)
                    .map(|c| {
                        let v: Rational = t
                            .iter()
                            .zip(&exact_rows)
                            .filter(|(&ti, _)| ti != 0)
                            .map(|(&ti, r)| &r[c] * int(ti))
                            .sum();
                        to_f64(&v)
                    })
                    .collect()
            })
            .collect();
        if identity {
            break;
        }
    }
    let radius_sq = dim as f64 * config.radius_multiplier;
    enumerate_short(&rows, radius_sq, |y| visit(&combine(y, &transform)));
    Ok(())
}

fn compose(a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = b.len();
    a.iter()
        .map(|row| {
            (0..n)
                .map(|c| {
                    row.iter().zip(b).try_fold(0i64, |acc, (&x, r)| {
                        x.checked_mul(r[c]).and_then(|p| acc.checked_add(p))
                    })
                })
                .collect::<Option<Vec<i64>>>()
                .ok_or_else(|| Error::Invariant("lattice transform overflowed i64".into()))
        })
        .collect()
}

/// Result of the pigeonhole search at one block.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletWitness {
    pub record: SolutionRecord,
    /// `C · 2^{−(n+1−m)t/m}`.
    pub value_bound: f64,
    /// `⌊δ₀ 2^t⌋`.
    pub height_bound: u64,
    pub constant: f64,
}

/// `C = 4(n+1)·M·δ₀^{−(n+1−m)/m}` with the certified `M` of the system.
pub fn dirichlet_constant(system: &SystemMap, delta0: f64) -> f64 {
    let (n, m) = (system.n() as f64, system.m() as f64);
    4.0 * (n + 1.0) * to_f64(system.derivative_bound()) * delta0.powf(-(n + 1.0 - m) / m)
}

/// `((n+1)·M)^{−1}`.
pub fn default_delta0(system: &SystemMap) -> f64 {
    1.0 / ((system.n() as f64 + 1.0) * to_f64(system.derivative_bound()))
}

/// A nonzero `a` with `|a|_∞ ≤ δ₀2^t` and `max_j |F_j(x_j)| < C·2^{−(n+1−m)t/m}`;
/// the smallest by height then coefficients.
pub fn dirichlet_witness(system: &SystemMap, x: &Point, t: u32, delta0: f64) -> Result<DirichletWitness> {
    if t < 1 || t > 40 {
        return invalid(format!("t must lie in 1..=40, got {t}"));
    }
    if !(delta0 > 0.0 && delta0 <= 1.0) {
        return invalid(format!("δ₀ must lie in (0, 1], got {delta0}"));
    }
    let data = PointData::new(system, x)?;
    let (n, m) = (system.n() as f64, system.m() as f64);
    let constant = dirichlet_constant(system, delta0);
    let value_bound = constant * 2f64.powf(-(n + 1.0 - m) * f64::from(t) / m);
    let height_bound = (delta0 * 2f64.powi(t as i32)).floor() as u64;
    let no_witness = || Error::NoWitness { t, constant, value_bound, height_bound };
    if height_bound < 1 {
        return Err(no_witness());
    }
    let mut best: Option<Form> = None;
    let config = SolverConfig::default();
    block_candidates(&data, value_bound, height_bound, &config, |a| {
        let Ok(form) = Form::new(a.to_vec()) else {
            return ControlFlow::Continue(());
        };
        if form.height() <= height_bound
            && best.as_ref().is_none_or(|b| form_order(&form, b) == Ordering::Less)
            && data.strictly_below(form.coeffs(), value_bound)
        {
            best = Some(form);
        }
        ControlFlow::Continue(())
    })?;
    let form = best.ok_or_else(no_witness)?;
    Ok(DirichletWitness { record: data.record(form, x), value_bound, height_bound, constant })
}

/// Per-block solution counts with the heuristic `Σ H^{n−m} Ψ(H)^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockCount {
    pub t: u32,
    pub count: u64,
    pub heuristic: f64,
}

/// `Σ_{2^t ≤ H < 2^{t+1}} H^{n−m} Ψ(H)^m`.
pub fn block_heuristic(psi: &ApproxFunction, n: usize, m: usize, t: u32) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for h in (1u64 << t)..(1u64 << (t + 1)) {
        acc.add((h as f64).powi((n - m) as i32) * psi.evaluate(h)?.powi(m as i32));
    }
    Ok(acc.value())
}

pub fn count_by_dyadic_block(
    system: &SystemMap,
    x: &Point,
    psi: &ApproxFunction,
    t_max: u32,
    config: &SolverConfig,
) -> Result<Vec<BlockCount>> {
    if t_max > 39 {
        return invalid("t_max above 39 is not supported");
    }
    let config = SolverConfig { h_max: (1u64 << (t_max + 1)) - 1, ..config.clone() };
    let sols = enumerate_solutions(system, x, psi, &config)?;
    (0..=t_max)
        .map(|t| {
            Ok(BlockCount {
                t,
                count: sols.iter().filter(|s| s.block == t).count() as u64,
                heuristic: block_heuristic(psi, system.n(), system.m(), t)?,
            })
        })
        .collect()
}

/// Exact `|F_j(x_j)|` for every `j`, for re-verification of records.
pub fn exact_residuals(system: &SystemMap, form: &Form, x: &Point) -> Result<Vec<Rational>> {
    Ok(evaluate_form(form, system, x, 0)?
        .into_iter()
        .map(|v| v[0].abs())
        .collect())
}
