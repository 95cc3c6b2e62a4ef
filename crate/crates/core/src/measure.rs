//! Measures governed by the dichotomies: solution cells `σ_j(F)`,
//! Borel–Cantelli sums, Monte Carlo hit statistics, and the sets `A(G, θ)`.

use std::ops::ControlFlow;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::ApproxFunction;
use crate::curves::{determinant, SquareSystemMatrix, SystemMap};
use crate::error::{invalid, Error, Result};
use crate::exact::{abs_lt, format_rational, from_f64, int, to_f64, CompensatedSum, Point, Rational};
use crate::lattice::{combine, enumerate_short, lll};
use crate::poly::Poly;
use crate::roots::{real_roots, RealRoot};
use crate::solver::{block_heuristic, canonical_form_at, coefficient_box_size, count_by_dyadic_block, Form, SolverConfig};

/// Wilson score interval at 95% for `hits` out of `n`.
pub fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let nf = n as f64;
    let p = hits as f64 / nf;
    let denom = 1.0 + z * z / nf;
    let center = (p + z * z / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// A box `Π_j [lo_j, hi_j]` with a sample count and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRegion {
    pub lo: Vec<Rational>,
    pub hi: Vec<Rational>,
    pub samples: usize,
    pub seed: u64,
}

impl SampleRegion {
    pub fn new(lo: Vec<Rational>, hi: Vec<Rational>, samples: usize, seed: u64) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return invalid("region bounds must have matching nonzero dimension");
        }
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return invalid("region has zero volume");
        }
        Ok(SampleRegion { lo, hi, samples, seed })
    }

    /// The whole domain `U` of a system.
    pub fn of_system(system: &SystemMap, samples: usize, seed: u64) -> Self {
        let (lo, hi) = system
            .curves()
            .iter()
            .map(|c| {
                let (a, b) = c.interval();
                (a.clone(), b.clone())
            })
            .unzip();
        SampleRegion { lo, hi, samples, seed }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> Rational {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).fold(Rational::one(), |acc, w| acc * w)
    }

    pub fn check_inside(&self, system: &SystemMap) -> Result<()> {
        if self.dim() != system.m() {
            return invalid(format!("region has dimension {}, system has m = {}", self.dim(), system.m()));
        }
        for ((c, lo), hi) in system.curves().iter().zip(&self.lo).zip(&self.hi) {
            if !(c.contains(lo) && c.contains(hi)) {
                return Err(Error::OutsideDomain(format!(
                    "[{}, {}]",
                    format_rational(lo),
                    format_rational(hi)
                )));
            }
        }
        Ok(())
    }

    /// Sample `index`, drawn from its own stream of the seeded generator so
    /// any subset of indices can be produced independently.
    pub fn point(&self, index: u64) -> Point {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        Point::new(
            self.lo
                .iter()
                .zip(&self.hi)
                .map(|(lo, hi)| {
                    let u: f64 = rng.gen();
                    let (a, b) = (to_f64(lo), to_f64(hi));
                    let x = from_f64(a + (b - a) * u).unwrap_or_else(|_| lo.clone());
                    x.max(lo.clone()).min(hi.clone())
                })
                .collect(),
        )
    }
}

// ---------------------------------------------------------------------------
// θ-tuples and A(G, θ)

/// Positive bounds grouped per curve, `θ_{j,0}, …, θ_{j,ℓ_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaTuple {
    pub groups: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaReport {
    /// Geometric mean of all entries.
    pub theta: f64,
    pub theta_0: f64,
    pub theta_inf: f64,
    pub property_m: Vec<bool>,
    /// `max{θ₀/θ^{n+1}, 1/θ_∞}` when `θ ≤ 1` and every group has Property M.
    pub theta_hat_bound: Option<f64>,
}

impl ThetaTuple {
    pub fn new(groups: Vec<Vec<f64>>) -> Result<Self> {
        if groups.is_empty() || groups.iter().any(Vec::is_empty) {
            return invalid("θ needs at least one nonempty group");
        }
        if groups.iter().flatten().any(|&v| !(v > 0.0 && v.is_finite())) {
            return invalid("θ entries must be positive and finite");
        }
        Ok(ThetaTuple { groups })
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entries(&self) -> impl Iterator<Item = f64> + '_ {
        self.groups.iter().flatten().copied()
    }

    /// Some prefix of the group is `≤ 1` and the rest `≥ 1`.
    pub fn property_m(group: &[f64]) -> bool {
        (0..=group.len()).any(|s| group[..s].iter().all(|&v| v <= 1.0) && group[s..].iter().all(|&v| v >= 1.0))
    }

    pub fn diagnostics(&self) -> ThetaReport {
        let k = self.len() as f64;
        let product: f64 = self.entries().product();
        let log_mean = self.entries().map(f64::ln).sum::<f64>() / k;
        let theta = log_mean.exp();
        let theta_0 = self.groups.iter().map(|g| g[0]).fold(f64::INFINITY, f64::min);
        let theta_inf = self.groups.iter().map(|g| g[g.len() - 1]).fold(0.0, f64::max);
        let property_m: Vec<bool> = self.groups.iter().map(|g| ThetaTuple::property_m(g)).collect();
        let applicable = log_mean <= 0.0 && property_m.iter().all(|&b| b);
        // θ^{n+1} is the plain product; using it avoids a round trip through exp/ln
        let theta_hat_bound = applicable.then(|| (theta_0 / product).max(1.0 / theta_inf));
        ThetaReport { theta, theta_0, theta_inf, property_m, theta_hat_bound }
    }
}

/// Outcome of the search for `a ≠ 0` with `|(Ga)_i| ≤ θ_i` for all `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub witness: Option<Vec<i64>>,
    /// Cramer bound on `|a|_∞` for any solution.
    pub height_box: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MembershipConfig {
    /// `|det G|` below this is reported as degenerate.
    pub det_floor: f64,
    pub work_limit: u128,
}

impl Default for MembershipConfig {
    fn default() -> Self {
        MembershipConfig { det_floor: 1e-12, work_limit: 1_000_000_000 }
    }
}

/// Decides `x ∈ A(G, θ)` with the non-strict inequalities of the system.
///
/// Solutions are confined to `|a|_∞ ≤ max θ · k!·C₂^{k−1}/C₁` with
/// `C₁ = |det G|` and `C₂` the largest entry; the search itself runs on the
/// reduced lattice and stops at the first hit.
pub fn small_form_membership(g: &SquareSystemMatrix, tuple: &ThetaTuple, config: &MembershipConfig) -> Result<Membership> {
    let k = g.rows.len();
    if tuple.len() != k {
        return invalid(format!("θ has {} entries, G is {k}×{k}", tuple.len()));
    }
    let sizes: Vec<usize> = tuple.groups.iter().map(Vec::len).collect();
    let expected: Vec<usize> = g.ells.iter().map(|l| l + 1).collect();
    if sizes != expected {
        return invalid(format!("θ group sizes {sizes:?} do not match the row blocks {expected:?}"));
    }
    let det = determinant(g.rows.clone()).abs();
    let c1 = to_f64(&det);
    if !(c1 >= config.det_floor) || det.is_zero() {
        return Err(Error::Degenerate(format!("|det G| = {c1:e} at {}", g.point)));
    }
    let c2 = g.rows.iter().flatten().map(|e| to_f64(&e.abs())).fold(0.0, f64::max);
    let factorial: f64 = (1..=k).map(|v| v as f64).product();
    let theta_max = tuple.entries().fold(0.0, f64::max);
    let height_box = theta_max * factorial * c2.powi(k as i32 - 1) / c1;
    let side = 2.0 * height_box.floor() + 1.0;
    let requested = side.powi(k as i32) / 2.0;
    if !(requested <= config.work_limit as f64) {
        return Err(Error::WorkLimit {
            requested: if requested.is_finite() { requested as u128 } else { u128::MAX },
            limit: config.work_limit,
        });
    }
    if height_box < 1.0 {
        return Ok(Membership { member: false, witness: None, height_box });
    }
    let thetas: Vec<Rational> = tuple.entries().map(from_f64).collect::<Result<_>>()?;
    // column k of the lattice basis: a = e_k ↦ ((G e_k)_i / θ_i)_i
    let exact_rows: Vec<Vec<Rational>> = (0..k)
        .map(|col| (0..k).map(|i| &g.rows[i][col] / &thetas[i]).collect())
        .collect();
    let rows: Vec<Vec<f64>> = exact_rows.iter().map(|r| r.iter().map(to_f64).collect()).collect();
    let red = lll(&rows, 0.99);
    let mut witness = None;
    enumerate_short(&red.rows, k as f64 * 1.05, |y| {
        let a = combine(y, &red.transform);
        let ok = (0..k).all(|i| {
            let v: Rational = g.rows[i].iter().zip(&a).map(|(e, &c)| e * int(c)).sum();
            v.abs() <= thetas[i]
        });
        if ok {
            witness = Some(Form::new(a).map(|f| f.coeffs().to_vec()).unwrap_or_default());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(Membership { member: witness.is_some(), witness, height_box })
}

/// Monte Carlo estimate with its 95% Wilson interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub hits: u64,
    pub samples: u64,
    pub fraction: f64,
    pub ci: (f64, f64),
    pub volume: f64,
    pub estimate: f64,
    pub estimate_ci: (f64, f64),
    /// Sample indices whose evaluation failed (e.g. degenerate `G`).
    pub failures: Vec<u64>,
}

fn estimate(hits: u64, samples: u64, volume: f64, failures: Vec<u64>) -> MeasureEstimate {
    let fraction = if samples == 0 { 0.0 } else { hits as f64 / samples as f64 };
    let ci = wilson_interval(hits, samples);
    MeasureEstimate {
        hits,
        samples,
        fraction,
        ci,
        volume,
        estimate: fraction * volume,
        estimate_ci: (ci.0 * volume, ci.1 * volume),
        failures,
    }
}

/// Estimates `λ_m(A(G, θ) ∩ B)` by sampling `B`.
pub fn monte_carlo_measure(
    system: &SystemMap,
    ells: &[usize],
    tuple: &ThetaTuple,
    region: &SampleRegion,
    config: &MembershipConfig,
) -> Result<MeasureEstimate> {
    region.check_inside(system)?;
    let outcomes: Vec<Result<bool>> = (0..region.samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = region.point(i);
            let g = system.square_matrix(ells, &x)?;
            small_form_membership(&g, tuple, config).map(|r| r.member)
        })
        .collect();
    let mut hits = 0;
    let mut failures = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(true) => hits += 1,
            Ok(false) => {}
            Err(Error::WorkLimit { requested, limit }) => return Err(Error::WorkLimit { requested, limit }),
            Err(_) => failures.push(i as u64),
        }
    }
    let samples = region.samples as u64 - failures.len() as u64;
    Ok(estimate(hits, samples, to_f64(&region.volume()), failures))
}

// ---------------------------------------------------------------------------
// Solution cells

/// One maximal open interval of `{x : |F_j(x)| < Ψ(H)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    /// Brackets of the endpoints (exact when `lo == hi`).
    pub left: RealRoot,
    pub right: RealRoot,
    /// `inf |F'|` over the interval between the inner bracket edges; an
    /// upper estimate of the true infimum, exact when it is attained at a
    /// rational point.
    pub inf_derivative: Rational,
}

impl Cell {
    /// Upper bound of the length.
    pub fn length_upper(&self) -> Rational {
        &self.right.hi - &self.left.lo
    }

    pub fn length_lower(&self) -> Rational {
        &self.right.lo - &self.left.hi
    }

    pub fn length(&self) -> f64 {
        to_f64(&(self.right.midpoint() - self.left.midpoint()))
    }

    /// A rational point strictly inside the cell.
    pub fn interior_point(&self) -> Rational {
        (&self.left.hi + &self.right.lo) / int(2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellDecomposition {
    pub form: Form,
    pub j: usize,
    pub psi_value: f64,
    pub cells: Vec<Cell>,
    pub lo: Rational,
    pub hi: Rational,
    /// `n(n+1)/2 + 1`.
    pub k_bound: usize,
}

impl CellDecomposition {
    pub fn total_length(&self) -> f64 {
        self.cells.iter().map(Cell::length).collect::<CompensatedSum>().value()
    }

    /// Rational points strictly inside each gap between consecutive cells
    /// and between the domain ends and the outer cells.
    pub fn gap_points(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut cursor = self.lo.clone();
        let mut cursor_open = false;
        for c in &self.cells {
            let gap_end = c.left.lo.clone();
            if gap_end > cursor || (gap_end == cursor && !cursor_open && c.left.lo > self.lo) {
                out.push((&cursor + &gap_end) / int(2));
            }
            cursor = c.right.hi.clone();
            cursor_open = true;
        }
        if self.hi > cursor {
            out.push((&cursor + &self.hi) / int(2));
        }
        out
    }

    /// `2Ψ(H)/inf|F'| ≥` the outer length of every cell.
    pub fn length_bound_holds(&self) -> bool {
        let two_psi = from_f64(2.0 * self.psi_value).expect("finite Ψ");
        self.cells
            .iter()
            .all(|c| c.inf_derivative.is_zero() || c.length_upper() * &c.inf_derivative <= two_psi)
    }
}

/// `F_j = Σ_k a_k f_{j,k}` as a polynomial.
pub fn form_poly(form: &Form, system: &SystemMap, j: usize) -> Poly {
    system.curves()[j]
        .coords()
        .iter()
        .zip(form.coeffs())
        .fold(Poly::zero(), |acc, (p, &c)| &acc + &p.scale(&int(c)))
}

const CELL_BITS: u32 = 64;

fn roots_of(p: &Poly, lo: &Rational, hi: &Rational, bits: u32) -> Vec<RealRoot> {
    if p.degree() == Some(1) {
        // exact rational root of a linear polynomial
        let c = p.coeffs();
        let r = -&c[0] / &c[1];
        return if lo <= &r && &r <= hi { vec![RealRoot { lo: r.clone(), hi: r }] } else { Vec::new() };
    }
    real_roots(p, lo, hi, bits)
}

/// Upper estimate of `inf_{[lo, hi]} |p|`; zero when `p` vanishes there.
fn inf_abs(p: &Poly, lo: &Rational, hi: &Rational) -> Rational {
    if p.is_zero() || lo > hi {
        return Rational::zero();
    }
    if !roots_of(p, lo, hi, 8).is_empty() {
        return Rational::zero();
    }
    let mut best = p.eval(lo).abs().min(p.eval(hi).abs());
    let dp = p.derivative();
    if dp.is_zero() {
        return best;
    }
    let reach = lo.abs().max(hi.abs());
    let slope: Rational = dp
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.abs() * num_traits::pow(reach.clone(), k))
        .sum();
    for r in roots_of(&dp, lo, hi, CELL_BITS) {
        let mut v = p.eval(&r.midpoint()).abs();
        if !r.is_exact() {
            v += &slope * r.width() / int(2);
        }
        if v < best {
            best = v;
        }
    }
    best
}

/// Taylor coefficients of `p` at `c`.
fn taylor_shift(p: &Poly, c: &Rational) -> Vec<Rational> {
    let mut a = p.coeffs().to_vec();
    let d = a.len();
    for i in 0..d {
        for k in (i..d - 1).rev() {
            let t = &a[k + 1] * c;
            a[k] += t;
        }
    }
    a
}

/// `|p| ≥ bound` on all of `[lo, hi]`, by the Taylor expansion at the middle.
fn bounded_away(p: &Poly, lo: &Rational, hi: &Rational, bound: &Rational) -> bool {
    let c = (lo + hi) / int(2);
    let r = (hi - lo) / int(2);
    let g = taylor_shift(p, &c);
    let mut slack = g[0].abs() - bound;
    let mut rk = Rational::one();
    for gk in &g[1..] {
        if slack < Rational::zero() {
            return false;
        }
        rk *= &r;
        slack -= gk.abs() * &rk;
    }
    slack >= Rational::zero()
}

/// `σ_j(F) ∩ [lo, hi]` with exact endpoint brackets.
pub fn cells_on(
    form: &Form,
    system: &SystemMap,
    psi: &ApproxFunction,
    j: usize,
    lo: &Rational,
    hi: &Rational,
) -> Result<CellDecomposition> {
    if j >= system.m() {
        return invalid(format!("curve index {j} out of range"));
    }
    let f = form_poly(form, system, j);
    if f.is_zero() {
        return Err(Error::Degenerate(format!(
            "F_{j} vanishes identically for {:?}",
            form.coeffs()
        )));
    }
    let psi_value = psi.evaluate(form.height())?;
    let n = system.n();
    let mut out = CellDecomposition {
        form: form.clone(),
        j,
        psi_value,
        cells: Vec::new(),
        lo: lo.clone(),
        hi: hi.clone(),
        k_bound: n * (n + 1) / 2 + 1,
    };
    if psi_value <= 0.0 {
        return Ok(out);
    }
    let psi_q = from_f64(psi_value)?;
    if bounded_away(&f, lo, hi, &psi_q) {
        return Ok(out);
    }
    let upper = &f - &Poly::constant(psi_q.clone());
    let lower = &f + &Poly::constant(psi_q.clone());
    let mut bits = CELL_BITS;
    let bounds = loop {
        let mut b: Vec<RealRoot> = roots_of(&upper, lo, hi, bits);
        b.extend(roots_of(&lower, lo, hi, bits));
        b.sort_by(|x, y| x.lo.cmp(&y.lo));
        let disjoint = b.windows(2).all(|w| w[0].hi < w[1].lo);
        if disjoint {
            break b;
        }
        if bits >= 512 {
            return Err(Error::Invariant("could not separate cell endpoints".into()));
        }
        bits *= 2;
    };
    let below = |x: &Rational| abs_lt(&f.eval(x), psi_value);
    let dp = f.derivative();
    // segments between consecutive boundaries, each tested at an interior point
    let mut edges: Vec<RealRoot> = Vec::with_capacity(bounds.len() + 2);
    edges.push(RealRoot { lo: lo.clone(), hi: lo.clone() });
    for b in bounds {
        if b.hi <= *lo || b.lo >= *hi {
            continue; // roots at the domain ends coincide with the ends
        }
        edges.push(b);
    }
    edges.push(RealRoot { lo: hi.clone(), hi: hi.clone() });
    for w in edges.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.hi >= b.lo {
            continue;
        }
        let probe = (&a.hi + &b.lo) / int(2);
        if below(&probe) {
            let inf_derivative = inf_abs(&dp, &a.hi, &b.lo);
            out.cells.push(Cell { left: a.clone(), right: b.clone(), inf_derivative });
        }
    }
    Ok(out)
}

/// `σ_j(F)` on the full interval `U_j`.
pub fn solution_cells(form: &Form, system: &SystemMap, psi: &ApproxFunction, j: usize) -> Result<CellDecomposition> {
    let curve = system
        .curves()
        .get(j)
        .ok_or_else(|| Error::InvalidInput(format!("curve index {j} out of range")))?;
    let (lo, hi) = curve.interval();
    cells_on(form, system, psi, j, lo, hi)
}

/// Monte Carlo estimate of `λ_1(σ_j(F) ∩ [lo, hi])`.
pub fn monte_carlo_cell_length(
    form: &Form,
    system: &SystemMap,
    psi: &ApproxFunction,
    j: usize,
    region: &SampleRegion,
) -> Result<MeasureEstimate> {
    let f = form_poly(form, system, j);
    let psi_value = psi.evaluate(form.height())?;
    let sub = SampleRegion { lo: vec![region.lo[j].clone()], hi: vec![region.hi[j].clone()], ..region.clone() };
    let hits = (0..region.samples as u64)
        .into_par_iter()
        .filter(|&i| abs_lt(&f.eval(&sub.point(i).0[0]), psi_value))
        .count() as u64;
    Ok(estimate(hits, region.samples as u64, to_f64(&sub.volume()), Vec::new()))
}

/// `Π_j λ_1(σ_j(F) ∩ B_j)`.
pub fn cell_measure(form: &Form, system: &SystemMap, psi: &ApproxFunction, region: &SampleRegion) -> Result<f64> {
    let mut product = 1.0;
    for j in 0..system.m() {
        let d = cells_on(form, system, psi, j, &region.lo[j], &region.hi[j])?;
        product *= d.total_length();
        if product == 0.0 {
            break;
        }
    }
    Ok(product)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CellPath {
    /// Exact root isolation for every form.
    Exact,
    /// Closed-form quadratic cells, `m = 1` systems with a constant `f_0`
    /// and coordinates of degree at most 2.
    Quadratic,
    /// `Quadratic` when it applies, `Exact` otherwise.
    #[default]
    Auto,
}

/// Borel–Cantelli sum paired with the Khintchine partial sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BorelCantelli {
    pub h_max: u64,
    pub cell_sum: f64,
    pub khintchine_sum: f64,
}

/// `Σ_F Π_j λ(σ_j(F) ∩ B_j)` over canonical forms with `H ≤ H_max`.
pub fn borel_cantelli_partial_sum(
    system: &SystemMap,
    psi: &ApproxFunction,
    region: &SampleRegion,
    h_max: u64,
    path: CellPath,
    work_limit: u128,
) -> Result<BorelCantelli> {
    region.check_inside(system)?;
    if h_max < 1 {
        return invalid("H_max must be at least 1");
    }
    let (n, m) = (system.n(), system.m());
    let side = 2 * u128::from(h_max) + 1;
    let requested = side.checked_pow(n as u32 + 1).map_or(u128::MAX, |v| v / 2);
    if requested > work_limit {
        return Err(Error::WorkLimit { requested, limit: work_limit });
    }
    let khintchine_sum = crate::approx::partial_sum_khintchine(psi, n as u32, m as u32, h_max)?;
    let quadratic = quadratic_setup(system);
    let cell_sum = match (path, quadratic) {
        (CellPath::Quadratic, None) => {
            return invalid("the quadratic path needs m = 1, a constant f_0 and coordinates of degree ≤ 2");
        }
        (CellPath::Quadratic | CellPath::Auto, Some(q)) => quadratic_sum(&q, psi, region, h_max)?,
        _ => exact_sum(system, psi, region, h_max)?,
    };
    Ok(BorelCantelli { h_max, cell_sum, khintchine_sum })
}

fn exact_sum(system: &SystemMap, psi: &ApproxFunction, region: &SampleRegion, h_max: u64) -> Result<f64> {
    let n = system.n();
    let total = coefficient_box_size(n, h_max).ok_or(Error::WorkLimit { requested: u128::MAX, limit: u128::MAX })?;
    let lengths: Vec<f64> = (0..total)
        .into_par_iter()
        .filter_map(|i| canonical_form_at(n, h_max, i))
        .map(|f| cell_measure(&f, system, psi, region))
        .collect::<Result<_>>()?;
    Ok(lengths.into_iter().collect::<CompensatedSum>().value())
}

/// `F(x) = a_0 c + Σ_{k≥1} a_k f_k(x)` with every `f_k` of degree ≤ 2.
struct QuadraticSystem {
    c: f64,
    /// `(constant, linear, quadratic)` coefficients of `f_k` for `k ≥ 1`.
    tails: Vec<[f64; 3]>,
}

fn quadratic_setup(system: &SystemMap) -> Option<QuadraticSystem> {
    if system.m() != 1 {
        return None;
    }
    let coords = system.curves()[0].coords();
    let f0 = &coords[0];
    if f0.degree() != Some(0) {
        return None;
    }
    if coords.iter().any(|p| p.degree().unwrap_or(0) > 2) {
        return None;
    }
    let c = to_f64(&f0.coeffs()[0]);
    let tails = coords[1..]
        .iter()
        .map(|p| {
            let mut out = [0.0; 3];
            for (o, v) in out.iter_mut().zip(p.coeffs()) {
                *o = to_f64(v);
            }
            out
        })
        .collect();
    Some(QuadraticSystem { c, tails })
}

/// `λ{x ∈ [p, q] : A x² + B x + C < v}`.
fn measure_below(a: f64, b: f64, c: f64, v: f64, p: f64, q: f64) -> f64 {
    let clip = |lo: f64, hi: f64| (hi.min(q) - lo.max(p)).max(0.0);
    let c = c - v;
    if a == 0.0 {
        if b == 0.0 {
            return if c < 0.0 { q - p } else { 0.0 };
        }
        let r = -c / b;
        return if b > 0.0 { clip(f64::NEG_INFINITY, r) } else { clip(r, f64::INFINITY) };
    }
    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 {
        return if a > 0.0 { 0.0 } else { q - p };
    }
    let s = disc.sqrt();
    let t = if b >= 0.0 { -0.5 * (b + s) } else { -0.5 * (b - s) };
    let (mut r1, mut r2) = (t / a, c / t);
    if r1 > r2 {
        std::mem::swap(&mut r1, &mut r2);
    }
    if a > 0.0 {
        clip(r1, r2)
    } else {
        (q - p) - clip(r1, r2)
    }
}

fn quadratic_cell(a: f64, b: f64, c: f64, psi: f64, p: f64, q: f64) -> f64 {
    // {|Q| < ψ} = {Q < ψ} \ {Q ≤ −ψ}
    (measure_below(a, b, c, psi, p, q) - measure_below(a, b, c, -psi, p, q)).max(0.0)
}

fn quadratic_sum(q: &QuadraticSystem, psi: &ApproxFunction, region: &SampleRegion, h_max: u64) -> Result<f64> {
    let table = psi.table_up_to(h_max)?;
    let (p, r) = (to_f64(&region.lo[0]), to_f64(&region.hi[0]));
    let n = q.tails.len();
    let h = h_max as i64;
    // f_0 contributes only through a_0; zero-tail forms are constants a_0 c
    let mut total = CompensatedSum::new();
    for a0 in 1..=h {
        if (a0 as f64 * q.c).abs() < table[a0 as usize] {
            total.add(r - p);
        }
    }
    let firsts: Vec<f64> = (0..=h)
        .into_par_iter()
        .map(|a1| {
            let mut acc = CompensatedSum::new();
            let mut tail = vec![0i64; n];
            tail[0] = a1;
            quadratic_tails(q, &table, p, r, h, &mut tail, 1, a1 > 0, &mut acc);
            acc.value()
        })
        .collect();
    for v in firsts {
        total.add(v);
    }
    Ok(total.value())
}

#[allow(clippy::too_many_arguments)]
fn quadratic_tails(
    q: &QuadraticSystem,
    table: &[f64],
    p: f64,
    r: f64,
    h: i64,
    tail: &mut Vec<i64>,
    pos: usize,
    positive: bool,
    acc: &mut CompensatedSum,
) {
    if pos == tail.len() {
        if positive {
            acc.add(quadratic_tail_sum(q, table, p, r, h, tail));
        }
        return;
    }
    let start = if positive { -h } else { 0 };
    for v in start..=h {
        tail[pos] = v;
        quadratic_tails(q, table, p, r, h, tail, pos + 1, positive || v > 0, acc);
    }
    tail[pos] = 0;
}

/// Sum over every `a_0` of the cell length for one positive-first tail;
/// `a_0` and `−a_0` with the same tail are distinct canonical forms.
fn quadratic_tail_sum(q: &QuadraticSystem, table: &[f64], p: f64, r: f64, h: i64, tail: &[i64]) -> f64 {
    let mut coef = [0.0f64; 3];
    for (t, &a) in q.tails.iter().zip(tail) {
        for (c, v) in coef.iter_mut().zip(t) {
            *c += a as f64 * v;
        }
    }
    let tail_h = tail.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0) as usize;
    // range of the tail part over [p, r]
    let g = |x: f64| coef[0] + coef[1] * x + coef[2] * x * x;
    let mut lo_v = g(p).min(g(r));
    let mut hi_v = g(p).max(g(r));
    if coef[2] != 0.0 {
        let vx = -coef[1] / (2.0 * coef[2]);
        if vx > p && vx < r {
            lo_v = lo_v.min(g(vx));
            hi_v = hi_v.max(g(vx));
        }
    }
    let psi_cap = table[tail_h.max(1)..].iter().copied().fold(0.0, f64::max);
    // a_0 c + g(x) must reach (−ψ, ψ)
    let (mut k_lo, mut k_hi) = ((-hi_v - psi_cap) / q.c, (-lo_v + psi_cap) / q.c);
    if k_lo > k_hi {
        std::mem::swap(&mut k_lo, &mut k_hi);
    }
    let k_lo = (k_lo.floor() as i64).max(-h);
    let k_hi = (k_hi.ceil() as i64).min(h);
    let mut acc = CompensatedSum::new();
    for a0 in k_lo..=k_hi {
        let height = tail_h.max(a0.unsigned_abs() as usize);
        let psi = table[height];
        if psi <= 0.0 {
            continue;
        }
        acc.add(quadratic_cell(coef[2], coef[1], coef[0] + a0 as f64 * q.c, psi, p, r));
    }
    acc.value()
}

// ---------------------------------------------------------------------------
// Dichotomy experiment

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyRow {
    pub t: u32,
    pub hit_fraction: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_count: f64,
    pub heuristic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyTable {
    pub rows: Vec<DichotomyRow>,
    /// `counts[i][t]` for every successful sample `i`.
    pub counts: Vec<Vec<u64>>,
    pub failures: Vec<(u64, String)>,
}

/// Per-block hit statistics over the seeded sample of `region`.
pub fn dichotomy_experiment(
    system: &SystemMap,
    psi: &ApproxFunction,
    region: &SampleRegion,
    t_max: u32,
    config: &SolverConfig,
) -> Result<DichotomyTable> {
    region.check_inside(system)?;
    let per_point: Vec<Result<Vec<u64>>> = (0..region.samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = region.point(i);
            let rows = count_by_dyadic_block(system, &x, psi, t_max, config)?;
            Ok(rows.into_iter().map(|r| r.count).collect())
        })
        .collect();
    let mut counts = Vec::new();
    let mut failures = Vec::new();
    for (i, r) in per_point.into_iter().enumerate() {
        match r {
            Ok(c) => counts.push(c),
            Err(e) => failures.push((i as u64, e.to_string())),
        }
    }
    let ok = counts.len() as u64;
    let rows = (0..=t_max)
        .map(|t| {
            let ti = t as usize;
            let hits = counts.iter().filter(|c| c[ti] > 0).count() as u64;
            let (ci_lo, ci_hi) = wilson_interval(hits, ok);
            let total: u64 = counts.iter().map(|c| c[ti]).sum();
            Ok(DichotomyRow {
                t,
                hit_fraction: if ok == 0 { 0.0 } else { hits as f64 / ok as f64 },
                ci_lo,
                ci_hi,
                mean_count: if ok == 0 { 0.0 } else { total as f64 / ok as f64 },
                heuristic: block_heuristic(psi, system.n(), system.m(), t)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DichotomyTable { rows, counts, failures })
}
