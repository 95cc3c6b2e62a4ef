//! Polynomial curve maps, the matrices `Y` and `G`, and non-degeneracy
//! diagnostics.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{format_rational, from_f64, int, parse_rational, to_f64, Point, Rational};
use crate::poly::Poly;
use crate::roots::real_roots;

/// Exact determinant by Gaussian elimination over the rationals.
pub fn determinant(mut a: Vec<Vec<Rational>>) -> Rational {
    let n = a.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// Upper bound for `sup |p|` on `[lo, hi]`, exact when the extrema sit at
/// rational points.
pub fn sup_abs(p: &Poly, lo: &Rational, hi: &Rational) -> Rational {
    let mut best = p.eval(lo).abs().max(p.eval(hi).abs());
    let dp = p.derivative();
    if dp.is_zero() {
        return best;
    }
    let reach = lo.abs().max(hi.abs());
    // |p'| on any sub-interval of [lo, hi]
    let slope: Rational = dp
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.abs() * num_traits::pow(reach.clone(), k))
        .sum();
    for root in real_roots(&dp, lo, hi, 64) {
        let mid = root.midpoint();
        let mut v = p.eval(&mid).abs();
        if !root.is_exact() {
            v += &slope * root.width() / int(2);
        }
        if v > best {
            best = v;
        }
    }
    best
}

/// A polynomial curve `x ↦ (f_0(x), …, f_n(x))` on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveMap {
    /// `derivs[k][i] = f_i^{(k)}` for `k ≤ n + 1`.
    derivs: Vec<Vec<Poly>>,
    lo: Rational,
    hi: Rational,
}

impl CurveMap {
    /// Builds the curve and rejects it when the wronskian vanishes at the
    /// midpoint of the interval.
    pub fn new(coords: Vec<Poly>, lo: Rational, hi: Rational) -> Result<Self> {
        if coords.len() < 2 {
            return invalid("a curve needs at least two coordinate functions");
        }
        if lo >= hi {
            return invalid(format!(
                "empty interval [{}, {}]",
                format_rational(&lo),
                format_rational(&hi)
            ));
        }
        let n = coords.len() - 1;
        let mut derivs = vec![coords];
        for k in 1..=n + 1 {
            let next = derivs[k - 1].iter().map(Poly::derivative).collect();
            derivs.push(next);
        }
        let curve = CurveMap { derivs, lo, hi };
        let mid = (&curve.lo + &curve.hi) / int(2);
        if curve.wronskian(&mid).is_zero() {
            return Err(Error::Degenerate(format!(
                "wronskian vanishes at the midpoint {}; coordinates look linearly dependent",
                format_rational(&mid)
            )));
        }
        Ok(curve)
    }

    /// `(1, x, …, x^n)`.
    pub fn veronese(n: usize, lo: Rational, hi: Rational) -> Result<Self> {
        if n < 1 {
            return invalid("the Veronese curve needs n ≥ 1");
        }
        let coords = (0..=n).map(|k| Poly::monomial(Rational::one(), k)).collect();
        CurveMap::new(coords, lo, hi)
    }

    /// Monomial coordinates `x^{e_i}`.
    pub fn monomials(exponents: &[usize], lo: Rational, hi: Rational) -> Result<Self> {
        let coords = exponents.iter().map(|&e| Poly::monomial(Rational::one(), e)).collect();
        CurveMap::new(coords, lo, hi)
    }

    /// `n`, one less than the number of coordinates.
    pub fn n(&self) -> usize {
        self.derivs[0].len() - 1
    }

    pub fn coords(&self) -> &[Poly] {
        &self.derivs[0]
    }

    /// `f_i^{(order)}` for every `i`.
    pub fn derivative_polys(&self, order: usize) -> &[Poly] {
        &self.derivs[order]
    }

    pub fn interval(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// `(f_0^{(order)}(x), …, f_n^{(order)}(x))`; orders above `n + 1` are
    /// computed on demand.
    pub fn eval(&self, order: usize, x: &Rational) -> Vec<Rational> {
        if order < self.derivs.len() {
            self.derivs[order].iter().map(|p| p.eval(x)).collect()
        } else {
            self.derivs[0].iter().map(|p| p.nth_derivative(order).eval(x)).collect()
        }
    }

    pub fn eval_f64(&self, order: usize, x: f64) -> Vec<f64> {
        match self.derivs.get(order) {
            Some(polys) => polys.iter().map(|p| p.eval_f64(x)).collect(),
            None => self.derivs[0].iter().map(|p| p.nth_derivative(order).eval_f64(x)).collect(),
        }
    }

    /// Wronskian `det(f_i^{(k)}(x))_{0 ≤ k, i ≤ n}`.
    pub fn wronskian(&self, x: &Rational) -> Rational {
        let n = self.n();
        determinant((0..=n).map(|k| self.eval(k, x)).collect())
    }

    /// Certified `max_{i, k ≤ n+1} sup_{[lo, hi]} |f_i^{(k)}|`.
    pub fn derivative_bound(&self) -> Rational {
        self.derivs
            .iter()
            .flatten()
            .map(|p| sup_abs(p, &self.lo, &self.hi))
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// `m` curves with a common `n`, evaluated on the product of their intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMap {
    curves: Vec<CurveMap>,
    bound: Rational,
}

impl SystemMap {
    pub fn new(curves: Vec<CurveMap>) -> Result<Self> {
        let Some(first) = curves.first() else {
            return invalid("a system needs at least one curve");
        };
        let n = first.n();
        if curves.iter().any(|c| c.n() != n) {
            return invalid("all curves must have the same number of coordinates");
        }
        if curves.len() > n {
            return invalid(format!("need m ≤ n, got m = {}, n = {n}", curves.len()));
        }
        let bound = curves
            .iter()
            .map(CurveMap::derivative_bound)
            .max()
            .unwrap_or_else(Rational::zero);
        Ok(SystemMap { curves, bound })
    }

    /// `m` copies of the Veronese curve of degree `n` on `[lo, hi]`.
    pub fn veronese(n: usize, m: usize, lo: Rational, hi: Rational) -> Result<Self> {
        let curve = CurveMap::veronese(n, lo, hi)?;
        SystemMap::new(vec![curve; m])
    }

    pub fn n(&self) -> usize {
        self.curves[0].n()
    }

    pub fn m(&self) -> usize {
        self.curves.len()
    }

    pub fn curves(&self) -> &[CurveMap] {
        &self.curves
    }

    /// Certified `M`, the largest `|f_{j,i}^{(k)}|` over `U` with `k ≤ n+1`.
    pub fn derivative_bound(&self) -> &Rational {
        &self.bound
    }

    pub fn check_point(&self, x: &Point) -> Result<()> {
        if x.dim() != self.m() {
            return invalid(format!("point has {} coordinates, system has m = {}", x.dim(), self.m()));
        }
        for (c, xj) in self.curves.iter().zip(x.coords()) {
            if !c.contains(xj) {
                return Err(Error::OutsideDomain(x.to_string()));
            }
        }
        Ok(())
    }

    /// `Y^{(i)}[j][k] = f_{j,k}^{(i)}(x_j)` for `i ≤ order`.
    pub fn evaluate_system_matrix(&self, x: &Point, order: usize) -> Result<Vec<Vec<Vec<Rational>>>> {
        self.check_point(x)?;
        if order > self.n() + 1 {
            return invalid(format!("derivative order {order} exceeds n + 1 = {}", self.n() + 1));
        }
        Ok((0..=order)
            .map(|i| {
                self.curves
                    .iter()
                    .zip(x.coords())
                    .map(|(c, xj)| c.eval(i, xj))
                    .collect()
            })
            .collect())
    }

    /// The square matrix `G` with row blocks `f_j(x_j), …, f_j^{(ℓ_j)}(x_j)`.
    pub fn square_matrix(&self, ells: &[usize], x: &Point) -> Result<SquareSystemMatrix> {
        self.check_point(x)?;
        if ells.len() != self.m() {
            return invalid(format!("need {} multiplicities, got {}", self.m(), ells.len()));
        }
        let total: usize = ells.iter().map(|l| l + 1).sum();
        if total != self.n() + 1 {
            return invalid(format!("Σ(ℓ_j + 1) = {total} but n + 1 = {}", self.n() + 1));
        }
        let mut rows = Vec::with_capacity(total);
        for ((c, xj), &l) in self.curves.iter().zip(x.coords()).zip(ells) {
            for i in 0..=l {
                rows.push(c.eval(i, xj));
            }
        }
        Ok(SquareSystemMatrix { ells: ells.to_vec(), point: x.clone(), rows })
    }

    /// Evenly spaced grid of `g` points per axis (endpoints included).
    pub fn grid(&self, g: usize) -> Vec<Point> {
        let axes: Vec<Vec<Rational>> = self
            .curves
            .iter()
            .map(|c| {
                let step = (&c.hi - &c.lo) / int(g as i64 - 1);
                (0..g).map(|k| &c.lo + &step * int(k as i64)).collect()
            })
            .collect();
        let mut points = vec![Vec::new()];
        for axis in &axes {
            points = points
                .into_iter()
                .flat_map(|p: Vec<Rational>| {
                    axis.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(v.clone());
                        q
                    })
                })
                .collect();
        }
        points.into_iter().map(Point::new).collect()
    }
}

/// The matrix `G` together with its layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareSystemMatrix {
    pub ells: Vec<usize>,
    pub point: Point,
    pub rows: Vec<Vec<Rational>>,
}

impl SquareSystemMatrix {
    pub fn det(&self) -> Rational {
        determinant(self.rows.clone())
    }

    pub fn apply(&self, a: &[BigInt]) -> Vec<Rational> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(a)
                    .map(|(g, ai)| g * Rational::from_integer(ai.clone()))
                    .sum()
            })
            .collect()
    }
}

/// Grid extrema of the quantities the metric arguments assume bounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridExtrema {
    pub m_estimate: f64,
    pub c0_wronskian: f64,
    pub c0_minor_m: f64,
    /// One floor per choice of the appended derivative row `f'_j`.
    pub c0_minor_m_plus_1: Vec<f64>,
    pub near_zero_locations: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    pub grid_points_per_axis: usize,
    pub extrema: GridExtrema,
    /// The same scan on the nested grid with `2g − 1` points per axis.
    pub refined: GridExtrema,
    /// Every tracked value moved by less than 10% under refinement.
    pub stable: bool,
}

impl NondegeneracyReport {
    pub fn m_estimate(&self) -> f64 {
        self.extrema.m_estimate
    }
}

struct PointStats {
    m_est: Rational,
    wronskian: Rational,
    minor_m: Rational,
    minor_m1: Vec<Rational>,
}

fn point_stats(system: &SystemMap, x: &Point) -> PointStats {
    let n = system.n();
    let m = system.m();
    let mut m_est = Rational::zero();
    let mut wronskian: Option<Rational> = None;
    for (c, xj) in system.curves.iter().zip(x.coords()) {
        for k in 0..=n + 1 {
            for v in c.eval(k, xj) {
                let v = v.abs();
                if v > m_est {
                    m_est = v;
                }
            }
        }
        let w = c.wronskian(xj).abs();
        wronskian = Some(match wronskian {
            Some(cur) if cur <= w => cur,
            _ => w,
        });
    }
    let base: Vec<Vec<Rational>> = system
        .curves
        .iter()
        .zip(x.coords())
        .map(|(c, xj)| c.eval(0, xj))
        .collect();
    let minor_m = determinant(base.iter().map(|r| r[..m].to_vec()).collect()).abs();
    let minor_m1 = (0..m)
        .map(|j| {
            let mut rows: Vec<Vec<Rational>> = base.iter().map(|r| r[..=m].to_vec()).collect();
            rows.push(system.curves[j].eval(1, &x.coords()[j])[..=m].to_vec());
            determinant(rows).abs()
        })
        .collect();
    PointStats {
        m_est,
        wronskian: wronskian.unwrap_or_else(Rational::zero),
        minor_m,
        minor_m1,
    }
}

fn scan(system: &SystemMap, g: usize, threshold: f64) -> GridExtrema {
    let points = system.grid(g);
    let stats: Vec<PointStats> = points.par_iter().map(|x| point_stats(system, x)).collect();
    let m = system.m();
    let mut m_est = Rational::zero();
    let mut c0_w: Option<Rational> = None;
    let mut c0_m: Option<Rational> = None;
    let mut c0_m1: Vec<Option<Rational>> = vec![None; m];
    let mut near = Vec::new();
    let min_into = |slot: &mut Option<Rational>, v: &Rational| {
        if slot.as_ref().is_none_or(|cur| v < cur) {
            *slot = Some(v.clone());
        }
    };
    for (x, s) in points.iter().zip(&stats) {
        if s.m_est > m_est {
            m_est = s.m_est.clone();
        }
        min_into(&mut c0_w, &s.wronskian);
        min_into(&mut c0_m, &s.minor_m);
        for (slot, v) in c0_m1.iter_mut().zip(&s.minor_m1) {
            min_into(slot, v);
        }
        let low = |v: &Rational| to_f64(v) < threshold;
        if low(&s.wronskian) || low(&s.minor_m) || s.minor_m1.iter().any(low) {
            near.push(x.to_f64s());
        }
    }
    let f = |v: Option<Rational>| v.as_ref().map_or(0.0, to_f64);
    GridExtrema {
        m_estimate: to_f64(&m_est),
        c0_wronskian: f(c0_w),
        c0_minor_m: f(c0_m),
        c0_minor_m_plus_1: c0_m1.into_iter().map(f).collect(),
        near_zero_locations: near,
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 0.1 * a.abs().max(b.abs())
}

/// Grid scan of `M`, the wronskian floor and the minor floors, repeated on
/// the nested refined grid.
pub fn nondegeneracy_report(system: &SystemMap, grid_points_per_axis: usize, threshold: f64) -> Result<NondegeneracyReport> {
    if grid_points_per_axis < 2 {
        return invalid("the grid needs at least 2 points per axis");
    }
    let extrema = scan(system, grid_points_per_axis, threshold);
    let refined = scan(system, 2 * grid_points_per_axis - 1, threshold);
    let stable = close(extrema.m_estimate, refined.m_estimate)
        && close(extrema.c0_wronskian, refined.c0_wronskian)
        && close(extrema.c0_minor_m, refined.c0_minor_m)
        && extrema
            .c0_minor_m_plus_1
            .iter()
            .zip(&refined.c0_minor_m_plus_1)
            .all(|(a, b)| close(*a, *b));
    Ok(NondegeneracyReport { grid_points_per_axis, extrema, refined, stable })
}

/// Polynomial in `k` variables as a map from exponent vectors to
/// coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultiPoly {
    pub vars: usize,
    pub terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn new(vars: usize, terms: Vec<(Vec<u32>, Rational)>) -> Result<Self> {
        let mut out = MultiPoly { vars, terms: BTreeMap::new() };
        for (exps, c) in terms {
            if exps.len() != vars {
                return invalid(format!("monomial {exps:?} does not have {vars} exponents"));
            }
            *out.terms.entry(exps).or_insert_with(Rational::zero) += c;
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    pub fn constant(vars: usize, c: Rational) -> Self {
        MultiPoly::new(vars, vec![(vec![0; vars], c)]).expect("well-formed constant")
    }

    /// `x_i` (zero-based).
    pub fn var(vars: usize, i: usize) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        MultiPoly::new(vars, vec![(e, Rational::one())]).expect("well-formed variable")
    }
}

/// Fibering substitution result.
#[derive(Debug, Clone, PartialEq)]
pub struct Fibered {
    pub curve: CurveMap,
    /// The `D` that produced independent coordinates.
    pub d: u32,
    /// Values of `D` tried before (and including) the returned one.
    pub tried: Vec<u32>,
}

/// Exponents `1 + D^k, D + D^k, …, D^{k−1} + D^k`.
pub fn fiber_exponents(k: usize, d: u32) -> Result<Vec<u64>> {
    let d = u64::from(d);
    let top = d
        .checked_pow(k as u32)
        .ok_or_else(|| Error::InvalidInput(format!("D^k overflows for D = {d}, k = {k}")))?;
    (0..k)
        .map(|i| {
            d.checked_pow(i as u32)
                .and_then(|p| p.checked_add(top))
                .ok_or_else(|| Error::InvalidInput("fibering exponent overflows".into()))
        })
        .collect()
}

/// Restricts `coords` to the curve `t ↦ (u_1 t^{1+D^k}, u_2 t^{D+D^k}, …)`.
///
/// If the image coordinates are linearly dependent the substitution is
/// retried with `D + 1`, up to `d_cap`. `domain`, when given, is a box in the
/// original variables that must contain the origin; the returned
/// `t`-interval `[0, T]` keeps the image inside it.
pub fn fiber_substitution(
    coords: &[MultiPoly],
    u: &[Rational],
    d: u32,
    d_cap: u32,
    domain: Option<&[(Rational, Rational)]>,
) -> Result<Fibered> {
    let k = u.len();
    if k == 0 {
        return invalid("u must have at least one component");
    }
    if coords.len() < 2 {
        return invalid("need at least two coordinate functions");
    }
    if coords.iter().any(|p| p.vars != k) {
        return invalid(format!("coordinates must be polynomials in {k} variables"));
    }
    if u[0] != Rational::one() {
        return invalid("the first component of u must be 1");
    }
    if u.iter().any(Zero::is_zero) {
        return invalid("every component of u must be nonzero");
    }
    if d < 2 {
        return invalid("D must be at least 2");
    }
    if let Some(b) = domain {
        if b.len() != k {
            return invalid(format!("domain box has {} axes, expected {k}", b.len()));
        }
        if b.iter().any(|(lo, hi)| lo.is_positive() || hi.is_negative() || lo >= hi) {
            return invalid("the domain box must contain the origin");
        }
    }
    let mut tried = Vec::new();
    for dd in d..=d_cap.max(d) {
        tried.push(dd);
        let exps = fiber_exponents(k, dd)?;
        let t_hi = t_extent(u, &exps, domain);
        let polys: Vec<Poly> = coords.iter().map(|p| substitute(p, u, &exps)).collect::<Result<_>>()?;
        match CurveMap::new(polys, Rational::zero(), t_hi) {
            Ok(curve) => return Ok(Fibered { curve, d: dd, tried }),
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::FiberingFailed { tried })
}

fn substitute(p: &MultiPoly, u: &[Rational], exps: &[u64]) -> Result<Poly> {
    let mut coeffs: BTreeMap<usize, Rational> = BTreeMap::new();
    for (e, c) in &p.terms {
        let mut coeff = c.clone();
        let mut degree = 0u64;
        for ((ei, ui), big) in e.iter().zip(u).zip(exps) {
            coeff *= num_traits::pow(ui.clone(), *ei as usize);
            degree += u64::from(*ei) * big;
        }
        if degree > 1 << 20 {
            return invalid(format!("substituted degree {degree} is too large"));
        }
        *coeffs.entry(degree as usize).or_insert_with(Rational::zero) += coeff;
    }
    let top = coeffs.keys().next_back().copied().unwrap_or(0);
    let mut dense = vec![Rational::zero(); top + 1];
    for (deg, c) in coeffs {
        dense[deg] = c;
    }
    Ok(Poly::new(dense))
}

/// Largest `T = 2^{-s} ≤ 1` with `u_i T^{E_i}` inside the box for every `i`.
fn t_extent(u: &[Rational], exps: &[u64], domain: Option<&[(Rational, Rational)]>) -> Rational {
    let mut t = Rational::one();
    let Some(b) = domain else { return t };
    let fits = |t: &Rational| {
        u.iter().zip(exps).zip(b).all(|((ui, e), (lo, hi))| {
            let v = ui * num_traits::pow(t.clone(), *e as usize);
            lo <= &v && &v <= hi
        })
    };
    // each image coordinate moves monotonically from 0 as t grows
    for _ in 0..200 {
        if fits(&t) {
            break;
        }
        t /= int(2);
    }
    t
}

/// Both sides of the Cramer lower bound `|Ga|_∞ ≥ C1/(k!·C2^{k−1})·|a|_∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct CramerVerdict {
    pub holds: bool,
    pub lhs: Rational,
    pub rhs: Rational,
}

pub fn cramer_lower_bound_check(g: &[Vec<Rational>], a: &[BigInt], c1: f64, c2: f64) -> Result<CramerVerdict> {
    let k = g.len();
    if k == 0 || g.iter().any(|r| r.len() != k) {
        return invalid("G must be a nonempty square matrix");
    }
    if a.len() != k {
        return invalid(format!("a has {} entries, G is {k}×{k}", a.len()));
    }
    if !(c1 > 0.0) || !(c2 > 0.0) {
        return Err(Error::Precondition("C1 and C2 must be positive".into()));
    }
    let c1q = from_f64(c1)?;
    let c2q = from_f64(c2)?;
    if determinant(g.to_vec()).abs() < c1q {
        return Err(Error::Precondition(format!("|det G| is below C1 = {c1}")));
    }
    if g.iter().flatten().any(|e| e.abs() > c2q) {
        return Err(Error::Precondition(format!("an entry of G exceeds C2 = {c2}")));
    }
    let lhs = g
        .iter()
        .map(|row| {
            row.iter()
                .zip(a)
                .map(|(e, ai)| e * Rational::from_integer(ai.clone()))
                .sum::<Rational>()
                .abs()
        })
        .max()
        .unwrap_or_else(Rational::zero);
    let height = a.iter().map(|v| v.abs()).max().unwrap_or_default();
    let factorial: BigInt = (1..=k).map(BigInt::from).product();
    let rhs = c1q / (Rational::from_integer(factorial) * num_traits::pow(c2q, k - 1)) * Rational::from_integer(height);
    Ok(CramerVerdict { holds: lhs >= rhs, lhs, rhs })
}

// ---------------------------------------------------------------------------
// JSON documents

/// A rational written as `"p/q"`, a decimal string, or a JSON number.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Text(String),
    Int(i64),
    Float(f64),
}

impl RationalText {
    pub fn value(&self) -> Result<Rational> {
        match self {
            RationalText::Text(s) => parse_rational(s),
            RationalText::Int(v) => Ok(int(*v)),
            RationalText::Float(v) => parse_rational(&v.to_string()),
        }
    }

    pub fn of(q: &Rational) -> Self {
        RationalText::Text(format_rational(q))
    }
}

/// `{"n": 2, "coords": [[[0, "1"]], [[1, "1"]], [[2, "1"]]], "interval": ["-1/2", "1/2"]}`;
/// each coordinate is a list of `[exponent, coefficient]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSpec {
    pub n: usize,
    pub coords: Vec<Vec<(usize, RationalText)>>,
    pub interval: (RationalText, RationalText),
}

impl CurveSpec {
    pub fn build(&self) -> Result<CurveMap> {
        if self.coords.len() != self.n + 1 {
            return invalid(format!("n = {} needs {} coordinates, got {}", self.n, self.n + 1, self.coords.len()));
        }
        let mut polys = Vec::with_capacity(self.coords.len());
        for terms in &self.coords {
            let top = terms.iter().map(|t| t.0).max().unwrap_or(0);
            let mut dense = vec![Rational::zero(); top + 1];
            for (e, c) in terms {
                dense[*e] += c.value()?;
            }
            polys.push(Poly::new(dense));
        }
        CurveMap::new(polys, self.interval.0.value()?, self.interval.1.value()?)
    }

    pub fn of(curve: &CurveMap) -> Self {
        let coords = curve
            .coords()
            .iter()
            .map(|p| {
                p.coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(e, c)| (e, RationalText::of(c)))
                    .collect()
            })
            .collect();
        CurveSpec {
            n: curve.n(),
            coords,
            interval: (RationalText::of(&curve.lo), RationalText::of(&curve.hi)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VeroneseSpec {
    pub n: usize,
    pub m: usize,
    pub interval: (RationalText, RationalText),
}

/// A system document: explicit curves or the Veronese shorthand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSpec {
    Curves { curves: Vec<CurveSpec> },
    Veronese { veronese: VeroneseSpec },
}

impl SystemSpec {
    pub fn build(&self) -> Result<SystemMap> {
        match self {
            SystemSpec::Curves { curves } => {
                SystemMap::new(curves.iter().map(CurveSpec::build).collect::<Result<_>>()?)
            }
            SystemSpec::Veronese { veronese: v } => {
                SystemMap::veronese(v.n, v.m, v.interval.0.value()?, v.interval.1.value()?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn half_box() -> (Rational, Rational) {
        (ratio(-1, 2), ratio(1, 2))
    }

    #[test]
    fn veronese_evaluation() {
        let (lo, hi) = half_box();
        let c = CurveMap::veronese(2, lo, hi).unwrap();
        assert_eq!(c.eval(0, &ratio(1, 2)), vec![int(1), ratio(1, 2), ratio(1, 4)]);
        assert_eq!(c.eval(1, &ratio(1, 2)), vec![int(0), int(1), int(1)]);
        let c1 = CurveMap::veronese(1, int(-1), int(1)).unwrap();
        assert_eq!(c1.eval(2, &ratio(1, 3)), vec![int(0), int(0)]);
    }

    #[test]
    fn veronese_wronskian_is_superfactorial() {
        let c2 = CurveMap::veronese(2, int(-3), int(3)).unwrap();
        let c3 = CurveMap::veronese(3, int(-3), int(3)).unwrap();
        for x in [int(0), int(1), int(-2), ratio(5, 7)] {
            assert_eq!(c2.wronskian(&x), int(2));
            assert_eq!(c3.wronskian(&x), int(12));
        }
    }

    #[test]
    fn dependent_coordinates_rejected() {
        let coords = vec![Poly::from_i64(&[1]), Poly::from_i64(&[0, 1]), Poly::from_i64(&[0, 1])];
        assert!(matches!(CurveMap::new(coords, int(0), int(1)), Err(Error::Degenerate(_))));
        assert!(CurveMap::veronese(2, int(1), int(1)).is_err());
    }

    #[test]
    fn system_matrices() {
        let s = SystemMap::veronese(2, 2, int(0), int(1)).unwrap();
        let y = s.evaluate_system_matrix(&Point::new(vec![int(0), int(1)]), 1).unwrap();
        assert_eq!(y[0], vec![vec![int(1), int(0), int(0)], vec![int(1), int(1), int(1)]]);
        let s1 = SystemMap::veronese(2, 1, int(-3), int(3)).unwrap();
        let y = s1.evaluate_system_matrix(&Point::new(vec![int(2)]), 1).unwrap();
        assert_eq!(y[1][0], vec![int(0), int(1), int(4)]);
        assert!(s1.evaluate_system_matrix(&Point::new(vec![int(4)]), 0).is_err());
        assert!(SystemMap::veronese(1, 2, int(0), int(1)).is_err());
    }

    #[test]
    fn square_matrix_layout() {
        let s = SystemMap::veronese(3, 2, int(-1), int(1)).unwrap();
        let x = Point::new(vec![ratio(1, 2), ratio(-1, 3)]);
        let g = s.square_matrix(&[1, 1], &x).unwrap();
        assert_eq!(g.rows.len(), 4);
        // confluent Vandermonde: (x2 - x1)^4
        assert_eq!(g.det(), num_traits::pow(ratio(-5, 6), 4));
        assert!(s.square_matrix(&[1, 0], &x).is_err());
    }

    #[test]
    fn certified_derivative_bound() {
        let (lo, hi) = half_box();
        assert_eq!(SystemMap::veronese(2, 1, lo.clone(), hi.clone()).unwrap().derivative_bound(), &int(2));
        assert_eq!(SystemMap::veronese(3, 1, lo, hi).unwrap().derivative_bound(), &int(6));
        // 1 - 3x^2 + x^3 on [-1, 1]: |p(-1)| = 3 beats the interior peak p(0) = 1
        let p = Poly::from_i64(&[1, 0, -3, 1]);
        assert_eq!(sup_abs(&p, &int(-1), &int(1)), int(3));
        let q = Poly::from_i64(&[0, -3, 0, 1]);
        // interior extremum at x = 1 is exact; |q(1)| = 2
        assert_eq!(sup_abs(&q, &ratio(-1, 2), &ratio(3, 2)), int(2));
    }

    #[test]
    fn report_examples() {
        let (lo, hi) = half_box();
        let s = SystemMap::veronese(2, 1, lo, hi).unwrap();
        let r = nondegeneracy_report(&s, 5, 1e-9).unwrap();
        assert_eq!(r.extrema.c0_wronskian, 2.0);
        assert_eq!(r.m_estimate(), 2.0);
        assert!(r.stable);
        let s2 = SystemMap::veronese(2, 2, int(0), int(1)).unwrap();
        let r2 = nondegeneracy_report(&s2, 5, 1e-9).unwrap();
        assert_eq!(r2.extrema.c0_minor_m, 0.0);
        assert!(r2.extrema.near_zero_locations.contains(&vec![0.5, 0.5]));
        assert_eq!(r2.extrema.c0_minor_m_plus_1.len(), 2);
        assert!(nondegeneracy_report(&s2, 1, 1e-9).is_err());
    }

    #[test]
    fn m_estimate_grows_with_refinement() {
        let coords = vec![Poly::from_i64(&[1]), Poly::from_i64(&[0, 1]), Poly::from_i64(&[0, 0, 0, 1])];
        let s = SystemMap::new(vec![CurveMap::new(coords, ratio(-1, 3), ratio(7, 5)).unwrap()]).unwrap();
        let mut last = 0.0;
        for g in [2usize, 3, 5, 9, 17] {
            let m = nondegeneracy_report(&s, g, 1e-9).unwrap().m_estimate();
            assert!(m >= last);
            last = m;
        }
    }

    #[test]
    fn fibering_examples() {
        let f = vec![MultiPoly::constant(2, int(1)), MultiPoly::var(2, 0), MultiPoly::var(2, 1)];
        let u = [int(1), int(3)];
        let out = fiber_substitution(&f, &u, 2, 8, None).unwrap();
        assert_eq!(out.d, 2);
        assert_eq!(out.curve.coords()[1], Poly::monomial(int(1), 5));
        assert_eq!(out.curve.coords()[2], Poly::monomial(int(3), 6));

        let prod = MultiPoly::new(2, vec![(vec![1, 1], int(1))]).unwrap();
        let out = fiber_substitution(&[MultiPoly::constant(2, int(1)), prod], &u, 2, 8, None).unwrap();
        assert_eq!(out.curve.coords()[1], Poly::monomial(int(3), 11));

        assert!(fiber_substitution(&f, &[int(1), int(0)], 2, 8, None).is_err());
    }

    #[test]
    fn fibering_retries_larger_d() {
        let f = vec![
            MultiPoly::new(2, vec![(vec![6, 0], int(1))]).unwrap(),
            MultiPoly::new(2, vec![(vec![0, 5], int(1))]).unwrap(),
        ];
        let u = [int(1), int(3)];
        let out = fiber_substitution(&f, &u, 2, 8, None).unwrap();
        assert_eq!(out.d, 4);
        assert_eq!(out.tried, vec![2, 3, 4]);
        let (lo, hi) = out.curve.interval();
        assert!(!out.curve.wronskian(&((lo + hi) / int(2))).is_zero());
        match fiber_substitution(&f, &u, 2, 3, None) {
            Err(Error::FiberingFailed { tried }) => assert_eq!(tried, vec![2, 3]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fibering_respects_domain() {
        let f = vec![MultiPoly::constant(2, int(1)), MultiPoly::var(2, 0), MultiPoly::var(2, 1)];
        let u = [int(1), int(3)];
        let b = [(int(-1), int(1)), (int(-1), int(1))];
        let out = fiber_substitution(&f, &u, 2, 8, Some(&b)).unwrap();
        let (_, t) = out.curve.interval();
        assert!(&int(3) * num_traits::pow(t.clone(), 6) <= int(1));
        assert!(*t < int(1));
    }

    #[test]
    fn cramer_examples() {
        let id = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        let v = cramer_lower_bound_check(&id, &[BigInt::from(3), BigInt::from(-5)], 1.0, 1.0).unwrap();
        assert!(v.holds);
        assert_eq!((v.lhs, v.rhs), (int(5), ratio(5, 2)));
        let g = vec![vec![int(1), int(0)], vec![int(0), int(2)]];
        let v = cramer_lower_bound_check(&g, &[BigInt::from(1), BigInt::from(0)], 2.0, 2.0).unwrap();
        assert!(v.holds);
        assert_eq!(v.rhs, ratio(1, 2));
        assert!(matches!(
            cramer_lower_bound_check(&g, &[BigInt::from(1), BigInt::from(0)], 3.0, 2.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let doc = r#"{"n": 2, "coords": [[[0, "1"]], [[1, "1"]], [[2, "1"]]], "interval": ["-1/2", "1/2"]}"#;
        let spec: CurveSpec = serde_json::from_str(doc).unwrap();
        let c = spec.build().unwrap();
        assert_eq!(c, CurveMap::veronese(2, ratio(-1, 2), ratio(1, 2)).unwrap());
        let again: CurveSpec = serde_json::from_str(&serde_json::to_string(&CurveSpec::of(&c)).unwrap()).unwrap();
        assert_eq!(again.build().unwrap(), c);
        let sys: SystemSpec = serde_json::from_str(r#"{"veronese": {"n": 3, "m": 2, "interval": [0, 1]}}"#).unwrap();
        assert_eq!(sys.build().unwrap().m(), 2);
    }
}
