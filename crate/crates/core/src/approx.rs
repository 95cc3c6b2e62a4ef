//! Approximation functions Ψ, dimension functions g, and the sums whose
//! convergence decides the metric dichotomies.

use std::cmp::Ordering;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{from_f64, int, CompensatedSum};

/// The function Ψ on positive integer heights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ApproxSpec", into = "ApproxSpec")]
pub enum ApproxFunction {
    /// `c · h^{-τ}`.
    PowerLaw { c: f64, tau: f64 },
    /// `c · h^{-τ} · (1 + ln h)^{-κ}`.
    LogPowerLaw { c: f64, tau: f64, kappa: f64 },
    /// Right-continuous step function through a table of `(h, value)`.
    Tabulated(Table),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    points: Vec<(u64, f64)>,
    monotone: bool,
}

impl Table {
    pub fn new(points: Vec<(u64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return invalid("empty Ψ table");
        }
        if points.iter().any(|&(h, _)| h == 0) {
            return invalid("Ψ table heights must be positive");
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return invalid("Ψ table heights must be strictly increasing");
        }
        if points.iter().any(|&(_, v)| !v.is_finite() || v < 0.0) {
            return invalid("Ψ table values must be finite and non-negative");
        }
        let monotone = points.windows(2).all(|w| w[0].1 >= w[1].1);
        Ok(Table { points, monotone })
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    fn lookup(&self, h: f64) -> Result<f64> {
        let idx = self.points.partition_point(|&(x, _)| (x as f64) <= h);
        if idx == 0 {
            return Err(Error::InvalidInput(format!(
                "height {h} lies below the first table point {}",
                self.points[0].0
            )));
        }
        Ok(self.points[idx - 1].1)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ApproxSpec {
    PowerLaw {
        #[serde(default = "one")]
        c: f64,
        tau: f64,
    },
    LogPowerLaw {
        #[serde(default = "one")]
        c: f64,
        tau: f64,
        kappa: f64,
    },
    Tabulated { points: Vec<(u64, f64)> },
}

fn one() -> f64 {
    1.0
}

impl TryFrom<ApproxSpec> for ApproxFunction {
    type Error = Error;
    fn try_from(spec: ApproxSpec) -> Result<Self> {
        match spec {
            ApproxSpec::PowerLaw { c, tau } => ApproxFunction::power_law(c, tau),
            ApproxSpec::LogPowerLaw { c, tau, kappa } => ApproxFunction::log_power_law(c, tau, kappa),
            ApproxSpec::Tabulated { points } => Table::new(points).map(ApproxFunction::Tabulated),
        }
    }
}

impl From<ApproxFunction> for ApproxSpec {
    fn from(f: ApproxFunction) -> Self {
        match f {
            ApproxFunction::PowerLaw { c, tau } => ApproxSpec::PowerLaw { c, tau },
            ApproxFunction::LogPowerLaw { c, tau, kappa } => ApproxSpec::LogPowerLaw { c, tau, kappa },
            ApproxFunction::Tabulated(t) => ApproxSpec::Tabulated { points: t.points },
        }
    }
}

impl ApproxFunction {
    pub fn power_law(c: f64, tau: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return invalid(format!("power-law coefficient must be positive, got {c}"));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return invalid(format!("power-law exponent must be non-negative, got {tau}"));
        }
        Ok(ApproxFunction::PowerLaw { c, tau })
    }

    pub fn log_power_law(c: f64, tau: f64, kappa: f64) -> Result<Self> {
        ApproxFunction::power_law(c, tau)?;
        if !kappa.is_finite() {
            return invalid("log exponent must be finite");
        }
        Ok(ApproxFunction::LogPowerLaw { c, tau, kappa })
    }

    pub fn tabulated(points: Vec<(u64, f64)>) -> Result<Self> {
        Table::new(points).map(ApproxFunction::Tabulated)
    }

    /// Ψ ≡ 0.
    pub fn zero() -> Self {
        ApproxFunction::Tabulated(Table { points: vec![(1, 0.0)], monotone: true })
    }

    /// Reads a two-column `h,value` CSV; a header row is optional.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return invalid(format!("row {} has {} columns, expected 2", i + 1, rec.len()));
            }
            let h = rec[0].parse::<u64>();
            if i == 0 && h.is_err() && rec[1].parse::<f64>().is_err() {
                continue; // header
            }
            let h = h.map_err(|_| Error::InvalidInput(format!("bad height {:?} on row {}", &rec[0], i + 1)))?;
            let v = rec[1]
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad value {:?} on row {}", &rec[1], i + 1)))?;
            points.push((h, v));
        }
        ApproxFunction::tabulated(points)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        ApproxFunction::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn is_monotone(&self) -> bool {
        match self {
            ApproxFunction::PowerLaw { .. } => true,
            // (1 + ln h)^{-κ} is non-increasing only for κ ≥ 0
            ApproxFunction::LogPowerLaw { kappa, .. } => *kappa >= 0.0,
            ApproxFunction::Tabulated(t) => t.monotone,
        }
    }

    pub fn evaluate(&self, h: u64) -> Result<f64> {
        if h == 0 {
            return invalid("Ψ is defined on heights h ≥ 1");
        }
        self.evaluate_real(h as f64)
    }

    /// Ψ at a real argument `h ≥ 1` (the weights `β = H/δ₀` need not be
    /// integers). Tabulated kinds use the largest table point `≤ h`.
    pub fn evaluate_real(&self, h: f64) -> Result<f64> {
        if !(h >= 1.0) {
            return invalid(format!("Ψ is defined on h ≥ 1, got {h}"));
        }
        Ok(match self {
            ApproxFunction::PowerLaw { c, tau } => c * h.powf(-tau),
            ApproxFunction::LogPowerLaw { c, tau, kappa } => c * h.powf(-tau) * (1.0 + h.ln()).powf(-kappa),
            ApproxFunction::Tabulated(t) => t.lookup(h)?,
        })
    }

    /// `Ψ(1..=h_max)` with index 0 unused.
    pub fn table_up_to(&self, h_max: u64) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(h_max as usize + 1);
        out.push(f64::NAN);
        for h in 1..=h_max {
            out.push(self.evaluate(h)?);
        }
        Ok(out)
    }

    fn power_params(&self) -> Option<(f64, f64, f64)> {
        match *self {
            ApproxFunction::PowerLaw { c, tau } => Some((c, tau, 0.0)),
            ApproxFunction::LogPowerLaw { c, tau, kappa } => Some((c, tau, kappa)),
            ApproxFunction::Tabulated(_) => None,
        }
    }
}

fn check_nm(n: u32, m: u32) -> Result<()> {
    if m < 1 || n < m {
        return invalid(format!("need n ≥ m ≥ 1, got n = {n}, m = {m}"));
    }
    Ok(())
}

/// Partial sums of `Σ h^{n−m} Ψ(h)^m` at each cutoff (ascending), computed in
/// one ascending compensated pass.
pub fn partial_sums_khintchine(psi: &ApproxFunction, n: u32, m: u32, cutoffs: &[u64]) -> Result<Vec<f64>> {
    check_nm(n, m)?;
    if cutoffs.iter().any(|&c| c == 0) || cutoffs.windows(2).any(|w| w[0] > w[1]) {
        return invalid("cutoffs must be positive and ascending");
    }
    let mut out = Vec::with_capacity(cutoffs.len());
    let mut acc = CompensatedSum::new();
    let mut next = cutoffs.iter().peekable();
    let last = cutoffs.last().copied().unwrap_or(0);
    for h in 1..=last {
        let term = (h as f64).powi((n - m) as i32) * psi.evaluate(h)?.powi(m as i32);
        acc.add(term);
        if !acc.value().is_finite() {
            return Err(Error::Overflow { terms: h });
        }
        while next.peek().is_some_and(|&&c| c == h) {
            out.push(acc.value());
            next.next();
        }
    }
    Ok(out)
}

/// `Σ_{h=1}^{h_max} h^{n−m} Ψ(h)^m`.
pub fn partial_sum_khintchine(psi: &ApproxFunction, n: u32, m: u32, h_max: u64) -> Result<f64> {
    if h_max == 0 {
        return invalid("h_max must be at least 1");
    }
    Ok(partial_sums_khintchine(psi, n, m, &[h_max])?[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Convergent,
    Divergent,
    Undetermined,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::Convergent => "Convergent",
            Classification::Divergent => "Divergent",
            Classification::Undetermined => "Undetermined",
        };
        f.write_str(s)
    }
}

/// Outcome of classifying `Σ h^{n−m} Ψ(h)^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumVerdict {
    pub classification: Classification,
    pub partial_sums: Vec<(u64, f64)>,
    /// `n − m − mτ` for power laws.
    pub index: Option<f64>,
    /// `(n + 1 − m)/m`.
    pub threshold: f64,
}

/// Index test for power-law Ψ: convergent iff `τ > (n+1−m)/m`; at the
/// threshold the pure power law diverges and the log-corrected law converges
/// iff `κm > 1`.
pub fn classify_power_law(psi: &ApproxFunction, n: u32, m: u32) -> Result<SumVerdict> {
    check_nm(n, m)?;
    let Some((_, tau, kappa)) = psi.power_params() else {
        return invalid("classify_power_law needs a power-law Ψ");
    };
    let threshold = f64::from(n + 1 - m) / f64::from(m);
    let scaled = f64::from(m) * tau;
    // τ is compared as the exact dyadic it stores, not after rounding m·τ
    let exact_scaled = from_f64(tau)? * int(i64::from(m));
    let classification = match exact_scaled.cmp(&int(i64::from(n + 1 - m))) {
        Ordering::Greater => Classification::Convergent,
        Ordering::Less => Classification::Divergent,
        Ordering::Equal if kappa * f64::from(m) > 1.0 => Classification::Convergent,
        Ordering::Equal => Classification::Divergent,
    };
    Ok(SumVerdict {
        classification,
        partial_sums: Vec::new(),
        index: Some(f64::from(n) - f64::from(m) - scaled),
        threshold,
    })
}

/// Classification for any Ψ plus partial sums at `cutoffs`; tabulated inputs
/// are always `Undetermined`.
pub fn classify(psi: &ApproxFunction, n: u32, m: u32, cutoffs: &[u64]) -> Result<SumVerdict> {
    check_nm(n, m)?;
    let mut verdict = match psi {
        ApproxFunction::Tabulated(_) => SumVerdict {
            classification: Classification::Undetermined,
            partial_sums: Vec::new(),
            index: None,
            threshold: f64::from(n + 1 - m) / f64::from(m),
        },
        _ => classify_power_law(psi, n, m)?,
    };
    let sums = partial_sums_khintchine(psi, n, m, cutoffs)?;
    verdict.partial_sums = cutoffs.iter().copied().zip(sums).collect();
    Ok(verdict)
}

/// `Σ_{r=1}^{r_max} Ψ(r)^{s−nm} r^{(n+1)m−s}`, defined for `nm < s ≤ m(n+1)`.
pub fn partial_sum_hausdorff(psi: &ApproxFunction, n: u32, m: u32, s: f64, r_max: u64) -> Result<f64> {
    check_nm(n, m)?;
    let nm = f64::from(n * m);
    let top = f64::from(m * (n + 1));
    if !(s > nm && s <= top) {
        return invalid(format!("s = {s} outside ({nm}, {top}]"));
    }
    if r_max == 0 {
        return invalid("r_max must be at least 1");
    }
    let mut acc = CompensatedSum::new();
    for r in 1..=r_max {
        let term = psi.evaluate(r)?.powf(s - nm) * (r as f64).powf(top - s);
        acc.add(term);
        if !acc.value().is_finite() {
            return Err(Error::Overflow { terms: r });
        }
    }
    Ok(acc.value())
}

/// Dimension function `g` defining a generalised Hausdorff measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DimensionFunction {
    /// `g(r) = r^s`.
    Power { s: f64 },
    /// Piecewise linear through `(0, 0)` and the samples, extended linearly
    /// past the last sample.
    Sampled { points: Vec<(f64, f64)> },
}

impl DimensionFunction {
    pub fn power(s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return invalid(format!("dimension exponent must be positive, got {s}"));
        }
        Ok(DimensionFunction::Power { s })
    }

    pub fn sampled(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return invalid("no samples");
        }
        if points.iter().any(|&(r, v)| !(r > 0.0 && r.is_finite() && v.is_finite())) {
            return invalid("samples need positive finite r and finite g");
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return invalid("sample abscissae must be strictly increasing");
        }
        Ok(DimensionFunction::Sampled { points })
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match self {
            DimensionFunction::Power { s } => r.powf(*s),
            DimensionFunction::Sampled { points } => {
                let idx = points.partition_point(|&(x, _)| x < r);
                let (x0, y0, x1, y1) = if idx == 0 {
                    (0.0, 0.0, points[0].0, points[0].1)
                } else if idx < points.len() {
                    (points[idx - 1].0, points[idx - 1].1, points[idx].0, points[idx].1)
                } else if points.len() >= 2 {
                    let k = points.len();
                    (points[k - 2].0, points[k - 2].1, points[k - 1].0, points[k - 1].1)
                } else {
                    (0.0, 0.0, points[0].0, points[0].1)
                };
                y0 + (y1 - y0) * (r - x0) / (x1 - x0)
            }
        }
    }

    /// `g̃(r) = r^{m−d} g(r)`, with `g̃(0) = 0`.
    pub fn reduced(&self, r: f64, d: u32, m: u32) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        r.powi(m as i32 - d as i32) * self.eval(r)
    }

    fn grid(&self) -> Vec<f64> {
        let mut grid: Vec<f64> = (0..=240).map(|k| 10f64.powf(-12.0 + k as f64 * 0.05)).collect();
        if let DimensionFunction::Sampled { points } = self {
            grid.extend(points.iter().map(|p| p.0));
            grid.sort_by(f64::total_cmp);
            grid.dedup();
        }
        grid
    }

    /// Checks on a sampled grid that `g` increases, tends to 0 at `0⁺`, and
    /// that `r^{−m} g̃(r)` does not increase.
    pub fn validate(&self, d: u32, m: u32) -> Result<()> {
        if d < m {
            return invalid(format!("need d ≥ m, got d = {d}, m = {m}"));
        }
        let grid = self.grid();
        let values: Vec<f64> = grid.iter().map(|&r| self.eval(r)).collect();
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("g is not increasing on the sampling grid");
        }
        if !(values[0] >= 0.0 && values[0] < values[values.len() - 1]) {
            return invalid("g does not tend to 0 at 0⁺ on the sampling grid");
        }
        let ratio: Vec<f64> = grid
            .iter()
            .map(|&r| r.powi(-(m as i32)) * self.reduced(r, d, m))
            .collect();
        let tol = 1e-12;
        if ratio.windows(2).any(|w| w[1] > w[0] * (1.0 + tol)) {
            return invalid("r^{-m} g̃(r) increases on the sampling grid");
        }
        Ok(())
    }
}

/// Direct partial sum `Σ_{h ≤ h_max} h^n g̃(Ψ(h)/h)` and its dyadic
/// condensation `Σ_{2^t ≤ h_max} 2^{t(n+1)} g̃(Ψ(2^t)/2^t)`.
pub fn partial_sum_divergence_g(
    psi: &ApproxFunction,
    g: &DimensionFunction,
    n: u32,
    d: u32,
    m: u32,
    h_max: u64,
) -> Result<(f64, f64)> {
    check_nm(n, m)?;
    if !psi.is_monotone() {
        return invalid("the condensation comparison needs a monotone Ψ");
    }
    g.validate(d, m)?;
    if h_max == 0 {
        return invalid("h_max must be at least 1");
    }
    let mut direct = CompensatedSum::new();
    for h in 1..=h_max {
        let hf = h as f64;
        direct.add(hf.powi(n as i32) * g.reduced(psi.evaluate(h)? / hf, d, m));
        if !direct.value().is_finite() {
            return Err(Error::Overflow { terms: h });
        }
    }
    let mut condensed = CompensatedSum::new();
    let mut t = 0u32;
    while t < 64 && (1u64 << t) <= h_max {
        let p = (1u64 << t) as f64;
        condensed.add(p.powi(n as i32 + 1) * g.reduced(psi.evaluate(1u64 << t)? / p, d, m));
        t += 1;
    }
    if !condensed.value().is_finite() {
        return Err(Error::Overflow { terms: u64::from(t) });
    }
    Ok((direct.value(), condensed.value()))
}

/// Estimate of the lower order `liminf −ln Ψ(h)/ln h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    pub value: f64,
    /// True when the value is the exact lower order rather than a grid
    /// minimum.
    pub exact: bool,
}

/// Lower order of `1/Ψ`: exact for power laws, otherwise the minimum of
/// `−ln Ψ(h)/ln h` over the upper half of the grid.
pub fn lower_order(psi: &ApproxFunction, h_grid: &[u64]) -> Result<OrderEstimate> {
    if h_grid.len() < 3 {
        return invalid("the grid needs at least 3 points");
    }
    if h_grid.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("the grid must be strictly increasing");
    }
    if h_grid[0] <= 1 {
        return invalid("the grid must start above h = 1 (ln 1 = 0)");
    }
    if let Some((_, tau, _)) = psi.power_params() {
        return Ok(OrderEstimate { value: tau, exact: true });
    }
    let tail = &h_grid[h_grid.len() / 2..];
    let mut best = f64::INFINITY;
    for &h in tail {
        let v = psi.evaluate(h)?;
        let ratio = if v > 0.0 { -v.ln() / (h as f64).ln() } else { f64::INFINITY };
        best = best.min(ratio);
    }
    Ok(OrderEstimate { value: best, exact: false })
}

/// `min{d, (n+1)/(τ+1) + d − m}`.
pub fn dimension_lower_bound(n: u32, m: u32, d: u32, tau: f64) -> Result<f64> {
    check_nm(n, m)?;
    if d < m {
        return invalid(format!("need d ≥ m, got d = {d}, m = {m}"));
    }
    if tau == -1.0 {
        return invalid("τ = −1 is a pole of the bound");
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return invalid(format!("τ must be non-negative, got {tau}"));
    }
    let candidate = f64::from(n + 1) / (tau + 1.0) + f64::from(d) - f64::from(m);
    Ok(candidate.min(f64::from(d)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(c: f64, tau: f64) -> ApproxFunction {
        ApproxFunction::power_law(c, tau).unwrap()
    }

    #[test]
    fn evaluates_each_kind() {
        assert_eq!(pl(1.0, 2.5).evaluate(4).unwrap(), 0.03125);
        assert_eq!(pl(2.0, 0.0).evaluate(7).unwrap(), 2.0);
        let t = ApproxFunction::tabulated(vec![(1, 0.5), (8, 0.1)]).unwrap();
        assert_eq!(t.evaluate(10).unwrap(), 0.1);
        assert_eq!(t.evaluate(7).unwrap(), 0.5);
        assert!(pl(1.0, 1.0).evaluate(0).is_err());
        let late = ApproxFunction::tabulated(vec![(5, 0.5)]).unwrap();
        assert!(late.evaluate(4).is_err());
    }

    #[test]
    fn table_validation() {
        assert!(ApproxFunction::tabulated(vec![(2, 0.1), (2, 0.05)]).is_err());
        assert!(ApproxFunction::tabulated(vec![(1, -0.1)]).is_err());
        let up = ApproxFunction::tabulated(vec![(1, 0.1), (2, 0.2)]).unwrap();
        assert!(!up.is_monotone());
    }

    #[test]
    fn csv_loading_with_and_without_header() {
        let with = ApproxFunction::from_csv_reader("h,value\n1,0.5\n8,0.1\n".as_bytes()).unwrap();
        let without = ApproxFunction::from_csv_reader("1, 0.5\n8, 0.1\n".as_bytes()).unwrap();
        assert_eq!(with, without);
        assert!(ApproxFunction::from_csv_reader("1,0.5\n1,0.4\n".as_bytes()).is_err());
        assert!(ApproxFunction::from_csv_reader("1,0.5,3\n".as_bytes()).is_err());
    }

    #[test]
    fn khintchine_sums() {
        // 1 + 2 * 2^-3
        assert_eq!(partial_sum_khintchine(&pl(1.0, 3.0), 2, 1, 2).unwrap(), 1.25);
        assert_eq!(partial_sum_khintchine(&ApproxFunction::zero(), 3, 2, 100).unwrap(), 0.0);
        let sums = partial_sums_khintchine(&pl(1.0, 2.0), 2, 1, &[100, 10_000, 1_000_000]).unwrap();
        // harmonic growth: ln(100) per factor 100
        assert!(sums[1] - sums[0] > 4.0 && sums[2] - sums[1] > 4.0);
    }

    #[test]
    fn overflow_is_reported() {
        let big = pl(1e307, 0.0);
        assert!(matches!(partial_sum_khintchine(&big, 3, 1, 10), Err(Error::Overflow { .. })));
    }

    #[test]
    fn classification_examples() {
        let v = classify_power_law(&pl(1.0, 2.0), 2, 1).unwrap();
        assert_eq!(v.classification, Classification::Divergent);
        assert_eq!(classify_power_law(&pl(1.0, 2.5), 2, 1).unwrap().classification, Classification::Convergent);
        let v = classify_power_law(&pl(1.0, 1.0), 3, 2).unwrap();
        assert_eq!(v.classification, Classification::Divergent);
        assert_eq!(v.threshold, 1.0);
        assert_eq!(v.index, Some(-1.0));
        let log_conv = ApproxFunction::log_power_law(1.0, 1.0, 0.6).unwrap();
        assert_eq!(classify_power_law(&log_conv, 3, 2).unwrap().classification, Classification::Convergent);
        let log_div = ApproxFunction::log_power_law(1.0, 1.0, 0.5).unwrap();
        assert_eq!(classify_power_law(&log_div, 3, 2).unwrap().classification, Classification::Divergent);
        let table = ApproxFunction::tabulated(vec![(1, 0.5)]).unwrap();
        assert!(classify_power_law(&table, 2, 1).is_err());
        let v = classify(&table, 2, 1, &[10, 20]).unwrap();
        assert_eq!(v.classification, Classification::Undetermined);
        assert_eq!(v.partial_sums, vec![(10, 0.5 * 55.0), (20, 0.5 * 210.0)]);
    }

    #[test]
    fn hausdorff_sums() {
        assert_eq!(partial_sum_hausdorff(&pl(1.0, 1.0), 1, 1, 1.5, 3).unwrap(), 3.0);
        assert_eq!(partial_sum_hausdorff(&ApproxFunction::zero(), 2, 1, 2.5, 50).unwrap(), 0.0);
        assert!(partial_sum_hausdorff(&pl(1.0, 1.0), 2, 1, 2.0, 5).is_err());
        assert!(partial_sum_hausdorff(&pl(1.0, 1.0), 2, 1, 3.5, 5).is_err());
    }

    #[test]
    fn hausdorff_at_top_exponent_is_sum_of_psi_powers() {
        let psi = pl(0.7, 1.3);
        let top = partial_sum_hausdorff(&psi, 1, 1, 2.0, 500).unwrap();
        // n = m = 1: Khintchine weights h^0 Ψ^1
        let k = partial_sum_khintchine(&psi, 1, 1, 500).unwrap();
        assert!((top - k).abs() <= 1e-12 * k);
    }

    #[test]
    fn divergence_g_examples() {
        // g(r) = r^d with d = m reproduces the Khintchine summands
        let psi = pl(1.0, 1.7);
        let g = DimensionFunction::power(1.0).unwrap();
        for h in 1..50u64 {
            let hf = h as f64;
            let term = hf.powi(2) * g.reduced(psi.evaluate(h).unwrap() / hf, 1, 1);
            let k = hf * psi.evaluate(h).unwrap();
            assert!((term - k).abs() <= 1e-12 * k);
        }
        let g = DimensionFunction::power(0.75).unwrap();
        let psi = pl(1.0, 3.0);
        let (d3, _) = partial_sum_divergence_g(&psi, &g, 2, 1, 1, 1_000).unwrap();
        let (d5, _) = partial_sum_divergence_g(&psi, &g, 2, 1, 1, 100_000).unwrap();
        // term h^{-1}: harmonic numbers
        let harmonic = |n: u64| (1..=n).map(|k| 1.0 / k as f64).sum::<f64>();
        assert!((d3 - harmonic(1_000)).abs() < 1e-9);
        assert!((d5 - harmonic(100_000)).abs() < 1e-8);
        let (a, b) = partial_sum_divergence_g(&ApproxFunction::zero(), &g, 2, 1, 1, 100).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
        let bumpy = ApproxFunction::tabulated(vec![(1, 0.1), (2, 0.2)]).unwrap();
        assert!(partial_sum_divergence_g(&bumpy, &g, 2, 1, 1, 10).is_err());
    }

    #[test]
    fn dimension_function_validation() {
        assert!(DimensionFunction::power(0.75).unwrap().validate(1, 1).is_ok());
        // r^{-d} g(r) = r^{0.5} increases
        assert!(DimensionFunction::power(1.5).unwrap().validate(1, 1).is_err());
        let sampled = DimensionFunction::sampled(vec![(0.5, 0.4), (1.0, 0.7)]).unwrap();
        assert!(sampled.validate(1, 1).is_ok());
        assert_eq!(sampled.eval(0.25), 0.2);
        let flat = DimensionFunction::sampled(vec![(0.5, 0.4), (1.0, 0.4)]).unwrap();
        assert!(flat.validate(1, 1).is_err());
    }

    #[test]
    fn lower_order_examples() {
        let grid = [10, 100, 1000, 10_000];
        assert_eq!(lower_order(&pl(1.0, 2.5), &grid).unwrap(), OrderEstimate { value: 2.5, exact: true });
        assert_eq!(lower_order(&pl(5.0, 2.5), &grid).unwrap().value, 2.5);
        let h = 1_000_000f64;
        let numeric = -(5.0 * h.powf(-2.5)).ln() / h.ln();
        assert!((numeric - 2.5).abs() < 0.13);
        assert!(lower_order(&pl(1.0, 1.0), &[1, 10, 100]).is_err());
        assert!(lower_order(&pl(1.0, 1.0), &[10, 100]).is_err());
        assert!(lower_order(&pl(1.0, 1.0), &[10, 10, 100]).is_err());
    }

    #[test]
    fn lower_order_two_envelopes() {
        let grid: Vec<u64> = (1..=12).map(|k| 1u64 << (2 * k)).collect();
        let points: Vec<(u64, f64)> = grid
            .iter()
            .enumerate()
            .map(|(i, &h)| (h, (h as f64).powf(if i % 2 == 0 { -2.0 } else { -3.0 })))
            .collect();
        let psi = ApproxFunction::tabulated(points).unwrap();
        let est = lower_order(&psi, &grid).unwrap();
        assert!(!est.exact);
        assert!((est.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_bound_examples() {
        assert_eq!(dimension_lower_bound(2, 1, 1, 3.0).unwrap(), 0.75);
        assert_eq!(dimension_lower_bound(3, 2, 2, 1.0).unwrap(), 2.0);
        assert_eq!(dimension_lower_bound(5, 2, 3, 5.0).unwrap(), 2.0);
        assert!(dimension_lower_bound(2, 1, 1, -1.0).is_err());
        assert!(dimension_lower_bound(1, 2, 2, 1.0).is_err());
    }

    #[test]
    fn serde_round_trip_validates() {
        let f: ApproxFunction = serde_json::from_str(r#"{"kind":"power_law","tau":2.5}"#).unwrap();
        assert_eq!(f, pl(1.0, 2.5));
        assert!(serde_json::from_str::<ApproxFunction>(r#"{"kind":"power_law","c":-1,"tau":2.5}"#).is_err());
        let t: ApproxFunction = serde_json::from_str(r#"{"kind":"tabulated","points":[[1,0.5],[8,0.1]]}"#).unwrap();
        assert!(t.is_monotone());
    }
}
