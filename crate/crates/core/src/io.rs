//! CSV output for experiment tables.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! inputs always produce byte-identical files.

use std::io::Write;

use crate::approx::SumVerdict;
use crate::error::Result;
use crate::exact::format_rational;
use crate::measure::{CellDecomposition, DichotomyTable};
use crate::solver::{BlockCount, SolutionRecord};
use crate::ubiquity::{Covering, ResonantPoint};

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

pub fn write_solutions<W: Write>(out: W, records: &[SolutionRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["height", "block", "form", "point", "max_residual", "residuals", "derivative_profile"])?;
    for r in records {
        let point: Vec<String> = r.point.coords().iter().map(format_rational).collect();
        let profile: Vec<String> = r.derivative_profile.iter().map(|row| join(row, " ")).collect();
        w.write_record([
            r.height().to_string(),
            r.block.to_string(),
            join(r.form.coeffs(), " "),
            point.join(" "),
            r.max_residual().to_string(),
            join(&r.residuals, " "),
            profile.join("; "),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dichotomy<W: Write>(out: W, table: &DichotomyTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "hit_fraction", "ci_lo", "ci_hi", "mean_count", "heuristic"])?;
    for r in &table.rows {
        w.write_record([
            r.t.to_string(),
            r.hit_fraction.to_string(),
            r.ci_lo.to_string(),
            r.ci_hi.to_string(),
            r.mean_count.to_string(),
            r.heuristic.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_block_counts<W: Write>(out: W, rows: &[BlockCount]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "count", "heuristic"])?;
    for r in rows {
        w.write_record([r.t.to_string(), r.count.to_string(), r.heuristic.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_partial_sums<W: Write>(out: W, verdict: &SumVerdict) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["cutoff", "partial_sum"])?;
    for (h, s) in &verdict.partial_sums {
        w.write_record([h.to_string(), s.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_cells<W: Write>(out: W, decompositions: &[CellDecomposition]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["form", "j", "psi", "left_lo", "left_hi", "right_lo", "right_hi", "length", "inf_derivative", "bound_ok"])?;
    for d in decompositions {
        let ok = d.length_bound_holds();
        for c in &d.cells {
            w.write_record([
                join(d.form.coeffs(), " "),
                d.j.to_string(),
                d.psi_value.to_string(),
                format_rational(&c.left.lo),
                format_rational(&c.left.hi),
                format_rational(&c.right.lo),
                format_rational(&c.right.hi),
                c.length().to_string(),
                format_rational(&c.inf_derivative),
                ok.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_coverings<W: Write>(out: W, rows: &[Covering]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "eta", "rho", "points", "fraction", "ci_lo", "ci_hi", "exact"])?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            r.eta.to_string(),
            r.rho.to_string(),
            r.points.to_string(),
            r.fraction.to_string(),
            r.ci.0.to_string(),
            r.ci.1.to_string(),
            r.exact.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Resonant points as a JSON array of records.
pub fn write_resonant_json<W: Write>(out: W, points: &[ResonantPoint]) -> Result<()> {
    let records: Vec<_> = points.iter().map(ResonantPoint::to_record).collect();
    serde_json::to_writer_pretty(out, &records)?;
    Ok(())
}
