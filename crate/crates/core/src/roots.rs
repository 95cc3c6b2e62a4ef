//! Real root isolation on a closed interval.
//!
//! Descartes' rule of signs with bisection (Vincent–Collins–Akritas) on the
//! square-free part, carried out entirely in integer arithmetic. Every
//! isolating bracket is either an exact rational root (`lo == hi`) or an open
//! interval on whose endpoints the square-free part has opposite signs.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, Zero};

use crate::exact::{to_f64, Rational};
use crate::poly::Poly;

/// Isolating bracket of one real root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealRoot {
    pub lo: Rational,
    pub hi: Rational,
}

impl RealRoot {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn approx(&self) -> f64 {
        to_f64(&self.midpoint())
    }
}

/// Position inside the unit interval: `k / 2^level`.
#[derive(Debug, Clone)]
struct Dyadic {
    k: BigInt,
    level: u32,
}

#[derive(Debug, Clone)]
enum UnitRoot {
    Exact(Dyadic),
    /// Root strictly inside `(k/2^level, (k+1)/2^level)`.
    Open(Dyadic),
}

/// Square-free part of a polynomial pulled back to the unit interval.
pub struct RootIsolator {
    /// Integer coefficients of `Q(y) ∝ P(lo + width·y)`.
    unit: Vec<BigInt>,
    lo: Rational,
    width: Rational,
    roots: Vec<UnitRoot>,
}

impl RootIsolator {
    /// Isolates the distinct real roots of `p` in `[lo, hi]`.
    ///
    /// Returns `None` when `p` is the zero polynomial.
    pub fn new(p: &Poly, lo: &Rational, hi: &Rational) -> Option<Self> {
        assert!(lo <= hi, "empty interval");
        if p.is_zero() {
            return None;
        }
        let sqf = p.squarefree();
        let width = hi - lo;
        let unit = if width.is_zero() {
            Vec::new()
        } else {
            compose_affine(&sqf, lo, &width).primitive_integer()
        };
        let mut iso = RootIsolator {
            unit,
            lo: lo.clone(),
            width,
            roots: Vec::new(),
        };
        if iso.width.is_zero() {
            if sqf.eval(lo).is_zero() {
                iso.roots.push(UnitRoot::Exact(Dyadic { k: BigInt::zero(), level: 0 }));
            }
            return Some(iso);
        }
        iso.isolate();
        Some(iso)
    }

    fn isolate(&mut self) {
        if self.unit.len() <= 1 {
            return;
        }
        let mut found = Vec::new();
        if self.unit[0].is_zero() {
            found.push(UnitRoot::Exact(Dyadic { k: BigInt::zero(), level: 0 }));
        }
        if self.unit.iter().fold(BigInt::zero(), |acc, c| acc + c).is_zero() {
            found.push(UnitRoot::Exact(Dyadic { k: BigInt::from(1), level: 0 }));
        }
        let mut stack = vec![(self.unit.clone(), Dyadic { k: BigInt::zero(), level: 0 })];
        while let Some((q, pos)) = stack.pop() {
            let q = strip_low_zeros(q);
            match variations_on_unit(&q) {
                0 => {}
                1 => found.push(UnitRoot::Open(pos)),
                _ => {
                    let d = q.len() - 1;
                    let left = halve(&q);
                    let mid_value: BigInt = left.iter().fold(BigInt::zero(), |acc, c| acc + c);
                    let child_level = pos.level + 1;
                    let left_k: BigInt = &pos.k * 2;
                    if mid_value.is_zero() {
                        found.push(UnitRoot::Exact(Dyadic {
                            k: &left_k + 1,
                            level: child_level,
                        }));
                    }
                    let right = taylor_shift_one(&left);
                    debug_assert_eq!(left.len(), d + 1);
                    stack.push((right, Dyadic { k: &left_k + 1, level: child_level }));
                    stack.push((left, Dyadic { k: left_k, level: child_level }));
                }
            }
        }
        found.sort_by(|a, b| unit_lo(a).cmp_dyadic(&unit_lo(b)));
        self.roots = found;
    }

    pub fn count(&self) -> usize {
        self.roots.len()
    }

    /// Brackets in the original coordinates, ascending.
    pub fn brackets(&self) -> Vec<RealRoot> {
        self.roots.iter().map(|r| self.to_real(r)).collect()
    }

    /// Bisects every open bracket until its width is at most `2^-bits`.
    pub fn refine(&mut self, bits: u32) {
        let extra = log2_ceil(&self.width);
        let target = (bits as i64 + extra).max(0) as u32;
        let unit = &self.unit;
        for r in &mut self.roots {
            if let UnitRoot::Open(pos) = r {
                if let Some(exact) = refine_unit(unit, pos, target) {
                    *r = UnitRoot::Exact(exact);
                }
            }
        }
    }

    /// Refined brackets, each of width at most `2^-bits`.
    pub fn refined(mut self, bits: u32) -> Vec<RealRoot> {
        self.refine(bits);
        self.brackets()
    }

    fn to_real(&self, r: &UnitRoot) -> RealRoot {
        let at = |k: &BigInt, level: u32| -> Rational {
            &self.lo + &self.width * Rational::new(k.clone(), BigInt::from(1) << level as usize)
        };
        match r {
            UnitRoot::Exact(p) => {
                let x = at(&p.k, p.level);
                RealRoot { lo: x.clone(), hi: x }
            }
            UnitRoot::Open(p) => RealRoot {
                lo: at(&p.k, p.level),
                hi: at(&(&p.k + 1), p.level),
            },
        }
    }
}

fn unit_lo(r: &UnitRoot) -> Dyadic {
    match r {
        UnitRoot::Exact(p) | UnitRoot::Open(p) => p.clone(),
    }
}

impl Dyadic {
    fn cmp_dyadic(&self, other: &Dyadic) -> Ordering {
        let l = self.level.max(other.level);
        let a = &self.k << (l - self.level) as usize;
        let b = &other.k << (l - other.level) as usize;
        a.cmp(&b)
    }
}

/// Convenience wrapper: refined brackets of the real roots of `p` in
/// `[lo, hi]`; empty for the zero polynomial.
pub fn real_roots(p: &Poly, lo: &Rational, hi: &Rational, bits: u32) -> Vec<RealRoot> {
    RootIsolator::new(p, lo, hi)
        .map(|iso| iso.refined(bits))
        .unwrap_or_default()
}

fn log2_ceil(w: &Rational) -> i64 {
    if w.is_zero() {
        return 0;
    }
    let n = w.numer().abs().bits() as i64;
    let d = w.denom().bits() as i64;
    n - d + 1
}

/// `p(lo + width·y)` as a polynomial in `y`.
fn compose_affine(p: &Poly, lo: &Rational, width: &Rational) -> Poly {
    let lin = Poly::new(vec![lo.clone(), width.clone()]);
    let mut acc = Poly::zero();
    for c in p.coeffs().iter().rev() {
        acc = &(&acc * &lin) + &Poly::constant(c.clone());
    }
    acc
}

fn strip_low_zeros(mut q: Vec<BigInt>) -> Vec<BigInt> {
    let zeros = q.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        q.drain(..zeros);
    }
    q
}

/// `2^d q(y/2)`.
fn halve(q: &[BigInt]) -> Vec<BigInt> {
    let d = q.len() - 1;
    q.iter()
        .enumerate()
        .map(|(i, c)| c << (d - i))
        .collect()
}

/// `q(y + 1)`.
fn taylor_shift_one(q: &[BigInt]) -> Vec<BigInt> {
    let mut a = q.to_vec();
    let n = a.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = a[j + 1].clone();
            a[j] += t;
        }
    }
    a
}

/// Sign variations of `(1+y)^d q(1/(1+y))`, an upper bound on the number of
/// roots of `q` in `(0, 1)` that is exact when it is 0 or 1.
fn variations_on_unit(q: &[BigInt]) -> usize {
    if q.len() <= 1 {
        return 0;
    }
    let reversed: Vec<BigInt> = q.iter().rev().cloned().collect();
    let shifted = strip_low_zeros(taylor_shift_one(&reversed));
    let mut count = 0;
    let mut last = Sign::NoSign;
    for c in &shifted {
        let s = c.sign();
        if s == Sign::NoSign {
            continue;
        }
        if last != Sign::NoSign && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Sign of `q(k / 2^level)`.
fn sign_at(q: &[BigInt], k: &BigInt, level: u32) -> Sign {
    // sum q_i k^i 2^{level (d - i)}
    let d = q.len() - 1;
    let mut acc = BigInt::zero();
    let mut kp = BigInt::from(1);
    for (i, c) in q.iter().enumerate() {
        if !c.is_zero() {
            acc += c * &kp << (level as usize * (d - i));
        }
        if i < d {
            kp *= k;
        }
    }
    acc.sign()
}

fn refine_unit(q: &[BigInt], pos: &mut Dyadic, target: u32) -> Option<Dyadic> {
    // sign of q just to the right of the lower endpoint; the endpoint itself
    // may be a neighbouring exact root, which is simple after square-freeing
    let mut lo_sign = sign_at(q, &pos.k, pos.level);
    if lo_sign == Sign::NoSign {
        let dq: Vec<BigInt> = q.iter().enumerate().skip(1).map(|(i, c)| c * i).collect();
        lo_sign = sign_at(&dq, &pos.k, pos.level);
    }
    while pos.level < target {
        let mid_k: BigInt = &pos.k * 2 + 1;
        let level = pos.level + 1;
        let s = sign_at(q, &mid_k, level);
        if s == Sign::NoSign {
            return Some(Dyadic { k: mid_k, level });
        }
        if s == lo_sign {
            pos.k = mid_k;
        } else {
            pos.k *= 2;
        }
        pos.level = level;
    }
    None
}
