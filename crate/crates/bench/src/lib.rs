//! Shared fixtures for the benchmarks.

use smallforms::exact::ratio;
use smallforms::{ApproxFunction, Point, SystemMap};

/// Veronese system of degree `n` over `[-1/2, 1/2]`.
pub fn veronese(n: usize) -> SystemMap {
    SystemMap::veronese(n, 1, ratio(-1, 2), ratio(1, 2)).expect("valid system")
}

pub fn point() -> Point {
    Point::new(vec![ratio(3, 17)])
}

/// Ψ(h) = h^{-τ}.
pub fn power(tau: f64) -> ApproxFunction {
    ApproxFunction::power_law(1.0, tau).expect("valid Ψ")
}
