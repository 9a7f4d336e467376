//! Shared inputs for the kernel benchmarks.

use danielewski::parse::{parse_automorphism, parse_polynomial, parse_surface};
use danielewski::{AutoGenerator, Potential, Surface, SurfacePolynomial};

pub fn cubic() -> Surface {
    parse_surface("z^3 - z").expect("simple roots")
}

pub fn quartic() -> Surface {
    parse_surface("z^4 - 2*z^2 + z + 1").expect("simple roots")
}

pub fn poly(s: &Surface, src: &str) -> SurfacePolynomial {
    parse_polynomial(s, src).expect("valid polynomial")
}

/// A pair of dense-ish factors whose product needs several relation rewrites.
pub fn mul_operands(s: &Surface) -> (SurfacePolynomial, SurfacePolynomial) {
    (
        poly(s, "x^4*z^2 - 3*y^2*z + x*y + 5/2*z^3 - 1"),
        poly(s, "y^3*z - x^2 + 2*x*y*z^2 + z^4 - 7"),
    )
}

/// Potentials with a bracket representation, of increasing total degree.
pub fn accepted_potentials(s: &Surface) -> Vec<Potential> {
    ["x^2*z + y^3", "x^3*z^2 - y^2*z + x*y", "x^5 + y^4*z - 2*x^2*z^3"]
        .iter()
        .map(|src| Potential::new(poly(s, src)))
        .collect()
}

pub fn shear_word() -> Vec<AutoGenerator> {
    parse_automorphism("Dx(1 + t); Dy(-1); Dx(2)").expect("valid word")
}
