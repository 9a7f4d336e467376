//! Sparse univariate polynomials over ℚ.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};

/// Univariate polynomial with exact rational coefficients.
///
/// Coefficients live in a sparse map keyed by exponent; zero coefficients are
/// never stored, so the zero polynomial is the empty map and its degree is
/// `None` (minus infinity).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: BTreeMap<u32, Rational>,
}

impl UniPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * z^e`
    pub fn monomial(c: Rational, e: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(e, c);
        }
        Self { coeffs }
    }

    /// The variable itself.
    pub fn z() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    /// Builds from integer coefficients in ascending order of exponent.
    pub fn from_ints(ascending: &[i64]) -> Self {
        Self::from_coeffs(ascending.iter().map(|&c| int(c)))
    }

    /// Builds from rational coefficients in ascending order of exponent.
    pub fn from_coeffs<I: IntoIterator<Item = Rational>>(ascending: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in ascending.into_iter().enumerate() {
            p.add_term(e as u32, c);
        }
        p
    }

    /// `Σ n_k z^(lo + k) / den`
    pub(crate) fn from_cleared(den: &BigInt, lo: u32, n: Vec<BigInt>) -> UniPoly {
        let coeffs = n
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as u32 + lo, Rational::new(c, den.clone())))
            .collect();
        UniPoly { coeffs }
    }

    /// `(d, n)` with `self = n / d` and `n` integral.
    pub(crate) fn cleared(&self) -> (BigInt, Vec<(u32, BigInt)>) {
        let d = self
            .coeffs
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let n = self
            .coeffs
            .iter()
            .map(|(&e, c)| (e, c.numer() * (&d / c.denom())))
            .collect();
        (d, n)
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|&e| e == 0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, e: u32) -> Rational {
        self.coeffs.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_coeff(&self) -> Rational {
        self.coeffs
            .values()
            .next_back()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> + '_ {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add_term(&mut self, e: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(&e, v)| (e, v * c)).collect(),
        }
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: u32) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&e, v)| (e + k, v.clone())).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|&(e, _)| e > 0)
                .map(|(e, c)| (e - 1, c * int(e as i64))),
        )
    }

    pub fn nth_derivative(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |acc, _| acc.derivative())
    }

    /// Primitive with zero constant term.
    pub fn antiderivative(&self) -> Self {
        Self::from_terms(
            self.terms()
                .map(|(e, c)| (e + 1, c / int(e as i64 + 1))),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, at: &Rational) -> Rational {
        // Horner over the sparse representation.
        let mut acc = Rational::zero();
        let mut prev = match self.degree() {
            Some(d) => d,
            None => return acc,
        };
        for (&e, c) in self.coeffs.iter().rev() {
            for _ in e..prev {
                acc *= at;
            }
            acc += c;
            prev = e;
        }
        for _ in 0..prev {
            acc *= at;
        }
        acc
    }

    /// Substitution `self(inner)`.
    pub fn compose(&self, inner: &UniPoly) -> UniPoly {
        let mut acc = UniPoly::zero();
        let Some(d) = self.degree() else {
            return acc;
        };
        for e in (0..=d).rev() {
            acc = &acc * inner;
            acc.add_term(0, self.coeff(e));
        }
        acc
    }

    /// `self(a*z + b)`
    pub fn affine_substitute(&self, a: &Rational, b: &Rational) -> UniPoly {
        self.compose(&UniPoly::from_coeffs([b.clone(), a.clone()]))
    }

    /// Euclidean division: `self = quot * divisor + rem` with `deg rem < deg divisor`.
    pub fn divrem(&self, divisor: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZeroPolynomial)?;
        if let Some(qr) = self.divrem_integral(divisor) {
            return Ok(qr);
        }
        let lead = divisor.leading_coeff();
        let mut rem = self.clone();
        let mut quot = UniPoly::zero();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let factor = rem.leading_coeff() / &lead;
            let shift = rd - dd;
            for (e, c) in divisor.terms() {
                rem.add_term(e + shift, -(c * &factor));
            }
            quot.add_term(shift, factor);
        }
        Ok((quot, rem))
    }

    /// Long division over ℤ, possible when the cleared divisor has leading
    /// coefficient ±1.
    fn divrem_integral(&self, divisor: &UniPoly) -> Option<(UniPoly, UniPoly)> {
        let (dv, v) = divisor.cleared();
        let (lead_e, lead) = v.last()?;
        if !lead.abs().is_one() {
            return None;
        }
        let Some(top) = self.degree() else {
            return Some((UniPoly::zero(), UniPoly::zero()));
        };
        if top < *lead_e {
            return Some((UniPoly::zero(), self.clone()));
        }
        let (du, u) = self.cleared();
        let mut rem = vec![BigInt::zero(); top as usize + 1];
        for (e, c) in u {
            rem[e as usize] = c;
        }
        let mut quot = vec![BigInt::zero(); (top - lead_e) as usize + 1];
        for k in (0..quot.len()).rev() {
            let f = &rem[k + *lead_e as usize] * lead;
            if f.is_zero() {
                continue;
            }
            for (e, c) in &v {
                rem[k + *e as usize] -= &f * c;
            }
            quot[k] = f;
        }
        // self = (u/du), divisor = v/dv, so quotient = q·dv/du, remainder = r/du.
        let q = UniPoly::from_cleared(&du, 0, quot).scale(&Rational::from_integer(dv));
        Some((q, UniPoly::from_cleared(&du, 0, rem)))
    }

    /// Exact quotient, or `None` when `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &UniPoly) -> Result<Option<UniPoly>> {
        let (q, r) = self.divrem(divisor)?;
        Ok(r.is_zero().then_some(q))
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Rational::one() / self.leading_coeff()))
    }

    /// Extended Euclid: returns `(u, v, g)` with `u*a + v*b = g`, `g` monic
    /// (or zero when both inputs are zero).
    pub fn bezout(a: &UniPoly, b: &UniPoly) -> (UniPoly, UniPoly, UniPoly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (UniPoly::one(), UniPoly::zero());
        let (mut t0, mut t1) = (UniPoly::zero(), UniPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).expect("nonzero divisor");
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (s0, t0, r0);
        }
        let norm = Rational::one() / r0.leading_coeff();
        (s0.scale(&norm), t0.scale(&norm), r0.scale(&norm))
    }

    pub fn gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
        Self::bezout(a, b).2
    }

    /// Writes the polynomial in `var`, ascending exponents.
    pub fn display_in(&self, var: &str) -> String {
        let mut out = String::new();
        for (e, c) in self.terms() {
            let mono = match e {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{e}"),
            };
            push_term(&mut out, c, &mono);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Appends `c*mono` to a sum being printed, handling signs and unit
/// coefficients. An empty `mono` stands for the constant monomial.
pub(crate) fn push_term(out: &mut String, c: &Rational, mono: &str) {
    let negative = c.is_negative();
    let abs = c.abs();
    if out.is_empty() {
        if negative {
            out.push('-');
        }
    } else if negative {
        out.push_str(" - ");
    } else {
        out.push_str(" + ");
    }
    if mono.is_empty() {
        out.push_str(&format_rational(&abs));
    } else if abs.is_one() {
        out.push_str(mono);
    } else {
        out.push_str(&format_rational(&abs));
        out.push('*');
        out.push_str(mono);
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("z"))
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({self})")
    }
}

impl AddAssign<&UniPoly> for UniPoly {
    fn add_assign(&mut self, rhs: &UniPoly) {
        for (e, c) in rhs.terms() {
            self.add_term(e, c.clone());
        }
    }
}

impl SubAssign<&UniPoly> for UniPoly {
    fn sub_assign(&mut self, rhs: &UniPoly) {
        for (e, c) in rhs.terms() {
            self.add_term(e, -c.clone());
        }
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        self.scale(&-Rational::one())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    // Works over ℤ after clearing denominators; reducing every partial sum
    // as a rational costs a gcd per term and dominates otherwise.
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let (da, a) = self.cleared();
        let (db, b) = rhs.cleared();
        let lo = self.coeffs.keys().next().unwrap() + rhs.coeffs.keys().next().unwrap();
        let hi = self.coeffs.keys().next_back().unwrap() + rhs.coeffs.keys().next_back().unwrap();
        let mut acc = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                acc[(ea + eb - lo) as usize] += ca * cb;
            }
        }
        UniPoly::from_cleared(&(da * db), lo, acc)
    }
}

impl Add for UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: UniPoly) -> UniPoly {
        &self + &rhs
    }
}

impl Sub for UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: UniPoly) -> UniPoly {
        &self - &rhs
    }
}

impl Mul for UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: UniPoly) -> UniPoly {
        &self * &rhs
    }
}

impl Neg for UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn poly() -> impl Strategy<Value = UniPoly> {
        prop::collection::vec(-5i64..=5, 0..7).prop_map(|c| UniPoly::from_ints(&c))
    }

    #[test]
    fn zero_has_no_degree() {
        assert_eq!(UniPoly::zero().degree(), None);
        assert_eq!(UniPoly::from_ints(&[0, 0, 0]), UniPoly::zero());
        assert_eq!(UniPoly::from_ints(&[1, 0, 2]).degree(), Some(2));
    }

    #[test]
    fn antiderivative_of_square() {
        let z2 = UniPoly::monomial(int(1), 2);
        assert_eq!(z2.antiderivative(), UniPoly::monomial(rat(1, 3), 3));
        assert_eq!(UniPoly::from_ints(&[5, 1]).antiderivative().coeff(0), int(0));
    }

    #[test]
    fn divrem_long_division() {
        // z^3/6 = (1/6)(z^3 - z) + z/6
        let a = UniPoly::monomial(rat(1, 6), 3);
        let b = UniPoly::from_ints(&[0, -1, 0, 1]);
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(q, UniPoly::constant(rat(1, 6)));
        assert_eq!(r, UniPoly::monomial(rat(1, 6), 1));
    }

    #[test]
    fn divrem_by_zero() {
        assert_eq!(
            UniPoly::one().divrem(&UniPoly::zero()),
            Err(Error::DivisionByZeroPolynomial)
        );
    }

    #[test]
    fn bezout_of_quadratic_and_derivative() {
        let a = UniPoly::from_ints(&[-1, 0, 1]);
        let b = UniPoly::from_ints(&[0, 2]);
        let (u, v, g) = UniPoly::bezout(&a, &b);
        assert_eq!(u, UniPoly::constant(int(-1)));
        assert_eq!(v, UniPoly::monomial(rat(1, 2), 1));
        assert_eq!(g, UniPoly::one());
    }

    #[test]
    fn gcd_detects_double_root() {
        let p = UniPoly::from_ints(&[1, -2, 1]);
        assert_eq!(UniPoly::gcd(&p, &p.derivative()), UniPoly::from_ints(&[-1, 1]));
    }

    #[test]
    fn display_ascending() {
        let p = UniPoly::from_coeffs([int(-1), int(0), rat(3, 2)]);
        assert_eq!(p.to_string(), "-1 + 3/2*z^2");
        assert_eq!(UniPoly::zero().to_string(), "0");
        assert_eq!(UniPoly::from_ints(&[0, -1, 0, 1]).display_in("x"), "-x + x^3");
    }

    #[test]
    fn eval_and_compose() {
        let p = UniPoly::from_ints(&[-1, 0, 1]);
        assert_eq!(p.eval(&int(3)), int(8));
        assert_eq!(p.eval(&rat(1, 2)), rat(-3, 4));
        // p(z + 1) = z^2 + 2z
        assert_eq!(
            p.affine_substitute(&int(1), &int(1)),
            UniPoly::from_ints(&[0, 2, 1])
        );
    }

    proptest! {
        #[test]
        fn bezout_identity_holds(a in poly(), b in poly()) {
            let (u, v, g) = UniPoly::bezout(&a, &b);
            prop_assert_eq!(&(&u * &a) + &(&v * &b), g.clone());
            if !g.is_zero() {
                prop_assert!(a.divrem(&g).unwrap().1.is_zero());
                prop_assert!(b.divrem(&g).unwrap().1.is_zero());
            }
        }

        #[test]
        fn divrem_reconstructs(a in poly(), b in poly()) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.divrem(&b).unwrap();
            prop_assert_eq!(&(&q * &b) + &r, a);
            prop_assert!(r.degree() < b.degree());
        }

        #[test]
        fn antiderivative_inverts_derivative(a in poly()) {
            prop_assert_eq!(a.antiderivative().derivative(), a);
        }
    }
}
