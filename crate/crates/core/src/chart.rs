//! Laurent polynomials in `x` with coefficients in ℚ[z].
//!
//! On the open set `x != 0` the surface is the chart `(x, z) ↦ (x, p(z)/x, z)`,
//! so every regular function restricts to an element of ℚ[x, x⁻¹, z]. A
//! [`ChartElement`] is such a Laurent polynomial. It descends to the surface
//! exactly when the coefficient of `x^{-k}` is divisible by `p^k` for every
//! `k > 0`; that check lives in [`crate::Surface::from_chart`]. Partial
//! derivatives and interior products produce elements that need not descend,
//! so the type itself does not enforce it.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::{int, Rational};
use crate::unipoly::UniPoly;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ChartElement {
    coeffs: BTreeMap<i64, UniPoly>,
}

impl ChartElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `x^k * c(z)`
    pub fn term(k: i64, c: UniPoly) -> Self {
        let mut out = Self::zero();
        out.add_term(k, &c);
        out
    }

    pub fn from_z(c: UniPoly) -> Self {
        Self::term(0, c)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, UniPoly)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (k, c) in terms {
            out.add_term(k, &c);
        }
        out
    }

    /// Common denominator and dense integer numerators (ascending in `z`).
    fn cleared(&self) -> (BigInt, Vec<(i64, Vec<BigInt>)>) {
        let d = self.coeffs.values().fold(BigInt::one(), |acc, c| {
            c.terms().fold(acc, |acc, (_, q)| acc.lcm(q.denom()))
        });
        let rows = self
            .coeffs
            .iter()
            .map(|(&k, c)| {
                let mut row = vec![BigInt::zero(); c.degree().map_or(0, |e| e as usize + 1)];
                for (e, q) in c.terms() {
                    row[e as usize] = q.numer() * (&d / q.denom());
                }
                (k, row)
            })
            .collect();
        (d, rows)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: i64) -> UniPoly {
        self.coeffs.get(&k).cloned().unwrap_or_default()
    }

    /// Terms in ascending `x`-exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &UniPoly)> + '_ {
        self.coeffs.iter().map(|(&k, c)| (k, c))
    }

    /// Largest `x`-exponent, `None` for zero.
    pub fn x_degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn min_x_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn add_term(&mut self, k: i64, c: &UniPoly) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(k).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(&k, v)| (k, v.scale(c))).collect(),
        }
    }

    pub fn mul_z(&self, c: &UniPoly) -> Self {
        Self::from_terms(self.terms().map(|(k, v)| (k, v * c)))
    }

    /// Multiplies by `x^k` (`k` may be negative).
    pub fn shift_x(&self, k: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&e, v)| (e + k, v.clone())).collect(),
        }
    }

    /// Chart partial ∂/∂x.
    pub fn d_x(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|&(k, _)| k != 0)
                .map(|(k, c)| (k - 1, c.scale(&int(k)))),
        )
    }

    /// Chart partial ∂/∂z.
    pub fn d_z(&self) -> Self {
        Self::from_terms(self.terms().map(|(k, c)| (k, c.derivative())))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_z(UniPoly::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Constant multiple test: returns `c` when `self == c * other`.
    pub fn ratio_to(&self, other: &ChartElement) -> Option<Rational> {
        let (k, lead) = other.coeffs.iter().next_back()?;
        let mine = self.coeffs.get(k)?;
        let d = lead.degree()?;
        let c = mine.coeff(d) / lead.coeff(d);
        if c.is_zero() {
            return None;
        }
        (&other.scale(&c) == self).then_some(c)
    }
}

impl fmt::Debug for ChartElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, c) in self.terms() {
            parts.push(format!("x^{k}*({c})"));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "Chart[{}]", parts.join(" + "))
    }
}

impl Add for &ChartElement {
    type Output = ChartElement;
    fn add(self, rhs: &ChartElement) -> ChartElement {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.add_term(k, c);
        }
        out
    }
}

impl Sub for &ChartElement {
    type Output = ChartElement;
    fn sub(self, rhs: &ChartElement) -> ChartElement {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.add_term(k, &-c);
        }
        out
    }
}

impl Neg for &ChartElement {
    type Output = ChartElement;
    fn neg(self) -> ChartElement {
        self.scale(&int(-1))
    }
}

impl Mul for &ChartElement {
    type Output = ChartElement;
    // Integer arithmetic on cleared denominators, as for `UniPoly`.
    fn mul(self, rhs: &ChartElement) -> ChartElement {
        if self.is_zero() || rhs.is_zero() {
            return ChartElement::zero();
        }
        let (da, a) = self.cleared();
        let (db, b) = rhs.cleared();
        let mut acc: BTreeMap<i64, Vec<BigInt>> = BTreeMap::new();
        for (ka, ca) in &a {
            for (kb, cb) in &b {
                let slot = acc.entry(ka + kb).or_default();
                if slot.len() < ca.len() + cb.len() - 1 {
                    slot.resize(ca.len() + cb.len() - 1, BigInt::zero());
                }
                for (i, x) in ca.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in cb.iter().enumerate() {
                        slot[i + j] += x * y;
                    }
                }
            }
        }
        let den = da * db;
        let mut out = ChartElement::zero();
        for (k, n) in acc {
            let c = UniPoly::from_cleared(&den, 0, n);
            if !c.is_zero() {
                out.coeffs.insert(k, c);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partials() {
        // x^2 z^3 + z / x
        let e = ChartElement::from_terms([
            (2, UniPoly::monomial(int(1), 3)),
            (-1, UniPoly::z()),
        ]);
        assert_eq!(
            e.d_x(),
            ChartElement::from_terms([
                (1, UniPoly::monomial(int(2), 3)),
                (-2, -&UniPoly::z()),
            ])
        );
        assert_eq!(
            e.d_z(),
            ChartElement::from_terms([
                (2, UniPoly::monomial(int(3), 2)),
                (-1, UniPoly::one()),
            ])
        );
    }

    #[test]
    fn ratio() {
        let e = ChartElement::term(-1, UniPoly::from_ints(&[-1, 0, 1]));
        assert_eq!(e.scale(&int(-3)).ratio_to(&e), Some(int(-3)));
        assert_eq!(e.shift_x(1).ratio_to(&e), None);
    }
}
