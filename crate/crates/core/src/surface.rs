//! The coordinate ring ℚ[x, y, z]/(xy − p(z)) of a Danielewski surface.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::chart::ChartElement;
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};
use crate::unipoly::{push_term, UniPoly};

/// A Danielewski surface `xy = p(z)` together with the exact data derived
/// from `p`.
///
/// Construction certifies that `p` has simple roots by computing a Bézout
/// identity `u*p + v*p' = 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct Surface {
    p: UniPoly,
    p_prime: UniPoly,
    degree: u32,
    bezout_u: UniPoly,
    bezout_v: UniPoly,
}

impl fmt::Debug for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Surface(xy = {})", self.p)
    }
}

impl Surface {
    pub fn new(p: UniPoly) -> Result<Self> {
        let degree = p.degree().ok_or(Error::ZeroPolynomial)?;
        if degree == 0 {
            return Err(Error::ConstantPolynomial);
        }
        let p_prime = p.derivative();
        let (u, v, g) = UniPoly::bezout(&p, &p_prime);
        if !g.is_constant() {
            return Err(Error::RepeatedRoot { gcd: g.to_string() });
        }
        Ok(Self {
            p,
            p_prime,
            degree,
            bezout_u: u,
            bezout_v: v,
        })
    }

    pub fn p(&self) -> &UniPoly {
        &self.p
    }

    pub fn p_prime(&self) -> &UniPoly {
        &self.p_prime
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `(u, v)` with `u*p + v*p' = 1`.
    pub fn bezout_certificate(&self) -> (&UniPoly, &UniPoly) {
        (&self.bezout_u, &self.bezout_v)
    }

    pub fn is_z_squared_minus_one(&self) -> bool {
        self.p == UniPoly::from_ints(&[-1, 0, 1])
    }

    fn p_powers(&self, up_to: u32) -> Vec<UniPoly> {
        let mut out = Vec::with_capacity(up_to as usize + 1);
        out.push(UniPoly::one());
        for k in 1..=up_to as usize {
            let next = &out[k - 1] * &self.p;
            out.push(next);
        }
        out
    }

    /// Rewrites every `xy` as `p(z)` until no mixed monomial is left.
    pub fn reduce(&self, raw: &FormalPoly) -> SurfacePolynomial {
        let max_mixed = raw
            .terms()
            .map(|((i, j, _), _)| i.min(j))
            .max()
            .unwrap_or(0);
        let powers = self.p_powers(max_mixed);
        let mut out = SurfacePolynomial::zero();
        for ((i, j, k), c) in raw.terms() {
            let m = i.min(j);
            let coeff = powers[m as usize].shift(k).scale(c);
            out.add_chart_coeff(i as i64 - j as i64, &coeff);
        }
        out
    }

    /// Laurent expansion in the chart `y = p(z)/x`.
    pub fn to_chart(&self, e: &SurfacePolynomial) -> ChartElement {
        let mut out = ChartElement::zero();
        for (&(i, j), c) in &e.x_part {
            out.add_term(i as i64, &UniPoly::monomial(c.clone(), j));
        }
        out.add_term(0, &e.z_part);
        let mut by_power: BTreeMap<u32, UniPoly> = BTreeMap::new();
        for (&(i, j), c) in &e.y_part {
            by_power.entry(i).or_default().add_term(j, c.clone());
        }
        let mut p_pow = UniPoly::one();
        let mut at = 0;
        for (i, c) in by_power {
            while at < i {
                p_pow = &p_pow * &self.p;
                at += 1;
            }
            out.add_term(-(i as i64), &(&c * &p_pow));
        }
        out
    }

    /// Inverse of [`Surface::to_chart`]; fails with `NotOnSurface` when a
    /// negative power of `x` carries a coefficient not divisible by the
    /// matching power of `p`.
    pub fn from_chart(&self, c: &ChartElement) -> Result<SurfacePolynomial> {
        let mut out = SurfacePolynomial::zero();
        for (k, coeff) in c.terms() {
            if k >= 0 {
                out.add_chart_coeff(k, coeff);
                continue;
            }
            let power = (-k) as u32;
            let mut q = coeff.clone();
            for _ in 0..power {
                q = q.exact_div(&self.p)?.ok_or(Error::NotOnSurface {
                    exponent: k,
                    power,
                })?;
            }
            out.add_chart_coeff(k, &q);
        }
        Ok(out)
    }

    /// Product in the coordinate ring, computed through the chart.
    pub fn mul(&self, a: &SurfacePolynomial, b: &SurfacePolynomial) -> SurfacePolynomial {
        self.try_mul(a, b)
            .unwrap_or_else(|e| panic!("{e}"))
    }

    /// Like [`Surface::mul`] but reports a failed descent from the chart as
    /// `InternalInvariantViolation` instead of panicking.
    pub fn try_mul(
        &self,
        a: &SurfacePolynomial,
        b: &SurfacePolynomial,
    ) -> Result<SurfacePolynomial> {
        if a.is_zero() || b.is_zero() {
            return Ok(SurfacePolynomial::zero());
        }
        let prod = &self.to_chart(a) * &self.to_chart(b);
        self.from_chart(&prod).map_err(|e| {
            Error::InternalInvariantViolation(format!("product left the coordinate ring: {e}"))
        })
    }

    pub fn pow(&self, a: &SurfacePolynomial, e: u32) -> SurfacePolynomial {
        let mut acc = SurfacePolynomial::one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// `c(z) * e`
    pub fn mul_z(&self, c: &UniPoly, e: &SurfacePolynomial) -> SurfacePolynomial {
        self.mul(&SurfacePolynomial::from_z(c.clone()), e)
    }

    /// Checks `x*y = p(z)` at a rational point.
    pub fn contains_point(&self, point: &[Rational; 3]) -> bool {
        &point[0] * &point[1] == self.p.eval(&point[2])
    }

    /// Embeds a normal-form element back as a formal polynomial.
    pub fn to_formal(&self, e: &SurfacePolynomial) -> FormalPoly {
        e.to_formal()
    }

    pub fn describe(&self) -> String {
        format!("xy = {}", self.p)
    }
}

/// A monomial of the normal form: `x^i z^j` (`i ≥ 1`), `y^i z^j` (`i ≥ 1`)
/// or `z^j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Monomial {
    X { i: u32, j: u32 },
    Y { i: u32, j: u32 },
    Z { j: u32 },
}

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        match *self {
            Monomial::X { i, j } | Monomial::Y { i, j } => i + j,
            Monomial::Z { j } => j,
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&monomial_string(*self))
    }
}

fn power_string(var: &str, e: u32) -> Option<String> {
    match e {
        0 => None,
        1 => Some(var.to_string()),
        _ => Some(format!("{var}^{e}")),
    }
}

fn monomial_string(m: Monomial) -> String {
    let parts: Vec<String> = match m {
        Monomial::X { i, j } => [power_string("x", i), power_string("z", j)]
            .into_iter()
            .flatten()
            .collect(),
        Monomial::Y { i, j } => [power_string("y", i), power_string("z", j)]
            .into_iter()
            .flatten()
            .collect(),
        Monomial::Z { j } => power_string("z", j).into_iter().collect(),
    };
    parts.join("*")
}

/// Element of the coordinate ring in its unique normal form
/// `Σ a_ij x^i z^j + Σ b_ij y^i z^j + c(z)`.
///
/// No stored coefficient is zero and no term mixes `x` with `y`; structural
/// equality is therefore equality in the ring.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SurfacePolynomial {
    x_part: BTreeMap<(u32, u32), Rational>,
    y_part: BTreeMap<(u32, u32), Rational>,
    z_part: UniPoly,
}

impl SurfacePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_z(UniPoly::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_z(UniPoly::constant(c))
    }

    pub fn from_z(c: UniPoly) -> Self {
        Self {
            z_part: c,
            ..Self::default()
        }
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), Monomial::X { i: 1, j: 0 })
    }

    pub fn y() -> Self {
        Self::monomial(Rational::one(), Monomial::Y { i: 1, j: 0 })
    }

    pub fn z() -> Self {
        Self::from_z(UniPoly::z())
    }

    /// `c * m`; a zero `c` gives the zero element.
    pub fn monomial(c: Rational, m: Monomial) -> Self {
        let mut out = Self::zero();
        out.add_monomial(m, c);
        out
    }

    /// `x^i * c(z)` for `i ≥ 1`, `c(z)` for `i = 0`.
    pub fn x_times(i: u32, c: &UniPoly) -> Self {
        let mut out = Self::zero();
        out.add_chart_coeff(i as i64, c);
        out
    }

    /// `y^i * c(z)` for `i ≥ 1`, `c(z)` for `i = 0`.
    pub fn y_times(i: u32, c: &UniPoly) -> Self {
        let mut out = Self::zero();
        out.add_chart_coeff(-(i as i64), c);
        out
    }

    pub fn add_monomial(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let (map, key) = match m {
            Monomial::X { i, j } if i > 0 => (&mut self.x_part, (i, j)),
            Monomial::Y { i, j } if i > 0 => (&mut self.y_part, (i, j)),
            Monomial::X { j, .. } | Monomial::Y { j, .. } | Monomial::Z { j } => {
                self.z_part.add_term(j, c);
                return;
            }
        };
        let slot = map.entry(key).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            map.remove(&key);
        }
    }

    /// Adds `x^k c(z)` for `k > 0`, `y^{-k} c(z)` for `k < 0`.
    fn add_chart_coeff(&mut self, k: i64, c: &UniPoly) {
        for (j, a) in c.terms() {
            let m = match k.cmp(&0) {
                std::cmp::Ordering::Greater => Monomial::X { i: k as u32, j },
                std::cmp::Ordering::Less => Monomial::Y { i: (-k) as u32, j },
                std::cmp::Ordering::Equal => Monomial::Z { j },
            };
            self.add_monomial(m, a.clone());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x_part.is_empty() && self.y_part.is_empty() && self.z_part.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.x_part.is_empty() && self.y_part.is_empty() && self.z_part.is_constant()
    }

    /// The absolute term `c(z)`.
    pub fn z_part(&self) -> &UniPoly {
        &self.z_part
    }

    /// Coefficient polynomial of `x^i` (`i ≥ 1`).
    pub fn x_coeff(&self, i: u32) -> UniPoly {
        UniPoly::from_terms(
            self.x_part
                .range((i, 0)..=(i, u32::MAX))
                .map(|(&(_, j), c)| (j, c.clone())),
        )
    }

    /// Coefficient polynomial of `y^i` (`i ≥ 1`).
    pub fn y_coeff(&self, i: u32) -> UniPoly {
        UniPoly::from_terms(
            self.y_part
                .range((i, 0)..=(i, u32::MAX))
                .map(|(&(_, j), c)| (j, c.clone())),
        )
    }

    /// Distinct powers of `x` that occur, ascending.
    pub fn x_powers(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.x_part.keys().map(|&(i, _)| i).collect();
        v.dedup();
        v
    }

    pub fn y_powers(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.y_part.keys().map(|&(i, _)| i).collect();
        v.dedup();
        v
    }

    /// All terms in printing order: x-part, y-part, then the absolute term.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &Rational)> + '_ {
        self.x_part
            .iter()
            .map(|(&(i, j), c)| (Monomial::X { i, j }, c))
            .chain(
                self.y_part
                    .iter()
                    .map(|(&(i, j), c)| (Monomial::Y { i, j }, c)),
            )
            .chain(self.z_part.terms().map(|(j, c)| (Monomial::Z { j }, c)))
    }

    pub fn num_terms(&self) -> usize {
        self.x_part.len() + self.y_part.len() + self.z_part.num_terms()
    }

    /// Largest `i + j` over all terms; `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms().map(|(m, _)| m.total_degree()).max()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            x_part: self.x_part.iter().map(|(&k, v)| (k, v * c)).collect(),
            y_part: self.y_part.iter().map(|(&k, v)| (k, v * c)).collect(),
            z_part: self.z_part.scale(c),
        }
    }

    /// Exchanges `x` and `y` (the involution's action on the ring).
    pub fn swap_xy(&self) -> Self {
        Self {
            x_part: self.y_part.clone(),
            y_part: self.x_part.clone(),
            z_part: self.z_part.clone(),
        }
    }

    /// Drops the constant term of the absolute part.
    pub fn without_constant(&self) -> Self {
        let mut out = self.clone();
        let c = out.z_part.coeff(0);
        out.z_part.add_term(0, -c);
        out
    }

    pub fn constant_term(&self) -> Rational {
        self.z_part.coeff(0)
    }

    pub fn eval(&self, point: &[Rational; 3]) -> Rational {
        let [x, y, z] = point;
        let mut acc = self.z_part.eval(z);
        for (m, c) in self.terms() {
            let v = match m {
                Monomial::X { i, j } => crate::rational::pow(x, i) * crate::rational::pow(z, j),
                Monomial::Y { i, j } => crate::rational::pow(y, i) * crate::rational::pow(z, j),
                Monomial::Z { .. } => continue,
            };
            acc += c * v;
        }
        acc
    }

    pub fn to_formal(&self) -> FormalPoly {
        let mut out = FormalPoly::zero();
        for (m, c) in self.terms() {
            let key = match m {
                Monomial::X { i, j } => (i, 0, j),
                Monomial::Y { i, j } => (0, i, j),
                Monomial::Z { j } => (0, 0, j),
            };
            out.add_term(key, c.clone());
        }
        out
    }
}

impl fmt::Display for SurfacePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (m, c) in self.terms() {
            push_term(&mut out, c, &monomial_string(m));
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for SurfacePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SurfacePolynomial({self})")
    }
}

impl AddAssign<&SurfacePolynomial> for SurfacePolynomial {
    fn add_assign(&mut self, rhs: &SurfacePolynomial) {
        for (m, c) in rhs.terms() {
            self.add_monomial(m, c.clone());
        }
    }
}

impl SubAssign<&SurfacePolynomial> for SurfacePolynomial {
    fn sub_assign(&mut self, rhs: &SurfacePolynomial) {
        for (m, c) in rhs.terms() {
            self.add_monomial(m, -c.clone());
        }
    }
}

impl Add for &SurfacePolynomial {
    type Output = SurfacePolynomial;
    fn add(self, rhs: &SurfacePolynomial) -> SurfacePolynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &SurfacePolynomial {
    type Output = SurfacePolynomial;
    fn sub(self, rhs: &SurfacePolynomial) -> SurfacePolynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &SurfacePolynomial {
    type Output = SurfacePolynomial;
    fn neg(self) -> SurfacePolynomial {
        self.scale(&-Rational::one())
    }
}

impl Add for SurfacePolynomial {
    type Output = SurfacePolynomial;
    fn add(mut self, rhs: SurfacePolynomial) -> SurfacePolynomial {
        self += &rhs;
        self
    }
}

impl Sub for SurfacePolynomial {
    type Output = SurfacePolynomial;
    fn sub(mut self, rhs: SurfacePolynomial) -> SurfacePolynomial {
        self -= &rhs;
        self
    }
}

impl Neg for SurfacePolynomial {
    type Output = SurfacePolynomial;
    fn neg(self) -> SurfacePolynomial {
        -&self
    }
}

/// A polynomial in free variables `x, y, z` before the surface relation is
/// applied. Keys are `(deg_x, deg_y, deg_z)`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct FormalPoly {
    terms: BTreeMap<(u32, u32, u32), Rational>,
}

impl FormalPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut out = Self::zero();
        out.add_term((0, 0, 0), c);
        out
    }

    pub fn var(index: usize) -> Self {
        let key = match index {
            0 => (1, 0, 0),
            1 => (0, 1, 0),
            2 => (0, 0, 1),
            _ => panic!("variable index out of range"),
        };
        let mut out = Self::zero();
        out.add_term(key, Rational::one());
        out
    }

    pub fn add_term(&mut self, key: (u32, u32, u32), c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32, u32), &Rational)> + '_ {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&(0, 0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (k, v) in self.terms() {
            out.add_term(k, v * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl fmt::Debug for FormalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms()
            .map(|((a, b, c), v)| format!("{}*x^{a}*y^{b}*z^{c}", format_rational(v)))
            .collect();
        write!(f, "Formal[{}]", parts.join(" + "))
    }
}

impl Add for &FormalPoly {
    type Output = FormalPoly;
    fn add(self, rhs: &FormalPoly) -> FormalPoly {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.add_term(k, c.clone());
        }
        out
    }
}

impl Sub for &FormalPoly {
    type Output = FormalPoly;
    fn sub(self, rhs: &FormalPoly) -> FormalPoly {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.add_term(k, -c.clone());
        }
        out
    }
}

impl Mul for &FormalPoly {
    type Output = FormalPoly;
    fn mul(self, rhs: &FormalPoly) -> FormalPoly {
        let mut out = FormalPoly::zero();
        for ((a0, a1, a2), ca) in self.terms() {
            for ((b0, b1, b2), cb) in rhs.terms() {
                out.add_term((a0 + b0, a1 + b1, a2 + b2), ca * cb);
            }
        }
        out
    }
}
