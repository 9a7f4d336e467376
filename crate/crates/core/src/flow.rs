//! Flows of locally nilpotent fields as automorphisms over ℚ[t, s].

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fields::{AlgebraicVectorField, LndVerdict};
use crate::rational::{factorial, int, Rational};
use crate::surface::{Monomial, Surface, SurfacePolynomial};
use crate::unipoly::UniPoly;

/// A polynomial in two formal parameters `t, s` with coefficients in the
/// coordinate ring; the key `(a, b)` stands for `t^a s^b`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ParamPoly {
    coeffs: BTreeMap<(u32, u32), SurfacePolynomial>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(e: SurfacePolynomial) -> Self {
        let mut out = Self::zero();
        out.add_term((0, 0), &e);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, key: (u32, u32)) -> SurfacePolynomial {
        self.coeffs.get(&key).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &SurfacePolynomial)> + '_ {
        self.coeffs.iter().map(|(&k, v)| (k, v))
    }

    pub fn add_term(&mut self, key: (u32, u32), e: &SurfacePolynomial) {
        if e.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(key).or_default();
        *slot += e;
        if slot.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn add(&self, other: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (k, v) in other.terms() {
            out.add_term(k, v);
        }
        out
    }

    pub fn mul(&self, s: &Surface, other: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for ((a, b), u) in self.terms() {
            for ((c, d), v) in other.terms() {
                out.add_term((a + c, b + d), &s.mul(u, v));
            }
        }
        out
    }

    /// Substitutes a value for `t` (only `s`-free polynomials).
    pub fn at_t(&self, t: &Rational) -> SurfacePolynomial {
        let mut out = SurfacePolynomial::zero();
        for ((a, _), v) in self.terms() {
            out += &v.scale(&crate::rational::pow(t, a));
        }
        out
    }

    /// Renames `t ↦ t + s` by binomial expansion.
    pub fn t_plus_s(&self) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for ((a, b), v) in self.terms() {
            for j in 0..=a {
                let binom = factorial(a) / (factorial(j) * factorial(a - j));
                out.add_term((j, b + a - j), &v.scale(&binom));
            }
        }
        out
    }

    /// Renames `t ↦ s` in a polynomial that only involves `t`.
    pub fn t_to_s(&self) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for ((a, b), v) in self.terms() {
            out.add_term((b, a), v);
        }
        out
    }

    /// `t ↦ −t`
    pub fn negate_t(&self) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for ((a, b), v) in self.terms() {
            let sign = if a % 2 == 0 { int(1) } else { int(-1) };
            out.add_term((a, b), &v.scale(&sign));
        }
        out
    }

    fn map_coeffs(&self, f: impl Fn(&SurfacePolynomial) -> SurfacePolynomial) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (k, v) in self.terms() {
            out.add_term(k, &f(v));
        }
        out
    }
}

impl fmt::Debug for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms()
            .map(|((a, b), v)| format!("t^{a} s^{b} ({v})"))
            .collect();
        write!(f, "[{}]", parts.join(" + "))
    }
}

/// An automorphism depending polynomially on the formal parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowMap {
    pub images: [ParamPoly; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShearKind {
    X,
    Y,
}

impl Surface {
    /// `e(images)` with parameter-valued images.
    pub fn substitute_param(&self, e: &SurfacePolynomial, images: &[ParamPoly; 3]) -> ParamPoly {
        let mut caches: [Vec<ParamPoly>; 3] = Default::default();
        let mut power = |var: usize, k: u32| -> ParamPoly {
            let cache = &mut caches[var];
            if cache.is_empty() {
                cache.push(ParamPoly::constant(SurfacePolynomial::one()));
            }
            while cache.len() <= k as usize {
                let next = cache.last().unwrap().mul(self, &images[var]);
                cache.push(next);
            }
            cache[k as usize].clone()
        };
        let mut out = ParamPoly::zero();
        for (m, c) in e.terms() {
            let (var, i, j) = match m {
                Monomial::X { i, j } => (Some(0), i, j),
                Monomial::Y { i, j } => (Some(1), i, j),
                Monomial::Z { j } => (None, 0, j),
            };
            let mut term = power(2, j);
            if let Some(v) = var {
                term = term.mul(self, &power(v, i));
            }
            out = out.add(&term.map_coeffs(|u| u.scale(c)));
        }
        out
    }

    /// `F(t)` for `SF_i^x` or `SF_i^y`, in closed form.
    pub fn flow_of_shear(&self, kind: ShearKind, i: u32) -> FlowMap {
        // y ↦ p(z + t x^{i+1}) / x = Σ_k t^k p^{(k)}(z)/k! x^{k(i+1)-1}
        let mut y = ParamPoly::constant(SurfacePolynomial::y());
        for k in 1..=self.degree() {
            let c = self.p().nth_derivative(k).scale(&(int(1) / factorial(k)));
            y.add_term((k, 0), &SurfacePolynomial::x_times(k * (i + 1) - 1, &c));
        }
        let mut z = ParamPoly::constant(SurfacePolynomial::z());
        z.add_term((1, 0), &SurfacePolynomial::x_times(i + 1, &UniPoly::one()));
        let x = ParamPoly::constant(SurfacePolynomial::x());
        match kind {
            ShearKind::X => FlowMap { images: [x, y, z] },
            ShearKind::Y => {
                let swap = |p: &ParamPoly| p.map_coeffs(|e| e.swap_xy());
                FlowMap {
                    images: [swap(&y), swap(&x), swap(&z)],
                }
            }
        }
    }

    /// `exp(tΘ)` on the generators.
    pub fn flow_of_lnd(&self, v: &AlgebraicVectorField, bound: usize) -> Result<FlowMap> {
        if let LndVerdict::NotNilpotentWithinBound(b) = self.lnd_check(v, bound) {
            return Err(Error::NotNilpotent { bound: b });
        }
        let images = [SurfacePolynomial::x(), SurfacePolynomial::y(), SurfacePolynomial::z()].map(|g| {
            let mut out = ParamPoly::zero();
            let mut cur = g;
            let mut k = 0u32;
            while !cur.is_zero() {
                out.add_term((k, 0), &cur.scale(&(int(1) / factorial(k))));
                cur = self.apply(v, &cur);
                k += 1;
            }
            out
        });
        Ok(FlowMap { images })
    }

    /// `F(t) ∘ F(s) = F(t + s)`, checked identically in `t` and `s`.
    pub fn flow_group_law(&self, flow: &FlowMap) -> bool {
        let in_s = flow.images.each_ref().map(|p| p.t_to_s());
        // (F_t ∘ F_s)_g = F_t(g) with the coordinates replaced by F_s images.
        let lhs = flow.images.each_ref().map(|img| {
            let mut out = ParamPoly::zero();
            for ((a, b), v) in img.terms() {
                let sub = self.substitute_param(v, &in_s);
                for ((c, d), w) in sub.terms() {
                    out.add_term((a + c, b + d), w);
                }
            }
            out
        });
        let rhs = flow.images.each_ref().map(|p| p.t_plus_s());
        lhs == rhs
    }

    /// `Σ_k t^k ad_Θ^k(Ψ)/k!` as the list of its coefficients.
    pub fn taylor_conjugation(
        &self,
        v: &AlgebraicVectorField,
        w: &AlgebraicVectorField,
        bound: usize,
    ) -> Result<Vec<AlgebraicVectorField>> {
        if let LndVerdict::NotNilpotentWithinBound(b) = self.lnd_check(v, bound) {
            return Err(Error::NotNilpotent { bound: b });
        }
        let mut out = Vec::new();
        let mut cur = w.clone();
        let mut k = 0u32;
        while !cur.is_zero() {
            if out.len() > bound {
                return Err(Error::NotNilpotent { bound });
            }
            out.push(cur.scale(&(int(1) / factorial(k))));
            cur = self.bracket(v, &cur);
            k += 1;
        }
        Ok(out)
    }

    /// Checks `Ψ(g ∘ F_{−t}) ∘ F_t = Σ_k t^k (ad_Θ^k Ψ / k!)(g)` for
    /// `g = x, y, z`, identically in `t`.
    pub fn verify_taylor(
        &self,
        flow: &FlowMap,
        w: &AlgebraicVectorField,
        expansion: &[AlgebraicVectorField],
    ) -> bool {
        let back = flow.images.each_ref().map(|p| p.negate_t());
        [SurfacePolynomial::x(), SurfacePolynomial::y(), SurfacePolynomial::z()]
            .iter()
            .all(|g| {
                let pulled = self.substitute_param(g, &back);
                let mut lhs = ParamPoly::zero();
                for ((a, b), u) in pulled.terms() {
                    let image = self.apply(w, u);
                    let pushed = self.substitute_param(&image, &flow.images);
                    for ((c, d), e) in pushed.terms() {
                        lhs.add_term((a + c, b + d), e);
                    }
                }
                let mut rhs = ParamPoly::zero();
                for (k, term) in expansion.iter().enumerate() {
                    rhs.add_term((k as u32, 0), &self.apply(term, g));
                }
                lhs == rhs
            })
    }
}

impl FlowMap {
    pub fn at(&self, t: &Rational) -> [SurfacePolynomial; 3] {
        self.images.each_ref().map(|p| p.at_t(t))
    }

    pub fn is_identity_at_zero(&self) -> bool {
        self.at(&Rational::zero())
            == [SurfacePolynomial::x(), SurfacePolynomial::y(), SurfacePolynomial::z()]
    }
}
