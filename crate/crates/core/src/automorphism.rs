//! Algebraic automorphisms as words in shears, hyperbolic rotations, the
//! involution and symmetries of `p`.
//!
//! Conventions. An automorphism is a map `φ: D_p → D_p` given by the images
//! `(φ_x, φ_y, φ_z)` of the coordinates. It acts on functions by pullback:
//! `apply_auto(φ, e) = e ∘ φ`. Composition is composition of maps, so
//! `compose(φ, ψ) = φ ∘ ψ` applies `ψ` first and
//! `apply_auto(φ ∘ ψ, e) = apply_auto(ψ, apply_auto(φ, e))`.
//!
//! Words are kept in the normal form `S_1 ∘ … ∘ S_m ∘ H_λ ∘ I^e ∘ γ` with
//! alternating nonzero shears, obtained by pushing the tail generators to the
//! right through shears.

use std::fmt;

use num_traits::{One, Zero};

use crate::chart::ChartElement;
use crate::error::{Error, Result};
use crate::fields::AlgebraicVectorField;
use crate::rational::{format_rational, int, pow, Rational};
use crate::surface::{Surface, SurfacePolynomial};
use crate::unipoly::UniPoly;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum AutoGenerator {
    /// `Δ_f: (x, y, z) ↦ (x, p(z + x f(x))/x, z + x f(x))`
    XShear(UniPoly),
    /// `I ∘ Δ_f ∘ I`
    YShear(UniPoly),
    /// `H_λ: (x, y, z) ↦ (λx, y/λ, z)`
    Hyperbolic(Rational),
    /// `I: (x, y, z) ↦ (y, x, z)`
    Involution,
    /// `(x, y, z) ↦ (x, c·y, a·z + b)` with `a = ±1`, `c = a^deg p` and
    /// `p(az + b) = c·p(z)`.
    Symmetry { a: Rational, b: Rational },
}

impl AutoGenerator {
    fn is_identity(&self) -> bool {
        match self {
            AutoGenerator::XShear(f) | AutoGenerator::YShear(f) => f.is_zero(),
            AutoGenerator::Hyperbolic(l) => l.is_one(),
            AutoGenerator::Involution => false,
            AutoGenerator::Symmetry { a, b } => a.is_one() && b.is_zero(),
        }
    }

    fn is_shear(&self) -> bool {
        matches!(self, AutoGenerator::XShear(_) | AutoGenerator::YShear(_))
    }
}

impl fmt::Display for AutoGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AutoGenerator::XShear(g) => write!(f, "Dx({})", g.display_in("t")),
            AutoGenerator::YShear(g) => write!(f, "Dy({})", g.display_in("t")),
            AutoGenerator::Hyperbolic(l) => write!(f, "H({})", format_rational(l)),
            AutoGenerator::Involution => write!(f, "I"),
            AutoGenerator::Symmetry { a, b } => {
                write!(f, "Sym({},{})", format_rational(a), format_rational(b))
            }
        }
    }
}

impl fmt::Debug for AutoGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The tail `H_λ ∘ I^e ∘ γ` of a normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Tail {
    lambda: Rational,
    involution: bool,
    a: Rational,
    b: Rational,
    degree: u32,
}

impl Tail {
    fn identity(degree: u32) -> Self {
        Self {
            lambda: Rational::one(),
            involution: false,
            a: Rational::one(),
            b: Rational::zero(),
            degree,
        }
    }

    /// The y-scale `a^deg p` of the symmetry factor.
    fn c(&self) -> Rational {
        pow(&self.a, self.degree)
    }

    /// Rewrites `tail ∘ shear` as `shear' ∘ tail`.
    fn push(&self, g: &AutoGenerator) -> AutoGenerator {
        let (mut is_x, mut f) = match g {
            AutoGenerator::XShear(f) => (true, f.clone()),
            AutoGenerator::YShear(f) => (false, f.clone()),
            _ => unreachable!("only shears are pushed"),
        };
        // γ first (it is the rightmost tail factor).
        f = if is_x {
            f.scale(&self.a)
        } else {
            let c = self.c();
            f.affine_substitute(&c, &Rational::zero()).scale(&(&self.a * &c))
        };
        if self.involution {
            is_x = !is_x;
        }
        let l = &self.lambda;
        f = if is_x {
            let inv = Rational::one() / l;
            f.affine_substitute(&inv, &Rational::zero()).scale(&inv)
        } else {
            f.affine_substitute(l, &Rational::zero()).scale(l)
        };
        if is_x {
            AutoGenerator::XShear(f)
        } else {
            AutoGenerator::YShear(f)
        }
    }

    /// `self ∘ g` for a non-shear generator.
    fn absorb(&mut self, g: &AutoGenerator) {
        match g {
            AutoGenerator::Hyperbolic(mu) => {
                if self.involution {
                    self.lambda = &self.lambda / mu;
                } else {
                    self.lambda = &self.lambda * mu;
                }
            }
            AutoGenerator::Involution => {
                // γ ∘ I = H_c ∘ I ∘ γ and I ∘ H_c = H_{1/c} ∘ I, with c = ±1.
                self.lambda = &self.lambda * &self.c();
                self.involution = !self.involution;
            }
            AutoGenerator::Symmetry { a, b } => {
                self.b = &(&self.a * b) + &self.b;
                self.a = &self.a * a;
            }
            _ => unreachable!("shears are pushed, not absorbed"),
        }
    }

    fn generators(&self) -> Vec<AutoGenerator> {
        let mut out = Vec::new();
        if !self.lambda.is_one() {
            out.push(AutoGenerator::Hyperbolic(self.lambda.clone()));
        }
        if self.involution {
            out.push(AutoGenerator::Involution);
        }
        if !(self.a.is_one() && self.b.is_zero()) {
            out.push(AutoGenerator::Symmetry {
                a: self.a.clone(),
                b: self.b.clone(),
            });
        }
        out
    }
}

/// An automorphism in normal form together with its coordinate images.
#[derive(Clone, PartialEq, Eq)]
pub struct PolynomialAutomorphism {
    word: Vec<AutoGenerator>,
    images: [SurfacePolynomial; 3],
}

impl PolynomialAutomorphism {
    /// Normal-form word, leftmost factor first (map notation).
    pub fn word(&self) -> &[AutoGenerator] {
        &self.word
    }

    pub fn images(&self) -> &[SurfacePolynomial; 3] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }
}

impl fmt::Display for PolynomialAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "id");
        }
        let parts: Vec<String> = self.word.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join(" o "))
    }
}

impl fmt::Debug for PolynomialAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} ↦ [{}; {}; {}]", self.images[0], self.images[1], self.images[2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZDegree {
    IdentityWord,
    Degree(i64),
}

fn generator_images(s: &Surface, g: &AutoGenerator) -> [SurfacePolynomial; 3] {
    let (x, y, z) = (SurfacePolynomial::x(), SurfacePolynomial::y(), SurfacePolynomial::z());
    match g {
        AutoGenerator::XShear(f) => x_shear_images(s, f),
        AutoGenerator::YShear(f) => {
            let [a, b, c] = x_shear_images(s, f);
            [b.swap_xy(), a.swap_xy(), c.swap_xy()]
        }
        AutoGenerator::Hyperbolic(l) => [x.scale(l), y.scale(&(Rational::one() / l)), z],
        AutoGenerator::Involution => [y, x, z],
        AutoGenerator::Symmetry { a, b } => {
            let c = y_scale(s, a);
            [x, y.scale(&c), SurfacePolynomial::from_z(UniPoly::from_coeffs([b.clone(), a.clone()]))]
        }
    }
}

fn inverse_generator(g: &AutoGenerator) -> AutoGenerator {
    match g {
        AutoGenerator::XShear(f) => AutoGenerator::XShear(-f),
        AutoGenerator::YShear(f) => AutoGenerator::YShear(-f),
        AutoGenerator::Hyperbolic(l) => AutoGenerator::Hyperbolic(Rational::one() / l),
        AutoGenerator::Involution => AutoGenerator::Involution,
        AutoGenerator::Symmetry { a, b } => AutoGenerator::Symmetry {
            a: a.clone(),
            b: -(a * b),
        },
    }
}

fn y_scale(s: &Surface, a: &Rational) -> Rational {
    pow(a, s.degree())
}

fn x_shear_images(s: &Surface, f: &UniPoly) -> [SurfacePolynomial; 3] {
    // z + x f(x) in the chart, then y = p(z + x f(x)) / x.
    let mut shift = ChartElement::from_z(UniPoly::z());
    for (e, c) in f.terms() {
        shift.add_term(e as i64 + 1, &UniPoly::constant(c.clone()));
    }
    let mut p_at = ChartElement::zero();
    let mut power = ChartElement::from_z(UniPoly::one());
    let mut at = 0;
    for (e, c) in s.p().terms() {
        while at < e {
            power = &power * &shift;
            at += 1;
        }
        p_at = &p_at + &power.scale(c);
    }
    let y = s
        .from_chart(&p_at.shift_x(-1))
        .expect("p(z + x f(x)) / x is regular");
    let z = s.from_chart(&shift).expect("z + x f(x) is regular");
    [SurfacePolynomial::x(), y, z]
}

impl Surface {
    /// Validated generator for a symmetry `z ↦ a z + b`.
    pub fn symmetry(&self, a: Rational, b: Rational) -> Result<AutoGenerator> {
        if !(a.is_one() || a == -Rational::one()) {
            return Err(Error::InvalidGenerator(format!(
                "symmetry scale must be 1 or -1, got {}",
                format_rational(&a)
            )));
        }
        let c = y_scale(self, &a);
        if self.p().affine_substitute(&a, &b) != self.p().scale(&c) {
            return Err(Error::InvalidGenerator(format!(
                "z -> {}*z + {} is not a symmetry of p = {}",
                format_rational(&a),
                format_rational(&b),
                self.p()
            )));
        }
        Ok(AutoGenerator::Symmetry { a, b })
    }

    fn check_generator(&self, g: &AutoGenerator) -> Result<()> {
        match g {
            AutoGenerator::Hyperbolic(l) if l.is_zero() => Err(Error::InvalidGenerator(
                "hyperbolic rotation needs a nonzero parameter".into(),
            )),
            AutoGenerator::Symmetry { a, b } => self.symmetry(a.clone(), b.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn identity_auto(&self) -> PolynomialAutomorphism {
        PolynomialAutomorphism {
            word: Vec::new(),
            images: [SurfacePolynomial::x(), SurfacePolynomial::y(), SurfacePolynomial::z()],
        }
    }

    /// The automorphism `g_1 ∘ g_2 ∘ … ∘ g_n` (map notation, `g_n` acts first).
    pub fn automorphism(&self, word: &[AutoGenerator]) -> Result<PolynomialAutomorphism> {
        for g in word {
            self.check_generator(g)?;
        }
        Ok(self.normalize(word))
    }

    pub fn generator(&self, g: AutoGenerator) -> Result<PolynomialAutomorphism> {
        self.automorphism(&[g])
    }

    fn normalize(&self, word: &[AutoGenerator]) -> PolynomialAutomorphism {
        let mut shears: Vec<AutoGenerator> = Vec::new();
        let mut tail = Tail::identity(self.degree());
        for g in word {
            if g.is_identity() {
                continue;
            }
            if !g.is_shear() {
                tail.absorb(g);
                continue;
            }
            let pushed = tail.push(g);
            let merged = match (shears.last(), &pushed) {
                (Some(AutoGenerator::XShear(a)), AutoGenerator::XShear(b)) => {
                    Some(AutoGenerator::XShear(a + b))
                }
                (Some(AutoGenerator::YShear(a)), AutoGenerator::YShear(b)) => {
                    Some(AutoGenerator::YShear(a + b))
                }
                _ => None,
            };
            match merged {
                Some(m) => {
                    shears.pop();
                    if !m.is_identity() {
                        shears.push(m);
                    }
                }
                None => shears.push(pushed),
            }
        }
        shears.extend(tail.generators());
        let images = self.word_images(&shears);
        PolynomialAutomorphism {
            word: shears,
            images,
        }
    }

    /// Images of a raw word, computed without normalization.
    pub fn word_images(&self, word: &[AutoGenerator]) -> [SurfacePolynomial; 3] {
        let mut cur = [SurfacePolynomial::x(), SurfacePolynomial::y(), SurfacePolynomial::z()];
        for g in word {
            let imgs = generator_images(self, g);
            cur = cur.map(|e| self.substitute(&e, &imgs));
        }
        cur
    }

    /// `e(images)`, reduced.
    pub fn substitute(&self, e: &SurfacePolynomial, images: &[SurfacePolynomial; 3]) -> SurfacePolynomial {
        let charts = images.each_ref().map(|g| self.to_chart(g));
        let mut caches: [Vec<ChartElement>; 3] = Default::default();
        let mut power = |var: usize, k: u32| -> ChartElement {
            let cache = &mut caches[var];
            if cache.is_empty() {
                cache.push(ChartElement::from_z(UniPoly::one()));
            }
            while cache.len() <= k as usize {
                let next = cache.last().unwrap() * &charts[var];
                cache.push(next);
            }
            cache[k as usize].clone()
        };
        let mut out = ChartElement::zero();
        for (m, c) in e.terms() {
            use crate::surface::Monomial;
            let (var, i, j) = match m {
                Monomial::X { i, j } => (Some(0), i, j),
                Monomial::Y { i, j } => (Some(1), i, j),
                Monomial::Z { j } => (None, 0, j),
            };
            let zpart = power(2, j);
            let term = match var {
                Some(v) => &power(v, i) * &zpart,
                None => zpart,
            };
            out = &out + &term.scale(c);
        }
        self.from_chart(&out)
            .expect("substitution of automorphism images is regular")
    }

    /// `e ∘ φ`
    pub fn apply_auto(&self, phi: &PolynomialAutomorphism, e: &SurfacePolynomial) -> SurfacePolynomial {
        if phi.is_identity() {
            return e.clone();
        }
        self.substitute(e, &phi.images)
    }

    /// `φ ∘ ψ` (`ψ` acts first).
    pub fn compose(&self, phi: &PolynomialAutomorphism, psi: &PolynomialAutomorphism) -> PolynomialAutomorphism {
        let word: Vec<AutoGenerator> = phi.word.iter().chain(&psi.word).cloned().collect();
        self.normalize(&word)
    }

    pub fn invert(&self, phi: &PolynomialAutomorphism) -> PolynomialAutomorphism {
        let word: Vec<AutoGenerator> = phi.word.iter().rev().map(inverse_generator).collect();
        self.normalize(&word)
    }

    /// x-degree of the Laurent expansion of the z-image of a shear word.
    ///
    /// When the first shear to act is a y-shear the roles of `x` and `y` are
    /// exchanged, as in the growth argument for alternating words.
    pub fn z_x_degree(&self, phi: &PolynomialAutomorphism) -> Result<ZDegree> {
        if self.degree() < 3 {
            return Err(Error::DegreeGate(format!(
                "z_x_degree needs deg p >= 3, got {}",
                self.degree()
            )));
        }
        if let Some(g) = phi.word.iter().find(|g| !g.is_shear()) {
            return Err(Error::NotAShearWord(format!("contains {g}")));
        }
        let Some(first) = phi.word.last() else {
            return Ok(ZDegree::IdentityWord);
        };
        let z = &phi.images[2];
        let z = match first {
            AutoGenerator::YShear(_) => z.swap_xy(),
            _ => z.clone(),
        };
        let d = self
            .to_chart(&z)
            .x_degree()
            .ok_or_else(|| Error::InternalInvariantViolation("z-image vanished".into()))?;
        Ok(ZDegree::Degree(d))
    }

    /// `φ*Θ: g ↦ (Θ(g ∘ φ⁻¹)) ∘ φ`
    pub fn conjugate_field(
        &self,
        phi: &PolynomialAutomorphism,
        v: &AlgebraicVectorField,
    ) -> AlgebraicVectorField {
        // Conjugation by φ ∘ ψ is conjugation by φ followed by ψ, so the word
        // is processed one generator at a time, outermost first. This keeps
        // every substitution low-degree.
        let mut out = v.clone();
        for g in &phi.word {
            let fwd = generator_images(self, g);
            let back = generator_images(self, &inverse_generator(g));
            let [x, y, z] = back
                .each_ref()
                .map(|h| self.substitute(&self.apply(&out, h), &fwd));
            out = self.field(x, y, z).expect("conjugation preserves tangency");
        }
        out
    }

    /// The constant `J` with `φ*ω = J·ω`.
    pub fn volume_factor(&self, phi: &PolynomialAutomorphism) -> Result<Rational> {
        let fx = self.to_chart(&phi.images[0]);
        let fz = self.to_chart(&phi.images[2]);
        let jac = &(&fx.d_x() * &fz.d_z()) - &(&fx.d_z() * &fz.d_x());
        jac.shift_x(1).ratio_to(&fx).ok_or_else(|| {
            Error::InternalInvariantViolation(format!("volume factor of {phi} is not constant"))
        })
    }

    /// `SF_0^x`, `SF_0^y` and `α_k*(SF_0^y)` for `k = 1..=deg p'`.
    pub fn default_flex_family(&self) -> Vec<AlgebraicVectorField> {
        let mut out = vec![self.shear_x(0), self.shear_y(0)];
        let n = self.p_prime().degree().unwrap_or(0);
        for k in 1..=n {
            let alpha = self.normalize(&[AutoGenerator::XShear(UniPoly::constant(int(k as i64)))]);
            out.push(self.conjugate_field(&alpha, &self.shear_y(0)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{LndVerdict, Potential, DEFAULT_LND_BOUND};
    use crate::rational::rat;
    use proptest::prelude::*;

    fn surf(c: &[i64]) -> Surface {
        Surface::new(UniPoly::from_ints(c)).unwrap()
    }

    fn relation_holds(s: &Surface, imgs: &[SurfacePolynomial; 3]) -> bool {
        s.mul(&imgs[0], &imgs[1]) == s.substitute(&SurfacePolynomial::from_z(s.p().clone()), &[
            SurfacePolynomial::x(),
            SurfacePolynomial::y(),
            imgs[2].clone(),
        ])
    }

    #[test]
    fn generator_actions() {
        let s = surf(&[-1, 0, 1]);
        let d = s.generator(AutoGenerator::XShear(UniPoly::one())).unwrap();
        assert_eq!(s.apply_auto(&d, &SurfacePolynomial::z()).to_string(), "x + z");
        let i = s.generator(AutoGenerator::Involution).unwrap();
        assert_eq!(s.apply_auto(&i, &SurfacePolynomial::x()), SurfacePolynomial::y());
        let h = s.generator(AutoGenerator::Hyperbolic(int(2))).unwrap();
        let xz = SurfacePolynomial::x_times(1, &UniPoly::z());
        assert_eq!(s.apply_auto(&h, &xz), xz.scale(&int(2)));
        for phi in [&d, &i, &h] {
            assert!(relation_holds(&s, phi.images()));
        }
    }

    #[test]
    fn normal_form_relations() {
        let s = surf(&[0, -1, 0, 1]);
        let f = UniPoly::from_ints(&[1, 2]);
        let d = s.generator(AutoGenerator::XShear(f.clone())).unwrap();
        assert!(s.compose(&d, &s.invert(&d)).is_identity());
        let i = s.generator(AutoGenerator::Involution).unwrap();
        assert!(s.compose(&i, &i).is_identity());
        let l = int(3);
        let h = s.generator(AutoGenerator::Hyperbolic(l.clone())).unwrap();
        let conj = s.compose(&s.invert(&h), &s.compose(&d, &h));
        let expected = f.affine_substitute(&l, &Rational::zero()).scale(&l);
        assert_eq!(conj.word(), &[AutoGenerator::XShear(expected)]);
    }

    #[test]
    fn symmetry_validation() {
        let s = surf(&[-1, 0, 1]);
        assert!(s.symmetry(int(-1), int(0)).is_ok());
        assert!(s.symmetry(int(1), int(1)).is_err());
        assert!(s.symmetry(int(2), int(0)).is_err());
        let s3 = surf(&[0, -1, 0, 1]);
        let g = s3.symmetry(int(-1), int(0)).unwrap();
        let phi = s3.generator(g).unwrap();
        assert!(relation_holds(&s3, phi.images()));
        assert_eq!(s3.volume_factor(&phi).unwrap(), int(-1));
    }

    #[test]
    fn volume_factors() {
        let s = surf(&[-1, 0, 1]);
        let cases = [
            (AutoGenerator::Involution, int(-1)),
            (AutoGenerator::Hyperbolic(rat(5, 2)), int(1)),
            (AutoGenerator::XShear(UniPoly::from_ints(&[0, 1, 1])), int(1)),
            (AutoGenerator::YShear(UniPoly::from_ints(&[2])), int(1)),
        ];
        for (g, j) in cases {
            let phi = s.generator(g).unwrap();
            assert_eq!(s.volume_factor(&phi).unwrap(), j);
        }
    }

    #[test]
    fn z_degree_single_shear() {
        let s = surf(&[0, -1, 0, 1]);
        let phi = s.generator(AutoGenerator::XShear(UniPoly::from_ints(&[1, 0, 3]))).unwrap();
        assert_eq!(s.z_x_degree(&phi).unwrap(), ZDegree::Degree(3));
        assert_eq!(s.z_x_degree(&s.identity_auto()).unwrap(), ZDegree::IdentityWord);
        let q = surf(&[-1, 0, 1]);
        assert_eq!(q.z_x_degree(&q.identity_auto()).unwrap_err().code(), "degree_gate");
        let h = s.generator(AutoGenerator::Hyperbolic(int(2))).unwrap();
        assert_eq!(s.z_x_degree(&h).unwrap_err().code(), "not_a_shear_word");
    }

    #[test]
    fn conjugation_basics() {
        let s = surf(&[-1, 0, 1]);
        let v = s.shear_x(1);
        assert_eq!(s.conjugate_field(&s.identity_auto(), &v), v);
        let d = s.generator(AutoGenerator::YShear(UniPoly::from_ints(&[1, 1]))).unwrap();
        let w = s.conjugate_field(&d, &s.shear_x(0));
        assert!(matches!(s.lnd_check(&w, DEFAULT_LND_BOUND), LndVerdict::NilpotentWithDegree(_)));
    }

    /// The displayed formula for the conjugated field, built in the chart.
    #[test]
    fn alpha_conjugate_matches_formula() {
        for s in [surf(&[-1, 0, 1]), surf(&[0, -1, 0, 1])] {
            for k in 1..3i64 {
                let shift = ChartElement::from_terms([(0, UniPoly::z()), (1, UniPoly::constant(int(k)))]);
                let eval = |q: &UniPoly| {
                    let mut acc = ChartElement::zero();
                    for (e, c) in q.terms() {
                        acc = &acc + &shift.pow(e).scale(c);
                    }
                    acc
                };
                let pk = eval(s.p());
                let ppk = eval(s.p_prime());
                let p = ChartElement::from_z(s.p().clone());
                let pp = ChartElement::from_z(s.p_prime().clone());
                let ex = ppk.clone();
                let ey = (&(&(&pk * &pp) - &(&ppk * &p)) - &(&ppk * &pp).shift_x(1).scale(&int(k)))
                    .shift_x(-2);
                let ez = &ppk.scale(&int(-k)) + &pk.shift_x(-1);
                let expected = s
                    .field(
                        s.from_chart(&ex).unwrap(),
                        s.from_chart(&ey).unwrap(),
                        s.from_chart(&ez).unwrap(),
                    )
                    .unwrap();
                let alpha = s.generator(AutoGenerator::XShear(UniPoly::constant(int(k)))).unwrap();
                assert_eq!(s.conjugate_field(&alpha, &s.shear_y(0)), expected);
            }
        }
    }

    #[test]
    fn potential_transport() {
        let s = surf(&[0, -1, 0, 1]);
        let v = s.shear_y(1);
        let f = s.potential_of(&v).unwrap();
        for g in [
            AutoGenerator::XShear(UniPoly::from_ints(&[1, -1])),
            AutoGenerator::Involution,
            AutoGenerator::Hyperbolic(int(3)),
        ] {
            let phi = s.generator(g).unwrap();
            let j = s.volume_factor(&phi).unwrap();
            let lhs = s.potential_of(&s.conjugate_field(&phi, &v)).unwrap();
            let rhs = Potential::new(s.apply_auto(&phi, f.value()).scale(&(Rational::one() / j)));
            assert_eq!(lhs, rhs);
        }
    }

    fn small_uni() -> impl Strategy<Value = UniPoly> {
        prop::collection::vec(-2i64..3, 1..3).prop_map(|c| UniPoly::from_ints(&c))
    }

    fn generator() -> impl Strategy<Value = AutoGenerator> {
        prop_oneof![
            small_uni().prop_map(AutoGenerator::XShear),
            small_uni().prop_map(AutoGenerator::YShear),
            prop_oneof![Just(int(2)), Just(rat(-1, 3)), Just(int(-1))].prop_map(AutoGenerator::Hyperbolic),
            Just(AutoGenerator::Involution),
            Just(AutoGenerator::Symmetry { a: int(-1), b: int(0) }),
        ]
    }

    /// Constant shears only, so that long products stay small.
    fn tame_generator() -> impl Strategy<Value = AutoGenerator> {
        let c = (-2i64..3).prop_map(|c| UniPoly::from_ints(&[c]));
        prop_oneof![
            c.clone().prop_map(AutoGenerator::XShear),
            c.prop_map(AutoGenerator::YShear),
            prop_oneof![Just(int(2)), Just(rat(-1, 3))].prop_map(AutoGenerator::Hyperbolic),
            Just(AutoGenerator::Involution),
            Just(AutoGenerator::Symmetry { a: int(-1), b: int(0) }),
        ]
    }

    fn shear() -> impl Strategy<Value = AutoGenerator> {
        prop_oneof![
            small_uni().prop_map(AutoGenerator::XShear),
            small_uni().prop_map(AutoGenerator::YShear),
        ]
    }

    /// Degree of the z-image by the growth recursion for alternating words.
    fn recursion_degree(n: i64, word: &[AutoGenerator]) -> Option<i64> {
        let first_is_y = matches!(word.last()?, AutoGenerator::YShear(_));
        let (mut dx, mut dy, mut dz) = (1i64, -1i64, 0i64);
        if first_is_y {
            std::mem::swap(&mut dx, &mut dy);
        }
        for g in word.iter().rev() {
            match g {
                AutoGenerator::XShear(f) => {
                    dz = dz.max(dx * (f.degree()? as i64 + 1));
                    dy = n * dz - dx;
                }
                AutoGenerator::YShear(f) => {
                    dz = dz.max(dy * (f.degree()? as i64 + 1));
                    dx = n * dz - dy;
                }
                _ => return None,
            }
        }
        Some(dz)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn normalization_is_sound(word in prop::collection::vec(generator(), 0..4)) {
            let s = surf(&[0, -1, 0, 1]);
            let phi = s.automorphism(&word).unwrap();
            prop_assert_eq!(phi.images(), &s.word_images(&word));
            prop_assert!(relation_holds(&s, phi.images()));
        }

        #[test]
        fn group_axioms(a in prop::collection::vec(tame_generator(), 0..4), b in prop::collection::vec(tame_generator(), 0..4)) {
            let s = surf(&[0, -1, 0, 1]);
            let phi = s.automorphism(&a).unwrap();
            let psi = s.automorphism(&b).unwrap();
            prop_assert!(s.compose(&phi, &s.invert(&phi)).is_identity());
            prop_assert!(s.compose(&s.invert(&phi), &phi).is_identity());
            let both = s.compose(&phi, &psi);
            let e = SurfacePolynomial::x_times(1, &UniPoly::z()) + SurfacePolynomial::y();
            prop_assert_eq!(s.apply_auto(&both, &e), s.apply_auto(&psi, &s.apply_auto(&phi, &e)));
            let jf = s.volume_factor(&phi).unwrap();
            let jg = s.volume_factor(&psi).unwrap();
            prop_assert_eq!(s.volume_factor(&both).unwrap(), jf * jg);
        }

        #[test]
        fn shear_words_move_z(word in prop::collection::vec(shear(), 1..4)) {
            let s = surf(&[0, -1, 0, 1]);
            let phi = s.automorphism(&word).unwrap();
            match s.z_x_degree(&phi).unwrap() {
                ZDegree::IdentityWord => prop_assert!(phi.is_identity()),
                ZDegree::Degree(d) => {
                    prop_assert!(d > 0);
                    prop_assert_eq!(Some(d), recursion_degree(3, phi.word()));
                }
            }
        }
    }
}
