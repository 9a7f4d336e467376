//! Algebraic vector fields as derivations of the coordinate ring.
//!
//! A field is stored by its values on the generators `x, y, z`. Tangency means
//! the derivation kills `xy − p(z)`, i.e. `y·X + x·Y − p'(z)·Z = 0`.
//!
//! The volume form is fixed as `ω = dx/x ∧ dz` on the chart `x ≠ 0`, so the
//! interior product of `Θ` has chart components `(−Z/x) dx + (X/x) dz`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::chart::ChartElement;
use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};
use crate::span::Echelon;
use crate::surface::{Surface, SurfacePolynomial};
use crate::unipoly::UniPoly;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct AlgebraicVectorField {
    x: SurfacePolynomial,
    y: SurfacePolynomial,
    z: SurfacePolynomial,
}

impl AlgebraicVectorField {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn img_x(&self) -> &SurfacePolynomial {
        &self.x
    }

    pub fn img_y(&self) -> &SurfacePolynomial {
        &self.y
    }

    pub fn img_z(&self) -> &SurfacePolynomial {
        &self.z
    }

    pub fn images(&self) -> [&SurfacePolynomial; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            x: self.x.scale(c),
            y: self.y.scale(c),
            z: self.z.scale(c),
        }
    }

    /// Images evaluated at a rational point.
    pub fn eval(&self, point: &[Rational; 3]) -> [Rational; 3] {
        [self.x.eval(point), self.y.eval(point), self.z.eval(point)]
    }
}

impl fmt::Display for AlgebraicVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}; {}; {}]", self.x, self.y, self.z)
    }
}

impl fmt::Debug for AlgebraicVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &AlgebraicVectorField {
    type Output = AlgebraicVectorField;
    fn add(self, rhs: &AlgebraicVectorField) -> AlgebraicVectorField {
        AlgebraicVectorField {
            x: &self.x + &rhs.x,
            y: &self.y + &rhs.y,
            z: &self.z + &rhs.z,
        }
    }
}

impl Sub for &AlgebraicVectorField {
    type Output = AlgebraicVectorField;
    fn sub(self, rhs: &AlgebraicVectorField) -> AlgebraicVectorField {
        AlgebraicVectorField {
            x: &self.x - &rhs.x,
            y: &self.y - &rhs.y,
            z: &self.z - &rhs.z,
        }
    }
}

impl Neg for &AlgebraicVectorField {
    type Output = AlgebraicVectorField;
    fn neg(self) -> AlgebraicVectorField {
        self.scale(&int(-1))
    }
}

/// A regular function modulo constants, represented with zero constant term.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Potential(SurfacePolynomial);

impl Potential {
    pub fn new(f: SurfacePolynomial) -> Self {
        Self(f.without_constant())
    }

    pub fn value(&self) -> &SurfacePolynomial {
        &self.0
    }

    pub fn into_inner(self) -> SurfacePolynomial {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl From<SurfacePolynomial> for Potential {
    fn from(f: SurfacePolynomial) -> Self {
        Self::new(f)
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Potential({})", self.0)
    }
}

/// `g_x dx + g_z dz` in the chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartOneForm {
    pub g_x: ChartElement,
    pub g_z: ChartElement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LndVerdict {
    NilpotentWithDegree(usize),
    NotNilpotentWithinBound(usize),
}

impl LndVerdict {
    pub fn is_nilpotent(&self) -> bool {
        matches!(self, LndVerdict::NilpotentWithDegree(_))
    }
}

pub const DEFAULT_LND_BOUND: usize = 64;

impl Surface {
    /// Builds a field from generator images, checking tangency.
    pub fn field(
        &self,
        x: SurfacePolynomial,
        y: SurfacePolynomial,
        z: SurfacePolynomial,
    ) -> Result<AlgebraicVectorField> {
        let v = AlgebraicVectorField { x, y, z };
        let defect = self.tangency_defect(&v)?;
        if !defect.is_zero() {
            return Err(Error::NotTangent {
                defect: defect.to_string(),
            });
        }
        Ok(v)
    }

    fn tangency_defect(&self, v: &AlgebraicVectorField) -> Result<SurfacePolynomial> {
        let pp = SurfacePolynomial::from_z(self.p_prime().clone());
        Ok(&(&self.try_mul(&SurfacePolynomial::y(), &v.x)?
            + &self.try_mul(&SurfacePolynomial::x(), &v.y)?)
            - &self.try_mul(&pp, &v.z)?)
    }

    pub fn is_tangent(&self, v: &AlgebraicVectorField) -> bool {
        matches!(self.tangency_defect(v), Ok(d) if d.is_zero())
    }

    /// `SF_i^x = p'(z) x^i ∂/∂y + x^{i+1} ∂/∂z`
    pub fn shear_x(&self, i: u32) -> AlgebraicVectorField {
        AlgebraicVectorField {
            x: SurfacePolynomial::zero(),
            y: SurfacePolynomial::x_times(i, self.p_prime()),
            z: SurfacePolynomial::x_times(i + 1, &UniPoly::one()),
        }
    }

    /// `SF_i^y = p'(z) y^i ∂/∂x + y^{i+1} ∂/∂z`
    pub fn shear_y(&self, i: u32) -> AlgebraicVectorField {
        AlgebraicVectorField {
            x: SurfacePolynomial::y_times(i, self.p_prime()),
            y: SurfacePolynomial::zero(),
            z: SurfacePolynomial::y_times(i + 1, &UniPoly::one()),
        }
    }

    /// `HF_f = f(z)(x ∂/∂x − y ∂/∂y)`
    pub fn hyperbolic(&self, f: &UniPoly) -> AlgebraicVectorField {
        AlgebraicVectorField {
            x: SurfacePolynomial::x_times(1, f),
            y: -SurfacePolynomial::y_times(1, f),
            z: SurfacePolynomial::zero(),
        }
    }

    fn try_apply(&self, v: &AlgebraicVectorField, f: &SurfacePolynomial) -> Result<SurfacePolynomial> {
        if f.is_constant() || v.is_zero() {
            return Ok(SurfacePolynomial::zero());
        }
        // In the chart, Θ(F) = X ∂F/∂x + Z ∂F/∂z; the y-image is implied.
        let c = self.to_chart(f);
        let out = &(&self.to_chart(&v.x) * &c.d_x()) + &(&self.to_chart(&v.z) * &c.d_z());
        self.from_chart(&out).map_err(|e| {
            Error::InternalInvariantViolation(format!("derivation left the coordinate ring: {e}"))
        })
    }

    /// The derivation `Θ` applied to `f`.
    pub fn apply(&self, v: &AlgebraicVectorField, f: &SurfacePolynomial) -> SurfacePolynomial {
        self.try_apply(v, f).unwrap_or_else(|e| panic!("{e}"))
    }

    /// `[Θ, Ψ](g) = Θ(Ψ(g)) − Ψ(Θ(g))`
    pub fn bracket(&self, a: &AlgebraicVectorField, b: &AlgebraicVectorField) -> AlgebraicVectorField {
        let one = |ga: &SurfacePolynomial, gb: &SurfacePolynomial| &self.apply(a, gb) - &self.apply(b, ga);
        AlgebraicVectorField {
            x: one(&a.x, &b.x),
            y: one(&a.y, &b.y),
            z: one(&a.z, &b.z),
        }
    }

    pub fn interior_product(&self, v: &AlgebraicVectorField) -> ChartOneForm {
        ChartOneForm {
            g_x: -&self.to_chart(&v.z).shift_x(-1),
            g_z: self.to_chart(&v.x).shift_x(-1),
        }
    }

    pub fn is_volume_preserving(&self, v: &AlgebraicVectorField) -> bool {
        let form = self.interior_product(v);
        form.g_x.d_z() == form.g_z.d_x()
    }

    /// The potential `f` with `i_Θω = df`.
    pub fn potential_of(&self, v: &AlgebraicVectorField) -> Result<Potential> {
        let form = self.interior_product(v);
        if form.g_x.d_z() != form.g_z.d_x() {
            return Err(Error::NotVolumePreserving);
        }
        if !form.g_x.coeff(-1).is_zero() {
            return Err(Error::ResidueObstruction);
        }
        let mut f = ChartElement::zero();
        for (k, c) in form.g_x.terms() {
            f.add_term(k + 1, &c.scale(&Rational::new(1.into(), (k + 1).into())));
        }
        let rest = &form.g_z - &f.d_z();
        if rest.terms().any(|(k, _)| k != 0) {
            return Err(Error::InternalInvariantViolation(
                "closed form has an x-dependent dz remainder".into(),
            ));
        }
        f.add_term(0, &rest.coeff(0).antiderivative());
        let f = self.from_chart(&f).map_err(|e| {
            Error::InternalInvariantViolation(format!("potential is not regular: {e}"))
        })?;
        Ok(Potential::new(f))
    }

    /// Inverse of [`Surface::potential_of`].
    pub fn hamiltonian_of(&self, f: &Potential) -> Result<AlgebraicVectorField> {
        let c = self.to_chart(f.value());
        let gx = c.d_z().shift_x(1);
        let gz = -&c.d_x().shift_x(1);
        let p = ChartElement::from_z(self.p().clone());
        let pp = ChartElement::from_z(self.p_prime().clone());
        let gy = (&(&pp * &gz) - &(&p * &gx).shift_x(-1)).shift_x(-1);
        let lift = |e: &ChartElement| {
            self.from_chart(e).map_err(|err| {
                Error::InternalInvariantViolation(format!("hamiltonian field is not regular: {err}"))
            })
        };
        Ok(AlgebraicVectorField {
            x: lift(&gx)?,
            y: lift(&gy)?,
            z: lift(&gz)?,
        })
    }

    /// The potential of `[H_f, H_g]`, i.e. `H_f(g)` modulo constants.
    pub fn function_bracket(&self, f: &Potential, g: &Potential) -> Result<Potential> {
        let h = self.hamiltonian_of(f)?;
        Ok(Potential::new(self.try_apply(&h, g.value())?))
    }

    pub fn lnd_check(&self, v: &AlgebraicVectorField, max_iter: usize) -> LndVerdict {
        let (vx, vz) = (self.to_chart(&v.x), self.to_chart(&v.z));
        let mut worst = 0;
        for g in [SurfacePolynomial::x(), SurfacePolynomial::y(), SurfacePolynomial::z()] {
            let mut cur = self.to_chart(&g);
            let mut killed = None;
            for n in 1..=max_iter {
                // Stay in the chart; every iterate is regular, so no descent check is needed.
                cur = &(&vx * &cur.d_x()) + &(&vz * &cur.d_z());
                if cur.is_zero() {
                    killed = Some(n);
                    break;
                }
            }
            match killed {
                Some(n) => worst = worst.max(n),
                None => return LndVerdict::NotNilpotentWithinBound(max_iter),
            }
        }
        LndVerdict::NilpotentWithDegree(worst)
    }

    /// Whether the given fields span the tangent plane at a rational point.
    pub fn flex_check_with(
        &self,
        point: &[Rational; 3],
        fields: &[AlgebraicVectorField],
    ) -> Result<bool> {
        if !self.contains_point(point) {
            let [x, y, z] = point.each_ref().map(format_rational);
            return Err(Error::PointNotOnSurface { x, y, z });
        }
        let mut span = Echelon::new();
        for (id, v) in fields.iter().enumerate() {
            let vec = UniPoly::from_coeffs(v.eval(point));
            span.insert(id, &vec);
            if span.rank() >= 2 {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// [`Surface::flex_check_with`] using the default family
    /// `SF_0^x, SF_0^y, α_k*(SF_0^y)` for `k = 1..=deg p'`.
    pub fn flex_check(&self, point: &[Rational; 3]) -> Result<bool> {
        self.flex_check_with(point, &self.default_flex_family())
    }
}
