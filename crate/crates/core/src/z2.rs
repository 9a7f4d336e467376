//! Equivariant certificates on `xy = z² − 1` under `σ(x, y, z) = (−x, −y, −z)`.
//!
//! σ negates the volume form, so σ-invariant fields have anti-invariant
//! potentials. The invariant generators are the even-index shears and the
//! hyperbolic fields `HF_{z^{2n}}`; every anti-invariant monomial potential is
//! reached from them by the recursion
//!
//! ```text
//! pot [SF_0^y, SF_{2k}^x]      = −2 z x^{2k}
//! pot [SF_0^y, z^i x^{j+1}]    = (2j + 2 + i) z^{i+1} x^j − i z^{i−1} x^j
//! ```
//!
//! and its mirror image in `y`.

use std::collections::HashMap;

use num_traits::One;

use crate::automorphism::{AutoGenerator, PolynomialAutomorphism};
use crate::error::{Error, Result};
use crate::fields::{AlgebraicVectorField, Potential};
use crate::membership::{BracketExpression, Leaf};
use crate::rational::{int, rat, Rational};
use crate::surface::{Monomial, Surface, SurfacePolynomial};
use crate::unipoly::UniPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Z2Grading {
    pub invariant_part: SurfacePolynomial,
    pub anti_invariant_part: SurfacePolynomial,
}

#[derive(Clone, Debug)]
pub struct Z2Row {
    pub monomial: Monomial,
    pub certificate: BracketExpression,
    pub size: usize,
    pub verified: bool,
}

#[derive(Clone, Debug)]
pub struct Z2Report {
    pub max_degree: u32,
    pub rows: Vec<Z2Row>,
    /// Every leaf used is σ-invariant.
    pub leaves_invariant: bool,
}

impl Z2Report {
    pub fn all_verified(&self) -> bool {
        self.leaves_invariant && self.rows.iter().all(|r| r.verified)
    }
}

impl Surface {
    fn gate_z2(&self) -> Result<()> {
        if self.is_z_squared_minus_one() {
            Ok(())
        } else {
            Err(Error::WrongSurface {
                p: self.p().to_string(),
            })
        }
    }

    /// σ as an automorphism word: `H_{−1}` after `(x, y, −z)`.
    pub fn sigma(&self) -> Result<PolynomialAutomorphism> {
        self.gate_z2()?;
        let flip = self.symmetry(-Rational::one(), int(0))?;
        self.automorphism(&[AutoGenerator::Hyperbolic(-Rational::one()), flip])
    }

    pub fn sigma_apply(&self, e: &SurfacePolynomial) -> Result<SurfacePolynomial> {
        self.gate_z2()?;
        let mut out = SurfacePolynomial::zero();
        for (m, c) in e.terms() {
            let c = if m.total_degree() % 2 == 0 { c.clone() } else { -c };
            out.add_monomial(m, c);
        }
        Ok(out)
    }

    pub fn grade(&self, e: &SurfacePolynomial) -> Result<Z2Grading> {
        self.gate_z2()?;
        let mut g = Z2Grading {
            invariant_part: SurfacePolynomial::zero(),
            anti_invariant_part: SurfacePolynomial::zero(),
        };
        for (m, c) in e.terms() {
            let part = if m.total_degree() % 2 == 0 {
                &mut g.invariant_part
            } else {
                &mut g.anti_invariant_part
            };
            part.add_monomial(m, c.clone());
        }
        Ok(g)
    }

    pub fn is_invariant_field(&self, v: &AlgebraicVectorField) -> Result<bool> {
        let sigma = self.sigma()?;
        Ok(&self.conjugate_field(&sigma, v) == v)
    }

    /// Certificate for an anti-invariant monomial potential, built from
    /// σ-invariant leaves only.
    pub fn z2_certificate(&self, target: Monomial) -> Result<BracketExpression> {
        self.gate_z2()?;
        let mut memo = HashMap::new();
        let e = z2_rec(target, &mut memo)?;
        let f = Potential::new(SurfacePolynomial::monomial(int(1), target));
        if self.verify_certificate(&e, &f) {
            Ok(e)
        } else {
            Err(Error::InternalInvariantViolation(format!(
                "equivariant certificate for {target} does not verify"
            )))
        }
    }

    pub fn z2_avdp_check(&self, max_deg: u32) -> Result<Z2Report> {
        self.gate_z2()?;
        let mut targets = Vec::new();
        for d in (1..=max_deg).step_by(2) {
            targets.push(Monomial::Z { j: d });
            for i in 1..=d {
                targets.push(Monomial::X { i, j: d - i });
                targets.push(Monomial::Y { i, j: d - i });
            }
        }
        let mut memo = HashMap::new();
        let mut rows = Vec::with_capacity(targets.len());
        let mut leaves: Vec<Leaf> = Vec::new();
        for m in targets {
            let e = z2_rec(m, &mut memo)?;
            let f = Potential::new(SurfacePolynomial::monomial(int(1), m));
            for l in e.leaves() {
                if !leaves.contains(&l) {
                    leaves.push(l);
                }
            }
            rows.push(Z2Row {
                monomial: m,
                size: e.size(),
                verified: self.verify_certificate(&e, &f),
                certificate: e,
            });
        }
        let mut leaves_invariant = true;
        for l in &leaves {
            leaves_invariant &= self.is_invariant_field(&l.field(self))?;
        }
        Ok(Z2Report {
            max_degree: max_deg,
            rows,
            leaves_invariant,
        })
    }
}

fn z2_rec(m: Monomial, memo: &mut HashMap<Monomial, BracketExpression>) -> Result<BracketExpression> {
    if m.total_degree() % 2 == 0 {
        let (z, var, power) = match m {
            Monomial::X { i, j } => (j, 'x', i),
            Monomial::Y { i, j } => (j, 'y', i),
            Monomial::Z { j } => (j, 'x', 0),
        };
        return Err(Error::ParityViolation { z, var, power });
    }
    if let Some(e) = memo.get(&m) {
        return Ok(e.clone());
    }
    let e = match m {
        Monomial::Z { j } => {
            let hf = BracketExpression::hyperbolic(UniPoly::monomial(int(1), j - 1));
            BracketExpression::scaled(int(j as i64), &hf)
        }
        Monomial::X { i, j } => side(i, j, Side::X, memo)?,
        Monomial::Y { i, j } => side(i, j, Side::Y, memo)?,
    };
    memo.insert(m, e.clone());
    Ok(e)
}

#[derive(Clone, Copy)]
enum Side {
    X,
    Y,
}

impl Side {
    fn mono(self, power: u32, z: u32) -> Monomial {
        match (self, power) {
            (_, 0) => Monomial::Z { j: z },
            (Side::X, i) => Monomial::X { i, j: z },
            (Side::Y, i) => Monomial::Y { i, j: z },
        }
    }

    fn shear(self, k: u32) -> BracketExpression {
        match self {
            Side::X => BracketExpression::shear_x(k),
            Side::Y => BracketExpression::shear_y(k),
        }
    }

    /// The shear of the opposite side used to raise the `z` power.
    fn raiser(self) -> BracketExpression {
        match self {
            Side::X => BracketExpression::shear_y(0),
            Side::Y => BracketExpression::shear_x(0),
        }
    }

    fn sign(self) -> i64 {
        match self {
            Side::X => -1,
            Side::Y => 1,
        }
    }
}

/// Certificate for `z^zp · v^power` with `v ∈ {x, y}` and `power ≥ 1`.
fn side(
    power: u32,
    zp: u32,
    s: Side,
    memo: &mut HashMap<Monomial, BracketExpression>,
) -> Result<BracketExpression> {
    let e = match zp {
        0 => BracketExpression::scaled(int(s.sign() * power as i64), &s.shear(power - 1)),
        1 => {
            let b = BracketExpression::bracket(&s.raiser(), &s.shear(power));
            BracketExpression::scaled(rat(s.sign(), 2), &b)
        }
        _ => {
            let i = zp - 1;
            let j = power;
            let upper = z2_rec(s.mono(j + 1, i), memo)?;
            let mut terms = vec![(int(1), BracketExpression::bracket(&s.raiser(), &upper))];
            terms.push((int(i as i64), z2_rec(s.mono(j, i - 1), memo)?));
            let inner = BracketExpression::sum(terms);
            BracketExpression::scaled(rat(1, (2 * j + 2 + i) as i64), &inner)
        }
    };
    Ok(e)
}
