//! Membership in the Lie algebra generated by locally nilpotent fields.
//!
//! The decision test works on the absolute term `a₀(z)` of the potential: a
//! volume-preserving field is a Lie combination of LNDs iff
//! `a₀ ≡ (p·q)'` modulo constants for some `q`, i.e. iff an antiderivative
//! `C` of `a₀` lies in `p·ℚ[z] + span{1, z}`. That is checked as
//! `deg rem(C, p) ≤ 1`.
//!
//! Certificates are bracket expressions over the generator fields. A
//! shears-only certificate is searched for by closing the span of left-nested
//! shear brackets under `[SF_k, ·]` inside a degree bound and solving for the
//! target by exact elimination. That search is only a semi-decision: a
//! `SearchExhausted` answer means "retry with a larger bound".

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fields::{AlgebraicVectorField, Potential};
use crate::parse::{parse_polynomial, parse_surface, parse_univariate};
use crate::rational::{format_rational, int, parse_rational, Rational};
use crate::span::Echelon;
use crate::surface::{Surface, SurfacePolynomial};
use crate::unipoly::UniPoly;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Leaf {
    ShearX(u32),
    ShearY(u32),
    Hyperbolic(UniPoly),
}

impl Leaf {
    pub fn is_shear(&self) -> bool {
        !matches!(self, Leaf::Hyperbolic(_))
    }

    pub fn field(&self, s: &Surface) -> AlgebraicVectorField {
        match self {
            Leaf::ShearX(i) => s.shear_x(*i),
            Leaf::ShearY(i) => s.shear_y(*i),
            Leaf::Hyperbolic(f) => s.hyperbolic(f),
        }
    }
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Leaf::ShearX(i) => write!(f, "SFx({i})"),
            Leaf::ShearY(i) => write!(f, "SFy({i})"),
            Leaf::Hyperbolic(q) => write!(f, "HF({q})"),
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
pub enum Node {
    Leaf(Leaf),
    Sum(Vec<(Rational, BracketExpression)>),
    Bracket(BracketExpression, BracketExpression),
}

/// An immutable expression tree; subtrees are shared.
#[derive(Clone, PartialEq, Eq)]
pub struct BracketExpression(Arc<Node>);

impl BracketExpression {
    pub fn leaf(l: Leaf) -> Self {
        Self(Arc::new(Node::Leaf(l)))
    }

    pub fn shear_x(i: u32) -> Self {
        Self::leaf(Leaf::ShearX(i))
    }

    pub fn shear_y(i: u32) -> Self {
        Self::leaf(Leaf::ShearY(i))
    }

    pub fn hyperbolic(f: UniPoly) -> Self {
        Self::leaf(Leaf::Hyperbolic(f))
    }

    pub fn bracket(a: &Self, b: &Self) -> Self {
        Self(Arc::new(Node::Bracket(a.clone(), b.clone())))
    }

    pub fn sum(terms: Vec<(Rational, Self)>) -> Self {
        Self(Arc::new(Node::Sum(terms)))
    }

    pub fn scaled(c: Rational, e: &Self) -> Self {
        if c.is_one() {
            return e.clone();
        }
        Self::sum(vec![(c, e.clone())])
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    fn key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    fn visit_distinct(&self, seen: &mut HashMap<usize, ()>, f: &mut impl FnMut(&Node)) {
        if seen.insert(self.key(), ()).is_some() {
            return;
        }
        f(&self.0);
        match &*self.0 {
            Node::Leaf(_) => {}
            Node::Sum(ts) => ts.iter().for_each(|(_, e)| e.visit_distinct(seen, f)),
            Node::Bracket(a, b) => {
                a.visit_distinct(seen, f);
                b.visit_distinct(seen, f);
            }
        }
    }

    /// Number of distinct nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit_distinct(&mut HashMap::new(), &mut |_| n += 1);
        n
    }

    pub fn leaves(&self) -> Vec<Leaf> {
        let mut out = Vec::new();
        self.visit_distinct(&mut HashMap::new(), &mut |n| {
            if let Node::Leaf(l) = n {
                if !out.contains(l) {
                    out.push(l.clone());
                }
            }
        });
        out
    }

    pub fn is_shears_only(&self) -> bool {
        self.leaves().iter().all(Leaf::is_shear)
    }

    /// Evaluates to a vector field, memoizing shared subtrees.
    pub fn evaluate(&self, s: &Surface) -> AlgebraicVectorField {
        self.eval_memo(s, &mut HashMap::new())
    }

    fn eval_memo(&self, s: &Surface, memo: &mut HashMap<usize, AlgebraicVectorField>) -> AlgebraicVectorField {
        if let Some(v) = memo.get(&self.key()) {
            return v.clone();
        }
        let v = match &*self.0 {
            Node::Leaf(l) => l.field(s),
            Node::Sum(ts) => {
                let mut acc = AlgebraicVectorField::zero();
                for (c, e) in ts {
                    acc = &acc + &e.eval_memo(s, memo).scale(c);
                }
                acc
            }
            Node::Bracket(a, b) => {
                let va = a.eval_memo(s, memo);
                let vb = b.eval_memo(s, memo);
                s.bracket(&va, &vb)
            }
        };
        memo.insert(self.key(), v.clone());
        v
    }

    pub fn to_json(&self) -> Value {
        match &*self.0 {
            Node::Leaf(Leaf::ShearX(i)) => json!({"leaf": {"kind": "SFx", "i": i}}),
            Node::Leaf(Leaf::ShearY(i)) => json!({"leaf": {"kind": "SFy", "i": i}}),
            Node::Leaf(Leaf::Hyperbolic(q)) => json!({"leaf": {"kind": "HF", "poly": q.to_string()}}),
            Node::Sum(ts) => {
                let terms: Vec<Value> = ts
                    .iter()
                    .map(|(c, e)| json!([format_rational(c), e.to_json()]))
                    .collect();
                json!({ "sum": terms })
            }
            Node::Bracket(a, b) => json!({"bracket": [a.to_json(), b.to_json()]}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Certificate(m.to_string());
        let obj = v.as_object().ok_or_else(|| bad("node must be an object"))?;
        if obj.len() != 1 {
            return Err(bad("node must have exactly one key"));
        }
        let (k, body) = obj.iter().next().expect("one key");
        match k.as_str() {
            "leaf" => {
                let kind = body
                    .get("kind")
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad("leaf needs a kind"))?;
                let index = || {
                    body.get("i")
                        .and_then(Value::as_u64)
                        .and_then(|i| u32::try_from(i).ok())
                        .ok_or_else(|| bad("shear leaf needs a non-negative integer i"))
                };
                match kind {
                    "SFx" => Ok(Self::shear_x(index()?)),
                    "SFy" => Ok(Self::shear_y(index()?)),
                    "HF" => {
                        let src = body
                            .get("poly")
                            .and_then(Value::as_str)
                            .ok_or_else(|| bad("HF leaf needs a poly"))?;
                        let q = parse_univariate(src, &["z"])
                            .map_err(|e| Error::Certificate(format!("HF poly: {e}")))?;
                        Ok(Self::hyperbolic(q))
                    }
                    other => Err(bad(&format!("unknown leaf kind {other:?}"))),
                }
            }
            "sum" => {
                let items = body.as_array().ok_or_else(|| bad("sum must be a list"))?;
                let mut terms = Vec::with_capacity(items.len());
                for t in items {
                    let pair = t
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .ok_or_else(|| bad("sum entries are [weight, node] pairs"))?;
                    let w = pair[0]
                        .as_str()
                        .ok_or_else(|| bad("weights are rational strings"))?;
                    let w = parse_rational(w).map_err(|e| Error::Certificate(e.to_string()))?;
                    terms.push((w, Self::from_json(&pair[1])?));
                }
                Ok(Self::sum(terms))
            }
            "bracket" => {
                let pair = body
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| bad("bracket takes two nodes"))?;
                Ok(Self::bracket(&Self::from_json(&pair[0])?, &Self::from_json(&pair[1])?))
            }
            other => Err(bad(&format!("unknown node {other:?}"))),
        }
    }
}

impl fmt::Display for BracketExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Leaf(l) => write!(f, "{l}"),
            Node::Bracket(a, b) => write!(f, "[{a}, {b}]"),
            Node::Sum(ts) => {
                if ts.is_empty() {
                    return write!(f, "0");
                }
                for (k, (c, e)) in ts.iter().enumerate() {
                    if k > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "({})*{e}", format_rational(c))?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for BracketExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A certificate file: surface, claimed potential and expression.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub surface: Surface,
    pub potential: Potential,
    pub expression: BracketExpression,
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        json!({
            "surface": {"p": self.surface.p().to_string()},
            "potential": self.potential.to_string(),
            "certificate": self.expression.to_json(),
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("json values serialize")
    }

    pub fn from_json_str(src: &str) -> Result<Self> {
        let v: Value =
            serde_json::from_str(src).map_err(|e| Error::Certificate(format!("invalid JSON: {e}")))?;
        let p = v
            .pointer("/surface/p")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Certificate("missing surface.p".into()))?;
        let surface = parse_surface(p)?;
        let pot = v
            .get("potential")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Certificate("missing potential".into()))?;
        let potential = Potential::new(parse_polynomial(&surface, pot)?);
        let node = v
            .get("certificate")
            .ok_or_else(|| Error::Certificate("missing certificate".into()))?;
        Ok(Self {
            expression: BracketExpression::from_json(node)?,
            surface,
            potential,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipVerdict {
    pub accepted: bool,
    pub witness_remainder: UniPoly,
    pub normalized_potential: Potential,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BracketType {
    XType(u32, UniPoly),
    YType(u32, UniPoly),
    ZType(UniPoly),
}

#[derive(Clone, Debug)]
pub struct FamilyEntry {
    pub label: String,
    pub expression: BracketExpression,
    pub potential: Potential,
}

#[derive(Clone, Debug, Default)]
pub struct SpanningFamily {
    pub entries: Vec<FamilyEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Class {
    X(u32),
    Y(u32),
    Z,
}

/// `x^j q`, `y^j q` or `q(z)`, if the potential has one of those shapes.
fn shape(f: &SurfacePolynomial) -> Option<(Class, UniPoly)> {
    let xs = f.x_powers();
    let ys = f.y_powers();
    let has_z = !f.z_part().is_zero();
    match (xs.as_slice(), ys.as_slice(), has_z) {
        ([], [], _) => Some((Class::Z, f.z_part().clone())),
        ([j], [], false) => Some((Class::X(*j), f.x_coeff(*j))),
        ([], [j], false) => Some((Class::Y(*j), f.y_coeff(*j))),
        _ => None,
    }
}

fn remainder_test(s: &Surface, a0: &UniPoly) -> UniPoly {
    let c = a0.antiderivative();
    c.divrem(s.p()).expect("p is nonzero").1
}

struct Item {
    expr: BracketExpression,
    potential: SurfacePolynomial,
}

/// Span of item potentials, split by shape.
struct Closure {
    max_deg: u32,
    items: Vec<Item>,
    spaces: BTreeMap<Class, Echelon>,
}

impl Closure {
    fn new(max_deg: u32) -> Self {
        Self {
            max_deg,
            items: Vec::new(),
            spaces: BTreeMap::new(),
        }
    }

    /// Adds the item if it enlarges the span; returns its id.
    fn add(&mut self, expr: BracketExpression, potential: SurfacePolynomial) -> Option<usize> {
        let potential = potential.without_constant();
        if potential.is_zero() || potential.total_degree()? > self.max_deg {
            return None;
        }
        let (class, q) = shape(&potential)?;
        let id = self.items.len();
        if !self.spaces.entry(class).or_default().insert(id, &q) {
            return None;
        }
        self.items.push(Item { expr, potential });
        Some(id)
    }

    fn solve(&self, targets: &[(Class, UniPoly)]) -> Option<BTreeMap<usize, Rational>> {
        let mut combo: BTreeMap<usize, Rational> = BTreeMap::new();
        for (class, q) in targets {
            if q.is_zero() {
                continue;
            }
            let sol = self.spaces.get(class)?.solve(q)?;
            for (id, c) in sol {
                *combo.entry(id).or_insert_with(Rational::zero) += c;
            }
        }
        combo.retain(|_, c| !c.is_zero());
        Some(combo)
    }
}

impl Surface {
    pub fn decide(&self, f: &Potential) -> MembershipVerdict {
        let rem = remainder_test(self, f.value().z_part());
        MembershipVerdict {
            accepted: rem.degree().is_none_or(|d| d <= 1),
            witness_remainder: rem,
            normalized_potential: f.clone(),
        }
    }

    /// `potential_of(evaluate(e)) == claimed`
    pub fn verify_certificate(&self, e: &BracketExpression, claimed: &Potential) -> bool {
        matches!(self.potential_of(&e.evaluate(self)), Ok(f) if &f == claimed)
    }

    fn checked(&self, e: BracketExpression, f: &Potential, what: &str) -> Result<BracketExpression> {
        if self.verify_certificate(&e, f) {
            Ok(e)
        } else {
            Err(Error::InternalInvariantViolation(format!(
                "{what} certificate for {f} does not verify"
            )))
        }
    }

    /// Decomposition over `SF_i^x`, `SF_i^y`, `HF_f` and `[SF_i, HF_{z^j}]`.
    pub fn avdp_decompose(&self, f: &Potential) -> Result<BracketExpression> {
        let mut terms = Vec::new();
        for (m, c) in f.value().terms() {
            use crate::surface::Monomial;
            let hf = |j: u32| BracketExpression::hyperbolic(UniPoly::monomial(int(1), j));
            let (w, e) = match m {
                Monomial::X { i, j: 0 } => (-(c * int(i as i64)), BracketExpression::shear_x(i - 1)),
                Monomial::Y { i, j: 0 } => (c * int(i as i64), BracketExpression::shear_y(i - 1)),
                Monomial::X { i, j } => (c.clone(), BracketExpression::bracket(&BracketExpression::shear_x(i - 1), &hf(j))),
                Monomial::Y { i, j } => (c.clone(), BracketExpression::bracket(&BracketExpression::shear_y(i - 1), &hf(j))),
                Monomial::Z { j } => (c * int(j as i64), hf(j - 1)),
            };
            terms.push((w, e));
        }
        let e = match terms.len() {
            1 if terms[0].0.is_one() => terms.pop().expect("one term").1,
            _ => BracketExpression::sum(terms),
        };
        self.checked(e, f, "decomposition")
    }

    /// Classifies the potential of a left-nested bracket of shear fields.
    pub fn classify_bracket_potential(&self, e: &BracketExpression) -> Result<BracketType> {
        fn pure(e: &BracketExpression) -> bool {
            match e.node() {
                Node::Leaf(l) => l.is_shear(),
                Node::Bracket(a, b) => matches!(a.node(), Node::Leaf(l) if l.is_shear()) && pure(b),
                Node::Sum(_) => false,
            }
        }
        if !pure(e) {
            return Err(Error::MalformedNesting);
        }
        let f = self.potential_of(&e.evaluate(self))?;
        let (class, q) = shape(f.value()).ok_or_else(|| {
            Error::InternalInvariantViolation(format!("nested shear bracket has potential {f}"))
        })?;
        Ok(match class {
            Class::X(j) => BracketType::XType(j, q),
            Class::Y(j) => BracketType::YType(j, q),
            Class::Z => {
                if !self.decide(&f).accepted {
                    return Err(Error::InternalInvariantViolation(format!(
                        "absolute term {q} is not of the form (p h)'"
                    )));
                }
                BracketType::ZType(q)
            }
        })
    }

    /// Certified pairs built from the bracket identities for shear fields.
    pub fn build_spanning_family(&self, max_deg: u32) -> Result<SpanningFamily> {
        let n = self.degree();
        if max_deg < n {
            return Err(Error::DegreeGate(format!(
                "spanning family needs max degree >= deg p = {n}, got {max_deg}"
            )));
        }
        let fits = |f: &SurfacePolynomial| f.total_degree().is_some_and(|d| d <= max_deg);
        let sx = BracketExpression::shear_x;
        let sy = BracketExpression::shear_y;
        let br = BracketExpression::bracket;
        let mut entries = Vec::new();
        let mut push = |label: String, expression: BracketExpression, f: SurfacePolynomial| {
            entries.push(FamilyEntry {
                label,
                expression,
                potential: Potential::new(f),
            });
        };

        // [SF_i^x, SF_i^y] = HF_{(p^i p')'}, potential p^i p'.
        let mut bases: Vec<(u32, BracketExpression, UniPoly)> = Vec::new();
        for i in 0.. {
            let pot = &self.p().pow(i) * self.p_prime();
            if pot.degree().unwrap_or(0) > max_deg {
                break;
            }
            let e = br(&sx(i), &sy(i));
            push(format!("hf_base({i})"), e.clone(), SurfacePolynomial::from_z(pot.clone()));
            bases.push((i, e, pot.derivative()));
        }

        let pp = (self.p() * self.p_prime()).derivative();
        if pp.degree().unwrap_or(0) <= max_deg {
            push(
                "second_order".into(),
                br(&sx(0), &br(&sx(0), &sy(1))),
                SurfacePolynomial::from_z(pp),
            );
        }

        // Derivative towers on HF_f with f = (p^m p')'.
        for (m, hf, f) in &bases {
            let mut g = f.clone();
            for k in 1..=n {
                if g.is_zero() {
                    break;
                }
                let mut e = br(&sx(n - k), hf);
                for _ in 1..k {
                    e = br(&sx(0), &e);
                }
                let xpot = SurfacePolynomial::x_times(n, &g);
                if fits(&xpot) {
                    push(format!("tower({m},{k})"), e.clone(), xpot);
                    let zpot = (&self.p().pow(n) * &g).derivative();
                    let zpot = SurfacePolynomial::from_z(zpot);
                    if fits(&zpot) {
                        push(format!("tower_closed({m},{k})"), br(&sy(n - 1), &e), zpot);
                    }
                }
                g = g.derivative();
            }
        }

        // Products: [HF_{f_b}, [SF_0^x, HF_{f_a}]] and its closing bracket.
        for (a, ea, fa) in &bases {
            for (b, eb, fb) in bases.iter().filter(|(b, _, _)| b >= a) {
                let prod = fa * fb;
                let xpot = SurfacePolynomial::x_times(1, &prod);
                if !fits(&xpot) {
                    continue;
                }
                let e = br(eb, &br(&sx(0), ea));
                push(format!("product({a},{b})"), e.clone(), xpot);
                let zpot = SurfacePolynomial::from_z((self.p() * &prod).derivative());
                if fits(&zpot) {
                    push(format!("product_closed({a},{b})"), br(&sy(0), &e), zpot);
                }
            }
        }

        for entry in &entries {
            if !self.verify_certificate(&entry.expression, &entry.potential) {
                return Err(Error::InternalInvariantViolation(format!(
                    "spanning family entry {} does not verify",
                    entry.label
                )));
            }
        }
        Ok(SpanningFamily { entries })
    }

    /// A certificate using shear leaves only, searched within potentials of
    /// total degree at most `max_deg`.
    pub fn certify_shears_only(&self, f: &Potential, max_deg: u32) -> Result<BracketExpression> {
        let verdict = self.decide(f);
        if !verdict.accepted {
            return Err(Error::NotInLieAlgebra {
                remainder: verdict.witness_remainder.to_string(),
            });
        }
        if f.is_zero() {
            return Ok(BracketExpression::sum(Vec::new()));
        }
        let g = f.value();
        let mut targets = vec![(Class::Z, g.z_part().clone())];
        targets.extend(g.x_powers().into_iter().map(|i| (Class::X(i), g.x_coeff(i))));
        targets.extend(g.y_powers().into_iter().map(|i| (Class::Y(i), g.y_coeff(i))));

        let mut closure = Closure::new(max_deg);
        let mut frontier = Vec::new();
        let shears: Vec<(BracketExpression, AlgebraicVectorField)> = (0..=max_deg)
            .flat_map(|k| [BracketExpression::shear_x(k), BracketExpression::shear_y(k)])
            .map(|e| {
                let v = e.evaluate(self);
                (e, v)
            })
            .collect();
        for (e, v) in &shears {
            let pot = self.potential_of(v)?.into_inner();
            frontier.extend(closure.add(e.clone(), pot));
        }
        if max_deg >= self.degree() {
            for entry in self.build_spanning_family(max_deg)?.entries {
                frontier.extend(closure.add(entry.expression, entry.potential.into_inner()));
            }
        }

        loop {
            if let Some(combo) = closure.solve(&targets) {
                let terms: Vec<(Rational, BracketExpression)> = combo
                    .into_iter()
                    .map(|(id, c)| (c, closure.items[id].expr.clone()))
                    .collect();
                let e = match terms.len() {
                    1 if terms[0].0.is_one() => terms[0].1.clone(),
                    _ => BracketExpression::sum(terms),
                };
                return self.checked(e, f, "shears-only");
            }
            if frontier.is_empty() {
                return Err(Error::SearchExhausted { max_degree: max_deg });
            }
            let mut next = Vec::new();
            for id in frontier {
                for (e, v) in &shears {
                    let pot = self.apply(v, &closure.items[id].potential);
                    let expr = BracketExpression::bracket(e, &closure.items[id].expr);
                    next.extend(closure.add(expr, pot));
                }
            }
            frontier = next;
        }
    }
}
