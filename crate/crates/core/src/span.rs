//! Incremental row echelon form over ℚ with provenance tracking.
//!
//! Vectors are stored as [`UniPoly`] coefficient lists (entry `k` is the
//! coefficient of `z^k`). Each stored row remembers how it was obtained as a
//! linear combination of the inserted items, so membership queries return an
//! explicit combination of item identifiers.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rational::Rational;
use crate::unipoly::UniPoly;

#[derive(Clone, Debug)]
struct Row {
    vector: UniPoly,
    combo: BTreeMap<usize, Rational>,
}

#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<u32, Row>,
}

fn axpy(acc: &mut BTreeMap<usize, Rational>, c: &Rational, other: &BTreeMap<usize, Rational>) {
    for (&id, v) in other {
        let slot = acc.entry(id).or_insert_with(Rational::zero);
        *slot += c * v;
        if slot.is_zero() {
            acc.remove(&id);
        }
    }
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Leading-term elimination; returns the residue and the combination
    /// that was subtracted.
    fn reduce(&self, v: &UniPoly) -> (UniPoly, BTreeMap<usize, Rational>) {
        let mut v = v.clone();
        let mut used = BTreeMap::new();
        while let Some(d) = v.degree() {
            let Some(row) = self.rows.get(&d) else {
                break;
            };
            let c = v.leading_coeff() / row.vector.leading_coeff();
            v -= &row.vector.scale(&c);
            axpy(&mut used, &c, &row.combo);
        }
        (v, used)
    }

    /// Adds item `id` with vector `v`; returns whether it enlarged the span.
    pub fn insert(&mut self, id: usize, v: &UniPoly) -> bool {
        let (residue, used) = self.reduce(v);
        let Some(d) = residue.degree() else {
            return false;
        };
        let mut combo = BTreeMap::new();
        combo.insert(id, Rational::one());
        axpy(&mut combo, &-Rational::one(), &used);
        let norm = Rational::one() / residue.leading_coeff();
        for c in combo.values_mut() {
            *c *= &norm;
        }
        self.rows.insert(
            d,
            Row {
                vector: residue.scale(&norm),
                combo,
            },
        );
        true
    }

    /// Coefficients `a_id` with `v = Σ a_id * item_id`, if `v` is in the span.
    pub fn solve(&self, v: &UniPoly) -> Option<BTreeMap<usize, Rational>> {
        let (residue, used) = self.reduce(v);
        residue.is_zero().then_some(used)
    }
}
