//! Multidifferential operators on the resolution side: tensor slots of
//! vertical derivative monomials with coefficients in the full graded
//! algebra. This is where the insertion product and the Gerstenhaber
//! bracket honestly live; the tensor coboundary is bracketing with the
//! multiplication element.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::AddAssign;

use num_traits::One;

use crate::element::{Element, Trunc};
use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::scalar::Ratio;
use crate::word::FrameSpec;

/// Operators keyed by their slot tuple: slot j differentiates argument j by
/// the recorded vertical monomial, and the coefficient multiplies from the
/// left. Arities may mix freely inside one element.
#[derive(Clone, PartialEq)]
pub struct FdElement {
    frame: FrameSpec,
    trunc: Trunc,
    terms: BTreeMap<Vec<MultiIndex>, Element>,
}

impl FdElement {
    pub fn zero(frame: FrameSpec, trunc: Trunc) -> Self {
        FdElement {
            frame,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    /// The two-argument multiplication operator: no derivatives, unit
    /// coefficient.
    pub fn multiplication(frame: FrameSpec, trunc: Trunc) -> Self {
        let mut e = FdElement::zero(frame, trunc);
        let slots = vec![MultiIndex::zero(frame.r); 2];
        e.add_term(slots, Element::one(frame, trunc));
        e
    }

    /// A single operator with the given coefficient and slot tuple.
    pub fn operator(coeff: &Element, slots: Vec<MultiIndex>) -> Self {
        let frame = coeff.frame();
        assert!(slots.iter().all(|s| s.len() == frame.r), "slot arity mismatch");
        let mut e = FdElement::zero(frame, coeff.trunc());
        e.add_term(slots, coeff.clone());
        e
    }

    pub fn frame(&self) -> FrameSpec {
        self.frame
    }

    pub fn trunc(&self) -> Trunc {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<MultiIndex>, &Element)> {
        self.terms.iter()
    }

    pub fn coeff(&self, slots: &[MultiIndex]) -> Element {
        self.terms
            .get(slots)
            .cloned()
            .unwrap_or_else(|| Element::zero(self.frame, self.trunc))
    }

    pub fn scale(&self, c: &Ratio) -> FdElement {
        let mut out = FdElement::zero(self.frame, self.trunc);
        for (s, e) in &self.terms {
            out.add_term(s.clone(), e.scale(c));
        }
        out
    }

    fn add_term(&mut self, slots: Vec<MultiIndex>, coeff: Element) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(slots) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Evaluates on one argument per slot.
    pub fn apply(&self, args: &[Element]) -> Result<Element> {
        let mut out = Element::zero(self.frame, self.trunc);
        for (slots, coeff) in &self.terms {
            if slots.len() != args.len() {
                return Err(Error::precondition(
                    "operator arity does not match the argument count",
                ));
            }
            let mut term = coeff.clone();
            for (k, arg) in slots.iter().zip(args) {
                let mut d = arg.clone();
                for letter in k.letters() {
                    d = d.sym_derivative(letter);
                }
                term = &term * &d;
            }
            out += term;
        }
        Ok(out)
    }
}

impl AddAssign<FdElement> for FdElement {
    fn add_assign(&mut self, rhs: FdElement) {
        for (s, e) in rhs.terms {
            self.add_term(s, e);
        }
    }
}

impl fmt::Debug for FdElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(s, e)| format!("({:?}) {:?}", e, s))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn parity_part(e: &Element, parity: usize) -> Element {
    e.filter_terms(|w| w.ext.len() % 2 == parity)
}

fn parity_sign(exponent: i64) -> Ratio {
    if exponent % 2 == 0 {
        Ratio::one()
    } else {
        -Ratio::one()
    }
}

/// All ways of splitting one derivative monomial over `parts` recipients,
/// with the multinomial weight of each split.
fn distributions(m: &MultiIndex, parts: usize) -> Vec<(Vec<MultiIndex>, Ratio)> {
    if parts == 1 {
        return vec![(vec![m.clone()], Ratio::one())];
    }
    let mut out = Vec::new();
    for first in m.sub_indices() {
        let rest = m.checked_sub(&first).expect("sub index");
        let weight = m.binomial(&first);
        for (tail, mult) in distributions(&rest, parts - 1) {
            let mut v = Vec::with_capacity(parts);
            v.push(first.clone());
            v.extend(tail);
            out.push((v, weight.clone() * mult));
        }
    }
    out
}

fn derive(e: &Element, m: &MultiIndex) -> Element {
    let mut d = e.clone();
    for letter in m.letters() {
        d = d.sym_derivative(letter);
    }
    d
}

/// Sum of the insertions of (sy, cy) into the slots of (sx, cx), with the
/// arity-based alternating site signs; the first slot share of each
/// derivative monomial lands on the inserted coefficient.
fn insertions(
    frame: FrameSpec,
    trunc: Trunc,
    sx: &[MultiIndex],
    cx: &Element,
    sy: &[MultiIndex],
    cy: &Element,
) -> FdElement {
    let a = sx.len();
    let b = sy.len() as i64;
    let mut out = FdElement::zero(frame, trunc);
    for i in 1..=a {
        let site = parity_sign((i as i64 - 1) * (b - 1));
        for (parts, mult) in distributions(&sx[i - 1], sy.len() + 1) {
            let coeff = (&(cx * &derive(cy, &parts[0]))).scale(&(site.clone() * mult));
            if coeff.is_zero() {
                continue;
            }
            let mut slots = Vec::with_capacity(sx.len() + sy.len() - 1);
            slots.extend(sx[..i - 1].iter().cloned());
            for (j, sj) in sy.iter().enumerate() {
                slots.push(sj.add(&parts[j + 1]));
            }
            slots.extend(sx[i..].iter().cloned());
            out.add_term(slots, coeff);
        }
    }
    out
}

/// Graded Lie bracket of multidifferential operators. The grading adds the
/// shifted arity to the parity of the odd coefficient factors; odd factors
/// ride along as passive exterior coefficients of the even operator part,
/// which fixes all signs.
pub fn gerstenhaber(x: &FdElement, y: &FdElement) -> FdElement {
    assert_eq!(x.frame, y.frame, "frame mismatch");
    let trunc = x.trunc.min(y.trunc);
    let mut out = FdElement::zero(x.frame, trunc);
    for (sx, cx_full) in &x.terms {
        for gx in 0..2usize {
            let cx = parity_part(cx_full, gx);
            if cx.is_zero() {
                continue;
            }
            for (sy, cy_full) in &y.terms {
                for gy in 0..2usize {
                    let cy = parity_part(cy_full, gy);
                    if cy.is_zero() {
                        continue;
                    }
                    let a = sx.len() as i64;
                    let b = sy.len() as i64;
                    let g = gx as i64;
                    let h = gy as i64;
                    let forward = parity_sign(g * (b - 1));
                    out += insertions(x.frame, trunc, sx, &cx, sy, &cy).scale(&forward);
                    let backward = -parity_sign(g * (b - 1) + (a - 1) * (b - 1) + g * h);
                    out += insertions(x.frame, trunc, sy, &cy, sx, &cx).scale(&backward);
                }
            }
        }
    }
    out
}

/// Tensor-direction coboundary: bracketing with the multiplication element.
pub fn hochschild_d(x: &FdElement) -> FdElement {
    gerstenhaber(&FdElement::multiplication(x.frame, x.trunc), x)
}
