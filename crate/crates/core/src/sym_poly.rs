//! Plain commutative polynomials in a fixed number of variables, used for
//! structure functions on the base, for S(g), and for S(g-dual).

use crate::multi_index::MultiIndex;
use crate::scalar::{format_ratio, Ratio};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct SymPoly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Ratio>,
}

impl SymPoly {
    pub fn zero(nvars: usize) -> Self {
        SymPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Ratio) -> Self {
        let mut p = SymPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(MultiIndex::zero(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        SymPoly::constant(nvars, Ratio::one())
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        assert!(k < nvars);
        let mut p = SymPoly::zero(nvars);
        p.terms.insert(MultiIndex::unit(nvars, k), Ratio::one());
        p
    }

    pub fn monomial(mi: MultiIndex, c: Ratio) -> Self {
        let mut p = SymPoly::zero(mi.len());
        if !c.is_zero() {
            p.terms.insert(mi, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(MultiIndex::is_zero)
    }

    pub fn constant_term(&self) -> Ratio {
        self.coeff(&MultiIndex::zero(self.nvars))
    }

    pub fn coeff(&self, mi: &MultiIndex) -> Ratio {
        self.terms.get(mi).cloned().unwrap_or_else(Ratio::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Ratio)> {
        self.terms.iter()
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::total).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, mi: MultiIndex, c: Ratio) {
        assert_eq!(mi.len(), self.nvars, "multi-index arity mismatch");
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mi) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &SymPoly) -> SymPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (mi, c) in &other.terms {
            out.add_term(mi.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SymPoly) -> SymPoly {
        self.add(&other.scale(&-Ratio::one()))
    }

    pub fn scale(&self, c: &Ratio) -> SymPoly {
        if c.is_zero() {
            return SymPoly::zero(self.nvars);
        }
        let mut out = SymPoly::zero(self.nvars);
        for (mi, a) in &self.terms {
            out.terms.insert(mi.clone(), a.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &SymPoly) -> SymPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = SymPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.add(mb), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn derivative(&self, k: usize) -> SymPoly {
        let mut out = SymPoly::zero(self.nvars);
        for (mi, c) in &self.terms {
            let e = mi.get(k);
            if e > 0 {
                out.add_term(
                    mi.minus_unit(k).unwrap(),
                    c.clone() * Ratio::from_integer(e.into()),
                );
            }
        }
        out
    }

    /// Terms of total degree exactly d.
    pub fn degree_part(&self, d: u32) -> SymPoly {
        let mut out = SymPoly::zero(self.nvars);
        for (mi, c) in &self.terms {
            if mi.total() == d {
                out.terms.insert(mi.clone(), c.clone());
            }
        }
        out
    }

    pub fn truncate_above(&self, d: u32) -> SymPoly {
        let mut out = SymPoly::zero(self.nvars);
        for (mi, c) in &self.terms {
            if mi.total() <= d {
                out.terms.insert(mi.clone(), c.clone());
            }
        }
        out
    }

    /// Embeds a chart polynomial into the graded algebra (empty odd and
    /// symmetric parts).
    pub fn embed_chart(
        &self,
        frame: crate::word::FrameSpec,
        trunc: crate::element::Trunc,
    ) -> crate::element::Element {
        assert_eq!(self.nvars, frame.chart, "chart arity mismatch");
        let mut out = crate::element::Element::zero(frame, trunc);
        for (mi, c) in &self.terms {
            let w = crate::word::Word {
                ext: Vec::new(),
                sym: MultiIndex::zero(frame.r),
                chart: mi.clone(),
            };
            out.add_term(w, c.clone());
        }
        out
    }

    pub fn format_with(&self, name: &dyn Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (mi, c) in &self.terms {
            let mut factors = Vec::new();
            for (k, e) in mi.iter().enumerate() {
                if e == 1 {
                    factors.push(name(k));
                } else if e > 1 {
                    factors.push(format!("{}^{}", name(k), e));
                }
            }
            let coef = format_ratio(c);
            let part = if factors.is_empty() {
                coef
            } else if coef == "1" {
                factors.join(" ")
            } else if coef == "-1" {
                format!("-{}", factors.join(" "))
            } else {
                format!("{} {}", coef, factors.join(" "))
            };
            parts.push(part);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Debug for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_with(&|k| format!("v{}", k + 1)))
    }
}
