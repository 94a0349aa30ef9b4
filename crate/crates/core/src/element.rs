//! Sparse exact-rational elements of the truncated multigraded algebra.

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::scalar::{format_ratio, neg_one_pow, Ratio};
use crate::word::{merge_odd, FrameSpec, Gen, Word};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Symmetric-degree cutoff: the jet order at which the completion of the
/// symmetric algebra is represented.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Trunc {
    Unbounded,
    AtMost(u32),
}

impl Trunc {
    pub fn min(self, other: Trunc) -> Trunc {
        match (self, other) {
            (Trunc::Unbounded, t) | (t, Trunc::Unbounded) => t,
            (Trunc::AtMost(a), Trunc::AtMost(b)) => Trunc::AtMost(a.min(b)),
        }
    }

    pub fn allows(&self, sym_degree: u32) -> bool {
        match self {
            Trunc::Unbounded => true,
            Trunc::AtMost(n) => sym_degree <= *n,
        }
    }
}

/// The Koszul sign turning v_{sigma(1)} ... v_{sigma(n)} back into
/// v_1 ... v_n in the free graded-commutative algebra. `perm` is 0-based;
/// `degrees[k]` is the degree of v_{k+1}.
pub fn koszul_sign(perm: &[usize], degrees: &[i32]) -> Result<i32> {
    if perm.len() != degrees.len() {
        return Err(Error::precondition(format!(
            "permutation length {} != degrees length {}",
            perm.len(),
            degrees.len()
        )));
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(Error::precondition("not a permutation".to_string()));
        }
        seen[p] = true;
    }
    let mut sign = 1i32;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] && degrees[perm[i]] % 2 != 0 && degrees[perm[j]] % 2 != 0 {
                sign = -sign;
            }
        }
    }
    Ok(sign)
}

/// Element of Lambda(odd) (x) S(chi)/trunc (x) K[x]. Immutable once built;
/// all operations return fresh values. Equality compares frame and terms;
/// the truncation level is bookkeeping and does not distinguish elements.
#[derive(Clone)]
pub struct Element {
    frame: FrameSpec,
    trunc: Trunc,
    terms: BTreeMap<Word, Ratio>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.frame == other.frame && self.terms == other.terms
    }
}

impl Eq for Element {}

impl Element {
    pub fn zero(frame: FrameSpec, trunc: Trunc) -> Self {
        Element {
            frame,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(frame: FrameSpec, trunc: Trunc, c: Ratio) -> Self {
        let mut e = Element::zero(frame, trunc);
        if !c.is_zero() {
            e.terms.insert(Word::unit(frame), c);
        }
        e
    }

    pub fn one(frame: FrameSpec, trunc: Trunc) -> Self {
        Element::scalar(frame, trunc, Ratio::one())
    }

    /// Single generator with coefficient 1.
    pub fn gen(frame: FrameSpec, trunc: Trunc, g: Gen) -> Self {
        let mut w = Word::unit(frame);
        match g {
            Gen::Odd(id) => {
                assert!((id as usize) < frame.n_odd(), "odd id out of range");
                w.ext.push(id);
            }
            Gen::Sym(k) => {
                assert!(k < frame.r, "sym index out of range");
                w.sym = MultiIndex::unit(frame.r, k);
            }
            Gen::Chart(j) => {
                assert!(j < frame.chart, "chart index out of range");
                w.chart = MultiIndex::unit(frame.chart, j);
            }
        }
        let mut e = Element::zero(frame, trunc);
        if trunc.allows(w.sym_degree()) {
            e.terms.insert(w, Ratio::one());
        }
        e
    }

    pub fn from_term(frame: FrameSpec, trunc: Trunc, w: Word, c: Ratio) -> Self {
        let mut e = Element::zero(frame, trunc);
        e.add_term(w, c);
        e
    }

    pub fn frame(&self) -> FrameSpec {
        self.frame
    }

    pub fn trunc(&self) -> Trunc {
        self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Ratio)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &Word) -> Ratio {
        self.terms.get(w).cloned().unwrap_or_else(Ratio::zero)
    }

    /// True when every stored term has symmetric degree >= n (used for
    /// "vanishes modulo degree >= n" checks).
    pub fn is_zero_mod_sym_degree(&self, n: u32) -> bool {
        self.terms.keys().all(|w| w.sym_degree() >= n)
    }

    pub fn max_sym_degree(&self) -> u32 {
        self.terms.keys().map(|w| w.sym_degree()).max().unwrap_or(0)
    }

    /// True when all terms share one parity; scalars report even.
    pub fn parity(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|w| w.parity());
        match it.next() {
            None => Some(0),
            Some(p) => {
                if it.all(|q| q == p) {
                    Some(p)
                } else {
                    None
                }
            }
        }
    }

    pub(crate) fn add_term(&mut self, w: Word, c: Ratio) {
        if c.is_zero() || !self.trunc.allows(w.sym_degree()) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_frame(&self, other: &Element) -> Result<()> {
        if self.frame != other.frame {
            return Err(Error::precondition(format!(
                "frame mismatch: {:?} vs {:?}",
                self.frame, other.frame
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Element) -> Result<Element> {
        self.check_frame(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut out = Element::zero(self.frame, trunc);
        for (w, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Element) -> Result<Element> {
        self.try_add(&other.clone().neg())
    }

    pub fn scale(&self, c: &Ratio) -> Element {
        if c.is_zero() {
            return Element::zero(self.frame, self.trunc);
        }
        let mut out = Element::zero(self.frame, self.trunc);
        for (w, a) in &self.terms {
            out.terms.insert(w.clone(), a.clone() * c.clone());
        }
        out
    }

    /// Graded-commutative product; truncation is the min of the inputs.
    pub fn try_mul(&self, other: &Element) -> Result<Element> {
        self.check_frame(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut out = Element::zero(self.frame, trunc);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let sym = wa.sym.add(&wb.sym);
                if !trunc.allows(sym.total()) {
                    continue;
                }
                let Some((ext, sign)) = merge_odd(&wa.ext, &wb.ext) else {
                    continue;
                };
                let w = Word {
                    ext,
                    sym,
                    chart: wa.chart.add(&wb.chart),
                };
                let mut c = ca.clone() * cb.clone();
                if sign < 0 {
                    c = -c;
                }
                out.add_term(w, c);
            }
        }
        Ok(out)
    }

    pub fn truncate(&self, n: u32) -> Element {
        let trunc = self.trunc.min(Trunc::AtMost(n));
        let mut out = Element::zero(self.frame, trunc);
        for (w, c) in &self.terms {
            if w.sym_degree() <= n {
                out.terms.insert(w.clone(), c.clone());
            }
        }
        out
    }

    /// Reinterprets the element at a new truncation level (dropping terms
    /// that the level forbids).
    pub fn with_trunc(&self, trunc: Trunc) -> Element {
        let mut out = Element::zero(self.frame, trunc);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    /// Interior product against a single odd generator: odd derivation of
    /// parity 1 deleting `id` with the Koszul sign of its position.
    pub fn contract_odd(&self, id: u16) -> Element {
        let mut out = Element::zero(self.frame, self.trunc);
        for (w, c) in &self.terms {
            if let Ok(pos) = w.ext.binary_search(&id) {
                let mut ext = w.ext.clone();
                ext.remove(pos);
                let word = Word {
                    ext,
                    sym: w.sym.clone(),
                    chart: w.chart.clone(),
                };
                out.add_term(word, c.clone() * neg_one_pow(pos));
            }
        }
        out
    }

    /// d/d(chi_k): even derivation on the symmetric part.
    pub fn sym_derivative(&self, k: usize) -> Element {
        let mut out = Element::zero(self.frame, self.trunc);
        for (w, c) in &self.terms {
            let e = w.sym.get(k);
            if e == 0 {
                continue;
            }
            let word = Word {
                ext: w.ext.clone(),
                sym: w.sym.minus_unit(k).unwrap(),
                chart: w.chart.clone(),
            };
            out.add_term(word, c.clone() * Ratio::from_integer(e.into()));
        }
        out
    }

    /// d/d(x_j): even derivation on the chart part.
    pub fn chart_derivative(&self, j: usize) -> Element {
        let mut out = Element::zero(self.frame, self.trunc);
        for (w, c) in &self.terms {
            let e = w.chart.get(j);
            if e == 0 {
                continue;
            }
            let word = Word {
                ext: w.ext.clone(),
                sym: w.sym.clone(),
                chart: w.chart.minus_unit(j).unwrap(),
            };
            out.add_term(word, c.clone() * Ratio::from_integer(e.into()));
        }
        out
    }

    /// Multiplies by a single odd generator on the left.
    pub fn mul_odd_left(&self, id: u16) -> Element {
        let gen = Element::gen(self.frame, self.trunc, Gen::Odd(id));
        gen.try_mul(self).expect("same frame")
    }

    /// Splits into homogeneous components by number of psi generators.
    pub fn split_by_psi_degree(&self) -> BTreeMap<usize, Element> {
        let mut out: BTreeMap<usize, Element> = BTreeMap::new();
        let lo = (self.frame.l + self.frame.r) as u16;
        let hi = self.frame.n_odd() as u16;
        for (w, c) in &self.terms {
            let d = w.count_ext_in(lo, hi);
            out.entry(d)
                .or_insert_with(|| Element::zero(self.frame, self.trunc))
                .add_term(w.clone(), c.clone());
        }
        out
    }

    /// Keeps only terms whose sym degree is exactly zero and whose ext part
    /// avoids the given id range. Used by projections.
    pub fn filter_terms(&self, keep: impl Fn(&Word) -> bool) -> Element {
        let mut out = Element::zero(self.frame, self.trunc);
        for (w, c) in &self.terms {
            if keep(w) {
                out.terms.insert(w.clone(), c.clone());
            }
        }
        out
    }

    pub fn map_coefficients(&self, f: impl Fn(&Ratio) -> Ratio) -> Element {
        let mut out = Element::zero(self.frame, self.trunc);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    /// Renders with a caller-supplied generator namer.
    pub fn format_with(&self, name: &dyn Fn(Gen) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (w, c) in &self.terms {
            let mut factors = Vec::new();
            for &id in &w.ext {
                factors.push(name(Gen::Odd(id)));
            }
            for (k, e) in w.sym.iter().enumerate() {
                if e == 1 {
                    factors.push(name(Gen::Sym(k)));
                } else if e > 1 {
                    factors.push(format!("{}^{}", name(Gen::Sym(k)), e));
                }
            }
            for (j, e) in w.chart.iter().enumerate() {
                if e == 1 {
                    factors.push(name(Gen::Chart(j)));
                } else if e > 1 {
                    factors.push(format!("{}^{}", name(Gen::Chart(j)), e));
                }
            }
            let body = if factors.is_empty() {
                String::new()
            } else {
                factors.join(" ")
            };
            let coef = format_ratio(c);
            let part = match (coef.as_str(), body.is_empty()) {
                (_, true) => coef,
                ("1", false) => body,
                ("-1", false) => format!("-{body}"),
                (_, false) => format!("{coef} {body}"),
            };
            parts.push(part);
        }
        let mut s = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                s.push_str(p);
            } else if let Some(stripped) = p.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(stripped);
            } else {
                s.push_str(" + ");
                s.push_str(p);
            }
        }
        s
    }

    pub fn default_name(frame: FrameSpec) -> impl Fn(Gen) -> String {
        move |g| match g {
            Gen::Odd(id) => {
                let k = frame.bank_index(id) + 1;
                if frame.is_lam(id) {
                    format!("lam{k}")
                } else if frame.is_tht(id) {
                    format!("tht{k}")
                } else {
                    format!("psi{k}")
                }
            }
            Gen::Sym(k) => format!("chi{}", k + 1),
            Gen::Chart(j) => format!("x{}", j + 1),
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_with(&Element::default_name(self.frame)))
    }
}

impl std::ops::AddAssign<Element> for Element {
    /// In-place sum; truncation drops to the min of the two.
    fn add_assign(&mut self, rhs: Element) {
        assert_eq!(self.frame, rhs.frame, "frame mismatch in +=");
        let trunc = self.trunc.min(rhs.trunc);
        if trunc != self.trunc {
            self.trunc = trunc;
            self.terms.retain(|w, _| trunc.allows(w.sym_degree()));
        }
        for (w, c) in rhs.terms {
            self.add_term(w, c);
        }
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.try_add(rhs).expect("frame mismatch in +")
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.try_sub(rhs).expect("frame mismatch in -")
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.try_mul(rhs).expect("frame mismatch in *")
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        let mut out = Element::zero(self.frame, self.trunc);
        for (w, c) in self.terms {
            out.terms.insert(w, -c);
        }
        out
    }
}
