//! Polydifferential cochains on the quotient model: tensor powers of the
//! enveloping quotient in PBW normal form, carrying the coproduct-type
//! coboundary, the subalgebroid module differential, the cup product, and
//! the skew-symmetrization map from polyvectors. The operator bracket does
//! not live here; `gerstenhaber` refuses on purpose.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::AddAssign;

use itertools::Itertools;
use num_traits::{One, Zero};

use crate::derivation::Derivation;
use crate::element::{Element, Trunc};
use crate::error::{Error, Result};
use crate::fedosov::bott_module_differential;
use crate::liepair::LiePair;
use crate::multi_index::MultiIndex;
use crate::scalar::{factorial, neg_one_pow, Ratio};
use crate::uea::{uea_normalize, LieStructure};
use crate::word::{FrameSpec, Gen, Word};

/// One basis cochain: a strictly increasing word of subalgebroid duals and a
/// tuple of quotient monomials, one per tensor slot. A cochain with p dual
/// factors and n slots sits in total degree p + n - 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DWord {
    ext: Vec<u8>,
    slots: Vec<MultiIndex>,
}

impl DWord {
    pub fn ext(&self) -> &[u8] {
        &self.ext
    }

    pub fn slots(&self) -> &[MultiIndex] {
        &self.slots
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    pub fn degree(&self) -> i64 {
        self.ext.len() as i64 + self.slots.len() as i64 - 1
    }

    /// Total symmetric degree across the slots; the filtration weight.
    pub fn weight(&self) -> u32 {
        self.slots.iter().map(MultiIndex::total).sum()
    }

    /// A slot holding the class of 1 is degenerate: such words span the
    /// acyclic part that normalization quotients away.
    pub fn is_degenerate(&self) -> bool {
        self.slots.iter().any(MultiIndex::is_zero)
    }
}

impl fmt::Debug for DWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.ext.is_empty() {
            write!(f, "a{:?}", self.ext)?;
        }
        if self.slots.is_empty() {
            write!(f, "()")
        } else {
            let parts: Vec<String> = self.slots.iter().map(|s| format!("{:?}", s)).collect();
            write!(f, "{}", parts.join("&"))
        }
    }
}

/// Rational combination of cochains over a fixed pair shape (subalgebroid
/// rank, quotient rank).
#[derive(Clone, PartialEq, Eq)]
pub struct DElement {
    r_a: usize,
    r: usize,
    terms: BTreeMap<DWord, Ratio>,
}

impl DElement {
    pub fn zero(r_a: usize, r: usize) -> Self {
        DElement {
            r_a,
            r,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(r_a: usize, r: usize, c: Ratio) -> Self {
        let mut e = DElement::zero(r_a, r);
        e.add_term(
            DWord {
                ext: Vec::new(),
                slots: Vec::new(),
            },
            c,
        );
        e
    }

    /// Builds a single term, sorting the dual word with its sign; a repeated
    /// dual factor gives zero.
    pub fn from_parts(r_a: usize, r: usize, ext: &[u8], slots: Vec<MultiIndex>, c: Ratio) -> Self {
        assert!(ext.iter().all(|&a| (a as usize) < r_a), "dual id out of range");
        assert!(slots.iter().all(|s| s.len() == r), "slot arity mismatch");
        let mut e = DElement::zero(r_a, r);
        let mut ids = ext.to_vec();
        let mut sign = Ratio::one();
        for i in 1..ids.len() {
            let mut j = i;
            while j > 0 && ids[j - 1] > ids[j] {
                ids.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return e;
        }
        e.add_term(DWord { ext: ids, slots }, c * sign);
        e
    }

    pub fn ranks(&self) -> (usize, usize) {
        (self.r_a, self.r)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DWord, &Ratio)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &DWord) -> Ratio {
        self.terms.get(w).cloned().unwrap_or_else(Ratio::zero)
    }

    pub fn scale(&self, c: &Ratio) -> DElement {
        if c.is_zero() {
            return DElement::zero(self.r_a, self.r);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * c.clone();
        }
        out
    }

    /// Largest filtration weight among the terms.
    pub fn weight(&self) -> u32 {
        self.terms.keys().map(DWord::weight).max().unwrap_or(0)
    }

    /// Drops every degenerate word: the image in the normalized complex.
    pub fn normalized(&self) -> DElement {
        let mut out = DElement::zero(self.r_a, self.r);
        for (w, c) in &self.terms {
            if !w.is_degenerate() {
                out.add_term(w.clone(), c.clone());
            }
        }
        out
    }

    fn add_term(&mut self, w: DWord, c: Ratio) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
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

    /// Cup product: dual words merge as exterior factors, slot tuples
    /// concatenate. Associative on the nose.
    pub fn cup(&self, other: &DElement) -> DElement {
        assert_eq!((self.r_a, self.r), (other.r_a, other.r), "shape mismatch");
        let mut out = DElement::zero(self.r_a, self.r);
        for (wx, cx) in &self.terms {
            for (wy, cy) in &other.terms {
                let mut swaps = 0usize;
                let mut clash = false;
                for &b in &wy.ext {
                    let above = wx.ext.iter().filter(|&&a| a > b).count();
                    if wx.ext.contains(&b) {
                        clash = true;
                        break;
                    }
                    swaps += above;
                }
                if clash {
                    continue;
                }
                let mut ext: Vec<u8> = wx.ext.iter().chain(&wy.ext).copied().collect();
                ext.sort_unstable();
                let mut slots = wx.slots.clone();
                slots.extend(wy.slots.iter().cloned());
                out.add_term(
                    DWord { ext, slots },
                    cx.clone() * cy.clone() * neg_one_pow(swaps),
                );
            }
        }
        out
    }
}

impl AddAssign<DElement> for DElement {
    fn add_assign(&mut self, rhs: DElement) {
        assert_eq!((self.r_a, self.r), (rhs.r_a, rhs.r), "shape mismatch");
        for (w, c) in rhs.terms {
            self.add_term(w, c);
        }
    }
}

impl fmt::Debug for DElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| format!("{} {:?}", c, w))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Coproduct of single-slot cochains: each quotient monomial splits by the
/// componentwise binomial shuffle. The class of 1 is grouplike, degree-one
/// classes are primitive.
pub fn comultiply(x: &DElement) -> Result<DElement> {
    let (r_a, r) = x.ranks();
    let mut out = DElement::zero(r_a, r);
    for (w, c) in x.terms() {
        if !w.ext.is_empty() || w.slots.len() != 1 {
            return Err(Error::precondition(
                "the coproduct takes a single tensor slot without dual factors",
            ));
        }
        let k = &w.slots[0];
        for i in k.sub_indices() {
            let rest = k.checked_sub(&i).expect("sub index");
            out.add_term(
                DWord {
                    ext: Vec::new(),
                    slots: vec![i.clone(), rest],
                },
                c.clone() * k.binomial(&i),
            );
        }
    }
    Ok(out)
}

/// Tensor-direction coboundary: unit slots glued on both ends plus the
/// alternating slotwise coproduct. Squares to zero and commutes with the
/// subalgebroid action.
pub fn hochschild_d(x: &DElement) -> DElement {
    let (r_a, r) = x.ranks();
    let mut out = DElement::zero(r_a, r);
    for (w, c) in x.terms() {
        let n = w.slots.len();
        let mut left = vec![MultiIndex::zero(r)];
        left.extend(w.slots.iter().cloned());
        out.add_term(
            DWord {
                ext: w.ext.clone(),
                slots: left,
            },
            c.clone(),
        );
        for i in 1..=n {
            let k = &w.slots[i - 1];
            let sign = neg_one_pow(i);
            for part in k.sub_indices() {
                let rest = k.checked_sub(&part).expect("sub index");
                let mut slots = Vec::with_capacity(n + 1);
                slots.extend(w.slots[..i - 1].iter().cloned());
                slots.push(part.clone());
                slots.push(rest);
                slots.extend(w.slots[i..].iter().cloned());
                out.add_term(
                    DWord {
                        ext: w.ext.clone(),
                        slots,
                    },
                    c.clone() * sign.clone() * k.binomial(&part),
                );
            }
        }
        let mut right = w.slots.clone();
        right.push(MultiIndex::zero(r));
        out.add_term(
            DWord {
                ext: w.ext.clone(),
                slots: right,
            },
            c.clone() * neg_one_pow(n + 1),
        );
    }
    out
}

/// Always refuses: the insertion bracket needs the full operator algebra of
/// the resolution side and does not descend to quotient tensor cochains.
pub fn gerstenhaber(_x: &DElement, _y: &DElement) -> Result<DElement> {
    Err(Error::precondition(
        "no Gerstenhaber bracket on quotient tensor cochains: the insertion \
         product only exists on the resolution side",
    ))
}

/// Differentials and module structure of the polydifferential complex tied
/// to one Lie pair over a point.
pub struct DComplex {
    frame: FrameSpec,
    r_a: usize,
    r: usize,
    ls: LieStructure,
    bott: Derivation,
}

impl DComplex {
    /// Reindexes the ambient algebra so quotient letters come first: PBW
    /// normal form then pushes subalgebroid letters to the right, and words
    /// still containing them die in the quotient.
    pub fn new(pair: &LiePair) -> Result<Self> {
        let full = pair.full_structure()?;
        let l = pair.l();
        let r_a = pair.r_a();
        let r = pair.r();
        let old = |i: usize| if i < r { r_a + i } else { i - r };
        let mut ls = LieStructure::new(l);
        for i in 0..l {
            for j in (i + 1)..l {
                for k in 0..l {
                    let c = full.get(old(i), old(j), old(k));
                    if !c.is_zero() {
                        ls.set_bracket_term(i, j, k, c);
                    }
                }
            }
        }
        Ok(DComplex {
            frame: pair.frame(),
            r_a,
            r,
            ls,
            bott: bott_module_differential(pair, Trunc::Unbounded),
        })
    }

    pub fn ranks(&self) -> (usize, usize) {
        (self.r_a, self.r)
    }

    pub fn zero(&self) -> DElement {
        DElement::zero(self.r_a, self.r)
    }

    pub fn cochain(&self, ext: &[u8], slots: Vec<MultiIndex>, c: Ratio) -> DElement {
        DElement::from_parts(self.r_a, self.r, ext, slots, c)
    }

    /// Left action of subalgebroid direction `a` on one quotient monomial:
    /// multiply in the enveloping algebra, rewrite to normal form, keep the
    /// pure quotient words.
    pub fn action_on_monomial(&self, a: usize, k: &MultiIndex) -> Vec<(MultiIndex, Ratio)> {
        assert!(a < self.r_a, "subalgebroid index out of range");
        let mut word: Vec<u8> = vec![(self.r + a) as u8];
        word.extend(k.letters().iter().map(|&x| x as u8));
        let u = uea_normalize(&self.ls, &word, Ratio::one());
        let mut out = Vec::new();
        for (w, c) in u.terms() {
            if w.iter().all(|&letter| (letter as usize) < self.r) {
                let letters: Vec<usize> = w.iter().map(|&x| x as usize).collect();
                out.push((MultiIndex::from_letters(self.r, &letters), c.clone()));
            }
        }
        out
    }

    /// Slotwise derivation action on cochains; dual factors ride along.
    pub fn subalgebroid_action(&self, a: usize, x: &DElement) -> DElement {
        let mut out = self.zero();
        for (w, c) in x.terms() {
            for i in 0..w.slots.len() {
                for (m, d) in self.action_on_monomial(a, &w.slots[i]) {
                    let mut slots = w.slots.clone();
                    slots[i] = m;
                    out.add_term(
                        DWord {
                            ext: w.ext.clone(),
                            slots,
                        },
                        c.clone() * d,
                    );
                }
            }
        }
        out
    }

    fn ext_as_element(&self, ext: &[u8]) -> Element {
        Element::from_term(
            self.frame,
            Trunc::Unbounded,
            Word {
                ext: ext.iter().map(|&x| x as u16).collect(),
                sym: MultiIndex::zero(self.frame.r),
                chart: MultiIndex::zero(self.frame.chart),
            },
            Ratio::one(),
        )
    }

    fn ext_terms(&self, e: &Element) -> Vec<(Vec<u8>, Ratio)> {
        e.terms()
            .map(|(w, c)| {
                debug_assert!(w.sym.is_zero() && w.chart.is_zero());
                debug_assert!(w.ext.iter().all(|&id| (id as usize) < self.r_a));
                (w.ext.iter().map(|&id| id as u8).collect(), c.clone())
            })
            .collect()
    }

    /// Subalgebroid cochain differential: the structure part rewrites the
    /// dual word, the action part wedges a new dual factor onto the acted
    /// slots.
    pub fn ce_d(&self, x: &DElement) -> DElement {
        let mut out = self.zero();
        for (w, c) in x.terms() {
            let base = self.ext_as_element(&w.ext);
            for (ext, c2) in self.ext_terms(&self.bott.apply(&base)) {
                out.add_term(
                    DWord {
                        ext,
                        slots: w.slots.clone(),
                    },
                    c.clone() * c2,
                );
            }
            for a in 0..self.r_a {
                let dual = Element::gen(
                    self.frame,
                    Trunc::Unbounded,
                    Gen::Odd(self.frame.lam_id(a)),
                );
                let wedged = self.ext_terms(&(&dual * &base));
                if wedged.is_empty() {
                    continue;
                }
                debug_assert_eq!(wedged.len(), 1);
                let (ext, sign) = wedged[0].clone();
                for i in 0..w.slots.len() {
                    for (m, d) in self.action_on_monomial(a, &w.slots[i]) {
                        let mut slots = w.slots.clone();
                        slots[i] = m;
                        out.add_term(
                            DWord {
                                ext: ext.clone(),
                                slots,
                            },
                            c.clone() * sign.clone() * d,
                        );
                    }
                }
            }
        }
        out
    }

    /// Total coboundary of the double complex: the tensor-direction part
    /// carries the parity of the dual word.
    pub fn total_d(&self, x: &DElement) -> DElement {
        let mut out = self.ce_d(x);
        for (w, c) in x.terms() {
            let mut single = self.zero();
            single.add_term(w.clone(), c.clone() * neg_one_pow(w.ext.len()));
            out += hochschild_d(&single);
        }
        out
    }

    /// Skew-symmetrization of a polyvector with dual coefficients: each
    /// quotient direction becomes a one-letter slot, averaged over orderings
    /// with signs.
    pub fn hkr(&self, x: &Element) -> Result<DElement> {
        let psi_lo = self.frame.psi_id(0);
        let psi_hi = psi_lo + self.r as u16;
        let a_hi = self.frame.lam_id(0) + self.r_a as u16;
        let mut out = self.zero();
        for (w, c) in x.terms() {
            if !w.sym.is_zero() || !w.chart.is_zero() {
                return Err(Error::precondition(
                    "skew-symmetrization takes polyvectors with constant coefficients",
                ));
            }
            let mut ext = Vec::new();
            let mut dirs = Vec::new();
            for &id in &w.ext {
                if id < a_hi {
                    ext.push(id as u8);
                } else if id >= psi_lo && id < psi_hi {
                    dirs.push((id - psi_lo) as usize);
                } else {
                    return Err(Error::precondition(
                        "skew-symmetrization covers subalgebroid duals and quotient \
                         directions only",
                    ));
                }
            }
            let n = dirs.len();
            let norm = c.clone() / factorial(n as u64);
            for perm in (0..n).permutations(n) {
                let inversions = perm
                    .iter()
                    .enumerate()
                    .map(|(i, &pi)| perm[i + 1..].iter().filter(|&&pj| pj < pi).count())
                    .sum::<usize>();
                let slots: Vec<MultiIndex> = perm
                    .iter()
                    .map(|&j| MultiIndex::unit(self.r, dirs[j]))
                    .collect();
                out.add_term(
                    DWord {
                        ext: ext.clone(),
                        slots,
                    },
                    norm.clone() * neg_one_pow(inversions),
                );
            }
        }
        Ok(out)
    }
}
