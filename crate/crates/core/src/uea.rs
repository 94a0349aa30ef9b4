//! Constant-coefficient Lie algebras, their universal enveloping algebras in
//! PBW normal form, and the symmetrization map.

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::scalar::{factorial, Ratio};
use crate::sym_poly::SymPoly;
use itertools::Itertools;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Structure constants of a finite-dimensional Lie algebra over Q in a fixed
/// ordered basis: [x_i, x_j] = sum_k c(i,j,k) x_k.
#[derive(Clone, Debug)]
pub struct LieStructure {
    dim: usize,
    c: Vec<Ratio>,
}

impl LieStructure {
    pub fn new(dim: usize) -> Self {
        LieStructure {
            dim,
            c: vec![Ratio::zero(); dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Ratio {
        self.c[self.idx(i, j, k)].clone()
    }

    /// Sets c(i,j,k) and its antisymmetric partner c(j,i,k) = -c(i,j,k).
    pub fn set_bracket_term(&mut self, i: usize, j: usize, k: usize, v: Ratio) {
        let a = self.idx(i, j, k);
        let b = self.idx(j, i, k);
        self.c[a] = v.clone();
        self.c[b] = -v;
    }

    /// Antisymmetry (including vanishing diagonal) and the Jacobi identity.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.get(i, j, k) != -self.get(j, i, k) {
                        return Err(Error::validation(format!(
                            "bracket not antisymmetric at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for t in 0..n {
                        let mut acc = Ratio::zero();
                        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                            for m in 0..n {
                                acc = acc + self.get(a, b, m) * self.get(m, c, t);
                            }
                        }
                        if !acc.is_zero() {
                            return Err(Error::validation(format!(
                                "Jacobi identity fails at ({i},{j},{k}) -> {t}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// sl2 in the basis (e, h, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h.
    pub fn sl2() -> Self {
        let mut s = LieStructure::new(3);
        s.set_bracket_term(1, 0, 0, Ratio::from_integer(2.into()));
        s.set_bracket_term(1, 2, 2, Ratio::from_integer((-2).into()));
        s.set_bracket_term(0, 2, 1, Ratio::one());
        s
    }

    /// Two-dimensional solvable algebra in the basis (a, b): [a,b] = b.
    pub fn solvable2() -> Self {
        let mut s = LieStructure::new(2);
        s.set_bracket_term(0, 1, 1, Ratio::one());
        s
    }

    /// Matrix of ad(x_a) on the basis: rows are outputs, columns inputs,
    /// ad(x_a) x_j = sum_k c(a,j,k) x_k.
    pub fn ad_matrix(&self, a: usize) -> Vec<Vec<Ratio>> {
        (0..self.dim)
            .map(|k| (0..self.dim).map(|j| self.get(a, j, k)).collect())
            .collect()
    }
}

/// Element of the enveloping algebra in PBW normal form: every stored word
/// has non-decreasing letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UeaElement {
    dim: usize,
    terms: BTreeMap<Vec<u8>, Ratio>,
}

impl UeaElement {
    pub fn zero(dim: usize) -> Self {
        UeaElement {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        let mut e = UeaElement::zero(dim);
        e.terms.insert(Vec::new(), Ratio::one());
        e
    }

    pub fn gen(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut e = UeaElement::zero(dim);
        e.terms.insert(vec![k as u8], Ratio::one());
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &Ratio)> {
        self.terms.iter()
    }

    pub fn coeff(&self, word: &[u8]) -> Ratio {
        self.terms.get(word).cloned().unwrap_or_else(Ratio::zero)
    }

    fn add_term(&mut self, word: Vec<u8>, c: Ratio) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(word) {
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

    pub fn add(&self, other: &UeaElement) -> UeaElement {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &UeaElement) -> UeaElement {
        self.add(&other.scale(&-Ratio::one()))
    }

    pub fn scale(&self, c: &Ratio) -> UeaElement {
        let mut out = UeaElement::zero(self.dim);
        for (w, a) in &self.terms {
            out.add_term(w.clone(), a.clone() * c.clone());
        }
        out
    }
}

/// Rewrites an arbitrary word into PBW normal form by resolving the first
/// descent x_a x_b = x_b x_a + [x_a, x_b] until all words are sorted.
pub fn uea_normalize(ls: &LieStructure, word: &[u8], coeff: Ratio) -> UeaElement {
    let mut out = UeaElement::zero(ls.dim());
    let mut work: Vec<(Vec<u8>, Ratio)> = vec![(word.to_vec(), coeff)];
    while let Some((w, c)) = work.pop() {
        if c.is_zero() {
            continue;
        }
        match (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1]) {
            None => out.add_term(w, c),
            Some(i) => {
                let (a, b) = (w[i] as usize, w[i + 1] as usize);
                let mut swapped = w.clone();
                swapped.swap(i, i + 1);
                work.push((swapped, c.clone()));
                for k in 0..ls.dim() {
                    let ck = ls.get(a, b, k);
                    if ck.is_zero() {
                        continue;
                    }
                    let mut shorter = w.clone();
                    shorter[i] = k as u8;
                    shorter.remove(i + 1);
                    work.push((shorter, c.clone() * ck));
                }
            }
        }
    }
    out
}

/// Product in the enveloping algebra: concatenate words, then normalize.
pub fn uea_mul(ls: &LieStructure, a: &UeaElement, b: &UeaElement) -> UeaElement {
    let mut out = UeaElement::zero(ls.dim());
    for (wa, ca) in a.terms() {
        for (wb, cb) in b.terms() {
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            out = out.add(&uea_normalize(ls, &w, ca.clone() * cb.clone()));
        }
    }
    out
}

pub fn uea_commutator(ls: &LieStructure, a: &UeaElement, b: &UeaElement) -> UeaElement {
    uea_mul(ls, a, b).sub(&uea_mul(ls, b, a))
}

/// The PBW symmetrization S(g) -> U(g): a monomial of degree n maps to the
/// average of its n! letter orderings.
pub fn pbw_sym(ls: &LieStructure, p: &SymPoly) -> UeaElement {
    assert_eq!(p.nvars(), ls.dim(), "polynomial arity != algebra dimension");
    let mut out = UeaElement::zero(ls.dim());
    for (mi, c) in p.terms() {
        let letters: Vec<u8> = mi.letters().iter().map(|&k| k as u8).collect();
        let n = letters.len();
        if n == 0 {
            out = out.add(&UeaElement::one(ls.dim()).scale(c));
            continue;
        }
        let norm = c.clone() / factorial(n as u64);
        // Repeated letters repeat words; rewrite each distinct word once.
        let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
        for perm in (0..n).permutations(n) {
            let word: Vec<u8> = perm.iter().map(|&i| letters[i]).collect();
            *counts.entry(word).or_insert(0) += 1;
        }
        for (word, k) in counts {
            let c = norm.clone() * Ratio::from_integer(k.into());
            out = out.add(&uea_normalize(ls, &word, c));
        }
    }
    out
}

/// Kernel of all ad(x_a) actions on the degree <= maxdeg part of S(g):
/// a basis of invariant polynomials, one SymPoly per kernel vector.
pub fn symmetric_invariants(ls: &LieStructure, maxdeg: u32) -> Vec<SymPoly> {
    use crate::linalg::Matrix;
    let n = ls.dim();
    let mut out = Vec::new();
    for d in 0..=maxdeg {
        let monos = MultiIndex::of_degree(n, d);
        if monos.is_empty() {
            continue;
        }
        let col_of: BTreeMap<&MultiIndex, usize> =
            monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        // One block row per basis element a: matrix of ad(x_a) as a
        // derivation of S(g) restricted to degree d.
        let mut rows: Vec<Vec<Ratio>> = Vec::new();
        for a in 0..n {
            let mut block = vec![vec![Ratio::zero(); monos.len()]; monos.len()];
            for (j, m) in monos.iter().enumerate() {
                // ad_a(x^m) = sum_s m_s x^{m - e_s} [x_a, x_s]
                for s in 0..n {
                    let e = m.get(s);
                    if e == 0 {
                        continue;
                    }
                    for t in 0..n {
                        let c = ls.get(a, s, t);
                        if c.is_zero() {
                            continue;
                        }
                        let target = m.minus_unit(s).unwrap().plus_unit(t);
                        let i = col_of[&target];
                        block[i][j] =
                            block[i][j].clone() + c * Ratio::from_integer(e.into());
                    }
                }
            }
            rows.extend(block);
        }
        let mat = Matrix::from_rows(rows);
        for v in mat.kernel_basis() {
            let mut p = SymPoly::zero(n);
            for (j, coeff) in v.into_iter().enumerate() {
                p.add_term(monos[j].clone(), coeff);
            }
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn structure_validation() {
        assert!(LieStructure::sl2().validate().is_ok());
        assert!(LieStructure::solvable2().validate().is_ok());
        let mut bad = LieStructure::new(3);
        bad.set_bracket_term(0, 1, 2, int(1));
        bad.set_bracket_term(1, 2, 0, int(1));
        bad.set_bracket_term(2, 0, 1, int(1));
        // so(3)-like: fine.
        assert!(bad.validate().is_ok());
        bad.set_bracket_term(0, 1, 0, int(1));
        assert!(bad.validate().is_err());
    }

    #[test]
    fn pbw_rewrites() {
        // Basis order (e, h, f) = (0, 1, 2); fe = ef - h.
        let ls = LieStructure::sl2();
        let fe = uea_normalize(&ls, &[2, 0], int(1));
        assert_eq!(fe.coeff(&[0, 2]), int(1));
        assert_eq!(fe.coeff(&[1]), int(-1));
        assert_eq!(fe.terms().count(), 2);
        // [e, f] = h in the enveloping algebra.
        let e = UeaElement::gen(3, 0);
        let f = UeaElement::gen(3, 2);
        let h = UeaElement::gen(3, 1);
        assert_eq!(uea_commutator(&ls, &e, &f), h);
    }

    #[test]
    fn symmetrization_of_ef() {
        // (e f + f e)/2 = e f - h/2 in normal form.
        let ls = LieStructure::sl2();
        let mut p = SymPoly::zero(3);
        p.add_term(
            crate::multi_index::MultiIndex::from_vec(vec![1, 0, 1]),
            int(1),
        );
        let u = pbw_sym(&ls, &p);
        assert_eq!(u.coeff(&[0, 2]), int(1));
        assert_eq!(u.coeff(&[1]), rat(-1, 2));
        assert_eq!(u.terms().count(), 2);
    }

    #[test]
    fn casimir_is_central() {
        // C = h.h + 4 e.f in S(g); its symmetrization commutes with all
        // generators of U(sl2).
        let ls = LieStructure::sl2();
        let mut cas = SymPoly::zero(3);
        cas.add_term(
            crate::multi_index::MultiIndex::from_vec(vec![0, 2, 0]),
            int(1),
        );
        cas.add_term(
            crate::multi_index::MultiIndex::from_vec(vec![1, 0, 1]),
            int(4),
        );
        let u = pbw_sym(&ls, &cas);
        for k in 0..3 {
            let g = UeaElement::gen(3, k);
            assert!(uea_commutator(&ls, &u, &g).is_zero(), "gen {k}");
        }
    }

    #[test]
    fn sl2_invariants_low_degree() {
        let ls = LieStructure::sl2();
        let inv = symmetric_invariants(&ls, 2);
        // Degree 0: constants. Degree 1: none. Degree 2: the Casimir line.
        assert_eq!(inv.len(), 2);
        assert!(inv[0].is_constant());
        let cas = &inv[1];
        let h2 = cas.coeff(&crate::multi_index::MultiIndex::from_vec(vec![0, 2, 0]));
        let ef = cas.coeff(&crate::multi_index::MultiIndex::from_vec(vec![1, 0, 1]));
        assert_eq!(ef, h2.clone() * int(4));
        assert!(!h2.is_zero());
    }
}
