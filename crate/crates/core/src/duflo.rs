//! The Duflo element and the classical multiplicativity check.
//!
//! J(x) = det((1 - e^{-ad_x})/ad_x) is an invariant formal function on the
//! Lie algebra, computed here through log J = sum_s u_s tr(ad_x^s) with the
//! u_s taken from the scalar series.  Its square root, applied to symmetric
//! invariants as a constant-coefficient differential operator before
//! symmetrizing into the enveloping algebra, makes the composite map an
//! algebra morphism; plain symmetrization is not one.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::multi_index::MultiIndex;
use crate::scalar::{int, Ratio};
use crate::series::todd_denominator;
use crate::sym_poly::SymPoly;
use crate::uea::{pbw_sym, symmetric_invariants, uea_commutator, uea_mul, LieStructure, UeaElement};
use num_traits::{One, Zero};

/// A truncated invariant formal function on the algebra, as a polynomial in
/// the dual-basis coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DufloSeries {
    order: u32,
    poly: SymPoly,
}

impl DufloSeries {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn poly(&self) -> &SymPoly {
        &self.poly
    }

    /// Applies the series as a constant-coefficient operator on S(g): a dual
    /// monomial acts as the matching plain derivative (the permutation-sum
    /// duality pairing, so <nu . nu, v . v> = 2 <nu, v>^2).
    pub fn apply(&self, s: &SymPoly) -> SymPoly {
        apply_dual_operator(&self.poly, s)
    }
}

/// The ad matrix as a polynomial matrix: entry (t, c) is the x_t coefficient
/// of [x, x_c] for a generic x with dual coordinates.
fn ad_poly_matrix(ls: &LieStructure) -> Vec<Vec<SymPoly>> {
    let n = ls.dim();
    let mut m = vec![vec![SymPoly::zero(n); n]; n];
    for a in 0..n {
        for c in 0..n {
            for t in 0..n {
                let coeff = ls.get(a, c, t);
                if !coeff.is_zero() {
                    m[t][c] = m[t][c].add(&SymPoly::var(n, a).scale(&coeff));
                }
            }
        }
    }
    m
}

fn mat_mul(a: &[Vec<SymPoly>], b: &[Vec<SymPoly>], order: u32) -> Vec<Vec<SymPoly>> {
    let n = a.len();
    let mut out = vec![vec![SymPoly::zero(n); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = SymPoly::zero(n);
            for k in 0..n {
                acc = acc.add(&a[i][k].mul(&b[k][j]));
            }
            out[i][j] = acc.truncate_above(order);
        }
    }
    out
}

fn exp_truncated(p: &SymPoly, order: u32) -> SymPoly {
    debug_assert!(p.constant_term().is_zero());
    let mut out = SymPoly::one(p.nvars());
    let mut term = SymPoly::one(p.nvars());
    for k in 1..=order {
        term = term
            .mul(p)
            .truncate_above(order)
            .scale(&(Ratio::one() / int(k as i64)));
        if term.is_zero() {
            break;
        }
        out = out.add(&term);
    }
    out
}

fn log_duflo(ls: &LieStructure, order: u32) -> SymPoly {
    let n = ls.dim();
    let u = todd_denominator(order as usize)
        .log()
        .expect("series with unit constant term");
    let ad = ad_poly_matrix(ls);
    let mut power = ad.clone();
    let mut out = SymPoly::zero(n);
    for s in 1..=order as usize {
        if s > 1 {
            power = mat_mul(&power, &ad, order);
        }
        let c = u.coeff(s);
        if !c.is_zero() {
            let mut trace = SymPoly::zero(n);
            for (i, row) in power.iter().enumerate() {
                trace = trace.add(&row[i]);
            }
            out = out.add(&trace.scale(&c));
        }
    }
    out.truncate_above(order)
}

/// The Duflo element J to the given order.
pub fn duflo_element(ls: &LieStructure, order: u32) -> DufloSeries {
    DufloSeries {
        order,
        poly: exp_truncated(&log_duflo(ls, order), order),
    }
}

/// The square root J^{1/2} to the given order.
pub fn duflo_sqrt(ls: &LieStructure, order: u32) -> DufloSeries {
    let half = log_duflo(ls, order).scale(&crate::scalar::rat(1, 2));
    DufloSeries {
        order,
        poly: exp_truncated(&half, order),
    }
}

/// A dual polynomial acting on S(g): each dual monomial becomes the plain
/// iterated derivative in the matching variables (no factorial division).
pub fn apply_dual_operator(op: &SymPoly, s: &SymPoly) -> SymPoly {
    let n = s.nvars();
    let mut out = SymPoly::zero(n);
    for (mi, c) in op.terms() {
        let mut part = s.clone();
        for k in mi.letters() {
            part = part.derivative(k);
            if part.is_zero() {
                break;
            }
        }
        out = out.add(&part.scale(c));
    }
    out
}

/// The coadjoint action of basis element a as a derivation on dual
/// polynomials; invariant functions are killed by every generator.
pub fn coadjoint_action(ls: &LieStructure, a: usize, p: &SymPoly) -> SymPoly {
    let n = ls.dim();
    let mut out = SymPoly::zero(n);
    for (mi, c) in p.terms() {
        for t in 0..n {
            let e = mi.get(t);
            if e == 0 {
                continue;
            }
            // xi_t -> -sum_s c(a, s, t) xi_s, extended as a derivation.
            for s in 0..n {
                let coeff = ls.get(a, s, t);
                if coeff.is_zero() {
                    continue;
                }
                let lowered = mi.minus_unit(t).expect("positive exponent");
                let term = SymPoly::monomial(lowered.plus_unit(s), c.clone())
                    .scale(&(-coeff * Ratio::from_integer(e.into())));
                out = out.add(&term);
            }
        }
    }
    out
}

pub fn is_coadjoint_invariant(ls: &LieStructure, p: &SymPoly) -> bool {
    (0..ls.dim()).all(|a| coadjoint_action(ls, a, p).is_zero())
}

/// Basis of the invariants of the enveloping algebra through the given
/// filtration degree: the kernel of all commutators with generators on the
/// span of normal-ordered words.
pub fn uea_invariants(ls: &LieStructure, maxdeg: u32) -> Vec<UeaElement> {
    let n = ls.dim();
    let words: Vec<Vec<u8>> = MultiIndex::up_to_degree(n, maxdeg)
        .into_iter()
        .map(|mi| mi.letters().iter().map(|&k| k as u8).collect())
        .collect();
    let col_of = |w: &[u8]| -> usize {
        words
            .iter()
            .position(|x| x == w)
            .expect("commutator stays in the filtration")
    };
    let mut rows: Vec<Vec<Ratio>> = Vec::new();
    for a in 0..n {
        let g = UeaElement::gen(n, a);
        let mut block = vec![vec![Ratio::zero(); words.len()]; words.len()];
        for (j, w) in words.iter().enumerate() {
            let mut u = UeaElement::zero(n);
            u = u.add(&crate::uea::uea_normalize(ls, w, Ratio::one()));
            let br = uea_commutator(&ls.clone(), &g, &u);
            for (word, c) in br.terms() {
                block[col_of(word)][j] = c.clone();
            }
        }
        rows.extend(block);
    }
    Matrix::from_rows(rows)
        .kernel_basis()
        .into_iter()
        .map(|v| {
            let mut u = UeaElement::zero(n);
            for (j, c) in v.into_iter().enumerate() {
                if !c.is_zero() {
                    u = u.add(&crate::uea::uea_normalize(ls, &words[j], c));
                }
            }
            u
        })
        .collect()
}

/// Summary of the multiplicativity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DufloCheck {
    pub degree: u32,
    pub invariant_count: usize,
    pub pairs_checked: usize,
    /// Some pair of invariants where plain symmetrization fails to be
    /// multiplicative (expected for nonabelian algebras).
    pub plain_discrepancy: bool,
}

/// Verifies, exactly, that s -> pbw(J^{1/2} s) is multiplicative on all
/// pairs of symmetric invariants through the given degree.  Failure is an
/// error, not a report entry.
pub fn duflo_check(ls: &LieStructure, degree: u32) -> Result<DufloCheck> {
    let invs = symmetric_invariants(ls, degree);
    let sqrt = duflo_sqrt(ls, 2 * degree);
    let twist = |p: &SymPoly| pbw_sym(ls, &sqrt.apply(p));
    let mut pairs_checked = 0;
    let mut plain_discrepancy = false;
    for (i, p) in invs.iter().enumerate() {
        for q in &invs[i..] {
            pairs_checked += 1;
            let product = p.mul(q);
            let lhs = twist(&product);
            let rhs = uea_mul(ls, &twist(p), &twist(q));
            if !lhs.sub(&rhs).is_zero() {
                return Err(Error::internal(format!(
                    "Duflo multiplicativity failed on an invariant pair at degree {degree}",
                )));
            }
            let plain = pbw_sym(ls, &product)
                .sub(&uea_mul(ls, &pbw_sym(ls, p), &pbw_sym(ls, q)));
            if !plain.is_zero() {
                plain_discrepancy = true;
            }
        }
    }
    Ok(DufloCheck {
        degree,
        invariant_count: invs.len(),
        pairs_checked,
        plain_discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn abelian_element_is_one() {
        let ls = LieStructure::new(3);
        let j = duflo_element(&ls, 5);
        assert_eq!(j.poly(), &SymPoly::one(3));
        let check = duflo_check(&ls, 2).unwrap();
        assert!(!check.plain_discrepancy);
        assert!(check.invariant_count > 1);
    }

    #[test]
    fn constant_term_is_one_and_sl2_is_even() {
        let j = duflo_element(&LieStructure::sl2(), 4);
        assert_eq!(j.poly().constant_term(), Ratio::one());
        // sl2 is unimodular: tr(ad) = 0 kills the odd-degree terms.
        assert!(j.poly().degree_part(1).is_zero());
        assert!(j.poly().degree_part(3).is_zero());
        assert!(!j.poly().degree_part(2).is_zero());
    }

    #[test]
    fn square_root_squares_back() {
        for ls in [LieStructure::sl2(), LieStructure::solvable2()] {
            let order = 6;
            let j = duflo_element(&ls, order);
            let s = duflo_sqrt(&ls, order);
            let squared = s.poly().mul(s.poly()).truncate_above(order);
            assert_eq!(&squared, j.poly());
        }
    }

    #[test]
    fn solvable_element_matches_the_scalar_series() {
        // ad_x has eigenvalues 0 and xi_0, so J is the one-variable series
        // (1 - e^{-t})/t evaluated at the first dual coordinate.
        let ls = LieStructure::solvable2();
        let order = 6;
        let j = duflo_element(&ls, order);
        let scalar = todd_denominator(order as usize);
        for k in 0..=order {
            let mut mi = MultiIndex::zero(2);
            for _ in 0..k {
                mi = mi.plus_unit(0);
            }
            assert_eq!(j.poly().coeff(&mi), scalar.coeff(k as usize), "degree {k}");
        }
        assert!(is_coadjoint_invariant(&ls, j.poly()));
    }

    #[test]
    fn element_is_invariant() {
        let j = duflo_element(&LieStructure::sl2(), 4);
        assert!(is_coadjoint_invariant(&LieStructure::sl2(), j.poly()));
    }

    #[test]
    fn pairing_is_the_permutation_sum() {
        // <nu . nu, v . v> = 2 <nu, v>^2: xi_0^2 applied to x_0^2 gives 2.
        let op = SymPoly::monomial(MultiIndex::from_vec(vec![2, 0]), Ratio::one());
        let target = SymPoly::monomial(MultiIndex::from_vec(vec![2, 0]), Ratio::one());
        let paired = apply_dual_operator(&op, &target);
        assert_eq!(paired, SymPoly::constant(2, int(2)));
        // J = 1 acts as the identity; degree-0 input is unchanged.
        let one = DufloSeries {
            order: 3,
            poly: SymPoly::one(2),
        };
        assert_eq!(one.apply(&target), target);
        let c = SymPoly::constant(2, rat(5, 3));
        let j = duflo_element(&LieStructure::solvable2(), 4);
        assert_eq!(j.apply(&c), c);
    }

    #[test]
    fn sl2_invariant_dimensions() {
        let inv = symmetric_invariants(&LieStructure::sl2(), 4);
        // Constants, the Casimir, and its square: one per even degree.
        assert_eq!(inv.len(), 3);
        let deg4: Vec<_> = inv.iter().filter(|p| p.max_degree() == 4).collect();
        assert_eq!(deg4.len(), 1);
    }

    #[test]
    fn enveloping_invariants() {
        // Abelian: every word is invariant.
        let abelian = LieStructure::new(2);
        let all = uea_invariants(&abelian, 2);
        assert_eq!(all.len(), 6);
        // sl2 through filtration 2: constants and the Casimir level.
        let inv = uea_invariants(&LieStructure::sl2(), 2);
        assert_eq!(inv.len(), 2);
        for u in &inv {
            for k in 0..3 {
                let g = UeaElement::gen(3, k);
                assert!(uea_commutator(&LieStructure::sl2(), &g, u).is_zero());
            }
        }
    }

    #[test]
    fn multiplicativity_on_sl2_invariants() {
        let check = duflo_check(&LieStructure::sl2(), 4).unwrap();
        assert_eq!(check.invariant_count, 3);
        assert_eq!(check.pairs_checked, 6);
        assert!(check.plain_discrepancy);
    }

    #[test]
    fn multiplicativity_on_the_solvable_pair() {
        let check = duflo_check(&LieStructure::solvable2(), 4).unwrap();
        assert!(check.pairs_checked > 0);
    }

    #[test]
    fn symmetrization_is_unitriangular() {
        // pbw of a monomial is its normal word plus strictly shorter terms.
        let ls = LieStructure::sl2();
        for mi in MultiIndex::of_degree(3, 3) {
            let p = SymPoly::monomial(mi.clone(), Ratio::one());
            let u = pbw_sym(&ls, &p);
            let lead: Vec<u8> = mi.letters().iter().map(|&k| k as u8).collect();
            assert_eq!(u.coeff(&lead), Ratio::one());
            for (w, _) in u.terms() {
                assert!(w.len() <= lead.len());
            }
        }
    }
}
