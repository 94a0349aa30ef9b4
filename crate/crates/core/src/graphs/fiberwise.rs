//! Graph expansion twisted by a flattened pair.
//!
//! The flattening turns the pair-side data into a vertical vector-field
//! valued form omega = Q - d_nabla (the contraction part plus the recursion
//! tail).  Feeding j copies of omega ahead of the arguments, with a 1/j!
//! prefactor, turns the plain Taylor terms into the twisted ones; the tail
//! is finite because each omega copy costs one slot of output degree.

use super::graph::enumerate_with_star_sizes;
use super::operator::{
    assemble_dressed, expansion_over_components, hkr, GraphExpansion, WeightBudget, WeightedTerm,
};
use super::weight::{GraphWeight, Provenance, WeightCache, WeightMode, WeightValue};
use crate::atiyah::{atiyah_fedosov, contract_by, todd_cocycle, SeriesKind};
use crate::element::{Element, Trunc};
use crate::error::{Error, Result};
use crate::fedosov::Flattening;
use crate::poly::fdpoly::FdElement;
use crate::scalar::Ratio;
use crate::word::{FrameSpec, Gen};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// The twisting form of a flattening: sum_k (Q - d_nabla)(chi_k) psi_k.
/// Its psi-degree is one; the coefficients carry the exterior dress.
pub fn twist(flat: &Flattening) -> Element {
    let frame = flat.frame();
    let trunc = flat.trunc;
    let mut out = Element::zero(frame, trunc);
    for k in 0..frame.r {
        let chi = Element::gen(frame, trunc, Gen::Sym(k));
        let coeff = &flat.q.apply(&chi) - &flat.d_nabla.apply(&chi);
        let psi = Element::gen(frame, trunc, Gen::Odd(frame.psi_id(k)));
        out += coeff.try_mul(&psi).expect("one frame");
    }
    out
}

fn max_psi_degree(e: &Element) -> usize {
    let frame = e.frame();
    let lo = frame.psi_id(0);
    let hi = lo + frame.r as u16;
    e.terms()
        .map(|(w, _)| w.count_ext_in(lo, hi))
        .max()
        .unwrap_or(0)
}

pub(crate) fn phi_with_twist(
    omega: &Element,
    gammas: &[Element],
    mode: &WeightMode,
    mut cache: Option<&mut WeightCache>,
    budget: Option<usize>,
) -> Result<GraphExpansion> {
    let n = gammas.len();
    let frame = gammas
        .first()
        .map(Element::frame)
        .ok_or_else(|| Error::precondition("at least one polyvector argument"))?;
    if omega.frame() != frame || gammas.iter().any(|g| g.frame() != frame) {
        return Err(Error::precondition("arguments share the flattening frame"));
    }
    let trunc = gammas
        .iter()
        .map(Element::trunc)
        .fold(omega.trunc(), Trunc::min);
    let mut expansion = GraphExpansion::empty(frame, trunc);
    let total_psi: usize = gammas.iter().map(max_psi_degree).sum();
    let j_max = total_psi as i64 + 2 - 2 * n as i64;
    let mut budget = WeightBudget::new(budget);
    let mut fact = Ratio::one();
    for j in 0..=j_max.max(0) {
        if j > 0 {
            if omega.is_zero() {
                break;
            }
            fact = fact * Ratio::from_integer(j.into());
        }
        let mut args = vec![omega.clone(); j as usize];
        args.extend_from_slice(gammas);
        let pre = Ratio::one() / fact.clone();
        let part = expansion_over_components(
            &args,
            mode,
            cache.as_deref_mut(),
            &mut budget,
            &pre,
            true,
        )?;
        expansion = expansion.merged(part);
    }
    Ok(expansion)
}

/// The n-th twisted Taylor term on (possibly dressed) vertical polyvectors:
/// sum over j of U_{n+j}(omega, ..., omega, gamma_1, ..., gamma_n) / j!.
pub fn phi(
    flat: &Flattening,
    gammas: &[Element],
    mode: &WeightMode,
    cache: Option<&mut WeightCache>,
    budget: Option<usize>,
) -> Result<GraphExpansion> {
    phi_with_twist(&twist(flat), gammas, mode, cache, budget)
}

/// Reference for the first twisted term on one polyvector: contract with the
/// square root of the tilde Todd cocycle of the flattening, then
/// skew-symmetrize.
pub fn phi1_todd_reference(
    flat: &Flattening,
    gamma: &Element,
    kmax: usize,
) -> Result<FdElement> {
    let at = atiyah_fedosov(flat);
    let td = todd_cocycle(&at, SeriesKind::SqrtTildeTd, kmax)?;
    hkr(&contract_by(&td.total(), gamma))
}

/// User-supplied weights for the homotopy kernel, keyed by canonical graph.
pub type HomotopyWeights = BTreeMap<String, Ratio>;

/// Homotopy operator skeleton between twisted terms: the graphs pair two
/// leading arguments with n twist copies over a one-parameter family, so
/// their edge count is 2(2 + n) + m - 3 and the weights are not the closed
/// configuration-space integrals.  They must be supplied; absent entries
/// count as zero.
pub fn homotopy_h(
    flat: &Flattening,
    alpha: &Element,
    beta: &Element,
    weights: &HomotopyWeights,
) -> Result<GraphExpansion> {
    let frame = flat.frame();
    if alpha.frame() != frame || beta.frame() != frame {
        return Err(Error::precondition("arguments share the flattening frame"));
    }
    let omega = twist(flat);
    let trunc = flat.trunc.min(alpha.trunc()).min(beta.trunc());
    let mut expansion = GraphExpansion::empty(frame, trunc);
    let pair_psi = max_psi_degree(alpha) + max_psi_degree(beta);
    let n_max = (pair_psi as i64 - 1).max(-1);
    let mut fact = Ratio::one();
    for n in 0..=n_max {
        if n > 0 {
            if omega.is_zero() {
                break;
            }
            fact = fact * Ratio::from_integer(n.into());
        }
        let mut args = vec![alpha.clone(), beta.clone()];
        args.extend(std::iter::repeat(omega.clone()).take(n as usize));
        let components: Vec<Vec<(usize, Element)>> = args
            .iter()
            .map(|a| a.split_by_psi_degree().into_iter().collect())
            .collect();
        if components.iter().any(Vec::is_empty) {
            continue;
        }
        let vertices = args.len();
        for combo in itertools::Itertools::multi_cartesian_product(
            components.iter().map(|c| c.iter()),
        ) {
            let sizes: Vec<usize> = combo.iter().map(|(s, _)| *s).collect();
            let total: usize = sizes.iter().sum();
            // One dimension lower than the closed case: m = |E| - 2N + 3.
            let m = total as i64 - 2 * vertices as i64 + 3;
            if m < 0 {
                continue;
            }
            let parts: Vec<Element> = combo.iter().map(|(_, e)| e.clone()).collect();
            for g in enumerate_with_star_sizes(vertices, m as usize, &sizes)? {
                let w = match weights.get(&g.canonical()) {
                    Some(w) if !w.is_zero() => w.clone(),
                    _ => continue,
                };
                let op = assemble_dressed(&g, &parts)?;
                if op.is_zero() {
                    continue;
                }
                let mut pre = Ratio::one() / fact.clone();
                if m % 2 == 0 {
                    pre = -pre;
                }
                expansion.terms.push(WeightedTerm {
                    graph: g,
                    weight: GraphWeight {
                        value: WeightValue::Exact(w),
                        provenance: Provenance::ClosedForm,
                    },
                    prefactor: pre,
                    operator: op,
                });
            }
        }
    }
    Ok(expansion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fedosov::flatten;
    use crate::graphs::operator::{taylor_u, NumOp};
    use crate::liepair::LiePair;
    use crate::multi_index::MultiIndex;
    use crate::word::Word;

    fn exact_mode() -> WeightMode {
        WeightMode::ExactIfKnown {
            samples: 50_000,
            seed: 41,
        }
    }

    fn psi(frame: FrameSpec, trunc: Trunc, k: usize) -> Element {
        Element::gen(frame, trunc, Gen::Odd(frame.psi_id(k)))
    }

    #[test]
    fn abelian_twist_is_the_contraction_part() {
        let pair = LiePair::abelian(3, 1);
        let flat = flatten(&pair, 3).unwrap();
        let frame = flat.frame();
        let omega = twist(&flat);
        let mut expected = Element::zero(frame, flat.trunc);
        for k in 0..frame.r {
            expected += Element::from_term(
                frame,
                flat.trunc,
                Word {
                    ext: vec![frame.lam_id(pair.r_a() + k), frame.psi_id(k)],
                    sym: MultiIndex::zero(frame.r),
                    chart: MultiIndex::zero(frame.chart),
                },
                -Ratio::one(),
            );
        }
        assert_eq!(omega, expected);
    }

    #[test]
    fn zero_twist_reduces_to_the_plain_expansion() {
        let frame = FrameSpec::new(0, 2, 0);
        let trunc = Trunc::AtMost(6);
        let chi0 = Element::gen(frame, trunc, Gen::Sym(0));
        let gamma = chi0
            .try_mul(&psi(frame, trunc, 0))
            .unwrap()
            .try_mul(&psi(frame, trunc, 1))
            .unwrap();
        let zero = Element::zero(frame, trunc);
        let twisted = phi_with_twist(&zero, &[gamma.clone()], &exact_mode(), None, None).unwrap();
        let plain = taylor_u(&[gamma], &exact_mode(), None, None).unwrap();
        assert_eq!(twisted.fold_exact().unwrap(), plain.fold_exact().unwrap());
    }

    #[test]
    fn leading_twisted_term_is_the_skew_symmetrization() {
        let pair = LiePair::sl2_span_e();
        let flat = flatten(&pair, 4).unwrap();
        let frame = flat.frame();
        let gamma = psi(frame, flat.trunc, 0)
            .try_mul(&psi(frame, flat.trunc, 1))
            .unwrap();
        let expansion = phi(&flat, &[gamma.clone()], &exact_mode(), None, None).unwrap();
        let mut leading = GraphExpansion::empty(frame, flat.trunc);
        leading
            .terms
            .extend(expansion.terms.iter().filter(|t| t.graph.n() == 1).cloned());
        assert_eq!(leading.fold_exact().unwrap(), hkr(&gamma).unwrap());
        // The tail is present: some graphs carry twist copies.
        assert!(expansion.terms.iter().any(|t| t.graph.n() > 1));
    }

    #[test]
    fn first_twisted_term_matches_the_todd_contraction() {
        let pair = LiePair::sl2_span_e();
        let flat = flatten(&pair, 4).unwrap();
        let frame = flat.frame();
        let gamma = psi(frame, flat.trunc, 0)
            .try_mul(&psi(frame, flat.trunc, 1))
            .unwrap();
        let mode = WeightMode::ExactIfKnown {
            samples: 400_000,
            seed: 53,
        };
        let expansion = phi(&flat, &[gamma.clone()], &mode, None, None).unwrap();
        let lhs = expansion.fold_numeric();
        let reference = phi1_todd_reference(&flat, &gamma, frame.r).unwrap();
        // The two-dress component of the reference is nonzero, so the
        // comparison pins the dress sign convention.
        assert!(reference
            .terms()
            .any(|(_, c)| c.terms().any(|(w, _)| w.ext.len() == 2)));
        let rhs = NumOp::from(&reference);
        let dev = lhs.deviation(&rhs, 4.0, 2e-3);
        assert_eq!(dev, 0.0, "twisted term deviates from the Todd contraction");
    }

    #[test]
    fn homotopy_skeleton_uses_supplied_weights() {
        let pair = LiePair::abelian(3, 1);
        let flat = flatten(&pair, 3).unwrap();
        let frame = flat.frame();
        let chi0 = Element::gen(frame, flat.trunc, Gen::Sym(0));
        let alpha = chi0.try_mul(&psi(frame, flat.trunc, 0)).unwrap();
        let beta = psi(frame, flat.trunc, 1);
        // No weights, no terms.
        let empty = homotopy_h(&flat, &alpha, &beta, &HomotopyWeights::new()).unwrap();
        assert!(empty.terms.is_empty());
        // Weight one graph from the n = 0 layer: two aerial vertices, one
        // ground vertex, mutual edges dimension 2*2 + 1 - 3 = 2.
        let graphs = enumerate_with_star_sizes(2, 1, &[1, 1]).unwrap();
        let mut table = HomotopyWeights::new();
        for g in &graphs {
            table.insert(g.canonical(), Ratio::one());
        }
        let h = homotopy_h(&flat, &alpha, &beta, &table).unwrap();
        assert!(!h.terms.is_empty());
        assert!(h.terms.iter().all(|t| t.graph.m() == 1));
        // The fold is linear in the first argument.
        let doubled = homotopy_h(
            &flat,
            &alpha.scale(&Ratio::from_integer(2.into())),
            &beta,
            &table,
        )
        .unwrap();
        assert_eq!(
            doubled.fold_exact().unwrap(),
            h.fold_exact()
                .unwrap()
                .scale(&Ratio::from_integer(2.into()))
        );
    }
}
