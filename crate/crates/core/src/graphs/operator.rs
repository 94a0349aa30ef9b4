//! From graphs to polydifferential operators on the formal fiber.
//!
//! An admissible graph with `n` aerial vertices eats `n` vertical polyvectors
//! and returns an `m`-slot operator: edge targets on the ground fill the slot
//! multi-indices, aerial targets differentiate the receiving coefficient, and
//! each vertex sums over the bijections between its out-edges and the fiber
//! directions of its polyvector, with the sign of the bijection.  Weighting
//! the operators over all graphs of the right size gives the Taylor terms of
//! the formality map.

use super::graph::{enumerate_with_star_sizes, AdmissibleGraph, Vertex};
use super::weight::{closed_form, GraphWeight, WeightCache, WeightMode, WeightValue};
use crate::element::{Element, Trunc};
use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::poly::fdpoly::FdElement;
use crate::scalar::Ratio;
use crate::word::{merge_odd, FrameSpec, Word};
use itertools::Itertools;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

fn perm_sign(perm: &[usize]) -> i64 {
    let mut sign = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// One argument term split into its dress, fiber directions, and coefficient.
struct ArgTerm {
    lam: Vec<u16>,
    psis: Vec<usize>,
    word: Word,
    coeff: Ratio,
}

fn split_term(frame: FrameSpec, word: &Word, coeff: &Ratio, allow_dress: bool) -> Result<ArgTerm> {
    let mut lam = Vec::new();
    let mut psis = Vec::new();
    for &id in &word.ext {
        if frame.is_psi(id) {
            psis.push(frame.bank_index(id));
        } else if frame.is_lam(id) && allow_dress {
            lam.push(id);
        } else {
            return Err(Error::precondition(
                "graph operators take vertical polyvectors: chi coefficients and psi directions only",
            ));
        }
    }
    if !word.chart.is_zero() {
        return Err(Error::precondition(
            "graph operators take vertical polyvectors: chart coordinates are not allowed",
        ));
    }
    Ok(ArgTerm {
        lam,
        psis,
        word: Word {
            ext: Vec::new(),
            sym: word.sym.clone(),
            chart: word.chart.clone(),
        },
        coeff: coeff.clone(),
    })
}

/// Koszul exponent for pulling every dress factor to the left, in argument
/// order: the dress of argument j crosses the fiber parts of arguments 0..j.
fn dress_sign_exponent(terms: &[&ArgTerm]) -> i64 {
    let mut expo = 0i64;
    let mut psi_seen = 0i64;
    for t in terms {
        expo += psi_seen * t.lam.len() as i64;
        psi_seen += t.psis.len() as i64;
    }
    expo
}

fn assemble_terms(g: &AdmissibleGraph, combo: &[&ArgTerm], out: &mut FdElement) -> Result<()> {
    let frame = out.frame();
    let trunc = out.trunc();
    let edges = g.edges();

    let mut lam = Vec::new();
    let mut lam_sign = 1i64;
    for t in combo {
        match merge_odd(&lam, &t.lam) {
            Some((merged, s)) => {
                lam = merged;
                lam_sign *= s as i64;
            }
            None => return Ok(()),
        }
    }
    if dress_sign_exponent(combo) % 2 != 0 {
        lam_sign = -lam_sign;
    }

    let colorings: Vec<Vec<Vec<usize>>> = combo
        .iter()
        .map(|t| (0..t.psis.len()).permutations(t.psis.len()).collect())
        .collect();
    for perms in colorings.into_iter().multi_cartesian_product() {
        let mut sign = 1i64;
        for p in &perms {
            sign *= perm_sign(p);
        }
        // Color of the edge in slot `pos` of vertex k.
        let color =
            |k: usize, pos: usize| -> usize { combo[k].psis[perms[k][pos]] };

        let mut factors: Vec<Element> = combo
            .iter()
            .map(|t| Element::from_term(frame, trunc, t.word.clone(), t.coeff.clone()))
            .collect();
        let mut slots = vec![MultiIndex::zero(frame.r); g.m()];
        for e in &edges {
            let c = color(e.src, e.slot);
            match e.tgt {
                Vertex::Aerial(t) => {
                    let f = &mut factors[t as usize];
                    *f = f.sym_derivative(c);
                }
                Vertex::Terrestrial(j) => {
                    slots[j as usize] = slots[j as usize].plus_unit(c);
                }
            }
        }
        let mut prod = Element::from_term(
            frame,
            trunc,
            Word {
                ext: lam.clone(),
                sym: MultiIndex::zero(frame.r),
                chart: MultiIndex::zero(frame.chart),
            },
            Ratio::from_integer((lam_sign * sign).into()),
        );
        for f in &factors {
            if f.is_zero() {
                prod = Element::zero(frame, trunc);
                break;
            }
            prod = prod.try_mul(f)?;
        }
        if prod.is_zero() {
            continue;
        }
        *out += FdElement::operator(&prod, slots);
    }
    Ok(())
}

fn assemble_impl(g: &AdmissibleGraph, args: &[Element], allow_dress: bool) -> Result<FdElement> {
    if args.len() != g.n() {
        return Err(Error::precondition(
            "one polyvector argument per aerial vertex",
        ));
    }
    let frame = args
        .first()
        .map(Element::frame)
        .ok_or_else(|| Error::precondition("at least one argument"))?;
    let mut trunc = args[0].trunc();
    for a in args {
        if a.frame() != frame {
            return Err(Error::precondition("arguments share one frame"));
        }
        trunc = trunc.min(a.trunc());
    }
    let sizes = g.star_sizes();
    let mut out = FdElement::zero(frame, trunc);
    let term_lists: Vec<Vec<ArgTerm>> = args
        .iter()
        .enumerate()
        .map(|(k, a)| {
            a.terms()
                .map(|(w, c)| split_term(frame, w, c, allow_dress))
                .filter(|t| match t {
                    Ok(t) => t.psis.len() == sizes[k],
                    Err(_) => true,
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if term_lists.iter().any(Vec::is_empty) {
        return Ok(out);
    }
    for combo in term_lists
        .iter()
        .map(|l| l.iter())
        .multi_cartesian_product()
    {
        assemble_terms(g, &combo, &mut out)?;
    }
    Ok(out)
}

/// The operator of one graph on undressed vertical polyvectors.
pub fn assemble(g: &AdmissibleGraph, args: &[Element]) -> Result<FdElement> {
    assemble_impl(g, args, false)
}

/// Same, allowing an exterior dress on the arguments; the dress factors are
/// pulled to the left with Koszul signs and multiply the coefficient.
pub fn assemble_dressed(g: &AdmissibleGraph, args: &[Element]) -> Result<FdElement> {
    assemble_impl(g, args, true)
}

/// Skew-symmetrization operator of a (possibly dressed) vertical polyvector:
/// a term with s fiber directions becomes the alternating sum over the s!
/// ways to deal them out to s slots, divided by s!.
pub fn hkr(e: &Element) -> Result<FdElement> {
    let frame = e.frame();
    let mut out = FdElement::zero(frame, e.trunc());
    for (word, coeff) in e.terms() {
        let t = split_term(frame, word, coeff, true)?;
        let s = t.psis.len();
        let mut fact = Ratio::from_integer(1.into());
        for v in 1..=s {
            fact *= Ratio::from_integer(v.into());
        }
        for perm in (0..s).permutations(s) {
            let slots: Vec<MultiIndex> = perm
                .iter()
                .map(|&i| MultiIndex::unit(frame.r, t.psis[i]))
                .collect();
            let c = t.coeff.clone() * Ratio::from_integer(perm_sign(&perm).into()) / fact.clone();
            let coeff_word = Word {
                ext: t.lam.clone(),
                sym: t.word.sym.clone(),
                chart: t.word.chart.clone(),
            };
            out += FdElement::operator(&Element::from_term(frame, e.trunc(), coeff_word, c), slots);
        }
    }
    Ok(out)
}

/// Numeric multidifferential operator: slot multi-indices and coefficient
/// word mapped to (value, error bound).  Error bounds add linearly, so they
/// stay valid bounds under every fold.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NumOp {
    entries: BTreeMap<(Vec<MultiIndex>, Word), (f64, f64)>,
}

impl NumOp {
    pub fn add_scaled(&mut self, op: &FdElement, value: f64, err: f64) {
        for (slots, coeff) in op.terms() {
            for (word, c) in coeff.terms() {
                let cf = c.to_f64().expect("finite coefficient");
                let e = self
                    .entries
                    .entry((slots.clone(), word.clone()))
                    .or_insert((0.0, 0.0));
                e.0 += value * cf;
                e.1 += err * cf.abs();
            }
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Vec<MultiIndex>, Word), &(f64, f64))> {
        self.entries.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .values()
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max)
    }

    /// Largest violation of |a - b| <= k_sigma * (err_a + err_b) + abs_tol
    /// over the union of keys; zero when the operators agree.
    pub fn deviation(&self, other: &NumOp, k_sigma: f64, abs_tol: f64) -> f64 {
        let mut worst = 0.0f64;
        let keys = self.entries.keys().chain(other.entries.keys());
        for key in keys {
            let (av, ae) = self.entries.get(key).copied().unwrap_or((0.0, 0.0));
            let (bv, be) = other.entries.get(key).copied().unwrap_or((0.0, 0.0));
            let slack = k_sigma * (ae + be) + abs_tol;
            worst = worst.max((av - bv).abs() - slack);
        }
        worst.max(0.0)
    }
}

impl From<&FdElement> for NumOp {
    fn from(op: &FdElement) -> Self {
        let mut out = NumOp::default();
        out.add_scaled(op, 1.0, 0.0);
        out
    }
}

#[derive(Debug, Clone)]
pub struct WeightedTerm {
    pub graph: AdmissibleGraph,
    pub weight: GraphWeight,
    pub prefactor: Ratio,
    pub operator: FdElement,
}

/// A finite sum of weighted graph operators.
#[derive(Debug, Clone)]
pub struct GraphExpansion {
    frame: FrameSpec,
    trunc: Trunc,
    pub terms: Vec<WeightedTerm>,
}

impl GraphExpansion {
    pub fn empty(frame: FrameSpec, trunc: Trunc) -> Self {
        GraphExpansion {
            frame,
            trunc,
            terms: Vec::new(),
        }
    }

    pub fn frame(&self) -> FrameSpec {
        self.frame
    }

    pub fn trunc(&self) -> Trunc {
        self.trunc
    }

    pub fn scaled(mut self, c: &Ratio) -> Self {
        for t in &mut self.terms {
            t.prefactor *= c.clone();
        }
        self
    }

    pub fn merged(mut self, other: GraphExpansion) -> Self {
        self.trunc = self.trunc.min(other.trunc);
        self.terms.extend(other.terms);
        self
    }

    /// Number of Monte Carlo weights in the sum.
    pub fn sampled_count(&self) -> usize {
        self.terms
            .iter()
            .filter(|t| matches!(t.weight.value, WeightValue::Estimate { .. }))
            .count()
    }

    /// Exact fold; None when any weight is only an estimate.
    pub fn fold_exact(&self) -> Option<FdElement> {
        let mut out = FdElement::zero(self.frame, self.trunc);
        for t in &self.terms {
            let w = t.weight.value.exact()?;
            out += t.operator.scale(&(w.clone() * t.prefactor.clone()));
        }
        Some(out)
    }

    pub fn fold_numeric(&self) -> NumOp {
        let mut out = NumOp::default();
        for t in &self.terms {
            let p = t.prefactor.to_f64().expect("finite prefactor");
            out.add_scaled(
                &t.operator,
                t.weight.value.as_f64() * p,
                t.weight.value.std_err() * p.abs(),
            );
        }
        out
    }
}

pub(crate) struct WeightBudget {
    used: usize,
    limit: Option<usize>,
}

impl WeightBudget {
    pub(crate) fn new(limit: Option<usize>) -> Self {
        WeightBudget { used: 0, limit }
    }

    fn charge(&mut self) -> Result<()> {
        self.used += 1;
        match self.limit {
            Some(limit) if self.used > limit => Err(Error::precondition(format!(
                "weight budget exhausted: more than {limit} sampled weights requested",
            ))),
            _ => Ok(()),
        }
    }
}

pub(crate) fn obtain_weight(
    g: &AdmissibleGraph,
    mode: &WeightMode,
    cache: &mut Option<&mut WeightCache>,
    budget: &mut WeightBudget,
) -> Result<GraphWeight> {
    if matches!(mode, WeightMode::ExactIfKnown { .. }) {
        if let Some(w) = closed_form(g) {
            return Ok(w);
        }
    }
    if !g.is_dimension_matched() {
        return Ok(closed_form(g).expect("mismatch has a closed form"));
    }
    if let Some(cache) = cache.as_deref_mut() {
        if let Some(w) = cache.get(g, mode) {
            return Ok(w.clone());
        }
    }
    budget.charge()?;
    let w = super::weight::weight(g, mode)?;
    if let Some(cache) = cache.as_deref_mut() {
        cache.insert(g, w.clone());
    }
    Ok(w)
}

pub(crate) fn expansion_over_components(
    args: &[Element],
    mode: &WeightMode,
    mut cache: Option<&mut WeightCache>,
    budget: &mut WeightBudget,
    prefactor: &Ratio,
    allow_dress: bool,
) -> Result<GraphExpansion> {
    let n = args.len();
    let frame = args
        .first()
        .map(Element::frame)
        .ok_or_else(|| Error::precondition("at least one argument"))?;
    let trunc = args
        .iter()
        .map(Element::trunc)
        .fold(args[0].trunc(), Trunc::min);
    let mut expansion = GraphExpansion::empty(frame, trunc);
    if prefactor.is_zero() {
        return Ok(expansion);
    }
    let components: Vec<Vec<(usize, Element)>> = args
        .iter()
        .map(|a| a.split_by_psi_degree().into_iter().collect())
        .collect();
    if components.iter().any(Vec::is_empty) {
        return Ok(expansion);
    }
    for combo in components
        .iter()
        .map(|c| c.iter())
        .multi_cartesian_product()
    {
        let sizes: Vec<usize> = combo.iter().map(|(s, _)| *s).collect();
        let total: usize = sizes.iter().sum();
        let needed = 2 * n as i64 - 2;
        if (total as i64) < needed {
            continue;
        }
        let m = total - needed as usize;
        let parts: Vec<Element> = combo.iter().map(|(_, e)| e.clone()).collect();
        for g in enumerate_with_star_sizes(n, m, &sizes)? {
            let op = assemble_impl(&g, &parts, allow_dress)?;
            if op.is_zero() {
                continue;
            }
            let weight = obtain_weight(&g, mode, &mut cache, budget)?;
            if matches!(&weight.value, WeightValue::Exact(r) if r.is_zero()) {
                continue;
            }
            expansion.terms.push(WeightedTerm {
                graph: g,
                weight,
                prefactor: prefactor.clone(),
                operator: op,
            });
        }
    }
    Ok(expansion)
}

/// The n-th Taylor term of the formality map on vertical polyvectors:
/// the weighted sum of all graph operators matching the fiber directions of
/// the arguments.  `budget`, when set, caps the number of Monte Carlo weight
/// evaluations (cache hits and closed forms are free).
pub fn taylor_u(
    args: &[Element],
    mode: &WeightMode,
    cache: Option<&mut WeightCache>,
    budget: Option<usize>,
) -> Result<GraphExpansion> {
    let mut budget = WeightBudget::new(budget);
    expansion_over_components(
        args,
        mode,
        cache,
        &mut budget,
        &Ratio::from_integer(1.into()),
        false,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Element;
    use crate::word::Gen;

    fn frame2() -> FrameSpec {
        FrameSpec::new(0, 2, 0)
    }

    fn trunc() -> Trunc {
        Trunc::AtMost(6)
    }

    fn gen(frame: FrameSpec, g: Gen) -> Element {
        Element::gen(frame, trunc(), g)
    }

    fn psi(frame: FrameSpec, k: usize) -> Element {
        gen(frame, Gen::Odd(frame.psi_id(k)))
    }

    fn chi(frame: FrameSpec, k: usize) -> Element {
        gen(frame, Gen::Sym(k))
    }

    fn exact_mode() -> WeightMode {
        WeightMode::ExactIfKnown {
            samples: 20_000,
            seed: 17,
        }
    }

    #[test]
    fn first_taylor_term_is_the_skew_symmetrization() {
        let f = frame2();
        let gamma = {
            let a = chi(f, 0).try_mul(&psi(f, 0)).unwrap().try_mul(&psi(f, 1)).unwrap();
            let b = chi(f, 1).try_mul(&chi(f, 1)).unwrap().try_mul(&psi(f, 0)).unwrap();
            &a + &b
        };
        let u1 = taylor_u(&[gamma.clone()], &exact_mode(), None, None).unwrap();
        assert_eq!(u1.sampled_count(), 0);
        let folded = u1.fold_exact().unwrap();
        let skew = hkr(&gamma).unwrap();
        assert_eq!(folded, skew);
    }

    #[test]
    fn assembly_is_multilinear() {
        let f = frame2();
        let a = chi(f, 0).try_mul(&psi(f, 0)).unwrap();
        let b = chi(f, 1).try_mul(&psi(f, 1)).unwrap();
        let g = AdmissibleGraph::new(
            2,
            0,
            vec![vec![Vertex::Aerial(1)], vec![Vertex::Aerial(0)]],
        )
        .unwrap();
        let sum = assemble(&g, &[&a + &b, a.clone()]).unwrap();
        let mut split = assemble(&g, &[a.clone(), a.clone()]).unwrap();
        split += assemble(&g, &[b.clone(), a.clone()]).unwrap();
        assert_eq!(sum, split);
        let scaled = assemble(&g, &[a.scale(&Ratio::from_integer(3.into())), b.clone()]).unwrap();
        assert_eq!(
            scaled,
            assemble(&g, &[a, b]).unwrap().scale(&Ratio::from_integer(3.into()))
        );
    }

    #[test]
    fn assembly_is_equivariant_under_vertex_relabeling() {
        let f = frame2();
        let a = chi(f, 0).try_mul(&psi(f, 0)).unwrap();
        let b = chi(f, 1)
            .try_mul(&psi(f, 0))
            .unwrap()
            .try_mul(&psi(f, 1))
            .unwrap();
        let g = AdmissibleGraph::new(
            2,
            1,
            vec![
                vec![Vertex::Aerial(1)],
                vec![Vertex::Terrestrial(0), Vertex::Aerial(0)],
            ],
        )
        .unwrap();
        // Swap the vertex labels and the argument list together.
        let swapped = AdmissibleGraph::new(
            2,
            1,
            vec![
                vec![Vertex::Terrestrial(0), Vertex::Aerial(1)],
                vec![Vertex::Aerial(0)],
            ],
        )
        .unwrap();
        let lhs = assemble(&g, &[a.clone(), b.clone()]).unwrap();
        let rhs = assemble(&swapped, &[b, a]).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn both_degree_filters_agree() {
        let f = frame2();
        let bivector = psi(f, 0).try_mul(&psi(f, 1)).unwrap();
        // Wrong star size: the assembly vanishes.
        let g = AdmissibleGraph::new(1, 1, vec![vec![Vertex::Terrestrial(0)]]).unwrap();
        assert!(assemble(&g, &[bivector.clone()]).unwrap().is_zero());
        // Right star size, wrong edge count for the dimension: the weight vanishes.
        let g = AdmissibleGraph::new(
            1,
            3,
            vec![vec![Vertex::Terrestrial(0), Vertex::Terrestrial(1)]],
        )
        .unwrap();
        assert!(!assemble(&g, &[bivector]).unwrap().is_zero());
        assert_eq!(
            closed_form(&g).unwrap().value.exact(),
            Some(&Ratio::zero())
        );
    }

    #[test]
    fn dressed_assembly_carries_koszul_signs() {
        let f = FrameSpec::new(2, 2, 0);
        let lam = |i: usize| gen(f, Gen::Odd(f.lam_id(i)));
        let t = Trunc::AtMost(6);
        let a = lam(0).try_mul(&psi(f, 0)).unwrap();
        let b = lam(1).try_mul(&psi(f, 1)).unwrap();
        let g = AdmissibleGraph::new(
            1,
            1,
            vec![vec![Vertex::Terrestrial(0)]],
        )
        .unwrap();
        // One dressed vector: lam passes no fiber directions, sign +1.
        let op = assemble_dressed(&g, &[a.clone()]).unwrap();
        let mut expected = FdElement::zero(f, t);
        expected += FdElement::operator(
            &Element::gen(f, t, Gen::Odd(f.lam_id(0))),
            vec![MultiIndex::unit(2, 0)],
        );
        assert_eq!(op, expected);
        // Two dressed vectors: the second dress crosses the first fiber part.
        let g2 = AdmissibleGraph::new(
            2,
            2,
            vec![vec![Vertex::Terrestrial(0)], vec![Vertex::Terrestrial(1)]],
        )
        .unwrap();
        let op = assemble_dressed(&g2, &[a, b]).unwrap();
        let lam01 = Element::from_term(
            f,
            t,
            Word {
                ext: vec![f.lam_id(0), f.lam_id(1)],
                sym: MultiIndex::zero(2),
                chart: MultiIndex::zero(0),
            },
            -Ratio::from_integer(1.into()),
        );
        let mut expected = FdElement::zero(f, t);
        expected +=
            FdElement::operator(&lam01, vec![MultiIndex::unit(2, 0), MultiIndex::unit(2, 1)]);
        assert_eq!(op, expected);
        // Undressed assembly refuses the dress.
        assert!(assemble(&g2, &[lam(0), lam(1)]).is_err());
    }

    #[test]
    fn vector_field_pairs_vanish_numerically() {
        let f = frame2();
        let xi = chi(f, 0)
            .try_mul(&chi(f, 0))
            .unwrap()
            .try_mul(&psi(f, 1))
            .unwrap();
        let eta = chi(f, 1).try_mul(&chi(f, 0)).unwrap().try_mul(&psi(f, 0)).unwrap();
        let mode = WeightMode::ExactIfKnown {
            samples: 200_000,
            seed: 23,
        };
        let u2 = taylor_u(&[xi, eta], &mode, None, None).unwrap();
        assert!(u2.sampled_count() > 0);
        let num = u2.fold_numeric();
        let zero = NumOp::default();
        assert_eq!(num.deviation(&zero, 4.0, 1e-3), 0.0);
    }

    #[test]
    fn linear_vector_field_coefficients_vanish_numerically() {
        let f = frame2();
        let xi = chi(f, 0).try_mul(&psi(f, 0)).unwrap();
        let gamma = chi(f, 1).try_mul(&psi(f, 0)).unwrap().try_mul(&psi(f, 1)).unwrap();
        let mode = WeightMode::ExactIfKnown {
            samples: 200_000,
            seed: 29,
        };
        let u2 = taylor_u(&[xi, gamma], &mode, None, None).unwrap();
        let num = u2.fold_numeric();
        let zero = NumOp::default();
        assert_eq!(num.deviation(&zero, 4.0, 2e-3), 0.0);
    }

    #[test]
    fn budget_caps_sampled_weights() {
        let f = frame2();
        let xi = chi(f, 0).try_mul(&chi(f, 0)).unwrap().try_mul(&psi(f, 1)).unwrap();
        let eta = chi(f, 1).try_mul(&psi(f, 0)).unwrap();
        let err = taylor_u(&[xi, eta], &exact_mode(), None, Some(0)).unwrap_err();
        assert!(err.to_string().contains("weight budget"));
    }

    #[test]
    fn cache_reuse_avoids_budget_charges() {
        let f = frame2();
        let xi = chi(f, 0).try_mul(&chi(f, 0)).unwrap().try_mul(&psi(f, 1)).unwrap();
        let eta = chi(f, 1).try_mul(&psi(f, 0)).unwrap();
        let mode = WeightMode::ExactIfKnown {
            samples: 5_000,
            seed: 31,
        };
        let mut cache = WeightCache::new();
        let first = taylor_u(&[xi.clone(), eta.clone()], &mode, Some(&mut cache), None).unwrap();
        assert!(!cache.is_empty());
        // Second run needs no fresh sampling at all.
        let second = taylor_u(&[xi, eta], &mode, Some(&mut cache), Some(0)).unwrap();
        assert_eq!(
            first.fold_numeric().deviation(&second.fold_numeric(), 0.0, 0.0),
            0.0
        );
    }
}
