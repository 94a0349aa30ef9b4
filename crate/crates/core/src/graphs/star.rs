//! Star products from a vertical Poisson bivector.
//!
//! f * g = sum_n (hbar^n / n!) U_n(pi, ..., pi)(f, g).  The hbar^0 term is
//! the plain product and stays exact; the hbar^1 term has closed-form
//! weights; from hbar^2 on, sampled weights enter and every coefficient
//! carries a propagated error bound.

use super::operator::{expansion_over_components, GraphExpansion, WeightBudget};
use super::weight::{WeightCache, WeightMode};
use crate::element::{Element, Trunc};
use crate::error::{Error, Result};
use crate::poly::tpoly::SchoutenEngine;
use crate::scalar::Ratio;
use crate::word::{FrameSpec, Word};
use num_traits::ToPrimitive;
use std::collections::BTreeMap;

/// Numeric polynomial: basis word to (value, error bound).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NumPoly {
    entries: BTreeMap<Word, (f64, f64)>,
}

impl NumPoly {
    pub fn from_element(e: &Element) -> NumPoly {
        let mut out = NumPoly::default();
        for (w, c) in e.terms() {
            out.add(w.clone(), c.to_f64().expect("finite coefficient"), 0.0);
        }
        out
    }

    fn add(&mut self, w: Word, value: f64, err: f64) {
        let e = self.entries.entry(w).or_insert((0.0, 0.0));
        e.0 += value;
        e.1 += err;
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Word, &(f64, f64))> {
        self.entries.iter()
    }

    pub fn get(&self, w: &Word) -> (f64, f64) {
        self.entries.get(w).copied().unwrap_or((0.0, 0.0))
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

    pub fn max_err(&self) -> f64 {
        self.entries
            .values()
            .map(|(_, e)| *e)
            .fold(0.0, f64::max)
    }

    /// Largest violation of |a - b| <= k_sigma * (err_a + err_b) + abs_tol
    /// over the union of words; zero when the polynomials agree.
    pub fn deviation(&self, other: &NumPoly, k_sigma: f64, abs_tol: f64) -> f64 {
        let mut worst = 0.0f64;
        for key in self.entries.keys().chain(other.entries.keys()) {
            let (av, ae) = self.get(key);
            let (bv, be) = other.get(key);
            worst = worst.max((av - bv).abs() - k_sigma * (ae + be) - abs_tol);
        }
        worst.max(0.0)
    }
}

/// Formal series in hbar with numeric polynomial coefficients, truncated at
/// the kernel order.
#[derive(Debug, Clone, PartialEq)]
pub struct StarSeries {
    pub coeffs: Vec<NumPoly>,
}

impl StarSeries {
    pub fn constant(f: &Element, order: usize) -> StarSeries {
        let mut coeffs = vec![NumPoly::default(); order + 1];
        coeffs[0] = NumPoly::from_element(f);
        StarSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// The graph expansions behind a star product, one per hbar power.
#[derive(Debug)]
pub struct StarKernel {
    frame: FrameSpec,
    trunc: Trunc,
    expansions: Vec<GraphExpansion>,
}

fn check_vertical_bivector(pi: &Element) -> Result<()> {
    let frame = pi.frame();
    for (w, _) in pi.terms() {
        let psis = w.count_ext_in(frame.psi_id(0), frame.psi_id(0) + frame.r as u16);
        if psis != 2 || w.ext.len() != psis || !w.chart.is_zero() {
            return Err(Error::precondition(
                "the star product needs a vertical bivector: two fiber directions per term",
            ));
        }
    }
    Ok(())
}

/// Builds the expansions U_n(pi, ..., pi)/n! for n = 1..=order.
///
/// The bivector must satisfy the Poisson condition [pi, pi] = 0; order 3 is
/// behind `allow_heavy` (its graph count and sampling cost grow steeply),
/// higher orders are not supported.
pub fn star_kernel(
    pi: &Element,
    order: usize,
    mode: &WeightMode,
    mut cache: Option<&mut WeightCache>,
    budget: Option<usize>,
    allow_heavy: bool,
) -> Result<StarKernel> {
    check_vertical_bivector(pi)?;
    let frame = pi.frame();
    let engine = SchoutenEngine::vertical(frame, pi.trunc());
    if !engine.bracket(pi, pi)?.is_zero() {
        return Err(Error::precondition(
            "the bivector is not Poisson: [pi, pi] != 0",
        ));
    }
    match order {
        0..=2 => {}
        3 if allow_heavy => {}
        3 => {
            return Err(Error::precondition(
                "star product order 3 needs the heavy flag",
            ));
        }
        _ => {
            return Err(Error::precondition(
                "star product orders above 3 are not supported",
            ));
        }
    }
    let mut budget = WeightBudget::new(budget);
    let mut expansions = Vec::with_capacity(order);
    let mut fact = Ratio::from_integer(1.into());
    for n in 1..=order {
        fact = fact * Ratio::from_integer((n as i64).into());
        let args = vec![pi.clone(); n];
        let pre = Ratio::from_integer(1.into()) / fact.clone();
        expansions.push(expansion_over_components(
            &args,
            mode,
            cache.as_deref_mut(),
            &mut budget,
            &pre,
            false,
        )?);
    }
    Ok(StarKernel {
        frame,
        trunc: pi.trunc(),
        expansions,
    })
}

impl StarKernel {
    pub fn order(&self) -> usize {
        self.expansions.len()
    }

    pub fn frame(&self) -> FrameSpec {
        self.frame
    }

    pub fn expansion(&self, n: usize) -> Option<&GraphExpansion> {
        n.checked_sub(1).and_then(|i| self.expansions.get(i))
    }

    /// Total Monte Carlo weights across all orders.
    pub fn sampled_count(&self) -> usize {
        self.expansions.iter().map(GraphExpansion::sampled_count).sum()
    }

    fn check_function(&self, f: &Element) -> Result<()> {
        if f.frame() != self.frame {
            return Err(Error::precondition("arguments share the kernel frame"));
        }
        for (w, _) in f.terms() {
            if !w.ext.is_empty() || !w.chart.is_zero() {
                return Err(Error::precondition(
                    "star product arguments are fiber polynomials",
                ));
            }
        }
        Ok(())
    }

    /// hbar^n coefficient applied to numeric polynomial inputs.
    fn apply_order(&self, n: usize, a: &NumPoly, b: &NumPoly) -> Result<NumPoly> {
        let mut out = NumPoly::default();
        let one = Ratio::from_integer(1.into());
        for (wf, &(va, ea)) in a.entries() {
            for (wg, &(vb, eb)) in b.entries() {
                let f = Element::from_term(self.frame, self.trunc, wf.clone(), one.clone());
                let g = Element::from_term(self.frame, self.trunc, wg.clone(), one.clone());
                if n == 0 {
                    let prod = f.try_mul(&g)?;
                    for (w, c) in prod.terms() {
                        let cf = c.to_f64().expect("finite");
                        out.add(
                            w.clone(),
                            cf * va * vb,
                            cf.abs() * (ea * vb.abs() + va.abs() * eb + ea * eb),
                        );
                    }
                    continue;
                }
                for term in &self.expansions[n - 1].terms {
                    let p = term.prefactor.to_f64().expect("finite prefactor");
                    let w = term.weight.value.as_f64() * p;
                    let se = term.weight.value.std_err() * p.abs();
                    let applied = term.operator.apply(&[f.clone(), g.clone()])?;
                    for (word, c) in applied.terms() {
                        let cf = c.to_f64().expect("finite");
                        let scale = va * vb;
                        let cross = ea * vb.abs() + va.abs() * eb + ea * eb;
                        out.add(
                            word.clone(),
                            cf * w * scale,
                            cf.abs() * (se * scale.abs() + (w.abs() + se) * cross),
                        );
                    }
                }
            }
        }
        Ok(out)
    }

    /// f * g for exact polynomial inputs.
    pub fn apply(&self, f: &Element, g: &Element) -> Result<StarSeries> {
        self.check_function(f)?;
        self.check_function(g)?;
        self.apply_series(
            &StarSeries::constant(f, self.order()),
            &StarSeries::constant(g, self.order()),
        )
    }

    /// Star product of two hbar series, truncated at the kernel order.
    pub fn apply_series(&self, a: &StarSeries, b: &StarSeries) -> Result<StarSeries> {
        let order = self.order();
        let mut coeffs = vec![NumPoly::default(); order + 1];
        for (t, slot) in coeffs.iter_mut().enumerate() {
            for n in 0..=t {
                for p in 0..=t - n {
                    let q = t - n - p;
                    let (ap, bq) = match (a.coeffs.get(p), b.coeffs.get(q)) {
                        (Some(x), Some(y)) => (x, y),
                        _ => continue,
                    };
                    if ap.is_empty() || bq.is_empty() {
                        continue;
                    }
                    let term = self.apply_order(n, ap, bq)?;
                    for (w, (v, e)) in term.entries {
                        let s = slot.entries.entry(w).or_insert((0.0, 0.0));
                        s.0 += v;
                        s.1 += e;
                    }
                }
            }
        }
        Ok(StarSeries { coeffs })
    }

    /// Exact hbar^1 part of f * g - g * f, available because first-order
    /// weights are closed-form.
    pub fn commutator_linear(&self, f: &Element, g: &Element) -> Result<Element> {
        self.check_function(f)?;
        self.check_function(g)?;
        let exp = self
            .expansions
            .first()
            .ok_or_else(|| Error::precondition("kernel order is zero"))?;
        let mut out = Element::zero(self.frame, self.trunc);
        for term in &exp.terms {
            let w = term
                .weight
                .value
                .exact()
                .expect("first order weights are closed-form")
                .clone()
                * term.prefactor.clone();
            let fg = term.operator.apply(&[f.clone(), g.clone()])?;
            let gf = term.operator.apply(&[g.clone(), f.clone()])?;
            out += (&fg - &gf).scale(&w);
        }
        Ok(out)
    }
}

/// Per-hbar-power deviation of (f*g)*h from f*(g*h), as numeric polynomials.
pub fn associativity_residuals(
    kernel: &StarKernel,
    f: &Element,
    g: &Element,
    h: &Element,
) -> Result<Vec<(NumPoly, NumPoly)>> {
    let fg = kernel.apply(f, g)?;
    let gh = kernel.apply(g, h)?;
    let lhs = kernel.apply_series(&fg, &StarSeries::constant(h, kernel.order()))?;
    let rhs = kernel.apply_series(&StarSeries::constant(f, kernel.order()), &gh)?;
    Ok(lhs.coeffs.into_iter().zip(rhs.coeffs).collect())
}
