//! Graded derivations determined by their values on generators.

use crate::element::{Element, Trunc};
use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::scalar::Ratio;
use crate::word::{FrameSpec, Gen, Word};
use num_traits::Zero;

/// A derivation of the graded algebra, stored as one image per generator
/// and extended by the Leibniz rule. `degree` is the cohomological degree;
/// only its parity enters sign computations.
#[derive(Clone)]
pub struct Derivation {
    pub degree: i32,
    frame: FrameSpec,
    odd: Vec<Element>,
    sym: Vec<Element>,
    chart: Vec<Element>,
}

impl Derivation {
    pub fn zero(frame: FrameSpec, trunc: Trunc, degree: i32) -> Self {
        let z = Element::zero(frame, trunc);
        Derivation {
            degree,
            frame,
            odd: vec![z.clone(); frame.n_odd()],
            sym: vec![z.clone(); frame.r],
            chart: vec![z; frame.chart],
        }
    }

    pub fn frame(&self) -> FrameSpec {
        self.frame
    }

    fn parity(&self) -> usize {
        self.degree.rem_euclid(2) as usize
    }

    pub fn set_image(&mut self, g: Gen, img: Element) -> Result<()> {
        if img.frame() != self.frame {
            return Err(Error::precondition("derivation image frame mismatch"));
        }
        match g {
            Gen::Odd(id) => self.odd[id as usize] = img,
            Gen::Sym(k) => self.sym[k] = img,
            Gen::Chart(j) => self.chart[j] = img,
        }
        Ok(())
    }

    pub fn image(&self, g: Gen) -> &Element {
        match g {
            Gen::Odd(id) => &self.odd[id as usize],
            Gen::Sym(k) => &self.sym[k],
            Gen::Chart(j) => &self.chart[j],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.odd.iter().all(Element::is_zero)
            && self.sym.iter().all(Element::is_zero)
            && self.chart.iter().all(Element::is_zero)
    }

    /// Leibniz extension to an arbitrary element.
    pub fn apply(&self, e: &Element) -> Element {
        let frame = self.frame;
        assert_eq!(frame, e.frame(), "frame mismatch in derivation apply");
        let mut out = Element::zero(frame, e.trunc());
        let odd_flip = self.parity() == 1;
        for (w, c) in e.terms() {
            // Odd sites: passing p odd factors flips an odd derivation's sign.
            for (p, &id) in w.ext.iter().enumerate() {
                let img = &self.odd[id as usize];
                if img.is_zero() {
                    continue;
                }
                let mut coeff = c.clone();
                if odd_flip && p % 2 == 1 {
                    coeff = -coeff;
                }
                let left = Element::from_term(
                    frame,
                    e.trunc(),
                    Word {
                        ext: w.ext[..p].to_vec(),
                        sym: MultiIndex::zero(frame.r),
                        chart: MultiIndex::zero(frame.chart),
                    },
                    coeff,
                );
                let right = Element::from_term(
                    frame,
                    e.trunc(),
                    Word {
                        ext: w.ext[p + 1..].to_vec(),
                        sym: w.sym.clone(),
                        chart: w.chart.clone(),
                    },
                    Ratio::from_integer(1.into()),
                );
                out += &(&left * img) * &right;
            }
            // Even sites: the whole odd word is passed first.
            let ext_sign = odd_flip && w.ext.len() % 2 == 1;
            let mut even_site = |img: &Element, lowered: Word, mult: u32| {
                if img.is_zero() || mult == 0 {
                    return;
                }
                let mut coeff = c.clone() * Ratio::from_integer(mult.into());
                if ext_sign {
                    coeff = -coeff;
                }
                let rest = Element::from_term(frame, e.trunc(), lowered, coeff);
                out += &rest * img;
            };
            for k in 0..frame.r {
                let m = w.sym.get(k);
                if m > 0 {
                    let lowered = Word {
                        ext: w.ext.clone(),
                        sym: w.sym.minus_unit(k).unwrap(),
                        chart: w.chart.clone(),
                    };
                    even_site(&self.sym[k], lowered, m);
                }
            }
            for j in 0..frame.chart {
                let m = w.chart.get(j);
                if m > 0 {
                    let lowered = Word {
                        ext: w.ext.clone(),
                        sym: w.sym.clone(),
                        chart: w.chart.minus_unit(j).unwrap(),
                    };
                    even_site(&self.chart[j], lowered, m);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Derivation) -> Result<Derivation> {
        if self.frame != other.frame {
            return Err(Error::precondition("derivation frame mismatch in add"));
        }
        if self.parity() != other.parity() && !self.is_zero() && !other.is_zero() {
            return Err(Error::precondition(
                "adding derivations of opposite parity",
            ));
        }
        let mut out = self.clone();
        if out.is_zero() {
            out.degree = other.degree;
        }
        for (a, b) in out.odd.iter_mut().zip(&other.odd) {
            *a += b.clone();
        }
        for (a, b) in out.sym.iter_mut().zip(&other.sym) {
            *a += b.clone();
        }
        for (a, b) in out.chart.iter_mut().zip(&other.chart) {
            *a += b.clone();
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Ratio) -> Derivation {
        let mut out = self.clone();
        if c.is_zero() {
            for e in out
                .odd
                .iter_mut()
                .chain(out.sym.iter_mut())
                .chain(out.chart.iter_mut())
            {
                *e = Element::zero(self.frame, e.trunc());
            }
            return out;
        }
        for e in out
            .odd
            .iter_mut()
            .chain(out.sym.iter_mut())
            .chain(out.chart.iter_mut())
        {
            *e = e.scale(c);
        }
        out
    }

    /// Graded commutator [D1, D2] = D1 D2 - (-1)^{d1 d2} D2 D1, itself a
    /// derivation, assembled from images of the generators.
    pub fn commutator(&self, other: &Derivation) -> Result<Derivation> {
        if self.frame != other.frame {
            return Err(Error::precondition(
                "derivation frame mismatch in commutator",
            ));
        }
        let frame = self.frame;
        let sign_flip = self.parity() == 1 && other.parity() == 1;
        let mut out = Derivation::zero(frame, Trunc::Unbounded, self.degree + other.degree);
        let gens: Vec<Gen> = (0..frame.n_odd() as u16)
            .map(Gen::Odd)
            .chain((0..frame.r).map(Gen::Sym))
            .chain((0..frame.chart).map(Gen::Chart))
            .collect();
        for g in gens {
            let ab = self.apply(other.image(g));
            let ba = other.apply(self.image(g));
            let img = if sign_flip { &ab + &ba } else { &ab - &ba };
            out.set_image(g, img)?;
        }
        Ok(out)
    }

    /// D applied twice, as images on generators (not itself a derivation in
    /// general; for odd D this is (1/2)[D, D] which is one).
    pub fn square_on_gens(&self) -> Vec<(Gen, Element)> {
        let frame = self.frame;
        (0..frame.n_odd() as u16)
            .map(Gen::Odd)
            .chain((0..frame.r).map(Gen::Sym))
            .chain((0..frame.chart).map(Gen::Chart))
            .map(|g| (g, self.apply(self.image(g))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn frame() -> FrameSpec {
        FrameSpec::new(3, 2, 0)
    }

    fn gen_el(g: Gen) -> Element {
        Element::gen(frame(), Trunc::Unbounded, g)
    }

    #[test]
    fn leibniz_on_symmetric_square() {
        // D(chi1) = lam1 extends to D(chi1^2) = 2 lam1 chi1.
        let f = frame();
        let mut d = Derivation::zero(f, Trunc::Unbounded, 1);
        d.set_image(Gen::Sym(0), gen_el(Gen::Odd(f.lam_id(0)))).unwrap();
        let chi1 = gen_el(Gen::Sym(0));
        let sq = &chi1 * &chi1;
        let expect = (&gen_el(Gen::Odd(f.lam_id(0))) * &chi1).scale(&int(2));
        assert_eq!(d.apply(&sq), expect);
    }

    #[test]
    fn koszul_sign_at_odd_sites() {
        // With D odd and D(chi1) = mu (an odd generator), D(lam1 chi1)
        // picks up a minus from passing lam1.
        let f = frame();
        let mut d = Derivation::zero(f, Trunc::Unbounded, 1);
        let mu = gen_el(Gen::Odd(f.lam_id(1)));
        d.set_image(Gen::Sym(0), mu.clone()).unwrap();
        let lam1 = gen_el(Gen::Odd(f.lam_id(0)));
        let chi1 = gen_el(Gen::Sym(0));
        let got = d.apply(&(&lam1 * &chi1));
        let expect = (&lam1 * &mu).scale(&int(-1));
        assert_eq!(got, expect);
    }

    #[test]
    fn commutator_matches_composition() {
        // D1(chi1) = lam1, D2(lam1) = chi1, both odd: the bracket is the
        // anticommutator, and must agree with composing the extensions.
        let f = frame();
        let mut d1 = Derivation::zero(f, Trunc::Unbounded, 1);
        d1.set_image(Gen::Sym(0), gen_el(Gen::Odd(f.lam_id(0)))).unwrap();
        let mut d2 = Derivation::zero(f, Trunc::Unbounded, -1);
        d2.set_image(Gen::Odd(f.lam_id(0)), gen_el(Gen::Sym(0))).unwrap();
        let bracket = d1.commutator(&d2).unwrap();
        let probe = {
            let lam1 = gen_el(Gen::Odd(f.lam_id(0)));
            let lam2 = gen_el(Gen::Odd(f.lam_id(1)));
            let chi1 = gen_el(Gen::Sym(0));
            let chi2 = gen_el(Gen::Sym(1));
            &(&(&lam1 * &chi1) + &(&lam2 * &(&chi2 * &chi1))) + &chi2
        };
        let direct = &d1.apply(&d2.apply(&probe)) + &d2.apply(&d1.apply(&probe));
        assert_eq!(bracket.apply(&probe), direct);
    }

    #[test]
    fn even_derivation_has_no_signs() {
        // Euler-type even derivation E(chi_k) = chi_k counts symmetric degree.
        let f = frame();
        let mut e = Derivation::zero(f, Trunc::Unbounded, 0);
        for k in 0..f.r {
            e.set_image(Gen::Sym(k), gen_el(Gen::Sym(k))).unwrap();
        }
        let lam1 = gen_el(Gen::Odd(f.lam_id(0)));
        let chi1 = gen_el(Gen::Sym(0));
        let chi2 = gen_el(Gen::Sym(1));
        let w = &(&lam1 * &chi1) * &(&chi2 * &chi2);
        assert_eq!(e.apply(&w), w.scale(&int(3)));
    }
}
