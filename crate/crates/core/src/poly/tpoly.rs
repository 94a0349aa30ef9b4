//! Polyvector fields as elements carrying psi factors, with the
//! Schouten-type bracket generated by a frame bracket and a frame action on
//! coefficients.

use crate::derivation::Derivation;
use crate::element::{Element, Trunc};
use crate::error::{Error, Result};
use crate::liepair::LiePair;
use crate::scalar::{neg_one_pow, Ratio};
use crate::word::{FrameSpec, Gen, Word};
use num_traits::{One, Zero};
use std::rc::Rc;

/// The bracket is fixed by its values on psi generators and by how a psi
/// direction differentiates a psi-free coefficient; everything else follows
/// from bilinearity, graded antisymmetry and the Leibniz rule in the degree
/// shifted by one. Degrees count lam and psi factors; theta may not appear.
pub struct SchoutenEngine {
    frame: FrameSpec,
    trunc: Trunc,
    psi_bracket: Vec<Element>, // i*r + j -> [psi_i, psi_j]
    psi_action: Rc<dyn Fn(usize, &Element) -> Element>,
}

impl SchoutenEngine {
    pub fn new(
        frame: FrameSpec,
        trunc: Trunc,
        psi_bracket: Vec<Element>,
        psi_action: Rc<dyn Fn(usize, &Element) -> Element>,
    ) -> Self {
        assert_eq!(psi_bracket.len(), frame.r * frame.r);
        SchoutenEngine {
            frame,
            trunc,
            psi_bracket,
            psi_action,
        }
    }

    /// Vertical calculus: psi directions commute and differentiate the
    /// symmetric part.
    pub fn vertical(frame: FrameSpec, trunc: Trunc) -> Self {
        let zero = Element::zero(frame, trunc);
        SchoutenEngine::new(
            frame,
            trunc,
            vec![zero; frame.r * frame.r],
            Rc::new(move |k, f| f.sym_derivative(k)),
        )
    }

    /// Quotient-side calculus for a matched pair: psi generators bracket by
    /// the complement structure constants and act on the subalgebroid duals
    /// through the flat action.
    pub fn matched_quotient(pair: &LiePair, trunc: Trunc) -> Result<Self> {
        let b = pair.b_structure()?;
        let frame = pair.frame();
        let r = frame.r;
        let mut psi_bracket = vec![Element::zero(frame, trunc); r * r];
        for i in 0..r {
            for j in 0..r {
                let mut img = Element::zero(frame, trunc);
                for k in 0..r {
                    let c = b.get(i, j, k);
                    if !c.is_zero() {
                        img += Element::gen(frame, trunc, Gen::Odd(frame.psi_id(k))).scale(&c);
                    }
                }
                psi_bracket[i * r + j] = img;
            }
        }
        // Flat action of the complement direction b_j on subalgebroid duals.
        let r_a = pair.r_a();
        let actions: Vec<Derivation> = (0..r)
            .map(|j| {
                let mut d = Derivation::zero(frame, trunc, 0);
                for i in 0..r_a {
                    let mut img = Element::zero(frame, trunc);
                    for a in 0..r_a {
                        let c = pair.struc(a, r_a + j, i).constant_term();
                        if !c.is_zero() {
                            img += Element::gen(frame, trunc, Gen::Odd(frame.lam_id(a)))
                                .scale(&c);
                        }
                    }
                    d.set_image(Gen::Odd(frame.lam_id(i)), img).expect("frame");
                }
                d
            })
            .collect();
        Ok(SchoutenEngine::new(
            frame,
            trunc,
            psi_bracket,
            Rc::new(move |j, f| actions[j].apply(f)),
        ))
    }

    pub fn frame(&self) -> FrameSpec {
        self.frame
    }

    fn psi_lo(&self) -> u16 {
        self.frame.psi_id(0)
    }

    fn psi_hi(&self) -> u16 {
        self.frame.psi_id(0) + self.frame.r as u16
    }

    fn check_input(&self, e: &Element) -> Result<()> {
        let tht_lo = self.frame.tht_id(0);
        let tht_hi = tht_lo + self.frame.r as u16;
        for (w, _) in e.terms() {
            if w.count_ext_in(tht_lo, tht_hi) > 0 {
                return Err(Error::precondition(
                    "polyvector bracket does not cover theta factors",
                ));
            }
        }
        Ok(())
    }

    /// Full bilinear bracket.
    pub fn bracket(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check_input(x)?;
        self.check_input(y)?;
        let mut out = Element::zero(self.frame, self.trunc.min(x.trunc()).min(y.trunc()));
        for (wx, cx) in x.terms() {
            for (wy, cy) in y.terms() {
                out += self.bracket_words(wx, wy).scale(&(cx.clone() * cy.clone()));
            }
        }
        Ok(out)
    }

    /// Total degree entering the signs: lam plus psi count.
    fn degree(&self, w: &Word) -> usize {
        w.ext.len()
    }

    fn mono(&self, w: &Word) -> Element {
        Element::from_term(self.frame, self.trunc, w.clone(), Ratio::one())
    }

    fn psi_degree(&self, w: &Word) -> usize {
        w.count_ext_in(self.psi_lo(), self.psi_hi())
    }

    /// [psi_i, Y] for a monomial Y: a plain (unsigned) derivation of the
    /// product, acting by the frame action on the coefficient and the frame
    /// bracket on each psi factor.
    fn bracket_psi_word(&self, i: usize, w: &Word) -> Element {
        let frame = self.frame;
        let split = w
            .ext
            .iter()
            .position(|&id| id >= self.psi_lo())
            .unwrap_or(w.ext.len());
        let coeff_word = Word {
            ext: w.ext[..split].to_vec(),
            sym: w.sym.clone(),
            chart: w.chart.clone(),
        };
        let psis = &w.ext[split..];
        let mut out = (self.psi_action)(i, &self.mono(&coeff_word));
        if !psis.is_empty() {
            let tail = Element::from_term(
                frame,
                self.trunc,
                Word {
                    ext: psis.to_vec(),
                    sym: crate::multi_index::MultiIndex::zero(frame.r),
                    chart: crate::multi_index::MultiIndex::zero(frame.chart),
                },
                Ratio::one(),
            );
            out = &out * &tail;
        }
        let coeff_el = self.mono(&coeff_word);
        for (t, &pid) in psis.iter().enumerate() {
            let j = frame.bank_index(pid);
            let br = &self.psi_bracket[i * frame.r + j];
            if br.is_zero() {
                continue;
            }
            let left_ids = &psis[..t];
            let right_ids = &psis[t + 1..];
            let mk = |ids: &[u16]| {
                Element::from_term(
                    frame,
                    self.trunc,
                    Word {
                        ext: ids.to_vec(),
                        sym: crate::multi_index::MultiIndex::zero(frame.r),
                        chart: crate::multi_index::MultiIndex::zero(frame.chart),
                    },
                    Ratio::one(),
                )
            };
            out += &(&(&coeff_el * &mk(left_ids)) * br) * &mk(right_ids);
        }
        out
    }

    /// Bracket of two monomials, peeling the trailing psi of the first
    /// argument: [X' psi, Y] = (-1)^{y-1} [X', Y] psi + X' [psi, Y].
    fn bracket_words(&self, wx: &Word, wy: &Word) -> Element {
        let px = self.psi_degree(wx);
        let py = self.psi_degree(wy);
        if px == 0 && py == 0 {
            return Element::zero(self.frame, self.trunc);
        }
        if px == 0 {
            // Graded antisymmetry in the shifted degree.
            let sx = self.degree(wx) as i64 - 1;
            let sy = self.degree(wy) as i64 - 1;
            let sign = if (sx * sy) % 2 == 0 {
                -Ratio::one()
            } else {
                Ratio::one()
            };
            return self.bracket_words(wy, wx).scale(&sign);
        }
        let last = *wx.ext.last().expect("psi-positive word is nonempty");
        debug_assert!(last >= self.psi_lo());
        let wx_head = Word {
            ext: wx.ext[..wx.ext.len() - 1].to_vec(),
            sym: wx.sym.clone(),
            chart: wx.chart.clone(),
        };
        let i = self.frame.bank_index(last);
        let psi = Element::gen(self.frame, self.trunc, Gen::Odd(last));
        let mut out = Element::zero(self.frame, self.trunc);
        if !(wx_head.ext.is_empty() && wx_head.sym.is_zero() && wx_head.chart.is_zero()) {
            let head_term = self.bracket_words(&wx_head, wy);
            let y_deg = self.degree(wy);
            out += (&head_term * &psi).scale(&neg_one_pow(y_deg + 1));
            out += &self.mono(&wx_head) * &self.bracket_psi_word(i, wy);
        } else {
            out += self.bracket_psi_word(i, wy);
        }
        out
    }
}

/// The Lie-derivative square of the extended flattening differential,
/// reported per generator and cut where the recursion stops resolving.
pub fn lie_extension_residual(
    flat: &crate::fedosov::Flattening,
) -> Vec<(Gen, Element)> {
    let ext = flat.lie_extension();
    ext.square_on_gens()
        .into_iter()
        .map(|(g, e)| (g, e.truncate(flat.order.saturating_sub(2))))
        .collect()
}
