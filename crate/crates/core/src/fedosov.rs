//! Koszul contraction of the symmetric tower and the flattening recursion:
//! starting from a torsion-free extension of the induced flat action, build
//! the vertical corrections X_2, X_3, ... whose sum makes
//! Q = -delta + d + X square to zero through the working order.

use crate::derivation::Derivation;
use crate::element::{Element, Trunc};
use crate::error::{Error, Result};
use crate::liepair::LiePair;
use crate::scalar::Ratio;
use crate::word::{FrameSpec, Gen, Word};
use num_traits::One;

/// The contraction (sigma, tau, h) of Lambda(quotient-frame) (x) S(quotient)
/// onto its degree-zero line, together with the Koszul differential delta.
/// Frame sections below `r_a` and the theta/psi banks ride along as inert
/// coefficients.
#[derive(Clone, Copy)]
pub struct KoszulContraction {
    frame: FrameSpec,
    r_a: usize,
}

impl KoszulContraction {
    pub fn new(frame: FrameSpec, r_a: usize) -> Self {
        assert_eq!(r_a + frame.r, frame.l, "frame ranks inconsistent");
        KoszulContraction { frame, r_a }
    }

    /// delta: chi_k -> lam_{r_a + k}, an odd derivation.
    pub fn delta(&self, trunc: Trunc) -> Derivation {
        let mut d = Derivation::zero(self.frame, trunc, 1);
        for k in 0..self.frame.r {
            let lam = Element::gen(self.frame, trunc, Gen::Odd(self.frame.lam_id(self.r_a + k)));
            d.set_image(Gen::Sym(k), lam).expect("same frame");
        }
        d
    }

    /// Koszul homotopy: on a word with v quotient-frame factors and
    /// symmetric degree s, contract each quotient factor into its symmetric
    /// partner, normalized by v + s; zero when v = 0. Output is accurate one
    /// symmetric degree beyond the input, and the truncation records that.
    pub fn h(&self, e: &Element) -> Element {
        let frame = self.frame;
        let out_trunc = match e.trunc() {
            Trunc::Unbounded => Trunc::Unbounded,
            Trunc::AtMost(n) => Trunc::AtMost(n + 1),
        };
        let mut out = Element::zero(frame, out_trunc);
        let lo = frame.lam_id(self.r_a);
        let hi = frame.lam_id(self.r_a) + frame.r as u16;
        for (w, c) in e.terms() {
            let v = w.count_ext_in(lo, hi);
            if v == 0 {
                continue;
            }
            let denom = Ratio::from_integer(((v as u32 + w.sym_degree()) as i64).into());
            for k in 0..frame.r {
                let id = frame.lam_id(self.r_a + k);
                if let Ok(pos) = w.ext.binary_search(&id) {
                    let mut ext = w.ext.clone();
                    ext.remove(pos);
                    let sign = if pos % 2 == 0 { Ratio::one() } else { -Ratio::one() };
                    let word = Word {
                        ext,
                        sym: w.sym.plus_unit(k),
                        chart: w.chart.clone(),
                    };
                    out.add_term(word, c.clone() * sign / denom.clone());
                }
            }
        }
        out
    }

    /// Projection onto the subalgebra with no quotient-frame factor and no
    /// symmetric factor.
    pub fn sigma(&self, e: &Element) -> Element {
        let lo = self.frame.lam_id(self.r_a);
        let hi = self.frame.lam_id(self.r_a) + self.frame.r as u16;
        e.filter_terms(|w| w.sym_degree() == 0 && w.count_ext_in(lo, hi) == 0)
    }

    /// Embedding of that subalgebra; the identity on its image.
    pub fn tau(&self, e: &Element) -> Element {
        e.clone()
    }
}

/// The horizontal differential of the presentation: Chevalley-Eilenberg on
/// the frame duals, the connection on symmetric generators, the anchor on
/// chart variables. Theta and psi stay inert here; their transport appears
/// only in the Lie-derivative extension of Q.
pub fn d_nabla(pair: &LiePair, trunc: Trunc) -> Derivation {
    let frame = pair.frame();
    let l = pair.l();
    let half = Ratio::new(1.into(), 2.into());
    let mut d = Derivation::zero(frame, trunc, 1);
    for k in 0..l {
        let mut img = Element::zero(frame, trunc);
        for i in 0..l {
            for j in 0..l {
                let c = pair.struc(i, j, k);
                if c.is_zero() {
                    continue;
                }
                let li = Element::gen(frame, trunc, Gen::Odd(frame.lam_id(i)));
                let lj = Element::gen(frame, trunc, Gen::Odd(frame.lam_id(j)));
                img += (&(&li * &lj) * &c.embed_chart(frame, trunc)).scale(&-half.clone());
            }
        }
        d.set_image(Gen::Odd(frame.lam_id(k)), img).expect("same frame");
    }
    for k in 0..frame.r {
        let mut img = Element::zero(frame, trunc);
        for i in 0..l {
            for j in 0..frame.r {
                let g = pair.gamma(i, j, k);
                if g.is_zero() {
                    continue;
                }
                let li = Element::gen(frame, trunc, Gen::Odd(frame.lam_id(i)));
                let chi = Element::gen(frame, trunc, Gen::Sym(j));
                img += (&(&li * &chi) * &g.embed_chart(frame, trunc)).scale(&-Ratio::one());
            }
        }
        d.set_image(Gen::Sym(k), img).expect("same frame");
    }
    for t in 0..pair.chart_dim() {
        let mut img = Element::zero(frame, trunc);
        for i in 0..l {
            let rho = pair.anchor_coeff(i, t);
            if rho.is_zero() {
                continue;
            }
            let li = Element::gen(frame, trunc, Gen::Odd(frame.lam_id(i)));
            img += &li * &rho.embed_chart(frame, trunc);
        }
        d.set_image(Gen::Chart(t), img).expect("same frame");
    }
    d
}

/// Chevalley-Eilenberg differential of the subalgebroid acting on its own
/// duals, on chart functions through the anchor, and on the psi/theta banks
/// through the induced flat action on the quotient and its contragredient.
/// This is the expected transferred differential on the small complex.
pub fn bott_module_differential(pair: &LiePair, trunc: Trunc) -> Derivation {
    let frame = pair.frame();
    let r_a = pair.r_a();
    let half = Ratio::new(1.into(), 2.into());
    let mut d = Derivation::zero(frame, trunc, 1);
    for k in 0..r_a {
        let mut img = Element::zero(frame, trunc);
        for i in 0..r_a {
            for j in 0..r_a {
                let c = pair.struc(i, j, k);
                if c.is_zero() {
                    continue;
                }
                let li = Element::gen(frame, trunc, Gen::Odd(frame.lam_id(i)));
                let lj = Element::gen(frame, trunc, Gen::Odd(frame.lam_id(j)));
                img += (&(&li * &lj) * &c.embed_chart(frame, trunc)).scale(&-half.clone());
            }
        }
        d.set_image(Gen::Odd(frame.lam_id(k)), img).expect("same frame");
    }
    for t in 0..pair.chart_dim() {
        let mut img = Element::zero(frame, trunc);
        for a in 0..r_a {
            let rho = pair.anchor_coeff(a, t);
            if rho.is_zero() {
                continue;
            }
            let la = Element::gen(frame, trunc, Gen::Odd(frame.lam_id(a)));
            img += &la * &rho.embed_chart(frame, trunc);
        }
        d.set_image(Gen::Chart(t), img).expect("same frame");
    }
    for k in 0..frame.r {
        let mut img = Element::zero(frame, trunc);
        for a in 0..r_a {
            for m in 0..frame.r {
                let g = pair.gamma(a, k, m);
                if g.is_zero() {
                    continue;
                }
                let la = Element::gen(frame, trunc, Gen::Odd(frame.lam_id(a)));
                let psi_m = Element::gen(frame, trunc, Gen::Odd(frame.psi_id(m)));
                img += &(&la * &psi_m) * &g.embed_chart(frame, trunc);
            }
        }
        d.set_image(Gen::Odd(frame.psi_id(k)), img).expect("same frame");
    }
    for m in 0..frame.r {
        let mut img = Element::zero(frame, trunc);
        for a in 0..r_a {
            for k in 0..frame.r {
                let g = pair.gamma(a, k, m);
                if g.is_zero() {
                    continue;
                }
                let la = Element::gen(frame, trunc, Gen::Odd(frame.lam_id(a)));
                let tht_k = Element::gen(frame, trunc, Gen::Odd(frame.tht_id(k)));
                img += (&(&la * &tht_k) * &g.embed_chart(frame, trunc)).scale(&-Ratio::one());
            }
        }
        d.set_image(Gen::Odd(frame.tht_id(m)), img).expect("same frame");
    }
    d
}

/// Everything the flattening recursion produces, kept alongside the
/// ingredients for downstream consumers.
pub struct Flattening {
    pub pair: LiePair,
    pub order: u32,
    pub trunc: Trunc,
    pub contraction: KoszulContraction,
    pub delta: Derivation,
    pub d_nabla: Derivation,
    /// Corrections by symmetric degree: x_terms[k] has degree k, with the
    /// slots below 2 identically zero.
    pub x_terms: Vec<Derivation>,
    /// The summed correction.
    pub x_nabla: Derivation,
    /// Q = -delta + d_nabla + x_nabla.
    pub q: Derivation,
}

/// Runs the recursion at the given symmetric order. The presentation must
/// be torsion-free; repair it first if it is not.
pub fn flatten(pair: &LiePair, order: u32) -> Result<Flattening> {
    if order < 2 {
        return Err(Error::precondition("flattening order must be at least 2"));
    }
    if !pair.is_torsion_free() {
        return Err(Error::precondition(
            "connection has torsion; apply the -T/2 repair before flattening",
        ));
    }
    let frame = pair.frame();
    let trunc = Trunc::AtMost(order);
    let kos = KoszulContraction::new(frame, pair.r_a());
    let delta = kos.delta(trunc);
    let d = d_nabla(pair, trunc);

    let zero_d = |deg: i32| Derivation::zero(frame, trunc, deg);
    let mut x_terms: Vec<Derivation> = vec![zero_d(1), zero_d(1)];

    // Degree 2 seed: contract the square of the horizontal differential.
    let mut x2 = zero_d(1);
    for m in 0..frame.r {
        let chi = Element::gen(frame, trunc, Gen::Sym(m));
        let img = kos.h(&d.apply(&d.apply(&chi)));
        x2.set_image(Gen::Sym(m), img)?;
    }
    x_terms.push(x2);

    for next in 3..=order as usize {
        let mut xn = zero_d(1);
        for m in 0..frame.r {
            let chi = Element::gen(frame, trunc, Gen::Sym(m));
            let prev = &x_terms[next - 1];
            let mut arg = d.apply(&prev.apply(&chi));
            arg += prev.apply(&d.apply(&chi));
            for p in 2..=(next - 2) {
                let q = next - p;
                if q < 2 {
                    continue;
                }
                arg += x_terms[p].apply(&x_terms[q].apply(&chi));
            }
            xn.set_image(Gen::Sym(m), kos.h(&arg))?;
        }
        x_terms.push(xn);
    }

    let mut x_nabla = zero_d(1);
    for xk in &x_terms {
        x_nabla = x_nabla.add(xk)?;
    }
    let q = delta
        .scale(&-Ratio::one())
        .add(&d)?
        .add(&x_nabla)?;
    Ok(Flattening {
        pair: pair.clone(),
        order,
        trunc,
        contraction: kos,
        delta,
        d_nabla: d,
        x_terms,
        x_nabla,
        q,
    })
}

impl Flattening {
    pub fn frame(&self) -> FrameSpec {
        self.pair.frame()
    }

    /// Extends Q to the psi and theta banks by its linearization: psi
    /// transforms as a vertical frame, theta as the dual frame, via the
    /// symmetric-partial matrix of the chi-images.
    pub fn lie_extension(&self) -> Derivation {
        let frame = self.frame();
        let mut ext = Derivation::zero(frame, self.trunc, 1);
        let gens: Vec<Gen> = (0..frame.n_odd() as u16)
            .map(Gen::Odd)
            .chain((0..frame.r).map(Gen::Sym))
            .chain((0..frame.chart).map(Gen::Chart))
            .collect();
        for g in gens {
            ext.set_image(g, self.q.image(g).clone()).expect("same frame");
        }
        for k in 0..frame.r {
            let mut psi_img = Element::zero(frame, self.trunc);
            for m in 0..frame.r {
                let jac = self.q.image(Gen::Sym(m)).sym_derivative(k);
                if jac.is_zero() {
                    continue;
                }
                let psi_m = Element::gen(frame, self.trunc, Gen::Odd(frame.psi_id(m)));
                psi_img += (&jac * &psi_m).scale(&-Ratio::one());
            }
            ext.set_image(Gen::Odd(frame.psi_id(k)), psi_img)
                .expect("same frame");
        }
        for m in 0..frame.r {
            let mut tht_img = Element::zero(frame, self.trunc);
            for k in 0..frame.r {
                let jac = self.q.image(Gen::Sym(m)).sym_derivative(k);
                if jac.is_zero() {
                    continue;
                }
                let tht_k = Element::gen(frame, self.trunc, Gen::Odd(frame.tht_id(k)));
                tht_img += &jac * &tht_k;
            }
            ext.set_image(Gen::Odd(frame.tht_id(m)), tht_img)
                .expect("same frame");
        }
        ext
    }

    /// Q composed with itself on every generator, cut below the order where
    /// the recursion stops resolving; all entries must vanish.
    pub fn q_square_residual(&self) -> Vec<(Gen, Element)> {
        self.q
            .square_on_gens()
            .into_iter()
            .map(|(g, e)| (g, e.truncate(self.order - 1)))
            .collect()
    }

    pub fn is_flat(&self) -> bool {
        self.q_square_residual().iter().all(|(_, e)| e.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Trunc;
    use crate::scalar::{int, rat};

    fn sl2_frame() -> (LiePair, FrameSpec) {
        let p = LiePair::sl2_span_e();
        let f = p.frame();
        (p, f)
    }

    fn battery(frame: FrameSpec, trunc: Trunc) -> Vec<Element> {
        // A deterministic spread of words touching every bank.
        let lam = |i: usize| Element::gen(frame, trunc, Gen::Odd(frame.lam_id(i)));
        let tht = |k: usize| Element::gen(frame, trunc, Gen::Odd(frame.tht_id(k)));
        let chi = |k: usize| Element::gen(frame, trunc, Gen::Sym(k));
        let one = Element::one(frame, trunc);
        vec![
            one.clone(),
            lam(0),
            lam(1),
            &lam(0) * &lam(2),
            chi(0),
            &chi(0) * &chi(1),
            &lam(1) * &chi(0),
            &(&lam(0) * &lam(1)) * &(&chi(1) * &chi(1)),
            &(&lam(2) * &tht(0)) * &chi(0),
            &(&(&lam(0) * &lam(1)) * &lam(2)) * &(&chi(0) * &(&chi(1) * &chi(1))),
            &(&tht(1) * &lam(1)) * &(&chi(0) * &chi(0)),
            &(&one + &lam(1)) * &(&chi(1) + &(&lam(0) * &chi(0))),
        ]
    }

    #[test]
    fn contraction_identities() {
        let (pair, frame) = sl2_frame();
        let trunc = Trunc::AtMost(6);
        let kos = KoszulContraction::new(frame, pair.r_a());
        let delta = kos.delta(trunc);
        for e in battery(frame, trunc) {
            let st = kos.sigma(&kos.tau(&e));
            // sigma tau = id holds on the small subalgebra.
            if e == kos.sigma(&e) {
                assert_eq!(st, e);
                assert!(kos.h(&kos.tau(&e)).is_zero());
            }
            assert!(kos.sigma(&kos.h(&e)).is_zero());
            assert!(kos.h(&kos.h(&e)).is_zero());
            let lhs = &kos.h(&delta.apply(&e)) + &delta.apply(&kos.h(&e));
            let rhs = &e - &kos.tau(&kos.sigma(&e));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn torsion_detects_in_commutator() {
        let (pair, frame) = sl2_frame();
        let trunc = Trunc::AtMost(4);
        let kos = KoszulContraction::new(frame, pair.r_a());
        let delta = kos.delta(trunc);
        let d = d_nabla(&pair, trunc);
        let comm = delta.commutator(&d).unwrap();
        for e in battery(frame, trunc) {
            assert!(comm.apply(&e).is_zero());
        }
        // A torsionful extension fails the same commutator test.
        let skew = crate::liepair::LiePairBuilder::new(crate::liepair::Base::Point, 3, 1)
            .bracket_const(0, 1, 0, -2)
            .bracket_const(0, 2, 1, 1)
            .bracket_const(1, 2, 2, -2)
            .connection_const(1, 1, 1, 3)
            .build()
            .unwrap();
        assert!(!skew.is_torsion_free());
        let d_skew = d_nabla(&skew, trunc);
        let comm_skew = delta.commutator(&d_skew).unwrap();
        let probe = Element::gen(frame, trunc, Gen::Sym(1));
        assert!(!comm_skew.apply(&probe).is_zero());
    }

    #[test]
    fn seed_correction_matches_hand_computation() {
        let (pair, frame) = sl2_frame();
        let flat = flatten(&pair, 6).unwrap();
        let trunc = flat.trunc;
        let lam = |i: usize| Element::gen(frame, trunc, Gen::Odd(frame.lam_id(i)));
        let chi = |k: usize| Element::gen(frame, trunc, Gen::Sym(k));
        let x2 = &flat.x_terms[2];
        // X_2(chi_1) = 2 lam_1 chi_1 chi_2.
        let expect0 = (&(&lam(0) * &chi(0)) * &chi(1)).scale(&int(2));
        assert_eq!(*x2.image(Gen::Sym(0)), expect0);
        // X_2(chi_2) = -(4/3) lam_3 chi_1^2 + (4/3) lam_2 chi_1 chi_2
        //              - lam_1 chi_2^2.
        let expect1 = &(&(&(&lam(2) * &(&chi(0) * &chi(0))).scale(&rat(-4, 3))
            + &(&lam(1) * &(&chi(0) * &chi(1))).scale(&rat(4, 3)))
            - &(&lam(0) * &(&chi(1) * &chi(1))))
            * &Element::one(frame, trunc);
        assert_eq!(*x2.image(Gen::Sym(1)), expect1);
        // The corrections live in the image of the homotopy: h X = 0.
        for xk in &flat.x_terms {
            for k in 0..frame.r {
                assert!(flat.contraction.h(xk.image(Gen::Sym(k))).is_zero());
            }
        }
        // Each correction is homogeneous of its symmetric degree.
        for (deg, xk) in flat.x_terms.iter().enumerate() {
            for k in 0..frame.r {
                let img = xk.image(Gen::Sym(k));
                assert!(img.terms().all(|(w, _)| w.sym_degree() == deg as u32));
            }
        }
    }

    #[test]
    fn sl2_flattens() {
        let pair = LiePair::sl2_span_e();
        let flat = flatten(&pair, 6).unwrap();
        for (g, e) in flat.q_square_residual() {
            assert!(e.is_zero(), "residual at {:?}: {:?}", g, e);
        }
    }

    #[test]
    fn abelian_needs_no_correction() {
        let pair = LiePair::abelian(3, 1);
        let flat = flatten(&pair, 4).unwrap();
        assert!(flat.x_nabla.is_zero());
        assert!(flat.is_flat());
    }

    #[test]
    fn degenerate_full_subalgebroid() {
        // r = 0: delta and h vanish, Q is the plain frame differential.
        let pair = LiePair::abelian(2, 2);
        let flat = flatten(&pair, 2).unwrap();
        assert!(flat.is_flat());
        assert!(flat.x_nabla.is_zero());
    }

    #[test]
    fn chart_pair_flattens() {
        let pair = LiePair::poly_chart_example();
        let flat = flatten(&pair, 4).unwrap();
        assert!(flat.is_flat());
    }

    #[test]
    fn torsion_is_rejected() {
        let skew = crate::liepair::LiePairBuilder::new(crate::liepair::Base::Point, 3, 1)
            .bracket_const(0, 1, 0, -2)
            .bracket_const(0, 2, 1, 1)
            .bracket_const(1, 2, 2, -2)
            .build()
            .unwrap();
        assert!(matches!(flatten(&skew, 4), Err(Error::Precondition(_))));
        assert!(flatten(&skew.make_torsion_free(), 4).is_ok());
    }
}
