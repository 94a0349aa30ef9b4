//! Presentations of Lie pairs in an adapted frame: an ambient Lie algebroid
//! of rank l over a point or a polynomial chart, a subalgebroid spanned by
//! the first r_a frame sections, and an extension of the Bott connection on
//! the quotient.

use crate::error::{Error, Result};
use crate::scalar::Ratio;
use crate::sym_poly::SymPoly;
use crate::word::FrameSpec;
use num_traits::{One, Zero};

/// Underlying base of the presentation. Chart coefficients are polynomials
/// in `dim` variables; over a point they are constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Base {
    Point,
    PolyChart { dim: usize },
}

impl Base {
    pub fn chart_dim(&self) -> usize {
        match self {
            Base::Point => 0,
            Base::PolyChart { dim } => *dim,
        }
    }
}

/// Validated Lie pair presentation. Index conventions: frame sections are
/// indexed 0..l with the first r_a spanning the subalgebroid; quotient
/// indices run 0..r with r = l - r_a, the j-th quotient generator being the
/// class of frame section r_a + j.
#[derive(Clone)]
pub struct LiePair {
    base: Base,
    l: usize,
    r_a: usize,
    names: Vec<String>,
    struc: Vec<SymPoly>,      // (i*l + j)*l + k -> c_{ij}^k
    anchor: Vec<SymPoly>,     // i*chart + t -> rho_{it}
    connection: Vec<SymPoly>, // (i*r + j)*r + k -> Gamma_{ij}^k, j,k quotient
}

pub struct LiePairBuilder {
    base: Base,
    l: usize,
    r_a: usize,
    names: Vec<String>,
    struc: Vec<SymPoly>,
    anchor: Vec<SymPoly>,
    connection: Vec<Option<SymPoly>>,
}

impl LiePairBuilder {
    pub fn new(base: Base, l: usize, r_a: usize) -> Self {
        let chart = base.chart_dim();
        let r = l.saturating_sub(r_a);
        LiePairBuilder {
            base,
            l,
            r_a,
            names: (1..=l).map(|i| format!("eta{i}")).collect(),
            struc: vec![SymPoly::zero(chart); l * l * l],
            anchor: vec![SymPoly::zero(chart); l * chart],
            connection: vec![None; l * r * r],
        }
    }

    pub fn names(mut self, names: Vec<String>) -> Self {
        self.names = names;
        self
    }

    /// Records c_{ij}^k = p and c_{ji}^k = -p.
    pub fn bracket(mut self, i: usize, j: usize, k: usize, p: SymPoly) -> Self {
        let l = self.l;
        self.struc[(i * l + j) * l + k] = p.clone();
        self.struc[(j * l + i) * l + k] = p.scale(&-Ratio::one());
        self
    }

    pub fn bracket_const(self, i: usize, j: usize, k: usize, v: i64) -> Self {
        let chart = self.base.chart_dim();
        self.bracket(i, j, k, SymPoly::constant(chart, Ratio::from_integer(v.into())))
    }

    pub fn anchor(mut self, i: usize, t: usize, p: SymPoly) -> Self {
        let chart = self.base.chart_dim();
        self.anchor[i * chart + t] = p;
        self
    }

    pub fn connection(mut self, i: usize, j: usize, k: usize, p: SymPoly) -> Self {
        let r = self.l - self.r_a;
        self.connection[(i * r + j) * r + k] = Some(p);
        self
    }

    pub fn connection_const(self, i: usize, j: usize, k: usize, v: i64) -> Self {
        let chart = self.base.chart_dim();
        self.connection(i, j, k, SymPoly::constant(chart, Ratio::from_integer(v.into())))
    }

    pub fn build(self) -> Result<LiePair> {
        let LiePairBuilder {
            base,
            l,
            r_a,
            names,
            struc,
            anchor,
            connection,
        } = self;
        if r_a > l {
            return Err(Error::validation(format!(
                "subalgebroid rank {r_a} exceeds ambient rank {l}"
            )));
        }
        if names.len() != l {
            return Err(Error::validation(format!(
                "expected {l} frame names, got {}",
                names.len()
            )));
        }
        let r = l - r_a;
        // Resolve the connection: rows below r_a are forced to the Bott
        // values; explicit entries there must agree.
        let mut conn = vec![SymPoly::zero(base.chart_dim()); l * r * r];
        for i in 0..l {
            for j in 0..r {
                for k in 0..r {
                    let slot = (i * r + j) * r + k;
                    let user = connection[slot].clone();
                    if i < r_a {
                        let bott = struc[(i * l + (r_a + j)) * l + (r_a + k)].clone();
                        if let Some(u) = user {
                            if u != bott {
                                return Err(Error::validation(format!(
                                    "connection entry ({i},{j},{k}) conflicts \
                                     with the induced flat action"
                                )));
                            }
                        }
                        conn[slot] = bott;
                    } else if let Some(u) = user {
                        conn[slot] = u;
                    }
                }
            }
        }
        let pair = LiePair {
            base,
            l,
            r_a,
            names,
            struc,
            anchor,
            connection: conn,
        };
        pair.validate()?;
        Ok(pair)
    }
}

impl LiePair {
    pub fn base(&self) -> Base {
        self.base
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn r_a(&self) -> usize {
        self.r_a
    }

    /// Rank of the quotient bundle.
    pub fn r(&self) -> usize {
        self.l - self.r_a
    }

    pub fn chart_dim(&self) -> usize {
        self.base.chart_dim()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn frame(&self) -> FrameSpec {
        FrameSpec::new(self.l, self.r(), self.chart_dim())
    }

    pub fn struc(&self, i: usize, j: usize, k: usize) -> &SymPoly {
        &self.struc[(i * self.l + j) * self.l + k]
    }

    pub fn anchor_coeff(&self, i: usize, t: usize) -> &SymPoly {
        &self.anchor[i * self.chart_dim() + t]
    }

    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &SymPoly {
        let r = self.r();
        &self.connection[(i * r + j) * r + k]
    }

    /// Applies the anchor vector field of frame section i to a chart
    /// polynomial.
    pub fn anchor_apply(&self, i: usize, f: &SymPoly) -> SymPoly {
        let mut out = SymPoly::zero(self.chart_dim());
        for t in 0..self.chart_dim() {
            out = out.add(&self.anchor_coeff(i, t).mul(&f.derivative(t)));
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let l = self.l;
        // Diagonal brackets vanish.
        for i in 0..l {
            for k in 0..l {
                if !self.struc(i, i, k).is_zero() {
                    return Err(Error::validation(format!(
                        "nonzero bracket [{0},{0}]",
                        self.names[i]
                    )));
                }
            }
        }
        // The subalgebroid is closed under the bracket.
        for i in 0..self.r_a {
            for j in 0..self.r_a {
                for k in self.r_a..l {
                    if !self.struc(i, j, k).is_zero() {
                        return Err(Error::validation(format!(
                            "[{},{}] leaves the subalgebroid",
                            self.names[i], self.names[j]
                        )));
                    }
                }
            }
        }
        // Jacobi identity, corrected by the anchor action on coefficients.
        for a in 0..l {
            for b in 0..l {
                for c in 0..l {
                    for t in 0..l {
                        let mut acc = SymPoly::zero(self.chart_dim());
                        for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                            for m in 0..l {
                                acc = acc.add(&self.struc(x, y, m).mul(self.struc(m, z, t)));
                            }
                            acc = acc.sub(&self.anchor_apply(z, self.struc(x, y, t)));
                        }
                        if !acc.is_zero() {
                            return Err(Error::validation(format!(
                                "Jacobi identity fails on ({},{},{})",
                                self.names[a], self.names[b], self.names[c]
                            )));
                        }
                    }
                }
            }
        }
        // The anchor is a morphism to vector fields.
        for i in 0..l {
            for j in 0..l {
                for t in 0..self.chart_dim() {
                    let mut lhs = SymPoly::zero(self.chart_dim());
                    for m in 0..l {
                        lhs = lhs.add(&self.struc(i, j, m).mul(self.anchor_coeff(m, t)));
                    }
                    let rhs = self
                        .anchor_apply(i, self.anchor_coeff(j, t))
                        .sub(&self.anchor_apply(j, self.anchor_coeff(i, t)));
                    if lhs != rhs {
                        return Err(Error::validation(format!(
                            "anchor fails the morphism identity on ([{},{}], x{})",
                            self.names[i],
                            self.names[j],
                            t + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Curvature of the connection in quotient directions i1, i2 as an
    /// r x r matrix of chart polynomials, rows = output index, cols = input.
    pub fn curvature(&self, i1: usize, i2: usize) -> Vec<Vec<SymPoly>> {
        let r = self.r();
        let chart = self.chart_dim();
        let mut out = vec![vec![SymPoly::zero(chart); r]; r];
        for j in 0..r {
            for k in 0..r {
                let mut v = self
                    .anchor_apply(i1, self.gamma(i2, j, k))
                    .sub(&self.anchor_apply(i2, self.gamma(i1, j, k)));
                for m in 0..r {
                    v = v.add(&self.gamma(i2, j, m).mul(self.gamma(i1, m, k)));
                    v = v.sub(&self.gamma(i1, j, m).mul(self.gamma(i2, m, k)));
                }
                for m in 0..self.l {
                    v = v.sub(&self.struc(i1, i2, m).mul(self.gamma(m, j, k)));
                }
                out[k][j] = v;
            }
        }
        out
    }

    /// Torsion in quotient directions: T_{jk}^m for quotient indices j, k.
    pub fn torsion(&self) -> Vec<SymPoly> {
        let r = self.r();
        let r_a = self.r_a;
        let mut out = vec![SymPoly::zero(self.chart_dim()); r * r * r];
        for j in 0..r {
            for k in 0..r {
                for m in 0..r {
                    let v = self
                        .gamma(r_a + j, k, m)
                        .sub(self.gamma(r_a + k, j, m))
                        .sub(self.struc(r_a + j, r_a + k, r_a + m));
                    out[(j * r + k) * r + m] = v;
                }
            }
        }
        out
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion().iter().all(SymPoly::is_zero)
    }

    /// Shifts the free rows of the connection by -T/2, killing the torsion
    /// while leaving the induced flat part untouched.
    pub fn make_torsion_free(&self) -> LiePair {
        let r = self.r();
        let r_a = self.r_a;
        let torsion = self.torsion();
        let half = Ratio::new(1.into(), 2.into());
        let mut out = self.clone();
        for j in 0..r {
            for k in 0..r {
                for m in 0..r {
                    let slot = ((r_a + j) * r + k) * r + m;
                    let t = &torsion[(j * r + k) * r + m];
                    out.connection[slot] =
                        out.connection[slot].sub(&t.scale(&half));
                }
            }
        }
        out
    }

    /// True when the quotient frame brackets stay in the quotient span, so
    /// the complement carries its own bracket.
    pub fn is_matched(&self) -> bool {
        for i in self.r_a..self.l {
            for j in self.r_a..self.l {
                for k in 0..self.r_a {
                    if !self.struc(i, j, k).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Structure constants of the complement bracket for a matched pair over
    /// a point.
    pub fn b_structure(&self) -> Result<crate::uea::LieStructure> {
        if self.base != Base::Point {
            return Err(Error::precondition(
                "complement bracket needs a point base",
            ));
        }
        if !self.is_matched() {
            return Err(Error::precondition(
                "complement carries no bracket: the pair is not matched",
            ));
        }
        let r = self.r();
        let mut ls = crate::uea::LieStructure::new(r);
        for i in 0..r {
            for j in (i + 1)..r {
                for k in 0..r {
                    let c = self
                        .struc(self.r_a + i, self.r_a + j, self.r_a + k)
                        .constant_term();
                    if !c.is_zero() {
                        ls.set_bracket_term(i, j, k, c);
                    }
                }
            }
        }
        Ok(ls)
    }

    /// Structure constants of the full frame algebra over a point.
    pub fn full_structure(&self) -> Result<crate::uea::LieStructure> {
        if self.base != Base::Point {
            return Err(Error::precondition(
                "constant structure needs a point base",
            ));
        }
        let mut ls = crate::uea::LieStructure::new(self.l);
        for i in 0..self.l {
            for j in (i + 1)..self.l {
                for k in 0..self.l {
                    let c = self.struc(i, j, k).constant_term();
                    if !c.is_zero() {
                        ls.set_bracket_term(i, j, k, c);
                    }
                }
            }
        }
        Ok(ls)
    }

    // ---- stock examples ----

    /// sl2 with the nilpotent line: basis (e, h, f), subalgebroid span{e},
    /// torsion-free connection.
    pub fn sl2_span_e() -> LiePair {
        LiePairBuilder::new(Base::Point, 3, 1)
            .names(vec!["e".into(), "h".into(), "f".into()])
            .bracket_const(0, 1, 0, -2)
            .bracket_const(0, 2, 1, 1)
            .bracket_const(1, 2, 2, -2)
            .connection_const(2, 0, 1, 2)
            .build()
            .expect("stock pair is valid")
    }

    /// sl2 with the Cartan line: basis (h, e, f), subalgebroid span{h}.
    /// Not matched: [e, f] = h falls back into the subalgebroid.
    pub fn sl2_span_h() -> LiePair {
        LiePairBuilder::new(Base::Point, 3, 1)
            .names(vec!["h".into(), "e".into(), "f".into()])
            .bracket_const(0, 1, 1, 2)
            .bracket_const(0, 2, 2, -2)
            .bracket_const(1, 2, 0, 1)
            .build()
            .expect("stock pair is valid")
    }

    /// Two-dimensional solvable algebra, basis (a, b) with [a,b] = b and
    /// subalgebroid span{a}.
    pub fn solvable2() -> LiePair {
        LiePairBuilder::new(Base::Point, 2, 1)
            .names(vec!["a".into(), "b".into()])
            .bracket_const(0, 1, 1, 1)
            .build()
            .expect("stock pair is valid")
    }

    /// Abelian algebra of rank l with the first r_a directions as the
    /// subalgebroid.
    pub fn abelian(l: usize, r_a: usize) -> LiePair {
        LiePairBuilder::new(Base::Point, l, r_a)
            .build()
            .expect("stock pair is valid")
    }

    /// Rank-2 action algebroid on a one-dimensional chart: the affine
    /// vector fields x d/dx and d/dx.
    pub fn poly_chart_example() -> LiePair {
        let base = Base::PolyChart { dim: 1 };
        LiePairBuilder::new(base, 2, 1)
            .names(vec!["eta1".into(), "eta2".into()])
            .bracket_const(0, 1, 1, -1)
            .anchor(0, 0, SymPoly::var(1, 0))
            .anchor(1, 0, SymPoly::one(1))
            .build()
            .expect("stock pair is valid")
    }
}
