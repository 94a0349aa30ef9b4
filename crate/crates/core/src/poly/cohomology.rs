//! Exact cohomology of the two quotient complexes on finite filtered
//! pieces: total ranks with representatives, columnwise subalgebroid
//! ranks, and the rank comparison induced by skew-symmetrization.
//!
//! On the operator side the total complex is computed in its normalized
//! form: words holding the class of 1 in some slot span an acyclic
//! direction, and dropping them leaves the same cohomology on each finite
//! filtered piece while making every degree finite-dimensional. Both
//! coboundaries preserve the filtration weight or lower it, so the filtered
//! piece is an honest subcomplex and the reported ranks are exact.

use itertools::Itertools;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;

use crate::element::{Element, Trunc};
use crate::error::{Error, Result};
use crate::fedosov::bott_module_differential;
use crate::liepair::LiePair;
use crate::linalg::Matrix;
use crate::multi_index::MultiIndex;
use crate::poly::dpoly::{DComplex, DElement, DWord};
use crate::scalar::Ratio;
use crate::word::{FrameSpec, Word};

/// Which of the two models of the quotient to resolve.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    /// Polyvectors: dual words of the subalgebroid wedged with quotient
    /// directions, carrying the flat module differential only.
    Polyvector,
    /// Polydifferential operators: dual words tensored with quotient
    /// monomial slots, carrying the total double-complex coboundary.
    Polydifferential,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Polyvector => write!(f, "T"),
            Side::Polydifferential => write!(f, "D"),
        }
    }
}

/// Inclusive range of total degrees. Degree -1 holds the scalars.
#[derive(Clone, Copy, Debug)]
pub struct Window {
    pub k_min: i64,
    pub k_max: i64,
}

impl Window {
    pub fn new(k_min: i64, k_max: i64) -> Self {
        Window { k_min, k_max }
    }

    fn degrees(&self) -> impl Iterator<Item = i64> {
        self.k_min..=self.k_max
    }
}

/// A cocycle spanning one reported cohomology class.
#[derive(Clone)]
pub enum Representative {
    Polyvector(Element),
    Polydifferential(DElement),
}

impl fmt::Debug for Representative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Representative::Polyvector(e) => write!(f, "{:?}", e),
            Representative::Polydifferential(e) => write!(f, "{:?}", e),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DegreeRanks {
    pub degree: i64,
    pub cochain_dim: usize,
    pub rank: usize,
    pub representatives: Vec<Representative>,
}

#[derive(Debug)]
pub struct CohomologyTable {
    pub side: Side,
    pub cutoff: u32,
    pub degrees: Vec<DegreeRanks>,
}

/// Rank data of the skew-symmetrization map on one total degree.
#[derive(Clone, Copy, Debug)]
pub struct HkrDegree {
    pub degree: i64,
    pub dim_polyvector: usize,
    pub dim_polydifferential: usize,
    pub induced_rank: usize,
}

fn require_point_base(pair: &LiePair) -> Result<()> {
    if pair.frame().chart != 0 {
        return Err(Error::precondition(
            "rank tables need a point base: chart coefficients are not finitely spanned",
        ));
    }
    Ok(())
}

fn guard_window(pair: &LiePair, side: Side, window: Window, cutoff: u32) -> Result<()> {
    require_point_base(pair)?;
    if window.k_min > window.k_max {
        return Err(Error::precondition("empty degree window"));
    }
    let r_a = pair.r_a() as i64;
    let top = match side {
        Side::Polyvector => r_a + pair.r() as i64 - 1,
        Side::Polydifferential => r_a + cutoff as i64 - 1,
    };
    if window.k_max > top {
        return Err(Error::precondition(
            "degree window exceeds what the filtration cutoff resolves",
        ));
    }
    Ok(())
}

/// Polyvector basis of one total degree: dual subsets of the subalgebroid
/// wedged with subsets of the quotient directions.
fn t_basis(frame: FrameSpec, r_a: usize, k: i64) -> Vec<Word> {
    let r = frame.r;
    let mut out = Vec::new();
    for p in 0..=r_a {
        let n = k - p as i64 + 1;
        if n < 0 || n > r as i64 {
            continue;
        }
        for duals in (0..r_a).combinations(p) {
            for dirs in (0..r).combinations(n as usize) {
                let mut ext: Vec<u16> = duals.iter().map(|&i| frame.lam_id(i)).collect();
                ext.extend(dirs.iter().map(|&m| frame.psi_id(m)));
                out.push(Word {
                    ext,
                    sym: MultiIndex::zero(r),
                    chart: MultiIndex::zero(frame.chart),
                });
            }
        }
    }
    out
}

/// All slot tuples of the given length with every slot of positive degree
/// and total degree within the budget.
fn slot_tuples(r: usize, n: usize, budget: u32) -> Vec<Vec<MultiIndex>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    if (n as u32) > budget {
        return Vec::new();
    }
    let mut out = Vec::new();
    for d in 1..=(budget - (n as u32 - 1)) {
        for head in MultiIndex::of_degree(r, d) {
            for tail in slot_tuples(r, n - 1, budget - d) {
                let mut v = Vec::with_capacity(n);
                v.push(head.clone());
                v.extend(tail);
                out.push(v);
            }
        }
    }
    out
}

/// Normalized operator basis of one total degree under the weight cutoff.
fn d_basis(r_a: usize, r: usize, k: i64, cutoff: u32) -> Vec<DWord> {
    let mut out = Vec::new();
    for p in 0..=r_a {
        let n = k - p as i64 + 1;
        if n < 0 {
            continue;
        }
        for duals in (0..r_a).combinations(p) {
            let ext: Vec<u8> = duals.iter().map(|&i| i as u8).collect();
            for slots in slot_tuples(r, n as usize, cutoff) {
                let e = DElement::from_parts(r_a, r, &ext, slots, Ratio::one());
                let (w, _) = e.terms().next().expect("single basis term");
                out.push(w.clone());
            }
        }
    }
    out
}

fn t_matrix(
    pair: &LiePair,
    domain: &[Word],
    target: &[Word],
) -> Matrix {
    let frame = pair.frame();
    let bott = bott_module_differential(pair, Trunc::Unbounded);
    let index: BTreeMap<&Word, usize> = target.iter().zip(0..).collect();
    let mut m = Matrix::zeros(target.len(), domain.len());
    for (j, w) in domain.iter().enumerate() {
        let x = Element::from_term(frame, Trunc::Unbounded, w.clone(), Ratio::one());
        for (iw, c) in bott.apply(&x).terms() {
            let i = *index.get(iw).expect("image leaves the model");
            m.set(i, j, c.clone());
        }
    }
    m
}

fn d_matrix(cx: &DComplex, domain: &[DWord], target: &[DWord]) -> Matrix {
    let (r_a, r) = cx.ranks();
    let index: BTreeMap<&DWord, usize> = target.iter().zip(0..).collect();
    let mut m = Matrix::zeros(target.len(), domain.len());
    for (j, w) in domain.iter().enumerate() {
        let x = DElement::from_parts(r_a, r, w.ext(), w.slots().to_vec(), Ratio::one());
        for (iw, c) in cx.total_d(&x).normalized().terms() {
            let i = *index.get(iw).expect("image leaves the filtered piece");
            m.set(i, j, c.clone());
        }
    }
    m
}

/// Columns of `image` extended by the kernel vectors; returns the indices of
/// kernel vectors whose classes are independent of the image.
fn class_pivots(image: &Matrix, kernel: &[Vec<Ratio>], dim: usize) -> Vec<usize> {
    let mut ker = Matrix::zeros(dim, kernel.len());
    for (j, v) in kernel.iter().enumerate() {
        for (i, c) in v.iter().enumerate() {
            ker.set(i, j, c.clone());
        }
    }
    let stacked = image.hstack(&ker);
    let (_, pivots) = stacked.rref();
    pivots
        .into_iter()
        .filter(|&p| p >= image.n_cols())
        .map(|p| p - image.n_cols())
        .collect()
}

/// Ranks of total cohomology over the degree window, with one representative
/// cocycle per class.
pub fn cohomology(
    pair: &LiePair,
    side: Side,
    window: Window,
    cutoff: u32,
) -> Result<CohomologyTable> {
    guard_window(pair, side, window, cutoff)?;
    let frame = pair.frame();
    let r_a = pair.r_a();
    let r = pair.r();
    if side == Side::Polydifferential {
        DComplex::new(pair)?;
    }
    let degrees: Vec<i64> = window.degrees().collect();
    let entries: Result<Vec<DegreeRanks>> = degrees
        .par_iter()
        .map(|&k| match side {
            Side::Polyvector => {
                let below = t_basis(frame, r_a, k - 1);
                let here = t_basis(frame, r_a, k);
                let above = t_basis(frame, r_a, k + 1);
                let d_in = t_matrix(pair, &below, &here);
                let d_out = t_matrix(pair, &here, &above);
                let kernel = d_out.kernel_basis();
                let picks = class_pivots(&d_in, &kernel, here.len());
                let reps = picks
                    .iter()
                    .map(|&j| {
                        let mut e = Element::zero(frame, Trunc::Unbounded);
                        for (i, w) in here.iter().enumerate() {
                            if !kernel[j][i].is_zero() {
                                e += Element::from_term(
                                    frame,
                                    Trunc::Unbounded,
                                    w.clone(),
                                    kernel[j][i].clone(),
                                );
                            }
                        }
                        Representative::Polyvector(e)
                    })
                    .collect();
                Ok(DegreeRanks {
                    degree: k,
                    cochain_dim: here.len(),
                    rank: kernel.len() - d_in.rank(),
                    representatives: reps,
                })
            }
            Side::Polydifferential => {
                let cx = DComplex::new(pair)?;
                let below = d_basis(r_a, r, k - 1, cutoff);
                let here = d_basis(r_a, r, k, cutoff);
                let above = d_basis(r_a, r, k + 1, cutoff);
                let d_in = d_matrix(&cx, &below, &here);
                let d_out = d_matrix(&cx, &here, &above);
                let kernel = d_out.kernel_basis();
                let picks = class_pivots(&d_in, &kernel, here.len());
                let reps = picks
                    .iter()
                    .map(|&j| {
                        let mut e = DElement::zero(r_a, r);
                        for (i, w) in here.iter().enumerate() {
                            if !kernel[j][i].is_zero() {
                                e += DElement::from_parts(
                                    r_a,
                                    r,
                                    w.ext(),
                                    w.slots().to_vec(),
                                    kernel[j][i].clone(),
                                );
                            }
                        }
                        Representative::Polydifferential(e)
                    })
                    .collect();
                Ok(DegreeRanks {
                    degree: k,
                    cochain_dim: here.len(),
                    rank: kernel.len() - d_in.rank(),
                    representatives: reps,
                })
            }
        })
        .collect();
    Ok(CohomologyTable {
        side,
        cutoff,
        degrees: entries?,
    })
}

/// Columnwise subalgebroid cohomology: the slot count (polyvector count) is
/// frozen and only the module differential acts. The operator column keeps
/// every slot including the class of 1, so it is the honest module of that
/// column. Returns one rank per dual degree 0..=r_a.
pub fn ce_column_ranks(
    pair: &LiePair,
    side: Side,
    arity: usize,
    cutoff: u32,
) -> Result<Vec<usize>> {
    require_point_base(pair)?;
    let frame = pair.frame();
    let r_a = pair.r_a();
    let r = pair.r();
    match side {
        Side::Polyvector => {
            let bott = bott_module_differential(pair, Trunc::Unbounded);
            let blocks: Vec<Vec<Word>> = (0..=r_a)
                .map(|p| {
                    let mut out = Vec::new();
                    if arity <= r {
                        for duals in (0..r_a).combinations(p) {
                            for dirs in (0..r).combinations(arity) {
                                let mut ext: Vec<u16> =
                                    duals.iter().map(|&i| frame.lam_id(i)).collect();
                                ext.extend(dirs.iter().map(|&m| frame.psi_id(m)));
                                out.push(Word {
                                    ext,
                                    sym: MultiIndex::zero(r),
                                    chart: MultiIndex::zero(frame.chart),
                                });
                            }
                        }
                    }
                    out
                })
                .collect();
            let mats: Vec<Matrix> = (0..r_a)
                .map(|p| t_matrix_with(&bott, frame, &blocks[p], &blocks[p + 1]))
                .collect();
            Ok(column_ranks(&blocks.iter().map(Vec::len).collect::<Vec<_>>(), &mats))
        }
        Side::Polydifferential => {
            let cx = DComplex::new(pair)?;
            let tuples: Vec<Vec<MultiIndex>> = if arity == 0 {
                vec![Vec::new()]
            } else {
                // Every slot may hold any monomial, the class of 1 included.
                let mut out = Vec::new();
                let singles = MultiIndex::up_to_degree(r, cutoff);
                let mut stack: Vec<Vec<MultiIndex>> = vec![Vec::new()];
                for _ in 0..arity {
                    let mut next = Vec::new();
                    for partial in &stack {
                        let used: u32 = partial.iter().map(MultiIndex::total).sum();
                        for s in &singles {
                            if used + s.total() <= cutoff {
                                let mut v = partial.clone();
                                v.push(s.clone());
                                next.push(v);
                            }
                        }
                    }
                    stack = next;
                }
                out.extend(stack);
                out
            };
            let blocks: Vec<Vec<DWord>> = (0..=r_a)
                .map(|p| {
                    let mut out = Vec::new();
                    for duals in (0..r_a).combinations(p) {
                        let ext: Vec<u8> = duals.iter().map(|&i| i as u8).collect();
                        for slots in &tuples {
                            let e =
                                DElement::from_parts(r_a, r, &ext, slots.clone(), Ratio::one());
                            let (w, _) = e.terms().next().expect("single basis term");
                            out.push(w.clone());
                        }
                    }
                    out
                })
                .collect();
            let mats: Vec<Matrix> = (0..r_a)
                .map(|p| {
                    let index: BTreeMap<&DWord, usize> =
                        blocks[p + 1].iter().zip(0..).collect();
                    let mut m = Matrix::zeros(blocks[p + 1].len(), blocks[p].len());
                    for (j, w) in blocks[p].iter().enumerate() {
                        let x = DElement::from_parts(
                            r_a,
                            r,
                            w.ext(),
                            w.slots().to_vec(),
                            Ratio::one(),
                        );
                        for (iw, c) in cx.ce_d(&x).terms() {
                            let i = *index.get(iw).expect("module image leaves the column");
                            m.set(i, j, c.clone());
                        }
                    }
                    m
                })
                .collect();
            Ok(column_ranks(&blocks.iter().map(Vec::len).collect::<Vec<_>>(), &mats))
        }
    }
}

fn t_matrix_with(
    bott: &crate::derivation::Derivation,
    frame: FrameSpec,
    domain: &[Word],
    target: &[Word],
) -> Matrix {
    let index: BTreeMap<&Word, usize> = target.iter().zip(0..).collect();
    let mut m = Matrix::zeros(target.len(), domain.len());
    for (j, w) in domain.iter().enumerate() {
        let x = Element::from_term(frame, Trunc::Unbounded, w.clone(), Ratio::one());
        for (iw, c) in bott.apply(&x).terms() {
            let i = *index.get(iw).expect("image leaves the model");
            m.set(i, j, c.clone());
        }
    }
    m
}

fn column_ranks(dims: &[usize], mats: &[Matrix]) -> Vec<usize> {
    (0..dims.len())
        .map(|p| {
            let cycles = if p < mats.len() {
                dims[p] - mats[p].rank()
            } else {
                dims[p]
            };
            let boundaries = if p > 0 { mats[p - 1].rank() } else { 0 };
            cycles - boundaries
        })
        .collect()
}

/// Dimensions of both total cohomologies per degree together with the rank
/// of the map induced by skew-symmetrization.
pub fn hkr_induced_ranks(
    pair: &LiePair,
    window: Window,
    cutoff: u32,
) -> Result<Vec<HkrDegree>> {
    guard_window(pair, Side::Polyvector, window, cutoff)?;
    guard_window(pair, Side::Polydifferential, window, cutoff)?;
    if window.k_max + 1 > cutoff as i64 {
        return Err(Error::precondition(
            "degree window exceeds what the filtration cutoff resolves",
        ));
    }
    let frame = pair.frame();
    let r_a = pair.r_a();
    let r = pair.r();
    let cx = DComplex::new(pair)?;
    let degrees: Vec<i64> = window.degrees().collect();
    degrees
        .par_iter()
        .map(|&k| {
            let t_below = t_basis(frame, r_a, k - 1);
            let t_here = t_basis(frame, r_a, k);
            let t_above = t_basis(frame, r_a, k + 1);
            let d_below = d_basis(r_a, r, k - 1, cutoff);
            let d_here = d_basis(r_a, r, k, cutoff);
            let d_above = d_basis(r_a, r, k + 1, cutoff);

            let t_in = t_matrix(pair, &t_below, &t_here);
            let t_out = t_matrix(pair, &t_here, &t_above);
            let d_in = d_matrix(&cx, &d_below, &d_here);
            let d_out = d_matrix(&cx, &d_here, &d_above);

            let t_kernel = t_out.kernel_basis();
            let dim_t = t_kernel.len() - t_in.rank();
            let d_rank_in = d_in.rank();
            let dim_d = d_out.kernel_basis().len() - d_rank_in;

            // Push the polyvector cycles through skew-symmetrization and
            // count the classes that stay independent of the operator
            // boundaries.
            let index: BTreeMap<&DWord, usize> = d_here.iter().zip(0..).collect();
            let mut pushed = Matrix::zeros(d_here.len(), t_kernel.len());
            for (j, v) in t_kernel.iter().enumerate() {
                let mut e = Element::zero(frame, Trunc::Unbounded);
                for (i, w) in t_here.iter().enumerate() {
                    if !v[i].is_zero() {
                        e += Element::from_term(
                            frame,
                            Trunc::Unbounded,
                            w.clone(),
                            v[i].clone(),
                        );
                    }
                }
                for (iw, c) in cx.hkr(&e)?.terms() {
                    let i = *index.get(iw).expect("skew image leaves the piece");
                    pushed.set(i, j, c.clone());
                }
            }
            let induced = d_in.hstack(&pushed).rank() - d_rank_in;
            Ok(HkrDegree {
                degree: k,
                dim_polyvector: dim_t,
                dim_polydifferential: dim_d,
                induced_rank: induced,
            })
        })
        .collect()
}
