//! Basis words of the graded-commutative kernel algebra.
//!
//! A frame fixes three families of generators:
//!   - odd generators, indexed 0..n_odd(), split into three banks:
//!       lam  (ids 0..l)        dual frame of the ambient algebroid, degree +1
//!       tht  (ids l..l+r)      odd copies of the quotient coframe (cocycle slots)
//!       psi  (ids l+r..l+2r)   odd copies of the quotient frame (polyvector slots)
//!   - even symmetric generators chi_0..chi_{r-1} (the formal fiber coordinates)
//!   - even chart generators x_0..x_{m-1} (polynomial base coordinates)
//!
//! A basis word is (strictly increasing odd id list) x chi^J x x^K. Odd
//! generators anticommute uniformly; sorting absorbs signs into coefficients,
//! which makes word equality exact. Which cohomological degree a generator
//! carries is a concern of the model layers, not of the kernel: Koszul signs
//! only see parity, and every odd generator has parity 1.

use crate::multi_index::MultiIndex;
use std::fmt;

/// Generator universe of an algebra instance. Copyable and tiny; every
/// element carries one so frame mismatches are caught at operation time.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FrameSpec {
    /// Rank of the ambient algebroid L (number of lam generators).
    pub l: usize,
    /// Rank of the quotient B (number of tht, psi, and chi generators each).
    pub r: usize,
    /// Dimension of the polynomial base chart (0 for a point).
    pub chart: usize,
}

impl FrameSpec {
    pub fn new(l: usize, r: usize, chart: usize) -> Self {
        FrameSpec { l, r, chart }
    }

    pub fn n_odd(&self) -> usize {
        self.l + 2 * self.r
    }

    pub fn lam_id(&self, i: usize) -> u16 {
        debug_assert!(i < self.l);
        i as u16
    }

    pub fn tht_id(&self, k: usize) -> u16 {
        debug_assert!(k < self.r);
        (self.l + k) as u16
    }

    pub fn psi_id(&self, k: usize) -> u16 {
        debug_assert!(k < self.r);
        (self.l + self.r + k) as u16
    }

    pub fn is_lam(&self, id: u16) -> bool {
        (id as usize) < self.l
    }

    pub fn is_tht(&self, id: u16) -> bool {
        let id = id as usize;
        id >= self.l && id < self.l + self.r
    }

    pub fn is_psi(&self, id: u16) -> bool {
        let id = id as usize;
        id >= self.l + self.r && id < self.n_odd()
    }

    /// Bank-local index of an odd id.
    pub fn bank_index(&self, id: u16) -> usize {
        let id = id as usize;
        if id < self.l {
            id
        } else if id < self.l + self.r {
            id - self.l
        } else {
            id - self.l - self.r
        }
    }
}

/// A named generator, used for derivation images and interior products.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Gen {
    /// Odd generator by global id (lam/tht/psi bank per the frame).
    Odd(u16),
    /// Symmetric generator chi_k.
    Sym(usize),
    /// Chart coordinate x_j.
    Chart(usize),
}

/// Canonical basis word. Ordering is derived (ext, then sym, then chart),
/// giving a stable term order for maps and reports.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    /// Strictly increasing odd generator ids.
    pub ext: Vec<u16>,
    /// chi exponents (length r).
    pub sym: MultiIndex,
    /// chart exponents (length chart).
    pub chart: MultiIndex,
}

impl Word {
    pub fn unit(frame: FrameSpec) -> Self {
        Word {
            ext: Vec::new(),
            sym: MultiIndex::zero(frame.r),
            chart: MultiIndex::zero(frame.chart),
        }
    }

    pub fn parity(&self) -> usize {
        self.ext.len() % 2
    }

    pub fn sym_degree(&self) -> u32 {
        self.sym.total()
    }

    /// Number of odd ids from the given half-open id range.
    pub fn count_ext_in(&self, lo: u16, hi: u16) -> usize {
        self.ext.iter().filter(|&&id| id >= lo && id < hi).count()
    }

    pub fn contains_odd(&self, id: u16) -> bool {
        self.ext.binary_search(&id).is_ok()
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(ext={:?}, sym={:?}, chart={:?})", self.ext, self.sym, self.chart)
    }
}

/// Merges two strictly increasing odd id lists, returning the merged list and
/// the Koszul sign, or None when they share an id (odd square = 0).
pub fn merge_odd(a: &[u16], b: &[u16]) -> Option<(Vec<u16>, i32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut sign = 1i32;
    let mut i = 0;
    let mut j = 0;
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            // b[j] jumps over the remaining a-suffix, one transposition per
            // odd generator it passes.
            if (a.len() - i) % 2 == 1 {
                sign = -sign;
            }
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, sign))
}

/// Sorts an arbitrary odd id sequence into canonical order; None when an id
/// repeats. Returns the sign of the sorting permutation.
pub fn sort_odd(ids: &[u16]) -> Option<(Vec<u16>, i32)> {
    let mut v = ids.to_vec();
    let mut sign = 1i32;
    // Insertion sort with transposition counting; sequences are short.
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((v, sign))
}
