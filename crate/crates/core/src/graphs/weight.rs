//! Graph weights: closed forms where known, seeded Monte Carlo otherwise.
//!
//! The weight of a graph is the integral of the wedge of one hyperbolic-angle
//! form per edge over the reduced configuration space (first aerial point
//! gauge-fixed to i), divided by the factorials of the star sizes.  Edges are
//! wedged in lexicographic order.  The integral vanishes unless the number of
//! edges equals the dimension `2n + m - 2`.
//!
//! Monte Carlo uses Cauchy importance sampling: the angle form of an edge
//! ending on the real line has exactly the Cauchy density in its foot, so the
//! one-aerial-vertex family is estimated with zero variance.  Sampling is
//! chunked over independent ChaCha streams and merged in a fixed order, so a
//! given (graph, seed, samples) triple always reproduces the same estimate.

use super::graph::{AdmissibleGraph, Vertex};
use crate::error::{Error, Result};
use crate::scalar::{format_ratio, parse_ratio, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightValue {
    Exact(Ratio),
    Estimate { value: f64, std_err: f64 },
}

impl WeightValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            WeightValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            WeightValue::Estimate { value, .. } => *value,
        }
    }

    pub fn std_err(&self) -> f64 {
        match self {
            WeightValue::Exact(_) => 0.0,
            WeightValue::Estimate { std_err, .. } => *std_err,
        }
    }

    pub fn exact(&self) -> Option<&Ratio> {
        match self {
            WeightValue::Exact(r) => Some(r),
            WeightValue::Estimate { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphWeight {
    pub value: WeightValue,
    pub provenance: Provenance,
}

impl GraphWeight {
    fn exact(r: Ratio) -> Self {
        GraphWeight {
            value: WeightValue::Exact(r),
            provenance: Provenance::ClosedForm,
        }
    }
}

/// How to obtain weights: trust the closed-form table when a graph is in a
/// family with a known value, or force sampling even then.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    ExactIfKnown { samples: u64, seed: u64 },
    ForceSampling { samples: u64, seed: u64 },
}

impl WeightMode {
    pub fn samples(&self) -> u64 {
        match self {
            WeightMode::ExactIfKnown { samples, .. } => *samples,
            WeightMode::ForceSampling { samples, .. } => *samples,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            WeightMode::ExactIfKnown { seed, .. } => *seed,
            WeightMode::ForceSampling { seed, .. } => *seed,
        }
    }
}

fn star_factor(g: &AdmissibleGraph) -> Ratio {
    let mut denom = Ratio::one();
    for s in g.star_sizes() {
        for v in 1..=s {
            denom = denom * Ratio::from_integer(v.into());
        }
    }
    Ratio::one() / denom
}

/// Closed-form weight, when the graph belongs to a family with a known value.
///
/// Covered: the degree filter (no top form unless edges match the dimension)
/// and the one-aerial-vertex family, whose out-list is a permutation sigma of
/// the ground vertices and whose weight is sgn(sigma) / (m!)^2.
pub fn closed_form(g: &AdmissibleGraph) -> Option<GraphWeight> {
    if !g.is_dimension_matched() {
        return Some(GraphWeight::exact(Ratio::zero()));
    }
    if g.n() == 1 {
        let perm: Vec<usize> = g
            .star(0)
            .iter()
            .map(|v| match v {
                Vertex::Terrestrial(j) => *j as usize,
                Vertex::Aerial(_) => unreachable!("single aerial vertex"),
            })
            .collect();
        let mut sign = Ratio::one();
        for i in 0..perm.len() {
            for j in i + 1..perm.len() {
                if perm[i] > perm[j] {
                    sign = -sign;
                }
            }
        }
        let w = sign * star_factor(g) * star_factor(g);
        return Some(GraphWeight::exact(w));
    }
    None
}

struct Columns {
    n: usize,
}

impl Columns {
    fn of(&self, v: Vertex) -> Option<usize> {
        match v {
            Vertex::Aerial(0) => None,
            Vertex::Aerial(k) => Some(2 * (k as usize - 1)),
            Vertex::Terrestrial(j) => Some(2 * (self.n - 1) + j as usize),
        }
    }
}

fn cauchy_density(t: f64) -> f64 {
    1.0 / (PI * (1.0 + t * t))
}

fn draw_cauchy<R: Rng>(rng: &mut R) -> f64 {
    (PI * (rng.gen::<f64>() - 0.5)).tan()
}

/// Partial derivatives of the hyperbolic angle of the edge from z to w,
/// phi = (arg(z - w) - arg(conj z - w)) / 2 pi.
struct AnglePartials {
    src_x: f64,
    src_y: f64,
    tgt_x: f64,
    tgt_y: f64,
}

fn angle_partials(z: (f64, f64), w: (f64, f64)) -> AnglePartials {
    let u = (z.0 - w.0, z.1 - w.1);
    let v = (z.0 - w.0, -z.1 - w.1);
    let nu = u.0 * u.0 + u.1 * u.1;
    let nv = v.0 * v.0 + v.1 * v.1;
    let two_pi = 2.0 * PI;
    AnglePartials {
        src_x: (-u.1 / nu + v.1 / nv) / two_pi,
        src_y: (u.0 / nu + v.0 / nv) / two_pi,
        tgt_x: (u.1 / nu - v.1 / nv) / two_pi,
        tgt_y: (-u.0 / nu + v.0 / nv) / two_pi,
    }
}

fn det_in_place(a: &mut [f64], dim: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..dim {
        let mut pivot = col;
        for row in col + 1..dim {
            if a[row * dim + col].abs() > a[pivot * dim + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * dim + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..dim {
                a.swap(col * dim + j, pivot * dim + j);
            }
            det = -det;
        }
        let p = a[col * dim + col];
        det *= p;
        for row in col + 1..dim {
            let f = a[row * dim + col] / p;
            if f != 0.0 {
                for j in col..dim {
                    a[row * dim + j] -= f * a[col * dim + j];
                }
            }
        }
    }
    det
}

/// One importance-sampled evaluation of det(d phi) / density.
fn sample_once<R: Rng>(g: &AdmissibleGraph, rng: &mut R, scratch: &mut [f64]) -> f64 {
    let n = g.n();
    let m = g.m();
    let dim = g.config_dimension();
    let cols = Columns { n };

    let mut density = 1.0;
    let mut aerial = vec![(0.0, 1.0); n];
    for z in aerial.iter_mut().skip(1) {
        let x = draw_cauchy(rng);
        // Height y = t^2 with t half-Cauchy: the 1/sqrt(y) spike of the
        // proposal at the real line keeps the importance ratio square
        // integrable when an aerial point collides with a ground point.
        let t = draw_cauchy(rng).abs();
        *z = (x, t * t);
        density *= cauchy_density(x) * cauchy_density(t) / t;
    }
    let mut ground = Vec::with_capacity(m);
    for _ in 0..m {
        let q = draw_cauchy(rng);
        density *= cauchy_density(q);
        ground.push(q);
    }
    ground.sort_by(|a, b| a.partial_cmp(b).expect("finite sample"));
    for v in 1..=m {
        density *= v as f64;
    }

    scratch.iter_mut().for_each(|x| *x = 0.0);
    for (row, e) in g.edges().into_iter().enumerate() {
        let z = aerial[e.src];
        let (w, tgt_is_aerial) = match e.tgt {
            Vertex::Aerial(t) => (aerial[t as usize], true),
            Vertex::Terrestrial(j) => ((ground[j as usize], 0.0), false),
        };
        let p = angle_partials(z, w);
        if let Some(c) = cols.of(Vertex::Aerial(e.src as u8)) {
            scratch[row * dim + c] += p.src_x;
            scratch[row * dim + c + 1] += p.src_y;
        }
        if let Some(c) = cols.of(e.tgt) {
            scratch[row * dim + c] += p.tgt_x;
            if tgt_is_aerial {
                scratch[row * dim + c + 1] += p.tgt_y;
            }
        }
    }
    let det = det_in_place(scratch, dim);
    let v = det / density;
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

const CHUNK: u64 = 8192;

/// Seeded Monte Carlo estimate of the weight.
///
/// The per-graph stream seed folds the graph fingerprint into the user seed,
/// so two different graphs never share a sample path.
pub fn monte_carlo(g: &AdmissibleGraph, samples: u64, seed: u64) -> Result<GraphWeight> {
    if !g.is_dimension_matched() {
        return Ok(GraphWeight::exact(Ratio::zero()));
    }
    if samples == 0 {
        return Err(Error::precondition("sampling needs a positive sample count"));
    }
    let dim = g.config_dimension();
    let factor = star_factor(g).to_f64().expect("small factorial");
    if dim == 0 {
        return Ok(GraphWeight {
            value: WeightValue::Estimate {
                value: factor,
                std_err: 0.0,
            },
            provenance: Provenance::MonteCarlo { samples, seed },
        });
    }
    let graph_seed = seed ^ g.fingerprint();
    let chunks = (samples + CHUNK - 1) / CHUNK;
    let partials: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(graph_seed);
            rng.set_stream(c);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut scratch = vec![0.0; dim * dim];
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..count {
                let v = sample_once(g, &mut rng, &mut scratch);
                sum += v;
                sumsq += v * v;
            }
            (sum, sumsq)
        })
        .collect();
    let (sum, sumsq) = partials
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (s, q)| (a + s, b + q));
    let nf = samples as f64;
    let mean = sum / nf;
    let var = if samples > 1 {
        ((sumsq - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(GraphWeight {
        value: WeightValue::Estimate {
            value: mean * factor,
            std_err: (var / nf).sqrt() * factor,
        },
        provenance: Provenance::MonteCarlo { samples, seed },
    })
}

pub fn weight(g: &AdmissibleGraph, mode: &WeightMode) -> Result<GraphWeight> {
    match mode {
        WeightMode::ExactIfKnown { samples, seed } => match closed_form(g) {
            Some(w) => Ok(w),
            None => monte_carlo(g, *samples, *seed),
        },
        WeightMode::ForceSampling { samples, seed } => monte_carlo(g, *samples, *seed),
    }
}

/// In-memory weight cache with a line-oriented text form.
///
/// Entries are keyed by the canonical graph plus the (seed, samples) pair
/// that produced them; closed-form entries use (0, 0).
#[derive(Debug, Default, Clone)]
pub struct WeightCache {
    entries: BTreeMap<(String, u64, u64), GraphWeight>,
}

impl WeightCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn key(g: &AdmissibleGraph, w: &GraphWeight) -> (String, u64, u64) {
        match w.provenance {
            Provenance::ClosedForm => (g.canonical(), 0, 0),
            Provenance::MonteCarlo { samples, seed } => (g.canonical(), seed, samples),
        }
    }

    pub fn get(&self, g: &AdmissibleGraph, mode: &WeightMode) -> Option<&GraphWeight> {
        self.entries
            .get(&(g.canonical(), mode.seed(), mode.samples()))
    }

    pub fn insert(&mut self, g: &AdmissibleGraph, w: GraphWeight) {
        self.entries.insert(Self::key(g, &w), w);
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# graph weight cache v1\n");
        for ((canon, seed, samples), w) in &self.entries {
            let value = match &w.value {
                WeightValue::Exact(r) => format!("exact\t{}", format_ratio(r)),
                WeightValue::Estimate { value, std_err } => {
                    format!("estimate\t{value}\t{std_err}")
                }
            };
            out.push_str(&format!("{canon}\t{seed}\t{samples}\t{value}\n"));
        }
        out
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split('\t').collect();
            let bad = || Error::parse(format!("cache line {}: malformed record", no + 1));
            if parts.len() < 5 {
                return Err(bad());
            }
            let canon = parts[0].to_string();
            let seed: u64 = parts[1].parse().map_err(|_| bad())?;
            let samples: u64 = parts[2].parse().map_err(|_| bad())?;
            let w = match parts[3] {
                "exact" => GraphWeight {
                    value: WeightValue::Exact(parse_ratio(parts[4])?),
                    provenance: Provenance::ClosedForm,
                },
                "estimate" if parts.len() == 6 => GraphWeight {
                    value: WeightValue::Estimate {
                        value: parts[4].parse().map_err(|_| bad())?,
                        std_err: parts[5].parse().map_err(|_| bad())?,
                    },
                    provenance: Provenance::MonteCarlo { samples, seed },
                },
                _ => return Err(bad()),
            };
            entries.insert((canon, seed, samples), w);
        }
        Ok(WeightCache { entries })
    }
}

/// Weight with optional caching; Monte Carlo results are stored, closed
/// forms are recomputed (they are cheaper than the lookup).
pub fn weight_cached(
    g: &AdmissibleGraph,
    mode: &WeightMode,
    cache: Option<&mut WeightCache>,
) -> Result<GraphWeight> {
    if matches!(mode, WeightMode::ExactIfKnown { .. }) {
        if let Some(w) = closed_form(g) {
            return Ok(w);
        }
    }
    match cache {
        None => weight(g, mode),
        Some(cache) => {
            if let Some(w) = cache.get(g, mode) {
                return Ok(w.clone());
            }
            let w = weight(g, mode)?;
            cache.insert(g, w.clone());
            Ok(w)
        }
    }
}
