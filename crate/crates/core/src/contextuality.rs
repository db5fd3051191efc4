//! Degree of contextuality: `d = d_H(E, Im A)` over GF(2).
//!
//! A configuration has `p` observables and `l` contexts; `A` is its `l x p`
//! incidence matrix and `E` marks the negative contexts. A noncontextual
//! assignment `s` (bit 1 = value -1) violates exactly the contexts where
//! `A s + E` is 1, so the degree is the minimum weight of the coset `E + Im A`.

use std::thread;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{BitVector, EchelonBasis};
use crate::pauli::{context_sign, Observable, PauliError, Sign};
use crate::polar::{LineId, PolarSpace};
use crate::sets::LineSet;

/// Default seed for every randomized procedure.
pub const DEFAULT_SEED: u64 = 0x5eed_0063;
/// Default exhaustive-enumeration rank limit.
pub const DEFAULT_RANK_LIMIT: usize = 30;
/// Hard ceiling for exhaustive enumeration regardless of the limit asked for.
pub const MAX_ENUMERATION_RANK: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextualityError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("context {0} is malformed: {1}")]
    Malformed(usize, String),
    #[error("incidence rank {rank} exceeds the enumeration limit {limit}; use certify_degree")]
    RankTooLarge { rank: usize, limit: usize },
    #[error("line {0} is not covered by any subconfiguration")]
    Uncovered(usize),
    #[error("cover multiplicity is not uniform ({0} vs {1})")]
    NonUniform(usize, usize),
    #[error("line index {0} out of range")]
    LineOutOfRange(usize),
    #[error("assignment has {0} bits, configuration has {1} points")]
    AssignmentLength(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Context {
    /// Indices into the configuration's point list, ascending.
    pub members: Vec<usize>,
    pub sign: Sign,
}

/// Observables, contexts, incidence matrix and valuation vector.
#[derive(Debug, Clone)]
pub struct Configuration {
    points: Vec<Observable>,
    contexts: Vec<Context>,
    /// W(5,2) line of each context when the configuration is made of lines.
    source_lines: Option<Vec<LineId>>,
    columns: Vec<BitVector>,
    valuation: BitVector,
}

impl Configuration {
    /// Build from explicit contexts; signs are computed from the observables.
    pub fn build(contexts: &[Vec<Observable>]) -> Result<Self, ContextualityError> {
        let mut points: Vec<Observable> = contexts.iter().flatten().copied().collect();
        points.sort_unstable();
        points.dedup();
        let mut ctxs = Vec::with_capacity(contexts.len());
        for (i, c) in contexts.iter().enumerate() {
            if c.len() < 2 {
                return Err(ContextualityError::Malformed(i, "fewer than two observables".into()));
            }
            if c.iter().any(|o| o.is_identity()) {
                return Err(ContextualityError::Malformed(i, "identity in context".into()));
            }
            let sign = context_sign(c).map_err(|e| ContextualityError::Malformed(i, e.to_string()))?;
            let mut members: Vec<usize> = c
                .iter()
                .map(|o| points.binary_search(o).expect("collected above"))
                .collect();
            members.sort_unstable();
            if members.windows(2).any(|w| w[0] == w[1]) {
                return Err(ContextualityError::Malformed(i, "repeated observable".into()));
            }
            ctxs.push(Context { members, sign });
        }
        Ok(Self::from_parts(points, ctxs, None))
    }

    /// Configuration whose contexts are the given lines of a polar space.
    pub fn from_lines(w: &PolarSpace, lines: &LineSet) -> Self {
        let ids = lines.to_vec();
        let pts = w.points_of(lines);
        let points: Vec<Observable> = pts.iter().map(|p| w.point(p)).collect();
        let index: Vec<usize> = {
            let mut idx = vec![usize::MAX; w.points().len()];
            for (k, p) in pts.iter().enumerate() {
                idx[p] = k;
            }
            idx
        };
        let contexts = ids
            .iter()
            .map(|&l| {
                let line = w.line(l);
                Context {
                    members: line.points.iter().map(|&p| index[p]).collect(),
                    sign: line.sign,
                }
            })
            .collect();
        Self::from_parts(points, contexts, Some(ids))
    }

    fn from_parts(points: Vec<Observable>, contexts: Vec<Context>, source_lines: Option<Vec<LineId>>) -> Self {
        let l = contexts.len();
        let mut columns = vec![BitVector::zeros(l); points.len()];
        for (i, c) in contexts.iter().enumerate() {
            for &j in &c.members {
                columns[j].set(i, true);
            }
        }
        let valuation = BitVector::from_ones(
            l,
            contexts
                .iter()
                .enumerate()
                .filter(|(_, c)| c.sign.is_negative())
                .map(|(i, _)| i),
        );
        Configuration {
            points,
            contexts,
            source_lines,
            columns,
            valuation,
        }
    }

    pub fn points(&self) -> &[Observable] {
        &self.points
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn p(&self) -> usize {
        self.points.len()
    }

    pub fn l(&self) -> usize {
        self.contexts.len()
    }

    /// `E`: bit `i` set iff context `i` is negative.
    pub fn valuation(&self) -> &BitVector {
        &self.valuation
    }

    /// Column `j` of `A`: the contexts containing point `j`.
    pub fn column(&self, j: usize) -> &BitVector {
        &self.columns[j]
    }

    /// Row `i` of `A` as a `p`-bit vector.
    pub fn row(&self, i: usize) -> BitVector {
        BitVector::from_ones(self.p(), self.contexts[i].members.iter().copied())
    }

    pub fn source_lines(&self) -> Option<&[LineId]> {
        self.source_lines.as_deref()
    }

    /// The W(5,2) lines of a set of context indices.
    pub fn to_line_set(&self, contexts: &[usize]) -> Option<LineSet> {
        let src = self.source_lines.as_ref()?;
        Some(contexts.iter().map(|&i| src[i]).collect())
    }

    /// Context indices of a set of W(5,2) lines (lines outside are ignored).
    pub fn from_line_set(&self, lines: &LineSet) -> Option<Vec<usize>> {
        let src = self.source_lines.as_ref()?;
        Some(
            src.iter()
                .enumerate()
                .filter(|(_, &l)| lines.contains(l))
                .map(|(i, _)| i)
                .collect(),
        )
    }

    pub fn negative_count(&self) -> usize {
        self.valuation.weight()
    }

    /// `A s`.
    pub fn image(&self, s: &BitVector) -> Result<BitVector, ContextualityError> {
        if s.len() != self.p() {
            return Err(ContextualityError::AssignmentLength(s.len(), self.p()));
        }
        let mut out = BitVector::zeros(self.l());
        for j in s.ones() {
            out.xor_assign(&self.columns[j]);
        }
        Ok(out)
    }

    /// `A s + E` as a bit vector over contexts.
    pub fn violation_vector(&self, s: &BitVector) -> Result<BitVector, ContextualityError> {
        Ok(self.image(s)?.xor(&self.valuation))
    }

    pub fn column_space(&self) -> EchelonBasis {
        EchelonBasis::new(&self.columns)
    }

    /// Restriction to a subset of contexts.
    pub fn restrict(&self, contexts: &[usize]) -> Result<Configuration, ContextualityError> {
        let obs: Vec<Vec<Observable>> = contexts
            .iter()
            .map(|&i| {
                self.contexts
                    .get(i)
                    .map(|c| c.members.iter().map(|&j| self.points[j]).collect())
                    .ok_or(ContextualityError::LineOutOfRange(i))
            })
            .collect::<Result<_, _>>()?;
        let mut c = Configuration::build(&obs)?;
        if let Some(src) = &self.source_lines {
            c.source_lines = Some(contexts.iter().map(|&i| src[i]).collect());
        }
        Ok(c)
    }
}

/// Rank of the incidence matrix over GF(2).
pub fn gf2_rank(c: &Configuration) -> usize {
    c.column_space().rank()
}

/// Indices where `A s != E`.
pub fn violated_lines(c: &Configuration, s: &BitVector) -> Result<Vec<usize>, ContextualityError> {
    Ok(c.violation_vector(s)?.ones().collect())
}

/// An assignment violating exactly the contexts in `v`, if one exists.
pub fn solve_achievability(c: &Configuration, v: &[usize]) -> Result<Option<BitVector>, ContextualityError> {
    let mut target = c.valuation.clone();
    for &i in v {
        if i >= c.l() {
            return Err(ContextualityError::LineOutOfRange(i));
        }
        target.flip(i);
    }
    Ok(c.column_space().solve(&target, c.p()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum LowerMethod {
    Enumeration,
    Tiling {
        cover: String,
        subconfigurations: usize,
        multiplicity: usize,
    },
    /// Non-uniform family: `ceil(sum d_i / max multiplicity)`.
    Packing {
        family: String,
        subconfigurations: usize,
        max_multiplicity: usize,
    },
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum UpperMethod {
    Enumeration,
    Achievability { candidate: String },
    LocalSearch { seed: u64, budget: usize },
    Baseline,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCertificate {
    /// Bit 1 means value -1 at that point.
    pub assignment: BitVector,
    pub violated: Vec<usize>,
    pub upper: usize,
    pub lower: usize,
    pub upper_method: UpperMethod,
    pub lower_method: LowerMethod,
    pub exact: bool,
}

impl DegreeCertificate {
    fn from_assignment(c: &Configuration, s: BitVector, upper_method: UpperMethod) -> Self {
        let violated = violated_lines(c, &s).expect("assignment sized for configuration");
        DegreeCertificate {
            upper: violated.len(),
            assignment: s,
            violated,
            lower: 0,
            upper_method,
            lower_method: LowerMethod::Trivial,
            exact: false,
        }
    }

    fn with_lower(mut self, lower: usize, method: LowerMethod) -> Self {
        self.lower = lower;
        self.lower_method = method;
        self.exact = self.lower == self.upper;
        self
    }

    /// Recheck the stored assignment against the configuration.
    pub fn verify(&self, c: &Configuration) -> bool {
        match violated_lines(c, &self.assignment) {
            Ok(v) => v == self.violated && v.len() == self.upper && self.lower <= self.upper,
            Err(_) => false,
        }
    }
}

/// Result of an exhaustive walk over `E + Im A`.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub certificate: DegreeCertificate,
    /// Distinct minimum-weight violation vectors, if requested.
    pub optima: Vec<BitVector>,
}

/// Top basis vectors fixed per block; keeps the visiting order independent
/// of the number of worker threads.
const PREFIX_BITS: usize = 6;

/// Exhaustive minimum over the coset via a Gray-code walk of the column space.
pub fn degree_exact(c: &Configuration, rank_limit: usize) -> Result<DegreeCertificate, ContextualityError> {
    Ok(enumerate_coset(c, rank_limit, false)?.certificate)
}

/// Like [`degree_exact`], also collecting every distinct optimal violated set
/// (at most `OPTIMA_CAP`).
pub fn degree_exact_all(c: &Configuration, rank_limit: usize) -> Result<Enumeration, ContextualityError> {
    enumerate_coset(c, rank_limit, true)
}

pub const OPTIMA_CAP: usize = 1 << 16;

fn enumerate_coset(c: &Configuration, rank_limit: usize, collect: bool) -> Result<Enumeration, ContextualityError> {
    let space = c.column_space();
    let r = space.rank();
    let limit = rank_limit.min(MAX_ENUMERATION_RANK);
    if r > limit {
        return Err(ContextualityError::RankTooLarge { rank: r, limit });
    }
    let words = c.l().div_ceil(64);
    let result = match words {
        0 | 1 => walk::<1>(c, &space, collect),
        2 => walk::<2>(c, &space, collect),
        3 => walk::<3>(c, &space, collect),
        4 => walk::<4>(c, &space, collect),
        5 => walk::<5>(c, &space, collect),
        _ => walk_dyn(c, &space, collect),
    };
    let (code, optima) = result;
    let mut s = BitVector::zeros(c.p());
    for (k, combo) in space.combos.iter().enumerate() {
        if (code >> k) & 1 == 1 {
            s.xor_assign(combo);
        }
    }
    let cert = DegreeCertificate::from_assignment(c, s, UpperMethod::Enumeration);
    let d = cert.upper;
    Ok(Enumeration {
        certificate: cert.with_lower(d, LowerMethod::Enumeration),
        optima,
    })
}

fn pack<const W: usize>(v: &BitVector) -> [u64; W] {
    let mut out = [0u64; W];
    out[..v.words().len()].copy_from_slice(v.words());
    out
}

fn unpack<const W: usize>(len: usize, words: &[u64; W]) -> BitVector {
    let mut v = BitVector::zeros(len);
    for i in 0..len {
        if (words[i / 64] >> (i % 64)) & 1 == 1 {
            v.set(i, true);
        }
    }
    v
}

struct BlockBest<const W: usize> {
    weight: u32,
    code: u64,
    optima: Vec<[u64; W]>,
}

/// Walk one block: the top basis vectors fixed to `prefix`, the low `low`
/// vectors enumerated in Gray order.
fn walk_block<const W: usize>(start: [u64; W], basis: &[[u64; W]], low: usize, prefix: u64, collect: bool, cap: u32) -> BlockBest<W> {
    let weight = |v: &[u64; W]| v.iter().map(|w| w.count_ones()).sum::<u32>();
    let mut cur = start;
    let mut best = BlockBest {
        weight: weight(&cur),
        code: prefix << low,
        optima: Vec::new(),
    };
    if collect {
        best.optima.push(cur);
    }
    let steps: u64 = 1u64 << low;
    for i in 1..steps {
        let k = i.trailing_zeros() as usize;
        let b = &basis[k];
        for t in 0..W {
            cur[t] ^= b[t];
        }
        let wt = weight(&cur);
        if wt < best.weight {
            best.weight = wt;
            best.code = (prefix << low) | (i ^ (i >> 1));
            if collect {
                best.optima.clear();
                best.optima.push(cur);
            }
        } else if collect && wt == best.weight && best.optima.len() < cap as usize {
            best.optima.push(cur);
        }
    }
    best
}

fn walk<const W: usize>(c: &Configuration, space: &EchelonBasis, collect: bool) -> (u64, Vec<BitVector>) {
    let r = space.rank();
    let basis: Vec<[u64; W]> = space.basis.iter().map(pack::<W>).collect();
    let e = pack::<W>(c.valuation());
    let hi = r.min(PREFIX_BITS);
    let low = r - hi;
    let blocks = 1u64 << hi;
    let threads = thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(blocks as usize);
    let start_of = |prefix: u64| {
        let mut s = e;
        for k in 0..hi {
            if (prefix >> k) & 1 == 1 {
                for t in 0..W {
                    s[t] ^= basis[low + k][t];
                }
            }
        }
        s
    };
    let cap = OPTIMA_CAP as u32;
    let mut results: Vec<(u64, BlockBest<W>)> = if threads <= 1 {
        (0..blocks)
            .map(|p| (p, walk_block(start_of(p), &basis, low, p, collect, cap)))
            .collect()
    } else {
        thread::scope(|scope| {
            let handles: Vec<_> = (0..threads as u64)
                .map(|t| {
                    let basis = &basis;
                    let start_of = &start_of;
                    scope.spawn(move || {
                        (t..blocks)
                            .step_by(threads)
                            .map(|p| (p, walk_block(start_of(p), basis, low, p, collect, cap)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("worker")).collect()
        })
    };
    results.sort_by_key(|(p, _)| *p);
    // merge: minimum weight, first block wins ties
    let best_weight = results.iter().map(|(_, b)| b.weight).min().unwrap_or(0);
    let winner = results.iter().find(|(_, b)| b.weight == best_weight).expect("one block");
    let code = winner.1.code;
    let mut optima = Vec::new();
    if collect {
        let mut seen = std::collections::BTreeSet::new();
        for (_, b) in results.iter().filter(|(_, b)| b.weight == best_weight) {
            for o in &b.optima {
                if seen.len() < OPTIMA_CAP {
                    seen.insert(*o);
                }
            }
        }
        optima = seen.into_iter().map(|o| unpack::<W>(c.l(), &o)).collect();
    }
    (code, optima)
}

fn walk_dyn(c: &Configuration, space: &EchelonBasis, collect: bool) -> (u64, Vec<BitVector>) {
    let r = space.rank();
    let mut cur = c.valuation().clone();
    let mut best = (cur.weight(), 0u64);
    let mut optima = vec![cur.clone()];
    for i in 1..(1u64 << r) {
        cur.xor_assign(&space.basis[i.trailing_zeros() as usize]);
        let w = cur.weight();
        if w < best.0 {
            best = (w, i ^ (i >> 1));
            optima.clear();
            optima.push(cur.clone());
        } else if collect && w == best.0 && optima.len() < OPTIMA_CAP {
            optima.push(cur.clone());
        }
    }
    optima.sort();
    optima.dedup();
    (best.1, if collect { optima } else { Vec::new() })
}

/// Brute-force minimum over all `2^p` assignments; an oracle for small `p`.
pub fn degree_brute_force(c: &Configuration) -> usize {
    assert!(c.p() <= 24, "brute force limited to 24 points");
    let rows: Vec<u32> = c
        .contexts()
        .iter()
        .map(|ctx| ctx.members.iter().fold(0u32, |m, &j| m | (1 << j)))
        .collect();
    let negs: Vec<u32> = c.contexts().iter().map(|ctx| ctx.sign.is_negative() as u32).collect();
    (0u32..(1 << c.p()))
        .map(|s| {
            rows.iter()
                .zip(&negs)
                .filter(|(&r, &e)| ((r & s).count_ones() & 1) != e)
                .count()
        })
        .min()
        .unwrap_or(0)
}

/// Seeded steepest-descent bit-flip search with random restarts.
///
/// `budget` is the number of restarts; zero returns the all-`+1` assignment.
pub fn degree_upper_search(c: &Configuration, seed: u64, budget: usize) -> DegreeCertificate {
    let baseline = BitVector::zeros(c.p());
    let mut best = DegreeCertificate::from_assignment(c, baseline, UpperMethod::Baseline);
    if budget == 0 || c.p() == 0 {
        return best;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let incident: Vec<Vec<usize>> = (0..c.p()).map(|j| c.column(j).ones().collect()).collect();
    let members: Vec<&[usize]> = c.contexts().iter().map(|ctx| ctx.members.as_slice()).collect();
    let sideways_limit = 2 * c.p();
    let mut order: Vec<usize> = (0..c.p()).collect();
    for _ in 0..budget {
        let mut s = BitVector::zeros(c.p());
        for j in 0..c.p() {
            if rng.gen_bool(0.5) {
                s.set(j, true);
            }
        }
        let mut viol: Vec<bool> = c.violation_vector(&s).expect("sized").ones().fold(vec![false; c.l()], |mut v, i| {
            v[i] = true;
            v
        });
        // gain[j] = violated - satisfied among contexts through j
        let mut gain: Vec<i32> = (0..c.p())
            .map(|j| incident[j].iter().map(|&i| if viol[i] { 1 } else { -1 }).sum())
            .collect();
        let mut weight = viol.iter().filter(|&&v| v).count();
        let mut best_here = (weight, s.clone());
        let mut sideways = 0;
        let mut tabu = usize::MAX;
        loop {
            order.shuffle(&mut rng);
            let top = order
                .iter()
                .copied()
                .filter(|&j| j != tabu)
                .max_by_key(|&j| gain[j])
                .expect("at least one point");
            let g = gain[top];
            if g < 0 || (g == 0 && sideways >= sideways_limit) {
                break;
            }
            if g == 0 {
                sideways += 1;
            } else {
                sideways = 0;
            }
            s.flip(top);
            tabu = top;
            for &i in &incident[top] {
                viol[i] = !viol[i];
                let delta = if viol[i] { 2 } else { -2 };
                for &j in members[i] {
                    gain[j] += delta;
                }
            }
            weight = (weight as i64 - g as i64) as usize;
            if weight < best_here.0 {
                best_here = (weight, s.clone());
            }
        }
        if best_here.0 < best.upper {
            best = DegreeCertificate::from_assignment(c, best_here.1, UpperMethod::LocalSearch { seed, budget });
        }
    }
    best
}

/// A family of subconfigurations (context-index subsets) with certified
/// degrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSpec {
    pub name: String,
    pub subconfigurations: Vec<Vec<usize>>,
    pub degrees: Vec<usize>,
}

impl CoverSpec {
    fn multiplicities(&self, l: usize) -> Result<Vec<usize>, ContextualityError> {
        let mut mult = vec![0usize; l];
        for sub in &self.subconfigurations {
            for &i in sub {
                *mult.get_mut(i).ok_or(ContextualityError::LineOutOfRange(i))? += 1;
            }
        }
        Ok(mult)
    }
}

/// `ceil(sum d_i / mu)` for a cover in which every context lies in exactly
/// `mu` subconfigurations.
pub fn tiling_lower_bound(c: &Configuration, cover: &CoverSpec) -> Result<usize, ContextualityError> {
    let mult = cover.multiplicities(c.l())?;
    if let Some(i) = mult.iter().position(|&m| m == 0) {
        return Err(ContextualityError::Uncovered(i));
    }
    let mu = mult[0];
    if let Some(&m) = mult.iter().find(|&&m| m != mu) {
        return Err(ContextualityError::NonUniform(mu, m));
    }
    let total: usize = cover.degrees.iter().sum();
    Ok(total.div_ceil(mu))
}

/// `ceil(sum d_i / max multiplicity)`; valid for any family.
pub fn packing_lower_bound(c: &Configuration, family: &CoverSpec) -> Result<usize, ContextualityError> {
    let mult = family.multiplicities(c.l())?;
    let mu = mult.iter().copied().max().unwrap_or(0);
    if mu == 0 {
        return Ok(0);
    }
    let total: usize = family.degrees.iter().sum();
    Ok(total.div_ceil(mu))
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub rank_limit: usize,
    pub seed: u64,
    pub budget: usize,
    /// Named candidate violated sets to test for achievability.
    pub candidates: Vec<(String, Vec<usize>)>,
    /// Uniform covers for tiling bounds.
    pub covers: Vec<CoverSpec>,
    /// Non-uniform families for packing bounds.
    pub packings: Vec<CoverSpec>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            rank_limit: DEFAULT_RANK_LIMIT,
            seed: DEFAULT_SEED,
            budget: 200,
            candidates: Vec::new(),
            covers: Vec::new(),
            packings: Vec::new(),
        }
    }
}

/// Best available upper and lower bounds.
pub fn certify_degree(c: &Configuration, opts: &CertifyOptions) -> Result<DegreeCertificate, ContextualityError> {
    if gf2_rank(c) <= opts.rank_limit.min(MAX_ENUMERATION_RANK) {
        return degree_exact(c, opts.rank_limit);
    }
    // candidates first: a linear solve is cheaper and more telling than search
    let mut best = degree_upper_search(c, opts.seed, 0);
    for (name, v) in &opts.candidates {
        if v.len() >= best.upper {
            continue;
        }
        if let Some(s) = solve_achievability(c, v)? {
            best = DegreeCertificate::from_assignment(c, s, UpperMethod::Achievability { candidate: name.clone() });
        }
    }
    if opts.budget > 0 {
        let searched = degree_upper_search(c, opts.seed, opts.budget);
        if searched.upper < best.upper {
            best = searched;
        }
    }
    let mut lower = (0usize, LowerMethod::Trivial);
    if solve_achievability(c, &[])?.is_none() {
        lower = (1, LowerMethod::Trivial);
    }
    for cover in &opts.covers {
        let b = tiling_lower_bound(c, cover)?;
        if b > lower.0 {
            let mu = cover.multiplicities(c.l())?[0];
            lower = (
                b,
                LowerMethod::Tiling {
                    cover: cover.name.clone(),
                    subconfigurations: cover.subconfigurations.len(),
                    multiplicity: mu,
                },
            );
        }
    }
    for fam in &opts.packings {
        let b = packing_lower_bound(c, fam)?;
        if b > lower.0 {
            let mu = fam.multiplicities(c.l())?.into_iter().max().unwrap_or(0);
            lower = (
                b,
                LowerMethod::Packing {
                    family: fam.name.clone(),
                    subconfigurations: fam.subconfigurations.len(),
                    max_multiplicity: mu,
                },
            );
        }
    }
    Ok(best.with_lower(lower.0, lower.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(list: &[&str]) -> Vec<Observable> {
        list.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn grid() -> Configuration {
        let rows = [
            ["IZ", "ZI", "ZZ"],
            ["XI", "IX", "XX"],
            ["XZ", "ZX", "YY"],
            ["IZ", "XI", "XZ"],
            ["ZI", "IX", "ZX"],
            ["ZZ", "XX", "YY"],
        ];
        Configuration::build(&rows.iter().map(|r| obs(r)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn grid_shape_and_degree() {
        let g = grid();
        assert_eq!((g.l(), g.p(), g.negative_count()), (6, 9, 1));
        assert_eq!(degree_exact(&g, 30).unwrap().upper, 1);
        assert_eq!(degree_brute_force(&g), 1);
    }

    #[test]
    fn malformed_context() {
        assert!(Configuration::build(&[obs(&["XI", "ZI", "YI"])]).is_err());
        assert!(Configuration::build(&[obs(&["XI"])]).is_err());
    }

    #[test]
    fn achievability_reproduces_target() {
        let g = grid();
        let neg: Vec<usize> = g.valuation().ones().collect();
        let s = solve_achievability(&g, &neg).unwrap().unwrap();
        assert!(s.is_zero());
        assert_eq!(violated_lines(&g, &s).unwrap(), neg);
        assert_eq!(solve_achievability(&g, &[]).unwrap(), None);
        assert!(solve_achievability(&g, &[99]).is_err());
    }

    #[test]
    fn baseline_search() {
        let g = grid();
        let c = degree_upper_search(&g, 1, 0);
        assert_eq!(c.upper, 1);
        assert!(c.assignment.is_zero());
    }

    #[test]
    fn tiling_errors() {
        let g = grid();
        let cover = CoverSpec {
            name: "self".into(),
            subconfigurations: vec![(0..6).collect()],
            degrees: vec![1],
        };
        assert_eq!(tiling_lower_bound(&g, &cover), Ok(1));
        let partial = CoverSpec {
            name: "rows".into(),
            subconfigurations: vec![vec![0, 1, 2]],
            degrees: vec![0],
        };
        assert_eq!(tiling_lower_bound(&g, &partial), Err(ContextualityError::Uncovered(3)));
        let uneven = CoverSpec {
            name: "uneven".into(),
            subconfigurations: vec![(0..6).collect(), vec![0]],
            degrees: vec![1, 0],
        };
        assert_eq!(tiling_lower_bound(&g, &uneven), Err(ContextualityError::NonUniform(2, 1)));
        assert_eq!(packing_lower_bound(&g, &uneven), Ok(1));
    }

    #[test]
    fn rank_limit_is_enforced() {
        let g = grid();
        let r = gf2_rank(&g);
        assert!(matches!(
            degree_exact(&g, r - 1),
            Err(ContextualityError::RankTooLarge { .. })
        ));
    }
}
