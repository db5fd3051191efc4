//! Split Cayley hexagons of order two inside W(5,2).
//!
//! The classical model is cut out of the parabolic quadric
//! `x1x4 + x2x5 + x3x6 + x7^2 = 0` of PG(6,2) by the Grassmann conditions
//! below and projected to PG(5,2) from the nucleus `(0,..,0,1)`, i.e. by
//! dropping `x7`. The polarity of that quadric pairs `(x_i, x_{i+3})`, which
//! is exactly the commutation form on `(a1,a2,a3,b1,b2,b3) = (x1..x6)`, so no
//! further change of basis is needed. The skew model applies Coolsaet's
//! coordinate map to the classical points before projecting.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::Observable;
use crate::polar::{GeometryError, LineId, PointId, PolarSpace};
use crate::sets::{LineSet, PointSet};

/// Order of Sp(6,2).
pub const SP62_ORDER: u64 = 1_451_520;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HexagonError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("construction produced {0} lines instead of 63")]
    LineCount(usize),
    #[error("line-set is not a generalized hexagon")]
    NotHexagon,
    #[error("{0} planar points: not a W(5,2) embedding of the hexagon")]
    PlanarCount(usize),
    #[error("skew embedding has no well-defined axis")]
    NoAxis,
    #[error("operation needs a {0:?} copy")]
    WrongKind(EmbeddingKind),
    #[error("line {0} is not a line of the hexagon")]
    NotOnHexagon(LineId),
    #[error("layer sizes {0:?} differ from (6, 24, 16, 16)")]
    Layering([usize; 4]),
    #[error("found {0} sibling hexagons of the other embedding (expected exactly 1)")]
    Sibling(usize),
    #[error("orbit of classical hexagons has {0} copies instead of 120")]
    OrbitSize(usize),
    #[error("no hexagon copy with index {0}")]
    UnknownCopy(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingKind {
    Classical,
    Skew,
}

/// 63 lines of W(5,2) forming a split Cayley hexagon, with its embedding data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HexagonCopy {
    pub lines: LineSet,
    pub kind: EmbeddingKind,
    pub planar_points: PointSet,
    pub axis: Option<LineId>,
}

impl HexagonCopy {
    /// Validate and classify a line-set.
    pub fn from_lines(w: &PolarSpace, lines: LineSet) -> Result<Self, HexagonError> {
        if !is_generalized_hexagon(w, &lines) {
            return Err(HexagonError::NotHexagon);
        }
        let c = classify_embedding(w, &lines)?;
        Ok(HexagonCopy {
            lines,
            kind: c.kind,
            planar_points: c.planar_points,
            axis: c.axis,
        })
    }

    /// The three hexagon lines through `p`.
    pub fn lines_through(&self, w: &PolarSpace, p: PointId) -> Vec<LineId> {
        w.lines_through(p)
            .iter()
            .copied()
            .filter(|&l| self.lines.contains(l))
            .collect()
    }

    /// `p` together with the six points collinear with it in the hexagon.
    pub fn perp_set(&self, w: &PolarSpace, p: PointId) -> PointSet {
        self.lines_through(w, p)
            .into_iter()
            .fold(PointSet::EMPTY, |s, l| s.union(w.line(l).point_set()))
    }
}

/// Result of [`classify_embedding`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Embedding {
    pub kind: EmbeddingKind,
    pub planar_points: PointSet,
    pub axis: Option<LineId>,
}

fn pairwise_commuting(w: &PolarSpace, pts: PointSet) -> bool {
    let v: Vec<_> = pts.iter().collect();
    v.iter().enumerate().all(|(i, &a)| {
        v[i + 1..]
            .iter()
            .all(|&b| !w.point(a).form_unchecked(&w.point(b)))
    })
}

fn hex_lines_through(w: &PolarSpace, lines: &LineSet, p: PointId) -> Vec<LineId> {
    w.lines_through(p)
        .iter()
        .copied()
        .filter(|&l| lines.contains(l))
        .collect()
}

/// Number of hexagon lines through `p` that lie in a common plane with
/// another hexagon line through `p`: 3 at planar points, 2 elsewhere.
pub fn coplanar_lines(w: &PolarSpace, lines: &LineSet, p: PointId) -> usize {
    let through = hex_lines_through(w, lines, p);
    let mut hit = [false; 3];
    for i in 0..through.len() {
        for j in i + 1..through.len() {
            let u = w.line(through[i]).point_set().union(w.line(through[j]).point_set());
            if pairwise_commuting(w, u) {
                hit[i] = true;
                hit[j] = true;
            }
        }
    }
    hit.iter().filter(|&&b| b).count()
}

/// A point is planar when the seven points on its three lines commute.
pub fn planar_points(w: &PolarSpace, lines: &LineSet) -> PointSet {
    (0..w.points().len())
        .filter(|&p| {
            let s = hex_lines_through(w, lines, p)
                .into_iter()
                .fold(PointSet::EMPTY, |s, l| s.union(w.line(l).point_set()));
            pairwise_commuting(w, s)
        })
        .collect()
}

/// Classical (63 planar points) or skew (15, with an axis).
pub fn classify_embedding(w: &PolarSpace, lines: &LineSet) -> Result<Embedding, HexagonError> {
    let planar = planar_points(w, lines);
    match planar.len() {
        63 => Ok(Embedding {
            kind: EmbeddingKind::Classical,
            planar_points: planar,
            axis: None,
        }),
        15 => {
            // the axis and the six lines meeting it are the lines made of planar points
            let full: Vec<LineId> = lines
                .iter()
                .filter(|&l| w.line(l).point_set().is_subset(planar))
                .collect();
            if full.len() != 7 {
                return Err(HexagonError::NoAxis);
            }
            let axis = full
                .iter()
                .copied()
                .find(|&a| full.iter().all(|&b| a == b || w.lines_meet(a, b)))
                .ok_or(HexagonError::NoAxis)?;
            for &p in &w.line(axis).points {
                let k = full
                    .iter()
                    .filter(|&&l| l != axis && w.line(l).contains(p))
                    .count();
                if k != 2 {
                    return Err(HexagonError::NoAxis);
                }
            }
            Ok(Embedding {
                kind: EmbeddingKind::Skew,
                planar_points: planar,
                axis: Some(axis),
            })
        }
        k => Err(HexagonError::PlanarCount(k)),
    }
}

/// Collinearity neighbourhoods of a partial geometry.
fn neighbours(w: &PolarSpace, lines: &LineSet) -> [u64; 64] {
    let mut nb = [0u64; 64];
    for l in lines.iter() {
        let s = w.line(l).point_set();
        for p in s.iter() {
            nb[p] |= s.0 & !(1u64 << p);
        }
    }
    nb
}

/// Points within `depth` collinearity steps of `p`.
fn ball(nb: &[u64; 64], p: PointId, depth: usize) -> u64 {
    let mut reach = 1u64 << p;
    let mut frontier = reach;
    for _ in 0..depth {
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            let q = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= nb[q];
        }
        frontier = next & !reach;
        reach |= next;
        if frontier == 0 {
            break;
        }
    }
    reach
}

/// 63 points, 63 lines, three lines per point, incidence girth at least 12.
pub fn is_generalized_hexagon(w: &PolarSpace, lines: &LineSet) -> bool {
    if w.n() != 3 || lines.len() != 63 {
        return false;
    }
    let mut deg = [0u8; 63];
    for l in lines.iter() {
        for &p in &w.line(l).points {
            deg[p] += 1;
        }
    }
    if deg.iter().any(|&d| d != 3) {
        return false;
    }
    incidence_girth(w, lines) >= 12
}

/// Girth of the point-line incidence graph (`usize::MAX` if acyclic).
pub fn incidence_girth(w: &PolarSpace, lines: &LineSet) -> usize {
    // vertices: points 0..63, lines 63.. (indexed by position in `ls`)
    let ls = lines.to_vec();
    let np = w.points().len();
    let nv = np + ls.len();
    let mut adj = vec![Vec::new(); nv];
    for (i, &l) in ls.iter().enumerate() {
        for &p in &w.line(l).points {
            adj[p].push(np + i);
            adj[np + i].push(p);
        }
    }
    let mut girth = usize::MAX;
    let mut dist = vec![usize::MAX; nv];
    let mut parent = vec![usize::MAX; nv];
    let mut queue = std::collections::VecDeque::new();
    for root in 0..nv {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[root] = 0;
        parent[root] = usize::MAX;
        queue.clear();
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            if 2 * dist[u] >= girth {
                break;
            }
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    queue.push_back(v);
                } else if parent[u] != v {
                    girth = girth.min(dist[u] + dist[v] + 1);
                }
            }
        }
    }
    girth
}

type Pg6Point = u8;

fn coord(x: Pg6Point, i: usize) -> u8 {
    // x1 is the most significant of seven bits
    (x >> (7 - i)) & 1
}

fn parabolic_q(x: Pg6Point) -> u8 {
    (coord(x, 1) & coord(x, 4)) ^ (coord(x, 2) & coord(x, 5)) ^ (coord(x, 3) & coord(x, 6)) ^ coord(x, 7)
}

fn grassmann(x: Pg6Point, y: Pg6Point, i: usize, j: usize) -> u8 {
    (coord(x, i) & coord(y, j)) ^ (coord(x, j) & coord(y, i))
}

fn on_hexagon(x: Pg6Point, y: Pg6Point) -> bool {
    let p = |i, j| grassmann(x, y, i, j);
    p(6, 2) == p(1, 7)
        && p(1, 3) == p(7, 2)
        && p(2, 4) == p(3, 7)
        && p(3, 5) == p(7, 4)
        && p(4, 6) == p(5, 7)
        && p(5, 1) == p(7, 6)
        && (p(1, 4) ^ p(2, 5) ^ p(3, 6)) == 0
}

/// The 63 hexagon lines of the parabolic quadric, as point triples in PG(6,2).
pub fn parabolic_hexagon_lines() -> Vec<[Pg6Point; 3]> {
    let pts: Vec<Pg6Point> = (1u8..128).filter(|&x| parabolic_q(x) == 0).collect();
    let mut out = HashSet::new();
    for (i, &x) in pts.iter().enumerate() {
        for &y in &pts[i + 1..] {
            let z = x ^ y;
            if parabolic_q(z) != 0 || !on_hexagon(x, y) {
                continue;
            }
            let mut t = [x, y, z];
            t.sort_unstable();
            out.insert(t);
        }
    }
    let mut v: Vec<_> = out.into_iter().collect();
    v.sort_unstable();
    v
}

/// Coolsaet's skew coordinate map.
pub fn skew_map(x: Pg6Point) -> Pg6Point {
    let c = |i| coord(x, i);
    let f4 = (c(3) & c(5)) ^ (c(7) & c(4));
    let f5 = (c(4) & c(6)) ^ (c(7) & c(5));
    let y1 = c(1) ^ c(6) ^ f5;
    let y2 = c(2) ^ c(3) ^ f4;
    (y1 << 6) | (y2 << 5) | (x & 0b001_1111)
}

/// Drop `x7` and read `(x1..x6)` as `(a1,a2,a3,b1,b2,b3)`.
pub fn project(x: Pg6Point) -> Observable {
    Observable::from_bits(3, (x >> 1) as u16).expect("three qubits")
}

fn realize(w: &PolarSpace, triples: &[[Pg6Point; 3]], map: impl Fn(Pg6Point) -> Pg6Point) -> Result<LineSet, HexagonError> {
    if triples.len() != 63 {
        return Err(HexagonError::LineCount(triples.len()));
    }
    let mut set = LineSet::EMPTY;
    for t in triples {
        let obs = t.map(|x| project(map(x)));
        set.insert(w.line_of(obs)?);
    }
    if set.len() != 63 {
        return Err(HexagonError::LineCount(set.len()));
    }
    Ok(set)
}

pub fn build_classical_hexagon(w: &PolarSpace) -> Result<HexagonCopy, HexagonError> {
    let lines = realize(w, &parabolic_hexagon_lines(), |x| x)?;
    let h = HexagonCopy::from_lines(w, lines)?;
    if h.kind != EmbeddingKind::Classical {
        return Err(HexagonError::WrongKind(EmbeddingKind::Classical));
    }
    Ok(h)
}

pub fn build_skew_hexagon(w: &PolarSpace) -> Result<HexagonCopy, HexagonError> {
    let lines = realize(w, &parabolic_hexagon_lines(), skew_map)?;
    let h = HexagonCopy::from_lines(w, lines)?;
    if h.kind != EmbeddingKind::Skew {
        return Err(HexagonError::WrongKind(EmbeddingKind::Skew));
    }
    Ok(h)
}

/// Line layers of a hexagon relative to a reference line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layering {
    pub axis: LineId,
    pub yellow: LineSet,
    pub gray: LineSet,
    pub red: LineSet,
    pub blue: LineSet,
}

impl Layering {
    pub fn all(&self) -> LineSet {
        LineSet::from_ids([self.axis])
            .union(self.yellow)
            .union(self.gray)
            .union(self.red)
            .union(self.blue)
    }
}

fn meeting(w: &PolarSpace, pool: &LineSet, targets: &LineSet) -> LineSet {
    pool.iter()
        .filter(|&l| targets.iter().any(|t| w.lines_meet(l, t)))
        .collect()
}

/// Layers around `axis`: lines meeting it, lines meeting those, and the two
/// point-disjoint halves of the rest.
pub fn layers_around(w: &PolarSpace, lines: &LineSet, axis: LineId) -> Result<Layering, HexagonError> {
    if !lines.contains(axis) {
        return Err(HexagonError::NotOnHexagon(axis));
    }
    let axis_set = LineSet::from_ids([axis]);
    let rest = lines.difference(axis_set);
    let yellow = meeting(w, &rest, &axis_set);
    let rest = rest.difference(yellow);
    let gray = meeting(w, &rest, &yellow);
    let rest = rest.difference(gray);
    // connected components of the remaining lines under "share a point"
    let mut comps: Vec<LineSet> = Vec::new();
    let mut left = rest;
    while let Some(start) = left.to_vec().first().copied() {
        let mut comp = LineSet::from_ids([start]);
        loop {
            let grown = comp.union(meeting(w, &left, &comp));
            if grown == comp {
                break;
            }
            comp = grown;
        }
        left = left.difference(comp);
        comps.push(comp);
    }
    let sizes = |r: usize, b: usize| [yellow.len(), gray.len(), r, b];
    if comps.len() != 2 {
        let total: usize = comps.iter().map(|c| c.len()).sum();
        return Err(HexagonError::Layering(sizes(total, 0)));
    }
    // "red" holds the smallest line
    let (red, blue) = if comps[0].iter().next() < comps[1].iter().next() {
        (comps[0], comps[1])
    } else {
        (comps[1], comps[0])
    };
    let s = sizes(red.len(), blue.len());
    if s != [6, 24, 16, 16] {
        return Err(HexagonError::Layering(s));
    }
    Ok(Layering {
        axis,
        yellow,
        gray,
        red,
        blue,
    })
}

pub fn layer_decompose(w: &PolarSpace, h: &HexagonCopy) -> Result<Layering, HexagonError> {
    let axis = match (h.kind, h.axis) {
        (EmbeddingKind::Skew, Some(a)) => a,
        _ => return Err(HexagonError::WrongKind(EmbeddingKind::Skew)),
    };
    layers_around(w, &h.lines, axis)
}

/// All ways to complete `keep` to a generalized hexagon with W(5,2) lines.
pub fn hexagon_completions(w: &PolarSpace, keep: &LineSet) -> Vec<LineSet> {
    let mut need = [0i32; 63];
    need.iter_mut().for_each(|n| *n = 3);
    for l in keep.iter() {
        for &p in &w.line(l).points {
            need[p] -= 1;
        }
    }
    if need.iter().any(|&n| n < 0) {
        return Vec::new();
    }
    let candidates: Vec<LineId> = (0..w.lines().len())
        .filter(|&l| !keep.contains(l) && w.line(l).points.iter().all(|&p| need[p] > 0))
        .collect();
    let mut search = Completion {
        w,
        candidates,
        need,
        current: *keep,
        nb: neighbours(w, keep),
        found: Vec::new(),
    };
    search.run();
    search.found
}

struct Completion<'a> {
    w: &'a PolarSpace,
    candidates: Vec<LineId>,
    need: [i32; 63],
    current: LineSet,
    nb: [u64; 64],
    found: Vec<LineSet>,
}

impl Completion<'_> {
    fn fits(&self, l: LineId) -> bool {
        let pts = self.w.line(l).points;
        if pts.iter().any(|&p| self.need[p] <= 0) || self.current.contains(l) {
            return false;
        }
        // a new line closes no polygon with fewer than six sides iff its
        // points are pairwise more than four collinearity steps apart
        for i in 0..3 {
            let reach = ball(&self.nb, pts[i], 4);
            for &q in &pts[i + 1..] {
                if reach >> q & 1 == 1 {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self) {
        // most constrained deficient point
        let mut best: Option<(usize, Vec<LineId>)> = None;
        for p in 0..63 {
            if self.need[p] <= 0 {
                continue;
            }
            let opts: Vec<LineId> = self
                .candidates
                .iter()
                .copied()
                .filter(|&l| self.w.line(l).contains(p) && self.fits(l))
                .collect();
            if (opts.len() as i32) < self.need[p] {
                return;
            }
            if best.as_ref().is_none_or(|(_, b)| opts.len() < b.len()) {
                best = Some((p, opts));
            }
        }
        let Some((p, opts)) = best else {
            if is_generalized_hexagon(self.w, &self.current) {
                self.found.push(self.current);
            }
            return;
        };
        for (i, &l) in opts.iter().enumerate() {
            // lines through p are chosen in increasing position to avoid repeats
            if self.need[p] == 3 && i + 3 > opts.len() {
                break;
            }
            let saved_nb = self.nb;
            self.apply(l, true);
            if self.need[p] > 0 {
                // remaining lines through p must come later in `opts`
                let later: Vec<LineId> = opts[i + 1..].to_vec();
                self.fill_point(p, &later);
            } else {
                self.run();
            }
            self.apply(l, false);
            self.nb = saved_nb;
        }
    }

    fn fill_point(&mut self, p: PointId, opts: &[LineId]) {
        for (i, &l) in opts.iter().enumerate() {
            if !self.fits(l) {
                continue;
            }
            let saved_nb = self.nb;
            self.apply(l, true);
            if self.need[p] > 0 {
                self.fill_point(p, &opts[i + 1..]);
            } else {
                self.run();
            }
            self.apply(l, false);
            self.nb = saved_nb;
        }
    }

    fn apply(&mut self, l: LineId, add: bool) {
        let s = self.w.line(l).point_set();
        for p in s.iter() {
            self.need[p] += if add { -1 } else { 1 };
            if add {
                self.nb[p] |= s.0 & !(1u64 << p);
            }
        }
        if add {
            self.current.insert(l);
        } else {
            self.current.remove(l);
        }
    }
}

/// Replace the gray layer around `reference` so that the embedding kind
/// flips, keeping the other 39 lines. The sibling must be unique.
pub fn swap_embedding(w: &PolarSpace, h: &HexagonCopy, reference: LineId) -> Result<HexagonCopy, HexagonError> {
    let layers = layers_around(w, &h.lines, reference)?;
    let keep = h.lines.difference(layers.gray);
    let target = match h.kind {
        EmbeddingKind::Classical => EmbeddingKind::Skew,
        EmbeddingKind::Skew => EmbeddingKind::Classical,
    };
    let siblings: Vec<HexagonCopy> = hexagon_completions(w, &keep)
        .into_iter()
        .filter_map(|ls| HexagonCopy::from_lines(w, ls).ok())
        .filter(|c| c.kind == target)
        .collect();
    match siblings.as_slice() {
        [one] => Ok(*one),
        other => Err(HexagonError::Sibling(other.len())),
    }
}

pub fn skew_to_classical(w: &PolarSpace, h: &HexagonCopy) -> Result<HexagonCopy, HexagonError> {
    match (h.kind, h.axis) {
        (EmbeddingKind::Skew, Some(axis)) => swap_embedding(w, h, axis),
        _ => Err(HexagonError::WrongKind(EmbeddingKind::Skew)),
    }
}

pub fn classical_to_skew(w: &PolarSpace, h: &HexagonCopy, reference: LineId) -> Result<HexagonCopy, HexagonError> {
    if h.kind != EmbeddingKind::Classical {
        return Err(HexagonError::WrongKind(EmbeddingKind::Classical));
    }
    if !h.lines.contains(reference) {
        return Err(HexagonError::NotOnHexagon(reference));
    }
    let s = swap_embedding(w, h, reference)?;
    if s.axis != Some(reference) {
        return Err(HexagonError::NoAxis);
    }
    Ok(s)
}

/// The 120 classical copies: the symplectic orbit of the canonical one.
pub fn enumerate_classical_hexagons(w: &PolarSpace) -> Result<Vec<HexagonCopy>, HexagonError> {
    let seed = build_classical_hexagon(w)?;
    let orbit = w.symplectic_orbit(&seed.lines, 120).map_err(|e| match e {
        GeometryError::OrbitOverflow(_) => HexagonError::OrbitSize(121),
        other => other.into(),
    })?;
    if orbit.len() != 120 {
        return Err(HexagonError::OrbitSize(orbit.len()));
    }
    let mut copies = orbit
        .into_iter()
        .map(|ls| {
            let h = HexagonCopy::from_lines(w, ls)?;
            if h.kind != EmbeddingKind::Classical {
                return Err(HexagonError::WrongKind(EmbeddingKind::Classical));
            }
            Ok(h)
        })
        .collect::<Result<Vec<_>, _>>()?;
    copies.sort_by_key(|h| h.lines);
    Ok(copies)
}

/// Every skew copy, indexed `63 * classical_index + position of the
/// reference line` in the classical copy's sorted line list.
pub fn enumerate_skew_hexagons(w: &PolarSpace, classical: &[HexagonCopy]) -> Result<Vec<HexagonCopy>, HexagonError> {
    let mut out = Vec::with_capacity(classical.len() * 63);
    for h in classical {
        for l in h.lines.iter() {
            out.push(classical_to_skew(w, h, l)?);
        }
    }
    Ok(out)
}

/// The skew copy with index `id` in the numbering of
/// [`enumerate_skew_hexagons`], built on its own.
pub fn skew_hexagon(w: &PolarSpace, classical: &[HexagonCopy], id: usize) -> Result<HexagonCopy, HexagonError> {
    let h = classical.get(id / 63).ok_or(HexagonError::UnknownCopy(id))?;
    let reference = h.lines.iter().nth(id % 63).expect("63 lines");
    classical_to_skew(w, h, reference)
}

/// Whether every `A-B-C` label names a line of `h`.
pub fn contains_labels(w: &PolarSpace, h: &HexagonCopy, labels: &[&str]) -> bool {
    labels
        .iter()
        .all(|s| w.parse_line(s).map(|l| h.lines.contains(l)).unwrap_or(false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> &'static PolarSpace {
        PolarSpace::three_qubit()
    }

    #[test]
    fn parabolic_model_has_63_lines() {
        assert_eq!(parabolic_hexagon_lines().len(), 63);
    }

    #[test]
    fn skew_map_preserves_the_quadric() {
        for x in 1u8..128 {
            assert_eq!(parabolic_q(x), parabolic_q(skew_map(x)));
        }
    }

    #[test]
    fn classical_copy() {
        let h = build_classical_hexagon(w()).unwrap();
        assert_eq!(h.lines.len(), 63);
        assert_eq!(h.planar_points.len(), 63);
        assert_eq!(h.axis, None);
        for p in 0..63 {
            let perp = h.perp_set(w(), p);
            assert_eq!(perp.len(), 7);
            assert!(pairwise_commuting(w(), perp));
            assert_eq!(coplanar_lines(w(), &h.lines, p), 3);
        }
    }

    #[test]
    fn skew_copy() {
        let h = build_skew_hexagon(w()).unwrap();
        assert_eq!(h.kind, EmbeddingKind::Skew);
        assert_eq!(h.planar_points.len(), 15);
        let axis = h.axis.unwrap();
        assert!(w().line(axis).point_set().is_subset(h.planar_points));
        for p in 0..63 {
            let expect = if h.planar_points.contains(p) { 3 } else { 2 };
            assert_eq!(coplanar_lines(w(), &h.lines, p), expect);
        }
    }

    #[test]
    fn layering_sizes() {
        let h = build_skew_hexagon(w()).unwrap();
        let lay = layer_decompose(w(), &h).unwrap();
        assert_eq!(
            [lay.yellow.len(), lay.gray.len(), lay.red.len(), lay.blue.len()],
            [6, 24, 16, 16]
        );
        assert_eq!(lay.all(), h.lines);
        assert!(lay.red.intersection(lay.blue).is_empty());
        assert!(w().points_of(&lay.red).is_disjoint(w().points_of(&lay.blue)));
        let c = build_classical_hexagon(w()).unwrap();
        assert!(layer_decompose(w(), &c).is_err());
    }

    #[test]
    fn swap_round_trip() {
        let s = build_skew_hexagon(w()).unwrap();
        let lay = layer_decompose(w(), &s).unwrap();
        let c = skew_to_classical(w(), &s).unwrap();
        assert_eq!(c.kind, EmbeddingKind::Classical);
        assert_eq!(c.lines.intersection(s.lines).len(), 39);
        let back = classical_to_skew(w(), &c, s.axis.unwrap()).unwrap();
        assert_eq!(back.lines, s.lines);
        assert_eq!(back.axis, s.axis);
        // the lines the sibling adds are the gray layer of the sibling itself
        let sib_layers = layers_around(w(), &c.lines, s.axis.unwrap()).unwrap();
        assert_eq!(c.lines.difference(s.lines), sib_layers.gray);
        assert_eq!(s.lines.difference(c.lines), lay.gray);
    }

    #[test]
    fn not_a_hexagon() {
        let mut ls = LineSet::from_ids(0..63);
        assert!(!is_generalized_hexagon(w(), &ls));
        ls = build_classical_hexagon(w()).unwrap().lines;
        assert!(is_generalized_hexagon(w(), &ls));
        let first = ls.iter().next().unwrap();
        ls.remove(first);
        assert!(!is_generalized_hexagon(w(), &ls));
    }
}
