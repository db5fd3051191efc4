//! How hexagon copies meet the other subgeometries of W(5,2): planes and
//! plane spreads, doilies, quadrics, doily partitions and one-qubit
//! trace-outs.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hexagon::{EmbeddingKind, HexagonCopy, HexagonError};
use crate::pauli::Observable;
use crate::polar::{Doily, GeometryError, IsotropicPlane, LineId, PointId, PolarSpace, Quadric, QuadricKind};
use crate::sets::{LineSet, PointSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Hexagon(#[from] HexagonError),
    #[error("plane {plane} contains {lines} hexagon lines (expected 0 or 3)")]
    PlaneClass { plane: usize, lines: usize },
    #[error("Heawood plane {0} has {1} partners (expected exactly 1)")]
    Partner(usize, usize),
    #[error("spread {0:?} fits neither spread kind")]
    SpreadKind(Vec<usize>),
    #[error("doily shares lines {0:?} with the hexagon: pattern outside the known taxonomy")]
    DoilyPattern(Vec<LineId>),
    #[error("quadric {index} shares {lines} lines with the hexagon in an unexpected pattern")]
    QuadricPattern { index: Observable, lines: usize },
    #[error("no partition of the hexagon lines into doily triples exists")]
    NoPartition,
    #[error("qubit {0} out of range")]
    Qubit(usize),
    #[error("shared lines are not lines of the doily")]
    NotInDoily,
}

/// Role of a plane of W(5,2) with respect to a classical hexagon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum PlaneClass {
    /// Perp-set of a hexagon point: holds the three hexagon lines through it.
    Perp { nucleus: PointId },
    /// Holds no hexagon line; `partner` completes its Heawood graph.
    Heawood { partner: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneTaxonomy {
    pub planes: Vec<IsotropicPlane>,
    pub classes: Vec<PlaneClass>,
}

impl PlaneTaxonomy {
    pub fn perp_count(&self) -> usize {
        self.classes
            .iter()
            .filter(|c| matches!(c, PlaneClass::Perp { .. }))
            .count()
    }

    pub fn heawood_count(&self) -> usize {
        self.classes.len() - self.perp_count()
    }

    /// Unordered Heawood partner pairs `(i, j)`, `i < j`.
    pub fn heawood_pairs(&self) -> Vec<(usize, usize)> {
        self.classes
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match *c {
                PlaneClass::Heawood { partner } if i < partner => Some((i, partner)),
                _ => None,
            })
            .collect()
    }

    /// Index of the perp-plane with the given nucleus.
    pub fn perp_plane(&self, nucleus: PointId) -> Option<usize> {
        self.classes
            .iter()
            .position(|c| *c == PlaneClass::Perp { nucleus })
    }

    pub fn plane_index(&self, points: PointSet) -> Option<usize> {
        self.planes.binary_search(&IsotropicPlane { points }).ok()
    }
}

fn require_kind(h: &HexagonCopy, kind: EmbeddingKind) -> Result<(), AtlasError> {
    if h.kind != kind {
        return Err(HexagonError::WrongKind(kind).into());
    }
    Ok(())
}

/// Number of hexagon lines with exactly one point in each of two disjoint
/// planes; 21 exactly when the planes are Heawood partners.
fn bridging_lines(w: &PolarSpace, h: &HexagonCopy, a: PointSet, b: PointSet) -> usize {
    h.lines
        .iter()
        .filter(|&l| {
            let pts = w.line(l).point_set();
            pts.intersection(a).len() == 1 && pts.intersection(b).len() == 1
        })
        .count()
}

/// Split the 135 planes into perp-planes and Heawood planes, pairing the
/// latter by the 21 bridging hexagon lines.
pub fn classify_planes(w: &PolarSpace, h: &HexagonCopy) -> Result<PlaneTaxonomy, AtlasError> {
    require_kind(h, EmbeddingKind::Classical)?;
    let planes = w.enumerate_planes()?;
    let mut classes = Vec::with_capacity(planes.len());
    let mut heawood = Vec::new();
    for (i, pl) in planes.iter().enumerate() {
        let inside = w.lines_within(pl.points).intersection(h.lines);
        match inside.len() {
            3 => {
                let common = inside
                    .iter()
                    .fold(pl.points, |s, l| s.intersection(w.line(l).point_set()));
                let nucleus = common.first().ok_or(AtlasError::PlaneClass { plane: i, lines: 3 })?;
                classes.push(PlaneClass::Perp { nucleus });
            }
            0 => {
                heawood.push(i);
                classes.push(PlaneClass::Heawood { partner: usize::MAX });
            }
            k => return Err(AtlasError::PlaneClass { plane: i, lines: k }),
        }
    }
    for &i in &heawood {
        let partners: Vec<usize> = heawood
            .iter()
            .copied()
            .filter(|&j| {
                j != i
                    && planes[i].points.is_disjoint(planes[j].points)
                    && bridging_lines(w, h, planes[i].points, planes[j].points) == 21
            })
            .collect();
        if partners.len() != 1 {
            return Err(AtlasError::Partner(i, partners.len()));
        }
        classes[i] = PlaneClass::Heawood { partner: partners[0] };
    }
    Ok(PlaneTaxonomy { planes, classes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpreadKind {
    /// Seven perp-planes and one Heawood partner pair.
    First,
    /// Three perp-planes and six Heawood planes from six different pairs.
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneSpread {
    /// Plane indices into the taxonomy, ascending.
    pub planes: Vec<usize>,
    pub kind: SpreadKind,
}

/// All sets of nine pairwise disjoint planes (spreads), in lexicographic order.
pub fn enumerate_spreads(planes: &[IsotropicPlane]) -> Vec<Vec<usize>> {
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); 64];
    for (i, pl) in planes.iter().enumerate() {
        for p in pl.points.iter() {
            containing[p].push(i);
        }
    }
    let all = planes
        .iter()
        .fold(PointSet::EMPTY, |s, p| s.union(p.points));
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    spread_search(planes, &containing, all, PointSet::EMPTY, &mut chosen, &mut out);
    for s in &mut out {
        s.sort_unstable();
    }
    out.sort();
    out
}

fn spread_search(
    planes: &[IsotropicPlane],
    containing: &[Vec<usize>],
    all: PointSet,
    covered: PointSet,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let Some(p) = all.difference(covered).first() else {
        out.push(chosen.clone());
        return;
    };
    for &i in &containing[p] {
        if planes[i].points.is_disjoint(covered) {
            chosen.push(i);
            spread_search(planes, containing, all, covered.union(planes[i].points), chosen, out);
            chosen.pop();
        }
    }
}

/// All plane spreads, classified relative to a classical hexagon.
pub fn enumerate_plane_spreads(tax: &PlaneTaxonomy) -> Result<Vec<PlaneSpread>, AtlasError> {
    enumerate_spreads(&tax.planes)
        .into_iter()
        .map(|planes| {
            let kind = spread_kind(tax, &planes).ok_or_else(|| AtlasError::SpreadKind(planes.clone()))?;
            Ok(PlaneSpread { planes, kind })
        })
        .collect()
}

fn spread_kind(tax: &PlaneTaxonomy, planes: &[usize]) -> Option<SpreadKind> {
    let partners: Vec<usize> = planes
        .iter()
        .filter_map(|&i| match tax.classes[i] {
            PlaneClass::Heawood { partner } => Some(partner),
            PlaneClass::Perp { .. } => None,
        })
        .collect();
    let paired = partners.iter().filter(|p| planes.contains(p)).count();
    match (planes.len() - partners.len(), partners.len(), paired) {
        (7, 2, 2) => Some(SpreadKind::First),
        (3, 6, 0) => Some(SpreadKind::Second),
        _ => None,
    }
}

/// Shapes of the line-set a doily shares with a hexagon copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DoilyPattern {
    /// Five lines of a doily spread plus one line meeting three of them.
    P6,
    /// Three pairwise disjoint lines of one grid.
    P3Grid,
    /// Two disjoint lines and a common transversal.
    P3Quadrangle,
    /// Two concurrent lines.
    P2Concurrent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoilyHexPattern {
    pub shared: Vec<LineId>,
    pub pattern: DoilyPattern,
}

fn pairwise_disjoint(w: &PolarSpace, ls: &[LineId]) -> bool {
    ls.iter()
        .enumerate()
        .all(|(i, &a)| ls[i + 1..].iter().all(|&b| !w.lines_meet(a, b)))
}

/// Classify the lines a doily shares with a hexagon copy.
pub fn classify_doily_hexagon(w: &PolarSpace, d: &Doily, h: &HexagonCopy) -> Result<DoilyHexPattern, AtlasError> {
    let shared = d.lines.intersection(h.lines).to_vec();
    let fail = || AtlasError::DoilyPattern(shared.clone());
    let pattern = match shared.len() {
        2 if w.lines_meet(shared[0], shared[1]) => DoilyPattern::P2Concurrent,
        3 if pairwise_disjoint(w, &shared) => {
            let set = LineSet::from_ids(shared.iter().copied());
            if w.grids_in(&d.lines).iter().any(|g| g.reguli.iter().any(|r| LineSet::from_ids(*r) == set)) {
                DoilyPattern::P3Grid
            } else {
                return Err(fail());
            }
        }
        3 => {
            let meets = |i: usize, j: usize| w.lines_meet(shared[i], shared[j]);
            let degrees: Vec<usize> = (0..3)
                .map(|i| (0..3).filter(|&j| j != i && meets(i, j)).count())
                .collect();
            let common = shared
                .iter()
                .fold(PointSet(u64::MAX), |s, &l| s.intersection(w.line(l).point_set()));
            if degrees.iter().filter(|&&k| k == 2).count() == 1 && common.is_empty() {
                DoilyPattern::P3Quadrangle
            } else {
                return Err(fail());
            }
        }
        6 => {
            let spread = (0..6).find(|&skip| {
                let rest: Vec<LineId> = shared.iter().copied().enumerate().filter(|&(i, _)| i != skip).map(|(_, l)| l).collect();
                pairwise_disjoint(w, &rest) && rest.iter().filter(|&&l| w.lines_meet(l, shared[skip])).count() == 3
            });
            if spread.is_some() {
                DoilyPattern::P6
            } else {
                return Err(fail());
            }
        }
        _ => return Err(fail()),
    };
    Ok(DoilyHexPattern { shared, pattern })
}

/// Classical copies meet every doily in three lines of one grid.
pub fn classify_doily_classical(w: &PolarSpace, d: &Doily, h: &HexagonCopy) -> Result<DoilyHexPattern, AtlasError> {
    let p = classify_doily_hexagon(w, d, h)?;
    if p.pattern != DoilyPattern::P3Grid {
        return Err(AtlasError::DoilyPattern(p.shared));
    }
    Ok(p)
}

/// Number of the doily's ten grids containing none of `shared`.
pub fn grids_avoiding(w: &PolarSpace, d: &Doily, shared: &LineSet) -> Result<usize, AtlasError> {
    if !shared.is_subset(d.lines) {
        return Err(AtlasError::NotInDoily);
    }
    Ok(w
        .grids_of_doily(d)
        .iter()
        .filter(|g| g.lines().intersection(*shared).is_empty())
        .count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadricPattern {
    /// Nine pairwise disjoint lines covering the 27 points of an elliptic quadric.
    NineSpread,
    /// 21 lines covering the 35 points of a hyperbolic quadric, arranged as
    /// the edges of the Heawood graph.
    Heawood,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadricShare {
    pub shared: LineSet,
    pub pattern: QuadricPattern,
}

/// Classify the lines a classical hexagon shares with a quadric.
pub fn classify_hexagon_quadric(w: &PolarSpace, h: &HexagonCopy, q: &Quadric) -> Result<QuadricShare, AtlasError> {
    require_kind(h, EmbeddingKind::Classical)?;
    let shared = q.lines.intersection(h.lines);
    let ls = shared.to_vec();
    let covered = w.points_of(&shared);
    let fail = || AtlasError::QuadricPattern {
        index: q.index,
        lines: ls.len(),
    };
    let pattern = match q.kind {
        QuadricKind::Elliptic => {
            if ls.len() != 9 || !pairwise_disjoint(w, &ls) || covered != q.points {
                return Err(fail());
            }
            // maximal distance: no hexagon line meets two of them
            let transversal = h.lines.difference(shared).iter().any(|t| {
                ls.iter().filter(|&&l| w.lines_meet(l, t)).count() >= 2
            });
            if transversal {
                return Err(fail());
            }
            QuadricPattern::NineSpread
        }
        QuadricKind::Hyperbolic => {
            if ls.len() != 21 || covered != q.points || !is_heawood_pattern(w, &ls) {
                return Err(fail());
            }
            QuadricPattern::Heawood
        }
    };
    Ok(QuadricShare { shared, pattern })
}

/// The points on two of the lines are vertices, each line an edge: the
/// result must be cubic, bipartite, on 14 vertices with girth 6.
fn is_heawood_pattern(w: &PolarSpace, ls: &[LineId]) -> bool {
    let mut count: HashMap<PointId, usize> = HashMap::new();
    for &l in ls {
        for &p in &w.line(l).points {
            *count.entry(p).or_default() += 1;
        }
    }
    let mut vertices: Vec<PointId> = count.iter().filter(|(_, &c)| c >= 2).map(|(&p, _)| p).collect();
    vertices.sort_unstable();
    if vertices.len() != 14 || vertices.iter().any(|p| count[p] != 3) {
        return false;
    }
    let index: HashMap<PointId, usize> = vertices.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut adj = vec![Vec::new(); 14];
    for &l in ls {
        let ends: Vec<usize> = w.line(l).points.iter().filter_map(|p| index.get(p).copied()).collect();
        if ends.len() != 2 {
            return false;
        }
        adj[ends[0]].push(ends[1]);
        adj[ends[1]].push(ends[0]);
    }
    graph_girth(&adj) == 6 && is_bipartite(&adj)
}

fn is_bipartite(adj: &[Vec<usize>]) -> bool {
    let mut color = vec![u8::MAX; adj.len()];
    for s in 0..adj.len() {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if color[u] == u8::MAX {
                    color[u] = 1 - color[v];
                    stack.push(u);
                } else if color[u] == color[v] {
                    return false;
                }
            }
        }
    }
    true
}

fn graph_girth(adj: &[Vec<usize>]) -> usize {
    let mut best = usize::MAX;
    for s in 0..adj.len() {
        let mut dist = vec![usize::MAX; adj.len()];
        let mut parent = vec![usize::MAX; adj.len()];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    parent[u] = v;
                    queue.push_back(u);
                } else if parent[v] != u {
                    best = best.min(dist[u] + dist[v] + 1);
                }
            }
        }
    }
    best
}

/// 21 doilies (indices into `doilies`) whose shared triples with a classical
/// hexagon partition its 63 lines.
pub fn doily_partition_of_hexagon(w: &PolarSpace, h: &HexagonCopy, doilies: &[Doily]) -> Result<Vec<usize>, AtlasError> {
    require_kind(h, EmbeddingKind::Classical)?;
    let mut candidates: Vec<(usize, LineSet)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, d) in doilies.iter().enumerate() {
        let shared = d.lines.intersection(h.lines);
        if shared.len() == 3 && pairwise_disjoint(w, &shared.to_vec()) && seen.insert(shared) {
            candidates.push((i, shared));
        }
    }
    let mut by_line: Vec<Vec<usize>> = vec![Vec::new(); w.lines().len()];
    for (k, (_, s)) in candidates.iter().enumerate() {
        for l in s.iter() {
            by_line[l].push(k);
        }
    }
    let mut chosen = Vec::new();
    if partition_search(&candidates, &by_line, h.lines, &mut chosen) {
        let mut out: Vec<usize> = chosen.iter().map(|&k| candidates[k].0).collect();
        out.sort_unstable();
        Ok(out)
    } else {
        Err(AtlasError::NoPartition)
    }
}

fn partition_search(cands: &[(usize, LineSet)], by_line: &[Vec<usize>], left: LineSet, chosen: &mut Vec<usize>) -> bool {
    if left.is_empty() {
        return true;
    }
    // most constrained uncovered line
    let mut best: Option<(usize, Vec<usize>)> = None;
    for l in left.iter() {
        let opts: Vec<usize> = by_line[l].iter().copied().filter(|&k| cands[k].1.is_subset(left)).collect();
        if best.as_ref().is_none_or(|(_, o)| opts.len() < o.len()) {
            let empty = opts.is_empty();
            best = Some((l, opts));
            if empty {
                return false;
            }
        }
    }
    let (_, opts) = best.expect("left is non-empty");
    for k in opts {
        chosen.push(k);
        if partition_search(cands, by_line, left.difference(cands[k].1), chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceOut {
    /// Traced qubit, 0-based.
    pub qubit: usize,
    /// Hexagon lines that stay two-qubit lines.
    pub surviving: Vec<LineId>,
    /// Hexagon points on no surviving line.
    pub uncovered: PointSet,
    /// The three points reducing to the identity.
    pub trivial: PointSet,
}

impl TraceOut {
    /// Uncovered points beyond the three trivial ones.
    pub fn extra(&self) -> PointSet {
        self.uncovered.difference(self.trivial)
    }
}

/// Drop one qubit and keep the hexagon lines that remain lines.
pub fn trace_out(w: &PolarSpace, h: &HexagonCopy, qubit: usize) -> Result<TraceOut, AtlasError> {
    if w.n() != 3 {
        return Err(GeometryError::Unsupported(w.n()).into());
    }
    if qubit >= 3 {
        return Err(AtlasError::Qubit(qubit));
    }
    let mut surviving = Vec::new();
    let mut covered = PointSet::EMPTY;
    for l in h.lines.iter() {
        let r = w.line_observables(l).map(|o| o.trace_out(qubit));
        let ok = r.iter().all(|o| !o.is_identity())
            && r[0] != r[1]
            && r[1] != r[2]
            && r[0] != r[2]
            && r[0].commutes(&r[1]).unwrap_or(false)
            && r[0].commutes(&r[2]).unwrap_or(false)
            && r[1].commutes(&r[2]).unwrap_or(false);
        if ok {
            surviving.push(l);
            covered = covered.union(w.line(l).point_set());
        }
    }
    let all = w.all_points();
    let trivial = all
        .iter()
        .filter(|&p| w.point(p).trace_out(qubit).is_identity())
        .collect();
    Ok(TraceOut {
        qubit,
        surviving,
        uncovered: all.difference(covered),
        trivial,
    })
}

/// If the extra uncovered points form two disjoint lines of W(5,2), those
/// lines and the third line of the grid they determine.
pub fn trace_out_grid(w: &PolarSpace, t: &TraceOut) -> Option<([LineId; 2], LineId)> {
    let extra = t.extra();
    if extra.len() != 6 {
        return None;
    }
    let inside = w.lines_within(extra).to_vec();
    let pairs: Vec<[LineId; 2]> = inside
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| inside[i + 1..].iter().map(move |&b| [a, b]))
        .filter(|[a, b]| !w.lines_meet(*a, *b))
        .collect();
    let [a, b] = match pairs.as_slice() {
        [p] => *p,
        _ => return None,
    };
    let transversals: Vec<LineId> = (0..w.lines().len())
        .filter(|&t| w.lines_meet(t, a) && w.lines_meet(t, b))
        .collect();
    if transversals.len() != 3 || !pairwise_disjoint(w, &transversals) {
        return None;
    }
    let third: Vec<LineId> = (0..w.lines().len())
        .filter(|&l| l != a && l != b && !w.lines_meet(l, a) && !w.lines_meet(l, b))
        .filter(|&l| transversals.iter().all(|&t| w.lines_meet(l, t)))
        .collect();
    match third.as_slice() {
        [c] => Some(([a, b], *c)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hexagon::{build_classical_hexagon, build_skew_hexagon};

    #[test]
    fn planes_split_63_72() {
        let w = PolarSpace::three_qubit();
        let h = build_classical_hexagon(w).unwrap();
        let t = classify_planes(w, &h).unwrap();
        assert_eq!((t.perp_count(), t.heawood_count()), (63, 72));
        assert_eq!(t.heawood_pairs().len(), 36);
        for (i, c) in t.classes.iter().enumerate() {
            if let PlaneClass::Perp { nucleus } = c {
                assert_eq!(t.planes[i].points, h.perp_set(w, *nucleus));
            }
        }
    }

    #[test]
    fn classical_only() {
        let w = PolarSpace::three_qubit();
        let s = build_skew_hexagon(w).unwrap();
        assert!(classify_planes(w, &s).is_err());
        let q = w.quadric_from_index("YYY".parse().unwrap()).unwrap();
        assert!(classify_hexagon_quadric(w, &s, &q).is_err());
    }

    #[test]
    fn grids_avoiding_nothing() {
        let w = PolarSpace::three_qubit();
        let d = &w.enumerate_linear_doilies().unwrap()[0];
        assert_eq!(grids_avoiding(w, d, &LineSet::EMPTY), Ok(10));
        let outside = w.all_lines().difference(d.lines).iter().next().unwrap();
        assert_eq!(
            grids_avoiding(w, d, &LineSet::from_ids([outside])),
            Err(AtlasError::NotInDoily)
        );
    }

    #[test]
    fn classical_trace_out_leaves_three_points() {
        let w = PolarSpace::three_qubit();
        let h = build_classical_hexagon(w).unwrap();
        for q in 0..3 {
            let t = trace_out(w, &h, q).unwrap();
            assert_eq!(t.uncovered, t.trivial);
            assert_eq!(t.trivial.len(), 3);
        }
        assert_eq!(trace_out(w, &h, 3), Err(AtlasError::Qubit(3)));
    }

    #[test]
    fn girth_of_small_graphs() {
        let hexagon: Vec<Vec<usize>> = (0..6).map(|i| vec![(i + 1) % 6, (i + 5) % 6]).collect();
        assert_eq!(graph_girth(&hexagon), 6);
        assert!(is_bipartite(&hexagon));
        let triangle = vec![vec![1, 2], vec![0, 2], vec![0, 1]];
        assert_eq!(graph_girth(&triangle), 3);
        assert!(!is_bipartite(&triangle));
    }
}
