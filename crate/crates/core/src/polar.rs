//! The symplectic polar space W(2n-1, 2) and its distinguished subgeometries.
//!
//! Points are the non-identity canonical observables, indexed by their
//! position in canonical order (`id = bits - 1`). Lines are totally isotropic
//! 2-spaces `{u, v, u+v}`, sorted lexicographically by their point triples,
//! so a line ID is also its rank in the canonical ordering of triples.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{context_sign, Observable, PauliError, Sign};
use crate::sets::{LineSet, PointSet, MAX_LINES};

pub type PointId = usize;
pub type LineId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("qubit count {0} not supported for this operation")]
    Unsupported(usize),
    #[error("{0} is not a point of the space")]
    NotAPoint(Observable),
    #[error("{0:?} is not a line of the space")]
    NotALine(Vec<Observable>),
    #[error("orbit exceeded {0} elements")]
    OrbitOverflow(usize),
    #[error("invalid doily: {0}")]
    InvalidDoily(String),
}

/// An isotropic line used as a context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineContext {
    /// Sorted point IDs.
    pub points: [PointId; 3],
    pub sign: Sign,
}

impl LineContext {
    pub fn point_set(&self) -> PointSet {
        PointSet::from_ids(self.points)
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.points.contains(&p)
    }
}

/// A Fano plane of pairwise commuting observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IsotropicPlane {
    pub points: PointSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadricKind {
    Hyperbolic,
    Elliptic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quadric {
    pub kind: QuadricKind,
    pub index: Observable,
    pub points: PointSet,
    pub lines: LineSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DoilyKind {
    /// Perp of a non-isotropic line `{u, v, u+v}`.
    Linear { anchor: [PointId; 3] },
    /// Intersection of a hyperbolic and an elliptic quadric.
    Quadratic {
        hyperbolic: Observable,
        elliptic: Observable,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Doily {
    pub kind: DoilyKind,
    pub points: PointSet,
    pub lines: LineSet,
}

/// A 3x3 grid: two reguli of three pairwise disjoint lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    pub points: PointSet,
    pub reguli: [[LineId; 3]; 2],
}

impl Grid {
    pub fn lines(&self) -> LineSet {
        LineSet::from_ids(self.reguli.iter().flatten().copied())
    }
}

/// Points and lines of W(2n-1, 2).
#[derive(Debug, Clone)]
pub struct PolarSpace {
    n: usize,
    points: Vec<Observable>,
    lines: Vec<LineContext>,
    lookup: HashMap<[PointId; 3], LineId>,
    through: Vec<Vec<LineId>>,
}

impl PolarSpace {
    /// Build points and lines for `2 <= n <= 4`.
    pub fn new(n: usize) -> Result<Self, GeometryError> {
        if !(2..=4).contains(&n) {
            return Err(GeometryError::Unsupported(n));
        }
        let points = enumerate_points(n)?;
        let mut triples = Vec::new();
        for p in 0..points.len() {
            for q in p + 1..points.len() {
                if points[p].form_unchecked(&points[q]) {
                    continue;
                }
                let r = point_id(&points[p].xor(&points[q]));
                if r > q {
                    triples.push([p, q, r]);
                }
            }
        }
        triples.sort_unstable();
        let lines = triples
            .iter()
            .map(|t| {
                let sign = context_sign(&[points[t[0]], points[t[1]], points[t[2]]])?;
                Ok(LineContext { points: *t, sign })
            })
            .collect::<Result<Vec<_>, PauliError>>()?;
        let lookup = lines
            .iter()
            .enumerate()
            .map(|(i, l)| (l.points, i))
            .collect();
        let mut through = vec![Vec::new(); points.len()];
        for (i, l) in lines.iter().enumerate() {
            for &p in &l.points {
                through[p].push(i);
            }
        }
        Ok(PolarSpace {
            n,
            points,
            lines,
            lookup,
            through,
        })
    }

    /// Shared three-qubit space.
    pub fn three_qubit() -> &'static PolarSpace {
        static W52: OnceLock<PolarSpace> = OnceLock::new();
        W52.get_or_init(|| PolarSpace::new(3).expect("W(5,2) construction"))
    }

    /// Shared two-qubit space (the doily).
    pub fn two_qubit() -> &'static PolarSpace {
        static W32: OnceLock<PolarSpace> = OnceLock::new();
        W32.get_or_init(|| PolarSpace::new(2).expect("W(3,2) construction"))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[Observable] {
        &self.points
    }

    pub fn point(&self, id: PointId) -> Observable {
        self.points[id]
    }

    pub fn point_of(&self, o: &Observable) -> Result<PointId, GeometryError> {
        if o.n() != self.n || o.is_identity() {
            return Err(GeometryError::NotAPoint(*o));
        }
        Ok(point_id(o))
    }

    pub fn lines(&self) -> &[LineContext] {
        &self.lines
    }

    pub fn line(&self, id: LineId) -> &LineContext {
        &self.lines[id]
    }

    pub fn lines_through(&self, p: PointId) -> &[LineId] {
        &self.through[p]
    }

    /// Line through two distinct commuting points.
    pub fn line_through(&self, p: PointId, q: PointId) -> Option<LineId> {
        if p == q || self.points[p].form_unchecked(&self.points[q]) {
            return None;
        }
        let r = point_id(&self.points[p].xor(&self.points[q]));
        let mut t = [p, q, r];
        t.sort_unstable();
        self.lookup.get(&t).copied()
    }

    pub fn line_id(&self, mut triple: [PointId; 3]) -> Option<LineId> {
        triple.sort_unstable();
        self.lookup.get(&triple).copied()
    }

    /// Resolve three observables to a line.
    pub fn line_of(&self, obs: [Observable; 3]) -> Result<LineId, GeometryError> {
        let ids = [
            self.point_of(&obs[0])?,
            self.point_of(&obs[1])?,
            self.point_of(&obs[2])?,
        ];
        self.line_id(ids)
            .ok_or_else(|| GeometryError::NotALine(obs.to_vec()))
    }

    /// Parse `"IXX-IYY-IZZ"` style line labels.
    pub fn parse_line(&self, text: &str) -> Result<LineId, GeometryError> {
        let parts: Vec<&str> = text.split(['-', ' ', ',']).filter(|s| !s.is_empty()).collect();
        if parts.len() != 3 {
            return Err(GeometryError::NotALine(Vec::new()));
        }
        let mut obs = [Observable::identity(self.n)?; 3];
        for (slot, part) in obs.iter_mut().zip(&parts) {
            *slot = part.parse()?;
        }
        self.line_of(obs)
    }

    pub fn line_observables(&self, id: LineId) -> [Observable; 3] {
        self.lines[id].points.map(|p| self.points[p])
    }

    pub fn line_label(&self, id: LineId) -> String {
        let [a, b, c] = self.line_observables(id);
        format!("{a}-{b}-{c}")
    }

    pub fn all_lines(&self) -> LineSet {
        assert!(self.lines.len() <= MAX_LINES);
        LineSet::from_ids(0..self.lines.len())
    }

    pub fn all_points(&self) -> PointSet {
        assert!(self.points.len() <= 64);
        PointSet::from_ids(0..self.points.len())
    }

    /// Number of negative lines; unlike [`Self::negative_lines`] this works
    /// for any number of qubits.
    pub fn negative_line_count(&self) -> usize {
        self.lines.iter().filter(|l| l.sign.is_negative()).count()
    }

    pub fn negative_lines(&self) -> LineSet {
        assert!(self.lines.len() <= MAX_LINES);
        self.lines
            .iter()
            .enumerate()
            .filter(|(_, l)| l.sign.is_negative())
            .map(|(i, _)| i)
            .collect()
    }

    /// Lines whose three points all lie in `pts`.
    pub fn lines_within(&self, pts: PointSet) -> LineSet {
        self.lines
            .iter()
            .enumerate()
            .filter(|(_, l)| l.points.iter().all(|&p| pts.contains(p)))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn points_of(&self, lines: &LineSet) -> PointSet {
        lines
            .iter()
            .flat_map(|l| self.lines[l].points)
            .collect()
    }

    /// Points commuting with every point of `pts` (including themselves).
    pub fn perp(&self, pts: PointSet) -> PointSet {
        (0..self.points.len())
            .filter(|&q| pts.iter().all(|p| !self.points[p].form_unchecked(&self.points[q])))
            .collect()
    }

    pub fn lines_meet(&self, l1: LineId, l2: LineId) -> bool {
        !self.lines[l1].point_set().is_disjoint(self.lines[l2].point_set())
    }

    /// All 135 planes (n = 3), sorted by point mask.
    pub fn enumerate_planes(&self) -> Result<Vec<IsotropicPlane>, GeometryError> {
        if self.n != 3 {
            return Err(GeometryError::Unsupported(self.n));
        }
        let mut planes = HashSet::new();
        for l in &self.lines {
            let base = l.point_set();
            for p in self.perp(base).difference(base).iter() {
                let mut s = base;
                s.insert(p);
                for &q in &l.points {
                    s.insert(point_id(&self.points[p].xor(&self.points[q])));
                }
                planes.insert(s);
            }
        }
        let mut planes: Vec<_> = planes.into_iter().map(|points| IsotropicPlane { points }).collect();
        planes.sort();
        Ok(planes)
    }

    /// Quadric with index `index`: symmetric points commuting with it and
    /// skew-symmetric points anticommuting with it. The identity index gives
    /// the hyperbolic quadric of all symmetric points.
    pub fn quadric_from_index(&self, index: Observable) -> Result<Quadric, GeometryError> {
        if index.n() != self.n {
            return Err(PauliError::Mismatch(index.n(), self.n).into());
        }
        if self.n > 3 {
            return Err(GeometryError::Unsupported(self.n));
        }
        let points: PointSet = self
            .points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_symmetric() != p.form_unchecked(&index))
            .map(|(i, _)| i)
            .collect();
        let kind = if index.is_symmetric() {
            QuadricKind::Hyperbolic
        } else {
            QuadricKind::Elliptic
        };
        Ok(Quadric {
            kind,
            index,
            points,
            lines: self.lines_within(points),
        })
    }

    /// One quadric per index observable (identity included), in canonical
    /// index order.
    pub fn quadrics(&self) -> Result<Vec<Quadric>, GeometryError> {
        let top: u32 = 1 << (2 * self.n);
        (0..top)
            .map(|v| self.quadric_from_index(Observable::from_bits(self.n, v as u16)?))
            .collect()
    }

    /// The 336 linear doilies of W(5,2), one per non-isotropic line.
    pub fn enumerate_linear_doilies(&self) -> Result<Vec<Doily>, GeometryError> {
        if self.n != 3 {
            return Err(GeometryError::Unsupported(self.n));
        }
        let mut out = Vec::new();
        for u in 0..self.points.len() {
            for v in u + 1..self.points.len() {
                if !self.points[u].form_unchecked(&self.points[v]) {
                    continue;
                }
                let w = point_id(&self.points[u].xor(&self.points[v]));
                if w < v {
                    continue;
                }
                let points = self.perp(PointSet::from_ids([u, v]));
                let d = Doily {
                    kind: DoilyKind::Linear { anchor: [u, v, w] },
                    points,
                    lines: self.lines_within(points),
                };
                self.validate_doily(&d)?;
                out.push(d);
            }
        }
        Ok(out)
    }

    /// The 1008 quadratic doilies of W(5,2), hyperbolic-major order.
    pub fn enumerate_quadratic_doilies(&self) -> Result<Vec<Doily>, GeometryError> {
        if self.n != 3 {
            return Err(GeometryError::Unsupported(self.n));
        }
        let quadrics = self.quadrics()?;
        let (hyp, ell): (Vec<_>, Vec<_>) = quadrics
            .iter()
            .partition(|q| q.kind == QuadricKind::Hyperbolic);
        let mut out = Vec::with_capacity(hyp.len() * ell.len());
        for h in &hyp {
            for e in &ell {
                let points = h.points.intersection(e.points);
                let d = Doily {
                    kind: DoilyKind::Quadratic {
                        hyperbolic: h.index,
                        elliptic: e.index,
                    },
                    points,
                    lines: h.lines.intersection(e.lines),
                };
                self.validate_doily(&d)?;
                out.push(d);
            }
        }
        Ok(out)
    }

    /// The whole two-qubit space viewed as a doily.
    pub fn as_doily(&self) -> Result<Doily, GeometryError> {
        if self.n != 2 {
            return Err(GeometryError::Unsupported(self.n));
        }
        let d = Doily {
            kind: DoilyKind::Linear { anchor: [0, 0, 0] },
            points: self.all_points(),
            lines: self.all_lines(),
        };
        self.validate_doily(&d)?;
        Ok(d)
    }

    /// 15 points, 15 lines, 3 lines per point, no triangles.
    pub fn validate_doily(&self, d: &Doily) -> Result<(), GeometryError> {
        let bad = |m: String| Err(GeometryError::InvalidDoily(m));
        if d.points.len() != 15 || d.lines.len() != 15 {
            return bad(format!("{} points / {} lines", d.points.len(), d.lines.len()));
        }
        if self.points_of(&d.lines) != d.points {
            return bad("lines leave points uncovered".into());
        }
        for p in d.points.iter() {
            let deg = self.through[p].iter().filter(|&&l| d.lines.contains(l)).count();
            if deg != 3 {
                return bad(format!("point {} on {deg} lines", self.points[p]));
            }
        }
        let lines = d.lines.to_vec();
        for (i, &a) in lines.iter().enumerate() {
            for (j, &b) in lines.iter().enumerate().skip(i + 1) {
                if !self.lines_meet(a, b) {
                    continue;
                }
                for &c in &lines[j + 1..] {
                    if self.lines_meet(a, c) && self.lines_meet(b, c) {
                        let common = self.lines[a]
                            .point_set()
                            .intersection(self.lines[b].point_set())
                            .intersection(self.lines[c].point_set());
                        if common.is_empty() {
                            return bad("triangle".into());
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// All 3x3 grids made of lines of `lines`.
    pub fn grids_in(&self, lines: &LineSet) -> Vec<Grid> {
        let ls = lines.to_vec();
        let mut seen = HashSet::new();
        let mut grids = Vec::new();
        for (i, &a) in ls.iter().enumerate() {
            for (j, &b) in ls.iter().enumerate().skip(i + 1) {
                if self.lines_meet(a, b) {
                    continue;
                }
                for &c in &ls[j + 1..] {
                    if self.lines_meet(a, c) || self.lines_meet(b, c) {
                        continue;
                    }
                    let transversals: Vec<LineId> = ls
                        .iter()
                        .copied()
                        .filter(|&t| {
                            self.lines_meet(t, a) && self.lines_meet(t, b) && self.lines_meet(t, c)
                        })
                        .collect();
                    if transversals.len() != 3
                        || transversals
                            .iter()
                            .enumerate()
                            .any(|(k, &t)| transversals[k + 1..].iter().any(|&u| self.lines_meet(t, u)))
                    {
                        continue;
                    }
                    let mut first = [a, b, c];
                    let mut second = [transversals[0], transversals[1], transversals[2]];
                    first.sort_unstable();
                    second.sort_unstable();
                    let reguli = if first < second { [first, second] } else { [second, first] };
                    if seen.insert(reguli) {
                        let points = [a, b, c]
                            .iter()
                            .fold(PointSet::EMPTY, |s, &l| s.union(self.lines[l].point_set()));
                        grids.push(Grid { points, reguli });
                    }
                }
            }
        }
        grids.sort_by_key(|g| g.reguli);
        grids
    }

    pub fn grids_of_doily(&self, d: &Doily) -> Vec<Grid> {
        self.grids_in(&d.lines)
    }

    /// Image of a point under the transvection `x -> x + σ(x,v) v`.
    pub fn transvect_point(&self, v: PointId, x: PointId) -> PointId {
        if self.points[x].form_unchecked(&self.points[v]) {
            point_id(&self.points[x].xor(&self.points[v]))
        } else {
            x
        }
    }

    pub fn transvect_line(&self, v: PointId, l: LineId) -> LineId {
        let t = self.lines[l].points.map(|x| self.transvect_point(v, x));
        self.line_id(t).expect("transvections preserve isotropic lines")
    }

    pub fn transvect_lines(&self, v: PointId, set: &LineSet) -> LineSet {
        set.iter().map(|l| self.transvect_line(v, l)).collect()
    }

    /// Orbit of a line-set under the group generated by all transvections.
    pub fn symplectic_orbit(&self, seed: &LineSet, max: usize) -> Result<Vec<LineSet>, GeometryError> {
        let mut seen = HashSet::from([*seed]);
        let mut orbit = vec![*seed];
        let mut queue = VecDeque::from([*seed]);
        while let Some(s) = queue.pop_front() {
            for v in 0..self.points.len() {
                let img = self.transvect_lines(v, &s);
                if seen.insert(img) {
                    if orbit.len() == max {
                        return Err(GeometryError::OrbitOverflow(max));
                    }
                    orbit.push(img);
                    queue.push_back(img);
                }
            }
        }
        Ok(orbit)
    }
}

/// Canonical index of a non-identity observable.
pub fn point_id(o: &Observable) -> PointId {
    o.bits() as usize - 1
}

pub fn enumerate_points(n: usize) -> Result<Vec<Observable>, GeometryError> {
    Ok(crate::pauli::all_observables(n)?)
}

/// `(2^{n-1}+1)(2^n-1)` points on a hyperbolic quadric.
pub fn hyperbolic_point_count(n: u32) -> u64 {
    (2u64.pow(n - 1) + 1) * (2u64.pow(n) - 1)
}

/// `(2^{n-1}-1)(2^n+1)` points on an elliptic quadric.
pub fn elliptic_point_count(n: u32) -> u64 {
    (2u64.pow(n - 1) - 1) * (2u64.pow(n) + 1)
}

/// `(2^n-1)(2^{n-2}+1)(2^{2(n-1)}-1)/3` lines on a hyperbolic quadric (n >= 2).
pub fn hyperbolic_line_count(n: u32) -> u64 {
    (2u64.pow(n) - 1) * (2u64.pow(n - 2) + 1) * (4u64.pow(n - 1) - 1) / 3
}

/// `(2^n+1)(2^{n-2}-1)(2^{2(n-1)}-1)/3` lines on an elliptic quadric (n >= 2).
pub fn elliptic_line_count(n: u32) -> u64 {
    (2u64.pow(n) + 1) * (2u64.pow(n - 2) - 1) * (4u64.pow(n - 1) - 1) / 3
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Observable {
        s.parse().unwrap()
    }

    #[test]
    fn point_and_line_counts() {
        let w32 = PolarSpace::two_qubit();
        assert_eq!(w32.points().len(), 15);
        assert_eq!(w32.lines().len(), 15);
        let w52 = PolarSpace::three_qubit();
        assert_eq!(w52.points().len(), 63);
        assert_eq!(w52.lines().len(), 315);
        assert_eq!(w52.negative_lines().len(), 90);
        assert!((0..63).all(|p| w52.lines_through(p).len() == 15));
        assert!(PolarSpace::new(1).is_err());
        assert_eq!(enumerate_points(1).unwrap().len(), 3);
    }

    #[test]
    fn lines_are_sorted_triples() {
        let w = PolarSpace::three_qubit();
        assert!(w.lines().windows(2).all(|p| p[0].points < p[1].points));
        let l = w.parse_line("XYZ-ZIX-YYY").unwrap();
        assert_eq!(w.line(l).sign, Sign::Plus);
        assert!(w.parse_line("XII-ZII-YII").is_err());
    }

    #[test]
    fn planes() {
        let w = PolarSpace::three_qubit();
        let planes = w.enumerate_planes().unwrap();
        assert_eq!(planes.len(), 135);
        let listed: PointSet = ["XZY", "ZYY", "YXI", "YXY", "ZYI", "XZI", "IIY"]
            .iter()
            .map(|s| point_id(&o(s)))
            .collect();
        assert!(planes.iter().any(|p| p.points == listed));
        for p in &planes {
            assert_eq!(w.lines_within(p.points).len(), 7);
            let pts: Vec<_> = p.points.iter().collect();
            for (i, &a) in pts.iter().enumerate() {
                for &b in &pts[i + 1..] {
                    assert!(w.point(a).commutes(&w.point(b)).unwrap());
                }
            }
        }
        assert!(PolarSpace::two_qubit().enumerate_planes().is_err());
    }

    #[test]
    fn quadric_examples() {
        let w = PolarSpace::three_qubit();
        let h = w.quadric_from_index(o("III")).unwrap();
        assert_eq!(h.kind, QuadricKind::Hyperbolic);
        assert_eq!((h.points.len(), h.lines.len()), (35, 105));
        let e = w.quadric_from_index(o("YYY")).unwrap();
        assert_eq!(e.kind, QuadricKind::Elliptic);
        assert_eq!((e.points.len(), e.lines.len()), (27, 45));
        let all = w.quadrics().unwrap();
        let hyp = all.iter().filter(|q| q.kind == QuadricKind::Hyperbolic).count();
        assert_eq!((hyp, all.len() - hyp), (36, 28));
        assert!(w.quadric_from_index(o("XX")).is_err());
    }

    #[test]
    fn quadric_counts_match_formulas() {
        for n in 2..=3u32 {
            let w = PolarSpace::new(n as usize).unwrap();
            for q in w.quadrics().unwrap() {
                let (p, l) = match q.kind {
                    QuadricKind::Hyperbolic => (hyperbolic_point_count(n), hyperbolic_line_count(n)),
                    QuadricKind::Elliptic => (elliptic_point_count(n), elliptic_line_count(n)),
                };
                assert_eq!(q.points.len() as u64, p, "{n} {:?}", q.index);
                assert_eq!(q.lines.len() as u64, l, "{n} {:?}", q.index);
            }
        }
    }

    #[test]
    fn quadrics_meet_lines_in_one_or_three_points() {
        let w = PolarSpace::three_qubit();
        for q in w.quadrics().unwrap() {
            for l in w.lines() {
                let k = l.point_set().intersection(q.points).len();
                assert!(k == 1 || k == 3, "{:?} meets a line in {k}", q.index);
            }
        }
    }

    #[test]
    fn linear_doilies() {
        let w = PolarSpace::three_qubit();
        let ds = w.enumerate_linear_doilies().unwrap();
        assert_eq!(ds.len(), 336);
        let mut membership = vec![0usize; 315];
        for d in &ds {
            for l in d.lines.iter() {
                membership[l] += 1;
            }
        }
        assert!(membership.iter().all(|&m| m == 16));
        let left: PointSet = w
            .points()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.letter(0) == crate::pauli::Letter::I)
            .map(|(i, _)| i)
            .collect();
        assert!(ds.iter().any(|d| d.points == left));
    }

    #[test]
    fn quadratic_doilies() {
        let w = PolarSpace::three_qubit();
        let ds = w.enumerate_quadratic_doilies().unwrap();
        assert_eq!(ds.len(), 1008);
        let mut membership = vec![0usize; 315];
        for d in &ds {
            for l in d.lines.iter() {
                membership[l] += 1;
            }
        }
        assert!(membership.iter().all(|&m| m == 48));
        let d = ds
            .iter()
            .find(|d| {
                d.kind
                    == DoilyKind::Quadratic {
                        hyperbolic: o("III"),
                        elliptic: o("YYY"),
                    }
            })
            .unwrap();
        for label in ["IXX-IYY-IZZ", "XIX-YIY-ZIZ", "ZZI-YYI-XXI"] {
            assert!(d.lines.contains(w.parse_line(label).unwrap()), "{label}");
        }
    }

    #[test]
    fn grids() {
        let w32 = PolarSpace::two_qubit();
        let doily = w32.as_doily().unwrap();
        let grids = w32.grids_of_doily(&doily);
        assert_eq!(grids.len(), 10);
        let neg = w32.negative_lines();
        for g in &grids {
            let k = g.lines().intersection(neg).len();
            assert!(k == 1 || k == 3);
        }
        assert_eq!(
            grids.iter().filter(|g| g.lines().intersection(neg).len() == 3).count(),
            1
        );
        let square: PointSet = ["IZ", "ZI", "ZZ", "XI", "IX", "XX", "XZ", "ZX", "YY"]
            .iter()
            .map(|s| point_id(&o(s)))
            .collect();
        assert!(grids.iter().any(|g| g.points == square));
        let w = PolarSpace::three_qubit();
        for d in w.enumerate_linear_doilies().unwrap().iter().take(20) {
            assert_eq!(w.grids_of_doily(d).len(), 10);
        }
    }

    #[test]
    fn transvections_preserve_form_and_fix_v() {
        let w = PolarSpace::three_qubit();
        for v in 0..63 {
            assert_eq!(w.transvect_point(v, v), v);
            for x in 0..63 {
                for y in 0..63 {
                    let (tx, ty) = (w.transvect_point(v, x), w.transvect_point(v, y));
                    assert_eq!(
                        w.point(x).form_unchecked(&w.point(y)),
                        w.point(tx).form_unchecked(&w.point(ty))
                    );
                }
            }
        }
    }

    #[test]
    fn line_orbit_is_everything() {
        let w = PolarSpace::three_qubit();
        let orbit = w.symplectic_orbit(&LineSet::from_ids([0]), 1000).unwrap();
        assert_eq!(orbit.len(), 315);
        assert_eq!(
            w.symplectic_orbit(&LineSet::from_ids([0]), 100),
            Err(GeometryError::OrbitOverflow(100))
        );
    }
}
