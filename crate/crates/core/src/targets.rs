//! Named configurations and cached catalogs.
//!
//! Every distinguished configuration can be rebuilt from a short name:
//!
//! | name | configuration |
//! |------|---------------|
//! | `doily` | W(3,2): all 15 two-qubit lines |
//! | `grid` | the magic-square grid with one negative line |
//! | `pentagram` | the five four-observable contexts of the pentagram |
//! | `w52` | all 315 lines of W(5,2) |
//! | `elliptic:<O>` / `hyperbolic:<O>` | the lines of the quadric with index `O` |
//! | `ldoily:<k>` | linear doily `k` of W(5,2) (`k < 336`) |
//! | `qdoily:<H>,<E>` | quadratic doily cut by two quadric indices |
//! | `hexcomp:<id>` | complement of skew hexagon `id` (`< 7560`, or `canonical`, `reference`) |

use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::contextuality::{
    degree_exact, CertifyOptions, Configuration, ContextualityError, CoverSpec, DEFAULT_RANK_LIMIT, DEFAULT_SEED,
};
use crate::hexagon::{
    build_classical_hexagon, build_skew_hexagon, enumerate_classical_hexagons, enumerate_skew_hexagons,
    layer_decompose, skew_hexagon, skew_to_classical, HexagonCopy, HexagonError,
};
use crate::pauli::{Observable, PauliError};
use crate::polar::{Doily, GeometryError, LineId, PolarSpace, QuadricKind};
use crate::sets::{LineSet, PointSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TargetError {
    #[error("unknown target {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Hexagon(#[from] HexagonError),
    #[error(transparent)]
    Contextuality(#[from] ContextualityError),
    #[error("{0} is {1:?}, not the requested quadric kind")]
    QuadricKind(Observable, QuadricKind),
    #[error("index {0} out of range")]
    Index(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Which skew hexagon a complement is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkewRef {
    /// The copy built directly from the coordinate map.
    Canonical,
    /// The catalogued copy with axis `YYZ-IXY-YZX`.
    Reference,
    Index(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Doily,
    Grid,
    Pentagram,
    W52,
    Elliptic(Observable),
    Hyperbolic(Observable),
    LinearDoily(usize),
    QuadraticDoily(Observable, Observable),
    HexComplement(SkewRef),
}

impl FromStr for Target {
    type Err = TargetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || TargetError::Unknown(s.to_string());
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        Ok(match (head, arg) {
            ("doily", None) => Target::Doily,
            ("grid", None) => Target::Grid,
            ("pentagram", None) => Target::Pentagram,
            ("w52", None) => Target::W52,
            ("elliptic", Some(o)) => Target::Elliptic(o.parse()?),
            ("hyperbolic", Some(o)) => Target::Hyperbolic(o.parse()?),
            ("ldoily", Some(k)) => Target::LinearDoily(k.parse().map_err(|_| unknown())?),
            ("qdoily", Some(pair)) => {
                let (h, e) = pair.split_once(',').ok_or_else(unknown)?;
                Target::QuadraticDoily(h.parse()?, e.parse()?)
            }
            ("hexcomp", Some("canonical")) => Target::HexComplement(SkewRef::Canonical),
            ("hexcomp", Some("reference")) => Target::HexComplement(SkewRef::Reference),
            ("hexcomp", Some(k)) => Target::HexComplement(SkewRef::Index(k.parse().map_err(|_| unknown())?)),
            _ => return Err(unknown()),
        })
    }
}

pub const GRID_ROWS: [[&str; 3]; 3] = [["IZ", "ZI", "ZZ"], ["XI", "IX", "XX"], ["XZ", "ZX", "YY"]];

pub const PENTAGRAM: [[&str; 4]; 5] = [
    ["XII", "IXI", "IIX", "XXX"],
    ["XII", "IYI", "IIY", "XYY"],
    ["YII", "IXI", "IIY", "YXY"],
    ["YII", "IYI", "IIX", "YYX"],
    ["XXX", "XYY", "YXY", "YYX"],
];

/// A spread of nine planes: seven perp-planes (nucleus first) of the
/// reference classical copy followed by one Heawood partner pair.
pub const SAMPLE_SPREAD_FIRST_KIND: [[&str; 7]; 9] = [
    ["XZY", "ZYY", "YXI", "YXY", "ZYI", "XZI", "IIY"],
    ["YII", "IYY", "YYY", "IZX", "YZX", "YXZ", "IXZ"],
    ["ZXX", "IXX", "ZII", "IYZ", "ZZY", "IZY", "ZYZ"],
    ["ZXZ", "IXI", "ZIZ", "YIX", "XXY", "XIY", "YXX"],
    ["ZIY", "ZXI", "IXY", "YYX", "XYZ", "YZZ", "XZX"],
    ["XXI", "YYI", "ZZI", "XXZ", "IIZ", "YYZ", "ZZZ"],
    ["XYY", "ZYX", "YIZ", "IZZ", "XXX", "ZXY", "YZI"],
    ["ZZX", "ZIX", "IZI", "XZZ", "YIY", "XIZ", "YZY"],
    ["IYX", "XYI", "IIX", "XYX", "XIX", "XII", "IYI"],
];

/// Two spreads through the same three perp-planes (listed first), each
/// completed by six Heawood planes.
pub const SAMPLE_SPREADS_SECOND_KIND: [[[&str; 7]; 9]; 2] = [
    [
        ["YZI", "ZXY", "XYY", "YIX", "IZX", "XXZ", "ZYZ"],
        ["IXI", "IXZ", "IIZ", "ZXZ", "ZIZ", "ZXI", "ZII"],
        ["YYI", "ZZI", "XXI", "ZZY", "XXY", "YYY", "IIY"],
        ["IYX", "XYI", "IIX", "XYX", "XII", "XIX", "IYI"],
        ["XZY", "YIZ", "XIY", "YZZ", "ZZX", "ZIX", "IZI"],
        ["IZY", "YZY", "YII", "IXX", "IYZ", "YYZ", "YXX"],
        ["XZX", "ZZZ", "IXY", "XYZ", "YIY", "ZYX", "YXI"],
        ["XZI", "ZYY", "ZXX", "YYX", "XIZ", "YXY", "IZZ"],
        ["YXZ", "YZX", "ZYI", "ZIY", "XXX", "XZZ", "IYY"],
    ],
    [
        ["YZI", "ZXY", "XYY", "YIX", "IZX", "XXZ", "ZYZ"],
        ["IXI", "IXZ", "IIZ", "ZXZ", "ZIZ", "ZXI", "ZII"],
        ["YYI", "ZZI", "XXI", "ZZY", "XXY", "YYY", "IIY"],
        ["YZY", "IZI", "XZZ", "YIY", "XIZ", "ZZX", "ZIX"],
        ["XZX", "XZI", "ZYX", "YXX", "ZYI", "YXI", "IIX"],
        ["XYI", "ZXX", "YZX", "ZZZ", "YXZ", "IYY", "XIY"],
        ["XIX", "ZYY", "YYZ", "XYX", "ZIY", "IYI", "YIZ"],
        ["IZY", "IXX", "IYZ", "XYZ", "XXX", "XII", "XZY"],
        ["IYX", "YII", "IXY", "YZZ", "YYX", "YXY", "IZZ"],
    ],
];

/// Axis of the reference skew copy.
pub const REFERENCE_SKEW_AXIS: &str = "YYZ-IXY-YZX";

/// Lines of the reference skew copy shared with the doilies having `I` on
/// qubit 1, 3 and 2 respectively.
pub const REFERENCE_SKEW_DOILY_LINES: [&[&str]; 3] = [
    &["IXX-IZZ-IYY", "IYY-IZX-IXZ", "IXZ-IIZ-IXI"],
    &["XZI-IZI-XII", "IZI-YZI-YII"],
    &[
        "ZIY-IIY-ZII",
        "YII-IIX-YIX",
        "ZIX-XIY-YIZ",
        "XIX-YIY-ZIZ",
        "XIZ-IIZ-XII",
        "ZII-IIX-ZIX",
    ],
];

/// Lines shared by the reference classical copy with both the elliptic
/// quadric of index `YYY` and the hyperbolic quadric of index `III`.
pub const SHARED_QUADRIC_LINES: [&str; 3] = ["IXX-IYY-IZZ", "XIX-YIY-ZIZ", "ZZI-YYI-XXI"];

fn cached<T: Clone>(cell: &'static OnceLock<Result<T, TargetError>>, f: impl FnOnce() -> Result<T, TargetError>) -> Result<T, TargetError> {
    cell.get_or_init(f).clone()
}

/// The 120 classical copies, sorted by line-set.
pub fn classical_copies() -> Result<&'static [HexagonCopy], TargetError> {
    static CELL: OnceLock<Result<Vec<HexagonCopy>, TargetError>> = OnceLock::new();
    CELL.get_or_init(|| Ok(enumerate_classical_hexagons(PolarSpace::three_qubit())?))
        .as_deref()
        .map_err(Clone::clone)
}

/// All 7560 skew copies (slow on first use).
pub fn skew_copies() -> Result<&'static [HexagonCopy], TargetError> {
    static CELL: OnceLock<Result<Vec<HexagonCopy>, TargetError>> = OnceLock::new();
    CELL.get_or_init(|| Ok(enumerate_skew_hexagons(PolarSpace::three_qubit(), classical_copies()?)?))
        .as_deref()
        .map_err(Clone::clone)
}

/// Linear doilies followed by quadratic doilies (336 + 1008).
pub fn all_doilies() -> Result<&'static [Doily], TargetError> {
    static CELL: OnceLock<Result<Vec<Doily>, TargetError>> = OnceLock::new();
    CELL.get_or_init(|| {
        let w = PolarSpace::three_qubit();
        let mut ds = w.enumerate_linear_doilies()?;
        ds.extend(w.enumerate_quadratic_doilies()?);
        Ok(ds)
    })
    .as_deref()
    .map_err(Clone::clone)
}

fn plane_points(w: &PolarSpace, plane: &[&str]) -> Result<PointSet, TargetError> {
    plane
        .iter()
        .map(|s| Ok(w.point_of(&s.parse()?)?))
        .collect::<Result<Vec<_>, TargetError>>()
        .map(PointSet::from_ids)
}

/// Index of the classical copy whose perp-planes include the first seven
/// planes of [`SAMPLE_SPREAD_FIRST_KIND`].
pub fn reference_classical_index() -> Result<usize, TargetError> {
    static CELL: OnceLock<Result<usize, TargetError>> = OnceLock::new();
    cached(&CELL, || {
        let w = PolarSpace::three_qubit();
        let planes = SAMPLE_SPREAD_FIRST_KIND[..7]
            .iter()
            .map(|p| Ok((w.point_of(&p[0].parse()?)?, plane_points(w, p)?)))
            .collect::<Result<Vec<_>, TargetError>>()?;
        classical_copies()?
            .iter()
            .position(|h| planes.iter().all(|(n, pts)| h.perp_set(w, *n) == *pts))
            .ok_or_else(|| TargetError::Unknown("reference classical copy".into()))
    })
}

pub fn reference_classical() -> Result<HexagonCopy, TargetError> {
    Ok(classical_copies()?[reference_classical_index()?])
}

/// Index of the skew copy with axis [`REFERENCE_SKEW_AXIS`] containing all
/// lines of [`REFERENCE_SKEW_DOILY_LINES`]; only the 63 candidates whose
/// classical sibling contains the axis line as reference are examined.
pub fn reference_skew_index() -> Result<usize, TargetError> {
    static CELL: OnceLock<Result<usize, TargetError>> = OnceLock::new();
    cached(&CELL, || {
        let w = PolarSpace::three_qubit();
        let axis = w.parse_line(REFERENCE_SKEW_AXIS)?;
        let wanted: LineSet = REFERENCE_SKEW_DOILY_LINES
            .iter()
            .flat_map(|ls| ls.iter())
            .map(|s| w.parse_line(s))
            .collect::<Result<LineSet, _>>()?;
        let classical = classical_copies()?;
        for (ci, h) in classical.iter().enumerate() {
            if let Some(pos) = h.lines.iter().position(|l| l == axis) {
                let id = 63 * ci + pos;
                if wanted.is_subset(skew_hexagon(w, classical, id)?.lines) {
                    return Ok(id);
                }
            }
        }
        Err(TargetError::Unknown("reference skew copy".into()))
    })
}

pub fn resolve_skew(r: SkewRef) -> Result<HexagonCopy, TargetError> {
    let w = PolarSpace::three_qubit();
    match r {
        SkewRef::Canonical => Ok(build_skew_hexagon(w)?),
        SkewRef::Reference => Ok(skew_hexagon(w, classical_copies()?, reference_skew_index()?)?),
        SkewRef::Index(k) if k < 7560 => Ok(skew_hexagon(w, classical_copies()?, k)?),
        SkewRef::Index(k) => Err(TargetError::Index(k)),
    }
}

/// A resolved target: its configuration and the bounds worth trying.
#[derive(Debug, Clone)]
pub struct ResolvedTarget {
    pub name: String,
    pub configuration: Configuration,
    pub options: CertifyOptions,
}

/// Settings shared by every target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchSettings {
    pub rank_limit: usize,
    pub seed: u64,
    pub budget: usize,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings {
            rank_limit: DEFAULT_RANK_LIMIT,
            seed: DEFAULT_SEED,
            budget: 200,
        }
    }
}

/// Sub-configurations cut out by `families`, each with its exact degree.
pub fn certified_cover(
    c: &Configuration,
    name: &str,
    families: &[LineSet],
    rank_limit: usize,
) -> Result<CoverSpec, ContextualityError> {
    let mut subs = Vec::with_capacity(families.len());
    let mut degrees = Vec::with_capacity(families.len());
    for f in families {
        let sub = c.from_line_set(f).unwrap_or_default();
        if sub.is_empty() {
            continue;
        }
        degrees.push(degree_exact(&c.restrict(&sub)?, rank_limit)?.upper);
        subs.push(sub);
    }
    Ok(CoverSpec {
        name: name.to_string(),
        subconfigurations: subs,
        degrees,
    })
}

fn build_from_strings<const K: usize>(rows: &[[&str; K]]) -> Result<Configuration, TargetError> {
    let ctx = rows
        .iter()
        .map(|r| r.iter().map(|s| s.parse()).collect::<Result<Vec<Observable>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Configuration::build(&ctx)?)
}

/// The grid's six contexts: three rows then three columns.
pub fn grid_configuration() -> Result<Configuration, TargetError> {
    let mut rows: Vec<[&str; 3]> = GRID_ROWS.to_vec();
    for j in 0..3 {
        rows.push([GRID_ROWS[0][j], GRID_ROWS[1][j], GRID_ROWS[2][j]]);
    }
    build_from_strings(&rows)
}

pub fn pentagram_configuration() -> Result<Configuration, TargetError> {
    build_from_strings(&PENTAGRAM)
}

fn quadric_lines(o: Observable, kind: QuadricKind) -> Result<LineSet, TargetError> {
    let q = PolarSpace::three_qubit().quadric_from_index(o)?;
    if q.kind != kind {
        return Err(TargetError::QuadricKind(o, q.kind));
    }
    Ok(q.lines)
}

/// Build a named target with the bounds worth trying on it.
pub fn resolve_target(name: &str, s: SearchSettings) -> Result<ResolvedTarget, TargetError> {
    let target: Target = name.parse()?;
    let w = PolarSpace::three_qubit();
    let mut options = CertifyOptions {
        rank_limit: s.rank_limit,
        seed: s.seed,
        budget: s.budget,
        ..CertifyOptions::default()
    };
    let configuration = match target {
        Target::Doily => {
            let w2 = PolarSpace::two_qubit();
            Configuration::from_lines(w2, &w2.all_lines())
        }
        Target::Grid => grid_configuration()?,
        Target::Pentagram => pentagram_configuration()?,
        Target::W52 => {
            let c = Configuration::from_lines(w, &w.all_lines());
            let hex = build_classical_hexagon(w)?;
            options
                .candidates
                .push(("classical hexagon".into(), c.from_line_set(&hex.lines).unwrap_or_default()));
            let doilies = all_doilies()?;
            let (lin, quad) = doilies.split_at(336);
            let fam = |ds: &[Doily]| ds.iter().map(|d| d.lines).collect::<Vec<_>>();
            options
                .covers
                .push(certified_cover(&c, "quadratic doilies", &fam(quad), s.rank_limit)?);
            options
                .covers
                .push(certified_cover(&c, "linear doilies", &fam(lin), s.rank_limit)?);
            c
        }
        Target::Elliptic(o) => Configuration::from_lines(w, &quadric_lines(o, QuadricKind::Elliptic)?),
        Target::Hyperbolic(o) => Configuration::from_lines(w, &quadric_lines(o, QuadricKind::Hyperbolic)?),
        Target::LinearDoily(k) => {
            let d = all_doilies()?.get(k).filter(|_| k < 336).ok_or(TargetError::Index(k))?;
            Configuration::from_lines(w, &d.lines)
        }
        Target::QuadraticDoily(h, e) => {
            let lines = quadric_lines(h, QuadricKind::Hyperbolic)?.intersection(quadric_lines(e, QuadricKind::Elliptic)?);
            Configuration::from_lines(w, &lines)
        }
        Target::HexComplement(r) => {
            let skew = resolve_skew(r)?;
            let c = Configuration::from_lines(w, &w.all_lines().difference(skew.lines));
            let sibling = skew_to_classical(w, &skew)?;
            let gray = sibling.lines.difference(skew.lines);
            options
                .candidates
                .push(("gray lines of the classical sibling".into(), c.from_line_set(&gray).unwrap_or_default()));
            let layers = layer_decompose(w, &skew)?;
            options
                .candidates
                .push(("gray layer".into(), c.from_line_set(&layers.gray).unwrap_or_default()));
            let elliptic: Vec<LineSet> = w
                .quadrics()?
                .into_iter()
                .filter(|q| q.kind == QuadricKind::Elliptic)
                .map(|q| q.lines)
                .collect();
            options
                .covers
                .push(certified_cover(&c, "elliptic quadrics", &elliptic, s.rank_limit)?);
            c
        }
    };
    Ok(ResolvedTarget {
        name: name.to_string(),
        configuration,
        options,
    })
}

/// Parse a contexts file: one context per line, observables separated by
/// `-`, `,` or whitespace; `#` starts a comment. Contexts made only of
/// W(5,2) lines keep their line IDs.
pub fn parse_contexts(text: &str) -> Result<Configuration, TargetError> {
    let mut contexts = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let obs = body
            .split(|c: char| c == '-' || c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<Observable>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| TargetError::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
        contexts.push(obs);
    }
    if contexts.is_empty() {
        return Err(TargetError::Parse {
            line: 0,
            msg: "no contexts".into(),
        });
    }
    let w = PolarSpace::three_qubit();
    let as_lines: Option<Vec<LineId>> = contexts
        .iter()
        .map(|c| <[Observable; 3]>::try_from(c.as_slice()).ok().and_then(|t| w.line_of(t).ok()))
        .collect();
    match as_lines {
        Some(ids) if ids.len() == LineSet::from_ids(ids.iter().copied()).len() => {
            Ok(Configuration::from_lines(w, &LineSet::from_ids(ids)))
        }
        _ => Ok(Configuration::build(&contexts)?),
    }
}

/// Classical copies whose lines inside the configuration are exactly the
/// given contexts.
pub fn matching_classical_copies(c: &Configuration, violated: &[usize]) -> Result<Vec<usize>, TargetError> {
    let (Some(all), Some(v)) = (c.to_line_set(&(0..c.l()).collect::<Vec<_>>()), c.to_line_set(violated)) else {
        return Ok(Vec::new());
    };
    if c.points().first().is_some_and(|p| p.n() != 3) {
        return Ok(Vec::new());
    }
    Ok(classical_copies()?
        .iter()
        .enumerate()
        .filter(|(_, h)| h.lines.intersection(all) == v)
        .map(|(i, _)| i)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!("w52".parse::<Target>(), Ok(Target::W52));
        assert_eq!("hexcomp:17".parse::<Target>(), Ok(Target::HexComplement(SkewRef::Index(17))));
        assert!("nope".parse::<Target>().is_err());
        assert!("elliptic:QQQ".parse::<Target>().is_err());
    }

    #[test]
    fn small_targets() {
        let s = SearchSettings::default();
        let g = resolve_target("grid", s).unwrap().configuration;
        assert_eq!((g.l(), g.p(), g.negative_count()), (6, 9, 1));
        let p = resolve_target("pentagram", s).unwrap().configuration;
        assert_eq!((p.l(), p.p(), p.negative_count()), (5, 10, 1));
        let d = resolve_target("doily", s).unwrap().configuration;
        assert_eq!((d.l(), d.p(), d.negative_count()), (15, 15, 3));
        assert!(matches!(
            resolve_target("elliptic:III", s),
            Err(TargetError::QuadricKind(..))
        ));
    }

    #[test]
    fn contexts_file() {
        let c = parse_contexts("# two lines\nXYZ-ZIX-YYY\nIXX IYY IZZ\n").unwrap();
        assert_eq!(c.l(), 2);
        assert!(c.source_lines().is_some());
        let p = parse_contexts("XII,IXI,IIX,XXX\n").unwrap();
        assert!(p.source_lines().is_none());
        assert!(parse_contexts("XQZ-ZIX-YYY").is_err());
        assert!(parse_contexts("\n# nothing\n").is_err());
    }
}
