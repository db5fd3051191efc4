//! Theorem suites run by `hexctx verify`.

use std::collections::{BTreeMap, HashSet};

use hexctx_core::atlas::{
    classify_doily_classical, classify_doily_hexagon, classify_hexagon_quadric, classify_planes,
    doily_partition_of_hexagon, enumerate_plane_spreads, grids_avoiding, trace_out, trace_out_grid,
    DoilyPattern, QuadricPattern, SpreadKind,
};
use hexctx_core::contextuality::{certify_degree, degree_exact_all, violated_lines};
use hexctx_core::hexagon::{layer_decompose, skew_to_classical, EmbeddingKind};
use hexctx_core::pauli::Letter;
use hexctx_core::polar::{PolarSpace, QuadricKind};
use hexctx_core::targets::{
    all_doilies, classical_copies, matching_classical_copies, reference_classical,
    resolve_skew, resolve_target, skew_copies, SearchSettings, SkewRef, REFERENCE_SKEW_AXIS,
    REFERENCE_SKEW_DOILY_LINES, SAMPLE_SPREADS_SECOND_KIND, SAMPLE_SPREAD_FIRST_KIND, SHARED_QUADRIC_LINES,
};
use hexctx_core::{LineSet, PointSet};
use serde::Serialize;

use crate::CliError;

pub const SUITES: [&str; 9] = [
    "catalogs",
    "hexagon-counts",
    "planes",
    "spreads",
    "doily-patterns",
    "quadrics",
    "violated-is-hexagon",
    "trace-out",
    "partition",
];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

struct Recorder {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Recorder {
    fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    fn expect<T: PartialEq + std::fmt::Debug>(&mut self, name: &str, got: T, want: T) {
        let pass = got == want;
        self.check(name, pass, format!("got {got:?}, expected {want:?}"));
    }
}

fn err(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

pub fn run_suite(suite: &str, settings: SearchSettings) -> Result<Vec<Check>, CliError> {
    let name = SUITES
        .iter()
        .find(|s| **s == suite)
        .ok_or_else(|| CliError::UnknownTarget(format!("unknown suite {suite:?}")))?;
    let mut r = Recorder {
        suite: name,
        checks: Vec::new(),
    };
    match suite {
        "catalogs" => catalogs(&mut r)?,
        "hexagon-counts" => hexagon_counts(&mut r)?,
        "planes" => planes(&mut r)?,
        "spreads" => spreads(&mut r)?,
        "doily-patterns" => doily_patterns(&mut r)?,
        "quadrics" => quadrics(&mut r)?,
        "violated-is-hexagon" => violated_is_hexagon(&mut r, settings)?,
        "trace-out" => trace_out_suite(&mut r)?,
        "partition" => partition(&mut r)?,
        _ => unreachable!("suite names checked above"),
    }
    Ok(r.checks)
}

fn catalogs(r: &mut Recorder) -> Result<(), CliError> {
    let w2 = PolarSpace::two_qubit();
    r.expect("W(3,2) points/lines", (w2.points().len(), w2.lines().len()), (15, 15));
    let w = PolarSpace::three_qubit();
    let planes = w.enumerate_planes().map_err(err)?;
    r.expect(
        "W(5,2) points/lines/negative/planes",
        (w.points().len(), w.lines().len(), w.negative_lines().len(), planes.len()),
        (63, 315, 90, 135),
    );
    let quadrics = w.quadrics().map_err(err)?;
    let shape = |kind| {
        let qs: Vec<_> = quadrics.iter().filter(|q| q.kind == kind).collect();
        let sizes: HashSet<(usize, usize)> = qs.iter().map(|q| (q.points.len(), q.lines.len())).collect();
        (qs.len(), sizes.into_iter().collect::<Vec<_>>())
    };
    r.expect("hyperbolic quadrics", shape(QuadricKind::Hyperbolic), (36, vec![(35, 105)]));
    r.expect("elliptic quadrics", shape(QuadricKind::Elliptic), (28, vec![(27, 45)]));
    let doilies = all_doilies().map_err(err)?;
    let (lin, quad) = doilies.split_at(336);
    let memberships = |ds: &[hexctx_core::Doily]| {
        let mut m = vec![0usize; 315];
        for d in ds {
            for l in d.lines.iter() {
                m[l] += 1;
            }
        }
        let distinct: HashSet<usize> = m.into_iter().collect();
        (ds.len(), distinct.into_iter().collect::<Vec<_>>())
    };
    r.expect("linear doilies / per-line membership", memberships(lin), (336, vec![16]));
    r.expect("quadratic doilies / per-line membership", memberships(quad), (1008, vec![48]));
    Ok(())
}

fn hexagon_counts(r: &mut Recorder) -> Result<(), CliError> {
    let w = PolarSpace::three_qubit();
    let classical = classical_copies().map_err(err)?;
    r.expect("classical copies", classical.len(), 120);
    r.check(
        "classical planar points",
        classical.iter().all(|h| h.planar_points.len() == 63 && h.kind == EmbeddingKind::Classical),
        "63 planar points on every classical copy",
    );
    let skew = skew_copies().map_err(err)?;
    let distinct: HashSet<LineSet> = skew.iter().map(|h| h.lines).collect();
    r.expect("skew copies (distinct)", (skew.len(), distinct.len()), (7560, 7560));
    let axis_ok = skew.iter().all(|h| {
        h.planar_points.len() == 15
            && h.axis
                .is_some_and(|a| w.line(a).point_set().is_subset(h.planar_points) && h.lines.contains(a))
    });
    r.check("skew planar points and axis", axis_ok, "15 planar points, axis points planar");
    let mut bad_layers = 0;
    for h in skew {
        match layer_decompose(w, h) {
            Ok(l) if l.all() == h.lines => {}
            _ => bad_layers += 1,
        }
    }
    r.check(
        "layering (6, 24, 16, 16)",
        bad_layers == 0,
        format!("{} of 7560 skew copies failed", bad_layers),
    );
    let mut shared_ok = true;
    let mut round_trip_ok = true;
    let mut sampled = 0;
    for (i, s) in skew.iter().enumerate().step_by(61) {
        let parent = &classical[i / 63];
        shared_ok &= s.lines.intersection(parent.lines).len() == 39;
        round_trip_ok &= skew_to_classical(w, s).map_err(err)?.lines == parent.lines;
        sampled += 1;
    }
    r.check("skew/classical share 39 lines", shared_ok, format!("{sampled} sampled pairs"));
    r.check("transformation round-trips", round_trip_ok, format!("{sampled} sampled pairs"));
    Ok(())
}

fn planes(r: &mut Recorder) -> Result<(), CliError> {
    let w = PolarSpace::three_qubit();
    let mut tally: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for h in classical_copies().map_err(err)? {
        let t = classify_planes(w, h).map_err(err)?;
        *tally.entry((t.perp_count(), t.heawood_count(), t.heawood_pairs().len())).or_default() += 1;
    }
    r.expect(
        "perp / Heawood planes / Heawood pairs per classical copy",
        tally.into_iter().collect::<Vec<_>>(),
        vec![((63, 72, 36), 120)],
    );
    Ok(())
}

fn plane_of(w: &PolarSpace, row: &[&str]) -> Result<PointSet, CliError> {
    row.iter()
        .map(|s| w.point_of(&s.parse().map_err(err)?).map_err(err))
        .collect::<Result<Vec<_>, _>>()
        .map(PointSet::from_ids)
}

fn spreads(r: &mut Recorder) -> Result<(), CliError> {
    let w = PolarSpace::three_qubit();
    let mut tally: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for h in classical_copies().map_err(err)? {
        let t = classify_planes(w, h).map_err(err)?;
        let ss = enumerate_plane_spreads(&t).map_err(err)?;
        let first = ss.iter().filter(|s| s.kind == SpreadKind::First).count();
        *tally.entry((first, ss.len() - first)).or_default() += 1;
    }
    r.expect(
        "spreads of kind 1 / kind 2 per classical copy",
        tally.into_iter().collect::<Vec<_>>(),
        vec![((288, 672), 120)],
    );
    let h = reference_classical().map_err(err)?;
    let t = classify_planes(w, &h).map_err(err)?;
    let ss = enumerate_plane_spreads(&t).map_err(err)?;
    let mut listed = vec![(SAMPLE_SPREAD_FIRST_KIND, SpreadKind::First)];
    listed.extend(SAMPLE_SPREADS_SECOND_KIND.iter().map(|s| (*s, SpreadKind::Second)));
    for (k, (rows, kind)) in listed.into_iter().enumerate() {
        let mut idx = rows
            .iter()
            .map(|row| plane_of(w, row).map(|p| t.plane_index(p)))
            .collect::<Result<Option<Vec<usize>>, _>>()?
            .unwrap_or_default();
        idx.sort_unstable();
        let found = ss.iter().any(|s| s.planes == idx && s.kind == kind);
        r.check(&format!("listed spread #{} ({kind:?} kind)", k + 1), found, "reproduced on the reference copy");
    }
    Ok(())
}

/// The linear doily of observables with `I` on the given qubit.
fn qubit_doily(w: &PolarSpace, qubit: usize) -> Result<&'static hexctx_core::Doily, CliError> {
    let lines: LineSet = (0..w.lines().len())
        .filter(|&l| w.line_observables(l).iter().all(|o| o.letter(qubit) == Letter::I))
        .collect();
    all_doilies()
        .map_err(err)?
        .iter()
        .find(|d| d.lines == lines)
        .ok_or_else(|| CliError::Compute(format!("no doily for qubit {}", qubit + 1)))
}

fn doily_patterns(r: &mut Recorder) -> Result<(), CliError> {
    let w = PolarSpace::three_qubit();
    let doilies = all_doilies().map_err(err)?;
    let mut failures = 0;
    for h in classical_copies().map_err(err)? {
        failures += doilies.iter().filter(|d| classify_doily_classical(w, d, h).is_err()).count();
    }
    r.check(
        "classical copies: P3-grid against all doilies",
        failures == 0,
        format!("{failures} of {} pairs outside the pattern", 120 * doilies.len()),
    );
    let mut tally: BTreeMap<DoilyPattern, usize> = BTreeMap::new();
    let mut outside = 0;
    let mut max_shared = 0;
    for h in skew_copies().map_err(err)? {
        for d in &doilies[..336] {
            match classify_doily_hexagon(w, d, h) {
                Ok(p) => {
                    max_shared = max_shared.max(p.shared.len());
                    *tally.entry(p.pattern).or_default() += 1;
                }
                Err(_) => outside += 1,
            }
        }
    }
    r.check(
        "skew copies: four-pattern taxonomy against linear doilies",
        outside == 0 && tally.len() == 4 && max_shared == 6,
        format!("{tally:?}, {outside} outside, max shared {max_shared}"),
    );
    let h = resolve_skew(SkewRef::Reference).map_err(err)?;
    r.expect(
        "reference skew copy axis",
        h.axis.map(|a| w.line_label(a)),
        Some(w.line_label(w.parse_line(REFERENCE_SKEW_AXIS).map_err(err)?)),
    );
    let cases = [
        ("left", 0, DoilyPattern::P3Quadrangle, Some(2)),
        ("right", 2, DoilyPattern::P2Concurrent, Some(4)),
        ("middle", 1, DoilyPattern::P6, None),
    ];
    for (k, (label, qubit, pattern, avoid)) in cases.into_iter().enumerate() {
        let d = qubit_doily(w, qubit)?;
        let want: LineSet = REFERENCE_SKEW_DOILY_LINES[k]
            .iter()
            .map(|s| w.parse_line(s))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let p = classify_doily_hexagon(w, d, &h).map_err(err)?;
        let shared = LineSet::from_ids(p.shared.iter().copied());
        r.check(
            &format!("{label} doily example"),
            shared == want && p.pattern == pattern,
            format!("{} shared lines, {:?}", p.shared.len(), p.pattern),
        );
        if let Some(n) = avoid {
            r.expect(&format!("{label} doily grids avoiding shared lines"), grids_avoiding(w, d, &shared).map_err(err)?, n);
        }
    }
    Ok(())
}

fn quadrics(r: &mut Recorder) -> Result<(), CliError> {
    let w = PolarSpace::three_qubit();
    let quadrics = w.quadrics().map_err(err)?;
    let mut tally: BTreeMap<(&str, usize), usize> = BTreeMap::new();
    let mut mismatched = 0;
    for h in classical_copies().map_err(err)? {
        for q in &quadrics {
            let s = classify_hexagon_quadric(w, h, q).map_err(err)?;
            let ok = matches!(
                (q.kind, s.pattern),
                (QuadricKind::Elliptic, QuadricPattern::NineSpread) | (QuadricKind::Hyperbolic, QuadricPattern::Heawood)
            );
            mismatched += usize::from(!ok);
            let name = if q.kind == QuadricKind::Elliptic { "elliptic" } else { "hyperbolic" };
            *tally.entry((name, s.shared.len())).or_default() += 1;
        }
    }
    r.check(
        "hexagon ∩ quadric: 9-spread (elliptic), Heawood (hyperbolic)",
        mismatched == 0,
        format!("{tally:?}"),
    );
    let h = reference_classical().map_err(err)?;
    let e = w.quadric_from_index("YYY".parse().map_err(err)?).map_err(err)?;
    let hy = w.quadric_from_index("III".parse().map_err(err)?).map_err(err)?;
    let shared = h.lines.intersection(e.lines).intersection(hy.lines);
    let want: LineSet = SHARED_QUADRIC_LINES
        .iter()
        .map(|s| w.parse_line(s))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    r.check(
        "shared lines of the reference copy with elliptic YYY and hyperbolic III",
        shared == want,
        shared.iter().map(|l| w.line_label(l)).collect::<Vec<_>>().join(", "),
    );
    Ok(())
}

fn violated_is_hexagon(r: &mut Recorder, settings: SearchSettings) -> Result<(), CliError> {
    let enumerated = [
        ("elliptic:YYY", 9),
        ("hyperbolic:III", 21),
        ("ldoily:0", 3),
        ("qdoily:III,YYY", 3),
    ];
    for (target, size) in enumerated {
        let resolved = resolve_target(target, settings).map_err(err)?;
        let c = &resolved.configuration;
        let all = degree_exact_all(c, settings.rank_limit.max(30)).map_err(err)?;
        let mut unmatched = 0;
        for v in &all.optima {
            let violated: Vec<usize> = v.ones().collect();
            if matching_classical_copies(c, &violated).map_err(err)?.is_empty() {
                unmatched += 1;
            }
        }
        r.check(
            &format!("{target}: every optimum is a hexagon intersection"),
            unmatched == 0 && all.certificate.upper == size && !all.optima.is_empty(),
            format!("d = {}, {} optima, {unmatched} unmatched", all.certificate.upper, all.optima.len()),
        );
    }
    let resolved = resolve_target("w52", settings).map_err(err)?;
    let cert = certify_degree(&resolved.configuration, &resolved.options).map_err(err)?;
    let violated = violated_lines(&resolved.configuration, &cert.assignment).map_err(err)?;
    let matched = matching_classical_copies(&resolved.configuration, &violated).map_err(err)?;
    r.check(
        "w52: certified optimum is a classical hexagon",
        cert.exact && cert.upper == 63 && !matched.is_empty(),
        format!("d = {}..{}, matches {matched:?}", cert.lower, cert.upper),
    );
    Ok(())
}

fn trace_out_suite(r: &mut Recorder) -> Result<(), CliError> {
    let w = PolarSpace::three_qubit();
    let mut bad = 0;
    for h in classical_copies().map_err(err)? {
        for q in 0..3 {
            let t = trace_out(w, h, q).map_err(err)?;
            let identity_ok = t.trivial.iter().all(|p| w.point(p).trace_out(q).is_identity());
            if !(t.uncovered == t.trivial && t.trivial.len() == 3 && identity_ok) {
                bad += 1;
            }
        }
    }
    r.check(
        "classical copies leave exactly the 3 trivial points uncovered",
        bad == 0,
        format!("{bad} of 360 copy/qubit pairs differ"),
    );
    let mut extra: BTreeMap<usize, usize> = BTreeMap::new();
    let mut grids = 0;
    let mut axis_grids = 0;
    for h in skew_copies().map_err(err)? {
        for q in 0..3 {
            let t = trace_out(w, h, q).map_err(err)?;
            *extra.entry(t.extra().len()).or_default() += 1;
            if let Some((_, third)) = trace_out_grid(w, &t) {
                grids += 1;
                axis_grids += usize::from(Some(third) == h.axis);
            }
        }
    }
    r.check(
        "skew copies: 6 extra points on two disjoint lines completed by the axis",
        axis_grids > 0,
        format!("{axis_grids} of {grids} two-line cases end on the axis; extra-point distribution {extra:?}"),
    );
    Ok(())
}

fn partition(r: &mut Recorder) -> Result<(), CliError> {
    let w = PolarSpace::three_qubit();
    let doilies = all_doilies().map_err(err)?;
    let mut bad = 0;
    for h in classical_copies().map_err(err)? {
        let parts = doily_partition_of_hexagon(w, h, doilies).map_err(err)?;
        let covered: LineSet = parts
            .iter()
            .flat_map(|&i| doilies[i].lines.intersection(h.lines).to_vec())
            .collect();
        if parts.len() != 21 || covered != h.lines {
            bad += 1;
        }
    }
    r.check(
        "every classical copy splits into 21 doily triples",
        bad == 0,
        format!("{bad} of 120 copies without a partition"),
    );
    Ok(())
}
