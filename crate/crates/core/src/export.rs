//! Serializable records for catalogs, hexagon copies and certificates.

use serde::{Deserialize, Serialize};

use crate::contextuality::{Configuration, DegreeCertificate, LowerMethod, UpperMethod};
use crate::hexagon::{EmbeddingKind, HexagonCopy};
use crate::polar::{IsotropicPlane, PolarSpace};

/// Flat certificate record for JSON output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub config_id: String,
    pub p: usize,
    pub l: usize,
    pub upper: usize,
    pub lower: usize,
    pub exact: bool,
    pub method: String,
    pub upper_method: UpperMethod,
    pub lower_method: LowerMethod,
    pub seed: u64,
    pub assignment_hex: String,
    /// W(5,2) (or W(3,2)) line IDs when the configuration is made of lines,
    /// context indices otherwise.
    pub violated_line_ids: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matched_hexagon_id: Option<usize>,
}

impl CertificateRecord {
    pub fn new(
        config_id: &str,
        c: &Configuration,
        cert: &DegreeCertificate,
        seed: u64,
        matched_hexagon_id: Option<usize>,
    ) -> Self {
        let violated_line_ids = match c.source_lines() {
            Some(src) => cert.violated.iter().map(|&i| src[i]).collect(),
            None => cert.violated.clone(),
        };
        let method = match (&cert.upper_method, &cert.lower_method) {
            (UpperMethod::Enumeration, LowerMethod::Enumeration) => "enumeration".to_string(),
            (u, l) => format!("{}+{}", upper_name(u), lower_name(l)),
        };
        CertificateRecord {
            config_id: config_id.to_string(),
            p: c.p(),
            l: c.l(),
            upper: cert.upper,
            lower: cert.lower,
            exact: cert.exact,
            method,
            upper_method: cert.upper_method.clone(),
            lower_method: cert.lower_method.clone(),
            seed,
            assignment_hex: cert.assignment.to_hex(),
            violated_line_ids,
            matched_hexagon_id,
        }
    }
}

fn upper_name(m: &UpperMethod) -> &'static str {
    match m {
        UpperMethod::Enumeration => "enumeration",
        UpperMethod::Achievability { .. } => "achievability",
        UpperMethod::LocalSearch { .. } => "local-search",
        UpperMethod::Baseline => "baseline",
    }
}

fn lower_name(m: &LowerMethod) -> &'static str {
    match m {
        LowerMethod::Enumeration => "enumeration",
        LowerMethod::Tiling { .. } => "tiling",
        LowerMethod::Packing { .. } => "packing",
        LowerMethod::Trivial => "trivial",
    }
}

/// Catalog table: a header and string rows, ready for CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub fn points_table(w: &PolarSpace) -> Table {
    Table {
        header: vec!["id", "observable", "symmetric"],
        rows: w
            .points()
            .iter()
            .enumerate()
            .map(|(i, o)| vec![i.to_string(), o.to_string(), o.is_symmetric().to_string()])
            .collect(),
    }
}

pub fn lines_table(w: &PolarSpace) -> Table {
    Table {
        header: vec!["id", "obs1", "obs2", "obs3", "sign"],
        rows: w
            .lines()
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let mut r = vec![i.to_string()];
                r.extend(l.points.iter().map(|&p| w.point(p).to_string()));
                r.push(l.sign.as_i8().to_string());
                r
            })
            .collect(),
    }
}

pub fn planes_table(w: &PolarSpace, planes: &[IsotropicPlane]) -> Table {
    Table {
        header: vec!["id", "observables"],
        rows: planes
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let obs: Vec<String> = p.points.iter().map(|q| w.point(q).to_string()).collect();
                vec![i.to_string(), obs.join(" ")]
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HexagonRecord {
    pub kind: EmbeddingKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    /// `[obs, obs, obs, sign]` per line.
    pub lines: Vec<(String, String, String, i8)>,
}

pub fn hexagon_record(w: &PolarSpace, h: &HexagonCopy) -> HexagonRecord {
    HexagonRecord {
        kind: h.kind,
        axis: h.axis.map(|a| w.line_label(a)),
        lines: h
            .lines
            .iter()
            .map(|l| {
                let [a, b, c] = w.line_observables(l).map(|o| o.to_string());
                (a, b, c, w.line(l).sign.as_i8())
            })
            .collect(),
    }
}

/// Point-line incidence graph in Graphviz DOT.
pub fn hexagon_dot(w: &PolarSpace, h: &HexagonCopy) -> String {
    let mut s = String::from("graph hexagon {\n  node [shape=point];\n");
    for p in w.points_of(&h.lines).iter() {
        let shape = if h.planar_points.contains(p) { "doublecircle" } else { "circle" };
        s.push_str(&format!("  \"{}\" [shape={shape}, label=\"{}\"];\n", w.point(p), w.point(p)));
    }
    for l in h.lines.iter() {
        let style = if Some(l) == h.axis { ", penwidth=3" } else { "" };
        let dashed = if w.line(l).sign.is_negative() { ", style=dashed" } else { "" };
        s.push_str(&format!("  \"L{l}\" [shape=box, label=\"\"{style}];\n"));
        for &p in &w.line(l).points {
            s.push_str(&format!("  \"L{l}\" -- \"{}\" [{}];\n", w.point(p), dashed.trim_start_matches(", ")));
        }
    }
    s.push_str("}\n");
    s
}
