//! Cabello's χ for observable-based configurations: delegation circuits,
//! OpenQASM 2.0 emission and parsing, exact statevector simulation and
//! scoring of measured counts.
//!
//! Each operator of a context gets its own delegation qubit. Its block maps
//! the operator's eigenbasis to the computational basis on every
//! non-identity data qubit, copies the parity onto the delegation qubit with
//! CNOTs and undoes the basis change. The product of the delegation outcomes
//! is the measured value of the context.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::thread;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contextuality::Configuration;
use crate::pauli::{context_sign, Letter, Observable, PauliError};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 12;
const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CabelloError {
    #[error("invalid context: {0}")]
    Context(#[from] PauliError),
    #[error("circuit needs {0} qubits, more than the {MAX_QUBITS} supported")]
    TooManyQubits(usize),
    #[error("initial state has squared norm {0}")]
    Unnormalized(f64),
    #[error("initial state has {0} amplitudes, expected {1}")]
    StateLength(usize, usize),
    #[error("invalid basis state {0:?}")]
    BasisState(String),
    #[error("QASM line {line}: {msg}")]
    Qasm { line: usize, msg: String },
    #[error("no counts for context {0}")]
    MissingContext(usize),
    #[error("malformed histogram for context {0}: {1}")]
    Histogram(usize, String),
    #[error("zero shots requested")]
    NoShots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    /// `Cx(control, target)`.
    Cx(usize, usize),
    /// `Measure(qubit, classical bit)`.
    Measure(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub data_qubits: usize,
    pub delegation_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn empty(data_qubits: usize, delegation_qubits: usize) -> Self {
        Circuit {
            data_qubits,
            delegation_qubits,
            gates: Vec::new(),
        }
    }

    pub fn total_qubits(&self) -> usize {
        self.data_qubits + self.delegation_qubits
    }

    /// Register index of delegation qubit `k` (0-based).
    pub fn delegation(&self, k: usize) -> usize {
        self.data_qubits + k
    }
}

/// Gates of one operator block: basis change, CNOTs onto `target`, inverse
/// basis change.
pub fn operator_block(op: &Observable, target: usize) -> Vec<Gate> {
    let mut pre = Vec::new();
    let mut cnots = Vec::new();
    let mut post = Vec::new();
    for (q, letter) in op.letters().enumerate() {
        match letter {
            Letter::I => continue,
            Letter::X => {
                pre.push(Gate::H(q));
                post.push(Gate::H(q));
            }
            Letter::Y => {
                pre.extend([Gate::Sdg(q), Gate::H(q)]);
                post.extend([Gate::H(q), Gate::S(q)]);
            }
            Letter::Z => {}
        }
        cnots.push(Gate::Cx(q, target));
    }
    pre.extend(cnots);
    pre.extend(post);
    pre
}

/// Delegation circuit measuring every operator of a context.
pub fn build_context_circuit(context: &[Observable]) -> Result<Circuit, CabelloError> {
    context_sign(context)?;
    let n = context[0].n();
    let m = context.len();
    if n + m > MAX_QUBITS {
        return Err(CabelloError::TooManyQubits(n + m));
    }
    let mut c = Circuit::empty(n, m);
    for (k, op) in context.iter().enumerate() {
        c.gates.extend(operator_block(op, n + k));
    }
    for k in 0..m {
        c.gates.push(Gate::Measure(n + k, k));
    }
    Ok(c)
}

pub const QASM_HEADER: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

/// OpenQASM 2.0 text for a circuit.
pub fn emit_qasm(c: &Circuit) -> String {
    let mut s = String::from(QASM_HEADER);
    let _ = writeln!(s, "qreg q[{}];", c.total_qubits());
    let _ = writeln!(s, "creg c[{}];", c.delegation_qubits);
    for g in &c.gates {
        let _ = match *g {
            Gate::H(q) => writeln!(s, "h q[{q}];"),
            Gate::S(q) => writeln!(s, "s q[{q}];"),
            Gate::Sdg(q) => writeln!(s, "sdg q[{q}];"),
            Gate::Cx(a, b) => writeln!(s, "cx q[{a}],q[{b}];"),
            Gate::Measure(q, b) => writeln!(s, "measure q[{q}] -> c[{b}];"),
        };
    }
    s
}

/// Parse the OpenQASM subset produced by [`emit_qasm`].
pub fn parse_qasm(text: &str) -> Result<Circuit, CabelloError> {
    let mut qubits = None;
    let mut clbits = None;
    let mut gates = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: &str| CabelloError::Qasm {
            line,
            msg: msg.to_string(),
        };
        let stmt = raw.split("//").next().unwrap_or("").trim();
        if stmt.is_empty() {
            continue;
        }
        let stmt = stmt.strip_suffix(';').ok_or_else(|| err("missing ';'"))?.trim();
        let (word, rest) = stmt.split_once(char::is_whitespace).unwrap_or((stmt, ""));
        let rest = rest.trim();
        let index = |arg: &str, reg: &str, size: Option<usize>| -> Result<usize, CabelloError> {
            let inner = arg
                .trim()
                .strip_prefix(reg)
                .and_then(|a| a.strip_prefix('['))
                .and_then(|a| a.strip_suffix(']'))
                .ok_or_else(|| err(&format!("expected {reg}[k], found {arg:?}")))?;
            let k: usize = inner.parse().map_err(|_| err("bad index"))?;
            match size {
                Some(n) if k < n => Ok(k),
                Some(_) => Err(err("index out of range")),
                None => Err(err("register used before declaration")),
            }
        };
        match word {
            "OPENQASM" if rest == "2.0" => {}
            "include" if rest == "\"qelib1.inc\"" => {}
            "qreg" | "creg" => {
                let size = rest
                    .strip_prefix(if word == "qreg" { "q[" } else { "c[" })
                    .and_then(|r| r.strip_suffix(']'))
                    .and_then(|r| r.parse::<usize>().ok())
                    .ok_or_else(|| err("bad register declaration"))?;
                if word == "qreg" {
                    qubits = Some(size);
                } else {
                    clbits = Some(size);
                }
            }
            "h" => gates.push(Gate::H(index(rest, "q", qubits)?)),
            "s" => gates.push(Gate::S(index(rest, "q", qubits)?)),
            "sdg" => gates.push(Gate::Sdg(index(rest, "q", qubits)?)),
            "cx" => {
                let (a, b) = rest.split_once(',').ok_or_else(|| err("cx needs two operands"))?;
                gates.push(Gate::Cx(index(a, "q", qubits)?, index(b, "q", qubits)?));
            }
            "measure" => {
                let (a, b) = rest.split_once("->").ok_or_else(|| err("measure needs '->'"))?;
                gates.push(Gate::Measure(index(a, "q", qubits)?, index(b, "c", clbits)?));
            }
            _ => return Err(err(&format!("unsupported statement {stmt:?}"))),
        }
    }
    let total = qubits.ok_or(CabelloError::Qasm {
        line: 0,
        msg: "no qreg".into(),
    })?;
    let m = clbits.unwrap_or(0);
    if m > total {
        return Err(CabelloError::Qasm {
            line: 0,
            msg: "more classical bits than qubits".into(),
        });
    }
    Ok(Circuit {
        data_qubits: total - m,
        delegation_qubits: m,
        gates,
    })
}

/// Initial state of the data register; delegation qubits start in |0>.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// Computational basis state, qubit 1 leftmost (e.g. "010").
    Basis(String),
    /// Amplitudes indexed with qubit 1 as the least significant bit.
    Amplitudes(Vec<Complex64>),
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Basis(String::new())
    }
}

/// Dense statevector; qubit `k` is bit `k` of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    /// Amplitudes times `2^(hadamards/2)`: Hadamards are applied without
    /// their `1/sqrt(2)` factor, so basis-state inputs stay on Gaussian
    /// integers and probabilities come out as exact dyadic rationals.
    amps: Vec<Complex64>,
    hadamards: i32,
}

impl StateVector {
    pub fn new(total: usize, data: usize, init: &InitialState) -> Result<Self, CabelloError> {
        if total > MAX_QUBITS {
            return Err(CabelloError::TooManyQubits(total));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << total];
        match init {
            InitialState::Basis(bits) => {
                let bits = if bits.is_empty() { "0".repeat(data) } else { bits.clone() };
                if bits.len() != data || !bits.chars().all(|c| c == '0' || c == '1') {
                    return Err(CabelloError::BasisState(bits));
                }
                let idx = bits
                    .chars()
                    .enumerate()
                    .filter(|(_, c)| *c == '1')
                    .fold(0usize, |m, (q, _)| m | (1 << q));
                amps[idx] = Complex64::new(1.0, 0.0);
            }
            InitialState::Amplitudes(v) => {
                if v.len() != 1 << data {
                    return Err(CabelloError::StateLength(v.len(), 1 << data));
                }
                let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum();
                if (norm - 1.0).abs() > NORM_TOLERANCE {
                    return Err(CabelloError::Unnormalized(norm));
                }
                amps[..v.len()].copy_from_slice(v);
            }
        }
        Ok(StateVector {
            qubits: total,
            amps,
            hadamards: 0,
        })
    }

    /// Normalized amplitudes.
    pub fn amplitudes(&self) -> Vec<Complex64> {
        let scale = std::f64::consts::FRAC_1_SQRT_2.powi(self.hadamards);
        self.amps.iter().map(|a| a * scale).collect()
    }

    fn single(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    pub fn apply(&mut self, g: &Gate) {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match *g {
            Gate::H(q) => {
                self.single(q, [[one, one], [one, -one]]);
                self.hadamards += 1;
            }
            Gate::S(q) => self.single(q, [[one, zero], [zero, Complex64::i()]]),
            Gate::Sdg(q) => self.single(q, [[one, zero], [zero, -Complex64::i()]]),
            Gate::Cx(c, t) => {
                let (cb, tb) = (1 << c, 1 << t);
                for i in 0..self.amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
            Gate::Measure(..) => {}
        }
    }

    /// Probabilities of the classical register for the given measurements.
    pub fn outcome_distribution(&self, measures: &[(usize, usize)], clbits: usize) -> Vec<f64> {
        let mut dist = vec![0.0; 1 << clbits];
        let scale = 0.5f64.powi(self.hadamards);
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr() * scale;
            if p == 0.0 {
                continue;
            }
            let key = measures
                .iter()
                .filter(|(q, _)| (i >> q) & 1 == 1)
                .fold(0usize, |k, &(_, b)| k ^ (1 << b));
            dist[key] += p;
        }
        dist
    }
}

/// Exact outcome distribution of a circuit (measurements at the end).
pub fn simulate_circuit(c: &Circuit, init: &InitialState) -> Result<Vec<f64>, CabelloError> {
    let mut sv = StateVector::new(c.total_qubits(), c.data_qubits, init)?;
    let mut measures = Vec::new();
    for g in &c.gates {
        match *g {
            Gate::Measure(q, b) => measures.push((q, b)),
            _ => sv.apply(g),
        }
    }
    Ok(sv.outcome_distribution(&measures, c.delegation_qubits))
}

/// `E[(-1)^{parity}]` of a distribution over classical outcomes.
pub fn parity_expectation(dist: &[f64]) -> f64 {
    dist.iter()
        .enumerate()
        .map(|(k, p)| if k.count_ones() % 2 == 0 { *p } else { -*p })
        .sum()
}

/// Exact expectation of the product of a context's delegation outcomes.
pub fn simulate_context(context: &[Observable], init: &InitialState) -> Result<f64, CabelloError> {
    let c = build_context_circuit(context)?;
    Ok(parity_expectation(&simulate_circuit(&c, init)?))
}

/// Draw `shots` outcomes from a distribution; returns counts per outcome.
pub fn sample_counts(dist: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(dist.len());
    let mut acc = 0.0;
    for p in dist {
        acc += p;
        cdf.push(acc);
    }
    let mut counts = vec![0u64; dist.len()];
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * acc;
        let k = cdf.partition_point(|&c| c <= u).min(dist.len() - 1);
        counts[k] += 1;
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimulationMode {
    Exact,
    Shots { shots: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextResult {
    pub context: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line_id: Option<usize>,
    pub sign: i8,
    pub expectation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CabelloReport {
    pub contexts: Vec<ContextResult>,
    pub chi: f64,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hv_bound: Option<i64>,
}

impl CabelloReport {
    fn assemble(contexts: Vec<ContextResult>, d: Option<usize>) -> Self {
        let chi = contexts.iter().map(|r| r.sign as f64 * r.expectation).sum();
        let n = contexts.len();
        CabelloReport {
            contexts,
            chi,
            n,
            d,
            hv_bound: d.map(|d| chi_bounds(n, d).1),
        }
    }

    /// Whether χ exceeds the noncontextual bound.
    pub fn violates_hv(&self) -> Option<bool> {
        self.hv_bound.map(|b| self.chi > b as f64)
    }
}

/// `(N, N - 2d)`: the quantum and noncontextual upper bounds on χ.
pub fn chi_bounds(n: usize, d: usize) -> (i64, i64) {
    (n as i64, n as i64 - 2 * d as i64)
}

fn context_observables(c: &Configuration, i: usize) -> Vec<Observable> {
    c.contexts()[i].members.iter().map(|&j| c.points()[j]).collect()
}

/// Simulate every context and aggregate χ.
pub fn estimate_chi(
    c: &Configuration,
    mode: SimulationMode,
    init: &InitialState,
    d: Option<usize>,
) -> Result<CabelloReport, CabelloError> {
    if let SimulationMode::Shots { shots: 0, .. } = mode {
        return Err(CabelloError::NoShots);
    }
    let l = c.l();
    let workers = thread::available_parallelism().map(|n| n.get()).unwrap_or(1).clamp(1, l.max(1));
    let chunk = l.div_ceil(workers).max(1);
    let results: Vec<Result<ContextResult, CabelloError>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..l)
            .step_by(chunk)
            .map(|start| {
                scope.spawn(move || {
                    (start..(start + chunk).min(l))
                        .map(|i| simulate_one(c, i, mode, init))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker")).collect()
    });
    let contexts = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(CabelloReport::assemble(contexts, d))
}

fn simulate_one(c: &Configuration, i: usize, mode: SimulationMode, init: &InitialState) -> Result<ContextResult, CabelloError> {
    let circ = build_context_circuit(&context_observables(c, i))?;
    let dist = simulate_circuit(&circ, init)?;
    let (expectation, shots) = match mode {
        SimulationMode::Exact => (parity_expectation(&dist), None),
        SimulationMode::Shots { shots, seed } => {
            // one independent stream per context keeps results thread-count independent
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let counts = sample_counts(&dist, shots, &mut rng);
            let signed: i64 = counts
                .iter()
                .enumerate()
                .map(|(k, &n)| if k.count_ones() % 2 == 0 { n as i64 } else { -(n as i64) })
                .sum();
            (signed as f64 / shots as f64, Some(shots))
        }
    };
    Ok(ContextResult {
        context: i,
        line_id: c.source_lines().map(|s| s[i]),
        sign: c.contexts()[i].sign.as_i8(),
        expectation,
        shots,
    })
}

/// Measured histogram of one context. Bitstrings list delegation qubits
/// with the first one as the least significant (rightmost) character.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextCounts {
    pub line_id: usize,
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl ContextCounts {
    /// Histogram from counts indexed by outcome (bit `k` = delegation `k`).
    pub fn from_counts(line_id: usize, arity: usize, counts: &[u64]) -> Self {
        let map: BTreeMap<String, u64> = counts
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(k, &n)| (format!("{:0width$b}", k, width = arity), n))
            .collect();
        ContextCounts {
            line_id,
            shots: counts.iter().sum(),
            counts: map,
        }
    }
}

/// χ from externally measured histograms, matched to contexts by
/// `line_id` (the W(5,2) line ID, or the context index for configurations
/// not made of W(5,2) lines).
pub fn score_counts(c: &Configuration, counts: &[ContextCounts], d: Option<usize>) -> Result<CabelloReport, CabelloError> {
    let by_id: BTreeMap<usize, &ContextCounts> = counts.iter().map(|h| (h.line_id, h)).collect();
    let mut results = Vec::with_capacity(c.l());
    for i in 0..c.l() {
        let id = c.source_lines().map_or(i, |s| s[i]);
        let h = by_id.get(&id).ok_or(CabelloError::MissingContext(id))?;
        let arity = c.contexts()[i].members.len();
        let mut total = 0u64;
        let mut signed = 0i64;
        for (bits, &n) in &h.counts {
            if bits.len() != arity || !bits.chars().all(|ch| ch == '0' || ch == '1') {
                return Err(CabelloError::Histogram(id, format!("bad key {bits:?}")));
            }
            let ones = bits.chars().filter(|&ch| ch == '1').count();
            total += n;
            signed += if ones % 2 == 0 { n as i64 } else { -(n as i64) };
        }
        if total == 0 {
            return Err(CabelloError::Histogram(id, "no shots".into()));
        }
        if total != h.shots {
            return Err(CabelloError::Histogram(id, format!("counts sum to {total}, header says {}", h.shots)));
        }
        results.push(ContextResult {
            context: i,
            line_id: c.source_lines().map(|s| s[i]),
            sign: c.contexts()[i].sign.as_i8(),
            expectation: signed as f64 / total as f64,
            shots: Some(total),
        });
    }
    Ok(CabelloReport::assemble(results, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(list: &[&str]) -> Vec<Observable> {
        list.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn xiy_block() {
        let g = operator_block(&"XIY".parse().unwrap(), 3);
        assert_eq!(
            g,
            vec![
                Gate::H(0),
                Gate::Sdg(2),
                Gate::H(2),
                Gate::Cx(0, 3),
                Gate::Cx(2, 3),
                Gate::H(0),
                Gate::H(2),
                Gate::S(2),
            ]
        );
    }

    #[test]
    fn zzz_and_identity_blocks() {
        let g = operator_block(&"ZZZ".parse().unwrap(), 3);
        assert_eq!(g, vec![Gate::Cx(0, 3), Gate::Cx(1, 3), Gate::Cx(2, 3)]);
        assert!(operator_block(&"III".parse().unwrap(), 3).is_empty());
    }

    #[test]
    fn empty_circuit_qasm() {
        let q = emit_qasm(&Circuit::empty(3, 0));
        assert_eq!(q, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\ncreg c[0];\n");
        assert_eq!(parse_qasm(&q).unwrap(), Circuit::empty(3, 0));
    }

    #[test]
    fn qasm_round_trip() {
        let c = build_context_circuit(&obs(&["XYZ", "ZIX", "YYY"])).unwrap();
        assert_eq!(parse_qasm(&emit_qasm(&c)).unwrap(), c);
        assert!(parse_qasm("OPENQASM 2.0;\nqreg q[2];\nrz(0.1) q[0];\n").is_err());
        assert!(parse_qasm("qreg q[2];\nh q[5];\n").is_err());
    }

    #[test]
    fn expectation_is_the_sign() {
        assert!((simulate_context(&obs(&["ZZ", "XX", "YY"]), &InitialState::default()).unwrap() + 1.0).abs() < 1e-12);
        assert!((simulate_context(&obs(&["XYZ", "ZIX", "YYY"]), &InitialState::default()).unwrap() - 1.0).abs() < 1e-12);
        let pent = obs(&["XXX", "XYY", "YXY", "YYX"]);
        assert!((simulate_context(&pent, &InitialState::Basis("101".into())).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        assert!(build_context_circuit(&obs(&["XI", "ZI"])).is_err());
        let s = InitialState::Amplitudes(vec![Complex64::new(1.0, 0.0); 4]);
        assert!(matches!(simulate_context(&obs(&["ZZ", "XX", "YY"]), &s), Err(CabelloError::Unnormalized(_))));
        let b = InitialState::Basis("0a".into());
        assert!(matches!(simulate_context(&obs(&["ZZ", "XX", "YY"]), &b), Err(CabelloError::BasisState(_))));
    }

    #[test]
    fn bounds() {
        assert_eq!(chi_bounds(45, 9), (45, 27));
        assert_eq!(chi_bounds(252, 24), (252, 204));
        assert_eq!(chi_bounds(7, 0), (7, 7));
    }
}
