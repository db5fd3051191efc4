//! Binary symplectic representation of the n-qubit Pauli group.
//!
//! A canonical observable `A_1 A_2 ... A_n` is stored as the pair of bit
//! vectors `(a, b)` with `A_i = Z^{a_i} X^{b_i}`. Qubit 1 (the leftmost
//! character of the textual form) occupies the most significant bit of both
//! `a` and `b`, so the packed `2n`-bit integer `a ‖ b` reads the coordinates
//! `(a_1, ..., a_n, b_1, ..., b_n)` left to right.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported qubit count (points fit in a `u16`).
pub const MAX_QUBITS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("empty observable string")]
    Empty,
    #[error("invalid character {0:?} in observable (expected one of I, X, Y, Z)")]
    InvalidChar(char),
    #[error("qubit count {0} out of range 1..={MAX_QUBITS}")]
    QubitCount(usize),
    #[error("qubit count mismatch: {0} vs {1}")]
    Mismatch(usize, usize),
    #[error("observables {0} and {1} do not commute")]
    NonCommuting(Observable, Observable),
    #[error("context product is {0}, not proportional to the identity")]
    NotIdentity(Observable),
    #[error("context product carries an imaginary phase")]
    ImaginaryPhase,
    #[error("empty context")]
    EmptyContext,
}

/// A global phase `i^k`, `k` taken mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn new(k: u8) -> Self {
        Phase(k & 3)
    }

    /// The exponent `k` of `i^k`.
    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 & 1 == 0
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) & 3)
    }
}

impl std::ops::MulAssign for Phase {
    fn mul_assign(&mut self, rhs: Phase) {
        *self = *self * rhs;
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

/// Sign of a context: the product of its observables is `+I` or `-I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn is_negative(self) -> bool {
        self == Sign::Minus
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bit(self.is_negative() ^ rhs.is_negative())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Single-qubit Pauli letter in `(a, b)` encoding: `Z^a X^b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(a: bool, b: bool) -> Self {
        match (a, b) {
            (false, false) => Letter::I,
            (false, true) => Letter::X,
            (true, true) => Letter::Y,
            (true, false) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (false, true),
            Letter::Y => (true, true),
            Letter::Z => (true, false),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    /// Phase exponent `k` in `self * rhs = i^k * (product letter)`.
    fn product_phase(self, rhs: Letter) -> u8 {
        use Letter::*;
        match (self, rhs) {
            (X, Y) | (Y, Z) | (Z, X) => 1,
            (Y, X) | (Z, Y) | (X, Z) => 3,
            _ => 0,
        }
    }
}

/// A canonical (phase `+1`) n-qubit Pauli operator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Observable {
    // field order gives the derived Ord: by qubit count, then by a ‖ b
    n: u8,
    a: u8,
    b: u8,
}

impl Observable {
    pub fn new(n: usize, a: u8, b: u8) -> Result<Self, PauliError> {
        if n == 0 || n > MAX_QUBITS {
            return Err(PauliError::QubitCount(n));
        }
        let mask = mask(n);
        Ok(Observable {
            n: n as u8,
            a: a & mask,
            b: b & mask,
        })
    }

    pub fn identity(n: usize) -> Result<Self, PauliError> {
        Self::new(n, 0, 0)
    }

    /// Build from the packed `2n`-bit integer `a ‖ b`.
    pub fn from_bits(n: usize, bits: u16) -> Result<Self, PauliError> {
        Self::new(n, (bits >> n) as u8, bits as u8)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Z-exponent vector.
    pub fn a(&self) -> u8 {
        self.a
    }

    /// X-exponent vector.
    pub fn b(&self) -> u8 {
        self.b
    }

    /// Packed `a ‖ b`; the canonical ordering key.
    pub fn bits(&self) -> u16 {
        ((self.a as u16) << self.n) | self.b as u16
    }

    pub fn is_identity(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Letter on qubit `q` (0-based from the left).
    pub fn letter(&self, q: usize) -> Letter {
        let shift = self.n as usize - 1 - q;
        Letter::from_bits((self.a >> shift) & 1 == 1, (self.b >> shift) & 1 == 1)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.n()).map(move |q| self.letter(q))
    }

    /// Number of non-identity positions.
    pub fn weight(&self) -> u32 {
        (self.a | self.b).count_ones()
    }

    fn check_same(&self, other: &Observable) -> Result<(), PauliError> {
        if self.n != other.n {
            Err(PauliError::Mismatch(self.n(), other.n()))
        } else {
            Ok(())
        }
    }

    /// `a·b' + a'·b` over GF(2).
    pub fn symplectic_form(&self, other: &Observable) -> Result<bool, PauliError> {
        self.check_same(other)?;
        Ok(self.form_unchecked(other))
    }

    #[inline]
    pub(crate) fn form_unchecked(&self, other: &Observable) -> bool {
        ((self.a & other.b) ^ (other.a & self.b)).count_ones() & 1 == 1
    }

    pub fn commutes(&self, other: &Observable) -> Result<bool, PauliError> {
        Ok(!self.symplectic_form(other)?)
    }

    /// Product `self * other` as a canonical observable times a phase.
    pub fn multiply(&self, other: &Observable) -> Result<(Observable, Phase), PauliError> {
        self.check_same(other)?;
        let mut k = 0u8;
        for q in 0..self.n() {
            k += self.letter(q).product_phase(other.letter(q));
        }
        Ok((
            Observable {
                n: self.n,
                a: self.a ^ other.a,
                b: self.b ^ other.b,
            },
            Phase::new(k),
        ))
    }

    /// Sign-stripped product (vector sum).
    pub fn xor(&self, other: &Observable) -> Observable {
        debug_assert_eq!(self.n, other.n);
        Observable {
            n: self.n,
            a: self.a ^ other.a,
            b: self.b ^ other.b,
        }
    }

    /// Number of `Y` letters.
    pub fn y_count(&self) -> u32 {
        (self.a & self.b).count_ones()
    }

    /// `O^T = O` exactly when the number of `Y`s is even.
    pub fn is_symmetric(&self) -> bool {
        self.y_count() % 2 == 0
    }

    /// Drop qubit `q` (0-based), keeping the others in order.
    pub fn trace_out(&self, q: usize) -> Observable {
        assert!(self.n > 1 && q < self.n());
        let n = self.n as usize;
        let shift = n - 1 - q;
        let squeeze = |v: u8| -> u8 {
            let low = v & ((1u8 << shift) - 1);
            let high = (v as u16 >> (shift + 1)) as u8;
            (high << shift) | low
        };
        Observable {
            n: (n - 1) as u8,
            a: squeeze(self.a),
            b: squeeze(self.b),
        }
    }
}

fn mask(n: usize) -> u8 {
    if n >= 8 {
        0xff
    } else {
        (1u8 << n) - 1
    }
}

impl FromStr for Observable {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, PauliError> {
        parse_observable(s)
    }
}

/// Parse the textual form, e.g. `"XYZ"`.
pub fn parse_observable(text: &str) -> Result<Observable, PauliError> {
    let n = text.chars().count();
    if n == 0 {
        return Err(PauliError::Empty);
    }
    if n > MAX_QUBITS {
        return Err(PauliError::QubitCount(n));
    }
    let (mut a, mut b) = (0u8, 0u8);
    for c in text.chars() {
        let letter = match c {
            'I' => Letter::I,
            'X' => Letter::X,
            'Y' => Letter::Y,
            'Z' => Letter::Z,
            other => return Err(PauliError::InvalidChar(other)),
        };
        let (za, xb) = letter.bits();
        a = (a << 1) | za as u8;
        b = (b << 1) | xb as u8;
    }
    Observable::new(n, a, b)
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Observable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Product of all observables with accumulated phase.
pub fn product(obs: &[Observable]) -> Result<(Observable, Phase), PauliError> {
    let first = obs.first().ok_or(PauliError::EmptyContext)?;
    let mut acc = Observable::identity(first.n())?;
    let mut phase = Phase::ONE;
    for o in obs {
        let (p, k) = acc.multiply(o)?;
        acc = p;
        phase *= k;
    }
    Ok((acc, phase))
}

/// Sign of a context: pairwise commuting observables whose product is `±I`.
pub fn context_sign(obs: &[Observable]) -> Result<Sign, PauliError> {
    for (i, u) in obs.iter().enumerate() {
        for v in &obs[i + 1..] {
            if !u.commutes(v)? {
                return Err(PauliError::NonCommuting(*u, *v));
            }
        }
    }
    let (p, phase) = product(obs)?;
    if !p.is_identity() {
        return Err(PauliError::NotIdentity(p));
    }
    match phase.exponent() {
        0 => Ok(Sign::Plus),
        2 => Ok(Sign::Minus),
        _ => Err(PauliError::ImaginaryPhase),
    }
}

/// All `4^n - 1` non-identity observables in canonical order.
pub fn all_observables(n: usize) -> Result<Vec<Observable>, PauliError> {
    if n == 0 || n > MAX_QUBITS {
        return Err(PauliError::QubitCount(n));
    }
    let top: u32 = 1 << (2 * n);
    (1..top).map(|v| Observable::from_bits(n, v as u16)).collect()
}
