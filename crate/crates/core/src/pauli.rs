//! Pauli strings and weighted sums of them.
//!
//! A [`PauliString`] stores one X bit and one Z bit per qubit. Qubit `q`
//! (1-based, as in site labels) lives at bit `n - q`, which is the same bit it
//! occupies in a computational-basis index: qubit 1 is the most significant
//! bit. With that layout `P|b> = i^y (-1)^{|z & b|} |b ^ x>`, where `y` counts
//! the Y letters, since `Y = i X Z`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ZERO};
use crate::par::{self, Exec};

/// Coefficients with modulus below this are not stored.
pub const DROP_TOL: f64 = 1e-12;

/// Largest register converted to a dense matrix.
pub const DENSE_LIMIT: usize = 13;

pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A power of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u32) -> Phase {
        Phase((k % 4) as u8)
    }

    pub fn power(self) -> u32 {
        self.0 as u32
    }

    pub fn value(self) -> Complex64 {
        i_pow(self.0 as u32)
    }
}

#[inline]
fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[inline]
fn parity(v: u64) -> bool {
    v.count_ones() & 1 == 1
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    /// # Panics
    /// If `n` exceeds [`MAX_QUBITS`].
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits supported, got {n}");
        PauliString { n, x: 0, z: 0 }
    }

    pub fn from_paulis(letters: &[Pauli]) -> Result<Self> {
        let n = letters.len();
        if n > MAX_QUBITS {
            return Err(Error::Resource(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        let mut s = PauliString::identity(n);
        for (k, p) in letters.iter().enumerate() {
            s.set(k + 1, *p);
        }
        Ok(s)
    }

    /// Single-qubit Pauli `p` on qubit `q` (1-based) of an `n`-qubit register.
    pub fn single(n: usize, q: usize, p: Pauli) -> Result<Self> {
        if q == 0 || q > n {
            return Err(Error::Index(format!("qubit {q} outside 1..={n}")));
        }
        let mut s = PauliString::identity(n);
        s.set(q, p);
        Ok(s)
    }

    fn bit(&self, q: usize) -> u64 {
        1u64 << (self.n - q)
    }

    fn set(&mut self, q: usize, p: Pauli) {
        let b = self.bit(q);
        let (x, z) = p.bits();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn letter(&self, q: usize) -> Pauli {
        let b = self.bit(q);
        Pauli::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Qubits (1-based) carrying a non-identity letter.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.n).filter(|&q| self.letter(q) != Pauli::I).collect()
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Product `self * other = phase * product`.
    pub fn mul(&self, other: &PauliString) -> Result<(Phase, PauliString)> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "cannot multiply {}-qubit and {}-qubit strings",
                self.n, other.n
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &PauliString) -> (Phase, PauliString) {
        let product = PauliString {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        };
        // (i^y1 X^x1 Z^z1)(i^y2 X^x2 Z^z2) = i^(y1+y2) (-1)^|z1&x2| X^x Z^z, and X^x Z^z = i^-y3 P3.
        let swap = 2 * (self.z & other.x).count_ones();
        let k = self.y_count() + other.y_count() + swap + 4 * MAX_QUBITS as u32 - product.y_count();
        (Phase::from_power(k), product)
    }

    /// `P|b> = phase |b'>`.
    #[inline]
    pub fn apply_to_index(&self, b: usize) -> (usize, Complex64) {
        let sign = if parity(self.z & b as u64) { 2 } else { 0 };
        (b ^ self.x as usize, i_pow(self.y_count() + sign))
    }

    fn block_shift(&self, start: usize, len: usize) -> Result<u32> {
        if start == 0 || start + len - 1 > self.n || len == 0 {
            return Err(Error::Index(format!(
                "qubit block {start}..{} outside 1..={}",
                start + len - 1,
                self.n
            )));
        }
        Ok((self.n - (start + len - 1)) as u32)
    }

    /// True when every non-identity letter lies on qubits `start..start+len`.
    pub fn acts_within(&self, start: usize, len: usize) -> bool {
        match self.block_shift(start, len) {
            Ok(shift) => {
                let mask = low_mask(len) << shift;
                (self.x | self.z) & !mask == 0
            }
            Err(_) => false,
        }
    }

    /// The letters on qubits `start..start+len`, as a `len`-qubit string.
    pub fn restrict(&self, start: usize, len: usize) -> Result<PauliString> {
        let shift = self.block_shift(start, len)?;
        let mask = low_mask(len);
        Ok(PauliString {
            n: len,
            x: (self.x >> shift) & mask,
            z: (self.z >> shift) & mask,
        })
    }

    /// Place a local string on qubits `start..start+local.n` of an `n_total` register.
    pub fn embed(&self, n_total: usize, start: usize) -> Result<PauliString> {
        let probe = PauliString::identity(n_total);
        let shift = probe.block_shift(start, self.n)?;
        Ok(PauliString {
            n: n_total,
            x: self.x << shift,
            z: self.z << shift,
        })
    }
}

fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 1..=self.n {
            write!(f, "{}", self.letter(q).letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .enumerate()
            .map(|(k, c)| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Parse {
                    line: 0,
                    message: format!("invalid Pauli letter '{other}' at position {}", k + 1),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::from_paulis(&letters)
    }
}

/// Weighted sum of Pauli strings over a fixed register.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "PauliSumJson", try_from = "PauliSumJson")]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits supported, got {n}");
        PauliSum {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        PauliSum::from_string(PauliString::identity(n), Complex64::new(1.0, 0.0))
    }

    pub fn from_string(s: PauliString, coeff: Complex64) -> Self {
        let mut sum = PauliSum::zero(s.n_qubits());
        sum.add_term(s, coeff);
        sum
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, Complex64)>,
    {
        let mut sum = PauliSum::zero(n);
        for (s, c) in terms {
            if s.n_qubits() != n {
                return Err(Error::Dimension(format!(
                    "term {s} has {} qubits, sum has {n}",
                    s.n_qubits()
                )));
            }
            sum.add_term(s, c);
        }
        Ok(sum)
    }

    /// Parse `[(letters, coeff)]` pairs; convenient for literals in tests and builders.
    pub fn from_labels(labels: &[(&str, f64)]) -> Result<Self> {
        let n = labels.first().map_or(0, |(s, _)| s.len());
        let parsed = labels
            .iter()
            .map(|(s, c)| Ok((s.parse::<PauliString>()?, Complex64::new(*c, 0.0))))
            .collect::<Result<Vec<_>>>()?;
        PauliSum::from_terms(n, parsed)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or(ZERO)
    }

    /// # Panics
    /// If the string's register differs from the sum's.
    pub fn add_term(&mut self, s: PauliString, coeff: Complex64) {
        assert_eq!(s.n_qubits(), self.n, "qubit count mismatch in add_term");
        let entry = self.terms.entry(s).or_insert(ZERO);
        *entry += coeff;
        if entry.norm() < DROP_TOL {
            self.terms.remove(&s);
        }
    }

    pub fn scale(&self, c: Complex64) -> PauliSum {
        let mut out = PauliSum::zero(self.n);
        for (s, v) in &self.terms {
            out.add_term(*s, v * c);
        }
        out
    }

    pub fn adjoint(&self) -> PauliSum {
        PauliSum {
            n: self.n,
            terms: self.terms.iter().map(|(s, c)| (*s, c.conj())).collect(),
        }
    }

    /// Largest imaginary part over all coefficients.
    pub fn anti_hermitian_magnitude(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.anti_hermitian_magnitude() <= tol
    }

    /// Remove coefficients below `tol`.
    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() >= tol);
    }

    pub fn checked_add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.same_register(other)?;
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(*s, *c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.same_register(other)?;
        let mut out = PauliSum::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (phase, p) = a.mul_unchecked(b);
                out.add_term(p, ca * cb * phase.value());
            }
        }
        Ok(out)
    }

    fn same_register(&self, other: &PauliSum) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "{}-qubit and {}-qubit sums",
                self.n, other.n
            )));
        }
        Ok(())
    }

    /// True when every term acts only on qubits `start..start+len`.
    pub fn acts_within(&self, start: usize, len: usize) -> bool {
        self.terms.keys().all(|s| s.acts_within(start, len))
    }

    pub fn restrict(&self, start: usize, len: usize) -> Result<PauliSum> {
        let mut out = PauliSum::zero(len);
        for (s, c) in &self.terms {
            if !s.acts_within(start, len) {
                return Err(Error::Support(format!(
                    "term {s} acts outside qubits {start}..={}",
                    start + len - 1
                )));
            }
            out.add_term(s.restrict(start, len)?, *c);
        }
        Ok(out)
    }

    pub fn embed(&self, n_total: usize, start: usize) -> Result<PauliSum> {
        let mut out = PauliSum::zero(n_total);
        for (s, c) in &self.terms {
            out.add_term(s.embed(n_total, start)?, *c);
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Result<CMat> {
        self.to_dense_with_limit(DENSE_LIMIT)
    }

    pub fn to_dense_with_limit(&self, limit: usize) -> Result<CMat> {
        if self.n > limit {
            return Err(Error::Resource(format!(
                "{} qubits exceeds the dense limit of {limit}",
                self.n
            )));
        }
        let dim = 1usize << self.n;
        let mut m = linalg::zeros(dim, dim);
        for (s, c) in &self.terms {
            for b in 0..dim {
                let (row, ph) = s.apply_to_index(b);
                m[(row, b)] += c * ph;
            }
        }
        Ok(m)
    }

    /// Pauli decomposition of a `2^n x 2^n` matrix: coefficient of `P` is `Tr(P m) / 2^n`.
    pub fn from_dense(m: &CMat) -> Result<PauliSum> {
        let dim = m.nrows();
        if dim != m.ncols() || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "matrix of shape {}x{} is not 2^n square",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = dim.trailing_zeros() as usize;
        if n > DENSE_LIMIT {
            return Err(Error::Resource(format!(
                "{n} qubits exceeds the dense limit of {DENSE_LIMIT}"
            )));
        }
        let norm = 1.0 / dim as f64;
        let mut out = PauliSum::zero(n);
        for x in 0..dim {
            for z in 0..dim {
                let s = PauliString {
                    n,
                    x: x as u64,
                    z: z as u64,
                };
                let mut tr = ZERO;
                for b in 0..dim {
                    let (row, ph) = s.apply_to_index(b);
                    tr += ph * m[(b, row)];
                }
                out.add_term(s, tr * norm);
            }
        }
        Ok(out)
    }

    pub fn op_norm(&self) -> Result<f64> {
        linalg::op_norm(&self.to_dense()?)
    }

    /// `out = self |psi>` without densifying the operator.
    pub fn apply(&self, exec: Exec, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = self.check_len(psi.len())?;
        let terms = self.flat_terms();
        let mut out = vec![ZERO; dim];
        par::fill(exec, &mut out, |a| {
            let mut acc = ZERO;
            for &(x, z, c) in &terms {
                let b = a ^ x as usize;
                let v = psi[b];
                if parity(z & b as u64) {
                    acc -= c * v;
                } else {
                    acc += c * v;
                }
            }
            acc
        });
        Ok(out)
    }

    /// `<bra| self |ket>`, accumulated term by term.
    pub fn transition(&self, exec: Exec, bra: &[Complex64], ket: &[Complex64]) -> Result<Complex64> {
        let dim = self.check_len(ket.len())?;
        self.check_len(bra.len())?;
        let terms = self.flat_terms();
        let mut total = ZERO;
        for &(x, z, c) in &terms {
            let x = x as usize;
            let inner = par::chunked_sum(exec, dim, |b| {
                let v = bra[b ^ x].conj() * ket[b];
                if parity(z & b as u64) {
                    -v
                } else {
                    v
                }
            });
            total += c * inner;
        }
        Ok(total)
    }

    fn check_len(&self, len: usize) -> Result<usize> {
        let dim = 1usize << self.n;
        if len != dim {
            return Err(Error::Dimension(format!(
                "vector of length {len} for a {}-qubit operator",
                self.n
            )));
        }
        Ok(dim)
    }

    /// `(x, z, coeff * i^y)` per term.
    fn flat_terms(&self) -> Vec<(u64, u64, Complex64)> {
        self.terms
            .iter()
            .map(|(s, c)| (s.x, s.z, c * i_pow(s.y_count())))
            .collect()
    }
}

impl fmt::Debug for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliSum[{}](", self.n)?;
        for (k, (s, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i){s}", c.re, c.im)?;
        }
        write!(f, ")")
    }
}

impl Add for &PauliSum {
    type Output = PauliSum;
    fn add(self, rhs: &PauliSum) -> PauliSum {
        self.checked_add(rhs).expect("qubit count mismatch in PauliSum addition")
    }
}

impl Sub for &PauliSum {
    type Output = PauliSum;
    fn sub(self, rhs: &PauliSum) -> PauliSum {
        self + &(-rhs)
    }
}

impl Neg for &PauliSum {
    type Output = PauliSum;
    fn neg(self) -> PauliSum {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: &PauliSum) -> PauliSum {
        self.checked_mul(rhs).expect("qubit count mismatch in PauliSum product")
    }
}

impl Mul<Complex64> for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: Complex64) -> PauliSum {
        self.scale(rhs)
    }
}

#[derive(Serialize, Deserialize)]
struct PauliTermJson {
    string: String,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PauliSumJson {
    n_qubits: usize,
    terms: Vec<PauliTermJson>,
}

impl From<PauliSum> for PauliSumJson {
    fn from(sum: PauliSum) -> Self {
        PauliSumJson {
            n_qubits: sum.n,
            terms: sum
                .terms
                .iter()
                .map(|(s, c)| PauliTermJson {
                    string: s.to_string(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<PauliSumJson> for PauliSum {
    type Error = Error;

    fn try_from(json: PauliSumJson) -> Result<Self> {
        if json.n_qubits > MAX_QUBITS {
            return Err(Error::Resource(format!("{} qubits", json.n_qubits)));
        }
        let terms = json
            .terms
            .into_iter()
            .map(|t| Ok((t.string.parse::<PauliString>()?, Complex64::new(t.re, t.im))))
            .collect::<Result<Vec<_>>>()?;
        PauliSum::from_terms(json.n_qubits, terms)
    }
}
