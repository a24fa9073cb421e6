//! Pauli operators in the symplectic (x, z) representation.
//!
//! A qubit with bits (x, z) carries I = (0,0), X = (1,0), Z = (0,1) and
//! Y = (1,1), so a signed string is `(-1)^negative · ⊗ σ`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Exponent `e` (mod 4) such that `P1 · P2 = i^e · (P1 ⊕ P2)` on one word of
/// qubits, ignoring the signs of the operands.
pub(crate) fn product_phase(x1: u64, z1: u64, x2: u64, z2: u64) -> i32 {
    let (y1, xo1, zo1) = (x1 & z1, x1 & !z1, !x1 & z1);
    let (y2, xo2, zo2) = (x2 & z2, x2 & !z2, !x2 & z2);
    let plus = (y1 & zo2) | (xo1 & y2) | (zo1 & xo2);
    let minus = (y1 & xo2) | (xo1 & zo2) | (zo1 & y2);
    plus.count_ones() as i32 - minus.count_ones() as i32
}

/// Signed Pauli string on at most 32 qubits.
///
/// Position `i` of the string is stored at bit `n - 1 - i` of the masks, so
/// the masks index computational-basis states with position 0 as the most
/// significant bit, matching outcome strings and matrix indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalPauli {
    n: usize,
    x: u32,
    z: u32,
    negative: bool,
}

impl LocalPauli {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 32, "local Pauli strings hold at most 32 qubits");
        LocalPauli { n, x: 0, z: 0, negative: false }
    }

    pub fn from_masks(n: usize, x: u32, z: u32, negative: bool) -> Self {
        assert!(n <= 32, "local Pauli strings hold at most 32 qubits");
        let valid = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        assert!(x & !valid == 0 && z & !valid == 0, "mask exceeds string length");
        LocalPauli { n, x, z, negative }
    }

    /// Parse strings such as `"+XZI"`, `"-YY"` or `"ZX"`.
    pub fn parse(s: &str) -> Option<Self> {
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let n = body.chars().count();
        if n > 32 {
            return None;
        }
        let mut p = LocalPauli::identity(n);
        p.negative = negative;
        for (i, c) in body.chars().enumerate() {
            p.set(i, Pauli::from_char(c)?);
        }
        Some(p)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn x_mask(&self) -> u32 {
        self.x
    }

    pub fn z_mask(&self) -> u32 {
        self.z
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn support(&self) -> u32 {
        self.x | self.z
    }

    fn bit(&self, i: usize) -> u32 {
        1 << (self.n - 1 - i)
    }

    pub fn get(&self, i: usize) -> Pauli {
        let b = self.bit(i);
        Pauli::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn set(&mut self, i: usize, p: Pauli) {
        let b = self.bit(i);
        let (x, z) = p.bits();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
    }

    pub fn commutes_with(&self, other: &LocalPauli) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Product `self · other`. Returns `None` if the operands anticommute,
    /// since the product is then not Hermitian.
    pub fn mul(&self, other: &LocalPauli) -> Option<LocalPauli> {
        assert_eq!(self.n, other.n, "length mismatch");
        let e = 2 * (self.negative as i32 + other.negative as i32)
            + product_phase(self.x as u64, self.z as u64, other.x as u64, other.z as u64);
        match e.rem_euclid(4) {
            0 => Some(LocalPauli { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z, negative: false }),
            2 => Some(LocalPauli { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z, negative: true }),
            _ => None,
        }
    }

    /// Number of Y factors.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }
}

impl fmt::Display for LocalPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for i in 0..self.n {
            write!(f, "{}", self.get(i).as_char())?;
        }
        Ok(())
    }
}

/// Signed Pauli string on any number of qubits, qubit `q` at bit `q % 64` of
/// word `q / 64`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    pub(crate) x: Vec<u64>,
    pub(crate) z: Vec<u64>,
    pub(crate) negative: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let words = n.div_ceil(64);
        PauliString { n, x: vec![0; words], z: vec![0; words], negative: false }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn get(&self, q: usize) -> Pauli {
        let (w, b) = (q / 64, 1u64 << (q % 64));
        Pauli::from_bits(self.x[w] & b != 0, self.z[w] & b != 0)
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (w, b) = (q / 64, 1u64 << (q % 64));
        let (x, z) = p.bits();
        if x {
            self.x[w] |= b
        } else {
            self.x[w] &= !b
        }
        if z {
            self.z[w] |= b
        } else {
            self.z[w] &= !b
        }
    }

    pub fn set_negative(&mut self, negative: bool) {
        self.negative = negative;
    }

    /// Replace `self` by `other · self`; both must commute.
    pub(crate) fn left_multiply(&mut self, other: &PauliString) {
        let mut e = 2 * (self.negative as i32 + other.negative as i32);
        for w in 0..self.x.len() {
            e += product_phase(other.x[w], other.z[w], self.x[w], self.z[w]);
            self.x[w] ^= other.x[w];
            self.z[w] ^= other.z[w];
        }
        debug_assert!(e.rem_euclid(2) == 0, "multiplied anticommuting Paulis");
        self.negative = e.rem_euclid(4) == 2;
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let mut parity = 0;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]).count_ones() ^ (self.z[w] & other.x[w]).count_ones()) & 1;
        }
        parity == 0
    }

    /// Restriction to `qubits`, or `None` if the support leaves that set.
    pub fn restrict(&self, qubits: &[usize]) -> Option<LocalPauli> {
        let mut local = LocalPauli::identity(qubits.len());
        local.negative = self.negative;
        let mut weight = 0;
        for (i, &q) in qubits.iter().enumerate() {
            let p = self.get(q);
            if p != Pauli::I {
                weight += 1;
            }
            local.set(i, p);
        }
        let total: u32 = self.x.iter().zip(&self.z).map(|(x, z)| (x | z).count_ones()).sum();
        (total == weight).then_some(local)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::with_capacity(self.n + 1);
        s.push(if self.negative { '-' } else { '+' });
        for q in 0..self.n {
            s.push(self.get(q).as_char());
        }
        f.write_str(&s)
    }
}
