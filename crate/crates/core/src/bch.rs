//! Extended BCH codes grafted onto length-16 segments.
//!
//! Both codes live in GF(2^4) with primitive polynomial `x^4 + x + 1`.
//! Codewords are 15-bit vectors where bit `p` is the coefficient of `x^p`;
//! encoding is systematic with the message in the high-order positions
//! (`15 - k ..= 14`) and parity in the low-order ones.
//!
//! * [`BchVariant::T2`]: (15,7) double-error-correcting code with generator
//!   `x^8 + x^7 + x^6 + x^4 + 1`, extended by an overall parity bit at
//!   position 15.
//! * [`BchVariant::T1`]: (15,11) Hamming code with generator `x^4 + x + 1`,
//!   extended by repeating code bit [`T1_REPEATED_POSITION`] at position 15.

use serde::{Deserialize, Serialize};

use crate::decoder::arith::Arithmetic;
use crate::error::{Error, Result};
use crate::pattern::PatternTag;

/// Length of the base (non-extended) BCH code.
pub const BASE_LEN: usize = 15;
/// Length after extension.
pub const EXTENDED_LEN: usize = 16;
/// Base-code position duplicated into position 15 by the T1 extension.
pub const T1_REPEATED_POSITION: usize = 14;

const PRIMITIVE_POLY: u16 = 0b1_0011;
const G1: u16 = 0b1_0011;
const G2: u16 = 0b1_1101_0001;
const BASE_MASK: u16 = (1 << BASE_LEN) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BchVariant {
    /// Extended (15,7), t = 2, plus overall parity.
    T2,
    /// (15,11), t = 1, plus one repeated code bit.
    T1,
}

impl BchVariant {
    pub fn from_tag(tag: PatternTag) -> Option<Self> {
        match tag {
            PatternTag::BchT2 => Some(BchVariant::T2),
            PatternTag::BchT1 => Some(BchVariant::T1),
            _ => None,
        }
    }

    pub fn tag(self) -> PatternTag {
        match self {
            BchVariant::T2 => PatternTag::BchT2,
            BchVariant::T1 => PatternTag::BchT1,
        }
    }

    /// Message length.
    pub fn k(self) -> usize {
        match self {
            BchVariant::T2 => 7,
            BchVariant::T1 => 11,
        }
    }

    /// Error-correcting capability of the base code.
    pub fn t(self) -> usize {
        match self {
            BchVariant::T2 => 2,
            BchVariant::T1 => 1,
        }
    }

    fn generator(self) -> u16 {
        match self {
            BchVariant::T2 => G2,
            BchVariant::T1 => G1,
        }
    }

    fn parity_len(self) -> usize {
        BASE_LEN - self.k()
    }
}

const fn build_tables() -> ([u8; 30], [u8; 16]) {
    let mut exp = [0u8; 30];
    let mut log = [0u8; 16];
    let mut x: u16 = 1;
    let mut i = 0;
    while i < 15 {
        exp[i] = x as u8;
        exp[i + 15] = x as u8;
        log[x as usize] = i as u8;
        x <<= 1;
        if x & 0x10 != 0 {
            x ^= PRIMITIVE_POLY;
        }
        i += 1;
    }
    (exp, log)
}

const TABLES: ([u8; 30], [u8; 16]) = build_tables();

/// Element of GF(16) in polynomial basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Gf16(pub u8);

impl Gf16 {
    pub const ZERO: Gf16 = Gf16(0);
    pub const ONE: Gf16 = Gf16(1);

    /// `alpha^e` for the primitive element alpha.
    pub fn alpha_pow(e: i32) -> Gf16 {
        Gf16(TABLES.0[e.rem_euclid(15) as usize])
    }

    /// Discrete log; `None` for zero.
    pub fn log(self) -> Option<u8> {
        (self.0 != 0).then(|| TABLES.1[self.0 as usize])
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn inv(self) -> Gf16 {
        let l = self.log().expect("inverse of zero in GF(16)");
        Gf16::alpha_pow(-(l as i32))
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Add for Gf16 {
    type Output = Gf16;
    fn add(self, rhs: Gf16) -> Gf16 {
        Gf16(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Mul for Gf16 {
    type Output = Gf16;
    fn mul(self, rhs: Gf16) -> Gf16 {
        match (self.log(), rhs.log()) {
            (Some(a), Some(b)) => Gf16(TABLES.0[(a + b) as usize]),
            _ => Gf16::ZERO,
        }
    }
}

fn poly_mod(mut value: u32, generator: u16) -> u16 {
    let gdeg = 15 - generator.leading_zeros() as i32;
    for bit in (gdeg..32).rev() {
        if value & (1 << bit) != 0 {
            value ^= (generator as u32) << (bit - gdeg);
        }
    }
    value as u16
}

fn bits_to_word(bits: &[u8]) -> u16 {
    bits.iter()
        .enumerate()
        .fold(0u16, |w, (i, &b)| w | (((b & 1) as u16) << i))
}

fn word_to_bits<const L: usize>(word: u16) -> [u8; L] {
    std::array::from_fn(|i| ((word >> i) & 1) as u8)
}

/// Systematic 15-bit base codeword as a bit mask.
fn encode_base_word(message: u16, variant: BchVariant) -> u16 {
    let shifted = (message as u32) << variant.parity_len();
    (shifted as u16) | poly_mod(shifted, variant.generator())
}

fn extend(base: u16, variant: BchVariant) -> u16 {
    let top = match variant {
        BchVariant::T2 => (base.count_ones() & 1) as u16,
        BchVariant::T1 => (base >> T1_REPEATED_POSITION) & 1,
    };
    base | (top << BASE_LEN)
}

/// Encodes a `k`-bit message into a 16-bit extended codeword.
pub fn bch_encode(message: &[u8], variant: BchVariant) -> Result<[u8; EXTENDED_LEN]> {
    if message.len() != variant.k() {
        return Err(Error::LengthMismatch {
            expected: variant.k(),
            actual: message.len(),
        });
    }
    let base = encode_base_word(bits_to_word(message), variant);
    Ok(word_to_bits(extend(base, variant)))
}

/// Message bits carried by an extended codeword (its systematic part).
pub fn bch_message(codeword: &[u8], variant: BchVariant) -> Vec<u8> {
    codeword[variant.parity_len()..BASE_LEN].to_vec()
}

fn syndromes(word: u16, count: usize) -> [Gf16; 4] {
    let mut s = [Gf16::ZERO; 4];
    for (j, sj) in s.iter_mut().enumerate().take(count) {
        let mut acc = Gf16::ZERO;
        for p in 0..BASE_LEN {
            if word & (1 << p) != 0 {
                acc = acc + Gf16::alpha_pow(((j + 1) * p) as i32);
            }
        }
        *sj = acc;
    }
    s
}

/// Berlekamp–Massey over the first `2t` syndromes; returns the error locator
/// coefficients (constant term first) and its degree.
fn berlekamp_massey(s: &[Gf16]) -> ([Gf16; 5], usize) {
    let mut c = [Gf16::ZERO; 5];
    let mut b = [Gf16::ZERO; 5];
    c[0] = Gf16::ONE;
    b[0] = Gf16::ONE;
    let mut l = 0usize;
    let mut m = 1usize;
    let mut last_disc = Gf16::ONE;
    for r in 0..s.len() {
        let mut d = s[r];
        for i in 1..=l {
            d = d + c[i] * s[r - i];
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = d * last_disc.inv();
        let prev = c;
        for i in 0..5 - m {
            c[i + m] = c[i + m] + coef * b[i];
        }
        if 2 * l <= r {
            l = r + 1 - l;
            b = prev;
            last_disc = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    (c, l)
}

fn decode_base_word(word: u16, variant: BchVariant) -> Option<u16> {
    let t = variant.t();
    let s = syndromes(word, 2 * t);
    if s[..2 * t].iter().all(|x| x.is_zero()) {
        return Some(word);
    }
    if t == 1 {
        // Hamming code: the syndrome is the error locator itself.
        let pos = s[0].log().expect("nonzero syndrome");
        return Some(word ^ (1 << pos));
    }
    let (locator, degree) = berlekamp_massey(&s[..2 * t]);
    if degree == 0 || degree > t {
        return None;
    }
    // Chien search: position p is in error when Lambda(alpha^-p) = 0.
    let mut corrected = word;
    let mut roots = 0;
    for p in 0..BASE_LEN {
        let x = Gf16::alpha_pow(-(p as i32));
        let mut acc = Gf16::ZERO;
        let mut xp = Gf16::ONE;
        for coef in locator.iter().take(degree + 1) {
            acc = acc + *coef * xp;
            xp = xp * x;
        }
        if acc.is_zero() {
            corrected ^= 1 << p;
            roots += 1;
        }
    }
    (roots == degree).then_some(corrected)
}

/// Hard-decision bounded-distance decoding of a 15-bit base word.
///
/// Corrects up to `t` errors; returns `None` when the error locator has no
/// valid set of roots.
pub fn bch_decode_hard(word: &[u8], variant: BchVariant) -> Result<Option<[u8; BASE_LEN]>> {
    if word.len() != BASE_LEN {
        return Err(Error::LengthMismatch {
            expected: BASE_LEN,
            actual: word.len(),
        });
    }
    Ok(decode_base_word(bits_to_word(word), variant).map(word_to_bits))
}

/// Decodes a BCH node from 16 soft inputs and returns the 16-bit codeword
/// estimate (or the hard-decision word when the algebraic step fails).
///
/// T2 runs a parity step first: when the 16 hard decisions fail the overall
/// parity, the least reliable position is flipped before the algebraic
/// decoder sees the first 15 bits. T1 merges the two copies of the repeated
/// bit into one soft value before deciding.
pub fn bch_node_decode<A: Arithmetic>(arith: &A, alpha: &[A::Llr], variant: BchVariant) -> [u8; EXTENDED_LEN] {
    assert_eq!(alpha.len(), EXTENDED_LEN);
    let word = match variant {
        BchVariant::T2 => {
            let mut hard = 0u16;
            for (i, &a) in alpha.iter().enumerate() {
                hard |= (arith.hard(a) as u16) << i;
            }
            if hard.count_ones() & 1 == 1 {
                hard ^= 1 << arith.argmin_magnitude(alpha);
            }
            match decode_base_word(hard & BASE_MASK, variant) {
                Some(base) => extend(base, variant),
                None => hard,
            }
        }
        BchVariant::T1 => {
            let mut hard = 0u16;
            for (i, &a) in alpha.iter().enumerate().take(BASE_LEN) {
                let v = if i == T1_REPEATED_POSITION {
                    arith.sum(&[a, alpha[BASE_LEN]])
                } else {
                    a
                };
                hard |= (arith.hard(v) as u16) << i;
            }
            let base = decode_base_word(hard, variant).unwrap_or(hard);
            extend(base, variant)
        }
    };
    word_to_bits(word)
}

/// All extended codewords of a variant, indexed by message value.
pub fn codebook(variant: BchVariant) -> Vec<[u8; EXTENDED_LEN]> {
    (0..1u16 << variant.k())
        .map(|m| word_to_bits(extend(encode_base_word(m, variant), variant)))
        .collect()
}
