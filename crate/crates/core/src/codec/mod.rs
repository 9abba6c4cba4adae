//! Rate 1/n feed-forward convolutional codes.
//!
//! Generators are written in octal with the most significant of the `K` tap
//! bits applied to the current input bit, so `133` octal (`1011011`) taps the
//! current input and the inputs 2, 3, 5 and 6 steps back. The encoder state
//! holds the previous `K - 1` inputs, most recent input in the highest bit.

mod brute;
mod spectrum;
mod trellis;
mod viterbi;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::Bit;

pub use brute::{brute_force_ml_decode, brute_force_ml_decode_table, BRUTE_FORCE_MAX_BITS};
pub use spectrum::{distance_spectrum, DistanceSpectrum, SpectrumLine};
pub use trellis::{Transition, Trellis};
pub use viterbi::{hard_viterbi_decode, viterbi_decode};

/// Largest supported constraint length (32768 trellis states).
pub const MAX_CONSTRAINT_LENGTH: usize = 16;

/// A rate `1/n` convolutional code with a single input stream.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCode", into = "RawCode")]
pub struct ConvCodeSpec {
    generators: Vec<u32>,
    constraint_length: usize,
}

impl ConvCodeSpec {
    pub fn new(generators: Vec<u32>, constraint_length: usize) -> Result<Self> {
        if !(2..=MAX_CONSTRAINT_LENGTH).contains(&constraint_length) {
            return Err(Error::InvalidCode(format!(
                "constraint length {constraint_length} outside 2..={MAX_CONSTRAINT_LENGTH}"
            )));
        }
        if generators.len() < 2 {
            return Err(Error::InvalidCode(format!(
                "need at least 2 generators, got {}",
                generators.len()
            )));
        }
        let limit = 1u32 << constraint_length;
        for &g in &generators {
            if g == 0 || g >= limit {
                return Err(Error::InvalidCode(format!(
                    "generator {g:o} does not fit in K = {constraint_length} bits"
                )));
            }
        }
        let top = 1u32 << (constraint_length - 1);
        if !generators.iter().any(|&g| g & 1 == 1 && g & top != 0) {
            return Err(Error::InvalidCode(
                "no generator has both its first and last tap set".into(),
            ));
        }
        Ok(Self {
            generators,
            constraint_length,
        })
    }

    /// Parses a comma-separated list of octal generators, e.g. `"133,171"`.
    pub fn from_octal(generators: &str, constraint_length: usize) -> Result<Self> {
        let parsed = generators
            .split(',')
            .map(|g| {
                let g = g.trim();
                u32::from_str_radix(g, 8).map_err(|_| Error::InvalidCode(format!("'{g}' is not an octal generator")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parsed, constraint_length)
    }

    /// The standard K = 7, rate 1/2 code (133, 171).
    pub fn k7_rate_half() -> Self {
        Self::new(vec![0o133, 0o171], 7).expect("standard code")
    }

    /// The standard K = 7, rate 1/3 code (133, 145, 175).
    pub fn k7_rate_third() -> Self {
        Self::new(vec![0o133, 0o145, 0o175], 7).expect("standard code")
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn constraint_length(&self) -> usize {
        self.constraint_length
    }

    pub fn n_outputs(&self) -> usize {
        self.generators.len()
    }

    /// Code rate `1/n`.
    pub fn rate(&self) -> f64 {
        1.0 / self.generators.len() as f64
    }

    pub fn num_states(&self) -> usize {
        1 << (self.constraint_length - 1)
    }

    /// Octal generator list in the same form `from_octal` accepts.
    pub fn octal(&self) -> String {
        self.generators
            .iter()
            .map(|g| format!("{g:o}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Codeword length for a terminated message of `message_len` bits.
    pub fn codeword_len(&self, message_len: usize) -> usize {
        (message_len + self.constraint_length - 1) * self.n_outputs()
    }

    /// One shift-register step: returns the next state and the output label
    /// (bit `j` of the label is the output of generator `j`).
    #[inline]
    pub(crate) fn step(&self, state: usize, input: Bit) -> (usize, u32) {
        let reg = ((input as u32) << (self.constraint_length - 1)) | state as u32;
        let mut label = 0u32;
        for (j, &g) in self.generators.iter().enumerate() {
            label |= ((reg & g).count_ones() & 1) << j;
        }
        ((reg >> 1) as usize, label)
    }
}

impl fmt::Display for ConvCodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})_8 K={}", self.octal(), self.constraint_length)
    }
}

#[derive(Serialize, Deserialize)]
struct RawCode {
    generators: String,
    constraint_length: usize,
}

impl TryFrom<RawCode> for ConvCodeSpec {
    type Error = Error;

    fn try_from(raw: RawCode) -> Result<Self> {
        Self::from_octal(&raw.generators, raw.constraint_length)
    }
}

impl From<ConvCodeSpec> for RawCode {
    fn from(code: ConvCodeSpec) -> Self {
        RawCode {
            generators: code.octal(),
            constraint_length: code.constraint_length,
        }
    }
}

/// Encodes `message` and flushes the register with `K - 1` zero tail bits.
///
/// The output holds `n` coded bits per step, generator order within a step.
pub fn encode(message: &[Bit], code: &ConvCodeSpec) -> Result<Vec<Bit>> {
    if message.is_empty() {
        return Err(invalid("cannot encode an empty message"));
    }
    if let Some(b) = message.iter().find(|&&b| b > 1) {
        return Err(invalid(format!("message contains non-binary value {b}")));
    }
    let n = code.n_outputs();
    let tail = code.constraint_length() - 1;
    let mut out = Vec::with_capacity(code.codeword_len(message.len()));
    let mut state = 0;
    for &bit in message.iter().chain(std::iter::repeat_n(&0, tail)) {
        let (next, label) = code.step(state, bit);
        out.extend((0..n).map(|j| ((label >> j) & 1) as Bit));
        state = next;
    }
    debug_assert_eq!(state, 0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code57() -> ConvCodeSpec {
        ConvCodeSpec::from_octal("5,7", 3).unwrap()
    }

    #[test]
    fn impulse_response_is_the_generators() {
        // g0 = 101, g1 = 111 read column by column, current-input tap first.
        let out = encode(&[1], &code57()).unwrap();
        assert_eq!(out, vec![1, 1, 0, 1, 1, 1]);
    }

    #[test]
    fn zero_message_gives_zero_codeword() {
        for code in [code57(), ConvCodeSpec::k7_rate_half(), ConvCodeSpec::k7_rate_third()] {
            let out = encode(&[0; 37], &code).unwrap();
            assert_eq!(out.len(), code.codeword_len(37));
            assert!(out.iter().all(|&b| b == 0));
        }
    }

    #[test]
    fn codeword_length() {
        let code = ConvCodeSpec::k7_rate_half();
        assert_eq!(encode(&[1; 100], &code).unwrap().len(), 212);
        assert_eq!(code.codeword_len(100), 212);
    }

    #[test]
    fn empty_message_rejected() {
        assert!(matches!(encode(&[], &code57()), Err(Error::InvalidInput(_))));
        assert!(matches!(encode(&[2], &code57()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn spec_validation() {
        assert!(ConvCodeSpec::from_octal("5", 3).is_err());
        assert!(ConvCodeSpec::from_octal("5,17", 3).is_err());
        assert!(ConvCodeSpec::from_octal("5,8", 3).is_err());
        assert!(ConvCodeSpec::from_octal("5,0", 3).is_err());
        // 6 = 110, 2 = 010: nobody taps both ends
        assert!(ConvCodeSpec::from_octal("6,2", 3).is_err());
        assert!(ConvCodeSpec::from_octal("133,171", 1).is_err());
        let code = ConvCodeSpec::from_octal(" 133, 171 ", 7).unwrap();
        assert_eq!(code, ConvCodeSpec::k7_rate_half());
        assert_eq!(code.octal(), "133,171");
        assert_eq!(code.num_states(), 64);
        assert!((ConvCodeSpec::k7_rate_third().rate() - 1.0 / 3.0).abs() < 1e-15);
    }
}
