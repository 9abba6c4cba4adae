use super::{encode, ConvCodeSpec};
use crate::channel::EnvelopeSequence;
use crate::error::{invalid, Error, Result};
use crate::likelihood::{metric_table, MetricTable, MetricVariant};
use crate::Bit;

/// Largest message length the exhaustive decoder accepts (2^16 codewords).
pub const BRUTE_FORCE_MAX_BITS: usize = 16;

/// Exhaustive maximum-likelihood decoding: scores every one of the
/// `2^message_length` codewords with the exact envelope log-likelihood and
/// returns the best message.
///
/// Exists as an oracle for [`viterbi_decode`](super::viterbi_decode), so it
/// accumulates metrics with the same grouping (per trellis step, then along
/// the path) and breaks ties the same way: among equal metrics the message
/// with a 0 at the latest differing position wins.
pub fn brute_force_ml_decode(etas: &EnvelopeSequence, code: &ConvCodeSpec, message_length: usize) -> Result<Vec<Bit>> {
    let table = metric_table(etas, MetricVariant::Exact);
    brute_force_ml_decode_table(&table, code, message_length)
}

/// As [`brute_force_ml_decode`], over an arbitrary precomputed metric table.
pub fn brute_force_ml_decode_table(
    table: &MetricTable,
    code: &ConvCodeSpec,
    message_length: usize,
) -> Result<Vec<Bit>> {
    if message_length > BRUTE_FORCE_MAX_BITS {
        return Err(Error::TooLarge(message_length));
    }
    if message_length == 0 {
        return Err(invalid("message length must be positive"));
    }
    let expected = code.codeword_len(message_length);
    if table.len() != expected {
        return Err(invalid(format!(
            "{} received symbols, a {message_length}-bit message needs {expected}",
            table.len()
        )));
    }
    let n = code.n_outputs();
    let rows = table.rows();

    // Enumerating in increasing order, with bit i of the index as message
    // position i, visits tie-preferred messages first; strict `>` keeps them.
    let mut best: Option<(f64, u32)> = None;
    for index in 0..(1u32 << message_length) {
        let message: Vec<Bit> = (0..message_length).map(|i| ((index >> i) & 1) as Bit).collect();
        let codeword = encode(&message, code)?;
        let mut metric = 0.0;
        for (step_bits, step_rows) in codeword.chunks_exact(n).zip(rows.chunks_exact(n)) {
            let mut branch = 0.0;
            for (&b, row) in step_bits.iter().zip(step_rows) {
                branch += row[b as usize];
            }
            metric += branch;
        }
        if best.is_none_or(|(m, _)| metric > m) {
            best = Some((metric, index));
        }
    }
    let (_, index) = best.expect("at least one message");
    Ok((0..message_length).map(|i| ((index >> i) & 1) as Bit).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;

    #[test]
    fn noiseless_input_recovers_message() {
        let code = ConvCodeSpec::k7_rate_half();
        let params = ChannelParams::from_es_sigma2(1.0, 0.2).unwrap();
        let message = vec![1, 0, 1, 1, 0, 0, 1, 0, 1, 1];
        let cw = encode(&message, &code).unwrap();
        let etas = EnvelopeSequence::new(cw.iter().map(|&b| b as f64).collect(), params).unwrap();
        assert_eq!(brute_force_ml_decode(&etas, &code, 10).unwrap(), message);
    }

    #[test]
    fn refuses_long_messages() {
        let code = ConvCodeSpec::from_octal("5,7", 3).unwrap();
        let table = MetricTable::from_rows(vec![[0.0, 0.0]; code.codeword_len(17)], MetricVariant::Exact);
        assert_eq!(brute_force_ml_decode_table(&table, &code, 17), Err(Error::TooLarge(17)));
        assert!(brute_force_ml_decode_table(&table, &code, 3).is_err());
    }

    #[test]
    fn exact_ties_prefer_zero_at_latest_difference() {
        let code = ConvCodeSpec::from_octal("5,7", 3).unwrap();
        let trellis = super::super::Trellis::new(&code);
        let flat = MetricTable::from_rows(vec![[0.0, 0.0]; code.codeword_len(4)], MetricVariant::Exact);
        assert_eq!(brute_force_ml_decode_table(&flat, &code, 4).unwrap(), vec![0; 4]);
        assert_eq!(super::super::viterbi_decode(&flat, &trellis).unwrap(), vec![0; 4]);

        // Reward the symbols of the [1,0,0] and [0,0,1] codewords so that both
        // score 7 while their sum [1,0,1] scores 6 and anything else is
        // penalised. The tie goes to [1,0,0], which has the 0 in position 2.
        let a = encode(&[1, 0, 0], &code).unwrap();
        let b = encode(&[0, 0, 1], &code).unwrap();
        let rows = a
            .iter()
            .zip(&b)
            .map(|(&x, &y)| match (x, y) {
                (1, 1) => [0.0, 2.0],
                (0, 0) => [0.0, -10.0],
                _ => [0.0, 1.0],
            })
            .collect();
        let table = MetricTable::from_rows(rows, MetricVariant::Exact);
        let expected = vec![1, 0, 0];
        assert_eq!(brute_force_ml_decode_table(&table, &code, 3).unwrap(), expected);
        assert_eq!(super::super::viterbi_decode(&table, &trellis).unwrap(), expected);
    }
}
