use std::ops::Add;

/// Accumulated path metric: larger is better.
trait PathMetric: Copy + Add<Output = Self> {
    /// The survivor of `(even, odd)` and whether the odd one won; ties keep
    /// the even predecessor.
    fn pick(even: Self, odd: Self) -> (Self, u64);
}

impl PathMetric for f64 {
    #[inline(always)]
    fn pick(even: f64, odd: f64) -> (f64, u64) {
        (even.max(odd), (odd > even) as u64)
    }
}

impl PathMetric for i64 {
    #[inline(always)]
    fn pick(even: i64, odd: i64) -> (i64, u64) {
        (even.max(odd), (odd > even) as u64)
    }
}

use super::Trellis;
use crate::error::{invalid, Result};
use crate::likelihood::MetricTable;
use crate::Bit;

/// Maximum-likelihood sequence decoding over a terminated trellis.
///
/// The path metric is the sum of the table's per-symbol scores along the
/// path and the path with the *largest* metric wins. Paths start and end in
/// state 0 and the returned message has the `K - 1` tail bits removed.
///
/// Ties between the two paths entering a state go to the predecessor whose
/// oldest register bit is 0. Both entering branches carry the same input, so
/// this amounts to preferring the path with a 0 at the most recent position
/// where the two differ.
pub fn viterbi_decode(metrics: &MetricTable, trellis: &Trellis) -> Result<Vec<Bit>> {
    let n = trellis.n_outputs();
    let steps = check_length(metrics.len(), trellis)?;
    let rows = metrics.rows();
    search(trellis, steps, f64::NEG_INFINITY, 0.0, |t, bm| {
        let step_rows = &rows[t * n..(t + 1) * n];
        for (label, slot) in bm.iter_mut().enumerate() {
            let mut m = 0.0;
            for (j, row) in step_rows.iter().enumerate() {
                m += row[(label >> j) & 1];
            }
            *slot = m;
        }
    })
}

/// Hard-decision Viterbi decoding: minimises the Hamming distance between
/// the received bits and the codeword (maximises its negative).
pub fn hard_viterbi_decode(received_bits: &[Bit], trellis: &Trellis) -> Result<Vec<Bit>> {
    let n = trellis.n_outputs();
    let steps = check_length(received_bits.len(), trellis)?;
    if let Some(b) = received_bits.iter().find(|&&b| b > 1) {
        return Err(invalid(format!("received non-binary value {b}")));
    }
    search(trellis, steps, i64::MIN / 2, 0i64, |t, bm| {
        let received = received_bits[t * n..(t + 1) * n]
            .iter()
            .enumerate()
            .fold(0u32, |acc, (j, &b)| acc | ((b as u32) << j));
        for (label, slot) in bm.iter_mut().enumerate() {
            *slot = -i64::from((label as u32 ^ received).count_ones());
        }
    })
}

fn check_length(symbols: usize, trellis: &Trellis) -> Result<usize> {
    let n = trellis.n_outputs();
    let tail = trellis.constraint_length() - 1;
    if !symbols.is_multiple_of(n) {
        return Err(invalid(format!("{symbols} symbols is not a multiple of n = {n}")));
    }
    let steps = symbols / n;
    if steps <= tail {
        return Err(invalid(format!(
            "{steps} trellis steps cannot hold a message plus {tail} tail bits"
        )));
    }
    Ok(steps)
}

/// Branch labels of one butterfly: predecessors `2j` and `2j + 1` feed
/// state `j` (input 0) and state `j + N/2` (input 1).
struct Butterfly {
    to_low: [usize; 2],
    to_high: [usize; 2],
}

fn search<M, F>(trellis: &Trellis, steps: usize, neg_inf: M, zero: M, mut branch: F) -> Result<Vec<Bit>>
where
    M: PathMetric,
    F: FnMut(usize, &mut [M]),
{
    let num_states = trellis.num_states();
    let half = num_states / 2;
    let flies: Vec<Butterfly> = (0..half)
        .map(|j| {
            let label = |p: usize, u: Bit| trellis.transition(p, u).label as usize;
            debug_assert_eq!(trellis.predecessors(j), [2 * j, 2 * j + 1]);
            debug_assert_eq!(trellis.predecessors(j + half), [2 * j, 2 * j + 1]);
            Butterfly {
                to_low: [label(2 * j, 0), label(2 * j + 1, 0)],
                to_high: [label(2 * j, 1), label(2 * j + 1, 1)],
            }
        })
        .collect();

    let words = num_states.div_ceil(64);
    let mut decisions = vec![0u64; steps * words];
    let mut bm = vec![zero; 1 << trellis.n_outputs()];
    let mut pm = vec![neg_inf; num_states];
    let mut next = vec![neg_inf; num_states];
    pm[0] = zero;

    for t in 0..steps {
        branch(t, &mut bm);
        let row = &mut decisions[t * words..(t + 1) * words];
        let (low, high) = next.split_at_mut(half);
        for (c, (((flies, pm), low), high)) in flies
            .chunks(64)
            .zip(pm.chunks(128))
            .zip(low.chunks_mut(64))
            .zip(high.chunks_mut(64))
            .enumerate()
        {
            let (mut low_bits, mut high_bits) = (0u64, 0u64);
            for (i, (((fly, pair), lo), hi)) in flies
                .iter()
                .zip(pm.chunks_exact(2))
                .zip(low.iter_mut())
                .zip(high.iter_mut())
                .enumerate()
            {
                let (m, d) = M::pick(pair[0] + bm[fly.to_low[0]], pair[1] + bm[fly.to_low[1]]);
                *lo = m;
                low_bits |= d << i;
                let (m, d) = M::pick(pair[0] + bm[fly.to_high[0]], pair[1] + bm[fly.to_high[1]]);
                *hi = m;
                high_bits |= d << i;
            }
            if half >= 64 {
                row[c] = low_bits;
                row[half / 64 + c] = high_bits;
            } else {
                row[0] = low_bits | (high_bits << half);
            }
        }
        std::mem::swap(&mut pm, &mut next);
    }

    let mut bits = vec![0; steps];
    let mut state = 0;
    for t in (0..steps).rev() {
        bits[t] = trellis.input_into(state);
        let choice = (decisions[t * words + state / 64] >> (state % 64)) & 1;
        state = 2 * (state % half) + choice as usize;
    }
    debug_assert_eq!(state, 0);
    bits.truncate(steps - (trellis.constraint_length() - 1));
    Ok(bits)
}
