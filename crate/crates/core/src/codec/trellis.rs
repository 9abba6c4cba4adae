use super::ConvCodeSpec;
use crate::Bit;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub next_state: usize,
    /// Output bits packed LSB first, generator `j` in bit `j`.
    pub label: u32,
}

impl Transition {
    pub fn output_bits(&self, n: usize) -> impl Iterator<Item = Bit> + '_ {
        (0..n).map(move |j| ((self.label >> j) & 1) as Bit)
    }
}

/// Fully expanded state-transition table of a code.
///
/// Every state has exactly two successors (inputs 0 and 1) and exactly two
/// predecessors. Both predecessors of a state differ only in the oldest
/// register bit and carry the same input bit.
#[derive(Debug, Clone)]
pub struct Trellis {
    n_outputs: usize,
    constraint_length: usize,
    forward: Vec<[Transition; 2]>,
    /// `backward[s][i]` is the predecessor of `s` whose oldest bit is `i`.
    backward: Vec<[usize; 2]>,
}

impl Trellis {
    pub fn new(code: &ConvCodeSpec) -> Self {
        let num_states = code.num_states();
        let forward: Vec<[Transition; 2]> = (0..num_states)
            .map(|s| {
                [0, 1].map(|u| {
                    let (next_state, label) = code.step(s, u);
                    Transition { next_state, label }
                })
            })
            .collect();
        let mut backward = vec![[usize::MAX; 2]; num_states];
        for (s, edges) in forward.iter().enumerate() {
            for edge in edges {
                backward[edge.next_state][s & 1] = s;
            }
        }
        debug_assert!(backward.iter().flatten().all(|&p| p != usize::MAX));
        Self {
            n_outputs: code.n_outputs(),
            constraint_length: code.constraint_length(),
            forward,
            backward,
        }
    }

    pub fn num_states(&self) -> usize {
        self.forward.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn constraint_length(&self) -> usize {
        self.constraint_length
    }

    pub fn num_transitions(&self) -> usize {
        2 * self.forward.len()
    }

    #[inline]
    pub fn transition(&self, state: usize, input: Bit) -> Transition {
        self.forward[state][input as usize]
    }

    /// The two predecessors of `state`, lower index first.
    #[inline]
    pub fn predecessors(&self, state: usize) -> [usize; 2] {
        self.backward[state]
    }

    /// The input bit on every branch entering `state`.
    #[inline]
    pub fn input_into(&self, state: usize) -> Bit {
        (state >> (self.constraint_length - 2)) as Bit & 1
    }

    /// Walks the trellis from state 0 with `message` plus the zero tail and
    /// returns the emitted coded bits.
    pub fn walk(&self, message: &[Bit]) -> Vec<Bit> {
        let tail = self.constraint_length - 1;
        let mut state = 0;
        let mut out = Vec::with_capacity((message.len() + tail) * self.n_outputs);
        for &bit in message.iter().chain(std::iter::repeat_n(&0, tail)) {
            let t = self.transition(state, bit);
            out.extend(t.output_bits(self.n_outputs));
            state = t.next_state;
        }
        out
    }
}
