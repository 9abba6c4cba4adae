use serde::{Deserialize, Serialize};

use super::ConvCodeSpec;
use crate::error::{Error, Result};

/// Number of error events and their total information weight at one
/// output weight `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumLine {
    pub d: usize,
    /// Paths of weight `d` that leave and first re-enter state 0.
    pub a_d: u128,
    /// Information bits summed over those paths.
    pub b_d: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceSpectrum {
    pub d_free: usize,
    pub b_dfree: u128,
    /// Populated weights from `d_free` up to the search cap, ascending.
    pub table: Vec<SpectrumLine>,
}

impl DistanceSpectrum {
    pub fn line(&self, d: usize) -> Option<&SpectrumLine> {
        self.table.iter().find(|l| l.d == d)
    }
}

/// Enumerates first-event error paths by depth, keeping for every
/// `(state, accumulated weight)` pair the number of partial paths and their
/// summed information weight. Partial paths heavier than `d_max` are dropped,
/// and the zero-state self loop is never taken, so for a non-catastrophic
/// code the frontier empties after finitely many steps.
pub fn distance_spectrum(code: &ConvCodeSpec, d_max: usize) -> Result<DistanceSpectrum> {
    let num_states = code.num_states();
    let width = d_max + 1;
    let idx = |state: usize, w: usize| state * width + w;

    let mut a = vec![0u128; width];
    let mut b = vec![0u128; width];
    let mut count = vec![0u128; num_states * width];
    let mut info = vec![0u128; num_states * width];
    let mut next_count = count.clone();
    let mut next_info = info.clone();

    let (first, label) = code.step(0, 1);
    let w0 = label.count_ones() as usize;
    if w0 > d_max {
        return Err(Error::CapTooSmall { d_max });
    }
    count[idx(first, w0)] = 1;
    info[idx(first, w0)] = 1;

    // Without zero-weight cycles every `num_states` steps add weight >= 1.
    let max_depth = (d_max + 1) * num_states + code.constraint_length();
    let mut depth = 0;
    loop {
        let mut alive = false;
        next_count.fill(0);
        next_info.fill(0);
        for state in 1..num_states {
            for w in 0..width {
                let c = count[idx(state, w)];
                if c == 0 {
                    continue;
                }
                let i = info[idx(state, w)];
                for input in [0u8, 1] {
                    let (to, label) = code.step(state, input);
                    let nw = w + label.count_ones() as usize;
                    if nw > d_max {
                        continue;
                    }
                    let ni = i + c * input as u128;
                    if to == 0 {
                        a[nw] += c;
                        b[nw] += ni;
                    } else {
                        next_count[idx(to, nw)] += c;
                        next_info[idx(to, nw)] += ni;
                        alive = true;
                    }
                }
            }
        }
        std::mem::swap(&mut count, &mut next_count);
        std::mem::swap(&mut info, &mut next_info);
        if !alive {
            break;
        }
        depth += 1;
        if depth > max_depth {
            return Err(Error::InvalidCode(format!(
                "{code} has a zero-weight cycle (catastrophic)"
            )));
        }
    }

    let table: Vec<SpectrumLine> = (0..width)
        .filter(|&d| a[d] > 0)
        .map(|d| SpectrumLine {
            d,
            a_d: a[d],
            b_d: b[d],
        })
        .collect();
    let first = table.first().ok_or(Error::CapTooSmall { d_max })?;
    Ok(DistanceSpectrum {
        d_free: first.d,
        b_dfree: first.b_d,
        table,
    })
}
