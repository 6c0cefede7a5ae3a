//! Exact worst-case optimum of the liar game at toy sizes, over arbitrary subset questions.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::numerics::binom_leq;

pub const MAX_ORACLE_N: usize = 6;
pub const MAX_ORACLE_K: u32 = 2;

/// Elements are interchangeable under subset questions, so a state is the number of
/// still-possible elements at each lie count `0..=k`.
type Levels = Vec<u8>;

struct Minimax {
    k: usize,
    memo: HashMap<Levels, u32>,
}

impl Minimax {
    fn solve(&mut self, state: &Levels) -> u32 {
        if state.iter().map(|&c| c as u32).sum::<u32>() <= 1 {
            return 0;
        }
        if let Some(&v) = self.memo.get(state) {
            return v;
        }
        let mut best = u32::MAX;
        let mut pick = vec![0u8; state.len()];
        loop {
            // next split: pick[j] of the level-j elements go into the question set
            let mut j = 0;
            while j < pick.len() && pick[j] == state[j] {
                pick[j] = 0;
                j += 1;
            }
            if j == pick.len() {
                break;
            }
            pick[j] += 1;
            if pick == *state {
                continue;
            }
            let inside: Levels = pick.clone();
            let outside: Levels = state.iter().zip(&pick).map(|(s, p)| s - p).collect();
            let yes = self.solve(&self.shift(&inside, &outside));
            if yes + 1 >= best {
                continue;
            }
            let no = self.solve(&self.shift(&outside, &inside));
            best = best.min(1 + yes.max(no));
        }
        self.memo.insert(state.clone(), best);
        best
    }

    // answer consistent with `keep`; `penalised` elements spend one more lie
    fn shift(&self, keep: &Levels, penalised: &Levels) -> Levels {
        (0..=self.k).map(|j| keep[j] + if j > 0 { penalised[j - 1] } else { 0 }).collect()
    }
}

/// Minimum number of arbitrary yes/no membership questions that identifies one of `n`
/// elements against any adversary telling at most `k` lies.
pub fn optimal_worst_case(n: usize, k: u32) -> Result<u32> {
    if n == 0 {
        return Err(Error::Domain("need at least one element".into()));
    }
    if n > MAX_ORACLE_N || k > MAX_ORACLE_K {
        return Err(Error::Guard(format!(
            "oracle limited to n <= {MAX_ORACLE_N} and k <= {MAX_ORACLE_K}, got n = {n}, k = {k}"
        )));
    }
    let mut start = vec![0u8; k as usize + 1];
    start[0] = n as u8;
    Ok(Minimax { k: k as usize, memo: HashMap::new() }.solve(&start))
}

/// Volume bound: `q` answers can only separate `n` elements with `k` lies if `2^q >= n * sum_{j<=k} C(q, j)`.
pub fn packing_feasible(n: usize, k: u32, q: u32) -> bool {
    (BigInt::from(1) << q as usize) >= BigInt::from(n) * binom_leq(q as u64, k as u64)
}

/// Smallest `q` passing [`packing_feasible`].
pub fn packing_threshold(n: usize, k: u32) -> u32 {
    (0..).find(|&q| packing_feasible(n, k, q)).unwrap()
}
