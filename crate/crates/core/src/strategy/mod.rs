//! Constructive strategies for Paul and their exhaustive verification.
//!
//! A [`Policy`] emits a question for each position. Policies that need to
//! remember something about the play so far (fixed opening moves, a trimmed
//! virtual state) keep it in their `Memory`, which the verifier clones at
//! every branch point.

mod fictitious;
mod one_lie;
mod two_lie;
mod verify;

pub use fictitious::{
    allowed_endgame_states, fictitious_simulation, fictitious_step, perfect_play,
    random_admissible_state, FicRecord, FicState, FictitiousOptions, FictitiousTrace,
    LevelSummary,
};
pub use one_lie::{one_lie_full_policy, one_lie_move, OneLiePolicy};
pub use two_lie::{
    fictitious_play_move, opening_case, opening_expansion, opening_penny_target, two_lie_full_policy, two_lie_opening,
    OpeningCase, OpeningExpansion, TwoLieMemory, TwoLiePolicy, ENDGAME_ROUNDS,
};
pub use verify::{verify_policy, TreePolicy, VerificationReport, VerifyOptions, MAX_VERIFY_ROUNDS};

use crate::error::{Error, Result};
use crate::game::{binom_le, pow2, weight, GameSpec, QuestionVector, Response, StateVector};

pub trait Policy: Sync {
    type Memory: Clone + Send;

    /// Memory at the start of a game.
    fn start(&self, spec: &GameSpec) -> Result<Self::Memory>;

    fn question(
        &self,
        memory: &Self::Memory,
        state: &StateVector,
        rounds_remaining: u32,
    ) -> Result<QuestionVector>;

    /// Called after Carole answers; `next` is the resulting actual state.
    fn observe(
        &self,
        _memory: &mut Self::Memory,
        _question: &QuestionVector,
        _response: Response,
        _next: &StateVector,
        _rounds_remaining: u32,
    ) -> Result<()> {
        Ok(())
    }
}

/// Near-halving question: even coordinates split exactly, odd coordinates take
/// ceiling, floor, ceiling, ... in increasing index order. For
/// `j = rounds_remaining - 1 >= 2k - 1` the resulting imbalance lies in
/// `[0, C(j, k)]`.
pub fn floor_ceiling_question(x: &StateVector, _rounds_remaining: u32) -> QuestionVector {
    let mut ceil_next = true;
    QuestionVector::new(x.counts().iter().map(|&c| {
        if c % 2 == 0 {
            c / 2
        } else {
            let v = if ceil_next { c.div_ceil(2) } else { c / 2 };
            ceil_next = !ceil_next;
            v
        }
    }))
}

/// Removes coins heaviest first, never dropping `wt_j` below `2^j`, until the
/// weight is exactly `2^j`. Returns `(kept, removed)`. Fails when too few
/// pennies remain to absorb the last of the excess.
pub fn greedy_trim(x: &StateVector, j: u32) -> Result<(StateVector, StateVector)> {
    let target = pow2(j)?;
    let mut excess = weight(j, x)?
        .checked_sub(target)
        .ok_or_else(|| Error::Domain(format!("wt_{j}({x}) < 2^{j}, nothing to trim to")))?;
    let k = x.lies() as i64;
    let mut kept = x.counts().to_vec();
    let mut removed = vec![0u64; kept.len()];
    for (i, count) in kept.iter_mut().enumerate() {
        let coin = binom_le(j, k - i as i64)?;
        let take = (excess / coin).min(*count as u128) as u64;
        *count -= take;
        removed[i] = take;
        excess -= take as u128 * coin;
    }
    if excess > 0 {
        return Err(Error::StrategyInapplicable(format!(
            "wt_{j}({x}) cannot be trimmed to exactly 2^{j}: {excess} left after the pennies"
        )));
    }
    Ok((StateVector::new(kept)?, StateVector::new(removed)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{binom, imbalance};

    fn sv(s: &str) -> StateVector {
        s.parse().unwrap()
    }

    #[test]
    fn floor_ceiling_examples() {
        assert_eq!(floor_ceiling_question(&sv("4,6"), 3).to_string(), "2,3");
        assert_eq!(floor_ceiling_question(&sv("5,2"), 3).to_string(), "3,1");
        assert_eq!(floor_ceiling_question(&sv("3,3,1"), 3).to_string(), "2,1,1");
    }

    #[test]
    fn greedy_trim_examples() {
        let (kept, removed) = greedy_trim(&sv("0,0,10"), 3).unwrap();
        assert_eq!((kept.to_string(), removed.to_string()), ("0,0,8".into(), "0,0,2".into()));
        let (kept, removed) = greedy_trim(&sv("1,0,0,0"), 0).unwrap();
        assert_eq!(kept, sv("1,0,0,0"));
        assert!(removed.is_zero());
        let (kept, removed) = greedy_trim(&sv("2,1,5"), 3).unwrap();
        assert_eq!(kept, sv("0,1,4"));
        assert_eq!(removed, sv("2,0,1"));
        assert!(matches!(greedy_trim(&sv("0,0,3"), 3), Err(Error::Domain(_))));
        assert!(matches!(greedy_trim(&sv("171,0"), 2), Err(Error::StrategyInapplicable(_))));
    }

    #[test]
    fn floor_ceiling_bound_on_small_grid() {
        for k in 0..=3usize {
            let j = (2 * k as u32).saturating_sub(1).max(1);
            for code in 0..4u64.pow(k as u32 + 1) {
                let counts: Vec<u64> = (0..=k).map(|i| (code >> (2 * i)) & 3).collect();
                let x = StateVector::new(counts).unwrap();
                let a = floor_ceiling_question(&x, j + 1);
                let d = imbalance(j, &x, &a).unwrap();
                assert!(d >= 0 && d <= binom(j, k as i64).unwrap() as i128, "x={x} d={d}");
            }
        }
    }
}
