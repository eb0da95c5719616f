use super::Policy;
use crate::closed_forms::paul_wins_1lie_pathological;
use crate::error::{Error, Result};
use crate::game::{character, GameSpec, GameVariant, QuestionVector, StateVector};

/// The character-preserving move for one lie: both successors keep character
/// at least `ch(x) - 1`.
pub fn one_lie_move(x0: u64, x1: u64) -> Result<QuestionVector> {
    let q = match character(x0, x1) {
        Some(q) => q as i64,
        None => return Err(Error::NoMove),
    };
    let (x0i, x1i) = (x0 as i64, x1 as i64);
    let (a0, a1) = match x0 {
        0 => (0, x1i / 2),
        1 => (1, (x1i + 1 - q).div_euclid(2)),
        _ if x0.is_multiple_of(2) => (x0i / 2, x1i / 2),
        _ => ((x0i + 1) / 2, (x1i - q + 2).div_euclid(2)),
    };
    if a1 < 0 || a1 > x1i {
        return Err(Error::StrategyInapplicable(format!(
            "one-lie move at ({x0},{x1}) with character {q} needs a1 = {a1}"
        )));
    }
    Ok(QuestionVector::new([a0 as u64, a1 as u64]))
}

/// Winning one-lie strategy from `(n, 0)`: split the fresh elements in half,
/// then keep playing [`one_lie_move`].
#[derive(Debug, Clone, Copy)]
pub struct OneLiePolicy {
    n: u64,
    q: u32,
}

pub fn one_lie_full_policy(n: u64, q: u32) -> Result<OneLiePolicy> {
    if !paul_wins_1lie_pathological(n, q)? {
        return Err(Error::Domain(format!(
            "Paul does not win ((n, 0), q, 1)* for n = {n}, q = {q}"
        )));
    }
    Ok(OneLiePolicy { n, q })
}

impl Policy for OneLiePolicy {
    type Memory = ();

    fn start(&self, spec: &GameSpec) -> Result<()> {
        let expected = StateVector::initial(self.n, 1);
        if spec.variant != GameVariant::Pathological || spec.initial != expected || spec.rounds != self.q {
            return Err(Error::Domain(format!(
                "policy built for (({}), {}, 1)* in the pathological game",
                expected, self.q
            )));
        }
        Ok(())
    }

    fn question(&self, _: &(), state: &StateVector, rounds_remaining: u32) -> Result<QuestionVector> {
        if rounds_remaining == self.q {
            return Ok(QuestionVector::new([self.n.div_ceil(2), 0]));
        }
        one_lie_move(state.get(0), state.get(1))
    }
}
