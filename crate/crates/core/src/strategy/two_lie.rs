use super::fictitious::fictitious_step;
use super::{greedy_trim, Policy};
use crate::closed_forms::{paul_wins_2lie_pathological, two_lie_correction};
use crate::error::{Error, Result};
use crate::game::{
    binom_le, binom_signed, pow2, sphere_bound, transition, weight, GameSpec, GameVariant,
    QuestionVector, Response, StateVector,
};
use crate::solver::{Solver, SolverConfig};

/// Rounds remaining at which the two-lie policy hands over to the exact solver.
pub const ENDGAME_ROUNDS: u32 = 6;

/// First two questions for `((n, 0, 0), q, 2)*`, keyed on `n mod 4` and `(q - 2) mod 4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpeningCase {
    pub n: u64,
    pub q: u32,
    pub a: QuestionVector,
    pub b_yes: QuestionVector,
    pub b_no: QuestionVector,
}

/// The four states after the two opening rounds, in response order NN, NY, YN, YY.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpeningExpansion {
    pub leaves: [StateVector; 4],
    /// `min(4 wt_{q-2}(leaf)) - wt_q(n, 0, 0)`.
    pub deficit: i128,
    pub min_pennies: u64,
}

/// The case table without the sphere-bound hypothesis; errors if an entry
/// would be negative or illegal.
pub fn opening_case(n: u64, q: u32) -> Result<OpeningCase> {
    if q < 5 {
        return Err(Error::Domain(format!("opening table needs q >= 5, got {q}")));
    }
    let p = (n / 4) as i64;
    let t = (q - 2) as i64;
    let s = t % 4;
    let (a, by, bn): (i64, [i64; 2], [i64; 2]) = match n % 4 {
        0 => (2 * p, [p, p], [p, p]),
        1 => {
            let bn = if t % 2 == 1 { [p, p + 1] } else { [p + 1, p - t / 2 + 1] };
            (2 * p + 1, [p + 1, p], bn)
        }
        2 => {
            let b = match s {
                0 => [p + 1, p - (t / 4) + 1],
                1 => [p, p + (t - 1) / 4 + 1],
                2 => [p, p + (t - 2) / 4 + 1],
                _ => [p, p + (t - 3) / 4 + 1],
            };
            (2 * p + 1, b, b)
        }
        _ => {
            let bn = match s {
                0 => [p, p + t / 4 + 1],
                1 => [p, p + (t - 1) / 4 + 1],
                2 => [p + 1, p - (t - 2) / 4 + 1],
                _ => [p, p + (t - 3) / 4 + 2],
            };
            (2 * p + 2, [p + 1, p + 1], bn)
        }
    };
    let to_q = |v: [i64; 2]| -> Result<QuestionVector> {
        if v.iter().any(|&c| c < 0) {
            return Err(Error::Domain(format!(
                "opening entry ({},{},0) is negative for n = {n}, q = {q}",
                v[0], v[1]
            )));
        }
        Ok(QuestionVector::new([v[0] as u64, v[1] as u64, 0]))
    };
    let case = OpeningCase {
        n,
        q,
        a: QuestionVector::new([a as u64, 0, 0]),
        b_yes: to_q(by)?,
        b_no: to_q(bn)?,
    };
    let root = StateVector::initial(n, 2);
    for (r, b) in [(Response::Y, &case.b_yes), (Response::N, &case.b_no)] {
        let x = transition(&root, &case.a, r)?;
        if !b.is_legal_for(&x) {
            return Err(Error::Domain(format!(
                "opening question {b} is illegal at {x} for n = {n}, q = {q}"
            )));
        }
    }
    Ok(case)
}

/// The opening for the regime where its guarantees hold: `q >= 19` and `n`
/// at least the sphere bound.
pub fn two_lie_opening(n: u64, q: u32) -> Result<OpeningCase> {
    if q < 19 {
        return Err(Error::Domain(format!("two-lie opening needs q >= 19, got {q}")));
    }
    let sb = sphere_bound(q, 2)?;
    if (n as u128) < sb {
        return Err(Error::Domain(format!("n = {n} is below the sphere bound {sb} for q = {q}")));
    }
    opening_case(n, q)
}

impl OpeningCase {
    pub fn second(&self, first: Response) -> &QuestionVector {
        match first {
            Response::Y => &self.b_yes,
            Response::N => &self.b_no,
        }
    }

    /// `-A C(q-1, 2) - B C(q-2, 1)`: the deficit the table is meant to achieve.
    pub fn target_deficit(&self) -> Result<i128> {
        let c = two_lie_correction(self.n, self.q);
        let q = self.q as i64;
        Ok(-(c.a as i128) * binom_signed(q - 1, 2)? as i128
            - c.b as i128 * binom_signed(q - 2, 1)? as i128)
    }
}

/// Plays out both opening rounds.
pub fn opening_expansion(case: &OpeningCase) -> Result<OpeningExpansion> {
    let root = StateVector::initial(case.n, 2);
    let total = weight(case.q, &root)? as i128;
    let mut leaves = Vec::with_capacity(4);
    for r1 in Response::BOTH {
        let mid = transition(&root, &case.a, r1)?;
        for r2 in Response::BOTH {
            leaves.push(transition(&mid, case.second(r1), r2)?);
        }
    }
    let mut deficit = i128::MAX;
    for leaf in &leaves {
        deficit = deficit.min(4 * weight(case.q - 2, leaf)? as i128 - total);
    }
    let min_pennies = leaves.iter().map(|x| x.get(2)).min().unwrap_or(0);
    Ok(OpeningExpansion {
        leaves: leaves.try_into().expect("four leaves"),
        deficit,
        min_pennies,
    })
}

/// The exact-halving question at a two-lie position of weight `2^rounds_remaining`.
pub fn fictitious_play_move(p: &StateVector, rounds_remaining: u32) -> Result<QuestionVector> {
    if p.lies() != 2 {
        return Err(Error::Shape {
            expected: 3,
            found: p.lies() + 1,
        });
    }
    if rounds_remaining == 0 {
        return Err(Error::Domain("no rounds remaining".into()));
    }
    let w = weight(rounds_remaining, p)?;
    if w != pow2(rounds_remaining)? {
        return Err(Error::Domain(format!(
            "wt_{rounds_remaining}({p}) = {w}, expected 2^{rounds_remaining}"
        )));
    }
    let fic = [p.get(0) as i64, p.get(1) as i64, p.get(2) as i64];
    let v = fictitious_step(fic, rounds_remaining)?;
    if v[2] < 0 || v[2] > fic[2] {
        return Err(Error::StrategyInapplicable(format!(
            "fictitious move at {p} with {rounds_remaining} rounds left needs v2 = {}",
            v[2]
        )));
    }
    Ok(QuestionVector::new(v.map(|c| c as u64)))
}

/// Winning two-lie strategy for large `q`: the opening table, a trim to
/// weight exactly `2^(q-2)`, fictitious play down to six rounds, then exact
/// solver moves. Trimmed coins stay in the real state but are never asked
/// about.
pub struct TwoLiePolicy {
    opening: OpeningCase,
    endgame: Solver,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TwoLieMemory {
    pub first: Option<Response>,
    /// The trimmed state Paul actually plays on, from `q - 2` rounds onward.
    pub virtual_state: Option<StateVector>,
}

pub fn two_lie_full_policy(n: u64, q: u32) -> Result<TwoLiePolicy> {
    if q < 25 {
        return Err(Error::Domain(format!(
            "two-lie policy needs q >= 25, got {q}; use the exact solver"
        )));
    }
    if !paul_wins_2lie_pathological(n, q)? {
        return Err(Error::Domain(format!(
            "Paul does not win ((n, 0, 0), q, 2)* for n = {n}, q = {q}"
        )));
    }
    Ok(TwoLiePolicy {
        opening: two_lie_opening(n, q)?,
        endgame: Solver::new(GameVariant::Pathological, 2, SolverConfig::default()),
    })
}

impl TwoLiePolicy {
    pub fn opening(&self) -> &OpeningCase {
        &self.opening
    }
}

impl Policy for TwoLiePolicy {
    type Memory = TwoLieMemory;

    fn start(&self, spec: &GameSpec) -> Result<TwoLieMemory> {
        let expected = StateVector::initial(self.opening.n, 2);
        if spec.variant != GameVariant::Pathological
            || spec.initial != expected
            || spec.rounds != self.opening.q
        {
            return Err(Error::Domain(format!(
                "policy built for (({}), {}, 2)* in the pathological game",
                expected, self.opening.q
            )));
        }
        Ok(TwoLieMemory::default())
    }

    fn question(
        &self,
        memory: &TwoLieMemory,
        _state: &StateVector,
        rounds_remaining: u32,
    ) -> Result<QuestionVector> {
        let q = self.opening.q;
        if rounds_remaining == q {
            return Ok(self.opening.a.clone());
        }
        if rounds_remaining == q - 1 {
            let first = memory
                .first
                .ok_or_else(|| Error::StrategyInapplicable("first answer not recorded".into()))?;
            return Ok(self.opening.second(first).clone());
        }
        let v = memory
            .virtual_state
            .as_ref()
            .ok_or_else(|| Error::StrategyInapplicable("trimmed state missing".into()))?;
        if rounds_remaining > ENDGAME_ROUNDS {
            fictitious_play_move(v, rounds_remaining)
        } else {
            self.endgame.winning_question(v, rounds_remaining)?.ok_or_else(|| {
                Error::StrategyInapplicable(format!(
                    "no winning endgame move at {v} with {rounds_remaining} rounds left"
                ))
            })
        }
    }

    fn observe(
        &self,
        memory: &mut TwoLieMemory,
        question: &QuestionVector,
        response: Response,
        next: &StateVector,
        rounds_remaining: u32,
    ) -> Result<()> {
        if memory.first.is_none() {
            memory.first = Some(response);
        }
        if let Some(v) = &memory.virtual_state {
            memory.virtual_state = Some(transition(v, question, response)?);
        } else if rounds_remaining + 2 == self.opening.q {
            memory.virtual_state = Some(greedy_trim(next, rounds_remaining)?.0);
        }
        Ok(())
    }
}

/// `(q - 2)^2 + C(q - 2, <= 2)`: the penny count the opening guarantees.
pub fn opening_penny_target(q: u32) -> Result<u128> {
    let t = q as u128 - 2;
    Ok(t * t + binom_le(q - 2, 2)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(s: &str) -> StateVector {
        s.parse().unwrap()
    }

    #[test]
    fn opening_table_examples() {
        let c = opening_case(20, 20).unwrap();
        assert_eq!((c.a.to_string(), c.b_yes.to_string(), c.b_no.to_string()),
            ("10,0,0".into(), "5,5,0".into(), "5,5,0".into()));
        // n = 4p+1 with q - 2 even asks (p+1, p - (q-2)/2 + 1, 0), negative for small p
        assert!(opening_case(21, 20).is_err());
        let c = opening_case(21, 21).unwrap();
        assert_eq!((c.b_yes.to_string(), c.b_no.to_string()), ("6,5,0".into(), "5,6,0".into()));
        let c = opening_case(23, 20).unwrap();
        assert_eq!((c.a.to_string(), c.b_yes.to_string(), c.b_no.to_string()),
            ("12,0,0".into(), "6,6,0".into(), "6,2,0".into()));
        // the complementary question has the same imbalance
        let mid = sv("11,12,0");
        let comp = mid.complement(&c.b_no).unwrap();
        assert_eq!(comp.to_string(), "5,10,0");
        assert_eq!(
            crate::game::imbalance(18, &mid, &c.b_no).unwrap().abs(),
            crate::game::imbalance(18, &mid, &comp).unwrap().abs()
        );
    }

    #[test]
    fn opening_guards() {
        assert!(two_lie_opening(20, 20).is_err());
        assert!(two_lie_opening(4970, 18).is_err());
        assert!(two_lie_opening(sphere_bound(20, 2).unwrap() as u64, 20).is_ok());
    }

    #[test]
    fn opening_deficit_identity() {
        for q in 19..=30u32 {
            let sb = sphere_bound(q, 2).unwrap() as u64;
            for n in sb..=sb + 8 {
                let case = two_lie_opening(n, q).unwrap();
                let exp = opening_expansion(&case).unwrap();
                assert_eq!(exp.deficit, case.target_deficit().unwrap(), "n={n} q={q}");
                assert!(exp.min_pennies as u128 >= opening_penny_target(q).unwrap(), "n={n} q={q}");
            }
        }
    }

    #[test]
    fn fictitious_move_examples() {
        assert_eq!(fictitious_play_move(&sv("0,0,64"), 6).unwrap().to_string(), "0,0,32");
        assert_eq!(fictitious_play_move(&sv("1,3,21"), 6).unwrap().to_string(), "1,1,8");
        let p = sv("1,0,42");
        let v = fictitious_play_move(&p, 6).unwrap();
        assert_eq!(v.to_string(), "1,0,16");
        for r in Response::BOTH {
            assert_eq!(weight(5, &transition(&p, &v, r).unwrap()).unwrap(), 32);
        }
        assert!(matches!(fictitious_play_move(&sv("1,0,41"), 6), Err(Error::Domain(_))));
    }

    #[test]
    fn policy_guards() {
        let n = crate::closed_forms::f_star_2(25).unwrap();
        assert!(two_lie_full_policy(n, 25).is_ok());
        assert!(two_lie_full_policy(n - 1, 25).is_err());
        assert!(two_lie_full_policy(1525, 18).is_err());
    }
}
