//! Fictitious play for two lies: the pennies coordinate may go negative and
//! the weight is halved exactly every round. The simulation checks that play
//! from a penny-rich state stays legal down to six rounds and lands on a
//! known finite list of states.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::game::{binom_le, binom_le_unchecked, binom_unchecked, pow2, weight, Response, StateVector};
use crate::tree::path_string;

/// A two-lie state whose last coordinate may be negative.
pub type FicState = [i64; 3];
type Q = Ratio<i128>;

const FINAL_ROUNDS: u32 = 6;
const MAX_SIM_ROUNDS: u32 = 60;

/// States reachable at six rounds remaining, with `(1,2,18)` corrected to
/// the weight-consistent `(1,2,28)`.
pub fn allowed_endgame_states() -> &'static [FicState] {
    &[
        [1, 3, 21],
        [1, 2, 28],
        [1, 1, 35],
        [1, 0, 42],
        [0, 8, 8],
        [0, 7, 15],
        [0, 6, 22],
        [0, 5, 29],
        [0, 4, 36],
        [0, 3, 43],
        [0, 2, 50],
        [0, 1, 57],
        [0, 0, 64],
    ]
}

const EXCLUDED: [FicState; 2] = [[1, 5, 7], [1, 4, 14]];

fn signed_weight(j: u32, p: FicState) -> i128 {
    p[0] as i128 * binom_le_unchecked(j, 2) as i128 + p[1] as i128 * (j as i128 + 1) + p[2] as i128
}

/// Fictitious question at `p` with `rounds_remaining` rounds left: halve
/// `p0` rounding up, halve `p1` rounding against `p0`, then pick `v2` to make
/// the imbalance zero.
pub fn fictitious_step(p: FicState, rounds_remaining: u32) -> Result<FicState> {
    let j = rounds_remaining
        .checked_sub(1)
        .ok_or_else(|| Error::Domain("no rounds remaining".into()))?;
    let (p0, p1, p2) = (p[0], p[1], p[2]);
    let (v0, v1) = if p0 % 2 == 1 {
        ((p0 + 1) / 2, p1.div_euclid(2))
    } else {
        (p0 / 2, (p1 + 1).div_euclid(2))
    };
    let c2 = binom_unchecked(j, 2) as i128;
    let twice_v2 =
        p2 as i128 - (2 * v0 as i128 - p0 as i128) * c2 - (2 * v1 as i128 - p1 as i128) * j as i128;
    if twice_v2 % 2 != 0 {
        return Err(Error::StrategyInapplicable(format!(
            "fictitious move at ({p0},{p1},{p2}) with {rounds_remaining} rounds left: 2 v2 = {twice_v2} is odd"
        )));
    }
    let v2 = i64::try_from(twice_v2 / 2).map_err(Error::capacity)?;
    Ok([v0, v1, v2])
}

fn abs(v: Q) -> Q {
    if v < Q::from_integer(0) {
        -v
    } else {
        v
    }
}

fn step_state(p: FicState, v: FicState, r: Response) -> FicState {
    match r {
        Response::Y => [v[0], v[1] + p[0] - v[0], v[2] + p[1] - v[1]],
        Response::N => [p[0] - v[0], p[1] - v[1] + v[0], p[2] - v[2] + v[1]],
    }
}

/// Perfect-play state with `j` rounds remaining, from the closed forms.
pub fn perfect_play(x: &StateVector, q: u32, j: u32) -> Result<[Ratio<i128>; 3]> {
    if j > q || x.lies() != 2 {
        return Err(Error::Domain(format!("perfect play needs k = 2 and j <= q, got j = {j}")));
    }
    let d = q - j;
    let den = pow2(d)? as i128;
    let (x0, x1, x2) = (x.get(0) as i128, x.get(1) as i128, x.get(2) as i128);
    let c1 = d as i128;
    let c2 = binom_unchecked(d, 2) as i128;
    Ok([
        Q::new(x0, den),
        Q::new(x1 + x0 * c1, den),
        Q::new(x2 + x1 * c1 + x0 * c2, den),
    ])
}

#[derive(Debug, Clone, Copy)]
pub struct FictitiousOptions {
    /// Branches up to which the simulation is exhaustive; beyond it, this
    /// many random branches are sampled.
    pub branch_budget: u64,
    pub seed: u64,
}

impl Default for FictitiousOptions {
    fn default() -> Self {
        FictitiousOptions {
            branch_budget: 100_000,
            seed: 0,
        }
    }
}

/// One round of the first explored branch.
#[derive(Debug, Clone, PartialEq)]
pub struct FicRecord {
    pub j: u32,
    pub fic: FicState,
    pub pp: [Ratio<i128>; 3],
    pub e: [Ratio<i128>; 3],
    pub e01: Ratio<i128>,
}

/// Extremes over all explored states with `j` rounds remaining.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSummary {
    pub j: u32,
    pub max_e: [Ratio<i128>; 3],
    pub max_e01: Ratio<i128>,
    pub max_fic0: i64,
    pub min_fic2: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FictitiousTrace {
    pub q: u32,
    pub initial: StateVector,
    pub exhaustive: bool,
    pub branches: u64,
    /// Indexed by `q - j`, from `j = q` down to six.
    pub levels: Vec<LevelSummary>,
    /// How often each state at six rounds remaining was reached.
    pub endgame: BTreeMap<FicState, u64>,
    pub first_branch: Vec<FicRecord>,
    /// Visited states with `e2(j) > C(j,2) + 5`. Only `C(j,2) + j + 5` is enforced.
    pub tight_e2_excesses: u64,
    /// Largest `e2(j) - C(j,2) - 5` seen, or zero.
    pub max_tight_e2_excess: Ratio<i128>,
}

struct Sim {
    q: u32,
    pp: Vec<[Q; 3]>,
    levels: Vec<LevelSummary>,
    endgame: BTreeMap<FicState, u64>,
    tight_e2_excesses: u64,
    max_tight_e2_excess: Q,
}

impl Sim {
    fn fail(&self, path: &[Response], j: u32, p: FicState, what: &str) -> Error {
        let pp = &self.pp[(self.q - j) as usize];
        Error::Verification(format!(
            "fictitious play after '{}' (j = {j}): fic = ({},{},{}), pp = ({},{},{}): {what}",
            path_string(path),
            p[0],
            p[1],
            p[2],
            pp[0],
            pp[1],
            pp[2]
        ))
    }

    /// Checks and records one visited state; returns its record.
    fn visit(&mut self, path: &[Response], j: u32, p: FicState) -> Result<FicRecord> {
        if signed_weight(j, p) != 1i128 << j {
            return Err(self.fail(path, j, p, "weight is not 2^j"));
        }
        if p[0] < 0 || p[1] < 0 {
            return Err(self.fail(path, j, p, "negative non-penny coordinate"));
        }
        if p[2] <= 1 {
            return Err(self.fail(path, j, p, "fic2 <= 1"));
        }
        let pp = self.pp[(self.q - j) as usize];
        let e = [0, 1, 2].map(|i| abs(Q::from_integer(p[i] as i128) - pp[i]));
        let e01 = abs(Q::from_integer(p[0] as i128 + p[1] as i128) - pp[0] - pp[1]);
        let one = Q::from_integer(1);
        if e[0] > one {
            return Err(self.fail(path, j, p, &format!("e0 = {} > 1", e[0])));
        }
        if e[1] > Q::from_integer(3) {
            return Err(self.fail(path, j, p, &format!("e1 = {} > 3", e[1])));
        }
        // e2(j) <= e2(j+1)/2 + C(j,2)/2 + 2 with e2(q) = 0 solves to C(j,2) + j + 5
        let c2 = binom_unchecked(j, 2) as i128;
        let e2_cap = Q::from_integer(c2 + j as i128 + 5);
        if e[2] > e2_cap {
            return Err(self.fail(path, j, p, &format!("e2 = {} > {e2_cap}", e[2])));
        }
        let over = e[2] - Q::from_integer(c2 + 5);
        if over > Q::from_integer(0) {
            self.tight_e2_excesses += 1;
            self.max_tight_e2_excess = self.max_tight_e2_excess.max(over);
        }
        if e01 >= Q::from_integer(2) {
            return Err(self.fail(path, j, p, &format!("e01 = {e01} >= 2")));
        }
        if j == FINAL_ROUNDS {
            if p[0] > 1 {
                return Err(self.fail(path, j, p, "fic0 > 1 at six rounds"));
            }
            if EXCLUDED.contains(&p) {
                return Err(self.fail(path, j, p, "excluded endgame state"));
            }
            if !allowed_endgame_states().contains(&p) {
                return Err(self.fail(path, j, p, "endgame state not in the allowed list"));
            }
            *self.endgame.entry(p).or_default() += 1;
        }
        let level = &mut self.levels[(self.q - j) as usize];
        for (m, v) in level.max_e.iter_mut().zip(e) {
            *m = (*m).max(v);
        }
        level.max_e01 = level.max_e01.max(e01);
        level.max_fic0 = level.max_fic0.max(p[0]);
        level.min_fic2 = level.min_fic2.min(p[2]);
        Ok(FicRecord { j, fic: p, pp, e, e01 })
    }

    fn exhaust(&mut self, path: &mut Vec<Response>, j: u32, p: FicState) -> Result<()> {
        self.visit(path, j, p)?;
        if j == FINAL_ROUNDS {
            return Ok(());
        }
        let v = fictitious_step(p, j)?;
        for r in Response::BOTH {
            path.push(r);
            self.exhaust(path, j - 1, step_state(p, v, r))?;
            path.pop();
        }
        Ok(())
    }

    fn branch(&mut self, responses: &[Response], x: FicState) -> Result<Vec<FicRecord>> {
        let mut records = Vec::with_capacity(responses.len() + 1);
        let mut p = x;
        for (depth, j) in (FINAL_ROUNDS..=self.q).rev().enumerate() {
            records.push(self.visit(&responses[..depth], j, p)?);
            if j > FINAL_ROUNDS {
                let v = fictitious_step(p, j)?;
                p = step_state(p, v, responses[depth]);
            }
        }
        Ok(records)
    }
}

/// Runs fictitious play from `x` against every Carole answer sequence down
/// to six rounds remaining (or a seeded sample when there are more branches
/// than the budget), checking legality, the deviation bounds from perfect
/// play and the final state at every step.
pub fn fictitious_simulation(
    x: &StateVector,
    q: u32,
    options: FictitiousOptions,
) -> Result<FictitiousTrace> {
    if x.lies() != 2 {
        return Err(Error::Shape {
            expected: 3,
            found: x.lies() + 1,
        });
    }
    if !(23..=MAX_SIM_ROUNDS).contains(&q) {
        return Err(Error::Domain(format!("fictitious simulation needs 23 <= q <= {MAX_SIM_ROUNDS}, got {q}")));
    }
    if weight(q, x)? != pow2(q)? {
        return Err(Error::Domain(format!("wt_{q}({x}) != 2^{q}")));
    }
    if (x.get(2) as u128) < (q as u128).pow(2) {
        return Err(Error::Domain(format!("{x} has fewer than q^2 = {} pennies", q * q)));
    }
    let start: FicState = [x.get(0), x.get(1), x.get(2)].map(|c| c as i64);

    // perfect play by iteration, cross-checked against the closed forms
    let half = Q::new(1, 2);
    let mut pp = Vec::with_capacity((q - FINAL_ROUNDS + 1) as usize);
    let mut cur = start.map(|c| Q::from_integer(c as i128));
    for j in (FINAL_ROUNDS..=q).rev() {
        let closed = perfect_play(x, q, j)?;
        if closed != cur {
            return Err(Error::Verification(format!(
                "perfect play at j = {j}: iteration {cur:?} vs closed form {closed:?}"
            )));
        }
        pp.push(cur);
        cur = [cur[0] * half, (cur[1] + cur[0]) * half, (cur[2] + cur[1]) * half];
    }

    let zero = Q::from_integer(0);
    let levels = (FINAL_ROUNDS..=q)
        .rev()
        .map(|j| LevelSummary {
            j,
            max_e: [zero; 3],
            max_e01: zero,
            max_fic0: 0,
            min_fic2: i64::MAX,
        })
        .collect();
    let mut sim = Sim {
        q,
        pp,
        levels,
        endgame: BTreeMap::new(),
        tight_e2_excesses: 0,
        max_tight_e2_excess: zero,
    };
    let depth = q - FINAL_ROUNDS;
    let total = 1u64 << depth;
    let exhaustive = total <= options.branch_budget;
    let first_branch = sim.branch(&vec![Response::N; depth as usize], start)?;
    sim.tight_e2_excesses = 0;
    let branches = if exhaustive {
        sim.endgame.clear();
        sim.exhaust(&mut Vec::with_capacity(depth as usize), q, start)?;
        total
    } else {
        sim.endgame.clear();
        let mut rng = StdRng::seed_from_u64(options.seed);
        let mut responses = vec![Response::N; depth as usize];
        for _ in 0..options.branch_budget {
            for r in responses.iter_mut() {
                *r = if rng.random::<bool>() { Response::Y } else { Response::N };
            }
            sim.branch(&responses, start)?;
        }
        options.branch_budget
    };
    Ok(FictitiousTrace {
        q,
        initial: x.clone(),
        exhaustive,
        branches,
        levels: sim.levels,
        endgame: sim.endgame,
        first_branch,
        tight_e2_excesses: sim.tight_e2_excesses,
        max_tight_e2_excess: sim.max_tight_e2_excess,
    })
}

/// A uniformly drawn `x0`, then `x1`, with the pennies filling `wt_q` up to
/// exactly `2^q` and at least `q^2` of them.
pub fn random_admissible_state<R: Rng + ?Sized>(q: u32, rng: &mut R) -> Result<StateVector> {
    let room = pow2(q)?
        .checked_sub((q as u128).pow(2))
        .ok_or_else(|| Error::Domain(format!("2^{q} < q^2")))?;
    let x0 = rng.random_range(0..=room / binom_le(q, 2)?);
    let room = room - x0 * binom_le(q, 2)?;
    let x1 = rng.random_range(0..=room / (q as u128 + 1));
    let x2 = pow2(q)? - x0 * binom_le(q, 2)? - x1 * (q as u128 + 1);
    StateVector::new([x0, x1, x2].map(|c| c as u64))
}
