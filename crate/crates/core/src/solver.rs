//! Exact minimax evaluation of the liar games.
//!
//! The solver memoizes `(rounds_remaining, state) -> winner`. Positions are
//! already canonical since they are counts, so no further normalization is
//! needed. Two exact shortcuts cut the search:
//!
//! * pathological: `wt_j(x) < 2^j` loses for Paul (Carole keeps the lighter
//!   successor), and `sum(x) >= 2^j` wins (treat every element as a penny
//!   and halve);
//! * original: `wt_j(x) > 2^j` loses for Paul (Carole keeps the heavier
//!   successor), and `sum(x) <= 1` wins.
//!
//! Questions are only enumerated inside the imbalance window that keeps both
//! successors on the right side of `2^(j-1)`; everything outside it loses by
//! the shortcuts above.

use std::io::{BufRead, Write};
use std::sync::atomic::{AtomicU64, Ordering::Relaxed};

use dashmap::DashMap;
use rayon::prelude::*;
use rustc_hash::FxBuildHasher;

use crate::error::{Error, Result};
use crate::game::{
    binom_le, binom_unchecked, pow2, transition_unchecked, weight, Counts,
    GameSpec, GameVariant, QuestionVector, Response, StateVector, MAX_ROUNDS,
};
use crate::tree::DecisionTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Winner {
    Paul,
    Carole,
}

impl Winner {
    pub fn from_paul_wins(paul: bool) -> Self {
        if paul {
            Winner::Paul
        } else {
            Winner::Carole
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Winner::Paul => "Paul",
            Winner::Carole => "Carole",
        }
    }
}

impl std::fmt::Display for Winner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub const DEFAULT_QUESTION_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub threads: usize,
    /// Maximum number of enumerated questions, both as an up-front estimate
    /// and as a running count.
    pub question_budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            threads: 1,
            question_budget: DEFAULT_QUESTION_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub visited: u64,
    pub memo_hits: u64,
    pub peak_memo: usize,
    pub questions: u64,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub winner: Winner,
    /// Present iff Paul wins and a tree was requested.
    pub strategy: Option<DecisionTree>,
    pub stats: SolveStats,
}

/// A legal question together with `imbalance(j - 1, x, a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub question: QuestionVector,
    pub imbalance: i128,
}

/// Rough count of questions the search may enumerate for `q` rounds and `k`
/// lies: `(q + 1) * (floor(2^q / C(q, <= k)) + 2)^(k + 1)`.
pub fn estimated_cost(q: u32, k: usize) -> u128 {
    let Ok(ball) = binom_le(q.min(MAX_ROUNDS), k as i64) else {
        return u128::MAX;
    };
    let base = (1u128 << q.min(MAX_ROUNDS)) / ball + 2;
    let mut cost = q as u128 + 1;
    for _ in 0..=k {
        cost = cost.saturating_mul(base);
    }
    cost
}

/// Refuses instances whose estimated cost exceeds the budget.
pub fn check_tractable(q: u32, k: usize, budget: u64) -> Result<()> {
    if q > MAX_ROUNDS {
        return Err(Error::capacity(format!("q = {q} > {MAX_ROUNDS}")));
    }
    let estimate = estimated_cost(q, k);
    if estimate > budget as u128 {
        // The estimate grows exponentially in q and polynomially with
        // exponent k + 1; blame the lies once k exceeds the desk-scale range.
        let dimension = if k > 2 { "lies" } else { "rounds" };
        return Err(Error::BudgetExceeded {
            dimension,
            estimate,
            budget: budget as u128,
        });
    }
    Ok(())
}

/// All legal questions for `x` with `rounds_remaining` rounds left, one per
/// symmetry class `{a, x - a}` (the lexicographically smaller one), sorted by
/// `|imbalance|` and then lexicographically.
pub fn question_candidates(x: &StateVector, rounds_remaining: u32) -> Vec<Candidate> {
    let mut count = 0;
    enumerate_questions(x, rounds_remaining, None, &mut count)
}

/// Enumeration behind [`question_candidates`]. With `window = Some(s)` only
/// questions with `|imbalance| <= s` are produced. `count` accumulates the
/// enumeration work.
pub(crate) fn enumerate_questions(
    x: &StateVector,
    rounds_remaining: u32,
    window: Option<u128>,
    count: &mut u64,
) -> Vec<Candidate> {
    let xs = x.counts();
    let k = xs.len() - 1;
    let j = rounds_remaining.saturating_sub(1);
    let coef: Counts = (0..=k)
        .map(|i| binom_unchecked(j, (k - i) as i64) as u64)
        .collect();
    // rest[i] = largest |contribution| of indices >= i
    let mut rest = vec![0i128; k + 2];
    for i in (0..=k).rev() {
        rest[i] = rest[i + 1] + xs[i] as i128 * coef[i] as i128;
    }
    let window = window.map(|w| w.min(i128::MAX as u128) as i128);
    let mut out = Vec::new();
    let mut prefix: Counts = Counts::with_capacity(k + 1);
    enumerate_level(xs, &coef, &rest, window, 0, 0, true, &mut prefix, &mut out, count);
    out.sort_by(|a, b| {
        a.imbalance
            .unsigned_abs()
            .cmp(&b.imbalance.unsigned_abs())
            .then_with(|| a.question.cmp(&b.question))
    });
    out
}

#[allow(clippy::too_many_arguments)]
fn enumerate_level(
    xs: &[u64],
    coef: &[u64],
    rest: &[i128],
    window: Option<i128>,
    i: usize,
    partial: i128,
    tied: bool,
    prefix: &mut Counts,
    out: &mut Vec<Candidate>,
    count: &mut u64,
) {
    let x = xs[i] as i128;
    let c = coef[i] as i128;
    // symmetry: stay lexicographically <= the complement
    let mut lo: i128 = 0;
    let mut hi: i128 = if tied { x / 2 } else { x };
    if let Some(s) = window {
        // need |partial + (2a - x) c + later| <= s for some later in
        // [-rest[i+1], rest[i+1]]
        let slack = s + rest[i + 1];
        if c == 0 {
            if partial.abs() - rest[i + 1] > s {
                return;
            }
        } else {
            // -slack <= partial + (2a - x) c <= slack
            let min_two_a = (-slack - partial).div_euclid(c) + x;
            let min_two_a = if (-slack - partial).rem_euclid(c) == 0 {
                min_two_a
            } else {
                min_two_a + 1
            };
            let max_two_a = (slack - partial).div_euclid(c) + x;
            lo = lo.max(min_two_a.div_euclid(2) + min_two_a.rem_euclid(2));
            hi = hi.min(max_two_a.div_euclid(2));
        }
    }
    if lo > hi {
        return;
    }
    let last = i + 1 == xs.len();
    for a in lo..=hi {
        *count += 1;
        let d = partial + (2 * a - x) * c;
        prefix.push(a as u64);
        if last {
            if window.is_none_or(|s| d.abs() <= s) {
                out.push(Candidate {
                    question: QuestionVector::from_counts(prefix.clone()),
                    imbalance: d,
                });
            }
        } else {
            let still_tied = tied && 2 * a == x;
            enumerate_level(xs, coef, rest, window, i + 1, d, still_tied, prefix, out, count);
        }
        prefix.pop();
    }
}

/// Memoized exact solver for one variant and lie budget.
pub struct Solver {
    variant: GameVariant,
    lies: usize,
    config: SolverConfig,
    memo: DashMap<(u32, StateVector), bool, FxBuildHasher>,
    moves: DashMap<(u32, StateVector), QuestionVector, FxBuildHasher>,
    visited: AtomicU64,
    hits: AtomicU64,
    questions: AtomicU64,
}

impl Solver {
    pub fn new(variant: GameVariant, lies: usize, config: SolverConfig) -> Self {
        Solver {
            variant,
            lies,
            config,
            memo: DashMap::with_hasher(FxBuildHasher),
            moves: DashMap::with_hasher(FxBuildHasher),
            visited: AtomicU64::new(0),
            hits: AtomicU64::new(0),
            questions: AtomicU64::new(0),
        }
    }

    pub fn variant(&self) -> GameVariant {
        self.variant
    }

    pub fn lies(&self) -> usize {
        self.lies
    }

    pub fn config(&self) -> SolverConfig {
        self.config
    }

    pub fn stats(&self) -> SolveStats {
        SolveStats {
            visited: self.visited.load(Relaxed),
            memo_hits: self.hits.load(Relaxed),
            // entries are never evicted, so the current size is the peak
            peak_memo: self.memo.len(),
            questions: self.questions.load(Relaxed),
        }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    fn check_state(&self, x: &StateVector) -> Result<()> {
        if x.lies() != self.lies {
            return Err(Error::Shape {
                expected: self.lies + 1,
                found: x.lies() + 1,
            });
        }
        Ok(())
    }

    /// Game-theoretic winner of `(x, q, k)` under this solver's variant.
    pub fn winner(&self, x: &StateVector, q: u32) -> Result<Winner> {
        self.check_state(x)?;
        check_tractable(q, self.lies, self.config.question_budget)?;
        let paul = if self.config.threads > 1 && q > 0 {
            self.wins_parallel(x, q)?
        } else {
            self.wins(x, q)?
        };
        Ok(Winner::from_paul_wins(paul))
    }

    pub fn solve(&self, x: &StateVector, q: u32, want_tree: bool) -> Result<SolveOutcome> {
        let winner = self.winner(x, q)?;
        let strategy = if want_tree && winner == Winner::Paul {
            Some(self.extract_tree(x, q)?)
        } else {
            None
        };
        Ok(SolveOutcome {
            winner,
            strategy,
            stats: self.stats(),
        })
    }

    /// Exact verdict without enumerating questions, when one is available.
    fn decide_cheaply(&self, x: &StateVector, j: u32) -> Result<Option<bool>> {
        let total = x.total() as u128;
        let cap = pow2(j)?;
        Ok(match self.variant {
            GameVariant::Pathological => {
                if total == 0 {
                    Some(false)
                } else if j == 0 || total >= cap {
                    Some(true)
                } else if weight(j, x)? < cap {
                    Some(false)
                } else {
                    None
                }
            }
            GameVariant::Original => {
                if total <= 1 {
                    Some(true)
                } else if j == 0 || weight(j, x)? > cap {
                    Some(false)
                } else {
                    None
                }
            }
        })
    }

    /// Largest admissible `|imbalance|` for a question at `x` with `j` rounds left.
    fn window(&self, x: &StateVector, j: u32) -> Result<u128> {
        let w = weight(j, x)?;
        let cap = pow2(j)?;
        Ok(match self.variant {
            GameVariant::Pathological => w.saturating_sub(cap),
            GameVariant::Original => cap.saturating_sub(w),
        })
    }

    fn viable_questions(&self, x: &StateVector, j: u32) -> Result<Vec<Candidate>> {
        let window = self.window(x, j)?;
        let mut count = 0;
        let out = enumerate_questions(x, j, Some(window), &mut count);
        let total = self.questions.fetch_add(count, Relaxed) + count;
        if total > self.config.question_budget {
            return Err(Error::BudgetExceeded {
                dimension: "questions",
                estimate: total as u128,
                budget: self.config.question_budget as u128,
            });
        }
        Ok(out)
    }

    pub(crate) fn wins(&self, x: &StateVector, j: u32) -> Result<bool> {
        self.visited.fetch_add(1, Relaxed);
        if let Some(v) = self.decide_cheaply(x, j)? {
            return Ok(v);
        }
        let key = (j, x.clone());
        if let Some(v) = self.memo.get(&key) {
            self.hits.fetch_add(1, Relaxed);
            return Ok(*v);
        }
        let win = self.search(x, j)?.is_some();
        self.memo.insert(key, win);
        Ok(win)
    }

    fn wins_parallel(&self, x: &StateVector, j: u32) -> Result<bool> {
        self.visited.fetch_add(1, Relaxed);
        if let Some(v) = self.decide_cheaply(x, j)? {
            return Ok(v);
        }
        let key = (j, x.clone());
        if let Some(v) = self.memo.get(&key) {
            self.hits.fetch_add(1, Relaxed);
            return Ok(*v);
        }
        let candidates = self.viable_questions(x, j)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.threads)
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
        let found = pool.install(|| {
            candidates
                .par_iter()
                .map(|c| self.question_wins(x, &c.question, j))
                .find_any(|r| !matches!(r, Ok(false)))
        });
        let win = match found {
            Some(r) => r?,
            None => false,
        };
        self.memo.insert(key, win);
        Ok(win)
    }

    fn question_wins(&self, x: &StateVector, a: &QuestionVector, j: u32) -> Result<bool> {
        let yes = transition_unchecked(x, a, Response::Y);
        let no = transition_unchecked(x, a, Response::N);
        // Probe the successor Carole is more likely to prefer first.
        let yes_first = {
            let wy = weight(j - 1, &yes)?;
            let wn = weight(j - 1, &no)?;
            match self.variant {
                GameVariant::Pathological => wy <= wn,
                GameVariant::Original => wy >= wn,
            }
        };
        let (first, second) = if yes_first { (&yes, &no) } else { (&no, &yes) };
        Ok(self.wins(first, j - 1)? && self.wins(second, j - 1)?)
    }

    /// First winning question in candidate order, or `None` when Carole wins.
    fn search(&self, x: &StateVector, j: u32) -> Result<Option<QuestionVector>> {
        if j == 0 {
            return Ok(None);
        }
        for c in self.viable_questions(x, j)? {
            if self.question_wins(x, &c.question, j)? {
                return Ok(Some(c.question));
            }
        }
        Ok(None)
    }

    /// Deterministic winning move for Paul at `(x, j)`, if one exists.
    pub fn winning_question(&self, x: &StateVector, j: u32) -> Result<Option<QuestionVector>> {
        self.check_state(x)?;
        let key = (j, x.clone());
        if let Some(q) = self.moves.get(&key) {
            return Ok(Some(q.clone()));
        }
        if !self.wins(x, j)? {
            return Ok(None);
        }
        let q = self.search(x, j)?;
        if let Some(q) = &q {
            self.moves.insert(key, q.clone());
        }
        Ok(q)
    }

    /// The first question in candidate order; used when no winning move exists.
    pub fn best_effort_question(&self, x: &StateVector, j: u32) -> Result<QuestionVector> {
        if let Some(q) = self.winning_question(x, j)? {
            return Ok(q);
        }
        Ok(question_candidates(x, j)
            .into_iter()
            .next()
            .map(|c| c.question)
            .unwrap_or_else(|| QuestionVector::zero(self.lies)))
    }

    /// Decision tree of the deterministic winning strategy from `(x, q)`.
    pub fn extract_tree(&self, x: &StateVector, q: u32) -> Result<DecisionTree> {
        self.check_state(x)?;
        if !self.wins(x, q)? {
            return Err(Error::Domain(format!(
                "Carole wins ({x}, {q}, {}) in the {} game",
                self.lies, self.variant
            )));
        }
        DecisionTree::build(x.clone(), q, |state, j| {
            self.winning_question(state, j)?.ok_or_else(|| {
                Error::Verification(format!("no winning question at ({state}, {j})"))
            })
        })
    }

    /// `r*(x)`: the most rounds for which Paul wins the pathological game from
    /// `x`, or `None` for the zero state. The original game is refused since
    /// its winning horizons are unbounded above.
    pub fn max_winning_rounds(&self, x: &StateVector) -> Result<Option<u32>> {
        self.check_state(x)?;
        if self.variant != GameVariant::Pathological {
            return Err(Error::Domain(
                "max_winning_rounds is defined for the pathological game only".into(),
            ));
        }
        let mut outcomes = Vec::new();
        for q in 0..=MAX_ROUNDS {
            // wt_{q+1} <= 2 wt_q, so once the weight drops below 2^q it stays below.
            if weight(q, x)? < pow2(q)? {
                break;
            }
            outcomes.push(self.winner(x, q)? == Winner::Paul);
        }
        let best = outcomes.iter().rposition(|&w| w);
        if let Some(r) = best {
            if let Some(gap) = outcomes[..r].iter().position(|&w| !w) {
                return Err(Error::Verification(format!(
                    "winning horizons of {x} are not downward closed: loses at {gap}, wins at {r}"
                )));
            }
        }
        Ok(best.map(|r| r as u32))
    }

    /// Minimum `n` such that Paul wins `((n, 0, ..., 0), q, k)*`.
    pub fn f_star(&self, q: u32) -> Result<u64> {
        if self.variant != GameVariant::Pathological {
            return Err(Error::Domain("f_star needs a pathological solver".into()));
        }
        check_tractable(q, self.lies, self.config.question_budget)?;
        let wins = |n: u64| -> Result<bool> {
            Ok(self.winner(&StateVector::initial(n, self.lies), q)? == Winner::Paul)
        };
        // n = 2^q always wins, n = 0 never does; covering monotonicity makes
        // the predicate monotone in n.
        let mut hi = 1u64;
        let mut lo = 0u64;
        while !wins(hi)? {
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if wins(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Maximum `n` such that Paul wins `((n, 0, ..., 0), q, k)`.
    pub fn f_original(&self, q: u32) -> Result<u64> {
        if self.variant != GameVariant::Original {
            return Err(Error::Domain("f_original needs an original-game solver".into()));
        }
        check_tractable(q, self.lies, self.config.question_budget)?;
        let wins = |n: u64| -> Result<bool> {
            Ok(self.winner(&StateVector::initial(n, self.lies), q)? == Winner::Paul)
        };
        // n = 1 always wins; n > 2^q / C(q, <= k) never does.
        let mut lo = 1u64;
        let mut hi = 2u64;
        while wins(hi)? {
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if wins(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Writes the memo as `k q x0,...,xk winner` lines, sorted, after a
    /// `# variant=<name>` header.
    pub fn dump_memo<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut entries: Vec<(u32, StateVector, bool)> = self
            .memo
            .iter()
            .map(|e| (e.key().0, e.key().1.clone(), *e.value()))
            .collect();
        entries.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        writeln!(w, "# variant={}", self.variant)?;
        for (q, x, paul) in entries {
            writeln!(w, "{} {} {} {}", self.lies, q, x, Winner::from_paul_wins(paul))?;
        }
        Ok(())
    }

    /// Loads entries written by [`Solver::dump_memo`]; returns how many were read.
    pub fn load_memo<R: BufRead>(&self, r: R) -> Result<usize> {
        let mut loaded = 0;
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Format(e.to_string()))?;
            let bad = |what: &str| Error::Format(format!("line {}: {what}: {line:?}", lineno + 1));
            if let Some(header) = line.strip_prefix("# variant=") {
                let v: GameVariant = header.parse().map_err(|_| bad("unknown variant"))?;
                if v != self.variant {
                    return Err(bad("variant does not match solver"));
                }
                continue;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(' ').collect();
            let [k, q, x, winner] = fields[..] else {
                return Err(bad("expected 4 fields"));
            };
            let k: usize = k.parse().map_err(|_| bad("bad k"))?;
            if k != self.lies {
                return Err(bad("k out of range for this solver"));
            }
            let q: u32 = q.parse().map_err(|_| bad("bad q"))?;
            if q > MAX_ROUNDS {
                return Err(bad("q out of range"));
            }
            let x: StateVector = x.parse().map_err(|_| bad("bad state"))?;
            if x.lies() != k {
                return Err(bad("state length does not match k"));
            }
            let paul = match winner {
                "Paul" => true,
                "Carole" => false,
                _ => return Err(bad("bad winner")),
            };
            self.memo.insert((q, x), paul);
            loaded += 1;
        }
        Ok(loaded)
    }
}

/// One-shot solve of a game specification.
pub fn solve(spec: &GameSpec, want_tree: bool, config: SolverConfig) -> Result<SolveOutcome> {
    Solver::new(spec.variant, spec.lies(), config).solve(&spec.initial, spec.rounds, want_tree)
}

pub fn max_winning_rounds(
    x: &StateVector,
    variant: GameVariant,
    config: SolverConfig,
) -> Result<Option<u32>> {
    Solver::new(variant, x.lies(), config).max_winning_rounds(x)
}

pub fn f_star(q: u32, k: usize, config: SolverConfig) -> Result<u64> {
    Solver::new(GameVariant::Pathological, k, config).f_star(q)
}

pub fn f_original(q: u32, k: usize, config: SolverConfig) -> Result<u64> {
    Solver::new(GameVariant::Original, k, config).f_original(q)
}
