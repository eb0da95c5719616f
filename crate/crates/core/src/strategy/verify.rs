use std::fmt;

use rayon::prelude::*;

use super::Policy;
use crate::error::{Error, Result};
use crate::game::{pow2, transition, weight, GameSpec, GameVariant, QuestionVector, Response, StateVector};
use crate::solver::Solver;
use crate::tree::{path_string, DecisionTree};

pub const MAX_VERIFY_ROUNDS: u32 = 28;

/// Depth at which the answer tree is split across threads.
const SPLIT_DEPTH: u32 = 10;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// How many losing sequences to keep verbatim.
    pub failure_cap: usize,
    /// Worker threads; 0 uses the global rayon pool.
    pub threads: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            failure_cap: 32,
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub variant: GameVariant,
    pub initial: StateVector,
    pub rounds: u32,
    pub branches: u64,
    pub wins: u64,
    /// The lexicographically first losing sequences (N before Y), capped.
    pub failures: Vec<Vec<Response>>,
    /// Fewest elements left at any leaf.
    pub min_survivors: u64,
    /// Per depth `d`, the least `wt_{q-d}(x) - 2^(q-d)` over visited states.
    pub min_margin: Vec<Option<i128>>,
}

impl VerificationReport {
    pub fn losses(&self) -> u64 {
        self.branches - self.wins
    }

    pub fn all_win(&self) -> bool {
        self.wins == self.branches
    }

    pub fn first_loss(&self) -> Option<&[Response]> {
        self.failures.first().map(Vec::as_slice)
    }

    fn empty(spec: &GameSpec) -> Self {
        VerificationReport {
            variant: spec.variant,
            initial: spec.initial.clone(),
            rounds: spec.rounds,
            branches: 0,
            wins: 0,
            failures: Vec::new(),
            min_survivors: u64::MAX,
            min_margin: vec![None; spec.rounds as usize + 1],
        }
    }

    /// Appends a report covering the next block of sequences in order.
    fn absorb(&mut self, other: VerificationReport, cap: usize) {
        self.branches += other.branches;
        self.wins += other.wins;
        let room = cap.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
        self.min_survivors = self.min_survivors.min(other.min_survivors);
        for (m, o) in self.min_margin.iter_mut().zip(other.min_margin) {
            *m = match (*m, o) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
        }
    }

    fn margin(&mut self, depth: usize, value: i128) {
        let m = &mut self.min_margin[depth];
        *m = Some(m.map_or(value, |v| v.min(value)));
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "variant: {}", self.variant)?;
        writeln!(f, "initial: {}", self.initial)?;
        writeln!(f, "rounds: {}", self.rounds)?;
        writeln!(f, "branches: {}", self.branches)?;
        writeln!(f, "wins: {}", self.wins)?;
        writeln!(f, "losses: {}", self.losses())?;
        writeln!(f, "result: {}", if self.all_win() { "paul" } else { "carole" })?;
        match self.min_survivors {
            u64::MAX => writeln!(f, "min_survivors: -")?,
            s => writeln!(f, "min_survivors: {s}")?,
        }
        let margins: Vec<String> = self
            .min_margin
            .iter()
            .map(|m| m.map_or("-".into(), |v| v.to_string()))
            .collect();
        writeln!(f, "min_margin: {}", margins.join(","))?;
        match self.first_loss() {
            Some(p) => writeln!(f, "first_loss: {}", path_string(p))?,
            None => writeln!(f, "first_loss: -")?,
        }
        for p in &self.failures {
            writeln!(f, "lost: {}", path_string(p))?;
        }
        Ok(())
    }
}

struct Walker<'a, P: Policy> {
    policy: &'a P,
    spec: &'a GameSpec,
    cap: usize,
}

struct Frontier<M> {
    path: Vec<Response>,
    state: StateVector,
    memory: M,
}

impl<P: Policy> Walker<'_, P> {
    /// Zero pathological states lose and original states with at most one
    /// element win, whatever is asked afterwards.
    fn settled(&self, x: &StateVector) -> Option<bool> {
        match self.spec.variant {
            GameVariant::Pathological if x.is_zero() => Some(false),
            GameVariant::Original if x.total() <= 1 => Some(true),
            _ => None,
        }
    }

    fn settle(&self, acc: &mut VerificationReport, path: &[Response], j: u32, x: &StateVector, win: bool) {
        let count = 1u64 << j;
        acc.branches += count;
        acc.min_survivors = acc.min_survivors.min(x.total());
        if win {
            acc.wins += count;
            return;
        }
        let room = self.cap.saturating_sub(acc.failures.len()) as u64;
        for code in 0..count.min(room) {
            let mut p = path.to_vec();
            p.extend((0..j).rev().map(|b| if code >> b & 1 == 1 { Response::Y } else { Response::N }));
            acc.failures.push(p);
        }
    }

    fn ask(
        &self,
        memory: &P::Memory,
        x: &StateVector,
        j: u32,
        path: &[Response],
    ) -> Result<QuestionVector> {
        let a = self.policy.question(memory, x, j)?;
        if !a.is_legal_for(x) {
            return Err(Error::Verification(format!(
                "round {}: policy asked {a} at state {x} after '{}'",
                self.spec.rounds - j + 1,
                path_string(path)
            )));
        }
        Ok(a)
    }

    fn record(&self, acc: &mut VerificationReport, depth: usize, j: u32, x: &StateVector) -> Result<()> {
        acc.margin(depth, weight(j, x)? as i128 - pow2(j)? as i128);
        Ok(())
    }

    fn dfs(
        &self,
        acc: &mut VerificationReport,
        path: &mut Vec<Response>,
        x: &StateVector,
        memory: &P::Memory,
        j: u32,
    ) -> Result<()> {
        self.record(acc, path.len(), j, x)?;
        if let Some(win) = self.settled(x) {
            self.settle(acc, path, j, x, win);
            return Ok(());
        }
        if j == 0 {
            acc.branches += 1;
            acc.min_survivors = acc.min_survivors.min(x.total());
            if self.spec.variant.paul_wins_at_horizon(x) {
                acc.wins += 1;
            } else if acc.failures.len() < self.cap {
                acc.failures.push(path.clone());
            }
            return Ok(());
        }
        let a = self.ask(memory, x, j, path)?;
        for r in Response::BOTH {
            let next = transition(x, &a, r)?;
            let mut m = memory.clone();
            self.policy.observe(&mut m, &a, r, &next, j - 1)?;
            path.push(r);
            self.dfs(acc, path, &next, &m, j - 1)?;
            path.pop();
        }
        Ok(())
    }

    /// Expands the first `depth` rounds breadth-first, in answer order.
    fn frontier(
        &self,
        acc: &mut VerificationReport,
        memory: P::Memory,
        depth: u32,
    ) -> Result<Vec<Frontier<P::Memory>>> {
        let mut level = vec![Frontier {
            path: Vec::new(),
            state: self.spec.initial.clone(),
            memory,
        }];
        for d in 0..depth {
            let j = self.spec.rounds - d;
            let mut next_level = Vec::with_capacity(level.len() * 2);
            for node in level {
                // settled subtrees pass through untouched; dfs counts them at once
                if node.path.len() < d as usize || self.settled(&node.state).is_some() {
                    next_level.push(node);
                    continue;
                }
                self.record(acc, d as usize, j, &node.state)?;
                let a = self.ask(&node.memory, &node.state, j, &node.path)?;
                for r in Response::BOTH {
                    let state = transition(&node.state, &a, r)?;
                    let mut memory = node.memory.clone();
                    self.policy.observe(&mut memory, &a, r, &state, j - 1)?;
                    let mut path = node.path.clone();
                    path.push(r);
                    next_level.push(Frontier { path, state, memory });
                }
            }
            level = next_level;
        }
        Ok(level)
    }
}

/// Plays `policy` against every answer sequence of `spec` and reports the
/// outcome of each. Illegal questions abort with a verification error.
pub fn verify_policy<P: Policy>(spec: &GameSpec, policy: &P, options: VerifyOptions) -> Result<VerificationReport> {
    if spec.rounds > MAX_VERIFY_ROUNDS {
        return Err(Error::BudgetExceeded {
            dimension: "branches",
            estimate: 1u128 << spec.rounds,
            budget: 1u128 << MAX_VERIFY_ROUNDS,
        });
    }
    let walker = Walker {
        policy,
        spec,
        cap: options.failure_cap,
    };
    let memory = policy.start(spec)?;
    let mut report = VerificationReport::empty(spec);
    let split = spec.rounds.min(SPLIT_DEPTH);
    let frontier = walker.frontier(&mut report, memory, split)?;
    let run = || -> Result<Vec<VerificationReport>> {
        frontier
            .into_par_iter()
            .map(|node| {
                let mut acc = VerificationReport::empty(spec);
                let mut path = node.path;
                let j = spec.rounds - path.len() as u32;
                walker.dfs(&mut acc, &mut path, &node.state, &node.memory, j)?;
                Ok(acc)
            })
            .collect()
    };
    let parts = if options.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(options.threads)
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?
            .install(run)?
    } else {
        run()?
    };
    for part in parts {
        report.absorb(part, options.failure_cap);
    }
    Ok(report)
}

/// Replays a decision tree.
pub struct TreePolicy<'a> {
    tree: &'a DecisionTree,
}

impl<'a> TreePolicy<'a> {
    pub fn new(tree: &'a DecisionTree) -> Self {
        TreePolicy { tree }
    }
}

impl Policy for TreePolicy<'_> {
    type Memory = usize;

    fn start(&self, spec: &GameSpec) -> Result<usize> {
        if self.tree.root().state != spec.initial || self.tree.depth() != spec.rounds {
            return Err(Error::Domain(format!(
                "tree is for ({}, {}), game is ({}, {})",
                self.tree.root().state,
                self.tree.depth(),
                spec.initial,
                spec.rounds
            )));
        }
        Ok(0)
    }

    fn question(&self, node: &usize, _: &StateVector, _: u32) -> Result<QuestionVector> {
        self.tree
            .node(*node)
            .question
            .clone()
            .ok_or_else(|| Error::Verification(format!("tree node {node} has no question")))
    }

    fn observe(&self, node: &mut usize, _: &QuestionVector, r: Response, _: &StateVector, _: u32) -> Result<()> {
        *node = self
            .tree
            .child(*node, r)
            .ok_or_else(|| Error::Verification(format!("tree node {node} has no children")))?;
        Ok(())
    }
}

/// Exact-solver moves: a winning question where one exists, otherwise the
/// first candidate.
impl Policy for Solver {
    type Memory = ();

    fn start(&self, spec: &GameSpec) -> Result<()> {
        if spec.variant != self.variant() || spec.lies() != self.lies() {
            return Err(Error::Domain(format!(
                "solver is for the {} game with {} lies",
                self.variant(),
                self.lies()
            )));
        }
        Ok(())
    }

    fn question(&self, _: &(), state: &StateVector, rounds_remaining: u32) -> Result<QuestionVector> {
        self.best_effort_question(state, rounds_remaining)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SolverConfig;
    use crate::strategy::one_lie_full_policy;

    fn spec(variant: GameVariant, x: &str, q: u32) -> GameSpec {
        let x: StateVector = x.parse().unwrap();
        let k = x.lies();
        GameSpec::new(variant, x, q, k).unwrap()
    }

    #[test]
    fn one_lie_four_elements() {
        let s = spec(GameVariant::Pathological, "4,0", 4);
        let report = verify_policy(&s, &one_lie_full_policy(4, 4).unwrap(), VerifyOptions::default()).unwrap();
        assert_eq!((report.branches, report.wins), (16, 16));
        assert!(report.first_loss().is_none());
    }

    #[test]
    fn losing_position_has_a_losing_branch() {
        let s = spec(GameVariant::Pathological, "3,1", 4);
        let solver = Solver::new(GameVariant::Pathological, 1, SolverConfig::default());
        let report = verify_policy(&s, &solver, VerifyOptions::default()).unwrap();
        assert!(!report.all_win());
        assert_eq!(report.branches, 16);
        let text = report.to_string();
        assert!(text.contains("result: carole"));
        assert!(text.contains(&format!("first_loss: {}", path_string(report.first_loss().unwrap()))));
    }

    #[test]
    fn zero_rounds_is_one_branch() {
        let s = spec(GameVariant::Pathological, "1", 0);
        let tree = DecisionTree::build("1".parse().unwrap(), 0, |_, _| unreachable!()).unwrap();
        let report = verify_policy(&s, &TreePolicy::new(&tree), VerifyOptions::default()).unwrap();
        assert_eq!((report.branches, report.wins), (1, 1));
    }

    #[test]
    fn solver_trees_verify_and_failures_are_ordered() {
        let solver = Solver::new(GameVariant::Pathological, 2, SolverConfig::default());
        let s = spec(GameVariant::Pathological, "90,0,0", 13);
        let tree = solver.extract_tree(&s.initial, 13).unwrap();
        let opts = VerifyOptions { failure_cap: 8, threads: 2 };
        let report = verify_policy(&s, &TreePolicy::new(&tree), opts).unwrap();
        assert!(report.all_win());
        assert_eq!(report.min_margin[0], Some(weight(13, &s.initial).unwrap() as i128 - 8192));

        let s = spec(GameVariant::Pathological, "89,0,0", 13);
        let report = verify_policy(&s, &solver, opts).unwrap();
        assert!(!report.all_win());
        assert_eq!(report.failures.len(), 8);
        assert!(report.failures.windows(2).all(|w| w[0] < w[1]));
        // the same reduction with one thread
        let serial = verify_policy(&s, &solver, VerifyOptions { failure_cap: 8, threads: 1 }).unwrap();
        assert_eq!(serial, report);
    }

    #[test]
    fn illegal_question_is_reported() {
        struct Greedy;
        impl Policy for Greedy {
            type Memory = ();
            fn start(&self, _: &GameSpec) -> Result<()> {
                Ok(())
            }
            fn question(&self, _: &(), x: &StateVector, _: u32) -> Result<QuestionVector> {
                Ok(QuestionVector::new(x.counts().iter().map(|c| c + 1)))
            }
        }
        let s = spec(GameVariant::Pathological, "2,0", 2);
        let err = verify_policy(&s, &Greedy, VerifyOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Verification(m) if m.contains("round 1") && m.contains("2,0")));
    }

    #[test]
    fn too_many_rounds_refused() {
        let s = spec(GameVariant::Pathological, "1,0", 29);
        let solver = Solver::new(GameVariant::Pathological, 1, SolverConfig::default());
        assert!(matches!(
            verify_policy(&s, &solver, VerifyOptions::default()),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
