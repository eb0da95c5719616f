//! Line-oriented play: the engine is Paul, the user answers as Carole.

use std::io::{BufRead, Write};

use ulam_core::closed_forms::paul_wins_1lie_pathological;
use ulam_core::solver::check_tractable;
use ulam_core::strategy::{one_lie_full_policy, two_lie_full_policy};
use ulam_core::{pow2, transition, weight, GameSpec, GameVariant, Policy, Response, Solver, SolverConfig};

use crate::Failure;

pub fn run(spec: &GameSpec, config: SolverConfig, input: &mut impl BufRead, out: &mut impl Write) -> Result<(), Failure> {
    let x = &spec.initial;
    let (k, q) = (spec.lies(), spec.rounds);
    if check_tractable(q, k, config.question_budget).is_ok() {
        return play(&Solver::new(spec.variant, k, config), spec, input, out);
    }
    // past the solver's reach, fall back on the constructive policies
    let fresh = spec.variant == GameVariant::Pathological && x.counts()[1..].iter().all(|&c| c == 0);
    if fresh && k == 1 && paul_wins_1lie_pathological(x.get(0), q)? {
        return play(&one_lie_full_policy(x.get(0), q)?, spec, input, out);
    }
    if fresh && k == 2 {
        if let Ok(policy) = two_lie_full_policy(x.get(0), q) {
            return play(&policy, spec, input, out);
        }
    }
    check_tractable(q, k, config.question_budget)?;
    unreachable!("intractable positions return above")
}

fn play<P: Policy>(policy: &P, spec: &GameSpec, input: &mut impl BufRead, out: &mut impl Write) -> Result<(), Failure> {
    let q = spec.rounds;
    writeln!(out, "game: {} x={} rounds={} lies={}", spec.variant, spec.initial, q, spec.lies())?;
    let mut memory = policy.start(spec)?;
    let mut state = spec.initial.clone();
    for j in (1..=q).rev() {
        let a = policy.question(&memory, &state, j)?;
        writeln!(out, "round {}/{q}: question {a}", q - j + 1)?;
        let response = loop {
            write!(out, "> ")?;
            out.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                writeln!(out)?;
                writeln!(out, "result: Paul wins (Carole resigned)")?;
                return Ok(());
            }
            match line.trim().to_ascii_lowercase().as_str() {
                "y" | "yes" => break Response::Y,
                "n" | "no" => break Response::N,
                "hint" => writeln!(out, "hint: weight {} vs 2^{j} = {}", weight(j, &state)?, pow2(j)?)?,
                other => writeln!(out, "unrecognized input {other:?}; type Y, N or hint")?,
            }
        };
        let next = transition(&state, &a, response)?;
        policy.observe(&mut memory, &a, response, &next, j - 1)?;
        state = next;
        writeln!(out, "state: {state}")?;
    }
    let winner = if spec.variant.paul_wins_at_horizon(&state) { "Paul" } else { "Carole" };
    writeln!(out, "result: {winner} wins")?;
    Ok(())
}
