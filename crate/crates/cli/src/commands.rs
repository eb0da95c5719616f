use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::Path;

use rand::rngs::StdRng;
use rand::SeedableRng;
use ulam_core::closed_forms::f_star_closed;
use ulam_core::quasiball::{
    parse_certificate, strategy_to_covering, validate_collection, write_certificate, CollectionReport,
};
use ulam_core::solver::check_tractable;
use ulam_core::strategy::{
    fictitious_simulation, one_lie_full_policy, random_admissible_state, two_lie_full_policy,
    verify_policy, FictitiousOptions, VerifyOptions,
};
use ulam_core::tree::path_string;
use ulam_core::{
    pow2, sphere_bound, weight, DecisionTree, Error, GameSpec, GameVariant, QuasiballCollection,
    Solver, SolverConfig, StateVector, Winner,
};

use crate::{
    play, CacheAction, Cli, Command, Failure, PolicyKind, Position, TableMode, EXIT_FAILED,
    EXIT_FLAGS, EXIT_NO_STRATEGY, EXIT_REFUSED,
};

pub fn run(cli: &Cli, threads: usize) -> Result<u8, Failure> {
    let config = SolverConfig {
        threads,
        question_budget: cli.budget,
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Solve { pos, tree, cache } => solve(&mut out, pos, config, tree.as_deref(), cache.as_deref()),
        Command::Table {
            lies,
            max_rounds,
            mode,
            bounds,
        } => table(&mut out, *lies, *max_rounds, *mode, *bounds, config),
        Command::VerifyPolicy {
            kind,
            n,
            rounds,
            failure_cap,
        } => verify(&mut out, *kind, *n, *rounds, *failure_cap, threads),
        Command::Cover { pos, out: path } => cover(&mut out, pos, config, path.as_deref()),
        Command::CheckCover { path } => check_cover(&mut out, path),
        Command::Play { pos } => {
            let spec = spec(pos)?;
            let stdin = io::stdin();
            play::run(&spec, config, &mut stdin.lock(), &mut out)?;
            Ok(0)
        }
        Command::Fictitious {
            state,
            rounds,
            branches,
        } => fictitious(&mut out, state.clone(), *rounds, *branches, cli.seed),
        Command::Cache { action } => cache(&mut out, action, config),
    }
}

pub fn spec(pos: &Position) -> Result<GameSpec, Failure> {
    let k = pos.state.lies();
    if let Some(lies) = pos.lies {
        if lies != k {
            return Err(Failure::new(
                EXIT_FLAGS,
                format!("--lies {lies} does not match --state {} ({} entries)", pos.state, k + 1),
            ));
        }
    }
    GameSpec::new(pos.variant.into(), pos.state.clone(), pos.rounds, k).map_err(Failure::from)
}

fn solver_for(spec: &GameSpec, config: SolverConfig) -> Result<Solver, Failure> {
    check_tractable(spec.rounds, spec.lies(), config.question_budget)?;
    Ok(Solver::new(spec.variant, spec.lies(), config))
}

fn write_tree(tree: &DecisionTree) -> String {
    // one line per node in depth-first order: path, state, question (internal only)
    let mut text = String::new();
    let mut stack = vec![(0usize, Vec::new())];
    while let Some((id, path)) = stack.pop() {
        let node = tree.node(id);
        let p = if path.is_empty() { "-".to_string() } else { path_string(&path) };
        match &node.question {
            Some(a) => writeln!(text, "{p} {} ask {a}", node.state),
            None => writeln!(text, "{p} {}", node.state),
        }
        .expect("string write");
        if let Some((n, y)) = node.children {
            let mut py = path.clone();
            py.push(ulam_core::Response::Y);
            stack.push((y, py));
            let mut pn = path;
            pn.push(ulam_core::Response::N);
            stack.push((n, pn));
        }
    }
    text
}

fn solve(
    out: &mut impl Write,
    pos: &Position,
    config: SolverConfig,
    tree_path: Option<&Path>,
    cache: Option<&Path>,
) -> Result<u8, Failure> {
    let spec = spec(pos)?;
    let solver = solver_for(&spec, config)?;
    if let Some(path) = cache.filter(|p| p.exists()) {
        let n = solver.load_memo(BufReader::new(fs::File::open(path)?))?;
        writeln!(out, "cache_loaded: {n}")?;
    }
    let outcome = solver.solve(&spec.initial, spec.rounds, tree_path.is_some())?;
    writeln!(out, "variant: {}", spec.variant)?;
    writeln!(out, "state: {}", spec.initial)?;
    writeln!(out, "rounds: {}", spec.rounds)?;
    writeln!(out, "lies: {}", spec.lies())?;
    writeln!(out, "weight: {}", weight(spec.rounds, &spec.initial)?)?;
    writeln!(out, "capacity: {}", pow2(spec.rounds)?)?;
    writeln!(out, "winner: {}", outcome.winner)?;
    writeln!(out, "visited: {}", outcome.stats.visited)?;
    writeln!(out, "memo_hits: {}", outcome.stats.memo_hits)?;
    writeln!(out, "peak_memo: {}", outcome.stats.peak_memo)?;
    writeln!(out, "questions: {}", outcome.stats.questions)?;
    if let (Some(path), Some(tree)) = (tree_path, &outcome.strategy) {
        fs::write(path, write_tree(tree))?;
        writeln!(out, "tree: {}", path.display())?;
    }
    if let Some(path) = cache {
        solver.dump_memo(io::BufWriter::new(fs::File::create(path)?))?;
        writeln!(out, "cache_saved: {}", solver.memo_len())?;
    }
    Ok(0)
}

fn table(
    out: &mut impl Write,
    lies: usize,
    max_rounds: u32,
    mode: TableMode,
    bounds: bool,
    config: SolverConfig,
) -> Result<u8, Failure> {
    if mode != TableMode::Dp && !(1..=2).contains(&lies) {
        return Err(Failure::new(EXIT_FLAGS, format!("--mode formula needs --lies 1 or 2, got {lies}")));
    }
    let solver = Solver::new(GameVariant::Pathological, lies, config);
    let mut header = vec!["q"];
    if mode != TableMode::Dp {
        header.push("formula");
    }
    if mode != TableMode::Formula {
        header.push("dp");
    }
    if bounds {
        header.extend(["sphere_bound", "gap"]);
    }
    writeln!(out, "# {}", header.join(" "))?;
    let mut mismatches = 0;
    for q in 1..=max_rounds {
        let formula = match mode {
            TableMode::Dp => None,
            _ => Some(f_star_closed(q, lies)?),
        };
        let dp = match mode {
            TableMode::Formula => None,
            _ => match check_tractable(q, lies, config.question_budget) {
                Ok(()) => Some(solver.f_star(q)?),
                Err(Error::BudgetExceeded { .. } | Error::Capacity(_)) => {
                    writeln!(out, "{q} skipped")?;
                    continue;
                }
                Err(e) => return Err(e.into()),
            },
        };
        let mut row = vec![q.to_string()];
        row.extend(formula.iter().chain(dp.iter()).map(u64::to_string));
        if bounds {
            let sb = sphere_bound(q, lies as u32)?;
            let f = formula.or(dp).expect("a value") as u128;
            row.push(sb.to_string());
            row.push((f - sb).to_string());
        }
        writeln!(out, "{}", row.join(" "))?;
        if let (Some(f), Some(d)) = (formula, dp) {
            if f != d {
                writeln!(out, "error: q={q} formula {f} != dp {d}")?;
                mismatches += 1;
            }
        }
    }
    Ok(if mismatches > 0 { EXIT_FAILED } else { 0 })
}

fn refused(e: Error) -> Failure {
    match e {
        Error::Domain(m) | Error::StrategyInapplicable(m) => Failure::new(EXIT_REFUSED, format!("policy refused: {m}")),
        e => e.into(),
    }
}

fn verify(
    out: &mut impl Write,
    kind: PolicyKind,
    n: u64,
    rounds: u32,
    failure_cap: usize,
    threads: usize,
) -> Result<u8, Failure> {
    let options = VerifyOptions { failure_cap, threads };
    let spec = |k| GameSpec::new(GameVariant::Pathological, StateVector::initial(n, k), rounds, k);
    let report = match kind {
        PolicyKind::OneLie => {
            let policy = one_lie_full_policy(n, rounds).map_err(refused)?;
            verify_policy(&spec(1)?, &policy, options).map_err(refused)?
        }
        PolicyKind::TwoLie => {
            let policy = two_lie_full_policy(n, rounds).map_err(refused)?;
            verify_policy(&spec(2)?, &policy, options).map_err(refused)?
        }
    };
    write!(out, "{report}")?;
    let verdict = if report.all_win() { "win" } else { "loss" };
    writeln!(out, "summary: {}/{} branches: {verdict}", report.wins, report.branches)?;
    Ok(if report.all_win() { 0 } else { EXIT_FAILED })
}

fn print_collection(out: &mut impl Write, coll: &QuasiballCollection, report: &CollectionReport) -> io::Result<()> {
    writeln!(out, "x: {}", coll.x)?;
    writeln!(out, "lies: {}", coll.lies())?;
    write!(out, "{report}")?;
    writeln!(out, "vertices: {}", 1u64 << coll.q)?;
    writeln!(out, "result: {}", if report.is_valid() { "pass" } else { "fail" })
}

fn cover(out: &mut impl Write, pos: &Position, config: SolverConfig, path: Option<&Path>) -> Result<u8, Failure> {
    let spec = spec(pos)?;
    let solver = solver_for(&spec, config)?;
    if solver.winner(&spec.initial, spec.rounds)? == Winner::Carole {
        return Err(Failure::new(
            EXIT_NO_STRATEGY,
            format!("no winning strategy exists for ({}, {}, {})", spec.initial, spec.rounds, spec.lies()),
        ));
    }
    let tree = solver.extract_tree(&spec.initial, spec.rounds)?;
    let coll = strategy_to_covering(&tree, &spec)?;
    let report = validate_collection(&coll)?;
    if let Some(path) = path {
        fs::write(path, write_certificate(&coll))?;
        writeln!(out, "certificate: {}", path.display())?;
    }
    print_collection(out, &coll, &report)?;
    Ok(if report.is_valid() { 0 } else { EXIT_FAILED })
}

fn check_cover(out: &mut impl Write, path: &Path) -> Result<u8, Failure> {
    let text = fs::read_to_string(path)?;
    let coll = parse_certificate(&text)?;
    let report = validate_collection(&coll)?;
    print_collection(out, &coll, &report)?;
    Ok(if report.is_valid() { 0 } else { EXIT_FAILED })
}

fn fictitious(out: &mut impl Write, state: Option<StateVector>, q: u32, branches: u64, seed: u64) -> Result<u8, Failure> {
    let x = match state {
        Some(x) => x,
        None => random_admissible_state(q, &mut StdRng::seed_from_u64(seed))?,
    };
    let trace = fictitious_simulation(&x, q, FictitiousOptions { branch_budget: branches, seed })?;
    writeln!(out, "state: {x}")?;
    writeln!(out, "rounds: {q}")?;
    writeln!(out, "seed: {seed}")?;
    writeln!(out, "exhaustive: {}", if trace.exhaustive { "yes" } else { "no" })?;
    writeln!(out, "branches: {}", trace.branches)?;
    for l in &trace.levels {
        writeln!(
            out,
            "level {}: max_e {},{},{} max_e01 {} max_fic0 {} min_fic2 {}",
            l.j, l.max_e[0], l.max_e[1], l.max_e[2], l.max_e01, l.max_fic0, l.min_fic2
        )?;
    }
    for (s, count) in &trace.endgame {
        writeln!(out, "endgame {},{},{}: {count}", s[0], s[1], s[2])?;
    }
    writeln!(out, "e2_above_binomial_plus_5: {}", trace.tight_e2_excesses)?;
    writeln!(out, "max_e2_excess: {}", trace.max_tight_e2_excess)?;
    writeln!(out, "result: pass")?;
    Ok(0)
}

fn cache(out: &mut impl Write, action: &CacheAction, config: SolverConfig) -> Result<u8, Failure> {
    match action {
        CacheAction::Dump { pos, out: path } => {
            let spec = spec(pos)?;
            let solver = solver_for(&spec, config)?;
            let winner = solver.winner(&spec.initial, spec.rounds)?;
            solver.dump_memo(io::BufWriter::new(fs::File::create(path)?))?;
            writeln!(out, "winner: {winner}")?;
            writeln!(out, "entries: {}", solver.memo_len())?;
            writeln!(out, "path: {}", path.display())?;
        }
        CacheAction::Load { variant, lies, path } => {
            let solver = Solver::new((*variant).into(), *lies, config);
            let n = solver.load_memo(BufReader::new(fs::File::open(path)?))?;
            writeln!(out, "entries: {n}")?;
            writeln!(out, "distinct: {}", solver.memo_len())?;
        }
    }
    Ok(0)
}
