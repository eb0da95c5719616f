use std::collections::BTreeMap;

use super::{validate_collection, CoverMode, LieSet, Quasiball, QuasiballCollection, Vertex, MAX_DIMENSION};
use crate::error::{Error, Result};
use crate::game::{GameSpec, GameVariant, QuestionVector, Response, StateVector};
use crate::tree::{path_string, DecisionTree, TreeNode};

fn mode_for(variant: GameVariant) -> CoverMode {
    match variant {
        GameVariant::Pathological => CoverMode::Covering,
        GameVariant::Original => CoverMode::Packing,
    }
}

/// A labeled element during replay: its starting class and lies so far.
#[derive(Debug, Clone, Copy)]
struct Tracked {
    label: usize,
    class: usize,
    lies: LieSet,
}

struct Extraction<'a> {
    tree: &'a DecisionTree,
    q: u32,
    k: usize,
    maps: Vec<BTreeMap<LieSet, Vertex>>,
}

impl Extraction<'_> {
    fn walk(&mut self, id: usize, depth: u32, path: u32, alive: Vec<Tracked>) -> Result<()> {
        let node = self.tree.node(id);
        let (Some(question), Some((n_id, y_id))) = (&node.question, node.children) else {
            for t in alive {
                let vertex = Vertex::new(self.q, path)?;
                self.maps[t.label].insert(t.lies, vertex);
            }
            return Ok(());
        };
        // within each lie class the lowest labels are the ones asked about
        let mut left = question.entries().to_vec();
        let mut asked = Vec::with_capacity(alive.len());
        for t in &alive {
            let cls = t.lies.len() as usize + t.class;
            asked.push(left[cls] > 0);
            left[cls] = left[cls].saturating_sub(1);
        }
        if left.iter().any(|&c| c > 0) {
            return Err(Error::Verification(format!("question {question} exceeds the tracked elements at node {id}")));
        }
        let position = depth + 1;
        for (r, child) in [(Response::N, n_id), (Response::Y, y_id)] {
            let yes = r == Response::Y;
            let next: Vec<Tracked> = alive
                .iter()
                .zip(&asked)
                .filter_map(|(t, &in_set)| {
                    let lies = if in_set == yes { t.lies } else { t.lies.with(position) };
                    (t.class + lies.len() as usize <= self.k).then_some(Tracked { lies, ..*t })
                })
                .collect();
            self.walk(child, depth + 1, path << 1 | yes as u32, next)?;
        }
        Ok(())
    }
}

/// Reads off, for each element, the response sequences of the leaves where
/// it survives, indexed by the positions of its lies. A winning strategy
/// yields a covering (pathological) or packing (original) of `Q_q`.
pub fn strategy_to_covering(tree: &DecisionTree, spec: &GameSpec) -> Result<QuasiballCollection> {
    let q = spec.rounds;
    if q > MAX_DIMENSION {
        return Err(Error::BudgetExceeded {
            dimension: "dimension",
            estimate: q as u128,
            budget: MAX_DIMENSION as u128,
        });
    }
    if tree.root().state != spec.initial || tree.depth() != q {
        return Err(Error::Domain(format!(
            "tree is for ({}, {}), game is ({}, {q})",
            tree.root().state,
            tree.depth(),
            spec.initial
        )));
    }
    tree.validate()?;
    if let Some(path) = tree.first_losing_leaf(spec.variant) {
        return Err(Error::Domain(format!(
            "strategy loses the {} game at leaf '{}'",
            spec.variant,
            path_string(&path)
        )));
    }
    let k = spec.lies();
    let mut alive = Vec::new();
    for (class, &count) in spec.initial.counts().iter().enumerate() {
        for _ in 0..count {
            alive.push(Tracked {
                label: alive.len(),
                class,
                lies: LieSet::EMPTY,
            });
        }
    }
    let mut ex = Extraction {
        tree,
        q,
        k,
        maps: vec![BTreeMap::new(); alive.len()],
    };
    let classes: Vec<usize> = alive.iter().map(|t| t.class).collect();
    ex.walk(0, 0, 0, alive)?;
    let balls = ex
        .maps
        .into_iter()
        .zip(classes)
        .map(|(map, class)| Quasiball::new(q, (k - class) as u32, map))
        .collect::<Result<Vec<_>>>()?;
    let coll = QuasiballCollection {
        q,
        x: spec.initial.clone(),
        mode: mode_for(spec.variant),
        balls,
    };
    let report = validate_collection(&coll)?;
    if let Some(f) = report.failure {
        return Err(Error::Verification(format!("extracted {} is invalid: {f}", coll.mode)));
    }
    Ok(coll)
}

struct Builder {
    k: usize,
    nodes: Vec<TreeNode>,
}

impl Builder {
    fn state(&self, balls: &[Quasiball]) -> Result<StateVector> {
        let mut counts = vec![0u64; self.k + 1];
        for b in balls {
            counts[self.k - b.radius() as usize] += 1;
        }
        StateVector::new(counts)
    }

    /// Adds the subtree for `balls` (each in `Q_j`) and returns its index.
    fn build(&mut self, balls: Vec<Quasiball>, j: u32) -> Result<usize> {
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            state: self.state(&balls)?,
            question: None,
            children: None,
        });
        if j == 0 {
            return Ok(id);
        }
        let mut a = vec![0u64; self.k + 1];
        for b in &balls {
            if b.stem().is_some_and(|s| s.is_yes(1)) {
                a[self.k - b.radius() as usize] += 1;
            }
        }
        let no = balls.iter().filter_map(|b| b.descend(false)).collect();
        let yes = balls.iter().filter_map(|b| b.descend(true)).collect();
        drop(balls);
        let n_id = self.build(no, j - 1)?;
        let y_id = self.build(yes, j - 1)?;
        self.nodes[id].question = Some(QuestionVector::new(a));
        self.nodes[id].children = Some((n_id, y_id));
        Ok(id)
    }
}

/// Builds Paul's strategy from a validated covering (pathological game) or
/// packing (original game): an element is asked about iff its ball's stem
/// starts with `Y`, and each answer restricts every ball to the matching
/// half of the cube.
pub fn covering_to_strategy(coll: &QuasiballCollection, variant: GameVariant) -> Result<DecisionTree> {
    if coll.mode != mode_for(variant) {
        return Err(Error::Domain(format!(
            "a {} does not describe a strategy for the {variant} game",
            coll.mode
        )));
    }
    let report = validate_collection(coll)?;
    if let Some(f) = report.failure {
        return Err(Error::Domain(format!("invalid {}: {f}", coll.mode)));
    }
    let mut builder = Builder {
        k: coll.lies(),
        nodes: Vec::new(),
    };
    builder.build(coll.balls.clone(), coll.q)?;
    let tree = DecisionTree::from_nodes(builder.nodes, coll.q)?;
    tree.validate()?;
    if let Some(path) = tree.first_losing_leaf(variant) {
        return Err(Error::Verification(format!(
            "rebuilt strategy loses at leaf '{}'",
            path_string(&path)
        )));
    }
    Ok(tree)
}
