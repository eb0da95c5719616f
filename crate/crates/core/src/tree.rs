//! Decision trees: the certificate form of a strategy for Paul.

use crate::error::{Error, Result};
use crate::game::{transition, GameVariant, QuestionVector, Response, StateVector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub state: StateVector,
    /// Present exactly on internal nodes.
    pub question: Option<QuestionVector>,
    /// `(N-child, Y-child)` indices into the arena.
    pub children: Option<(usize, usize)>,
}

/// Full binary tree of depth `q`, stored as an arena with the root at index 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
    depth: u32,
}

impl DecisionTree {
    /// Assembles a tree from an arena; call [`DecisionTree::validate`] to check it.
    pub fn from_nodes(nodes: Vec<TreeNode>, depth: u32) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Domain("decision tree needs a root".into()));
        }
        Ok(DecisionTree { nodes, depth })
    }

    /// Builds a tree by asking `choose(state, rounds_remaining)` at every node.
    pub fn build<F>(root: StateVector, depth: u32, mut choose: F) -> Result<Self>
    where
        F: FnMut(&StateVector, u32) -> Result<QuestionVector>,
    {
        let mut nodes = vec![TreeNode {
            state: root,
            question: None,
            children: None,
        }];
        // (node, rounds remaining)
        let mut stack = vec![(0usize, depth)];
        while let Some((id, j)) = stack.pop() {
            if j == 0 {
                continue;
            }
            let state = nodes[id].state.clone();
            let question = choose(&state, j)?;
            let no = transition(&state, &question, Response::N)?;
            let yes = transition(&state, &question, Response::Y)?;
            let n_id = nodes.len();
            nodes.push(TreeNode {
                state: no,
                question: None,
                children: None,
            });
            nodes.push(TreeNode {
                state: yes,
                question: None,
                children: None,
            });
            nodes[id].question = Some(question);
            nodes[id].children = Some((n_id, n_id + 1));
            stack.push((n_id + 1, j - 1));
            stack.push((n_id, j - 1));
        }
        Ok(DecisionTree { nodes, depth })
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn child(&self, id: usize, r: Response) -> Option<usize> {
        self.nodes[id].children.map(|(n, y)| match r {
            Response::N => n,
            Response::Y => y,
        })
    }

    /// Follows a response sequence from the root and returns the node reached.
    pub fn walk(&self, responses: &[Response]) -> Option<usize> {
        responses.iter().try_fold(0usize, |id, &r| self.child(id, r))
    }

    /// Structural checks: full binary, all leaves at depth `q`, every
    /// question legal and every child the matching transition.
    pub fn validate(&self) -> Result<()> {
        let mut stack = vec![(0usize, 0u32)];
        let mut seen = 0usize;
        while let Some((id, level)) = stack.pop() {
            seen += 1;
            let node = &self.nodes[id];
            match (&node.question, node.children) {
                (None, None) => {
                    if level != self.depth {
                        return Err(Error::Verification(format!(
                            "leaf {id} at depth {level}, expected {}",
                            self.depth
                        )));
                    }
                }
                (Some(question), Some((n, y))) => {
                    if level >= self.depth {
                        return Err(Error::Verification(format!(
                            "internal node {id} at depth {level} exceeds {}",
                            self.depth
                        )));
                    }
                    for (child, r) in [(n, Response::N), (y, Response::Y)] {
                        let expected = transition(&node.state, question, r)?;
                        let got = &self
                            .nodes
                            .get(child)
                            .ok_or_else(|| Error::Verification(format!("dangling child {child}")))?
                            .state;
                        if *got != expected {
                            return Err(Error::Verification(format!(
                                "node {id}: {r}-child holds {got}, transition gives {expected}"
                            )));
                        }
                        stack.push((child, level + 1));
                    }
                }
                _ => {
                    return Err(Error::Verification(format!(
                        "node {id} has a question without children or vice versa"
                    )))
                }
            }
        }
        if seen != self.nodes.len() {
            return Err(Error::Verification(format!(
                "{} unreachable nodes",
                self.nodes.len() - seen
            )));
        }
        Ok(())
    }

    /// Leaves in lexicographic response order (N before Y) with their paths.
    pub fn leaves(&self) -> Vec<(Vec<Response>, usize)> {
        let mut out = Vec::with_capacity(1 << self.depth.min(24));
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((id, path)) = stack.pop() {
            match self.nodes[id].children {
                None => out.push((path, id)),
                Some((n, y)) => {
                    let mut py = path.clone();
                    py.push(Response::Y);
                    stack.push((y, py));
                    let mut pn = path;
                    pn.push(Response::N);
                    stack.push((n, pn));
                }
            }
        }
        out
    }

    /// First leaf (in response order) that violates the variant's win condition.
    pub fn first_losing_leaf(&self, variant: GameVariant) -> Option<Vec<Response>> {
        self.leaves()
            .into_iter()
            .find(|(_, id)| !variant.paul_wins_at_horizon(&self.nodes[*id].state))
            .map(|(path, _)| path)
    }
}

pub fn path_string(path: &[Response]) -> String {
    path.iter().map(|r| r.as_char()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_and_validate_halving_tree() {
        let root: StateVector = "0,0,8".parse().unwrap();
        let tree = DecisionTree::build(root, 3, |x, _| {
            Ok(QuestionVector::new(x.counts().iter().map(|c| c / 2)))
        })
        .unwrap();
        tree.validate().unwrap();
        assert_eq!(tree.leaves().len(), 8);
        assert_eq!(tree.first_losing_leaf(GameVariant::Pathological), None);
        let leaf = tree.walk(&[Response::Y, Response::N, Response::Y]).unwrap();
        assert_eq!(tree.node(leaf).state.to_string(), "0,0,1");
    }

    #[test]
    fn validate_catches_tampering() {
        let root: StateVector = "2,0".parse().unwrap();
        let tree = DecisionTree::build(root, 1, |_, _| Ok(QuestionVector::new([1, 0]))).unwrap();
        let mut nodes = tree.nodes().to_vec();
        nodes[1].state = "2,0".parse().unwrap();
        let bad = DecisionTree::from_nodes(nodes, 1).unwrap();
        assert!(bad.validate().is_err());
    }
}
