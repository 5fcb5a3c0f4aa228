//! Bidirectional breadth-first proof search between the two frozen sides
//! of a goal.
//!
//! Both frontiers expand through forward rewrite steps. A proof is a
//! meeting point `lhs ->* x <-* rhs`; its length is the sum of the two
//! path lengths. At round `r` both sides have been expanded to depth `r`,
//! so every proof of total length at most `r` (however unbalanced its
//! split) has been seen, which makes reported lengths exact minima.

use std::collections::HashMap;

use crate::terms::Equation;

use super::packed::{self, PTerm, RewriteMeta};
use super::rewrite::{freeze_goal, GroundEquation, GroundTerm};
use super::DecisionBudget;

pub(crate) struct BiSearch {
    dist_a: HashMap<PTerm, u32>,
    dist_b: HashMap<PTerm, u32>,
    parent_a: HashMap<PTerm, (PTerm, RewriteMeta)>,
    parent_b: HashMap<PTerm, (PTerm, RewriteMeta)>,
    frontier_a: Vec<PTerm>,
    frontier_b: Vec<PTerm>,
    depth: u32,
    skolems: u32,
    best: Option<(u32, PTerm)>,
    pub capped: bool,
}

impl BiSearch {
    pub fn new(goal: &GroundEquation) -> Self {
        let lhs = packed::pack(&goal.lhs);
        let rhs = packed::pack(&goal.rhs);
        let mut s = BiSearch {
            dist_a: HashMap::new(),
            dist_b: HashMap::new(),
            parent_a: HashMap::new(),
            parent_b: HashMap::new(),
            frontier_a: vec![lhs.clone()],
            frontier_b: vec![rhs.clone()],
            depth: 0,
            skolems: goal.skolems,
            best: None,
            capped: false,
        };
        s.dist_a.insert(lhs.clone(), 0);
        s.dist_b.insert(rhs.clone(), 0);
        if lhs == rhs {
            s.best = Some((0, lhs));
        }
        s
    }

    pub fn best(&self) -> Option<u32> {
        self.best.as_ref().map(|(d, _)| *d)
    }

    pub fn exhausted(&self) -> bool {
        self.frontier_a.is_empty() && self.frontier_b.is_empty()
    }

    fn expand_side(&mut self, own: bool, axioms: &[Equation], budget: &DecisionBudget) {
        let frontier = if own {
            std::mem::take(&mut self.frontier_a)
        } else {
            std::mem::take(&mut self.frontier_b)
        };
        let mut next = Vec::new();
        for t in &frontier {
            for (nb, meta) in
                packed::neighbors(t, axioms, self.skolems, budget.max_term_leaves)
            {
                let (dist, parent, other) = if own {
                    (&mut self.dist_a, &mut self.parent_a, &self.dist_b)
                } else {
                    (&mut self.dist_b, &mut self.parent_b, &self.dist_a)
                };
                if !dist.contains_key(&nb) {
                    dist.insert(nb.clone(), self.depth);
                    parent.insert(nb.clone(), (t.clone(), meta));
                    if let Some(&d_other) = other.get(&nb) {
                        let total = self.depth + d_other;
                        if self.best.as_ref().is_none_or(|(b, _)| total < *b) {
                            self.best = Some((total, nb.clone()));
                        }
                    }
                    next.push(nb);
                }
            }
        }
        if own {
            self.frontier_a = next;
        } else {
            self.frontier_b = next;
        }
    }

    /// Expand both sides one level. Does nothing once the frontier cap
    /// has been hit (the search is then inconclusive, not exhausted).
    pub fn expand_level(&mut self, axioms: &[Equation], budget: &DecisionBudget) {
        if self.capped {
            return;
        }
        if self.dist_a.len() + self.dist_b.len() > budget.max_frontier {
            self.capped = true;
            return;
        }
        self.depth += 1;
        self.expand_side(true, axioms, budget);
        self.expand_side(false, axioms, budget);
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    fn segment(
        parents: &HashMap<PTerm, (PTerm, RewriteMeta)>,
        meet: &PTerm,
    ) -> Vec<TraceStep> {
        // Walk meet -> ... -> endpoint, then reverse into endpoint -> meet.
        let mut steps = Vec::new();
        let mut cur = meet.clone();
        while let Some((parent, meta)) = parents.get(&cur) {
            steps.push(TraceStep {
                from: packed::unpack(parent),
                to: packed::unpack(&cur),
                axiom: meta.axiom,
                left_to_right: meta.left_to_right,
                position: meta.position,
            });
            cur = parent.clone();
        }
        steps.reverse();
        steps
    }

    pub fn evidence(&self) -> Option<ProofEvidence> {
        let (_, meet) = self.best.as_ref()?;
        Some(ProofEvidence::Valley {
            from_lhs: Self::segment(&self.parent_a, meet),
            from_rhs: Self::segment(&self.parent_b, meet),
            meet: packed::unpack(meet),
        })
    }
}

/// One rewrite step of a reconstructed proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub from: GroundTerm,
    pub to: GroundTerm,
    /// Index of the applied axiom within its system.
    pub axiom: usize,
    pub left_to_right: bool,
    /// Preorder position of the rewritten subterm.
    pub position: usize,
}

/// How a proof was established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofEvidence {
    /// The frozen goal has syntactically equal sides.
    Reflexivity,
    /// The goal is an instance of the indexed axiom.
    Subsumption { axiom: usize },
    /// Two rewrite chains meeting in the middle: `lhs ->* meet <-* rhs`.
    Valley {
        from_lhs: Vec<TraceStep>,
        from_rhs: Vec<TraceStep>,
        meet: GroundTerm,
    },
}

/// Result of the proof search alone (no model search).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProveOutcome {
    Proven { length: u32 },
    NotFound {
        /// The frontier cap truncated the search before the depth cap.
        frontier_capped: bool,
        /// Both frontiers emptied: nothing further is reachable within
        /// the term-size cap.
        space_exhausted: bool,
    },
}

/// Subsumption: the goal is an instance of one axiom (both orientations
/// tried with a single shared substitution). Returns the axiom index.
pub fn instance_of_axiom(axioms: &[Equation], goal: &GroundEquation) -> Option<usize> {
    use super::rewrite::match_term;
    for (i, ax) in axioms.iter().enumerate() {
        for (from, to) in [(ax.lhs(), ax.rhs()), (ax.rhs(), ax.lhs())] {
            let mut bind = vec![None; ax.nvars() as usize];
            if match_term(from, &goal.lhs, &mut bind) && match_term(to, &goal.rhs, &mut bind) {
                return Some(i);
            }
        }
    }
    None
}

/// Reflexivity or axiom subsumption: the two length-1 proofs.
pub fn is_subsumed(axioms: &[Equation], goal: &GroundEquation) -> bool {
    goal.lhs == goal.rhs || instance_of_axiom(axioms, goal).is_some()
}

fn search(
    axioms: &[Equation],
    goal: &Equation,
    budget: &DecisionBudget,
) -> Result<(u32, ProofEvidence), (bool, bool)> {
    let frozen = freeze_goal(goal);
    if frozen.lhs == frozen.rhs {
        return Ok((1, ProofEvidence::Reflexivity));
    }
    if let Some(axiom) = instance_of_axiom(axioms, &frozen) {
        return Ok((1, ProofEvidence::Subsumption { axiom }));
    }
    let mut bi = BiSearch::new(&frozen);
    for round in 2..=budget.max_proof_steps {
        while bi.depth() < round && !bi.capped && !bi.exhausted() {
            bi.expand_level(axioms, budget);
        }
        if let Some(best) = bi.best() {
            if best <= round {
                return Ok((best.max(1), bi.evidence().unwrap()));
            }
        }
        if bi.exhausted() {
            break;
        }
    }
    // A meet longer than the depth cap does not count as found.
    match bi.best() {
        Some(best) if best <= budget.max_proof_steps => {
            Ok((best.max(1), bi.evidence().unwrap()))
        }
        _ => Err((bi.capped, bi.exhausted())),
    }
}

/// Search for a shortest equational proof of `goal` from `axioms`.
///
/// Length 1 is reserved for reflexivity and axiom subsumption; otherwise
/// the bidirectional search reports the exact minimal number of rewrite
/// steps, or `NotFound` with the budget flags.
pub fn prove(axioms: &[Equation], goal: &Equation, budget: &DecisionBudget) -> ProveOutcome {
    match search(axioms, goal, budget) {
        Ok((length, _)) => ProveOutcome::Proven { length },
        Err((frontier_capped, space_exhausted)) => {
            ProveOutcome::NotFound { frontier_capped, space_exhausted }
        }
    }
}

/// Like [`prove`], but returns the reconstructed proof.
pub fn prove_with_evidence(
    axioms: &[Equation],
    goal: &Equation,
    budget: &DecisionBudget,
) -> Option<(u32, ProofEvidence)> {
    search(axioms, goal, budget).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_equation;

    fn eq(text: &str) -> Equation {
        parse_equation(text).unwrap()
    }

    #[test]
    fn axiom_goal_is_length_one() {
        let ax = eq("x1 = f(x2,x1)");
        let out = prove(std::slice::from_ref(&ax), &ax, &DecisionBudget::default());
        assert_eq!(out, ProveOutcome::Proven { length: 1 });
        let (len, evidence) =
            prove_with_evidence(std::slice::from_ref(&ax), &ax, &DecisionBudget::default())
                .unwrap();
        assert_eq!(len, 1);
        assert_eq!(evidence, ProofEvidence::Subsumption { axiom: 0 });
    }

    #[test]
    fn reflexivity_is_length_one() {
        let out = prove(&[], &eq("x1 = x1"), &DecisionBudget::default());
        assert_eq!(out, ProveOutcome::Proven { length: 1 });
        let (len, evidence) =
            prove_with_evidence(&[], &eq("x1 = x1"), &DecisionBudget::default()).unwrap();
        assert_eq!((len, evidence), (1, ProofEvidence::Reflexivity));
    }

    #[test]
    fn instance_of_axiom_is_length_one() {
        // x1 = f(x1,x1) is an instance of x1 = f(x2,x1) under x2 -> x1.
        let out = prove(&[eq("x1 = f(x2,x1)")], &eq("x1 = f(x1,x1)"), &DecisionBudget::default());
        assert_eq!(out, ProveOutcome::Proven { length: 1 });
    }

    #[test]
    fn doubling_goal_takes_two_steps() {
        // k1 -> f(k1,k1) -> f(f(k1,k1),f(k1,k1)): the root rewrite at the
        // second step matches the whole term, so the minimum is 2.
        let budget = DecisionBudget { max_term_leaves: 6, ..DecisionBudget::default() };
        let axioms = [eq("x1 = f(x1,x1)")];
        let goal = eq("x1 = f(f(x1,x1),f(x1,x1))");
        let out = prove(&axioms, &goal, &budget);
        assert_eq!(out, ProveOutcome::Proven { length: 2 });
        // The reconstructed valley is a coherent chain of the same length.
        let (len, evidence) = prove_with_evidence(&axioms, &goal, &budget).unwrap();
        assert_eq!(len, 2);
        match evidence {
            ProofEvidence::Valley { from_lhs, from_rhs, meet } => {
                assert_eq!(from_lhs.len() + from_rhs.len(), 2);
                for seg in [&from_lhs, &from_rhs] {
                    if let Some(last) = seg.last() {
                        assert_eq!(last.to, meet);
                    }
                }
            }
            other => panic!("expected valley, got {other:?}"),
        }
    }

    #[test]
    fn unprovable_in_empty_theory_exhausts_space() {
        let out = prove(&[], &eq("x1 = x2"), &DecisionBudget::default());
        assert_eq!(out, ProveOutcome::NotFound { frontier_capped: false, space_exhausted: true });
    }

    #[test]
    fn depth_cap_yields_not_found() {
        let budget = DecisionBudget {
            max_proof_steps: 2,
            max_term_leaves: 8,
            ..DecisionBudget::default()
        };
        // Needs three rewrite steps (see the decide tests); depth cap 2
        // cannot reach it.
        let goal = eq("x1 = f(f(f(x1,x1),f(x1,x1)),f(f(x1,x1),f(x1,x1)))");
        let out = prove(&[eq("x1 = f(x1,x1)")], &goal, &budget);
        assert!(matches!(out, ProveOutcome::NotFound { .. }));
        // The same goal at depth 3 proves with exactly three steps.
        let roomy = DecisionBudget { max_term_leaves: 8, ..DecisionBudget::default() };
        let out = prove(&[eq("x1 = f(x1,x1)")], &goal, &roomy);
        assert_eq!(out, ProveOutcome::Proven { length: 3 });
    }
}
