//! Deciding goals against axiom systems: bounded equational rewrite
//! search for proofs, finite model search for disproofs, and the derived
//! consistency, independence, truth-space and census machinery.
//!
//! [`decide`] interleaves the two searches on a pinned schedule: after
//! the length-1 subsumption check, round `r` runs the proof search to
//! depth `r` and then the model search at domain size `k = r - 1`. The
//! first success wins, so a countermodel of size `k` carries decision
//! time `k + 1`.

mod model;
mod packed;
mod rewrite;
mod search;

pub use model::{
    enumerate_satisfying_models, equation_holds, find_countermodel as find_countermodel_raw,
    model_falsifies, model_satisfies_system, verify_disproof, FiniteModel,
};
pub use rewrite::{freeze_goal, rewrite_neighbors, GroundEquation, GroundTerm};
pub use search::{prove, prove_with_evidence, ProofEvidence, ProveOutcome, TraceStep};

use rayon::prelude::*;

use crate::stats::DecisionDistribution;
use crate::terms::{canonicalize, AxiomSystem, Equation, Term};

/// Caps for one decision: rewrite-search depth and width, intermediate
/// term size, and the largest model domain searched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionBudget {
    pub max_proof_steps: u32,
    pub max_term_leaves: u32,
    pub max_frontier: usize,
    pub model_max_k: u32,
    /// Node cap for one backtracking model search.
    pub model_node_cap: u64,
}

impl Default for DecisionBudget {
    fn default() -> Self {
        Self {
            max_proof_steps: 17,
            max_term_leaves: 16,
            max_frontier: 200_000,
            model_max_k: 3,
            model_node_cap: 500_000,
        }
    }
}

/// Which budgets ran out on an undecided goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExhaustion {
    /// Proof search exhausted its depth (or everything reachable).
    pub proof_side: bool,
    /// Model search exhausted its domain sizes.
    pub model_side: bool,
    /// The frontier cap truncated the rewrite search.
    pub frontier_capped: bool,
    /// The node cap truncated some model search.
    pub model_node_capped: bool,
}

/// Outcome of deciding one goal against one axiom system.
#[derive(Debug, Clone, PartialEq)]
pub enum ProofResult {
    /// Shortest derivation found, in rewrite steps; length 1 means the
    /// goal is reflexive or an instance of an axiom.
    Proven { length: u32 },
    /// Witness model satisfying the axioms and falsifying the goal.
    Disproven { model: FiniteModel },
    Undecided(BudgetExhaustion),
}

impl ProofResult {
    /// Decision time on the shared histogram axis: proof length for
    /// proofs, interleave round (`k + 1`) for disproofs.
    pub fn decision_time(&self) -> Option<u64> {
        match self {
            ProofResult::Proven { length } => Some(*length as u64),
            ProofResult::Disproven { model } => Some(model.k as u64 + 1),
            ProofResult::Undecided(_) => None,
        }
    }
}

/// Reflexivity or axiom subsumption on the frozen goal: exactly the
/// length-1 proofs.
pub fn is_subsumed(axioms: &[Equation], goal: &Equation) -> bool {
    search::is_subsumed(axioms, &freeze_goal(goal))
}

/// Smallest countermodel within the budget's domain sizes.
pub fn find_countermodel(
    axioms: &AxiomSystem,
    goal: &Equation,
    max_k: u32,
    budget: &DecisionBudget,
) -> Option<FiniteModel> {
    model::find_countermodel(axioms.axioms(), goal, max_k, budget.model_node_cap)
}

/// Decide a goal by the interleaved schedule. Deterministic for a fixed
/// budget.
pub fn decide(system: &AxiomSystem, goal: &Equation, budget: &DecisionBudget) -> ProofResult {
    let axioms = system.axioms();
    let frozen = freeze_goal(goal);
    if search::is_subsumed(axioms, &frozen) {
        return ProofResult::Proven { length: 1 };
    }
    let mut bfs = search::BiSearch::new(&frozen);
    let mut model_node_capped = false;
    let mut round: u32 = 2;
    loop {
        let proof_active = round <= budget.max_proof_steps;
        let k = round - 1;
        let model_active = k <= budget.model_max_k;
        if !proof_active && !model_active {
            break;
        }
        if proof_active {
            while bfs.depth() < round && !bfs.capped && !bfs.exhausted() {
                bfs.expand_level(axioms, budget);
            }
            if let Some(best) = bfs.best() {
                if best <= round {
                    return ProofResult::Proven { length: best.max(1) };
                }
            }
        }
        if model_active {
            let ms = model::search_model(axioms, Some(goal), k, budget.model_node_cap);
            if let Some(m) = ms.model {
                return ProofResult::Disproven { model: m };
            }
            if ms.capped {
                model_node_capped = true;
            }
        }
        round += 1;
    }
    ProofResult::Undecided(BudgetExhaustion {
        proof_side: true,
        model_side: true,
        frontier_capped: bfs.capped,
        model_node_capped,
    })
}

/// Operational consistency: nontriviality.
#[derive(Debug, Clone, PartialEq)]
pub enum Consistency {
    /// Some model with at least two elements satisfies every axiom.
    Consistent { witness: FiniteModel },
    /// The system derives x1 = x2, collapsing every model to one element.
    Inconsistent,
    Unknown,
}

fn triviality_goal() -> Equation {
    canonicalize(&Term::Var(1), &Term::Var(2))
}

/// Consistency check, pinned order: witness at k = 2, then try to derive
/// x1 = x2, then witnesses at larger k.
pub fn is_consistent(system: &AxiomSystem, budget: &DecisionBudget) -> Consistency {
    let axioms = system.axioms();
    if let Some(witness) = model::search_model(axioms, None, 2, budget.model_node_cap).model {
        return Consistency::Consistent { witness };
    }
    if let ProveOutcome::Proven { .. } = search::prove(axioms, &triviality_goal(), budget) {
        return Consistency::Inconsistent;
    }
    for k in 3..=budget.model_max_k {
        if let Some(witness) = model::search_model(axioms, None, k, budget.model_node_cap).model {
            return Consistency::Consistent { witness };
        }
    }
    Consistency::Unknown
}

/// Independence status of one axiom within its system.
#[derive(Debug, Clone, PartialEq)]
pub enum AxiomStatus {
    /// A model of the remaining axioms falsifies this one.
    Independent { witness: FiniteModel },
    /// Derivable from the remaining axioms.
    Dependent { proof_length: u32 },
    Unknown,
}

/// Per-axiom independence: axiom `a` is independent when it cannot be
/// derived from the rest of its system.
pub fn is_independent(system: &AxiomSystem, budget: &DecisionBudget) -> Vec<AxiomStatus> {
    (0..system.len())
        .map(|i| {
            let rest = system.without(i);
            let goal = &system.axioms()[i];
            if let Some(witness) =
                model::find_countermodel(rest.axioms(), goal, 2, budget.model_node_cap)
            {
                return AxiomStatus::Independent { witness };
            }
            if let ProveOutcome::Proven { length } = search::prove(rest.axioms(), goal, budget) {
                return AxiomStatus::Dependent { proof_length: length };
            }
            for k in 3..=budget.model_max_k {
                if let Some(witness) =
                    model::search_model(rest.axioms(), Some(goal), k, budget.model_node_cap).model
                {
                    return AxiomStatus::Independent { witness };
                }
            }
            AxiomStatus::Unknown
        })
        .collect()
}

/// A system with its consistency and (when consistent) per-axiom
/// independence annotations.
#[derive(Debug, Clone)]
pub struct SystemAnnotation {
    pub system: AxiomSystem,
    pub consistency: Consistency,
    pub independence: Vec<AxiomStatus>,
}

impl SystemAnnotation {
    pub fn fully_independent(&self) -> bool {
        !self.independence.is_empty()
            && self.independence.iter().all(|s| matches!(s, AxiomStatus::Independent { .. }))
            || self.system.is_empty()
    }
}

pub fn annotate_system(system: AxiomSystem, budget: &DecisionBudget) -> SystemAnnotation {
    let consistency = is_consistent(&system, budget);
    let independence = match consistency {
        Consistency::Consistent { .. } => is_independent(&system, budget),
        _ => Vec::new(),
    };
    SystemAnnotation { system, consistency, independence }
}

/// Keep the systems a truth space is built from: nonempty, consistent,
/// and fully independent.
pub fn filter_systems(
    systems: impl IntoIterator<Item = AxiomSystem>,
    budget: &DecisionBudget,
) -> Vec<SystemAnnotation> {
    let candidates: Vec<AxiomSystem> =
        systems.into_iter().filter(|s| !s.is_empty()).collect();
    candidates
        .into_par_iter()
        .map(|s| annotate_system(s, budget))
        .filter(|a| {
            matches!(a.consistency, Consistency::Consistent { .. }) && a.fully_independent()
        })
        .collect()
}

/// Every (goal, system) decision for a corpus against filtered systems.
/// Cells are goal-major: `cells[goal_index * systems.len() + system_index]`.
#[derive(Debug, Clone)]
pub struct TruthSpace {
    pub systems: Vec<AxiomSystem>,
    pub corpus: Vec<Equation>,
    pub cells: Vec<ProofResult>,
}

impl TruthSpace {
    pub fn cell(&self, goal_index: usize, system_index: usize) -> &ProofResult {
        &self.cells[goal_index * self.systems.len() + system_index]
    }
}

/// Decide every cell; evaluation is parallel but aggregation is by cell
/// index, so the result is deterministic.
pub fn truth_space(
    systems: Vec<AxiomSystem>,
    corpus: Vec<Equation>,
    budget: &DecisionBudget,
) -> TruthSpace {
    let n_sys = systems.len();
    let cells: Vec<ProofResult> = (0..corpus.len() * n_sys)
        .into_par_iter()
        .map(|idx| decide(&systems[idx % n_sys], &corpus[idx / n_sys], budget))
        .collect();
    TruthSpace { systems, corpus, cells }
}

/// Histogram of decision times over a truth space; undecided cells are
/// tallied separately.
pub fn proof_census(space: &TruthSpace) -> DecisionDistribution {
    let mut counts = std::collections::BTreeMap::new();
    let mut undecided = 0u64;
    for cell in &space.cells {
        match cell.decision_time() {
            Some(t) => *counts.entry(t).or_insert(0u64) += 1,
            None => undecided += 1,
        }
    }
    DecisionDistribution::new("proof-census", counts, undecided)
}
