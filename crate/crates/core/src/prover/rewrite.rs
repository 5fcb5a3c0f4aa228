//! Ground terms over skolem constants and single-step equational
//! rewriting: applying one axiom, in either direction, at any position.

use std::collections::BTreeSet;
use std::fmt;

use crate::terms::{Equation, Op, Term};

use super::DecisionBudget;

/// A variable-free term: skolem constants combined with `f` and `p`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroundTerm {
    Skolem(u32),
    App(Op, Box<GroundTerm>, Box<GroundTerm>),
}

impl GroundTerm {
    pub fn app(op: Op, left: GroundTerm, right: GroundTerm) -> Self {
        GroundTerm::App(op, Box::new(left), Box::new(right))
    }

    pub fn leaves(&self) -> u32 {
        match self {
            GroundTerm::Skolem(_) => 1,
            GroundTerm::App(_, l, r) => l.leaves() + r.leaves(),
        }
    }

    pub fn collect_subterms(&self, out: &mut BTreeSet<GroundTerm>) {
        out.insert(self.clone());
        if let GroundTerm::App(_, l, r) = self {
            l.collect_subterms(out);
            r.collect_subterms(out);
        }
    }

    pub fn has_skolems(&self) -> bool {
        match self {
            GroundTerm::Skolem(_) => true,
            GroundTerm::App(_, l, r) => l.has_skolems() || r.has_skolems(),
        }
    }
}

impl fmt::Display for GroundTerm {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundTerm::Skolem(i) => write!(out, "k{i}"),
            GroundTerm::App(op, l, r) => write!(out, "{op}({l},{r})"),
        }
    }
}

/// A goal with its universally quantified variables frozen into skolem
/// constants `k1..k_nvars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundEquation {
    pub lhs: GroundTerm,
    pub rhs: GroundTerm,
    /// Number of skolem constants introduced.
    pub skolems: u32,
}

fn freeze_term(t: &Term) -> GroundTerm {
    match t {
        Term::Var(v) => GroundTerm::Skolem(*v),
        Term::App(op, l, r) => GroundTerm::app(*op, freeze_term(l), freeze_term(r)),
    }
}

/// Replace each goal variable `x_i` by the fresh constant `k_i`. Proving
/// the frozen equation proves the universally quantified goal.
pub fn freeze_goal(goal: &Equation) -> GroundEquation {
    GroundEquation {
        lhs: freeze_term(goal.lhs()),
        rhs: freeze_term(goal.rhs()),
        skolems: goal.nvars(),
    }
}

/// Match an axiom side against a ground term, extending `bind` (indexed by
/// variable id - 1). Returns false and may leave partial bindings on
/// mismatch; callers pass a fresh or checkpointed map.
pub(crate) fn match_term(
    pattern: &Term,
    subject: &GroundTerm,
    bind: &mut [Option<GroundTerm>],
) -> bool {
    match pattern {
        Term::Var(v) => {
            let slot = &mut bind[*v as usize - 1];
            match slot {
                Some(existing) => existing == subject,
                None => {
                    *slot = Some(subject.clone());
                    true
                }
            }
        }
        Term::App(op, pl, pr) => match subject {
            GroundTerm::App(sop, sl, sr) if sop == op => {
                match_term(pl, sl, bind) && match_term(pr, sr, bind)
            }
            _ => false,
        },
    }
}

pub(crate) fn instantiate(template: &Term, bind: &[Option<GroundTerm>]) -> GroundTerm {
    match template {
        Term::Var(v) => bind[*v as usize - 1].clone().expect("unbound variable"),
        Term::App(op, l, r) => GroundTerm::app(*op, instantiate(l, bind), instantiate(r, bind)),
    }
}

fn template_vars(template: &Term, out: &mut Vec<u32>) {
    match template {
        Term::Var(v) => {
            if !out.contains(v) {
                out.push(*v);
            }
        }
        Term::App(_, l, r) => {
            template_vars(l, out);
            template_vars(r, out);
        }
    }
}

/// Instantiate `template` under every completion of its unbound variables
/// from `pool`, pruning completions that cannot fit in `leaf_budget`
/// leaves. Calls `emit` for each instantiation.
fn complete_and_instantiate(
    template: &Term,
    bind: &mut Vec<Option<GroundTerm>>,
    pool: &[GroundTerm],
    leaf_budget: u32,
    emit: &mut impl FnMut(GroundTerm),
) {
    let mut vars = Vec::new();
    template_vars(template, &mut vars);
    let free: Vec<u32> = vars.into_iter().filter(|v| bind[*v as usize - 1].is_none()).collect();

    fn occurrences(template: &Term, var: u32) -> u32 {
        match template {
            Term::Var(v) => u32::from(*v == var),
            Term::App(_, l, r) => occurrences(l, var) + occurrences(r, var),
        }
    }

    fn rec(
        template: &Term,
        bind: &mut Vec<Option<GroundTerm>>,
        free: &[u32],
        pool: &[GroundTerm],
        leaf_budget: u32,
        emit: &mut impl FnMut(GroundTerm),
    ) {
        match free.split_first() {
            None => {
                let t = instantiate(template, bind);
                if t.leaves() <= leaf_budget {
                    emit(t);
                }
            }
            Some((&v, rest)) => {
                let occ = occurrences(template, v);
                for candidate in pool {
                    // Pessimistic prune: this variable alone needs
                    // occ * leaves(candidate) of the remaining budget.
                    if occ * candidate.leaves() > leaf_budget {
                        continue;
                    }
                    bind[v as usize - 1] = Some(candidate.clone());
                    rec(template, bind, rest, pool, leaf_budget, emit);
                    bind[v as usize - 1] = None;
                }
            }
        }
    }
    rec(template, bind, &free, pool, leaf_budget, emit);
}

/// The pinned substitution pool: every subterm of the current term plus
/// the goal's skolem constants.
fn substitution_pool(t: &GroundTerm, skolems: u32) -> Vec<GroundTerm> {
    let mut pool = BTreeSet::new();
    t.collect_subterms(&mut pool);
    for i in 1..=skolems {
        pool.insert(GroundTerm::Skolem(i));
    }
    pool.into_iter().collect()
}

fn rewrite_roots(
    t: &GroundTerm,
    axioms: &[Equation],
    pool: &[GroundTerm],
    leaf_budget: u32,
    out: &mut Vec<GroundTerm>,
) {
    for ax in axioms {
        for (from, to) in [(ax.lhs(), ax.rhs()), (ax.rhs(), ax.lhs())] {
            let mut bind = vec![None; ax.nvars() as usize];
            if match_term(from, t, &mut bind) {
                complete_and_instantiate(to, &mut bind, pool, leaf_budget, &mut |res| {
                    out.push(res)
                });
            }
        }
    }
}

fn rewrite_anywhere(
    t: &GroundTerm,
    axioms: &[Equation],
    pool: &[GroundTerm],
    whole_leaves: u32,
    max_leaves: u32,
    out: &mut Vec<GroundTerm>,
) {
    // Rewriting this subterm leaves `whole_leaves - t.leaves()` context
    // leaves around it.
    let context = whole_leaves - t.leaves();
    let leaf_budget = max_leaves.saturating_sub(context);
    rewrite_roots(t, axioms, pool, leaf_budget, out);
    if let GroundTerm::App(op, l, r) = t {
        let mut sub = Vec::new();
        rewrite_anywhere(l, axioms, pool, whole_leaves, max_leaves, &mut sub);
        out.extend(sub.drain(..).map(|l2| GroundTerm::app(*op, l2, (**r).clone())));
        rewrite_anywhere(r, axioms, pool, whole_leaves, max_leaves, &mut sub);
        out.extend(sub.drain(..).map(|r2| GroundTerm::app(*op, (**l).clone(), r2)));
    }
}

/// All terms one rewrite step away from `t`: one axiom applied left-to-
/// right or right-to-left at any position, with free variables of the
/// replacement drawn from the substitution pool. Results larger than
/// `max_term_leaves` are dropped.
///
/// Deduplicated, in deterministic generation order (root before subterm
/// positions, axioms in system order, left-to-right before right-to-left,
/// pool in term order).
pub fn rewrite_neighbors(
    t: &GroundTerm,
    axioms: &[Equation],
    skolems: u32,
    budget: &DecisionBudget,
) -> Vec<GroundTerm> {
    let pool = substitution_pool(t, skolems);
    let mut raw = Vec::new();
    rewrite_anywhere(t, axioms, &pool, t.leaves(), budget.max_term_leaves, &mut raw);
    let mut seen = std::collections::HashSet::new();
    raw.retain(|n| n.leaves() <= budget.max_term_leaves && seen.insert(n.clone()));
    raw
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_equation;

    fn k(i: u32) -> GroundTerm {
        GroundTerm::Skolem(i)
    }

    #[test]
    fn freeze_examples() {
        let g = freeze_goal(&parse_equation("x1 = f(x2,x1)").unwrap());
        assert_eq!(g.lhs, k(1));
        assert_eq!(g.rhs, GroundTerm::app(Op::F, k(2), k(1)));
        assert_eq!(g.skolems, 2);

        let refl = freeze_goal(&parse_equation("x1 = x1").unwrap());
        assert_eq!(refl.lhs, refl.rhs);
        assert!(refl.lhs.has_skolems());
    }

    #[test]
    fn neighbors_expand_a_skolem() {
        let ax = parse_equation("x1 = f(x2,x1)").unwrap();
        let budget = DecisionBudget::default();
        let nbs = rewrite_neighbors(&k(1), &[ax], 2, &budget);
        // Left-to-right at the root binds x1 = k1 and fills x2 from the
        // pool {k1, k2}.
        assert!(nbs.contains(&GroundTerm::app(Op::F, k(1), k(1))));
        assert!(nbs.contains(&GroundTerm::app(Op::F, k(2), k(1))));
        assert_eq!(nbs.len(), 2);
    }

    #[test]
    fn neighbors_collapse_at_root() {
        let ax = parse_equation("x1 = f(x1,x1)").unwrap();
        let budget = DecisionBudget::default();
        let t = GroundTerm::app(Op::F, k(1), k(1));
        let nbs = rewrite_neighbors(&t, &[ax], 1, &budget);
        // Right-to-left at the root gives k1; expansions also appear.
        assert!(nbs.contains(&k(1)));
    }

    #[test]
    fn neighbors_empty_when_nothing_matches() {
        let ax = parse_equation("f(x1,x1) = p(x1,x1)").unwrap();
        let budget = DecisionBudget::default();
        assert!(rewrite_neighbors(&k(1), &[ax], 1, &budget).is_empty());
    }

    #[test]
    fn neighbors_respect_leaf_cap() {
        let ax = parse_equation("x1 = f(x1,x1)").unwrap();
        let budget = DecisionBudget { max_term_leaves: 2, ..DecisionBudget::default() };
        let t = GroundTerm::app(Op::F, k(1), k(1));
        for n in rewrite_neighbors(&t, &[ax], 1, &budget) {
            assert!(n.leaves() <= 2);
        }
    }
}
