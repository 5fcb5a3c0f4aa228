//! Packed ground terms for the search inner loop: a term is its preorder
//! byte string (skolem id bytes below 0x80, operator bytes 0x80 = f,
//! 0x81 = p). Every byte offset starts a subterm, slices compare cheaply,
//! and byte-lexicographic order coincides with the pinned term order
//! because valid encodings form a prefix-free code.

use crate::terms::{Equation, Op, Term};

use super::rewrite::GroundTerm;

pub(crate) const OP_F: u8 = 0x80;
pub(crate) const OP_P: u8 = 0x81;

pub(crate) type PTerm = Vec<u8>;

pub(crate) fn pack_into(t: &GroundTerm, out: &mut PTerm) {
    match t {
        GroundTerm::Skolem(i) => {
            debug_assert!(*i >= 1 && *i < 0x80);
            out.push(*i as u8);
        }
        GroundTerm::App(op, l, r) => {
            out.push(if *op == Op::F { OP_F } else { OP_P });
            pack_into(l, out);
            pack_into(r, out);
        }
    }
}

pub(crate) fn pack(t: &GroundTerm) -> PTerm {
    let mut out = Vec::new();
    pack_into(t, &mut out);
    out
}

pub(crate) fn unpack(bytes: &[u8]) -> GroundTerm {
    fn walk(bytes: &[u8], pos: &mut usize) -> GroundTerm {
        let b = bytes[*pos];
        *pos += 1;
        if b < 0x80 {
            GroundTerm::Skolem(b as u32)
        } else {
            let op = if b == OP_F { Op::F } else { Op::P };
            let l = walk(bytes, pos);
            let r = walk(bytes, pos);
            GroundTerm::app(op, l, r)
        }
    }
    let mut pos = 0;
    let t = walk(bytes, &mut pos);
    debug_assert_eq!(pos, bytes.len());
    t
}

pub(crate) fn leaves(bytes: &[u8]) -> u32 {
    bytes.iter().filter(|&&b| b < 0x80).count() as u32
}

/// End offset (exclusive) of the subterm starting at `start`.
pub(crate) fn subterm_end(bytes: &[u8], start: usize) -> usize {
    let mut need = 1i32;
    let mut i = start;
    while need > 0 {
        if bytes[i] < 0x80 {
            need -= 1;
        } else {
            need += 1;
        }
        i += 1;
    }
    i
}

/// One applied rewrite: which axiom, which orientation, at which preorder
/// byte position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RewriteMeta {
    pub axiom: usize,
    pub left_to_right: bool,
    /// Preorder position (byte offset) of the rewritten subterm.
    pub position: usize,
}

/// Match an axiom side against a subject slice, binding variables to
/// subslices.
fn match_slice<'a>(
    pattern: &Term,
    subject: &'a [u8],
    bind: &mut [Option<&'a [u8]>],
) -> bool {
    match pattern {
        Term::Var(v) => {
            let slot = &mut bind[*v as usize - 1];
            match slot {
                Some(existing) => *existing == subject,
                None => {
                    *slot = Some(subject);
                    true
                }
            }
        }
        Term::App(op, pl, pr) => {
            let tag = if *op == Op::F { OP_F } else { OP_P };
            if subject[0] != tag {
                return false;
            }
            let left_end = subterm_end(subject, 1);
            match_slice(pl, &subject[1..left_end], bind)
                && match_slice(pr, &subject[left_end..], bind)
        }
    }
}

fn instantiate_into(template: &Term, bind: &[Option<&[u8]>], out: &mut PTerm) {
    match template {
        Term::Var(v) => out.extend_from_slice(bind[*v as usize - 1].expect("unbound variable")),
        Term::App(op, l, r) => {
            out.push(if *op == Op::F { OP_F } else { OP_P });
            instantiate_into(l, bind, out);
            instantiate_into(r, bind, out);
        }
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

fn occurrences(template: &Term, var: u32) -> u32 {
    match template {
        Term::Var(v) => u32::from(*v == var),
        Term::App(_, l, r) => occurrences(l, var) + occurrences(r, var),
    }
}

/// The pinned substitution pool for a term: its distinct subterms plus
/// the goal skolems, in term (= byte) order.
pub(crate) fn substitution_pool(t: &[u8], skolems: u32) -> Vec<PTerm> {
    let mut pool: Vec<PTerm> = Vec::new();
    for start in 0..t.len() {
        let end = subterm_end(t, start);
        pool.push(t[start..end].to_vec());
    }
    for i in 1..=skolems {
        pool.push(vec![i as u8]);
    }
    pool.sort();
    pool.dedup();
    pool
}

/// All rewrite successors of `t`, with the rewrite that produced each.
/// Deduplicated keeping the first (deterministic) occurrence.
pub(crate) fn neighbors(
    t: &[u8],
    axioms: &[Equation],
    skolems: u32,
    max_leaves: u32,
) -> Vec<(PTerm, RewriteMeta)> {
    let pool = substitution_pool(t, skolems);
    let total_leaves = leaves(t);
    let mut out: Vec<(PTerm, RewriteMeta)> = Vec::new();

    for position in 0..t.len() {
        let end = subterm_end(t, position);
        let subject = &t[position..end];
        let subject_leaves = leaves(subject);
        let context_leaves = total_leaves - subject_leaves;
        // Replacement must fit the whole-term leaf cap.
        let Some(leaf_budget) = max_leaves.checked_sub(context_leaves) else { continue };
        for (axiom, ax) in axioms.iter().enumerate() {
            for (from, to, left_to_right) in
                [(ax.lhs(), ax.rhs(), true), (ax.rhs(), ax.lhs(), false)]
            {
                let mut bind: Vec<Option<&[u8]>> = vec![None; ax.nvars() as usize];
                if !match_slice(from, subject, &mut bind) {
                    continue;
                }
                let mut vars = Vec::new();
                template_vars(to, &mut vars);
                let free: Vec<(u32, u32)> = vars
                    .into_iter()
                    .filter(|v| bind[*v as usize - 1].is_none())
                    .map(|v| (v, occurrences(to, v)))
                    .collect();
                let meta = RewriteMeta { axiom, left_to_right, position };
                complete(
                    t,
                    position,
                    end,
                    to,
                    &mut bind,
                    &free,
                    &pool,
                    leaf_budget,
                    meta,
                    &mut out,
                );
            }
        }
    }

    let mut seen = std::collections::HashSet::new();
    out.retain(|(term, _)| seen.insert(term.clone()));
    out
}

#[allow(clippy::too_many_arguments)]
fn complete<'a>(
    t: &[u8],
    position: usize,
    end: usize,
    to: &Term,
    bind: &mut Vec<Option<&'a [u8]>>,
    free: &[(u32, u32)],
    pool: &'a [PTerm],
    leaf_budget: u32,
    meta: RewriteMeta,
    out: &mut Vec<(PTerm, RewriteMeta)>,
) {
    match free.split_first() {
        None => {
            let mut replacement = Vec::new();
            instantiate_into(to, bind, &mut replacement);
            if leaves(&replacement) <= leaf_budget {
                let mut result = Vec::with_capacity(t.len() - (end - position) + replacement.len());
                result.extend_from_slice(&t[..position]);
                result.extend_from_slice(&replacement);
                result.extend_from_slice(&t[end..]);
                out.push((result, meta));
            }
        }
        Some((&(var, occ), rest)) => {
            for candidate in pool {
                if occ * leaves(candidate) > leaf_budget {
                    continue;
                }
                bind[var as usize - 1] = Some(candidate);
                complete(t, position, end, to, bind, rest, pool, leaf_budget, meta, out);
                bind[var as usize - 1] = None;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::rewrite::{freeze_goal, rewrite_neighbors};
    use crate::prover::DecisionBudget;
    use crate::terms::parse_equation;
    use proptest::prelude::*;

    #[test]
    fn pack_round_trip() {
        let g = freeze_goal(&parse_equation("f(x1,p(x2,x1)) = x3").unwrap());
        let bytes = pack(&g.rhs);
        assert_eq!(unpack(&bytes), g.rhs);
        assert_eq!(leaves(&bytes), 3);
        assert_eq!(subterm_end(&bytes, 0), bytes.len());
    }

    #[test]
    fn byte_order_matches_term_order() {
        let terms = [
            "x1", "x2", "f(x1,x1)", "f(x1,x2)", "f(x2,x1)", "p(x1,x1)",
            "f(f(x1,x2),x3)", "f(x1,f(x2,x3))", "p(f(x1,x1),x2)",
        ];
        let ground: Vec<GroundTerm> = terms
            .iter()
            .map(|t| freeze_goal(&parse_equation(&format!("{t} = x9")).unwrap()).lhs)
            .collect();
        for a in &ground {
            for b in &ground {
                assert_eq!(pack(a).cmp(&pack(b)), a.cmp(b), "{a} vs {b}");
            }
        }
    }

    proptest! {
        /// The packed fast path and the tree-based reference agree on the
        /// neighbor set (the reference sorts differently, so compare as
        /// sets).
        #[test]
        fn packed_neighbors_match_reference(seed in 0u64..400) {
            let axioms = [
                parse_equation("x1 = f(x1,x1)").unwrap(),
                parse_equation("x1 = f(x2,x1)").unwrap(),
                parse_equation("f(x1,x2) = p(x2,x1)").unwrap(),
            ];
            let pick = (seed % 3) as usize;
            let goals = [
                "x1 = f(x2,x1)",
                "f(x1,x2) = p(p(x1,x1),x2)",
                "x1 = p(x2,x3)",
            ];
            let goal = freeze_goal(&parse_equation(goals[(seed / 3) as usize % 3]).unwrap());
            let t = if seed % 2 == 0 { goal.lhs.clone() } else { goal.rhs.clone() };
            let budget = DecisionBudget { max_term_leaves: 6, ..DecisionBudget::default() };
            let reference: std::collections::BTreeSet<GroundTerm> =
                rewrite_neighbors(&t, &axioms[..=pick], goal.skolems, &budget)
                    .into_iter()
                    .collect();
            let fast: std::collections::BTreeSet<GroundTerm> =
                neighbors(&pack(&t), &axioms[..=pick], goal.skolems, budget.max_term_leaves)
                    .into_iter()
                    .map(|(bytes, _)| unpack(&bytes))
                    .collect();
            prop_assert_eq!(reference, fast);
        }
    }
}
