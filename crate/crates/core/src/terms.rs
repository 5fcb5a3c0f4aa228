//! The equational formula language: terms over the two binary operators
//! `f` and `p`, universally closed equations in canonical form, corpus
//! enumeration by formula length, and axiom systems as corpus subsets.
//!
//! The length of an equation is the total number of variable occurrences
//! on both sides, counting multiplicity. Canonical form numbers variables
//! by first occurrence (left side first) and orients the equation so the
//! lexicographically smaller side comes first; `s = t` and `t = s` are
//! the same equation.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// A binary operator; `f` orders before `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    F,
    P,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::F => "f",
            Op::P => "p",
        })
    }
}

/// A term: a variable or a binary application. The derived ordering is the
/// pinned term order (variables before applications, `f` before `p`, then
/// structural).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(u32),
    App(Op, Box<Term>, Box<Term>),
}

impl Term {
    pub fn app(op: Op, left: Term, right: Term) -> Self {
        Term::App(op, Box::new(left), Box::new(right))
    }

    /// Number of leaves, i.e. variable occurrences.
    pub fn leaves(&self) -> u32 {
        match self {
            Term::Var(_) => 1,
            Term::App(_, l, r) => l.leaves() + r.leaves(),
        }
    }

    fn collect_vars(&self, order: &mut Vec<u32>) {
        match self {
            Term::Var(v) => {
                if !order.contains(v) {
                    order.push(*v);
                }
            }
            Term::App(_, l, r) => {
                l.collect_vars(order);
                r.collect_vars(order);
            }
        }
    }

    fn rename(&self, map: &[u32]) -> Term {
        match self {
            Term::Var(v) => {
                let slot = map.iter().position(|x| x == v).unwrap();
                Term::Var(slot as u32 + 1)
            }
            Term::App(op, l, r) => Term::app(*op, l.rename(map), r.rename(map)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(out, "x{v}"),
            Term::App(op, l, r) => write!(out, "{op}({l},{r})"),
        }
    }
}

/// A universally closed equation in canonical form. Construct via
/// [`canonicalize`] or the parser so the invariants hold.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Equation {
    lhs: Term,
    rhs: Term,
    nvars: u32,
}

impl Equation {
    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    /// Number of distinct (universally quantified) variables.
    pub fn nvars(&self) -> u32 {
        self.nvars
    }

    /// Formula length: variable occurrences on both sides, with multiplicity.
    pub fn length(&self) -> u32 {
        self.lhs.leaves() + self.rhs.leaves()
    }

    pub fn is_reflexive(&self) -> bool {
        self.lhs == self.rhs
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{} = {}", self.lhs, self.rhs)
    }
}

fn canon_pair(lhs: &Term, rhs: &Term) -> (Term, Term, u32) {
    let mut order = Vec::new();
    lhs.collect_vars(&mut order);
    rhs.collect_vars(&mut order);
    (lhs.rename(&order), rhs.rename(&order), order.len() as u32)
}

/// Canonicalize an oriented pair of terms into an [`Equation`]: variables
/// renamed by first occurrence, orientation chosen so the pair is
/// lexicographically smallest.
pub fn canonicalize(lhs: &Term, rhs: &Term) -> Equation {
    let (al, ar, an) = canon_pair(lhs, rhs);
    let (bl, br, bn) = canon_pair(rhs, lhs);
    if (&al, &ar) <= (&bl, &br) {
        Equation { lhs: al, rhs: ar, nvars: an }
    } else {
        Equation { lhs: bl, rhs: br, nvars: bn }
    }
}

#[derive(Error, Debug, PartialEq, Eq)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    /// 1-based byte position of the error.
    pub offset: usize,
    pub message: String,
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { bytes: text.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, at: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset: at + 1, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.pos < self.bytes.len() && self.bytes[self.pos] == c {
            self.pos += 1;
            Ok(())
        } else {
            self.err(self.pos, format!("expected '{}'", c as char))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.bytes.get(self.pos) {
            Some(b'f') | Some(b'p') => {
                let op = if self.bytes[self.pos] == b'f' { Op::F } else { Op::P };
                self.pos += 1;
                self.expect(b'(')?;
                let left = self.term()?;
                self.expect(b',')?;
                let right = self.term()?;
                self.expect(b')')?;
                Ok(Term::app(op, left, right))
            }
            Some(b'x') => {
                self.pos += 1;
                let digits_start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.pos == digits_start {
                    return self.err(self.pos, "expected variable digits");
                }
                let text = std::str::from_utf8(&self.bytes[digits_start..self.pos]).unwrap();
                let id: u32 = match text.parse() {
                    Ok(id) => id,
                    Err(_) => return self.err(digits_start, "variable id too large"),
                };
                if id == 0 {
                    return self.err(start, "variable id 0 is not allowed");
                }
                Ok(Term::Var(id))
            }
            Some(_) => self.err(self.pos, "expected 'f', 'p' or a variable"),
            None => self.err(self.pos, "unexpected end of input"),
        }
    }

    fn end(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            self.err(self.pos, "unexpected trailing input")
        }
    }
}

/// Parse a term in the grammar `term := var | "f(" term "," term ")" |
/// "p(" term "," term ")"`, `var := "x" digits`. Whitespace between tokens
/// is ignored.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text);
    let t = p.term()?;
    p.end()?;
    Ok(t)
}

/// Parse `lhs = rhs` and canonicalize.
pub fn parse_equation(text: &str) -> Result<Equation, ParseError> {
    let mut p = Parser::new(text);
    let lhs = p.term()?;
    p.expect(b'=')?;
    let rhs = p.term()?;
    p.end()?;
    Ok(canonicalize(&lhs, &rhs))
}

/// Binary tree skeletons with a given leaf count, smaller left subtree
/// first. Skeletons carry Var(0) leaves and F internal nodes; operators
/// and variables are filled in later.
fn shapes(leaves: u32) -> Vec<Term> {
    if leaves == 1 {
        return vec![Term::Var(0)];
    }
    let mut out = Vec::new();
    for left in 1..leaves {
        for l in shapes(left) {
            for r in shapes(leaves - left) {
                out.push(Term::app(Op::F, l.clone(), r.clone()));
            }
        }
    }
    out
}

/// Fill a skeleton with operators (by preorder internal-node index, most
/// significant bit first, 0 = f) and leaf variables (left to right).
fn fill(shape: &Term, ops: u32, total_ops: u32, leaf_ids: &[u32]) -> Term {
    fn walk(
        shape: &Term,
        ops: u32,
        total_ops: u32,
        next_op: &mut u32,
        leaf_ids: &mut &[u32],
    ) -> Term {
        match shape {
            Term::Var(_) => {
                let (id, rest) = leaf_ids.split_first().unwrap();
                *leaf_ids = rest;
                Term::Var(*id)
            }
            Term::App(_, l, r) => {
                let slot = *next_op;
                *next_op += 1;
                let op = if (ops >> (total_ops - 1 - slot)) & 1 == 0 { Op::F } else { Op::P };
                let left = walk(l, ops, total_ops, next_op, leaf_ids);
                let right = walk(r, ops, total_ops, next_op, leaf_ids);
                Term::app(op, left, right)
            }
        }
    }
    let mut next_op = 0;
    let mut leaves = leaf_ids;
    walk(shape, ops, total_ops, &mut next_op, &mut leaves)
}

/// Restricted growth strings of a given length in lexicographic order:
/// every canonical variable pattern over that many occurrence positions.
fn growth_strings(len: u32) -> Vec<Vec<u32>> {
    fn rec(len: u32, max_used: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == len as usize {
            out.push(cur.clone());
            return;
        }
        for v in 1..=max_used + 1 {
            cur.push(v);
            rec(len, max_used.max(v), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len as usize);
    rec(len, 0, &mut cur, &mut out);
    out
}

/// All canonical equations of exactly the given length, in the pinned
/// deterministic order: side split (left size ascending), tree shapes,
/// operator assignment, then variable pattern.
pub fn enumerate_formulas(length: u32) -> Vec<Equation> {
    let mut corpus = Vec::new();
    let mut seen = HashSet::new();
    let patterns = growth_strings(length);
    for left_size in 1..length {
        let right_size = length - left_size;
        for lhs_shape in shapes(left_size) {
            for rhs_shape in shapes(right_size) {
                let l_ops = left_size - 1;
                let r_ops = right_size - 1;
                for l_bits in 0..1u32 << l_ops {
                    for r_bits in 0..1u32 << r_ops {
                        for pattern in &patterns {
                            let lhs =
                                fill(&lhs_shape, l_bits, l_ops, &pattern[..left_size as usize]);
                            let rhs =
                                fill(&rhs_shape, r_bits, r_ops, &pattern[left_size as usize..]);
                            let eq = canonicalize(&lhs, &rhs);
                            if seen.insert(eq.clone()) {
                                corpus.push(eq);
                            }
                        }
                    }
                }
            }
        }
    }
    corpus
}

/// The i-th constant: `c(0) = p(f(x1,x1), f(x1,x1))`,
/// `c(i+1) = p(f(x1,x1), c(i))`.
pub fn build_constant(i: u32) -> Term {
    let faa = Term::app(Op::F, Term::Var(1), Term::Var(1));
    let mut c = Term::app(Op::P, faa.clone(), faa.clone());
    for _ in 0..i {
        c = Term::app(Op::P, faa.clone(), c);
    }
    c
}

/// An axiom system: a set of equations, usually a subset of a fixed-length
/// corpus in corpus order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomSystem {
    /// Subset bitmask over the corpus, when the system came from one.
    pub id: Option<u64>,
    axioms: Vec<Equation>,
}

impl AxiomSystem {
    /// Build from explicit axioms; duplicates (equal after
    /// canonicalization) are dropped, keeping first occurrence.
    pub fn from_axioms(axioms: Vec<Equation>) -> Self {
        let mut seen = HashSet::new();
        let axioms = axioms.into_iter().filter(|a| seen.insert(a.clone())).collect();
        Self { id: None, axioms }
    }

    /// The subset of `corpus` selected by `mask` (bit i = corpus[i]);
    /// corpus entries beyond the mask width are never selected.
    pub fn from_mask(corpus: &[Equation], mask: u64) -> Self {
        let axioms = corpus
            .iter()
            .enumerate()
            .filter(|(i, _)| *i < 64 && (mask >> i) & 1 == 1)
            .map(|(_, eq)| eq.clone())
            .collect();
        Self { id: Some(mask), axioms }
    }

    pub fn axioms(&self) -> &[Equation] {
        &self.axioms
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    /// The system with one axiom removed (for independence checks).
    pub fn without(&self, index: usize) -> AxiomSystem {
        let mut axioms = self.axioms.clone();
        axioms.remove(index);
        Self { id: None, axioms }
    }
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum SystemsError {
    #[error("corpus of {0} formulas has more subsets than a u64 mask can index; a sample limit is required")]
    CorpusTooLarge(usize),
}

/// Stream axiom systems as ascending subset masks over the corpus,
/// starting from the empty system (mask 0). `limit` caps the stream to an
/// initial segment.
pub fn generate_axiom_systems<'a>(
    corpus: &'a [Equation],
    limit: Option<u64>,
) -> Result<impl Iterator<Item = AxiomSystem> + 'a, SystemsError> {
    let total = if corpus.len() >= 64 {
        match limit {
            Some(_) => u64::MAX,
            None => return Err(SystemsError::CorpusTooLarge(corpus.len())),
        }
    } else {
        1u64 << corpus.len()
    };
    let end = limit.map_or(total, |l| l.min(total));
    Ok((0..end).map(move |mask| AxiomSystem::from_mask(corpus, mask)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn var(i: u32) -> Term {
        Term::Var(i)
    }

    #[test]
    fn parse_examples() {
        let t = parse_term("f(f(x2,x3),x1)").unwrap();
        assert_eq!(t, Term::app(Op::F, Term::app(Op::F, var(2), var(3)), var(1)));
        assert_eq!(parse_term("x1").unwrap(), var(1));
        assert_eq!(parse_term("  f( x1 ,\tp(x2,x1) ) ").unwrap().to_string(), "f(x1,p(x2,x1))");
    }

    #[test]
    fn parse_error_offsets() {
        let e = parse_term("f(x1").unwrap_err();
        assert_eq!(e.offset, 5);
        let e = parse_term("x0").unwrap_err();
        assert_eq!(e.offset, 1);
        assert!(parse_term("f(x1,x2))").is_err());
        assert!(parse_term("q(x1,x2)").is_err());
        assert!(parse_term("x").is_err());
    }

    #[test]
    fn canonicalize_examples() {
        let eq = canonicalize(&var(7), &Term::app(Op::F, var(7), var(9)));
        assert_eq!(eq.to_string(), "x1 = f(x1,x2)");
        let eq = canonicalize(&Term::app(Op::F, var(1), var(1)), &var(1));
        assert_eq!(eq.to_string(), "x1 = f(x1,x1)");
        assert_eq!(eq.nvars(), 1);
        assert_eq!(eq.length(), 3);
    }

    fn term_strategy() -> impl Strategy<Value = Term> {
        let leaf = (1u32..5).prop_map(Term::Var);
        leaf.prop_recursive(4, 16, 2, |inner| {
            (prop_oneof![Just(Op::F), Just(Op::P)], inner.clone(), inner)
                .prop_map(|(op, l, r)| Term::app(op, l, r))
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(t in term_strategy()) {
            prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t);
        }

        #[test]
        fn canonicalize_symmetric(a in term_strategy(), b in term_strategy()) {
            prop_assert_eq!(canonicalize(&a, &b), canonicalize(&b, &a));
        }

        #[test]
        fn canonicalize_idempotent(a in term_strategy(), b in term_strategy()) {
            let eq = canonicalize(&a, &b);
            prop_assert_eq!(canonicalize(eq.lhs(), eq.rhs()), eq);
        }

        #[test]
        fn equation_round_trips_through_text(a in term_strategy(), b in term_strategy()) {
            let eq = canonicalize(&a, &b);
            prop_assert_eq!(parse_equation(&eq.to_string()).unwrap(), eq);
        }
    }

    #[test]
    fn no_formulas_of_length_one() {
        assert!(enumerate_formulas(1).is_empty());
    }

    #[test]
    fn length_two_corpus() {
        let corpus = enumerate_formulas(2);
        let texts: Vec<String> = corpus.iter().map(|e| e.to_string()).collect();
        assert_eq!(texts, ["x1 = x1", "x1 = x2"]);
    }

    #[test]
    fn length_three_corpus_is_the_ten() {
        let corpus = enumerate_formulas(3);
        let texts: Vec<String> = corpus.iter().map(|e| e.to_string()).collect();
        assert_eq!(
            texts,
            [
                "x1 = f(x1,x1)",
                "x1 = f(x1,x2)",
                "x1 = f(x2,x1)",
                "x1 = f(x2,x2)",
                "x1 = f(x2,x3)",
                "x1 = p(x1,x1)",
                "x1 = p(x1,x2)",
                "x1 = p(x2,x1)",
                "x1 = p(x2,x2)",
                "x1 = p(x2,x3)",
            ]
        );
    }

    /// Independent brute-force corpus oracle: all ordered term pairs with
    /// the right total leaf count, every leaf labeled with every variable
    /// id up to the length, canonicalized and deduped.
    fn oracle_corpus(length: u32) -> HashSet<Equation> {
        fn all_terms(leaves: u32, max_var: u32) -> Vec<Term> {
            if leaves == 1 {
                return (1..=max_var).map(Term::Var).collect();
            }
            let mut out = Vec::new();
            for left in 1..leaves {
                for l in all_terms(left, max_var) {
                    for r in all_terms(leaves - left, max_var) {
                        for op in [Op::F, Op::P] {
                            out.push(Term::app(op, l.clone(), r.clone()));
                        }
                    }
                }
            }
            out
        }
        let mut set = HashSet::new();
        for left in 1..length {
            for l in all_terms(left, length) {
                for r in all_terms(length - left, length) {
                    set.insert(canonicalize(&l, &r));
                }
            }
        }
        set
    }

    #[test]
    fn corpus_matches_oracle_up_to_four() {
        for length in 1..=4 {
            let corpus = enumerate_formulas(length);
            let as_set: HashSet<Equation> = corpus.iter().cloned().collect();
            assert_eq!(as_set.len(), corpus.len(), "corpus has duplicates at L={length}");
            assert_eq!(as_set, oracle_corpus(length), "corpus mismatch at L={length}");
        }
    }

    #[test]
    fn length_four_count_is_frozen() {
        // Oracle-computed cardinality; the published corpus size for
        // length 4 is 161, see DISCREPANCY.md.
        assert_eq!(enumerate_formulas(4).len(), 157);
    }

    #[test]
    fn corpus_members_have_exact_length() {
        for length in 2..=4 {
            for eq in enumerate_formulas(length) {
                assert_eq!(eq.length(), length);
                assert!(eq.nvars() <= length);
            }
        }
    }

    #[test]
    fn example_formulas_are_corpus_members() {
        let l3 = enumerate_formulas(3);
        for text in ["x1 = f(x2, x1)", "x1 = p(x1, x2)"] {
            let eq = parse_equation(text).unwrap();
            assert!(l3.contains(&eq), "{text} missing from L=3 corpus");
        }
        let l4 = enumerate_formulas(4);
        for text in ["x1 = f(f(x2, x3), x1)", "x1 = p(f(x2, x3), x4)"] {
            let eq = parse_equation(text).unwrap();
            assert_eq!(eq.length(), 4);
            assert!(l4.contains(&eq), "{text} missing from L=4 corpus");
        }
    }

    #[test]
    fn constants_unfold() {
        assert_eq!(build_constant(0).to_string(), "p(f(x1,x1),f(x1,x1))");
        assert_eq!(build_constant(1).to_string(), "p(f(x1,x1),p(f(x1,x1),f(x1,x1)))");
        for i in 0..=6 {
            assert_eq!(build_constant(i).leaves(), 2 * i + 4);
        }
    }

    #[test]
    fn axiom_systems_over_length_three() {
        let corpus = enumerate_formulas(3);
        let systems: Vec<AxiomSystem> = generate_axiom_systems(&corpus, None).unwrap().collect();
        assert_eq!(systems.len(), 1024);
        assert!(systems[0].is_empty());
        assert_eq!(systems[3].axioms(), &[corpus[0].clone(), corpus[1].clone()]);
        assert_eq!(systems[1023].len(), 10);
    }

    #[test]
    fn axiom_systems_initial_segment() {
        let corpus = enumerate_formulas(4);
        let systems: Vec<AxiomSystem> =
            generate_axiom_systems(&corpus, Some(1000)).unwrap().collect();
        assert_eq!(systems.len(), 1000);
        assert_eq!(systems[0].id, Some(0));
        assert_eq!(systems[999].id, Some(999));
        assert!(generate_axiom_systems(&corpus, None).is_err());
    }

    #[test]
    fn from_axioms_dedups_canonical_duplicates() {
        let a = parse_equation("x1 = f(x1,x2)").unwrap();
        let b = parse_equation("f(x3,x7) = x3").unwrap();
        assert_eq!(a, b);
        let sys = AxiomSystem::from_axioms(vec![a.clone(), b]);
        assert_eq!(sys.axioms(), &[a]);
    }
}
