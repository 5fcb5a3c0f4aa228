//! Finite model finding: the disproof half of the prover.
//!
//! A model interprets `f` and `p` as total operations over a domain
//! `0..k`. A goal is disproved by a model that satisfies every axiom
//! under all variable assignments and falsifies the goal under at least
//! one. Search is complete backtracking over table cells with partial-
//! evaluation pruning, capped by a node budget; for k <= 2 the space is
//! tiny and the sweep is effectively exhaustive enumeration.

use crate::terms::{AxiomSystem, Equation, Op, Term};

/// Interpretation of `f` and `p` over the domain `0..k`; tables are
/// row-major (`table[a * k + b]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteModel {
    pub k: u32,
    pub f_table: Vec<u8>,
    pub p_table: Vec<u8>,
}

impl FiniteModel {
    fn table(&self, op: Op) -> &[u8] {
        match op {
            Op::F => &self.f_table,
            Op::P => &self.p_table,
        }
    }

    pub fn eval(&self, term: &Term, assign: &[u8]) -> u8 {
        match term {
            Term::Var(v) => assign[*v as usize - 1],
            Term::App(op, l, r) => {
                let a = self.eval(l, assign) as usize;
                let b = self.eval(r, assign) as usize;
                self.table(*op)[a * self.k as usize + b]
            }
        }
    }
}

fn assignments(k: u32, nvars: u32) -> impl Iterator<Item = Vec<u8>> {
    let total = (k as u64).pow(nvars);
    (0..total).map(move |mut idx| {
        (0..nvars)
            .map(|_| {
                let v = (idx % k as u64) as u8;
                idx /= k as u64;
                v
            })
            .collect()
    })
}

/// Assignment tables precomputed once per search, walked on every
/// backtracking node.
struct EquationTable<'a> {
    eq: &'a Equation,
    assigns: Vec<Vec<u8>>,
}

impl<'a> EquationTable<'a> {
    fn new(eq: &'a Equation, k: u32) -> Self {
        Self { eq, assigns: assignments(k, eq.nvars()).collect() }
    }
}

/// Does the equation hold under every assignment of its variables?
pub fn equation_holds(model: &FiniteModel, eq: &Equation) -> bool {
    assignments(model.k, eq.nvars())
        .all(|a| model.eval(eq.lhs(), &a) == model.eval(eq.rhs(), &a))
}

/// Does the model satisfy every axiom of the system?
pub fn model_satisfies_system(model: &FiniteModel, system: &AxiomSystem) -> bool {
    system.axioms().iter().all(|ax| equation_holds(model, ax))
}

/// Does some assignment falsify the goal in this model?
pub fn model_falsifies(model: &FiniteModel, goal: &Equation) -> bool {
    !equation_holds(model, goal)
}

/// Full check that a model witnesses a disproof.
pub fn verify_disproof(model: &FiniteModel, system: &AxiomSystem, goal: &Equation) -> bool {
    model_satisfies_system(model, system) && model_falsifies(model, goal)
}

struct PartialModel {
    k: usize,
    f_table: Vec<Option<u8>>,
    p_table: Vec<Option<u8>>,
}

impl PartialModel {
    fn new(k: usize) -> Self {
        Self { k, f_table: vec![None; k * k], p_table: vec![None; k * k] }
    }

    fn table(&self, op: Op) -> &[Option<u8>] {
        match op {
            Op::F => &self.f_table,
            Op::P => &self.p_table,
        }
    }

    fn eval(&self, term: &Term, assign: &[u8]) -> Option<u8> {
        match term {
            Term::Var(v) => Some(assign[*v as usize - 1]),
            Term::App(op, l, r) => {
                let a = self.eval(l, assign)? as usize;
                let b = self.eval(r, assign)? as usize;
                self.table(*op)[a * self.k + b]
            }
        }
    }

    /// An axiom is violated when some assignment evaluates both sides to
    /// known, different values.
    fn axiom_possible(&self, table: &EquationTable) -> bool {
        table.assigns.iter().all(|a| {
            match (self.eval(table.eq.lhs(), a), self.eval(table.eq.rhs(), a)) {
                (Some(x), Some(y)) => x == y,
                _ => true,
            }
        })
    }

    /// The goal can still be falsified unless every assignment already
    /// evaluates to known, equal values.
    fn falsification_possible(&self, table: &EquationTable) -> bool {
        table.assigns.iter().any(|a| {
            match (self.eval(table.eq.lhs(), a), self.eval(table.eq.rhs(), a)) {
                (Some(x), Some(y)) => x != y,
                _ => true,
            }
        })
    }

    fn freeze(&self) -> FiniteModel {
        FiniteModel {
            k: self.k as u32,
            f_table: self.f_table.iter().map(|c| c.unwrap()).collect(),
            p_table: self.p_table.iter().map(|c| c.unwrap()).collect(),
        }
    }
}

pub(crate) struct ModelSearch {
    pub model: Option<FiniteModel>,
    /// The node cap stopped the search before it was complete.
    pub capped: bool,
}

/// Complete backtracking search for a model of all `axioms` over domain
/// size `k`, additionally falsifying `falsify` when given. Cells are
/// assigned in a fixed order (f table row-major, then p table), values
/// ascending, so the first model found is deterministic.
pub(crate) fn search_model(
    axioms: &[Equation],
    falsify: Option<&Equation>,
    k: u32,
    node_cap: u64,
) -> ModelSearch {
    let mut partial = PartialModel::new(k as usize);
    let cells = 2 * (k as usize) * (k as usize);
    let mut nodes: u64 = 0;
    let axiom_tables: Vec<EquationTable> =
        axioms.iter().map(|ax| EquationTable::new(ax, k)).collect();
    let falsify_table = falsify.map(|g| EquationTable::new(g, k));

    fn rec(
        partial: &mut PartialModel,
        axioms: &[EquationTable],
        falsify: Option<&EquationTable>,
        cell: usize,
        cells: usize,
        nodes: &mut u64,
        node_cap: u64,
    ) -> Result<Option<FiniteModel>, ()> {
        *nodes += 1;
        if *nodes > node_cap {
            return Err(());
        }
        if !axioms.iter().all(|ax| partial.axiom_possible(ax)) {
            return Ok(None);
        }
        if let Some(goal) = falsify {
            if !partial.falsification_possible(goal) {
                return Ok(None);
            }
        }
        if cell == cells {
            let model = partial.freeze();
            let ok = match falsify {
                Some(goal) => model_falsifies(&model, goal.eq),
                None => true,
            };
            return Ok(ok.then_some(model));
        }
        let half = cells / 2;
        let k = partial.k as u8;
        for v in 0..k {
            {
                let slot = if cell < half {
                    &mut partial.f_table[cell]
                } else {
                    &mut partial.p_table[cell - half]
                };
                *slot = Some(v);
            }
            if let Some(m) = rec(partial, axioms, falsify, cell + 1, cells, nodes, node_cap)? {
                return Ok(Some(m));
            }
            let slot = if cell < half {
                &mut partial.f_table[cell]
            } else {
                &mut partial.p_table[cell - half]
            };
            *slot = None;
        }
        Ok(None)
    }

    match rec(
        &mut partial,
        &axiom_tables,
        falsify_table.as_ref(),
        0,
        cells,
        &mut nodes,
        node_cap,
    ) {
        Ok(model) => ModelSearch { model, capped: false },
        Err(()) => ModelSearch { model: None, capped: true },
    }
}

/// Smallest countermodel of `goal` under `axioms`, trying domain sizes
/// `1..=max_k` in order.
pub fn find_countermodel(
    axioms: &[Equation],
    goal: &Equation,
    max_k: u32,
    node_cap: u64,
) -> Option<FiniteModel> {
    for k in 1..=max_k {
        if let Some(m) = search_model(axioms, Some(goal), k, node_cap).model {
            return Some(m);
        }
    }
    None
}

/// Every model over domain size `k` that satisfies the system. Exhaustive
/// enumeration; meant for k <= 2 soundness sweeps.
pub fn enumerate_satisfying_models(system: &AxiomSystem, k: u32) -> Vec<FiniteModel> {
    let cells = (k as usize) * (k as usize);
    let total = (k as u64).pow(2 * cells as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut digits = code;
        let mut tables = vec![0u8; 2 * cells];
        for slot in tables.iter_mut() {
            *slot = (digits % k as u64) as u8;
            digits /= k as u64;
        }
        let model = FiniteModel {
            k,
            f_table: tables[..cells].to_vec(),
            p_table: tables[cells..].to_vec(),
        };
        if model_satisfies_system(&model, system) {
            out.push(model);
        }
    }
    out
}
