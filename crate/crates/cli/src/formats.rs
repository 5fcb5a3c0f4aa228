//! Pinned file formats: census CSV/JSON, fit tables, corpus files, axiom
//! system JSONL, truth-space CSV, and finite-model JSON. Each parser
//! round-trips its writer.

use std::fmt::Write as _;

use beaverlab_core::census::{FitRow, HaltingCensus};
use beaverlab_core::prover::{FiniteModel, ProofResult, TruthSpace};
use beaverlab_core::stats::{write_distribution_csv, DecisionDistribution};
use beaverlab_core::terms::{parse_equation, AxiomSystem, Equation};
use num_rational::Ratio;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Structure(String),
}

fn line_err<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Line { line: line + 1, message: message.into() })
}

/// Census CSV is the distribution schema: `t,k_t,p_kt` rows plus the
/// trailing `-` non-halting row.
pub fn census_to_csv(census: &HaltingCensus) -> String {
    write_distribution_csv(&DecisionDistribution::from_halting_census(census))
}

/// Census JSON keeps exact integer counts and reduced rational
/// probabilities as `{num, den}`.
pub fn census_to_json(census: &HaltingCensus) -> String {
    let ratio = |count: u64| {
        let r = Ratio::new(count, census.total);
        serde_json::json!({ "num": *r.numer(), "den": *r.denom() })
    };
    let counts: Vec<serde_json::Value> = census
        .counts
        .iter()
        .map(|(&t, &k)| serde_json::json!({ "t": t, "k": k, "p": ratio(k) }))
        .collect();
    let value = serde_json::json!({
        "n": census.n,
        "budget": census.budget,
        "total": census.total,
        "counts": counts,
        "nonhalting": { "k": census.nonhalting, "p": ratio(census.nonhalting) },
    });
    serde_json::to_string_pretty(&value).expect("census json")
}

pub fn fit_table_to_csv(rows: &[FitRow]) -> String {
    let mut out = String::from("t,k_t,fit,ratio\n");
    for row in rows {
        let _ = writeln!(out, "{},{},{},{}", row.t, row.count, row.fit, row.ratio);
    }
    out
}

/// Corpus file: one canonical formula per line.
pub fn corpus_to_text(corpus: &[Equation]) -> String {
    let mut out = String::new();
    for eq in corpus {
        let _ = writeln!(out, "{eq}");
    }
    out
}

pub fn corpus_from_text(text: &str) -> Result<Vec<Equation>, FormatError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_equation(line) {
            Ok(eq) => out.push(eq),
            Err(e) => return line_err(i, e.to_string()),
        }
    }
    Ok(out)
}

/// Optional consistency/independence annotations for a serialized system.
pub struct SystemRecord {
    pub system: AxiomSystem,
    /// None = not checked; Some(None) = checked, unknown.
    pub consistent: Option<Option<bool>>,
    pub independent: Option<Option<bool>>,
}

pub fn systems_to_jsonl(records: &[SystemRecord]) -> String {
    let mut out = String::new();
    for rec in records {
        let axioms: Vec<String> = rec.system.axioms().iter().map(|a| a.to_string()).collect();
        let mut obj = serde_json::Map::new();
        if let Some(id) = rec.system.id {
            obj.insert("id".into(), serde_json::json!(id));
        }
        obj.insert("axioms".into(), serde_json::json!(axioms));
        if let Some(c) = &rec.consistent {
            obj.insert("consistent".into(), serde_json::json!(c));
        }
        if let Some(ind) = &rec.independent {
            obj.insert("independent".into(), serde_json::json!(ind));
        }
        let _ = writeln!(out, "{}", serde_json::Value::Object(obj));
    }
    out
}

pub fn systems_from_jsonl(text: &str) -> Result<Vec<AxiomSystem>, FormatError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(line).map_err(|e| FormatError::Line {
                line: i + 1,
                message: e.to_string(),
            })?;
        let axiom_texts = value["axioms"]
            .as_array()
            .ok_or_else(|| FormatError::Line { line: i + 1, message: "missing axioms".into() })?;
        let mut axioms = Vec::new();
        for t in axiom_texts {
            let text = t
                .as_str()
                .ok_or_else(|| FormatError::Line { line: i + 1, message: "axiom not a string".into() })?;
            axioms.push(parse_equation(text).map_err(|e| FormatError::Line {
                line: i + 1,
                message: e.to_string(),
            })?);
        }
        let mut system = AxiomSystem::from_axioms(axioms);
        system.id = value["id"].as_u64();
        out.push(system);
    }
    Ok(out)
}

/// Model JSON: `{"k":2,"f":[[...],[...]],"p":[[...],[...]]}` with
/// `f[a][b]` the value at row a, column b.
pub fn model_to_json(model: &FiniteModel) -> String {
    let rows = |table: &[u8]| -> Vec<Vec<u8>> {
        (0..model.k as usize)
            .map(|a| table[a * model.k as usize..(a + 1) * model.k as usize].to_vec())
            .collect()
    };
    serde_json::json!({
        "k": model.k,
        "f": rows(&model.f_table),
        "p": rows(&model.p_table),
    })
    .to_string()
}

pub fn model_from_json(text: &str) -> Result<FiniteModel, FormatError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| FormatError::Structure(e.to_string()))?;
    let k = value["k"].as_u64().ok_or_else(|| FormatError::Structure("missing k".into()))? as u32;
    let table = |name: &str| -> Result<Vec<u8>, FormatError> {
        let rows = value[name]
            .as_array()
            .ok_or_else(|| FormatError::Structure(format!("missing {name}")))?;
        let mut out = Vec::new();
        for row in rows {
            for cell in row
                .as_array()
                .ok_or_else(|| FormatError::Structure("row not an array".into()))?
            {
                out.push(cell.as_u64().ok_or_else(|| {
                    FormatError::Structure("cell not an integer".into())
                })? as u8);
            }
        }
        if out.len() != (k * k) as usize {
            return Err(FormatError::Structure(format!("{name} is not k x k")));
        }
        Ok(out)
    };
    Ok(FiniteModel { k, f_table: table("f")?, p_table: table("p")? })
}

/// One truth-space cell as a status code: `P<t>`, `D<k>` or `U`.
pub fn cell_code(result: &ProofResult) -> String {
    match result {
        ProofResult::Proven { length } => format!("P{length}"),
        ProofResult::Disproven { model } => format!("D{}", model.k),
        ProofResult::Undecided(_) => "U".into(),
    }
}

/// Truth-space CSV: header `goal_index,s<id>,...`; one row per corpus
/// goal, cells as status codes. Goal text lives in the sibling corpus
/// file (terms contain commas, so indexes keep the CSV trivial).
pub fn truth_space_to_csv(space: &TruthSpace) -> String {
    let mut out = String::from("goal_index");
    for (i, system) in space.systems.iter().enumerate() {
        match system.id {
            Some(id) => {
                let _ = write!(out, ",s{id}");
            }
            None => {
                let _ = write!(out, ",c{i}");
            }
        }
    }
    out.push('\n');
    for (gi, _) in space.corpus.iter().enumerate() {
        let _ = write!(out, "{gi}");
        for si in 0..space.systems.len() {
            let _ = write!(out, ",{}", cell_code(space.cell(gi, si)));
        }
        out.push('\n');
    }
    out
}

/// Decision times parsed back from a truth-space CSV, row-major; `None`
/// is an undecided cell. Disproofs read as decision time k + 1.
pub fn truth_space_times_from_csv(text: &str) -> Result<Vec<Option<u64>>, FormatError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("goal_index") {
            continue;
        }
        for cell in line.split(',').skip(1) {
            let code = cell.trim();
            if code == "U" {
                out.push(None);
            } else if let Some(t) = code.strip_prefix('P') {
                let t: u64 =
                    t.parse().map_err(|_| FormatError::Line { line: i + 1, message: format!("bad cell '{code}'") })?;
                out.push(Some(t));
            } else if let Some(k) = code.strip_prefix('D') {
                let k: u64 =
                    k.parse().map_err(|_| FormatError::Line { line: i + 1, message: format!("bad cell '{code}'") })?;
                out.push(Some(k + 1));
            } else {
                return line_err(i, format!("bad cell '{code}'"));
            }
        }
    }
    Ok(out)
}
