//! Whole-space sweeps over `(n,2)`: halting-time censuses, Busy Beaver
//! extraction, and output-string censuses.
//!
//! Sweeps are embarrassingly parallel over contiguous index ranges; shard
//! results merge by componentwise addition, so the outcome is identical
//! for any shard count.

use std::collections::{BTreeMap, HashMap};

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::tm::{machine_count, RawRun, Scratch, TmError};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum CensusError {
    #[error(transparent)]
    Tm(#[from] TmError),
    #[error("step {t} is beyond the census budget {budget}")]
    StepBeyondBudget { t: u64, budget: u64 },
    #[error("census has no halting machines")]
    NoHalters,
    #[error("output census supports budgets up to 63 steps, got {0}")]
    OutputBudgetTooLarge(u64),
}

/// Exact halting-time histogram for one `(n,2)` space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaltingCensus {
    pub n: u32,
    pub budget: u64,
    /// Machines halting at exactly `t` transitions, for each observed `t`.
    pub counts: BTreeMap<u64, u64>,
    /// Machines that did not halt within the budget.
    pub nonhalting: u64,
    pub total: u64,
}

impl HaltingCensus {
    pub fn halting_total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn max_halting_time(&self) -> Option<u64> {
        self.counts.keys().next_back().copied()
    }

    /// Build a census from known counts (fixture tables, tests).
    pub fn from_counts(
        n: u32,
        budget: u64,
        counts: BTreeMap<u64, u64>,
        nonhalting: u64,
    ) -> Result<Self, CensusError> {
        let total = machine_count(n)?;
        let c = Self { n, budget, counts, nonhalting, total };
        debug_assert_eq!(c.halting_total() + c.nonhalting, c.total);
        Ok(c)
    }
}

/// A bin of the halting census: a halting time or the non-halting mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensusBin {
    Step(u64),
    NonHalting,
}

fn shard_ranges(total: u64, shards: usize) -> Vec<(u64, u64)> {
    let shards = shards.max(1) as u64;
    let chunk = total / shards;
    let rem = total % shards;
    let mut ranges = Vec::with_capacity(shards as usize);
    let mut start = 0;
    for s in 0..shards {
        let len = chunk + u64::from(s < rem);
        ranges.push((start, start + len));
        start += len;
    }
    ranges
}

/// Run every machine in a contiguous index range once, feeding each outcome
/// to `observe`. The scratch tape is cleared between machines.
fn sweep<T, F>(n: u32, budget: u64, range: (u64, u64), mut acc: T, mut observe: F) -> T
where
    F: FnMut(&mut T, u64, &Scratch, &RawRun),
{
    let mut scratch = Scratch::new(budget);
    for index in range.0..range.1 {
        scratch.load(index, n);
        let raw = scratch.run(budget);
        observe(&mut acc, index, &scratch, &raw);
        scratch.clear(&raw);
    }
    acc
}

fn sweep_sharded<T, F>(
    n: u32,
    budget: u64,
    shards: usize,
    init: impl Fn() -> T + Sync,
    observe: F,
) -> Result<Vec<T>, CensusError>
where
    T: Send,
    F: Fn(&mut T, u64, &Scratch, &RawRun) + Sync,
{
    let total = machine_count(n)?;
    let ranges = shard_ranges(total, shards);
    Ok(ranges
        .into_par_iter()
        .map(|range| sweep(n, budget, range, init(), |acc, i, s, r| observe(acc, i, s, r)))
        .collect())
}

/// Exhaustive halting census of `(n,2)` under a step budget.
///
/// Every index is run exactly once; the result is independent of the shard
/// count because shard histograms merge by addition.
pub fn run_census(n: u32, budget: u64, shards: usize) -> Result<HaltingCensus, CensusError> {
    assert!(budget >= 1, "budget must be at least 1");
    struct Part {
        by_step: Vec<u64>,
        nonhalting: u64,
    }
    let parts = sweep_sharded(
        n,
        budget,
        shards,
        || Part { by_step: vec![0; budget as usize + 1], nonhalting: 0 },
        |part, _i, _s, raw| {
            if raw.halted {
                part.by_step[raw.steps as usize] += 1;
            } else {
                part.nonhalting += 1;
            }
        },
    )?;

    let mut counts = BTreeMap::new();
    let mut nonhalting = 0;
    for part in parts {
        nonhalting += part.nonhalting;
        for (t, c) in part.by_step.iter().enumerate() {
            if *c > 0 {
                *counts.entry(t as u64).or_insert(0) += c;
            }
        }
    }
    let total = machine_count(n)?;
    let census = HaltingCensus { n, budget, counts, nonhalting, total };
    assert_eq!(
        census.halting_total() + census.nonhalting,
        census.total,
        "census partition violated"
    );
    Ok(census)
}

/// Halting time of every machine in index order; `None` marks machines
/// that exceeded the budget. Feeds the field renderer.
pub fn collect_runtimes(
    n: u32,
    budget: u64,
    shards: usize,
) -> Result<Vec<Option<u32>>, CensusError> {
    let parts = sweep_sharded(
        n,
        budget,
        shards,
        Vec::new,
        |part: &mut Vec<Option<u32>>, _i, _s, raw| {
            part.push(raw.halted.then_some(raw.steps as u32));
        },
    )?;
    let total = machine_count(n)? as usize;
    let mut out = Vec::with_capacity(total);
    for part in parts {
        out.extend(part);
    }
    debug_assert_eq!(out.len(), total);
    Ok(out)
}

/// Exact halting probability of one bin: `counts[t] / total` or
/// `nonhalting / total`.
pub fn halting_probability(c: &HaltingCensus, bin: CensusBin) -> Result<Ratio<u64>, CensusError> {
    let count = match bin {
        CensusBin::NonHalting => c.nonhalting,
        CensusBin::Step(t) => {
            if t > c.budget {
                return Err(CensusError::StepBeyondBudget { t, budget: c.budget });
            }
            c.counts.get(&t).copied().unwrap_or(0)
        }
    };
    Ok(Ratio::new(count, c.total))
}

/// Fraction of *halting* machines that halted by step `t`, for every
/// `t` up to the maximum observed halting time.
pub fn cumulative_halting(c: &HaltingCensus) -> Result<BTreeMap<u64, Ratio<u64>>, CensusError> {
    let halters = c.halting_total();
    if halters == 0 {
        return Err(CensusError::NoHalters);
    }
    let max_t = c.max_halting_time().unwrap();
    let mut out = BTreeMap::new();
    let mut acc = 0;
    for t in 1..=max_t {
        acc += c.counts.get(&t).copied().unwrap_or(0);
        out.insert(t, Ratio::new(acc, halters));
    }
    Ok(out)
}

/// Busy Beaver record for one space: the maxima over halting machines and
/// every index attaining them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BusyBeaverRecord {
    pub n: u32,
    pub budget: u64,
    /// Maximum halting time observed (S when the budget covers it).
    pub s_observed: u64,
    /// Maximum number of 1s left on the tape (Σ when the budget covers it).
    pub sigma_observed: u64,
    /// Indexes halting in exactly `s_observed` steps, ascending.
    pub step_champions: Vec<u64>,
    /// Indexes leaving exactly `sigma_observed` ones, ascending.
    pub ones_champions: Vec<u64>,
}

/// Exhaustive Busy Beaver extraction: first pass finds the maxima, second
/// collects the champions, so transient champion lists never grow large.
pub fn busy_beaver(n: u32, budget: u64, shards: usize) -> Result<BusyBeaverRecord, CensusError> {
    let maxima = sweep_sharded(
        n,
        budget,
        shards,
        || (0u64, 0u64),
        |acc, _i, scratch, raw| {
            if raw.halted {
                acc.0 = acc.0.max(raw.steps);
                acc.1 = acc.1.max(scratch.ones(raw));
            }
        },
    )?;
    let s_observed = maxima.iter().map(|m| m.0).max().unwrap_or(0);
    let sigma_observed = maxima.iter().map(|m| m.1).max().unwrap_or(0);

    let parts = sweep_sharded(
        n,
        budget,
        shards,
        || (Vec::new(), Vec::new()),
        |acc: &mut (Vec<u64>, Vec<u64>), i, scratch, raw| {
            if raw.halted {
                if raw.steps == s_observed {
                    acc.0.push(i);
                }
                if scratch.ones(raw) == sigma_observed {
                    acc.1.push(i);
                }
            }
        },
    )?;
    let mut step_champions = Vec::new();
    let mut ones_champions = Vec::new();
    for (s, o) in parts {
        step_champions.extend(s);
        ones_champions.extend(o);
    }
    Ok(BusyBeaverRecord { n, budget, s_observed, sigma_observed, step_champions, ones_champions })
}

/// The reference curve for the `(3,2)` halting tail: `100 * 2^(14 - t)`.
pub fn fit_reference(t: u64) -> f64 {
    100.0 * 2f64.powi(14 - t as i32)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub t: u64,
    pub count: u64,
    pub fit: f64,
    pub ratio: f64,
}

/// Census counts next to the reference curve, one row per observed step.
pub fn fit_table(c: &HaltingCensus) -> Vec<FitRow> {
    c.counts
        .iter()
        .map(|(&t, &count)| {
            let fit = fit_reference(t);
            FitRow { t, count, fit, ratio: count as f64 / fit }
        })
        .collect()
}

/// Which tape interval an output string is read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputRule {
    /// Tape contents over the whole interval of visited head positions.
    VisitedExtent,
    /// The same interval with leading and trailing blanks removed.
    Trimmed,
}

/// Census of output strings over the halting machines of one space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputCensus {
    pub n: u32,
    pub budget: u64,
    pub rule: OutputRule,
    pub outputs: BTreeMap<String, u64>,
    pub distinct: usize,
    pub longest: usize,
}

impl OutputCensus {
    pub fn halting_total(&self) -> u64 {
        self.outputs.values().sum()
    }

    /// Machines whose output is a single symbol, under this census's rule.
    pub fn single_symbol_count(&self) -> u64 {
        self.outputs.iter().filter(|(s, _)| s.len() == 1).map(|(_, c)| c).sum()
    }
}

fn packed_to_string(len: u8, w0: u64, w1: u64) -> String {
    (0..len as usize)
        .map(|i| {
            let bit = if i < 64 { (w0 >> i) & 1 } else { (w1 >> (i - 64)) & 1 };
            if bit == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

fn trim_packed(len: u8, w0: u64, w1: u64) -> (u8, u64, u64) {
    let mut lo = None;
    let mut hi = 0;
    for i in 0..len as usize {
        let bit = if i < 64 { (w0 >> i) & 1 } else { (w1 >> (i - 64)) & 1 };
        if bit == 1 {
            if lo.is_none() {
                lo = Some(i);
            }
            hi = i;
        }
    }
    let Some(lo) = lo else { return (0, 0, 0) };
    let len = (hi - lo + 1) as u8;
    let mut out = [0u64; 2];
    for i in lo..=hi {
        let bit = if i < 64 { (w0 >> i) & 1 } else { (w1 >> (i - 64)) & 1 };
        if bit == 1 {
            let j = i - lo;
            out[j / 64] |= 1 << (j % 64);
        }
    }
    (len, out[0], out[1])
}

/// Census of the distinct output strings produced by halting machines.
pub fn output_census(
    n: u32,
    budget: u64,
    rule: OutputRule,
    shards: usize,
) -> Result<OutputCensus, CensusError> {
    if budget > 63 {
        return Err(CensusError::OutputBudgetTooLarge(budget));
    }
    let parts = sweep_sharded(
        n,
        budget,
        shards,
        HashMap::<(u8, u64, u64), u64>::new,
        |map, _i, scratch, raw| {
            if raw.halted {
                let mut key = scratch.packed_output(raw);
                if rule == OutputRule::Trimmed {
                    key = trim_packed(key.0, key.1, key.2);
                }
                *map.entry(key).or_insert(0) += 1;
            }
        },
    )?;
    let mut merged: HashMap<(u8, u64, u64), u64> = HashMap::new();
    for part in parts {
        for (k, v) in part {
            *merged.entry(k).or_insert(0) += v;
        }
    }
    let outputs: BTreeMap<String, u64> =
        merged.into_iter().map(|((len, w0, w1), c)| (packed_to_string(len, w0, w1), c)).collect();
    let distinct = outputs.len();
    let longest = outputs.keys().map(|s| s.len()).max().unwrap_or(0);
    Ok(OutputCensus { n, budget, rule, outputs, distinct, longest })
}
