//! Decision-time statistics shared by the machine census and the proof
//! census: cumulative fractions, optimal timeouts, and the longest
//! decision time of a corpus.
//!
//! All fractions are exact rationals; decimal strings appear only at the
//! presentation layer (6 significant digits).

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::Zero;
use thiserror::Error;

use crate::census::HaltingCensus;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum StatsError {
    #[error("distribution has no decided entries")]
    EmptyDistribution,
    #[error("gamma must satisfy 0 < gamma <= 1")]
    InvalidGamma,
    #[error("gamma {gamma} is unachievable; at most {max} of the distribution is decided")]
    Unachievable { gamma: String, max: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Histogram of decision times: halting steps of machines or decision
/// lengths of formulas. `undecided` holds the non-halting / undecided
/// mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionDistribution {
    pub label: String,
    pub counts: BTreeMap<u64, u64>,
    pub undecided: u64,
    pub total: u64,
}

impl DecisionDistribution {
    pub fn new(label: impl Into<String>, counts: BTreeMap<u64, u64>, undecided: u64) -> Self {
        let decided: u64 = counts.values().sum();
        Self { label: label.into(), counts, undecided, total: decided + undecided }
    }

    pub fn decided(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn decided_fraction(&self) -> Ratio<u64> {
        Ratio::new(self.decided(), self.total)
    }

    pub fn from_halting_census(census: &HaltingCensus) -> Self {
        Self::new(
            format!("({},2) halting census", census.n),
            census.counts.clone(),
            census.nonhalting,
        )
    }
}

/// Which mass the denominator of a fraction covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Denominator {
    /// Everything, undecided included.
    #[default]
    Total,
    /// Decided entries only.
    Decided,
}

fn denominator(d: &DecisionDistribution, denom: Denominator) -> u64 {
    match denom {
        Denominator::Total => d.total,
        Denominator::Decided => d.decided(),
    }
}

/// Exact fraction of the total decided by step `t` (inclusive).
pub fn cumulative_fraction(d: &DecisionDistribution, t: u64) -> Ratio<u64> {
    cumulative_fraction_with(d, t, Denominator::Total)
}

pub fn cumulative_fraction_with(d: &DecisionDistribution, t: u64, denom: Denominator) -> Ratio<u64> {
    let num: u64 = d.counts.range(..=t).map(|(_, c)| c).sum();
    Ratio::new(num, denominator(d, denom))
}

/// Smallest step by which at least a fraction `gamma` is decided.
///
/// The threshold is `>=`: with integer counts an exact-equality reading
/// would be unachievable for most gamma.
pub fn optime(d: &DecisionDistribution, gamma: Ratio<u64>) -> Result<u64, StatsError> {
    optime_with(d, gamma, Denominator::Total)
}

pub fn optime_with(
    d: &DecisionDistribution,
    gamma: Ratio<u64>,
    denom: Denominator,
) -> Result<u64, StatsError> {
    if gamma <= Ratio::zero() || gamma > Ratio::new(1, 1) {
        return Err(StatsError::InvalidGamma);
    }
    let den = denominator(d, denom);
    if den == 0 {
        return Err(StatsError::EmptyDistribution);
    }
    let mut acc: u64 = 0;
    for (&t, &c) in &d.counts {
        acc += c;
        if Ratio::new(acc, den) >= gamma {
            return Ok(t);
        }
    }
    Err(StatsError::Unachievable {
        gamma: render_6sig(gamma),
        max: render_6sig(Ratio::new(acc, den)),
    })
}

/// Busy-Beaver value of the distribution: the largest decision time with
/// nonzero count.
pub fn fbb(d: &DecisionDistribution) -> Result<u64, StatsError> {
    d.counts
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(&t, _)| t)
        .next_back()
        .ok_or(StatsError::EmptyDistribution)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub t: u64,
    pub count_a: u64,
    pub count_b: u64,
    pub fraction_a: Ratio<u64>,
    pub fraction_b: Ratio<u64>,
    pub cumulative_a: Ratio<u64>,
    pub cumulative_b: Ratio<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    /// True when the counts never rise again after their peak.
    pub monotone_tail_a: bool,
    pub monotone_tail_b: bool,
}

/// Is the sequence of per-step counts nonincreasing after its (first)
/// maximum?
pub fn monotone_tail(d: &DecisionDistribution) -> bool {
    let seq: Vec<u64> = d.counts.values().copied().collect();
    let Some(peak) = seq.iter().enumerate().max_by_key(|(i, &c)| (c, std::cmp::Reverse(*i))) else {
        return true;
    };
    seq[peak.0..].windows(2).all(|w| w[0] >= w[1])
}

/// Aligned per-step and cumulative fractions for two distributions, over
/// the union of their observed steps.
pub fn compare_distributions(a: &DecisionDistribution, b: &DecisionDistribution) -> ComparisonTable {
    let ts: std::collections::BTreeSet<u64> =
        a.counts.keys().chain(b.counts.keys()).copied().collect();
    let rows = ts
        .into_iter()
        .map(|t| ComparisonRow {
            t,
            count_a: a.counts.get(&t).copied().unwrap_or(0),
            count_b: b.counts.get(&t).copied().unwrap_or(0),
            fraction_a: Ratio::new(a.counts.get(&t).copied().unwrap_or(0), a.total),
            fraction_b: Ratio::new(b.counts.get(&t).copied().unwrap_or(0), b.total),
            cumulative_a: cumulative_fraction(a, t),
            cumulative_b: cumulative_fraction(b, t),
        })
        .collect();
    ComparisonTable { rows, monotone_tail_a: monotone_tail(a), monotone_tail_b: monotone_tail(b) }
}

/// Outcome of the OPTime/fBB consistency checks on one distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimeChecks {
    /// `optime(1) == fbb` — only checkable when nothing is undecided.
    pub gamma_one_equals_fbb: Option<bool>,
    /// optime is nondecreasing over a gamma grid.
    pub monotone_in_gamma: bool,
    /// Every achievable sampled gamma stays within fbb.
    pub bounded_by_fbb: bool,
}

impl OptimeChecks {
    pub fn all_hold(&self) -> bool {
        self.gamma_one_equals_fbb.unwrap_or(true) && self.monotone_in_gamma && self.bounded_by_fbb
    }
}

/// Check `optime(d, 1) = fbb(d)` (when fully decided) and monotonicity /
/// boundedness of optime over a gamma grid.
pub fn optime_consistency(d: &DecisionDistribution) -> Result<OptimeChecks, StatsError> {
    let fbb_value = fbb(d)?;
    let gamma_one_equals_fbb = if d.undecided == 0 {
        Some(optime(d, Ratio::new(1, 1))? == fbb_value)
    } else {
        match optime(d, Ratio::new(1, 1)) {
            Err(StatsError::Unachievable { .. }) => None,
            Ok(_) => Some(false),
            Err(e) => return Err(e),
        }
    };
    let mut monotone = true;
    let mut bounded = true;
    let mut last: Option<u64> = None;
    for tenths in 1..=9u64 {
        match optime(d, Ratio::new(tenths, 10)) {
            Ok(t) => {
                if let Some(prev) = last {
                    monotone &= prev <= t;
                }
                bounded &= t <= fbb_value;
                last = Some(t);
            }
            Err(StatsError::Unachievable { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(OptimeChecks { gamma_one_equals_fbb, monotone_in_gamma: monotone, bounded_by_fbb: bounded })
}

/// Parse a decimal like "0.95" into an exact rational.
pub fn parse_gamma(text: &str) -> Result<Ratio<u64>, StatsError> {
    let bad = || StatsError::Parse { line: 0, message: format!("invalid gamma '{text}'") };
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let int: u64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
    if frac_part.len() > 18 || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let den = 10u64.pow(frac_part.len() as u32);
    let frac: u64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
    Ok(Ratio::new(int * den + frac, den))
}

/// Render an exact fraction to 6 significant digits.
pub fn render_6sig(r: Ratio<u64>) -> String {
    decimal_sig(*r.numer() as u128, *r.denom() as u128, 6)
}

fn decimal_sig(num: u128, den: u128, sig: u32) -> String {
    assert!(den != 0);
    if num == 0 {
        return "0".into();
    }
    // Exponent e with 10^e <= num/den < 10^(e+1).
    let mut e: i32 = 0;
    let mut lo = num;
    let mut hi = den;
    while lo >= hi * 10 {
        hi *= 10;
        e += 1;
    }
    while lo < hi {
        lo *= 10;
        e -= 1;
    }
    // Round to `sig` significant digits: d decimal places.
    let d = sig as i32 - 1 - e;
    let (scaled, d) = if d >= 0 {
        let scale = 10u128.pow(d as u32);
        ((num * scale + den / 2) / den, d)
    } else {
        let scale = 10u128.pow((-d) as u32);
        let v = (num + den * scale / 2) / (den * scale);
        (v * scale, 0)
    };
    if d == 0 {
        return scaled.to_string();
    }
    let digits = scaled.to_string();
    if digits.len() as i32 > d {
        let split = digits.len() - d as usize;
        format!("{}.{}", &digits[..split], &digits[split..])
    } else {
        format!("0.{}{}", "0".repeat(d as usize - digits.len()), digits)
    }
}

/// Distribution CSV: header `t,k_t,p_kt`, one row per decision time, and a
/// trailing `-` row holding the undecided mass. Probabilities are
/// re-derived from the counts on read.
pub fn write_distribution_csv(d: &DecisionDistribution) -> String {
    let mut out = String::from("t,k_t,p_kt\n");
    for (&t, &c) in &d.counts {
        out.push_str(&format!("{t},{c},{}\n", render_6sig(Ratio::new(c, d.total))));
    }
    out.push_str(&format!("-,{},{}\n", d.undecided, render_6sig(Ratio::new(d.undecided, d.total))));
    out
}

pub fn read_distribution_csv(text: &str, label: &str) -> Result<DecisionDistribution, StatsError> {
    let mut counts = BTreeMap::new();
    let mut undecided = 0u64;
    let mut saw_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "t,k_t,p_kt" {
                return Err(StatsError::Parse {
                    line: i + 1,
                    message: format!("expected header 't,k_t,p_kt', got '{line}'"),
                });
            }
            saw_header = true;
            continue;
        }
        let mut fields = line.split(',');
        let (t, k) = match (fields.next(), fields.next()) {
            (Some(t), Some(k)) => (t, k),
            _ => {
                return Err(StatsError::Parse { line: i + 1, message: "missing fields".into() })
            }
        };
        let count: u64 = k.trim().parse().map_err(|_| StatsError::Parse {
            line: i + 1,
            message: format!("bad count '{k}'"),
        })?;
        if t.trim() == "-" {
            undecided = count;
        } else {
            let t: u64 = t.trim().parse().map_err(|_| StatsError::Parse {
                line: i + 1,
                message: format!("bad step '{t}'"),
            })?;
            if count > 0 {
                counts.insert(t, count);
            }
        }
    }
    if !saw_header {
        return Err(StatsError::Parse { line: 0, message: "empty distribution file".into() });
    }
    Ok(DecisionDistribution::new(label, counts, undecided))
}
