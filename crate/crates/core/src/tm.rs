//! The `(n,2)` Turing machine formalism: bidirectional tape, `n` working
//! states plus a distinguished halting state, and two tape symbols.
//!
//! A table entry either halts (writing a symbol and staying on the same
//! cell) or writes, moves one cell, and switches state. That gives
//! `4n + 2` possible actions per entry and `(4n+2)^(2n)` machines in the
//! space. Machines are enumerated by a pinned mixed-radix code so every
//! index in `[0, (4n+2)^(2n))` names exactly one machine.

use std::fmt;

use thiserror::Error;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum TmError {
    #[error("state count must be at least 1")]
    StateCountZero,
    #[error("machine count (4n+2)^(2n) overflows u64 for n = {0}")]
    CountOverflow(u32),
    #[error("machine index {index} out of range for n = {n} (count {count})")]
    IndexOutOfRange { index: u64, n: u32, count: u64 },
    #[error("malformed machine table: {0}")]
    MalformedTable(String),
}

/// Head movement of a non-halting action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    Left,
    Right,
}

/// One transition-table entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    /// Write `write` on the current cell and stop; the head does not move.
    Halt { write: u8 },
    /// Write `write`, move one cell in `dir`, continue in state `next` (1-based).
    Step { write: u8, dir: Dir, next: u8 },
}

/// A complete `(n,2)` machine: one action per (state, read-symbol) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuringMachine {
    n: u32,
    /// Entry for (state q, symbol s) lives at index `(q-1)*2 + s`.
    table: Vec<Action>,
}

impl TuringMachine {
    pub fn new(n: u32, table: Vec<Action>) -> Result<Self, TmError> {
        if n == 0 {
            return Err(TmError::StateCountZero);
        }
        if table.len() != 2 * n as usize {
            return Err(TmError::MalformedTable(format!(
                "expected {} entries, got {}",
                2 * n,
                table.len()
            )));
        }
        for (i, a) in table.iter().enumerate() {
            match *a {
                Action::Halt { write } if write <= 1 => {}
                Action::Step { write, next, .. } if write <= 1 && (1..=n).contains(&(next as u32)) => {}
                _ => {
                    return Err(TmError::MalformedTable(format!("entry {i} invalid: {a:?}")));
                }
            }
        }
        Ok(Self { n, table })
    }

    pub fn states(&self) -> u32 {
        self.n
    }

    pub fn action(&self, state: u8, symbol: u8) -> Action {
        self.table[(state as usize - 1) * 2 + symbol as usize]
    }

    pub fn table(&self) -> &[Action] {
        &self.table
    }
}

/// Debug text form, one line per entry in pinned order:
/// `q,s -> w,D,q'` for steps and `q,s -> w,HALT` for halting entries.
impl fmt::Display for TuringMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 1..=self.n {
            for s in 0..2u8 {
                match self.action(q as u8, s) {
                    Action::Halt { write } => writeln!(f, "{q},{s} -> {write},HALT")?,
                    Action::Step { write, dir, next } => {
                        let d = match dir {
                            Dir::Left => 'L',
                            Dir::Right => 'R',
                        };
                        writeln!(f, "{q},{s} -> {write},{d},{next}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Exact size of the `(n,2)` space: `(4n+2)^(2n)`.
pub fn machine_count(n: u32) -> Result<u64, TmError> {
    if n == 0 {
        return Err(TmError::StateCountZero);
    }
    let base = 4u64 * n as u64 + 2;
    let mut count: u64 = 1;
    for _ in 0..2 * n {
        count = count.checked_mul(base).ok_or(TmError::CountOverflow(n))?;
    }
    Ok(count)
}

/// Number of actions available per table entry: 2 halting + 4n stepping.
pub fn action_count(n: u32) -> u64 {
    4 * n as u64 + 2
}

fn action_from_digit(digit: u64, n: u32) -> Action {
    debug_assert!(digit < action_count(n));
    match digit {
        0 => Action::Halt { write: 0 },
        1 => Action::Halt { write: 1 },
        d => {
            // d = 2 + write*2n + dir*n + (next-1), with Left = 0, Right = 1.
            let d = d - 2;
            let n = n as u64;
            let write = (d / (2 * n)) as u8;
            let dir = if (d / n).is_multiple_of(2) { Dir::Left } else { Dir::Right };
            let next = (d % n) as u8 + 1;
            Action::Step { write, dir, next }
        }
    }
}

fn digit_from_action(a: Action, n: u32) -> u64 {
    let n = n as u64;
    match a {
        Action::Halt { write } => write as u64,
        Action::Step { write, dir, next } => {
            let dir = match dir {
                Dir::Left => 0,
                Dir::Right => 1,
            };
            2 + write as u64 * 2 * n + dir * n + (next as u64 - 1)
        }
    }
}

pub(crate) fn decode_into(index: u64, n: u32, table: &mut Vec<Action>) {
    let base = action_count(n);
    let entries = 2 * n as usize;
    table.clear();
    table.resize(entries, Action::Halt { write: 0 });
    let mut rest = index;
    // Most significant digit first = entry (state 1, symbol 0).
    for slot in (0..entries).rev() {
        table[slot] = action_from_digit(rest % base, n);
        rest /= base;
    }
}

/// Decode a machine index under the pinned mixed-radix scheme (base `4n+2`,
/// most significant digit = entry for state 1 reading 0).
pub fn decode_machine(index: u64, n: u32) -> Result<TuringMachine, TmError> {
    let count = machine_count(n)?;
    if index >= count {
        return Err(TmError::IndexOutOfRange { index, n, count });
    }
    let mut table = Vec::new();
    decode_into(index, n, &mut table);
    Ok(TuringMachine { n, table })
}

/// Exact inverse of [`decode_machine`].
pub fn encode_machine(m: &TuringMachine) -> Result<u64, TmError> {
    let base = action_count(m.n);
    let mut index: u64 = 0;
    for &a in &m.table {
        index = index * base + digit_from_action(a, m.n);
    }
    Ok(index)
}

/// Unbounded two-sided tape, blank = 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tape {
    pos: Vec<u8>,
    neg: Vec<u8>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, offset: i64) -> u8 {
        if offset >= 0 {
            self.pos.get(offset as usize).copied().unwrap_or(0)
        } else {
            self.neg.get((-offset - 1) as usize).copied().unwrap_or(0)
        }
    }

    pub fn set(&mut self, offset: i64, value: u8) {
        let (vec, i) = if offset >= 0 {
            (&mut self.pos, offset as usize)
        } else {
            (&mut self.neg, (-offset - 1) as usize)
        };
        if vec.len() <= i {
            vec.resize(i + 1, 0);
        }
        vec[i] = value;
    }

    /// Number of nonzero cells on the whole tape.
    pub fn nonzero_cells(&self) -> u64 {
        self.pos.iter().chain(self.neg.iter()).filter(|&&c| c != 0).count() as u64
    }

    pub fn ones_in(&self, left: i64, right: i64) -> u64 {
        (left..=right).filter(|&o| self.get(o) == 1).count() as u64
    }
}

/// A running machine: tape, head offset, current state, steps executed.
#[derive(Debug, Clone)]
pub struct Configuration {
    pub tape: Tape,
    pub head: i64,
    pub state: u8,
    pub steps: u64,
}

impl Configuration {
    /// Empty tape, head on cell 0, state 1, no steps taken.
    pub fn initial() -> Self {
        Self { tape: Tape::new(), head: 0, state: 1, steps: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Running,
    /// The action taken was a halting one; it still counts as a step.
    Halted,
}

/// Apply one transition in place.
pub fn step(m: &TuringMachine, c: &mut Configuration) -> StepOutcome {
    let sym = c.tape.get(c.head);
    match m.action(c.state, sym) {
        Action::Halt { write } => {
            c.tape.set(c.head, write);
            c.steps += 1;
            StepOutcome::Halted
        }
        Action::Step { write, dir, next } => {
            c.tape.set(c.head, write);
            c.head += match dir {
                Dir::Left => -1,
                Dir::Right => 1,
            };
            c.state = next;
            c.steps += 1;
            StepOutcome::Running
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Halted,
    BudgetExceeded,
}

/// Outcome of running a machine from the empty tape.
///
/// `steps` is the number of transitions executed (the halting transition
/// included), `ones` the count of 1s left on the tape, `output` the tape
/// contents over the interval of visited head positions, and `extent` that
/// interval itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub status: RunStatus,
    pub steps: u64,
    pub ones: u64,
    pub output: String,
    pub extent: (i64, i64),
}

impl RunResult {
    /// The output string with leading and trailing blanks removed; the
    /// alternate output rule for the output census.
    pub fn trimmed_output(&self) -> &str {
        self.output.trim_matches('0')
    }
}

/// Run at most `budget` transitions from the initial configuration.
pub fn run(m: &TuringMachine, budget: u64) -> RunResult {
    assert!(budget >= 1, "budget must be at least 1");
    let mut c = Configuration::initial();
    let mut left = 0i64;
    let mut right = 0i64;
    let mut halted = false;
    while c.steps < budget {
        let outcome = step(m, &mut c);
        left = left.min(c.head);
        right = right.max(c.head);
        if outcome == StepOutcome::Halted {
            halted = true;
            break;
        }
    }
    let output: String =
        (left..=right).map(|o| if c.tape.get(o) == 1 { '1' } else { '0' }).collect();
    RunResult {
        status: if halted { RunStatus::Halted } else { RunStatus::BudgetExceeded },
        steps: c.steps,
        ones: c.tape.ones_in(left, right),
        output,
        extent: (left, right),
    }
}

/// Known Busy Beaver step values S(n) for small n.
pub fn known_s(n: u32) -> Option<u64> {
    match n {
        1 => Some(1),
        2 => Some(6),
        3 => Some(21),
        4 => Some(107),
        _ => None,
    }
}

/// Known Busy Beaver ones values Σ(n) for small n.
pub fn known_sigma(n: u32) -> Option<u64> {
    match n {
        1 => Some(1),
        2 => Some(4),
        3 => Some(6),
        4 => Some(13),
        _ => None,
    }
}

/// Reusable flat tape for whole-space sweeps. Head offsets are bounded by
/// the step budget, so a `2*budget + 1` buffer never reallocates.
pub(crate) struct Scratch {
    cells: Vec<u8>,
    origin: usize,
    table: Vec<Action>,
}

pub(crate) struct RawRun {
    pub halted: bool,
    pub steps: u64,
    /// Visited head extent, as offsets relative to the start cell.
    pub left: i64,
    pub right: i64,
}

impl Scratch {
    pub fn new(budget: u64) -> Self {
        let budget = usize::try_from(budget).expect("budget too large for a dense tape");
        Self { cells: vec![0; 2 * budget + 1], origin: budget, table: Vec::new() }
    }

    pub fn load(&mut self, index: u64, n: u32) {
        let mut table = std::mem::take(&mut self.table);
        decode_into(index, n, &mut table);
        self.table = table;
    }

    /// Run the loaded machine. The visited cells are zeroed on entry, so
    /// back-to-back runs are independent.
    pub fn run(&mut self, budget: u64) -> RawRun {
        let mut idx = self.origin;
        let mut lo = idx;
        let mut hi = idx;
        let mut state: u8 = 1;
        let mut steps: u64 = 0;
        let mut halted = false;
        while steps < budget {
            let sym = self.cells[idx];
            match self.table[(state as usize - 1) * 2 + sym as usize] {
                Action::Halt { write } => {
                    self.cells[idx] = write;
                    steps += 1;
                    halted = true;
                    break;
                }
                Action::Step { write, dir, next } => {
                    self.cells[idx] = write;
                    match dir {
                        Dir::Left => idx -= 1,
                        Dir::Right => idx += 1,
                    }
                    lo = lo.min(idx);
                    hi = hi.max(idx);
                    state = next;
                    steps += 1;
                }
            }
        }
        RawRun {
            halted,
            steps,
            left: lo as i64 - self.origin as i64,
            right: hi as i64 - self.origin as i64,
        }
    }

    pub fn ones(&self, raw: &RawRun) -> u64 {
        let lo = (self.origin as i64 + raw.left) as usize;
        let hi = (self.origin as i64 + raw.right) as usize;
        self.cells[lo..=hi].iter().filter(|&&c| c == 1).count() as u64
    }

    /// Output bits over the visited extent, packed low-to-high; extent
    /// widths beyond 128 cells are not supported by the packed form.
    pub fn packed_output(&self, raw: &RawRun) -> (u8, u64, u64) {
        let lo = (self.origin as i64 + raw.left) as usize;
        let hi = (self.origin as i64 + raw.right) as usize;
        let len = hi - lo + 1;
        assert!(len <= 128, "visited extent too wide for packed output");
        let mut words = [0u64; 2];
        for (i, &c) in self.cells[lo..=hi].iter().enumerate() {
            if c == 1 {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        (len as u8, words[0], words[1])
    }

    pub fn clear(&mut self, raw: &RawRun) {
        let lo = (self.origin as i64 + raw.left) as usize;
        let hi = (self.origin as i64 + raw.right) as usize;
        self.cells[lo..=hi].fill(0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_halt(n: u32, write: u8) -> TuringMachine {
        TuringMachine::new(n, vec![Action::Halt { write }; 2 * n as usize]).unwrap()
    }

    #[test]
    fn machine_count_small() {
        assert_eq!(machine_count(1).unwrap(), 36);
        assert_eq!(machine_count(2).unwrap(), 10_000);
        assert_eq!(machine_count(3).unwrap(), 7_529_536);
        assert_eq!(machine_count(4).unwrap(), 11_019_960_576);
    }

    #[test]
    fn machine_count_rejects_zero_and_detects_overflow() {
        assert_eq!(machine_count(0), Err(TmError::StateCountZero));
        assert_eq!(machine_count(7), Err(TmError::CountOverflow(7)));
    }

    #[test]
    fn action_digit_round_trip() {
        for n in 1..=4 {
            for d in 0..action_count(n) {
                let a = action_from_digit(d, n);
                assert_eq!(digit_from_action(a, n), d);
            }
        }
    }

    #[test]
    fn decode_zero_is_all_halt_zero() {
        let m = decode_machine(0, 2).unwrap();
        assert_eq!(m, all_halt(2, 0));
    }

    #[test]
    fn decode_max_is_all_max_step() {
        let m = decode_machine(9999, 2).unwrap();
        let expected = TuringMachine::new(
            2,
            vec![Action::Step { write: 1, dir: Dir::Right, next: 2 }; 4],
        )
        .unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn decode_rejects_out_of_range() {
        assert_eq!(
            decode_machine(10_000, 2),
            Err(TmError::IndexOutOfRange { index: 10_000, n: 2, count: 10_000 })
        );
    }

    #[test]
    fn encode_all_halt_zero_is_zero() {
        assert_eq!(encode_machine(&all_halt(2, 0)).unwrap(), 0);
    }

    // Cheap deterministic pseudo-random stream for index draws.
    fn lcg(seed: &mut u64) -> u64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        *seed >> 11
    }

    #[test]
    fn encode_decode_round_trip() {
        let count = machine_count(3).unwrap();
        let mut seed = 0xbeef;
        let mut indexes = vec![0, 1, count - 1];
        indexes.extend((0..1000).map(|_| lcg(&mut seed) % count));
        for i in indexes {
            let m = decode_machine(i, 3).unwrap();
            assert_eq!(encode_machine(&m).unwrap(), i);
        }
    }

    #[test]
    fn encode_differs_in_one_entry() {
        let mut seed = 0x5eed;
        for _ in 0..200 {
            let i = lcg(&mut seed) % machine_count(2).unwrap();
            let m = decode_machine(i, 2).unwrap();
            let slot = (lcg(&mut seed) % 4) as usize;
            let mut table = m.table().to_vec();
            let old = digit_from_action(table[slot], 2);
            let new = (old + 1 + lcg(&mut seed) % (action_count(2) - 1)) % action_count(2);
            table[slot] = action_from_digit(new, 2);
            let m2 = TuringMachine::new(2, table).unwrap();
            assert_ne!(encode_machine(&m2).unwrap(), i);
        }
    }

    #[test]
    fn step_halts_immediately_on_all_halt_machine() {
        let m = all_halt(2, 1);
        let mut c = Configuration::initial();
        assert_eq!(step(&m, &mut c), StepOutcome::Halted);
        assert_eq!(c.steps, 1);
        assert_eq!(c.head, 0);
        assert_eq!(c.tape.get(0), 1);
    }

    #[test]
    fn step_moves_right() {
        let m = TuringMachine::new(
            1,
            vec![
                Action::Step { write: 1, dir: Dir::Right, next: 1 },
                Action::Halt { write: 0 },
            ],
        )
        .unwrap();
        let mut c = Configuration::initial();
        assert_eq!(step(&m, &mut c), StepOutcome::Running);
        assert_eq!(c.head, 1);
        assert_eq!(c.steps, 1);
        assert_eq!(c.state, 1);
    }

    #[test]
    fn halting_transition_counts_as_one_step() {
        // A machine whose first action halts reports steps = 1, never 0.
        let r = run(&all_halt(2, 1), 6);
        assert_eq!(r.status, RunStatus::Halted);
        assert_eq!(r.steps, 1);
        assert_eq!(r.ones, 1);
        assert_eq!(r.output, "1");
        assert_eq!(r.extent, (0, 0));
    }

    #[test]
    fn budget_exceeded_reports_budget_steps() {
        // Run right forever.
        let m = TuringMachine::new(
            1,
            vec![
                Action::Step { write: 1, dir: Dir::Right, next: 1 },
                Action::Step { write: 1, dir: Dir::Right, next: 1 },
            ],
        )
        .unwrap();
        let r = run(&m, 5);
        assert_eq!(r.status, RunStatus::BudgetExceeded);
        assert_eq!(r.steps, 5);
        assert_eq!(r.ones, 5);
        assert_eq!(r.extent, (0, 5));
    }

    #[test]
    fn tape_stays_finite() {
        let mut seed = 0xfeed;
        for _ in 0..200 {
            let i = lcg(&mut seed) % machine_count(2).unwrap();
            let m = decode_machine(i, 2).unwrap();
            let mut c = Configuration::initial();
            for _ in 0..6 {
                if step(&m, &mut c) == StepOutcome::Halted {
                    break;
                }
            }
            assert!(c.tape.nonzero_cells() <= c.steps);
        }
    }

    #[test]
    fn budget_monotonicity() {
        let mut seed = 0xabcd;
        for _ in 0..300 {
            let i = lcg(&mut seed) % machine_count(2).unwrap();
            let m = decode_machine(i, 2).unwrap();
            let r6 = run(&m, 6);
            if r6.status == RunStatus::Halted {
                for b in r6.steps..=8 {
                    assert_eq!(run(&m, b), r6);
                }
            }
        }
    }

    #[test]
    fn scratch_agrees_with_run() {
        let mut seed = 0x1234;
        let mut scratch = Scratch::new(6);
        for _ in 0..500 {
            let i = lcg(&mut seed) % machine_count(2).unwrap();
            let m = decode_machine(i, 2).unwrap();
            let r = run(&m, 6);
            scratch.load(i, 2);
            let raw = scratch.run(6);
            assert_eq!(raw.halted, r.status == RunStatus::Halted);
            assert_eq!(raw.steps, r.steps);
            assert_eq!((raw.left, raw.right), r.extent);
            assert_eq!(scratch.ones(&raw), r.ones);
            scratch.clear(&raw);
        }
    }

    #[test]
    fn display_machine_text_form() {
        let m = decode_machine(9999, 2).unwrap();
        let text = m.to_string();
        assert_eq!(text, "1,0 -> 1,R,2\n1,1 -> 1,R,2\n2,0 -> 1,R,2\n2,1 -> 1,R,2\n");
        let h = all_halt(1, 0).to_string();
        assert_eq!(h, "1,0 -> 0,HALT\n1,1 -> 0,HALT\n");
    }
}
