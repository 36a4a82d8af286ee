//! Derived tables over an enumerated domain: time-bounded complexity
//! K_t(x|y), the two semimeasure modes, halting-probability traces with
//! their critical times t_n, Busy Beaver arrays, and the prefix-driven
//! halting decision procedure.
//!
//! Everything here is exact. Semimeasure masses are dyadics; times are
//! integers; no query rounds.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::bits::{index_of, BitString};
use crate::dyadic::Dyadic;
use crate::enumerate::DomainTable;
use crate::error::QueryError;

/// Semimeasure mode: program masses (`2^{-l(p)}` per halting program) or
/// complexity masses (`2^{-K_t(x)}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mode {
    Qp,
    Qk,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::Qp, Mode::Qk];

    pub fn label(self) -> &'static str {
        match self {
            Mode::Qp => "qp",
            Mode::Qk => "qk",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Summation cutoff for the halting-probability trace. `AllOutputs` sums
/// the full (finite) restricted support at each time; `Literal` keeps the
/// index condition `index_of(x) < t`, so a mass only counts once the time
/// exceeds the output's index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OmegaCutoff {
    #[default]
    AllOutputs,
    Literal,
}

impl OmegaCutoff {
    pub fn label(self) -> &'static str {
        match self {
            OmegaCutoff::AllOutputs => "none",
            OmegaCutoff::Literal => "literal",
        }
    }
}

/// Time bound for K_t / m_t queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeBound {
    At(u128),
    Unbounded,
}

impl TimeBound {
    fn admits(self, steps: u64) -> bool {
        match self {
            TimeBound::At(t) => steps as u128 <= t,
            TimeBound::Unbounded => true,
        }
    }
}

/// Per-output complexity data.
#[derive(Debug, Clone)]
pub struct OutputRow {
    /// Restricted K: minimal program length producing this output.
    pub k_value: u32,
    /// Canonical minimal witness (shortest, earliest, lexicographically
    /// first); re-running it reproduces the output.
    pub witness: BitString,
    /// Earliest time at which the minimal length is achieved.
    pub first_time: u64,
    /// (t, K_t) drops, strictly increasing t, strictly decreasing K.
    drops: Vec<(u64, u32)>,
    /// Cumulative program mass by event time.
    qp_cum: Vec<(u64, Dyadic)>,
}

impl OutputRow {
    pub fn k_at(&self, bound: TimeBound) -> Option<u32> {
        let mut best = None;
        for &(t, k) in &self.drops {
            if bound.admits(t) {
                best = Some(k);
            } else {
                break;
            }
        }
        best
    }

    pub fn qp_mass_at(&self, bound: TimeBound) -> Dyadic {
        let mut best = Dyadic::zero();
        for (t, cum) in &self.qp_cum {
            if bound.admits(*t) {
                best = cum.clone();
            } else {
                break;
            }
        }
        best
    }
}

/// K table for one condition: output -> minimal program data. Absent
/// outputs mean K(x) exceeds the length bound in the restricted system.
#[derive(Debug, Clone)]
pub struct KTable {
    pub condition: BitString,
    pub l_max_bound: u32,
    rows: BTreeMap<BitString, OutputRow>,
}

impl KTable {
    pub fn row(&self, x: &BitString) -> Option<&OutputRow> {
        self.rows.get(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BitString, &OutputRow)> {
        self.rows.iter()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// One semimeasure growth event: mass `delta` for `x` arrives at time `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MEvent {
    pub t: u64,
    pub x: BitString,
    pub delta: Dyadic,
}

/// Time-sorted semimeasure growth events; `m_t(x)` is the sum of deltas
/// for `x` with time at most `t`.
#[derive(Debug, Clone)]
pub struct MTrace {
    pub mode: Mode,
    pub events: Vec<MEvent>,
}

/// The enumerated halting probability as a step function of time, with
/// its critical times.
#[derive(Debug, Clone)]
pub struct OmegaTrace {
    pub mode: Mode,
    pub cutoff: OmegaCutoff,
    /// (t, Omega_t) at each growth point; strictly increasing in both.
    breakpoints: Vec<(u128, Dyadic)>,
    pub omega_final: Dyadic,
    /// t_n for n = 0..; the array covers through the first saturated
    /// entry, and `t_n()` saturates beyond it.
    t_n: Vec<u128>,
    /// Largest n with t_n strictly before convergence (0 when the trace
    /// is empty).
    pub n_sat: u32,
    pub t_conv: u128,
}

impl OmegaTrace {
    fn build(trace: &MTrace, cutoff: OmegaCutoff) -> Result<OmegaTrace, QueryError> {
        let mut by_time: BTreeMap<u128, Dyadic> = BTreeMap::new();
        for ev in &trace.events {
            let t_eff: u128 = match cutoff {
                OmegaCutoff::AllOutputs => ev.t as u128,
                OmegaCutoff::Literal => {
                    let idx = index_of(&ev.x);
                    let idx: u128 = u128::try_from(&idx).map_err(|_| QueryError::OutOfRange {
                        value: ev.x.len() as u64,
                        what: "output too long for the literal cutoff time scale".into(),
                    })?;
                    (ev.t as u128).max(idx + 1)
                }
            };
            let slot = by_time.entry(t_eff).or_insert_with(Dyadic::zero);
            *slot = slot.add(&ev.delta);
        }

        let mut breakpoints = Vec::with_capacity(by_time.len());
        let mut cum = Dyadic::zero();
        for (t, delta) in by_time {
            cum = cum.add(&delta);
            breakpoints.push((t, cum.clone()));
        }
        let omega_final = breakpoints.last().map(|(_, v)| v.clone()).unwrap_or_else(Dyadic::zero);
        let t_conv = breakpoints.last().map(|(t, _)| *t).unwrap_or(0);

        // Gaps Omega - Omega_t at t = 0 and at each breakpoint, in time
        // order; two-pointer scan yields each t_n in turn.
        let mut grid: Vec<(u128, Dyadic)> = Vec::with_capacity(breakpoints.len() + 1);
        grid.push((0, omega_final.clone()));
        for (t, cum) in &breakpoints {
            grid.push((*t, omega_final.checked_sub(cum).expect("omega is nondecreasing")));
        }

        let mut t_n = Vec::new();
        let mut at = 0usize;
        let mut n: u32 = 0;
        loop {
            let threshold = Dyadic::pow2_neg(n as u64);
            while grid[at].1 > threshold {
                at += 1;
            }
            t_n.push(grid[at].0);
            if grid[at].0 == t_conv {
                break;
            }
            n += 1;
        }
        // The loop stops on the first saturated entry, so the largest n
        // with t_n < t_conv is len - 2 (0 for an empty or trivial trace).
        let n_sat = if t_n.len() >= 2 { t_n.len() as u32 - 2 } else { 0 };
        Ok(OmegaTrace { mode: trace.mode, cutoff, breakpoints, omega_final, t_n, n_sat, t_conv })
    }

    pub fn breakpoints(&self) -> &[(u128, Dyadic)] {
        &self.breakpoints
    }

    /// t_n, saturating at the convergence time for n beyond the array.
    pub fn t_n(&self, n: u32) -> u128 {
        self.t_n.get(n as usize).copied().unwrap_or(self.t_conv)
    }

    pub fn t_n_entries(&self) -> &[u128] {
        &self.t_n
    }

    /// Omega_t.
    pub fn omega_at(&self, t: u128) -> Dyadic {
        let mut best = Dyadic::zero();
        for (bt, cum) in &self.breakpoints {
            if *bt <= t {
                best = cum.clone();
            } else {
                break;
            }
        }
        best
    }

    /// The first `n` binary digits of the final value.
    pub fn digits(&self, n: usize) -> BitString {
        self.omega_final.fraction_prefix(n)
    }

    /// Earliest t with Omega_t at least `value`; `None` when the value is
    /// never reached.
    fn min_t_reaching(&self, value: &Dyadic) -> Option<u128> {
        if value.is_zero() {
            return Some(0);
        }
        let i = self.breakpoints.partition_point(|(_, cum)| cum < value);
        self.breakpoints.get(i).map(|(t, _)| *t)
    }

    /// Check that `prefix` is exactly the first digits of the final value
    /// and return its value.
    fn validate_prefix(&self, prefix: &BitString) -> Result<Dyadic, QueryError> {
        let value = Dyadic::from_fraction_bits(prefix);
        let upper = value.add(&Dyadic::pow2_neg(prefix.len() as u64));
        if value > self.omega_final || self.omega_final >= upper {
            return Err(QueryError::InvalidPrefix(prefix.to_string()));
        }
        Ok(value)
    }
}

/// Busy Beaver arrays indexed by program length bound.
#[derive(Debug, Clone)]
pub struct BBTable {
    /// Max output value (as length-lex index) over domain programs of
    /// length at most n; zero where none halt.
    pub out_values: Vec<BigUint>,
    /// Max step count over the same sets.
    pub time_values: Vec<u64>,
}

impl BBTable {
    pub fn l_max(&self) -> u32 {
        self.out_values.len() as u32 - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Halts,
    NotHalts,
    /// The prefix is too short to decide programs of this length.
    Insufficient,
}

/// All derived tables for one domain (one condition). Construction is a
/// single deterministic pass; queries are read-only.
#[derive(Debug, Clone)]
pub struct Tables {
    pub l_max: u32,
    pub condition: BitString,
    pub k_table: KTable,
    pub bb: BBTable,
    qp_trace: MTrace,
    qk_trace: MTrace,
    omega_qp: OmegaTrace,
    omega_qk: OmegaTrace,
}

impl Tables {
    pub fn build(domain: &DomainTable, cutoff: OmegaCutoff) -> Result<Tables, QueryError> {
        let manifest = domain.manifest();
        let l_max = manifest.l_max;
        let condition = manifest.aux.clone();

        // Group records per output, then derive drops and cumulative masses.
        let mut groups: BTreeMap<BitString, Vec<(u64, &crate::enumerate::HaltRecord)>> =
            BTreeMap::new();
        for r in domain.records() {
            groups.entry(r.output.clone()).or_default().push((r.steps, r));
        }

        let mut rows = BTreeMap::new();
        let mut qp_events = Vec::new();
        let mut qk_events = Vec::new();
        for (x, mut group) in groups {
            group.sort_by(|a, b| {
                a.0.cmp(&b.0)
                    .then_with(|| a.1.program.len().cmp(&b.1.program.len()))
                    .then_with(|| a.1.program.cmp(&b.1.program))
            });

            let mut drops: Vec<(u64, u32)> = Vec::new();
            let mut qp_cum: Vec<(u64, Dyadic)> = Vec::new();
            let mut cum = Dyadic::zero();
            let mut i = 0;
            while i < group.len() {
                let t = group[i].0;
                let mut j = i;
                let mut min_len_at_t = u32::MAX;
                let mut mass_at_t = Dyadic::zero();
                while j < group.len() && group[j].0 == t {
                    let len = group[j].1.program.len() as u32;
                    min_len_at_t = min_len_at_t.min(len);
                    mass_at_t = mass_at_t.add(&group[j].1.mass());
                    j += 1;
                }
                cum = cum.add(&mass_at_t);
                qp_cum.push((t, cum.clone()));
                qp_events.push(MEvent { t, x: x.clone(), delta: mass_at_t });
                let prev_k = drops.last().map(|&(_, k)| k).unwrap_or(u32::MAX);
                if min_len_at_t < prev_k {
                    drops.push((t, min_len_at_t));
                    let new_mass = Dyadic::pow2_neg(min_len_at_t as u64);
                    let delta = match prev_k {
                        u32::MAX => new_mass,
                        old => new_mass
                            .checked_sub(&Dyadic::pow2_neg(old as u64))
                            .expect("K drops increase mass"),
                    };
                    qk_events.push(MEvent { t, x: x.clone(), delta });
                }
                i = j;
            }

            let k_value = drops.last().expect("nonempty group").1;
            let first_time = group
                .iter()
                .filter(|(_, r)| r.program.len() as u32 == k_value)
                .map(|(t, _)| *t)
                .min()
                .expect("witness exists");
            let witness = group
                .iter()
                .filter(|(t, r)| r.program.len() as u32 == k_value && *t == first_time)
                .map(|(_, r)| r.program.clone())
                .min()
                .expect("witness exists");
            rows.insert(x, OutputRow { k_value, witness, first_time, drops, qp_cum });
        }
        qp_events.sort_by(|a, b| a.t.cmp(&b.t).then_with(|| a.x.cmp(&b.x)));
        qk_events.sort_by(|a, b| a.t.cmp(&b.t).then_with(|| a.x.cmp(&b.x)));

        let qp_trace = MTrace { mode: Mode::Qp, events: qp_events };
        let qk_trace = MTrace { mode: Mode::Qk, events: qk_events };
        let omega_qp = OmegaTrace::build(&qp_trace, cutoff)?;
        let omega_qk = OmegaTrace::build(&qk_trace, cutoff)?;

        // Busy Beaver arrays.
        let mut out_values = vec![BigUint::ZERO; l_max as usize + 1];
        let mut time_values = vec![0u64; l_max as usize + 1];
        for r in domain.records() {
            let n = r.program.len();
            let idx = index_of(&r.output);
            if idx > out_values[n] {
                out_values[n] = idx;
            }
            if r.steps > time_values[n] {
                time_values[n] = r.steps;
            }
        }
        for n in 1..out_values.len() {
            if out_values[n] < out_values[n - 1] {
                out_values[n] = out_values[n - 1].clone();
            }
            time_values[n] = time_values[n].max(time_values[n - 1]);
        }

        Ok(Tables {
            l_max,
            condition,
            k_table: KTable { condition: manifest.aux.clone(), l_max_bound: l_max, rows },
            bb: BBTable { out_values, time_values },
            qp_trace,
            qk_trace,
            omega_qp,
            omega_qk,
        })
    }

    pub fn trace(&self, mode: Mode) -> &MTrace {
        match mode {
            Mode::Qp => &self.qp_trace,
            Mode::Qk => &self.qk_trace,
        }
    }

    pub fn omega(&self, mode: Mode) -> &OmegaTrace {
        match mode {
            Mode::Qp => &self.omega_qp,
            Mode::Qk => &self.omega_qk,
        }
    }

    /// K_t(x | condition): minimal program length with steps within the
    /// bound; `None` when no witness exists in the restricted system.
    pub fn k_of(&self, x: &BitString, bound: TimeBound) -> Option<u32> {
        self.k_table.row(x).and_then(|row| row.k_at(bound))
    }

    /// m_t(x) in the requested mode.
    pub fn m_of(&self, x: &BitString, bound: TimeBound, mode: Mode) -> Dyadic {
        match self.k_table.row(x) {
            None => Dyadic::zero(),
            Some(row) => match mode {
                Mode::Qp => row.qp_mass_at(bound),
                Mode::Qk => match row.k_at(bound) {
                    Some(k) => Dyadic::pow2_neg(k as u64),
                    None => Dyadic::zero(),
                },
            },
        }
    }

    /// Max output value (as index) and max step count over domain programs
    /// of length at most `n`.
    pub fn busy_beaver(&self, n: u32) -> Result<(BigUint, u64), QueryError> {
        if n > self.l_max {
            return Err(QueryError::OutOfRange {
                value: n as u64,
                what: format!("busy beaver bound exceeds lmax={}", self.l_max),
            });
        }
        Ok((self.bb.out_values[n as usize].clone(), self.bb.time_values[n as usize]))
    }

    /// Inverse Busy Beaver: least k with index_of(x) <= bb_out(k), or
    /// `None` when x exceeds the restricted range.
    pub fn bb_inv(&self, x: &BitString) -> Option<u32> {
        let idx = index_of(x);
        self.bb.out_values.iter().position(|v| idx <= *v).map(|k| k as u32)
    }

    /// Decide restricted halting of `p` from an exact prefix of the final
    /// halting probability: replay the trace until it clears the prefix
    /// value and check whether `p` has halted by then.
    pub fn decide_halting(
        &self,
        domain: &DomainTable,
        p: &BitString,
        omega_prefix: &BitString,
        mode: Mode,
    ) -> Result<Decision, QueryError> {
        let value = self.omega(mode).validate_prefix(omega_prefix)?;
        if p.len() >= omega_prefix.len() {
            return Ok(Decision::Insufficient);
        }
        let t = self
            .omega(mode)
            .min_t_reaching(&value)
            .expect("validated prefix value is reachable");
        let halted = domain.steps_of(p).is_some_and(|s| s as u128 <= t);
        Ok(if halted { Decision::Halts } else { Decision::NotHalts })
    }

    /// Earliest t with Omega_t at least the prefix value. The result
    /// satisfies Omega - Omega_t < 2^{-n}, hence lies in [t_n, t_conv].
    pub fn omega_to_tn(&self, omega_prefix: &BitString, mode: Mode) -> Result<u128, QueryError> {
        let value = self.omega(mode).validate_prefix(omega_prefix)?;
        Ok(self
            .omega(mode)
            .min_t_reaching(&value)
            .expect("validated prefix value is reachable"))
    }
}
