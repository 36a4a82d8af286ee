//! Test-support oracles, all independent of the library's derivation
//! machinery.
//!
//! `oracle` is a second interpreter for the machine, written around a
//! pre-decoded instruction list instead of on-demand bit decoding; it must
//! agree with `soph_lab::machine::run` everywhere. The `brute` functions
//! recompute table quantities by rescanning raw record lists, independent
//! of the event/breakpoint indexes in `soph_lab::tables`.

#![allow(dead_code)]

use soph_lab::dyadic::Dyadic;
use soph_lab::machine::RunOutcome;
use soph_lab::{BitString, HaltRecord};

pub mod oracle {
    use super::*;

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    enum Op {
        Out(u8),
        Inc,
        Dec,
        Swp,
        Loop,
        End,
        Read,
        Halt,
    }

    const ENCODINGS: [(&str, Op); 9] = [
        ("00", Op::Out(0)),
        ("01", Op::Out(1)),
        ("100", Op::Inc),
        ("101", Op::Dec),
        ("1100", Op::Swp),
        ("1101", Op::Loop),
        ("11100", Op::End),
        ("11101", Op::Read),
        ("1111", Op::Halt),
    ];

    struct Instr {
        op: Op,
        /// Bit offset just past this opcode.
        end: usize,
    }

    /// Pre-decode the whole bit stream by longest-prefix table matching.
    /// Returns the instruction list and whether a partial opcode remains
    /// at the tail. Decoding is context free, so this is faithful.
    fn predecode(program: &BitString) -> (Vec<Instr>, bool) {
        let text: String = program.iter().map(|b| char::from(b'0' + b)).collect();
        let mut instrs = Vec::new();
        let mut at = 0usize;
        while at < text.len() {
            let mut matched = false;
            for (enc, op) in ENCODINGS {
                if text[at..].starts_with(enc) {
                    at += enc.len();
                    instrs.push(Instr { op, end: at });
                    matched = true;
                    break;
                }
            }
            if !matched {
                // The tail is a proper prefix of some opcode.
                return (instrs, true);
            }
        }
        (instrs, false)
    }

    /// Independent re-implementation of the machine semantics.
    pub fn run(program: &BitString, aux: &BitString, budget: u64, output_cap: u32) -> RunOutcome {
        let (instrs, partial_tail) = predecode(program);
        let needs_more = RunOutcome::NeedsMoreBits { frontier: program.len() };

        let mut ip = 0usize;
        let mut frontier = 0usize;
        let mut a: u128 = 0;
        let mut b: u128 = 0;
        let mut out = BitString::new();
        let mut stack: Vec<usize> = Vec::new(); // instruction indexes
        let mut head = 0usize;
        let mut steps: u64 = 0;

        loop {
            if steps == budget {
                return RunOutcome::OutOfBudget;
            }
            if ip == instrs.len() {
                // Ran off the decoded instructions: the machine would ask
                // for more bits (either the partial tail or fresh bits).
                let _ = partial_tail;
                return needs_more;
            }
            let instr = &instrs[ip];
            steps += 1;
            frontier = frontier.max(instr.end);
            ip += 1;
            match instr.op {
                Op::Out(bit) => {
                    if out.len() as u64 >= output_cap as u64 {
                        return RunOutcome::OutputOverflow;
                    }
                    out.push(bit);
                }
                Op::Inc => a += 1,
                Op::Dec => a = a.saturating_sub(1),
                Op::Swp => std::mem::swap(&mut a, &mut b),
                Op::Read => {
                    if let Some(bit) = aux.get(head) {
                        a = bit as u128;
                        head += 1;
                    } else {
                        a = 2;
                    }
                }
                Op::Loop => {
                    if a == 0 {
                        let mut depth = 1u32;
                        while depth > 0 {
                            if steps == budget {
                                return RunOutcome::OutOfBudget;
                            }
                            if ip == instrs.len() {
                                return needs_more;
                            }
                            let scanned = &instrs[ip];
                            steps += 1;
                            frontier = frontier.max(scanned.end);
                            ip += 1;
                            match scanned.op {
                                Op::Loop => depth += 1,
                                Op::End => depth -= 1,
                                _ => {}
                            }
                        }
                    } else {
                        stack.push(ip);
                    }
                }
                Op::End => match stack.last() {
                    None => {
                        return RunOutcome::Aborted {
                            reason: soph_lab::machine::AbortReason::EndWithoutLoop,
                        }
                    }
                    Some(&resume) => {
                        if a != 0 {
                            ip = resume;
                        } else {
                            stack.pop();
                        }
                    }
                },
                Op::Halt => return RunOutcome::Halted { output: out, steps, frontier },
            }
        }
    }
}

pub mod brute {
    use super::*;

    /// K_t(x) by direct scan of the record list.
    pub fn k_of(records: &[HaltRecord], x: &BitString, t: Option<u128>) -> Option<u32> {
        records
            .iter()
            .filter(|r| &r.output == x && t.is_none_or(|t| r.steps as u128 <= t))
            .map(|r| r.program.len() as u32)
            .min()
    }

    pub fn m_qp(records: &[HaltRecord], x: &BitString, t: Option<u128>) -> Dyadic {
        let masses: Vec<Dyadic> = records
            .iter()
            .filter(|r| &r.output == x && t.is_none_or(|t| r.steps as u128 <= t))
            .map(|r| r.mass())
            .collect();
        Dyadic::sum(masses.iter())
    }

    pub fn m_qk(records: &[HaltRecord], x: &BitString, t: Option<u128>) -> Dyadic {
        match k_of(records, x, t) {
            Some(k) => Dyadic::pow2_neg(k as u64),
            None => Dyadic::zero(),
        }
    }

    pub fn m_of(records: &[HaltRecord], qk: bool, x: &BitString, t: Option<u128>) -> Dyadic {
        if qk {
            m_qk(records, x, t)
        } else {
            m_qp(records, x, t)
        }
    }

    pub fn outputs(records: &[HaltRecord]) -> Vec<BitString> {
        let mut xs: Vec<BitString> = records.iter().map(|r| r.output.clone()).collect();
        xs.sort();
        xs.dedup();
        xs
    }

    /// Omega_t by full rescan.
    pub fn omega_at(records: &[HaltRecord], qk: bool, t: Option<u128>) -> Dyadic {
        let mut acc = Dyadic::zero();
        for x in outputs(records) {
            acc = acc.add(&m_of(records, qk, &x, t));
        }
        acc
    }

    /// t_n = min t with Omega - Omega_t <= 2^{-n}, scanning every integer
    /// time up to convergence.
    pub fn t_n(records: &[HaltRecord], qk: bool, n: u32) -> u128 {
        let omega = omega_at(records, qk, None);
        let t_conv = records.iter().map(|r| r.steps as u128).max().unwrap_or(0);
        for t in 0..=t_conv {
            let gap = omega.checked_sub(&omega_at(records, qk, Some(t))).expect("monotone");
            if gap <= Dyadic::pow2_neg(n as u64) {
                return t;
            }
        }
        t_conv
    }

    /// m-sophistication by definition: least k with K_{t_k}(x) <= K(x)+c.
    pub fn m_soph(records: &[HaltRecord], qk: bool, x: &BitString, c: u32) -> Option<u32> {
        let k_final = k_of(records, x, None)?;
        for k in 0..=200u32 {
            let tk = t_n(records, qk, k);
            if let Some(kt) = k_of(records, x, Some(tk)) {
                if kt <= k_final + c {
                    return Some(k);
                }
            }
        }
        None
    }

    /// (m,m)-sophistication by definition: least k with m(x) <= 2 m_{t_k}(x).
    pub fn mm_soph(records: &[HaltRecord], qk: bool, x: &BitString) -> Option<u32> {
        let mass = m_of(records, qk, x, None);
        if mass.is_zero() {
            return None;
        }
        for k in 0..=200u32 {
            let tk = t_n(records, qk, k);
            if mass <= m_of(records, qk, x, Some(tk)).mul_pow2(1) {
                return Some(k);
            }
        }
        None
    }

    /// Max output index and max steps over programs of length <= n.
    pub fn busy_beaver(records: &[HaltRecord], n: u32) -> (num_bigint::BigUint, u64) {
        let mut out = num_bigint::BigUint::ZERO;
        let mut time = 0u64;
        for r in records.iter().filter(|r| r.program.len() as u32 <= n) {
            out = out.max(soph_lab::index_of(&r.output));
            time = time.max(r.steps);
        }
        (out, time)
    }
}
