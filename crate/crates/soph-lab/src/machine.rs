//! RM1: the reference prefix-free universal machine.
//!
//! RM1 is a two-counter machine with a write-only output tape and a
//! read-only auxiliary input. Programs are bit strings consumed left to
//! right, on demand; the opcode encodings form a complete prefix code, so a
//! decode either succeeds or runs out of program bits — it never gets
//! stuck mid-stream. A program is *in the domain* for a given auxiliary
//! input exactly when a run halts with every supplied bit consumed, which
//! makes the domain prefix-free by construction.
//!
//! Opcode encodings (normative, bit-exact):
//!
//! ```text
//! OUT0=00  OUT1=01  INC=100  DEC=101  SWP=1100  LOOP=1101
//! END=11100  READ=11101  HALT=1111
//! ```

use crate::bits::BitString;

pub const MACHINE_ID: &str = "RM1-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Opcode {
    Out0,
    Out1,
    Inc,
    Dec,
    Swp,
    Loop,
    End,
    Read,
    Halt,
}

/// The complete opcode table; the encodings have Kraft sum exactly 1.
pub const OPCODE_TABLE: [(Opcode, &str); 9] = [
    (Opcode::Out0, "00"),
    (Opcode::Out1, "01"),
    (Opcode::Inc, "100"),
    (Opcode::Dec, "101"),
    (Opcode::Swp, "1100"),
    (Opcode::Loop, "1101"),
    (Opcode::End, "11100"),
    (Opcode::Read, "11101"),
    (Opcode::Halt, "1111"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbortReason {
    /// END executed with no enclosing LOOP on the stack.
    EndWithoutLoop,
}

/// Result of running RM1 on a (possibly partial) program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    /// HALT executed; `frontier` is the count of program bits consumed.
    Halted { output: BitString, steps: u64, frontier: usize },
    /// The next opcode needs program bits beyond the supplied length.
    NeedsMoreBits { frontier: usize },
    Aborted { reason: AbortReason },
    OutOfBudget,
    OutputOverflow,
}

impl RunOutcome {
    pub fn is_halted(&self) -> bool {
        matches!(self, RunOutcome::Halted { .. })
    }
}

enum Decoded {
    Op(Opcode, usize),
    NeedMore,
}

/// Decode one opcode starting at bit offset `pos`. Decoding is context
/// free: offsets and results do not depend on execution history.
fn decode(program: &BitString, pos: usize) -> Decoded {
    let mut at = pos;
    let mut next = |program: &BitString| -> Option<u8> {
        let b = program.get(at);
        at += 1;
        b
    };
    macro_rules! bit {
        () => {
            match next(program) {
                Some(b) => b,
                None => return Decoded::NeedMore,
            }
        };
    }
    let op = if bit!() == 0 {
        if bit!() == 0 {
            Opcode::Out0
        } else {
            Opcode::Out1
        }
    } else if bit!() == 0 {
        if bit!() == 0 {
            Opcode::Inc
        } else {
            Opcode::Dec
        }
    } else if bit!() == 0 {
        if bit!() == 0 {
            Opcode::Swp
        } else {
            Opcode::Loop
        }
    } else if bit!() == 1 {
        Opcode::Halt
    } else if bit!() == 0 {
        Opcode::End
    } else {
        Opcode::Read
    };
    Decoded::Op(op, at)
}

/// Run RM1. Bits of `program` are consumed on demand; `step_budget` bounds
/// the number of decoded-and-executed opcodes (a halt within the budget is
/// accepted when `steps <= step_budget`), and `output_cap` bounds the
/// output length.
///
/// The outcome depends only on the consumed bits: if a run ends in
/// anything but `NeedsMoreBits`, every extension of the program produces
/// the identical outcome.
pub fn run(program: &BitString, aux: &BitString, step_budget: u64, output_cap: u32) -> RunOutcome {
    let mut pc = 0usize;
    let mut frontier = 0usize;
    let mut counter_a: u128 = 0;
    let mut counter_b: u128 = 0;
    let mut output = BitString::new();
    let mut loop_stack: Vec<usize> = Vec::new();
    let mut input_head = 0usize;
    let mut steps: u64 = 0;

    loop {
        if steps == step_budget {
            return RunOutcome::OutOfBudget;
        }
        let (op, next_pc) = match decode(program, pc) {
            Decoded::Op(op, next_pc) => (op, next_pc),
            Decoded::NeedMore => return RunOutcome::NeedsMoreBits { frontier: program.len() },
        };
        pc = next_pc;
        frontier = frontier.max(pc);
        steps += 1;
        match op {
            Opcode::Out0 | Opcode::Out1 => {
                if output.len() as u64 >= output_cap as u64 {
                    return RunOutcome::OutputOverflow;
                }
                output.push(u8::from(op == Opcode::Out1));
            }
            Opcode::Inc => counter_a += 1,
            Opcode::Dec => counter_a = counter_a.saturating_sub(1),
            Opcode::Swp => std::mem::swap(&mut counter_a, &mut counter_b),
            Opcode::Read => {
                if let Some(b) = aux.get(input_head) {
                    counter_a = b as u128;
                    input_head += 1;
                } else {
                    counter_a = 2; // end-of-input sentinel
                }
            }
            Opcode::Loop => {
                if counter_a == 0 {
                    // Skip to just past the matching END, decoding (and
                    // charging one step for) each opcode scanned over.
                    let mut depth = 1u32;
                    while depth > 0 {
                        if steps == step_budget {
                            return RunOutcome::OutOfBudget;
                        }
                        let (op2, next2) = match decode(program, pc) {
                            Decoded::Op(op2, next2) => (op2, next2),
                            Decoded::NeedMore => {
                                return RunOutcome::NeedsMoreBits { frontier: program.len() }
                            }
                        };
                        pc = next2;
                        frontier = frontier.max(pc);
                        steps += 1;
                        match op2 {
                            Opcode::Loop => depth += 1,
                            Opcode::End => depth -= 1,
                            _ => {}
                        }
                    }
                } else {
                    loop_stack.push(pc);
                }
            }
            Opcode::End => match loop_stack.last() {
                None => return RunOutcome::Aborted { reason: AbortReason::EndWithoutLoop },
                Some(&resume) => {
                    if counter_a != 0 {
                        pc = resume;
                    } else {
                        loop_stack.pop();
                    }
                }
            },
            Opcode::Halt => return RunOutcome::Halted { output, steps, frontier },
        }
    }
}

/// Outcomes of `run` on every prefix of `program`, index `i` holding the
/// outcome for the first `i` bits. Test support for the claim that
/// behavior depends only on consumed bits.
pub fn prefix_outcomes(
    program: &BitString,
    aux: &BitString,
    step_budget: u64,
    output_cap: u32,
) -> Vec<RunOutcome> {
    (0..=program.len()).map(|i| run(&program.prefix(i), aux, step_budget, output_cap)).collect()
}
