//! Moore-machine strategies: extraction from winning regions, exhaustive
//! adversarial verification, and the interactive play backend.

use std::fmt::Write as _;

use thiserror::Error;

use crate::game::{GameResult, WinningRegion};
use crate::ltlf::{evaluate, Alphabet, Formula, Letter, Trace};

/// A positional winning strategy as a halting transducer. States mirror the
/// non-ew states of the winning region it was built from; each round the
/// machine outputs its state's Y-assignment first, then consumes the
/// environment's X-assignment. The play stops at the first accepting
/// (halting) state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MooreStrategy {
    alphabet: Alphabet,
    init: usize,
    output: Vec<Letter>,
    /// `trans[s * 2^|X| + x]`; self-loops on halting states.
    trans: Vec<usize>,
    halting: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlayError {
    #[error("the play has already halted")]
    Halted,
    #[error("environment move assigns propositions outside the inputs")]
    InvalidMove,
}

/// Failure report from adversarial verification: the environment move
/// sequence that defeats the strategy.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Counterexample {
    #[error("play does not halt within the bound under environment moves [{0}]")]
    NoHalt(String),
    #[error("halting trace violates the formula under environment moves [{0}]")]
    Violation(String),
}

/// Outcome of one interaction round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlayStep {
    pub next: usize,
    /// Output the machine emits at the next state; absent when it halted.
    pub output: Option<Letter>,
    pub halted: bool,
}

/// Extracts the strategy recorded by the rank computation: each non-halting
/// state outputs its rank-minimizing agent choice (ties broken toward the
/// lowest bitmask), so every environment answer strictly decreases the rank
/// until a halting state is reached.
pub fn build_strategy(w: &WinningRegion, r: &GameResult) -> MooreStrategy {
    build_with(w, r, None)
}

/// Variant of [`build_strategy`] that forces the output of one region
/// state, rerouting its transitions through the region table (answers that
/// would fall into `ew` loop back instead). The result is generally *not*
/// winning; it exists as a mutation target for verification tests.
pub fn build_strategy_with_forced_output(
    w: &WinningRegion,
    r: &GameResult,
    forced_state: usize,
    forced_output: Letter,
) -> MooreStrategy {
    build_with(w, r, Some((forced_state, forced_output)))
}

fn build_with(w: &WinningRegion, r: &GameResult, forced: Option<(usize, Letter)>) -> MooreStrategy {
    let init = w.dfa.init();
    assert!(
        r.awin[init],
        "strategy extraction needs a winning initial state"
    );
    let alphabet = w.dfa.alphabet().clone();
    let mut map = vec![usize::MAX; w.dfa.num_states()];
    let mut originals = Vec::new();
    for s in 0..w.dfa.num_states() {
        if !w.is_ew(s) {
            assert!(r.awin[s], "non-ew region states are agent-winning");
            map[s] = originals.len();
            originals.push(s);
        }
    }
    let n = originals.len();
    let n_x = 1usize << alphabet.num_inputs();
    let mut output = vec![Letter(0); n];
    let mut trans = vec![0usize; n * n_x];
    let mut halting = vec![false; n];
    for (new_s, &old_s) in originals.iter().enumerate() {
        halting[new_s] = w.dfa.is_accepting(old_s);
        if halting[new_s] {
            // play never continues from here; keep the table total
            for x in alphabet.x_assignments() {
                trans[new_s * n_x + x.index()] = new_s;
            }
            continue;
        }
        let y = match forced {
            Some((state, y)) if state == old_s => y,
            _ => r.chosen_output[old_s].expect("positive rank has a witness"),
        };
        output[new_s] = y;
        for x in alphabet.x_assignments() {
            let target = w.dfa.step(old_s, Letter(x.0 | y.0));
            trans[new_s * n_x + x.index()] = if w.is_ew(target) {
                debug_assert!(forced.is_some(), "chosen output never steps into ew");
                new_s
            } else {
                map[target]
            };
        }
    }
    MooreStrategy {
        alphabet,
        init: map[init],
        output,
        trans,
        halting,
    }
}

impl MooreStrategy {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn num_states(&self) -> usize {
        self.halting.len()
    }

    pub fn output(&self, state: usize) -> Letter {
        self.output[state]
    }

    pub fn is_halting(&self, state: usize) -> bool {
        self.halting[state]
    }

    /// Moore step: the current state's output has already been emitted;
    /// consume the environment assignment and move.
    pub fn step(&self, current: usize, env_move: Letter) -> Result<PlayStep, PlayError> {
        if self.halting[current] {
            return Err(PlayError::Halted);
        }
        if env_move.0 & !self.alphabet.x_mask().0 != 0 {
            return Err(PlayError::InvalidMove);
        }
        let n_x = 1usize << self.alphabet.num_inputs();
        let next = self.trans[current * n_x + env_move.index()];
        Ok(PlayStep {
            next,
            output: (!self.halting[next]).then(|| self.output[next]),
            halted: self.halting[next],
        })
    }

    /// Longest number of rounds until halt over all environment behaviors,
    /// or `None` if some play can avoid halting (which a correct strategy
    /// never allows). Walks the strategy graph with cycle detection.
    pub fn rounds_to_halt(&self) -> Option<usize> {
        fn visit(
            m: &MooreStrategy,
            s: usize,
            memo: &mut [Option<usize>],
            on_path: &mut [bool],
        ) -> Option<usize> {
            if m.halting[s] {
                return Some(0);
            }
            if let Some(v) = memo[s] {
                return Some(v);
            }
            if on_path[s] {
                return None; // reachable cycle avoiding halt
            }
            on_path[s] = true;
            let n_x = 1usize << m.alphabet.num_inputs();
            let mut worst = 0usize;
            for x in 0..n_x {
                let t = m.trans[s * n_x + x];
                worst = worst.max(1 + visit(m, t, memo, on_path)?);
            }
            on_path[s] = false;
            memo[s] = Some(worst);
            Some(worst)
        }
        let mut memo = vec![None; self.num_states()];
        let mut on_path = vec![false; self.num_states()];
        visit(self, self.init, &mut memo, &mut on_path)
    }

    /// Text table export: one `state` line per state, one `on` line per
    /// environment assignment out of non-halting states.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for s in 0..self.num_states() {
            let _ = writeln!(
                out,
                "state {} out={} halt={}",
                s,
                self.alphabet.fmt_y(self.output[s]),
                self.halting[s] as u8
            );
            if self.halting[s] {
                continue;
            }
            let n_x = 1usize << self.alphabet.num_inputs();
            for x in self.alphabet.x_assignments() {
                let _ = writeln!(
                    out,
                    "on {} -> {}",
                    self.alphabet.fmt_x(x),
                    self.trans[s * n_x + x.index()]
                );
            }
        }
        out
    }

    /// DOT export: states labeled with their outputs, edges with the
    /// environment assignments, halting states doubled.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph strategy {\n  rankdir=LR;\n");
        let _ = writeln!(out, "  __init [shape=point];");
        let _ = writeln!(out, "  __init -> s{};", self.init);
        for s in 0..self.num_states() {
            if self.halting[s] {
                let _ = writeln!(out, "  s{s} [shape=doublecircle, label=\"{s} / halt\"];");
            } else {
                let _ = writeln!(
                    out,
                    "  s{} [shape=circle, label=\"{} / {}\"];",
                    s,
                    s,
                    self.alphabet.fmt_y(self.output[s])
                );
            }
        }
        let n_x = 1usize << self.alphabet.num_inputs();
        for s in 0..self.num_states() {
            if self.halting[s] {
                continue;
            }
            for x in self.alphabet.x_assignments() {
                let _ = writeln!(
                    out,
                    "  s{} -> s{} [label=\"{}\"];",
                    s,
                    self.trans[s * n_x + x.index()],
                    self.alphabet.fmt_x(x)
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Exhaustive adversarial verification: enumerates every environment move
/// sequence up to `depth_bound` rounds and demands that each play halts
/// within the bound with its induced trace satisfying `phi`. Returns the
/// first counterexample sequence found.
pub fn verify_strategy(
    m: &MooreStrategy,
    phi: Formula,
    depth_bound: usize,
) -> Result<(), Counterexample> {
    assert!(
        !m.is_halting(m.init()),
        "initial states are never halting (traces are non-empty)"
    );
    let mut env_moves: Vec<Letter> = Vec::new();
    let mut letters: Vec<Letter> = Vec::new();
    verify_from(m, phi, m.init(), depth_bound, &mut env_moves, &mut letters)
}

fn verify_from(
    m: &MooreStrategy,
    phi: Formula,
    state: usize,
    remaining: usize,
    env_moves: &mut Vec<Letter>,
    letters: &mut Vec<Letter>,
) -> Result<(), Counterexample> {
    let describe = |env_moves: &[Letter]| {
        env_moves
            .iter()
            .map(|&x| {
                let s = m.alphabet.fmt_x(x);
                if s.is_empty() {
                    "()".to_string()
                } else {
                    s
                }
            })
            .collect::<Vec<_>>()
            .join(", ")
    };
    if remaining == 0 {
        return Err(Counterexample::NoHalt(describe(env_moves)));
    }
    let y = m.output(state);
    for x in m.alphabet.x_assignments() {
        env_moves.push(x);
        letters.push(Letter(x.0 | y.0));
        let step = m
            .step(state, x)
            .expect("verification steps non-halting states");
        let result = if step.halted {
            let trace = Trace::new(letters.clone()).expect("at least one round played");
            if evaluate(&trace, phi) {
                Ok(())
            } else {
                Err(Counterexample::Violation(describe(env_moves)))
            }
        } else {
            verify_from(m, phi, step.next, remaining - 1, env_moves, letters)
        };
        env_moves.pop();
        letters.pop();
        result?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{get_awr_otf, solve_backward, SolverConfig};
    use crate::ltlf::SynthesisSpec;

    fn strategy_for(formula: &str, part: &str) -> (MooreStrategy, SynthesisSpec) {
        let spec = SynthesisSpec::parse(formula, part).unwrap();
        let w = get_awr_otf(&spec, &SolverConfig::default())
            .unwrap()
            .expect("realizable");
        let r = solve_backward(&w.dfa);
        (build_strategy(&w, &r), spec)
    }

    const XY: &str = ".inputs: x\n.outputs: y";

    #[test]
    fn eventually_y_halts_in_one_round() {
        let (m, spec) = strategy_for("F y", XY);
        assert_eq!(m.output(m.init()), Letter(0b10));
        for x in m.alphabet().x_assignments() {
            let step = m.step(m.init(), x).unwrap();
            assert!(step.halted);
            assert_eq!(step.output, None);
        }
        assert_eq!(m.rounds_to_halt(), Some(1));
        assert!(verify_strategy(&m, spec.formula, 1).is_ok());
    }

    #[test]
    fn reaction_formula_emits_y_everywhere() {
        let (m, spec) = strategy_for("G (x -> y)", XY);
        for s in 0..m.num_states() {
            if !m.is_halting(s) {
                assert_eq!(m.output(s), Letter(0b10));
            }
        }
        assert_eq!(m.rounds_to_halt(), Some(1));
        assert!(verify_strategy(&m, spec.formula, 1).is_ok());
    }

    #[test]
    fn trivial_formula_outputs_lowest_bitmask() {
        let (m, spec) = strategy_for("true", XY);
        assert_eq!(m.output(m.init()), Letter(0));
        assert_eq!(m.rounds_to_halt(), Some(1));
        assert!(verify_strategy(&m, spec.formula, 1).is_ok());
    }

    #[test]
    fn globally_y_halts_at_first_accepting_state() {
        let (m, _) = strategy_for("G y", XY);
        assert_eq!(m.output(m.init()), Letter(0b10));
        let step = m.step(m.init(), Letter(0b1)).unwrap();
        assert!(step.halted, "first accepting state stops the play");
        assert_eq!(m.step(step.next, Letter(0)), Err(PlayError::Halted));
    }

    #[test]
    fn corrupted_output_is_caught() {
        // flip the initial output to the losing empty assignment
        let spec = SynthesisSpec::parse("G y", XY).unwrap();
        let w = get_awr_otf(&spec, &SolverConfig::default())
            .unwrap()
            .unwrap();
        let r = solve_backward(&w.dfa);
        let m = build_strategy_with_forced_output(&w, &r, w.dfa.init(), Letter(0));
        let err = verify_strategy(&m, spec.formula, 4).unwrap_err();
        assert!(matches!(err, Counterexample::NoHalt(_)));
    }

    #[test]
    fn empty_inputs_one_play() {
        let (m, spec) = strategy_for("F y1 && F y2", ".inputs:\n.outputs: y1 y2");
        assert_eq!(m.alphabet().num_inputs(), 0);
        assert!(verify_strategy(&m, spec.formula, 2).is_ok());
    }

    #[test]
    fn invalid_move_rejected() {
        let (m, _) = strategy_for("G (x -> y)", XY);
        assert_eq!(m.step(m.init(), Letter(0b10)), Err(PlayError::InvalidMove));
    }

    #[test]
    fn positional_replay_matches_play_steps() {
        // replaying the region run on the raw trace yields the same outputs
        let spec = SynthesisSpec::parse("F y && G (x -> y)", XY).unwrap();
        let w = get_awr_otf(&spec, &SolverConfig::default())
            .unwrap()
            .unwrap();
        let r = solve_backward(&w.dfa);
        let m = build_strategy(&w, &r);

        let env_seq = [Letter(0b1), Letter(0b0), Letter(0b1)];
        let mut region_state = w.dfa.init();
        let mut play_state = m.init();
        for &x in &env_seq {
            let y = r.chosen_output[region_state].unwrap();
            assert_eq!(m.output(play_state), y);
            let letter = Letter(x.0 | y.0);
            region_state = w.dfa.step(region_state, letter);
            let step = m.step(play_state, x).unwrap();
            if step.halted {
                assert!(w.dfa.is_accepting(region_state));
                break;
            }
            play_state = step.next;
        }
    }

    #[test]
    fn table_export_shape() {
        let (m, _) = strategy_for("G (x -> y)", XY);
        let table = m.to_table();
        assert!(table.contains("state 0 out=y halt=0"));
        assert!(table.contains("on x -> "));
        let dot = m.to_dot();
        assert!(dot.contains("doublecircle"));
    }
}
