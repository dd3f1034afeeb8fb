//! Trace semantics: the ground-truth oracle every automata construction is
//! checked against. Each connective is decided directly from its semantic
//! clause (quantification over suffix positions), never by rewriting.

use std::collections::HashMap;

use super::formula::{Formula, FormulaKind};
use super::trace::Trace;

/// Instruction form of a formula: children resolved to dense local indices
/// so per-position memoization is a flat table lookup.
enum Op {
    True,
    False,
    Prop(usize),
    NotProp(usize),
    And(Vec<usize>),
    Or(Vec<usize>),
    Next(usize),
    WeakNext(usize),
    Until(usize, usize),
    Release(usize, usize),
}

/// Reusable evaluator for one formula over many traces.
pub struct Evaluator {
    ops: Vec<Op>,
    root: usize,
    /// memo[sub * len + pos]: 0 unknown, 1 false, 2 true
    memo: Vec<u8>,
}

impl Evaluator {
    pub fn new(formula: Formula) -> Evaluator {
        let mut index: HashMap<Formula, usize> = HashMap::new();
        let mut ops = Vec::new();
        let root = Self::build(formula, &mut index, &mut ops);
        Evaluator {
            ops,
            root,
            memo: Vec::new(),
        }
    }

    fn build(f: Formula, index: &mut HashMap<Formula, usize>, ops: &mut Vec<Op>) -> usize {
        if let Some(&i) = index.get(&f) {
            return i;
        }
        let op = match f.kind() {
            FormulaKind::True => Op::True,
            FormulaKind::False => Op::False,
            FormulaKind::Prop(p) => Op::Prop(p),
            FormulaKind::NotProp(p) => Op::NotProp(p),
            FormulaKind::And(cs) => {
                Op::And(cs.into_iter().map(|c| Self::build(c, index, ops)).collect())
            }
            FormulaKind::Or(cs) => {
                Op::Or(cs.into_iter().map(|c| Self::build(c, index, ops)).collect())
            }
            FormulaKind::Next(c) => Op::Next(Self::build(c, index, ops)),
            FormulaKind::WeakNext(c) => Op::WeakNext(Self::build(c, index, ops)),
            FormulaKind::Until(l, r) => {
                Op::Until(Self::build(l, index, ops), Self::build(r, index, ops))
            }
            FormulaKind::Release(l, r) => {
                Op::Release(Self::build(l, index, ops), Self::build(r, index, ops))
            }
        };
        ops.push(op);
        let i = ops.len() - 1;
        index.insert(f, i);
        i
    }

    /// Does `rho` satisfy the formula?
    pub fn eval(&mut self, rho: &Trace) -> bool {
        let len = rho.len();
        self.memo.clear();
        self.memo.resize(self.ops.len() * len, 0);
        self.eval_at(self.root, 0, rho)
    }

    fn eval_at(&mut self, sub: usize, pos: usize, rho: &Trace) -> bool {
        let len = rho.len();
        let slot = sub * len + pos;
        match self.memo[slot] {
            1 => return false,
            2 => return true,
            _ => {}
        }
        let value = match &self.ops[sub] {
            Op::True => true,
            Op::False => false,
            Op::Prop(p) => rho.letters()[pos].contains(*p),
            Op::NotProp(p) => !rho.letters()[pos].contains(*p),
            Op::And(cs) => {
                let cs = cs.clone();
                cs.into_iter().all(|c| self.eval_at(c, pos, rho))
            }
            Op::Or(cs) => {
                let cs = cs.clone();
                cs.into_iter().any(|c| self.eval_at(c, pos, rho))
            }
            Op::Next(c) => {
                let c = *c;
                pos + 1 < len && self.eval_at(c, pos + 1, rho)
            }
            Op::WeakNext(c) => {
                let c = *c;
                pos + 1 >= len || self.eval_at(c, pos + 1, rho)
            }
            Op::Until(l, r) => {
                // exists i >= pos with r at i and l at all pos..i
                let (l, r) = (*l, *r);
                let mut value = false;
                for i in pos..len {
                    if self.eval_at(r, i, rho) {
                        value = true;
                        break;
                    }
                    if !self.eval_at(l, i, rho) {
                        break;
                    }
                }
                value
            }
            Op::Release(l, r) => {
                // r holds at every position up to and including the first
                // position where l holds, or throughout the trace
                let (l, r) = (*l, *r);
                let mut value = true;
                for i in pos..len {
                    if !self.eval_at(r, i, rho) {
                        value = false;
                        break;
                    }
                    if self.eval_at(l, i, rho) {
                        break;
                    }
                }
                value
            }
        };
        self.memo[slot] = if value { 2 } else { 1 };
        value
    }
}

/// One-shot convenience wrapper around [`Evaluator`].
pub fn evaluate(rho: &Trace, formula: Formula) -> bool {
    Evaluator::new(formula).eval(rho)
}
