//! Explicit complete DFAs: products, minimization, trimming, language
//! tests, and the DOT / plain-text exchange formats.
//!
//! Transition tables are dense (state-major, letter-minor). Every
//! minimization and trim renumbers states canonically by BFS over letters
//! in ascending order, so "equal up to isomorphism" degenerates to
//! structural equality on minimal automata.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::ltlf::{Alphabet, Letter, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DfaError {
    #[error("product requires identical alphabets")]
    AlphabetMismatch,
}

/// A complete deterministic finite automaton over assignments to the
/// alphabet's propositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitDfa {
    alphabet: Alphabet,
    init: usize,
    /// `trans[s * num_letters + letter]`
    trans: Vec<usize>,
    accepting: Vec<bool>,
    /// Optional per-state annotation (residual formula, product pair, "ew").
    pub labels: Option<Vec<String>>,
}

impl ExplicitDfa {
    /// Assembles a DFA from a dense table. Panics if the table is not
    /// complete or a target is out of range; builders are expected to
    /// produce total functions.
    pub fn from_parts(
        alphabet: Alphabet,
        init: usize,
        trans: Vec<usize>,
        accepting: Vec<bool>,
        labels: Option<Vec<String>>,
    ) -> ExplicitDfa {
        let n = accepting.len();
        let n_letters = alphabet.num_letters();
        assert_eq!(
            trans.len(),
            n * n_letters,
            "transition table must be complete"
        );
        assert!(init < n, "initial state out of range");
        assert!(
            trans.iter().all(|&t| t < n),
            "transition target out of range"
        );
        if let Some(ref labels) = labels {
            assert_eq!(labels.len(), n);
        }
        ExplicitDfa {
            alphabet,
            init,
            trans,
            accepting,
            labels,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.trans.len()
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn step(&self, state: usize, letter: Letter) -> usize {
        self.trans[state * self.alphabet.num_letters() + letter.index()]
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states()).filter(|&s| self.accepting[s])
    }

    /// Runs the table on `rho` and reports membership of the final state.
    pub fn accepts(&self, rho: &Trace) -> bool {
        let mut state = self.init;
        for &letter in rho.letters() {
            state = self.step(state, letter);
        }
        self.accepting[state]
    }

    /// States with no path to an accepting state (empty right language).
    pub fn dead_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut co_reach = self.accepting.clone();
        // inverse edges
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for s in 0..n {
            for letter in self.alphabet.letters() {
                preds[self.step(s, letter)].push(s);
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&s| co_reach[s]).collect();
        while let Some(s) = queue.pop_front() {
            for &p in &preds[s] {
                if !co_reach[p] {
                    co_reach[p] = true;
                    queue.push_back(p);
                }
            }
        }
        co_reach.iter().map(|&c| !c).collect()
    }

    fn bfs_order(&self) -> Vec<Option<usize>> {
        let mut order = vec![None; self.num_states()];
        order[self.init] = Some(0);
        let mut next = 1usize;
        let mut queue = VecDeque::from([self.init]);
        while let Some(s) = queue.pop_front() {
            for letter in self.alphabet.letters() {
                let t = self.step(s, letter);
                if order[t].is_none() {
                    order[t] = Some(next);
                    next += 1;
                    queue.push_back(t);
                }
            }
        }
        order
    }

    fn renumber(&self, order: &[Option<usize>], num_kept: usize) -> ExplicitDfa {
        let n_letters = self.alphabet.num_letters();
        let mut trans = vec![0usize; num_kept * n_letters];
        let mut accepting = vec![false; num_kept];
        let mut labels = self.labels.as_ref().map(|_| vec![String::new(); num_kept]);
        for old in 0..self.num_states() {
            let Some(new) = order[old] else { continue };
            accepting[new] = self.accepting[old];
            if let (Some(out), Some(src)) = (labels.as_mut(), self.labels.as_ref()) {
                out[new] = src[old].clone();
            }
            for letter in self.alphabet.letters() {
                let t = self.step(old, letter);
                trans[new * n_letters + letter.index()] =
                    order[t].expect("reachable state leads to reachable state");
            }
        }
        ExplicitDfa {
            alphabet: self.alphabet.clone(),
            init: order[self.init].unwrap(),
            trans,
            accepting,
            labels,
        }
    }

    /// Drops states unreachable from the initial state and renumbers the
    /// rest BFS-canonically. Language preserved.
    pub fn trim_reachable(&self) -> ExplicitDfa {
        let order = self.bfs_order();
        let kept = order.iter().flatten().count();
        self.renumber(&order, kept)
    }

    /// Reachable product automaton: `L(a x b) = L(a) n L(b)`. States are
    /// discovered breadth-first from the initial pair; a pair is accepting
    /// iff both components are. Labels carry the pair.
    pub fn product(&self, other: &ExplicitDfa) -> Result<ExplicitDfa, DfaError> {
        if self.alphabet != other.alphabet {
            return Err(DfaError::AlphabetMismatch);
        }
        let n_letters = self.alphabet.num_letters();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![(self.init, other.init)];
        index.insert(pairs[0], 0);
        let mut trans = Vec::new();
        let mut at = 0usize;
        while at < pairs.len() {
            let (s1, s2) = pairs[at];
            for letter in self.alphabet.letters() {
                let next = (self.step(s1, letter), other.step(s2, letter));
                let target = *index.entry(next).or_insert_with(|| {
                    pairs.push(next);
                    pairs.len() - 1
                });
                trans.push(target);
            }
            at += 1;
        }
        let accepting = pairs
            .iter()
            .map(|&(s1, s2)| self.accepting[s1] && other.accepting[s2])
            .collect();
        let label_of = |dfa: &ExplicitDfa, s: usize| match &dfa.labels {
            Some(l) => l[s].clone(),
            None => s.to_string(),
        };
        let labels = pairs
            .iter()
            .map(|&(s1, s2)| format!("({}, {})", label_of(self, s1), label_of(other, s2)))
            .collect();
        debug_assert_eq!(trans.len(), pairs.len() * n_letters);
        Ok(ExplicitDfa::from_parts(
            self.alphabet.clone(),
            0,
            trans,
            accepting,
            Some(labels),
        ))
    }

    /// Builds the quotient automaton for a state partition (class ids must
    /// be dense) and renumbers it canonically.
    fn quotient(&self, class_of: &[usize], num_classes: usize) -> ExplicitDfa {
        let n_letters = self.alphabet.num_letters();
        let mut trans = vec![usize::MAX; num_classes * n_letters];
        let mut accepting = vec![false; num_classes];
        for s in 0..self.num_states() {
            let c = class_of[s];
            accepting[c] = self.accepting[s];
            for letter in self.alphabet.letters() {
                trans[c * n_letters + letter.index()] = class_of[self.step(s, letter)];
            }
        }
        let quotient = ExplicitDfa {
            alphabet: self.alphabet.clone(),
            init: class_of[self.init],
            trans,
            accepting,
            labels: None,
        };
        let order = quotient.bfs_order();
        debug_assert!(order.iter().all(|o| o.is_some()));
        quotient.renumber(&order, num_classes)
    }

    /// Hopcroft's partition refinement: worklist of (block, letter)
    /// splitters, preimage splitting, smaller half enqueued. O(L n log n).
    pub fn minimize_hopcroft(&self) -> ExplicitDfa {
        let dfa = self.trim_reachable();
        let n = dfa.num_states();
        let n_letters = dfa.alphabet.num_letters();

        // preimage lists: letter-major, target-minor
        let mut preimage: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; n_letters];
        for s in 0..n {
            for letter in dfa.alphabet.letters() {
                preimage[letter.index()][dfa.step(s, letter)].push(s);
            }
        }

        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of: Vec<usize> = vec![0; n];
        {
            let (acc, rej): (Vec<usize>, Vec<usize>) = (0..n).partition(|&s| dfa.accepting[s]);
            for group in [acc, rej] {
                if group.is_empty() {
                    continue;
                }
                for &s in &group {
                    block_of[s] = blocks.len();
                }
                blocks.push(group);
            }
        }

        let mut worklist: VecDeque<(usize, usize)> = VecDeque::new();
        let mut in_worklist: HashSet<(usize, usize)> = HashSet::new();
        if blocks.len() > 1 {
            let smaller = if blocks[0].len() <= blocks[1].len() {
                0
            } else {
                1
            };
            for c in 0..n_letters {
                worklist.push_back((smaller, c));
                in_worklist.insert((smaller, c));
            }
        }

        let mut touched: Vec<usize> = Vec::new();
        let mut touch_count: HashMap<usize, Vec<usize>> = HashMap::new();
        while let Some((splitter, c)) = worklist.pop_front() {
            in_worklist.remove(&(splitter, c));
            // states with a c-transition into the splitter block
            touched.clear();
            for &t in &blocks[splitter] {
                touched.extend(preimage[c][t].iter().copied());
            }
            touch_count.clear();
            for &s in &touched {
                touch_count.entry(block_of[s]).or_default().push(s);
            }
            for (&b, inside) in touch_count.iter() {
                if inside.len() == blocks[b].len() {
                    continue; // block fully inside the preimage, no split
                }
                // split blocks[b] into inside / outside
                let inside_set: HashSet<usize> = inside.iter().copied().collect();
                let outside: Vec<usize> = blocks[b]
                    .iter()
                    .copied()
                    .filter(|s| !inside_set.contains(s))
                    .collect();
                let new_idx = blocks.len();
                blocks[b] = inside.clone();
                for &s in inside {
                    block_of[s] = b;
                }
                for &s in &outside {
                    block_of[s] = new_idx;
                }
                blocks.push(outside);
                for letter in 0..n_letters {
                    if in_worklist.contains(&(b, letter)) {
                        // pending splitter shrank; its complement must also
                        // be processed
                        worklist.push_back((new_idx, letter));
                        in_worklist.insert((new_idx, letter));
                    } else {
                        let smaller = if blocks[b].len() <= blocks[new_idx].len() {
                            b
                        } else {
                            new_idx
                        };
                        worklist.push_back((smaller, letter));
                        in_worklist.insert((smaller, letter));
                    }
                }
            }
        }

        dfa.quotient(&block_of, blocks.len())
    }

    /// Moore's algorithm: iterated signature refinement until stable.
    /// O(n^2 L); kept as an independent oracle for Hopcroft's output.
    pub fn minimize_moore(&self) -> ExplicitDfa {
        let dfa = self.trim_reachable();
        let n = dfa.num_states();
        let mut class_of: Vec<usize> = dfa.accepting.iter().map(|&a| a as usize).collect();
        let mut num_classes = 2;
        loop {
            let mut sig_to_class: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next: Vec<usize> = Vec::with_capacity(n);
            for s in 0..n {
                let sig: Vec<usize> = dfa
                    .alphabet
                    .letters()
                    .map(|letter| class_of[dfa.step(s, letter)])
                    .collect();
                let key = (class_of[s], sig);
                let fresh = sig_to_class.len();
                next.push(*sig_to_class.entry(key).or_insert(fresh));
            }
            let refined = sig_to_class.len();
            if refined == num_classes {
                class_of = next;
                break;
            }
            num_classes = refined;
            class_of = next;
        }
        // class ids from HashMap insertion are dense but arbitrary; the
        // quotient's canonical renumbering makes the result deterministic
        dfa.quotient(&class_of, num_classes)
    }

    /// GraphViz rendering: doublecircle for accepting states, edges labeled
    /// with signed literals, one edge per letter.
    pub fn to_dot(&self) -> String {
        self.dot_with(|s| match &self.labels {
            Some(labels) => format!("{}: {}", s, labels[s]),
            None => s.to_string(),
        })
    }

    pub(crate) fn dot_with(&self, label: impl Fn(usize) -> String) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n");
        let _ = writeln!(out, "  __init [shape=point];");
        let _ = writeln!(out, "  __init -> s{};", self.init);
        for s in 0..self.num_states() {
            let shape = if self.accepting[s] {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(
                out,
                "  s{} [shape={}, label=\"{}\"];",
                s,
                shape,
                label(s).replace('"', "\\\"")
            );
        }
        for s in 0..self.num_states() {
            for letter in self.alphabet.letters() {
                let _ = writeln!(
                    out,
                    "  s{} -> s{} [label=\"{}\"];",
                    s,
                    self.step(s, letter),
                    self.alphabet.fmt_letter(letter)
                );
            }
        }
        out.push_str("}\n");
        out
    }

    /// Plain-text exchange dump:
    /// `dfa <nstates> <init> <nprops>`, then one `state <idx> <0|1>` line
    /// per state and one `t <from> <letter-bitmask> <to>` line per
    /// transition.
    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "dfa {} {} {}",
            self.num_states(),
            self.init,
            self.alphabet.len()
        );
        for s in 0..self.num_states() {
            let _ = writeln!(out, "state {} {}", s, self.accepting[s] as u8);
        }
        for s in 0..self.num_states() {
            for letter in self.alphabet.letters() {
                let _ = writeln!(out, "t {} {} {}", s, letter.0, self.step(s, letter));
            }
        }
        out
    }
}
