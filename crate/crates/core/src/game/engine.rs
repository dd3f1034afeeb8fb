//! Forward game search over a lazily generated arena.
//!
//! The search classifies each discovered state as agent-winning,
//! environment-winning, or undetermined, exploring depth-first with an
//! explicit frame stack (arenas can be deep chains, so no recursion).
//! Tarjan's SCC bookkeeping is threaded through the traversal; when an SCC
//! root closes, a local backward fixpoint promotes any member that has an
//! agent choice whose environment successors are all agent-winning, and the
//! members still undetermined after stabilization are environment-winning:
//! every explored successor of a closed SCC lies in it or in an earlier,
//! fully classified SCC, so no outside information is pending.

use std::collections::HashMap;
use std::hash::Hash;
use std::mem;

use crate::ltlf::Letter;
use crate::{Limits, SolveError};

/// A two-player reachability game presented lazily: states are produced on
/// demand, the agent fixes the Y-part of a letter, the environment the
/// X-part, and the agent wins by reaching an accepting state.
pub(crate) trait Arena {
    type State: Clone + Eq + Hash;

    fn initial(&mut self) -> Self::State;
    fn successor(&mut self, s: &Self::State, letter: Letter) -> Self::State;
    fn is_accepting(&self, s: &Self::State) -> bool;
    /// Agent choices to explore from `s`, in search order. Choices omitted
    /// here are treated as immediately environment-winning.
    fn agent_choices(&mut self, s: &Self::State) -> Vec<Letter>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Class {
    Undetermined,
    Awin,
    Ewin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SearchMode {
    /// Explore every agent choice of every reachable state, even after the
    /// state is proven agent-winning; region construction needs the full
    /// transition structure.
    Full,
    /// Realizability only: the first winning choice settles a state and
    /// accepting states are not expanded at all.
    EarlyStop,
}

/// One fully explored agent choice: environment successors aligned with
/// the search's X order. Choices cut short by a proven environment-winning
/// successor are not recorded.
pub(crate) struct Row {
    pub y: Letter,
    pub succs: Vec<usize>,
}

pub(crate) struct SearchResult<S> {
    pub states: Vec<S>,
    pub class: Vec<Class>,
    pub accepting: Vec<bool>,
    pub rows: Vec<Vec<Row>>,
    pub xs: Vec<Letter>,
    pub init: usize,
}

impl<S> SearchResult<S> {
    pub fn expanded_states(&self) -> usize {
        self.states.len()
    }
}

/// Per-state search data, grown as the arena is discovered.
struct Nodes<S> {
    states: Vec<S>,
    index: HashMap<S, usize>,
    class: Vec<Class>,
    accepting: Vec<bool>,
    rows: Vec<Vec<Row>>,
    /// Tarjan lowlink; the discovery index of a node is its dense id.
    lowlink: Vec<usize>,
    on_stack: Vec<bool>,
    scc_stack: Vec<usize>,
}

impl<S: Clone + Eq + Hash> Nodes<S> {
    fn new() -> Self {
        Nodes {
            states: Vec::new(),
            index: HashMap::new(),
            class: Vec::new(),
            accepting: Vec::new(),
            rows: Vec::new(),
            lowlink: Vec::new(),
            on_stack: Vec::new(),
            scc_stack: Vec::new(),
        }
    }

    fn enter(&mut self, s: S, accepting: bool, limit: usize) -> Result<usize, SolveError> {
        if self.states.len() >= limit {
            return Err(SolveError::StateLimit { limit });
        }
        let id = self.states.len();
        self.index.insert(s.clone(), id);
        self.states.push(s);
        self.class.push(if accepting {
            Class::Awin
        } else {
            Class::Undetermined
        });
        self.accepting.push(accepting);
        self.rows.push(Vec::new());
        self.lowlink.push(id);
        self.on_stack.push(true);
        self.scc_stack.push(id);
        Ok(id)
    }

    fn close_scc_at_root(&mut self, root: usize) {
        if self.lowlink[root] != root {
            return;
        }
        let mut scc = Vec::new();
        loop {
            let t = self.scc_stack.pop().expect("scc stack underflow");
            self.on_stack[t] = false;
            scc.push(t);
            if t == root {
                break;
            }
        }
        resolve_scc(&mut self.class, &self.rows, &scc);
    }
}

struct Frame {
    state: usize,
    choices: Vec<Letter>,
    y_idx: usize,
    x_idx: usize,
    row_succs: Vec<usize>,
    ewin_some_x: bool,
    undet_some_x: bool,
    ewin_all_y: bool,
    /// Child this frame is waiting on, if its subtree is being searched.
    awaiting: Option<usize>,
}

impl Frame {
    fn new(state: usize, choices: Vec<Letter>) -> Frame {
        Frame {
            state,
            choices,
            y_idx: 0,
            x_idx: 0,
            row_succs: Vec::new(),
            ewin_some_x: false,
            undet_some_x: false,
            ewin_all_y: true,
            awaiting: None,
        }
    }

    fn next_row(&mut self) {
        self.y_idx += 1;
        self.x_idx = 0;
        self.row_succs.clear();
        self.ewin_some_x = false;
        self.undet_some_x = false;
    }

    /// Reacts to the classification of the successor just explored:
    /// a proven environment-winning successor abandons the current choice,
    /// anything else is recorded and the environment loop advances.
    fn absorb_successor(&mut self, child: usize, child_class: Class) {
        match child_class {
            Class::Ewin => {
                self.ewin_some_x = true;
                self.next_row();
            }
            Class::Undetermined => {
                self.undet_some_x = true;
                self.row_succs.push(child);
                self.x_idx += 1;
            }
            Class::Awin => {
                self.row_succs.push(child);
                self.x_idx += 1;
            }
        }
    }
}

pub(crate) fn search<A: Arena>(
    arena: &mut A,
    xs: Vec<Letter>,
    mode: SearchMode,
    limits: &Limits,
) -> Result<SearchResult<A::State>, SolveError> {
    let mut nodes: Nodes<A::State> = Nodes::new();
    let mut frames: Vec<Frame> = Vec::new();

    let choices_of = |arena: &mut A, s: &A::State, accepting: bool| {
        if mode == SearchMode::EarlyStop && accepting {
            Vec::new()
        } else {
            arena.agent_choices(s)
        }
    };

    let root = arena.initial();
    let root_acc = arena.is_accepting(&root);
    let root_choices = choices_of(arena, &root, root_acc);
    let root_id = nodes.enter(root, root_acc, limits.max_states)?;
    frames.push(Frame::new(root_id, root_choices));

    'outer: while let Some(depth) = frames.len().checked_sub(1) {
        if let Some(child) = frames[depth].awaiting.take() {
            // a child's subtree just finished
            let s = frames[depth].state;
            nodes.lowlink[s] = nodes.lowlink[s].min(nodes.lowlink[child]);
            frames[depth].absorb_successor(child, nodes.class[child]);
        }

        loop {
            let s = frames[depth].state;
            if frames[depth].y_idx >= frames[depth].choices.len() {
                // state fully processed
                let f = frames.pop().expect("frame present");
                if nodes.class[s] == Class::Undetermined && f.ewin_all_y {
                    nodes.class[s] = Class::Ewin;
                }
                nodes.close_scc_at_root(s);
                continue 'outer;
            }

            if frames[depth].x_idx >= xs.len() {
                // choice fully explored: record the row and classify
                let f = &mut frames[depth];
                let y = f.choices[f.y_idx];
                let succs = mem::take(&mut f.row_succs);
                debug_assert_eq!(succs.len(), xs.len());
                nodes.rows[s].push(Row { y, succs });
                if !f.ewin_some_x {
                    f.ewin_all_y = false;
                    if !f.undet_some_x && nodes.class[s] == Class::Undetermined {
                        nodes.class[s] = Class::Awin;
                        if mode == SearchMode::EarlyStop {
                            f.y_idx = f.choices.len();
                            continue;
                        }
                    }
                }
                f.next_row();
                continue;
            }

            let letter = {
                let f = &frames[depth];
                Letter(xs[f.x_idx].0 | f.choices[f.y_idx].0)
            };
            let current = nodes.states[s].clone();
            let succ = arena.successor(&current, letter);
            match nodes.index.get(&succ) {
                Some(&t) => {
                    if nodes.on_stack[t] {
                        nodes.lowlink[s] = nodes.lowlink[s].min(t);
                    }
                    frames[depth].absorb_successor(t, nodes.class[t]);
                }
                None => {
                    let acc = arena.is_accepting(&succ);
                    let choices = choices_of(arena, &succ, acc);
                    let t = nodes.enter(succ, acc, limits.max_states)?;
                    frames[depth].awaiting = Some(t);
                    frames.push(Frame::new(t, choices));
                    continue 'outer;
                }
            }
        }
    }

    debug_assert!(nodes.class.iter().all(|&c| c != Class::Undetermined));
    Ok(SearchResult {
        states: nodes.states,
        class: nodes.class,
        accepting: nodes.accepting,
        rows: nodes.rows,
        xs,
        init: root_id,
    })
}

/// Local backward fixpoint over a closed SCC: promote a member once some
/// recorded choice has every environment successor agent-winning, repeat to
/// stabilization, then condemn the rest. Successors outside the SCC are
/// already final, successors inside are covered by the iteration.
fn resolve_scc(class: &mut [Class], rows: &[Vec<Row>], scc: &[usize]) {
    loop {
        let mut changed = false;
        for &s in scc {
            if class[s] != Class::Undetermined {
                continue;
            }
            let winning = rows[s]
                .iter()
                .any(|row| row.succs.iter().all(|&t| class[t] == Class::Awin));
            if winning {
                class[s] = Class::Awin;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for &s in scc {
        if class[s] == Class::Undetermined {
            class[s] = Class::Ewin;
        }
    }
}
