//! DFA games: backward fixpoint solving on explicit arenas, forward
//! on-the-fly solving over progression states, and agent-winning-region
//! construction.
//!
//! The agent moves first each round (Moore order): it fixes the Y-part of
//! the next letter, the environment answers with the X-part, and the agent
//! wins a play by reaching an accepting state.

pub(crate) mod engine;

use std::fmt::Write as _;

use crate::dfa::ExplicitDfa;
use crate::ltlf::{Alphabet, Formula, Letter, SynthesisSpec};
use crate::otf::{initial_state, OtfState, Progression};
use crate::{Limits, SolveError};

use engine::{Arena, Class, SearchMode, SearchResult};

/// Exploration order for agent and environment choices. Verdicts are
/// order-independent; only the work done to reach them varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChoiceOrder {
    #[default]
    Ascending,
    Descending,
}

impl ChoiceOrder {
    pub(crate) fn apply(self, mut v: Vec<Letter>) -> Vec<Letter> {
        if self == ChoiceOrder::Descending {
            v.reverse();
        }
        v
    }
}

/// Knobs shared by all game-solving entry points.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolverConfig {
    pub limits: Limits,
    /// Minimize constructed winning regions (canonical form). Disabling
    /// keeps the raw pruned arena; verdicts are unaffected.
    pub no_minimize: bool,
    pub choice_order: ChoiceOrder,
}

impl SolverConfig {
    fn minimize(&self) -> bool {
        !self.no_minimize
    }
}

/// Counters reported by the forward search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Number of distinct states discovered and expanded.
    pub expanded_states: usize,
}

/// Result of solving a game on an explicit arena.
///
/// `rank` is the number of rounds within which the agent can force
/// acceptance (`None` when it cannot), `chosen_output` a witnessing agent
/// assignment for states of positive rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameResult {
    pub awin: Vec<bool>,
    pub rank: Vec<Option<u32>>,
    pub chosen_output: Vec<Option<Letter>>,
}

impl GameResult {
    pub fn is_winning(&self, state: usize) -> bool {
        self.awin[state]
    }
}

/// Least-fixpoint attractor computation:
/// `W_0 = F`, `W_{k+1} = W_k ∪ { s | ∃Y ∀X. δ(s, X∪Y) ∈ W_k }`.
/// Ranks record the round of first entry; the witnessing Y is the lowest
/// qualifying bitmask at that round.
pub fn solve_backward(g: &ExplicitDfa) -> GameResult {
    let alphabet = g.alphabet();
    let n = g.num_states();
    let mut rank: Vec<Option<u32>> = vec![None; n];
    let mut chosen: Vec<Option<Letter>> = vec![None; n];
    for s in 0..n {
        if g.is_accepting(s) {
            rank[s] = Some(0);
        }
    }
    let mut round = 0u32;
    loop {
        let mut added: Vec<(usize, Letter)> = Vec::new();
        for s in 0..n {
            if rank[s].is_some() {
                continue;
            }
            let witness = alphabet.y_assignments().find(|&y| {
                alphabet
                    .x_assignments()
                    .all(|x| rank[g.step(s, Letter(x.0 | y.0))].is_some())
            });
            if let Some(y) = witness {
                added.push((s, y));
            }
        }
        if added.is_empty() {
            break;
        }
        round += 1;
        for (s, y) in added {
            rank[s] = Some(round);
            chosen[s] = Some(y);
        }
    }
    GameResult {
        awin: rank.iter().map(Option::is_some).collect(),
        rank,
        chosen_output: chosen,
    }
}

/// The agent-winning region of a game: the winning states plus a single
/// non-accepting sink `ew` absorbing every transition through which the
/// environment could win. Kept in canonical minimized form unless
/// minimization was switched off.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinningRegion {
    pub dfa: ExplicitDfa,
    /// Index of the environment-winning sink; `None` when it is
    /// unreachable and was trimmed away.
    pub ew: Option<usize>,
}

impl WinningRegion {
    pub fn is_ew(&self, state: usize) -> bool {
        self.ew == Some(state)
    }

    pub fn num_states(&self) -> usize {
        self.dfa.num_states()
    }

    /// Agent choices from `state` that let the environment reach `ew`:
    /// `{ Y | ∃X. δ(state, X∪Y) = ew }`. For `ew` itself this is every
    /// agent choice.
    pub fn ewin_agent_choices(&self, state: usize) -> Vec<Letter> {
        let Some(ew) = self.ew else {
            return Vec::new();
        };
        let alphabet = self.dfa.alphabet();
        if state == ew {
            return alphabet.y_assignments().collect();
        }
        alphabet
            .y_assignments()
            .filter(|&y| {
                alphabet
                    .x_assignments()
                    .any(|x| self.dfa.step(state, Letter(x.0 | y.0)) == ew)
            })
            .collect()
    }

    /// Complement of [`WinningRegion::ewin_agent_choices`]: choices whose
    /// every environment answer stays inside the winning states.
    pub fn safe_agent_choices(&self, state: usize) -> Vec<Letter> {
        let losing = self.ewin_agent_choices(state);
        self.dfa
            .alphabet()
            .y_assignments()
            .filter(|y| !losing.contains(y))
            .collect()
    }

    /// DOT rendering with the `ew` sink flagged.
    pub fn to_dot(&self) -> String {
        self.dfa.dot_with(|s| {
            if self.is_ew(s) {
                "ew".to_string()
            } else {
                s.to_string()
            }
        })
    }

    /// Exchange dump as in [`ExplicitDfa::to_dump`], with an extra
    /// `ew <idx>` line when the sink is present.
    pub fn to_dump(&self) -> String {
        let mut out = self.dfa.to_dump();
        if let Some(ew) = self.ew {
            let _ = writeln!(out, "ew {ew}");
        }
        out
    }
}

/// Wraps a finished region DFA: canonicalize, then re-identify `ew` as the
/// unique state with empty right language (a winning state always has a
/// path to acceptance, so at most one dead state can exist).
fn finalize_region(dfa: ExplicitDfa, minimize: bool) -> WinningRegion {
    let dfa = if minimize {
        dfa.minimize_hopcroft()
    } else {
        dfa.trim_reachable()
    };
    let dead: Vec<usize> = dfa
        .dead_states()
        .iter()
        .enumerate()
        .filter_map(|(s, &d)| d.then_some(s))
        .collect();
    assert!(
        dead.len() <= 1,
        "a winning region has at most one dead state"
    );
    WinningRegion {
        dfa,
        ew: dead.first().copied(),
    }
}

/// Builds the agent-winning region of an explicit arena from its solved
/// game: states are the winning states plus `ew`; a transition survives iff
/// every environment variant of its agent choice stays winning, otherwise
/// the whole choice is redirected to `ew`.
pub fn build_awr(g: &ExplicitDfa, result: &GameResult, minimize: bool) -> WinningRegion {
    assert!(
        result.awin[g.init()],
        "build_awr requires an agent-winning initial state"
    );
    let alphabet = g.alphabet().clone();
    let mut map = vec![usize::MAX; g.num_states()];
    let mut winning = Vec::new();
    for s in 0..g.num_states() {
        if result.awin[s] {
            map[s] = winning.len();
            winning.push(s);
        }
    }
    let ew = winning.len();
    let n = ew + 1;
    let n_letters = alphabet.num_letters();
    let mut trans = vec![ew; n * n_letters];
    for (new_s, &old_s) in winning.iter().enumerate() {
        for y in alphabet.y_assignments() {
            let safe = alphabet
                .x_assignments()
                .all(|x| result.awin[g.step(old_s, Letter(x.0 | y.0))]);
            if !safe {
                continue; // whole choice to ew, already the default
            }
            for x in alphabet.x_assignments() {
                let letter = Letter(x.0 | y.0);
                trans[new_s * n_letters + letter.index()] = map[g.step(old_s, letter)];
            }
        }
    }
    let mut accepting: Vec<bool> = winning.iter().map(|&s| g.is_accepting(s)).collect();
    accepting.push(false);
    let mut labels: Vec<String> = winning
        .iter()
        .map(|&s| match &g.labels {
            Some(l) => l[s].clone(),
            None => s.to_string(),
        })
        .collect();
    labels.push("ew".to_string());
    let dfa = ExplicitDfa::from_parts(alphabet, map[g.init()], trans, accepting, Some(labels));
    finalize_region(dfa, minimize)
}

/// Assembles a winning region from a completed full forward search.
pub(crate) fn region_from_search<S>(
    res: &SearchResult<S>,
    alphabet: &Alphabet,
    label: impl Fn(&S) -> String,
    minimize: bool,
) -> WinningRegion {
    assert_eq!(res.class[res.init], Class::Awin);
    let mut map = vec![usize::MAX; res.states.len()];
    let mut winning = Vec::new();
    for (s, &c) in res.class.iter().enumerate() {
        if c == Class::Awin {
            map[s] = winning.len();
            winning.push(s);
        }
    }
    let ew = winning.len();
    let n = ew + 1;
    let n_letters = alphabet.num_letters();
    // Every slot defaults to ew; only choices recorded complete with all
    // successors winning keep their transitions. Choices pruned or broken
    // off at a losing successor stay redirected.
    let mut trans = vec![ew; n * n_letters];
    for (new_s, &old_s) in winning.iter().enumerate() {
        for row in &res.rows[old_s] {
            let safe = row.succs.iter().all(|&t| res.class[t] == Class::Awin);
            if !safe {
                continue;
            }
            for (k, &t) in row.succs.iter().enumerate() {
                let letter = Letter(res.xs[k].0 | row.y.0);
                trans[new_s * n_letters + letter.index()] = map[t];
            }
        }
    }
    let mut accepting: Vec<bool> = winning.iter().map(|&s| res.accepting[s]).collect();
    accepting.push(false);
    let mut labels: Vec<String> = winning.iter().map(|&s| label(&res.states[s])).collect();
    labels.push("ew".to_string());
    let dfa = ExplicitDfa::from_parts(
        alphabet.clone(),
        map[res.init],
        trans,
        accepting,
        Some(labels),
    );
    finalize_region(dfa, minimize)
}

/// On-the-fly arena over progression states.
struct OtfArena {
    prog: Progression,
    phi: Formula,
    ys: Vec<Letter>,
}

impl Arena for OtfArena {
    type State = OtfState;

    fn initial(&mut self) -> OtfState {
        initial_state(self.phi)
    }

    fn successor(&mut self, s: &OtfState, letter: Letter) -> OtfState {
        self.prog.successor(s, letter)
    }

    fn is_accepting(&self, s: &OtfState) -> bool {
        s.accepting
    }

    fn agent_choices(&mut self, _s: &OtfState) -> Vec<Letter> {
        self.ys.clone()
    }
}

fn check_prop_limit(alphabet: &Alphabet, limits: &Limits) -> Result<(), SolveError> {
    if alphabet.len() > limits.max_props {
        return Err(SolveError::PropLimit {
            count: alphabet.len(),
            limit: limits.max_props,
        });
    }
    Ok(())
}

fn otf_search(
    spec: &SynthesisSpec,
    cfg: &SolverConfig,
    mode: SearchMode,
) -> Result<SearchResult<OtfState>, SolveError> {
    check_prop_limit(&spec.alphabet, &cfg.limits)?;
    let mut arena = OtfArena {
        prog: Progression::new(),
        phi: spec.formula,
        ys: cfg
            .choice_order
            .apply(spec.alphabet.y_assignments().collect()),
    };
    let xs = cfg
        .choice_order
        .apply(spec.alphabet.x_assignments().collect());
    engine::search(&mut arena, xs, mode, &cfg.limits)
}

/// Full on-the-fly region construction: depth-first search over
/// progression states exploring every agent choice (no early break once a
/// state is proven winning), returning the minimized agent-winning region,
/// or `None` when the specification is unrealizable.
pub fn get_awr_otf(
    spec: &SynthesisSpec,
    cfg: &SolverConfig,
) -> Result<Option<WinningRegion>, SolveError> {
    get_awr_otf_with_stats(spec, cfg).map(|(region, _)| region)
}

pub fn get_awr_otf_with_stats(
    spec: &SynthesisSpec,
    cfg: &SolverConfig,
) -> Result<(Option<WinningRegion>, SearchStats), SolveError> {
    let res = otf_search(spec, cfg, SearchMode::Full)?;
    let stats = SearchStats {
        expanded_states: res.expanded_states(),
    };
    if res.class[res.init] != Class::Awin {
        return Ok((None, stats));
    }
    let region = region_from_search(
        &res,
        &spec.alphabet,
        |s| s.residual.display(&spec.alphabet).to_string(),
        cfg.minimize(),
    );
    Ok((Some(region), stats))
}

/// Realizability check with early termination: same engine as
/// [`get_awr_otf`] but a state stops exploring at its first winning choice
/// and accepting states are not expanded.
pub fn check_realizable_otf(spec: &SynthesisSpec, cfg: &SolverConfig) -> Result<bool, SolveError> {
    check_realizable_otf_with_stats(spec, cfg).map(|(r, _)| r)
}

pub fn check_realizable_otf_with_stats(
    spec: &SynthesisSpec,
    cfg: &SolverConfig,
) -> Result<(bool, SearchStats), SolveError> {
    let res = otf_search(spec, cfg, SearchMode::EarlyStop)?;
    let stats = SearchStats {
        expanded_states: res.expanded_states(),
    };
    Ok((res.class[res.init] == Class::Awin, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltlf::parse_formula;
    use crate::otf::expand_full;

    fn xy_spec(formula: &str) -> SynthesisSpec {
        SynthesisSpec::parse(formula, ".inputs: x\n.outputs: y").unwrap()
    }

    fn arena_of(spec: &SynthesisSpec) -> ExplicitDfa {
        expand_full(spec.formula, &spec.alphabet, &Limits::default()).unwrap()
    }

    #[test]
    fn backward_solves_eventually_y() {
        let spec = xy_spec("F y");
        let g = arena_of(&spec);
        let r = solve_backward(&g);
        assert!(r.awin.iter().all(|&w| w));
        assert_eq!(r.rank[g.init()], Some(1));
        // witnessing output is {y} (the empty assignment loops forever)
        assert_eq!(r.chosen_output[g.init()], Some(Letter(0b10)));
    }

    #[test]
    fn backward_rejects_eventually_x() {
        let spec = SynthesisSpec::parse("F x", ".inputs: x\n.outputs:").unwrap();
        let g = arena_of(&spec);
        let r = solve_backward(&g);
        assert!(!r.awin[g.init()]);
        // fixpoint stabilizes at the accepting states
        assert_eq!(r.awin.iter().filter(|&&w| w).count(), 1);
    }

    #[test]
    fn backward_accepting_init_has_rank_zero() {
        let alphabet = Alphabet::new(&["x"], &["y"]).unwrap();
        let n_letters = alphabet.num_letters();
        let g = ExplicitDfa::from_parts(alphabet, 0, vec![0; n_letters], vec![true], None);
        let r = solve_backward(&g);
        assert_eq!(r.rank[0], Some(0));
        assert!(r.awin[0]);
    }

    #[test]
    fn awr_of_globally_y() {
        let spec = xy_spec("G y");
        let g = arena_of(&spec);
        let r = solve_backward(&g);
        let w = build_awr(&g, &r, true);
        // winning state, accepting state, ew
        assert_eq!(w.dfa.num_states(), 3);
        let ew = w.ew.expect("ew reachable");
        let alphabet = w.dfa.alphabet().clone();
        for s in 0..w.dfa.num_states() {
            if s == ew {
                continue;
            }
            for letter in alphabet.letters() {
                let target = w.dfa.step(s, letter);
                if letter.contains(1) {
                    assert_ne!(target, ew, "y-letters stay winning");
                } else {
                    assert_eq!(target, ew, "dropping y loses");
                }
            }
        }
    }

    #[test]
    fn awr_without_losing_choices_has_no_ew() {
        // every state agent-winning and every choice safe
        let spec = xy_spec("F y");
        let g = arena_of(&spec);
        let r = solve_backward(&g);
        let w = build_awr(&g, &r, true);
        assert_eq!(w.ew, None);
        assert_eq!(w.dfa, g.minimize_hopcroft());
        // the no-y self loop stays in the region rather than going to ew
        let init = w.dfa.init();
        assert_eq!(w.dfa.step(init, Letter(0b00)), init);
        assert_eq!(w.dfa.step(init, Letter(0b01)), init);
    }

    #[test]
    fn otf_region_matches_explicit_pipeline() {
        let spec = xy_spec("F y");
        let otf = get_awr_otf(&spec, &SolverConfig::default())
            .unwrap()
            .expect("realizable");
        let g = arena_of(&spec);
        let explicit = build_awr(&g, &solve_backward(&g), true);
        assert_eq!(otf.dfa, explicit.dfa);
        assert_eq!(otf.ew, explicit.ew);
    }

    #[test]
    fn otf_null_on_unrealizable() {
        let spec = SynthesisSpec::parse("F x", ".inputs: x\n.outputs:").unwrap();
        assert_eq!(get_awr_otf(&spec, &SolverConfig::default()).unwrap(), None);
    }

    #[test]
    fn otf_region_of_true() {
        let spec = xy_spec("true");
        let w = get_awr_otf(&spec, &SolverConfig::default())
            .unwrap()
            .expect("realizable");
        assert_eq!(w.dfa.num_states(), 2);
        assert_eq!(w.ew, None);
        assert!(w.dfa.is_accepting(1));
    }

    #[test]
    fn realizability_checks() {
        assert!(check_realizable_otf(&xy_spec("G (x -> y)"), &SolverConfig::default()).unwrap());
        assert!(!check_realizable_otf(&xy_spec("x"), &SolverConfig::default()).unwrap());
        assert!(check_realizable_otf(&xy_spec("y"), &SolverConfig::default()).unwrap());
    }

    #[test]
    fn ewin_choices_examples() {
        // awr(G y): omitting y at the initial state loses
        let spec = xy_spec("G y");
        let w = get_awr_otf(&spec, &SolverConfig::default())
            .unwrap()
            .unwrap();
        assert_eq!(w.ewin_agent_choices(w.dfa.init()), vec![Letter(0)]);

        // awr(F y): no choice is losing
        let spec = xy_spec("F y");
        let w = get_awr_otf(&spec, &SolverConfig::default())
            .unwrap()
            .unwrap();
        assert!(w.ewin_agent_choices(w.dfa.init()).is_empty());

        // ew itself: every agent choice
        let spec = xy_spec("G y");
        let w = get_awr_otf(&spec, &SolverConfig::default())
            .unwrap()
            .unwrap();
        let ew = w.ew.unwrap();
        assert_eq!(w.ewin_agent_choices(ew).len(), 2);
    }

    #[test]
    fn region_game_classifies_non_ew_as_winning() {
        // agent-equivalence at the decidable level: solving the game on the
        // region marks exactly the non-ew states winning
        for text in ["G y", "G (x -> y)", "F y && G (x -> y)", "y U x || F y"] {
            let spec = xy_spec(text);
            let verdict = check_realizable_otf(&spec, &SolverConfig::default()).unwrap();
            let g = arena_of(&spec);
            let explicit = solve_backward(&g);
            assert_eq!(verdict, explicit.awin[g.init()]);
            if !verdict {
                continue;
            }
            let w = get_awr_otf(&spec, &SolverConfig::default())
                .unwrap()
                .unwrap();
            let region_result = solve_backward(&w.dfa);
            for s in 0..w.dfa.num_states() {
                assert_eq!(region_result.awin[s], !w.is_ew(s), "state {s} in {text}");
            }
        }
    }

    #[test]
    fn eq2_rows_are_all_or_nothing() {
        for text in [
            "G y",
            "G (x -> y)",
            "F y && G (y || x)",
            "X y && G (x -> y)",
        ] {
            let spec = xy_spec(text);
            let Some(w) = get_awr_otf(&spec, &SolverConfig::default()).unwrap() else {
                continue;
            };
            let alphabet = w.dfa.alphabet().clone();
            for s in 0..w.dfa.num_states() {
                if w.is_ew(s) {
                    continue;
                }
                for y in alphabet.y_assignments() {
                    let into_ew: Vec<bool> = alphabet
                        .x_assignments()
                        .map(|x| Some(w.dfa.step(s, Letter(x.0 | y.0))) == w.ew)
                        .collect();
                    assert!(
                        into_ew.iter().all(|&b| b) || into_ew.iter().all(|&b| !b),
                        "row ({s}, {y:?}) of {text} is mixed"
                    );
                }
            }
        }
    }

    #[test]
    fn rank_decreases_under_chosen_output() {
        // playing the recorded output against an exhaustive adversary
        // reaches acceptance within rank(s) rounds on every branch
        fn check(g: &ExplicitDfa, r: &GameResult, s: usize, budget: u32) {
            if g.is_accepting(s) {
                return;
            }
            assert!(budget > 0, "ran out of rounds");
            let y = r.chosen_output[s].expect("winning state has an output");
            for x in g.alphabet().x_assignments() {
                let t = g.step(s, Letter(x.0 | y.0));
                assert!(r.rank[t].unwrap() < r.rank[s].unwrap());
                check(g, r, t, budget - 1);
            }
        }
        for text in ["F y", "G y", "F y && G (x -> y)", "y U x || F y"] {
            let spec = xy_spec(text);
            let g = arena_of(&spec);
            let r = solve_backward(&g);
            if !r.awin[g.init()] {
                continue;
            }
            check(&g, &r, g.init(), r.rank[g.init()].unwrap());
        }
    }

    #[test]
    fn verdicts_invariant_under_choice_order() {
        let mut alphabet = Alphabet::new(&["x1", "x2"], &["y1", "y2"]).unwrap();
        for text in [
            "G (x1 -> y1) && F y2",
            "F x1",
            "y1 U x1",
            "G y1 && F (y2 && x2)",
            "(x1 -> F y1) && G (y2 || y1)",
        ] {
            let formula = parse_formula(text, &mut alphabet).unwrap();
            let spec = SynthesisSpec::new(alphabet.clone(), formula).unwrap();
            let asc = SolverConfig::default();
            let desc = SolverConfig {
                choice_order: ChoiceOrder::Descending,
                ..SolverConfig::default()
            };
            assert_eq!(
                check_realizable_otf(&spec, &asc).unwrap(),
                check_realizable_otf(&spec, &desc).unwrap(),
                "verdict differs for {text}"
            );
            let (ra, rd) = (
                get_awr_otf(&spec, &asc).unwrap(),
                get_awr_otf(&spec, &desc).unwrap(),
            );
            assert_eq!(ra.is_some(), rd.is_some());
            if let (Some(ra), Some(rd)) = (ra, rd) {
                assert_eq!(ra.dfa, rd.dfa, "canonical regions differ for {text}");
            }
        }
    }

    #[test]
    fn region_export_flags_ew() {
        let spec = xy_spec("G y");
        let w = get_awr_otf(&spec, &SolverConfig::default())
            .unwrap()
            .unwrap();
        assert!(w.to_dot().contains("label=\"ew\""));
        let dump = w.to_dump();
        assert!(dump.lines().last().unwrap().starts_with("ew "));
    }
}
