//! The compositional synthesis pipeline.
//!
//! A conjunctive specification is split into conjuncts; each conjunct is
//! first checked realizable on its own (an unrealizable conjunct settles
//! the whole problem), then the per-conjunct winning regions are folded
//! together. Two composition variants are provided: *individual* solves
//! the next conjunct to a minimized region before taking a product and
//! re-solving, *incremental* searches the product of the previous region
//! with the next conjunct's progression states directly, pruning agent
//! choices the region already knows to be losing.

use std::fmt;
use std::time::Instant;

use thiserror::Error;

use crate::dfa::ExplicitDfa;
use crate::game::{
    build_awr, check_realizable_otf_with_stats, engine, get_awr_otf_with_stats, region_from_search,
    solve_backward, ChoiceOrder, SearchStats, SolverConfig, WinningRegion,
};
use crate::ltlf::{decompose, Alphabet, Formula, Letter, SynthesisSpec};
use crate::otf::{expand_full, initial_state, OtfState, Progression};
use crate::strategy::{build_strategy, verify_strategy, MooreStrategy};
use crate::{Limits, SolveError};

use engine::{Arena, Class, SearchMode};

/// How the conjuncts are solved and combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    Individual,
    #[default]
    Incremental,
    /// No decomposition: the whole formula is solved as one conjunct.
    /// Serves as the baseline the compositional modes are checked against.
    Monolithic,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Individual => write!(f, "individual"),
            Mode::Incremental => write!(f, "incremental"),
            Mode::Monolithic => write!(f, "monolithic"),
        }
    }
}

/// Order in which conjuncts are processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConjunctOrder {
    /// Order produced by decomposition.
    #[default]
    Given,
    /// Ascending number of subformulas; composing small regions first
    /// keeps intermediate products small.
    SizeAsc,
}

/// Where an unrealizability verdict came from, mirroring the three
/// scenarios a conjunctive specification can fall into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Conjunct `i` (1-based) is unrealizable on its own; nothing was
    /// composed.
    UnrealizableConjunct(usize),
    /// Every conjunct is realizable alone but the composition died at
    /// conjunct `i`; the full state space was never searched.
    UnrealizableAfterComposing(usize),
    /// All compositions succeeded.
    FullComposition,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::UnrealizableConjunct(i) => write!(f, "conjunct:{i}"),
            Provenance::UnrealizableAfterComposing(i) => write!(f, "composed:{i}"),
            Provenance::FullComposition => write!(f, "full"),
        }
    }
}

/// Per-phase counters and timings, rendered as one `key=value` line.
#[derive(Debug, Clone, Default)]
pub struct SynthStats {
    pub mode: String,
    pub conjuncts: usize,
    pub precheck_ms: u128,
    pub precheck_states: usize,
    pub compose_ms: u128,
    pub compose_states: usize,
    pub region_sizes: Vec<usize>,
    pub strategy_states: usize,
    pub total_ms: u128,
}

impl fmt::Display for SynthStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let regions = self
            .region_sizes
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",");
        write!(
            f,
            "mode={} conjuncts={} precheck_ms={} precheck_states={} compose_ms={} \
             compose_states={} regions={} strategy_states={} total_ms={}",
            self.mode,
            self.conjuncts,
            self.precheck_ms,
            self.precheck_states,
            self.compose_ms,
            self.compose_states,
            regions,
            self.strategy_states,
            self.total_ms
        )
    }
}

/// Outcome of a synthesis run.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub realizable: bool,
    pub provenance: Provenance,
    pub strategy: Option<MooreStrategy>,
    /// Final winning region, for export and inspection.
    pub region: Option<WinningRegion>,
    pub stats: SynthStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("synthesized strategy failed verification: {0}")]
    Verification(String),
}

/// Options for [`synthesize`].
#[derive(Debug, Clone, Copy, Default)]
pub struct SynthOptions {
    pub mode: Mode,
    pub order: ConjunctOrder,
    /// Skip the per-conjunct realizability pass; unrealizable conjuncts
    /// are then only caught during composition.
    pub skip_precheck: bool,
    /// Disable region minimization (verdicts unaffected).
    pub no_minimize: bool,
    /// Exhaustively verify the synthesized strategy before returning.
    pub verify: bool,
    pub limits: Limits,
    pub choice_order: ChoiceOrder,
    /// After each composition step, recompute the held region from scratch
    /// on the conjunction prefix and assert canonical equality. Expensive;
    /// meant for tests at desk scale.
    pub debug_check_invariant: bool,
}

impl SynthOptions {
    fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            limits: self.limits,
            no_minimize: self.no_minimize,
            choice_order: self.choice_order,
        }
    }
}

/// The region the composition fold starts from: a two-state automaton
/// accepting every non-empty trace (the winning region of `true`, which
/// has no losing choices and hence no ew sink).
pub fn seed_region_tt(alphabet: &Alphabet) -> WinningRegion {
    let n_letters = alphabet.num_letters();
    let trans = vec![1usize; 2 * n_letters];
    // already in canonical minimized form (labels carry no information)
    WinningRegion {
        dfa: ExplicitDfa::from_parts(alphabet.clone(), 0, trans, vec![false, true], None),
        ew: None,
    }
}

/// Individual composition: solve the new conjunct to its own minimized
/// winning region, take the product with the carried region, re-solve the
/// game, and prune to the product's winning region. Returns `None` exactly
/// when the conjunction so far is unrealizable.
pub fn compose_individual(
    w1: &WinningRegion,
    psi2: Formula,
    cfg: &SolverConfig,
) -> Result<(Option<WinningRegion>, SearchStats), SolveError> {
    let alphabet = w1.dfa.alphabet().clone();
    let spec2 = SynthesisSpec::new(alphabet, psi2).expect("conjunct stays within the alphabet");
    let (w2, stats) = get_awr_otf_with_stats(&spec2, cfg)?;
    let Some(w2) = w2 else {
        return Ok((None, stats));
    };
    let product = w1
        .dfa
        .product(&w2.dfa)
        .expect("regions share the specification alphabet");
    let solved = solve_backward(&product);
    if !solved.awin[product.init()] {
        return Ok((None, stats));
    }
    Ok((Some(build_awr(&product, &solved, !cfg.no_minimize)), stats))
}

/// Pair arena for incremental composition: the first component steps
/// through the carried region's stored table, the second is generated on
/// the fly from the new conjunct. Agent choices the region has marked as
/// losing are pruned before exploration, so the ew sink is never entered.
struct PairArena<'a> {
    region: &'a WinningRegion,
    prog: Progression,
    psi2: Formula,
    all_ys: Vec<Letter>,
    /// Safe agent choices per region state, in search order; `None` when
    /// pruning is disabled.
    safe_ys: Option<Vec<Vec<Letter>>>,
}

impl Arena for PairArena<'_> {
    type State = (usize, OtfState);

    fn initial(&mut self) -> Self::State {
        (self.region.dfa.init(), initial_state(self.psi2))
    }

    fn successor(&mut self, s: &Self::State, letter: Letter) -> Self::State {
        (
            self.region.dfa.step(s.0, letter),
            self.prog.successor(&s.1, letter),
        )
    }

    fn is_accepting(&self, s: &Self::State) -> bool {
        self.region.dfa.is_accepting(s.0) && s.1.accepting
    }

    fn agent_choices(&mut self, s: &Self::State) -> Vec<Letter> {
        match &self.safe_ys {
            Some(per_state) => per_state[s.0].clone(),
            None => self.all_ys.clone(),
        }
    }
}

/// Incremental composition: one forward search over pair states solves the
/// game on `region x conjunct` directly. Fulfills the same contract as
/// [`compose_individual`]; the two variants produce canonically identical
/// regions.
pub fn compose_incremental(
    w1: &WinningRegion,
    psi2: Formula,
    cfg: &SolverConfig,
    prune: bool,
) -> Result<(Option<WinningRegion>, SearchStats), SolveError> {
    let alphabet = w1.dfa.alphabet().clone();
    check_prop_limit(&alphabet, &cfg.limits)?;
    let safe_ys = prune.then(|| {
        (0..w1.dfa.num_states())
            .map(|s| cfg.choice_order.apply(w1.safe_agent_choices(s)))
            .collect()
    });
    let mut arena = PairArena {
        region: w1,
        prog: Progression::new(),
        psi2,
        all_ys: cfg.choice_order.apply(alphabet.y_assignments().collect()),
        safe_ys,
    };
    let xs = cfg.choice_order.apply(alphabet.x_assignments().collect());
    let res = engine::search(&mut arena, xs, SearchMode::Full, &cfg.limits)?;
    let stats = SearchStats {
        expanded_states: res.expanded_states(),
    };
    if res.class[res.init] != Class::Awin {
        return Ok((None, stats));
    }
    let region = region_from_search(
        &res,
        &alphabet,
        |(s1, s2)| format!("({}, {})", s1, s2.residual.display(&alphabet)),
        !cfg.no_minimize,
    );
    Ok((Some(region), stats))
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

/// End-to-end compositional synthesis.
///
/// Phase 1 checks each conjunct with the early-terminating engine and
/// reports the first unrealizable one. Phase 2 folds the composition
/// operator over the conjuncts starting from the region of `true`. On
/// success a strategy is extracted from the final region.
pub fn synthesize(spec: &SynthesisSpec, opts: &SynthOptions) -> Result<Verdict, SynthError> {
    let t_total = Instant::now();
    let cfg = opts.solver_config();
    let mut conjuncts = match opts.mode {
        Mode::Monolithic => vec![spec.formula],
        _ => decompose(spec.formula),
    };
    if opts.order == ConjunctOrder::SizeAsc {
        conjuncts.sort_by_key(|c| c.subformulas().len());
    }

    let mut stats = SynthStats {
        mode: opts.mode.to_string(),
        conjuncts: conjuncts.len(),
        ..SynthStats::default()
    };

    let unrealizable = |provenance, mut stats: SynthStats, t_total: Instant| {
        stats.total_ms = t_total.elapsed().as_millis();
        Ok(Verdict {
            realizable: false,
            provenance,
            strategy: None,
            region: None,
            stats,
        })
    };

    if !opts.skip_precheck {
        let t = Instant::now();
        for (i, &conjunct) in conjuncts.iter().enumerate() {
            let sub = spec.with_formula(conjunct);
            let (realizable, search) = check_realizable_otf_with_stats(&sub, &cfg)?;
            stats.precheck_states += search.expanded_states;
            if !realizable {
                stats.precheck_ms = t.elapsed().as_millis();
                return unrealizable(Provenance::UnrealizableConjunct(i + 1), stats, t_total);
            }
        }
        stats.precheck_ms = t.elapsed().as_millis();
    }

    let t = Instant::now();
    let mut region = seed_region_tt(&spec.alphabet);
    for (i, &conjunct) in conjuncts.iter().enumerate() {
        let (next, search) = match opts.mode {
            Mode::Individual => compose_individual(&region, conjunct, &cfg)?,
            Mode::Incremental | Mode::Monolithic => {
                compose_incremental(&region, conjunct, &cfg, true)?
            }
        };
        stats.compose_states += search.expanded_states;
        match next {
            Some(r) => region = r,
            None => {
                stats.compose_ms = t.elapsed().as_millis();
                return unrealizable(
                    Provenance::UnrealizableAfterComposing(i + 1),
                    stats,
                    t_total,
                );
            }
        }
        stats.region_sizes.push(region.num_states());
        if opts.debug_check_invariant && !opts.no_minimize {
            check_loop_invariant(spec, &conjuncts[..=i], &region, &opts.limits);
        }
    }
    stats.compose_ms = t.elapsed().as_millis();

    let solved = solve_backward(&region.dfa);
    let strategy = build_strategy(&region, &solved);
    stats.strategy_states = strategy.num_states();
    if opts.verify {
        let bound = solved.rank[region.dfa.init()].expect("winning initial state") as usize;
        verify_strategy(&strategy, spec.formula, bound)
            .map_err(|ce| SynthError::Verification(ce.to_string()))?;
    }
    stats.total_ms = t_total.elapsed().as_millis();
    Ok(Verdict {
        realizable: true,
        provenance: Provenance::FullComposition,
        strategy: Some(strategy),
        region: Some(region),
        stats,
    })
}

/// Debug-mode loop invariant: the carried region equals (canonically) the
/// winning region computed from scratch on the conjunction prefix.
fn check_loop_invariant(
    spec: &SynthesisSpec,
    prefix: &[Formula],
    region: &WinningRegion,
    limits: &Limits,
) {
    let conj = Formula::and(prefix.iter().copied());
    let g = expand_full(conj, &spec.alphabet, limits).expect("debug oracle within limits");
    let solved = solve_backward(&g);
    assert!(
        solved.awin[g.init()],
        "composition succeeded on an unrealizable prefix"
    );
    let oracle = build_awr(&g, &solved, true);
    assert_eq!(
        region.dfa, oracle.dfa,
        "composed region diverged from the monolithic oracle"
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::get_awr_otf;

    const XY: &str = ".inputs: x\n.outputs: y";
    const XYY: &str = ".inputs: x\n.outputs: y1 y2";

    fn spec(formula: &str, part: &str) -> SynthesisSpec {
        SynthesisSpec::parse(formula, part).unwrap()
    }

    fn region_of(s: &SynthesisSpec) -> WinningRegion {
        get_awr_otf(s, &SolverConfig::default())
            .unwrap()
            .expect("realizable")
    }

    #[test]
    fn seed_region_is_the_region_of_true() {
        let s = spec("true", XY);
        let seed = seed_region_tt(&s.alphabet);
        let oracle = region_of(&s);
        assert_eq!(seed.dfa, oracle.dfa);
        assert_eq!(seed.ew, oracle.ew);
    }

    #[test]
    fn individual_composes_two_reachability_goals() {
        let s = spec("F y1 && F y2", XYY);
        let conjuncts = decompose(s.formula);
        let w1 = region_of(&s.with_formula(conjuncts[0]));
        let cfg = SolverConfig::default();
        let (region, _) = compose_individual(&w1, conjuncts[1], &cfg).unwrap();
        let composed = region.expect("conjunction realizable");
        let monolithic = region_of(&s);
        assert_eq!(composed.dfa, monolithic.dfa);
    }

    #[test]
    fn individual_null_on_unsatisfiable_conjunction() {
        let s = spec("F y && G !y", XY);
        let conjuncts = decompose(s.formula);
        let w1 = region_of(&s.with_formula(conjuncts[0]));
        let cfg = SolverConfig::default();
        let (region, _) = compose_individual(&w1, conjuncts[1], &cfg).unwrap();
        assert!(region.is_none());
        assert!(get_awr_otf(&s, &cfg).unwrap().is_none());
    }

    #[test]
    fn composing_onto_seed_is_identity() {
        let s = spec("G (x -> y)", XY);
        let seed = seed_region_tt(&s.alphabet);
        let cfg = SolverConfig::default();
        let oracle = region_of(&s);
        let (individual, _) = compose_individual(&seed, s.formula, &cfg).unwrap();
        assert_eq!(individual.unwrap().dfa, oracle.dfa);
        let (incremental, _) = compose_incremental(&seed, s.formula, &cfg, true).unwrap();
        assert_eq!(incremental.unwrap().dfa, oracle.dfa);
    }

    #[test]
    fn variants_agree_on_examples() {
        let cfg = SolverConfig::default();
        for (text, part) in [
            ("F y1 && F y2", XYY),
            ("F y && G !y", XY),
            ("G y1 && F y2", XYY),
            ("G (x -> y) && F y", XY),
        ] {
            let s = spec(text, part);
            let conjuncts = decompose(s.formula);
            let w1 = region_of(&s.with_formula(conjuncts[0]));
            let (a, _) = compose_individual(&w1, conjuncts[1], &cfg).unwrap();
            let (b, _) = compose_incremental(&w1, conjuncts[1], &cfg, true).unwrap();
            match (a, b) {
                (Some(a), Some(b)) => assert_eq!(a.dfa, b.dfa, "{text}"),
                (None, None) => {}
                _ => panic!("variants disagree on {text}"),
            }
        }
    }

    #[test]
    fn pruning_skips_losing_choices() {
        // awr(G y1) forbids dropping y1; the pruned search never visits the
        // pair states behind those choices while the unpruned one does
        let base = spec("G y1 && F y2", XYY);
        let mut alphabet = base.alphabet.clone();
        let psi1 = crate::ltlf::parse_formula("G y1", &mut alphabet).unwrap();
        let psi2 = crate::ltlf::parse_formula("F y2", &mut alphabet).unwrap();
        let w1 = region_of(&base.with_formula(psi1));
        assert!(!w1.ewin_agent_choices(w1.dfa.init()).is_empty());
        let cfg = SolverConfig::default();
        let (pruned_region, pruned) = compose_incremental(&w1, psi2, &cfg, true).unwrap();
        let (full_region, unpruned) = compose_incremental(&w1, psi2, &cfg, false).unwrap();
        assert!(pruned.expanded_states < unpruned.expanded_states);
        assert_eq!(pruned_region.unwrap().dfa, full_region.unwrap().dfa);
    }

    #[test]
    fn synthesize_reports_unrealizable_conjunct() {
        let v = synthesize(&spec("F x && G y", XY), &SynthOptions::default()).unwrap();
        assert!(!v.realizable);
        assert_eq!(v.provenance, Provenance::UnrealizableConjunct(1));
        assert!(v.strategy.is_none());
        // the blamed conjunct re-checks unrealizable in isolation
        let s = spec("F x && G y", XY);
        let conjuncts = decompose(s.formula);
        assert!(
            !check_realizable_otf_with_stats(
                &s.with_formula(conjuncts[0]),
                &SolverConfig::default()
            )
            .unwrap()
            .0
        );
    }

    #[test]
    fn synthesize_reports_failed_composition() {
        let v = synthesize(&spec("F y && G !y", XY), &SynthOptions::default()).unwrap();
        assert!(!v.realizable);
        assert_eq!(v.provenance, Provenance::UnrealizableAfterComposing(2));
    }

    #[test]
    fn synthesize_builds_verified_strategy() {
        let opts = SynthOptions {
            verify: true,
            debug_check_invariant: true,
            ..SynthOptions::default()
        };
        let v = synthesize(&spec("F y1 && F y2", XYY), &opts).unwrap();
        assert!(v.realizable);
        assert_eq!(v.provenance, Provenance::FullComposition);
        let strategy = v.strategy.expect("strategy present");
        assert!(strategy.rounds_to_halt().unwrap() <= 2);
    }

    #[test]
    fn modes_agree_on_examples() {
        for (text, part) in [
            ("F y1 && F y2", XYY),
            ("F y && G !y", XY),
            ("F x && G y", XY),
            ("G (x -> y) && F y", XY),
            ("y1 U x && G y2", XYY),
        ] {
            let s = spec(text, part);
            let mut verdicts = Vec::new();
            for mode in [Mode::Individual, Mode::Incremental, Mode::Monolithic] {
                let opts = SynthOptions {
                    mode,
                    ..SynthOptions::default()
                };
                verdicts.push(synthesize(&s, &opts).unwrap().realizable);
            }
            assert!(
                verdicts.windows(2).all(|w| w[0] == w[1]),
                "{text}: {verdicts:?}"
            );
        }
    }

    #[test]
    fn verdict_invariant_under_conjunct_order() {
        for (text, part) in [
            ("G (x -> y1) && F y2 && F y1", XYY),
            ("F y && G !y", XY),
            ("(x -> F y1) && G y2", XYY),
        ] {
            let s = spec(text, part);
            let given = synthesize(&s, &SynthOptions::default()).unwrap();
            let sorted = synthesize(
                &s,
                &SynthOptions {
                    order: ConjunctOrder::SizeAsc,
                    ..SynthOptions::default()
                },
            )
            .unwrap();
            assert_eq!(given.realizable, sorted.realizable, "{text}");
        }
    }

    #[test]
    fn skip_precheck_shifts_provenance_only() {
        let s = spec("F x && G y", XY);
        let opts = SynthOptions {
            skip_precheck: true,
            ..SynthOptions::default()
        };
        let v = synthesize(&s, &opts).unwrap();
        assert!(!v.realizable);
        assert!(matches!(
            v.provenance,
            Provenance::UnrealizableAfterComposing(_)
        ));
    }

    #[test]
    fn no_minimize_keeps_verdicts() {
        let s = spec("F y1 && G (x -> y2)", XYY);
        let opts = SynthOptions {
            no_minimize: true,
            verify: true,
            ..SynthOptions::default()
        };
        let v = synthesize(&s, &opts).unwrap();
        assert!(v.realizable);
    }

    #[test]
    fn stats_line_is_machine_readable() {
        let v = synthesize(&spec("F y", XY), &SynthOptions::default()).unwrap();
        let line = v.stats.to_string();
        assert!(line.starts_with("mode=incremental conjuncts=1 "));
        assert!(line.contains(" total_ms="));
    }
}
