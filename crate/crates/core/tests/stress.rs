//! Deep and wide instances: the forward search uses an explicit frame
//! stack, so chain-shaped arenas thousands of states deep must solve
//! without exhausting the thread stack.

use ltlf_synth::compose::{synthesize, SynthOptions};
use ltlf_synth::game::{check_realizable_otf, get_awr_otf, solve_backward, SolverConfig};
use ltlf_synth::ltlf::SynthesisSpec;
use ltlf_synth::otf::expand_full;
use ltlf_synth::Limits;

fn chain_formula(depth: usize, goal: &str) -> String {
    let mut text = String::new();
    for _ in 0..depth {
        text.push_str("X ");
    }
    text.push_str(goal);
    text
}

#[test]
fn deep_agent_chain_is_realizable() {
    let depth = 1500;
    let spec =
        SynthesisSpec::parse(&chain_formula(depth, "y"), ".inputs: x\n.outputs: y").unwrap();
    let cfg = SolverConfig::default();
    assert!(check_realizable_otf(&spec, &cfg).unwrap());

    let region = get_awr_otf(&spec, &cfg).unwrap().expect("realizable");
    // one state per instant, the accepting sink, and ew
    assert_eq!(region.num_states(), depth + 3);
    assert!(region.ew.is_some());
    let solved = solve_backward(&region.dfa);
    assert_eq!(solved.rank[region.dfa.init()], Some(depth as u32 + 1));
}

#[test]
fn deep_environment_chain_is_unrealizable() {
    let depth = 1500;
    let spec =
        SynthesisSpec::parse(&chain_formula(depth, "x"), ".inputs: x\n.outputs: y").unwrap();
    assert!(!check_realizable_otf(&spec, &SolverConfig::default()).unwrap());
}

#[test]
fn deep_chain_explicit_pipeline_agrees() {
    let depth = 800;
    let spec =
        SynthesisSpec::parse(&chain_formula(depth, "y"), ".inputs: x\n.outputs: y").unwrap();
    let arena = expand_full(spec.formula, &spec.alphabet, &Limits::default()).unwrap();
    let solved = solve_backward(&arena);
    assert!(solved.awin[arena.init()]);
    assert_eq!(solved.rank[arena.init()], Some(depth as u32 + 1));
}

#[test]
fn six_proposition_conjunction_synthesizes() {
    const PART: &str = ".inputs: x1 x2 x3\n.outputs: y1 y2 y3";
    // realizable: keep everything on and halt after one round
    let spec = SynthesisSpec::parse(
        "G (x1 -> y1) && F y2 && (x2 R y3) && G (y2 || y3)",
        PART,
    )
    .unwrap();
    // unrealizable: the environment can withhold x2 forever
    let doomed = SynthesisSpec::parse(
        "G (x1 -> y1) && F y2 && (y3 U x2) && G (y2 || y3)",
        PART,
    )
    .unwrap();
    for mode in [
        ltlf_synth::compose::Mode::Individual,
        ltlf_synth::compose::Mode::Incremental,
        ltlf_synth::compose::Mode::Monolithic,
    ] {
        let opts = SynthOptions {
            mode,
            verify: true,
            ..SynthOptions::default()
        };
        let verdict = synthesize(&spec, &opts).unwrap();
        assert!(verdict.realizable, "mode {mode:?}");
        assert!(!synthesize(&doomed, &opts).unwrap().realizable, "mode {mode:?}");
    }
}
