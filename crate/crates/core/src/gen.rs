//! Seeded random formula and specification generation, used by the random
//! corpora in the test suites and by the `gen` CLI subcommand. Everything
//! is deterministic per seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ltlf::Expr;

// A fixed stream cipher RNG so output is stable across platforms and
// library versions; StdRng makes no such promise.
pub type GenRng = ChaCha8Rng;

/// Creates the generator RNG for a seed.
pub fn rng_for_seed(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn leaf(rng: &mut GenRng, props: &[String], negations: bool) -> Expr {
    let roll = rng.gen_range(0u32..10);
    match roll {
        0 => Expr::True,
        1 => Expr::False,
        _ => {
            let p = Expr::Prop(props[rng.gen_range(0..props.len())].clone());
            if negations && rng.gen_bool(0.3) {
                Expr::not(p)
            } else {
                p
            }
        }
    }
}

/// Random raw formula of at most `size` connectives, drawing freely on
/// negation, implication, equivalence and the derived temporal operators.
pub fn random_raw_expr(rng: &mut GenRng, props: &[String], size: usize) -> Expr {
    if size <= 1 {
        return leaf(rng, props, false);
    }
    let split = |rng: &mut GenRng, size: usize| {
        let left = rng.gen_range(1..size);
        (left, size - left)
    };
    // binary connectives need a budget of at least two
    let roll = if size >= 3 {
        rng.gen_range(0u32..12)
    } else {
        rng.gen_range(0u32..5)
    };
    match roll {
        0 => Expr::not(random_raw_expr(rng, props, size - 1)),
        1 => Expr::Next(Box::new(random_raw_expr(rng, props, size - 1))),
        2 => Expr::WeakNext(Box::new(random_raw_expr(rng, props, size - 1))),
        3 => Expr::Eventually(Box::new(random_raw_expr(rng, props, size - 1))),
        4 => Expr::Globally(Box::new(random_raw_expr(rng, props, size - 1))),
        5 | 6 => {
            let (l, r) = split(rng, size - 1);
            Expr::And(
                Box::new(random_raw_expr(rng, props, l)),
                Box::new(random_raw_expr(rng, props, r)),
            )
        }
        7 => {
            let (l, r) = split(rng, size - 1);
            Expr::Or(
                Box::new(random_raw_expr(rng, props, l)),
                Box::new(random_raw_expr(rng, props, r)),
            )
        }
        8 => {
            let (l, r) = split(rng, size - 1);
            Expr::Implies(
                Box::new(random_raw_expr(rng, props, l)),
                Box::new(random_raw_expr(rng, props, r)),
            )
        }
        9 => {
            let (l, r) = split(rng, size - 1);
            Expr::Iff(
                Box::new(random_raw_expr(rng, props, l)),
                Box::new(random_raw_expr(rng, props, r)),
            )
        }
        10 => {
            let (l, r) = split(rng, size - 1);
            Expr::Until(
                Box::new(random_raw_expr(rng, props, l)),
                Box::new(random_raw_expr(rng, props, r)),
            )
        }
        _ => {
            let (l, r) = split(rng, size - 1);
            Expr::Release(
                Box::new(random_raw_expr(rng, props, l)),
                Box::new(random_raw_expr(rng, props, r)),
            )
        }
    }
}

/// Random formula already in negation normal form at the surface level:
/// negation only on propositions, no implication or equivalence.
pub fn random_nnf_expr(rng: &mut GenRng, props: &[String], size: usize) -> Expr {
    if size <= 1 {
        return leaf(rng, props, true);
    }
    let split = |rng: &mut GenRng, size: usize| {
        let left = rng.gen_range(1..size);
        (left, size - left)
    };
    let roll = if size >= 3 {
        rng.gen_range(0u32..9)
    } else {
        rng.gen_range(0u32..4)
    };
    match roll {
        0 => Expr::Next(Box::new(random_nnf_expr(rng, props, size - 1))),
        1 => Expr::WeakNext(Box::new(random_nnf_expr(rng, props, size - 1))),
        2 => Expr::Eventually(Box::new(random_nnf_expr(rng, props, size - 1))),
        3 => Expr::Globally(Box::new(random_nnf_expr(rng, props, size - 1))),
        4 | 5 => {
            let (l, r) = split(rng, size - 1);
            Expr::And(
                Box::new(random_nnf_expr(rng, props, l)),
                Box::new(random_nnf_expr(rng, props, r)),
            )
        }
        6 => {
            let (l, r) = split(rng, size - 1);
            Expr::Or(
                Box::new(random_nnf_expr(rng, props, l)),
                Box::new(random_nnf_expr(rng, props, r)),
            )
        }
        7 => {
            let (l, r) = split(rng, size - 1);
            Expr::Until(
                Box::new(random_nnf_expr(rng, props, l)),
                Box::new(random_nnf_expr(rng, props, r)),
            )
        }
        _ => {
            let (l, r) = split(rng, size - 1);
            Expr::Release(
                Box::new(random_nnf_expr(rng, props, l)),
                Box::new(random_nnf_expr(rng, props, r)),
            )
        }
    }
}

/// A generated specification as file contents: formula text plus the
/// `.part` partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedSpec {
    pub formula: String,
    pub partition: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

/// Generates a conjunction of `n_conjuncts` random NNF formulas of at most
/// `size` connectives each over fresh variables `x1..` and `y1..`. Every
/// conjunct mentions at least one output variable (resampled otherwise),
/// so no conjunct is trivially out of the agent's hands.
pub fn random_spec(
    seed: u64,
    n_conjuncts: usize,
    size: usize,
    n_inputs: usize,
    n_outputs: usize,
) -> GeneratedSpec {
    assert!(
        n_conjuncts > 0 && size > 0 && n_outputs > 0,
        "bounds must be positive"
    );
    let inputs: Vec<String> = (1..=n_inputs).map(|i| format!("x{i}")).collect();
    let outputs: Vec<String> = (1..=n_outputs).map(|i| format!("y{i}")).collect();
    let props: Vec<String> = inputs.iter().chain(outputs.iter()).cloned().collect();
    let mut rng = rng_for_seed(seed);
    let mut conjuncts = Vec::with_capacity(n_conjuncts);
    for _ in 0..n_conjuncts {
        let expr = loop {
            let candidate = random_nnf_expr(&mut rng, &props, size);
            let names = candidate.prop_names();
            if outputs.iter().any(|y| names.contains(y)) {
                break candidate;
            }
        };
        conjuncts.push(format!("({expr})"));
    }
    GeneratedSpec {
        formula: conjuncts.join(" && "),
        partition: format!(
            ".inputs: {}\n.outputs: {}\n",
            inputs.join(" "),
            outputs.join(" ")
        ),
        inputs,
        outputs,
    }
}
