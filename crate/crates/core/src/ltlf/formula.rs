use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use super::alphabet::Alphabet;
use super::intern;

/// A hash-consed LTLf formula in negation normal form.
///
/// Negation occurs only on propositions; `And`/`Or` children are flattened,
/// constant-folded, deduplicated, and kept in a canonical structural order.
/// Two formulas are logically identical as trees iff their ids are equal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Formula(u32);

/// The node stored behind a [`Formula`] id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FormulaKind {
    True,
    False,
    Prop(usize),
    NotProp(usize),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    /// Strong next: requires a successor instant.
    Next(Formula),
    /// Weak next: vacuously true at the last instant.
    WeakNext(Formula),
    Until(Formula, Formula),
    Release(Formula, Formula),
}

impl Formula {
    pub const TRUE: Formula = Formula(0);
    pub const FALSE: Formula = Formula(1);

    pub(super) fn from_id(id: u32) -> Formula {
        Formula(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    pub fn kind(self) -> FormulaKind {
        match self {
            Formula::TRUE => FormulaKind::True,
            Formula::FALSE => FormulaKind::False,
            _ => intern::kind_of(self),
        }
    }

    pub fn is_true(self) -> bool {
        self == Formula::TRUE
    }

    pub fn is_false(self) -> bool {
        self == Formula::FALSE
    }

    pub fn prop(index: usize) -> Formula {
        intern::intern(FormulaKind::Prop(index))
    }

    pub fn not_prop(index: usize) -> Formula {
        intern::intern(FormulaKind::NotProp(index))
    }

    pub fn next(f: Formula) -> Formula {
        intern::intern(FormulaKind::Next(f))
    }

    pub fn weak_next(f: Formula) -> Formula {
        intern::intern(FormulaKind::WeakNext(f))
    }

    pub fn until(lhs: Formula, rhs: Formula) -> Formula {
        intern::intern(FormulaKind::Until(lhs, rhs))
    }

    pub fn release(lhs: Formula, rhs: Formula) -> Formula {
        intern::intern(FormulaKind::Release(lhs, rhs))
    }

    /// `F f`, defined as `tt U f`.
    pub fn eventually(f: Formula) -> Formula {
        Formula::until(Formula::TRUE, f)
    }

    /// `G f`, defined as `ff R f`.
    pub fn globally(f: Formula) -> Formula {
        Formula::release(Formula::FALSE, f)
    }

    /// Canonical n-ary conjunction: flattens one level of nested `And`,
    /// drops `true`, collapses to `false` on a `false` child, sorts
    /// structurally and deduplicates.
    pub fn and(children: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::nary(children, /*conjunction=*/ true)
    }

    /// Canonical n-ary disjunction, dual to [`Formula::and`].
    pub fn or(children: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::nary(children, /*conjunction=*/ false)
    }

    fn nary(children: impl IntoIterator<Item = Formula>, conjunction: bool) -> Formula {
        let (absorb, neutral) = if conjunction {
            (Formula::FALSE, Formula::TRUE)
        } else {
            (Formula::TRUE, Formula::FALSE)
        };
        let mut flat = Vec::new();
        for c in children {
            match c.kind() {
                FormulaKind::And(grand) if conjunction => flat.extend(grand),
                FormulaKind::Or(grand) if !conjunction => flat.extend(grand),
                _ if c == absorb => return absorb,
                _ if c == neutral => {}
                _ => flat.push(c),
            }
        }
        flat.sort_by(|a, b| structural_cmp(*a, *b));
        flat.dedup();
        match flat.len() {
            0 => neutral,
            1 => flat[0],
            _ => intern::intern(if conjunction {
                FormulaKind::And(flat)
            } else {
                FormulaKind::Or(flat)
            }),
        }
    }

    /// All distinct subformulas including `self` (the closure `cl`).
    pub fn subformulas(self) -> Vec<Formula> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if !seen.insert(f) {
                continue;
            }
            out.push(f);
            match f.kind() {
                FormulaKind::True
                | FormulaKind::False
                | FormulaKind::Prop(_)
                | FormulaKind::NotProp(_) => {}
                FormulaKind::And(cs) | FormulaKind::Or(cs) => stack.extend(cs),
                FormulaKind::Next(c) | FormulaKind::WeakNext(c) => stack.push(c),
                FormulaKind::Until(l, r) | FormulaKind::Release(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        out
    }

    /// Indices of all propositions occurring in the formula.
    pub fn props(self) -> Vec<usize> {
        let mut props: Vec<usize> = self
            .subformulas()
            .into_iter()
            .filter_map(|f| match f.kind() {
                FormulaKind::Prop(i) | FormulaKind::NotProp(i) => Some(i),
                _ => None,
            })
            .collect();
        props.sort_unstable();
        props.dedup();
        props
    }

    /// Renders the formula in the surface grammar, resolving proposition
    /// indices against `alphabet`. The output parses back to the same id.
    pub fn display(self, alphabet: &Alphabet) -> FormulaDisplay<'_> {
        FormulaDisplay {
            formula: self,
            alphabet,
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula#{}", self.0)
    }
}

/// Total structural order on formulas, independent of interning history.
/// Nodes compare by kind rank, then payload; `And`/`Or` children compare
/// lexicographically. `Equal` coincides with id equality by hash-consing.
pub(super) fn structural_cmp(a: Formula, b: Formula) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    fn rank(k: &FormulaKind) -> u8 {
        match k {
            FormulaKind::True => 0,
            FormulaKind::False => 1,
            FormulaKind::Prop(_) => 2,
            FormulaKind::NotProp(_) => 3,
            FormulaKind::And(_) => 4,
            FormulaKind::Or(_) => 5,
            FormulaKind::Next(_) => 6,
            FormulaKind::WeakNext(_) => 7,
            FormulaKind::Until(_, _) => 8,
            FormulaKind::Release(_, _) => 9,
        }
    }
    let (ka, kb) = (a.kind(), b.kind());
    rank(&ka).cmp(&rank(&kb)).then_with(|| match (ka, kb) {
        (FormulaKind::Prop(i), FormulaKind::Prop(j))
        | (FormulaKind::NotProp(i), FormulaKind::NotProp(j)) => i.cmp(&j),
        (FormulaKind::And(xs), FormulaKind::And(ys))
        | (FormulaKind::Or(xs), FormulaKind::Or(ys)) => {
            for (x, y) in xs.iter().zip(ys.iter()) {
                match structural_cmp(*x, *y) {
                    Ordering::Equal => {}
                    other => return other,
                }
            }
            xs.len().cmp(&ys.len())
        }
        (FormulaKind::Next(x), FormulaKind::Next(y))
        | (FormulaKind::WeakNext(x), FormulaKind::WeakNext(y)) => structural_cmp(x, y),
        (FormulaKind::Until(l1, r1), FormulaKind::Until(l2, r2))
        | (FormulaKind::Release(l1, r1), FormulaKind::Release(l2, r2)) => {
            structural_cmp(l1, l2).then_with(|| structural_cmp(r1, r2))
        }
        _ => unreachable!("equal ranks imply equal kind shapes"),
    })
}

/// Rebuilds a formula bottom-up through the canonical constructors.
/// Identity on formulas built through this module; exercised by tests as
/// an idempotence check.
pub fn canonicalize(f: Formula) -> Formula {
    match f.kind() {
        FormulaKind::True => Formula::TRUE,
        FormulaKind::False => Formula::FALSE,
        FormulaKind::Prop(i) => Formula::prop(i),
        FormulaKind::NotProp(i) => Formula::not_prop(i),
        FormulaKind::And(cs) => Formula::and(cs.into_iter().map(canonicalize)),
        FormulaKind::Or(cs) => Formula::or(cs.into_iter().map(canonicalize)),
        FormulaKind::Next(c) => Formula::next(canonicalize(c)),
        FormulaKind::WeakNext(c) => Formula::weak_next(canonicalize(c)),
        FormulaKind::Until(l, r) => Formula::until(canonicalize(l), canonicalize(r)),
        FormulaKind::Release(l, r) => Formula::release(canonicalize(l), canonicalize(r)),
    }
}

/// Splits a formula into its top-level conjuncts. Non-conjunctive formulas
/// yield a singleton list. Children of a canonical `And` are already
/// deduplicated and in a stable order.
pub fn decompose(f: Formula) -> Vec<Formula> {
    match f.kind() {
        FormulaKind::And(cs) => cs,
        _ => vec![f],
    }
}

/// One-step unfolding into *next normal form*: a positive Boolean
/// combination of literals, constants, and `Next`/`WeakNext`-rooted
/// subformulas. `Until` and `Release` unfold as
/// `l U r = r | (l & X(l U r))` and `l R r = r & (l | N(l R r))`.
pub fn xnf(f: Formula) -> Formula {
    match f.kind() {
        FormulaKind::True
        | FormulaKind::False
        | FormulaKind::Prop(_)
        | FormulaKind::NotProp(_)
        | FormulaKind::Next(_)
        | FormulaKind::WeakNext(_) => f,
        FormulaKind::And(cs) => Formula::and(cs.into_iter().map(xnf)),
        FormulaKind::Or(cs) => Formula::or(cs.into_iter().map(xnf)),
        FormulaKind::Until(l, r) => Formula::or([xnf(r), Formula::and([xnf(l), Formula::next(f)])]),
        FormulaKind::Release(l, r) => {
            Formula::and([xnf(r), Formula::or([xnf(l), Formula::weak_next(f)])])
        }
    }
}

pub struct FormulaDisplay<'a> {
    formula: Formula,
    alphabet: &'a Alphabet,
}

// Binding strengths used by the printer; must agree with the parser.
// NNF has no implications, so the printer starts below `||`.
const PREC_IFF: u8 = 0;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_TEMPORAL: u8 = 4;
const PREC_UNARY: u8 = 5;

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self.formula, self.alphabet, PREC_IFF)
    }
}

fn write_formula(
    f: &mut fmt::Formatter<'_>,
    formula: Formula,
    alphabet: &Alphabet,
    min_prec: u8,
) -> fmt::Result {
    let prec = match formula.kind() {
        FormulaKind::True | FormulaKind::False | FormulaKind::Prop(_) | FormulaKind::NotProp(_) => {
            PREC_UNARY
        }
        FormulaKind::Next(_) | FormulaKind::WeakNext(_) => PREC_UNARY,
        FormulaKind::And(_) => PREC_AND,
        FormulaKind::Or(_) => PREC_OR,
        FormulaKind::Until(_, _) | FormulaKind::Release(_, _) => PREC_TEMPORAL,
    };
    let parens = prec < min_prec;
    if parens {
        write!(f, "(")?;
    }
    match formula.kind() {
        FormulaKind::True => write!(f, "true")?,
        FormulaKind::False => write!(f, "false")?,
        FormulaKind::Prop(i) => write!(f, "{}", alphabet.name(i))?,
        FormulaKind::NotProp(i) => write!(f, "!{}", alphabet.name(i))?,
        FormulaKind::And(cs) => {
            for (k, c) in cs.into_iter().enumerate() {
                if k > 0 {
                    write!(f, " && ")?;
                }
                write_formula(f, c, alphabet, PREC_TEMPORAL)?;
            }
        }
        FormulaKind::Or(cs) => {
            for (k, c) in cs.into_iter().enumerate() {
                if k > 0 {
                    write!(f, " || ")?;
                }
                write_formula(f, c, alphabet, PREC_AND)?;
            }
        }
        FormulaKind::Next(c) => {
            write!(f, "X ")?;
            write_formula(f, c, alphabet, PREC_UNARY)?;
        }
        FormulaKind::WeakNext(c) => {
            write!(f, "N ")?;
            write_formula(f, c, alphabet, PREC_UNARY)?;
        }
        FormulaKind::Until(l, r) if l.is_true() => {
            write!(f, "F ")?;
            write_formula(f, r, alphabet, PREC_UNARY)?;
        }
        FormulaKind::Release(l, r) if l.is_false() => {
            write!(f, "G ")?;
            write_formula(f, r, alphabet, PREC_UNARY)?;
        }
        FormulaKind::Until(l, r) => {
            write_formula(f, l, alphabet, PREC_UNARY)?;
            write!(f, " U ")?;
            write_formula(f, r, alphabet, PREC_TEMPORAL)?;
        }
        FormulaKind::Release(l, r) => {
            write_formula(f, l, alphabet, PREC_UNARY)?;
            write!(f, " R ")?;
            write_formula(f, r, alphabet, PREC_TEMPORAL)?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}
