use std::collections::BTreeSet;
use std::fmt;

use super::alphabet::{Alphabet, SpecError};
use super::formula::Formula;
use super::trace::Trace;

/// Parser-level formula tree. Unlike [`Formula`] it still carries general
/// negation, implication, equivalence, and the `F`/`G` sugar; everything
/// past the parser lowers through [`Expr::to_nnf`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    True,
    False,
    Prop(String),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
    Next(Box<Expr>),
    WeakNext(Box<Expr>),
    Eventually(Box<Expr>),
    Globally(Box<Expr>),
    Until(Box<Expr>, Box<Expr>),
    Release(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    /// Lowers to the canonical negation normal form, registering any new
    /// proposition names in `alphabet`.
    pub fn to_nnf(&self, alphabet: &mut Alphabet) -> Result<Formula, SpecError> {
        self.lower(alphabet, false)
    }

    fn lower(&self, alphabet: &mut Alphabet, negated: bool) -> Result<Formula, SpecError> {
        let f = match self {
            Expr::True => {
                if negated {
                    Formula::FALSE
                } else {
                    Formula::TRUE
                }
            }
            Expr::False => {
                if negated {
                    Formula::TRUE
                } else {
                    Formula::FALSE
                }
            }
            Expr::Prop(name) => {
                let idx = alphabet.register(name)?;
                if negated {
                    Formula::not_prop(idx)
                } else {
                    Formula::prop(idx)
                }
            }
            Expr::Not(e) => e.lower(alphabet, !negated)?,
            Expr::And(l, r) => {
                let (l, r) = (l.lower(alphabet, negated)?, r.lower(alphabet, negated)?);
                if negated {
                    Formula::or([l, r])
                } else {
                    Formula::and([l, r])
                }
            }
            Expr::Or(l, r) => {
                let (l, r) = (l.lower(alphabet, negated)?, r.lower(alphabet, negated)?);
                if negated {
                    Formula::and([l, r])
                } else {
                    Formula::or([l, r])
                }
            }
            Expr::Implies(l, r) => {
                // l -> r == !l || r
                let lp = l.lower(alphabet, !negated)?;
                let rp = r.lower(alphabet, negated)?;
                if negated {
                    Formula::and([lp, rp])
                } else {
                    Formula::or([lp, rp])
                }
            }
            Expr::Iff(l, r) => {
                let (lp, ln) = (l.lower(alphabet, false)?, l.lower(alphabet, true)?);
                let (rp, rn) = (r.lower(alphabet, false)?, r.lower(alphabet, true)?);
                if negated {
                    // xor
                    Formula::or([Formula::and([lp, rn]), Formula::and([ln, rp])])
                } else {
                    Formula::or([Formula::and([lp, rp]), Formula::and([ln, rn])])
                }
            }
            Expr::Next(e) => {
                // !(X f) == N !f
                let inner = e.lower(alphabet, negated)?;
                if negated {
                    Formula::weak_next(inner)
                } else {
                    Formula::next(inner)
                }
            }
            Expr::WeakNext(e) => {
                let inner = e.lower(alphabet, negated)?;
                if negated {
                    Formula::next(inner)
                } else {
                    Formula::weak_next(inner)
                }
            }
            Expr::Eventually(e) => {
                // F f == tt U f, !(F f) == G !f == ff R !f
                let inner = e.lower(alphabet, negated)?;
                if negated {
                    Formula::globally(inner)
                } else {
                    Formula::eventually(inner)
                }
            }
            Expr::Globally(e) => {
                let inner = e.lower(alphabet, negated)?;
                if negated {
                    Formula::eventually(inner)
                } else {
                    Formula::globally(inner)
                }
            }
            Expr::Until(l, r) => {
                // !(l U r) == !l R !r
                let (l, r) = (l.lower(alphabet, negated)?, r.lower(alphabet, negated)?);
                if negated {
                    Formula::release(l, r)
                } else {
                    Formula::until(l, r)
                }
            }
            Expr::Release(l, r) => {
                let (l, r) = (l.lower(alphabet, negated)?, r.lower(alphabet, negated)?);
                if negated {
                    Formula::until(l, r)
                } else {
                    Formula::release(l, r)
                }
            }
        };
        Ok(f)
    }

    /// Direct trace evaluation of the raw tree, one clause per connective.
    /// Serves as the reference oracle that NNF lowering is checked against;
    /// it never rewrites the formula.
    pub fn eval(&self, rho: &Trace, alphabet: &Alphabet) -> bool {
        self.eval_at(rho, 0, alphabet)
    }

    fn eval_at(&self, rho: &Trace, pos: usize, alphabet: &Alphabet) -> bool {
        let len = rho.len();
        match self {
            Expr::True => true,
            Expr::False => false,
            Expr::Prop(name) => {
                let idx = alphabet
                    .prop_index(name)
                    .unwrap_or_else(|| panic!("unregistered proposition '{name}'"));
                rho.letters()[pos].contains(idx)
            }
            Expr::Not(e) => !e.eval_at(rho, pos, alphabet),
            Expr::And(l, r) => l.eval_at(rho, pos, alphabet) && r.eval_at(rho, pos, alphabet),
            Expr::Or(l, r) => l.eval_at(rho, pos, alphabet) || r.eval_at(rho, pos, alphabet),
            Expr::Implies(l, r) => !l.eval_at(rho, pos, alphabet) || r.eval_at(rho, pos, alphabet),
            Expr::Iff(l, r) => l.eval_at(rho, pos, alphabet) == r.eval_at(rho, pos, alphabet),
            Expr::Next(e) => pos + 1 < len && e.eval_at(rho, pos + 1, alphabet),
            Expr::WeakNext(e) => pos + 1 >= len || e.eval_at(rho, pos + 1, alphabet),
            Expr::Eventually(e) => (pos..len).any(|i| e.eval_at(rho, i, alphabet)),
            Expr::Globally(e) => (pos..len).all(|i| e.eval_at(rho, i, alphabet)),
            Expr::Until(l, r) => {
                for i in pos..len {
                    if r.eval_at(rho, i, alphabet) {
                        return true;
                    }
                    if !l.eval_at(rho, i, alphabet) {
                        return false;
                    }
                }
                false
            }
            Expr::Release(l, r) => {
                for i in pos..len {
                    if !r.eval_at(rho, i, alphabet) {
                        return false;
                    }
                    if l.eval_at(rho, i, alphabet) {
                        return true;
                    }
                }
                true
            }
        }
    }

    /// Names of all propositions mentioned in the tree.
    pub fn prop_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::True | Expr::False => {}
            Expr::Prop(name) => {
                out.insert(name.clone());
            }
            Expr::Not(e)
            | Expr::Next(e)
            | Expr::WeakNext(e)
            | Expr::Eventually(e)
            | Expr::Globally(e) => e.collect_props(out),
            Expr::And(l, r)
            | Expr::Or(l, r)
            | Expr::Implies(l, r)
            | Expr::Iff(l, r)
            | Expr::Until(l, r)
            | Expr::Release(l, r) => {
                l.collect_props(out);
                r.collect_props(out);
            }
        }
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized surface syntax; guaranteed to re-parse.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::True => write!(f, "true"),
            Expr::False => write!(f, "false"),
            Expr::Prop(name) => write!(f, "{name}"),
            Expr::Not(e) => write!(f, "!{e}"),
            Expr::And(l, r) => write!(f, "({l} && {r})"),
            Expr::Or(l, r) => write!(f, "({l} || {r})"),
            Expr::Implies(l, r) => write!(f, "({l} -> {r})"),
            Expr::Iff(l, r) => write!(f, "({l} <-> {r})"),
            Expr::Next(e) => write!(f, "X {e}"),
            Expr::WeakNext(e) => write!(f, "N {e}"),
            Expr::Eventually(e) => write!(f, "F {e}"),
            Expr::Globally(e) => write!(f, "G {e}"),
            Expr::Until(l, r) => write!(f, "({l} U {r})"),
            Expr::Release(l, r) => write!(f, "({l} R {r})"),
        }
    }
}
