//! Global hash-consing store for formula nodes.
//!
//! Structurally equal canonical trees receive the same id, so formula
//! equality (and therefore on-the-fly DFA state equality) is an integer
//! compare. The store is append-only and shared process-wide behind a
//! mutex; formulas themselves are `Copy` ids and freely cross threads.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::formula::{Formula, FormulaKind};

struct Store {
    nodes: Vec<FormulaKind>,
    ids: HashMap<FormulaKind, u32>,
}

static STORE: OnceLock<Mutex<Store>> = OnceLock::new();

fn store() -> &'static Mutex<Store> {
    STORE.get_or_init(|| {
        let mut s = Store {
            nodes: Vec::new(),
            ids: HashMap::new(),
        };
        // Fixed ids for the constants, see `Formula::TRUE` / `Formula::FALSE`.
        s.nodes.push(FormulaKind::True);
        s.ids.insert(FormulaKind::True, 0);
        s.nodes.push(FormulaKind::False);
        s.ids.insert(FormulaKind::False, 1);
        Mutex::new(s)
    })
}

pub(super) fn intern(kind: FormulaKind) -> Formula {
    let mut s = store().lock().unwrap();
    if let Some(&id) = s.ids.get(&kind) {
        return Formula::from_id(id);
    }
    let id = s.nodes.len() as u32;
    s.nodes.push(kind.clone());
    s.ids.insert(kind, id);
    Formula::from_id(id)
}

pub(super) fn kind_of(f: Formula) -> FormulaKind {
    store().lock().unwrap().nodes[f.id() as usize].clone()
}
