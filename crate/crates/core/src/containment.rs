//! Query containment `q ⊨ q'` for the tractable classes, plus a bounded
//! exhaustive refutation search used as a semantic cross-check.

use crate::eval::{holds_at, normalize_diamond, normalize_path};
use crate::masks::{AtomTable, Mask, MaskedPath};
use crate::model::{
    AtomSet, DataInstance, DiamondQueryNF, PathQuery, Query, QueryClass, Signature, TemporalOp,
};
use crate::{Error, Result};

/// A monotone map from the positions of the weaker query into the positions
/// of the stronger one, certifying `q ⊨ q'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContainmentWitness {
    /// `map[i]` is the position of `q` that hosts position `i` of `q'`.
    pub map: Vec<usize>,
}

impl ContainmentWitness {
    /// Checks the witness conditions for `q ⊨ q2`.
    pub fn validate(&self, q: &PathQuery, q2: &PathQuery) -> bool {
        let h = &self.map;
        if h.len() != q2.tdp() + 1 || h[0] != 0 {
            return false;
        }
        for i in 0..h.len() {
            if h[i] > q.tdp() || !q2.label(i).is_subset(q.label(h[i])) {
                return false;
            }
            if i > 0 {
                if h[i] <= h[i - 1] {
                    return false;
                }
                if q2.op(i) == TemporalOp::Next
                    && (q.op(h[i]) != TemporalOp::Next || h[i] != h[i - 1] + 1)
                {
                    return false;
                }
            }
        }
        true
    }
}

/// Greedy leftmost witness search over the maximal `◯`-blocks of `q2`.
/// Assumes both queries are in normal form.
pub(crate) fn path_entails_unchecked(q: &PathQuery, q2: &PathQuery) -> Option<Vec<usize>> {
    if !q2.rho0.is_subset(&q.rho0) {
        return None;
    }
    let n = q.tdp();
    let m = q2.tdp();
    let mut h = vec![0usize];
    // the block anchored at position 0: forced onto positions 0, 1, …
    let mut i = 1;
    while i <= m && q2.op(i) == TemporalOp::Next {
        if i > n || q.op(i) != TemporalOp::Next || !q2.label(i).is_subset(q.label(i)) {
            return None;
        }
        h.push(i);
        i += 1;
    }
    // each later block starts with a ◇-step of q2
    while i <= m {
        let start = i;
        let mut len = 1;
        while start + len <= m && q2.op(start + len) == TemporalOp::Next {
            len += 1;
        }
        let prev_end = *h.last().unwrap();
        let fits = |p: usize| -> bool {
            if p + len - 1 > n {
                return false;
            }
            for j in 0..len {
                if !q2.label(start + j).is_subset(q.label(p + j)) {
                    return false;
                }
                if j > 0 && q.op(p + j) != TemporalOp::Next {
                    return false;
                }
            }
            true
        };
        let p = (prev_end + 1..=n).find(|&p| fits(p))?;
        h.extend(p..p + len);
        i = start + len;
    }
    Some(h)
}

fn require_normal(q: &PathQuery) -> Result<()> {
    if q.is_normal_form() {
        Ok(())
    } else {
        Err(Error::NotNormalForm(q.to_string()))
    }
}

/// Decides `q ⊨ q2` for path `◯◇`-queries in normal form, returning a
/// containment witness when it holds.
pub fn path_contains(q: &PathQuery, q2: &PathQuery) -> Result<Option<ContainmentWitness>> {
    require_normal(q)?;
    require_normal(q2)?;
    Ok(path_entails_unchecked(q, q2).map(|map| ContainmentWitness { map }))
}

/// Decides `q ⊨ q2` for `◇`-queries in redundancy-free normal form:
/// `ρ' ⊆ ρ` and every conjunct of `q2` is entailed by `ρ` together with some
/// single conjunct of `q`.
pub fn diamond_contains(q: &DiamondQueryNF, q2: &DiamondQueryNF) -> bool {
    if !q2.rho.is_subset(&q.rho) {
        return false;
    }
    let absorbed: Vec<PathQuery> = q
        .conjuncts
        .iter()
        .map(|c| PathQuery { rho0: q.rho.clone(), steps: c.steps.clone() })
        .collect();
    q2.conjuncts.iter().all(|target| {
        absorbed
            .iter()
            .any(|c| path_entails_unchecked(c, target).is_some())
    })
}

/// Mutual containment within `class`; `qnd` is rejected since its containment
/// problem has no decision procedure here.
pub fn equivalent(q: &Query, q2: &Query, class: QueryClass) -> Result<bool> {
    match class {
        QueryClass::QNd => Err(Error::Unsupported(class, "containment is only refutable")),
        QueryClass::QD => {
            let a = normalize_diamond(q)?;
            let b = normalize_diamond(q2)?;
            Ok(diamond_contains(&a, &b) && diamond_contains(&b, &a))
        }
        QueryClass::QpNd | QueryClass::QpD | QueryClass::QIn => {
            let a = as_class_path(q, class)?;
            let b = as_class_path(q2, class)?;
            Ok(path_entails_unchecked(&a, &b).is_some()
                && path_entails_unchecked(&b, &a).is_some())
        }
    }
}

fn as_class_path(q: &Query, class: QueryClass) -> Result<PathQuery> {
    let p = q
        .as_path()
        .ok_or_else(|| Error::NotInClass(q.to_string(), class))?;
    let p = normalize_path(&p);
    let ok = match class {
        QueryClass::QpD => p.is_diamond_only(),
        QueryClass::QIn => p.is_interval(),
        _ => true,
    };
    if ok {
        Ok(p)
    } else {
        Err(Error::NotInClass(q.to_string(), class))
    }
}

/// All words `ρ0 w1 ρ1 … wn ρn` with `wi` empty for `◯`-steps and either
/// empty or `∅^pad` for `◇`-steps. Every model of a normal-form path query
/// embeds one of these, which makes them canonical counterexample candidates.
pub fn padded_models(q: &PathQuery, pad: usize) -> Vec<DataInstance> {
    let diamonds: Vec<usize> = (1..=q.tdp())
        .filter(|&i| q.op(i) == TemporalOp::Eventually)
        .collect();
    let mut out = Vec::new();
    for choice in 0u32..(1 << diamonds.len()) {
        let mut word = vec![q.rho0.clone()];
        for i in 1..=q.tdp() {
            if let Ok(k) = diamonds.binary_search(&i) {
                if choice & (1 << k) != 0 {
                    word.extend(std::iter::repeat_n(AtomSet::new(), pad));
                }
            }
            word.push(q.label(i).clone());
        }
        out.push(DataInstance::new(word).expect("nonempty word"));
    }
    out
}

const DEFAULT_REFUTE_CAP: u64 = 20_000_000;

/// Searches exhaustively for an instance over `sig` of length at most
/// `max_len` satisfying `q` but not `q2`. Sound for refutation; complete only
/// up to the bound. Words are visited shortest-first, lexicographically by
/// ascending letter bitmask.
pub fn bounded_refute(
    q: &Query,
    q2: &Query,
    sig: &Signature,
    max_len: usize,
) -> Result<Option<DataInstance>> {
    bounded_refute_with_cap(q, q2, sig, max_len, DEFAULT_REFUTE_CAP)
}

/// `bounded_refute` with an explicit enumeration budget.
pub fn bounded_refute_with_cap(
    q: &Query,
    q2: &Query,
    sig: &Signature,
    max_len: usize,
    cap: u64,
) -> Result<Option<DataInstance>> {
    if max_len == 0 {
        return Err(Error::BudgetExceeded("max_len must be at least 1".into()));
    }
    let letters: u64 = 1u64
        .checked_shl(sig.len() as u32)
        .ok_or_else(|| Error::BudgetExceeded("signature too large".into()))?;
    let mut total: u64 = 0;
    let mut pow: u64 = 1;
    for _ in 0..max_len {
        pow = pow
            .checked_mul(letters)
            .ok_or_else(|| Error::BudgetExceeded("word space overflows".into()))?;
        total = total
            .checked_add(pow)
            .ok_or_else(|| Error::BudgetExceeded("word space overflows".into()))?;
    }
    if total > cap {
        return Err(Error::BudgetExceeded(format!(
            "{total} candidate words exceed cap {cap}"
        )));
    }
    let table = AtomTable::new(sig);
    let paths = q.as_path().zip(q2.as_path());
    if let Some((pa, pb)) = paths {
        let pa = normalize_path(&pa);
        let pb = normalize_path(&pb);
        let ma = MaskedPath::compile(&pa, &table);
        let mb = MaskedPath::compile(&pb, &table);
        // a query naming atoms outside sig is unsatisfiable over sig
        let Some(ma) = ma else { return Ok(None) };
        Ok(refute_paths(&ma, mb.as_ref(), &table, max_len))
    } else {
        Ok(refute_generic(q, q2, &table, max_len))
    }
}

struct Automaton {
    labels: Vec<Mask>,
    next_op: Vec<bool>,
}

#[derive(Clone, Copy, Default)]
struct AutState {
    end: u64,
    any: u64,
}

impl Automaton {
    fn new(q: &MaskedPath) -> Automaton {
        let mut labels = vec![q.rho0];
        let mut next_op = vec![false];
        for &(op, m) in &q.steps {
            labels.push(m);
            next_op.push(op == TemporalOp::Next);
        }
        Automaton { labels, next_op }
    }

    fn step(&self, st: AutState, pos: usize, letter: Mask) -> AutState {
        let mut end = 0u64;
        for (i, &label) in self.labels.iter().enumerate() {
            if label & !letter != 0 {
                continue;
            }
            let reachable = if i == 0 {
                pos == 0
            } else if self.next_op[i] {
                st.end & (1 << (i - 1)) != 0
            } else {
                st.any & (1 << (i - 1)) != 0
            };
            if reachable {
                end |= 1 << i;
            }
        }
        AutState { end, any: st.any | end }
    }

    fn done(&self, st: AutState) -> bool {
        st.any & (1 << (self.labels.len() - 1)) != 0
    }
}

fn refute_paths(
    qa: &MaskedPath,
    qb: Option<&MaskedPath>,
    table: &AtomTable,
    max_len: usize,
) -> Option<DataInstance> {
    let aut_a = Automaton::new(qa);
    let aut_b = qb.map(Automaton::new);
    let letters = table.full() + 1;
    let mut word: Vec<Mask> = Vec::new();

    fn dfs(
        aut_a: &Automaton,
        aut_b: Option<&Automaton>,
        letters: Mask,
        len: usize,
        word: &mut Vec<Mask>,
        sa: AutState,
        sb: AutState,
    ) -> bool {
        if word.len() == len {
            let a_done = aut_a.done(sa);
            let b_done = aut_b.map(|b| b.done(sb)).unwrap_or(false);
            return a_done && !b_done;
        }
        let pos = word.len();
        for letter in 0..letters {
            let na = aut_a.step(sa, pos, letter);
            let nb = aut_b.map(|b| b.step(sb, pos, letter)).unwrap_or_default();
            // once q2 holds on a prefix it holds on every extension
            if aut_b.map(|b| b.done(nb)).unwrap_or(false) {
                continue;
            }
            word.push(letter);
            if dfs(aut_a, aut_b, letters, len, word, na, nb) {
                return true;
            }
            word.pop();
        }
        false
    }

    for len in 1..=max_len {
        if dfs(&aut_a, aut_b.as_ref(), letters, len, &mut word, AutState::default(), AutState::default()) {
            let sets = word.iter().map(|&m| table.set_of(m)).collect();
            return Some(DataInstance::new(sets).expect("nonempty word"));
        }
        word.clear();
    }
    None
}

fn refute_generic(
    q: &Query,
    q2: &Query,
    table: &AtomTable,
    max_len: usize,
) -> Option<DataInstance> {
    let letters = table.full() + 1;
    let mut word: Vec<Mask> = Vec::new();

    fn dfs(
        q: &Query,
        q2: &Query,
        table: &AtomTable,
        letters: Mask,
        len: usize,
        word: &mut Vec<Mask>,
    ) -> Option<DataInstance> {
        if word.len() == len {
            let sets: Vec<AtomSet> = word.iter().map(|&m| table.set_of(m)).collect();
            let d = DataInstance::new(sets).expect("nonempty word");
            if holds_at(&d, 0, q) && !holds_at(&d, 0, q2) {
                return Some(d);
            }
            return None;
        }
        for letter in 0..letters {
            word.push(letter);
            if let Some(d) = dfs(q, q2, table, letters, len, word) {
                return Some(d);
            }
            word.pop();
        }
        None
    }

    (1..=max_len).find_map(|len| {
        word.clear();
        dfs(q, q2, table, letters, len, &mut word)
    })
}
