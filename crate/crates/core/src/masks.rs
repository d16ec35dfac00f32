//! Bitmask compilation of atom sets, instances, and path queries. Used by the
//! enumeration oracle, bounded refutation, and the separation graphs, where
//! set operations dominate the running time.

use crate::model::{Atom, AtomSet, DataInstance, PathQuery, Signature, Step, TemporalOp};

pub(crate) type Mask = u64;

/// Maps at most 64 atoms to bit positions, in lexicographic order.
#[derive(Clone, Debug)]
pub(crate) struct AtomTable {
    atoms: Vec<Atom>,
}

impl AtomTable {
    pub(crate) fn new(sig: &Signature) -> AtomTable {
        let atoms: Vec<Atom> = sig.iter().cloned().collect();
        assert!(atoms.len() <= 64, "mask tables support at most 64 atoms");
        AtomTable { atoms }
    }

    pub(crate) fn len(&self) -> usize {
        self.atoms.len()
    }

    pub(crate) fn full(&self) -> Mask {
        if self.atoms.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.atoms.len()) - 1
        }
    }

    /// The mask of a set, or `None` if it mentions an atom outside the table.
    pub(crate) fn mask_of(&self, set: &AtomSet) -> Option<Mask> {
        let mut m = 0;
        for a in set {
            let i = self.atoms.binary_search(a).ok()?;
            m |= 1 << i;
        }
        Some(m)
    }

    pub(crate) fn set_of(&self, mask: Mask) -> AtomSet {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| a.clone())
            .collect()
    }

    /// Compiles an instance, dropping atoms outside the table (they cannot
    /// occur in queries over it).
    pub(crate) fn instance(&self, d: &DataInstance) -> Vec<Mask> {
        d.word()
            .iter()
            .map(|letter| {
                let mut m = 0;
                for a in letter {
                    if let Ok(i) = self.atoms.binary_search(a) {
                        m |= 1 << i;
                    }
                }
                m
            })
            .collect()
    }
}

/// A path query over an atom table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct MaskedPath {
    pub rho0: Mask,
    pub steps: Vec<(TemporalOp, Mask)>,
}

impl MaskedPath {
    /// `None` when the query mentions an atom outside the table; such a query
    /// is false in every instance compiled against it.
    pub(crate) fn compile(q: &PathQuery, table: &AtomTable) -> Option<MaskedPath> {
        let rho0 = table.mask_of(&q.rho0)?;
        let steps = q
            .steps
            .iter()
            .map(|s| table.mask_of(&s.atoms).map(|m| (s.op, m)))
            .collect::<Option<Vec<_>>>()?;
        Some(MaskedPath { rho0, steps })
    }

    pub(crate) fn decompile(&self, table: &AtomTable) -> PathQuery {
        PathQuery {
            rho0: table.set_of(self.rho0),
            steps: self
                .steps
                .iter()
                .map(|&(op, m)| Step::new(op, table.set_of(m)))
                .collect(),
        }
    }
}

/// Mask-level mirror of path normalization: drop trailing `⊤` steps and
/// rewrite every mixed-operator run of `⊤` positions to `◇`s.
pub(crate) fn normalize_masked(q: &MaskedPath) -> MaskedPath {
    let mut steps = q.steps.clone();
    while steps.last().is_some_and(|&(_, m)| m == 0) {
        steps.pop();
    }
    let mut i = 0;
    while i < steps.len() {
        if steps[i].1 == 0 {
            let mut j = i;
            while steps[j].1 == 0 {
                j += 1;
            }
            if steps[i..=j].iter().any(|&(op, _)| op == TemporalOp::Eventually) {
                for s in &mut steps[i..=j] {
                    s.0 = TemporalOp::Eventually;
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    MaskedPath { rho0: q.rho0, steps }
}

fn subset(a: Mask, b: Mask) -> bool {
    a & !b == 0
}

fn fits(word: &[Mask], start: usize, labels: &[Mask]) -> bool {
    labels.iter().enumerate().all(|(j, &l)| {
        let letter = word.get(start + j).copied().unwrap_or(0);
        subset(l, letter)
    })
}

/// Strict-semantics truth of a path query at timestamp 0, by greedy leftmost
/// placement of its maximal `◯`-segments.
pub(crate) fn holds_masked(word: &[Mask], q: &MaskedPath) -> bool {
    let mut segs: Vec<Vec<Mask>> = vec![vec![q.rho0]];
    for &(op, m) in &q.steps {
        match op {
            TemporalOp::Next => segs.last_mut().unwrap().push(m),
            TemporalOp::Eventually => segs.push(vec![m]),
        }
    }
    if !fits(word, 0, &segs[0]) {
        return false;
    }
    let mut end = segs[0].len() - 1;
    for seg in &segs[1..] {
        let lo = end + 1;
        if seg.iter().all(|&m| m == 0) {
            end = lo + seg.len() - 1;
            continue;
        }
        let mut placed = None;
        for s in lo..word.len() {
            if fits(word, s, seg) {
                placed = Some(s);
                break;
            }
        }
        match placed {
            Some(s) => end = s + seg.len() - 1,
            None => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::holds_at;
    use crate::model::DataInstance;
    use crate::parse::{parse_instance_line, parse_query};

    fn check_agrees(query: &str, instance: &str) {
        let q = parse_query(query).unwrap();
        let p = q.as_path().unwrap();
        let d: DataInstance = parse_instance_line(instance).unwrap();
        let sig = d.sig().union(&q.sig());
        let table = AtomTable::new(&sig);
        let word = table.instance(&d);
        let mp = MaskedPath::compile(&p, &table).unwrap();
        assert_eq!(
            holds_masked(&word, &mp),
            holds_at(&d, 0, &q),
            "mask/tree evaluators disagree on {query} in {instance}"
        );
    }

    #[test]
    fn masked_eval_agrees_with_tree_eval() {
        let queries = [
            "T",
            "A",
            "F A",
            "X A",
            "F(A & X B)",
            "F(A & X(B & X C))",
            "A & F(B & F C)",
            "F(A & F B)",
            "X X A",
            "F F A",
        ];
        let instances = ["{}", "{A}", "{} {A}", "{A} {B} {C}", "{} {A} {B} {C}", "{A,B} {A,B}", "{} {A} {} {B}"];
        for q in queries {
            for d in instances {
                check_agrees(q, d);
            }
        }
    }
}
