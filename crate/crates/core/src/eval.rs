//! The truth relation under strict semantics, satisfying-function witnesses,
//! and normal-form conversions.
//!
//! `◇` is strict: `D, n ⊨ ◇q` needs a witness at some `m > n`. Timestamps
//! beyond the end of an instance carry no atoms, so only queries without
//! atoms hold there.

use crate::containment::path_entails_unchecked;
use crate::model::{
    AtomSet, DataInstance, DiamondQueryNF, PathQuery, Query, QueryClass, Step, TemporalOp,
};
use crate::{Error, Result};

/// Truth of `q` in `D` at timestamp `n`.
pub fn holds_at(d: &DataInstance, n: usize, q: &Query) -> bool {
    if n > d.max_timestamp() {
        return q.is_vacuous();
    }
    let letter = d.letter(n);
    if !q.atoms.iter().all(|a| letter.contains(a)) {
        return false;
    }
    q.temps.iter().all(|(op, sub)| match op {
        TemporalOp::Next => holds_at(d, n + 1, sub),
        TemporalOp::Eventually => {
            sub.is_vacuous() || (n + 1..=d.max_timestamp()).any(|m| holds_at(d, m, sub))
        }
    })
}

/// A monotone assignment of query positions to timestamps witnessing
/// `D, 0 ⊨ q` for a path query in normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatisfyingFunction {
    /// `assignment[i]` is the timestamp of position `i`; `assignment[0] = 0`.
    pub assignment: Vec<usize>,
}

impl SatisfyingFunction {
    /// Checks the defining conditions against `q` (taken in normal form).
    pub fn validate(&self, d: &DataInstance, q: &PathQuery) -> bool {
        let q = normalize_path(q);
        let f = &self.assignment;
        if f.len() != q.tdp() + 1 || f[0] != 0 {
            return false;
        }
        for i in 0..f.len() {
            if f[i] > d.max_timestamp() || !q.label(i).iter().all(|a| d.letter(f[i]).contains(a)) {
                return false;
            }
            if i > 0 {
                if f[i] <= f[i - 1] {
                    return false;
                }
                if q.op(i) == TemporalOp::Next && f[i] != f[i - 1] + 1 {
                    return false;
                }
            }
        }
        true
    }
}

/// The lexicographically least satisfying function for `q` into `D`, if any.
/// The input is normalized first; the witness refers to the normalized
/// positions.
pub fn satisfying_function(d: &DataInstance, q: &PathQuery) -> Option<SatisfyingFunction> {
    let q = normalize_path(q);
    // Maximal ◯-segments of consecutive positions; greedy leftmost placement
    // of each segment is complete and yields the least witness.
    let mut segs: Vec<Vec<&AtomSet>> = vec![vec![&q.rho0]];
    for step in &q.steps {
        match step.op {
            TemporalOp::Next => segs.last_mut().unwrap().push(&step.atoms),
            TemporalOp::Eventually => segs.push(vec![&step.atoms]),
        }
    }
    let fits = |start: usize, seg: &[&AtomSet]| -> bool {
        seg.iter().enumerate().all(|(j, atoms)| {
            start + j <= d.max_timestamp() && atoms.iter().all(|a| d.letter(start + j).contains(a))
        })
    };
    let mut assignment = Vec::with_capacity(q.tdp() + 1);
    if !fits(0, &segs[0]) {
        return None;
    }
    assignment.extend(0..segs[0].len());
    for seg in &segs[1..] {
        let lo = assignment.last().unwrap() + 1;
        let start = (lo..=d.max_timestamp().saturating_sub(seg.len() - 1))
            .find(|&s| fits(s, seg))?;
        assignment.extend(start..start + seg.len());
    }
    Some(SatisfyingFunction { assignment })
}

/// Rewrites a path query into normal form: trailing `⊤` positions are
/// dropped, and every maximal run of interior `⊤` positions ends up entered
/// and left by one operator (`◇` wins over a mixed run).
pub fn normalize_path(q: &PathQuery) -> PathQuery {
    let mut steps = q.steps.clone();
    while steps.last().is_some_and(|s| s.atoms.is_empty()) {
        steps.pop();
    }
    let mut i = 0;
    while i < steps.len() {
        if steps[i].atoms.is_empty() {
            // run of ⊤ positions: steps i..j all empty, step j non-empty
            let mut j = i;
            while steps[j].atoms.is_empty() {
                j += 1;
            }
            if steps[i..=j].iter().any(|s| s.op == TemporalOp::Eventually) {
                for s in &mut steps[i..=j] {
                    s.op = TemporalOp::Eventually;
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    PathQuery { rho0: q.rho0.clone(), steps }
}

/// Flattens a `◇`-query into `ρ ∧ q1 ∧ … ∧ qn` with redundancy-free path
/// conjuncts. Fails on queries containing `◯`.
pub fn normalize_diamond(q: &Query) -> Result<DiamondQueryNF> {
    if q.contains_next() {
        return Err(Error::NotInClass(q.to_string(), QueryClass::QD));
    }
    let (rho, conjuncts) = flatten_diamond(q);
    Ok(reduce_conjuncts(rho, conjuncts))
}

/// `◇(ρ ∧ q1 ∧ … ∧ qk) ≡ ◇(ρ ∧ q1) ∧ … ∧ ◇(ρ ∧ qk)`, applied bottom-up.
fn flatten_diamond(q: &Query) -> (AtomSet, Vec<PathQuery>) {
    let rho = q.atoms.clone();
    let mut conjuncts = Vec::new();
    for (_, sub) in &q.temps {
        let (r2, cs2) = flatten_diamond(sub);
        if cs2.is_empty() {
            if !r2.is_empty() {
                conjuncts.push(PathQuery {
                    rho0: AtomSet::new(),
                    steps: vec![Step::new(TemporalOp::Eventually, r2)],
                });
            }
        } else {
            for c in cs2 {
                let mut steps = vec![Step::new(TemporalOp::Eventually, r2.clone())];
                steps.extend(c.steps);
                conjuncts.push(PathQuery { rho0: AtomSet::new(), steps });
            }
        }
    }
    (rho, conjuncts)
}

/// Sorts, deduplicates, and drops conjuncts entailed by another conjunct.
pub(crate) fn reduce_conjuncts(rho: AtomSet, mut conjuncts: Vec<PathQuery>) -> DiamondQueryNF {
    conjuncts.sort();
    conjuncts.dedup();
    let n = conjuncts.len();
    let mut keep = vec![true; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || !keep[j] {
                continue;
            }
            if path_entails_unchecked(&conjuncts[j], &conjuncts[i]).is_some() {
                let mutual = path_entails_unchecked(&conjuncts[i], &conjuncts[j]).is_some();
                if !mutual || j < i {
                    keep[i] = false;
                    break;
                }
            }
        }
    }
    let conjuncts = conjuncts
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect();
    DiamondQueryNF { rho, conjuncts }
}

/// Normalizes any parsed query within its own class: path queries through
/// `◇◯q ≡ ◯◇q ≡ ◇◇q` rewriting, `◇`-queries to the redundancy-free
/// conjunction form, and other `◯◇`-queries by recursive cleanup.
pub fn normalize_query(q: &Query) -> Query {
    if let Some(p) = q.as_path() {
        return normalize_path(&p).to_query();
    }
    if !q.contains_next() {
        return normalize_diamond(q).expect("diamond-only query").to_query();
    }
    let mut temps: Vec<(TemporalOp, Query)> = q
        .temps
        .iter()
        .filter(|(_, sub)| !sub.is_vacuous())
        .map(|(op, sub)| (*op, normalize_query(sub)))
        .collect();
    temps.sort();
    temps.dedup();
    Query { atoms: q.atoms.clone(), temps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Atom;
    use crate::parse::{parse_example_set, parse_instance_line, parse_query};
    use proptest::prelude::*;

    fn instance(s: &str) -> DataInstance {
        parse_instance_line(s).unwrap()
    }

    fn path(s: &str) -> PathQuery {
        parse_query(s).unwrap().as_path().unwrap()
    }

    const EXAMPLE_1: &str = "positive:\n{} {A} {B} {C}\n{} {} {A} {B} {C}\nnegative:\n{} {A} {B} {} {C}\n";

    #[test]
    fn example_trace_truths() {
        let e = parse_example_set(EXAMPLE_1).unwrap();
        let q1 = parse_query("F(A & X(B & X C))").unwrap();
        let q3 = parse_query("F(B & X C)").unwrap();
        assert!(holds_at(&e.positives()[0], 0, &q1));
        assert!(holds_at(&e.positives()[1], 0, &q1));
        assert!(!holds_at(&e.negatives()[0], 0, &q3));
    }

    #[test]
    fn top_holds_everywhere() {
        let d = instance("{A}");
        for n in 0..4 {
            assert!(holds_at(&d, n, &Query::top()));
        }
    }

    #[test]
    fn strict_diamond_excludes_now() {
        let d = instance("{A}");
        assert!(!holds_at(&d, 0, &parse_query("F A").unwrap()));
        assert_eq!(satisfying_function(&d, &path("F A")), None);
    }

    #[test]
    fn next_at_last_timestamp() {
        let d = instance("{A}");
        assert!(!holds_at(&d, 0, &parse_query("X A").unwrap()));
        // a vacuous continuation still holds beyond the end
        assert!(holds_at(&d, 0, &parse_query("X T").unwrap()));
        assert!(holds_at(&d, 0, &parse_query("F T").unwrap()));
    }

    #[test]
    fn leftmost_witness_example_1() {
        let e = parse_example_set(EXAMPLE_1).unwrap();
        let f = satisfying_function(&e.positives()[0], &path("F(A & X(B & X C))")).unwrap();
        assert_eq!(f.assignment, vec![0, 1, 2, 3]);
        assert!(f.validate(&e.positives()[0], &path("F(A & X(B & X C))")));
        let f = satisfying_function(&e.positives()[1], &path("F(A & X X C)")).unwrap();
        assert_eq!(f.assignment, vec![0, 2, 3, 4]);
    }

    #[test]
    fn normalize_collapses_mixed_top_runs() {
        assert_eq!(normalize_path(&path("F X A")).to_query().to_string(), "F F A");
        assert_eq!(normalize_path(&path("X F A")).to_query().to_string(), "F F A");
        assert_eq!(normalize_path(&path("X X A")).to_query().to_string(), "X X A");
        assert_eq!(normalize_path(&path("F(A & X T)")).to_query().to_string(), "F A");
        assert_eq!(
            normalize_path(&path("F(A & X(B & X C))")).to_query().to_string(),
            "F(A & X(B & X C))"
        );
    }

    #[test]
    fn normalize_diamond_drops_redundant_conjuncts() {
        let q = parse_query("F A & F(A & F B)").unwrap();
        let nf = normalize_diamond(&q).unwrap();
        assert_eq!(nf.to_query().to_string(), "F(A & F B)");
    }

    #[test]
    fn normalize_diamond_distributes_nested_conjunctions() {
        let q = parse_query("F(A & F B & F C)").unwrap();
        let nf = normalize_diamond(&q).unwrap();
        assert_eq!(nf.conjuncts.len(), 2);
        let texts: Vec<String> = nf.conjuncts.iter().map(|c| c.to_string()).collect();
        assert!(texts.contains(&"F(A & F B)".to_string()));
        assert!(texts.contains(&"F(A & F C)".to_string()));
    }

    /// Independent string matchers for the sequence correspondence checks.
    fn is_subsequence(pattern: &[char], word: &[char]) -> bool {
        let mut it = word.iter();
        pattern.iter().all(|p| it.any(|w| w == p))
    }

    fn is_subword(pattern: &[char], word: &[char]) -> bool {
        if pattern.is_empty() {
            return true;
        }
        word.windows(pattern.len()).any(|w| w == pattern)
    }

    fn sequence_instance(word: &[char]) -> DataInstance {
        let mut letters = vec![AtomSet::new()];
        for c in word {
            letters.push([Atom::new(&c.to_string()).unwrap()].into_iter().collect());
        }
        DataInstance::new(letters).unwrap()
    }

    fn sequence_query(pattern: &[char], interval: bool) -> PathQuery {
        let steps = pattern
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let op = if i == 0 || !interval { TemporalOp::Eventually } else { TemporalOp::Next };
                Step::new(op, [Atom::new(&c.to_string()).unwrap()].into_iter().collect())
            })
            .collect();
        PathQuery { rho0: AtomSet::new(), steps }
    }

    proptest! {
        #[test]
        fn sequence_correspondence(
            word in prop::collection::vec(prop::sample::select(vec!['A', 'B', 'C']), 1..8),
            pattern in prop::collection::vec(prop::sample::select(vec!['A', 'B', 'C']), 1..5),
        ) {
            let d = sequence_instance(&word);
            let subseq_q = sequence_query(&pattern, false);
            let subword_q = sequence_query(&pattern, true);
            prop_assert_eq!(holds_at(&d, 0, &subseq_q.to_query()), is_subsequence(&pattern, &word));
            prop_assert_eq!(holds_at(&d, 0, &subword_q.to_query()), is_subword(&pattern, &word));
        }
    }

    fn arb_path(max_tdp: usize) -> impl Strategy<Value = PathQuery> {
        let atom_set = prop::collection::btree_set(prop::sample::select(vec!["A", "B"]), 0..3)
            .prop_map(|s| s.into_iter().map(|n| Atom::new(n).unwrap()).collect::<AtomSet>());
        let op = prop_oneof![Just(TemporalOp::Next), Just(TemporalOp::Eventually)];
        let step = (op, atom_set.clone()).prop_map(|(op, atoms)| Step::new(op, atoms));
        (atom_set, prop::collection::vec(step, 0..=max_tdp))
            .prop_map(|(rho0, steps)| PathQuery { rho0, steps })
    }

    fn arb_instance() -> impl Strategy<Value = DataInstance> {
        let letter = prop::collection::btree_set(prop::sample::select(vec!["A", "B"]), 0..3)
            .prop_map(|s| s.into_iter().map(|n| Atom::new(n).unwrap()).collect::<AtomSet>());
        prop::collection::vec(letter, 1..6).prop_map(|w| DataInstance::new(w).unwrap())
    }

    proptest! {
        #[test]
        fn normalization_preserves_truth(q in arb_path(4), d in arb_instance(), n in 0usize..6) {
            let nq = normalize_path(&q);
            prop_assert!(nq.is_normal_form());
            prop_assert_eq!(holds_at(&d, n, &q.to_query()), holds_at(&d, n, &nq.to_query()));
        }

        #[test]
        fn witness_presence_matches_truth(q in arb_path(3), d in arb_instance()) {
            let truth = holds_at(&d, 0, &q.to_query());
            match satisfying_function(&d, &q) {
                Some(f) => {
                    prop_assert!(truth);
                    prop_assert!(f.validate(&d, &q));
                }
                None => prop_assert!(!truth),
            }
        }
    }
}
