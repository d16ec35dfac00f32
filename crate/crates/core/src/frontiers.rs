//! Strengthening and weakening frontiers: small sets of properly
//! stronger/weaker queries forming a boundary between a query and all of its
//! strengthenings/weakenings within a class.

use crate::containment::{diamond_contains, path_entails_unchecked};
use crate::eval::{normalize_path, reduce_conjuncts};
use crate::model::{
    AnyQuery, AtomSet, DiamondQueryNF, PathQuery, QueryClass, Signature, Step, TemporalOp,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Strengthen,
    Weaken,
}

/// A frontier for `anchor` in `class`. Members are deduplicated modulo
/// equivalence (normal-form equality) and listed in the deterministic order
/// the operations generate them.
#[derive(Clone, Debug)]
pub struct Frontier {
    pub anchor: AnyQuery,
    pub class: QueryClass,
    pub direction: Direction,
    pub bound: Option<usize>,
    pub members: Vec<AnyQuery>,
}

fn any_entails(a: &AnyQuery, b: &AnyQuery) -> bool {
    match (a, b) {
        (AnyQuery::Path(p), AnyQuery::Path(q)) => path_entails_unchecked(p, q).is_some(),
        (AnyQuery::Diamond(p), AnyQuery::Diamond(q)) => diamond_contains(p, q),
        _ => false,
    }
}

impl Frontier {
    /// Drops members subsumed by another member: for weakening frontiers a
    /// member weaker than another member, for strengthening frontiers a
    /// member stronger than another member. The remaining set is still a
    /// frontier. The raw output matches the generating operations one-to-one.
    pub fn minimized(&self) -> Frontier {
        let n = self.members.len();
        let mut keep = vec![true; n];
        for i in 0..n {
            for j in 0..n {
                if i == j || !keep[j] {
                    continue;
                }
                let subsumed = match self.direction {
                    Direction::Weaken => any_entails(&self.members[j], &self.members[i]),
                    Direction::Strengthen => any_entails(&self.members[i], &self.members[j]),
                };
                if subsumed {
                    let mutual = match self.direction {
                        Direction::Weaken => any_entails(&self.members[i], &self.members[j]),
                        Direction::Strengthen => any_entails(&self.members[j], &self.members[i]),
                    };
                    if !mutual || j < i {
                        keep[i] = false;
                        break;
                    }
                }
            }
        }
        Frontier {
            anchor: self.anchor.clone(),
            class: self.class,
            direction: self.direction,
            bound: self.bound,
            members: self
                .members
                .iter()
                .zip(&keep)
                .filter_map(|(m, &k)| k.then(|| m.clone()))
                .collect(),
        }
    }
}

struct PathMembers {
    members: Vec<AnyQuery>,
    seen: std::collections::BTreeSet<PathQuery>,
}

impl PathMembers {
    fn new() -> PathMembers {
        PathMembers { members: Vec::new(), seen: Default::default() }
    }

    fn push(&mut self, q: PathQuery) {
        let q = normalize_path(&q);
        if self.seen.insert(q.clone()) {
            self.members.push(AnyQuery::Path(q));
        }
    }
}

fn require_over_sig(q_sig: &Signature, sig: &Signature) -> Result<()> {
    for a in q_sig.iter() {
        if !sig.contains(a) {
            return Err(Error::InvalidAtom(a.name().to_string()));
        }
    }
    Ok(())
}

/// One application of each strengthening operation at each position: atom
/// extension, `◇ → ◇(⊤ ∧ ◇·)` insertion, `◇ → ◯` replacement when the
/// result stays normal (path `◯◇`-queries only), and appending `◇A`.
pub fn strengthen_path(q: &PathQuery, sig: &Signature, allow_next: bool) -> Result<Frontier> {
    let class = if allow_next { QueryClass::QpNd } else { QueryClass::QpD };
    if !q.is_normal_form() {
        return Err(Error::NotNormalForm(q.to_string()));
    }
    if !allow_next && !q.is_diamond_only() {
        return Err(Error::NotInClass(q.to_string(), class));
    }
    require_over_sig(&q.sig(), sig)?;
    let mut out = PathMembers::new();
    let n = q.tdp();
    // extend some ρi by a fresh atom
    for i in 0..=n {
        for a in sig.iter() {
            if q.label(i).contains(a) {
                continue;
            }
            let mut m = q.clone();
            if i == 0 {
                m.rho0.insert(a.clone());
            } else {
                m.steps[i - 1].atoms.insert(a.clone());
            }
            out.push(m);
        }
    }
    // replace ◇qi by ◇(⊤ ∧ ◇qi)
    for i in 1..=n {
        if q.op(i) == TemporalOp::Eventually {
            let mut m = q.clone();
            m.steps.insert(i - 1, Step::new(TemporalOp::Eventually, AtomSet::new()));
            out.push(m);
        }
    }
    // replace ◇s by ◯s where the result stays in normal form: operators
    // linked through ⊤ positions must stay uniform, so a maximal ◇-run over
    // ⊤s swaps as a whole (a ◇ between non-⊤ positions is the base case)
    if allow_next {
        let mut i = 1;
        while i <= n {
            let mut j = i;
            while j < n && q.label(j).is_empty() {
                j += 1;
            }
            if (i..=j).all(|k| q.op(k) == TemporalOp::Eventually) {
                let mut m = q.clone();
                for k in i..=j {
                    m.steps[k - 1].op = TemporalOp::Next;
                }
                if m.is_normal_form() {
                    out.push(m);
                }
            }
            i = j + 1;
        }
    }
    // append ◇A
    for a in sig.iter() {
        let mut m = q.clone();
        m.steps.push(Step::new(TemporalOp::Eventually, [a.clone()].into_iter().collect()));
        out.push(m);
    }
    Ok(Frontier {
        anchor: AnyQuery::Path(q.clone()),
        class,
        direction: Direction::Strengthen,
        bound: None,
        members: out.members,
    })
}

/// One application of each weakening operation: atom drop,
/// `◇(⊤ ∧ ◇·) → ◇·` contraction, and `◯ → ◇` replacement (path
/// `◯◇`-queries only).
pub fn weaken_path(q: &PathQuery, allow_next: bool) -> Result<Frontier> {
    let class = if allow_next { QueryClass::QpNd } else { QueryClass::QpD };
    if !q.is_normal_form() {
        return Err(Error::NotNormalForm(q.to_string()));
    }
    if !allow_next && !q.is_diamond_only() {
        return Err(Error::NotInClass(q.to_string(), class));
    }
    let mut out = PathMembers::new();
    let n = q.tdp();
    // drop some atom
    for i in 0..=n {
        for a in q.label(i).clone() {
            let mut m = q.clone();
            if i == 0 {
                m.rho0.remove(&a);
            } else {
                m.steps[i - 1].atoms.remove(&a);
            }
            out.push(m);
        }
    }
    // contract ◇(⊤ ∧ ◇qi) to ◇qi
    for i in 1..n {
        if q.label(i).is_empty()
            && q.op(i) == TemporalOp::Eventually
            && q.op(i + 1) == TemporalOp::Eventually
        {
            let mut m = q.clone();
            m.steps.remove(i - 1);
            out.push(m);
        }
    }
    // replace some ◯ by ◇
    if allow_next {
        for i in 1..=n {
            if q.op(i) == TemporalOp::Next {
                let mut m = q.clone();
                m.steps[i - 1].op = TemporalOp::Eventually;
                out.push(m);
            }
        }
    }
    Ok(Frontier {
        anchor: AnyQuery::Path(q.clone()),
        class,
        direction: Direction::Weaken,
        bound: None,
        members: out.members,
    })
}

/// Weakening frontier in `Q[◇]`: drop an atom of `ρ`, or replace one
/// conjunct by the conjunction of its path weakening frontier.
pub fn weaken_diamond(q: &DiamondQueryNF, sig: &Signature) -> Result<Frontier> {
    require_over_sig(&q.sig(), sig)?;
    for (i, ci) in q.conjuncts.iter().enumerate() {
        for (j, cj) in q.conjuncts.iter().enumerate() {
            if i != j && path_entails_unchecked(cj, ci).is_some() {
                return Err(Error::NotNormalForm(format!("{q} is not redundancy-free")));
            }
        }
    }
    let mut members = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut push = |m: DiamondQueryNF, members: &mut Vec<AnyQuery>| {
        if seen.insert(m.clone()) {
            members.push(AnyQuery::Diamond(m));
        }
    };
    for a in q.rho.clone() {
        let mut rho = q.rho.clone();
        rho.remove(&a);
        push(reduce_conjuncts(rho, q.conjuncts.clone()), &mut members);
    }
    for i in 0..q.conjuncts.len() {
        let frontier = weaken_path(&q.conjuncts[i], false)?;
        let mut conjuncts: Vec<PathQuery> = q
            .conjuncts
            .iter()
            .enumerate()
            .filter_map(|(j, c)| (j != i).then(|| c.clone()))
            .collect();
        for m in frontier.members {
            if let AnyQuery::Path(p) = m {
                if !p.steps.is_empty() {
                    conjuncts.push(p);
                }
            }
        }
        push(reduce_conjuncts(q.rho.clone(), conjuncts), &mut members);
    }
    Ok(Frontier {
        anchor: AnyQuery::Diamond(q.clone()),
        class: QueryClass::QD,
        direction: Direction::Weaken,
        bound: None,
        members,
    })
}

/// Frontiers for interval queries: weakening by atom drops (with the leading
/// singleton collapsing the initial `◇`-block), and `n`-bounded strengthening
/// by atom extension, prefix insertion `◇(A ∧ ◯^k ·)`, and suffix appends
/// `◯^k A`.
pub fn interval_frontier(
    q: &PathQuery,
    sig: &Signature,
    direction: Direction,
    bound: Option<usize>,
) -> Result<Frontier> {
    if !q.is_interval() {
        return Err(Error::NotInClass(q.to_string(), QueryClass::QIn));
    }
    require_over_sig(&q.sig(), sig)?;
    let n = q.tdp();
    let mut out = PathMembers::new();
    match direction {
        Direction::Weaken => {
            for i in 1..=n {
                if i == 1 && q.label(1).len() == 1 {
                    // dropping the only atom of ρ1 collapses the leading
                    // ◇-block onto the next non-⊤ position, if any
                    if let Some(k) = (2..=n).find(|&k| !q.label(k).is_empty()) {
                        let mut steps =
                            vec![Step::new(TemporalOp::Eventually, q.label(k).clone())];
                        steps.extend(q.steps[k..].iter().cloned());
                        out.push(PathQuery { rho0: AtomSet::new(), steps });
                    }
                    continue;
                }
                for a in q.label(i).clone() {
                    let mut m = q.clone();
                    m.steps[i - 1].atoms.remove(&a);
                    out.push(m);
                }
            }
        }
        Direction::Strengthen => {
            let bound = bound.ok_or(Error::Unsupported(
                QueryClass::QIn,
                "strengthening frontiers require a depth bound",
            ))?;
            if bound < n {
                return Err(Error::Unsupported(
                    QueryClass::QIn,
                    "depth bound below the query's temporal depth",
                ));
            }
            for i in 1..=n {
                for a in sig.iter() {
                    if q.label(i).contains(a) {
                        continue;
                    }
                    let mut m = q.clone();
                    m.steps[i - 1].atoms.insert(a.clone());
                    out.push(m);
                }
            }
            for k in 1..=bound - n {
                for a in sig.iter() {
                    // prefix ◇(A ∧ ◯^k (ρ1 ∧ …))
                    let mut steps = vec![Step::new(
                        TemporalOp::Eventually,
                        [a.clone()].into_iter().collect::<AtomSet>(),
                    )];
                    for j in 0..k {
                        let atoms = if j + 1 == k { q.label(1).clone() } else { AtomSet::new() };
                        steps.push(Step::new(TemporalOp::Next, atoms));
                    }
                    steps.extend(q.steps[1..].iter().cloned());
                    out.push(PathQuery { rho0: AtomSet::new(), steps });
                    // suffix ◯^k A
                    let mut m = q.clone();
                    for j in 0..k {
                        let atoms = if j + 1 == k {
                            [a.clone()].into_iter().collect::<AtomSet>()
                        } else {
                            AtomSet::new()
                        };
                        m.steps.push(Step::new(TemporalOp::Next, atoms));
                    }
                    out.push(m);
                }
            }
        }
    }
    debug_assert!(out.members.iter().all(|m| match m {
        AnyQuery::Path(p) => p.is_interval(),
        _ => false,
    }));
    Ok(Frontier {
        anchor: AnyQuery::Path(q.clone()),
        class: QueryClass::QIn,
        direction,
        bound,
        members: out.members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Atom;
    use crate::parse::parse_query;
    use std::collections::BTreeSet;

    fn path(s: &str) -> PathQuery {
        normalize_path(&parse_query(s).unwrap().as_path().unwrap())
    }

    fn sig(names: &[&str]) -> Signature {
        names.iter().map(|n| Atom::new(n).unwrap()).collect()
    }

    fn texts(f: &Frontier) -> Vec<String> {
        f.members.iter().map(|m| m.to_string()).collect()
    }

    fn text_set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn strengthen_next_diamond_example() {
        let f = strengthen_path(&path("F(A & X B)"), &sig(&["A", "B"]), true).unwrap();
        let got: BTreeSet<String> = texts(&f).into_iter().collect();
        let want = text_set(&[
            "A & F(A & X B)",
            "B & F(A & X B)",
            "F(A & B & X B)",
            "F(A & X(A & B))",
            "F F(A & X B)",
            "X(A & X B)",
            "F(A & X(B & F A))",
            "F(A & X(B & F B))",
        ]);
        assert_eq!(got, want);
    }

    #[test]
    fn strengthen_top_without_next() {
        let f = strengthen_path(&PathQuery::top(), &sig(&["A"]), false).unwrap();
        assert_eq!(texts(&f), vec!["A", "F A"]);
    }

    #[test]
    fn strengthen_single_diamond() {
        let f = strengthen_path(&path("F A"), &sig(&["A"]), true).unwrap();
        let t = texts(&f);
        assert!(t.contains(&"F(A & F A)".to_string()));
        assert!(t.contains(&"F F A".to_string()));
        assert!(t.contains(&"X A".to_string()));
    }

    #[test]
    fn weaken_next_diamond_example() {
        let f = weaken_path(&path("F(A & X B)"), true).unwrap();
        let got: BTreeSet<String> = texts(&f).into_iter().collect();
        assert_eq!(got, text_set(&["F F B", "F A", "F(A & F B)"]));
    }

    #[test]
    fn weaken_atom_and_next() {
        assert_eq!(texts(&weaken_path(&path("A"), true).unwrap()), vec!["T"]);
        // atom drop yields ⊤, the ◯→◇ replacement yields ◇A
        assert_eq!(texts(&weaken_path(&path("X A"), true).unwrap()), vec!["T", "F A"]);
    }

    #[test]
    fn weaken_frontier_minimized_drops_subsumed() {
        let f = weaken_path(&path("F(A & X B)"), true).unwrap();
        // ◇(A ∧ ◇B) entails both ◇◇B and ◇A, so it alone remains
        assert_eq!(texts(&f.minimized()), vec!["F(A & F B)"]);
    }

    #[test]
    fn weaken_diamond_two_conjuncts() {
        let q = crate::eval::normalize_diamond(&parse_query("F A & F B").unwrap()).unwrap();
        let f = weaken_diamond(&q, &sig(&["A", "B"])).unwrap();
        let got: BTreeSet<String> = texts(&f).into_iter().collect();
        assert_eq!(got, text_set(&["F B", "F A"]));
    }

    #[test]
    fn weaken_diamond_propositional() {
        let q = crate::eval::normalize_diamond(&parse_query("A").unwrap()).unwrap();
        let f = weaken_diamond(&q, &sig(&["A"])).unwrap();
        assert_eq!(texts(&f), vec!["T"]);
    }

    #[test]
    fn weaken_diamond_single_nested_conjunct() {
        let q = crate::eval::normalize_diamond(&parse_query("F(A & F B)").unwrap()).unwrap();
        let f = weaken_diamond(&q, &sig(&["A", "B"])).unwrap();
        // the single member conjoins the conjunct's path weakening frontier
        assert_eq!(texts(&f), vec!["F F B & F A"]);
    }

    #[test]
    fn weaken_diamond_rejects_redundant_input() {
        let q = DiamondQueryNF { rho: AtomSet::new(), conjuncts: vec![path("F A"), path("F(A & F B)")] };
        assert!(weaken_diamond(&q, &sig(&["A", "B"])).is_err());
    }

    #[test]
    fn interval_weaken_examples() {
        let f = interval_frontier(&path("F(A & X B)"), &sig(&["A", "B"]), Direction::Weaken, None)
            .unwrap();
        let got: BTreeSet<String> = texts(&f).into_iter().collect();
        assert_eq!(got, text_set(&["F B", "F A"]));

        let f = interval_frontier(&path("F A"), &sig(&["A"]), Direction::Weaken, None).unwrap();
        assert!(f.members.is_empty());
    }

    #[test]
    fn interval_strengthen_bounded() {
        let f = interval_frontier(&path("F A"), &sig(&["A"]), Direction::Strengthen, Some(2))
            .unwrap();
        assert_eq!(texts(&f), vec!["F(A & X A)"]);
        assert!(
            interval_frontier(&path("F A"), &sig(&["A"]), Direction::Strengthen, Some(0)).is_err()
        );
    }

    #[test]
    fn interval_rejects_non_interval() {
        let e = interval_frontier(&path("A & F B"), &sig(&["A", "B"]), Direction::Weaken, None);
        assert!(matches!(e, Err(Error::NotInClass(_, QueryClass::QIn))));
    }
}
