//! Domain types: atoms, data instances, queries and their classes, example
//! sets, and the canonical text rendering.

use crate::{Error, Result};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Names that the query grammar reserves and that can never be atoms.
pub const RESERVED: [&str; 3] = ["T", "X", "F"];

/// A propositional atom. Atoms are compared and ordered by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    /// Creates an atom, rejecting malformed names and the reserved tokens
    /// `T`, `X`, `F`.
    pub fn new(name: &str) -> Result<Atom> {
        let mut chars = name.chars();
        let head_ok = chars
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
        if !head_ok || !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::InvalidAtom(name.to_string()));
        }
        if RESERVED.contains(&name) {
            return Err(Error::InvalidAtom(name.to_string()));
        }
        Ok(Atom(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A conjunction of atoms; the empty set stands for truth.
pub type AtomSet = BTreeSet<Atom>;

/// A finite, duplicate-free set of atoms in lexicographic order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature(BTreeSet<Atom>);

impl Signature {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Signature {
        Signature(atoms.into_iter().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter()
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.0.contains(a)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &Signature) -> Signature {
        Signature(self.0.union(&other.0).cloned().collect())
    }
}

impl FromIterator<Atom> for Signature {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Signature {
        Signature(iter.into_iter().collect())
    }
}

/// One of the two temporal operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TemporalOp {
    /// `X`, the next-time operator.
    Next,
    /// `F`, the strict eventually operator.
    Eventually,
}

impl TemporalOp {
    pub fn letter(self) -> char {
        match self {
            TemporalOp::Next => 'X',
            TemporalOp::Eventually => 'F',
        }
    }
}

/// A finite word of atom sets; index `i` is the set of atoms true at
/// timestamp `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DataInstance {
    word: Vec<AtomSet>,
}

impl DataInstance {
    /// Builds an instance from its word form. The word must be nonempty.
    pub fn new(word: Vec<AtomSet>) -> Result<DataInstance> {
        if word.is_empty() {
            return Err(Error::InvalidClause("data instance must be nonempty".into()));
        }
        Ok(DataInstance { word })
    }

    /// The largest timestamp, i.e. word length minus one.
    pub fn max_timestamp(&self) -> usize {
        self.word.len() - 1
    }

    /// The atoms true at timestamp `n`; empty beyond the end of the word.
    pub fn letter(&self, n: usize) -> &AtomSet {
        static EMPTY: AtomSet = BTreeSet::new();
        self.word.get(n).unwrap_or(&EMPTY)
    }

    pub fn word(&self) -> &[AtomSet] {
        &self.word
    }

    pub fn sig(&self) -> Signature {
        self.word.iter().flatten().cloned().collect()
    }
}

impl fmt::Display for DataInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for letter in &self.word {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{}", FmtAtoms(letter))?;
        }
        Ok(())
    }
}

struct FmtAtoms<'a>(&'a AtomSet);

impl fmt::Display for FmtAtoms<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

/// A parsed query: a conjunction of atoms and temporal subqueries. `⊤` is the
/// empty conjunction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Query {
    pub atoms: AtomSet,
    pub temps: Vec<(TemporalOp, Query)>,
}

impl Query {
    pub fn top() -> Query {
        Query::default()
    }

    pub fn is_top(&self) -> bool {
        self.atoms.is_empty() && self.temps.is_empty()
    }

    /// True when the query contains no atoms at all; such queries are
    /// equivalent to `⊤` at every timestamp.
    pub fn is_vacuous(&self) -> bool {
        self.atoms.is_empty() && self.temps.iter().all(|(_, q)| q.is_vacuous())
    }

    pub fn contains_next(&self) -> bool {
        self.temps
            .iter()
            .any(|(op, q)| *op == TemporalOp::Next || q.contains_next())
    }

    pub fn sig(&self) -> Signature {
        let mut out = BTreeSet::new();
        self.collect_sig(&mut out);
        Signature(out)
    }

    fn collect_sig(&self, out: &mut BTreeSet<Atom>) {
        out.extend(self.atoms.iter().cloned());
        for (_, q) in &self.temps {
            q.collect_sig(out);
        }
    }

    /// Maximum nesting depth of temporal operators.
    pub fn tdp(&self) -> usize {
        self.temps.iter().map(|(_, q)| 1 + q.tdp()).max().unwrap_or(0)
    }

    /// Reads the query as a path query if every conjunction level has at most
    /// one temporal conjunct.
    pub fn as_path(&self) -> Option<PathQuery> {
        let mut steps = Vec::new();
        let mut cur = self;
        let rho0 = cur.atoms.clone();
        loop {
            match cur.temps.len() {
                0 => return Some(PathQuery { rho0, steps }),
                1 => {
                    let (op, sub) = &cur.temps[0];
                    steps.push(Step { op: *op, atoms: sub.atoms.clone() });
                    cur = sub;
                }
                _ => return None,
            }
        }
    }
}

/// One temporal step of a path query: the operator leading to a position and
/// the atoms required there.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub op: TemporalOp,
    pub atoms: AtomSet,
}

impl Step {
    pub fn new(op: TemporalOp, atoms: AtomSet) -> Step {
        Step { op, atoms }
    }
}

/// A path query `ρ0 ∧ o1(ρ1 ∧ … ∧ on ρn)`. The empty atom set denotes `⊤`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PathQuery {
    pub rho0: AtomSet,
    pub steps: Vec<Step>,
}

impl PathQuery {
    pub fn top() -> PathQuery {
        PathQuery::default()
    }

    /// Temporal depth: the number of steps.
    pub fn tdp(&self) -> usize {
        self.steps.len()
    }

    pub fn sig(&self) -> Signature {
        self.rho0
            .iter()
            .chain(self.steps.iter().flat_map(|s| s.atoms.iter()))
            .cloned()
            .collect()
    }

    /// The atoms at position `i`, with position 0 being `rho0`.
    pub fn label(&self, i: usize) -> &AtomSet {
        if i == 0 {
            &self.rho0
        } else {
            &self.steps[i - 1].atoms
        }
    }

    /// The operator leading into position `i ≥ 1`.
    pub fn op(&self, i: usize) -> TemporalOp {
        self.steps[i - 1].op
    }

    /// Normal form: the last step is not `⊤`, and an interior `⊤` position is
    /// entered and left by the same operator.
    pub fn is_normal_form(&self) -> bool {
        if let Some(last) = self.steps.last() {
            if last.atoms.is_empty() {
                return false;
            }
        }
        for i in 1..self.steps.len() {
            if self.steps[i - 1].atoms.is_empty() && self.steps[i - 1].op != self.steps[i].op {
                return false;
            }
        }
        true
    }

    pub fn is_diamond_only(&self) -> bool {
        self.steps.iter().all(|s| s.op == TemporalOp::Eventually)
    }

    /// Interval shape: `◇(ρ1 ∧ ◯ρ2 ∧ … ∧ ◯ρn)` with `ρ0 = ⊤` and `ρ1 ≠ ⊤`.
    pub fn is_interval(&self) -> bool {
        if !self.rho0.is_empty() || self.steps.is_empty() {
            return false;
        }
        if self.steps[0].op != TemporalOp::Eventually || self.steps[0].atoms.is_empty() {
            return false;
        }
        self.steps[1..].iter().all(|s| s.op == TemporalOp::Next)
    }

    pub fn to_query(&self) -> Query {
        let mut acc: Option<(TemporalOp, Query)> = None;
        for step in self.steps.iter().rev() {
            let sub = Query { atoms: step.atoms.clone(), temps: acc.take().into_iter().collect() };
            acc = Some((step.op, sub));
        }
        Query { atoms: self.rho0.clone(), temps: acc.into_iter().collect() }
    }
}

/// A `Q[◇]`-query in normal form: `ρ ∧ q1 ∧ … ∧ qn` with each conjunct a
/// `◇`-path starting with `◇`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DiamondQueryNF {
    pub rho: AtomSet,
    pub conjuncts: Vec<PathQuery>,
}

impl DiamondQueryNF {
    /// Validates the conjunct shape: `rho0 = ⊤`, at least one step, all
    /// operators `◇`, and each conjunct in normal form.
    pub fn new(rho: AtomSet, conjuncts: Vec<PathQuery>) -> Result<DiamondQueryNF> {
        for c in &conjuncts {
            let ok = c.rho0.is_empty()
                && !c.steps.is_empty()
                && c.is_diamond_only()
                && c.is_normal_form();
            if !ok {
                return Err(Error::NotNormalForm(c.to_string()));
            }
        }
        Ok(DiamondQueryNF { rho, conjuncts })
    }

    pub fn to_query(&self) -> Query {
        let mut temps = Vec::new();
        for c in &self.conjuncts {
            temps.extend(c.to_query().temps);
        }
        Query { atoms: self.rho.clone(), temps }
    }

    pub fn tdp(&self) -> usize {
        self.conjuncts.iter().map(|c| c.tdp()).max().unwrap_or(0)
    }

    pub fn sig(&self) -> Signature {
        let mut s: Signature = self.rho.iter().cloned().collect();
        for c in &self.conjuncts {
            s = s.union(&c.sig());
        }
        s
    }
}

/// A query in one of the two normal-form shapes the algorithms work on.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AnyQuery {
    Path(PathQuery),
    Diamond(DiamondQueryNF),
}

impl AnyQuery {
    pub fn to_query(&self) -> Query {
        match self {
            AnyQuery::Path(p) => p.to_query(),
            AnyQuery::Diamond(d) => d.to_query(),
        }
    }

    pub fn tdp(&self) -> usize {
        match self {
            AnyQuery::Path(p) => p.tdp(),
            AnyQuery::Diamond(d) => d.tdp(),
        }
    }

    pub fn sig(&self) -> Signature {
        match self {
            AnyQuery::Path(p) => p.sig(),
            AnyQuery::Diamond(d) => d.sig(),
        }
    }
}

impl From<PathQuery> for AnyQuery {
    fn from(p: PathQuery) -> AnyQuery {
        AnyQuery::Path(p)
    }
}

impl From<DiamondQueryNF> for AnyQuery {
    fn from(d: DiamondQueryNF) -> AnyQuery {
        AnyQuery::Diamond(d)
    }
}

impl fmt::Display for AnyQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_query())
    }
}

/// The query classes distinguished by the library.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QueryClass {
    /// Path `◯◇`-queries.
    QpNd,
    /// Path `◇`-queries.
    QpD,
    /// Arbitrary `◇`-queries (conjunctions of path `◇`-queries).
    QD,
    /// Interval queries `◇(ρ1 ∧ ◯ρ2 ∧ … ∧ ◯ρn)`.
    QIn,
    /// Arbitrary `◯◇`-queries; parsing and evaluation only.
    QNd,
}

impl QueryClass {
    pub fn cli_name(self) -> &'static str {
        match self {
            QueryClass::QpNd => "qpnd",
            QueryClass::QpD => "qpd",
            QueryClass::QD => "qd",
            QueryClass::QIn => "qin",
            QueryClass::QNd => "qnd",
        }
    }

    pub fn from_cli_name(s: &str) -> Option<QueryClass> {
        match s {
            "qpnd" => Some(QueryClass::QpNd),
            "qpd" => Some(QueryClass::QpD),
            "qd" => Some(QueryClass::QD),
            "qin" => Some(QueryClass::QIn),
            "qnd" => Some(QueryClass::QNd),
            _ => None,
        }
    }
}

impl fmt::Display for QueryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

/// All classes the query syntactically belongs to.
pub fn classify(q: &Query) -> BTreeSet<QueryClass> {
    let mut out = BTreeSet::new();
    out.insert(QueryClass::QNd);
    if !q.contains_next() {
        out.insert(QueryClass::QD);
    }
    if let Some(p) = q.as_path() {
        out.insert(QueryClass::QpNd);
        if p.is_diamond_only() {
            out.insert(QueryClass::QpD);
        }
        if p.is_interval() {
            out.insert(QueryClass::QIn);
        }
    }
    out
}

/// A nonempty set of positive instances together with a set of negative ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExampleSet {
    positives: Vec<DataInstance>,
    negatives: Vec<DataInstance>,
}

impl ExampleSet {
    pub fn new(positives: Vec<DataInstance>, negatives: Vec<DataInstance>) -> Result<ExampleSet> {
        if positives.is_empty() {
            return Err(Error::EmptyPositives);
        }
        Ok(ExampleSet { positives, negatives })
    }

    pub fn positives(&self) -> &[DataInstance] {
        &self.positives
    }

    pub fn negatives(&self) -> &[DataInstance] {
        &self.negatives
    }

    /// Upper bound on the temporal depth of any separator: the smallest
    /// maximum timestamp among the positives.
    pub fn depth_bound(&self) -> usize {
        self.positives.iter().map(|d| d.max_timestamp()).min().unwrap_or(0)
    }

    /// Upper bound on the atoms of any separator: the intersection of the
    /// positive signatures.
    pub fn sig_bound(&self) -> Signature {
        let mut iter = self.positives.iter();
        let mut acc: BTreeSet<Atom> = iter.next().map(|d| d.sig().0).unwrap_or_default();
        for d in iter {
            let s = d.sig();
            acc = acc.intersection(&s.0).cloned().collect();
        }
        Signature(acc)
    }
}

fn fmt_conjunction(atoms: &AtomSet, temps: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if atoms.is_empty() && temps.is_empty() {
        return f.write_str("T");
    }
    let mut first = true;
    for a in atoms {
        if !first {
            f.write_str(" & ")?;
        }
        first = false;
        write!(f, "{a}")?;
    }
    for t in temps {
        if !first {
            f.write_str(" & ")?;
        }
        first = false;
        f.write_str(t)?;
    }
    Ok(())
}

fn render_temp(op: TemporalOp, sub: &Query) -> String {
    let single = sub.atoms.len() + sub.temps.len() <= 1;
    if single {
        format!("{} {}", op.letter(), sub)
    } else {
        format!("{}({})", op.letter(), sub)
    }
}

impl fmt::Display for Query {
    /// Canonical rendering: atoms sorted, `&` n-ary, `X`/`F` bind one term.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let temps: Vec<String> =
            self.temps.iter().map(|(op, sub)| render_temp(*op, sub)).collect();
        fmt_conjunction(&self.atoms, &temps, f)
    }
}

impl fmt::Display for PathQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_query())
    }
}

impl fmt::Display for DiamondQueryNF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_query())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_query;

    fn atoms(names: &[&str]) -> AtomSet {
        names.iter().map(|n| Atom::new(n).unwrap()).collect()
    }

    #[test]
    fn reserved_names_rejected() {
        for name in RESERVED {
            assert!(Atom::new(name).is_err());
        }
        assert!(Atom::new("1abc").is_err());
        assert!(Atom::new("").is_err());
        assert!(Atom::new("TX").is_ok());
        assert!(Atom::new("_f0").is_ok());
    }

    #[test]
    fn classify_interval_query() {
        let q = parse_query("F(A & X X C)").unwrap();
        let classes = classify(&q);
        assert!(classes.contains(&QueryClass::QIn));
        assert!(classes.contains(&QueryClass::QpNd));
        assert!(classes.contains(&QueryClass::QNd));
        assert!(!classes.contains(&QueryClass::QpD));
        assert!(!classes.contains(&QueryClass::QD));
    }

    #[test]
    fn classify_diamond_conjunction() {
        let q = parse_query("F A & F B").unwrap();
        let classes = classify(&q);
        assert_eq!(
            classes.into_iter().collect::<Vec<_>>(),
            vec![QueryClass::QD, QueryClass::QNd]
        );
    }

    #[test]
    fn classify_diamond_path() {
        let q = parse_query("A & F(B & F C)").unwrap();
        let classes = classify(&q);
        for c in [QueryClass::QpD, QueryClass::QpNd, QueryClass::QD, QueryClass::QNd] {
            assert!(classes.contains(&c), "missing {c}");
        }
        assert!(!classes.contains(&QueryClass::QIn));
    }

    #[test]
    fn canonical_text_sorts_atoms() {
        let q = Query {
            atoms: AtomSet::new(),
            temps: vec![(TemporalOp::Eventually, Query { atoms: atoms(&["B", "A"]), temps: vec![] })],
        };
        assert_eq!(q.to_string(), "F(A & B)");
    }

    #[test]
    fn canonical_text_top() {
        assert_eq!(Query::top().to_string(), "T");
    }

    #[test]
    fn canonical_text_nested_path() {
        let q = parse_query("F(A & X(B & X C))").unwrap();
        assert_eq!(q.to_string(), "F(A & X(B & X C))");
    }

    #[test]
    fn example_set_rejects_empty_positives() {
        assert!(matches!(ExampleSet::new(vec![], vec![]), Err(Error::EmptyPositives)));
    }

    #[test]
    fn bounds_of_example_set() {
        let d1 = DataInstance::new(vec![atoms(&[]), atoms(&["A"]), atoms(&["B"])]).unwrap();
        let d2 = DataInstance::new(vec![atoms(&["A", "B"]), atoms(&["A"])]).unwrap();
        let e = ExampleSet::new(vec![d1, d2], vec![]).unwrap();
        assert_eq!(e.depth_bound(), 1);
        let sig: Vec<String> = e.sig_bound().iter().map(|a| a.to_string()).collect();
        assert_eq!(sig, vec!["A", "B"]);
    }

    #[test]
    fn instance_display_round_trip_tokens() {
        let d = DataInstance::new(vec![atoms(&[]), atoms(&["B", "A"])]).unwrap();
        assert_eq!(d.to_string(), "{} {A,B}");
    }
}
