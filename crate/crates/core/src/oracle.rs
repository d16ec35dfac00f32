//! Exhaustive ground truth: enumerating all separators of a class modulo
//! equivalence, their extremal elements, and a CNF-based example-set
//! generator whose separators are in bijection with satisfying assignments.

use crate::containment::{diamond_contains, path_entails_unchecked};
use crate::masks::{holds_masked, AtomTable, Mask, MaskedPath};
use crate::model::{
    AnyQuery, Atom, AtomSet, DataInstance, DiamondQueryNF, ExampleSet, PathQuery, QueryClass,
    Signature, TemporalOp,
};
use crate::{Error, Result};

/// Limits for exhaustive enumeration. Exceeding any limit is an error rather
/// than a silent truncation.
#[derive(Clone, Copy, Debug)]
pub struct EnumBudget {
    pub max_sig: usize,
    pub max_tdp: usize,
    pub max_queries: u64,
}

impl Default for EnumBudget {
    fn default() -> EnumBudget {
        EnumBudget { max_sig: 10, max_tdp: 6, max_queries: 5_000_000 }
    }
}

struct Counter {
    used: u64,
    cap: u64,
}

impl Counter {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.cap {
            Err(Error::BudgetExceeded(format!("more than {} candidate queries", self.cap)))
        } else {
            Ok(())
        }
    }
}

pub(crate) struct CompiledExamples {
    pub table: AtomTable,
    pub pos: Vec<Vec<Mask>>,
    pub neg: Vec<Vec<Mask>>,
}

impl CompiledExamples {
    pub(crate) fn new(e: &ExampleSet) -> CompiledExamples {
        let table = AtomTable::new(&e.sig_bound());
        CompiledExamples {
            pos: e.positives().iter().map(|d| table.instance(d)).collect(),
            neg: e.negatives().iter().map(|d| table.instance(d)).collect(),
            table,
        }
    }

    fn separates_path(&self, q: &MaskedPath) -> bool {
        self.pos.iter().all(|w| holds_masked(w, q))
            && self.neg.iter().all(|w| !holds_masked(w, q))
    }

    fn holds_diamond(word: &[Mask], rho: Mask, conjuncts: &[MaskedPath]) -> bool {
        rho & !word[0] == 0 && conjuncts.iter().all(|c| holds_masked(word, c))
    }

    fn separates_diamond(&self, rho: Mask, conjuncts: &[MaskedPath]) -> bool {
        self.pos.iter().all(|w| Self::holds_diamond(w, rho, conjuncts))
            && self.neg.iter().all(|w| !Self::holds_diamond(w, rho, conjuncts))
    }
}

fn class_ops(class: QueryClass) -> &'static [TemporalOp] {
    match class {
        QueryClass::QpD => &[TemporalOp::Eventually],
        _ => &[TemporalOp::Next, TemporalOp::Eventually],
    }
}

fn extend_steps(
    rho0: Mask,
    natoms: usize,
    bound: usize,
    class: QueryClass,
    counter: &mut Counter,
    steps: &mut Vec<(TemporalOp, Mask)>,
    sink: &mut impl FnMut(&MaskedPath),
) -> Result<()> {
    if steps.len() == bound {
        return Ok(());
    }
    let letters: Mask = 1 << natoms;
    let allowed_ops: Vec<TemporalOp> = match class {
        QueryClass::QIn => {
            if steps.is_empty() {
                vec![TemporalOp::Eventually]
            } else {
                vec![TemporalOp::Next]
            }
        }
        _ => match steps.last() {
            // an interior ⊤ position must be left by the operator that
            // entered it
            Some(&(op, 0)) => vec![op],
            _ => class_ops(class).to_vec(),
        },
    };
    for op in allowed_ops {
        for label in 0..letters {
            if class == QueryClass::QIn && steps.is_empty() && label == 0 {
                continue;
            }
            steps.push((op, label));
            if label != 0 {
                counter.tick()?;
                sink(&MaskedPath { rho0, steps: steps.clone() });
            }
            extend_steps(rho0, natoms, bound, class, counter, steps, sink)?;
            steps.pop();
        }
    }
    Ok(())
}

/// Generates every normal-form path query of the class over `natoms` atoms
/// with temporal depth at most `bound`, feeding each to `sink`. Deterministic
/// order: by `rho0` ascending, then prefix order over step extensions.
fn generate_paths(
    natoms: usize,
    bound: usize,
    class: QueryClass,
    counter: &mut Counter,
    sink: &mut impl FnMut(&MaskedPath),
) -> Result<()> {
    let letters: Mask = 1 << natoms;
    let rho0s: Vec<Mask> = match class {
        QueryClass::QIn => vec![0],
        _ => (0..letters).collect(),
    };
    let mut steps: Vec<(TemporalOp, Mask)> = Vec::new();
    for rho0 in rho0s {
        if class != QueryClass::QIn {
            counter.tick()?;
            sink(&MaskedPath { rho0, steps: Vec::new() });
        }
        extend_steps(rho0, natoms, bound, class, counter, &mut steps, sink)?;
    }
    Ok(())
}

fn check_budget(sig: &Signature, tdp: usize, budget: &EnumBudget) -> Result<()> {
    if sig.len() > budget.max_sig {
        return Err(Error::BudgetExceeded(format!(
            "signature of {} atoms exceeds max_sig {}",
            sig.len(),
            budget.max_sig
        )));
    }
    if tdp > budget.max_tdp {
        return Err(Error::BudgetExceeded(format!(
            "depth bound {tdp} exceeds max_tdp {}",
            budget.max_tdp
        )));
    }
    Ok(())
}

/// Keeps the first representative of each equivalence class. Enumeration
/// already emits normal forms only, so this pass usually keeps everything;
/// it guards the dedup rather than assuming normal forms are canonical.
fn dedup_paths(mut paths: Vec<PathQuery>) -> Vec<PathQuery> {
    let mut out: Vec<PathQuery> = Vec::new();
    'next: for p in paths.drain(..) {
        for kept in &out {
            if path_entails_unchecked(kept, &p).is_some()
                && path_entails_unchecked(&p, kept).is_some()
            {
                continue 'next;
            }
        }
        out.push(p);
    }
    out
}

fn dedup_diamonds(mut qs: Vec<DiamondQueryNF>) -> Vec<DiamondQueryNF> {
    let mut out: Vec<DiamondQueryNF> = Vec::new();
    'next: for q in qs.drain(..) {
        for kept in &out {
            if diamond_contains(kept, &q) && diamond_contains(&q, kept) {
                continue 'next;
            }
        }
        out.push(q);
    }
    out
}

/// The pool of path `◇`-conjuncts (starting with `◇`, `tdp ≥ 1`) over the
/// example set's bounds that hold at 0 in every positive instance.
fn positive_conjunct_pool(
    ce: &CompiledExamples,
    depth: usize,
    budget: &EnumBudget,
) -> Result<Vec<MaskedPath>> {
    let mut counter = Counter { used: 0, cap: budget.max_queries };
    let mut pool = Vec::new();
    generate_paths(ce.table.len(), depth, QueryClass::QpD, &mut counter, &mut |q| {
        if q.rho0 == 0 && !q.steps.is_empty() && ce.pos.iter().all(|w| holds_masked(w, q)) {
            pool.push(q.clone());
        }
    })?;
    Ok(pool)
}

/// All separators of `E` in `class`, in canonical normal form, deduplicated
/// modulo equivalence, in a deterministic order.
///
/// For `qd` this lists every redundancy-free conjunction over the positive
/// conjunct pool, which is exponential in the pool size; the budget guards
/// it. `qnd` is not enumerable here.
pub fn enumerate_separators(
    e: &ExampleSet,
    class: QueryClass,
    budget: &EnumBudget,
) -> Result<Vec<AnyQuery>> {
    let sig = e.sig_bound();
    let depth = e.depth_bound();
    check_budget(&sig, depth, budget)?;
    let ce = CompiledExamples::new(e);
    match class {
        QueryClass::QpNd | QueryClass::QpD | QueryClass::QIn => {
            let mut counter = Counter { used: 0, cap: budget.max_queries };
            let mut found = Vec::new();
            generate_paths(ce.table.len(), depth, class, &mut counter, &mut |q| {
                if ce.separates_path(q) {
                    found.push(q.decompile(&ce.table));
                }
            })?;
            Ok(dedup_paths(found).into_iter().map(AnyQuery::Path).collect())
        }
        QueryClass::QD => {
            let pool = positive_conjunct_pool(&ce, depth, budget)?;
            let max = pool.len();
            Ok(enumerate_qd(&ce, &pool, max, budget)?
                .into_iter()
                .map(AnyQuery::Diamond)
                .collect())
        }
        QueryClass::QNd => Err(Error::Unsupported(class, "cannot enumerate arbitrary queries")),
    }
}

#[allow(clippy::too_many_arguments)]
fn qd_rec(
    ce: &CompiledExamples,
    pool: &[MaskedPath],
    pool_paths: &[PathQuery],
    entails: &[Vec<bool>],
    rho_candidates: &[Mask],
    max_conjuncts: usize,
    counter: &mut Counter,
    chosen: &mut Vec<usize>,
    start: usize,
    found: &mut Vec<DiamondQueryNF>,
) -> Result<()> {
    let conjuncts: Vec<MaskedPath> = chosen.iter().map(|&i| pool[i].clone()).collect();
    for &rho in rho_candidates {
        counter.tick()?;
        if ce.separates_diamond(rho, &conjuncts) {
            let mut cs: Vec<PathQuery> = chosen.iter().map(|&i| pool_paths[i].clone()).collect();
            cs.sort();
            found.push(DiamondQueryNF { rho: ce.table.set_of(rho), conjuncts: cs });
        }
    }
    if chosen.len() == max_conjuncts {
        return Ok(());
    }
    for i in start..pool.len() {
        if chosen.iter().all(|&j| !entails[i][j] && !entails[j][i]) {
            chosen.push(i);
            qd_rec(ce, pool, pool_paths, entails, rho_candidates, max_conjuncts, counter, chosen, i + 1, found)?;
            chosen.pop();
        }
    }
    Ok(())
}

/// Redundancy-free conjunctions `ρ ∧ q1 ∧ … ∧ qk` with `k ≤ max_conjuncts`
/// drawn from `pool` that separate. The pool must hold in all positives.
fn enumerate_qd(
    ce: &CompiledExamples,
    pool: &[MaskedPath],
    max_conjuncts: usize,
    budget: &EnumBudget,
) -> Result<Vec<DiamondQueryNF>> {
    let n = pool.len();
    let pool_paths: Vec<PathQuery> = pool.iter().map(|p| p.decompile(&ce.table)).collect();
    let mut entails = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            entails[i][j] =
                i != j && path_entails_unchecked(&pool_paths[i], &pool_paths[j]).is_some();
        }
    }
    // ρ must hold at 0 in every positive
    let rho_space: Mask = ce.pos.iter().fold(ce.table.full(), |acc, w| acc & w[0]);
    let rho_candidates: Vec<Mask> =
        (0..=ce.table.full()).filter(|&m| m & !rho_space == 0).collect();

    let mut counter = Counter { used: 0, cap: budget.max_queries };
    let mut found: Vec<DiamondQueryNF> = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    qd_rec(
        ce,
        pool,
        &pool_paths,
        &entails,
        &rho_candidates,
        max_conjuncts,
        &mut counter,
        &mut chosen,
        0,
        &mut found,
    )?;
    found.sort();
    Ok(dedup_diamonds(found))
}

fn any_entails(a: &AnyQuery, b: &AnyQuery) -> bool {
    match (a, b) {
        (AnyQuery::Path(p), AnyQuery::Path(q)) => path_entails_unchecked(p, q).is_some(),
        (AnyQuery::Diamond(p), AnyQuery::Diamond(q)) => diamond_contains(p, q),
        _ => false,
    }
}

fn minimal_elements(items: &[AnyQuery]) -> Vec<AnyQuery> {
    items
        .iter()
        .filter(|q| !items.iter().any(|p| *p != **q && any_entails(p, q)))
        .cloned()
        .collect()
}

fn maximal_elements(items: &[AnyQuery]) -> Vec<AnyQuery> {
    items
        .iter()
        .filter(|q| !items.iter().any(|p| *p != **q && any_entails(q, p)))
        .cloned()
        .collect()
}

/// Most specific and most general separators: the containment-minimal and
/// -maximal elements of the separator space, modulo equivalence.
///
/// For `qd` the most specific side, when the set separates at all, is the
/// reduced conjunction of the whole positive conjunct pool (the class is
/// closed under `∧`); the most general side is read off conjunctions of at
/// most `|E⁻|` conjuncts, since every separator picks one falsified conjunct
/// per negative and is therefore entailed by a separator of that shape.
pub fn extremal_sets(
    e: &ExampleSet,
    class: QueryClass,
    budget: &EnumBudget,
) -> Result<(Vec<AnyQuery>, Vec<AnyQuery>)> {
    match class {
        QueryClass::QD => {
            let sig = e.sig_bound();
            let depth = e.depth_bound();
            check_budget(&sig, depth, budget)?;
            let ce = CompiledExamples::new(e);
            let pool = positive_conjunct_pool(&ce, depth, budget)?;
            let rho_max: Mask = ce.pos.iter().fold(ce.table.full(), |acc, w| acc & w[0]);
            let mss = if ce.separates_diamond(rho_max, &pool) {
                let reduced = crate::eval::reduce_conjuncts(
                    ce.table.set_of(rho_max),
                    pool.iter().map(|p| p.decompile(&ce.table)).collect(),
                );
                vec![AnyQuery::Diamond(reduced)]
            } else {
                Vec::new()
            };
            let capped = enumerate_qd(&ce, &pool, e.negatives().len().min(pool.len()), budget)?;
            let capped: Vec<AnyQuery> = capped.into_iter().map(AnyQuery::Diamond).collect();
            Ok((mss, maximal_elements(&capped)))
        }
        _ => {
            let separators = enumerate_separators(e, class, budget)?;
            Ok((minimal_elements(&separators), maximal_elements(&separators)))
        }
    }
}

/// Everything in the class over `sig` up to depth `tdp_bound` (for `qd`:
/// conjunctions of at most `max_conjuncts` pairwise incomparable conjuncts),
/// used by exhaustive frontier checks.
pub fn enumerate_class(
    sig: &Signature,
    tdp_bound: usize,
    class: QueryClass,
    max_conjuncts: usize,
    budget: &EnumBudget,
) -> Result<Vec<AnyQuery>> {
    check_budget(sig, tdp_bound, budget)?;
    let table = AtomTable::new(sig);
    let mut counter = Counter { used: 0, cap: budget.max_queries };
    match class {
        QueryClass::QpNd | QueryClass::QpD | QueryClass::QIn => {
            let mut out = Vec::new();
            generate_paths(table.len(), tdp_bound, class, &mut counter, &mut |q| {
                out.push(AnyQuery::Path(q.decompile(&table)));
            })?;
            Ok(out)
        }
        QueryClass::QD => {
            let mut conjunct_masks: Vec<MaskedPath> = Vec::new();
            generate_paths(table.len(), tdp_bound, QueryClass::QpD, &mut counter, &mut |q| {
                if q.rho0 == 0 && !q.steps.is_empty() {
                    conjunct_masks.push(q.clone());
                }
            })?;
            let paths: Vec<PathQuery> =
                conjunct_masks.iter().map(|p| p.decompile(&table)).collect();
            let n = paths.len();
            let mut entails = vec![vec![false; n]; n];
            for i in 0..n {
                for j in 0..n {
                    entails[i][j] =
                        i != j && path_entails_unchecked(&paths[i], &paths[j]).is_some();
                }
            }
            let mut out = Vec::new();
            let mut chosen: Vec<usize> = Vec::new();
            class_qd_rec(&paths, &entails, &table, max_conjuncts, &mut counter, &mut chosen, 0, &mut out)?;
            Ok(out)
        }
        QueryClass::QNd => Err(Error::Unsupported(class, "cannot enumerate arbitrary queries")),
    }
}

#[allow(clippy::too_many_arguments)]
fn class_qd_rec(
    paths: &[PathQuery],
    entails: &[Vec<bool>],
    table: &AtomTable,
    max_conjuncts: usize,
    counter: &mut Counter,
    chosen: &mut Vec<usize>,
    start: usize,
    out: &mut Vec<AnyQuery>,
) -> Result<()> {
    for rho in 0..=table.full() {
        counter.tick()?;
        let mut cs: Vec<PathQuery> = chosen.iter().map(|&i| paths[i].clone()).collect();
        cs.sort();
        out.push(AnyQuery::Diamond(DiamondQueryNF { rho: table.set_of(rho), conjuncts: cs }));
    }
    if chosen.len() == max_conjuncts {
        return Ok(());
    }
    for i in start..paths.len() {
        if chosen.iter().all(|&j| !entails[i][j] && !entails[j][i]) {
            chosen.push(i);
            class_qd_rec(paths, entails, table, max_conjuncts, counter, chosen, i + 1, out)?;
            chosen.pop();
        }
    }
    Ok(())
}

/// A CNF over variables `x1 … xn` with signed literals. No variable may
/// occur both positively and negatively in one clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<i64>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i64>>) -> Result<CnfFormula> {
        for clause in &clauses {
            for &lit in clause {
                let var = lit.unsigned_abs() as usize;
                if lit == 0 || var == 0 || var > num_vars {
                    return Err(Error::InvalidClause(format!("literal {lit} out of range")));
                }
                if clause.contains(&-lit) {
                    return Err(Error::InvalidClause(format!(
                        "variable {var} occurs both positively and negatively"
                    )));
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i64>] {
        &self.clauses
    }

    fn clause_satisfied(clause: &[i64], assignment: u64) -> bool {
        clause.iter().any(|&lit| {
            let bit = assignment & (1 << (lit.unsigned_abs() - 1)) != 0;
            (lit > 0) == bit
        })
    }

    fn satisfied(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|c| Self::clause_satisfied(c, assignment))
    }
}

/// Truth-table model count.
pub fn count_sat(cnf: &CnfFormula) -> u64 {
    assert!(cnf.num_vars <= 24, "truth-table counting is for small formulas");
    (0..1u64 << cnf.num_vars).filter(|&a| cnf.satisfied(a)).count() as u64
}

/// Parses DIMACS CNF text.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut num_vars = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 3 || fields[0] != "cnf" {
                return Err(Error::InvalidClause(format!("bad problem line `{line}`")));
            }
            num_vars = Some(
                fields[1]
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidClause(format!("bad var count `{}`", fields[1])))?,
            );
            continue;
        }
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::InvalidClause(format!("bad literal `{tok}`")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    let num_vars = num_vars.ok_or_else(|| Error::InvalidClause("missing `p cnf` line".into()))?;
    CnfFormula::new(num_vars, clauses)
}

fn gadget_word(letter: AtomSet) -> DataInstance {
    DataInstance::new(vec![AtomSet::new(), letter]).expect("two-letter word")
}

/// Builds the example set whose path `◯◇`-separators are, modulo
/// equivalence, exactly the queries `◇ρ_a` for satisfying assignments `a`:
/// a parsimonious reduction from satisfiability to separator counting.
/// With `merge_negatives`, the negative gadgets are concatenated into one
/// instance, two empty timestamps between consecutive gadget letters.
pub fn cnf_examples(cnf: &CnfFormula, merge_negatives: bool) -> Result<ExampleSet> {
    let n = cnf.num_vars;
    if n == 0 {
        return Err(Error::InvalidClause("formula needs at least one variable".into()));
    }
    let pos_atom = |i: usize| Atom::new(&format!("A{i}")).expect("valid atom");
    let neg_atom = |i: usize| Atom::new(&format!("NA{i}")).expect("valid atom");
    let all_atoms: AtomSet = (1..=n).flat_map(|i| [pos_atom(i), neg_atom(i)]).collect();

    let mut positives = Vec::new();
    positives.push(gadget_word(all_atoms.clone()));
    positives
        .push(DataInstance::new(vec![AtomSet::new(), AtomSet::new(), all_atoms.clone()]).unwrap());
    // the i-th positive splits variable i across timestamps 1 and 2
    for i in 1..=n {
        let mut at1: AtomSet = [pos_atom(i)].into_iter().collect();
        let mut at2: AtomSet = [neg_atom(i)].into_iter().collect();
        for j in 1..=n {
            if j != i {
                at1.insert(pos_atom(j));
                at1.insert(neg_atom(j));
                at2.insert(pos_atom(j));
                at2.insert(neg_atom(j));
            }
        }
        positives.push(DataInstance::new(vec![AtomSet::new(), at1, at2]).unwrap());
    }

    // clause gadgets: everything compatible with falsifying the clause
    let mut gadget_letters: Vec<AtomSet> = Vec::new();
    for clause in &cnf.clauses {
        let mut letter = AtomSet::new();
        for j in 1..=n {
            if !clause.contains(&-(j as i64)) {
                letter.insert(neg_atom(j));
            }
            if !clause.contains(&(j as i64)) {
                letter.insert(pos_atom(j));
            }
        }
        gadget_letters.push(letter);
    }
    // completeness gadgets: variable i mentioned by neither polarity
    for i in 1..=n {
        let mut letter = AtomSet::new();
        for j in 1..=n {
            if j != i {
                letter.insert(pos_atom(j));
                letter.insert(neg_atom(j));
            }
        }
        gadget_letters.push(letter);
    }

    let negatives = if merge_negatives {
        let mut word = vec![AtomSet::new()];
        for (k, letter) in gadget_letters.into_iter().enumerate() {
            if k > 0 {
                word.push(AtomSet::new());
                word.push(AtomSet::new());
            }
            word.push(letter);
        }
        vec![DataInstance::new(word).unwrap()]
    } else {
        gadget_letters.into_iter().map(gadget_word).collect()
    };

    ExampleSet::new(positives, negatives)
}
