//! Separator verification, extremal-separator verification via frontiers,
//! frontier climbing, the unique most general `◇`-conjunction separator, and
//! interval-separator synthesis for bounded positive sets.

use crate::eval::{holds_at, normalize_diamond, normalize_path, reduce_conjuncts};
use crate::frontiers::{self, Direction, Frontier};
use crate::masks::{holds_masked, AtomTable, Mask, MaskedPath};
use crate::model::{
    AnyQuery, AtomSet, DiamondQueryNF, ExampleSet, PathQuery, Query, QueryClass, Signature,
    TemporalOp,
};
use crate::sepgraphs::{self, Mode};
use crate::{Error, Result};

/// The outcome of checking one query against an example set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationReport {
    pub query: Query,
    pub is_separator: bool,
    /// Index of the first positive instance where the query is false.
    pub failing_positive: Option<usize>,
    /// Index of the first negative instance where the query is true.
    pub failing_negative: Option<usize>,
}

/// True at 0 in every positive and false at 0 in every negative.
pub fn separates(q: &Query, e: &ExampleSet) -> SeparationReport {
    let failing_positive = e.positives().iter().position(|d| !holds_at(d, 0, q));
    let failing_negative = e.negatives().iter().position(|d| holds_at(d, 0, q));
    SeparationReport {
        query: q.clone(),
        is_separator: failing_positive.is_none() && failing_negative.is_none(),
        failing_positive,
        failing_negative,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremalKind {
    Mss,
    Mgs,
}

/// Brings a parsed query into the normal-form shape of `class`.
pub fn parse_to_class(q: &Query, class: QueryClass) -> Result<AnyQuery> {
    match class {
        QueryClass::QD => Ok(AnyQuery::Diamond(normalize_diamond(q)?)),
        QueryClass::QpNd | QueryClass::QpD | QueryClass::QIn => {
            let p = q
                .as_path()
                .ok_or_else(|| Error::NotInClass(q.to_string(), class))?;
            let p = normalize_path(&p);
            let ok = match class {
                QueryClass::QpD => p.is_diamond_only(),
                QueryClass::QIn => p.is_interval(),
                _ => true,
            };
            if !ok {
                return Err(Error::NotInClass(q.to_string(), class));
            }
            Ok(AnyQuery::Path(p))
        }
        QueryClass::QNd => Err(Error::Unsupported(class, "no normal form is computed")),
    }
}

fn coerce(q: &AnyQuery, class: QueryClass) -> Result<AnyQuery> {
    match (q, class) {
        (AnyQuery::Path(p), QueryClass::QD) => {
            if !p.is_diamond_only() {
                return Err(Error::NotInClass(p.to_string(), class));
            }
            let conjuncts = if p.steps.is_empty() {
                Vec::new()
            } else {
                vec![PathQuery { rho0: AtomSet::new(), steps: p.steps.clone() }]
            };
            Ok(AnyQuery::Diamond(DiamondQueryNF { rho: p.rho0.clone(), conjuncts }))
        }
        _ => parse_to_class(&q.to_query(), class),
    }
}

/// The frontier the class offers in the given direction. `(qd, Strengthen)`
/// has none of polynomial size and is rejected; route those callers to the
/// oracle.
pub fn class_frontier(
    q: &AnyQuery,
    sig: &Signature,
    class: QueryClass,
    direction: Direction,
    bound: Option<usize>,
) -> Result<Frontier> {
    match (class, &coerce(q, class)?) {
        (QueryClass::QpNd, AnyQuery::Path(p)) => match direction {
            Direction::Strengthen => frontiers::strengthen_path(p, sig, true),
            Direction::Weaken => frontiers::weaken_path(p, true),
        },
        (QueryClass::QpD, AnyQuery::Path(p)) => match direction {
            Direction::Strengthen => frontiers::strengthen_path(p, sig, false),
            Direction::Weaken => frontiers::weaken_path(p, false),
        },
        (QueryClass::QIn, AnyQuery::Path(p)) => {
            frontiers::interval_frontier(p, sig, direction, bound)
        }
        (QueryClass::QD, AnyQuery::Diamond(d)) => match direction {
            Direction::Weaken => frontiers::weaken_diamond(d, sig),
            Direction::Strengthen => Err(Error::Unsupported(
                class,
                "strengthening frontiers can be exponential; use the oracle",
            )),
        },
        _ => Err(Error::Unsupported(class, "no frontier for this class")),
    }
}

/// Is `q` a most specific (`Mss`) or most general (`Mgs`) separator of `E`
/// within `class`? Decided through the class frontier: extremal means no
/// frontier member separates. `(qd, Mss)` is rejected; its verification has
/// no polynomial frontier and belongs to the oracle.
pub fn verify_extremal(
    q: &AnyQuery,
    e: &ExampleSet,
    class: QueryClass,
    kind: ExtremalKind,
) -> Result<bool> {
    let q = coerce(q, class)?;
    if !separates(&q.to_query(), e).is_separator {
        return Ok(false);
    }
    let direction = match kind {
        ExtremalKind::Mss => Direction::Strengthen,
        ExtremalKind::Mgs => Direction::Weaken,
    };
    let bound = (class == QueryClass::QIn && direction == Direction::Strengthen)
        .then(|| e.depth_bound());
    // a separator's atoms all lie in the signature bound of the example set
    let f = class_frontier(&q, &e.sig_bound(), class, direction, bound)?;
    Ok(f.members.iter().all(|m| !separates(&m.to_query(), e).is_separator))
}

/// Repeatedly replaces the query by the first frontier member that still
/// separates, until none does; the result is a most specific (strengthening)
/// or most general (weakening) separator. Returns the result together with
/// the number of replacement rounds.
pub fn climb_counted(
    q: &AnyQuery,
    e: &ExampleSet,
    class: QueryClass,
    direction: Direction,
) -> Result<(AnyQuery, usize)> {
    let mut cur = coerce(q, class)?;
    if !separates(&cur.to_query(), e).is_separator {
        return Err(Error::NotSeparator);
    }
    let sig = e.sig_bound();
    let bound = (class == QueryClass::QIn && direction == Direction::Strengthen)
        .then(|| e.depth_bound());
    let mut rounds = 0;
    loop {
        let f = class_frontier(&cur, &sig, class, direction, bound)?;
        match f
            .members
            .into_iter()
            .find(|m| separates(&m.to_query(), e).is_separator)
        {
            Some(m) => {
                cur = m;
                rounds += 1;
            }
            None => return Ok((cur, rounds)),
        }
    }
}

/// `climb_counted` without the round count.
pub fn climb(
    q: &AnyQuery,
    e: &ExampleSet,
    class: QueryClass,
    direction: Direction,
) -> Result<AnyQuery> {
    climb_counted(q, e, class, direction).map(|(q, _)| q)
}

/// The unique most general `◇`-conjunction separator, built out of the
/// per-negative unique most general path separators: conjoin the unique most
/// general path `◇`-separator of `(E⁺, {D})` over the negatives `D` that
/// have one; the conjunction is the answer exactly when it separates.
pub fn unique_mgs_qdiamond(e: &ExampleSet) -> Result<Option<DiamondQueryNF>> {
    let mut rho = AtomSet::new();
    let mut conjuncts: Vec<PathQuery> = Vec::new();
    for d in e.negatives() {
        let pair = ExampleSet::new(e.positives().to_vec(), vec![d.clone()])?;
        if let Some(qd) = sepgraphs::unique_mgs_pdiamond(&pair)? {
            rho.extend(qd.rho0.iter().cloned());
            if !qd.steps.is_empty() {
                conjuncts.push(PathQuery { rho0: AtomSet::new(), steps: qd.steps });
            }
        }
    }
    let nf = reduce_conjuncts(rho, conjuncts);
    if separates(&nf.to_query(), e).is_separator {
        Ok(Some(nf))
    } else {
        Ok(None)
    }
}

const INTERVAL_CANDIDATE_CAP: u64 = 2_000_000;

/// Searches the candidate family of interval queries built from
/// coordinatewise intersections of the positive instances: anchor vector
/// `k⃗ ≥ 1̄` and window length `k+1` give the query whose `j`-th window label
/// is the intersection of the positive letters at `k_i + j`. Some candidate
/// separates exactly when an interval separator exists. Runtime is
/// exponential only in the number of positives.
pub fn interval_exists(e: &ExampleSet) -> Result<Option<PathQuery>> {
    let table = AtomTable::new(&e.sig_bound());
    let pos_words: Vec<Vec<Mask>> = e.positives().iter().map(|d| table.instance(d)).collect();
    let neg_words: Vec<Vec<Mask>> = e.negatives().iter().map(|d| table.instance(d)).collect();
    let maxes: Vec<usize> = e.positives().iter().map(|d| d.max_timestamp()).collect();
    let window_max = maxes.iter().copied().max().unwrap_or(0);
    if window_max == 0 {
        return Ok(None);
    }
    let mut total: u64 = window_max as u64;
    for &m in &maxes {
        if m == 0 {
            return Ok(None);
        }
        total = total
            .checked_mul(m as u64)
            .ok_or_else(|| Error::BudgetExceeded("interval candidate space overflows".into()))?;
    }
    if total > INTERVAL_CANDIDATE_CAP {
        return Err(Error::BudgetExceeded(format!(
            "{total} interval candidates exceed cap {INTERVAL_CANDIDATE_CAP}"
        )));
    }

    for k in 0..window_max {
        let mut anchors: Vec<usize> = vec![1; maxes.len()];
        'anchors: loop {
            let labels: Vec<Mask> = (0..=k)
                .map(|j| {
                    pos_words.iter().zip(&anchors).fold(table.full(), |acc, (w, &ki)| {
                        acc & w.get(ki + j).copied().unwrap_or(0)
                    })
                })
                .collect();
            if labels[0] != 0 && labels[k] != 0 {
                let steps: Vec<(TemporalOp, Mask)> = labels
                    .iter()
                    .enumerate()
                    .map(|(j, &m)| {
                        (if j == 0 { TemporalOp::Eventually } else { TemporalOp::Next }, m)
                    })
                    .collect();
                let cand = MaskedPath { rho0: 0, steps };
                debug_assert!(pos_words.iter().all(|w| holds_masked(w, &cand)));
                if neg_words.iter().all(|w| !holds_masked(w, &cand)) {
                    let q = cand.decompile(&table);
                    debug_assert!(q.is_interval());
                    return Ok(Some(q));
                }
            }
            let mut i = anchors.len();
            while i > 0 {
                i -= 1;
                if anchors[i] < maxes[i] {
                    anchors[i] += 1;
                    anchors[i + 1..].iter_mut().for_each(|a| *a = 1);
                    continue 'anchors;
                }
            }
            break;
        }
    }
    Ok(None)
}

/// Computes one separator in `class`, when one exists: through the product
/// graph for the path classes, the interval candidate family for `qin`, and
/// per-negative path separators conjoined for `qd`.
pub fn find_separator(e: &ExampleSet, class: QueryClass) -> Result<Option<AnyQuery>> {
    match class {
        QueryClass::QpD | QueryClass::QpNd => {
            let mode = if class == QueryClass::QpD { Mode::Diamond } else { Mode::NextDiamond };
            let g = sepgraphs::build_product(e, mode)?;
            Ok(g.separating_path().map(|p| AnyQuery::Path(g.path_query(&p))))
        }
        QueryClass::QIn => Ok(interval_exists(e)?.map(AnyQuery::Path)),
        QueryClass::QD => {
            let mut rho = AtomSet::new();
            let mut conjuncts = Vec::new();
            for d in e.negatives() {
                let pair = ExampleSet::new(e.positives().to_vec(), vec![d.clone()])?;
                let g = sepgraphs::build_product(&pair, Mode::Diamond)?;
                let Some(path) = g.separating_path() else { return Ok(None) };
                let q = g.path_query(&path);
                rho.extend(q.rho0.iter().cloned());
                if !q.steps.is_empty() {
                    conjuncts.push(PathQuery { rho0: AtomSet::new(), steps: q.steps });
                }
            }
            let nf = reduce_conjuncts(rho, conjuncts);
            debug_assert!(separates(&nf.to_query(), e).is_separator);
            Ok(Some(AnyQuery::Diamond(nf)))
        }
        QueryClass::QNd => Err(Error::Unsupported(class, "route through qpnd")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_example_set, parse_query};

    fn any(s: &str, class: QueryClass) -> AnyQuery {
        parse_to_class(&parse_query(s).unwrap(), class).unwrap()
    }

    const EXAMPLE_1: &str =
        "positive:\n{} {A} {B} {C}\n{} {} {A} {B} {C}\nnegative:\n{} {A} {B} {} {C}\n";

    fn hasse_example() -> ExampleSet {
        parse_example_set("positive:\n{A,B} {A,B}\nnegative:\n{A}\n").unwrap()
    }

    fn incomparable_example() -> ExampleSet {
        parse_example_set("positive:\n{} {A} {B}\n{} {B} {A}\nnegative:\n{C}\n").unwrap()
    }

    #[test]
    fn separator_reports() {
        let e = parse_example_set(EXAMPLE_1).unwrap();
        let q2 = parse_query("F(A & X X C)").unwrap();
        assert!(separates(&q2, &e).is_separator);
        let qc = parse_query("F C").unwrap();
        let rep = separates(&qc, &e);
        assert!(!rep.is_separator);
        assert_eq!(rep.failing_negative, Some(0));
        assert_eq!(rep.failing_positive, None);
        let top = parse_query("A & B & F(A & B)").unwrap();
        assert!(separates(&top, &hasse_example()).is_separator);
    }

    #[test]
    fn verify_most_general_in_hasse_example() {
        let e = hasse_example();
        assert!(verify_extremal(&any("F A", QueryClass::QpD), &e, QueryClass::QpD, ExtremalKind::Mgs)
            .unwrap());
        assert!(!verify_extremal(
            &any("B & F B", QueryClass::QpD),
            &e,
            QueryClass::QpD,
            ExtremalKind::Mgs
        )
        .unwrap());
    }

    #[test]
    fn verify_most_specific_explanation() {
        let e = parse_example_set(EXAMPLE_1).unwrap();
        let q1 = any("F(A & X(B & X C))", QueryClass::QpNd);
        assert!(verify_extremal(&q1, &e, QueryClass::QpNd, ExtremalKind::Mss).unwrap());
        let q3 = any("F(B & X C)", QueryClass::QpNd);
        assert!(!verify_extremal(&q3, &e, QueryClass::QpNd, ExtremalKind::Mss).unwrap());
        assert!(verify_extremal(&q3, &e, QueryClass::QpNd, ExtremalKind::Mgs).unwrap());
    }

    #[test]
    fn qd_mss_verification_points_to_oracle() {
        let e = incomparable_example();
        let q = any("F A & F B", QueryClass::QD);
        assert!(matches!(
            verify_extremal(&q, &e, QueryClass::QD, ExtremalKind::Mss),
            Err(Error::Unsupported(QueryClass::QD, _))
        ));
        assert!(verify_extremal(&q, &e, QueryClass::QD, ExtremalKind::Mgs).is_ok());
    }

    #[test]
    fn climb_reaches_extremal_elements() {
        let e = hasse_example();
        let seed = any("F(A & B)", QueryClass::QpD);
        let (most_specific, _) =
            climb_counted(&seed, &e, QueryClass::QpD, Direction::Strengthen).unwrap();
        assert_eq!(most_specific.to_string(), "A & B & F(A & B)");

        let seed = any("A & B & F(A & B)", QueryClass::QpD);
        let (general, _) = climb_counted(&seed, &e, QueryClass::QpD, Direction::Weaken).unwrap();
        let allowed = ["B", "F A", "F B"];
        assert!(allowed.contains(&general.to_string().as_str()), "got {general}");
        assert!(verify_extremal(&general, &e, QueryClass::QpD, ExtremalKind::Mgs).unwrap());

        // a seed that is already extremal is returned unchanged
        let fixed = climb(&general, &e, QueryClass::QpD, Direction::Weaken).unwrap();
        assert_eq!(fixed, general);
    }

    #[test]
    fn climb_rejects_non_separators() {
        let e = hasse_example();
        let seed = any("A", QueryClass::QpD);
        assert!(matches!(
            climb(&seed, &e, QueryClass::QpD, Direction::Strengthen),
            Err(Error::NotSeparator)
        ));
    }

    #[test]
    fn no_unique_most_general_conjunction() {
        let e = incomparable_example();
        assert_eq!(unique_mgs_qdiamond(&e).unwrap(), None);
    }

    #[test]
    fn empty_negatives_give_top() {
        let e = parse_example_set("positive:\n{A} {A}\n").unwrap();
        let q = unique_mgs_qdiamond(&e).unwrap().expect("top separates vacuously");
        assert!(q.to_query().is_top());
    }

    #[test]
    fn interval_synthesis_examples() {
        let e = parse_example_set(EXAMPLE_1).unwrap();
        let q = interval_exists(&e).unwrap().expect("an interval separator exists");
        assert!(q.is_interval());
        assert!(separates(&q.to_query(), &e).is_separator);

        let same = parse_example_set("positive:\n{A} {B}\nnegative:\n{A} {B}\n").unwrap();
        assert_eq!(interval_exists(&same).unwrap(), None);

        let e = hasse_example();
        let q = interval_exists(&e).unwrap().expect("anchored window separates");
        assert_eq!(q.to_string(), "F(A & B)");
    }

    #[test]
    fn find_separator_per_class() {
        let e = parse_example_set(EXAMPLE_1).unwrap();
        assert_eq!(find_separator(&e, QueryClass::QpD).unwrap(), None);
        let q = find_separator(&e, QueryClass::QpNd).unwrap().expect("separable");
        assert!(separates(&q.to_query(), &e).is_separator);
        let e2 = incomparable_example();
        let q = find_separator(&e2, QueryClass::QD).unwrap().expect("separable");
        assert!(separates(&q.to_query(), &e2).is_separator);
    }
}
