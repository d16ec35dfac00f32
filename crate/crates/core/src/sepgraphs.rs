//! Product graphs over an example set whose root-anchored paths read off
//! separators. Positive coordinates advance in lockstep through every
//! positive instance; negative coordinates greedily track the earliest
//! possible match in each negative instance, with `∞` marking negatives the
//! prefix can no longer satisfy. On top of the graph: separating-path
//! search, shortest/longest separators, the marking algorithm for the unique
//! most specific separator, and (in the `◇`-only world) the labelled-edge
//! graph deciding unique most general separators.

mod oprime;

pub use oprime::{build_oprime, unique_mgs_pdiamond, OPrimeGraph};

use crate::masks::{normalize_masked, AtomTable, Mask, MaskedPath};
use crate::model::{ExampleSet, PathQuery, TemporalOp};
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

/// Which temporal operators the extracted separators may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `◇` only: nodes are plain coordinate vectors.
    Diamond,
    /// `◯` and `◇`: nodes carry a window of length `t` matched by `◯`-runs.
    NextDiamond,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremalKind {
    Shortest,
    Longest,
}

/// A timestamp in a negative instance, or `None` once the prefix can no
/// longer be satisfied there.
pub type NegCoord = Option<usize>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct NodeKey {
    pos: Vec<usize>,
    t: usize,
    neg: Vec<NegCoord>,
}

#[derive(Clone, Debug)]
struct NodeData {
    pos: Vec<usize>,
    t: usize,
    neg: Vec<NegCoord>,
    /// `labels[u]` is the intersection of the positive letters at offset `u`.
    labels: Vec<Mask>,
}

/// A root-anchored path, as a sequence of node ids.
pub type SepPath = Vec<usize>;

pub struct ProductGraph {
    mode: Mode,
    table: AtomTable,
    neg_count: usize,
    nodes: Vec<NodeData>,
    succs: Vec<Vec<usize>>,
    preds: Vec<Vec<usize>>,
    roots: Vec<usize>,
}

const DEFAULT_NODE_CAP: usize = 100_000;

/// Builds the product graph for `E` in the given mode.
pub fn build_product(e: &ExampleSet, mode: Mode) -> Result<ProductGraph> {
    build_product_with_cap(e, mode, DEFAULT_NODE_CAP)
}

fn word_letter(word: &[Mask], i: usize) -> Mask {
    word.get(i).copied().unwrap_or(0)
}

/// Does the window embed into `word` starting at `m`, with positions past
/// the end carrying no atoms?
fn embeds(window: &[Mask], word: &[Mask], m: usize) -> bool {
    window.iter().enumerate().all(|(u, &l)| l & !word_letter(word, m + u) == 0)
}

pub fn build_product_with_cap(
    e: &ExampleSet,
    mode: Mode,
    node_cap: usize,
) -> Result<ProductGraph> {
    let table = AtomTable::new(&e.sig_bound());
    let pos_words: Vec<Vec<Mask>> = e.positives().iter().map(|d| table.instance(d)).collect();
    let neg_words: Vec<Vec<Mask>> = e.negatives().iter().map(|d| table.instance(d)).collect();
    let pos_max: Vec<usize> = e.positives().iter().map(|d| d.max_timestamp()).collect();
    let neg_max: Vec<usize> = e.negatives().iter().map(|d| d.max_timestamp()).collect();

    let window_of = |pos: &[usize], t: usize| -> Vec<Mask> {
        (0..=t)
            .map(|u| pos_words.iter().zip(pos).fold(table.full(), |acc, (w, &n)| acc & w[n + u]))
            .collect()
    };
    let max_window = |pos: &[usize]| -> usize {
        match mode {
            Mode::Diamond => 0,
            Mode::NextDiamond => {
                pos.iter().zip(&pos_max).map(|(&n, &m)| m - n).min().unwrap_or(0)
            }
        }
    };

    let mut nodes: Vec<NodeData> = Vec::new();
    let mut succs: Vec<Vec<usize>> = Vec::new();
    let mut ids: BTreeMap<NodeKey, usize> = BTreeMap::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut intern = |key: NodeKey,
                      labels: Vec<Mask>,
                      nodes: &mut Vec<NodeData>,
                      succs: &mut Vec<Vec<usize>>,
                      queue: &mut VecDeque<usize>|
     -> Result<usize> {
        if let Some(&id) = ids.get(&key) {
            return Ok(id);
        }
        let id = nodes.len();
        if id >= node_cap {
            return Err(Error::BudgetExceeded(format!("product graph exceeds {node_cap} nodes")));
        }
        ids.insert(key.clone(), id);
        nodes.push(NodeData { pos: key.pos, t: key.t, neg: key.neg, labels });
        succs.push(Vec::new());
        queue.push_back(id);
        Ok(id)
    };

    // roots: the all-zero positive vector with every window length it admits
    let zero = vec![0usize; pos_words.len()];
    let mut roots = Vec::new();
    for t in 0..=max_window(&zero) {
        let labels = window_of(&zero, t);
        let neg: Vec<NegCoord> = neg_words
            .iter()
            .map(|w| if embeds(&labels, w, 0) { Some(0) } else { None })
            .collect();
        let id = intern(
            NodeKey { pos: zero.clone(), t, neg },
            labels,
            &mut nodes,
            &mut succs,
            &mut queue,
        )?;
        roots.push(id);
    }

    while let Some(u) = queue.pop_front() {
        let (u_pos, u_t, u_neg) = (nodes[u].pos.clone(), nodes[u].t, nodes[u].neg.clone());
        // successor positive vectors in lexicographic order
        let lows: Vec<usize> = u_pos.iter().map(|&n| n + u_t + 1).collect();
        if lows.iter().zip(&pos_max).any(|(&lo, &hi)| lo > hi) {
            continue;
        }
        let mut cur = lows.clone();
        'combos: loop {
            for t in 0..=max_window(&cur) {
                let labels = window_of(&cur, t);
                let neg: Vec<NegCoord> = u_neg
                    .iter()
                    .zip(&neg_words)
                    .zip(&neg_max)
                    .map(|((&m, w), &hi)| {
                        let m = m?;
                        (m + u_t + 1..=hi).find(|&c| embeds(&labels, w, c))
                    })
                    .collect();
                let v = intern(
                    NodeKey { pos: cur.clone(), t, neg },
                    labels,
                    &mut nodes,
                    &mut succs,
                    &mut queue,
                )?;
                succs[u].push(v);
            }
            let mut k = cur.len();
            while k > 0 {
                k -= 1;
                if cur[k] < pos_max[k] {
                    cur[k] += 1;
                    for j in k + 1..cur.len() {
                        cur[j] = lows[j];
                    }
                    continue 'combos;
                }
            }
            break;
        }
    }

    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (u, vs) in succs.iter().enumerate() {
        for &v in vs {
            preds[v].push(u);
        }
    }
    for p in &mut preds {
        p.sort_unstable();
        p.dedup();
    }
    let neg_count = neg_words.len();
    Ok(ProductGraph { mode, table, neg_count, nodes, succs, preds, roots })
}

/// The matching automaton of a candidate query: which positions of the
/// candidate can host the next position of a path query read left to right.
/// A state is the set of candidate positions hosting the position read last.
struct CandAutomaton {
    labels: Vec<Mask>,
    is_next: Vec<bool>,
}

impl CandAutomaton {
    fn new(q: &MaskedPath) -> CandAutomaton {
        let mut labels = vec![q.rho0];
        let mut is_next = vec![false];
        for &(op, m) in &q.steps {
            labels.push(m);
            is_next.push(op == TemporalOp::Next);
        }
        CandAutomaton { labels, is_next }
    }

    fn start(&self, rho0: Mask) -> u64 {
        if rho0 & !self.labels[0] == 0 {
            1
        } else {
            0
        }
    }

    /// Reading a `◇`-step labelled `x`: any later position whose label
    /// contains `x`.
    fn step_e(&self, s: u64, x: Mask) -> u64 {
        if s == 0 {
            return 0;
        }
        let lo = s.trailing_zeros() as usize;
        let mut out = 0u64;
        for (j, &l) in self.labels.iter().enumerate().skip(lo + 1) {
            if x & !l == 0 {
                out |= 1 << j;
            }
        }
        out
    }

    /// Reading a `◯`-step labelled `x`: the adjacent position, which must
    /// itself be entered by `◯`.
    fn step_n(&self, s: u64, x: Mask) -> u64 {
        let mut out = 0u64;
        for j in 1..self.labels.len() {
            if self.is_next[j] && s & (1 << (j - 1)) != 0 && x & !self.labels[j] == 0 {
                out |= 1 << j;
            }
        }
        out
    }

    fn accepts(&self, s: u64) -> bool {
        s != 0
    }
}

/// Matching state while walking a path node by node: the set of feasible
/// host positions, plus the count of trailing `⊤` positions whose operators
/// are only known once the path continues (they normalize to `◇`s) or ends
/// (they are dropped).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct WalkState {
    pending: usize,
    s: u64,
}

impl ProductGraph {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn successors(&self, id: usize) -> &[usize] {
        &self.succs[id]
    }

    /// A node ends a separating path when every negative is dead and the
    /// final window position carries at least one atom. Without negatives
    /// the truth constant also separates; the windowless root reads it off.
    pub fn is_separating_node(&self, id: usize) -> bool {
        let n = &self.nodes[id];
        if !n.neg.iter().all(|m| m.is_none()) {
            return false;
        }
        if *n.labels.last().unwrap() != 0 {
            return true;
        }
        self.neg_count == 0 && n.t == 0 && n.pos.iter().all(|&x| x == 0)
    }

    /// The raw label sequence of a root-anchored path: window offsets joined
    /// by `◯`, nodes joined by `◇`.
    fn raw_query(&self, path: &[usize]) -> MaskedPath {
        let mut steps = Vec::new();
        let first = &self.nodes[path[0]];
        let rho0 = first.labels[0];
        for &l in &first.labels[1..] {
            steps.push((TemporalOp::Next, l));
        }
        for &id in &path[1..] {
            let node = &self.nodes[id];
            steps.push((TemporalOp::Eventually, node.labels[0]));
            for &l in &node.labels[1..] {
                steps.push((TemporalOp::Next, l));
            }
        }
        MaskedPath { rho0, steps }
    }

    /// The query a root-anchored path reads off, in normal form.
    pub fn path_query(&self, path: &[usize]) -> PathQuery {
        normalize_masked(&self.raw_query(path)).decompile(&self.table)
    }

    /// The form paths are compared in: labels as read off the nodes, with
    /// every operator run linked through `⊤` positions made uniform (`◇`
    /// wins a mixed run) and trailing `⊤` positions kept as `◇`-steps.
    /// Keeping the trailing positions makes the comparison stable under
    /// extending both paths by the same node, which the marking relies on.
    fn matching_form(&self, path: &[usize]) -> MaskedPath {
        let raw = self.raw_query(path);
        let mut steps = raw.steps;
        let mut i = 0;
        while i < steps.len() {
            if steps[i].1 != 0 {
                i += 1;
                continue;
            }
            let mut j = i;
            while j < steps.len() && steps[j].1 == 0 {
                j += 1;
            }
            let trailing = j == steps.len();
            let end = if trailing { j - 1 } else { j };
            if trailing || steps[i..=end].iter().any(|&(op, _)| op == TemporalOp::Eventually) {
                for s in &mut steps[i..=end] {
                    s.0 = TemporalOp::Eventually;
                }
            }
            i = end + 1;
        }
        MaskedPath { rho0: raw.rho0, steps }
    }

    /// Some separating path, or `None` when the example set has no separator
    /// in this mode; breadth-first, so the returned path is deterministic.
    pub fn separating_path(&self) -> Option<SepPath> {
        let mut parent: Vec<Option<usize>> = vec![None; self.nodes.len()];
        let mut seen = vec![false; self.nodes.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &r in &self.roots {
            seen[r] = true;
            queue.push_back(r);
        }
        let mut found = None;
        'search: while let Some(u) = queue.pop_front() {
            if self.is_separating_node(u) {
                found = Some(u);
                break 'search;
            }
            for &v in &self.succs[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        let mut at = found?;
        let mut path = vec![at];
        while let Some(p) = parent[at] {
            path.push(p);
            at = p;
        }
        path.reverse();
        Some(path)
    }

    /// Node ids in an order compatible with the edges; the positive
    /// coordinate sum strictly increases along every edge.
    fn topo_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by_key(|&id| (self.nodes[id].pos.iter().sum::<usize>(), id));
        order
    }

    /// A separator of minimal/maximal temporal depth, when one exists. The
    /// depth of a path is the number of `◇`-joints plus the window lengths,
    /// which normalization preserves for separating paths.
    pub fn extremal_length(&self, kind: ExtremalKind) -> Option<PathQuery> {
        let n = self.nodes.len();
        let mut dist: Vec<Option<usize>> = vec![None; n];
        let better = |a: usize, b: usize| match kind {
            ExtremalKind::Shortest => a < b,
            ExtremalKind::Longest => a > b,
        };
        for &v in &self.topo_order() {
            let mut best: Option<usize> = if self.roots.contains(&v) {
                Some(self.nodes[v].t)
            } else {
                None
            };
            for &u in &self.preds[v] {
                if let Some(du) = dist[u] {
                    let cand = du + 1 + self.nodes[v].t;
                    if best.is_none() || better(cand, best.unwrap()) {
                        best = Some(cand);
                    }
                }
            }
            dist[v] = best;
        }
        let mut target: Option<usize> = None;
        for id in 0..n {
            if self.is_separating_node(id) && dist[id].is_some() {
                if target.is_none_or(|t| better(dist[id].unwrap(), dist[t].unwrap())) {
                    target = Some(id);
                }
            }
        }
        let mut at = target?;
        let mut path = vec![at];
        while !(self.roots.contains(&at) && dist[at] == Some(self.nodes[at].t)) {
            let here = dist[at].unwrap();
            let prev = self.preds[at]
                .iter()
                .copied()
                .find(|&u| dist[u].is_some_and(|du| du + 1 + self.nodes[at].t == here))
                .expect("distance admits a predecessor");
            path.push(prev);
            at = prev;
        }
        path.reverse();
        Some(self.path_query(&path))
    }

    /// Walks one more node of a target path: deferred `⊤` positions and the
    /// window's leading `⊤`s normalize to `◇`-steps, interior positions to
    /// `◯`-steps, trailing `⊤`s are deferred.
    fn consume_edge(&self, aut: &CandAutomaton, st: WalkState, v: usize) -> WalkState {
        let w = &self.nodes[v].labels;
        let lead = w.iter().take_while(|&&m| m == 0).count();
        if lead == w.len() {
            return WalkState { pending: st.pending + w.len(), s: st.s };
        }
        let last_nz = w.iter().rposition(|&m| m != 0).unwrap();
        let mut s = st.s;
        for _ in 0..st.pending + lead {
            s = aut.step_e(s, 0);
        }
        s = aut.step_e(s, w[lead]);
        for &l in &w[lead + 1..=last_nz] {
            s = aut.step_n(s, l);
        }
        WalkState { pending: w.len() - 1 - last_nz, s }
    }

    fn consume_root(&self, aut: &CandAutomaton, r: usize) -> WalkState {
        let w = &self.nodes[r].labels;
        let mut s = aut.start(w[0]);
        match w[1..].iter().rposition(|&m| m != 0) {
            Some(last_nz) => {
                for &l in &w[1..=last_nz + 1] {
                    s = aut.step_n(s, l);
                }
                WalkState { pending: w.len() - 2 - last_nz, s }
            }
            None => WalkState { pending: w.len() - 1, s },
        }
    }

    /// Deferred trailing `⊤` positions of a finished path read as `◇`-steps.
    fn finish(aut: &CandAutomaton, st: WalkState) -> u64 {
        let mut s = st.s;
        for _ in 0..st.pending {
            s = aut.step_e(s, 0);
        }
        s
    }

    /// Does the query of `cand_path` entail the query of every root-anchored
    /// path ending at a node of `targets`? Subset exploration of the
    /// matching automaton over all paths; a target state with no feasible
    /// host position witnesses a non-entailed path.
    fn dominates_all_paths(&self, cand_path: &[usize], targets: &[usize]) -> bool {
        let cand = self.matching_form(cand_path);
        let aut = CandAutomaton::new(&cand);
        let is_target = {
            let mut v = vec![false; self.nodes.len()];
            for &t in targets {
                v[t] = true;
            }
            v
        };
        let mut states: Vec<BTreeSet<WalkState>> = vec![BTreeSet::new(); self.nodes.len()];
        let mut queue: VecDeque<(usize, WalkState)> = VecDeque::new();
        for &r in &self.roots {
            let st = self.consume_root(&aut, r);
            if is_target[r] && !aut.accepts(Self::finish(&aut, st)) {
                return false;
            }
            if states[r].insert(st) {
                queue.push_back((r, st));
            }
        }
        while let Some((u, st)) = queue.pop_front() {
            for &v in &self.succs[u] {
                let nst = self.consume_edge(&aut, st, v);
                if is_target[v] && !aut.accepts(Self::finish(&aut, nst)) {
                    return false;
                }
                if states[v].insert(nst) {
                    queue.push_back((v, nst));
                }
            }
        }
        true
    }

    /// The unique most specific separator in this mode, if one exists: marks
    /// each node with a path whose query entails the query of every path to
    /// the node, then returns a marked separating node whose mark entails
    /// every separating path.
    pub fn unique_mss(&self) -> Option<PathQuery> {
        let n = self.nodes.len();
        let mut marks: Vec<Option<SepPath>> = vec![None; n];
        for &v in &self.topo_order() {
            if self.roots.contains(&v) {
                marks[v] = Some(vec![v]);
                continue;
            }
            for &u in &self.preds[v] {
                let Some(mu) = marks[u].clone() else { continue };
                let mut cand = mu;
                cand.push(v);
                if self.dominates_all_paths(&cand, &[v]) {
                    marks[v] = Some(cand);
                    break;
                }
            }
        }
        let terminals: Vec<usize> =
            (0..n).filter(|&id| self.is_separating_node(id)).collect();
        if terminals.is_empty() {
            return None;
        }
        for &t in &terminals {
            if let Some(mark) = &marks[t] {
                if self.dominates_all_paths(mark, &terminals) {
                    return Some(self.path_query(mark));
                }
            }
        }
        None
    }

    /// Line-oriented description: one `node` line per node and one `edge`
    /// line per edge, in id order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (id, node) in self.nodes.iter().enumerate() {
            let pos = node.pos.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",");
            let neg = node
                .neg
                .iter()
                .map(|m| m.map_or("inf".to_string(), |v| v.to_string()))
                .collect::<Vec<_>>()
                .join(",");
            let label = node
                .labels
                .iter()
                .map(|&m| format!("{{{}}}", fmt_mask(&self.table, m)))
                .collect::<String>();
            match self.mode {
                Mode::Diamond => {
                    writeln!(out, "node {id} coords=({pos}|{neg}) label={label}").unwrap()
                }
                Mode::NextDiamond => writeln!(
                    out,
                    "node {id} coords=({pos})^{t}|({neg}) label={label}",
                    t = node.t
                )
                .unwrap(),
            }
        }
        for (u, vs) in self.succs.iter().enumerate() {
            for &v in vs {
                writeln!(out, "edge {u} {v}").unwrap();
            }
        }
        out
    }

}

fn fmt_mask(table: &AtomTable, m: Mask) -> String {
    table
        .set_of(m)
        .iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_example_set;

    /// Two positives and three negatives whose product graph has exactly two
    /// separating paths.
    fn running_example() -> ExampleSet {
        parse_example_set(
            "positive:\n{A} {C,D} {B}\n{A} {C} {B,D}\nnegative:\n{A} {C}\n{A} {D}\n{B}\n",
        )
        .unwrap()
    }

    const EXAMPLE_1: &str =
        "positive:\n{} {A} {B} {C}\n{} {} {A} {B} {C}\nnegative:\n{} {A} {B} {} {C}\n";

    fn all_separating_paths(g: &ProductGraph) -> Vec<SepPath> {
        let mut out = Vec::new();
        let mut stack: Vec<SepPath> = g.roots().iter().map(|&r| vec![r]).collect();
        stack.reverse();
        while let Some(path) = stack.pop() {
            let last = *path.last().unwrap();
            if g.is_separating_node(last) {
                out.push(path.clone());
            }
            for &v in g.successors(last).iter().rev() {
                let mut next = path.clone();
                next.push(v);
                stack.push(next);
            }
        }
        out
    }

    #[test]
    fn diamond_product_structure() {
        let g = build_product(&running_example(), Mode::Diamond).unwrap();
        let dump = g.dump();
        assert!(dump.contains("node 0 coords=(0,0|0,0,inf) label={A}"));
        assert!(dump.contains("node 1 coords=(1,1|1,inf,inf) label={C}"));
        assert!(dump.contains("node 2 coords=(1,2|inf,1,inf) label={D}"));
        assert!(dump.contains("node 3 coords=(2,1|1,1,inf) label={}"));
        assert!(dump.contains("node 4 coords=(2,2|inf,inf,inf) label={B}"));
        assert_eq!(g.successors(0), &[1, 2, 3, 4]);
    }

    #[test]
    fn exactly_two_separating_paths() {
        let g = build_product(&running_example(), Mode::Diamond).unwrap();
        let qs: Vec<String> = all_separating_paths(&g)
            .iter()
            .map(|p| g.path_query(p).to_string())
            .collect();
        let got: std::collections::BTreeSet<String> = qs.into_iter().collect();
        let want: std::collections::BTreeSet<String> =
            ["A & F B", "A & F(C & F B)"].into_iter().map(String::from).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn unique_most_specific_of_running_example() {
        let g = build_product(&running_example(), Mode::Diamond).unwrap();
        assert_eq!(g.unique_mss().unwrap().to_string(), "A & F(C & F B)");
    }

    #[test]
    fn extremal_lengths_of_running_example() {
        let g = build_product(&running_example(), Mode::Diamond).unwrap();
        let shortest = g.extremal_length(ExtremalKind::Shortest).unwrap();
        assert_eq!(shortest.tdp(), 1);
        assert_eq!(shortest.to_string(), "A & F B");
        let longest = g.extremal_length(ExtremalKind::Longest).unwrap();
        assert_eq!(longest.tdp(), 2);
        assert_eq!(longest.to_string(), "A & F(C & F B)");
    }

    #[test]
    fn depth_zero_shortest_separator() {
        let e = parse_example_set("positive:\n{B,C} {A}\nnegative:\n{B}\n{C}\n{} {A}\n").unwrap();
        let g = build_product(&e, Mode::Diamond).unwrap();
        let shortest = g.extremal_length(ExtremalKind::Shortest).unwrap();
        assert_eq!(shortest.tdp(), 0);
        assert_eq!(shortest.to_string(), "B & C");
    }

    #[test]
    fn single_point_positive_graph() {
        let e = parse_example_set("positive:\n{A}\n").unwrap();
        let g = build_product(&e, Mode::Diamond).unwrap();
        assert_eq!(g.node_count(), 1);
        assert!(g.dump().contains("node 0 coords=(0|) label={A}"));
        assert!(g.is_separating_node(0));
    }

    #[test]
    fn no_separating_path_when_sides_coincide() {
        let e = parse_example_set("positive:\n{A} {B}\nnegative:\n{A} {B}\n").unwrap();
        for mode in [Mode::Diamond, Mode::NextDiamond] {
            let g = build_product(&e, mode).unwrap();
            assert_eq!(g.separating_path(), None);
            assert_eq!(g.unique_mss(), None);
            assert_eq!(g.extremal_length(ExtremalKind::Shortest), None);
        }
    }

    #[test]
    fn windowed_mode_finds_the_explanation() {
        let e = parse_example_set(EXAMPLE_1).unwrap();
        let g = build_product(&e, Mode::NextDiamond).unwrap();
        let path = g.separating_path().expect("separable with next");
        assert!(crate::separation::separates(&g.path_query(&path).to_query(), &e).is_separator);
        assert_eq!(g.unique_mss().unwrap().to_string(), "F(A & X(B & X C))");
    }

    #[test]
    fn no_unique_most_specific_for_incomparable_separators() {
        let e = parse_example_set("positive:\n{} {A} {B}\n{} {B} {A}\nnegative:\n{C}\n").unwrap();
        let g = build_product(&e, Mode::Diamond).unwrap();
        assert_eq!(g.unique_mss(), None);
        assert!(g.separating_path().is_some());
    }

    #[test]
    fn node_cap_is_enforced() {
        let e = running_example();
        assert!(matches!(
            build_product_with_cap(&e, Mode::NextDiamond, 3),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
