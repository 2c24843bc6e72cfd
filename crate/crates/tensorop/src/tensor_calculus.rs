//! Coproduct trees for `A ⊔ B`, the map to abelian monoidal words, and a
//! bounded rewriting closure that computes low-arity carriers of `A ⊗ B`.
//!
//! A term is a planar tree whose nodes carry an element of `A` or of `B`.
//! Both operads are reduced, so their nullary elements are identified and
//! written as a shared stump. Normal forms alternate sides along every edge,
//! contain no stumps below a node, no unit-labelled unary nodes, and list
//! children by increasing least input.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::monoidal_words::{self, Word};
use crate::operad_core::{unary_monoid, FiniteMonoid, SetOperad};
use crate::par;

/// Largest arity accepted by [`bounded_tensor_classes`].
pub const MAX_CLOSURE_ARITY: usize = 3;
/// Largest node bound accepted by [`bounded_tensor_classes`].
pub const MAX_NODE_BOUND: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }

    /// The monoidal operation this side is read as under `ε`.
    pub fn word_op(self) -> u8 {
        match self {
            Side::A => 1,
            Side::B => 2,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A tree term over the coproduct of two operads.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoproductTerm {
    Input(u32),
    Stump,
    /// A node with at least one child; a childless node is written as [`CoproductTerm::Stump`].
    Node(Side, u32, Vec<CoproductTerm>),
}

use CoproductTerm::{Input, Node, Stump};

impl CoproductTerm {
    pub fn unary(side: Side, x: u32, child: CoproductTerm) -> Self {
        Node(side, x, vec![child])
    }

    /// The corolla on inputs `1..=n`.
    pub fn corolla(side: Side, x: u32, n: usize) -> Self {
        Node(side, x, (1..=n as u32).map(Input).collect())
    }

    /// Number of nodes, counting stumps.
    pub fn nodes(&self) -> usize {
        match self {
            Input(_) => 0,
            Stump => 1,
            Node(_, _, ch) => 1 + ch.iter().map(CoproductTerm::nodes).sum::<usize>(),
        }
    }

    pub fn inputs(&self) -> Vec<u32> {
        match self {
            Input(i) => vec![*i],
            Stump => Vec::new(),
            Node(_, _, ch) => ch.iter().flat_map(CoproductTerm::inputs).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.inputs().len()
    }

    fn min_input(&self) -> u32 {
        self.inputs().into_iter().min().unwrap_or(u32::MAX)
    }

    fn substitute_input(&self, label: u32, with: &CoproductTerm) -> CoproductTerm {
        match self {
            Input(i) if *i == label => with.clone(),
            Node(s, x, ch) => Node(*s, *x, ch.iter().map(|c| c.substitute_input(label, with)).collect()),
            other => other.clone(),
        }
    }

    /// The subterm at a path of child indices.
    pub fn at(&self, path: &[usize]) -> Option<&CoproductTerm> {
        match (path.split_first(), self) {
            (None, t) => Some(t),
            (Some((&i, rest)), Node(_, _, ch)) => ch.get(i)?.at(rest),
            _ => None,
        }
    }

    fn replace_at(&self, path: &[usize], with: CoproductTerm) -> CoproductTerm {
        match (path.split_first(), self) {
            (None, _) => with,
            (Some((&i, rest)), Node(s, x, ch)) => {
                let mut ch = ch.clone();
                ch[i] = ch[i].replace_at(rest, with);
                Node(*s, *x, ch)
            }
            _ => self.clone(),
        }
    }
}

/// Builds an interchange pattern and its transpose.
///
/// `grid[i][j]` is the branch `T_{ij}`: the first term is
/// `α(β(T_11..T_1l), …, β(T_k1..T_kl))` with `α` on `side`, the second is
/// `β(α(T_11..T_k1), …, α(T_1l..T_kl))`.
pub fn interchange_pair(
    side: Side,
    alpha: u32,
    beta: u32,
    grid: &[Vec<CoproductTerm>],
) -> (CoproductTerm, CoproductTerm) {
    let k = grid.len();
    let l = grid.first().map_or(0, Vec::len);
    let lhs = Node(side, alpha, grid.iter().map(|row| Node(side.other(), beta, row.clone())).collect());
    let rhs = Node(
        side.other(),
        beta,
        (0..l).map(|j| Node(side, alpha, (0..k).map(|i| grid[i][j].clone()).collect())).collect(),
    );
    (lhs, rhs)
}

/// The coproduct of two finite reduced operads.
#[derive(Debug, Clone, Copy)]
pub struct Coproduct<'a> {
    a: &'a SetOperad,
    b: &'a SetOperad,
}

impl<'a> Coproduct<'a> {
    pub fn new(a: &'a SetOperad, b: &'a SetOperad) -> Self {
        Coproduct { a, b }
    }

    pub fn operad(&self, side: Side) -> &'a SetOperad {
        match side {
            Side::A => self.a,
            Side::B => self.b,
        }
    }

    /// Normal form: absorbs stumps, composes adjacent same-side nodes,
    /// removes unit nodes and sorts children by least input.
    pub fn normalize(&self, t: &CoproductTerm) -> Result<CoproductTerm> {
        let (side, x, ch) = match t {
            Node(s, x, ch) => (*s, *x, ch),
            other => return Ok(other.clone()),
        };
        if ch.is_empty() {
            return Ok(Stump);
        }
        let op = self.operad(side);
        let mut label = x;
        let mut kids: Vec<CoproductTerm> = ch.iter().map(|c| self.normalize(c)).collect::<Result<_>>()?;
        for j in (0..kids.len()).rev() {
            if kids[j] == Stump {
                label = op.compose_partial(kids.len(), label, j + 1, 0, 0)?;
                kids.remove(j);
            }
        }
        if kids.is_empty() {
            return Ok(Stump);
        }
        for j in (0..kids.len()).rev() {
            if let Node(s2, y, g) = &kids[j] {
                if *s2 == side {
                    let (y, g) = (*y, g.clone());
                    label = op.compose_partial(kids.len(), label, j + 1, g.len(), y)?;
                    kids.splice(j..=j, g);
                }
            }
        }
        if kids.len() == 1 && label == op.unit() {
            return Ok(kids.pop().expect("one child"));
        }
        let mut order: Vec<usize> = (0..kids.len()).collect();
        order.sort_by_key(|&j| kids[j].min_input());
        let mut sigma = vec![0; kids.len()];
        for (pos, &j) in order.iter().enumerate() {
            sigma[j] = pos;
        }
        let label = op.act(kids.len(), label, &sigma);
        Ok(Node(side, label, order.into_iter().map(|j| kids[j].clone()).collect()))
    }

    /// Reads a term as an abelian monoidal word: stumps become the unit,
    /// nodes with one input disappear, `A` nodes become `⊠_1` and `B` nodes `⊠_2`.
    pub fn epsilon(&self, t: &CoproductTerm) -> Word {
        fn raw(t: &CoproductTerm) -> Word {
            match t {
                Input(i) => Word::Gen(*i),
                Stump => Word::Unit,
                Node(s, _, ch) => Word::Op(s.word_op(), ch.iter().map(raw).collect()),
            }
        }
        monoidal_words::abelianize(&raw(t))
    }

    /// Canonical representative under unary interchanges: unary `B` nodes are
    /// pushed above `A` nodes and unary `A` nodes above multi-ary `B` nodes.
    pub fn unary_normalize(&self, t: &CoproductTerm) -> Result<CoproductTerm> {
        fn push(t: &CoproductTerm) -> Option<CoproductTerm> {
            if let Node(s, x, ch) = t {
                if ch.len() == 1 {
                    if let Node(s2, y, g) = &ch[0] {
                        let applies = match s {
                            Side::B => *s2 == Side::A,
                            Side::A => *s2 == Side::B && g.len() >= 2,
                        };
                        if applies {
                            return Some(Node(*s2, *y, g.iter().map(|c| Node(*s, *x, vec![c.clone()])).collect()));
                        }
                    }
                }
                for (i, c) in ch.iter().enumerate() {
                    if let Some(new) = push(c) {
                        let mut ch = ch.clone();
                        ch[i] = new;
                        return Some(Node(*s, *x, ch));
                    }
                }
            }
            None
        }
        let mut cur = self.normalize(t)?;
        while let Some(next) = push(&cur) {
            cur = self.normalize(&next)?;
        }
        Ok(cur)
    }

    /// Applies a `(k,l)`-interchange at the node reached by `path`. The node
    /// must have `k` children all labelled by the same element of the other side.
    pub fn interchange_step(&self, t: &CoproductTerm, path: &[usize]) -> Result<CoproductTerm> {
        let node = t.at(path).ok_or_else(|| Error::PatternMismatch("no node at path".into()))?;
        let Node(side, alpha, kids) = node else {
            return Err(Error::PatternMismatch("position is not a node".into()));
        };
        let mut beta = None;
        let mut grid = Vec::new();
        for kid in kids {
            match kid {
                Node(s2, b, row) if *s2 != *side && beta.is_none_or(|bb| bb == (*b, row.len())) => {
                    beta = Some((*b, row.len()));
                    grid.push(row.clone());
                }
                _ => return Err(Error::PatternMismatch("children are not equal nodes of the other side".into())),
            }
        }
        let (b, _) = beta.ok_or_else(|| Error::PatternMismatch("node has no children".into()))?;
        let (_, rhs) = interchange_pair(*side, *alpha, b, &grid);
        Ok(t.replace_at(path, rhs))
    }

    /// Serialization `A:name(child,…)`, `B:name(…)`, stumps `0`.
    pub fn render(&self, t: &CoproductTerm) -> String {
        match t {
            Input(i) => i.to_string(),
            Stump => "0".into(),
            Node(s, x, ch) => {
                let parts: Vec<String> = ch.iter().map(|c| self.render(c)).collect();
                format!("{s}:{}({})", self.operad(*s).element_name(ch.len(), *x), parts.join(","))
            }
        }
    }
}

/// Set partitions of `labels` with blocks ordered by least element.
pub(crate) fn set_partitions(labels: &[u32]) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    fn go(labels: &[u32], i: usize, cur: &mut Vec<Vec<u32>>, out: &mut Vec<Vec<Vec<u32>>>) {
        if i == labels.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(labels[i]);
            go(labels, i + 1, cur, out);
            cur[b].pop();
        }
        cur.push(vec![labels[i]]);
        go(labels, i + 1, cur, out);
        cur.pop();
    }
    let mut sorted = labels.to_vec();
    sorted.sort_unstable();
    go(&sorted, 0, &mut Vec::new(), &mut out);
    out
}

type Listing = Rc<Vec<(usize, CoproductTerm)>>;

/// Memoized enumeration of normal forms by input set, forbidden root side and node budget.
struct NormalForms<'a> {
    cp: Coproduct<'a>,
    cache: HashMap<(Vec<u32>, Option<Side>, usize), Listing>,
}

impl<'a> NormalForms<'a> {
    fn new(cp: Coproduct<'a>) -> Self {
        NormalForms { cp, cache: HashMap::new() }
    }

    fn list(&mut self, labels: &[u32], forbid: Option<Side>, budget: usize) -> Listing {
        let key = (labels.to_vec(), forbid, budget);
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        let mut out = Vec::new();
        if labels.len() == 1 {
            out.push((0, Input(labels[0])));
        }
        if budget >= 1 && !labels.is_empty() {
            for side in [Side::A, Side::B] {
                if forbid == Some(side) {
                    continue;
                }
                let op = self.cp.operad(side);
                for blocks in set_partitions(labels) {
                    let k = blocks.len();
                    if k > op.cap() {
                        continue;
                    }
                    let choices: Vec<Listing> = blocks.iter().map(|b| self.list(b, Some(side), budget - 1)).collect();
                    let mut combos = Vec::new();
                    product(&choices, budget - 1, &mut Vec::new(), 0, &mut combos);
                    for (used, kids) in combos {
                        for x in 0..op.size(k) as u32 {
                            if k == 1 && x == op.unit() {
                                continue;
                            }
                            out.push((used + 1, Node(side, x, kids.clone())));
                        }
                    }
                }
            }
        }
        let rc = Rc::new(out);
        self.cache.insert(key, rc.clone());
        rc
    }
}

/// All choices of one entry per listing with total size at most `budget`.
fn product(
    choices: &[Listing],
    budget: usize,
    cur: &mut Vec<CoproductTerm>,
    used: usize,
    out: &mut Vec<(usize, Vec<CoproductTerm>)>,
) {
    let i = cur.len();
    if i == choices.len() {
        out.push((used, cur.clone()));
        return;
    }
    for (n, t) in choices[i].iter() {
        if used + n <= budget {
            cur.push(t.clone());
            product(choices, budget, cur, used + n, out);
            cur.pop();
        }
    }
}

/// One equivalence class found by the bounded closure.
#[derive(Debug, Clone, Serialize)]
pub struct TensorClass {
    /// Smallest member, rendered.
    pub representative: String,
    #[serde(skip)]
    pub term: CoproductTerm,
    pub members: usize,
    /// False when some relation leads from a member to a normal form beyond the node bound.
    pub stable: bool,
}

/// Result of [`bounded_tensor_classes`].
#[derive(Debug, Clone, Serialize)]
pub struct TensorClasses {
    pub arity: usize,
    pub node_bound: usize,
    pub universe: usize,
    pub relations: usize,
    pub classes: Vec<TensorClass>,
    #[serde(skip)]
    lookup: HashMap<CoproductTerm, usize>,
}

impl TensorClasses {
    pub fn count(&self) -> usize {
        self.classes.len()
    }

    pub fn stable_count(&self) -> usize {
        self.classes.iter().filter(|c| c.stable).count()
    }

    /// Index of the class containing a normal form, if it is in the universe.
    pub fn class_of(&self, cp: &Coproduct<'_>, t: &CoproductTerm) -> Result<Option<usize>> {
        let nf = cp.normalize(t)?;
        Ok(self.lookup.get(&nf).copied())
    }
}

/// Equivalence classes of arity-`n` normal forms with at most `node_bound`
/// nodes under all interchange relations in all contexts, where the raw
/// term exhibiting the relation has at most `node_bound` nodes.
pub fn bounded_tensor_classes(a: &SetOperad, b: &SetOperad, n: usize, node_bound: usize) -> Result<TensorClasses> {
    if n > MAX_CLOSURE_ARITY {
        return Err(Error::Bound { what: "arity", value: n, max: MAX_CLOSURE_ARITY });
    }
    if node_bound > MAX_NODE_BOUND {
        return Err(Error::Bound { what: "node bound", value: node_bound, max: MAX_NODE_BOUND });
    }
    let cp = Coproduct::new(a, b);
    if n == 0 {
        let lookup = HashMap::from([(Stump, 0)]);
        return Ok(TensorClasses {
            arity: 0,
            node_bound,
            universe: 1,
            relations: 0,
            classes: vec![TensorClass { representative: "0".into(), term: Stump, members: 1, stable: true }],
            lookup,
        });
    }
    let mut nf = NormalForms::new(cp);
    let all: Vec<u32> = (1..=n as u32).collect();
    let universe: Vec<CoproductTerm> = nf.list(&all, None, node_bound).iter().map(|(_, t)| t.clone()).collect();
    let index: HashMap<CoproductTerm, usize> = universe.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();

    // Jobs: a context with a hole (input 0) and the patterns for the inputs it lacks.
    let mut jobs: Vec<(CoproductTerm, usize, Rc<Vec<(usize, CoproductTerm, CoproductTerm)>>)> = Vec::new();
    for mask in 1u32..(1 << n) {
        let s: Vec<u32> = all.iter().copied().filter(|i| mask >> (i - 1) & 1 == 1).collect();
        let patterns = Rc::new(patterns_for(&cp, &mut nf, &s, node_bound));
        let min_pattern = patterns.iter().map(|p| p.0).min().unwrap_or(usize::MAX);
        if min_pattern > node_bound {
            continue;
        }
        let mut ctx_labels: Vec<u32> = vec![0];
        ctx_labels.extend(all.iter().copied().filter(|i| !s.contains(i)));
        for (used, ctx) in nf.list(&ctx_labels, None, node_bound - min_pattern).iter() {
            jobs.push((ctx.clone(), *used, patterns.clone()));
        }
    }
    // Rc is not Send; flatten jobs into owned work items grouped by pattern set.
    let mut pattern_sets: Vec<Vec<(usize, CoproductTerm, CoproductTerm)>> = Vec::new();
    let mut set_ids: HashMap<*const Vec<(usize, CoproductTerm, CoproductTerm)>, usize> = HashMap::new();
    let mut work: Vec<(CoproductTerm, usize, usize)> = Vec::new();
    for (ctx, used, pats) in &jobs {
        let id = *set_ids.entry(Rc::as_ptr(pats)).or_insert_with(|| {
            pattern_sets.push((**pats).clone());
            pattern_sets.len() - 1
        });
        work.push((ctx.clone(), *used, id));
    }
    drop(jobs);
    drop(nf);

    let edges: Vec<Result<(usize, Option<usize>)>> = par::flat_map(&work, |(ctx, used, id)| {
        let mut out = Vec::new();
        for (size, lhs, rhs) in &pattern_sets[*id] {
            if used + size > node_bound {
                continue;
            }
            let res = (|| -> Result<(usize, Option<usize>)> {
                let l = cp.normalize(&ctx.substitute_input(0, lhs))?;
                let r = cp.normalize(&ctx.substitute_input(0, rhs))?;
                let li =
                    *index.get(&l).ok_or_else(|| Error::Invalid(format!("{} escaped the universe", cp.render(&l))))?;
                Ok((li, index.get(&r).copied()))
            })();
            out.push(res);
        }
        out
    });

    let mut parent: Vec<usize> = (0..universe.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut escapes = Vec::new();
    let relations = edges.len();
    for e in edges {
        match e? {
            (l, Some(r)) => {
                let (a, b) = (find(&mut parent, l), find(&mut parent, r));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
            (l, None) => escapes.push(l),
        }
    }
    let mut unstable = BTreeSet::new();
    for l in escapes {
        unstable.insert(find(&mut parent, l));
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..universe.len() {
        groups.entry(find(&mut parent, i)).or_default().push(i);
    }
    let mut classes: Vec<(usize, TensorClass)> = groups
        .into_iter()
        .map(|(root, members)| {
            let best = members
                .iter()
                .map(|&i| (universe[i].nodes(), cp.render(&universe[i]), i))
                .min()
                .expect("nonempty class");
            (
                root,
                TensorClass {
                    representative: best.1,
                    term: universe[best.2].clone(),
                    members: members.len(),
                    stable: !unstable.contains(&root),
                },
            )
        })
        .collect();
    classes.sort_by(|x, y| (x.1.term.nodes(), &x.1.representative).cmp(&(y.1.term.nodes(), &y.1.representative)));
    let class_pos: HashMap<usize, usize> = classes.iter().enumerate().map(|(p, (root, _))| (*root, p)).collect();
    let lookup = universe.iter().enumerate().map(|(i, t)| (t.clone(), class_pos[&find(&mut parent, i)])).collect();
    Ok(TensorClasses {
        arity: n,
        node_bound,
        universe: universe.len(),
        relations,
        classes: classes.into_iter().map(|(_, c)| c).collect(),
        lookup,
    })
}

/// Interchange patterns on exactly the inputs `s`, with their raw sizes.
fn patterns_for(
    cp: &Coproduct<'_>,
    nf: &mut NormalForms<'_>,
    s: &[u32],
    node_bound: usize,
) -> Vec<(usize, CoproductTerm, CoproductTerm)> {
    let mut out = Vec::new();
    for side in [Side::A, Side::B] {
        let (oa, ob) = (cp.operad(side), cp.operad(side.other()));
        for k in 1..=oa.cap() {
            for l in 1..=ob.cap() {
                let slots = k * l;
                for blocks in set_partitions(s) {
                    if blocks.len() > slots {
                        continue;
                    }
                    let stumps = slots - blocks.len();
                    let fixed = 1 + k + stumps;
                    if fixed > node_bound {
                        continue;
                    }
                    let budget = node_bound - fixed;
                    let choices: Vec<Listing> = blocks.iter().map(|bl| nf.list(bl, None, budget)).collect();
                    let mut combos = Vec::new();
                    product(&choices, budget, &mut Vec::new(), 0, &mut combos);
                    for placement in injections(blocks.len(), slots) {
                        for (used, ts) in &combos {
                            let mut flat = vec![Stump; slots];
                            for (bi, &slot) in placement.iter().enumerate() {
                                flat[slot] = ts[bi].clone();
                            }
                            let grid: Vec<Vec<CoproductTerm>> = flat.chunks(l).map(<[_]>::to_vec).collect();
                            for alpha in 0..oa.size(k) as u32 {
                                if k == 1 && alpha == oa.unit() {
                                    continue;
                                }
                                for beta in 0..ob.size(l) as u32 {
                                    if l == 1 && beta == ob.unit() {
                                        continue;
                                    }
                                    let (lhs, rhs) = interchange_pair(side, alpha, beta, &grid);
                                    out.push((fixed + used, lhs, rhs));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Injective maps from `0..m` into `0..n`.
fn injections(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(m: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                go(m, n, cur, out);
                cur.pop();
            }
        }
    }
    go(m, n, &mut Vec::new(), &mut out);
    out
}

/// `(A ⊗ B)(1)` as the product monoid `A(1) × B(1)`.
pub fn tensor_unary_carrier(a: &SetOperad, b: &SetOperad) -> FiniteMonoid {
    unary_monoid(a).product(&unary_monoid(b))
}

/// `(A ⊗ B)(2)` as the pushout of `A(1)² × B(2)` and `A(2) × B(1)²` over
/// `A(2) × B(2)`, along `(α, β) ↦ (α∘(id,0), α∘(0,id), β)` and
/// `(α, β) ↦ (α, β∘(id,0), β∘(0,id))`.
#[derive(Debug, Clone, Serialize)]
pub struct BinaryCarrier {
    /// Triples `(a_1, a_2, β)`.
    pub left: Vec<(u32, u32, u32)>,
    /// Triples `(α, b_1, b_2)`.
    pub right: Vec<(u32, u32, u32)>,
    /// Class of each element of `left`, then of each element of `right`.
    pub class_of: Vec<usize>,
    pub size: usize,
}

impl BinaryCarrier {
    /// The tree `β(a_1(1), a_2(2))` for a left element.
    pub fn left_term(&self, idx: usize) -> CoproductTerm {
        let (a1, a2, beta) = self.left[idx];
        Node(Side::B, beta, vec![Node(Side::A, a1, vec![Input(1)]), Node(Side::A, a2, vec![Input(2)])])
    }

    /// The tree `α(b_1(1), b_2(2))` for a right element.
    pub fn right_term(&self, idx: usize) -> CoproductTerm {
        let (alpha, b1, b2) = self.right[idx];
        Node(Side::A, alpha, vec![Node(Side::B, b1, vec![Input(1)]), Node(Side::B, b2, vec![Input(2)])])
    }
}

pub fn tensor_binary_carrier(a: &SetOperad, b: &SetOperad) -> Result<BinaryCarrier> {
    let triples = |x: usize, y: usize, z: usize| -> Vec<(u32, u32, u32)> {
        let mut v = Vec::new();
        for i in 0..x as u32 {
            for j in 0..y as u32 {
                for k in 0..z as u32 {
                    v.push((i, j, k));
                }
            }
        }
        v
    };
    let left = triples(a.size(1), a.size(1), b.size(2));
    let right = triples(a.size(2), b.size(1), b.size(1));
    let lpos: HashMap<(u32, u32, u32), usize> = left.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let rpos: HashMap<(u32, u32, u32), usize> = right.iter().enumerate().map(|(i, t)| (*t, left.len() + i)).collect();
    let total = left.len() + right.len();
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for alpha in 0..a.size(2) as u32 {
        for beta in 0..b.size(2) as u32 {
            let f = (a.compose_partial(2, alpha, 2, 0, 0)?, a.compose_partial(2, alpha, 1, 0, 0)?, beta);
            let g = (alpha, b.compose_partial(2, beta, 2, 0, 0)?, b.compose_partial(2, beta, 1, 0, 0)?);
            let (x, y) = (find(&mut parent, lpos[&f]), find(&mut parent, rpos[&g]));
            if x != y {
                parent[x.max(y)] = x.min(y);
            }
        }
    }
    let mut ids = HashMap::new();
    let class_of: Vec<usize> = (0..total)
        .map(|i| {
            let r = find(&mut parent, i);
            let next = ids.len();
            *ids.entry(r).or_insert(next)
        })
        .collect();
    Ok(BinaryCarrier { left, right, size: ids.len(), class_of })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad_core::{ass, com, random_small_operad, ru_operad, two_level, FiniteMonoid};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pair() -> (SetOperad, SetOperad) {
        let m = FiniteMonoid::idempotent_pair();
        (ru_operad(&m, 3), two_level(&m, &m, &[0, 1], 3).unwrap())
    }

    #[test]
    fn normalization_absorbs_stumps_units_and_same_side_edges() {
        let (a, b) = (ass(3), com(3));
        let cp = Coproduct::new(&a, &b);
        let x12 = a.find(2, "12").unwrap();
        let x21 = a.find(2, "21").unwrap();
        // A:12(A:12(1,2),3) composes to A:123.
        let t = Node(Side::A, x12, vec![CoproductTerm::corolla(Side::A, x12, 2), Input(3)]);
        assert_eq!(cp.render(&cp.normalize(&t).unwrap()), "A:123(1,2,3)");
        // A stump input restricts the label.
        let t = Node(Side::A, x21, vec![Input(1), Stump]);
        assert_eq!(cp.normalize(&t).unwrap(), Input(1));
        // Children are sorted with the label adjusted.
        let t = Node(Side::A, x12, vec![Input(2), Input(1)]);
        assert_eq!(cp.render(&cp.normalize(&t).unwrap()), "A:21(1,2)");
        // All-stump nodes collapse.
        let t = Node(Side::B, 0, vec![Stump, Node(Side::A, x12, vec![Stump, Stump])]);
        assert_eq!(cp.normalize(&t).unwrap(), Stump);
    }

    #[test]
    fn normalization_is_idempotent_on_normal_forms() {
        let (a, b) = pair();
        let cp = Coproduct::new(&a, &b);
        let mut nf = NormalForms::new(cp);
        for (_, t) in nf.list(&[1, 2], None, 4).iter() {
            assert_eq!(&cp.normalize(t).unwrap(), t);
        }
    }

    #[test]
    fn epsilon_examples() {
        let (a, b) = (ass(3), com(3));
        let cp = Coproduct::new(&a, &b);
        let x12 = a.find(2, "12").unwrap();
        assert_eq!(cp.epsilon(&CoproductTerm::corolla(Side::A, x12, 2)).to_string(), "o1(1,2)");
        let (m, n) = pair();
        let cp2 = Coproduct::new(&m, &n);
        let t = Node(Side::A, 1, vec![Node(Side::B, 1, vec![Input(1)])]);
        assert_eq!(cp2.epsilon(&t), Word::Gen(1));
    }

    #[test]
    fn epsilon_is_an_operad_map_on_small_trees() {
        let (a, b) = pair();
        let cp = Coproduct::new(&a, &b);
        let mut nf = NormalForms::new(cp);
        let ts = nf.list(&[1, 2], None, 3);
        let ss = nf.list(&[1, 2], None, 3);
        for (_, t) in ts.iter() {
            for (_, s) in ss.iter() {
                for i in 1..=2u32 {
                    // Graft s at input i of t with order-preserving renumbering.
                    let shifted = relabel(s, &|j| j + i - 1);
                    let moved = relabel(t, &|j| if j > i { j + 1 } else { j });
                    let g = moved.substitute_input(i, &shifted);
                    let lhs = cp.epsilon(&g);
                    let rhs = monoidal_words::compose_words(
                        &cp.epsilon(t),
                        &(1..=2).map(|j| if j == i { cp.epsilon(s) } else { Word::Gen(1) }).collect::<Vec<_>>(),
                        true,
                    )
                    .unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    fn relabel(t: &CoproductTerm, f: &impl Fn(u32) -> u32) -> CoproductTerm {
        match t {
            Input(i) => Input(f(*i)),
            Node(s, x, ch) => Node(*s, *x, ch.iter().map(|c| relabel(c, f)).collect()),
            Stump => Stump,
        }
    }

    #[test]
    fn epsilon_is_invariant_under_unary_interchange() {
        let (a, b) = pair();
        let cp = Coproduct::new(&a, &b);
        let mut nf = NormalForms::new(cp);
        for labels in [vec![1], vec![1, 2], vec![1, 2, 3]] {
            for (_, t) in nf.list(&labels, None, 5).iter() {
                assert_eq!(cp.epsilon(&cp.unary_normalize(t).unwrap()), cp.epsilon(t));
            }
        }
    }

    #[test]
    fn interchanges_move_epsilon_up_the_interchange_order() {
        let a = ass(3);
        let cp = Coproduct::new(&a, &a);
        let mut nf = NormalForms::new(cp);
        for s in [vec![1], vec![1, 2], vec![1, 2, 3]] {
            for (_, lhs, rhs) in patterns_for(&cp, &mut nf, &s, 6) {
                let Node(side, ..) = lhs else { unreachable!() };
                let (lo, hi) = if side == Side::A { (&lhs, &rhs) } else { (&rhs, &lhs) };
                let (wl, wh) = (cp.epsilon(lo), cp.epsilon(hi));
                assert!(monoidal_words::leq_ab(&wl, &wh).unwrap(), "{wl} vs {wh}");
            }
        }
    }

    #[test]
    fn unary_normal_form_at_arity_two() {
        let (a, b) = pair();
        let cp = Coproduct::new(&a, &b);
        // b(α(1,2)) moves b above both inputs.
        let alpha = a.find(2, "1.b").unwrap();
        let t = Node(Side::B, 1, vec![CoproductTerm::corolla(Side::A, alpha, 2)]);
        let u = cp.unary_normalize(&t).unwrap();
        assert_eq!(cp.render(&u), "A:1.b(B:b(1),B:b(2))");
        assert_eq!(cp.unary_normalize(&u).unwrap(), u);
        // a(β(1,2)) moves a above the inputs and is absorbed there.
        let t = Node(Side::A, 1, vec![CoproductTerm::corolla(Side::B, 0, 2)]);
        let u = cp.unary_normalize(&t).unwrap();
        assert_eq!(cp.render(&u), "B:12(A:b(1),A:b(2))");
    }

    #[test]
    fn interchange_step_examples() {
        let a = ass(3);
        let cp = Coproduct::new(&a, &a);
        let x12 = a.find(2, "12").unwrap();
        // Eckmann–Hilton square: α(β(1,0),β(0,2)) ↦ β(α(1,0),α(0,2)).
        let t = Node(
            Side::A,
            x12,
            vec![Node(Side::B, x12, vec![Input(1), Stump]), Node(Side::B, x12, vec![Stump, Input(2)])],
        );
        let s = cp.interchange_step(&t, &[]).unwrap();
        assert_eq!(cp.render(&s), "B:12(A:12(1,0),A:12(0,2))");
        assert_eq!(cp.render(&cp.normalize(&t).unwrap()), "A:12(1,2)");
        assert_eq!(cp.render(&cp.normalize(&s).unwrap()), "B:12(1,2)");
        // The step at the transposed position undoes it.
        assert_eq!(cp.interchange_step(&s, &[]).unwrap(), t);
        // (k,1) form: β∘γ = γ∘β^l with a unary β.
        let (m, n) = pair();
        let cp2 = Coproduct::new(&m, &n);
        let g = Node(Side::A, 1, vec![Node(Side::B, 0, vec![Input(1), Input(2)])]);
        let moved = cp2.interchange_step(&g, &[]).unwrap();
        assert_eq!(cp2.render(&moved), "B:12(A:b(1),A:b(2))");
        assert!(cp2.interchange_step(&CoproductTerm::corolla(Side::A, 0, 2), &[]).is_err());
    }

    #[test]
    fn ass_with_ass_has_one_binary_class() {
        let a = ass(3);
        let r = bounded_tensor_classes(&a, &a, 2, 6).unwrap();
        assert_eq!(r.count(), 1);
        assert_eq!(tensor_binary_carrier(&a, &a).unwrap().size, 1);
        let c = com(3);
        assert_eq!(bounded_tensor_classes(&c, &c, 2, 6).unwrap().count(), 1);
        assert_eq!(tensor_binary_carrier(&c, &c).unwrap().size, 1);
    }

    #[test]
    fn unary_carrier_is_the_product() {
        let (a, b) = pair();
        let u = tensor_unary_carrier(&a, &b);
        assert_eq!(u.len(), 4);
        let r = bounded_tensor_classes(&a, &b, 1, 6).unwrap();
        assert_eq!(r.count(), 4);
        assert_eq!(r.stable_count(), 4);
        assert_eq!(tensor_unary_carrier(&ass(3), &com(3)).len(), 1);
    }

    #[test]
    fn binary_carrier_matches_closure_on_random_operads() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let a = random_small_operad(&mut rng, 3);
            let b = random_small_operad(&mut rng, 3);
            let closure = bounded_tensor_classes(&a, &b, 2, 5).unwrap();
            let push = tensor_binary_carrier(&a, &b).unwrap();
            assert_eq!(closure.count(), push.size, "{} ⊗ {}", a.name(), b.name());
        }
    }

    #[test]
    fn nullary_collapse() {
        let (a, b) = pair();
        let r = bounded_tensor_classes(&a, &b, 0, 6).unwrap();
        assert_eq!(r.count(), 1);
        assert!(bounded_tensor_classes(&a, &b, 4, 6).is_err());
        assert!(bounded_tensor_classes(&a, &b, 2, 9).is_err());
    }
}
