//! Labelled trees with `0/1` edge labels over a set operad: reduction,
//! source and target, axial maps, maximal left factors and reconstruction
//! of trees from their axial images.
//!
//! The root edge and input edges are outer and always carry `1`. A stump is
//! a node without children. Trees are kept in a canonical nonplanar form:
//! children are ordered by least input, input-free children last, and the
//! node label is moved along by the symmetric group action.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::monoidal_words::{self, Word};
use crate::operad_core::{all_perms, SetOperad};

/// Operations a node-label operad must supply.
pub trait LabelOperad: Sync {
    type Label: Clone + Eq + Ord + Hash + fmt::Debug + Send + Sync;

    fn arity(&self, x: &Self::Label) -> usize;
    fn unit(&self) -> Self::Label;
    /// The unique nullary element.
    fn zero(&self) -> Self::Label;
    /// `x ∘_i y` with `i` one based.
    fn compose_partial(&self, x: &Self::Label, i: usize, y: &Self::Label) -> Result<Self::Label>;
    /// `σ·x` for a zero-based permutation.
    fn act(&self, x: &Self::Label, sigma: &[usize]) -> Self::Label;
    /// All elements of arity `n`.
    fn elements(&self, n: usize) -> Result<Vec<Self::Label>>;
    fn render(&self, x: &Self::Label) -> String;
    fn parse(&self, s: &str, arity: usize) -> Result<Self::Label>;
}

/// The operad of objects of the monoidal-word operad with `k` operations.
#[derive(Debug, Clone, Copy)]
pub struct WordOperad {
    pub k: u8,
}

impl LabelOperad for WordOperad {
    type Label = Word;

    fn arity(&self, x: &Word) -> usize {
        x.arity()
    }

    fn unit(&self) -> Word {
        Word::Gen(1)
    }

    fn zero(&self) -> Word {
        Word::Unit
    }

    fn compose_partial(&self, x: &Word, i: usize, y: &Word) -> Result<Word> {
        let n = x.arity();
        let betas: Vec<Word> = (1..=n).map(|j| if j == i { y.clone() } else { Word::Gen(1) }).collect();
        monoidal_words::compose_words(x, &betas, false)
    }

    fn act(&self, x: &Word, sigma: &[usize]) -> Word {
        x.relabel(&|g| sigma[g as usize - 1] as u32 + 1)
    }

    fn elements(&self, n: usize) -> Result<Vec<Word>> {
        monoidal_words::enumerate_words(self.k, &monoidal_words::gens(n), false)
    }

    fn render(&self, x: &Word) -> String {
        x.to_string()
    }

    fn parse(&self, s: &str, arity: usize) -> Result<Word> {
        let w = Word::parse(s, false)?;
        if w.arity() != arity || w.generators() != monoidal_words::gens(arity) {
            return Err(Error::Parse(format!("label {s} does not have arity {arity}")));
        }
        Ok(w)
    }
}

/// Labels of a tabulated operad are pairs `(arity, index)`.
impl LabelOperad for SetOperad {
    type Label = (usize, u32);

    fn arity(&self, x: &(usize, u32)) -> usize {
        x.0
    }

    fn unit(&self) -> (usize, u32) {
        (1, SetOperad::unit(self))
    }

    fn zero(&self) -> (usize, u32) {
        (0, 0)
    }

    fn compose_partial(&self, x: &(usize, u32), i: usize, y: &(usize, u32)) -> Result<(usize, u32)> {
        Ok((x.0 + y.0 - 1, SetOperad::compose_partial(self, x.0, x.1, i, y.0, y.1)?))
    }

    fn act(&self, x: &(usize, u32), sigma: &[usize]) -> (usize, u32) {
        (x.0, SetOperad::act(self, x.0, x.1, sigma))
    }

    fn elements(&self, n: usize) -> Result<Vec<(usize, u32)>> {
        if n > self.cap() {
            return Err(Error::Capacity(format!("arity {n} exceeds cap {}", self.cap())));
        }
        Ok((0..self.size(n) as u32).map(|x| (n, x)).collect())
    }

    fn render(&self, x: &(usize, u32)) -> String {
        self.element_name(x.0, x.1).to_string()
    }

    fn parse(&self, s: &str, arity: usize) -> Result<(usize, u32)> {
        self.find(arity, s).map(|x| (arity, x)).ok_or_else(|| Error::Parse(format!("unknown label {s}")))
    }
}

/// A labelled tree. Each child link carries its edge label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TTree<L> {
    Input(u32),
    Node(L, Vec<(u8, TTree<L>)>),
}

impl<L: Clone + Eq + Ord + Hash> TTree<L> {
    /// The trivial tree: a single edge.
    pub fn trivial() -> Self {
        TTree::Input(1)
    }

    pub fn inputs(&self) -> Vec<u32> {
        match self {
            TTree::Input(i) => vec![*i],
            TTree::Node(_, ch) => ch.iter().flat_map(|(_, c)| c.inputs()).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.inputs().len()
    }

    pub fn has_inputs(&self) -> bool {
        match self {
            TTree::Input(_) => true,
            TTree::Node(_, ch) => ch.iter().any(|(_, c)| c.has_inputs()),
        }
    }

    /// Number of nodes, stumps included.
    pub fn nodes(&self) -> usize {
        match self {
            TTree::Input(_) => 0,
            TTree::Node(_, ch) => 1 + ch.iter().map(|(_, c)| c.nodes()).sum::<usize>(),
        }
    }

    pub fn is_stump(&self) -> bool {
        matches!(self, TTree::Node(_, ch) if ch.is_empty())
    }

    fn min_input(&self) -> u32 {
        self.inputs().into_iter().min().unwrap_or(u32::MAX)
    }

    pub fn map_inputs(&self, f: &impl Fn(u32) -> u32) -> Self {
        match self {
            TTree::Input(i) => TTree::Input(f(*i)),
            TTree::Node(x, ch) => TTree::Node(x.clone(), ch.iter().map(|(e, c)| (*e, c.map_inputs(f))).collect()),
        }
    }

    fn all_edges(&self, label: u8) -> Self {
        match self {
            TTree::Input(i) => TTree::Input(*i),
            TTree::Node(x, ch) => TTree::Node(x.clone(), ch.iter().map(|(_, c)| (label, c.all_edges(label))).collect()),
        }
    }

    /// Input `i` becomes `with`; other inputs become stumps.
    fn keep_input(&self, i: u32, zero: &L) -> Self {
        match self {
            TTree::Input(j) if *j == i => TTree::Input(1),
            TTree::Input(_) => TTree::Node(zero.clone(), Vec::new()),
            TTree::Node(x, ch) => TTree::Node(x.clone(), ch.iter().map(|(e, c)| (*e, c.keep_input(i, zero))).collect()),
        }
    }
}

/// Tree operations over a label operad.
#[derive(Debug)]
pub struct Trees<'a, O: LabelOperad> {
    pub op: &'a O,
}

impl<O: LabelOperad> Clone for Trees<'_, O> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<O: LabelOperad> Copy for Trees<'_, O> {}

impl<'a, O: LabelOperad> Trees<'a, O> {
    pub fn new(op: &'a O) -> Self {
        Trees { op }
    }

    pub fn stump(&self) -> TTree<O::Label> {
        TTree::Node(self.op.zero(), Vec::new())
    }

    /// The corolla on inputs `1..=n` labelled `x`.
    pub fn corolla(&self, x: O::Label) -> TTree<O::Label> {
        let n = self.op.arity(&x) as u32;
        TTree::Node(x, (1..=n).map(|i| (1, TTree::Input(i))).collect())
    }

    /// Checks labels against child counts, input labels and outer edge labels.
    pub fn validate(&self, t: &TTree<O::Label>) -> Result<()> {
        fn go<O: LabelOperad>(op: &O, t: &TTree<O::Label>) -> Result<()> {
            if let TTree::Node(x, ch) = t {
                if op.arity(x) != ch.len() {
                    return Err(Error::Invalid("label arity does not match child count".into()));
                }
                for (e, c) in ch {
                    if *e > 1 || (matches!(c, TTree::Input(_)) && *e != 1) {
                        return Err(Error::Invalid("bad edge label".into()));
                    }
                    go(op, c)?;
                }
            }
            Ok(())
        }
        go(self.op, t)?;
        let mut ins = t.inputs();
        ins.sort_unstable();
        if ins != (1..=ins.len() as u32).collect::<Vec<_>>() {
            return Err(Error::Invalid("input labels are not a bijection onto 1..n".into()));
        }
        Ok(())
    }

    /// Canonical nonplanar form. Equal input-free siblings are permuted to
    /// make the label minimal.
    pub fn canonical(&self, t: &TTree<O::Label>) -> TTree<O::Label> {
        let TTree::Node(x, ch) = t else { return t.clone() };
        let kids: Vec<(u8, TTree<O::Label>)> = ch.iter().map(|(e, c)| (*e, self.canonical(c))).collect();
        let mut order: Vec<usize> = (0..kids.len()).collect();
        order.sort_by(|&a, &b| (kids[a].1.min_input(), &kids[a]).cmp(&(kids[b].1.min_input(), &kids[b])));
        let mut sigma = vec![0; kids.len()];
        for (pos, &j) in order.iter().enumerate() {
            sigma[j] = pos;
        }
        let sorted: Vec<(u8, TTree<O::Label>)> = order.iter().map(|&j| kids[j].clone()).collect();
        let mut label = self.op.act(x, &sigma);
        // Runs of equal siblings can be permuted freely.
        let mut start = 0;
        while start < sorted.len() {
            let mut end = start + 1;
            while end < sorted.len() && sorted[end] == sorted[start] {
                end += 1;
            }
            if end - start > 1 {
                let mut best = label.clone();
                for p in all_perms(end - start) {
                    let tau: Vec<usize> = (0..sorted.len())
                        .map(|q| if q >= start && q < end { start + p[q - start] } else { q })
                        .collect();
                    let cand = self.op.act(&label, &tau);
                    if cand < best {
                        best = cand;
                    }
                }
                label = best;
            }
            start = end;
        }
        TTree::Node(label, sorted)
    }

    /// Applies the identity and stump relations exhaustively, then canonicalizes.
    pub fn reduce(&self, t: &TTree<O::Label>) -> TTree<O::Label> {
        // Returns the reduced tree and the label of an edge absorbed from below.
        fn go<O: LabelOperad>(tr: &Trees<'_, O>, t: &TTree<O::Label>) -> (TTree<O::Label>, u8) {
            match t {
                TTree::Input(i) => (TTree::Input(*i), 1),
                TTree::Node(x, ch) => {
                    let mut kids = Vec::with_capacity(ch.len());
                    for (e, c) in ch {
                        let (rc, absorbed) = go(tr, c);
                        let edge = if matches!(rc, TTree::Input(_)) { 1 } else { (*e).max(absorbed) };
                        if edge == 1 && !rc.has_inputs() && !rc.is_stump() {
                            kids.push((1, tr.stump()));
                        } else {
                            kids.push((edge, rc));
                        }
                    }
                    if kids.len() == 1 && *x == tr.op.unit() {
                        let (e, c) = kids.pop().expect("one child");
                        return (c, e);
                    }
                    (TTree::Node(x.clone(), kids), 0)
                }
            }
        }
        let (mut r, _) = go(self, t);
        if !r.has_inputs() && !r.is_stump() {
            r = self.stump();
        }
        self.canonical(&r)
    }

    pub fn is_reduced(&self, t: &TTree<O::Label>) -> bool {
        &self.reduce(t) == t
    }

    /// Source (all edges relabelled `1`) and target (all `0` edges shrunk).
    pub fn boundary(&self, t: &TTree<O::Label>) -> Result<(TTree<O::Label>, TTree<O::Label>)> {
        let source = self.reduce(&t.all_edges(1));
        fn shrink<O: LabelOperad>(op: &O, t: &TTree<O::Label>) -> Result<TTree<O::Label>> {
            let TTree::Node(x, ch) = t else { return Ok(t.clone()) };
            let mut label = x.clone();
            let mut kids: Vec<(u8, TTree<O::Label>)> =
                ch.iter().map(|(e, c)| Ok((*e, shrink(op, c)?))).collect::<Result<_>>()?;
            for j in (0..kids.len()).rev() {
                if kids[j].0 == 0 {
                    if let TTree::Node(y, g) = kids[j].1.clone() {
                        label = op.compose_partial(&label, j + 1, &y)?;
                        kids.splice(j..=j, g);
                    }
                }
            }
            Ok(TTree::Node(label, kids))
        }
        let target = self.reduce(&shrink(self.op, t)?);
        Ok((source, target))
    }

    /// Grafts `s` onto input `i` of `t` along a new `1` edge.
    pub fn graft(&self, t: &TTree<O::Label>, i: u32, s: &TTree<O::Label>) -> Result<TTree<O::Label>> {
        let n = t.arity() as u32;
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i as usize, arity: n as usize });
        }
        let k = s.arity() as u32;
        let shifted = s.map_inputs(&|j| j + i - 1);
        fn go<L: Clone + Eq + Ord + Hash>(t: &TTree<L>, i: u32, k: u32, s: &TTree<L>) -> TTree<L> {
            match t {
                TTree::Input(j) if *j == i => s.clone(),
                TTree::Input(j) if *j > i => TTree::Input(j + k - 1),
                TTree::Input(j) => TTree::Input(*j),
                TTree::Node(x, ch) => TTree::Node(x.clone(), ch.iter().map(|(e, c)| (*e, go(c, i, k, s))).collect()),
            }
        }
        Ok(self.reduce(&go(t, i, k, &shifted)))
    }

    /// Product in the monoid of unary trees: `y` on top of `x`.
    pub fn compose_unary(&self, x: &TTree<O::Label>, y: &TTree<O::Label>) -> TTree<O::Label> {
        self.graft(x, 1, y).expect("unary trees have input 1")
    }

    /// The axial image: for each input, all other inputs capped by stumps.
    pub fn axial_image(&self, t: &TTree<O::Label>) -> Vec<TTree<O::Label>> {
        let zero = self.op.zero();
        (1..=t.arity() as u32).map(|i| self.reduce(&t.keep_input(i, &zero))).collect()
    }

    /// The unique reduced tree with the given axial image, if any.
    pub fn recover_from_axial(&self, tuple: &[TTree<O::Label>]) -> Option<TTree<O::Label>> {
        if tuple.iter().any(|t| t.arity() != 1) {
            return None;
        }
        let labelled: Vec<(u32, TTree<O::Label>)> =
            tuple.iter().enumerate().map(|(i, t)| (i as u32 + 1, t.clone())).collect();
        let raw = self.rebuild(&labelled)?;
        let t = self.reduce(&raw);
        (self.axial_image(&t) == tuple).then_some(t)
    }

    /// Rebuilds a subtree from unary components tagged with their input labels.
    fn rebuild(&self, comps: &[(u32, TTree<O::Label>)]) -> Option<TTree<O::Label>> {
        if comps.len() == 1 {
            let (label, t) = &comps[0];
            return Some(t.map_inputs(&|_| *label));
        }
        // Every component keeps the node where the first two paths meet, so all roots are nodes.
        let mut frames = Vec::new();
        for (_, t) in comps {
            let TTree::Node(x, ch) = t else { return None };
            frames.push((x.clone(), ch.clone()));
        }
        let (x0, ch0) = frames[0].clone();
        let k = ch0.len();
        // Align each component to the first one's planar frame.
        let mut options: Vec<Vec<Vec<(u8, TTree<O::Label>)>>> = Vec::new();
        for (x, ch) in &frames {
            if ch.len() != k {
                return None;
            }
            let mut opts = Vec::new();
            for sigma in all_perms(k) {
                if self.op.act(x, &sigma) == x0 {
                    let mut slots = vec![(0u8, TTree::Input(0)); k];
                    for (j, c) in ch.iter().enumerate() {
                        slots[sigma[j]] = c.clone();
                    }
                    if !opts.contains(&slots) {
                        opts.push(slots);
                    }
                }
            }
            if opts.is_empty() {
                return None;
            }
            options.push(opts);
        }
        let mut choice = vec![0usize; comps.len()];
        loop {
            if let Some(t) = self.rebuild_aligned(comps, &x0, &options, &choice) {
                return Some(t);
            }
            // Next combination of alignments.
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return None;
                }
                choice[i] += 1;
                if choice[i] < options[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    fn rebuild_aligned(
        &self,
        comps: &[(u32, TTree<O::Label>)],
        label: &O::Label,
        options: &[Vec<Vec<(u8, TTree<O::Label>)>>],
        choice: &[usize],
    ) -> Option<TTree<O::Label>> {
        let aligned: Vec<&Vec<(u8, TTree<O::Label>)>> = (0..comps.len()).map(|i| &options[i][choice[i]]).collect();
        let k = aligned[0].len();
        let path_slot = |slots: &Vec<(u8, TTree<O::Label>)>| -> Option<usize> {
            let with: Vec<usize> = (0..slots.len()).filter(|&s| slots[s].1.has_inputs()).collect();
            (with.len() == 1).then(|| with[0])
        };
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, slots) in aligned.iter().enumerate() {
            groups.entry(path_slot(slots)?).or_default().push(i);
        }
        let zero = self.op.zero();
        let mut children = Vec::with_capacity(k);
        for s in 0..k {
            match groups.get(&s) {
                None => {
                    let first = &aligned[0][s];
                    if aligned.iter().any(|sl| &sl[s] != first) {
                        return None;
                    }
                    children.push(first.clone());
                }
                Some(members) => {
                    let edge = aligned[members[0]][s].0;
                    if members.iter().any(|&m| aligned[m][s].0 != edge) {
                        return None;
                    }
                    let sub: Vec<(u32, TTree<O::Label>)> =
                        members.iter().map(|&m| (comps[m].0, aligned[m][s].1.clone())).collect();
                    let child = self.rebuild(&sub)?;
                    // Components not passing through this slot see it capped by stumps.
                    let capped = if edge == 1 {
                        (1, self.stump())
                    } else {
                        (0, self.reduce_subtree(&child.map_inputs(&|_| 0).keep_input(u32::MAX, &zero)))
                    };
                    for (i, sl) in aligned.iter().enumerate() {
                        if !members.contains(&i) && sl[s] != capped {
                            return None;
                        }
                    }
                    children.push((edge, child));
                }
            }
        }
        Some(TTree::Node(label.clone(), children))
    }

    /// Reduction of a subtree hanging on a `0` edge: the root edge is not outer.
    fn reduce_subtree(&self, t: &TTree<O::Label>) -> TTree<O::Label> {
        if t.has_inputs() || t.is_stump() {
            return self.reduce(t);
        }
        // Reduce below a fresh unary root so that the top edge is inner and keeps label 0.
        let TTree::Node(x, ch) = t else { return t.clone() };
        let inner: Vec<(u8, TTree<O::Label>)> = ch
            .iter()
            .map(|(e, c)| {
                let r = self.reduce_subtree(c);
                if *e == 1 && !r.is_stump() {
                    (1, self.stump())
                } else {
                    (*e, r)
                }
            })
            .collect();
        self.canonical(&TTree::Node(x.clone(), inner))
    }

    /// The path of a unary tree from the root: each entry is a path node and
    /// the label of the path edge above it.
    fn spine(t: &TTree<O::Label>) -> Vec<(&TTree<O::Label>, u8)> {
        let mut out = Vec::new();
        let mut cur = t;
        while let TTree::Node(_, ch) = cur {
            let Some((e, next)) = ch.iter().find(|(_, c)| c.has_inputs()) else { break };
            out.push((cur, *e));
            cur = next;
        }
        out
    }

    /// The left factor of a unary tree of the given height, if the path edge
    /// at that height carries `1`.
    pub fn left_factor(&self, t: &TTree<O::Label>, height: usize) -> Option<TTree<O::Label>> {
        let spine = Self::spine(t);
        if height > spine.len() {
            return None;
        }
        if height == 0 {
            return Some(TTree::trivial());
        }
        if spine[height - 1].1 != 1 {
            return None;
        }
        fn cut<L: Clone + Eq + Ord + Hash>(t: &TTree<L>, h: usize) -> TTree<L> {
            match t {
                TTree::Node(x, ch) if h > 0 => TTree::Node(
                    x.clone(),
                    ch.iter()
                        .map(|(e, c)| if c.has_inputs() { (*e, cut(c, h - 1)) } else { (*e, c.clone()) })
                        .collect(),
                ),
                _ => TTree::Input(1),
            }
        }
        Some(self.reduce(&cut(t, height)))
    }

    /// The part of a unary tree above the cut at `height`.
    pub fn right_part(&self, t: &TTree<O::Label>, height: usize) -> TTree<O::Label> {
        let mut cur = t;
        for _ in 0..height {
            if let TTree::Node(_, ch) = cur {
                cur = &ch.iter().find(|(_, c)| c.has_inputs()).expect("path continues").1;
            }
        }
        cur.clone()
    }

    /// Number of nodes on the input path of a unary tree.
    pub fn height(&self, t: &TTree<O::Label>) -> usize {
        Self::spine(t).len()
    }

    /// All left factors of a unary tree with their heights.
    pub fn left_factors(&self, t: &TTree<O::Label>) -> Vec<(usize, TTree<O::Label>)> {
        (0..=self.height(t)).filter_map(|h| self.left_factor(t, h).map(|f| (h, f))).collect()
    }

    /// Maximal left factor of unary trees.
    pub fn mlf(&self, xs: &[TTree<O::Label>]) -> TTree<O::Label> {
        let Some(first) = xs.first() else { return TTree::trivial() };
        let mut found = None;
        for h in (0..=self.height(first)).rev() {
            if let Some(f) = self.left_factor(first, h) {
                if xs.iter().all(|x| self.left_factor(x, h).as_ref() == Some(&f)) {
                    found = Some(f);
                    break;
                }
            }
        }
        found.expect("the trivial tree is a common left factor")
    }

    /// Returns `x'` with `y · x' = x`, if `y` left-divides `x`.
    pub fn left_divide(&self, y: &TTree<O::Label>, x: &TTree<O::Label>) -> Option<TTree<O::Label>> {
        let h = self.height(y);
        (self.left_factor(x, h).as_ref() == Some(y)).then(|| self.right_part(x, h))
    }

    /// Builds an `n`-ary tree with axial image `tuple` from pairwise witnesses.
    ///
    /// Each pair `(i, j)` with `i < j` (zero based) must have a two-input
    /// witness whose axial image is `(tuple[i], tuple[j])`. Returns `None`
    /// when a witness is missing or wrong.
    pub fn assemble_pairwise(
        &self,
        tuple: &[TTree<O::Label>],
        witnesses: &HashMap<(usize, usize), TTree<O::Label>>,
    ) -> Option<TTree<O::Label>> {
        let n = tuple.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = witnesses.get(&(i, j))?;
                if self.axial_image(w) != [tuple[i].clone(), tuple[j].clone()] {
                    return None;
                }
            }
        }
        if n == 2 {
            return witnesses.get(&(0, 1)).cloned();
        }
        self.recover_from_axial(tuple)
    }

    /// All reduced trees with inputs `1..=n`, at most `max_nodes` nodes and
    /// node labels of arity at most `max_label_arity`.
    pub fn enumerate_reduced(
        &self,
        n: usize,
        max_nodes: usize,
        max_label_arity: usize,
    ) -> Result<Vec<TTree<O::Label>>> {
        let mut out = Vec::new();
        self.for_each_reduced(n, max_nodes, max_label_arity, &mut |t| out.push(t))?;
        out.sort();
        Ok(out)
    }

    /// Streams the trees of [`Trees::enumerate_reduced`] without collecting them.
    ///
    /// Repeats are filtered through a set of 64-bit hashes.
    pub fn for_each_reduced(
        &self,
        n: usize,
        max_nodes: usize,
        max_label_arity: usize,
        f: &mut dyn FnMut(TTree<O::Label>),
    ) -> Result<()> {
        if n == 0 {
            f(self.stump());
            return Ok(());
        }
        let mut en = Enumerator {
            tr: *self,
            max_label_arity,
            labels: HashMap::new(),
            with: HashMap::new(),
            free: HashMap::new(),
        };
        let all: Vec<u32> = (1..=n as u32).collect();
        let mut seen = HashSet::new();
        en.generate(&all, max_nodes, &mut |_, t| {
            if seen.insert(hash_of(&t)) {
                f(t);
            }
        })
    }

    pub fn render(&self, t: &TTree<O::Label>) -> String {
        fn go<O: LabelOperad>(op: &O, t: &TTree<O::Label>, edge: u8, out: &mut String) {
            match t {
                TTree::Input(i) => out.push_str(&i.to_string()),
                TTree::Node(_, ch) if ch.is_empty() => {
                    out.push('0');
                    if edge == 0 {
                        out.push_str("[0]");
                    }
                }
                TTree::Node(x, ch) => {
                    out.push_str(&op.render(x));
                    out.push_str(&format!("[{edge}]("));
                    for (i, (e, c)) in ch.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        go(op, c, *e, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut s = String::new();
        go(self.op, t, 1, &mut s);
        s
    }

    /// Parses the format produced by [`Trees::render`].
    pub fn parse(&self, s: &str) -> Result<TTree<O::Label>> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let (_, t) = self.parse_at(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::Parse(format!("trailing input at {pos}")));
        }
        self.validate(&t)?;
        Ok(t)
    }

    fn parse_at(&self, c: &[char], pos: &mut usize) -> Result<(u8, TTree<O::Label>)> {
        let start = *pos;
        let mut depth = 0i32;
        while *pos < c.len() {
            match c[*pos] {
                '(' => depth += 1,
                ')' if depth == 0 => break,
                ')' => depth -= 1,
                ',' if depth == 0 => break,
                '[' if depth == 0 => break,
                _ => {}
            }
            *pos += 1;
        }
        let token: String = c[start..*pos].iter().collect();
        let mut edge = 1u8;
        if *pos < c.len() && c[*pos] == '[' {
            let e = c.get(*pos + 1).copied();
            if c.get(*pos + 2) != Some(&']') {
                return Err(Error::Parse("malformed edge label".into()));
            }
            edge = match e {
                Some('0') => 0,
                Some('1') => 1,
                _ => return Err(Error::Parse("edge labels are 0 or 1".into())),
            };
            *pos += 3;
        }
        if token == "0" && (*pos >= c.len() || c[*pos] != '(') {
            return Ok((edge, self.stump()));
        }
        if *pos < c.len() && c[*pos] == '(' {
            *pos += 1;
            let mut kids = Vec::new();
            loop {
                kids.push(self.parse_at(c, pos)?);
                match c.get(*pos) {
                    Some(',') => *pos += 1,
                    Some(')') => {
                        *pos += 1;
                        break;
                    }
                    _ => return Err(Error::Parse("expected ',' or ')'".into())),
                }
            }
            let label = self.op.parse(&token, kids.len())?;
            return Ok((edge, TTree::Node(label, kids)));
        }
        let i: u32 = token.parse().map_err(|_| Error::Parse(format!("bad leaf {token}")))?;
        Ok((1, TTree::Input(i)))
    }
}

type Listing<L> = Vec<(usize, TTree<L>)>;

fn hash_of<T: Hash>(t: &T) -> u64 {
    use std::hash::{BuildHasher, BuildHasherDefault};
    BuildHasherDefault::<std::collections::hash_map::DefaultHasher>::default().hash_one(t)
}

struct Enumerator<'a, O: LabelOperad> {
    tr: Trees<'a, O>,
    max_label_arity: usize,
    labels: HashMap<usize, Vec<O::Label>>,
    with: HashMap<(Vec<u32>, usize), Listing<O::Label>>,
    free: HashMap<usize, Listing<O::Label>>,
}

impl<'a, O: LabelOperad> Enumerator<'a, O> {
    fn labels(&mut self, k: usize) -> Result<Vec<O::Label>> {
        if let Some(l) = self.labels.get(&k) {
            return Ok(l.clone());
        }
        let l = self.tr.op.elements(k)?;
        self.labels.insert(k, l.clone());
        Ok(l)
    }

    /// Input-free children on a `0` edge (stumps included) with at most `budget` nodes.
    fn free(&mut self, budget: usize) -> Result<Listing<O::Label>> {
        if let Some(l) = self.free.get(&budget) {
            return Ok(l.clone());
        }
        let mut out = Vec::new();
        if budget >= 1 {
            out.push((1, self.tr.stump()));
        }
        if budget >= 2 {
            // A node whose children are all input-free: stumps on 1 edges or free subtrees on 0 edges.
            let opts = self.free_child_options(budget - 1)?;
            for k in 1..=self.max_label_arity {
                for (used, kids) in multisets(&opts, k, budget - 1) {
                    for x in self.labels(k)? {
                        if k == 1 && x == self.tr.op.unit() {
                            continue;
                        }
                        out.push((used + 1, self.tr.canonical(&TTree::Node(x, kids.clone()))));
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        self.free.insert(budget, out.clone());
        Ok(out)
    }

    fn free_child_options(&mut self, budget: usize) -> Result<Vec<(usize, (u8, TTree<O::Label>))>> {
        let mut opts = Vec::new();
        if budget >= 1 {
            opts.push((1, (1, self.tr.stump())));
        }
        for (n, t) in self.free(budget)? {
            opts.push((n, (0, t)));
        }
        Ok(opts)
    }

    /// Reduced canonical subtrees on exactly the inputs `labels`, as children on an inner edge.
    fn with_inputs(&mut self, labels: &[u32], budget: usize) -> Result<Listing<O::Label>> {
        let key = (labels.to_vec(), budget);
        if let Some(l) = self.with.get(&key) {
            return Ok(l.clone());
        }
        let mut out = Vec::new();
        self.generate(labels, budget, &mut |n, t| out.push((n, t)))?;
        out.sort();
        out.dedup();
        self.with.insert(key, out.clone());
        Ok(out)
    }

    /// Emits every subtree on exactly the inputs `labels`, possibly with repeats.
    fn generate(&mut self, labels: &[u32], budget: usize, emit: &mut dyn FnMut(usize, TTree<O::Label>)) -> Result<()> {
        if labels.len() == 1 {
            emit(0, TTree::Input(labels[0]));
        }
        if budget == 0 {
            return Ok(());
        }
        let free_opts = self.free_child_options(budget - 1)?;
        for blocks in crate::tensor_calculus::set_partitions(labels) {
            let b = blocks.len();
            if b > self.max_label_arity {
                continue;
            }
            // Children carrying inputs, with their edge labels.
            let mut block_opts: Vec<Vec<(usize, (u8, TTree<O::Label>))>> = Vec::new();
            for bl in &blocks {
                let mut v = Vec::new();
                for (n, t) in self.with_inputs(bl, budget - 1)? {
                    if matches!(t, TTree::Input(_)) {
                        v.push((n, (1, t)));
                    } else {
                        v.push((n, (1, t.clone())));
                        v.push((n, (0, t)));
                    }
                }
                block_opts.push(v);
            }
            let mut label_sets = Vec::new();
            for k in b..=self.max_label_arity {
                let unit = self.tr.op.unit();
                label_sets.push(self.labels(k)?.into_iter().filter(|x| !(k == 1 && *x == unit)).collect::<Vec<_>>());
            }
            let tr = self.tr;
            let mut err = None;
            product(&block_opts, budget - 1, &mut Vec::new(), 0, &mut |used, kids| {
                for (li, xs) in label_sets.iter().enumerate() {
                    for (fused, fkids) in multisets(&free_opts, li, budget - 1 - used) {
                        let mut all = kids.to_vec();
                        all.extend(fkids);
                        for x in xs {
                            if tr.op.arity(x) != all.len() {
                                err = Some(Error::Invalid("label arity mismatch in enumeration".into()));
                                return;
                            }
                            emit(used + fused + 1, tr.canonical(&TTree::Node(x.clone(), all.clone())));
                        }
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        Ok(())
    }
}

fn product<T: Clone>(
    choices: &[Vec<(usize, T)>],
    budget: usize,
    cur: &mut Vec<T>,
    used: usize,
    out: &mut dyn FnMut(usize, &[T]),
) {
    if cur.len() == choices.len() {
        out(used, cur);
        return;
    }
    for (n, t) in &choices[cur.len()] {
        if used + n <= budget {
            cur.push(t.clone());
            product(choices, budget, cur, used + n, out);
            cur.pop();
        }
    }
}

/// Multisets of size `k` drawn from `opts` with total size at most `budget`.
fn multisets<T: Clone>(opts: &[(usize, T)], k: usize, budget: usize) -> Vec<(usize, Vec<T>)> {
    let mut out = Vec::new();
    fn go<T: Clone>(
        opts: &[(usize, T)],
        k: usize,
        from: usize,
        budget: usize,
        used: usize,
        cur: &mut Vec<T>,
        out: &mut Vec<(usize, Vec<T>)>,
    ) {
        if cur.len() == k {
            out.push((used, cur.clone()));
            return;
        }
        for i in from..opts.len() {
            if used + opts[i].0 <= budget {
                cur.push(opts[i].1.clone());
                go(opts, k, i, budget, used + opts[i].0, cur, out);
                cur.pop();
            }
        }
    }
    go(opts, k, 0, budget, 0, &mut Vec::new(), &mut out);
    out
}

/// Checks that every tuple in `trees` has a distinct axial image and that
/// reconstruction returns the original tree.
pub fn check_axial_round_trip<O: LabelOperad>(tr: &Trees<'_, O>, trees: &[TTree<O::Label>]) -> Result<()> {
    let mut seen = HashSet::new();
    for t in trees {
        let ax = tr.axial_image(t);
        if !seen.insert((t.arity(), ax.clone())) {
            return Err(Error::Invalid(format!("axial image collision at {}", tr.render(t))));
        }
        if tr.recover_from_axial(&ax).as_ref() != Some(t) {
            return Err(Error::Invalid(format!("reconstruction failed for {}", tr.render(t))));
        }
    }
    Ok(())
}

/// Streams all reduced `n`-ary trees within the bounds and checks that
/// reconstruction inverts the axial map on each, which also makes the map
/// injective there. Returns the number of trees checked.
pub fn check_axial_round_trip_exhaustive<O: LabelOperad>(
    tr: &Trees<'_, O>,
    n: usize,
    max_nodes: usize,
    max_label_arity: usize,
) -> Result<usize> {
    const BATCH: usize = 1 << 15;
    let mut batch = Vec::with_capacity(BATCH);
    let mut count = 0;
    let mut failure: Option<TTree<O::Label>> = None;
    let flush = |batch: &mut Vec<TTree<O::Label>>, failure: &mut Option<TTree<O::Label>>| {
        if failure.is_none() {
            let bad = crate::par::flat_map(batch, |t| {
                if tr.recover_from_axial(&tr.axial_image(t)).as_ref() == Some(t) {
                    Vec::new()
                } else {
                    vec![t.clone()]
                }
            });
            *failure = bad.into_iter().next();
        }
        batch.clear();
    };
    tr.for_each_reduced(n, max_nodes, max_label_arity, &mut |t| {
        count += 1;
        batch.push(t);
        if batch.len() == BATCH {
            flush(&mut batch, &mut failure);
        }
    })?;
    flush(&mut batch, &mut failure);
    match failure {
        Some(t) => Err(Error::Invalid(format!("reconstruction failed for {}", tr.render(&t)))),
        None => Ok(count),
    }
}

/// Label arity bound used by the exhaustive law checks.
pub const CHECK_LABEL_ARITY: usize = 3;

/// Unary reduced trees within the node bound, grouped by exact node count.
pub fn unary_universe<O: LabelOperad>(tr: &Trees<'_, O>, max_nodes: usize) -> Result<Vec<Vec<TTree<O::Label>>>> {
    let mut by_size = vec![Vec::new(); max_nodes + 1];
    for t in tr.enumerate_reduced(1, max_nodes, CHECK_LABEL_ARITY)? {
        by_size[t.nodes()].push(t);
    }
    Ok(by_size)
}

/// Checks `mlf` against exhaustive factorization.
///
/// Left factors of each unary tree are found by testing every product
/// `y · x'` of trees from the universe. For every pair of trees with at most
/// `pair_nodes` nodes, and every pair with a nontrivial common factor within
/// `max_nodes`, the computed `mlf` must be a common left factor that every
/// other common left factor divides. Returns the number of pairs checked.
pub fn check_mlf_maximality<O: LabelOperad>(tr: &Trees<'_, O>, max_nodes: usize, pair_nodes: usize) -> Result<usize> {
    let by_size = unary_universe(tr, max_nodes)?;
    let all: Vec<TTree<O::Label>> = by_size.iter().flatten().cloned().collect();
    let index: HashMap<&TTree<O::Label>, usize> = all.iter().enumerate().map(|(i, t)| (t, i)).collect();
    // factors[i] = all y with y · x' = all[i] for some x'.
    let mut factors: Vec<HashSet<usize>> = vec![HashSet::new(); all.len()];
    for (yi, y) in all.iter().enumerate() {
        let ny = y.nodes();
        for rest in by_size.iter().take(max_nodes - ny + 1) {
            for x in rest {
                let p = tr.compose_unary(y, x);
                if let Some(&pi) = index.get(&p) {
                    factors[pi].insert(yi);
                }
            }
        }
    }
    let mut nontrivial: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, f) in factors.iter().enumerate() {
        for &y in f {
            if all[y].nodes() > 0 {
                nontrivial.entry(y).or_default().push(i);
            }
        }
    }
    let mut pairs = HashSet::new();
    let small: Vec<usize> = (0..all.len()).filter(|&i| all[i].nodes() <= pair_nodes).collect();
    for &i in &small {
        for &j in &small {
            pairs.insert((i.min(j), i.max(j)));
        }
    }
    for members in nontrivial.values() {
        for &i in members {
            for &j in members {
                pairs.insert((i.min(j), i.max(j)));
            }
        }
    }
    let pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
    let bad = crate::par::flat_map(&pairs, |&(i, j)| {
        let m = tr.mlf(&[all[i].clone(), all[j].clone()]);
        let Some(&mi) = index.get(&m) else { return vec![(i, j)] };
        let common: Vec<&usize> = factors[i].intersection(&factors[j]).collect();
        if !common.contains(&&mi) || common.iter().any(|&&y| !factors[mi].contains(&y)) {
            vec![(i, j)]
        } else {
            Vec::new()
        }
    });
    if let Some(&(i, j)) = bad.first() {
        return Err(Error::Invalid(format!("mlf is not maximal for ({}, {})", tr.render(&all[i]), tr.render(&all[j]))));
    }
    Ok(pairs.len())
}

/// Checks that the maximal left factor of every `n`-tuple of unary trees with
/// at most `max_total_nodes` nodes in total is the maximal left factor of
/// one of its pairs. Returns the number of tuples checked.
pub fn check_pair_reduction<O: LabelOperad>(tr: &Trees<'_, O>, n: usize, max_total_nodes: usize) -> Result<usize> {
    let by_size = unary_universe(tr, max_total_nodes)?;
    let mut tuples: Vec<Vec<&TTree<O::Label>>> = Vec::new();
    fn go<'t, L>(
        by_size: &'t [Vec<TTree<L>>],
        n: usize,
        left: usize,
        cur: &mut Vec<&'t TTree<L>>,
        out: &mut Vec<Vec<&'t TTree<L>>>,
    ) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for (size, ts) in by_size.iter().enumerate().take(left + 1) {
            for t in ts {
                cur.push(t);
                go(by_size, n, left - size, cur, out);
                cur.pop();
            }
        }
    }
    go(&by_size, n, max_total_nodes, &mut Vec::new(), &mut tuples);
    let bad = crate::par::flat_map(&tuples, |tuple| {
        let owned: Vec<TTree<O::Label>> = tuple.iter().map(|t| (*t).clone()).collect();
        let m = tr.mlf(&owned);
        let found = (0..n).any(|i| ((i + 1)..n).any(|j| tr.mlf(&[owned[i].clone(), owned[j].clone()]) == m));
        if found {
            Vec::new()
        } else {
            vec![owned]
        }
    });
    if let Some(t) = bad.first() {
        let shown: Vec<String> = t.iter().map(|x| tr.render(x)).collect();
        return Err(Error::Invalid(format!("no pair realizes the mlf of ({})", shown.join(", "))));
    }
    Ok(tuples.len())
}

/// Checks the cancellation law on axial images of binary trees with at most
/// `max_nodes` nodes: whenever `(α∘β, γ)` and `(α, γ∘δ)` are images, so is
/// `(α, γ)`. Returns the number of instances where both hypotheses hold.
pub fn check_cancellation<O: LabelOperad>(
    tr: &Trees<'_, O>,
    max_nodes: usize,
    max_label_arity: usize,
) -> Result<usize> {
    let mut image: HashSet<(TTree<O::Label>, TTree<O::Label>)> = HashSet::new();
    tr.for_each_reduced(2, max_nodes, max_label_arity, &mut |t| {
        let mut ax = tr.axial_image(&t).into_iter();
        let a = ax.next().expect("two components");
        let b = ax.next().expect("two components");
        image.insert((a, b));
    })?;
    // Pairs (α, γ) such that (α, γ∘δ) is an image for some δ.
    let mut right_cut: HashSet<(TTree<O::Label>, TTree<O::Label>)> = HashSet::new();
    for (a, q) in &image {
        for (_, g) in tr.left_factors(q) {
            right_cut.insert((a.clone(), g));
        }
    }
    let mut instances = 0;
    for (p, g) in &image {
        for (_, a) in tr.left_factors(p) {
            let key = (a, g.clone());
            if right_cut.contains(&key) {
                instances += 1;
                if !image.contains(&key) {
                    return Err(Error::Invalid(format!(
                        "cancellation fails for ({}, {})",
                        tr.render(&key.0),
                        tr.render(&key.1)
                    )));
                }
            }
        }
    }
    Ok(instances)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad_core::com;
    use proptest::prelude::*;

    fn m2() -> WordOperad {
        WordOperad { k: 2 }
    }

    fn w(s: &str) -> Word {
        Word::parse(s, false).unwrap()
    }

    #[test]
    fn identity_relation_takes_the_max_edge() {
        let op = com(4);
        let tr = Trees::new(&op);
        let id = LabelOperad::unit(&op);
        let c2 = (2usize, 0u32);
        for (e1, e2) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
            // c2(x, id[e2](id[e1](c2(1,2))), 3) style stacking inside a binary node.
            let inner = tr.corolla(c2);
            let stacked = TTree::Node(id, vec![(e1, inner.clone())]);
            let stacked = TTree::Node(id, vec![(e2, stacked)]);
            let t = TTree::Node(c2, vec![(1, TTree::Input(3)), (0, stacked)]);
            let r = tr.reduce(&t);
            let expect = tr.canonical(&TTree::Node(c2, vec![(1, TTree::Input(3)), (e1.max(e2), inner)]));
            assert_eq!(r, expect);
        }
    }

    #[test]
    fn stump_relation_collapses_input_free_subtrees() {
        let op = m2();
        let tr = Trees::new(&op);
        let x = w("o1(1,2)");
        let free = TTree::Node(x.clone(), vec![(1, tr.stump()), (1, tr.stump())]);
        let t = TTree::Node(x.clone(), vec![(1, TTree::Input(1)), (1, free.clone())]);
        assert_eq!(tr.reduce(&t), TTree::Node(x.clone(), vec![(1, TTree::Input(1)), (1, tr.stump())]));
        // On a 0 edge the subtree survives.
        let t0 = TTree::Node(x.clone(), vec![(1, TTree::Input(1)), (0, free)]);
        assert_eq!(tr.reduce(&t0).nodes(), 4);
        assert_eq!(tr.reduce(&tr.reduce(&t0)), tr.reduce(&t0));
    }

    #[test]
    fn boundary_examples() {
        let op = m2();
        let tr = Trees::new(&op);
        assert_eq!(tr.boundary(&TTree::trivial()).unwrap(), (TTree::trivial(), TTree::trivial()));
        let a = w("o1(1,2)");
        let b = w("o2(1,2)");
        let t = TTree::Node(a.clone(), vec![(0, tr.corolla(b.clone())), (1, TTree::Input(3))]);
        let (s, tg) = tr.boundary(&t).unwrap();
        assert_eq!(s, TTree::Node(a.clone(), vec![(1, tr.corolla(b.clone())), (1, TTree::Input(3))]));
        assert_eq!(tg, tr.corolla(w("o1(o2(1,2),3)")));
        let all1 = tr.reduce(&s);
        assert_eq!(tr.boundary(&all1).unwrap(), (all1.clone(), all1));
    }

    #[test]
    fn axial_image_of_a_corolla() {
        let op = m2();
        let tr = Trees::new(&op);
        let beta = w("o1(o2(1,3),2)");
        let ax = tr.axial_image(&tr.corolla(beta.clone()));
        assert_eq!(ax.len(), 3);
        for (i, comp) in ax.iter().enumerate() {
            // Independent oracle: one node labelled β, with stumps everywhere except input i.
            let raw = TTree::Node(
                beta.clone(),
                (0..3).map(|j| if j == i { (1, TTree::Input(1)) } else { (1, tr.stump()) }).collect(),
            );
            assert_eq!(comp, &tr.canonical(&raw));
            assert_eq!(comp.nodes(), 3);
        }
        assert_eq!(tr.axial_image(&TTree::trivial()), vec![TTree::trivial()]);
    }

    #[test]
    fn recover_small_trees() {
        let op = m2();
        let tr = Trees::new(&op);
        for n in 1..=3 {
            let trees = tr.enumerate_reduced(n, 4, 3).unwrap();
            check_axial_round_trip(&tr, &trees).unwrap();
        }
    }

    #[test]
    fn recover_rejects_incompatible_pairs() {
        let op = m2();
        let tr = Trees::new(&op);
        let a = w("o1(1,2)");
        let x = tr.reduce(&TTree::Node(a.clone(), vec![(1, TTree::Input(1)), (1, tr.stump())]));
        // Both paths claim the same slot of the same node.
        assert_eq!(tr.recover_from_axial(&[x.clone(), x.clone()]), None);
        let t = tr.corolla(a);
        assert_eq!(tr.recover_from_axial(&tr.axial_image(&t)), Some(t));
    }

    #[test]
    fn mlf_examples() {
        let op = m2();
        let tr = Trees::new(&op);
        let a = w("o1(1,2)");
        let x = tr.reduce(&TTree::Node(a.clone(), vec![(1, TTree::Input(1)), (1, tr.stump())]));
        let xx = tr.compose_unary(&x, &x);
        assert_eq!(tr.mlf(&[xx.clone(), xx.clone()]), xx);
        assert_eq!(tr.mlf(&[xx.clone(), TTree::trivial()]), TTree::trivial());
        assert_eq!(tr.mlf(&[xx.clone(), x.clone()]), x);
        assert_eq!(tr.left_divide(&x, &xx), Some(x.clone()));
    }

    #[test]
    fn render_and_parse_round_trip() {
        let op = m2();
        let tr = Trees::new(&op);
        for t in tr.enumerate_reduced(2, 3, 3).unwrap() {
            let s = tr.render(&t);
            assert_eq!(tr.parse(&s).unwrap(), t, "{s}");
        }
    }

    #[test]
    fn exhaustive_checks_at_small_bounds() {
        let op = m2();
        let tr = Trees::new(&op);
        assert_eq!(check_axial_round_trip_exhaustive(&tr, 2, 3, 3).unwrap(), 268);
        assert_eq!(
            check_axial_round_trip_exhaustive(&tr, 3, 3, 3).unwrap(),
            tr.enumerate_reduced(3, 3, 3).unwrap().len()
        );
        assert!(check_mlf_maximality(&tr, 4, 3).unwrap() > 0);
        assert!(check_pair_reduction(&tr, 3, 4).unwrap() > 0);
        assert!(check_cancellation(&tr, 4, 3).unwrap() > 0);
    }

    #[test]
    fn mlf_on_a_five_node_pair() {
        let op = m2();
        let tr = Trees::new(&op);
        let a = w("o1(1,2)");
        let b = w("o2(1,2)");
        let x = tr.reduce(&TTree::Node(a.clone(), vec![(1, TTree::Input(1)), (1, tr.stump())]));
        let y = tr.reduce(&TTree::Node(b.clone(), vec![(1, TTree::Input(1)), (1, tr.stump())]));
        let z =
            tr.reduce(&TTree::Node(w("o1(o2(1,2),3)"), vec![(1, tr.stump()), (1, TTree::Input(1)), (1, tr.stump())]));
        let p = tr.compose_unary(&x, &z);
        let q = tr.compose_unary(&x, &y);
        assert_eq!((p.nodes(), q.nodes()), (5, 4));
        // Oracle: every common left factor among all products of universe trees.
        let by_size = unary_universe(&tr, 5).unwrap();
        let divides = |f: &TTree<Word>, t: &TTree<Word>| {
            f.nodes() <= t.nodes() && by_size[t.nodes() - f.nodes()].iter().any(|r| &tr.compose_unary(f, r) == t)
        };
        let common: Vec<&TTree<Word>> = by_size.iter().flatten().filter(|f| divides(f, &p) && divides(f, &q)).collect();
        let best = common.iter().max_by_key(|f| f.nodes()).unwrap();
        assert_eq!(&&tr.mlf(&[p.clone(), q.clone()]), best);
        assert_eq!(tr.mlf(&[p, q]), x);
    }

    #[test]
    fn assemble_from_pair_witnesses() {
        let op = m2();
        let tr = Trees::new(&op);
        let a = w("o1(1,2)");
        let b = w("o2(1,2)");
        // A binary node on top of a binary node: (1,2 | 3).
        let t = tr.reduce(&TTree::Node(b.clone(), vec![(1, tr.corolla(a.clone())), (1, TTree::Input(3))]));
        let tuple = tr.axial_image(&t);
        let mut witnesses = HashMap::new();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let keep = |k: u32| k == i as u32 + 1 || k == j as u32 + 1;
            let zero = op.zero();
            let pruned = t.map_inputs(&|k| if keep(k) { k } else { 0 });
            let pruned = fn_cap(&pruned, &zero);
            let w = tr.reduce(&pruned.map_inputs(&|k| if k == i as u32 + 1 { 1 } else { 2 }));
            witnesses.insert((i, j), w);
        }
        let got = tr.assemble_pairwise(&tuple, &witnesses).unwrap();
        assert_eq!(tr.axial_image(&got), tuple);
        assert_eq!(got, t);
        witnesses.remove(&(0, 2));
        assert_eq!(tr.assemble_pairwise(&tuple, &witnesses), None);
        let two = tr.corolla(a);
        let mut single = HashMap::new();
        single.insert((0, 1), two.clone());
        assert_eq!(tr.assemble_pairwise(&tr.axial_image(&two), &single), Some(two));
    }

    fn fn_cap(t: &TTree<Word>, zero: &Word) -> TTree<Word> {
        match t {
            TTree::Input(0) => TTree::Node(zero.clone(), Vec::new()),
            TTree::Input(k) => TTree::Input(*k),
            TTree::Node(x, ch) => TTree::Node(x.clone(), ch.iter().map(|(e, c)| (*e, fn_cap(c, zero))).collect()),
        }
    }

    /// Raw trees over Com with unit nodes and arbitrary edges.
    fn raw_tree(depth: u32) -> impl Strategy<Value = TTree<(usize, u32)>> {
        let leaf = prop_oneof![Just(TTree::Input(0)), Just(TTree::Node((0, 0), Vec::new()))];
        leaf.prop_recursive(depth, 24, 3, |inner| {
            (prop::collection::vec((0u8..2, inner), 1..4)).prop_map(|ch| {
                let n = ch.len();
                TTree::Node((n, 0), ch)
            })
        })
    }

    fn number_inputs(t: &TTree<(usize, u32)>, next: &mut u32) -> TTree<(usize, u32)> {
        match t {
            TTree::Input(_) => {
                *next += 1;
                TTree::Input(*next)
            }
            TTree::Node(x, ch) => TTree::Node(
                *x,
                ch.iter()
                    .map(|(e, c)| {
                        let c = number_inputs(c, next);
                        (if matches!(c, TTree::Input(_)) { 1 } else { *e }, c)
                    })
                    .collect(),
            ),
        }
    }

    /// One-step rewriting at a random redex until none remain.
    fn reduce_stepwise(tr: &Trees<'_, SetOperad>, t: &TTree<(usize, u32)>, seed: &mut u64) -> TTree<(usize, u32)> {
        fn redexes(t: &TTree<(usize, u32)>, unit: (usize, u32), path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if let TTree::Node(x, ch) = t {
                if ch.len() == 1 && *x == unit {
                    out.push(path.clone());
                }
                for (i, (e, c)) in ch.iter().enumerate() {
                    if *e == 1 && !c.has_inputs() && !c.is_stump() {
                        let mut p = path.clone();
                        p.push(i);
                        p.push(usize::MAX);
                        out.push(p);
                    }
                    path.push(i);
                    redexes(c, unit, path, out);
                    path.pop();
                }
            }
        }
        fn apply(
            t: &TTree<(usize, u32)>,
            path: &[usize],
            stump: &TTree<(usize, u32)>,
        ) -> (TTree<(usize, u32)>, Option<u8>) {
            match (path, t) {
                ([], TTree::Node(_, ch)) => {
                    let (e, c) = ch[0].clone();
                    (c, Some(e))
                }
                ([i, usize::MAX], TTree::Node(x, ch)) => {
                    let mut ch = ch.clone();
                    ch[*i] = (1, stump.clone());
                    (TTree::Node(*x, ch), None)
                }
                ([i, rest @ ..], TTree::Node(x, ch)) => {
                    let mut ch = ch.clone();
                    let (sub, absorbed) = apply(&ch[*i].1, rest, stump);
                    let e = match absorbed {
                        Some(a) if rest.is_empty() => ch[*i].0.max(a),
                        _ => ch[*i].0,
                    };
                    let e = if matches!(sub, TTree::Input(_)) { 1 } else { e };
                    ch[*i] = (e, sub);
                    (TTree::Node(*x, ch), None)
                }
                _ => unreachable!(),
            }
        }
        let unit = LabelOperad::unit(tr.op);
        let mut cur = t.clone();
        loop {
            let mut rs = Vec::new();
            redexes(&cur, unit, &mut Vec::new(), &mut rs);
            if rs.is_empty() {
                break;
            }
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let pick = &rs[(*seed >> 33) as usize % rs.len()];
            cur = apply(&cur, pick, &tr.stump()).0;
        }
        if !cur.has_inputs() && !cur.is_stump() {
            cur = tr.stump();
        }
        tr.canonical(&cur)
    }

    proptest! {
        #[test]
        fn reduce_is_confluent_and_idempotent(t in raw_tree(4), seed in any::<u64>()) {
            let op = com(3);
            let tr = Trees::new(&op);
            let mut next = 0;
            let t = number_inputs(&t, &mut next);
            let r = tr.reduce(&t);
            prop_assert_eq!(tr.reduce(&r), r.clone());
            let mut s = seed;
            prop_assert_eq!(reduce_stepwise(&tr, &t, &mut s), r);
        }
    }
}
