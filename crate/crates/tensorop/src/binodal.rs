//! Binodal trees, membership of unary tuples in their carriers, restriction
//! and the intersection calculus for three inputs.
//!
//! Carriers are taken inside the tree operad of [`crate::t_construction`]:
//! a tuple of unary trees indexed by the inputs of a binodal tree `T` lies in
//! the carrier of `T` when every white node splits it into independent
//! branches and every black node sees the maximal left factors of its
//! branches as the axial image of a single tree.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::t_construction::{LabelOperad, TTree, Trees};

/// Largest input set handled by [`enumerate_binodal`].
pub const MAX_ENUMERATED_INPUTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Black,
    White,
}

/// A nonplanar tree with colored nodes and labelled leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Binodal {
    Leaf(u32),
    Node(Color, Vec<Binodal>),
}

impl Binodal {
    pub fn black(children: Vec<Binodal>) -> Self {
        Binodal::Node(Color::Black, children)
    }

    pub fn white(children: Vec<Binodal>) -> Self {
        Binodal::Node(Color::White, children)
    }

    pub fn leaves(&self) -> Vec<u32> {
        match self {
            Binodal::Leaf(i) => vec![*i],
            Binodal::Node(_, ch) => ch.iter().flat_map(|c| c.leaves()).collect(),
        }
    }

    pub fn leaf_set(&self) -> BTreeSet<u32> {
        self.leaves().into_iter().collect()
    }

    fn min_leaf(&self) -> u32 {
        self.leaves().into_iter().min().unwrap_or(u32::MAX)
    }

    pub fn relabel(&self, f: &impl Fn(u32) -> u32) -> Binodal {
        match self {
            Binodal::Leaf(i) => Binodal::Leaf(f(*i)),
            Binodal::Node(c, ch) => Binodal::Node(*c, ch.iter().map(|x| x.relabel(f)).collect()),
        }
    }

    /// Merges white-white edges, collapses unary nodes and sorts children by least leaf.
    pub fn canonicalize(&self) -> Result<Binodal> {
        match self {
            Binodal::Leaf(i) => Ok(Binodal::Leaf(*i)),
            Binodal::Node(_, ch) if ch.is_empty() => Err(Error::Invalid("binodal trees have no stumps".into())),
            Binodal::Node(color, ch) => {
                let mut kids = Vec::with_capacity(ch.len());
                for c in ch {
                    match (color, c.canonicalize()?) {
                        (Color::White, Binodal::Node(Color::White, inner)) => kids.extend(inner),
                        (_, k) => kids.push(k),
                    }
                }
                if kids.len() == 1 {
                    return Ok(kids.pop().expect("one child"));
                }
                kids.sort_by_key(|k| k.min_leaf());
                Ok(Binodal::Node(*color, kids))
            }
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonicalize().as_ref() == Ok(self)
    }

    /// Parses `b(..)` / `w(..)` terms with integer leaves and canonicalizes.
    pub fn parse(s: &str) -> Result<Binodal> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = parse_at(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::Parse(format!("trailing input in {s}")));
        }
        let mut leaves = t.leaves();
        leaves.sort_unstable();
        if leaves.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse(format!("repeated leaf in {s}")));
        }
        t.canonicalize()
    }
}

fn parse_at(c: &[char], pos: &mut usize) -> Result<Binodal> {
    let color = match c.get(*pos) {
        Some('b') => Some(Color::Black),
        Some('w') => Some(Color::White),
        _ => None,
    };
    if let Some(color) = color {
        *pos += 1;
        if c.get(*pos) != Some(&'(') {
            return Err(Error::Parse("expected '('".into()));
        }
        *pos += 1;
        let mut kids = Vec::new();
        loop {
            kids.push(parse_at(c, pos)?);
            match c.get(*pos) {
                Some(',') => *pos += 1,
                Some(')') => {
                    *pos += 1;
                    return Ok(Binodal::Node(color, kids));
                }
                _ => return Err(Error::Parse("expected ',' or ')'".into())),
            }
        }
    }
    let start = *pos;
    while *pos < c.len() && c[*pos].is_ascii_digit() {
        *pos += 1;
    }
    let digits: String = c[start..*pos].iter().collect();
    digits.parse().map(Binodal::Leaf).map_err(|_| Error::Parse(format!("bad leaf at {start}")))
}

impl fmt::Display for Binodal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binodal::Leaf(i) => write!(f, "{i}"),
            Binodal::Node(c, ch) => {
                write!(f, "{}(", if *c == Color::Black { 'b' } else { 'w' })?;
                for (i, x) in ch.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// All canonical binodal trees on the given leaves.
pub fn enumerate_binodal(labels: &[u32]) -> Result<Vec<Binodal>> {
    if labels.is_empty() || labels.len() > MAX_ENUMERATED_INPUTS {
        return Err(Error::Bound { what: "binodal inputs", value: labels.len(), max: MAX_ENUMERATED_INPUTS });
    }
    fn go(labels: &[u32]) -> Result<BTreeSet<Binodal>> {
        let mut out = BTreeSet::new();
        if labels.len() == 1 {
            out.insert(Binodal::Leaf(labels[0]));
            return Ok(out);
        }
        for blocks in crate::tensor_calculus::set_partitions(labels) {
            if blocks.len() < 2 {
                continue;
            }
            let subs: Vec<Vec<Binodal>> =
                blocks.iter().map(|b| go(b).map(|s| s.into_iter().collect())).collect::<Result<_>>()?;
            let mut combos: Vec<Vec<Binodal>> = vec![Vec::new()];
            for s in &subs {
                combos = combos
                    .into_iter()
                    .flat_map(|c| {
                        s.iter().map(move |x| {
                            let mut c = c.clone();
                            c.push(x.clone());
                            c
                        })
                    })
                    .collect();
            }
            for kids in combos {
                for color in [Color::Black, Color::White] {
                    out.insert(Binodal::Node(color, kids.clone()).canonicalize()?);
                }
            }
        }
        Ok(out)
    }
    Ok(go(labels)?.into_iter().collect())
}

/// Restriction to the leaves in `keep`.
pub fn restrict_binodal(t: &Binodal, keep: &BTreeSet<u32>) -> Result<Binodal> {
    fn prune(t: &Binodal, keep: &BTreeSet<u32>) -> Option<Binodal> {
        match t {
            Binodal::Leaf(i) => keep.contains(i).then_some(Binodal::Leaf(*i)),
            Binodal::Node(c, ch) => {
                let kids: Vec<Binodal> = ch.iter().filter_map(|x| prune(x, keep)).collect();
                (!kids.is_empty()).then_some(Binodal::Node(*c, kids))
            }
        }
    }
    let pruned = prune(t, keep).ok_or_else(|| Error::Invalid("restriction to an empty input set".into()))?;
    pruned.canonicalize()
}

/// A tuple of unary trees indexed by input labels.
pub type Tuple<L> = BTreeMap<u32, TTree<L>>;

fn check_inputs<L>(tuple: &Tuple<L>, t: &Binodal) -> Result<()> {
    let keys: BTreeSet<u32> = tuple.keys().copied().collect();
    if keys != t.leaf_set() {
        return Err(Error::Invalid(format!("tuple inputs {keys:?} do not match the leaves of {t}")));
    }
    Ok(())
}

/// Recursive membership test of a tuple in the carrier of `t`.
pub fn membership<O: LabelOperad>(tr: &Trees<'_, O>, tuple: &Tuple<O::Label>, t: &Binodal) -> Result<bool> {
    check_inputs(tuple, t)?;
    Ok(member(tr, tuple, t))
}

fn member<O: LabelOperad>(tr: &Trees<'_, O>, tuple: &Tuple<O::Label>, t: &Binodal) -> bool {
    match t {
        Binodal::Leaf(_) => true,
        Binodal::Node(color, ch) => {
            if !ch.iter().all(|c| member(tr, tuple, c)) {
                return false;
            }
            if *color == Color::White {
                return true;
            }
            let factors: Vec<TTree<O::Label>> = ch
                .iter()
                .map(|c| {
                    let comps: Vec<TTree<O::Label>> = c.leaves().iter().map(|i| tuple[i].clone()).collect();
                    tr.mlf(&comps)
                })
                .collect();
            tr.recover_from_axial(&factors).is_some()
        }
    }
}

/// Membership through restrictions to all subsets of at most three inputs.
pub fn triple_membership<O: LabelOperad>(tr: &Trees<'_, O>, tuple: &Tuple<O::Label>, t: &Binodal) -> Result<bool> {
    check_inputs(tuple, t)?;
    let leaves: Vec<u32> = t.leaf_set().into_iter().collect();
    let n = leaves.len();
    for mask in 1u32..(1 << n) {
        if mask.count_ones() > 3 {
            continue;
        }
        let keep: BTreeSet<u32> = (0..n).filter(|b| mask & (1 << b) != 0).map(|b| leaves[b]).collect();
        let sub_t = restrict_binodal(t, &keep)?;
        let sub: Tuple<O::Label> = keep.iter().map(|i| (*i, tuple[i].clone())).collect();
        if !member(tr, &sub, &sub_t) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The shapes of binodal trees on three inputs. A split `[a, b, c]` pairs
/// `a` and `b` at the upper node and attaches `c` at the root, with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape3 {
    WhiteCorolla,
    BlackCorolla,
    /// Black node over a black root.
    BlackOverBlack([u32; 3]),
    /// White node over a black root.
    WhiteOverBlack([u32; 3]),
    /// Black node over a white root.
    BlackOverWhite([u32; 3]),
}

impl Shape3 {
    pub fn classify(t: &Binodal) -> Result<Shape3> {
        let t = t.canonicalize()?;
        let bad = || Error::Invalid(format!("{t} is not a binodal tree on three inputs"));
        let Binodal::Node(root, ch) = &t else { return Err(bad()) };
        match ch.as_slice() {
            [Binodal::Leaf(_), Binodal::Leaf(_), Binodal::Leaf(_)] => {
                Ok(if *root == Color::Black { Shape3::BlackCorolla } else { Shape3::WhiteCorolla })
            }
            [x, y] => {
                let (pair, single) = match (x, y) {
                    (Binodal::Node(c, p), Binodal::Leaf(s)) | (Binodal::Leaf(s), Binodal::Node(c, p)) => ((c, p), *s),
                    _ => return Err(bad()),
                };
                let [Binodal::Leaf(a), Binodal::Leaf(b)] = pair.1.as_slice() else { return Err(bad()) };
                let split = [*a.min(b), *a.max(b), single];
                match (pair.0, root) {
                    (Color::Black, Color::Black) => Ok(Shape3::BlackOverBlack(split)),
                    (Color::White, Color::Black) => Ok(Shape3::WhiteOverBlack(split)),
                    (Color::Black, Color::White) => Ok(Shape3::BlackOverWhite(split)),
                    (Color::White, Color::White) => Err(bad()),
                }
            }
            _ => Err(bad()),
        }
    }

    /// The tree of this shape on the given leaves.
    pub fn tree(&self, leaves: [u32; 3]) -> Binodal {
        let l = |i: u32| Binodal::Leaf(i);
        let t = match *self {
            Shape3::WhiteCorolla => Binodal::white(leaves.iter().map(|&i| l(i)).collect()),
            Shape3::BlackCorolla => Binodal::black(leaves.iter().map(|&i| l(i)).collect()),
            Shape3::BlackOverBlack([a, b, c]) => Binodal::black(vec![Binodal::black(vec![l(a), l(b)]), l(c)]),
            Shape3::WhiteOverBlack([a, b, c]) => Binodal::black(vec![Binodal::white(vec![l(a), l(b)]), l(c)]),
            Shape3::BlackOverWhite([a, b, c]) => Binodal::white(vec![Binodal::black(vec![l(a), l(b)]), l(c)]),
        };
        t.canonicalize().expect("shapes are valid trees")
    }
}

/// The eleven shapes on the inputs `a < b < c`.
pub fn shapes3(a: u32, b: u32, c: u32) -> Vec<Shape3> {
    let mut out = vec![Shape3::BlackCorolla, Shape3::WhiteCorolla];
    for split in [[a, b, c], [a, c, b], [b, c, a]] {
        out.push(Shape3::BlackOverBlack(split));
        out.push(Shape3::WhiteOverBlack(split));
        out.push(Shape3::BlackOverWhite(split));
    }
    out
}

/// Result of intersecting two carriers on three inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Intersection {
    Tree(Binodal),
    Empty,
    NotRepresentable,
}

/// Rows of the intersection table. `A` rows have a tree or a nonrepresentable
/// answer; `E` rows are empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TableRow {
    Same,
    A(u8),
    E(u8),
}

impl fmt::Display for TableRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableRow::Same => write!(f, "same"),
            TableRow::A(i) => write!(f, "A{i}"),
            TableRow::E(i) => write!(f, "E{i}"),
        }
    }
}

/// Looks up the intersection of the carriers of two trees on the same three inputs.
pub fn intersect3(t1: &Binodal, t2: &Binodal) -> Result<(TableRow, Intersection)> {
    let l1 = t1.leaf_set();
    if l1.len() != 3 || l1 != t2.leaf_set() {
        return Err(Error::Invalid("intersect3 needs two trees on the same three inputs".into()));
    }
    let leaves: Vec<u32> = l1.into_iter().collect();
    let leaves = [leaves[0], leaves[1], leaves[2]];
    let s1 = Shape3::classify(t1)?;
    let s2 = Shape3::classify(t2)?;
    let (row, shape) = lookup(s1, s2).or_else(|| lookup(s2, s1)).expect("the table covers every pair of shapes");
    let answer = match shape {
        Some(Some(s)) => Intersection::Tree(s.tree(leaves)),
        Some(None) => Intersection::NotRepresentable,
        None => Intersection::Empty,
    };
    Ok((row, answer))
}

/// One ordered table lookup: `None` when this order is not listed; the
/// inner value is `None` for an empty intersection and `Some(None)` when the
/// intersection is not a carrier.
#[allow(clippy::type_complexity)]
fn lookup(s1: Shape3, s2: Shape3) -> Option<(TableRow, Option<Option<Shape3>>)> {
    use Shape3::*;
    if s1 == s2 {
        return Some((TableRow::Same, Some(Some(s1))));
    }
    let tree = |row, s| Some((TableRow::A(row), Some(Some(s))));
    match (s1, s2) {
        (WhiteCorolla, s) => tree(1, s),
        (BlackCorolla, BlackOverBlack(p)) => tree(2, BlackOverBlack(p)),
        (BlackCorolla, BlackOverWhite(_)) => tree(3, BlackCorolla),
        (BlackCorolla, WhiteOverBlack(p)) => tree(4, BlackOverBlack(p)),
        (BlackOverBlack(p), BlackOverWhite(_)) => tree(5, BlackOverBlack(p)),
        (BlackOverBlack(p), WhiteOverBlack(q)) if p == q => tree(6, BlackOverBlack(p)),
        (WhiteOverBlack(p), BlackOverWhite(q)) if p == q => tree(7, BlackOverBlack(p)),
        (WhiteOverBlack(p), BlackOverWhite(_)) => tree(8, WhiteOverBlack(p)),
        (BlackOverWhite(_), BlackOverWhite(_)) => Some((TableRow::A(9), Some(None))),
        (BlackOverBlack(_), BlackOverBlack(_)) => Some((TableRow::E(1), None)),
        (BlackOverBlack(_), WhiteOverBlack(_)) => Some((TableRow::E(2), None)),
        (WhiteOverBlack(_), WhiteOverBlack(_)) => Some((TableRow::E(3), None)),
        _ => None,
    }
}

/// Membership of one tuple of three unary trees (inputs `1, 2, 3`) in every
/// shape, in the order of [`shapes3`].
///
/// Shares the axial tests between shapes: a pair split `(a, b | c)` needs
/// `(x_a, x_b)` in the binary image for the black upper node and
/// `(mlf(x_a, x_b), x_c)` in the binary image for the black root.
pub fn shape_memberships<O: LabelOperad>(tr: &Trees<'_, O>, tuple: &Tuple<O::Label>) -> Vec<bool> {
    let x = |i: u32| tuple[&i].clone();
    let in_image = |v: &[TTree<O::Label>]| tr.recover_from_axial(v).is_some();
    let mut out = vec![in_image(&[x(1), x(2), x(3)]), true];
    for [a, b, c] in [[1, 2, 3], [1, 3, 2], [2, 3, 1]] {
        let pair = in_image(&[x(a), x(b)]);
        let root = in_image(&[tr.mlf(&[x(a), x(b)]), x(c)]);
        out.extend([pair && root, root, pair]);
    }
    out
}

/// Outcome of checking one table row over a tuple universe.
#[derive(Debug, Clone, Serialize)]
pub struct RowCheck {
    pub row: String,
    /// Relabelled instances `(T1, T2)` of the row.
    pub instances: usize,
    /// Tuples lying in both carriers, summed over instances.
    pub joint_members: usize,
    pub passed: bool,
    pub detail: String,
}

/// Tuples of unary trees on the inputs `1, 2, 3`: axial images of ternary
/// trees with at most `ternary_nodes` nodes, a binary axial image next to a
/// unary tree in every position, and triples of unary trees with at most
/// `unary_total` nodes in total.
pub fn tuple_universe<O: LabelOperad>(
    tr: &Trees<'_, O>,
    ternary_nodes: usize,
    binary_nodes: usize,
    unary_nodes: usize,
    unary_total: usize,
) -> Result<Vec<Tuple<O::Label>>> {
    let label_arity = crate::t_construction::CHECK_LABEL_ARITY;
    let mut seen: HashSet<Vec<TTree<O::Label>>> = HashSet::new();
    tr.for_each_reduced(3, ternary_nodes, label_arity, &mut |t| {
        seen.insert(tr.axial_image(&t));
    })?;
    let unary: Vec<TTree<O::Label>> = tr.enumerate_reduced(1, unary_nodes.max(unary_total), label_arity)?;
    let mut pairs = Vec::new();
    tr.for_each_reduced(2, binary_nodes, label_arity, &mut |t| pairs.push(tr.axial_image(&t)))?;
    for p in &pairs {
        for u in unary.iter().filter(|u| u.nodes() <= unary_nodes) {
            seen.insert(vec![p[0].clone(), p[1].clone(), u.clone()]);
            seen.insert(vec![p[0].clone(), u.clone(), p[1].clone()]);
            seen.insert(vec![u.clone(), p[0].clone(), p[1].clone()]);
        }
    }
    for a in &unary {
        for b in &unary {
            if a.nodes() + b.nodes() > unary_total {
                continue;
            }
            for c in &unary {
                if a.nodes() + b.nodes() + c.nodes() <= unary_total {
                    seen.insert(vec![a.clone(), b.clone(), c.clone()]);
                }
            }
        }
    }
    let mut out: Vec<Vec<TTree<O::Label>>> = seen.into_iter().collect();
    out.sort();
    Ok(out.into_iter().map(|v| v.into_iter().enumerate().map(|(i, t)| (i as u32 + 1, t)).collect()).collect())
}

/// Checks every row of the intersection table by exhaustive membership over `tuples`.
///
/// Tree rows need the joint membership to coincide with the answer's
/// carrier. Empty rows need no joint member while both carriers are
/// inhabited. The nonrepresentable row needs the black corolla's carrier
/// inside the intersection and, for each of the eleven shapes, a tuple
/// telling the intersection apart from that shape's carrier.
pub fn verify_table<O: LabelOperad>(tr: &Trees<'_, O>, tuples: &[Tuple<O::Label>]) -> Result<Vec<RowCheck>> {
    let shapes = shapes3(1, 2, 3);
    let index = |s: &Shape3| shapes.iter().position(|x| x == s).expect("known shape");
    let table: Vec<Vec<bool>> = crate::par::map(tuples, |x| shape_memberships(tr, x));
    let mut rows: BTreeMap<TableRow, RowCheck> = BTreeMap::new();
    for &s1 in &shapes {
        for &s2 in &shapes {
            let (row, answer) = intersect3(&s1.tree([1, 2, 3]), &s2.tree([1, 2, 3]))?;
            if row == TableRow::Same || s1 > s2 {
                continue;
            }
            let entry = rows.entry(row).or_insert_with(|| RowCheck {
                row: row.to_string(),
                instances: 0,
                joint_members: 0,
                passed: true,
                detail: String::new(),
            });
            entry.instances += 1;
            let (i1, i2) = (index(&s1), index(&s2));
            let joint: Vec<bool> = table.iter().map(|m| m[i1] && m[i2]).collect();
            entry.joint_members += joint.iter().filter(|&&b| b).count();
            let fail = |entry: &mut RowCheck, msg: String| {
                if entry.passed {
                    entry.passed = false;
                    entry.detail = msg;
                }
            };
            match answer {
                Intersection::Tree(t3) => {
                    let i3 = index(&Shape3::classify(&t3)?);
                    if let Some(k) = (0..tuples.len()).find(|&k| joint[k] != table[k][i3]) {
                        fail(entry, format!("{s1:?} and {s2:?} disagree with {t3} at tuple {k}"));
                    }
                }
                Intersection::Empty => {
                    if let Some(k) = joint.iter().position(|&b| b) {
                        fail(entry, format!("{s1:?} and {s2:?} share tuple {k}"));
                    }
                    if !table.iter().any(|m| m[i1]) || !table.iter().any(|m| m[i2]) {
                        fail(entry, format!("{s1:?} or {s2:?} has no member in the universe"));
                    }
                }
                Intersection::NotRepresentable => {
                    let bc = index(&Shape3::BlackCorolla);
                    if let Some(k) = (0..tuples.len()).find(|&k| table[k][bc] && !joint[k]) {
                        fail(entry, format!("black corolla member {k} escapes {s1:?} and {s2:?}"));
                    }
                    for (i3, s3) in shapes.iter().enumerate() {
                        if !(0..tuples.len()).any(|k| joint[k] != table[k][i3]) {
                            fail(entry, format!("{s1:?} and {s2:?} look like the carrier of {s3:?}"));
                        }
                    }
                }
            }
        }
    }
    for r in rows.values_mut() {
        if r.passed {
            r.detail = format!("{} instances, {} joint members", r.instances, r.joint_members);
        }
    }
    Ok(rows.into_values().collect())
}

/// A member of the nonrepresentable intersection that lies outside the
/// carrier of every shape contained in it, if the universe has one.
pub fn nonrepresentable_witness<O: LabelOperad>(
    tr: &Trees<'_, O>,
    tuples: &[Tuple<O::Label>],
) -> Option<Tuple<O::Label>> {
    let shapes = shapes3(1, 2, 3);
    let t1 = Shape3::BlackOverWhite([1, 2, 3]).tree([1, 2, 3]);
    let t2 = Shape3::BlackOverWhite([1, 3, 2]).tree([1, 2, 3]);
    tuples
        .iter()
        .find(|x| {
            member(tr, x, &t1)
                && member(tr, x, &t2)
                && shapes.iter().all(|s| {
                    let t = s.tree([1, 2, 3]);
                    // Shapes whose carrier sits inside the intersection must miss the witness.
                    let inside = matches!(intersect3(&t, &t1), Ok((_, Intersection::Tree(ref u))) if *u == t)
                        && matches!(intersect3(&t, &t2), Ok((_, Intersection::Tree(ref u))) if *u == t);
                    !inside || !member(tr, x, &t)
                })
        })
        .cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoidal_words::Word;
    use crate::t_construction::WordOperad;

    fn b(s: &str) -> Binodal {
        Binodal::parse(s).unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(b("w(w(1,2),3)"), b("w(1,2,3)"));
        assert_eq!(b("b(3,b(2,1))"), b("b(b(1,2),3)"));
        assert_eq!(b("b(b(1,2),3)").to_string(), "b(b(1,2),3)");
        assert_eq!(
            Binodal::black(vec![Binodal::white(vec![Binodal::Leaf(2)]), Binodal::Leaf(1)]).canonicalize().unwrap(),
            b("b(1,2)")
        );
        assert!(Binodal::black(vec![]).canonicalize().is_err());
        let t = b("w(b(3,1),2)");
        assert_eq!(t.canonicalize().unwrap(), t);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_binodal(&[1]).unwrap().len(), 1);
        assert_eq!(enumerate_binodal(&[1, 2]).unwrap().len(), 2);
        let three = enumerate_binodal(&[1, 2, 3]).unwrap();
        assert_eq!(three.len(), 11);
        let from_shapes: BTreeSet<Binodal> = shapes3(1, 2, 3).iter().map(|s| s.tree([1, 2, 3])).collect();
        assert_eq!(three.into_iter().collect::<BTreeSet<_>>(), from_shapes);
        assert!(enumerate_binodal(&[1, 2, 3, 4, 5]).is_err());
        assert_eq!(enumerate_binodal(&[1, 2, 3, 4]).unwrap().len(), count_binodal4());
    }

    /// Counts binodal trees on four leaves by hand from the 26 leaf-labelled
    /// trees without unary nodes, coloring inner nodes so that no edge joins
    /// two white nodes.
    fn count_binodal4() -> usize {
        // One inner node: the corolla.
        let corolla = 2;
        // Two inner nodes: a cherry under a ternary root (6) or a ternary node under a binary root (4).
        let two = (6 + 4) * 3;
        // Three inner nodes: caterpillars (12) colored as a path, balanced trees (3) as a cherry of nodes.
        let three = 12 * 5 + 3 * 5;
        corolla + two + three
    }

    #[test]
    fn restriction_examples() {
        let keep = |v: &[u32]| v.iter().copied().collect::<BTreeSet<u32>>();
        assert_eq!(restrict_binodal(&b("b(b(1,2),3)"), &keep(&[1, 2])).unwrap(), b("b(1,2)"));
        assert_eq!(restrict_binodal(&b("w(b(1,2),3)"), &keep(&[2])).unwrap(), b("2"));
        assert_eq!(restrict_binodal(&b("w(b(w(1,2),3),4)"), &keep(&[1, 2, 4])).unwrap(), b("w(1,2,4)"));
        assert!(restrict_binodal(&b("b(1,2)"), &keep(&[])).is_err());
    }

    #[test]
    fn intersect3_examples() {
        let (row, r) = intersect3(&b("b(b(1,2),3)"), &b("b(b(1,3),2)")).unwrap();
        assert_eq!((row, r), (TableRow::E(1), Intersection::Empty));
        assert_eq!(intersect3(&b("b(1,2,3)"), &b("b(b(1,2),3)")).unwrap().1, Intersection::Tree(b("b(b(1,2),3)")));
        assert_eq!(intersect3(&b("w(b(1,2),3)"), &b("w(b(1,3),2)")).unwrap().1, Intersection::NotRepresentable);
        for s1 in shapes3(1, 2, 3) {
            for s2 in shapes3(1, 2, 3) {
                let (t1, t2) = (s1.tree([1, 2, 3]), s2.tree([1, 2, 3]));
                assert_eq!(intersect3(&t1, &t2).unwrap(), intersect3(&t2, &t1).unwrap());
            }
        }
        assert!(intersect3(&b("b(1,2)"), &b("w(1,2)")).is_err());
    }

    fn setup() -> WordOperad {
        WordOperad { k: 2 }
    }

    fn w(s: &str) -> Word {
        Word::parse(s, false).unwrap()
    }

    #[test]
    fn membership_on_corollas() {
        let op = setup();
        let tr = Trees::new(&op);
        let unary = tr.enumerate_reduced(1, 3, 3).unwrap();
        let pairs: HashSet<Vec<TTree<Word>>> =
            tr.enumerate_reduced(2, 4, 3).unwrap().iter().map(|t| tr.axial_image(t)).collect();
        for x in &unary {
            for y in &unary {
                let tuple: Tuple<Word> = [(1, x.clone()), (2, y.clone())].into_iter().collect();
                assert!(membership(&tr, &tuple, &b("w(1,2)")).unwrap());
                let expected = tr.recover_from_axial(&[x.clone(), y.clone()]).is_some();
                assert_eq!(membership(&tr, &tuple, &b("b(1,2)")).unwrap(), expected);
                if pairs.contains(&vec![x.clone(), y.clone()]) {
                    assert!(expected);
                }
            }
        }
        let corolla = tr.corolla(w("o1(1,2)"));
        let tuple: Tuple<Word> =
            tr.axial_image(&corolla).into_iter().enumerate().map(|(i, t)| (i as u32 + 1, t)).collect();
        assert!(membership(&tr, &tuple, &b("b(1,2)")).unwrap());
        assert!(membership(&tr, &tuple, &b("b(1,2,3)")).is_err());
    }

    #[test]
    fn triple_criterion_matches_recursion_on_four_inputs() {
        let op = setup();
        let tr = Trees::new(&op);
        let trees = enumerate_binodal(&[1, 2, 3, 4]).unwrap();
        let mut tuples = Vec::new();
        tr.for_each_reduced(4, 3, 3, &mut |t| tuples.push(tr.axial_image(&t))).unwrap();
        let unary = tr.enumerate_reduced(1, 2, 3).unwrap();
        let pairs: Vec<Vec<TTree<Word>>> =
            tr.enumerate_reduced(2, 2, 3).unwrap().iter().step_by(3).map(|t| tr.axial_image(t)).collect();
        for p in &pairs {
            for q in &pairs {
                tuples.push(vec![p[0].clone(), p[1].clone(), q[0].clone(), q[1].clone()]);
                tuples.push(vec![p[0].clone(), q[0].clone(), p[1].clone(), q[1].clone()]);
            }
            for u in &unary {
                tuples.push(vec![p[0].clone(), p[1].clone(), u.clone(), u.clone()]);
            }
        }
        let stride = tuples.len() / 200 + 1;
        let mut agree = 0;
        for x in tuples.iter().step_by(stride) {
            let tuple: Tuple<Word> = x.iter().enumerate().map(|(i, t)| (i as u32 + 1, t.clone())).collect();
            for t in &trees {
                assert_eq!(membership(&tr, &tuple, t).unwrap(), triple_membership(&tr, &tuple, t).unwrap(), "{t}");
                agree += 1;
            }
        }
        assert!(agree > 100 * trees.len());
    }

    #[test]
    fn restriction_is_compatible_with_membership() {
        let op = setup();
        let tr = Trees::new(&op);
        let tuples = tuple_universe(&tr, 3, 3, 2, 4).unwrap();
        for t in enumerate_binodal(&[1, 2, 3]).unwrap() {
            for x in &tuples {
                if !membership(&tr, x, &t).unwrap() {
                    continue;
                }
                for keep in [vec![1, 2], vec![1, 3], vec![2, 3], vec![2]] {
                    let keep: BTreeSet<u32> = keep.into_iter().collect();
                    let sub: Tuple<Word> = keep.iter().map(|i| (*i, x[i].clone())).collect();
                    assert!(membership(&tr, &sub, &restrict_binodal(&t, &keep).unwrap()).unwrap());
                }
            }
        }
    }

    #[test]
    fn shared_memberships_match_recursion() {
        let op = setup();
        let tr = Trees::new(&op);
        let shapes = shapes3(1, 2, 3);
        for x in tuple_universe(&tr, 3, 3, 2, 4).unwrap().iter().step_by(7) {
            let direct: Vec<bool> = shapes.iter().map(|s| membership(&tr, x, &s.tree([1, 2, 3])).unwrap()).collect();
            assert_eq!(shape_memberships(&tr, x), direct);
        }
    }

    #[test]
    fn table_holds_on_a_small_universe() {
        let op = setup();
        let tr = Trees::new(&op);
        let tuples = tuple_universe(&tr, 3, 3, 2, 4).unwrap();
        let rows = verify_table(&tr, &tuples).unwrap();
        assert_eq!(rows.len(), 12);
        for r in &rows {
            assert!(r.passed, "{}: {}", r.row, r.detail);
        }
    }
}
