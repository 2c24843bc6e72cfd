//! Cells of the tensor product of two monoidal-word operads.
//!
//! Every simplex of the complex on abelian two-fold words gets a pair of
//! binodal trees `(S, T)`. Decorating their black nodes by monoidal words
//! gives the objects of a Grothendieck poset, which maps to `M_{k+l}` by
//! merging the decorations.
//!
//! Fiber maps between decorations are computed from carriers: a decoration
//! of the source tree is turned into its generic tuple of unary trees, which
//! is then decomposed along the target tree and evaluated node by node.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::binodal::{intersect3, membership, restrict_binodal, Binodal, Color, Intersection, Tuple};
use crate::error::{Error, Result};
use crate::kcomplex::{self, Simplex};
use crate::monoidal_words::{
    abelianize, compose_words, enumerate_words, gens, leq, normalize, restrict_word, substitute, Word,
};
use crate::par;
use crate::t_construction::{TTree, Trees, WordOperad};
use crate::tensor_calculus::Side;
use crate::topology::FinitePoset;

/// Largest `k + l` accepted by [`grothendieck_poset`].
pub const MAX_TOTAL_OPS: u8 = 3;
/// Largest arity accepted by [`grothendieck_poset`].
pub const MAX_POSET_ARITY: usize = 3;

/// The pair of binodal trees attached to a vertex or simplex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SimplexTrees {
    pub s: Binodal,
    pub t: Binodal,
}

fn colored_tree(w: &Word, black_op: u8) -> Result<Binodal> {
    match w {
        Word::Gen(g) => Ok(Binodal::Leaf(*g)),
        Word::Op(o, ch) => {
            let kids = ch.iter().map(|c| colored_tree(c, black_op)).collect::<Result<Vec<_>>>()?;
            Ok(Binodal::Node(if *o == black_op { Color::Black } else { Color::White }, kids))
        }
        Word::Unit => Err(Error::Invalid("the unit word has no trees".into())),
    }
}

/// `S` reads the first operation as black, `T` reads the second as black.
pub fn word_to_trees(alpha: &Word) -> Result<SimplexTrees> {
    if alpha.max_op() > 2 || abelianize(alpha) != *alpha {
        return Err(Error::UnknownVertex(alpha.to_string()));
    }
    Ok(SimplexTrees { s: colored_tree(alpha, 1)?.canonicalize()?, t: colored_tree(alpha, 2)?.canonicalize()? })
}

/// Reads black nodes as the first operation and white nodes as the second.
pub fn trees_to_word(s: &Binodal) -> Word {
    fn go(t: &Binodal) -> Word {
        match t {
            Binodal::Leaf(i) => Word::Gen(*i),
            Binodal::Node(c, ch) => Word::Op(if *c == Color::Black { 1 } else { 2 }, ch.iter().map(go).collect()),
        }
    }
    abelianize(&go(s))
}

/// The finest partition of the generators into blocks along which every
/// vertex splits at its outermost operation `op`. Blocks are sorted by
/// least generator.
pub fn max_common_decomposition(vertices: &[Word], op: u8) -> Result<Vec<Vec<u32>>> {
    let first = vertices.first().ok_or_else(|| Error::Invalid("no vertices".into()))?;
    let all = first.generators();
    let mut blocks: Vec<BTreeSet<u32>> = all.iter().map(|&g| BTreeSet::from([g])).collect();
    for v in vertices {
        if v.generators() != all {
            return Err(Error::MismatchedGenerators);
        }
        let Word::Op(o, ch) = v else {
            return Err(Error::Invalid(format!("{v} has no outermost operation")));
        };
        if *o != op {
            return Err(Error::Invalid(format!("{v} does not have outermost operation {op}")));
        }
        for c in ch {
            let part: BTreeSet<u32> = c.generators().into_iter().collect();
            let (touching, rest): (Vec<_>, Vec<_>) = blocks.into_iter().partition(|b| !b.is_disjoint(&part));
            let merged = touching.into_iter().flatten().collect();
            blocks = rest;
            blocks.push(merged);
        }
    }
    let mut out: Vec<Vec<u32>> = blocks.into_iter().map(|b| b.into_iter().collect()).collect();
    out.sort();
    Ok(out)
}

fn restrict_all(vs: &[Word], block: &[u32]) -> Vec<Word> {
    let set: BTreeSet<Word> = vs.iter().map(|v| restrict_word(v, block, true)).collect();
    set.into_iter().collect()
}

fn recursive_trees(vs: &[Word]) -> Result<SimplexTrees> {
    let g = vs[0].generators();
    if g.len() == 1 {
        return Ok(SimplexTrees { s: Binodal::Leaf(g[0]), t: Binodal::Leaf(g[0]) });
    }
    let ones: Vec<Word> = vs.iter().filter(|v| v.root_op() == Some(1)).cloned().collect();
    let twos: Vec<Word> = vs.iter().filter(|v| v.root_op() == Some(2)).cloned().collect();
    let parts = |blocks: &[Vec<u32>]| -> Result<Vec<SimplexTrees>> {
        blocks.iter().map(|b| recursive_trees(&restrict_all(vs, b))).collect()
    };
    let (s, t) = if !ones.is_empty() && !twos.is_empty() {
        let s_parts = parts(&max_common_decomposition(&ones, 1)?)?;
        let t_parts = parts(&max_common_decomposition(&twos, 2)?)?;
        (
            Binodal::black(s_parts.into_iter().map(|p| p.s).collect()),
            Binodal::black(t_parts.into_iter().map(|p| p.t).collect()),
        )
    } else if twos.is_empty() {
        let p = parts(&max_common_decomposition(vs, 1)?)?;
        (Binodal::black(p.iter().map(|x| x.s.clone()).collect()), Binodal::white(p.into_iter().map(|x| x.t).collect()))
    } else {
        let p = parts(&max_common_decomposition(vs, 2)?)?;
        (Binodal::white(p.iter().map(|x| x.s.clone()).collect()), Binodal::black(p.into_iter().map(|x| x.t).collect()))
    };
    Ok(SimplexTrees { s: s.canonicalize()?, t: t.canonicalize()? })
}

/// The pair of trees of a simplex, built recursively from the outermost
/// operations of its vertices.
pub fn simplex_trees(sigma: &Simplex) -> Result<SimplexTrees> {
    let vs = sigma.vertices();
    let m = vs.first().ok_or(Error::NotASimplex)?.arity();
    if !kcomplex::is_simplex(m, vs)? {
        return Err(Error::NotASimplex);
    }
    recursive_trees(vs)
}

/// True when the vertices span a simplex, that is when their carriers meet.
pub fn simplex_nonempty(vs: &[Word]) -> Result<bool> {
    let Some(first) = vs.first() else { return Ok(false) };
    kcomplex::is_simplex(first.arity(), vs)
}

/// Decides `carrier(small) ⊆ carrier(big)` from the restrictions to all
/// pairs and triples of inputs.
pub fn carrier_contains(small: &Binodal, big: &Binodal) -> Result<bool> {
    let leaves: Vec<u32> = small.leaf_set().into_iter().collect();
    if small.leaf_set() != big.leaf_set() {
        return Err(Error::MismatchedGenerators);
    }
    let n = leaves.len();
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones();
        if !(2..=3).contains(&size) {
            continue;
        }
        let keep: BTreeSet<u32> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| leaves[i]).collect();
        let rs = restrict_binodal(small, &keep)?;
        let rb = restrict_binodal(big, &keep)?;
        let ok = if size == 2 {
            rs == rb || matches!(rb, Binodal::Node(Color::White, _))
        } else {
            matches!(intersect3(&rs, &rb)?.1, Intersection::Tree(x) if x == rs)
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Containment of both carriers of a pair.
pub fn pair_contains(small: &SimplexTrees, big: &SimplexTrees) -> Result<bool> {
    Ok(carrier_contains(&small.s, &big.s)? && carrier_contains(&small.t, &big.t)?)
}

/// Arities of the black nodes in preorder, children by least leaf.
pub fn black_arities(t: &Binodal) -> Vec<usize> {
    fn go(t: &Binodal, out: &mut Vec<usize>) {
        if let Binodal::Node(c, ch) = t {
            if *c == Color::Black {
                out.push(ch.len());
            }
            ch.iter().for_each(|x| go(x, out));
        }
    }
    let mut out = Vec::new();
    go(t, &mut out);
    out
}

/// All decorations of the black nodes of `t` by `k`-fold words, in the
/// order of [`black_arities`].
pub fn decorations(k: u8, t: &Binodal) -> Result<Vec<Vec<Word>>> {
    let mut out: Vec<Vec<Word>> = vec![Vec::new()];
    for r in black_arities(t) {
        let words = enumerate_words(k, &gens(r), false)?;
        out = out
            .into_iter()
            .flat_map(|prefix| {
                words.iter().map(move |w| {
                    let mut p = prefix.clone();
                    p.push(w.clone());
                    p
                })
            })
            .collect();
    }
    Ok(out)
}

/// Full composite of a tree over words, with generator `i` for input `i`.
pub fn evaluate(t: &TTree<Word>) -> Result<Word> {
    match t {
        TTree::Input(i) => Ok(Word::Gen(*i)),
        TTree::Node(x, ch) => {
            let subs = ch
                .iter()
                .enumerate()
                .map(|(j, (_, c))| Ok((j as u32 + 1, evaluate(c)?)))
                .collect::<Result<HashMap<u32, Word>>>()?;
            substitute(x, &subs, false)
        }
    }
}

/// The tuple of unary trees of a decorated tree: black node trees in the
/// order of [`black_arities`], and a unary tree on each leaf.
pub fn decorated_tuple(
    tr: &Trees<'_, WordOperad>,
    t: &Binodal,
    node_trees: &[TTree<Word>],
    leaf_trees: &BTreeMap<u32, TTree<Word>>,
) -> Result<Tuple<Word>> {
    fn go(
        tr: &Trees<'_, WordOperad>,
        t: &Binodal,
        it: &mut std::slice::Iter<'_, TTree<Word>>,
        leaf_trees: &BTreeMap<u32, TTree<Word>>,
    ) -> Result<Tuple<Word>> {
        match t {
            Binodal::Leaf(i) => Ok(Tuple::from([(*i, leaf_trees.get(i).cloned().unwrap_or_else(TTree::trivial))])),
            Binodal::Node(Color::White, ch) => {
                let mut out = Tuple::new();
                for c in ch {
                    out.extend(go(tr, c, it, leaf_trees)?);
                }
                Ok(out)
            }
            Binodal::Node(Color::Black, ch) => {
                let node = it.next().ok_or_else(|| Error::Invalid("too few node decorations".into()))?;
                if node.arity() != ch.len() {
                    return Err(Error::Invalid("decoration arity does not match the node".into()));
                }
                let axial = tr.axial_image(node);
                let mut out = Tuple::new();
                for (j, c) in ch.iter().enumerate() {
                    for (i, x) in go(tr, c, it, leaf_trees)? {
                        out.insert(i, tr.compose_unary(&axial[j], &x));
                    }
                }
                Ok(out)
            }
        }
    }
    let mut it = node_trees.iter();
    let out = go(tr, t, &mut it, leaf_trees)?;
    if it.next().is_some() {
        return Err(Error::Invalid("too many node decorations".into()));
    }
    Ok(out)
}

/// The tuple of the generic point of the cell of a word decoration.
pub fn generic_tuple(tr: &Trees<'_, WordOperad>, t: &Binodal, words: &[Word]) -> Result<Tuple<Word>> {
    let corollas: Vec<TTree<Word>> = words.iter().map(|w| tr.corolla(w.clone())).collect();
    decorated_tuple(tr, t, &corollas, &BTreeMap::new())
}

/// The word decoration of the cell of `t` containing `tuple`, or `None`
/// when the tuple is not in the carrier of `t`.
pub fn node_words(tr: &Trees<'_, WordOperad>, tuple: &Tuple<Word>, t: &Binodal) -> Result<Option<Vec<Word>>> {
    fn go(tr: &Trees<'_, WordOperad>, tuple: &Tuple<Word>, t: &Binodal, out: &mut Vec<Word>) -> Result<bool> {
        let Binodal::Node(color, ch) = t else { return Ok(true) };
        if *color == Color::Black {
            let factors: Vec<TTree<Word>> =
                ch.iter().map(|c| tr.mlf(&c.leaves().iter().map(|i| tuple[i].clone()).collect::<Vec<_>>())).collect();
            match tr.recover_from_axial(&factors) {
                Some(node) => out.push(evaluate(&node)?),
                None => return Ok(false),
            }
        }
        for c in ch {
            if !go(tr, tuple, c, out)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
    if tuple.keys().copied().collect::<BTreeSet<u32>>() != t.leaf_set() {
        return Err(Error::MismatchedGenerators);
    }
    let mut out = Vec::new();
    Ok(go(tr, tuple, t, &mut out)?.then_some(out))
}

/// Transports a word decoration of `from` to the cell of `to` containing
/// its generic point. Requires `carrier(from) ⊆ carrier(to)`.
pub fn fiber_map(k: u8, from: &Binodal, words: &[Word], to: &Binodal) -> Result<Vec<Word>> {
    let op = WordOperad { k };
    let tr = Trees::new(&op);
    let tuple = generic_tuple(&tr, from, words)?;
    node_words(&tr, &tuple, to)?
        .ok_or_else(|| Error::Invalid(format!("the carrier of {from} is not inside that of {to}")))
}

fn words_leq(a: &[Word], b: &[Word]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| leq(x, y).unwrap_or(false))
}

/// An object of the Grothendieck poset: a simplex with word decorations of
/// the black nodes of its two trees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrothendieckObject {
    pub simplex: usize,
    pub a: Vec<Word>,
    pub b: Vec<Word>,
}

/// The Grothendieck poset `I(k,l)(m)` with the data used to build it.
#[derive(Debug, Clone)]
pub struct Grothendieck {
    pub k: u8,
    pub l: u8,
    pub m: usize,
    pub simplices: Vec<Simplex>,
    pub trees: Vec<SimplexTrees>,
    pub objects: Vec<GrothendieckObject>,
    pub poset: FinitePoset,
    index: HashMap<GrothendieckObject, usize>,
}

fn join(ws: &[Word]) -> String {
    ws.iter().map(Word::to_string).collect::<Vec<_>>().join(" ")
}

impl Grothendieck {
    pub fn render(&self, o: &GrothendieckObject) -> String {
        format!("{} | {} | {}", self.simplices[o.simplex], join(&o.a), join(&o.b))
    }

    pub fn find(&self, o: &GrothendieckObject) -> Option<usize> {
        self.index.get(o).copied()
    }

    /// Indices of the objects over the given simplex.
    pub fn fiber(&self, simplex: usize) -> Vec<usize> {
        (0..self.objects.len()).filter(|&i| self.objects[i].simplex == simplex).collect()
    }

    pub fn simplex_index(&self, s: &Simplex) -> Option<usize> {
        self.simplices.iter().position(|x| x == s)
    }
}

/// Objects over a face: `a ≤ b` tables after mapping the source decoration.
struct FaceMaps {
    a_le: Vec<Vec<bool>>,
    b_le: Vec<Vec<bool>>,
}

fn face_maps(k: u8, from: &Binodal, decs: &[Vec<Word>], to: &Binodal, targets: &[Vec<Word>]) -> Result<Vec<Vec<bool>>> {
    decs.iter()
        .map(|d| {
            let image = fiber_map(k, from, d, to)?;
            Ok(targets.iter().map(|t| words_leq(&image, t)).collect())
        })
        .collect()
}

fn check_bounds(k: u8, l: u8, m: usize) -> Result<()> {
    if k == 0 || l == 0 {
        return Err(Error::Invalid("k and l must be positive".into()));
    }
    if k + l > MAX_TOTAL_OPS {
        return Err(Error::Bound { what: "k + l", value: (k + l) as usize, max: MAX_TOTAL_OPS as usize });
    }
    if m == 0 || m > MAX_POSET_ARITY {
        return Err(Error::Bound { what: "m", value: m, max: MAX_POSET_ARITY });
    }
    Ok(())
}

/// Builds `I(k,l)(m)`. An object over `σ` lies below an object over a face
/// `τ` of `σ` when the transported decoration lies below the target one.
pub fn grothendieck_poset(k: u8, l: u8, m: usize) -> Result<Grothendieck> {
    check_bounds(k, l, m)?;
    let simplices: Vec<Simplex> = kcomplex::enumerate_simplices(m)?.concat();
    let trees = par::map(&simplices, simplex_trees).into_iter().collect::<Result<Vec<_>>>()?;
    let decs_a = trees.iter().map(|p| decorations(k, &p.s)).collect::<Result<Vec<_>>>()?;
    let decs_b = trees.iter().map(|p| decorations(l, &p.t)).collect::<Result<Vec<_>>>()?;
    let mut objects = Vec::new();
    let mut coords = Vec::new();
    for (i, (da, db)) in decs_a.iter().zip(&decs_b).enumerate() {
        for (ia, a) in da.iter().enumerate() {
            for (ib, b) in db.iter().enumerate() {
                objects.push(GrothendieckObject { simplex: i, a: a.clone(), b: b.clone() });
                coords.push((ia, ib));
            }
        }
    }
    let n = simplices.len();
    let idx: Vec<usize> = (0..n).collect();
    let per_simplex: Vec<Result<HashMap<usize, FaceMaps>>> = par::map(&idx, |&i| {
        let mut out = HashMap::new();
        for j in 0..n {
            if simplices[j].is_face_of(&simplices[i]) {
                let a_le = face_maps(k, &trees[i].s, &decs_a[i], &trees[j].s, &decs_a[j])?;
                let b_le = face_maps(l, &trees[i].t, &decs_b[i], &trees[j].t, &decs_b[j])?;
                out.insert(j, FaceMaps { a_le, b_le });
            }
        }
        Ok(out)
    });
    let faces = per_simplex.into_iter().collect::<Result<Vec<_>>>()?;
    let names = objects.iter().map(|o| format!("{} | {} | {}", simplices[o.simplex], join(&o.a), join(&o.b))).collect();
    let poset = FinitePoset::from_leq(names, |x, y| {
        let (ox, oy) = (&objects[x], &objects[y]);
        match faces[ox.simplex].get(&oy.simplex) {
            Some(f) => f.a_le[coords[x].0][coords[y].0] && f.b_le[coords[x].1][coords[y].1],
            None => false,
        }
    })?;
    let index = objects.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
    Ok(Grothendieck { k, l, m, simplices, trees, objects, poset, index })
}

/// All vertices whose carrier pair contains that of the simplex.
pub fn saturation(sigma: &Simplex) -> Result<Simplex> {
    let pair = simplex_trees(sigma)?;
    let m = sigma.vertices()[0].arity();
    let mut vs = sigma.vertices().to_vec();
    for lambda in kcomplex::vertices(m)? {
        if !vs.contains(&lambda) && pair_contains(&pair, &word_to_trees(&lambda)?)? {
            vs.push(lambda);
        }
    }
    Ok(Simplex::new(vs))
}

/// The least vertex whose carrier contains that of the simplex: the
/// recoloring of `S` of the saturated simplex.
pub fn l_prime(sigma: &Simplex) -> Result<Word> {
    let sat = saturation(sigma)?;
    Ok(trees_to_word(&simplex_trees(&sat)?.s))
}

/// Merges decorations of a vertex pair into one `M_{k+l}` word: black
/// nodes of `S` carry `a`, white ones carry `b` with operations shifted by `k`.
pub fn merge_decorations(s: &Binodal, a: &[Word], b: &[Word], k: u8) -> Result<Word> {
    fn go(t: &Binodal, a: &mut std::slice::Iter<'_, Word>, b: &mut std::slice::Iter<'_, Word>, k: u8) -> Result<Word> {
        match t {
            Binodal::Leaf(i) => Ok(Word::Gen(*i)),
            Binodal::Node(c, ch) => {
                let short = || Error::Invalid("too few decorations".into());
                let w = match c {
                    Color::Black => a.next().ok_or_else(short)?.clone(),
                    Color::White => b.next().ok_or_else(short)?.map_ops(&|o| o + k),
                };
                let mut subs = HashMap::new();
                for (j, x) in ch.iter().enumerate() {
                    subs.insert(j as u32 + 1, go(x, a, b, k)?);
                }
                substitute(&w, &subs, false)
            }
        }
    }
    let (mut ia, mut ib) = (a.iter(), b.iter());
    let w = go(s, &mut ia, &mut ib, k)?;
    if ia.next().is_some() || ib.next().is_some() {
        return Err(Error::Invalid("too many decorations".into()));
    }
    Ok(w)
}

/// The image of every object under `L`, in object order.
pub fn l_images(g: &Grothendieck) -> Result<Vec<Word>> {
    let lps = par::map(&g.simplices, l_prime).into_iter().collect::<Result<Vec<_>>>()?;
    par::map(&g.objects, |o| {
        let lam = word_to_trees(&lps[o.simplex])?;
        let pair = &g.trees[o.simplex];
        let a = fiber_map(g.k, &pair.s, &o.a, &lam.s)?;
        let b = fiber_map(g.l, &pair.t, &o.b, &lam.t)?;
        merge_decorations(&lam.s, &a, &b, g.k)
    })
    .into_iter()
    .collect()
}

/// `L` of a single object.
pub fn l_functor(g: &Grothendieck, o: &GrothendieckObject) -> Result<Word> {
    let lam = word_to_trees(&l_prime(&g.simplices[o.simplex])?)?;
    let pair = &g.trees[o.simplex];
    let a = fiber_map(g.k, &pair.s, &o.a, &lam.s)?;
    let b = fiber_map(g.l, &pair.t, &o.b, &lam.t)?;
    merge_decorations(&lam.s, &a, &b, g.k)
}

/// Splits a `k + l`-fold word into its abelian shape and the decorations of
/// the maximal blocks of low and high operations.
pub fn split_word(gamma: &Word, k: u8) -> Result<(Word, Vec<Word>, Vec<Word>)> {
    fn block(w: &Word, low: bool, k: u8, frontier: &mut Vec<Word>) -> Word {
        match w {
            Word::Op(o, ch) if (*o <= k) == low => {
                Word::Op(*o, ch.iter().map(|c| block(c, low, k, frontier)).collect())
            }
            other => {
                frontier.push(other.clone());
                Word::Gen(frontier.len() as u32)
            }
        }
    }
    fn go(w: &Word, k: u8, a: &mut Vec<Word>, b: &mut Vec<Word>) -> Result<Word> {
        match w {
            Word::Gen(g) => Ok(Word::Gen(*g)),
            Word::Unit => Err(Error::Invalid("cannot split the unit word".into())),
            Word::Op(o, _) => {
                let low = *o <= k;
                let mut frontier = Vec::new();
                let raw = block(w, low, k, &mut frontier);
                let mut order: Vec<usize> = (0..frontier.len()).collect();
                order.sort_by_key(|&i| frontier[i].min_gen());
                let mut rank = vec![0u32; frontier.len()];
                for (pos, &i) in order.iter().enumerate() {
                    rank[i] = pos as u32 + 1;
                }
                let local = normalize(&raw.relabel(&|g| rank[g as usize - 1]), false)?;
                if low {
                    a.push(local);
                } else {
                    b.push(local.map_ops(&|o| o - k));
                }
                let kids = order.iter().map(|&i| go(&frontier[i], k, a, b)).collect::<Result<Vec<_>>>()?;
                Ok(Word::Op(if low { 1 } else { 2 }, kids))
            }
        }
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let shape = go(gamma, k, &mut a, &mut b)?;
    Ok((abelianize(&shape), a, b))
}

/// The candidate terminal object of `L/γ`: the vertex of `γ`'s block shape
/// decorated by the blocks of `γ`.
pub fn terminal_in_over(g: &Grothendieck, gamma: &Word) -> Result<usize> {
    let (shape, a, b) = split_word(gamma, g.k)?;
    let simplex =
        g.simplex_index(&Simplex::new(vec![shape.clone()])).ok_or_else(|| Error::UnknownVertex(shape.to_string()))?;
    g.find(&GrothendieckObject { simplex, a, b })
        .ok_or_else(|| Error::Invalid(format!("no object decorates {shape} as {gamma}")))
}

/// One over-category `L/γ` and whether the candidate is terminal in it.
#[derive(Debug, Clone, Serialize)]
pub struct OverCheck {
    pub gamma: String,
    pub size: usize,
    pub candidate: String,
    pub maps_to_gamma: bool,
    pub terminal: bool,
}

/// The coarse cells: for each `γ ∈ M_{k+l}(m)`, the objects `o` with `L(o) ≤ γ`.
pub fn coarse_cells(g: &Grothendieck, images: &[Word]) -> Result<Vec<(Word, Vec<usize>)>> {
    let gammas = enumerate_words(g.k + g.l, &gens(g.m), false)?;
    Ok(par::map(&gammas, |gamma| {
        let cell = (0..images.len()).filter(|&o| leq(&images[o], gamma).unwrap_or(false)).collect();
        (gamma.clone(), cell)
    }))
}

/// Checks that every `L/γ` has the constructed object as a terminal object.
pub fn check_terminal_objects(g: &Grothendieck, images: &[Word]) -> Result<Vec<OverCheck>> {
    coarse_cells(g, images)?
        .iter()
        .map(|(gamma, cell)| {
            let cand = terminal_in_over(g, gamma)?;
            let terminal = cell.contains(&cand) && cell.iter().all(|&o| g.poset.leq(o, cand));
            Ok(OverCheck {
                gamma: gamma.to_string(),
                size: cell.len(),
                candidate: g.render(&g.objects[cand]),
                maps_to_gamma: images[cand] == *gamma,
                terminal,
            })
        })
        .collect()
}

/// Number of order relations checked, or the first pair where `L` is not monotone.
pub fn check_l_monotone(g: &Grothendieck, images: &[Word]) -> std::result::Result<usize, (usize, usize)> {
    let n = g.objects.len();
    let mut count = 0;
    for x in 0..n {
        for y in 0..n {
            if g.poset.leq(x, y) {
                if !leq(&images[x], &images[y]).unwrap_or(false) {
                    return Err((x, y));
                }
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Checks `F(γ1) ∩ F(γ2) ⊆ ⋃_{γ3 ≤ γ1, γ2} F(γ3)` for every pair of cells.
pub fn check_intersection_closure(cells: &[(Word, Vec<usize>)]) -> std::result::Result<usize, String> {
    let sets: Vec<BTreeSet<usize>> = cells.iter().map(|(_, c)| c.iter().copied().collect()).collect();
    let mut checked = 0;
    for (i, (g1, _)) in cells.iter().enumerate() {
        for (j, (g2, _)) in cells.iter().enumerate() {
            let below: Vec<usize> = (0..cells.len())
                .filter(|&h| leq(&cells[h].0, g1).unwrap_or(false) && leq(&cells[h].0, g2).unwrap_or(false))
                .collect();
            for o in sets[i].intersection(&sets[j]) {
                if !below.iter().any(|&h| sets[h].contains(o)) {
                    return Err(format!("object {o} in F({g1}) and F({g2}) is in no common lower cell"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

fn compositions_of(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    (1..=total)
        .flat_map(|first| {
            compositions_of(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Checks `L(o)·(L(o_i)) ≤ γ·(φ_i)` whenever `L(o) ≤ γ` and `L(o_i) ≤ φ_i`,
/// for all compositions of total arity at most `max_arity`. `images[m]`
/// holds the `L` images in arity `m`.
pub fn check_operad_compatibility(
    kl: u8,
    images: &[Vec<Word>],
    max_arity: usize,
) -> std::result::Result<usize, String> {
    let image_sets: Vec<Vec<Word>> =
        images.iter().map(|v| v.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()).collect();
    let words = |m: usize| enumerate_words(kl, &gens(m), false).map_err(|e| e.to_string());
    let mut checked = 0;
    for total in 1..=max_arity {
        for n in 1..=total {
            let outer = words(n)?;
            for arities in compositions_of(total, n) {
                let inner: Vec<Vec<Word>> = arities.iter().map(|&m| words(m)).collect::<std::result::Result<_, _>>()?;
                let mut pairs: Vec<Vec<(Word, Word)>> = Vec::new();
                for (slot, &m) in arities.iter().enumerate() {
                    let mut v = Vec::new();
                    for phi in &inner[slot] {
                        for y in &image_sets[m] {
                            if leq(y, phi).unwrap_or(false) {
                                v.push((y.clone(), phi.clone()));
                            }
                        }
                    }
                    pairs.push(v);
                }
                for gamma in &outer {
                    for x in image_sets[n].iter().filter(|x| leq(x, gamma).unwrap_or(false)) {
                        let mut choice = vec![0usize; n];
                        loop {
                            let ys: Vec<Word> = (0..n).map(|s| pairs[s][choice[s]].0.clone()).collect();
                            let phis: Vec<Word> = (0..n).map(|s| pairs[s][choice[s]].1.clone()).collect();
                            let lhs = compose_words(x, &ys, false).map_err(|e| e.to_string())?;
                            let rhs = compose_words(gamma, &phis, false).map_err(|e| e.to_string())?;
                            if !leq(&lhs, &rhs).unwrap_or(false) {
                                return Err(format!("{x}·({}) is not below {gamma}·({})", join(&ys), join(&phis)));
                            }
                            checked += 1;
                            let mut s = 0;
                            while s < n {
                                choice[s] += 1;
                                if choice[s] < pairs[s].len() {
                                    break;
                                }
                                choice[s] = 0;
                                s += 1;
                            }
                            if s == n {
                                break;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(checked)
}

/// A term over the two tree operads: `A` nodes carry trees over `k`-fold
/// words and `B` nodes trees over `l`-fold words. Children follow the
/// inputs of the node tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MixedTerm {
    Input(u32),
    Node(Side, TTree<Word>, Vec<MixedTerm>),
}

impl MixedTerm {
    /// The abelian two-fold word of the term: `A` nodes read as the first
    /// operation, `B` nodes as the second.
    pub fn epsilon(&self) -> Result<Word> {
        fn go(t: &MixedTerm) -> Result<Word> {
            match t {
                MixedTerm::Input(i) => Ok(Word::Gen(*i)),
                MixedTerm::Node(side, x, ch) => {
                    let op = side.word_op();
                    let shape = evaluate(x)?.map_ops(&|_| op);
                    let mut subs = HashMap::new();
                    for (j, c) in ch.iter().enumerate() {
                        subs.insert(j as u32 + 1, go(c)?);
                    }
                    substitute(&shape, &subs, true)
                }
            }
        }
        go(self)
    }
}

/// The unary parts of a term: for each input, the product of the axial
/// components of the `A` nodes on its path, and likewise for `B`.
pub fn cell_forward(
    tra: &Trees<'_, WordOperad>,
    trb: &Trees<'_, WordOperad>,
    t: &MixedTerm,
) -> Result<(Tuple<Word>, Tuple<Word>)> {
    fn go(
        tra: &Trees<'_, WordOperad>,
        trb: &Trees<'_, WordOperad>,
        t: &MixedTerm,
        pa: &TTree<Word>,
        pb: &TTree<Word>,
        out: &mut (Tuple<Word>, Tuple<Word>),
    ) -> Result<()> {
        match t {
            MixedTerm::Input(i) => {
                if out.0.insert(*i, pa.clone()).is_some() {
                    return Err(Error::DuplicateGenerator(*i));
                }
                out.1.insert(*i, pb.clone());
                Ok(())
            }
            MixedTerm::Node(side, x, ch) => {
                if x.arity() != ch.len() {
                    return Err(Error::Invalid("node tree arity does not match its children".into()));
                }
                let tr = if *side == Side::A { tra } else { trb };
                let axial = tr.axial_image(x);
                for (j, c) in ch.iter().enumerate() {
                    match side {
                        Side::A => go(tra, trb, c, &tra.compose_unary(pa, &axial[j]), pb, out)?,
                        Side::B => go(tra, trb, c, pa, &trb.compose_unary(pb, &axial[j]), out)?,
                    }
                }
                Ok(())
            }
        }
    }
    let mut out = (Tuple::new(), Tuple::new());
    go(tra, trb, t, &TTree::trivial(), &TTree::trivial(), &mut out)?;
    Ok(out)
}

/// Rebuilds a term from a pair in the carriers of `(S_α, T_α)`: each node
/// takes the maximal left factors of its branches, and the remainders sit
/// on the leaf edges with the `B` part above the `A` part.
pub fn cell_inverse(
    tra: &Trees<'_, WordOperad>,
    trb: &Trees<'_, WordOperad>,
    alpha: &Word,
    x: &Tuple<Word>,
    y: &Tuple<Word>,
) -> Result<MixedTerm> {
    fn go(
        tra: &Trees<'_, WordOperad>,
        trb: &Trees<'_, WordOperad>,
        s: &Binodal,
        x: &mut Tuple<Word>,
        y: &mut Tuple<Word>,
    ) -> Result<MixedTerm> {
        match s {
            Binodal::Leaf(i) => {
                let mut t = MixedTerm::Input(*i);
                if y[i] != TTree::trivial() {
                    t = MixedTerm::Node(Side::B, y[i].clone(), vec![t]);
                }
                if x[i] != TTree::trivial() {
                    t = MixedTerm::Node(Side::A, x[i].clone(), vec![t]);
                }
                Ok(t)
            }
            Binodal::Node(color, ch) => {
                let (side, tr, tuple) = match color {
                    Color::Black => (Side::A, tra, &mut *x),
                    Color::White => (Side::B, trb, &mut *y),
                };
                let factors: Vec<TTree<Word>> = ch
                    .iter()
                    .map(|c| tr.mlf(&c.leaves().iter().map(|i| tuple[i].clone()).collect::<Vec<_>>()))
                    .collect();
                let node = tr
                    .recover_from_axial(&factors)
                    .ok_or_else(|| Error::Invalid("pair is not in the carrier".into()))?;
                for (c, f) in ch.iter().zip(&factors) {
                    for i in c.leaves() {
                        let rest = tr.left_divide(f, &tuple[&i]).expect("a left factor divides");
                        tuple.insert(i, rest);
                    }
                }
                let kids = ch.iter().map(|c| go(tra, trb, c, x, y)).collect::<Result<Vec<_>>>()?;
                Ok(MixedTerm::Node(side, node, kids))
            }
        }
    }
    let pair = word_to_trees(alpha)?;
    if !membership(tra, x, &pair.s)? || !membership(trb, y, &pair.t)? {
        return Err(Error::Invalid(format!("pair is not in the carrier of {alpha}")));
    }
    let (mut x, mut y) = (x.clone(), y.clone());
    go(tra, trb, &pair.s, &mut x, &mut y)
}

/// Forward map checked against `α`.
pub fn cell_bijection(
    tra: &Trees<'_, WordOperad>,
    trb: &Trees<'_, WordOperad>,
    alpha: &Word,
    t: &MixedTerm,
) -> Result<(Tuple<Word>, Tuple<Word>)> {
    let eps = t.epsilon()?;
    if eps != *alpha {
        return Err(Error::PatternMismatch(format!("term has shape {eps}, expected {alpha}")));
    }
    cell_forward(tra, trb, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binodal::enumerate_binodal;
    use crate::monoidal_words::word_poset;
    use crate::topology::betti_numbers;
    use crate::topology::{contractibility_certificate, Certificate};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ab(s: &str) -> Word {
        Word::parse(s, true).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(s, false).unwrap()
    }

    fn b(s: &str) -> Binodal {
        Binodal::parse(s).unwrap()
    }

    fn simplex(ws: &[&str]) -> Simplex {
        Simplex::new(ws.iter().map(|s| ab(s)).collect())
    }

    #[test]
    fn word_to_trees_examples() {
        let p = word_to_trees(&ab("o1(1,2)")).unwrap();
        assert_eq!((p.s, p.t), (b("b(1,2)"), b("w(1,2)")));
        let p = word_to_trees(&ab("o1(o2(1,2),3)")).unwrap();
        assert_eq!((p.s, p.t), (b("b(w(1,2),3)"), b("w(b(1,2),3)")));
    }

    #[test]
    fn word_to_trees_is_injective_on_three_inputs() {
        let vs = kcomplex::vertices(3).unwrap();
        let pairs: BTreeSet<(String, String)> = vs
            .iter()
            .map(|v| {
                let p = word_to_trees(v).unwrap();
                assert_eq!(trees_to_word(&p.s), *v);
                (p.s.to_string(), p.t.to_string())
            })
            .collect();
        assert_eq!(vs.len(), 8);
        assert_eq!(pairs.len(), 8);
    }

    #[test]
    fn common_decompositions() {
        let vs = [ab("o1(1,2,3)"), ab("o1(o2(1,2),3)")];
        assert_eq!(max_common_decomposition(&vs, 1).unwrap(), vec![vec![1, 2], vec![3]]);
        assert_eq!(max_common_decomposition(&vs[..1], 1).unwrap(), vec![vec![1], vec![2], vec![3]]);
        assert!(max_common_decomposition(&vs, 2).is_err());
    }

    #[test]
    fn first_maximal_simplex_table() {
        let v = ["o1(1,2,3)", "o1(o2(1,2),3)", "o2(o1(2,3),1)", "o2(1,2,3)"];
        let table = [
            (vec![0], "b(1,2,3)", "w(1,2,3)"),
            (vec![1], "b(w(1,2),3)", "w(b(1,2),3)"),
            (vec![2], "w(b(2,3),1)", "b(w(2,3),1)"),
            (vec![3], "w(1,2,3)", "b(1,2,3)"),
            (vec![0, 1], "b(b(1,2),3)", "w(b(1,2),3)"),
            (vec![0, 2], "b(1,2,3)", "b(w(2,3),1)"),
            (vec![0, 3], "b(1,2,3)", "b(1,2,3)"),
            (vec![1, 2], "b(w(1,2),3)", "b(w(2,3),1)"),
            (vec![1, 3], "b(w(1,2),3)", "b(1,2,3)"),
            (vec![2, 3], "w(b(2,3),1)", "b(b(2,3),1)"),
            (vec![0, 1, 2], "b(b(1,2),3)", "b(w(2,3),1)"),
            (vec![0, 1, 3], "b(b(1,2),3)", "b(1,2,3)"),
            (vec![0, 2, 3], "b(1,2,3)", "b(b(2,3),1)"),
            (vec![1, 2, 3], "b(w(1,2),3)", "b(b(2,3),1)"),
            (vec![0, 1, 2, 3], "b(b(1,2),3)", "b(b(2,3),1)"),
        ];
        for (idx, s, t) in table {
            let sigma = simplex(&idx.iter().map(|&i| v[i]).collect::<Vec<_>>());
            let p = simplex_trees(&sigma).unwrap();
            assert_eq!((p.s, p.t), (b(s), b(t)), "{sigma}");
        }
    }

    #[test]
    fn edge_and_second_simplex() {
        let p = simplex_trees(&simplex(&["o1(1,2)", "o2(1,2)"])).unwrap();
        assert_eq!((p.s, p.t), (b("b(1,2)"), b("b(1,2)")));
        let second = ["o1(1,2,3)", "o1(o2(1,2),3)", "o2(o1(1,2),3)", "o2(1,2,3)"];
        let sigma = simplex(&second);
        for face in sigma.faces() {
            let has_edge = face.vertices().contains(&ab(second[1])) && face.vertices().contains(&ab(second[2]));
            if has_edge {
                let p = simplex_trees(&face).unwrap();
                assert_eq!((p.s, p.t), (b("b(b(1,2),3)"), b("b(b(1,2),3)")), "{face}");
            }
        }
    }

    #[test]
    fn nonsimplices_are_rejected() {
        let vs = [ab("o1(o2(1,2),3)"), ab("o1(o2(1,3),2)")];
        assert!(!simplex_nonempty(&vs).unwrap());
        assert!(simplex_nonempty(&vs[..1]).unwrap());
        assert_eq!(simplex_trees(&Simplex::new(vs.to_vec())), Err(Error::NotASimplex));
    }

    #[test]
    fn same_column_vertices_have_an_empty_carrier_intersection() {
        let vs = kcomplex::vertices(3).unwrap();
        for (i, x) in vs.iter().enumerate() {
            for y in &vs[i + 1..] {
                if kcomplex::column(x) != kcomplex::column(y) {
                    continue;
                }
                let (px, py) = (word_to_trees(x).unwrap(), word_to_trees(y).unwrap());
                let es = intersect3(&px.s, &py.s).unwrap().1 == Intersection::Empty;
                let et = intersect3(&px.t, &py.t).unwrap().1 == Intersection::Empty;
                assert!(es || et, "{x} {y}");
            }
        }
    }

    #[test]
    fn carriers_shrink_along_faces() {
        for level in kcomplex::enumerate_simplices(3).unwrap() {
            for sigma in level {
                let p = simplex_trees(&sigma).unwrap();
                for face in sigma.faces() {
                    assert!(pair_contains(&p, &simplex_trees(&face).unwrap()).unwrap(), "{sigma} {face}");
                }
            }
        }
    }

    #[test]
    fn containment_matches_generic_membership() {
        let op = WordOperad { k: 2 };
        let tr = Trees::new(&op);
        let trees = enumerate_binodal(&[1, 2, 3]).unwrap();
        for small in &trees {
            let generic: Vec<Tuple<Word>> =
                decorations(2, small).unwrap().iter().map(|d| generic_tuple(&tr, small, d).unwrap()).collect();
            for big in &trees {
                let contained = carrier_contains(small, big).unwrap();
                let all_in = generic.iter().all(|x| membership(&tr, x, big).unwrap());
                if contained {
                    assert!(all_in, "{small} {big}");
                }
            }
        }
    }

    #[test]
    fn fiber_maps_compose_and_keep_identities() {
        let dec = vec![w("o1(2,1)")];
        assert_eq!(fiber_map(1, &b("b(1,2)"), &dec, &b("b(1,2)")).unwrap(), dec);
        assert_eq!(fiber_map(1, &b("b(1,2)"), &dec, &b("w(1,2)")).unwrap(), Vec::<Word>::new());
        let bb = vec![w("o1(2,1)"), w("o1(1,2)")];
        assert_eq!(fiber_map(1, &b("b(b(1,2),3)"), &bb, &b("b(1,2,3)")).unwrap(), vec![w("o1(3,1,2)")]);
        let diag = vec![w("o1(2,1)")];
        assert_eq!(
            fiber_map(1, &b("b(w(1,3),w(2,4))"), &diag, &b("w(b(1,2),b(3,4))")).unwrap(),
            vec![w("o1(2,1)"), w("o1(2,1)")]
        );
        assert!(fiber_map(1, &b("w(1,2)"), &[], &b("b(1,2)")).is_err());
    }

    #[test]
    fn small_grothendieck_posets() {
        let g = grothendieck_poset(1, 1, 2).unwrap();
        assert_eq!(g.objects.len(), 8);
        let edge = g.simplex_index(&simplex(&["o1(1,2)", "o2(1,2)"])).unwrap();
        assert_eq!(g.fiber(edge).len(), 4);
        assert_eq!(betti_numbers(&g.poset).unwrap(), vec![1, 1]);
        assert!((0..8).all(|o| g.poset.strictly_above(o).len() + (0..8).filter(|&x| g.poset.lt(x, o)).count() == 2));
        let v1 = g.simplex_index(&simplex(&["o1(1,2)"])).unwrap();
        for e in g.fiber(edge) {
            let up: Vec<usize> = g.fiber(v1).into_iter().filter(|&v| g.poset.lt(e, v)).collect();
            assert_eq!(up.len(), 1);
            assert_eq!(g.objects[up[0]].a, g.objects[e].a);
        }
        let g = grothendieck_poset(1, 2, 2).unwrap();
        assert_eq!(g.objects.len(), 14);
        assert_eq!(betti_numbers(&g.poset).unwrap(), vec![1, 0, 1]);
        assert!(grothendieck_poset(2, 2, 2).is_err());
    }

    #[test]
    fn l_prime_examples() {
        assert_eq!(l_prime(&simplex(&["o2(o1(2,3),1)"])).unwrap(), ab("o2(o1(2,3),1)"));
        assert_eq!(l_prime(&simplex(&["o1(1,2)", "o2(1,2)"])).unwrap(), ab("o1(1,2)"));
        for level in kcomplex::enumerate_simplices(3).unwrap() {
            for sigma in level {
                let lp = l_prime(&sigma).unwrap();
                let sat = saturation(&sigma).unwrap();
                assert!(sat.vertices().contains(&lp), "{sigma}");
                for v in sat.vertices() {
                    assert!(crate::monoidal_words::leq_ab(&lp, v).unwrap(), "{sigma} {v}");
                }
                for face in sigma.faces() {
                    assert!(crate::monoidal_words::leq_ab(&lp, &l_prime(&face).unwrap()).unwrap(), "{sigma} {face}");
                }
            }
        }
    }

    #[test]
    fn l_functor_examples() {
        let g = grothendieck_poset(1, 1, 2).unwrap();
        let edge = g.simplex_index(&simplex(&["o1(1,2)", "o2(1,2)"])).unwrap();
        let o = GrothendieckObject { simplex: edge, a: vec![w("o1(1,2)")], b: vec![w("o1(1,2)")] };
        assert_eq!(l_functor(&g, &o).unwrap(), w("o1(1,2)"));
        let v = g.simplex_index(&simplex(&["o1(1,2)"])).unwrap();
        let o = GrothendieckObject { simplex: v, a: vec![w("o1(1,2)")], b: vec![] };
        assert_eq!(l_functor(&g, &o).unwrap(), w("o1(1,2)"));
        let images = l_images(&g).unwrap();
        assert!(check_l_monotone(&g, &images).is_ok());
    }

    #[test]
    fn split_examples() {
        let (shape, a, bb) = split_word(&w("o1(1,2)"), 1).unwrap();
        assert_eq!((shape, a, bb), (ab("o1(1,2)"), vec![w("o1(1,2)")], vec![]));
        let (shape, a, bb) = split_word(&w("o2(1,2)"), 1).unwrap();
        assert_eq!((shape, a, bb), (ab("o2(1,2)"), vec![], vec![w("o1(1,2)")]));
        let gamma = w("o3(o1(3,o2(2,1)),4)");
        let (shape, a, bb) = split_word(&gamma, 1).unwrap();
        let pair = word_to_trees(&shape).unwrap();
        assert_eq!(merge_decorations(&pair.s, &a, &bb, 1).unwrap(), gamma);
    }

    #[test]
    fn terminal_objects_in_small_cases() {
        for (k, l, m, failing) in [(1, 1, 1, 0), (1, 1, 2, 2), (1, 2, 2, 4)] {
            let g = grothendieck_poset(k, l, m).unwrap();
            let images = l_images(&g).unwrap();
            let checks = check_terminal_objects(&g, &images).unwrap();
            assert_eq!(checks.iter().filter(|c| !c.terminal).count(), failing, "{k} {l} {m}");
            let cells = coarse_cells(&g, &images).unwrap();
            assert!(check_intersection_closure(&cells).is_ok());
            for (gamma, cell) in &cells {
                let cert = contractibility_certificate(&g.poset.subposet(cell)).unwrap();
                assert!(!matches!(cert, Certificate::Inconclusive(_)), "{k} {l} {m} {gamma}");
            }
        }
    }

    #[test]
    fn coarse_cell_of_the_first_product() {
        let g = grothendieck_poset(1, 1, 2).unwrap();
        let images = l_images(&g).unwrap();
        let cells = coarse_cells(&g, &images).unwrap();
        let (_, cell) = cells.iter().find(|(gm, _)| *gm == w("o1(1,2)")).unwrap();
        let v = g.simplex_index(&simplex(&["o1(1,2)"])).unwrap();
        let edge = g.simplex_index(&simplex(&["o1(1,2)", "o2(1,2)"])).unwrap();
        let names: BTreeSet<String> = cell.iter().map(|&o| g.render(&g.objects[o])).collect();
        assert_eq!(cell.len(), 3, "{names:?}");
        assert!(cell.iter().all(|&o| [v, edge].contains(&g.objects[o].simplex)));
    }

    #[test]
    fn operad_compatibility_in_arity_two() {
        let images: Vec<Vec<Word>> = (0..=2)
            .map(|m| if m == 0 { Vec::new() } else { l_images(&grothendieck_poset(1, 1, m).unwrap()).unwrap() })
            .collect();
        assert!(check_operad_compatibility(2, &images, 2).unwrap() > 0);
    }

    #[test]
    fn ternary_words_poset_matches() {
        let (_, p) = word_poset(2, 3, false).unwrap();
        assert_eq!(betti_numbers(&p).unwrap(), vec![1, 3, 2]);
    }

    type Pools = HashMap<(u8, usize), Vec<TTree<Word>>>;

    fn random_side(rng: &mut ChaCha8Rng, tr: &Trees<'_, WordOperad>, pools: &Pools, t: &Binodal) -> Tuple<Word> {
        let k = tr.op.k;
        let nodes: Vec<TTree<Word>> =
            black_arities(t).iter().map(|&r| pools[&(k, r)].choose(rng).unwrap().clone()).collect();
        let leaves = t.leaves().into_iter().map(|i| (i, pools[&(k, 1)].choose(rng).unwrap().clone())).collect();
        decorated_tuple(tr, t, &nodes, &leaves).unwrap()
    }

    #[test]
    fn cell_bijection_round_trips() {
        let (oa, ob) = (WordOperad { k: 1 }, WordOperad { k: 2 });
        let (tra, trb) = (Trees::new(&oa), Trees::new(&ob));
        let mut pools = HashMap::new();
        for (k, tr) in [(1u8, &tra), (2u8, &trb)] {
            pools.insert((k, 1), tr.enumerate_reduced(1, 2, 2).unwrap());
            for r in 2..=3 {
                pools.insert((k, r), tr.enumerate_reduced(r, 2, 3).unwrap());
            }
        }
        let words: Vec<Word> = (1..=3).flat_map(|m| kcomplex::vertices(m).unwrap()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let alpha = words.choose(&mut rng).unwrap().clone();
            let pair = word_to_trees(&alpha).unwrap();
            let x = random_side(&mut rng, &tra, &pools, &pair.s);
            let y = random_side(&mut rng, &trb, &pools, &pair.t);
            let term = cell_inverse(&tra, &trb, &alpha, &x, &y).unwrap();
            assert_eq!(term.epsilon().unwrap(), alpha);
            assert_eq!(cell_bijection(&tra, &trb, &alpha, &term).unwrap(), (x.clone(), y.clone()));
            assert_eq!(cell_inverse(&tra, &trb, &alpha, &x, &y).unwrap(), term);
        }
    }

    #[test]
    fn binary_reduced_form() {
        let (oa, ob) = (WordOperad { k: 1 }, WordOperad { k: 1 });
        let (tra, trb) = (Trees::new(&oa), Trees::new(&ob));
        let a = tra.corolla(w("o1(2,1)"));
        let u = trb.enumerate_reduced(1, 2, 2).unwrap();
        let (b1, b2) = (u[u.len() - 1].clone(), u[u.len() - 2].clone());
        let term = MixedTerm::Node(
            Side::A,
            a.clone(),
            vec![
                MixedTerm::Node(Side::B, b1.clone(), vec![MixedTerm::Input(1)]),
                MixedTerm::Node(Side::B, b2.clone(), vec![MixedTerm::Input(2)]),
            ],
        );
        let alpha = ab("o1(1,2)");
        let (x, y) = cell_bijection(&tra, &trb, &alpha, &term).unwrap();
        assert_eq!(x.values().cloned().collect::<Vec<_>>(), tra.axial_image(&a));
        assert_eq!(y.values().cloned().collect::<Vec<_>>(), vec![b1, b2]);
        assert_eq!(cell_inverse(&tra, &trb, &alpha, &x, &y).unwrap(), term);
        assert!(cell_bijection(&tra, &trb, &ab("o2(1,2)"), &term).is_err());
        let id = MixedTerm::Input(1);
        let (x, y) = cell_bijection(&tra, &trb, &Word::Gen(1), &id).unwrap();
        assert_eq!(cell_inverse(&tra, &trb, &Word::Gen(1), &x, &y).unwrap(), id);
    }
}
