//! Words of k-fold monoidal categories, their normal forms and poset order.
//!
//! A word is a tree whose inner nodes carry an operation index `1..=k` and
//! whose leaves are distinct generators. Serialization follows the grammar
//! `W ::= INT | "o" K "(" W ("," W)+ ")"`, with `0` standing for the unit.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::par;
use crate::topology::FinitePoset;

/// Default bound on the number of generators accepted by [`enumerate_words`].
pub const DEFAULT_GENERATOR_BOUND: usize = 5;

/// A monoidal word. Normalized words never contain `Unit` below the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Word {
    Unit,
    Gen(u32),
    Op(u8, Vec<Word>),
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Unit => write!(f, "0"),
            Word::Gen(g) => write!(f, "{g}"),
            Word::Op(k, ch) => {
                write!(f, "o{k}(")?;
                for (i, c) in ch.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn number(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("expected a number at byte {start}")))
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{}' at byte {}", c as char, self.pos)))
        }
    }

    fn word(&mut self) -> Result<Word> {
        self.skip_ws();
        match self.s.get(self.pos) {
            Some(b'o') => {
                self.pos += 1;
                let k = self.number()?;
                if k == 0 || k > u8::MAX as u32 {
                    return Err(Error::Parse(format!("operation index {k} out of range")));
                }
                self.expect(b'(')?;
                let mut ch = vec![self.word()?];
                loop {
                    self.skip_ws();
                    match self.s.get(self.pos) {
                        Some(b',') => {
                            self.pos += 1;
                            ch.push(self.word()?);
                        }
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(Error::Parse(format!("expected ',' or ')' at byte {}", self.pos))),
                    }
                }
                Ok(Word::Op(k as u8, ch))
            }
            Some(c) if c.is_ascii_digit() => {
                let g = self.number()?;
                Ok(if g == 0 { Word::Unit } else { Word::Gen(g) })
            }
            _ => Err(Error::Parse(format!("unexpected input at byte {}", self.pos))),
        }
    }
}

impl Word {
    /// Parses a raw, possibly unnormalized word.
    pub fn parse_raw(s: &str) -> Result<Word> {
        let mut p = Parser { s: s.as_bytes(), pos: 0 };
        let w = p.word()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(Error::Parse(format!("trailing input at byte {}", p.pos)));
        }
        Ok(w)
    }

    /// Parses and normalizes a word.
    pub fn parse(s: &str, ab: bool) -> Result<Word> {
        normalize(&Word::parse_raw(s)?, ab)
    }

    /// Binary shorthand `a □_k b`.
    pub fn op2(k: u8, a: Word, b: Word) -> Word {
        Word::Op(k, vec![a, b])
    }

    /// Generators in increasing order.
    pub fn generators(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect_gens(&mut out);
        out.sort_unstable();
        out
    }

    fn collect_gens(&self, out: &mut Vec<u32>) {
        match self {
            Word::Unit => {}
            Word::Gen(g) => out.push(*g),
            Word::Op(_, ch) => ch.iter().for_each(|c| c.collect_gens(out)),
        }
    }

    /// Number of generators.
    pub fn arity(&self) -> usize {
        match self {
            Word::Unit => 0,
            Word::Gen(_) => 1,
            Word::Op(_, ch) => ch.iter().map(Word::arity).sum(),
        }
    }

    /// Least generator, if any.
    pub fn min_gen(&self) -> Option<u32> {
        match self {
            Word::Unit => None,
            Word::Gen(g) => Some(*g),
            Word::Op(_, ch) => ch.iter().filter_map(Word::min_gen).min(),
        }
    }

    /// Largest operation index used.
    pub fn max_op(&self) -> u8 {
        match self {
            Word::Op(k, ch) => ch.iter().map(Word::max_op).max().unwrap_or(0).max(*k),
            _ => 0,
        }
    }

    /// Outermost operation, if the word is not a generator or the unit.
    pub fn root_op(&self) -> Option<u8> {
        match self {
            Word::Op(k, _) => Some(*k),
            _ => None,
        }
    }

    /// Replaces every generator `g` by `f(g)`. The caller keeps `f` injective.
    pub fn relabel(&self, f: &impl Fn(u32) -> u32) -> Word {
        match self {
            Word::Unit => Word::Unit,
            Word::Gen(g) => Word::Gen(f(*g)),
            Word::Op(k, ch) => Word::Op(*k, ch.iter().map(|c| c.relabel(f)).collect()),
        }
    }

    /// Replaces every operation index `k` by `f(k)`.
    pub fn map_ops(&self, f: &impl Fn(u8) -> u8) -> Word {
        match self {
            Word::Op(k, ch) => Word::Op(f(*k), ch.iter().map(|c| c.map_ops(f)).collect()),
            w => w.clone(),
        }
    }

    /// Path of child indices from the root to generator `g`.
    fn path_to(&self, g: u32) -> Option<Vec<usize>> {
        match self {
            Word::Gen(h) if *h == g => Some(Vec::new()),
            Word::Op(_, ch) => ch.iter().enumerate().find_map(|(i, c)| {
                c.path_to(g).map(|mut p| {
                    p.insert(0, i);
                    p
                })
            }),
            _ => None,
        }
    }

    /// For generators `a != b`, the operation at their meeting node and
    /// whether `a` comes before `b` there.
    pub fn pair_relation(&self, a: u32, b: u32) -> Option<(u8, bool)> {
        let pa = self.path_to(a)?;
        let pb = self.path_to(b)?;
        let mut node = self;
        let mut d = 0;
        while pa.get(d).is_some() && pa.get(d) == pb.get(d) {
            if let Word::Op(_, ch) = node {
                node = &ch[pa[d]];
            }
            d += 1;
        }
        match node {
            Word::Op(k, _) => Some((*k, pa[d] < pb[d])),
            _ => None,
        }
    }
}

fn check_duplicates(w: &Word) -> Result<()> {
    let gens = {
        let mut v = Vec::new();
        w.collect_gens(&mut v);
        v
    };
    let mut seen = HashSet::new();
    for g in gens {
        if !seen.insert(g) {
            return Err(Error::DuplicateGenerator(g));
        }
    }
    Ok(())
}

fn normalize_unchecked(w: &Word, ab: bool) -> Word {
    match w {
        Word::Unit | Word::Gen(_) => w.clone(),
        Word::Op(k, ch) => {
            let mut out = Vec::new();
            for c in ch {
                match normalize_unchecked(c, ab) {
                    Word::Unit => {}
                    Word::Op(j, sub) if j == *k => out.extend(sub),
                    n => out.push(n),
                }
            }
            if ab {
                out.sort_by_key(|c| c.min_gen());
            }
            match out.len() {
                0 => Word::Unit,
                1 => out.pop().expect("length checked"),
                _ => Word::Op(*k, out),
            }
        }
    }
}

/// Flattens associativity, absorbs units and removes unary nodes.
/// In abelian mode children are sorted by least generator.
pub fn normalize(raw: &Word, ab: bool) -> Result<Word> {
    check_duplicates(raw)?;
    Ok(normalize_unchecked(raw, ab))
}

/// Canonical representative in the commutative quotient.
pub fn abelianize(w: &Word) -> Word {
    normalize_unchecked(w, true)
}

/// Restriction to the generators in `keep`; the others become the unit.
pub fn restrict_word(w: &Word, keep: &[u32], ab: bool) -> Word {
    fn go(w: &Word, keep: &[u32]) -> Word {
        match w {
            Word::Gen(g) if !keep.contains(g) => Word::Unit,
            Word::Op(k, ch) => Word::Op(*k, ch.iter().map(|c| go(c, keep)).collect()),
            other => other.clone(),
        }
    }
    normalize_unchecked(&go(w, keep), ab)
}

/// Relabels generators to `1..=n` preserving their order.
pub fn standardize(w: &Word) -> Word {
    let gens = w.generators();
    let pos: HashMap<u32, u32> = gens.iter().enumerate().map(|(i, &g)| (g, i as u32 + 1)).collect();
    w.relabel(&|g| pos[&g])
}

/// Substitutes `subs[g]` for each generator `g` of `alpha` and normalizes.
pub fn substitute(alpha: &Word, subs: &HashMap<u32, Word>, ab: bool) -> Result<Word> {
    fn go(w: &Word, subs: &HashMap<u32, Word>) -> Result<Word> {
        match w {
            Word::Unit => Ok(Word::Unit),
            Word::Gen(g) => subs.get(g).cloned().ok_or(Error::MismatchedGenerators),
            Word::Op(k, ch) => Ok(Word::Op(*k, ch.iter().map(|c| go(c, subs)).collect::<Result<_>>()?)),
        }
    }
    let raw = go(alpha, subs)?;
    check_duplicates(&raw).map_err(|_| Error::Invalid("substituted words share generators".into()))?;
    Ok(normalize_unchecked(&raw, ab))
}

/// Operadic composition `alpha ∘ (betas)`.
///
/// `alpha` uses generators `1..=n` and `betas[i]` uses `1..=n_i` (or is the
/// unit). The generators of `betas[i]` are shifted past those of earlier
/// blocks.
pub fn compose_words(alpha: &Word, betas: &[Word], ab: bool) -> Result<Word> {
    let n = betas.len() as u32;
    if alpha.generators() != (1..=n).collect::<Vec<_>>() {
        return Err(Error::MismatchedGenerators);
    }
    let mut subs = HashMap::new();
    let mut offset = 0;
    for (i, b) in betas.iter().enumerate() {
        let gens = b.generators();
        if gens != (1..=gens.len() as u32).collect::<Vec<_>>() {
            return Err(Error::MismatchedGenerators);
        }
        subs.insert(i as u32 + 1, b.relabel(&|g| g + offset));
        offset += gens.len() as u32;
    }
    substitute(alpha, &subs, ab)
}

fn set_partitions(items: &[u32]) -> Vec<Vec<Vec<u32>>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let first = items[0];
    let mut out = Vec::new();
    for p in set_partitions(&items[1..]) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first);
            out.push(q);
        }
        let mut q = p;
        q.insert(0, vec![first]);
        out.push(q);
    }
    out
}

fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x.clone());
            out.push(p);
        }
    }
    out
}

struct Enumerator {
    k: u8,
    ab: bool,
    memo: HashMap<(Vec<u32>, u8), Vec<Word>>,
}

impl Enumerator {
    /// Normal forms on `gens` whose root operation differs from `forbid`.
    fn words(&mut self, gens: &[u32], forbid: u8) -> Vec<Word> {
        if gens.len() == 1 {
            return vec![Word::Gen(gens[0])];
        }
        let key = (gens.to_vec(), forbid);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        for op in 1..=self.k {
            if op == forbid {
                continue;
            }
            for mut part in set_partitions(gens) {
                if part.len() < 2 {
                    continue;
                }
                part.sort();
                let orders = if self.ab { vec![part.clone()] } else { permutations(&part) };
                for order in orders {
                    let choices: Vec<Vec<Word>> = order.iter().map(|b| self.words(b, op)).collect();
                    let mut acc: Vec<Vec<Word>> = vec![Vec::new()];
                    for c in &choices {
                        acc = acc
                            .into_iter()
                            .flat_map(|pre| {
                                c.iter().map(move |w| {
                                    let mut v = pre.clone();
                                    v.push(w.clone());
                                    v
                                })
                            })
                            .collect();
                    }
                    out.extend(acc.into_iter().map(|ch| Word::Op(op, ch)));
                }
            }
        }
        self.memo.insert(key, out.clone());
        out
    }
}

/// All normal forms with `k` operations on the generator set `gens`,
/// sorted by serialized string.
pub fn enumerate_words(k: u8, gens: &[u32], ab: bool) -> Result<Vec<Word>> {
    enumerate_words_bounded(k, gens, ab, DEFAULT_GENERATOR_BOUND)
}

/// As [`enumerate_words`] with an explicit generator bound.
pub fn enumerate_words_bounded(k: u8, gens: &[u32], ab: bool, bound: usize) -> Result<Vec<Word>> {
    if gens.len() > bound {
        return Err(Error::Bound { what: "generators", value: gens.len(), max: bound });
    }
    let mut sorted = gens.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != gens.len() {
        return Err(Error::Invalid("repeated generator".into()));
    }
    let mut words =
        if sorted.is_empty() { vec![Word::Unit] } else { Enumerator { k, ab, memo: HashMap::new() }.words(&sorted, 0) };
    words.sort_by_cached_key(|w| w.to_string());
    Ok(words)
}

/// Generators `1..=m`.
pub fn gens(m: usize) -> Vec<u32> {
    (1..=m as u32).collect()
}

/// The pairwise morphism criterion in the ordered setting.
///
/// For every pair `a < b`, if `alpha` restricts to `a □_i b` then `beta`
/// must restrict to `a □_j b` with `j ≥ i` or to `b □_j a` with `j > i`.
pub fn leq(alpha: &Word, beta: &Word) -> Result<bool> {
    pairwise_leq(alpha, beta, false)
}

/// The pairwise criterion for abelian words: every pair operation may only grow.
pub fn leq_ab(alpha: &Word, beta: &Word) -> Result<bool> {
    pairwise_leq(alpha, beta, true)
}

fn pairwise_leq(alpha: &Word, beta: &Word, ab: bool) -> Result<bool> {
    let gens = alpha.generators();
    if gens != beta.generators() {
        return Err(Error::MismatchedGenerators);
    }
    for (x, &a) in gens.iter().enumerate() {
        for &b in &gens[x + 1..] {
            let (i, a_first) = alpha.pair_relation(a, b).expect("distinct generators meet");
            let (j, same) = beta.pair_relation(a, b).expect("distinct generators meet");
            let ok = if !ab && a_first != same { j > i } else { j >= i };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Ways to write `x` as `a □_j b` with `a` or `b` possibly the unit.
fn splits(x: &Word, j: u8) -> Vec<(Word, Word)> {
    match x {
        Word::Op(k, ch) if *k == j => (0..=ch.len()).map(|q| (group(j, &ch[..q]), group(j, &ch[q..]))).collect(),
        _ => vec![(x.clone(), Word::Unit), (Word::Unit, x.clone())],
    }
}

fn group(op: u8, ch: &[Word]) -> Word {
    match ch.len() {
        0 => Word::Unit,
        1 => ch[0].clone(),
        _ => Word::Op(op, ch.to_vec()),
    }
}

/// All words reached from `w` by one interchange `η^{ij}` in any context.
pub fn interchange_successors(w: &Word, k: u8) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    if let Word::Op(i, ch) = w {
        let r = ch.len();
        for s in 0..r {
            for e in (s + 2)..=r {
                for p in (s + 1)..e {
                    let x = group(*i, &ch[s..p]);
                    let y = group(*i, &ch[p..e]);
                    for j in (*i + 1)..=k {
                        for (a, b) in splits(&x, j) {
                            for (c, d) in splits(&y, j) {
                                let res =
                                    Word::op2(j, Word::op2(*i, a.clone(), c.clone()), Word::op2(*i, b.clone(), d));
                                let mut nch: Vec<Word> = ch[..s].to_vec();
                                nch.push(res);
                                nch.extend_from_slice(&ch[e..]);
                                out.insert(normalize_unchecked(&Word::Op(*i, nch), false));
                            }
                        }
                    }
                }
            }
        }
        for (idx, c) in ch.iter().enumerate() {
            for nc in interchange_successors(c, k) {
                let mut nch = ch.clone();
                nch[idx] = nc;
                out.insert(normalize_unchecked(&Word::Op(*i, nch), false));
            }
        }
    }
    out.remove(w);
    out
}

/// The reflexive-transitive closure of the interchange generators on
/// `M_k(m)`: returns the words and `reach[a][b]` meaning `a → b`.
pub fn leq_oracle(k: u8, m: usize) -> Result<(Vec<Word>, Vec<Vec<bool>>)> {
    let max_m = match k {
        0..=2 => 4,
        3 => 3,
        _ => 2,
    };
    if m > max_m {
        return Err(Error::Bound { what: "oracle generators", value: m, max: max_m });
    }
    let words = enumerate_words(k, &gens(m), false)?;
    let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let succ: Vec<Vec<usize>> = par::map(&words, |w| interchange_successors(w, k).iter().map(|v| index[v]).collect());
    let reach = par::map_range(words.len(), |s| {
        let mut seen = vec![false; words.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &succ[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    });
    Ok((words, reach))
}

/// The poset `M_k(m)` (or `M_2^ab(m)` when `ab`) under the pairwise criterion.
pub fn word_poset(k: u8, m: usize, ab: bool) -> Result<(Vec<Word>, FinitePoset)> {
    let words = enumerate_words(k, &gens(m), ab)?;
    let names = words.iter().map(Word::to_string).collect();
    let p = FinitePoset::from_leq(names, |a, b| pairwise_leq(&words[a], &words[b], ab).expect("same generators"))?;
    Ok((words, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        Word::parse(s, false).unwrap()
    }

    fn wab(s: &str) -> Word {
        Word::parse(s, true).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(w("o1(1,o1(2,3))").to_string(), "o1(1,2,3)");
        assert_eq!(w("o1(1,0)").to_string(), "1");
        assert_eq!(wab("o1(2,1)").to_string(), "o1(1,2)");
        assert_eq!(Word::parse("o1(1,o2(1,2))", false), Err(Error::DuplicateGenerator(1)));
    }

    #[test]
    fn serialization_round_trips() {
        for word in enumerate_words(2, &gens(4), false).unwrap() {
            assert_eq!(Word::parse(&word.to_string(), false).unwrap(), word);
        }
    }

    /// Counts words by the recursive ordered-partition formula, independently of the enumerator.
    fn count_oracle(k: u64, n: usize, ab: bool) -> u64 {
        // g[s] = words on s generators whose root is a fixed operation.
        let mut g = vec![0u64; n + 1];
        let mut total = vec![0u64; n + 1];
        if n >= 1 {
            total[1] = 1;
        }
        for s in 2..=n {
            // Sum over set partitions of an s-set into >= 2 blocks, weighted.
            let items: Vec<u32> = (0..s as u32).collect();
            let mut sum = 0u64;
            for part in set_partitions(&items) {
                if part.len() < 2 {
                    continue;
                }
                let mut prod: u64 = part.iter().map(|b| if b.len() == 1 { 1 } else { (k - 1) * g[b.len()] }).product();
                if !ab {
                    prod *= (1..=part.len() as u64).product::<u64>();
                }
                sum += prod;
            }
            g[s] = sum;
            total[s] = k * sum;
        }
        total[n]
    }

    #[test]
    fn enumeration_counts_match_oracle() {
        assert_eq!(enumerate_words(1, &gens(3), false).unwrap().len(), 6);
        assert_eq!(enumerate_words(2, &gens(2), false).unwrap().len(), 4);
        for k in 1..=3u8 {
            for m in 1..=4 {
                for ab in [false, true] {
                    if ab && k != 2 {
                        continue;
                    }
                    let got = enumerate_words(k, &gens(m), ab).unwrap().len() as u64;
                    assert_eq!(got, count_oracle(k as u64, m, ab), "k={k} m={m} ab={ab}");
                }
            }
        }
    }

    #[test]
    fn abelian_vertices_for_three_generators() {
        let v: Vec<String> = enumerate_words(2, &gens(3), true).unwrap().iter().map(Word::to_string).collect();
        let mut expected = vec![
            "o1(1,2,3)",
            "o1(o2(1,2),3)",
            "o1(o2(1,3),2)",
            "o1(1,o2(2,3))",
            "o2(1,o1(2,3))",
            "o2(o1(1,3),2)",
            "o2(o1(1,2),3)",
            "o2(1,2,3)",
        ];
        expected.sort();
        assert_eq!(v, expected);
    }

    #[test]
    fn enumeration_bound() {
        assert!(enumerate_words(2, &gens(6), false).is_err());
    }

    #[test]
    fn leq_examples() {
        assert!(leq(&w("o1(1,2)"), &w("o2(2,1)")).unwrap());
        assert!(!leq(&w("o2(1,2)"), &w("o1(1,2)")).unwrap());
        assert!(leq(&w("o2(1,2)"), &w("o2(1,2)")).unwrap());
        assert!(!leq(&w("o1(1,2)"), &w("o1(2,1)")).unwrap());
        assert!(leq(&w("o1(1,2)"), &w("o1(1,3)")).is_err());
    }

    #[test]
    fn eta_instance_from_units() {
        // (1 □2 0) □1 (0 □2 2) → (1 □1 0) □2 (0 □1 2)
        let src = w("o1(o2(1,0),o2(0,2))");
        let dst = w("o2(o1(1,0),o1(0,2))");
        assert_eq!(src.to_string(), "o1(1,2)");
        assert_eq!(dst.to_string(), "o2(1,2)");
        assert!(interchange_successors(&src, 2).contains(&dst));
    }

    #[test]
    fn oracle_on_two_generators_has_four_pairs() {
        let (words, reach) = leq_oracle(2, 2).unwrap();
        let pairs: usize = (0..words.len()).map(|a| (0..words.len()).filter(|&b| a != b && reach[a][b]).count()).sum();
        assert_eq!(pairs, 4);
    }

    #[test]
    fn criterion_matches_oracle_small() {
        for (k, m) in [(1u8, 3usize), (2, 2), (2, 3), (3, 2)] {
            let (words, reach) = leq_oracle(k, m).unwrap();
            for a in 0..words.len() {
                for b in 0..words.len() {
                    assert_eq!(leq(&words[a], &words[b]).unwrap(), reach[a][b], "{} {}", words[a], words[b]);
                }
            }
        }
    }

    #[test]
    fn compose_and_restrict_examples() {
        let c = compose_words(&w("o1(1,2)"), &[w("o2(1,2)"), w("1")], false).unwrap();
        assert_eq!(c, w("o1(o2(1,2),3)"));
        assert_eq!(restrict_word(&c, &[1, 2], false), w("o2(1,2)"));
        assert_eq!(restrict_word(&c, &[1, 3], false), w("o1(1,3)"));
        assert_eq!(restrict_word(&c, &[2], false), Word::Gen(2));
        assert_eq!(restrict_word(&c, &[], false), Word::Unit);
        assert_eq!(compose_words(&c, &[Word::Gen(1), Word::Gen(1), Word::Gen(1)], false).unwrap(), c);
        assert!(substitute(&w("o1(1,2)"), &HashMap::from([(1, Word::Gen(3)), (2, Word::Gen(3))]), false).is_err());
    }

    #[test]
    fn abelianize_examples() {
        assert_eq!(abelianize(&w("o1(2,1)")), wab("o1(1,2)"));
        for word in enumerate_words(2, &gens(4), false).unwrap() {
            let a = abelianize(&word);
            assert_eq!(abelianize(&a), a);
        }
    }

    #[test]
    fn abelian_order_is_a_poset() {
        for m in 1..=4 {
            word_poset(2, m, true).unwrap();
        }
    }

    fn word_strategy(m: usize, k: u8) -> impl Strategy<Value = Word> {
        let all = enumerate_words(k, &gens(m), false).unwrap();
        proptest::sample::select(all)
    }

    proptest! {
        #[test]
        fn abelianize_commutes_with_restriction(word in word_strategy(4, 2), mask in 0u32..16) {
            let keep: Vec<u32> = (1..=4).filter(|g| mask >> (g - 1) & 1 == 1).collect();
            prop_assert_eq!(abelianize(&restrict_word(&word, &keep, false)), restrict_word(&abelianize(&word), &keep, true));
        }

        #[test]
        fn compose_then_restrict_recovers_blocks(a in word_strategy(2, 2), b in word_strategy(2, 2), c in word_strategy(1, 2)) {
            let comp = compose_words(&a, &[b.clone(), c.clone()], false).unwrap();
            prop_assert_eq!(restrict_word(&comp, &[1, 2], false), b);
            prop_assert_eq!(restrict_word(&comp, &[3], false), c.relabel(&|g| g + 2));
        }

        #[test]
        fn composition_is_associative(a in word_strategy(2, 2), b in word_strategy(2, 2), c in word_strategy(1, 2)) {
            // (a ∘_1 b) ∘ ... vs a ∘ (b ∘ ...), both with unit words elsewhere.
            let g = Word::Gen(1);
            let left = compose_words(&compose_words(&a, &[b.clone(), g.clone()], false).unwrap(), &[c.clone(), g.clone(), g.clone()], false).unwrap();
            let right = compose_words(&a, &[compose_words(&b, &[c.clone(), g.clone()], false).unwrap(), g.clone()], false).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn quotient_to_abelian_words_is_an_operad_map(a in word_strategy(2, 2), b in word_strategy(2, 2), c in word_strategy(2, 2)) {
            let comp = compose_words(&a, &[b.clone(), c.clone()], false).unwrap();
            let via_ab = compose_words(&abelianize(&a), &[abelianize(&b), abelianize(&c)], true).unwrap();
            prop_assert_eq!(abelianize(&comp), via_ab);
        }
    }
}
