//! The simplicial complexes on abelian two-fold words and their
//! barycentric-subdivision posets `I(m)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::monoidal_words::{abelianize, enumerate_words, gens, restrict_word, standardize, Word};
use crate::par;
use crate::topology::FinitePoset;

/// Largest number of generators handled by the enumerations here.
pub const MAX_GENERATORS: usize = 4;

/// A set of vertices, kept sorted by serialized word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<Word>,
}

impl Simplex {
    /// Builds a simplex from vertices, sorting and deduplicating them.
    pub fn new(mut vertices: Vec<Word>) -> Simplex {
        vertices.sort_by_cached_key(Word::to_string);
        vertices.dedup();
        Simplex { vertices }
    }

    pub fn vertices(&self) -> &[Word] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// True when every vertex of `self` is a vertex of `other`.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.vertices.iter().all(|v| other.vertices.contains(v))
    }

    /// All nonempty faces, including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.vertices.len();
        (1u32..(1 << n))
            .map(|mask| Simplex::new((0..n).filter(|i| mask >> i & 1 == 1).map(|i| self.vertices[i].clone()).collect()))
            .collect()
    }

    /// Applies a generator relabelling to every vertex.
    pub fn relabel(&self, f: &impl Fn(u32) -> u32) -> Simplex {
        Simplex::new(self.vertices.iter().map(|v| abelianize(&v.relabel(f))).collect())
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// The vertex set: abelian two-fold words on `1..=m`.
pub fn vertices(m: usize) -> Result<Vec<Word>> {
    if m > MAX_GENERATORS {
        return Err(Error::Bound { what: "m", value: m, max: MAX_GENERATORS });
    }
    enumerate_words(2, &gens(m), true)
}

/// Column (1 to 4) of a three-generator abelian word in the defining table:
/// the flat first product, first over second, second over first, and the
/// flat second product.
pub fn column(w: &Word) -> Option<usize> {
    if w.arity() != 3 {
        return None;
    }
    match abelianize(w) {
        Word::Op(1, ch) if ch.len() == 3 => Some(1),
        Word::Op(1, _) => Some(2),
        Word::Op(2, ch) if ch.len() == 2 => Some(3),
        Word::Op(2, _) => Some(4),
        _ => None,
    }
}

fn check_vertex(m: usize, v: &Word) -> Result<()> {
    if v.generators() != gens(m) || abelianize(v) != *v || v.max_op() > 2 {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    Ok(())
}

fn triple_ok(words: &BTreeSet<Word>) -> bool {
    let mut seen = [false; 5];
    for w in words {
        let c = column(&standardize(w)).expect("three generators");
        if seen[c] {
            return false;
        }
        seen[c] = true;
    }
    true
}

/// Decides whether the vertex set `vs` spans a simplex.
pub fn is_simplex(m: usize, vs: &[Word]) -> Result<bool> {
    for v in vs {
        check_vertex(m, v)?;
    }
    if vs.is_empty() {
        return Ok(false);
    }
    if m <= 2 {
        return Ok(true);
    }
    let g = gens(m);
    for a in 0..m {
        for b in (a + 1)..m {
            for c in (b + 1)..m {
                let keep = [g[a], g[b], g[c]];
                let restricted: BTreeSet<Word> = vs.iter().map(|v| restrict_word(v, &keep, true)).collect();
                if !triple_ok(&restricted) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// All simplices of the complex on `m` generators, grouped by dimension.
pub fn enumerate_simplices(m: usize) -> Result<Vec<Vec<Simplex>>> {
    let verts = vertices(m)?;
    let n = verts.len();
    // Compatibility of vertex pairs prunes the search; full checks happen on extension.
    let starts: Vec<usize> = (0..n).collect();
    let per_start: Vec<Vec<Vec<usize>>> = par::map(&starts, |&s| {
        let mut out = Vec::new();
        let mut stack = vec![vec![s]];
        while let Some(cur) = stack.pop() {
            let last = *cur.last().expect("nonempty");
            for j in (last + 1)..n {
                let mut next = cur.clone();
                next.push(j);
                let vs: Vec<Word> = next.iter().map(|&i| verts[i].clone()).collect();
                if is_simplex(m, &vs).expect("vertices are valid") {
                    stack.push(next);
                }
            }
            out.push(cur);
        }
        out
    });
    let mut by_dim: Vec<Vec<Simplex>> = Vec::new();
    for idx in per_start.into_iter().flatten() {
        let s = Simplex::new(idx.iter().map(|&i| verts[i].clone()).collect());
        let d = s.dim();
        if by_dim.len() <= d {
            by_dim.resize(d + 1, Vec::new());
        }
        by_dim[d].push(s);
    }
    for level in &mut by_dim {
        level.sort_by_cached_key(|s| s.to_string());
    }
    Ok(by_dim)
}

/// Number of simplices in each dimension.
pub fn f_vector(m: usize) -> Result<Vec<usize>> {
    Ok(enumerate_simplices(m)?.iter().map(Vec::len).collect())
}

fn permutations(n: usize) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n as u32);
            out.push(q);
        }
    }
    out
}

/// Orbits of the symmetric group on the top-dimensional simplices.
pub fn top_simplex_orbits(m: usize) -> Result<Vec<Vec<Simplex>>> {
    let all = enumerate_simplices(m)?;
    let top = all.last().cloned().unwrap_or_default();
    let perms = permutations(m);
    let mut seen: BTreeSet<Simplex> = BTreeSet::new();
    let mut orbits = Vec::new();
    for s in &top {
        if seen.contains(s) {
            continue;
        }
        let orbit: BTreeSet<Simplex> = perms.iter().map(|p| s.relabel(&|g| p[g as usize - 1])).collect();
        seen.extend(orbit.iter().cloned());
        orbits.push(orbit.into_iter().collect());
    }
    Ok(orbits)
}

/// The subdivision poset `I(m)`: simplices ordered opposite to inclusion.
pub fn subdivision_poset(m: usize) -> Result<(Vec<Simplex>, FinitePoset)> {
    let simplices: Vec<Simplex> = enumerate_simplices(m)?.into_iter().flatten().collect();
    let names = simplices.iter().map(Simplex::to_string).collect();
    let p = FinitePoset::from_leq(names, |a, b| simplices[b].is_face_of(&simplices[a]))?;
    Ok((simplices, p))
}

/// JSON report of the complex.
#[derive(Debug, Clone, Serialize)]
pub struct ComplexReport {
    pub m: usize,
    pub vertices: Vec<String>,
    pub simplices: Vec<Vec<Vec<String>>>,
    pub f_vector: Vec<usize>,
}

pub fn report(m: usize) -> Result<ComplexReport> {
    let all = enumerate_simplices(m)?;
    Ok(ComplexReport {
        m,
        vertices: vertices(m)?.iter().map(Word::to_string).collect(),
        simplices: all
            .iter()
            .map(|level| level.iter().map(|s| s.vertices().iter().map(Word::to_string).collect()).collect())
            .collect(),
        f_vector: all.iter().map(Vec::len).collect(),
    })
}

/// Graphviz rendering of the 1-skeleton.
pub fn one_skeleton_dot(m: usize) -> Result<String> {
    let verts = vertices(m)?;
    let all = enumerate_simplices(m)?;
    let mut s = format!("graph \"K{m}\" {{\n");
    for (i, v) in verts.iter().enumerate() {
        s.push_str(&format!("  v{i} [label=\"{v}\"];\n"));
    }
    if let Some(edges) = all.get(1) {
        for e in edges {
            let a = verts.iter().position(|v| *v == e.vertices()[0]).expect("vertex");
            let b = verts.iter().position(|v| *v == e.vertices()[1]).expect("vertex");
            s.push_str(&format!("  v{} -- v{};\n", a.min(b), a.max(b)));
        }
    }
    s.push_str("}\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{contractibility_certificate, Certificate};

    fn w(s: &str) -> Word {
        Word::parse(s, true).unwrap()
    }

    #[test]
    fn columns_match_the_table() {
        let cols = [
            (vec!["o1(1,2,3)"], 1),
            (vec!["o1(o2(1,2),3)", "o1(o2(1,3),2)", "o1(o2(2,3),1)"], 2),
            (vec!["o2(o1(2,3),1)", "o2(o1(1,3),2)", "o2(o1(1,2),3)"], 3),
            (vec!["o2(1,2,3)"], 4),
        ];
        for (words, c) in cols {
            for s in words {
                assert_eq!(column(&w(s)), Some(c), "{s}");
            }
        }
    }

    #[test]
    fn simplex_examples() {
        assert!(is_simplex(2, &[w("o1(1,2)"), w("o2(1,2)")]).unwrap());
        let max = ["o1(1,2,3)", "o1(o2(1,2),3)", "o2(o1(2,3),1)", "o2(1,2,3)"].map(w);
        assert!(is_simplex(3, &max).unwrap());
        assert!(!is_simplex(3, &[w("o1(o2(1,2),3)"), w("o1(o2(1,3),2)")]).unwrap());
        assert!(is_simplex(3, &[w("o1(1,2)")]).is_err());
    }

    #[test]
    fn small_f_vectors() {
        assert_eq!(f_vector(1).unwrap(), vec![1]);
        assert_eq!(f_vector(2).unwrap(), vec![2, 1]);
    }

    /// The m = 3 complex is the join of four vertex sets of sizes 1, 3, 3, 1.
    fn join_f_vector(sizes: &[usize]) -> Vec<usize> {
        let mut poly = vec![1usize];
        for &s in sizes {
            let mut next = vec![0; poly.len() + 1];
            for (i, &c) in poly.iter().enumerate() {
                next[i] += c;
                next[i + 1] += c * s;
            }
            poly = next;
        }
        poly[1..].to_vec()
    }

    #[test]
    fn three_generator_complex() {
        let f = f_vector(3).unwrap();
        assert_eq!(f, join_f_vector(&[1, 3, 3, 1]));
        assert_eq!(f, vec![8, 22, 24, 9]);
        assert_eq!(top_simplex_orbits(3).unwrap().len(), 2);
        let (objs, p) = subdivision_poset(3).unwrap();
        assert_eq!(objs.len(), 63);
        let tet = objs.iter().position(|s| s.dim() == 3).unwrap();
        let below: usize = (0..objs.len()).filter(|&b| p.lt(tet, b)).count();
        assert_eq!(below, 14);
        assert_eq!(contractibility_certificate(&p).unwrap(), Certificate::HomologyPoint);
    }

    #[test]
    fn subdivision_of_an_edge() {
        let (objs, p) = subdivision_poset(2).unwrap();
        assert_eq!(objs.len(), 3);
        assert_eq!(p.strict_pairs(), 2);
    }

    #[test]
    fn faces_are_simplices_and_relabelling_preserves_simplices() {
        let all: Vec<Simplex> = enumerate_simplices(4).unwrap().into_iter().flatten().collect();
        let set: BTreeSet<&Simplex> = all.iter().collect();
        let perm = [2u32, 4, 1, 3];
        for s in all.iter().filter(|s| s.dim() >= 1).step_by(7) {
            for f in s.faces() {
                assert!(set.contains(&f));
            }
            assert!(set.contains(&s.relabel(&|g| perm[g as usize - 1])));
        }
    }
}
