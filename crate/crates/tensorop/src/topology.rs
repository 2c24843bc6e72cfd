//! Finite posets, their order complexes and exact integer homology.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Default ceiling on the number of chains built by [`nerve`].
pub const DEFAULT_CHAIN_BOUND: usize = 5_000_000;

/// A finite partially ordered set with named objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    names: Vec<String>,
    words: usize,
    le: Vec<u64>,
}

/// Serialized form of a poset: objects plus covering relations `a < b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub objects: Vec<String>,
    pub covers: Vec<[usize; 2]>,
}

impl FinitePoset {
    /// Builds a poset from a relation oracle, checking the poset axioms.
    pub fn from_leq<F>(names: Vec<String>, leq: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> bool + Sync + Send,
    {
        let n = names.len();
        let words = n.div_ceil(64).max(1);
        let rows: Vec<Vec<u64>> = par::map_range(n, |i| {
            let mut row = vec![0u64; words];
            for j in 0..n {
                if leq(i, j) {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        });
        let p = FinitePoset { names, words, le: rows.concat() };
        p.validate()?;
        Ok(p)
    }

    /// Builds a poset as the reflexive-transitive closure of `covers`.
    pub fn from_covers(names: Vec<String>, covers: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let words = n.div_ceil(64).max(1);
        let mut le = vec![0u64; n * words];
        for i in 0..n {
            le[i * words + i / 64] |= 1 << (i % 64);
        }
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(Error::Invalid(format!("cover ({a},{b}) out of range")));
            }
            le[a * words + b / 64] |= 1 << (b % 64);
        }
        // Warshall closure on bit rows.
        for k in 0..n {
            let krow: Vec<u64> = le[k * words..(k + 1) * words].to_vec();
            for i in 0..n {
                if le[i * words + k / 64] >> (k % 64) & 1 == 1 {
                    for w in 0..words {
                        le[i * words + w] |= krow[w];
                    }
                }
            }
        }
        let p = FinitePoset { names, words, le };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if !self.leq(i, i) {
                return Err(Error::Invalid(format!("relation not reflexive at {i}")));
            }
            for j in (i + 1)..n {
                if self.leq(i, j) && self.leq(j, i) {
                    return Err(Error::Invalid(format!(
                        "relation not antisymmetric: {} and {}",
                        self.names[i], self.names[j]
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && self.leq(i, j) {
                    let (ri, rj) = (self.row(i), self.row(j));
                    if ri.iter().zip(rj).any(|(a, b)| b & !a != 0) {
                        return Err(Error::Invalid("relation not transitive".into()));
                    }
                }
            }
        }
        Ok(())
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.le[i * self.words..(i + 1) * self.words]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.le[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    /// Elements strictly above `i`, in increasing index order.
    pub fn strictly_above(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.lt(i, j)).collect()
    }

    /// Covering pairs `(a, b)` with `a < b` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let strict = |i: usize| {
            let mut r = self.row(i).to_vec();
            r[i / 64] &= !(1 << (i % 64));
            r
        };
        let per: Vec<Vec<(usize, usize)>> = par::map_range(n, |a| {
            let up = strict(a);
            let mut above_up = vec![0u64; self.words];
            for c in (0..n).filter(|&c| up[c / 64] >> (c % 64) & 1 == 1) {
                for (w, x) in strict(c).into_iter().enumerate() {
                    above_up[w] |= x;
                }
            }
            (0..n)
                .filter(|&b| up[b / 64] >> (b % 64) & 1 == 1 && above_up[b / 64] >> (b % 64) & 1 == 0)
                .map(|b| (a, b))
                .collect()
        });
        per.concat()
    }

    /// Number of pairs `a < b`.
    pub fn strict_pairs(&self) -> usize {
        let n = self.len();
        (0..n).map(|a| (0..n).filter(|&b| self.lt(a, b)).count()).sum()
    }

    /// An object above every other object.
    pub fn terminal(&self) -> Option<usize> {
        (0..self.len()).find(|&t| (0..self.len()).all(|x| self.leq(x, t)))
    }

    /// An object below every other object.
    pub fn initial(&self) -> Option<usize> {
        (0..self.len()).find(|&t| (0..self.len()).all(|x| self.leq(t, x)))
    }

    /// The full subposet on `keep`, in the given order.
    pub fn subposet(&self, keep: &[usize]) -> FinitePoset {
        let names = keep.iter().map(|&i| self.names[i].clone()).collect();
        FinitePoset::from_leq(names, |a, b| self.leq(keep[a], keep[b])).expect("a full subposet of a poset is a poset")
    }

    pub fn to_json(&self) -> PosetJson {
        PosetJson { objects: self.names.clone(), covers: self.covers().into_iter().map(|(a, b)| [a, b]).collect() }
    }

    pub fn from_json(p: &PosetJson) -> Result<Self> {
        let covers: Vec<(usize, usize)> = p.covers.iter().map(|c| (c[0], c[1])).collect();
        FinitePoset::from_covers(p.objects.clone(), &covers)
    }

    /// Graphviz rendering of the Hasse diagram.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph \"{name}\" {{\n");
        for (i, n) in self.names.iter().enumerate() {
            s.push_str(&format!("  n{i} [label=\"{}\"];\n", n.replace('"', "\\\"")));
        }
        for (a, b) in self.covers() {
            s.push_str(&format!("  n{a} -> n{b};\n"));
        }
        s.push_str("}\n");
        s
    }
}

/// A sparse integer matrix stored by columns.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    /// Dense product `self * other`, used only to check `∂∂ = 0` in tests.
    pub fn mul_is_zero(&self, other: &SparseMatrix) -> bool {
        other.cols.iter().all(|col| {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for &(k, v) in col {
                for &(r, w) in &self.cols[k] {
                    *acc.entry(r).or_default() += v * w;
                }
            }
            acc.values().all(|&x| x == 0)
        })
    }
}

/// The order complex of a poset with its boundary matrices.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    /// `chains[d]` lists the strictly increasing chains with `d + 1` elements.
    pub chains: Vec<Vec<Vec<u32>>>,
    /// `boundaries[d]` maps degree `d` chains to degree `d - 1`; index 0 is empty.
    pub boundaries: Vec<SparseMatrix>,
}

impl ChainComplex {
    pub fn f_vector(&self) -> Vec<usize> {
        self.chains.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.chains.iter().enumerate().map(|(d, c)| if d % 2 == 0 { c.len() as i64 } else { -(c.len() as i64) }).sum()
    }
}

/// Builds the order complex of `p` with alternating-sum boundaries.
pub fn nerve(p: &FinitePoset) -> Result<ChainComplex> {
    nerve_bounded(p, DEFAULT_CHAIN_BOUND)
}

/// As [`nerve`] with an explicit ceiling on the total number of chains.
pub fn nerve_bounded(p: &FinitePoset, bound: usize) -> Result<ChainComplex> {
    let n = p.len();
    let above: Vec<Vec<u32>> = (0..n).map(|i| p.strictly_above(i).into_iter().map(|j| j as u32).collect()).collect();
    let mut chains: Vec<Vec<Vec<u32>>> = Vec::new();
    if n > 0 {
        chains.push((0..n as u32).map(|i| vec![i]).collect());
    }
    let mut total = n;
    loop {
        let last = chains.last().map(|c| c.as_slice()).unwrap_or(&[]);
        let next: Vec<Vec<u32>> = par::flat_map(last, |c| {
            let top = *c.last().expect("chains are nonempty") as usize;
            above[top]
                .iter()
                .map(|&j| {
                    let mut d = c.clone();
                    d.push(j);
                    d
                })
                .collect()
        });
        if next.is_empty() {
            break;
        }
        total += next.len();
        if total > bound {
            return Err(Error::Bound { what: "chains", value: total, max: bound });
        }
        chains.push(next);
    }
    let index: Vec<HashMap<&[u32], usize>> =
        chains.iter().map(|level| level.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect()).collect();
    let mut boundaries = vec![SparseMatrix { rows: 0, cols: vec![Vec::new(); chains.first().map_or(0, Vec::len)] }];
    for d in 1..chains.len() {
        let prev = &index[d - 1];
        let cols = par::map(&chains[d], |c| {
            let mut col: Vec<(usize, i64)> = (0..c.len())
                .map(|skip| {
                    let face: Vec<u32> = c.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
                    let sign = if skip % 2 == 0 { 1 } else { -1 };
                    (prev[face.as_slice()], sign)
                })
                .collect();
            col.sort_unstable();
            col
        });
        boundaries.push(SparseMatrix { rows: chains[d - 1].len(), cols });
    }
    Ok(ChainComplex { chains, boundaries })
}

/// Homology of one degree: free rank and torsion coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub betti: usize,
    pub torsion: Vec<u128>,
}

/// Rank and non-unit invariant factors of an integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithData {
    pub rank: usize,
    pub torsion: Vec<u128>,
}

/// Smith normal form data of a sparse integer matrix.
///
/// Unit pivots are eliminated sparsely; whatever remains is reduced densely
/// with checked 128-bit arithmetic.
pub fn smith(m: &SparseMatrix) -> Result<SmithData> {
    let mut cols: Vec<HashMap<usize, i128>> =
        m.cols.iter().map(|c| c.iter().filter(|e| e.1 != 0).map(|&(r, v)| (r, v as i128)).collect()).collect();
    let mut row_cols: Vec<std::collections::HashSet<usize>> = vec![Default::default(); m.rows];
    for (c, col) in cols.iter().enumerate() {
        for &r in col.keys() {
            row_cols[r].insert(c);
        }
    }
    let mut alive = vec![true; cols.len()];
    let mut rank = 0usize;
    loop {
        // Pick the sparsest column holding a unit, then its sparsest unit row.
        let mut best: Option<(usize, usize, usize)> = None;
        for (c, col) in cols.iter().enumerate() {
            if !alive[c] || col.is_empty() {
                continue;
            }
            if let Some((_, len, _)) = best {
                if col.len() >= len {
                    continue;
                }
            }
            let unit_row =
                col.iter().filter(|(_, v)| v.abs() == 1).map(|(&r, _)| r).min_by_key(|&r| (row_cols[r].len(), r));
            if let Some(r) = unit_row {
                best = Some((c, col.len(), r));
            }
        }
        let Some((c, _, r)) = best else { break };
        let pivot = cols[c][&r];
        let others: Vec<usize> = row_cols[r].iter().copied().filter(|&o| o != c).collect();
        let pivot_col: Vec<(usize, i128)> = cols[c].iter().map(|(&k, &v)| (k, v)).collect();
        for o in others {
            let factor = cols[o][&r] * pivot;
            for &(k, v) in &pivot_col {
                let e = cols[o].entry(k).or_insert(0);
                *e = e.checked_sub(factor.checked_mul(v).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
                if *e == 0 {
                    cols[o].remove(&k);
                    row_cols[k].remove(&o);
                } else {
                    row_cols[k].insert(o);
                }
            }
        }
        for &(k, _) in &pivot_col {
            row_cols[k].remove(&c);
        }
        cols[c].clear();
        alive[c] = false;
        rank += 1;
    }
    // Dense phase on the leftover block.
    let live_cols: Vec<usize> = (0..cols.len()).filter(|&c| !cols[c].is_empty()).collect();
    let mut live_rows: Vec<usize> = live_cols.iter().flat_map(|&c| cols[c].keys().copied()).collect();
    live_rows.sort_unstable();
    live_rows.dedup();
    let row_pos: HashMap<usize, usize> = live_rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut dense = vec![vec![0i128; live_cols.len()]; live_rows.len()];
    for (j, &c) in live_cols.iter().enumerate() {
        for (&r, &v) in &cols[c] {
            dense[row_pos[&r]][j] = v;
        }
    }
    let diag = dense_smith(dense)?;
    let mut torsion = Vec::new();
    for d in diag {
        rank += 1;
        if d > 1 {
            torsion.push(d);
        }
    }
    torsion.sort_unstable();
    Ok(SmithData { rank, torsion })
}

/// Nonzero diagonal entries of the Smith normal form of a dense matrix.
fn dense_smith(mut a: Vec<Vec<i128>>) -> Result<Vec<u128>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Find the smallest nonzero entry in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0 && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t];
            let mut changed = false;
            for i in (t + 1)..rows {
                let q = a[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        let sub = q.checked_mul(a[t][j]).ok_or(Error::Overflow)?;
                        a[i][j] = a[i][j].checked_sub(sub).ok_or(Error::Overflow)?;
                    }
                }
                if a[i][t] != 0 {
                    changed = true;
                }
            }
            for j in (t + 1)..cols {
                let q = a[t][j] / p;
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        let sub = q.checked_mul(row[t]).ok_or(Error::Overflow)?;
                        row[j] = row[j].checked_sub(sub).ok_or(Error::Overflow)?;
                    }
                }
                if a[t][j] != 0 {
                    changed = true;
                }
            }
            if !changed {
                // Pivot must divide the rest of the block.
                let bad =
                    (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % p != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..cols {
                            a[t][j] = a[t][j].checked_add(a[i][j]).ok_or(Error::Overflow)?;
                        }
                        continue;
                    }
                }
            }
            // Move the smallest remaining entry of row/column t to the pivot.
            let mut best = (t, t);
            for i in t..rows {
                if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(a[t][t].unsigned_abs());
        t += 1;
    }
    Ok(diag)
}

/// Integer homology of a chain complex, one entry per degree.
pub fn homology(c: &ChainComplex) -> Result<Vec<HomologyGroup>> {
    let degrees = c.chains.len();
    let smiths: Vec<Result<SmithData>> = par::map_range(degrees, |d| {
        if d == 0 {
            Ok(SmithData { rank: 0, torsion: Vec::new() })
        } else {
            smith(&c.boundaries[d])
        }
    });
    let smiths: Vec<SmithData> = smiths.into_iter().collect::<Result<_>>()?;
    Ok((0..degrees)
        .map(|d| {
            let next = smiths.get(d + 1);
            let betti = c.chains[d].len() - smiths[d].rank - next.map_or(0, |s| s.rank);
            HomologyGroup { betti, torsion: next.map_or(Vec::new(), |s| s.torsion.clone()) }
        })
        .collect())
}

/// Betti numbers of the order complex of `p`, trailing zeros removed.
pub fn betti_numbers(p: &FinitePoset) -> Result<Vec<usize>> {
    let h = homology(&nerve(p)?)?;
    let mut b: Vec<usize> = h.iter().map(|g| g.betti).collect();
    while b.len() > 1 && *b.last().unwrap() == 0 {
        b.pop();
    }
    Ok(b)
}

/// Evidence about the contractibility of the nerve of a poset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// An object above all others: the nerve is a cone.
    TerminalObject(usize),
    /// An object below all others: the nerve is a cone.
    InitialObject(usize),
    /// Reduced homology vanishes. Necessary for contractibility, not sufficient.
    HomologyPoint,
    /// None of the above, with the Betti numbers found.
    Inconclusive(Vec<usize>),
}

impl Certificate {
    /// True for the two cone certificates.
    pub fn proves_contractible(&self) -> bool {
        matches!(self, Certificate::TerminalObject(_) | Certificate::InitialObject(_))
    }
}

/// Returns the strongest certificate available for `p`.
pub fn contractibility_certificate(p: &FinitePoset) -> Result<Certificate> {
    if let Some(t) = p.terminal() {
        return Ok(Certificate::TerminalObject(t));
    }
    if let Some(i) = p.initial() {
        return Ok(Certificate::InitialObject(i));
    }
    let h = homology(&nerve(p)?)?;
    let point = !h.is_empty()
        && h[0].betti == 1
        && h.iter().all(|g| g.torsion.is_empty())
        && h.iter().skip(1).all(|g| g.betti == 0);
    if point {
        Ok(Certificate::HomologyPoint)
    } else {
        let mut b: Vec<usize> = h.iter().map(|g| g.betti).collect();
        while b.len() > 1 && *b.last().unwrap() == 0 {
            b.pop();
        }
        Ok(Certificate::Inconclusive(b))
    }
}
