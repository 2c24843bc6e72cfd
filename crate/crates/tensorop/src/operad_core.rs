//! Finite set operads with explicit composition tables and their tree terms.
//!
//! Elements are indices into per-arity carriers. The symmetric group acts by
//! relabelling inputs: in `σ·x` the input at position `j` of `x` moves to
//! position `σ(j)`. A node labelled `x` with children `c_j` therefore equals a
//! node labelled `σ·x` with the child `c_j` moved to slot `σ(j)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::Hash;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default maximal arity of carriers.
pub const DEFAULT_ARITY_CAP: usize = 4;

/// A permutation of `0..n` given by its images.
pub type Perm = Vec<usize>;

/// All permutations of `0..n` in lexicographic order.
pub fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // Next permutation in lexicographic order.
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Composite permutation `a ∘ b` (apply `b` first).
pub fn perm_compose(a: &[usize], b: &[usize]) -> Perm {
    b.iter().map(|&x| a[x]).collect()
}

pub fn perm_inverse(a: &[usize]) -> Perm {
    let mut inv = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// The block permutation `σ ∘_i id_m` of `0..n+m-1` (`i` zero based).
pub fn block_perm_outer(sigma: &[usize], i: usize, m: usize) -> Perm {
    let n = sigma.len();
    let s0 = sigma[i];
    let shift = |v: usize| if v < s0 { v } else { v + m - 1 };
    let mut out = Vec::with_capacity(n + m - 1);
    for p in 0..(n + m - 1) {
        if p < i {
            out.push(shift(sigma[p]));
        } else if p < i + m {
            out.push(s0 + (p - i));
        } else {
            out.push(shift(sigma[p + 1 - m]));
        }
    }
    out
}

/// The block permutation `id_n ∘_i τ` of `0..n+m-1` (`i` zero based).
pub fn block_perm_inner(n: usize, i: usize, tau: &[usize]) -> Perm {
    let m = tau.len();
    (0..(n + m - 1)).map(|p| if p >= i && p < i + m { i + tau[p - i] } else { p }).collect()
}

/// A finite monoid given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteMonoid {
    pub names: Vec<String>,
    pub mul: Vec<Vec<usize>>,
    pub unit: usize,
}

impl FiniteMonoid {
    pub fn new(names: Vec<String>, mul: Vec<Vec<usize>>, unit: usize) -> Result<Self> {
        let m = FiniteMonoid { names, mul, unit };
        let n = m.len();
        if m.mul.len() != n || m.mul.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) || unit >= n {
            return Err(Error::Invalid("malformed monoid table".into()));
        }
        for a in 0..n {
            if m.mul[unit][a] != a || m.mul[a][unit] != a {
                return Err(Error::Invalid("unit law fails".into()));
            }
            for b in 0..n {
                for c in 0..n {
                    if m.mul[m.mul[a][b]][c] != m.mul[a][m.mul[b][c]] {
                        return Err(Error::Invalid("monoid not associative".into()));
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn trivial() -> Self {
        FiniteMonoid { names: vec!["1".into()], mul: vec![vec![0]], unit: 0 }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    /// Index of an absorbing element, if one exists.
    pub fn zero(&self) -> Option<usize> {
        (0..self.len()).find(|&z| (0..self.len()).all(|a| self.mul[z][a] == z && self.mul[a][z] == z))
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.len()).all(|a| (0..self.len()).all(|b| self.mul[a][b] == self.mul[b][a]))
    }

    /// Direct product with pairs ordered lexicographically.
    pub fn product(&self, other: &FiniteMonoid) -> FiniteMonoid {
        let (p, q) = (self.len(), other.len());
        let names = (0..p * q).map(|k| format!("{}{}", self.names[k / q], other.names[k % q])).collect();
        let mul = (0..p * q)
            .map(|a| (0..p * q).map(|b| self.mul[a / q][b / q] * q + other.mul[a % q][b % q]).collect())
            .collect();
        FiniteMonoid { names, mul, unit: self.unit * q + other.unit }
    }

    /// The monoid `{1, b}` with `b·b = b`.
    pub fn idempotent_pair() -> Self {
        FiniteMonoid::new(vec!["1".into(), "b".into()], vec![vec![0, 1], vec![1, 1]], 0).expect("valid")
    }

    /// All monoids of order at most 3 with an absorbing element, up to isomorphism.
    pub fn small_with_zero() -> Vec<FiniteMonoid> {
        let n = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        vec![
            FiniteMonoid::trivial(),
            FiniteMonoid::idempotent_pair(),
            // a² = a
            FiniteMonoid::new(n(&["1", "a", "z"]), vec![vec![0, 1, 2], vec![1, 1, 2], vec![2, 2, 2]], 0)
                .expect("valid"),
            // a² = z
            FiniteMonoid::new(n(&["1", "a", "z"]), vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 2, 2]], 0)
                .expect("valid"),
            // a² = 1
            FiniteMonoid::new(n(&["1", "a", "z"]), vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 2]], 0)
                .expect("valid"),
        ]
    }
}

/// A finite reduced set operad with carriers up to a maximal arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetOperad {
    name: String,
    cap: usize,
    names: Vec<Vec<String>>,
    unit: u32,
    /// `comp[n][m][(i * |A(n)| + x) * |A(m)| + y] = x ∘_{i+1} y`.
    comp: Vec<Vec<Vec<u32>>>,
    perms: Vec<Vec<Perm>>,
    perm_index: Vec<HashMap<Perm, usize>>,
    /// `action[n][p][x] = perms[n][p] · x`.
    action: Vec<Vec<Vec<u32>>>,
}

/// Serialized operad: carriers, partial composition tables and action tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperadJson {
    pub name: String,
    pub cap: usize,
    pub carriers: Vec<Vec<String>>,
    pub unit: u32,
    /// `compose[n][m][i][x][y]` is the index of `x ∘_{i+1} y` in arity `n + m - 1`.
    pub compose: Vec<Vec<Vec<Vec<Vec<u32>>>>>,
    /// `action[n][p][x]` with permutations of `0..n` in lexicographic order.
    pub action: Vec<Vec<Vec<u32>>>,
}

impl SetOperad {
    /// Tabulates an operad from a concrete model.
    ///
    /// `partial(x, n, i, y, m)` returns `x ∘_{i+1} y` for `x` of arity `n`
    /// and `y` of arity `m`; `act(x, σ)` returns `σ·x`.
    pub fn from_model<T, C, P, A>(name: &str, cap: usize, carrier: C, unit: T, partial: P, act: A) -> Result<Self>
    where
        T: Clone + Eq + Hash + fmt::Display,
        C: Fn(usize) -> Vec<T>,
        P: Fn(&T, usize, usize, &T, usize) -> T,
        A: Fn(&T, &[usize]) -> T,
    {
        let carriers: Vec<Vec<T>> = (0..=cap).map(&carrier).collect();
        if carriers[0].len() != 1 {
            return Err(Error::Invalid("operad is not reduced".into()));
        }
        let index: Vec<HashMap<T, u32>> =
            carriers.iter().map(|c| c.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect()).collect();
        let lookup = |n: usize, t: &T| -> Result<u32> {
            index[n].get(t).copied().ok_or_else(|| Error::Invalid(format!("{t} is not in arity {n} of {name}")))
        };
        let unit_idx = lookup(1, &unit)?;
        let mut comp = vec![vec![Vec::new(); cap + 1]; cap + 1];
        for n in 1..=cap {
            for m in 0..=(cap + 1 - n) {
                let mut table = Vec::with_capacity(n * carriers[n].len() * carriers[m].len());
                for i in 0..n {
                    for x in &carriers[n] {
                        for y in &carriers[m] {
                            table.push(lookup(n + m - 1, &partial(x, n, i, y, m))?);
                        }
                    }
                }
                comp[n][m] = table;
            }
        }
        let perms: Vec<Vec<Perm>> = (0..=cap).map(all_perms).collect();
        let mut action = Vec::new();
        for n in 0..=cap {
            let mut per = Vec::new();
            for p in &perms[n] {
                per.push(carriers[n].iter().map(|x| lookup(n, &act(x, p))).collect::<Result<Vec<_>>>()?);
            }
            action.push(per);
        }
        let perm_index = perms.iter().map(|ps| ps.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect()).collect();
        Ok(SetOperad {
            name: name.to_string(),
            cap,
            names: carriers.iter().map(|c| c.iter().map(|t| t.to_string()).collect()).collect(),
            unit: unit_idx,
            comp,
            perms,
            perm_index,
            action,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Number of elements of arity `n` (zero beyond the cap).
    pub fn size(&self, n: usize) -> usize {
        self.names.get(n).map_or(0, Vec::len)
    }

    pub fn element_name(&self, n: usize, x: u32) -> &str {
        &self.names[n][x as usize]
    }

    pub fn find(&self, n: usize, name: &str) -> Option<u32> {
        self.names.get(n)?.iter().position(|s| s == name).map(|i| i as u32)
    }

    pub fn unit(&self) -> u32 {
        self.unit
    }

    /// `x ∘_i y` with `i` one based.
    pub fn compose_partial(&self, n: usize, x: u32, i: usize, m: usize, y: u32) -> Result<u32> {
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, arity: n });
        }
        if n + m - 1 > self.cap {
            return Err(Error::Capacity(format!("arity {} exceeds cap {} of {}", n + m - 1, self.cap, self.name)));
        }
        let (sx, sy) = (self.size(n), self.size(m));
        Ok(self.comp[n][m][((i - 1) * sx + x as usize) * sy + y as usize])
    }

    /// Full composition `x ∘ (y_1, …, y_n)` where `ys[j] = (arity, element)`.
    pub fn compose(&self, n: usize, x: u32, ys: &[(usize, u32)]) -> Result<(usize, u32)> {
        if ys.len() != n {
            return Err(Error::Invalid("wrong number of inputs".into()));
        }
        let mut cur = (n, x);
        for (j, &(m, y)) in ys.iter().enumerate().rev() {
            cur = (cur.0 + m - 1, self.compose_partial(cur.0, cur.1, j + 1, m, y)?);
        }
        Ok(cur)
    }

    /// `σ·x`.
    pub fn act(&self, n: usize, x: u32, sigma: &[usize]) -> u32 {
        self.action[n][self.perm_index[n][sigma]][x as usize]
    }

    /// `x` composed with the identity on inputs in `keep` (one based) and `0` elsewhere.
    pub fn restrict(&self, n: usize, x: u32, keep: &BTreeSet<usize>) -> Result<u32> {
        let mut cur = (n, x);
        for i in (1..=n).rev() {
            if !keep.contains(&i) {
                cur = (cur.0 - 1, self.compose_partial(cur.0, cur.1, i, 0, 0)?);
            }
        }
        Ok(cur.1)
    }

    /// The axial map: the restrictions of `x` to each single input.
    pub fn axial(&self, n: usize, x: u32) -> Vec<u32> {
        (1..=n).map(|i| self.restrict(n, x, &BTreeSet::from([i])).expect("restriction stays in range")).collect()
    }

    /// Checks unit, associativity, equivariance and action laws up to `max_arity`.
    pub fn check_laws(&self, max_arity: usize) -> Result<()> {
        let top = max_arity.min(self.cap);
        let fail = |what: String| Err(Error::Invalid(format!("{}: {what}", self.name)));
        for n in 0..=top {
            for x in 0..self.size(n) as u32 {
                if n >= 1 {
                    for i in 1..=n {
                        if self.compose_partial(n, x, i, 1, self.unit)? != x {
                            return fail(format!("right unit at arity {n}"));
                        }
                    }
                }
                if self.compose_partial(1, self.unit, 1, n, x)? != x {
                    return fail(format!("left unit at arity {n}"));
                }
                if self.act(n, x, &(0..n).collect::<Vec<_>>()) != x {
                    return fail("identity permutation".into());
                }
                for a in &self.perms[n] {
                    for b in &self.perms[n] {
                        if self.act(n, self.act(n, x, b), a) != self.act(n, x, &perm_compose(a, b)) {
                            return fail("action law".into());
                        }
                    }
                }
            }
        }
        for n in 1..=top {
            for m in 0..=(top + 1 - n) {
                let nm = n + m - 1;
                for x in 0..self.size(n) as u32 {
                    for y in 0..self.size(m) as u32 {
                        for i in 1..=n {
                            let xy = self.compose_partial(n, x, i, m, y)?;
                            for sigma in &self.perms[n] {
                                let lhs = self.compose_partial(n, self.act(n, x, sigma), sigma[i - 1] + 1, m, y)?;
                                let rhs = self.act(nm, xy, &block_perm_outer(sigma, i - 1, m));
                                if lhs != rhs {
                                    return fail(format!("outer equivariance n={n} m={m} i={i}"));
                                }
                            }
                            for tau in &self.perms[m] {
                                let lhs = self.compose_partial(n, x, i, m, self.act(m, y, tau))?;
                                let rhs = self.act(nm, xy, &block_perm_inner(n, i - 1, tau));
                                if lhs != rhs {
                                    return fail(format!("inner equivariance n={n} m={m} i={i}"));
                                }
                            }
                            for p in 0..=top {
                                if nm == 0 || nm + p - 1 > top {
                                    continue;
                                }
                                for z in 0..self.size(p) as u32 {
                                    // Sequential: (x ∘_i y) ∘_{i+j-1} z = x ∘_i (y ∘_j z).
                                    for j in 1..=m {
                                        let lhs = self.compose_partial(nm, xy, i + j - 1, p, z)?;
                                        let yz = self.compose_partial(m, y, j, p, z)?;
                                        let rhs = self.compose_partial(n, x, i, m + p - 1, yz)?;
                                        if lhs != rhs {
                                            return fail(format!("sequential associativity n={n} m={m} p={p}"));
                                        }
                                    }
                                    // Parallel: for i < k, (x ∘_k z) ∘_i y = (x ∘_i y) ∘_{k+m-1} z.
                                    for k in ((i + 1)..=n).filter(|_| n + p - 1 <= top) {
                                        let xz = self.compose_partial(n, x, k, p, z)?;
                                        let lhs = self.compose_partial(n + p - 1, xz, i, m, y)?;
                                        let rhs = self.compose_partial(nm, xy, k + m - 1, p, z)?;
                                        if lhs != rhs {
                                            return fail(format!("parallel associativity n={n} m={m} p={p}"));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> OperadJson {
        let mut compose = Vec::new();
        for n in 0..=self.cap {
            let mut per_m = Vec::new();
            for m in 0..=self.cap {
                if n == 0 || self.comp[n][m].is_empty() && (n + m).saturating_sub(1) > self.cap {
                    per_m.push(Vec::new());
                    continue;
                }
                let (sx, sy) = (self.size(n), self.size(m));
                let per_i = (0..n)
                    .map(|i| {
                        (0..sx).map(|x| (0..sy).map(|y| self.comp[n][m][(i * sx + x) * sy + y]).collect()).collect()
                    })
                    .collect();
                per_m.push(per_i);
            }
            compose.push(per_m);
        }
        OperadJson {
            name: self.name.clone(),
            cap: self.cap,
            carriers: self.names.clone(),
            unit: self.unit,
            compose,
            action: self.action.clone(),
        }
    }

    pub fn from_json(j: &OperadJson) -> Result<Self> {
        let cap = j.cap;
        if j.carriers.len() != cap + 1 || j.carriers[0].len() != 1 {
            return Err(Error::Invalid("carriers must cover arities 0..=cap with one nullary element".into()));
        }
        let mut comp = vec![vec![Vec::new(); cap + 1]; cap + 1];
        for n in 1..=cap {
            for m in 0..=(cap + 1 - n) {
                let per_i =
                    j.compose.get(n).and_then(|v| v.get(m)).ok_or_else(|| Error::Invalid("missing table".into()))?;
                let mut table = Vec::new();
                for i in 0..n {
                    for x in 0..j.carriers[n].len() {
                        for y in 0..j.carriers[m].len() {
                            let v = *per_i
                                .get(i)
                                .and_then(|t| t.get(x))
                                .and_then(|t| t.get(y))
                                .ok_or_else(|| Error::Invalid("short table".into()))?;
                            if v as usize >= j.carriers[n + m - 1].len() {
                                return Err(Error::Invalid("table entry out of range".into()));
                            }
                            table.push(v);
                        }
                    }
                }
                comp[n][m] = table;
            }
        }
        let perms: Vec<Vec<Perm>> = (0..=cap).map(all_perms).collect();
        if j.action.len() != cap + 1 || (0..=cap).any(|n| j.action[n].len() != perms[n].len()) {
            return Err(Error::Invalid("action table has the wrong shape".into()));
        }
        let op = SetOperad {
            name: j.name.clone(),
            cap,
            names: j.carriers.clone(),
            unit: j.unit,
            comp,
            perm_index: perms.iter().map(|ps| ps.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect()).collect(),
            perms,
            action: j.action.clone(),
        };
        op.check_laws(cap)?;
        Ok(op)
    }
}

/// Words of the associative operad: the list of inputs in product order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct AssWord(Vec<usize>);

impl fmt::Display for AssWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{}", parts.join(if self.0.len() > 9 { "." } else { "" }))
    }
}

/// The associative operad: arity `n` is the symmetric group on `n` letters.
pub fn ass(cap: usize) -> SetOperad {
    SetOperad::from_model(
        "Ass",
        cap,
        |n| all_perms(n).into_iter().map(AssWord).collect(),
        AssWord(vec![0]),
        |x, _n, i, y, m| {
            let mut out = Vec::new();
            for &l in &x.0 {
                if l == i {
                    out.extend(y.0.iter().map(|&t| t + i));
                } else if l > i {
                    out.push(l + m - 1);
                } else {
                    out.push(l);
                }
            }
            AssWord(out)
        },
        |x, s| AssWord(x.0.iter().map(|&l| s[l]).collect()),
    )
    .expect("associative operad tables are closed")
}

/// The commutative operad: one element in each arity.
pub fn com(cap: usize) -> SetOperad {
    SetOperad::from_model(
        "Com",
        cap,
        |n| vec![if n == 0 { "0".to_string() } else { format!("c{n}") }],
        "c1".to_string(),
        |_, n, _, _, m| if n + m == 1 { "0".to_string() } else { format!("c{}", n + m - 1) },
        |x, _| x.clone(),
    )
    .expect("commutative operad tables are closed")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Tuple(Vec<usize>, std::sync::Arc<Vec<String>>);

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<&str> = self.0.iter().map(|&i| self.1[i].as_str()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// The operad `RU(M)`: arity `k` is `M^k`, composition multiplies each block
/// coordinate on the left by the outer coordinate.
pub fn ru_operad(mon: &FiniteMonoid, cap: usize) -> SetOperad {
    let names = std::sync::Arc::new(mon.names.clone());
    let carrier = |n: usize| {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|t: Vec<usize>| (0..mon.len()).map(move |a| [t.clone(), vec![a]].concat()))
                .collect();
        }
        out.into_iter().map(|t| Tuple(t, names.clone())).collect()
    };
    SetOperad::from_model(
        &format!("RU{}", mon.len()),
        cap,
        carrier,
        Tuple(vec![mon.unit], names.clone()),
        |x, _n, i, y, _m| {
            let mut out = x.0[..i].to_vec();
            out.extend(y.0.iter().map(|&b| mon.mul(x.0[i], b)));
            out.extend_from_slice(&x.0[i + 1..]);
            Tuple(out, x.1.clone())
        },
        |x, s| {
            let mut out = vec![0; x.0.len()];
            for (j, &v) in x.0.iter().enumerate() {
                out[s[j]] = v;
            }
            Tuple(out, x.1.clone())
        },
    )
    .expect("RU tables are closed")
}

/// Elements of the two-level operad built by [`two_level`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum TwoLevel {
    Zero,
    Unary(usize, std::sync::Arc<Vec<String>>),
    Multi(usize, usize, std::sync::Arc<Vec<String>>),
}

impl fmt::Display for TwoLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TwoLevel::Zero => write!(f, "0"),
            TwoLevel::Unary(a, names) => write!(f, "{}", names[*a]),
            TwoLevel::Multi(n, a, names) => write!(f, "{}{}", names[*a], n),
        }
    }
}

/// A reduced operad with `A(1) = M` and `A(n) = N` for `2 ≤ n ≤ cap`.
///
/// `N` must be commutative with an absorbing element, `M` must have an
/// absorbing element, and `phi` must be a monoid map sending zero to zero.
/// Compositions multiply in `N` after applying `phi`; feeding a `0` into an
/// input multiplies by the zero, and results of arity one from `N` land on
/// the zero of `M`. Symmetric groups act trivially.
pub fn two_level(m: &FiniteMonoid, n: &FiniteMonoid, phi: &[usize], cap: usize) -> Result<SetOperad> {
    let zm = m.zero().ok_or_else(|| Error::Invalid("M needs a zero".into()))?;
    let zn = n.zero().ok_or_else(|| Error::Invalid("N needs a zero".into()))?;
    if !n.is_commutative() || phi.len() != m.len() || phi[zm] != zn || phi[m.unit] != n.unit {
        return Err(Error::Invalid("bad two-level data".into()));
    }
    let mn = std::sync::Arc::new(m.names.clone());
    let nn = std::sync::Arc::new(n.names.iter().map(|s| s.to_uppercase()).collect::<Vec<_>>());
    let value = |t: &TwoLevel| -> usize {
        match t {
            TwoLevel::Zero => zn,
            TwoLevel::Unary(a, _) => phi[*a],
            TwoLevel::Multi(_, a, _) => *a,
        }
    };
    let op = SetOperad::from_model(
        &format!("Two{}x{}", m.len(), n.len()),
        cap,
        |k| match k {
            0 => vec![TwoLevel::Zero],
            1 => (0..m.len()).map(|a| TwoLevel::Unary(a, mn.clone())).collect(),
            _ => (0..n.len()).map(|a| TwoLevel::Multi(k, a, nn.clone())).collect(),
        },
        TwoLevel::Unary(m.unit, mn.clone()),
        |x, ar, _i, y, ary| {
            let res = ar + ary - 1;
            match res {
                0 => TwoLevel::Zero,
                1 => match (x, y) {
                    (TwoLevel::Unary(a, _), TwoLevel::Unary(b, _)) => TwoLevel::Unary(m.mul(*a, *b), mn.clone()),
                    _ => TwoLevel::Unary(zm, mn.clone()),
                },
                _ => TwoLevel::Multi(res, n.mul(value(x), value(y)), nn.clone()),
            }
        },
        |x, _| x.clone(),
    )?;
    op.check_laws(cap)?;
    Ok(op)
}

/// Draws a random small operad (carriers of size at most 3 up to arity `cap`)
/// from the two-level family and the commutative operad.
pub fn random_small_operad<R: Rng>(rng: &mut R, cap: usize) -> SetOperad {
    let monoids = FiniteMonoid::small_with_zero();
    loop {
        if rng.gen_ratio(1, 8) {
            return com(cap);
        }
        let m = monoids.choose(rng).expect("nonempty");
        let n = monoids.choose(rng).expect("nonempty");
        let zm = m.zero().expect("has zero");
        let zn = n.zero().expect("has zero");
        // Random map M → N fixing unit and zero; invalid maps are rejected by the law check.
        let phi: Vec<usize> = (0..m.len())
            .map(|a| {
                if a == m.unit {
                    n.unit
                } else if a == zm {
                    zn
                } else {
                    rng.gen_range(0..n.len())
                }
            })
            .collect();
        if let Ok(op) = two_level(m, n, &phi, cap) {
            return op;
        }
    }
}

/// The operad `(Ass × RU(B(1)))/∼` computing `Ass ⊗ B` arity-wise.
///
/// Elements of arity `n` are pairs `(π, b)` with `π` a linear order of the
/// inputs and `b ∈ B(1)^n`; `(π, b) ∼ (ρ, b)` whenever every pair of inputs
/// ordered differently by `π` and `ρ` carries a pair of decorations in the
/// axial image of `B(2)`. Classes are the equivalence closure.
pub fn ass_tensor_formula(b: &SetOperad) -> Result<SetOperad> {
    let cap = b.cap();
    let axial2: BTreeSet<(u32, u32)> = (0..b.size(2) as u32)
        .map(|x| {
            let ax = b.axial(2, x);
            (ax[0], ax[1])
        })
        .collect();
    let unary: Vec<u32> = (0..b.size(1) as u32).collect();
    // Class representative of (π, b): least π reachable by the closure.
    let classes: Vec<HashMap<(Vec<usize>, Vec<u32>), (Vec<usize>, Vec<u32>)>> = (0..=cap)
        .map(|n| {
            let mut rep = HashMap::new();
            let mut deco = vec![Vec::new()];
            for _ in 0..n {
                deco = deco
                    .into_iter()
                    .flat_map(|t: Vec<u32>| unary.iter().map(move |&a| [t.clone(), vec![a]].concat()))
                    .collect();
            }
            for d in deco {
                let perms = all_perms(n);
                let mut parent: Vec<usize> = (0..perms.len()).collect();
                fn find(p: &mut Vec<usize>, x: usize) -> usize {
                    let mut r = x;
                    while p[r] != r {
                        r = p[r];
                    }
                    p[x] = r;
                    r
                }
                for (a, pa) in perms.iter().enumerate() {
                    for (c, pc) in perms.iter().enumerate().skip(a + 1) {
                        let pos_a = perm_inverse(pa);
                        let pos_c = perm_inverse(pc);
                        let ok = (0..n).all(|i| {
                            (0..n).all(|j| {
                                i == j
                                    || (pos_a[i] < pos_a[j]) == (pos_c[i] < pos_c[j])
                                    || axial2.contains(&(d[i], d[j]))
                            })
                        });
                        if ok {
                            let (ra, rc) = (find(&mut parent, a), find(&mut parent, c));
                            parent[ra.max(rc)] = ra.min(rc);
                        }
                    }
                }
                for (a, pa) in perms.iter().enumerate() {
                    let r = find(&mut parent, a);
                    rep.insert((pa.clone(), d.clone()), (perms[r].clone(), d.clone()));
                }
            }
            rep
        })
        .collect();
    #[derive(Clone, PartialEq, Eq, Hash)]
    struct El(Vec<usize>, Vec<u32>, std::sync::Arc<Vec<Vec<String>>>);
    impl fmt::Display for El {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if self.0.is_empty() {
                return write!(f, "0");
            }
            let w: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
            let d: Vec<&str> = self.1.iter().map(|&x| self.2[1][x as usize].as_str()).collect();
            write!(f, "{}.{}", w.join(""), d.join("."))
        }
    }
    let bnames = std::sync::Arc::new(
        (0..=cap)
            .map(|n| (0..b.size(n) as u32).map(|x| b.element_name(n, x).to_string()).collect())
            .collect::<Vec<Vec<String>>>(),
    );
    let canon = |pi: Vec<usize>, d: Vec<u32>| -> El {
        let (p, dd) = classes[pi.len()][&(pi, d)].clone();
        El(p, dd, bnames.clone())
    };
    let mut reps: Vec<Vec<El>> = Vec::new();
    for n in 0..=cap {
        let mut set: Vec<El> = classes[n].values().map(|(p, d)| El(p.clone(), d.clone(), bnames.clone())).collect();
        set.sort_by_key(|e| e.to_string());
        set.dedup();
        reps.push(set);
    }
    let op = SetOperad::from_model(
        &format!("Ass*{}", b.name()),
        cap,
        |n| reps[n].clone(),
        canon(vec![0], vec![b.unit()]),
        |x, _n, i, y, m| {
            // Ass part: substitute the word of y for letter i; decorations follow RU composition.
            let mut word = Vec::new();
            for &l in &x.0 {
                if l == i {
                    word.extend(y.0.iter().map(|&t| t + i));
                } else if l > i {
                    word.push(l + m - 1);
                } else {
                    word.push(l);
                }
            }
            let mut deco = x.1[..i].to_vec();
            deco.extend(y.1.iter().map(|&c| b.compose_partial(1, x.1[i], 1, 1, c).expect("unary composition")));
            deco.extend_from_slice(&x.1[i + 1..]);
            canon(word, deco)
        },
        |x, s| {
            let word = x.0.iter().map(|&l| s[l]).collect();
            let mut deco = vec![0; x.1.len()];
            for (j, &v) in x.1.iter().enumerate() {
                deco[s[j]] = v;
            }
            canon(word, deco)
        },
    )?;
    Ok(op)
}

/// `Com ⊗ B ≅ RU(B(1))`.
pub fn com_tensor_formula(b: &SetOperad) -> SetOperad {
    ru_operad(&unary_monoid(b), b.cap())
}

/// The monoid `B(1)` under composition.
pub fn unary_monoid(b: &SetOperad) -> FiniteMonoid {
    let n = b.size(1);
    FiniteMonoid {
        names: (0..n as u32).map(|x| b.element_name(1, x).to_string()).collect(),
        mul: (0..n as u32)
            .map(|x| (0..n as u32).map(|y| b.compose_partial(1, x, 1, 1, y).expect("unary") as usize).collect())
            .collect(),
        unit: b.unit() as usize,
    }
}

/// A planar tree term over a single operad. Nodes with no children are stumps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Input(u32),
    Node(u32, Vec<Term>),
}

impl Term {
    pub fn stump() -> Term {
        Term::Node(0, Vec::new())
    }

    /// The corolla on inputs `1..=n` labelled `x`.
    pub fn corolla(x: u32, n: usize) -> Term {
        Term::Node(x, (1..=n as u32).map(Term::Input).collect())
    }

    /// Input labels in planar order.
    pub fn inputs(&self) -> Vec<u32> {
        match self {
            Term::Input(i) => vec![*i],
            Term::Node(_, ch) => ch.iter().flat_map(Term::inputs).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.inputs().len()
    }

    /// Checks that input labels are exactly `1..=n` and labels are in range.
    pub fn validate(&self, op: &SetOperad) -> Result<()> {
        let mut ins = self.inputs();
        ins.sort_unstable();
        if ins != (1..=ins.len() as u32).collect::<Vec<_>>() {
            return Err(Error::Invalid("input labels are not a bijection onto 1..n".into()));
        }
        fn labels(t: &Term, op: &SetOperad) -> Result<()> {
            if let Term::Node(x, ch) = t {
                if *x as usize >= op.size(ch.len()) {
                    return Err(Error::Invalid("label arity mismatch".into()));
                }
                ch.iter().try_for_each(|c| labels(c, op))?;
            }
            Ok(())
        }
        labels(self, op)
    }

    /// Relabels inputs by `f`.
    pub fn map_inputs(&self, f: &impl Fn(u32) -> u32) -> Term {
        match self {
            Term::Input(i) => Term::Input(f(*i)),
            Term::Node(x, ch) => Term::Node(*x, ch.iter().map(|c| c.map_inputs(f)).collect()),
        }
    }

    /// Serialization `label(child,…)` with stumps written `0`.
    pub fn render(&self, op: &SetOperad) -> String {
        match self {
            Term::Input(i) => i.to_string(),
            Term::Node(_, ch) if ch.is_empty() => "0".to_string(),
            Term::Node(x, ch) => {
                let parts: Vec<String> = ch.iter().map(|c| c.render(op)).collect();
                format!("{}({})", op.element_name(ch.len(), *x), parts.join(","))
            }
        }
    }
}

/// Grafts `s` onto input `i` of `t`, renumbering inputs order-preservingly.
pub fn graft(t: &Term, i: u32, s: &Term) -> Result<Term> {
    let n = t.arity() as u32;
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i as usize, arity: n as usize });
    }
    let k = s.arity() as u32;
    let shifted = s.map_inputs(&|j| j + i - 1);
    fn go(t: &Term, i: u32, k: u32, s: &Term) -> Term {
        match t {
            Term::Input(j) if *j == i => s.clone(),
            Term::Input(j) if *j > i => Term::Input(j + k - 1),
            Term::Input(j) => Term::Input(*j),
            Term::Node(x, ch) => Term::Node(*x, ch.iter().map(|c| go(c, i, k, s)).collect()),
        }
    }
    Ok(go(t, i, k, &shifted))
}

/// Relabels inputs of `t` by the one-based permutation `sigma` (`j ↦ sigma[j-1]`).
pub fn act_sigma(t: &Term, sigma: &[u32]) -> Term {
    t.map_inputs(&|j| sigma[j as usize - 1])
}

/// Evaluates `t` to an element of arity `t.arity()`.
pub fn evaluate(op: &SetOperad, t: &Term) -> Result<u32> {
    fn go(op: &SetOperad, t: &Term) -> Result<(usize, u32, Vec<u32>)> {
        match t {
            Term::Input(i) => Ok((1, op.unit(), vec![*i])),
            Term::Node(x, ch) => {
                let parts: Vec<(usize, u32, Vec<u32>)> = ch.iter().map(|c| go(op, c)).collect::<Result<_>>()?;
                let ys: Vec<(usize, u32)> = parts.iter().map(|p| (p.0, p.1)).collect();
                let (n, v) = op.compose(ch.len(), *x, &ys)?;
                Ok((n, v, parts.into_iter().flat_map(|p| p.2).collect()))
            }
        }
    }
    let (n, v, labels) = go(op, t)?;
    // Planar position p carries label labels[p]; move it to slot rank(labels[p]).
    let mut sorted = labels.clone();
    sorted.sort_unstable();
    let sigma: Perm = labels.iter().map(|l| sorted.binary_search(l).expect("present")).collect();
    Ok(op.act(n, v, &sigma))
}

/// Canonical form under the unit and equivariance relations: unit unary
/// nodes are removed and children are sorted, with node labels adjusted.
pub fn canonical(op: &SetOperad, t: &Term) -> Term {
    match t {
        Term::Input(_) => t.clone(),
        Term::Node(x, ch) => {
            let kids: Vec<Term> = ch.iter().map(|c| canonical(op, c)).collect();
            if kids.len() == 1 && *x == op.unit() {
                return kids.into_iter().next().expect("one child");
            }
            let key = |c: &Term| (c.inputs().into_iter().min().unwrap_or(u32::MAX), c.clone());
            let mut order: Vec<usize> = (0..kids.len()).collect();
            order.sort_by_key(|&j| key(&kids[j]));
            // Child j moves to slot σ(j) where σ(order[s]) = s.
            let mut sigma = vec![0; kids.len()];
            for (s, &j) in order.iter().enumerate() {
                sigma[j] = s;
            }
            let label = op.act(kids.len(), *x, &sigma);
            Term::Node(label, order.into_iter().map(|j| kids[j].clone()).collect())
        }
    }
}
