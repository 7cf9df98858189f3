//! Pair partitions, permutations, operator words and Dyck paths, with their
//! crossing/nesting and inversion/coinversion generating polynomials.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guard::Guards;
use crate::poly::BivarPoly;
use crate::scalar::Scalar;

/// A perfect matching of `[2n]`, stored as `(opener, closer)` pairs sorted by opener.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct PairPartition {
    pairs: Vec<(usize, usize)>,
}

impl PairPartition {
    /// Validates and canonicalises a list of pairs over `[2n]` (1-based).
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut pairs: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        pairs.sort_unstable();
        let size = 2 * pairs.len();
        let mut seen = vec![false; size + 1];
        for &(a, b) in &pairs {
            for x in [a, b] {
                if x == 0 || x > size {
                    return Err(Error::Invalid(format!("element {x} outside [1, {size}]")));
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::Invalid(format!("element {x} appears twice")));
                }
            }
        }
        Ok(Self { pairs })
    }

    pub(crate) fn from_canonical(pairs: Vec<(usize, usize)>) -> Self {
        debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Number of pairs `n`; the ground set is `[2n]`.
    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn crossings(&self) -> usize {
        self.count_pattern(|(w1, z1), (w2, z2)| w1 < w2 && w2 < z1 && z1 < z2)
    }

    pub fn nestings(&self) -> usize {
        self.count_pattern(|(w1, z1), (w2, z2)| w1 < w2 && z2 < z1)
    }

    /// Pairs of chords that neither cross nor nest (`w_i < z_i < w_j < z_j`).
    pub fn alignments(&self) -> usize {
        self.count_pattern(|(_, z1), (w2, _)| z1 < w2)
    }

    fn count_pattern(&self, pattern: impl Fn((usize, usize), (usize, usize)) -> bool) -> usize {
        let mut count = 0;
        for (i, &a) in self.pairs.iter().enumerate() {
            for &b in &self.pairs[i + 1..] {
                if pattern(a, b) {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn is_non_crossing(&self) -> bool {
        self.crossings() == 0
    }

    /// Rotates the chord diagram: every point `x` moves to `x + k (mod 2n)`.
    pub fn rotate(&self, k: usize) -> Self {
        let size = 2 * self.n();
        let shift = |x: usize| (x - 1 + k) % size + 1;
        Self::new(self.pairs.iter().map(|&(a, b)| (shift(a), shift(b))))
            .expect("rotation preserves a perfect matching")
    }

    /// Two-line notation of `σ` with the bottom row reversed: `i ↦ (i, 2n + 1 - σ(i))`.
    ///
    /// Inversions of `σ` become crossings and coinversions become nestings.
    pub fn from_permutation(sigma: &Permutation) -> Self {
        let n = sigma.len();
        Self::from_canonical(
            sigma
                .images()
                .iter()
                .enumerate()
                .map(|(i, &s)| (i + 1, 2 * n + 1 - s))
                .collect(),
        )
    }
}

impl TryFrom<Vec<(usize, usize)>> for PairPartition {
    type Error = Error;

    fn try_from(pairs: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(pairs)
    }
}

impl From<PairPartition> for Vec<(usize, usize)> {
    fn from(p: PairPartition) -> Self {
        p.pairs
    }
}

impl fmt::Display for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Visits every pair partition of `[2n]` in canonical form.
///
/// The smallest unmatched point is paired with each later unmatched point in turn,
/// so partitions arrive in lexicographic order of their pair lists.
pub fn for_each_pair_partition(n: usize, guards: &Guards, mut visit: impl FnMut(&PairPartition)) -> Result<()> {
    if n == 0 {
        return Err(Error::Invalid("pair partitions need n >= 1".into()));
    }
    guards.check_pairings(n)?;
    let mut used = vec![false; 2 * n + 1];
    let mut current = PairPartition { pairs: Vec::with_capacity(n) };
    fn recurse(used: &mut [bool], current: &mut PairPartition, visit: &mut dyn FnMut(&PairPartition)) {
        let Some(first) = (1..used.len()).find(|&x| !used[x]) else {
            visit(current);
            return;
        };
        used[first] = true;
        for partner in first + 1..used.len() {
            if used[partner] {
                continue;
            }
            used[partner] = true;
            current.pairs.push((first, partner));
            recurse(used, current, visit);
            current.pairs.pop();
            used[partner] = false;
        }
        used[first] = false;
    }
    recurse(&mut used, &mut current, &mut visit);
    Ok(())
}

/// All `(2n-1)!!` pair partitions of `[2n]`.
pub fn enumerate_pair_partitions(n: usize, guards: &Guards) -> Result<Vec<PairPartition>> {
    let mut out = Vec::new();
    for_each_pair_partition(n, guards, |p| out.push(p.clone()))?;
    Ok(out)
}

/// `Σ_{V ∈ P₂(2n)} q^cross(V) t^nest(V)`, by exhaustive enumeration.
pub fn joint_cross_nest_polynomial(n: usize, guards: &Guards) -> Result<BivarPoly> {
    let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
    for_each_pair_partition(n, guards, |p| {
        *counts.entry((p.crossings() as u32, p.nestings() as u32)).or_default() += 1;
    })?;
    Ok(poly_from_counts(counts))
}

fn poly_from_counts(counts: HashMap<(u32, u32), u64>) -> BivarPoly {
    let mut poly = BivarPoly::default();
    for (mono, c) in counts {
        poly.add_term(mono, BigInt::from(c));
    }
    poly
}

/// A bijection of `[n]`, stored as its 1-based images.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &x in &images {
            if x == 0 || x > n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Invalid(format!("{images:?} is not a permutation of 1..={n}")));
            }
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (1..=n).collect() }
    }

    pub fn reversal(n: usize) -> Self {
        Self { images: (1..=n).rev().collect() }
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &s) in self.images.iter().enumerate() {
            inv[s - 1] = i + 1;
        }
        Self { images: inv }
    }

    pub fn inversions(&self) -> usize {
        self.count_pairs(|a, b| a > b)
    }

    pub fn coinversions(&self) -> usize {
        self.count_pairs(|a, b| a < b)
    }

    fn count_pairs(&self, pred: impl Fn(usize, usize) -> bool) -> usize {
        let mut count = 0;
        for (i, &a) in self.images.iter().enumerate() {
            count += self.images[i + 1..].iter().filter(|&&b| pred(a, b)).count();
        }
        count
    }
}

/// Visits all permutations of `[n]` in lexicographic order.
pub fn for_each_permutation(n: usize, guards: &Guards, mut visit: impl FnMut(&Permutation)) -> Result<()> {
    guards.check_perms(n)?;
    let mut perm = Permutation::identity(n);
    loop {
        visit(&perm);
        if !next_permutation(&mut perm.images) {
            return Ok(());
        }
    }
}

fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// `Σ_{σ ∈ S_n} q^inv(σ) t^coinv(σ)`, summed over all permutations.
pub fn perm_inv_div_polynomial(n: usize, guards: &Guards) -> Result<BivarPoly> {
    if n == 0 {
        return Err(Error::Invalid("permutations need n >= 1".into()));
    }
    let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
    for_each_permutation(n, guards, |s| {
        *counts.entry((s.inversions() as u32, s.coinversions() as u32)).or_default() += 1;
    })?;
    Ok(poly_from_counts(counts))
}

/// `[n]_{q,t} = t^{n-1} + q t^{n-2} + … + q^{n-1}` in the summation form (valid at `q = t`).
pub fn qt_integer<R: Scalar>(n: u32, q: &R, t: &R) -> R {
    let mut acc = R::zero();
    for k in 0..n {
        acc = acc + q.powu(k) * t.powu(n - 1 - k);
    }
    acc
}

/// `[n]_{q,t}` for doubles, using `(t^n - q^n)/(t - q)` away from the diagonal `q = t`.
pub fn qt_integer_f64(n: u32, q: f64, t: f64) -> f64 {
    if (t - q).abs() > 1e-8 * t.abs().max(q.abs()).max(1.0) {
        (t.powi(n as i32) - q.powi(n as i32)) / (t - q)
    } else {
        qt_integer(n, &q, &t)
    }
}

pub fn qt_integer_poly(n: u32) -> BivarPoly {
    qt_integer(n, &BivarPoly::q(), &BivarPoly::t())
}

/// `[1]_{q,t} [2]_{q,t} … [n]_{q,t}`.
pub fn qt_factorial<R: Scalar>(n: u32, q: &R, t: &R) -> R {
    (1..=n).fold(R::one(), |acc, k| acc * qt_integer(k, q, t))
}

/// Letter of an operator word: `Star` marks a creation operator `a*`, `One` an annihilation `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    Star,
    One,
}

/// An operator word `(ε(1), …, ε(k))` read left to right as a product `a^{ε(1)} ⋯ a^{ε(k)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EpsilonWord {
    letters: Vec<Letter>,
}

impl EpsilonWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    /// Parses a string over `{'*', '1'}`, e.g. `"1*"` for `a a*`.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '*' => Ok(Letter::Star),
                '1' => Ok(Letter::One),
                other => Err(Error::Invalid(format!("unexpected letter {other:?} in operator word"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The word in the order the operators act on the vacuum (right to left).
    ///
    /// Every Dyck/matching predicate goes through this one reversal.
    pub fn action_order(&self) -> EpsilonWord {
        Self::new(self.letters.iter().rev().copied().collect())
    }
}

impl fmt::Display for EpsilonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", if *l == Letter::Star { '*' } else { '1' })?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    NE,
    SE,
}

/// A Dyck path: NE/SE steps staying weakly above the axis and ending on it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyckPath {
    steps: Vec<Step>,
}

impl DyckPath {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        if is_dyck(&steps) {
            Ok(Self { steps })
        } else {
            Err(Error::Invalid("steps do not form a Dyck path".into()))
        }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Heights before each step.
    pub fn heights(&self) -> Vec<usize> {
        let mut h = 0usize;
        self.steps
            .iter()
            .map(|s| {
                let before = h;
                match s {
                    Step::NE => h += 1,
                    Step::SE => h -= 1,
                }
                before
            })
            .collect()
    }
}

fn is_dyck(steps: &[Step]) -> bool {
    let mut h: i64 = 0;
    for s in steps {
        h += if *s == Step::NE { 1 } else { -1 };
        if h < 0 {
            return false;
        }
    }
    h == 0
}

/// Letter-by-letter map `* ↦ NE`, `1 ↦ SE` (no reversal).
pub fn word_to_path(e: &EpsilonWord) -> Vec<Step> {
    e.letters()
        .iter()
        .map(|l| match l {
            Letter::Star => Step::NE,
            Letter::One => Step::SE,
        })
        .collect()
}

/// Whether the vacuum moment of the word can be non-zero: its action order maps to a Dyck path.
pub fn is_dyck_moment_word(e: &EpsilonWord) -> bool {
    is_dyck(&word_to_path(&e.action_order()))
}

/// Pairings of the action-order word in which each `1` closes an earlier, still open `*`.
///
/// Positions refer to the action-order word. Empty when the word is not a Dyck moment word.
pub fn matching_class(e: &EpsilonWord) -> Vec<PairPartition> {
    if !is_dyck_moment_word(e) {
        return Vec::new();
    }
    let word = e.action_order();
    let mut out = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    fn recurse(
        letters: &[Letter],
        pos: usize,
        open: &mut Vec<usize>,
        pairs: &mut Vec<(usize, usize)>,
        out: &mut Vec<PairPartition>,
    ) {
        if pos == letters.len() {
            out.push(PairPartition::new(pairs.iter().copied()).expect("complete matching"));
            return;
        }
        match letters[pos] {
            Letter::Star => {
                open.push(pos + 1);
                recurse(letters, pos + 1, open, pairs, out);
                open.pop();
            }
            Letter::One => {
                for i in 0..open.len() {
                    let opener = open.remove(i);
                    pairs.push((opener, pos + 1));
                    recurse(letters, pos + 1, open, pairs, out);
                    pairs.pop();
                    open.insert(i, opener);
                }
            }
        }
    }
    recurse(word.letters(), 0, &mut open, &mut pairs, &mut out);
    out.sort();
    out
}

/// All Dyck words of length `2n` (as operator words in action order, `*` = up).
pub fn dyck_words(n: usize) -> Vec<EpsilonWord> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(2 * n);
    fn recurse(n: usize, up: usize, down: usize, cur: &mut Vec<Letter>, out: &mut Vec<EpsilonWord>) {
        if up == n && down == n {
            out.push(EpsilonWord::new(cur.clone()));
            return;
        }
        if up < n {
            cur.push(Letter::Star);
            recurse(n, up + 1, down, cur, out);
            cur.pop();
        }
        if down < up {
            cur.push(Letter::One);
            recurse(n, up, down + 1, cur, out);
            cur.pop();
        }
    }
    recurse(n, 0, 0, &mut current, &mut out);
    out
}

pub fn double_factorial_odd(n: usize) -> u64 {
    (1..=n as u64).map(|k| 2 * k - 1).product()
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
