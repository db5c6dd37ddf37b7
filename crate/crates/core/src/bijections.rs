//! Dyck paths, the level-removal bijection onto 132-avoiders, the
//! Simion–Schmidt bijection between 123- and 132-avoiders, and uniform
//! samplers for the four classes 123, 132, 321, 231.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_pcg::Pcg64;

use crate::error::{Error, Result};
use crate::perm::{contains, find_132_witness, Permutation, S3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    U,
    D,
}

/// A balanced word over `{U, D}` whose prefixes never dip below zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyckPath {
    // true = U
    steps: Vec<bool>,
}

impl DyckPath {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        let mut height: i64 = 0;
        for (i, s) in steps.iter().enumerate() {
            height += if *s == Step::U { 1 } else { -1 };
            if height < 0 {
                return Err(Error::domain(format!("path goes below zero at step {}", i + 1)));
            }
        }
        if height != 0 {
            return Err(Error::domain(format!("path ends at height {height}, not 0")));
        }
        Ok(DyckPath {
            steps: steps.into_iter().map(|s| s == Step::U).collect(),
        })
    }

    /// `(ud)^n`.
    pub fn sawtooth(n: usize) -> Self {
        DyckPath {
            steps: (0..2 * n).map(|i| i % 2 == 0).collect(),
        }
    }

    /// `u^n d^n`.
    pub fn pyramid(n: usize) -> Self {
        DyckPath {
            steps: (0..2 * n).map(|i| i < n).collect(),
        }
    }

    pub fn semilength(&self) -> usize {
        self.steps.len() / 2
    }

    pub fn steps(&self) -> impl Iterator<Item = Step> + '_ {
        self.steps.iter().map(|&u| if u { Step::U } else { Step::D })
    }

    /// Heights at which each downstep starts, left to right.
    pub fn levels(&self) -> Vec<usize> {
        let mut height = 0usize;
        let mut out = Vec::with_capacity(self.semilength());
        for &up in &self.steps {
            if up {
                height += 1;
            } else {
                out.push(height);
                height -= 1;
            }
        }
        out
    }

    /// Inverse of [`DyckPath::levels`]. Fails unless `levels` ends at 1, stays
    /// positive, and never drops by more than one between downsteps.
    pub fn from_levels(levels: &[usize]) -> Result<Self> {
        let mut steps = Vec::with_capacity(2 * levels.len());
        let mut height = 0usize;
        for (i, &y) in levels.iter().enumerate() {
            if y == 0 || y < height {
                return Err(Error::domain(format!(
                    "level {y} at downstep {} unreachable from height {height}",
                    i + 1
                )));
            }
            steps.extend(std::iter::repeat_n(true, y - height));
            steps.push(false);
            height = y - 1;
        }
        if height != 0 {
            return Err(Error::domain("levels do not return to height 0"));
        }
        Ok(DyckPath { steps })
    }
}

impl fmt::Display for DyckPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.steps
            .iter()
            .try_for_each(|&u| f.write_str(if u { "u" } else { "d" }))
    }
}

/// Parses words such as `uuduuddudd` (case-insensitive).
impl FromStr for DyckPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let steps = s
            .trim()
            .chars()
            .map(|c| match c {
                'u' | 'U' => Ok(Step::U),
                'd' | 'D' => Ok(Step::D),
                other => Err(Error::domain(format!("bad step {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        DyckPath::new(steps)
    }
}

/// Deterministic generator: PCG-64 (XSL-RR 128/64) with 128-bit state.
///
/// `SeededRng::new(seed)` is stream 0 of `seed`. Parallel or sharded work
/// uses `SeededRng::with_stream(seed, k)` for shard `k`: the PCG increment
/// is derived from `k`, so shards are distinct sequences, not offsets into
/// one sequence. Streams are stable within one release of this crate only.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: Pcg64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let state = (u128::from(seed) << 64) | u128::from(seed ^ 0x9e37_79b9_7f4a_7c15);
        SeededRng {
            seed,
            stream,
            inner: Pcg64::new(state, u128::from(stream)),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

impl SeedableRng for SeededRng {
    type Seed = [u8; 8];

    fn from_seed(seed: Self::Seed) -> Self {
        SeededRng::new(u64::from_le_bytes(seed))
    }
}

/// Binary indexed tree over `1..=n` holding 0/1 occupancy.
struct Fenwick {
    tree: Vec<u32>,
    log: u32,
}

impl Fenwick {
    fn full(n: usize) -> Self {
        let mut tree = vec![0u32; n + 1];
        for i in 1..=n {
            tree[i] += 1;
            let parent = i + (i & i.wrapping_neg());
            if parent <= n {
                tree[parent] += tree[i];
            }
        }
        let log = usize::BITS - n.leading_zeros();
        Fenwick { tree, log }
    }

    fn add(&mut self, mut i: usize, delta: i32) {
        while i < self.tree.len() {
            self.tree[i] = self.tree[i].wrapping_add_signed(delta);
            i += i & i.wrapping_neg();
        }
    }

    fn prefix(&self, mut i: usize) -> usize {
        let mut s = 0;
        while i > 0 {
            s += self.tree[i] as usize;
            i &= i - 1;
        }
        s
    }

    /// Smallest index whose prefix count reaches `rank` (1-based).
    fn select(&self, mut rank: usize) -> usize {
        let mut pos = 0;
        for b in (0..self.log).rev() {
            let next = pos + (1 << b);
            if next < self.tree.len() && (self.tree[next] as usize) < rank {
                pos = next;
                rank -= self.tree[next] as usize;
            }
        }
        pos + 1
    }
}

/// Maps a Dyck path to a 132-avoider: starting from the string `n ... 1`,
/// the `i`-th downstep at level `y_i` removes the `y_i`-th remaining entry,
/// which becomes `τ(i)`. `O(n log n)`.
pub fn phi(gamma: &DyckPath) -> Permutation {
    let n = gamma.semilength();
    let mut remaining = Fenwick::full(n);
    let values = gamma
        .levels()
        .into_iter()
        .map(|y| {
            // Slot p of the string holds n+1-p.
            let p = remaining.select(y);
            remaining.add(p, -1);
            n + 1 - p
        })
        .collect();
    Permutation::from_vec_unchecked(values)
}

/// Inverse of [`phi`]. Rejects inputs containing 132, naming an occurrence.
pub fn phi_inv(tau: &Permutation) -> Result<DyckPath> {
    if let Some((i, j, k)) = find_132_witness(tau) {
        return Err(Error::domain(format!(
            "permutation contains 132 at positions ({i},{j},{k}) with values ({},{},{})",
            tau.at(i),
            tau.at(j),
            tau.at(k)
        )));
    }
    let n = tau.len();
    // Indexed by slot n+1-v, so prefix sums count remaining values >= v.
    let mut remaining = Fenwick::full(n);
    let levels: Vec<usize> = tau
        .values()
        .iter()
        .map(|&v| {
            let slot = n + 1 - v;
            let y = remaining.prefix(slot);
            remaining.add(slot, -1);
            y
        })
        .collect();
    DyckPath::from_levels(&levels)
        .map_err(|e| Error::consistency(format!("132-avoider produced invalid levels: {e}")))
}

/// Uniform Dyck path of semilength `n` by the cycle lemma: a uniform
/// arrangement of `n` U's and `n+1` D's has exactly one rotation whose
/// proper prefixes stay nonnegative; dropping its final D leaves the path.
pub fn sample_dyck<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> DyckPath {
    let len = 2 * n + 1;
    let mut word: Vec<bool> = (0..len).map(|i| i < n).collect();
    word.shuffle(rng);
    let mut height: i64 = 0;
    let (mut min, mut at) = (0i64, 0usize);
    for (i, &up) in word.iter().enumerate() {
        height += if up { 1 } else { -1 };
        if height < min {
            min = height;
            at = i + 1;
        }
    }
    let start = at % len;
    let mut steps = Vec::with_capacity(2 * n);
    steps.extend_from_slice(&word[start..]);
    steps.extend_from_slice(&word[..start]);
    let last = steps.pop();
    debug_assert_eq!(last, Some(false));
    DyckPath { steps }
}

fn left_to_right_minima(values: &[usize]) -> Vec<bool> {
    let mut cur = usize::MAX;
    values
        .iter()
        .map(|&v| {
            let is_min = v < cur;
            cur = cur.min(v);
            is_min
        })
        .collect()
}

/// Simion–Schmidt: left-to-right minima stay in place; every other position
/// takes the smallest unused value above the current minimum.
pub fn map_123_132(sigma: &Permutation) -> Result<Permutation> {
    if contains(sigma, &S3::P123.into()) {
        return Err(Error::domain(format!("{sigma} contains 123")));
    }
    simion_schmidt(sigma, true)
}

/// Inverse of [`map_123_132`]: non-minima take unused values in decreasing
/// order.
pub fn map_132_123(tau: &Permutation) -> Result<Permutation> {
    if let Some((i, j, k)) = find_132_witness(tau) {
        return Err(Error::domain(format!(
            "{tau} contains 132 at positions ({i},{j},{k})"
        )));
    }
    simion_schmidt(tau, false)
}

fn simion_schmidt(sigma: &Permutation, ascending: bool) -> Result<Permutation> {
    let values = sigma.values();
    let is_min = left_to_right_minima(values);
    let mut free: BTreeSet<usize> = values
        .iter()
        .zip(&is_min)
        .filter(|(_, &m)| !m)
        .map(|(&v, _)| v)
        .collect();
    let mut cur = usize::MAX;
    let mut out = Vec::with_capacity(values.len());
    for (&v, &m) in values.iter().zip(&is_min) {
        if m {
            cur = v;
            out.push(v);
            continue;
        }
        let pick = if ascending {
            free.range(cur + 1..).next().copied()
        } else {
            free.last().copied().filter(|&x| x > cur)
        };
        let x = pick.ok_or_else(|| {
            Error::consistency(format!("no value above the running minimum {cur} for {sigma}"))
        })?;
        free.remove(&x);
        out.push(x);
    }
    Ok(Permutation::from_vec_unchecked(out))
}

/// A uniform random element of `S_n`.
pub fn sample_uniform<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut v: Vec<usize> = (1..=n).collect();
    v.shuffle(rng);
    Permutation::from_vec_unchecked(v)
}

/// A uniform random avoider of `pattern`, one of 123, 132, 321, 231.
pub fn sample_avoider<R: RngCore + ?Sized>(n: usize, pattern: S3, rng: &mut R) -> Result<Permutation> {
    let mut tau = || phi(&sample_dyck(n, rng));
    match pattern {
        S3::P132 => Ok(tau()),
        S3::P231 => Ok(tau().reverse()),
        S3::P123 => map_132_123(&tau()),
        S3::P321 => Ok(map_132_123(&tau())?.reverse()),
        other => Err(Error::domain(format!(
            "no sampler for class {other}; supported: 123, 132, 321, 231"
        ))),
    }
}
