//! Test oracles. Nothing here calls into the reduction, folding or Smith
//! code under test; words are plain `Vec<i8>` with `±(gen + 1)` letters.

#![allow(dead_code)]

use std::collections::HashSet;
use std::hash::{BuildHasherDefault, Hasher};
use std::sync::Arc;

use fgkit::{Alphabet, Letter, Word};

pub type Raw = Vec<i8>;

/// Free reduction by repeated scanning until nothing cancels.
pub fn naive_reduce(w: &[i8]) -> Raw {
    let mut v = w.to_vec();
    loop {
        let pos = v.windows(2).position(|p| p[0] == -p[1]);
        match pos {
            Some(i) => {
                v.drain(i..i + 2);
            }
            None => return v,
        }
    }
}

pub fn naive_mul(a: &[i8], b: &[i8]) -> Raw {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    naive_reduce(&v)
}

pub fn naive_inv(a: &[i8]) -> Raw {
    a.iter().rev().map(|x| -x).collect()
}

pub fn to_raw(w: &Word) -> Raw {
    w.letters()
        .iter()
        .map(|l| {
            let g = l.gen() as i8 + 1;
            if l.is_positive() {
                g
            } else {
                -g
            }
        })
        .collect()
}

pub fn from_raw(alpha: &Arc<Alphabet>, raw: &[i8]) -> Word {
    Word::reduce(
        alpha,
        raw.iter().map(|&x| Letter::new(x.unsigned_abs() as usize - 1, x > 0)),
    )
    .unwrap()
}

/// All reduced words of length `0..=max_len` in `rank` generators.
pub fn all_reduced(rank: usize, max_len: usize) -> Vec<Raw> {
    let letters: Vec<i8> = (1..=rank as i8).flat_map(|g| [g, -g]).collect();
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &letters {
                if w.last() == Some(&-l) {
                    continue;
                }
                let mut v: Raw = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Subgroup elements reachable from the identity by multiplying by
/// generators and their inverses, keeping every intermediate product of
/// reduced length at most `bound` (at most 28). Rank at most 4.
pub fn subgroup_ball(generators: &[Raw], bound: usize) -> Ball {
    assert!(bound <= 28);
    let steps: Vec<Raw> = generators
        .iter()
        .filter(|g| !g.is_empty())
        .flat_map(|g| [g.clone(), naive_inv(g)])
        .collect();
    let mut seen: KeySet = KeySet::default();
    seen.insert(pack(&[]));
    let mut frontier: Vec<u64> = vec![pack(&[])];
    let mut buf = Vec::with_capacity(bound + 4);
    while let Some(key) = frontier.pop() {
        for s in &steps {
            unpack_into(key, &mut buf);
            let mut k = 0;
            while k < buf.len() && k < s.len() && buf[buf.len() - 1 - k] == -s[k] {
                k += 1;
            }
            if buf.len() - k + s.len() - k > bound {
                continue;
            }
            buf.truncate(buf.len() - k);
            buf.extend_from_slice(&s[k..]);
            let p = pack(&buf);
            if seen.insert(p) {
                frontier.push(p);
            }
        }
    }
    Ball(seen)
}

/// Multiplicative hash for packed word keys.
#[derive(Default)]
pub struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }

    fn write_u64(&mut self, x: u64) {
        self.0 = (self.0.rotate_left(5) ^ x).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
}

type KeySet = HashSet<u64, BuildHasherDefault<KeyHasher>>;

pub struct Ball(KeySet);

impl Ball {
    pub fn contains(&self, w: &[i8]) -> bool {
        self.0.contains(&pack(w))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

// 3 bits per letter, length in the top byte
fn pack(w: &[i8]) -> u64 {
    let mut bits = 0u64;
    for (i, &x) in w.iter().enumerate() {
        let code = if x > 0 { 2 * (x as u64 - 1) } else { 2 * ((-x) as u64 - 1) + 1 };
        bits |= code << (3 * i);
    }
    bits | ((w.len() as u64) << 56)
}

fn unpack_into(key: u64, out: &mut Vec<i8>) {
    out.clear();
    let len = (key >> 56) as usize;
    for i in 0..len {
        let code = ((key >> (3 * i)) & 7) as i8;
        let g = code / 2 + 1;
        out.push(if code % 2 == 0 { g } else { -g });
    }
}

/// Index of the row lattice in `Z^n` via Hermite-style gcd elimination;
/// `None` when the rows do not span a full-rank lattice.
pub fn hermite_index(rows: &[Vec<i64>], n: usize) -> Option<i128> {
    let mut m: Vec<Vec<i128>> =
        rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut index: i128 = 1;
    for (top, col) in (0..n).enumerate() {
        // Euclid on column `col` among rows top..
        loop {
            let nonzero: Vec<usize> = (top..m.len()).filter(|&r| m[r][col] != 0).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let pivot = *nonzero.iter().min_by_key(|&&r| m[r][col].abs()).unwrap();
            for &r in &nonzero {
                if r != pivot {
                    let q = m[r][col] / m[pivot][col];
                    let src = m[pivot].clone();
                    for (x, y) in m[r].iter_mut().zip(src) {
                        *x -= q * y;
                    }
                }
            }
        }
        let r = (top..m.len()).find(|&r| m[r][col] != 0)?;
        m.swap(top, r);
        index *= m[top][col].abs();
    }
    Some(index)
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Fraction-free (Bareiss) determinant.
pub fn bareiss_det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Signed permutations of the generators: `table[g]` is the image of
/// generator `g + 1`. These are automorphisms preserving word length.
pub fn letter_symmetries(rank: usize) -> Vec<Vec<i8>> {
    let mut perms: Vec<Vec<i8>> = vec![vec![]];
    for g in 1..=rank as i8 {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=p.len()).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, g);
                    q
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for p in perms {
        for mask in 0..(1u32 << rank) {
            out.push(
                p.iter()
                    .enumerate()
                    .map(|(i, &x)| if mask >> i & 1 == 1 { -x } else { x })
                    .collect(),
            );
        }
    }
    out
}

pub fn apply_symmetry(table: &[i8], w: &[i8]) -> Raw {
    w.iter()
        .map(|&x| if x > 0 { table[x as usize - 1] } else { -table[(-x) as usize - 1] })
        .collect()
}
