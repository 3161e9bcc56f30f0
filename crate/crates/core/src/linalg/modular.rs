//! Multi-modular reduced row echelon form, certified exactly over `Q`.
//!
//! Rows are scaled to integers, reduced modulo a sequence of word-size primes,
//! combined by CRT and lifted back by rational reconstruction. The candidate
//! `R` is accepted only after two exact checks:
//!
//! - `rank_p(A) = rank(R)`, which bounds `rank_Q(A)` from below;
//! - every row of `A` reduces to zero against `R`, which puts the row space
//!   of `A` inside the row space of `R`.
//!
//! Together with `R` being in reduced form this forces `R = rref(A)`, so the
//! result never depends on the primes chosen. Intermediate growth of rational
//! elimination is avoided entirely; cost is governed by the size of the answer.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Rational, SparseVec};

/// Largest number of primes tried before falling back to rational elimination.
const MAX_PRIMES: usize = 400;

type ModRow = Vec<(usize, u64)>;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit inputs.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes just below 2^31, descending. Products of two residues fit in u64.
fn primes() -> impl Iterator<Item = u64> {
    (1u64..(1 << 31)).rev().filter(|&n| n % 2 == 1 && is_prime(n))
}

fn reduce_int(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.iter_u64_digits().next().unwrap_or(0)
}

/// Rows cleared of denominators; the row space is unchanged.
fn integer_rows(rows: &[SparseVec]) -> Vec<Vec<(usize, BigInt)>> {
    rows.iter()
        .filter(|r| !r.is_zero())
        .map(|r| {
            let l = r
                .iter()
                .fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
            r.iter()
                .map(|(c, x)| (c, x.numer() * (&l / x.denom())))
                .collect()
        })
        .collect()
}

struct ModRref {
    pivots: Vec<usize>,
    /// Row `i` restricted to the non-pivot columns, in column order.
    rows: Vec<ModRow>,
}

/// Reduced echelon form modulo `p`; stops early once the rank is full.
fn rref_mod(rows: &[Vec<(usize, BigInt)>], ncols: usize, p: u64) -> ModRref {
    let mut pivot_row: Vec<Option<usize>> = vec![None; ncols];
    let mut stored: Vec<ModRow> = Vec::new();
    let mut dense = vec![0u64; ncols];
    for row in rows {
        if stored.len() == ncols {
            break;
        }
        let mut lo = usize::MAX;
        for (c, x) in row {
            dense[*c] = reduce_int(x, p);
            lo = lo.min(*c);
        }
        let mut lead = None;
        for c in lo.min(ncols)..ncols {
            let x = dense[c];
            if x == 0 {
                continue;
            }
            match pivot_row[c] {
                Some(r) => {
                    let f = p - x;
                    for &(j, y) in &stored[r] {
                        dense[j] = (dense[j] + mul_mod(f, y, p)) % p;
                    }
                }
                None => {
                    lead.get_or_insert(c);
                }
            }
        }
        if let Some(l) = lead {
            let inv = inv_mod(dense[l], p);
            let mut out = Vec::new();
            for (c, slot) in dense.iter_mut().enumerate().skip(l) {
                if *slot != 0 {
                    out.push((c, mul_mod(*slot, inv, p)));
                    *slot = 0;
                }
            }
            pivot_row[l] = Some(stored.len());
            stored.push(out);
        } else {
            dense.iter_mut().for_each(|x| *x = 0);
        }
    }
    // back substitution, highest pivot first
    let mut order: Vec<(usize, usize)> = stored
        .iter()
        .enumerate()
        .map(|(i, r)| (r[0].0, i))
        .collect();
    order.sort_unstable();
    let mut done: Vec<Option<ModRow>> = vec![None; ncols];
    for &(piv, i) in order.iter().rev() {
        for &(c, x) in &stored[i] {
            dense[c] = x;
        }
        for c in piv + 1..ncols {
            let x = dense[c];
            if x == 0 {
                continue;
            }
            if let Some(r) = &done[c] {
                let f = p - x;
                dense[c] = 0;
                for &(j, y) in r {
                    dense[j] = (dense[j] + mul_mod(f, y, p)) % p;
                }
            }
        }
        let mut out = Vec::new();
        for (c, slot) in dense.iter_mut().enumerate().skip(piv + 1) {
            if *slot != 0 {
                out.push((c, *slot));
                *slot = 0;
            }
        }
        dense[piv] = 0;
        done[piv] = Some(out);
    }
    let pivots: Vec<usize> = order.iter().map(|(c, _)| *c).collect();
    let rows = pivots.iter().map(|&c| done[c].take().unwrap()).collect();
    ModRref { pivots, rows }
}

/// Smallest `a/b` congruent to `u` modulo `m` with both sides below
/// `sqrt(m/2)`, if one exists.
fn reconstruct(u: &BigInt, m: &BigInt, bound: &BigInt) -> Option<Rational> {
    let (mut r0, mut r1) = (m.clone(), u.clone());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > *bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rational::new(r1, t1))
}

/// Accumulated CRT images of the non-pivot entries.
struct Lift {
    pivots: Vec<usize>,
    free: Vec<usize>,
    /// `values[i][k]` is entry (row `i`, column `free[k]`) mod `modulus`.
    values: Vec<Vec<BigInt>>,
    modulus: BigInt,
    /// Entry that failed the last reconstruction; tried first next time.
    probe: (usize, usize),
}

impl Lift {
    fn start(m: &ModRref, ncols: usize, p: u64) -> Lift {
        let mut is_pivot = vec![false; ncols];
        for &c in &m.pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..ncols).filter(|&c| !is_pivot[c]).collect();
        let mut lift = Lift {
            pivots: m.pivots.clone(),
            values: vec![vec![BigInt::zero(); free.len()]; m.pivots.len()],
            free,
            modulus: BigInt::one(),
            probe: (0, 0),
        };
        lift.absorb(m, p);
        lift
    }

    fn position(&self) -> Vec<usize> {
        let mut pos = vec![usize::MAX; self.free.last().map_or(0, |c| c + 1)];
        for (k, &c) in self.free.iter().enumerate() {
            pos[c] = k;
        }
        pos
    }

    fn absorb(&mut self, m: &ModRref, p: u64) {
        let pos = self.position();
        let pb = BigInt::from(p);
        let minv = BigInt::from(inv_mod(reduce_int(&self.modulus, p), p));
        let mut image = vec![0u64; self.free.len()];
        for (i, row) in m.rows.iter().enumerate() {
            for &(c, x) in row {
                image[pos[c]] = x;
            }
            for (k, v) in self.values[i].iter_mut().enumerate() {
                let r = BigInt::from(image[k]);
                let diff = (r - reduce_int(v, p)).mod_floor(&pb);
                let step = (diff * &minv).mod_floor(&pb);
                if !step.is_zero() {
                    *v += &self.modulus * step;
                }
                image[k] = 0;
            }
        }
        self.modulus *= pb;
    }

    fn reconstruct(&mut self) -> Option<Vec<SparseVec>> {
        let bound = (&self.modulus / BigInt::from(2u8)).sqrt();
        let (pi, pk) = self.probe;
        if let Some(v) = self.values.get(pi).and_then(|r| r.get(pk)) {
            reconstruct(v, &self.modulus, &bound)?;
        }
        let mut out = Vec::with_capacity(self.pivots.len());
        for (i, &piv) in self.pivots.iter().enumerate() {
            let mut e = vec![(piv, Rational::one())];
            for (k, v) in self.values[i].iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                match reconstruct(v, &self.modulus, &bound) {
                    Some(q) => e.push((self.free[k], q)),
                    None => {
                        self.probe = (i, k);
                        return None;
                    }
                }
            }
            out.push(SparseVec::from_entries(e));
        }
        Some(out)
    }

    fn agrees(&self, rows: &[SparseVec], m: &ModRref, p: u64) -> bool {
        let pb = BigInt::from(p);
        rows.iter().zip(&m.rows).all(|(row, img)| {
            let mut it = img.iter().peekable();
            row.iter().skip(1).all(|(c, q)| {
                let expect = (q.numer() * BigInt::from(inv_mod(reduce_int(q.denom(), p), p)))
                    .mod_floor(&pb);
                match it.next() {
                    Some(&(c2, x)) => c2 == c && BigInt::from(x) == expect,
                    None => false,
                }
            }) && it.peek().is_none()
        })
    }
}

/// Every row of `A` reduces to zero against the candidate, which is already
/// fully reduced, so one pass over its pivots suffices. Each candidate row is
/// kept as an integer row over a denominator so the check avoids gcds.
fn certify(int_rows: &[Vec<(usize, BigInt)>], rref: &[SparseVec], pivots: &[usize], ncols: usize) -> bool {
    let scaled: Vec<(BigInt, Vec<(usize, BigInt)>)> = rref
        .iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
            let row = r.iter().skip(1).map(|(c, x)| (c, x.numer() * (&l / x.denom()))).collect();
            (l, row)
        })
        .collect();
    let mut row_of = vec![usize::MAX; ncols];
    for (i, &p) in pivots.iter().enumerate() {
        row_of[p] = i;
    }
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); ncols];
    let mut touched: Vec<usize> = Vec::new();
    for row in int_rows {
        // a_j·D = Σ_c a_c·(D / L_c)·R'_c[j] on free columns, D the common denominator
        let d = row
            .iter()
            .filter(|(c, _)| row_of[*c] != usize::MAX)
            .fold(BigInt::one(), |acc, (c, _)| acc.lcm(&scaled[row_of[*c]].0));
        for (c, x) in row {
            if row_of[*c] != usize::MAX {
                let (l, r) = &scaled[row_of[*c]];
                let f = x * (&d / l);
                for (j, y) in r {
                    touched.push(*j);
                    acc[*j] -= &f * y;
                }
            } else {
                touched.push(*c);
                acc[*c] += x * &d;
            }
        }
        let ok = touched.iter().all(|&j| acc[j].is_zero());
        for j in touched.drain(..) {
            acc[j] = BigInt::zero();
        }
        if !ok {
            return false;
        }
    }
    true
}

/// Exact rref of the given rows, or `None` if no certificate was reached
/// within the prime budget.
pub(super) fn rref(rows: &[SparseVec], ncols: usize) -> Option<(Vec<SparseVec>, Vec<usize>)> {
    let int_rows = integer_rows(rows);
    if int_rows.is_empty() {
        return Some((Vec::new(), Vec::new()));
    }
    let mut ps = primes();
    let p0 = ps.next()?;
    let first = rref_mod(&int_rows, ncols, p0);
    if first.pivots.len() == ncols {
        // full rank modulo p forces full rank over Q
        let rows = (0..ncols).map(SparseVec::unit).collect();
        return Some((rows, (0..ncols).collect()));
    }
    let mut lift = Lift::start(&first, ncols, p0);
    let mut candidate: Option<Vec<SparseVec>> = None;
    for _ in 1..MAX_PRIMES {
        let p = ps.next()?;
        let m = rref_mod(&int_rows, ncols, p);
        let better = m.pivots.len() > lift.pivots.len()
            || (m.pivots.len() == lift.pivots.len() && m.pivots < lift.pivots);
        if better {
            // the previous primes were unlucky
            lift = Lift::start(&m, ncols, p);
            candidate = None;
            continue;
        }
        if m.pivots != lift.pivots {
            continue;
        }
        if let Some(c) = &candidate {
            if lift.agrees(c, &m, p) && certify(&int_rows, c, &lift.pivots, ncols) {
                return candidate.map(|c| (c, lift.pivots.clone()));
            }
        }
        lift.absorb(&m, p);
        candidate = lift.reconstruct();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::super::{int, rat, Echelon};
    use super::*;
    use proptest::prelude::*;

    fn incremental(rows: &[SparseVec], ncols: usize) -> (Vec<SparseVec>, Vec<usize>) {
        Echelon::from_rows_incremental(ncols, rows.iter().cloned()).into_rref()
    }

    #[test]
    fn small_primes_are_recognised() {
        let found: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(found, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(2_147_483_649));
    }

    #[test]
    fn reconstruction_inverts_reduction() {
        let m = BigInt::from(2_147_483_647u64) * BigInt::from(2_147_483_629u64);
        let bound = (&m / BigInt::from(2u8)).sqrt();
        for q in [rat(-7, 9), rat(123_456, 789), int(-1), rat(1, 65_536)] {
            let e = q.denom().extended_gcd(&m);
            let u = (q.numer() * e.x).mod_floor(&m);
            assert_eq!(reconstruct(&u, &m, &bound), Some(q));
        }
    }

    #[test]
    fn entries_larger_than_one_prime() {
        // the answer needs several primes before it can be reconstructed
        let big = BigInt::from(3u8).pow(90);
        let r = Rational::new(big.clone(), big + BigInt::one());
        let rows = vec![
            SparseVec::from_entries(vec![(0, int(1)), (2, r.clone())]),
            SparseVec::from_entries(vec![(0, int(2)), (1, int(1)), (2, int(5))]),
            SparseVec::from_entries(vec![(0, int(3)), (1, int(1)), (2, r + int(5))]),
        ];
        let got = rref(&rows, 3).unwrap();
        assert_eq!(got, incremental(&rows, 3));
        assert_eq!(got.1, vec![0, 1]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn agrees_with_rational_elimination(
            dense in prop::collection::vec(prop::collection::vec(-4i64..=4, 6), 0..8),
            scale in 1i64..1000,
        ) {
            let rows: Vec<SparseVec> = dense
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let d = if i % 2 == 0 { 1 } else { scale };
                    SparseVec::from_dense(&r.iter().map(|&x| rat(x * scale, d)).collect::<Vec<_>>())
                })
                .collect();
            prop_assert_eq!(rref(&rows, 6).unwrap(), incremental(&rows, 6));
        }
    }
}
