//! Truncated convolution modulo an arbitrary `m < 2^62` via number-theoretic
//! transforms over two or three 62-bit primes and Garner recombination.
//!
//! The exact integer convolution of residues in `[0, m)` is bounded by
//! `min(la, lb) * (m - 1)^2`; the prime count is chosen so the product of
//! the transform primes exceeds that bound, which makes the result exact
//! before the final reduction mod `m`.

use crate::par::Exec;

#[derive(Clone, Copy, Debug)]
struct NttPrime {
    q: u64,
    generator: u64,
    neg_qinv: u64,
    r2: u64,
}

impl NttPrime {
    const fn new(q: u64, generator: u64) -> Self {
        let mut inv = q;
        let mut i = 0;
        while i < 6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(q.wrapping_mul(inv)));
            i += 1;
        }
        let r = ((1u128 << 64) % q as u128) as u64;
        let r2 = ((r as u128 * r as u128) % q as u128) as u64;
        NttPrime {
            q,
            generator,
            neg_qinv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline(always)]
    fn mul(&self, a: u64, b: u64) -> u64 {
        let t = a as u128 * b as u128;
        let m = (t as u64).wrapping_mul(self.neg_qinv);
        let u = ((t + m as u128 * self.q as u128) >> 64) as u64;
        if u >= self.q {
            u - self.q
        } else {
            u
        }
    }

    #[inline(always)]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    /// `[0, 2q) -> [0, q)`.
    #[inline(always)]
    fn reduce1(&self, a: u64) -> u64 {
        if a >= self.q {
            a - self.q
        } else {
            a
        }
    }

    fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.q, self.r2)
    }

    fn from_mont(&self, a: u64) -> u64 {
        self.mul(a, 1)
    }

    fn pow(&self, base: u64, mut e: u64) -> u64 {
        let mut b = base;
        let mut r = self.to_mont(1);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// `table[h + j] = w_{2h}^j` for every power of two `h < size`.
    fn twiddles(&self, size: usize, inverse: bool) -> Vec<u64> {
        let mut table = vec![0u64; size.max(2)];
        let g = self.to_mont(self.generator);
        let mut h = 1;
        while h < size {
            let mut w = self.pow(g, (self.q - 1) / (2 * h as u64));
            if inverse {
                w = self.pow(w, self.q - 2);
            }
            table[h] = self.to_mont(1);
            for j in 1..h {
                table[h + j] = self.mul(table[h + j - 1], w);
            }
            h *= 2;
        }
        table
    }

    /// Montgomery product for `a < 4q`, `b < q`; result in `[0, 2q)`.
    #[inline(always)]
    fn mul_lazy(&self, a: u64, b: u64) -> u64 {
        let t = a as u128 * b as u128;
        let m = (t as u64).wrapping_mul(self.neg_qinv);
        ((t + m as u128 * self.q as u128) >> 64) as u64
    }

    #[inline(always)]
    fn reduce2(&self, a: u64) -> u64 {
        if a >= 2 * self.q {
            a - 2 * self.q
        } else {
            a
        }
    }

    /// One DIF level of half-width `h`; values stay in `[0, 2q)`.
    fn dif_level(&self, a: &mut [u64], h: usize, w: &[u64]) {
        let q2 = 2 * self.q;
        let tw = &w[h..2 * h];
        for block in a.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for ((x, y), &t) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
                let u = *x;
                let v = *y;
                *x = self.reduce2(u + v);
                *y = self.mul_lazy(u + q2 - v, t);
            }
        }
    }

    /// Two DIF levels `h` and `h/2` in one pass over memory.
    fn dif_level_pair(&self, a: &mut [u64], h: usize, w: &[u64]) {
        let q2 = 2 * self.q;
        let g = h / 2;
        let tw_h = &w[h..2 * h];
        let tw_g = &w[g..h];
        for block in a.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            let (a0, a1) = lo.split_at_mut(g);
            let (a2, a3) = hi.split_at_mut(g);
            for j in 0..g {
                let (x0, x1, x2, x3) = (a0[j], a1[j], a2[j], a3[j]);
                let y0 = self.reduce2(x0 + x2);
                let y2 = self.mul_lazy(x0 + q2 - x2, tw_h[j]);
                let y1 = self.reduce2(x1 + x3);
                let y3 = self.mul_lazy(x1 + q2 - x3, tw_h[j + g]);
                a0[j] = self.reduce2(y0 + y1);
                a1[j] = self.mul_lazy(y0 + q2 - y1, tw_g[j]);
                a2[j] = self.reduce2(y2 + y3);
                a3[j] = self.mul_lazy(y2 + q2 - y3, tw_g[j]);
            }
        }
    }

    /// Natural order in, bit-reversed out, values in `[0, 2q)`.
    fn forward(&self, a: &mut [u64], w: &[u64]) {
        let n = a.len();
        let mut h = n / 2;
        while 2 * h > CACHE_BLOCK && h >= 2 {
            self.dif_level_pair(a, h, w);
            h /= 4;
        }
        if h == 0 {
            return;
        }
        for chunk in a.chunks_exact_mut((2 * h).min(n)) {
            let mut hh = h;
            while hh >= 1 {
                self.dif_level(chunk, hh, w);
                hh /= 2;
            }
        }
    }

    /// One DIT level of half-width `h`; values stay in `[0, 2q)`.
    fn dit_level(&self, a: &mut [u64], h: usize, w: &[u64]) {
        let q2 = 2 * self.q;
        let tw = &w[h..2 * h];
        for block in a.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for ((x, y), &t) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
                let u = *x;
                let v = self.mul_lazy(*y, t);
                *x = self.reduce2(u + v);
                *y = self.reduce2(u + q2 - v);
            }
        }
    }

    /// Two DIT levels `g` and `2g` in one pass.
    fn dit_level_pair(&self, a: &mut [u64], g: usize, w: &[u64]) {
        let q2 = 2 * self.q;
        let h = 2 * g;
        let tw_g = &w[g..h];
        let tw_h = &w[h..2 * h];
        for block in a.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            let (a0, a1) = lo.split_at_mut(g);
            let (a2, a3) = hi.split_at_mut(g);
            for j in 0..g {
                let (x0, x1, x2, x3) = (a0[j], a1[j], a2[j], a3[j]);
                let v1 = self.mul_lazy(x1, tw_g[j]);
                let y0 = self.reduce2(x0 + v1);
                let y1 = self.reduce2(x0 + q2 - v1);
                let v3 = self.mul_lazy(x3, tw_g[j]);
                let y2 = self.reduce2(x2 + v3);
                let y3 = self.reduce2(x2 + q2 - v3);
                let v2 = self.mul_lazy(y2, tw_h[j]);
                a0[j] = self.reduce2(y0 + v2);
                a2[j] = self.reduce2(y0 + q2 - v2);
                let v3 = self.mul_lazy(y3, tw_h[j + g]);
                a1[j] = self.reduce2(y1 + v3);
                a3[j] = self.reduce2(y1 + q2 - v3);
            }
        }
    }

    /// Bit-reversed in, natural order out, unscaled, values in `[0, 2q)`.
    fn inverse(&self, a: &mut [u64], w: &[u64]) {
        let n = a.len();
        let block = CACHE_BLOCK.min(n);
        let mut h = 1;
        for chunk in a.chunks_exact_mut(block) {
            h = 1;
            while 2 * h <= block {
                self.dit_level(chunk, h, w);
                h *= 2;
            }
        }
        while 4 * h <= n {
            self.dit_level_pair(a, h, w);
            h *= 4;
        }
        if h < n {
            self.dit_level(a, h, w);
        }
    }

    /// Low `out_len` coefficients of `a * b` modulo this prime.
    fn convolve(&self, a: &[u64], b: Option<&[u64]>, size: usize, out_len: usize) -> Vec<u64> {
        let fw = self.twiddles(size, false);
        let load = |src: &[u64]| {
            let mut v = vec![0u64; size];
            for (d, &s) in v.iter_mut().zip(src) {
                *d = self.to_mont(s);
            }
            self.forward(&mut v, &fw);
            v
        };
        let mut fa = load(a);
        match b {
            Some(b) => {
                let fb = load(b);
                for (x, y) in fa.iter_mut().zip(&fb) {
                    *x = self.mul_lazy(*x, self.reduce1(*y));
                }
            }
            None => {
                for x in fa.iter_mut() {
                    let r = self.reduce1(*x);
                    *x = self.mul_lazy(r, r);
                }
            }
        }
        drop(fw);
        let iw = self.twiddles(size, true);
        self.inverse(&mut fa, &iw);
        // n^{-1} folded into the exit from Montgomery form
        let n_inv = self.pow(self.to_mont(size as u64), self.q - 2);
        let scale = self.from_mont(n_inv);
        fa.truncate(out_len);
        for x in fa.iter_mut() {
            *x = self.mul(self.reduce1(*x), scale);
        }
        fa
    }
}

const PRIMES: [NttPrime; 3] = [
    NttPrime::new(0x3fffff5d00000001, 5),
    NttPrime::new(0x3fffff4900000001, 3),
    NttPrime::new(0x3ffffecb00000001, 3),
];

/// Transform levels below this block size run on cache-resident chunks.
const CACHE_BLOCK: usize = 1 << 13;

/// Largest transform length the primes support.
pub const MAX_TRANSFORM: usize = 1 << 32;

fn primes_needed(terms: usize, modulus: u64) -> usize {
    let bound = (terms.max(1) as f64).log2() + 2.0 * ((modulus.max(2) - 1) as f64).log2();
    let two = (PRIMES[0].q as f64).log2() + (PRIMES[1].q as f64).log2();
    if bound + 1.0 < two {
        2
    } else {
        3
    }
}

#[inline]
fn mulmod_u128(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// First `len` coefficients of `a * b`, residues in `[0, modulus)`.
pub fn convolve_mod(a: &[u64], b: &[u64], len: usize, modulus: u64, exec: Exec) -> Vec<u64> {
    let squaring = std::ptr::eq(a.as_ptr(), b.as_ptr()) && a.len() == b.len();
    let la = a.len().min(len);
    let lb = b.len().min(len);
    if la == 0 || lb == 0 {
        return vec![0; len];
    }
    let a = &a[..la];
    let b = &b[..lb];
    let full = la + lb - 1;
    let out_len = len.min(full);
    let size = full.next_power_of_two();
    assert!(
        size <= MAX_TRANSFORM,
        "convolution too long for the NTT primes"
    );

    let k = primes_needed(la.min(lb), modulus);
    let channels: Vec<Vec<u64>> = exec.map_slice(&PRIMES[..k], |pr| {
        pr.convolve(a, if squaring { None } else { Some(b) }, size, out_len)
    });

    let (p0, p1, p2) = (PRIMES[0], PRIMES[1], PRIMES[2]);
    // q0^{-1} mod q1 and (q0 q1)^{-1} mod q2, kept in Montgomery form so a
    // single Montgomery product yields the plain residue.
    let c01 = p1.pow(p1.to_mont(p0.q % p1.q), p1.q - 2);
    let q01_mod_q2 = mulmod_u128(p0.q % p2.q, p1.q % p2.q, p2.q);
    let c012 = p2.pow(p2.to_mont(q01_mod_q2), p2.q - 2);
    let q0_m = p0.q % modulus;
    let q01_m = mulmod_u128(q0_m, p1.q % modulus, modulus);

    let mut out = vec![0u64; len];
    exec.fill_chunks(&mut out[..out_len], 1 << 14, |start, chunk| {
        for (off, slot) in chunk.iter_mut().enumerate() {
            let i = start + off;
            let r0 = channels[0][i];
            let r1 = channels[1][i];
            let t1 = p1.mul(p1.sub(r1, r0 % p1.q), c01);
            let mut acc = (r0 % modulus) as u128 + (q0_m as u128 * t1 as u128) % modulus as u128;
            if k == 3 {
                let r2 = channels[2][i];
                let partial = (r0 as u128 + p0.q as u128 * t1 as u128) % p2.q as u128;
                let t2 = p2.mul(p2.sub(r2, partial as u64), c012);
                acc += (q01_m as u128 * t2 as u128) % modulus as u128;
            }
            *slot = (acc % modulus as u128) as u64;
        }
    });
    out
}
