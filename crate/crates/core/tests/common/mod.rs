#![allow(dead_code)]

use cuspforge::geometry::normalize_direction;
use cuspforge::quad::{FieldTag, QuadInt};
use cuspforge::Int;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn tag(d: u32) -> FieldTag {
    FieldTag::new(d).unwrap()
}

pub fn q(t: FieldTag, x: i64, y: i64) -> QuadInt {
    QuadInt::new(t, x, y)
}

pub fn norm(a: &QuadInt) -> i64 {
    a.norm().to_i64().unwrap()
}

/// All elements with `lo <= N(a) <= hi`, in a fixed order.
pub fn elements_with_norm(t: FieldTag, lo: i64, hi: i64) -> Vec<QuadInt> {
    let r = 2 * ((hi as f64).sqrt() as i64) + 2;
    let mut out = Vec::new();
    for y in -r..=r {
        for x in -r..=r {
            let a = q(t, x, y);
            let n = norm(&a);
            if n >= lo && n <= hi {
                out.push(a);
            }
        }
    }
    out
}

/// Coprime slopes `(a, b)` with `N(a), N(b) <= bound`, one per projective class.
pub fn coprime_slopes(t: FieldTag, bound: i64) -> Vec<(QuadInt, QuadInt)> {
    let els = elements_with_norm(t, 0, bound);
    let mut out = Vec::new();
    for a in &els {
        for b in &els {
            if a.is_zero() && b.is_zero() {
                continue;
            }
            if !a.gcd(b).unwrap().is_unit() {
                continue;
            }
            if normalize_direction(a, b).unwrap() == (a.clone(), b.clone()) {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_quad(r: &mut ChaCha8Rng, t: FieldTag, span: i64) -> QuadInt {
    q(t, r.gen_range(-span..=span), r.gen_range(-span..=span))
}

pub fn random_nonzero(r: &mut ChaCha8Rng, t: FieldTag, max_norm: i64) -> QuadInt {
    loop {
        let a = random_quad(r, t, 3);
        let n = norm(&a);
        if n > 0 && n <= max_norm {
            return a;
        }
    }
}

/// A torsion point with coordinates `p/den`, `den <= max_den`.
pub fn random_torsion(r: &mut ChaCha8Rng, max_den: i64) -> cuspforge::lattice::RatVec {
    let den = r.gen_range(1..=max_den);
    let num = (0..4).map(|_| Int::from(r.gen_range(0..den))).collect();
    cuspforge::lattice::RatVec::new(num, Int::from(den))
}

pub fn int(n: i64) -> Int {
    Int::from(n)
}
